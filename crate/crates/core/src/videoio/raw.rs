//! Headerless RGB24 frames with a plain-text sidecar.
//!
//! For `clip.rgb` the sidecar is `clip.rgb.hdr` and holds the lines
//! `width=W`, `height=H` and `frames=N`.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::videoio::frame::Frame;

pub fn sidecar_path(raw: &Path) -> PathBuf {
    let mut name = raw.as_os_str().to_owned();
    name.push(".hdr");
    PathBuf::from(name)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RawHeader {
    pub width: usize,
    pub height: usize,
    pub frames: usize,
}

pub fn parse_sidecar(text: &str) -> Result<RawHeader> {
    let (mut width, mut height, mut frames) = (None, None, None);
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        let (key, val) = line
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("sidecar line without '=': {line}")))?;
        let val: usize = val
            .trim()
            .parse()
            .map_err(|_| Error::Format(format!("sidecar value not an integer: {line}")))?;
        match key.trim() {
            "width" => width = Some(val),
            "height" => height = Some(val),
            "frames" => frames = Some(val),
            other => return Err(Error::Format(format!("unknown sidecar key {other}"))),
        }
    }
    match (width, height, frames) {
        (Some(width), Some(height), Some(frames)) => Ok(RawHeader {
            width,
            height,
            frames,
        }),
        _ => Err(Error::Format(
            "sidecar needs width, height and frames".into(),
        )),
    }
}

pub fn decode_raw(header: RawHeader, bytes: &[u8]) -> Result<Vec<Frame>> {
    let frame_len = header.width * header.height * 3;
    (0..header.frames)
        .map(|i| {
            let start = i * frame_len;
            let chunk = bytes
                .get(start..start + frame_len)
                .ok_or(Error::Truncated {
                    frame: i,
                    expected: frame_len,
                    got: bytes.len().saturating_sub(start),
                })?;
            Frame::new(header.width, header.height, chunk.to_vec())
        })
        .collect()
}

pub fn read_raw(path: &Path) -> Result<Vec<Frame>> {
    let side = sidecar_path(path);
    let text = fs::read_to_string(&side).map_err(|e| Error::io(&side, e))?;
    let header = parse_sidecar(&text)?;
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_raw(header, &bytes)
}

pub fn write_raw(path: &Path, frames: &[Frame]) -> Result<()> {
    let first = frames
        .first()
        .ok_or_else(|| Error::InvalidParam("no frames to write".into()))?;
    let side = sidecar_path(path);
    let text = format!(
        "width={}\nheight={}\nframes={}\n",
        first.width(),
        first.height(),
        frames.len()
    );
    fs::write(&side, text).map_err(|e| Error::io(&side, e))?;
    let bytes: Vec<u8> = frames
        .iter()
        .flat_map(|f| f.as_bytes().iter().copied())
        .collect();
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sidecar_parsing() {
        let h = parse_sidecar("width=4\nheight=3\n\nframes=2\n").unwrap();
        assert_eq!(
            h,
            RawHeader {
                width: 4,
                height: 3,
                frames: 2
            }
        );
        assert!(parse_sidecar("width=4\nheight=3\n").is_err());
        assert!(parse_sidecar("width=four\nheight=3\nframes=1").is_err());
    }

    #[test]
    fn file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("clip.rgb");
        let frames: Vec<Frame> = (0..3)
            .map(|i| Frame::new(4, 3, (0..36).map(|b| (b * 7 + i) as u8).collect()).unwrap())
            .collect();
        write_raw(&path, &frames).unwrap();
        assert!(sidecar_path(&path).exists());
        assert_eq!(read_raw(&path).unwrap(), frames);
    }

    #[test]
    fn short_payload_is_truncation() {
        let h = RawHeader {
            width: 2,
            height: 2,
            frames: 2,
        };
        assert!(matches!(
            decode_raw(h, &[0; 20]),
            Err(Error::Truncated { frame: 1, .. })
        ));
    }
}
