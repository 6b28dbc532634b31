//! YUV4MPEG2 reader and writer (8-bit, 4:2:0 and 4:4:4).

use std::io::Write;

use crate::error::{Error, Result};
use crate::videoio::frame::Frame;

const MAGIC: &[u8] = b"YUV4MPEG2";
const FRAME_TAG: &[u8] = b"FRAME";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chroma {
    /// 4:2:0, chroma upsampled by nearest neighbour (JPEG siting).
    C420,
    C444,
}

impl Chroma {
    pub fn plane_dims(self, width: usize, height: usize) -> (usize, usize) {
        match self {
            Chroma::C420 => (width.div_ceil(2), height.div_ceil(2)),
            Chroma::C444 => (width, height),
        }
    }
}

/// Parsed stream header. `raw` keeps the original header line (without newline)
/// so that re-encoding is byte exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Y4mHeader {
    pub width: usize,
    pub height: usize,
    pub chroma: Chroma,
    pub framerate: Option<(u32, u32)>,
    pub raw: String,
}

impl Y4mHeader {
    pub fn new(width: usize, height: usize, chroma: Chroma) -> Self {
        let c = match chroma {
            Chroma::C420 => "420jpeg",
            Chroma::C444 => "444",
        };
        Y4mHeader {
            width,
            height,
            chroma,
            framerate: Some((25, 1)),
            raw: format!("YUV4MPEG2 W{width} H{height} F25:1 Ip A1:1 C{c}"),
        }
    }

    fn frame_len(&self) -> usize {
        let (cw, ch) = self.chroma.plane_dims(self.width, self.height);
        self.width * self.height + 2 * cw * ch
    }
}

/// Raw planes of one frame plus any per-frame parameters after `FRAME`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Y4mPlanes {
    pub y: Vec<u8>,
    pub u: Vec<u8>,
    pub v: Vec<u8>,
    pub params: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Y4mStream {
    pub header: Y4mHeader,
    pub frames: Vec<Y4mPlanes>,
}

fn parse_header(line: &str) -> Result<Y4mHeader> {
    let mut tokens = line.split(' ');
    if tokens.next() != Some("YUV4MPEG2") {
        return Err(Error::Format("missing YUV4MPEG2 signature".into()));
    }
    let (mut width, mut height, mut chroma, mut framerate) = (None, None, Chroma::C420, None);
    for tok in tokens.filter(|t| !t.is_empty()) {
        let (key, val) = tok.split_at(1);
        match key {
            "W" => width = Some(parse_dim(val, "W")?),
            "H" => height = Some(parse_dim(val, "H")?),
            "C" => {
                chroma = match val {
                    "420" | "420jpeg" | "420paldv" | "420mpeg2" => Chroma::C420,
                    "444" => Chroma::C444,
                    other => return Err(Error::Format(format!("unsupported colorspace C{other}"))),
                }
            }
            "F" => {
                let (n, d) = val
                    .split_once(':')
                    .ok_or_else(|| Error::Format(format!("bad framerate F{val}")))?;
                let n = n
                    .parse()
                    .map_err(|_| Error::Format(format!("bad framerate F{val}")))?;
                let d = d
                    .parse()
                    .map_err(|_| Error::Format(format!("bad framerate F{val}")))?;
                framerate = Some((n, d));
            }
            // Interlacing, aspect and extension tokens are carried in `raw` only.
            "I" | "A" | "X" => {}
            _ => return Err(Error::Format(format!("unknown header token {tok}"))),
        }
    }
    let width = width.ok_or_else(|| Error::Format("header lacks W".into()))?;
    let height = height.ok_or_else(|| Error::Format("header lacks H".into()))?;
    Ok(Y4mHeader {
        width,
        height,
        chroma,
        framerate,
        raw: line.to_string(),
    })
}

fn parse_dim(val: &str, key: &str) -> Result<usize> {
    match val.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(Error::Format(format!("bad dimension {key}{val}"))),
    }
}

fn read_line(bytes: &[u8], pos: usize) -> Option<(&[u8], usize)> {
    let rest = &bytes[pos..];
    let nl = rest.iter().position(|&b| b == b'\n')?;
    Some((&rest[..nl], pos + nl + 1))
}

/// Parses a complete YUV4MPEG2 byte stream into raw planes.
pub fn parse_y4m_planes(bytes: &[u8]) -> Result<Y4mStream> {
    if !bytes.starts_with(MAGIC) {
        return Err(Error::Format("missing YUV4MPEG2 signature".into()));
    }
    let (line, mut pos) =
        read_line(bytes, 0).ok_or_else(|| Error::Format("unterminated header".into()))?;
    let line = std::str::from_utf8(line).map_err(|_| Error::Format("non-ASCII header".into()))?;
    let header = parse_header(line)?;
    let (cw, ch) = header.chroma.plane_dims(header.width, header.height);
    let ylen = header.width * header.height;
    let clen = cw * ch;
    let frame_len = header.frame_len();

    let mut frames = Vec::new();
    while pos < bytes.len() {
        let index = frames.len();
        let (tag, next) = read_line(bytes, pos).ok_or(Error::Truncated {
            frame: index,
            expected: frame_len,
            got: 0,
        })?;
        if !tag.starts_with(FRAME_TAG) {
            return Err(Error::Format(format!("frame {index} lacks FRAME marker")));
        }
        let params = std::str::from_utf8(&tag[FRAME_TAG.len()..])
            .map_err(|_| Error::Format(format!("frame {index} has non-ASCII parameters")))?
            .to_string();
        pos = next;
        let available = bytes.len() - pos;
        if available < frame_len {
            return Err(Error::Truncated {
                frame: index,
                expected: frame_len,
                got: available,
            });
        }
        let payload = &bytes[pos..pos + frame_len];
        frames.push(Y4mPlanes {
            y: payload[..ylen].to_vec(),
            u: payload[ylen..ylen + clen].to_vec(),
            v: payload[ylen + clen..].to_vec(),
            params,
        });
        pos += frame_len;
    }
    Ok(Y4mStream { header, frames })
}

/// BT.601 studio-swing YCbCr to 8-bit RGB.
#[inline]
pub fn ycbcr_to_rgb(y: u8, cb: u8, cr: u8) -> [u8; 3] {
    let c = 1.164_383 * (f64::from(y) - 16.0);
    let d = f64::from(cb) - 128.0;
    let e = f64::from(cr) - 128.0;
    let q = |x: f64| x.round().clamp(0.0, 255.0) as u8;
    [
        q(c + 1.596_027 * e),
        q(c - 0.391_762 * d - 0.812_968 * e),
        q(c + 2.017_232 * d),
    ]
}

/// 8-bit RGB to BT.601 studio-swing YCbCr.
#[inline]
pub fn rgb_to_ycbcr(rgb: [u8; 3]) -> [u8; 3] {
    let (r, g, b) = (f64::from(rgb[0]), f64::from(rgb[1]), f64::from(rgb[2]));
    let q = |x: f64| x.round().clamp(0.0, 255.0) as u8;
    [
        q(16.0 + 0.256_788 * r + 0.504_129 * g + 0.097_906 * b),
        q(128.0 - 0.148_223 * r - 0.290_993 * g + 0.439_216 * b),
        q(128.0 + 0.439_216 * r - 0.367_788 * g - 0.071_427 * b),
    ]
}

impl Y4mStream {
    pub fn to_frames(&self) -> Result<Vec<Frame>> {
        let (w, h) = (self.header.width, self.header.height);
        let (cw, _) = self.header.chroma.plane_dims(w, h);
        self.frames
            .iter()
            .map(|planes| {
                let mut rgb = Vec::with_capacity(w * h * 3);
                for y in 0..h {
                    for x in 0..w {
                        let ci = match self.header.chroma {
                            Chroma::C420 => (y / 2) * cw + x / 2,
                            Chroma::C444 => y * w + x,
                        };
                        rgb.extend_from_slice(&ycbcr_to_rgb(
                            planes.y[y * w + x],
                            planes.u[ci],
                            planes.v[ci],
                        ));
                    }
                }
                Frame::new(w, h, rgb)
            })
            .collect()
    }

    /// Serializes header and planes back to YUV4MPEG2 bytes.
    pub fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        out.write_all(self.header.raw.as_bytes())?;
        out.write_all(b"\n")?;
        for f in &self.frames {
            out.write_all(FRAME_TAG)?;
            out.write_all(f.params.as_bytes())?;
            out.write_all(b"\n")?;
            out.write_all(&f.y)?;
            out.write_all(&f.u)?;
            out.write_all(&f.v)?;
        }
        Ok(())
    }

    /// Encodes RGB frames as a 4:4:4 stream.
    pub fn from_frames_444(frames: &[Frame]) -> Result<Self> {
        let first = frames
            .first()
            .ok_or_else(|| Error::InvalidParam("no frames to encode".into()))?;
        let header = Y4mHeader::new(first.width(), first.height(), Chroma::C444);
        let frames = frames
            .iter()
            .map(|f| {
                let n = f.width() * f.height();
                let (mut y, mut u, mut v) = (
                    Vec::with_capacity(n),
                    Vec::with_capacity(n),
                    Vec::with_capacity(n),
                );
                for p in f.pixels() {
                    let [a, b, c] = rgb_to_ycbcr(p);
                    y.push(a);
                    u.push(b);
                    v.push(c);
                }
                Y4mPlanes {
                    y,
                    u,
                    v,
                    params: String::new(),
                }
            })
            .collect();
        Ok(Y4mStream { header, frames })
    }
}

/// Decodes a YUV4MPEG2 stream straight to RGB frames.
pub fn parse_y4m(bytes: &[u8]) -> Result<Vec<Frame>> {
    parse_y4m_planes(bytes)?.to_frames()
}
