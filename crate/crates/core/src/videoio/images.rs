//! Still-image formats: binary PPM (P6) read/write, PGM (P5) write, PNG read.

use std::fs;
use std::io::{BufReader, Cursor, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::videoio::frame::Frame;

/// Splits the next whitespace-delimited header token, skipping `#` comments.
fn next_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Option<&'a [u8]> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    (start < *pos).then(|| &bytes[start..*pos])
}

fn header_number(bytes: &[u8], pos: &mut usize, what: &str) -> Result<usize> {
    next_token(bytes, pos)
        .and_then(|t| std::str::from_utf8(t).ok())
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Format(format!("PPM header: bad {what}")))
}

/// Decodes a binary PPM (P6, maxval 255).
pub fn decode_ppm(bytes: &[u8]) -> Result<Frame> {
    let mut pos = 0;
    if next_token(bytes, &mut pos) != Some(b"P6") {
        return Err(Error::Format("not a binary PPM (P6)".into()));
    }
    let width = header_number(bytes, &mut pos, "width")?;
    let height = header_number(bytes, &mut pos, "height")?;
    let maxval = header_number(bytes, &mut pos, "maxval")?;
    if maxval != 255 {
        return Err(Error::Format(format!("PPM maxval {maxval} unsupported")));
    }
    // exactly one whitespace byte separates header from raster
    pos += 1;
    let need = width * height * 3;
    let raster = bytes.get(pos..pos + need).ok_or(Error::Truncated {
        frame: 0,
        expected: need,
        got: bytes.len().saturating_sub(pos),
    })?;
    Frame::new(width, height, raster.to_vec())
}

pub fn encode_ppm(frame: &Frame) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", frame.width(), frame.height()).into_bytes();
    out.extend_from_slice(frame.as_bytes());
    out
}

pub fn write_ppm(path: &Path, frame: &Frame) -> Result<()> {
    fs::write(path, encode_ppm(frame)).map_err(|e| Error::io(path, e))
}

/// Writes an 8-bit grayscale PGM (P5).
pub fn write_pgm(path: &Path, width: usize, height: usize, gray: &[u8]) -> Result<()> {
    if gray.len() != width * height {
        return Err(Error::Format(format!(
            "PGM buffer holds {} bytes, {width}x{height} needs {}",
            gray.len(),
            width * height
        )));
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(format!("P5\n{width} {height}\n255\n").as_bytes())
        .and_then(|_| f.write_all(gray))
        .map_err(|e| Error::io(path, e))
}

/// Decodes an 8-bit PNG, keeping RGB and dropping any alpha channel.
pub fn decode_png(bytes: &[u8]) -> Result<Frame> {
    let mut decoder = png::Decoder::new(BufReader::new(Cursor::new(bytes)));
    decoder.set_transformations(png::Transformations::EXPAND);
    let mut reader = decoder
        .read_info()
        .map_err(|e| Error::Format(format!("PNG: {e}")))?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::Format("PNG: image too large".into()))?;
    let mut buf = vec![0; size];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| Error::Format(format!("PNG: {e}")))?;
    if info.bit_depth != png::BitDepth::Eight {
        return Err(Error::Format(format!(
            "PNG bit depth {:?} unsupported",
            info.bit_depth
        )));
    }
    let (w, h) = (info.width as usize, info.height as usize);
    let data = &buf[..info.buffer_size()];
    let rgb: Vec<u8> = match info.color_type {
        png::ColorType::Rgb => data.to_vec(),
        png::ColorType::Rgba => data
            .chunks_exact(4)
            .flat_map(|p| [p[0], p[1], p[2]])
            .collect(),
        png::ColorType::Grayscale => data.iter().flat_map(|&g| [g, g, g]).collect(),
        png::ColorType::GrayscaleAlpha => data
            .chunks_exact(2)
            .flat_map(|p| [p[0], p[0], p[0]])
            .collect(),
        other => {
            return Err(Error::Format(format!(
                "PNG color type {other:?} unsupported"
            )))
        }
    };
    Frame::new(w, h, rgb)
}

/// Reads a PPM or PNG file, chosen by extension.
pub fn read_image(path: &Path) -> Result<Frame> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    let decoded = match ext.as_deref() {
        Some("png") => decode_png(&bytes),
        _ => decode_ppm(&bytes),
    };
    decoded.map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

fn is_frame_file(path: &Path) -> bool {
    matches!(
        path.extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .as_deref(),
        Some("ppm" | "png")
    )
}

/// Lists `.ppm`/`.png` files of a directory in lexicographic filename order.
///
/// Names must be zero-padded for this order to match frame order.
pub fn frame_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && is_frame_file(p))
        .collect();
    files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(files)
}

/// Loads every PPM/PNG frame of `dir`, sorted by filename.
pub fn load_frame_sequence(dir: &Path) -> Result<Vec<Frame>> {
    let files = frame_files(dir)?;
    if files.is_empty() {
        return Err(Error::EmptyInput(dir.to_path_buf()));
    }
    let mut frames: Vec<Frame> = Vec::with_capacity(files.len());
    for path in &files {
        let frame = read_image(path)?;
        if let Some(first) = frames.first() {
            if (first.width(), first.height()) != (frame.width(), frame.height()) {
                return Err(Error::DimensionMismatch {
                    expected_w: first.width(),
                    expected_h: first.height(),
                    got_w: frame.width(),
                    got_h: frame.height(),
                    context: path.display().to_string(),
                });
            }
        }
        frames.push(frame);
    }
    Ok(frames)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ppm_roundtrip_and_comments() {
        let mut f = Frame::filled(3, 2, [10, 20, 30]).unwrap();
        f.set_pixel(1, 1, [255, 0, 7]);
        assert_eq!(decode_ppm(&encode_ppm(&f)).unwrap(), f);

        let mut commented = b"P6\n# made by hand\n3 2\n# again\n255\n".to_vec();
        commented.extend_from_slice(f.as_bytes());
        assert_eq!(decode_ppm(&commented).unwrap(), f);
    }

    #[test]
    fn ppm_rejects_other_variants() {
        assert!(decode_ppm(b"P3\n2 2\n255\n").is_err());
        assert!(decode_ppm(b"P6\n2 2\n65535\n").is_err());
        assert!(matches!(
            decode_ppm(b"P6\n2 2\n255\n\x00\x01"),
            Err(Error::Truncated { .. })
        ));
    }

    fn encode_png(w: u32, h: u32, color: png::ColorType, data: &[u8]) -> Vec<u8> {
        let mut out = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut out, w, h);
            enc.set_color(color);
            enc.set_depth(png::BitDepth::Eight);
            let mut writer = enc.write_header().unwrap();
            writer.write_image_data(data).unwrap();
        }
        out
    }

    #[test]
    fn png_rgba_drops_alpha() {
        let data: Vec<u8> = (0..4).flat_map(|i| [i * 10, 1, 2, 99]).collect();
        let f = decode_png(&encode_png(2, 2, png::ColorType::Rgba, &data)).unwrap();
        assert_eq!(f.pixel(1, 1), [30, 1, 2]);
        assert_eq!(f.as_bytes().len(), 12);
    }

    #[test]
    fn png_rgb_matches_source() {
        let data: Vec<u8> = (0..27).collect();
        let f = decode_png(&encode_png(3, 3, png::ColorType::Rgb, &data)).unwrap();
        assert_eq!(f.as_bytes(), &data[..]);
    }

    #[test]
    fn sequence_loading_rules() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            load_frame_sequence(dir.path()),
            Err(Error::EmptyInput(_))
        ));

        let red = Frame::filled(4, 4, [255, 0, 0]).unwrap();
        for i in 0..16 {
            write_ppm(&dir.path().join(format!("{i:03}.ppm")), &red).unwrap();
        }
        fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
        let frames = load_frame_sequence(dir.path()).unwrap();
        assert_eq!(frames.len(), 16);
        assert!(frames.iter().all(|f| *f == red));

        let mixed = tempfile::tempdir().unwrap();
        write_ppm(
            &mixed.path().join("a.ppm"),
            &Frame::filled(8, 8, [0; 3]).unwrap(),
        )
        .unwrap();
        write_ppm(&mixed.path().join("b.ppm"), &red).unwrap();
        assert!(matches!(
            load_frame_sequence(mixed.path()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn unreadable_file_names_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let bad = dir.path().join("000.ppm");
        fs::write(&bad, b"garbage").unwrap();
        let err = load_frame_sequence(dir.path()).unwrap_err().to_string();
        assert!(err.contains("000.ppm"), "{err}");
    }
}
