//! Clip geometry: resizing, clip splitting, cropping, flipping and luma conversion.

use rand::Rng;

use crate::error::{Error, Result};
use crate::videoio::frame::{Clip, Frame, GrayFrame};

/// Maps a destination pixel centre to a clamped source coordinate.
#[inline]
fn source_coord(dst: usize, src_len: usize, dst_len: usize) -> f64 {
    let s = (dst as f64 + 0.5) * src_len as f64 / dst_len as f64 - 0.5;
    s.clamp(0.0, (src_len - 1) as f64)
}

/// Bilinear resize with pixel-centre alignment and edge clamping.
/// Aspect ratio is not preserved.
pub fn resize_bilinear(frame: &Frame, target_height: usize, target_width: usize) -> Result<Frame> {
    if target_height < 2 || target_width < 2 {
        return Err(Error::Geometry(format!(
            "resize target {target_width}x{target_height} below 2x2"
        )));
    }
    let (sw, sh) = (frame.width(), frame.height());
    let src = frame.as_bytes();
    let xs: Vec<(usize, usize, f64)> = (0..target_width)
        .map(|x| {
            let s = source_coord(x, sw, target_width);
            let x0 = s.floor() as usize;
            (x0, (x0 + 1).min(sw - 1), s - x0 as f64)
        })
        .collect();
    let mut out = Vec::with_capacity(target_width * target_height * 3);
    for y in 0..target_height {
        let s = source_coord(y, sh, target_height);
        let y0 = s.floor() as usize;
        let y1 = (y0 + 1).min(sh - 1);
        let fy = s - y0 as f64;
        for &(x0, x1, fx) in &xs {
            for c in 0..3 {
                let p = |xx: usize, yy: usize| f64::from(src[(yy * sw + xx) * 3 + c]);
                let top = p(x0, y0) * (1.0 - fx) + p(x1, y0) * fx;
                let bottom = p(x0, y1) * (1.0 - fx) + p(x1, y1) * fx;
                let v = top * (1.0 - fy) + bottom * fy;
                out.push(v.round().clamp(0.0, 255.0) as u8);
            }
        }
    }
    Frame::new(target_width, target_height, out)
}

/// Start offsets of every full clip of length `n` taken every `stride` frames.
pub fn clip_offsets(frame_count: usize, n: usize, stride: usize) -> Vec<usize> {
    if n == 0 || stride == 0 || frame_count < n {
        return Vec::new();
    }
    (0..=frame_count - n).step_by(stride).collect()
}

/// Splits a frame sequence into clips of `n` frames starting every `stride` frames.
/// A trailing remainder shorter than `n` is dropped.
pub fn extract_clips(frames: &[Frame], n: usize, stride: usize) -> Result<Vec<Clip>> {
    if n < 2 {
        return Err(Error::InvalidParam(format!("clip length {n} < 2")));
    }
    if stride < 1 {
        return Err(Error::InvalidParam("stride must be >= 1".into()));
    }
    clip_offsets(frames.len(), n, stride)
        .into_iter()
        .map(|o| Clip::new(frames[o..o + n].to_vec()))
        .collect()
}

fn crop_frame(frame: &Frame, top: usize, left: usize, h: usize, w: usize) -> Result<Frame> {
    let src = frame.as_bytes();
    let row = frame.width() * 3;
    let mut out = Vec::with_capacity(w * h * 3);
    for y in top..top + h {
        let start = y * row + left * 3;
        out.extend_from_slice(&src[start..start + w * 3]);
    }
    Frame::new(w, h, out)
}

/// Applies one crop window to every frame of the clip.
pub fn crop(clip: &Clip, top: usize, left: usize, height: usize, width: usize) -> Result<Clip> {
    if top + height > clip.height() || left + width > clip.width() {
        return Err(Error::Range(format!(
            "crop {width}x{height} at (top={top}, left={left}) exceeds {}x{} frame",
            clip.width(),
            clip.height()
        )));
    }
    let frames = clip
        .frames()
        .iter()
        .map(|f| crop_frame(f, top, left, height, width))
        .collect::<Result<Vec<_>>>()?;
    Clip::new(frames)
}

/// Top-left corner of a centred `height x width` window.
pub fn center_window(clip: &Clip, height: usize, width: usize) -> Result<(usize, usize)> {
    if height > clip.height() || width > clip.width() {
        return Err(Error::Range(format!(
            "crop {width}x{height} larger than {}x{} frame",
            clip.width(),
            clip.height()
        )));
    }
    Ok(((clip.height() - height) / 2, (clip.width() - width) / 2))
}

pub fn center_crop(clip: &Clip, height: usize, width: usize) -> Result<Clip> {
    let (top, left) = center_window(clip, height, width)?;
    crop(clip, top, left, height, width)
}

/// Uniformly random crop window, drawn from `rng`.
pub fn random_crop<R: Rng>(clip: &Clip, height: usize, width: usize, rng: &mut R) -> Result<Clip> {
    center_window(clip, height, width)?;
    let top = rng.random_range(0..=clip.height() - height);
    let left = rng.random_range(0..=clip.width() - width);
    crop(clip, top, left, height, width)
}

pub fn flip_frame(frame: &Frame) -> Frame {
    let w = frame.width();
    let mut out = frame.clone();
    for y in 0..frame.height() {
        for x in 0..w {
            out.set_pixel(w - 1 - x, y, frame.pixel(x, y));
        }
    }
    out
}

/// Mirrors every frame left to right.
pub fn horizontal_flip(clip: &Clip) -> Clip {
    let frames = clip.frames().iter().map(flip_frame).collect();
    Clip::new(frames).expect("flip preserves clip geometry")
}

/// BT.601 luma in [0, 1].
pub fn to_grayscale(frame: &Frame) -> GrayFrame {
    let data = frame
        .pixels()
        .map(|[r, g, b]| {
            (0.299 * f64::from(r) + 0.587 * f64::from(g) + 0.114 * f64::from(b)) / 255.0
        })
        .collect();
    GrayFrame {
        width: frame.width(),
        height: frame.height(),
        data,
    }
}
