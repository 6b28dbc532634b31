//! Video decoding and clip preprocessing.

mod frame;
pub mod images;
pub mod raw;
mod transform;
pub mod y4m;

use std::path::Path;

pub use frame::{Clip, Frame, GrayFrame, Rgb};
pub use images::load_frame_sequence;
pub use transform::{
    center_crop, center_window, clip_offsets, crop, extract_clips, flip_frame, horizontal_flip,
    random_crop, resize_bilinear, to_grayscale,
};
pub use y4m::parse_y4m;

use crate::error::{Error, Result};

/// Container layout of an input source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceFormat {
    /// A YUV4MPEG2 file.
    Y4m,
    /// A directory of PPM/PNG frames.
    Frames,
    /// A raw RGB24 file with a `.hdr` sidecar.
    Raw,
}

impl std::str::FromStr for SourceFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "y4m" => Ok(SourceFormat::Y4m),
            "frames" => Ok(SourceFormat::Frames),
            "raw" => Ok(SourceFormat::Raw),
            other => Err(Error::InvalidParam(format!("unknown input format {other}"))),
        }
    }
}

/// Decodes every frame of one source.
pub fn load_source(path: &Path, format: SourceFormat) -> Result<Vec<Frame>> {
    match format {
        SourceFormat::Y4m => {
            let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
            parse_y4m(&bytes)
        }
        SourceFormat::Frames => load_frame_sequence(path),
        SourceFormat::Raw => raw::read_raw(path),
    }
}
