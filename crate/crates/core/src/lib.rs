//! Motion and appearance statistics labels for self-supervised video pre-training.
//!
//! A clip of N frames yields 14 motion labels (largest-motion region and its
//! dominant orientation for three partitioning patterns, plus the frame pair with
//! the most motion) and 13 appearance labels (most and least colour-diverse region
//! with their dominant colours, plus the clip's dominant colour).

pub mod appearancestats;
pub mod error;
pub mod flowcore;
pub mod motionstats;
pub mod parallel;
pub mod partition;
pub mod pipeline;
pub mod synthgen;
pub mod videoio;

pub use error::{Error, Result};
