//! The three spatial partitioning patterns, realised as per-pixel region maps.
//!
//! Indices are 0-based. Figure-style 1-based numbers are `index + 1`.
//!
//! * `Grid4x4`: 16 blocks, `4 * floor(4y / H) + floor(4x / W)`, row-major.
//! * `Rings4`: with gap `g = floor(min(H, W) / 8)`, rings 0..=2 lie between insets
//!   `k * g` and `(k + 1) * g`; region 3 is the centre rectangle.
//! * `Wedges8`: the two centre lines and the two corner-to-corner diagonals cut the
//!   frame into 8 sectors, numbered counterclockwise (y up) from the sector just
//!   above the positive-x centre line. Pixels on a cut go to the lower index.

use std::path::Path;

use crate::error::{Error, Result};
use crate::videoio::images::write_pgm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PatternId {
    Grid4x4,
    Rings4,
    Wedges8,
}

impl PatternId {
    pub const ALL: [PatternId; 3] = [PatternId::Grid4x4, PatternId::Rings4, PatternId::Wedges8];

    pub fn region_count(self) -> usize {
        match self {
            PatternId::Grid4x4 => 16,
            PatternId::Rings4 => 4,
            PatternId::Wedges8 => 8,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PatternId::Grid4x4 => "grid4x4",
            PatternId::Rings4 => "rings4",
            PatternId::Wedges8 => "wedges8",
        }
    }

    /// 1-based pattern number as drawn left to right.
    pub fn figure_number(self) -> usize {
        match self {
            PatternId::Grid4x4 => 1,
            PatternId::Rings4 => 2,
            PatternId::Wedges8 => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionMap {
    pub pattern: PatternId,
    pub width: usize,
    pub height: usize,
    region_of: Vec<u8>,
}

#[inline]
fn grid_region(x: usize, y: usize, w: usize, h: usize) -> u8 {
    (4 * (4 * y / h) + 4 * x / w) as u8
}

#[inline]
fn ring_region(x: usize, y: usize, w: usize, h: usize, gap: usize) -> u8 {
    let inset = x.min(y).min(w - 1 - x).min(h - 1 - y);
    (inset / gap).min(3) as u8
}

/// Sector of a pixel given doubled, centred, y-up coordinates (`cx`, `cy`) and the
/// frame extents `(W - 1, H - 1)` that set the diagonal slope.
#[inline]
fn wedge_sector(cx: i64, cy: i64, ex: i64, ey: i64) -> u8 {
    if cx == 0 && cy == 0 {
        return 0;
    }
    // vertical > horizontal means the pixel is steeper than the diagonal
    let vertical = cy.abs() * ex;
    let horizontal = cx.abs() * ey;
    if cy >= 0 && cx > 0 {
        if vertical <= horizontal {
            0
        } else {
            1
        }
    } else if cx <= 0 && cy > 0 {
        if cx == 0 {
            1
        } else if vertical >= horizontal {
            2
        } else {
            3
        }
    } else if cy <= 0 && cx < 0 {
        if cy == 0 {
            3
        } else if vertical <= horizontal {
            4
        } else {
            5
        }
    } else if cx == 0 {
        5
    } else if vertical >= horizontal {
        6
    } else {
        7
    }
}

/// Builds the region map of `pattern` for an `height x width` frame.
pub fn region_map(pattern: PatternId, height: usize, width: usize) -> Result<RegionMap> {
    if height < 8 || width < 8 {
        return Err(Error::Geometry(format!(
            "partitioning needs at least 8x8 pixels, got {width}x{height}"
        )));
    }
    let mut region_of = Vec::with_capacity(width * height);
    match pattern {
        PatternId::Grid4x4 => {
            for y in 0..height {
                for x in 0..width {
                    region_of.push(grid_region(x, y, width, height));
                }
            }
        }
        PatternId::Rings4 => {
            let gap = height.min(width) / 8;
            if gap == 0 {
                return Err(Error::Geometry("ring gap is zero".into()));
            }
            for y in 0..height {
                for x in 0..width {
                    region_of.push(ring_region(x, y, width, height, gap));
                }
            }
        }
        PatternId::Wedges8 => {
            let (ex, ey) = (width as i64 - 1, height as i64 - 1);
            for y in 0..height as i64 {
                for x in 0..width as i64 {
                    region_of.push(wedge_sector(2 * x - ex, ey - 2 * y, ex, ey));
                }
            }
        }
    }
    let map = RegionMap {
        pattern,
        width,
        height,
        region_of,
    };
    if map.region_areas().contains(&0) {
        return Err(Error::Geometry(format!(
            "{} leaves an empty region at {width}x{height}",
            pattern.name()
        )));
    }
    Ok(map)
}

impl RegionMap {
    pub fn region_count(&self) -> usize {
        self.pattern.region_count()
    }

    #[inline]
    pub fn region_at(&self, x: usize, y: usize) -> usize {
        self.region_of[y * self.width + x] as usize
    }

    /// Region of every pixel, row-major.
    pub fn regions(&self) -> impl Iterator<Item = usize> + '_ {
        self.region_of.iter().map(|&r| r as usize)
    }

    pub fn region_areas(&self) -> Vec<usize> {
        let mut areas = vec![0; self.region_count()];
        for r in self.regions() {
            areas[r] += 1;
        }
        areas
    }

    /// Row-major pixel indices belonging to `region`.
    pub fn region_pixels(&self, region: usize) -> Result<Vec<usize>> {
        if region >= self.region_count() {
            return Err(Error::Range(format!(
                "region {region} outside 0..{}",
                self.region_count()
            )));
        }
        Ok(self
            .regions()
            .enumerate()
            .filter(|&(_, r)| r == region)
            .map(|(i, _)| i)
            .collect())
    }

    /// Writes the map as a PGM whose gray level is the region index.
    pub fn write_pgm(&self, path: &Path) -> Result<()> {
        write_pgm(path, self.width, self.height, &self.region_of)
    }
}

/// Region maps for all three patterns at one frame size.
#[derive(Debug, Clone)]
pub struct PatternSet {
    pub maps: [RegionMap; 3],
}

impl PatternSet {
    pub fn new(height: usize, width: usize) -> Result<Self> {
        Ok(PatternSet {
            maps: [
                region_map(PatternId::Grid4x4, height, width)?,
                region_map(PatternId::Rings4, height, width)?,
                region_map(PatternId::Wedges8, height, width)?,
            ],
        })
    }
}
