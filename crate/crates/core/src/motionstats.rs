//! Motion-boundary statistics: the 14-entry motion label vector.
//!
//! Motion boundaries are the spatial derivatives of each flow component. Summing
//! them over the N-1 flows of a clip gives `Mu = (sum u_x, sum u_y)` and
//! `Mv = (sum v_x, sum v_y)`. Constant (camera) motion has zero derivative and
//! drops out.
//!
//! Angles follow the mathematical convention: 0 deg along +x, counterclockwise,
//! with the image y axis negated. Orientation bin `k` covers `[45k, 45(k + 1))`.
//! Every argmax breaks ties toward the lowest index.

use std::path::Path;

use crate::error::{Error, Result};
use crate::flowcore::FlowField;
use crate::partition::{PatternSet, RegionMap};
use crate::videoio::images::write_pgm;

pub const ORIENTATION_BINS: usize = 8;
pub const MOTION_LABEL_COUNT: usize = 14;

/// A per-pixel 2-vector field.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub width: usize,
    pub height: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl VectorField {
    fn zeros(width: usize, height: usize) -> Self {
        VectorField {
            width,
            height,
            x: vec![0.0; width * height],
            y: vec![0.0; width * height],
        }
    }

    fn accumulate(&mut self, gx: &[f64], gy: &[f64]) {
        self.x.iter_mut().zip(gx).for_each(|(a, b)| *a += b);
        self.y.iter_mut().zip(gy).for_each(|(a, b)| *a += b);
    }
}

/// The two summed motion-boundary fields of a clip.
#[derive(Debug, Clone, PartialEq)]
pub struct SummedBoundaries {
    pub mu: VectorField,
    pub mv: VectorField,
}

/// Magnitude and orientation (degrees in [0, 360)) per pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarField {
    pub width: usize,
    pub height: usize,
    pub magnitude: Vec<f64>,
    pub orientation: Vec<f64>,
}

/// Central differences with replicated borders.
pub fn spatial_gradients(field: &[f64], width: usize, height: usize) -> (Vec<f64>, Vec<f64>) {
    let mut gx = vec![0.0; width * height];
    let mut gy = vec![0.0; width * height];
    for y in 0..height {
        let (ym, yp) = (y.saturating_sub(1), (y + 1).min(height - 1));
        for x in 0..width {
            let (xm, xp) = (x.saturating_sub(1), (x + 1).min(width - 1));
            gx[y * width + x] = (field[y * width + xp] - field[y * width + xm]) / 2.0;
            gy[y * width + x] = (field[yp * width + x] - field[ym * width + x]) / 2.0;
        }
    }
    (gx, gy)
}

/// Motion boundaries of a single flow: (grad u, grad v).
pub fn flow_boundaries(flow: &FlowField) -> (VectorField, VectorField) {
    let (w, h) = (flow.width, flow.height);
    let (ux, uy) = spatial_gradients(&flow.u, w, h);
    let (vx, vy) = spatial_gradients(&flow.v, w, h);
    (
        VectorField {
            width: w,
            height: h,
            x: ux,
            y: uy,
        },
        VectorField {
            width: w,
            height: h,
            x: vx,
            y: vy,
        },
    )
}

fn check_uniform(flows: &[FlowField]) -> Result<(usize, usize)> {
    let first = flows
        .first()
        .ok_or_else(|| Error::InvalidParam("at least one flow field is required".into()))?;
    let (w, h) = (first.width, first.height);
    for (i, f) in flows.iter().enumerate() {
        if (f.width, f.height) != (w, h) {
            return Err(Error::DimensionMismatch {
                expected_w: w,
                expected_h: h,
                got_w: f.width,
                got_h: f.height,
                context: format!("flow {i}"),
            });
        }
    }
    Ok((w, h))
}

/// Pixelwise sums of per-flow motion boundaries.
pub fn sum_motion_boundaries(flows: &[FlowField]) -> Result<SummedBoundaries> {
    let (w, h) = check_uniform(flows)?;
    let mut mu = VectorField::zeros(w, h);
    let mut mv = VectorField::zeros(w, h);
    for f in flows {
        let (bu, bv) = flow_boundaries(f);
        mu.accumulate(&bu.x, &bu.y);
        mv.accumulate(&bv.x, &bv.y);
    }
    Ok(SummedBoundaries { mu, mv })
}

/// Angle of an image-coordinate vector in degrees, y axis flipped up, in [0, 360).
#[inline]
pub fn image_angle_degrees(a: f64, b: f64) -> f64 {
    let mut deg = (-b).atan2(a).to_degrees();
    if deg < 0.0 {
        deg += 360.0;
    }
    if deg >= 360.0 {
        deg -= 360.0;
    }
    deg
}

#[inline]
pub fn orientation_bin(degrees: f64) -> usize {
    ((degrees / 45.0).floor() as usize).min(ORIENTATION_BINS - 1)
}

pub fn to_polar(field: &VectorField) -> PolarField {
    let (magnitude, orientation) = field
        .x
        .iter()
        .zip(&field.y)
        .map(|(&a, &b)| {
            let m = a.hypot(b);
            (
                m,
                if m > 0.0 {
                    image_angle_degrees(a, b)
                } else {
                    0.0
                },
            )
        })
        .unzip();
    PolarField {
        width: field.width,
        height: field.height,
        magnitude,
        orientation,
    }
}

fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

fn check_map(polar: &PolarField, map: &RegionMap) {
    assert_eq!(
        (polar.width, polar.height),
        (map.width, map.height),
        "polar field and region map sizes differ"
    );
}

/// Mean magnitude of every region.
pub fn region_mean_magnitudes(polar: &PolarField, map: &RegionMap) -> Vec<f64> {
    check_map(polar, map);
    let k = map.region_count();
    let mut sums = vec![0.0; k];
    let mut counts = vec![0usize; k];
    for (r, m) in map.regions().zip(&polar.magnitude) {
        sums[r] += m;
        counts[r] += 1;
    }
    sums.iter()
        .zip(&counts)
        .map(|(s, &c)| s / c as f64)
        .collect()
}

/// Region with the largest mean magnitude.
pub fn largest_motion_block(polar: &PolarField, map: &RegionMap) -> usize {
    argmax_first(&region_mean_magnitudes(polar, map))
}

/// Unnormalised magnitude-weighted orientation histogram of one region.
pub fn orientation_histogram(
    polar: &PolarField,
    map: &RegionMap,
    region: usize,
) -> [f64; ORIENTATION_BINS] {
    check_map(polar, map);
    let mut hist = [0.0; ORIENTATION_BINS];
    for ((r, &m), &deg) in map.regions().zip(&polar.magnitude).zip(&polar.orientation) {
        if r == region && m > 0.0 {
            hist[orientation_bin(deg)] += m;
        }
    }
    hist
}

/// Orientation bin holding the largest magnitude sum within `region`.
pub fn dominant_orientation(polar: &PolarField, map: &RegionMap, region: usize) -> Result<usize> {
    if region >= map.region_count() {
        return Err(Error::Range(format!(
            "region {region} outside 0..{}",
            map.region_count()
        )));
    }
    Ok(argmax_first(&orientation_histogram(polar, map, region)))
}

/// Frame pairs whose individual boundary fields have the largest mean magnitude,
/// separately for the u and v components.
pub fn global_largest_motion_frame(flows: &[FlowField]) -> Result<(usize, usize)> {
    check_uniform(flows)?;
    let mean_mag = |f: &VectorField| {
        f.x.iter().zip(&f.y).map(|(a, b)| a.hypot(*b)).sum::<f64>() / f.x.len() as f64
    };
    let (mu, mv): (Vec<f64>, Vec<f64>) = flows
        .iter()
        .map(|f| {
            let (bu, bv) = flow_boundaries(f);
            (mean_mag(&bu), mean_mag(&bv))
        })
        .unzip();
    Ok((argmax_first(&mu), argmax_first(&mv)))
}

/// Location and orientation labels of one pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PatternMotion {
    pub u_location: usize,
    pub u_orientation: usize,
    pub v_location: usize,
    pub v_orientation: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MotionLabels {
    /// Grid4x4, Rings4, Wedges8, in that order.
    pub patterns: [PatternMotion; 3],
    pub global_u: usize,
    pub global_v: usize,
}

impl MotionLabels {
    /// `[p1: u_l, u_o, v_l, v_o, p2: .., p3: .., g_u, g_v]`
    pub fn to_array(&self) -> [u32; MOTION_LABEL_COUNT] {
        let mut out = [0u32; MOTION_LABEL_COUNT];
        for (p, m) in self.patterns.iter().enumerate() {
            out[4 * p] = m.u_location as u32;
            out[4 * p + 1] = m.u_orientation as u32;
            out[4 * p + 2] = m.v_location as u32;
            out[4 * p + 3] = m.v_orientation as u32;
        }
        out[12] = self.global_u as u32;
        out[13] = self.global_v as u32;
        out
    }

    pub fn from_array(a: &[u32; MOTION_LABEL_COUNT]) -> Self {
        let mut patterns = [PatternMotion::default(); 3];
        for (p, m) in patterns.iter_mut().enumerate() {
            *m = PatternMotion {
                u_location: a[4 * p] as usize,
                u_orientation: a[4 * p + 1] as usize,
                v_location: a[4 * p + 2] as usize,
                v_orientation: a[4 * p + 3] as usize,
            };
        }
        MotionLabels {
            patterns,
            global_u: a[12] as usize,
            global_v: a[13] as usize,
        }
    }
}

/// Computes the full motion label vector of a clip from its N-1 flows.
pub fn motion_labels(flows: &[FlowField], patterns: &PatternSet) -> Result<MotionLabels> {
    let sums = sum_motion_boundaries(flows)?;
    let (w, h) = (sums.mu.width, sums.mu.height);
    if let Some(m) = patterns.maps.iter().find(|m| (m.width, m.height) != (w, h)) {
        return Err(Error::DimensionMismatch {
            expected_w: w,
            expected_h: h,
            got_w: m.width,
            got_h: m.height,
            context: format!("{} region map", m.pattern.name()),
        });
    }
    let pu = to_polar(&sums.mu);
    let pv = to_polar(&sums.mv);
    let mut labels = MotionLabels::default();
    for (slot, map) in labels.patterns.iter_mut().zip(&patterns.maps) {
        let u_location = largest_motion_block(&pu, map);
        let v_location = largest_motion_block(&pv, map);
        *slot = PatternMotion {
            u_location,
            u_orientation: dominant_orientation(&pu, map, u_location)?,
            v_location,
            v_orientation: dominant_orientation(&pv, map, v_location)?,
        };
    }
    let (gu, gv) = global_largest_motion_frame(flows)?;
    labels.global_u = gu;
    labels.global_v = gv;
    Ok(labels)
}

/// Magnitude map linearly rescaled to 0..=255.
pub fn magnitude_image(polar: &PolarField) -> Vec<u8> {
    let max = polar.magnitude.iter().copied().fold(0.0, f64::max);
    polar
        .magnitude
        .iter()
        .map(|&m| {
            if max > 0.0 {
                (m / max * 255.0).round() as u8
            } else {
                0
            }
        })
        .collect()
}

pub fn write_magnitude_pgm(path: &Path, polar: &PolarField) -> Result<()> {
    write_pgm(path, polar.width, polar.height, &magnitude_image(polar))
}
