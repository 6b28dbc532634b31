//! Synthetic clips with analytically known flow and ground-truth labels.
//!
//! Ground truth is derived from the scene description itself (shape predicates,
//! velocities, texture functions) with its own arithmetic, never by calling the
//! label pipeline. Truth entries whose decision margin is a near tie are masked.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::flowcore::FlowField;
use crate::partition::{region_map, PatternId, RegionMap};
use crate::videoio::{Clip, Frame, Rgb};

pub const WHITE: Rgb = [255, 255, 255];
pub const BLUE: Rgb = [0, 0, 255];
pub const YELLOW: Rgb = [255, 255, 0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeKind {
    /// `size` is the radius.
    Circle,
    /// Upright isosceles triangle; apex `size` above the centre, base `size` below,
    /// base width `2 * size`.
    Triangle,
    /// Axis-aligned square with half-side `size`.
    Rectangle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeSpec {
    pub kind: ShapeKind,
    pub color: Rgb,
    /// Centre at frame 0, pixel coordinates.
    pub start: (f64, f64),
    /// Displacement per frame in pixels (x right, y down).
    pub velocity: (f64, f64),
    pub size: f64,
}

impl ShapeSpec {
    pub fn center(&self, t: usize) -> (f64, f64) {
        (
            self.start.0 + self.velocity.0 * t as f64,
            self.start.1 + self.velocity.1 * t as f64,
        )
    }

    /// Whether pixel centre `(x, y)` is covered at frame `t`.
    pub fn contains(&self, t: usize, x: f64, y: f64) -> bool {
        let (cx, cy) = self.center(t);
        let (dx, dy) = (x - cx, y - cy);
        match self.kind {
            ShapeKind::Circle => dx * dx + dy * dy <= self.size * self.size,
            ShapeKind::Rectangle => dx.abs() <= self.size && dy.abs() <= self.size,
            ShapeKind::Triangle => dy <= self.size && dx.abs() <= (dy + self.size) / 2.0,
        }
    }

    fn bounds(&self, t: usize) -> (f64, f64, f64, f64) {
        let (cx, cy) = self.center(t);
        (
            cx - self.size,
            cy - self.size,
            cx + self.size,
            cy + self.size,
        )
    }
}

/// Per-field truth with an applicability mask (`true` = asserted).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabelTruth {
    pub motion: [u32; 14],
    pub motion_mask: [bool; 14],
    pub appearance: [u32; 13],
    pub appearance_mask: [bool; 13],
}

impl LabelTruth {
    /// Whether `motion` / `appearance` agree with the truth on every unmasked entry.
    pub fn agrees_with(&self, motion: &[u32; 14], appearance: &[u32; 13]) -> bool {
        let m = (0..14).all(|i| !self.motion_mask[i] || self.motion[i] == motion[i]);
        let a = (0..13).all(|i| !self.appearance_mask[i] || self.appearance[i] == appearance[i]);
        m && a
    }
}

#[derive(Debug, Clone)]
pub struct SynthClip {
    pub clip: Clip,
    /// Analytic flow between frames `i` and `i + 1`.
    pub flows: Vec<FlowField>,
    pub truth: LabelTruth,
    pub bins: usize,
}

/// Near-tie tolerance (relative) below which a floating-point argmax is masked.
const TIE_TOL: f64 = 1e-9;

/// Lowest-index argmax plus whether the runner-up sits within a near tie.
fn argmax_with_margin(values: &[f64], maximize: bool) -> (usize, bool) {
    let better = |a: f64, b: f64| if maximize { a > b } else { a < b };
    let mut best = 0;
    for i in 1..values.len() {
        if better(values[i], values[best]) {
            best = i;
        }
    }
    let scale = values[best].abs().max(f64::MIN_POSITIVE);
    let ambiguous = values.iter().enumerate().any(|(i, &v)| {
        let gap = (values[best] - v).abs();
        i != best && gap > 0.0 && gap <= TIE_TOL * scale
    });
    (best, ambiguous)
}

/// Derives truth labels from scene functions by direct per-pixel evaluation.
fn derive_truth(
    n: usize,
    width: usize,
    height: usize,
    bins: usize,
    flow_at: &dyn Fn(usize, usize, usize) -> (f64, f64),
    color_at: &dyn Fn(usize, usize, usize) -> Rgb,
) -> Result<LabelTruth> {
    let idx = |x: usize, y: usize| y * width + x;
    let mut mu = (vec![0.0; width * height], vec![0.0; width * height]);
    let mut mv = (vec![0.0; width * height], vec![0.0; width * height]);
    let mut pair_u = Vec::with_capacity(n - 1);
    let mut pair_v = Vec::with_capacity(n - 1);
    for t in 0..n - 1 {
        let mut su = 0.0;
        let mut sv = 0.0;
        for y in 0..height {
            for x in 0..width {
                let (l, r) = (x.saturating_sub(1), (x + 1).min(width - 1));
                let (a, b) = (y.saturating_sub(1), (y + 1).min(height - 1));
                let ux = (flow_at(t, r, y).0 - flow_at(t, l, y).0) / 2.0;
                let uy = (flow_at(t, x, b).0 - flow_at(t, x, a).0) / 2.0;
                let vx = (flow_at(t, r, y).1 - flow_at(t, l, y).1) / 2.0;
                let vy = (flow_at(t, x, b).1 - flow_at(t, x, a).1) / 2.0;
                mu.0[idx(x, y)] += ux;
                mu.1[idx(x, y)] += uy;
                mv.0[idx(x, y)] += vx;
                mv.1[idx(x, y)] += vy;
                su += ux.hypot(uy);
                sv += vx.hypot(vy);
            }
        }
        pair_u.push(su / (width * height) as f64);
        pair_v.push(sv / (width * height) as f64);
    }

    let mut motion = [0u32; 14];
    let mut motion_mask = [true; 14];
    let mut appearance = [0u32; 13];
    let mut appearance_mask = [true; 13];

    let frames: Vec<Vec<Rgb>> = (0..n)
        .map(|t| {
            (0..height)
                .flat_map(|y| (0..width).map(move |x| (x, y)))
                .map(|(x, y)| color_at(t, x, y))
                .collect()
        })
        .collect();

    for (p, pattern) in PatternId::ALL.into_iter().enumerate() {
        let map = region_map(pattern, height, width)?;
        for (c, field) in [&mu, &mv].into_iter().enumerate() {
            let (loc, ori, loc_amb, ori_amb) = field_location_orientation(field, &map);
            motion[4 * p + 2 * c] = loc as u32;
            motion[4 * p + 2 * c + 1] = ori as u32;
            motion_mask[4 * p + 2 * c] = !loc_amb;
            motion_mask[4 * p + 2 * c + 1] = !(loc_amb || ori_amb);
        }

        let k = pattern.region_count();
        let mut scores = vec![0.0; k];
        let mut octants = vec![[0u64; 8]; k];
        for (region, score) in scores.iter_mut().enumerate() {
            let members: Vec<usize> = map
                .regions()
                .enumerate()
                .filter(|&(_, r)| r == region)
                .map(|(i, _)| i)
                .collect();
            let mut channel_iou = [0.0; 3];
            for (ch, iou) in channel_iou.iter_mut().enumerate() {
                let hists: Vec<Vec<u64>> = frames
                    .iter()
                    .map(|f| {
                        let mut h = vec![0u64; bins];
                        for &i in &members {
                            h[f[i][ch] as usize * bins / 256] += 1;
                        }
                        h
                    })
                    .collect();
                let (mut inter, mut union) = (0u64, 0u64);
                for b in 0..bins {
                    inter += hists.iter().map(|h| h[b]).min().unwrap_or(0);
                    union += hists.iter().map(|h| h[b]).max().unwrap_or(0);
                }
                *iou = inter as f64 / union as f64;
            }
            *score = (channel_iou[0] + channel_iou[1] + channel_iou[2]) / 3.0;
            for f in &frames {
                for &i in &members {
                    let [r, g, b] = f[i];
                    let o = 4 * usize::from(r >= 128)
                        + 2 * usize::from(g >= 128)
                        + usize::from(b >= 128);
                    octants[region][o] += 1;
                }
            }
        }
        let (diverse, d_amb) = argmax_with_margin(&scores, false);
        let (stable, s_amb) = argmax_with_margin(&scores, true);
        let top =
            |counts: &[u64; 8]| (1..8).fold(0, |b, i| if counts[i] > counts[b] { i } else { b });
        appearance[4 * p] = diverse as u32;
        appearance[4 * p + 1] = top(&octants[diverse]) as u32;
        appearance[4 * p + 2] = stable as u32;
        appearance[4 * p + 3] = top(&octants[stable]) as u32;
        appearance_mask[4 * p] = !d_amb;
        appearance_mask[4 * p + 1] = !d_amb;
        appearance_mask[4 * p + 2] = !s_amb;
        appearance_mask[4 * p + 3] = !s_amb;
    }

    let (gu, gu_amb) = argmax_with_margin(&pair_u, true);
    let (gv, gv_amb) = argmax_with_margin(&pair_v, true);
    motion[12] = gu as u32;
    motion[13] = gv as u32;
    motion_mask[12] = !gu_amb;
    motion_mask[13] = !gv_amb;

    let mut all = [0u64; 8];
    for f in &frames {
        for &[r, g, b] in f {
            all[4 * usize::from(r >= 128) + 2 * usize::from(g >= 128) + usize::from(b >= 128)] += 1;
        }
    }
    appearance[12] = (1..8).fold(0, |b, i| if all[i] > all[b] { i } else { b }) as u32;

    Ok(LabelTruth {
        motion,
        motion_mask,
        appearance,
        appearance_mask,
    })
}

/// Largest-mean region and its dominant orientation bin for one summed field.
fn field_location_orientation(
    field: &(Vec<f64>, Vec<f64>),
    map: &RegionMap,
) -> (usize, usize, bool, bool) {
    let k = map.region_count();
    let mut sums = vec![0.0; k];
    let mut counts = vec![0usize; k];
    for (i, r) in map.regions().enumerate() {
        sums[r] += field.0[i].hypot(field.1[i]);
        counts[r] += 1;
    }
    let means: Vec<f64> = sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| s / c as f64)
        .collect();
    let (loc, loc_amb) = argmax_with_margin(&means, true);
    let mut hist = [0.0; 8];
    for (i, r) in map.regions().enumerate() {
        let (a, b) = (field.0[i], field.1[i]);
        let m = a.hypot(b);
        if r != loc || m <= 0.0 {
            continue;
        }
        let mut deg = (-b).atan2(a).to_degrees();
        if deg < 0.0 {
            deg += 360.0;
        }
        if deg >= 360.0 {
            deg -= 360.0;
        }
        hist[((deg / 45.0).floor() as usize).min(7)] += m;
    }
    let (ori, ori_amb) = argmax_with_margin(&hist, true);
    (loc, ori, loc_amb, ori_amb)
}

fn check_dims(n: usize, height: usize, width: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParam(format!(
            "need at least 2 frames, got {n}"
        )));
    }
    if height < 8 || width < 8 {
        return Err(Error::Geometry(format!(
            "synthetic frames must be >= 8x8, got {width}x{height}"
        )));
    }
    Ok(())
}

/// Renders hard-edged moving shapes over a solid background. Later shapes are
/// drawn on top; the analytic flow of a pixel is the velocity of the topmost
/// shape covering it in the source frame, zero on the background.
pub fn gen_moving_shapes(
    specs: &[ShapeSpec],
    background: Rgb,
    n: usize,
    height: usize,
    width: usize,
    bins: usize,
) -> Result<SynthClip> {
    check_dims(n, height, width)?;
    for (s, spec) in specs.iter().enumerate() {
        for t in 0..n {
            let (x0, y0, x1, y1) = spec.bounds(t);
            if x0 < 0.0 || y0 < 0.0 || x1 > (width - 1) as f64 || y1 > (height - 1) as f64 {
                return Err(Error::Geometry(format!(
                    "shape {s} leaves the {width}x{height} frame at frame {t}"
                )));
            }
        }
    }
    let top = |t: usize, x: usize, y: usize| {
        specs
            .iter()
            .rev()
            .find(|s| s.contains(t, x as f64, y as f64))
    };
    let color_at = |t: usize, x: usize, y: usize| top(t, x, y).map_or(background, |s| s.color);
    let flow_at = |t: usize, x: usize, y: usize| top(t, x, y).map_or((0.0, 0.0), |s| s.velocity);

    let frames = (0..n)
        .map(|t| {
            let px = (0..height)
                .flat_map(|y| (0..width).map(move |x| (x, y)))
                .flat_map(|(x, y)| color_at(t, x, y))
                .collect();
            Frame::new(width, height, px)
        })
        .collect::<Result<Vec<_>>>()?;
    let flows = (0..n - 1)
        .map(|t| FlowField::from_fn(width, height, |x, y| flow_at(t, x, y)))
        .collect();
    let truth = derive_truth(n, width, height, bins, &flow_at, &color_at)?;
    Ok(SynthClip {
        clip: Clip::new(frames)?,
        flows,
        truth,
        bins,
    })
}

/// Geometry of the two-object scene: a blue circle travelling at 210 degrees
/// (down and to the left) from the right edge of the frame into grid block 6, and a
/// yellow triangle drifting left from block 11 into block 10, on white, 112x112,
/// 3 frames. The circle starts centred just below block 3 and overlapping it.
pub mod fig2 {
    use super::*;

    pub const SIZE: usize = 112;
    pub const FRAMES: usize = 3;
    pub const CIRCLE_RADIUS: f64 = 15.0;
    pub const CIRCLE_SPEED: f64 = 14.0;
    pub const CIRCLE_START: (f64, f64) = (84.5, 34.5);
    pub const TRIANGLE_START: (f64, f64) = (90.0, 70.0);
    pub const TRIANGLE_SPEED: f64 = 4.0;
    pub const TRIANGLE_SIZE: f64 = 7.0;
    pub const ANGLE_DEGREES: f64 = 210.0;

    pub fn specs() -> Vec<ShapeSpec> {
        let a = ANGLE_DEGREES.to_radians();
        // y-up angle to image-coordinate velocity
        let velocity = (CIRCLE_SPEED * a.cos(), -CIRCLE_SPEED * a.sin());
        vec![
            ShapeSpec {
                kind: ShapeKind::Triangle,
                color: YELLOW,
                start: TRIANGLE_START,
                velocity: (-TRIANGLE_SPEED, 0.0),
                size: TRIANGLE_SIZE,
            },
            ShapeSpec {
                kind: ShapeKind::Circle,
                color: BLUE,
                start: CIRCLE_START,
                velocity,
                size: CIRCLE_RADIUS,
            },
        ]
    }
}

/// The two-object scene described by [`fig2`].
pub fn gen_fig2(bins: usize) -> Result<SynthClip> {
    gen_moving_shapes(
        &fig2::specs(),
        WHITE,
        fig2::FRAMES,
        fig2::SIZE,
        fig2::SIZE,
        bins,
    )
}

/// Smooth periodic colour texture: per channel a sum of cosines whose wave numbers
/// are integers over the frame size, so shifted copies wrap seamlessly.
#[derive(Debug, Clone)]
pub struct PeriodicTexture {
    width: usize,
    height: usize,
    /// (kx, ky, amplitude, phase) per channel
    terms: [Vec<(f64, f64, f64, f64)>; 3],
}

impl PeriodicTexture {
    pub fn new(seed: u64, width: usize, height: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let terms = std::array::from_fn(|_| {
            (0..6)
                .map(|_| {
                    let (mut kx, mut ky) = (0i32, 0i32);
                    while kx == 0 && ky == 0 {
                        kx = rng.random_range(-4..=4);
                        ky = rng.random_range(-4..=4);
                    }
                    (
                        f64::from(kx),
                        f64::from(ky),
                        rng.random_range(8.0..20.0),
                        rng.random_range(0.0..std::f64::consts::TAU),
                    )
                })
                .collect()
        });
        PeriodicTexture {
            width,
            height,
            terms,
        }
    }

    pub fn sample(&self, x: f64, y: f64) -> Rgb {
        let tau = std::f64::consts::TAU;
        std::array::from_fn(|c| {
            let v = self.terms[c].iter().fold(128.0, |acc, &(kx, ky, a, ph)| {
                acc + a
                    * (tau * (kx * x / self.width as f64 + ky * y / self.height as f64) + ph).cos()
            });
            v.round().clamp(0.0, 255.0) as u8
        })
    }
}

/// A textured frame translated uniformly by `velocity` pixels per frame, wrapping
/// toroidally. The analytic flow is the constant velocity.
pub fn gen_global_pan(
    seed: u64,
    velocity: (f64, f64),
    n: usize,
    height: usize,
    width: usize,
    bins: usize,
) -> Result<SynthClip> {
    check_dims(n, height, width)?;
    let speed = velocity.0.hypot(velocity.1);
    if speed != 0.0 && speed < 0.5 {
        return Err(Error::InvalidParam(format!(
            "pan speed {speed} px/frame below 0.5 (use 0 for a static clip)"
        )));
    }
    let texture = PeriodicTexture::new(seed, width, height);
    let color_at = |t: usize, x: usize, y: usize| {
        texture.sample(
            x as f64 - velocity.0 * t as f64,
            y as f64 - velocity.1 * t as f64,
        )
    };
    let flow_at = |_: usize, _: usize, _: usize| velocity;
    let frames = (0..n)
        .map(|t| {
            let px = (0..height)
                .flat_map(|y| (0..width).map(move |x| (x, y)))
                .flat_map(|(x, y)| color_at(t, x, y))
                .collect();
            Frame::new(width, height, px)
        })
        .collect::<Result<Vec<_>>>()?;
    let flows = vec![FlowField::constant(width, height, velocity.0, velocity.1); n - 1];
    let truth = derive_truth(n, width, height, bins, &flow_at, &color_at)?;
    Ok(SynthClip {
        clip: Clip::new(frames)?,
        flows,
        truth,
        bins,
    })
}

/// Random non-overlapping moving shapes on a random background.
pub fn gen_random_shapes(
    seed: u64,
    n: usize,
    height: usize,
    width: usize,
    bins: usize,
) -> Result<SynthClip> {
    check_dims(n, height, width)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let background: Rgb = rng.random();
    let kinds = [ShapeKind::Circle, ShapeKind::Triangle, ShapeKind::Rectangle];
    let count = rng.random_range(1..=3);
    let mut specs: Vec<ShapeSpec> = Vec::new();
    let mut boxes: Vec<(f64, f64, f64, f64)> = Vec::new();
    let min_side = width.min(height) as f64;
    for _ in 0..200 {
        if specs.len() == count {
            break;
        }
        let size = rng.random_range(2.0..(min_side / 5.0).max(2.5));
        let velocity = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let start = (
            rng.random_range(size..width as f64 - 1.0 - size),
            rng.random_range(size..height as f64 - 1.0 - size),
        );
        let spec = ShapeSpec {
            kind: kinds[rng.random_range(0..3)],
            color: rng.random(),
            start,
            velocity,
            size,
        };
        // swept bounding box over all frames, padded by one pixel
        let (a, b) = (spec.bounds(0), spec.bounds(n - 1));
        let sweep = (
            a.0.min(b.0) - 1.0,
            a.1.min(b.1) - 1.0,
            a.2.max(b.2) + 1.0,
            a.3.max(b.3) + 1.0,
        );
        let inside = sweep.0 >= -1.0
            && sweep.1 >= -1.0
            && sweep.2 <= width as f64
            && sweep.3 <= height as f64;
        let disjoint = boxes
            .iter()
            .all(|o| sweep.2 < o.0 || o.2 < sweep.0 || sweep.3 < o.1 || o.3 < sweep.1);
        if inside && disjoint {
            specs.push(spec);
            boxes.push(sweep);
        }
    }
    gen_moving_shapes(&specs, background, n, height, width, bins)
}

/// Random clip with random smooth flows, used for oracle comparisons. Some seeds
/// produce static content, zero or constant flows, or solid frames so that every
/// tie-break path is exercised.
pub fn gen_random_clip(
    seed: u64,
    n: usize,
    height: usize,
    width: usize,
) -> Result<(Clip, Vec<FlowField>)> {
    check_dims(n, height, width)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let style = rng.random_range(0..6);
    let palette: Vec<Rgb> = (0..rng.random_range(2..6)).map(|_| rng.random()).collect();
    let base: Vec<u8> = (0..width * height)
        .flat_map(|_| palette[rng.random_range(0..palette.len())])
        .collect();
    let frames = (0..n)
        .map(|_| {
            let px = match style {
                // static content
                0 => base.clone(),
                // solid colour per frame
                1 => {
                    let c = palette[rng.random_range(0..palette.len())];
                    c.iter().copied().cycle().take(width * height * 3).collect()
                }
                _ => (0..width * height)
                    .flat_map(|_| {
                        if rng.random_bool(0.5) {
                            palette[rng.random_range(0..palette.len())]
                        } else {
                            rng.random()
                        }
                    })
                    .collect(),
            };
            Frame::new(width, height, px)
        })
        .collect::<Result<Vec<_>>>()?;

    let flows = (0..n - 1)
        .map(|_| match style {
            0 => FlowField::zeros(width, height),
            1 => FlowField::constant(
                width,
                height,
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
            ),
            _ => {
                let terms: Vec<[f64; 6]> = (0..3)
                    .map(|_| {
                        [
                            rng.random_range(-2.0..2.0),
                            rng.random_range(-2.0..2.0),
                            rng.random_range(0.0..0.6),
                            rng.random_range(0.0..0.6),
                            rng.random_range(0.0..6.3),
                            rng.random_range(0.0..6.3),
                        ]
                    })
                    .collect();
                FlowField::from_fn(width, height, |x, y| {
                    let (x, y) = (x as f64, y as f64);
                    terms.iter().fold((0.0, 0.0), |(u, v), t| {
                        (
                            u + t[0] * (t[2] * x + t[3] * y + t[4]).sin(),
                            v + t[1] * (t[3] * x - t[2] * y + t[5]).cos(),
                        )
                    })
                })
            }
        })
        .collect();
    Ok((Clip::new(frames)?, flows))
}
