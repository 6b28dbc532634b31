//! Coarse-to-fine variational flow with brightness constancy, gradient
//! constancy and robust total-variation smoothness:
//!
//! E(u, v) = sum Psi(|I2(x + w) - I1(x)|^2)
//!         + gamma * sum Psi(|grad I2(x + w) - grad I1(x)|^2)
//!         + alpha * sum Psi(|grad u|^2 + |grad v|^2),   Psi(s^2) = sqrt(s^2 + eps^2)
//!
//! Each pyramid level runs `warp_iterations` outer warps. Inside a warp the data
//! terms are linearised around the current flow and the increment (du, dv) is
//! found by lagged-diffusivity fixed-point iterations, each solved with SOR.

use crate::error::{Error, Result};
use crate::flowcore::pyramid::{gaussian_pyramid, resample_bilinear};
use crate::flowcore::warp::warp_buffer;
use crate::flowcore::{FlowField, FlowParams};
use crate::videoio::GrayFrame;

/// Diagnostics collected while solving.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveTrace {
    /// Level sizes, finest first.
    pub level_sizes: Vec<(usize, usize)>,
    /// Energy at the finest level before the first warp and after every warp.
    pub finest_energies: Vec<f64>,
}

const STENCIL: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];

/// Five-point derivative along x with replicated borders.
pub(crate) fn deriv_x(data: &[f64], width: usize, height: usize) -> Vec<f64> {
    let mut out = vec![0.0; data.len()];
    for y in 0..height {
        let row = &data[y * width..(y + 1) * width];
        for x in 0..width {
            let mut acc = 0.0;
            for (k, c) in STENCIL.iter().enumerate() {
                let xx = (x as isize + k as isize - 2).clamp(0, width as isize - 1) as usize;
                acc += c * row[xx];
            }
            out[y * width + x] = acc / 12.0;
        }
    }
    out
}

/// Five-point derivative along y with replicated borders.
pub(crate) fn deriv_y(data: &[f64], width: usize, height: usize) -> Vec<f64> {
    let mut out = vec![0.0; data.len()];
    for y in 0..height {
        for x in 0..width {
            let mut acc = 0.0;
            for (k, c) in STENCIL.iter().enumerate() {
                let yy = (y as isize + k as isize - 2).clamp(0, height as isize - 1) as usize;
                acc += c * data[yy * width + x];
            }
            out[y * width + x] = acc / 12.0;
        }
    }
    out
}

/// One pyramid level with its precomputed spatial derivatives.
struct LevelImages<'a> {
    width: usize,
    height: usize,
    i1: &'a [f64],
    i1x: Vec<f64>,
    i1y: Vec<f64>,
    i2: &'a [f64],
    i2x: Vec<f64>,
    i2y: Vec<f64>,
}

impl<'a> LevelImages<'a> {
    fn new(prev: &'a GrayFrame, next: &'a GrayFrame) -> Self {
        let (w, h) = (prev.width, prev.height);
        LevelImages {
            width: w,
            height: h,
            i1: &prev.data,
            i1x: deriv_x(&prev.data, w, h),
            i1y: deriv_y(&prev.data, w, h),
            i2: &next.data,
            i2x: deriv_x(&next.data, w, h),
            i2y: deriv_y(&next.data, w, h),
        }
    }

    /// Second image and its derivatives sampled at x + w.
    fn warped(&self, flow: &FlowField) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let (w, h) = (self.width, self.height);
        (
            warp_buffer(self.i2, w, h, flow),
            warp_buffer(&self.i2x, w, h, flow),
            warp_buffer(&self.i2y, w, h, flow),
        )
    }

    fn energy(&self, flow: &FlowField, params: &FlowParams) -> f64 {
        let (i2w, i2xw, i2yw) = self.warped(flow);
        let eps2 = params.epsilon_psi * params.epsilon_psi;
        let mut data = 0.0;
        let mut grad = 0.0;
        for i in 0..i2w.len() {
            let r = i2w[i] - self.i1[i];
            data += (r * r + eps2).sqrt();
            let gx = i2xw[i] - self.i1x[i];
            let gy = i2yw[i] - self.i1y[i];
            grad += (gx * gx + gy * gy + eps2).sqrt();
        }
        let smooth = smoothness_energy(&flow.u, &flow.v, self.width, self.height, eps2);
        data + params.gamma * grad + params.alpha * smooth
    }
}

/// Forward-difference squared flow gradient at pixel `i` (zero past the last row/column).
#[inline]
fn flow_grad_sq(u: &[f64], v: &[f64], x: usize, y: usize, width: usize, height: usize) -> f64 {
    let i = y * width + x;
    let mut s = 0.0;
    if x + 1 < width {
        let (a, b) = (u[i + 1] - u[i], v[i + 1] - v[i]);
        s += a * a + b * b;
    }
    if y + 1 < height {
        let (a, b) = (u[i + width] - u[i], v[i + width] - v[i]);
        s += a * a + b * b;
    }
    s
}

fn smoothness_energy(u: &[f64], v: &[f64], width: usize, height: usize, eps2: f64) -> f64 {
    let mut acc = 0.0;
    for y in 0..height {
        for x in 0..width {
            acc += (flow_grad_sq(u, v, x, y, width, height) + eps2).sqrt();
        }
    }
    acc
}

/// Evaluates the energy of `flow` for the frame pair at full resolution.
pub fn flow_energy(
    prev: &GrayFrame,
    next: &GrayFrame,
    flow: &FlowField,
    params: &FlowParams,
) -> f64 {
    LevelImages::new(prev, next).energy(flow, params)
}

/// Linearised per-pixel system, fixed for one warp.
struct WarpTerms {
    ix: Vec<f64>,
    iy: Vec<f64>,
    it: Vec<f64>,
    ixx: Vec<f64>,
    ixy: Vec<f64>,
    iyy: Vec<f64>,
    ixt: Vec<f64>,
    iyt: Vec<f64>,
}

impl WarpTerms {
    fn new(level: &LevelImages<'_>, flow: &FlowField) -> Self {
        let (w, h) = (level.width, level.height);
        let (i2w, i2xw, i2yw) = level.warped(flow);
        let ixx = deriv_x(&i2xw, w, h);
        let iyy = deriv_y(&i2yw, w, h);
        let ixy: Vec<f64> = deriv_y(&i2xw, w, h)
            .iter()
            .zip(deriv_x(&i2yw, w, h))
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p - q).collect::<Vec<_>>();
        WarpTerms {
            it: diff(&i2w, level.i1),
            ixt: diff(&i2xw, &level.i1x),
            iyt: diff(&i2yw, &level.i1y),
            ix: i2xw,
            iy: i2yw,
            ixx,
            ixy,
            iyy,
        }
    }
}

fn solve_level(
    level: &LevelImages<'_>,
    flow: &mut FlowField,
    params: &FlowParams,
    level_index: usize,
    mut energies: Option<&mut Vec<f64>>,
) -> Result<()> {
    let (w, h) = (level.width, level.height);
    let n = w * h;
    let eps2 = params.epsilon_psi * params.epsilon_psi;
    let gamma = params.gamma;
    let omega = params.sor_omega;

    let mut du = vec![0.0; n];
    let mut dv = vec![0.0; n];
    let (mut a11, mut a12, mut a22) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let (mut b1, mut b2) = (vec![0.0; n], vec![0.0; n]);
    let mut wx = vec![0.0; n];
    let mut wy = vec![0.0; n];
    let mut uu = vec![0.0; n];
    let mut vv = vec![0.0; n];

    if let Some(e) = energies.as_deref_mut() {
        e.push(level.energy(flow, params));
    }

    for _ in 0..params.warp_iterations {
        let t = WarpTerms::new(level, flow);
        du.iter_mut().for_each(|x| *x = 0.0);
        dv.iter_mut().for_each(|x| *x = 0.0);

        for _ in 0..params.fixed_point_iterations {
            for i in 0..n {
                let r = t.it[i] + t.ix[i] * du[i] + t.iy[i] * dv[i];
                let psi_d = 1.0 / (r * r + eps2).sqrt();
                let gx = t.ixt[i] + t.ixx[i] * du[i] + t.ixy[i] * dv[i];
                let gy = t.iyt[i] + t.ixy[i] * du[i] + t.iyy[i] * dv[i];
                let psi_g = gamma / (gx * gx + gy * gy + eps2).sqrt();

                a11[i] =
                    psi_d * t.ix[i] * t.ix[i] + psi_g * (t.ixx[i] * t.ixx[i] + t.ixy[i] * t.ixy[i]);
                a12[i] =
                    psi_d * t.ix[i] * t.iy[i] + psi_g * (t.ixx[i] * t.ixy[i] + t.ixy[i] * t.iyy[i]);
                a22[i] =
                    psi_d * t.iy[i] * t.iy[i] + psi_g * (t.ixy[i] * t.ixy[i] + t.iyy[i] * t.iyy[i]);
                b1[i] = -psi_d * t.ix[i] * t.it[i]
                    - psi_g * (t.ixx[i] * t.ixt[i] + t.ixy[i] * t.iyt[i]);
                b2[i] = -psi_d * t.iy[i] * t.it[i]
                    - psi_g * (t.ixy[i] * t.ixt[i] + t.iyy[i] * t.iyt[i]);

                uu[i] = flow.u[i] + du[i];
                vv[i] = flow.v[i] + dv[i];
            }
            // Edge (p, p+1) and (p, p+w) carry the diffusivity of p, which makes the
            // discrete system the exact gradient of the forward-difference energy.
            for y in 0..h {
                for x in 0..w {
                    let i = y * w + x;
                    let psi_s = params.alpha / (flow_grad_sq(&uu, &vv, x, y, w, h) + eps2).sqrt();
                    wx[i] = if x + 1 < w { psi_s } else { 0.0 };
                    wy[i] = if y + 1 < h { psi_s } else { 0.0 };
                }
            }

            for _ in 0..params.sor_iterations {
                for y in 0..h {
                    for x in 0..w {
                        let i = y * w + x;
                        let mut sw = 0.0;
                        let mut su = 0.0;
                        let mut sv = 0.0;
                        let mut add = |q: usize, wt: f64| {
                            sw += wt;
                            su += wt * (flow.u[q] + du[q]);
                            sv += wt * (flow.v[q] + dv[q]);
                        };
                        if x > 0 {
                            add(i - 1, wx[i - 1]);
                        }
                        if x + 1 < w {
                            add(i + 1, wx[i]);
                        }
                        if y > 0 {
                            add(i - w, wy[i - w]);
                        }
                        if y + 1 < h {
                            add(i + w, wy[i]);
                        }
                        let du_gs = (b1[i] - a12[i] * dv[i] + su - sw * flow.u[i]) / (a11[i] + sw);
                        du[i] = (1.0 - omega) * du[i] + omega * du_gs;
                        let dv_gs = (b2[i] - a12[i] * du[i] + sv - sw * flow.v[i]) / (a22[i] + sw);
                        dv[i] = (1.0 - omega) * dv[i] + omega * dv_gs;
                    }
                }
            }
        }

        for i in 0..n {
            flow.u[i] += du[i];
            flow.v[i] += dv[i];
        }
        if !flow.is_finite() {
            return Err(Error::NumericalFailure { level: level_index });
        }
        if let Some(e) = energies.as_deref_mut() {
            e.push(level.energy(flow, params));
        }
    }
    Ok(())
}

fn upsample_flow(flow: &FlowField, width: usize, height: usize) -> FlowField {
    let sx = width as f64 / flow.width as f64;
    let sy = height as f64 / flow.height as f64;
    let u = resample_bilinear(&flow.u, flow.width, flow.height, width, height);
    let v = resample_bilinear(&flow.v, flow.width, flow.height, width, height);
    FlowField {
        width,
        height,
        u: u.into_iter().map(|x| x * sx).collect(),
        v: v.into_iter().map(|x| x * sy).collect(),
    }
}

/// Solves the flow from `prev` to `next` and reports per-warp energies.
pub fn solve_flow_traced(
    prev: &GrayFrame,
    next: &GrayFrame,
    params: &FlowParams,
) -> Result<(FlowField, SolveTrace)> {
    params.validate()?;
    if (prev.width, prev.height) != (next.width, next.height) {
        return Err(Error::DimensionMismatch {
            expected_w: prev.width,
            expected_h: prev.height,
            got_w: next.width,
            got_h: next.height,
            context: "flow frame pair".into(),
        });
    }
    let pyr1 = gaussian_pyramid(prev, params.pyramid_factor, params.min_level_size);
    let pyr2 = gaussian_pyramid(next, params.pyramid_factor, params.min_level_size);
    let coarsest = pyr1.len() - 1;

    let mut trace = SolveTrace {
        level_sizes: pyr1.iter().map(|l| (l.width, l.height)).collect(),
        finest_energies: Vec::new(),
    };
    let mut flow = FlowField::zeros(pyr1[coarsest].width, pyr1[coarsest].height);
    for lvl in (0..=coarsest).rev() {
        let level = LevelImages::new(&pyr1[lvl], &pyr2[lvl]);
        if (flow.width, flow.height) != (level.width, level.height) {
            flow = upsample_flow(&flow, level.width, level.height);
        }
        let energies = (lvl == 0).then_some(&mut trace.finest_energies);
        solve_level(&level, &mut flow, params, lvl, energies)?;
    }
    Ok((flow, trace))
}

/// Dense flow from `prev` to `next`.
pub fn solve_flow(prev: &GrayFrame, next: &GrayFrame, params: &FlowParams) -> Result<FlowField> {
    solve_flow_traced(prev, next, params).map(|(f, _)| f)
}
