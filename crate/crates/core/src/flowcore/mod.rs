//! Dense optical flow: field type, provider contract and the coarse-to-fine
//! variational solver.

pub mod flo;
mod pyramid;
mod solver;
mod warp;

pub use pyramid::{gaussian_blur, gaussian_pyramid, pyramid_sigma, resample_bilinear};
pub use solver::{flow_energy, solve_flow, solve_flow_traced, SolveTrace};
pub use warp::{sample_bilinear, warp_bilinear};

use crate::error::{Error, Result};
use crate::parallel::{ordered_map, Workers};
use crate::videoio::{to_grayscale, Clip, GrayFrame};

/// Per-pixel displacement from one frame to the next. `u` is positive to the
/// right, `v` positive downward, both in pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowField {
    pub width: usize,
    pub height: usize,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl FlowField {
    pub fn new(width: usize, height: usize, u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if u.len() != width * height || v.len() != width * height {
            return Err(Error::Format(format!(
                "flow buffers ({}, {}) do not match {width}x{height}",
                u.len(),
                v.len()
            )));
        }
        if !u.iter().chain(&v).all(|x| x.is_finite()) {
            return Err(Error::Format("flow contains non-finite values".into()));
        }
        Ok(FlowField {
            width,
            height,
            u,
            v,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        FlowField {
            width,
            height,
            u: vec![0.0; width * height],
            v: vec![0.0; width * height],
        }
    }

    pub fn constant(width: usize, height: usize, u: f64, v: f64) -> Self {
        FlowField {
            width,
            height,
            u: vec![u; width * height],
            v: vec![v; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> (f64, f64)) -> Self {
        let mut out = FlowField::zeros(width, height);
        for y in 0..height {
            for x in 0..width {
                let (a, b) = f(x, y);
                out.u[y * width + x] = a;
                out.v[y * width + x] = b;
            }
        }
        out
    }

    /// Adds a constant displacement to every pixel.
    pub fn offset(&self, du: f64, dv: f64) -> Self {
        FlowField {
            width: self.width,
            height: self.height,
            u: self.u.iter().map(|x| x + du).collect(),
            v: self.v.iter().map(|x| x + dv).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().chain(&self.v).all(|x| x.is_finite())
    }
}

/// Coarse-to-fine solver settings.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FlowParams {
    /// Smoothness weight.
    pub alpha: f64,
    /// Gradient-constancy weight.
    pub gamma: f64,
    /// Downsampling ratio between pyramid levels, in (0, 1).
    pub pyramid_factor: f64,
    /// Coarsest level keeps both dimensions at or above this.
    pub min_level_size: usize,
    pub warp_iterations: usize,
    pub fixed_point_iterations: usize,
    pub sor_iterations: usize,
    pub sor_omega: f64,
    /// Regulariser of the robust penalty sqrt(s^2 + eps^2).
    pub epsilon_psi: f64,
}

impl Default for FlowParams {
    fn default() -> Self {
        FlowParams {
            alpha: 0.1,
            gamma: 10.0,
            pyramid_factor: 0.5,
            min_level_size: 16,
            warp_iterations: 3,
            fixed_point_iterations: 5,
            sor_iterations: 25,
            sor_omega: 1.8,
            epsilon_psi: 1e-3,
        }
    }
}

impl FlowParams {
    // negated comparisons so that NaN fails every check
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParam(what.to_string()));
        if !(self.alpha > 0.0) {
            return bad("alpha must be > 0");
        }
        if !(self.gamma >= 0.0) {
            return bad("gamma must be >= 0");
        }
        if !(self.pyramid_factor > 0.0 && self.pyramid_factor < 1.0) {
            return bad("pyramid_factor must lie in (0, 1)");
        }
        if self.min_level_size < 2 {
            return bad("min_level_size must be >= 2");
        }
        if self.warp_iterations == 0 || self.fixed_point_iterations == 0 || self.sor_iterations == 0
        {
            return bad("iteration counts must be >= 1");
        }
        if !(self.sor_omega > 0.0 && self.sor_omega < 2.0) {
            return bad("sor_omega must lie in (0, 2)");
        }
        if !(self.epsilon_psi > 0.0) {
            return bad("epsilon_psi must be > 0");
        }
        Ok(())
    }
}

/// Source of the flow between frame `pair` and frame `pair + 1` of a clip.
pub trait FlowProvider: Sync {
    fn flow(&self, pair: usize, prev: &GrayFrame, next: &GrayFrame) -> Result<FlowField>;
}

/// Solves every pair with the variational solver.
#[derive(Debug, Clone, Default)]
pub struct VariationalProvider {
    pub params: FlowParams,
}

impl FlowProvider for VariationalProvider {
    fn flow(&self, _pair: usize, prev: &GrayFrame, next: &GrayFrame) -> Result<FlowField> {
        solve_flow(prev, next, &self.params)
    }
}

/// Hands out precomputed flows, indexed by frame pair.
#[derive(Debug, Clone)]
pub struct InjectedProvider {
    pub flows: Vec<FlowField>,
}

impl FlowProvider for InjectedProvider {
    fn flow(&self, pair: usize, prev: &GrayFrame, _next: &GrayFrame) -> Result<FlowField> {
        let f = self
            .flows
            .get(pair)
            .ok_or_else(|| Error::Range(format!("no injected flow for pair {pair}")))?;
        if (f.width, f.height) != (prev.width, prev.height) {
            return Err(Error::DimensionMismatch {
                expected_w: prev.width,
                expected_h: prev.height,
                got_w: f.width,
                got_h: f.height,
                context: "injected flow".into(),
            });
        }
        Ok(f.clone())
    }
}

/// Flows between consecutive frames: N frames give N-1 fields, in frame order.
pub fn clip_flows(
    clip: &Clip,
    provider: &dyn FlowProvider,
    workers: Workers,
) -> Result<Vec<FlowField>> {
    let gray: Vec<GrayFrame> = clip.frames().iter().map(to_grayscale).collect();
    let pairs: Vec<usize> = (0..gray.len() - 1).collect();
    ordered_map(&pairs, workers, |_, &i| {
        provider
            .flow(i, &gray[i], &gray[i + 1])
            .map_err(|e| Error::Provider {
                pair: i,
                source: Box::new(e),
            })
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::videoio::Frame;

    fn clip(n: usize) -> Clip {
        let frames = (0..n)
            .map(|i| {
                let mut f = Frame::filled(20, 18, [40, 90, 200]).unwrap();
                f.set_pixel(3 + i, 4, [250, 10, 10]);
                f
            })
            .collect();
        Clip::new(frames).unwrap()
    }

    #[test]
    fn defaults_validate() {
        FlowParams::default().validate().unwrap();
        let mut p = FlowParams::default();
        p.pyramid_factor = 1.0;
        assert!(p.validate().is_err());
        p = FlowParams::default();
        p.sor_omega = 2.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn flow_count_is_frames_minus_one() {
        let inj = InjectedProvider {
            flows: (0..15)
                .map(|i| FlowField::constant(20, 18, i as f64, 0.0))
                .collect(),
        };
        let flows = clip_flows(&clip(16), &inj, Workers::Auto).unwrap();
        assert_eq!(flows.len(), 15);
        assert!(flows.iter().enumerate().all(|(i, f)| f.u[0] == i as f64));
        assert_eq!(
            clip_flows(&clip(2), &inj, Workers::Serial).unwrap().len(),
            1
        );
    }

    #[test]
    fn provider_errors_carry_pair_index() {
        let inj = InjectedProvider {
            flows: vec![FlowField::zeros(20, 18); 2],
        };
        match clip_flows(&clip(5), &inj, Workers::Serial) {
            Err(Error::Provider { pair, .. }) => assert_eq!(pair, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn static_clip_gives_near_zero_variational_flows() {
        let frames = vec![Frame::filled(24, 24, [120, 60, 30]).unwrap(); 5];
        let clip = Clip::new(frames).unwrap();
        let flows = clip_flows(&clip, &VariationalProvider::default(), Workers::Auto).unwrap();
        assert_eq!(flows.len(), 4);
        for f in flows {
            assert!(f.u.iter().chain(&f.v).all(|x| x.abs() < 1e-3));
        }
    }

    #[test]
    fn field_validation() {
        assert!(FlowField::new(2, 2, vec![0.0; 4], vec![0.0; 3]).is_err());
        assert!(FlowField::new(2, 2, vec![f64::NAN; 4], vec![0.0; 4]).is_err());
        let f = FlowField::zeros(3, 3).offset(1.0, -2.0);
        assert!(f.u.iter().all(|&x| x == 1.0) && f.v.iter().all(|&x| x == -2.0));
    }
}
