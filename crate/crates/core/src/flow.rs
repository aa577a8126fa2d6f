//! Gradient flow `x' = grad h(x)` of the height function, i.e.
//!
//! ```text
//! T' = -2 T P*P,    P' = -2 (PP* - I) P.
//! ```
//!
//! In the relative SVD of the initial point only the interior singular
//! values move: with `C_i = c_i^2 / (1 - c_i^2)`,
//!
//! ```text
//! c_i(t)^2 = C_i e^{4t} / (1 + C_i e^{4t}),   s_i(t)^2 = 1 / (1 + C_i e^{4t}),
//! ```
//!
//! while `a`, `b`, `m` and the one- and zero-blocks stay fixed. The flow is
//! an ascent: forward in time `h` increases towards the level `k - r`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::morse::{gradient_field, height_extension};
use crate::stiefel::{constraint_residual, polar_retract, StiefelPoint};
use crate::svd::{relative_svd, RelativeSvd};

/// Relative SVD of an initial point plus the constants `C_i`.
#[derive(Clone, Debug, Serialize)]
pub struct FlowData {
    pub decomposition: RelativeSvd,
    /// `C_i = c_i^2 / (1 - c_i^2)`, one per interior singular value.
    pub constants: Vec<f64>,
}

pub fn flow_constants(x0: &StiefelPoint) -> Result<FlowData> {
    let decomposition = relative_svd(x0)?;
    let constants = decomposition
        .c
        .iter()
        .zip(&decomposition.s)
        .map(|(c, s)| (c / s).powi(2))
        .collect();
    Ok(FlowData {
        decomposition,
        constants,
    })
}

impl FlowData {
    /// `(c_i(t), s_i(t))`, evaluated as `1 / sqrt(1 + e^{+-u})` with
    /// `u = -4t - ln C_i` so that large `|t|` saturates instead of
    /// overflowing.
    pub fn interior_at(&self, t: f64) -> (Vec<f64>, Vec<f64>) {
        let d = &self.decomposition;
        d.c.iter()
            .zip(&d.s)
            .map(|(&c, &s)| {
                let u = -4.0 * t + 2.0 * (s.ln() - c.ln());
                (1.0 / (1.0 + u.exp()).sqrt(), 1.0 / (1.0 + (-u).exp()).sqrt())
            })
            .unzip()
    }

    pub fn point_at(&self, t: f64) -> StiefelPoint {
        let (c, s) = self.interior_at(t);
        StiefelPoint::from_mat_unchecked(self.decomposition.assemble(&c, &s))
    }

    /// `h(x(t)) = p + sum c_i(t)^2`.
    pub fn height_at(&self, t: f64) -> f64 {
        let (c, _) = self.interior_at(t);
        self.decomposition.p as f64 + c.iter().map(|v| v * v).sum::<f64>()
    }

    pub fn limits(&self) -> FlowLimits {
        let d = &self.decomposition;
        let zeros = vec![0.0; d.q];
        let ones = vec![1.0; d.q];
        FlowLimits {
            backward: StiefelPoint::from_mat_unchecked(d.assemble(&zeros, &ones)),
            backward_level: d.p,
            forward: StiefelPoint::from_mat_unchecked(d.assemble(&ones, &zeros)),
            forward_level: d.k - d.r,
        }
    }
}

/// Point of the flow line through `x0` at time `t`.
pub fn closed_form_flow(x0: &StiefelPoint, t: f64) -> Result<StiefelPoint> {
    Ok(flow_constants(x0)?.point_at(t))
}

/// Endpoints of the flow line through a point.
#[derive(Clone, Debug, Serialize)]
pub struct FlowLimits {
    /// `t -> -inf`: interior values `c_i -> 0`.
    pub backward: StiefelPoint,
    pub backward_level: usize,
    /// `t -> +inf`: interior values `c_i -> 1`.
    pub forward: StiefelPoint,
    pub forward_level: usize,
}

pub fn flow_limits(x0: &StiefelPoint) -> Result<FlowLimits> {
    Ok(flow_constants(x0)?.limits())
}

/// Sampled flow line.
#[derive(Clone, Debug, Default)]
pub struct FlowTrajectory {
    pub times: Vec<f64>,
    pub points: Vec<StiefelPoint>,
    pub heights: Vec<f64>,
    pub gradient_norms: Vec<f64>,
    /// `|x*x - I|` at every sample.
    pub constraint_drift: Vec<f64>,
}

impl FlowTrajectory {
    fn push(&mut self, t: f64, y: QMatrix) {
        self.times.push(t);
        self.heights.push(height_extension(&y));
        self.gradient_norms.push(gradient_field(&y).norm());
        self.constraint_drift.push(constraint_residual(&y));
        self.points.push(StiefelPoint::from_mat_unchecked(y));
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_drift(&self) -> f64 {
        self.constraint_drift.iter().copied().fold(0.0, f64::max)
    }

    pub fn last(&self) -> Option<&StiefelPoint> {
        self.points.last()
    }
}

fn check_interval(t0: f64, t1: f64, steps: usize) -> Result<()> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    if !t0.is_finite() || !t1.is_finite() || t0 >= t1 {
        return Err(Error::InvalidArgument(format!(
            "need finite t0 < t1, got [{t0}, {t1}]"
        )));
    }
    Ok(())
}

fn sample_time(t0: f64, t1: f64, steps: usize, i: usize) -> f64 {
    if i == steps {
        t1
    } else {
        t0 + (t1 - t0) * (i as f64) / (steps as f64)
    }
}

/// Closed-form flow sampled on the uniform grid `t0 + i (t1 - t0) / steps`,
/// with `x0` placed at `t0` as in [`numerical_flow`].
pub fn closed_form_trajectory(
    x0: &StiefelPoint,
    t0: f64,
    t1: f64,
    steps: usize,
) -> Result<FlowTrajectory> {
    check_interval(t0, t1, steps)?;
    let data = flow_constants(x0)?;
    let mut traj = FlowTrajectory::default();
    for i in 0..=steps {
        let t = sample_time(t0, t1, steps, i);
        traj.push(t, data.point_at(t - t0).into_mat());
    }
    Ok(traj)
}

/// Classical fixed-step RK4 on the ambient ODE, starting from `x0` at
/// `t0`. With `reproject`, every step is followed by the polar retraction.
pub fn numerical_flow(
    x0: &StiefelPoint,
    t0: f64,
    t1: f64,
    steps: usize,
    reproject: bool,
) -> Result<FlowTrajectory> {
    check_interval(t0, t1, steps)?;
    let dt = (t1 - t0) / steps as f64;
    let mut traj = FlowTrajectory::default();
    let mut y = x0.mat().clone();
    traj.push(t0, y.clone());
    for i in 1..=steps {
        let k1 = gradient_field(&y);
        let k2 = gradient_field(&(&y + &k1.scale(0.5 * dt)));
        let k3 = gradient_field(&(&y + &k2.scale(0.5 * dt)));
        let k4 = gradient_field(&(&y + &k3.scale(dt)));
        let incr = &(&k1 + &k4) + &(&k2 + &k3).scale(2.0);
        y = &y + &incr.scale(dt / 6.0);
        let t = sample_time(t0, t1, steps, i);
        if !y.is_finite() {
            return Err(Error::Diverged { t });
        }
        if reproject {
            y = polar_retract(&y)?.into_mat();
        }
        traj.push(t, y.clone());
    }
    Ok(traj)
}
