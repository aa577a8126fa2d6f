//! Quadratic Morse-Bott function `h(x) = Tr(P*P)` on quaternionic Stiefel
//! manifolds `X_{n,k}`.
//!
//! The crate provides quaternionic linear algebra ([`QMatrix`], [`svd`],
//! [`relative_svd`]), the manifold itself ([`StiefelPoint`],
//! [`TangentVector`]), the function with its gradient, Hessian and critical
//! structure ([`morse`]), the `Sp(n-k) x Sp(k) x Sp(k)` action on critical
//! levels ([`group`]) and the gradient flow in closed and numerical form
//! ([`flow`]).

pub mod error;
pub mod flow;
pub mod group;
pub mod io;
pub mod matrix;
pub mod morse;
pub mod quaternion;
pub mod random;
pub mod stiefel;
pub mod svd;

pub use error::{Error, Result};
pub use flow::{
    closed_form_flow, closed_form_trajectory, flow_constants, flow_limits, numerical_flow,
    FlowData, FlowLimits, FlowTrajectory,
};
pub use group::{act_point, act_tangent, transitivity_witness, GroupElement};
pub use matrix::QMatrix;
pub use morse::{
    critical_levels, gradient, hessian_apply, hessian_spectrum, height, is_critical,
    notable_point, sigma_invariants, SigmaInvariants, SpectrumReport,
};
pub use quaternion::{qmul, Quaternion};
pub use stiefel::{
    normal_project, polar_retract, random_point, random_tangent, tangent_basis, tangent_project,
    validate_point, StiefelPoint, TangentVector,
};
pub use svd::{complete_symplectic, relative_svd, svd, RelativeSvd, Svd};

/// Default absolute tolerance for constraint checks.
pub const DEFAULT_TOL: f64 = 1e-10;
