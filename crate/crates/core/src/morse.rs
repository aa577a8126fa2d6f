//! The height function `h(x) = Tr(P*P)` on `X_{n,k}`: gradient, critical
//! points, Hessian and the closed-form invariants of its critical levels.
//!
//! The Hessian is available through three independent routes:
//!
//! - [`hessian_apply`]: the gauge-free closed form
//!   `-2 (v x* + x v*) [0; P] - 2 [0; (PP* - I) v_P]`, where `v_P` is the
//!   bottom block of `v`;
//! - [`hessian_block_form`]: the same operator written in a symplectic
//!   frame `A` with `A x_0 = x`, `v = A [X; Y]` and `beta` the lower-left
//!   block of `A`;
//! - [`hessian_reference`]: the extrinsic assembly
//!   `P_x(H phi(v)) + W_x(v, P_x^perp grad phi)` from the Euclidean
//!   extension `phi`, the tangent projector and the Weingarten map.
//!
//! All three are only defined at critical points.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::stiefel::{
    check_dims, dim_sp, normal_project, stiefel_dim, tangent_basis_with_frame, tangent_project,
    StiefelPoint, TangentVector,
};

/// Criticality tolerance on `|TP*|` used by the Hessian routines.
pub const CRITICAL_TOL: f64 = 1e-8;
/// Eigenvalues further than this from `{-2, 0, 2}` are rejected.
pub const SPECTRUM_SNAP_TOL: f64 = 0.05;
/// A critical point's height must be this close to an integer.
pub const LEVEL_TOL: f64 = 1e-6;

/// `h(x) = Re Tr(P*P)`.
pub fn height(x: &StiefelPoint) -> f64 {
    x.p().norm_sqr()
}

/// Height of an arbitrary `n x k` matrix (the Euclidean extension).
pub fn height_extension(y: &QMatrix) -> f64 {
    let k = y.cols();
    y.block(y.rows() - k, 0, k, k).norm_sqr()
}

/// `-2 [T P*P; (PP* - I) P]` evaluated on any `n x k` matrix with `n > k`.
///
/// On the manifold this is the Riemannian gradient; off it, it is the
/// vector field whose flow is integrated numerically.
pub fn gradient_field(y: &QMatrix) -> QMatrix {
    let (n, k) = y.shape();
    let t = y.block(0, 0, n - k, k);
    let p = y.block(n - k, 0, k, k);
    let ptp = &p.adjoint() * &p;
    let top = &t * &ptp;
    let ppt = &p * &p.adjoint();
    let bottom = &(&ppt - &QMatrix::identity(k)) * &p;
    QMatrix::vstack(&top, &bottom).expect("block shapes").scale(-2.0)
}

/// Riemannian gradient of `h` at `x`.
pub fn gradient(x: &StiefelPoint) -> TangentVector {
    TangentVector::new_unchecked(x, gradient_field(x.mat()))
}

/// Euclidean gradient `[0; 2P]` of the extension `phi(y) = Tr(P*P)`.
pub fn gradient_extension(y: &QMatrix) -> Result<QMatrix> {
    let (n, k) = y.shape();
    check_dims(n, k)?;
    let p = y.block(n - k, 0, k, k);
    Ok(QMatrix::zeros(n, k).with_block(n - k, 0, &p.scale(2.0)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Criticality {
    pub critical: bool,
    /// `|T P*|`.
    pub residual: f64,
}

/// `x` is critical iff `TP* = 0`.
pub fn is_critical(x: &StiefelPoint, tol: f64) -> Criticality {
    let residual = (&x.t() * &x.p().adjoint()).norm();
    Criticality {
        critical: residual <= tol,
        residual,
    }
}

fn require_critical(x: &StiefelPoint) -> Result<()> {
    let c = is_critical(x, CRITICAL_TOL);
    if c.critical {
        Ok(())
    } else {
        Err(Error::NotCritical {
            residual: c.residual,
        })
    }
}

/// Critical values of `h` on `X_{n,k}`: `0..=k` when `n >= 2k`, otherwise
/// `2k-n..=k`.
pub fn critical_levels(n: usize, k: usize) -> Result<Vec<usize>> {
    check_dims(n, k)?;
    let lowest = (2 * k).saturating_sub(n);
    Ok((lowest..=k).collect())
}

fn check_level(n: usize, k: usize, q: usize) -> Result<()> {
    if critical_levels(n, k)?.contains(&q) {
        Ok(())
    } else {
        Err(Error::InvalidLevel { n, k, q })
    }
}

/// Level of a critical point: `round(h(x))`.
pub fn critical_level(x: &StiefelPoint) -> Result<usize> {
    let h = height(x);
    let q = h.round();
    if (h - q).abs() > LEVEL_TOL || q < 0.0 {
        return Err(Error::NonIntegerLevel { height: h });
    }
    Ok(q as usize)
}

/// The notable point of level `q`: `T_0 = [I_p 0; 0 0]`,
/// `P_0 = diag(0_p, I_q)`, `p = k - q`.
pub fn notable_point(n: usize, k: usize, q: usize) -> Result<StiefelPoint> {
    check_level(n, k, q)?;
    let p = k - q;
    let mut mat = QMatrix::zeros(n, k);
    mat = mat.with_block(0, 0, &QMatrix::identity(p));
    mat = mat.with_block(n - k + p, p, &QMatrix::identity(q));
    Ok(StiefelPoint::from_mat_unchecked(mat))
}

/// Weingarten map `W_x(v, w) = -v x* w - x (v*w + w*v) / 2` for `v`
/// tangent and `w` normal at `x`.
pub fn weingarten(x: &StiefelPoint, v: &TangentVector, w: &QMatrix) -> Result<TangentVector> {
    let tangential = tangent_project(x, w)?.norm();
    if tangential > 1e-9 * w.norm().max(1.0) {
        return Err(Error::NotNormal {
            residual: tangential,
        });
    }
    let vm = v.mat();
    let first = &(vm * &x.mat().adjoint()) * w;
    let vw = &vm.adjoint() * w;
    let sym = &vw + &vw.adjoint();
    let second = (x.mat() * &sym).scale(0.5);
    Ok(TangentVector::new_unchecked(x, -&(&first + &second)))
}

fn check_vector(x: &StiefelPoint, v: &TangentVector) -> Result<()> {
    if v.mat().shape() != x.mat().shape() {
        return Err(Error::DimensionMismatch {
            op: "hessian",
            left: x.mat().shape(),
            right: v.mat().shape(),
        });
    }
    Ok(())
}

/// Hessian of `h` at a critical point, gauge-free closed form.
pub fn hessian_apply(x: &StiefelPoint, v: &TangentVector) -> Result<TangentVector> {
    require_critical(x)?;
    check_vector(x, v)?;
    let (n, k) = (x.n(), x.k());
    let xm = x.mat();
    let vm = v.mat();
    let p = x.p();
    let lifted_p = QMatrix::zeros(n, k).with_block(n - k, 0, &p);
    let sym = &(vm * &xm.adjoint()) + &(xm * &vm.adjoint());
    let first = &sym * &lifted_p;
    let v_bottom = vm.block(n - k, 0, k, k);
    let ppt_minus = &(&p * &p.adjoint()) - &QMatrix::identity(k);
    let second = QMatrix::zeros(n, k).with_block(n - k, 0, &(&ppt_minus * &v_bottom));
    Ok(TangentVector::new_unchecked(x, (&first + &second).scale(-2.0)))
}

/// Hessian in the frame `A in Sp(n)` (`A x_0 = x`):
/// `-2 A [X P*P - beta* beta X; X* beta* P - P* beta X]` with
/// `[X; Y] = A* v`.
pub fn hessian_block_form(
    x: &StiefelPoint,
    v: &TangentVector,
    frame: &QMatrix,
) -> Result<TangentVector> {
    require_critical(x)?;
    check_vector(x, v)?;
    let (n, k) = (x.n(), x.k());
    let top = n - k;
    if frame.shape() != (n, n) || frame.block(0, top, n, k).dist(x.mat())? > 1e-9 {
        return Err(Error::InvalidArgument(
            "frame does not carry x in its last k columns".into(),
        ));
    }
    let coords = &frame.adjoint() * v.mat();
    let xx = coords.block(0, 0, top, k);
    let beta = frame.block(top, 0, k, top);
    let p = x.p();
    let btb = &beta.adjoint() * &beta;
    let upper = &(&xx * &(&p.adjoint() * &p)) - &(&btb * &xx);
    let bx = &beta * &xx;
    let lower = &(&bx.adjoint() * &p) - &(&p.adjoint() * &bx);
    let inner = QMatrix::vstack(&upper, &lower)?;
    Ok(TangentVector::new_unchecked(x, (frame * &inner).scale(-2.0)))
}

/// Hessian assembled extrinsically, `P_x(H phi_x(v)) + W_x(v, P_x^perp grad phi_x)`
/// with `H phi_x(v) = 2 [0; v_P]`.
pub fn hessian_reference(x: &StiefelPoint, v: &TangentVector) -> Result<TangentVector> {
    require_critical(x)?;
    check_vector(x, v)?;
    let (n, k) = (x.n(), x.k());
    let v_bottom = v.mat().block(n - k, 0, k, k);
    let hess_phi = QMatrix::zeros(n, k).with_block(n - k, 0, &v_bottom.scale(2.0));
    let projected = tangent_project(x, &hess_phi)?;
    let w = normal_project(x, &gradient_extension(x.mat())?)?;
    let shape = weingarten(x, v, &w)?;
    Ok(TangentVector::new_unchecked(
        x,
        projected.mat() + shape.mat(),
    ))
}

/// Matrix of the Hessian in an orthonormal tangent basis, built from the
/// frame `A`: entry `(i, j) = <e_i, Hh(e_j)>`. Not symmetrized.
pub fn hessian_matrix_with_frame(x: &StiefelPoint, frame: &QMatrix) -> Result<DMatrix<f64>> {
    require_critical(x)?;
    let basis = tangent_basis_with_frame(x, frame)?;
    let d = basis.len();
    let images = basis
        .iter()
        .map(|e| hessian_apply(x, e))
        .collect::<Result<Vec<_>>>()?;
    Ok(DMatrix::from_fn(d, d, |i, j| basis[i].inner(&images[j])))
}

/// [`hessian_matrix_with_frame`] in the canonical frame of `x`.
pub fn hessian_matrix(x: &StiefelPoint) -> Result<DMatrix<f64>> {
    hessian_matrix_with_frame(x, &x.frame()?)
}

/// Spectrum of the Hessian at a critical point, snapped to `{-2, 0, 2}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumReport {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub mult_minus2: usize,
    pub mult_zero: usize,
    pub mult_plus2: usize,
    /// Largest distance of an eigenvalue to `{-2, 0, 2}`.
    pub residual: f64,
}

impl SpectrumReport {
    pub fn dimension(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Number of nonzero eigenvalues.
    pub fn rank(&self) -> usize {
        self.mult_minus2 + self.mult_plus2
    }

    /// Dimension of the negative eigenspace.
    pub fn index(&self) -> usize {
        self.mult_minus2
    }

    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        let (mut minus, mut zero, mut plus) = (0, 0, 0);
        let mut residual: f64 = 0.0;
        for &l in &eigenvalues {
            let (target, slot) = [(-2.0, &mut minus), (0.0, &mut zero), (2.0, &mut plus)]
                .into_iter()
                .min_by(|a, b| (l - a.0).abs().total_cmp(&(l - b.0).abs()))
                .expect("three targets");
            *slot += 1;
            residual = residual.max((l - target).abs());
        }
        SpectrumReport {
            eigenvalues,
            mult_minus2: minus,
            mult_zero: zero,
            mult_plus2: plus,
            residual,
        }
    }
}

/// Eigenvalues of the Hessian on the real tangent space, with their
/// multiplicities after snapping. Fails if any eigenvalue is further than
/// [`SPECTRUM_SNAP_TOL`] from `{-2, 0, 2}`.
pub fn hessian_spectrum(x: &StiefelPoint) -> Result<SpectrumReport> {
    let h = hessian_matrix(x)?;
    let sym = (&h + h.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let report = SpectrumReport::from_eigenvalues(eig.eigenvalues.iter().copied().collect());
    if report.residual > SPECTRUM_SNAP_TOL {
        return Err(Error::SpectrumMismatch {
            residual: report.residual,
        });
    }
    Ok(report)
}

/// Closed-form dimensions attached to the critical level `Sigma_q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SigmaInvariants {
    pub n: usize,
    pub k: usize,
    pub q: usize,
    pub p: usize,
    /// `4(n - 2k + q) q`.
    pub index: usize,
    /// `4np - 8p^2 + 2k^2 + k`.
    pub kernel_dim: usize,
    /// `4p^2`.
    pub plus_dim: usize,
    pub dim_sigma: usize,
    /// `4nk - 2k^2 + k`.
    pub dim_x: usize,
    /// `dim Sp(n-k) + 2 dim Sp(k)`.
    pub dim_group: usize,
    /// `dim Sp(p) + dim Sp(n-k-p) + dim Sp(p) + dim Sp(k-p)`.
    pub dim_isotropy: usize,
    /// `dim Sp(k) + 4p(n-k-p) + 4p(k-p)`: fibre plus base of the bundle
    /// `Sp(k) -> Sigma_q -> Gr_{n-k,p} x Gr_{k,k-p}`.
    pub bundle_dim: usize,
}

impl SigmaInvariants {
    /// `index + kernel_dim + plus_dim == dim_x`.
    pub fn sums_to_dimension(&self) -> bool {
        self.index + self.kernel_dim + self.plus_dim == self.dim_x
    }

    /// The kernel, the homogeneous-space dimension and the bundle dimension
    /// agree.
    pub fn dimensions_agree(&self) -> bool {
        self.kernel_dim == self.dim_sigma
            && self.dim_group - self.dim_isotropy == self.dim_sigma
            && self.bundle_dim == self.dim_sigma
    }
}

pub fn sigma_invariants(n: usize, k: usize, q: usize) -> Result<SigmaInvariants> {
    check_level(n, k, q)?;
    let p = k - q;
    let (ni, ki, qi, pi) = (n as i64, k as i64, q as i64, p as i64);
    let index = 4 * (ni - 2 * ki + qi) * qi;
    let kernel = 4 * ni * pi - 8 * pi * pi + 2 * ki * ki + ki;
    let as_dim = |v: i64| usize::try_from(v).expect("nonnegative on valid levels");
    let dim_group = dim_sp(n - k) + 2 * dim_sp(k);
    let dim_isotropy = dim_sp(p) + dim_sp(n - k - p) + dim_sp(p) + dim_sp(k - p);
    Ok(SigmaInvariants {
        n,
        k,
        q,
        p,
        index: as_dim(index),
        kernel_dim: as_dim(kernel),
        plus_dim: 4 * p * p,
        dim_sigma: as_dim(kernel),
        dim_x: stiefel_dim(n, k),
        dim_group,
        dim_isotropy,
        bundle_dim: dim_sp(k) + 4 * p * (n - k - p) + 4 * p * (k - p),
    })
}
