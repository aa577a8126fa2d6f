//! The quaternionic Stiefel manifold `X_{n,k} = { x in H^{n x k} : x*x = I_k }`.
//!
//! A point is split into the top `(n-k) x k` block `T` and the bottom
//! `k x k` block `P`. The tangent space at `x` is
//! `{ v : x*v + v*x = 0 }`; its real dimension is `4nk - 2k^2 + k`.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::{MatrixJson, QMatrix};
use crate::quaternion::Quaternion;
use crate::random::{gaussian_matrix, rng_from_seed};
use crate::svd::{complete_symplectic, orthonormalize_columns, svd};
use crate::DEFAULT_TOL;

/// Singular values below this make [`polar_retract`] fail.
pub const RETRACT_MIN_SIGMA: f64 = 1e-10;

/// Real dimension of `Sp(m)`.
pub const fn dim_sp(m: usize) -> usize {
    2 * m * m + m
}

/// Real dimension of `X_{n,k}`.
pub const fn stiefel_dim(n: usize, k: usize) -> usize {
    4 * n * k + k - 2 * k * k
}

pub(crate) fn check_dims(n: usize, k: usize) -> Result<()> {
    if k == 0 || k >= n {
        Err(Error::InvalidDimensions { n, k })
    } else {
        Ok(())
    }
}

/// `|x*x - I_k|` for any `n x k` matrix.
pub fn constraint_residual(mat: &QMatrix) -> f64 {
    mat.orthonormality_residual()
}

#[derive(Clone, Debug, PartialEq)]
pub struct StiefelPoint {
    n: usize,
    k: usize,
    mat: QMatrix,
}

impl StiefelPoint {
    /// Validates `mat` against the constraint at tolerance `tol`.
    pub fn new(mat: QMatrix, tol: f64) -> Result<Self> {
        validate_point(mat, tol)
    }

    /// Wraps a matrix without checking the constraint. Callers are
    /// responsible for reporting any drift.
    pub(crate) fn from_mat_unchecked(mat: QMatrix) -> Self {
        StiefelPoint {
            n: mat.rows(),
            k: mat.cols(),
            mat,
        }
    }

    /// `x_0 = [0; I_k]`.
    pub fn base_point(n: usize, k: usize) -> Result<Self> {
        check_dims(n, k)?;
        Ok(Self::from_mat_unchecked(
            QMatrix::zeros(n, k).with_block(n - k, 0, &QMatrix::identity(k)),
        ))
    }

    /// Builds `[T; P]` from its blocks.
    pub fn from_blocks(t: &QMatrix, p: &QMatrix, tol: f64) -> Result<Self> {
        Self::new(QMatrix::vstack(t, p)?, tol)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn mat(&self) -> &QMatrix {
        &self.mat
    }

    pub fn into_mat(self) -> QMatrix {
        self.mat
    }

    /// Top `(n-k) x k` block.
    pub fn t(&self) -> QMatrix {
        self.mat.block(0, 0, self.n - self.k, self.k)
    }

    /// Bottom `k x k` block.
    pub fn p(&self) -> QMatrix {
        self.mat.block(self.n - self.k, 0, self.k, self.k)
    }

    pub fn residual(&self) -> f64 {
        constraint_residual(&self.mat)
    }

    /// Real dimension of the manifold this point lives on.
    pub fn manifold_dim(&self) -> usize {
        stiefel_dim(self.n, self.k)
    }

    /// An `A in Sp(n)` with `A x_0 = x`: the columns of `x` completed to a
    /// symplectic matrix, so `x` occupies the last `k` columns.
    pub fn frame(&self) -> Result<QMatrix> {
        complete_symplectic(&self.mat)
    }

    pub fn dist(&self, other: &StiefelPoint) -> f64 {
        self.mat.dist(&other.mat).unwrap_or(f64::INFINITY)
    }
}

impl Serialize for StiefelPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct PointJson<'a> {
            n: usize,
            k: usize,
            #[serde(flatten)]
            mat: &'a MatrixJson,
        }
        PointJson {
            n: self.n,
            k: self.k,
            mat: &MatrixJson::from(&self.mat),
        }
        .serialize(s)
    }
}

/// Returns the point iff `|mat* mat - I_k| <= tol`.
pub fn validate_point(mat: QMatrix, tol: f64) -> Result<StiefelPoint> {
    let (n, k) = mat.shape();
    check_dims(n, k)?;
    let residual = constraint_residual(&mat);
    if residual.is_nan() || residual > tol {
        return Err(Error::NotOnManifold { residual, tol });
    }
    Ok(StiefelPoint::from_mat_unchecked(mat))
}

/// A vector `v` with `x*v + v*x = 0` at its base point `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    base: StiefelPoint,
    mat: QMatrix,
}

impl TangentVector {
    /// Checks tangency with tolerance `tol * max(1, |v|)`.
    pub fn new(base: &StiefelPoint, mat: QMatrix, tol: f64) -> Result<Self> {
        if mat.shape() != base.mat.shape() {
            return Err(Error::DimensionMismatch {
                op: "tangent vector",
                left: base.mat.shape(),
                right: mat.shape(),
            });
        }
        let residual = tangency_residual(base, &mat);
        if residual.is_nan() || residual > tol * mat.norm().max(1.0) {
            return Err(Error::NotTangent { residual });
        }
        Ok(TangentVector {
            base: base.clone(),
            mat,
        })
    }

    pub(crate) fn new_unchecked(base: &StiefelPoint, mat: QMatrix) -> Self {
        TangentVector {
            base: base.clone(),
            mat,
        }
    }

    pub fn base(&self) -> &StiefelPoint {
        &self.base
    }

    pub fn mat(&self) -> &QMatrix {
        &self.mat
    }

    pub fn into_mat(self) -> QMatrix {
        self.mat
    }

    pub fn norm(&self) -> f64 {
        self.mat.norm()
    }

    /// Euclidean inner product with another vector (base points are not
    /// compared).
    pub fn inner(&self, other: &TangentVector) -> f64 {
        self.mat
            .frobenius_inner(&other.mat)
            .expect("tangent vectors at points of the same manifold")
    }

    pub fn residual(&self) -> f64 {
        tangency_residual(&self.base, &self.mat)
    }
}

/// `|x*v + v*x|`.
pub fn tangency_residual(x: &StiefelPoint, v: &QMatrix) -> f64 {
    let xv = &x.mat.adjoint() * v;
    (&xv + &xv.adjoint()).norm()
}

fn check_ambient(x: &StiefelPoint, u: &QMatrix, op: &'static str) -> Result<()> {
    if u.shape() != x.mat.shape() {
        return Err(Error::DimensionMismatch {
            op,
            left: x.mat.shape(),
            right: u.shape(),
        });
    }
    Ok(())
}

/// `x (x*u + u*x) / 2`, without shape checks.
fn normal_part(x: &QMatrix, u: &QMatrix) -> QMatrix {
    let xu = &x.adjoint() * u;
    let sym = &xu + &xu.adjoint();
    (x * &sym).scale(0.5)
}

/// Orthogonal projection onto the tangent space,
/// `u - x (x*u + u*x) / 2`.
pub fn tangent_project(x: &StiefelPoint, u: &QMatrix) -> Result<TangentVector> {
    check_ambient(x, u, "tangent_project")?;
    Ok(TangentVector::new_unchecked(x, u - &normal_part(&x.mat, u)))
}

/// Orthogonal projection onto the normal space, `x (x*u + u*x) / 2`.
pub fn normal_project(x: &StiefelPoint, u: &QMatrix) -> Result<QMatrix> {
    check_ambient(x, u, "normal_project")?;
    Ok(normal_part(&x.mat, u))
}

/// Uniformly distributed point: Gram-Schmidt on a Gaussian `n x k`
/// matrix. Deterministic in `seed`.
pub fn random_point(n: usize, k: usize, seed: u64) -> Result<StiefelPoint> {
    check_dims(n, k)?;
    let mut rng = rng_from_seed(seed);
    loop {
        if let Ok(q) = orthonormalize_columns(&gaussian_matrix(&mut rng, n, k)) {
            return validate_point(q, DEFAULT_TOL);
        }
    }
}

/// Tangent projection of a Gaussian ambient matrix. Deterministic in
/// `seed`.
pub fn random_tangent(x: &StiefelPoint, seed: u64) -> TangentVector {
    let mut rng = rng_from_seed(seed);
    let u = gaussian_matrix(&mut rng, x.n, x.k);
    TangentVector::new_unchecked(x, &u - &normal_part(&x.mat, &u))
}

/// Canonical orthonormal basis of `T_{x_0} X_{n,k}` in block form
/// `[X; Y]`: the `4(n-k)k` unit entries of `X`, then the skew-Hermitian
/// `Y` with `i, j, k` on each diagonal entry and the four units on each
/// strictly upper pair (scaled by `1/sqrt 2`).
pub fn base_tangent_basis(n: usize, k: usize) -> Result<Vec<QMatrix>> {
    check_dims(n, k)?;
    let top = n - k;
    let mut out = Vec::with_capacity(stiefel_dim(n, k));
    for i in 0..top {
        for j in 0..k {
            for u in Quaternion::UNITS {
                let mut e = QMatrix::zeros(n, k);
                e.set(i, j, u);
                out.push(e);
            }
        }
    }
    for a in 0..k {
        for u in [Quaternion::I, Quaternion::J, Quaternion::K] {
            let mut e = QMatrix::zeros(n, k);
            e.set(top + a, a, u);
            out.push(e);
        }
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for a in 0..k {
        for b in a + 1..k {
            for u in Quaternion::UNITS {
                let mut e = QMatrix::zeros(n, k);
                e.set(top + a, b, u * h);
                e.set(top + b, a, -(u.conj() * h));
                out.push(e);
            }
        }
    }
    Ok(out)
}

/// Orthonormal basis of `T_x X_{n,k}`: the canonical basis at `x_0`
/// transported by `A = x.frame()`.
pub fn tangent_basis(x: &StiefelPoint) -> Result<Vec<TangentVector>> {
    tangent_basis_with_frame(x, &x.frame()?)
}

/// As [`tangent_basis`] with a caller-supplied `A in Sp(n)`, `A x_0 = x`.
pub fn tangent_basis_with_frame(x: &StiefelPoint, frame: &QMatrix) -> Result<Vec<TangentVector>> {
    Ok(base_tangent_basis(x.n, x.k)?
        .into_iter()
        .map(|e| TangentVector::new_unchecked(x, frame * &e))
        .collect())
}

/// Nearest point of the manifold in the Frobenius norm, `U V*` from the
/// thin SVD `y = U S V*`.
pub fn polar_retract(y: &QMatrix) -> Result<StiefelPoint> {
    let (n, k) = y.shape();
    check_dims(n, k)?;
    let f = svd(y)?;
    let sigma_min = f.s.last().copied().unwrap_or(0.0);
    if sigma_min.is_nan() || sigma_min < RETRACT_MIN_SIGMA {
        return Err(Error::RankDeficient { sigma_min });
    }
    Ok(StiefelPoint::from_mat_unchecked(
        &f.u_thin() * &f.v.adjoint(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s7_point() -> StiefelPoint {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        StiefelPoint::new(QMatrix::from_real(2, 1, &[h, h]).unwrap(), DEFAULT_TOL).unwrap()
    }

    #[test]
    fn validate_cases() {
        assert!(StiefelPoint::base_point(3, 2).is_ok());
        assert!(validate_point(StiefelPoint::base_point(3, 2).unwrap().into_mat(), 1e-14).is_ok());
        match validate_point(QMatrix::from_real(2, 1, &[1.0, 1.0]).unwrap(), DEFAULT_TOL) {
            Err(Error::NotOnManifold { residual, .. }) => assert!((residual - 1.0).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
        let _ = s7_point();
        assert!(matches!(
            validate_point(QMatrix::identity(2), DEFAULT_TOL),
            Err(Error::InvalidDimensions { .. })
        ));
    }

    #[test]
    fn blocks() {
        let x = random_point(5, 2, 3).unwrap();
        assert_eq!(x.t().shape(), (3, 2));
        assert_eq!(x.p().shape(), (2, 2));
        let tt = &x.t().adjoint() * &x.t();
        let pp = &x.p().adjoint() * &x.p();
        assert!((&tt + &pp).dist(&QMatrix::identity(2)).unwrap() < 1e-12);
    }

    #[test]
    fn projections() {
        let x = random_point(4, 2, 5).unwrap();
        assert!(tangent_project(&x, x.mat()).unwrap().norm() < 1e-14);
        assert!(normal_project(&x, x.mat()).unwrap().dist(x.mat()).unwrap() < 1e-14);

        let v = random_tangent(&x, 6);
        assert!(tangent_project(&x, v.mat()).unwrap().mat().dist(v.mat()).unwrap() < 1e-13);
        assert!(normal_project(&x, v.mat()).unwrap().norm() < 1e-13);

        let u = gaussian_matrix(&mut rng_from_seed(7), 4, 2);
        let t = tangent_project(&x, &u).unwrap();
        let tt = tangent_project(&x, t.mat()).unwrap();
        assert!(tt.mat().dist(t.mat()).unwrap() < 1e-12);
        let nrm = normal_project(&x, &u).unwrap();
        assert!(t.mat().frobenius_inner(&nrm).unwrap().abs() < 1e-12);
        assert!((t.mat() + &nrm).dist(&u).unwrap() < 1e-13);

        assert!(tangent_project(&x, &QMatrix::zeros(3, 2)).is_err());
    }

    #[test]
    fn normal_part_of_extension_gradient() {
        // u = [0; 2P] projects to x (2 P*P)
        let x = random_point(5, 2, 8).unwrap();
        let u = QMatrix::zeros(3, 2);
        let u = QMatrix::vstack(&u, &x.p().scale(2.0)).unwrap();
        let expected = x.mat() * &(&x.p().adjoint() * &x.p()).scale(2.0);
        assert!(normal_project(&x, &u).unwrap().dist(&expected).unwrap() < 1e-13);
    }

    #[test]
    fn random_point_contract() {
        assert_eq!(random_point(2, 1, 7).unwrap(), random_point(2, 1, 7).unwrap());
        assert!(random_point(4, 2, 99).unwrap().residual() < 1e-10);
        assert!(random_point(1, 1, 0).is_err());
    }

    #[test]
    fn random_tangent_contract() {
        let x = random_point(3, 2, 1).unwrap();
        let v = random_tangent(&x, 2);
        assert!(v.residual() < 1e-12);
        assert_eq!(v, random_tangent(&x, 2));

        let x0 = StiefelPoint::base_point(4, 2).unwrap();
        let v = random_tangent(&x0, 3);
        let y = v.mat().block(2, 0, 2, 2);
        assert!((&y + &y.adjoint()).norm() < 1e-14);
    }

    #[test]
    fn basis_counts_and_gram() {
        let x = random_point(2, 1, 1).unwrap();
        assert_eq!(tangent_basis(&x).unwrap().len(), 7);
        let x = random_point(4, 2, 1).unwrap();
        let basis = tangent_basis(&x).unwrap();
        assert_eq!(basis.len(), 26);
        for (i, a) in basis.iter().enumerate() {
            assert!(a.residual() < 1e-12);
            for (j, b) in basis.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((a.inner(b) - expect).abs() < 1e-10);
            }
        }
        for n in 2..=7 {
            for k in 1..n {
                assert_eq!(stiefel_dim(n, k), dim_sp(n) - dim_sp(n - k));
            }
        }
    }

    #[test]
    fn retraction() {
        let x = random_point(4, 2, 10).unwrap();
        assert!(polar_retract(x.mat()).unwrap().dist(&x) < 1e-13);
        assert!(polar_retract(&x.mat().scale(2.0)).unwrap().dist(&x) < 1e-13);
        let y = x.mat() + &gaussian_matrix(&mut rng_from_seed(1), 4, 2).scale(1e-3);
        assert!(polar_retract(&y).unwrap().residual() < 1e-10);
        assert!(matches!(
            polar_retract(&QMatrix::zeros(3, 1)),
            Err(Error::RankDeficient { .. })
        ));
    }
}
