//! The action of `K_{n,k} = Sp(n-k) x Sp(k) x Sp(k)` on `X_{n,k}`,
//! `(m, a, b) . [T; P] = [m T b*; a P b*]`.
//!
//! The action preserves `h` and `TP*`, so it maps each critical level
//! `Sigma_q` to itself, transitively. The isotropy group of the notable
//! point of `Sigma_q` is `Sp(p) x Sp(n-k-p) x Sp(p) x Sp(k-p)`, embedded by
//! [`isotropy_embed`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::morse::{critical_level, is_critical, CRITICAL_TOL};
use crate::random::{random_symplectic, rng_from_seed};
use crate::stiefel::{check_dims, StiefelPoint, TangentVector};
use crate::svd::relative_svd;

/// Accepted `|g*g - I|` for each factor of a group element.
pub const SYMPLECTIC_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupElement {
    m: QMatrix,
    a: QMatrix,
    b: QMatrix,
}

fn check_symplectic(g: &QMatrix, tol: f64) -> Result<()> {
    if !g.is_square() {
        return Err(Error::NotSquare {
            op: "symplectic factor",
            rows: g.rows(),
            cols: g.cols(),
        });
    }
    let residual = g.orthonormality_residual();
    if residual <= tol {
        Ok(())
    } else {
        Err(Error::NotSymplectic { residual })
    }
}

impl GroupElement {
    /// Validates that `m in Sp(n-k)` and `a, b in Sp(k)`.
    pub fn new(m: QMatrix, a: QMatrix, b: QMatrix) -> Result<Self> {
        for f in [&m, &a, &b] {
            check_symplectic(f, SYMPLECTIC_TOL)?;
        }
        if a.rows() != b.rows() || a.rows() == 0 || m.rows() == 0 {
            return Err(Error::DimensionMismatch {
                op: "group element",
                left: a.shape(),
                right: b.shape(),
            });
        }
        Ok(GroupElement { m, a, b })
    }

    pub fn identity(n: usize, k: usize) -> Result<Self> {
        check_dims(n, k)?;
        Ok(GroupElement {
            m: QMatrix::identity(n - k),
            a: QMatrix::identity(k),
            b: QMatrix::identity(k),
        })
    }

    pub fn m(&self) -> &QMatrix {
        &self.m
    }

    pub fn a(&self) -> &QMatrix {
        &self.a
    }

    pub fn b(&self) -> &QMatrix {
        &self.b
    }

    pub fn n(&self) -> usize {
        self.m.rows() + self.a.rows()
    }

    pub fn k(&self) -> usize {
        self.a.rows()
    }

    /// Componentwise product `self * other`.
    pub fn compose(&self, other: &GroupElement) -> Result<GroupElement> {
        Ok(GroupElement {
            m: self.m.try_mul(&other.m)?,
            a: self.a.try_mul(&other.a)?,
            b: self.b.try_mul(&other.b)?,
        })
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement {
            m: self.m.adjoint(),
            a: self.a.adjoint(),
            b: self.b.adjoint(),
        }
    }

    /// `diag(m, a) y b*` on any `n x k` matrix.
    pub fn apply(&self, y: &QMatrix) -> Result<QMatrix> {
        if y.shape() != (self.n(), self.k()) {
            return Err(Error::DimensionMismatch {
                op: "group action",
                left: (self.n(), self.k()),
                right: y.shape(),
            });
        }
        let left = QMatrix::block_diag(&self.m, &self.a);
        Ok(&(&left * y) * &self.b.adjoint())
    }

    pub fn max_residual(&self) -> f64 {
        [&self.m, &self.a, &self.b]
            .iter()
            .map(|f| f.orthonormality_residual())
            .fold(0.0, f64::max)
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            m: QMatrix,
            a: QMatrix,
            b: QMatrix,
        }
        let raw = Raw::deserialize(d)?;
        GroupElement::new(raw.m, raw.a, raw.b).map_err(serde::de::Error::custom)
    }
}

/// `[m T b*; a P b*]`.
pub fn act_point(g: &GroupElement, x: &StiefelPoint) -> Result<StiefelPoint> {
    Ok(StiefelPoint::from_mat_unchecked(g.apply(x.mat())?))
}

/// Tangent lift `v -> diag(m, a) v b*`, based at `g . x`.
pub fn act_tangent(g: &GroupElement, v: &TangentVector) -> Result<TangentVector> {
    let residual = v.residual();
    if residual > 1e-9 * v.norm().max(1.0) {
        return Err(Error::NotTangent { residual });
    }
    let base = act_point(g, v.base())?;
    Ok(TangentVector::new_unchecked(&base, g.apply(v.mat())?))
}

/// Three independent Haar-distributed factors. Deterministic in `seed`.
pub fn random_group_element(n: usize, k: usize, seed: u64) -> Result<GroupElement> {
    check_dims(n, k)?;
    let mut rng = rng_from_seed(seed);
    let m = random_symplectic(&mut rng, n - k);
    let a = random_symplectic(&mut rng, k);
    let b = random_symplectic(&mut rng, k);
    GroupElement::new(m, a, b)
}

/// Embeds `(m1, m2, a1, a2) in Sp(p) x Sp(n-k-p) x Sp(p) x Sp(k-p)` as
/// `(diag(m1, m2), diag(a1, a2), diag(m1, a2))`, an element fixing the
/// notable point of level `q = k - p`.
pub fn isotropy_embed(
    m1: &QMatrix,
    m2: &QMatrix,
    a1: &QMatrix,
    a2: &QMatrix,
) -> Result<GroupElement> {
    if m1.shape() != a1.shape() {
        return Err(Error::DimensionMismatch {
            op: "isotropy_embed",
            left: m1.shape(),
            right: a1.shape(),
        });
    }
    for f in [m1, m2, a1, a2] {
        check_symplectic(f, SYMPLECTIC_TOL)?;
    }
    GroupElement::new(
        QMatrix::block_diag(m1, m2),
        QMatrix::block_diag(a1, a2),
        QMatrix::block_diag(m1, a2),
    )
}

/// A `g in K_{n,k}` carrying the notable point of the level of `x` onto
/// the critical point `x`, built from the relative SVD of `x`.
///
/// The decomposition lists the unit singular values of `P` first while
/// the notable point lists its zero block first; the columns of `a`, `b`
/// and `m` are cyclically permuted to match, and the `-I_r` sign of the
/// decomposition is moved into `m`.
pub fn transitivity_witness(x: &StiefelPoint) -> Result<(GroupElement, usize)> {
    let crit = is_critical(x, CRITICAL_TOL);
    if !crit.critical {
        return Err(Error::NotCritical {
            residual: crit.residual,
        });
    }
    let level = critical_level(x)?;
    let d = relative_svd(x)?;
    if d.q != 0 || d.p != level {
        return Err(Error::Decomposition(format!(
            "critical point at level {level} decomposed as (p, q, r) = ({}, {}, {})",
            d.p, d.q, d.r
        )));
    }
    let (n, k, r) = (x.n(), x.k(), d.r);
    let top = n - k;
    // zero block of P (last r columns) first
    let perm: Vec<usize> = (k - r..k).chain(0..k - r).collect();
    let a = d.a.select_columns(&perm);
    let b = d.b.select_columns(&perm);
    let m_perm: Vec<usize> = (top - r..top).chain(0..top - r).collect();
    let mut m = d.m.select_columns(&m_perm);
    for j in 0..r {
        m = m.with_block(0, j, &m.column(j).scale(-1.0));
    }
    Ok((GroupElement::new(m, a, b)?, level))
}
