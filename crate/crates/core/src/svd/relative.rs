//! Simultaneous factorization of the blocks of a Stiefel point.
//!
//! For `x = [T; P]` there are `a, b in Sp(k)` and `m in Sp(n-k)` with
//!
//! ```text
//! P = a diag(I_p, diag(c), 0_r) b*
//! T = m L b*,   L = [0_{p' x p}  0          0    ]
//!                   [0           diag(-s)   0    ]
//!                   [0           0          -I_r ]
//! ```
//!
//! where `0 < c_i < 1`, `s_i = sqrt(1 - c_i^2)`, `p + q + r = k` and
//! `p' + q + r = n - k`. Since `T*T = I - P*P`, the columns of `T b` are
//! orthogonal with lengths `s_i`; the left factor `m` is read off them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::stiefel::StiefelPoint;
use crate::svd::{complete_symplectic, orthonormalize_columns, svd};

/// Threshold separating the one-block, interior and zero-block of the
/// singular values of `P`.
pub const DEFAULT_SV_EPS: f64 = 1e-8;

#[derive(Clone, Debug, Serialize)]
pub struct RelativeSvd {
    pub n: usize,
    pub k: usize,
    pub m: QMatrix,
    pub a: QMatrix,
    pub b: QMatrix,
    pub p: usize,
    pub q: usize,
    pub r: usize,
    /// Interior singular values of `P`, descending, in `(0, 1)`.
    pub c: Vec<f64>,
    /// `s_i = sqrt(1 - c_i^2)`.
    pub s: Vec<f64>,
}

impl RelativeSvd {
    /// `p' = n - k - q - r`, the number of zero rows on top of `L`.
    pub fn p_prime(&self) -> usize {
        self.n - self.k - self.q - self.r
    }

    /// `diag(I_p, diag(c), 0_r)` for the given interior values.
    pub fn p_pattern(&self, c: &[f64]) -> QMatrix {
        debug_assert_eq!(c.len(), self.q);
        let diag: Vec<f64> = std::iter::repeat_n(1.0, self.p)
            .chain(c.iter().copied())
            .chain(std::iter::repeat_n(0.0, self.r))
            .collect();
        QMatrix::real_diagonal(self.k, self.k, &diag)
    }

    /// The `(n-k) x k` middle factor of `T` for the given interior `s`.
    pub fn t_pattern(&self, s: &[f64]) -> QMatrix {
        debug_assert_eq!(s.len(), self.q);
        let mut l = vec![0.0; (self.n - self.k) * self.k];
        let row0 = self.p_prime();
        for (i, &si) in s.iter().enumerate() {
            l[(row0 + i) * self.k + self.p + i] = -si;
        }
        for i in 0..self.r {
            l[(row0 + self.q + i) * self.k + self.p + self.q + i] = -1.0;
        }
        QMatrix::from_real(self.n - self.k, self.k, &l).expect("pattern shape")
    }

    /// `[m L(s) b*; a D(c) b*]` for arbitrary interior values.
    pub fn assemble(&self, c: &[f64], s: &[f64]) -> QMatrix {
        let bt = self.b.adjoint();
        let t = &(&self.m * &self.t_pattern(s)) * &bt;
        let p = &(&self.a * &self.p_pattern(c)) * &bt;
        QMatrix::vstack(&t, &p).expect("block shapes")
    }

    pub fn reconstruct_t(&self) -> QMatrix {
        &(&self.m * &self.t_pattern(&self.s)) * &self.b.adjoint()
    }

    pub fn reconstruct_p(&self) -> QMatrix {
        &(&self.a * &self.p_pattern(&self.c)) * &self.b.adjoint()
    }

    pub fn reconstruct(&self) -> QMatrix {
        self.assemble(&self.c, &self.s)
    }

    /// True when the decomposed point is critical (no interior values).
    pub fn is_critical(&self) -> bool {
        self.q == 0
    }
}

/// [`relative_svd_with`] at the default threshold.
pub fn relative_svd(x: &StiefelPoint) -> Result<RelativeSvd> {
    relative_svd_with(x, DEFAULT_SV_EPS)
}

/// Relative SVD of `x`. A pair `(c, s)` (singular value of `P`, length of
/// the matching column of `T b`) is put in the one-block when `s < eps`,
/// in the zero-block when `c < eps`, and in the interior otherwise.
pub fn relative_svd_with(x: &StiefelPoint, eps: f64) -> Result<RelativeSvd> {
    let (n, k) = (x.n(), x.k());
    let f = svd(&x.p())?;
    let tb = &x.t() * &f.v;
    let lengths: Vec<f64> = (0..k).map(|j| tb.column(j).norm()).collect();

    #[derive(PartialEq, PartialOrd, Clone, Copy)]
    enum Class {
        One,
        Interior,
        Zero,
    }
    let classes: Vec<Class> = f
        .s
        .iter()
        .zip(&lengths)
        .map(|(&c, &s)| {
            if s < eps {
                Class::One
            } else if c < eps {
                Class::Zero
            } else {
                Class::Interior
            }
        })
        .collect();
    if classes.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Decomposition(
            "singular value classes are not ordered".into(),
        ));
    }
    let p = classes.iter().filter(|&&c| c == Class::One).count();
    let q = classes.iter().filter(|&&c| c == Class::Interior).count();
    let r = k - p - q;
    if q + r > n - k {
        return Err(Error::Decomposition(format!(
            "rank of T ({}) exceeds n-k ({})",
            q + r,
            n - k
        )));
    }

    let mut c = Vec::with_capacity(q);
    let mut s = Vec::with_capacity(q);
    for (&len, &sv) in lengths[p..p + q].iter().zip(&f.s[p..p + q]) {
        let theta = len.atan2(sv);
        c.push(theta.cos());
        s.push(theta.sin());
    }

    let m = if q + r == 0 {
        QMatrix::identity(n - k)
    } else {
        let cols: Vec<usize> = (p..k).collect();
        let mut dirs = tb.select_columns(&cols);
        for (jj, &j) in cols.iter().enumerate() {
            let col = dirs.column(jj).scale(-1.0 / lengths[j]);
            dirs = dirs.with_block(0, jj, &col);
        }
        complete_symplectic(&orthonormalize_columns(&dirs)?)?
    };

    Ok(RelativeSvd {
        n,
        k,
        m,
        a: f.u,
        b: f.v,
        p,
        q,
        r,
        c,
        s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stiefel::random_point;
    use crate::DEFAULT_TOL;

    #[test]
    fn base_point_is_all_ones() {
        let x = StiefelPoint::base_point(4, 2).unwrap();
        let d = relative_svd(&x).unwrap();
        assert_eq!((d.p, d.q, d.r), (2, 0, 0));
        assert!(d.reconstruct().dist(x.mat()).unwrap() < 1e-15);
    }

    #[test]
    fn s7_interior() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let x = StiefelPoint::new(QMatrix::from_real(2, 1, &[h, h]).unwrap(), DEFAULT_TOL).unwrap();
        let d = relative_svd(&x).unwrap();
        assert_eq!((d.p, d.q, d.r), (0, 1, 0));
        assert!((d.c[0] - h).abs() < 1e-15);
        assert!((d.s[0] - h).abs() < 1e-15);
        assert!(d.reconstruct().dist(x.mat()).unwrap() < 1e-15);
    }

    #[test]
    fn random_reconstruction() {
        for seed in 0..10 {
            let x = random_point(4, 2, seed).unwrap();
            let d = relative_svd(&x).unwrap();
            assert_eq!((d.p, d.q, d.r), (0, 2, 0));
            assert!(d.reconstruct_t().dist(&x.t()).unwrap() < 1e-9);
            assert!(d.reconstruct_p().dist(&x.p()).unwrap() < 1e-9);
            for f in [&d.m, &d.a, &d.b] {
                assert!(f.orthonormality_residual() < 1e-10);
            }
            for (c, s) in d.c.iter().zip(&d.s) {
                assert!(*c > 0.0 && *c < 1.0);
                assert!((s - (1.0 - c * c).sqrt()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tall_p_forces_ones() {
        // n - k < k: rank(T) <= 1, so at least one singular value of P is 1
        let x = random_point(3, 2, 5).unwrap();
        let d = relative_svd(&x).unwrap();
        assert_eq!((d.p, d.q, d.r), (1, 1, 0));
        assert!(d.reconstruct().dist(x.mat()).unwrap() < 1e-9);
    }
}
