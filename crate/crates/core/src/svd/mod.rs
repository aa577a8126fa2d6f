//! Quaternionic singular value decomposition.
//!
//! The factorization is computed by one-sided (Hestenes) Jacobi directly in
//! quaternion arithmetic. For a column pair `(w_i, w_j)` with Hermitian
//! product `g = w_i* w_j`, column `j` is first multiplied on the right by
//! the unit quaternion `conj(g/|g|)`, which makes the product real, and the
//! pair is then orthogonalized by an ordinary real plane rotation. Both
//! steps are right multiplications by elements of `Sp(2)`, so the
//! accumulated right factor stays symplectic.

mod relative;

pub use relative::{relative_svd, relative_svd_with, RelativeSvd, DEFAULT_SV_EPS};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::quaternion::Quaternion;

/// Stop once the off-diagonal Frobenius mass of `A*A` falls below this
/// (scaled by `max(1, |A|^2)`).
pub const JACOBI_OFF_TOL: f64 = 1e-14;
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Candidate basis vectors whose residual after projection is shorter
/// than this are skipped during completion.
pub const COMPLETION_PIVOT: f64 = 1e-6;
/// Accepted deviation from orthonormality for inputs of
/// [`complete_symplectic`].
pub const ORTHONORMAL_TOL: f64 = 1e-9;

/// `A = U diag(S) V*` with `U in Sp(m)`, `V in Sp(n)` and `S` descending.
#[derive(Clone, Debug, Serialize)]
pub struct Svd {
    pub u: QMatrix,
    pub s: Vec<f64>,
    pub v: QMatrix,
}

impl Svd {
    /// `U diag(S) V*`, with the diagonal padded to the input's shape.
    pub fn reconstruct(&self) -> QMatrix {
        let sigma = QMatrix::real_diagonal(self.u.rows(), self.v.rows(), &self.s);
        &(&self.u * &sigma) * &self.v.adjoint()
    }

    /// Thin left factor: the first `min(m, n)` columns of `U`.
    pub fn u_thin(&self) -> QMatrix {
        self.u.block(0, 0, self.u.rows(), self.s.len())
    }

    /// Thin right factor: the first `min(m, n)` columns of `V`.
    pub fn v_thin(&self) -> QMatrix {
        self.v.block(0, 0, self.v.rows(), self.s.len())
    }
}

type Column = Vec<Quaternion>;

/// Hermitian product `a* b` of two columns.
#[inline]
fn hdot(a: &[Quaternion], b: &[Quaternion]) -> Quaternion {
    a.iter()
        .zip(b)
        .fold(Quaternion::ZERO, |acc, (&x, &y)| acc + x.conj() * y)
}

#[inline]
fn col_norm_sqr(a: &[Quaternion]) -> f64 {
    a.iter().map(|q| q.norm_sqr()).sum()
}

/// `a <- a - b c` for a column `b` and quaternion `c`.
#[inline]
fn axpy_right(a: &mut [Quaternion], b: &[Quaternion], c: Quaternion) {
    for (x, &y) in a.iter_mut().zip(b) {
        *x -= y * c;
    }
}

fn columns_of(a: &QMatrix) -> Vec<Column> {
    (0..a.cols())
        .map(|j| (0..a.rows()).map(|i| a.get(i, j)).collect())
        .collect()
}

fn from_columns(rows: usize, cols: &[Column]) -> QMatrix {
    QMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i])
}

/// Projects `v` off the span of the orthonormal `basis`, twice.
fn project_out(v: &mut [Quaternion], basis: &[Column]) {
    for _ in 0..2 {
        for b in basis {
            let c = hdot(b, v);
            axpy_right(v, b, c);
        }
    }
}

/// Modified Gram-Schmidt over the right H-module, with a second
/// orthogonalization pass. Fails if a column is (numerically) in the span
/// of the previous ones.
pub fn orthonormalize_columns(a: &QMatrix) -> Result<QMatrix> {
    let mut basis: Vec<Column> = Vec::with_capacity(a.cols());
    for mut v in columns_of(a) {
        let before = col_norm_sqr(&v).sqrt();
        project_out(&mut v, &basis);
        let norm = col_norm_sqr(&v).sqrt();
        if norm <= 1e-12 * before.max(f64::MIN_POSITIVE) || norm == 0.0 {
            return Err(Error::RankDeficient { sigma_min: norm });
        }
        v.iter_mut().for_each(|q| *q = *q / norm);
        basis.push(v);
    }
    Ok(from_columns(a.rows(), &basis))
}

/// Orthonormal basis of the orthogonal complement of the columns of `q`,
/// returned as an `m x (m - j)` matrix. Candidates are drawn from the
/// standard basis in order.
pub fn orthonormal_complement(q: &QMatrix) -> Result<QMatrix> {
    let m = q.rows();
    let mut basis = columns_of(q);
    let mut extra: Vec<Column> = Vec::with_capacity(m.saturating_sub(q.cols()));
    for e in 0..m {
        if basis.len() == m {
            break;
        }
        let mut v = vec![Quaternion::ZERO; m];
        v[e] = Quaternion::ONE;
        project_out(&mut v, &basis);
        let norm = col_norm_sqr(&v).sqrt();
        if norm < COMPLETION_PIVOT {
            continue;
        }
        v.iter_mut().for_each(|x| *x = *x / norm);
        basis.push(v.clone());
        extra.push(v);
    }
    if basis.len() != m {
        return Err(Error::RankDeficient { sigma_min: 0.0 });
    }
    Ok(from_columns(m, &extra))
}

/// Extends `q` (orthonormal columns, `m x j`) to an element of `Sp(m)`
/// whose last `j` columns are exactly `q`.
pub fn complete_symplectic(q: &QMatrix) -> Result<QMatrix> {
    if q.cols() > q.rows() {
        return Err(Error::InvalidArgument(format!(
            "cannot complete {} columns in H^{}",
            q.cols(),
            q.rows()
        )));
    }
    let residual = q.orthonormality_residual();
    if residual > ORTHONORMAL_TOL {
        return Err(Error::NotOrthonormal { residual });
    }
    QMatrix::hstack(&orthonormal_complement(q)?, q)
}

/// Singular value decomposition of an arbitrary quaternionic matrix.
pub fn svd(a: &QMatrix) -> Result<Svd> {
    if !a.is_finite() {
        return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
    }
    if a.rows() < a.cols() {
        let t = svd_tall(&a.adjoint())?;
        return Ok(Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        });
    }
    svd_tall(a)
}

/// One-sided Jacobi for `rows >= cols`.
fn svd_tall(a: &QMatrix) -> Result<Svd> {
    let (m, n) = a.shape();
    let mut w = columns_of(a);
    let mut v = columns_of(&QMatrix::identity(n));
    let scale = a.norm_sqr().max(1.0);

    let mut converged = n < 2;
    let mut off = 0.0;
    let mut sweeps = 0;
    while !converged {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off });
        }
        sweeps += 1;
        off = 0.0;
        let mut rotated = false;
        for i in 0..n - 1 {
            for j in i + 1..n {
                let alpha = col_norm_sqr(&w[i]);
                let beta = col_norm_sqr(&w[j]);
                let gamma = hdot(&w[i], &w[j]);
                let g = gamma.norm();
                off += 2.0 * g * g;
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // make w_i* w_j real and positive
                let phase = (gamma / g).conj();
                w[j].iter_mut().for_each(|x| *x = *x * phase);
                v[j].iter_mut().for_each(|x| *x = *x * phase);

                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, i, j, c, s);
                rotate(&mut v, i, j, c, s);
            }
        }
        converged = !rotated || off.sqrt() <= JACOBI_OFF_TOL * scale;
    }

    let sigma: Vec<f64> = w.iter().map(|c| col_norm_sqr(c).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| sigma[y].total_cmp(&sigma[x]));
    let s: Vec<f64> = order.iter().map(|&j| sigma[j]).collect();
    let v_sorted: Vec<Column> = order.iter().map(|&j| v[j].clone()).collect();

    // left singular vectors for the numerically nonzero values, the rest
    // from the orthogonal complement
    let s_max = s.first().copied().unwrap_or(0.0);
    let cutoff = (s_max * 1e-12).max(f64::MIN_POSITIVE);
    let mut u_cols: Vec<Column> = Vec::with_capacity(m);
    for (&j, &sj) in order.iter().zip(&s) {
        if sj <= cutoff {
            break;
        }
        u_cols.push(w[j].iter().map(|&x| x / sj).collect());
    }
    let rank = u_cols.len();
    let u_head = from_columns(m, &u_cols);
    let u = if rank < m {
        QMatrix::hstack(&u_head, &orthonormal_complement(&u_head)?)?
    } else {
        u_head
    };

    Ok(Svd {
        u,
        s,
        v: from_columns(n, &v_sorted),
    })
}

/// `(c_i, c_j) <- (c c_i - s c_j, s c_i + c c_j)`.
fn rotate(cols: &mut [Column], i: usize, j: usize, c: f64, s: f64) {
    let (lo, hi) = cols.split_at_mut(j);
    for (x, y) in lo[i].iter_mut().zip(hi[0].iter_mut()) {
        let (a, b) = (*x, *y);
        *x = a * c - b * s;
        *y = a * s + b * c;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{gaussian_matrix, rng_from_seed};

    fn check(a: &QMatrix, f: &Svd) {
        let res = f.reconstruct().dist(a).unwrap();
        assert!(res < 1e-9, "reconstruction residual {res}");
        assert!(f.u.orthonormality_residual() < 1e-10);
        assert!(f.v.orthonormality_residual() < 1e-10);
        assert!(f.s.windows(2).all(|w| w[0] >= w[1]));
        assert!(f.s.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn real_diagonal() {
        let a = QMatrix::from_real(2, 2, &[2.0, 0.0, 0.0, 1.0]).unwrap();
        let f = svd(&a).unwrap();
        assert_eq!(f.s, vec![2.0, 1.0]);
        assert_eq!(f.u, QMatrix::identity(2));
        assert_eq!(f.v, QMatrix::identity(2));
    }

    #[test]
    fn unit_scalar() {
        let a = QMatrix::scalar(Quaternion::I);
        let f = svd(&a).unwrap();
        assert!((f.s[0] - 1.0).abs() < 1e-15);
        let uv = &f.u * &f.v.adjoint();
        assert!(uv.dist(&a).unwrap() < 1e-15);
    }

    #[test]
    fn random_shapes() {
        let mut rng = rng_from_seed(11);
        for (m, n) in [(3, 2), (2, 3), (1, 4), (4, 1), (5, 5), (6, 3)] {
            let a = gaussian_matrix(&mut rng, m, n);
            let f = svd(&a).unwrap();
            assert_eq!(f.s.len(), m.min(n));
            check(&a, &f);
        }
    }

    #[test]
    fn rank_deficient_input() {
        let mut rng = rng_from_seed(12);
        let b = gaussian_matrix(&mut rng, 5, 2);
        let c = gaussian_matrix(&mut rng, 2, 4);
        let a = &b * &c;
        let f = svd(&a).unwrap();
        check(&a, &f);
        assert!(f.s[2] < 1e-12 && f.s[1] > 1e-3);

        let z = QMatrix::zeros(3, 2);
        let f = svd(&z).unwrap();
        check(&z, &f);
        assert_eq!(f.s, vec![0.0, 0.0]);
    }

    #[test]
    fn singular_values_of_adjoint_agree() {
        let mut rng = rng_from_seed(13);
        let a = gaussian_matrix(&mut rng, 4, 3);
        let s1 = svd(&a).unwrap().s;
        let s2 = svd(&a.adjoint()).unwrap().s;
        for (x, y) in s1.iter().zip(&s2) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn completion_keeps_last_columns() {
        let id = QMatrix::identity(4);
        assert_eq!(complete_symplectic(&id).unwrap(), id);

        let mut e = QMatrix::zeros(3, 1);
        e.set(2, 0, Quaternion::ONE);
        let m = complete_symplectic(&e).unwrap();
        assert!(m.orthonormality_residual() < 1e-10);
        assert_eq!(m.column(2), e);

        let mut rng = rng_from_seed(14);
        let q = orthonormalize_columns(&gaussian_matrix(&mut rng, 5, 2)).unwrap();
        let m = complete_symplectic(&q).unwrap();
        assert!(m.orthonormality_residual() < 1e-12);
        assert_eq!(m.block(0, 3, 5, 2), q);
    }

    #[test]
    fn completion_rejects_non_orthonormal() {
        let a = QMatrix::from_real(2, 1, &[1.0, 1.0]).unwrap();
        assert!(matches!(
            complete_symplectic(&a),
            Err(Error::NotOrthonormal { .. })
        ));
    }
}
