//! Seeded Gaussian sampling. Every random routine in the crate takes an
//! explicit seed and builds its own generator; there is no global state.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matrix::QMatrix;
use crate::quaternion::Quaternion;
use crate::svd::orthonormalize_columns;

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Quaternion with four independent standard normal components.
pub fn gaussian_quaternion<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    Quaternion::new(
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
    )
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> QMatrix {
    QMatrix::from_fn(rows, cols, |_, _| gaussian_quaternion(rng))
}

/// Unit quaternion, uniform on `S^3`.
pub fn unit_quaternion<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    loop {
        if let Some(u) = gaussian_quaternion(rng).normalize() {
            return u;
        }
    }
}

/// Element of `Sp(n)` from Gram-Schmidt on a Gaussian matrix.
pub fn random_symplectic<R: Rng + ?Sized>(rng: &mut R, n: usize) -> QMatrix {
    loop {
        // a Gaussian draw is rank deficient with probability zero
        if let Ok(q) = orthonormalize_columns(&gaussian_matrix(rng, n, n)) {
            return q;
        }
    }
}
