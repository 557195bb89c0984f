//! Seeded random vectors and rotations. Every randomized routine in the
//! crate draws from a `ChaCha8Rng` built here so results depend only on the
//! seed.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut SeededRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Uniform on the unit sphere `S^{n-1}`.
pub fn unit_vector(rng: &mut SeededRng, n: usize) -> Vec<f64> {
    loop {
        let v = gaussian(rng, n);
        let r = linalg::norm(&v);
        if r > 1e-6 {
            return linalg::scale(&v, 1.0 / r);
        }
    }
}

/// `(r, r u)` with `u` uniform on the spatial sphere and `r` in `(0, 1]`.
pub fn null_vector(rng: &mut SeededRng, q: usize) -> Vec<f64> {
    let r: f64 = rng.random_range(0.05..=1.0);
    let u = unit_vector(rng, q);
    let mut v = vec![r];
    v.extend(u.iter().map(|x| r * x));
    v
}

/// Interior vector `(|y| + margin, y)` with a strictly positive margin.
pub fn interior_vector(rng: &mut SeededRng, q: usize) -> Vec<f64> {
    let y: Vec<f64> = gaussian(rng, q);
    let margin: f64 = rng.random_range(1e-3..2.0) * (1.0 + linalg::norm(&y));
    let mut v = vec![linalg::norm(&y) + margin];
    v.extend(y);
    v
}

/// A rotation in `SO(n)` drawn from the QR factorization of a Gaussian
/// matrix with sign correction.
pub fn rotation(rng: &mut SeededRng, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut qm = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                qm[(i, j)] = -qm[(i, j)];
            }
        }
    }
    if qm.determinant() < 0.0 {
        for i in 0..n {
            qm[(i, 0)] = -qm[(i, 0)];
        }
    }
    qm
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotations_are_special_orthogonal() {
        let mut r = rng(7);
        for n in 1..5 {
            let m = rotation(&mut r, n);
            let err = linalg::max_abs_diff(&(m.transpose() * &m), &DMatrix::identity(n, n));
            assert!(err < 1e-12);
            assert!((m.determinant() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn same_seed_same_stream() {
        assert_eq!(gaussian(&mut rng(3), 5), gaussian(&mut rng(3), 5));
    }
}
