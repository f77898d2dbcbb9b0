//! Seeded random matrices for experiments and tests.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::max_hermitian_eigenvalue;
use crate::matrix::{ComplexMatrix, StateVector};
use crate::scalar::Real;

/// Deterministic generator used by every sampler here.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn entry<R: Real>(rng: &mut ChaCha8Rng) -> Complex<R> {
    Complex::new(R::lit(rng.gen_range(-1.0..1.0)), R::lit(rng.gen_range(-1.0..1.0)))
}

/// Entries with real and imaginary parts uniform on `[-1, 1)`.
pub fn random_matrix<R: Real>(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix<R> {
    ComplexMatrix::from_fn(dim, |_, _| entry(rng))
}

/// Real entries uniform on `[-1, 1)`.
pub fn random_real_matrix<R: Real>(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix<R> {
    ComplexMatrix::from_fn(dim, |_, _| Complex::new(R::lit(rng.gen_range(-1.0..1.0)), R::zero()))
}

/// `(M + M*)/2` for a random `M`.
pub fn random_hermitian<R: Real>(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix<R> {
    random_matrix::<R>(dim, rng).hermitian_part()
}

/// Random matrix shifted so that its Hermitian part is `≤ −margin`.
pub fn random_dissipative<R: Real>(dim: usize, margin: R, rng: &mut ChaCha8Rng) -> ComplexMatrix<R> {
    let mut m = random_matrix::<R>(dim, rng);
    let top = max_hermitian_eigenvalue(&m).expect("finite random matrix");
    let shift = top + margin;
    for i in 0..dim {
        m[(i, i)] -= Complex::new(shift, R::zero());
    }
    m
}

/// Unit vector with random complex entries.
pub fn random_unit_vector<R: Real>(dim: usize, rng: &mut ChaCha8Rng) -> StateVector<R> {
    StateVector::from_vec((0..dim).map(|_| entry(rng)).collect()).normalized()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::is_dissipative;

    #[test]
    fn dissipative_sampler_respects_margin() {
        let mut r = rng(7);
        for _ in 0..10 {
            let a = random_dissipative::<f64>(4, 0.1, &mut r);
            let d = is_dissipative(&a, 0.0);
            assert!(d.dissipative);
            assert!((d.margin + 0.1).abs() < 1e-12);
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        let a = random_matrix::<f64>(3, &mut rng(42));
        let b = random_matrix::<f64>(3, &mut rng(42));
        assert_eq!(a, b);
    }
}
