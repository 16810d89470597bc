//! Shared helpers for unit tests: seeded random matrices and states.

use crate::linalg::ComplexMatrix;
use crate::state::{DensityMatrix, PureState};
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    let entries = (0..dim * dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    ComplexMatrix::new(dim, entries).unwrap()
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    let m = random_matrix(rng, dim);
    m.add(&m.adjoint()).unwrap().scale_re(0.5)
}

/// Random density matrix with unit trace: B B^dagger normalized.
pub fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> DensityMatrix {
    let b = random_matrix(rng, dim);
    let psd = b.matmul(&b.adjoint()).unwrap();
    let tr = psd.trace_re();
    DensityMatrix::new(psd.scale_re(1.0 / tr)).unwrap()
}

/// Random normalized pure state.
pub fn random_pure(rng: &mut ChaCha8Rng, dim: usize) -> PureState {
    loop {
        let v: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            let v = v.into_iter().map(|z| z / norm).collect();
            return PureState::new(v).unwrap();
        }
    }
}
