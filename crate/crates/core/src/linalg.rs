//! Dense complex matrix arithmetic, Hermitian eigendecomposition, tensor
//! products and norms.
//!
//! Everything downstream (states, channels, orders, the interpreter) runs on
//! [`ComplexMatrix`]. Matrices are square, dense, row-major and immutable in
//! practice: all operations return fresh values. Dimensions stay small
//! (qubit registers, dim <= 16), so the eigensolver is a cyclic Jacobi sweep
//! with no external dependency.

use num_complex::Complex64;
use thiserror::Error;

/// Default number of Jacobi sweeps before giving up.
const JACOBI_SWEEP_CAP: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not Hermitian: max |m - m^dagger| = {deviation:e} exceeds {tol:e}")]
    NotHermitian { deviation: f64, tol: f64 },
    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("dimension mismatch: {a} vs {b}")]
    DimMismatch { a: usize, b: usize },
    #[error("non-finite entry at ({row},{col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix dimension must be at least 1")]
    EmptyMatrix,
}

/// Dense square matrix of complex numbers, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries; rejects non-finite values.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self, LinalgError> {
        if dim == 0 {
            return Err(LinalgError::EmptyMatrix);
        }
        assert_eq!(entries.len(), dim * dim, "entry count must be dim^2");
        for (k, z) in entries.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(LinalgError::NonFinite {
                    row: k / dim,
                    col: k % dim,
                });
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Diagonal matrix from real entries.
    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    /// Rank-1 outer product v * v^dagger.
    pub fn outer(v: &[Complex64]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_dim(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            dim: self.dim,
            entries,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_dim(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            dim: self.dim,
            entries,
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * c).collect(),
        }
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_dim(other)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Real part of the trace; the imaginary part of Hermitian traces is noise.
    pub fn trace_re(&self) -> f64 {
        self.trace().re
    }

    /// Largest entry magnitude, max over |m_ij|.
    pub fn max_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max-norm of the difference.
    pub fn max_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Hermitian deviation max |m_ij - conj(m_ji)|.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// Applies the matrix to a column vector.
    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for i in 0..self.dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.dim {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    fn check_dim(&self, other: &Self) -> Result<(), LinalgError> {
        if self.dim != other.dim {
            return Err(LinalgError::DimMismatch {
                a: self.dim,
                b: other.dim,
            });
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.dim + j]
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are real and sorted descending; the columns of `eigenvectors`
/// are the matching orthonormal eigenvectors, so
/// `eigenvectors * diag(eigenvalues) * eigenvectors^dagger` reconstructs the
/// input.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    /// Column `k` of the eigenvector matrix.
    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        let n = self.eigenvectors.dim();
        (0..n).map(|i| self.eigenvectors[(i, k)]).collect()
    }

    /// V * diag(lambda) * V^dagger.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.eigenvectors.dim();
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.eigenvectors[(i, k)]
                        * self.eigenvalues[k]
                        * self.eigenvectors[(j, k)].conj();
                }
                out[(i, j)] = acc;
            }
        }
        out
    }
}

/// Diagonalizes a Hermitian matrix by cyclic Jacobi rotations.
///
/// `tol` bounds the accepted Hermitian deviation of the input; the rotation
/// loop itself runs to machine precision. Sweep cap is 100.
pub fn hermitian_eig(m: &ComplexMatrix, tol: f64) -> Result<Spectrum, LinalgError> {
    let dev = m.hermitian_deviation();
    if dev > tol {
        return Err(LinalgError::NotHermitian {
            deviation: dev,
            tol,
        });
    }
    let n = m.dim();
    // Work on the Hermitian average so roundoff in the input cannot leak
    // imaginary parts onto the diagonal.
    let mut a = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
        }
    }
    let mut v = ComplexMatrix::identity(n);

    let scale = a.max_norm().max(1e-300);
    let stop = scale * 1e-15;

    let mut converged = false;
    for _sweep in 0..JACOBI_SWEEP_CAP {
        let mut off: f64 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[(p, q)].norm());
            }
        }
        if off <= stop {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let b = apq.norm();
                if b <= stop * 1e-2 {
                    continue;
                }
                // Phase that makes the pivot real, then a real Jacobi angle.
                let phase = apq / b;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * b);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // Columns: A <- A J with J = [[c, s*phase], [-s*conj(phase), c]]
                // acting on (p, q).
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * c - aiq * s * phase.conj();
                    a[(i, q)] = aip * s * phase + aiq * c;
                }
                // Rows: A <- J^dagger A.
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = apj * c - aqj * s * phase;
                    a[(q, j)] = apj * s * phase.conj() + aqj * c;
                }
                // Accumulate eigenvectors: V <- V J.
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * c - viq * s * phase.conj();
                    v[(i, q)] = vip * s * phase + viq * c;
                }
            }
        }
    }
    if !converged {
        return Err(LinalgError::NoConvergence {
            sweeps: JACOBI_SWEEP_CAP,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let eigs: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| eigs[j].partial_cmp(&eigs[i]).unwrap());

    let mut vectors = ComplexMatrix::zeros(n);
    let mut values = Vec::with_capacity(n);
    for (col, &k) in order.iter().enumerate() {
        values.push(eigs[k]);
        for i in 0..n {
            vectors[(i, col)] = v[(i, k)];
        }
    }
    Ok(Spectrum {
        eigenvalues: values,
        eigenvectors: vectors,
    })
}

/// Kronecker product with `a`'s index as the major index:
/// `out[(i1*db + i2, j1*db + j2)] = a[(i1, j1)] * b[(i2, j2)]`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let da = a.dim();
    let db = b.dim();
    let mut out = ComplexMatrix::zeros(da * db);
    for i1 in 0..da {
        for j1 in 0..da {
            let f = a[(i1, j1)];
            if f.norm_sqr() == 0.0 {
                continue;
            }
            for i2 in 0..db {
                for j2 in 0..db {
                    out[(i1 * db + i2, j1 * db + j2)] = f * b[(i2, j2)];
                }
            }
        }
    }
    out
}

/// Trace distance (1/2) sum |lambda_i(a - b)| between Hermitian matrices.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64, LinalgError> {
    if a.dim() != b.dim() {
        return Err(LinalgError::DimMismatch {
            a: a.dim(),
            b: b.dim(),
        });
    }
    let diff = a.sub(b)?;
    let spec = hermitian_eig(&diff, crate::DEFAULT_TOL)?;
    Ok(0.5 * spec.eigenvalues.iter().map(|l| l.abs()).sum::<f64>())
}

/// True when `m` is PSD up to `tol`: Hermitian and all eigenvalues >= -tol.
pub fn is_psd(m: &ComplexMatrix, tol: f64) -> bool {
    match hermitian_eig(m, tol.max(crate::DEFAULT_TOL)) {
        Ok(spec) => spec.eigenvalues.iter().all(|&l| l >= -tol),
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub(crate) fn random_matrix(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
        let entries = (0..dim * dim)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        ComplexMatrix::new(dim, entries).unwrap()
    }

    pub(crate) fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
        let m = random_matrix(rng, dim);
        m.add(&m.adjoint()).unwrap().scale_re(0.5)
    }

    #[test]
    fn eig_already_diagonal() {
        let m = ComplexMatrix::diag(&[1.0, 0.0]);
        let spec = hermitian_eig(&m, 1e-9).unwrap();
        assert_eq!(spec.eigenvalues, vec![1.0, 0.0]);
        assert!(spec.eigenvectors.max_diff(&ComplexMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn eig_identity() {
        let spec = hermitian_eig(&ComplexMatrix::identity(2), 1e-9).unwrap();
        assert!((spec.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!((spec.eigenvalues[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_plus_projector() {
        // (1/2) [[1,1],[1,1]] has eigenvalues 1 and 0 (characteristic
        // polynomial lambda^2 - lambda = 0).
        let m = ComplexMatrix::new(2, vec![c(0.5, 0.0); 4]).unwrap();
        let spec = hermitian_eig(&m, 1e-9).unwrap();
        assert!((spec.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!(spec.eigenvalues[1].abs() < 1e-12);
        assert!(spec.reconstruct().max_diff(&m) < 1e-12);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::new(2, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        assert!(matches!(
            hermitian_eig(&m, 1e-9),
            Err(LinalgError::NotHermitian { .. })
        ));
    }

    #[test]
    fn eig_reconstruction_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let dim = rng.gen_range(2..=8);
            let m = random_hermitian(&mut rng, dim);
            let spec = hermitian_eig(&m, 1e-9).unwrap();
            assert!(spec.reconstruct().max_diff(&m) < 1e-9);
            // V^dagger V = I
            let vtv = spec.eigenvectors.adjoint().matmul(&spec.eigenvectors).unwrap();
            assert!(vtv.max_diff(&ComplexMatrix::identity(dim)) < 1e-9);
            // sorted descending
            for w in spec.eigenvalues.windows(2) {
                assert!(w[0] >= w[1] - 1e-12);
            }
        }
    }

    #[test]
    fn tensor_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert!(tensor(&i2, &i2).max_diff(&ComplexMatrix::identity(4)) == 0.0);
        let p = ComplexMatrix::diag(&[1.0, 0.0]);
        assert!(tensor(&p, &p).max_diff(&ComplexMatrix::diag(&[1.0, 0.0, 0.0, 0.0])) == 0.0);
    }

    #[test]
    fn tensor_mixed_product_and_associativity() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let a = random_matrix(&mut rng, 2);
            let b = random_matrix(&mut rng, 2);
            let cm = random_matrix(&mut rng, 2);
            let d = random_matrix(&mut rng, 2);
            // (a (x) b)(c (x) d) = (ac) (x) (bd)
            let lhs = tensor(&a, &b).matmul(&tensor(&cm, &d)).unwrap();
            let rhs = tensor(&a.matmul(&cm).unwrap(), &b.matmul(&d).unwrap());
            assert!(lhs.max_diff(&rhs) < 1e-12);
            // associativity of the block layout, within float reassociation
            let t1 = tensor(&tensor(&a, &b), &cm);
            let t2 = tensor(&a, &tensor(&b, &cm));
            assert!(t1.max_diff(&t2) < 1e-15);
        }
        // on matrices with entries in {0, +-1, +-1/sqrt(2), i} the products
        // reassociate exactly
        let h = ComplexMatrix::new(
            2,
            vec![
                c(FRAC_1_SQRT_2, 0.0),
                c(FRAC_1_SQRT_2, 0.0),
                c(FRAC_1_SQRT_2, 0.0),
                c(-FRAC_1_SQRT_2, 0.0),
            ],
        )
        .unwrap();
        let x = ComplexMatrix::new(2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        let p = ComplexMatrix::new(2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)])
            .unwrap();
        let t1 = tensor(&tensor(&h, &x), &p);
        let t2 = tensor(&h, &tensor(&x, &p));
        assert!(t1.max_diff(&t2) == 0.0);
    }

    #[test]
    fn trace_distance_examples() {
        let rho = ComplexMatrix::new(2, vec![c(0.5, 0.0); 4]).unwrap();
        assert!(trace_distance(&rho, &rho).unwrap().abs() < 1e-12);

        let p0 = ComplexMatrix::diag(&[1.0, 0.0]);
        let p1 = ComplexMatrix::diag(&[0.0, 1.0]);
        // eigenvalues of the difference are +1 and -1
        assert!((trace_distance(&p0, &p1).unwrap() - 1.0).abs() < 1e-12);

        let half = ComplexMatrix::diag(&[0.5, 0.5]);
        // eigenvalues of the difference are +1/2 and -1/2
        assert!((trace_distance(&p0, &half).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn trace_distance_triangle_inequality() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let dim = rng.gen_range(2..=4);
            let a = random_hermitian(&mut rng, dim);
            let b = random_hermitian(&mut rng, dim);
            let cm = random_hermitian(&mut rng, dim);
            let ab = trace_distance(&a, &b).unwrap();
            let bc = trace_distance(&b, &cm).unwrap();
            let ac = trace_distance(&a, &cm).unwrap();
            assert!(ac <= ab + bc + 1e-9);
            // symmetry
            assert!((ab - trace_distance(&b, &a).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn dim_mismatch_is_reported() {
        let a = ComplexMatrix::identity(2);
        let b = ComplexMatrix::identity(4);
        assert!(matches!(
            trace_distance(&a, &b),
            Err(LinalgError::DimMismatch { a: 2, b: 4 })
        ));
    }

    #[test]
    fn non_finite_rejected() {
        let e = ComplexMatrix::new(1, vec![c(f64::NAN, 0.0)]);
        assert!(matches!(e, Err(LinalgError::NonFinite { .. })));
    }
}
