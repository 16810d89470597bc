//! Density matrices, the named gate set, Kraus channels and measurement.
//!
//! States are first-class sub-normalized: the while-loop semantics
//! accumulates sub-probability mass, so [`DensityMatrix`] admits any trace in
//! `[0, 1]` and invariants are stated on trace <= 1. Qubit index 0 is the
//! leftmost tensor factor of `|q0 q1 ...>`; CNOT targets are
//! `(control, target)` in that order.

use crate::linalg::{self, ComplexMatrix, LinalgError};
use num_complex::Complex64;
use thiserror::Error;

/// 1/sqrt(2) to 17 significant digits.
const SQRT1_2: f64 = 0.70710678118654752;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("state is not normalized: norm = {norm}")]
    NotNormalized { norm: f64 },
    #[error("dimension must be a power of two, got {dim}")]
    NotPowerOfTwo { dim: usize },
    #[error("matrix is not a valid density matrix: {reason}")]
    NotDensity { reason: String },
    #[error("bad gate targets: {0}")]
    BadTargets(String),
    #[error("dimension mismatch: {a} vs {b}")]
    DimMismatch { a: usize, b: usize },
    #[error("measurement outcome has probability {p:e}, below cutoff")]
    ZeroProbability { p: f64 },
    #[error("operator is not an orthogonal projection: deviation {deviation:e}")]
    NotProjection { deviation: f64 },
    #[error("Kraus channel must have at least one operator")]
    EmptyChannel,
    #[error("Kraus operators exceed the identity: min eigenvalue of I - sum M^dagger M is {min_eig:e}")]
    ChannelExceedsIdentity { min_eig: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Normalized pure state on a power-of-two dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self, StateError> {
        let dim = amplitudes.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(StateError::NotPowerOfTwo { dim });
        }
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > crate::DEFAULT_TOL {
            return Err(StateError::NotNormalized { norm });
        }
        Ok(Self { amplitudes })
    }

    /// Computational basis state `|index>` on `n` qubits.
    pub fn basis(n: usize, index: usize) -> Self {
        let dim = 1usize << n;
        assert!(index < dim, "basis index out of range");
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    /// `|0...0>` on `n` qubits.
    pub fn zero(n: usize) -> Self {
        Self::basis(n, 0)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn qubits(&self) -> usize {
        self.amplitudes.len().trailing_zeros() as usize
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Norm distance after minimizing over a global phase:
    /// `min_{|c|=1} ||a - c b||`. Computed as
    /// `sqrt(||a||^2 + ||b||^2 - 2 |<a|b>|)` so that identical inputs give
    /// exactly zero; physically identical states have distance ~0.
    pub fn phase_distance(&self, other: &Self) -> f64 {
        let na: f64 = self.amplitudes.iter().map(|z| z.norm_sqr()).sum();
        let nb: f64 = other.amplitudes.iter().map(|z| z.norm_sqr()).sum();
        let overlap = self.inner(other).norm();
        (na + nb - 2.0 * overlap).max(0.0).sqrt()
    }

    /// Applies a unitary to the state vector.
    pub fn apply_matrix(&self, u: &ComplexMatrix) -> Self {
        assert_eq!(u.dim(), self.dim());
        Self {
            amplitudes: u.mul_vec(&self.amplitudes),
        }
    }
}

/// Hermitian PSD matrix with trace in `[0, 1]`; sub-normalized states are
/// legal mid-computation.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Full validation: Hermitian within 1e-9, eigenvalues >= -1e-9,
    /// 0 <= trace <= 1 + 1e-9.
    pub fn new(mat: ComplexMatrix) -> Result<Self, StateError> {
        let tol = crate::DEFAULT_TOL;
        let dev = mat.hermitian_deviation();
        if dev > tol {
            return Err(StateError::NotDensity {
                reason: format!("Hermitian deviation {dev:e}"),
            });
        }
        let tr = mat.trace_re();
        if !(-tol..=1.0 + tol).contains(&tr) {
            return Err(StateError::NotDensity {
                reason: format!("trace {tr} outside [0, 1]"),
            });
        }
        let spec = linalg::hermitian_eig(&mat, tol)?;
        if let Some(&min) = spec
            .eigenvalues
            .iter()
            .min_by(|a, b| a.partial_cmp(b).unwrap())
        {
            if min < -tol {
                return Err(StateError::NotDensity {
                    reason: format!("negative eigenvalue {min:e}"),
                });
            }
        }
        Ok(Self { mat })
    }

    /// Wraps the output of a CP-map step. The operations in this module
    /// preserve Hermiticity and positivity exactly up to roundoff, so only
    /// the cheap checks run here; the full eigenvalue check stays in `new`.
    pub(crate) fn from_op_output(mat: ComplexMatrix) -> Self {
        debug_assert!(mat.hermitian_deviation() <= 1e-7);
        Self { mat }
    }

    pub fn zero_state(n: usize) -> Self {
        density_of(&PureState::zero(n))
    }

    /// All-zero matrix (the empty sub-probability state).
    pub fn null(dim: usize) -> Self {
        Self {
            mat: ComplexMatrix::zeros(dim),
        }
    }

    /// Diagonal density matrix from a sub-probability vector.
    pub fn from_diagonal(probs: &[f64]) -> Self {
        Self {
            mat: ComplexMatrix::diag(probs),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn qubits(&self) -> usize {
        self.mat.dim().trailing_zeros() as usize
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace_re()
    }

    /// Diagonal entries (real parts).
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.mat[(i, i)].re).collect()
    }

    pub fn add(&self, other: &Self) -> Result<Self, StateError> {
        Ok(Self {
            mat: self.mat.add(&other.mat)?,
        })
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            mat: self.mat.scale_re(c),
        }
    }

    pub fn trace_distance(&self, other: &Self) -> Result<f64, StateError> {
        Ok(linalg::trace_distance(&self.mat, &other.mat)?)
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>, StateError> {
        Ok(linalg::hermitian_eig(&self.mat, crate::DEFAULT_TOL)?.eigenvalues)
    }
}

/// The named gate set: matrices exactly as commonly tabulated, including
/// global phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    H,
    X,
    P,
    T,
    Cnot,
}

impl Gate {
    pub const ALL: [Gate; 5] = [Gate::H, Gate::X, Gate::P, Gate::T, Gate::Cnot];

    pub fn name(&self) -> &'static str {
        match self {
            Gate::H => "H",
            Gate::X => "X",
            Gate::P => "P",
            Gate::T => "T",
            Gate::Cnot => "CNOT",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "H" => Some(Gate::H),
            "X" => Some(Gate::X),
            "P" => Some(Gate::P),
            "T" => Some(Gate::T),
            "CNOT" => Some(Gate::Cnot),
            _ => None,
        }
    }

    /// Number of qubits the gate acts on.
    pub fn arity(&self) -> usize {
        match self {
            Gate::Cnot => 2,
            _ => 1,
        }
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        match self {
            Gate::H => ComplexMatrix::new(
                2,
                vec![
                    c(SQRT1_2, 0.0),
                    c(SQRT1_2, 0.0),
                    c(SQRT1_2, 0.0),
                    c(-SQRT1_2, 0.0),
                ],
            )
            .unwrap(),
            Gate::X => ComplexMatrix::new(
                2,
                vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            )
            .unwrap(),
            Gate::P => ComplexMatrix::new(
                2,
                vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)],
            )
            .unwrap(),
            Gate::T => ComplexMatrix::new(
                2,
                vec![
                    c(1.0, 0.0),
                    c(0.0, 0.0),
                    c(0.0, 0.0),
                    c(SQRT1_2, SQRT1_2),
                ],
            )
            .unwrap(),
            Gate::Cnot => {
                let mut m = ComplexMatrix::zeros(4);
                m[(0, 0)] = c(1.0, 0.0);
                m[(1, 1)] = c(1.0, 0.0);
                m[(2, 3)] = c(1.0, 0.0);
                m[(3, 2)] = c(1.0, 0.0);
                m
            }
        }
    }
}

/// List of Kraus operators `{M_m}` of equal dimension. A complete channel
/// has `sum M^dagger M = I`; sub-normalized channels (projections) may fall
/// short of the identity but never exceed it.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    operators: Vec<ComplexMatrix>,
}

impl KrausChannel {
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self, StateError> {
        let first = operators.first().ok_or(StateError::EmptyChannel)?;
        let dim = first.dim();
        let mut sum = ComplexMatrix::zeros(dim);
        for m in &operators {
            if m.dim() != dim {
                return Err(StateError::DimMismatch { a: dim, b: m.dim() });
            }
            sum = sum.add(&m.adjoint().matmul(m)?)?;
        }
        let deficiency = ComplexMatrix::identity(dim).sub(&sum)?;
        let spec = linalg::hermitian_eig(&deficiency, crate::DEFAULT_TOL)?;
        let min_eig = spec.eigenvalues.last().copied().unwrap_or(0.0);
        if min_eig < -crate::DEFAULT_TOL {
            return Err(StateError::ChannelExceedsIdentity { min_eig });
        }
        Ok(Self { operators })
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn dim(&self) -> usize {
        self.operators[0].dim()
    }

    /// True when `sum M^dagger M = I` within `tol`.
    pub fn is_complete(&self, tol: f64) -> bool {
        let dim = self.dim();
        let mut sum = ComplexMatrix::zeros(dim);
        for m in &self.operators {
            sum = sum.add(&m.adjoint().matmul(m).unwrap()).unwrap();
        }
        sum.max_diff(&ComplexMatrix::identity(dim)) <= tol
    }
}

/// `|psi><psi|`.
pub fn density_of(psi: &PureState) -> DensityMatrix {
    DensityMatrix::from_op_output(ComplexMatrix::outer(psi.amplitudes()))
}

/// Embeds a gate on the given target qubits inside an `n`-qubit register,
/// identity elsewhere. Targets must be distinct, in range, and match the
/// gate's arity.
pub fn embed_gate(g: Gate, targets: &[usize], n: usize) -> Result<ComplexMatrix, StateError> {
    if targets.len() != g.arity() {
        return Err(StateError::BadTargets(format!(
            "{} takes {} target(s), got {}",
            g.name(),
            g.arity(),
            targets.len()
        )));
    }
    for (k, &t) in targets.iter().enumerate() {
        if t >= n {
            return Err(StateError::BadTargets(format!(
                "target q{t} out of range for {n} qubit(s)"
            )));
        }
        if targets[..k].contains(&t) {
            return Err(StateError::BadTargets(format!("duplicate target q{t}")));
        }
    }
    let dim = 1usize << n;
    let gm = g.matrix();
    let arity = g.arity();
    let mut out = ComplexMatrix::zeros(dim);
    // Qubit i occupies bit (n-1-i) of the basis index: qubit 0 is leftmost.
    let bit = |q: usize| n - 1 - q;
    for col in 0..dim {
        let mut gin = 0usize;
        for (k, &t) in targets.iter().enumerate() {
            let b = (col >> bit(t)) & 1;
            gin |= b << (arity - 1 - k);
        }
        for gout in 0..(1usize << arity) {
            let entry = gm[(gout, gin)];
            if entry.norm_sqr() == 0.0 {
                continue;
            }
            let mut row = col;
            for (k, &t) in targets.iter().enumerate() {
                let b = (gout >> (arity - 1 - k)) & 1;
                row = (row & !(1 << bit(t))) | (b << bit(t));
            }
            out[(row, col)] = entry;
        }
    }
    Ok(out)
}

/// `U rho U^dagger` with `U` the gate embedded on `targets`.
pub fn apply_unitary(
    rho: &DensityMatrix,
    g: Gate,
    targets: &[usize],
    n: usize,
) -> Result<DensityMatrix, StateError> {
    if rho.dim() != (1usize << n) {
        return Err(StateError::DimMismatch {
            a: rho.dim(),
            b: 1usize << n,
        });
    }
    let u = embed_gate(g, targets, n)?;
    let out = u.matmul(rho.matrix())?.matmul(&u.adjoint())?;
    Ok(DensityMatrix::from_op_output(out))
}

/// `sum_m M_m rho M_m^dagger`.
pub fn apply_channel(rho: &DensityMatrix, ch: &KrausChannel) -> Result<DensityMatrix, StateError> {
    if rho.dim() != ch.dim() {
        return Err(StateError::DimMismatch {
            a: rho.dim(),
            b: ch.dim(),
        });
    }
    let mut acc = ComplexMatrix::zeros(rho.dim());
    for m in ch.operators() {
        acc = acc.add(&m.matmul(rho.matrix())?.matmul(&m.adjoint())?)?;
    }
    Ok(DensityMatrix::from_op_output(acc))
}

/// Probability `Tr(M^dagger M rho)` of outcome `m`, clipped to `[0, 1]` when
/// within 1e-9 of the bounds.
pub fn born_probability(rho: &DensityMatrix, m: &ComplexMatrix) -> Result<f64, StateError> {
    if rho.dim() != m.dim() {
        return Err(StateError::DimMismatch {
            a: rho.dim(),
            b: m.dim(),
        });
    }
    let p = m
        .adjoint()
        .matmul(m)?
        .matmul(rho.matrix())?
        .trace_re();
    let tol = crate::DEFAULT_TOL;
    if p < 0.0 && p >= -tol {
        return Ok(0.0);
    }
    if p > 1.0 && p <= 1.0 + tol {
        return Ok(1.0);
    }
    Ok(p)
}

/// Post-measurement state `M rho M^dagger / Tr(M^dagger M rho)`.
pub fn post_measurement_state(
    rho: &DensityMatrix,
    m: &ComplexMatrix,
) -> Result<DensityMatrix, StateError> {
    let p = born_probability(rho, m)?;
    if p <= 1e-12 {
        return Err(StateError::ZeroProbability { p });
    }
    let out = m.matmul(rho.matrix())?.matmul(&m.adjoint())?.scale_re(1.0 / p);
    Ok(DensityMatrix::from_op_output(out))
}

/// Gleason measure `Tr(rho P)` of the closed subspace with orthogonal
/// projection `P`.
pub fn gleason_measure(rho: &DensityMatrix, proj: &ComplexMatrix) -> Result<f64, StateError> {
    if rho.dim() != proj.dim() {
        return Err(StateError::DimMismatch {
            a: rho.dim(),
            b: proj.dim(),
        });
    }
    let herm = proj.hermitian_deviation();
    let idem = proj.matmul(proj)?.max_diff(proj);
    let deviation = herm.max(idem);
    if deviation > crate::DEFAULT_TOL {
        return Err(StateError::NotProjection { deviation });
    }
    Ok(rho.matrix().matmul(proj)?.trace_re())
}

/// Projector onto the span of computational basis states whose qubit `q`
/// equals `value`, inside an `n`-qubit register.
pub fn qubit_projector(q: usize, value: u8, n: usize) -> ComplexMatrix {
    assert!(q < n);
    let dim = 1usize << n;
    let mut p = ComplexMatrix::zeros(dim);
    let bit = n - 1 - q;
    for i in 0..dim {
        if ((i >> bit) & 1) as u8 == value {
            p[(i, i)] = Complex64::new(1.0, 0.0);
        }
    }
    p
}

/// Nonselective computational-basis measurement of qubit `q`:
/// `rho -> P0 rho P0 + P1 rho P1`.
pub fn measure_qubit(rho: &DensityMatrix, q: usize, n: usize) -> Result<DensityMatrix, StateError> {
    if rho.dim() != (1usize << n) {
        return Err(StateError::DimMismatch {
            a: rho.dim(),
            b: 1usize << n,
        });
    }
    if q >= n {
        return Err(StateError::BadTargets(format!(
            "measured qubit q{q} out of range for {n} qubit(s)"
        )));
    }
    let p0 = qubit_projector(q, 0, n);
    let p1 = qubit_projector(q, 1, n);
    let out = p0
        .matmul(rho.matrix())?
        .matmul(&p0)?
        .add(&p1.matmul(rho.matrix())?.matmul(&p1)?)?;
    Ok(DensityMatrix::from_op_output(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn plus() -> PureState {
        PureState::new(vec![c(SQRT1_2, 0.0), c(SQRT1_2, 0.0)]).unwrap()
    }

    #[test]
    fn gates_are_unitary() {
        for g in Gate::ALL {
            let m = g.matrix();
            let prod = m.adjoint().matmul(&m).unwrap();
            assert!(
                prod.max_diff(&ComplexMatrix::identity(m.dim())) < 1e-12,
                "{} not unitary",
                g.name()
            );
        }
    }

    #[test]
    fn density_of_examples() {
        let d = density_of(&PureState::basis(1, 0));
        assert!(d.matrix().max_diff(&ComplexMatrix::diag(&[1.0, 0.0])) == 0.0);

        let d = density_of(&plus());
        let expect = ComplexMatrix::new(2, vec![c(0.5, 0.0); 4]).unwrap();
        assert!(d.matrix().max_diff(&expect) < 1e-12);
        assert!((d.trace() - 1.0).abs() < 1e-12);

        // |01> on two qubits
        let d = density_of(&PureState::basis(2, 1));
        assert!(d.matrix().max_diff(&ComplexMatrix::diag(&[0.0, 1.0, 0.0, 0.0])) == 0.0);
    }

    #[test]
    fn apply_hadamard_to_zero() {
        let rho = DensityMatrix::zero_state(1);
        let out = apply_unitary(&rho, Gate::H, &[0], 1).unwrap();
        let expect = ComplexMatrix::new(2, vec![c(0.5, 0.0); 4]).unwrap();
        assert!(out.matrix().max_diff(&expect) < 1e-12);
        assert!((out.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cnot_flips_target_when_control_set() {
        // |10> -> |11>
        let rho = density_of(&PureState::basis(2, 2));
        let out = apply_unitary(&rho, Gate::Cnot, &[0, 1], 2).unwrap();
        let expect = density_of(&PureState::basis(2, 3));
        assert!(out.matrix().max_diff(expect.matrix()) == 0.0);
    }

    #[test]
    fn cnot_reversed_targets() {
        // control = q1: |01> -> |11>
        let rho = density_of(&PureState::basis(2, 1));
        let out = apply_unitary(&rho, Gate::Cnot, &[1, 0], 2).unwrap();
        let expect = density_of(&PureState::basis(2, 3));
        assert!(out.matrix().max_diff(expect.matrix()) == 0.0);
    }

    #[test]
    fn x_twice_is_identity() {
        let mut rng = testutil::rng(21);
        let rho = testutil::random_density(&mut rng, 2);
        let once = apply_unitary(&rho, Gate::X, &[0], 1).unwrap();
        let twice = apply_unitary(&once, Gate::X, &[0], 1).unwrap();
        assert!(twice.matrix().max_diff(rho.matrix()) < 1e-12);
    }

    #[test]
    fn bad_targets_are_rejected() {
        let rho = DensityMatrix::zero_state(2);
        assert!(matches!(
            apply_unitary(&rho, Gate::Cnot, &[0, 0], 2),
            Err(StateError::BadTargets(_))
        ));
        assert!(matches!(
            apply_unitary(&rho, Gate::H, &[2], 2),
            Err(StateError::BadTargets(_))
        ));
        assert!(matches!(
            apply_unitary(&rho, Gate::Cnot, &[0], 2),
            Err(StateError::BadTargets(_))
        ));
    }

    #[test]
    fn channel_identity_preserves_state() {
        let mut rng = testutil::rng(22);
        let rho = testutil::random_density(&mut rng, 4);
        let ch = KrausChannel::new(vec![ComplexMatrix::identity(4)]).unwrap();
        let out = apply_channel(&rho, &ch).unwrap();
        assert!(out.matrix().max_diff(rho.matrix()) == 0.0);
    }

    #[test]
    fn projector_channel_dephases() {
        let p0 = qubit_projector(0, 0, 1);
        let p1 = qubit_projector(0, 1, 1);
        let ch = KrausChannel::new(vec![p0.clone(), p1]).unwrap();
        assert!(ch.is_complete(1e-9));
        let rho = density_of(&plus());
        let out = apply_channel(&rho, &ch).unwrap();
        assert!(out.matrix().max_diff(&ComplexMatrix::diag(&[0.5, 0.5])) < 1e-12);

        // single projector halves the mass of the maximally mixed state
        let ch0 = KrausChannel::new(vec![p0]).unwrap();
        assert!(!ch0.is_complete(1e-9));
        let mixed = DensityMatrix::from_diagonal(&[0.5, 0.5]);
        let out = apply_channel(&mixed, &ch0).unwrap();
        assert!(out.matrix().max_diff(&ComplexMatrix::diag(&[0.5, 0.0])) < 1e-12);
        assert!((out.trace() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn channel_must_not_exceed_identity() {
        let two = ComplexMatrix::identity(2).scale_re(2.0);
        assert!(matches!(
            KrausChannel::new(vec![two]),
            Err(StateError::ChannelExceedsIdentity { .. })
        ));
    }

    #[test]
    fn born_probabilities() {
        let rho0 = DensityMatrix::zero_state(1);
        let m0 = qubit_projector(0, 0, 1);
        let m1 = qubit_projector(0, 1, 1);
        assert!((born_probability(&rho0, &m0).unwrap() - 1.0).abs() < 1e-12);
        assert!(born_probability(&rho0, &m1).unwrap().abs() < 1e-12);
        let rho_plus = density_of(&plus());
        assert!((born_probability(&rho_plus, &m0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn post_measurement_examples() {
        let m0 = qubit_projector(0, 0, 1);
        let mixed = DensityMatrix::from_diagonal(&[0.5, 0.5]);
        let out = post_measurement_state(&mixed, &m0).unwrap();
        assert!(out.matrix().max_diff(&ComplexMatrix::diag(&[1.0, 0.0])) < 1e-12);
        assert!((out.trace() - 1.0).abs() < 1e-12);

        let rho0 = DensityMatrix::zero_state(1);
        let out = post_measurement_state(&rho0, &m0).unwrap();
        assert!(out.matrix().max_diff(rho0.matrix()) < 1e-12);

        let m1 = qubit_projector(0, 1, 1);
        let out = post_measurement_state(&density_of(&plus()), &m1).unwrap();
        assert!(out.matrix().max_diff(&ComplexMatrix::diag(&[0.0, 1.0])) < 1e-12);

        assert!(matches!(
            post_measurement_state(&rho0, &m1),
            Err(StateError::ZeroProbability { .. })
        ));
    }

    #[test]
    fn gleason_examples() {
        let mut rng = testutil::rng(23);
        let rho = testutil::random_density(&mut rng, 2);
        let full = ComplexMatrix::identity(2);
        assert!((gleason_measure(&rho, &full).unwrap() - rho.trace()).abs() < 1e-12);
        let zero = ComplexMatrix::zeros(2);
        assert!(gleason_measure(&rho, &zero).unwrap().abs() < 1e-12);
        let mixed = DensityMatrix::from_diagonal(&[0.5, 0.5]);
        let p0 = qubit_projector(0, 0, 1);
        assert!((gleason_measure(&mixed, &p0).unwrap() - 0.5).abs() < 1e-12);

        let not_proj = ComplexMatrix::diag(&[2.0, 0.0]);
        assert!(matches!(
            gleason_measure(&rho, &not_proj),
            Err(StateError::NotProjection { .. })
        ));
    }

    #[test]
    fn measurement_collection_is_complete() {
        for n in 1..=3 {
            for q in 0..n {
                let ops = vec![qubit_projector(q, 0, n), qubit_projector(q, 1, n)];
                let ch = KrausChannel::new(ops).unwrap();
                assert!(ch.is_complete(1e-9));
            }
        }
    }

    #[test]
    fn channel_is_linear() {
        let mut rng = testutil::rng(24);
        let p0 = qubit_projector(0, 0, 2);
        let p1 = qubit_projector(0, 1, 2);
        let ch = KrausChannel::new(vec![p0, p1]).unwrap();
        for _ in 0..20 {
            let rho = testutil::random_density(&mut rng, 4);
            let sigma = testutil::random_density(&mut rng, 4);
            let a = 0.3;
            let b = 0.6;
            let combo = rho.scale(a).add(&sigma.scale(b)).unwrap();
            let lhs = apply_channel(&combo, &ch).unwrap();
            let rhs = apply_channel(&rho, &ch)
                .unwrap()
                .scale(a)
                .add(&apply_channel(&sigma, &ch).unwrap().scale(b))
                .unwrap();
            assert!(lhs.matrix().max_diff(rhs.matrix()) < 1e-9);
        }
    }

    #[test]
    fn channel_preserves_psd_cone() {
        let mut rng = testutil::rng(25);
        let p0 = qubit_projector(1, 0, 2);
        let p1 = qubit_projector(1, 1, 2);
        let ch = KrausChannel::new(vec![p0, p1]).unwrap();
        for _ in 0..20 {
            let rho = testutil::random_density(&mut rng, 4).scale(0.4);
            let extra = testutil::random_density(&mut rng, 4).scale(0.5);
            let sigma = rho.add(&extra).unwrap(); // sigma - rho is PSD
            let crho = apply_channel(&rho, &ch).unwrap();
            let csigma = apply_channel(&sigma, &ch).unwrap();
            let diff = csigma.matrix().sub(crho.matrix()).unwrap();
            assert!(linalg::is_psd(&diff, 1e-8));
        }
    }

    #[test]
    fn unitary_preserves_spectrum() {
        let mut rng = testutil::rng(26);
        for _ in 0..10 {
            let rho = testutil::random_density(&mut rng, 4);
            let out = apply_unitary(&rho, Gate::Cnot, &[1, 0], 2).unwrap();
            let before = rho.eigenvalues().unwrap();
            let after = out.eigenvalues().unwrap();
            for (x, y) in before.iter().zip(&after) {
                assert!((x - y).abs() < 1e-9);
            }
            assert!((out.trace() - rho.trace()).abs() < 1e-12);
        }
    }

    #[test]
    fn born_sums_to_trace_for_complete_collections() {
        let mut rng = testutil::rng(27);
        for _ in 0..10 {
            let rho = testutil::random_density(&mut rng, 4).scale(0.7);
            let total: f64 = (0..=1)
                .map(|v| born_probability(&rho, &qubit_projector(1, v, 2)).unwrap())
                .sum();
            assert!((total - rho.trace()).abs() < 1e-9);
        }
    }

    #[test]
    fn density_validation_rejects_bad_input() {
        let too_big = ComplexMatrix::diag(&[0.9, 0.9]);
        assert!(DensityMatrix::new(too_big).is_err());
        let negative = ComplexMatrix::diag(&[1.2, -0.2]);
        assert!(DensityMatrix::new(negative).is_err());
        let skew = ComplexMatrix::new(
            2,
            vec![c(0.5, 0.0), c(0.3, 0.0), c(0.0, 0.0), c(0.5, 0.0)],
        )
        .unwrap();
        assert!(DensityMatrix::new(skew).is_err());
    }

    #[test]
    fn pure_state_validation() {
        assert!(matches!(
            PureState::new(vec![c(0.5, 0.0), c(0.5, 0.0)]),
            Err(StateError::NotNormalized { .. })
        ));
        assert!(matches!(
            PureState::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
            Err(StateError::NotPowerOfTwo { dim: 3 })
        ));
    }
}
