//! Classical states under the Bayesian order, density matrices under the
//! spectral order, and entropy as an order-reversing measurement.
//!
//! The Bayesian order is recursive: the base case on two outcomes is the
//! two-sided half-interval condition, and larger states compare through
//! every Bayesian projection defined on both sides. The spectral order on
//! density matrices asks for a non-degenerate observable commuting with both
//! states; since any such observable fixes a common eigenbasis, the check
//! simultaneously diagonalizes the pair and compares the paired spectra in
//! the Bayesian order. Entropies use the natural logarithm throughout, so
//! values are in nats.

use crate::exec;
use crate::linalg::{self, ComplexMatrix};
use crate::state::DensityMatrix;
use thiserror::Error;

/// Slack for base-case comparisons: near-ties are treated as equal.
const BAYES_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InfoError {
    #[error("dimension mismatch: {a} vs {b}")]
    DimMismatch { a: usize, b: usize },
    #[error("Bayesian projection undefined: coordinate {index} is 1")]
    OutOfDomain { index: usize },
    #[error("not a classical state: {reason}")]
    BadState { reason: String },
    #[error("not a non-degenerate observable: {reason}")]
    BadObservable { reason: String },
    #[error("density matrix must have unit trace, got {trace}")]
    NotNormalized { trace: f64 },
}

/// Probability vector on at least two outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalState {
    probs: Vec<f64>,
}

impl ClassicalState {
    pub fn new(probs: Vec<f64>) -> Result<Self, InfoError> {
        if probs.len() < 2 {
            return Err(InfoError::BadState {
                reason: format!("need at least 2 outcomes, got {}", probs.len()),
            });
        }
        let mut cleaned = Vec::with_capacity(probs.len());
        for &p in &probs {
            if !p.is_finite() || p < -crate::DEFAULT_TOL || p > 1.0 + crate::DEFAULT_TOL {
                return Err(InfoError::BadState {
                    reason: format!("coordinate {p} outside [0, 1]"),
                });
            }
            cleaned.push(p.clamp(0.0, 1.0));
        }
        let total: f64 = cleaned.iter().sum();
        if (total - 1.0).abs() > crate::DEFAULT_TOL {
            return Err(InfoError::BadState {
                reason: format!("coordinates sum to {total}"),
            });
        }
        Ok(Self { probs: cleaned })
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn pure(n: usize, i: usize) -> Self {
        let mut probs = vec![0.0; n];
        probs[i] = 1.0;
        Self { probs }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn is_pure(&self) -> bool {
        self.probs.iter().any(|&p| p >= 1.0 - BAYES_EPS)
    }
}

/// Bayesian projection: drops coordinate `i` and renormalizes by
/// `1/(1 - x_i)`. Undefined on the pure state `e_i`.
pub fn bayes_proj(x: &ClassicalState, i: usize) -> Result<ClassicalState, InfoError> {
    assert!(i < x.len(), "projection index out of range");
    let xi = x.probs[i];
    if xi >= 1.0 - BAYES_EPS {
        return Err(InfoError::OutOfDomain { index: i });
    }
    let scale = 1.0 / (1.0 - xi);
    let probs: Vec<f64> = x
        .probs
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &p)| (p * scale).clamp(0.0, 1.0))
        .collect();
    Ok(ClassicalState { probs })
}

fn bayes_leq_rec(x: &[f64], y: &[f64]) -> bool {
    if x.len() == 2 {
        let (x1, y1) = (x[0], y[0]);
        return (y1 <= x1 + BAYES_EPS && x1 <= 0.5 + BAYES_EPS)
            || (0.5 <= x1 + BAYES_EPS && x1 <= y1 + BAYES_EPS);
    }
    for i in 0..x.len() {
        if x[i] >= 1.0 - BAYES_EPS || y[i] >= 1.0 - BAYES_EPS {
            continue;
        }
        let drop = |v: &[f64], vi: f64| -> Vec<f64> {
            let scale = 1.0 / (1.0 - vi);
            v.iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &p)| p * scale)
                .collect()
        };
        if !bayes_leq_rec(&drop(x, x[i]), &drop(y, y[i])) {
            return false;
        }
    }
    true
}

/// The Bayesian order: base case on two outcomes, recursion through all
/// projections defined on both states above that.
pub fn bayes_leq(x: &ClassicalState, y: &ClassicalState) -> Result<bool, InfoError> {
    if x.len() != y.len() {
        return Err(InfoError::DimMismatch {
            a: x.len(),
            b: y.len(),
        });
    }
    Ok(bayes_leq_rec(&x.probs, &y.probs))
}

/// Shannon entropy `-sum x_i ln x_i` in nats, with `0 ln 0 = 0`.
pub fn shannon_entropy(x: &ClassicalState) -> f64 {
    entropy_of_slice(&x.probs)
}

fn entropy_of_slice(probs: &[f64]) -> f64 {
    probs
        .iter()
        .map(|&p| if p > 0.0 { -p * p.ln() } else { 0.0 })
        .sum()
}

/// Non-degenerate observable: `n` rank-1 mutually orthogonal projectors
/// resolving the identity.
#[derive(Debug, Clone)]
pub struct Observable {
    projectors: Vec<ComplexMatrix>,
}

impl Observable {
    pub fn new(projectors: Vec<ComplexMatrix>) -> Result<Self, InfoError> {
        let n = projectors.len();
        if n < 2 {
            return Err(InfoError::BadObservable {
                reason: "need at least two outcomes".into(),
            });
        }
        let dim = projectors[0].dim();
        if dim != n {
            return Err(InfoError::BadObservable {
                reason: format!("{n} rank-1 projectors cannot resolve dimension {dim}"),
            });
        }
        let tol = crate::DEFAULT_TOL;
        let mut sum = ComplexMatrix::zeros(dim);
        for (k, p) in projectors.iter().enumerate() {
            if p.dim() != dim {
                return Err(InfoError::DimMismatch {
                    a: dim,
                    b: p.dim(),
                });
            }
            if p.hermitian_deviation() > tol
                || p.matmul(p).unwrap().max_diff(p) > tol
                || (p.trace_re() - 1.0).abs() > tol
            {
                return Err(InfoError::BadObservable {
                    reason: format!("operator {k} is not a rank-1 orthogonal projection"),
                });
            }
            sum = sum.add(p).unwrap();
        }
        if sum.max_diff(&ComplexMatrix::identity(dim)) > tol {
            return Err(InfoError::BadObservable {
                reason: "projectors do not resolve the identity".into(),
            });
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let prod = projectors[i].matmul(&projectors[j]).unwrap();
                if prod.max_norm() > tol {
                    return Err(InfoError::BadObservable {
                        reason: format!("projectors {i} and {j} are not orthogonal"),
                    });
                }
            }
        }
        Ok(Self { projectors })
    }

    /// Computational-basis observable on dimension `n`.
    pub fn computational(n: usize) -> Self {
        let projectors = (0..n)
            .map(|i| {
                let mut values = vec![0.0; n];
                values[i] = 1.0;
                ComplexMatrix::diag(&values)
            })
            .collect();
        Self { projectors }
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

fn require_unit_trace(rho: &DensityMatrix) -> Result<(), InfoError> {
    let trace = rho.trace();
    if (trace - 1.0).abs() > crate::DEFAULT_TOL {
        return Err(InfoError::NotNormalized { trace });
    }
    Ok(())
}

/// Outcome distribution `(Tr(P_1 rho), ..., Tr(P_n rho))` of the observable
/// on the state.
pub fn spec_of(rho: &DensityMatrix, o: &Observable) -> Result<ClassicalState, InfoError> {
    require_unit_trace(rho)?;
    if rho.dim() != o.projectors[0].dim() {
        return Err(InfoError::DimMismatch {
            a: rho.dim(),
            b: o.projectors[0].dim(),
        });
    }
    let probs: Vec<f64> = o
        .projectors
        .iter()
        .map(|p| rho.matrix().matmul(p).unwrap().trace_re())
        .collect();
    ClassicalState::new(probs)
}

/// Max-norm of the commutator `rho sigma - sigma rho`.
pub fn commutator_norm(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64, InfoError> {
    if rho.dim() != sigma.dim() {
        return Err(InfoError::DimMismatch {
            a: rho.dim(),
            b: sigma.dim(),
        });
    }
    let ab = rho.matrix().matmul(sigma.matrix()).unwrap();
    let ba = sigma.matrix().matmul(rho.matrix()).unwrap();
    Ok(ab.max_diff(&ba))
}

/// Detail of a spectral-order comparison: the commutator norm and, when the
/// states commute, the paired spectra under a common eigenbasis.
#[derive(Debug, Clone)]
pub struct SpectralComparison {
    pub commutator: f64,
    pub commuting: bool,
    pub spectra: Option<(ClassicalState, ClassicalState)>,
    pub ordered: bool,
}

/// The spectral order: `rho <= sigma` iff the states commute (so a common
/// non-degenerate observable exists) and their paired spectra under a common
/// eigenbasis compare in the Bayesian order. The verdict is independent of
/// eigenbasis labeling because the Bayesian recursion treats coordinates
/// symmetrically.
pub fn spectral_leq(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    tol: f64,
) -> Result<bool, InfoError> {
    Ok(spectral_compare(rho, sigma, tol)?.ordered)
}

/// Like [`spectral_leq`] but keeps the evidence.
pub fn spectral_compare(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    tol: f64,
) -> Result<SpectralComparison, InfoError> {
    require_unit_trace(rho)?;
    require_unit_trace(sigma)?;
    let commutator = commutator_norm(rho, sigma)?;
    if commutator > tol {
        return Ok(SpectralComparison {
            commutator,
            commuting: false,
            spectra: None,
            ordered: false,
        });
    }
    let (xs, ys) = joint_spectra(rho, sigma)?;
    let x = ClassicalState::new(xs)?;
    let y = ClassicalState::new(ys)?;
    let ordered = bayes_leq(&x, &y)?;
    Ok(SpectralComparison {
        commutator,
        commuting: true,
        spectra: Some((x, y)),
        ordered,
    })
}

/// Simultaneously diagonalizes a commuting pair by diagonalizing
/// `rho + c sigma` for a deterministic sequence of mixing constants,
/// retrying when an unlucky `c` leaves joint degeneracies unresolved.
fn joint_spectra(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
) -> Result<(Vec<f64>, Vec<f64>), InfoError> {
    // Irrational-flavored constants so accidental eigenvalue collisions do
    // not survive a retry.
    const MIXERS: [f64; 5] = [
        0.6180339887498949,
        1.4142135623730951,
        2.718281828459045,
        0.3141592653589793,
        1.7320508075688772,
    ];
    let n = rho.dim();
    let mut best: Option<(f64, Vec<f64>, Vec<f64>)> = None;
    for &c in &MIXERS {
        let mix = rho.matrix().add(&sigma.matrix().scale_re(c)).unwrap();
        let Ok(spec) = linalg::hermitian_eig(&mix, 1e-6) else {
            continue;
        };
        let v = &spec.eigenvectors;
        let vt = v.adjoint();
        let drho = vt.matmul(rho.matrix()).unwrap().matmul(v).unwrap();
        let dsigma = vt.matmul(sigma.matrix()).unwrap().matmul(v).unwrap();
        let off = |m: &ComplexMatrix| -> f64 {
            let mut worst: f64 = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        worst = worst.max(m[(i, j)].norm());
                    }
                }
            }
            worst
        };
        let defect = off(&drho).max(off(&dsigma));
        let xs: Vec<f64> = (0..n).map(|i| drho[(i, i)].re.clamp(0.0, 1.0)).collect();
        let ys: Vec<f64> = (0..n).map(|i| dsigma[(i, i)].re.clamp(0.0, 1.0)).collect();
        if defect <= 1e-8 {
            return Ok((xs, ys));
        }
        match &best {
            Some((d, _, _)) if *d <= defect => {}
            _ => best = Some((defect, xs, ys)),
        }
    }
    // Commuting inputs always resolve for some mixer; keep the best attempt
    // for near-commuting inputs inside the caller's tolerance.
    let (_, xs, ys) = best.ok_or_else(|| InfoError::BadState {
        reason: "simultaneous diagonalization failed".into(),
    })?;
    Ok((xs, ys))
}

/// Von Neumann entropy `-Tr(rho ln rho)` in nats: the Shannon entropy of the
/// eigenvalue vector.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64, InfoError> {
    require_unit_trace(rho)?;
    let eigs = rho
        .eigenvalues()
        .map_err(|e| InfoError::BadState {
            reason: e.to_string(),
        })?;
    let clamped: Vec<f64> = eigs.iter().map(|&l| l.clamp(0.0, 1.0)).collect();
    Ok(entropy_of_slice(&clamped))
}

/// The entropy neighborhood used to test that entropy measures content:
/// samples `y` below `x` whose entropy is within `eps` of `x`'s.
pub fn content_neighborhood<'a>(
    x: &ClassicalState,
    eps: f64,
    samples: &'a [ClassicalState],
) -> Result<Vec<&'a ClassicalState>, InfoError> {
    assert!(eps > 0.0, "eps must be positive");
    let hx = shannon_entropy(x);
    let mut out = Vec::new();
    for y in samples {
        if bayes_leq(y, x)? && (hx - shannon_entropy(y)).abs() < eps {
            out.push(y);
        }
    }
    Ok(out)
}

/// All grid points of the probability simplex with coordinates `i/steps`.
pub fn simplex_grid(outcomes: usize, steps: usize) -> Vec<ClassicalState> {
    let mut out = Vec::new();
    let mut point = vec![0usize; outcomes];
    fill_grid(&mut out, &mut point, 0, steps, steps);
    out
}

fn fill_grid(
    out: &mut Vec<ClassicalState>,
    point: &mut Vec<usize>,
    index: usize,
    remaining: usize,
    steps: usize,
) {
    if index == point.len() - 1 {
        point[index] = remaining;
        let probs = point.iter().map(|&k| k as f64 / steps as f64).collect();
        out.push(ClassicalState { probs });
        return;
    }
    for k in 0..=remaining {
        point[index] = k;
        fill_grid(out, point, index + 1, remaining - k, steps);
    }
}

/// Full order table of the Bayesian order over a set of states; row `i`,
/// column `j` holds the verdict of `states[i] <= states[j]`. Rows are
/// computed in parallel under the `parallel` feature.
pub fn bayes_order_table(states: &[ClassicalState]) -> Vec<Vec<bool>> {
    exec::map_collect(states, |x| {
        states
            .iter()
            .map(|y| bayes_leq(x, y).expect("equal lengths"))
            .collect()
    })
}
