//! Simple valuations over the ball domain and their pointwise order.
//!
//! A simple valuation is a finite weighted set of formal balls with total
//! mass at most 1. The pointwise order over all Scott opens is not directly
//! decidable, so the implemented definition is the standard splitting
//! criterion for simple valuations: `v <= w` iff some non-negative transport
//! matrix routes all of `v`'s mass to `w`'s atoms along edges where the
//! source ball is below the target ball. Feasibility is decided by max-flow
//! on weights scaled to integers at 1e-12 resolution.

use crate::ball::{self, BallError, BasisElement, FormalBall};
use crate::linalg::ComplexMatrix;
use crate::state::{DensityMatrix, StateError};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ValuationError {
    #[error("dimension mismatch: {a} vs {b}")]
    DimMismatch { a: usize, b: usize },
    #[error("valuation must have at least one atom")]
    Empty,
    #[error("atom weights must be positive, got {weight}")]
    BadWeight { weight: f64 },
    #[error("total mass {mass} exceeds 1")]
    MassExceedsOne { mass: f64 },
    #[error("density matrix must have unit trace, got {trace}")]
    NotNormalized { trace: f64 },
    #[error(transparent)]
    Ball(#[from] BallError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// Finite weighted set of formal balls; weights are positive and sum to at
/// most 1.
#[derive(Debug, Clone)]
pub struct SimpleValuation {
    atoms: Vec<(FormalBall, f64)>,
}

impl SimpleValuation {
    pub fn new(atoms: Vec<(FormalBall, f64)>) -> Result<Self, ValuationError> {
        if atoms.is_empty() {
            return Err(ValuationError::Empty);
        }
        let dim = atoms[0].0.dim();
        let mut mass = 0.0;
        for (ball, w) in &atoms {
            if ball.dim() != dim {
                return Err(ValuationError::DimMismatch {
                    a: dim,
                    b: ball.dim(),
                });
            }
            if *w <= 0.0 || !w.is_finite() {
                return Err(ValuationError::BadWeight { weight: *w });
            }
            mass += w;
        }
        if mass > 1.0 + crate::DEFAULT_TOL {
            return Err(ValuationError::MassExceedsOne { mass });
        }
        Ok(Self { atoms })
    }

    /// Point valuation: all mass on one ball.
    pub fn point(ball: FormalBall) -> Self {
        Self {
            atoms: vec![(ball, 1.0)],
        }
    }

    pub fn atoms(&self) -> &[(FormalBall, f64)] {
        &self.atoms
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].0.dim()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|(_, w)| w).sum()
    }
}

/// Principal Scott open: the set of balls way-above `base`.
#[derive(Debug, Clone)]
pub struct PrincipalOpen {
    pub base: FormalBall,
}

impl PrincipalOpen {
    pub fn new(base: FormalBall) -> Self {
        Self { base }
    }

    /// Membership of a ball in the open.
    pub fn contains(&self, ball: &FormalBall, tol: f64) -> Result<bool, ValuationError> {
        Ok(ball::ball_way_below(&self.base, ball, tol)?)
    }
}

/// Value of the valuation on a principal open: the weight of atoms whose
/// ball lies way above the base.
pub fn valuation_apply(
    v: &SimpleValuation,
    o: &PrincipalOpen,
    tol: f64,
) -> Result<f64, ValuationError> {
    if v.dim() != o.base.dim() {
        return Err(ValuationError::DimMismatch {
            a: v.dim(),
            b: o.base.dim(),
        });
    }
    let mut total = 0.0;
    for (ball, w) in &v.atoms {
        if o.contains(ball, tol)? {
            total += w;
        }
    }
    Ok(total)
}

/// Weight resolution for the integer-scaled flow network.
const FLOW_SCALE: f64 = 1e12;
/// Feasibility margin on the scaled units (1e-9 of mass).
const FLOW_MARGIN: i64 = 1_000;

/// Pointwise order between simple valuations, decided by the splitting
/// criterion: `v <= w` iff a non-negative transport with row sums
/// `v.weight_i`, column sums at most `w.weight_j`, and support only on pairs
/// with `ball_leq(v.ball_i, w.ball_j)` exists.
pub fn valuation_leq(
    v: &SimpleValuation,
    w: &SimpleValuation,
    tol: f64,
) -> Result<bool, ValuationError> {
    if v.dim() != w.dim() {
        return Err(ValuationError::DimMismatch {
            a: v.dim(),
            b: w.dim(),
        });
    }
    let nv = v.atoms.len();
    let nw = w.atoms.len();
    // Nodes: 0 = source, 1..=nv sources' atoms, nv+1..=nv+nw targets' atoms,
    // nv+nw+1 = sink.
    let sink = nv + nw + 1;
    let mut net = FlowNetwork::new(sink + 1);
    let mut required: i64 = 0;
    for (i, (_, wt)) in v.atoms.iter().enumerate() {
        let cap = (wt * FLOW_SCALE).round() as i64;
        required += cap;
        net.add_edge(0, 1 + i, cap);
    }
    for (j, (_, wt)) in w.atoms.iter().enumerate() {
        let cap = (wt * FLOW_SCALE).round() as i64;
        net.add_edge(1 + nv + j, sink, cap);
    }
    let mut any_edge = false;
    for (i, (vb, _)) in v.atoms.iter().enumerate() {
        for (j, (wb, _)) in w.atoms.iter().enumerate() {
            if ball::ball_leq(vb, wb, tol)? {
                net.add_edge(1 + i, 1 + nv + j, i64::MAX / 4);
                any_edge = true;
            }
        }
    }
    if !any_edge {
        return Ok(false);
    }
    let flow = net.max_flow(0, sink);
    Ok(flow >= required - FLOW_MARGIN)
}

/// Embedding of a unit-trace density matrix as a maximal-element valuation:
/// the spectral decomposition `rho = sum p_i |psi_i><psi_i|` becomes
/// `sum p_i delta_(psi_i, 0)`. Eigenvalues below 1e-12 are dropped.
pub fn embed_density(rho: &DensityMatrix) -> Result<SimpleValuation, ValuationError> {
    let trace = rho.trace();
    if (trace - 1.0).abs() > crate::DEFAULT_TOL {
        return Err(ValuationError::NotNormalized { trace });
    }
    let spec = crate::linalg::hermitian_eig(rho.matrix(), crate::DEFAULT_TOL)
        .map_err(StateError::from)?;
    let mut atoms = Vec::new();
    for (k, &p) in spec.eigenvalues.iter().enumerate() {
        if p <= 1e-12 {
            continue;
        }
        let vec = spec.eigenvector(k);
        let norm: f64 = vec.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let amps = vec.into_iter().map(|z| z / norm).collect();
        let center = crate::state::PureState::new(amps).map_err(ValuationError::State)?;
        atoms.push((ball::embed_pure(&center), p));
    }
    SimpleValuation::new(atoms)
}

/// Valuation-side Gleason sum: `sum_i weight_i <psi_i| P |psi_i>` over the
/// radius-zero atom centers. For `embed_density(rho)` this equals
/// `Tr(rho P)`.
pub fn valuation_gleason_sum(
    v: &SimpleValuation,
    proj: &ComplexMatrix,
) -> Result<f64, ValuationError> {
    if v.dim() != proj.dim() {
        return Err(ValuationError::DimMismatch {
            a: v.dim(),
            b: proj.dim(),
        });
    }
    let mut total = 0.0;
    for (ball, w) in &v.atoms {
        let psi = &ball.center;
        let pv = proj.mul_vec(psi.amplitudes());
        let quad: f64 = psi
            .amplitudes()
            .iter()
            .zip(&pv)
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        total += w * quad;
    }
    Ok(total)
}

/// Increasing chain of simple valuations approximating a unit-trace density
/// matrix: level `k` uses basis-element atoms with radii `2^-k` centered at
/// gate-word approximations of the eigenvectors.
pub fn approximation_chain(
    rho: &DensityMatrix,
    levels: usize,
    word_depth: usize,
) -> Result<Vec<SimpleValuation>, ValuationError> {
    assert!(levels >= 1, "levels must be at least 1");
    let exact = embed_density(rho)?;
    let mut out = Vec::with_capacity(levels);
    for k in 1..=levels {
        let radius = 0.5f64.powi(k as i32);
        let mut atoms = Vec::new();
        for (ball, w) in exact.atoms() {
            let be: BasisElement = ball::approximate_state(&ball.center, radius, word_depth)?;
            atoms.push((FormalBall::new(be.word.state()?, radius), *w));
        }
        out.push(SimpleValuation::new(atoms)?);
    }
    Ok(out)
}

/// Residual-graph max flow (Edmonds-Karp). Networks here are tiny bipartite
/// graphs, so shortest augmenting paths are plenty.
struct FlowNetwork {
    heads: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i64>,
}

impl FlowNetwork {
    fn new(nodes: usize) -> Self {
        Self {
            heads: vec![Vec::new(); nodes],
            to: Vec::new(),
            cap: Vec::new(),
        }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: i64) {
        let e = self.to.len();
        self.heads[from].push(e);
        self.to.push(to);
        self.cap.push(cap);
        self.heads[to].push(e + 1);
        self.to.push(from);
        self.cap.push(0);
    }

    fn max_flow(&mut self, source: usize, sink: usize) -> i64 {
        let mut total = 0i64;
        loop {
            // BFS for a shortest augmenting path.
            let mut parent_edge = vec![usize::MAX; self.heads.len()];
            let mut queue = std::collections::VecDeque::new();
            queue.push_back(source);
            parent_edge[source] = usize::MAX - 1;
            while let Some(u) = queue.pop_front() {
                if u == sink {
                    break;
                }
                for &e in &self.heads[u] {
                    let v = self.to[e];
                    if self.cap[e] > 0 && parent_edge[v] == usize::MAX {
                        parent_edge[v] = e;
                        queue.push_back(v);
                    }
                }
            }
            if parent_edge[sink] == usize::MAX {
                return total;
            }
            let mut bottleneck = i64::MAX;
            let mut node = sink;
            while node != source {
                let e = parent_edge[node];
                bottleneck = bottleneck.min(self.cap[e]);
                node = self.to[e ^ 1];
            }
            let mut node = sink;
            while node != source {
                let e = parent_edge[node];
                self.cap[e] -= bottleneck;
                self.cap[e ^ 1] += bottleneck;
                node = self.to[e ^ 1];
            }
            total += bottleneck;
        }
    }
}
