//! The domain of closed balls of pure states under reversed inclusion.
//!
//! A ball is a `(center, radius)` pair ordered formally: `a <= b` iff
//! `d(center_a, center_b) <= radius_a - radius_b`, where `d` minimizes the
//! Euclidean norm over a global phase. The formal reading (rather than
//! literal set inclusion) keeps antisymmetry on the unit sphere, where all
//! balls of radius >= 2 coincide as sets; for radii < 2 the two readings
//! agree. Way-below is the strict version of the same inequality.
//!
//! Gate words over {H, X, P, T, CNOT} applied to `|0...0>` enumerate a dense
//! subset of pure states; paired with dyadic radii they form the basis used
//! for finite-precision approximation. Enumeration runs in exact arithmetic
//! over Z[zeta_8, 1/sqrt(2)] (every gate entry lives there), so
//! deduplication up to global phase is exact and the BFS order is stable.

use crate::state::{self, Gate, PureState, StateError};
use num_complex::Complex64;
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BallError {
    #[error("dimension mismatch: {a} vs {b}")]
    DimMismatch { a: usize, b: usize },
    #[error("enumeration cap exceeded: {qubits} qubit(s) at depth {max_len} (caps: 3 qubits, depth 14)")]
    CapExceeded { qubits: usize, max_len: usize },
    #[error("no basis element within the requested bound at this depth; best distance {best:e}")]
    NotFoundAtDepth { best: f64 },
    #[error("malformed gate word: {0}")]
    BadWord(String),
    #[error(transparent)]
    State(#[from] StateError),
}

/// Closed ball of pure states: a normalized center and a non-negative
/// radius.
#[derive(Debug, Clone)]
pub struct FormalBall {
    pub center: PureState,
    pub radius: f64,
}

impl FormalBall {
    pub fn new(center: PureState, radius: f64) -> Self {
        assert!(radius >= 0.0 && radius.is_finite(), "radius must be >= 0");
        Self { center, radius }
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }
}

/// Reversed-inclusion order: `a <= b` iff `d(a.center, b.center) <=
/// a.radius - b.radius + tol`.
pub fn ball_leq(a: &FormalBall, b: &FormalBall, tol: f64) -> Result<bool, BallError> {
    if a.dim() != b.dim() {
        return Err(BallError::DimMismatch {
            a: a.dim(),
            b: b.dim(),
        });
    }
    let d = a.center.phase_distance(&b.center);
    Ok(d <= a.radius - b.radius + tol)
}

/// Way-below is strict formal inclusion: `d < a.radius - b.radius - tol`.
pub fn ball_way_below(a: &FormalBall, b: &FormalBall, tol: f64) -> Result<bool, BallError> {
    if a.dim() != b.dim() {
        return Err(BallError::DimMismatch {
            a: a.dim(),
            b: b.dim(),
        });
    }
    let d = a.center.phase_distance(&b.center);
    Ok(d < a.radius - b.radius - tol)
}

/// Embedding of pure states as radius-zero balls, the maximal elements.
pub fn embed_pure(psi: &PureState) -> FormalBall {
    FormalBall::new(psi.clone(), 0.0)
}

/// One gate application: a gate name with its target qubits.
pub type Letter = (Gate, Vec<usize>);

/// Finite word of gate applications on an `n`-qubit register, applied left
/// to right to `|0...0>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GateWord {
    pub letters: Vec<Letter>,
    pub qubits: usize,
}

impl GateWord {
    pub fn empty(qubits: usize) -> Self {
        Self {
            letters: Vec::new(),
            qubits,
        }
    }

    pub fn new(letters: Vec<Letter>, qubits: usize) -> Result<Self, BallError> {
        for (g, targets) in &letters {
            if targets.len() != g.arity()
                || targets.iter().any(|&t| t >= qubits)
                || (g.arity() == 2 && targets[0] == targets[1])
            {
                return Err(BallError::BadWord(format!(
                    "invalid letter {}({:?}) on {} qubit(s)",
                    g.name(),
                    targets,
                    qubits
                )));
            }
        }
        Ok(Self { letters, qubits })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The word applied to `|0...0>`.
    pub fn state(&self) -> Result<PureState, BallError> {
        let mut exact = ExactState::zero(self.qubits);
        for (g, targets) in &self.letters {
            exact.apply(*g, targets);
        }
        Ok(exact.to_pure_state())
    }

    /// Parses the text form `H(0),CNOT(0,1),T(1)`. An empty string is the
    /// empty word; `qubits` may exceed the largest target index.
    pub fn parse(text: &str, qubits: usize) -> Result<Self, BallError> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Self::empty(qubits));
        }
        let mut letters = Vec::new();
        for part in text.split(',') {
            // CNOT targets contain a comma, so letters are split on ')' and
            // rejoined here.
            letters.push(part.trim().to_string());
        }
        // Re-join fragments that belong to a two-target letter.
        let mut merged: Vec<String> = Vec::new();
        for piece in letters {
            match merged.last_mut() {
                Some(last) if last.contains('(') && !last.contains(')') => {
                    last.push(',');
                    last.push_str(&piece);
                }
                _ => merged.push(piece),
            }
        }
        let mut out = Vec::new();
        for item in merged {
            let open = item
                .find('(')
                .ok_or_else(|| BallError::BadWord(format!("missing '(' in {item:?}")))?;
            if !item.ends_with(')') {
                return Err(BallError::BadWord(format!("missing ')' in {item:?}")));
            }
            let name = item[..open].trim();
            let gate = Gate::from_name(name)
                .ok_or_else(|| BallError::BadWord(format!("unknown gate {name:?}")))?;
            let args = &item[open + 1..item.len() - 1];
            let targets: Vec<usize> = args
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| BallError::BadWord(format!("bad target {s:?}")))
                })
                .collect::<Result<_, _>>()?;
            out.push((gate, targets));
        }
        Self::new(out, qubits)
    }
}

impl fmt::Display for GateWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (g, targets) in &self.letters {
            if !first {
                write!(f, ",")?;
            }
            first = false;
            write!(f, "{}(", g.name())?;
            for (k, t) in targets.iter().enumerate() {
                if k > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{t}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// Basis element of the ball domain: a gate-word center with a positive
/// radius. Dyadic radii are exact in floating point.
#[derive(Debug, Clone)]
pub struct BasisElement {
    pub word: GateWord,
    pub radius: f64,
    /// Exact distance from the word's state to the approximation target;
    /// zero when the word reproduces the target.
    pub distance: f64,
}

impl BasisElement {
    pub fn ball(&self) -> Result<FormalBall, BallError> {
        Ok(FormalBall::new(self.word.state()?, self.radius))
    }
}

// ---------------------------------------------------------------------------
// Exact arithmetic over Z[zeta, 1/sqrt(2)], zeta = e^{i pi/4}.
//
// An amplitude is (c0 + c1 zeta + c2 zeta^2 + c3 zeta^3) / sqrt(2)^k with
// integer coefficients; zeta^4 = -1. Every gate in the set maps this ring to
// itself, so states reached by gate words are represented exactly and
// equality up to global phase is decidable: unit-modulus ring elements are
// exactly the powers of zeta.
// ---------------------------------------------------------------------------

/// Integer combination of 1, zeta, zeta^2, zeta^3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct RingInt {
    c: [i64; 4],
}

impl RingInt {
    const ZERO: RingInt = RingInt { c: [0; 4] };
    const ONE: RingInt = RingInt { c: [1, 0, 0, 0] };

    fn add(self, o: RingInt) -> RingInt {
        RingInt {
            c: [
                self.c[0] + o.c[0],
                self.c[1] + o.c[1],
                self.c[2] + o.c[2],
                self.c[3] + o.c[3],
            ],
        }
    }

    fn sub(self, o: RingInt) -> RingInt {
        RingInt {
            c: [
                self.c[0] - o.c[0],
                self.c[1] - o.c[1],
                self.c[2] - o.c[2],
                self.c[3] - o.c[3],
            ],
        }
    }

    /// Multiplication by zeta: (c0, c1, c2, c3) -> (-c3, c0, c1, c2).
    fn mul_zeta(self) -> RingInt {
        RingInt {
            c: [-self.c[3], self.c[0], self.c[1], self.c[2]],
        }
    }

    /// Whether the element is divisible by sqrt(2) = zeta - zeta^3, and the
    /// quotient if so.
    fn div_sqrt2(self) -> Option<RingInt> {
        let [n0, n1, n2, n3] = self.c;
        if (n0 + n2) % 2 != 0 || (n1 + n3) % 2 != 0 {
            return None;
        }
        Some(RingInt {
            c: [
                (n1 - n3) / 2,
                (n0 + n2) / 2,
                (n1 + n3) / 2,
                (n2 - n0) / 2,
            ],
        })
    }

    fn to_complex(self, inv_sqrt2_pow: f64) -> Complex64 {
        const S: f64 = std::f64::consts::FRAC_1_SQRT_2;
        let re = self.c[0] as f64 + S * (self.c[1] as f64 - self.c[3] as f64);
        let im = self.c[2] as f64 + S * (self.c[1] as f64 + self.c[3] as f64);
        Complex64::new(re * inv_sqrt2_pow, im * inv_sqrt2_pow)
    }
}

/// State vector with amplitudes in the ring, over a common denominator
/// sqrt(2)^k, kept in reduced form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct ExactState {
    amps: Vec<RingInt>,
    k: u32,
}

impl ExactState {
    fn zero(qubits: usize) -> Self {
        let dim = 1usize << qubits;
        let mut amps = vec![RingInt::ZERO; dim];
        amps[0] = RingInt::ONE;
        Self { amps, k: 0 }
    }

    fn qubits(&self) -> usize {
        self.amps.len().trailing_zeros() as usize
    }

    fn reduce(&mut self) {
        while self.k > 0 {
            let mut quotients = Vec::with_capacity(self.amps.len());
            for a in &self.amps {
                match a.div_sqrt2() {
                    Some(q) => quotients.push(q),
                    None => return,
                }
            }
            self.amps = quotients;
            self.k -= 1;
        }
    }

    fn apply(&mut self, g: Gate, targets: &[usize]) {
        let n = self.qubits();
        let dim = self.amps.len();
        let bit = |q: usize| n - 1 - q;
        match g {
            Gate::H => {
                let t = bit(targets[0]);
                let mut next = vec![RingInt::ZERO; dim];
                for i in 0..dim {
                    if (i >> t) & 1 == 0 {
                        let j = i | (1 << t);
                        next[i] = self.amps[i].add(self.amps[j]);
                        next[j] = self.amps[i].sub(self.amps[j]);
                    }
                }
                self.amps = next;
                self.k += 1;
            }
            Gate::X => {
                let t = bit(targets[0]);
                for i in 0..dim {
                    if (i >> t) & 1 == 0 {
                        self.amps.swap(i, i | (1 << t));
                    }
                }
            }
            Gate::P => {
                let t = bit(targets[0]);
                for i in 0..dim {
                    if (i >> t) & 1 == 1 {
                        self.amps[i] = self.amps[i].mul_zeta().mul_zeta();
                    }
                }
            }
            Gate::T => {
                let t = bit(targets[0]);
                for i in 0..dim {
                    if (i >> t) & 1 == 1 {
                        self.amps[i] = self.amps[i].mul_zeta();
                    }
                }
            }
            Gate::Cnot => {
                let cbit = bit(targets[0]);
                let tbit = bit(targets[1]);
                for i in 0..dim {
                    if (i >> cbit) & 1 == 1 && (i >> tbit) & 1 == 0 {
                        self.amps.swap(i, i | (1 << tbit));
                    }
                }
            }
        }
        self.reduce();
    }

    /// Canonical representative up to global phase: the lexicographically
    /// smallest coefficient vector among the eight zeta-multiples.
    fn canonical(&self) -> ExactState {
        let mut best: Option<Vec<RingInt>> = None;
        let mut current = self.amps.clone();
        for _ in 0..8 {
            let better = match &best {
                None => true,
                Some(b) => {
                    let key = |v: &[RingInt]| -> Vec<i64> {
                        v.iter().flat_map(|r| r.c).collect()
                    };
                    key(&current) < key(b)
                }
            };
            if better {
                best = Some(current.clone());
            }
            current = current.iter().map(|a| a.mul_zeta()).collect();
        }
        ExactState {
            amps: best.unwrap(),
            k: self.k,
        }
    }

    fn to_pure_state(&self) -> PureState {
        let inv = (std::f64::consts::SQRT_2).powi(-(self.k as i32));
        let amps: Vec<Complex64> = self.amps.iter().map(|a| a.to_complex(inv)).collect();
        let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        PureState::new(amps.into_iter().map(|z| z / norm).collect())
            .expect("gate-word states are normalized")
    }
}

/// Breadth-first enumeration of gate words applied to `|0...0>`, cumulative
/// over word lengths `0..=max_len` and deduplicated by state up to global
/// phase. BFS order is stable: shorter words first, letters in a fixed
/// order, so each state is paired with its first-reached word.
pub fn enumerate_gate_words(
    qubits: usize,
    max_len: usize,
) -> Result<Vec<(GateWord, PureState)>, BallError> {
    if qubits == 0 || qubits > 3 || max_len > 14 {
        return Err(BallError::CapExceeded { qubits, max_len });
    }
    let letters = letter_alphabet(qubits);

    let root = ExactState::zero(qubits);
    let mut seen: HashMap<ExactState, usize> = HashMap::new();
    let mut out: Vec<(GateWord, PureState)> = Vec::new();
    let mut frontier: Vec<(ExactState, Vec<Letter>)> = vec![(root.clone(), Vec::new())];
    seen.insert(root.canonical(), 0);
    out.push((GateWord::empty(qubits), root.to_pure_state()));

    for _depth in 1..=max_len {
        let mut next_frontier = Vec::new();
        for (exact, word) in &frontier {
            for letter in &letters {
                let mut next = exact.clone();
                next.apply(letter.0, &letter.1);
                let canon = next.canonical();
                if seen.contains_key(&canon) {
                    continue;
                }
                let mut next_word = word.clone();
                next_word.push(letter.clone());
                seen.insert(canon, out.len());
                out.push((
                    GateWord {
                        letters: next_word.clone(),
                        qubits,
                    },
                    next.to_pure_state(),
                ));
                next_frontier.push((next, next_word));
            }
        }
        if next_frontier.is_empty() {
            break;
        }
        frontier = next_frontier;
    }
    Ok(out)
}

/// Fixed letter order: single-qubit gates H, X, P, T by target, then CNOT
/// pairs lexicographically.
fn letter_alphabet(qubits: usize) -> Vec<Letter> {
    let mut letters = Vec::new();
    for g in [Gate::H, Gate::X, Gate::P, Gate::T] {
        for q in 0..qubits {
            letters.push((g, vec![q]));
        }
    }
    for control in 0..qubits {
        for target in 0..qubits {
            if control != target {
                letters.push((Gate::Cnot, vec![control, target]));
            }
        }
    }
    letters
}

/// Best gate-word approximation at each depth `1..=max_len`: for each `L`,
/// the minimum phase distance from `target` over all word states of length
/// <= L. Non-increasing in `L` by construction.
pub fn best_distance_by_depth(
    target: &PureState,
    max_len: usize,
) -> Result<Vec<f64>, BallError> {
    let words = enumerate_gate_words(target.qubits(), max_len)?;
    let mut best = vec![f64::INFINITY; max_len + 1];
    for (word, st) in &words {
        let d = target.phase_distance(st);
        let l = word.len();
        if d < best[l] {
            best[l] = d;
        }
    }
    for l in 1..=max_len {
        if best[l] > best[l - 1] {
            best[l] = best[l - 1];
        }
    }
    Ok(best[1..].to_vec())
}

/// Finds a basis element below the target: a word whose state sits within
/// `eps/4` of `target`, returned with radius `eps`.
///
/// The quarter margin makes successive calls at `eps, eps/2, eps/4, ...` a
/// `<=`-increasing chain of balls: consecutive centers are within
/// `3 eps / 8 < eps - eps/2` of each other by the triangle inequality.
pub fn approximate_state(
    target: &PureState,
    eps: f64,
    max_len: usize,
) -> Result<BasisElement, BallError> {
    assert!(eps > 0.0, "eps must be positive");
    let words = enumerate_gate_words(target.qubits(), max_len)?;
    let mut best_d = f64::INFINITY;
    let mut best_word = None;
    for (word, st) in &words {
        let d = target.phase_distance(st);
        if d < best_d {
            best_d = d;
            best_word = Some(word.clone());
        }
    }
    if best_d <= eps / 4.0 {
        Ok(BasisElement {
            word: best_word.unwrap(),
            radius: eps,
            distance: best_d,
        })
    } else {
        Err(BallError::NotFoundAtDepth { best: best_d })
    }
}

/// Scott-continuous extension of a unitary to balls: apply to the center,
/// keep the radius. Unitaries are isometries, so order verdicts are
/// preserved.
pub fn apply_word_to_ball(ball: &FormalBall, word: &GateWord) -> Result<FormalBall, BallError> {
    let mut center = ball.center.clone();
    let n = word.qubits;
    if center.dim() != (1usize << n) {
        return Err(BallError::DimMismatch {
            a: center.dim(),
            b: 1usize << n,
        });
    }
    for (g, targets) in &word.letters {
        let u = state::embed_gate(*g, targets, n)?;
        center = center.apply_matrix(&u);
    }
    Ok(FormalBall::new(center, ball.radius))
}
