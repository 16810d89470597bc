//! Generic order-theoretic facilities: least-fixed-point iteration and
//! brute-force oracles over explicit finite posets.
//!
//! The infinite domains elsewhere in the crate (balls, valuations) implement
//! their orders directly; this module supplies the finite machinery they are
//! validated against. Posets are validated at construction, exhaustively.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("relation table is not square: {rows} rows for {elements} elements")]
    NotSquare { rows: usize, elements: usize },
    #[error("function is not monotone: {x} <= {y} but f({x}) !<= f({y})")]
    NotMonotone { x: usize, y: usize },
    #[error("function table has wrong length or out-of-range values")]
    BadFunction,
    #[error("function has no fixed point")]
    NoFixedPoint,
    #[error("fixed points exist but none is least")]
    NoLeastFixedPoint,
}

/// The first poset axiom violated by a relation table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PosetViolation {
    Reflexivity { x: usize },
    Antisymmetry { x: usize, y: usize },
    Transitivity { x: usize, y: usize, z: usize },
}

impl std::fmt::Display for PosetViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PosetViolation::Reflexivity { x } => write!(f, "reflexivity fails at {x}"),
            PosetViolation::Antisymmetry { x, y } => {
                write!(f, "antisymmetry fails at ({x}, {y})")
            }
            PosetViolation::Transitivity { x, y, z } => {
                write!(f, "transitivity fails at ({x}, {y}, {z})")
            }
        }
    }
}

/// Finite poset over labelled elements with an explicit relation table.
#[derive(Debug, Clone)]
pub struct FinitePoset {
    labels: Vec<String>,
    leq: Vec<bool>,
}

impl FinitePoset {
    /// Validates all three axioms before accepting the table.
    pub fn new(labels: Vec<String>, leq: Vec<Vec<bool>>) -> Result<Self, PosetViolation> {
        let n = labels.len();
        let flat: Vec<bool> = leq.iter().flatten().copied().collect();
        assert!(
            leq.len() == n && flat.len() == n * n,
            "relation table must be {n} x {n}"
        );
        let p = Self { labels, leq: flat };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<(), PosetViolation> {
        let n = self.len();
        for x in 0..n {
            if !self.leq(x, x) {
                return Err(PosetViolation::Reflexivity { x });
            }
        }
        for x in 0..n {
            for y in 0..n {
                if x != y && self.leq(x, y) && self.leq(y, x) {
                    return Err(PosetViolation::Antisymmetry { x, y });
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                if !self.leq(x, y) {
                    continue;
                }
                for z in 0..n {
                    if self.leq(y, z) && !self.leq(x, z) {
                        return Err(PosetViolation::Transitivity { x, y, z });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.leq[x * self.labels.len() + y]
    }

    /// Index of the least element, if one exists.
    pub fn bottom(&self) -> Option<usize> {
        (0..self.len()).find(|&b| (0..self.len()).all(|x| self.leq(b, x)))
    }

    /// Least upper bound of a subset, if it exists.
    pub fn lub(&self, subset: &[usize]) -> Option<usize> {
        let n = self.len();
        let uppers: Vec<usize> = (0..n)
            .filter(|&u| subset.iter().all(|&a| self.leq(a, u)))
            .collect();
        uppers
            .iter()
            .copied()
            .find(|&u0| uppers.iter().all(|&u| self.leq(u0, u)))
    }

    /// True when the subset is directed: nonempty and every pair has an
    /// upper bound inside the subset.
    pub fn is_directed(&self, subset: &[usize]) -> bool {
        if subset.is_empty() {
            return false;
        }
        subset.iter().all(|&x| {
            subset
                .iter()
                .all(|&y| subset.iter().any(|&z| self.leq(x, z) && self.leq(y, z)))
        })
    }
}

/// Checks the three poset axioms on a raw table, reporting the first
/// violation. `true` means the table is a poset.
pub fn validate_poset(labels: &[String], leq: &[Vec<bool>]) -> Result<(), PosetViolation> {
    FinitePoset::new(labels.to_vec(), leq.to_vec()).map(|_| ())
}

/// Outcome of Kleene iteration from bottom: the chain `f^n(bottom)` until two
/// consecutive iterates are equal or the iteration budget runs out.
#[derive(Debug, Clone)]
pub struct FixpointReport<T> {
    pub value: T,
    pub iterations: usize,
    pub converged: bool,
    /// 0 once the step map stabilizes, 1 while it still moves.
    pub residual: f64,
}

/// Iterates `f^n(bottom)` until `eq(f^n, f^(n+1))` or `max_iter`.
///
/// Non-convergence is data: the report carries the last iterate with
/// `converged = false`.
pub fn lfp_iterate<T, F, E>(f: F, bottom: T, eq: E, max_iter: usize) -> FixpointReport<T>
where
    F: Fn(&T) -> T,
    E: Fn(&T, &T) -> bool,
{
    let mut current = bottom;
    for n in 0..=max_iter {
        let next = f(&current);
        if eq(&current, &next) {
            return FixpointReport {
                value: current,
                iterations: n,
                converged: true,
                residual: 0.0,
            };
        }
        current = next;
    }
    FixpointReport {
        value: current,
        iterations: max_iter,
        converged: false,
        residual: 1.0,
    }
}

/// Least fixed point of `f` by exhaustive scan. `f` is a table mapping each
/// element index to its image and must be monotone.
pub fn least_fixed_point_bruteforce(p: &FinitePoset, f: &[usize]) -> Result<usize, DomainError> {
    let n = p.len();
    if f.len() != n || f.iter().any(|&v| v >= n) {
        return Err(DomainError::BadFunction);
    }
    for x in 0..n {
        for y in 0..n {
            if p.leq(x, y) && !p.leq(f[x], f[y]) {
                return Err(DomainError::NotMonotone { x, y });
            }
        }
    }
    let fixed: Vec<usize> = (0..n).filter(|&x| f[x] == x).collect();
    if fixed.is_empty() {
        return Err(DomainError::NoFixedPoint);
    }
    fixed
        .iter()
        .copied()
        .find(|&m| fixed.iter().all(|&x| p.leq(m, x)))
        .ok_or(DomainError::NoLeastFixedPoint)
}

/// Way-below by exhaustive enumeration of directed subsets: `x << y` iff
/// every directed subset `A` whose least upper bound exists and dominates `y`
/// contains some `a` with `x <= a`.
pub fn way_below_finite(p: &FinitePoset, x: usize, y: usize) -> bool {
    let n = p.len();
    assert!(n <= 20, "exhaustive directed-subset scan caps at 20 elements");
    let mut subset = Vec::with_capacity(n);
    for mask in 1u32..(1 << n) {
        subset.clear();
        for i in 0..n {
            if mask & (1 << i) != 0 {
                subset.push(i);
            }
        }
        if !p.is_directed(&subset) {
            continue;
        }
        let Some(lub) = p.lub(&subset) else { continue };
        if p.leq(y, lub) && !subset.iter().any(|&a| p.leq(x, a)) {
            return false;
        }
    }
    true
}

/// Random poset generation for tests and oracle suites: element 0 is forced
/// to be a bottom, so monotone maps always have a least fixed point.
pub fn random_poset_with_bottom(rng: &mut impl rand::Rng, max_elements: usize) -> FinitePoset {
    let n = rng.gen_range(1..=max_elements);
    let mut leq = vec![vec![false; n]; n];
    for (i, row) in leq.iter_mut().enumerate() {
        row[i] = true;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if i == 0 || rng.gen_bool(0.4) {
                leq[i][j] = true;
            }
        }
    }
    // transitive closure (upward edges only, so antisymmetry is automatic)
    for k in 0..n {
        for i in 0..n {
            if leq[i][k] {
                for j in 0..n {
                    if leq[k][j] {
                        leq[i][j] = true;
                    }
                }
            }
        }
    }
    let labels = (0..n).map(|i| format!("e{i}")).collect();
    FinitePoset::new(labels, leq).expect("constructed table is a poset")
}

/// Random monotone endofunction on `p`, by rejection with a constant-map
/// fallback.
pub fn random_monotone_endofunction(p: &FinitePoset, rng: &mut impl rand::Rng) -> Vec<usize> {
    let n = p.len();
    for _ in 0..200 {
        let f: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        let monotone = (0..n).all(|x| (0..n).all(|y| !p.leq(x, y) || p.leq(f[x], f[y])));
        if monotone {
            return f;
        }
    }
    vec![rng.gen_range(0..n); n]
}
