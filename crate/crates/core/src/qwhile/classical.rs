//! Finite discrete probabilistic WHILE evaluator and the diagonal embedding
//! into the quantum language.
//!
//! States are sub-probability vectors over bit-vectors; bit `i` occupies the
//! same position as qubit `i` in basis indices, so the diagonal of a quantum
//! state lines up with a classical distribution componentwise.

use super::ast::{Cond, Stmt};
use super::eval::EvalConfig;
use crate::state::Gate;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TranslateError {
    #[error("general function assignments have no quantum translation")]
    Untranslatable,
}

/// Single-bit test `bit == value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CondBit {
    pub bit: usize,
    pub value: u8,
}

impl CondBit {
    pub fn new(bit: usize, value: u8) -> Self {
        assert!(value <= 1);
        Self { bit, value }
    }

    pub fn negate(&self) -> Self {
        Self {
            bit: self.bit,
            value: 1 - self.value,
        }
    }
}

/// Statements over bit-vector states.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassicalStmt {
    Skip,
    /// `bit := value`.
    AssignConst { bit: usize, value: u8 },
    /// `bit := f(bits)` for an arbitrary boolean function, given as a truth
    /// table indexed by the full bit-vector.
    AssignFn { bit: usize, table: Vec<bool> },
    /// `bit := random`, a fair coin.
    Coin { bit: usize },
    Seq(Box<ClassicalStmt>, Box<ClassicalStmt>),
    If(CondBit, Box<ClassicalStmt>, Box<ClassicalStmt>),
    While(CondBit, Box<ClassicalStmt>),
}

impl ClassicalStmt {
    pub fn seq(a: ClassicalStmt, b: ClassicalStmt) -> Self {
        ClassicalStmt::Seq(Box::new(a), Box::new(b))
    }
}

/// A classical program over a fixed number of bits.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalProgram {
    pub bits: usize,
    pub body: ClassicalStmt,
}

/// Mass on states satisfying the condition; the rest is zeroed.
fn restrict(dist: &[f64], c: &CondBit, bits: usize) -> Vec<f64> {
    let bit = bits - 1 - c.bit;
    dist.iter()
        .enumerate()
        .map(|(i, &p)| {
            if ((i >> bit) & 1) as u8 == c.value {
                p
            } else {
                0.0
            }
        })
        .collect()
}

fn add_into(acc: &mut [f64], other: &[f64]) {
    for (a, b) in acc.iter_mut().zip(other) {
        *a += b;
    }
}

fn run_stmt(s: &ClassicalStmt, dist: Vec<f64>, bits: usize, cfg: &EvalConfig) -> (Vec<f64>, f64) {
    let dim = dist.len();
    match s {
        ClassicalStmt::Skip => (dist, 0.0),
        ClassicalStmt::AssignConst { bit, value } => {
            let b = bits - 1 - bit;
            let mut next = vec![0.0; dim];
            for (i, &p) in dist.iter().enumerate() {
                let target = if *value == 1 { i | (1 << b) } else { i & !(1 << b) };
                next[target] += p;
            }
            (next, 0.0)
        }
        ClassicalStmt::AssignFn { bit, table } => {
            let b = bits - 1 - bit;
            let mut next = vec![0.0; dim];
            for (i, &p) in dist.iter().enumerate() {
                let target = if table[i] { i | (1 << b) } else { i & !(1 << b) };
                next[target] += p;
            }
            (next, 0.0)
        }
        ClassicalStmt::Coin { bit } => {
            let b = bits - 1 - bit;
            let mut next = vec![0.0; dim];
            for (i, &p) in dist.iter().enumerate() {
                next[i & !(1 << b)] += 0.5 * p;
                next[i | (1 << b)] += 0.5 * p;
            }
            (next, 0.0)
        }
        ClassicalStmt::Seq(a, b) => {
            let (mid, r1) = run_stmt(a, dist, bits, cfg);
            let (out, r2) = run_stmt(b, mid, bits, cfg);
            (out, r1 + r2)
        }
        ClassicalStmt::If(c, then_branch, else_branch) => {
            let taken = restrict(&dist, c, bits);
            let skipped = restrict(&dist, &c.negate(), bits);
            let (a, r1) = run_stmt(then_branch, taken, bits, cfg);
            let (b, r2) = run_stmt(else_branch, skipped, bits, cfg);
            let mut out = a;
            add_into(&mut out, &b);
            (out, r1 + r2)
        }
        ClassicalStmt::While(c, body) => {
            let mut exits = vec![0.0; dim];
            let mut current = dist;
            let mut inner = 0.0;
            let mut passes = 0usize;
            loop {
                add_into(&mut exits, &restrict(&current, &c.negate(), bits));
                let survivor = restrict(&current, c, bits);
                let mass: f64 = survivor.iter().sum();
                if mass <= cfg.tol {
                    return (exits, mass.max(0.0) + inner);
                }
                if passes >= cfg.max_iter {
                    return (exits, mass + inner);
                }
                let (next, leaked) = run_stmt(body, survivor, bits, cfg);
                inner += leaked;
                current = next;
                passes += 1;
            }
        }
    }
}

/// Kozen semantics over the finite discrete measure space: returns the
/// terminated sub-distribution and the residual (unterminated) mass.
pub fn run_classical(p: &ClassicalProgram, dist: &[f64], cfg: &EvalConfig) -> (Vec<f64>, f64) {
    assert_eq!(dist.len(), 1 << p.bits, "distribution size mismatch");
    run_stmt(&p.body, dist.to_vec(), p.bits, cfg)
}

/// Translates a classical program to a quantum statement over one qubit per
/// bit. Constant assignment becomes a conditional flip; a coin becomes
/// measure-Hadamard-measure (the leading measurement enforces classicality
/// from non-diagonal inputs); structure is preserved. General function
/// assignments are not translatable.
pub fn translate_classical(p: &ClassicalProgram) -> Result<Stmt, TranslateError> {
    translate_stmt(&p.body)
}

fn translate_stmt(s: &ClassicalStmt) -> Result<Stmt, TranslateError> {
    Ok(match s {
        ClassicalStmt::Skip => Stmt::Skip,
        ClassicalStmt::AssignConst { bit, value } => {
            // flip exactly when the qubit disagrees with the target value
            let disagree = Cond::new(*bit, 1 - *value);
            Stmt::If(
                disagree,
                Box::new(Stmt::Apply(Gate::X, vec![*bit])),
                Box::new(Stmt::Skip),
            )
        }
        ClassicalStmt::AssignFn { .. } => return Err(TranslateError::Untranslatable),
        ClassicalStmt::Coin { bit } => Stmt::seq_all(vec![
            Stmt::Measure(*bit),
            Stmt::Apply(Gate::H, vec![*bit]),
            Stmt::Measure(*bit),
        ]),
        ClassicalStmt::Seq(a, b) => Stmt::seq(translate_stmt(a)?, translate_stmt(b)?),
        ClassicalStmt::If(c, a, b) => Stmt::If(
            Cond::new(c.bit, c.value),
            Box::new(translate_stmt(a)?),
            Box::new(translate_stmt(b)?),
        ),
        ClassicalStmt::While(c, body) => Stmt::While(
            Cond::new(c.bit, c.value),
            Box::new(translate_stmt(body)?),
        ),
    })
}

/// Random translatable classical program, for the agreement checks.
pub fn random_classical_stmt(
    rng: &mut impl rand::Rng,
    bits: usize,
    depth: usize,
) -> ClassicalStmt {
    let leaf = depth == 0;
    let choice = if leaf {
        rng.gen_range(0..3)
    } else {
        rng.gen_range(0..6)
    };
    let bit = rng.gen_range(0..bits);
    match choice {
        0 => ClassicalStmt::Skip,
        1 => ClassicalStmt::AssignConst {
            bit,
            value: rng.gen_range(0..2),
        },
        2 => ClassicalStmt::Coin { bit },
        3 => ClassicalStmt::seq(
            random_classical_stmt(rng, bits, depth - 1),
            random_classical_stmt(rng, bits, depth - 1),
        ),
        4 => ClassicalStmt::If(
            CondBit::new(bit, rng.gen_range(0..2)),
            Box::new(random_classical_stmt(rng, bits, depth - 1)),
            Box::new(random_classical_stmt(rng, bits, depth - 1)),
        ),
        _ => ClassicalStmt::While(
            CondBit::new(bit, rng.gen_range(0..2)),
            Box::new(random_classical_stmt(rng, bits, depth - 1)),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qwhile::eval;
    use crate::state::DensityMatrix;
    use crate::testutil;
    use rand::prelude::*;

    #[test]
    fn constant_assignment_pushes_mass() {
        let p = ClassicalProgram {
            bits: 1,
            body: ClassicalStmt::AssignConst { bit: 0, value: 1 },
        };
        let (out, residual) = run_classical(&p, &[0.5, 0.5], &EvalConfig::default());
        assert_eq!(out, vec![0.0, 1.0]);
        assert_eq!(residual, 0.0);
    }

    #[test]
    fn coin_splits_point_mass() {
        let p = ClassicalProgram {
            bits: 1,
            body: ClassicalStmt::Coin { bit: 0 },
        };
        let (out, _) = run_classical(&p, &[1.0, 0.0], &EvalConfig::default());
        assert_eq!(out, vec![0.5, 0.5]);
    }

    #[test]
    fn coin_loop_is_geometric() {
        let p = ClassicalProgram {
            bits: 1,
            body: ClassicalStmt::While(
                CondBit::new(0, 1),
                Box::new(ClassicalStmt::Coin { bit: 0 }),
            ),
        };
        for n in 1..=20 {
            let cfg = EvalConfig {
                tol: 0.0,
                max_iter: n,
            };
            let (out, residual) = run_classical(&p, &[0.0, 1.0], &cfg);
            assert!((residual - 0.5f64.powi(n as i32)).abs() < 1e-12);
            assert!(out[1] == 0.0);
        }
        let (out, residual) = run_classical(&p, &[0.0, 1.0], &EvalConfig::default());
        assert!((out[0] - 1.0).abs() < 1e-8);
        assert!(residual < 1e-9);
    }

    #[test]
    fn function_assignment_runs_but_does_not_translate() {
        // bit0 := bit0 XOR bit1 on two bits
        let table: Vec<bool> = (0..4).map(|i| ((i >> 1) ^ i) & 1 == 1).collect();
        let p = ClassicalProgram {
            bits: 2,
            body: ClassicalStmt::AssignFn { bit: 0, table },
        };
        let (out, _) = run_classical(&p, &[0.25; 4], &EvalConfig::default());
        assert!((out.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(translate_classical(&p), Err(TranslateError::Untranslatable));
    }

    #[test]
    fn skip_translates_to_skip() {
        let p = ClassicalProgram {
            bits: 1,
            body: ClassicalStmt::Skip,
        };
        assert_eq!(translate_classical(&p).unwrap(), Stmt::Skip);
    }

    #[test]
    fn coin_translation_agrees_from_diagonal_states() {
        let p = ClassicalProgram {
            bits: 1,
            body: ClassicalStmt::Coin { bit: 0 },
        };
        let stmt = translate_classical(&p).unwrap();
        let cfg = EvalConfig::default();
        for dist in [[1.0, 0.0], [0.0, 1.0], [0.3, 0.7]] {
            let (classical, _) = run_classical(&p, &dist, &cfg);
            let rho = DensityMatrix::from_diagonal(&dist);
            let report = eval(&stmt, &rho, 1, &cfg).unwrap();
            for (a, b) in classical.iter().zip(report.final_state.diagonal()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn random_translatable_programs_agree() {
        let mut rng = testutil::rng(81);
        let cfg = EvalConfig {
            tol: 1e-9,
            max_iter: 256,
        };
        for _ in 0..30 {
            let bits = rng.gen_range(1..=2);
            let body = random_classical_stmt(&mut rng, bits, 3);
            let p = ClassicalProgram { bits, body };
            let stmt = translate_classical(&p).expect("generator avoids function assignment");

            let raw: Vec<f64> = (0..(1 << bits)).map(|_| rng.gen_range(0.0..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let dist: Vec<f64> = raw.iter().map(|p| p / total).collect();

            let (classical, classical_residual) = run_classical(&p, &dist, &cfg);
            let rho = DensityMatrix::from_diagonal(&dist);
            let report = eval(&stmt, &rho, bits, &cfg).unwrap();

            for (a, b) in classical.iter().zip(report.final_state.diagonal()) {
                assert!((a - b).abs() < 1e-9, "diagonal mismatch: {a} vs {b}");
            }
            assert!((classical_residual - report.residual).abs() < 1e-9);
        }
    }

    #[test]
    fn while_coin_program_matches_quantum_geometry() {
        let p = ClassicalProgram {
            bits: 1,
            body: ClassicalStmt::While(
                CondBit::new(0, 1),
                Box::new(ClassicalStmt::Coin { bit: 0 }),
            ),
        };
        let stmt = translate_classical(&p).unwrap();
        for n in 1..=10 {
            let cfg = EvalConfig {
                tol: 0.0,
                max_iter: n,
            };
            let (_, classical_residual) = run_classical(&p, &[0.0, 1.0], &cfg);
            let rho = DensityMatrix::from_diagonal(&[0.0, 1.0]);
            let report = eval(&stmt, &rho, 1, &cfg).unwrap();
            assert!((classical_residual - report.residual).abs() < 1e-12);
        }
    }
}
