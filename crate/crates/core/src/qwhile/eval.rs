//! Denotational evaluation: every statement acts as a CP map on density
//! matrices.
//!
//! While-loops accumulate the partial sums of exit chunks: on each loop
//! entry the state splits through the condition projectors, the failing part
//! joins the output, and the body runs on the surviving part. The loop stops
//! when the surviving mass falls to the tolerance (converged) or the body
//! budget runs out; either way the surviving mass is reported as residual,
//! so `trace(final) + residual = trace(input)` always holds. Non-termination
//! is data, never an error.

use super::ast::{Cond, Program, Stmt};
use crate::state::{self, DensityMatrix, Gate, StateError};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("state dimension {dim} does not match a {qubits}-qubit register")]
    DimMismatch { dim: usize, qubits: usize },
    #[error("qubit index q{qubit} out of range for {qubits} qubit(s)")]
    QubitOutOfRange { qubit: usize, qubits: usize },
    #[error("loop did not converge: residual {residual:e}")]
    NotConverged { residual: f64 },
    #[error("statement is not a while loop")]
    NotAWhile,
    #[error(transparent)]
    State(#[from] StateError),
}

/// Loop iteration controls.
#[derive(Debug, Clone, Copy)]
pub struct EvalConfig {
    /// Surviving-mass threshold that counts as termination.
    pub tol: f64,
    /// Budget of body executions per loop entry into `eval`.
    pub max_iter: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            tol: crate::DEFAULT_TOL,
            max_iter: 10_000,
        }
    }
}

/// Evaluation outcome: the reached sub-probability state plus residual
/// bookkeeping.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub final_state: DensityMatrix,
    /// Unterminated mass: surviving loop mass plus residuals of nested loops.
    pub residual: f64,
    /// Accumulation steps per syntactic loop (pre-order index); each entry
    /// counts how many exit chunks the partial sum collected, totalled over
    /// loop invocations.
    pub iterations: BTreeMap<usize, usize>,
    /// True when every loop pass terminated within tolerance.
    pub converged: bool,
}

/// Projects onto the condition: `P_B rho P_B`.
pub fn denote_cond(c: &Cond, rho: &DensityMatrix) -> Result<DensityMatrix, EvalError> {
    let n = rho.qubits();
    if rho.dim() != (1usize << n) {
        return Err(EvalError::DimMismatch {
            dim: rho.dim(),
            qubits: n,
        });
    }
    if c.qubit >= n {
        return Err(EvalError::QubitOutOfRange {
            qubit: c.qubit,
            qubits: n,
        });
    }
    let p = state::qubit_projector(c.qubit, c.value, n);
    let out = p
        .matmul(rho.matrix())
        .map_err(StateError::from)?
        .matmul(&p)
        .map_err(StateError::from)?;
    Ok(DensityMatrix::from_op_output(out))
}

struct Evaluator {
    qubits: usize,
    cfg: EvalConfig,
    iterations: BTreeMap<usize, usize>,
    all_converged: bool,
}

impl Evaluator {
    /// Returns the reached state and the residual mass lost to loops below
    /// this statement. `loop_id` numbers while-nodes in pre-order.
    fn run(
        &mut self,
        s: &Stmt,
        rho: DensityMatrix,
        loop_id: usize,
    ) -> Result<(DensityMatrix, f64), EvalError> {
        match s {
            Stmt::Skip => Ok((rho, 0.0)),
            Stmt::Apply(g, targets) => {
                let out = state::apply_unitary(&rho, *g, targets, self.qubits)?;
                Ok((out, 0.0))
            }
            Stmt::Measure(q) => {
                if *q >= self.qubits {
                    return Err(EvalError::QubitOutOfRange {
                        qubit: *q,
                        qubits: self.qubits,
                    });
                }
                let out = state::measure_qubit(&rho, *q, self.qubits)?;
                Ok((out, 0.0))
            }
            Stmt::Seq(a, b) => {
                let (mid, r1) = self.run(a, rho, loop_id)?;
                let (out, r2) = self.run(b, mid, loop_id + a.loop_count())?;
                Ok((out, r1 + r2))
            }
            Stmt::If(c, then_branch, else_branch) => {
                let taken = denote_cond(c, &rho)?;
                let skipped = denote_cond(&c.negate(), &rho)?;
                let (a, r1) = self.run(then_branch, taken, loop_id)?;
                let (b, r2) =
                    self.run(else_branch, skipped, loop_id + then_branch.loop_count())?;
                Ok((a.add(&b)?, r1 + r2))
            }
            Stmt::While(c, body) => {
                let mut exits = DensityMatrix::null(rho.dim());
                let mut current = rho;
                let mut inner_residual = 0.0;
                let mut passes = 0usize;
                loop {
                    *self.iterations.entry(loop_id).or_insert(0) += 1;
                    exits = exits.add(&denote_cond(&c.negate(), &current)?)?;
                    let survivor = denote_cond(c, &current)?;
                    let surviving_mass = survivor.trace();
                    if surviving_mass <= self.cfg.tol {
                        return Ok((exits, surviving_mass.max(0.0) + inner_residual));
                    }
                    if passes >= self.cfg.max_iter {
                        self.all_converged = false;
                        return Ok((exits, surviving_mass + inner_residual));
                    }
                    let (next, leaked) = self.run(body, survivor, loop_id + 1)?;
                    inner_residual += leaked;
                    current = next;
                    passes += 1;
                }
            }
        }
    }
}

/// Evaluates a statement on an `n`-qubit register.
pub fn eval(
    s: &Stmt,
    rho: &DensityMatrix,
    qubits: usize,
    cfg: &EvalConfig,
) -> Result<RunReport, EvalError> {
    if rho.dim() != (1usize << qubits) {
        return Err(EvalError::DimMismatch {
            dim: rho.dim(),
            qubits,
        });
    }
    if let Some(max) = s.max_qubit() {
        if max >= qubits {
            return Err(EvalError::QubitOutOfRange {
                qubit: max,
                qubits,
            });
        }
    }
    let mut evaluator = Evaluator {
        qubits,
        cfg: *cfg,
        iterations: BTreeMap::new(),
        all_converged: true,
    };
    let (final_state, residual) = evaluator.run(s, rho.clone(), 0)?;
    Ok(RunReport {
        final_state,
        residual,
        iterations: evaluator.iterations,
        converged: evaluator.all_converged,
    })
}

/// Evaluates a parsed program.
pub fn eval_program(
    p: &Program,
    rho: &DensityMatrix,
    cfg: &EvalConfig,
) -> Result<RunReport, EvalError> {
    eval(&p.body, rho, p.qubits, cfg)
}

/// Random statement with the given nesting depth, drawing uniformly over
/// the constructors; used by structural property tests and the oracle
/// batches.
pub fn random_stmt(rng: &mut impl rand::Rng, qubits: usize, depth: usize) -> Stmt {
    let leaf = depth == 0;
    let choice = if leaf {
        rng.gen_range(0..3)
    } else {
        rng.gen_range(0..6)
    };
    let q = rng.gen_range(0..qubits);
    match choice {
        0 => Stmt::Skip,
        1 => {
            let single = [Gate::H, Gate::X, Gate::P, Gate::T];
            if qubits >= 2 && rng.gen_bool(0.3) {
                let mut t = rng.gen_range(0..qubits);
                while t == q {
                    t = rng.gen_range(0..qubits);
                }
                Stmt::Apply(Gate::Cnot, vec![q, t])
            } else {
                Stmt::Apply(single[rng.gen_range(0..4)], vec![q])
            }
        }
        2 => Stmt::Measure(q),
        3 => Stmt::seq(
            random_stmt(rng, qubits, depth - 1),
            random_stmt(rng, qubits, depth - 1),
        ),
        4 => Stmt::If(
            Cond::new(q, rng.gen_range(0..2)),
            Box::new(random_stmt(rng, qubits, depth - 1)),
            Box::new(random_stmt(rng, qubits, depth - 1)),
        ),
        _ => Stmt::While(
            Cond::new(q, rng.gen_range(0..2)),
            Box::new(random_stmt(rng, qubits, depth - 1)),
        ),
    }
}

/// Defect of the loop fixed-point equation `W = e_{~B} + W . S . e_B` at the
/// given input: trace distance between `W(rho)` and
/// `e_{~B}(rho) + W(S(e_B(rho)))`. Small once the loop converged.
pub fn fixpoint_check(
    report: &RunReport,
    s: &Stmt,
    rho: &DensityMatrix,
    qubits: usize,
    cfg: &EvalConfig,
) -> Result<f64, EvalError> {
    let Stmt::While(c, body) = s else {
        return Err(EvalError::NotAWhile);
    };
    if !report.converged {
        return Err(EvalError::NotConverged {
            residual: report.residual,
        });
    }
    let exit_now = denote_cond(&c.negate(), rho)?;
    let taken = denote_cond(c, rho)?;
    let after_body = eval(body, &taken, qubits, cfg)?;
    let rerun = eval(s, &after_body.final_state, qubits, cfg)?;
    let rhs = exit_now.add(&rerun.final_state)?;
    Ok(report.final_state.trace_distance(&rhs)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qwhile::parse;
    use crate::state::{density_of, Gate, PureState};
    use crate::testutil;
    use num_complex::Complex64;
    use rand::prelude::*;

    fn run_src(src: &str, rho: &DensityMatrix, cfg: &EvalConfig) -> RunReport {
        let p = parse(src).unwrap();
        eval_program(&p, rho, cfg).unwrap()
    }

    #[test]
    fn denote_cond_examples() {
        let zero = DensityMatrix::zero_state(1);
        let kept = denote_cond(&Cond::new(0, 0), &zero).unwrap();
        assert!(kept.matrix().max_diff(zero.matrix()) == 0.0);

        let killed = denote_cond(&Cond::new(0, 1), &zero).unwrap();
        assert!(killed.trace().abs() < 1e-15);

        let plus = state::apply_unitary(&zero, Gate::H, &[0], 1).unwrap();
        let half = denote_cond(&Cond::new(0, 1), &plus).unwrap();
        assert!((half.trace() - 0.5).abs() < 1e-12);
        assert!(half.matrix()[(1, 1)].re - 0.5 < 1e-12);
        assert!(half.matrix()[(0, 0)].norm() < 1e-15);
    }

    #[test]
    fn hadamard_program() {
        let report = run_src(
            "qubits 1; apply H(q0)",
            &DensityMatrix::zero_state(1),
            &EvalConfig::default(),
        );
        let expect =
            crate::linalg::ComplexMatrix::new(2, vec![Complex64::new(0.5, 0.0); 4]).unwrap();
        assert!(report.final_state.matrix().max_diff(&expect) < 1e-12);
        assert_eq!(report.residual, 0.0);
        assert!(report.converged);
    }

    #[test]
    fn hadamard_then_measure() {
        let report = run_src(
            "qubits 1; apply H(q0); meas(q0)",
            &DensityMatrix::zero_state(1),
            &EvalConfig::default(),
        );
        let expect = crate::linalg::ComplexMatrix::diag(&[0.5, 0.5]);
        assert!(report.final_state.matrix().max_diff(&expect) < 1e-12);
    }

    #[test]
    fn x_flip_loop_terminates_at_two() {
        let one = density_of(&PureState::basis(1, 1));
        let report = run_src(
            "qubits 1; while q0==1 do { apply X(q0) }",
            &one,
            &EvalConfig::default(),
        );
        assert!(report.converged);
        assert_eq!(report.iterations.get(&0), Some(&2));
        assert!(report.residual <= 1e-15);
        let zero = DensityMatrix::zero_state(1);
        assert!(report.final_state.matrix().max_diff(zero.matrix()) <= 1e-15);
    }

    #[test]
    fn coin_loop_residual_halves_per_pass() {
        let one = density_of(&PureState::basis(1, 1));
        let p = parse("qubits 1; while q0==1 do { apply H(q0) }").unwrap();
        for n in 1..=20 {
            let cfg = EvalConfig {
                tol: 0.0,
                max_iter: n,
            };
            let report = eval_program(&p, &one, &cfg).unwrap();
            assert!(!report.converged);
            let expect = 0.5f64.powi(n as i32);
            assert!(
                (report.residual - expect).abs() < 1e-12,
                "n = {n}: residual {} vs {expect}",
                report.residual
            );
        }
        // with the default tolerance the loop converges to |0><0|
        let report = eval_program(&p, &one, &EvalConfig::default()).unwrap();
        assert!(report.converged);
        let zero = DensityMatrix::zero_state(1);
        assert!(report.final_state.trace_distance(&zero).unwrap() <= 1e-9);
    }

    #[test]
    fn fixpoint_equation_holds() {
        let one = density_of(&PureState::basis(1, 1));
        let cfg = EvalConfig::default();

        let p = parse("qubits 1; while q0==1 do { apply X(q0) }").unwrap();
        let report = eval_program(&p, &one, &cfg).unwrap();
        let defect = fixpoint_check(&report, &p.body, &one, 1, &cfg).unwrap();
        assert!(defect < 1e-12);

        let p = parse("qubits 1; while q0==1 do { apply H(q0) }").unwrap();
        let report = eval_program(&p, &one, &cfg).unwrap();
        let defect = fixpoint_check(&report, &p.body, &one, 1, &cfg).unwrap();
        assert!(defect <= 1e-8);
    }

    #[test]
    fn stationary_loop_reports_residual_one() {
        let one = density_of(&PureState::basis(1, 1));
        let cfg = EvalConfig {
            tol: 1e-9,
            max_iter: 50,
        };
        let p = parse("qubits 1; while q0==1 do { skip }").unwrap();
        let report = eval_program(&p, &one, &cfg).unwrap();
        assert!(!report.converged);
        assert!((report.residual - 1.0).abs() < 1e-12);
        assert!(report.final_state.trace() < 1e-12);
        assert!(matches!(
            fixpoint_check(&report, &p.body, &one, 1, &cfg),
            Err(EvalError::NotConverged { .. })
        ));
    }

    #[test]
    fn conditional_decomposition_is_exact() {
        let mut rng = testutil::rng(71);
        let src = "qubits 2; if q0==1 then { apply X(q1) } else { apply H(q1) }";
        let p = parse(src).unwrap();
        let cfg = EvalConfig::default();
        for _ in 0..10 {
            let rho = testutil::random_density(&mut rng, 4);
            let whole = eval_program(&p, &rho, &cfg).unwrap();
            let c = Cond::new(0, 1);
            let taken = denote_cond(&c, &rho).unwrap();
            let skipped = denote_cond(&c.negate(), &rho).unwrap();
            let then_out = eval(
                &Stmt::Apply(Gate::X, vec![1]),
                &taken,
                2,
                &cfg,
            )
            .unwrap();
            let else_out = eval(
                &Stmt::Apply(Gate::H, vec![1]),
                &skipped,
                2,
                &cfg,
            )
            .unwrap();
            let sum = then_out
                .final_state
                .add(&else_out.final_state)
                .unwrap();
            assert!(whole.final_state.matrix().max_diff(sum.matrix()) <= 1e-12);
        }
    }

    #[test]
    fn mass_conservation_on_random_programs() {
        let mut rng = testutil::rng(72);
        let cfg = EvalConfig {
            tol: 1e-12,
            max_iter: 64,
        };
        for _ in 0..100 {
            let qubits = rng.gen_range(1..=2);
            let s = random_stmt(&mut rng, qubits, 3);
            let rho = testutil::random_density(&mut rng, 1 << qubits).scale(rng.gen_range(0.1..1.0));
            let report = eval(&s, &rho, qubits, &cfg).unwrap();
            let books = report.final_state.trace() + report.residual;
            assert!(
                (books - rho.trace()).abs() < 1e-9,
                "mass books off: {books} vs {}",
                rho.trace()
            );
        }
    }

    #[test]
    fn evaluation_is_linear() {
        let mut rng = testutil::rng(73);
        let cfg = EvalConfig {
            tol: 1e-12,
            max_iter: 64,
        };
        for _ in 0..60 {
            let qubits = rng.gen_range(1..=2);
            let s = random_stmt(&mut rng, qubits, 3);
            let rho = testutil::random_density(&mut rng, 1 << qubits);
            let sigma = testutil::random_density(&mut rng, 1 << qubits);
            let (a, b) = (0.4, 0.5);
            let combo = rho.scale(a).add(&sigma.scale(b)).unwrap();
            let r_combo = eval(&s, &combo, qubits, &cfg).unwrap();
            let r_rho = eval(&s, &rho, qubits, &cfg).unwrap();
            let r_sigma = eval(&s, &sigma, qubits, &cfg).unwrap();
            let mix = r_rho
                .final_state
                .scale(a)
                .add(&r_sigma.final_state.scale(b))
                .unwrap();
            assert!(r_combo.final_state.matrix().max_diff(mix.matrix()) < 1e-9);
            let res_mix = a * r_rho.residual + b * r_sigma.residual;
            assert!((r_combo.residual - res_mix).abs() < 1e-9);
        }
    }

    #[test]
    fn evaluation_is_monotone_on_the_cone() {
        let mut rng = testutil::rng(74);
        let cfg = EvalConfig {
            tol: 1e-12,
            max_iter: 64,
        };
        for _ in 0..40 {
            let qubits = rng.gen_range(1..=2);
            let s = random_stmt(&mut rng, qubits, 3);
            let rho = testutil::random_density(&mut rng, 1 << qubits).scale(0.4);
            let extra = testutil::random_density(&mut rng, 1 << qubits).scale(0.5);
            let sigma = rho.add(&extra).unwrap();
            let out_rho = eval(&s, &rho, qubits, &cfg).unwrap();
            let out_sigma = eval(&s, &sigma, qubits, &cfg).unwrap();
            let diff = out_sigma
                .final_state
                .matrix()
                .sub(out_rho.final_state.matrix())
                .unwrap();
            assert!(
                crate::linalg::is_psd(&diff, 1e-8),
                "monotonicity violated on the positive cone"
            );
        }
    }

    #[test]
    fn loop_partial_sums_are_increasing() {
        let one = density_of(&PureState::basis(1, 1));
        let p = parse("qubits 1; while q0==1 do { apply H(q0) }").unwrap();
        let mut previous: Option<DensityMatrix> = None;
        for n in 1..=10 {
            let cfg = EvalConfig {
                tol: 0.0,
                max_iter: n,
            };
            let report = eval_program(&p, &one, &cfg).unwrap();
            let current = report.final_state;
            assert!(current.trace() <= one.trace() + 1e-12);
            if let Some(prev) = previous {
                let diff = current.matrix().sub(prev.matrix()).unwrap();
                assert!(crate::linalg::is_psd(&diff, 1e-9));
                assert!(current.trace() >= prev.trace() - 1e-12);
            }
            previous = Some(current);
        }
    }

    #[test]
    fn dim_mismatch_is_reported() {
        let rho = DensityMatrix::zero_state(2);
        let err = eval(&Stmt::Skip, &rho, 1, &EvalConfig::default());
        assert!(matches!(err, Err(EvalError::DimMismatch { .. })));
        let err = eval(&Stmt::Measure(3), &rho, 2, &EvalConfig::default());
        assert!(matches!(err, Err(EvalError::QubitOutOfRange { .. })));
    }
}
