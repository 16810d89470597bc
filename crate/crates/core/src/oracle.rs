//! Reference oracle suites: deterministic computations whose serialized
//! output is written by the CLI and consumed by the test suite.
//!
//! Everything here is a function of its seed. Batches run through
//! [`crate::exec`], so the parallel and sequential builds produce identical
//! bytes.

use crate::ball;
use crate::domain::{self, FinitePoset};
use crate::exec;
use crate::info;
use crate::state::PureState;
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// One finite-poset least-fixed-point instance with both answers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixpointCase {
    pub elements: Vec<String>,
    pub leq: Vec<Vec<bool>>,
    pub endofunction: Vec<usize>,
    pub bruteforce_lfp: String,
    pub iterated_lfp: String,
    pub iterations: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixpointSuite {
    pub seed: u64,
    pub trials: usize,
    pub cases: Vec<FixpointCase>,
}

/// Random monotone endofunctions over random posets, solved by exhaustive
/// scan and by Kleene iteration from bottom; the two always agree.
pub fn fixpoint_suite(seed: u64, trials: usize) -> FixpointSuite {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs: Vec<(FinitePoset, Vec<usize>)> = (0..trials)
        .map(|_| {
            let p = domain::random_poset_with_bottom(&mut rng, 6);
            let f = domain::random_monotone_endofunction(&p, &mut rng);
            (p, f)
        })
        .collect();
    let cases = exec::map_collect(&inputs, |(p, f)| {
        let brute = domain::least_fixed_point_bruteforce(p, f)
            .expect("monotone maps on bottomed posets have a least fixed point");
        let bottom = p.bottom().expect("generated posets have a bottom");
        let report = domain::lfp_iterate(|x: &usize| f[*x], bottom, |a, b| a == b, p.len() + 2);
        assert!(report.converged, "iteration stalls only without a bottom");
        let leq = (0..p.len())
            .map(|i| (0..p.len()).map(|j| p.leq(i, j)).collect())
            .collect();
        FixpointCase {
            elements: p.labels().to_vec(),
            leq,
            endofunction: f.clone(),
            bruteforce_lfp: p.labels()[brute].clone(),
            iterated_lfp: p.labels()[report.value].clone(),
            iterations: report.iterations,
        }
    });
    FixpointSuite {
        seed,
        trials,
        cases,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BayesGridTable {
    pub outcomes: usize,
    pub steps: usize,
    pub grid: Vec<Vec<f64>>,
    pub leq: Vec<Vec<bool>>,
}

/// Full Bayesian order table over the simplex grid with the given step
/// count.
pub fn bayes_grid_table(outcomes: usize, steps: usize) -> BayesGridTable {
    let grid = info::simplex_grid(outcomes, steps);
    let leq = info::bayes_order_table(&grid);
    BayesGridTable {
        outcomes,
        steps,
        grid: grid.iter().map(|s| s.probs().to_vec()).collect(),
        leq,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GateWordCalibration {
    pub seed: u64,
    pub qubits: usize,
    pub max_len: usize,
    pub targets: Vec<TargetJson>,
    /// `best_distance[t][l]` is the best approximation distance for target
    /// `t` over words of length at most `l + 1`.
    pub best_distance: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TargetJson {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

/// Density calibration: fixed random single-qubit targets and the best
/// gate-word approximation distance at each depth. Distances are
/// non-increasing in depth.
pub fn gateword_calibration(seed: u64, targets: usize, max_len: usize) -> GateWordCalibration {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let states: Vec<PureState> = (0..targets).map(|_| haar_like_state(&mut rng, 2)).collect();
    let best_distance = exec::map_collect(&states, |t| {
        ball::best_distance_by_depth(t, max_len).expect("within enumeration caps")
    });
    GateWordCalibration {
        seed,
        qubits: 1,
        max_len,
        targets: states
            .iter()
            .map(|s| TargetJson {
                re: s.amplitudes().iter().map(|z| z.re).collect(),
                im: s.amplitudes().iter().map(|z| z.im).collect(),
            })
            .collect(),
        best_distance,
    }
}

/// Uniform-ish random state: normalized complex Gaussian vector via
/// Box-Muller.
pub fn haar_like_state(rng: &mut ChaCha8Rng, dim: usize) -> PureState {
    loop {
        let amps: Vec<Complex64> = (0..dim)
            .map(|_| {
                let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
                let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                let r = (-2.0 * u1.ln()).sqrt();
                Complex64::new(r * u2.cos(), r * u2.sin())
            })
            .collect();
        let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return PureState::new(amps.into_iter().map(|z| z / norm).collect())
                .expect("normalized by construction");
        }
    }
}

/// Known suites runnable from the command line.
pub const SUITES: [&str; 3] = ["fixpoint", "bayes-grid", "gateword-calibration"];
