//! Command-line surface for the quantum domain theory library.
//!
//! Exit codes: 0 for success (and positive order verdicts), 1 for
//! well-formed negative verdicts (not ordered, not converged), 2 for any
//! error. Diagnostics go to stderr only; numeric output is printed with 17
//! significant digits so repeated invocations are byte-identical.

use clap::{Args, Parser, Subcommand};
use qdom::ball::{self, FormalBall};
use qdom::info::{self, ClassicalState};
use qdom::jsonio::{
    self, AmplitudesJson, BallJson, DensityJson, RunReportJson, ValuationJson,
};
use qdom::oracle;
use qdom::qwhile::{self, EvalConfig};
use qdom::state::DensityMatrix;
use qdom::valuation::{self, PrincipalOpen, SimpleValuation};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_NEGATIVE: u8 = 1;
const EXIT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(
    name = "qdom",
    about = "Density-matrix interpreter for a quantum WHILE language with ball/valuation \
             state domains, Bayesian/spectral orders and entropy measurements",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a WHILE program on an input state
    Run(RunArgs),
    /// Decide an information order between two values
    Order(OrderArgs),
    /// Compute an entropy
    Entropy(EntropyArgs),
    /// Ball-domain operations
    Ball(BallArgs),
    /// Valuation-domain operations
    Val(ValArgs),
    /// Run a reference oracle suite and write its output files
    Oracle(OracleArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Program file (.qw)
    file: PathBuf,
    /// Basis label like "|10>" or a density-matrix JSON path
    #[arg(long, default_value = "|0>")]
    input: String,
    /// Loop termination tolerance (default from QDOM_TOL or 1e-9)
    #[arg(long)]
    tol: Option<f64>,
    /// Body-execution budget per loop
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
    /// Emit the run report as JSON
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct OrderArgs {
    /// Which order to decide
    #[arg(value_parser = ["bayes", "spectral", "ball", "val"])]
    kind: String,
    /// Left value: inline JSON or a file path
    lhs: String,
    /// Right value: inline JSON or a file path
    rhs: String,
    /// Comparison tolerance (default from QDOM_TOL or 1e-9)
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct EntropyArgs {
    /// shannon for classical states, vn for density matrices
    #[arg(value_parser = ["shannon", "vn"])]
    kind: String,
    /// Inline JSON or a file path
    state: String,
}

#[derive(Args)]
struct BallArgs {
    #[command(subcommand)]
    op: BallOp,
}

#[derive(Subcommand)]
enum BallOp {
    /// Reversed-inclusion order between two balls
    Leq { lhs: String, rhs: String },
    /// Strict way-below relation between two balls
    Waybelow { lhs: String, rhs: String },
    /// Find a gate-word basis element approximating a target state
    Approx {
        /// Target amplitudes: inline JSON or file ({"re": [...], "im": [...]})
        #[arg(long)]
        target: String,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 10)]
        max_len: usize,
    },
}

#[derive(Args)]
struct ValArgs {
    #[command(subcommand)]
    op: ValOp,
}

#[derive(Subcommand)]
enum ValOp {
    /// Pointwise order between two simple valuations
    Leq { lhs: String, rhs: String },
    /// Value of a valuation on a principal open (given by its base ball)
    Apply { valuation: String, base: String },
    /// Spectral embedding of a unit-trace density matrix
    Embed { rho: String },
    /// Increasing approximation chain for a density matrix
    Chain {
        rho: String,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[arg(long, default_value_t = 10)]
        word_depth: usize,
    },
}

#[derive(Args)]
struct OracleArgs {
    /// Suite name: fixpoint | bayes-grid | gateword-calibration
    suite: String,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Output directory for reference files
    #[arg(long, default_value = "oracle-out")]
    out: PathBuf,
    /// Trial count for randomized suites
    #[arg(long, default_value_t = 500)]
    trials: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn dispatch(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Order(args) => cmd_order(args),
        Command::Entropy(args) => cmd_entropy(args),
        Command::Ball(args) => cmd_ball(args),
        Command::Val(args) => cmd_val(args),
        Command::Oracle(args) => cmd_oracle(args),
    }
}

/// Default tolerance, overridable through QDOM_TOL.
fn default_tol() -> Result<f64, String> {
    match std::env::var("QDOM_TOL") {
        Ok(raw) => raw
            .parse::<f64>()
            .map_err(|_| format!("QDOM_TOL is not a number: {raw:?}")),
        Err(_) => Ok(qdom::DEFAULT_TOL),
    }
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Inline JSON if it parses, otherwise the contents of the file at `spec`.
fn inline_or_file(spec: &str) -> Result<String, String> {
    let trimmed = spec.trim();
    if serde_json::from_str::<serde_json::Value>(trimmed).is_ok() {
        return Ok(trimmed.to_string());
    }
    if Path::new(spec).exists() {
        return std::fs::read_to_string(spec).map_err(|e| format!("reading {spec}: {e}"));
    }
    Err(format!(
        "{spec:?} is neither valid inline JSON nor an existing file"
    ))
}

fn decode<T: serde::de::DeserializeOwned>(spec: &str, what: &str) -> Result<T, String> {
    let text = inline_or_file(spec)?;
    serde_json::from_str(&text).map_err(|e| format!("decoding {what}: {e}"))
}

fn load_density(spec: &str) -> Result<DensityMatrix, String> {
    let json: DensityJson = decode(spec, "density matrix")?;
    json.to_density().map_err(|e| e.to_string())
}

fn load_classical(spec: &str) -> Result<ClassicalState, String> {
    let probs: Vec<f64> = decode(spec, "classical state")?;
    ClassicalState::new(probs).map_err(|e| e.to_string())
}

fn load_ball(spec: &str) -> Result<FormalBall, String> {
    let json: BallJson = decode(spec, "ball")?;
    json.to_ball().map_err(|e| e.to_string())
}

fn load_valuation(spec: &str) -> Result<SimpleValuation, String> {
    let json: ValuationJson = decode(spec, "valuation")?;
    json.to_valuation().map_err(|e| e.to_string())
}

/// Parses a basis-state label like `|10>` (or `|10⟩`) into a density matrix,
/// or falls back to a density-matrix JSON path.
fn load_input_state(spec: &str, qubits: usize) -> Result<DensityMatrix, String> {
    let trimmed = spec.trim();
    if let Some(rest) = trimmed.strip_prefix('|') {
        let bits: &str = rest
            .strip_suffix('\u{27e9}')
            .or_else(|| rest.strip_suffix('>'))
            .ok_or_else(|| format!("basis label {spec:?} must end with '>'"))?;
        if bits.is_empty() || !bits.chars().all(|c| c == '0' || c == '1') {
            return Err(format!("basis label {spec:?} must contain only bits"));
        }
        if bits.len() != qubits {
            return Err(format!(
                "basis label {spec:?} has {} bit(s), program declares {qubits} qubit(s)",
                bits.len()
            ));
        }
        let index = usize::from_str_radix(bits, 2).expect("validated bits");
        let psi = qdom::state::PureState::basis(qubits, index);
        return Ok(qdom::state::density_of(&psi));
    }
    let rho = load_density(spec)?;
    if rho.dim() != (1usize << qubits) {
        return Err(format!(
            "input dimension {} does not match {qubits} qubit(s)",
            rho.dim()
        ));
    }
    Ok(rho)
}

fn cmd_run(args: RunArgs) -> Result<u8, String> {
    let tol = match args.tol {
        Some(t) => t,
        None => default_tol()?,
    };
    let source = std::fs::read_to_string(&args.file)
        .map_err(|e| format!("reading {}: {e}", args.file.display()))?;
    let program = qwhile::parse(&source).map_err(|e| e.to_string())?;
    let rho = load_input_state(&args.input, program.qubits)?;
    let cfg = EvalConfig {
        tol,
        max_iter: args.max_iter,
    };
    let report = qwhile::eval_program(&program, &rho, &cfg).map_err(|e| e.to_string())?;

    if args.json {
        let json = jsonio::to_json_string(&RunReportJson::of(&report))
            .map_err(|e| e.to_string())?;
        print!("{json}");
    } else {
        println!("final state (dim {}):", report.final_state.dim());
        let m = report.final_state.matrix();
        for i in 0..m.dim() {
            let row: Vec<String> = (0..m.dim())
                .map(|j| {
                    let z = m[(i, j)];
                    format!("{}{}{}i", fmt17(z.re), if z.im < 0.0 { "-" } else { "+" }, fmt17(z.im.abs()))
                })
                .collect();
            println!("  [{}]", row.join(", "));
        }
        println!("trace:     {}", fmt17(report.final_state.trace()));
        println!("residual:  {}", fmt17(report.residual));
        for (loop_id, count) in &report.iterations {
            println!("loop {loop_id}: {count} iteration(s)");
        }
        println!("converged: {}", report.converged);
    }
    if report.converged && report.residual <= tol {
        Ok(0)
    } else {
        Ok(EXIT_NEGATIVE)
    }
}

fn cmd_order(args: OrderArgs) -> Result<u8, String> {
    let tol = match args.tol {
        Some(t) => t,
        None => default_tol()?,
    };
    let ordered = match args.kind.as_str() {
        "bayes" => {
            let x = load_classical(&args.lhs)?;
            let y = load_classical(&args.rhs)?;
            let verdict = info::bayes_leq(&x, &y).map_err(|e| e.to_string())?;
            println!("ordered: {verdict}");
            verdict
        }
        "spectral" => {
            let rho = load_density(&args.lhs)?;
            let sigma = load_density(&args.rhs)?;
            let cmp = info::spectral_compare(&rho, &sigma, tol).map_err(|e| e.to_string())?;
            println!("ordered: {}", cmp.ordered);
            println!("commutator max-norm: {}", fmt17(cmp.commutator));
            if let Some((x, y)) = &cmp.spectra {
                let fmt_vec = |s: &ClassicalState| {
                    s.probs()
                        .iter()
                        .map(|&p| fmt17(p))
                        .collect::<Vec<_>>()
                        .join(", ")
                };
                println!("lhs spectrum: [{}]", fmt_vec(x));
                println!("rhs spectrum: [{}]", fmt_vec(y));
            }
            cmp.ordered
        }
        "ball" => {
            let a = load_ball(&args.lhs)?;
            let b = load_ball(&args.rhs)?;
            let verdict = ball::ball_leq(&a, &b, tol).map_err(|e| e.to_string())?;
            println!("ordered: {verdict}");
            verdict
        }
        "val" => {
            let v = load_valuation(&args.lhs)?;
            let w = load_valuation(&args.rhs)?;
            let verdict = valuation::valuation_leq(&v, &w, tol).map_err(|e| e.to_string())?;
            println!("ordered: {verdict}");
            verdict
        }
        other => return Err(format!("unknown order kind {other:?}")),
    };
    Ok(if ordered { 0 } else { EXIT_NEGATIVE })
}

fn cmd_entropy(args: EntropyArgs) -> Result<u8, String> {
    let value = match args.kind.as_str() {
        "shannon" => info::shannon_entropy(&load_classical(&args.state)?),
        "vn" => info::von_neumann_entropy(&load_density(&args.state)?)
            .map_err(|e| e.to_string())?,
        other => return Err(format!("unknown entropy kind {other:?}")),
    };
    println!("{}", fmt17(value));
    Ok(0)
}

fn cmd_ball(args: BallArgs) -> Result<u8, String> {
    let tol = default_tol()?;
    match args.op {
        BallOp::Leq { lhs, rhs } => {
            let a = load_ball(&lhs)?;
            let b = load_ball(&rhs)?;
            let verdict = ball::ball_leq(&a, &b, tol).map_err(|e| e.to_string())?;
            println!("ordered: {verdict}");
            Ok(if verdict { 0 } else { EXIT_NEGATIVE })
        }
        BallOp::Waybelow { lhs, rhs } => {
            let a = load_ball(&lhs)?;
            let b = load_ball(&rhs)?;
            let verdict = ball::ball_way_below(&a, &b, tol).map_err(|e| e.to_string())?;
            println!("way-below: {verdict}");
            Ok(if verdict { 0 } else { EXIT_NEGATIVE })
        }
        BallOp::Approx {
            target,
            eps,
            max_len,
        } => {
            let amps: AmplitudesJson = decode(&target, "target amplitudes")?;
            let psi = amps.to_pure().map_err(|e| e.to_string())?;
            let be = ball::approximate_state(&psi, eps, max_len).map_err(|e| e.to_string())?;
            let out = serde_json::json!({
                "word": be.word.to_string(),
                "qubits": be.word.qubits,
                "radius": be.radius,
                "distance": be.distance,
            });
            print!(
                "{}",
                jsonio::to_json_string(&out).map_err(|e| e.to_string())?
            );
            Ok(0)
        }
    }
}

fn cmd_val(args: ValArgs) -> Result<u8, String> {
    let tol = default_tol()?;
    match args.op {
        ValOp::Leq { lhs, rhs } => {
            let v = load_valuation(&lhs)?;
            let w = load_valuation(&rhs)?;
            let verdict = valuation::valuation_leq(&v, &w, tol).map_err(|e| e.to_string())?;
            println!("ordered: {verdict}");
            Ok(if verdict { 0 } else { EXIT_NEGATIVE })
        }
        ValOp::Apply { valuation, base } => {
            let v = load_valuation(&valuation)?;
            let b = load_ball(&base)?;
            let value = valuation::valuation_apply(&v, &PrincipalOpen::new(b), tol)
                .map_err(|e| e.to_string())?;
            println!("{}", fmt17(value));
            Ok(0)
        }
        ValOp::Embed { rho } => {
            let rho = load_density(&rho)?;
            let v = valuation::embed_density(&rho).map_err(|e| e.to_string())?;
            print!(
                "{}",
                jsonio::to_json_string(&ValuationJson::of(&v)).map_err(|e| e.to_string())?
            );
            Ok(0)
        }
        ValOp::Chain {
            rho,
            levels,
            word_depth,
        } => {
            let rho = load_density(&rho)?;
            let chain = valuation::approximation_chain(&rho, levels, word_depth)
                .map_err(|e| e.to_string())?;
            let encoded: Vec<ValuationJson> = chain.iter().map(ValuationJson::of).collect();
            print!(
                "{}",
                jsonio::to_json_string(&encoded).map_err(|e| e.to_string())?
            );
            Ok(0)
        }
    }
}

fn cmd_oracle(args: OracleArgs) -> Result<u8, String> {
    std::fs::create_dir_all(&args.out)
        .map_err(|e| format!("creating {}: {e}", args.out.display()))?;
    let (name, contents) = match args.suite.as_str() {
        "fixpoint" => {
            let suite = oracle::fixpoint_suite(args.seed, args.trials);
            (
                format!("fixpoint_seed{}.json", args.seed),
                jsonio::to_json_string(&suite).map_err(|e| e.to_string())?,
            )
        }
        "bayes-grid" => {
            let table = oracle::bayes_grid_table(3, 10);
            (
                "bayes_grid_d3_steps10.json".to_string(),
                jsonio::to_json_string(&table).map_err(|e| e.to_string())?,
            )
        }
        "gateword-calibration" => {
            let cal = oracle::gateword_calibration(args.seed, 10, 12);
            (
                format!("gateword_calibration_seed{}.json", args.seed),
                jsonio::to_json_string(&cal).map_err(|e| e.to_string())?,
            )
        }
        other => {
            return Err(format!(
                "unknown oracle suite {other:?}; known: {}",
                oracle::SUITES.join(", ")
            ))
        }
    };
    let path = args.out.join(name);
    std::fs::write(&path, contents).map_err(|e| format!("writing {}: {e}", path.display()))?;
    println!("{}", path.display());
    Ok(0)
}
