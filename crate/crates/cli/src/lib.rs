//! Command-line front end: load or generate a problem, check step sizes, and
//! run the sequential or ring-simulated solver.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ringsplit::operators::Vector;
use ringsplit::problems::{builtin, grid_search, linear_solve, OracleSpec, ProblemSpec, BUILTINS};
use ringsplit::ringsim::RingNetwork;
use ringsplit::splitting::{
    dual_trajectory, gamma_upper, iterate, lambda_upper, validate_lambda, validate_params, zero_start, Mode, Status,
    StepParams, StopRule, Trace,
};

/// Environment variable that overrides `--seed`.
pub const SEED_ENV: &str = "RINGSPLIT_SEED";

/// Solution coordinates shown in the summary.
const SUMMARY_COORDS: usize = 8;

#[derive(Debug, Parser)]
#[command(name = "ringsplit", version, about = "Decentralised splitting for monotone inclusions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the solver and write traces.
    Solve(RunConfig),
    /// Check step sizes against the convergence intervals without solving.
    Validate(RunConfig),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    /// Cocoercive forward operators.
    Fb,
    /// Monotone Lipschitz forward operators with reflection.
    Frb,
    /// Per-operator choice; the last forward operator must be cocoercive.
    Mixed,
}

impl From<Algo> for Mode {
    fn from(a: Algo) -> Self {
        match a {
            Algo::Fb => Mode::Cocoercive,
            Algo::Frb => Mode::Lipschitz,
            Algo::Mixed => Mode::Mixed,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Exec {
    #[default]
    Sequential,
    Ring,
}

#[derive(Clone, Debug, Args)]
pub struct RunConfig {
    /// Problem description in JSON.
    #[arg(long, conflicts_with = "builtin")]
    pub problem: Option<PathBuf>,
    /// Built-in problem name.
    #[arg(long)]
    pub builtin: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of resolvent operators for parametrised built-ins, or the size
    /// used by `validate` without a problem.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 5)]
    pub dim: usize,
    #[arg(long, value_enum)]
    pub algo: Option<Algo>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Lipschitz constant for `validate` without a problem.
    #[arg(long)]
    pub lipschitz: Option<f64>,
    #[arg(long, default_value_t = 1e-18)]
    pub tol: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_iters: u64,
    #[arg(long, default_value_t = 1)]
    pub check_period: u64,
    #[arg(long, value_enum, default_value_t = Exec::Sequential)]
    pub exec: Exec,
    /// Trace CSV path.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// JSON-lines message log (ring execution only).
    #[arg(long)]
    pub log_messages: Option<PathBuf>,
    /// Final state as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// Applies the seed override from the environment, if set.
    pub fn with_env_seed(mut self, value: Option<String>) -> anyhow::Result<Self> {
        if let Some(v) = value {
            self.seed = v.trim().parse().with_context(|| format!("{SEED_ENV}={v} is not an unsigned integer"))?;
        }
        Ok(self)
    }

    fn has_problem(&self) -> bool {
        self.problem.is_some() || self.builtin.is_some()
    }

    /// Loads or generates the problem; `--algo` overrides its mode.
    pub fn load_problem(&self) -> anyhow::Result<ProblemSpec> {
        let mode = self.algo.map(Mode::from);
        let mut spec = match (&self.problem, &self.builtin) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                ProblemSpec::from_json(&text)?
            }
            (None, Some(name)) => builtin(name, self.n.unwrap_or(4), self.dim, self.seed, mode.unwrap_or(Mode::Cocoercive))?,
            (None, None) => bail!("no problem given: use --problem FILE or --builtin NAME ({})", BUILTINS.join(", ")),
        };
        if let Some(mode) = mode {
            spec.mode = mode;
        }
        spec.build()?;
        Ok(spec)
    }

    fn stop_rule(&self) -> StopRule {
        StopRule {
            tol_residual_sq: self.tol,
            max_iters: self.max_iters,
            check_period: self.check_period,
        }
    }
}

#[derive(Serialize)]
struct FinalState<'a> {
    problem: &'a str,
    mode: Mode,
    status: Status,
    iterations: u64,
    residual_sq: Option<f64>,
    lambda: f64,
    gamma: f64,
    solution: &'a Vector,
    x: &'a [Vector],
    z: &'a [Vector],
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `k,residual_sq,consensus_gap,dual_max_dist`, where the last column
/// is `max_i ‖B_i(x_i^k) - B_i(x_i^final)‖` (empty without forward operators).
pub fn write_trace_csv<W: Write>(trace: &Trace, out: W) -> anyhow::Result<()> {
    let duals = dual_trajectory(trace).ok();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "residual_sq", "consensus_gap", "dual_max_dist"])?;
    for (i, r) in trace.records.iter().enumerate() {
        let dual = duals
            .as_ref()
            .and_then(|d| d[i].iter().copied().reduce(f64::max))
            .map(fmt_f64)
            .unwrap_or_default();
        w.write_record([r.k.to_string(), fmt_f64(r.residual_sq), fmt_f64(r.consensus_gap), dual])?;
    }
    w.flush()?;
    Ok(())
}

fn create(path: &PathBuf) -> anyhow::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn solution_head(x: &Vector) -> String {
    let shown: Vec<String> = x.iter().take(SUMMARY_COORDS).map(|v| format!("{v:.9}")).collect();
    let more = if x.dim() > SUMMARY_COORDS {
        format!(", ... ({} more)", x.dim() - SUMMARY_COORDS)
    } else {
        String::new()
    };
    format!("[{}{more}]", shown.join(", "))
}

fn oracle_lines(spec: &ProblemSpec, x: &Vector) -> Vec<String> {
    let mut lines = Vec::new();
    if let Some(known) = &spec.known_solution {
        lines.push(format!("distance to known solution: {:.3e}", x.dist(known)));
    }
    match spec.oracle {
        Some(OracleSpec::LinearSolve) => match linear_solve(spec) {
            Ok(o) => lines.push(format!("linear-solve oracle distance: {:.3e}", x.dist(&o))),
            Err(e) => lines.push(format!("linear-solve oracle unavailable: {e}")),
        },
        Some(OracleSpec::GridSearch { step, radius }) => match grid_search(spec, step, radius) {
            Ok(g) => lines.push(format!(
                "grid-search oracle point {} (violation {:.3e}), distance {:.3e}",
                solution_head(&g.x),
                g.violation,
                x.dist(&g.x)
            )),
            Err(e) => lines.push(format!("grid-search oracle unavailable: {e}")),
        },
        None => {}
    }
    lines
}

fn solve(config: &RunConfig, stdout: &mut dyn Write) -> anyhow::Result<Status> {
    let spec = config.load_problem()?;
    let problem = spec.build()?;
    let params = StepParams::resolve(&problem, config.lambda, config.gamma)?;
    if config.log_messages.is_some() && config.exec != Exec::Ring {
        bail!("--log-messages needs --exec ring");
    }
    let stop = config.stop_rule();
    let record_duals = config.trace.is_some();
    let z0 = zero_start(&problem);
    let (z, x, trace, status) = match config.exec {
        Exec::Sequential => {
            let run = iterate(&problem, &params, z0, stop, record_duals)?;
            (run.state.z, run.state.x, run.trace, run.status)
        }
        Exec::Ring => {
            let mut net = RingNetwork::spawn(&problem, &params, &z0)?;
            net.set_logging(config.log_messages.is_some());
            let run = net.run_until_residual(stop, record_duals)?;
            if let Some(path) = &config.log_messages {
                let mut w = create(path)?;
                net.write_log_jsonl(&mut w)?;
                w.flush()?;
            }
            let rounds = run.summary.rounds.len().max(1);
            writeln!(
                stdout,
                "messages: {} total, {} per round on average",
                run.summary.total(),
                run.summary.total() / rounds
            )?;
            (run.z, run.x, run.trace, run.status)
        }
    };
    if let Some(path) = &config.trace {
        let mut w = create(path)?;
        write_trace_csv(&trace, &mut w)?;
        w.flush()?;
    }
    let last = trace.last();
    let iterations = last.map_or(0, |r| r.k);
    let residual_sq = last.map(|r| r.residual_sq);
    let solution = &x[0];
    if let Some(path) = &config.out {
        let state = FinalState {
            problem: &spec.name,
            mode: problem.mode(),
            status,
            iterations,
            residual_sq,
            lambda: params.lambda,
            gamma: params.gamma,
            solution,
            x: &x,
            z: &z,
        };
        let mut w = create(path)?;
        serde_json::to_writer_pretty(&mut w, &state)?;
        w.write_all(b"\n")?;
        w.flush()?;
    }
    let status_name = match status {
        Status::Converged => "converged",
        Status::MaxIters => "max_iters",
    };
    writeln!(stdout, "problem: {} ({} mode, n = {}, d = {})", spec.name, problem.mode(), problem.n(), problem.dim())?;
    writeln!(stdout, "steps: lambda = {}, gamma = {}", params.lambda, params.gamma)?;
    writeln!(stdout, "status: {status_name}")?;
    writeln!(stdout, "iterations: {iterations}")?;
    if let Some(r) = residual_sq {
        writeln!(stdout, "final residual_sq: {r:.6e}")?;
    }
    writeln!(stdout, "solution: {}", solution_head(solution))?;
    for line in oracle_lines(&spec, solution) {
        writeln!(stdout, "{line}")?;
    }
    Ok(status)
}

/// Runs a solve. Exit code 0 when converged, 2 when the iteration budget ran
/// out, 1 on configuration or parameter errors.
pub fn cmd_solve(config: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match solve(config, stdout) {
        Ok(Status::Converged) => 0,
        Ok(Status::MaxIters) => 2,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            1
        }
    }
}

fn fmt_bound(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        format!("{v}")
    }
}

fn validate(config: &RunConfig, stdout: &mut dyn Write) -> anyhow::Result<bool> {
    let (n, mode, l, defaults) = if config.has_problem() {
        let spec = config.load_problem()?;
        let p = spec.build()?;
        let l = config.lipschitz.unwrap_or(p.lipschitz());
        (p.n(), p.mode(), l, ringsplit::splitting::default_steps(p.n(), p.mode(), l))
    } else {
        let n = config.n.context("validate needs --n (or a problem)")?;
        let mode = config.algo.map(Mode::from).unwrap_or(Mode::Cocoercive);
        let l = config.lipschitz.context("validate needs --lipschitz (or a problem)")?;
        (n, mode, l, ringsplit::splitting::default_steps(n, mode, l))
    };
    let lambda = config.lambda.unwrap_or(defaults.0);
    writeln!(stdout, "mode: {mode}, n = {n}, L = {l}")?;
    writeln!(stdout, "lambda interval: (0, {})", fmt_bound(lambda_upper(n, mode, l)))?;
    let g = gamma_upper(n, mode, l, lambda);
    if g > 0.0 {
        writeln!(stdout, "gamma interval at lambda = {lambda}: (0, {})", fmt_bound(g))?;
    } else {
        writeln!(stdout, "gamma interval at lambda = {lambda}: empty")?;
    }
    let verdict = match config.gamma {
        Some(gamma) => validate_params(n, mode, l, lambda, gamma),
        None => validate_lambda(n, mode, l, lambda),
    };
    match verdict {
        Ok(()) => {
            writeln!(stdout, "accept")?;
            Ok(true)
        }
        Err(r) => {
            writeln!(stdout, "reject: {r}")?;
            Ok(false)
        }
    }
}

/// Prints the active intervals and whether the given steps lie inside them.
/// Exit code 0 on accept, 1 on reject or configuration error.
pub fn cmd_validate(config: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match validate(config, stdout) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            1
        }
    }
}

/// Dispatches a parsed command line.
pub fn run(cli: Cli, env_seed: Option<String>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let (config, solve) = match cli.command {
        Command::Solve(c) => (c, true),
        Command::Validate(c) => (c, false),
    };
    let config = match config.with_env_seed(env_seed) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            return 1;
        }
    };
    if solve {
        cmd_solve(&config, stdout, stderr)
    } else {
        cmd_validate(&config, stdout, stderr)
    }
}
