//! Command-line front end: flag parsing, dispatch to the library, and
//! JSON/CSV serialization of every report.
//!
//! Exit codes: 0 success, 1 validation or usage error, 2 computation
//! succeeded but a verification check failed its tolerance.

use crate::channel::{self, ChannelParams, ConcentrationSymbol, ReceptorState};
use crate::directed::{self, DiInit, FeedbackPolicy};
use crate::error::Result;
use crate::ode::{self, BindingKinetics};
use crate::poisson;
use crate::rng::CounterRng;
use crate::{iid, verify};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use std::path::PathBuf;

pub const SCHEMA_VERSION: u32 = 1;
/// Relative `--output` paths resolve against this directory.
pub const OUTPUT_DIR_ENV: &str = "TRANSDUCTION_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StateArg {
    U,
    B,
}

impl From<StateArg> for ReceptorState {
    fn from(s: StateArg) -> ReceptorState {
        match s {
            StateArg::U => ReceptorState::U,
            StateArg::B => ReceptorState::B,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "transduction",
    version,
    about = "Capacity tools for the two-state ligand-receptor channel"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Report serialization format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ParamArgs {
    /// Binding probability under low concentration.
    #[arg(long)]
    pub alpha_l: f64,
    /// Binding probability under high concentration.
    #[arg(long)]
    pub alpha_h: f64,
    /// Unbinding probability.
    #[arg(long)]
    pub beta: f64,
}

impl ParamArgs {
    fn build(&self) -> Result<ChannelParams> {
        ChannelParams::new(self.alpha_l, self.alpha_h, self.beta)
    }
}

#[derive(Debug, Args, Serialize)]
pub struct CapacityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,
    /// Bracket width at which the optimizer stops.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    /// Comma-separated alpha_L grid.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub alpha_l: Vec<f64>,
    /// Comma-separated alpha_H grid.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub alpha_h: Vec<f64>,
    /// Comma-separated beta grid.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub beta: Vec<f64>,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct RateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,
    /// Probability of the high input symbol.
    #[arg(long)]
    pub p_h: f64,
    #[arg(long, default_value_t = 1000)]
    pub horizon: usize,
    #[arg(long, default_value_t = 64)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct DirectedInfoArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,
    /// P(X = L | previous output unbound).
    #[arg(long)]
    pub p_l_given_u: f64,
    /// P(X = L | previous output bound); defaults to the unbound value.
    #[arg(long)]
    pub p_l_given_b: Option<f64>,
    /// Horizon.
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = StateArg::U)]
    pub initial_state: StateArg,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,
    /// Horizon.
    #[arg(long)]
    pub n: usize,
    /// Grid intervals per policy coordinate.
    #[arg(long, default_value_t = 4)]
    pub grid: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct KabanovArgs {
    /// Intensity excess.
    #[arg(long)]
    pub c: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct KabanovConvergeArgs {
    #[arg(long)]
    pub c: f64,
    /// Comma-separated decreasing step sizes.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub dt: Vec<f64>,
    /// Horizon at the first step size; later rows scale it to keep the
    /// covered time span fixed.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Grid intervals per input-law coordinate.
    #[arg(long, default_value_t = 12)]
    pub grid: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,
    /// Probability of the high input symbol (iid input).
    #[arg(long)]
    pub p_h: f64,
    #[arg(long)]
    pub steps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = StateArg::U)]
    pub initial_state: StateArg,
}

#[derive(Debug, Args, Serialize)]
pub struct OdeCheckArgs {
    /// On-rate per concentration per unit time.
    #[arg(long, default_value_t = 1.0)]
    pub k_plus: f64,
    /// Off-rate per unit time.
    #[arg(long, default_value_t = 1.0)]
    pub k_minus: f64,
    #[arg(long, default_value_t = 0.5)]
    pub c_l: f64,
    #[arg(long, default_value_t = 2.0)]
    pub c_h: f64,
    /// Comma-separated step sizes.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub dt: Vec<f64>,
    /// Continuous-time span compared against.
    #[arg(long, default_value_t = 2.0)]
    pub horizon: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Maximize the closed-form iid rate over the input distribution.
    Capacity(CapacityArgs),
    /// Capacity over a parameter grid.
    Sweep(SweepArgs),
    /// Monte Carlo estimate of the iid rate.
    Rate(RateArgs),
    /// Exact directed information for a stationary feedback policy.
    DirectedInfo(DirectedInfoArgs),
    /// Full feedback-vs-iid verification report.
    Verify(VerifyArgs),
    /// Structural applicability conditions.
    CheckConditions(ParamArgs),
    /// Closed-form Poisson-channel capacity.
    Kabanov(KabanovArgs),
    /// Small-step convergence study towards the Poisson capacity.
    KabanovConverge(KabanovConvergeArgs),
    /// Sample an input/output trajectory.
    Simulate(SimulateArgs),
    /// Discretization consistency against the continuous-time reference.
    OdeCheck(OdeCheckArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Capacity(_) => "capacity",
            Command::Sweep(_) => "sweep",
            Command::Rate(_) => "rate",
            Command::DirectedInfo(_) => "directed-info",
            Command::Verify(_) => "verify",
            Command::CheckConditions(_) => "check-conditions",
            Command::Kabanov(_) => "kabanov",
            Command::KabanovConverge(_) => "kabanov-converge",
            Command::Simulate(_) => "simulate",
            Command::OdeCheck(_) => "ode-check",
        }
    }

    fn config_json(&self) -> Value {
        match self {
            Command::Capacity(a) => json!(a),
            Command::Sweep(a) => json!(a),
            Command::Rate(a) => json!(a),
            Command::DirectedInfo(a) => json!(a),
            Command::Verify(a) => json!(a),
            Command::CheckConditions(a) => json!(a),
            Command::Kabanov(a) => json!(a),
            Command::KabanovConverge(a) => json!(a),
            Command::Simulate(a) => json!(a),
            Command::OdeCheck(a) => json!(a),
        }
    }
}

/// Outcome of one dispatch: the report body and the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub body: String,
}

fn dispatch(command: &Command) -> Result<(Value, bool)> {
    let mut verification_failed = false;
    let result = match command {
        Command::Capacity(a) => {
            let params = a.params.build()?;
            json!(iid::maximize_iid(&params, a.tol)?)
        }
        Command::Sweep(a) => {
            json!(iid::capacity_sweep(&a.alpha_l, &a.alpha_h, &a.beta, a.tol)?)
        }
        Command::Rate(a) => {
            let params = a.params.build()?;
            json!(channel::estimate_rate_mc(
                &params, a.p_h, a.horizon, a.trials, a.seed, a.workers
            )?)
        }
        Command::DirectedInfo(a) => {
            let params = a.params.build()?;
            let policy = FeedbackPolicy::Stationary {
                p_l_given_u: a.p_l_given_u,
                p_l_given_b: a.p_l_given_b.unwrap_or(a.p_l_given_u),
            };
            let initial: ReceptorState = a.initial_state.into();
            let di = directed::directed_information(&params, &policy, initial, a.n)?;
            let rate = if a.n >= 2 {
                Some(directed::di_rate_estimate(
                    &params,
                    &policy,
                    DiInit::State(initial),
                    a.n,
                )?)
            } else {
                None
            };
            json!({ "directed_information": di, "rate": rate })
        }
        Command::Verify(a) => {
            let params = a.params.build()?;
            let report = verify::verify_theorem1(&params, a.n, a.grid, a.seed)?;
            verification_failed = !report.pass;
            json!(report)
        }
        Command::CheckConditions(a) => {
            let params = a.build()?;
            json!(verify::check_conditions(&params))
        }
        Command::Kabanov(a) => json!(poisson::kabanov_capacity(a.c)?),
        Command::KabanovConverge(a) => {
            json!(poisson::kabanov_convergence(a.c, &a.dt, a.n, a.grid)?)
        }
        Command::Simulate(a) => {
            let params = a.params.build()?;
            crate::error::check_probability("p_h", a.p_h)?;
            let rng = CounterRng::new(a.seed);
            let inputs: Vec<ConcentrationSymbol> = (0..a.steps)
                .map(|t| {
                    if rng.uniform(1, t as u64) < a.p_h {
                        ConcentrationSymbol::H
                    } else {
                        ConcentrationSymbol::L
                    }
                })
                .collect();
            json!(channel::sample_trajectory(
                &params,
                &inputs,
                a.initial_state.into(),
                a.seed
            )?)
        }
        Command::OdeCheck(a) => {
            let kin = BindingKinetics::new(a.k_plus, a.k_minus, vec![(a.c_l.max(1e-9), a.horizon)])?;
            let rows =
                ode::discretization_consistency(&kin, a.c_l, a.c_h, &a.dt, a.horizon)?;
            let slope = if rows.len() >= 2 && rows.iter().all(|r| r.deviation > 0.0) {
                let dts: Vec<f64> = rows.iter().map(|r| r.dt).collect();
                let devs: Vec<f64> = rows.iter().map(|r| r.deviation).collect();
                Some(ode::loglog_slope(&dts, &devs)?)
            } else {
                None
            };
            json!({ "rows": rows, "loglog_slope": slope })
        }
    };
    Ok((result, verification_failed))
}

fn csv_quote(cell: &str) -> String {
    if cell.contains(',') || cell.contains('"') || cell.contains('\n') {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

fn render_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => csv_quote(s),
        other => csv_quote(&other.to_string()),
    }
}

fn flatten_into(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    match v {
        Value::Object(map) => {
            for (k, inner) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten_into(&key, inner, out);
            }
        }
        other => out.push((prefix.to_string(), other.clone())),
    }
}

/// Renders a report result as CSV: arrays of objects become tables with a
/// union header, single objects become a header plus one row; nested
/// objects flatten into dotted column names.
fn to_csv(result: &Value) -> String {
    let rows: Vec<Vec<(String, Value)>> = match result {
        Value::Array(items) => items
            .iter()
            .map(|item| {
                let mut flat = Vec::new();
                flatten_into("", item, &mut flat);
                flat
            })
            .collect(),
        other => {
            let mut flat = Vec::new();
            flatten_into("", other, &mut flat);
            vec![flat]
        }
    };
    let mut header: Vec<String> = Vec::new();
    for row in &rows {
        for (k, _) in row {
            if !header.contains(k) {
                header.push(k.clone());
            }
        }
    }
    let mut out = String::new();
    out.push_str(&header.iter().map(|h| csv_quote(h)).collect::<Vec<_>>().join(","));
    out.push('\n');
    for row in &rows {
        let line: Vec<String> = header
            .iter()
            .map(|h| {
                row.iter()
                    .find(|(k, _)| k == h)
                    .map(|(_, v)| render_cell(v))
                    .unwrap_or_default()
            })
            .collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Runs a parsed invocation and returns its exit code and report body.
pub fn execute(cli: &Cli) -> RunOutcome {
    match dispatch(&cli.command) {
        Ok((result, verification_failed)) => {
            let body = match cli.format {
                OutputFormat::Json => {
                    let envelope = json!({
                        "schema_version": SCHEMA_VERSION,
                        "command": cli.command.name(),
                        "config": cli.command.config_json(),
                        "result": result,
                    });
                    let mut s = serde_json::to_string_pretty(&envelope)
                        .expect("reports are serializable");
                    s.push('\n');
                    s
                }
                OutputFormat::Csv => to_csv(&result),
            };
            RunOutcome {
                exit_code: if verification_failed { 2 } else { 0 },
                body,
            }
        }
        Err(e) => RunOutcome {
            exit_code: 1,
            body: format!("error: {e}\n"),
        },
    }
}

fn resolve_output(path: &PathBuf) -> PathBuf {
    if path.is_relative() {
        if let Ok(dir) = std::env::var(OUTPUT_DIR_ENV) {
            return PathBuf::from(dir).join(path);
        }
    }
    path.clone()
}

/// Full entry point: parse, execute, deliver. Returns the process exit
/// code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                0
            } else {
                eprint!("{e}");
                1
            };
        }
    };
    let outcome = execute(&cli);
    if outcome.exit_code == 1 {
        eprint!("{}", outcome.body);
        return 1;
    }
    match &cli.output {
        Some(path) => {
            let path = resolve_output(path);
            if let Err(e) = std::fs::write(&path, &outcome.body) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return 1;
            }
            println!("{}", path.display());
        }
        None => print!("{}", outcome.body),
    }
    outcome.exit_code
}
