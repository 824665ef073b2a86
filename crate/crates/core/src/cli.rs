//! The `qmux` command line: evaluate a configuration, sweep the figure
//! curves, and run the resource searches.
//!
//! Every command writes plain CSV with the header
//! `p_t,label,photons,qubits,probability` (except `eval`, which prints a
//! report). Exit codes: 0 on success, 2 on usage or input errors, 3 when an
//! instance exceeds a capacity limit.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::evaluator::{binomial, exact_success_probability, mc_success_probability, success_polynomial};
use crate::model::{parse_config, read_config_file, MultiplexConfig};
use crate::reed_solomon::rs_min_resources;
use crate::search::{
    min_resources_parity, mixed_tradeoff_table_with, SearchBounds, Strategy,
};

pub const CSV_HEADER: &str = "p_t,label,photons,qubits,probability";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;

const C3_CFG: &str = include_str!("../configs/c3.qmux");
const FIG1B_CFGS: [(&str, &str); 3] = [
    ("spread", include_str!("../configs/fig1b_spread.qmux")),
    ("partial", include_str!("../configs/fig1b_partial.qmux")),
    ("clustered", include_str!("../configs/fig1b_clustered.qmux")),
];

#[derive(Debug, Parser)]
#[command(name = "qmux", version, about = "Loss tolerance of parity codes on multiplexed photons")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact success probability and loss-class table of a config file.
    Eval(EvalArgs),
    /// Success-probability curves of fixed configurations.
    Fig1(Fig1Args),
    /// Minimum resources versus transmission probability.
    Fig2(Fig2Args),
    /// Minimum resources of each strategy at one transmission probability.
    Table1(Table1Args),
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Configuration in qmux-cfg format.
    pub config: PathBuf,
    #[arg(long = "p-t")]
    pub p_t: f64,
    /// Also run a Monte-Carlo estimate with this many trials.
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fig1Variant {
    A,
    B,
}

#[derive(Debug, Args)]
pub struct Fig1Args {
    #[arg(value_enum)]
    pub variant: Fig1Variant,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Code {
    Parity,
    Rs,
}

#[derive(Debug, Args)]
pub struct Fig2Args {
    #[arg(value_enum)]
    pub code: Code,
    /// Qubits per photon; a comma-separated list. `1` is non-multiplexed.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
    pub q: Vec<usize>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 0.995)]
    pub threshold: f64,
    #[command(flatten)]
    pub bounds: BoundsArgs,
    /// Largest Reed-Solomon qudit count.
    #[arg(long, default_value_t = 64)]
    pub d_max: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Table1Args {
    #[arg(long = "p-t", default_value_t = 0.916)]
    pub p_t: f64,
    #[arg(long, default_value_t = 0.995)]
    pub threshold: f64,
    #[arg(long, default_value_t = 4)]
    pub q_max: usize,
    #[command(flatten)]
    pub bounds: BoundsArgs,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Single transmission probability; overrides the range flags.
    #[arg(long = "p-t")]
    pub p_t: Option<f64>,
    #[arg(long = "p-t-min")]
    pub p_t_min: Option<f64>,
    #[arg(long = "p-t-max")]
    pub p_t_max: Option<f64>,
    #[arg(long = "p-t-step")]
    pub p_t_step: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    #[arg(long, default_value_t = 24)]
    pub max_qubits: usize,
    #[arg(long, default_value_t = 16)]
    pub max_photons: usize,
    #[arg(long, default_value_t = 8)]
    pub max_blocks: usize,
    /// Let a photon carry two qubits of the same block.
    #[arg(long)]
    pub allow_duplicates: bool,
    /// Let two photons share two blocks.
    #[arg(long)]
    pub allow_shared_pairs: bool,
}

impl BoundsArgs {
    fn bounds(&self) -> Result<SearchBounds> {
        SearchBounds::new(self.max_qubits, self.max_photons, self.max_blocks)
    }

    fn apply(&self, s: Strategy) -> Strategy {
        s.duplicates(self.allow_duplicates)
            .shared_block_pairs(self.allow_shared_pairs)
    }
}

impl GridArgs {
    fn points(&self, default: (f64, f64, f64)) -> Result<Vec<f64>> {
        if let Some(p) = self.p_t {
            check_grid_value(p)?;
            return Ok(vec![p]);
        }
        let lo = self.p_t_min.unwrap_or(default.0);
        let hi = self.p_t_max.unwrap_or(default.1);
        let step = self.p_t_step.unwrap_or(default.2);
        p_t_grid(lo, hi, step)
    }
}

fn check_grid_value(p: f64) -> Result<()> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::contract(format!("p_t must lie in (0, 1], got {p}")));
    }
    Ok(())
}

/// `lo, lo+step, ...` up to `hi` inclusive, each value rounded to 12
/// significant digits so accumulated error never reaches the output.
pub fn p_t_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    check_grid_value(lo)?;
    check_grid_value(hi)?;
    if step.is_nan() || step <= 0.0 || lo > hi {
        return Err(Error::contract(format!(
            "need p-t-min <= p-t-max and a positive step, got {lo}..{hi} step {step}"
        )));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|i| {
            let v = lo + i as f64 * step;
            format_real(v).parse::<f64>().unwrap_or(v).min(1.0)
        })
        .collect())
}

/// C-style `%.12g`: 12 significant digits, trailing zeros dropped,
/// scientific notation for very small or large magnitudes.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..12).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs());
    }
    let decimals = (11 - exp) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// One CSV row. `None` resources print as `inf`.
struct Row {
    p_t: f64,
    label: String,
    resources: Option<(usize, usize, f64)>,
}

fn render_csv(rows: &[Row]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let (photons, qubits, prob) = match r.resources {
            Some((n, q, p)) => (n.to_string(), q.to_string(), format_real(p)),
            None => ("inf".into(), "inf".into(), "inf".into()),
        };
        let _ = writeln!(out, "{},{},{photons},{qubits},{prob}", format_real(r.p_t), r.label);
    }
    out
}

fn emit(text: &str, output: Option<&PathBuf>, stdout: &mut dyn Write) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => Ok(stdout.write_all(text.as_bytes())?),
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code; diagnostics go to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = stdout.write_all(rendered.as_bytes());
            } else {
                let _ = stderr.write_all(rendered.as_bytes());
            }
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    match execute(&cli.command, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Capacity { .. } => EXIT_CAPACITY,
        Error::Contract(_) | Error::Parse { .. } | Error::Io(_) => EXIT_USAGE,
    }
}

pub fn execute(command: &Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match command {
        Command::Eval(a) => cmd_eval(a, stdout),
        Command::Fig1(a) => cmd_fig1(a, stdout),
        Command::Fig2(a) => cmd_fig2(a, stdout),
        Command::Table1(a) => cmd_table1(a, stdout, stderr),
    }
}

fn cmd_eval(a: &EvalArgs, stdout: &mut dyn Write) -> Result<()> {
    let config = read_config_file(&a.config).map_err(|e| match e {
        Error::Parse { line, reason } => Error::Parse {
            line,
            reason: format!("{reason} (in {})", a.config.display()),
        },
        other => other,
    })?;
    let exact = exact_success_probability(&config, a.p_t)?;
    let poly = success_polynomial(&config)?;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "config: {} photons, {} qubits, {} blocks",
        config.total_photons(),
        config.total_qubits(),
        config.num_blocks()
    );
    let _ = writeln!(out, "p_t: {}", format_real(a.p_t));
    let _ = writeln!(out, "exact: {}", format_real(exact.value));
    if let Some(trials) = a.trials {
        let mc = mc_success_probability(&config, a.p_t, trials, a.seed)?;
        let _ = writeln!(
            out,
            "monte_carlo: {} std_err {} trials {trials} seed {}",
            format_real(mc.value),
            format_real(mc.std_err().unwrap_or(0.0)),
            a.seed
        );
    }
    let _ = writeln!(out, "i,C(n,i),successes,no_intact,empty");
    let n = config.total_photons();
    for (i, c) in poly.per_loss_counts().iter().enumerate() {
        let _ = writeln!(
            out,
            "{i},{},{},{},{}",
            binomial(n, i)?,
            c.successes,
            c.no_intact,
            c.empty
        );
    }
    emit(&out, a.output.as_ref(), stdout)
}

/// The curves drawn by each `fig1` variant, in output order.
pub fn fig1_curves(variant: Fig1Variant) -> Vec<(String, MultiplexConfig)> {
    let parse = |text: &str| parse_config(text).expect("bundled config is valid");
    match variant {
        Fig1Variant::A => vec![
            (
                "nonmux-3x2".into(),
                MultiplexConfig::non_multiplexed(&[2, 2, 2]).expect("valid sizes"),
            ),
            (
                "nonmux-3-2-2".into(),
                MultiplexConfig::non_multiplexed(&[3, 2, 2]).expect("valid sizes"),
            ),
            ("c3".into(), parse(C3_CFG)),
        ],
        Fig1Variant::B => FIG1B_CFGS
            .iter()
            .map(|(name, text)| (name.to_string(), parse(text)))
            .collect(),
    }
}

fn cmd_fig1(a: &Fig1Args, stdout: &mut dyn Write) -> Result<()> {
    let grid = a.grid.points((0.9, 1.0, 0.001))?;
    let mut rows = Vec::new();
    for (label, config) in fig1_curves(a.variant) {
        let poly = success_polynomial(&config)?;
        for &p in &grid {
            rows.push(Row {
                p_t: p,
                label: label.clone(),
                resources: Some((config.total_photons(), config.total_qubits(), poly.evaluate(p)?)),
            });
        }
    }
    emit(&render_csv(&rows), a.output.as_ref(), stdout)
}

fn cmd_fig2(a: &Fig2Args, stdout: &mut dyn Write) -> Result<()> {
    let grid = a.grid.points((0.85, 0.99, 0.01))?;
    if a.q.is_empty() {
        return Err(Error::contract("--q needs at least one value"));
    }
    let bounds = a.bounds.bounds()?;
    let mut rows = Vec::new();
    for &q in &a.q {
        let (label, strategy) = match a.code {
            Code::Parity => (format!("parity-q{q}"), Some(a.bounds.apply(Strategy::from_q(q)?))),
            Code::Rs => (format!("rs-q{q}"), None),
        };
        for &p in &grid {
            let point = match &strategy {
                Some(s) => min_resources_parity(p, a.threshold, s, &bounds)?.point().cloned(),
                None => rs_min_resources(p, q, a.threshold, a.d_max)?,
            };
            rows.push(Row {
                p_t: p,
                label: label.clone(),
                resources: point.map(|pt| (pt.photons_min, pt.qubits_min, pt.achieved_probability)),
            });
        }
    }
    emit(&render_csv(&rows), a.output.as_ref(), stdout)
}

/// Table rows: non-multiplexed, each pure `q`, then the mixed trade-off.
/// A trailing `*` on a mixed label marks the row at the non-multiplexed
/// optimum's qubit count.
fn table1_rows(a: &Table1Args) -> Result<Vec<Row>> {
    let bounds = a.bounds.bounds()?;
    let mut rows = Vec::new();
    for q in 1..=a.q_max {
        let strategy = a.bounds.apply(Strategy::from_q(q)?);
        let found = min_resources_parity(a.p_t, a.threshold, &strategy, &bounds)?;
        rows.push(Row {
            p_t: a.p_t,
            label: strategy.label(),
            resources: found
                .point()
                .map(|pt| (pt.photons_min, pt.qubits_min, pt.achieved_probability)),
        });
    }
    let mixed = a.bounds.apply(Strategy::mixed(a.q_max)?);
    let table = mixed_tradeoff_table_with(a.p_t, a.threshold, &mixed, &bounds)?;
    if table.is_empty() {
        rows.push(Row {
            p_t: a.p_t,
            label: mixed.label(),
            resources: None,
        });
    }
    for r in table {
        let star = if r.optimal { "*" } else { "" };
        rows.push(Row {
            p_t: a.p_t,
            label: format!("{}{star}", mixed.label()),
            resources: Some((r.photons, r.qubits, r.probability)),
        });
    }
    Ok(rows)
}

fn render_table(rows: &[Row]) -> String {
    let mut out = format!("{:<12} {:>8} {:>8}  {}\n", "strategy", "photons", "qubits", "P_S");
    for r in rows {
        match r.resources {
            Some((n, q, p)) => {
                let _ = writeln!(out, "{:<12} {n:>8} {q:>8}  {}", r.label, format_real(p));
            }
            None => {
                let _ = writeln!(out, "{:<12} {:>8} {:>8}  infeasible", r.label, "-", "-");
            }
        }
    }
    out
}

/// Writes the CSV to `--output` (or stdout) and the aligned table to stdout
/// when the CSV went to a file, otherwise to stderr.
fn cmd_table1(a: &Table1Args, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    if a.q_max < 2 {
        return Err(Error::contract(format!("--q-max must be at least 2, got {}", a.q_max)));
    }
    let rows = table1_rows(a)?;
    let table = render_table(&rows);
    emit(&render_csv(&rows), a.output.as_ref(), stdout)?;
    let sink: &mut dyn Write = if a.output.is_some() { stdout } else { stderr };
    Ok(sink.write_all(table.as_bytes())?)
}
