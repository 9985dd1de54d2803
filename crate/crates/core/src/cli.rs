//! Command-line front end.
//!
//! Every run is described by a [`RunConfig`]. An optional JSON config file
//! supplies defaults and command-line flags override it. Exit codes are 0 for
//! success, 1 when a check fails and 2 for configuration or I/O errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::distributions::{DistributionSpec, MonotoneMap, OrderStatDensitySpec, WeightSpec};
use crate::error::Error;
use crate::extropy::Engine;
use crate::mc_sim::{self, SamplingPlan, SamplingScheme};
use crate::order_checks::{self, BetaIndex, OrderKind, Outcome, VerdictRecord};
use crate::quadrature::Tolerance;

pub const SCHEMA_VERSION: &str = "v1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    #[default]
    Table,
    Verify,
    Simulate,
    Order,
    Bound,
    Characterize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Srs,
    Rss,
    Erss,
}

impl From<SchemeArg> for SamplingScheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Srs => SamplingScheme::Srs,
            SchemeArg::Rss => SamplingScheme::Rss,
            SchemeArg::Erss => SamplingScheme::Erss,
        }
    }
}

/// Fully resolved run description; serializing it reproduces the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    /// Distribution specs such as `power:2`, `uniform:-1,1` or `triangular_up@-0.5`.
    pub dist: Vec<String>,
    pub weight_m: Vec<f64>,
    pub n: Option<u32>,
    pub n_max: Option<u32>,
    pub seed: u64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
    /// Suite filter for `verify`.
    pub only: Vec<String>,
    /// KS significance level.
    pub alpha: f64,
    pub grid: usize,
    pub scheme: SamplingScheme,
    pub cycles: usize,
    pub draws: usize,
    pub orders: Vec<String>,
    /// Where `simulate` writes its summary; defaults to `<out>.summary.json`
    /// or stderr.
    pub summary: Option<PathBuf>,
    pub literal_beta_index: bool,
    pub inject_fault: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let tol = Tolerance::default();
        RunConfig {
            command: CommandKind::Table,
            dist: Vec::new(),
            weight_m: Vec::new(),
            n: None,
            n_max: None,
            seed: 42,
            abs_tol: tol.abs_tol,
            rel_tol: tol.rel_tol,
            format: Format::Csv,
            out: None,
            only: Vec::new(),
            alpha: 0.01,
            grid: order_checks::DEFAULT_GRID,
            scheme: SamplingScheme::Erss,
            cycles: 100_000,
            draws: 1_000_000,
            orders: Vec::new(),
            summary: None,
            literal_beta_index: false,
            inject_fault: None,
        }
    }
}

impl RunConfig {
    pub fn tolerance(&self) -> Tolerance {
        Tolerance::new(self.abs_tol, self.rel_tol)
    }

    /// Set sizes: `n..=n_max` when `n_max` is given, else `[n]`, else `default`.
    pub fn set_sizes(&self, default: &[u32]) -> Vec<u32> {
        match (self.n, self.n_max) {
            (lo, Some(hi)) => (lo.unwrap_or(1)..=hi).collect(),
            (Some(n), None) => vec![n],
            (None, None) => default.to_vec(),
        }
    }

    pub fn weights(&self, default: &[f64]) -> Vec<f64> {
        if self.weight_m.is_empty() {
            default.to_vec()
        } else {
            self.weight_m.clone()
        }
    }

    fn engine(&self) -> Result<Engine, CliError> {
        let engine = Engine::new(self.tolerance());
        match self.inject_fault.as_deref() {
            None => Ok(engine),
            #[cfg(feature = "fault-injection")]
            Some("q2") => Ok(engine.with_q2_perturbation(0.01)),
            Some(other) => Err(CliError::Config(format!("unknown fault '{other}'"))),
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return bad(format!(
                "tolerances must be positive: {} {}",
                self.abs_tol, self.rel_tol
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("--alpha {} outside (0, 1)", self.alpha));
        }
        if self.n == Some(0) || self.n_max == Some(0) {
            return bad("set size must be ≥ 1".into());
        }
        if let (Some(lo), Some(hi)) = (self.n, self.n_max) {
            if lo > hi {
                return bad(format!("--n {lo} exceeds --n-max {hi}"));
            }
        }
        if self.grid < 8 {
            return bad(format!("--grid {} is below 8", self.grid));
        }
        for d in &self.dist {
            parse_dist(d).map_err(|e| CliError::Config(format!("--dist {d}: {e}")))?;
        }
        for o in &self.orders {
            OrderKind::parse(o).map_err(|e| CliError::Config(e.to_string()))?;
        }
        Ok(())
    }
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io { path: PathBuf, message: String },
    Check(String),
    Engine(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => EXIT_CONFIG,
            CliError::Check(_) | CliError::Engine(_) => EXIT_CHECK_FAILED,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Io { path, message } => write!(f, "{}: {message}", path.display()),
            CliError::Check(m) => write!(f, "check failed: {m}"),
            CliError::Engine(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Engine(e)
    }
}

/// Parses `family[:p1[,p2]][@shift]`.
///
/// Families: `power:θ`, `exponential:λ`, `pareto:α`, `uniform:a,b`,
/// `triangular_up`, `triangular_down`, `lomax` (the law of e^X − 1 for
/// standard exponential X).
pub fn parse_dist(spec: &str) -> Result<DistributionSpec, Error> {
    let (body, shift) = match spec.split_once('@') {
        Some((b, s)) => (b, Some(s)),
        None => (spec, None),
    };
    let (name, params) = match body.split_once(':') {
        Some((n, p)) => (n, p),
        None => (body, ""),
    };
    let nums: Vec<f64> = if params.is_empty() {
        Vec::new()
    } else {
        params
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Domain(format!("bad number '{p}'")))
            })
            .collect::<Result<_, _>>()?
    };
    let arity = |k: usize| {
        if nums.len() == k {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "{name} takes {k} parameter(s), got {}",
                nums.len()
            )))
        }
    };
    let base = match name {
        "power" => {
            arity(1)?;
            DistributionSpec::power(nums[0])?
        }
        "exponential" | "exp" => {
            arity(1)?;
            DistributionSpec::exponential(nums[0])?
        }
        "pareto" => {
            arity(1)?;
            DistributionSpec::pareto(nums[0])?
        }
        "uniform" => {
            if nums.is_empty() {
                DistributionSpec::uniform(0.0, 1.0)?
            } else {
                arity(2)?;
                DistributionSpec::uniform(nums[0], nums[1])?
            }
        }
        "triangular_up" => {
            arity(0)?;
            DistributionSpec::triangular_up()
        }
        "triangular_down" => {
            arity(0)?;
            DistributionSpec::triangular_down()
        }
        "lomax" => {
            arity(0)?;
            DistributionSpec::transformed(DistributionSpec::exponential(1.0)?, MonotoneMap::expm1())
        }
        _ => return Err(Error::Domain(format!("unknown family '{name}'"))),
    };
    match shift {
        None => Ok(base),
        Some(s) => {
            let by = s
                .parse::<f64>()
                .map_err(|_| Error::Domain(format!("bad shift '{s}'")))?;
            Ok(DistributionSpec::transformed(base, MonotoneMap::shift(by)?))
        }
    }
}

/// JSON form of a distribution/weight pair:
/// `{"family": "power", "params": [2.0], "weight": {"kind": "power", "m": 1.0}}`.
/// `shift` is present only for shifted families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDocument {
    pub family: String,
    pub params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<f64>,
    pub weight: WeightDocument,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightDocument {
    /// `power` or `identity`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
}

impl SpecDocument {
    /// Document for a `--dist` spec string and the weight x^m.
    pub fn from_dist(spec: &str, m: f64) -> Result<Self, Error> {
        parse_dist(spec)?;
        let (body, shift) = match spec.split_once('@') {
            Some((b, s)) => (
                b,
                Some(
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Domain(format!("bad shift '{s}'")))?,
                ),
            ),
            None => (spec, None),
        };
        let (name, params) = body.split_once(':').unwrap_or((body, ""));
        let family = if name == "exp" { "exponential" } else { name };
        let mut params: Vec<f64> = params
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Domain(format!("bad number '{p}'")))
            })
            .collect::<Result<_, _>>()?;
        if family == "uniform" && params.is_empty() {
            params = vec![0.0, 1.0];
        }
        Ok(SpecDocument {
            family: family.to_string(),
            params,
            shift,
            weight: WeightDocument {
                kind: "power".into(),
                m: Some(m),
            },
        })
    }

    /// The equivalent `--dist` string.
    pub fn dist_string(&self) -> String {
        let mut s = self.family.clone();
        if !self.params.is_empty() {
            let p: Vec<String> = self.params.iter().map(|v| v.to_string()).collect();
            s = format!("{s}:{}", p.join(","));
        }
        if let Some(by) = self.shift {
            s = format!("{s}@{by}");
        }
        s
    }

    pub fn build(&self) -> Result<(DistributionSpec, WeightSpec), Error> {
        let dist = parse_dist(&self.dist_string())?;
        let weight = match (self.weight.kind.as_str(), self.weight.m) {
            ("power", Some(m)) => WeightSpec::power(m)?,
            ("identity", None) => WeightSpec::identity(),
            (kind, m) => {
                return Err(Error::Domain(format!(
                    "unsupported weight kind '{kind}' with m = {m:?}"
                )))
            }
        };
        Ok((dist, weight))
    }
}

// ---------------------------------------------------------------------------
// Argument parsing
// ---------------------------------------------------------------------------

#[derive(Parser, Debug)]
#[command(
    name = "erss-extropy",
    version,
    about = "General weighted extropy of ERSS and SRS designs"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Closed-form and quadrature GWE tables across parameter grids.
    Table,
    /// Run the cross-method and theorem suites.
    Verify,
    /// Simulate a sampling protocol and compare with the engine.
    Simulate,
    /// Stochastic-order checks between two distributions.
    Order,
    /// ERSS/SRS ratio bound checks.
    Bound,
    /// Symmetry and exponential characterization checks.
    Characterize,
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// Distribution spec, repeatable (e.g. power:2, uniform:-1,1, triangular_up@-0.5).
    #[arg(long, global = true, allow_hyphen_values = true)]
    dist: Vec<String>,
    /// Weight exponents m for w(x) = x^m, comma separated.
    #[arg(
        long = "weight-m",
        global = true,
        value_delimiter = ',',
        allow_hyphen_values = true
    )]
    weight_m: Vec<f64>,
    #[arg(long, global = true)]
    n: Option<u32>,
    #[arg(long = "n-max", global = true)]
    n_max: Option<u32>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long = "abs-tol", global = true)]
    abs_tol: Option<f64>,
    #[arg(long = "rel-tol", global = true)]
    rel_tol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Verify suites to run, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    only: Vec<String>,
    /// Kolmogorov–Smirnov level.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// JSON file with RunConfig defaults; flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    scheme: Option<SchemeArg>,
    #[arg(long, global = true)]
    cycles: Option<usize>,
    #[arg(long, global = true)]
    draws: Option<usize>,
    /// Orders for `order`, comma separated (st, lr, hr, disp, star, c, su).
    #[arg(long = "order", global = true, value_delimiter = ',')]
    orders: Vec<String>,
    #[arg(long, global = true)]
    summary: Option<PathBuf>,
    /// Use the φ_{2i−1:2n−2i} beta index in the Δ analysis.
    #[arg(long = "literal-beta-index", global = true)]
    literal_beta_index: bool,
    /// Test hook: `q2` perturbs the odd-n constant by 1%.
    #[cfg(feature = "fault-injection")]
    #[arg(long = "inject-fault", global = true)]
    inject_fault: Option<String>,
}

fn resolve(cli: Cli) -> Result<RunConfig, CliError> {
    let f = cli.flags;
    let mut cfg = match &f.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Io {
                path: path.clone(),
                message: e.to_string(),
            })?;
            serde_json::from_str::<RunConfig>(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    cfg.command = match cli.command {
        Cmd::Table => CommandKind::Table,
        Cmd::Verify => CommandKind::Verify,
        Cmd::Simulate => CommandKind::Simulate,
        Cmd::Order => CommandKind::Order,
        Cmd::Bound => CommandKind::Bound,
        Cmd::Characterize => CommandKind::Characterize,
    };
    if !f.dist.is_empty() {
        cfg.dist = f.dist;
    }
    if !f.weight_m.is_empty() {
        cfg.weight_m = f.weight_m;
    }
    if f.n.is_some() {
        cfg.n = f.n;
    }
    if f.n_max.is_some() {
        cfg.n_max = f.n_max;
    }
    if let Some(v) = f.seed {
        cfg.seed = v;
    }
    if let Some(v) = f.abs_tol {
        cfg.abs_tol = v;
    }
    if let Some(v) = f.rel_tol {
        cfg.rel_tol = v;
    }
    if let Some(v) = f.format {
        cfg.format = v;
    }
    if f.out.is_some() {
        cfg.out = f.out;
    }
    if !f.only.is_empty() {
        cfg.only = f.only;
    }
    if let Some(v) = f.alpha {
        cfg.alpha = v;
    }
    if let Some(v) = f.grid {
        cfg.grid = v;
    }
    if let Some(v) = f.scheme {
        cfg.scheme = v.into();
    }
    if let Some(v) = f.cycles {
        cfg.cycles = v;
    }
    if let Some(v) = f.draws {
        cfg.draws = v;
    }
    if !f.orders.is_empty() {
        cfg.orders = f.orders;
    }
    if f.summary.is_some() {
        cfg.summary = f.summary;
    }
    if f.literal_beta_index {
        cfg.literal_beta_index = true;
    }
    #[cfg(feature = "fault-injection")]
    if f.inject_fault.is_some() {
        cfg.inject_fault = f.inject_fault;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Parses arguments (including the program name) into a [`RunConfig`].
pub fn parse_config<I, T>(args: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Config(e.to_string()))?;
    resolve(cli)
}

/// Entry point of the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = resolve(cli).and_then(|cfg| execute(&cfg));
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("erss-extropy: {e}");
            e.exit_code()
        }
    }
}

/// Runs a resolved configuration, writing its outputs; returns the exit code.
pub fn execute(cfg: &RunConfig) -> Result<i32, CliError> {
    match cfg.command {
        CommandKind::Table => {
            let out = cmd_table(cfg)?;
            emit(cfg.out.as_deref(), &out)?;
            Ok(EXIT_OK)
        }
        CommandKind::Verify => {
            let report = cmd_verify(cfg)?;
            eprint!("{}", render_verify_table(&report));
            emit(cfg.out.as_deref(), &to_pretty(&report.json))?;
            Ok(if report.failed.is_empty() {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            })
        }
        CommandKind::Simulate => {
            let sim = cmd_simulate(cfg)?;
            emit(cfg.out.as_deref(), &sim.csv)?;
            let summary = to_pretty(&sim.summary);
            match (&cfg.summary, &cfg.out) {
                (Some(p), _) => write_file(p, &summary)?,
                (None, Some(out)) => write_file(&summary_path(out), &summary)?,
                (None, None) => eprint!("{summary}"),
            }
            Ok(EXIT_OK)
        }
        CommandKind::Order => {
            let out = cmd_order(cfg)?;
            emit(cfg.out.as_deref(), &out)?;
            Ok(EXIT_OK)
        }
        CommandKind::Bound | CommandKind::Characterize => {
            let records = if cfg.command == CommandKind::Bound {
                cmd_bound(cfg)?
            } else {
                cmd_characterize(cfg)?
            };
            emit(cfg.out.as_deref(), &render_records(cfg, &records))?;
            let failed = cfg.command == CommandKind::Bound
                && records.iter().any(|r| r.outcome == Outcome::Fail);
            Ok(if failed { EXIT_CHECK_FAILED } else { EXIT_OK })
        }
    }
}

fn summary_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".summary.json");
    PathBuf::from(s)
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => write_file(p, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| CliError::Io {
                path: PathBuf::from("<stdout>"),
                message: e.to_string(),
            })
        }
    }
}

fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_string(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is UTF-8")
}

// ---------------------------------------------------------------------------
// table
// ---------------------------------------------------------------------------

const DEFAULT_TABLE_DISTS: [&str; 10] = [
    "power:0.5",
    "power:1",
    "power:2",
    "power:3",
    "exponential:0.5",
    "exponential:1",
    "exponential:2",
    "pareto:1",
    "pareto:2",
    "pareto:3",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub family: String,
    pub params: Vec<f64>,
    pub m: f64,
    pub n: u32,
    pub j_srs: Option<f64>,
    pub j_erss: Option<f64>,
    pub method: Option<String>,
    pub error_estimate: Option<f64>,
    pub error: Option<String>,
    pub spec: Option<SpecDocument>,
}

fn dists_or_default(
    cfg: &RunConfig,
    default: &[&str],
) -> Result<Vec<(String, DistributionSpec)>, CliError> {
    let names: Vec<String> = if cfg.dist.is_empty() {
        default.iter().map(|s| s.to_string()).collect()
    } else {
        cfg.dist.clone()
    };
    names
        .into_iter()
        .map(|s| {
            let d = parse_dist(&s).map_err(|e| CliError::Config(format!("--dist {s}: {e}")))?;
            Ok((s, d))
        })
        .collect()
}

/// Computes the table rows; infeasible combinations become error rows.
pub fn table_rows(cfg: &RunConfig) -> Result<Vec<TableRow>, CliError> {
    let engine = cfg.engine()?;
    let dists = dists_or_default(cfg, &DEFAULT_TABLE_DISTS)?;
    let ms = cfg.weights(&[1.0, 2.0]);
    let ns = cfg.set_sizes(&[1, 2, 3, 4, 5, 6]);
    let mut jobs = Vec::new();
    for (name, d) in &dists {
        for &m in &ms {
            for &n in &ns {
                jobs.push((name.as_str(), d, m, n));
            }
        }
    }
    Ok(jobs
        .par_iter()
        .map(|&(name, d, m, n)| {
            let mut row = TableRow {
                family: d.family_name().to_string(),
                params: d.params(),
                m,
                n,
                j_srs: None,
                j_erss: None,
                method: None,
                error_estimate: None,
                error: None,
                spec: SpecDocument::from_dist(name, m).ok(),
            };
            let computed = WeightSpec::power(m).and_then(|w| {
                let srs = engine.gwe_srs(d, &w, n)?;
                let erss = match engine.closed_form(d, &w, n) {
                    Err(Error::NotApplicable(_)) => engine.gwe_erss_quantile(d, &w, n)?,
                    other => other?,
                };
                Ok((srs, erss))
            });
            match computed {
                Ok((srs, erss)) => {
                    row.j_srs = Some(srs.value);
                    row.j_erss = Some(erss.value);
                    row.method = Some(
                        serde_json::to_value(erss.method)
                            .ok()
                            .and_then(|v| v.as_str().map(String::from))
                            .unwrap_or_default(),
                    );
                    row.error_estimate = Some(erss.error_estimate);
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            row
        })
        .collect())
}

pub fn cmd_table(cfg: &RunConfig) -> Result<String, CliError> {
    let rows = table_rows(cfg)?;
    Ok(match cfg.format {
        Format::Json => to_pretty(&json!({
            "schema": SCHEMA_VERSION,
            "kind": "table",
            "config": cfg,
            "rows": rows,
        })),
        Format::Csv => {
            let opt = |v: Option<f64>| v.map(fmt_num).unwrap_or_default();
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.family.clone(),
                        r.params
                            .iter()
                            .map(|p| p.to_string())
                            .collect::<Vec<_>>()
                            .join(";"),
                        r.m.to_string(),
                        r.n.to_string(),
                        opt(r.j_srs),
                        opt(r.j_erss),
                        r.method.clone().unwrap_or_default(),
                        opt(r.error_estimate),
                        r.error.clone().unwrap_or_default(),
                    ]
                })
                .collect();
            csv_string(
                &[
                    "family",
                    "params",
                    "m",
                    "n",
                    "j_srs",
                    "j_erss",
                    "method",
                    "error_estimate",
                    "error",
                ],
                &body,
            )
        }
    })
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

pub const SUITES: [&str; 8] = [
    "reduction",
    "agreement",
    "bound",
    "symmetry",
    "characterization",
    "comparison",
    "transform",
    "orders",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub suite: String,
    pub name: String,
    pub status: CheckStatus,
    pub detail: Value,
}

#[derive(Debug)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
    pub failed: Vec<String>,
    pub json: Value,
}

struct Suite<'a> {
    name: &'static str,
    engine: &'a Engine,
    cfg: &'a RunConfig,
    out: Vec<CheckResult>,
}

impl Suite<'_> {
    fn push(&mut self, name: impl Into<String>, ok: bool, detail: Value) {
        self.out.push(CheckResult {
            suite: self.name.into(),
            name: name.into(),
            status: if ok {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            detail,
        });
    }

    fn record(&mut self, name: impl Into<String>, rec: &VerdictRecord, expect: &[Outcome]) {
        let status = if !expect.contains(&rec.outcome) {
            CheckStatus::Fail
        } else if rec.outcome == Outcome::NotApplicable {
            CheckStatus::NotApplicable
        } else {
            CheckStatus::Pass
        };
        self.out.push(CheckResult {
            suite: self.name.into(),
            name: name.into(),
            status,
            detail: json!({ "expected": expect, "record": rec }),
        });
    }

    fn error(&mut self, name: impl Into<String>, e: &Error) {
        self.push(name, false, json!({ "error": e.to_string() }));
    }
}

fn d(s: &str) -> DistributionSpec {
    parse_dist(s).expect("built-in distribution spec")
}

fn xw() -> WeightSpec {
    WeightSpec::power(1.0).expect("x is a valid weight")
}

/// Families × weights × set sizes of the agreement and bound matrices.
pub fn agreement_matrix() -> Vec<(String, f64, u32)> {
    let mut v = Vec::new();
    for dist in DEFAULT_TABLE_DISTS {
        for m in [1.0, 2.0] {
            for n in 1..=6 {
                v.push((dist.to_string(), m, n));
            }
        }
    }
    v
}

fn feasible(dist: &DistributionSpec, m: f64) -> bool {
    WeightSpec::power(m)
        .and_then(|w| crate::distributions::check_feasible(dist, &w))
        .is_ok()
}

fn suite_reduction(s: &mut Suite) {
    for name in ["uniform", "exponential:1", "pareto:2", "triangular_down"] {
        let dist = d(name);
        let r = (|| -> Result<(f64, f64, f64, f64, f64), Error> {
            let j = s.engine.weighted_extropy(&dist, &xw())?.value;
            let e = s.engine.gwe_erss_quantile(&dist, &xw(), 1)?.value;
            let r = s.engine.gwe_erss_direct(&dist, &xw(), 1)?.value;
            let srs1 = s.engine.gwe_srs(&dist, &xw(), 1)?.value;
            let srs3 = s.engine.gwe_srs(&dist, &xw(), 3)?.value;
            Ok((j, e, r, srs1, srs3))
        })();
        match r {
            Ok((j, e, r, srs1, srs3)) => {
                let ok = (e - j).abs() <= 1e-12 * j.abs().max(1.0)
                    && (r - j).abs() <= 1e-12 * j.abs().max(1.0)
                    && srs1 == j
                    && (srs3 + 0.5 * (-2.0 * j).powi(3)).abs() <= 1e-12;
                s.push(
                    format!("n1_reduction[{name}]"),
                    ok,
                    json!({"weighted_extropy": j, "erss_quantile": e, "erss_direct": r, "srs_1": srs1, "srs_3": srs3}),
                );
            }
            Err(e) => s.error(format!("n1_reduction[{name}]"), &e),
        }
    }
    match s.engine.gwe_erss_quantile(&d("power:1"), &xw(), 2) {
        Ok(r) => s.push(
            "uniform_n2",
            (r.value + 1.0 / 6.0).abs() <= 1e-9,
            json!({"value": r.value, "expected": -1.0 / 6.0}),
        ),
        Err(e) => s.error("uniform_n2", &e),
    }
}

fn suite_agreement(s: &mut Suite) {
    let engine = s.engine;
    let rows: Vec<(String, Result<Value, Error>, bool)> = agreement_matrix()
        .par_iter()
        .filter(|(name, m, _)| feasible(&d(name), *m))
        .map(|(name, m, n)| {
            let dist = d(name);
            let r = (|| {
                let w = WeightSpec::power(*m)?;
                let c = engine.closed_form(&dist, &w, *n)?.value;
                let q = engine.gwe_erss_quantile(&dist, &w, *n)?.value;
                let r = engine.gwe_erss_direct(&dist, &w, *n)?.value;
                Ok((c, q, r))
            })();
            let label = format!("{name} m={m} n={n}");
            match r {
                Ok((c, q, r)) => {
                    let scale = 1f64.max(q.abs());
                    let ok = (c - q).abs() <= 1e-6 * scale && (q - r).abs() <= 1e-6 * scale;
                    (
                        label,
                        Ok(json!({"closed_form": c, "quantile": q, "direct": r})),
                        ok,
                    )
                }
                Err(e) => (label, Err(e), false),
            }
        })
        .collect();
    let failures: Vec<Value> = rows
        .iter()
        .filter(|r| !r.2)
        .map(|(l, v, _)| match v {
            Ok(v) => json!({"case": l, "values": v}),
            Err(e) => json!({"case": l, "error": e.to_string()}),
        })
        .collect();
    s.push(
        "three_way_agreement",
        failures.is_empty(),
        json!({"cases": rows.len(), "failures": failures, "tolerance": "1e-6·max(1,|value|)"}),
    );
}

fn suite_bound(s: &mut Suite) {
    let engine = s.engine;
    let recs: Vec<(String, Result<VerdictRecord, Error>)> = agreement_matrix()
        .par_iter()
        .filter(|(name, m, _)| feasible(&d(name), *m))
        .map(|(name, m, n)| {
            let r = WeightSpec::power(*m)
                .and_then(|w| order_checks::verify_ratio_bound(engine, &d(name), &w, *n));
            (format!("{name} m={m} n={n}"), r)
        })
        .collect();
    let mut violations = Vec::new();
    for (label, r) in &recs {
        match r {
            Ok(rec) if rec.outcome == Outcome::Pass => {}
            Ok(rec) => violations.push(json!({"case": label, "record": rec})),
            Err(e) => violations.push(json!({"case": label, "error": e.to_string()})),
        }
    }
    s.push(
        "erss_srs_ratio_bound",
        violations.is_empty(),
        json!({"cases": recs.len(), "violations": violations}),
    );
}

fn suite_symmetry(s: &mut Suite) {
    let engine = s.engine;
    let ns = [1, 3, 5];
    let cases: [(&str, &str, &[Outcome]); 3] = [
        ("uniform(-1,1)", "uniform:-1,1", &[Outcome::Pass]),
        // mean zero but asymmetric: the GWE must not vanish
        (
            "triangular_up shifted to mean 0",
            "triangular_up@-0.6666666666666666",
            &[Outcome::Pass],
        ),
        (
            "triangular_up (mean 2/3)",
            "triangular_up",
            &[Outcome::NotApplicable],
        ),
    ];
    for (label, spec, expect) in cases {
        let mut dist = d(spec);
        if spec.contains('@') {
            // shifting by the rounded mean leaves a residue of order 1e−17
            dist.mean = Some(0.0);
        }
        match order_checks::check_symmetry_characterization(
            engine,
            &dist,
            &WeightSpec::identity(),
            &ns,
            1e-8,
            s.cfg.grid,
        ) {
            Ok(rec) => s.record(label, &rec, expect),
            Err(e) => s.error(label, &e),
        }
    }
}

fn suite_characterization(s: &mut Suite) {
    let cases: [(&str, &[Outcome]); 3] = [
        ("exponential:1", &[Outcome::Pass]),
        ("uniform", &[Outcome::Fail]),
        ("exponential:2", &[Outcome::Fail]),
    ];
    for (spec, expect) in cases {
        match order_checks::check_exponential_characterization(s.engine, &d(spec), 1e-9) {
            Ok(rec) => s.record(spec, &rec, expect),
            Err(e) => s.error(spec, &e),
        }
    }
}

fn suite_comparison(s: &mut Suite) {
    let engine = s.engine;
    let grid = s.cfg.grid;
    let index = if s.cfg.literal_beta_index {
        BetaIndex::Literal
    } else {
        BetaIndex::ErssIndex
    };
    for n in 2..=5 {
        let label = format!("triangular_up vs triangular_down n={n}");
        let (x, y) = (d("triangular_up"), d("triangular_down"));
        let r = order_checks::verify_dispersive_comparison(engine, &x, &y, &xw(), &xw(), n, grid)
            .and_then(|r1| {
                let r3 = order_checks::verify_delta_comparison(
                    engine,
                    &x,
                    &y,
                    &xw(),
                    &xw(),
                    n,
                    grid,
                    index,
                )?;
                Ok((r1, r3))
            });
        match r {
            Ok((r1, r3)) => {
                s.record(
                    format!("{label} dispersive"),
                    &r1,
                    &[Outcome::NotApplicable],
                );
                let expect: &[Outcome] = if index == BetaIndex::Literal {
                    &[Outcome::Pass, Outcome::NotApplicable]
                } else {
                    &[Outcome::Pass]
                };
                s.record(format!("{label} delta"), &r3, expect);
            }
            Err(e) => s.error(label, &e),
        }
    }
    for n in [2, 3] {
        match order_checks::verify_dispersive_comparison(
            engine,
            &d("uniform:0.5,1"),
            &d("uniform"),
            &xw(),
            &xw(),
            n,
            grid,
        ) {
            Ok(r) => s.record(
                format!("uniform(0.5,1) vs uniform(0,1) n={n}"),
                &r,
                &[Outcome::Pass],
            ),
            Err(e) => s.error("uniform(0.5,1) vs uniform(0,1)", &e),
        }
    }
    match order_checks::verify_dispersive_comparison(
        engine,
        &d("power:2"),
        &d("power:2"),
        &xw(),
        &xw(),
        3,
        grid,
    ) {
        Ok(r) => s.record("reflexive power(2) n=3", &r, &[Outcome::Pass]),
        Err(e) => s.error("reflexive power(2) n=3", &e),
    }
    match order_checks::verify_dispersive_comparison(
        engine,
        &d("uniform:0,0.5"),
        &d("uniform"),
        &xw(),
        &xw(),
        2,
        grid,
    ) {
        Ok(r) => s.record("different right endpoints", &r, &[Outcome::NotApplicable]),
        Err(e) => s.error("different right endpoints", &e),
    }
    match order_checks::verify_shape_comparison(
        engine,
        &d("power:2"),
        &d("power:2"),
        &xw(),
        &xw(),
        2,
        grid,
    ) {
        Ok(r) => s.record(
            "shape-order gate power(2) n=2",
            &r,
            &[Outcome::Pass, Outcome::NotApplicable],
        ),
        Err(e) => s.error("shape-order gate power(2) n=2", &e),
    }
}

fn suite_transform(s: &mut Suite) {
    let engine = s.engine;
    let grid = s.cfg.grid;
    let x2 = WeightSpec::power(2.0).expect("x² is a valid weight");
    for n in [2, 3] {
        match order_checks::verify_transform_comparison(
            engine,
            &d("exponential:1"),
            &x2,
            &MonotoneMap::expm1(),
            n,
            grid,
        ) {
            Ok(r) => s.record(
                format!("exponential(1) w=x^2 eta=expm1 n={n}"),
                &r,
                &[Outcome::Pass],
            ),
            Err(e) => s.error("exponential expm1", &e),
        }
    }
    match order_checks::verify_transform_comparison(
        engine,
        &d("power:2"),
        &xw(),
        &MonotoneMap::identity(),
        3,
        grid,
    ) {
        Ok(r) => s.record("identity map", &r, &[Outcome::Pass]),
        Err(e) => s.error("identity map", &e),
    }
    match MonotoneMap::affine(2.0, 0.0).and_then(|eta| {
        order_checks::verify_transform_comparison(engine, &d("uniform"), &xw(), &eta, 2, grid)
    }) {
        Ok(r) => s.record("uniform eta=2x", &r, &[Outcome::Pass]),
        Err(e) => s.error("uniform eta=2x", &e),
    }
}

fn suite_orders(s: &mut Suite) {
    let grid = s.cfg.grid;
    let cases = [
        (
            OrderKind::Disp,
            "exponential:2",
            "exponential:1",
            order_checks::Verdict::Yes,
        ),
        (
            OrderKind::St,
            "uniform",
            "uniform:0,2",
            order_checks::Verdict::Yes,
        ),
        (
            OrderKind::Disp,
            "exponential:1",
            "exponential:2",
            order_checks::Verdict::No,
        ),
    ];
    for (kind, a, b, expect) in cases {
        let label = format!("{} {a} vs {b}", kind.name());
        match order_checks::check_order(kind, &d(a), &d(b), grid) {
            Ok(r) => s.push(
                label,
                r.holds == expect,
                json!({"expected": expect, "report": r}),
            ),
            Err(e) => s.error(label, &e),
        }
    }
}

/// Runs the selected suites and assembles the v1 report.
pub fn run_verify(cfg: &RunConfig, engine: &Engine) -> Result<VerifyReport, CliError> {
    for name in &cfg.only {
        if !SUITES.contains(&name.as_str()) {
            return Err(CliError::Config(format!(
                "unknown suite '{name}', expected one of {}",
                SUITES.join(", ")
            )));
        }
    }
    let selected: Vec<&'static str> = SUITES
        .iter()
        .copied()
        .filter(|s| cfg.only.is_empty() || cfg.only.iter().any(|o| o == s))
        .collect();
    let mut checks = Vec::new();
    for name in &selected {
        let mut suite = Suite {
            name,
            engine,
            cfg,
            out: Vec::new(),
        };
        match *name {
            "reduction" => suite_reduction(&mut suite),
            "agreement" => suite_agreement(&mut suite),
            "bound" => suite_bound(&mut suite),
            "symmetry" => suite_symmetry(&mut suite),
            "characterization" => suite_characterization(&mut suite),
            "comparison" => suite_comparison(&mut suite),
            "transform" => suite_transform(&mut suite),
            "orders" => suite_orders(&mut suite),
            _ => unreachable!("suite names are validated"),
        }
        checks.extend(suite.out);
    }
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| c.status == CheckStatus::Fail)
        .map(|c| format!("{}/{}", c.suite, c.name))
        .collect();
    let count = |st: CheckStatus| checks.iter().filter(|c| c.status == st).count();
    let json = json!({
        "schema": SCHEMA_VERSION,
        "kind": "verify",
        "config": cfg,
        "suites": selected,
        "checks": checks,
        "summary": {
            "passed": count(CheckStatus::Pass),
            "failed": count(CheckStatus::Fail),
            "not_applicable": count(CheckStatus::NotApplicable),
            "failed_checks": failed,
        },
    });
    Ok(VerifyReport {
        checks,
        failed,
        json,
    })
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<VerifyReport, CliError> {
    let engine = cfg.engine()?;
    run_verify(cfg, &engine)
}

pub fn render_verify_table(report: &VerifyReport) -> String {
    let mut s = String::new();
    for c in &report.checks {
        let tag = match c.status {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::NotApplicable => "N/A ",
        };
        let _ = writeln!(s, "{tag}  {}/{}", c.suite, c.name);
    }
    let _ = writeln!(
        s,
        "{} checks, {} failed",
        report.checks.len(),
        report.failed.len()
    );
    s
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

pub struct SimulateOutput {
    pub csv: String,
    pub summary: Value,
}

pub fn cmd_simulate(cfg: &RunConfig) -> Result<SimulateOutput, CliError> {
    let engine = cfg.engine()?;
    let (label, dist) = match cfg.dist.as_slice() {
        [] => ("uniform".to_string(), d("uniform")),
        [one] => (
            one.clone(),
            parse_dist(one).map_err(|e| CliError::Config(e.to_string()))?,
        ),
        _ => return Err(CliError::Config("simulate takes a single --dist".into())),
    };
    let n = cfg.n.unwrap_or(2);
    let plan = SamplingPlan::new(cfg.scheme, n, cfg.cycles, cfg.seed)?;
    let sample = mc_sim::draw(&dist, &plan);
    let mut buf = Vec::new();
    sample.write_csv(&mut buf)?;
    let csv = String::from_utf8(buf).expect("csv is UTF-8");

    // Bonferroni across positions
    let alpha = cfg.alpha / n as f64;
    let mut positions = Vec::new();
    for (p, role) in sample.unit_roles.iter().enumerate() {
        let mean = sample.position_mean(p);
        let ks = if sample.cycles() >= mc_sim::MIN_KS_CYCLES {
            Some(mc_sim::ks_marginal_check(&sample, p, &dist, alpha)?)
        } else {
            None
        };
        let theory = match role.rank(n) {
            Some(i) => OrderStatDensitySpec::new(i, n, dist.clone())
                .ok()
                .and_then(|spec| {
                    let (lo, hi) = dist.support();
                    crate::quadrature::integrate_over(|x| x * spec.pdf(x), lo, hi, &cfg.tolerance())
                        .ok()
                        .map(|r| r.value)
                }),
            None => None,
        };
        positions.push(json!({
            "position": p + 1,
            "role": role.to_string(),
            "mean": mean,
            "theoretical_mean": theory,
            "ks": ks,
        }));
    }

    let mut gwe = Value::Null;
    if cfg.scheme == SamplingScheme::Erss {
        let m = cfg.weights(&[1.0])[0];
        let w = WeightSpec::power(m).map_err(|e| CliError::Config(e.to_string()))?;
        let mc = mc_sim::mc_gwe_erss(&dist, &w, n, cfg.draws, cfg.seed)?;
        let exact = engine.gwe_erss_quantile(&dist, &w, n)?;
        let z = if mc.error_estimate > 0.0 {
            (mc.value - exact.value) / mc.error_estimate
        } else {
            0.0
        };
        gwe = json!({
            "weight_m": m,
            "monte_carlo": mc,
            "engine": exact,
            "z_score": z,
        });
    }

    let summary = json!({
        "schema": SCHEMA_VERSION,
        "kind": "simulate",
        "config": cfg,
        "dist": label,
        "spec": SpecDocument::from_dist(&label, cfg.weights(&[1.0])[0]).ok(),
        "plan": plan,
        "ks_alpha_per_position": alpha,
        "positions": positions,
        "gwe": gwe,
    });
    Ok(SimulateOutput { csv, summary })
}

// ---------------------------------------------------------------------------
// order, bound, characterize
// ---------------------------------------------------------------------------

pub fn cmd_order(cfg: &RunConfig) -> Result<String, CliError> {
    let dists = match cfg.dist.as_slice() {
        [a, b] => [a, b].map(|s| parse_dist(s).map_err(|e| CliError::Config(e.to_string()))),
        _ => {
            return Err(CliError::Config(
                "order needs exactly two --dist values".into(),
            ))
        }
    };
    let [x, y] = dists;
    let (x, y) = (x?, y?);
    let kinds: Vec<OrderKind> = if cfg.orders.is_empty() {
        OrderKind::ALL.to_vec()
    } else {
        cfg.orders
            .iter()
            .map(|o| OrderKind::parse(o).map_err(|e| CliError::Config(e.to_string())))
            .collect::<Result<_, _>>()?
    };
    let mut reports = Vec::new();
    for k in kinds {
        match order_checks::check_order(k, &x, &y, cfg.grid) {
            Ok(r) => reports.push(Ok(r)),
            Err(e) => reports.push(Err((k, e.to_string()))),
        }
    }
    Ok(match cfg.format {
        Format::Json => {
            let items: Vec<Value> = reports
                .iter()
                .map(|r| match r {
                    Ok(r) => serde_json::to_value(r).expect("reports serialize"),
                    Err((k, e)) => json!({"order": k, "error": e}),
                })
                .collect();
            to_pretty(&json!({
                "schema": SCHEMA_VERSION,
                "kind": "order",
                "config": cfg,
                "reports": items,
            }))
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = reports
                .iter()
                .map(|r| match r {
                    Ok(r) => {
                        let w = r.witness_grid.first();
                        vec![
                            r.order.name().into(),
                            serde_json::to_value(r.holds)
                                .ok()
                                .and_then(|v| v.as_str().map(String::from))
                                .unwrap_or_default(),
                            fmt_num(r.max_violation),
                            fmt_num(r.tolerance),
                            w.map(|w| fmt_num(w.point)).unwrap_or_default(),
                            String::new(),
                        ]
                    }
                    Err((k, e)) => vec![
                        k.name().into(),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        e.clone(),
                    ],
                })
                .collect();
            csv_string(
                &[
                    "order",
                    "holds",
                    "max_violation",
                    "tolerance",
                    "witness",
                    "error",
                ],
                &rows,
            )
        }
    })
}

pub fn cmd_bound(cfg: &RunConfig) -> Result<Vec<VerdictRecord>, CliError> {
    let engine = cfg.engine()?;
    let dists = dists_or_default(cfg, &DEFAULT_TABLE_DISTS)?;
    let mut jobs = Vec::new();
    for (label, dist) in &dists {
        for m in cfg.weights(&[1.0, 2.0]) {
            for n in cfg.set_sizes(&[1, 2, 3, 4, 5, 6]) {
                jobs.push((label, dist, m, n));
            }
        }
    }
    Ok(jobs
        .par_iter()
        .map(|&(label, dist, m, n)| {
            let r = WeightSpec::power(m)
                .and_then(|w| order_checks::verify_ratio_bound(&engine, dist, &w, n));
            let mut rec = match r {
                Ok(rec) => rec,
                Err(e) => {
                    let mut rec = error_record("erss_srs_ratio_bound", &e);
                    rec.values.insert("n".into(), n as f64);
                    rec
                }
            };
            rec.notes.insert(0, format!("{label} m={m}"));
            rec
        })
        .collect())
}

fn error_record(check: &str, e: &Error) -> VerdictRecord {
    VerdictRecord {
        check: check.into(),
        outcome: Outcome::NotApplicable,
        hypotheses: Vec::new(),
        values: Default::default(),
        notes: vec![format!("error: {e}")],
    }
}

pub fn cmd_characterize(cfg: &RunConfig) -> Result<Vec<VerdictRecord>, CliError> {
    let engine = cfg.engine()?;
    let dists = dists_or_default(cfg, &["exponential:1", "uniform:-1,1"])?;
    let odd_ns: Vec<u32> = cfg
        .set_sizes(&[1, 3, 5])
        .into_iter()
        .filter(|n| n % 2 == 1)
        .collect();
    let mut out = Vec::new();
    for (label, dist) in &dists {
        let mut push = |r: Result<VerdictRecord, Error>, check: &str| {
            let mut rec = r.unwrap_or_else(|e| error_record(check, &e));
            rec.notes.insert(0, label.clone());
            out.push(rec);
        };
        push(
            order_checks::check_symmetry_characterization(
                &engine,
                dist,
                &WeightSpec::identity(),
                &odd_ns,
                1e-8,
                cfg.grid,
            ),
            "symmetry_characterization",
        );
        push(
            order_checks::check_exponential_characterization(&engine, dist, 1e-9),
            "exponential_characterization",
        );
    }
    Ok(out)
}

fn render_records(cfg: &RunConfig, records: &[VerdictRecord]) -> String {
    match cfg.format {
        Format::Json => to_pretty(&json!({
            "schema": SCHEMA_VERSION,
            "kind": "records",
            "config": cfg,
            "records": records,
        })),
        Format::Csv => {
            let rows: Vec<Vec<String>> = records
                .iter()
                .map(|r| {
                    let values = r
                        .values
                        .iter()
                        .map(|(k, v)| format!("{k}={}", fmt_num(*v)))
                        .collect::<Vec<_>>()
                        .join(";");
                    vec![
                        r.check.clone(),
                        serde_json::to_value(r.outcome)
                            .ok()
                            .and_then(|v| v.as_str().map(String::from))
                            .unwrap_or_default(),
                        values,
                        r.notes.join("; "),
                    ]
                })
                .collect();
            csv_string(&["check", "outcome", "values", "notes"], &rows)
        }
    }
}
