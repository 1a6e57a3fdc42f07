//! Command-line front end: parse flags, run one computation, print JSON or CSV.

use clap::{Args, Parser, Subcommand, ValueEnum};
use rabi_core::analysis::{capacity_probe, scan_f, spacing_stats, CapacityReport, ScanSeries, ScanVariant, SpacingStats};
use rabi_core::braak::{braak_spectrum, BRAAK_SAMPLES_PER_UNIT};
use rabi_core::dho::dho_eigenvalue;
use rabi_core::spectrum::{schweber_spectrum, solve_spectrum, EnergyLevel, SolveOptions, Spectrum, Variable};
use rabi_core::{Error, ModelParams, Parity};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Duration;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "rabi", version, about = "Quantum Rabi model spectra from orthogonal polynomials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lowest levels of one or both parities from the parity-resolved F(x).
    Spectrum(Flags),
    /// F sampled on a uniform grid (parity F(x), or F(ζ) with --schweber).
    Scan(Flags),
    /// Displaced oscillator (Δ = 0): closed form next to the solver.
    Dho(Flags),
    /// Zeros of Braak's G± functions.
    Braak(Flags),
    /// Parity F, Schweber F and Braak G± side by side.
    Compare(Flags),
    /// Nearest-neighbour spacing statistics.
    Stats(Flags),
    /// How many levels pass the residual and stability checks.
    Capacity(Flags),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParitySelector {
    Plus,
    Minus,
    Both,
}

impl ParitySelector {
    fn parities(self) -> Vec<Parity> {
        match self {
            ParitySelector::Plus => vec![Parity::Plus],
            ParitySelector::Minus => vec![Parity::Minus],
            ParitySelector::Both => Parity::BOTH.to_vec(),
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
struct Flags {
    #[arg(long, allow_hyphen_values = true)]
    kappa: f64,
    /// Qubit splitting; 0 when omitted.
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    omega: f64,
    #[arg(long, value_enum, default_value_t = ParitySelector::Both)]
    parity: ParitySelector,
    /// Levels per parity (capacity: level ceiling, default 1500).
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long, default_value_t = 2000)]
    trunc: usize,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, allow_hyphen_values = true)]
    xmin: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    xmax: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    zmin: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    zmax: Option<f64>,
    /// Grid points (scan: total, default 2000; braak/compare: per unit ζ, default 256).
    #[arg(long)]
    samples: Option<usize>,
    /// Scan the Schweber-form F(ζ) instead of the parity F(x).
    #[arg(long)]
    schweber: bool,
    /// Wall-clock budget of the capacity probe, seconds.
    #[arg(long, default_value_t = 120.0)]
    budget: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Effective configuration, written into every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub subcommand: String,
    pub kappa: f64,
    pub delta: f64,
    pub omega: f64,
    pub parity: ParitySelector,
    pub levels: usize,
    pub trunc: usize,
    pub tol: f64,
    pub xmin: Option<f64>,
    pub xmax: Option<f64>,
    pub zmin: Option<f64>,
    pub zmax: Option<f64>,
    pub samples: Option<usize>,
    pub schweber: bool,
    pub budget: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical() => EXIT_NUMERICAL,
            _ => EXIT_VALIDATION,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(s) => write!(f, "{s}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

// --- output records ------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub k: usize,
    pub parity: Option<Parity>,
    pub x: f64,
    pub epsilon: f64,
    pub zeta: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    pub bracket: [f64; 2],
    pub residual: f64,
    pub n_trunc: usize,
    pub stable: bool,
    pub shift: f64,
}

impl LevelRecord {
    fn new(l: &EnergyLevel, p: &ModelParams) -> Self {
        LevelRecord {
            k: l.k,
            parity: l.parity,
            x: l.value.x(p),
            epsilon: l.value.epsilon,
            zeta: l.value.zeta(p),
            energy: l.value.energy(p),
            bracket: [l.bracket.0, l.bracket.1],
            residual: l.residual,
            n_trunc: l.n_trunc,
            stable: l.stable,
            shift: l.shift,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRecord {
    pub params: ModelParams,
    pub parity: ParitySelector,
    pub variable: Variable,
    pub levels: Vec<LevelRecord>,
}

impl SpectrumRecord {
    fn new(s: &Spectrum, parity: ParitySelector) -> Self {
        SpectrumRecord {
            params: s.params,
            parity,
            variable: s.variable,
            levels: s.levels.iter().map(|l| LevelRecord::new(l, &s.params)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DhoRow {
    pub l: usize,
    pub epsilon: f64,
    pub zeta: f64,
    pub x: f64,
    pub solver_plus: Option<f64>,
    pub solver_minus: Option<f64>,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub parity: Parity,
    pub k: usize,
    pub zeta_parity_f: f64,
    pub zeta_schweber: Option<f64>,
    pub zeta_braak: Option<f64>,
    pub dev_parity_schweber: Option<f64>,
    pub dev_parity_braak: Option<f64>,
    pub dev_schweber_braak: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParityStats {
    pub parity: Parity,
    pub stats: SpacingStats,
}

/// Output document: the effective configuration and the result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Output<T> {
    pub config: RunConfig,
    pub result: T,
}

// --- number formatting -------------------------------------------------------------

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "NA".into()
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".into(), fmt_num)
}

/// Rewrite every float in `v` with 17 significant digits.
fn canonical(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            if x.is_finite() {
                Value::Number(fmt_num(x).parse().expect("formatted float is valid JSON"))
            } else {
                Value::Null
            }
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonical).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, canonical(v))).collect()),
        other => other,
    }
}

/// Pretty JSON with 17-digit floats and struct field order.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let v = canonical(serde_json::to_value(value).expect("output records serialize"));
    let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
    s.push('\n');
    s
}

fn csv_header(config: &RunConfig) -> String {
    let v = serde_json::to_value(config).expect("config serializes");
    let mut s = String::new();
    if let Value::Object(m) = canonical(v) {
        for (k, v) in m {
            let _ = writeln!(s, "# {k}={}", if v.is_null() { "NA".into() } else { v.to_string() });
        }
    }
    s
}

// --- dispatch --------------------------------------------------------------------

struct Job {
    config: RunConfig,
    params: ModelParams,
    opts: SolveOptions,
}

fn build(name: &str, f: &Flags) -> Result<Job, CliError> {
    let delta = f.delta.unwrap_or(0.0);
    if name == "dho" && delta != 0.0 {
        return Err(usage("dho is the Δ = 0 model; drop --delta"));
    }
    let params = ModelParams::new(f.kappa, delta, f.omega)?;
    let levels = f.levels.unwrap_or(if name == "capacity" { 1500 } else { 10 });
    if levels == 0 {
        return Err(usage("--levels must be at least 1"));
    }
    if f.trunc < 16 {
        return Err(usage("--trunc must be at least 16"));
    }
    if !(f.tol > 0.0 && f.tol.is_finite()) {
        return Err(usage("--tol must be positive"));
    }
    if !(f.budget >= 0.0 && f.budget.is_finite()) {
        return Err(usage("--budget must be a non-negative number of seconds"));
    }
    for (lo, hi, what) in [(f.xmin, f.xmax, "x"), (f.zmin, f.zmax, "z")] {
        if let (Some(a), Some(b)) = (lo, hi) {
            if !(a < b && a.is_finite() && b.is_finite()) {
                return Err(usage(format!("--{what}min must be below --{what}max")));
            }
        }
    }
    if f.schweber && name != "scan" {
        return Err(usage("--schweber only applies to scan"));
    }
    let samples = match name {
        "scan" => Some(f.samples.unwrap_or(2000)),
        "braak" | "compare" => Some(f.samples.unwrap_or(BRAAK_SAMPLES_PER_UNIT)),
        _ => f.samples,
    };
    let (mut xmin, mut xmax, mut zmin, mut zmax) = (f.xmin, f.xmax, f.zmin, f.zmax);
    if name == "scan" {
        if f.schweber {
            zmin = zmin.or(Some(-1.0));
            zmax = zmax.or(Some(2.0));
        } else {
            xmin = xmin.or(Some(-3.0));
            xmax = xmax.or(Some(4.0));
        }
    }
    if name == "braak" {
        let lo = zmin.unwrap_or(-delta - 1.0);
        zmin = Some(lo);
        zmax = Some(zmax.unwrap_or(lo + levels as f64 + 2.0));
    }
    let config = RunConfig {
        subcommand: name.into(),
        kappa: f.kappa,
        delta,
        omega: f.omega,
        parity: f.parity,
        levels,
        trunc: f.trunc,
        tol: f.tol,
        xmin,
        xmax,
        zmin,
        zmax,
        samples,
        schweber: f.schweber,
        budget: f.budget,
        format: f.format,
        out: f.out.clone(),
    };
    let opts = SolveOptions { n_trunc: f.trunc, tol: f.tol, ..SolveOptions::default() };
    Ok(Job { config, params, opts })
}

fn range(lo: Option<f64>, hi: Option<f64>) -> Result<(f64, f64), CliError> {
    match (lo, hi) {
        (Some(a), Some(b)) if a < b => Ok((a, b)),
        _ => Err(usage("range bounds missing or empty")),
    }
}

fn run_spectrum(job: &Job) -> Result<String, CliError> {
    let c = &job.config;
    let mut merged: Option<Spectrum> = None;
    for parity in c.parity.parities() {
        let s = solve_spectrum(&job.params, parity, c.levels, &job.opts)?;
        merged = Some(match merged {
            None => s,
            Some(m) => Spectrum::merge(&m, &s),
        });
    }
    let rec = SpectrumRecord::new(&merged.expect("at least one parity"), c.parity);
    Ok(match c.format {
        Format::Json => to_json(&Output { config: c.clone(), result: rec }),
        Format::Csv => levels_csv(c, &rec),
    })
}

fn levels_csv(c: &RunConfig, rec: &SpectrumRecord) -> String {
    let mut s = csv_header(c);
    s.push_str("k,parity,x,epsilon,zeta,E,bracket_lo,bracket_hi,residual,n_trunc,stable,shift\n");
    for l in &rec.levels {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            l.k,
            l.parity.map_or("NA", |p| p.as_str()),
            fmt_num(l.x),
            fmt_num(l.epsilon),
            fmt_num(l.zeta),
            fmt_num(l.energy),
            fmt_num(l.bracket[0]),
            fmt_num(l.bracket[1]),
            fmt_num(l.residual),
            l.n_trunc,
            l.stable,
            fmt_num(l.shift)
        );
    }
    s
}

fn run_braak(job: &Job) -> Result<String, CliError> {
    let c = &job.config;
    let (lo, hi) = range(c.zmin, c.zmax)?;
    let mut s = braak_spectrum(&job.params, lo, hi, c.samples.unwrap_or(BRAAK_SAMPLES_PER_UNIT), c.tol)?;
    if c.parity != ParitySelector::Both {
        let keep = c.parity.parities()[0];
        s.levels.retain(|l| l.parity == Some(keep));
    }
    let rec = SpectrumRecord::new(&s, c.parity);
    Ok(match c.format {
        Format::Json => to_json(&Output { config: c.clone(), result: rec }),
        Format::Csv => levels_csv(c, &rec),
    })
}

fn run_scan(job: &Job) -> Result<String, CliError> {
    let c = &job.config;
    let samples = c.samples.unwrap_or(2000);
    let series: Vec<ScanSeries> = if c.schweber {
        let (lo, hi) = range(c.zmin, c.zmax)?;
        vec![scan_f(&job.params, ScanVariant::Schweber, lo, hi, samples, &job.opts)?]
    } else {
        let (lo, hi) = range(c.xmin, c.xmax)?;
        c.parity
            .parities()
            .into_iter()
            .map(|p| scan_f(&job.params, ScanVariant::Parity(p), lo, hi, samples, &job.opts))
            .collect::<rabi_core::Result<_>>()?
    };
    Ok(match c.format {
        Format::Json => to_json(&Output { config: c.clone(), result: series }),
        Format::Csv => {
            let mut s = csv_header(c);
            if series.len() == 1 {
                s.push_str("t,F\n");
            } else {
                s.push_str("t,F_plus,F_minus\n");
            }
            for i in 0..series[0].samples.len() {
                s.push_str(&fmt_num(series[0].samples[i].0));
                for ser in &series {
                    s.push(',');
                    s.push_str(&fmt_opt(ser.samples[i].1));
                }
                s.push('\n');
            }
            let poles: Vec<String> = series.iter().flat_map(|ser| ser.poles.iter().map(|&p| fmt_num(p))).collect();
            let _ = writeln!(s, "# poles={}", poles.join(";"));
            s
        }
    })
}

fn run_dho(job: &Job) -> Result<String, CliError> {
    let c = &job.config;
    let kappa = job.params.kappa();
    let mut solved: [Option<Vec<f64>>; 2] = [None, None];
    for parity in c.parity.parities() {
        let s = solve_spectrum(&job.params, parity, c.levels, &job.opts)?;
        solved[(parity == Parity::Minus) as usize] = Some(s.epsilons());
    }
    let rows: Vec<DhoRow> = (0..c.levels)
        .map(|l| {
            let epsilon = dho_eigenvalue(l, kappa);
            let solver_plus = solved[0].as_ref().map(|v| v[l]);
            let solver_minus = solved[1].as_ref().map(|v| v[l]);
            let max_deviation =
                [solver_plus, solver_minus].iter().flatten().map(|v| (v - epsilon).abs()).fold(0.0, f64::max);
            DhoRow { l, epsilon, zeta: l as f64, x: epsilon / kappa, solver_plus, solver_minus, max_deviation }
        })
        .collect();
    Ok(match c.format {
        Format::Json => to_json(&Output { config: c.clone(), result: rows }),
        Format::Csv => {
            let mut s = csv_header(c);
            s.push_str("l,epsilon,zeta,x,solver_plus,solver_minus,max_deviation\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    r.l,
                    fmt_num(r.epsilon),
                    fmt_num(r.zeta),
                    fmt_num(r.x),
                    fmt_opt(r.solver_plus),
                    fmt_opt(r.solver_minus),
                    fmt_num(r.max_deviation)
                );
            }
            s
        }
    })
}

fn nearest(values: &[f64], t: f64) -> Option<f64> {
    values.iter().copied().min_by(|a, b| (a - t).abs().total_cmp(&(b - t).abs()))
}

fn run_compare(job: &Job) -> Result<String, CliError> {
    let c = &job.config;
    let p = &job.params;
    let per_unit = c.samples.unwrap_or(BRAAK_SAMPLES_PER_UNIT);
    let mut ours = Vec::new();
    for parity in c.parity.parities() {
        ours.push((parity, solve_spectrum(p, parity, c.levels, &job.opts)?.zetas()));
    }
    let all: Vec<f64> = ours.iter().flat_map(|(_, z)| z.iter().copied()).collect();
    let lo = c.zmin.unwrap_or(all.iter().copied().fold(f64::INFINITY, f64::min) - 0.5);
    let hi = c.zmax.unwrap_or(all.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 0.5);
    let schweber = schweber_spectrum(p, lo, hi, per_unit, &job.opts)?.zetas();
    let braak = braak_spectrum(p, lo, hi, per_unit, c.tol)?;
    let dev = |a: Option<f64>, b: Option<f64>| Some((a? - b?).abs());
    let mut rows = Vec::new();
    for (parity, zetas) in &ours {
        let labelled: Vec<f64> = braak.of_parity(*parity).iter().map(|l| l.value.zeta(p)).collect();
        for (k, &z) in zetas.iter().enumerate() {
            let zs = nearest(&schweber, z);
            let zb = nearest(&labelled, z);
            rows.push(CompareRow {
                parity: *parity,
                k,
                zeta_parity_f: z,
                zeta_schweber: zs,
                zeta_braak: zb,
                dev_parity_schweber: dev(Some(z), zs),
                dev_parity_braak: dev(Some(z), zb),
                dev_schweber_braak: dev(zs, zb),
            });
        }
    }
    Ok(match c.format {
        Format::Json => to_json(&Output { config: c.clone(), result: rows }),
        Format::Csv => {
            let mut s = csv_header(c);
            s.push_str(
                "parity,k,zeta_parity_f,zeta_schweber,zeta_braak,dev_parity_schweber,dev_parity_braak,dev_schweber_braak\n",
            );
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{}",
                    r.parity,
                    r.k,
                    fmt_num(r.zeta_parity_f),
                    fmt_opt(r.zeta_schweber),
                    fmt_opt(r.zeta_braak),
                    fmt_opt(r.dev_parity_schweber),
                    fmt_opt(r.dev_parity_braak),
                    fmt_opt(r.dev_schweber_braak)
                );
            }
            s
        }
    })
}

fn run_stats(job: &Job) -> Result<String, CliError> {
    let c = &job.config;
    let mut out = Vec::new();
    for parity in c.parity.parities() {
        let s = solve_spectrum(&job.params, parity, c.levels, &job.opts)?;
        out.push(ParityStats { parity, stats: spacing_stats(&s)? });
    }
    Ok(match c.format {
        Format::Json => to_json(&Output { config: c.clone(), result: out }),
        Format::Csv => {
            let mut s = csv_header(c);
            s.push_str("parity,bin_lo,bin_hi,count\n");
            for ps in &out {
                let w = ps.stats.bin_width;
                for (i, n) in ps.stats.histogram.iter().enumerate() {
                    let _ = writeln!(s, "{},{},{},{}", ps.parity, fmt_num(i as f64 * w), fmt_num((i + 1) as f64 * w), n);
                }
                let _ = writeln!(s, "{},{},NA,{}", ps.parity, fmt_num(ps.stats.histogram.len() as f64 * w), ps.stats.overflow);
            }
            s
        }
    })
}

fn run_capacity(job: &Job) -> Result<String, CliError> {
    let c = &job.config;
    let budget = Duration::from_secs_f64(c.budget);
    let reports: Vec<CapacityReport> = c
        .parity
        .parities()
        .into_iter()
        .map(|p| capacity_probe(&job.params, p, c.levels, budget, &job.opts))
        .collect::<rabi_core::Result<_>>()?;
    Ok(match c.format {
        Format::Json => to_json(&Output { config: c.clone(), result: reports }),
        Format::Csv => {
            let mut s = csv_header(c);
            s.push_str(
                "parity,levels_computed,n_ceiling,n_trunc,elapsed_secs,budget_exhausted,failure_k,failure_reason,reference\n",
            );
            for r in &reports {
                let (fk, reason) = match &r.first_failure {
                    Some(f) => (f.k.to_string(), format!("\"{}\"", f.reason.replace('"', "'"))),
                    None => ("NA".into(), "NA".into()),
                };
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{}",
                    r.parity,
                    r.levels_computed,
                    r.n_ceiling,
                    r.n_trunc,
                    fmt_num(r.elapsed_secs),
                    r.budget_exhausted,
                    fk,
                    reason,
                    r.reference
                );
            }
            s
        }
    })
}

/// Parse `argv` (program name first) and produce the output text.
pub fn execute<I, T>(argv: I) -> Result<(String, Option<PathBuf>), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| usage(e.to_string()))?;
    let (name, flags) = match &cli.command {
        Command::Spectrum(f) => ("spectrum", f),
        Command::Scan(f) => ("scan", f),
        Command::Dho(f) => ("dho", f),
        Command::Braak(f) => ("braak", f),
        Command::Compare(f) => ("compare", f),
        Command::Stats(f) => ("stats", f),
        Command::Capacity(f) => ("capacity", f),
    };
    let job = build(name, flags)?;
    let text = match name {
        "spectrum" => run_spectrum(&job),
        "scan" => run_scan(&job),
        "dho" => run_dho(&job),
        "braak" => run_braak(&job),
        "compare" => run_compare(&job),
        "stats" => run_stats(&job),
        _ => run_capacity(&job),
    }?;
    Ok((text, job.config.out))
}

/// Run the command line and return the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    // help and version are not errors
    if let Err(e) = Cli::try_parse_from(&args) {
        use clap::error::ErrorKind;
        if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
            print!("{e}");
            return EXIT_OK;
        }
    }
    match execute(args) {
        Ok((text, None)) => {
            print!("{text}");
            EXIT_OK
        }
        Ok((text, Some(path))) => match std::fs::write(&path, text) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                eprintln!("rabi: {}", CliError::Io(e));
                EXIT_VALIDATION
            }
        },
        Err(e) => {
            eprintln!("rabi: {e}");
            e.exit_code()
        }
    }
}
