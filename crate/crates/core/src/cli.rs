//! Command-line front end. `main.rs` only parses arguments and maps the
//! outcome onto an exit code; everything else lives here so it can be
//! driven from tests.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distfit::sample::sub_seed;
use crate::distfit::{
    fit_exp_profile, fit_gamma_lsq, fit_lognormal_lsq, fit_powerlaw_tail, gof_pvalue_mc,
};
use crate::json::{f17, SCHEMA_VERSION};
use crate::orderflow::{self, partition_by_day, OrderEvent, StreamError};
use crate::profiles::{replay_day, write_cancels_csv, ProfileEntry, ProfileSet, ProfilesConfig};
use crate::synth::{
    generate_stream, simulate_uniform_queues, ArrivalMix, GenConfig, PriceLevelLaw,
    QueuePositionLaw, QueueSimConfig,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_DATA: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INTERNAL: u8 = 3;

/// An error together with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    fn data(error: anyhow::Error) -> Self {
        Failure { code: EXIT_DATA, error }
    }

    fn usage(error: anyhow::Error) -> Self {
        Failure { code: EXIT_USAGE, error }
    }

    fn internal(error: anyhow::Error) -> Self {
        Failure { code: EXIT_INTERNAL, error }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

type CmdResult = Result<u8, Failure>;

#[derive(Debug, Parser)]
#[command(name = "lobcancel", version, about = "Order-book cancellation profiles from order flow")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse event files and report per-file errors.
    Validate(ValidateArgs),
    /// Rebuild books and write profiles.json and cancels.csv.
    Profile(ProfileArgs),
    /// Fit the parametric laws to a profiles.json and write fits.json.
    Fit(FitArgs),
    /// Write a synthetic event stream with known cancellation laws.
    Gen(GenArgs),
    /// Run the uniform-queue experiment.
    Simqueues(SimqueuesArgs),
    /// Print a text summary of profiles (and fits).
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Keep only these instruments (repeatable).
    #[arg(long = "instrument")]
    pub instruments: Vec<String>,
    /// Bins for the (0, 1] profiles.
    #[arg(long)]
    pub bins: Option<usize>,
    /// Log-spaced bins for the normalized level profile.
    #[arg(long)]
    pub log_bins: Option<usize>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    pub profiles: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub repeats: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "instrument")]
    pub instruments: Vec<String>,
    #[arg(long)]
    pub no_lognormal: bool,
    #[arg(long)]
    pub no_powerlaw: bool,
    #[arg(long)]
    pub no_exp: bool,
    /// Also fit the truncated gamma comparison model.
    #[arg(long)]
    pub gamma: bool,
    /// Skip the Monte Carlo p-value.
    #[arg(long)]
    pub no_pvalue: bool,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub events: Option<usize>,
    #[arg(long)]
    pub instrument: Option<String>,
    #[arg(long)]
    pub date: Option<NaiveDate>,
    /// Log-normal location of the price-level law.
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Uniform price-level law instead of the log-normal.
    #[arg(long, conflicts_with_all = ["mu", "sigma"])]
    pub uniform_levels: bool,
    /// Exponent of the queue-position profile.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long, conflicts_with = "beta")]
    pub uniform_queue: bool,
    #[arg(long)]
    pub limit: Option<f64>,
    #[arg(long)]
    pub marketable: Option<f64>,
    #[arg(long)]
    pub cancel: Option<f64>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub queue_len: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SimqueuesArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 1_000_000)]
    pub queues: u64,
    #[arg(long, default_value_t = 100)]
    pub max_len: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 50)]
    pub bins: usize,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    pub profiles: PathBuf,
    #[arg(long)]
    pub fits: Option<PathBuf>,
}

/// Optional TOML file shared by `profile`, `fit` and `gen`. Flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    #[serde(default)]
    pub profile: ProfileSection,
    #[serde(default)]
    pub fit: FitSection,
    pub gen: Option<GenConfig>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSection {
    pub bins: Option<usize>,
    pub log_bins: Option<usize>,
    #[serde(default)]
    pub instruments: Vec<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    pub repeats: Option<usize>,
    pub seed: Option<u64>,
    pub lognormal: Option<bool>,
    pub powerlaw: Option<bool>,
    pub exp: Option<bool>,
    pub gamma: Option<bool>,
    pub pvalue: Option<bool>,
}

fn load_config(path: Option<&Path>) -> Result<RunConfigFile, Failure> {
    let Some(path) = path else {
        return Ok(RunConfigFile::default());
    };
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))
        .map_err(Failure::usage)?;
    toml::from_str(&text)
        .with_context(|| format!("config {}", path.display()))
        .map_err(Failure::usage)
}

fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))
        .map_err(Failure::usage)
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::usage)
}

pub fn run(cli: Cli, out: &mut dyn Write) -> CmdResult {
    match cli.command {
        Command::Validate(a) => cmd_validate(&a, out),
        Command::Profile(a) => cmd_profile(&a, out),
        Command::Fit(a) => cmd_fit(&a, out),
        Command::Gen(a) => cmd_gen(&a, out),
        Command::Simqueues(a) => cmd_simqueues(&a, out),
        Command::Report(a) => cmd_report(&a, out),
    }
}

fn io_fail(e: std::io::Error) -> Failure {
    Failure::internal(anyhow!(e).context("writing to stdout"))
}

pub fn cmd_validate(args: &ValidateArgs, out: &mut dyn Write) -> CmdResult {
    let mut clean = true;
    for path in &args.files {
        let file = File::open(path)
            .with_context(|| format!("opening {}", path.display()))
            .map_err(Failure::data)?;
        let report = orderflow::parse_stream_lenient(BufReader::new(file))
            .with_context(|| format!("reading {}", path.display()))
            .map_err(Failure::data)?;
        writeln!(
            out,
            "{}: {} events, {} errors",
            path.display(),
            report.events.len(),
            report.errors.len()
        )
        .map_err(io_fail)?;
        for e in &report.errors {
            writeln!(out, "{}:{}", path.display(), e).map_err(io_fail)?;
        }
        clean &= report.errors.is_empty();
    }
    Ok(if clean { EXIT_OK } else { EXIT_DATA })
}

fn read_events(path: &Path) -> Result<Vec<OrderEvent>, Failure> {
    let file = File::open(path)
        .with_context(|| format!("opening {}", path.display()))
        .map_err(Failure::data)?;
    orderflow::parse_stream(BufReader::new(file)).map_err(|e| match e {
        StreamError::Invalid(errors) => {
            let shown: Vec<String> = errors.iter().take(5).map(|e| e.to_string()).collect();
            Failure::data(anyhow!(
                "{}: {} invalid rows ({}{})",
                path.display(),
                errors.len(),
                shown.join("; "),
                if errors.len() > 5 { "; ..." } else { "" }
            ))
        }
        other => Failure::data(anyhow!(other).context(format!("reading {}", path.display()))),
    })
}

pub fn cmd_profile(args: &ProfileArgs, out: &mut dyn Write) -> CmdResult {
    let file_cfg = load_config(args.config.as_deref())?.profile;
    let cfg = ProfilesConfig {
        unit_bins: args.bins.or(file_cfg.bins).unwrap_or(50),
        log_bins: args.log_bins.or(file_cfg.log_bins).unwrap_or(60),
    };
    if cfg.unit_bins == 0 || cfg.log_bins == 0 {
        return Err(Failure::usage(anyhow!("bin counts must be positive")));
    }
    let filter: Vec<String> = if args.instruments.is_empty() {
        file_cfg.instruments
    } else {
        args.instruments.clone()
    };

    let mut events = Vec::new();
    for path in &args.files {
        events.extend(read_events(path)?);
    }
    if !filter.is_empty() {
        events.retain(|e| filter.contains(&e.instrument));
    }
    if events.is_empty() {
        return Err(Failure::usage(anyhow!("EmptyInput: no events to profile")));
    }

    let days: Vec<_> = partition_by_day(events).into_iter().collect();
    let replays: Vec<_> = days
        .par_iter()
        .map(|(key, evs)| {
            replay_day(evs).map_err(|e| {
                let internal = e.is_internal();
                let err = anyhow!(e).context(format!("{} {}", key.instrument, key.date));
                if internal {
                    Failure::internal(err)
                } else {
                    Failure::data(err)
                }
            })
        })
        .collect::<Result<_, _>>()?;

    let set = ProfileSet::build(&replays, &cfg);
    ensure_dir(&args.out)?;
    write_file(&args.out.join("profiles.json"), &set.to_json())?;
    let cancels = args.out.join("cancels.csv");
    let f = File::create(&cancels)
        .with_context(|| format!("writing {}", cancels.display()))
        .map_err(Failure::usage)?;
    let mut w = BufWriter::new(f);
    write_cancels_csv(&replays, &mut w)
        .and_then(|_| w.flush())
        .with_context(|| format!("writing {}", cancels.display()))
        .map_err(Failure::usage)?;

    for e in &set.profiles {
        writeln!(
            out,
            "{} {}: {} cancellations of {} orders over {} days",
            e.instrument, e.side, e.counts.cancellations, e.counts.orders, e.counts.days
        )
        .map_err(io_fail)?;
    }
    Ok(EXIT_OK)
}

/// A float written with 17 significant digits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Num(#[serde(serialize_with = "f17")] pub f64);

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum DiagValue {
    Num(Num),
    Int(u64),
    Bool(bool),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitRecord {
    pub instrument: String,
    pub side: String,
    pub model: &'static str,
    /// Which profile the model was fitted to.
    pub input: &'static str,
    pub params: BTreeMap<&'static str, Num>,
    pub diagnostics: BTreeMap<&'static str, DiagValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitRunConfig {
    pub lognormal: bool,
    pub powerlaw: bool,
    pub exp: bool,
    pub gamma: bool,
    pub pvalue: bool,
    pub repeats: usize,
    pub objective: &'static str,
    pub pvalue_method: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitsFile {
    pub schema_version: u32,
    pub config: FitRunConfig,
    pub seed: u64,
    pub fits: Vec<FitRecord>,
}

pub fn load_profiles(path: &Path) -> Result<ProfileSet, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::data)?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    let set: ProfileSet = serde_path_to_error::deserialize(de).map_err(|e| {
        Failure::data(anyhow!(
            "{}: schema error at `{}`: {}",
            path.display(),
            e.path(),
            e.inner()
        ))
    })?;
    if set.schema_version != SCHEMA_VERSION {
        return Err(Failure::data(anyhow!(
            "{}: schema_version {} not supported (expected {SCHEMA_VERSION})",
            path.display(),
            set.schema_version
        )));
    }
    Ok(set)
}

fn record(entry: &ProfileEntry, model: &'static str, input: &'static str) -> FitRecord {
    FitRecord {
        instrument: entry.instrument.clone(),
        side: entry.side.as_str().to_string(),
        model,
        input,
        params: BTreeMap::new(),
        diagnostics: BTreeMap::new(),
        error: None,
    }
}

fn fit_entry(entry: &ProfileEntry, index: usize, cfg: &FitRunConfig, seed: u64) -> Vec<FitRecord> {
    let mut out = Vec::new();
    let missing = |what: &str| Some(format!("no {what} samples"));
    if cfg.lognormal {
        let mut r = record(entry, "truncated_lognormal", "X");
        match entry.pdf_x.as_ref() {
            None => r.error = missing("X"),
            Some(pdf) => match fit_lognormal_lsq(pdf) {
                Err(e) => r.error = Some(e.to_string()),
                Ok(fit) => {
                    r.params.insert("mu", Num(fit.mu));
                    r.params.insert("sigma", Num(fit.sigma));
                    r.diagnostics.insert("z", DiagValue::Num(Num(fit.z)));
                    r.diagnostics.insert("rms", DiagValue::Num(Num(fit.rms)));
                    r.diagnostics.insert("sse", DiagValue::Num(Num(fit.sse)));
                    r.diagnostics.insert("at_bound", DiagValue::Bool(fit.at_bound));
                    r.diagnostics.insert("iterations", DiagValue::Int(fit.iterations as u64));
                    r.diagnostics.insert("samples", DiagValue::Int(pdf.count));
                    if cfg.pvalue {
                        match gof_pvalue_mc(pdf, &fit, cfg.repeats, sub_seed(seed, index as u64)) {
                            Ok(g) => {
                                r.diagnostics.insert("p_value", DiagValue::Num(Num(g.p_value)));
                                r.diagnostics.insert("repeats", DiagValue::Int(g.repeats as u64));
                                r.diagnostics.insert("failed_refits", DiagValue::Int(g.failed_refits as u64));
                            }
                            Err(e) => r.error = Some(format!("p-value: {e}")),
                        }
                    }
                }
            },
        }
        out.push(r);
    }
    if cfg.gamma {
        let mut r = record(entry, "truncated_gamma", "X");
        match entry.pdf_x.as_ref() {
            None => r.error = missing("X"),
            Some(pdf) => match fit_gamma_lsq(pdf) {
                Err(e) => r.error = Some(e.to_string()),
                Ok(fit) => {
                    r.params.insert("shape", Num(fit.shape));
                    r.params.insert("scale", Num(fit.scale));
                    r.diagnostics.insert("z", DiagValue::Num(Num(fit.z)));
                    r.diagnostics.insert("rms", DiagValue::Num(Num(fit.rms)));
                    r.diagnostics.insert("sse", DiagValue::Num(Num(fit.sse)));
                    r.diagnostics.insert("at_bound", DiagValue::Bool(fit.at_bound));
                    r.diagnostics.insert("iterations", DiagValue::Int(fit.iterations as u64));
                }
            },
        }
        out.push(r);
    }
    if cfg.powerlaw {
        let mut r = record(entry, "powerlaw_tail", "Xhat");
        match fit_powerlaw_tail(&entry.xhat_samples) {
            Err(e) => r.error = Some(e.to_string()),
            Ok(fit) => {
                r.params.insert("alpha", Num(fit.alpha));
                r.params.insert("x_min", Num(fit.x_min));
                r.diagnostics.insert("sigma_hat", DiagValue::Num(Num(fit.sigma_hat)));
                r.diagnostics.insert("ks", DiagValue::Num(Num(fit.ks)));
                r.diagnostics.insert("m", DiagValue::Int(fit.m as u64));
                r.diagnostics.insert("n", DiagValue::Int(fit.n as u64));
                r.diagnostics.insert("candidates", DiagValue::Int(fit.candidates as u64));
            }
        }
        out.push(r);
    }
    if cfg.exp {
        let mut r = record(entry, "exp_profile", "Y");
        match entry.pdf_y.as_ref() {
            None => r.error = missing("Y"),
            Some(pdf) => match fit_exp_profile(pdf) {
                Err(e) => r.error = Some(e.to_string()),
                Ok(fit) => {
                    r.params.insert("beta", Num(fit.beta));
                    r.diagnostics.insert("z", DiagValue::Num(Num(fit.z)));
                    r.diagnostics.insert("rms", DiagValue::Num(Num(fit.rms)));
                    r.diagnostics.insert("sse", DiagValue::Num(Num(fit.sse)));
                    r.diagnostics.insert("at_bound", DiagValue::Bool(fit.at_bound));
                    r.diagnostics.insert("samples", DiagValue::Int(pdf.count));
                }
            },
        }
        out.push(r);
    }
    out
}

/// Fits every entry of a profile set. Entries run in parallel; the output
/// keeps the profile order.
pub fn fit_profiles(set: &ProfileSet, cfg: &FitRunConfig, seed: u64, instruments: &[String]) -> FitsFile {
    let fits = set
        .profiles
        .par_iter()
        .enumerate()
        .filter(|(_, e)| instruments.is_empty() || instruments.contains(&e.instrument))
        .map(|(i, e)| fit_entry(e, i, cfg, seed))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    FitsFile {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        seed,
        fits,
    }
}

pub fn cmd_fit(args: &FitArgs, out: &mut dyn Write) -> CmdResult {
    let file_cfg = load_config(args.config.as_deref())?.fit;
    let cfg = FitRunConfig {
        lognormal: !args.no_lognormal && file_cfg.lognormal.unwrap_or(true),
        powerlaw: !args.no_powerlaw && file_cfg.powerlaw.unwrap_or(true),
        exp: !args.no_exp && file_cfg.exp.unwrap_or(true),
        gamma: args.gamma || file_cfg.gamma.unwrap_or(false),
        pvalue: !args.no_pvalue && file_cfg.pvalue.unwrap_or(true),
        repeats: args.repeats.or(file_cfg.repeats).unwrap_or(1000),
        objective: "unweighted_lsq_bin_centers",
        pvalue_method: "refit_bootstrap_rms",
    };
    if cfg.pvalue && cfg.lognormal && cfg.repeats == 0 {
        return Err(Failure::usage(anyhow!("--repeats must be at least 1 when p-values are requested")));
    }
    let seed = args.seed.or(file_cfg.seed).unwrap_or(0);
    let set = load_profiles(&args.profiles)?;
    let fits = fit_profiles(&set, &cfg, seed, &args.instruments);
    ensure_dir(&args.out)?;
    let json = serde_json::to_string_pretty(&fits)
        .context("serializing fits")
        .map_err(Failure::internal)?;
    write_file(&args.out.join("fits.json"), &json)?;
    for f in &fits.fits {
        let params: Vec<String> = f.params.iter().map(|(k, v)| format!("{k}={:.4}", v.0)).collect();
        match &f.error {
            Some(e) => writeln!(out, "{} {} {}: error: {e}", f.instrument, f.side, f.model),
            None => writeln!(out, "{} {} {}: {}", f.instrument, f.side, f.model, params.join(" ")),
        }
        .map_err(io_fail)?;
    }
    Ok(EXIT_OK)
}

pub fn gen_config(args: &GenArgs) -> Result<GenConfig, Failure> {
    let mut cfg = load_config(args.config.as_deref())?.gen.unwrap_or_default();
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(n) = args.events {
        cfg.n_events = n;
    }
    if let Some(i) = &args.instrument {
        cfg.instrument = i.clone();
    }
    if let Some(d) = args.date {
        cfg.date = d;
    }
    if args.uniform_levels {
        cfg.price_level_law = PriceLevelLaw::Uniform;
    } else if args.mu.is_some() || args.sigma.is_some() {
        let (mu0, sigma0) = match cfg.price_level_law {
            PriceLevelLaw::TruncatedLognormal { mu, sigma } => (mu, sigma),
            PriceLevelLaw::Uniform => (-2.14, 1.11),
        };
        cfg.price_level_law = PriceLevelLaw::TruncatedLognormal {
            mu: args.mu.unwrap_or(mu0),
            sigma: args.sigma.unwrap_or(sigma0),
        };
    }
    if args.uniform_queue {
        cfg.queue_position_law = QueuePositionLaw::Uniform;
    } else if let Some(beta) = args.beta {
        cfg.queue_position_law = QueuePositionLaw::ExpProfile { beta };
    }
    if args.limit.is_some() || args.marketable.is_some() || args.cancel.is_some() {
        let m = cfg.mix;
        cfg.mix = ArrivalMix {
            limit: args.limit.unwrap_or(m.limit),
            marketable: args.marketable.unwrap_or(m.marketable),
            cancel: args.cancel.unwrap_or(m.cancel),
        };
    }
    if let Some(d) = args.depth {
        cfg.depth_levels = d;
    }
    if let Some(q) = args.queue_len {
        cfg.queue_len = q;
    }
    cfg.validate().map_err(|e| Failure::usage(anyhow!(e)))?;
    Ok(cfg)
}

pub fn cmd_gen(args: &GenArgs, out: &mut dyn Write) -> CmdResult {
    let cfg = gen_config(args)?;
    let events = generate_stream(&cfg).map_err(|e| Failure::internal(anyhow!(e)))?;
    if let Some(dir) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(dir)?;
    }
    let f = File::create(&args.out)
        .with_context(|| format!("writing {}", args.out.display()))
        .map_err(Failure::usage)?;
    let mut w = BufWriter::new(f);
    orderflow::write_stream(&events, &mut w)
        .and_then(|_| w.flush())
        .with_context(|| format!("writing {}", args.out.display()))
        .map_err(Failure::usage)?;
    let cfg_json = serde_json::to_string_pretty(&cfg)
        .context("serializing config")
        .map_err(Failure::internal)?;
    writeln!(out, "{cfg_json}").map_err(io_fail)?;
    writeln!(out, "wrote {} events to {}", events.len(), args.out.display()).map_err(io_fail)?;
    Ok(EXIT_OK)
}

pub fn cmd_simqueues(args: &SimqueuesArgs, out: &mut dyn Write) -> CmdResult {
    let cfg = QueueSimConfig {
        n_queues: args.queues,
        max_len: args.max_len,
        seed: args.seed,
        bins: args.bins,
    };
    let result = simulate_uniform_queues(&cfg).map_err(|e| Failure::usage(anyhow!(e)))?;
    if let Some(dir) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(dir)?;
    }
    write_file(&args.out, &result.to_json())?;
    for p in result.largest(5) {
        writeln!(out, "Y = {}/{}: {:.6}", p.num, p.den, p.probability).map_err(io_fail)?;
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Deserialize)]
struct FitsView {
    fits: Vec<FitView>,
}

#[derive(Debug, Deserialize)]
struct FitView {
    instrument: String,
    side: String,
    model: String,
    params: BTreeMap<String, Option<f64>>,
    #[serde(default)]
    error: Option<String>,
}

pub fn cmd_report(args: &ReportArgs, out: &mut dyn Write) -> CmdResult {
    let set = load_profiles(&args.profiles)?;
    let fits: Option<FitsView> = match &args.fits {
        None => None,
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(Failure::data)?;
            let de = &mut serde_json::Deserializer::from_str(&text);
            Some(serde_path_to_error::deserialize(de).map_err(|e| {
                Failure::data(anyhow!("{}: schema error at `{}`: {}", path.display(), e.path(), e.inner()))
            })?)
        }
    };
    let ratio = |r: Option<f64>| r.map_or("n/a".to_string(), |v| format!("{v:.4}"));
    for e in &set.profiles {
        let r = &e.class_ratios;
        let classes: Vec<String> = r
            .classes
            .iter()
            .enumerate()
            .map(|(i, c)| format!("r{}={}", i + 1, ratio(c.ratio)))
            .collect();
        writeln!(
            out,
            "{} {}: cancellations={} orders={} days={} r={} {}",
            e.instrument,
            e.side,
            e.counts.cancellations,
            e.counts.orders,
            e.counts.days,
            ratio(r.r),
            classes.join(" ")
        )
        .map_err(io_fail)?;
        if let Some(fits) = &fits {
            for f in fits
                .fits
                .iter()
                .filter(|f| f.instrument == e.instrument && f.side == e.side.as_str())
            {
                let line = match &f.error {
                    Some(err) => format!("error: {err}"),
                    None => f
                        .params
                        .iter()
                        .map(|(k, v)| format!("{k}={}", v.map_or("null".into(), |v| format!("{v:.4}"))))
                        .collect::<Vec<_>>()
                        .join(" "),
                };
                writeln!(out, "    {}: {line}", f.model).map_err(io_fail)?;
            }
        }
    }
    Ok(EXIT_OK)
}
