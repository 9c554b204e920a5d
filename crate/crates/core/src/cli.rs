//! The `brouwer` command line.
//!
//! Every command builds one JSON record; the text output is a rendering of
//! the same record. Exit codes: 0 success, 1 a check or expectation failed,
//! 2 usage or input error, 64 resource refusal.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::derivation::{self, CheckOutcome, Script};
use crate::drift::{self, CheckingKind, DriftError, RationalityDescriptor};
use crate::dyadic::Dyadic;
use crate::fleeing::{self, DecidableProperty, DigitOracle, FleeingError, DEFAULT_DIGIT_LIMIT};
use crate::logic::{self, Schema, StageTree, SweepBounds, SweepError};
use crate::reals::{self, OrderTable, Point, RealsError, Verdict};
use crate::spreads::{ConvergentFamily, EventTrace};

pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_HORIZON: usize = 48;
/// Largest stage of the traces a replay runs over.
pub const REPLAY_STAGES: u32 = 3;
/// Node bound of the semantic cross-check a replay runs on its script.
pub const REPLAY_SEMANTIC_NODES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputMode {
    Text,
    Json,
}

/// Defaults shared by all subcommands; flags override them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub horizon: usize,
    pub nodes: usize,
    pub atoms: usize,
    pub digits: usize,
    pub seed: u64,
    pub output: OutputMode,
}

impl Default for Config {
    fn default() -> Self {
        let defaults = SweepBounds::default();
        let digits = std::env::var("BW_DIGIT_LIMIT")
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_DIGIT_LIMIT);
        Config {
            horizon: DEFAULT_HORIZON,
            nodes: defaults.max_nodes,
            atoms: defaults.max_atoms,
            digits,
            seed: DEFAULT_SEED,
            output: OutputMode::Text,
        }
    }
}

impl Config {
    /// `key = value` lines; `#` starts a comment. Values may be quoted.
    pub fn parse(text: &str) -> Result<Config, String> {
        let mut c = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| format!("config line {}: expected key = value", i + 1))?;
            let key = key.trim();
            let value = value.trim().trim_matches('"');
            let positive = |v: &str| -> Result<usize, String> {
                match v.parse::<usize>() {
                    Ok(n) if n > 0 => Ok(n),
                    _ => Err(format!("config line {}: `{key}` must be a positive integer, got `{v}`", i + 1)),
                }
            };
            match key {
                "horizon" => c.horizon = positive(value)?,
                "nodes" => c.nodes = positive(value)?,
                "atoms" => c.atoms = positive(value)?,
                "digits" => c.digits = positive(value)?,
                "seed" => {
                    c.seed = value.parse().map_err(|_| format!("config line {}: bad seed `{value}`", i + 1))?;
                }
                "output" => {
                    c.output = match value {
                        "text" => OutputMode::Text,
                        "json" => OutputMode::Json,
                        _ => return Err(format!("config line {}: output is text or json, got `{value}`", i + 1)),
                    }
                }
                _ => return Err(format!("config line {}: unknown key `{key}`", i + 1)),
            }
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Config, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Config::parse(&text)
    }
}

/// Exit code and the text destined for stdout and stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Refusal(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Refusal(_) => 64,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Refusal(m) => m,
        }
    }
}

impl From<FleeingError> for Failure {
    fn from(e: FleeingError) -> Self {
        match e {
            FleeingError::ResourceBound { .. } => Failure::Refusal(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<SweepError> for Failure {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::ResourceRefusal { .. } => Failure::Refusal(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<RealsError> for Failure {
    fn from(e: RealsError) -> Self {
        match e {
            RealsError::UnknownAtHorizon { .. } => Failure::Refusal(format!("{e}; raise --horizon")),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<DriftError> for Failure {
    fn from(e: DriftError) -> Self {
        match e {
            DriftError::Reals(r) => r.into(),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

/// A command's result: the JSON record, its text rendering, and whether
/// every check it ran came out as expected.
struct Report {
    json: Value,
    text: String,
    ok: bool,
}

type Run = Result<Report, Failure>;

#[derive(Parser, Debug)]
#[command(name = "brouwer", version, about = "Choice sequences, fleeing properties and stage-tree logic")]
struct Cli {
    /// Emit the JSON record instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Config file (default ./brouwer.toml when present).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Random seed for sampling checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decimals of π.
    #[command(subcommand)]
    Pi(PiCmd),
    /// Searches for critical numbers and the points built on them.
    #[command(subcommand)]
    Fleeing(FleeingCmd),
    /// Comparisons, continuity moduli and order tables of points.
    #[command(subcommand)]
    Real(RealCmd),
    /// Checking numbers of bundled drifts.
    #[command(subcommand)]
    Drift(DriftCmd),
    /// Stage-tree forcing and principle sweeps.
    #[command(subcommand)]
    Logic(LogicCmd),
    /// Proof-script checking.
    #[command(subcommand)]
    Derive(DeriveCmd),
    /// Runs a canned pipeline over every trace case together with its script.
    Replay {
        section: Section,
    },
}

#[derive(Subcommand, Debug)]
enum PiCmd {
    /// The first N decimals after the point.
    Digits { n: usize },
    /// 1-based position of the first occurrence of a digit pattern.
    Find {
        #[arg(long)]
        pattern: String,
        #[arg(long)]
        limit: u64,
    },
}

#[derive(Subcommand, Debug)]
enum FleeingCmd {
    /// Least witness of a property up to the horizon.
    Search {
        #[arg(long)]
        property: String,
        #[arg(long)]
        horizon: Option<u64>,
    },
    /// Terms and intervals of a point steered by a property.
    Prefix {
        #[arg(long)]
        construction: Construction,
        #[arg(long, default_value = "pattern:0123456789")]
        property: String,
        #[arg(long, default_value = "halving")]
        family: String,
        #[arg(long, default_value_t = 12)]
        terms: usize,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Construction {
    BerlinR,
    VeldmanF2,
    CambridgeC,
}

#[derive(Args, Debug, Clone)]
struct TraceArgs {
    /// Event trace file (`never`, `true:<k>` or `false:<k>`).
    #[arg(long, value_name = "FILE", conflicts_with = "event")]
    trace: Option<PathBuf>,
    /// Event trace given inline.
    #[arg(long, value_name = "TRACE")]
    event: Option<String>,
}

#[derive(Subcommand, Debug)]
enum RealCmd {
    /// Order, apartness and coincidence verdicts for two points.
    Cmp {
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
        #[command(flatten)]
        trace: TraceArgs,
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Continuity modulus of a bundled map plus a sampled soundness check.
    Modulus {
        #[arg(long)]
        map: String,
        #[arg(long, default_value = "half")]
        at: String,
        #[arg(long, default_value_t = 3)]
        m0: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[command(flatten)]
        trace: TraceArgs,
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Order table of a comma-separated list of points and its virtual-order check.
    Order {
        #[arg(long, value_delimiter = ',')]
        points: Vec<String>,
        /// Pairs `i:j` (0-based) taken as coincident.
        #[arg(long, value_name = "I:J")]
        coincide: Vec<String>,
        #[command(flatten)]
        trace: TraceArgs,
        #[arg(long)]
        horizon: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
enum DriftCmd {
    /// Checking sequence terms, limit and rationality class.
    Run {
        #[arg(long)]
        drift: String,
        #[arg(long)]
        kind: String,
        #[command(flatten)]
        trace: TraceArgs,
        #[arg(long, default_value_t = 8)]
        terms: usize,
        /// Without a trace, run every trace resolving at or before this stage.
        #[arg(long, default_value_t = REPLAY_STAGES)]
        max_stage: u32,
    },
}

#[derive(Subcommand, Debug)]
enum LogicCmd {
    /// Is the formula forced at the node?
    Eval {
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        #[arg(long)]
        at: String,
        #[arg(long)]
        formula: String,
    },
    /// Exhaustive validity sweep of one principle.
    Sweep {
        #[arg(long)]
        schema: String,
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long)]
        atoms: Option<usize>,
        #[arg(long = "box")]
        max_box: Option<u32>,
    },
    /// Sweeps of all six principles.
    Suite {
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long)]
        atoms: Option<usize>,
        #[arg(long = "box")]
        max_box: Option<u32>,
    },
}

#[derive(Subcommand, Debug)]
enum DeriveCmd {
    /// Check a proof script.
    Check {
        #[arg(required_unless_present = "bundled", conflicts_with = "bundled")]
        file: Option<PathBuf>,
        #[arg(long)]
        bundled: Option<String>,
        /// Also check the conclusion on every stage tree up to this many nodes.
        #[arg(long)]
        semantic: Option<usize>,
    },
    /// The bundled scripts and their outcomes.
    List,
    /// Prerequisites of Kripke's schema with their countermodels.
    Ks,
    /// Print a bundled script.
    Show { name: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Section {
    #[value(name = "vienna-9")]
    Vienna9,
    #[value(name = "drift-11")]
    Drift11,
    #[value(name = "ks-12")]
    Ks12,
    #[value(name = "cambridge-13")]
    Cambridge13,
}

impl Section {
    pub fn name(self) -> &'static str {
        match self {
            Section::Vienna9 => "vienna-9",
            Section::Drift11 => "drift-11",
            Section::Ks12 => "ks-12",
            Section::Cambridge13 => "cambridge-13",
        }
    }
}

/// Parses `argv` (program name first) and runs the command.
pub fn dispatch<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let config = match load_config(&cli) {
        Ok(c) => c,
        Err(m) => return Outcome { code: 2, stdout: String::new(), stderr: format!("error: {m}\n") },
    };
    let name = command_name(&cli.command);
    match run(&cli.command, &config) {
        Ok(report) => {
            let code = if report.ok { 0 } else { 1 };
            let stdout = match config.output {
                OutputMode::Json => {
                    let record = json!({
                        "command": name,
                        "seed": config.seed,
                        "ok": report.ok,
                        "result": report.json,
                    });
                    format!("{}\n", serde_json::to_string_pretty(&record).expect("records serialize"))
                }
                OutputMode::Text => {
                    let mut t = report.text;
                    if !t.ends_with('\n') {
                        t.push('\n');
                    }
                    t
                }
            };
            Outcome { code, stdout, stderr: String::new() }
        }
        Err(f) => Outcome { code: f.code(), stdout: String::new(), stderr: format!("error: {}\n", f.message()) },
    }
}

fn load_config(cli: &Cli) -> Result<Config, String> {
    let mut config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => {
            let default = Path::new("brouwer.toml");
            if default.is_file() {
                Config::load(default)?
            } else {
                Config::default()
            }
        }
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if cli.json {
        config.output = OutputMode::Json;
    }
    Ok(config)
}

fn command_name(c: &Command) -> String {
    let (a, b) = match c {
        Command::Pi(PiCmd::Digits { .. }) => ("pi", "digits"),
        Command::Pi(PiCmd::Find { .. }) => ("pi", "find"),
        Command::Fleeing(FleeingCmd::Search { .. }) => ("fleeing", "search"),
        Command::Fleeing(FleeingCmd::Prefix { .. }) => ("fleeing", "prefix"),
        Command::Real(RealCmd::Cmp { .. }) => ("real", "cmp"),
        Command::Real(RealCmd::Modulus { .. }) => ("real", "modulus"),
        Command::Real(RealCmd::Order { .. }) => ("real", "order"),
        Command::Drift(DriftCmd::Run { .. }) => ("drift", "run"),
        Command::Logic(LogicCmd::Eval { .. }) => ("logic", "eval"),
        Command::Logic(LogicCmd::Sweep { .. }) => ("logic", "sweep"),
        Command::Logic(LogicCmd::Suite { .. }) => ("logic", "suite"),
        Command::Derive(DeriveCmd::Check { .. }) => ("derive", "check"),
        Command::Derive(DeriveCmd::List) => ("derive", "list"),
        Command::Derive(DeriveCmd::Ks) => ("derive", "ks"),
        Command::Derive(DeriveCmd::Show { .. }) => ("derive", "show"),
        Command::Replay { section } => return format!("replay {}", section.name()),
    };
    format!("{a} {b}")
}

fn run(c: &Command, config: &Config) -> Run {
    match c {
        Command::Pi(PiCmd::Digits { n }) => pi_digits(*n, config),
        Command::Pi(PiCmd::Find { pattern, limit }) => pi_find(pattern, *limit, config),
        Command::Fleeing(FleeingCmd::Search { property, horizon }) => {
            fleeing_search(property, horizon.unwrap_or(config.horizon as u64), config)
        }
        Command::Fleeing(FleeingCmd::Prefix { construction, property, family, terms }) => {
            fleeing_prefix(*construction, property, family, *terms, config)
        }
        Command::Real(RealCmd::Cmp { lhs, rhs, trace, horizon }) => {
            real_cmp(lhs, rhs, &read_trace(trace)?, horizon.unwrap_or(config.horizon), config)
        }
        Command::Real(RealCmd::Modulus { map, at, m0, samples, trace, horizon }) => {
            real_modulus(map, at, *m0, *samples, &read_trace(trace)?, horizon.unwrap_or(config.horizon), config)
        }
        Command::Real(RealCmd::Order { points, coincide, trace, horizon }) => {
            real_order(points, coincide, &read_trace(trace)?, horizon.unwrap_or(config.horizon), config)
        }
        Command::Drift(DriftCmd::Run { drift, kind, trace, terms, max_stage }) => {
            let traces = match (&trace.trace, &trace.event) {
                (None, None) => EventTrace::all_up_to(*max_stage),
                _ => vec![read_trace(trace)?],
            };
            drift_run(drift, kind, &traces, *terms, config)
        }
        Command::Logic(LogicCmd::Eval { model, at, formula }) => logic_eval(model, at, formula),
        Command::Logic(LogicCmd::Sweep { schema, nodes, atoms, max_box }) => {
            let schema = Schema::from_str(schema).map_err(|e| Failure::Usage(e.to_string()))?;
            let report = logic::validity_sweep(schema, bounds(config, *nodes, *atoms, *max_box))?;
            Ok(Report { text: report.to_string(), ok: report.as_expected(), json: report.to_json_value() })
        }
        Command::Logic(LogicCmd::Suite { nodes, atoms, max_box }) => {
            let report = logic::principle_suite(bounds(config, *nodes, *atoms, *max_box))?;
            Ok(Report { text: report.to_string(), ok: report.all_as_expected(), json: report.to_json_value() })
        }
        Command::Derive(DeriveCmd::Check { file, bundled, semantic }) => {
            derive_check(file.as_deref(), bundled.as_deref(), *semantic)
        }
        Command::Derive(DeriveCmd::List) => derive_list(),
        Command::Derive(DeriveCmd::Ks) => {
            let report = derivation::ks_prerequisite_report()?;
            let ok = report.blocked().iter().map(|s| s.principle).eq(["CS4", "CS5"]);
            Ok(Report { text: report.to_string(), ok, json: report.to_json_value() })
        }
        Command::Derive(DeriveCmd::Show { name }) => {
            let b = derivation::bundled(name).ok_or_else(|| unknown_script(name))?;
            Ok(Report { text: b.text.to_string(), ok: true, json: json!({ "name": b.name, "text": b.text }) })
        }
        Command::Replay { section } => replay(*section, config),
    }
}

fn bounds(config: &Config, nodes: Option<usize>, atoms: Option<usize>, max_box: Option<u32>) -> SweepBounds {
    let default = SweepBounds::default();
    SweepBounds {
        max_nodes: nodes.unwrap_or(config.nodes),
        max_atoms: atoms.unwrap_or(config.atoms),
        max_box_index: max_box.unwrap_or(default.max_box_index),
        ..default
    }
}

fn unknown_script(name: &str) -> Failure {
    let names: Vec<&str> = derivation::bundled_scripts()
        .iter()
        .map(|b| b.name)
        .chain([derivation::conditional_ks_literal().name])
        .collect();
    Failure::Usage(format!("unknown bundled script `{name}` (expected one of {})", names.join(", ")))
}

fn read_trace(args: &TraceArgs) -> Result<EventTrace, Failure> {
    let text = match (&args.trace, &args.event) {
        (Some(path), _) => {
            std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
        }
        (None, Some(t)) => t.clone(),
        (None, None) => "never".to_string(),
    };
    text.parse().map_err(|e: crate::spreads::SpreadError| Failure::Usage(e.to_string()))
}

fn check_digits(requested: usize, config: &Config) -> Result<(), Failure> {
    if requested > config.digits {
        return Err(FleeingError::ResourceBound { requested, limit: config.digits }.into());
    }
    Ok(())
}

fn pi_digits(n: usize, config: &Config) -> Run {
    check_digits(n, config)?;
    let digits = DigitOracle::global().digits(n)?;
    Ok(Report { text: format!("3.{digits}"), ok: true, json: json!({ "count": n, "digits": digits }) })
}

fn pi_find(pattern: &str, limit: u64, config: &Config) -> Run {
    let p = fleeing::pattern_property(pattern)?;
    check_digits(limit as usize + pattern.len().saturating_sub(1), config)?;
    let search = fleeing::critical_number(&p, limit)?;
    Ok(Report { text: search.to_string(), ok: true, json: json!({ "pattern": pattern, "search": search }) })
}

/// `never`, `threshold:K`, `pattern:DIGITS` or `run:<digit>x<length>`.
pub fn property_spec(spec: &str) -> Result<DecidableProperty, String> {
    let (head, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let bad = || format!("bad property `{spec}` (never, threshold:K, pattern:DIGITS or run:<digit>x<length>)");
    match head {
        "never" if arg.is_empty() => Ok(DecidableProperty::never()),
        "threshold" => arg.parse().ok().filter(|&k| k > 0).map(DecidableProperty::from_threshold).ok_or_else(bad),
        "pattern" => fleeing::pattern_property(arg).map_err(|e| e.to_string()),
        "run" => {
            let (d, len) = arg.split_once('x').ok_or_else(bad)?;
            let d: u8 = d.parse().ok().filter(|&d| d < 10).ok_or_else(bad)?;
            let len: usize = len.parse().ok().filter(|&l| l > 0).ok_or_else(bad)?;
            fleeing::run_property(d, len).map_err(|e| e.to_string())
        }
        _ => Err(bad()),
    }
}

fn family_spec(name: &str) -> Result<ConvergentFamily, Failure> {
    match name {
        "halving" => Ok(fleeing::halving_family()),
        "constant" => Ok(fleeing::constant_family()),
        "vienna" => Ok(drift::vienna_family()),
        _ => Err(Failure::Usage(format!("unknown family `{name}` (expected halving, constant or vienna)"))),
    }
}

fn fleeing_search(property: &str, horizon: u64, config: &Config) -> Run {
    let p = property_spec(property).map_err(Failure::Usage)?;
    if property.starts_with("pattern:") || property.starts_with("run:") {
        check_digits(horizon as usize + property.len(), config)?;
    }
    let search = fleeing::critical_number(&p, horizon)?;
    Ok(Report { text: format!("{}: {search}", search.property), ok: true, json: json!(search) })
}

fn construction_point(c: Construction, family: &ConvergentFamily, p: &DecidableProperty) -> Point {
    match c {
        Construction::BerlinR => fleeing::berlin_r(p),
        Construction::VeldmanF2 => fleeing::veldman_f2(family, p),
        Construction::CambridgeC => fleeing::cambridge_c(family, p),
    }
}

fn fleeing_prefix(c: Construction, property: &str, family: &str, terms: usize, config: &Config) -> Run {
    if terms == 0 {
        return Err(Failure::Usage("--terms must be positive".into()));
    }
    let p = property_spec(property).map_err(Failure::Usage)?;
    if property.starts_with("pattern:") || property.starts_with("run:") {
        check_digits(terms + property.len(), config)?;
    }
    let point = construction_point(c, &family_spec(family)?, &p);
    let prefix = point.prefix(terms)?;
    let intervals = (1..=terms).map(|n| point.interval(n)).collect::<Result<Vec<_>, _>>()?;
    let mut text = format!("{}\n", point.name());
    for (n, (a, i)) in prefix.iter().zip(&intervals).enumerate() {
        let _ = writeln!(text, "  {:>3}  {a:>12}  {i}", n + 1);
    }
    let json = json!({
        "point": point.name(),
        "terms": prefix.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
        "intervals": intervals,
    });
    Ok(Report { json, text, ok: true })
}

/// Points named on the command line; trace-driven ones follow `trace`.
///
/// `zero`, `one`, `half`, `minus-one`, `dyadic:m/2^k`, `berlin-s`,
/// `vienna-e`, `berlin-r[:PROP]`, `veldman-f2[:PROP]`, `cambridge-c[:PROP]`
/// and `checking:<drift>:<kind>`.
pub fn point_spec(spec: &str, trace: &EventTrace) -> Result<Point, String> {
    let (head, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let property = || property_spec(if arg.is_empty() { "pattern:0123456789" } else { arg });
    let point = match head {
        "zero" => reals::zero(),
        "one" => reals::one(),
        "half" => reals::dyadic_point(Dyadic::new(1, 1)).renamed("half"),
        "minus-one" => reals::dyadic_point(Dyadic::from_int(-1)).renamed("minus-one"),
        "dyadic" => {
            let d: Dyadic = arg.parse().map_err(|_| format!("bad dyadic `{arg}` (expected m/2^k)"))?;
            reals::dyadic_point(d)
        }
        "berlin-s" => drift::berlin_s(trace),
        "vienna-e" => drift::vienna_e(&drift::vienna_family(), trace).map_err(|e| e.to_string())?,
        "berlin-r" => fleeing::berlin_r(&property()?),
        "veldman-f2" => fleeing::veldman_f2(&fleeing::halving_family(), &property()?),
        "cambridge-c" => fleeing::cambridge_c(&fleeing::halving_family(), &property()?),
        "checking" => {
            let (name, kind) = arg.split_once(':').ok_or_else(|| format!("bad point `{spec}` (checking:<drift>:<kind>)"))?;
            let d = drift::bundled_drift(name).map_err(|e| e.to_string())?;
            let kind: CheckingKind = kind.parse()?;
            drift::checking_point(&d, kind, trace).map_err(|e| e.to_string())?
        }
        _ => return Err(format!("unknown point `{spec}`")),
    };
    Ok(point)
}

fn real_cmp(lhs: &str, rhs: &str, trace: &EventTrace, horizon: usize, _config: &Config) -> Run {
    check_horizon(horizon)?;
    let a = point_spec(lhs, trace).map_err(Failure::Usage)?;
    let b = point_spec(rhs, trace).map_err(Failure::Usage)?;
    let verdicts: [(&str, Verdict); 4] = [
        ("lhs_lt_rhs", reals::lt_at(&a, &b, horizon)?),
        ("rhs_lt_lhs", reals::lt_at(&b, &a, horizon)?),
        ("apart", reals::apart_at(&a, &b, horizon)?),
        ("coincidence_refuted", reals::coincide_refute(&a, &b, horizon)?),
    ];
    let mut text = format!("{} vs {} under trace {trace}, horizon {horizon}\n", a.name(), b.name());
    for (k, v) in &verdicts {
        let _ = writeln!(text, "  {k:<20} {v}");
    }
    let json = json!({
        "lhs": a.name(),
        "rhs": b.name(),
        "trace": trace.to_string(),
        "horizon": horizon,
        "verdicts": verdicts.iter().map(|(k, v)| (k.to_string(), json!(v))).collect::<serde_json::Map<_, _>>(),
    });
    Ok(Report { json, text, ok: true })
}

fn check_horizon(h: usize) -> Result<(), Failure> {
    if h == 0 {
        return Err(Failure::Usage("horizon must be positive".into()));
    }
    Ok(())
}

fn real_modulus(map: &str, at: &str, m0: usize, samples: usize, trace: &EventTrace, horizon: usize, config: &Config) -> Run {
    check_horizon(horizon)?;
    if m0 == 0 {
        return Err(Failure::Usage("--m0 must be positive".into()));
    }
    let maps = reals::bundled_maps();
    let f = maps.iter().find(|f| f.name() == map).ok_or_else(|| {
        let names: Vec<&str> = maps.iter().map(|f| f.name()).collect();
        Failure::Usage(format!("unknown map `{map}` (expected one of {})", names.join(", ")))
    })?;
    let a = point_spec(at, trace).map_err(Failure::Usage)?;
    let modulus = reals::continuity_modulus(f.as_ref(), &a, m0, horizon)?;
    let soundness = reals::continuity_soundness(f.as_ref(), &a, m0, samples, config.seed)?;
    let text = format!(
        "{map} at {}: m0 = {m0}, n0 = {}, q = {}\nsoundness: {}/{} samples inside q, {} outside 2^-{m0} (seed {}): {}",
        a.name(),
        modulus.n0,
        modulus.q,
        soundness.premise_checked,
        soundness.samples,
        soundness.failures.len(),
        config.seed,
        if soundness.passed() { "pass" } else { "FAIL" },
    );
    let ok = soundness.passed();
    Ok(Report { json: json!({ "point": a.name(), "modulus": modulus, "soundness": soundness }), text, ok })
}

fn real_order(points: &[String], coincide: &[String], trace: &EventTrace, horizon: usize, _config: &Config) -> Run {
    check_horizon(horizon)?;
    if points.len() < 2 {
        return Err(Failure::Usage("--points needs at least two points".into()));
    }
    let pts = points.iter().map(|s| point_spec(s, trace)).collect::<Result<Vec<_>, _>>().map_err(Failure::Usage)?;
    let pairs = coincide
        .iter()
        .map(|s| {
            let parsed = s.split_once(':').and_then(|(i, j)| Some((i.parse::<usize>().ok()?, j.parse::<usize>().ok()?)));
            match parsed {
                Some((i, j)) if i < pts.len() && j < pts.len() && i != j => Ok((i, j)),
                _ => Err(Failure::Usage(format!("bad pair `{s}` (expected i:j, 0-based indices into --points)"))),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let table = OrderTable::from_points(&pts, &pairs, horizon)?;
    let report = reals::virtual_order_check(&table);
    let mut text = format!("{} points at horizon {horizon}\n", table.len());
    for (i, name) in table.names().iter().enumerate() {
        let _ = writeln!(text, "  {i}: {name}");
    }
    for (c, passed) in report.passed.iter().enumerate() {
        let _ = writeln!(text, "  condition {}: {}", c + 1, if *passed { "holds" } else { "VIOLATED" });
    }
    for v in &report.violations {
        let _ = writeln!(text, "  violation of {}: {}", v.condition, v.witness.join(", "));
    }
    let json = json!({ "table": table, "check": report });
    Ok(Report { json, text, ok: report.all_passed() })
}

fn drift_run(name: &str, kind: &str, traces: &[EventTrace], terms: usize, _config: &Config) -> Run {
    let d = drift::bundled_drift(name)?;
    let kind: CheckingKind = kind.parse().map_err(Failure::Usage)?;
    let mut runs = Vec::new();
    let mut text = format!("{kind} checking numbers of {name}\n");
    for t in traces {
        let run = drift::checking_sequence(&d, kind, t, terms)?;
        let class = drift::rationality_descriptor(&d, kind, t)?;
        let shown: Vec<String> = run.terms.iter().map(|t| t.to_string()).collect();
        let _ = writeln!(text, "  {:<10} {}  -> {}  {}", t.to_string(), shown.join(" "), run.limit, describe_class(class));
        runs.push(json!({ "run": run, "rationality": class }));
    }
    Ok(Report { json: json!({ "drift": name, "kind": kind.to_string(), "runs": runs }), text, ok: true })
}

fn describe_class(c: RationalityDescriptor) -> String {
    match c {
        RationalityDescriptor::Rational => "rational".into(),
        RationalityDescriptor::Irrational => "irrational".into(),
        RationalityDescriptor::KernelClass(k) => format!("kernel ({})", format!("{k:?}").to_lowercase()),
    }
}

fn logic_eval(model: &Path, at: &str, formula: &str) -> Run {
    let text = std::fs::read_to_string(model).map_err(|e| Failure::Usage(format!("{}: {e}", model.display())))?;
    let tree = StageTree::from_json(&text).map_err(|e| Failure::Usage(e.to_string()))?;
    let w = tree.index_of(at).map_err(|e| Failure::Usage(e.to_string()))?;
    let f = logic::parse(formula).map_err(|e| Failure::Usage(e.to_string()))?;
    let set = tree.forcing_set(&f);
    let forced = set >> w & 1 == 1;
    let nodes: Vec<&str> = (0..tree.len()).filter(|&v| set >> v & 1 == 1).map(|v| tree.id(v)).collect();
    let text = format!(
        "{} {} {f}\nforced at: {{{}}}",
        at,
        if forced { "forces" } else { "does not force" },
        nodes.join(", ")
    );
    Ok(Report { json: json!({ "node": at, "formula": f.to_string(), "forced": forced, "forced_at": nodes }), text, ok: true })
}

fn derive_check(file: Option<&Path>, bundled: Option<&str>, semantic: Option<usize>) -> Run {
    let script = match (file, bundled) {
        (_, Some(name)) => derivation::bundled(name).ok_or_else(|| unknown_script(name))?.script(),
        (Some(path), None) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            let name = path.file_stem().map_or("script".into(), |s| s.to_string_lossy().into_owned());
            Script::parse(&name, &text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
        }
        (None, None) => return Err(Failure::Usage("give a script file or --bundled NAME".into())),
    };
    let outcome = derivation::check(&script);
    let mut json = outcome.to_json_value(&script);
    let mut text = format!("{}: {outcome}", script.name);
    let mut ok = outcome.is_verified();
    if let (Some(nodes), Some(v)) = (semantic, outcome.verification()) {
        if nodes == 0 || nodes > 7 {
            return Err(Failure::Refusal(format!("--semantic takes 1 to 7 nodes, got {nodes}")));
        }
        let s = derivation::semantic_check(&script, v, nodes);
        ok &= s.passed();
        let _ = write!(text, "\n{}", describe_semantic(&s));
        json["semantic"] = semantic_json(&s);
    }
    Ok(Report { json, text, ok })
}

fn semantic_json(s: &derivation::SemanticCheck) -> Value {
    json!({
        "max_nodes": s.max_nodes,
        "atoms": s.atoms,
        "models": s.models,
        "premise_models": s.premise_models,
        "passed": s.passed(),
        "failure": s.failure.as_ref().map(|m| m.to_json_value()),
    })
}

fn describe_semantic(s: &derivation::SemanticCheck) -> String {
    match &s.failure {
        None => format!(
            "semantic check up to {} nodes: conclusion forced in all {} models of the hypotheses ({} models in all)",
            s.max_nodes, s.premise_models, s.models
        ),
        Some(m) => format!("semantic check up to {} nodes FAILED on [{m}]", s.max_nodes),
    }
}

fn derive_list() -> Run {
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut ok = true;
    for b in derivation::bundled_scripts().into_iter().chain([derivation::conditional_ks_literal()]) {
        let script = b.script();
        let outcome = derivation::check(&script);
        let as_expected = outcome.is_verified() == b.expect_verified;
        ok &= as_expected;
        let status = match &outcome {
            CheckOutcome::Verified(_) => "verified".to_string(),
            CheckOutcome::Rejected { step, .. } => format!("rejected at step {step}"),
        };
        let _ = writeln!(text, "{:<24} {:>3} steps  {status}{}", b.name, script.steps.len(), if as_expected { "" } else { "  UNEXPECTED" });
        rows.push(json!({ "name": b.name, "expect_verified": b.expect_verified, "outcome": outcome.to_json_value(&script) }));
    }
    Ok(Report { json: json!({ "scripts": rows }), text, ok })
}

/// One trace case of a replay: what was observed and whether it matches.
struct Row {
    trace: EventTrace,
    summary: String,
    json: Value,
    ok: bool,
}

struct ScriptRun {
    json: Value,
    text: String,
    ok: bool,
}

fn script_run(b: derivation::Bundled, forbid: &[&str]) -> ScriptRun {
    let script = b.script();
    let outcome = derivation::check(&script);
    let mut json = outcome.to_json_value(&script);
    let mut ok = outcome.is_verified() == b.expect_verified;
    let mut text = format!("script {}: {}", b.name, outcome.to_string().lines().next().unwrap_or(""));
    if let Some(v) = outcome.verification() {
        for rule in forbid {
            let used = v.uses_rule(rule);
            ok &= !used;
            let _ = write!(text, "\n  {rule} used: {}", if used { "yes (UNEXPECTED)" } else { "no" });
        }
        let s = derivation::semantic_check(&script, v, REPLAY_SEMANTIC_NODES);
        ok &= s.passed();
        let _ = write!(text, "\n  {}", describe_semantic(&s));
        json["semantic"] = semantic_json(&s);
    }
    json["as_expected"] = json!(ok);
    if !ok {
        text.push_str("\n  UNEXPECTED");
    }
    ScriptRun { json, text, ok }
}

fn verdict_word(v: &Verdict) -> String {
    match v.witness {
        Some(n) if v.holds() => format!("holds@{n}"),
        Some(n) => format!("fails@{n}"),
        None => "unknown".into(),
    }
}

fn replay(section: Section, config: &Config) -> Run {
    let h = config.horizon;
    check_horizon(h)?;
    let traces = EventTrace::all_up_to(REPLAY_STAGES);
    let mut rows = Vec::new();
    let mut scripts = Vec::new();
    let mut extra = Value::Null;
    let mut extra_text = String::new();
    let mut extra_ok = true;
    let title;
    match section {
        Section::Vienna9 => {
            title = "e copies a_v = 1/2 - 2^-(v+4) until alpha is decided; e < 1/2 exactly when it is";
            let fam = drift::vienna_family();
            let half = reals::dyadic_point(Dyadic::new(1, 1));
            for t in &traces {
                let run = drift::vienna_sequence(&fam, t, 8)?;
                let e = drift::vienna_e(&fam, t)?;
                let below = reals::lt_at(&e, &half, h)?;
                let refuted = reals::coincide_refute(&e, &half, h)?;
                let resolved = t.resolution.stage().is_some();
                let ok = if resolved { below.holds() } else { below.is_unknown() && refuted.is_unknown() };
                let indices: Vec<String> = run.terms.iter().map(|v| v.to_string()).collect();
                rows.push(Row {
                    trace: t.clone(),
                    summary: format!(
                        "a-indices {}  limit {}  e<1/2 {}  e=1/2 refuted {}",
                        indices.join(","),
                        run.limit_value,
                        verdict_word(&below),
                        verdict_word(&refuted)
                    ),
                    json: json!({ "run": run, "e_below_half": below, "e_equals_half_refuted": refuted }),
                    ok,
                });
            }
            scripts.push(script_run(derivation::bundled("vienna_dense").expect("bundled"), &[]));
        }
        Section::Drift11 => {
            title = "direct checking number of rational-right: a rational c_v once alpha is decided, the kernel before";
            let d = drift::bundled_drift("rational-right")?;
            let kernel = Point::centered("kernel", d.kernel().clone());
            for t in &traces {
                rows.push(checking_row(&d, CheckingKind::Direct, t, &kernel, h, |t| t.resolution.stage().is_some())?);
            }
            scripts.push(script_run(derivation::bundled("drift_direct").expect("bundled"), &[]));
        }
        Section::Ks12 => {
            title = "conditional checking number of rational-right: leaves the kernel only on proof";
            let d = drift::bundled_drift("rational-right")?;
            let kernel = Point::centered("kernel", d.kernel().clone());
            for t in &traces {
                let proved = |t: &EventTrace| matches!(t.resolution, crate::spreads::Resolution::Proved(_));
                rows.push(checking_row(&d, CheckingKind::Conditional, t, &kernel, h, proved)?);
            }
            scripts.push(script_run(derivation::bundled("conditional_ks").expect("bundled"), &["CS5R", "CS5", "CS4"]));
            scripts.push(script_run(derivation::conditional_ks_literal(), &[]));
            let ks = derivation::ks_prerequisite_report()?;
            extra_ok = ks.blocked().iter().map(|s| s.principle).eq(["CS4", "CS5"]);
            extra_text = ks.to_string();
            extra = ks.to_json_value();
        }
        Section::Cambridge13 => {
            title = "c copies a_v = 2^-v until the critical number k turns up, then stays at a_k; \
                     trace true:k stands for a property with critical number k, other traces for one without";
            let fam = fleeing::halving_family();
            let zero = reals::zero();
            for t in &traces {
                let p = match t.resolution {
                    crate::spreads::Resolution::Proved(k) => DecidableProperty::from_threshold(k as u64),
                    _ => DecidableProperty::never(),
                };
                let c = fleeing::cambridge_c(&fam, &p);
                let search = fleeing::critical_number(&p, h as u64)?;
                let above = reals::lt_at(&zero, &c, h)?;
                let below = reals::lt_at(&c, &zero, h)?;
                let found = matches!(search.result, fleeing::SearchResult::FoundAt(_));
                let ok = !below.holds() && if found { above.holds() } else { above.is_unknown() };
                rows.push(Row {
                    trace: t.clone(),
                    summary: format!(
                        "property {}  critical {search}  0<c {}  c<0 {}",
                        p.name(),
                        verdict_word(&above),
                        verdict_word(&below)
                    ),
                    json: json!({ "property": p.name(), "critical": search, "zero_below_c": above, "c_below_zero": below }),
                    ok,
                });
            }
            scripts.push(script_run(derivation::bundled("cambridge_reduced").expect("bundled"), &[]));
        }
    }
    let ok = rows.iter().all(|r| r.ok) && scripts.iter().all(|s| s.ok) && extra_ok;
    let mut text = format!("replay {} (horizon {h})\n{title}\n", section.name());
    for r in &rows {
        let _ = writeln!(text, "  {:<10} {}  {}", r.trace.to_string(), r.summary, if r.ok { "ok" } else { "MISMATCH" });
    }
    for s in &scripts {
        let _ = writeln!(text, "{}", s.text);
    }
    if !extra_text.is_empty() {
        let _ = writeln!(text, "{extra_text}");
    }
    let _ = write!(text, "{}", if ok { "replay ok" } else { "replay FAILED" });
    let json = json!({
        "section": section.name(),
        "horizon": h,
        "cases": rows.iter().map(|r| json!({ "trace": r.trace.to_string(), "ok": r.ok, "observed": r.json })).collect::<Vec<_>>(),
        "scripts": scripts.iter().map(|s| s.json.clone()).collect::<Vec<_>>(),
        "ks_report": extra,
    });
    Ok(Report { json, text, ok })
}

/// One checking-number case: the point leaves the kernel (and lies above
/// it) exactly when `leaves` says so.
fn checking_row(
    d: &drift::Drift,
    kind: CheckingKind,
    t: &EventTrace,
    kernel: &Point,
    h: usize,
    leaves: impl Fn(&EventTrace) -> bool,
) -> Result<Row, Failure> {
    let run = drift::checking_sequence(d, kind, t, 8)?;
    let class = drift::rationality_descriptor(d, kind, t)?;
    let point = drift::checking_point(d, kind, t)?;
    let above = reals::lt_at(kernel, &point, h)?;
    let apart = reals::apart_at(kernel, &point, h)?;
    let ok = if leaves(t) {
        above.holds() && class == RationalityDescriptor::Rational
    } else {
        apart.is_unknown() && matches!(class, RationalityDescriptor::KernelClass(_))
    };
    let shown: Vec<String> = run.terms.iter().map(|t| t.to_string()).collect();
    Ok(Row {
        trace: t.clone(),
        summary: format!(
            "{} -> {}  {}  kernel<d {}  apart {}",
            shown.join(" "),
            run.limit,
            describe_class(class),
            verdict_word(&above),
            verdict_word(&apart)
        ),
        json: json!({ "run": run, "rationality": class, "kernel_below_d": above, "apart_from_kernel": apart }),
        ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> Outcome {
        dispatch(std::iter::once("brouwer").chain(args.iter().copied()))
    }

    #[test]
    fn config_parses_and_validates() {
        let c = Config::parse("# defaults\nhorizon = 30\nnodes=4\nseed = \"11\"\noutput = json\n").unwrap();
        assert_eq!((c.horizon, c.nodes, c.seed, c.output), (30, 4, 11, OutputMode::Json));
        assert!(Config::parse("horizon = 0").unwrap_err().contains("positive"));
        assert!(Config::parse("colour = red").unwrap_err().contains("unknown key"));
        assert!(Config::parse("horizon").unwrap_err().contains("key = value"));
    }

    #[test]
    fn usage_errors_exit_2_and_help_exits_0() {
        assert_eq!(run(&["frobnicate"]).code, 2);
        assert_eq!(run(&["logic", "sweep", "--schema", "cs9"]).code, 2);
        assert_eq!(run(&["real", "cmp", "--lhs", "nowhere", "--rhs", "zero"]).code, 2);
        let help = run(&["--help"]);
        assert_eq!(help.code, 0);
        assert!(help.stdout.contains("replay"));
    }

    #[test]
    fn property_specs() {
        assert_eq!(property_spec("threshold:4").unwrap().least_witness(10).unwrap(), Some(4));
        assert_eq!(property_spec("never").unwrap().least_witness(10).unwrap(), None);
        for bad in ["threshold:0", "run:9", "run:12x3", "pattern:", "sometimes"] {
            assert!(property_spec(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn sweep_exit_codes_follow_expectation() {
        let cs5 = run(&["logic", "sweep", "--schema", "cs5", "--nodes", "2", "--atoms", "1", "--json"]);
        assert_eq!(cs5.code, 0, "{}", cs5.stderr);
        let v: Value = serde_json::from_str(&cs5.stdout).unwrap();
        assert_eq!(v["seed"], json!(DEFAULT_SEED));
        assert_eq!(v["result"]["result"]["kind"], json!("countermodel"), "{}", cs5.stdout);
        // one node is too small to refute CS5
        assert_eq!(run(&["logic", "sweep", "--schema", "cs5", "--nodes", "1", "--atoms", "1"]).code, 1);
    }

    #[test]
    fn digit_requests_beyond_the_limit_are_refused() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("b.toml");
        std::fs::write(&cfg, "digits = 50\n").unwrap();
        let cfg = cfg.to_str().unwrap();
        assert_eq!(run(&["pi", "digits", "40", "--config", cfg]).code, 0);
        assert_eq!(run(&["pi", "digits", "51", "--config", cfg]).code, 64);
    }

    #[test]
    fn derive_check_rejects_with_exit_1() {
        assert_eq!(run(&["derive", "check", "--bundled", "conditional_ks"]).code, 0);
        let literal = run(&["derive", "check", "--bundled", "conditional_ks_literal"]);
        assert_eq!(literal.code, 1);
        assert!(literal.stdout.contains("testability gate"), "{}", literal.stdout);
    }
}
