//! Command-line interface.
//!
//! Exit codes: 0 success, 1 I/O or usage error, 2 unsolved, 3 malformed or
//! too-short input, 4 search budget exhausted, 5 batch below the requested
//! solve rate.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{self, Outcome};
use crate::catalog::{Catalog, Profile};
use crate::datasets::{self, InputFormat, NamedSeries};
use crate::edk::Series;
use crate::search::{solve_or_fit, Link, Mode, SearchConfig, SearchError, Status};

// stdout writes that fail (closed pipe) end the command instead of panicking
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        writeln!(std::io::stdout().lock(), $($t)*)?
    }};
}

macro_rules! put {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        write!(std::io::stdout().lock(), $($t)*)?
    }};
}

pub const EXIT_UNSOLVED: i32 = 2;
pub const EXIT_MALFORMED: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;
pub const EXIT_THRESHOLD: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "patseq", version, about = "Find the pattern behind a numeric series and continue it")]
pub struct Cli {
    #[command(flatten)]
    pub opts: Opts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Opts {
    /// S1Z, S2Z (first solution) or N1Z, N2Z (best of all at the first depth).
    #[arg(long, global = true, env = "PATSEQ_MODE", default_value = "S1Z")]
    pub mode: Mode,
    /// Maximum number of kitas after the root.
    #[arg(long, global = true, env = "PATSEQ_DEPTH", default_value_t = 3)]
    pub depth: usize,
    /// Profile name (iq, oeis-depth2, oeis-deep) or a catalog file.
    #[arg(long, global = true, env = "PATSEQ_CATALOG", default_value = "iq")]
    pub catalog: String,
    /// Elements to predict past the end of the series.
    #[arg(long, global = true, env = "PATSEQ_COUNT", default_value_t = 5)]
    pub count: usize,
    /// Worker threads for batch runs; 0 uses every core.
    #[arg(long, global = true, env = "PATSEQ_WORKERS", default_value_t = 0)]
    pub workers: usize,
    /// Kita applications per series; 0 for no limit.
    #[arg(long, global = true, env = "PATSEQ_BUDGET_STATES", default_value_t = 200_000)]
    pub budget_states: u64,
    /// Wall-clock milliseconds per series; 0 for no limit.
    #[arg(long, global = true, env = "PATSEQ_BUDGET_MS", default_value_t = 10_000)]
    pub budget_ms: u64,
    #[arg(long, global = true, env = "PATSEQ_FORMAT", value_enum, default_value = "human")]
    pub format: Format,
    /// Constancy tolerance for approximate values is e^EPSILON_EXP.
    #[arg(long, global = true, env = "PATSEQ_EPSILON_EXP", default_value_t = -18.0, allow_hyphen_values = true)]
    pub epsilon_exp: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    /// One JSON object per line.
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CorpusFormat {
    /// Decide from the file name and first line.
    Auto,
    Lines,
    Json,
    /// OEIS `stripped` format.
    Stripped,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve series given inline or in a file and show their continuation.
    Solve(InputArgs),
    /// Print only the predicted elements.
    Predict(InputArgs),
    /// Run a corpus (`iq`, `literature` or a file) and report statistics.
    Batch(BatchArgs),
    /// Show every level of the solution with its tables.
    Explain(InputArgs),
    /// List the kitas of the selected catalog.
    Catalog,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Series elements, comma or space separated; fractions as p/q.
    pub series: Vec<String>,
    /// Read series from a file, one per line (or JSON with --json).
    #[arg(long, conflicts_with = "series")]
    pub file: Option<PathBuf>,
    #[arg(long, requires = "file")]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    /// `iq`, `literature` or a path.
    pub corpus: String,
    #[arg(long, value_enum, default_value = "auto")]
    pub input_format: CorpusFormat,
    /// Write the aggregate report as JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Write one record per series (JSON lines).
    #[arg(long)]
    pub records: Option<PathBuf>,
    /// Include per-series timings in the records.
    #[arg(long)]
    pub timed: bool,
    /// Only the first N series of the corpus.
    #[arg(long)]
    pub limit: Option<usize>,
    /// Exit with code 5 when the solve rate (percent) is lower.
    #[arg(long)]
    pub min_solve_rate: Option<f64>,
    /// Most frequent patterns to list.
    #[arg(long, default_value_t = 10)]
    pub top: usize,
}

fn malformed(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(ExitError(EXIT_MALFORMED, msg.into()))
}

#[derive(Debug)]
struct ExitError(i32, String);

impl std::fmt::Display for ExitError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.1)
    }
}

impl std::error::Error for ExitError {}

impl Opts {
    pub fn catalog(&self) -> Result<Catalog> {
        if let Ok(p) = self.catalog.parse::<Profile>() {
            return Ok(Catalog::profile(p));
        }
        let path = Path::new(&self.catalog);
        let text = std::fs::read_to_string(path).with_context(|| format!("reading catalog {}", path.display()))?;
        Catalog::parse(&text).map_err(|e| malformed(format!("{}: {e}", path.display())))
    }

    pub fn search_config(&self) -> Result<SearchConfig> {
        if self.epsilon_exp >= 0.0 {
            return Err(malformed("--epsilon-exp must be negative"));
        }
        let mut cfg = SearchConfig::new(Arc::new(self.catalog()?), self.mode, self.depth);
        cfg.apply.constancy.epsilon_exponent = self.epsilon_exp;
        cfg.budget.max_states = (self.budget_states > 0).then_some(self.budget_states);
        cfg.budget.max_time = (self.budget_ms > 0).then(|| Duration::from_millis(self.budget_ms));
        Ok(cfg)
    }

    fn workers(&self) -> usize {
        if self.workers == 0 {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        } else {
            self.workers
        }
    }
}

fn read_inputs(args: &InputArgs) -> Result<Vec<NamedSeries>> {
    if let Some(path) = &args.file {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let format = if args.json { InputFormat::Json } else { InputFormat::Lines };
        return datasets::load_user(&text, format).map_err(|e| malformed(format!("{}: {e}", path.display())));
    }
    if args.series.is_empty() {
        return Err(malformed("no series given"));
    }
    let joined = args.series.join(" ");
    let values = datasets::parse_values(&joined).map_err(|e| malformed(e.to_string()))?;
    let series = Series::new(values).map_err(|e| malformed(e.to_string()))?;
    Ok(vec![NamedSeries {
        id: "s1".into(),
        series,
    }])
}

fn read_corpus(args: &BatchArgs) -> Result<Vec<NamedSeries>> {
    let mut series = match args.corpus.as_str() {
        "iq" => datasets::iq_corpus(),
        "literature" => datasets::literature_corpus(),
        path => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
            let format = match args.input_format {
                CorpusFormat::Auto if path.ends_with(".json") => CorpusFormat::Json,
                CorpusFormat::Auto if looks_stripped(&text) => CorpusFormat::Stripped,
                CorpusFormat::Auto => CorpusFormat::Lines,
                f => f,
            };
            match format {
                CorpusFormat::Stripped => {
                    let f = datasets::parse_stripped(&text);
                    for m in &f.malformed {
                        eprintln!("skipping line {}: {}", m.line, m.reason);
                    }
                    f.series
                }
                CorpusFormat::Json => datasets::load_user(&text, InputFormat::Json).map_err(|e| malformed(e.to_string()))?,
                _ => datasets::load_user(&text, InputFormat::Lines).map_err(|e| malformed(e.to_string()))?,
            }
        }
    };
    if let Some(n) = args.limit {
        series.truncate(n);
    }
    Ok(series)
}

fn looks_stripped(text: &str) -> bool {
    text.lines()
        .find(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .is_some_and(|l| l.starts_with('A') && l.contains(" ,"))
}

/// Exit code summarising a set of outcomes: the worst failure wins.
fn outcome_code(outcomes: &[Outcome]) -> i32 {
    let code = |o: &Outcome| match &o.result {
        Ok(_) => 0,
        Err(SearchError::TooShort(_)) => EXIT_MALFORMED,
        Err(SearchError::BudgetExhausted { .. }) => EXIT_BUDGET,
        Err(SearchError::Unsolved) => EXIT_UNSOLVED,
    };
    let codes: Vec<i32> = outcomes.iter().map(code).collect();
    [EXIT_MALFORMED, EXIT_BUDGET, EXIT_UNSOLVED]
        .into_iter()
        .find(|c| codes.contains(c))
        .unwrap_or(0)
}

fn join(values: &[crate::value::Value]) -> String {
    values.iter().map(|v| v.render()).collect::<Vec<_>>().join(", ")
}

fn solve_all(inputs: &[NamedSeries], cfg: &SearchConfig, count: usize) -> Vec<Outcome> {
    inputs.iter().map(|ns| bench::run_one_or_fit(ns, cfg, count)).collect()
}

fn human_solution(ns: &NamedSeries, o: &Outcome) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{}: {}", o.id, ns.series);
    match &o.result {
        Ok(sol) => {
            let fitted = if sol.n_e() == o.len { "  (fitted, no holdout)" } else { "" };
            let _ = writeln!(
                s,
                "  pattern   {}  (n_e {}, depth {}, {}){fitted}",
                sol.pattern(),
                sol.n_e(),
                sol.depth(),
                sol.classify()
            );
            let mark = if o.truncated { "  (pattern ends here)" } else { "" };
            let _ = writeln!(s, "  next      {}{mark}", join(&o.predicted));
        }
        Err(e) => {
            let _ = writeln!(s, "  {e}");
        }
    }
    s
}

fn cmd_solve(opts: &Opts, args: &InputArgs) -> Result<i32> {
    let cfg = opts.search_config()?;
    let inputs = read_inputs(args)?;
    let outcomes = solve_all(&inputs, &cfg, opts.count);
    for (ns, o) in inputs.iter().zip(&outcomes) {
        match opts.format {
            Format::Human => put!("{}", human_solution(ns, o)),
            Format::Json => out!("{}", o.record().to_json_line()),
        }
    }
    Ok(outcome_code(&outcomes))
}

fn cmd_predict(opts: &Opts, args: &InputArgs) -> Result<i32> {
    let cfg = opts.search_config()?;
    let outcomes = solve_all(&read_inputs(args)?, &cfg, opts.count);
    for o in &outcomes {
        match opts.format {
            Format::Human if o.result.is_ok() => {
                let mark = if o.truncated { " ..." } else { "" };
                out!("{}{mark}", join(&o.predicted));
            }
            Format::Human => out!("{}: {}", o.id, o.result.as_ref().unwrap_err()),
            Format::Json => {
                let r = o.record();
                let line = serde_json::json!({
                    "series_id": r.series_id,
                    "status": r.status,
                    "predicted": r.predicted,
                    "truncated": r.truncated,
                });
                out!("{line}");
            }
        }
    }
    Ok(outcome_code(&outcomes))
}

fn cmd_explain(opts: &Opts, args: &InputArgs) -> Result<i32> {
    let cfg = opts.search_config()?;
    let mut code = 0;
    for ns in read_inputs(args)? {
        let found = match solve_or_fit(&ns.series, &cfg) {
            Ok(f) => f,
            Err(e) => {
                out!("{}: {e}", ns.id);
                code = code.max(outcome_code(&[bench::run_one(&ns, &cfg, 0)]));
                continue;
            }
        };
        let sol = &found.solution;
        out!("{}: {}  (first {} elements, {} states)", ns.id, ns.series, sol.n_e(), found.states);
        for (li, level) in sol.levels.iter().enumerate() {
            out!("level {li}: {}", level.kita.label());
            for (i, e) in level.entries.iter().enumerate() {
                let from = match (&e.link, e.parent) {
                    (Link::Root, _) => "root".to_string(),
                    (Link::Carried, Some(p)) => format!("carried from {p}"),
                    (Link::Child(c), Some(p)) => format!("child {c} of {p}"),
                    (Link::Direct, Some(p)) => format!("rule over {p}"),
                    _ => String::new(),
                };
                let status = match &e.status {
                    Status::Open => "open".to_string(),
                    Status::Constant(k0) => format!("solved, constant from row {k0}"),
                    Status::Rule(r) => format!("solved by rule, {} skipped", r.skipped),
                };
                out!("  [{i}] {from}; {status}");
                if !matches!(e.link, Link::Carried) {
                    for line in e.edk.render().lines() {
                        out!("      {line}");
                    }
                }
            }
        }
        let held = ns.series.len() - sol.n_e();
        let ext = crate::predictor::extend(sol, held + opts.count);
        out!("pattern {}  ({})", sol.pattern(), sol.classify());
        out!("next    {}", join(ext.values.get(held..).unwrap_or(&[])));
    }
    Ok(code)
}

fn cmd_batch(opts: &Opts, args: &BatchArgs) -> Result<i32> {
    let cfg = opts.search_config()?;
    let series = read_corpus(args)?;
    let outcomes = bench::run_batch(&series, &cfg, opts.count, opts.workers());
    let report = bench::aggregate(&outcomes);
    if let Some(path) = &args.records {
        std::fs::write(path, bench::dump(&outcomes, args.timed)).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &args.report {
        let json = serde_json::to_string_pretty(&report)?;
        std::fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    match opts.format {
        Format::Human => {
            put!("{}", report.render(args.top));
            put!("{}", report.table(&format!("{} {}", args.corpus, opts.mode)));
        }
        Format::Json => put!("{}", bench::dump(&outcomes, args.timed)),
    }
    match args.min_solve_rate {
        Some(min) if report.solve_rate < min => {
            eprintln!("solve rate {:.1}% below {min}%", report.solve_rate);
            Ok(EXIT_THRESHOLD)
        }
        _ => Ok(0),
    }
}

fn cmd_catalog(opts: &Opts) -> Result<i32> {
    put!("{}", opts.catalog()?);
    Ok(0)
}

/// Runs the parsed command and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(&cli.opts, a),
        Command::Predict(a) => cmd_predict(&cli.opts, a),
        Command::Batch(a) => cmd_batch(&cli.opts, a),
        Command::Explain(a) => cmd_explain(&cli.opts, a),
        Command::Catalog => cmd_catalog(&cli.opts),
    };
    match result {
        Ok(code) => code,
        Err(e) if e.downcast_ref::<std::io::Error>().is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            e.downcast_ref::<ExitError>().map_or(1, |x| x.0)
        }
    }
}
