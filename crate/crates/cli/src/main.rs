//! `lexichoice`: batch front-end for exclusion classification, property
//! checks, composition evaluation, theorem batteries and witness synthesis.
//!
//! Exit status: 0 when every verdict matches its expectation, 1 when some
//! verdict does not (the report carries a replayable record), 2 on input,
//! parse or construction errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use lexichoice_core::{Property, WitnessCondition};
use rayon::prelude::*;

use lexichoice_cli::report::{Report, Sampling, REPORT_VERSION};
use lexichoice_cli::spec::{self, Diagnostic, Loaded, TaskDef, Theorem};
use lexichoice_cli::tasks;
use lexichoice_cli::theorems::Settings;

const DEFAULT_SAMPLES: usize = 500;

#[derive(Parser)]
#[command(name = "lexichoice", version, about = "Lexicographic compositions of choice functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args)]
struct Global {
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Enumerate every input pair instead of sampling.
    #[arg(long, global = true, conflicts_with = "samples")]
    exhaustive: bool,
    /// Pairs drawn per sampled check (default 500).
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Record wall-clock timings; reports are then no longer byte-stable.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a named exclusion is threshold-linear with cardinal reuse.
    Classify { spec: PathBuf, name: String },
    /// Check a property of a named choice function.
    Check {
        spec: PathBuf,
        name: String,
        #[arg(long, value_parser = parse_property)]
        prop: Property,
    },
    /// Evaluate a composition tree, on one input or tabulated.
    Compose {
        spec: PathBuf,
        #[arg(long)]
        tree: String,
        #[arg(long)]
        eval: Option<String>,
    },
    /// Run a theorem battery over the spec's exclusions.
    Verify {
        spec: PathBuf,
        #[arg(long, value_parser = |s: &str| s.parse::<Theorem>())]
        theorem: Theorem,
        /// Restrict to these exclusions (comma separated).
        #[arg(long, value_delimiter = ',')]
        names: Option<Vec<String>>,
    },
    /// Synthesize a counterexample for a named exclusion.
    Witness {
        spec: PathBuf,
        name: String,
        #[arg(long, value_parser = parse_condition)]
        condition: WitnessCondition,
    },
    /// Run the task list stored in the spec.
    Run { spec: PathBuf },
    /// Rebuild every record in a report and confirm the failure recurs.
    Replay { report: PathBuf },
}

fn parse_property(s: &str) -> Result<Property, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| format!("unknown property {s:?}; expected PI, SUB, CON, SM or MTO1"))
}

fn parse_condition(s: &str) -> Result<WitnessCondition, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|_| format!("unknown condition {s:?}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = std::env::var("LEXICHOICE_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // Only fails if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build_global();
    }
    match execute(cli) {
        Ok(code) => code,
        Err(d) => {
            eprintln!("{d}");
            ExitCode::from(2)
        }
    }
}

fn execute(cli: Cli) -> Result<ExitCode, Diagnostic> {
    let g = &cli.global;
    let settings = Settings {
        seed: g.seed,
        sampling: match (g.exhaustive, g.samples) {
            (true, _) => Sampling::Exhaustive,
            (false, k) => Sampling::Samples(k.unwrap_or(DEFAULT_SAMPLES)),
        },
    };
    let (spec_path, tasks) = match cli.command {
        Command::Replay { report } => return replay(&report),
        Command::Classify { spec, name } => (spec, vec![TaskDef::Classify { name, expect: None }]),
        Command::Check { spec, name, prop } => (spec, vec![TaskDef::Check { name, prop, expect: None }]),
        Command::Compose { spec, tree, eval } => {
            let loaded = spec::load(&spec)?;
            let eval = eval
                .map(|e| loaded.parse_set(&e))
                .transpose()
                .map_err(|m| Diagnostic::plain(&spec, format!("--eval: {m}")))?;
            return finish(&loaded, vec![TaskDef::Compose { tree, eval }], &settings, g);
        }
        Command::Verify { spec, theorem, names } => (spec, vec![TaskDef::Verify { theorem, names }]),
        Command::Witness { spec, name, condition } => (spec, vec![TaskDef::Witness { name, condition }]),
        Command::Run { spec } => {
            let loaded = spec::load(&spec)?;
            let tasks = loaded.spec.tasks.clone();
            return finish(&loaded, tasks, &settings, g);
        }
    };
    let loaded = spec::load(&spec_path)?;
    finish(&loaded, tasks, &settings, g)
}

fn finish(spec: &Loaded, tasks: Vec<TaskDef>, s: &Settings, g: &Global) -> Result<ExitCode, Diagnostic> {
    let start = Instant::now();
    let per_task: Vec<_> = tasks
        .par_iter()
        .map(|t| {
            let t0 = Instant::now();
            tasks::run(spec, t, s).map(|mut rs| {
                if g.timing {
                    let ms = t0.elapsed().as_millis() as u64;
                    rs.iter_mut().for_each(|r| r.timing_ms = Some(ms));
                }
                rs
            })
        })
        .collect();
    let mut results = Vec::new();
    for r in per_task {
        results.extend(r?);
    }
    let ok = results.iter().all(|r| r.ok);
    let report = Report {
        tool: "lexichoice".into(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        report_version: REPORT_VERSION,
        spec: spec.path.display().to_string(),
        seed: s.seed,
        sampling: s.sampling,
        ok,
        results,
        timing_ms: g.timing.then(|| start.elapsed().as_millis() as u64),
    };
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    match &g.out {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| Diagnostic::plain(path, format!("cannot write report: {e}")))?;
            for r in &report.results {
                let mark = if r.ok { "ok  " } else { "FAIL" };
                let target = r.target.as_deref().unwrap_or("-");
                println!("{mark} {} {target}: {}", r.task, r.summary);
            }
        }
        None => print!("{text}"),
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn replay(path: &Path) -> Result<ExitCode, Diagnostic> {
    let text = std::fs::read_to_string(path).map_err(|e| Diagnostic::plain(path, format!("cannot read report: {e}")))?;
    let report: Report = serde_json::from_str(&text).map_err(|e| Diagnostic {
        file: path.to_path_buf(),
        line: Some(e.line()),
        column: Some(e.column()),
        message: e.to_string(),
    })?;
    let mut all = true;
    let mut count = 0;
    for r in &report.results {
        for (i, rec) in r.records.iter().enumerate() {
            count += 1;
            let target = r.target.as_deref().unwrap_or("-");
            match rec.replay() {
                Ok(true) => println!("reproduced {} {target} #{i}", r.task),
                Ok(false) => {
                    all = false;
                    println!("NOT reproduced {} {target} #{i}", r.task);
                }
                Err(m) => return Err(Diagnostic::plain(path, format!("{} {target} #{i}: {m}", r.task))),
            }
        }
    }
    println!("{count} records, {}", if all { "all reproduced" } else { "some not reproduced" });
    Ok(if all { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
