//! Command-line front end.
//!
//! Exit status: 0 when every requested check passes, 2 when any fails, 1 on a
//! configuration or input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::constants::{estimate, ConstantName};
use crate::error::{LabError, Result};
use crate::family::SearchFamily;
use crate::greedy::enumerate_greedy_sets;
use crate::lambda::Lambda;
use crate::report::CheckReport;
use crate::search::{with_workers, workers_from_env};
use crate::sigma::{sigma, SigmaKind};
use crate::space::{
    builtin_corpus, parse_coefficient, IndexSet, Norm, SpaceSpec, Vector, DEFAULT_AMBIENT_CAP,
};
use crate::theorems::{TheoremId, Verifier, VerifyConfig};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_FAIL: i32 = 2;

/// Column order of the verification summary.
pub const SUMMARY_COLUMNS: [&str; 4] = ["theorem_id", "status", "worst_ratio", "bound_used"];

#[derive(Debug, Parser)]
#[command(
    name = "greedy-lab",
    version,
    about = "Greedy sets, approximation functionals, constants and inequality checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Prints the norm of a vector.
    Norm {
        #[command(flatten)]
        space: SpaceArgs,
        /// `index:coefficient` pairs (`1:3,2:1`) or terms (`3e1 + 1e2`).
        #[arg(long, allow_hyphen_values = true)]
        vector: String,
    },
    /// Evaluates an approximation functional and its minimizing set.
    Sigma {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, allow_hyphen_values = true)]
        vector: String,
        /// Reference set, e.g. `2,5`; empty for the empty set.
        #[arg(long = "set", default_value = "")]
        lambda_set: String,
        #[arg(long)]
        m: usize,
        /// reverse, check, hat or pg_tail.
        #[arg(long)]
        kind: String,
    },
    /// Lists the greedy sets `G(x, m)` for `m = 1..=k`.
    GreedyTrace {
        #[arg(long, allow_hyphen_values = true)]
        vector: String,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_AMBIENT_CAP)]
        ambient: usize,
    },
    /// Estimates a constant over a finite family.
    Constants {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        constant: String,
        #[command(flatten)]
        lambda: LambdaArg,
        /// Ambient cap for both the space and the search family.
        #[arg(long)]
        ambient: Option<usize>,
        /// Coefficient magnitudes, comma separated.
        #[arg(long)]
        grid: Option<String>,
        /// Largest support size of family vectors.
        #[arg(long)]
        support_max: Option<usize>,
    },
    /// Runs theorem checks and writes reports.
    Verify {
        #[command(flatten)]
        space: SpaceArgs,
        /// A theorem id or `all`.
        #[arg(long, default_value = "all")]
        theorem: String,
        #[command(flatten)]
        lambda: LambdaArg,
        #[arg(long)]
        ambient: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Writes `reports.jsonl` and `summary.csv` here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        output: OutputFormat,
    },
    /// Emits the built-in space specifications.
    Corpus {
        #[arg(long, default_value_t = DEFAULT_AMBIENT_CAP)]
        ambient: usize,
        /// Writes one `<name>.json` per space here instead of printing.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct SpaceArgs {
    /// Path to a space specification in JSON.
    #[arg(long = "space")]
    pub path: PathBuf,
}

#[derive(Debug, Args)]
pub struct LambdaArg {
    /// Rational `p/q` (or an integer), at least 1.
    #[arg(long = "lambda")]
    pub value: Option<String>,
}

impl LambdaArg {
    fn parse(&self) -> Result<Option<Lambda>> {
        self.value.as_deref().map(str::parse).transpose()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

fn config<T>(msg: impl Into<String>) -> Result<T> {
    Err(LabError::Config(msg.into()))
}

/// Reads and validates a space file; JSON errors carry line and column.
pub fn load_space(path: &Path) -> Result<SpaceSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| LabError::Config(format!("cannot read space file {}: {e}", path.display())))?;
    let spec: SpaceSpec = serde_json::from_str(&text).map_err(|e| {
        LabError::Config(format!("malformed space JSON in {}: {e}", path.display()))
    })?;
    spec.validate()?;
    Ok(spec)
}

/// Comma-separated indices; empty (or `{}`) for the empty set.
pub fn parse_index_set(s: &str) -> Result<IndexSet> {
    let inner = s.trim().trim_start_matches('{').trim_end_matches('}');
    let mut items = Vec::new();
    for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        items.push(
            part.parse::<usize>()
                .map_err(|_| LabError::InvalidArgument(format!("bad index {part:?}")))?,
        );
    }
    IndexSet::new(items)
}

fn parse_grid(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(parse_coefficient)
        .collect()
}

fn check_ambient(ambient: Option<usize>) -> Result<()> {
    match ambient {
        Some(0) => config("ambient cap must be at least 1"),
        _ => Ok(()),
    }
}

fn json_line(out: &mut dyn Write, value: &impl Serialize) -> Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn summary_csv(reports: &[CheckReport]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SUMMARY_COLUMNS)?;
    for r in reports {
        let worst = if r.worst_ratio.is_finite() {
            r.worst_ratio.to_string()
        } else {
            "inf".to_string()
        };
        w.write_record([
            r.theorem_id.clone(),
            r.status.to_string(),
            worst,
            r.bound_used.to_string(),
        ])?;
    }
    w.into_inner().map_err(|e| LabError::Io(e.into_error()))
}

/// Runs the verification suite and returns the reports in id order.
pub fn verify_reports(
    space: &SpaceSpec,
    ids: &[TheoremId],
    config: VerifyConfig,
) -> Result<Vec<CheckReport>> {
    let verifier = Verifier::new(space, config);
    ids.iter().map(|&id| verifier.run(id)).collect()
}

#[derive(Serialize)]
struct GreedyTraceLine<'a> {
    m: usize,
    sets: &'a [IndexSet],
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Norm { space, vector } => {
            let spec = load_space(&space.path)?;
            let x = Vector::parse_literal(&vector)?;
            writeln!(out, "{}", spec.norm(&x))?;
        }
        Command::Sigma {
            space,
            vector,
            lambda_set,
            m,
            kind,
        } => {
            let spec = load_space(&space.path)?;
            let x = Vector::parse_literal(&vector)?;
            let set = parse_index_set(&lambda_set)?;
            let kind: SigmaKind = kind.parse()?;
            json_line(out, &sigma(kind, &x, &set, m, &spec))?;
        }
        Command::GreedyTrace { vector, k, ambient } => {
            check_ambient(Some(ambient))?;
            let x = Vector::parse_literal(&vector)?;
            for m in 1..=k {
                let family = enumerate_greedy_sets(&x, m, ambient)?;
                json_line(
                    out,
                    &GreedyTraceLine {
                        m,
                        sets: &family.sets,
                    },
                )?;
            }
        }
        Command::Constants {
            space,
            constant,
            lambda,
            ambient,
            grid,
            support_max,
        } => {
            check_ambient(ambient)?;
            let name: ConstantName = constant.parse()?;
            let lambda = lambda.parse()?;
            let mut spec = load_space(&space.path)?;
            let mut family = SearchFamily::standard();
            match ambient {
                Some(n) => {
                    spec = spec.with_ambient_cap(n);
                    family = family.with_ambient_cap(n);
                }
                None => {
                    let cap = family.ambient_cap.min(spec.ambient_cap);
                    family = family.with_ambient_cap(cap);
                }
            }
            if let Some(g) = grid {
                family = family.with_grid(parse_grid(&g)?);
            }
            if let Some(k) = support_max {
                family = family.with_support_size_max(k);
            }
            family.validate()?;
            let est = with_workers(workers_from_env()?, || {
                estimate(name, &spec, lambda, &family)
            })??;
            json_line(out, &est)?;
        }
        Command::Verify {
            space,
            theorem,
            lambda,
            ambient,
            seed,
            out_dir,
            output,
        } => {
            check_ambient(ambient)?;
            let ids: Vec<TheoremId> = if theorem == "all" {
                TheoremId::ALL.to_vec()
            } else {
                vec![theorem.parse()?]
            };
            let lambda = lambda.parse()?;
            let mut spec = load_space(&space.path)?;
            if let Some(n) = ambient {
                spec = spec.with_ambient_cap(n);
            }
            let mut config = VerifyConfig::for_space(&spec);
            config.seed = seed;
            if let Some(l) = lambda {
                config.lambda = l;
            }
            let reports =
                with_workers(workers_from_env()?, || verify_reports(&spec, &ids, config))??;
            let mut jsonl = Vec::new();
            for r in &reports {
                json_line(&mut jsonl, r)?;
            }
            let csv = summary_csv(&reports)?;
            if let Some(dir) = out_dir {
                std::fs::create_dir_all(&dir)?;
                std::fs::write(dir.join("reports.jsonl"), &jsonl)?;
                std::fs::write(dir.join("summary.csv"), &csv)?;
            }
            out.write_all(match output {
                OutputFormat::Json => &jsonl,
                OutputFormat::Csv => &csv,
            })?;
            if reports.iter().any(|r| !r.status.is_pass()) {
                return Ok(EXIT_FAIL);
            }
        }
        Command::Corpus { ambient, out_dir } => {
            check_ambient(Some(ambient))?;
            for spec in builtin_corpus(ambient) {
                match &out_dir {
                    Some(dir) => {
                        std::fs::create_dir_all(dir)?;
                        let text = serde_json::to_string_pretty(&spec)? + "\n";
                        std::fs::write(dir.join(format!("{}.json", spec.name)), text)?;
                    }
                    None => json_line(out, &spec)?,
                }
            }
        }
    }
    Ok(EXIT_PASS)
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() {
                EXIT_CONFIG
            } else {
                EXIT_PASS
            };
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_CONFIG
        }
    }
}
