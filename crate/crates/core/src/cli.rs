//! Command-line surface: `report`, `analyze`, `extremal`, `ensemble`.
//!
//! Exit codes: 0 success, 1 usage error, 2 domain error (infeasible budget,
//! malformed or unnormalized input, failed verification).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{analyze_distribution, default_subsets, verify_ensemble};
use crate::bounds::{build_report, default_subset_sizes, SecurityParameters};
use crate::dist::{KeySubset, SubsetOutcome};
use crate::ensemble::DistanceEnsemble;
use crate::error::{Error, Result};
use crate::extremal::{construct_equality_distribution, ExtremalRecipe};
use crate::format;
use crate::report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    #[value(alias = "json-like")]
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "tracesec", version, about = "Operational guarantees implied by a trace-distance level")]
pub struct Cli {
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: OutputFormat,
    /// Significant digits for numeric output.
    #[arg(long, global = true, default_value_t = 6, value_parser = clap::value_parser!(u8).range(3..=17))]
    pub precision: u8,
    /// Seed for ensemble sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form guarantee report for (l, d, QBER).
    Report(ReportArgs),
    /// Analyze an explicit distribution file against the closed forms.
    Analyze(AnalyzeArgs),
    /// Emit a distribution meeting the subset guessing bound with equality.
    Extremal(ExtremalArgs),
    /// Verify Markov exceedance on an ensemble file or a sampled ensemble.
    Ensemble(EnsembleArgs),
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub key_length: u64,
    #[arg(long, allow_hyphen_values = true)]
    pub trace_distance: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub qber: Option<f64>,
    /// Comma-separated subset sizes (default 1,8,64,l).
    #[arg(long, value_delimiter = ',')]
    pub subset_sizes: Vec<u64>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub file: PathBuf,
    /// Subset positions such as `0-7` or `0,3,5`; repeatable (default prefixes 1,8,64 and the whole key).
    #[arg(long = "subset")]
    pub subsets: Vec<String>,
    /// Known segment as `POSITIONS=BITS`, e.g. `0,1=10`.
    #[arg(long)]
    pub known: Option<String>,
}

#[derive(Debug, Args)]
pub struct ExtremalArgs {
    #[arg(long)]
    pub key_length: u32,
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: f64,
    /// Target positions (default: whole key).
    #[arg(long)]
    pub target: Option<String>,
    /// Favored outcome as a bitstring over the target (default: all zeros).
    #[arg(long)]
    pub favored: Option<String>,
}

#[derive(Debug, Args)]
pub struct EnsembleArgs {
    /// Ensemble file; omit when sampling.
    pub file: Option<PathBuf>,
    /// Markov threshold (default: square root of the average distance).
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Sample this many entries instead of reading a file.
    #[arg(long, conflicts_with = "file", requires = "mean")]
    pub sample: Option<usize>,
    /// Average distance of the sampled ensemble.
    #[arg(long)]
    pub mean: Option<f64>,
    /// Also write the sampled ensemble to this path.
    #[arg(long)]
    pub write_ensemble: Option<PathBuf>,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter { .. }
        | Error::EmptySubset
        | Error::DuplicatePosition(_)
        | Error::PositionOutOfRange { .. }
        | Error::OutcomeOutOfRange { .. }
        | Error::OverlappingSubsets(_)
        | Error::InvalidAveragingLevels(_) => EXIT_USAGE,
        _ => EXIT_DOMAIN,
    }
}

/// Parses `POSITIONS=BITS`.
pub fn parse_known(s: &str) -> Result<SubsetOutcome> {
    let (positions, bits) =
        s.split_once('=').ok_or_else(|| Error::param("known", "expected POSITIONS=BITS, e.g. 0,1=10"))?;
    SubsetOutcome::from_bits(positions.parse()?, bits.trim())
}

struct Outcome {
    body: String,
    passed: bool,
}

fn cmd_report(cli: &Cli, a: &ReportArgs) -> Result<Outcome> {
    let params = SecurityParameters::new(a.key_length, a.trace_distance, a.qber)?;
    let sizes = if a.subset_sizes.is_empty() { default_subset_sizes(a.key_length) } else { a.subset_sizes.clone() };
    let r = build_report(params, &sizes)?;
    let prec = cli.precision as usize;
    let body = match cli.format {
        OutputFormat::Text => report::report_to_text(&r, prec),
        OutputFormat::Json => report::report_to_json(&r, prec),
    };
    Ok(Outcome { body, passed: true })
}

fn cmd_analyze(cli: &Cli, a: &AnalyzeArgs) -> Result<Outcome> {
    let p = format::load_distribution::<f64>(&a.file)?;
    let subsets = if a.subsets.is_empty() {
        default_subsets(p.key_length())
    } else {
        a.subsets.iter().map(|s| s.parse()).collect::<Result<Vec<KeySubset>>>()?
    };
    for s in &subsets {
        s.validate(p.key_length())?;
    }
    let known = a.known.as_deref().map(parse_known).transpose()?;
    if let Some(k) = &known {
        k.subset().validate(p.key_length())?;
    }
    let analysis = analyze_distribution(&p, &subsets, known.as_ref())?;
    let prec = cli.precision as usize;
    let body = match cli.format {
        OutputFormat::Text => report::analysis_to_text(&analysis, prec),
        OutputFormat::Json => report::analysis_to_json(&analysis, prec),
    };
    Ok(Outcome { body, passed: analysis.passed })
}

fn cmd_extremal(a: &ExtremalArgs) -> Result<Outcome> {
    let target = match &a.target {
        Some(t) => t.parse()?,
        None => KeySubset::whole(a.key_length)?,
    };
    let favored = match &a.favored {
        Some(bits) => SubsetOutcome::from_bits(target, bits)?,
        None => SubsetOutcome::new(target, 0)?,
    };
    let recipe = ExtremalRecipe::new(a.key_length, a.epsilon, favored)?;
    let p = construct_equality_distribution(&recipe);
    Ok(Outcome { body: format::distribution_to_json(&p), passed: true })
}

fn cmd_ensemble(cli: &Cli, a: &EnsembleArgs) -> Result<Outcome> {
    let e: DistanceEnsemble<f64> = match (&a.file, a.sample) {
        (Some(path), _) => format::load_ensemble(path)?,
        (None, Some(n)) => {
            let mean = a.mean.ok_or_else(|| Error::param("mean", "required with --sample"))?;
            let e = DistanceEnsemble::sample(cli.seed, n, mean)?;
            if let Some(path) = &a.write_ensemble {
                fs::write(path, format::ensemble_to_json(&e))?;
            }
            e
        }
        (None, None) => return Err(Error::param("file", "give an ensemble file or --sample N --mean M")),
    };
    let threshold = match a.threshold {
        Some(t) => t,
        None if e.average_distance() > 0.0 => e.average_distance().sqrt(),
        None => return Err(Error::param("threshold", "required when the average distance is 0")),
    };
    let v = verify_ensemble(&e, threshold)?;
    let prec = cli.precision as usize;
    let body = match cli.format {
        OutputFormat::Text => report::ensemble_to_text(&v, prec),
        OutputFormat::Json => report::ensemble_to_json(&v, prec),
    };
    Ok(Outcome { body, passed: v.passed })
}

fn emit(output: Option<&Path>, body: &str, out: &mut dyn Write) -> Result<()> {
    match output {
        Some(path) => fs::write(path, body)?,
        None => out.write_all(body.as_bytes())?,
    }
    Ok(())
}

/// Runs one invocation and returns its exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Report(a) => cmd_report(&cli, a),
        Command::Analyze(a) => cmd_analyze(&cli, a),
        Command::Extremal(a) => cmd_extremal(a),
        Command::Ensemble(a) => cmd_ensemble(&cli, a),
    };
    let outcome = match result.and_then(|o| emit(cli.output.as_deref(), &o.body, out).map(|_| o)) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    if outcome.passed {
        EXIT_OK
    } else {
        let _ = writeln!(err, "error: verification failed");
        EXIT_DOMAIN
    }
}
