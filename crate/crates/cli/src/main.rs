//! `prodlearn`: learn Moore machines with the product or monolithic learner
//! and report query statistics.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use prodlearn::experiment::{
    hypothesis_log_csv, load_model, model_info, run_comparison, run_experiment, stats_csv,
    ExperimentConfig, FileFormat, LearnerKind, LoadedModel, ModelSource, Split, INFO_REVERSE_CAP,
};
use prodlearn::models::write_moore;
use prodlearn::{EqMode, SamplingEqConfig};

#[derive(Parser, Debug)]
#[command(name = "prodlearn", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Learn a model and write stats, hypothesis log and learned machine.
    Learn {
        #[command(flatten)]
        run: RunArgs,
        /// Stats CSV destination (default: stdout).
        #[arg(long)]
        stats_out: Option<PathBuf>,
        /// Hypothesis-size log CSV destination.
        #[arg(long)]
        hyplog_out: Option<PathBuf>,
        /// Learned machine destination, native format.
        #[arg(long)]
        learned_out: Option<PathBuf>,
    },
    /// Run a learner and a baseline on the same model and seed.
    Compare {
        #[command(flatten)]
        run: RunArgs,
        /// Learner the ratios are relative to.
        #[arg(long, default_value = "mono")]
        baseline: LearnerKind,
        /// Comparison CSV destination (default: stdout).
        #[arg(long)]
        stats_out: Option<PathBuf>,
    },
    /// Print state counts of a model.
    Info {
        #[command(flatten)]
        model: ModelArgs,
        /// Also build the reversed machine and report its size.
        #[arg(long)]
        reverse: bool,
        /// Give up on reversal beyond this many states.
        #[arg(long, default_value_t = INFO_REVERSE_CAP)]
        reverse_cap: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum FormatArg {
    Native,
    Kiss2,
    Register(usize),
}

impl FromStr for FormatArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "native" => Ok(FormatArg::Native),
            "kiss2" => Ok(FormatArg::Kiss2),
            _ => match s.strip_prefix("register:").map(str::parse::<usize>) {
                Some(Ok(n)) => Ok(FormatArg::Register(n)),
                _ => Err(format!("expected native, kiss2 or register:N, found {s:?}")),
            },
        }
    }
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// Model file; not used with --format register:N.
    #[arg(long)]
    model: Option<PathBuf>,
    /// native, kiss2 or register:N (default: from the file extension).
    #[arg(long)]
    format: Option<FormatArg>,
    /// bits, groups:N or none.
    #[arg(long, default_value = "bits")]
    split: Split,
}

impl ModelArgs {
    fn source(&self) -> Result<ModelSource> {
        let file = |path: &Path, format| ModelSource::File {
            path: path.to_owned(),
            format,
        };
        Ok(match (&self.format, &self.model) {
            (Some(FormatArg::Register(n)), None) => ModelSource::Register(*n),
            (Some(FormatArg::Register(_)), Some(_)) => {
                bail!("--model cannot be combined with --format register:N")
            }
            (Some(FormatArg::Native), Some(p)) => file(p, FileFormat::Native),
            (Some(FormatArg::Kiss2), Some(p)) => file(p, FileFormat::Kiss2),
            (None, Some(p)) => file(p, FileFormat::from_extension(p)),
            (_, None) => bail!("--model is required unless --format register:N is given"),
        })
    }

    fn load(&self) -> Result<LoadedModel> {
        Ok(load_model(&self.source()?, self.split)?)
    }
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// product, plstar or mono.
    #[arg(long, default_value = "product")]
    learner: LearnerKind,
    /// exact or sample.
    #[arg(long, default_value = "exact", value_parser = ["exact", "sample"])]
    eq: String,
    /// Test words per sampling equivalence query.
    #[arg(long, default_value_t = SamplingEqConfig::default().sample_count)]
    samples: usize,
    /// Minimum sampled word length.
    #[arg(long, default_value_t = SamplingEqConfig::default().min_length)]
    min_len: usize,
    /// Expected number of symbols beyond the minimum length.
    #[arg(long, default_value_t = SamplingEqConfig::default().expected_extra_length)]
    exp_len: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl RunArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let eq = match self.eq.as_str() {
            "exact" => EqMode::Exact,
            _ => EqMode::Sampling(SamplingEqConfig {
                sample_count: self.samples,
                min_length: self.min_len,
                expected_extra_length: self.exp_len,
                seed: self.seed,
            }),
        };
        let config = ExperimentConfig {
            model: self.model.source()?,
            learner: self.learner,
            split: self.model.split,
            eq,
            seed: self.seed,
        };
        config.validate()?;
        log::info!("resolved config: {config:?}");
        Ok(config)
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn verdict(verified: bool) -> ExitCode {
    if verified {
        ExitCode::SUCCESS
    } else {
        log::error!("learned machine was not verified equivalent to the target");
        ExitCode::from(1)
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Learn {
            run,
            stats_out,
            hyplog_out,
            learned_out,
        } => {
            let config = run.config()?;
            let model = run.model.load()?;
            let report = run_experiment(&config, &model)?;
            emit(
                stats_out.as_deref(),
                &stats_csv(std::slice::from_ref(&report.stats))?,
            )?;
            if let Some(p) = &hyplog_out {
                emit(Some(p), &hypothesis_log_csv(&report.hypothesis_log)?)?;
            }
            if let Some(p) = &learned_out {
                emit(Some(p), &write_moore(&report.learned))?;
            }
            Ok(verdict(report.verified))
        }
        Command::Compare {
            run,
            baseline,
            stats_out,
        } => {
            let config = run.config()?;
            let model = run.model.load()?;
            let comparison = run_comparison(&config, baseline, &model)?;
            emit(stats_out.as_deref(), &comparison.csv()?)?;
            Ok(verdict(comparison.verified()))
        }
        Command::Info {
            model,
            reverse,
            reverse_cap,
        } => {
            let loaded = model.load()?;
            let report = model_info(&loaded, reverse.then_some(reverse_cap))?;
            print!("{report}");
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
