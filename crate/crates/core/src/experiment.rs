//! Experiment harness: load a model, run a learner against a simulator
//! teacher, and report query statistics as CSV.
//!
//! Stats rows use the columns
//! `name,states,components,eqs,mqs,dispatch_mqs,actions,learner,seed`, where
//! `mqs` counts all membership queries (learner and dispatch) and
//! `dispatch_mqs` the driver's share of them. Hypothesis logs use
//! `eq_ordinal,reachable_states` with 1-based ordinals.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::automata::{MachineError, MooreMachine, OutputDecomposition, DEFAULT_REVERSE_CAP};
use crate::learner::LearnError;
use crate::models::{
    circuit_to_moore, make_register_machine, parse_kiss2, parse_moore, ModelError,
};
use crate::reduction::{run_reduction_learner, ReductionConfig};
use crate::table::{lstar, lstar_factory, product_lstar};
use crate::teacher::{EqMode, SamplingEqConfig, SimulatorTeacher, Teacher};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Model { path: String, source: ModelError },
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FileFormat {
    Native,
    Kiss2,
}

impl FileFormat {
    /// `.kiss`/`.kiss2` files are KISS2, everything else native.
    pub fn from_extension(path: &Path) -> FileFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("kiss" | "kiss2") => FileFormat::Kiss2,
            _ => FileFormat::Native,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelSource {
    /// The built-in `n`-bit register machine.
    Register(usize),
    File {
        path: PathBuf,
        format: FileFormat,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LearnerKind {
    /// One L* learner per component, composed by counterexample dispatch.
    Product,
    /// A single observation table with product closedness and consistency.
    ProductLStar,
    /// Classic L* on the whole output.
    Mono,
}

impl LearnerKind {
    pub fn name(self) -> &'static str {
        match self {
            LearnerKind::Product => "product",
            LearnerKind::ProductLStar => "plstar",
            LearnerKind::Mono => "mono",
        }
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LearnerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "product" => Ok(LearnerKind::Product),
            "plstar" => Ok(LearnerKind::ProductLStar),
            "mono" => Ok(LearnerKind::Mono),
            _ => Err(format!(
                "unknown learner {s:?} (expected product, plstar or mono)"
            )),
        }
    }
}

/// How the output tuple is split into components.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Split {
    /// One component per atom.
    Bits,
    /// Consecutive groups of the given size; the last may be shorter.
    Groups(usize),
    None,
}

impl Split {
    pub fn decomposition(self, width: usize) -> Result<Option<OutputDecomposition>, MachineError> {
        match self {
            Split::Bits => Ok(Some(OutputDecomposition::bitwise(width))),
            Split::Groups(size) => OutputDecomposition::contiguous(width, size).map(Some),
            Split::None => Ok(None),
        }
    }

    fn groups(self, width: usize) -> Result<Vec<Vec<usize>>, MachineError> {
        Ok(self
            .decomposition(width)?
            .unwrap_or_else(|| OutputDecomposition::whole(width))
            .groups()
            .to_vec())
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Split::Bits => f.write_str("bits"),
            Split::Groups(n) => write!(f, "groups:{n}"),
            Split::None => f.write_str("none"),
        }
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "bits" => Ok(Split::Bits),
            "none" => Ok(Split::None),
            _ => match s.strip_prefix("groups:").map(str::parse::<usize>) {
                Some(Ok(n)) if n > 0 => Ok(Split::Groups(n)),
                _ => Err(format!(
                    "unknown split {s:?} (expected bits, groups:N or none)"
                )),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelSource,
    pub learner: LearnerKind,
    pub split: Split,
    /// For sampling mode the config's seed is overridden by `seed`.
    pub eq: EqMode,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        match (self.learner, self.split) {
            (LearnerKind::Mono, _) => {}
            (_, Split::None) => {
                return Err(ExperimentError::Config(format!(
                    "learner {} needs a split other than none",
                    self.learner
                )))
            }
            _ => {}
        }
        if let EqMode::Sampling(cfg) = &self.eq {
            cfg.validate().map_err(ExperimentError::Config)?;
        }
        Ok(())
    }

    fn eq_mode(&self) -> EqMode {
        match &self.eq {
            EqMode::Exact => EqMode::Exact,
            EqMode::Sampling(cfg) => EqMode::Sampling(SamplingEqConfig {
                seed: self.seed,
                ..cfg.clone()
            }),
        }
    }
}

/// A loaded target together with the decomposition the split induces.
#[derive(Clone, Debug)]
pub struct LoadedModel {
    pub name: String,
    pub machine: MooreMachine,
    pub decomposition: Option<OutputDecomposition>,
}

pub fn load_model(source: &ModelSource, split: Split) -> Result<LoadedModel, ExperimentError> {
    match source {
        ModelSource::Register(n) => {
            let machine = make_register_machine(*n).map_err(|source| ExperimentError::Model {
                path: format!("register:{n}"),
                source,
            })?;
            let decomposition = split.decomposition(machine.arity())?;
            Ok(LoadedModel {
                name: format!("M_{n}"),
                machine,
                decomposition,
            })
        }
        ModelSource::File { path, format } => {
            let text = std::fs::read_to_string(path).map_err(|source| ExperimentError::Io {
                path: path.clone(),
                source,
            })?;
            let model_error = |source: ModelError| ExperimentError::Model {
                path: path.display().to_string(),
                source,
            };
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string());
            let (machine, decomposition) = match format {
                FileFormat::Native => {
                    let machine = parse_moore(&text).map_err(|e| model_error(e.into()))?;
                    let decomposition = split.decomposition(machine.arity())?;
                    (machine, decomposition)
                }
                FileFormat::Kiss2 => {
                    let circuit = parse_kiss2(&text).map_err(|e| model_error(e.into()))?;
                    let groups = split.groups(circuit.output_width)?;
                    let (machine, d) = circuit_to_moore(&circuit, &groups).map_err(model_error)?;
                    (machine, (split != Split::None).then_some(d))
                }
            };
            Ok(LoadedModel {
                name,
                machine,
                decomposition,
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StatsRow {
    pub name: String,
    /// States of the minimized target.
    pub states: usize,
    pub components: usize,
    pub eqs: u64,
    /// Learner and dispatch membership queries together.
    pub mqs: u64,
    pub dispatch_mqs: u64,
    pub actions: u64,
    pub learner: String,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub stats: StatsRow,
    /// Reachable state count of the hypothesis at each equivalence query.
    pub hypothesis_log: Vec<usize>,
    pub learned: MooreMachine,
    /// Exact mode: the learned machine is equivalent to the target.
    /// Sampling mode: the final equivalence query answered yes.
    pub verified: bool,
}

/// Runs the configured learner on an already loaded model.
pub fn run_experiment(
    config: &ExperimentConfig,
    model: &LoadedModel,
) -> Result<RunReport, ExperimentError> {
    config.validate()?;
    let mode = config.eq_mode();
    log::info!(
        "model={} learner={} split={} eq={:?} seed={}",
        model.name,
        config.learner,
        config.split,
        mode,
        config.seed
    );
    let decomposition = || {
        model.decomposition.clone().ok_or_else(|| {
            ExperimentError::Config(format!("learner {} needs a decomposition", config.learner))
        })
    };
    let mut teacher = SimulatorTeacher::new(model.machine.clone(), mode.clone());
    let (learned, hypothesis_log, components) = match config.learner {
        LearnerKind::Mono => {
            let outcome = lstar(&mut teacher)?;
            (outcome.hypothesis, outcome.hypothesis_sizes, 1)
        }
        LearnerKind::ProductLStar => {
            let d = decomposition()?;
            let result = product_lstar(&mut teacher, d.clone())?;
            (
                result.outcome.hypothesis,
                result.outcome.hypothesis_sizes,
                d.arity(),
            )
        }
        LearnerKind::Product => {
            let d = decomposition()?;
            let outcome = run_reduction_learner(
                &mut teacher,
                &d,
                lstar_factory(),
                &ReductionConfig::default(),
            )?;
            (outcome.hypothesis, outcome.hypothesis_log, d.arity())
        }
    };
    let verified = match mode {
        EqMode::Exact => model.machine.equivalent(&learned)?.is_equivalent(),
        EqMode::Sampling(_) => true,
    };
    let stats = teacher.stats();
    let row = StatsRow {
        name: model.name.clone(),
        states: model.machine.minimize().size(),
        components,
        eqs: stats.eq_count,
        mqs: stats.total_mqs(),
        dispatch_mqs: stats.dispatch_mq_count,
        actions: stats.action_count,
        learner: config.learner.name().to_owned(),
        seed: config.seed,
    };
    log::info!(
        "learned {} states with {} EQs, {} MQs, {} actions; verified={verified}",
        learned.size(),
        row.eqs,
        row.mqs,
        row.actions
    );
    Ok(RunReport {
        stats: row,
        hypothesis_log,
        learned,
        verified,
    })
}

fn write_csv<S: Serialize>(rows: impl IntoIterator<Item = S>) -> Result<String, ExperimentError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn stats_csv(rows: &[StatsRow]) -> Result<String, ExperimentError> {
    write_csv(rows)
}

pub fn hypothesis_log_csv(log: &[usize]) -> Result<String, ExperimentError> {
    #[derive(Serialize)]
    struct Row {
        eq_ordinal: usize,
        reachable_states: usize,
    }
    write_csv(log.iter().enumerate().map(|(i, &s)| Row {
        eq_ordinal: i + 1,
        reachable_states: s,
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareRow {
    pub name: String,
    pub states: usize,
    pub components: usize,
    pub eqs: u64,
    pub mqs: u64,
    pub dispatch_mqs: u64,
    pub actions: u64,
    pub learner: String,
    pub seed: u64,
    /// `mqs` relative to the baseline row.
    pub mq_ratio: String,
    pub action_ratio: String,
}

#[derive(Clone, Debug)]
pub struct Comparison {
    pub candidate: RunReport,
    pub baseline: RunReport,
}

impl Comparison {
    pub fn verified(&self) -> bool {
        self.candidate.verified && self.baseline.verified
    }

    pub fn mq_ratio(&self) -> f64 {
        ratio(self.candidate.stats.mqs, self.baseline.stats.mqs)
    }

    pub fn action_ratio(&self) -> f64 {
        ratio(self.candidate.stats.actions, self.baseline.stats.actions)
    }

    /// Candidate row then baseline row, both with ratios against the
    /// baseline.
    pub fn rows(&self) -> Vec<CompareRow> {
        let base = &self.baseline.stats;
        [&self.candidate.stats, base]
            .into_iter()
            .map(|s| CompareRow {
                name: s.name.clone(),
                states: s.states,
                components: s.components,
                eqs: s.eqs,
                mqs: s.mqs,
                dispatch_mqs: s.dispatch_mqs,
                actions: s.actions,
                learner: s.learner.clone(),
                seed: s.seed,
                mq_ratio: format!("{:.4}", ratio(s.mqs, base.mqs)),
                action_ratio: format!("{:.4}", ratio(s.actions, base.actions)),
            })
            .collect()
    }

    pub fn csv(&self) -> Result<String, ExperimentError> {
        write_csv(self.rows())
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        if a == 0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        a as f64 / b as f64
    }
}

/// Runs `config` and the same configuration with `baseline` as learner.
pub fn run_comparison(
    config: &ExperimentConfig,
    baseline: LearnerKind,
    model: &LoadedModel,
) -> Result<Comparison, ExperimentError> {
    let candidate = run_experiment(config, model)?;
    let baseline_config = ExperimentConfig {
        learner: baseline,
        ..config.clone()
    };
    let baseline = run_experiment(&baseline_config, model)?;
    Ok(Comparison {
        candidate,
        baseline,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfoReport {
    pub name: String,
    pub states: usize,
    pub reachable: usize,
    pub minimized: usize,
    pub inputs: usize,
    pub arity: usize,
    /// Minimized size of each component under the split.
    pub components: Vec<usize>,
    pub reverse: Option<usize>,
}

impl fmt::Display for InfoReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "name: {}", self.name)?;
        writeln!(f, "states: {}", self.states)?;
        writeln!(f, "reachable: {}", self.reachable)?;
        writeln!(f, "minimized: {}", self.minimized)?;
        writeln!(f, "inputs: {}", self.inputs)?;
        writeln!(f, "arity: {}", self.arity)?;
        if !self.components.is_empty() {
            let sizes: Vec<String> = self.components.iter().map(usize::to_string).collect();
            writeln!(f, "components: {}", sizes.join(","))?;
        }
        if let Some(r) = self.reverse {
            writeln!(f, "reverse: {r}")?;
        }
        Ok(())
    }
}

/// Size report for a model. With `reverse_cap` set, also builds the reversed
/// machine, failing if it would exceed the cap.
pub fn model_info(
    model: &LoadedModel,
    reverse_cap: Option<usize>,
) -> Result<InfoReport, ExperimentError> {
    let m = &model.machine;
    let components = match &model.decomposition {
        Some(d) => (0..d.arity())
            .map(|i| Ok(m.project(d, i)?.minimize().size()))
            .collect::<Result<_, MachineError>>()?,
        None => Vec::new(),
    };
    let reverse = reverse_cap
        .map(|cap| m.reverse(cap))
        .transpose()?
        .map(|r| r.size());
    Ok(InfoReport {
        name: model.name.clone(),
        states: m.size(),
        reachable: m.reachable().size(),
        minimized: m.minimize().size(),
        inputs: m.inputs().len(),
        arity: m.arity(),
        components,
        reverse,
    })
}

/// Default cap on reversed-machine size for [`model_info`].
pub const INFO_REVERSE_CAP: usize = DEFAULT_REVERSE_CAP;
