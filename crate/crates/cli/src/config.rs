//! Run configuration: CLI flags merged over an optional JSON config file.
//!
//! Flags always win over file values. The resolved configuration is echoed
//! into every JSON report for provenance.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;

use softeval::json::Value;
use softeval::labels::{Binarization, RatingScale};
use softeval::{AggregationPipeline64, Error, Result, TiePolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BinarizeMode {
    Threshold,
    Majority,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TiePolicyArg {
    Negative,
    Positive,
    Error,
}

impl From<TiePolicyArg> for TiePolicy {
    fn from(value: TiePolicyArg) -> Self {
        match value {
            TiePolicyArg::Negative => TiePolicy::Negative,
            TiePolicyArg::Positive => TiePolicy::Positive,
            TiePolicyArg::Error => TiePolicy::Error,
        }
    }
}

/// Flags shared by all subcommands. Every field is optional here; defaults
/// apply after merging with the config file.
#[derive(Debug, Clone, Args, Default)]
pub struct CommonOpts {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Raw annotation CSV (`item_id,annotator_id,rating`).
    #[arg(long)]
    pub annotations: Option<PathBuf>,

    /// Score CSV files, one per model (`item_id,score`) or wide
    /// (`item_id,score_<model>...`).
    #[arg(long, num_args = 1..)]
    pub scores: Vec<PathBuf>,

    /// Manifest CSV (`model_id,path`) naming models explicitly.
    #[arg(long)]
    pub manifest: Option<PathBuf>,

    /// Task identifier recorded in reports.
    #[arg(long)]
    pub task: Option<String>,

    /// Rating scale lower bound (declared, never inferred).
    #[arg(long)]
    pub scale_min: Option<f64>,

    /// Rating scale upper bound.
    #[arg(long)]
    pub scale_max: Option<f64>,

    /// Hard-label rule: threshold on the mean or majority vote.
    #[arg(long, value_enum)]
    pub binarize: Option<BinarizeMode>,

    /// Normalized threshold in [0,1] for `--binarize threshold`.
    #[arg(long)]
    pub threshold: Option<f64>,

    /// Threshold comparison `p > t` (default).
    #[arg(long, conflicts_with = "inclusive")]
    pub strict: bool,

    /// Threshold comparison `p >= t`.
    #[arg(long)]
    pub inclusive: bool,

    /// Resolution for exactly split majority votes.
    #[arg(long, value_enum)]
    pub tie_policy: Option<TiePolicyArg>,

    /// Bootstrap replicate count.
    #[arg(long)]
    pub iterations: Option<u64>,

    /// Master seed; fully determines every stochastic output.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Worker threads for the bootstrap (results are identical for any
    /// value).
    #[arg(long)]
    pub threads: Option<usize>,

    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Output format.
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,

    /// Precomputed quad CSV for `compare`.
    #[arg(long)]
    pub quads: Option<PathBuf>,
}

/// Config-file schema: the same knobs as the flags.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    annotations: Option<String>,
    scores: Option<Vec<String>>,
    manifest: Option<String>,
    task: Option<String>,
    scale_min: Option<f64>,
    scale_max: Option<f64>,
    binarize: Option<String>,
    threshold: Option<f64>,
    inclusive: Option<bool>,
    tie_policy: Option<String>,
    iterations: Option<u64>,
    seed: Option<u64>,
    threads: Option<usize>,
    out: Option<String>,
    format: Option<String>,
    quads: Option<String>,
}

/// Fully resolved configuration with defaults applied.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub annotations: Option<PathBuf>,
    pub scores: Vec<PathBuf>,
    pub manifest: Option<PathBuf>,
    pub task: String,
    pub scale_min: f64,
    pub scale_max: f64,
    pub binarize: BinarizeMode,
    pub threshold: f64,
    pub inclusive: bool,
    pub tie_policy: TiePolicy,
    pub iterations: u64,
    pub seed: u64,
    pub threads: usize,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub quads: Option<PathBuf>,
}

fn parse_enum<T: ValueEnum>(raw: &str, field: &str) -> Result<T> {
    T::from_str(raw, true).map_err(|_| {
        Error::InvalidConfig(format!("invalid value `{raw}` for config field `{field}`"))
    })
}

impl RunConfig {
    pub fn resolve(opts: &CommonOpts) -> Result<Self> {
        let file: FileConfig = match &opts.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| Error::ReadInput {
                    path: path.display().to_string(),
                    source,
                })?;
                serde_json::from_str(&text).map_err(|e| {
                    Error::InvalidConfig(format!("{}: {e}", path.display()))
                })?
            }
            None => FileConfig::default(),
        };

        let binarize = match (&opts.binarize, &file.binarize) {
            (Some(b), _) => *b,
            (None, Some(raw)) => parse_enum(raw, "binarize")?,
            (None, None) => BinarizeMode::Threshold,
        };
        let tie_policy = match (&opts.tie_policy, &file.tie_policy) {
            (Some(t), _) => TiePolicy::from(*t),
            (None, Some(raw)) => TiePolicy::from(parse_enum::<TiePolicyArg>(raw, "tie_policy")?),
            (None, None) => TiePolicy::Negative,
        };
        let format = match (&opts.format, &file.format) {
            (Some(f), _) => *f,
            (None, Some(raw)) => parse_enum(raw, "format")?,
            (None, None) => OutputFormat::Json,
        };
        let inclusive = if opts.strict {
            false
        } else if opts.inclusive {
            true
        } else {
            file.inclusive.unwrap_or(false)
        };
        let scores = if opts.scores.is_empty() {
            file.scores
                .unwrap_or_default()
                .into_iter()
                .map(PathBuf::from)
                .collect()
        } else {
            opts.scores.clone()
        };

        let config = Self {
            annotations: opts
                .annotations
                .clone()
                .or_else(|| file.annotations.map(PathBuf::from)),
            scores,
            manifest: opts
                .manifest
                .clone()
                .or_else(|| file.manifest.map(PathBuf::from)),
            task: opts
                .task
                .clone()
                .or(file.task)
                .unwrap_or_else(|| "default".to_string()),
            scale_min: opts.scale_min.or(file.scale_min).unwrap_or(0.0),
            scale_max: opts.scale_max.or(file.scale_max).unwrap_or(1.0),
            binarize,
            threshold: opts.threshold.or(file.threshold).unwrap_or(0.5),
            inclusive,
            tie_policy,
            iterations: opts.iterations.or(file.iterations).unwrap_or(1000),
            seed: opts.seed.or(file.seed).unwrap_or(0),
            threads: opts.threads.or(file.threads).unwrap_or(1),
            out: opts.out.clone().or_else(|| file.out.map(PathBuf::from)),
            format,
            quads: opts.quads.clone().or_else(|| file.quads.map(PathBuf::from)),
        };
        if config.manifest.is_some() && !config.scores.is_empty() {
            return Err(Error::InvalidConfig(
                "give either --manifest or --scores, not both".into(),
            ));
        }
        Ok(config)
    }

    pub fn scale(&self) -> Result<RatingScale<f64>> {
        RatingScale::new(self.scale_min, self.scale_max)
    }

    pub fn pipeline(&self) -> Result<AggregationPipeline64> {
        let binarization = match self.binarize {
            BinarizeMode::Threshold => Binarization::threshold(self.threshold, self.inclusive)?,
            BinarizeMode::Majority => Binarization::majority(self.tie_policy),
        };
        Ok(AggregationPipeline64::new(self.scale()?, binarization))
    }

    pub fn require_annotations(&self) -> Result<&Path> {
        self.annotations
            .as_deref()
            .ok_or_else(|| Error::InvalidConfig("--annotations is required".into()))
    }

    /// Effective configuration as echoed into JSON reports.
    pub fn to_canon_value(&self) -> Value {
        let opt_path = |p: &Option<PathBuf>| match p {
            Some(p) => Value::Str(p.display().to_string()),
            None => Value::Null,
        };
        let mut v = Value::object();
        v.insert("annotations", opt_path(&self.annotations));
        v.insert(
            "scores",
            Value::Array(
                self.scores
                    .iter()
                    .map(|p| Value::Str(p.display().to_string()))
                    .collect(),
            ),
        );
        v.insert("manifest", opt_path(&self.manifest));
        v.insert("task", Value::Str(self.task.clone()));
        v.insert("scale_min", Value::Float(self.scale_min));
        v.insert("scale_max", Value::Float(self.scale_max));
        v.insert(
            "binarize",
            Value::Str(
                match self.binarize {
                    BinarizeMode::Threshold => "threshold",
                    BinarizeMode::Majority => "majority",
                }
                .into(),
            ),
        );
        v.insert("threshold", Value::Float(self.threshold));
        v.insert("inclusive", Value::Bool(self.inclusive));
        v.insert("tie_policy", Value::Str(self.tie_policy.to_string()));
        v.insert("iterations", Value::UInt(self.iterations));
        v.insert("seed", Value::UInt(self.seed));
        v.insert("threads", Value::UInt(self.threads as u64));
        v.insert("out", opt_path(&self.out));
        v.insert(
            "format",
            Value::Str(
                match self.format {
                    OutputFormat::Json => "json",
                    OutputFormat::Csv => "csv",
                }
                .into(),
            ),
        );
        v.insert("quads", opt_path(&self.quads));
        v
    }
}
