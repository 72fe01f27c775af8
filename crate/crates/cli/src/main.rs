//! `softeval`: uncertainty-aware evaluation of binary rankers.
//!
//! Subcommands: `aggregate` (annotations to soft/hard labels), `eval`
//! (ordinary-vs-soft comparison report), `bootstrap` (annotation-bootstrap
//! rank stability), `compare` (R² and flips from precomputed quads).
//!
//! Exit codes: 0 success, 2 input or validation error, 1 internal error.

mod config;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{CommonOpts, OutputFormat, RunConfig};
use softeval::json::Value;
use softeval::report::evaluate_models;
use softeval::{
    io as seio, AnnotationTable64, BootstrapConfig64, ComparisonReport, Error, MetricQuad64,
    ModelScores64, Result,
};

#[derive(Parser)]
#[command(
    name = "softeval",
    version,
    about = "Uncertainty-aware evaluation of binary rankers against probabilistic labels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Aggregate raw multi-annotator ratings into soft and hard labels.
    Aggregate(CommonOpts),
    /// Compute per-model metric quads, rankings, rank flips, and R².
    Eval(CommonOpts),
    /// Bootstrap the annotations and measure ranking stability.
    Bootstrap(CommonOpts),
    /// R² and flip analysis from precomputed metric quads.
    Compare(CommonOpts),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Aggregate(opts) => RunConfig::resolve(opts).and_then(cmd_aggregate),
        Command::Eval(opts) => RunConfig::resolve(opts).and_then(cmd_eval),
        Command::Bootstrap(opts) => RunConfig::resolve(opts).and_then(cmd_bootstrap),
        Command::Compare(opts) => RunConfig::resolve(opts).and_then(cmd_compare),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 2 for anything the user can fix in their inputs, 1 for environment
/// failures on our side of the contract.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::WriteOutput { .. } => 1,
        _ => 2,
    }
}

fn cmd_aggregate(cfg: RunConfig) -> Result<()> {
    let (table, labels) = load_labels(&cfg)?;
    let ties = labels.iter().filter(|l| l.tie_resolved).count();
    if ties > 0 {
        eprintln!(
            "note: {ties} of {} items had exactly split votes resolved by the `{}` tie policy",
            table.len(),
            cfg.tie_policy
        );
    }
    emit(cfg.out.as_deref(), &seio::write_labels(&labels))
}

fn cmd_eval(cfg: RunConfig) -> Result<()> {
    let (_, labels) = load_labels(&cfg)?;
    let models = load_models(&cfg)?;
    if models.is_empty() {
        return Err(Error::InvalidConfig(
            "eval needs at least one score file (--scores or --manifest)".into(),
        ));
    }
    let quads = evaluate_models(&models, &labels)?;
    let report = ComparisonReport::build(cfg.task.clone(), quads);
    let text = match cfg.format {
        OutputFormat::Csv => report.flat_csv(),
        OutputFormat::Json => {
            let ties = labels.iter().filter(|l| l.tie_resolved).count() as u64;
            let mut doc = Value::object();
            doc.insert("config", cfg.to_canon_value());
            doc.insert("tie_resolved_items", Value::UInt(ties));
            doc.insert("report", report.to_canon_value());
            render(doc)
        }
    };
    emit(cfg.out.as_deref(), &text)
}

fn cmd_bootstrap(cfg: RunConfig) -> Result<()> {
    if cfg.format == OutputFormat::Csv {
        return Err(Error::InvalidConfig(
            "bootstrap reports are JSON only; use --format json".into(),
        ));
    }
    let (table, labels) = load_labels(&cfg)?;
    let models = load_models(&cfg)?;
    let bootstrap = BootstrapConfig64 {
        iterations: cfg.iterations,
        seed: cfg.seed,
        pipeline: cfg.pipeline()?,
    };
    let report = softeval::bootstrap_stability(&models, &table, &bootstrap, cfg.threads)?;
    let ties = labels.iter().filter(|l| l.tie_resolved).count() as u64;
    let mut doc = Value::object();
    doc.insert("config", cfg.to_canon_value());
    doc.insert("tie_resolved_items", Value::UInt(ties));
    doc.insert("report", report.to_canon_value());
    emit(cfg.out.as_deref(), &render(doc))
}

fn cmd_compare(cfg: RunConfig) -> Result<()> {
    let quads_path = cfg
        .quads
        .as_deref()
        .ok_or_else(|| Error::InvalidConfig("--quads is required for compare".into()))?;
    let rows = seio::read_quads_file(quads_path)?;
    let mut by_task: BTreeMap<String, BTreeMap<String, MetricQuad64>> = BTreeMap::new();
    for (task, model, quad) in rows {
        if by_task
            .entry(task.clone())
            .or_default()
            .insert(model.clone(), quad)
            .is_some()
        {
            return Err(Error::InvalidConfig(format!(
                "duplicate quad row for task `{task}`, model `{model}`"
            )));
        }
    }
    let reports: Vec<ComparisonReport> = by_task
        .into_iter()
        .map(|(task, quads)| ComparisonReport::build(task, quads))
        .collect();
    let text = match cfg.format {
        OutputFormat::Csv => {
            let mut out = String::from("task,model,pair,ordinary,soft\n");
            for report in &reports {
                out.push_str(report.scatter_csv().split_once('\n').map_or("", |x| x.1));
            }
            out
        }
        OutputFormat::Json => {
            let mut doc = Value::object();
            doc.insert("config", cfg.to_canon_value());
            doc.insert(
                "reports",
                Value::Array(reports.iter().map(|r| r.to_canon_value()).collect()),
            );
            render(doc)
        }
    };
    emit(cfg.out.as_deref(), &text)
}

fn load_labels(
    cfg: &RunConfig,
) -> Result<(AnnotationTable64, Vec<softeval::labels::AggregatedItem<f64>>)> {
    let table = seio::read_annotations_file(cfg.require_annotations()?, cfg.scale()?)?;
    let labels = cfg.pipeline()?.aggregate(&table)?;
    Ok((table, labels))
}

/// Models from a manifest (explicit ids, narrow files) or from score files
/// (ids from filenames or wide column headers). Duplicate model ids are an
/// error, never a guess.
fn load_models(cfg: &RunConfig) -> Result<Vec<ModelScores64>> {
    let mut models: Vec<ModelScores64> = Vec::new();
    if let Some(manifest) = &cfg.manifest {
        let file = std::fs::File::open(manifest).map_err(|source| Error::ReadInput {
            path: manifest.display().to_string(),
            source,
        })?;
        let entries = seio::read_manifest(file, &manifest.display().to_string())?;
        let base = manifest.parent().unwrap_or_else(|| Path::new("."));
        for (model_id, rel) in entries {
            let path = resolve(base, &rel);
            let mut loaded = seio::read_scores_file(&path)?;
            if loaded.len() != 1 {
                return Err(Error::InvalidConfig(format!(
                    "manifest entry `{model_id}` points to a multi-model (wide) score file; \
                     manifest entries must be single-model files"
                )));
            }
            loaded[0].model_id = model_id;
            models.append(&mut loaded);
        }
    } else {
        for path in &cfg.scores {
            models.extend(seio::read_scores_file(path)?);
        }
    }
    let mut seen = std::collections::HashSet::new();
    for m in &models {
        if !seen.insert(m.model_id.clone()) {
            return Err(Error::DuplicateModelId {
                model_id: m.model_id.clone(),
            });
        }
    }
    Ok(models)
}

fn resolve(base: &Path, rel: &str) -> PathBuf {
    let p = Path::new(rel);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn render(doc: Value) -> String {
    let mut text = doc.render();
    text.push('\n');
    text
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::WriteOutput {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
