use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use glyphrec::config::{ClassifierSelection, FusionRule, KernelKind, PipelineConfig, SynthSpec};
use glyphrec::dataset;
use glyphrec::matrix::FeatureMatrix;
use glyphrec::pgm::load_gray;
use glyphrec::pipeline::{self, TrainedModels};
use glyphrec::report::ReportFormat;
use glyphrec::synth::synth_glyphs;
use glyphrec_core::FeatureKind;

#[derive(Parser)]
#[command(name = "glyphrec", version, about = "Handwritten glyph recognition workbench")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// TOML pipeline configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for splits, synthesis and initialization.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_parser = parse_kw::<ClassifierSelection>)]
    classifier: Option<ClassifierSelection>,
    /// Fusion rule used by `predict`.
    #[arg(long, global = true, value_parser = parse_kw::<FusionRule>)]
    fusion: Option<FusionRule>,
    #[arg(long, global = true, value_parser = parse_kw::<KernelKind>)]
    kernel: Option<KernelKind>,
    /// Dataset manifest or class-folder directory, replacing the config's dataset.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Output directory, replacing the config's.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
}

fn parse_kw<T: std::str::FromStr<Err = glyphrec::Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: glyphrec::Error| e.to_string())
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Rows,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a class-folder tree or manifest and write manifest.json.
    Ingest {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic glyph dataset on disk.
    Synth {
        #[arg(long, default_value_t = 10)]
        classes: usize,
        #[arg(long, default_value_t = 80)]
        per_class: usize,
        #[arg(long, default_value_t = 0.02)]
        noise: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write raw feature matrices of the configured dataset.
    Extract {
        #[arg(long)]
        out: PathBuf,
    },
    /// Train, evaluate and persist models and reports.
    Train,
    /// Evaluate saved models on the configured dataset split.
    Evaluate {
        /// Model directory (default: <output_dir>/models).
        #[arg(long)]
        models: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Classify image files with saved models.
    Predict {
        #[arg(long)]
        models: Option<PathBuf>,
        #[arg(required = true)]
        images: Vec<PathBuf>,
    },
    /// Render a saved report.
    Report {
        /// Run directory holding report.json (default: <output_dir>).
        dir: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Append measured training and prediction times.
        #[arg(long)]
        timings: bool,
    },
}

fn load_config(g: &GlobalOpts) -> Result<PipelineConfig> {
    let mut cfg = match &g.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(c) = g.classifier {
        cfg.classifier = c;
    }
    if let Some(f) = g.fusion {
        cfg.fusion.rule = f;
    }
    if let Some(k) = g.kernel {
        cfg.svm.kernel = k;
    }
    if let Some(m) = &g.manifest {
        cfg.dataset.manifest = Some(m.clone());
        cfg.dataset.synth = None;
    }
    if let Some(o) = &g.output_dir {
        cfg.output_dir = o.clone();
    }
    Ok(cfg)
}

fn render(report: &glyphrec::report::EvalReport, format: Format) -> Result<String> {
    Ok(match format {
        Format::Text => report.render(ReportFormat::TextTable),
        Format::Rows => report.render(ReportFormat::Rows),
        Format::Json => pipeline::report_to_json(report)?,
    })
}

fn ingest(path: &Path, out: Option<PathBuf>) -> Result<()> {
    let manifest = dataset::ingest(path)?;
    let out = out.unwrap_or_else(|| {
        if path.is_dir() {
            path.join("manifest.json")
        } else {
            path.with_extension("validated.json")
        }
    });
    let mut saved = manifest.clone();
    if let Some(dir) = out.parent() {
        // keep entries resolvable from the new manifest location
        if dir != manifest.root {
            for e in &mut saved.entries {
                e.path = std::path::absolute(manifest.root.join(&e.path))?;
            }
        }
    }
    saved.save(&out)?;
    println!("{} samples, {} classes -> {}", manifest.entries.len(), classes_in(&manifest), out.display());
    Ok(())
}

fn classes_in(m: &dataset::DatasetManifest) -> usize {
    let mut labels = m.labels();
    labels.sort_unstable();
    labels.dedup();
    labels.len()
}

fn extract(cfg: &PipelineConfig, out: &Path) -> Result<()> {
    cfg.validate()?;
    let (images, labels) = pipeline::load_dataset(cfg)?;
    let feats = pipeline::extract_features(&images)?;
    for kind in FeatureKind::ALL {
        let mut m = FeatureMatrix::new(kind.name(), kind.dimension());
        for (f, &l) in feats.iter().zip(&labels) {
            m.push(l, f[kind.index()].values().to_vec())?;
        }
        let path = out.join(format!("features-{kind}.csv"));
        glyphrec::write_atomic(&path, &m.to_bytes())?;
        println!("{}", path.display());
    }
    Ok(())
}

fn predict(cfg: &PipelineConfig, models: &Path, images: &[PathBuf]) -> Result<()> {
    let models = TrainedModels::load(models)?;
    for path in images {
        let img = load_gray(path)?;
        let feats = glyphrec_core::features::extract_all(&pipeline::preprocess(&img)?)?;
        let p = models.predict(&feats)?;
        let mut parts = Vec::new();
        if cfg.classifier != ClassifierSelection::Svm {
            if let (Some(d), Some(f)) = (&p.experts, &models.fusion) {
                let (top1, ranking) = pipeline::fused_label(d, f, cfg.fusion.rule);
                let label = top1.map_or_else(|| "rejected".to_string(), |l| l.to_string());
                parts.push(format!("ensemble-{}={label} top5={:?}", cfg.fusion.rule, &ranking[..5]));
            }
        }
        if cfg.classifier != ClassifierSelection::MlpEnsemble {
            if let Some(s) = &p.svm {
                parts.push(format!("svm={} top5={:?}", s.label, &s.ranking()[..5]));
            }
        }
        if parts.is_empty() {
            bail!("no saved model matches --classifier {}", cfg.classifier);
        }
        println!("{}\t{}", path.display(), parts.join("\t"));
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let cfg = load_config(&cli.global)?;
    match cli.command {
        Command::Ingest { path, out } => ingest(&path, out)?,
        Command::Synth {
            classes,
            per_class,
            noise,
            out,
        } => {
            let d = synth_glyphs(classes, per_class, noise, cfg.seed)?;
            d.write(&out)?;
            println!("{} glyphs -> {}", d.images.len(), out.display());
        }
        Command::Extract { out } => extract(&cfg, &out)?,
        Command::Train => {
            let mut cfg = cfg;
            if cfg.dataset.manifest.is_none() && cfg.dataset.synth.is_none() {
                cfg.dataset.synth = Some(SynthSpec {
                    classes: 10,
                    per_class: 80,
                    noise: 0.02,
                });
            }
            let out = pipeline::run_pipeline(&cfg).context("training run failed")?;
            print!("{}", out.report.render_text());
            println!("models and reports written to {}", cfg.output_dir.display());
        }
        Command::Evaluate { models, format } => {
            let dir = models.unwrap_or_else(|| pipeline::models_dir(&cfg.output_dir));
            let report = pipeline::evaluate_saved(&cfg, &dir)?;
            print!("{}", render(&report, format)?);
        }
        Command::Predict { models, images } => {
            let dir = models.unwrap_or_else(|| pipeline::models_dir(&cfg.output_dir));
            predict(&cfg, &dir, &images)?;
        }
        Command::Report { dir, format, timings } => {
            let dir = dir.unwrap_or(cfg.output_dir);
            let report = pipeline::read_report(&dir)?;
            print!("{}", render(&report, format)?);
            if timings {
                print!("\n{}", report.render_timings());
            }
        }
    }
    Ok(())
}
