//! End-to-end training and evaluation.

use std::path::{Path, PathBuf};
use std::time::Instant;

use glyphrec_core::ensemble::{fuse_any, fuse_unanimous, fuse_weighted, derive_weights, ExpertDecision, FusionWeights};
use glyphrec_core::features::extract_all;
use glyphrec_core::image::{binarize, normalize};
use glyphrec_core::mlp::{self, MlpConfig, MlpModel};
use glyphrec_core::svm::{self, SvmModel, SvmParams, SvmPrediction};
use glyphrec_core::{ranking, BinaryImage, FeatureKind, FeatureVector, GrayImage, NUM_CLASSES};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ClassifierSelection, FusionRule, PipelineConfig, SvmFeatures, WeightSource};
use crate::container::{self, FusionModel, Payload};
use crate::dataset::{self, Split};
use crate::error::{Error, Result};
use crate::report::{ClassifierReport, EvalReport, MetricsBuilder, SplitMetrics, Timing};
use crate::scaler::ScalerModel;
use crate::synth::synth_glyphs;

pub type Features = [FeatureVector; 4];

/// Binarizes and size-normalizes a grayscale glyph.
pub fn preprocess(img: &GrayImage) -> Result<BinaryImage> {
    Ok(normalize(&binarize(img))?)
}

/// All four feature vectors of every image, in input order.
pub fn extract_features(images: &[GrayImage]) -> Result<Vec<Features>> {
    images
        .par_iter()
        .enumerate()
        .map(|(i, img)| {
            let bin = preprocess(img).map_err(|e| Error::format("sample", format!("#{i}: {e}")))?;
            Ok(extract_all(&bin)?)
        })
        .collect()
}

/// Loads the configured dataset: images in manifest order and their labels.
pub fn load_dataset(cfg: &PipelineConfig) -> Result<(Vec<GrayImage>, Vec<usize>)> {
    match (&cfg.dataset.manifest, &cfg.dataset.synth) {
        (Some(path), None) => {
            let m = dataset::read_manifest(path)?;
            Ok((m.load_images()?, m.labels()))
        }
        (None, Some(s)) => {
            let d = synth_glyphs(s.classes, s.per_class, s.noise, cfg.seed)?;
            if d.images.is_empty() {
                return Err(Error::NoSamples);
            }
            let labels = d.labels();
            Ok((d.images, labels))
        }
        _ => Err(Error::config("dataset needs exactly one of manifest and synth")),
    }
}

pub const SVM_NAME: &str = "svm";
pub const UNANIMOUS_NAME: &str = "ensemble-unanimous";
pub const ANY_NAME: &str = "ensemble-any";
pub const WEIGHTED_NAME: &str = "ensemble-weighted";

pub fn expert_name(kind: FeatureKind) -> String {
    format!("mlp-{kind}")
}

/// Every persisted model of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModels {
    pub scalers: [ScalerModel; 4],
    pub experts: Option<[MlpModel; 4]>,
    pub fusion: Option<FusionModel>,
    pub svm: Option<SvmModel>,
}

/// Outputs of every trained classifier for one sample.
#[derive(Debug, Clone)]
pub struct Prediction {
    pub experts: Option<Vec<ExpertDecision>>,
    pub svm: Option<SvmPrediction>,
}

fn file_stem(kind: FeatureKind) -> String {
    kind.name().to_string()
}

impl TrainedModels {
    pub fn svm_features(&self) -> Option<SvmFeatures> {
        self.svm.as_ref().and_then(|m| SvmFeatures::from_dimension(m.dim))
    }

    pub fn scale(&self, raw: &Features) -> Result<[Vec<f64>; 4]> {
        let mut out: [Vec<f64>; 4] = Default::default();
        for (i, (s, f)) in self.scalers.iter().zip(raw).enumerate() {
            out[i] = s.transform(f.values())?;
        }
        Ok(out)
    }

    pub fn predict_scaled(&self, scaled: &[Vec<f64>; 4]) -> Result<Prediction> {
        let experts = match &self.experts {
            Some(models) => Some(
                models
                    .iter()
                    .zip(FeatureKind::ALL)
                    .zip(scaled)
                    .map(|((m, kind), x)| Ok(ExpertDecision::new(kind, m.forward(x)?)))
                    .collect::<Result<Vec<_>>>()?,
            ),
            None => None,
        };
        let svm = match (&self.svm, self.svm_features()) {
            (Some(m), Some(sel)) => Some(m.predict(&svm_input(scaled, sel))?),
            (Some(_), None) => return Err(Error::format("svm model", "dimension matches no feature selection")),
            _ => None,
        };
        Ok(Prediction { experts, svm })
    }

    pub fn predict(&self, raw: &Features) -> Result<Prediction> {
        self.predict_scaled(&self.scale(raw)?)
    }

    fn payloads(&self) -> Vec<(String, Payload)> {
        let mut out = Vec::new();
        for (kind, s) in FeatureKind::ALL.iter().zip(&self.scalers) {
            out.push((format!("scaler-{}.glrm", file_stem(*kind)), s.clone().into()));
        }
        if let Some(experts) = &self.experts {
            for (kind, m) in FeatureKind::ALL.iter().zip(experts) {
                out.push((format!("mlp-{}.glrm", file_stem(*kind)), m.clone().into()));
            }
        }
        if let Some(f) = self.fusion {
            out.push(("fusion.glrm".into(), f.into()));
        }
        if let Some(m) = &self.svm {
            out.push(("svm.glrm".into(), m.clone().into()));
        }
        out
    }

    /// Encoded container bytes per file name.
    pub fn encode(&self) -> Result<Vec<(String, Vec<u8>)>> {
        self.payloads()
            .into_iter()
            .map(|(name, p)| Ok((name, container::encode(&p)?)))
            .collect()
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        for (name, bytes) in self.encode()? {
            crate::write_atomic(&dir.join(name), &bytes)?;
        }
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let mut scalers: Vec<ScalerModel> = Vec::with_capacity(4);
        for kind in FeatureKind::ALL {
            let s = container::load_scaler(&dir.join(format!("scaler-{}.glrm", file_stem(kind))))?;
            if s.dim() != kind.dimension() {
                return Err(Error::format("scaler", format!("{kind} scaler has dimension {}", s.dim())));
            }
            scalers.push(s);
        }
        let mlp_paths = FeatureKind::ALL.map(|k| dir.join(format!("mlp-{}.glrm", file_stem(k))));
        let experts = if mlp_paths.iter().all(|p| p.exists()) {
            let mut models = Vec::with_capacity(4);
            for (kind, p) in FeatureKind::ALL.iter().zip(&mlp_paths) {
                let m = container::load_mlp(p)?;
                if m.config.input_dim != kind.dimension() || m.config.output_dim != NUM_CLASSES {
                    return Err(Error::format("mlp", format!("{} has the wrong shape", p.display())));
                }
                models.push(m);
            }
            Some(models.try_into().expect("four experts"))
        } else {
            None
        };
        let fusion_path = dir.join("fusion.glrm");
        let fusion = fusion_path.exists().then(|| container::load_fusion(&fusion_path)).transpose()?;
        let svm_path = dir.join("svm.glrm");
        let svm = svm_path.exists().then(|| container::load_svm(&svm_path)).transpose()?;
        if experts.is_none() && svm.is_none() {
            return Err(Error::format("model directory", format!("no classifiers in {}", dir.display())));
        }
        Ok(TrainedModels {
            scalers: scalers.try_into().expect("four scalers"),
            experts,
            fusion,
            svm,
        })
    }
}

pub fn svm_input(scaled: &[Vec<f64>; 4], sel: SvmFeatures) -> Vec<f64> {
    match sel {
        SvmFeatures::Concat => scaled.concat(),
        SvmFeatures::Kind(k) => scaled[k.index()].clone(),
    }
}

/// Label (`None` when rejected) and ranking under one fusion rule.
pub fn fused_label(decisions: &[ExpertDecision], fusion: &FusionModel, rule: FusionRule) -> (Option<usize>, Vec<usize>) {
    let d = match rule {
        FusionRule::Unanimous => fuse_unanimous(decisions),
        FusionRule::Any => fuse_any(decisions, None).fused,
        FusionRule::Weighted => fuse_weighted(decisions, &fusion.weights, fusion.mode),
    };
    (d.top1, d.ranking)
}

#[derive(Default)]
struct ClassifierTally {
    metrics: MetricsBuilder,
    seconds: f64,
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

/// Metrics per classifier on the samples `idx`, with prediction seconds.
pub fn evaluate_split(
    models: &TrainedModels,
    scaled: &[[Vec<f64>; 4]],
    labels: &[usize],
    idx: &[usize],
) -> Result<Vec<(String, SplitMetrics, f64)>> {
    let mut names: Vec<String> = Vec::new();
    if models.svm.is_some() {
        names.push(SVM_NAME.into());
    }
    if models.experts.is_some() {
        names.extend(FeatureKind::ALL.map(expert_name));
        names.extend([UNANIMOUS_NAME, ANY_NAME, WEIGHTED_NAME].map(String::from));
    }
    let mut tallies: Vec<ClassifierTally> = names.iter().map(|_| ClassifierTally::default()).collect();
    let svm_sel = models.svm_features();
    for &i in idx {
        let (x, truth) = (&scaled[i], labels[i]);
        let mut slot = 0;
        if let (Some(m), Some(sel)) = (&models.svm, svm_sel) {
            let (p, secs) = timed(|| m.predict(&svm_input(x, sel)));
            let p = p?;
            tallies[0].metrics.record(truth, Some(p.label), &p.ranking(), None);
            tallies[0].seconds += secs;
            slot = 1;
        }
        if let Some(experts) = &models.experts {
            let mut decisions = Vec::with_capacity(4);
            let mut expert_secs = 0.0;
            for ((m, kind), xs) in experts.iter().zip(FeatureKind::ALL).zip(x) {
                let (scores, secs) = timed(|| m.forward(xs));
                let d = ExpertDecision::new(kind, scores?);
                let t = &mut tallies[slot + kind.index()];
                t.metrics.record(truth, Some(d.label), &ranking(d.scores.values()), None);
                t.seconds += secs;
                expert_secs += secs;
                decisions.push(d);
            }
            let fusion = models.fusion.ok_or_else(|| Error::config("expert models need fusion settings"))?;
            let (u, secs_u) = timed(|| fuse_unanimous(&decisions));
            let (a, secs_a) = timed(|| fuse_any(&decisions, Some(truth)));
            let (w, secs_w) = timed(|| fuse_weighted(&decisions, &fusion.weights, fusion.mode));
            let base = slot + 4;
            tallies[base].metrics.record(truth, u.top1, &u.ranking, None);
            tallies[base].seconds += expert_secs + secs_u;
            tallies[base + 1].metrics.record(truth, a.fused.top1, &a.fused.ranking, a.oracle_hit);
            tallies[base + 1].seconds += expert_secs + secs_a;
            tallies[base + 2].metrics.record(truth, w.top1, &w.ranking, None);
            tallies[base + 2].seconds += expert_secs + secs_w;
        }
    }
    Ok(names
        .into_iter()
        .zip(tallies)
        .map(|(n, t)| (n, t.metrics.finish(), t.seconds))
        .collect())
}

/// Data prepared for training: scaled features, labels and the split.
pub struct Prepared {
    pub raw: Vec<Features>,
    pub labels: Vec<usize>,
    pub split: Split,
}

pub fn prepare(cfg: &PipelineConfig) -> Result<Prepared> {
    cfg.validate()?;
    let (images, labels) = load_dataset(cfg)?;
    let split = dataset::split(&labels, &cfg.split_spec()?)?;
    let raw = extract_features(&images)?;
    Ok(Prepared { raw, labels, split })
}

/// Result of a training run before anything is written to disk.
pub struct RunOutput {
    pub models: TrainedModels,
    pub report: EvalReport,
}

fn labelled<'a>(xs: &'a [Vec<f64>], labels: &[usize], idx: &[usize]) -> Vec<(&'a [f64], usize)> {
    idx.iter().map(|&i| (xs[i].as_slice(), labels[i])).collect()
}

fn expert_accuracy(model: &MlpModel, data: &[(&[f64], usize)]) -> Result<f64> {
    let mut hits = 0usize;
    for (x, l) in data {
        hits += usize::from(model.predict(x)?.0 == *l);
    }
    Ok(hits as f64 / data.len().max(1) as f64)
}

struct SvmFit {
    model: SvmModel,
    c: f64,
    /// `(C, selection accuracy)` per grid point.
    search: Vec<(f64, f64)>,
}

fn train_svm(cfg: &PipelineConfig, train: &[(&[f64], usize)], selection: &[(&[f64], usize)]) -> Result<SvmFit> {
    let params = |c: f64| SvmParams {
        tol: cfg.svm.tol,
        ..SvmParams::new(cfg.svm.scheme, cfg.svm.kernel(), c)
    };
    let Some(grid) = &cfg.svm.c_grid else {
        return Ok(SvmFit {
            model: svm::train_multiclass(train, &params(cfg.svm.c))?,
            c: cfg.svm.c,
            search: Vec::new(),
        });
    };
    let mut grid = grid.clone();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let fitted: Vec<(f64, SvmModel, f64)> = grid
        .par_iter()
        .map(|&c| {
            let m = svm::train_multiclass(train, &params(c))?;
            let acc = svm::accuracy(&m, selection)?;
            Ok((c, m, acc))
        })
        .collect::<Result<_>>()?;
    let search = fitted.iter().map(|(c, _, a)| (*c, *a)).collect();
    // highest selection accuracy, smallest C on ties
    let best = fitted
        .into_iter()
        .reduce(|best, x| if x.2 > best.2 { x } else { best })
        .expect("non-empty grid");
    Ok(SvmFit {
        model: best.1,
        c: best.0,
        search,
    })
}

/// Fits scalers, experts, fusion weights and the SVM on `prep`, then
/// evaluates everything on the test and training splits.
pub fn train_and_evaluate(cfg: &PipelineConfig, prep: &Prepared) -> Result<RunOutput> {
    let Prepared { raw, labels, split } = prep;
    let per_kind: Vec<Vec<&[f64]>> = (0..4)
        .map(|k| split.train.iter().map(|&i| raw[i][k].values()).collect())
        .collect();
    let scalers: Vec<ScalerModel> = per_kind
        .iter()
        .map(|rows| ScalerModel::fit(rows, cfg.scaler.clamp))
        .collect::<Result<_>>()?;
    let scalers: [ScalerModel; 4] = scalers.try_into().expect("four scalers");
    let partial = TrainedModels {
        scalers,
        experts: None,
        fusion: None,
        svm: None,
    };
    let scaled: Vec<[Vec<f64>; 4]> = raw.par_iter().map(|f| partial.scale(f)).collect::<Result<_>>()?;

    let want_mlp = cfg.classifier != ClassifierSelection::Svm;
    let want_svm = cfg.classifier != ClassifierSelection::MlpEnsemble;

    let train_experts = || -> Result<Option<Vec<(MlpModel, f64)>>> {
        if !want_mlp {
            return Ok(None);
        }
        FeatureKind::ALL
            .par_iter()
            .map(|&kind| {
                let xs: Vec<Vec<f64>> = scaled.iter().map(|s| s[kind.index()].clone()).collect();
                let data = labelled(&xs, labels, &split.train);
                let mlp_cfg = MlpConfig {
                    epochs: cfg.mlp.epochs,
                    learning_rate: cfg.mlp.learning_rate,
                    momentum: cfg.mlp.momentum,
                    seed: cfg.seed.wrapping_add(kind.index() as u64 + 1),
                    ..MlpConfig::new(kind.dimension(), cfg.mlp.hidden_for(kind))
                };
                let (m, secs) = timed(|| mlp::train(&data, &mlp_cfg));
                Ok((m?, secs))
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    };
    let train_svm_model = || -> Result<Option<(SvmFit, f64)>> {
        if !want_svm {
            return Ok(None);
        }
        let xs: Vec<Vec<f64>> = scaled.iter().map(|s| svm_input(s, cfg.svm.features)).collect();
        let train = labelled(&xs, labels, &split.train);
        let selection = labelled(&xs, labels, &split.selection);
        let (fit, secs) = timed(|| train_svm(cfg, &train, &selection));
        Ok(Some((fit?, secs)))
    };
    let (experts, svm_fit) = rayon::join(train_experts, train_svm_model);
    let (experts, svm_fit) = (experts?, svm_fit?);

    let mut train_secs: Vec<(String, f64)> = Vec::new();
    let (expert_models, fusion) = match experts {
        Some(fitted) => {
            let (weights, secs) = timed(|| -> Result<FusionWeights> {
                match cfg.fusion.weights {
                    WeightSource::Published => Ok(FusionWeights::published()),
                    WeightSource::Uniform => Ok(FusionWeights::uniform()),
                    WeightSource::Derived => {
                        let mut acc = [0.0; 4];
                        for (kind, (m, _)) in FeatureKind::ALL.iter().zip(&fitted) {
                            let xs: Vec<Vec<f64>> = split
                                .selection
                                .iter()
                                .map(|&i| scaled[i][kind.index()].clone())
                                .collect();
                            let sel: Vec<(&[f64], usize)> =
                                xs.iter().zip(&split.selection).map(|(x, &i)| (x.as_slice(), labels[i])).collect();
                            acc[kind.index()] = expert_accuracy(m, &sel)?;
                        }
                        Ok(derive_weights(acc)?)
                    }
                }
            });
            let weights = weights?;
            let total: f64 = fitted.iter().map(|(_, s)| s).sum::<f64>() + secs;
            for (kind, (_, s)) in FeatureKind::ALL.iter().zip(&fitted) {
                train_secs.push((expert_name(*kind), *s));
            }
            for name in [UNANIMOUS_NAME, ANY_NAME, WEIGHTED_NAME] {
                train_secs.push((name.into(), total));
            }
            let models: Vec<MlpModel> = fitted.into_iter().map(|(m, _)| m).collect();
            (
                Some(models.try_into().expect("four experts")),
                Some(FusionModel {
                    mode: cfg.fusion.mode,
                    weights,
                }),
            )
        }
        None => (None, None),
    };
    let mut report = EvalReport {
        seed: cfg.seed,
        classes_present: {
            let mut seen = [false; NUM_CLASSES];
            labels.iter().for_each(|&l| seen[l] = true);
            seen.iter().filter(|&&s| s).count()
        },
        fusion_weights: fusion.map(|f| f.weights.as_array()),
        ..EvalReport::default()
    };
    let svm_model = svm_fit.map(|(fit, secs)| {
        report.svm_c = Some(fit.c);
        report.svm_c_search = fit.search;
        train_secs.push((SVM_NAME.into(), secs));
        fit.model
    });
    let models = TrainedModels {
        experts: expert_models,
        fusion,
        svm: svm_model,
        ..partial
    };
    report.classifiers = build_classifier_reports(&models, &scaled, labels, split)?;
    for c in &mut report.classifiers {
        if let (Some(t), Some((_, secs))) = (&mut c.timing, train_secs.iter().find(|(n, _)| *n == c.name)) {
            t.train_seconds = *secs;
        }
    }
    Ok(RunOutput { models, report })
}

fn mlp_parameters(m: &MlpModel) -> usize {
    m.parameter_count()
}

fn svm_parameters(m: &SvmModel) -> usize {
    m.machines
        .iter()
        .map(|(_, b)| b.coef.len() * (1 + m.dim) + 1)
        .sum()
}

/// Evaluates `models` on the test and training splits and adds model sizes.
pub fn build_classifier_reports(
    models: &TrainedModels,
    scaled: &[[Vec<f64>; 4]],
    labels: &[usize],
    split: &Split,
) -> Result<Vec<ClassifierReport>> {
    let test = evaluate_split(models, scaled, labels, &split.test)?;
    let training = evaluate_split(models, scaled, labels, &split.train)?;
    let encoded = models.encode()?;
    let bytes_of = |name: &str| encoded.iter().find(|(n, _)| n == name).map_or(0, |(_, b)| b.len());
    let ensemble_bytes: usize = FeatureKind::ALL
        .iter()
        .map(|k| bytes_of(&format!("mlp-{}.glrm", file_stem(*k))))
        .sum::<usize>()
        + bytes_of("fusion.glrm");
    let ensemble_params: usize = models.experts.as_ref().map_or(0, |e| e.iter().map(mlp_parameters).sum());
    let mut out = Vec::with_capacity(test.len());
    for ((name, test_m, secs), (_, train_m, _)) in test.into_iter().zip(training) {
        let (parameters, support_vectors, storage_bytes) = if name == SVM_NAME {
            let m = models.svm.as_ref().expect("svm present");
            (svm_parameters(m), Some(m.support_vector_count()), bytes_of("svm.glrm"))
        } else if let Some(kind) = FeatureKind::ALL.iter().find(|k| expert_name(**k) == name) {
            let m = &models.experts.as_ref().expect("experts present")[kind.index()];
            (mlp_parameters(m), None, bytes_of(&format!("mlp-{}.glrm", file_stem(*kind))))
        } else {
            (ensemble_params, None, ensemble_bytes)
        };
        let per_sample = if test_m.samples == 0 { 0.0 } else { secs / test_m.samples as f64 };
        out.push(ClassifierReport {
            name,
            test: test_m,
            training: train_m,
            parameters,
            support_vectors,
            storage_bytes,
            timing: Some(Timing {
                train_seconds: 0.0,
                predict_seconds_per_sample: per_sample,
            }),
        });
    }
    Ok(out)
}

/// Files written by [`run_pipeline`], relative to the output directory.
pub const REPORT_JSON: &str = "report.json";
pub const REPORT_TXT: &str = "report.txt";
pub const REPORT_ROWS: &str = "report.csv";
pub const TIMINGS_JSON: &str = "timings.json";
pub const MODELS_DIR: &str = "models";

#[derive(Serialize, Deserialize)]
struct TimingsFile {
    timings: Vec<(String, Timing)>,
}

pub fn report_to_json(report: &EvalReport) -> Result<String> {
    serde_json::to_string_pretty(report).map_err(|e| Error::format("report", e.to_string()))
}

pub fn write_report(dir: &Path, report: &EvalReport) -> Result<()> {
    crate::write_atomic(&dir.join(REPORT_JSON), report_to_json(report)?.as_bytes())?;
    crate::write_atomic(&dir.join(REPORT_TXT), report.render_text().as_bytes())?;
    crate::write_atomic(&dir.join(REPORT_ROWS), report.render_rows().as_bytes())?;
    let timings = serde_json::to_string_pretty(&TimingsFile {
        timings: report.timings(),
    })
    .map_err(|e| Error::format("timings", e.to_string()))?;
    crate::write_atomic(&dir.join(TIMINGS_JSON), timings.as_bytes())
}

/// Reads `report.json`, attaching `timings.json` when present.
pub fn read_report(dir: &Path) -> Result<EvalReport> {
    let path = dir.join(REPORT_JSON);
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let mut report: EvalReport = serde_json::from_str(&text).map_err(|e| Error::format("report", e.to_string()))?;
    if let Ok(t) = std::fs::read_to_string(dir.join(TIMINGS_JSON)) {
        if let Ok(t) = serde_json::from_str::<TimingsFile>(&t) {
            report.attach_timings(&t.timings);
        }
    }
    Ok(report)
}

/// Full run: load data, split, extract, train, evaluate, then persist
/// models under `<output_dir>/models` and the report next to them.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<RunOutput> {
    let prep = prepare(cfg)?;
    let out = train_and_evaluate(cfg, &prep)?;
    out.models.save(&models_dir(&cfg.output_dir))?;
    write_report(&cfg.output_dir, &out.report)?;
    Ok(out)
}

pub fn models_dir(output_dir: &Path) -> PathBuf {
    output_dir.join(MODELS_DIR)
}

/// Re-evaluates saved models on the configured dataset and split.
pub fn evaluate_saved(cfg: &PipelineConfig, model_dir: &Path) -> Result<EvalReport> {
    let models = TrainedModels::load(model_dir)?;
    let prep = prepare(cfg)?;
    let scaled: Vec<[Vec<f64>; 4]> = prep.raw.par_iter().map(|f| models.scale(f)).collect::<Result<_>>()?;
    let mut seen = [false; NUM_CLASSES];
    prep.labels.iter().for_each(|&l| seen[l] = true);
    Ok(EvalReport {
        seed: cfg.seed,
        classes_present: seen.iter().filter(|&&s| s).count(),
        fusion_weights: models.fusion.map(|f| f.weights.as_array()),
        svm_c: None,
        svm_c_search: Vec::new(),
        classifiers: build_classifier_reports(&models, &scaled, &prep.labels, &prep.split)?,
    })
}
