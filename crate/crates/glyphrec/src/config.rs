//! Pipeline configuration, read from TOML.
//!
//! ```toml
//! seed = 7
//! output_dir = "run"
//! classifier = "all"            # mlp-ensemble | svm | all
//!
//! [dataset]                     # exactly one of `manifest` / `synth`
//! manifest = "data/manifest.json"
//! # synth = { classes = 10, per_class = 80, noise = 0.02 }
//!
//! [split]                       # or: preset = "isi" | "own"
//! train_fraction = 0.7
//! selection_fraction = 0.1
//! stratified = true
//!
//! [scaler]
//! clamp = true
//!
//! [mlp]
//! epochs = 100
//! learning_rate = 0.8
//! momentum = 0.7
//! hidden = { chain-histogram = 60, shadow = 40, view-based = 40, longest-run = 50 }
//!
//! [svm]
//! kernel = "rbf"                # linear | rbf | poly
//! sigma = 4.0                   # default: sqrt(dimension) / 2
//! degree = 2
//! c = 10.0
//! c_grid = [1.0, 10.0, 100.0]   # optional; picks C on the selection split
//! scheme = "one-vs-rest"        # or one-vs-one
//! features = "concat"           # or a single feature kind
//! tol = 1e-3
//!
//! [fusion]
//! weights = "derived"           # derived | published | uniform
//! mode = "soft-scores"          # or binary-votes
//! rule = "weighted"             # unanimous | any | weighted (used by predict)
//! ```
//!
//! Relative paths resolve against the config file's directory.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use glyphrec_core::ensemble::VoteMode;
use glyphrec_core::svm::{Kernel, Scheme};
use glyphrec_core::FeatureKind;
use serde::{Deserialize, Serialize};

use crate::dataset::SplitSpec;
use crate::error::{Error, Result};

macro_rules! keyword_enum {
    ($(#[$m:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
        pub enum $name {
            $(#[serde(rename = $text)] $variant),+
        }

        impl FromStr for $name {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($text => Ok($name::$variant),)+
                    _ => Err(Error::config(format!(
                        concat!("unknown ", stringify!($name), " {:?}"), s
                    ))),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($name::$variant => $text),+ })
            }
        }
    };
}

keyword_enum!(
    /// Which classifiers a run trains and evaluates.
    ClassifierSelection { MlpEnsemble => "mlp-ensemble", Svm => "svm", All => "all" }
);

keyword_enum!(
    /// Fusion rule used for single-image prediction.
    FusionRule { Unanimous => "unanimous", Any => "any", Weighted => "weighted" }
);

keyword_enum!(KernelKind { Linear => "linear", Rbf => "rbf", Poly => "poly" });

keyword_enum!(WeightSource { Derived => "derived", Published => "published", Uniform => "uniform" });

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    pub classes: usize,
    pub per_class: usize,
    #[serde(default)]
    pub noise: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub manifest: Option<PathBuf>,
    pub synth: Option<SynthSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SplitConfig {
    pub preset: Option<String>,
    pub train_fraction: f64,
    pub selection_fraction: f64,
    pub stratified: bool,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig {
            preset: None,
            train_fraction: 0.7,
            selection_fraction: 0.1,
            stratified: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScalerConfig {
    pub clamp: bool,
}

impl Default for ScalerConfig {
    fn default() -> Self {
        ScalerConfig { clamp: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MlpSection {
    pub epochs: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    /// Hidden units per expert, keyed by feature kind name.
    pub hidden: BTreeMap<String, usize>,
}

impl Default for MlpSection {
    fn default() -> Self {
        let hidden = FeatureKind::ALL
            .iter()
            .map(|k| (k.name().to_string(), default_hidden(*k)))
            .collect();
        MlpSection {
            epochs: 100,
            learning_rate: 0.8,
            momentum: 0.7,
            hidden,
        }
    }
}

/// Hidden layer sizes inside the 20–70 band, roughly growing with input size.
pub fn default_hidden(kind: FeatureKind) -> usize {
    match kind {
        FeatureKind::ChainHistogram => 60,
        FeatureKind::Shadow => 30,
        FeatureKind::ViewBased => 40,
        FeatureKind::LongestRun => 50,
    }
}

impl MlpSection {
    pub fn hidden_for(&self, kind: FeatureKind) -> usize {
        self.hidden.get(kind.name()).copied().unwrap_or_else(|| default_hidden(kind))
    }
}

/// Input of the SVM: one feature kind or all four concatenated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SvmFeatures {
    Concat,
    Kind(FeatureKind),
}

impl FromStr for SvmFeatures {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "concat" {
            return Ok(SvmFeatures::Concat);
        }
        s.parse()
            .map(SvmFeatures::Kind)
            .map_err(|_| Error::config(format!("unknown svm feature selection {s:?}")))
    }
}

impl TryFrom<String> for SvmFeatures {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SvmFeatures> for String {
    fn from(f: SvmFeatures) -> String {
        f.to_string()
    }
}

impl SvmFeatures {
    pub fn dimension(self) -> usize {
        match self {
            SvmFeatures::Concat => FeatureKind::ALL.iter().map(|k| k.dimension()).sum(),
            SvmFeatures::Kind(k) => k.dimension(),
        }
    }

    /// Recovers the feature selection from a model dimension; the four
    /// kinds and their concatenation all differ in size.
    pub fn from_dimension(dim: usize) -> Option<Self> {
        if dim == SvmFeatures::Concat.dimension() {
            return Some(SvmFeatures::Concat);
        }
        FeatureKind::ALL.into_iter().find(|k| k.dimension() == dim).map(SvmFeatures::Kind)
    }
}

impl fmt::Display for SvmFeatures {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SvmFeatures::Concat => f.write_str("concat"),
            SvmFeatures::Kind(k) => write!(f, "{k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SvmSection {
    pub kernel: KernelKind,
    pub sigma: Option<f64>,
    pub degree: u32,
    pub c: f64,
    pub c_grid: Option<Vec<f64>>,
    pub scheme: Scheme,
    pub features: SvmFeatures,
    pub tol: f64,
}

impl Default for SvmSection {
    fn default() -> Self {
        SvmSection {
            kernel: KernelKind::Linear,
            sigma: None,
            degree: 2,
            c: 1.0,
            c_grid: None,
            scheme: Scheme::OneVsRest,
            features: SvmFeatures::Concat,
            tol: glyphrec_core::svm::DEFAULT_TOL,
        }
    }
}

impl SvmSection {
    pub fn kernel(&self) -> Kernel {
        let dim = self.features.dimension();
        match self.kernel {
            KernelKind::Linear => Kernel::Linear,
            KernelKind::Rbf => match self.sigma {
                Some(sigma) => Kernel::Rbf { sigma },
                None => Kernel::default_rbf(dim),
            },
            KernelKind::Poly => Kernel::Poly { degree: self.degree },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FusionSection {
    pub weights: WeightSource,
    pub mode: VoteMode,
    pub rule: FusionRule,
}

impl Default for FusionSection {
    fn default() -> Self {
        FusionSection {
            weights: WeightSource::Derived,
            mode: VoteMode::SoftScores,
            rule: FusionRule::Weighted,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub seed: u64,
    pub output_dir: PathBuf,
    pub classifier: ClassifierSelection,
    pub dataset: DatasetConfig,
    pub split: SplitConfig,
    pub scaler: ScalerConfig,
    pub mlp: MlpSection,
    pub svm: SvmSection,
    pub fusion: FusionSection,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 0,
            output_dir: PathBuf::from("glyphrec-run"),
            classifier: ClassifierSelection::All,
            dataset: DatasetConfig::default(),
            split: SplitConfig::default(),
            scaler: ScalerConfig::default(),
            mlp: MlpSection::default(),
            svm: SvmSection::default(),
            fusion: FusionSection::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        if let Some(m) = &mut cfg.dataset.manifest {
            *m = base.join(&*m);
        }
        cfg.output_dir = base.join(&cfg.output_dir);
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn split_spec(&self) -> Result<SplitSpec> {
        let mut spec = match &self.split.preset {
            Some(name) => SplitSpec::preset(name, self.seed)?,
            None => SplitSpec::new(self.split.train_fraction, self.split.selection_fraction, self.seed),
        };
        spec.stratified = self.split.stratified;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.dataset.manifest, &self.dataset.synth) {
            (Some(_), Some(_)) => return Err(Error::config("dataset needs either manifest or synth, not both")),
            (None, None) => return Err(Error::config("dataset needs a manifest or a synth section")),
            _ => {}
        }
        self.split_spec()?.validate()?;
        if self.mlp.learning_rate.is_nan()
            || self.mlp.learning_rate <= 0.0
            || !(0.0..1.0).contains(&self.mlp.momentum)
            || self.mlp.epochs == 0
        {
            return Err(Error::config("mlp needs learning_rate > 0, momentum in [0, 1), epochs ≥ 1"));
        }
        for name in self.mlp.hidden.keys() {
            name.parse::<FeatureKind>()
                .map_err(|_| Error::config(format!("unknown feature kind {name:?} in mlp.hidden")))?;
        }
        if FeatureKind::ALL.iter().any(|&k| self.mlp.hidden_for(k) == 0) {
            return Err(Error::config("hidden layer sizes must be positive"));
        }
        if [self.svm.c, self.svm.tol].iter().any(|v| v.is_nan() || *v <= 0.0) {
            return Err(Error::config("svm needs c > 0 and tol > 0"));
        }
        if let Some(grid) = &self.svm.c_grid {
            if grid.is_empty() || grid.iter().any(|c| c.is_nan() || *c <= 0.0) {
                return Err(Error::config("svm.c_grid must be a non-empty list of positive values"));
            }
            if self.split_spec()?.selection_fraction == 0.0 {
                return Err(Error::config("svm.c_grid needs a selection split"));
            }
        }
        self.svm.kernel().validate()?;
        if self.fusion.weights == WeightSource::Derived
            && self.classifier != ClassifierSelection::Svm
            && self.split_spec()?.selection_fraction == 0.0
        {
            return Err(Error::config("derived fusion weights need a selection split"));
        }
        Ok(())
    }
}
