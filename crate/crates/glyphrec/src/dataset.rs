//! Dataset manifests, ingestion and stratified splits.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use glyphrec_core::{GrayImage, NUM_CLASSES};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pgm::load_gray;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Isi,
    Own,
    Synthetic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Relative paths resolve against the manifest's directory.
    pub path: PathBuf,
    pub label: usize,
    pub source: Source,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub class_names: Vec<String>,
    pub entries: Vec<ManifestEntry>,
    #[serde(skip)]
    pub root: PathBuf,
}

pub fn default_class_names() -> Vec<String> {
    (0..NUM_CLASSES).map(|i| format!("class_{i:02}")).collect()
}

impl DatasetManifest {
    pub fn new(root: impl Into<PathBuf>, class_names: Vec<String>, entries: Vec<ManifestEntry>) -> Result<Self> {
        let m = DatasetManifest {
            class_names,
            entries,
            root: root.into(),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.class_names.len() != NUM_CLASSES {
            return Err(Error::config(format!(
                "manifest lists {} class names, expected {NUM_CLASSES}",
                self.class_names.len()
            )));
        }
        if self.entries.is_empty() {
            return Err(Error::NoSamples);
        }
        let mut seen = HashSet::new();
        for e in &self.entries {
            if e.label >= NUM_CLASSES {
                return Err(Error::BadLabel {
                    label: e.label as i64,
                    context: e.path.display().to_string(),
                });
            }
            if !seen.insert(&e.path) {
                return Err(Error::config(format!("duplicate manifest path {}", e.path.display())));
            }
        }
        Ok(())
    }

    pub fn resolve(&self, entry: &ManifestEntry) -> PathBuf {
        self.root.join(&entry.path)
    }

    pub fn labels(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.label).collect()
    }

    /// Loads every image, in manifest order. All failures are reported together.
    pub fn load_images(&self) -> Result<Vec<GrayImage>> {
        let results: Vec<_> = self
            .entries
            .par_iter()
            .map(|e| {
                let path = self.resolve(e);
                load_gray(&path).map_err(|err| (path, err.to_string()))
            })
            .collect();
        let mut images = Vec::with_capacity(results.len());
        let mut failures = Vec::new();
        for r in results {
            match r {
                Ok(img) => images.push(img),
                Err(f) => failures.push(f),
            }
        }
        if failures.is_empty() {
            Ok(images)
        } else {
            Err(Error::UnreadableImage(failures))
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::format("manifest", e.to_string()))
    }

    /// Writes `manifest.json` atomically; entries keep their relative paths.
    pub fn save(&self, path: &Path) -> Result<()> {
        crate::write_atomic(path, self.to_json()?.as_bytes())
    }
}

#[derive(Deserialize)]
struct CsvRow {
    path: PathBuf,
    label: i64,
    #[serde(default)]
    source: Option<Source>,
}

fn parse_manifest(path: &Path) -> Result<DatasetManifest> {
    let root = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let is_csv = path.extension().is_some_and(|x| x.eq_ignore_ascii_case("csv"));
    let (class_names, entries) = if is_csv {
        let mut entries = Vec::new();
        for (line, row) in csv::Reader::from_reader(text.as_bytes()).deserialize::<CsvRow>().enumerate() {
            let row = row.map_err(|e| Error::format("manifest", e.to_string()))?;
            if !(0..NUM_CLASSES as i64).contains(&row.label) {
                return Err(Error::BadLabel {
                    label: row.label,
                    context: format!("{} row {}", path.display(), line + 1),
                });
            }
            entries.push(ManifestEntry {
                path: row.path,
                label: row.label as usize,
                source: row.source.unwrap_or(Source::Own),
            });
        }
        (default_class_names(), entries)
    } else {
        #[derive(Deserialize)]
        struct Raw {
            #[serde(default)]
            class_names: Option<Vec<String>>,
            entries: Vec<RawEntry>,
        }
        #[derive(Deserialize)]
        struct RawEntry {
            path: PathBuf,
            label: i64,
            source: Source,
        }
        let raw: Raw = serde_json::from_str(&text).map_err(|e| Error::format("manifest", e.to_string()))?;
        let mut entries = Vec::with_capacity(raw.entries.len());
        for (i, e) in raw.entries.into_iter().enumerate() {
            if !(0..NUM_CLASSES as i64).contains(&e.label) {
                return Err(Error::BadLabel {
                    label: e.label,
                    context: format!("{} entry {i}", path.display()),
                });
            }
            entries.push(ManifestEntry {
                path: e.path,
                label: e.label as usize,
                source: e.source,
            });
        }
        (raw.class_names.unwrap_or_else(default_class_names), entries)
    };
    DatasetManifest::new(root, class_names, entries)
}

fn is_image(path: &Path) -> bool {
    path.extension()
        .and_then(|x| x.to_str())
        .is_some_and(|x| matches!(x.to_ascii_lowercase().as_str(), "pgm" | "png"))
}

fn trailing_number(name: &str) -> Option<usize> {
    let digits = name.len() - name.trim_end_matches(|c: char| c.is_ascii_digit()).len();
    name[name.len() - digits..].parse().ok()
}

fn sorted_dir(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .map(|e| e.map(|e| e.path()).map_err(|err| Error::io(dir, err)))
        .collect::<Result<Vec<_>>>()?;
    paths.sort();
    Ok(paths)
}

/// Class subfolders become labels: by trailing number when every folder
/// has a distinct one (`class_07`, `3`), otherwise by sorted name.
fn scan_directory(root: &Path) -> Result<DatasetManifest> {
    let folders: Vec<PathBuf> = sorted_dir(root)?.into_iter().filter(|p| p.is_dir()).collect();
    let names: Vec<String> = folders
        .iter()
        .map(|p| p.file_name().unwrap_or_default().to_string_lossy().into_owned())
        .collect();
    let numbered: Option<Vec<usize>> = names.iter().map(|n| trailing_number(n)).collect();
    let labels: Vec<usize> = match numbered {
        Some(nums) if nums.iter().collect::<HashSet<_>>().len() == nums.len() => nums,
        _ => (0..names.len()).collect(),
    };
    if let Some((&bad, name)) = labels.iter().zip(&names).find(|(&l, _)| l >= NUM_CLASSES) {
        return Err(Error::BadLabel {
            label: bad as i64,
            context: format!("folder {name}"),
        });
    }
    let mut class_names = default_class_names();
    let mut entries = Vec::new();
    for ((folder, name), &label) in folders.iter().zip(&names).zip(&labels) {
        class_names[label] = name.clone();
        for file in sorted_dir(folder)?.into_iter().filter(|p| p.is_file() && is_image(p)) {
            let rel = file.strip_prefix(root).unwrap_or(&file).to_path_buf();
            entries.push(ManifestEntry {
                path: rel,
                label,
                source: Source::Own,
            });
        }
    }
    DatasetManifest::new(root, class_names, entries)
}

/// Builds a validated manifest from a directory of class subfolders or a
/// manifest file (`.json`, or `.csv` with `path,label[,source]` columns).
/// Every referenced image is decoded once to catch corrupt files.
pub fn ingest(path: &Path) -> Result<DatasetManifest> {
    let manifest = read_manifest(path)?;
    manifest.load_images()?;
    Ok(manifest)
}

/// Like [`ingest`] without decoding the images.
pub fn read_manifest(path: &Path) -> Result<DatasetManifest> {
    if path.is_dir() {
        scan_directory(path)
    } else {
        parse_manifest(path)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSpec {
    pub train_fraction: f64,
    #[serde(default)]
    pub selection_fraction: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "yes")]
    pub stratified: bool,
}

fn yes() -> bool {
    true
}

impl SplitSpec {
    pub fn new(train_fraction: f64, selection_fraction: f64, seed: u64) -> Self {
        SplitSpec {
            train_fraction,
            selection_fraction,
            seed,
            stratified: true,
        }
    }

    /// Named split protocols: `isi` (3430 train / 1470 test) and `own`
    /// (1470 train / 784 test).
    pub fn preset(name: &str, seed: u64) -> Result<Self> {
        match name {
            "isi" => Ok(SplitSpec::new(3430.0 / 4900.0, 0.0, seed)),
            "own" => Ok(SplitSpec::new(1470.0 / 2254.0, 0.0, seed)),
            _ => Err(Error::config(format!("unknown split preset {name:?}"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.train_fraction > 0.0
            && self.train_fraction < 1.0
            && (0.0..1.0).contains(&self.selection_fraction)
            && self.train_fraction + self.selection_fraction < 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::config("split fractions must satisfy 0 < train, 0 ≤ selection, train + selection < 1"))
        }
    }
}

/// Indices into the manifest, each list in ascending order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub selection: Vec<usize>,
    pub test: Vec<usize>,
}

fn group_sizes(n: usize, spec: &SplitSpec) -> Option<(usize, usize)> {
    let mut train = ((n as f64 * spec.train_fraction).round() as usize).max(1);
    let mut sel = if spec.selection_fraction > 0.0 {
        ((n as f64 * spec.selection_fraction).round() as usize).max(1)
    } else {
        0
    };
    while train + sel >= n {
        if train >= sel && train > 1 {
            train -= 1;
        } else if sel > 1 {
            sel -= 1;
        } else {
            return None;
        }
    }
    Some((train, sel))
}

/// Seeded partition into train, selection and test. Stratified splits give
/// every class at least one training and one test sample, plus one
/// selection sample when a selection fraction is requested.
pub fn split(labels: &[usize], spec: &SplitSpec) -> Result<Split> {
    spec.validate()?;
    if labels.is_empty() {
        return Err(Error::NoSamples);
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        groups.entry(if spec.stratified { l } else { 0 }).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = Split::default();
    for (class, mut idx) in groups {
        let (n_train, n_sel) = group_sizes(idx.len(), spec).ok_or(Error::ClassTooSmall {
            class,
            count: idx.len(),
        })?;
        idx.shuffle(&mut rng);
        out.train.extend_from_slice(&idx[..n_train]);
        out.selection.extend_from_slice(&idx[n_train..n_train + n_sel]);
        out.test.extend_from_slice(&idx[n_train + n_sel..]);
    }
    out.train.sort_unstable();
    out.selection.sort_unstable();
    out.test.sort_unstable();
    Ok(out)
}
