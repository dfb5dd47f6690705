//! The four structural feature extractors.
//!
//! Every extractor takes a normalized [`BinaryImage`] and yields a
//! fixed-length [`FeatureVector`]:
//!
//! | kind             | length | range        |
//! |------------------|--------|--------------|
//! | `Shadow`         | 24     | `[0, 1]`     |
//! | `ChainHistogram` | 200    | counts `≥ 0` |
//! | `ViewBased`      | 44     | `[0, 1]`     |
//! | `LongestRun`     | 100    | `[0, 1]`     |

mod chain;
mod longest_run;
mod shadow;
mod views;

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::image::BinaryImage;
use crate::{Error, Result};

pub use chain::extract_chain_histogram;
pub use longest_run::{extract_longest_run, extract_longest_run_with, region_runs, RegionRuns};
pub use shadow::{extract_shadow, octant_of, shadow_in_box};
pub use views::{extract_views, extract_views_with};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum FeatureKind {
    ChainHistogram,
    Shadow,
    ViewBased,
    LongestRun,
}

impl FeatureKind {
    /// Expert order used for fusion weights: chain code, shadow, view, run.
    pub const ALL: [FeatureKind; 4] = [
        FeatureKind::ChainHistogram,
        FeatureKind::Shadow,
        FeatureKind::ViewBased,
        FeatureKind::LongestRun,
    ];

    pub const fn dimension(self) -> usize {
        match self {
            FeatureKind::Shadow => 24,
            FeatureKind::ChainHistogram => 200,
            FeatureKind::ViewBased => 44,
            FeatureKind::LongestRun => 100,
        }
    }

    pub const fn index(self) -> usize {
        match self {
            FeatureKind::ChainHistogram => 0,
            FeatureKind::Shadow => 1,
            FeatureKind::ViewBased => 2,
            FeatureKind::LongestRun => 3,
        }
    }

    pub const fn name(self) -> &'static str {
        match self {
            FeatureKind::ChainHistogram => "chain-histogram",
            FeatureKind::Shadow => "shadow",
            FeatureKind::ViewBased => "view-based",
            FeatureKind::LongestRun => "longest-run",
        }
    }

    pub fn extract(self, img: &BinaryImage) -> Result<FeatureVector> {
        match self {
            FeatureKind::Shadow => extract_shadow(img),
            FeatureKind::ChainHistogram => Ok(extract_chain_histogram(img)),
            FeatureKind::ViewBased => extract_views(img),
            FeatureKind::LongestRun => Ok(extract_longest_run(img)),
        }
    }
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FeatureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chain-histogram" | "chain" => Ok(FeatureKind::ChainHistogram),
            "shadow" => Ok(FeatureKind::Shadow),
            "view-based" | "view" | "views" => Ok(FeatureKind::ViewBased),
            "longest-run" | "run" => Ok(FeatureKind::LongestRun),
            _ => Err(Error::InvalidConfig("unknown feature kind")),
        }
    }
}

/// Feature values tagged with the extractor that produced them.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureVector {
    kind: FeatureKind,
    values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(kind: FeatureKind, values: Vec<f64>) -> Result<Self> {
        if values.len() != kind.dimension() {
            return Err(Error::DimensionMismatch {
                expected: kind.dimension(),
                found: values.len(),
            });
        }
        Ok(FeatureVector { kind, values })
    }

    pub fn kind(&self) -> FeatureKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// All four feature vectors of one image, in [`FeatureKind::ALL`] order.
pub fn extract_all(img: &BinaryImage) -> Result<[FeatureVector; 4]> {
    Ok([
        extract_chain_histogram(img),
        extract_shadow(img)?,
        extract_views(img)?,
        extract_longest_run(img),
    ])
}

impl AsRef<[f64]> for FeatureVector {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}
