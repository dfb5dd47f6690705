//! Decision fusion over the four feature-wise perceptron experts.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use crate::features::FeatureKind;
use crate::mlp::SoftScores;
use crate::{Error, Result};

/// One expert's verdict on a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpertDecision {
    pub expert: FeatureKind,
    pub label: usize,
    pub scores: SoftScores,
}

impl ExpertDecision {
    /// Labels the decision with the maximum response of `scores`.
    pub fn new(expert: FeatureKind, scores: SoftScores) -> Self {
        ExpertDecision {
            expert,
            label: scores.label(),
            scores,
        }
    }
}

/// Per-expert weights indexed by [`FeatureKind::index`]
/// (chain code, shadow, view, longest run).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FusionWeights {
    weights: [f64; 4],
}

/// Published competence weights for chain code, shadow, view-based and
/// longest-run experts.
pub const PUBLISHED_WEIGHTS: [f64; 4] = [0.316, 0.303, 0.241, 0.140];

impl FusionWeights {
    pub fn new(weights: [f64; 4]) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if weights.iter().any(|w| w.is_nan() || *w < 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidWeights);
        }
        Ok(FusionWeights { weights })
    }

    pub fn published() -> Self {
        FusionWeights {
            weights: PUBLISHED_WEIGHTS,
        }
    }

    pub fn uniform() -> Self {
        FusionWeights { weights: [0.25; 4] }
    }

    pub fn get(&self, kind: FeatureKind) -> f64 {
        self.weights[kind.index()]
    }

    pub fn as_array(&self) -> [f64; 4] {
        self.weights
    }
}

/// `ω_k = d_k / Σ d`, from per-expert accuracies in [`FeatureKind::ALL`]
/// order.
pub fn derive_weights(accuracies: [f64; 4]) -> Result<FusionWeights> {
    if accuracies.iter().any(|d| !d.is_finite() || *d < 0.0) {
        return Err(Error::InvalidConfig("expert accuracies must be finite and non-negative"));
    }
    let sum: f64 = accuracies.iter().sum();
    if sum <= 0.0 {
        return Err(Error::AllZeroAccuracies);
    }
    Ok(FusionWeights {
        weights: accuracies.map(|d| d / sum),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FusedDecision {
    /// `None` when the rule rejects the sample.
    pub top1: Option<usize>,
    pub ranking: Vec<usize>,
    pub combined: Vec<f64>,
}

impl FusedDecision {
    pub fn top_k(&self, k: usize) -> &[usize] {
        &self.ranking[..k.min(self.ranking.len())]
    }

    pub fn is_rejected(&self) -> bool {
        self.top1.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum VoteMode {
    /// `d_ik = 1` iff expert `k` labels the sample `i`.
    BinaryVotes,
    /// `d_ik` is expert `k`'s sigmoid response for class `i`.
    SoftScores,
}

impl FromStr for VoteMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary" | "binary-votes" => Ok(VoteMode::BinaryVotes),
            "soft" | "soft-scores" => Ok(VoteMode::SoftScores),
            _ => Err(Error::InvalidConfig("unknown vote mode")),
        }
    }
}

impl fmt::Display for VoteMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VoteMode::BinaryVotes => "binary-votes",
            VoteMode::SoftScores => "soft-scores",
        })
    }
}

fn summed_scores(decisions: &[ExpertDecision]) -> Vec<f64> {
    let n = decisions.first().map_or(0, |d| d.scores.0.len());
    let mut sum = vec![0.0; n];
    for d in decisions {
        for (s, v) in sum.iter_mut().zip(&d.scores.0) {
            *s += v;
        }
    }
    sum
}

fn rank_by(primary: &[f64], secondary: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..primary.len()).collect();
    idx.sort_by(|&a, &b| {
        primary[b]
            .total_cmp(&primary[a])
            .then(secondary[b].total_cmp(&secondary[a]))
            .then(a.cmp(&b))
    });
    idx
}

/// Moves `front` (in its given order) to the head of `ranking`.
fn promote(ranking: &mut Vec<usize>, front: &[usize]) {
    ranking.retain(|c| !front.contains(c));
    ranking.splice(0..0, front.iter().copied());
}

/// Accepts a label only when every expert agrees; otherwise rejects.
/// The ranking follows the summed soft scores, with an accepted label first.
pub fn fuse_unanimous(decisions: &[ExpertDecision]) -> FusedDecision {
    let combined = summed_scores(decisions);
    let mut ranking = rank_by(&combined, &combined);
    let top1 = decisions
        .first()
        .map(|d| d.label)
        .filter(|&l| decisions.iter().all(|d| d.label == l));
    if let Some(l) = top1 {
        promote(&mut ranking, &[l]);
    }
    FusedDecision {
        top1,
        ranking,
        combined,
    }
}

/// Result of any-vote fusion.
#[derive(Debug, Clone, PartialEq)]
pub struct AnyVoteDecision {
    pub fused: FusedDecision,
    /// Distinct expert labels, ascending.
    pub candidates: Vec<usize>,
    /// Whether the true label is among the candidates, when one was given.
    pub oracle_hit: Option<bool>,
}

/// Credits a sample when any expert names its class.
///
/// `top1` is the candidate with the largest summed soft score (lowest label
/// on ties); the ranking lists the candidates first, then the other classes
/// by summed score. `oracle_hit` reports candidate-set membership of
/// `true_label`.
pub fn fuse_any(decisions: &[ExpertDecision], true_label: Option<usize>) -> AnyVoteDecision {
    let combined = summed_scores(decisions);
    let mut ranking = rank_by(&combined, &combined);
    let mut candidates: Vec<usize> = decisions.iter().map(|d| d.label).collect();
    candidates.sort_unstable();
    candidates.dedup();
    let top1 = candidates.iter().copied().reduce(|best, c| {
        match combined[c].total_cmp(&combined[best]) {
            Ordering::Greater => c,
            _ => best,
        }
    });
    let mut ordered = candidates.clone();
    ordered.sort_by(|&a, &b| combined[b].total_cmp(&combined[a]).then(a.cmp(&b)));
    promote(&mut ranking, &ordered);
    let oracle_hit = true_label.map(|t| candidates.contains(&t));
    AnyVoteDecision {
        fused: FusedDecision {
            top1,
            ranking,
            combined,
        },
        candidates,
        oracle_hit,
    }
}

/// Weighted majority: `combined_i = Σ_k ω_k d_ik`, decision `argmax_i`.
///
/// In binary-vote mode at most four classes get a non-zero combined value;
/// the remaining ranks are ordered by summed soft scores. Ties fall to the
/// lowest class index.
pub fn fuse_weighted(decisions: &[ExpertDecision], weights: &FusionWeights, mode: VoteMode) -> FusedDecision {
    let soft = summed_scores(decisions);
    let mut combined = vec![0.0; soft.len()];
    for d in decisions {
        let w = weights.get(d.expert);
        match mode {
            VoteMode::BinaryVotes => combined[d.label] += w,
            VoteMode::SoftScores => {
                for (c, s) in combined.iter_mut().zip(&d.scores.0) {
                    *c += w * s;
                }
            }
        }
    }
    let ranking = match mode {
        VoteMode::BinaryVotes => rank_by(&combined, &soft),
        VoteMode::SoftScores => rank_by(&combined, &combined),
    };
    FusedDecision {
        top1: ranking.first().copied(),
        ranking,
        combined,
    }
}
