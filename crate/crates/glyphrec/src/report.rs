//! Evaluation reports: accuracy, confusion matrices and model resources.

use std::fmt::Write as _;

use glyphrec_core::NUM_CLASSES;
use serde::{Deserialize, Serialize};

/// Metrics of one classifier on one split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitMetrics {
    pub samples: usize,
    /// Rejected samples count as errors.
    pub top1: f64,
    pub top5: f64,
    /// Fraction of samples that received a label.
    pub coverage: f64,
    /// Any-vote only: fraction whose true label is among the expert labels.
    pub oracle: Option<f64>,
    /// `confusion[true][predicted]` over accepted samples.
    pub confusion: Vec<Vec<u32>>,
    /// Rejected samples per true class; row sum plus this equals the class count.
    pub rejected: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct MetricsBuilder {
    samples: usize,
    top1: usize,
    top5: usize,
    accepted: usize,
    oracle: Option<usize>,
    confusion: Vec<Vec<u32>>,
    rejected: Vec<u32>,
}

impl Default for MetricsBuilder {
    fn default() -> Self {
        MetricsBuilder {
            samples: 0,
            top1: 0,
            top5: 0,
            accepted: 0,
            oracle: None,
            confusion: vec![vec![0; NUM_CLASSES]; NUM_CLASSES],
            rejected: vec![0; NUM_CLASSES],
        }
    }
}

impl MetricsBuilder {
    pub fn record(&mut self, truth: usize, top1: Option<usize>, ranking: &[usize], oracle_hit: Option<bool>) {
        self.samples += 1;
        match top1 {
            Some(p) => {
                self.accepted += 1;
                self.confusion[truth][p] += 1;
                self.top1 += usize::from(p == truth);
            }
            None => self.rejected[truth] += 1,
        }
        self.top5 += usize::from(ranking.iter().take(5).any(|&c| c == truth));
        if let Some(hit) = oracle_hit {
            *self.oracle.get_or_insert(0) += usize::from(hit);
        }
    }

    pub fn finish(self) -> SplitMetrics {
        let frac = |k: usize| if self.samples == 0 { 0.0 } else { k as f64 / self.samples as f64 };
        SplitMetrics {
            samples: self.samples,
            top1: frac(self.top1),
            top5: frac(self.top5),
            coverage: frac(self.accepted),
            oracle: self.oracle.map(frac),
            confusion: self.confusion,
            rejected: self.rejected,
        }
    }
}

impl SplitMetrics {
    pub fn class_count(&self, class: usize) -> u32 {
        self.confusion[class].iter().sum::<u32>() + self.rejected[class]
    }

    pub fn trace(&self) -> u32 {
        (0..self.confusion.len()).map(|i| self.confusion[i][i]).sum()
    }
}

/// Wall-clock measurements, kept out of the persisted report so reruns
/// stay byte-identical.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub train_seconds: f64,
    pub predict_seconds_per_sample: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierReport {
    pub name: String,
    pub test: SplitMetrics,
    /// Resubstitution on the training split.
    pub training: SplitMetrics,
    /// Trainable parameters (MLP weights and biases; SVM coefficients,
    /// support vector entries and biases).
    pub parameters: usize,
    pub support_vectors: Option<usize>,
    pub storage_bytes: usize,
    #[serde(skip)]
    pub timing: Option<Timing>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EvalReport {
    pub seed: u64,
    pub classes_present: usize,
    pub fusion_weights: Option<[f64; 4]>,
    pub svm_c: Option<f64>,
    /// `(C, selection accuracy)` for each grid point tried.
    pub svm_c_search: Vec<(f64, f64)>,
    pub classifiers: Vec<ClassifierReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    TextTable,
    Rows,
}

pub fn percent(v: f64) -> String {
    format!("{:.2}%", v * 100.0)
}

const COLUMNS: [(&str, usize); 9] = [
    ("classifier", 20),
    ("test top-1", 11),
    ("test top-5", 11),
    ("coverage", 9),
    ("oracle", 8),
    ("train top-1", 12),
    ("train top-5", 12),
    ("params/SVs", 12),
    ("storage B", 10),
];

fn push_row(out: &mut String, cells: &[String]) {
    for (i, (cell, (_, width))) in cells.iter().zip(COLUMNS).enumerate() {
        if i == 0 {
            let _ = write!(out, "{cell:<width$}");
        } else {
            let _ = write!(out, " {cell:>width$}");
        }
    }
    out.push('\n');
}

impl EvalReport {
    pub fn classifier(&self, name: &str) -> Option<&ClassifierReport> {
        self.classifiers.iter().find(|c| c.name == name)
    }

    /// Test and resubstitution (training split) accuracies per classifier
    /// plus model size columns.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        push_row(&mut out, &COLUMNS.map(|(h, _)| h.to_string()));
        let rule: usize = COLUMNS.iter().map(|(_, w)| w + 1).sum::<usize>() - 1;
        out.push_str(&"-".repeat(rule));
        out.push('\n');
        for c in &self.classifiers {
            let size = match c.support_vectors {
                Some(sv) => format!("{sv} SV"),
                None => c.parameters.to_string(),
            };
            push_row(
                &mut out,
                &[
                    c.name.clone(),
                    percent(c.test.top1),
                    percent(c.test.top5),
                    percent(c.test.coverage),
                    c.test.oracle.map_or_else(|| "-".into(), percent),
                    percent(c.training.top1),
                    percent(c.training.top5),
                    size,
                    c.storage_bytes.to_string(),
                ],
            );
        }
        out
    }

    /// `classifier,split,metric,value` lines: accuracy metrics for the
    /// `test` and `training` splits, model sizes under split `model`.
    pub fn render_rows(&self) -> String {
        let mut out = String::from("classifier,split,metric,value\n");
        for c in &self.classifiers {
            for (split, m) in [("test", &c.test), ("training", &c.training)] {
                let mut metrics = vec![("top1", m.top1), ("top5", m.top5), ("coverage", m.coverage)];
                if let Some(o) = m.oracle {
                    metrics.push(("oracle", o));
                }
                for (metric, v) in metrics {
                    let _ = writeln!(out, "{},{split},{metric},{v}", c.name);
                }
            }
            let _ = writeln!(out, "{},model,parameters,{}", c.name, c.parameters);
            if let Some(sv) = c.support_vectors {
                let _ = writeln!(out, "{},model,support_vectors,{sv}", c.name);
            }
            let _ = writeln!(out, "{},model,storage_bytes,{}", c.name, c.storage_bytes);
        }
        out
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::TextTable => self.render_text(),
            ReportFormat::Rows => self.render_rows(),
        }
    }

    /// Training time and per-sample prediction time, where measured.
    pub fn render_timings(&self) -> String {
        let mut out = format!("{:<20} {:>14} {:>18}\n", "classifier", "train s", "predict ms/sample");
        for c in &self.classifiers {
            if let Some(t) = c.timing {
                let _ = writeln!(
                    out,
                    "{:<20} {:>14.3} {:>18.4}",
                    c.name,
                    t.train_seconds,
                    t.predict_seconds_per_sample * 1e3
                );
            }
        }
        out
    }

    pub fn timings(&self) -> Vec<(String, Timing)> {
        self.classifiers
            .iter()
            .filter_map(|c| c.timing.map(|t| (c.name.clone(), t)))
            .collect()
    }

    pub fn attach_timings(&mut self, timings: &[(String, Timing)]) {
        for c in &mut self.classifiers {
            c.timing = timings.iter().find(|(n, _)| *n == c.name).map(|(_, t)| *t);
        }
    }
}
