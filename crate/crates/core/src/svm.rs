//! Soft-margin kernel support vector machines.
//!
//! Binary machines solve the dual of
//! `min ½‖w‖² + c Σ ξ_i  s.t.  y_i (⟨w, φ(x_i)⟩ + b) ≥ 1 − ξ_i, ξ_i ≥ 0`
//! by sequential minimal optimization: each iteration picks the maximal
//! violating pair (first index by gradient, second by the second-order gain)
//! and solves the two-variable subproblem in closed form. Multiclass models
//! combine binary machines one-vs-rest or one-vs-one.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::{Error, Result, NUM_CLASSES};

/// Default KKT tolerance.
pub const DEFAULT_TOL: f64 = 1e-3;

/// Coefficients at or below this are not stored as support vectors.
pub const SV_THRESHOLD: f64 = 1e-8;

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "type", rename_all = "lowercase"))]
pub enum Kernel {
    /// `x·y`
    Linear,
    /// `exp(−‖x−y‖² / 2σ²)`
    Rbf { sigma: f64 },
    /// `(x·y + 1)^d`
    Poly { degree: u32 },
}

impl Kernel {
    /// RBF with `σ = √dim / 2`.
    pub fn default_rbf(dim: usize) -> Self {
        Kernel::Rbf {
            sigma: libm::sqrt(dim as f64) / 2.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Kernel::Rbf { sigma } if !sigma.is_finite() || sigma <= 0.0 => {
                Err(Error::InvalidConfig("rbf sigma must be positive"))
            }
            Kernel::Poly { degree: 0 } => Err(Error::InvalidConfig("polynomial degree must be at least 1")),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: y.len(),
            });
        }
        Ok(self.eval_unchecked(x, y))
    }

    fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        match *self {
            Kernel::Linear => dot(x, y),
            Kernel::Rbf { sigma } => {
                let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                libm::exp(-d2 / (2.0 * sigma * sigma))
            }
            Kernel::Poly { degree } => libm::pow(dot(x, y) + 1.0, degree as f64),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// One trained two-class machine. `coef[i] = α_i · y_i`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SvmBinaryModel {
    pub kernel: Kernel,
    pub c: f64,
    pub bias: f64,
    pub support_vectors: Vec<Vec<f64>>,
    pub coef: Vec<f64>,
}

impl SvmBinaryModel {
    pub fn dim(&self) -> Option<usize> {
        self.support_vectors.first().map(Vec::len)
    }

    /// `f(x) = Σ α_i y_i K(sv_i, x) + b`.
    pub fn decision(&self, x: &[f64]) -> Result<f64> {
        if let Some(d) = self.dim() {
            if d != x.len() {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: x.len(),
                });
            }
        }
        Ok(self.decision_unchecked(x))
    }

    fn decision_unchecked(&self, x: &[f64]) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.coef)
            .map(|(sv, a)| a * self.kernel.eval_unchecked(sv, x))
            .sum::<f64>()
            + self.bias
    }
}

/// Solver state exposed for verification.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryTrainInfo {
    /// `α_i` for every training sample, in input order.
    pub alphas: Vec<f64>,
    /// Dual objective `Σα − ½ΣΣ α_i α_j y_i y_j K_ij`, initial value first,
    /// then after every iteration.
    pub dual_objective: Vec<f64>,
    pub iterations: usize,
    /// Final maximal KKT violation `m(α) − M(α)`.
    pub gap: f64,
}

/// Full symmetric kernel matrix over a sample set.
struct Gram {
    n: usize,
    k: Vec<f64>,
}

impl Gram {
    fn new<X: AsRef<[f64]>>(xs: &[X], kernel: &Kernel) -> Self {
        let n = xs.len();
        let mut k = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = kernel.eval_unchecked(xs[i].as_ref(), xs[j].as_ref());
                k[i * n + j] = v;
                k[j * n + i] = v;
            }
        }
        Gram { n, k }
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        self.k[i * self.n + j]
    }
}

struct Solution {
    alphas: Vec<f64>,
    bias: f64,
    dual_objective: Vec<f64>,
    iterations: usize,
    gap: f64,
}

/// SMO over the samples `idx` of `gram`, with labels `y` (±1) aligned to
/// `idx`.
fn smo(gram: &Gram, idx: &[usize], y: &[f64], c: f64, tol: f64, max_iter: usize) -> Solution {
    let n = idx.len();
    let k = |a: usize, b: usize| gram.get(idx[a], idx[b]);
    let mut alpha = vec![0.0; n];
    // gradient of ½αᵀQα − eᵀα, Q_ij = y_i y_j K_ij
    let mut grad = vec![-1.0; n];
    let objective = |alpha: &[f64], grad: &[f64]| -> f64 {
        -0.5 * alpha.iter().zip(grad).map(|(a, g)| a * (g - 1.0)).sum::<f64>()
    };
    let mut history = vec![0.0];
    let mut iterations = 0;
    let mut gap;

    let in_up = |a: f64, yi: f64| (yi > 0.0 && a < c) || (yi < 0.0 && a > 0.0);
    let in_low = |a: f64, yi: f64| (yi > 0.0 && a > 0.0) || (yi < 0.0 && a < c);

    loop {
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = usize::MAX;
        for t in 0..n {
            if in_up(alpha[t], y[t]) {
                let v = -y[t] * grad[t];
                if v > gmax {
                    gmax = v;
                    i_sel = t;
                }
            }
        }
        let mut gmax2 = f64::NEG_INFINITY;
        let mut j_sel = usize::MAX;
        let mut best_gain = f64::INFINITY;
        for t in 0..n {
            if !in_low(alpha[t], y[t]) {
                continue;
            }
            let v = y[t] * grad[t];
            if v > gmax2 {
                gmax2 = v;
            }
            if i_sel == usize::MAX {
                continue;
            }
            let b = gmax + v;
            if b > 0.0 {
                let mut a = k(i_sel, i_sel) + k(t, t) - 2.0 * k(i_sel, t);
                if a <= 0.0 {
                    a = TAU;
                }
                let gain = -(b * b) / a;
                if gain <= best_gain {
                    best_gain = gain;
                    j_sel = t;
                }
            }
        }
        gap = gmax + gmax2;
        if i_sel == usize::MAX || j_sel == usize::MAX || gap < tol || iterations >= max_iter {
            break;
        }
        iterations += 1;

        let (i, j) = (i_sel, j_sel);
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let kij = k(i, j);
        if y[i] != y[j] {
            let mut quad = k(i, i) + k(j, j) - 2.0 * kij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let mut quad = k(i, i) + k(j, j) - 2.0 * kij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += y[t] * (y[i] * k(t, i) * di + y[j] * k(t, j) * dj);
        }
        history.push(objective(&alpha, &grad));
    }

    // b = −ρ, ρ averaged over free vectors or the midpoint of the feasible range
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut sum_free, mut n_free) = (0.0, 0usize);
    for t in 0..n {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    let rho = if n_free > 0 {
        sum_free / n_free as f64
    } else {
        (ub + lb) / 2.0
    };

    Solution {
        alphas: alpha,
        bias: -rho,
        dual_objective: history,
        iterations,
        gap,
    }
}

fn check_binary<X: AsRef<[f64]>>(data: &[(X, i8)], kernel: &Kernel, c: f64) -> Result<usize> {
    if !c.is_finite() || c <= 0.0 {
        return Err(Error::NonPositiveC(c));
    }
    kernel.validate()?;
    let dim = data.first().ok_or(Error::EmptyDataset)?.0.as_ref().len();
    let (mut pos, mut neg) = (false, false);
    for (x, y) in data {
        if x.as_ref().len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: x.as_ref().len(),
            });
        }
        match y {
            1 => pos = true,
            -1 => neg = true,
            _ => return Err(Error::InvalidConfig("binary labels must be -1 or +1")),
        }
    }
    if !(pos && neg) {
        return Err(Error::SingleClassData);
    }
    Ok(dim)
}

fn max_iterations(n: usize) -> usize {
    (100 * n).max(10_000_000)
}

fn assemble<X: AsRef<[f64]>>(
    xs: &[X],
    idx: &[usize],
    y: &[f64],
    sol: &Solution,
    kernel: Kernel,
    c: f64,
) -> SvmBinaryModel {
    let mut support_vectors = Vec::new();
    let mut coef = Vec::new();
    for (a, (&i, &yi)) in sol.alphas.iter().zip(idx.iter().zip(y)) {
        if *a > SV_THRESHOLD {
            support_vectors.push(xs[i].as_ref().to_vec());
            coef.push(a * yi);
        }
    }
    SvmBinaryModel {
        kernel,
        c,
        bias: sol.bias,
        support_vectors,
        coef,
    }
}

/// Trains one machine on labels ±1.
pub fn train_binary<X: AsRef<[f64]>>(
    data: &[(X, i8)],
    kernel: Kernel,
    c: f64,
    tol: f64,
) -> Result<SvmBinaryModel> {
    train_binary_traced(data, kernel, c, tol).map(|(m, _)| m)
}

/// [`train_binary`] plus the full dual solution and objective trace.
pub fn train_binary_traced<X: AsRef<[f64]>>(
    data: &[(X, i8)],
    kernel: Kernel,
    c: f64,
    tol: f64,
) -> Result<(SvmBinaryModel, BinaryTrainInfo)> {
    check_binary(data, &kernel, c)?;
    let xs: Vec<&[f64]> = data.iter().map(|(x, _)| x.as_ref()).collect();
    let y: Vec<f64> = data.iter().map(|(_, l)| *l as f64).collect();
    let gram = Gram::new(&xs, &kernel);
    let idx: Vec<usize> = (0..data.len()).collect();
    let sol = smo(&gram, &idx, &y, c, tol, max_iterations(data.len()));
    let model = assemble(&xs, &idx, &y, &sol, kernel, c);
    let info = BinaryTrainInfo {
        alphas: sol.alphas,
        dual_objective: sol.dual_objective,
        iterations: sol.iterations,
        gap: sol.gap,
    };
    Ok((model, info))
}

/// Indices of samples violating the soft-margin KKT conditions by more than
/// `tol`:
/// `α = 0 ⇒ y f ≥ 1 − tol`, `0 < α < c ⇒ |y f − 1| ≤ tol`,
/// `α = c ⇒ y f ≤ 1 + tol`.
pub fn kkt_violations<X: AsRef<[f64]>>(
    data: &[(X, i8)],
    alphas: &[f64],
    model: &SvmBinaryModel,
    tol: f64,
) -> Vec<usize> {
    let c = model.c;
    let mut bad = Vec::new();
    for (i, ((x, y), &a)) in data.iter().zip(alphas).enumerate() {
        let margin = *y as f64 * model.decision_unchecked(x.as_ref());
        let ok = if a <= SV_THRESHOLD {
            margin >= 1.0 - tol
        } else if a >= c - SV_THRESHOLD {
            margin <= 1.0 + tol
        } else {
            libm::fabs(margin - 1.0) <= tol
        };
        if !ok {
            bad.push(i);
        }
    }
    bad
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Scheme {
    OneVsRest,
    OneVsOne,
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one-vs-rest" | "ovr" => Ok(Scheme::OneVsRest),
            "one-vs-one" | "ovo" => Ok(Scheme::OneVsOne),
            _ => Err(Error::InvalidConfig("unknown multiclass scheme")),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::OneVsRest => "one-vs-rest",
            Scheme::OneVsOne => "one-vs-one",
        })
    }
}

/// What a binary machine separates; the first class is the +1 side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum MachineTarget {
    Rest(usize),
    Pair(usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SvmModel {
    pub scheme: Scheme,
    pub num_classes: usize,
    pub dim: usize,
    pub machines: Vec<(MachineTarget, SvmBinaryModel)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmPrediction {
    pub label: usize,
    /// Decision values (one-vs-rest; `-inf` for classes without a machine)
    /// or vote counts (one-vs-one).
    pub scores: Vec<f64>,
    /// Summed signed decision values per class; the one-vs-one tie-breaker.
    pub margins: Vec<f64>,
}

impl SvmPrediction {
    /// Classes by score, then margin, then lowest index.
    pub fn ranking(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.scores.len()).collect();
        idx.sort_by(|&a, &b| {
            self.scores[b]
                .total_cmp(&self.scores[a])
                .then(self.margins[b].total_cmp(&self.margins[a]))
                .then(a.cmp(&b))
        });
        idx
    }
}

impl SvmModel {
    pub fn support_vector_count(&self) -> usize {
        self.machines.iter().map(|(_, m)| m.support_vectors.len()).sum()
    }

    pub fn predict(&self, x: &[f64]) -> Result<SvmPrediction> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        let n = self.num_classes;
        match self.scheme {
            Scheme::OneVsRest => {
                let mut scores = vec![f64::NEG_INFINITY; n];
                for (target, m) in &self.machines {
                    if let MachineTarget::Rest(cls) = *target {
                        scores[cls] = m.decision_unchecked(x);
                    }
                }
                let label = crate::argmax(&scores);
                Ok(SvmPrediction {
                    label,
                    margins: scores.clone(),
                    scores,
                })
            }
            Scheme::OneVsOne => {
                let mut votes = vec![0.0; n];
                let mut margins = vec![0.0; n];
                for (target, m) in &self.machines {
                    if let MachineTarget::Pair(a, b) = *target {
                        let f = m.decision_unchecked(x);
                        if f >= 0.0 {
                            votes[a] += 1.0;
                        } else {
                            votes[b] += 1.0;
                        }
                        margins[a] += f;
                        margins[b] -= f;
                    }
                }
                let mut label = 0;
                for cls in 1..n {
                    let better = votes[cls] > votes[label]
                        || (votes[cls] == votes[label] && margins[cls] > margins[label]);
                    if better {
                        label = cls;
                    }
                }
                Ok(SvmPrediction {
                    label,
                    scores: votes,
                    margins,
                })
            }
        }
    }
}

/// Options for multiclass training.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmParams {
    pub scheme: Scheme,
    pub kernel: Kernel,
    pub c: f64,
    pub tol: f64,
}

impl SvmParams {
    pub fn new(scheme: Scheme, kernel: Kernel, c: f64) -> Self {
        SvmParams {
            scheme,
            kernel,
            c,
            tol: DEFAULT_TOL,
        }
    }
}

/// Trains all binary machines of a multiclass model over a 49-class head.
///
/// Classes are the distinct labels present; machines are produced in
/// ascending class (one-vs-rest) or lexicographic pair (one-vs-one) order.
/// The kernel matrix is computed once and shared by every machine.
pub fn train_multiclass<X: AsRef<[f64]>>(data: &[(X, usize)], params: &SvmParams) -> Result<SvmModel> {
    if !params.c.is_finite() || params.c <= 0.0 {
        return Err(Error::NonPositiveC(params.c));
    }
    params.kernel.validate()?;
    let dim = data.first().ok_or(Error::EmptyDataset)?.0.as_ref().len();
    let mut present = [false; NUM_CLASSES];
    for (x, l) in data {
        if x.as_ref().len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: x.as_ref().len(),
            });
        }
        if *l >= NUM_CLASSES {
            return Err(Error::BadLabel(*l));
        }
        present[*l] = true;
    }
    let classes: Vec<usize> = (0..NUM_CLASSES).filter(|&c| present[c]).collect();
    if classes.len() < 2 {
        return Err(Error::SingleClassData);
    }
    let xs: Vec<&[f64]> = data.iter().map(|(x, _)| x.as_ref()).collect();
    let gram = Gram::new(&xs, &params.kernel);

    let mut machines = Vec::new();
    let mut fit = |target: MachineTarget, idx: Vec<usize>, y: Vec<f64>| {
        let sol = smo(&gram, &idx, &y, params.c, params.tol, max_iterations(idx.len()));
        let m = assemble(&xs, &idx, &y, &sol, params.kernel, params.c);
        machines.push((target, m));
    };
    match params.scheme {
        Scheme::OneVsRest => {
            let idx: Vec<usize> = (0..data.len()).collect();
            for &cls in &classes {
                let y = data.iter().map(|(_, l)| if *l == cls { 1.0 } else { -1.0 }).collect();
                fit(MachineTarget::Rest(cls), idx.clone(), y);
            }
        }
        Scheme::OneVsOne => {
            for (p, &a) in classes.iter().enumerate() {
                for &b in &classes[p + 1..] {
                    let idx: Vec<usize> = (0..data.len())
                        .filter(|&i| data[i].1 == a || data[i].1 == b)
                        .collect();
                    let y = idx.iter().map(|&i| if data[i].1 == a { 1.0 } else { -1.0 }).collect();
                    fit(MachineTarget::Pair(a, b), idx, y);
                }
            }
        }
    }
    Ok(SvmModel {
        scheme: params.scheme,
        num_classes: NUM_CLASSES,
        dim,
        machines,
    })
}

/// Top-1 accuracy of `model` on labelled data.
pub fn accuracy<X: AsRef<[f64]>>(model: &SvmModel, data: &[(X, usize)]) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptySelection);
    }
    let mut hits = 0usize;
    for (x, l) in data {
        if model.predict(x.as_ref())?.label == *l {
            hits += 1;
        }
    }
    Ok(hits as f64 / data.len() as f64)
}

/// Picks the soft-margin value with the best selection-set accuracy; ties
/// go to the smallest `c`. Returns the chosen value and the accuracy of
/// every grid entry in ascending `c` order.
pub fn select_c<X: AsRef<[f64]>>(
    train: &[(X, usize)],
    selection: &[(X, usize)],
    grid: &[f64],
    kernel: Kernel,
    scheme: Scheme,
) -> Result<(f64, Vec<(f64, f64)>)> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if selection.is_empty() {
        return Err(Error::EmptySelection);
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut scores = Vec::with_capacity(sorted.len());
    let mut best: Option<(f64, f64)> = None;
    for &c in &sorted {
        let model = train_multiclass(train, &SvmParams::new(scheme, kernel, c))?;
        let acc = accuracy(&model, selection)?;
        scores.push((c, acc));
        if best.is_none_or(|(_, a)| acc > a) {
            best = Some((c, acc));
        }
    }
    Ok((best.map(|(c, _)| c).unwrap_or(sorted[0]), scores))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn kernel_values() {
        assert_eq!(Kernel::Linear.eval(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 5.0);
        assert_eq!(Kernel::Rbf { sigma: 0.3 }.eval(&[4.0, -1.0], &[4.0, -1.0]).unwrap(), 1.0);
        assert_eq!(Kernel::Poly { degree: 2 }.eval(&[1.0, 0.0], &[1.0, 1.0]).unwrap(), 4.0);
        assert!(matches!(
            Kernel::Linear.eval(&[1.0], &[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    proptest! {
        #[test]
        fn kernels_are_symmetric(
            x in proptest::collection::vec(-1.0f64..1.0, 5),
            y in proptest::collection::vec(-1.0f64..1.0, 5),
            sigma in 0.5f64..4.0,
            degree in 1u32..5,
        ) {
            for k in [Kernel::Linear, Kernel::Rbf { sigma }, Kernel::Poly { degree }] {
                prop_assert_eq!(k.eval(&x, &y).unwrap(), k.eval(&y, &x).unwrap());
            }
            let r = Kernel::Rbf { sigma }.eval(&x, &y).unwrap();
            prop_assert!(r > 0.0 && r <= 1.0);
        }
    }

    fn two_points() -> Vec<(Vec<f64>, i8)> {
        vec![(vec![-1.0], -1), (vec![1.0], 1)]
    }

    #[test]
    fn two_point_analytic_solution() {
        let data = two_points();
        let (m, info) = train_binary_traced(&data, Kernel::Linear, 1e6, 1e-3).unwrap();
        // max margin: w = 1, b = 0, α = (½, ½)
        assert!(m.bias.abs() < 1e-6);
        let w: f64 = m.support_vectors.iter().zip(&m.coef).map(|(sv, a)| a * sv[0]).sum();
        assert!((w - 1.0).abs() < 1e-6);
        for x in [-3.0, -1.0, 0.0, 0.5, 1.0, 2.0] {
            assert!((m.decision(&[x]).unwrap() - x).abs() < 1e-6);
        }
        for a in &info.alphas {
            assert!((a - 0.5).abs() < 1e-6);
        }
        assert!(kkt_violations(&data, &info.alphas, &m, 1e-3).is_empty());
    }

    #[test]
    fn binary_errors() {
        let one: Vec<(Vec<f64>, i8)> = vec![(vec![0.0], 1), (vec![1.0], 1)];
        assert_eq!(train_binary(&one, Kernel::Linear, 1.0, 1e-3), Err(Error::SingleClassData));
        assert_eq!(train_binary(&two_points(), Kernel::Linear, 0.0, 1e-3), Err(Error::NonPositiveC(0.0)));
    }

    #[test]
    fn conflicting_duplicates_are_capped() {
        let data = vec![(vec![0.5, 0.5], 1i8), (vec![0.5, 0.5], -1), (vec![0.0, 1.0], 1), (vec![1.0, 0.0], -1)];
        let c = 0.05;
        let (m, info) = train_binary_traced(&data, Kernel::Linear, c, 1e-3).unwrap();
        assert!(info.alphas.iter().all(|&a| a <= c + 1e-15 && a >= 0.0));
        assert!(m.coef.iter().all(|a| a.abs() <= c + 1e-15));
        assert!(kkt_violations(&data, &info.alphas, &m, 1e-3).is_empty());
    }

    fn blobs(seed: u64, n: usize, spread: f64) -> Vec<(Vec<f64>, i8)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|i| {
                let y: i8 = if i % 2 == 0 { 1 } else { -1 };
                let centre = y as f64;
                (
                    vec![centre + rng.gen_range(-spread..spread), centre + rng.gen_range(-spread..spread)],
                    y,
                )
            })
            .collect()
    }

    #[test]
    fn separable_blobs_fit_perfectly() {
        let data = blobs(1, 60, 0.6);
        let m = train_binary(&data, Kernel::Linear, 100.0, 1e-3).unwrap();
        for (x, y) in &data {
            assert_eq!(m.decision(x).unwrap() > 0.0, *y > 0);
        }
    }

    #[test]
    fn kkt_dual_and_monotone_objective_on_noisy_data() {
        for (seed, kernel) in [
            (2, Kernel::Linear),
            (3, Kernel::Rbf { sigma: 0.7 }),
            (4, Kernel::Poly { degree: 3 }),
        ] {
            let data = blobs(seed, 80, 1.6);
            let (m, info) = train_binary_traced(&data, kernel, 2.0, 1e-3).unwrap();
            assert!(kkt_violations(&data, &info.alphas, &m, 1e-3).is_empty(), "{kernel:?}");
            let dual: f64 = info.alphas.iter().zip(&data).map(|(a, (_, y))| a * *y as f64).sum();
            assert!(dual.abs() < 1e-8);
            for w in info.dual_objective.windows(2) {
                assert!(w[1] >= w[0] - 1e-12 * w[0].abs().max(1.0));
            }
            assert!(info.alphas.iter().all(|&a| (0.0..=2.0).contains(&a)));
        }
    }

    fn three_class(seed: u64, per: usize) -> Vec<(Vec<f64>, usize)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let centres = [(0.0, 0.0), (3.0, 0.0), (0.0, 3.0)];
        (0..3 * per)
            .map(|i| {
                let (cx, cy) = centres[i % 3];
                (vec![cx + rng.gen_range(-0.8..0.8), cy + rng.gen_range(-0.8..0.8)], (i % 3) * 7)
            })
            .collect()
    }

    #[test]
    fn multiclass_machine_counts() {
        let data = three_class(5, 10);
        let ovo = train_multiclass(&data, &SvmParams::new(Scheme::OneVsOne, Kernel::Linear, 1.0)).unwrap();
        assert_eq!(ovo.machines.len(), 3);
        let ovr = train_multiclass(&data, &SvmParams::new(Scheme::OneVsRest, Kernel::Linear, 1.0)).unwrap();
        assert_eq!(ovr.machines.len(), 3);
        for (x, l) in &data {
            assert_eq!(ovo.predict(x).unwrap().label, *l);
            assert_eq!(ovr.predict(x).unwrap().label, *l);
        }
        let p = ovr.predict(&data[0].0).unwrap();
        assert_eq!(p.scores.len(), 49);
        assert_eq!(p.scores[1], f64::NEG_INFINITY);
    }

    #[test]
    fn all_49_classes_give_49_rest_machines() {
        let data: Vec<(Vec<f64>, usize)> = (0..49)
            .flat_map(|c| {
                let a = c as f64 * 0.128;
                [(vec![libm::cos(a), libm::sin(a)], c), (vec![1.01 * libm::cos(a), 1.01 * libm::sin(a)], c)]
            })
            .collect();
        let m = train_multiclass(&data, &SvmParams::new(Scheme::OneVsRest, Kernel::Linear, 1.0)).unwrap();
        assert_eq!(m.machines.len(), 49);
    }

    #[test]
    fn two_class_schemes_agree() {
        let data: Vec<(Vec<f64>, usize)> = blobs(8, 40, 1.2)
            .into_iter()
            .map(|(x, y)| (x, if y > 0 { 4 } else { 9 }))
            .collect();
        let ovo = train_multiclass(&data, &SvmParams::new(Scheme::OneVsOne, Kernel::Linear, 1.0)).unwrap();
        let ovr = train_multiclass(&data, &SvmParams::new(Scheme::OneVsRest, Kernel::Linear, 1.0)).unwrap();
        assert_eq!(ovo.machines.len(), 1);
        assert_eq!(ovr.machines.len(), 2);
        // the two rest machines are sign mirrors of each other
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..50 {
            let x = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            let f4 = ovr.machines[0].1.decision(&x).unwrap();
            let f9 = ovr.machines[1].1.decision(&x).unwrap();
            assert!((f4 + f9).abs() < 1e-6);
            assert_eq!(ovo.predict(&x).unwrap().label, ovr.predict(&x).unwrap().label);
        }
    }

    #[test]
    fn ovo_vote_counting() {
        // a model with hand-set machines: 0 beats 1, 0 beats 2, 1 beats 2
        let fixed = |bias: f64| SvmBinaryModel {
            kernel: Kernel::Linear,
            c: 1.0,
            bias,
            support_vectors: vec![vec![0.0]],
            coef: vec![0.0],
        };
        let model = SvmModel {
            scheme: Scheme::OneVsOne,
            num_classes: 49,
            dim: 1,
            machines: vec![
                (MachineTarget::Pair(0, 1), fixed(1.0)),
                (MachineTarget::Pair(0, 2), fixed(1.0)),
                (MachineTarget::Pair(1, 2), fixed(1.0)),
            ],
        };
        let p = model.predict(&[0.0]).unwrap();
        assert_eq!(&p.scores[..3], &[2.0, 1.0, 0.0]);
        assert_eq!(p.label, 0);
        assert_eq!(&p.ranking()[..2], &[0, 1]);
    }

    #[test]
    fn two_point_prediction_sign() {
        let data = vec![(vec![-1.0], 2usize), (vec![1.0], 5usize)];
        let m = train_multiclass(&data, &SvmParams::new(Scheme::OneVsOne, Kernel::Linear, 1e6)).unwrap();
        assert_eq!(m.predict(&[-4.0]).unwrap().label, 2);
        assert_eq!(m.predict(&[3.0]).unwrap().label, 5);
    }

    #[test]
    fn select_c_rules() {
        let data = three_class(9, 12);
        let (train, sel) = data.split_at(24);
        let (c, scores) = select_c(train, sel, &[0.5], Kernel::Linear, Scheme::OneVsOne).unwrap();
        assert_eq!(c, 0.5);
        assert_eq!(scores.len(), 1);
        let (c, scores) = select_c(train, sel, &[100.0, 1.0, 0.01], Kernel::Linear, Scheme::OneVsOne).unwrap();
        let best = scores.iter().map(|s| s.1).fold(0.0, f64::max);
        let first_best = scores.iter().find(|s| s.1 == best).unwrap().0;
        assert_eq!(c, first_best);
        let empty: [(Vec<f64>, usize); 0] = [];
        assert_eq!(select_c(train, sel, &[], Kernel::Linear, Scheme::OneVsOne), Err(Error::EmptyGrid));
        assert_eq!(select_c(train, &empty, &[1.0], Kernel::Linear, Scheme::OneVsOne), Err(Error::EmptySelection));
    }

    #[test]
    fn select_c_matches_exhaustive_rerun() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let data: Vec<(Vec<f64>, usize)> = (0..90)
            .map(|i| {
                let l = i % 3;
                let c = l as f64;
                (vec![c + rng.gen_range(-1.5..1.5), rng.gen_range(-1.0..1.0)], l)
            })
            .collect();
        let (train, sel) = data.split_at(60);
        let grid = [0.01, 0.1, 1.0, 10.0];
        let (c, _) = select_c(train, sel, &grid, Kernel::Rbf { sigma: 1.0 }, Scheme::OneVsRest).unwrap();
        let mut best = (f64::NAN, -1.0);
        for &g in &grid {
            let m = train_multiclass(train, &SvmParams::new(Scheme::OneVsRest, Kernel::Rbf { sigma: 1.0 }, g)).unwrap();
            let hits = sel.iter().filter(|(x, l)| m.predict(x).unwrap().label == *l).count();
            let acc = hits as f64 / sel.len() as f64;
            if acc > best.1 {
                best = (g, acc);
            }
        }
        assert_eq!(c, best.0);
    }
}
