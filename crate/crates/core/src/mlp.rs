//! Three-layer sigmoid perceptron trained by online backpropagation with
//! momentum on the sum-of-squared-errors loss.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{argmax, Error, Result, NUM_CLASSES};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MlpConfig {
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub output_dim: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl MlpConfig {
    /// Learning rate 0.8, momentum 0.7, 49 outputs, 100 epochs, seed 0.
    pub fn new(input_dim: usize, hidden_dim: usize) -> Self {
        MlpConfig {
            input_dim,
            hidden_dim,
            output_dim: NUM_CLASSES,
            learning_rate: 0.8,
            momentum: 0.7,
            epochs: 100,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 || self.hidden_dim == 0 || self.output_dim == 0 {
            return Err(Error::InvalidConfig("layer sizes must be at least 1"));
        }
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(Error::InvalidConfig("learning rate must be positive"));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::InvalidConfig("momentum must lie in [0, 1)"));
        }
        Ok(())
    }
}

/// Network parameters. Matrices are row-major: `w1` is `hidden × input`,
/// `w2` is `output × hidden`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MlpModel {
    pub config: MlpConfig,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

/// Gradient (or update) with the same shapes as the model parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpGradient {
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

/// Sigmoid output activations, one per class.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SoftScores(pub Vec<f64>);

impl SoftScores {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Maximum response, lowest index on ties.
    pub fn label(&self) -> usize {
        argmax(&self.0)
    }
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + libm::exp(-x))
}

impl MlpGradient {
    fn zeros(cfg: &MlpConfig) -> Self {
        MlpGradient {
            w1: vec![0.0; cfg.hidden_dim * cfg.input_dim],
            b1: vec![0.0; cfg.hidden_dim],
            w2: vec![0.0; cfg.output_dim * cfg.hidden_dim],
            b2: vec![0.0; cfg.output_dim],
        }
    }
}

struct Activations {
    hidden: Vec<f64>,
    output: Vec<f64>,
}

impl MlpModel {
    /// Weights and biases drawn uniformly from `[-0.5, 0.5]` in the order
    /// `w1, b1, w2, b2`.
    pub fn init(config: MlpConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        Ok(Self::init_with(config, &mut rng))
    }

    fn init_with(config: MlpConfig, rng: &mut ChaCha8Rng) -> Self {
        let mut draw = |n: usize| -> Vec<f64> { (0..n).map(|_| rng.gen_range(-0.5..=0.5)).collect() };
        let w1 = draw(config.hidden_dim * config.input_dim);
        let b1 = draw(config.hidden_dim);
        let w2 = draw(config.output_dim * config.hidden_dim);
        let b2 = draw(config.output_dim);
        MlpModel {
            config,
            w1,
            b1,
            w2,
            b2,
        }
    }

    /// All-zero parameters.
    pub fn zeros(config: MlpConfig) -> Self {
        let g = MlpGradient::zeros(&config);
        MlpModel {
            config,
            w1: g.w1,
            b1: g.b1,
            w2: g.w2,
            b2: g.b2,
        }
    }

    pub fn parameter_count(&self) -> usize {
        self.w1.len() + self.b1.len() + self.w2.len() + self.b2.len()
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.config.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.config.input_dim,
                found: x.len(),
            });
        }
        Ok(())
    }

    fn activate(&self, x: &[f64]) -> Activations {
        let (ni, nh) = (self.config.input_dim, self.config.hidden_dim);
        let hidden: Vec<f64> = (0..nh)
            .map(|j| {
                let row = &self.w1[j * ni..(j + 1) * ni];
                sigmoid(dot(row, x) + self.b1[j])
            })
            .collect();
        let output = (0..self.config.output_dim)
            .map(|k| {
                let row = &self.w2[k * nh..(k + 1) * nh];
                sigmoid(dot(row, &hidden) + self.b2[k])
            })
            .collect();
        Activations { hidden, output }
    }

    pub fn forward(&self, x: &[f64]) -> Result<SoftScores> {
        self.check_input(x)?;
        Ok(SoftScores(self.activate(x).output))
    }

    pub fn predict(&self, x: &[f64]) -> Result<(usize, SoftScores)> {
        let scores = self.forward(x)?;
        Ok((scores.label(), scores))
    }

    /// `½‖t − y‖²` for one sample.
    pub fn loss(&self, x: &[f64], target: &[f64]) -> Result<f64> {
        let y = self.forward(x)?;
        Ok(half_sq_error(&y.0, target))
    }

    /// Exact gradient of `½‖t − y‖²` with respect to every parameter.
    pub fn gradient(&self, x: &[f64], target: &[f64]) -> Result<MlpGradient> {
        self.check_input(x)?;
        if target.len() != self.config.output_dim {
            return Err(Error::DimensionMismatch {
                expected: self.config.output_dim,
                found: target.len(),
            });
        }
        let mut g = MlpGradient::zeros(&self.config);
        let act = self.activate(x);
        self.backprop(x, target, &act, &mut g);
        Ok(g)
    }

    fn backprop(&self, x: &[f64], target: &[f64], act: &Activations, g: &mut MlpGradient) {
        let (ni, nh, no) = (
            self.config.input_dim,
            self.config.hidden_dim,
            self.config.output_dim,
        );
        // output deltas: dE/dz2 = (y - t) y (1 - y)
        for k in 0..no {
            let y = act.output[k];
            g.b2[k] = (y - target[k]) * y * (1.0 - y);
        }
        for k in 0..no {
            let dk = g.b2[k];
            for (gw, &h) in g.w2[k * nh..(k + 1) * nh].iter_mut().zip(&act.hidden) {
                *gw = dk * h;
            }
        }
        for j in 0..nh {
            let back: f64 = (0..no).map(|k| g.b2[k] * self.w2[k * nh + j]).sum();
            let h = act.hidden[j];
            let dj = back * h * (1.0 - h);
            g.b1[j] = dj;
            for (gw, &xi) in g.w1[j * ni..(j + 1) * ni].iter_mut().zip(x) {
                *gw = dj * xi;
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn half_sq_error(y: &[f64], t: &[f64]) -> f64 {
    0.5 * y.iter().zip(t).map(|(a, b)| (b - a) * (b - a)).sum::<f64>()
}

fn one_hot(label: usize, n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n];
    t[label] = 1.0;
    t
}

fn check_data<X: AsRef<[f64]>>(data: &[(X, usize)], cfg: &MlpConfig) -> Result<()> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    for (x, label) in data {
        let x = x.as_ref();
        if x.len() != cfg.input_dim {
            return Err(Error::DimensionMismatch {
                expected: cfg.input_dim,
                found: x.len(),
            });
        }
        if *label >= cfg.output_dim {
            return Err(Error::BadLabel(*label));
        }
    }
    Ok(())
}

/// Trains a network; see [`train_with_history`].
pub fn train<X: AsRef<[f64]>>(data: &[(X, usize)], cfg: &MlpConfig) -> Result<MlpModel> {
    train_impl(data, cfg, None)
}

/// Trains a network and returns the total training loss `Σ ½‖t − y‖²`
/// measured after each epoch.
///
/// Parameters are initialized from `cfg.seed`; the same generator then
/// shuffles the sample order at the start of every epoch. Each sample
/// updates the weights immediately with
/// `Δ ← −lr·∇ + momentum·Δ_prev`, targets being one-hot.
pub fn train_with_history<X: AsRef<[f64]>>(
    data: &[(X, usize)],
    cfg: &MlpConfig,
) -> Result<(MlpModel, Vec<f64>)> {
    let mut history = Vec::with_capacity(cfg.epochs);
    let model = train_impl(data, cfg, Some(&mut history))?;
    Ok((model, history))
}

fn train_impl<X: AsRef<[f64]>>(
    data: &[(X, usize)],
    cfg: &MlpConfig,
    mut history: Option<&mut Vec<f64>>,
) -> Result<MlpModel> {
    check_data(data, cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut model = MlpModel::init_with(cfg.clone(), &mut rng);
    let targets: Vec<Vec<f64>> = data
        .iter()
        .map(|(_, l)| one_hot(*l, cfg.output_dim))
        .collect();
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut grad = MlpGradient::zeros(cfg);
    let mut delta = MlpGradient::zeros(cfg);
    let (lr, mom) = (cfg.learning_rate, cfg.momentum);

    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let x = data[i].0.as_ref();
            let act = model.activate(x);
            model.backprop(x, &targets[i], &act, &mut grad);
            step(&mut model.w1, &mut delta.w1, &grad.w1, lr, mom);
            step(&mut model.b1, &mut delta.b1, &grad.b1, lr, mom);
            step(&mut model.w2, &mut delta.w2, &grad.w2, lr, mom);
            step(&mut model.b2, &mut delta.b2, &grad.b2, lr, mom);
        }
        if let Some(h) = history.as_deref_mut() {
            let total = data
                .iter()
                .zip(&targets)
                .map(|((x, _), t)| half_sq_error(&model.activate(x.as_ref()).output, t))
                .sum();
            h.push(total);
        }
    }
    Ok(model)
}

fn step(params: &mut [f64], delta: &mut [f64], grad: &[f64], lr: f64, mom: f64) {
    for ((p, d), g) in params.iter_mut().zip(delta.iter_mut()).zip(grad) {
        *d = -lr * g + mom * *d;
        *p += *d;
    }
}
