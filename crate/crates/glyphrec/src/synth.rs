//! Synthetic stroke glyphs.
//!
//! Each class owns a fixed template of three strokes (line segments and
//! circular arcs between points of a 3×3 anchor grid). A sample applies a
//! random affine jitter of up to ±10% to the template, renders it with a
//! round pen onto a 100×100 canvas, then flips each pixel with probability
//! `noise`.

use std::f64::consts::PI;
use std::path::Path;

use glyphrec_core::{BinaryImage, GrayImage, NORM_SIZE, NUM_CLASSES};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dataset::{default_class_names, DatasetManifest, ManifestEntry, Source};
use crate::error::{Error, Result};

/// Pen radius in pixels.
pub const PEN_RADIUS: f64 = 3.5;
const ANCHORS: [f64; 3] = [0.2, 0.5, 0.8];
const TEMPLATE_SEED: u64 = 0x5EED_6C79;
const MAX_OVERLAP: f64 = 0.55;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stroke {
    Line { from: (f64, f64), to: (f64, f64) },
    /// Angles in radians, y pointing down.
    Arc { center: (f64, f64), radius: f64, start: f64, sweep: f64 },
}

impl Stroke {
    /// Points along the stroke in unit coordinates, at most `step` apart.
    fn polyline(&self, step: f64) -> Vec<(f64, f64)> {
        match *self {
            Stroke::Line { from, to } => {
                let len = (to.0 - from.0).hypot(to.1 - from.1);
                let n = (len / step).ceil().max(1.0) as usize;
                (0..=n)
                    .map(|i| {
                        let t = i as f64 / n as f64;
                        (from.0 + t * (to.0 - from.0), from.1 + t * (to.1 - from.1))
                    })
                    .collect()
            }
            Stroke::Arc { center, radius, start, sweep } => {
                let n = (radius * sweep.abs() / step).ceil().max(1.0) as usize;
                (0..=n)
                    .map(|i| {
                        let a = start + sweep * i as f64 / n as f64;
                        (center.0 + radius * a.cos(), center.1 + radius * a.sin())
                    })
                    .collect()
            }
        }
    }
}

fn anchor(rng: &mut ChaCha8Rng) -> (f64, f64) {
    (ANCHORS[rng.gen_range(0..3)], ANCHORS[rng.gen_range(0..3)])
}

fn random_stroke(rng: &mut ChaCha8Rng) -> Stroke {
    if rng.gen_bool(0.5) {
        let from = anchor(rng);
        let mut to = anchor(rng);
        while to == from {
            to = anchor(rng);
        }
        Stroke::Line { from, to }
    } else {
        Stroke::Arc {
            center: anchor(rng),
            radius: [0.15, 0.3][rng.gen_range(0..2)],
            start: f64::from(rng.gen_range(0..8u8)) * PI / 4.0,
            sweep: f64::from(rng.gen_range(2..=6u8)) * PI / 4.0,
        }
    }
}

type Affine = [[f64; 3]; 2];

const IDENTITY: Affine = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];

/// Renders strokes (unit coordinates mapped through `affine`, then scaled to
/// the canvas) with a round pen.
fn render(strokes: &[Stroke], affine: &Affine, size: usize, radius: f64) -> BinaryImage {
    let mut img = BinaryImage::blank(size, size);
    let scale = size as f64;
    let step = 0.5 / scale;
    let r2 = radius * radius;
    let reach = radius.ceil() as i64;
    for stroke in strokes {
        for (u, v) in stroke.polyline(step) {
            let x = (affine[0][0] * u + affine[0][1] * v + affine[0][2]) * scale;
            let y = (affine[1][0] * u + affine[1][1] * v + affine[1][2]) * scale;
            let (cx, cy) = (x.floor() as i64, y.floor() as i64);
            for py in cy - reach..=cy + reach {
                for px in cx - reach..=cx + reach {
                    if px < 0 || py < 0 || px >= size as i64 || py >= size as i64 {
                        continue;
                    }
                    let (dx, dy) = (px as f64 + 0.5 - x, py as f64 + 0.5 - y);
                    if dx * dx + dy * dy <= r2 {
                        img.set(py as usize, px as usize, true);
                    }
                }
            }
        }
    }
    img
}

fn overlap(a: &BinaryImage, b: &BinaryImage) -> f64 {
    let (mut both, mut either) = (0usize, 0usize);
    for r in 0..a.height() {
        for c in 0..a.width() {
            let (x, y) = (a.get(r, c), b.get(r, c));
            both += usize::from(x && y);
            either += usize::from(x || y);
        }
    }
    if either == 0 {
        1.0
    } else {
        both as f64 / either as f64
    }
}

/// The fixed stroke templates of all 49 classes.
///
/// Templates are drawn from a constant seed and kept only when their
/// rendering overlaps every earlier class by at most 55% (intersection
/// over union), so classes are visibly distinct.
pub fn templates() -> &'static [Vec<Stroke>] {
    static TEMPLATES: std::sync::OnceLock<Vec<Vec<Stroke>>> = std::sync::OnceLock::new();
    TEMPLATES.get_or_init(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(TEMPLATE_SEED);
        let mut out: Vec<Vec<Stroke>> = Vec::with_capacity(NUM_CLASSES);
        let mut shapes: Vec<BinaryImage> = Vec::with_capacity(NUM_CLASSES);
        while out.len() < NUM_CLASSES {
            let strokes: Vec<Stroke> = (0..3).map(|_| random_stroke(&mut rng)).collect();
            let shape = render(&strokes, &IDENTITY, 48, 2.0);
            if shapes.iter().all(|s| overlap(s, &shape) <= MAX_OVERLAP) {
                out.push(strokes);
                shapes.push(shape);
            }
        }
        out
    })
}

fn jitter(rng: &mut ChaCha8Rng) -> Affine {
    let mut m = IDENTITY;
    for row in &mut m {
        for v in row.iter_mut().take(2) {
            *v += rng.gen_range(-0.1..=0.1);
        }
    }
    // keep the template centred, then shift by up to ±10%
    for row in &mut m {
        row[2] = 0.5 - 0.5 * (row[0] + row[1]) + rng.gen_range(-0.1..=0.1);
    }
    m
}

/// Renders one sample; `rng` drives both jitter and noise.
pub fn render_sample(class: usize, noise: f64, rng: &mut ChaCha8Rng) -> BinaryImage {
    let affine = jitter(rng);
    let mut img = render(&templates()[class], &affine, NORM_SIZE, PEN_RADIUS);
    if noise > 0.0 {
        for r in 0..NORM_SIZE {
            for c in 0..NORM_SIZE {
                if rng.gen::<f64>() < noise {
                    img.set(r, c, !img.get(r, c));
                }
            }
        }
    }
    img
}

#[derive(Debug, Clone)]
pub struct SynthDataset {
    /// Grayscale renderings (object 0, background 255) in manifest order.
    pub images: Vec<GrayImage>,
    pub manifest: DatasetManifest,
}

impl SynthDataset {
    pub fn labels(&self) -> Vec<usize> {
        self.manifest.labels()
    }

    /// Writes `class_NN/sample_NNNN.pgm` files and `manifest.json` under `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        for (img, entry) in self.images.iter().zip(&self.manifest.entries) {
            let path = dir.join(&entry.path);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
            crate::write_atomic(&path, &crate::pgm::encode_pgm(img))?;
        }
        self.manifest.save(&dir.join("manifest.json"))
    }
}

/// Generates `per_class` samples of each of the first `classes` classes,
/// class-major. Sample `k` draws from its own ChaCha8 stream of `seed`, so
/// output does not depend on thread scheduling.
pub fn synth_glyphs(classes: usize, per_class: usize, noise: f64, seed: u64) -> Result<SynthDataset> {
    if classes > NUM_CLASSES {
        return Err(Error::config(format!("at most {NUM_CLASSES} classes")));
    }
    if !(0.0..1.0).contains(&noise) {
        return Err(Error::config("noise must lie in [0, 1)"));
    }
    let n = classes * per_class;
    let images: Vec<GrayImage> = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            render_sample(k / per_class, noise, &mut rng).to_gray()
        })
        .collect();
    let entries = (0..n)
        .map(|k| ManifestEntry {
            path: format!("class_{:02}/sample_{:04}.pgm", k / per_class, k % per_class).into(),
            label: k / per_class,
            source: Source::Synthetic,
        })
        .collect();
    let manifest = DatasetManifest {
        class_names: default_class_names(),
        entries,
        root: Default::default(),
    };
    if n > 0 {
        manifest.validate()?;
    }
    Ok(SynthDataset { images, manifest })
}
