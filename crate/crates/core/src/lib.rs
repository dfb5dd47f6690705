//! Structural-feature handwritten character recognition.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only pure
//! computation: binary-image preprocessing and contour tracing, the four
//! structural feature extractors, a sigmoid multilayer perceptron trained by
//! online backpropagation with momentum, vote-fusion rules for an ensemble of
//! perceptron experts, and a soft-margin kernel SVM trained by SMO.
//!
//! File formats, datasets and the command line live in the `glyphrec` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

mod error;

pub mod ensemble;
pub mod features;
pub mod image;
pub mod mlp;
pub mod svm;

pub use crate::error::{Error, Result};
pub use crate::features::{FeatureKind, FeatureVector};
pub use crate::image::{BinaryImage, ContourChain, GrayImage};

/// Number of character classes (36 consonants and 13 vowels).
pub const NUM_CLASSES: usize = 49;

/// Side length of a normalized glyph image.
pub const NORM_SIZE: usize = 100;

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Indices sorted by value descending, ties by lowest index.
pub fn ranking(values: &[f64]) -> alloc::vec::Vec<usize> {
    let mut idx: alloc::vec::Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    idx
}
