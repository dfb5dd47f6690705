use alloc::vec;

use super::{FeatureKind, FeatureVector};
use crate::image::{trace_chains, BinaryImage};

const BLOCKS: usize = 5;

/// Per-block Freeman code histograms over a 5×5 partition of the image.
///
/// Each chain step is counted in the block holding the pixel it leaves from.
/// Layout: blocks in raster order, codes 0..7 within a block.
pub fn extract_chain_histogram(img: &BinaryImage) -> FeatureVector {
    let (w, h) = (img.width(), img.height());
    let mut values = vec![0.0; BLOCKS * BLOCKS * 8];
    for chain in trace_chains(img) {
        for ((row, col), code) in chain.steps() {
            let block = (row * BLOCKS / h) * BLOCKS + col * BLOCKS / w;
            values[block * 8 + code as usize] += 1.0;
        }
    }
    FeatureVector {
        kind: FeatureKind::ChainHistogram,
        values,
    }
}
