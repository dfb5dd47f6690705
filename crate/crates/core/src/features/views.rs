use alloc::vec::Vec;

use super::{FeatureKind, FeatureVector};
use crate::image::{thin, BinaryImage};
use crate::{Error, Result};

const POINTS: usize = 11;

/// Top, bottom, left and right silhouette profiles of the thinned glyph,
/// 11 points each.
///
/// If thinning erases the glyph entirely (Zhang–Suen removes isolated 2×2
/// blocks) the unthinned image is used.
pub fn extract_views(img: &BinaryImage) -> Result<FeatureVector> {
    extract_views_with(img, true)
}

/// View features with thinning optional.
///
/// Sample columns are `left + round(i·(W−1)/10)` for `i = 0..=10` (rows
/// likewise). Each extreme coordinate is its offset from the box origin over
/// `extent − 1`; a degenerate extent and a sampled line with no object pixel
/// both give 0. Order: top, bottom, left, right.
pub fn extract_views_with(img: &BinaryImage, thinned: bool) -> Result<FeatureVector> {
    if img.is_empty() {
        return Err(Error::EmptyImage);
    }
    let skeleton;
    let src = if thinned {
        skeleton = thin(img);
        if skeleton.is_empty() {
            img
        } else {
            &skeleton
        }
    } else {
        img
    };
    let bb = src.bounding_box().ok_or(Error::EmptyImage)?;
    let (w, h) = (bb.width(), bb.height());
    let sample = |i: usize, extent: usize| (2 * i * (extent - 1) + (POINTS - 1)) / (2 * (POINTS - 1));
    let norm = |offset: usize, extent: usize| {
        if extent > 1 {
            offset as f64 / (extent - 1) as f64
        } else {
            0.0
        }
    };

    let mut values = Vec::with_capacity(4 * POINTS);
    let columns: Vec<usize> = (0..POINTS).map(|i| bb.left + sample(i, w)).collect();
    let rows: Vec<usize> = (0..POINTS).map(|i| bb.top + sample(i, h)).collect();

    for &col in &columns {
        let top = (bb.top..=bb.bottom).find(|&r| src.get(r, col));
        values.push(top.map_or(0.0, |r| norm(r - bb.top, h)));
    }
    for &col in &columns {
        let bottom = (bb.top..=bb.bottom).rev().find(|&r| src.get(r, col));
        values.push(bottom.map_or(0.0, |r| norm(r - bb.top, h)));
    }
    for &row in &rows {
        let left = (bb.left..=bb.right).find(|&c| src.get(row, c));
        values.push(left.map_or(0.0, |c| norm(c - bb.left, w)));
    }
    for &row in &rows {
        let right = (bb.left..=bb.right).rev().find(|&c| src.get(row, c));
        values.push(right.map_or(0.0, |c| norm(c - bb.left, w)));
    }
    Ok(FeatureVector {
        kind: FeatureKind::ViewBased,
        values,
    })
}
