//! Shadow features: projection coverage on the sides of the eight triangles
//! that the two diagonals and two center lines cut from the bounding box.
//!
//! Octants are numbered clockwise starting with the one between the upward
//! center line and the north-east diagonal. Each octant triangle has a
//! corner of the box, an edge midpoint and the box center as vertices; its
//! three sides are emitted in the order half-edge (midpoint → corner),
//! half-diagonal (center → corner), half-axis (center → midpoint). Output
//! index is `3 * octant + side`.
//!
//! A side's shadow is the length of the union of the perpendicular
//! projections of the octant's object pixels (as unit squares) onto the side,
//! divided by the length the same projection gives when every pixel of the
//! octant is set. That denominator is the side length as seen by the pixel
//! grid, so a solid glyph yields exactly 1.

use alloc::vec::Vec;

use super::{FeatureKind, FeatureVector};
use crate::image::{BinaryImage, BoundingBox};
use crate::{Error, Result};

/// Octant `0..8` of pixel `(row, col)` within `bb`.
///
/// Classification uses the pixel center in exact integer arithmetic. Pixels on
/// a center line go to the octant clockwise after it, pixels on a diagonal to
/// the octant clockwise before it, and the center pixel (odd-sized boxes) to
/// octant 0.
pub fn octant_of(bb: &BoundingBox, row: usize, col: usize) -> usize {
    let (w, h) = (bb.width() as i64, bb.height() as i64);
    let u = 2 * col as i64 + 1 - (2 * bb.left as i64 + w);
    let v = 2 * bb.top as i64 + h - 2 * row as i64 - 1;
    // both scaled to a common denominator: a ~ x/half_width, b ~ y/half_height
    let a = u * h;
    let b = v * w;
    if a >= 0 && b > a {
        0
    } else if b > 0 && b <= a {
        1
    } else if a > 0 && b <= 0 && -b < a {
        2
    } else if a > 0 && -b >= a {
        3
    } else if a <= 0 && b < 0 && -b > -a {
        4
    } else if b < 0 && -b <= -a {
        5
    } else if a < 0 && b >= 0 && b < -a {
        6
    } else if a < 0 && b >= -a {
        7
    } else {
        0
    }
}

#[derive(Clone, Copy)]
struct Segment {
    origin: (f64, f64),
    dir: (f64, f64),
    len: f64,
}

impl Segment {
    fn new(a: (f64, f64), b: (f64, f64)) -> Self {
        let (dx, dy) = (b.0 - a.0, b.1 - a.1);
        let len = libm::sqrt(dx * dx + dy * dy);
        let dir = if len > 0.0 { (dx / len, dy / len) } else { (0.0, 0.0) };
        Segment { origin: a, dir, len }
    }

    /// Projection of the unit pixel square at `(row, col)`, clipped to the
    /// segment.
    fn project(&self, row: usize, col: usize) -> Option<(f64, f64)> {
        let (x, y) = (col as f64 + 0.5, row as f64 + 0.5);
        let t = (x - self.origin.0) * self.dir.0 + (y - self.origin.1) * self.dir.1;
        let half = 0.5 * (libm::fabs(self.dir.0) + libm::fabs(self.dir.1));
        let lo = (t - half).max(0.0);
        let hi = (t + half).min(self.len);
        (hi > lo).then_some((lo, hi))
    }
}

fn union_length(intervals: &mut [(f64, f64)]) -> f64 {
    intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut total = 0.0;
    let mut current: Option<(f64, f64)> = None;
    for &(lo, hi) in intervals.iter() {
        match current {
            Some((clo, chi)) if lo <= chi => current = Some((clo, chi.max(hi))),
            Some((clo, chi)) => {
                total += chi - clo;
                current = Some((lo, hi));
            }
            None => current = Some((lo, hi)),
        }
    }
    if let Some((clo, chi)) = current {
        total += chi - clo;
    }
    total
}

fn octant_sides(bb: &BoundingBox) -> [[Segment; 3]; 8] {
    let (xl, xr) = (bb.left as f64, bb.right as f64 + 1.0);
    let (yt, yb) = (bb.top as f64, bb.bottom as f64 + 1.0);
    let (cx, cy) = (0.5 * (xl + xr), 0.5 * (yt + yb));
    let (tr, br, bl, tl) = ((xr, yt), (xr, yb), (xl, yb), (xl, yt));
    let (mt, me, mb, mw) = ((cx, yt), (xr, cy), (cx, yb), (xl, cy));
    let corners = [tr, tr, br, br, bl, bl, tl, tl];
    let mids = [mt, me, me, mb, mb, mw, mw, mt];
    let c = (cx, cy);
    core::array::from_fn(|k| {
        [
            Segment::new(mids[k], corners[k]),
            Segment::new(c, corners[k]),
            Segment::new(c, mids[k]),
        ]
    })
}

/// Shadow features measured against an explicit frame `bb`.
pub fn shadow_in_box(img: &BinaryImage, bb: &BoundingBox) -> FeatureVector {
    let sides = octant_sides(bb);
    let mut full: [[Vec<(f64, f64)>; 3]; 8] = Default::default();
    let mut ink: [[Vec<(f64, f64)>; 3]; 8] = Default::default();
    for row in bb.top..=bb.bottom {
        for col in bb.left..=bb.right {
            let k = octant_of(bb, row, col);
            let set = img.get(row, col);
            for (s, seg) in sides[k].iter().enumerate() {
                if let Some(iv) = seg.project(row, col) {
                    full[k][s].push(iv);
                    if set {
                        ink[k][s].push(iv);
                    }
                }
            }
        }
    }
    let mut values = Vec::with_capacity(24);
    for k in 0..8 {
        for s in 0..3 {
            let denom = union_length(&mut full[k][s]);
            let num = union_length(&mut ink[k][s]);
            values.push(if denom > 0.0 { (num / denom).min(1.0) } else { 0.0 });
        }
    }
    FeatureVector {
        kind: FeatureKind::Shadow,
        values,
    }
}

/// 24 shadow features over the glyph's tight bounding box.
pub fn extract_shadow(img: &BinaryImage) -> Result<FeatureVector> {
    let bb = img.bounding_box().ok_or(Error::EmptyImage)?;
    Ok(shadow_in_box(img, &bb))
}
