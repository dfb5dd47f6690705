use alloc::vec::Vec;

use super::{FeatureKind, FeatureVector};
use crate::image::BinaryImage;

const GRID: usize = 5;

/// Raw longest-run sums of one rectangular region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RegionRuns {
    pub row: usize,
    pub col: usize,
    /// Lines parallel to the main diagonal (top-left to bottom-right).
    pub diag: usize,
    pub anti_diag: usize,
}

fn longest_run(cells: impl Iterator<Item = bool>) -> usize {
    let (mut best, mut cur) = (0, 0);
    for set in cells {
        cur = if set { cur + 1 } else { 0 };
        best = best.max(cur);
    }
    best
}

/// Longest-run sums over rows `rows` and columns `cols` of `img`.
pub fn region_runs(
    img: &BinaryImage,
    rows: core::ops::Range<usize>,
    cols: core::ops::Range<usize>,
) -> RegionRuns {
    let (h, w) = (rows.len(), cols.len());
    let mut out = RegionRuns::default();
    if h == 0 || w == 0 {
        return out;
    }
    let at = |r: usize, c: usize| img.get(rows.start + r, cols.start + c);
    out.row = (0..h).map(|r| longest_run((0..w).map(|c| at(r, c)))).sum();
    out.col = (0..w).map(|c| longest_run((0..h).map(|r| at(r, c)))).sum();
    // main diagonals: c - r = k for k in -(h-1)..=(w-1)
    for k in -(h as isize - 1)..=(w as isize - 1) {
        let r0 = (-k).max(0) as usize;
        let c0 = k.max(0) as usize;
        let len = (h - r0).min(w - c0);
        out.diag += longest_run((0..len).map(|i| at(r0 + i, c0 + i)));
    }
    // anti-diagonals: r + c = s
    for s in 0..(h + w - 1) {
        let r0 = s.min(h - 1);
        let c0 = s - r0;
        let len = (r0 + 1).min(w - c0);
        out.anti_diag += longest_run((0..len).map(|i| at(r0 - i, c0 + i)));
    }
    out
}

/// Longest-run features, normalized by region area.
pub fn extract_longest_run(img: &BinaryImage) -> FeatureVector {
    extract_longest_run_with(img, true)
}

/// Longest-run features over a 5×5 partition of the glyph's bounding square.
///
/// The square has side `max(H, W)` of the bounding box, is centered on the
/// box and shifted (then clipped) to stay inside the image. Per region the
/// row, column, diagonal and anti-diagonal sums are emitted in that order,
/// regions in raster order. With `normalize` off the raw sums are returned.
pub fn extract_longest_run_with(img: &BinaryImage, normalize: bool) -> FeatureVector {
    let mut values = Vec::with_capacity(GRID * GRID * 4);
    let Some(bb) = img.bounding_box() else {
        values.resize(GRID * GRID * 4, 0.0);
        return FeatureVector {
            kind: FeatureKind::LongestRun,
            values,
        };
    };
    let side = bb.height().max(bb.width());
    let place = |lo: usize, extent: usize, limit: usize| {
        let start = lo.saturating_sub((side - extent) / 2);
        let start = start.min(limit.saturating_sub(side));
        (start, (start + side).min(limit))
    };
    let (r0, r1) = place(bb.top, bb.height(), img.height());
    let (c0, c1) = place(bb.left, bb.width(), img.width());
    let (sh, sw) = (r1 - r0, c1 - c0);
    for gi in 0..GRID {
        let rows = r0 + gi * sh / GRID..r0 + (gi + 1) * sh / GRID;
        for gj in 0..GRID {
            let cols = c0 + gj * sw / GRID..c0 + (gj + 1) * sw / GRID;
            let area = (rows.len() * cols.len()) as f64;
            let runs = region_runs(img, rows.clone(), cols);
            for raw in [runs.row, runs.col, runs.diag, runs.anti_diag] {
                let v = raw as f64;
                values.push(if !normalize {
                    v
                } else if area > 0.0 {
                    v / area
                } else {
                    0.0
                });
            }
        }
    }
    FeatureVector {
        kind: FeatureKind::LongestRun,
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    /// The 6×6 grid with longest bars 4, 2, 2, 1, 1, 2.
    const BAR_GRID: [[u8; 6]; 6] = [
        [1, 0, 1, 1, 1, 1],
        [1, 0, 0, 1, 1, 0],
        [1, 0, 0, 1, 1, 0],
        [1, 0, 0, 0, 1, 0],
        [0, 1, 0, 0, 1, 0],
        [0, 0, 1, 1, 0, 0],
    ];

    #[test]
    fn bar_grid_row_sum_is_twelve() {
        let img = BinaryImage::from_rows(&BAR_GRID).unwrap();
        let runs = region_runs(&img, 0..6, 0..6);
        assert_eq!(runs.row, 12);
    }

    #[test]
    fn solid_region_normalizes_to_one() {
        let img = BinaryImage::new(100, 100, vec![true; 10_000]).unwrap();
        let f = extract_longest_run(&img);
        assert_eq!(f.values().len(), 100);
        assert!(f.values().iter().all(|&v| v == 1.0));
        let raw = extract_longest_run_with(&img, false);
        assert!(raw.values().iter().all(|&v| v == 400.0));
    }

    #[test]
    fn empty_gives_zeros() {
        let f = extract_longest_run(&BinaryImage::blank(100, 100));
        assert!(f.values().iter().all(|&v| v == 0.0));
        let img = BinaryImage::from_rows(&[[0, 0], [0, 0]]).unwrap();
        assert_eq!(region_runs(&img, 0..2, 0..2), RegionRuns::default());
    }

    #[test]
    fn bounding_square_is_centered_on_a_wide_box() {
        // 20 wide, 10 tall box: the square spans 20 rows centered on it
        let mut img = BinaryImage::blank(100, 100);
        for c in 40..60 {
            img.set(45, c, true);
            img.set(54, c, true);
        }
        let f = extract_longest_run_with(&img, false);
        // square rows 40..60, regions of 4 rows: row 45 is in region row 1,
        // row 54 in region row 3
        for gj in 0..5 {
            assert_eq!(f.values()[(5 + gj) * 4], 4.0);
            assert_eq!(f.values()[(15 + gj) * 4], 4.0);
            assert_eq!(f.values()[gj * 4], 0.0);
        }
    }
}
