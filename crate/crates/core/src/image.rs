//! Image substrate: binarization, size normalization, thinning and contour
//! chain coding.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result, NORM_SIZE};

/// 8-bit grayscale image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage("zero-sized image"));
        }
        if pixels.len() != width * height {
            return Err(Error::InvalidImage("pixel count does not match dimensions"));
        }
        Ok(GrayImage {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }
}

/// Black/white image, row-major, `true` = object (ink).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    pixels: Vec<bool>,
}

/// Inclusive pixel bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundingBox {
    pub top: usize,
    pub left: usize,
    pub bottom: usize,
    pub right: usize,
}

impl BoundingBox {
    pub fn height(&self) -> usize {
        self.bottom - self.top + 1
    }

    pub fn width(&self) -> usize {
        self.right - self.left + 1
    }
}

impl BinaryImage {
    pub fn new(width: usize, height: usize, pixels: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage("zero-sized image"));
        }
        if pixels.len() != width * height {
            return Err(Error::InvalidImage("pixel count does not match dimensions"));
        }
        Ok(BinaryImage {
            width,
            height,
            pixels,
        })
    }

    /// All-background image.
    pub fn blank(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "zero-sized image");
        BinaryImage {
            width,
            height,
            pixels: vec![false; width * height],
        }
    }

    /// Builds an image from rows of `0`/`1` (anything non-zero is object).
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.as_ref().len());
        let mut pixels = Vec::with_capacity(width * height);
        for r in rows {
            let r = r.as_ref();
            if r.len() != width {
                return Err(Error::InvalidImage("ragged rows"));
            }
            pixels.extend(r.iter().map(|&v| v != 0));
        }
        BinaryImage::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[bool] {
        &self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.pixels[row * self.width + col]
    }

    /// Like [`get`](Self::get) but anything off the image is background.
    pub fn get_signed(&self, row: isize, col: isize) -> bool {
        if row < 0 || col < 0 || row as usize >= self.height || col as usize >= self.width {
            return false;
        }
        self.get(row as usize, col as usize)
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.pixels[row * self.width + col] = value;
    }

    pub fn count(&self) -> usize {
        self.pixels.iter().filter(|&&p| p).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.pixels.iter().any(|&p| p)
    }

    /// Tight box around the object pixels, `None` for an empty image.
    pub fn bounding_box(&self) -> Option<BoundingBox> {
        let mut bb: Option<BoundingBox> = None;
        for row in 0..self.height {
            for col in 0..self.width {
                if !self.get(row, col) {
                    continue;
                }
                bb = Some(match bb {
                    None => BoundingBox {
                        top: row,
                        left: col,
                        bottom: row,
                        right: col,
                    },
                    Some(b) => BoundingBox {
                        top: b.top,
                        left: b.left.min(col),
                        bottom: row,
                        right: b.right.max(col),
                    },
                });
            }
        }
        bb
    }

    /// Object pixels as gray 0, background as 255.
    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|&p| if p { 0 } else { 255 }).collect(),
        }
    }
}

/// Otsu threshold of a gray image.
///
/// Candidate thresholds `t` in `1..=255` split the intensities into `< t` and
/// `>= t`. When several thresholds reach the same maximal between-class
/// variance the midpoint of the first and last of them is returned, so a
/// constant image (every split degenerate) gets 128.
pub fn otsu_threshold(img: &GrayImage) -> u8 {
    let mut hist = [0u64; 256];
    for &p in img.pixels() {
        hist[p as usize] += 1;
    }
    let total = img.pixels().len() as f64;
    let sum_all: f64 = hist.iter().enumerate().map(|(v, &n)| v as f64 * n as f64).sum();

    let mut best = -1.0f64;
    let mut first = 1u32;
    let mut last = 1u32;
    let mut n0 = 0.0f64;
    let mut s0 = 0.0f64;
    for t in 1..=255u32 {
        n0 += hist[t as usize - 1] as f64;
        s0 += (t - 1) as f64 * hist[t as usize - 1] as f64;
        let n1 = total - n0;
        let var = if n0 == 0.0 || n1 == 0.0 {
            0.0
        } else {
            let diff = s0 / n0 - (sum_all - s0) / n1;
            n0 * n1 * diff * diff
        };
        if var > best {
            best = var;
            first = t;
            last = t;
        } else if var == best {
            last = t;
        }
    }
    ((first + last) / 2) as u8
}

/// Pixels strictly darker than the Otsu threshold become object pixels.
pub fn binarize(img: &GrayImage) -> BinaryImage {
    let t = otsu_threshold(img);
    BinaryImage {
        width: img.width,
        height: img.height,
        pixels: img.pixels.iter().map(|&p| p < t).collect(),
    }
}

/// Rescales the tight bounding box of the glyph to fill a 100×100 frame.
///
/// Output pixel `(i, j)` maps to the source cell
/// `[floor(i·h/100), max(floor((i+1)·h/100), floor(i·h/100)+1))` of the box
/// (columns likewise) and is set iff that cell holds an object pixel. When
/// upscaling every cell is one pixel, i.e. plain nearest-neighbor; when
/// downscaling, thin strokes on the box edges survive, so the output always
/// fills its own frame and normalization is idempotent.
pub fn normalize(img: &BinaryImage) -> Result<BinaryImage> {
    normalize_to(img, NORM_SIZE)
}

pub fn normalize_to(img: &BinaryImage, size: usize) -> Result<BinaryImage> {
    let bb = img.bounding_box().ok_or(Error::EmptyImage)?;
    let (h, w) = (bb.height(), bb.width());
    let cell = |i: usize, extent: usize| {
        let lo = i * extent / size;
        let hi = ((i + 1) * extent / size).max(lo + 1);
        (lo, hi)
    };
    let mut out = BinaryImage::blank(size, size);
    for i in 0..size {
        let (r0, r1) = cell(i, h);
        for j in 0..size {
            let (c0, c1) = cell(j, w);
            let hit = (r0..r1).any(|r| (c0..c1).any(|c| img.get(bb.top + r, bb.left + c)));
            out.set(i, j, hit);
        }
    }
    Ok(out)
}

/// Neighbors in Zhang–Suen order P2..P9 (N, NE, E, SE, S, SW, W, NW).
fn zs_neighbors(img: &BinaryImage, row: usize, col: usize) -> [bool; 8] {
    let (r, c) = (row as isize, col as isize);
    [
        img.get_signed(r - 1, c),
        img.get_signed(r - 1, c + 1),
        img.get_signed(r, c + 1),
        img.get_signed(r + 1, c + 1),
        img.get_signed(r + 1, c),
        img.get_signed(r + 1, c - 1),
        img.get_signed(r, c - 1),
        img.get_signed(r - 1, c - 1),
    ]
}

/// Zhang–Suen thinning, iterated until neither sub-iteration deletes a pixel.
pub fn thin(img: &BinaryImage) -> BinaryImage {
    let mut cur = img.clone();
    let mut marked = Vec::new();
    loop {
        let mut changed = false;
        for step in 0..2 {
            marked.clear();
            for row in 0..cur.height {
                for col in 0..cur.width {
                    if !cur.get(row, col) {
                        continue;
                    }
                    let n = zs_neighbors(&cur, row, col);
                    let b = n.iter().filter(|&&p| p).count();
                    if !(2..=6).contains(&b) {
                        continue;
                    }
                    let a = (0..8).filter(|&k| !n[k] && n[(k + 1) % 8]).count();
                    if a != 1 {
                        continue;
                    }
                    let (p2, p4, p6, p8) = (n[0], n[2], n[4], n[6]);
                    let keep = if step == 0 {
                        (p2 && p4 && p6) || (p4 && p6 && p8)
                    } else {
                        (p2 && p4 && p8) || (p2 && p6 && p8)
                    };
                    if !keep {
                        marked.push((row, col));
                    }
                }
            }
            for &(row, col) in &marked {
                cur.set(row, col, false);
            }
            changed |= !marked.is_empty();
        }
        if !changed {
            return cur;
        }
    }
}

fn is_contour(img: &BinaryImage, row: usize, col: usize) -> bool {
    if !img.get(row, col) {
        return false;
    }
    let (r, c) = (row as isize, col as isize);
    !img.get_signed(r - 1, c)
        || !img.get_signed(r + 1, c)
        || !img.get_signed(r, c - 1)
        || !img.get_signed(r, c + 1)
}

/// Object pixels with at least one background 4-neighbor, in raster order.
/// Off-image neighbors count as background.
pub fn contour_points(img: &BinaryImage) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for row in 0..img.height {
        for col in 0..img.width {
            if is_contour(img, row, col) {
                out.push((row, col));
            }
        }
    }
    out
}

/// The contour mask: contour pixels set, everything else clear.
pub fn contour_image(img: &BinaryImage) -> BinaryImage {
    let mut out = BinaryImage::blank(img.width, img.height);
    for (row, col) in contour_points(img) {
        out.set(row, col, true);
    }
    out
}

/// Freeman step vectors `(drow, dcol)` indexed by code: 0 E, 1 NE, 2 N, 3 NW,
/// 4 W, 5 SW, 6 S, 7 SE. Rows grow downwards.
pub const FREEMAN_STEPS: [(isize, isize); 8] = [
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
];

/// Freeman code of the step from `from` to the 8-adjacent pixel `to`.
pub fn direction(from: (usize, usize), to: (usize, usize)) -> Option<u8> {
    let d = (
        to.0 as isize - from.0 as isize,
        to.1 as isize - from.1 as isize,
    );
    FREEMAN_STEPS.iter().position(|&s| s == d).map(|p| p as u8)
}

/// One traced contour.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ContourChain {
    /// `(row, col)` of the first pixel.
    pub start: (usize, usize),
    pub codes: Vec<u8>,
}

impl ContourChain {
    /// Pixels visited by replaying the codes, starting pixel included.
    pub fn points(&self) -> Vec<(usize, usize)> {
        let mut pts = Vec::with_capacity(self.codes.len() + 1);
        let mut cur = self.start;
        pts.push(cur);
        for &code in &self.codes {
            let (dr, dc) = FREEMAN_STEPS[code as usize];
            cur = (
                (cur.0 as isize + dr) as usize,
                (cur.1 as isize + dc) as usize,
            );
            pts.push(cur);
        }
        pts
    }

    /// Pixel at which each step starts, paired with its code.
    pub fn steps(&self) -> impl Iterator<Item = ((usize, usize), u8)> + '_ {
        let mut cur = self.start;
        self.codes.iter().map(move |&code| {
            let from = cur;
            let (dr, dc) = FREEMAN_STEPS[code as usize];
            cur = (
                (cur.0 as isize + dr) as usize,
                (cur.1 as isize + dc) as usize,
            );
            (from, code)
        })
    }
}

/// Traces every 8-connected component of contour pixels as one clockwise
/// closed walk.
///
/// A walk starts at the component's first pixel in raster order. At each
/// pixel the neighbors are scanned clockwise (decreasing code) beginning at
/// the reverse of the incoming step (west for the first step) and the first
/// unvisited contour neighbor is taken. Dead ends retrace the way they came.
/// Once every pixel of the component is visited the walk returns to its
/// start, stepping there directly as soon as the start is adjacent. Chains
/// are emitted in raster order of their starts.
pub fn trace_chains(img: &BinaryImage) -> Vec<ContourChain> {
    let (w, h) = (img.width, img.height);
    let mask = contour_image(img);
    let mut component = vec![usize::MAX; w * h];
    let mut visited = vec![false; w * h];
    let mut chains = Vec::new();
    let mut queue = Vec::new();

    let neighbor = |p: (usize, usize), code: u8| -> Option<(usize, usize)> {
        let (dr, dc) = FREEMAN_STEPS[code as usize];
        let (r, c) = (p.0 as isize + dr, p.1 as isize + dc);
        if mask.get_signed(r, c) {
            Some((r as usize, c as usize))
        } else {
            None
        }
    };

    for start_idx in 0..w * h {
        if !mask.pixels[start_idx] || component[start_idx] != usize::MAX {
            continue;
        }
        let id = chains.len();
        let start = (start_idx / w, start_idx % w);

        // component membership
        let mut size = 0usize;
        component[start_idx] = id;
        queue.clear();
        queue.push(start);
        while let Some(p) = queue.pop() {
            size += 1;
            for code in 0..8 {
                if let Some(q) = neighbor(p, code) {
                    let qi = q.0 * w + q.1;
                    if component[qi] == usize::MAX {
                        component[qi] = id;
                        queue.push(q);
                    }
                }
            }
        }

        let mut codes = Vec::new();
        let mut stack = vec![start];
        visited[start_idx] = true;
        let mut seen = 1usize;
        let mut cur = start;
        let mut incoming: Option<u8> = None;
        loop {
            if seen == size {
                if cur == start {
                    break;
                }
                if let Some(d) = direction(cur, start) {
                    codes.push(d);
                    break;
                }
            } else {
                let back = incoming.map_or(4, |d| (d + 4) % 8);
                let next = (0..8u8)
                    .map(|k| (back + 8 - k) % 8)
                    .filter_map(|code| neighbor(cur, code).map(|q| (code, q)))
                    .find(|&(_, q)| !visited[q.0 * w + q.1]);
                if let Some((code, q)) = next {
                    visited[q.0 * w + q.1] = true;
                    seen += 1;
                    codes.push(code);
                    stack.push(q);
                    cur = q;
                    incoming = Some(code);
                    continue;
                }
            }
            // retrace towards the DFS parent
            stack.pop();
            let parent = *stack
                .last()
                .expect("walk cannot leave its start before covering the component");
            let code = direction(cur, parent).expect("parent is 8-adjacent");
            codes.push(code);
            cur = parent;
            incoming = Some(code);
        }
        chains.push(ContourChain { start, codes });
    }
    chains
}
