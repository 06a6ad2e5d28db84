//! Sliding-window overlap scan.
//!
//! A window the size of the reference tile visits every origin at stride 1,
//! rows outer and columns inner. The overlap of a window is the fraction of
//! the tile's foreground pixels that land on mask foreground; tile background
//! is ignored. Every window scoring strictly above the threshold is kept, so a
//! well-formed dash typically produces a whole neighbourhood of hits that the
//! grid fit later merges.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{argument, Result};
use crate::raster::BinaryMask;

/// Template depicting one well-formed dash. Used both for matching and as the
/// stamp during reconstruction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceTile {
    mask: BinaryMask,
    // Foreground offsets grouped by tile row: (dy, [dx...]).
    rows: Vec<(usize, Vec<usize>)>,
    // The same rows as 64-bit chunks, bit i of chunk k = column 64k + i.
    packed: Vec<(usize, Vec<u64>)>,
    on_count: usize,
}

impl ReferenceTile {
    pub fn new(mask: BinaryMask) -> Result<Self> {
        let rows: Vec<(usize, Vec<usize>)> = (0..mask.height())
            .map(|dy| {
                let dxs = mask
                    .row(dy)
                    .iter()
                    .enumerate()
                    .filter_map(|(dx, &on)| on.then_some(dx))
                    .collect::<Vec<_>>();
                (dy, dxs)
            })
            .filter(|(_, dxs)| !dxs.is_empty())
            .collect();
        let on_count = rows.iter().map(|(_, dxs)| dxs.len()).sum();
        if on_count == 0 {
            return Err(argument("reference tile has no foreground pixels"));
        }
        let packed = rows
            .iter()
            .map(|(dy, _)| (*dy, pack_row(mask.row(*dy))))
            .collect();
        Ok(Self {
            mask,
            rows,
            packed,
            on_count,
        })
    }

    pub fn mask(&self) -> &BinaryMask {
        &self.mask
    }

    pub fn width(&self) -> usize {
        self.mask.width()
    }

    pub fn height(&self) -> usize {
        self.mask.height()
    }

    pub fn on_count(&self) -> usize {
        self.on_count
    }

    pub(crate) fn foreground_rows(&self) -> &[(usize, Vec<usize>)] {
        &self.rows
    }

    fn matched_at(&self, mask: &BinaryMask, x: usize, y: usize) -> usize {
        self.rows
            .iter()
            .map(|(dy, dxs)| {
                let row = &mask.row(y + dy)[x..];
                dxs.iter().filter(|&&dx| row[dx]).count()
            })
            .sum()
    }

    fn matched_packed(&self, mask: &PackedMask, x: usize, y: usize) -> usize {
        self.packed
            .iter()
            .map(|(dy, chunks)| {
                chunks
                    .iter()
                    .enumerate()
                    .map(|(k, &bits)| (mask.bits_at(y + dy, x + 64 * k) & bits).count_ones() as usize)
                    .sum::<usize>()
            })
            .sum()
    }

    fn ratio(&self, matched: usize) -> f64 {
        matched as f64 / self.on_count as f64
    }
}

fn pack_row(row: &[bool]) -> Vec<u64> {
    let mut words = vec![0u64; row.len().div_ceil(64)];
    for (i, _) in row.iter().enumerate().filter(|(_, &on)| on) {
        words[i / 64] |= 1 << (i % 64);
    }
    words
}

/// Mask rows packed into 64-bit words with one trailing zero word per row, so
/// any 64-bit window starting inside the row can be read without bounds checks.
struct PackedMask {
    words: Vec<u64>,
    stride: usize,
}

impl PackedMask {
    fn new(mask: &BinaryMask) -> Self {
        let stride = mask.width().div_ceil(64) + 1;
        let mut words = Vec::with_capacity(stride * mask.height());
        for y in 0..mask.height() {
            let mut row = pack_row(mask.row(y));
            row.push(0);
            words.extend_from_slice(&row);
        }
        Self { words, stride }
    }

    /// 64 bits of row `y` starting at column `x`.
    #[inline]
    fn bits_at(&self, y: usize, x: usize) -> u64 {
        let base = y * self.stride + x / 64;
        let off = x % 64;
        let lo = self.words[base] >> off;
        if off == 0 {
            lo
        } else {
            lo | (self.words[base + 1] << (64 - off))
        }
    }
}

/// One accepted window: top-left column `x`, row `y`, and its overlap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchHit {
    pub x: usize,
    pub y: usize,
    pub overlap: f64,
}

/// Fraction of tile foreground pixels that coincide with mask foreground when
/// the tile's top-left corner sits at `origin`.
pub fn overlap_fraction(
    mask: &BinaryMask,
    origin: (usize, usize),
    tile: &ReferenceTile,
) -> Result<f64> {
    let (x, y) = origin;
    let fits = x
        .checked_add(tile.width())
        .is_some_and(|x1| x1 <= mask.width())
        && y.checked_add(tile.height()).is_some_and(|y1| y1 <= mask.height());
    if !fits {
        return Err(argument(format!(
            "{}x{} window at ({x}, {y}) exceeds the {}x{} mask",
            tile.width(),
            tile.height(),
            mask.width(),
            mask.height()
        )));
    }
    Ok(tile.ratio(tile.matched_at(mask, x, y)))
}

/// Exhaustive stride-1 scan. Hits come back in row-major visit order.
///
/// Rows are scored in parallel; the result is identical to a sequential scan.
pub fn scan_locations(
    mask: &BinaryMask,
    tile: &ReferenceTile,
    threshold: f64,
) -> Result<Vec<MatchHit>> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(argument(format!(
            "overlap threshold must lie in [0, 1], got {threshold}"
        )));
    }
    if tile.width() > mask.width() || tile.height() > mask.height() {
        return Err(argument(format!(
            "{}x{} tile is larger than the {}x{} mask",
            tile.width(),
            tile.height(),
            mask.width(),
            mask.height()
        )));
    }
    let x_end = mask.width() - tile.width() + 1;
    let y_end = mask.height() - tile.height() + 1;
    let packed = PackedMask::new(mask);

    let per_row: Vec<Vec<MatchHit>> = (0..y_end)
        .into_par_iter()
        .map(|y| {
            (0..x_end)
                .filter_map(|x| {
                    let overlap = tile.ratio(tile.matched_packed(&packed, x, y));
                    (overlap > threshold).then_some(MatchHit { x, y, overlap })
                })
                .collect()
        })
        .collect();
    Ok(per_row.into_iter().flatten().collect())
}
