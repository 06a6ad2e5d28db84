//! Seeded synthetic dash grids with ground truth, a corruption model for
//! missing and poorly painted dashes, and the metrics used to score a
//! reconstruction against the truth.
//!
//! Random draws come from `ChaCha8Rng::seed_from_u64(seed)` in a fixed order,
//! so outputs are byte-identical across runs and hosts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{argument, Error, Result};
use crate::gridfit::GridModel;
use crate::raster::BinaryMask;
use crate::reconstruct::DashRecord;

/// Regular grid of solid rectangular dashes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    pub width: usize,
    pub height: usize,
    pub tile_width: usize,
    pub tile_height: usize,
    pub row_start: usize,
    pub col_start: usize,
    pub row_spacing: usize,
    pub col_spacing: usize,
    pub n_rows: usize,
    pub n_cols: usize,
    /// Each dash is shifted by an independent uniform integer offset in
    /// `[-jitter, jitter]` on each axis.
    #[serde(default)]
    pub jitter: usize,
    #[serde(default)]
    pub seed: u64,
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("width", self.width),
            ("height", self.height),
            ("tile_width", self.tile_width),
            ("tile_height", self.tile_height),
            ("row_spacing", self.row_spacing),
            ("col_spacing", self.col_spacing),
            ("n_rows", self.n_rows),
            ("n_cols", self.n_cols),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(argument(format!("{name} must be at least 1")));
        }
        let fits = |start: usize, spacing: usize, n: usize, tile: usize, limit: usize| {
            start >= self.jitter
                && (n - 1)
                    .checked_mul(spacing)
                    .and_then(|span| span.checked_add(start))
                    .and_then(|v| v.checked_add(tile))
                    .and_then(|v| v.checked_add(self.jitter))
                    .is_some_and(|end| end <= limit)
        };
        if !fits(self.col_start, self.col_spacing, self.n_cols, self.tile_width, self.width) {
            return Err(argument(format!(
                "grid does not fit: {} columns from x={} every {} px (tile {}, jitter {}) exceed width {}",
                self.n_cols, self.col_start, self.col_spacing, self.tile_width, self.jitter, self.width
            )));
        }
        if !fits(self.row_start, self.row_spacing, self.n_rows, self.tile_height, self.height) {
            return Err(argument(format!(
                "grid does not fit: {} rows from y={} every {} px (tile {}, jitter {}) exceed height {}",
                self.n_rows, self.row_start, self.row_spacing, self.tile_height, self.jitter, self.height
            )));
        }
        Ok(())
    }
}

/// Failure modes applied to a generated mask.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorruptionSpec {
    /// Probability that a dash is deleted outright.
    #[serde(default)]
    pub drop_prob: f64,
    /// Pixels shaved from every dash edge (square structuring element).
    #[serde(default)]
    pub erode_px: usize,
    /// Probability that a background pixel turns into foreground.
    #[serde(default)]
    pub noise_density: f64,
    #[serde(default)]
    pub seed: u64,
}

impl CorruptionSpec {
    pub fn none() -> Self {
        Self {
            drop_prob: 0.0,
            erode_px: 0,
            noise_density: 0.0,
            seed: 0,
        }
    }

    fn validate(&self, truth: &[DashRecord]) -> Result<()> {
        for (name, p) in [("drop_prob", self.drop_prob), ("noise_density", self.noise_density)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(argument(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        if let Some(min_side) = truth.iter().map(|r| r.width.min(r.height)).min() {
            if 2 * self.erode_px >= min_side {
                return Err(argument(format!(
                    "erode_px {} must be less than half the smaller dash side ({min_side})",
                    self.erode_px
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthOutput {
    pub mask: BinaryMask,
    pub truth: Vec<DashRecord>,
    /// Unjittered grid the generator was built from.
    pub truth_grid: GridModel,
}

pub fn generate(spec: &SynthSpec) -> Result<SynthOutput> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut mask = BinaryMask::new(spec.width, spec.height)?;
    let j = spec.jitter as i64;
    let mut truth = Vec::with_capacity(spec.n_rows * spec.n_cols);
    for r in 0..spec.n_rows {
        for c in 0..spec.n_cols {
            let (dx, dy) = if j > 0 {
                (rng.random_range(-j..=j), rng.random_range(-j..=j))
            } else {
                (0, 0)
            };
            let x = (spec.col_start + c * spec.col_spacing) as i64 + dx;
            let y = (spec.row_start + r * spec.row_spacing) as i64 + dy;
            let (x, y) = (x as usize, y as usize);
            mask.fill_rect(x, y, spec.tile_width, spec.tile_height, true);
            truth.push(DashRecord {
                id: truth.len(),
                x,
                y,
                width: spec.tile_width,
                height: spec.tile_height,
            });
        }
    }
    let truth_grid = GridModel {
        row_positions: (0..spec.n_rows)
            .map(|r| (spec.row_start + r * spec.row_spacing) as f64)
            .collect(),
        col_positions: (0..spec.n_cols)
            .map(|c| (spec.col_start + c * spec.col_spacing) as f64)
            .collect(),
        avg_col_spacing: spec.col_spacing as f64,
        tile_width: spec.tile_width,
        tile_height: spec.tile_height,
    };
    Ok(SynthOutput {
        mask,
        truth,
        truth_grid,
    })
}

/// Applies, in order: per-dash deletion (one draw per dash in id order),
/// erosion by `erode_px`, and salt noise (one draw per background pixel in
/// row-major order, only when `noise_density > 0`).
pub fn corrupt(mask: &BinaryMask, truth: &[DashRecord], cspec: &CorruptionSpec) -> Result<BinaryMask> {
    cspec.validate(truth)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cspec.seed);
    let mut out = mask.clone();
    for r in truth {
        if rng.random::<f64>() < cspec.drop_prob {
            out.fill_rect(r.x, r.y, r.width, r.height, false);
        }
    }
    if cspec.erode_px > 0 {
        out = erode(&out, cspec.erode_px);
    }
    if cspec.noise_density > 0.0 {
        for y in 0..out.height() {
            for x in 0..out.width() {
                if !out.get(x, y) && rng.random::<f64>() < cspec.noise_density {
                    out.set(x, y, true);
                }
            }
        }
    }
    Ok(out)
}

/// Binary erosion with a `(2r+1)`-square structuring element. Pixels beyond
/// the border count as background.
fn erode(mask: &BinaryMask, radius: usize) -> BinaryMask {
    let (w, h) = (mask.width(), mask.height());
    // Separable: horizontal pass, then vertical.
    let mut horiz = BinaryMask::new(w, h).expect("same dims");
    for y in 0..h {
        let row = mask.row(y);
        let mut run = 0usize;
        let mut run_end = vec![0usize; w];
        for x in (0..w).rev() {
            run = if row[x] { run + 1 } else { 0 };
            run_end[x] = run;
        }
        let mut left = 0usize;
        for x in 0..w {
            left = if row[x] { left + 1 } else { 0 };
            // left counts foreground ending at x, run_end counts foreground starting at x.
            if left > radius && run_end[x] > radius {
                horiz.set(x, y, true);
            }
        }
    }
    let mut out = BinaryMask::new(w, h).expect("same dims");
    for x in 0..w {
        for y in 0..h {
            let lo = y.checked_sub(radius);
            let hi = y + radius;
            if let Some(lo) = lo {
                if hi < h && (lo..=hi).all(|yy| horiz.get(x, yy)) {
                    out.set(x, y, true);
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionMetrics {
    pub precision: f64,
    pub recall: f64,
    pub rmse: f64,
}

/// Greedy matching of predicted origins to truth origins.
///
/// All pairs within `tolerance` (Euclidean) are taken in order of increasing
/// distance, ties broken by predicted id then truth id; each prediction and
/// each truth record is used at most once. Empty denominators score 1.0 and
/// an empty match set has rmse 0.0.
pub fn detection_metrics(
    predicted: &[DashRecord],
    truth: &[DashRecord],
    tolerance: f64,
) -> Result<DetectionMetrics> {
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(argument(format!("tolerance must be positive, got {tolerance}")));
    }
    let dist = |p: &DashRecord, t: &DashRecord| {
        let dx = p.x as f64 - t.x as f64;
        let dy = p.y as f64 - t.y as f64;
        (dx * dx + dy * dy).sqrt()
    };
    let mut pairs = Vec::new();
    for (pi, p) in predicted.iter().enumerate() {
        for (ti, t) in truth.iter().enumerate() {
            let d = dist(p, t);
            if d <= tolerance {
                pairs.push((d, p.id, t.id, pi, ti));
            }
        }
    }
    pairs.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
            .then(a.3.cmp(&b.3))
            .then(a.4.cmp(&b.4))
    });
    let mut pred_used = vec![false; predicted.len()];
    let mut truth_used = vec![false; truth.len()];
    let mut matched = 0usize;
    let mut sq_sum = 0.0;
    for (d, _, _, pi, ti) in pairs {
        if !pred_used[pi] && !truth_used[ti] {
            pred_used[pi] = true;
            truth_used[ti] = true;
            matched += 1;
            sq_sum += d * d;
        }
    }
    let ratio = |n: usize, total: usize| if total == 0 { 1.0 } else { n as f64 / total as f64 };
    Ok(DetectionMetrics {
        precision: ratio(matched, predicted.len()),
        recall: ratio(matched, truth.len()),
        rmse: if matched == 0 {
            0.0
        } else {
            (sq_sum / matched as f64).sqrt()
        },
    })
}

/// Intersection over union of foreground; two empty masks score 1.0.
pub fn pixel_iou(a: &BinaryMask, b: &BinaryMask) -> Result<f64> {
    if (a.width(), a.height()) != (b.width(), b.height()) {
        return Err(Error::DimensionMismatch {
            left_width: a.width(),
            left_height: a.height(),
            right_width: b.width(),
            right_height: b.height(),
        });
    }
    let (mut inter, mut union) = (0usize, 0usize);
    for (&p, &q) in a.as_slice().iter().zip(b.as_slice()) {
        inter += usize::from(p && q);
        union += usize::from(p || q);
    }
    Ok(if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec_2x3() -> SynthSpec {
        SynthSpec {
            width: 64,
            height: 64,
            tile_width: 2,
            tile_height: 2,
            row_start: 11,
            col_start: 11,
            row_spacing: 30,
            col_spacing: 20,
            n_rows: 2,
            n_cols: 3,
            jitter: 0,
            seed: 5,
        }
    }

    fn rec(id: usize, x: usize, y: usize) -> DashRecord {
        DashRecord { id, x, y, width: 4, height: 4 }
    }

    #[test]
    fn generate_small_grid() {
        let out = generate(&spec_2x3()).unwrap();
        assert_eq!(out.mask.count_foreground(), 24);
        let origins: Vec<_> = out.truth.iter().map(|r| (r.x, r.y)).collect();
        assert_eq!(origins, vec![(11, 11), (31, 11), (51, 11), (11, 41), (31, 41), (51, 41)]);
        assert_eq!(out.truth_grid.row_positions, vec![11.0, 41.0]);
        assert_eq!(out.truth_grid.col_positions, vec![11.0, 31.0, 51.0]);
    }

    #[test]
    fn generate_minimal_grid() {
        let spec = SynthSpec { n_rows: 1, n_cols: 1, ..spec_2x3() };
        let out = generate(&spec).unwrap();
        assert_eq!(out.truth.len(), 1);
        assert_eq!(out.truth_grid.row_positions.len(), 1);
        assert_eq!(out.truth_grid.col_positions.len(), 1);
    }

    #[test]
    fn generate_is_deterministic_with_jitter() {
        let spec = SynthSpec { jitter: 3, ..spec_2x3() };
        let a = generate(&spec).unwrap();
        assert_eq!(a, generate(&spec).unwrap());
        for r in &a.truth {
            let c = r.id % 3;
            let row = r.id / 3;
            assert!((r.x as i64 - (11 + 20 * c) as i64).abs() <= 3);
            assert!((r.y as i64 - (11 + 30 * row) as i64).abs() <= 3);
        }
        let other = generate(&SynthSpec { seed: 6, ..spec }).unwrap();
        assert_ne!(a.truth, other.truth);
    }

    #[test]
    fn generate_rejects_oversized_grids() {
        assert!(generate(&SynthSpec { n_cols: 4, ..spec_2x3() }).is_err());
        assert!(generate(&SynthSpec { n_rows: 3, ..spec_2x3() }).is_err());
        assert!(generate(&SynthSpec { jitter: 12, ..spec_2x3() }).is_err());
        assert!(generate(&SynthSpec { col_spacing: 0, ..spec_2x3() }).is_err());
        assert!(generate(&SynthSpec { n_cols: usize::MAX, ..spec_2x3() }).is_err());
    }

    #[test]
    fn corrupt_extremes() {
        let out = generate(&SynthSpec { tile_width: 6, tile_height: 6, ..spec_2x3() }).unwrap();
        let all_gone = CorruptionSpec { drop_prob: 1.0, ..CorruptionSpec::none() };
        assert_eq!(corrupt(&out.mask, &out.truth, &all_gone).unwrap().count_foreground(), 0);
        assert_eq!(corrupt(&out.mask, &out.truth, &CorruptionSpec::none()).unwrap(), out.mask);
    }

    #[test]
    fn erosion_shrinks_square() {
        let mut mask = BinaryMask::new(10, 10).unwrap();
        mask.fill_rect(3, 3, 4, 4, true);
        let truth = [rec(0, 3, 3)];
        let spec = CorruptionSpec { erode_px: 1, ..CorruptionSpec::none() };
        let out = corrupt(&mask, &truth, &spec).unwrap();
        let mut expected = BinaryMask::new(10, 10).unwrap();
        expected.fill_rect(4, 4, 2, 2, true);
        assert_eq!(out, expected);
    }

    #[test]
    fn erosion_matches_naive_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mask = BinaryMask::from_vec(23, 17, (0..23 * 17).map(|_| rng.random_bool(0.8)).collect()).unwrap();
        for radius in 1..4 {
            let fast = erode(&mask, radius);
            let r = radius as i64;
            for y in 0..17 {
                for x in 0..23 {
                    let naive = (-r..=r).all(|dy| (-r..=r).all(|dx| mask.get_signed(x as i64 + dx, y as i64 + dy)));
                    assert_eq!(fast.get(x, y), naive, "r={radius} ({x},{y})");
                }
            }
        }
    }

    #[test]
    fn corrupt_validation() {
        let mask = BinaryMask::new(10, 10).unwrap();
        let truth = [rec(0, 3, 3)];
        let bad_p = CorruptionSpec { drop_prob: 1.5, ..CorruptionSpec::none() };
        assert!(corrupt(&mask, &truth, &bad_p).is_err());
        let bad_noise = CorruptionSpec { noise_density: -0.1, ..CorruptionSpec::none() };
        assert!(corrupt(&mask, &truth, &bad_noise).is_err());
        let too_much = CorruptionSpec { erode_px: 2, ..CorruptionSpec::none() };
        assert!(corrupt(&mask, &truth, &too_much).is_err());
    }

    #[test]
    fn drops_never_add_foreground_without_noise() {
        let spec = SynthSpec { tile_width: 6, tile_height: 4, ..spec_2x3() };
        let out = generate(&spec).unwrap();
        let c = CorruptionSpec { drop_prob: 0.5, erode_px: 1, noise_density: 0.0, seed: 3 };
        let bad = corrupt(&out.mask, &out.truth, &c).unwrap();
        for (i, (&after, &before)) in bad.as_slice().iter().zip(out.mask.as_slice()).enumerate() {
            assert!(!after || before, "pixel {i} appeared");
        }
        assert_eq!(bad, corrupt(&out.mask, &out.truth, &c).unwrap());
    }

    #[test]
    fn noise_only_touches_background() {
        let out = generate(&spec_2x3()).unwrap();
        let c = CorruptionSpec { noise_density: 0.2, ..CorruptionSpec::none() };
        let noisy = corrupt(&out.mask, &out.truth, &c).unwrap();
        assert!(noisy.count_foreground() > out.mask.count_foreground());
        for (&n, &o) in noisy.as_slice().iter().zip(out.mask.as_slice()) {
            assert!(n || !o);
        }
    }

    #[test]
    fn metrics_examples() {
        let truth = [rec(0, 10, 10), rec(1, 40, 10)];
        let perfect = detection_metrics(&truth, &truth, 2.0).unwrap();
        assert_eq!((perfect.precision, perfect.recall, perfect.rmse), (1.0, 1.0, 0.0));

        let m = detection_metrics(&[rec(0, 11, 11)], &[rec(0, 10, 10)], 3.0).unwrap();
        assert_eq!((m.precision, m.recall), (1.0, 1.0));
        assert!((m.rmse - 2f64.sqrt()).abs() < 1e-12);

        let none = detection_metrics(&[], &truth, 2.0).unwrap();
        assert_eq!((none.precision, none.recall, none.rmse), (1.0, 0.0, 0.0));
        let both_empty = detection_metrics(&[], &[], 2.0).unwrap();
        assert_eq!((both_empty.precision, both_empty.recall, both_empty.rmse), (1.0, 1.0, 0.0));
        assert!(detection_metrics(&[], &[], 0.0).is_err());
    }

    #[test]
    fn metrics_use_each_truth_once() {
        // Both predictions are within tolerance of the single truth; only the
        // closer one matches.
        let m = detection_metrics(&[rec(0, 12, 10), rec(1, 11, 10)], &[rec(0, 10, 10)], 3.0).unwrap();
        assert_eq!((m.precision, m.recall, m.rmse), (0.5, 1.0, 1.0));
        // Equal distances: the smaller predicted id wins.
        let tie = detection_metrics(&[rec(0, 9, 10), rec(1, 11, 10)], &[rec(0, 10, 10), rec(1, 12, 10)], 1.0).unwrap();
        assert_eq!((tie.precision, tie.recall), (1.0, 1.0));
    }

    #[test]
    fn iou_examples() {
        let a = BinaryMask::from_ascii(&["##..", "##.."]).unwrap();
        let b = BinaryMask::from_ascii(&[".##.", ".##."]).unwrap();
        let c = BinaryMask::from_ascii(&["...#", "...#"]).unwrap();
        assert_eq!(pixel_iou(&a, &a).unwrap(), 1.0);
        assert_eq!(pixel_iou(&a, &c).unwrap(), 0.0);
        assert!((pixel_iou(&a, &b).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let empty = BinaryMask::new(4, 2).unwrap();
        assert_eq!(pixel_iou(&empty, &empty).unwrap(), 1.0);
        assert!(matches!(
            pixel_iou(&a, &BinaryMask::new(2, 2).unwrap()),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
