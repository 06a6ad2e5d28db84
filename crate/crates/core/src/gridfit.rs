//! Grid fitting: merge the raw scan hits into refined row and column
//! positions.
//!
//! Rows are grouped by 1D single-linkage over the distinct hit rows with a
//! fixed pixel threshold. Columns use a threshold relative to the mean
//! spacing between adjacent hit columns observed inside each row.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{argument, Error, Result};
use crate::scan::{MatchHit, ReferenceTile};

/// Fitted dash layout. Positions are fractional top-left anchors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridModel {
    pub row_positions: Vec<f64>,
    pub col_positions: Vec<f64>,
    pub avg_col_spacing: f64,
    pub tile_width: usize,
    pub tile_height: usize,
}

impl GridModel {
    pub fn dash_count(&self) -> usize {
        self.row_positions.len() * self.col_positions.len()
    }
}

/// Thresholds for the grid fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    /// Adjacent distinct hit rows closer than this many pixels share a row.
    pub row_dist_threshold: f64,
    /// Adjacent distinct columns closer than `avg_col_spacing * col_dist_factor`
    /// share a column.
    pub col_dist_factor: f64,
}

impl FitConfig {
    pub fn new(row_dist_threshold: f64, col_dist_factor: f64) -> Result<Self> {
        let cfg = Self {
            row_dist_threshold,
            col_dist_factor,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.row_dist_threshold.is_finite() && self.row_dist_threshold > 0.0) {
            return Err(argument(format!(
                "row_dist_threshold must be a positive number, got {}",
                self.row_dist_threshold
            )));
        }
        if !(self.col_dist_factor.is_finite() && self.col_dist_factor > 0.0) {
            return Err(argument(format!(
                "col_dist_factor must be a positive number, got {}",
                self.col_dist_factor
            )));
        }
        Ok(())
    }
}

/// Single-linkage clustering of 1D coordinates.
///
/// Duplicates are collapsed, the distinct values sorted, and a gap of at
/// least `gap_threshold` between neighbours starts a new cluster. Returns the
/// mean of each cluster's distinct members, ascending.
pub fn cluster_1d(values: &[f64], gap_threshold: f64) -> Result<Vec<f64>> {
    if !(gap_threshold.is_finite() && gap_threshold > 0.0) {
        return Err(argument(format!(
            "gap threshold must be a positive number, got {gap_threshold}"
        )));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(argument(format!("cannot cluster non-finite coordinate {v}")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();

    let mut means = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i] - sorted[i - 1] >= gap_threshold {
            let members = &sorted[start..i];
            means.push(members.iter().sum::<f64>() / members.len() as f64);
            start = i;
        }
    }
    Ok(means)
}

/// Refined row positions from the hits' `y` values.
pub fn cluster_rows(hits: &[MatchHit], cfg: &FitConfig) -> Result<Vec<f64>> {
    let ys: Vec<f64> = hits.iter().map(|h| h.y as f64).collect();
    cluster_1d(&ys, cfg.row_dist_threshold)
}

/// Column statistics gathered per refined row.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnStats {
    /// Mean of every adjacent-distinct-column difference, pooled over rows.
    pub avg_col_spacing: f64,
    /// Every distinct hit column, ascending.
    pub unique_cols: Vec<f64>,
}

/// Assigns each hit to its nearest refined row (ties go to the upper row),
/// then pools the gaps between adjacent distinct columns within each row.
pub fn column_stats(hits: &[MatchHit], row_positions: &[f64]) -> Result<ColumnStats> {
    if row_positions.is_empty() {
        return Err(Error::InsufficientColumns);
    }
    let mut per_row: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); row_positions.len()];
    for hit in hits {
        per_row[nearest_row(row_positions, hit.y as f64)].insert(hit.x);
    }

    let mut gap_sum = 0.0;
    let mut gap_count = 0usize;
    for cols in &per_row {
        for (a, b) in cols.iter().zip(cols.iter().skip(1)) {
            gap_sum += (b - a) as f64;
            gap_count += 1;
        }
    }
    if gap_count == 0 {
        return Err(Error::InsufficientColumns);
    }
    let unique: BTreeSet<usize> = hits.iter().map(|h| h.x).collect();
    Ok(ColumnStats {
        avg_col_spacing: gap_sum / gap_count as f64,
        unique_cols: unique.into_iter().map(|x| x as f64).collect(),
    })
}

fn nearest_row(rows: &[f64], y: f64) -> usize {
    let i = rows.partition_point(|&r| r < y);
    if i == 0 {
        return 0;
    }
    if i == rows.len() {
        return rows.len() - 1;
    }
    if y - rows[i - 1] <= rows[i] - y {
        i - 1
    } else {
        i
    }
}

/// Refined column positions: `unique_cols` clustered with a gap threshold of
/// `avg_col_spacing * col_dist_factor`.
pub fn cluster_cols(unique_cols: &[f64], avg_col_spacing: f64, cfg: &FitConfig) -> Result<Vec<f64>> {
    if !(avg_col_spacing.is_finite() && avg_col_spacing > 0.0) {
        return Err(argument(format!(
            "average column spacing must be positive, got {avg_col_spacing}"
        )));
    }
    cluster_1d(unique_cols, avg_col_spacing * cfg.col_dist_factor)
}

/// Rows, then column statistics, then columns.
pub fn fit_grid(hits: &[MatchHit], tile: &ReferenceTile, cfg: &FitConfig) -> Result<GridModel> {
    cfg.validate()?;
    if hits.is_empty() {
        return Err(Error::NoHits);
    }
    let row_positions = cluster_rows(hits, cfg)?;
    let stats = column_stats(hits, &row_positions)?;
    let col_positions = cluster_cols(&stats.unique_cols, stats.avg_col_spacing, cfg)?;
    Ok(GridModel {
        row_positions,
        col_positions,
        avg_col_spacing: stats.avg_col_spacing,
        tile_width: tile.width(),
        tile_height: tile.height(),
    })
}
