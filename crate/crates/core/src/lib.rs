//! Refinement of binary dash-line segmentation masks.
//!
//! The pipeline takes a binary mask produced by any segmenter, locates each
//! painted dash by sliding a reference tile over the mask, fits a regular
//! row/column grid to the raw hits, and re-stamps the tile at every grid cell.
//! Missing and broken dashes are restored and every dash is exported with its
//! pixel coordinates (CSV, JSON, or a minimal entity-only DXF).
//!
//! ```
//! use dashgrid::{fit_grid, reconstruct_mask, scan_locations, BinaryMask, FitConfig, ReferenceTile};
//!
//! let mut mask = BinaryMask::new(40, 20).unwrap();
//! for (x0, y0) in [(2, 3), (22, 3), (2, 13)] {
//!     mask.fill_rect(x0, y0, 6, 2, true);
//! }
//! let tile = ReferenceTile::new(BinaryMask::filled(6, 2, true).unwrap()).unwrap();
//! let hits = scan_locations(&mask, &tile, 0.6).unwrap();
//! let cfg = FitConfig::new(4.0, 0.5).unwrap();
//! let grid = fit_grid(&hits, &tile, &cfg).unwrap();
//! let out = reconstruct_mask(&grid, &tile, 40, 20).unwrap();
//! // The dash missing at (22, 13) is restored.
//! assert_eq!(out.records.len(), 4);
//! assert!(out.mask.get(22, 13));
//! ```

pub mod error;
pub mod gridfit;
pub mod raster;
pub mod reconstruct;
pub mod scan;
pub mod synth;

pub use error::{Error, Result};
pub use gridfit::{
    cluster_1d, cluster_cols, cluster_rows, column_stats, fit_grid, ColumnStats, FitConfig,
    GridModel,
};
pub use raster::{
    binarize, crop, load_pgm, load_png, rotate, save_gray_pgm, save_pgm, BinaryMask, GrayImage,
    RectRegion,
};
pub use reconstruct::{
    export_csv, export_dxf, export_json, parse_csv, reconstruct_mask, round_half_up, stamp_tile,
    DashRecord, Reconstruction,
};
pub use scan::{overlap_fraction, scan_locations, MatchHit, ReferenceTile};
pub use synth::{
    corrupt, detection_metrics, generate, pixel_iou, CorruptionSpec, DetectionMetrics,
    SynthOutput, SynthSpec,
};
