use std::path::Path;

use dashgrid::{
    corrupt, crop, detection_metrics, export_csv, export_dxf, export_json, fit_grid, generate,
    parse_csv, pixel_iou, reconstruct_mask, rotate, save_pgm, scan_locations, FitConfig, GridModel, MatchHit, RectRegion, ReferenceTile,
};
use serde::Serialize;

use crate::config::{ExportFormat, Overrides, PipelineConfig, SynthConfig};
use crate::error::{CliError, CliResult};
use crate::io::{self, Artifacts};

pub const REFINED_MASK: &str = "refined.pgm";
pub const GRID_JSON: &str = "grid.json";
pub const HITS_JSON: &str = "hits.json";
pub const PREPROCESSED_MASK: &str = "preprocessed.pgm";
pub const DASHES_STEM: &str = "dashes";

#[derive(Debug, Clone, PartialEq)]
pub struct RefineSummary {
    pub hits: usize,
    pub rows: usize,
    pub cols: usize,
    pub dashes: usize,
}

/// Load, binarize, rotate, crop, scan, fit, reconstruct, export.
pub fn refine(config_path: &Path, overrides: &Overrides) -> CliResult<RefineSummary> {
    let cfg = PipelineConfig::load(config_path, overrides)?;
    let mut mask = io::read_mask(&cfg.input_mask_path, cfg.binarize_threshold)?;
    let tile = io::read_tile(&cfg.tile_path, cfg.binarize_threshold)?;

    if cfg.rotation_degrees != 0.0 {
        mask = rotate(&mask, cfg.rotation_degrees)?;
    }
    if let Some(region) = &cfg.crop {
        mask = crop(&mask, region)
            .map_err(|e| CliError::Validation(format!("config field `crop`: {e}")))?;
    }
    let hits = scan_locations(&mask, &tile, cfg.overlap_threshold)?;
    let grid = fit_grid(&hits, &tile, &cfg.fit)?;
    let mut out = reconstruct_mask(&grid, &tile, mask.width(), mask.height())?;
    if cfg.overlay_mode {
        out.mask.union_with(&mask)?;
    }

    let mut artifacts = Artifacts::default();
    artifacts.add(REFINED_MASK, save_pgm(&out.mask));
    artifacts.add(GRID_JSON, io::to_json(&grid));
    artifacts.add(HITS_JSON, io::to_json(&hits));
    add_exports(&mut artifacts, &cfg.export_formats, &out.records, mask.height());
    if cfg.export_formats.contains(&ExportFormat::Pgm) {
        artifacts.add(PREPROCESSED_MASK, save_pgm(&mask));
    }
    artifacts.commit(&cfg.output_dir)?;

    Ok(RefineSummary {
        hits: hits.len(),
        rows: grid.row_positions.len(),
        cols: grid.col_positions.len(),
        dashes: out.records.len(),
    })
}

fn add_exports(
    artifacts: &mut Artifacts,
    formats: &[ExportFormat],
    records: &[dashgrid::DashRecord],
    image_height: usize,
) {
    for f in formats {
        match f {
            ExportFormat::Csv => artifacts.add(format!("{DASHES_STEM}.csv"), export_csv(records)),
            ExportFormat::Json => artifacts.add(format!("{DASHES_STEM}.json"), export_json(records)),
            ExportFormat::Dxf => {
                artifacts.add(format!("{DASHES_STEM}.dxf"), export_dxf(records, image_height))
            }
            ExportFormat::Pgm => {}
        }
    }
}

pub const SYNTH_TRUTH_MASK: &str = "truth.pgm";
pub const SYNTH_CORRUPTED_MASK: &str = "corrupted.pgm";
pub const SYNTH_TRUTH_CSV: &str = "truth.csv";
pub const SYNTH_TRUTH_GRID: &str = "truth_grid.json";

pub fn synth(config_path: &Path, output_dir: &Path) -> CliResult<usize> {
    let cfg = SynthConfig::load(config_path)?;
    let out = generate(&cfg.grid)?;
    let corrupted = corrupt(&out.mask, &out.truth, &cfg.corruption)?;
    let mut artifacts = Artifacts::default();
    artifacts.add(SYNTH_TRUTH_MASK, save_pgm(&out.mask));
    artifacts.add(SYNTH_CORRUPTED_MASK, save_pgm(&corrupted));
    artifacts.add(SYNTH_TRUTH_CSV, export_csv(&out.truth));
    artifacts.add(SYNTH_TRUTH_GRID, io::to_json(&out.truth_grid));
    artifacts.commit(output_dir)?;
    Ok(out.truth.len())
}

#[derive(Debug, Serialize)]
pub struct EvalReport {
    pub precision: f64,
    pub recall: f64,
    pub rmse: f64,
    pub iou: f64,
}

pub struct EvalInputs<'a> {
    pub predicted_csv: &'a Path,
    pub truth_csv: &'a Path,
    pub refined_mask: &'a Path,
    pub truth_mask: &'a Path,
    pub tolerance: f64,
}

pub fn eval(inputs: &EvalInputs<'_>) -> CliResult<EvalReport> {
    if !(inputs.tolerance.is_finite() && inputs.tolerance > 0.0) {
        return Err(CliError::Validation(format!(
            "--tolerance must be positive, got {}",
            inputs.tolerance
        )));
    }
    let parse = |p: &Path| parse_csv(&io::read_text(p)?).map_err(|e| CliError::in_file(p, e));
    let predicted = parse(inputs.predicted_csv)?;
    let truth = parse(inputs.truth_csv)?;
    let refined = io::read_mask(inputs.refined_mask, 128)?;
    let truth_mask = io::read_mask(inputs.truth_mask, 128)?;
    let m = detection_metrics(&predicted, &truth, inputs.tolerance)?;
    let iou = pixel_iou(&refined, &truth_mask)?;
    Ok(EvalReport {
        precision: m.precision,
        recall: m.recall,
        rmse: m.rmse,
        iou,
    })
}

pub fn binarize_file(input: &Path, threshold: u8, output: &Path) -> CliResult<()> {
    let mask = io::read_mask(input, threshold)?;
    io::write_atomic(output, &save_pgm(&mask))
}

pub fn rotate_file(input: &Path, degrees: f64, output: &Path) -> CliResult<()> {
    let mask = io::read_mask(input, 128)?;
    io::write_atomic(output, &save_pgm(&rotate(&mask, degrees)?))
}

pub fn crop_file(input: &Path, region: &RectRegion, output: &Path) -> CliResult<()> {
    let mask = io::read_mask(input, 128)?;
    io::write_atomic(output, &save_pgm(&crop(&mask, region)?))
}

pub fn scan_file(input: &Path, tile: &Path, threshold: f64, output: &Path) -> CliResult<usize> {
    let mask = io::read_mask(input, 128)?;
    let tile = io::read_tile(tile, 128)?;
    let hits = scan_locations(&mask, &tile, threshold)?;
    io::write_atomic(output, &io::to_json(&hits))?;
    Ok(hits.len())
}

pub fn fit_file(hits: &Path, tile: &Path, cfg: &FitConfig, output: &Path) -> CliResult<GridModel> {
    let hits: Vec<MatchHit> = io::read_json(hits)?;
    let tile = io::read_tile(tile, 128)?;
    let grid = fit_grid(&hits, &tile, cfg)?;
    io::write_atomic(output, &io::to_json(&grid))?;
    Ok(grid)
}

pub fn reconstruct_files(
    grid: &Path,
    tile: &Path,
    size: (usize, usize),
    formats: &[ExportFormat],
    output_dir: &Path,
) -> CliResult<usize> {
    let grid: GridModel = io::read_json(grid)?;
    let tile: ReferenceTile = io::read_tile(tile, 128)?;
    let out = reconstruct_mask(&grid, &tile, size.0, size.1)?;
    let mut artifacts = Artifacts::default();
    artifacts.add(REFINED_MASK, save_pgm(&out.mask));
    add_exports(&mut artifacts, formats, &out.records, size.1);
    artifacts.commit(output_dir)?;
    Ok(out.records.len())
}
