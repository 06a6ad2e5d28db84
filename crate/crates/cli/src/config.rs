//! JSON configuration for `refine` and `synth`.

use std::path::{Path, PathBuf};

use dashgrid::{CorruptionSpec, FitConfig, RectRegion, SynthSpec};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

pub const DEFAULT_OVERLAP_THRESHOLD: f64 = 0.6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
    Dxf,
    Pgm,
}

impl ExportFormat {
    fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "csv" => Self::Csv,
            "json" => Self::Json,
            "dxf" => Self::Dxf,
            "pgm" => Self::Pgm,
            _ => return None,
        })
    }
}

/// Raw config document as written by the user.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPipelineConfig {
    input_mask_path: PathBuf,
    tile_path: PathBuf,
    #[serde(default)]
    rotation_degrees: f64,
    #[serde(default)]
    crop: Option<RectRegion>,
    #[serde(default = "default_binarize")]
    binarize_threshold: i64,
    #[serde(default = "default_overlap")]
    overlap_threshold: f64,
    row_dist_threshold: f64,
    col_dist_factor: f64,
    output_dir: PathBuf,
    #[serde(default)]
    overlay_mode: bool,
    #[serde(default = "default_formats")]
    export_formats: Vec<String>,
}

fn default_binarize() -> i64 {
    128
}

fn default_overlap() -> f64 {
    DEFAULT_OVERLAP_THRESHOLD
}

fn default_formats() -> Vec<String> {
    vec!["csv".into()]
}

/// Flag values that take precedence over the config file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub overlap_threshold: Option<f64>,
    pub row_dist_threshold: Option<f64>,
    pub col_dist_factor: Option<f64>,
    pub rotation_degrees: Option<f64>,
    pub binarize_threshold: Option<i64>,
    pub output_dir: Option<PathBuf>,
    pub overlay_mode: bool,
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub input_mask_path: PathBuf,
    pub tile_path: PathBuf,
    pub rotation_degrees: f64,
    pub crop: Option<RectRegion>,
    pub binarize_threshold: u8,
    pub overlap_threshold: f64,
    pub fit: FitConfig,
    pub output_dir: PathBuf,
    pub overlay_mode: bool,
    pub export_formats: Vec<ExportFormat>,
}

impl PipelineConfig {
    /// Reads, applies overrides, resolves relative paths against the config
    /// file's directory, and validates every field.
    pub fn load(path: &Path, overrides: &Overrides) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::from_json(&text, base, overrides)
    }

    pub fn from_json(text: &str, base: &Path, overrides: &Overrides) -> CliResult<Self> {
        let mut raw: RawPipelineConfig = serde_json::from_str(text)
            .map_err(|e| CliError::Validation(format!("config: {e}")))?;
        if let Some(v) = overrides.overlap_threshold {
            raw.overlap_threshold = v;
        }
        if let Some(v) = overrides.row_dist_threshold {
            raw.row_dist_threshold = v;
        }
        if let Some(v) = overrides.col_dist_factor {
            raw.col_dist_factor = v;
        }
        if let Some(v) = overrides.rotation_degrees {
            raw.rotation_degrees = v;
        }
        if let Some(v) = overrides.binarize_threshold {
            raw.binarize_threshold = v;
        }
        if let Some(v) = &overrides.output_dir {
            raw.output_dir = v.clone();
        }
        raw.overlay_mode |= overrides.overlay_mode;
        Self::validate(raw, base)
    }

    fn validate(raw: RawPipelineConfig, base: &Path) -> CliResult<Self> {
        let invalid = |field: &str, why: String| CliError::Validation(format!("config field `{field}`: {why}"));

        if !(raw.overlap_threshold.is_finite() && (0.0..=1.0).contains(&raw.overlap_threshold)) {
            return Err(invalid("overlap_threshold", format!("must lie in [0, 1], got {}", raw.overlap_threshold)));
        }
        if !(raw.row_dist_threshold.is_finite() && raw.row_dist_threshold > 0.0) {
            return Err(invalid("row_dist_threshold", format!("must be > 0, got {}", raw.row_dist_threshold)));
        }
        if !(raw.col_dist_factor.is_finite() && raw.col_dist_factor > 0.0) {
            return Err(invalid("col_dist_factor", format!("must be > 0, got {}", raw.col_dist_factor)));
        }
        if !raw.rotation_degrees.is_finite() {
            return Err(invalid("rotation_degrees", "must be finite".into()));
        }
        let binarize_threshold = u8::try_from(raw.binarize_threshold)
            .map_err(|_| invalid("binarize_threshold", format!("must lie in 0..=255, got {}", raw.binarize_threshold)))?;
        if let Some(c) = &raw.crop {
            if c.width == 0 || c.height == 0 {
                return Err(invalid("crop", "width and height must be at least 1".into()));
            }
        }
        let mut export_formats = Vec::new();
        for name in &raw.export_formats {
            let f = ExportFormat::parse(name)
                .ok_or_else(|| invalid("export_formats", format!("unknown format \"{name}\" (expected csv, json, dxf or pgm)")))?;
            if !export_formats.contains(&f) {
                export_formats.push(f);
            }
        }
        let fit = FitConfig {
            row_dist_threshold: raw.row_dist_threshold,
            col_dist_factor: raw.col_dist_factor,
        };
        Ok(Self {
            input_mask_path: base.join(raw.input_mask_path),
            tile_path: base.join(raw.tile_path),
            rotation_degrees: raw.rotation_degrees,
            crop: raw.crop,
            binarize_threshold,
            overlap_threshold: raw.overlap_threshold,
            fit,
            output_dir: base.join(raw.output_dir),
            overlay_mode: raw.overlay_mode,
            export_formats,
        })
    }
}

/// Config for `synth`: the grid, plus an optional corruption pass.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub grid: SynthSpec,
    #[serde(default = "CorruptionSpec::none")]
    pub corruption: CorruptionSpec,
}

impl SynthConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("synth config: {e}")))
    }
}
