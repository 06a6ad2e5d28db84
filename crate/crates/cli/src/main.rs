//! `dashgrid` command-line interface.
//!
//! Exit codes: 0 success, 2 validation error, 3 processing error, 4 I/O error.

mod commands;
mod config;
mod error;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dashgrid::{FitConfig, RectRegion};

use config::{ExportFormat, Overrides};
use error::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "dashgrid", version, about = "Refine dashed lane-marking masks and export per-dash coordinates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline from a JSON config.
    Refine {
        config: PathBuf,
        #[arg(long)]
        overlap_threshold: Option<f64>,
        #[arg(long)]
        row_dist_threshold: Option<f64>,
        #[arg(long)]
        col_dist_factor: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        rotation_degrees: Option<f64>,
        #[arg(long)]
        binarize_threshold: Option<i64>,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// OR the reconstruction onto the preprocessed input mask.
        #[arg(long)]
        overlay: bool,
    },
    /// Generate a synthetic dash grid with ground truth.
    Synth {
        config: PathBuf,
        #[arg(long)]
        output_dir: PathBuf,
    },
    /// Score predicted dashes and a refined mask against ground truth.
    Eval {
        #[arg(long)]
        predicted: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        refined: PathBuf,
        #[arg(long)]
        truth_mask: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        tolerance: f64,
    },
    /// Threshold a grayscale PGM/PNG into a binary mask.
    Binarize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 128)]
        threshold: u8,
        #[arg(long)]
        output: PathBuf,
    },
    /// Rotate a mask counterclockwise about its center.
    Rotate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        angle: f64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Cut a rectangle out of a mask (also used to extract a reference tile).
    Crop {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        x0: usize,
        #[arg(long)]
        y0: usize,
        #[arg(long)]
        width: usize,
        #[arg(long)]
        height: usize,
        #[arg(long)]
        output: PathBuf,
    },
    /// Slide the tile over a mask and write the hit list as JSON.
    Scan {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        tile: PathBuf,
        #[arg(long, default_value_t = config::DEFAULT_OVERLAP_THRESHOLD)]
        threshold: f64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Fit a grid model to a hit list.
    Fit {
        #[arg(long)]
        hits: PathBuf,
        #[arg(long)]
        tile: PathBuf,
        #[arg(long)]
        row_dist_threshold: f64,
        #[arg(long)]
        col_dist_factor: f64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Stamp the tile at every grid cell and export the dashes.
    Reconstruct {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        tile: PathBuf,
        #[arg(long)]
        width: usize,
        #[arg(long)]
        height: usize,
        /// Comma-separated subset of csv,json,dxf.
        #[arg(long, value_delimiter = ',', default_value = "csv")]
        format: Vec<String>,
        #[arg(long)]
        output_dir: PathBuf,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Refine {
            config,
            overlap_threshold,
            row_dist_threshold,
            col_dist_factor,
            rotation_degrees,
            binarize_threshold,
            output_dir,
            overlay,
        } => {
            let overrides = Overrides {
                overlap_threshold,
                row_dist_threshold,
                col_dist_factor,
                rotation_degrees,
                binarize_threshold,
                output_dir,
                overlay_mode: overlay,
            };
            let s = commands::refine(&config, &overrides)?;
            println!("hits: {}, rows: {}, cols: {}, dashes: {}", s.hits, s.rows, s.cols, s.dashes);
        }
        Command::Synth { config, output_dir } => {
            let n = commands::synth(&config, &output_dir)?;
            println!("dashes: {n}, written to {}", output_dir.display());
        }
        Command::Eval {
            predicted,
            truth,
            refined,
            truth_mask,
            tolerance,
        } => {
            let report = commands::eval(&commands::EvalInputs {
                predicted_csv: &predicted,
                truth_csv: &truth,
                refined_mask: &refined,
                truth_mask: &truth_mask,
                tolerance,
            })?;
            println!("{}", serde_json::to_string(&report).expect("report serializes"));
        }
        Command::Binarize { input, threshold, output } => {
            commands::binarize_file(&input, threshold, &output)?;
        }
        Command::Rotate { input, angle, output } => commands::rotate_file(&input, angle, &output)?,
        Command::Crop {
            input,
            x0,
            y0,
            width,
            height,
            output,
        } => commands::crop_file(&input, &RectRegion::new(x0, y0, width, height), &output)?,
        Command::Scan {
            input,
            tile,
            threshold,
            output,
        } => {
            let n = commands::scan_file(&input, &tile, threshold, &output)?;
            println!("hits: {n}");
        }
        Command::Fit {
            hits,
            tile,
            row_dist_threshold,
            col_dist_factor,
            output,
        } => {
            let cfg = FitConfig::new(row_dist_threshold, col_dist_factor)?;
            let grid = commands::fit_file(&hits, &tile, &cfg, &output)?;
            println!("rows: {}, cols: {}", grid.row_positions.len(), grid.col_positions.len());
        }
        Command::Reconstruct {
            grid,
            tile,
            width,
            height,
            format,
            output_dir,
        } => {
            let formats = format
                .iter()
                .map(|f| match f.as_str() {
                    "csv" => Ok(ExportFormat::Csv),
                    "json" => Ok(ExportFormat::Json),
                    "dxf" => Ok(ExportFormat::Dxf),
                    other => Err(CliError::Validation(format!("--format: unknown format \"{other}\""))),
                })
                .collect::<CliResult<Vec<_>>>()?;
            let n = commands::reconstruct_files(&grid, &tile, (width, height), &formats, &output_dir)?;
            println!("dashes: {n}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
