//! Reconstruction of a clean mask from a [`GridModel`] and coordinate export.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{argument, Error, Result};
use crate::gridfit::GridModel;
use crate::raster::BinaryMask;
use crate::scan::ReferenceTile;

/// One reconstructed dash: integer top-left anchor plus the stamp size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DashRecord {
    pub id: usize,
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub mask: BinaryMask,
    pub records: Vec<DashRecord>,
}

/// Round half up: `floor(v + 0.5)`.
pub fn round_half_up(v: f64) -> i64 {
    (v + 0.5).floor() as i64
}

/// ORs the tile's foreground onto `canvas` with its top-left at `origin`.
/// Tile pixels falling outside the canvas are dropped.
pub fn stamp_tile(canvas: &mut BinaryMask, tile: &ReferenceTile, origin: (i64, i64)) {
    let (ox, oy) = origin;
    let (w, h) = (canvas.width() as i64, canvas.height() as i64);
    for (dy, dxs) in tile.foreground_rows() {
        let y = oy + *dy as i64;
        if !(0..h).contains(&y) {
            continue;
        }
        for &dx in dxs {
            let x = ox + dx as i64;
            if (0..w).contains(&x) {
                canvas.set(x as usize, y as usize, true);
            }
        }
    }
}

/// Stamps the tile at every (row, column) of the grid onto a blank
/// `width x height` canvas, rows outer and columns inner, and records each
/// stamp in that order.
pub fn reconstruct_mask(
    grid: &GridModel,
    tile: &ReferenceTile,
    width: usize,
    height: usize,
) -> Result<Reconstruction> {
    if width < tile.width() || height < tile.height() {
        return Err(argument(format!(
            "{width}x{height} canvas is smaller than the {}x{} tile",
            tile.width(),
            tile.height()
        )));
    }
    let mut mask = BinaryMask::new(width, height)?;
    let to_index = |v: f64, limit: usize, axis: &str| -> Result<usize> {
        let r = round_half_up(v);
        if !v.is_finite() || r < 0 || r >= limit as i64 {
            return Err(argument(format!(
                "grid {axis} position {v} falls outside the {width}x{height} canvas"
            )));
        }
        Ok(r as usize)
    };
    let rows = grid
        .row_positions
        .iter()
        .map(|&r| to_index(r, height, "row"))
        .collect::<Result<Vec<_>>>()?;
    let cols = grid
        .col_positions
        .iter()
        .map(|&c| to_index(c, width, "column"))
        .collect::<Result<Vec<_>>>()?;

    let mut records = Vec::with_capacity(rows.len() * cols.len());
    for &y in &rows {
        for &x in &cols {
            stamp_tile(&mut mask, tile, (x as i64, y as i64));
            records.push(DashRecord {
                id: records.len(),
                x,
                y,
                width: tile.width(),
                height: tile.height(),
            });
        }
    }
    Ok(Reconstruction { mask, records })
}

pub const CSV_HEADER: &str = "id,x,y,width,height";

pub fn export_csv(records: &[DashRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(out, "{},{},{},{},{}", r.id, r.x, r.y, r.width, r.height);
    }
    out
}

/// Parses the CSV written by [`export_csv`]. Blank trailing lines are allowed.
pub fn parse_csv(text: &str) -> Result<Vec<DashRecord>> {
    let mut offset = 0;
    let mut lines = text.split_inclusive('\n');
    let header = lines.next().unwrap_or("");
    if header.trim_end_matches(['\n', '\r']) != CSV_HEADER {
        return Err(Error::Format {
            offset: 0,
            message: format!("expected CSV header \"{CSV_HEADER}\""),
        });
    }
    offset += header.len();
    let mut records = Vec::new();
    for line in lines {
        let body = line.trim_end_matches(['\n', '\r']);
        if !body.is_empty() {
            let fields: Vec<&str> = body.split(',').collect();
            let parsed: Option<Vec<usize>> = (fields.len() == 5)
                .then(|| fields.iter().map(|f| f.parse().ok()).collect())
                .flatten();
            let Some(v) = parsed else {
                return Err(Error::Format {
                    offset,
                    message: format!("malformed CSV record \"{body}\""),
                });
            };
            records.push(DashRecord {
                id: v[0],
                x: v[1],
                y: v[2],
                width: v[3],
                height: v[4],
            });
        }
        offset += line.len();
    }
    Ok(records)
}

pub fn export_json(records: &[DashRecord]) -> String {
    let mut out = serde_json::to_string_pretty(records).expect("records serialize");
    out.push('\n');
    out
}

/// Minimal ASCII DXF with only an ENTITIES section: one closed four-vertex
/// LWPOLYLINE per record. The y axis is flipped so that CAD "up" matches the
/// top of the raster.
pub fn export_dxf(records: &[DashRecord], image_height: usize) -> String {
    let mut out = String::new();
    let mut pair = |code: i32, value: &dyn std::fmt::Display| {
        let _ = writeln!(out, "{code:>3}\n{value}");
    };
    pair(0, &"SECTION");
    pair(2, &"ENTITIES");
    let h = image_height as i64;
    for r in records {
        let (x0, x1) = (r.x as i64, (r.x + r.width) as i64);
        let (top, bottom) = (h - r.y as i64, h - r.y as i64 - r.height as i64);
        pair(0, &"LWPOLYLINE");
        pair(8, &"DASHES");
        pair(100, &"AcDbEntity");
        pair(100, &"AcDbPolyline");
        pair(90, &4);
        pair(70, &1);
        for (x, y) in [(x0, top), (x1, top), (x1, bottom), (x0, bottom)] {
            pair(10, &x);
            pair(20, &y);
        }
    }
    pair(0, &"ENDSEC");
    pair(0, &"EOF");
    out
}
