use std::fs;
use std::path::{Path, PathBuf};

use dashgrid::{binarize, load_pgm, load_png, BinaryMask, GrayImage, ReferenceTile};
use serde::de::DeserializeOwned;

use crate::error::{CliError, CliResult};

pub fn read_bytes(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

/// Loads a PGM, or a PNG when the extension says so.
pub fn read_gray(path: &Path) -> CliResult<GrayImage> {
    let bytes = read_bytes(path)?;
    let is_png = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("png"));
    let img = if is_png { load_png(&bytes) } else { load_pgm(&bytes) };
    img.map_err(|e| CliError::in_file(path, e))
}

pub fn read_mask(path: &Path, threshold: u8) -> CliResult<BinaryMask> {
    Ok(binarize(&read_gray(path)?, threshold))
}

pub fn read_tile(path: &Path, threshold: u8) -> CliResult<ReferenceTile> {
    ReferenceTile::new(read_mask(path, threshold)?).map_err(|e| match e {
        dashgrid::Error::Argument(m) => CliError::Validation(format!("{}: {m}", path.display())),
        other => CliError::in_file(path, other),
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let bytes = read_bytes(path)?;
    serde_json::from_slice(&bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn to_json<T: serde::Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("in-memory serialization");
    out.push(b'\n');
    out
}

/// A set of output files that appear together or not at all.
///
/// Everything is written into a hidden staging directory inside the target
/// directory and then renamed into place.
#[derive(Default)]
pub struct Artifacts {
    files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    pub fn add(&mut self, name: impl Into<String>, bytes: impl Into<Vec<u8>>) {
        self.files.push((name.into(), bytes.into()));
    }

    pub fn commit(self, dir: &Path) -> CliResult<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let staging = tempfile::Builder::new()
            .prefix(".dashgrid-staging-")
            .tempdir_in(dir)
            .map_err(|e| CliError::io(dir, e))?;
        for (name, bytes) in &self.files {
            let p = staging.path().join(name);
            fs::write(&p, bytes).map_err(|e| CliError::io(&p, e))?;
        }
        let mut written = Vec::with_capacity(self.files.len());
        for (name, _) in &self.files {
            let dest = dir.join(name);
            fs::rename(staging.path().join(name), &dest).map_err(|e| CliError::io(&dest, e))?;
            written.push(dest);
        }
        Ok(written)
    }
}

/// Writes one file atomically (temp file in the same directory, then rename).
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    std::io::Write::write_all(&mut tmp, bytes).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}
