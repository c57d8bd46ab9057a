//! Instance resolution and CSV output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use multicross_core::{figure2_instance, parse_instance, parse_tour, ParseErrorKind, RunRecord, Tour, TspInstance};
use serde::Serialize;

use crate::error::CliError;

/// Reserved path for the built-in nine-city instance.
pub const FIGURE2: &str = ":figure2";

/// Resolves an instance path.
///
/// Besides TSPLIB files this accepts `:figure2` and `:random:N[:SEED]`
/// (N uniform cities on a 1000×1000 grid).
pub fn load_instance(path: &Path) -> Result<TspInstance, CliError> {
    let spec = path.to_string_lossy();
    if spec == FIGURE2 {
        return Ok(figure2_instance());
    }
    if let Some(rest) = spec.strip_prefix(":random:") {
        let bad = || CliError::BadInstanceSpec(format!("expected :random:N[:SEED], got {spec}"));
        let mut parts = rest.split(':');
        let n: usize = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        let seed: u64 = match parts.next() {
            Some(s) => s.parse().map_err(|_| bad())?,
            None => 0,
        };
        return TspInstance::random_euc_2d(n, 1000, seed).map_err(|e| CliError::BadInstanceSpec(e.to_string()));
    }
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_instance(&text).map_err(|source| CliError::Parse { path: path.to_path_buf(), source })
}

/// Name used for optimum lookup: the file's NAME, else the file stem.
pub fn instance_label(inst: &TspInstance, path: &Path) -> String {
    if !inst.name().is_empty() {
        return inst.name().to_string();
    }
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Reads a `.tour` file and checks it against an instance of `n` cities.
pub fn load_tour(path: &Path, n: usize) -> Result<Tour, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let tour = parse_tour(&text).map_err(|source| match source.kind {
        ParseErrorKind::InvalidTour(reason) => CliError::InvalidTour { path: path.to_path_buf(), reason },
        _ => CliError::Parse { path: path.to_path_buf(), source },
    })?;
    Tour::with_len(tour.into_vec(), n).map_err(|reason| CliError::InvalidTour { path: path.to_path_buf(), reason })
}

#[derive(Serialize)]
struct ConvergenceRow {
    generation: usize,
    best: f64,
    mean: f64,
    elapsed_ms: u64,
}

/// Writes `generation,best,mean,elapsed_ms`.
pub fn write_convergence<W: Write>(out: W, record: &RunRecord) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for g in &record.per_generation {
        w.serialize(ConvergenceRow { generation: g.generation, best: g.best, mean: g.mean, elapsed_ms: g.elapsed_ms })?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

pub(crate) fn csv_to_io(path: &Path, e: csv::Error) -> CliError {
    let path: PathBuf = path.to_path_buf();
    match e.into_kind() {
        csv::ErrorKind::Io(source) => CliError::Io { path, source },
        other => CliError::Io { path, source: std::io::Error::other(format!("{other:?}")) },
    }
}
