//! Data ingestion, configuration, ensemble persistence and plot emission.

mod config;
mod csvio;
mod persist;
mod plots;
mod svg;

pub use config::ConfigFile;
pub use csvio::{
    ingest_csv, read_estimate_csv, read_pvalue_csv, write_estimate_csv, write_series_csv,
};
pub use persist::{load_ensemble, persist_ensemble};
pub use plots::{emit_detail_plot, emit_grid_plot, emit_summary_plot, PlotDocument};

use std::path::Path;

use crate::error::Result;

/// Atomic file write: write to a sibling temp file, then rename into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(match path.extension() {
        Some(ext) => format!("{}.tmp", ext.to_string_lossy()),
        None => "tmp".to_string(),
    });
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}
