//! CSV ingestion and emission. Numbers are written with Rust's shortest
//! round-trip formatting, so re-parsing reproduces the exact f64 values.

use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::series::{FrequencyGrid, QuantileGrid, TimeSeries};
use crate::spectra::SpectralMatrix;

/// Log-return transform X_t = ln(p_t / p_{t-1}); `first_line` is the
/// 1-based line number of the first price, used in error messages.
pub(crate) fn log_returns(prices: &[f64], lines: &[usize]) -> Result<Vec<f64>> {
    for (idx, &p) in prices.iter().enumerate() {
        if p <= 0.0 {
            return Err(Error::Parse {
                line: lines[idx],
                msg: format!("non-positive price {p} under log-returns"),
            });
        }
    }
    Ok(prices.windows(2).map(|w| (w[1] / w[0]).ln()).collect())
}

/// Read a one-column numeric CSV (optional single header line); under
/// `log_returns` the series becomes the log ratios of consecutive rows.
pub fn ingest_csv(path: &Path, apply_log_returns: bool) -> Result<TimeSeries> {
    let text = std::fs::read_to_string(path)?;
    let mut values = Vec::new();
    let mut lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let cell = raw.trim().trim_start_matches('\u{feff}');
        if cell.is_empty() {
            continue;
        }
        match cell.parse::<f64>() {
            Ok(v) if v.is_finite() => {
                values.push(v);
                lines.push(line_no);
            }
            Ok(v) => {
                return Err(Error::Parse { line: line_no, msg: format!("non-finite value {v}") })
            }
            Err(_) if line_no == 1 => {
                // a single header line is allowed
            }
            Err(_) => {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected a number, found `{cell}`"),
                })
            }
        }
    }
    let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let values =
        if apply_log_returns { log_returns(&values, &lines)? } else { values };
    TimeSeries::new(values, label)
}

/// One value per line under a `value` header.
pub fn write_series_csv(series: &TimeSeries) -> String {
    let mut out = String::from("value\n");
    for v in series.values() {
        out.push_str(&v.to_string());
        out.push('\n');
    }
    out
}

/// Estimate schema: `tau1,tau2,omega,re,im`, one row per grid point.
pub fn write_estimate_csv(estimate: &SpectralMatrix) -> String {
    let mut out = String::from("tau1,tau2,omega,re,im\n");
    let taus = estimate.taus().levels();
    let omegas = estimate.omegas().omegas();
    for (i, &t1) in taus.iter().enumerate() {
        for (j, &t2) in taus.iter().enumerate() {
            for (k, &w) in omegas.iter().enumerate() {
                let v = estimate.at(i, j, k);
                out.push_str(&format!("{t1},{t2},{w},{},{}\n", v.re, v.im));
            }
        }
    }
    out
}

fn parse_field(cell: &str, line: usize) -> Result<f64> {
    cell.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse { line, msg: format!("expected a number, found `{cell}`") })
}

/// Parse an estimate CSV written by [`write_estimate_csv`] back into a
/// spectral matrix. Grids are reconstructed from the row coordinates.
pub fn read_estimate_csv(text: &str) -> Result<SpectralMatrix> {
    let mut rows: Vec<(f64, f64, f64, Complex64)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if line == 1 || raw.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = raw.split(',').collect();
        if cells.len() != 5 {
            return Err(Error::Parse { line, msg: format!("expected 5 columns, found {}", cells.len()) });
        }
        rows.push((
            parse_field(cells[0], line)?,
            parse_field(cells[1], line)?,
            parse_field(cells[2], line)?,
            Complex64::new(parse_field(cells[3], line)?, parse_field(cells[4], line)?),
        ));
    }
    if rows.is_empty() {
        return Err(Error::Format("estimate CSV has no data rows".into()));
    }
    let mut taus: Vec<f64> = Vec::new();
    let mut omegas: Vec<f64> = Vec::new();
    for &(t1, _, w, _) in &rows {
        if !taus.iter().any(|&t| (t - t1).abs() < 1e-12) {
            taus.push(t1);
        }
        if !omegas.iter().any(|&o| (o - w).abs() < 1e-12) {
            omegas.push(w);
        }
    }
    taus.sort_unstable_by(f64::total_cmp);
    omegas.sort_unstable_by(f64::total_cmp);
    let tau_grid = QuantileGrid::new(taus)?;
    let freq_grid = FrequencyGrid::new(omegas)?;
    let (nt, nf) = (tau_grid.len(), freq_grid.len());
    if rows.len() != nt * nt * nf {
        return Err(Error::Format(format!(
            "estimate CSV has {} rows, grids imply {}",
            rows.len(),
            nt * nt * nf
        )));
    }
    let mut values = vec![Complex64::new(0.0, 0.0); nt * nt * nf];
    for (t1, t2, w, v) in rows {
        let i = tau_grid.index_of(t1).unwrap();
        let j = tau_grid.index_of(t2).unwrap();
        let k = freq_grid.index_of(w).ok_or_else(|| {
            Error::Format(format!("frequency {w} not matched in reconstructed grid"))
        })?;
        values[(i * nt + j) * nf + k] = v;
    }
    SpectralMatrix::from_values(tau_grid, freq_grid, values)
}

/// Summary p-value schema: `omega,p_min`.
pub fn read_pvalue_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if line == 1 || raw.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = raw.split(',').collect();
        if cells.len() < 2 {
            return Err(Error::Parse { line, msg: "expected omega,p_min".into() });
        }
        out.push((parse_field(cells[0], line)?, parse_field(cells[1], line)?));
    }
    if out.is_empty() {
        return Err(Error::Format("p-value CSV has no data rows".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::KernelSpec;
    use crate::models::{simulate, ModelSpec, SimConfig};
    use crate::spectra::smoothed_estimate;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        use std::io::Write;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn log_return_transform_examples() {
        let e = std::f64::consts::E;
        let out = log_returns(&[1.0, e, e * e], &[1, 2, 3]).unwrap();
        assert!((out[0] - 1.0).abs() < 1e-15);
        assert!((out[1] - 1.0).abs() < 1e-15);
        let err = log_returns(&[1.0, 0.0, 2.0], &[5, 6, 7]).unwrap_err();
        assert!(err.to_string().contains("line 6"), "{err}");
    }

    #[test]
    fn ingest_with_header() {
        let f = write_temp("value\n1\n2\n3\n4\n5\n6\n7\n8\n9\n10\n");
        let s = ingest_csv(f.path(), false).unwrap();
        assert_eq!(s.len(), 10);
        assert_eq!(s.values()[9], 10.0);
    }

    #[test]
    fn ingest_rejects_mid_file_garbage() {
        let f = write_temp("1\n2\nthree\n4\n5\n6\n7\n8\n9\n");
        let err = ingest_csv(f.path(), false).unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn ingest_missing_file() {
        assert!(ingest_csv(Path::new("/nonexistent/x.csv"), false).is_err());
    }

    #[test]
    fn ingest_log_returns_roundtrip() {
        let increments = [0.01, -0.02, 0.015, 0.0, -0.01, 0.03, 0.005, -0.004, 0.02];
        let mut prices = vec![100.0];
        for dx in increments {
            prices.push(prices.last().unwrap() * dx.exp());
        }
        let body: String = prices.iter().map(|p| format!("{p}\n")).collect();
        let f = write_temp(&body);
        let s = ingest_csv(f.path(), true).unwrap();
        for (got, want) in s.values().iter().zip(increments) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn estimate_csv_round_trips_exactly() {
        let data = simulate(&ModelSpec::Ar { coeffs: vec![0.4] }, &SimConfig::new(128, 9)).unwrap();
        let est = smoothed_estimate(
            &data,
            &QuantileGrid::display_default(),
            &FrequencyGrid::new(vec![0.1, 1.0, 2.0]).unwrap(),
            &KernelSpec::epanechnikov(0.2).unwrap(),
        )
        .unwrap();
        let text = write_estimate_csv(&est);
        let back = read_estimate_csv(&text).unwrap();
        assert_eq!(est.values(), back.values());
        assert_eq!(est.taus(), back.taus());
    }
}
