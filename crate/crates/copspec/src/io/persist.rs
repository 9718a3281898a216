//! Versioned binary persistence for bootstrap ensembles: a text header block
//! (fitted spec, seed, R, grids, kernel) followed by a flat little-endian
//! array of complex values in (replicate, tau1, tau2, omega) order.

use num_complex::Complex64;

use crate::bootstrap::{BootstrapEnsemble, EstimatorConfig};
use crate::error::{Error, Result};
use crate::fit::FitResult;
use crate::kernel::{KernelKind, KernelSpec};
use crate::series::{FrequencyGrid, QuantileGrid};
use crate::spectra::SpectralMatrix;

const MAGIC: &[u8; 8] = b"CSPECENS";
const VERSION: u32 = 1;

struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn text(&mut self, s: &str) {
        self.u32(s.len() as u32);
        self.buf.extend_from_slice(s.as_bytes());
    }
    fn f64_slice(&mut self, xs: &[f64]) {
        self.u32(xs.len() as u32);
        for &x in xs {
            self.f64(x);
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(Error::Format(format!(
                "truncated ensemble file: expected {} more bytes at offset {}, found {}",
                n,
                self.pos,
                self.buf.len() - self.pos
            )));
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn text(&mut self) -> Result<String> {
        let len = self.u32()? as usize;
        let bytes = self.take(len)?;
        String::from_utf8(bytes.to_vec())
            .map_err(|_| Error::Format("header text is not UTF-8".into()))
    }
    fn f64_vec(&mut self) -> Result<Vec<f64>> {
        let len = self.u32()? as usize;
        (0..len).map(|_| self.f64()).collect()
    }
}

/// Serialize the ensemble; numeric fields survive bit-exactly.
pub fn persist_ensemble(ensemble: &BootstrapEnsemble) -> Result<Vec<u8>> {
    ensemble.validate()?;
    let mut w = Writer { buf: Vec::new() };
    w.buf.extend_from_slice(MAGIC);
    w.u32(VERSION);
    w.text(&ensemble.fitted.spec.to_string());
    w.f64(ensemble.fitted.objective_value);
    w.buf.push(u8::from(ensemble.fitted.converged));
    w.u64(ensemble.fitted.iterations as u64);
    w.u64(ensemble.seed);
    w.u32(ensemble.r as u32);
    w.buf.push(match ensemble.config.kernel.kind {
        KernelKind::Epanechnikov => 0u8,
    });
    w.f64(ensemble.config.kernel.bandwidth);
    w.f64_slice(ensemble.config.taus.levels());
    w.f64_slice(ensemble.config.omegas.omegas());
    for rep in &ensemble.replicates {
        for v in rep.values() {
            w.f64(v.re);
            w.f64(v.im);
        }
    }
    Ok(w.buf)
}

/// Load an ensemble written by [`persist_ensemble`].
pub fn load_ensemble(bytes: &[u8]) -> Result<BootstrapEnsemble> {
    let mut r = Reader { buf: bytes, pos: 0 };
    let magic = r.take(8)?;
    if magic != MAGIC {
        return Err(Error::Format("not an ensemble file (bad magic)".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::Format(format!(
            "incompatible ensemble version {version}, this build reads {VERSION}"
        )));
    }
    let spec_text = r.text()?;
    let spec = crate::models::parse_model(&spec_text)
        .map_err(|e| Error::Format(format!("bad fitted spec in header: {e}")))?;
    let objective_value = r.f64()?;
    let converged = r.take(1)?[0] != 0;
    let iterations = r.u64()? as usize;
    let seed = r.u64()?;
    let count = r.u32()? as usize;
    let kernel_kind = match r.take(1)?[0] {
        0 => KernelKind::Epanechnikov,
        other => return Err(Error::Format(format!("unknown kernel tag {other}"))),
    };
    let bandwidth = r.f64()?;
    let taus = QuantileGrid::new(r.f64_vec()?)?;
    let omegas = FrequencyGrid::new(r.f64_vec()?)?;

    let cells = taus.len() * taus.len() * omegas.len();
    let expected = r.pos + count * cells * 16;
    if bytes.len() != expected {
        return Err(Error::Format(format!(
            "payload size mismatch: expected {expected} bytes total, found {}",
            bytes.len()
        )));
    }
    let mut replicates = Vec::with_capacity(count);
    for _ in 0..count {
        let mut values = Vec::with_capacity(cells);
        for _ in 0..cells {
            let re = r.f64()?;
            let im = r.f64()?;
            values.push(Complex64::new(re, im));
        }
        replicates.push(SpectralMatrix::from_values(taus.clone(), omegas.clone(), values)?);
    }
    let config = EstimatorConfig::new(taus, omegas, KernelSpec::new(kernel_kind, bandwidth)?);
    let ensemble = BootstrapEnsemble {
        fitted: FitResult { spec, objective_value, converged, iterations },
        replicates,
        config,
        seed,
        r: count,
    };
    ensemble.validate()?;
    Ok(ensemble)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bootstrap::{run_parametric_bootstrap, ModelClass};
    use crate::models::{simulate, ModelSpec, SimConfig};

    fn small_ensemble() -> BootstrapEnsemble {
        let data =
            simulate(&ModelSpec::Ar { coeffs: vec![0.3] }, &SimConfig::new(64, 2)).unwrap();
        let config = EstimatorConfig::new(
            QuantileGrid::new(vec![0.25, 0.75]).unwrap(),
            FrequencyGrid::new(vec![0.5, 1.5]).unwrap(),
            KernelSpec::epanechnikov(0.3).unwrap(),
        );
        run_parametric_bootstrap(&data, ModelClass::Ar(1), 3, &config, 77).unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let ens = small_ensemble();
        let bytes = persist_ensemble(&ens).unwrap();
        let back = load_ensemble(&bytes).unwrap();
        assert_eq!(back.seed, ens.seed);
        assert_eq!(back.r, ens.r);
        assert_eq!(back.fitted.objective_value.to_bits(), ens.fitted.objective_value.to_bits());
        assert_eq!(back.config, ens.config);
        for (a, b) in back.replicates.iter().zip(&ens.replicates) {
            for (x, y) in a.values().iter().zip(b.values()) {
                assert_eq!(x.re.to_bits(), y.re.to_bits());
                assert_eq!(x.im.to_bits(), y.im.to_bits());
            }
        }
    }

    #[test]
    fn truncation_names_byte_counts() {
        let ens = small_ensemble();
        let bytes = persist_ensemble(&ens).unwrap();
        let err = load_ensemble(&bytes[..bytes.len() - 5]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("expected") && msg.contains("found"), "{msg}");
    }

    #[test]
    fn version_mismatch_is_explicit() {
        let ens = small_ensemble();
        let mut bytes = persist_ensemble(&ens).unwrap();
        bytes[8] = 99; // bump the version field
        let err = load_ensemble(&bytes).unwrap_err();
        assert!(err.to_string().contains("version"), "{err}");
    }

    #[test]
    fn bad_magic_is_rejected() {
        let err = load_ensemble(b"NOTMAGIC rest").unwrap_err();
        assert!(err.to_string().contains("magic"), "{err}");
    }
}
