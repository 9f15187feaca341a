//! Binary snapshot of a quantum run, little-endian throughout:
//!
//! ```text
//! magic   8 bytes  "RATCHKP1"
//! dim     u64
//! hbar    f64
//! step    u64      kicks applied so far
//! hash    u64      params_hash of the run
//! rho     dim*dim (re f64, im f64) pairs, row-major
//! len     u64      entries of the J(t) record
//! series  len (t u64, J f64) pairs
//! ```

use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use sha2::{Digest, Sha256};

use super::density::{DensityMatrix, MomentumBasis};
use super::QuantumError;
use crate::observables::CurrentSeries;
use crate::params::{CouplingRule, QuantumParams, Splitting};

const MAGIC: &[u8; 8] = b"RATCHKP1";

/// Stable digest of everything that shapes the dynamics.
pub fn params_hash(params: &QuantumParams) -> u64 {
    let b = &params.base;
    let mut h = Sha256::new();
    for v in [b.kick_strength, b.asymmetry, b.phase, b.gamma, b.temperature, params.hbar_eff, params.temperature_scale] {
        h.update(v.to_le_bytes());
    }
    h.update((params.n_max as u64).to_le_bytes());
    h.update((params.substeps.unwrap_or(0) as u64).to_le_bytes());
    h.update([
        match params.coupling {
            CouplingRule::MomentumDecay => 0u8,
            CouplingRule::LogComplement => 1,
        },
        params.diagonal_dissipator as u8,
        params.kick_last as u8,
        match params.splitting {
            Splitting::Sequential => 0,
            Splitting::Simultaneous => 1,
        },
    ]);
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest is 32 bytes"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub rho: DensityMatrix,
    pub step: u64,
    pub params_hash: u64,
    pub series: CurrentSeries,
}

impl Checkpoint {
    /// Refuses a snapshot taken under different parameters.
    pub fn verify(&self, params: &QuantumParams) -> Result<(), QuantumError> {
        if self.rho.dim() != params.dimension() {
            return Err(QuantumError::Checkpoint(format!(
                "dimension {} does not match the configured {}",
                self.rho.dim(),
                params.dimension()
            )));
        }
        if self.rho.hbar_eff() != params.hbar_eff {
            return Err(QuantumError::Checkpoint(format!(
                "hbar_eff {} does not match the configured {}",
                self.rho.hbar_eff(),
                params.hbar_eff
            )));
        }
        if self.params_hash != params_hash(params) {
            return Err(QuantumError::CheckpointMismatch);
        }
        Ok(())
    }
}

/// Writes through a temporary file and renames it, so an interrupted write
/// never leaves a truncated checkpoint behind.
pub fn write_checkpoint(path: &Path, ckpt: &Checkpoint) -> Result<(), QuantumError> {
    let tmp = path.with_extension("tmp");
    {
        let mut w = BufWriter::new(fs::File::create(&tmp)?);
        w.write_all(MAGIC)?;
        w.write_all(&(ckpt.rho.dim() as u64).to_le_bytes())?;
        w.write_all(&ckpt.rho.hbar_eff().to_le_bytes())?;
        w.write_all(&ckpt.step.to_le_bytes())?;
        w.write_all(&ckpt.params_hash.to_le_bytes())?;
        for c in ckpt.rho.as_slice() {
            w.write_all(&c.re.to_le_bytes())?;
            w.write_all(&c.im.to_le_bytes())?;
        }
        w.write_all(&(ckpt.series.len() as u64).to_le_bytes())?;
        for e in ckpt.series.entries() {
            w.write_all(&e.t.to_le_bytes())?;
            w.write_all(&e.current.to_le_bytes())?;
        }
        w.into_inner().map_err(|e| e.into_error())?.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn read_u64(r: &mut impl Read) -> Result<u64, QuantumError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64, QuantumError> {
    Ok(f64::from_bits(read_u64(r)?))
}

pub fn read_checkpoint(path: &Path) -> Result<Checkpoint, QuantumError> {
    let mut r = BufReader::new(fs::File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(QuantumError::Checkpoint("not a checkpoint file".into()));
    }
    let dim = read_u64(&mut r)? as usize;
    if dim % 2 == 0 || dim > 1 << 16 {
        return Err(QuantumError::Checkpoint(format!("implausible dimension {dim}")));
    }
    let hbar = read_f64(&mut r)?;
    let step = read_u64(&mut r)?;
    let hash = read_u64(&mut r)?;
    let mut data = Vec::with_capacity(dim * dim);
    for _ in 0..dim * dim {
        let re = read_f64(&mut r)?;
        let im = read_f64(&mut r)?;
        data.push(Complex64::new(re, im));
    }
    let len = read_u64(&mut r)?;
    let mut series = CurrentSeries::new();
    for _ in 0..len {
        let t = read_u64(&mut r)?;
        let j = read_f64(&mut r)?;
        series.push(t, j, None);
    }
    let rho = DensityMatrix::from_raw(MomentumBasis::new(dim / 2), hbar, data);
    Ok(Checkpoint { rho, step, params_hash: hash, series })
}
