//! On-disk spectrum cache.
//!
//! File layout (little endian): the 8-byte magic `NESPEC01`, `u64` key
//! length followed by the UTF-8 key, `u64` dimension `n`, `f64` γ₀, `n`
//! eigenvalues as `f64`, then the `n × n` eigenvectors as `f64`, one
//! eigenvector after another.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::network::{ConnectivityGraph, Hamiltonian};
use crate::scalar::Real;
use crate::spectral::{diagonalize, Spectrum};

const MAGIC: &[u8; 8] = b"NESPEC01";

/// Cache key for the Hamiltonian built from `graph` with the given energies.
pub fn cache_key(graph: &ConnectivityGraph, e0: f64, gamma0: f64) -> String {
    let mut h = Sha256::new();
    h.update(graph.content_hash().as_bytes());
    h.update(e0.to_le_bytes());
    h.update(gamma0.to_le_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn write_spectrum<T: Real>(path: &Path, key: &str, s: &Spectrum<T>) -> Result<()> {
    let io = |e| Error::io(path, e);
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    let n = s.dim();
    w.write_all(MAGIC).map_err(io)?;
    w.write_all(&(key.len() as u64).to_le_bytes()).map_err(io)?;
    w.write_all(key.as_bytes()).map_err(io)?;
    w.write_all(&(n as u64).to_le_bytes()).map_err(io)?;
    w.write_all(&s.gamma0().as_f64().to_le_bytes())
        .map_err(io)?;
    for &e in s.eigenvalues() {
        w.write_all(&e.as_f64().to_le_bytes()).map_err(io)?;
    }
    for &v in s.eigenvector_rows().as_slice() {
        w.write_all(&v.as_f64().to_le_bytes()).map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Reads a cached spectrum; `expected_key` guards against stale files.
pub fn read_spectrum<T: Real>(path: &Path, expected_key: Option<&str>) -> Result<Spectrum<T>> {
    let io = |e| Error::io(path, e);
    let bad = |reason: &str| Error::Cache {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };
    let mut r = BufReader::new(File::open(path).map_err(io)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(io)?;
    if &magic != MAGIC {
        return Err(bad("not a spectrum cache file"));
    }
    let mut word = [0u8; 8];
    let mut read_u64 = |r: &mut BufReader<File>| -> Result<u64> {
        r.read_exact(&mut word).map_err(io)?;
        Ok(u64::from_le_bytes(word))
    };
    let key_len = read_u64(&mut r)? as usize;
    if key_len > 1024 {
        return Err(bad("corrupt key length"));
    }
    let mut key = vec![0u8; key_len];
    r.read_exact(&mut key).map_err(io)?;
    if let Some(want) = expected_key {
        if key != want.as_bytes() {
            return Err(bad("key does not match the requested Hamiltonian"));
        }
    }
    let n = read_u64(&mut r)? as usize;
    let gamma0 = f64::from_bits(read_u64(&mut r)?);
    let mut floats = |count: usize| -> Result<Vec<T>> {
        let mut buf = vec![0u8; count * 8];
        r.read_exact(&mut buf).map_err(io)?;
        Ok(buf
            .chunks_exact(8)
            .map(|c| T::lit(f64::from_le_bytes(c.try_into().unwrap())))
            .collect())
    };
    let values = floats(n)?;
    let vectors = Matrix::from_row_major(floats(n * n)?)?;
    Spectrum::from_parts(values, vectors, T::lit(gamma0))
}

/// Directory of cached spectra, one file per key.
#[derive(Debug, Clone)]
pub struct SpectrumCache {
    dir: PathBuf,
}

impl SpectrumCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(Self { dir })
    }

    pub fn path_for(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.spectrum"))
    }

    /// Loads the spectrum for `graph` or diagonalizes `h` and stores it.
    pub fn get_or_compute<T: Real>(
        &self,
        graph: &ConnectivityGraph,
        h: &Hamiltonian<T>,
    ) -> Result<Spectrum<T>> {
        let key = cache_key(graph, h.e0().as_f64(), h.gamma0().as_f64());
        let path = self.path_for(&key);
        if path.exists() {
            if let Ok(s) = read_spectrum(&path, Some(&key)) {
                return Ok(s.with_id(graph.content_hash()));
            }
        }
        let s = diagonalize(h)?.with_id(graph.content_hash());
        // write to a temporary name first so concurrent readers never see a partial file
        let tmp = self.dir.join(format!("{key}.{}.tmp", std::process::id()));
        write_spectrum(&tmp, &key, &s)?;
        std::fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))?;
        Ok(s)
    }
}
