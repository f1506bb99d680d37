//! On-disk artifact formats: dense f64 matrices, factor models, and the
//! config fingerprint that ties stage outputs to the config that made them.
//!
//! Matrix file (`PVMAT1`): 8-byte magic, u64 rows, u64 cols, then
//! `rows·cols` f64 values row-major. All integers and floats little-endian.
//!
//! Factor-model file (`PVNMF1`): 8-byte magic, u64 features, u64 samples,
//! u64 k, u64 seed, u64 degenerate flag (0/1), u64 trace length, the trace
//! as f64s, then W (features×k) and H (k×samples) row-major. Loading
//! round-trips bit-exactly.

use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use ndarray::Array2;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::nmf::FactorModel;

const MAT_MAGIC: &[u8; 8] = b"PVMAT1\0\0";
const NMF_MAGIC: &[u8; 8] = b"PVNMF1\0\0";

fn corrupt(path: &Path, reason: impl Into<String>) -> Error {
    Error::CorruptArtifact {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

fn write_u64<W: Write>(w: &mut W, v: u64) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn write_f64_slice<W: Write>(w: &mut W, values: impl Iterator<Item = f64>) -> Result<()> {
    for v in values {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn read_u64<R: Read>(r: &mut R) -> std::io::Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

fn read_f64_vec<R: Read>(r: &mut R, len: usize) -> std::io::Result<Vec<f64>> {
    let mut out = Vec::with_capacity(len);
    let mut buf = [0u8; 8];
    for _ in 0..len {
        r.read_exact(&mut buf)?;
        out.push(f64::from_le_bytes(buf));
    }
    Ok(out)
}

pub fn write_matrix(path: &Path, matrix: &Array2<f64>) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    w.write_all(MAT_MAGIC)?;
    write_u64(&mut w, matrix.nrows() as u64)?;
    write_u64(&mut w, matrix.ncols() as u64)?;
    write_f64_slice(&mut w, matrix.iter().copied())?;
    w.flush()?;
    Ok(())
}

pub fn read_matrix(path: &Path) -> Result<Array2<f64>> {
    let mut r = BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAT_MAGIC {
        return Err(corrupt(path, "bad matrix magic"));
    }
    let rows = read_u64(&mut r)? as usize;
    let cols = read_u64(&mut r)? as usize;
    let data = read_f64_vec(&mut r, rows * cols)?;
    Array2::from_shape_vec((rows, cols), data).map_err(|e| corrupt(path, e.to_string()))
}

pub fn write_factor_model(path: &Path, model: &FactorModel) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    w.write_all(NMF_MAGIC)?;
    write_u64(&mut w, model.features() as u64)?;
    write_u64(&mut w, model.samples() as u64)?;
    write_u64(&mut w, model.k as u64)?;
    write_u64(&mut w, model.seed)?;
    write_u64(&mut w, model.degenerate as u64)?;
    write_u64(&mut w, model.objective_trace.len() as u64)?;
    write_f64_slice(&mut w, model.objective_trace.iter().copied())?;
    write_f64_slice(&mut w, model.w.iter().copied())?;
    write_f64_slice(&mut w, model.h.iter().copied())?;
    w.flush()?;
    Ok(())
}

pub fn read_factor_model(path: &Path) -> Result<FactorModel> {
    let mut r = BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != NMF_MAGIC {
        return Err(corrupt(path, "bad factor-model magic"));
    }
    let features = read_u64(&mut r)? as usize;
    let samples = read_u64(&mut r)? as usize;
    let k = read_u64(&mut r)? as usize;
    let seed = read_u64(&mut r)?;
    let degenerate = match read_u64(&mut r)? {
        0 => false,
        1 => true,
        other => return Err(corrupt(path, format!("bad degenerate flag {other}"))),
    };
    let trace_len = read_u64(&mut r)? as usize;
    let objective_trace = read_f64_vec(&mut r, trace_len)?;
    let w_data = read_f64_vec(&mut r, features * k)?;
    let h_data = read_f64_vec(&mut r, k * samples)?;
    let w = Array2::from_shape_vec((features, k), w_data).map_err(|e| corrupt(path, e.to_string()))?;
    let h = Array2::from_shape_vec((k, samples), h_data).map_err(|e| corrupt(path, e.to_string()))?;
    Ok(FactorModel {
        w,
        h,
        k,
        objective_trace,
        seed,
        degenerate,
    })
}

/// Short hex fingerprint of any serializable value (first 16 hex chars of
/// its SHA-256 over canonical JSON).
pub fn fingerprint_of<T: serde::Serialize>(value: &T) -> String {
    let json = serde_json::to_vec(value).expect("fingerprint serialization");
    let digest = Sha256::digest(&json);
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Derives a named RNG substream from the base seed. Every stage draws from
/// its own label so adding a stage never perturbs another's randomness.
pub fn derive_seed(base: u64, label: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(base.to_le_bytes());
    hasher.update(label.as_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

/// Directory layout of pipeline artifacts plus fingerprint checks.
#[derive(Debug, Clone)]
pub struct ArtifactStore {
    pub root: PathBuf,
    pub fingerprint: String,
    /// Accept artifacts with a stale fingerprint.
    pub force: bool,
}

impl ArtifactStore {
    pub fn new(root: impl Into<PathBuf>, fingerprint: String, force: bool) -> Self {
        ArtifactStore {
            root: root.into(),
            fingerprint,
            force,
        }
    }

    pub fn ensure_root(&self) -> Result<()> {
        std::fs::create_dir_all(&self.root)?;
        std::fs::create_dir_all(self.root.join("heatmaps"))?;
        std::fs::create_dir_all(self.root.join("models"))?;
        Ok(())
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// Fails with a dependency error when the artifact is absent.
    pub fn require(&self, name: &str, stage: &str) -> Result<PathBuf> {
        let path = self.path(name);
        if !path.exists() {
            return Err(Error::MissingArtifact {
                artifact: name.to_string(),
                stage: stage.to_string(),
                path,
            });
        }
        Ok(path)
    }

    /// Verifies a stage summary's embedded fingerprint against the current
    /// config, unless `force` is set.
    pub fn check_fingerprint(&self, artifact: &str, found: &str) -> Result<()> {
        if !self.force && found != self.fingerprint {
            return Err(Error::FingerprintMismatch {
                artifact: artifact.to_string(),
                expected: self.fingerprint.clone(),
                found: found.to_string(),
            });
        }
        Ok(())
    }

    pub fn write_json<T: serde::Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        std::fs::write(self.path(name), bytes)?;
        Ok(())
    }

    pub fn read_json<T: serde::de::DeserializeOwned>(&self, name: &str, stage: &str) -> Result<T> {
        let path = self.require(name, stage)?;
        let bytes = std::fs::read(&path)?;
        Ok(serde_json::from_slice(&bytes)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn matrix_round_trips_bit_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.mat");
        let m = array![[1.5, -0.0, f64::MIN_POSITIVE], [3.25, 1e-300, 0.1 + 0.2]];
        write_matrix(&path, &m).unwrap();
        let back = read_matrix(&path).unwrap();
        assert_eq!(m.dim(), back.dim());
        for (a, b) in m.iter().zip(back.iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn factor_model_round_trips_bit_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.nmf");
        let m = array![[1.0, 2.0, 0.5], [0.25, 1.0, 2.0], [2.0, 0.0, 1.0], [0.5, 1.5, 0.75]];
        let model = crate::nmf::nmf_fit(&m.view(), 2, &crate::nmf::NmfOptions::default()).unwrap();
        write_factor_model(&path, &model).unwrap();
        let back = read_factor_model(&path).unwrap();
        assert_eq!(model, back);
        for (a, b) in model.w.iter().zip(back.w.iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn corrupt_magic_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.mat");
        std::fs::write(&path, b"NOTMAGIC0000000000000000").unwrap();
        assert!(matches!(read_matrix(&path), Err(Error::CorruptArtifact { .. })));
    }

    #[test]
    fn derived_seeds_differ_by_label_and_base() {
        let a = derive_seed(42, "nmf.shot");
        let b = derive_seed(42, "nmf.cross");
        let c = derive_seed(43, "nmf.shot");
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, derive_seed(42, "nmf.shot"));
    }

    #[test]
    fn fingerprints_are_stable_and_sensitive() {
        #[derive(serde::Serialize)]
        struct Cfg {
            a: u32,
        }
        assert_eq!(fingerprint_of(&Cfg { a: 1 }), fingerprint_of(&Cfg { a: 1 }));
        assert_ne!(fingerprint_of(&Cfg { a: 1 }), fingerprint_of(&Cfg { a: 2 }));
    }
}
