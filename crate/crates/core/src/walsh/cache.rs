//! Write-once on-disk store for computed spectra.
//!
//! Files are content-addressed by the function digest (which covers p, m,
//! the modulus, and the whole value table), so a cache hit can simply be
//! trusted after its header is validated. Layout, all little-endian:
//!
//! ```text
//! u64 p | u32 m | (m+1)×u64 modulus | 32 bytes f_hash |
//! q·(p−1) coefficients, each: i64, or i64::MIN ⧺ sign u8 ⧺ len u32 ⧺ len
//! magnitude bytes for values outside i64 (or equal to the sentinel)
//! ```

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use num_bigint::{BigInt, Sign};

use super::WalshSpectrum;
use crate::cyclo::Cyc;
use crate::error::{Error, Result};
use crate::gf::FieldCtx;

/// Escape marker: a coefficient stored as a big-integer record follows.
const SENTINEL: i64 = i64::MIN;

/// A directory of immutable spectrum files keyed by function digest.
#[derive(Debug, Clone)]
pub struct SpectrumCache {
    dir: PathBuf,
}

impl SpectrumCache {
    /// Opens (creating if needed) a cache rooted at `dir`.
    pub fn new(dir: impl Into<PathBuf>) -> Result<SpectrumCache> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(SpectrumCache { dir })
    }

    /// The directory backing this cache.
    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// The file a given function digest maps to.
    pub fn path_for(&self, f_hash: &str) -> PathBuf {
        self.dir.join(format!("{f_hash}.walsh"))
    }

    /// Persists a spectrum; a no-op if the file already exists (entries are
    /// content-addressed, so an existing file has identical content).
    /// Writes go to a temporary file followed by an atomic rename.
    pub fn store(&self, spec: &WalshSpectrum) -> Result<PathBuf> {
        let path = self.path_for(spec.f_hash());
        if path.exists() {
            return Ok(path);
        }
        let ctx = spec.ctx();
        let mut buf: Vec<u8> = Vec::new();
        buf.extend_from_slice(&ctx.p().to_le_bytes());
        buf.extend_from_slice(&ctx.m().to_le_bytes());
        for &c in ctx.modulus() {
            buf.extend_from_slice(&c.to_le_bytes());
        }
        let digest = hex::decode(spec.f_hash()).map_err(|_| Error::CacheCorrupt {
            reason: "spectrum digest is not hex".to_string(),
        })?;
        if digest.len() != 32 {
            return Err(Error::CacheCorrupt {
                reason: "spectrum digest is not 32 bytes".to_string(),
            });
        }
        buf.extend_from_slice(&digest);
        for value in spec.values() {
            for coeff in value.coeffs() {
                write_coeff(&mut buf, coeff);
            }
        }

        let nanos = SystemTime::now().duration_since(UNIX_EPOCH).unwrap_or_default().as_nanos();
        let tmp = self.dir.join(format!(".{}.{}.{nanos}.tmp", spec.f_hash(), std::process::id()));
        {
            let mut file = fs::File::create(&tmp)?;
            file.write_all(&buf)?;
            file.sync_all()?;
        }
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    /// Loads the spectrum for `f_hash` if present, validating the header
    /// against the supplied field.
    pub fn load(&self, ctx: &Arc<FieldCtx>, f_hash: &str) -> Result<Option<WalshSpectrum>> {
        let path = self.path_for(f_hash);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let mut r = Reader { bytes: &bytes, pos: 0 };
        let p = r.u64()?;
        let m = r.u32()?;
        if p != ctx.p() || m != ctx.m() {
            return Err(corrupt("header field parameters do not match the requested field"));
        }
        for &c in ctx.modulus() {
            if r.u64()? != c {
                return Err(corrupt("header modulus does not match the requested field"));
            }
        }
        let digest = r.take(32)?;
        if hex::encode(digest) != f_hash {
            return Err(corrupt("header digest does not match the file name"));
        }
        let q = ctx.q();
        let coeffs_per_value = (p - 1) as usize;
        let mut values = Vec::with_capacity(q as usize);
        let mut raw = vec![BigInt::from(0); p as usize];
        for _ in 0..q {
            for slot in raw.iter_mut().skip(1) {
                *slot = r.coeff()?;
            }
            debug_assert_eq!(raw.len() - 1, coeffs_per_value);
            values.push(Cyc::from_raw(p, &raw));
        }
        if r.pos != bytes.len() {
            return Err(corrupt("trailing bytes after the last coefficient"));
        }
        Ok(Some(WalshSpectrum::from_parts(Arc::clone(ctx), values, f_hash.to_string())))
    }
}

fn corrupt(reason: &str) -> Error {
    Error::CacheCorrupt { reason: reason.to_string() }
}

fn write_coeff(buf: &mut Vec<u8>, c: &BigInt) {
    match i64::try_from(c) {
        Ok(v) if v != SENTINEL => buf.extend_from_slice(&v.to_le_bytes()),
        _ => {
            buf.extend_from_slice(&SENTINEL.to_le_bytes());
            let (sign, mag) = c.to_bytes_le();
            buf.push(if sign == Sign::Minus { 1 } else { 0 });
            buf.extend_from_slice(&(mag.len() as u32).to_le_bytes());
            buf.extend_from_slice(&mag);
        }
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(corrupt("unexpected end of file"));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn i64(&mut self) -> Result<i64> {
        Ok(i64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn coeff(&mut self) -> Result<BigInt> {
        let v = self.i64()?;
        if v != SENTINEL {
            return Ok(BigInt::from(v));
        }
        let sign = match self.take(1)?[0] {
            0 => Sign::Plus,
            1 => Sign::Minus,
            _ => return Err(corrupt("invalid sign byte in big-integer record")),
        };
        let len = self.u32()? as usize;
        let mag = self.take(len)?;
        if mag.is_empty() {
            return Ok(BigInt::from(0));
        }
        Ok(BigInt::from_bytes_le(sign, mag))
    }
}

// ===========================================================================
// tests
// ===========================================================================
