//! On-disk sieve cache.
//!
//! Files live in `$PILTZ_CACHE_DIR` and are named `<sha256>.dk`, the hash taken
//! over the field (label, coefficients, discriminant override, local splitting
//! data), `k` and `N`. All integers are little-endian:
//!
//! | offset | size | field                              |
//! |--------|------|------------------------------------|
//! | 0      | 8    | magic `PILTZDK\0`                  |
//! | 8      | 4    | format version (1)                 |
//! | 12     | 4    | `k`                                |
//! | 16     | 8    | `N`                                |
//! | 24     | 32   | key hash                           |
//! | 56     | 4    | label length `L` in bytes          |
//! | 60     | L    | label, UTF-8                       |
//! | 60+L   | 8N   | `d(1), ..., d(N)` as `u64`         |

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use piltz_core::divisor::{sieve_divisors, DivisorTable};
use sha2::{Digest, Sha256};

use crate::config::Field;
use crate::error::AppError;

pub const CACHE_ENV: &str = "PILTZ_CACHE_DIR";
const MAGIC: &[u8; 8] = b"PILTZDK\0";
const VERSION: u32 = 1;

/// Cache directory from the environment, if set and non-empty.
pub fn cache_dir() -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

pub fn cache_key(field: &Field, k: u32, n: u64) -> [u8; 32] {
    let c = &field.config;
    let mut h = Sha256::new();
    h.update(b"piltz-sieve-v1\0");
    h.update((c.label.len() as u64).to_le_bytes());
    h.update(c.label.as_bytes());
    h.update((c.coeffs.len() as u64).to_le_bytes());
    for a in &c.coeffs {
        h.update(a.to_le_bytes());
    }
    h.update(c.d.unwrap_or(0).to_le_bytes());
    for local in &c.local_splitting {
        h.update(local.p.to_le_bytes());
        h.update((local.factors.len() as u64).to_le_bytes());
        for [f, e] in &local.factors {
            h.update(f.to_le_bytes());
            h.update(e.to_le_bytes());
        }
    }
    h.update(k.to_le_bytes());
    h.update(n.to_le_bytes());
    let mut out = [0u8; 32];
    out.copy_from_slice(&h.finalize());
    out
}

pub fn cache_path(dir: &Path, key: &[u8; 32]) -> PathBuf {
    let name: String = key.iter().map(|b| format!("{b:02x}")).collect();
    dir.join(format!("{name}.dk"))
}

pub fn write_table(path: &Path, table: &DivisorTable, key: &[u8; 32]) -> io::Result<()> {
    let label = table.field_label().as_bytes();
    let mut buf = Vec::with_capacity(60 + label.len() + 8 * table.len() as usize);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&table.k().to_le_bytes());
    buf.extend_from_slice(&table.len().to_le_bytes());
    buf.extend_from_slice(key);
    buf.extend_from_slice(&(label.len() as u32).to_le_bytes());
    buf.extend_from_slice(label);
    for v in table.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    // write-then-rename so concurrent readers never see a partial file
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    fs::File::create(&tmp)?.write_all(&buf)?;
    fs::rename(&tmp, path)
}

fn invalid(msg: &str) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg)
}

/// Reads a cache file, checking the header against the expected key.
pub fn read_table(path: &Path, key: &[u8; 32], unresolved: Vec<u64>) -> io::Result<DivisorTable> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 60 || &bytes[..8] != MAGIC {
        return Err(invalid("not a sieve cache file"));
    }
    let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
    let u64_at = |i: usize| u64::from_le_bytes(bytes[i..i + 8].try_into().unwrap());
    if u32_at(8) != VERSION {
        return Err(invalid("unsupported cache version"));
    }
    let k = u32_at(12);
    let n = u64_at(16);
    if &bytes[24..56] != key {
        return Err(invalid("cache key mismatch"));
    }
    let label_len = u32_at(56) as usize;
    let data = 60 + label_len;
    if bytes.len() as u64 != data as u64 + 8 * n {
        return Err(invalid("truncated cache file"));
    }
    let label = std::str::from_utf8(&bytes[60..data]).map_err(|_| invalid("label is not UTF-8"))?;
    let values: Vec<u64> = bytes[data..].chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().unwrap())).collect();
    DivisorTable::from_values(label, k, &values, unresolved).map_err(|e| invalid(&e.to_string()))
}

/// `d_K^(k)(n)` for `n <= N`, read from the cache when possible.
pub fn load_or_sieve(field: &Field, k: u32, n: u64, dir: Option<&Path>) -> Result<DivisorTable, AppError> {
    let Some(dir) = dir else {
        return Ok(sieve_divisors(&field.spec, k, n)?);
    };
    let key = cache_key(field, k, n);
    let path = cache_path(dir, &key);
    if let Ok(table) = read_table(&path, &key, field.spec.unresolved_primes()) {
        return Ok(table);
    }
    let table = sieve_divisors(&field.spec, k, n)?;
    fs::create_dir_all(dir).map_err(|e| AppError::Io(format!("cache directory {}: {e}", dir.display())))?;
    write_table(&path, &table, &key).map_err(|e| AppError::Io(format!("cache file {}: {e}", path.display())))?;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::builtin;

    #[test]
    fn round_trip_and_key_checks() {
        let dir = std::env::temp_dir().join(format!("piltz-cache-unit-{}", std::process::id()));
        let qi = Field::from_json(builtin::GAUSSIAN).unwrap();
        let fresh = load_or_sieve(&qi, 2, 1000, Some(&dir)).unwrap();
        let key = cache_key(&qi, 2, 1000);
        let path = cache_path(&dir, &key);
        assert_eq!(fs::metadata(&path).unwrap().len(), 60 + 4 + 8 * 1000);
        assert_eq!(read_table(&path, &key, vec![]).unwrap(), fresh);
        assert_eq!(load_or_sieve(&qi, 2, 1000, Some(&dir)).unwrap(), fresh);
        assert!(read_table(&path, &cache_key(&qi, 1, 1000), vec![]).is_err());
        assert_ne!(cache_key(&qi, 2, 1000), cache_key(&qi, 2, 1001));
        let q = Field::from_json(builtin::RATIONALS).unwrap();
        assert_ne!(cache_key(&q, 2, 1000), key);
        fs::remove_dir_all(&dir).unwrap();
    }
}
