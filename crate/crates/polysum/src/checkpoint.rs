//! Resumable long-range verification. A checkpoint file holds a JSON
//! header (claim id, bound, cursor) followed by a dense bitmap of the
//! verified range, flushed every `CHECKPOINT_INTERVAL` integers.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integers verified between checkpoint flushes.
pub const CHECKPOINT_INTERVAL: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct Header {
    claim: String,
    bound: u64,
    cursor: u64,
}

/// Progress of one claim's scan over `[1, bound]`. Bit `n-1` of the bitmap
/// is set when `n` has been verified.
#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    claim: String,
    bound: u64,
    cursor: u64,
    bitmap: Vec<u8>,
}

impl Checkpoint {
    pub fn new(claim: &str, bound: u64) -> Self {
        Checkpoint {
            claim: claim.to_string(),
            bound,
            cursor: 0,
            bitmap: vec![0; (bound as usize).div_ceil(8)],
        }
    }

    pub fn claim(&self) -> &str {
        &self.claim
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    /// The next unverified integer (1-based); `bound + 1` when complete.
    pub fn cursor(&self) -> u64 {
        self.cursor + 1
    }

    pub fn complete(&self) -> bool {
        self.cursor >= self.bound
    }

    pub fn verified(&self, n: u64) -> bool {
        assert!(n >= 1 && n <= self.bound);
        let i = (n - 1) as usize;
        self.bitmap[i / 8] & (1 << (i % 8)) != 0
    }

    /// Marks `[cursor, upto]` verified and advances the cursor.
    pub fn advance(&mut self, upto: u64) {
        assert!(upto <= self.bound);
        for n in self.cursor + 1..=upto {
            let i = (n - 1) as usize;
            self.bitmap[i / 8] |= 1 << (i % 8);
        }
        self.cursor = self.cursor.max(upto);
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let header = Header {
            claim: self.claim.clone(),
            bound: self.bound,
            cursor: self.cursor,
        };
        let tmp = path.with_extension("tmp");
        {
            let mut f = std::fs::File::create(&tmp)?;
            serde_json::to_writer(&mut f, &header)
                .map_err(|e| Error::Invalid(format!("checkpoint header: {e}")))?;
            f.write_all(b"\n")?;
            f.write_all(&self.bitmap)?;
        }
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut raw = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut raw)?;
        let split = raw
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| Error::Invalid("checkpoint missing header line".into()))?;
        let header: Header = serde_json::from_slice(&raw[..split])
            .map_err(|e| Error::Invalid(format!("checkpoint header: {e}")))?;
        let bitmap = raw[split + 1..].to_vec();
        if bitmap.len() != (header.bound as usize).div_ceil(8) {
            return Err(Error::Invalid("checkpoint bitmap truncated".into()));
        }
        Ok(Checkpoint {
            claim: header.claim,
            bound: header.bound,
            cursor: header.cursor,
            bitmap,
        })
    }

    /// Loads an existing checkpoint compatible with `(claim, bound)` or
    /// starts a fresh one.
    pub fn resume(path: &Path, claim: &str, bound: u64) -> Result<Self> {
        if path.exists() {
            let cp = Self::load(path)?;
            if cp.claim == claim && cp.bound == bound {
                return Ok(cp);
            }
            return Err(Error::Invalid(format!(
                "checkpoint at {} is for claim `{}` bound {}, not `{claim}` bound {bound}",
                path.display(),
                cp.claim,
                cp.bound
            )));
        }
        Ok(Self::new(claim, bound))
    }
}

/// Scans `[1, bound]` in checkpoint intervals. `check(lo, hi)` returns the
/// failures in that window; progress is flushed to `path` after each
/// window, and completed windows are skipped on resume.
pub fn checkpointed_scan(
    path: &Path,
    claim: &str,
    bound: u64,
    mut check: impl FnMut(u64, u64) -> Result<Vec<u64>>,
) -> Result<(Checkpoint, Vec<u64>)> {
    let mut cp = Checkpoint::resume(path, claim, bound)?;
    let mut failures = Vec::new();
    while !cp.complete() {
        let lo = cp.cursor();
        let hi = (lo + CHECKPOINT_INTERVAL - 1).min(bound);
        failures.extend(check(lo, hi)?);
        cp.advance(hi);
        cp.save(path)?;
    }
    Ok((cp, failures))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_resume() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("euler.ckpt");
        let mut cp = Checkpoint::new("euler-pair", 100);
        cp.advance(40);
        cp.save(&path).unwrap();
        let loaded = Checkpoint::load(&path).unwrap();
        assert_eq!(loaded, cp);
        assert!(loaded.verified(40));
        assert!(!loaded.verified(41));
        assert_eq!(loaded.cursor(), 41);
        // Mismatched claim refuses to resume.
        assert!(Checkpoint::resume(&path, "other", 100).is_err());
        assert!(Checkpoint::resume(&path, "euler-pair", 200).is_err());
    }

    #[test]
    fn scan_skips_completed_windows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scan.ckpt");
        let mut cp = Checkpoint::new("demo", 25_000_000);
        cp.advance(CHECKPOINT_INTERVAL);
        cp.save(&path).unwrap();
        let mut windows = Vec::new();
        let (done, failures) = checkpointed_scan(&path, "demo", 25_000_000, |lo, hi| {
            windows.push((lo, hi));
            Ok(if lo <= 20_000_001 && 20_000_001 <= hi {
                vec![20_000_001]
            } else {
                vec![]
            })
        })
        .unwrap();
        assert!(done.complete());
        assert_eq!(
            windows,
            vec![(10_000_001, 20_000_000), (20_000_001, 25_000_000)]
        );
        assert_eq!(failures, vec![20_000_001]);
    }
}
