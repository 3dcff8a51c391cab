//! Deterministic per-task random streams.
//!
//! Every random stream in an experiment is seeded from the master seed and a
//! task path such as `"hh/run0/train/iter3/inst7"`:
//!
//! ```text
//! seed = SHA-256("polyhh-seed-v1" || master as u64 little-endian || path)
//! ```
//!
//! and drives a ChaCha8 generator. Workers never share a stream, so results do
//! not depend on scheduling or worker count.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub type SearchRng = ChaCha8Rng;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct RunSeed([u8; 32]);

impl RunSeed {
    pub fn derive(master: u64, path: &str) -> Self {
        let mut h = Sha256::new();
        h.update(b"polyhh-seed-v1");
        h.update(master.to_le_bytes());
        h.update(path.as_bytes());
        RunSeed(h.finalize().into())
    }

    /// A child stream of this seed.
    pub fn child(&self, path: &str) -> Self {
        let mut h = Sha256::new();
        h.update(b"polyhh-seed-v1/child");
        h.update(self.0);
        h.update(path.as_bytes());
        RunSeed(h.finalize().into())
    }

    pub fn rng(&self) -> SearchRng {
        ChaCha8Rng::from_seed(self.0)
    }

    pub fn bytes(&self) -> [u8; 32] {
        self.0
    }
}

impl fmt::Display for RunSeed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for RunSeed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RunSeed({self})")
    }
}

impl FromStr for RunSeed {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.len() != 64 || !s.is_ascii() {
            return Err(format!("seed must be 64 hex digits, got {s:?}"));
        }
        let mut out = [0u8; 32];
        for (i, b) in out.iter_mut().enumerate() {
            *b = u8::from_str_radix(&s[2 * i..2 * i + 2], 16)
                .map_err(|e| format!("bad seed {s:?}: {e}"))?;
        }
        Ok(RunSeed(out))
    }
}

impl From<RunSeed> for String {
    fn from(s: RunSeed) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for RunSeed {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}
