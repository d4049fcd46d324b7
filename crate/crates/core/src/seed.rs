//! Reproducible random streams.
//!
//! A [`Seed`] is a root value plus a derivation path. Every parallel task
//! derives its own child seed from its task index, so the random stream a task
//! sees depends only on `(value, path)` and never on how work is scheduled
//! across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The random generator used throughout the crate.
pub type Rng = ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Seed {
    value: u64,
    path: Vec<u64>,
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Seed {
    pub fn new(value: u64) -> Self {
        Self {
            value,
            path: Vec::new(),
        }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn path(&self) -> &[u64] {
        &self.path
    }

    /// Derive the seed of sub-task `index`.
    pub fn child(&self, index: u64) -> Self {
        let mut path = self.path.clone();
        path.push(index);
        Self {
            value: self.value,
            path,
        }
    }

    /// Derive a child from a string label, e.g. `"unitary"` or `"ideal"`.
    pub fn child_named(&self, label: &str) -> Self {
        // FNV-1a keeps labels stable across platforms and releases.
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in label.bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        self.child(h)
    }

    /// Collapse `(value, path)` into a single 64-bit digest.
    pub fn digest(&self) -> u64 {
        let mut state = splitmix(self.value);
        for (depth, &p) in self.path.iter().enumerate() {
            state = splitmix(state ^ splitmix(p ^ (depth as u64).wrapping_mul(GOLDEN)));
        }
        state
    }

    pub fn rng(&self) -> Rng {
        let mut key = [0u8; 32];
        let mut s = self.digest();
        for chunk in key.chunks_mut(8) {
            s = splitmix(s);
            chunk.copy_from_slice(&s.to_le_bytes());
        }
        ChaCha8Rng::from_seed(key)
    }
}

impl std::fmt::Display for Seed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.value)?;
        for p in &self.path {
            write!(f, "/{p}")?;
        }
        Ok(())
    }
}
