//! Reproducible randomness: every generator call owns a ChaCha8 stream keyed
//! by `(master, stream)`, so trial `i` of an experiment draws the same
//! variates no matter which thread runs it or in what order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Seed {
    pub master: u64,
    pub stream: u64,
}

impl Seed {
    pub fn new(master: u64) -> Self {
        Seed { master, stream: 0 }
    }

    pub fn with_stream(self, stream: u64) -> Self {
        Seed { stream, ..self }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(self.stream);
        rng
    }
}

impl From<u64> for Seed {
    fn from(master: u64) -> Self {
        Seed::new(master)
    }
}

/// Bernoulli(p) draw using only integer comparison of one `u64`, so results
/// do not depend on platform float behaviour.
#[inline]
pub(crate) fn bernoulli<R: Rng + ?Sized>(rng: &mut R, p: f64) -> bool {
    if p <= 0.0 {
        false
    } else if p >= 1.0 {
        true
    } else {
        // exact: scaling by a power of two
        let threshold = (p * 18_446_744_073_709_551_616.0) as u64;
        rng.next_u64() < threshold
    }
}

/// Uniform integer in `0..bound`. `bound` must be nonzero.
#[inline]
pub(crate) fn below<R: Rng + ?Sized>(rng: &mut R, bound: usize) -> usize {
    rng.random_range(0..bound as u64) as usize
}
