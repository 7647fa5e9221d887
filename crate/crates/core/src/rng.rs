//! Keyed, splittable random streams.
//!
//! Every random quantity in the crate is drawn from a [`RandomStream`] created
//! from a [`StreamKey`]: a user seed plus a 64-bit stream id. The generator is
//! ChaCha8 with the seed expanded into the 256-bit key and the stream id
//! written into the 64-bit ChaCha nonce, giving 2^64 disjoint streams per seed
//! and O(1) jump-ahead via the block counter.
//!
//! Stream ids are derived with [`stream_id`], which hashes a purpose tag and two
//! indices (typically feature and fold). Work keyed this way produces the same
//! numbers regardless of which thread runs it or in what order.
//!
//! Subsets are drawn with Floyd's algorithm followed by a sort, which consumes
//! exactly `m` bounded integers per subset.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Identifies one independent random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub seed: u64,
    pub stream_id: u64,
}

impl StreamKey {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// Key for `purpose` scoped to `(a, b)` under the same seed.
    pub fn scoped(seed: u64, purpose: Purpose, a: u64, b: u64) -> Self {
        Self::new(seed, stream_id(purpose, a, b))
    }

    /// Derives a child key, e.g. one per permutation batch.
    pub fn child(&self, index: u64) -> Self {
        Self::new(
            self.seed,
            mix64(self.stream_id ^ mix64(index.wrapping_add(0x9e37_79b9_7f4a_7c15))),
        )
    }
}

/// Purpose tags feeding the stream id hash.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Purpose {
    Design = 1,
    Permutation = 2,
    TieBreak = 3,
    Folds = 4,
    Synthetic = 5,
    Bootstrap = 6,
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `stream_id = mix(mix(mix(tag) ^ a) ^ b)` with [`mix64`] as the mixer.
pub fn stream_id(purpose: Purpose, a: u64, b: u64) -> u64 {
    let h = mix64(purpose as u64);
    let h = mix64(h ^ a);
    mix64(h ^ b.rotate_left(32))
}

/// A single-owner random stream.
#[derive(Debug, Clone)]
pub struct RandomStream {
    inner: ChaCha8Rng,
}

/// Creates the stream identified by `key`.
pub fn make_stream(key: StreamKey) -> RandomStream {
    let mut inner = ChaCha8Rng::seed_from_u64(key.seed);
    inner.set_stream(key.stream_id);
    RandomStream { inner }
}

impl RandomStream {
    /// Uniform integer in `[0, upper)` without modulo bias.
    #[inline]
    pub fn uniform_below(&mut self, upper: usize) -> usize {
        self.inner.random_range(0..upper)
    }

    /// Uniform integer in `[lo, hi]`.
    #[inline]
    pub fn uniform_inclusive(&mut self, lo: usize, hi: usize) -> usize {
        self.inner.random_range(lo..=hi)
    }

    /// Uniform real in `[0, 1)`.
    #[inline]
    pub fn uniform_f64(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Skips `words` 32-bit outputs.
    pub fn jump(&mut self, words: u128) {
        let pos = self.inner.get_word_pos();
        self.inner.set_word_pos(pos.wrapping_add(words));
    }

    /// Number of 32-bit words consumed so far.
    pub fn position(&self) -> u128 {
        self.inner.get_word_pos()
    }

    /// In-place Fisher–Yates shuffle.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.uniform_inclusive(0, i);
            xs.swap(i, j);
        }
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Draws a uniformly random `m`-subset of `[0, n)`, returned in increasing order.
pub fn uniform_subset(stream: &mut RandomStream, n: usize, m: usize) -> Result<Vec<u32>> {
    let mut out = Vec::with_capacity(m);
    uniform_subset_into(stream, n, m, &mut out)?;
    Ok(out)
}

pub(crate) fn uniform_subset_into(
    stream: &mut RandomStream,
    n: usize,
    m: usize,
    out: &mut Vec<u32>,
) -> Result<()> {
    if m == 0 || m > n {
        return Err(Error::Domain(format!(
            "subset size m={m} must satisfy 1 <= m <= n={n}"
        )));
    }
    if n > u32::MAX as usize {
        return Err(Error::Domain(format!("population size {n} too large")));
    }
    out.clear();
    if m == n {
        out.extend(0..n as u32);
        return Ok(());
    }
    // Floyd: for j in n-m..n pick t in [0, j]; take t unless already present, else j.
    for j in (n - m)..n {
        let t = stream.uniform_inclusive(0, j) as u32;
        match out.binary_search(&t) {
            Ok(_) => {
                // j is larger than everything drawn so far.
                out.push(j as u32);
            }
            Err(pos) => out.insert(pos, t),
        }
    }
    Ok(())
}
