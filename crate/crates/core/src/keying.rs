//! Key material and the position-indexed keystreams derived from it.
//!
//! Every pseudorandom decision in this crate comes from SplitMix64. A stream
//! seeded with `s` produces its `k`-th output (1-based) from the state
//! `s + k * 0x9E3779B97F4A7C15`, so any element can be computed directly
//! without iterating. Pixel index `i` maps to output `i + 1`, with
//! `i = y * width + x` (row-major, top-left origin).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One SplitMix64 step: returns `(new_state, output)`.
#[inline]
pub fn prng_next(state: u64) -> (u64, u64) {
    let state = state.wrapping_add(GOLDEN_GAMMA);
    (state, mix(state))
}

/// The `(index + 1)`-th output of the stream seeded with `seed`.
#[inline]
pub fn stream_output(seed: u64, index: u64) -> u64 {
    mix(seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Negative-positive bit `r(i)` for pixel index `i`.
#[inline]
pub fn np_bit(seed: u64, index: u64) -> u8 {
    (stream_output(seed, index) & 1) as u8
}

/// Color-shuffle code in `0..6` for pixel index `i`.
///
/// Plain modulo reduction; the bias is below 2^-61 relative.
#[inline]
pub fn shuffle_code(seed: u64, index: u64) -> u8 {
    (stream_output(seed, index) % 6) as u8
}

/// Sequential SplitMix64 generator, used wherever a stream is consumed in
/// order (block schedules, weight init, sampling).
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        let (state, out) = prng_next(self.state);
        self.state = state;
        out
    }

    /// Uniform in `0..bound`, by modulo reduction.
    pub fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        self.next_u64() % bound
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// In-place Fisher-Yates shuffle, drawing from the highest index down.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for k in (1..items.len()).rev() {
            let j = self.below(k as u64 + 1) as usize;
            items.swap(k, j);
        }
    }
}

/// The secret seeds driving the pixel cipher.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KeySet {
    pub k_r: u64,
    pub k_g: u64,
    pub k_b: u64,
    /// Present exactly when color shuffling is enabled.
    pub k_s: Option<u64>,
}

impl KeySet {
    pub fn new(k_r: u64, k_g: u64, k_b: u64, k_s: Option<u64>) -> Self {
        Self { k_r, k_g, k_b, k_s }
    }

    /// Derives a key set from a single master seed: KR, KG, KB and KS are the
    /// first four outputs of the master stream.
    pub fn from_master_seed(seed: u64, with_shuffle: bool) -> Self {
        let mut rng = SplitMix64::new(seed);
        let k_r = rng.next_u64();
        let k_g = rng.next_u64();
        let k_b = rng.next_u64();
        let k_s = rng.next_u64();
        Self::new(k_r, k_g, k_b, with_shuffle.then_some(k_s))
    }

    /// Channel seeds in R, G, B order.
    pub fn channel_seeds(&self) -> [u64; 3] {
        [self.k_r, self.k_g, self.k_b]
    }

    /// Serializes to the key-file format (`NAME=<16 hex digits>` per line).
    pub fn to_key_file(&self) -> String {
        self.to_string()
    }

    pub fn parse_key_file(text: &str) -> Result<Self> {
        text.parse()
    }
}

impl fmt::Display for KeySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "KR={:016x}", self.k_r)?;
        writeln!(f, "KG={:016x}", self.k_g)?;
        writeln!(f, "KB={:016x}", self.k_b)?;
        if let Some(k_s) = self.k_s {
            writeln!(f, "KS={k_s:016x}")?;
        }
        Ok(())
    }
}

impl FromStr for KeySet {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut seeds: [Option<u64>; 4] = [None; 4];
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let bad = |why: &str| Error::KeyFile(format!("line {}: {why}: {raw:?}", lineno + 1));
            let (name, value) = line.split_once('=').ok_or_else(|| bad("expected NAME=VALUE"))?;
            let slot = match name {
                "KR" => 0,
                "KG" => 1,
                "KB" => 2,
                "KS" => 3,
                _ => return Err(bad("unknown key name")),
            };
            if value.len() != 16 || !value.bytes().all(|b| b.is_ascii_hexdigit()) {
                return Err(bad("value must be exactly 16 hex digits"));
            }
            if seeds[slot].is_some() {
                return Err(bad("duplicate key"));
            }
            seeds[slot] = Some(u64::from_str_radix(value, 16).map_err(|_| bad("bad hex"))?);
        }
        let need = |slot: usize, name: &str| {
            seeds[slot].ok_or_else(|| Error::KeyFile(format!("missing {name}")))
        };
        Ok(KeySet::new(need(0, "KR")?, need(1, "KG")?, need(2, "KB")?, seeds[3]))
    }
}

/// Materialized per-position keystream decisions for one image size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeystreamPlanes {
    width: usize,
    height: usize,
    np_bits: [Vec<u8>; 3],
    shuffle_codes: Option<Vec<u8>>,
}

impl KeystreamPlanes {
    /// Derives the planes for a `width`x`height` image from `keys`.
    pub fn materialize(keys: &KeySet, width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::ZeroDimensions { width, height });
        }
        let n = (width * height) as u64;
        let np_bits = keys
            .channel_seeds()
            .map(|seed| (0..n).map(|i| np_bit(seed, i)).collect::<Vec<_>>());
        let shuffle_codes = keys
            .k_s
            .map(|seed| (0..n).map(|i| shuffle_code(seed, i)).collect());
        Ok(Self {
            width,
            height,
            np_bits,
            shuffle_codes,
        })
    }

    /// Builds planes from explicit values, validating lengths and ranges.
    pub fn from_parts(
        width: usize,
        height: usize,
        np_bits: [Vec<u8>; 3],
        shuffle_codes: Option<Vec<u8>>,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::ZeroDimensions { width, height });
        }
        let n = width * height;
        for plane in np_bits.iter().chain(shuffle_codes.iter()) {
            if plane.len() != n {
                return Err(Error::PlaneLength {
                    expected: n,
                    got: plane.len(),
                });
            }
        }
        if np_bits.iter().flatten().any(|&b| b > 1) {
            return Err(Error::Keystream("negative-positive bits must be 0 or 1".into()));
        }
        if shuffle_codes.iter().flatten().any(|&c| c > 5) {
            return Err(Error::Keystream("shuffle codes must be in 0..6".into()));
        }
        Ok(Self {
            width,
            height,
            np_bits,
            shuffle_codes,
        })
    }

    /// Test hook: every position carries the same bit and (optionally) the
    /// same shuffle code. Never derived from keys.
    pub fn constant(width: usize, height: usize, bit: u8, code: Option<u8>) -> Result<Self> {
        let n = width * height;
        Self::from_parts(
            width,
            height,
            [vec![bit; n], vec![bit; n], vec![bit; n]],
            code.map(|c| vec![c; n]),
        )
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Bit plane for channel `c` (0 = R, 1 = G, 2 = B), row-major.
    pub fn np_bits(&self, channel: usize) -> &[u8] {
        &self.np_bits[channel]
    }

    pub fn np_planes(&self) -> &[Vec<u8>; 3] {
        &self.np_bits
    }

    pub fn shuffle_codes(&self) -> Option<&[u8]> {
        self.shuffle_codes.as_deref()
    }

    /// Composite pattern id in `0..48` at pixel index `i`:
    /// `(r_R | r_G << 1 | r_B << 2) * 6 + code`.
    pub fn pattern_at(&self, index: usize) -> u8 {
        let mask = self.np_bits[0][index] | self.np_bits[1][index] << 1 | self.np_bits[2][index] << 2;
        let code = self.shuffle_codes.as_ref().map_or(0, |c| c[index]);
        mask * 6 + code
    }
}
