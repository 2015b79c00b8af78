//! Key-space sizes for brute-force (ciphertext-only) attacks.
//!
//! For `n` pixels the pixel cipher has `2^(3n)` negative-positive assignments
//! and `6^n` color-shuffle assignments, `48^n` in total. The Tanaka baseline
//! has `96! * 2^96` keys regardless of image size. Values are reported in
//! bits; exact big-integer paths are kept for cross-checking.
//!
//! These counts are over keystream assignments. The effective entropy of a
//! [`KeySet`](crate::keying::KeySet) is bounded by its seeds: 192 bits
//! without shuffling, 256 bits with it.

use std::fmt;

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::PlanarImage;
use crate::keying::KeystreamPlanes;
use crate::pixel::{decrypt_with_planes, CipherConfig};

/// Upper bound on candidates enumerated by [`toy_brute_force`].
pub const BRUTE_FORCE_LIMIT: u128 = 1 << 20;
pub const TANAKA_POSITIONS: u32 = 96;

#[derive(Debug, Clone, PartialEq)]
pub struct KeySpaceReport {
    pub n: u64,
    pub with_shuffle: bool,
    pub log2_np: f64,
    pub log2_col: f64,
    pub log2_total: f64,
    /// Decimal digits of the exact key-space size, when computed.
    pub exact_digits: Option<usize>,
}

pub fn pixel_count(width: u64, height: u64) -> u64 {
    width * height
}

/// `log2` of a big integer. Uses the top 64 bits, so the absolute error is
/// on the order of 1e-16 bits.
pub fn log2_biguint(value: &BigUint) -> f64 {
    let bits = value.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 64 {
        let v = value.iter_u64_digits().next().unwrap_or(0);
        return (v as f64).log2();
    }
    let shift = bits - 64;
    let top = (value >> shift).iter_u64_digits().next().unwrap_or(0);
    shift as f64 + (top as f64).log2()
}

/// Exact `48^n` (or `8^n` without shuffling).
pub fn proposed_keyspace_exact(n: u64, with_shuffle: bool) -> BigUint {
    let base = if with_shuffle { 48u32 } else { 8u32 };
    let exp = u32::try_from(n).expect("pixel count fits in u32 for exact evaluation");
    BigUint::from(base).pow(exp)
}

/// `96! * 2^96` as an exact integer.
pub fn tanaka_keyspace_exact() -> BigUint {
    let factorial = (1..=TANAKA_POSITIONS).fold(BigUint::from(1u32), |acc, k| acc * k);
    factorial << TANAKA_POSITIONS
}

pub fn proposed_keyspace(n: u64, with_shuffle: bool) -> KeySpaceReport {
    let log2_np = 3.0 * n as f64;
    let log2_col = if with_shuffle { n as f64 * 6f64.log2() } else { 0.0 };
    KeySpaceReport {
        n,
        with_shuffle,
        log2_np,
        log2_col,
        log2_total: log2_np + log2_col,
        exact_digits: None,
    }
}

/// Like [`proposed_keyspace`], also counting decimal digits of the exact
/// value. Intended for image-sized `n` (tens of thousands of pixels at most).
pub fn proposed_keyspace_with_digits(n: u64, with_shuffle: bool) -> KeySpaceReport {
    let mut report = proposed_keyspace(n, with_shuffle);
    report.exact_digits = Some(proposed_keyspace_exact(n, with_shuffle).to_str_radix(10).len());
    report
}

/// `log2(96!) + 96` from the exact factorial.
pub fn tanaka_keyspace() -> f64 {
    log2_biguint(&tanaka_keyspace_exact())
}

/// Smallest pixel count whose shuffled key space exceeds Tanaka's.
pub fn crossover_pixels() -> u64 {
    let tanaka = tanaka_keyspace_exact();
    (1..)
        .find(|&n| proposed_keyspace_exact(n, true) > tanaka)
        .expect("48^n eventually exceeds any bound")
}

impl KeySpaceReport {
    /// `field=value` lines.
    pub fn to_lines(&self) -> String {
        let mut s = format!(
            "n={}\nwith_shuffle={}\nlog2_np={:.2}\nlog2_col={:.2}\nlog2_total={:.2}\n",
            self.n, self.with_shuffle, self.log2_np, self.log2_col, self.log2_total
        );
        if let Some(d) = self.exact_digits {
            s.push_str(&format!("exact_digits={d}\n"));
        }
        s
    }
}

impl fmt::Display for KeySpaceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<14} {:>12}", "pixels", self.n)?;
        writeln!(f, "{:<14} {:>12}", "shuffle", self.with_shuffle)?;
        writeln!(f, "{:<14} {:>12.2}", "log2 N_np", self.log2_np)?;
        writeln!(f, "{:<14} {:>12.2}", "log2 N_col", self.log2_col)?;
        writeln!(f, "{:<14} {:>12.2}", "log2 N", self.log2_total)?;
        if let Some(d) = self.exact_digits {
            writeln!(f, "{:<14} {:>12}", "decimal digits", d)?;
        }
        Ok(())
    }
}

/// Enumerates every per-pixel keystream assignment for a tiny ciphertext and
/// counts those whose decryption satisfies `accept`.
///
/// Candidate `a` assigns pattern `(a / P^j) % P` to pixel `j`, where `P` is 48
/// with shuffling and 8 without; pattern `p` has mask `p / 6` and shuffle
/// code `p % 6`.
pub fn toy_brute_force<F>(cipher: &PlanarImage, with_shuffle: bool, accept: F) -> Result<u64>
where
    F: Fn(&PlanarImage) -> bool + Sync,
{
    let n = cipher.pixel_count();
    let per_pixel: u128 = if with_shuffle { 48 } else { 8 };
    let candidates = per_pixel.checked_pow(n as u32).unwrap_or(u128::MAX);
    if n > 4 || candidates > BRUTE_FORCE_LIMIT {
        return Err(Error::DomainTooLarge {
            candidates,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let cfg = CipherConfig { with_shuffle };
    let (w, h) = (cipher.width(), cipher.height());
    let count = (0..candidates as u64)
        .into_par_iter()
        .map(|a| -> Result<u64> {
            let mut np = [vec![0u8; n], vec![0u8; n], vec![0u8; n]];
            let mut codes = vec![0u8; n];
            let mut rest = a;
            for j in 0..n {
                let pattern = if with_shuffle { rest % 48 } else { (rest % 8) * 6 };
                rest /= per_pixel as u64;
                let mask = pattern / 6;
                for (c, plane) in np.iter_mut().enumerate() {
                    plane[j] = ((mask >> c) & 1) as u8;
                }
                codes[j] = (pattern % 6) as u8;
            }
            let planes = KeystreamPlanes::from_parts(w, h, np, with_shuffle.then_some(codes))?;
            Ok(u64::from(accept(&decrypt_with_planes(cipher, &planes, cfg)?)))
        })
        .try_reduce(|| 0, |x, y| Ok(x + y))?;
    Ok(count)
}
