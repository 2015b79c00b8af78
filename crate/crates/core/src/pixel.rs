//! The pixel-wise cipher: keyed negative-positive transformation followed by
//! optional per-pixel color-component shuffling.
//!
//! Both steps act on each pixel position independently, so the ciphertext has
//! the same dimensions as the plaintext and any positional transform of the
//! image can be mirrored by the same transform of the keystream planes.

use crate::error::{Error, Result};
use crate::image::PlanarImage;
use crate::keying::{KeySet, KeystreamPlanes};

/// Source channel for each output channel, indexed by shuffle code.
///
/// Code 2 reads `[G, R, B]`: red is replaced by green and green by red.
pub const COLOR_PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CipherConfig {
    pub with_shuffle: bool,
}

impl CipherConfig {
    pub const NEGPOS_ONLY: Self = Self { with_shuffle: false };
    pub const WITH_SHUFFLE: Self = Self { with_shuffle: true };
}

/// Applies a color permutation code to one RGB triple.
#[inline]
pub fn permute_rgb(rgb: [u8; 3], code: u8) -> [u8; 3] {
    let p = COLOR_PERMUTATIONS[code as usize];
    [rgb[p[0]], rgb[p[1]], rgb[p[2]]]
}

/// Inverse of [`permute_rgb`] for the same code.
#[inline]
pub fn unpermute_rgb(rgb: [u8; 3], code: u8) -> [u8; 3] {
    let p = COLOR_PERMUTATIONS[code as usize];
    let mut out = [0u8; 3];
    for (c, &src) in p.iter().enumerate() {
        out[src] = rgb[c];
    }
    out
}

fn check_dims(img: &PlanarImage, planes: &KeystreamPlanes) -> Result<()> {
    img.ensure_same_size(planes.width(), planes.height())
}

/// XORs each sample with 0xFF where the channel's keystream bit is 1.
/// Self-inverse.
pub fn negpos_transform(img: &PlanarImage, planes: &KeystreamPlanes) -> Result<PlanarImage> {
    check_dims(img, planes)?;
    let mut out = img.clone();
    for c in 0..3 {
        for (s, &r) in out.plane_mut(c).iter_mut().zip(planes.np_bits(c)) {
            // r in {0,1}; 0u8.wrapping_sub(1) == 0xFF
            *s ^= 0u8.wrapping_sub(r);
        }
    }
    Ok(out)
}

fn shuffle_with(
    img: &PlanarImage,
    planes: &KeystreamPlanes,
    f: fn([u8; 3], u8) -> [u8; 3],
) -> Result<PlanarImage> {
    check_dims(img, planes)?;
    let codes = planes.shuffle_codes().ok_or(Error::MissingShuffleCodes)?;
    let src = img.planes();
    let n = img.pixel_count();
    let mut out = [vec![0u8; n], vec![0u8; n], vec![0u8; n]];
    for (i, &code) in codes.iter().enumerate() {
        let rgb = f([src[0][i], src[1][i], src[2][i]], code);
        for c in 0..3 {
            out[c][i] = rgb[c];
        }
    }
    PlanarImage::new(img.width(), img.height(), out)
}

/// Permutes each pixel's (R, G, B) by its shuffle code.
pub fn color_shuffle(img: &PlanarImage, planes: &KeystreamPlanes) -> Result<PlanarImage> {
    shuffle_with(img, planes, permute_rgb)
}

pub fn inverse_color_shuffle(img: &PlanarImage, planes: &KeystreamPlanes) -> Result<PlanarImage> {
    shuffle_with(img, planes, unpermute_rgb)
}

/// Encrypts with explicit planes. With `cfg.with_shuffle` the planes must
/// carry shuffle codes.
pub fn encrypt_with_planes(
    img: &PlanarImage,
    planes: &KeystreamPlanes,
    cfg: CipherConfig,
) -> Result<PlanarImage> {
    let out = negpos_transform(img, planes)?;
    if cfg.with_shuffle {
        color_shuffle(&out, planes)
    } else {
        Ok(out)
    }
}

pub fn decrypt_with_planes(
    img: &PlanarImage,
    planes: &KeystreamPlanes,
    cfg: CipherConfig,
) -> Result<PlanarImage> {
    if cfg.with_shuffle {
        negpos_transform(&inverse_color_shuffle(img, planes)?, planes)
    } else {
        negpos_transform(img, planes)
    }
}

fn planes_for(img: &PlanarImage, keys: &KeySet, cfg: CipherConfig) -> Result<KeystreamPlanes> {
    if cfg.with_shuffle && keys.k_s.is_none() {
        return Err(Error::MissingShuffleKey);
    }
    KeystreamPlanes::materialize(keys, img.width(), img.height())
}

pub fn encrypt(img: &PlanarImage, keys: &KeySet, cfg: CipherConfig) -> Result<PlanarImage> {
    encrypt_with_planes(img, &planes_for(img, keys, cfg)?, cfg)
}

pub fn decrypt(img: &PlanarImage, keys: &KeySet, cfg: CipherConfig) -> Result<PlanarImage> {
    decrypt_with_planes(img, &planes_for(img, keys, cfg)?, cfg)
}

/// Applies composite pattern `0..48` (see [`KeystreamPlanes::pattern_at`]) to
/// a single pixel.
pub fn apply_pattern(rgb: [u8; 3], pattern: u8) -> [u8; 3] {
    let mask = pattern / 6;
    let code = pattern % 6;
    let flipped = [0, 1, 2].map(|c| rgb[c] ^ 0u8.wrapping_sub((mask >> c) & 1));
    permute_rgb(flipped, code)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn pixel_img(rgb: [u8; 3]) -> PlanarImage {
        PlanarImage::from_interleaved(1, 1, &rgb).unwrap()
    }

    #[test]
    fn negpos_single_sample() {
        let img = pixel_img([0x55, 0x55, 0x55]);
        let one = KeystreamPlanes::constant(1, 1, 1, None).unwrap();
        let zero = KeystreamPlanes::constant(1, 1, 0, None).unwrap();
        assert_eq!(negpos_transform(&img, &one).unwrap().pixel(0, 0), [0xAA; 3]);
        assert_eq!(negpos_transform(&img, &zero).unwrap().pixel(0, 0), [0x55; 3]);
    }

    #[test]
    fn table_permutations() {
        let rgb = [10, 20, 30];
        assert_eq!(permute_rgb(rgb, 0), [10, 20, 30]);
        assert_eq!(permute_rgb(rgb, 1), [10, 30, 20]);
        assert_eq!(permute_rgb(rgb, 2), [20, 10, 30]);
        assert_eq!(permute_rgb(rgb, 3), [20, 30, 10]);
        assert_eq!(permute_rgb(rgb, 4), [30, 10, 20]);
        assert_eq!(permute_rgb(rgb, 5), [30, 20, 10]);
        for code in 0..6 {
            assert_eq!(unpermute_rgb(permute_rgb(rgb, code), code), rgb);
        }
    }

    #[test]
    fn color_shuffle_code_two() {
        let img = pixel_img([10, 20, 30]);
        let planes = KeystreamPlanes::constant(1, 1, 0, Some(2)).unwrap();
        assert_eq!(color_shuffle(&img, &planes).unwrap().pixel(0, 0), [20, 10, 30]);
    }

    #[test]
    fn shuffle_without_codes_fails() {
        let img = pixel_img([1, 2, 3]);
        let planes = KeystreamPlanes::constant(1, 1, 0, None).unwrap();
        assert!(matches!(color_shuffle(&img, &planes), Err(Error::MissingShuffleCodes)));
        let keys = KeySet::new(1, 2, 3, None);
        assert!(matches!(
            encrypt(&img, &keys, CipherConfig::WITH_SHUFFLE),
            Err(Error::MissingShuffleKey)
        ));
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let img = PlanarImage::filled(2, 2, 0).unwrap();
        let planes = KeystreamPlanes::constant(2, 3, 0, None).unwrap();
        assert!(matches!(
            negpos_transform(&img, &planes),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn all_ones_keystream_complements_zero_image() {
        let img = PlanarImage::filled(3, 2, 0).unwrap();
        let ones = KeystreamPlanes::constant(3, 2, 1, Some(0)).unwrap();
        let dec = decrypt_with_planes(&img, &ones, CipherConfig::WITH_SHUFFLE).unwrap();
        assert_eq!(dec, PlanarImage::filled(3, 2, 255).unwrap());
    }

    #[test]
    fn forty_eight_distinct_pixel_behaviors() {
        // Exhaustive oracle on a reduced 2-bit sample depth: each of the 48
        // (mask, code) pairs is evaluated on all 64 inputs; the 8-bit pattern is
        // mapped to 2-bit by complementing in the 2-bit domain.
        let reduced = |rgb: [u8; 3], pattern: u8| {
            let mask = pattern / 6;
            let code = pattern % 6;
            let flipped = [0, 1, 2].map(|c| if (mask >> c) & 1 == 1 { rgb[c] ^ 3 } else { rgb[c] });
            permute_rgb(flipped, code)
        };
        let inputs: Vec<[u8; 3]> = (0..64u8).map(|v| [v & 3, (v >> 2) & 3, v >> 4]).collect();
        let tables: HashSet<Vec<[u8; 3]>> = (0..48)
            .map(|p| inputs.iter().map(|&rgb| reduced(rgb, p)).collect())
            .collect();
        assert_eq!(tables.len(), 48);

        // Full-depth behaviors on a sample of inputs are also pairwise distinct.
        let samples = [[0u8, 0, 0], [1, 2, 4], [200, 13, 77], [255, 128, 0]];
        let full: HashSet<Vec<[u8; 3]>> = (0..48)
            .map(|p| samples.iter().map(|&rgb| apply_pattern(rgb, p)).collect())
            .collect();
        assert_eq!(full.len(), 48);
    }

    #[test]
    fn apply_pattern_matches_image_path() {
        let keys = KeySet::from_master_seed(11, true);
        let img = PlanarImage::from_interleaved(4, 2, &(0..24).map(|v| v * 9).collect::<Vec<u8>>())
            .unwrap();
        let planes = KeystreamPlanes::materialize(&keys, 4, 2).unwrap();
        let enc = encrypt(&img, &keys, CipherConfig::WITH_SHUFFLE).unwrap();
        for y in 0..2 {
            for x in 0..4 {
                let p = planes.pattern_at(y * 4 + x);
                assert_eq!(enc.pixel(x, y), apply_pattern(img.pixel(x, y), p));
            }
        }
    }

    #[test]
    fn histogram_reversal_under_all_ones() {
        let data: Vec<u8> = (0..3 * 64).map(|v| (v * 37 % 251) as u8).collect();
        let img = PlanarImage::from_interleaved(8, 8, &data).unwrap();
        let ones = KeystreamPlanes::constant(8, 8, 1, None).unwrap();
        let enc = encrypt_with_planes(&img, &ones, CipherConfig::NEGPOS_ONLY).unwrap();
        for c in 0..3 {
            let mut h_in = [0u32; 256];
            let mut h_out = [0u32; 256];
            img.plane(c).iter().for_each(|&v| h_in[v as usize] += 1);
            enc.plane(c).iter().for_each(|&v| h_out[v as usize] += 1);
            for v in 0..256 {
                assert_eq!(h_out[v], h_in[255 - v]);
            }
        }
    }
}
