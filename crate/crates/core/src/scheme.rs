//! Uniform dispatch over the four ciphers, keyed by a single [`KeySet`].
//!
//! Block schemes take their seed from `KR`.

use std::fmt;
use std::str::FromStr;

use crate::block::{
    etc_decrypt_with_schedule, etc_encrypt_with_schedule, tanaka_decrypt, tanaka_encrypt, BlockKey,
    EtcSchedule, TanakaKey,
};
use crate::error::{Error, Result};
use crate::image::PlanarImage;
use crate::keying::{KeySet, KeystreamPlanes};
use crate::pixel::{decrypt_with_planes, encrypt_with_planes, CipherConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Pixel,
    PixelShuffle,
    Etc,
    Tanaka,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Pixel, Scheme::PixelShuffle, Scheme::Etc, Scheme::Tanaka];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Pixel => "pixel",
            Scheme::PixelShuffle => "pixel+shuffle",
            Scheme::Etc => "etc",
            Scheme::Tanaka => "tanaka",
        }
    }

    pub fn is_block(self) -> bool {
        matches!(self, Scheme::Etc | Scheme::Tanaka)
    }

    /// Expands keys for every image of the given size.
    pub fn prepare(self, keys: &KeySet, width: usize, height: usize) -> Result<PreparedCipher> {
        Ok(match self {
            Scheme::Pixel | Scheme::PixelShuffle => {
                let with_shuffle = self == Scheme::PixelShuffle;
                if with_shuffle && keys.k_s.is_none() {
                    return Err(Error::MissingShuffleKey);
                }
                let planes = KeystreamPlanes::materialize(keys, width, height)?;
                PreparedCipher::Pixel {
                    planes,
                    cfg: CipherConfig { with_shuffle },
                }
            }
            Scheme::Etc => PreparedCipher::Etc(BlockKey::new(keys.k_r).schedule(width, height)?),
            Scheme::Tanaka => {
                if width % 4 != 0 || height % 4 != 0 || width == 0 || height == 0 {
                    return Err(Error::NotBlockAligned {
                        width,
                        height,
                        block_w: 4,
                        block_h: 4,
                    });
                }
                PreparedCipher::Tanaka(TanakaKey::from_seed(keys.k_r))
            }
        })
    }

    pub fn encrypt(self, img: &PlanarImage, keys: &KeySet) -> Result<PlanarImage> {
        self.prepare(keys, img.width(), img.height())?.encrypt(img)
    }

    pub fn decrypt(self, img: &PlanarImage, keys: &KeySet) -> Result<PlanarImage> {
        self.prepare(keys, img.width(), img.height())?.decrypt(img)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| format!("unknown scheme {s:?}, expected pixel, pixel+shuffle, etc or tanaka"))
    }
}

/// Key material expanded once for a fixed image size.
#[derive(Debug, Clone)]
pub enum PreparedCipher {
    Pixel { planes: KeystreamPlanes, cfg: CipherConfig },
    Etc(EtcSchedule),
    Tanaka(TanakaKey),
}

impl PreparedCipher {
    pub fn encrypt(&self, img: &PlanarImage) -> Result<PlanarImage> {
        match self {
            PreparedCipher::Pixel { planes, cfg } => encrypt_with_planes(img, planes, *cfg),
            PreparedCipher::Etc(s) => etc_encrypt_with_schedule(img, s),
            PreparedCipher::Tanaka(k) => tanaka_encrypt(img, k),
        }
    }

    pub fn decrypt(&self, img: &PlanarImage) -> Result<PlanarImage> {
        match self {
            PreparedCipher::Pixel { planes, cfg } => decrypt_with_planes(img, planes, *cfg),
            PreparedCipher::Etc(s) => etc_decrypt_with_schedule(img, s),
            PreparedCipher::Tanaka(k) => tanaka_decrypt(img, k),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert!("aes".parse::<Scheme>().is_err());
    }

    #[test]
    fn every_scheme_round_trips() {
        let keys = KeySet::from_master_seed(4, true);
        let data: Vec<u8> = (0..3 * 64).map(|v| (v * 7) as u8).collect();
        let img = PlanarImage::from_interleaved(8, 8, &data).unwrap();
        for s in Scheme::ALL {
            let enc = s.encrypt(&img, &keys).unwrap();
            assert_eq!(s.decrypt(&enc, &keys).unwrap(), img, "{s}");
        }
    }

    #[test]
    fn block_schemes_need_alignment() {
        let keys = KeySet::from_master_seed(4, false);
        let img = PlanarImage::filled(30, 30, 1).unwrap();
        assert!(Scheme::Tanaka.encrypt(&img, &keys).is_err());
        assert!(Scheme::Etc.encrypt(&img, &keys).is_err());
        assert!(Scheme::Pixel.encrypt(&img, &keys).is_ok());
        assert!(matches!(
            Scheme::PixelShuffle.encrypt(&img, &keys),
            Err(Error::MissingShuffleKey)
        ));
    }
}
