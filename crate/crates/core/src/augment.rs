//! Positional augmentations that run on plain or encrypted images.
//!
//! Every op here only moves samples (or fills vacated positions), never
//! mixes them. Applying the same move to the keystream planes with
//! [`remap_planes`] yields planes under which the augmented plaintext
//! encrypts to the augmented ciphertext. Randomness (coin flips, crop
//! offsets) belongs to the caller.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::image::PlanarImage;
use crate::keying::KeystreamPlanes;

pub const DEFAULT_PAD: usize = 4;

/// Translation by `(dx, dy)`; vacated samples take `fill`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftSpec {
    pub dx: isize,
    pub dy: isize,
    pub fill: u8,
}

impl ShiftSpec {
    pub fn new(dx: isize, dy: isize) -> Self {
        Self { dx, dy, fill: 0 }
    }

    fn check(&self, width: usize, height: usize) -> Result<()> {
        if self.dx.unsigned_abs() >= width || self.dy.unsigned_abs() >= height {
            return Err(Error::Augment(format!(
                "shift ({}, {}) out of range for {width}x{height}",
                self.dx, self.dy
            )));
        }
        Ok(())
    }
}

/// A single positional transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Augmentation {
    HFlip,
    VFlip,
    Shift(ShiftSpec),
    /// Zero-pad by `pad` on every side, then crop the original size at
    /// `(offset_x, offset_y)`.
    PadCrop {
        pad: usize,
        offset_x: usize,
        offset_y: usize,
    },
}

fn map_plane(
    src: &[u8],
    width: usize,
    height: usize,
    fill: u8,
    source_of: impl Fn(usize, usize) -> Option<(usize, usize)>,
) -> Vec<u8> {
    let mut out = Vec::with_capacity(src.len());
    for y in 0..height {
        for x in 0..width {
            out.push(source_of(x, y).map_or(fill, |(sx, sy)| src[sy * width + sx]));
        }
    }
    out
}

fn offset(v: usize, delta: isize, limit: usize) -> Option<usize> {
    let s = v as isize - delta;
    (0..limit as isize).contains(&s).then_some(s as usize)
}

impl Augmentation {
    fn validate(&self, width: usize, height: usize) -> Result<()> {
        match *self {
            Augmentation::HFlip | Augmentation::VFlip => Ok(()),
            Augmentation::Shift(spec) => spec.check(width, height),
            Augmentation::PadCrop {
                pad,
                offset_x,
                offset_y,
            } => {
                if offset_x > 2 * pad || offset_y > 2 * pad {
                    return Err(Error::Augment(format!(
                        "crop offset ({offset_x}, {offset_y}) exceeds 2*pad = {}",
                        2 * pad
                    )));
                }
                Ok(())
            }
        }
    }

    fn fill(&self) -> u8 {
        match self {
            Augmentation::Shift(spec) => spec.fill,
            _ => 0,
        }
    }

    fn apply_plane(&self, src: &[u8], width: usize, height: usize, fill: u8) -> Vec<u8> {
        match *self {
            Augmentation::HFlip => map_plane(src, width, height, fill, |x, y| Some((width - 1 - x, y))),
            Augmentation::VFlip => map_plane(src, width, height, fill, |x, y| Some((x, height - 1 - y))),
            Augmentation::Shift(spec) => map_plane(src, width, height, fill, |x, y| {
                Some((offset(x, spec.dx, width)?, offset(y, spec.dy, height)?))
            }),
            Augmentation::PadCrop {
                pad,
                offset_x,
                offset_y,
            } => {
                // padded(u, v) = input(u - pad, v - pad); output(x, y) = padded(x + ox, y + oy)
                let dx = pad as isize - offset_x as isize;
                let dy = pad as isize - offset_y as isize;
                map_plane(src, width, height, fill, |x, y| {
                    Some((offset(x, dx, width)?, offset(y, dy, height)?))
                })
            }
        }
    }

    pub fn apply(&self, img: &PlanarImage) -> Result<PlanarImage> {
        let (w, h) = (img.width(), img.height());
        self.validate(w, h)?;
        let fill = self.fill();
        let planes = [0, 1, 2].map(|c| self.apply_plane(img.plane(c), w, h, fill));
        PlanarImage::new(w, h, planes)
    }

    /// Moves keystream decisions the same way [`Augmentation::apply`] moves
    /// samples. Vacated positions get bit 0 and shuffle code 0.
    pub fn remap_planes(&self, planes: &KeystreamPlanes) -> Result<KeystreamPlanes> {
        let (w, h) = (planes.width(), planes.height());
        self.validate(w, h)?;
        let np = [0, 1, 2].map(|c| self.apply_plane(planes.np_bits(c), w, h, 0));
        let codes = planes.shuffle_codes().map(|codes| self.apply_plane(codes, w, h, 0));
        KeystreamPlanes::from_parts(w, h, np, codes)
    }
}

impl fmt::Display for Augmentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Augmentation::HFlip => write!(f, "hflip"),
            Augmentation::VFlip => write!(f, "vflip"),
            Augmentation::Shift(s) => write!(f, "shift:{},{}", s.dx, s.dy),
            Augmentation::PadCrop {
                offset_x, offset_y, ..
            } => write!(f, "padcrop:{offset_x},{offset_y}"),
        }
    }
}

/// Parses `hflip`, `vflip`, `shift:DX,DY` or `padcrop:OX,OY` (pad 4).
impl FromStr for Augmentation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let pair = |args: &str| -> Result<(String, String)> {
            let (a, b) = args
                .split_once(',')
                .ok_or_else(|| Error::Augment(format!("expected two comma-separated values in {s:?}")))?;
            Ok((a.trim().to_string(), b.trim().to_string()))
        };
        let num_err = |_| Error::Augment(format!("bad number in {s:?}"));
        match s.split_once(':') {
            None if s == "hflip" => Ok(Augmentation::HFlip),
            None if s == "vflip" => Ok(Augmentation::VFlip),
            Some(("shift", args)) => {
                let (a, b) = pair(args)?;
                Ok(Augmentation::Shift(ShiftSpec::new(
                    a.parse().map_err(num_err)?,
                    b.parse().map_err(num_err)?,
                )))
            }
            Some(("padcrop", args)) => {
                let (a, b) = pair(args)?;
                Ok(Augmentation::PadCrop {
                    pad: DEFAULT_PAD,
                    offset_x: a.parse().map_err(num_err)?,
                    offset_y: b.parse().map_err(num_err)?,
                })
            }
            _ => Err(Error::Augment(format!("unknown augmentation {s:?}"))),
        }
    }
}

pub fn hflip(img: &PlanarImage) -> PlanarImage {
    Augmentation::HFlip.apply(img).expect("flip is always valid")
}

pub fn vflip(img: &PlanarImage) -> PlanarImage {
    Augmentation::VFlip.apply(img).expect("flip is always valid")
}

pub fn shift(img: &PlanarImage, spec: ShiftSpec) -> Result<PlanarImage> {
    Augmentation::Shift(spec).apply(img)
}

pub fn pad_crop(img: &PlanarImage, pad: usize, offset_x: usize, offset_y: usize) -> Result<PlanarImage> {
    Augmentation::PadCrop {
        pad,
        offset_x,
        offset_y,
    }
    .apply(img)
}

pub fn remap_planes(planes: &KeystreamPlanes, transform: &Augmentation) -> Result<KeystreamPlanes> {
    transform.remap_planes(planes)
}
