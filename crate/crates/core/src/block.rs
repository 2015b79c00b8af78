//! Block-based baseline ciphers.
//!
//! * [`tanaka_encrypt`]: each 4x4 block is split into 96 four-bit values
//!   (upper and lower nibble of each RGB sample), a keyed subset is reversed
//!   (`v -> 15 - v`), and the 96 positions are permuted. Mask and permutation
//!   are shared by every block.
//! * [`etc_encrypt`]: an encryption-then-compression style scrambler. This is
//!   a reconstruction of the usual four-step EtC structure: block
//!   permutation, per-block rotation/flip, per-block per-channel
//!   negative-positive transform, and per-block color permutation.
//!
//! Stream offsets. A [`TanakaKey`] draws from `SplitMix64::new(seed)`: outputs
//! 1..=96 give the reversal mask (LSB), the remaining outputs drive a
//! Fisher-Yates shuffle of `0..96`. A [`BlockKey`] takes four sub-seeds from
//! outputs 1..=4 of `SplitMix64::new(seed)`, one per EtC step, in the order
//! listed above.

use crate::error::{Error, Result};
use crate::image::PlanarImage;
use crate::keying::SplitMix64;
use crate::pixel::{permute_rgb, unpermute_rgb};

pub const TANAKA_BLOCK: usize = 4;
/// Nibble positions per block: 6 half-channels x 16 pixels.
pub const TANAKA_POSITIONS: usize = 96;

fn ensure_aligned(img: &PlanarImage, block_w: usize, block_h: usize) -> Result<()> {
    if block_w == 0 || block_h == 0 || img.width() % block_w != 0 || img.height() % block_h != 0 {
        return Err(Error::NotBlockAligned {
            width: img.width(),
            height: img.height(),
            block_w,
            block_h,
        });
    }
    Ok(())
}

/// Key for the Tanaka-style cipher.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TanakaKey {
    seed: u64,
    reversal_mask: u128,
    permutation: [u8; TANAKA_POSITIONS],
}

impl TanakaKey {
    pub fn from_seed(seed: u64) -> Self {
        let mut rng = SplitMix64::new(seed);
        let mut mask = 0u128;
        for k in 0..TANAKA_POSITIONS {
            mask |= u128::from(rng.next_u64() & 1) << k;
        }
        let mut permutation = [0u8; TANAKA_POSITIONS];
        for (k, p) in permutation.iter_mut().enumerate() {
            *p = k as u8;
        }
        rng.shuffle(&mut permutation);
        Self {
            seed,
            reversal_mask: mask,
            permutation,
        }
    }

    /// Explicit key. `permutation[k]` is the source position of output
    /// position `k`; `reversal_mask` bit `k` reverses source position `k`.
    pub fn from_parts(seed: u64, reversal_mask: u128, permutation: &[u8]) -> Result<Self> {
        if reversal_mask >> TANAKA_POSITIONS != 0 {
            return Err(Error::InvalidPermutation("reversal mask wider than 96 bits".into()));
        }
        let permutation: [u8; TANAKA_POSITIONS] = permutation.try_into().map_err(|_| {
            Error::InvalidPermutation(format!("expected 96 entries, got {}", permutation.len()))
        })?;
        let mut seen = [false; TANAKA_POSITIONS];
        for &p in &permutation {
            let slot = seen
                .get_mut(p as usize)
                .ok_or_else(|| Error::InvalidPermutation(format!("entry {p} out of range")))?;
            if *slot {
                return Err(Error::InvalidPermutation(format!("entry {p} repeated")));
            }
            *slot = true;
        }
        Ok(Self {
            seed,
            reversal_mask,
            permutation,
        })
    }

    pub fn identity() -> Self {
        let perm: Vec<u8> = (0..TANAKA_POSITIONS as u8).collect();
        Self::from_parts(0, 0, &perm).expect("identity is a bijection")
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn reversal_mask(&self) -> u128 {
        self.reversal_mask
    }

    pub fn permutation(&self) -> &[u8; TANAKA_POSITIONS] {
        &self.permutation
    }

    pub fn inverse_permutation(&self) -> [u8; TANAKA_POSITIONS] {
        let mut inv = [0u8; TANAKA_POSITIONS];
        for (k, &p) in self.permutation.iter().enumerate() {
            inv[p as usize] = k as u8;
        }
        inv
    }

    fn reversed(&self, k: usize) -> bool {
        (self.reversal_mask >> k) & 1 == 1
    }
}

/// Nibble index: `half_channel * 16 + (dy * 4 + dx)` with half-channels
/// ordered R-hi, R-lo, G-hi, G-lo, B-hi, B-lo.
fn split_block(img: &PlanarImage, bx: usize, by: usize) -> [u8; TANAKA_POSITIONS] {
    let mut nib = [0u8; TANAKA_POSITIONS];
    for c in 0..3 {
        let plane = img.plane(c);
        for dy in 0..TANAKA_BLOCK {
            for dx in 0..TANAKA_BLOCK {
                let s = plane[(by * TANAKA_BLOCK + dy) * img.width() + bx * TANAKA_BLOCK + dx];
                let pos = dy * TANAKA_BLOCK + dx;
                nib[2 * c * 16 + pos] = s >> 4;
                nib[(2 * c + 1) * 16 + pos] = s & 0x0F;
            }
        }
    }
    nib
}

fn merge_block(img: &mut PlanarImage, bx: usize, by: usize, nib: &[u8; TANAKA_POSITIONS]) {
    let width = img.width();
    for c in 0..3 {
        let plane = img.plane_mut(c);
        for dy in 0..TANAKA_BLOCK {
            for dx in 0..TANAKA_BLOCK {
                let pos = dy * TANAKA_BLOCK + dx;
                plane[(by * TANAKA_BLOCK + dy) * width + bx * TANAKA_BLOCK + dx] =
                    nib[2 * c * 16 + pos] << 4 | nib[(2 * c + 1) * 16 + pos];
            }
        }
    }
}

fn for_each_tanaka_block(
    img: &PlanarImage,
    mut f: impl FnMut(&[u8; TANAKA_POSITIONS]) -> [u8; TANAKA_POSITIONS],
) -> Result<PlanarImage> {
    ensure_aligned(img, TANAKA_BLOCK, TANAKA_BLOCK)?;
    let mut out = img.clone();
    for by in 0..img.height() / TANAKA_BLOCK {
        for bx in 0..img.width() / TANAKA_BLOCK {
            let nib = f(&split_block(img, bx, by));
            merge_block(&mut out, bx, by, &nib);
        }
    }
    Ok(out)
}

pub fn tanaka_encrypt(img: &PlanarImage, key: &TanakaKey) -> Result<PlanarImage> {
    for_each_tanaka_block(img, |nib| {
        let mut out = [0u8; TANAKA_POSITIONS];
        for (k, o) in out.iter_mut().enumerate() {
            let src = key.permutation[k] as usize;
            let v = nib[src];
            *o = if key.reversed(src) { 15 - v } else { v };
        }
        out
    })
}

pub fn tanaka_decrypt(img: &PlanarImage, key: &TanakaKey) -> Result<PlanarImage> {
    for_each_tanaka_block(img, |nib| {
        let mut out = [0u8; TANAKA_POSITIONS];
        for (k, &v) in nib.iter().enumerate() {
            let src = key.permutation[k] as usize;
            out[src] = if key.reversed(src) { 15 - v } else { v };
        }
        out
    })
}

/// Histogram of folded nibble values `min(v, 15 - v)` for each 4x4 block,
/// in row-major block order.
///
/// Reversal maps `v` to `15 - v` and permutation only moves values, so this
/// signature is identical for a block and its Tanaka ciphertext under every
/// key. Two images whose signatures differ cannot be related by any Tanaka
/// key.
pub fn tanaka_block_signatures(img: &PlanarImage) -> Result<Vec<[u8; 8]>> {
    ensure_aligned(img, TANAKA_BLOCK, TANAKA_BLOCK)?;
    let mut sigs = Vec::new();
    for by in 0..img.height() / TANAKA_BLOCK {
        for bx in 0..img.width() / TANAKA_BLOCK {
            let mut h = [0u8; 8];
            for v in split_block(img, bx, by) {
                h[v.min(15 - v) as usize] += 1;
            }
            sigs.push(h);
        }
    }
    Ok(sigs)
}

/// Key for the EtC-style block scrambler.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockKey {
    pub seed: u64,
    pub block_w: usize,
    pub block_h: usize,
}

impl BlockKey {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            block_w: 4,
            block_h: 4,
        }
    }

    pub fn with_block_size(seed: u64, block_w: usize, block_h: usize) -> Self {
        Self {
            seed,
            block_w,
            block_h,
        }
    }

    /// Expands the key into per-block decisions for a `width`x`height` image.
    pub fn schedule(&self, width: usize, height: usize) -> Result<EtcSchedule> {
        if self.block_w == 0
            || self.block_h == 0
            || width == 0
            || height == 0
            || width % self.block_w != 0
            || height % self.block_h != 0
        {
            return Err(Error::NotBlockAligned {
                width,
                height,
                block_w: self.block_w,
                block_h: self.block_h,
            });
        }
        let blocks_x = width / self.block_w;
        let blocks_y = height / self.block_h;
        let count = blocks_x * blocks_y;
        let square = self.block_w == self.block_h;

        let mut master = SplitMix64::new(self.seed);
        let mut perm_rng = SplitMix64::new(master.next_u64());
        let mut geom_rng = SplitMix64::new(master.next_u64());
        let mut np_rng = SplitMix64::new(master.next_u64());
        let mut color_rng = SplitMix64::new(master.next_u64());

        let mut block_perm: Vec<usize> = (0..count).collect();
        perm_rng.shuffle(&mut block_perm);
        let geometry = (0..count)
            .map(|_| {
                let r = geom_rng.next_u64();
                // Quarter turns need square blocks; otherwise only 0 or 180.
                let rotation = if square { (r % 4) as u8 } else { ((r % 2) * 2) as u8 };
                BlockGeometry {
                    rotation,
                    hflip: (r >> 2) & 1 == 1,
                    vflip: (r >> 3) & 1 == 1,
                }
            })
            .collect();
        let negpos = (0..count)
            .map(|_| [0, 1, 2].map(|_| np_rng.next_u64() & 1 == 1))
            .collect();
        let colors = (0..count).map(|_| (color_rng.next_u64() % 6) as u8).collect();

        Ok(EtcSchedule {
            block_w: self.block_w,
            block_h: self.block_h,
            blocks_x,
            blocks_y,
            block_perm,
            geometry,
            negpos,
            colors,
        })
    }
}

/// Rotation (clockwise quarter turns) followed by optional flips.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BlockGeometry {
    pub rotation: u8,
    pub hflip: bool,
    pub vflip: bool,
}

impl BlockGeometry {
    /// For each output index of a `w`x`h` block, the source index.
    fn gather_map(self, w: usize, h: usize) -> Vec<usize> {
        let mut map = Vec::with_capacity(w * h);
        for y in 0..h {
            for x in 0..w {
                let x1 = if self.hflip { w - 1 - x } else { x };
                let y1 = if self.vflip { h - 1 - y } else { y };
                let (sx, sy) = match self.rotation {
                    0 => (x1, y1),
                    1 => (y1, w - 1 - x1),
                    2 => (w - 1 - x1, h - 1 - y1),
                    3 => (h - 1 - y1, x1),
                    _ => unreachable!("validated rotation"),
                };
                map.push(sy * w + sx);
            }
        }
        map
    }
}

/// Fully expanded EtC decisions. Output block `p` (row-major) takes source
/// block `block_perm[p]` and applies `geometry[p]`, `negpos[p]`, `colors[p]`
/// in that order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtcSchedule {
    pub block_w: usize,
    pub block_h: usize,
    pub blocks_x: usize,
    pub blocks_y: usize,
    pub block_perm: Vec<usize>,
    pub geometry: Vec<BlockGeometry>,
    pub negpos: Vec<[bool; 3]>,
    pub colors: Vec<u8>,
}

impl EtcSchedule {
    /// Schedule in which every step is the identity.
    pub fn identity(width: usize, height: usize, block_w: usize, block_h: usize) -> Result<Self> {
        let mut s = BlockKey::with_block_size(0, block_w, block_h).schedule(width, height)?;
        let count = s.block_count();
        s.block_perm = (0..count).collect();
        s.geometry = vec![BlockGeometry::default(); count];
        s.negpos = vec![[false; 3]; count];
        s.colors = vec![0; count];
        Ok(s)
    }

    pub fn block_count(&self) -> usize {
        self.blocks_x * self.blocks_y
    }

    fn validate(&self, img: &PlanarImage) -> Result<()> {
        ensure_aligned(img, self.block_w, self.block_h)?;
        img.ensure_same_size(self.blocks_x * self.block_w, self.blocks_y * self.block_h)?;
        let n = self.block_count();
        if self.geometry.len() != n || self.negpos.len() != n || self.colors.len() != n {
            return Err(Error::Shape("schedule length does not match block count".into()));
        }
        let mut seen = vec![false; n];
        for &p in &self.block_perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidPermutation("block permutation is not a bijection".into()));
            }
        }
        if self.block_perm.len() != n {
            return Err(Error::InvalidPermutation("block permutation has wrong length".into()));
        }
        let square = self.block_w == self.block_h;
        if self.geometry.iter().any(|g| g.rotation > 3 || (!square && g.rotation % 2 == 1)) {
            return Err(Error::Shape("rotation not valid for block shape".into()));
        }
        if self.colors.iter().any(|&c| c > 5) {
            return Err(Error::Shape("color code out of range".into()));
        }
        Ok(())
    }

    fn read_block(&self, img: &PlanarImage, block: usize) -> Vec<[u8; 3]> {
        let (bx, by) = (block % self.blocks_x, block / self.blocks_x);
        let mut px = Vec::with_capacity(self.block_w * self.block_h);
        for dy in 0..self.block_h {
            for dx in 0..self.block_w {
                px.push(img.pixel(bx * self.block_w + dx, by * self.block_h + dy));
            }
        }
        px
    }

    fn write_block(&self, img: &mut PlanarImage, block: usize, px: &[[u8; 3]]) {
        let (bx, by) = (block % self.blocks_x, block / self.blocks_x);
        for dy in 0..self.block_h {
            for dx in 0..self.block_w {
                img.set_pixel(
                    bx * self.block_w + dx,
                    by * self.block_h + dy,
                    px[dy * self.block_w + dx],
                );
            }
        }
    }
}

fn complement(rgb: [u8; 3], mask: [bool; 3]) -> [u8; 3] {
    [0, 1, 2].map(|c| if mask[c] { !rgb[c] } else { rgb[c] })
}

pub fn etc_encrypt_with_schedule(img: &PlanarImage, schedule: &EtcSchedule) -> Result<PlanarImage> {
    schedule.validate(img)?;
    let mut out = img.clone();
    for p in 0..schedule.block_count() {
        let src = schedule.read_block(img, schedule.block_perm[p]);
        let map = schedule.geometry[p].gather_map(schedule.block_w, schedule.block_h);
        let px: Vec<[u8; 3]> = map
            .iter()
            .map(|&s| permute_rgb(complement(src[s], schedule.negpos[p]), schedule.colors[p]))
            .collect();
        schedule.write_block(&mut out, p, &px);
    }
    Ok(out)
}

pub fn etc_decrypt_with_schedule(img: &PlanarImage, schedule: &EtcSchedule) -> Result<PlanarImage> {
    schedule.validate(img)?;
    let mut out = img.clone();
    for p in 0..schedule.block_count() {
        let enc = schedule.read_block(img, p);
        let map = schedule.geometry[p].gather_map(schedule.block_w, schedule.block_h);
        let mut px = vec![[0u8; 3]; enc.len()];
        for (k, &s) in map.iter().enumerate() {
            px[s] = complement(unpermute_rgb(enc[k], schedule.colors[p]), schedule.negpos[p]);
        }
        schedule.write_block(&mut out, schedule.block_perm[p], &px);
    }
    Ok(out)
}

pub fn etc_encrypt(img: &PlanarImage, key: &BlockKey) -> Result<PlanarImage> {
    etc_encrypt_with_schedule(img, &key.schedule(img.width(), img.height())?)
}

pub fn etc_decrypt(img: &PlanarImage, key: &BlockKey) -> Result<PlanarImage> {
    etc_decrypt_with_schedule(img, &key.schedule(img.width(), img.height())?)
}
