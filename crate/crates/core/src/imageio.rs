//! Binary PPM (`P6`, maxval 255) and CIFAR-10 binary batch codecs.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::PlanarImage;

pub const CIFAR_SIDE: usize = 32;
pub const CIFAR_PIXELS: usize = CIFAR_SIDE * CIFAR_SIDE;
/// One label byte followed by the R, G and B planes.
pub const CIFAR_RECORD_BYTES: usize = 1 + 3 * CIFAR_PIXELS;
pub const CIFAR_CLASSES: u8 = 10;

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderCursor<'a> {
    /// Skips whitespace and `#` comments (which run to end of line).
    fn skip_separators(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_separators();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Ppm(format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Ppm(format!("{what} out of range")))
    }
}

pub fn read_ppm(bytes: &[u8]) -> Result<PlanarImage> {
    if bytes.len() < 2 || &bytes[..2] != b"P6" {
        return Err(Error::Ppm("bad magic, expected P6".into()));
    }
    let mut cur = HeaderCursor { bytes, pos: 2 };
    if !bytes.get(2).is_some_and(|b| b.is_ascii_whitespace() || *b == b'#') {
        return Err(Error::Ppm("bad magic, expected P6".into()));
    }
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if maxval != 255 {
        return Err(Error::Ppm(format!("maxval {maxval} unsupported, only 255")));
    }
    // Exactly one whitespace byte separates the header from the raster.
    if !bytes.get(cur.pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(Error::Ppm("missing whitespace after maxval".into()));
    }
    let start = cur.pos + 1;
    let len = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(3))
        .ok_or_else(|| Error::Ppm("dimensions overflow".into()))?;
    let raster = &bytes[start.min(bytes.len())..];
    if raster.len() < len {
        return Err(Error::Ppm(format!(
            "truncated payload: need {len} bytes, have {}",
            raster.len()
        )));
    }
    if raster.len() > len {
        return Err(Error::Ppm(format!("{} trailing bytes after raster", raster.len() - len)));
    }
    PlanarImage::from_interleaved(width, height, raster).map_err(|e| Error::Ppm(e.to_string()))
}

/// Canonical encoding: `P6\n<w> <h>\n255\n` followed by interleaved RGB.
pub fn write_ppm(img: &PlanarImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(img.to_interleaved());
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub label: u8,
    pub image: PlanarImage,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DatasetBatch {
    pub records: Vec<Record>,
}

impl DatasetBatch {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

fn parse_record(chunk: &[u8], index: usize) -> Result<Record> {
    let label = chunk[0];
    if label >= CIFAR_CLASSES {
        return Err(Error::Cifar(format!("record {index}: label {label} > 9")));
    }
    let planes = [0, 1, 2].map(|c| chunk[1 + c * CIFAR_PIXELS..1 + (c + 1) * CIFAR_PIXELS].to_vec());
    Ok(Record {
        label,
        image: PlanarImage::new(CIFAR_SIDE, CIFAR_SIDE, planes)?,
    })
}

pub fn read_cifar_batch(bytes: &[u8]) -> Result<DatasetBatch> {
    if bytes.len() % CIFAR_RECORD_BYTES != 0 {
        return Err(Error::Cifar(format!(
            "length {} is not a multiple of {CIFAR_RECORD_BYTES}",
            bytes.len()
        )));
    }
    let records = bytes
        .par_chunks_exact(CIFAR_RECORD_BYTES)
        .enumerate()
        .map(|(i, chunk)| parse_record(chunk, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(DatasetBatch { records })
}

pub fn write_cifar_batch(batch: &DatasetBatch) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(batch.len() * CIFAR_RECORD_BYTES);
    for (i, rec) in batch.records.iter().enumerate() {
        if rec.image.width() != CIFAR_SIDE || rec.image.height() != CIFAR_SIDE {
            return Err(Error::Cifar(format!(
                "record {i}: image is {}x{}, expected 32x32",
                rec.image.width(),
                rec.image.height()
            )));
        }
        if rec.label >= CIFAR_CLASSES {
            return Err(Error::Cifar(format!("record {i}: label {} > 9", rec.label)));
        }
        out.push(rec.label);
        for plane in rec.image.planes() {
            out.extend_from_slice(plane);
        }
    }
    Ok(out)
}
