use crate::error::{Error, Result};

/// An 8-bit RGB image stored as three row-major channel planes.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PlanarImage {
    width: usize,
    height: usize,
    planes: [Vec<u8>; 3],
}

impl std::fmt::Debug for PlanarImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PlanarImage")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish_non_exhaustive()
    }
}

impl PlanarImage {
    pub fn new(width: usize, height: usize, planes: [Vec<u8>; 3]) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::ZeroDimensions { width, height });
        }
        let n = width * height;
        if let Some(bad) = planes.iter().find(|p| p.len() != n) {
            return Err(Error::PlaneLength {
                expected: n,
                got: bad.len(),
            });
        }
        Ok(Self {
            width,
            height,
            planes,
        })
    }

    /// Image with every sample of every channel set to `value`.
    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        let n = width * height;
        Self::new(width, height, [vec![value; n], vec![value; n], vec![value; n]])
    }

    /// Builds an image from interleaved `RGBRGB...` samples.
    pub fn from_interleaved(width: usize, height: usize, rgb: &[u8]) -> Result<Self> {
        let n = width * height;
        if rgb.len() != 3 * n {
            return Err(Error::PlaneLength {
                expected: 3 * n,
                got: rgb.len(),
            });
        }
        let mut planes = [Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n)];
        for px in rgb.chunks_exact(3) {
            for (plane, &s) in planes.iter_mut().zip(px) {
                plane.push(s);
            }
        }
        Self::new(width, height, planes)
    }

    pub fn to_interleaved(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(3 * self.pixel_count());
        for i in 0..self.pixel_count() {
            out.extend(self.planes.iter().map(|p| p[i]));
        }
        out
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn plane(&self, channel: usize) -> &[u8] {
        &self.planes[channel]
    }

    pub fn plane_mut(&mut self, channel: usize) -> &mut [u8] {
        &mut self.planes[channel]
    }

    pub fn planes(&self) -> &[Vec<u8>; 3] {
        &self.planes
    }

    pub fn into_planes(self) -> [Vec<u8>; 3] {
        self.planes
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = y * self.width + x;
        [self.planes[0][i], self.planes[1][i], self.planes[2][i]]
    }

    pub fn set_pixel(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = y * self.width + x;
        for (plane, s) in self.planes.iter_mut().zip(rgb) {
            plane[i] = s;
        }
    }

    pub(crate) fn ensure_same_size(&self, width: usize, height: usize) -> Result<()> {
        if self.width != width || self.height != height {
            return Err(Error::DimensionMismatch {
                expected_w: self.width,
                expected_h: self.height,
                got_w: width,
                got_h: height,
            });
        }
        Ok(())
    }
}
