//! Minimal RGB raster with bilinear sampling.

use crate::error::{Error, Result};

pub type Rgb = [u8; 3];

pub const BLACK: Rgb = [0, 0, 0];

/// Row-major 8-bit RGB image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    width: u32,
    height: u32,
    pixels: Vec<Rgb>,
}

impl Raster {
    pub fn new(width: u32, height: u32, fill: Rgb) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument("zero-sized raster".into()));
        }
        Ok(Self { width, height, pixels: vec![fill; width as usize * height as usize] })
    }

    pub fn from_pixels(width: u32, height: u32, pixels: Vec<Rgb>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument("zero-sized raster".into()));
        }
        if pixels.len() != width as usize * height as usize {
            return Err(Error::LengthMismatch { left: pixels.len(), right: width as usize * height as usize });
        }
        Ok(Self { width, height, pixels })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[Rgb] {
        &self.pixels
    }

    pub(crate) fn pixels_mut(&mut self) -> &mut [Rgb] {
        &mut self.pixels
    }

    pub fn get(&self, x: u32, y: u32) -> Rgb {
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, c: Rgb) {
        let w = self.width as usize;
        self.pixels[y as usize * w + x as usize] = c;
    }

    /// Bilinear sample at continuous image coordinates, where pixel `(i, j)`
    /// has its center at `(i + 0.5, j + 0.5)`. Positions outside
    /// `[0, W] × [0, H]` are black; the outer half-pixel ring clamps to the
    /// border pixels.
    pub fn sample_bilinear(&self, x: f64, y: f64) -> Rgb {
        let (w, h) = (f64::from(self.width), f64::from(self.height));
        if !(x >= 0.0 && y >= 0.0 && x <= w && y <= h) {
            return BLACK;
        }
        let u = x - 0.5;
        let v = y - 0.5;
        let (x0, y0) = (u.floor(), v.floor());
        let (fx, fy) = (u - x0, v - y0);
        let max_x = i64::from(self.width) - 1;
        let max_y = i64::from(self.height) - 1;
        let xi = |d: i64| (x0 as i64 + d).clamp(0, max_x) as u32;
        let yi = |d: i64| (y0 as i64 + d).clamp(0, max_y) as u32;
        let (p00, p10) = (self.get(xi(0), yi(0)), self.get(xi(1), yi(0)));
        let (p01, p11) = (self.get(xi(0), yi(1)), self.get(xi(1), yi(1)));
        let mut out = [0u8; 3];
        for k in 0..3 {
            let top = f64::from(p00[k]) * (1.0 - fx) + f64::from(p10[k]) * fx;
            let bottom = f64::from(p01[k]) * (1.0 - fx) + f64::from(p11[k]) * fx;
            out[k] = (top * (1.0 - fy) + bottom * fy).round().clamp(0.0, 255.0) as u8;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_size() {
        assert!(Raster::new(0, 3, BLACK).is_err());
        assert!(Raster::from_pixels(2, 2, vec![BLACK; 3]).is_err());
    }

    #[test]
    fn sampling_at_centers_is_exact() {
        let mut r = Raster::new(3, 2, BLACK).unwrap();
        r.set(1, 1, [10, 20, 30]);
        assert_eq!(r.sample_bilinear(1.5, 1.5), [10, 20, 30]);
        assert_eq!(r.sample_bilinear(1.0, 1.5), [5, 10, 15]);
        assert_eq!(r.sample_bilinear(3.0, 2.0), BLACK);
        assert_eq!(r.sample_bilinear(-0.01, 1.0), BLACK);
        assert_eq!(r.sample_bilinear(3.01, 1.0), BLACK);
    }
}
