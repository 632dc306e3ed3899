//! Adhesion-vector warp augmentation.
//!
//! The adhesion vector is rotated by `α ~ U[-α_max, α_max]` (positive is
//! clockwise on screen) while both mounting vectors stay fixed. Annotations
//! and rasters follow the piecewise angular warp from the old anchor to the
//! new one, which stretches the Adh and Diss sectors and leaves Mnt alone.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::anchor::Sample;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::frame::{warp_raster, AngularWarp};
use crate::raster::Raster;

/// Default maximum rotation, π/18 (10°).
pub const DEFAULT_ALPHA_MAX: f64 = std::f64::consts::PI / 18.0;

/// Attempts per sample before batch augmentation gives up.
pub const MAX_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WarpAugmentConfig {
    pub alpha_max: f64,
    pub seed: u64,
}

impl Default for WarpAugmentConfig {
    fn default() -> Self {
        Self { alpha_max: DEFAULT_ALPHA_MAX, seed: 0 }
    }
}

impl WarpAugmentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_max.is_finite() && self.alpha_max >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha_max must be finite and non-negative, got {}",
                self.alpha_max
            )));
        }
        Ok(())
    }
}

/// Draws `α` uniformly from `[-alpha_max, alpha_max]`.
pub fn sample_alpha<R: Rng + ?Sized>(cfg: &WarpAugmentConfig, rng: &mut R) -> f64 {
    if cfg.alpha_max == 0.0 {
        return 0.0;
    }
    rng.random_range(-cfg.alpha_max..=cfg.alpha_max)
}

/// Deterministic stream of `α` draws for one seed.
#[derive(Debug, Clone)]
pub struct AlphaSampler {
    cfg: WarpAugmentConfig,
    rng: ChaCha8Rng,
}

impl AlphaSampler {
    pub fn new(cfg: WarpAugmentConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { cfg, rng: ChaCha8Rng::seed_from_u64(cfg.seed) })
    }

    /// Sampler positioned on its own stream, so draw `k` of stream `index`
    /// is a pure function of `(seed, index, k)`.
    pub fn for_stream(cfg: WarpAugmentConfig, index: u64) -> Result<Self> {
        let mut s = Self::new(cfg)?;
        s.rng.set_stream(index);
        Ok(s)
    }

    pub fn draw(&mut self) -> f64 {
        sample_alpha(&self.cfg, &mut self.rng)
    }
}

/// The anchor-to-anchor warp induced by rotating the adhesion vector.
pub fn adhesion_warp(s: &Sample, alpha: f64) -> Result<AngularWarp> {
    let a = s.anchor()?;
    a.validate()?;
    let rotated = a.with_theta_adh(a.theta_adh + alpha);
    rotated.validate()?;
    AngularWarp::new(a.origin, a.angles(), rotated.angles(), 1.0)
}

/// Rotates the adhesion vector by `alpha` and warps the dissection and grasp
/// points consistently. Fails when the rotation collapses a sector or pushes
/// an annotation outside the image.
pub fn apply_warp_augment(s: &Sample, alpha: f64) -> Result<Sample> {
    if !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!("alpha must be finite, got {alpha}")));
    }
    if alpha == 0.0 {
        return Ok(s.clone());
    }
    let w = adhesion_warp(s, alpha)?;
    let a = s.anchor()?;
    let out = Sample {
        image: s.image,
        dissection: w.apply(s.dissection),
        grasp: w.apply(s.grasp),
        anchor: Some(a.with_theta_adh(a.theta_adh + alpha)),
        meta: s.meta.clone(),
    };
    out.image.check_contains(out.dissection)?;
    out.image.check_contains(out.grasp)?;
    Ok(out)
}

/// Annotation warp plus the matching raster warp.
pub fn apply_warp_augment_raster(s: &Sample, raster: &Raster, alpha: f64, exec: Exec) -> Result<(Sample, Raster)> {
    if raster.width() != s.image.width || raster.height() != s.image.height {
        return Err(Error::InvalidArgument(format!(
            "raster is {}x{}, sample image is {}x{}",
            raster.width(),
            raster.height(),
            s.image.width,
            s.image.height
        )));
    }
    let out = apply_warp_augment(s, alpha)?;
    if alpha == 0.0 {
        return Ok((out, raster.clone()));
    }
    let w = adhesion_warp(s, alpha)?;
    Ok((out, warp_raster(&w, raster, s.image, exec)?))
}

/// One augmented sample with the rotation that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Augmented {
    pub sample: Sample,
    pub alpha: f64,
}

/// Augments every sample once. Sample `i` draws from the stream seeded with
/// `seed ^ i`; draws that collapse a sector or leave the image are rejected
/// and redrawn, up to [`MAX_ATTEMPTS`].
pub fn augment_batch(samples: &[Sample], cfg: &WarpAugmentConfig, exec: Exec) -> Result<Vec<Augmented>> {
    cfg.validate()?;
    exec.map_indices(samples.len(), |i| {
        let s = &samples[i];
        s.anchor()?.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ i as u64);
        for _ in 0..MAX_ATTEMPTS {
            let alpha = sample_alpha(cfg, &mut rng);
            match apply_warp_augment(s, alpha) {
                Ok(sample) => return Ok(Augmented { sample, alpha }),
                Err(Error::InvalidAnchor(_)) | Err(Error::OutOfBounds { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::RetryExhausted(MAX_ATTEMPTS))
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anchor::{AnchorCase, AttachmentAnchor, ImageDims, Point2};

    fn sample(grasp: Point2) -> Sample {
        let origin = Point2::new(320.0, 320.0);
        Sample {
            image: ImageDims::new(640, 640).unwrap(),
            dissection: origin + Point2::new(-40.0, 30.0),
            grasp,
            anchor: Some(AttachmentAnchor::canonical(AnchorCase::Triangle, origin)),
            meta: Default::default(),
        }
    }

    #[test]
    fn zero_alpha_is_identity() {
        let s = sample(Point2::new(300.0, 400.0));
        assert_eq!(apply_warp_augment(&s, 0.0).unwrap(), s);
        let mut sampler = AlphaSampler::new(WarpAugmentConfig { alpha_max: 0.0, seed: 3 }).unwrap();
        assert!((0..100).all(|_| sampler.draw() == 0.0));
    }

    #[test]
    fn adhesion_ray_follows_rotation() {
        let o = Point2::new(320.0, 320.0);
        let s = sample(o + Point2::new(0.0, 150.0));
        let alpha = 10f64.to_radians();
        let out = apply_warp_augment(&s, alpha).unwrap();
        let a = out.anchor.unwrap();
        let expected = o + Point2::from_polar(150.0, a.theta_adh);
        assert!(out.grasp.distance(expected) < 1e-9);
        assert!(((a.theta_adh - s.anchor.unwrap().theta_adh) - alpha).abs() < 1e-15);
    }

    #[test]
    fn mounting_sector_untouched() {
        let o = Point2::new(320.0, 320.0);
        let g = o + Point2::from_polar(100.0, 1.5 * std::f64::consts::PI);
        let s = sample(g);
        for alpha in [-0.17, -0.05, 0.05, 0.17] {
            assert!(apply_warp_augment(&s, alpha).unwrap().grasp.distance(g) < 1e-9);
        }
    }

    #[test]
    fn collapsing_rotation_rejected() {
        let s = sample(Point2::new(300.0, 400.0));
        // Adh sector is π/2 wide; rotating past it collapses the sector.
        assert!(matches!(apply_warp_augment(&s, 1.6), Err(Error::InvalidAnchor(_))));
        assert!(apply_warp_augment(&s, f64::NAN).is_err());
    }

    #[test]
    fn missing_anchor_rejected() {
        let mut s = sample(Point2::new(300.0, 400.0));
        s.anchor = None;
        assert_eq!(apply_warp_augment(&s, 0.1), Err(Error::MissingAnchor));
    }

    #[test]
    fn streams_are_reproducible() {
        let cfg = WarpAugmentConfig { alpha_max: DEFAULT_ALPHA_MAX, seed: 11 };
        let a: Vec<f64> = {
            let mut s = AlphaSampler::for_stream(cfg, 4).unwrap();
            (0..5).map(|_| s.draw()).collect()
        };
        let mut s = AlphaSampler::for_stream(cfg, 4).unwrap();
        let b: Vec<f64> = (0..5).map(|_| s.draw()).collect();
        assert_eq!(a, b);
        let mut other = AlphaSampler::for_stream(cfg, 5).unwrap();
        assert_ne!(a[0], other.draw());
    }

    #[test]
    fn raster_dims_must_match() {
        let s = sample(Point2::new(300.0, 400.0));
        let r = Raster::new(10, 10, [0, 0, 0]).unwrap();
        assert!(apply_warp_augment_raster(&s, &r, 0.1, Exec::Sequential).is_err());
    }

    #[test]
    fn batch_is_schedule_independent() {
        let samples: Vec<Sample> = (0..20).map(|i| sample(Point2::new(250.0 + i as f64, 420.0))).collect();
        let cfg = WarpAugmentConfig { alpha_max: DEFAULT_ALPHA_MAX, seed: 9 };
        let a = augment_batch(&samples, &cfg, Exec::Sequential).unwrap();
        let b = augment_batch(&samples, &cfg, Exec::Parallel).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|x| x.alpha.abs() <= DEFAULT_ALPHA_MAX));
    }
}
