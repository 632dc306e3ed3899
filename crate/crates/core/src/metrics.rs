//! Localization and classification metrics.
//!
//! Distances are normalized by the image size `sqrt(W·H)`. With the default
//! divisor of 7 the hit disc covers `π/49 ≈ 6.41%` of the image area for
//! any aspect ratio.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::anchor::{angle_diff, AttachmentAnchor, ImageDims, Point2};
use crate::error::{Error, Result};
use crate::exec::Exec;

pub const DEFAULT_RADIUS_DIVISOR: f64 = 7.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub predicted_grasp: Point2,
    pub true_grasp: Point2,
    pub image: ImageDims,
    pub predicted_anchor: Option<AttachmentAnchor>,
    pub true_anchor: Option<AttachmentAnchor>,
    /// Set when the raw prediction fell outside the image and was clamped.
    #[serde(default)]
    pub clamped: bool,
}

impl PredictionRecord {
    pub fn new(predicted_grasp: Point2, true_grasp: Point2, image: ImageDims) -> Self {
        Self { predicted_grasp, true_grasp, image, predicted_anchor: None, true_anchor: None, clamped: false }
    }

    pub fn error(&self) -> f64 {
        self.predicted_grasp.distance(self.true_grasp)
    }
}

fn non_empty<T>(v: &[T], what: &str) -> Result<()> {
    if v.is_empty() {
        Err(Error::InsufficientSamples(format!("{what} needs at least one record")))
    } else {
        Ok(())
    }
}

/// Hit radius `sqrt(W·H) / divisor`.
pub fn hit_radius(img: ImageDims, radius_divisor: f64) -> f64 {
    img.size() / radius_divisor
}

/// Fraction of predictions within the (inclusive) hit radius.
pub fn precision_at(records: &[PredictionRecord], radius_divisor: f64) -> Result<f64> {
    non_empty(records, "precision")?;
    if radius_divisor.is_nan() || radius_divisor <= 0.0 {
        return Err(Error::InvalidArgument(format!("radius divisor must be positive, got {radius_divisor}")));
    }
    let hits = records.iter().filter(|r| r.error() <= hit_radius(r.image, radius_divisor)).count();
    Ok(hits as f64 / records.len() as f64)
}

/// Root-mean-square localization error in percent of `sqrt(W·H)`.
pub fn rmse_percent(records: &[PredictionRecord]) -> Result<f64> {
    non_empty(records, "rmse")?;
    let ms = records.iter().map(|r| (r.error() / r.image.size()).powi(2)).sum::<f64>() / records.len() as f64;
    Ok(100.0 * ms.sqrt())
}

/// RMS of wrapped angular errors, each in `[0, π]`.
pub fn angular_rmse(pred: &[f64], truth: &[f64]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch { left: pred.len(), right: truth.len() });
    }
    non_empty(pred, "angular rmse")?;
    let ms = pred.iter().zip(truth).map(|(p, t)| angle_diff(*p, *t).powi(2)).sum::<f64>() / pred.len() as f64;
    Ok(ms.sqrt())
}

/// Fraction of records whose predicted anchor case matches the true case.
pub fn type_precision(records: &[PredictionRecord]) -> Result<f64> {
    non_empty(records, "type precision")?;
    let mut hits = 0usize;
    for r in records {
        match (&r.predicted_anchor, &r.true_anchor) {
            (Some(p), Some(t)) => hits += usize::from(p.case == t.case),
            _ => return Err(Error::MissingAnchor),
        }
    }
    Ok(hits as f64 / records.len() as f64)
}

/// Monte-Carlo estimate of the area fraction of a hit disc centred in the
/// image. Chunks of 65 536 points use independent ChaCha streams, so the
/// estimate is identical for every `exec`.
pub fn hit_area_fraction_mc(img: ImageDims, radius_divisor: f64, points: usize, seed: u64, exec: Exec) -> f64 {
    const CHUNK: usize = 1 << 16;
    let radius = hit_radius(img, radius_divisor);
    let centre = Point2::new(img.w() / 2.0, img.h() / 2.0);
    let chunks = points.div_ceil(CHUNK);
    let hits: usize = exec
        .map_indices(chunks, |c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let n = CHUNK.min(points - c * CHUNK);
            (0..n)
                .filter(|_| {
                    let p = Point2::new(rng.random::<f64>() * img.w(), rng.random::<f64>() * img.h());
                    p.distance(centre) <= radius
                })
                .count()
        })
        .into_iter()
        .sum();
    hits as f64 / points as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anchor::AnchorCase;

    fn img() -> ImageDims {
        ImageDims::new(700, 700).unwrap()
    }

    fn rec(err: f64) -> PredictionRecord {
        PredictionRecord::new(Point2::new(300.0 + err, 300.0), Point2::new(300.0, 300.0), img())
    }

    #[test]
    fn precision_boundary() {
        assert_eq!(hit_radius(img(), 7.0), 100.0);
        assert_eq!(precision_at(&[rec(100.0)], 7.0).unwrap(), 1.0);
        assert_eq!(precision_at(&[rec(100.1)], 7.0).unwrap(), 0.0);
        assert_eq!(precision_at(&[rec(0.0), rec(0.0)], 7.0).unwrap(), 1.0);
        assert!(precision_at(&[], 7.0).is_err());
    }

    #[test]
    fn rmse_examples() {
        let r = rmse_percent(&[rec(21.0), rec(28.0)]).unwrap();
        assert!((r - 3.535_533_905_932_737_6).abs() < 1e-12);
        assert_eq!(rmse_percent(&[rec(0.0)]).unwrap(), 0.0);
        assert!((rmse_percent(&[rec(35.0)]).unwrap() - 5.0).abs() < 1e-12);
        assert!(rmse_percent(&[]).is_err());
    }

    #[test]
    fn angular_examples() {
        assert!((angular_rmse(&[0.1, -0.1], &[0.0, 0.0]).unwrap() - 0.1).abs() < 1e-15);
        let r = angular_rmse(&[359f64.to_radians()], &[1f64.to_radians()]).unwrap();
        assert!((r - 0.034_906_585_039_886_59).abs() < 1e-12);
        assert_eq!(angular_rmse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert!(angular_rmse(&[1.0], &[]).is_err());
        assert!(angular_rmse(&[], &[]).is_err());
    }

    #[test]
    fn type_precision_counts() {
        let anchor = |c| Some(AttachmentAnchor::canonical(c, Point2::new(1.0, 1.0)));
        let recs: Vec<PredictionRecord> = (0..4)
            .map(|i| PredictionRecord {
                predicted_anchor: anchor(if i % 2 == 0 { AnchorCase::Strand } else { AnchorCase::Plane }),
                true_anchor: anchor(AnchorCase::Strand),
                ..rec(0.0)
            })
            .collect();
        assert_eq!(type_precision(&recs).unwrap(), 0.5);
        assert_eq!(type_precision(&[rec(0.0)]), Err(Error::MissingAnchor));
    }

    #[test]
    fn monte_carlo_schedule_independent() {
        let a = hit_area_fraction_mc(img(), 7.0, 200_000, 1, Exec::Sequential);
        let b = hit_area_fraction_mc(img(), 7.0, 200_000, 1, Exec::Parallel);
        assert_eq!(a, b);
    }
}
