//! Piecewise-linear angular warps around an anchor origin.
//!
//! A warp maps each clockwise sector of a source angle triple linearly onto
//! the matching sector of a target triple and scales radii by a constant.
//! Canonicalization is the warp onto adhesion = π/2, m1 = π, m2 = 0 with
//! radii expressed as fractions of the image diagonal.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::anchor::{
    cw_span, locate_angle, reduce_angle, validate_anchor, AnchorCase, AttachmentAnchor, ImageDims, Point2,
};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::raster::Raster;

/// Target angles of the canonical frame: adhesion down, mounting horizontal.
pub const CANONICAL_ANGLES: [f64; 3] = [FRAC_PI_2, PI, 0.0];

/// Point in an origin-centred warp frame (diagonal fractions after
/// canonicalization).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CanonicalPoint {
    pub x: f64,
    pub y: f64,
}

impl CanonicalPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn radius(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn angle(self) -> f64 {
        reduce_angle(self.y.atan2(self.x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngularWarp {
    pub origin: Point2,
    pub source_angles: [f64; 3],
    pub target_angles: [f64; 3],
    pub radial_scale: f64,
}

fn check_triple(angles: [f64; 3], origin: Point2) -> Result<[f64; 3]> {
    let [adh, m1, m2] = angles;
    let a = AttachmentAnchor::new(AnchorCase::Triangle, origin, adh, m1, m2);
    let v = validate_anchor(&a);
    if v.is_empty() {
        Ok(a.angles())
    } else {
        Err(Error::InvalidAnchor(v))
    }
}

fn widths([a, b, c]: [f64; 3]) -> [f64; 3] {
    [cw_span(a, b), cw_span(b, c), cw_span(c, a)]
}

/// Maps `theta` from the sectors of `from` onto the sectors of `to`.
fn map_angle(theta: f64, from: [f64; 3], to: [f64; 3]) -> f64 {
    let (i, offset) = locate_angle(theta, from);
    let t = offset / widths(from)[i];
    reduce_angle(to[i] + t * widths(to)[i])
}

impl AngularWarp {
    /// Validates both angle triples (reducing them) and the radial scale.
    pub fn new(origin: Point2, source_angles: [f64; 3], target_angles: [f64; 3], radial_scale: f64) -> Result<Self> {
        if !(radial_scale.is_finite() && radial_scale > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "radial scale must be finite and positive, got {radial_scale}"
            )));
        }
        if !origin.is_finite() {
            return Err(Error::InvalidArgument("warp origin must be finite".into()));
        }
        Ok(Self {
            origin,
            source_angles: check_triple(source_angles, origin)?,
            target_angles: check_triple(target_angles, origin)?,
            radial_scale,
        })
    }

    pub fn identity(origin: Point2, angles: [f64; 3]) -> Result<Self> {
        Self::new(origin, angles, angles, 1.0)
    }

    /// Maps `p` into the origin-centred target frame.
    pub fn warp_point(&self, p: Point2) -> Result<CanonicalPoint> {
        let d = p - self.origin;
        if d.x == 0.0 && d.y == 0.0 {
            return Err(Error::DegenerateAngle);
        }
        let theta = reduce_angle(d.y.atan2(d.x));
        let out =
            Point2::from_polar(d.norm() * self.radial_scale, map_angle(theta, self.source_angles, self.target_angles));
        Ok(CanonicalPoint::new(out.x, out.y))
    }

    /// Exact inverse of [`warp_point`](Self::warp_point).
    pub fn unwarp_point(&self, c: CanonicalPoint) -> Result<Point2> {
        if c.x == 0.0 && c.y == 0.0 {
            return Err(Error::DegenerateAngle);
        }
        let theta = map_angle(c.angle(), self.target_angles, self.source_angles);
        Ok(self.origin + Point2::from_polar(c.radius() / self.radial_scale, theta))
    }

    /// Warps `p` and places the target frame back at the warp origin, in
    /// source pixel units. The origin maps to itself.
    pub fn apply(&self, p: Point2) -> Point2 {
        match self.warp_point(p) {
            Ok(c) => self.origin + Point2::new(c.x, c.y).scale(1.0 / self.radial_scale),
            Err(_) => p,
        }
    }

    /// Inverse of [`apply`](Self::apply).
    pub fn apply_inverse(&self, q: Point2) -> Point2 {
        let d = (q - self.origin).scale(self.radial_scale);
        self.unwarp_point(CanonicalPoint::new(d.x, d.y)).unwrap_or(q)
    }
}

/// Warp from the anchor's configuration to the canonical frame, with radii
/// divided by the image diagonal.
pub fn build_canonicalizer(a: &AttachmentAnchor, img: ImageDims) -> Result<AngularWarp> {
    a.validate()?;
    AngularWarp::new(a.origin, a.angles(), CANONICAL_ANGLES, 1.0 / img.diagonal())
}

/// Convenience: canonical coordinates of `p` under anchor `a`; the origin
/// itself maps to `(0, 0)`.
pub fn canonicalize(p: Point2, a: &AttachmentAnchor, img: ImageDims) -> Result<CanonicalPoint> {
    let w = build_canonicalizer(a, img)?;
    if p == a.origin {
        return Ok(CanonicalPoint::default());
    }
    w.warp_point(p)
}

/// Backward-maps a raster through `w`.
///
/// Each output pixel centre is interpreted in the target frame placed at the
/// warp origin (see [`AngularWarp::apply`]), pulled back with the inverse
/// warp and bilinearly sampled from `src`. Source positions outside the
/// source image are black. Rows are processed independently, so the result
/// does not depend on `exec`.
pub fn warp_raster(w: &AngularWarp, src: &Raster, out_dims: ImageDims, exec: Exec) -> Result<Raster> {
    let mut out = Raster::new(out_dims.width, out_dims.height, [0, 0, 0])?;
    let row_len = out_dims.width as usize;
    exec.for_each_chunk_mut(out.pixels_mut(), row_len, |row, pixels| {
        let y = row as f64 + 0.5;
        for (col, px) in pixels.iter_mut().enumerate() {
            let p = w.apply_inverse(Point2::new(col as f64 + 0.5, y));
            *px = src.sample_bilinear(p.x, p.y);
        }
    });
    Ok(out)
}
