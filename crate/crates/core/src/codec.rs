//! Grasp and detection encodings.
//!
//! A [`GraspCode`] places the grasp in polar form around the anchor origin:
//! `G = O + r_rel · diag(I) · R(θ_adh) φ_rel`, where `φ_rel = (1, 0)` points
//! along the adhesion vector. A [`GridCode`] is the output contract of a
//! YOLO-style head: an activated cell, a centre offset in `[-1, 1]²` and the
//! gate selecting the anchor case.

use serde::{Deserialize, Serialize};

use crate::anchor::{AnchorCase, AttachmentAnchor, ImageDims, Point2};
use crate::error::{Error, Result};

/// Default number of grid cells per side.
pub const GRID_SIZE: u32 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraspCode {
    /// Unit direction relative to the adhesion angle.
    pub phi_rel: [f64; 2],
    /// Radius as a fraction of the image diagonal, in `[0, 1]`.
    pub r_rel: f64,
}

impl GraspCode {
    pub fn from_angle(relative_angle: f64, r_rel: f64) -> Self {
        let (s, c) = relative_angle.sin_cos();
        Self { phi_rel: [c, s], r_rel }
    }

    /// Relative angle of `phi_rel`, in `(-π, π]`.
    pub fn relative_angle(&self) -> f64 {
        self.phi_rel[1].atan2(self.phi_rel[0])
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.phi_rel[0].hypot(self.phi_rel[1]);
        if (n - 1.0).abs().is_nan() || (n - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("phi_rel must be a unit vector, norm {n}")));
        }
        if !(0.0..=1.0).contains(&self.r_rel) {
            return Err(Error::InvalidArgument(format!("r_rel {} outside [0, 1]", self.r_rel)));
        }
        Ok(())
    }
}

pub fn encode_grasp(g: Point2, a: &AttachmentAnchor, img: ImageDims) -> Result<GraspCode> {
    a.validate()?;
    let d = g - a.origin;
    let distance = d.norm();
    if distance == 0.0 {
        return Err(Error::DegenerateAngle);
    }
    let diagonal = img.diagonal();
    if distance > diagonal {
        return Err(Error::BeyondDiagonal { distance, diagonal });
    }
    let unit = d.scale(1.0 / distance).rotate(-a.theta_adh);
    Ok(GraspCode { phi_rel: [unit.x, unit.y], r_rel: distance / diagonal })
}

pub fn decode_grasp(code: &GraspCode, a: &AttachmentAnchor, img: ImageDims) -> Result<Point2> {
    code.validate()?;
    a.validate()?;
    let dir = Point2::new(code.phi_rel[0], code.phi_rel[1]).rotate(a.theta_adh);
    let len = code.r_rel * img.diagonal();
    Ok(Point2::new(a.origin.x + len * dir.x, a.origin.y + len * dir.y))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridCode {
    pub grid_size: u32,
    /// `(col, row)`.
    pub cell: (u32, u32),
    pub offset: [f64; 2],
    pub gate: AnchorCase,
}

pub fn grid_encode(p: Point2, img: ImageDims, grid_size: u32, gate: AnchorCase) -> Result<GridCode> {
    if grid_size == 0 {
        return Err(Error::InvalidArgument("grid size must be at least 1".into()));
    }
    img.check_contains(p)?;
    let g = f64::from(grid_size);
    let u = p.x * g / img.w();
    let v = p.y * g / img.h();
    let last = grid_size - 1;
    let col = (u.floor() as u32).min(last);
    let row = (v.floor() as u32).min(last);
    Ok(GridCode {
        grid_size,
        cell: (col, row),
        offset: [2.0 * (u - f64::from(col) - 0.5), 2.0 * (v - f64::from(row) - 0.5)],
        gate,
    })
}

pub fn grid_decode(code: &GridCode, img: ImageDims) -> Point2 {
    let g = f64::from(code.grid_size);
    let (col, row) = code.cell;
    Point2::new(
        (f64::from(col) + 0.5 + code.offset[0] / 2.0) * img.w() / g,
        (f64::from(row) + 0.5 + code.offset[1] / 2.0) * img.h() / g,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn anchor() -> AttachmentAnchor {
        AttachmentAnchor::canonical(AnchorCase::Strand, Point2::new(100.0, 100.0))
    }

    fn img() -> ImageDims {
        ImageDims::new(600, 800).unwrap()
    }

    #[test]
    fn encode_example() {
        assert_eq!(anchor().theta_adh, FRAC_PI_2);
        let c = encode_grasp(Point2::new(100.0, 180.0), &anchor(), img()).unwrap();
        assert!((c.r_rel - 0.08).abs() < 1e-15);
        assert!((c.phi_rel[0] - 1.0).abs() < 1e-15 && c.phi_rel[1].abs() < 1e-15);
    }

    #[test]
    fn encode_at_diagonal_and_beyond() {
        let a = anchor();
        let g = a.origin + Point2::new(600.0, 800.0);
        assert_eq!(encode_grasp(g, &a, img()).unwrap().r_rel, 1.0);
        let g = a.origin + Point2::new(600.0, 800.1);
        assert!(matches!(encode_grasp(g, &a, img()), Err(Error::BeyondDiagonal { .. })));
        assert_eq!(encode_grasp(a.origin, &a, img()), Err(Error::DegenerateAngle));
    }

    #[test]
    fn decode_example_is_exact() {
        let code = GraspCode { phi_rel: [1.0, 0.0], r_rel: 0.08 };
        assert_eq!(decode_grasp(&code, &anchor(), img()).unwrap(), Point2::new(100.0, 180.0));
    }

    #[test]
    fn zero_radius_decodes_to_origin() {
        let code = GraspCode::from_angle(2.1, 0.0);
        assert_eq!(decode_grasp(&code, &anchor(), img()).unwrap(), anchor().origin);
    }

    #[test]
    fn decode_rejects_bad_codes() {
        let a = anchor();
        assert!(decode_grasp(&GraspCode { phi_rel: [2.0, 0.0], r_rel: 0.1 }, &a, img()).is_err());
        assert!(decode_grasp(&GraspCode { phi_rel: [1.0, 0.0], r_rel: 1.5 }, &a, img()).is_err());
    }

    fn square() -> ImageDims {
        ImageDims::new(700, 700).unwrap()
    }

    #[test]
    fn grid_encode_examples() {
        let c = grid_encode(Point2::new(350.0, 350.0), square(), 7, AnchorCase::Plane).unwrap();
        assert_eq!((c.cell, c.offset), ((3, 3), [0.0, 0.0]));
        let c = grid_encode(Point2::new(100.0, 100.0), square(), 7, AnchorCase::Plane).unwrap();
        assert_eq!((c.cell, c.offset), ((1, 1), [-1.0, -1.0]));
        let c = grid_encode(Point2::new(525.0, 175.0), square(), 7, AnchorCase::Plane).unwrap();
        assert_eq!(c.cell, (5, 1));
        assert!((c.offset[0] + 0.5).abs() < 1e-12 && (c.offset[1] - 0.5).abs() < 1e-12);
        let c = grid_encode(Point2::new(700.0, 700.0), square(), 7, AnchorCase::Plane).unwrap();
        assert_eq!((c.cell, c.offset), ((6, 6), [1.0, 1.0]));
    }

    #[test]
    fn grid_encode_rejects() {
        assert!(grid_encode(Point2::new(701.0, 0.0), square(), 7, AnchorCase::Strand).is_err());
        assert!(grid_encode(Point2::new(1.0, 1.0), square(), 0, AnchorCase::Strand).is_err());
    }

    #[test]
    fn grid_decode_examples() {
        let code = |cell, offset| GridCode { grid_size: 7, cell, offset, gate: AnchorCase::Strand };
        assert_eq!(grid_decode(&code((0, 0), [0.0, 0.0]), square()), Point2::new(50.0, 50.0));
        assert_eq!(grid_decode(&code((6, 6), [1.0, 1.0]), square()), Point2::new(700.0, 700.0));
    }
}
