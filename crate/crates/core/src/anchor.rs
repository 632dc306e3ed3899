//! Domain types, angle arithmetic, anchor validation and sector membership.
//!
//! Angles follow image coordinates: `atan2(dy, dx)` with x to the right and
//! y downward, so an increasing angle turns clockwise on screen. All stored
//! angles are reduced to `[0, 2π)`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum angular width of any anchor sector, in radians.
pub const EPS_SECTOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_polar(radius: f64, angle: f64) -> Self {
        Self::new(radius * angle.cos(), radius * angle.sin())
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Rotates about the coordinate origin by `angle` (clockwise on screen).
    pub fn rotate(self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(self.x * k, self.y * k)
    }
}

impl std::ops::Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

/// Image extent in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ImageDims {
    #[serde(rename = "w")]
    pub width: u32,
    #[serde(rename = "h")]
    pub height: u32,
}

impl ImageDims {
    pub fn new(width: u32, height: u32) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument(format!("image dims must be positive, got {width}x{height}")));
        }
        Ok(Self { width, height })
    }

    /// Euclidean diagonal length `sqrt(W² + H²)`.
    pub fn diagonal(self) -> f64 {
        f64::from(self.width).hypot(f64::from(self.height))
    }

    /// Geometric-mean side length `sqrt(W·H)`.
    pub fn size(self) -> f64 {
        (f64::from(self.width) * f64::from(self.height)).sqrt()
    }

    pub fn w(self) -> f64 {
        f64::from(self.width)
    }

    pub fn h(self) -> f64 {
        f64::from(self.height)
    }

    /// Closed-rectangle containment `[0, W] × [0, H]`.
    pub fn contains(self, p: Point2) -> bool {
        p.is_finite() && p.x >= 0.0 && p.y >= 0.0 && p.x <= self.w() && p.y <= self.h()
    }

    pub fn check_contains(self, p: Point2) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::OutOfBounds { x: p.x, y: p.y, width: self.width, height: self.height })
        }
    }

    pub fn clamp(self, p: Point2) -> Point2 {
        Point2::new(p.x.clamp(0.0, self.w()), p.y.clamp(0.0, self.h()))
    }
}

/// The three retraction configurations. Serialized as 1, 2, 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum AnchorCase {
    /// Narrow adhesion strand.
    Strand = 1,
    /// Hinge-like adhesion triangle.
    Triangle = 2,
    /// Broad plane adhesion.
    Plane = 3,
}

impl AnchorCase {
    pub const ALL: [AnchorCase; 3] = [AnchorCase::Strand, AnchorCase::Triangle, AnchorCase::Plane];

    pub fn number(self) -> u8 {
        self as u8
    }

    /// Index of the responsible prediction head, `0..3`.
    pub fn gate(self) -> usize {
        self as usize - 1
    }

    pub fn from_gate(gate: usize) -> Option<Self> {
        Self::ALL.get(gate).copied()
    }
}

impl From<AnchorCase> for u8 {
    fn from(c: AnchorCase) -> u8 {
        c.number()
    }
}

impl TryFrom<u8> for AnchorCase {
    type Error = String;
    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(AnchorCase::Strand),
            2 => Ok(AnchorCase::Triangle),
            3 => Ok(AnchorCase::Plane),
            _ => Err(format!("anchor case must be 1, 2 or 3, got {v}")),
        }
    }
}

impl fmt::Display for AnchorCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "case{}", self.number())
    }
}

/// Angular sector of an anchor, traversed clockwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    /// From the adhesion vector to the first mounting vector.
    Adh,
    /// Between the two mounting vectors.
    Mnt,
    /// From the second mounting vector back to the adhesion vector.
    Diss,
}

impl Region {
    pub const ALL: [Region; 3] = [Region::Adh, Region::Mnt, Region::Diss];
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::Adh => "Adh",
            Region::Mnt => "Mnt",
            Region::Diss => "Diss",
        })
    }
}

/// Mechanical origin plus adhesion and mounting directions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttachmentAnchor {
    pub case: AnchorCase,
    pub origin: Point2,
    pub theta_adh: f64,
    pub theta_m1: f64,
    pub theta_m2: f64,
}

impl AttachmentAnchor {
    /// Builds an anchor with all angles reduced to `[0, 2π)`. No validation.
    pub fn new(case: AnchorCase, origin: Point2, theta_adh: f64, theta_m1: f64, theta_m2: f64) -> Self {
        Self {
            case,
            origin,
            theta_adh: reduce_angle(theta_adh),
            theta_m1: reduce_angle(theta_m1),
            theta_m2: reduce_angle(theta_m2),
        }
    }

    /// Adhesion at π/2 (down), mounting vectors at π (left) and 0 (right).
    pub fn canonical(case: AnchorCase, origin: Point2) -> Self {
        Self::new(case, origin, std::f64::consts::FRAC_PI_2, std::f64::consts::PI, 0.0)
    }

    pub fn angles(&self) -> [f64; 3] {
        [self.theta_adh, self.theta_m1, self.theta_m2]
    }

    /// Clockwise widths of the Adh, Mnt and Diss sectors.
    pub fn sector_widths(&self) -> [f64; 3] {
        sector_widths(self.angles())
    }

    /// Returns a copy with the adhesion angle replaced (and reduced).
    pub fn with_theta_adh(&self, theta_adh: f64) -> Self {
        Self { theta_adh: reduce_angle(theta_adh), ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        let v = validate_anchor(self);
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidAnchor(v))
        }
    }
}

/// One failed anchor invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonFinite,
    NotReduced { which: &'static str, value: f64 },
    ClockwiseOrder,
    SectorTooNarrow { region: Region, width: f64 },
    OriginNonFinite,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonFinite => f.write_str("angles must be finite"),
            Violation::NotReduced { which, value } => {
                write!(f, "angle {which} = {value} not reduced to [0, 2π)")
            }
            Violation::ClockwiseOrder => f.write_str("clockwise order adh→m1→m2"),
            Violation::SectorTooNarrow { region, width } => {
                write!(f, "sector {region} below ε_sector (width {width:e})")
            }
            Violation::OriginNonFinite => f.write_str("origin must be finite"),
        }
    }
}

/// Checks every anchor invariant and lists the violations; empty means valid.
pub fn validate_anchor(a: &AttachmentAnchor) -> Vec<Violation> {
    let mut out = Vec::new();
    if !a.origin.is_finite() {
        out.push(Violation::OriginNonFinite);
    }
    let angles = a.angles();
    if angles.iter().any(|t| !t.is_finite()) {
        out.push(Violation::NonFinite);
        return out;
    }
    for (which, value) in ["theta_adh", "theta_m1", "theta_m2"].into_iter().zip(angles) {
        if !(0.0..TAU).contains(&value) {
            out.push(Violation::NotReduced { which, value });
        }
    }
    let [adh, m1, m2] = angles;
    // m1 must be reached strictly before m2 when sweeping clockwise from adh.
    if cw_span(adh, m1) > cw_span(adh, m2) {
        out.push(Violation::ClockwiseOrder);
        return out;
    }
    for (region, width) in Region::ALL.into_iter().zip(sector_widths(angles)) {
        if width < EPS_SECTOR {
            out.push(Violation::SectorTooNarrow { region, width });
        }
    }
    out
}

/// Reduces an angle to `[0, 2π)`.
pub fn reduce_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs.
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Clockwise angular distance from `from` to `to`, in `[0, 2π)`.
pub fn cw_span(from: f64, to: f64) -> f64 {
    reduce_angle(to - from)
}

/// Smallest absolute difference between two angles, in `[0, π]`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = cw_span(b, a);
    d.min(TAU - d)
}

fn sector_widths([adh, m1, m2]: [f64; 3]) -> [f64; 3] {
    [cw_span(adh, m1), cw_span(m1, m2), cw_span(m2, adh)]
}

/// Direction of `p` seen from `origin`, in `[0, 2π)`.
pub fn angle_of(p: Point2, origin: Point2) -> Result<f64> {
    let d = p - origin;
    if d.x == 0.0 && d.y == 0.0 {
        return Err(Error::DegenerateAngle);
    }
    Ok(reduce_angle(d.y.atan2(d.x)))
}

/// Sector of `a` containing `p`. A point on a sector's starting ray belongs
/// to that sector.
pub fn region_of(p: Point2, a: &AttachmentAnchor) -> Result<Region> {
    let theta = angle_of(p, a.origin)?;
    Ok(region_of_angle(theta, a.angles()))
}

/// Sector index (0 = Adh, 1 = Mnt, 2 = Diss) and the clockwise offset of
/// `theta` from that sector's starting ray.
pub(crate) fn locate_angle(theta: f64, angles: [f64; 3]) -> (usize, f64) {
    let [adh, m1, m2] = angles;
    let s = cw_span(adh, theta);
    let to_m1 = cw_span(adh, m1);
    let to_m2 = cw_span(adh, m2);
    if s < to_m1 {
        (0, s)
    } else if s < to_m2 {
        (1, s - to_m1)
    } else {
        (2, s - to_m2)
    }
}

pub(crate) fn region_of_angle(theta: f64, angles: [f64; 3]) -> Region {
    Region::ALL[locate_angle(theta, angles).0]
}

/// One annotated grasping maneuver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub image: ImageDims,
    pub dissection: Point2,
    pub grasp: Point2,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<AttachmentAnchor>,
    #[serde(default)]
    pub meta: BTreeMap<String, String>,
}

impl Sample {
    pub fn anchor(&self) -> Result<&AttachmentAnchor> {
        self.anchor.as_ref().ok_or(Error::MissingAnchor)
    }

    pub fn case(&self) -> Option<AnchorCase> {
        self.anchor.map(|a| a.case)
    }

    /// Checks bounds of all points and, when present, anchor validity.
    pub fn validate(&self) -> Result<()> {
        self.image.check_contains(self.dissection)?;
        self.image.check_contains(self.grasp)?;
        if let Some(a) = &self.anchor {
            self.image.check_contains(a.origin)?;
            a.validate()?;
        }
        Ok(())
    }
}
