//! Point distributions under the three representations and significance
//! tests between them.
//!
//! Units: `Absolute` and `RelativeToDissection` are percent of image width
//! (x) and height (y); `AnchorNormalized` is percent of the image diagonal
//! in the canonical anchor frame.

mod student;

use std::fmt;

pub use student::{
    inc_beta, ln_gamma, student_t_cdf, t_test_paired, t_test_paired_one_sided, t_test_pooled, t_test_welch_unpaired,
    Alternative, TTest,
};

use crate::anchor::{AnchorCase, Point2, Sample};
use crate::error::{Error, Result};
use crate::frame::canonicalize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RepresentationKind {
    Absolute,
    RelativeToDissection,
    AnchorNormalized,
}

impl RepresentationKind {
    pub const ALL: [RepresentationKind; 3] =
        [RepresentationKind::Absolute, RepresentationKind::RelativeToDissection, RepresentationKind::AnchorNormalized];

    pub fn name(self) -> &'static str {
        match self {
            RepresentationKind::Absolute => "absolute",
            RepresentationKind::RelativeToDissection => "relative",
            RepresentationKind::AnchorNormalized => "anchor",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            RepresentationKind::AnchorNormalized => "pct_diagonal",
            _ => "pct_width_height",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl fmt::Display for RepresentationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Grasp,
    Dissect,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::Grasp => "grasp",
            Role::Dissect => "dissect",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    fn of(self, p: Point2) -> f64 {
        match self {
            Axis::X => p.x,
            Axis::Y => p.y,
        }
    }
}

/// Grasp and (when defined) dissection coordinates in percent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub grasp: Point2,
    pub dissect: Option<Point2>,
}

pub fn project(s: &Sample, kind: RepresentationKind) -> Result<Projection> {
    let (w, h) = (s.image.w(), s.image.h());
    let pct = |p: Point2| Point2::new(100.0 * p.x / w, 100.0 * p.y / h);
    Ok(match kind {
        RepresentationKind::Absolute => Projection { grasp: pct(s.grasp), dissect: Some(pct(s.dissection)) },
        RepresentationKind::RelativeToDissection => Projection { grasp: pct(s.grasp - s.dissection), dissect: None },
        RepresentationKind::AnchorNormalized => {
            let a = s.anchor()?;
            let c = |p| canonicalize(p, a, s.image).map(|c| Point2::new(100.0 * c.x, 100.0 * c.y));
            Projection { grasp: c(s.grasp)?, dissect: Some(c(s.dissection)?) }
        }
    })
}

/// One cell of a [`StdReport`]; `case == None` pools all samples.
#[derive(Debug, Clone, PartialEq)]
pub struct StdCell {
    pub kind: RepresentationKind,
    pub case: Option<AnchorCase>,
    pub role: Role,
    pub std_x: f64,
    pub std_y: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct StdReport {
    pub cells: Vec<StdCell>,
}

impl StdReport {
    pub fn get(&self, kind: RepresentationKind, case: Option<AnchorCase>, role: Role) -> Option<&StdCell> {
        self.cells.iter().find(|c| c.kind == kind && c.case == case && c.role == role)
    }
}

/// Sample standard deviation with order-independent summation.
pub fn sample_std(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    student::variance(&v).sqrt()
}

fn sorted_mean(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    student::mean(&v)
}

/// Per-axis standard deviations for every `(kind, case, role)` cell that has
/// samples. `Absolute` and `Relative` also get a pooled row; the relative
/// representation has no dissection cells.
pub fn std_report(samples: &[Sample], kinds: &[RepresentationKind]) -> Result<StdReport> {
    let mut cells = Vec::new();
    for &kind in kinds {
        let mut groups: Vec<Option<AnchorCase>> = AnchorCase::ALL.iter().copied().map(Some).collect();
        if kind != RepresentationKind::AnchorNormalized {
            groups.insert(0, None);
        }
        for case in groups {
            let members: Vec<&Sample> = samples.iter().filter(|s| case.is_none() || s.case() == case).collect();
            if members.is_empty() {
                continue;
            }
            if members.len() < 2 {
                return Err(Error::InsufficientSamples(format!(
                    "{kind} {} has {} sample(s), need >= 2",
                    case.map_or("all".to_string(), |c| c.to_string()),
                    members.len()
                )));
            }
            let proj = members.iter().map(|s| project(s, kind)).collect::<Result<Vec<_>>>()?;
            let mut roles = vec![(Role::Grasp, proj.iter().map(|p| p.grasp).collect::<Vec<_>>())];
            if kind != RepresentationKind::RelativeToDissection {
                roles.push((Role::Dissect, proj.iter().filter_map(|p| p.dissect).collect()));
            }
            for (role, pts) in roles {
                let xs: Vec<f64> = pts.iter().map(|p| p.x).collect();
                let ys: Vec<f64> = pts.iter().map(|p| p.y).collect();
                cells.push(StdCell { kind, case, role, std_x: sample_std(&xs), std_y: sample_std(&ys), n: pts.len() });
            }
        }
    }
    Ok(StdReport { cells })
}

/// Per-sample absolute deviation of the grasp coordinate from its mean
/// along `axis`, under two representations, paired by sample.
pub fn paired_deviation_vectors(
    samples: &[Sample],
    kind_a: RepresentationKind,
    kind_b: RepresentationKind,
    axis: Axis,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if samples.len() < 2 {
        return Err(Error::InsufficientSamples(format!("deviation pairing needs >= 2 samples, got {}", samples.len())));
    }
    let deviations = |kind| -> Result<Vec<f64>> {
        let v = samples.iter().map(|s| project(s, kind).map(|p| axis.of(p.grasp))).collect::<Result<Vec<f64>>>()?;
        let m = sorted_mean(&v);
        Ok(v.iter().map(|x| (x - m).abs()).collect())
    };
    Ok((deviations(kind_a)?, deviations(kind_b)?))
}

/// One-sided paired test that anchor-normalized grasp deviations along
/// `axis` are smaller than dissection-relative ones.
pub fn anchor_vs_relative_test(samples: &[Sample], axis: Axis) -> Result<TTest> {
    let (a, b) = paired_deviation_vectors(
        samples,
        RepresentationKind::AnchorNormalized,
        RepresentationKind::RelativeToDissection,
        axis,
    )?;
    t_test_paired_one_sided(&a, &b)
}
