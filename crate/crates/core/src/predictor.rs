//! Statistical grasp predictors `(image, dissection[, anchor]) ↦ grasp`.
//!
//! Two baselines ignore anchors: the mean absolute grasp position and the
//! mean grasp-minus-dissection offset. Two anchor-conditioned predictors use
//! the ground-truth anchor: the per-case mean grasp in the canonical frame,
//! and the per-case mean radial code `(r_rel, relative angle)`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::anchor::{AnchorCase, Point2, Sample};
use crate::codec::{decode_grasp, encode_grasp, GraspCode};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::frame::{build_canonicalizer, canonicalize, CanonicalPoint};
use crate::metrics::{precision_at, rmse_percent, PredictionRecord, DEFAULT_RADIUS_DIVISOR};
use crate::protocol::{aggregate_runs, RunSummary, SplitPlan};

/// Resultant length below which a circular mean is undefined.
pub const MIN_RESULTANT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PredictorKind {
    AbsoluteMean,
    RelativeMean,
    AnchorCanonicalMean,
    AnchorRadial,
}

impl PredictorKind {
    pub const ALL: [PredictorKind; 4] = [
        PredictorKind::AbsoluteMean,
        PredictorKind::RelativeMean,
        PredictorKind::AnchorCanonicalMean,
        PredictorKind::AnchorRadial,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PredictorKind::AbsoluteMean => "absolute-mean",
            PredictorKind::RelativeMean => "relative-mean",
            PredictorKind::AnchorCanonicalMean => "anchor-canonical-mean",
            PredictorKind::AnchorRadial => "anchor-radial",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    pub fn uses_anchor(self) -> bool {
        matches!(self, PredictorKind::AnchorCanonicalMean | PredictorKind::AnchorRadial)
    }
}

impl fmt::Display for PredictorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialParams {
    pub r_rel: f64,
    /// Circular mean of the grasp angle relative to the adhesion vector.
    pub relative_angle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PredictorModel {
    /// Mean grasp in percent of width/height.
    AbsoluteMean {
        mean_pct: Point2,
    },
    /// Mean `grasp − dissection` in percent of width/height.
    RelativeMean {
        offset_pct: Point2,
    },
    /// Per-case mean canonical grasp, in diagonal fractions.
    AnchorCanonicalMean {
        per_case: BTreeMap<AnchorCase, CanonicalPoint>,
    },
    AnchorRadial {
        per_case: BTreeMap<AnchorCase, RadialParams>,
    },
}

impl PredictorModel {
    pub fn kind(&self) -> PredictorKind {
        match self {
            PredictorModel::AbsoluteMean { .. } => PredictorKind::AbsoluteMean,
            PredictorModel::RelativeMean { .. } => PredictorKind::RelativeMean,
            PredictorModel::AnchorCanonicalMean { .. } => PredictorKind::AnchorCanonicalMean,
            PredictorModel::AnchorRadial { .. } => PredictorKind::AnchorRadial,
        }
    }
}

/// Order-independent mean of points.
fn mean_point(points: &[Point2]) -> Point2 {
    let sum = |f: fn(&Point2) -> f64| {
        let mut v: Vec<f64> = points.iter().map(f).collect();
        v.sort_by(f64::total_cmp);
        v.iter().sum::<f64>() / v.len() as f64
    };
    Point2::new(sum(|p| p.x), sum(|p| p.y))
}

/// Circular mean via the summed unit vectors.
pub fn circular_mean(angles: &[f64]) -> Result<f64> {
    if angles.is_empty() {
        return Err(Error::InsufficientSamples("circular mean of no angles".into()));
    }
    let units: Vec<Point2> = angles.iter().map(|a| Point2::from_polar(1.0, *a)).collect();
    let m = mean_point(&units);
    let resultant = m.norm();
    if resultant < MIN_RESULTANT {
        return Err(Error::DegenerateCircularMean(resultant));
    }
    Ok(m.y.atan2(m.x))
}

fn by_case<'a>(samples: &[&'a Sample]) -> Result<BTreeMap<AnchorCase, Vec<&'a Sample>>> {
    let mut groups: BTreeMap<AnchorCase, Vec<&Sample>> = BTreeMap::new();
    for s in samples {
        groups.entry(s.anchor()?.case).or_default().push(s);
    }
    Ok(groups)
}

pub fn fit(kind: PredictorKind, samples: &[Sample]) -> Result<PredictorModel> {
    let refs: Vec<&Sample> = samples.iter().collect();
    fit_refs(kind, &refs)
}

fn fit_refs(kind: PredictorKind, samples: &[&Sample]) -> Result<PredictorModel> {
    if samples.is_empty() {
        return Err(Error::InsufficientSamples("cannot fit on an empty training set".into()));
    }
    let pct = |s: &Sample, p: Point2| Point2::new(100.0 * p.x / s.image.w(), 100.0 * p.y / s.image.h());
    Ok(match kind {
        PredictorKind::AbsoluteMean => PredictorModel::AbsoluteMean {
            mean_pct: mean_point(&samples.iter().map(|s| pct(s, s.grasp)).collect::<Vec<_>>()),
        },
        PredictorKind::RelativeMean => PredictorModel::RelativeMean {
            offset_pct: mean_point(&samples.iter().map(|s| pct(s, s.grasp - s.dissection)).collect::<Vec<_>>()),
        },
        PredictorKind::AnchorCanonicalMean => {
            let mut per_case = BTreeMap::new();
            for (case, group) in by_case(samples)? {
                let pts = group
                    .iter()
                    .map(|s| canonicalize(s.grasp, s.anchor()?, s.image).map(|c| Point2::new(c.x, c.y)))
                    .collect::<Result<Vec<_>>>()?;
                let m = mean_point(&pts);
                per_case.insert(case, CanonicalPoint::new(m.x, m.y));
            }
            PredictorModel::AnchorCanonicalMean { per_case }
        }
        PredictorKind::AnchorRadial => {
            let mut per_case = BTreeMap::new();
            for (case, group) in by_case(samples)? {
                let codes = group
                    .iter()
                    .map(|s| encode_grasp(s.grasp, s.anchor()?, s.image))
                    .collect::<Result<Vec<GraspCode>>>()?;
                let mut radii: Vec<f64> = codes.iter().map(|c| c.r_rel).collect();
                radii.sort_by(f64::total_cmp);
                let angles: Vec<f64> = codes.iter().map(|c| c.relative_angle()).collect();
                per_case.insert(
                    case,
                    RadialParams {
                        r_rel: radii.iter().sum::<f64>() / radii.len() as f64,
                        relative_angle: circular_mean(&angles)?,
                    },
                );
            }
            PredictorModel::AnchorRadial { per_case }
        }
    })
}

/// A prediction, clamped to the image; `clamped` records whether clamping
/// changed it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub grasp: Point2,
    pub clamped: bool,
}

/// Predicts the grasp of `s` (its `grasp` field is ignored).
pub fn predict(model: &PredictorModel, s: &Sample) -> Result<Prediction> {
    let (w, h) = (s.image.w(), s.image.h());
    let raw = match model {
        PredictorModel::AbsoluteMean { mean_pct } => Point2::new(mean_pct.x * w / 100.0, mean_pct.y * h / 100.0),
        PredictorModel::RelativeMean { offset_pct } => {
            s.dissection + Point2::new(offset_pct.x * w / 100.0, offset_pct.y * h / 100.0)
        }
        PredictorModel::AnchorCanonicalMean { per_case } => {
            let a = s.anchor()?;
            let c = per_case.get(&a.case).ok_or(Error::UnfittedCase(a.case.number()))?;
            if c.x == 0.0 && c.y == 0.0 {
                a.origin
            } else {
                build_canonicalizer(a, s.image)?.unwarp_point(*c)?
            }
        }
        PredictorModel::AnchorRadial { per_case } => {
            let a = s.anchor()?;
            let p = per_case.get(&a.case).ok_or(Error::UnfittedCase(a.case.number()))?;
            decode_grasp(&GraspCode::from_angle(p.relative_angle, p.r_rel), a, s.image)?
        }
    };
    let grasp = s.image.clamp(raw);
    Ok(Prediction { grasp, clamped: grasp != raw })
}

pub fn predict_record(model: &PredictorModel, s: &Sample) -> Result<PredictionRecord> {
    let p = predict(model, s)?;
    Ok(PredictionRecord {
        predicted_grasp: p.grasp,
        true_grasp: s.grasp,
        image: s.image,
        predicted_anchor: s.anchor,
        true_anchor: s.anchor,
        clamped: p.clamped,
    })
}

/// Per-partition metrics of one evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldResult {
    pub label: String,
    pub precision: f64,
    pub rmse_percent: f64,
    pub n_test: usize,
    pub model: PredictorModel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub kind: PredictorKind,
    pub folds: Vec<FoldResult>,
    pub precision: RunSummary,
    pub rmse: RunSummary,
}

/// Fits on each partition's training side, predicts the held-out side and
/// aggregates Precision@6% and RMSE over partitions.
pub fn evaluate(kind: PredictorKind, samples: &[Sample], plan: &SplitPlan, exec: Exec) -> Result<Evaluation> {
    if plan.len() != samples.len() {
        return Err(Error::LengthMismatch { left: plan.len(), right: samples.len() });
    }
    let partitions = plan.partitions();
    let folds = exec
        .map_indices(partitions.len(), |i| {
            let part = &partitions[i];
            let train: Vec<&Sample> = part.train.iter().map(|&j| &samples[j]).collect();
            let model = fit_refs(kind, &train)?;
            let records = part.test.iter().map(|&j| predict_record(&model, &samples[j])).collect::<Result<Vec<_>>>()?;
            Ok(FoldResult {
                label: part.label.clone(),
                precision: precision_at(&records, DEFAULT_RADIUS_DIVISOR)?,
                rmse_percent: rmse_percent(&records)?,
                n_test: records.len(),
                model,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let precision = aggregate_runs("precision@6%", &folds.iter().map(|f| f.precision).collect::<Vec<_>>())?;
    let rmse = aggregate_runs("rmse", &folds.iter().map(|f| f.rmse_percent).collect::<Vec<_>>())?;
    Ok(Evaluation { kind, folds, precision, rmse })
}
