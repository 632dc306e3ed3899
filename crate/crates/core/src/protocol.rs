//! Evaluation splits and run aggregation.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::anchor::{AnchorCase, Sample};
use crate::error::{Error, Result};

pub const SURGERY_TYPE: &str = "surgery_type";
pub const SURGEON_ID: &str = "surgeon_id";
pub const DEFAULT_MIN_GROUP_FRACTION: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitKind {
    KFold,
    GroupHoldout,
}

/// Assignment of samples to folds (k-fold) or to named groups (holdout).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub kind: SplitKind,
    /// Fold index or group index per sample.
    pub assignments: Vec<usize>,
    /// Group names for holdout plans, `fold{i}` for k-fold.
    pub labels: Vec<String>,
    /// Held-out group index; `None` for k-fold, where every fold is held out in turn.
    pub held_out: Option<usize>,
    pub seed: u64,
}

/// One train/evaluate partition.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub label: String,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

impl SplitPlan {
    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    fn members(&self, label: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.assignments[i] == label).collect()
    }

    /// K-fold plans yield one partition per fold; holdout plans yield one.
    pub fn partitions(&self) -> Vec<Partition> {
        let split = |held: usize| Partition {
            label: self.labels[held].clone(),
            train: (0..self.len()).filter(|&i| self.assignments[i] != held).collect(),
            test: self.members(held),
        };
        match self.held_out {
            Some(h) => vec![split(h)],
            None => (0..self.labels.len()).map(split).collect(),
        }
    }

    /// Number of samples per fold/group label.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.labels.len()];
        for &a in &self.assignments {
            sizes[a] += 1;
        }
        sizes
    }
}

/// Folds balanced by anchor case and total size: each case stratum is
/// shuffled and dealt round-robin, continuing the deal position across
/// strata so fold sizes differ by at most one.
pub fn stratified_kfold(samples: &[Sample], k: usize, seed: u64) -> Result<SplitPlan> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k must be >= 2, got {k}")));
    }
    let mut strata: BTreeMap<Option<AnchorCase>, Vec<usize>> = BTreeMap::new();
    for (i, s) in samples.iter().enumerate() {
        strata.entry(s.case()).or_default().push(i);
    }
    for (case, members) in &strata {
        if members.len() < k {
            return Err(Error::InsufficientSamples(format!(
                "{} has {} samples, need at least k = {k}",
                case.map_or("anchorless stratum".to_string(), |c| c.to_string()),
                members.len()
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignments = vec![0; samples.len()];
    let mut next = 0usize;
    for members in strata.values_mut() {
        members.shuffle(&mut rng);
        for &i in members.iter() {
            assignments[i] = next % k;
            next += 1;
        }
    }
    Ok(SplitPlan {
        kind: SplitKind::KFold,
        assignments,
        labels: (0..k).map(|f| format!("fold{f}")).collect(),
        held_out: None,
        seed,
    })
}

/// One holdout plan per distinct label; `labels[i]` is sample `i`'s group.
pub fn holdout_plans(labels: &[String]) -> Result<Vec<SplitPlan>> {
    let names: Vec<String> = labels.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    if names.len() < 2 {
        return Err(Error::InsufficientSamples(format!("group holdout needs at least 2 groups, got {}", names.len())));
    }
    let index: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let assignments: Vec<usize> = labels.iter().map(|l| index[l.as_str()]).collect();
    Ok((0..names.len())
        .map(|h| SplitPlan {
            kind: SplitKind::GroupHoldout,
            assignments: assignments.clone(),
            labels: names.clone(),
            held_out: Some(h),
            seed: 0,
        })
        .collect())
}

fn meta_values(samples: &[Sample], key: &str) -> Result<Vec<String>> {
    samples
        .iter()
        .enumerate()
        .map(|(index, s)| s.meta.get(key).cloned().ok_or_else(|| Error::MissingMeta { index, key: key.to_string() }))
        .collect()
}

/// Leave-one-group-out over the distinct values of `meta_key`, in sorted order.
pub fn group_holdout(samples: &[Sample], meta_key: &str) -> Result<Vec<SplitPlan>> {
    holdout_plans(&meta_values(samples, meta_key)?)
}

/// Surgeons packed into groups that each hold at least `min_fraction` of
/// the samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SurgeonGroups {
    /// Surgeon ids per group, in formation order.
    pub groups: Vec<Vec<String>>,
    pub by_surgeon: BTreeMap<String, usize>,
    /// Fewer than two groups could be formed.
    pub degenerate: bool,
}

impl SurgeonGroups {
    pub fn label(&self, group: usize) -> String {
        self.groups[group].join("+")
    }
}

/// Greedy grouping: surgeons sorted by descending count (ties by id); any
/// surgeon reaching `min_fraction` alone is a singleton, the rest are packed
/// in order into groups closed once they reach the threshold, and a final
/// underweight group merges into the previous one.
pub fn group_surgeons_by_count(counts: &BTreeMap<String, usize>, min_fraction: f64) -> Result<SurgeonGroups> {
    if !(min_fraction > 0.0 && min_fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!("min_fraction must be in (0, 1], got {min_fraction}")));
    }
    let total: usize = counts.values().sum();
    if total == 0 {
        return Err(Error::InsufficientSamples("no samples to group".into()));
    }
    let threshold = min_fraction * total as f64;
    let mut order: Vec<(&String, usize)> = counts.iter().map(|(k, v)| (k, *v)).collect();
    order.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));

    let mut groups: Vec<(Vec<String>, usize)> = Vec::new();
    let mut open: (Vec<String>, usize) = (Vec::new(), 0);
    for (id, n) in order {
        open.0.push(id.clone());
        open.1 += n;
        if open.1 as f64 >= threshold {
            groups.push(std::mem::take(&mut open));
        }
    }
    if !open.0.is_empty() {
        match groups.last_mut() {
            Some(last) => {
                last.0.extend(open.0);
                last.1 += open.1;
            }
            None => groups.push(open),
        }
    }
    let groups: Vec<Vec<String>> = groups.into_iter().map(|g| g.0).collect();
    let by_surgeon = groups.iter().enumerate().flat_map(|(g, ids)| ids.iter().map(move |id| (id.clone(), g))).collect();
    Ok(SurgeonGroups { degenerate: groups.len() < 2, groups, by_surgeon })
}

pub fn group_surgeons(samples: &[Sample], min_fraction: f64) -> Result<SurgeonGroups> {
    let mut counts = BTreeMap::new();
    for id in meta_values(samples, SURGEON_ID)? {
        *counts.entry(id).or_insert(0) += 1;
    }
    group_surgeons_by_count(&counts, min_fraction)
}

/// Leave-one-surgeon-group-out plans.
pub fn surgeon_group_holdout(samples: &[Sample], min_fraction: f64) -> Result<Vec<SplitPlan>> {
    let groups = group_surgeons(samples, min_fraction)?;
    if groups.degenerate {
        return Err(Error::InsufficientSamples("surgeon grouping produced a single group".into()));
    }
    let labels: Vec<String> =
        meta_values(samples, SURGEON_ID)?.iter().map(|id| groups.label(groups.by_surgeon[id])).collect();
    holdout_plans(&labels)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub metric: String,
    pub values: Vec<f64>,
    pub mean: f64,
    /// Sample (n − 1) standard deviation; 0 for a single run.
    pub std: f64,
    pub n_runs: usize,
    /// Set when only one run was available, so `std` carries no information.
    pub single_run: bool,
}

pub fn aggregate_runs(metric: &str, values: &[f64]) -> Result<RunSummary> {
    if values.is_empty() {
        return Err(Error::InsufficientSamples(format!("no runs to aggregate for {metric}")));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() == 1 {
        0.0
    } else {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    Ok(RunSummary {
        metric: metric.to_string(),
        values: values.to_vec(),
        mean,
        std,
        n_runs: values.len(),
        single_run: values.len() == 1,
    })
}
