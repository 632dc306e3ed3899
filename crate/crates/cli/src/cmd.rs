//! The four subcommands.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use anchorlab::augment::{apply_warp_augment_raster, augment_batch, WarpAugmentConfig};
use anchorlab::predictor::{evaluate, PredictorKind};
use anchorlab::protocol::{
    group_holdout, stratified_kfold, surgeon_group_holdout, SplitPlan, DEFAULT_MIN_GROUP_FRACTION,
};
use anchorlab::stats::{
    anchor_vs_relative_test, project, std_report, t_test_welch_unpaired, Alternative, Axis, RepresentationKind,
};
use anchorlab::synth::{generate_with, render, SynthConfig};
use anchorlab::{AnchorCase, Exec, ImageDims, Sample};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::dataset::{self, Record};
use crate::error::{CliError, CliResult};
use crate::report::{self, Row};
use crate::svg::{self, Series};
use crate::{AugmentArgs, EvalArgs, GenArgs, StatsArgs};

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn say(log: &mut dyn Write, msg: &str) {
    let _ = writeln!(log, "{msg}");
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::io("write", path, e))
}

fn sidecar(out: &Path, suffix: &str) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn parse_mix(s: &str) -> CliResult<[f64; 3]> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| usage(format!("--mix {s:?}: {e}")))?;
    <[f64; 3]>::try_from(parts).map_err(|_| usage(format!("--mix needs three comma-separated weights, got {s:?}")))
}

fn case_counts(samples: &[Sample]) -> String {
    AnchorCase::ALL
        .iter()
        .map(|c| format!("{c}={}", samples.iter().filter(|s| s.case() == Some(*c)).count()))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn gen(a: &GenArgs, log: &mut dyn Write) -> CliResult<()> {
    let cfg = SynthConfig {
        seed: a.seed,
        case_mix: parse_mix(&a.mix)?,
        noise_angle: a.noise_angle,
        noise_radius: a.noise_radius,
        image: ImageDims::new(a.width, a.height).map_err(|e| usage(e.to_string()))?,
        count: usize::try_from(a.count).map_err(|e| usage(e.to_string()))?,
        ..SynthConfig::default()
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    let samples = generate_with(&cfg, Exec::default())?;
    let records: Vec<Record> = samples.iter().map(Record::from_sample).collect();
    dataset::write(&a.out, &records)?;
    say(log, &format!("wrote {} samples to {} ({})", samples.len(), a.out.display(), case_counts(&samples)));
    Ok(())
}

fn load_samples(path: &Path) -> CliResult<Vec<Sample>> {
    Ok(dataset::read(path)?.iter().map(Record::to_sample).collect())
}

fn parse_kinds(s: &str) -> CliResult<Vec<RepresentationKind>> {
    let mut kinds = Vec::new();
    for name in s.split(',').map(str::trim) {
        let k = RepresentationKind::parse(name)
            .ok_or_else(|| usage(format!("unknown representation {name:?}; valid: absolute, relative, anchor")))?;
        if !kinds.contains(&k) {
            kinds.push(k);
        }
    }
    Ok(kinds)
}

fn group_label(case: Option<AnchorCase>) -> String {
    case.map_or_else(|| "all".to_string(), |c| c.to_string())
}

pub fn stats(a: &StatsArgs, log: &mut dyn Write) -> CliResult<()> {
    let kinds = parse_kinds(&a.kinds)?;
    let samples = load_samples(&a.dataset)?;
    if samples.len() < 2 {
        return Err(CliError::Data(format!("insufficient samples: need >= 2, found {}", samples.len())));
    }
    let report = std_report(&samples, &kinds)?;
    let mut rows = Vec::new();
    for c in &report.cells {
        let group = group_label(c.case);
        let role = c.role.name();
        rows.push(Row::new(&format!("{role}_std_x"), c.kind.name(), &group, c.std_x, c.kind.unit(), c.n));
        rows.push(Row::new(&format!("{role}_std_y"), c.kind.name(), &group, c.std_y, c.kind.unit(), c.n));
    }

    // Paired test on per-sample absolute deviations from the cell mean.
    if kinds.contains(&RepresentationKind::AnchorNormalized)
        && kinds.contains(&RepresentationKind::RelativeToDissection)
    {
        for case in AnchorCase::ALL {
            let members: Vec<Sample> = samples.iter().filter(|s| s.case() == Some(case)).cloned().collect();
            if members.is_empty() {
                continue;
            }
            for (axis, tag) in [(Axis::X, "x"), (Axis::Y, "y")] {
                let t = anchor_vs_relative_test(&members, axis)?;
                let rep = "anchor_vs_relative_absdev";
                let group = case.to_string();
                rows.push(Row::new(&format!("ttest_{tag}_t"), rep, &group, t.t, "", members.len()));
                rows.push(Row::new(&format!("ttest_{tag}_df"), rep, &group, t.df, "", members.len()));
                rows.push(Row::new(&format!("ttest_{tag}_p"), rep, &group, t.p, "", members.len()));
            }
        }
    }
    report::write(&a.out, &rows)?;

    let svg_dir = match &a.svg_dir {
        Some(d) => d.clone(),
        None => a.out.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    if !svg_dir.as_os_str().is_empty() {
        std::fs::create_dir_all(&svg_dir).map_err(|e| CliError::io("create", &svg_dir, e))?;
    }
    let mut plots = 0;
    for &kind in &kinds {
        for case in AnchorCase::ALL {
            let members: Vec<&Sample> = samples.iter().filter(|s| s.case() == Some(case)).collect();
            if members.is_empty() {
                continue;
            }
            let proj = members.iter().map(|s| project(s, kind)).collect::<anchorlab::Result<Vec<_>>>()?;
            let grasps: Vec<_> = proj.iter().map(|p| p.grasp).collect();
            let dissections: Vec<_> = proj.iter().filter_map(|p| p.dissect).collect();
            let mut series = vec![Series { label: "grasp", color: "#c0392b", square: false, points: &grasps }];
            if !dissections.is_empty() {
                series.push(Series { label: "dissection", color: "#2471a3", square: true, points: &dissections });
            }
            let unit = match kind {
                RepresentationKind::AnchorNormalized => "% of diagonal",
                _ => "% of width/height",
            };
            let body = svg::scatter(
                &format!("{} representation, {case}", kind.name()),
                &format!("x ({unit})"),
                &format!("y ({unit}, down)"),
                &series,
            );
            write_text(&svg_dir.join(format!("scatter_{}_{case}.svg", kind.name())), &body)?;
            plots += 1;
        }
    }
    say(log, &format!("wrote {} rows to {} and {plots} scatter plots", rows.len(), a.out.display()));
    Ok(())
}

fn parse_models(s: &str) -> CliResult<Vec<PredictorKind>> {
    let valid = || PredictorKind::ALL.iter().map(|k| k.name()).collect::<Vec<_>>().join(", ");
    if s.trim() == "all" {
        return Ok(PredictorKind::ALL.to_vec());
    }
    let mut out = Vec::new();
    for name in s.split(',').map(str::trim) {
        let k = PredictorKind::parse(name)
            .ok_or_else(|| usage(format!("unknown model {name:?}; valid models: {}, all", valid())))?;
        if !out.contains(&k) {
            out.push(k);
        }
    }
    Ok(out)
}

enum Split {
    KFold(usize),
    Group(String),
    SurgeonGroups,
}

fn parse_split(s: &str) -> CliResult<Split> {
    let bad = || usage(format!("unknown split {s:?}; expected kfold:K, group:<meta key> or surgeon-groups"));
    if s == "surgeon-groups" {
        return Ok(Split::SurgeonGroups);
    }
    match s.split_once(':') {
        Some(("kfold", k)) => match k.parse::<usize>() {
            Ok(k) if k >= 2 => Ok(Split::KFold(k)),
            _ => Err(usage(format!("kfold needs an integer K >= 2, got {k:?}"))),
        },
        Some(("group", key)) if !key.is_empty() => Ok(Split::Group(key.to_string())),
        _ => Err(bad()),
    }
}

fn plan_hash(plan: &SplitPlan) -> String {
    let bytes = serde_json::to_vec(plan).expect("plans always serialize");
    hex::encode(Sha256::digest(&bytes))
}

/// One reported cell: a label and the plan used in each run.
struct Cell {
    label: String,
    plans: Vec<SplitPlan>,
    n: usize,
}

fn cells(split: &Split, samples: &[Sample], runs: u64, seed: u64) -> CliResult<Vec<Cell>> {
    let per_run = |plan: SplitPlan| (0..runs).map(|_| plan.clone()).collect::<Vec<_>>();
    let holdouts = |plans: Vec<SplitPlan>| {
        plans
            .into_iter()
            .map(|p| {
                let h = p.held_out.expect("holdout plans name their group");
                Cell { label: p.labels[h].clone(), n: p.sizes()[h], plans: per_run(p) }
            })
            .collect()
    };
    Ok(match split {
        Split::KFold(k) => {
            let plans = (0..runs)
                .map(|r| stratified_kfold(samples, *k, seed.wrapping_add(r)))
                .collect::<anchorlab::Result<Vec<_>>>()?;
            vec![Cell { label: format!("kfold:{k}"), plans, n: samples.len() }]
        }
        Split::Group(key) => holdouts(group_holdout(samples, key)?),
        Split::SurgeonGroups => holdouts(surgeon_group_holdout(samples, DEFAULT_MIN_GROUP_FRACTION)?),
    })
}

pub fn eval(a: &EvalArgs, log: &mut dyn Write) -> CliResult<()> {
    let models = parse_models(&a.model)?;
    let split = parse_split(&a.split)?;
    let samples = load_samples(&a.dataset)?;
    let cells = cells(&split, &samples, a.runs, a.seed)?;

    let mut rows = Vec::new();
    let mut plan_lines = Vec::new();
    let mut model_lines = Vec::new();
    for cell in &cells {
        for (run, plan) in cell.plans.iter().enumerate() {
            plan_lines.push(json!({
                "cell": cell.label,
                "run": run,
                "seed": plan.seed,
                "sha256": plan_hash(plan),
                "plan": plan,
            }));
        }
        let mut precision_by_model: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
        for &kind in &models {
            let mut precision = Vec::new();
            let mut rmse = Vec::new();
            for (run, plan) in cell.plans.iter().enumerate() {
                let e = evaluate(kind, &samples, plan, Exec::default())?;
                precision.push(e.precision.mean);
                rmse.push(e.rmse.mean);
                for f in &e.folds {
                    model_lines.push(json!({
                        "cell": cell.label,
                        "run": run,
                        "fold": f.label,
                        "n_test": f.n_test,
                        "model": f.model,
                    }));
                }
            }
            let p = anchorlab::protocol::aggregate_runs("precision", &precision)?;
            let r = anchorlab::protocol::aggregate_runs("rmse", &rmse)?;
            let name = kind.name();
            rows.push(Row::new("precision_mean", name, &cell.label, p.mean, "fraction", cell.n));
            rows.push(Row::new("precision_std", name, &cell.label, p.std, "fraction", cell.n));
            rows.push(Row::new("rmse_mean", name, &cell.label, r.mean, "pct_size", cell.n));
            rows.push(Row::new("rmse_std", name, &cell.label, r.std, "pct_size", cell.n));
            rows.push(Row::new("runs", name, &cell.label, p.n_runs as f64, "", cell.n));
            say(
                log,
                &format!(
                    "{name:<22} {:<24} precision {:.4} ± {:.4}  rmse {:.3} ± {:.3}",
                    cell.label, p.mean, p.std, r.mean, r.std
                ),
            );
            precision_by_model.insert(name, precision);
        }
        // Welch comparisons against the image-absolute baseline when runs vary.
        if let Some(base) = precision_by_model.get(PredictorKind::AbsoluteMean.name()) {
            for (name, values) in &precision_by_model {
                if *name == PredictorKind::AbsoluteMean.name() {
                    continue;
                }
                if let Ok(t) = t_test_welch_unpaired(values, base, Alternative::Greater) {
                    rows.push(Row::new("welch_p_vs_absolute-mean", name, &cell.label, t.p, "", values.len()));
                }
            }
        }
    }
    report::write(&a.out, &rows)?;
    let lines = |v: &[Value]| v.iter().map(|l| format!("{l}\n")).collect::<String>();
    write_text(&sidecar(&a.out, ".plans.jsonl"), &lines(&plan_lines))?;
    write_text(&sidecar(&a.out, ".models.jsonl"), &lines(&model_lines))?;
    say(log, &format!("wrote {} rows to {}", rows.len(), a.out.display()));
    Ok(())
}

pub fn augment(a: &AugmentArgs, log: &mut dyn Write) -> CliResult<()> {
    let cfg = WarpAugmentConfig { alpha_max: a.alpha_max, seed: a.seed };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    let numbered = dataset::read_numbered(&a.dataset)?;
    for (line, rec) in &numbered {
        if rec.anchor.is_none() {
            return Err(CliError::Data(format!("{}:{line}: sample has no attachment anchor", a.dataset.display())));
        }
    }
    let samples: Vec<Sample> = numbered.iter().map(|(_, r)| r.to_sample()).collect();
    let augmented = augment_batch(&samples, &cfg, Exec::default()).map_err(|e| CliError::Data(e.to_string()))?;
    let records: Vec<Record> = numbered
        .iter()
        .zip(&augmented)
        .enumerate()
        .map(|(i, ((_, rec), aug))| {
            let mut out = rec.with_geometry(&aug.sample);
            out.meta.insert("source_index".into(), Value::from(i));
            out.meta.insert("alpha".into(), Value::from(aug.alpha));
            out
        })
        .collect();
    dataset::write(&a.out, &records)?;

    if let Some(dir) = &a.rasters {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io("create", dir, e))?;
        for (i, (s, aug)) in samples.iter().zip(&augmented).enumerate() {
            let src = render(s, Exec::default())?;
            let (_, warped) = apply_warp_augment_raster(s, &src, aug.alpha, Exec::default())?;
            crate::ppm::write(&dir.join(format!("{i:05}_source.ppm")), &src)?;
            crate::ppm::write(&dir.join(format!("{i:05}_augmented.ppm")), &warped)?;
        }
    }
    say(log, &format!("wrote {} augmented samples to {}", records.len(), a.out.display()));
    Ok(())
}
