//! Synthetic scene oracle.
//!
//! Generates labelled samples whose grasp and dissection points follow a
//! case-specific law around a randomly oriented anchor:
//!
//! - strand: dissection on the adhesion ray, grasp further out on the same ray;
//! - triangle: dissection on the first mounting ray, grasp inside Adh close to
//!   the adhesion vector;
//! - plane: dissection on a mounting ray near the origin, grasp anywhere in
//!   the middle 80% of Adh.
//!
//! Each sample draws from its own ChaCha stream `(seed, index)`, so output is
//! identical for sequential and parallel generation.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;

use crate::anchor::{region_of, AnchorCase, AttachmentAnchor, ImageDims, Point2, Region, Sample};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::raster::{Raster, Rgb, BLACK};

pub const ADH_COLOR: Rgb = [40, 90, 220];
pub const MNT_COLOR: Rgb = [128, 128, 128];
pub const DISS_COLOR: Rgb = [40, 170, 80];

/// Resampling budget per sample.
pub const MAX_ATTEMPTS: usize = 100;

pub fn region_color(r: Region) -> Rgb {
    match r {
        Region::Adh => ADH_COLOR,
        Region::Mnt => MNT_COLOR,
        Region::Diss => DISS_COLOR,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    /// Relative weights of strand, triangle and plane cases.
    pub case_mix: [f64; 3],
    /// Std-dev of the angular perturbation, radians.
    pub noise_angle: f64,
    /// Std-dev of the radial perturbation, as a diagonal fraction.
    pub noise_radius: f64,
    pub image: ImageDims,
    /// Normalized `[x0, y0, x1, y1]` box for anchor origins.
    pub origin_box: [f64; 4],
    pub count: usize,
    pub surgery_types: Vec<(String, f64)>,
    pub surgeons: Vec<(String, f64)>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        let surgery_types =
            [("sigmoid", 0.35), ("rectum", 0.25), ("hemicolectomy_left", 0.2), ("hemicolectomy_right", 0.2)];
        let surgeon_weights = [30.0, 20.0, 15.0, 8.0, 6.0, 5.0, 4.0, 3.0, 3.0, 2.0, 1.0, 1.0, 1.0, 1.0];
        Self {
            seed: 0,
            case_mix: [1.0, 1.0, 1.0],
            noise_angle: 0.05,
            noise_radius: 0.01,
            image: ImageDims { width: 640, height: 640 },
            origin_box: [0.25, 0.25, 0.75, 0.75],
            count: 300,
            surgery_types: surgery_types.iter().map(|(n, w)| (n.to_string(), *w)).collect(),
            surgeons: surgeon_weights.iter().enumerate().map(|(i, w)| (format!("s{:02}", i + 1), *w)).collect(),
        }
    }
}

fn check_weights(name: &str, w: impl IntoIterator<Item = f64>) -> Result<()> {
    let w: Vec<f64> = w.into_iter().collect();
    if w.is_empty() || w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) || w.iter().all(|x| *x == 0.0) {
        return Err(Error::InvalidArgument(format!("{name} weights must be non-negative, finite and not all zero")));
    }
    Ok(())
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        check_weights("case mix", self.case_mix)?;
        check_weights("surgery type", self.surgery_types.iter().map(|x| x.1))?;
        check_weights("surgeon", self.surgeons.iter().map(|x| x.1))?;
        if !(self.noise_angle.is_finite() && self.noise_angle >= 0.0)
            || !(self.noise_radius.is_finite() && self.noise_radius >= 0.0)
        {
            return Err(Error::InvalidArgument("noise parameters must be finite and >= 0".into()));
        }
        let [x0, y0, x1, y1] = self.origin_box;
        if !(0.0 <= x0 && x0 <= x1 && x1 <= 1.0 && 0.0 <= y0 && y0 <= y1 && y1 <= 1.0) {
            return Err(Error::InvalidArgument(format!("origin box {:?} not inside [0,1]²", self.origin_box)));
        }
        if self.count == 0 {
            return Err(Error::InvalidArgument("count must be positive".into()));
        }
        if self.image.width == 0 || self.image.height == 0 {
            return Err(Error::InvalidArgument("image dims must be positive".into()));
        }
        Ok(())
    }
}

struct Samplers {
    case: WeightedIndex<f64>,
    surgery: WeightedIndex<f64>,
    surgeon: WeightedIndex<f64>,
    angle_noise: Normal<f64>,
    radius_noise: Normal<f64>,
}

fn uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..hi)
    }
}

fn draw_anchor<R: Rng>(rng: &mut R, cfg: &SynthConfig, case: AnchorCase) -> AttachmentAnchor {
    let [x0, y0, x1, y1] = cfg.origin_box;
    let origin = Point2::new(uniform(rng, x0, x1) * cfg.image.w(), uniform(rng, y0, y1) * cfg.image.h());
    // Base layout Adh = π/2, Mnt = π, Diss = π/2, jittered then rotated.
    // Every sector stays at least 0.15π wide.
    let adh_width = uniform(rng, 0.35 * PI, 0.65 * PI);
    let mnt_width = uniform(rng, 0.8 * PI, 1.2 * PI);
    let rotation = uniform(rng, 0.0, 2.0 * PI);
    AttachmentAnchor::new(case, origin, rotation, rotation + adh_width, rotation + adh_width + mnt_width)
}

fn draw_sample<R: Rng>(rng: &mut R, cfg: &SynthConfig, s: &Samplers) -> Sample {
    let case = AnchorCase::ALL[s.case.sample(rng)];
    let anchor = draw_anchor(rng, cfg, case);
    let diag = cfg.image.diagonal();
    let adh_width = anchor.sector_widths()[0];
    let o = anchor.origin;

    let (d_angle, d_radius, g_angle, g_radius) = match case {
        AnchorCase::Strand => {
            let rd = uniform(rng, 0.05, 0.15);
            let rg = rd + uniform(rng, 0.05, 0.15);
            (anchor.theta_adh, rd, anchor.theta_adh, rg)
        }
        AnchorCase::Triangle => {
            let rd = uniform(rng, 0.05, 0.2);
            let ga = anchor.theta_adh + uniform(rng, 0.1, 0.4) * adh_width;
            (anchor.theta_m1, rd, ga, uniform(rng, 0.1, 0.3))
        }
        AnchorCase::Plane => {
            let da = if rng.random_bool(0.5) { anchor.theta_m1 } else { anchor.theta_m2 };
            let rd = uniform(rng, 0.01, 0.1);
            let ga = anchor.theta_adh + uniform(rng, 0.1, 0.9) * adh_width;
            (da, rd, ga, uniform(rng, 0.1, 0.3))
        }
    };

    let mut place = |angle: f64, radius: f64| {
        let a = angle + s.angle_noise.sample(rng);
        let r = (radius + s.radius_noise.sample(rng)).max(1e-3);
        o + Point2::from_polar(r * diag, a)
    };
    let dissection = place(d_angle, d_radius);
    let grasp = place(g_angle, g_radius);

    let mut meta = BTreeMap::new();
    meta.insert("surgery_type".to_string(), cfg.surgery_types[s.surgery.sample(rng)].0.clone());
    meta.insert("surgeon_id".to_string(), cfg.surgeons[s.surgeon.sample(rng)].0.clone());

    Sample { image: cfg.image, dissection, grasp, anchor: Some(anchor), meta }
}

fn samplers(cfg: &SynthConfig) -> Result<Samplers> {
    let weights = |w: &[(String, f64)]| w.iter().map(|x| x.1).collect::<Vec<_>>();
    let bad = |e: rand::distr::weighted::Error| Error::InvalidArgument(e.to_string());
    Ok(Samplers {
        case: WeightedIndex::new(cfg.case_mix).map_err(bad)?,
        surgery: WeightedIndex::new(weights(&cfg.surgery_types)).map_err(bad)?,
        surgeon: WeightedIndex::new(weights(&cfg.surgeons)).map_err(bad)?,
        angle_noise: Normal::new(0.0, cfg.noise_angle).map_err(|e| Error::InvalidArgument(e.to_string()))?,
        radius_noise: Normal::new(0.0, cfg.noise_radius).map_err(|e| Error::InvalidArgument(e.to_string()))?,
    })
}

/// Sample `index` of the dataset described by `cfg`.
pub fn generate_one(cfg: &SynthConfig, index: u64) -> Result<Sample> {
    cfg.validate()?;
    generate_one_with(cfg, &samplers(cfg)?, index)
}

fn generate_one_with(cfg: &SynthConfig, s: &Samplers, index: u64) -> Result<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index);
    for _ in 0..MAX_ATTEMPTS {
        let sample = draw_sample(&mut rng, cfg, s);
        if sample.validate().is_ok() {
            return Ok(sample);
        }
    }
    Err(Error::RetryExhausted(MAX_ATTEMPTS))
}

/// Generates `cfg.count` samples sequentially.
pub fn generate(cfg: &SynthConfig) -> Result<Vec<Sample>> {
    generate_with(cfg, Exec::Sequential)
}

pub fn generate_with(cfg: &SynthConfig, exec: Exec) -> Result<Vec<Sample>> {
    cfg.validate()?;
    let s = samplers(cfg)?;
    exec.map_indices(cfg.count, |i| generate_one_with(cfg, &s, i as u64)).into_iter().collect()
}

/// Paints every pixel with the colour of the sector containing its centre;
/// the pixel containing the origin is black.
pub fn render(s: &Sample, exec: Exec) -> Result<Raster> {
    let a = *s.anchor()?;
    a.validate()?;
    let mut out = Raster::new(s.image.width, s.image.height, BLACK)?;
    let (ox, oy) = (a.origin.x.floor(), a.origin.y.floor());
    exec.for_each_chunk_mut(out.pixels_mut(), s.image.width as usize, |row, pixels| {
        for (col, px) in pixels.iter_mut().enumerate() {
            let (x, y) = (col as f64, row as f64);
            *px = if x == ox && y == oy {
                BLACK
            } else {
                match region_of(Point2::new(x + 0.5, y + 0.5), &a) {
                    Ok(r) => region_color(r),
                    Err(_) => BLACK,
                }
            };
        }
    });
    Ok(out)
}
