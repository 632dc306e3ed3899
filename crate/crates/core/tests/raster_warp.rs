use anchorlab::anchor::{AnchorCase, AttachmentAnchor, ImageDims, Point2};
use anchorlab::augment::{adhesion_warp, apply_warp_augment_raster};
use anchorlab::synth::{generate, render, SynthConfig};
use anchorlab::{Exec, Sample};

/// Distance from `p` to the ray leaving `o` at angle `theta`.
fn ray_distance(p: Point2, o: Point2, theta: f64) -> f64 {
    let d = Point2::from_polar(1.0, theta);
    let v = p - o;
    let along = v.x * d.x + v.y * d.y;
    if along <= 0.0 {
        v.norm()
    } else {
        (v.x * d.y - v.y * d.x).abs()
    }
}

fn interior(p: Point2, a: &AttachmentAnchor, margin: f64) -> bool {
    a.angles().iter().all(|t| ray_distance(p, a.origin, *t) > margin)
}

#[test]
fn warped_render_matches_render_of_warped_anchor() {
    let cfg = SynthConfig { seed: 21, count: 6, image: ImageDims::new(160, 120).unwrap(), ..SynthConfig::default() };
    for s in generate(&cfg).unwrap() {
        for alpha in [-0.15, 0.08, 0.17] {
            let src = render(&s, Exec::Sequential).unwrap();
            let Ok((out, warped)) = apply_warp_augment_raster(&s, &src, alpha, Exec::Sequential) else {
                continue;
            };
            let expected = render(&out, Exec::Sequential).unwrap();
            let a = out.anchor.unwrap();
            let w = adhesion_warp(&s, alpha).unwrap();
            // Pixels pulled back from outside the source are black by design.
            let inside = |c: Point2| {
                let q = w.apply_inverse(c);
                q.x > 1.0 && q.y > 1.0 && q.x < cfg.image.w() - 1.0 && q.y < cfg.image.h() - 1.0
            };
            let mut checked = 0;
            for y in 0..cfg.image.height {
                for x in 0..cfg.image.width {
                    let c = Point2::new(f64::from(x) + 0.5, f64::from(y) + 0.5);
                    if interior(c, &a, 2.0) && inside(c) {
                        assert_eq!(warped.get(x, y), expected.get(x, y), "pixel ({x}, {y}) alpha {alpha}");
                        checked += 1;
                    }
                }
            }
            assert!(checked > 12_000);
        }
    }
}

#[test]
fn zero_alpha_is_bit_exact_on_rasters() {
    let s = Sample {
        image: ImageDims::new(64, 48).unwrap(),
        dissection: Point2::new(10.0, 10.0),
        grasp: Point2::new(30.0, 20.0),
        anchor: Some(AttachmentAnchor::canonical(AnchorCase::Plane, Point2::new(31.3, 22.7))),
        meta: Default::default(),
    };
    let src = render(&s, Exec::Sequential).unwrap();
    let (out, warped) = apply_warp_augment_raster(&s, &src, 0.0, Exec::Sequential).unwrap();
    assert_eq!(out, s);
    assert_eq!(warped, src);
}

#[test]
fn raster_warp_is_schedule_independent() {
    let cfg = SynthConfig { seed: 4, count: 2, image: ImageDims::new(200, 150).unwrap(), ..SynthConfig::default() };
    for s in generate(&cfg).unwrap() {
        let src = render(&s, Exec::Parallel).unwrap();
        assert_eq!(src, render(&s, Exec::Sequential).unwrap());
        let a = apply_warp_augment_raster(&s, &src, 0.1, Exec::Sequential);
        let b = apply_warp_augment_raster(&s, &src, 0.1, Exec::Parallel);
        assert_eq!(a, b);
    }
}
