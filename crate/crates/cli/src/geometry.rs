use crate::config::GeometryConfig;
use crate::report::{Bound, CheckRow, CliError};
use eulerci_core::convex_geometry::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

fn point(rng: &mut ChaCha8Rng, dim: usize, r: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-r..r)).collect()
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Every body check, in body order then check order. Shape checks use the centered body.
pub fn run(cfg: &GeometryConfig, seed: u64) -> Result<Vec<CheckRow>, CliError> {
    if cfg.bodies.is_empty() {
        return Err(CliError::usage("geometry.bodies is empty: nothing to sweep"));
    }
    if cfg.samples == 0 {
        return Err(CliError::usage("geometry.samples must be positive"));
    }
    if cfg.convexity_c.is_some_and(|c| !(c > 0.0)) {
        return Err(CliError::usage("geometry.convexity_c must be positive"));
    }
    let mut rows = Vec::new();
    for (i, given) in cfg.bodies.iter().enumerate() {
        let body = LensBody::new(given.axis(), given.half_separation(), given.radius())?;
        let dim = body.dim();
        let base = json!({ "body": i, "descriptor": given, "seed": seed });
        let with = |extra: Value| {
            let mut p = base.clone();
            p.as_object_mut().unwrap().extend(extra.as_object().unwrap().clone());
            p
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));

        let (mut worst, mut at) = (0.0f64, None);
        for _ in 0..cfg.samples {
            let x = point(&mut rng, dim, 2.0);
            let (j, o) = (body.gauge(&x), gauge_oracle(&body, &x));
            let e = (j - o).abs() / o.max(f64::MIN_POSITIVE);
            if e > worst || e.is_nan() {
                worst = e;
                at = Some(json!({ "x": x, "closed_form": j, "oracle": o }));
            }
        }
        rows.push(
            CheckRow::new("gauge_vs_oracle", with(json!({ "samples": cfg.samples })), worst, cfg.gauge_rel_tol, Bound::AtMost).with_witness(at),
        );

        let (mut hom, mut sub, mut sand) = (0.0f64, 0.0f64, 0.0f64);
        let (r_min, r_max) = body.radii();
        for _ in 0..cfg.samples {
            let (x, y) = (point(&mut rng, dim, 3.0), point(&mut rng, dim, 3.0));
            let t = rng.gen_range(0.0..10.0);
            let tx: Vec<f64> = x.iter().map(|v| t * v).collect();
            let jx = body.gauge(&x);
            hom = hom.max((body.gauge(&tx) - t * jx).abs() / (t * jx).max(1e-300));
            let s: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
            sub = sub.max(body.gauge(&s) - jx - body.gauge(&y));
            let n = norm(&x);
            sand = sand.max(n / r_max - jx).max(jx - n / r_min);
        }
        rows.push(CheckRow::new("gauge_homogeneity", with(json!({})), hom, 1e-12, Bound::AtMost));
        rows.push(CheckRow::new("gauge_subadditivity", with(json!({})), sub, 1e-12, Bound::AtMost));
        rows.push(CheckRow::new("gauge_radii_sandwich", with(json!({})), sand, 1e-12, Bound::AtMost));

        let closed = a_k(&body)?;
        let brute = a_k_bruteforce(&body, &BruteForceSampler { seed: seed.wrapping_add(i as u64), ..Default::default() })?;
        rows.push(
            CheckRow::new("a_k_bruteforce", with(json!({ "closed_form": closed })), (closed - brute).abs(), cfg.a_k_tol, Bound::AtMost)
                .with_witness(Some(json!({ "closed_form": closed, "bruteforce": brute }))),
        );
        let mut rise = 0.0f64;
        let mut prev = f64::INFINITY;
        for level in 0..=6 {
            let v = a_k_bruteforce(&body, &BruteForceSampler { axis_level: level, offaxis: 0, ..Default::default() })?;
            rise = rise.max(v - prev);
            prev = v;
        }
        rows.push(CheckRow::new("a_k_refinement_monotone", with(json!({ "levels": 6 })), rise.max(0.0), 1e-15, Bound::AtMost));

        let c = cfg.convexity_c.unwrap_or_else(|| body.uniform_convexity_constant());
        let uc = uniform_convexity_check(&body, c, cfg.samples, seed.wrapping_add(i as u64))?;
        let w = uc.witness.map(|(x, y)| json!({ "x": x, "y": y }));
        rows.push(CheckRow::new("uniform_convexity", with(json!({ "c": c, "samples": cfg.samples })), uc.worst_ratio, c, Bound::AtLeast).with_witness(w));

        let (normalized, _) = body.normalized()?;
        let pts: Vec<Vec<f64>> = (0..cfg.samples.min(500))
            .map(|_| {
                let mut p = point(&mut rng, dim, 2.0);
                // Stay off the slab {|x_1| < 0.1} where the Hessian has a singular part.
                p[0] = p[0].signum() * (0.1 + 0.95 * p[0].abs());
                p
            })
            .collect();
        let h = hessian_lower_bound_check(normalized.half_separation(), dim, &pts, cfg.hessian_step)?;
        rows.push(CheckRow::new(
            "hessian_min_eigenvalue",
            with(json!({ "a_normalized": normalized.half_separation(), "h": cfg.hessian_step })),
            h.min_eigenvalue,
            1.0 - cfg.hessian_tol,
            Bound::AtLeast,
        ));

        let centers = body.centers();
        let dirs = sample_directions(dim, cfg.hausdorff_dirs.clamp(8, 4096), 0.1);
        let mut off = 0.0f64;
        for d in &dirs {
            let p: Vec<f64> = d.iter().map(|x| x / body.gauge(d)).collect();
            let dist = |c: &[f64]| p.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            off = off.max(centers.iter().map(|c| (dist(c) - body.radius()).abs()).fold(f64::INFINITY, f64::min));
        }
        rows.push(CheckRow::new("boundary_on_defining_spheres", with(json!({ "dirs": dirs.len() })), off, 1e-10, Bound::AtMost));

        let self_dist = hausdorff_distance(given, given, cfg.hausdorff_dirs)?;
        rows.push(CheckRow::new("hausdorff_self", with(json!({ "dirs": cfg.hausdorff_dirs })), self_dist, 0.0, Bound::AtMost));
    }
    Ok(rows)
}
