use crate::config::PotentialConfig;
use crate::report::{Bound, CheckRow, CliError};
use eulerci_core::potential::*;
use eulerci_core::relaxation::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::f64::consts::FRAC_PI_2;

/// Worst value of a sampled quantity together with the sample that produced it.
struct Worst {
    value: f64,
    at: Option<serde_json::Value>,
}

impl Worst {
    fn new() -> Self {
        Worst { value: 0.0, at: None }
    }

    fn offer(&mut self, v: f64, at: impl FnOnce() -> serde_json::Value) {
        if v > self.value || v.is_nan() {
            self.value = v;
            self.at = Some(at());
        }
    }
}

/// Third derivatives of the profile `cos s` along the frame give `sin s`.
fn plane_wave_jet(space: &JetSpace, f: &WaveFrame, p: &[f64]) -> Jet {
    let s = phase(f, p);
    let freq: Vec<f64> = std::iter::once(f.c).chain(f.xi.iter().copied()).collect();
    space.from_derivatives(|m| {
        let deg: usize = m.iter().map(|&k| k as usize).sum();
        let mono: f64 = (0..space.nvars()).map(|k| freq[k].powi(m[k] as i32)).product();
        mono * (s + deg as f64 * FRAC_PI_2).cos()
    })
}

fn phase(f: &WaveFrame, p: &[f64]) -> f64 {
    f.c * p[0] + f.xi.iter().zip(&p[1..]).map(|(a, b)| a * b).sum::<f64>()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn draw_pair(rng: &mut ChaCha8Rng, n: usize, cfg: &PotentialConfig) -> (Vec<f64>, Vec<f64>, f64) {
    loop {
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
        if !is_aligned(&a, &b) {
            return (a, b, rng.gen_range(cfg.t_range[0]..cfg.t_range[1]));
        }
    }
}

pub fn run(cfg: &PotentialConfig, seed: u64) -> Result<Vec<CheckRow>, CliError> {
    if cfg.dims.is_empty() || cfg.dims.iter().any(|d| !(2..=3).contains(d)) {
        return Err(CliError::usage("potential.dims must be a nonempty subset of {2, 3}"));
    }
    if !(cfg.t_range[0] > 0.0 && cfg.t_range[1] > cfg.t_range[0]) {
        return Err(CliError::usage("potential.t_range needs 0 < lo < hi"));
    }
    let mut rows = Vec::new();
    for (k, e) in cfg.explicit.iter().enumerate() {
        let params = json!({ "explicit": k, "a": e.a, "b": e.b, "t": e.t });
        match make_frame(&e.a, &e.b, e.t) {
            Ok(f) => {
                let r = max_abs(&f.identity_residuals());
                rows.push(CheckRow::new("explicit_frame_identities", params, r, cfg.frame_tol, Bound::AtMost));
            }
            Err(err) => {
                let w = json!({ "a": e.a, "b": e.b, "t": e.t, "error": err.to_string() });
                rows.push(CheckRow::new("explicit_frame", params, f64::INFINITY, 0.0, Bound::AtMost).with_witness(Some(w)));
            }
        }
    }
    for &n in &cfg.dims {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(n as u64));
        let params = json!({ "dim": n, "pairs": cfg.pairs, "t_range": cfg.t_range, "seed": seed });
        let (mut det, mut frame, mut plane) = (Worst::new(), Worst::new(), Worst::new());
        let space = JetSpace::new(n + 1, 3);
        for _ in 0..cfg.pairs {
            let (a, b, t) = draw_pair(&mut rng, n, cfg);
            let pair = || json!({ "a": a, "b": b, "t": t });
            let lam = lambda_from_pair(&a, &b, t)?;
            det.offer(wave_cone_det(&lam.state).abs() / wave_cone_scale(&lam.state), pair);
            let f = make_frame(&a, &b, t)?;
            frame.offer(max_abs(&f.identity_residuals()), pair);
            let p: Vec<f64> = (0..=n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let z = apply_potential(&f, &space, &plane_wave_jet(&space, &f, &p))?;
            let scale = max_abs(&lam.state.components());
            plane.offer(z.max_abs_diff(&lam.state.scale(phase(&f, &p).sin())) / scale, || json!({ "a": a, "b": b, "t": t, "point": p }));
        }
        rows.push(CheckRow::new("wave_cone_det", params.clone(), det.value, cfg.cone_tol, Bound::AtMost).with_witness(det.at));
        rows.push(CheckRow::new("frame_identities", params.clone(), frame.value, cfg.frame_tol, Bound::AtMost).with_witness(frame.at));
        rows.push(CheckRow::new("plane_wave_identity", params.clone(), plane.value, cfg.plane_wave_tol, Bound::AtMost).with_witness(plane.at));

        let mut poly = Worst::new();
        let space4 = JetSpace::new(n + 1, 4);
        for _ in 0..cfg.polynomial_trials {
            let (a, b, t) = draw_pair(&mut rng, n, cfg);
            let f = make_frame(&a, &b, t)?;
            let centre: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            // Random degree-5 polynomial: sum of products of shifted variables.
            let mut phi = space4.zero();
            for _ in 0..12 {
                let mut term = space4.constant(rng.gen_range(-1.0..1.0));
                for _ in 0..5 {
                    let v = rng.gen_range(0..=n);
                    term = space4.mul(&term, &space4.variable(v, centre[v] - rng.gen_range(-1.0..1.0)));
                }
                phi = phi.add(&term);
            }
            let (mom, div) = potential_residual(&f, &space4, &phi)?;
            let op = PotentialOperator::from_frame(&f);
            let cmax = op.rows.iter().flat_map(|r| r.values()).fold(0.0f64, |m, c| m.max(c.abs()));
            let d4: f64 =
                space4.indices().iter().filter(|m| order_of(m) == 4).map(|m| space4.derivative(&phi, m).map(f64::abs)).sum::<Result<f64, _>>()?;
            let worst = mom.iter().fold(div.abs(), |m, x| m.max(x.abs()));
            poly.offer(worst / (cmax * d4).max(1e-300), || json!({ "a": a, "b": b, "t": t }));
        }
        rows.push(
            CheckRow::new("polynomial_residual", json!({ "dim": n, "trials": cfg.polynomial_trials, "seed": seed }), poly.value, cfg.polynomial_tol, Bound::AtMost)
                .with_witness(poly.at),
        );

        let (a, b, t) = draw_pair(&mut rng, n, cfg);
        let f = make_frame(&a, &b, t)?;
        let cutoff = CutoffProfile::new(vec![0.0; n + 1], vec![0.5; n + 1], CutoffProfile::default_fraction(n))?;
        let eps = 0.5 * (f.xi.iter().map(|x| x * x).sum::<f64>().sqrt()) / (2.0 * std::f64::consts::PI * 16.0);
        let wave = LocalizedWave::new(WaveDescriptor { frame: f, cutoff, eps, phase: rng.gen_range(0.0..1.0) })?;
        let mut res = Worst::new();
        for _ in 0..cfg.wave_points {
            let p: Vec<f64> = (0..=n).map(|_| rng.gen_range(0.0..0.5)).collect();
            let (m, d) = wave.residual(&p);
            res.offer(m.iter().fold(d.abs(), |acc, x| acc.max(x.abs())), || json!({ "point": p }));
        }
        rows.push(
            CheckRow::new("localized_wave_residual", json!({ "dim": n, "a": a, "b": b, "t": t, "eps": eps }), res.value, cfg.wave_residual_tol, Bound::AtMost)
                .with_witness(res.at),
        );

        let mut round = Worst::new();
        for _ in 0..cfg.pairs {
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let p = rng.gen_range(-2.0..2.0);
            let z = euler_to_relaxed(&v, p);
            let (v2, p2) = relaxed_to_euler(&z, 1e-12)?;
            let err = v.iter().zip(&v2).fold((p - p2).abs(), |m, (x, y)| m.max((x - y).abs()));
            round.offer(err, || json!({ "v": v, "p": p }));
        }
        rows.push(
            CheckRow::new("euler_relaxed_roundtrip", json!({ "dim": n, "samples": cfg.pairs, "seed": seed }), round.value, cfg.roundtrip_tol, Bound::AtMost)
                .with_witness(round.at),
        );

        let mut hull = Worst::new();
        for _ in 0..cfg.pairs {
            let (a, b, t) = draw_pair(&mut rng, n, cfg);
            let z = lambda_from_pair(&a, &b, t)?.state;
            let v0: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let r = rng.gen_range(0.2..3.0);
            let back = inverse_translate_hull_map(&translate_hull_map(&z, &v0, r)?, &v0, r)?;
            let scale = max_abs(&z.components()).max(1.0);
            hull.offer(back.max_abs_diff(&z) / scale, || json!({ "a": a, "b": b, "t": t, "v0": v0, "r": r }));
        }
        rows.push(
            CheckRow::new("hull_map_roundtrip", json!({ "dim": n, "samples": cfg.pairs, "seed": seed }), hull.value, 1e-12, Bound::AtMost)
                .with_witness(hull.at),
        );
    }
    Ok(rows)
}
