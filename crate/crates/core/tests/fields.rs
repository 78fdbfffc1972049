use eulerci_core::convex_geometry::LensBody;
use eulerci_core::fields::*;
use eulerci_core::potential::make_frame;
use eulerci_core::relaxation::{lambda_from_pair, State};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn grid2(nx: usize, nt: usize, l: f64) -> GridSpec {
    GridSpec::new(2, nx, nt, 0.0, 1.0, l).unwrap()
}

#[test]
fn grid_rejects_small_or_bad_specs() {
    assert!(GridSpec::new(2, 4, 16, 0.0, 1.0, 1.0).is_err());
    assert!(GridSpec::new(4, 16, 16, 0.0, 1.0, 1.0).is_err());
    assert!(GridSpec::new(2, 16, 16, 1.0, 1.0, 1.0).is_err());
}

#[test]
fn node_indexing_round_trips() {
    let g = GridSpec::new(3, 8, 9, 0.0, 1.0, 2.0).unwrap();
    for node in [0, 1, 77, g.n_nodes() - 1] {
        let (it, ix) = g.split(node);
        assert_eq!(g.node(it, &ix), node);
    }
    assert_eq!(g.node(0, &[0, 0, 1]), 1);
}

#[test]
fn l2_examples() {
    let g = grid2(16, 8, 2.0);
    let zero = GridField::zeros(g, FieldKind::Velocity);
    assert_eq!(sup_l2(&zero).unwrap(), 0.0);
    let c = GridField::from_fn(g, FieldKind::Velocity, |_| vec![3.0, 4.0]);
    assert!((l2_norm(&c, 0).unwrap() - 5.0 * 2.0).abs() < 1e-12);
    assert!((h_minus1_norm(&c, 3).unwrap() - 10.0).abs() < 1e-12);
}

#[test]
fn single_mode_parseval() {
    let l = 1.5;
    let g = grid2(32, 8, l);
    for m in [1.0, 3.0] {
        let a = 0.7;
        let f = GridField::from_fn(g, FieldKind::Scalar, |p| vec![a * (2.0 * PI * m * p[2] / l).cos()]);
        let l2 = l2_norm(&f, 2).unwrap();
        assert!((l2 - a * (l * l / 2.0).sqrt()).abs() < 1e-10);
        let ratio = h_minus1_norm(&f, 2).unwrap() / l2;
        let expect = (1.0 + (2.0 * PI * m / l).powi(2)).powf(-0.5);
        assert!((ratio - expect).abs() < 1e-10);
    }
}

#[test]
fn h_minus1_is_below_l2() {
    let g = grid2(16, 8, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut r = GridField::zeros(g, FieldKind::Velocity);
    r.data.iter_mut().for_each(|x| *x = rng.gen_range(-1.0..1.0));
    for it in 0..8 {
        assert!(h_minus1_norm(&r, it).unwrap() <= l2_norm(&r, it).unwrap() + 1e-14);
    }
}

#[test]
fn weighted_norm_equals_l2_for_balls() {
    let g = grid2(8, 8, 1.0);
    let bodies = GridField::uniform_body(g, &LensBody::ball(2, 1.7).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut u = GridField::zeros(g, FieldKind::Velocity);
    u.data.iter_mut().for_each(|x| *x = rng.gen_range(-1.0..1.0));
    assert!((weighted_l2k_norm(&u, &bodies, 1).unwrap() - l2_norm(&u, 1).unwrap()).abs() < 1e-12);
}

#[test]
fn weighted_norm_continuous_as_lens_degenerates() {
    let g = grid2(8, 8, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut u = GridField::zeros(g, FieldKind::Velocity);
    u.data.iter_mut().for_each(|x| *x = rng.gen_range(-1.0..1.0));
    let l2 = l2_norm(&u, 0).unwrap();
    let gaps: Vec<f64> = [1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&a| {
            let b = GridField::uniform_body(g, &LensBody::new(&[1.0, 0.0], a, 1.0).unwrap());
            (weighted_l2k_norm(&u, &b, 0).unwrap() - l2).abs()
        })
        .collect();
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2] && gaps[2] < 1e-3);
}

#[test]
fn j_functional_examples() {
    let g = grid2(8, 8, 2.0);
    let body = LensBody::new(&[0.0, 1.0], 0.3, 1.0).unwrap().normalized().unwrap().0;
    let bodies = GridField::uniform_body(g, &body);
    let e = GridField::from_fn(g, FieldKind::Scalar, |p| vec![0.5 + 0.1 * p[0]]);
    let v0 = GridField::from_fn(g, FieldKind::Velocity, |p| vec![p[1], -p[2]]);
    let j = j_functional(&v0, &v0, &bodies, &e).unwrap();
    assert!((j.value - 0.6 * 4.0).abs() < 1e-12);
    assert_eq!(j.argmax, 7);
    // v - v0 on the boundary of sqrt(e) K at every node.
    let d = [0.6, 0.8];
    let jd = eulerci_core::convex_geometry::lens_gauge(body.axis(), body.half_separation(), body.radius(), &d);
    let v = GridField::from_fn(g, FieldKind::Velocity, |p| {
        let s = (0.5 + 0.1 * p[0]).sqrt() / jd;
        vec![p[1] + s * d[0], -p[2] + s * d[1]]
    });
    assert!(j_functional(&v, &v0, &bodies, &e).unwrap().value.abs() < 1e-12);
}

#[test]
fn mollify_preserves_constants_mass_and_positivity() {
    let g = grid2(32, 12, 1.0);
    let m = Mollifier::new(4.0 / 32.0).unwrap();
    let c = GridField::from_fn(g, FieldKind::Velocity, |_| vec![1.25, -0.5]);
    assert!(mollify(&c, &m).unwrap().max_abs_diff(&c) < 1e-14);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut f = GridField::zeros(g, FieldKind::Scalar);
    f.data.iter_mut().for_each(|x| *x = rng.gen_range(0.0..1.0));
    let time_const = GridField::from_fn(g, FieldKind::Scalar, |p| vec![(2.0 * PI * p[1]).sin() + (4.0 * PI * p[2]).cos().powi(2)]);
    let mt = mollify(&time_const, &m).unwrap();
    for it in 0..12 {
        let a: f64 = time_const.slice(it).iter().sum();
        let b: f64 = mt.slice(it).iter().sum();
        assert!((a - b).abs() < 1e-12 * g.n_space() as f64);
    }
    assert!(mollify(&f, &m).unwrap().data.iter().all(|&x| x >= 0.0));
    assert!(mollify(&f, &Mollifier::new(1.0 / 32.0).unwrap()).is_err());
}

#[test]
fn mollify_commutes_with_grid_translation() {
    let g = grid2(16, 8, 1.0);
    let m = Mollifier::new(3.0 / 16.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut f = GridField::zeros(g, FieldKind::Scalar);
    f.data.iter_mut().for_each(|x| *x = rng.gen_range(-1.0..1.0));
    let shift = |h: &GridField| {
        let mut out = h.clone();
        for node in 0..g.n_nodes() {
            let (it, ix) = g.split(node);
            let src = g.node(it, &[(ix[0] + 3) % 16, (ix[1] + 5) % 16]);
            out.data[node] = h.data[src];
        }
        out
    };
    let a = mollify(&shift(&f), &m).unwrap();
    let b = shift(&mollify(&f, &m).unwrap());
    assert!(a.max_abs_diff(&b) < 1e-13);
}

#[test]
fn mollify_error_decays_linearly_for_lipschitz_data() {
    let g = GridSpec::new(2, 256, 8, 0.0, 1.0, 1.0).unwrap();
    let tri = |y: f64| (y - 0.5).abs();
    let f = GridField::from_fn(g, FieldKind::Scalar, |p| vec![tri(p[1])]);
    let err = |eps: f64| {
        let m = mollify(&f, &Mollifier::new(eps).unwrap()).unwrap();
        m.max_abs_diff(&f)
    };
    let (e1, e2) = (err(16.0 / 256.0), err(8.0 / 256.0));
    assert!(e2 < e1);
    let slope = (e1 / e2).log2();
    assert!((0.8..1.2).contains(&slope), "slope {slope}");
}

#[test]
fn commutator_examples() {
    let g = grid2(32, 8, 1.0);
    let m = Mollifier::new(4.0 / 32.0).unwrap();
    let c = GridField::from_fn(g, FieldKind::Scalar, |_| vec![2.0]);
    let mode = |k: f64| GridField::from_fn(g, FieldKind::Scalar, move |p| vec![(2.0 * PI * k * p[1]).sin()]);
    assert!(commutator_defect(&c, &mode(1.0), &m).unwrap() < 1e-13);
    let d1 = commutator_defect(&mode(1.0), &mode(1.0), &Mollifier::new(8.0 / 32.0).unwrap()).unwrap();
    let d2 = commutator_defect(&mode(1.0), &mode(1.0), &Mollifier::new(4.0 / 32.0).unwrap()).unwrap();
    assert!(d2 < d1 && d1 > 0.0);
    let checker = GridField::from_fn(g, FieldKind::Scalar, |p| {
        let i = (p[1] * 32.0).round() as i64 + (p[2] * 32.0).round() as i64;
        vec![if i % 2 == 0 { 1.0 } else { -1.0 }]
    });
    assert!(commutator_defect(&checker, &checker, &m).unwrap() > 0.5);
}

#[test]
fn residual_of_constant_state_vanishes() {
    let g = grid2(16, 10, 1.0);
    let z = GridField::from_fn(g, FieldKind::State, |_| vec![0.3, -0.1, 0.2, 0.05, -0.2, 1.0]);
    let r = linear_system_residual(&z).unwrap();
    assert!(r.momentum < 1e-13 && r.divergence < 1e-13);
}

#[test]
fn residual_of_plane_wave_converges_at_fourth_order() {
    let frame = make_frame(&[1.0, 0.0], &[0.0, 1.0], 1.0).unwrap();
    let lam = lambda_from_pair(&[1.0, 0.0], &[0.0, 1.0], 1.0).unwrap().state;
    // kappa xi in 2 pi Z^2 on the unit torus.
    let kappa = 2.0 * PI / frame.xi[0].abs();
    let res = |nt: usize| {
        let g = GridSpec::new(2, 16, nt, 0.0, 0.5, 1.0).unwrap();
        let z = GridField::from_fn(g, FieldKind::State, |p| {
            let s = kappa * (frame.c * p[0] + frame.xi[0] * p[1] + frame.xi[1] * p[2]);
            lam.scale(s.sin()).components()
        });
        linear_system_residual(&z).unwrap()
    };
    let (a, b) = (res(40), res(80));
    assert!(a.divergence < 1e-10);
    let ratio = a.momentum / b.momentum;
    assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn forcing_residual_vanishes_on_constraint_set() {
    let g = grid2(16, 8, 1.0);
    let z = GridField::from_fn(g, FieldKind::State, |p| {
        eulerci_core::relaxation::euler_to_relaxed(&[(2.0 * PI * p[2]).sin(), 0.0], 0.0).components()
    });
    let f = forcing_residual(&z).unwrap();
    assert!(f.l2 < 1e-12 && f.h_minus1 < 1e-12);
    let mut off = z.clone();
    for node in 0..g.n_nodes() {
        let x = g.coords(node)[1];
        off.at_mut(node)[3] += (2.0 * PI * x).cos();
    }
    assert!(forcing_residual(&off).unwrap().l2 > 1.0);
    let _ = State::zero(2);
}

#[test]
fn container_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = grid2(8, 8, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut z = GridField::zeros(g, FieldKind::State);
    z.data.iter_mut().for_each(|x| *x = rng.gen_range(-1.0..1.0));
    let p = dir.path().join("z.fld");
    write_field(&p, &z).unwrap();
    assert_eq!(read_field(&p).unwrap(), z);
    std::fs::write(dir.path().join("bad.fld"), b"not a field").unwrap();
    assert!(read_field(&dir.path().join("bad.fld")).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]
    /// Norm sandwich `1 <= |u|_{L2_K} / |u|_{L2} <= 1 + sqrt 2` for lens fields with `R > sqrt 2 a`.
    #[test]
    fn weighted_norm_sandwich(seed in 0u64..1_000_000) {
        let g = grid2(8, 8, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut u = GridField::zeros(g, FieldKind::Velocity);
        u.data.iter_mut().for_each(|x| *x = rng.gen_range(-1.0..1.0));
        let mut bodies = GridField::zeros(g, FieldKind::Body);
        for node in 0..g.n_nodes() {
            let th: f64 = rng.gen_range(0.0..2.0 * PI);
            let a: f64 = rng.gen_range(0.0..1.0);
            let r = a * 2f64.sqrt() * rng.gen_range(1.0..2.0) + 1e-9;
            bodies.at_mut(node).copy_from_slice(&[th.cos(), th.sin(), a, r, 0.0, 0.0]);
        }
        let ratio = weighted_l2k_norm(&u, &bodies, 0).unwrap() / l2_norm(&u, 0).unwrap();
        prop_assert!(ratio >= 1.0 - 1e-9 && ratio <= 1.0 + 2f64.sqrt() + 1e-9, "ratio {}", ratio);
    }
}
