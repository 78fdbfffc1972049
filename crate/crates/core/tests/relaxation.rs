use eulerci_core::convex_geometry::{ConvexBodyView, LensBody};
use eulerci_core::relaxation::*;
use eulerci_core::Error;
use eulerci_core::relaxation::Decomposition;
use proptest::prelude::*;

fn lens2() -> LensBody {
    LensBody::new(&[1.0, 0.0], 0.4, 1.0).unwrap()
}

#[test]
fn f_map_examples() {
    assert_eq!(f_map(&[0.0, 0.0]), vec![0.0; 3]);
    assert_eq!(f_map(&[1.0, 0.0]), vec![0.5, 0.0, -0.5]);
}

#[test]
fn sym_index_layout() {
    assert_eq!((0..3).map(|j| sym_index(3, 0, j)).collect::<Vec<_>>(), vec![0, 1, 2]);
    assert_eq!(sym_index(3, 1, 1), 3);
    assert_eq!(sym_index(3, 2, 1), 4);
    assert_eq!(sym_index(3, 2, 2), 5);
    assert_eq!(sym_index(2, 1, 1), 2);
}

#[test]
fn euler_conversion_examples() {
    assert_eq!(euler_to_relaxed(&[0.0, 0.0], 0.0), State::zero(2));
    let z = euler_to_relaxed(&[1.0, 0.0], 1.0);
    assert_eq!(z.m, vec![0.5, 0.0, -0.5]);
    assert!((z.q - 1.5).abs() < 1e-15);
    let (v, p) = relaxed_to_euler(&z, 1e-12).unwrap();
    assert_eq!(v, vec![1.0, 0.0]);
    assert!((p - 1.0).abs() < 1e-15);
    let off = State::new(vec![1.0, 0.0], vec![0.1, 0.0, -0.1], 0.0).unwrap();
    assert!(matches!(relaxed_to_euler(&off, 1e-8), Err(Error::NotOnConstraintSet(_))));
}

#[test]
fn cone_examples() {
    let z = State::new(vec![0.0, 0.0], vec![0.0; 3], 5.0).unwrap();
    assert_eq!(wave_cone_det(&z), 0.0);
    let l = lambda_from_pair(&[1.0, 0.0], &[0.0, 1.0], 1.0).unwrap();
    assert_eq!(l.state.v, vec![-1.0, 1.0]);
    assert_eq!(l.state.m, vec![-1.0, 0.0, 1.0]);
    assert_eq!(l.state.q, 0.0);
    assert!(wave_cone_det(&l.state).abs() < 1e-15);
    let zero = lambda_from_pair(&[1.0, 0.0], &[0.0, 1.0], 0.0).unwrap();
    assert_eq!(zero.state.v, vec![0.0, 0.0]);
    assert!(matches!(lambda_from_pair(&[1.0, 0.0], &[2.0, 0.0], 1.0), Err(Error::Alignment)));
}

#[test]
fn generic_states_leave_the_cone() {
    let z = State::new(vec![0.3, -0.7], vec![0.2, 0.5, -0.2], 0.9).unwrap();
    assert!(wave_cone_det(&z).abs() > 1e-9 * wave_cone_scale(&z));
}

#[test]
fn membership_examples() {
    let body = lens2();
    let v0 = vec![0.1, -0.2];
    let base = euler_to_relaxed(&v0, 0.0);
    let r = 0.8;
    let q = HullQuery::new(body.clone(), base.clone(), r).unwrap();
    let tol = HullTolerances::default();
    // Boundary point of v0 + rK on the constraint set.
    let d = [0.6, 0.8];
    let j = body.gauge(&d);
    let w: Vec<f64> = (0..2).map(|k| v0[k] + r * d[k] / j).collect();
    assert_eq!(hull_membership(&euler_to_relaxed(&w, 3.0), &q, &tol).unwrap(), Membership::Boundary);
    // The base itself: margin r^2 a_K / n.
    let m = hull_membership(&base, &q, &tol).unwrap().margin().unwrap();
    let expect = r * r * (1.0 - 0.16) / 2.0;
    assert!((m - (expect - tol.slack)).abs() < 1e-12, "{m} vs {expect}");
    // Outside by gauge.
    let far: Vec<f64> = (0..2).map(|k| v0[k] + 1.01 * r * d[k] / j).collect();
    assert_eq!(hull_membership(&euler_to_relaxed(&far, 0.0), &q, &tol).unwrap(), Membership::Outside);
    // Empty family.
    let mut bad = q.clone();
    bad.ball_family.clear();
    assert!(matches!(hull_membership(&base, &bad, &tol), Err(Error::EmptyBallFamily)));
}

#[test]
fn default_family_encloses_and_matches_closed_form() {
    let body = LensBody::new(&[0.6, 0.8], 0.5, 1.2).unwrap();
    let base = State::new(vec![0.2, 0.1], vec![0.05, 0.02, -0.05], 0.0).unwrap();
    let q = HullQuery::new(body.clone(), base.clone(), 0.7).unwrap();
    let fam = q.ball_family.clone();
    assert_eq!(fam.len(), 34);
    HullQuery::with_family(body.clone(), base.clone(), 0.7, fam).unwrap();
    let z = State::new(vec![0.3, 0.0], vec![0.1, -0.03, -0.1], 0.4).unwrap();
    let generic = q.raw_margin(&z).unwrap();
    let fast = lens_hull_margin(&z.v, &z.m, &base.v, body.axis(), 0.5, 1.2, 0.7);
    assert!((generic - fast).abs() < 1e-13, "{generic} vs {fast}");
}

#[test]
fn family_rejects_non_enclosing_ball() {
    let body = lens2();
    let bad = vec![EnclosingBall { center: vec![0.0, 0.0], radius: 0.5 }];
    assert!(HullQuery::with_family(body, State::zero(2), 1.0, bad).is_err());
}

#[test]
fn decompose_two_atom_midpoint() {
    let body = lens2();
    let z0 = State::zero(2);
    let atoms = [[1.0 / body.gauge(&[1.0, 0.0]), 0.0], [0.0, 1.0 / body.gauge(&[0.0, 1.0])]];
    let z = euler_to_relaxed(&atoms[0], 0.0).scale(0.5).add(&euler_to_relaxed(&atoms[1], 0.0).scale(0.5));
    let d = hull_decompose(&z, &body, &z0, 1.0, 256, 0.0, &HullTolerances::default()).unwrap();
    assert_eq!(d.weights.len(), 2);
    for w in &d.weights {
        assert!((w - 0.5).abs() < 1e-9);
    }
}

#[test]
fn decompose_interior_point_and_outside() {
    let body = LensBody::new(&[0.0, 0.0, 1.0], 0.3, 1.0).unwrap();
    let v0 = vec![0.1, 0.0, -0.1];
    let z0 = euler_to_relaxed(&v0, 0.0);
    let mut z = z0.clone();
    z.m[0] += 0.01;
    z.m[3] -= 0.01;
    let tol = HullTolerances::default();
    let d = hull_decompose(&z, &body, &z0, 0.9, 256, 0.0, &tol).unwrap();
    assert!(d.residual <= 1e-8);
    assert!(d.weights.len() <= 10);
    assert!(d.weights.iter().all(|&w| w >= 0.0));
    let out = State::new(vec![2.0, 0.0, 0.0], vec![0.0; 6], 0.0).unwrap();
    for rot in [0.0, 0.5] {
        for n in [128, 512] {
            assert!(matches!(hull_decompose(&out, &body, &z0, 0.9, n, rot, &tol), Err(Error::InfeasibleAtSampling(_))));
        }
    }
}

#[test]
fn selection_rule_two_atoms() {
    let w1 = vec![0.3, 0.6];
    let w2 = vec![-0.5, 0.2];
    let d = Decomposition { weights: vec![0.3, 0.7], atoms: vec![w2.clone(), w1.clone()], atom_indices: vec![4, 9], residual: 0.0 };
    let l = direction_from_decomposition(&d).unwrap();
    assert_eq!((l.a.clone(), l.b.clone()), (w1.clone(), w2.clone()));
    let expect = 0.15 * ((0.8f64).powi(2) + 0.4f64.powi(2)).sqrt();
    let got = (l.state.v[0].powi(2) + l.state.v[1].powi(2)).sqrt();
    assert!((got - expect).abs() < 1e-15);
    assert!((l.state.v[0] - 0.15 * (w2[0] - w1[0])).abs() < 1e-15);
}

#[test]
fn oscillation_at_center_has_positive_constant() {
    let body = LensBody::new(&[1.0, 0.0], 0.5, 1.0).unwrap().normalized().unwrap().0;
    let z0 = State::zero(2);
    let z = State::zero(2);
    let res = oscillation_direction(&z, &body, &z0, 1.0, &OscillationConfig::default()).unwrap();
    assert!(res.measured_c > 0.0);
    assert!(res.direction.cone_residual() < 1e-9);
    assert!(res.end_margins.0.min(res.end_margins.1) >= 0.5 * res.margin - 1e-7);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lambda_directions_lie_in_cone(a in prop::collection::vec(-2.0f64..2.0, 3), b in prop::collection::vec(-2.0f64..2.0, 3), t in 0.01f64..3.0) {
        prop_assume!(!is_aligned(&a, &b));
        let l = lambda_from_pair(&a, &b, t).unwrap();
        prop_assert!(wave_cone_det(&l.state).abs() <= 1e-9 * wave_cone_scale(&l.state));
        let (fa, fb) = (f_map(&a), f_map(&b));
        for k in 0..6 { prop_assert!((l.state.m[k] - t * (fb[k] - fa[k])).abs() < 1e-12); }
    }

    #[test]
    fn translate_map_round_trip(v in prop::collection::vec(-1.0f64..1.0, 2), m in prop::collection::vec(-1.0f64..1.0, 2), q in -1.0f64..1.0, v0 in prop::collection::vec(-1.0f64..1.0, 2), r in 0.1f64..3.0) {
        let z = State::new(v, vec![m[0], m[1], -m[0]], q).unwrap();
        let back = inverse_translate_hull_map(&translate_hull_map(&z, &v0, r).unwrap(), &v0, r).unwrap();
        prop_assert!(back.max_abs_diff(&z) < 1e-12);
    }

    #[test]
    fn translate_map_preserves_constraint_set(w in prop::collection::vec(-1.0f64..1.0, 3), v0 in prop::collection::vec(-1.0f64..1.0, 3), r in 0.1f64..3.0) {
        let g = translate_hull_map(&euler_to_relaxed(&w, 0.0), &v0, r).unwrap();
        let target: Vec<f64> = w.iter().zip(&v0).map(|(a, b)| b + r * a).collect();
        prop_assert!(g.v.iter().zip(&target).all(|(a, b)| (a - b).abs() < 1e-12));
        prop_assert!(g.constraint_defect() < 1e-12);
    }

    #[test]
    fn membership_conjugates_under_translation(v in prop::collection::vec(-0.6f64..0.6, 2), dm in -0.2f64..0.2, v0 in prop::collection::vec(-1.0f64..1.0, 2), r in 0.2f64..2.0) {
        let body = lens2();
        let tol = HullTolerances { slack: 0.0, ..Default::default() };
        let mut z = euler_to_relaxed(&v, 0.0);
        z.m[1] += dm;
        let unit = HullQuery::new(body.clone(), State::zero(2), 1.0).unwrap();
        let moved = HullQuery::new(body, euler_to_relaxed(&v0, 0.0), r).unwrap();
        let gz = translate_hull_map(&z, &v0, r).unwrap();
        let m1 = unit.raw_margin(&z).unwrap();
        let m2 = moved.raw_margin(&gz).unwrap();
        prop_assert!((m1 * r * r - m2).abs() < 1e-10);
        let in1 = hull_membership(&z, &unit, &tol).unwrap().is_inside();
        let in2 = hull_membership(&gz, &moved, &tol).unwrap().is_inside();
        prop_assert!(in1 == in2 || m1.abs() < 1e-9);
    }

    #[test]
    fn membership_monotone_in_scale(v in prop::collection::vec(-0.5f64..0.5, 2), dm in -0.1f64..0.1, r in 0.3f64..1.5, dr in 0.0f64..1.0) {
        let body = lens2();
        let tol = HullTolerances::default();
        let mut z = euler_to_relaxed(&v, 0.0);
        z.m[1] += dm;
        let a = hull_membership(&z, &HullQuery::new(body.clone(), State::zero(2), r).unwrap(), &tol).unwrap();
        let b = hull_membership(&z, &HullQuery::new(body, State::zero(2), r + dr).unwrap(), &tol).unwrap();
        if a.is_inside() { prop_assert!(b.is_inside()); }
    }
}
