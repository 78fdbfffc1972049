use eulerci_core::convex_geometry::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::SQRT_2;

fn lens2(theta: f64, a: f64, r: f64) -> LensBody {
    LensBody::new(&[theta.cos(), theta.sin()], a, r).unwrap()
}

fn arb_lens() -> impl Strategy<Value = LensBody> {
    (0.0f64..std::f64::consts::TAU, 0.0f64..1.0, 0.05f64..1.0).prop_map(|(th, a, gap)| lens2(th, a, a + gap))
}

fn arb_point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, 2)
}

#[test]
fn closed_form_examples() {
    let ball = LensBody::new(&[1.0, 0.0], 0.0, 2.0).unwrap();
    assert!((gauge(&ball, &[1.0, 0.0]).unwrap() - 0.5).abs() < 1e-15);
    let l = LensBody::new(&[1.0, 0.0], 1.0, SQRT_2).unwrap();
    assert!((gauge(&l, &[1.0, 0.0]).unwrap() - (1.0 + SQRT_2)).abs() < 1e-14);
    assert!((gauge(&l, &[0.0, 1.0]).unwrap() - 1.0).abs() < 1e-15);
    let (rmin, rmax) = radii(&l);
    assert!((rmin - (SQRT_2 - 1.0)).abs() < 1e-15 && (rmax - 1.0).abs() < 1e-15);
    let (rmin, rmax) = radii(&LensBody::new(&[1.0, 0.0], 0.6, 1.0).unwrap());
    assert!((rmin - 0.4).abs() < 1e-15 && (rmax - 0.8).abs() < 1e-15);
    assert_eq!(radii(&LensBody::ball(2, 3.0).unwrap()), (3.0, 3.0));
    assert!((a_k(&LensBody::new(&[1.0, 0.0], 0.6, 1.0).unwrap()).unwrap() - 0.64).abs() < 1e-15);
    assert!((a_k(&LensBody::ball(3, 1.5).unwrap()).unwrap() - 2.25).abs() < 1e-15);
}

#[test]
fn oracle_examples() {
    let l = LensBody::new(&[1.0, 0.0], 0.6, 1.0).unwrap();
    let d = [0.3f64, 0.8];
    let j = l.gauge(&d);
    let x: Vec<f64> = d.iter().map(|v| 0.37 * v / j).collect();
    assert!((gauge_oracle(&l, &x) - 0.37).abs() < 1e-12);
    let l = LensBody::new(&[1.0, 0.0], 1.0, SQRT_2).unwrap();
    assert!((gauge_oracle(&l, &[1.0, 0.0]) / (1.0 + SQRT_2) - 1.0).abs() < 1e-10);
    let b = LensBody::ball(2, 1.0).unwrap();
    assert!((gauge_oracle(&b, &[3.0, 4.0]) - 5.0).abs() < 1e-12);
}

#[test]
fn gauge_matches_oracle_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let dim = if rng.gen_bool(0.5) { 2 } else { 3 };
        let axis: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let a = rng.gen_range(0.0..1.5);
        let body = LensBody::new(&axis, a, a + rng.gen_range(0.05..1.5)).unwrap();
        let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let (j, o) = (body.gauge(&x), gauge_oracle(&body, &x));
        assert!((j - o).abs() <= 1e-10 * o, "{body:?} {x:?}: {j} vs {o}");
    }
}

#[test]
fn hausdorff_examples() {
    let l = lens2(0.3, 0.4, 1.0);
    assert_eq!(hausdorff_distance(&l, &l, 512).unwrap(), 0.0);
    let (b1, b2) = (LensBody::ball(2, 1.0).unwrap(), LensBody::ball(2, 2.0).unwrap());
    assert!((hausdorff_distance(&b1, &b2, 512).unwrap() - 1.0).abs() < 1e-14);
    let moved = b1.translated(&[0.3, -0.4]).unwrap();
    assert!((hausdorff_distance(&b1, &moved, 4096).unwrap() - 0.5).abs() < 1e-6);
    assert!(hausdorff_distance(&b1, &b2, 7).is_err());
}

#[test]
fn a_k_bruteforce_agrees_and_refines_monotonically() {
    let l = LensBody::new(&[1.0, 0.0], 0.6, 1.0).unwrap();
    let fine = a_k_bruteforce(&l, &BruteForceSampler::default()).unwrap();
    assert!((fine - 0.64).abs() <= 1e-4, "{fine}");
    let mut prev = f64::INFINITY;
    for level in 0..=6 {
        let v = a_k_bruteforce(&l, &BruteForceSampler { axis_level: level, offaxis: 0, ..Default::default() }).unwrap();
        assert!(v <= prev + 1e-15, "level {level}: {v} > {prev}");
        prev = v;
    }
    let ball = LensBody::ball(2, 1.3).unwrap();
    assert!((a_k_bruteforce(&ball, &BruteForceSampler::default()).unwrap() - 1.69).abs() < 1e-4);
    assert!(a_k_bruteforce(&l, &BruteForceSampler { boundary_dirs: 0, ..Default::default() }).is_err());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let a = rng.gen_range(0.0..0.8);
        let body = lens2(rng.gen_range(0.0..6.0), a, a + rng.gen_range(0.1..1.0));
        let b = a_k_bruteforce(&body, &BruteForceSampler::default()).unwrap();
        assert!((b - a_k(&body).unwrap()).abs() <= 1e-4, "{body:?}");
    }
}

#[test]
fn uniform_convexity_examples() {
    let c = (SQRT_2 - 1.0) / (SQRT_2 + 1.0);
    let l = lens2(0.2, 0.5, 1.2);
    assert!(uniform_convexity_check(&l, c, 4000, 1).unwrap().pass);
    let a = 0.7;
    let r = (1.0f64 + a * a).sqrt();
    let l = lens2(1.1, a, r);
    assert!(uniform_convexity_check(&l, (r - a).powi(2), 4000, 2).unwrap().pass);
    let b = LensBody::ball(2, 1.0).unwrap();
    // Parallelogram law: the ball ratio is exactly 2, the sharp constant.
    assert!(uniform_convexity_check(&b, 1.0, 4000, 3).unwrap().pass);
    let eq = uniform_convexity_check(&b, 2.0, 4000, 3).unwrap();
    assert!(eq.pass && (eq.worst_ratio - 2.0).abs() < 1e-9);
    let fail = uniform_convexity_check(&b, 2.0 + 1e-3, 4000, 3).unwrap();
    assert!(!fail.pass && fail.witness.is_some());
}

#[test]
fn hessian_lower_bound_and_convergence() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pts: Vec<Vec<f64>> = (0..200)
        .map(|_| {
            let x1: f64 = rng.gen_range(0.1..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            vec![x1, rng.gen_range(-2.0..2.0)]
        })
        .collect();
    let r = hessian_lower_bound_check(1.0, 2, &pts, 1e-4).unwrap();
    assert!(r.min_eigenvalue >= 1.0 - 1e-3, "{r:?}");
    let ball = hessian_lower_bound_check(0.0, 2, &pts, 1e-4).unwrap();
    assert!((ball.min_eigenvalue - 2.0).abs() < 1e-3);
    let e1 = hessian_lower_bound_check(1.0, 2, &pts, 2e-2).unwrap().max_fd_error;
    let e2 = hessian_lower_bound_check(1.0, 2, &pts, 1e-2).unwrap().max_fd_error;
    assert!(e2 <= e1 / 1.8, "{e1} -> {e2}");
    assert!(hessian_lower_bound_check(1.0, 2, &[vec![1e-4, 1.0]], 1e-4).is_err());
}

#[test]
fn boundary_points_lie_on_enclosing_defining_spheres() {
    let l = lens2(0.7, 0.6, 1.1);
    let centers = l.centers();
    let boundary: Vec<Vec<f64>> =
        sample_directions(2, 2048, 0.1).into_iter().map(|d| d.iter().map(|x| x / l.gauge(&d)).collect()).collect();
    let dist = |p: &[f64], c: &[f64]| p.iter().zip(c).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    for p in &boundary {
        assert!(centers.iter().any(|c| (dist(p, c) - l.radius()).abs() < 1e-10));
    }
    for c in &centers {
        assert!(boundary.iter().all(|p| dist(p, c) <= l.radius() + 1e-10));
    }
}

proptest! {
    #[test]
    fn gauge_is_homogeneous(body in arb_lens(), x in arb_point(), t in 0.0f64..10.0) {
        let tx: Vec<f64> = x.iter().map(|v| t * v).collect();
        let (a, b) = (body.gauge(&tx), t * body.gauge(&x));
        prop_assert!((a - b).abs() <= 1e-12 * b.max(1e-300));
    }

    #[test]
    fn gauge_is_subadditive(body in arb_lens(), x in arb_point(), y in arb_point()) {
        let s: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        prop_assert!(body.gauge(&s) <= body.gauge(&x) + body.gauge(&y) + 1e-12);
    }

    #[test]
    fn gauge_is_sandwiched_by_radii(body in arb_lens(), x in arb_point()) {
        let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let j = body.gauge(&x);
        prop_assert!(n / body.r_max() <= j * (1.0 + 1e-12) + 1e-300);
        prop_assert!(j <= n / body.r_min() * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn gauge_is_lipschitz_in_the_body(k1 in arb_lens(), k2 in arb_lens(), x in arb_point()) {
        let dh = hausdorff_distance(&k1, &k2, 4096).unwrap();
        let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let bound = dh * n / (k1.r_min() * k2.r_min());
        // Sampled support differences may miss the sup by O(spacing^2).
        prop_assert!((k1.gauge(&x) - k2.gauge(&x)).abs() <= bound * (1.0 + 1e-3) + 1e-6 * n / (k1.r_min() * k2.r_min()));
    }

    #[test]
    fn radii_are_one_lipschitz_in_hausdorff(k1 in arb_lens(), k2 in arb_lens()) {
        let dh = hausdorff_distance(&k1, &k2, 4096).unwrap();
        prop_assert!((k1.r_min() - k2.r_min()).abs() <= dh + 1e-6);
        prop_assert!((k1.r_max() - k2.r_max()).abs() <= dh + 1e-6);
    }

    #[test]
    fn hausdorff_is_symmetric(k1 in arb_lens(), k2 in arb_lens()) {
        prop_assert_eq!(hausdorff_distance(&k1, &k2, 256).unwrap(), hausdorff_distance(&k2, &k1, 256).unwrap());
    }

    #[test]
    fn gauge_tracks_oracle(body in arb_lens(), x in arb_point()) {
        prop_assume!(x.iter().any(|&v| v != 0.0));
        let (j, o) = (body.gauge(&x), gauge_oracle(&body, &x));
        prop_assert!((j - o).abs() <= 1e-10 * o);
    }
}
