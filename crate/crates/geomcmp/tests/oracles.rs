//! Dual-route checks: every numerical pipeline here is confronted with an
//! independent computation of the same quantity, closed-form where one
//! exists.

use std::sync::Arc;

use geomcmp::{
    bounded_sinusoid_profile, first_focal_point, integrate_jacobi, quad_compare,
    space_form_focal_radius, space_form_functions, symmetric_operator_in_range,
    transversal_speed_compare, unit_sphere_area, verify_volume_comparison, CapData,
    ComparisonDetail, CurvatureProfile, InitialOperator, QuadInstance, TransversalData,
    VolumeModel, WarpingFunction,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Bisection zeros of det A must land on the closed-form focal radius of the
/// matching space form.
#[test]
fn focal_detector_matches_space_form_formula() {
    let curvatures = [-2.0, -1.0, -0.3, 0.0, 0.4, 1.0, 2.0];
    let operators = [-2.0, -1.0, -0.3, 0.0, 0.5, 1.0, 2.0];
    let mut checked = 0usize;
    for &k in &curvatures {
        for &lambda in &operators {
            let Some(t_star) = space_form_focal_radius(k, lambda) else {
                continue;
            };
            if t_star > 6.0 {
                continue;
            }
            let profile = CurvatureProfile::constant(2, t_star * 1.25, k).unwrap();
            let op = InitialOperator::scalar(1, lambda);
            let scan = first_focal_point(&profile, &op, 2048).unwrap();
            let found = scan.t_star.expect("zero inside the interval");
            assert!(
                (found - t_star).abs() <= 1e-8,
                "k = {k}, lambda = {lambda}: found {found}, formula {t_star}"
            );
            checked += 1;
        }
    }
    assert!(checked >= 20, "grid too sparse: {checked} cases");
}

/// No-zero claims of the formula hold on a long window too.
#[test]
fn focal_detector_agrees_formula_has_no_zero() {
    for &(k, lambda) in &[(0.0, 0.0), (0.0, 0.3), (-1.0, -0.5), (-0.25, 0.0)] {
        assert!(space_form_focal_radius(k, lambda).is_none());
        let profile = CurvatureProfile::constant(2, 8.0, k).unwrap();
        let op = InitialOperator::scalar(1, lambda);
        let scan = first_focal_point(&profile, &op, 4096).unwrap();
        assert!(scan.t_star.is_none(), "spurious zero for k={k}, λ={lambda}");
    }
}

fn spherical_side(a: f64, b: f64, angle: f64) -> f64 {
    (a.cos() * b.cos() + a.sin() * b.sin() * angle.cos()).clamp(-1.0, 1.0).acos()
}

/// Two spherical triangles chained across the diagonal `qr` give `|rs|`
/// without any ℝ³ embedding.
fn law_of_cosines_rs(q: &QuadInstance) -> f64 {
    let qr = spherical_side(q.pq, q.pr, q.angle_rpq);
    // Angle of the diagonal at q, from the analog formula of the same
    // triangle read at the other base vertex.
    let cos_pqr = ((q.pr.cos() - q.pq.cos() * qr.cos()) / (q.pq.sin() * qr.sin())).clamp(-1.0, 1.0);
    let angle_rqs = q.angle_pqs - cos_pqr.acos();
    spherical_side(qr, q.qs, angle_rqs)
}

#[test]
fn quad_embedding_matches_law_of_cosines_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..40 {
        let q = QuadInstance {
            pq: rng.random_range(0.3..2.0),
            pr: rng.random_range(0.05..0.6),
            qs: rng.random_range(0.05..0.6),
            angle_rpq: rng.random_range(0.3..2.5),
            angle_pqs: rng.random_range(0.3..2.5),
            same_side: true,
        };
        let out = quad_compare(&q).unwrap();
        let oracle = law_of_cosines_rs(&q);
        assert!(
            (out.rs_sphere - oracle).abs() <= 1e-9,
            "case {case}: embedding {} vs chain {oracle}",
            out.rs_sphere
        );
    }
}

/// Flat cap: every annulus volume integrates a polynomial, so Simpson must
/// reproduce the closed form to roundoff.
#[test]
fn flat_annulus_volumes_match_polynomial_closed_form() {
    let warping = WarpingFunction::analytic(
        3.0,
        Arc::new(|rho: f64| rho),
        Arc::new(|_| 1.0),
        Arc::new(|_| 0.0),
    )
    .unwrap()
    .with_cap(CapData {
        curvature: 0.0,
        radius: 0.8,
    })
    .unwrap();
    let n = 3;
    let model = VolumeModel::with_equal_area(n, warping, 0.0).unwrap();
    let r_grid: Vec<f64> = (1..=8).map(|i| 0.25 * i as f64).collect();
    let report = verify_volume_comparison(&model, &r_grid, 256, false).unwrap();
    let ComparisonDetail::Areas {
        annulus_lhs,
        annulus_rhs,
        r_tilde,
        ..
    } = &report.detail
    else {
        panic!("expected area detail");
    };
    assert!((r_tilde - 0.8).abs() <= 1e-12);
    let coeff = unit_sphere_area(n - 1) / n as f64;
    for (i, &radius) in r_grid.iter().enumerate() {
        let outer: f64 = 0.8 + radius;
        let exact = coeff * (outer.powi(n as i32) - 0.8_f64.powi(n as i32));
        assert!(
            (annulus_lhs[i] - exact).abs() <= 1e-10 * exact.max(1.0),
            "annulus {i}: {} vs {exact}",
            annulus_lhs[i]
        );
        assert!((annulus_rhs[i] - exact).abs() <= 1e-10 * exact.max(1.0));
    }
}

/// Spherical cap in dimension 2: annuli are 2π(cos a − cos b) exactly.
#[test]
fn spherical_annulus_volumes_match_cosine_closed_form() {
    let warping = WarpingFunction::analytic(
        2.6,
        Arc::new(f64::sin),
        Arc::new(f64::cos),
        Arc::new(|rho: f64| -rho.sin()),
    )
    .unwrap()
    .with_cap(CapData {
        curvature: 1.0,
        radius: 0.6,
    })
    .unwrap();
    let model = VolumeModel::with_equal_area(2, warping, 1.0).unwrap();
    let r_grid = [0.3, 0.9, 1.5, 2.0];
    let report = verify_volume_comparison(&model, &r_grid, 512, false).unwrap();
    let ComparisonDetail::Areas { annulus_lhs, .. } = &report.detail else {
        panic!("expected area detail");
    };
    for (i, &radius) in r_grid.iter().enumerate() {
        let exact = std::f64::consts::TAU * (0.6_f64.cos() - (0.6 + radius).cos());
        assert!(
            (annulus_lhs[i] - exact).abs() <= 1e-10,
            "annulus {i}: {} vs {exact}",
            annulus_lhs[i]
        );
    }
}

/// d/dt log det A against a centred difference of the log-determinant
/// sequence itself.
#[test]
fn logdet_derivative_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let profile = bounded_sinusoid_profile(&mut rng, 2, 1.4, -0.8, 0.8).unwrap();
    let op = symmetric_operator_in_range(&mut rng, 2, -0.4, 0.4).unwrap();
    let steps = 2048;
    let traj = integrate_jacobi(&profile, &op, steps).unwrap();
    let h = traj.step_size();
    for i in (64..steps - 64).step_by(97) {
        let fd = (traj.det(i + 1).ln() - traj.det(i - 1).ln()) / (2.0 * h);
        let direct = traj.logdet_derivative(i).unwrap();
        assert!(
            (fd - direct).abs() <= 1e-5,
            "node {i}: fd {fd} vs direct {direct}"
        );
    }
}

/// The speed comparison carries its own closed-form/integration cross-check;
/// random draws must never trip it.
#[test]
fn transversal_speed_dual_route_stays_quiet() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for _ in 0..30 {
        let e_norm = rng.random_range(0.4..1.5);
        let data = TransversalData {
            f: rng.random_range(0.2..0.9),
            fprime: rng.random_range(-0.5..0.5),
            lambda: rng.random_range(-0.5..0.5),
            e_norm,
            e_dot_gamma: rng.random_range(-0.8..0.8) * e_norm,
        };
        let k_m = rng.random_range(-1.0..0.5);
        let k_m0 = rng.random_range(k_m..1.0);
        let pair = transversal_speed_compare(k_m, k_m0, &data, 512).unwrap();
        assert!(pair.dual_route_defect <= 1e-8);
        assert!(pair.s_end >= 0.0);
    }
}

/// Equal-area solve against closed-form inversions of sn.
#[test]
fn model_radius_matches_closed_form_inversions() {
    // Flat target: sn_k(r̃) = r has r̃ = arcsin-type closed forms.
    let r = 0.7;
    let flat_target = r;
    let solved = geomcmp::solve_model_radius(0.0, 1.0, 3, r).unwrap();
    assert!((solved.r_tilde - flat_target.asin()).abs() <= 1e-13);
    let solved = geomcmp::solve_model_radius(0.0, -1.0, 3, r).unwrap();
    assert!((solved.r_tilde - flat_target.asinh()).abs() <= 1e-13);
    // Matching curvatures: the solve must return r itself.
    for &k in &[-1.5, -0.2, 0.4, 2.0] {
        let solved = geomcmp::solve_model_radius(k, k, 4, 0.55).unwrap();
        assert!((solved.r_tilde - 0.55).abs() <= 1e-12, "k = {k}");
        assert_eq!(solved.radius_ordered, Some(true));
    }
}

/// sn and cs against the plain trigonometric/hyperbolic library calls away
/// from the series switch.
#[test]
fn space_form_functions_match_library_trig() {
    for &k in &[0.3f64, 1.0, 2.7] {
        let s = k.sqrt();
        for i in 1..=10 {
            let t = 0.23 * i as f64;
            let (sn, cs) = space_form_functions(k, t);
            assert!((sn - (s * t).sin() / s).abs() <= 1e-13);
            assert!((cs - (s * t).cos()).abs() <= 1e-13);
        }
    }
    for &k in &[-0.3f64, -1.0, -2.7] {
        let s = (-k).sqrt();
        for i in 1..=10 {
            let t = 0.23 * i as f64;
            let (sn, cs) = space_form_functions(k, t);
            let scale = (s * t).cosh();
            assert!((sn - (s * t).sinh() / s).abs() <= 1e-13 * scale);
            assert!((cs - scale).abs() <= 1e-13 * scale);
        }
    }
}
