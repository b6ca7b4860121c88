//! Application scenarios built on the comparison machinery: a quadrilateral
//! distance comparison between the plane and the unit sphere, a speed
//! comparison for curves transversal to a geodesic on constant-curvature
//! surfaces, and an area/volume comparison for rotationally symmetric models
//! against space forms.

use nalgebra::Vector3;

use crate::comparison::{ComparisonDetail, ComparisonReport};
use crate::curvature::{
    check_cap_consistency, space_form_functions, validate_hypotheses, CurvatureProfile,
    HypothesisMode, WarpingFunction,
};
use crate::error::{Error, Result};
use crate::indexform::composite_simpson;
use crate::jacobi::{
    integrate_jacobi, space_form_focal_radius, space_form_jacobi, InitialOperator,
};
use crate::tolerances::{DUAL_ROUTE_TOL, HYPOTHESIS_TOL, MODEL_RADIUS_TOL};

/// Quadrilateral data: a base segment `pq`, legs `pr` and `qs` leaving its
/// endpoints at prescribed angles, both on the same side of the base.
#[derive(Clone, Copy, Debug)]
pub struct QuadInstance {
    pub pq: f64,
    pub pr: f64,
    pub qs: f64,
    pub angle_rpq: f64,
    pub angle_pqs: f64,
    pub same_side: bool,
}

/// Distances `|rs|` of the quadrilateral closed in the plane and on the unit
/// sphere, with `margin = rs_flat - rs_sphere`.
#[derive(Clone, Copy, Debug)]
pub struct QuadOutcome {
    pub rs_flat: f64,
    pub rs_sphere: f64,
    pub margin: f64,
}

fn check_quad(q: &QuadInstance) -> Result<()> {
    let lengths = [("pq", q.pq), ("pr", q.pr), ("qs", q.qs)];
    for (name, v) in lengths {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::invalid(format!(
                "side {name} must be a finite nonnegative length, got {v}"
            )));
        }
    }
    for (name, v) in [("angle_rpq", q.angle_rpq), ("angle_pqs", q.angle_pqs)] {
        if !v.is_finite() || v <= 0.0 || v >= std::f64::consts::PI {
            return Err(Error::invalid(format!(
                "{name} must lie strictly inside (0, pi), got {v}"
            )));
        }
    }
    if q.pq >= std::f64::consts::PI {
        return Err(Error::invalid(
            "base length must stay below pi so the spherical base is minimal",
        ));
    }
    if q.pr >= std::f64::consts::PI || q.qs >= std::f64::consts::PI {
        return Err(Error::invalid(
            "legs must stay below pi so every constructed arc is minimal",
        ));
    }
    if !q.same_side {
        return Err(Error::invalid(
            "the comparison is stated for legs on a common side of the base",
        ));
    }
    Ok(())
}

/// Closes the quadrilateral in both geometries and compares `|rs|`.
///
/// The flat side uses plane coordinates. The spherical side embeds the four
/// points in `ℝ³`: the base runs along the equator from `p = (1,0,0)`, leg
/// directions rotate the base tangents toward `+z` by the given angles, and
/// the final distance is one arccosine of a dot product.
pub fn quad_compare(q: &QuadInstance) -> Result<QuadOutcome> {
    check_quad(q)?;
    let (alpha, beta) = (q.angle_rpq, q.angle_pqs);

    let r_flat = [q.pr * alpha.cos(), q.pr * alpha.sin()];
    let s_flat = [q.pq - q.qs * beta.cos(), q.qs * beta.sin()];
    let rs_flat = (r_flat[0] - s_flat[0]).hypot(r_flat[1] - s_flat[1]);

    let p = Vector3::new(1.0, 0.0, 0.0);
    let qv = Vector3::new(q.pq.cos(), q.pq.sin(), 0.0);
    // Unit tangents along the equator: at p toward q, at q toward p. The +z
    // pole is orthogonal to the whole base circle, so one axis serves both
    // leg rotations.
    let tangent_p = Vector3::new(0.0, 1.0, 0.0);
    let tangent_q = Vector3::new(q.pq.sin(), -q.pq.cos(), 0.0);
    let pole = Vector3::new(0.0, 0.0, 1.0);

    let dir_p = tangent_p * alpha.cos() + pole * alpha.sin();
    let dir_q = tangent_q * beta.cos() + pole * beta.sin();
    let r_sphere = p * q.pr.cos() + dir_p * q.pr.sin();
    let s_sphere = qv * q.qs.cos() + dir_q * q.qs.sin();

    let dot = r_sphere.dot(&s_sphere).clamp(-1.0, 1.0);
    if dot <= -1.0 + 1e-15 {
        return Err(Error::domain(
            "spherical endpoints are antipodal; the connecting geodesic is not unique",
        ));
    }
    let rs_sphere = dot.acos();
    Ok(QuadOutcome {
        rs_flat,
        rs_sphere,
        margin: rs_flat - rs_sphere,
    })
}

/// Sweeps symmetric right-angle quadrilaterals `pr = qs ∈ [0, leg_max]` over
/// `n_points` samples and reports `(leg, margin)` pairs together with the
/// first leg length at which the margin turns negative, if any.
pub fn quad_margin_sweep(
    pq: f64,
    leg_max: f64,
    n_points: usize,
) -> Result<(Vec<(f64, f64)>, Option<f64>)> {
    if n_points < 2 {
        return Err(Error::invalid("sweep needs at least 2 points"));
    }
    if !(leg_max > 0.0) || !leg_max.is_finite() {
        return Err(Error::invalid("sweep range must be positive and finite"));
    }
    let mut points = Vec::with_capacity(n_points);
    let mut threshold = None;
    for i in 0..n_points {
        let leg = leg_max * i as f64 / (n_points - 1) as f64;
        let outcome = quad_compare(&QuadInstance {
            pq,
            pr: leg,
            qs: leg,
            angle_rpq: std::f64::consts::FRAC_PI_2,
            angle_pqs: std::f64::consts::FRAC_PI_2,
            same_side: true,
        })?;
        if threshold.is_none() && outcome.margin < 0.0 {
            threshold = Some(leg);
        }
        points.push((leg, outcome.margin));
    }
    Ok((points, threshold))
}

/// Data of a transversal variation at one parameter value: the scaled
/// distance `f` and its derivative, the tangential drift rate `λ` of the
/// connecting field `E` (so `E′ = λ·γ′`), and the field's norm and projection
/// onto the geodesic direction.
#[derive(Clone, Copy, Debug)]
pub struct TransversalData {
    pub f: f64,
    pub fprime: f64,
    pub lambda: f64,
    pub e_norm: f64,
    pub e_dot_gamma: f64,
}

/// Speeds of the transversal curve computed on two space forms from the same
/// data, with `margin = speed_m - speed_m0`.
#[derive(Clone, Copy, Debug)]
pub struct SpeedPair {
    pub speed_m: f64,
    pub speed_m0: f64,
    pub margin: f64,
    /// Arclength of the transversal geodesic, `f · ‖E‖`.
    pub s_end: f64,
    /// Worst disagreement between the closed-form Jacobi factor and an
    /// independent integration of the same equation, across both curvatures.
    pub dual_route_defect: f64,
}

/// Compares the speed of a curve `t ↦ exp(f(t)·E(t))` at one parameter value
/// between space forms of curvature `k_m` and `k_m0`.
///
/// The variation field along the transversal geodesic is Jacobi with
/// `V(0) = γ′` and `V′(0) = (f′/f)·Ê + (λ/‖E‖)·γ′`, which decomposes into a
/// tangential part `(a·s + b)` with `b = ⟨γ′, Ê⟩` and
/// `a = f′/f + λ·b/‖E‖`, and an orthogonal part of norm `√(1-b²)` satisfying
/// the scalar space-form equation with initial slope `μ = λ/‖E‖`. Both speeds
/// are closed-form evaluations at `s = f·‖E‖`; the same scalar equation is
/// also integrated numerically and any disagreement beyond the dual-route
/// budget is an error rather than a silent pick of one answer.
pub fn transversal_speed_compare(
    k_m: f64,
    k_m0: f64,
    data: &TransversalData,
    steps: usize,
) -> Result<SpeedPair> {
    if !k_m.is_finite() || !k_m0.is_finite() {
        return Err(Error::invalid("curvatures must be finite"));
    }
    let TransversalData {
        f,
        fprime,
        lambda,
        e_norm,
        e_dot_gamma,
    } = *data;
    if !f.is_finite() || f < 0.0 {
        return Err(Error::invalid(format!(
            "distance scale must be finite and nonnegative, got {f}"
        )));
    }
    if !fprime.is_finite() || !lambda.is_finite() {
        return Err(Error::invalid("derivative data must be finite"));
    }
    if !(e_norm > 0.0) || !e_norm.is_finite() {
        return Err(Error::invalid("field norm must be positive"));
    }
    if e_dot_gamma.abs() >= e_norm {
        return Err(Error::domain(format!(
            "field projection {e_dot_gamma} must be strictly smaller than the norm {e_norm}"
        )));
    }

    let s_end = f * e_norm;
    if s_end == 0.0 {
        return Ok(SpeedPair {
            speed_m: 1.0,
            speed_m0: 1.0,
            margin: 0.0,
            s_end,
            dual_route_defect: 0.0,
        });
    }

    let b = e_dot_gamma / e_norm;
    let a = fprime / f + lambda * b / e_norm;
    let mu = lambda / e_norm;
    let ortho0 = (1.0 - b * b).sqrt();

    if let Some(t_star) = space_form_focal_radius(k_m0, mu) {
        if t_star <= s_end {
            return Err(Error::FocalPoint {
                t: t_star,
                context: "transversal geodesic leaves the comparison side's focal radius".into(),
            });
        }
    }

    let mut dual_route_defect = 0.0_f64;
    let mut speed = |k: f64| -> Result<f64> {
        let (j, _) = space_form_jacobi(k, mu, s_end);
        let profile = CurvatureProfile::constant(2, s_end, k)?;
        let operator = InitialOperator::scalar(1, mu);
        let traj = integrate_jacobi(&profile, &operator, steps)?;
        let j_integrated = traj.a(traj.steps())[(0, 0)];
        dual_route_defect = dual_route_defect.max((j - j_integrated).abs());
        Ok((ortho0 * j).hypot(a * s_end + b))
    };
    let speed_m = speed(k_m)?;
    let speed_m0 = speed(k_m0)?;
    if dual_route_defect > DUAL_ROUTE_TOL {
        return Err(Error::Inconsistent(format!(
            "closed-form and integrated Jacobi factors disagree by {dual_route_defect:e}"
        )));
    }
    Ok(SpeedPair {
        speed_m,
        speed_m0,
        margin: speed_m - speed_m0,
        s_end,
        dual_route_defect,
    })
}

/// Area of the unit `m`-sphere, from the two-term recursion
/// `ω₀ = 2, ω₁ = 2π, ω_m = 2π/(m-1)·ω_{m-2}`.
pub fn unit_sphere_area(m: usize) -> f64 {
    match m {
        0 => 2.0,
        1 => 2.0 * std::f64::consts::PI,
        _ => 2.0 * std::f64::consts::PI / (m as f64 - 1.0) * unit_sphere_area(m - 2),
    }
}

/// Result of matching sphere areas between a cap geometry and a space form.
#[derive(Clone, Copy, Debug)]
pub struct ModelRadius {
    pub r_tilde: f64,
    /// `Some(r ≥ r̃)` when the cap curvature dominates the comparison
    /// curvature, where that ordering is a consequence worth reporting;
    /// `None` otherwise.
    pub radius_ordered: Option<bool>,
}

/// Solves `sn_k(r̃) = sn_{k'}(r)` for `r̃` on the increasing branch
/// (`r̃ ≤ π/(2√k)` for `k > 0`), matching distance-sphere areas in every
/// dimension at once.
pub fn solve_model_radius(k_prime: f64, k: f64, n: usize, r: f64) -> Result<ModelRadius> {
    if n < 2 {
        return Err(Error::invalid("dimension must be at least 2"));
    }
    if !k_prime.is_finite() || !k.is_finite() {
        return Err(Error::invalid("curvatures must be finite"));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::invalid("base radius must be positive"));
    }
    let (target, _) = space_form_functions(k_prime, r);
    if target <= 0.0 {
        return Err(Error::domain(format!(
            "sn_{k_prime}({r}) = {target} is not positive; the base sphere is degenerate"
        )));
    }

    let mut hi = if k > 0.0 {
        let branch_end = std::f64::consts::FRAC_PI_2 / k.sqrt();
        let (peak, _) = space_form_functions(k, branch_end);
        if target > peak + MODEL_RADIUS_TOL {
            return Err(Error::RootSolve(format!(
                "target area needs sn_{k}(r_tilde) = {target}, beyond the branch maximum {peak}; \
                 no model radius with r_tilde <= pi/(2*sqrt(k)) exists"
            )));
        }
        branch_end
    } else {
        let mut hi = r.max(1.0);
        while space_form_functions(k, hi).0 < target {
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::RootSolve("model radius search diverged".into()));
            }
        }
        hi
    };

    let mut lo = 0.0_f64;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if space_form_functions(k, mid).0 < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r_tilde = 0.5 * (lo + hi);
    let radius_ordered = if k_prime >= k {
        Some(r >= r_tilde - MODEL_RADIUS_TOL)
    } else {
        None
    };
    Ok(ModelRadius {
        r_tilde,
        radius_ordered,
    })
}

/// Rotationally symmetric volume model: a warping function with a declared
/// space-form cap, compared against the constant-curvature model `k` at the
/// matched radius `r_tilde`.
#[derive(Clone, Debug)]
pub struct VolumeModel {
    n: usize,
    warping: WarpingFunction,
    k: f64,
    r_tilde: f64,
    radius_ordered: Option<bool>,
    omega: f64,
}

impl VolumeModel {
    /// Standard construction: `r_tilde` is solved so the distance-sphere
    /// areas at the cap boundary match exactly.
    pub fn with_equal_area(n: usize, warping: WarpingFunction, k: f64) -> Result<Self> {
        let cap = warping
            .cap()
            .ok_or_else(|| Error::invalid("volume model needs a warping function with a cap"))?;
        let solved = solve_model_radius(cap.curvature, k, n, cap.radius)?;
        Self::assemble(n, warping, k, solved.r_tilde, solved.radius_ordered)
    }

    /// Construction with a caller-chosen model radius, for the relaxed mode
    /// where only `area(r) ≤ model_area(r_tilde)` and `r ≥ r_tilde` are
    /// required rather than an exact area match.
    pub fn with_model_radius(n: usize, warping: WarpingFunction, k: f64, r_tilde: f64) -> Result<Self> {
        let cap = warping
            .cap()
            .ok_or_else(|| Error::invalid("volume model needs a warping function with a cap"))?;
        if !(r_tilde > 0.0) || !r_tilde.is_finite() {
            return Err(Error::invalid("model radius must be positive"));
        }
        let radius_ordered = if cap.curvature >= k {
            Some(cap.radius >= r_tilde - MODEL_RADIUS_TOL)
        } else {
            None
        };
        Self::assemble(n, warping, k, r_tilde, radius_ordered)
    }

    fn assemble(
        n: usize,
        warping: WarpingFunction,
        k: f64,
        r_tilde: f64,
        radius_ordered: Option<bool>,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("dimension must be at least 2"));
        }
        if !k.is_finite() {
            return Err(Error::invalid("comparison curvature must be finite"));
        }
        if k > 0.0 && r_tilde > std::f64::consts::FRAC_PI_2 / k.sqrt() + MODEL_RADIUS_TOL {
            return Err(Error::invalid(format!(
                "model radius {r_tilde} exceeds pi/(2*sqrt({k})), leaving the increasing branch"
            )));
        }
        Ok(VolumeModel {
            n,
            warping,
            k,
            r_tilde,
            radius_ordered,
            omega: unit_sphere_area(n - 1),
        })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn warping(&self) -> &WarpingFunction {
        &self.warping
    }

    pub fn comparison_curvature(&self) -> f64 {
        self.k
    }

    pub fn r_tilde(&self) -> f64 {
        self.r_tilde
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Distance-sphere area at radius `rho` in the warped geometry.
    pub fn area(&self, rho: f64) -> Result<f64> {
        Ok(self.omega * self.warping.eval(rho)?.powi(self.n as i32 - 1))
    }

    /// Distance-sphere area at radius `rho` in the comparison space form.
    pub fn model_area(&self, rho: f64) -> f64 {
        let (sn, _) = space_form_functions(self.k, rho);
        self.omega * sn.powi(self.n as i32 - 1)
    }
}

/// Verifies the area and annulus-volume comparison for a rotationally
/// symmetric model: for each offset `R` in `r_grid`,
/// `area(r + R) ≤ model_area(r̃ + R)` and the annulus volumes between the base
/// spheres and the offset spheres obey the same ordering.
///
/// Offsets that leave the warping domain or reach the model's vanishing
/// radius are dropped with a warning. In ordering mode the exact area match at
/// the cap boundary is replaced by the ordering checks
/// `area(r) ≤ model_area(r̃)` and `r ≥ r̃`; both appear as named hypothesis
/// checks either way, so a failing precondition reads as a failed hypothesis,
/// not an error.
pub fn verify_volume_comparison(
    model: &VolumeModel,
    r_grid: &[f64],
    steps: usize,
    ordering_mode: bool,
) -> Result<ComparisonReport> {
    let cap = model
        .warping()
        .cap()
        .expect("constructors guarantee cap data");
    let r = cap.radius;
    let r_tilde = model.r_tilde();
    let k = model.k;
    let n = model.dimension();

    if r_grid.is_empty() {
        return Err(Error::invalid("offset grid must be non-empty"));
    }

    let mut warnings = Vec::new();
    let mut offsets = Vec::with_capacity(r_grid.len());
    let model_limit = if k > 0.0 {
        std::f64::consts::PI / k.sqrt() - r_tilde
    } else {
        f64::INFINITY
    };
    let domain_limit = model.warping().rho_max() - r;
    for &big_r in r_grid {
        if !big_r.is_finite() || big_r < 0.0 {
            return Err(Error::invalid(format!(
                "offsets must be finite and nonnegative, got {big_r}"
            )));
        }
        if big_r > domain_limit * (1.0 + 1e-12) {
            warnings.push(format!(
                "offset {big_r} leaves the warping domain (limit {domain_limit}); dropped"
            ));
        } else if big_r >= model_limit - 1e-9 {
            warnings.push(format!(
                "offset {big_r} reaches the model's vanishing radius (limit {model_limit}); dropped"
            ));
        } else {
            offsets.push(big_r);
        }
    }
    if offsets.is_empty() {
        return Err(Error::domain(
            "no offset survives the domain and model-radius limits",
        ));
    }
    let r_max = offsets.iter().cloned().fold(0.0_f64, f64::max);
    if r_max == 0.0 {
        return Err(Error::invalid(
            "offset grid needs at least one positive offset",
        ));
    }

    // Radial curvature hypothesis over the compared segment, plus the shape
    // operator ordering at its start.
    let profile = CurvatureProfile::warped(n, r_max, model.warping().clone(), r)?;
    let model_profile = CurvatureProfile::constant(n, r_max, k)?;
    let f_r = model.warping().eval(r)?;
    let fp_r = model.warping().derivative(r)?;
    if f_r.abs() <= 1e-14 {
        return Err(Error::domain("warping function vanishes at the cap radius"));
    }
    let (sn_rt, cs_rt) = space_form_functions(k, r_tilde);
    if sn_rt <= 0.0 {
        return Err(Error::domain("model sphere is degenerate at r_tilde"));
    }
    let d = n - 1;
    let operator = InitialOperator::scalar(d, fp_r / f_r);
    let operator_0 = InitialOperator::scalar(d, cs_rt / sn_rt);
    let mut hypothesis = validate_hypotheses(
        &profile,
        &model_profile,
        &operator,
        &operator_0,
        HypothesisMode::Ricci(k),
        257,
        HYPOTHESIS_TOL,
    )?;

    match check_cap_consistency(model.warping()) {
        Ok(()) => hypothesis.push("cap_consistency", 0.0, None),
        Err(Error::Inconsistent(_)) => hypothesis.push("cap_consistency", f64::NEG_INFINITY, None),
        Err(e) => return Err(e),
    }

    let area_r = model.area(r)?;
    let model_area_rt = model.model_area(r_tilde);
    if ordering_mode {
        hypothesis.push("area_ordering", model_area_rt - area_r, Some(0.0));
        hypothesis.push("radius_ordering", r - r_tilde, Some(0.0));
    } else {
        hypothesis.push("area_match", -(area_r - model_area_rt).abs(), Some(0.0));
    }

    let mut lhs = Vec::with_capacity(offsets.len());
    let mut rhs = Vec::with_capacity(offsets.len());
    let mut annulus_lhs = Vec::with_capacity(offsets.len());
    let mut annulus_rhs = Vec::with_capacity(offsets.len());
    for &big_r in &offsets {
        lhs.push(model.area(r + big_r)?);
        rhs.push(model.model_area(r_tilde + big_r));
        if big_r == 0.0 {
            annulus_lhs.push(0.0);
            annulus_rhs.push(0.0);
            continue;
        }
        let h = big_r / steps as f64;
        let mut area_samples = Vec::with_capacity(steps + 1);
        let mut model_samples = Vec::with_capacity(steps + 1);
        for i in 0..=steps {
            let u = i as f64 * h;
            area_samples.push(model.area((r + u).min(model.warping().rho_max()))?);
            model_samples.push(model.model_area(r_tilde + u));
        }
        annulus_lhs.push(composite_simpson(h, &area_samples)?);
        annulus_rhs.push(composite_simpson(h, &model_samples)?);
    }

    let margin: Vec<f64> = lhs.iter().zip(&rhs).map(|(&l, &r)| l - r).collect();
    let min_margin = margin.iter().fold(f64::INFINITY, |acc, &m| acc.min(m));
    let ratio: Vec<f64> = lhs
        .iter()
        .zip(&rhs)
        .map(|(&l, &r)| if r > 0.0 { l / r } else { f64::INFINITY })
        .collect();

    Ok(ComparisonReport {
        grid: offsets,
        lhs,
        rhs,
        margin,
        min_margin,
        ratio,
        hypothesis,
        rigidity: None,
        warnings,
        detail: ComparisonDetail::Areas {
            annulus_lhs,
            annulus_rhs,
            r_tilde,
            radius_ordered: model.radius_ordered,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::{build_cap_extension, CapData};
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn right_angle_quad(pq: f64, pr: f64, qs: f64) -> QuadInstance {
        QuadInstance {
            pq,
            pr,
            qs,
            angle_rpq: std::f64::consts::FRAC_PI_2,
            angle_pqs: std::f64::consts::FRAC_PI_2,
            same_side: true,
        }
    }

    /// Spherical law-of-cosines route to `|rs|`, fully independent of the
    /// embedding construction: diagonal (q, r), then the angle split at q.
    fn law_of_cosines_rs(q: &QuadInstance) -> f64 {
        let qr = (q.pq.cos() * q.pr.cos()
            + q.pq.sin() * q.pr.sin() * q.angle_rpq.cos())
        .acos();
        let angle_pqr = ((q.pr.cos() - q.pq.cos() * qr.cos()) / (q.pq.sin() * qr.sin()))
            .clamp(-1.0, 1.0)
            .acos();
        let angle_rqs = q.angle_pqs - angle_pqr;
        (qr.cos() * q.qs.cos() + qr.sin() * q.qs.sin() * angle_rqs.cos())
            .clamp(-1.0, 1.0)
            .acos()
    }

    #[test]
    fn degenerate_legs_collapse_to_the_base() {
        let outcome = quad_compare(&right_angle_quad(1.0, 0.0, 0.0)).unwrap();
        assert_relative_eq!(outcome.rs_flat, 1.0, epsilon = 1e-15);
        assert_relative_eq!(outcome.rs_sphere, 1.0, epsilon = 1e-12);
        assert!(outcome.margin.abs() <= 1e-12);
    }

    #[test]
    fn worked_right_angle_instance() {
        let outcome = quad_compare(&right_angle_quad(1.0, 0.3, 0.3)).unwrap();
        assert_relative_eq!(outcome.rs_flat, 1.0, epsilon = 1e-15);
        let closed_form = (0.3_f64.cos().powi(2) * 1.0_f64.cos() + 0.3_f64.sin().powi(2)).acos();
        assert_relative_eq!(outcome.rs_sphere, closed_form, epsilon = 1e-12);
        assert!((outcome.margin - (1.0 - closed_form)).abs() <= 1e-12);
        assert!((outcome.margin - 0.0484).abs() < 5e-4);
    }

    #[test]
    fn embedding_agrees_with_law_of_cosines_chain() {
        let instances = [
            right_angle_quad(1.0, 0.3, 0.3),
            right_angle_quad(0.7, 0.2, 0.45),
            QuadInstance {
                pq: 1.1,
                pr: 0.5,
                qs: 0.25,
                angle_rpq: 1.1,
                angle_pqs: 0.9,
                same_side: true,
            },
        ];
        for q in &instances {
            let outcome = quad_compare(q).unwrap();
            let oracle = law_of_cosines_rs(q);
            assert!(
                (outcome.rs_sphere - oracle).abs() <= 1e-9,
                "instance {q:?}: {} vs {oracle}",
                outcome.rs_sphere
            );
        }
    }

    #[test]
    fn sweep_stays_nonnegative_on_the_unit_base() {
        let (points, threshold) = quad_margin_sweep(1.0, 1.2, 121).unwrap();
        assert_eq!(points.len(), 121);
        for &(leg, margin) in &points {
            assert!(margin >= -1e-12, "leg {leg} has margin {margin}");
        }
        assert_eq!(threshold, None);
    }

    #[test]
    fn swapping_the_legs_is_a_reflection() {
        let a = QuadInstance {
            pq: 0.9,
            pr: 0.4,
            qs: 0.15,
            angle_rpq: 1.2,
            angle_pqs: 0.7,
            same_side: true,
        };
        let b = QuadInstance {
            pq: 0.9,
            pr: 0.15,
            qs: 0.4,
            angle_rpq: 0.7,
            angle_pqs: 1.2,
            same_side: true,
        };
        let oa = quad_compare(&a).unwrap();
        let ob = quad_compare(&b).unwrap();
        assert!((oa.rs_flat - ob.rs_flat).abs() <= 1e-12);
        assert!((oa.rs_sphere - ob.rs_sphere).abs() <= 1e-12);
        assert!((oa.margin - ob.margin).abs() <= 1e-12);
    }

    #[test]
    fn invalid_quads_are_rejected() {
        let mut q = right_angle_quad(1.0, 0.3, 0.3);
        q.same_side = false;
        assert!(quad_compare(&q).is_err());
        assert!(quad_compare(&right_angle_quad(3.2, 0.3, 0.3)).is_err());
        let mut q = right_angle_quad(1.0, 0.3, 0.3);
        q.angle_rpq = 0.0;
        assert!(quad_compare(&q).is_err());
    }

    #[test]
    fn equidistant_curve_speeds() {
        let data = TransversalData {
            f: 0.3,
            fprime: 0.0,
            lambda: 0.0,
            e_norm: 1.0,
            e_dot_gamma: 0.0,
        };
        let pair = transversal_speed_compare(0.0, 1.0, &data, 512).unwrap();
        assert_relative_eq!(pair.speed_m, 1.0, epsilon = 1e-12);
        assert_relative_eq!(pair.speed_m0, 0.3_f64.cos(), epsilon = 1e-10);
        assert!(pair.margin > 0.0);
        assert!(pair.dual_route_defect <= DUAL_ROUTE_TOL);
    }

    #[test]
    fn zero_length_transversal_gives_unit_speeds() {
        let data = TransversalData {
            f: 0.0,
            fprime: 0.4,
            lambda: 0.2,
            e_norm: 2.0,
            e_dot_gamma: 0.5,
        };
        let pair = transversal_speed_compare(-1.0, 1.0, &data, 64).unwrap();
        assert_eq!((pair.speed_m, pair.speed_m0), (1.0, 1.0));
    }

    #[test]
    fn identical_curvatures_give_identical_speeds() {
        let data = TransversalData {
            f: 0.6,
            fprime: 0.25,
            lambda: -0.3,
            e_norm: 1.4,
            e_dot_gamma: 0.6,
        };
        let pair = transversal_speed_compare(0.7, 0.7, &data, 512).unwrap();
        assert!(pair.margin.abs() <= 1e-10);
    }

    #[test]
    fn tangential_projection_bound_is_enforced() {
        let data = TransversalData {
            f: 0.5,
            fprime: 0.0,
            lambda: 0.0,
            e_norm: 1.0,
            e_dot_gamma: 1.0,
        };
        assert!(matches!(
            transversal_speed_compare(0.0, 1.0, &data, 64),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn transversal_past_the_focal_radius_is_an_error() {
        // On the unit sphere with μ = 0 the focal radius is π/2.
        let data = TransversalData {
            f: 2.0,
            fprime: 0.0,
            lambda: 0.0,
            e_norm: 1.0,
            e_dot_gamma: 0.0,
        };
        assert!(matches!(
            transversal_speed_compare(0.0, 1.0, &data, 64),
            Err(Error::FocalPoint { .. })
        ));
    }

    #[test]
    fn sphere_area_table() {
        assert_relative_eq!(unit_sphere_area(1), 2.0 * std::f64::consts::PI);
        assert_relative_eq!(unit_sphere_area(2), 4.0 * std::f64::consts::PI);
        assert_relative_eq!(
            unit_sphere_area(3),
            2.0 * std::f64::consts::PI * std::f64::consts::PI
        );
    }

    #[test]
    fn model_radius_closed_forms() {
        let flat = solve_model_radius(1.0, 0.0, 2, 0.5).unwrap();
        assert!((flat.r_tilde - 0.5_f64.sin()).abs() <= 1e-12);
        assert_eq!(flat.radius_ordered, Some(true));

        let same = solve_model_radius(0.7, 0.7, 3, 0.9).unwrap();
        assert!((same.r_tilde - 0.9).abs() <= 1e-11);

        let quarter = solve_model_radius(1.0, 0.25, 2, 0.8).unwrap();
        let oracle = 2.0 * (0.8_f64.sin() / 2.0).asin();
        assert!((quarter.r_tilde - oracle).abs() <= 1e-12);
    }

    #[test]
    fn unattainable_target_is_a_root_solve_error() {
        // sn_4 caps at 1/2; a flat base sphere of radius 0.8 is larger.
        assert!(matches!(
            solve_model_radius(0.0, 4.0, 2, 0.8),
            Err(Error::RootSolve(_))
        ));
    }

    fn sine_warping(rho_max: f64, cap_radius: f64) -> WarpingFunction {
        WarpingFunction::analytic(
            rho_max,
            Arc::new(f64::sin),
            Arc::new(f64::cos),
            Arc::new(|rho: f64| -rho.sin()),
        )
        .unwrap()
        .with_cap(CapData {
            curvature: 1.0,
            radius: cap_radius,
        })
        .unwrap()
    }

    #[test]
    fn worked_sphere_cap_versus_flat_model() {
        let model = VolumeModel::with_equal_area(2, sine_warping(1.5, 0.5), 0.0).unwrap();
        assert!((model.r_tilde() - 0.5_f64.sin()).abs() <= 1e-12);
        let report = verify_volume_comparison(&model, &[0.7], 256, false).unwrap();
        assert!(report.hypothesis.passed());
        let two_pi = 2.0 * std::f64::consts::PI;
        assert_relative_eq!(report.lhs[0], two_pi * 1.2_f64.sin(), epsilon = 1e-12);
        assert_relative_eq!(
            report.rhs[0],
            two_pi * (0.5_f64.sin() + 0.7),
            epsilon = 1e-12
        );
        assert!(report.inequality_slack() > 0.0);
    }

    #[test]
    fn matched_space_form_is_equality_for_every_offset() {
        let warping = build_cap_extension(0.6, 0.4, Arc::new(|_| 0.6), 2.0).unwrap();
        let model = VolumeModel::with_equal_area(3, warping, 0.6).unwrap();
        let report =
            verify_volume_comparison(&model, &[0.2, 0.5, 1.0, 1.4], 512, false).unwrap();
        assert!(report.hypothesis.passed());
        for &m in &report.margin {
            assert!(m.abs() <= 1e-10, "area margin {m}");
        }
        match &report.detail {
            ComparisonDetail::Areas {
                annulus_lhs,
                annulus_rhs,
                ..
            } => {
                for (l, r) in annulus_lhs.iter().zip(annulus_rhs) {
                    assert!((l - r).abs() <= 1e-10);
                }
            }
            other => panic!("unexpected detail {other:?}"),
        }
    }

    #[test]
    fn cap_with_flatter_tail_respects_the_comparison() {
        let warping = build_cap_extension(1.0, 0.5, Arc::new(|_| 0.25), 3.0).unwrap();
        let model = VolumeModel::with_equal_area(2, warping, 0.25).unwrap();
        let report =
            verify_volume_comparison(&model, &[0.2, 0.5, 1.0], 512, false).unwrap();
        assert!(report.hypothesis.passed());
        assert!(report.inequality_slack() >= -1e-8);
    }

    #[test]
    fn relaxed_mode_accepts_an_enlarged_model_radius() {
        // Equal-area radius would be sin(0.5) ≈ 0.479; choosing 0.49 keeps
        // area(r) ≤ model_area and r ≥ r̃.
        let model =
            VolumeModel::with_model_radius(2, sine_warping(1.5, 0.5), 0.0, 0.49).unwrap();
        let report = verify_volume_comparison(&model, &[0.3, 0.7], 256, true).unwrap();
        assert!(report.hypothesis.passed(), "{:?}", report.hypothesis);
        assert!(report.inequality_slack() >= -1e-10);
    }

    #[test]
    fn relaxed_mode_flags_a_too_small_model_radius() {
        let model =
            VolumeModel::with_model_radius(2, sine_warping(1.5, 0.5), 0.0, 0.3).unwrap();
        let report = verify_volume_comparison(&model, &[0.3], 256, true).unwrap();
        assert!(!report.hypothesis.passed());
        assert!(report
            .hypothesis
            .checks
            .iter()
            .any(|c| c.name == "area_ordering" && !c.passed));
    }

    #[test]
    fn out_of_domain_offsets_are_dropped_with_warnings() {
        let model = VolumeModel::with_equal_area(2, sine_warping(1.5, 0.5), 0.0).unwrap();
        let report = verify_volume_comparison(&model, &[0.5, 2.0], 128, false).unwrap();
        assert_eq!(report.grid, vec![0.5]);
        assert!(!report.warnings.is_empty());
    }

    #[test]
    fn annulus_matches_the_flat_closed_form() {
        // Flat plane: f(ρ) = ρ, cap curvature 0 against model curvature 0;
        // the annulus area is π((r+R)² − r²) exactly.
        let warping = WarpingFunction::analytic(
            3.0,
            Arc::new(|rho: f64| rho),
            Arc::new(|_| 1.0),
            Arc::new(|_| 0.0),
        )
        .unwrap()
        .with_cap(CapData {
            curvature: 0.0,
            radius: 1.0,
        })
        .unwrap();
        let model = VolumeModel::with_equal_area(2, warping, 0.0).unwrap();
        let report = verify_volume_comparison(&model, &[0.8], 64, false).unwrap();
        match &report.detail {
            ComparisonDetail::Areas { annulus_lhs, .. } => {
                let exact = std::f64::consts::PI * (1.8_f64.powi(2) - 1.0);
                assert_relative_eq!(annulus_lhs[0], exact, epsilon = 1e-10);
            }
            other => panic!("unexpected detail {other:?}"),
        }
    }
}
