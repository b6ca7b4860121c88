//! Norm and determinant comparisons between Jacobi data on two geodesics.
//!
//! Three comparisons live here, all reported through [`ComparisonReport`]:
//!
//! - [`rauch3_verify`]: field norms `‖V(t)‖ ≥ ‖V₀(t)‖` for Jacobi fields with
//!   operator-coupled initial data, split into an orthogonal part (integrated)
//!   and a tangential part `(a·t + b)·γ′` (closed form).
//! - [`thm_d_verify`]: the fibre determinant `det A(t)` against the
//!   space-form product `(cs_k + λ̃·sn_k)^{n-1}`, scaled by initial wedge
//!   norms; the model side always uses closed forms.
//! - [`index_chain_check`]: the inequality chain that drives the norm
//!   comparison, `I_B(V) ≥ I_{B0}(‖V‖·e₀) ≥ I_{B0}(Jacobi minimiser)`,
//!   evaluated by quadrature.
//!
//! Reports never hide a failed hypothesis behind an error: instances that
//! violate the curvature or operator bounds come back with the failed checks
//! listed and no inequality asserted. Errors are reserved for malformed input
//! and for focal points that make the comparison itself meaningless.

use nalgebra::{DMatrix, DVector};

use crate::curvature::{
    space_form_functions, validate_hypotheses, CurvatureProfile, HypothesisMode, HypothesisReport,
};
use crate::error::{Error, Result};
use crate::indexform::{index_form_sampled, jacobi_through_endpoint, SampledField};
use crate::jacobi::{
    first_focal_point, integrate_jacobi, space_form_focal_radius, InitialOperator,
    JacobiTrajectory,
};
use crate::tolerances::{
    DIRECTION_NORM_FLOOR, HYPOTHESIS_TOL, RIGIDITY_ATTACH_THRESHOLD, WRONSKIAN_TOL,
};

/// Grid density for pointwise hypothesis checks; these are scans, not
/// quadratures, so the count is independent of the integration steps.
const HYPOTHESIS_GRID: usize = 257;

/// Comparison-specific payload kept alongside the sampled curves, enough to
/// recompute rigidity diagnostics after the fact.
#[derive(Clone, Debug)]
pub enum ComparisonDetail {
    /// Field-norm comparison: hatted (orthogonal) fields on each side when
    /// they were integrated, `None` for an identically zero orthogonal part.
    FieldNorms {
        profile: CurvatureProfile,
        profile_0: CurvatureProfile,
        operator: InitialOperator,
        operator_0: InitialOperator,
        hat: Option<SampledField>,
        hat_0: Option<SampledField>,
        tangential: (f64, f64),
    },
    /// Determinant comparison against a space-form model.
    Determinants {
        profile: CurvatureProfile,
        trajectory: JacobiTrajectory,
        k: f64,
        lambda: f64,
        lambda_tilde: f64,
        init_wedge: f64,
        init_wedge_tilde: f64,
    },
    /// Area comparison of rotationally symmetric models; annulus volumes are
    /// carried next to the per-radius areas.
    Areas {
        annulus_lhs: Vec<f64>,
        annulus_rhs: Vec<f64>,
        r_tilde: f64,
        /// Whether the base radius dominates the model radius, when that side
        /// claim was evaluated.
        radius_ordered: Option<bool>,
    },
}

/// Residual families measuring how close an instance sits to the equality
/// (rigidity) case. All residuals are nonnegative; an engineered-equality
/// instance drives every one of them to roundoff level.
#[derive(Clone, Copy, Debug)]
pub struct RigidityDiagnostics {
    /// Largest `|lhs - rhs|` on `[0, t₀]`.
    pub norm_gap: f64,
    /// Largest finite-difference derivative norm of the unit field
    /// directions; `None` when a field vanishes somewhere so the direction is
    /// undefined.
    pub parallelism_residual: Option<f64>,
    /// Largest curvature mismatch along the unit field directions.
    pub curvature_gap: f64,
    /// Eigen-evidence pair: how far the initial directions sit from being
    /// eigenvectors of their operators with one shared eigenvalue. For the
    /// determinant comparison this is `(|λ̃ - λ|, |wedge gap|)`.
    pub eigen_residual: (f64, f64),
}

/// Sampled two-sided comparison. `margin[i] = lhs[i] - rhs[i]` and
/// `min_margin` is its minimum over the grid; which sign a passing instance
/// carries depends on the comparison (field norms assert `lhs ≥ rhs`,
/// determinant and area comparisons assert `rhs ≥ lhs`), so verdicts go
/// through [`ComparisonReport::inequality_slack`].
#[derive(Clone, Debug)]
pub struct ComparisonReport {
    pub grid: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub margin: Vec<f64>,
    pub min_margin: f64,
    pub ratio: Vec<f64>,
    pub hypothesis: HypothesisReport,
    pub rigidity: Option<RigidityDiagnostics>,
    pub warnings: Vec<String>,
    pub detail: ComparisonDetail,
}

impl ComparisonReport {
    /// Smallest slack of the asserted inequality across every asserted curve;
    /// negative means the comparison is violated by that amount. The area
    /// variant asserts both the per-radius areas and the annulus volumes.
    pub fn inequality_slack(&self) -> f64 {
        match &self.detail {
            ComparisonDetail::FieldNorms { .. } => self.min_margin,
            ComparisonDetail::Determinants { .. } => self
                .margin
                .iter()
                .fold(f64::INFINITY, |acc, &m| acc.min(-m)),
            ComparisonDetail::Areas {
                annulus_lhs,
                annulus_rhs,
                ..
            } => {
                let area_slack = self
                    .margin
                    .iter()
                    .fold(f64::INFINITY, |acc, &m| acc.min(-m));
                annulus_lhs
                    .iter()
                    .zip(annulus_rhs.iter())
                    .fold(area_slack, |acc, (&l, &r)| acc.min(r - l))
            }
        }
    }

    /// Whether the asserted inequality holds within `tol` (hypothesis checks
    /// are reported separately and not folded in here).
    pub fn holds(&self, tol: f64) -> bool {
        self.inequality_slack() >= -tol
    }
}

fn ratio_entry(lhs: f64, rhs: f64) -> f64 {
    if rhs.abs() > 0.0 {
        lhs / rhs
    } else if lhs.abs() <= DIRECTION_NORM_FLOOR {
        1.0
    } else {
        f64::INFINITY
    }
}

fn min_of(values: &[f64]) -> f64 {
    values.iter().fold(f64::INFINITY, |acc, &v| acc.min(v))
}

fn e1_scaled(dim: usize, scale: f64) -> DVector<f64> {
    let mut v = DVector::zeros(dim);
    v[0] = scale;
    v
}

fn field_from_trajectory(traj: &JacobiTrajectory, v0: &DVector<f64>) -> Result<SampledField> {
    let (values, derivatives) = traj.field(v0);
    SampledField::new(traj.grid().to_vec(), values, derivatives)
}

/// Norm comparison of Jacobi fields on two geodesics of a common length.
///
/// The dominant side integrates `V̂(t) = A(t)·v̂₀` under `profile`/`operator`;
/// the other side uses the initial norm `vhat0_norm0`, pointing along `v̂₀`
/// when the fibre dimensions agree and along the first frame vector
/// otherwise. Both sides share the tangential component `(a·t + b)·γ′`, and
/// full norms are composed as `√(‖V̂‖² + (a·t+b)²)`.
///
/// A zero orthogonal start is honoured exactly: that side's hatted field is
/// identically zero and its norm curve is `|a·t + b|` with no integration.
///
/// Hypothesis violations (curvature ordering, operator ordering, initial-norm
/// ordering) are returned inside the report; a focal point of
/// (`profile_0`, `operator_0`) is an error because the comparison's right side
/// loses meaning past it.
#[allow(clippy::too_many_arguments)]
pub fn rauch3_verify(
    profile: &CurvatureProfile,
    profile_0: &CurvatureProfile,
    operator: &InitialOperator,
    operator_0: &InitialOperator,
    vhat0: &DVector<f64>,
    vhat0_norm0: f64,
    a: f64,
    b: f64,
    steps: usize,
) -> Result<ComparisonReport> {
    if vhat0.len() != profile.fibre_dimension() {
        return Err(Error::invalid(format!(
            "initial vector dimension {} does not match fibre dimension {}",
            vhat0.len(),
            profile.fibre_dimension()
        )));
    }
    if !vhat0_norm0.is_finite() || vhat0_norm0 < 0.0 {
        return Err(Error::invalid(
            "comparison-side initial norm must be finite and nonnegative",
        ));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::invalid("tangential coefficients must be finite"));
    }

    if let Some(t) = first_focal_point(profile_0, operator_0, steps)?.t_star {
        return Err(Error::FocalPoint {
            t,
            context: "comparison side has a focal point inside the interval".into(),
        });
    }

    let mut hypothesis = validate_hypotheses(
        profile,
        profile_0,
        operator,
        operator_0,
        HypothesisMode::Sectional,
        HYPOTHESIS_GRID,
        HYPOTHESIS_TOL,
    )?;
    let vhat0_norm = vhat0.norm();
    hypothesis.push("initial_norm", vhat0_norm - vhat0_norm0, Some(0.0));

    let mut warnings = Vec::new();
    let l = profile.length();
    let tangential_at = |t: f64| a * t + b;

    let hat = if vhat0_norm > DIRECTION_NORM_FLOOR {
        let traj = integrate_jacobi(profile, operator, steps)?;
        let defect = traj.wronskian_defect();
        if defect > WRONSKIAN_TOL {
            warnings.push(format!(
                "dominant-side Wronskian defect {defect:.3e} exceeds {WRONSKIAN_TOL:.1e}"
            ));
        }
        Some((field_from_trajectory(&traj, vhat0)?, traj))
    } else {
        None
    };

    let hat_0 = if vhat0_norm0 > DIRECTION_NORM_FLOOR {
        let v0_start = if profile_0.fibre_dimension() == vhat0.len()
            && vhat0_norm > DIRECTION_NORM_FLOOR
        {
            vhat0 * (vhat0_norm0 / vhat0_norm)
        } else {
            e1_scaled(profile_0.fibre_dimension(), vhat0_norm0)
        };
        let traj = integrate_jacobi(profile_0, operator_0, steps)?;
        let defect = traj.wronskian_defect();
        if defect > WRONSKIAN_TOL {
            warnings.push(format!(
                "comparison-side Wronskian defect {defect:.3e} exceeds {WRONSKIAN_TOL:.1e}"
            ));
        }
        Some(field_from_trajectory(&traj, &v0_start)?)
    } else {
        None
    };

    let grid: Vec<f64> = match &hat {
        Some((field, _)) => field.grid().to_vec(),
        None => (0..=steps).map(|i| l * i as f64 / steps as f64).collect(),
    };

    let lhs: Vec<f64> = grid
        .iter()
        .enumerate()
        .map(|(i, &t)| match &hat {
            Some((field, _)) => field.values()[i].norm().hypot(tangential_at(t)),
            None => tangential_at(t).abs(),
        })
        .collect();
    let rhs: Vec<f64> = grid
        .iter()
        .enumerate()
        .map(|(i, &t)| match &hat_0 {
            Some(field) => field.values()[i].norm().hypot(tangential_at(t)),
            None => tangential_at(t).abs(),
        })
        .collect();

    let margin: Vec<f64> = lhs.iter().zip(&rhs).map(|(&l, &r)| l - r).collect();
    let min_margin = min_of(&margin);
    let ratio: Vec<f64> = lhs
        .iter()
        .zip(&rhs)
        .map(|(&l, &r)| ratio_entry(l, r))
        .collect();

    let mut report = ComparisonReport {
        grid,
        lhs,
        rhs,
        margin,
        min_margin,
        ratio,
        hypothesis,
        rigidity: None,
        warnings,
        detail: ComparisonDetail::FieldNorms {
            profile: profile.clone(),
            profile_0: profile_0.clone(),
            operator: operator.clone(),
            operator_0: operator_0.clone(),
            hat: hat.map(|(field, _)| field),
            hat_0,
            tangential: (a, b),
        },
    };
    if report.hypothesis.passed() && min_margin.abs() <= RIGIDITY_ATTACH_THRESHOLD {
        report.rigidity = Some(rigidity_diagnostics(&report, l)?);
    }
    Ok(report)
}

/// Most negative finite-difference slope of `lhs²/rhs²` over the report grid.
/// The norm comparison implies this squared ratio is nondecreasing, so a
/// passing instance returns a value above `-tol`.
pub fn monotonicity_check(report: &ComparisonReport) -> f64 {
    let mut worst = f64::INFINITY;
    let q: Vec<f64> = report.ratio.iter().map(|&r| r * r).collect();
    for i in 1..q.len() {
        let h = report.grid[i] - report.grid[i - 1];
        if !q[i].is_finite() || !q[i - 1].is_finite() || h <= 0.0 {
            continue;
        }
        worst = worst.min((q[i] - q[i - 1]) / h);
    }
    if worst.is_finite() {
        worst
    } else {
        0.0
    }
}

fn unit_directions(field: &SampledField, upto: usize) -> Option<Vec<DVector<f64>>> {
    let mut dirs = Vec::with_capacity(upto + 1);
    for v in field.values().iter().take(upto + 1) {
        let n = v.norm();
        if n <= DIRECTION_NORM_FLOOR {
            return None;
        }
        dirs.push(v / n);
    }
    Some(dirs)
}

fn max_direction_drift(dirs: &[DVector<f64>], grid: &[f64]) -> f64 {
    let mut worst = 0.0_f64;
    for i in 1..dirs.len() {
        let h = grid[i] - grid[i - 1];
        worst = worst.max((&dirs[i] - &dirs[i - 1]).norm() / h);
    }
    worst
}

fn quadratic_form(m: &DMatrix<f64>, v: &DVector<f64>) -> f64 {
    (m * v).dot(v)
}

/// Equality-case residuals of a comparison restricted to `[0, t₀]`.
///
/// For the field-norm comparison the four families follow the rigidity
/// statement: norm agreement, parallelism of both unit fields, curvature
/// agreement along them, and a shared operator eigenvalue at the start (the
/// eigenvalue `μ` is read off the dominant side and tested on both). Sides
/// whose orthogonal part is identically zero contribute zero residuals and an
/// undefined (`None`) parallelism.
///
/// For the determinant comparison the same families act on the columns of
/// `A(t)`: parallelism and curvature gaps are taken over every column
/// direction, and the eigen pair is `(|λ̃ - λ|, |wedge difference|)`.
pub fn rigidity_diagnostics(report: &ComparisonReport, t0: f64) -> Result<RigidityDiagnostics> {
    let grid = &report.grid;
    if grid.is_empty() {
        return Err(Error::invalid("empty comparison grid"));
    }
    let span = *grid.last().expect("non-empty grid");
    if !(t0 > 0.0) || t0 > span * (1.0 + 1e-12) {
        return Err(Error::domain(format!(
            "rigidity window (0, {t0}] does not fit inside (0, {span}]"
        )));
    }
    let upto = grid.iter().rposition(|&t| t <= t0 * (1.0 + 1e-12)).unwrap_or(0);
    if upto == 0 {
        return Err(Error::domain(
            "rigidity window contains no positive grid points",
        ));
    }

    let norm_gap = (0..=upto)
        .map(|i| (report.lhs[i] - report.rhs[i]).abs())
        .fold(0.0_f64, f64::max);

    match &report.detail {
        ComparisonDetail::FieldNorms {
            profile,
            profile_0,
            operator,
            operator_0,
            hat,
            hat_0,
            ..
        } => {
            let dirs = hat.as_ref().map(|f| unit_directions(f, upto));
            let dirs_0 = hat_0.as_ref().map(|f| unit_directions(f, upto));
            // A side with a vanishing (but not identically zero) field has no
            // well-defined direction curve; a side with no orthogonal part at
            // all contributes nothing.
            let undefined =
                matches!(dirs, Some(None)) || matches!(dirs_0, Some(None));
            let dirs = dirs.flatten();
            let dirs_0 = dirs_0.flatten();

            let parallelism_residual = if undefined {
                None
            } else {
                let mut worst = 0.0_f64;
                if let Some(d) = &dirs {
                    worst = worst.max(max_direction_drift(d, grid));
                }
                if let Some(d) = &dirs_0 {
                    worst = worst.max(max_direction_drift(d, grid));
                }
                Some(worst)
            };

            let mut curvature_gap = 0.0_f64;
            if let (Some(d), Some(d0)) = (&dirs, &dirs_0) {
                let fd = profile.fibre_dimension();
                let fd0 = profile_0.fibre_dimension();
                let mut r = DMatrix::zeros(fd, fd);
                let mut r0 = DMatrix::zeros(fd0, fd0);
                for i in 0..=upto {
                    profile.eval_into(grid[i], &mut r)?;
                    profile_0.eval_into(grid[i], &mut r0)?;
                    let gap = (quadratic_form(&r, &d[i]) - quadratic_form(&r0, &d0[i])).abs();
                    curvature_gap = curvature_gap.max(gap);
                }
            }

            // μ comes from whichever side has a direction, preferring the
            // dominant one; both initial directions are tested against it.
            let eigen_residual = match (&dirs, &dirs_0) {
                (Some(d), _) | (None, Some(d)) => {
                    let mu_op = if dirs.is_some() { operator } else { operator_0 };
                    let mu = mu_op.apply(&d[0]).dot(&d[0]);
                    let res = |op: &InitialOperator, dir: Option<&DVector<f64>>| {
                        dir.map(|u| (op.apply(u) - u * mu).norm()).unwrap_or(0.0)
                    };
                    (
                        res(operator, dirs.as_ref().map(|v| &v[0])),
                        res(operator_0, dirs_0.as_ref().map(|v| &v[0])),
                    )
                }
                (None, None) => (0.0, 0.0),
            };

            Ok(RigidityDiagnostics {
                norm_gap,
                parallelism_residual,
                curvature_gap,
                eigen_residual,
            })
        }
        ComparisonDetail::Determinants {
            profile,
            trajectory,
            k,
            lambda,
            lambda_tilde,
            init_wedge,
            init_wedge_tilde,
        } => {
            let d = profile.fibre_dimension();
            let mut parallelism: Option<f64> = Some(0.0);
            let mut curvature_gap = 0.0_f64;
            let mut r = DMatrix::zeros(d, d);

            for col in 0..d {
                let mut dirs = Vec::with_capacity(upto + 1);
                for i in 0..=upto {
                    let v = trajectory.a(i).column(col).into_owned();
                    let n = v.norm();
                    if n <= DIRECTION_NORM_FLOOR {
                        parallelism = None;
                        dirs.clear();
                        break;
                    }
                    dirs.push(v / n);
                }
                if dirs.is_empty() {
                    continue;
                }
                if let Some(worst) = parallelism.as_mut() {
                    *worst = worst.max(max_direction_drift(&dirs, grid));
                }
                for (i, u) in dirs.iter().enumerate() {
                    profile.eval_into(grid[i], &mut r)?;
                    curvature_gap = curvature_gap.max((quadratic_form(&r, u) - k).abs());
                }
            }

            Ok(RigidityDiagnostics {
                norm_gap,
                parallelism_residual: parallelism,
                curvature_gap,
                eigen_residual: (
                    (lambda_tilde - lambda).abs(),
                    (init_wedge_tilde - init_wedge).abs(),
                ),
            })
        }
        ComparisonDetail::Areas { .. } => Err(Error::invalid(
            "rigidity diagnostics are defined for field-norm and determinant comparisons",
        )),
    }
}

/// Determinant comparison of the fibre solution against a space-form model.
///
/// The left curve is `init_wedge · det A(t)` with `A` integrated under
/// (`profile`, `λ·I`); the right curve is
/// `init_wedge_tilde · (cs_k(t) + λ̃·sn_k(t))^{n-1}`, evaluated in closed
/// form. The asserted inequality is `rhs ≥ lhs` on the grid. If the model
/// factor vanishes before the end of the interval the grid is truncated there
/// with a warning, since past that point the model bound carries no
/// information. Equality-level margins attach rigidity diagnostics.
pub fn thm_d_verify(
    profile: &CurvatureProfile,
    k: f64,
    lambda: f64,
    lambda_tilde: f64,
    init_wedge: f64,
    init_wedge_tilde: f64,
    steps: usize,
) -> Result<ComparisonReport> {
    if !k.is_finite() || !lambda.is_finite() || !lambda_tilde.is_finite() {
        return Err(Error::invalid("curvature and shape scalars must be finite"));
    }
    if !(init_wedge > 0.0) || !init_wedge.is_finite() || !init_wedge_tilde.is_finite() {
        return Err(Error::invalid(
            "initial wedge norms must be positive and finite",
        ));
    }

    let d = profile.fibre_dimension();
    let operator = InitialOperator::scalar(d, lambda);
    let operator_0 = InitialOperator::scalar(d, lambda_tilde);
    let model_profile = CurvatureProfile::constant(profile.dimension(), profile.length(), k)?;

    let mut hypothesis = validate_hypotheses(
        profile,
        &model_profile,
        &operator,
        &operator_0,
        HypothesisMode::Ricci(k),
        HYPOTHESIS_GRID,
        HYPOTHESIS_TOL,
    )?;
    hypothesis.push("initial_wedge", init_wedge_tilde - init_wedge, Some(0.0));

    if let Some(t) = first_focal_point(profile, &operator, steps)?.t_star {
        return Err(Error::FocalPoint {
            t,
            context: "determinant comparison stops at the first focal point".into(),
        });
    }

    let trajectory = integrate_jacobi(profile, &operator, steps)?;
    let mut warnings = Vec::new();
    let defect = trajectory.wronskian_defect();
    if defect > WRONSKIAN_TOL {
        warnings.push(format!(
            "Wronskian defect {defect:.3e} exceeds {WRONSKIAN_TOL:.1e}"
        ));
    }

    let mut upto = trajectory.steps();
    if let Some(tf) = space_form_focal_radius(k, lambda_tilde) {
        if tf <= profile.length() {
            upto = trajectory
                .grid()
                .iter()
                .rposition(|&t| t < tf - 1e-12)
                .unwrap_or(0);
            warnings.push(format!(
                "model determinant vanishes at t = {tf:.6}; comparison truncated to [0, {:.6}]",
                trajectory.grid()[upto]
            ));
        }
    }
    if upto == 0 {
        return Err(Error::domain(
            "model determinant vanishes before the first grid step",
        ));
    }

    let grid: Vec<f64> = trajectory.grid()[..=upto].to_vec();
    let mut lhs = Vec::with_capacity(upto + 1);
    let mut rhs = Vec::with_capacity(upto + 1);
    for (i, &t) in grid.iter().enumerate() {
        lhs.push(init_wedge * trajectory.det(i));
        let (sn, cs) = space_form_functions(k, t);
        rhs.push(init_wedge_tilde * (cs + lambda_tilde * sn).powi(d as i32));
    }
    let margin: Vec<f64> = lhs.iter().zip(&rhs).map(|(&l, &r)| l - r).collect();
    let min_margin = min_of(&margin);
    let ratio: Vec<f64> = lhs
        .iter()
        .zip(&rhs)
        .map(|(&l, &r)| ratio_entry(l, r))
        .collect();

    let span = *grid.last().expect("non-empty grid");
    let mut report = ComparisonReport {
        grid,
        lhs,
        rhs,
        margin,
        min_margin,
        ratio,
        hypothesis,
        rigidity: None,
        warnings,
        detail: ComparisonDetail::Determinants {
            profile: profile.clone(),
            trajectory,
            k,
            lambda,
            lambda_tilde,
            init_wedge,
            init_wedge_tilde,
        },
    };
    if report.hypothesis.passed() && report.min_margin >= -RIGIDITY_ATTACH_THRESHOLD {
        report.rigidity = Some(rigidity_diagnostics(&report, span)?);
    }
    Ok(report)
}

/// Most positive finite-difference slope of `det A(t) / (cs_k + λ̃·sn_k)^{n-1}`.
/// Under the determinant comparison's hypotheses this ratio is nonincreasing,
/// so a passing instance returns a value below `tol`. Points at or beyond the
/// model's vanishing radius are excluded.
pub fn ratio_monotonicity(
    profile: &CurvatureProfile,
    k: f64,
    lambda: f64,
    lambda_tilde: f64,
    steps: usize,
) -> Result<f64> {
    let d = profile.fibre_dimension();
    let operator = InitialOperator::scalar(d, lambda);
    let trajectory = integrate_jacobi(profile, &operator, steps)?;

    let cutoff = space_form_focal_radius(k, lambda_tilde).unwrap_or(f64::INFINITY);
    let mut worst = f64::NEG_INFINITY;
    let mut prev: Option<(f64, f64)> = None;
    for (i, &t) in trajectory.grid().iter().enumerate() {
        if t >= cutoff - 1e-12 {
            break;
        }
        let (sn, cs) = space_form_functions(k, t);
        let q = trajectory.det(i) / (cs + lambda_tilde * sn).powi(d as i32);
        if let Some((tp, qp)) = prev {
            worst = worst.max((q - qp) / (t - tp));
        }
        prev = Some((t, q));
    }
    if worst.is_finite() {
        Ok(worst)
    } else {
        Err(Error::domain(
            "fewer than two grid points precede the model's vanishing radius",
        ))
    }
}

/// The three index-form values of the comparison chain on `[0, t₁]`.
#[derive(Clone, Copy, Debug)]
pub struct ChainReport {
    pub t1: f64,
    /// `I_B(V, V)` for the dominant-side Jacobi field `V(t) = A(t)·v₀`.
    pub i_b_w: f64,
    /// `I_{B₀}(W̄₀, W̄₀)` for the transplanted field `W̄₀(t) = ‖V(t)‖·e₀`.
    pub i_b0_wbar: f64,
    /// `I_{B₀}` of the comparison-side Jacobi field through `W̄₀(t₁)`.
    pub i_b0_w0: f64,
}

/// Evaluates the comparison chain `I_B(V) ≥ I_{B₀}(W̄₀) ≥ I_{B₀}(minimiser)`
/// at a cut time `t₁`.
///
/// `W̄₀` transplants the dominant field's norm onto a parallel unit direction
/// `e₀` of the comparison side, chosen so that `e₀` points along the
/// comparison-side Jacobi field at `t₁`; its derivative samples are the norm
/// derivative `⟨V′, V⟩/‖V‖`. The final value re-solves the comparison-side
/// Jacobi field through the transplanted endpoint, so the last inequality is
/// index minimality and the first two are the curvature and operator bounds
/// in disguise.
pub fn index_chain_check(
    profile: &CurvatureProfile,
    profile_0: &CurvatureProfile,
    operator: &InitialOperator,
    operator_0: &InitialOperator,
    v0: &DVector<f64>,
    t1: f64,
    steps: usize,
) -> Result<ChainReport> {
    if v0.len() != profile.fibre_dimension() {
        return Err(Error::invalid(
            "initial vector does not match the fibre dimension",
        ));
    }
    if v0.norm() <= DIRECTION_NORM_FLOOR {
        return Err(Error::invalid("chain check needs a nonzero initial vector"));
    }
    if !(t1 > 0.0) || t1 > profile.length() * (1.0 + 1e-12) || t1 > profile_0.length() * (1.0 + 1e-12)
    {
        return Err(Error::domain(format!(
            "cut time {t1} outside both geodesic domains"
        )));
    }

    let p = profile.restricted(t1.min(profile.length()))?;
    let p0 = profile_0.restricted(t1.min(profile_0.length()))?;

    let traj = integrate_jacobi(&p, operator, steps)?;
    let field = field_from_trajectory(&traj, v0)?;
    let i_b_w = index_form_sampled(&p, operator, &field)?.total;

    let mut norms = Vec::with_capacity(field.grid().len());
    let mut norm_derivs = Vec::with_capacity(field.grid().len());
    for (v, vp) in field.values().iter().zip(field.derivatives()) {
        let n = v.norm();
        if n <= DIRECTION_NORM_FLOOR {
            return Err(Error::FocalPoint {
                t: field.grid()[norms.len()],
                context: "dominant-side field vanishes inside the chain window".into(),
            });
        }
        norms.push(n);
        norm_derivs.push(vp.dot(v) / n);
    }

    // Direction of the comparison-side Jacobi field at t₁; parallel in the
    // frame model means constant in coordinates.
    let d0 = p0.fibre_dimension();
    let v0_start = if d0 == v0.len() {
        v0.clone()
    } else {
        e1_scaled(d0, v0.norm())
    };
    let traj_0 = integrate_jacobi(&p0, operator_0, steps)?;
    let end_value = traj_0.a(traj_0.steps()) * &v0_start;
    let end_norm = end_value.norm();
    if end_norm <= DIRECTION_NORM_FLOOR {
        return Err(Error::FocalPoint {
            t: t1,
            context: "comparison-side field vanishes at the cut time".into(),
        });
    }
    let e0 = end_value / end_norm;

    let wbar_values: Vec<DVector<f64>> = norms.iter().map(|&n| &e0 * n).collect();
    let wbar_derivs: Vec<DVector<f64>> = norm_derivs.iter().map(|&np| &e0 * np).collect();
    let wbar = SampledField::new(field.grid().to_vec(), wbar_values, wbar_derivs)?;
    let i_b0_wbar = index_form_sampled(&p0, operator_0, &wbar)?.total;

    let endpoint = &e0 * norms[norms.len() - 1];
    let minimiser = jacobi_through_endpoint(&p0, operator_0, &endpoint, steps)?;
    let i_b0_w0 = index_form_sampled(&p0, operator_0, &minimiser)?.total;

    Ok(ChainReport {
        t1,
        i_b_w,
        i_b0_wbar,
        i_b0_w0,
    })
}
