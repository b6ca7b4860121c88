//! Matrix Jacobi equations along a geodesic.
//!
//! The central object is the matrix solution `A(t)` of
//!
//! ```text
//! A″(t) + 𝓡(t)·A(t) = 0,   A(0) = I,   A′(0) = B,
//! ```
//!
//! integrated with a fixed-step classical Runge–Kutta scheme on the first
//! order system `(A, A′)`. Individual Jacobi fields with initial data
//! `V(0) = v, V′(0) = B·v` are recovered as `V(t) = A(t)·v`, and focal points
//! of the initial operator `B` are exactly the zeros of `det A(t)`.

use nalgebra::{DMatrix, DVector};

use crate::curvature::{max_abs_asymmetry, space_form_functions, CurvatureProfile};
use crate::error::{Error, Result};
use crate::tolerances::{DET_ZERO_TOL, FOCAL_BRACKET_TOL, SPACE_FORM_SERIES_SWITCH, SYMMETRY_TOL};

/// Symmetric initial operator `B` with `A′(0) = B`.
///
/// Keeps its eigenvalues alongside the matrix since every hypothesis check
/// needs them, and remembers when it was built as a scalar multiple of the
/// identity.
#[derive(Clone, Debug)]
pub struct InitialOperator {
    matrix: DMatrix<f64>,
    eigenvalues: Vec<f64>,
    scalar: Option<f64>,
}

impl InitialOperator {
    /// `λ·I` on a fibre of dimension `dim`.
    pub fn scalar(dim: usize, lambda: f64) -> Self {
        InitialOperator {
            matrix: DMatrix::identity(dim, dim) * lambda,
            eigenvalues: vec![lambda; dim],
            scalar: Some(lambda),
        }
    }

    /// Wraps a symmetric matrix; asymmetry beyond the tolerance is rejected.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::invalid(format!(
                "initial operator must be square and non-empty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("initial operator has non-finite entries"));
        }
        let asym = max_abs_asymmetry(&matrix);
        if asym > SYMMETRY_TOL {
            return Err(Error::invalid(format!(
                "initial operator is not symmetric: ‖B − Bᵀ‖∞ = {asym:e}"
            )));
        }
        let mut eigenvalues: Vec<f64> = matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        eigenvalues.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        Ok(InitialOperator {
            matrix,
            eigenvalues,
            scalar: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    /// `Some(λ)` when the operator was constructed as `λ·I`.
    pub fn as_scalar(&self) -> Option<f64> {
        self.scalar
    }

    /// Applies the operator to a vector.
    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.matrix * v
    }
}

/// Matrix solution `A(t)` sampled on a uniform grid, together with `A′(t)`.
#[derive(Clone, Debug)]
pub struct JacobiTrajectory {
    grid: Vec<f64>,
    a: Vec<DMatrix<f64>>,
    a_prime: Vec<DMatrix<f64>>,
}

impl JacobiTrajectory {
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Number of integration steps (`grid.len() - 1`).
    pub fn steps(&self) -> usize {
        self.grid.len() - 1
    }

    pub fn step_size(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    pub fn length(&self) -> f64 {
        *self.grid.last().expect("non-empty grid")
    }

    pub fn fibre_dimension(&self) -> usize {
        self.a[0].nrows()
    }

    pub fn a(&self, i: usize) -> &DMatrix<f64> {
        &self.a[i]
    }

    pub fn a_prime(&self, i: usize) -> &DMatrix<f64> {
        &self.a_prime[i]
    }

    /// `det A(t_i)` through an LU factorisation with partial pivoting, so the
    /// sign is reliable near zero crossings.
    pub fn det(&self, i: usize) -> f64 {
        lu_det(&self.a[i])
    }

    /// The Jacobi field `V(t) = A(t)·v` and its derivative sampled on the
    /// grid.
    pub fn field(&self, v: &DVector<f64>) -> (Vec<DVector<f64>>, Vec<DVector<f64>>) {
        let values = self.a.iter().map(|m| m * v).collect();
        let derivs = self.a_prime.iter().map(|m| m * v).collect();
        (values, derivs)
    }

    /// Largest Wronskian defect `‖A′ᵀA − AᵀA′‖∞` over the grid. The quantity
    /// is conserved (and zero) in exact arithmetic whenever `𝓡` and `B` are
    /// symmetric, which makes it a free integration check.
    pub fn wronskian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (a, ap) in self.a.iter().zip(&self.a_prime) {
            let w = ap.transpose() * a - a.transpose() * ap;
            worst = worst.max(w.iter().fold(0.0_f64, |m, v| m.max(v.abs())));
        }
        worst
    }

    /// `(log det A)′(t_i) = trace(A′(t_i)·A(t_i)⁻¹)`.
    pub fn logdet_derivative(&self, i: usize) -> Result<f64> {
        let inv = self.a[i].clone().lu().try_inverse().ok_or(Error::FocalPoint {
            t: self.grid[i],
            context: "matrix solution is singular; log-determinant derivative undefined".into(),
        })?;
        let ap = &self.a_prime[i];
        let d = self.fibre_dimension();
        let mut trace = 0.0;
        for r in 0..d {
            for c in 0..d {
                trace += ap[(r, c)] * inv[(c, r)];
            }
        }
        Ok(trace)
    }
}

fn lu_det(m: &DMatrix<f64>) -> f64 {
    m.clone().lu().determinant()
}

fn check_steps(steps: usize) -> Result<()> {
    if steps < 2 || steps % 2 != 0 {
        return Err(Error::invalid(format!(
            "step count must be an even integer >= 2, got {steps}"
        )));
    }
    Ok(())
}

/// In place `y += alpha·x` for equally shaped matrices.
#[inline]
fn axpy(y: &mut DMatrix<f64>, alpha: f64, x: &DMatrix<f64>) {
    y.zip_apply(x, |yi, xi| *yi += alpha * xi);
}

/// Integrates the matrix Jacobi equation with `steps` fixed RK4 steps over the
/// profile's whole domain.
pub fn integrate_jacobi(
    profile: &CurvatureProfile,
    operator: &InitialOperator,
    steps: usize,
) -> Result<JacobiTrajectory> {
    integrate_jacobi_to(profile, operator, profile.length(), steps)
}

/// Integrates over the subinterval `[0, t_end]`, `t_end ≤ length`. Focal
/// refinement uses this to re-integrate from the start instead of
/// interpolating stored samples.
pub fn integrate_jacobi_to(
    profile: &CurvatureProfile,
    operator: &InitialOperator,
    t_end: f64,
    steps: usize,
) -> Result<JacobiTrajectory> {
    check_steps(steps)?;
    let d = profile.fibre_dimension();
    if operator.dim() != d {
        return Err(Error::invalid(format!(
            "operator dimension {} does not match fibre dimension {d}",
            operator.dim()
        )));
    }
    if !(t_end > 0.0) || t_end > profile.length() * (1.0 + 1e-12) {
        return Err(Error::invalid(format!(
            "integration endpoint {t_end} outside (0, {}]",
            profile.length()
        )));
    }

    let h = t_end / steps as f64;
    let h2 = 0.5 * h;
    let h6 = h / 6.0;

    let mut a = DMatrix::identity(d, d);
    let mut p = operator.matrix().clone();

    let mut grid = Vec::with_capacity(steps + 1);
    let mut a_hist = Vec::with_capacity(steps + 1);
    let mut p_hist = Vec::with_capacity(steps + 1);
    grid.push(0.0);
    a_hist.push(a.clone());
    p_hist.push(p.clone());

    // Stage workspace, allocated once.
    let mut r0 = DMatrix::zeros(d, d);
    let mut rh = DMatrix::zeros(d, d);
    let mut r1 = DMatrix::zeros(d, d);
    let mut k1p = DMatrix::zeros(d, d);
    let mut k2a = DMatrix::zeros(d, d);
    let mut k2p = DMatrix::zeros(d, d);
    let mut k3a = DMatrix::zeros(d, d);
    let mut k3p = DMatrix::zeros(d, d);
    let mut k4a = DMatrix::zeros(d, d);
    let mut k4p = DMatrix::zeros(d, d);
    let mut ya = DMatrix::zeros(d, d);

    for i in 0..steps {
        let t = i as f64 * h;
        profile.eval_into(t.min(t_end), &mut r0)?;
        profile.eval_into((t + h2).min(t_end), &mut rh)?;
        profile.eval_into((t + h).min(t_end), &mut r1)?;

        // k1 = (p, −𝓡(t)·a)
        k1p.gemm(-1.0, &r0, &a, 0.0);

        // k2 = (p + h/2·k1p, −𝓡(t+h/2)·(a + h/2·p))
        ya.copy_from(&a);
        axpy(&mut ya, h2, &p);
        k2p.gemm(-1.0, &rh, &ya, 0.0);
        k2a.copy_from(&p);
        axpy(&mut k2a, h2, &k1p);

        // k3 = (p + h/2·k2p, −𝓡(t+h/2)·(a + h/2·k2a))
        ya.copy_from(&a);
        axpy(&mut ya, h2, &k2a);
        k3p.gemm(-1.0, &rh, &ya, 0.0);
        k3a.copy_from(&p);
        axpy(&mut k3a, h2, &k2p);

        // k4 = (p + h·k3p, −𝓡(t+h)·(a + h·k3a))
        ya.copy_from(&a);
        axpy(&mut ya, h, &k3a);
        k4p.gemm(-1.0, &r1, &ya, 0.0);
        k4a.copy_from(&p);
        axpy(&mut k4a, h, &k3p);

        // a is advanced first because its k1 increment is the *old* p.
        axpy(&mut a, h6, &p);
        axpy(&mut a, 2.0 * h6, &k2a);
        axpy(&mut a, 2.0 * h6, &k3a);
        axpy(&mut a, h6, &k4a);

        axpy(&mut p, h6, &k1p);
        axpy(&mut p, 2.0 * h6, &k2p);
        axpy(&mut p, 2.0 * h6, &k3p);
        axpy(&mut p, h6, &k4p);

        let t_next = if i + 1 == steps { t_end } else { (i + 1) as f64 * h };
        if a.iter().any(|v| !v.is_finite()) || p.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { t: t_next });
        }
        grid.push(t_next);
        a_hist.push(a.clone());
        p_hist.push(p.clone());
    }

    Ok(JacobiTrajectory {
        grid,
        a: a_hist,
        a_prime: p_hist,
    })
}

/// Closed-form scalar Jacobi data on the space form of curvature `k` with
/// initial operator `λ`: returns `(j, j′)` for
/// `j(t) = cs_k(t) + λ·sn_k(t)`.
pub fn space_form_jacobi(k: f64, lambda: f64, t: f64) -> (f64, f64) {
    let (sn, cs) = space_form_functions(k, t);
    (cs + lambda * sn, -k * sn + lambda * cs)
}

/// First zero of `cs_k + λ·sn_k` on `(0, ∞)`, in closed form.
///
/// This is the focal distance of the scalar initial operator `λ` on the space
/// form of curvature `k`; `None` when the solution never vanishes.
pub fn space_form_focal_radius(k: f64, lambda: f64) -> Option<f64> {
    if k.abs() < SPACE_FORM_SERIES_SWITCH {
        return if lambda < 0.0 { Some(-1.0 / lambda) } else { None };
    }
    if k > 0.0 {
        let s = k.sqrt();
        // Zero of cos(s·t) + (λ/s)·sin(s·t): tan(s·t) = −s/λ.
        let theta = if lambda == 0.0 {
            std::f64::consts::FRAC_PI_2
        } else if lambda > 0.0 {
            std::f64::consts::PI - (s / lambda).atan()
        } else {
            (-s / lambda).atan()
        };
        Some(theta / s)
    } else {
        let s = (-k).sqrt();
        // cosh + (λ/s)·sinh vanishes only when tanh(s·t) = −s/λ has a
        // solution in (0, 1), i.e. λ < −s.
        if lambda < -s {
            Some((s / -lambda).atanh() / s)
        } else {
            None
        }
    }
}

/// Result of a focal-point scan over one trajectory.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FocalScan {
    /// First zero of `det A` in `(0, l]`, refined by bisection when a sign
    /// change brackets it.
    pub t_star: Option<f64>,
    /// Set when a near-zero of the determinant was detected without a
    /// bracketing sign change; `t_star` then reports the grid point and the
    /// grid is too coarse to refine it.
    pub resolution_warning: bool,
}

impl FocalScan {
    fn none() -> Self {
        FocalScan {
            t_star: None,
            resolution_warning: false,
        }
    }
}

/// Scans `det A(t)` for its first zero on `(0, l]`.
///
/// Grid sign changes are refined by bisection; every probe re-integrates from
/// `t = 0` with the grid's step density rather than interpolating stored
/// samples, so the refined location inherits the integrator's accuracy.
pub fn first_focal_point(
    profile: &CurvatureProfile,
    operator: &InitialOperator,
    steps: usize,
) -> Result<FocalScan> {
    let traj = integrate_jacobi(profile, operator, steps)?;
    let dets: Vec<f64> = (0..=traj.steps()).map(|i| traj.det(i)).collect();

    let probe = |t: f64| -> Result<f64> {
        // Step count proportional to the probe time keeps the density of the
        // original grid (and stays even).
        let n = ((steps as f64 * t / profile.length()).ceil() as usize).max(2);
        let n = n + n % 2;
        let sub = integrate_jacobi_to(profile, operator, t, n)?;
        Ok(sub.det(sub.steps()))
    };

    let refine = |mut lo: f64, mut hi: f64, det_lo: f64| -> Result<f64> {
        let sign_lo = det_lo.signum();
        while hi - lo > FOCAL_BRACKET_TOL {
            let mid = 0.5 * (lo + hi);
            let dm = probe(mid)?;
            if dm == 0.0 {
                return Ok(mid);
            }
            if dm.signum() == sign_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    };

    for i in 1..dets.len() {
        let d_prev = dets[i - 1];
        let d_here = dets[i];
        if d_here == 0.0 {
            return Ok(FocalScan {
                t_star: Some(traj.grid()[i]),
                resolution_warning: false,
            });
        }
        if d_prev.signum() != d_here.signum() {
            let t = refine(traj.grid()[i - 1], traj.grid()[i], d_prev)?;
            return Ok(FocalScan {
                t_star: Some(t),
                resolution_warning: false,
            });
        }
        if d_here.abs() < DET_ZERO_TOL {
            // Near-zero without a crossing so far. A crossing may still hide
            // between this point and the next; check the neighbour before
            // declaring the grid too coarse.
            if i + 1 < dets.len() && dets[i + 1].signum() != d_prev.signum() {
                let t = refine(traj.grid()[i - 1], traj.grid()[i + 1], d_prev)?;
                return Ok(FocalScan {
                    t_star: Some(t),
                    resolution_warning: false,
                });
            }
            return Ok(FocalScan {
                t_star: Some(traj.grid()[i]),
                resolution_warning: true,
            });
        }
    }

    Ok(FocalScan::none())
}
