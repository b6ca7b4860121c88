//! Curvature data along a unit-speed geodesic.
//!
//! Everything downstream consumes curvature through one interface: a symmetric
//! matrix `𝓡(t)` acting on the orthogonal complement of the velocity in a
//! parallel orthonormal frame. Jacobi fields then satisfy `J″ + 𝓡(t)J = 0`.
//! This module owns
//!
//! - the space-form scalars `sn_k`, `cs_k` solving `y″ + k·y = 0`,
//! - [`CurvatureProfile`], the `t ↦ 𝓡(t)` abstraction,
//! - [`WarpingFunction`], radial profiles `f(ρ)` of rotationally symmetric
//!   metrics `dρ² + f(ρ)²·g_sphere`, including cap extensions,
//! - hypothesis validation (eigenvalue and trace bounds) shared by all
//!   comparison routines.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::tolerances::{
    CAP_CONSISTENCY_TOL, FD_STEP_FACTOR, SPACE_FORM_SERIES_SWITCH, SYMMETRY_TOL,
};

/// Shared scalar callback, cheap to clone.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
/// Shared matrix callback, cheap to clone.
pub type MatrixFn = Arc<dyn Fn(f64) -> DMatrix<f64> + Send + Sync>;

/// Generalised sine and cosine of constant curvature `k`.
///
/// Returns `(sn_k(t), cs_k(t))` where `sn_k` solves `y″ + k·y = 0` with
/// `y(0) = 0, y′(0) = 1` and `cs_k = sn_k′`. For `|k|` below the series switch
/// both are evaluated by a four-term Taylor expansion in `k·t²`, which keeps
/// the pair jointly continuous across `k = 0`.
pub fn space_form_functions(k: f64, t: f64) -> (f64, f64) {
    if k.abs() < SPACE_FORM_SERIES_SWITCH {
        let kt2 = k * t * t;
        let sn = t * (1.0 - kt2 / 6.0 * (1.0 - kt2 / 20.0 * (1.0 - kt2 / 42.0)));
        let cs = 1.0 - kt2 / 2.0 * (1.0 - kt2 / 12.0 * (1.0 - kt2 / 30.0));
        (sn, cs)
    } else if k > 0.0 {
        let s = k.sqrt();
        ((s * t).sin() / s, (s * t).cos())
    } else {
        let s = (-k).sqrt();
        ((s * t).sinh() / s, (s * t).cosh())
    }
}

// ═══════════════════════════════════════════════════════════════════════════
// Warping functions
// ═══════════════════════════════════════════════════════════════════════════

/// Cap geometry attached to a warping function: the profile agrees with
/// `sn_curvature` on `[0, radius]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CapData {
    pub curvature: f64,
    pub radius: f64,
}

/// Radial profile `f(ρ)` of a rotationally symmetric metric on `[0, rho_max]`,
/// with first and second derivatives.
///
/// The radial sectional curvature of the associated metric is `-f″/f`, so the
/// second derivative is part of the contract rather than an afterthought.
#[derive(Clone)]
pub struct WarpingFunction {
    rho_max: f64,
    f: ScalarFn,
    fp: ScalarFn,
    fpp: ScalarFn,
    cap: Option<CapData>,
}

impl fmt::Debug for WarpingFunction {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        out.debug_struct("WarpingFunction")
            .field("rho_max", &self.rho_max)
            .field("cap", &self.cap)
            .finish_non_exhaustive()
    }
}

impl WarpingFunction {
    /// Builds a profile from analytic `f`, `f′`, `f″` callbacks.
    pub fn analytic(rho_max: f64, f: ScalarFn, fp: ScalarFn, fpp: ScalarFn) -> Result<Self> {
        if !(rho_max > 0.0) || !rho_max.is_finite() {
            return Err(Error::invalid(format!(
                "warping domain length must be positive and finite, got {rho_max}"
            )));
        }
        Ok(WarpingFunction {
            rho_max,
            f,
            fp,
            fpp,
            cap: None,
        })
    }

    /// Builds a profile from `f` alone; derivatives are centered finite
    /// differences with step `FD_STEP_FACTOR · rho_max`. The callback must be
    /// evaluable slightly outside `[0, rho_max]` to support the stencil.
    pub fn numeric(rho_max: f64, f: ScalarFn) -> Result<Self> {
        if !(rho_max > 0.0) || !rho_max.is_finite() {
            return Err(Error::invalid(format!(
                "warping domain length must be positive and finite, got {rho_max}"
            )));
        }
        let h = FD_STEP_FACTOR * rho_max;
        let f1 = f.clone();
        let f2 = f.clone();
        let fp: ScalarFn = Arc::new(move |rho| (f1(rho + h) - f1(rho - h)) / (2.0 * h));
        let fpp: ScalarFn = Arc::new(move |rho| (f2(rho + h) - 2.0 * f2(rho) + f2(rho - h)) / (h * h));
        Ok(WarpingFunction {
            rho_max,
            f,
            fp,
            fpp,
            cap: None,
        })
    }

    pub fn rho_max(&self) -> f64 {
        self.rho_max
    }

    pub fn cap(&self) -> Option<CapData> {
        self.cap
    }

    /// Declares that this profile agrees with the space form `sn_curvature`
    /// on `[0, radius]`. The claim is checkable via
    /// [`cap_consistency_defect`], not assumed.
    pub fn with_cap(mut self, cap: CapData) -> Result<Self> {
        if !(cap.radius > 0.0) || cap.radius > self.rho_max + 1e-12 {
            return Err(Error::invalid(format!(
                "cap radius {} outside the warping domain (0, {}]",
                cap.radius, self.rho_max
            )));
        }
        if !cap.curvature.is_finite() {
            return Err(Error::invalid("cap curvature must be finite"));
        }
        self.cap = Some(cap);
        Ok(self)
    }

    fn check_domain(&self, rho: f64) -> Result<()> {
        // Tiny overshoot is tolerated so that quadrature endpoints computed in
        // floating point stay usable.
        let slack = 1e-12 * self.rho_max.max(1.0);
        if !rho.is_finite() || rho < -slack || rho > self.rho_max + slack {
            return Err(Error::domain(format!(
                "rho = {rho} outside warping domain [0, {}]",
                self.rho_max
            )));
        }
        Ok(())
    }

    pub fn eval(&self, rho: f64) -> Result<f64> {
        self.check_domain(rho)?;
        Ok((self.f)(rho))
    }

    pub fn derivative(&self, rho: f64) -> Result<f64> {
        self.check_domain(rho)?;
        Ok((self.fp)(rho))
    }

    pub fn second_derivative(&self, rho: f64) -> Result<f64> {
        self.check_domain(rho)?;
        Ok((self.fpp)(rho))
    }

    /// Radial curvature `-f″(ρ)/f(ρ)`.
    pub fn radial_curvature(&self, rho: f64) -> Result<f64> {
        let f = self.eval(rho)?;
        if f == 0.0 {
            return Err(Error::domain(format!(
                "warping function vanishes at rho = {rho}; radial curvature undefined"
            )));
        }
        Ok(-self.second_derivative(rho)? / f)
    }
}

/// Tail sample resolution for cap extensions. The tail is solved once at this
/// density and then evaluated by cubic Hermite interpolation, keeping the
/// interpolation error orders of magnitude below the integration error.
const CAP_TAIL_STEPS: usize = 8192;

/// Extends the space form of curvature `k_cap` past radius `r` with a tail of
/// prescribed radial curvature.
///
/// The result equals `sn_{k_cap}` on `[0, r]` exactly, and on `(r, rho_max]`
/// solves `f″ = -kappa_tail(ρ)·f` with `C¹` matching at `ρ = r`. The second
/// derivative on the tail is defined through that equation, so the radial
/// curvature of the produced profile is `kappa_tail` by construction.
pub fn build_cap_extension(
    k_cap: f64,
    r: f64,
    kappa_tail: ScalarFn,
    rho_max: f64,
) -> Result<WarpingFunction> {
    if !(r > 0.0) || !(rho_max > r) || !rho_max.is_finite() {
        return Err(Error::invalid(format!(
            "cap extension requires 0 < r < rho_max, got r = {r}, rho_max = {rho_max}"
        )));
    }
    if k_cap > 0.0 {
        let first_zero = std::f64::consts::PI / k_cap.sqrt();
        if r >= first_zero {
            return Err(Error::invalid(format!(
                "cap radius {r} reaches the first zero of sn_{k_cap} at {first_zero}"
            )));
        }
    }

    // Dense RK4 sweep of the tail system (f, f′).
    let steps = CAP_TAIL_STEPS;
    let h = (rho_max - r) / steps as f64;
    let (f0, g0) = space_form_functions(k_cap, r);
    let mut f_samples = Vec::with_capacity(steps + 1);
    let mut g_samples = Vec::with_capacity(steps + 1);
    f_samples.push(f0);
    g_samples.push(g0);
    let rhs = |rho: f64, f: f64, g: f64| (g, -kappa_tail(rho) * f);
    let (mut f, mut g) = (f0, g0);
    for i in 0..steps {
        let rho = r + i as f64 * h;
        let (k1f, k1g) = rhs(rho, f, g);
        let (k2f, k2g) = rhs(rho + 0.5 * h, f + 0.5 * h * k1f, g + 0.5 * h * k1g);
        let (k3f, k3g) = rhs(rho + 0.5 * h, f + 0.5 * h * k2f, g + 0.5 * h * k2g);
        let (k4f, k4g) = rhs(rho + h, f + h * k3f, g + h * k3g);
        f += h / 6.0 * (k1f + 2.0 * k2f + 2.0 * k3f + k4f);
        g += h / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
        if !f.is_finite() || !g.is_finite() {
            return Err(Error::Divergence {
                t: r + (i + 1) as f64 * h,
            });
        }
        f_samples.push(f);
        g_samples.push(g);
    }

    let samples = Arc::new((f_samples, g_samples));
    let kappa = kappa_tail.clone();

    // Hermite evaluation on the stored (value, derivative) samples.
    let tail_eval = {
        let samples = samples.clone();
        move |rho: f64, want_derivative: bool| -> f64 {
            let (fs, gs) = &*samples;
            let x = ((rho - r) / h).clamp(0.0, steps as f64);
            let mut i = x.floor() as usize;
            if i >= steps {
                i = steps - 1;
            }
            let s = x - i as f64;
            let (p0, m0) = (fs[i], gs[i] * h);
            let (p1, m1) = (fs[i + 1], gs[i + 1] * h);
            if want_derivative {
                let dh00 = 6.0 * s * s - 6.0 * s;
                let dh10 = 3.0 * s * s - 4.0 * s + 1.0;
                let dh01 = -dh00;
                let dh11 = 3.0 * s * s - 2.0 * s;
                (dh00 * p0 + dh10 * m0 + dh01 * p1 + dh11 * m1) / h
            } else {
                let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
                let h10 = s * (1.0 - s) * (1.0 - s);
                let h01 = s * s * (3.0 - 2.0 * s);
                let h11 = s * s * (s - 1.0);
                h00 * p0 + h10 * m0 + h01 * p1 + h11 * m1
            }
        }
    };

    let eval_f: ScalarFn = {
        let tail = tail_eval.clone();
        Arc::new(move |rho| {
            if rho <= r {
                space_form_functions(k_cap, rho).0
            } else {
                tail(rho, false)
            }
        })
    };
    let eval_fp: ScalarFn = {
        let tail = tail_eval.clone();
        Arc::new(move |rho| {
            if rho <= r {
                space_form_functions(k_cap, rho).1
            } else {
                tail(rho, true)
            }
        })
    };
    let eval_fpp: ScalarFn = {
        let f = eval_f.clone();
        Arc::new(move |rho| {
            if rho <= r {
                -k_cap * space_form_functions(k_cap, rho).0
            } else {
                -kappa(rho) * f(rho)
            }
        })
    };

    Ok(WarpingFunction {
        rho_max,
        f: eval_f,
        fp: eval_fp,
        fpp: eval_fpp,
        cap: Some(CapData {
            curvature: k_cap,
            radius: r,
        }),
    })
}

// ═══════════════════════════════════════════════════════════════════════════
// Curvature profiles
// ═══════════════════════════════════════════════════════════════════════════

/// The concrete shape of a curvature profile.
#[derive(Clone)]
pub enum ProfileKind {
    /// `𝓡(t) = k·I`.
    Constant(f64),
    /// `𝓡(t) = diag(d_1(t), ..., d_{n-1}(t))`.
    Diagonal(Vec<ScalarFn>),
    /// Radial profile of a rotationally symmetric metric:
    /// `𝓡(t) = -f″(offset + t)/f(offset + t) · I`.
    Warped { warping: WarpingFunction, offset: f64 },
    /// Arbitrary symmetric matrix callback; symmetry is checked on every
    /// evaluation.
    Custom(MatrixFn),
}

impl fmt::Debug for ProfileKind {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileKind::Constant(k) => write!(out, "Constant({k})"),
            ProfileKind::Diagonal(entries) => write!(out, "Diagonal(n-1 = {})", entries.len()),
            ProfileKind::Warped { warping, offset } => {
                write!(out, "Warped(offset = {offset}, {warping:?})")
            }
            ProfileKind::Custom(_) => write!(out, "Custom(..)"),
        }
    }
}

/// Curvature along a unit-speed geodesic segment of length `l` inside an
/// `n`-manifold, exposed as the symmetric operator `𝓡(t)` on the parallel
/// orthogonal complement of the velocity.
#[derive(Clone, Debug)]
pub struct CurvatureProfile {
    n: usize,
    l: f64,
    kind: ProfileKind,
}

fn check_dimension(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::invalid(format!(
            "manifold dimension must be at least 2, got {n}"
        )));
    }
    Ok(())
}

fn check_length(l: f64) -> Result<()> {
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::invalid(format!(
            "geodesic length must be positive and finite, got {l}"
        )));
    }
    Ok(())
}

impl CurvatureProfile {
    pub fn constant(n: usize, l: f64, k: f64) -> Result<Self> {
        check_dimension(n)?;
        check_length(l)?;
        if !k.is_finite() {
            return Err(Error::invalid("curvature constant must be finite"));
        }
        Ok(CurvatureProfile {
            n,
            l,
            kind: ProfileKind::Constant(k),
        })
    }

    /// Diagonal profile; the fibre dimension is `entries.len()`, so the
    /// manifold dimension is `entries.len() + 1`.
    pub fn diagonal(l: f64, entries: Vec<ScalarFn>) -> Result<Self> {
        check_length(l)?;
        if entries.is_empty() {
            return Err(Error::invalid("diagonal profile needs at least one entry"));
        }
        Ok(CurvatureProfile {
            n: entries.len() + 1,
            l,
            kind: ProfileKind::Diagonal(entries),
        })
    }

    /// Diagonal profile with constant entries.
    pub fn diagonal_constant(l: f64, entries: &[f64]) -> Result<Self> {
        let fns = entries
            .iter()
            .map(|&d| -> ScalarFn { Arc::new(move |_| d) })
            .collect();
        Self::diagonal(l, fns)
    }

    /// Radial profile `𝓡(t) = -f″(offset+t)/f(offset+t)·I` of a rotationally
    /// symmetric metric. `[offset, offset + l]` must lie in the warping domain
    /// and `f` must not vanish on it (checked lazily at evaluation).
    pub fn warped(n: usize, l: f64, warping: WarpingFunction, offset: f64) -> Result<Self> {
        check_dimension(n)?;
        check_length(l)?;
        if offset < 0.0 || offset + l > warping.rho_max() + 1e-12 {
            return Err(Error::invalid(format!(
                "geodesic range [{offset}, {}] exceeds warping domain [0, {}]",
                offset + l,
                warping.rho_max()
            )));
        }
        Ok(CurvatureProfile {
            n,
            l,
            kind: ProfileKind::Warped { warping, offset },
        })
    }

    /// Arbitrary matrix profile of fibre dimension `n - 1`.
    pub fn custom(n: usize, l: f64, matrix: MatrixFn) -> Result<Self> {
        check_dimension(n)?;
        check_length(l)?;
        Ok(CurvatureProfile {
            n,
            l,
            kind: ProfileKind::Custom(matrix),
        })
    }

    /// Manifold dimension `n`.
    pub fn dimension(&self) -> usize {
        self.n
    }

    /// Dimension `n - 1` of the space `𝓡(t)` acts on.
    pub fn fibre_dimension(&self) -> usize {
        self.n - 1
    }

    pub fn length(&self) -> f64 {
        self.l
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    /// The same curvature data on the shorter segment `[0, l_new]`.
    pub fn restricted(&self, l_new: f64) -> Result<Self> {
        check_length(l_new)?;
        if l_new > self.l * (1.0 + 1e-12) {
            return Err(Error::invalid(format!(
                "cannot extend a profile of length {} to {l_new}",
                self.l
            )));
        }
        Ok(CurvatureProfile {
            n: self.n,
            l: l_new.min(self.l),
            kind: self.kind.clone(),
        })
    }

    fn check_t(&self, t: f64) -> Result<()> {
        let slack = 1e-12 * self.l.max(1.0);
        if !t.is_finite() || t < -slack || t > self.l + slack {
            return Err(Error::domain(format!(
                "t = {t} outside the geodesic domain [0, {}]",
                self.l
            )));
        }
        Ok(())
    }

    /// Evaluates `𝓡(t)` into `out`, which must already have shape
    /// `(n-1) × (n-1)`. This is the allocation-free path used by integrators.
    pub fn eval_into(&self, t: f64, out: &mut DMatrix<f64>) -> Result<()> {
        self.check_t(t)?;
        let d = self.fibre_dimension();
        debug_assert_eq!(out.nrows(), d);
        debug_assert_eq!(out.ncols(), d);
        match &self.kind {
            ProfileKind::Constant(k) => {
                out.fill(0.0);
                out.fill_diagonal(*k);
            }
            ProfileKind::Diagonal(entries) => {
                out.fill(0.0);
                for (i, entry) in entries.iter().enumerate() {
                    let v = entry(t);
                    if !v.is_finite() {
                        return Err(Error::domain(format!(
                            "diagonal curvature entry {i} is non-finite at t = {t}"
                        )));
                    }
                    out[(i, i)] = v;
                }
            }
            ProfileKind::Warped { warping, offset } => {
                let kappa = warping.radial_curvature(offset + t)?;
                if !kappa.is_finite() {
                    return Err(Error::domain(format!(
                        "radial curvature is non-finite at rho = {}",
                        offset + t
                    )));
                }
                out.fill(0.0);
                out.fill_diagonal(kappa);
            }
            ProfileKind::Custom(matrix) => {
                let m = matrix(t);
                if m.nrows() != d || m.ncols() != d {
                    return Err(Error::invalid(format!(
                        "custom profile returned a {}x{} matrix, expected {d}x{d}",
                        m.nrows(),
                        m.ncols()
                    )));
                }
                let asym = max_abs_asymmetry(&m);
                if !(asym <= SYMMETRY_TOL) {
                    return Err(Error::invalid(format!(
                        "custom profile is not symmetric at t = {t}: ‖M − Mᵀ‖∞ = {asym:e}"
                    )));
                }
                if m.iter().any(|v| !v.is_finite()) {
                    return Err(Error::domain(format!(
                        "custom profile returned non-finite entries at t = {t}"
                    )));
                }
                out.copy_from(&m);
            }
        }
        Ok(())
    }

    /// Evaluates `𝓡(t)` as a fresh matrix.
    pub fn eval(&self, t: f64) -> Result<DMatrix<f64>> {
        let d = self.fibre_dimension();
        let mut out = DMatrix::zeros(d, d);
        self.eval_into(t, &mut out)?;
        Ok(out)
    }
}

pub(crate) fn max_abs_asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

// ═══════════════════════════════════════════════════════════════════════════
// Hypothesis validation
// ═══════════════════════════════════════════════════════════════════════════

/// Which curvature bound a comparison instance must satisfy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HypothesisMode {
    /// Sectional ordering: `λ_max(𝓡(t)) ≤ λ_min(𝓡₀(t))` pointwise and
    /// `λ_min(B) ≥ λ_max(B₀)`. The first pair of arguments is the dominant
    /// side of the norm comparison.
    Sectional,
    /// Trace bound `trace(𝓡(t)) ≥ (n-1)·k` on the first profile and scalar
    /// ordering `λ_max(B) ≤ λ_min(B₀)` against the model operator.
    Ricci(f64),
}

/// One named hypothesis check with its signed margin (negative means failed,
/// up to the tolerance recorded in the report).
#[derive(Clone, Debug)]
pub struct HypothesisCheck {
    pub name: &'static str,
    pub passed: bool,
    /// Worst signed slack observed; the check passes iff `margin ≥ -tol`.
    pub margin: f64,
    /// Grid time where the worst margin occurred, when the check is pointwise.
    pub worst_t: Option<f64>,
}

/// Outcome of [`validate_hypotheses`]: every check with margins, never an
/// error. Violations are data about the instance, not failures of the
/// computation.
#[derive(Clone, Debug)]
pub struct HypothesisReport {
    pub mode: HypothesisMode,
    pub tol: f64,
    pub checks: Vec<HypothesisCheck>,
}

impl HypothesisReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// The check with the smallest margin, if any checks ran.
    pub fn worst(&self) -> Option<&HypothesisCheck> {
        self.checks
            .iter()
            .min_by(|a, b| a.margin.partial_cmp(&b.margin).expect("finite margins"))
    }

    pub(crate) fn push(&mut self, name: &'static str, margin: f64, worst_t: Option<f64>) {
        self.checks.push(HypothesisCheck {
            name,
            passed: margin >= -self.tol,
            margin,
            worst_t,
        });
    }
}

fn eigen_range(m: &DMatrix<f64>) -> (f64, f64) {
    let eig = m.clone().symmetric_eigenvalues();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in eig.iter() {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

/// Checks the curvature and initial-operator hypotheses of a comparison
/// instance on a uniform grid of `grid_points` samples.
///
/// The two profiles must share their length. Both operators are compared by
/// eigenvalue range, so the two sides may have different fibre dimensions.
pub fn validate_hypotheses(
    profile: &CurvatureProfile,
    profile_0: &CurvatureProfile,
    operator: &crate::jacobi::InitialOperator,
    operator_0: &crate::jacobi::InitialOperator,
    mode: HypothesisMode,
    grid_points: usize,
    tol: f64,
) -> Result<HypothesisReport> {
    if grid_points < 2 {
        return Err(Error::invalid("hypothesis grid needs at least 2 points"));
    }
    if (profile.length() - profile_0.length()).abs() > 1e-12 * profile.length().max(1.0) {
        return Err(Error::invalid(format!(
            "profiles have different lengths: {} vs {}",
            profile.length(),
            profile_0.length()
        )));
    }
    if operator.dim() != profile.fibre_dimension() {
        return Err(Error::invalid(
            "first operator dimension does not match its profile",
        ));
    }
    if operator_0.dim() != profile_0.fibre_dimension() {
        return Err(Error::invalid(
            "second operator dimension does not match its profile",
        ));
    }

    let l = profile.length();
    let mut report = HypothesisReport {
        mode,
        tol,
        checks: Vec::new(),
    };

    let mut worst_margin = f64::INFINITY;
    let mut worst_t = 0.0;
    let mut r = DMatrix::zeros(profile.fibre_dimension(), profile.fibre_dimension());
    let mut r0 = DMatrix::zeros(profile_0.fibre_dimension(), profile_0.fibre_dimension());
    for i in 0..grid_points {
        let t = l * i as f64 / (grid_points - 1) as f64;
        profile.eval_into(t, &mut r)?;
        let margin = match mode {
            HypothesisMode::Sectional => {
                profile_0.eval_into(t, &mut r0)?;
                let (_, hi) = eigen_range(&r);
                let (lo0, _) = eigen_range(&r0);
                lo0 - hi
            }
            HypothesisMode::Ricci(k) => r.trace() - (profile.dimension() - 1) as f64 * k,
        };
        if margin < worst_margin {
            worst_margin = margin;
            worst_t = t;
        }
    }
    report.push("curvature_bound", worst_margin, Some(worst_t));

    let op_margin = match mode {
        HypothesisMode::Sectional => operator.min_eigenvalue() - operator_0.max_eigenvalue(),
        HypothesisMode::Ricci(_) => operator_0.min_eigenvalue() - operator.max_eigenvalue(),
    };
    report.push("initial_operator", op_margin, None);

    Ok(report)
}

/// Verifies that a cap-extended warping function agrees with its space form on
/// the cap. Returns the worst deviation over `samples` probe points.
pub fn cap_consistency_defect(w: &WarpingFunction, samples: usize) -> Result<f64> {
    let cap = w
        .cap()
        .ok_or_else(|| Error::invalid("warping function carries no cap data"))?;
    let mut worst: f64 = 0.0;
    for i in 0..=samples {
        let rho = cap.radius * i as f64 / samples as f64;
        let (sn, _) = space_form_functions(cap.curvature, rho);
        worst = worst.max((w.eval(rho)? - sn).abs());
    }
    Ok(worst)
}

/// Convenience wrapper asserting cap consistency within the standard budget.
pub fn check_cap_consistency(w: &WarpingFunction) -> Result<()> {
    let defect = cap_consistency_defect(w, 64)?;
    if defect > CAP_CONSISTENCY_TOL {
        return Err(Error::Inconsistent(format!(
            "cap region deviates from its space form by {defect:e}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::InitialOperator;
    use approx::assert_relative_eq;

    #[test]
    fn space_form_round_values() {
        let (sn, cs) = space_form_functions(1.0, std::f64::consts::FRAC_PI_2);
        assert_relative_eq!(sn, 1.0, max_relative = 1e-15);
        assert!(cs.abs() < 1e-15);

        let (sn, cs) = space_form_functions(0.0, 2.5);
        assert_eq!(sn, 2.5);
        assert_eq!(cs, 1.0);

        let (sn, cs) = space_form_functions(-1.0, 1.0);
        assert_relative_eq!(sn, 1.1752011936438014, max_relative = 1e-15);
        assert_relative_eq!(cs, 1.5430806348152437, max_relative = 1e-15);
    }

    #[test]
    fn space_form_series_branch_is_continuous() {
        for &k in &[1e-13, -1e-13, 1e-15, 0.0] {
            for &t in &[0.3, 1.0, 3.0] {
                let (sn, cs) = space_form_functions(k, t);
                assert!((sn - t).abs() <= 1e-8, "sn_{k}({t}) = {sn}");
                assert!((cs - 1.0).abs() <= 1e-8);
            }
        }
        // Across the switch the two branches must agree to near roundoff.
        for &k in &[SPACE_FORM_SERIES_SWITCH * 1.01, -SPACE_FORM_SERIES_SWITCH * 1.01] {
            let (sn_trig, cs_trig) = space_form_functions(k, 2.0);
            let (sn_ser, cs_ser) = space_form_functions(k * 0.99, 2.0);
            assert!((sn_trig - sn_ser).abs() < 1e-12);
            assert!((cs_trig - cs_ser).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_profile_evaluates_to_scaled_identity() {
        let p = CurvatureProfile::constant(3, 2.0, 1.0).unwrap();
        let m = p.eval(0.7).unwrap();
        assert_eq!(m, DMatrix::identity(2, 2));
    }

    #[test]
    fn diagonal_profile_evaluates_entrywise() {
        let p = CurvatureProfile::diagonal(
            1.0,
            vec![
                Arc::new(|t: f64| t) as ScalarFn,
                Arc::new(|t: f64| 2.0 * t) as ScalarFn,
            ],
        )
        .unwrap();
        let m = p.eval(0.5).unwrap();
        assert_eq!(m[(0, 0)], 0.5);
        assert_eq!(m[(1, 1)], 1.0);
        assert_eq!(m[(0, 1)], 0.0);
    }

    #[test]
    fn warped_sine_profile_recovers_unit_curvature() {
        let w = WarpingFunction::analytic(
            3.0,
            Arc::new(|r: f64| r.sin()),
            Arc::new(|r: f64| r.cos()),
            Arc::new(|r: f64| -r.sin()),
        )
        .unwrap();
        let p = CurvatureProfile::warped(2, 1.5, w, 0.5).unwrap();
        let m = p.eval(1.0).unwrap();
        assert_eq!(m.nrows(), 1);
        assert_relative_eq!(m[(0, 0)], 1.0, max_relative = 1e-12);
    }

    #[test]
    fn out_of_domain_evaluation_is_rejected() {
        let p = CurvatureProfile::constant(2, 1.0, 0.5).unwrap();
        assert!(matches!(p.eval(1.5), Err(Error::Domain(_))));
        assert!(matches!(p.eval(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn asymmetric_custom_profile_is_rejected() {
        let p = CurvatureProfile::custom(
            3,
            1.0,
            Arc::new(|_t| DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0])),
        )
        .unwrap();
        assert!(matches!(p.eval(0.5), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn sectional_hypotheses_flat_vs_sphere() {
        let flat = CurvatureProfile::constant(3, 1.5, 0.0).unwrap();
        let sphere = CurvatureProfile::constant(3, 1.5, 1.0).unwrap();
        let zero = InitialOperator::scalar(2, 0.0);
        let report = validate_hypotheses(
            &flat,
            &sphere,
            &zero,
            &zero,
            HypothesisMode::Sectional,
            33,
            1e-9,
        )
        .unwrap();
        assert!(report.passed());
        let curv = &report.checks[0];
        assert_eq!(curv.name, "curvature_bound");
        assert_relative_eq!(curv.margin, 1.0, max_relative = 1e-14);

        // Swapping the sides must fail with the mirrored margin.
        let report = validate_hypotheses(
            &sphere,
            &flat,
            &zero,
            &zero,
            HypothesisMode::Sectional,
            33,
            1e-9,
        )
        .unwrap();
        assert!(!report.passed());
        assert_relative_eq!(report.checks[0].margin, -1.0, max_relative = 1e-14);
    }

    #[test]
    fn ricci_trace_bound_on_diagonal_profile() {
        let p = CurvatureProfile::diagonal_constant(1.0, &[0.5, 1.5]).unwrap();
        let model = CurvatureProfile::constant(3, 1.0, 1.0).unwrap();
        let lam = InitialOperator::scalar(2, 0.0);
        let lam0 = InitialOperator::scalar(2, 0.0);
        let report = validate_hypotheses(
            &p,
            &model,
            &lam,
            &lam0,
            HypothesisMode::Ricci(1.0),
            17,
            1e-9,
        )
        .unwrap();
        assert!(report.passed());
        assert!(report.checks[0].margin.abs() <= 1e-14);
    }

    #[test]
    fn cap_extension_with_matching_tail_reproduces_sine() {
        let w = build_cap_extension(1.0, 0.5, Arc::new(|_| 1.0), 2.0).unwrap();
        for i in 0..=40 {
            let rho = 2.0 * i as f64 / 40.0;
            assert!(
                (w.eval(rho).unwrap() - rho.sin()).abs() < 1e-9,
                "f({rho}) deviates from sin"
            );
            assert!((w.derivative(rho).unwrap() - rho.cos()).abs() < 1e-8);
        }
        check_cap_consistency(&w).unwrap();
    }

    #[test]
    fn cap_extension_with_flat_tail_is_linear() {
        let w = build_cap_extension(1.0, 0.5, Arc::new(|_| 0.0), 3.0).unwrap();
        let (s, c) = (0.5f64.sin(), 0.5f64.cos());
        for i in 0..=30 {
            let rho = 0.5 + 2.5 * i as f64 / 30.0;
            let expected = s + c * (rho - 0.5);
            assert!((w.eval(rho).unwrap() - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn cap_extension_tail_curvature_matches_prescription() {
        let w = build_cap_extension(1.0, 0.5, Arc::new(|_| 0.25), 3.0).unwrap();
        for i in 1..=20 {
            let rho = 0.5 + 2.5 * i as f64 / 20.0;
            let kappa = w.radial_curvature(rho).unwrap();
            assert!(
                (kappa - 0.25).abs() < 1e-12,
                "tail curvature {kappa} at rho = {rho}"
            );
        }
    }

    #[test]
    fn cap_extension_against_fine_reference_integration() {
        // Independent check of the dense-sample + Hermite evaluation: a plain
        // fixed-step RK4 at 10^6 steps on the same tail equation.
        let kappa = 0.25;
        let w = build_cap_extension(1.0, 0.5, Arc::new(move |_| kappa), 3.0).unwrap();
        let (mut f, mut g) = (0.5f64.sin(), 0.5f64.cos());
        let steps = 1_000_000usize;
        let h = 2.5 / steps as f64;
        for _ in 0..steps {
            let acc = |f: f64| -kappa * f;
            let (k1f, k1g) = (g, acc(f));
            let (k2f, k2g) = (g + 0.5 * h * k1g, acc(f + 0.5 * h * k1f));
            let (k3f, k3g) = (g + 0.5 * h * k2g, acc(f + 0.5 * h * k2f));
            let (k4f, k4g) = (g + h * k3g, acc(f + h * k3f));
            f += h / 6.0 * (k1f + 2.0 * k2f + 2.0 * k3f + k4f);
            g += h / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
        }
        assert!((w.eval(3.0).unwrap() - f).abs() < 1e-10);
        assert!((w.derivative(3.0).unwrap() - g).abs() < 1e-10);
    }

    #[test]
    fn numeric_derivatives_track_analytic_ones() {
        let w = WarpingFunction::numeric(2.0, Arc::new(|r: f64| r.sin())).unwrap();
        for i in 1..20 {
            let rho = 2.0 * i as f64 / 20.0;
            assert!((w.derivative(rho).unwrap() - rho.cos()).abs() < 1e-8);
            assert!((w.second_derivative(rho).unwrap() + rho.sin()).abs() < 1e-5);
        }
    }
}
