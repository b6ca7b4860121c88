//! Index forms of vector fields along a geodesic.
//!
//! For a field `Z` on `[0, l]` with `Z(0)` in the domain of the initial
//! operator `B`, the index form evaluated here is
//!
//! ```text
//! I_B(Z, Z) = ⟨B·Z(0), Z(0)⟩ + ∫₀ˡ (‖Z′‖² − ⟨𝓡(t)Z, Z⟩) dt,
//! ```
//!
//! plus `a²·l + a·b` when the field carries a tangential component
//! `(a·t + b)·γ′`; with that convention the endpoint identity
//! `I_B(V, V) = ⟨V′(l), V(l)⟩` holds for full Jacobi fields, tangential part
//! included.
//!
//! Two field representations are supported: node samples of a smooth field
//! together with derivative samples (Simpson quadrature), and piecewise-linear
//! fields (exact element integrals for the derivative energy, Simpson on each
//! element for the curvature term). Minimising the piecewise-linear form over
//! the interior nodes is a symmetric positive definite solve; loss of positive
//! definiteness is reported as focal-point evidence, not papered over.

use nalgebra::{DMatrix, DVector};

use crate::curvature::CurvatureProfile;
use crate::error::{Error, Result};
use crate::jacobi::{first_focal_point, integrate_jacobi, InitialOperator};

/// Composite Simpson rule over uniformly spaced samples (even interval count).
pub fn composite_simpson(h: f64, values: &[f64]) -> Result<f64> {
    if values.len() < 3 || values.len() % 2 == 0 {
        return Err(Error::GridMismatch(format!(
            "Simpson quadrature needs an odd sample count >= 3, got {}",
            values.len()
        )));
    }
    let n = values.len() - 1;
    let mut acc = values[0] + values[n];
    for (i, &v) in values.iter().enumerate().take(n).skip(1) {
        acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    Ok(acc * h / 3.0)
}

/// Piecewise-linear field: node values on a uniform grid over `[0, l]` with an
/// even number of elements, an optional tangential component `(a·t + b)·γ′`.
#[derive(Clone, Debug)]
pub struct PiecewiseField {
    grid: Vec<f64>,
    values: Vec<DVector<f64>>,
    tangential: (f64, f64),
}

impl PiecewiseField {
    /// Builds the field from node values; `values.len()` must be odd (even
    /// element count) and at least 3, all of one dimension.
    pub fn new(l: f64, values: Vec<DVector<f64>>, tangential: (f64, f64)) -> Result<Self> {
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::invalid("field domain length must be positive"));
        }
        if values.len() < 3 || values.len() % 2 == 0 {
            return Err(Error::invalid(format!(
                "piecewise field needs an odd node count >= 3, got {}",
                values.len()
            )));
        }
        let dim = values[0].len();
        if dim == 0 || values.iter().any(|v| v.len() != dim) {
            return Err(Error::invalid("field nodes must share a nonzero dimension"));
        }
        if values.iter().any(|v| v.iter().any(|x| !x.is_finite())) {
            return Err(Error::invalid("field nodes must be finite"));
        }
        let n = values.len() - 1;
        let grid = (0..=n).map(|i| l * i as f64 / n as f64).collect();
        Ok(PiecewiseField {
            grid,
            values,
            tangential,
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[DVector<f64>] {
        &self.values
    }

    pub fn tangential(&self) -> (f64, f64) {
        self.tangential
    }

    pub fn dim(&self) -> usize {
        self.values[0].len()
    }

    pub fn length(&self) -> f64 {
        *self.grid.last().expect("non-empty grid")
    }

    pub fn elements(&self) -> usize {
        self.grid.len() - 1
    }

    /// Linear interpolation; exact at the nodes.
    pub fn eval(&self, t: f64) -> Result<DVector<f64>> {
        let l = self.length();
        if !t.is_finite() || t < -1e-12 || t > l * (1.0 + 1e-12) {
            return Err(Error::domain(format!("t = {t} outside [0, {l}]")));
        }
        let n = self.elements();
        let x = (t / l * n as f64).clamp(0.0, n as f64);
        let i = (x.floor() as usize).min(n - 1);
        // Node hits bypass interpolation; the index arithmetic can land on
        // either side of an inexactly stored node.
        if t == self.grid[i] {
            return Ok(self.values[i].clone());
        }
        if t == self.grid[i + 1] {
            return Ok(self.values[i + 1].clone());
        }
        let s = x - i as f64;
        Ok(&self.values[i] * (1.0 - s) + &self.values[i + 1] * s)
    }

    pub fn endpoint(&self) -> &DVector<f64> {
        self.values.last().expect("non-empty values")
    }
}

/// Node samples of a smooth field together with derivative samples, on a
/// uniform grid with an even interval count.
#[derive(Clone, Debug)]
pub struct SampledField {
    grid: Vec<f64>,
    values: Vec<DVector<f64>>,
    derivatives: Vec<DVector<f64>>,
}

impl SampledField {
    pub fn new(
        grid: Vec<f64>,
        values: Vec<DVector<f64>>,
        derivatives: Vec<DVector<f64>>,
    ) -> Result<Self> {
        if grid.len() < 3 || grid.len() % 2 == 0 {
            return Err(Error::invalid(format!(
                "sampled field needs an odd node count >= 3, got {}",
                grid.len()
            )));
        }
        if values.len() != grid.len() || derivatives.len() != grid.len() {
            return Err(Error::GridMismatch(
                "value and derivative sample counts must match the grid".into(),
            ));
        }
        let dim = values[0].len();
        if values
            .iter()
            .chain(derivatives.iter())
            .any(|v| v.len() != dim)
        {
            return Err(Error::invalid("field samples must share one dimension"));
        }
        Ok(SampledField {
            grid,
            values,
            derivatives,
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[DVector<f64>] {
        &self.values
    }

    pub fn derivatives(&self) -> &[DVector<f64>] {
        &self.derivatives
    }

    pub fn dim(&self) -> usize {
        self.values[0].len()
    }

    pub fn length(&self) -> f64 {
        *self.grid.last().expect("non-empty grid")
    }
}

/// Decomposition of an evaluated index form.
#[derive(Clone, Copy, Debug)]
pub struct IndexFormReport {
    pub total: f64,
    pub boundary_term: f64,
    pub integral_term: f64,
    /// Contribution `a²·l + a·b` of the tangential component, zero for purely
    /// orthogonal fields.
    pub tangential_term: f64,
    pub grid_steps: usize,
}

fn check_profile_operator(
    profile: &CurvatureProfile,
    operator: &InitialOperator,
    field_dim: usize,
    field_len: f64,
) -> Result<()> {
    if operator.dim() != profile.fibre_dimension() {
        return Err(Error::invalid(
            "operator dimension does not match the profile",
        ));
    }
    if field_dim != profile.fibre_dimension() {
        return Err(Error::GridMismatch(format!(
            "field dimension {field_dim} does not match fibre dimension {}",
            profile.fibre_dimension()
        )));
    }
    if field_len > profile.length() * (1.0 + 1e-12) {
        return Err(Error::GridMismatch(format!(
            "field domain [0, {field_len}] exceeds the profile domain [0, {}]",
            profile.length()
        )));
    }
    Ok(())
}

/// Index form of a sampled smooth field via composite Simpson quadrature on
/// the integrand `‖Z′‖² − ⟨𝓡Z, Z⟩`.
pub fn index_form_sampled(
    profile: &CurvatureProfile,
    operator: &InitialOperator,
    field: &SampledField,
) -> Result<IndexFormReport> {
    check_profile_operator(profile, operator, field.dim(), field.length())?;
    let n = field.grid().len() - 1;
    let h = field.grid()[1] - field.grid()[0];

    let mut integrand = Vec::with_capacity(n + 1);
    let d = profile.fibre_dimension();
    let mut r = DMatrix::zeros(d, d);
    for i in 0..=n {
        let t = field.grid()[i];
        profile.eval_into(t, &mut r)?;
        let z = &field.values()[i];
        let zp = &field.derivatives()[i];
        integrand.push(zp.norm_squared() - (&r * z).dot(z));
    }
    let integral_term = composite_simpson(h, &integrand)?;
    let z0 = &field.values()[0];
    let boundary_term = operator.apply(z0).dot(z0);
    Ok(IndexFormReport {
        total: boundary_term + integral_term,
        boundary_term,
        integral_term,
        tangential_term: 0.0,
        grid_steps: n,
    })
}

/// Index form of a piecewise-linear field.
///
/// Derivative energy is integrated exactly (the derivative is constant per
/// element); the curvature term uses Simpson on each element with the linear
/// interpolant at the midpoint.
pub fn index_form_piecewise(
    profile: &CurvatureProfile,
    operator: &InitialOperator,
    field: &PiecewiseField,
) -> Result<IndexFormReport> {
    check_profile_operator(profile, operator, field.dim(), field.length())?;
    let n = field.elements();
    let h = field.grid()[1] - field.grid()[0];
    let d = profile.fibre_dimension();

    let mut r_lo = DMatrix::zeros(d, d);
    let mut r_mid = DMatrix::zeros(d, d);
    let mut r_hi = DMatrix::zeros(d, d);

    let mut integral_term = 0.0;
    for e in 0..n {
        let (t0, t1) = (field.grid()[e], field.grid()[e + 1]);
        let v0 = &field.values()[e];
        let v1 = &field.values()[e + 1];
        integral_term += (v1 - v0).norm_squared() / h;

        profile.eval_into(t0, &mut r_lo)?;
        profile.eval_into(0.5 * (t0 + t1), &mut r_mid)?;
        profile.eval_into(t1, &mut r_hi)?;
        let mid = 0.5 * (v0 + v1);
        let q0 = (&r_lo * v0).dot(v0);
        let qm = (&r_mid * &mid).dot(&mid);
        let q1 = (&r_hi * v1).dot(v1);
        integral_term -= h / 6.0 * (q0 + 4.0 * qm + q1);
    }

    let z0 = &field.values()[0];
    let boundary_term = operator.apply(z0).dot(z0);
    let (a, b) = field.tangential();
    let tangential_term = a * a * field.length() + a * b;
    Ok(IndexFormReport {
        total: boundary_term + integral_term + tangential_term,
        boundary_term,
        integral_term,
        tangential_term,
        grid_steps: n,
    })
}

/// The Jacobi field `V` with `V′(0) = B·V(0)` hitting a prescribed endpoint
/// `V(l) = w`, sampled on the integration grid.
///
/// Requires the interval to be free of focal points; otherwise the matrix
/// solution is singular somewhere and the construction is reported as blocked
/// at the first such point.
pub fn jacobi_through_endpoint(
    profile: &CurvatureProfile,
    operator: &InitialOperator,
    w: &DVector<f64>,
    steps: usize,
) -> Result<SampledField> {
    if w.len() != profile.fibre_dimension() {
        return Err(Error::invalid(format!(
            "endpoint dimension {} does not match fibre dimension {}",
            w.len(),
            profile.fibre_dimension()
        )));
    }
    let scan = first_focal_point(profile, operator, steps)?;
    if let Some(t) = scan.t_star {
        return Err(Error::FocalPoint {
            t,
            context: "no Jacobi field through the endpoint: focal point inside the interval"
                .into(),
        });
    }

    let traj = integrate_jacobi(profile, operator, steps)?;
    let last = traj.steps();
    let coeff = traj
        .a(last)
        .clone()
        .lu()
        .solve(w)
        .ok_or(Error::FocalPoint {
            t: traj.length(),
            context: "endpoint matrix is numerically singular".into(),
        })?;
    let (values, derivatives) = traj.field(&coeff);
    SampledField::new(traj.grid().to_vec(), values, derivatives)
}

/// Result of the discrete index minimisation.
#[derive(Clone, Debug)]
pub struct IndexMinimum {
    pub minimizer: PiecewiseField,
    pub value: f64,
}

/// Minimises the index form over piecewise-linear fields with fixed endpoint
/// `w` and free initial value, on a uniform grid with `n_nodes` nodes
/// (`n_nodes` odd, ≥ 3).
///
/// The discrete form is assembled exactly as [`index_form_piecewise`]
/// evaluates it, so the reported minimum value and the quadrature agree to
/// roundoff. A failed Cholesky factorisation means the quadratic form is not
/// positive definite on the discrete space, which is numerical evidence of a
/// focal point inside the interval and is reported as such.
pub fn minimize_index(
    profile: &CurvatureProfile,
    operator: &InitialOperator,
    w: &DVector<f64>,
    n_nodes: usize,
) -> Result<IndexMinimum> {
    if n_nodes < 3 || n_nodes % 2 == 0 {
        return Err(Error::invalid(format!(
            "node count must be odd and >= 3, got {n_nodes}"
        )));
    }
    let d = profile.fibre_dimension();
    if operator.dim() != d || w.len() != d {
        return Err(Error::invalid(
            "operator and endpoint must match the profile dimension",
        ));
    }
    let n = n_nodes - 1;
    let l = profile.length();
    let h = l / n as f64;

    // Full symmetric form over all nodes, then the last node is pinned to w.
    let dofs = n_nodes * d;
    let mut k = DMatrix::zeros(dofs, dofs);

    let mut r_lo = DMatrix::zeros(d, d);
    let mut r_mid = DMatrix::zeros(d, d);
    let mut r_hi = DMatrix::zeros(d, d);
    let block = |node: usize| node * d;

    for e in 0..n {
        let (t0, t1) = (e as f64 * h, (e + 1) as f64 * h);
        profile.eval_into(t0, &mut r_lo)?;
        profile.eval_into(0.5 * (t0 + t1), &mut r_mid)?;
        profile.eval_into(t1, &mut r_hi)?;

        // Derivative energy (u − v)·(u − v)/h and Simpson curvature term
        // (h/6)·[uᵀ(R₀+R_m)u + 2uᵀR_m v + vᵀ(R₁+R_m)v], subtracted.
        for i in 0..d {
            k[(block(e) + i, block(e) + i)] += 1.0 / h;
            k[(block(e + 1) + i, block(e + 1) + i)] += 1.0 / h;
            k[(block(e) + i, block(e + 1) + i)] -= 1.0 / h;
            k[(block(e + 1) + i, block(e) + i)] -= 1.0 / h;
            for j in 0..d {
                k[(block(e) + i, block(e) + j)] -= h / 6.0 * (r_lo[(i, j)] + r_mid[(i, j)]);
                k[(block(e + 1) + i, block(e + 1) + j)] -=
                    h / 6.0 * (r_hi[(i, j)] + r_mid[(i, j)]);
                k[(block(e) + i, block(e + 1) + j)] -= h / 6.0 * r_mid[(i, j)];
                k[(block(e + 1) + i, block(e) + j)] -= h / 6.0 * r_mid[(j, i)];
            }
        }
    }
    for i in 0..d {
        for j in 0..d {
            k[(i, j)] += operator.matrix()[(i, j)];
        }
    }

    // Partition: x = free nodes 0..n-1, pinned node n = w.
    let free = n * d;
    let k_ff = k.view((0, 0), (free, free)).into_owned();
    let k_fp = k.view((0, free), (free, d)).into_owned();
    let k_pp = k.view((free, free), (d, d)).into_owned();

    let chol = nalgebra::Cholesky::new(k_ff).ok_or_else(|| {
        Error::NotPositiveDefinite(
            "discrete index form is not positive definite on the free nodes; \
             the interval contains a focal point of the initial operator"
                .to_string(),
        )
    })?;
    let rhs = -(&k_fp * w);
    let x = chol.solve(&rhs);

    // I(x) = xᵀK_ff x + 2 xᵀK_fp w + wᵀK_pp w; at the stationary point the
    // first term collapses against half the second.
    let value = x.dot(&(&k_fp * w)) + (&k_pp * w).dot(w);

    let mut values = Vec::with_capacity(n_nodes);
    for node in 0..n {
        values.push(DVector::from_fn(d, |i, _| x[block(node) + i]));
    }
    values.push(w.clone());
    let minimizer = PiecewiseField::new(l, values, (0.0, 0.0))?;
    Ok(IndexMinimum { minimizer, value })
}

/// Residual of the endpoint identity `I_B(V, V) = ⟨V′(l), V(l)⟩` for the
/// Jacobi field through a prescribed endpoint, with the index form evaluated
/// by quadrature. Exact in exact arithmetic; the residual measures the
/// combined integration and quadrature error.
pub fn boundary_identity_residual(
    profile: &CurvatureProfile,
    operator: &InitialOperator,
    w: &DVector<f64>,
    steps: usize,
) -> Result<f64> {
    let field = jacobi_through_endpoint(profile, operator, w, steps)?;
    let report = index_form_sampled(profile, operator, &field)?;
    let last = field.grid().len() - 1;
    let endpoint_pairing = field.derivatives()[last].dot(&field.values()[last]);
    Ok((report.total - endpoint_pairing).abs())
}
