//! Central numerical tolerances.
//!
//! Every hard-coded threshold used by the library lives here so the trade-offs
//! are visible in one place. Values are grouped by the role they play rather
//! than by the module that consumes them.

// ═══════════════════════════════════════════════════════════════════════════
// Input validation
// ═══════════════════════════════════════════════════════════════════════════

/// Maximum entrywise asymmetry `‖M − Mᵀ‖∞` accepted for curvature matrices and
/// initial operators. Anything worse is rejected as invalid input rather than
/// silently symmetrised.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// `|k|` below this switches the space-form scalars `sn_k`, `cs_k` to their
/// series expansion. The series truncation error at this magnitude is far
/// below f64 roundoff for arguments up to a few units.
pub const SPACE_FORM_SERIES_SWITCH: f64 = 1e-12;

// ═══════════════════════════════════════════════════════════════════════════
// Focal-point detection
// ═══════════════════════════════════════════════════════════════════════════

/// `|det A(t)|` at a grid point below this counts as a zero crossing even when
/// no sign change brackets it (tangential or under-resolved root).
pub const DET_ZERO_TOL: f64 = 1e-12;

/// Bisection terminates once the bracket width shrinks below this.
pub const FOCAL_BRACKET_TOL: f64 = 1e-10;

// ═══════════════════════════════════════════════════════════════════════════
// Invariant monitoring
// ═══════════════════════════════════════════════════════════════════════════

/// Conserved-quantity budget for the Wronskian `‖A′ᵀA − AᵀA′‖∞` along a
/// trajectory; exceeding it flags the integration as untrustworthy.
pub const WRONSKIAN_TOL: f64 = 1e-8;

/// Default slack for hypothesis checks (eigenvalue orderings, trace bounds).
/// These compare exactly representable quantities in the common case, so the
/// slack only absorbs eigenvalue-solver roundoff.
pub const HYPOTHESIS_TOL: f64 = 1e-9;

/// A comparison report whose worst margin is below this attaches equality
/// diagnostics, since the instance sits numerically on the rigidity boundary.
pub const RIGIDITY_ATTACH_THRESHOLD: f64 = 1e-6;

/// Agreement required between a closed-form evaluation and its redundant
/// numerically integrated counterpart inside a single operation.
pub const DUAL_ROUTE_TOL: f64 = 1e-8;

// ═══════════════════════════════════════════════════════════════════════════
// Model solves and model consistency
// ═══════════════════════════════════════════════════════════════════════════

/// Bracket width at which the monotone bisection for the model radius stops.
pub const MODEL_RADIUS_TOL: f64 = 1e-12;

/// Allowed deviation of a cap-extended warping function from the exact
/// space-form profile on the cap region.
pub const CAP_CONSISTENCY_TOL: f64 = 1e-9;

/// Relative step, scaled by the domain length, for centered finite-difference
/// derivatives of warping functions supplied without analytic derivatives.
pub const FD_STEP_FACTOR: f64 = 1e-5;

/// Vector norms below this are treated as zero when normalising field
/// directions (parallelism and curvature diagnostics).
pub const DIRECTION_NORM_FLOOR: f64 = 1e-14;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerances_are_positive() {
        for &tol in &[
            SYMMETRY_TOL,
            SPACE_FORM_SERIES_SWITCH,
            DET_ZERO_TOL,
            FOCAL_BRACKET_TOL,
            WRONSKIAN_TOL,
            HYPOTHESIS_TOL,
            RIGIDITY_ATTACH_THRESHOLD,
            DUAL_ROUTE_TOL,
            MODEL_RADIUS_TOL,
            CAP_CONSISTENCY_TOL,
            FD_STEP_FACTOR,
            DIRECTION_NORM_FLOOR,
        ] {
            assert!(tol > 0.0 && tol.is_finite());
        }
    }

    #[test]
    fn detection_tolerances_are_ordered() {
        // A bracketed bisection must terminate strictly tighter than the
        // near-zero detection that feeds it, and both sit far below the
        // conserved-quantity budget.
        assert!(FOCAL_BRACKET_TOL < WRONSKIAN_TOL);
        assert!(DET_ZERO_TOL < FOCAL_BRACKET_TOL);
        assert!(MODEL_RADIUS_TOL <= DET_ZERO_TOL);
    }
}
