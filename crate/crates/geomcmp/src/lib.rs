//! Numerical comparison geometry along a single geodesic.
//!
//! The crate models a unit-speed geodesic through its curvature operator
//! `𝓡(t)` in a parallel orthonormal frame, integrates the matrix Jacobi
//! equation `A″ + 𝓡(t)·A = 0` with operator-coupled initial data
//! `A(0) = I, A′(0) = B`, and builds verification machinery on top:
//!
//! - [`curvature`]: curvature profiles (constant, diagonal, warped, custom),
//!   space-form scalars `sn_k`/`cs_k`, warping functions with space-form
//!   caps, and hypothesis validation between two geodesics.
//! - [`jacobi`]: the fixed-step Runge–Kutta integrator, trajectory queries
//!   (determinants, fields, log-derivatives, Wronskian defect), closed-form
//!   space-form solutions, and focal-point detection by sign scan plus
//!   bisection.
//! - [`indexform`]: index forms of sampled and piecewise-linear fields,
//!   Jacobi fields through a prescribed endpoint, and finite-element index
//!   minimisation with positive-definiteness reported honestly.
//! - [`comparison`]: field-norm and determinant comparisons between a
//!   geodesic and a model, ratio monotonicity, rigidity diagnostics, and the
//!   index-chain inequality.
//! - [`applications`]: a plane-versus-sphere quadrilateral comparison,
//!   transversal curve speeds on space forms, and area/annulus comparisons
//!   for rotationally symmetric volume models.
//! - [`sampling`]: seed-deterministic random instances for property sweeps.
//!
//! Numerical verdicts are explicit: every comparison returns margins and
//! named hypothesis checks instead of a bare boolean, and dual-route checks
//! (closed form versus integration) fail loudly when the routes disagree.

pub mod applications;
pub mod comparison;
pub mod curvature;
pub mod error;
pub mod indexform;
pub mod jacobi;
pub mod sampling;
pub mod tolerances;

pub use applications::{
    quad_compare, quad_margin_sweep, solve_model_radius, transversal_speed_compare,
    unit_sphere_area, verify_volume_comparison, ModelRadius, QuadInstance, QuadOutcome,
    SpeedPair, TransversalData, VolumeModel,
};
pub use comparison::{
    index_chain_check, monotonicity_check, ratio_monotonicity, rauch3_verify,
    rigidity_diagnostics, thm_d_verify, ChainReport, ComparisonDetail, ComparisonReport,
    RigidityDiagnostics,
};
pub use curvature::{
    build_cap_extension, cap_consistency_defect, check_cap_consistency, space_form_functions,
    validate_hypotheses, CapData, CurvatureProfile, HypothesisCheck, HypothesisMode,
    HypothesisReport, MatrixFn, ProfileKind, ScalarFn, WarpingFunction,
};
pub use error::{Error, Result};
pub use indexform::{
    boundary_identity_residual, composite_simpson, index_form_piecewise, index_form_sampled,
    jacobi_through_endpoint, minimize_index, IndexFormReport, IndexMinimum, PiecewiseField,
    SampledField,
};
pub use jacobi::{
    first_focal_point, integrate_jacobi, integrate_jacobi_to, space_form_focal_radius,
    space_form_jacobi, FocalScan, InitialOperator, JacobiTrajectory,
};
pub use sampling::{
    bounded_sinusoid_profile, gaussian, random_orthogonal, symmetric_operator_in_range,
};
