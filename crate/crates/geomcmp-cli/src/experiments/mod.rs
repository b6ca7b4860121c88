//! The shipped experiment strategies and the JSON/CSV helpers they share.

mod cor_c;
mod cor_e;
mod focal;
mod index;
mod lemma_a;
mod quad;
mod ratio;
mod rauch3;
mod thm_d;

use geomcmp::{ComparisonReport, HypothesisMode, HypothesisReport, RigidityDiagnostics};
use serde_json::{json, Value};

use crate::registry::{Experiment, Status};

pub fn all() -> Vec<Box<dyn Experiment>> {
    vec![
        Box::new(focal::Focal),
        Box::new(index::IndexIdentity),
        Box::new(lemma_a::LemmaA),
        Box::new(rauch3::Rauch3),
        Box::new(thm_d::ThmD),
        Box::new(ratio::RatioMonotonicity),
        Box::new(quad::QuadSweep),
        Box::new(cor_c::CorC),
        Box::new(cor_e::CorE),
    ]
}

/// JSON number, or null where IEEE has no JSON spelling.
pub(crate) fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

pub(crate) fn hypothesis_json(h: &HypothesisReport) -> Value {
    let checks: Vec<Value> = h
        .checks
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "passed": c.passed,
                "margin": num(c.margin),
                "worst_t": c.worst_t.map(num),
            })
        })
        .collect();
    let mode = match h.mode {
        HypothesisMode::Sectional => json!("sectional"),
        HypothesisMode::Ricci(k) => json!({ "ricci": num(k) }),
    };
    json!({
        "mode": mode,
        "tol": num(h.tol),
        "passed": h.passed(),
        "checks": checks,
    })
}

pub(crate) fn rigidity_json(r: &RigidityDiagnostics) -> Value {
    json!({
        "norm_gap": num(r.norm_gap),
        "parallelism_residual": r.parallelism_residual.map(num),
        "curvature_gap": num(r.curvature_gap),
        "eigen_residual": [num(r.eigen_residual.0), num(r.eigen_residual.1)],
    })
}

/// Shared verdict logic for comparison reports: an unmet hypothesis outranks
/// a violated inequality because no inequality was asserted.
pub(crate) fn report_status(report: &ComparisonReport, tol: f64) -> Status {
    if !report.hypothesis.passed() {
        Status::HypothesisFailed
    } else if !report.holds(tol) {
        Status::Violation
    } else {
        Status::Hold
    }
}
