//! Index form of a forward-integrated Jacobi field and its endpoint identity
//! `I_B(V,V) = ⟨V′(l), V(l)⟩`.

use geomcmp::{index_form_sampled, integrate_jacobi, SampledField};
use serde_json::json;

use super::num;
use crate::config::{CliError, Resolved};
use crate::params::ParamReader;
use crate::registry::{Experiment, Outcome, Status};

pub struct IndexIdentity;

impl Experiment for IndexIdentity {
    fn name(&self) -> &'static str {
        "index"
    }

    fn run(&self, p: &ParamReader, res: &Resolved) -> Result<Outcome, CliError> {
        p.check_keys(&["profile", "operator", "v0"])?;
        let profile = p.profile("profile")?;
        let operator = p.operator("operator")?;
        let v0 = p.vector("v0")?;

        let traj = integrate_jacobi(&profile, &operator, res.steps)?;
        let (values, derivs) = traj.field(&v0);
        let boundary = derivs
            .last()
            .expect("non-empty trajectory")
            .dot(values.last().expect("non-empty trajectory"));
        let field = SampledField::new(traj.grid().to_vec(), values, derivs)?;
        let report = index_form_sampled(&profile, &operator, &field)?;
        let residual = (report.total - boundary).abs();

        let status = if residual <= res.tol {
            Status::Hold
        } else {
            Status::Violation
        };

        let mut csv = String::from("key,value\n");
        for (key, value) in [
            ("total", report.total),
            ("endpoint_term", boundary),
            ("boundary_term", report.boundary_term),
            ("integral_term", report.integral_term),
            ("tangential_term", report.tangential_term),
            ("identity_residual", residual),
        ] {
            csv.push_str(&format!("{key},{value}\n"));
        }

        let results = json!({
            "total": num(report.total),
            "endpoint_term": num(boundary),
            "boundary_term": num(report.boundary_term),
            "integral_term": num(report.integral_term),
            "tangential_term": num(report.tangential_term),
            "identity_residual": num(residual),
        });
        Ok(Outcome {
            csv,
            results,
            status,
        })
    }
}
