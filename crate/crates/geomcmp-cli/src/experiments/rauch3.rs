//! Norm comparison of Jacobi fields on two instances, with monotonicity and
//! rigidity diagnostics.

use geomcmp::{monotonicity_check, rauch3_verify};
use serde_json::json;

use super::{hypothesis_json, num, report_status, rigidity_json};
use crate::config::{CliError, Resolved};
use crate::params::ParamReader;
use crate::registry::{Experiment, Outcome};

pub struct Rauch3;

impl Experiment for Rauch3 {
    fn name(&self) -> &'static str {
        "rauch3"
    }

    fn run(&self, p: &ParamReader, res: &Resolved) -> Result<Outcome, CliError> {
        p.check_keys(&[
            "profile",
            "profile_0",
            "operator",
            "operator_0",
            "vhat0",
            "vhat0_norm0",
            "a",
            "b",
        ])?;
        let profile = p.profile("profile")?;
        let profile_0 = p.profile("profile_0")?;
        let operator = p.operator("operator")?;
        let operator_0 = p.operator("operator_0")?;
        let vhat0 = p.vector("vhat0")?;
        let vhat0_norm0 = p.f64("vhat0_norm0")?;
        let a = p.f64_or("a", 0.0)?;
        let b = p.f64_or("b", 0.0)?;

        let report = rauch3_verify(
            &profile,
            &profile_0,
            &operator,
            &operator_0,
            &vhat0,
            vhat0_norm0,
            a,
            b,
            res.steps,
        )?;
        let worst_slope = monotonicity_check(&report);
        let status = report_status(&report, res.tol);

        let mut csv = String::from("t,norm_V,norm_V0,ratio,margin\n");
        for i in 0..report.grid.len() {
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                report.grid[i], report.lhs[i], report.rhs[i], report.ratio[i], report.margin[i]
            ));
        }

        let results = json!({
            "min_margin": num(report.min_margin),
            "inequality_slack": num(report.inequality_slack()),
            "monotonicity_worst_slope": num(worst_slope),
            "hypothesis": hypothesis_json(&report.hypothesis),
            "rigidity": report.rigidity.as_ref().map(rigidity_json),
            "warnings": report.warnings,
        });
        Ok(Outcome {
            csv,
            results,
            status,
        })
    }
}
