//! Monotonicity of det A over the model determinant: the ratio must be
//! non-increasing, so its most positive finite-difference slope is the whole
//! verdict.

use geomcmp::ratio_monotonicity;
use serde_json::json;

use super::num;
use crate::config::{CliError, Resolved};
use crate::params::ParamReader;
use crate::registry::{Experiment, Outcome, Status};

pub struct RatioMonotonicity;

impl Experiment for RatioMonotonicity {
    fn name(&self) -> &'static str {
        "ratio"
    }

    fn run(&self, p: &ParamReader, res: &Resolved) -> Result<Outcome, CliError> {
        p.check_keys(&["profile", "k", "lambda", "lambda_tilde"])?;
        let profile = p.profile("profile")?;
        let k = p.f64("k")?;
        let lambda = p.f64("lambda")?;
        let lambda_tilde = p.f64("lambda_tilde")?;

        let worst_slope = ratio_monotonicity(&profile, k, lambda, lambda_tilde, res.steps)?;
        let status = if worst_slope <= res.tol {
            Status::Hold
        } else {
            Status::Violation
        };

        let mut csv = String::from("key,value\n");
        csv.push_str(&format!("worst_slope,{worst_slope}\n"));

        let results = json!({
            "worst_slope": num(worst_slope),
        });
        Ok(Outcome {
            csv,
            results,
            status,
        })
    }
}
