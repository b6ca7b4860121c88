//! Speed comparison of the transversal geodesic variation on two space
//! forms, from the shared boundary data.

use geomcmp::{transversal_speed_compare, TransversalData};
use serde_json::json;

use super::num;
use crate::config::{CliError, Resolved};
use crate::params::ParamReader;
use crate::registry::{Experiment, Outcome, Status};

pub struct CorC;

impl Experiment for CorC {
    fn name(&self) -> &'static str {
        "cor-c"
    }

    fn run(&self, p: &ParamReader, res: &Resolved) -> Result<Outcome, CliError> {
        p.check_keys(&[
            "k_m",
            "k_m0",
            "f",
            "fprime",
            "lambda",
            "e_norm",
            "e_dot_gamma",
        ])?;
        let k_m = p.f64("k_m")?;
        let k_m0 = p.f64("k_m0")?;
        let data = TransversalData {
            f: p.f64("f")?,
            fprime: p.f64("fprime")?,
            lambda: p.f64("lambda")?,
            e_norm: p.f64("e_norm")?,
            e_dot_gamma: p.f64("e_dot_gamma")?,
        };

        // The speed ordering is only claimed under the curvature ordering.
        let curvature_ordered = k_m <= k_m0;
        let pair = transversal_speed_compare(k_m, k_m0, &data, res.steps)?;
        let status = if !curvature_ordered {
            Status::HypothesisFailed
        } else if pair.margin < -res.tol {
            Status::Violation
        } else {
            Status::Hold
        };

        let mut csv = String::from("key,value\n");
        for (key, value) in [
            ("speed_m", pair.speed_m),
            ("speed_m0", pair.speed_m0),
            ("margin", pair.margin),
            ("s_end", pair.s_end),
            ("dual_route_defect", pair.dual_route_defect),
        ] {
            csv.push_str(&format!("{key},{value}\n"));
        }

        let results = json!({
            "speed_m": num(pair.speed_m),
            "speed_m0": num(pair.speed_m0),
            "margin": num(pair.margin),
            "s_end": num(pair.s_end),
            "dual_route_defect": num(pair.dual_route_defect),
            "curvature_ordered": curvature_ordered,
        });
        Ok(Outcome {
            csv,
            results,
            status,
        })
    }
}
