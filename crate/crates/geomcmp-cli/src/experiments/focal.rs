//! First focal point of a constant-curvature instance, cross-checked against
//! the closed-form space-form root.

use geomcmp::{first_focal_point, space_form_focal_radius, CurvatureProfile, InitialOperator};
use serde_json::json;

use super::num;
use crate::config::{CliError, Resolved};
use crate::params::ParamReader;
use crate::registry::{Experiment, Outcome, Status};

pub struct Focal;

impl Experiment for Focal {
    fn name(&self) -> &'static str {
        "focal"
    }

    fn run(&self, p: &ParamReader, res: &Resolved) -> Result<Outcome, CliError> {
        p.check_keys(&["k", "lambda", "l", "dim"])?;
        let k = p.f64("k")?;
        let lambda = p.f64("lambda")?;
        let l = p.f64("l")?;
        let dim = p.usize_or("dim", 1)?;

        let profile = CurvatureProfile::constant(dim + 1, l, k)?;
        let operator = InitialOperator::scalar(dim, lambda);
        let scan = first_focal_point(&profile, &operator, res.steps)?;
        let analytic = space_form_focal_radius(k, lambda);

        // The detector and the formula must agree about existence and, when
        // both land inside the interval, about the location.
        let boundary_slop = 1e-9;
        let analytic_inside = analytic.filter(|&t| t < l - boundary_slop);
        let near_boundary = analytic.map_or(false, |t| (t - l).abs() <= boundary_slop);
        let gap = match (scan.t_star, analytic_inside) {
            (Some(found), Some(exact)) => Some((found - exact).abs()),
            _ => None,
        };
        let agree = match (scan.t_star, analytic_inside) {
            (Some(_), Some(_)) => gap.unwrap() <= res.tol.max(1e-8),
            (None, None) => true,
            _ => near_boundary,
        };
        let status = if agree { Status::Hold } else { Status::Violation };

        let mut csv = String::from("key,value\n");
        match scan.t_star {
            Some(t) => csv.push_str(&format!("t_star,{t}\n")),
            None => csv.push_str("t_star,none\n"),
        }
        csv.push_str(&format!("resolution_warning,{}\n", scan.resolution_warning));

        let results = json!({
            "t_star": scan.t_star.map(num),
            "resolution_warning": scan.resolution_warning,
            "analytic_t_star": analytic.map(num),
            "detector_gap": gap.map(num),
        });
        Ok(Outcome {
            csv,
            results,
            status,
        })
    }
}
