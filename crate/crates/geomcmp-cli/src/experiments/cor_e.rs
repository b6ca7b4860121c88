//! Volume comparison for a cap-extension model: distance-sphere areas and
//! annulus volumes against the constant-curvature model at the matched
//! radius.

use std::sync::Arc;

use geomcmp::{build_cap_extension, verify_volume_comparison, ComparisonDetail, VolumeModel};
use serde_json::json;

use super::{hypothesis_json, num, report_status};
use crate::config::{CliError, Resolved};
use crate::params::ParamReader;
use crate::registry::{Experiment, Outcome};

pub struct CorE;

impl Experiment for CorE {
    fn name(&self) -> &'static str {
        "cor-e"
    }

    fn run(&self, p: &ParamReader, res: &Resolved) -> Result<Outcome, CliError> {
        p.check_keys(&[
            "n",
            "k_prime",
            "k",
            "cap_radius",
            "rho_max",
            "kappa_tail",
            "r_grid",
            "ordering_mode",
            "r_tilde",
        ])?;
        let n = p.usize("n")?;
        let k_prime = p.f64("k_prime")?;
        let k = p.f64("k")?;
        let cap_radius = p.f64("cap_radius")?;
        let rho_max = p.f64("rho_max")?;
        let kappa_tail = p.f64_or("kappa_tail", k_prime)?;
        let r_grid = p.vec_f64("r_grid")?;
        let ordering_mode = p.bool_or("ordering_mode", false)?;
        let r_tilde = p.opt_f64("r_tilde")?;

        let warping = build_cap_extension(
            k_prime,
            cap_radius,
            Arc::new(move |_| kappa_tail),
            rho_max,
        )?;
        let model = match r_tilde {
            Some(rt) => VolumeModel::with_model_radius(n, warping, k, rt)?,
            None => VolumeModel::with_equal_area(n, warping, k)?,
        };
        let report = verify_volume_comparison(&model, &r_grid, res.steps, ordering_mode)?;
        let status = report_status(&report, res.tol);

        let ComparisonDetail::Areas {
            annulus_lhs,
            annulus_rhs,
            r_tilde: solved_r_tilde,
            radius_ordered,
        } = &report.detail
        else {
            unreachable!("volume comparison always carries area detail");
        };

        let mut csv = String::from("R,area_M,area_model,annulus_M,annulus_model\n");
        for i in 0..report.grid.len() {
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                report.grid[i], report.lhs[i], report.rhs[i], annulus_lhs[i], annulus_rhs[i]
            ));
        }

        let annulus_slack = annulus_lhs
            .iter()
            .zip(annulus_rhs)
            .map(|(&a, &b)| b - a)
            .fold(f64::INFINITY, f64::min);
        let results = json!({
            "r_tilde": num(*solved_r_tilde),
            "radius_ordered": radius_ordered,
            "min_margin": num(report.min_margin),
            "inequality_slack": num(report.inequality_slack()),
            "annulus_slack": num(annulus_slack),
            "hypothesis": hypothesis_json(&report.hypothesis),
            "warnings": report.warnings,
        });
        Ok(Outcome {
            csv,
            results,
            status,
        })
    }
}
