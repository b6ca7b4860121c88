//! Right-angled quadrilateral sweep: the flat closing distance dominates the
//! spherical one for legs up to an empirically located threshold.

use geomcmp::quad_margin_sweep;
use serde_json::json;

use super::num;
use crate::config::{CliError, Resolved};
use crate::params::ParamReader;
use crate::registry::{Experiment, Outcome, Status};

pub struct QuadSweep;

impl Experiment for QuadSweep {
    fn name(&self) -> &'static str {
        "quad"
    }

    fn run(&self, p: &ParamReader, res: &Resolved) -> Result<Outcome, CliError> {
        p.check_keys(&["pq", "leg_max", "n_points"])?;
        let pq = p.f64("pq")?;
        let leg_max = p.f64("leg_max")?;
        let n_points = p.usize_or("n_points", 121)?;

        let (margins, threshold) = quad_margin_sweep(pq, leg_max, n_points)?;
        let min_margin = margins
            .iter()
            .map(|&(_, m)| m)
            .fold(f64::INFINITY, f64::min);
        let status = if min_margin >= -res.tol {
            Status::Hold
        } else {
            Status::Violation
        };

        let mut csv = String::from("leg,margin\n");
        for &(leg, margin) in &margins {
            csv.push_str(&format!("{leg},{margin}\n"));
        }

        let results = json!({
            "min_margin": num(min_margin),
            "threshold": threshold.map(num),
            "points": margins.len(),
        });
        Ok(Outcome {
            csv,
            results,
            status,
        })
    }
}
