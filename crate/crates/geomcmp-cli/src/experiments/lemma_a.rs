//! Minimality of the Jacobi field for the index form with a pinned endpoint:
//! the discrete minimiser's value, the identity against the Jacobi field's
//! own index value, and a seeded sweep of admissible competitors.

use geomcmp::{
    gaussian, index_form_piecewise, integrate_jacobi, minimize_index, PiecewiseField,
};
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::num;
use crate::config::{CliError, Resolved};
use crate::params::ParamReader;
use crate::registry::{Experiment, Outcome, Status};

pub struct LemmaA;

impl Experiment for LemmaA {
    fn name(&self) -> &'static str {
        "lemma-a"
    }

    fn run(&self, p: &ParamReader, res: &Resolved) -> Result<Outcome, CliError> {
        p.check_keys(&["profile", "operator", "v0", "nodes", "competitors"])?;
        let profile = p.profile("profile")?;
        let operator = p.operator("operator")?;
        let v0 = p.vector("v0")?;
        let nodes = p.usize_or("nodes", 65)?;
        let competitors = p.usize_or("competitors", 20)?;

        // The comparison field is the Jacobi field through A(l)·v0; its index
        // value is the boundary pairing, and the lemma says nothing admissible
        // with the same endpoint does better.
        let traj = integrate_jacobi(&profile, &operator, res.steps)?;
        let (values, derivs) = traj.field(&v0);
        let w = values.last().expect("non-empty trajectory").clone();
        let jacobi_value = derivs.last().expect("non-empty trajectory").dot(&w);

        let minimum = minimize_index(&profile, &operator, &w, nodes)?;
        let identity_residual = (minimum.value - jacobi_value).abs();

        let dim = w.len();
        let l = profile.length();
        let mut rng = ChaCha8Rng::seed_from_u64(res.seed);
        let mut worst_gap = f64::INFINITY;
        for _ in 0..competitors {
            let mut node_values: Vec<DVector<f64>> = (0..nodes)
                .map(|_| DVector::from_fn(dim, |_, _| gaussian(&mut rng)))
                .collect();
            *node_values.last_mut().expect("nodes >= 3") = w.clone();
            let field = PiecewiseField::new(l, node_values, (0.0, 0.0))?;
            let report = index_form_piecewise(&profile, &operator, &field)?;
            worst_gap = worst_gap.min(report.total - minimum.value);
        }
        if competitors == 0 {
            worst_gap = 0.0;
        }

        let status = if worst_gap >= -res.tol {
            Status::Hold
        } else {
            Status::Violation
        };

        let mut csv = String::from("key,value\n");
        for (key, value) in [
            ("min_value", minimum.value),
            ("jacobi_value", jacobi_value),
            ("identity_residual", identity_residual),
            ("worst_competitor_gap", worst_gap),
        ] {
            csv.push_str(&format!("{key},{value}\n"));
        }

        let results = json!({
            "min_value": num(minimum.value),
            "jacobi_value": num(jacobi_value),
            "identity_residual": num(identity_residual),
            "worst_competitor_gap": num(worst_gap),
            "competitors": competitors,
            "nodes": nodes,
        });
        Ok(Outcome {
            csv,
            results,
            status,
        })
    }
}
