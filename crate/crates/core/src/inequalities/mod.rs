//! Numerical experiments for the norm inequalities: strong Haagerup, the key estimate,
//! the moment bound and strong ultracontractivity.

mod haagerup;
mod keylem;
mod ultra;

use std::collections::BTreeMap;

use serde::Serialize;

pub use haagerup::{binomial_witness, dilation_l2_linf, haagerup_ladder, haagerup_ratio, sharpness_lower};
pub use keylem::{keylem_check, keylem_family, moment_bound_check, MOMENT_BOUND_BUDGET};
pub use ultra::{tail_degree_cut, ultra_coefficient, ultracontractivity_experiment, TAIL_TOL};

/// One-sided slack allowed when deciding whether a bound holds.
pub const BOUND_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Upper,
    Lower,
}

/// An analytic bound on one observed quantity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bound {
    pub name: String,
    /// Key of the observed value being bounded.
    pub subject: String,
    pub value: f64,
    pub kind: BoundKind,
    /// Which inequality the bound comes from.
    pub source: String,
    pub satisfied: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Parameters {
    pub q: f64,
    pub d: usize,
    pub n: Option<usize>,
    pub t: Option<f64>,
    pub trunc: usize,
    pub seed: Option<u64>,
}

/// Observed values of one experiment together with the bounds they are checked against.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub parameters: Parameters,
    pub observed: BTreeMap<String, f64>,
    pub bounds: Vec<Bound>,
    /// Change of the main observed value between the last two truncations, when a ladder ran.
    pub convergence: Option<f64>,
}

impl ExperimentResult {
    pub fn new(parameters: Parameters) -> Self {
        Self { parameters, observed: BTreeMap::new(), bounds: Vec::new(), convergence: None }
    }

    pub fn observe(&mut self, name: &str, value: f64) {
        self.observed.insert(name.to_string(), value);
    }

    pub fn observed(&self, name: &str) -> Option<f64> {
        self.observed.get(name).copied()
    }

    /// Records a bound on an already observed value, deciding `satisfied` with [`BOUND_TOL`].
    pub fn bound(&mut self, name: &str, subject: &str, kind: BoundKind, value: f64, source: &str) {
        let x = self.observed(subject).unwrap_or(f64::NAN);
        let satisfied = match kind {
            BoundKind::Upper => x <= value + BOUND_TOL,
            BoundKind::Lower => x >= value - BOUND_TOL,
        };
        self.bounds.push(Bound {
            name: name.to_string(),
            subject: subject.to_string(),
            value,
            kind,
            source: source.to_string(),
            satisfied,
        });
    }

    pub fn get_bound(&self, name: &str) -> Option<&Bound> {
        self.bounds.iter().find(|b| b.name == name)
    }

    pub fn all_satisfied(&self) -> bool {
        self.bounds.iter().all(|b| b.satisfied)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_are_one_sided_with_slack() {
        let mut r = ExperimentResult::new(Parameters::default());
        r.observe("x", 1.0);
        r.bound("up", "x", BoundKind::Upper, 1.0 - 0.5 * BOUND_TOL, "test");
        r.bound("low", "x", BoundKind::Lower, 1.0 + 2.0 * BOUND_TOL, "test");
        r.bound("missing", "y", BoundKind::Upper, 1.0, "test");
        assert!(r.get_bound("up").unwrap().satisfied);
        assert!(!r.get_bound("low").unwrap().satisfied);
        assert!(!r.get_bound("missing").unwrap().satisfied);
        assert!(!r.all_satisfied());
    }
}
