use crate::experiment::ExperimentResult;

/// Sizes entering the query bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundInputs {
    /// Input alphabet size.
    pub ell: f64,
    /// Number of states to learn.
    pub n: f64,
    /// Number of separately learned machines.
    pub machines: f64,
    /// Longest counterexample.
    pub m: f64,
}

impl BoundInputs {
    /// For mnl a single machine of the learned size; otherwise the hidden
    /// component total with the largest component alphabet.
    pub fn of(r: &ExperimentResult) -> Self {
        let machines = if r.algorithm == "mnl" {
            1
        } else {
            r.components
        };
        BoundInputs {
            ell: r.input_alphabet as f64,
            n: r.target_size() as f64,
            machines: machines as f64,
            m: r.max_cex_len as f64,
        }
    }

    /// `ell·n² + n·machines·log2(m)`, with `m` at least 2.
    pub fn oq_bound(&self) -> f64 {
        self.ell * self.n * self.n + self.n * self.machines * self.m.max(2.0).log2()
    }
}

/// Whether the output-query resets stay within `c` times the bound.
pub fn thm_bound_check(r: &ExperimentResult, c: f64) -> bool {
    r.oq_resets as f64 <= c * BoundInputs::of(r).oq_bound()
}

/// Whether the number of equivalence queries stays within `c·n`.
pub fn eq_bound_check(r: &ExperimentResult, c: f64) -> bool {
    r.eq_count as f64 <= c * BoundInputs::of(r).n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{run_experiment, ExperimentConfig};
    use mmnlearn_core::learn::Algorithm;

    fn counter(algo: Algorithm) -> ExperimentResult {
        run_experiment(&ExperimentConfig::new("binctr:5".parse().unwrap(), algo)).unwrap()
    }

    #[test]
    fn counter_runs_sit_within_the_bound() {
        for algo in [Algorithm::Ccwl, Algorithm::Mnl] {
            let r = counter(algo);
            assert!(thm_bound_check(&r, 10.0), "{algo}");
            assert!(!thm_bound_check(&r, 0.0), "{algo}");
            assert!(eq_bound_check(&r, 10.0), "{algo}");
        }
    }

    #[test]
    fn monolithic_bound_uses_one_machine() {
        let r = counter(Algorithm::Mnl);
        let b = BoundInputs::of(&r);
        assert_eq!((b.machines, b.n, b.ell), (1.0, 70.0, 2.0));
        let r = counter(Algorithm::Ccwl);
        let b = BoundInputs::of(&r);
        assert_eq!((b.machines, b.n), (5.0, 15.0));
    }
}
