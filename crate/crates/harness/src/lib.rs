//! Running learning experiments and reporting their query statistics.

pub mod bounds;
pub mod experiment;
pub mod report;

pub use bounds::{eq_bound_check, thm_bound_check, BoundInputs};
pub use experiment::{
    run_batch, run_experiment, run_instance, serialize_learned, Aggregate, Batch, ExperimentConfig,
    ExperimentResult, Outcome, Validation,
};
pub use report::{abbreviate, report, Format};
