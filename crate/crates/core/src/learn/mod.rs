//! Learners: the table machinery, single-machine L*, and the system-level
//! monolithic and componentwise learners.

pub mod cache;
pub mod componentwise;
pub mod lstar;
pub mod table;

pub use cache::{Memo, QueryCache};
pub use componentwise::{
    ccwl, cwl, learn, mnl, Abstraction, Algorithm, CaParams, DepthBound, LearnOptions, Learned,
    LearnedSystem,
};
pub use lstar::{lstar, Teacher};
pub use table::{Hypothesis, ObservationTable};
