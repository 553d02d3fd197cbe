//! Active learning of Moore machines and Moore machine networks.

pub mod alphabet;
pub mod bench;
pub mod equivalence;
pub mod error;
pub mod format;
pub mod learn;
pub mod mmn;
pub mod moore;
pub mod oracle;
pub mod partition;

pub use alphabet::{Alphabet, Symbol, Word};
pub use equivalence::{equivalent, Verdict};
pub use error::{Error, Result};
pub use mmn::{Mmn, Network, NodeKind, NondetMmn};
pub use moore::{DetMoore, Moore, NondetMoore, StateId};
pub use partition::StatePartition;
