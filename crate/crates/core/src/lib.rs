//! Mining temporal-logic behavior specifications from timestamped presence
//! events, and reasoning over them with labeled semantic tableaux.
//!
//! * [`formula`]: syntax, parser, printer and patterns of the supported fragment.
//! * [`tableau`]: truth trees and the satisfiability, unsatisfiability and
//!   validity checks built on them.
//! * [`oracle`]: an independent brute-force satisfiability check over lassos.
//! * [`environment`]: the attributed graph and event log formats.
//! * [`miner`]: per-object mining, merging and splitting of specifications.
//! * [`reactor`]: trigger handling, specification repair and action proposal.

pub mod cli;
pub mod environment;
pub mod formula;
pub mod miner;
pub mod oracle;
pub mod reactor;
pub mod tableau;

pub use formula::{parse, Formula};
