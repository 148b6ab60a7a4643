//! Emptiness checking for timed Büchi automata.
//!
//! The crate is organised bottom-up:
//!
//! * [`dbm`] zones as difference bound matrices and the `Extra+_LU` abstraction,
//! * [`model`] automata, networks, the textual format and benchmark generators,
//! * [`zone_graph`] the abstract zone graph,
//! * [`transform_graph`] transformation graphs of transition sequences,
//! * [`omega_iter`] the ω-iterability test for a transition sequence,
//! * [`buchi_check`] depth-first emptiness search with subsumption, optionally
//!   accelerated by the iterability test,
//! * [`oracle`] a region-based reference implementation used for validation.

pub mod buchi_check;
pub mod cli;
pub mod dbm;
pub mod model;
pub mod omega_iter;
pub mod oracle;
pub mod transform_graph;
pub mod zone_graph;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid model: {0}")]
    Model(String),
    #[error("unknown model family `{0}`")]
    UnknownFamily(String),
    #[error("invalid transition path: {0}")]
    Path(String),
    #[error("oracle guard rail: {0}")]
    GuardRail(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
