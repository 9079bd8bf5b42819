//! Coded shuffling for MapReduce-style distributed computing.
//!
//! Nodes map overlapping subsets of the input files, then exchange
//! intermediate values (IVs) over a shared broadcast link using XOR-coded
//! messages. This crate builds placement and shuffle plans for several
//! designs, evaluates their communication loads in closed form, and executes
//! them bit-exactly so the measured load can be checked against the formula.

pub mod analysis;
pub mod bits;
pub mod error;
pub mod experiment;
pub mod model;
pub mod schemes;
pub mod simnet;
pub mod terasort;

pub use bits::BitString;
pub use error::{Error, Result};
pub use model::{IvSizeProfile, NetworkConfig, PlacementPlan, Ratio, ShufflePlan};
pub use schemes::{BuildOptions, Scheme, SchemeId, SchemeParams};
