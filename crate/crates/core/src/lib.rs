//! Occupancy-chain model of bridge formation on a cylindrical triangular
//! lattice: configurations and their energy, the Metropolis dynamics, bridge
//! observables, layer-sequence combinatorics and exact enumeration on small
//! lattices.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod chain;
pub mod config;
pub mod error;
pub mod lattice;
pub mod layerseq;
pub mod observables;
pub mod oracle;

pub use chain::{AcceptanceMode, Chain, ChainParams, Schedule, StepOutcome};
pub use config::{Configuration, Convention, EnergyTerms, Move, ScentFunction, ScentKind};
pub use error::{Error, Result};
pub use lattice::{LatticeDims, Site};
pub use layerseq::LayerSequence;
