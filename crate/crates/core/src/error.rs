use alloc::string::String;

use crate::lattice::Site;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("lattice needs w >= 3 and h >= 2, got {w}x{h}")]
    InvalidDims { w: usize, h: usize },

    #[error("site ({x}, {y}) lies outside the extended lattice")]
    SiteOutOfRange { x: usize, y: usize },

    #[error("layer {y} is not in 1..={h}")]
    LayerOutOfRange { y: usize, h: usize },

    #[error("cannot {action} site ({}, {}): occupancy does not match", site.x, site.y)]
    MoveMismatch { site: Site, action: &'static str },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("layer sequence is not in the no-gap class: {0}")]
    NotOmegaBar(String),

    #[error("infeasible request: {0}")]
    Infeasible(String),

    #[error("state space of {sites} sites exceeds the enumeration limit of {limit}")]
    StateSpaceTooLarge { sites: usize, limit: usize },

    #[error("no removable site at stage {stage}: candidate ({}, {}) is not locally simply connected", site.x, site.y)]
    NoRemovableSite { stage: usize, site: Site },

    #[error("boundary census violates the counting bound at length {length}: {count} configurations")]
    CountingBoundViolated { length: i64, count: u64 },

    #[error("invariant violated at step {step}: {reason}\n{dump}")]
    InvariantViolation { step: u64, reason: String, dump: String },
}

pub type Result<T> = core::result::Result<T, Error>;
