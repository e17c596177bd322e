//! Per-layer occupancy counts and the combinatorics built on them: boundary
//! bounds and witnesses, compression, convex scent approximation, and the
//! transformation that extends a configuration to reach the top layer.

mod bounds;
mod compress;
mod convex;
mod thresholds;
mod transform;

pub use bounds::{boundary_lower_bound, increment_dm, truncation, witness_config, BoundaryProfile};
pub use compress::{compress, compress_step, compress_trace};
pub use convex::{convex_approx, line_offsets, sandwich_margin, PiecewiseLinearFn};
pub use thresholds::{thresholds, Thresholds};
pub use transform::{bridge_transform, BoundDeltas, ScentDeltas, StageValues, TransformTrace};

use alloc::format;
use alloc::vec::Vec;

use crate::config::ScentFunction;
use crate::error::{Error, Result};

/// Occupied counts `(n_1, ..., n_h)` on a ring of width `w`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LayerSequence {
    w: usize,
    counts: Vec<usize>,
}

impl LayerSequence {
    /// Validates `n_k <= w` and membership in the no-gap class: no full layer
    /// above a partial one and no empty layer below a nonempty one.
    pub fn new(w: usize, counts: Vec<usize>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidParameter(
                "layer sequence needs at least one layer".into(),
            ));
        }
        if let Some(k) = counts.iter().position(|&n| n > w) {
            return Err(Error::InvalidParameter(format!(
                "layer {} holds {} sites, width is {w}",
                k + 1,
                counts[k]
            )));
        }
        let seq = LayerSequence { w, counts };
        seq.check_omega_bar()?;
        Ok(seq)
    }

    pub(crate) fn from_raw(w: usize, counts: Vec<usize>) -> Self {
        debug_assert!(counts.iter().all(|&n| n <= w));
        LayerSequence { w, counts }
    }

    #[inline]
    pub fn w(&self) -> usize {
        self.w
    }

    #[inline]
    pub fn h(&self) -> usize {
        self.counts.len()
    }

    #[inline]
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// `n_k` for `k` in `1..=h`; zero outside.
    #[inline]
    pub fn n(&self, k: usize) -> usize {
        if k == 0 || k > self.h() {
            0
        } else {
            self.counts[k - 1]
        }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Number of leading full layers.
    pub fn r_bot(&self) -> usize {
        self.counts.iter().take_while(|&&n| n == self.w).count()
    }

    /// Highest nonempty layer, or 0 for the empty sequence.
    pub fn r_top(&self) -> usize {
        self.counts.iter().rposition(|&n| n > 0).map_or(0, |k| k + 1)
    }

    pub fn is_omega_bar(&self) -> bool {
        self.check_omega_bar().is_ok()
    }

    pub fn check_omega_bar(&self) -> Result<()> {
        for k in 1..self.h() {
            let (lo, hi) = (self.counts[k - 1], self.counts[k]);
            if hi == self.w && lo < self.w {
                return Err(Error::NotOmegaBar(format!(
                    "layer {} is full above partial layer {k}",
                    k + 1
                )));
            }
            if lo == 0 && hi > 0 {
                return Err(Error::NotOmegaBar(format!(
                    "layer {} is occupied above empty layer {k}",
                    k + 1
                )));
            }
        }
        Ok(())
    }

    /// `sum_k n_k S(k)`.
    pub fn scent_sum(&self, scent: &ScentFunction) -> f64 {
        scent.total(&self.counts)
    }
}
