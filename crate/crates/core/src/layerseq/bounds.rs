use alloc::format;
use alloc::vec::Vec;

use super::LayerSequence;
use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::lattice::{LatticeDims, Site};

/// Least boundary increase from stacking a layer of `n_m1` sites on a
/// partial layer of `n_m` sites.
pub fn increment_dm(n_m: usize, n_m1: usize) -> i64 {
    let delta = n_m1 as i64 - n_m as i64;
    2 + 2 * (delta + 1).max(0) + 2 * (delta - 1).max(0)
}

/// Lower bounds `B̄_M` on the boundary of the truncation to layers `1..=M`,
/// for `M` from `max(r_bot, 1)` to `r_top`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryProfile {
    r_min: usize,
    values: Vec<i64>,
    top_correction: i64,
}

impl BoundaryProfile {
    pub fn r_min(&self) -> usize {
        self.r_min
    }

    /// `B̄_M` for consecutive `M` starting at [`Self::r_min`].
    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn at(&self, m: usize) -> Option<i64> {
        m.checked_sub(self.r_min).and_then(|i| self.values.get(i).copied())
    }

    /// `B̄` at the top nonempty layer, 0 for the empty sequence.
    pub fn last(&self) -> i64 {
        self.values.last().copied().unwrap_or(0)
    }

    /// [`Self::last`] minus `2 n_h` when the top layer is reached, which
    /// bounds the boundary of the whole configuration.
    pub fn corrected(&self) -> i64 {
        self.last() - self.top_correction
    }
}

pub fn boundary_lower_bound(seq: &LayerSequence) -> Result<BoundaryProfile> {
    seq.check_omega_bar()?;
    let (r_bot, r_top, h) = (seq.r_bot(), seq.r_top(), seq.h());
    let r_min = r_bot.max(1);
    let mut values = Vec::new();
    if r_top >= r_min {
        let mut b = if r_bot == 0 {
            2 * seq.n(1) as i64 + 2
        } else {
            2 * seq.w() as i64
        };
        values.push(b);
        for m in r_min..r_top {
            b += increment_dm(seq.n(m), seq.n(m + 1));
            values.push(b);
        }
    }
    let top_correction = if r_top == h { 2 * seq.n(h) as i64 } else { 0 };
    Ok(BoundaryProfile {
        r_min,
        values,
        top_correction,
    })
}

/// The sites of `cfg` in layers `1..=m`.
pub fn truncation(cfg: &Configuration, m: usize) -> Configuration {
    let sites = cfg.occupied_sites().filter(|v| v.y <= m);
    Configuration::from_sites(cfg.dims(), cfg.cap(), sites).expect("subset of a valid configuration")
}

/// A configuration with layer sequence `seq` whose truncations meet the
/// profile of [`boundary_lower_bound`]. Each partial layer is one run; the
/// run in layer 1 starts at column 0 and every higher run takes the offset
/// with the most edges down to the layer below, earliest offset on ties.
pub fn witness_config(seq: &LayerSequence, dims: LatticeDims) -> Result<Configuration> {
    seq.check_omega_bar()?;
    if seq.w() != dims.width() || seq.h() != dims.height() {
        return Err(Error::InvalidParameter(format!(
            "sequence of width {} and height {} does not fit a {}x{} lattice",
            seq.w(),
            seq.h(),
            dims.width(),
            dims.height()
        )));
    }
    let w = dims.width();
    let mut below = alloc::vec![true; w];
    let mut sites = Vec::with_capacity(seq.total());
    for y in 1..=seq.r_top() {
        let n = seq.n(y);
        let row: Vec<bool> = if n == w {
            alloc::vec![true; w]
        } else {
            let offset = if y == 1 {
                0
            } else {
                (0..w)
                    .max_by_key(|&o| (down_edges(&below, o, n), core::cmp::Reverse(o)))
                    .unwrap_or(0)
            };
            run(w, offset, n)
        };
        sites.extend(row.iter().enumerate().filter(|c| *c.1).map(|(x, _)| Site::new(x, y)));
        below = row;
    }
    Configuration::from_sites(dims, seq.total(), sites)
}

fn run(w: usize, offset: usize, len: usize) -> Vec<bool> {
    let mut row = alloc::vec![false; w];
    for i in 0..len {
        row[(offset + i) % w] = true;
    }
    row
}

/// Edges from a run of `len` sites starting at `offset` to the occupied
/// sites one layer down; `(x, y)` sits above `(x, y-1)` and `(x+1, y-1)`.
fn down_edges(below: &[bool], offset: usize, len: usize) -> usize {
    let w = below.len();
    (0..len)
        .map(|i| {
            let x = (offset + i) % w;
            below[x] as usize + below[(x + 1) % w] as usize
        })
        .sum()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::config::{globally_simply_connected, layer_sequence};
    use alloc::vec;
    use proptest::prelude::*;

    fn seq(w: usize, c: &[usize]) -> LayerSequence {
        LayerSequence::new(w, c.to_vec()).unwrap()
    }

    #[test]
    fn increment_values() {
        assert_eq!(increment_dm(3, 3), 4);
        assert_eq!(increment_dm(2, 5), 14);
        assert_eq!(increment_dm(4, 2), 2);
        assert_eq!(increment_dm(3, 4), 6);
    }

    #[test]
    fn profile_examples() {
        let p = boundary_lower_bound(&seq(6, &[3, 1, 0, 0])).unwrap();
        assert_eq!((p.r_min(), p.values()), (1, &[8i64, 10][..]));
        assert_eq!(p.at(2), Some(10));
        assert_eq!(p.at(3), None);
        let p = boundary_lower_bound(&seq(6, &[2, 3, 0, 0])).unwrap();
        assert_eq!(p.at(2), Some(12));
        let p = boundary_lower_bound(&seq(6, &[6, 2, 0, 0])).unwrap();
        assert_eq!(p.values()[0], 12);
        assert_eq!(p.last(), 14);
        let full = boundary_lower_bound(&seq(4, &[4, 4, 4])).unwrap();
        assert_eq!((full.last(), full.corrected()), (8, 0));
        assert_eq!(boundary_lower_bound(&seq(4, &[0, 0, 0])).unwrap().corrected(), 0);
        let gap = LayerSequence::from_raw(6, vec![3, 6, 0]);
        assert!(boundary_lower_bound(&gap).is_err());
    }

    #[test]
    fn witness_examples() {
        let d = LatticeDims::new(6, 4).unwrap();
        let t = witness_config(&seq(6, &[3, 1, 0, 0]), d).unwrap();
        assert_eq!(t.boundary(), 10);
        let t = witness_config(&seq(6, &[2, 3, 0, 0]), d).unwrap();
        assert_eq!(t.boundary(), 12);
        let t = witness_config(&seq(6, &[6, 6, 0, 0]), d).unwrap();
        assert_eq!(t.boundary(), 12);
        assert!(witness_config(&seq(5, &[1, 0, 0, 0]), d).is_err());
    }

    /// Random member of the no-gap class.
    pub(crate) fn arb_sequence() -> impl Strategy<Value = LayerSequence> {
        (3usize..12, 2usize..10).prop_flat_map(|(w, h)| {
            (0..=h, 0..=h, proptest::collection::vec(1..w, h)).prop_map(move |(full, top, partial)| {
                let full = full.min(top);
                let counts = (1..=h)
                    .map(|k| {
                        if k <= full {
                            w
                        } else if k <= top {
                            partial[k - 1]
                        } else {
                            0
                        }
                    })
                    .collect();
                LayerSequence::new(w, counts).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn witness_meets_every_truncation(s in arb_sequence()) {
            let d = LatticeDims::new(s.w(), s.h()).unwrap();
            let t = witness_config(&s, d).unwrap();
            prop_assert_eq!(layer_sequence(&t), s.clone());
            prop_assert!(globally_simply_connected(&t));
            let p = boundary_lower_bound(&s).unwrap();
            for m in p.r_min()..=s.r_top() {
                let b = truncation(&t, m).boundary();
                let bound = if m == s.h() { p.corrected() } else { p.at(m).unwrap() };
                prop_assert_eq!(b, bound, "truncation {} of {:?}", m, s.counts());
            }
        }
    }
}
