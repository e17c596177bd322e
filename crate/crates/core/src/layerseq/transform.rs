//! Extension of a layer sequence that stops short of the top layer into one
//! that reaches it.
//!
//! Sequences are read as right-justified pictures: column `j` (counted from
//! 1) holds layer `k` iff `n_k >= j`. The steps are
//!
//! * pre: fill `min(u, (n - |σ|) / h)` empty columns with unused sites, where
//!   `u = w - max n_k - 1`; if that leaves no full column, move `h - D` sites
//!   one at a time from the highest layer holding at least two onto layers
//!   `D + 1, D + 2, ...`.
//! * mid: keep the `J = n_h` full columns, rebuild the bottom-supported
//!   columns as `floor(sum / h)` full columns, and push every other column
//!   to the top.
//! * post: hand the `m` sites left over from the rebuild to the topmost `m`
//!   layers holding fewer than `w - 1` sites.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{boundary_lower_bound, LayerSequence};
use crate::config::ScentFunction;
use crate::error::{Error, Result};

/// A quantity evaluated at the input and after each stage.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StageValues {
    pub input: f64,
    pub pre: f64,
    pub mid: f64,
    pub post: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ScentDeltas {
    pub input_to_pre: f64,
    pub pre_to_mid: f64,
    pub mid_to_post: f64,
    pub pre_to_post: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BoundDeltas {
    pub input_to_pre: i64,
    pub pre_to_mid: i64,
    pub mid_to_post: i64,
    pub input_to_post: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransformTrace {
    pub input: LayerSequence,
    pub pre: LayerSequence,
    pub mid: LayerSequence,
    pub post: LayerSequence,
    /// Empty columns available, `w - max n_k - 1`.
    pub u: usize,
    pub added_full_columns: usize,
    /// Sites moved up to form a column when none was full.
    pub moved_sites: usize,
    pub j_full: usize,
    pub j_bot: usize,
    pub leftover_m: usize,
    pub n_full: Vec<usize>,
    pub n_bot: Vec<usize>,
    pub n_top: Vec<usize>,
    pub scent: StageValues,
    pub scent_deltas: ScentDeltas,
    /// Corrected boundary bound of each stage.
    pub bounds: [i64; 4],
    pub bound_deltas: BoundDeltas,
    /// `4(h - D) - 2 max(w - u - D, |σ|/h - h/2)`, the leading terms of the
    /// bound on `bounds[3] - bounds[0]`.
    pub boundary_leading_term: f64,
    /// `|σ| φ/h (1 - D/h)`, the leading term of the scent gain from pre to
    /// post.
    pub scent_leading_term: f64,
}

impl TransformTrace {
    /// Checks conservation, stage validity, the scent inequalities and that
    /// the output reaches the top layer. `tol` is relative to the scent scale.
    pub fn check(&self, phi: f64, tol: f64) -> core::result::Result<(), String> {
        let h = self.input.h();
        for (name, s) in [("pre", &self.pre), ("mid", &self.mid), ("post", &self.post)] {
            if !s.is_omega_bar() {
                return Err(format!("{name} stage {:?} leaves the no-gap class", s.counts()));
            }
        }
        if self.pre.total() != self.input.total() + h * self.added_full_columns {
            return Err(format!(
                "pre holds {} sites, expected {} + {h} x {}",
                self.pre.total(),
                self.input.total(),
                self.added_full_columns
            ));
        }
        if self.mid.total() + self.leftover_m != self.pre.total() {
            return Err(format!(
                "mid holds {} sites plus {} left over, pre held {}",
                self.mid.total(),
                self.leftover_m,
                self.pre.total()
            ));
        }
        if self.post.total() != self.pre.total() {
            return Err(format!(
                "post holds {} sites, pre held {}",
                self.post.total(),
                self.pre.total()
            ));
        }
        if self.post.n(h) == 0 {
            return Err(format!("post {:?} does not reach layer {h}", self.post.counts()));
        }
        let scale = tol * (1.0 + self.scent.post.abs().max(self.scent.pre.abs()));
        let gain = phi * self.added_full_columns as f64;
        let d = &self.scent_deltas;
        if d.input_to_pre < gain - scale {
            return Err(format!("pre gained scent {} < {gain}", d.input_to_pre));
        }
        if d.pre_to_post < -scale {
            return Err(format!("scent fell by {} from pre to post", -d.pre_to_post));
        }
        if d.mid_to_post < -scale {
            return Err(format!("scent fell by {} from mid to post", -d.mid_to_post));
        }
        Ok(())
    }
}

/// Runs the three stages on `seq`, which must have no full layer and top
/// nonempty layer `D <= h - 1`, with `n` sites available in total.
pub fn bridge_transform(seq: &LayerSequence, n: usize, scent: &ScentFunction) -> Result<TransformTrace> {
    seq.check_omega_bar()?;
    let (w, h) = (seq.w(), seq.h());
    if scent.h() != h {
        return Err(Error::InvalidParameter(format!(
            "scent has {} layers, sequence has {h}",
            scent.h()
        )));
    }
    let d = seq.r_top();
    if d >= h {
        return Err(Error::InvalidParameter("sequence already reaches the top layer".into()));
    }
    if seq.r_bot() > 0 {
        return Err(Error::InvalidParameter(format!(
            "sequence {:?} has a full bottom layer",
            seq.counts()
        )));
    }
    let size = seq.total();
    if size > n {
        return Err(Error::InvalidParameter(format!("{size} sites exceed the cap of {n}")));
    }

    let max = seq.counts().iter().copied().max().unwrap_or(0);
    let u = w - max - 1;
    let added = u.min((n - size) / h);
    let mut pre: Vec<usize> = seq.counts().iter().map(|&c| c + added).collect();
    let mut moved = 0;
    if pre[h - 1] == 0 {
        for target in d..h {
            let Some(src) = pre.iter().rposition(|&c| c >= 2) else {
                return Err(Error::Infeasible(format!(
                    "cannot form a column: {:?} has no layer with two sites",
                    pre
                )));
            };
            pre[src] -= 1;
            pre[target] += 1;
            moved += 1;
        }
    }

    let j_full = pre[h - 1];
    let supported = |j: usize| (1..h).all(|k| pre[k] < j || pre[k - 1] >= j);
    let n_full = vec![j_full; h];
    let n_bot: Vec<usize> = (0..h)
        .map(|k| ((j_full + 1)..=w).filter(|&j| supported(j) && pre[k] >= j).count())
        .collect();
    let n_top: Vec<usize> = (0..h).map(|k| pre[k] - j_full - n_bot[k]).collect();
    let bot_total: usize = n_bot.iter().sum();
    let j_bot = bot_total / h;
    let m = bot_total - h * j_bot;
    let c_top: Vec<usize> = (1..=w).map(|i| n_top.iter().filter(|&&t| t >= i).count()).collect();
    let mid: Vec<usize> = (1..=h)
        .map(|k| j_full + j_bot + c_top.iter().filter(|&&c| c > h - k).count())
        .collect();

    let mut post = mid.clone();
    let mut left = m;
    for k in (0..h).rev() {
        if left == 0 {
            break;
        }
        if post[k] + 1 < w {
            post[k] += 1;
            left -= 1;
        }
    }
    if left > 0 {
        return Err(Error::Infeasible(format!(
            "{m} leftover sites but only {} layers below w - 1 in {mid:?}",
            m - left
        )));
    }

    let input = seq.clone();
    let pre = LayerSequence::from_raw(w, pre);
    let mid = LayerSequence::from_raw(w, mid);
    let post = LayerSequence::from_raw(w, post);
    let scent_at = |s: &LayerSequence| s.scent_sum(scent);
    let sc = StageValues {
        input: scent_at(&input),
        pre: scent_at(&pre),
        mid: scent_at(&mid),
        post: scent_at(&post),
    };
    let bound = |s: &LayerSequence| -> Result<i64> { Ok(boundary_lower_bound(s)?.corrected()) };
    let bounds = [bound(&input)?, bound(&pre)?, bound(&mid)?, bound(&post)?];
    let (hf, df) = (h as f64, d as f64);
    let boundary_leading_term = 4.0 * (hf - df) - 2.0 * ((w as f64 - u as f64 - df).max(size as f64 / hf - hf / 2.0));
    Ok(TransformTrace {
        u,
        added_full_columns: added,
        moved_sites: moved,
        j_full,
        j_bot,
        leftover_m: m,
        n_full,
        n_bot,
        n_top,
        scent_deltas: ScentDeltas {
            input_to_pre: sc.pre - sc.input,
            pre_to_mid: sc.mid - sc.pre,
            mid_to_post: sc.post - sc.mid,
            pre_to_post: sc.post - sc.pre,
        },
        scent: sc,
        bound_deltas: BoundDeltas {
            input_to_pre: bounds[1] - bounds[0],
            pre_to_mid: bounds[2] - bounds[1],
            mid_to_post: bounds[3] - bounds[2],
            input_to_post: bounds[3] - bounds[0],
        },
        bounds,
        boundary_leading_term,
        scent_leading_term: size as f64 * scent.phi() / hf * (1.0 - df / hf),
        input,
        pre,
        mid,
        post,
    })
}
