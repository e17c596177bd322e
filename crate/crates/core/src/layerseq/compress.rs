use alloc::vec;
use alloc::vec::Vec;

use super::LayerSequence;
use crate::error::Result;

/// One promotion: with `k1` the lowest and `k2` the highest layer where the
/// count jumps by at least 2 going up, and `k2 >= k1 + 2`, moves a site from
/// layer `k1 + 1` to layer `k2`. `None` once no such pair exists.
pub fn compress_step(seq: &LayerSequence) -> Result<Option<LayerSequence>> {
    seq.check_omega_bar()?;
    let jumps: Vec<usize> = (1..seq.h()).filter(|&k| seq.n(k + 1) >= seq.n(k) + 2).collect();
    let (Some(&k1), Some(&k2)) = (jumps.first(), jumps.last()) else {
        return Ok(None);
    };
    if k2 < k1 + 2 {
        return Ok(None);
    }
    let mut counts = seq.counts().to_vec();
    counts[k1] -= 1;
    counts[k2 - 1] += 1;
    Ok(Some(LayerSequence::from_raw(seq.w(), counts)))
}

/// Every sequence visited by repeated promotion, input first.
pub fn compress_trace(seq: &LayerSequence) -> Result<Vec<LayerSequence>> {
    let mut trail = vec![seq.clone()];
    while let Some(next) = compress_step(trail.last().expect("nonempty"))? {
        trail.push(next);
    }
    Ok(trail)
}

/// Promotes until at most two jumps of 2 or more remain, and those are
/// adjacent.
pub fn compress(seq: &LayerSequence) -> Result<LayerSequence> {
    let mut cur = seq.clone();
    while let Some(next) = compress_step(&cur)? {
        cur = next;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::super::bounds::tests::arb_sequence;
    use super::*;
    use crate::config::ScentFunction;
    use crate::layerseq::boundary_lower_bound;
    use proptest::prelude::*;

    fn seq(w: usize, c: &[usize]) -> LayerSequence {
        LayerSequence::new(w, c.to_vec()).unwrap()
    }

    #[test]
    fn single_promotion() {
        let s = seq(6, &[1, 3, 3, 5]);
        let next = compress_step(&s).unwrap().unwrap();
        assert_eq!(next.counts(), &[1, 2, 4, 5]);
        assert_eq!(boundary_lower_bound(&s).unwrap().last(), 28);
        assert_eq!(boundary_lower_bound(&next).unwrap().last(), 26);
        assert_eq!(compress(&s).unwrap(), next);
    }

    #[test]
    fn fixed_points() {
        let stair = seq(6, &[1, 2, 3, 4]);
        assert_eq!(compress(&stair).unwrap(), stair);
        let two = seq(9, &[1, 3, 5, 5]);
        assert_eq!(compress(&two).unwrap(), two);
    }

    proptest! {
        #[test]
        fn promotions_never_hurt(s in arb_sequence(), ks in proptest::collection::vec(1.0f64..4.0, 3)) {
            let scents: Vec<ScentFunction> = ks
                .iter()
                .map(|&k| ScentFunction::power(s.h(), k, 1.0).unwrap())
                .chain([ScentFunction::reciprocal(s.h(), ks[0], 1.0).unwrap()])
                .collect();
            let trail = compress_trace(&s).unwrap();
            for pair in trail.windows(2) {
                prop_assert!(pair[1].is_omega_bar());
                prop_assert_eq!(pair[1].total(), pair[0].total());
                let before = boundary_lower_bound(&pair[0]).unwrap().last();
                let after = boundary_lower_bound(&pair[1]).unwrap().last();
                prop_assert!(after <= before, "{:?} -> {:?}", pair[0].counts(), pair[1].counts());
                for sc in &scents {
                    prop_assert!(pair[1].scent_sum(sc) >= pair[0].scent_sum(sc) - 1e-12);
                }
            }
            let out = trail.last().unwrap();
            let jumps: Vec<usize> = (1..out.h()).filter(|&k| out.n(k + 1) >= out.n(k) + 2).collect();
            prop_assert!(jumps.len() <= 2);
            if jumps.len() == 2 {
                prop_assert_eq!(jumps[1], jumps[0] + 1);
            }
            let bound = 6 * out.w() as i64 + 4 * out.h() as i64;
            prop_assert!(boundary_lower_bound(out).unwrap().last() <= bound);
        }
    }
}
