//! Two separated towers on a full base cost extra boundary compared with
//! the witness of their merged layer sequence.

use bridgesim_core::config::{globally_simply_connected, layer_sequence};
use bridgesim_core::layerseq::witness_config;
use bridgesim_core::observables::multiple_ab_bridges;
use bridgesim_core::{Configuration, LatticeDims, Site};
use proptest::prelude::*;

/// Full layers below `m`, then towers of widths `t1`, `t2` at column
/// offsets 0 and `o2` rising to layers `r1` and `r2`. Each tower leans so
/// that it stays a vertical chain of columns.
fn towers(
    w: usize,
    h: usize,
    m: usize,
    (t1, r1): (usize, usize),
    (o2, t2, r2): (usize, usize, usize),
) -> Configuration {
    let d = LatticeDims::new(w, h).unwrap();
    let mut sites = Vec::new();
    for y in 1..m {
        sites.extend((0..w).map(|x| Site::new(x, y)));
    }
    for (offset, width, top) in [(0, t1, r1), (o2, t2, r2)] {
        for y in m..=top {
            for i in 0..width {
                sites.push(Site::new((offset + i + w * h - (y - 1)) % w, y));
            }
        }
    }
    Configuration::from_sites(d, w * h, sites).unwrap()
}

fn arb_towers() -> impl Strategy<Value = (Configuration, usize, usize)> {
    (2usize..10, 1usize..4, 1usize..4).prop_flat_map(|(h, t1, t2)| {
        let w_min = t1 + t2 + 2;
        (w_min..w_min + 6, 1..=h, Just((h, t1, t2))).prop_flat_map(|(w, m, (h, t1, t2))| {
            (m..=h, m..=h, t1 + 1..=w - t2 - 1).prop_map(move |(ra, rb, o2)| {
                let (r1, r2) = (ra.max(rb), ra.min(rb));
                (towers(w, h, m, (t1, r1), (o2, t2, r2)), m, r2)
            })
        })
    })
}

#[test]
fn hand_example() {
    let c = towers(8, 5, 2, (1, 4), (4, 1, 4));
    assert!(multiple_ab_bridges(&c, 0.4, 0.8).unwrap());
    let t = witness_config(&layer_sequence(&c), c.dims()).unwrap();
    assert_eq!((c.boundary(), t.boundary()), (36, 26));
}

proptest! {
    #[test]
    fn separation_costs_twice_the_overlap((c, m, r2) in arb_towers()) {
        prop_assert!(globally_simply_connected(&c));
        let t = witness_config(&layer_sequence(&c), c.dims()).unwrap();
        let gap = c.boundary() - t.boundary();
        prop_assert!(gap >= 2 * (r2 - m + 1) as i64, "gap {} for overlap {}", gap, r2 - m + 1);
    }
}
