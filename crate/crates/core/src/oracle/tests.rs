use super::*;
use crate::chain::{path_to_empty, AcceptanceMode};
use crate::config::{layer_sequence, unoccupied_neighbor_count, Convention};
use crate::layerseq::boundary_lower_bound;
use crate::observables::{mb_depth, mb_epsilon, multiple_ab_bridges};
use approx::assert_abs_diff_eq;

fn dims(w: usize, h: usize) -> LatticeDims {
    LatticeDims::new(w, h).unwrap()
}

fn params(beta: f64, eta: f64, cap: usize) -> ChainParams {
    ChainParams::new(beta, eta, cap).unwrap()
}

#[test]
fn small_counts() {
    assert_eq!(enumerate_omega(dims(3, 2), 0).unwrap().masks(), &[0]);
    assert_eq!(enumerate_omega(dims(3, 2), 1).unwrap().len(), 4);
    assert_eq!(enumerate_omega(dims(3, 2), 2).unwrap().len(), 13);
    assert!(matches!(
        enumerate_omega(dims(5, 5), 3),
        Err(Error::StateSpaceTooLarge { sites: 25, .. })
    ));
    assert!(enumerate_omega_limited(dims(4, 3), 3, 10).is_err());
}

#[test]
fn growth_matches_subsets() {
    for (w, h) in [(3, 2), (4, 2), (3, 3), (4, 3), (5, 3), (3, 5), (4, 4)] {
        for cap in [0, 1, 2, 5, w * h] {
            let a = enumerate_by_subsets(dims(w, h), cap).unwrap();
            let b = enumerate_by_growth(dims(w, h), cap).unwrap();
            assert_eq!(a, b, "{w}x{h} cap {cap}");
        }
    }
}

#[test]
fn gibbs_examples() {
    let space = enumerate_omega(dims(3, 2), 1).unwrap();
    let scent = ScentFunction::linear(2, 1.0).unwrap();
    let pi = exact_distribution(&space, &params(1.0, 1.0, 1), &scent).unwrap();
    let e4 = libm::exp(-4.0);
    assert_abs_diff_eq!(pi.probs[0], 1.0 / (1.0 + 3.0 * e4), epsilon = 1e-12);
    for p in &pi.probs[1..] {
        assert_abs_diff_eq!(*p, e4 / (1.0 + 3.0 * e4), epsilon = 1e-12);
    }
    assert_abs_diff_eq!(pi.z, 1.0 + 3.0 * e4, epsilon = 1e-12);
    let flat = exact_distribution(&space, &params(0.0, 1.0, 1), &scent).unwrap();
    assert!(flat.probs.iter().all(|p| (p - 0.25).abs() < 1e-15));
}

#[test]
fn product_form_agrees() {
    let space = enumerate_omega(dims(4, 3), 6).unwrap();
    let scent = ScentFunction::power(3, 2.0, 1.5).unwrap();
    for conv in [Convention::LambdaOnly, Convention::LambdaBar] {
        let p = params(0.7, 1.3, 6).with_convention(conv);
        let pi = exact_distribution(&space, &p, &scent).unwrap();
        for (i, c) in space.configs().enumerate() {
            let direct = libm::exp(-0.7 * pi.energies[i]);
            let product = product_form_weight(&c, &p, &scent).unwrap();
            assert!((direct - product).abs() <= 1e-12 * direct.max(1.0));
        }
    }
}

#[test]
fn matrix_examples() {
    let space = enumerate_omega(dims(3, 2), 1).unwrap();
    let scent = ScentFunction::linear(2, 1.0).unwrap();
    let m = transition_matrix(&space, &params(1.0, 1.0, 1), &scent).unwrap();
    for j in 1..4 {
        assert_abs_diff_eq!(m.get(0, j), libm::exp(-4.0) / 6.0, epsilon = 1e-15);
    }
    assert!(m.max_row_sum_error() <= 1e-12);
    let space = enumerate_omega(dims(4, 3), 6).unwrap();
    let scent = ScentFunction::linear(3, 1.0).unwrap();
    for mode in [AcceptanceMode::ExactGibbs, AcceptanceMode::PaperLiteral] {
        let m = transition_matrix(&space, &params(1.0, 1.0, 6).with_mode(mode), &scent).unwrap();
        assert!(m.max_row_sum_error() <= 1e-12);
        for i in 0..m.len() {
            for &(j, q) in m.row(i) {
                let flips = (space.masks()[i] ^ space.masks()[j]).count_ones();
                assert!(q >= 0.0 && flips <= 1);
                // every move can be undone
                assert!(m.get(j, i) > 0.0);
            }
        }
    }
}

#[test]
fn stationarity_and_the_literal_rule() {
    let space = enumerate_omega(dims(4, 3), 6).unwrap();
    let scent = ScentFunction::linear(3, 1.0).unwrap();
    for conv in [Convention::LambdaOnly, Convention::LambdaBar] {
        let exact = params(1.0, 1.0, 6).with_convention(conv);
        let pi = exact_distribution(&space, &exact, &scent).unwrap();
        let m = transition_matrix(&space, &exact, &scent).unwrap();
        let r = verify_stationarity(&m, &pi.probs, 1e-10).unwrap();
        assert!(r.pass && r.detailed_balance_residual <= 1e-12, "{r:?}");

        let literal = exact.with_mode(AcceptanceMode::PaperLiteral);
        let m = transition_matrix(&space, &literal, &scent).unwrap();
        let r = verify_stationarity(&m, &pi.probs, 1e-10).unwrap();
        assert!(!r.pass && r.stationarity_residual > 1e-3, "{r:?}");
        let plus = target_distribution(&space, &literal, &scent, TargetEnergy::PlusDegree).unwrap();
        assert!(verify_stationarity(&m, &plus.probs, 1e-10).unwrap().pass);
        let minus = target_distribution(&space, &literal, &scent, TargetEnergy::MinusDegree).unwrap();
        assert!(!verify_stationarity(&m, &minus.probs, 1e-10).unwrap().pass);
    }
    assert!(verify_stationarity(&TransitionMatrix { rows: Vec::new() }, &[1.0], 1e-10).is_err());
}

#[test]
fn census() {
    let c = count_by_boundary(&enumerate_omega(dims(3, 2), 1).unwrap()).unwrap();
    assert_eq!(c.counts[&0], 1);
    assert_eq!(c.counts[&4], 3);
    // the full lattice has no in-domain boundary either
    let c = count_by_boundary(&enumerate_omega(dims(3, 2), 6).unwrap()).unwrap();
    assert_eq!(c.counts[&0], 2);
    assert_eq!(c.bound(4), 1 << 10);
    let c = count_by_boundary(&enumerate_omega(dims(4, 3), 12).unwrap()).unwrap();
    assert_eq!(
        c.counts.values().sum::<u64>() as usize,
        enumerate_omega(dims(4, 3), 12).unwrap().len()
    );
}

#[test]
fn irreducible_and_peelable() {
    let scent = ScentFunction::linear(3, 1.0).unwrap();
    for cap in 0..=6 {
        let space = enumerate_omega(dims(4, 3), cap).unwrap();
        let m = transition_matrix(&space, &params(1.0, 1.0, cap), &scent).unwrap();
        let r = irreducibility(&m);
        assert!(r.strongly_connected && r.aperiodic());
        assert!(r.min_self_loop > 0.0);
        for c in space.configs() {
            let order = path_to_empty(&c).unwrap();
            assert_eq!(order.len(), c.len());
        }
    }
}

#[test]
fn enumerated_states_satisfy_the_model_invariants() {
    for (w, h) in [(3, 2), (4, 3), (3, 4), (5, 3)] {
        let space = enumerate_omega(dims(w, h), w * h).unwrap();
        for c in space.configs() {
            for v in c.occupied_sites() {
                assert!(unoccupied_neighbor_count(&c, v, Convention::LambdaBar).unwrap() < 6);
            }
            let seq = layer_sequence(&c);
            assert!(seq.is_omega_bar());
            let bound = boundary_lower_bound(&seq).unwrap().corrected();
            assert!(c.boundary() >= bound, "{:?}", c);
            for eps in [0.25, 0.34, 0.5, 0.67] {
                let Ok(d) = mb_depth(h, eps) else { continue };
                let brute = (1..=h - d).any(|a| {
                    let (a, b) = (a as f64 / h as f64, (a + d) as f64 / h as f64);
                    multiple_ab_bridges(&c, a, b).unwrap()
                });
                assert_eq!(!mb_epsilon(&c, eps).unwrap().is_empty(), brute);
            }
        }
    }
}

#[test]
fn empirical_and_tv() {
    let space = enumerate_omega(dims(3, 2), 1).unwrap();
    let e = empirical_distribution(&space, [0, 0, 1, 2]).unwrap();
    assert_eq!(e, vec![0.5, 0.25, 0.25, 0.0]);
    assert_abs_diff_eq!(total_variation(&e, &[0.25; 4]), 0.25);
    assert!(empirical_distribution(&space, [8]).is_err());
}

#[test]
fn neumaier_recovers_small_terms() {
    let s: NeumaierSum = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
    assert_eq!(s.value(), 2.0);
}
