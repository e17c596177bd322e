use super::*;
use crate::config::{delta_hamiltonian_with, locally_simply_connected, unoccupied_neighbor_count};
use crate::observables::mb_epsilon;
use approx::assert_abs_diff_eq;
use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest, Strategy};

fn dims(w: usize, h: usize) -> LatticeDims {
    LatticeDims::new(w, h).unwrap()
}

fn s(x: usize, y: usize) -> Site {
    Site::new(x, y)
}

fn chain(w: usize, h: usize, cap: usize, params: ChainParams) -> Chain {
    let scent = ScentFunction::linear(h, 1.0).unwrap();
    Chain::new(Configuration::empty(dims(w, h), cap), params, scent).unwrap()
}

#[test]
fn add_thresholds_on_empty() {
    let p = ChainParams::new(1.0, 1.0, 8).unwrap();
    let mut c = chain(6, 4, 8, p);
    let out = c.propose(s(2, 1), 0.3);
    assert_eq!((out.proposal, out.accepted), (Move::Add, false));
    assert_eq!(out.reject_reason, Some(RejectReason::Metropolis));
    assert_abs_diff_eq!(out.delta_h, 4.0);
    assert!(c.config().is_empty());
    let out = c.propose(s(2, 1), libm::exp(-4.0));
    assert!(out.accepted);

    let lit = p.with_mode(AcceptanceMode::PaperLiteral);
    let mut c = chain(6, 4, 8, lit);
    let out = c.propose(s(2, 1), 0.3);
    assert!(!out.accepted);
    assert_abs_diff_eq!(out.delta_h, 8.0);
    assert!(c.propose(s(2, 1), libm::exp(-8.0)).accepted);
}

#[test]
fn literal_removal_with_three_free_neighbors_saturates() {
    let p = ChainParams::new(1.0, 1.0, 6)
        .unwrap()
        .with_mode(AcceptanceMode::PaperLiteral);
    let scent = ScentFunction::zero(4).unwrap();
    let start = Configuration::from_sites(dims(6, 4), 6, [s(1, 1), s(2, 1), s(3, 1)]).unwrap();
    assert_eq!(
        unoccupied_neighbor_count(&start, s(3, 1), Convention::LambdaOnly).unwrap(),
        3
    );
    let mut c = Chain::new(start, p, scent).unwrap();
    let out = c.propose(s(3, 1), 1.0);
    assert!(out.accepted);
    assert_abs_diff_eq!(out.delta_h, -6.0);
}

#[test]
fn gates() {
    let p = ChainParams::new(1.0, 1.0, 1).unwrap();
    let mut c = chain(6, 4, 1, p);
    let out = c.propose(s(0, 2), 0.0);
    assert_eq!(out.reject_reason, Some(RejectReason::NotLocallySc));
    assert!(c.propose(s(0, 1), 0.0).accepted);
    let out = c.propose(s(1, 1), 0.0);
    assert_eq!(out.reject_reason, Some(RejectReason::CapReached));
    assert_eq!(c.steps(), 3);
}

#[test]
fn params() {
    let p = ChainParams::from_density(1.5, 2.0, 1.0, dims(24, 8)).unwrap();
    assert_eq!(p.cap_n(), 64);
    assert_eq!(p.rho(), Some(1.0));
    assert_abs_diff_eq!(p.lambda(), libm::exp(1.5), epsilon = 1e-12);
    assert_abs_diff_eq!(p.gamma(), libm::exp(3.0), epsilon = 1e-12);
    assert!(ChainParams::new(-1.0, 1.0, 3).is_err());
    assert!(ChainParams::new(1.0, f64::NAN, 3).is_err());
    let scent = ScentFunction::linear(4, 1.0).unwrap();
    let full = Configuration::from_sites(dims(6, 4), 6, (0..6).map(|x| s(x, 1))).unwrap();
    assert!(Chain::new(full, ChainParams::new(1.0, 1.0, 5).unwrap(), scent.clone()).is_err());
    let floating = Configuration::from_sites(dims(6, 4), 6, [s(0, 2)]).unwrap();
    assert!(Chain::new(floating, ChainParams::new(1.0, 1.0, 5).unwrap(), scent).is_err());
}

#[test]
fn schedules() {
    let p = ChainParams::new(1.0, 1.0, 8).unwrap().with_seed(7);
    let mut c = chain(6, 4, 8, p);
    let mut sched = Schedule::new(0);
    sched.epsilon = 0.5;
    assert!(c.run(&sched).unwrap().is_empty());
    assert!(c.config().is_empty());
    let sched = Schedule {
        steps: 10_000,
        burn_in: 2_500,
        sample_every: 7,
        recheck_every: 1_000,
        epsilon: 0.5,
    };
    let a = c.run(&sched).unwrap();
    assert_eq!(a.len() as u64, sched.sample_count());
    assert_eq!(a[0].step, 2_507);
    let mut again = chain(6, 4, 8, p);
    again.run(&Schedule::new(0)).unwrap();
    assert_eq!(again.run(&sched).unwrap(), a);
    let bad = Schedule {
        burn_in: 20_000,
        ..sched
    };
    assert!(c.run(&bad).is_err());
    let shallow = Schedule { epsilon: 0.1, ..sched };
    assert!(c.run(&shallow).is_err());
}

#[test]
fn samples_report_energies() {
    let p = ChainParams::new(0.5, 2.0, 10).unwrap().with_seed(3);
    let mut c = chain(5, 4, 10, p);
    let sched = Schedule {
        steps: 4_000,
        burn_in: 0,
        sample_every: 50,
        recheck_every: 100,
        epsilon: 0.5,
    };
    for conv in [Convention::LambdaOnly, Convention::LambdaBar] {
        let mut c2 = chain(5, 4, 10, p.with_convention(conv));
        let mut seen = 0;
        c2.run_with(&sched, |smp, cfg| {
            assert_eq!(smp.particles, cfg.len());
            seen += 1;
            assert_eq!(smp.particles, smp.layers.total());
            assert_abs_diff_eq!(smp.hamiltonian, smp.boundary as f64 - 2.0 * smp.scent, epsilon = 1e-9);
        })
        .unwrap();
        assert_eq!(seen, 80);
    }
    c.run(&sched).unwrap();
    let e = crate::config::energy_terms(c.config(), c.scent(), 2.0).unwrap();
    let smp = c.sample(0.5).unwrap();
    assert_eq!(smp.boundary, e.boundary);
    assert_abs_diff_eq!(smp.scent, e.scent, epsilon = 1e-9);
}

#[test]
fn audit_catches_corruption() {
    let p = ChainParams::new(1.0, 1.0, 24).unwrap();
    let start = Configuration::from_sites(dims(6, 4), 24, (0..6).map(|x| s(x, 1))).unwrap();
    let mut c = Chain::new(start, p, ScentFunction::linear(4, 1.0).unwrap()).unwrap();
    assert!(c.check_invariants().is_ok());
    c.cfg.toggle(3, 3);
    match c.check_invariants() {
        Err(Error::InvariantViolation { dump, .. }) => assert!(dump.contains('#')),
        other => panic!("expected a violation, got {other:?}"),
    }
}

#[test]
fn streams_differ() {
    let mut a = stream_rng(1, 0, 0);
    let mut b = stream_rng(1, 0, 1);
    let mut c = stream_rng(1, 1, 0);
    let (x, y, z): (u64, u64, u64) = (a.random(), b.random(), c.random());
    assert!(x != y && y != z && x != z);
    assert_eq!(stream_rng(1, 3, 4).random::<u64>(), stream_rng(1, 3, 4).random::<u64>());
}

#[test]
fn peel_examples() {
    let d = dims(6, 4);
    assert!(path_to_empty(&Configuration::empty(d, 4)).unwrap().is_empty());
    let column = Configuration::from_sites(d, 4, [s(0, 1), s(0, 2), s(0, 3)]).unwrap();
    assert_eq!(path_to_empty(&column).unwrap(), vec![s(0, 3), s(0, 2), s(0, 1)]);
    let run = Configuration::from_sites(d, 4, [s(0, 1), s(1, 1), s(2, 1)]).unwrap();
    assert_eq!(path_to_empty(&run).unwrap(), vec![s(2, 1), s(1, 1), s(0, 1)]);
    let floating = Configuration::from_sites(d, 4, [s(0, 2)]).unwrap();
    assert!(path_to_empty(&floating).is_err());
}

/// Outcome of one step recomputed from the configuration-level predicates.
fn oracle_outcome(
    cfg: &Configuration,
    v: Site,
    u: f64,
    params: &ChainParams,
    scent: &ScentFunction,
) -> (Move, bool, f64) {
    let mv = if cfg.is_occupied(v) { Move::Remove } else { Move::Add };
    let delta = match params.mode() {
        AcceptanceMode::ExactGibbs => {
            delta_hamiltonian_with(cfg, v, mv, scent, params.eta(), params.convention()).unwrap()
        }
        AcceptanceMode::PaperLiteral => {
            let b = unoccupied_neighbor_count(cfg, v, params.convention()).unwrap() as f64;
            let e = 2.0 * b - params.eta() * scent.value(v.y);
            if mv == Move::Remove {
                -e
            } else {
                e
            }
        }
    };
    let ok = locally_simply_connected(cfg, v).unwrap()
        && (mv == Move::Remove || cfg.len() < params.cap_n())
        && u <= libm::exp(-params.beta() * delta).min(1.0);
    (mv, ok, delta)
}

fn arb_params() -> impl Strategy<Value = (usize, usize, ChainParams)> {
    (
        3usize..8,
        2usize..7,
        0.0f64..3.0,
        0.0f64..4.0,
        any::<bool>(),
        any::<bool>(),
        any::<u64>(),
    )
        .prop_map(|(w, h, beta, eta, literal, bar, seed)| {
            let mode = if literal {
                AcceptanceMode::PaperLiteral
            } else {
                AcceptanceMode::ExactGibbs
            };
            let conv = if bar {
                Convention::LambdaBar
            } else {
                Convention::LambdaOnly
            };
            let p = ChainParams::new(beta, eta, w * h / 2)
                .unwrap()
                .with_mode(mode)
                .with_convention(conv)
                .with_seed(seed);
            (w, h, p)
        })
}

proptest! {
    #[test]
    fn table_matches_direct_rule((w, h, p) in arb_params()) {
        let scent = ScentFunction::power(h, 2.0, 1.5).unwrap();
        let mut c = Chain::new(Configuration::empty(dims(w, h), p.cap_n()), p, scent.clone()).unwrap();
        let mut free = Configuration::empty(dims(w, h), p.cap_n());
        let mut rng = ChaCha8Rng::seed_from_u64(p.seed() ^ 1);
        let mut free_rng = ChaCha8Rng::seed_from_u64(p.seed() ^ 1);
        for _ in 0..400 {
            let v = free.dims().site_at(rng.random_range(0..(w * h) as u64) as usize);
            let u: f64 = rng.random();
            let (mv, ok, delta) = oracle_outcome(c.config(), v, u, &p, &scent);
            let out = c.propose(v, u);
            prop_assert_eq!((out.proposal, out.accepted), (mv, ok));
            prop_assert!((out.delta_h - delta).abs() < 1e-9);
            let free_out = step(&mut free, &p, &scent, &mut free_rng).unwrap();
            prop_assert_eq!(free_out, out);
            prop_assert_eq!(&free, c.config());
        }
    }

    #[test]
    fn trajectories_stay_in_the_state_space((w, h, p) in arb_params()) {
        let scent = ScentFunction::linear(h, 1.0).unwrap();
        let mut c = Chain::new(Configuration::empty(dims(w, h), p.cap_n()), p, scent).unwrap();
        for _ in 0..600 {
            let out = c.step();
            if out.accepted {
                let v = out.chosen_site;
                prop_assert!(globally_simply_connected(c.config()));
                prop_assert!(c.config().len() <= p.cap_n());
                prop_assert!(locally_simply_connected(c.config(), v).unwrap());
            }
        }
        prop_assert!(c.check_invariants().is_ok());
        prop_assert!(path_to_empty(c.config()).is_ok());
    }

    #[test]
    fn multiple_bridges_are_monotone_in_depth(seed in any::<u64>()) {
        let p = ChainParams::new(0.3, 1.0, 40).unwrap().with_seed(seed);
        let mut c = chain(10, 8, 40, p);
        for _ in 0..20 {
            for _ in 0..500 {
                c.step();
            }
            for (deep, shallow) in [(0.5, 0.25), (0.375, 0.125), (0.75, 0.5)] {
                if !mb_epsilon(c.config(), deep).unwrap().is_empty() {
                    prop_assert!(!mb_epsilon(c.config(), shallow).unwrap().is_empty());
                }
            }
        }
    }
}
