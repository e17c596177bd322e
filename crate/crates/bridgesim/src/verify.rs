use std::collections::BTreeMap;
use std::fmt::Write as _;

use bridgesim_core::chain::{path_to_empty, stream_rng};
use bridgesim_core::config::{globally_simply_connected, layer_sequence, locally_simply_connected};
use bridgesim_core::layerseq::{
    boundary_lower_bound, bridge_transform, compress, compress_trace, convex_approx, sandwich_margin, truncation,
    witness_config,
};
use bridgesim_core::observables::render;
use bridgesim_core::observables::RenderFormat;
use bridgesim_core::oracle::{
    count_by_boundary, enumerate_omega, exact_distribution, irreducibility, product_form_weight, target_distribution,
    transition_matrix, verify_stationarity, TargetEnergy,
};
use bridgesim_core::{
    AcceptanceMode, Chain, ChainParams, Configuration, Convention, LatticeDims, LayerSequence, ScentFunction, Schedule,
};
use rand::Rng;
use serde::Serialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Gibbs,
    Connectivity,
    Layerseq,
    Counting,
    Convex,
    Transform,
    Irreducibility,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::Gibbs,
        Suite::Connectivity,
        Suite::Layerseq,
        Suite::Counting,
        Suite::Convex,
        Suite::Transform,
        Suite::Irreducibility,
    ];
}

/// Sizes of the randomized and sampled checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Limits {
    /// Largest enumerated state space.
    pub max_states: usize,
    /// Steps of the connectivity run.
    pub chain_steps: u64,
    /// Random inputs per randomized check.
    pub cases: usize,
    /// Chain samples for the boundary bound.
    pub samples: usize,
    pub seed: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_states: crate::experiment::max_states(),
            chain_steps: 1_000_000,
            cases: 1_000,
            samples: 10_000,
            seed: 1,
        }
    }
}

/// Outcome of one property. Informational checks record a measurement and
/// never fail the suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub pass: bool,
    pub informational: bool,
    pub detail: String,
    pub metrics: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub pass: bool,
    pub limits: Limits,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_counterexample: Option<String>,
}

impl VerifyReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn human(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let tag = match (c.informational, c.pass) {
                (true, _) => "INFO",
                (false, true) => "PASS",
                (false, false) => "FAIL",
            };
            let _ = writeln!(s, "{tag} {:?}/{}: {}", c.suite, c.name, c.detail);
            if let Some(ce) = &c.counterexample {
                let _ = writeln!(s, "    counterexample: {}", ce.replace('\n', "\n    "));
            }
        }
        let _ = writeln!(
            s,
            "{}",
            if self.pass {
                "all checks passed"
            } else {
                "verification FAILED"
            }
        );
        s
    }
}

struct Builder {
    suite: Suite,
    checks: Vec<Check>,
}

impl Builder {
    fn push(&mut self, name: &str, pass: bool, detail: String, metrics: &[(&str, f64)], ce: Option<String>) {
        self.checks.push(Check {
            suite: self.suite,
            name: name.into(),
            pass,
            informational: false,
            detail,
            metrics: metrics.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            counterexample: if pass { None } else { ce },
        });
    }

    fn info(&mut self, name: &str, detail: String, metrics: &[(&str, f64)]) {
        self.push(name, true, detail, metrics, None);
        self.checks.last_mut().expect("just pushed").informational = true;
    }
}

fn dims(w: usize, h: usize) -> LatticeDims {
    LatticeDims::new(w, h).expect("fixed dimensions are valid")
}

fn enumerate(d: LatticeDims, cap: usize, limits: &Limits) -> Result<bridgesim_core::oracle::StateSpace> {
    let space = enumerate_omega(d, cap)?;
    if space.len() > limits.max_states {
        return Err(CliError::Config(format!(
            "{} states exceed the limit of {}",
            space.len(),
            limits.max_states
        )));
    }
    Ok(space)
}

fn gibbs(b: &mut Builder, limits: &Limits) -> Result<()> {
    let space = enumerate(dims(4, 3), 6, limits)?;
    let scent = ScentFunction::linear(3, 1.0)?;
    for conv in [Convention::LambdaOnly, Convention::LambdaBar] {
        let p = ChainParams::new(1.0, 1.0, 6)?.with_convention(conv);
        let pi = exact_distribution(&space, &p, &scent)?;
        let m = transition_matrix(&space, &p, &scent)?;
        let r = verify_stationarity(&m, &pi.probs, 1e-10)?;
        let pass = r.pass && r.detailed_balance_residual <= 1e-12;
        b.push(
            &format!("exact_stationarity_{}", conv_name(conv)),
            pass,
            format!(
                "{} states, |piP - pi|_inf = {:.3e}, detailed balance {:.3e}",
                space.len(),
                r.stationarity_residual,
                r.detailed_balance_residual
            ),
            &[
                ("stationarity_residual", r.stationarity_residual),
                ("detailed_balance_residual", r.detailed_balance_residual),
                ("row_sum_error", r.row_sum_error),
            ],
            Some(format!("{r:?}")),
        );
        let worst = space
            .configs()
            .enumerate()
            .map(|(i, c)| {
                let direct = (-p.beta() * pi.energies[i]).exp();
                let product = product_form_weight(&c, &p, &scent).map_err(CliError::from)?;
                Ok((direct - product).abs() / direct.max(1.0))
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        b.push(
            &format!("product_form_{}", conv_name(conv)),
            worst <= 1e-12,
            format!("largest relative gap between exp(-beta H) and the lambda/gamma product {worst:.3e}"),
            &[("max_relative_gap", worst)],
            None,
        );
    }

    // The literal rule drops the degree term; probe which measure it keeps.
    let p = ChainParams::new(1.0, 1.0, 6)?.with_mode(AcceptanceMode::PaperLiteral);
    let m = transition_matrix(&space, &p, &scent)?;
    for (name, target) in [
        ("literal_vs_gibbs", TargetEnergy::Hamiltonian),
        ("literal_vs_h_minus_degree", TargetEnergy::MinusDegree),
        ("literal_vs_h_plus_degree", TargetEnergy::PlusDegree),
    ] {
        let pi = target_distribution(&space, &p, &scent, target)?;
        let r = verify_stationarity(&m, &pi.probs, 1e-10)?;
        b.info(
            name,
            format!(
                "{}: |piP - pi|_inf = {:.3e}, detailed balance {:.3e}",
                if r.pass { "stationary" } else { "not stationary" },
                r.stationarity_residual,
                r.detailed_balance_residual
            ),
            &[
                ("stationary", f64::from(u8::from(r.pass))),
                ("stationarity_residual", r.stationarity_residual),
                ("detailed_balance_residual", r.detailed_balance_residual),
            ],
        );
    }
    Ok(())
}

fn conv_name(c: Convention) -> &'static str {
    match c {
        Convention::LambdaOnly => "lambda_only",
        Convention::LambdaBar => "lambda_bar",
    }
}

fn connectivity(b: &mut Builder, limits: &Limits) -> Result<()> {
    // every locally simply connected flip keeps the state simply connected
    for (w, h) in [(3, 4), (4, 3)] {
        let d = dims(w, h);
        let space = enumerate(d, d.sites(), limits)?;
        let mut flips = 0u64;
        let mut bad = None;
        'outer: for c in space.configs() {
            for v in d.domain_sites() {
                let grow = !c.is_occupied(v);
                if (grow && c.len() == c.cap()) || !locally_simply_connected(&c, v)? {
                    continue;
                }
                let mut next = c.clone();
                if grow {
                    next.add(v)?;
                } else {
                    next.remove(v)?;
                }
                flips += 1;
                if !globally_simply_connected(&next) {
                    bad = Some(format!(
                        "flip ({}, {}) of\n{}",
                        v.x,
                        v.y,
                        render(&c, RenderFormat::Ascii)
                    ));
                    break 'outer;
                }
            }
        }
        b.push(
            &format!("local_flips_preserve_connectivity_{w}x{h}"),
            bad.is_none(),
            format!("{flips} locally simply connected flips over {} states", space.len()),
            &[("flips", flips as f64)],
            bad,
        );
    }

    // beta 1 keeps the chain sparse, beta 0.3 packs it against the cap
    for (name, beta) in [
        ("chain_run_stays_connected", 1.0),
        ("dense_chain_run_stays_connected", 0.3),
    ] {
        let params = ChainParams::new(beta, 2.0, 100)?.with_seed(limits.seed);
        let scent = ScentFunction::linear(10, 1.0)?;
        let mut chain = Chain::new(Configuration::empty(dims(20, 10), 100), params, scent)?;
        let schedule = Schedule {
            steps: limits.chain_steps,
            burn_in: 0,
            sample_every: 1_000,
            recheck_every: 1_000,
            epsilon: 0.3,
        };
        let audits = limits.chain_steps / 1_000;
        let (mut sizes, mut count) = (0.0, 0u64);
        match chain.run_with(&schedule, |s, _| {
            sizes += s.particles as f64;
            count += 1;
        }) {
            Ok(()) => {
                let mean = sizes / count.max(1) as f64;
                b.push(
                    name,
                    true,
                    format!(
                        "20x10, n = 100, beta {beta}, eta 2: {} steps, {audits} global audits, 0 violations, mean size {mean:.1}",
                        limits.chain_steps
                    ),
                    &[("audits", audits as f64), ("violations", 0.0), ("mean_particles", mean)],
                    None,
                )
            }
            Err(bridgesim_core::Error::InvariantViolation { step, reason, dump }) => b.push(
                name,
                false,
                format!("violation at step {step}: {reason}"),
                &[("violations", 1.0)],
                Some(dump),
            ),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(())
}

/// Random sequence with no gap: full layers, then partial ones, then empty.
pub fn random_omega_bar<R: Rng>(rng: &mut R) -> LayerSequence {
    let w = rng.random_range(3..12usize);
    let h = rng.random_range(2..10usize);
    let top = rng.random_range(0..=h);
    let full = rng.random_range(0..=h).min(top);
    let counts = (1..=h)
        .map(|k| {
            if k <= full {
                w
            } else if k <= top {
                rng.random_range(1..w)
            } else {
                0
            }
        })
        .collect();
    LayerSequence::new(w, counts).expect("built in the no-gap class")
}

/// Random nondecreasing table with `S(1) = 0` and height `h`.
fn random_scent_table<R: Rng>(rng: &mut R, h: usize) -> Result<ScentFunction> {
    let mut v = vec![0.0];
    for _ in 1..h {
        let last = v[v.len() - 1];
        v.push(last + rng.random_range(0.0..2.0));
    }
    Ok(ScentFunction::from_table(v)?)
}

fn scent_family<R: Rng>(rng: &mut R, h: usize) -> Result<Vec<ScentFunction>> {
    Ok(vec![
        ScentFunction::linear(h, 1.0)?,
        ScentFunction::power(h, rng.random_range(1.0..4.0), 1.0)?,
        ScentFunction::reciprocal(h, rng.random_range(1.0..4.0), 1.0)?,
        random_scent_table(rng, h)?,
    ])
}

fn layerseq(b: &mut Builder, limits: &Limits) -> Result<()> {
    // boundary lower bound along chain trajectories
    let (w, h, n) = (8, 6, 30);
    let cells = [
        (0.5, 0.0),
        (0.5, 3.0),
        (1.0, 1.0),
        (1.0, 6.0),
        (2.0, 0.0),
        (2.0, 3.0),
        (3.0, 8.0),
    ];
    let per_cell = limits.samples.div_ceil(cells.len());
    let mut samples = 0u64;
    let mut bad = None;
    for (i, &(beta, eta)) in cells.iter().enumerate() {
        let params = ChainParams::new(beta, eta, n)?;
        let rng = stream_rng(limits.seed, i as u32, 0);
        let mut chain = Chain::with_rng(
            Configuration::empty(dims(w, h), n),
            params,
            ScentFunction::linear(h, 1.0)?,
            rng,
        )?;
        let schedule = Schedule {
            steps: 10_000 + 50 * per_cell as u64,
            burn_in: 10_000,
            sample_every: 50,
            recheck_every: 10_000,
            epsilon: 0.34,
        };
        let mut failure = None;
        chain.run_with(&schedule, |_, cfg| {
            samples += 1;
            if failure.is_some() {
                return;
            }
            let seq = layer_sequence(cfg);
            match boundary_lower_bound(&seq) {
                Ok(p) if cfg.boundary() >= p.corrected() => {}
                Ok(p) => {
                    failure = Some(format!(
                        "B = {} < {} for {:?}\n{}",
                        cfg.boundary(),
                        p.corrected(),
                        seq.counts(),
                        render(cfg, RenderFormat::Ascii)
                    ))
                }
                Err(e) => failure = Some(format!("{e}\n{}", render(cfg, RenderFormat::Ascii))),
            }
        })?;
        if bad.is_none() {
            bad = failure;
        }
    }
    b.push(
        "sampled_boundary_bound",
        bad.is_none() && samples >= limits.samples as u64,
        format!("{samples} chain samples over {} (beta, eta) cells", cells.len()),
        &[("samples", samples as f64)],
        bad,
    );

    let mut rng = stream_rng(limits.seed, 1 << 20, 0);
    let mut bad = None;
    for _ in 0..limits.cases {
        let s = random_omega_bar(&mut rng);
        let t = witness_config(&s, dims(s.w(), s.h()))?;
        let p = boundary_lower_bound(&s)?;
        for m in p.r_min()..=s.r_top() {
            let got = truncation(&t, m).boundary();
            let bound = if m == s.h() {
                p.corrected()
            } else {
                p.at(m).expect("inside the profile")
            };
            if got > bound || layer_sequence(&t) != s {
                bad.get_or_insert_with(|| format!("{:?} truncation {m}: B = {got} > {bound}", s.counts()));
            }
        }
    }
    b.push(
        "witness_meets_truncation_bounds",
        bad.is_none(),
        format!("{} random sequences", limits.cases),
        &[("cases", limits.cases as f64)],
        bad,
    );

    let mut bad = None;
    let mut steps = 0u64;
    let mut worst_slack = i64::MIN;
    for _ in 0..limits.cases {
        let s = random_omega_bar(&mut rng);
        let scents = scent_family(&mut rng, s.h())?;
        let trail = compress_trace(&s)?;
        for pair in trail.windows(2) {
            steps += 1;
            let before = boundary_lower_bound(&pair[0])?.corrected();
            let after = boundary_lower_bound(&pair[1])?.corrected();
            if after > before {
                bad.get_or_insert_with(|| {
                    format!(
                        "{:?} -> {:?}: bound {before} -> {after}",
                        pair[0].counts(),
                        pair[1].counts()
                    )
                });
            }
            for sc in &scents {
                if pair[1].scent_sum(sc) < pair[0].scent_sum(sc) - 1e-12 {
                    bad.get_or_insert_with(|| format!("{:?} -> {:?}: scent falls", pair[0].counts(), pair[1].counts()));
                }
            }
        }
        let out = compress(&s)?;
        let bound = boundary_lower_bound(&out)?.corrected();
        let cap = 6 * s.w() as i64 + 4 * s.h() as i64;
        worst_slack = worst_slack.max(bound - cap);
        if bound > cap || out.total() != s.total() {
            bad.get_or_insert_with(|| {
                format!(
                    "{:?} -> {:?}: bound {bound} > 6w + 4h = {cap}",
                    s.counts(),
                    out.counts()
                )
            });
        }
    }
    b.push(
        "compression",
        bad.is_none(),
        format!(
            "{} random sequences, {steps} promotions; max of bound - (6w + 4h) is {worst_slack}",
            limits.cases
        ),
        &[
            ("promotions", steps as f64),
            ("max_excess_over_cap", worst_slack as f64),
        ],
        bad,
    );
    Ok(())
}

fn counting(b: &mut Builder, limits: &Limits) -> Result<()> {
    for (w, h) in [(3, 2), (4, 3)] {
        let d = dims(w, h);
        let census = count_by_boundary(&enumerate(d, d.sites(), limits)?);
        let (pass, detail, ce) = match census {
            Ok(c) => {
                let tight = c
                    .counts
                    .iter()
                    .map(|(&l, &n)| n as f64 / c.bound(l) as f64)
                    .fold(0.0, f64::max);
                (
                    true,
                    format!("{} boundary lengths, largest count / bound {tight:.3e}", c.counts.len()),
                    None,
                )
            }
            Err(e) => (false, e.to_string(), Some(e.to_string())),
        };
        b.push(&format!("census_{w}x{h}"), pass, detail, &[], ce);
    }
    Ok(())
}

/// Random table with nondecreasing increments and `f(1) = 0`.
pub fn random_nondecelerating<R: Rng>(rng: &mut R, h: usize) -> Vec<f64> {
    let mut f = vec![0.0];
    let mut d = 0.0;
    for _ in 1..h {
        d += rng.random_range(0.0..3.0);
        f.push(f[f.len() - 1] + d);
    }
    f
}

fn convex(b: &mut Builder, limits: &Limits) -> Result<()> {
    let mut rng = stream_rng(limits.seed, 1 << 21, 0);
    let tables = limits.cases.min(100);
    let mut worst = f64::INFINITY;
    let mut bad = None;
    for _ in 0..tables {
        let h = rng.random_range(1..=64);
        let f = random_nondecelerating(&mut rng, h);
        let g = convex_approx(&f)?;
        let margin = sandwich_margin(&f, &g);
        worst = worst.min(margin);
        if margin < -1e-9 || !g.is_convex(1e-9) || !g.is_nonneg() {
            bad.get_or_insert_with(|| format!("table {f:?}: margin {margin}"));
        }
    }
    b.push(
        "sandwich",
        bad.is_none(),
        format!("{tables} random tables with h <= 64, smallest margin {worst:.3e}"),
        &[("min_margin", worst)],
        bad,
    );
    Ok(())
}

/// Random sequence with no full layer and top layer below `h`, with a cap of
/// up to three columns of spare sites.
pub fn random_transform_input<R: Rng>(rng: &mut R) -> (LayerSequence, usize) {
    let w = rng.random_range(3..16usize);
    let h = rng.random_range(2..12usize);
    let d = rng.random_range(0..h);
    let counts: Vec<usize> = (1..=h)
        .map(|k| if k <= d { rng.random_range(1..w) } else { 0 })
        .collect();
    let total: usize = counts.iter().sum();
    let spare = rng.random_range(0..3 * w * h);
    (LayerSequence::new(w, counts).expect("no gaps"), total + spare)
}

fn transform(b: &mut Builder, limits: &Limits) -> Result<()> {
    let mut rng = stream_rng(limits.seed, 1 << 22, 0);
    let (mut done, mut infeasible, mut mid_drops) = (0usize, 0usize, 0usize);
    let mut bad = None;
    let mut worst_mid = 0.0f64;
    let mut bound_excess = f64::NEG_INFINITY;
    while done < limits.cases {
        let (s, n) = random_transform_input(&mut rng);
        let phi = rng.random_range(0.1..10.0);
        let sc = match done % 3 {
            0 => ScentFunction::linear(s.h(), phi)?,
            1 => ScentFunction::power(s.h(), rng.random_range(1.0..4.0), phi)?,
            _ => ScentFunction::reciprocal(s.h(), rng.random_range(1.0..4.0), phi)?,
        };
        let t = match bridge_transform(&s, n, &sc) {
            Ok(t) => t,
            Err(bridgesim_core::Error::Infeasible(_)) => {
                infeasible += 1;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        done += 1;
        if let Err(why) = t.check(phi, 1e-9) {
            bad.get_or_insert_with(|| format!("{:?} with n = {n}, phi = {phi}: {why}", s.counts()));
        }
        if t.scent_deltas.pre_to_mid < 0.0 {
            mid_drops += 1;
            worst_mid = worst_mid.min(t.scent_deltas.pre_to_mid);
        }
        bound_excess = bound_excess.max(t.bound_deltas.input_to_post as f64 - t.boundary_leading_term);
    }
    b.push(
        "stages",
        bad.is_none(),
        format!(
            "{done} inputs ({infeasible} infeasible draws skipped): particles conserved, scent gains input->pre >= phi x columns, pre->post and mid->post >= 0, post reaches the top"
        ),
        &[("cases", done as f64), ("infeasible", infeasible as f64)],
        bad,
    );
    b.info(
        "pre_to_mid_scent",
        format!(
            "{mid_drops} of {done} inputs lose scent from pre to mid (largest drop {:.3}); mid holds the leftover sites out",
            -worst_mid
        ),
        &[("drops", mid_drops as f64), ("largest_drop", -worst_mid)],
    );
    b.info(
        "boundary_deltas",
        format!("largest change of the bound minus its leading term: {bound_excess:.3}"),
        &[("max_excess_over_leading_term", bound_excess)],
    );
    Ok(())
}

fn irreducible(b: &mut Builder, limits: &Limits) -> Result<()> {
    let d = dims(4, 3);
    let scent = ScentFunction::linear(3, 1.0)?;
    let (mut states, mut failures) = (0usize, 0usize);
    let mut bad = None;
    let mut graph_ok = true;
    for cap in 0..=6 {
        let space = enumerate(d, cap, limits)?;
        let m = transition_matrix(&space, &ChainParams::new(1.0, 1.0, cap)?, &scent)?;
        let r = irreducibility(&m);
        graph_ok &= r.strongly_connected && r.aperiodic();
        if cap < 6 {
            continue;
        }
        for c in space.configs() {
            states += 1;
            let failed = match path_to_empty(&c) {
                Ok(order) => {
                    // replay independently
                    let mut cur = c.clone();
                    let mut ok = order.len() == c.len();
                    for v in order {
                        ok &= locally_simply_connected(&cur, v)?
                            && cur.remove(v).is_ok()
                            && globally_simply_connected(&cur);
                    }
                    !(ok && cur.is_empty())
                }
                Err(_) => true,
            };
            if failed {
                failures += 1;
                bad.get_or_insert_with(|| render(&c, RenderFormat::Ascii));
            }
        }
    }
    b.push(
        "peel_to_empty",
        failures == 0,
        format!("{states} states of 4x3 with n <= 6, {failures} failures"),
        &[("states", states as f64), ("failures", failures as f64)],
        bad,
    );
    b.push(
        "kernel_irreducible_aperiodic",
        graph_ok,
        "transition graph strongly connected with a self-loop for every cap 0..=6".into(),
        &[],
        None,
    );
    Ok(())
}

/// Runs `suite` and collects every check.
pub fn run_verify(suite: Suite, limits: &Limits) -> Result<VerifyReport> {
    let suites: Vec<Suite> = if suite == Suite::All {
        Suite::EACH.to_vec()
    } else {
        vec![suite]
    };
    let mut checks = Vec::new();
    for s in suites {
        let mut b = Builder {
            suite: s,
            checks: Vec::new(),
        };
        match s {
            Suite::Gibbs => gibbs(&mut b, limits)?,
            Suite::Connectivity => connectivity(&mut b, limits)?,
            Suite::Layerseq => layerseq(&mut b, limits)?,
            Suite::Counting => counting(&mut b, limits)?,
            Suite::Convex => convex(&mut b, limits)?,
            Suite::Transform => transform(&mut b, limits)?,
            Suite::Irreducibility => irreducible(&mut b, limits)?,
            Suite::All => unreachable!("expanded above"),
        }
        checks.extend(b.checks);
    }
    let pass = checks.iter().all(|c| c.pass);
    let first_counterexample = checks
        .iter()
        .find(|c| !c.pass)
        .map(|c| c.counterexample.clone().unwrap_or_else(|| c.detail.clone()));
    Ok(VerifyReport {
        suite,
        pass,
        limits: *limits,
        checks,
        first_counterexample,
    })
}
