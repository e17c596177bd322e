//! The Metropolis occupancy chain: single-site proposals gated by local
//! simple connectivity, run schedules with periodic invariant checks, and
//! the constructive peel used to show irreducibility.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{
    globally_simply_connected, layer_sequence, render_ascii, Configuration, Convention, Move, ScentFunction,
};
use crate::error::{Error, Result};
use crate::lattice::{layer_degree, LatticeDims, Site, RING_CONNECTED};
use crate::layerseq::LayerSequence;
use crate::observables::{bridge_count, mb_depth, mb_epsilon};

/// How moves are accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum AcceptanceMode {
    /// `min(1, exp(-beta ΔH))` with the exact energy change, so the chain is
    /// reversible for the Gibbs measure of `H`.
    #[default]
    ExactGibbs,
    /// `min(1, exp(±beta (2 B(v) - eta S(v))))`, dropping the degree term of
    /// `ΔH`.
    PaperLiteral,
}

/// Parameters of one chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    beta: f64,
    eta: f64,
    cap_n: usize,
    rho: Option<f64>,
    mode: AcceptanceMode,
    convention: Convention,
    seed: u64,
}

impl ChainParams {
    /// `beta` and `eta` must be finite and nonnegative.
    pub fn new(beta: f64, eta: f64, cap_n: usize) -> Result<Self> {
        if !(beta >= 0.0 && beta.is_finite()) || !(eta >= 0.0 && eta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "beta and eta must be finite and nonnegative, got beta = {beta}, eta = {eta}"
            )));
        }
        Ok(ChainParams {
            beta,
            eta,
            cap_n,
            rho: None,
            mode: AcceptanceMode::default(),
            convention: Convention::default(),
            seed: 0,
        })
    }

    /// Cap `n = ⌊rho h²⌋`.
    pub fn from_density(beta: f64, eta: f64, rho: f64, dims: LatticeDims) -> Result<Self> {
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "density must be nonnegative, got {rho}"
            )));
        }
        let h = dims.height() as f64;
        let mut p = Self::new(beta, eta, libm::floor(rho * h * h) as usize)?;
        p.rho = Some(rho);
        Ok(p)
    }

    pub fn with_mode(mut self, mode: AcceptanceMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_convention(mut self, convention: Convention) -> Self {
        self.convention = convention;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn cap_n(&self) -> usize {
        self.cap_n
    }

    pub fn rho(&self) -> Option<f64> {
        self.rho
    }

    pub fn mode(&self) -> AcceptanceMode {
        self.mode
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `λ = e^β`.
    pub fn lambda(&self) -> f64 {
        libm::exp(self.beta)
    }

    /// `γ = e^{β η}`.
    pub fn gamma(&self) -> f64 {
        libm::exp(self.beta * self.eta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RejectReason {
    NotLocallySc,
    CapReached,
    Metropolis,
}

/// What happened in one step. `delta_h` is the energy change the acceptance
/// rule used, whether or not the move was applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub chosen_site: Site,
    pub proposal: Move,
    pub accepted: bool,
    pub delta_h: f64,
    pub reject_reason: Option<RejectReason>,
}

/// Energy change and acceptance probability of flipping `v`, before the
/// connectivity and cap gates.
pub fn move_energy(
    cfg: &Configuration,
    v: Site,
    params: &ChainParams,
    scent: &ScentFunction,
) -> Result<(Move, f64, f64)> {
    cfg.dims().check_layer(v)?;
    check_scent(cfg.dims(), scent)?;
    let mv = if cfg.is_occupied(v) { Move::Remove } else { Move::Add };
    let free = free_count(cfg, v.x, v.y, params.convention);
    let delta = delta_for(cfg.dims(), v.y, free, mv, params, scent);
    Ok((mv, delta, accept_prob(params.beta, delta)))
}

/// The full transition law of flipping `v`: the proposal, its energy change
/// and the probability it is applied given that `v` was drawn.
pub fn transition_probability(
    cfg: &Configuration,
    v: Site,
    params: &ChainParams,
    scent: &ScentFunction,
) -> Result<(Move, f64, f64, Option<RejectReason>)> {
    let (mv, delta, p) = move_energy(cfg, v, params, scent)?;
    let gate = gate(cfg, v.x, v.y, mv, params.cap_n);
    Ok(match gate {
        Some(reason) => (mv, delta, 0.0, Some(reason)),
        None => (mv, delta, p, None),
    })
}

/// One step of the chain on a caller-owned configuration, drawing the site
/// and the uniform from `rng` in that order.
pub fn step<R: Rng + ?Sized>(
    cfg: &mut Configuration,
    params: &ChainParams,
    scent: &ScentFunction,
    rng: &mut R,
) -> Result<StepOutcome> {
    let d = cfg.dims();
    let v = d.site_at(rng.random_range(0..d.sites() as u64) as usize);
    let u: f64 = rng.random();
    let (mv, delta, p, reason) = transition_probability(cfg, v, params, scent)?;
    let reject_reason = reason.or(if u <= p { None } else { Some(RejectReason::Metropolis) });
    if reject_reason.is_none() {
        cfg.apply(v, mv)?;
    }
    Ok(StepOutcome {
        chosen_site: v,
        proposal: mv,
        accepted: reject_reason.is_none(),
        delta_h: delta,
        reject_reason,
    })
}

fn check_scent(dims: LatticeDims, scent: &ScentFunction) -> Result<()> {
    if scent.h() != dims.height() {
        return Err(Error::InvalidParameter(format!(
            "scent has {} layers, lattice has {}",
            scent.h(),
            dims.height()
        )));
    }
    Ok(())
}

fn free_count(cfg: &Configuration, x: usize, y: usize, convention: Convention) -> usize {
    let free = cfg.free_neighbors(x, y);
    if convention == Convention::LambdaBar && y == cfg.dims().height() {
        free + 2
    } else {
        free
    }
}

/// Energy change of the proposal at layer `y` with `free` unoccupied
/// neighbors. Removal changes `H` by `eta S + deg - 2 free`; the literal rule
/// drops `deg`.
fn delta_for(dims: LatticeDims, y: usize, free: usize, mv: Move, params: &ChainParams, scent: &ScentFunction) -> f64 {
    let mut deg = layer_degree(dims, y) as f64;
    if params.convention == Convention::LambdaBar && y == dims.height() {
        deg += 2.0;
    }
    if params.mode == AcceptanceMode::PaperLiteral {
        deg = 0.0;
    }
    let removal = params.eta * scent.value(y) + deg - 2.0 * free as f64;
    match mv {
        Move::Remove => removal,
        Move::Add => -removal,
    }
}

fn accept_prob(beta: f64, delta: f64) -> f64 {
    if delta <= 0.0 {
        1.0
    } else {
        libm::exp(-beta * delta)
    }
}

fn gate(cfg: &Configuration, x: usize, y: usize, mv: Move, cap: usize) -> Option<RejectReason> {
    if !cfg.local_sc_at(x, y) {
        Some(RejectReason::NotLocallySc)
    } else if mv == Move::Add && cfg.len() >= cap {
        Some(RejectReason::CapReached)
    } else {
        None
    }
}

/// Generator for replica `replica` of sweep cell `cell`: the master seed
/// fixes the key, `(cell, replica)` selects an independent stream.
pub fn stream_rng(master_seed: u64, cell: u32, replica: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream((u64::from(cell) << 32) | u64::from(replica));
    rng
}

/// Length of a run and when to sample and audit it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub steps: u64,
    pub burn_in: u64,
    pub sample_every: u64,
    /// Full connectivity and cache audit period.
    pub recheck_every: u64,
    /// Window depth fraction for the multiple-bridge flag.
    pub epsilon: f64,
}

impl Schedule {
    pub fn new(steps: u64) -> Self {
        Schedule {
            steps,
            burn_in: steps / 2,
            sample_every: 1,
            recheck_every: 10_000,
            epsilon: 0.3,
        }
    }

    /// Samples a run of this schedule records.
    pub fn sample_count(&self) -> u64 {
        self.steps.saturating_sub(self.burn_in) / self.sample_every.max(1)
    }

    fn validate(&self, h: usize) -> Result<()> {
        if self.sample_every == 0 || self.recheck_every == 0 {
            return Err(Error::InvalidParameter(
                "sample_every and recheck_every must be positive".into(),
            ));
        }
        if self.burn_in > self.steps {
            return Err(Error::InvalidParameter(format!(
                "burn-in {} exceeds the run length {}",
                self.burn_in, self.steps
            )));
        }
        mb_depth(h, self.epsilon).map(|_| ())
    }
}

/// State recorded after step `step`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub step: u64,
    pub particles: usize,
    pub boundary: i64,
    pub scent: f64,
    pub hamiltonian: f64,
    pub nb: bool,
    pub mb_eps: bool,
    pub bridge_count: usize,
    pub layers: LayerSequence,
}

/// A chain with its own configuration and random stream.
#[derive(Debug, Clone)]
pub struct Chain {
    cfg: Configuration,
    params: ChainParams,
    scent: ScentFunction,
    rng: ChaCha8Rng,
    /// `(delta, probability)` indexed by `[layer - 1][free][remove]`.
    table: Vec<[[(f64, f64); 2]; 7]>,
    steps: u64,
}

impl Chain {
    /// Starts from `cfg`, which must lie in the state space; the stream is
    /// seeded from the parameters.
    pub fn new(cfg: Configuration, params: ChainParams, scent: ScentFunction) -> Result<Self> {
        let rng = ChaCha8Rng::seed_from_u64(params.seed);
        Self::with_rng(cfg, params, scent, rng)
    }

    pub fn with_rng(
        mut cfg: Configuration,
        params: ChainParams,
        scent: ScentFunction,
        rng: ChaCha8Rng,
    ) -> Result<Self> {
        let dims = cfg.dims();
        check_scent(dims, &scent)?;
        if cfg.len() > params.cap_n {
            return Err(Error::InvalidParameter(format!(
                "start has {} sites, cap is {}",
                cfg.len(),
                params.cap_n
            )));
        }
        if !globally_simply_connected(&cfg) {
            return Err(Error::InvalidParameter(
                "start configuration is not simply connected".into(),
            ));
        }
        cfg.set_cap(params.cap_n);
        let table = (1..=dims.height())
            .map(|y| {
                let mut row = [[(0.0, 0.0); 2]; 7];
                for (free, entry) in row.iter_mut().enumerate() {
                    for (k, mv) in [Move::Add, Move::Remove].into_iter().enumerate() {
                        let delta = delta_for(dims, y, free, mv, &params, &scent);
                        entry[k] = (delta, accept_prob(params.beta, delta));
                    }
                }
                row
            })
            .collect();
        Ok(Chain {
            cfg,
            params,
            scent,
            rng,
            table,
            steps: 0,
        })
    }

    pub fn config(&self) -> &Configuration {
        &self.cfg
    }

    pub fn into_config(self) -> Configuration {
        self.cfg
    }

    pub fn params(&self) -> &ChainParams {
        &self.params
    }

    pub fn scent(&self) -> &ScentFunction {
        &self.scent
    }

    /// Steps taken so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn step(&mut self) -> StepOutcome {
        let d = self.cfg.dims();
        let v = d.site_at(self.rng.random_range(0..d.sites() as u64) as usize);
        let u: f64 = self.rng.random();
        self.propose(v, u)
    }

    /// Resolves the proposal at domain site `v` against the uniform `u`.
    pub fn propose(&mut self, v: Site, u: f64) -> StepOutcome {
        self.steps += 1;
        let (x, y) = (v.x, v.y);
        let mask = self.cfg.ring_mask(x, y);
        let occupied = self.cfg.occupied_at(x, y);
        let mv = if occupied { Move::Remove } else { Move::Add };
        let mut free = 6 - mask.count_ones() as usize;
        if y == self.cfg.dims().height() && self.params.convention == Convention::LambdaOnly {
            free -= 2;
        }
        let (delta, p) = self.table[y - 1][free][occupied as usize];
        let size_ok = if occupied { mask != 0b11_1111 } else { mask != 0 };
        let reject_reason = if !(size_ok && RING_CONNECTED[mask as usize]) {
            Some(RejectReason::NotLocallySc)
        } else if !occupied && self.cfg.len() >= self.params.cap_n {
            Some(RejectReason::CapReached)
        } else if u <= p {
            self.cfg.toggle(x, y);
            None
        } else {
            Some(RejectReason::Metropolis)
        };
        StepOutcome {
            chosen_site: v,
            proposal: mv,
            accepted: reject_reason.is_none(),
            delta_h: delta,
            reject_reason,
        }
    }

    /// Current sample with energies under the chain's convention.
    pub fn sample(&self, epsilon: f64) -> Result<Sample> {
        let boundary = self.cfg.boundary_with(self.params.convention);
        let scent = self.scent.total(self.cfg.layer_counts());
        Ok(Sample {
            step: self.steps,
            particles: self.cfg.len(),
            boundary,
            scent,
            hamiltonian: boundary as f64 - self.params.eta * scent,
            nb: crate::observables::nb(&self.cfg),
            mb_eps: !mb_epsilon(&self.cfg, epsilon)?.is_empty(),
            bridge_count: bridge_count(&self.cfg),
            layers: layer_sequence(&self.cfg),
        })
    }

    /// Audits connectivity, the cap and the cached totals.
    pub fn check_invariants(&self) -> Result<()> {
        let reason = if self.cfg.len() > self.params.cap_n {
            Some(format!("{} sites exceed the cap {}", self.cfg.len(), self.params.cap_n))
        } else if !globally_simply_connected(&self.cfg) {
            Some(String::from("configuration is not simply connected"))
        } else {
            self.cfg.check_caches().err()
        };
        match reason {
            None => Ok(()),
            Some(reason) => Err(Error::InvariantViolation {
                step: self.steps,
                reason,
                dump: render_ascii(&self.cfg),
            }),
        }
    }

    /// Runs `schedule.steps` steps, handing each sample to `on_sample`. Step
    /// `t` (counted within this run from 1) is sampled when `t > burn_in` and
    /// `t - burn_in` is a multiple of `sample_every`, and audited when `t` is
    /// a multiple of `recheck_every`. The callback also sees the sampled
    /// configuration.
    pub fn run_with<F>(&mut self, schedule: &Schedule, mut on_sample: F) -> Result<()>
    where
        F: FnMut(&Sample, &Configuration),
    {
        schedule.validate(self.cfg.dims().height())?;
        for t in 1..=schedule.steps {
            self.step();
            if t % schedule.recheck_every == 0 {
                self.check_invariants()?;
            }
            if t > schedule.burn_in && (t - schedule.burn_in).is_multiple_of(schedule.sample_every) {
                on_sample(&self.sample(schedule.epsilon)?, &self.cfg);
            }
        }
        Ok(())
    }

    pub fn run(&mut self, schedule: &Schedule) -> Result<Vec<Sample>> {
        let mut out = Vec::with_capacity(schedule.sample_count() as usize);
        self.run_with(schedule, |s, _| out.push(s.clone()))?;
        Ok(out)
    }
}

/// Removal order that empties `cfg` one locally simply connected removal at
/// a time. Each stage removes a site farthest from layer 0 along occupied
/// edges, preferring the higher layer and then the larger column.
pub fn path_to_empty(cfg: &Configuration) -> Result<Vec<Site>> {
    if !globally_simply_connected(cfg) {
        return Err(Error::InvalidParameter("configuration is not simply connected".into()));
    }
    let mut cur = cfg.clone();
    let mut order = Vec::with_capacity(cur.len());
    while !cur.is_empty() {
        let dist = layer0_distances(&cur);
        let d = cur.dims();
        let site = d
            .domain_sites()
            .filter(|&v| cur.is_occupied(v))
            .max_by_key(|&v| (dist[d.site_index(v)], v.y, v.x))
            .expect("nonempty");
        if !cur.local_sc_at(site.x, site.y) {
            return Err(Error::NoRemovableSite {
                stage: order.len(),
                site,
            });
        }
        cur.toggle(site.x, site.y);
        order.push(site);
    }
    Ok(order)
}

/// Graph distance from layer 0 through occupied sites, per domain site;
/// `usize::MAX` when unreachable or unoccupied.
fn layer0_distances(cfg: &Configuration) -> Vec<usize> {
    let d = cfg.dims();
    let mut dist = vec![usize::MAX; d.sites()];
    let mut queue = VecDeque::new();
    for x in 0..d.width() {
        let v = Site::new(x, 1);
        if cfg.is_occupied(v) {
            dist[d.site_index(v)] = 1;
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        let next = dist[d.site_index(v)] + 1;
        for (a, b) in cfg.ring_sites(v.x, v.y) {
            let u = Site::new(a, b);
            if d.in_domain(u) && cfg.occupied_at(a, b) && dist[d.site_index(u)] == usize::MAX {
                dist[d.site_index(u)] = next;
                queue.push_back(u);
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests;
