//! Exact ground truth on small lattices: the full state space, its Gibbs
//! measure, the one-step transition matrix, and boundary-length census.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::chain::{transition_probability, ChainParams};
use crate::config::{energy_terms_with, globally_simply_connected, Configuration, ScentFunction};
use crate::error::{Error, Result};
use crate::lattice::{layer_degree, LatticeDims};

/// Largest lattice, in sites, that [`enumerate_omega`] accepts by default.
pub const DEFAULT_MAX_SITES: usize = 24;
/// Lattices up to this many sites are enumerated by subset filtering.
pub const SUBSET_FILTER_MAX_SITES: usize = 20;
/// Largest state space [`transition_matrix`] will assemble.
pub const MAX_MATRIX_STATES: usize = 100_000;

/// Compensated (Neumaier) summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Every configuration with at most `cap` sites whose union with layer 0 is
/// simply connected, as occupancy bitmasks in increasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSpace {
    dims: LatticeDims,
    cap: usize,
    masks: Vec<u64>,
}

impl StateSpace {
    pub fn dims(&self) -> LatticeDims {
        self.dims
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn masks(&self) -> &[u64] {
        &self.masks
    }

    pub fn index_of(&self, mask: u64) -> Option<usize> {
        self.masks.binary_search(&mask).ok()
    }

    pub fn config(&self, i: usize) -> Configuration {
        Configuration::from_mask(self.dims, self.cap, self.masks[i]).expect("enumerated state")
    }

    pub fn configs(&self) -> impl Iterator<Item = Configuration> + '_ {
        (0..self.len()).map(move |i| self.config(i))
    }
}

/// The state space with the default size guard.
pub fn enumerate_omega(dims: LatticeDims, cap: usize) -> Result<StateSpace> {
    enumerate_omega_limited(dims, cap, DEFAULT_MAX_SITES)
}

/// Subset filtering up to [`SUBSET_FILTER_MAX_SITES`] sites, growth from
/// the empty set beyond.
pub fn enumerate_omega_limited(dims: LatticeDims, cap: usize, max_sites: usize) -> Result<StateSpace> {
    let sites = dims.sites();
    if sites > max_sites || sites > 63 {
        return Err(Error::StateSpaceTooLarge {
            sites,
            limit: max_sites.min(63),
        });
    }
    if sites <= SUBSET_FILTER_MAX_SITES {
        enumerate_by_subsets(dims, cap)
    } else {
        enumerate_by_growth(dims, cap)
    }
}

/// Tests every subset of at most `cap` sites against the global predicate.
pub fn enumerate_by_subsets(dims: LatticeDims, cap: usize) -> Result<StateSpace> {
    let sites = dims.sites();
    if sites > 32 {
        return Err(Error::StateSpaceTooLarge { sites, limit: 32 });
    }
    let mut masks = Vec::new();
    for mask in 0..1u64 << sites {
        if mask.count_ones() as usize <= cap {
            let c = Configuration::from_mask(dims, cap, mask)?;
            if globally_simply_connected(&c) {
                masks.push(mask);
            }
        }
    }
    Ok(StateSpace { dims, cap, masks })
}

/// Breadth-first search over locally simply connected additions from the
/// empty set.
pub fn enumerate_by_growth(dims: LatticeDims, cap: usize) -> Result<StateSpace> {
    let sites = dims.sites();
    if sites > 63 {
        return Err(Error::StateSpaceTooLarge { sites, limit: 63 });
    }
    let mut seen = alloc::collections::BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(0u64);
    queue.push_back(0u64);
    while let Some(mask) = queue.pop_front() {
        if mask.count_ones() as usize >= cap {
            continue;
        }
        let c = Configuration::from_mask(dims, cap, mask)?;
        for i in 0..sites {
            let v = dims.site_at(i);
            if mask >> i & 1 == 0 && c.local_sc_at(v.x, v.y) {
                let next = mask | 1 << i;
                if seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(StateSpace {
        dims,
        cap,
        masks: seen.into_iter().collect(),
    })
}

/// Energy whose Gibbs measure is compared against the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TargetEnergy {
    /// `H = B - eta S`.
    #[default]
    Hamiltonian,
    /// `H + Σ deg(v)` over occupied sites.
    PlusDegree,
    /// `H - Σ deg(v)` over occupied sites.
    MinusDegree,
}

/// A probability vector over a state space and its normalizer.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsMeasure {
    pub probs: Vec<f64>,
    /// `Σ exp(-beta E)`.
    pub z: f64,
    pub energies: Vec<f64>,
}

/// `π(σ) = exp(-beta H(σ)) / Z` under the parameters' convention.
pub fn exact_distribution(space: &StateSpace, params: &ChainParams, scent: &ScentFunction) -> Result<GibbsMeasure> {
    target_distribution(space, params, scent, TargetEnergy::Hamiltonian)
}

pub fn target_distribution(
    space: &StateSpace,
    params: &ChainParams,
    scent: &ScentFunction,
    target: TargetEnergy,
) -> Result<GibbsMeasure> {
    let energies = space
        .configs()
        .map(|c| state_energy(&c, params, scent, target))
        .collect::<Result<Vec<f64>>>()?;
    let beta = params.beta();
    let e_min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let shifted: Vec<f64> = energies.iter().map(|e| libm::exp(-beta * (e - e_min))).collect();
    let total = shifted.iter().copied().collect::<NeumaierSum>().value();
    Ok(GibbsMeasure {
        probs: shifted.iter().map(|x| x / total).collect(),
        z: total * libm::exp(-beta * e_min),
        energies,
    })
}

fn state_energy(c: &Configuration, params: &ChainParams, scent: &ScentFunction, target: TargetEnergy) -> Result<f64> {
    let h = energy_terms_with(c, scent, params.eta(), params.convention())?.hamiltonian;
    let degrees: f64 = c.occupied_sites().map(|v| layer_degree(c.dims(), v.y) as f64).sum();
    Ok(match target {
        TargetEnergy::Hamiltonian => h,
        TargetEnergy::PlusDegree => h + degrees,
        TargetEnergy::MinusDegree => h - degrees,
    })
}

/// Weight `∏_{v ∈ σ} λ^{-B(v)} γ^{S(v)}` of one state.
pub fn product_form_weight(c: &Configuration, params: &ChainParams, scent: &ScentFunction) -> Result<f64> {
    let (lambda, gamma) = (params.lambda(), params.gamma());
    let mut w = 1.0;
    for v in c.occupied_sites() {
        let b = crate::config::unoccupied_neighbor_count(c, v, params.convention())? as f64;
        w *= libm::pow(lambda, -b) * libm::pow(gamma, scent.value(v.y));
    }
    Ok(w)
}

/// Row-stochastic matrix in row-sparse form; every row lists its diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    rows: Vec<Vec<(usize, f64)>>,
}

impl TransitionMatrix {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Nonzero entries of row `i` with increasing column.
    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let row = &self.rows[i];
        row.binary_search_by_key(&j, |e| e.0).map_or(0.0, |k| row[k].1)
    }

    /// Largest `|Σ_j P(i, j) - 1|`.
    pub fn max_row_sum_error(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| (r.iter().map(|e| e.1).collect::<NeumaierSum>().value() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// One step of the chain from every state: a uniform site, then the
/// acceptance rule; rejected mass stays on the diagonal.
pub fn transition_matrix(space: &StateSpace, params: &ChainParams, scent: &ScentFunction) -> Result<TransitionMatrix> {
    if space.len() > MAX_MATRIX_STATES {
        return Err(Error::StateSpaceTooLarge {
            sites: space.len(),
            limit: MAX_MATRIX_STATES,
        });
    }
    let params = &ChainParams::new(params.beta(), params.eta(), space.cap())?
        .with_mode(params.mode())
        .with_convention(params.convention());
    let dims = space.dims();
    let pick = 1.0 / dims.sites() as f64;
    let mut rows = Vec::with_capacity(space.len());
    for (i, &mask) in space.masks().iter().enumerate() {
        let c = space.config(i);
        let mut row = Vec::new();
        let mut leave = NeumaierSum::default();
        for k in 0..dims.sites() {
            let (_, _, p, _) = transition_probability(&c, dims.site_at(k), params, scent)?;
            if p > 0.0 {
                let j = space
                    .index_of(mask ^ 1 << k)
                    .ok_or_else(|| Error::Infeasible(format!("move from state {i} leaves the enumerated space")))?;
                row.push((j, pick * p));
                leave.add(pick * p);
            }
        }
        row.push((i, 1.0 - leave.value()));
        row.sort_by_key(|e| e.0);
        rows.push(row);
    }
    Ok(TransitionMatrix { rows })
}

/// Residuals of a candidate stationary vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationarityReport {
    /// `max_j |(πP)_j - π_j|`.
    pub stationarity_residual: f64,
    /// `max_{i,j} |π_i P(i,j) - π_j P(j,i)|`.
    pub detailed_balance_residual: f64,
    pub row_sum_error: f64,
    pub tol: f64,
    pub pass: bool,
}

pub fn verify_stationarity(matrix: &TransitionMatrix, pi: &[f64], tol: f64) -> Result<StationarityReport> {
    if pi.len() != matrix.len() {
        return Err(Error::InvalidParameter(format!(
            "distribution has {} entries, matrix has {} states",
            pi.len(),
            matrix.len()
        )));
    }
    let mut flow = vec![NeumaierSum::default(); pi.len()];
    let mut balance: f64 = 0.0;
    for (i, &p) in pi.iter().enumerate() {
        for &(j, q) in matrix.row(i) {
            flow[j].add(p * q);
            if j > i {
                balance = balance.max((p * q - pi[j] * matrix.get(j, i)).abs());
            }
        }
    }
    let stationarity = flow
        .iter()
        .zip(pi)
        .map(|(f, p)| (f.value() - p).abs())
        .fold(0.0, f64::max);
    Ok(StationarityReport {
        stationarity_residual: stationarity,
        detailed_balance_residual: balance,
        row_sum_error: matrix.max_row_sum_error(),
        tol,
        pass: stationarity <= tol && balance <= tol,
    })
}

/// Number of states of each boundary length, counting edges inside the
/// domain only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryCensus {
    pub w: usize,
    pub counts: BTreeMap<i64, u64>,
}

impl BoundaryCensus {
    /// `2^(ℓ + 2w)`, saturating.
    pub fn bound(&self, length: i64) -> u64 {
        let e = length + 2 * self.w as i64;
        if e >= 64 {
            u64::MAX
        } else {
            1u64 << e.max(0)
        }
    }
}

/// Census of `B` over the state space, failing if some length `ℓ` has more
/// than `2^(ℓ + 2w)` states.
pub fn count_by_boundary(space: &StateSpace) -> Result<BoundaryCensus> {
    let mut counts = BTreeMap::new();
    for c in space.configs() {
        *counts.entry(c.boundary()).or_insert(0u64) += 1;
    }
    let census = BoundaryCensus {
        w: space.dims().width(),
        counts,
    };
    for (&length, &count) in &census.counts {
        if count > census.bound(length) {
            return Err(Error::CountingBoundViolated { length, count });
        }
    }
    Ok(census)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrreducibilityReport {
    pub strongly_connected: bool,
    /// States with a positive holding probability.
    pub lazy_states: usize,
    pub min_self_loop: f64,
}

impl IrreducibilityReport {
    pub fn aperiodic(&self) -> bool {
        self.lazy_states > 0
    }
}

/// Strong connectivity of the off-diagonal transition graph, by forward and
/// backward search from state 0.
pub fn irreducibility(matrix: &TransitionMatrix) -> IrreducibilityReport {
    let n = matrix.len();
    let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for &(j, q) in matrix.row(i) {
            if j != i && q > 0.0 {
                reverse[j].push(i);
            }
        }
    }
    let reach = |next: &dyn Fn(usize) -> Vec<usize>| {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        if n > 0 {
            seen[0] = true;
        }
        let mut count = 0;
        while let Some(i) = stack.pop() {
            count += 1;
            for j in next(i) {
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        count
    };
    let forward = |i: usize| {
        matrix
            .row(i)
            .iter()
            .filter(|e| e.0 != i && e.1 > 0.0)
            .map(|e| e.0)
            .collect::<Vec<_>>()
    };
    let backward = |i: usize| reverse[i].clone();
    let strongly_connected = n == 0 || (reach(&forward) == n && reach(&backward) == n);
    let loops: Vec<f64> = (0..n).map(|i| matrix.get(i, i)).collect();
    IrreducibilityReport {
        strongly_connected,
        lazy_states: loops.iter().filter(|&&p| p > 0.0).count(),
        min_self_loop: loops.iter().copied().fold(f64::INFINITY, f64::min),
    }
}

/// Half the `L1` distance.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p
        .iter()
        .zip(q)
        .map(|(a, b)| (a - b).abs())
        .collect::<NeumaierSum>()
        .value()
}

/// Empirical distribution of visited masks over the state space; masks
/// outside it are an error.
pub fn empirical_distribution<I>(space: &StateSpace, masks: I) -> Result<Vec<f64>>
where
    I: IntoIterator<Item = u64>,
{
    let mut counts = vec![0u64; space.len()];
    let mut total = 0u64;
    for m in masks {
        let i = space
            .index_of(m)
            .ok_or_else(|| Error::Infeasible(format!("visited mask {m:#x} is not in the state space")))?;
        counts[i] += 1;
        total += 1;
    }
    Ok(counts.iter().map(|&c| c as f64 / total.max(1) as f64).collect())
}

/// Per-state summary for offline inspection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateRecord {
    pub index: usize,
    pub mask: u64,
    pub boundary: i64,
    pub scent: f64,
    pub hamiltonian: f64,
    pub probability: f64,
}

pub fn state_records(
    space: &StateSpace,
    params: &ChainParams,
    scent: &ScentFunction,
    pi: &GibbsMeasure,
) -> Result<Vec<StateRecord>> {
    space
        .configs()
        .enumerate()
        .map(|(i, c)| {
            let e = energy_terms_with(&c, scent, params.eta(), params.convention())?;
            Ok(StateRecord {
                index: i,
                mask: space.masks()[i],
                boundary: e.boundary,
                scent: e.scent,
                hamiltonian: e.hamiltonian,
                probability: pi.probs[i],
            })
        })
        .collect()
}

#[cfg(test)]
mod tests;
