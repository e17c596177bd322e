//! Occupied-site sets, their energy, and the connectivity predicates that
//! gate moves.

mod scent;
mod snapshot;

pub use scent::{is_nondecelerating, ScentFunction, ScentKind};
pub use snapshot::{parse_ascii, render_ascii};

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lattice::{layer_degree, LatticeDims, Site, RING_CONNECTED};
use crate::layerseq::LayerSequence;

/// Which sites count as unoccupied when measuring boundary length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum Convention {
    /// Only neighbors inside layers `1..=h`.
    #[default]
    LambdaOnly,
    /// Also the always-empty layer `h + 1`.
    LambdaBar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    Add,
    Remove,
}

/// `B`, `S` and `H = B - eta S` of a configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyTerms {
    pub boundary: i64,
    pub scent: f64,
    pub hamiltonian: f64,
}

/// A set of occupied sites in layers `1..=h` with at most `cap` members.
///
/// Occupancy is stored on the padded grid of layers `0..=h+1`, where layer 0
/// is always occupied and layer `h + 1` always empty. Particle count, layer
/// counts and the boundary length are maintained incrementally.
#[derive(Debug, Clone)]
pub struct Configuration {
    dims: LatticeDims,
    cap: usize,
    grid: Vec<bool>,
    count: usize,
    layers: Vec<usize>,
    boundary: i64,
}

impl PartialEq for Configuration {
    fn eq(&self, other: &Self) -> bool {
        self.dims == other.dims && self.cap == other.cap && self.grid == other.grid
    }
}

impl Eq for Configuration {}

impl Configuration {
    pub fn empty(dims: LatticeDims, cap: usize) -> Self {
        let (w, h) = (dims.width(), dims.height());
        let mut grid = vec![false; w * (h + 2)];
        grid[..w].fill(true);
        Configuration {
            dims,
            cap,
            grid,
            count: 0,
            layers: vec![0; h],
            boundary: 0,
        }
    }

    /// Builds a configuration from explicit sites. No connectivity is
    /// required; duplicates are rejected.
    pub fn from_sites<I>(dims: LatticeDims, cap: usize, sites: I) -> Result<Self>
    where
        I: IntoIterator<Item = Site>,
    {
        let mut cfg = Self::empty(dims, usize::MAX);
        for v in sites {
            cfg.add(v)?;
        }
        if cfg.count > cap {
            return Err(Error::InvalidParameter(format!(
                "{} sites exceed the cap of {cap}",
                cfg.count
            )));
        }
        cfg.cap = cap;
        Ok(cfg)
    }

    /// Builds from a bitmask in which bit `(y - 1) w + x` marks `(x, y)`.
    pub fn from_mask(dims: LatticeDims, cap: usize, mask: u64) -> Result<Self> {
        if dims.sites() > 64 {
            return Err(Error::InvalidParameter(format!(
                "bitmask needs at most 64 sites, lattice has {}",
                dims.sites()
            )));
        }
        let sites = (0..dims.sites())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| dims.site_at(i));
        Self::from_sites(dims, cap, sites)
    }

    /// Bitmask form, defined when the lattice has at most 64 sites.
    pub fn mask(&self) -> Option<u64> {
        if self.dims.sites() > 64 {
            return None;
        }
        let w = self.dims.width();
        Some(
            self.grid[w..w * (self.dims.height() + 1)]
                .iter()
                .enumerate()
                .filter(|(_, &o)| o)
                .fold(0u64, |m, (i, _)| m | 1 << i),
        )
    }

    #[inline]
    pub fn dims(&self) -> LatticeDims {
        self.dims
    }

    #[inline]
    pub fn cap(&self) -> usize {
        self.cap
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.count
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Occupancy of any site of the extended lattice; sites outside it read
    /// as empty.
    #[inline]
    pub fn is_occupied(&self, v: Site) -> bool {
        self.dims.contains(v) && self.grid[self.gi(v.x, v.y)]
    }

    /// Occupied sites in row-major order from layer 1.
    pub fn occupied_sites(&self) -> impl Iterator<Item = Site> + '_ {
        let w = self.dims.width();
        self.grid[w..w * (self.dims.height() + 1)]
            .iter()
            .enumerate()
            .filter(|(_, &o)| o)
            .map(move |(i, _)| self.dims.site_at(i))
    }

    /// Occupied count of each layer, index `k - 1` for layer `k`.
    #[inline]
    pub fn layer_counts(&self) -> &[usize] {
        &self.layers
    }

    /// Cached boundary length under [`Convention::LambdaOnly`].
    #[inline]
    pub fn boundary(&self) -> i64 {
        self.boundary
    }

    pub fn boundary_with(&self, convention: Convention) -> i64 {
        match convention {
            Convention::LambdaOnly => self.boundary,
            Convention::LambdaBar => self.boundary + 2 * self.layers[self.dims.height() - 1] as i64,
        }
    }

    /// Occupies `v`. Fails if `v` is outside layers `1..=h`, already
    /// occupied, or the cap is reached. Connectivity is not checked.
    pub fn add(&mut self, v: Site) -> Result<()> {
        self.dims.check_layer(v)?;
        if self.grid[self.gi(v.x, v.y)] {
            return Err(Error::MoveMismatch { site: v, action: "add" });
        }
        if self.count >= self.cap {
            return Err(Error::Infeasible(format!("cap of {} sites reached", self.cap)));
        }
        self.toggle(v.x, v.y);
        Ok(())
    }

    /// Empties `v`. Connectivity is not checked.
    pub fn remove(&mut self, v: Site) -> Result<()> {
        self.dims.check_layer(v)?;
        if !self.grid[self.gi(v.x, v.y)] {
            return Err(Error::MoveMismatch {
                site: v,
                action: "remove",
            });
        }
        self.toggle(v.x, v.y);
        Ok(())
    }

    pub fn apply(&mut self, v: Site, mv: Move) -> Result<()> {
        match mv {
            Move::Add => self.add(v),
            Move::Remove => self.remove(v),
        }
    }

    /// Compares every cache against a from-scratch recomputation.
    pub fn check_caches(&self) -> core::result::Result<(), String> {
        let count = self.occupied_sites().count();
        if count != self.count {
            return Err(format!("cached count {} but {} occupied cells", self.count, count));
        }
        if count > self.cap {
            return Err(format!("{count} occupied cells exceed the cap of {}", self.cap));
        }
        let w = self.dims.width();
        for (k, &n) in self.layers.iter().enumerate() {
            let real = self.grid[(k + 1) * w..(k + 2) * w].iter().filter(|&&o| o).count();
            if real != n {
                return Err(format!("cached layer {} count {n} but {real} occupied", k + 1));
            }
        }
        let b = self.boundary_from_scratch(Convention::LambdaOnly);
        if b != self.boundary {
            return Err(format!("cached boundary {} but recomputed {b}", self.boundary));
        }
        Ok(())
    }

    pub(crate) fn set_cap(&mut self, cap: usize) {
        self.cap = cap;
    }

    #[inline]
    pub(crate) fn gi(&self, x: usize, y: usize) -> usize {
        y * self.dims.width() + x
    }

    #[inline]
    pub(crate) fn occupied_at(&self, x: usize, y: usize) -> bool {
        self.grid[self.gi(x, y)]
    }

    /// Padded-grid coordinates of the six neighbors of a domain site, in
    /// ring order.
    #[inline]
    pub(crate) fn ring_sites(&self, x: usize, y: usize) -> [(usize, usize); 6] {
        let w = self.dims.width();
        let xp = if x + 1 == w { 0 } else { x + 1 };
        let xm = if x == 0 { w - 1 } else { x - 1 };
        [(xp, y), (x, y + 1), (xm, y + 1), (xm, y), (x, y - 1), (xp, y - 1)]
    }

    /// Bit `i` set when the `i`-th ring neighbor lies in `σ ∪ Λ₀`.
    #[inline]
    pub(crate) fn ring_mask(&self, x: usize, y: usize) -> u8 {
        self.ring_sites(x, y)
            .iter()
            .enumerate()
            .fold(0u8, |m, (i, &(a, b))| m | (self.occupied_at(a, b) as u8) << i)
    }

    /// Unoccupied neighbors within layers `1..=h` of a domain site.
    #[inline]
    pub(crate) fn free_neighbors(&self, x: usize, y: usize) -> usize {
        let free = 6 - self.ring_mask(x, y).count_ones() as usize;
        if y == self.dims.height() {
            free - 2
        } else {
            free
        }
    }

    #[inline]
    pub(crate) fn local_sc_at(&self, x: usize, y: usize) -> bool {
        let mask = self.ring_mask(x, y);
        let size = mask.count_ones();
        let size_ok = if self.occupied_at(x, y) { size <= 5 } else { size >= 1 };
        size_ok && RING_CONNECTED[mask as usize]
    }

    /// Flips a domain site and updates every cache.
    #[inline]
    pub(crate) fn toggle(&mut self, x: usize, y: usize) {
        let b = self.free_neighbors(x, y) as i64;
        let deg = layer_degree(self.dims, y) as i64;
        let i = self.gi(x, y);
        if self.grid[i] {
            self.grid[i] = false;
            self.count -= 1;
            self.layers[y - 1] -= 1;
            self.boundary += deg - 2 * b;
        } else {
            self.grid[i] = true;
            self.count += 1;
            self.layers[y - 1] += 1;
            self.boundary += 2 * b - deg;
        }
    }

    fn boundary_from_scratch(&self, convention: Convention) -> i64 {
        self.occupied_sites()
            .map(|v| self.free_count(v.x, v.y, convention) as i64)
            .sum()
    }

    fn free_count(&self, x: usize, y: usize, convention: Convention) -> usize {
        let h = self.dims.height();
        self.ring_sites(x, y)
            .iter()
            .filter(|&&(a, b)| {
                let counted = match convention {
                    Convention::LambdaOnly => b <= h,
                    Convention::LambdaBar => true,
                };
                counted && !self.occupied_at(a, b)
            })
            .count()
    }
}

/// Unoccupied neighbors of `v`. Layer-0 neighbors are always occupied;
/// layer `h + 1` neighbors count only under [`Convention::LambdaBar`].
pub fn unoccupied_neighbor_count(cfg: &Configuration, v: Site, convention: Convention) -> Result<usize> {
    cfg.dims.check_layer(v)?;
    Ok(cfg.free_count(v.x, v.y, convention))
}

pub fn energy_terms(cfg: &Configuration, scent: &ScentFunction, eta: f64) -> Result<EnergyTerms> {
    energy_terms_with(cfg, scent, eta, Convention::LambdaOnly)
}

/// Recomputes `B`, `S` and `H` site by site, ignoring the caches.
pub fn energy_terms_with(
    cfg: &Configuration,
    scent: &ScentFunction,
    eta: f64,
    convention: Convention,
) -> Result<EnergyTerms> {
    check_scent(cfg, scent)?;
    let mut boundary = 0i64;
    let mut s = 0.0;
    for v in cfg.occupied_sites() {
        boundary += cfg.free_count(v.x, v.y, convention) as i64;
        s += scent.value(v.y);
    }
    Ok(EnergyTerms {
        boundary,
        scent: s,
        hamiltonian: boundary as f64 - eta * s,
    })
}

pub fn delta_hamiltonian(cfg: &Configuration, v: Site, mv: Move, scent: &ScentFunction, eta: f64) -> Result<f64> {
    delta_hamiltonian_with(cfg, v, mv, scent, eta, Convention::LambdaOnly)
}

/// Energy change of adding or removing `v`. Removal changes `H` by
/// `eta S(y) + deg - 2 b`; addition by the negation.
pub fn delta_hamiltonian_with(
    cfg: &Configuration,
    v: Site,
    mv: Move,
    scent: &ScentFunction,
    eta: f64,
    convention: Convention,
) -> Result<f64> {
    cfg.dims.check_layer(v)?;
    check_scent(cfg, scent)?;
    let occupied = cfg.occupied_at(v.x, v.y);
    match (mv, occupied) {
        (Move::Add, true) => return Err(Error::MoveMismatch { site: v, action: "add" }),
        (Move::Remove, false) => {
            return Err(Error::MoveMismatch {
                site: v,
                action: "remove",
            })
        }
        _ => {}
    }
    let mut deg = layer_degree(cfg.dims, v.y) as f64;
    if convention == Convention::LambdaBar && v.y == cfg.dims.height() {
        deg += 2.0;
    }
    let b = cfg.free_count(v.x, v.y, convention) as f64;
    let removal = eta * scent.value(v.y) + deg - 2.0 * b;
    Ok(match mv {
        Move::Remove => removal,
        Move::Add => -removal,
    })
}

/// Whether flipping `v` keeps `σ ∪ Λ₀` simply connected, judged from the
/// neighbors of `v` in `σ ∪ Λ₀`.
pub fn locally_simply_connected(cfg: &Configuration, v: Site) -> Result<bool> {
    cfg.dims.check_layer(v)?;
    Ok(cfg.local_sc_at(v.x, v.y))
}

/// `σ ∪ Λ₀` is connected and every unoccupied site reaches layer `h + 1`
/// through unoccupied sites.
pub fn globally_simply_connected(cfg: &Configuration) -> bool {
    let (w, h) = (cfg.dims.width(), cfg.dims.height());
    let reached_occupied = flood(cfg, (0..w).map(|x| (x, 1)), true);
    if reached_occupied != cfg.count {
        return false;
    }
    let reached_free = flood(cfg, (0..w).map(|x| (x, h)), false);
    reached_free == cfg.dims.sites() - cfg.count
}

/// Counts domain sites with occupancy `want` reachable from the seeds
/// through such sites.
fn flood<I>(cfg: &Configuration, seeds: I, want: bool) -> usize
where
    I: Iterator<Item = (usize, usize)>,
{
    let h = cfg.dims.height();
    let mut seen = vec![false; cfg.grid.len()];
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for (x, y) in seeds {
        if cfg.occupied_at(x, y) == want {
            seen[cfg.gi(x, y)] = true;
            stack.push((x, y));
        }
    }
    let mut reached = 0;
    while let Some((x, y)) = stack.pop() {
        reached += 1;
        for (a, b) in cfg.ring_sites(x, y) {
            if (1..=h).contains(&b) && cfg.occupied_at(a, b) == want && !seen[cfg.gi(a, b)] {
                seen[cfg.gi(a, b)] = true;
                stack.push((a, b));
            }
        }
    }
    reached
}

/// Per-layer occupied counts.
pub fn layer_sequence(cfg: &Configuration) -> LayerSequence {
    LayerSequence::from_raw(cfg.dims.width(), cfg.layers.clone())
}

fn check_scent(cfg: &Configuration, scent: &ScentFunction) -> Result<()> {
    if scent.h() != cfg.dims.height() {
        return Err(Error::InvalidParameter(format!(
            "scent has {} layers, lattice has {}",
            scent.h(),
            cfg.dims.height()
        )));
    }
    Ok(())
}
