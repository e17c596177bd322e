//! Geometry of the `w x h` cylindrical triangular domain and its extension
//! with an always-occupied layer `0` and an always-empty layer `h + 1`.
//!
//! Sites use axial coordinates `(x, y)`: `x` is the column on the periodic
//! ring `0..w`, `y` is the layer. The six neighbors of `(x, y)` are
//! `(x-1, y), (x+1, y), (x, y-1), (x+1, y-1), (x, y+1), (x-1, y+1)`, which
//! makes the graph distance to layer `0` equal to `y` for every site.

use core::fmt;
use core::ops::Deref;

use crate::error::{Error, Result};

/// Width and height of the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LatticeDims {
    w: usize,
    h: usize,
}

/// The aspect ratio `w / h`, kept as an exact fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AspectRatio {
    pub w: usize,
    pub h: usize,
}

impl AspectRatio {
    pub fn as_f64(self) -> f64 {
        self.w as f64 / self.h as f64
    }
}

impl fmt::Display for AspectRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.w, self.h)
    }
}

/// A vertex of the extended lattice. Layer `0` and layer `h + 1` are the
/// virtual rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site {
    pub x: usize,
    pub y: usize,
}

impl Site {
    pub const fn new(x: usize, y: usize) -> Self {
        Site { x, y }
    }
}

/// Neighbor offsets in the canonical listing order.
pub const STENCIL: [(isize, isize); 6] = [(-1, 0), (1, 0), (0, -1), (1, -1), (0, 1), (-1, 1)];

/// Neighbor offsets in cyclic order around a site; consecutive entries are
/// adjacent to each other.
#[cfg(test)]
pub(crate) const RING: [(isize, isize); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];

impl LatticeDims {
    pub fn new(w: usize, h: usize) -> Result<Self> {
        if w < 3 || h < 2 {
            return Err(Error::InvalidDims { w, h });
        }
        Ok(LatticeDims { w, h })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.w
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.h
    }

    pub fn aspect_ratio(&self) -> AspectRatio {
        AspectRatio { w: self.w, h: self.h }
    }

    /// Number of sites of the domain proper (layers `1..=h`).
    #[inline]
    pub fn sites(&self) -> usize {
        self.w * self.h
    }

    /// True for any site of the extended lattice, virtual layers included.
    pub fn contains(&self, v: Site) -> bool {
        v.x < self.w && v.y <= self.h + 1
    }

    pub fn in_domain(&self, v: Site) -> bool {
        v.x < self.w && (1..=self.h).contains(&v.y)
    }

    /// Dense index of a domain site, row-major from layer 1.
    #[inline]
    pub fn site_index(&self, v: Site) -> usize {
        debug_assert!(self.in_domain(v));
        (v.y - 1) * self.w + v.x
    }

    #[inline]
    pub fn site_at(&self, index: usize) -> Site {
        Site {
            x: index % self.w,
            y: index / self.w + 1,
        }
    }

    pub fn domain_sites(&self) -> impl Iterator<Item = Site> + '_ {
        (0..self.sites()).map(move |i| self.site_at(i))
    }

    pub(crate) fn check_contains(&self, v: Site) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::SiteOutOfRange { x: v.x, y: v.y })
        }
    }

    pub(crate) fn check_layer(&self, v: Site) -> Result<()> {
        if v.x >= self.w {
            return Err(Error::SiteOutOfRange { x: v.x, y: v.y });
        }
        if !(1..=self.h).contains(&v.y) {
            return Err(Error::LayerOutOfRange { y: v.y, h: self.h });
        }
        Ok(())
    }

    /// Applies an offset with the column reduced mod `w`. Returns `None` when
    /// the layer leaves `0..=h+1`.
    #[inline]
    pub(crate) fn shift(&self, v: Site, (dx, dy): (isize, isize)) -> Option<Site> {
        let y = v.y as isize + dy;
        if y < 0 || y > self.h as isize + 1 {
            return None;
        }
        let x = (v.x as isize + dx).rem_euclid(self.w as isize) as usize;
        Some(Site { x, y: y as usize })
    }
}

/// Up to six neighbors of a site.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Neighbors {
    sites: [Site; 6],
    len: usize,
}

impl Deref for Neighbors {
    type Target = [Site];

    fn deref(&self) -> &[Site] {
        &self.sites[..self.len]
    }
}

/// The extended-lattice neighbors of `v`, in [`STENCIL`] order. Rows outside
/// `0..=h+1` are dropped, which only happens for queries on a virtual layer.
pub fn neighbors(dims: LatticeDims, v: Site) -> Result<Neighbors> {
    dims.check_contains(v)?;
    let mut out = Neighbors {
        sites: [Site::new(0, 0); 6],
        len: 0,
    };
    for off in STENCIL {
        if let Some(u) = dims.shift(v, off) {
            out.sites[out.len] = u;
            out.len += 1;
        }
    }
    Ok(out)
}

/// Number of neighbors of `v` inside the domain proper.
pub fn degree_in_lambda(dims: LatticeDims, v: Site) -> Result<usize> {
    dims.check_layer(v)?;
    Ok(layer_degree(dims, v.y))
}

#[inline]
pub(crate) fn layer_degree(dims: LatticeDims, y: usize) -> usize {
    let mut d = 2;
    if y > 1 {
        d += 2;
    }
    if y < dims.h {
        d += 2;
    }
    d
}

pub fn are_adjacent(dims: LatticeDims, a: Site, b: Site) -> bool {
    STENCIL.iter().any(|&off| dims.shift(a, off) == Some(b))
}

/// Connectivity of every subset of the six-site ring around a site.
///
/// Bit `i` of the index stands for the ring member at `RING[i]`, and members
/// count as linked only when consecutive on the ring. On `w >= 4` this is
/// exactly the induced subgraph. On `w = 3` the wrap also joins the east and
/// west members; that chord closes a loop around the cylinder rather than a
/// triangle, so it must not count towards local connectivity.
pub(crate) const RING_CONNECTED: [bool; 64] = ring_table();

const fn ring_table() -> [bool; 64] {
    let mut table = [false; 64];
    let mut mask = 0u8;
    while mask < 64 {
        let mut seen = mask & mask.wrapping_neg();
        loop {
            let grown = (seen | seen << 1 | seen >> 1 | seen << 5 | seen >> 5) & mask;
            if grown == seen {
                break;
            }
            seen = grown;
        }
        table[mask as usize] = seen == mask;
        mask += 1;
    }
    table
}
