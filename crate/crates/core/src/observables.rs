//! Bridge detection: components of the occupied set high in the domain.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::config::{render_ascii, Configuration};
use crate::error::{Error, Result};

/// Slack added to `eps h` before flooring so that `0.3 * 10` counts as 3.
const FLOOR_SLACK: f64 = 1e-9;

/// Summary of the bridge observables of one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct BridgeReport {
    /// Layer `h` is empty.
    pub nb: bool,
    /// Components of `σ` with a site in layer `h`.
    pub bridge_count: usize,
    /// `(A, A + d)` windows with at least two components reaching `A + d`.
    pub mb_hits: Vec<(usize, usize)>,
    pub epsilon_used: f64,
}

impl BridgeReport {
    pub fn mb(&self) -> bool {
        !self.mb_hits.is_empty()
    }
}

pub fn bridge_report(cfg: &Configuration, epsilon: f64) -> Result<BridgeReport> {
    let mb_hits = mb_epsilon(cfg, epsilon)?;
    let bridge_count = bridge_count(cfg);
    Ok(BridgeReport {
        nb: bridge_count == 0,
        bridge_count,
        mb_hits,
        epsilon_used: epsilon,
    })
}

/// Union-find over domain sites, indexed `(y - 1) w + x`.
struct Components {
    parent: Vec<u32>,
}

impl Components {
    fn new(n: usize) -> Self {
        Components {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] as usize != i {
            let up = self.parent[self.parent[i] as usize];
            self.parent[i] = up;
            i = up as usize;
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb) as u32;
        }
    }
}

/// Incremental labeling of `σ` restricted to layers `start..=h`, with
/// `start` lowered one layer at a time.
struct TopDown<'a> {
    cfg: &'a Configuration,
    uf: Components,
    start: usize,
}

impl<'a> TopDown<'a> {
    fn new(cfg: &'a Configuration) -> Self {
        TopDown {
            cfg,
            uf: Components::new(cfg.dims().sites()),
            start: cfg.dims().height() + 1,
        }
    }

    /// Adds layer `start - 1`, joining it to itself and to the layer above.
    fn lower(&mut self) {
        let (w, h) = (self.cfg.dims().width(), self.cfg.dims().height());
        let y = self.start - 1;
        for x in 0..w {
            if !self.cfg.occupied_at(x, y) {
                continue;
            }
            let here = (y - 1) * w + x;
            let east = (x + 1) % w;
            if self.cfg.occupied_at(east, y) {
                self.uf.union(here, (y - 1) * w + east);
            }
            if y < h {
                let west = (x + w - 1) % w;
                for a in [x, west] {
                    if self.cfg.occupied_at(a, y + 1) {
                        self.uf.union(here, y * w + a);
                    }
                }
            }
        }
        self.start = y;
    }

    fn lower_to(&mut self, start: usize) {
        while self.start > start {
            self.lower();
        }
    }

    /// Distinct components among the occupied sites of layer `y >= start`.
    fn components_at(&mut self, y: usize) -> usize {
        let w = self.cfg.dims().width();
        let mut roots: Vec<usize> = (0..w)
            .filter(|&x| self.cfg.occupied_at(x, y))
            .map(|x| self.uf.find((y - 1) * w + x))
            .collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }
}

/// At least two components of `σ` within layers `max(⌊ah⌋, 1)..=h` contain
/// a site of layer `⌊bh⌋`.
pub fn multiple_ab_bridges(cfg: &Configuration, a: f64, b: f64) -> Result<bool> {
    if !(a > 0.0 && a < b && b <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < a < b <= 1, got a = {a}, b = {b}"
        )));
    }
    let h = cfg.dims().height();
    let start = (libm::floor(a * h as f64 + FLOOR_SLACK) as usize).max(1);
    let target = libm::floor(b * h as f64 + FLOOR_SLACK) as usize;
    if target < 1 {
        return Ok(false);
    }
    let mut td = TopDown::new(cfg);
    td.lower_to(start.min(target));
    Ok(td.components_at(target) >= 2)
}

/// Window depth `⌊eps h⌋` used by [`mb_epsilon`].
pub fn mb_depth(h: usize, epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    let d = libm::floor(epsilon * h as f64 + FLOOR_SLACK) as usize;
    if d < 1 {
        return Err(Error::InvalidParameter(format!(
            "epsilon {epsilon} resolves to depth 0 on {h} layers"
        )));
    }
    Ok(d)
}

/// Every window `(A, A + ⌊eps h⌋)` with `1 <= A <= h - ⌊eps h⌋` in which two
/// components of `σ` above `A` reach the upper layer, in increasing `A`.
pub fn mb_epsilon(cfg: &Configuration, epsilon: f64) -> Result<Vec<(usize, usize)>> {
    let h = cfg.dims().height();
    let d = mb_depth(h, epsilon)?;
    let mut hits = Vec::new();
    let mut td = TopDown::new(cfg);
    for a in (1..=h.saturating_sub(d)).rev() {
        td.lower_to(a);
        if td.components_at(a + d) >= 2 {
            hits.push((a, a + d));
        }
    }
    hits.reverse();
    Ok(hits)
}

/// Layer `h` holds no occupied site.
pub fn nb(cfg: &Configuration) -> bool {
    cfg.layer_counts()[cfg.dims().height() - 1] == 0
}

/// Components of `σ` containing a site of layer `h`.
pub fn bridge_count(cfg: &Configuration) -> usize {
    if nb(cfg) {
        return 0;
    }
    let mut td = TopDown::new(cfg);
    td.lower_to(1);
    td.components_at(cfg.dims().height())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderFormat {
    Ascii,
    Svg,
}

pub fn render(cfg: &Configuration, format: RenderFormat) -> String {
    match format {
        RenderFormat::Ascii => render_ascii(cfg),
        RenderFormat::Svg => render_svg(cfg),
    }
}

/// One circle of radius 0.45 per domain site on the unit triangular grid,
/// with the cylinder cut at column 0 and layer 1 at the bottom.
fn render_svg(cfg: &Configuration) -> String {
    let (w, h) = (cfg.dims().width(), cfg.dims().height());
    let row = libm::sqrt(3.0) / 2.0;
    let (width, height) = (w as f64 + 0.5, h as f64 * row + 0.5);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="-0.5 -0.5 {width:.3} {height:.3}">"#
    );
    for y in 1..=h {
        for x in 0..w {
            let px = libm::fmod(x as f64 + 0.5 * (y - 1) as f64, w as f64);
            let py = (h - y) as f64 * row;
            let fill = if cfg.occupied_at(x, y) { "black" } else { "white" };
            let _ = writeln!(
                out,
                r#"<circle cx="{px:.4}" cy="{py:.4}" r="0.45" fill="{fill}" stroke="gray" stroke-width="0.05"/>"#
            );
        }
    }
    out.push_str("</svg>\n");
    out
}
