//! Plain-text snapshots, one line per layer with the top layer first:
//!
//! ```text
//! L3 ....
//! L2  .#..
//! L1 ###.
//! ```
//!
//! Layer `k` is prefixed by `L<k> ` and indented by `(h - k) mod 2` spaces
//! to suggest the triangular offset. `#` is occupied, `.` empty.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use super::Configuration;
use crate::error::{Error, Result};
use crate::lattice::{LatticeDims, Site};

pub fn render_ascii(cfg: &Configuration) -> String {
    let (w, h) = (cfg.dims().width(), cfg.dims().height());
    let mut out = String::with_capacity(h * (w + 8));
    for y in (1..=h).rev() {
        let _ = write!(out, "L{y} ");
        if (h - y) % 2 == 1 {
            out.push(' ');
        }
        out.extend((0..w).map(|x| if cfg.occupied_at(x, y) { '#' } else { '.' }));
        out.push('\n');
    }
    out
}

/// Reads the format written by [`render_ascii`]. Blank lines are ignored.
pub fn parse_ascii(text: &str, cap: usize) -> Result<Configuration> {
    let mut rows: Vec<(usize, Vec<bool>)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (label, cells) = line.split_once(' ').unwrap_or((line, ""));
        let layer: usize = label
            .strip_prefix('L')
            .and_then(|l| l.parse().ok())
            .ok_or_else(|| Error::InvalidParameter(format!("line {}: bad layer label {label:?}", lineno + 1)))?;
        let cells = cells
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '#' => Ok(true),
                '.' => Ok(false),
                other => Err(Error::InvalidParameter(format!(
                    "line {}: unexpected cell {other:?}",
                    lineno + 1
                ))),
            })
            .collect::<Result<Vec<bool>>>()?;
        rows.push((layer, cells));
    }
    let h = rows.len();
    let w = rows.first().map_or(0, |r| r.1.len());
    let dims = LatticeDims::new(w, h)?;
    let mut sites = Vec::new();
    for (i, (layer, cells)) in rows.into_iter().enumerate() {
        let y = h - i;
        if layer != y {
            return Err(Error::InvalidParameter(format!("expected layer {y}, found {layer}")));
        }
        if cells.len() != w {
            return Err(Error::InvalidParameter(format!(
                "layer {y} has {} cells, expected {w}",
                cells.len()
            )));
        }
        sites.extend(cells.iter().enumerate().filter(|c| *c.1).map(|(x, _)| Site::new(x, y)));
    }
    Configuration::from_sites(dims, cap, sites)
}
