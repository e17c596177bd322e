use alloc::format;
use alloc::vec::Vec;

use crate::config::is_nondecelerating;
use crate::error::{Error, Result};

const BISECTION_TOL: f64 = 1e-12;

/// Continuous piecewise-linear function given by its knots.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearFn {
    knots: Vec<(f64, f64)>,
    nonneg: bool,
}

impl PiecewiseLinearFn {
    /// Knots must have strictly increasing abscissae.
    pub fn from_knots(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 || knots.windows(2).any(|p| p[1].0 <= p[0].0) {
            return Err(Error::InvalidParameter(
                "need at least two knots with increasing abscissae".into(),
            ));
        }
        let scale = knots.iter().fold(1.0f64, |m, k| m.max(k.1.abs()));
        let nonneg = knots.iter().all(|k| k.1 >= -1e-12 * scale);
        Ok(PiecewiseLinearFn { knots, nonneg })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.knots.iter().map(|k| k.0)
    }

    pub fn slopes(&self) -> Vec<f64> {
        self.knots
            .windows(2)
            .map(|p| (p[1].1 - p[0].1) / (p[1].0 - p[0].0))
            .collect()
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.knots[0].0, self.knots[self.knots.len() - 1].0)
    }

    /// No knot below zero beyond rounding relative to the largest value.
    pub fn is_nonneg(&self) -> bool {
        self.nonneg
    }

    /// Slopes nondecreasing up to `tol`.
    pub fn is_convex(&self, tol: f64) -> bool {
        self.slopes().windows(2).all(|p| p[1] >= p[0] - tol)
    }

    /// Value at `x`, clamped to the domain.
    pub fn eval(&self, x: f64) -> f64 {
        let (lo, hi) = self.domain();
        let x = x.clamp(lo, hi);
        let i = self.knots.partition_point(|k| k.0 <= x).clamp(1, self.knots.len() - 1);
        let ((x0, y0), (x1, y1)) = (self.knots[i - 1], self.knots[i]);
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// Exact integral over `[a, b]` within the domain.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if b < a {
            return -self.integral(b, a);
        }
        let mut total = 0.0;
        for p in self.knots.windows(2) {
            let lo = p[0].0.max(a);
            let hi = p[1].0.min(b);
            if hi > lo {
                total += 0.5 * (hi - lo) * (self.eval(lo) + self.eval(hi));
            }
        }
        total
    }
}

/// A line `y = slope x + intercept`.
#[derive(Debug, Clone, Copy)]
struct Line {
    slope: f64,
    intercept: f64,
}

impl Line {
    fn at(self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

/// The supporting lines: `L_1 = 0` and, for `K >= 2`,
/// `L_K(x) = f(K) + (x - K + 1/2) (f(K) - f(K-1))`.
fn lines(f: &[f64]) -> Vec<Line> {
    (1..=f.len())
        .map(|k| {
            if k == 1 {
                Line {
                    slope: 0.0,
                    intercept: 0.0,
                }
            } else {
                let d = f[k - 1] - f[k - 2];
                Line {
                    slope: d,
                    intercept: f[k - 1] - (k as f64 - 0.5) * d,
                }
            }
        })
        .collect()
}

/// Knots of the upper envelope of `lines` (slopes nondecreasing) on
/// `[lo, hi]`.
fn envelope(lines: &[Line], lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let mut hull: Vec<Line> = Vec::with_capacity(lines.len());
    for &l in lines {
        if let Some(top) = hull.last() {
            if top.slope == l.slope {
                if top.intercept >= l.intercept {
                    continue;
                }
                hull.pop();
            }
        }
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // b is hidden when l overtakes a no later than b does
            if (l.intercept - a.intercept) * (b.slope - a.slope) >= (b.intercept - a.intercept) * (l.slope - a.slope) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(l);
    }
    let cross = |a: Line, b: Line| (a.intercept - b.intercept) / (b.slope - a.slope);
    let mut i = 0;
    while i + 1 < hull.len() && cross(hull[i], hull[i + 1]) <= lo {
        i += 1;
    }
    let mut knots = alloc::vec![(lo, hull[i].at(lo))];
    while i + 1 < hull.len() {
        let x = cross(hull[i], hull[i + 1]);
        if x >= hi {
            break;
        }
        i += 1;
        knots.push((x, hull[i].at(x)));
    }
    knots.push((hi, hull[i].at(hi)));
    knots
}

fn envelope_integral(lines: &[Line], hi: f64) -> f64 {
    envelope(lines, 0.0, hi)
        .windows(2)
        .map(|p| 0.5 * (p[1].0 - p[0].0) * (p[0].1 + p[1].1))
        .sum()
}

fn check_input(f: &[f64]) -> Result<()> {
    if f.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidParameter("table must be finite and nonnegative".into()));
    }
    if !is_nondecelerating(f) {
        return Err(Error::InvalidParameter(format!("table is not nondecelerating: {f:?}")));
    }
    Ok(())
}

/// Offsets `a_K` such that `max_{k <= K} (L_k - a_k)` integrates over
/// `[0, K]` to `f(1) + ... + f(K)`, found by bisection on `[0, a_max]`.
pub fn line_offsets(f: &[f64]) -> Result<Vec<f64>> {
    check_input(f)?;
    let base = lines(f);
    let diff = |k: usize| if k == 0 { 0.0 } else { f[k] - f[k - 1] };
    let mut offsets = alloc::vec![0.0];
    let mut shifted: Vec<Line> = alloc::vec![base[0]];
    let mut target = f[0];
    for k in 2..=f.len() {
        target += f[k - 1];
        let a_max = offsets[k - 2] + 0.5 * (diff(k - 1) - diff(k - 2));
        let line = base[k - 1];
        let excess = |a: f64, shifted: &mut Vec<Line>| {
            shifted.push(Line {
                slope: line.slope,
                intercept: line.intercept - a,
            });
            let v = envelope_integral(shifted, k as f64) - target;
            shifted.pop();
            v
        };
        let (mut lo, mut hi) = (0.0, a_max.max(0.0));
        if excess(hi, &mut shifted) >= 0.0 {
            lo = hi;
        }
        while hi - lo > BISECTION_TOL * (1.0 + hi) {
            let mid = 0.5 * (lo + hi);
            if excess(mid, &mut shifted) >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        offsets.push(lo);
        shifted.push(Line {
            slope: line.slope,
            intercept: line.intercept - lo,
        });
    }
    Ok(offsets)
}

/// Convex, nonnegative `f̂` on `[0, h]` whose integral over `[K-1, K]`
/// tracks `f(K)`: partial integrals from 0 match partial sums up to
/// `Δf(K)/8` and agree exactly at `K = h`.
pub fn convex_approx(f: &[f64]) -> Result<PiecewiseLinearFn> {
    let offsets = line_offsets(f)?;
    let shifted: Vec<Line> = lines(f)
        .into_iter()
        .zip(&offsets)
        .map(|(l, a)| Line {
            slope: l.slope,
            intercept: l.intercept - a,
        })
        .collect();
    PiecewiseLinearFn::from_knots(envelope(&shifted, 0.0, f.len() as f64))
}

/// Smallest slack over all `1 <= K1 <= K2 <= h` of
/// `-Δf(K1-1)/8 <= ∫_{K1-1}^{K2} f̂ - sum_{K1..=K2} f <= Δf(K2)/8`, with the
/// lower bound 0 at `K1 = 1` and the upper bound 0 at `K2 = h`. Negative
/// means violated.
pub fn sandwich_margin(f: &[f64], fhat: &PiecewiseLinearFn) -> f64 {
    let h = f.len();
    let cum: Vec<f64> = (0..=h).map(|m| fhat.integral(0.0, m as f64)).collect();
    let sums: Vec<f64> = (0..=h).map(|m| f[..m].iter().sum()).collect();
    let diff = |k: usize| f[k] - f[k - 1];
    let mut margin = f64::INFINITY;
    for k1 in 1..=h {
        for k2 in k1..=h {
            let gap = (cum[k2] - cum[k1 - 1]) - (sums[k2] - sums[k1 - 1]);
            let lower = if k1 == 1 { 0.0 } else { -diff(k1 - 1) / 8.0 };
            let upper = if k2 == h { 0.0 } else { diff(k2) / 8.0 };
            margin = margin.min(gap - lower).min(upper - gap);
        }
    }
    margin
}
