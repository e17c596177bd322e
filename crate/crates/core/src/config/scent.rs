use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// How a scent table was produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScentKind {
    /// `S(y) = C (y^k - 1)`.
    Power {
        k: f64,
    },
    /// `S(y) = C (h - y + 1)^(-k) - D`.
    Reciprocal {
        k: f64,
    },
    Table,
}

/// Per-layer scent intensity `S(1..=h)`, with `S(1) = 0` and nondecreasing
/// values.
#[derive(Debug, Clone, PartialEq)]
pub struct ScentFunction {
    values: Vec<f64>,
    phi: f64,
    kind: ScentKind,
    nondecelerating: bool,
}

const SHAPE_TOL: f64 = 1e-12;

/// `f(1) = 0`, nondecreasing first differences and nondecreasing second
/// differences, up to a relative rounding tolerance.
pub fn is_nondecelerating(values: &[f64]) -> bool {
    let tol = SHAPE_TOL * values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if values.is_empty() || values[0].abs() > tol {
        return false;
    }
    let diffs: Vec<f64> = values.windows(2).map(|p| p[1] - p[0]).collect();
    diffs.iter().all(|&d| d >= -tol) && diffs.windows(2).all(|p| p[1] - p[0] >= -tol)
}

impl ScentFunction {
    /// Builds from an explicit table. Requires `S(1) = 0` and
    /// nondecreasing, nonnegative entries.
    pub fn from_table(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "scent table needs at least 2 layers, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("scent table has non-finite entries".into()));
        }
        if values[0] != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "scent table must start at 0, got {}",
                values[0]
            )));
        }
        if let Some(k) = values.windows(2).position(|p| p[1] < p[0]) {
            return Err(Error::InvalidParameter(format!(
                "scent table decreases between layers {} and {}",
                k + 1,
                k + 2
            )));
        }
        Ok(Self::build(values, ScentKind::Table))
    }

    /// Power-law scent normalized so the column sum equals `phi`.
    pub fn power(h: usize, k: f64, phi: f64) -> Result<Self> {
        check_shape(h, k)?;
        check_phi(phi)?;
        let raw: Vec<f64> = (1..=h).map(|y| libm::pow(y as f64, k) - 1.0).collect();
        let c = phi / raw.iter().sum::<f64>();
        Ok(Self::build(
            raw.into_iter().map(|v| c * v).collect(),
            ScentKind::Power { k },
        ))
    }

    /// Power-law scent with `C = 1`.
    pub fn power_unnormalized(h: usize, k: f64) -> Result<Self> {
        check_shape(h, k)?;
        let raw = (1..=h).map(|y| libm::pow(y as f64, k) - 1.0).collect();
        Ok(Self::build(raw, ScentKind::Power { k }))
    }

    pub fn linear(h: usize, phi: f64) -> Result<Self> {
        Self::power(h, 1.0, phi)
    }

    /// Reciprocal-distance scent shifted by one layer so it stays finite at
    /// the top: `C (h - y + 1)^(-k) - D`, with `D` chosen so `S(1) = 0` and
    /// `C` so the column sum equals `phi`.
    pub fn reciprocal(h: usize, k: f64, phi: f64) -> Result<Self> {
        check_shape(h, k)?;
        check_phi(phi)?;
        let raw = reciprocal_raw(h, k);
        let c = phi / raw.iter().sum::<f64>();
        Ok(Self::build(
            raw.into_iter().map(|v| c * v).collect(),
            ScentKind::Reciprocal { k },
        ))
    }

    pub fn reciprocal_unnormalized(h: usize, k: f64) -> Result<Self> {
        check_shape(h, k)?;
        Ok(Self::build(reciprocal_raw(h, k), ScentKind::Reciprocal { k }))
    }

    /// Identically zero scent.
    pub fn zero(h: usize) -> Result<Self> {
        Self::from_table(alloc::vec![0.0; h])
    }

    fn build(mut values: Vec<f64>, kind: ScentKind) -> Self {
        values[0] = 0.0;
        let phi = values.iter().sum();
        let nondecelerating = is_nondecelerating(&values);
        ScentFunction {
            values,
            phi,
            kind,
            nondecelerating,
        }
    }

    pub fn h(&self) -> usize {
        self.values.len()
    }

    /// Intensity on layer `y` (1-based).
    #[inline]
    pub fn value(&self, y: usize) -> f64 {
        self.values[y - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column scent: the sum of the table.
    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn kind(&self) -> ScentKind {
        self.kind
    }

    pub fn is_nondecelerating(&self) -> bool {
        self.nondecelerating
    }

    /// Total scent of a layer sequence, `sum_k n_k S(k)`.
    pub fn total(&self, counts: &[usize]) -> f64 {
        counts.iter().zip(&self.values).map(|(&n, &s)| n as f64 * s).sum()
    }
}

fn reciprocal_raw(h: usize, k: f64) -> Vec<f64> {
    let base = libm::pow(h as f64, -k);
    (1..=h).map(|y| libm::pow((h - y + 1) as f64, -k) - base).collect()
}

fn check_shape(h: usize, k: f64) -> Result<()> {
    if h < 2 {
        return Err(Error::InvalidParameter(format!("scent needs h >= 2, got {h}")));
    }
    if !(k.is_finite() && k >= 1.0) {
        return Err(Error::InvalidParameter(format!("scent exponent must be >= 1, got {k}")));
    }
    Ok(())
}

fn check_phi(phi: f64) -> Result<()> {
    if !(phi.is_finite() && phi > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "column scent must be positive, got {phi}"
        )));
    }
    Ok(())
}
