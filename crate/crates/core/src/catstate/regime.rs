//! Map of cat-component counts over the `(G, Delta_c)` plane.

use serde::{Deserialize, Serialize};

use super::decompose::component_count;
use crate::error::{Error, Result};
use crate::spectrum::{diagonalize, kerr_strength, KerrOptions, NormalModeDecay};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "count")]
pub enum RegimeCell {
    Components(u32),
    NonStroboscopic,
    Unstable,
    Divergent,
}

impl RegimeCell {
    /// Numeric code for tabular output: the component count, or a negative
    /// sentinel (`-1` non-stroboscopic, `-2` unstable, `-3` divergent).
    pub fn code(&self) -> i64 {
        match self {
            RegimeCell::Components(n) => *n as i64,
            RegimeCell::NonStroboscopic => -1,
            RegimeCell::Unstable => -2,
            RegimeCell::Divergent => -3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeSettings {
    pub omega_b: f64,
    pub g_a: f64,
    pub period_index: u32,
    pub q_max: u32,
    /// Largest accepted distance (in turns) between `n eta / omega_-` and the
    /// nearest admissible rational.
    pub phase_tolerance: f64,
    pub divergence_floor: f64,
}

impl Default for RegimeSettings {
    fn default() -> Self {
        Self {
            omega_b: 1.0,
            g_a: 1e-3,
            period_index: 1,
            q_max: 12,
            phase_tolerance: 1e-2,
            divergence_floor: KerrOptions::default().divergence_floor,
        }
    }
}

/// Nearest rational `p / q` with `q <= q_max` to `x` modulo one. Ties go to
/// the smaller denominator.
pub fn nearest_rational(x: f64, q_max: u32) -> (u32, u32, f64) {
    let x = x.rem_euclid(1.0);
    let mut best = (0u32, 1u32, x.min(1.0 - x));
    for q in 2..=q_max {
        let p = (x * q as f64).round();
        let d = (x - p / q as f64).abs();
        if d < best.2 {
            best = ((p as u32) % q, q, d);
        }
    }
    best
}

pub fn classify(g: f64, delta_c: f64, s: &RegimeSettings) -> Result<RegimeCell> {
    let modes = diagonalize(g, delta_c, s.omega_b, s.g_a)?;
    if !modes.stable {
        return Ok(RegimeCell::Unstable);
    }
    let frame = match kerr_strength(
        &modes,
        g,
        delta_c,
        s.omega_b,
        s.g_a,
        NormalModeDecay::default(),
        KerrOptions { divergence_floor: s.divergence_floor },
    ) {
        Ok(f) => f,
        Err(Error::BeyondCriticalPoint { .. }) => return Ok(RegimeCell::Unstable),
        Err(Error::CriticalDivergence { .. }) => return Ok(RegimeCell::Divergent),
        Err(e) => return Err(e),
    };
    let x = s.period_index as f64 * frame.eta / frame.omega_minus;
    let (p, q, d) = nearest_rational(x, s.q_max);
    if d > s.phase_tolerance {
        return Ok(RegimeCell::NonStroboscopic);
    }
    Ok(RegimeCell::Components(component_count(p, q) as u32))
}

/// Classifies every point; `cells[i_delta * g_axis.len() + i_g]`.
pub fn regime_map(g_axis: &[f64], delta_axis: &[f64], s: &RegimeSettings) -> Result<Vec<RegimeCell>> {
    let mut out = Vec::with_capacity(g_axis.len() * delta_axis.len());
    for &d in delta_axis {
        for &g in g_axis {
            out.push(classify(g, d, s)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_rounding() {
        assert_eq!(nearest_rational(0.249, 12).0, 1);
        assert_eq!(nearest_rational(0.249, 12).1, 4);
        assert_eq!(nearest_rational(0.999, 12).1, 1);
    }

    #[test]
    fn labels() {
        let s = RegimeSettings::default();
        assert_eq!(classify(0.6, 1.251, &s).unwrap(), RegimeCell::Unstable);
        assert_eq!(classify(0.0, 2.0, &s).unwrap(), RegimeCell::Components(1));
        let g = (0.25 * 1.251f64 * (1.0 - 1e-10)).sqrt();
        assert_eq!(classify(g, 1.251, &s).unwrap(), RegimeCell::Divergent);
    }
}
