//! Kerr evolution of a coherent state at stroboscopic times.
//!
//! At `t_n = 2 pi n / omega_-` the soft-mode displacement returns to its
//! initial value, the optical mode decouples, and a coherent input
//! `|Upsilon>` has acquired the phases `exp(i theta_K m^2)` with
//! `theta_K = 2 pi n eta / omega_-`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Largest discarded norm accepted when truncating the Fock expansion.
pub const TRUNCATION_LOSS_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatState {
    /// Fock amplitudes, normalized after truncation.
    pub amplitudes: Vec<Complex64>,
    pub upsilon: Complex64,
    /// Kerr phase `theta_K`, reduced to `[0, 2 pi)`.
    pub theta_k: f64,
    /// `theta_K / 2 pi`, reduced to `[0, 1)`.
    pub phase_fraction: f64,
    pub period_index: u32,
    pub truncation_loss: f64,
}

impl CatState {
    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Smallest admissible Fock truncation for amplitude `|Upsilon|`.
pub fn minimum_truncation(upsilon: f64) -> usize {
    (upsilon * upsilon + 6.0 * upsilon).ceil() as usize + 1
}

/// Truncated coherent-state amplitudes `e^{-|a|^2/2} a^m / sqrt(m!)`,
/// `m < n`, without renormalization.
pub fn coherent_amplitudes(alpha: Complex64, n: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n);
    let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for m in 0..n {
        if m > 0 {
            c = c * alpha / (m as f64).sqrt();
        }
        out.push(c);
    }
    out
}

/// Stroboscopic Kerr evolution of `|Upsilon>` after `n` soft-mode periods.
///
/// `eta_over_omega` is `eta / omega_-` and `truncation` the number of Fock
/// levels kept.
pub fn evolve_cat(upsilon: Complex64, eta_over_omega: f64, n: u32, truncation: usize) -> Result<CatState> {
    if !(upsilon.re.is_finite() && upsilon.im.is_finite()) {
        return Err(Error::InvalidParameter("non-finite coherent amplitude".into()));
    }
    if !(eta_over_omega.is_finite() && eta_over_omega >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eta/omega_- must be non-negative, got {eta_over_omega}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("period index must be at least 1".into()));
    }
    let u = upsilon.norm();
    let min = minimum_truncation(u);
    if truncation < min {
        return Err(Error::InvalidParameter(format!(
            "truncation {truncation} below the minimum {min} for |Upsilon| = {u}"
        )));
    }
    let mut amplitudes = coherent_amplitudes(upsilon, truncation);
    let kept: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
    let loss = (1.0 - kept).max(0.0);
    if loss > TRUNCATION_LOSS_LIMIT {
        return Err(Error::InsufficientTruncation(loss));
    }
    let fraction = (n as f64 * eta_over_omega).rem_euclid(1.0);
    let scale = kept.sqrt();
    for (m, c) in amplitudes.iter_mut().enumerate() {
        let m2 = (m * m) as f64;
        let turns = (fraction * m2).rem_euclid(1.0);
        *c = *c * Complex64::from_polar(1.0, TAU * turns) / scale;
    }
    Ok(CatState {
        amplitudes,
        upsilon,
        theta_k: TAU * fraction,
        phase_fraction: fraction,
        period_index: n,
        truncation_loss: loss,
    })
}

/// `t_n = 2 pi n / omega_-`.
pub fn stroboscopic_time(n: u32, omega_minus: f64) -> f64 {
    TAU * n as f64 / omega_minus
}

/// `max_j kappa_j t`; the lossless description needs this to be small.
pub fn validity_margin(t: f64, kappas: &[f64]) -> f64 {
    kappas.iter().fold(0.0f64, |a, &k| a.max(k)) * t
}

/// Residual displacement `zeta (1 - exp(-i omega t))` of a normal mode after
/// `cycles` of its own period. Zero for integer `cycles`.
pub fn residual_displacement(zeta: f64, cycles: f64) -> Complex64 {
    let turns = cycles.rem_euclid(1.0);
    zeta * (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -TAU * turns))
}

/// Fidelity between the ideal cat and the optical state obtained when the
/// fast mode `+`, completing `cycles_plus` of its periods, is kept.
///
/// Photon number `m` displaces mode `+` by `m beta`, so the reduced optical
/// state has coherences `<m beta | m' beta>` relative to the ideal cat.
pub fn fidelity_with_fast_mode(state: &CatState, zeta_plus: f64, cycles_plus: f64) -> f64 {
    let beta = residual_displacement(zeta_plus, cycles_plus);
    let b2 = beta.norm_sqr();
    let p: Vec<f64> = state.amplitudes.iter().map(|c| c.norm_sqr()).collect();
    let mut f = 0.0;
    for (m, pm) in p.iter().enumerate() {
        for (k, pk) in p.iter().enumerate() {
            let d = m as f64 - k as f64;
            f += pm * pk * (-0.5 * b2 * d * d).exp();
        }
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn truncation_rules() {
        let u = Complex64::new(2.0, 0.0);
        assert!(matches!(evolve_cat(u, 0.5, 1, 10), Err(Error::InvalidParameter(_))));
        let s = evolve_cat(u, 0.5, 1, 40).unwrap();
        assert!(s.truncation_loss < 1e-8);
        assert_relative_eq!(s.norm_sqr(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn half_turn_gives_phase_flip() {
        let s = evolve_cat(Complex64::new(2.0, 0.0), 0.5, 1, 40).unwrap();
        assert_relative_eq!(s.theta_k, std::f64::consts::PI);
        let ideal = coherent_amplitudes(Complex64::new(-2.0, 0.0), 40);
        let overlap: Complex64 = ideal.iter().zip(&s.amplitudes).map(|(a, b)| a.conj() * b).sum();
        assert_relative_eq!(overlap.norm(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn stroboscopic_residual_vanishes() {
        assert_eq!(residual_displacement(0.7, 3.0), Complex64::new(0.0, 0.0));
        assert!(residual_displacement(0.7, 0.5).norm() > 1.0);
    }

    #[test]
    fn fast_mode_fidelity() {
        let s = evolve_cat(Complex64::new(2.0, 0.0), 0.25, 1, 40).unwrap();
        assert_relative_eq!(fidelity_with_fast_mode(&s, 1e-2, 5.0), 1.0, epsilon = 1e-13);
        let f = fidelity_with_fast_mode(&s, 1e-2, 5.3);
        assert!(f < 1.0 && f > 0.99);
    }

    #[test]
    fn validity() {
        let t = stroboscopic_time(2, 0.5);
        assert_relative_eq!(t, 8.0 * std::f64::consts::PI);
        assert_relative_eq!(validity_margin(t, &[0.01, 0.02]), 0.02 * t);
    }

    proptest! {
        #[test]
        fn populations_are_poissonian(re in -2.5f64..2.5, im in -2.5f64..2.5, r in 0.0f64..1.0, n in 1u32..5) {
            let u = Complex64::new(re, im);
            let s = evolve_cat(u, r, n, minimum_truncation(u.norm()) + 10).unwrap();
            let c = coherent_amplitudes(u, s.dimension());
            let scale: f64 = c.iter().map(|x| x.norm_sqr()).sum();
            for (a, b) in s.amplitudes.iter().zip(&c) {
                prop_assert!((a.norm_sqr() - b.norm_sqr() / scale).abs() < 1e-14);
            }
        }
    }
}
