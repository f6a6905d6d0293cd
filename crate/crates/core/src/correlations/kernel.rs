//! Displacement correlators of the polaron-frame bath.
//!
//! The optical mode sees the normal modes only through the Hermitian
//! displacement generator `P = sum_j s_j zeta_j (B_j^dag - B_j)` with
//! `s_- = +1`, `s_+ = -1`. For a damped vacuum bath the two-time function
//! `<P(t) P(0)> = -c(t)` with
//!
//! ```text
//! c(t) = sum_j zeta_j^2 exp(-i omega_j t - kappa_j |t| / 2),   c(-t) = conj c(t)
//! ```
//!
//! and all displacement correlators follow from Gaussian pairing.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::PolaronFrame;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelMode {
    pub zeta: f64,
    pub omega: f64,
    /// Energy decay rate; the mode amplitude decays at `kappa / 2`.
    pub kappa: f64,
    /// Sign of the mode in the displacement generator.
    pub sign: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationKernel {
    pub modes: Vec<KernelMode>,
}

impl CorrelationKernel {
    pub fn from_frame(frame: &PolaronFrame) -> Self {
        Self {
            modes: vec![
                KernelMode {
                    zeta: frame.zeta_minus,
                    omega: frame.omega_minus,
                    kappa: frame.kappa_minus,
                    sign: 1.0,
                },
                KernelMode {
                    zeta: frame.zeta_plus,
                    omega: frame.omega_plus,
                    kappa: frame.kappa_plus,
                    sign: -1.0,
                },
            ],
        }
    }

    pub fn single(zeta: f64, omega: f64, kappa: f64) -> Self {
        Self { modes: vec![KernelMode { zeta, omega, kappa, sign: 1.0 }] }
    }

    /// `S = sum_j zeta_j^2`.
    pub fn total_weight(&self) -> f64 {
        self.modes.iter().map(|m| m.zeta * m.zeta).sum()
    }

    /// `c(t)` for any real `t`.
    pub fn correlation(&self, t: f64) -> Complex64 {
        let s = self.total_weight();
        Complex64::new(s, 0.0) - self.psi(t)
    }

    /// `psi(t) = S - c(t)`, evaluated without cancellation at small `t`.
    pub(crate) fn psi(&self, t: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for m in &self.modes {
            let z2 = m.zeta * m.zeta;
            if z2 == 0.0 {
                continue;
            }
            acc -= z2 * expm1(Complex64::new(-0.5 * m.kappa * t.abs(), -m.omega * t));
        }
        acc
    }

    /// `Phi_2(tau) = S - c(tau)` for `tau >= 0`.
    pub fn phi2(&self, tau: f64) -> Result<Complex64> {
        if !(tau >= 0.0) {
            return Err(Error::InvalidParameter(format!("tau must be non-negative, got {tau}")));
        }
        Ok(self.psi(tau))
    }

    /// Exponent of the four-point displacement correlator,
    /// `<e^{P(t1-t2)} e^{P(t1)} e^{-P(0)} e^{-P(-t3)}> = exp(-Phi_4)`.
    pub fn phi4(&self, t1: f64, t2: f64, t3: f64) -> Result<Complex64> {
        if !(t1 >= 0.0 && t2 >= 0.0 && t3 >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "delays must be non-negative, got ({t1}, {t2}, {t3})"
            )));
        }
        Ok(self.phi4_unchecked(t1, t2, t3))
    }

    pub(crate) fn phi4_unchecked(&self, t1: f64, t2: f64, t3: f64) -> Complex64 {
        self.psi(t1 - t2) + self.psi(t1) + self.psi(t1 - t2 + t3) + self.psi(t1 + t3)
            - self.psi(-t2)
            - self.psi(t3)
    }

    /// Largest relevant oscillation or decay rate of `c(t)`.
    pub(crate) fn max_rate(&self, weight_floor: f64) -> f64 {
        self.modes
            .iter()
            .filter(|m| m.zeta * m.zeta > weight_floor)
            .map(|m| m.omega.abs().max(0.5 * m.kappa))
            .fold(0.0, f64::max)
    }
}

/// `exp(z) - 1` accurate for small `|z|`.
pub(crate) fn expm1(z: Complex64) -> Complex64 {
    let (s, c) = z.im.sin_cos();
    let em1 = z.re.exp_m1();
    let half = (0.5 * z.im).sin();
    let cos_m1 = -2.0 * half * half;
    Complex64::new(em1 * c + cos_m1, (em1 + 1.0) * s)
}
