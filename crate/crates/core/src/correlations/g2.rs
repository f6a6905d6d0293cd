//! Weak-drive second-order coherence of the optical mode.
//!
//! To lowest order in the probe amplitude `eps_a`, with
//! `Delta~ = Delta_a - eta`, `E_2 = 2 Delta~ - 2 eta` and `k = kappa_a`:
//!
//! ```text
//! <n>           = (eps^2 / k) Re I_2,   I_2 = int_0^inf dt e^{-(i Delta~ + k) t} e^{-Phi_2(t)}
//! <a^dag2 a^2>  = (2 eps^4 / k) Re I_4,
//! I_4 = int dt1 dt2 dt3 e^{-(i E_2 + 2k) t1} e^{(i Delta~ - k) t2} e^{-(i Delta~ + k) t3} e^{-Phi_4}
//! g2(0)         = 2 k Re I_4 / (Re I_2)^2
//! ```
//!
//! The probe amplitude cancels from `g2(0)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::kernel::CorrelationKernel;
use super::quadrature::{integrate_1d, integrate_3d, TensorIntegrand, NODES};
use crate::error::{Error, Result};
use crate::spectrum::PolaronFrame;

/// Optical probe: detuning from the shifted optical frequency, amplitude and
/// amplitude decay rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveConfig {
    pub delta_a: f64,
    pub epsilon_a: f64,
    pub kappa_a: f64,
}

impl DriveConfig {
    /// Kerr-free photon number `eps^2 / (kappa^2 + Delta~^2)`; the weak-drive
    /// expansion needs this to be small.
    pub fn truncation_ratio(&self, eta: f64) -> f64 {
        let d = self.delta_a - eta;
        self.epsilon_a * self.epsilon_a / (self.kappa_a * self.kappa_a + d * d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Truncation of each delay axis in units of its envelope decay time.
    pub decay_lengths: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_cells: usize,
    pub max_panels_1d: usize,
    /// Subtract the long-time value of the displacement correlator and add
    /// its contribution analytically.
    pub subtract_asymptote: bool,
    /// Multiplies the initial panel width.
    pub panel_scale: f64,
    /// Cap on the initial number of panels per axis.
    pub max_initial_panels: usize,
    /// Warn when the Kerr-free photon number exceeds this.
    pub weak_drive_limit: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            decay_lengths: 24.0,
            rel_tol: 1e-6,
            abs_tol: 1e-300,
            max_cells: 400_000,
            max_panels_1d: 100_000,
            subtract_asymptote: true,
            panel_scale: 1.0,
            max_initial_panels: 16,
            weak_drive_limit: 1e-2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct G2Estimate {
    pub g2: f64,
    pub error_bound: f64,
    pub mean_photon_number: f64,
    pub two_photon_moment: f64,
    pub i2: Complex64,
    pub i4: Complex64,
    pub cells: usize,
    pub converged: bool,
    pub warnings: Vec<String>,
}

/// One time ordering of the four displacement operators, parametrized by
/// the non-negative gaps `(u, v, w)` between consecutive times.
///
/// With operator times `a = t1 - t2`, `b = t1`, `c = 0`, `d = -t3` the
/// exponent is `psi(a-c) + psi(b-c) + psi(a-d) + psi(b-d) - psi(a-b) - psi(c-d)`.
/// Every pair difference is a signed sum of consecutive gaps, so the regions
/// where `psi` is small lie on faces and edges of the gap orthant.
#[derive(Debug, Clone, Copy)]
struct Ordering {
    /// `(coefficient, direction, axes)` for each `psi` term.
    terms: [(f64, f64, [bool; 3]); 6],
    /// Envelope exponent per gap.
    rates: [Complex64; 3],
}

fn orderings(r1: Complex64, r2: Complex64, r3: Complex64) -> [Ordering; 3] {
    const U: [bool; 3] = [true, false, false];
    const V: [bool; 3] = [false, true, false];
    const W: [bool; 3] = [false, false, true];
    const UV: [bool; 3] = [true, true, false];
    const VW: [bool; 3] = [false, true, true];
    const UVW: [bool; 3] = [true, true, true];
    [
        // d <= c <= a <= b: u = t3, v = t1 - t2, w = t2.
        Ordering {
            terms: [(1.0, 1.0, V), (1.0, 1.0, VW), (1.0, 1.0, UV), (1.0, 1.0, UVW), (-1.0, -1.0, W), (-1.0, 1.0, U)],
            rates: [r3, r1, r1 + r2],
        },
        // d <= a <= c <= b: u = t1 - t2 + t3, v = t2 - t1, w = t1.
        Ordering {
            terms: [(1.0, -1.0, V), (1.0, 1.0, W), (1.0, 1.0, U), (1.0, 1.0, UVW), (-1.0, -1.0, VW), (-1.0, 1.0, UV)],
            rates: [r3, r2 + r3, r1 + r2],
        },
        // a <= d <= c <= b: u = t2 - t1 - t3, v = t3, w = t1.
        Ordering {
            terms: [(1.0, -1.0, UV), (1.0, 1.0, W), (1.0, -1.0, U), (1.0, 1.0, VW), (-1.0, -1.0, UVW), (-1.0, 1.0, V)],
            rates: [r2, r2 + r3, r1 + r2],
        },
    ]
}

struct FourPoint<'a> {
    kernel: &'a CorrelationKernel,
    ordering: Ordering,
    baseline: f64,
}

impl TensorIntegrand for FourPoint<'_> {
    fn fill(&self, x: &[f64; NODES], y: &[f64; NODES], z: &[f64; NODES], out: &mut [Complex64]) {
        let k = self.kernel;
        let nodes = [x, y, z];
        let rates = self.ordering.rates;
        let env: [[Complex64; NODES]; 3] =
            std::array::from_fn(|a| std::array::from_fn(|i| (rates[a] * nodes[a][i]).exp()));
        // Exponent accumulated in three tables: terms along one axis go to
        // the first, two-axis terms to a plane, the three-axis term is
        // evaluated pointwise.
        let zero = Complex64::new(0.0, 0.0);
        let mut line = [[zero; NODES]; 3];
        let mut plane_uv = [[zero; NODES]; NODES];
        let mut plane_vw = [[zero; NODES]; NODES];
        let mut triple = (0.0, 0.0);
        for &(coef, dir, mask) in &self.ordering.terms {
            match mask {
                [true, true, true] => triple = (coef, dir),
                [true, true, false] => {
                    for i in 0..NODES {
                        for j in 0..NODES {
                            plane_uv[i][j] += coef * k.psi(dir * (x[i] + y[j]));
                        }
                    }
                }
                [false, true, true] => {
                    for j in 0..NODES {
                        for l in 0..NODES {
                            plane_vw[j][l] += coef * k.psi(dir * (y[j] + z[l]));
                        }
                    }
                }
                _ => {
                    let a = mask.iter().position(|&m| m).expect("one axis");
                    for i in 0..NODES {
                        line[a][i] += coef * k.psi(dir * nodes[a][i]);
                    }
                }
            }
        }
        for i in 0..NODES {
            for j in 0..NODES {
                let e_ij = env[0][i] * env[1][j];
                let base = line[0][i] + line[1][j] + plane_uv[i][j];
                let s_ij = x[i] + y[j];
                let row = &mut out[(i * NODES + j) * NODES..(i * NODES + j + 1) * NODES];
                for l in 0..NODES {
                    let phi = base
                        + line[2][l]
                        + plane_vw[j][l]
                        + triple.0 * k.psi(triple.1 * (s_ij + z[l]));
                    row[l] = e_ij * env[2][l] * ((-phi).exp() - self.baseline);
                }
            }
        }
    }
}

/// `g2(0)` for the polaron frame at the given probe.
pub fn g2_zero(frame: &PolaronFrame, drive: &DriveConfig, quad: &QuadratureConfig) -> Result<G2Estimate> {
    g2_from_kernel(&CorrelationKernel::from_frame(frame), frame.eta, drive, quad)
}

/// `g2(0)` for an arbitrary displacement kernel and Kerr strength.
pub fn g2_from_kernel(
    kernel: &CorrelationKernel,
    eta: f64,
    drive: &DriveConfig,
    quad: &QuadratureConfig,
) -> Result<G2Estimate> {
    let kappa = drive.kappa_a;
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::InvalidParameter(format!("kappa_a must be positive, got {kappa}")));
    }
    if !(eta.is_finite() && drive.delta_a.is_finite() && drive.epsilon_a.is_finite()) {
        return Err(Error::InvalidParameter("non-finite drive or Kerr strength".into()));
    }
    for m in &kernel.modes {
        if m.zeta != 0.0 && !(m.kappa > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "normal-mode damping must be positive, got {}",
                m.kappa
            )));
        }
    }
    if !(quad.decay_lengths > 2.0 && quad.rel_tol > 0.0 && quad.panel_scale > 0.0) {
        return Err(Error::InvalidParameter("invalid quadrature configuration".into()));
    }

    let dt = drive.delta_a - eta;
    let e2 = 2.0 * dt - 2.0 * eta;
    let s = kernel.total_weight();
    let c = quad.decay_lengths;
    let r = (-0.5 * c).exp();
    let tail_factor = r / (1.0 - r);
    let mut warnings = Vec::new();

    let ratio = drive.truncation_ratio(eta);
    if ratio > quad.weak_drive_limit {
        warnings.push(format!(
            "weak-drive expansion questionable: Kerr-free photon number {ratio:e} exceeds {:e}",
            quad.weak_drive_limit
        ));
    }

    let kernel_rate: f64 = kernel
        .modes
        .iter()
        .map(|m| m.zeta * m.zeta * Complex64::new(0.5 * m.kappa, m.omega).norm())
        .sum();
    let rate = e2
        .abs()
        .max(dt.abs())
        .max(2.0 * kappa)
        .max(kernel.max_rate(1e-6))
        .max(kernel_rate);
    let width = quad.panel_scale * 2.0 * std::f64::consts::PI / rate;
    let panels = |len: f64| -> usize {
        let n = ((len / width).ceil() as usize).clamp(2, quad.max_initial_panels.max(2));
        (n + 1) / 2 * 2
    };

    let baseline = if quad.subtract_asymptote { (-s).exp() } else { 0.0 };
    let b4 = if quad.subtract_asymptote { (-2.0 * s).exp() } else { 0.0 };

    // Two-point integral.
    let a2 = Complex64::new(-kappa, -dt);
    let t2 = c / kappa;
    let f2 = |t: f64| (a2 * t).exp() * ((-kernel.psi(t)).exp() - baseline);
    let (est2, half2, ok2) = integrate_1d(
        f2,
        0.0,
        t2,
        panels(t2),
        0.5 * t2,
        quad.abs_tol.max(0.05 * quad.rel_tol * baseline / kappa.hypot(dt)),
        0.1 * quad.rel_tol,
        quad.max_panels_1d,
    );
    let i2 = est2.value + baseline / Complex64::new(kappa, dt);
    let err2 = est2.error + (est2.value - half2).norm() * tail_factor;

    // Four-point integral, one time ordering at a time.
    let r1 = Complex64::new(-2.0 * kappa, -e2);
    let r2 = Complex64::new(-kappa, dt);
    let r3 = Complex64::new(-kappa, -dt);
    let analytic = b4 / (-r1 * -r2 * -r3);
    let abs_tol = quad.abs_tol.max(0.5 * quad.rel_tol * analytic.norm()) / 3.0;
    let mut i4 = analytic;
    let mut err4 = 0.0;
    let mut cells = 0;
    let mut ok4 = true;
    for ordering in orderings(r1, r2, r3) {
        let hi: [f64; 3] = std::array::from_fn(|a| c / -ordering.rates[a].re);
        let integrand = FourPoint { kernel, ordering, baseline: b4 };
        let res = integrate_3d(
            &integrand,
            hi,
            [panels(hi[0]), panels(hi[1]), panels(hi[2])],
            [0.5 * hi[0], 0.5 * hi[1], 0.5 * hi[2]],
            abs_tol,
            quad.rel_tol,
            quad.max_cells,
        );
        i4 += res.estimate.value;
        err4 += res.estimate.error + (res.estimate.value - res.inner).norm() * tail_factor;
        cells += res.cells;
        ok4 &= res.converged;
    }

    let n2 = i2.re;
    let n4 = i4.re;
    let eps2 = drive.epsilon_a * drive.epsilon_a;
    let g2 = 2.0 * kappa * n4 / (n2 * n2);
    let error_bound = g2.abs() * (err4 / n4.abs() + 2.0 * err2 / n2.abs());
    let converged = ok2 && ok4;
    let estimate = G2Estimate {
        g2,
        error_bound,
        mean_photon_number: eps2 / kappa * n2,
        two_photon_moment: 2.0 * eps2 * eps2 / kappa * n4,
        i2,
        i4,
        cells,
        converged,
        warnings,
    };
    if !converged || !error_bound.is_finite() {
        return Err(Error::QuadratureNotConverged(Box::new(estimate)));
    }
    Ok(estimate)
}

/// Closed form for a bare Kerr oscillator (no displacement noise):
/// `(kappa^2 + Delta~^2) / (kappa^2 + (Delta~ - eta)^2)`.
pub fn kerr_only_g2(eta: f64, delta_a: f64, kappa_a: f64) -> f64 {
    let d = delta_a - eta;
    (kappa_a * kappa_a + d * d) / (kappa_a * kappa_a + (d - eta) * (d - eta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn drive(delta_a: f64) -> DriveConfig {
        DriveConfig { delta_a, epsilon_a: 1e-3, kappa_a: 0.1 }
    }

    #[test]
    fn bare_kerr_blockade() {
        let k = CorrelationKernel::single(0.0, 0.3, 0.05);
        let est = g2_from_kernel(&k, 1.0, &drive(1.0), &QuadratureConfig::default()).unwrap();
        assert_relative_eq!(est.g2, 1.0 / 101.0, max_relative = 1e-6);
    }

    #[test]
    fn linear_cavity_is_coherent() {
        let k = CorrelationKernel::single(0.0, 0.3, 0.05);
        let est = g2_from_kernel(&k, 0.0, &drive(0.2), &QuadratureConfig::default()).unwrap();
        assert_relative_eq!(est.g2, 1.0, max_relative = 1e-7);
    }

    #[test]
    fn probe_amplitude_cancels() {
        let k = CorrelationKernel::single(0.4, 0.5, 0.2);
        let q = QuadratureConfig { rel_tol: 1e-5, ..Default::default() };
        let a = g2_from_kernel(&k, 0.05, &drive(0.05), &q).unwrap();
        let b = g2_from_kernel(&k, 0.05, &DriveConfig { epsilon_a: 3e-5, ..drive(0.05) }, &q).unwrap();
        assert_eq!(a.g2.to_bits(), b.g2.to_bits());
    }

    #[test]
    fn strong_probe_warns() {
        let k = CorrelationKernel::single(0.0, 0.3, 0.05);
        let d = DriveConfig { delta_a: 0.0, epsilon_a: 0.05, kappa_a: 0.1 };
        let est = g2_from_kernel(&k, 0.0, &d, &QuadratureConfig::default()).unwrap();
        assert!(!est.warnings.is_empty());
    }

    #[test]
    fn rejects_bad_damping() {
        let k = CorrelationKernel::single(0.3, 0.3, 0.0);
        assert!(matches!(
            g2_from_kernel(&k, 0.1, &drive(0.1), &QuadratureConfig::default()),
            Err(Error::InvalidParameter(_))
        ));
    }
}
