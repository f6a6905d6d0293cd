//! System parameters and linearization of the microwave drive.
//!
//! A classical drive `eps_c` at frequency `omega_ci` displaces the microwave
//! mode by `alpha` and the mechanics by `beta`. The radiation-pressure shift of
//! the mechanical equilibrium feeds back on the microwave detuning, so the
//! effective detuning `Delta_c` solves the cubic
//!
//! ```text
//! (Delta_c - delta_c) (kappa_c^2 + Delta_c^2) + 2 g_c^2 eps_c^2 / omega_b = 0
//! ```
//!
//! with `delta_c = omega_c - omega_ci`. Only the root continuously connected to
//! the undriven detuning is physical here.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical parameters, all in units of the bare mechanical frequency.
///
/// Decay rates are amplitude rates: an isolated mode obeys `da/dt = -kappa a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub omega_b: f64,
    pub omega_a: f64,
    pub omega_c: f64,
    pub g_a: f64,
    pub g_c: f64,
    pub kappa_a: f64,
    pub kappa_c: f64,
    pub kappa_b: f64,
    pub epsilon_c: f64,
    pub omega_ci: f64,
}

impl Default for SystemParams {
    /// Reference device: 10 MHz mechanics, 1e-3 single-photon couplings,
    /// drive chosen so that `G = 0.5595` and `Delta_c = 1.251`.
    fn default() -> Self {
        Self {
            omega_b: 1.0,
            omega_a: 1.934e7,
            omega_c: 1000.0,
            g_a: 1e-3,
            g_c: 1e-3,
            kappa_a: 0.1,
            kappa_c: 0.127,
            kappa_b: 1e-4,
            epsilon_c: 703.532_039_4,
            omega_ci: 1000.0 - 1.877_080_5,
        }
    }
}

impl SystemParams {
    /// Bare microwave detuning `omega_c - omega_ci`.
    pub fn bare_detuning(&self) -> f64 {
        self.omega_c - self.omega_ci
    }

    /// Returns a copy with the drive amplitude and bare detuning replaced.
    pub fn with_drive(&self, epsilon_c: f64, delta_c: f64) -> Self {
        Self {
            epsilon_c,
            omega_ci: self.omega_c - delta_c,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("omega_b", self.omega_b),
            ("omega_a", self.omega_a),
            ("omega_c", self.omega_c),
            ("kappa_a", self.kappa_a),
            ("kappa_c", self.kappa_c),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        let non_negative = [
            ("g_a", self.g_a),
            ("g_c", self.g_c),
            ("kappa_b", self.kappa_b),
            ("epsilon_c", self.epsilon_c),
        ];
        for (name, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        if !self.omega_ci.is_finite() {
            return Err(Error::InvalidParameter("omega_ci must be finite".into()));
        }
        Ok(())
    }

    /// Drive amplitude from input power: `|eps_c| = sqrt(2 P kappa_c / (hbar omega_ci))`.
    ///
    /// `power_watts` is in W and `omega_ci_rad_s`, `kappa_c_rad_s` in rad/s; the
    /// result is in s^-1 and must be divided by the frequency unit to enter
    /// [`SystemParams::epsilon_c`].
    pub fn drive_from_power(power_watts: f64, kappa_c_rad_s: f64, omega_ci_rad_s: f64) -> f64 {
        const HBAR: f64 = 1.054_571_817e-34;
        (2.0 * power_watts * kappa_c_rad_s / (HBAR * omega_ci_rad_s)).sqrt()
    }
}

/// Which expression is used for the shifted optical frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpticalShift {
    /// `omega_a - 2 g_c^2 eps_c^2 / (omega_b (kappa_c^2 + Delta_c^2))`.
    #[default]
    DriveShift,
    /// `omega_a + 2 g_a Re(beta)`, the static mechanical displacement seen by
    /// the optical mode.
    MechanicalDisplacement,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearizeOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub optical_shift: OpticalShift,
}

impl Default for LinearizeOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 200,
            optical_shift: OpticalShift::default(),
        }
    }
}

/// Linearized coupling and detuning with the classical mean fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearizedModel {
    /// Linearized microwave-mechanical coupling `G = g_c |alpha|`.
    #[serde(rename = "G")]
    pub g: f64,
    #[serde(rename = "Delta_c")]
    pub delta_c: f64,
    pub omega_a_tilde: f64,
    pub alpha: Complex64,
    pub beta: Complex64,
    /// Every real root of the detuning cubic, ascending.
    pub real_roots: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

impl LinearizedModel {
    /// Flat record with glossary names.
    pub fn record(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("G", self.g),
            ("Delta_c", self.delta_c),
            ("omega_a_tilde", self.omega_a_tilde),
            ("alpha_re", self.alpha.re),
            ("alpha_im", self.alpha.im),
            ("beta_re", self.beta.re),
            ("beta_im", self.beta.im),
        ]
    }
}

struct Cubic {
    delta: f64,
    kappa2: f64,
    k: f64,
}

impl Cubic {
    fn value(&self, x: f64) -> f64 {
        (x - self.delta) * (self.kappa2 + x * x) + self.k
    }

    fn slope(&self, x: f64) -> f64 {
        3.0 * x * x - 2.0 * self.delta * x + self.kappa2
    }

    /// Critical points `(local max, local min)` when they exist.
    fn extrema(&self) -> Option<(f64, f64)> {
        let disc = self.delta * self.delta - 3.0 * self.kappa2;
        if disc <= 0.0 {
            return None;
        }
        let s = disc.sqrt();
        Some(((self.delta - s) / 3.0, (self.delta + s) / 3.0))
    }

    fn bound(&self) -> f64 {
        // Cauchy bound of x^3 - delta x^2 + kappa^2 x + (k - delta kappa^2).
        1.0 + self
            .delta
            .abs()
            .max(self.kappa2)
            .max((self.k - self.delta * self.kappa2).abs())
    }

    /// Safeguarded Newton iteration on a bracket with a sign change.
    fn solve(&self, mut lo: f64, mut hi: f64, tol: f64, max_iter: usize) -> Result<(f64, usize)> {
        let mut flo = self.value(lo);
        if flo == 0.0 {
            return Ok((lo, 0));
        }
        if self.value(hi) == 0.0 {
            return Ok((hi, 0));
        }
        let mut x = 0.5 * (lo + hi);
        for it in 1..=max_iter {
            let fx = self.value(x);
            if fx == 0.0 {
                return Ok((x, it));
            }
            if (fx < 0.0) == (flo < 0.0) {
                lo = x;
                flo = fx;
            } else {
                hi = x;
            }
            let d = self.slope(x);
            let newton = x - fx / d;
            let next = if d != 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            let scale = tol * (1.0 + next.abs());
            if (next - x).abs() <= scale || (hi - lo) <= scale {
                return Ok((next, it));
            }
            x = next;
        }
        Err(Error::FixedPointDivergence {
            iterations: max_iter,
            residual: self.value(x).abs(),
        })
    }

    fn real_roots(&self, tol: f64, max_iter: usize) -> Result<(Vec<f64>, usize)> {
        let r = self.bound();
        let mut points = vec![-r];
        if let Some((xmax, xmin)) = self.extrema() {
            points.push(xmax);
            points.push(xmin);
        }
        points.push(r);
        let mut roots = Vec::new();
        let mut iterations = 0;
        for w in points.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (fa, fb) = (self.value(a), self.value(b));
            if fa == 0.0 {
                if roots.last() != Some(&a) {
                    roots.push(a);
                }
                continue;
            }
            if (fa < 0.0) != (fb < 0.0) && fb != 0.0 {
                let (x, it) = self.solve(a, b, tol, max_iter)?;
                iterations += it;
                roots.push(x);
            } else if fb == 0.0 {
                roots.push(b);
            }
        }
        roots.dedup();
        Ok((roots, iterations))
    }
}

/// Solves the mean-field problem on the branch connected to the undriven
/// detuning.
pub fn linearize(params: &SystemParams, tol: f64) -> Result<LinearizedModel> {
    linearize_with(params, &LinearizeOptions { tol, ..LinearizeOptions::default() })
}

pub fn linearize_with(params: &SystemParams, opts: &LinearizeOptions) -> Result<LinearizedModel> {
    params.validate()?;
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let delta = params.bare_detuning();
    let eps = params.epsilon_c;
    let kappa2 = params.kappa_c * params.kappa_c;
    let cubic = Cubic {
        delta,
        kappa2,
        k: 2.0 * params.g_c * params.g_c * eps * eps / params.omega_b,
    };

    let (real_roots, iterations) = cubic.real_roots(opts.tol.max(1e-15), opts.max_iter)?;

    let root = if cubic.k == 0.0 {
        delta
    } else if delta > 0.0 {
        if let Some((_, xmin)) = cubic.extrema() {
            if cubic.value(xmin) > 0.0 {
                return Err(Error::LinearizationFailure(format!(
                    "drive beyond the bistability fold: the branch connected to \
                     Delta_c = {delta} has vanished (real roots {real_roots:?})"
                )));
            }
        }
        *real_roots.last().expect("a real cubic has a real root")
    } else if delta < 0.0 {
        *real_roots.first().expect("a real cubic has a real root")
    } else {
        return Err(Error::LinearizationFailure(
            "zero bare detuning with nonzero drive has no sign-preserving root".into(),
        ));
    };

    if root * delta <= 0.0 && cubic.k != 0.0 {
        return Err(Error::LinearizationFailure(format!(
            "connected root {root} changed sign relative to the bare detuning {delta}"
        )));
    }

    let residual = (root - delta + cubic.k / (kappa2 + root * root)).abs();
    if !(residual <= 10.0 * opts.tol.max(1e-14) * (1.0 + delta.abs())) {
        return Err(Error::FixedPointDivergence { iterations, residual });
    }

    let alpha = Complex64::new(0.0, -eps) / Complex64::new(params.kappa_c, root);
    let n_c = eps * eps / (kappa2 + root * root);
    let beta = Complex64::new(-params.g_c * n_c / params.omega_b, 0.0);
    let omega_a_tilde = match opts.optical_shift {
        OpticalShift::DriveShift => params.omega_a - cubic.k / (kappa2 + root * root),
        OpticalShift::MechanicalDisplacement => params.omega_a + 2.0 * params.g_a * beta.re,
    };

    Ok(LinearizedModel {
        g: params.g_c * n_c.sqrt(),
        delta_c: root,
        omega_a_tilde,
        alpha,
        beta,
        real_roots,
        residual,
        iterations,
    })
}

/// Drive amplitude and bare detuning realizing a requested working point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveSetting {
    pub epsilon_c: f64,
    pub delta_c: f64,
}

/// Inverts the linearization: finds `(eps_c, delta_c)` giving coupling
/// `g_target` at effective detuning `delta_target`.
pub fn target_drive(params: &SystemParams, g_target: f64, delta_target: f64) -> Result<DriveSetting> {
    params.validate()?;
    if !(g_target.is_finite() && g_target >= 0.0) {
        return Err(Error::InvalidParameter(format!("target G must be non-negative, got {g_target}")));
    }
    if !(delta_target.is_finite() && delta_target > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "target Delta_c must be positive, got {delta_target}"
        )));
    }
    if g_target > 0.0 && params.g_c == 0.0 {
        return Err(Error::InfeasibleTarget("g_c = 0 cannot produce a nonzero G".into()));
    }
    let kappa2 = params.kappa_c * params.kappa_c;
    let epsilon_c = if g_target == 0.0 {
        0.0
    } else {
        g_target * (kappa2 + delta_target * delta_target).sqrt() / params.g_c
    };
    let delta_c = delta_target + 2.0 * g_target * g_target / params.omega_b;
    let setting = DriveSetting { epsilon_c, delta_c };

    let check = linearize(&params.with_drive(epsilon_c, delta_c), 1e-13).map_err(|e| {
        Error::InfeasibleTarget(format!(
            "requested point is not on the branch connected to the undriven state ({e})"
        ))
    })?;
    if (check.delta_c - delta_target).abs() > 1e-8 * delta_target.max(1.0) {
        return Err(Error::InfeasibleTarget(format!(
            "requested Delta_c = {delta_target} lies on a disconnected branch \
             (connected root is {})",
            check.delta_c
        )));
    }
    Ok(setting)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn device() -> SystemParams {
        SystemParams::default()
    }

    #[test]
    fn reference_operating_point() {
        let lin = linearize(&device(), 1e-12).unwrap();
        assert!((lin.g - 0.5595).abs() < 1e-6, "G = {}", lin.g);
        assert!((lin.delta_c - 1.251).abs() < 1e-6, "Delta_c = {}", lin.delta_c);
        assert_eq!(lin.real_roots.len(), 3);
    }

    #[test]
    fn rounded_drive_stays_near_operating_point() {
        // The operating point sits close to the bistability fold, so the
        // rounded drive moves G by a few 1e-4.
        let p = device().with_drive(703.53, 1.877081);
        let lin = linearize(&p, 1e-12).unwrap();
        assert!((lin.g - 0.5595).abs() < 5e-4);
        assert!((lin.delta_c - 1.251).abs() < 1e-2);
    }

    #[test]
    fn inverse_of_reference_point() {
        let s = target_drive(&device(), 0.5595, 1.251).unwrap();
        assert!((s.epsilon_c - 703.53).abs() < 0.01, "{}", s.epsilon_c);
        assert!((s.delta_c - 1.877081).abs() < 1e-5, "{}", s.delta_c);
    }

    #[test]
    fn undriven_target() {
        let s = target_drive(&device(), 0.0, 1.0).unwrap();
        assert_eq!(s.epsilon_c, 0.0);
        assert_eq!(s.delta_c, 1.0);
        let lin = linearize(&device().with_drive(0.0, 1.0), 1e-12).unwrap();
        assert_eq!(lin.g, 0.0);
        assert_eq!(lin.delta_c, 1.0);
    }

    #[test]
    fn fold_is_reported() {
        // Beyond the fold the upper branch disappears.
        let p = device().with_drive(900.0, 1.877081);
        match linearize(&p, 1e-12) {
            Err(Error::LinearizationFailure(_)) => {}
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn invalid_parameters() {
        let mut p = device();
        p.kappa_c = -1.0;
        assert!(matches!(linearize(&p, 1e-12), Err(Error::InvalidParameter(_))));
        assert!(matches!(
            target_drive(&device(), -0.1, 1.0),
            Err(Error::InvalidParameter(_))
        ));
        let mut p = device();
        p.g_c = 0.0;
        assert!(matches!(target_drive(&p, 0.1, 1.0), Err(Error::InfeasibleTarget(_))));
    }

    #[test]
    fn negative_detuning_branch() {
        let p = device().with_drive(200.0, -1.0);
        let lin = linearize(&p, 1e-12).unwrap();
        assert!(lin.delta_c < -1.0);
        assert_relative_eq!(
            lin.delta_c,
            -1.0 - 2.0 * lin.g * lin.g,
            max_relative = 1e-10
        );
    }

    #[test]
    fn mean_fields() {
        let lin = linearize(&device(), 1e-12).unwrap();
        let p = device();
        assert_relative_eq!(lin.g, p.g_c * lin.alpha.norm(), max_relative = 1e-12);
        assert_relative_eq!(lin.beta.re, -p.g_c * lin.alpha.norm_sqr(), max_relative = 1e-12);
        let shift = 2.0 * p.g_c * p.g_c * p.epsilon_c.powi(2)
            / (p.kappa_c.powi(2) + lin.delta_c.powi(2));
        assert_relative_eq!(lin.omega_a_tilde, p.omega_a - shift, max_relative = 1e-15);
        let alt = linearize_with(
            &p,
            &LinearizeOptions { optical_shift: OpticalShift::MechanicalDisplacement, ..Default::default() },
        )
        .unwrap();
        assert_relative_eq!(alt.omega_a_tilde, p.omega_a + 2.0 * p.g_a * lin.beta.re);
    }

    #[test]
    fn drive_power_conversion() {
        let eps = SystemParams::drive_from_power(1e-3, 1.0e6, 2.0e10);
        assert_relative_eq!(eps, (2e-3_f64 * 1e6 / (1.054_571_817e-34 * 2e10)).sqrt());
    }
}
