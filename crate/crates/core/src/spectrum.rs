//! Normal modes of the linearized microwave-mechanical pair and the Kerr
//! strength they mediate.
//!
//! In quadratures `x = (q + q^dag)`, `p = i(q^dag - q)` (up to `1/sqrt 2`) the
//! pair Hamiltonian reads `H = 1/2 x^T V x + 1/2 p^T T p` with
//! `V = [[Delta_c, -2G], [-2G, omega_b]]`, `T = diag(Delta_c, omega_b)`.
//! Normal-mode frequencies are the square roots of the eigenvalues of
//! `W = T^{1/2} V T^{1/2}`. The pair loses stability at `G_cp = sqrt(Delta_c omega_b)/2`.

use nalgebra::{Matrix2, Matrix4, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normal-mode frequencies, transform and optical couplings.
///
/// Mode `-` is the soft mode that vanishes at the critical point. When the
/// pair is unstable `omega_minus` holds the magnitude of the imaginary
/// frequency and the transform, couplings and mixing angle are absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalModes {
    pub omega_minus: f64,
    pub omega_plus: f64,
    pub stable: bool,
    pub couplings: Option<ModeCouplings>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeCouplings {
    /// Optical coupling to mode `-`, entering as `-g_minus (B_- + B_-^dag)`.
    pub g_minus: f64,
    /// Optical coupling to mode `+`, entering as `+g_plus (B_+ + B_+^dag)`.
    pub g_plus: f64,
    /// Microwave-mechanical mixing angle in `[0, pi/2]`.
    pub theta: f64,
    /// Real Bogoliubov matrix: rows `(c, c^dag, b, b^dag)`, columns
    /// `(B_-, B_-^dag, B_+, B_+^dag)`.
    pub transform: Matrix4<f64>,
    /// Orthogonal eigenvectors of `W`, rows `(c, b)`, columns `(-, +)`.
    pub eigenvectors: Matrix2<f64>,
}

impl NormalModes {
    pub fn g_minus(&self) -> Option<f64> {
        self.couplings.as_ref().map(|c| c.g_minus)
    }

    pub fn g_plus(&self) -> Option<f64> {
        self.couplings.as_ref().map(|c| c.g_plus)
    }

    pub fn theta(&self) -> Option<f64> {
        self.couplings.as_ref().map(|c| c.theta)
    }

    pub fn transform(&self) -> Option<&Matrix4<f64>> {
        self.couplings.as_ref().map(|c| &c.transform)
    }
}

/// Critical coupling `G_cp = sqrt(Delta_c omega_b) / 2`.
pub fn critical_point(delta_c: f64, omega_b: f64) -> Result<f64> {
    check_positive("Delta_c", delta_c)?;
    check_positive("omega_b", omega_b)?;
    Ok((delta_c * omega_b).sqrt() / 2.0)
}

/// Critical detuning `Delta_cp = 4 G^2 / omega_b`.
pub fn critical_detuning(g: f64, omega_b: f64) -> Result<f64> {
    check_non_negative("G", g)?;
    check_positive("omega_b", omega_b)?;
    Ok(4.0 * g * g / omega_b)
}

/// Closed-form squared frequencies `(omega_-^2, omega_+^2)`.
///
/// `omega_-^2` is evaluated as the product of roots over `omega_+^2`, which
/// avoids cancellation close to the critical point.
pub fn frequencies_squared(g: f64, delta_c: f64, omega_b: f64) -> (f64, f64) {
    let d2 = delta_c * delta_c;
    let w2 = omega_b * omega_b;
    let disc = ((w2 - d2).powi(2) + 16.0 * g * g * delta_c * omega_b).sqrt();
    let plus = 0.5 * (d2 + w2 + disc);
    let det = delta_c * omega_b * (delta_c * omega_b - 4.0 * g * g);
    (det / plus, plus)
}

/// Symplectic eigenvalues of the 4x4 quadrature Hamiltonian, computed from
/// the spectrum of the Hamiltonian matrix `J H`. Independent of the 2x2
/// reduction used by [`diagonalize`]. Returns `(omega_-, omega_+)`, or `None`
/// when the spectrum is not purely imaginary.
pub fn symplectic_eigenvalues(g: f64, delta_c: f64, omega_b: f64) -> Option<(f64, f64)> {
    // Ordering (x_c, x_b, p_c, p_b); H = [[V, 0], [0, T]], J = [[0, I], [-I, 0]].
    #[rustfmt::skip]
    let jh = Matrix4::new(
        0.0, 0.0, delta_c, 0.0,
        0.0, 0.0, 0.0, omega_b,
        -delta_c, 2.0 * g, 0.0, 0.0,
        2.0 * g, -omega_b, 0.0, 0.0,
    );
    let eig = jh.complex_eigenvalues();
    let mut freqs: Vec<f64> = Vec::with_capacity(2);
    for z in eig.iter() {
        if z.re.abs() > 1e-9 * (1.0 + z.im.abs()) {
            return None;
        }
        if z.im > 0.0 {
            freqs.push(z.im);
        }
    }
    if freqs.len() != 2 {
        return None;
    }
    freqs.sort_by(f64::total_cmp);
    Some((freqs[0], freqs[1]))
}

/// Diagonalizes the linearized pair for coupling `g` and detuning `delta_c`,
/// with optical single-photon coupling `g_a`.
pub fn diagonalize(g: f64, delta_c: f64, omega_b: f64, g_a: f64) -> Result<NormalModes> {
    check_non_negative("G", g)?;
    check_non_negative("g_a", g_a)?;
    check_positive("omega_b", omega_b)?;
    if !(delta_c.is_finite() && delta_c > 0.0) {
        return Err(Error::InvalidDetuning(delta_c));
    }
    let (m2, p2) = frequencies_squared(g, delta_c, omega_b);
    let stable = m2 > 0.0;
    let omega_plus = p2.sqrt();
    let omega_minus = m2.abs().sqrt();
    if !stable {
        return Ok(NormalModes { omega_minus, omega_plus, stable, couplings: None });
    }

    let sd = delta_c.sqrt();
    let sw = omega_b.sqrt();
    let off = -2.0 * g * sd * sw;
    let w = Matrix2::new(delta_c * delta_c, off, off, omega_b * omega_b);
    let eig = SymmetricEigen::new(w);
    let (lo, hi) = if eig.eigenvalues[0] < eig.eigenvalues[1] {
        (0, 1)
    } else if eig.eigenvalues[0] > eig.eigenvalues[1] {
        (1, 0)
    } else if eig.eigenvectors[(1, 0)].abs() >= eig.eigenvectors[(1, 1)].abs() {
        // Degenerate pair: the mechanically dominated vector is mode `-`.
        (0, 1)
    } else {
        (1, 0)
    };
    let mut o = Matrix2::zeros();
    o.set_column(0, &eig.eigenvectors.column(lo));
    o.set_column(1, &eig.eigenvectors.column(hi));
    // Sign convention: mode `-` couples with a negative mechanical weight,
    // mode `+` with a positive one, so both couplings are non-negative.
    for (j, want_negative) in [(0, true), (1, false)] {
        let (b, c) = (o[(1, j)], o[(0, j)]);
        let key = if b != 0.0 { b } else { c };
        if (key < 0.0) != want_negative {
            o.set_column(j, &(-o.column(j)));
        }
    }
    let lambda = [eig.eigenvalues[lo], eig.eigenvalues[hi]];
    let om = [lambda[0].sqrt(), lambda[1].sqrt()];

    let t_half = [sd, sw];
    let mut transform = Matrix4::zeros();
    for (r, th) in t_half.iter().enumerate() {
        for j in 0..2 {
            let a = th * o[(r, j)] / om[j].sqrt();
            let d = o[(r, j)] * om[j].sqrt() / th;
            let u = 0.5 * (a + d);
            let v = 0.5 * (a - d);
            transform[(2 * r, 2 * j)] = u;
            transform[(2 * r, 2 * j + 1)] = v;
            transform[(2 * r + 1, 2 * j)] = v;
            transform[(2 * r + 1, 2 * j + 1)] = u;
        }
    }
    let g_minus = -g_a * (transform[(2, 0)] + transform[(3, 0)]);
    let g_plus = g_a * (transform[(2, 2)] + transform[(3, 2)]);
    let theta = o[(0, 0)].abs().atan2(o[(1, 0)].abs());

    Ok(NormalModes {
        omega_minus,
        omega_plus,
        stable,
        couplings: Some(ModeCouplings {
            g_minus: g_minus.max(0.0),
            g_plus: g_plus.max(0.0),
            theta,
            transform,
            eigenvectors: o,
        }),
    })
}

/// Symplectic form for the ordering `(c, c^dag, b, b^dag)`.
pub fn symplectic_form() -> Matrix4<f64> {
    #[rustfmt::skip]
    let j = Matrix4::new(
        0.0, 1.0, 0.0, 0.0,
        -1.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
        0.0, 0.0, -1.0, 0.0,
    );
    j
}

/// Largest entry of `|M J M^T - J|`.
pub fn symplectic_defect(m: &Matrix4<f64>) -> f64 {
    let j = symplectic_form();
    (m * j * m.transpose() - j).abs().max()
}

/// Damping rates of the two normal modes (energy decay rates, so the mode
/// amplitude decays at half this rate).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalModeDecay {
    pub kappa_minus: f64,
    pub kappa_plus: f64,
}

impl Default for NormalModeDecay {
    fn default() -> Self {
        Self { kappa_minus: 0.05, kappa_plus: 0.05 }
    }
}

impl NormalModeDecay {
    /// Mixing-weighted estimate from bare rates. Not used by default: it
    /// ignores the Bogoliubov squeezing of the soft mode and gives only the
    /// order of magnitude.
    pub fn estimate(modes: &NormalModes, kappa_c: f64, kappa_b: f64) -> Option<Self> {
        let theta = modes.theta()?;
        let (s2, c2) = (theta.sin().powi(2), theta.cos().powi(2));
        Some(Self {
            kappa_minus: 2.0 * (c2 * kappa_b + s2 * kappa_c),
            kappa_plus: 2.0 * (s2 * kappa_b + c2 * kappa_c),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KerrOptions {
    /// Smallest admitted `omega_b - 4 G^2 / Delta_c`, relative to `omega_b`.
    pub divergence_floor: f64,
}

impl Default for KerrOptions {
    fn default() -> Self {
        Self { divergence_floor: 1e-8 }
    }
}

/// Quantities of the displaced (polaron) frame: displacement amplitudes,
/// Kerr strength and normal-mode damping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolaronFrame {
    pub zeta_minus: f64,
    pub zeta_plus: f64,
    pub eta: f64,
    pub kappa_minus: f64,
    pub kappa_plus: f64,
    pub omega_minus: f64,
    pub omega_plus: f64,
    /// `|sum_j g_j^2/omega_j - eta| / eta`.
    pub sum_rule_residual: f64,
}

/// Kerr strength `eta = g_a^2 / (omega_b - 4 G^2 / Delta_c)` and polaron
/// displacements `zeta_j = g_j / omega_j`.
pub fn kerr_strength(
    modes: &NormalModes,
    g: f64,
    delta_c: f64,
    omega_b: f64,
    g_a: f64,
    decay: NormalModeDecay,
    opts: KerrOptions,
) -> Result<PolaronFrame> {
    if !(delta_c.is_finite() && delta_c > 0.0) {
        return Err(Error::InvalidDetuning(delta_c));
    }
    check_non_negative("kappa_minus", decay.kappa_minus)?;
    check_non_negative("kappa_plus", decay.kappa_plus)?;
    let g_cp = critical_point(delta_c, omega_b)?;
    let couplings = match (&modes.couplings, modes.stable && g < g_cp) {
        (Some(c), true) => c,
        _ => return Err(Error::BeyondCriticalPoint { g, g_cp }),
    };
    let gap = omega_b - 4.0 * g * g / delta_c;
    let eta = g_a * g_a / gap;
    if gap < opts.divergence_floor * omega_b {
        return Err(Error::CriticalDivergence { gap, eta });
    }
    let zeta_minus = couplings.g_minus / modes.omega_minus;
    let zeta_plus = couplings.g_plus / modes.omega_plus;
    let sum = couplings.g_minus * zeta_minus + couplings.g_plus * zeta_plus;
    let sum_rule_residual = if eta > 0.0 { (sum - eta).abs() / eta } else { sum.abs() };
    Ok(PolaronFrame {
        zeta_minus,
        zeta_plus,
        eta,
        kappa_minus: decay.kappa_minus,
        kappa_plus: decay.kappa_plus,
        omega_minus: modes.omega_minus,
        omega_plus: modes.omega_plus,
        sum_rule_residual,
    })
}

/// Coupling at which the Kerr strength reaches `eta_target` at fixed detuning.
pub fn kerr_threshold_coupling(eta_target: f64, delta_c: f64, omega_b: f64, g_a: f64) -> Result<f64> {
    check_positive("eta", eta_target)?;
    check_positive("Delta_c", delta_c)?;
    let gap = g_a * g_a / eta_target;
    if gap > omega_b {
        return Ok(0.0);
    }
    Ok((delta_c * (omega_b - gap) / 4.0).sqrt())
}

/// Detuning at which the Kerr strength reaches `eta_target` at fixed coupling.
pub fn kerr_threshold_detuning(eta_target: f64, g: f64, omega_b: f64, g_a: f64) -> Result<f64> {
    check_positive("eta", eta_target)?;
    check_non_negative("G", g)?;
    let gap = g_a * g_a / eta_target;
    if gap >= omega_b {
        return Err(Error::InfeasibleTarget(format!(
            "eta = {eta_target} is below the uncoupled value {}",
            g_a * g_a / omega_b
        )));
    }
    Ok(4.0 * g * g / (omega_b - gap))
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

fn check_non_negative(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be non-negative, got {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn critical_values() {
        assert_relative_eq!(critical_point(1.251, 1.0).unwrap(), 0.559_240_6, epsilon = 1e-7);
        assert_relative_eq!(critical_detuning(0.5595, 1.0).unwrap(), 1.252_161, epsilon = 1e-6);
        assert!(critical_point(-1.0, 1.0).is_err());
    }

    #[test]
    fn reference_kerr_strength() {
        let m = diagonalize(0.5, 1.251, 1.0, 1e-3).unwrap();
        let f = kerr_strength(&m, 0.5, 1.251, 1.0, 1e-3, NormalModeDecay::default(), KerrOptions::default())
            .unwrap();
        assert_relative_eq!(f.eta, 4.984_06e-6, max_relative = 1e-5);
        assert!(f.sum_rule_residual < 1e-9);
    }

    #[test]
    fn uncoupled_limit() {
        let m = diagonalize(0.0, 2.0, 1.0, 1e-3).unwrap();
        assert_relative_eq!(m.omega_minus, 1.0);
        assert_relative_eq!(m.omega_plus, 2.0);
        assert_eq!(m.theta(), Some(0.0));
        assert_relative_eq!(m.g_minus().unwrap(), 1e-3, max_relative = 1e-12);
        assert_eq!(m.g_plus(), Some(0.0));
    }

    #[test]
    fn degenerate_point_labels_mechanics_as_soft_mode() {
        let m = diagonalize(0.0, 1.0, 1.0, 1e-3).unwrap();
        assert_relative_eq!(m.g_minus().unwrap(), 1e-3, max_relative = 1e-12);
        assert_relative_eq!(m.g_plus().unwrap(), 0.0);
    }

    #[test]
    fn unstable_side() {
        let m = diagonalize(0.6, 1.251, 1.0, 1e-3).unwrap();
        assert!(!m.stable);
        assert!(m.couplings.is_none());
        let err = kerr_strength(&m, 0.6, 1.251, 1.0, 1e-3, NormalModeDecay::default(), KerrOptions::default());
        assert!(matches!(err, Err(Error::BeyondCriticalPoint { .. })));
    }

    #[test]
    fn divergence_floor() {
        let d = 1.0;
        let g = (0.25_f64 * (1.0 - 1e-10)).sqrt();
        let m = diagonalize(g, d, 1.0, 1e-3).unwrap();
        let err = kerr_strength(&m, g, d, 1.0, 1e-3, NormalModeDecay::default(), KerrOptions::default());
        assert!(matches!(err, Err(Error::CriticalDivergence { .. })), "{err:?}");
    }

    #[test]
    fn negative_detuning_rejected() {
        assert!(matches!(diagonalize(0.1, -1.0, 1.0, 1e-3), Err(Error::InvalidDetuning(_))));
    }

    #[test]
    fn kerr_window_edges() {
        let g_low = kerr_threshold_coupling(0.1, 1.251, 1.0, 1e-3).unwrap();
        assert_relative_eq!(g_low, 0.559_237_8, epsilon = 1e-7);
        let d_hi = kerr_threshold_detuning(0.1, 0.5595, 1.0, 1e-3).unwrap();
        let d_cp = critical_detuning(0.5595, 1.0).unwrap();
        assert!(d_hi > d_cp);
    }

    proptest! {
        #[test]
        fn stable_branch_invariants(d in 0.05f64..3.0, frac in 0.0f64..0.995) {
            let g = frac * critical_point(d, 1.0).unwrap();
            let m = diagonalize(g, d, 1.0, 1e-3).unwrap();
            prop_assert!(m.stable);
            prop_assert!(m.omega_minus > 0.0 && m.omega_plus >= m.omega_minus);
            let c = m.couplings.as_ref().unwrap();
            prop_assert!(symplectic_defect(&c.transform) < 1e-9);
            prop_assert!(c.g_minus >= 0.0 && c.g_plus >= 0.0);
            prop_assert!((0.0..=std::f64::consts::FRAC_PI_2).contains(&c.theta));
            let f = kerr_strength(&m, g, d, 1.0, 1e-3, NormalModeDecay::default(), KerrOptions::default()).unwrap();
            prop_assert!(f.sum_rule_residual < 1e-8);
            prop_assert!(f.eta > 0.0);
        }

        #[test]
        fn soft_mode_vanishes_at_criticality(d in 0.05f64..3.0) {
            let g_cp = critical_point(d, 1.0).unwrap();
            let (m2, _) = frequencies_squared(g_cp, d, 1.0);
            prop_assert!(m2.abs() < 1e-12);
        }

        #[test]
        fn eta_increases_with_coupling(d in 0.05f64..3.0, a in 0.0f64..0.99, b in 0.0f64..0.99) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let g_cp = critical_point(d, 1.0).unwrap();
            let eta = |f: f64| {
                let g = f * g_cp;
                let m = diagonalize(g, d, 1.0, 1e-3).unwrap();
                kerr_strength(&m, g, d, 1.0, 1e-3, NormalModeDecay::default(), KerrOptions::default()).unwrap().eta
            };
            prop_assert!(eta(hi) >= eta(lo));
        }

        #[test]
        fn mixing_angle_relation(d in 0.05f64..3.0, frac in 0.01f64..0.99) {
            prop_assume!((d - 1.0).abs() > 1e-3);
            let g = frac * critical_point(d, 1.0).unwrap();
            let m = diagonalize(g, d, 1.0, 1e-3).unwrap();
            let theta = m.theta().unwrap();
            let lhs = (2.0 * theta).tan();
            let rhs = 4.0 * g * d.sqrt() / (d * d - 1.0);
            prop_assume!(lhs.abs() < 1e6);
            prop_assert!((lhs - rhs).abs() <= 1e-7 * (1.0 + rhs.abs()), "{lhs} vs {rhs}");
        }
    }
}
