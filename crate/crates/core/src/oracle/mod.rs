//! Brute-force reference on truncated Fock spaces.
//!
//! Sparse Hamiltonians and jump operators are assembled for each model level,
//! steady states come from the Lindblad null space, and multi-time
//! correlators from the quantum regression theorem with Krylov propagation.
//! [`validate`] runs the standard comparison set against the analytic modules.

pub mod build;
pub mod fock;
pub mod krylov;
pub mod lindblad;
pub mod regression;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use build::{build, displacement, Model, DEFAULT_BUDGET};
pub use fock::{FockSpace, Op};
pub use krylov::{expm_action, KrylovOptions};
pub use lindblad::{propagate, steady_state, CollapseOp, SteadyState, SteadyStateOptions, TruncatedSystem};
pub use regression::{regression_correlator, Insertion};

use crate::correlations::{g2_from_kernel, CorrelationKernel, DriveConfig, QuadratureConfig};
use crate::error::{Error, Result};
use crate::spectrum::{diagonalize, kerr_strength, KerrOptions, NormalModeDecay, PolaronFrame};

/// Populations above this in the top two Fock levels invalidate a run.
pub const LEAKAGE_LIMIT: f64 = 1e-6;
/// Most negative admitted steady-state eigenvalue.
pub const POSITIVITY_FLOOR: f64 = -1e-9;

/// Lowest eigenvalue of each photon-number block `n_a = 0, 1, ...`, for
/// Hamiltonians that conserve the photon number of mode 0.
pub fn photon_block_energies(sys: &TruncatedSystem, max_photons: usize) -> Result<Vec<f64>> {
    if max_photons >= sys.dims()[0] {
        return Err(Error::InvalidParameter(format!(
            "photon truncation {} cannot resolve {} photons",
            sys.dims()[0],
            max_photons
        )));
    }
    let h = fock::to_dense(&sys.hamiltonian);
    (0..=max_photons)
        .map(|n| {
            let idx: Vec<usize> = (0..sys.dim()).filter(|&i| sys.space.occupation(i)[0] == n).collect();
            let block = DMatrix::from_fn(idx.len(), idx.len(), |i, j| h[(idx[i], idx[j])]);
            let leak: f64 = (0..sys.dim())
                .filter(|&i| sys.space.occupation(i)[0] != n)
                .flat_map(|i| idx.iter().map(move |&j| (i, j)))
                .map(|(i, j)| h[(i, j)].norm())
                .fold(0.0, f64::max);
            if leak > 0.0 {
                return Err(Error::InvalidParameter("Hamiltonian does not conserve the photon number".into()));
            }
            Ok(block.symmetric_eigenvalues().iter().fold(f64::INFINITY, |a, &b| a.min(b)))
        })
        .collect()
}

/// `E(2) - 2 E(1) + E(0)` of the photon-number blocks; equals `-2 eta` for a
/// Kerr term `-eta n^2`.
pub fn two_photon_gap(sys: &TruncatedSystem) -> Result<f64> {
    let e = photon_block_energies(sys, 2)?;
    Ok(e[2] - 2.0 * e[1] + e[0])
}

/// Excitation energies of the photon-vacuum block, ascending.
pub fn vacuum_block_excitations(sys: &TruncatedSystem) -> Vec<f64> {
    let h = fock::to_dense(&sys.hamiltonian);
    let idx: Vec<usize> = (0..sys.dim()).filter(|&i| sys.space.occupation(i)[0] == 0).collect();
    let block = DMatrix::from_fn(idx.len(), idx.len(), |i, j| h[(idx[i], idx[j])]);
    let mut e: Vec<f64> = block.symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(f64::total_cmp);
    let e0 = e[0];
    e.into_iter().map(|x| x - e0).collect()
}

/// Oracle value of `<exp(P(tau)) exp(-P(0))>` for the normal-mode bath of a
/// polaron frame, at each `tau`.
pub fn displacement_correlator(frame: &PolaronFrame, dims: [usize; 2], taus: &[f64]) -> Result<Vec<Complex64>> {
    let model = Model::Polaron { frame: *frame, omega_a_tilde: 0.0, kappa_a: 0.0 };
    let sys = build(&model, [1, dims[0], dims[1]], DEFAULT_BUDGET)?;
    let ss = checked_steady_state(&sys)?;
    let u = displacement(&sys.space, frame);
    let u_inv = fock::adjoint(&u);
    let opts = KrylovOptions::default();
    taus.iter()
        .map(|&tau| {
            regression_correlator(
                &sys,
                &ss.rho,
                &[Insertion::new(u.clone(), tau), Insertion::new(u_inv.clone(), 0.0)],
                &opts,
            )
        })
        .collect()
}

/// Oracle value of `<exp(P(t1 - t2)) exp(P(t1)) exp(-P(0)) exp(-P(-t3))>`.
pub fn four_point_correlator(frame: &PolaronFrame, dims: [usize; 2], t1: f64, t2: f64, t3: f64) -> Result<Complex64> {
    if !(t1 >= 0.0 && t2 >= 0.0 && t3 >= 0.0) {
        return Err(Error::InvalidParameter(format!("delays must be non-negative, got ({t1}, {t2}, {t3})")));
    }
    let model = Model::Polaron { frame: *frame, omega_a_tilde: 0.0, kappa_a: 0.0 };
    let sys = build(&model, [1, dims[0], dims[1]], DEFAULT_BUDGET)?;
    let ss = checked_steady_state(&sys)?;
    let u = displacement(&sys.space, frame);
    let u_inv = fock::adjoint(&u);
    let ops = [
        Insertion::new(u.clone(), t1 - t2),
        Insertion::new(u, t1),
        Insertion::new(u_inv.clone(), 0.0),
        Insertion::new(u_inv, -t3),
    ];
    regression_correlator(&sys, &ss.rho, &ops, &KrylovOptions::default())
}

/// `g2(0)` of the dressed driven model from the Lindblad steady state and
/// from the quadrature, for a single soft mode.
pub fn driven_g2_pair(
    zeta: f64,
    omega: f64,
    kappa_minus: f64,
    drive: &DriveConfig,
    dims: [usize; 2],
) -> Result<(f64, f64)> {
    let eta = zeta * zeta * omega;
    let frame = PolaronFrame {
        zeta_minus: zeta,
        zeta_plus: 0.0,
        eta,
        kappa_minus,
        kappa_plus: 0.0,
        omega_minus: omega,
        omega_plus: 1.0,
        sum_rule_residual: 0.0,
    };
    let model = Model::Driven { frame, delta_a: drive.delta_a, epsilon_a: drive.epsilon_a, kappa_a: drive.kappa_a };
    let (oracle, _) = steady_state_g2(&build(&model, [dims[0], dims[1], 1], DEFAULT_BUDGET)?)?;
    let kernel = CorrelationKernel::single(zeta, omega, kappa_minus);
    let quad = g2_from_kernel(&kernel, eta, drive, &QuadratureConfig::default())?;
    Ok((oracle, quad.g2))
}

/// Steady state with the leakage and positivity checks applied.
pub fn checked_steady_state(sys: &TruncatedSystem) -> Result<SteadyState> {
    let ss = steady_state(sys, &SteadyStateOptions::default())?;
    if ss.leakage > LEAKAGE_LIMIT {
        return Err(Error::InsufficientTruncation(ss.leakage));
    }
    if ss.min_eigenvalue < POSITIVITY_FLOOR {
        return Err(Error::IntegratorFailure(format!(
            "steady state has eigenvalue {:e} below the positivity floor",
            ss.min_eigenvalue
        )));
    }
    Ok(ss)
}

/// Steady-state `g2(0)` and photon number of a driven model.
pub fn steady_state_g2(sys: &TruncatedSystem) -> Result<(f64, f64)> {
    let ss = checked_steady_state(sys)?;
    let a = sys.space.destroy(0);
    let ad = fock::adjoint(&a);
    let n = ss.expect(&fock::mul(&ad, &a)).re;
    let a2 = fock::mul(&a, &a);
    let n2 = ss.expect(&fock::mul(&fock::adjoint(&a2), &a2)).re;
    Ok((n2 / (n * n), n))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub oracle: f64,
    pub analytic: f64,
    /// Absolute or relative deviation, as named by `metric`.
    pub deviation: f64,
    pub metric: String,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Check {
    fn absolute(name: &str, oracle: f64, analytic: f64, tolerance: f64) -> Self {
        let deviation = (oracle - analytic).abs();
        Self {
            name: name.into(),
            oracle,
            analytic,
            deviation,
            metric: "absolute".into(),
            tolerance,
            passed: deviation <= tolerance,
            error: None,
        }
    }

    fn relative(name: &str, oracle: f64, analytic: f64, tolerance: f64) -> Self {
        let deviation = (oracle - analytic).abs() / analytic.abs();
        Self { metric: "relative".into(), deviation, passed: deviation <= tolerance, ..Self::absolute(name, oracle, analytic, tolerance) }
    }

    fn failed(name: &str, err: &Error) -> Self {
        Self {
            name: name.into(),
            oracle: f64::NAN,
            analytic: f64::NAN,
            deviation: f64::NAN,
            metric: "none".into(),
            tolerance: f64::NAN,
            passed: false,
            error: Some(err.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Settings of the standard validation set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationSettings {
    pub g: f64,
    pub delta_c: f64,
    pub g_a: f64,
    pub kerr_dims: [usize; 3],
    pub linearized_kerr_dims: [usize; 3],
    pub spectrum_dims: [usize; 3],
    pub kerr_tolerance: f64,
    pub spectrum_tolerance: f64,
    pub phi2_zeta: f64,
    pub phi2_omega: f64,
    pub phi2_kappa: f64,
    pub phi2_truncation: usize,
    pub phi2_taus: [f64; 3],
    pub phi2_tolerance: f64,
    pub kerr_only_kappa: f64,
    pub kerr_only_ratio: f64,
    pub kerr_only_truncation: usize,
    pub g2_tolerance: f64,
    pub driven_zeta: f64,
    pub driven_omega: f64,
    pub driven_kappa_minus: f64,
    pub driven_kappa_a: f64,
    pub driven_dims: [usize; 2],
}

impl Default for ValidationSettings {
    fn default() -> Self {
        Self {
            g: 0.5,
            delta_c: 1.251,
            g_a: 1e-3,
            kerr_dims: [3, 12, 12],
            linearized_kerr_dims: [3, 16, 16],
            spectrum_dims: [1, 24, 24],
            kerr_tolerance: 1e-8,
            spectrum_tolerance: 1e-6,
            phi2_zeta: 0.3,
            phi2_omega: 0.36,
            phi2_kappa: 0.05,
            phi2_truncation: 60,
            phi2_taus: [1.0, 5.0, 20.0],
            phi2_tolerance: 1e-3,
            kerr_only_kappa: 0.1,
            kerr_only_ratio: 10.0,
            kerr_only_truncation: 10,
            g2_tolerance: 1e-2,
            driven_zeta: 0.3,
            driven_omega: 0.36,
            driven_kappa_minus: 0.05,
            driven_kappa_a: 0.02,
            driven_dims: [4, 10],
        }
    }
}

fn frame_at(s: &ValidationSettings) -> Result<PolaronFrame> {
    let modes = diagonalize(s.g, s.delta_c, 1.0, s.g_a)?;
    kerr_strength(&modes, s.g, s.delta_c, 1.0, s.g_a, NormalModeDecay::default(), KerrOptions::default())
}

fn kerr_check(s: &ValidationSettings) -> Result<Vec<Check>> {
    let frame = frame_at(s)?;
    let sys = build(&Model::Polaron { frame, omega_a_tilde: 0.0, kappa_a: 0.1 }, s.kerr_dims, DEFAULT_BUDGET)?;
    let lin = linearized(s, s.linearized_kerr_dims)?;
    Ok(vec![
        Check::absolute("kerr_polaron_two_photon_gap", two_photon_gap(&sys)?, -2.0 * frame.eta, s.kerr_tolerance),
        Check::absolute("kerr_linearized_two_photon_gap", two_photon_gap(&lin)?, -2.0 * frame.eta, s.kerr_tolerance),
    ])
}

fn linearized(s: &ValidationSettings, dims: [usize; 3]) -> Result<TruncatedSystem> {
    build(
        &Model::Linearized {
            g: s.g,
            delta_c: s.delta_c,
            omega_a_tilde: 0.0,
            omega_b: 1.0,
            g_a: s.g_a,
            kappa_a: 0.1,
            kappa_b: 0.0,
            kappa_c: 0.0,
        },
        dims,
        DEFAULT_BUDGET,
    )
}

fn spectrum_check(s: &ValidationSettings) -> Result<Vec<Check>> {
    let modes = diagonalize(s.g, s.delta_c, 1.0, s.g_a)?;
    let e = vacuum_block_excitations(&linearized(s, s.spectrum_dims)?);
    Ok(vec![
        Check::absolute("electromechanical_omega_minus", e[1], modes.omega_minus, s.spectrum_tolerance),
        Check::absolute("electromechanical_two_soft_quanta", e[2], 2.0 * modes.omega_minus, s.spectrum_tolerance),
    ])
}

fn phi2_check(s: &ValidationSettings) -> Result<Vec<Check>> {
    let kernel = CorrelationKernel::single(s.phi2_zeta, s.phi2_omega, s.phi2_kappa);
    let frame = PolaronFrame {
        zeta_minus: s.phi2_zeta,
        zeta_plus: 0.0,
        eta: s.phi2_zeta * s.phi2_zeta * s.phi2_omega,
        kappa_minus: s.phi2_kappa,
        kappa_plus: 0.0,
        omega_minus: s.phi2_omega,
        omega_plus: 1.0,
        sum_rule_residual: 0.0,
    };
    let values = displacement_correlator(&frame, [s.phi2_truncation, 1], &s.phi2_taus)?;
    s.phi2_taus
        .iter()
        .zip(values)
        .map(|(&tau, v)| {
            let analytic = kernel.phi2(tau)?;
            let oracle = -v.ln();
            let dev = (oracle - analytic).norm() / analytic.norm();
            let mut c = Check::relative(&format!("phi2_tau_{tau}"), oracle.norm(), analytic.norm(), s.phi2_tolerance);
            c.deviation = dev;
            c.passed = dev <= s.phi2_tolerance;
            Ok(c)
        })
        .collect()
}

/// Kerr-only `g2(0)` from the Lindblad steady state and from the quadrature.
pub fn kerr_only_g2_pair(kappa_a: f64, ratio: f64, truncation: usize) -> Result<(f64, f64)> {
    let eta = ratio * kappa_a;
    let drive = DriveConfig { delta_a: eta, epsilon_a: 1e-2 * kappa_a, kappa_a };
    let frame = PolaronFrame {
        zeta_minus: 0.0,
        zeta_plus: 0.0,
        eta,
        kappa_minus: 0.0,
        kappa_plus: 0.0,
        omega_minus: 1.0,
        omega_plus: 1.0,
        sum_rule_residual: 0.0,
    };
    let sys = build(
        &Model::Driven { frame, delta_a: drive.delta_a, epsilon_a: drive.epsilon_a, kappa_a },
        [truncation, 1, 1],
        DEFAULT_BUDGET,
    )?;
    let (oracle, _) = steady_state_g2(&sys)?;
    let quad = g2_from_kernel(&CorrelationKernel { modes: vec![] }, eta, &drive, &QuadratureConfig::default())?;
    Ok((oracle, quad.g2))
}

fn g2_check(s: &ValidationSettings) -> Result<Vec<Check>> {
    let (oracle, quad) = kerr_only_g2_pair(s.kerr_only_kappa, s.kerr_only_ratio, s.kerr_only_truncation)?;
    Ok(vec![Check::relative("kerr_only_g2", oracle, quad, s.g2_tolerance)])
}

fn driven_check(s: &ValidationSettings) -> Result<Vec<Check>> {
    let eta = s.driven_zeta * s.driven_zeta * s.driven_omega;
    let drive = DriveConfig { delta_a: eta, epsilon_a: 0.02 * s.driven_kappa_a, kappa_a: s.driven_kappa_a };
    let (oracle, quad) = driven_g2_pair(s.driven_zeta, s.driven_omega, s.driven_kappa_minus, &drive, s.driven_dims)?;
    Ok(vec![Check::relative("dressed_drive_g2", oracle, quad, s.g2_tolerance)])
}

/// Runs the standard oracle comparisons in parallel.
pub fn validate(s: &ValidationSettings) -> ValidationReport {
    type Job = fn(&ValidationSettings) -> Result<Vec<Check>>;
    let jobs: [(&str, Job); 5] = [
        ("kerr", kerr_check),
        ("spectrum", spectrum_check),
        ("phi2", phi2_check),
        ("kerr_only_g2", g2_check),
        ("dressed_drive_g2", driven_check),
    ];
    let checks: Vec<Check> = jobs
        .par_iter()
        .map(|(name, job)| job(s).unwrap_or_else(|e| vec![Check::failed(name, &e)]))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let passed = checks.iter().all(|c| c.passed);
    ValidationReport { checks, passed }
}
