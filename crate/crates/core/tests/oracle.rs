use optokerr::correlations::{CorrelationKernel, DriveConfig};
use optokerr::oracle::{self, build, Model, ValidationSettings, DEFAULT_BUDGET};
use optokerr::spectrum::PolaronFrame;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn single_mode(zeta: f64, omega: f64, kappa: f64) -> PolaronFrame {
    PolaronFrame {
        zeta_minus: zeta,
        zeta_plus: 0.0,
        eta: zeta * zeta * omega,
        kappa_minus: kappa,
        kappa_plus: 0.0,
        omega_minus: omega,
        omega_plus: 1.0,
        sum_rule_residual: 0.0,
    }
}

#[test]
fn validation_report_passes() {
    let report = oracle::validate(&ValidationSettings::default());
    for c in &report.checks {
        println!("{} oracle={:e} analytic={:e} dev={:e} tol={:e}", c.name, c.oracle, c.analytic, c.deviation, c.tolerance);
    }
    assert!(report.passed, "{report:#?}");
    let json = serde_json::to_string(&report).unwrap();
    let back: oracle::ValidationReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back.checks.len(), report.checks.len());
}

#[test]
fn four_point_exponent_matches_regression() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..5 {
        let zeta = rng.random_range(0.1..0.4);
        let omega = rng.random_range(0.3..1.2);
        let kappa = rng.random_range(0.05..0.2);
        let kernel = CorrelationKernel::single(zeta, omega, kappa);
        let frame = single_mode(zeta, omega, kappa);
        let (t2, t3) = (rng.random_range(0.0..4.0), rng.random_range(0.0..4.0));
        // The last point probes the factorized long-time limit.
        for t1 in [t2 + rng.random_range(0.0..3.0), rng.random_range(0.0..3.0), 80.0] {
            let want = (-kernel.phi4(t1, t2, t3).unwrap()).exp();
            let got = oracle::four_point_correlator(&frame, [30, 1], t1, t2, t3).unwrap();
            assert!((got - want).norm() / want.norm() < 1e-3, "({t1}, {t2}, {t3}): {got} vs {want}");
        }
    }
}

#[test]
fn phi2_stable_under_truncation_growth() {
    let frame = single_mode(0.3, 0.36, 0.05);
    let a = oracle::displacement_correlator(&frame, [40, 1], &[1.0, 5.0, 20.0]).unwrap();
    let b = oracle::displacement_correlator(&frame, [42, 1], &[1.0, 5.0, 20.0]).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).norm() < 1e-10);
    }
}

#[test]
fn kerr_only_stable_under_truncation_growth() {
    let (a, quad) = oracle::kerr_only_g2_pair(0.1, 10.0, 10).unwrap();
    let (b, _) = oracle::kerr_only_g2_pair(0.1, 10.0, 12).unwrap();
    assert!((a - b).abs() / a < 1e-6);
    assert!(a < 0.1 && quad < 0.1);
}

#[test]
fn two_mode_four_point() {
    let frame = PolaronFrame {
        zeta_minus: 0.25,
        zeta_plus: 0.1,
        eta: 0.0,
        kappa_minus: 0.08,
        kappa_plus: 0.15,
        omega_minus: 0.4,
        omega_plus: 1.3,
        sum_rule_residual: 0.0,
    };
    let kernel = CorrelationKernel::from_frame(&frame);
    for (t1, t2, t3) in [(1.0, 0.5, 2.0), (0.3, 2.5, 1.0)] {
        let want = (-kernel.phi4(t1, t2, t3).unwrap()).exp();
        let got = oracle::four_point_correlator(&frame, [20, 8], t1, t2, t3).unwrap();
        assert!((got - want).norm() / want.norm() < 1e-3, "({t1}, {t2}, {t3}): {got} vs {want}");
    }
}

#[test]
fn weak_coherent_drive_of_linear_cavity() {
    let frame = single_mode(0.0, 1.0, 0.0);
    let (delta, eps, kappa) = (0.3, 0.02, 0.1);
    let sys =
        build(&Model::Driven { frame, delta_a: delta, epsilon_a: eps, kappa_a: kappa }, [8, 1, 1], DEFAULT_BUDGET).unwrap();
    let (g2, n) = oracle::steady_state_g2(&sys).unwrap();
    assert!((n - eps * eps / (kappa * kappa + delta * delta)).abs() < 1e-6);
    assert!((g2 - 1.0).abs() < 1e-6);
}

#[test]
fn dressed_drive_at_two_points() {
    for (zeta, kappa_a) in [(0.2, 0.02), (0.35, 0.03)] {
        let eta = zeta * zeta * 0.36;
        let drive = DriveConfig { delta_a: eta, epsilon_a: 0.02 * kappa_a, kappa_a };
        let (oracle, quad) = oracle::driven_g2_pair(zeta, 0.36, 0.05, &drive, [4, 10]).unwrap();
        assert!((oracle - quad).abs() / quad < 1e-2, "zeta {zeta}: {oracle} vs {quad}");
    }
}
