//! Finite-matrix Hamiltonians and jump operators of the four model levels.
//!
//! Mode order in the product basis: `(a, b, c)` for [`Model::Full`] and
//! [`Model::Linearized`], `(a, B_-, B_+)` for [`Model::Polaron`] and
//! [`Model::Driven`]. Photon and bare-mode jumps use amplitude decay rates
//! (jump `sqrt(2 kappa) a`); normal-mode jumps use energy rates
//! (jump `sqrt(kappa_j) B_j`).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fock::{add, adjoint, expm, hermiticity_defect, kron, mul, scale, sum, FockSpace, Op};
use super::lindblad::{CollapseOp, TruncatedSystem};
use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::spectrum::PolaronFrame;

/// Default cap on the Hilbert-space dimension.
pub const DEFAULT_BUDGET: usize = 100_000;
pub const HERMITICITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Model {
    /// Bare three-mode Hamiltonian in the frame of the microwave drive.
    Full { params: SystemParams },
    /// Linearized electromechanics with the optical mode coupled to `b`.
    Linearized {
        g: f64,
        delta_c: f64,
        omega_a_tilde: f64,
        omega_b: f64,
        g_a: f64,
        kappa_a: f64,
        kappa_b: f64,
        kappa_c: f64,
    },
    /// Optical Kerr mode and free normal modes after the polaron transform.
    Polaron { frame: PolaronFrame, omega_a_tilde: f64, kappa_a: f64 },
    /// Weakly probed Kerr mode in the probe frame, with the drive and the
    /// photon jump dressed by the displacement `exp(P)`.
    Driven { frame: PolaronFrame, delta_a: f64, epsilon_a: f64, kappa_a: f64 },
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn check_dims(dims: &[usize; 3]) -> Result<()> {
    // A single level is allowed for modes that are to be frozen out.
    if dims.contains(&0) {
        return Err(Error::InvalidParameter(format!("Fock dimensions must be positive, got {dims:?}")));
    }
    Ok(())
}

/// `x + x^dag`.
fn quadrature(x: &Op) -> Op {
    add(x, &adjoint(x))
}

pub fn build(model: &Model, dims: [usize; 3], budget: usize) -> Result<TruncatedSystem> {
    check_dims(&dims)?;
    let space = FockSpace::new(&dims, budget)?;
    let n = space.dim();
    let a = space.destroy(0);
    let na = space.number(0);
    let sys = match *model {
        Model::Full { params: p } => {
            p.validate()?;
            let (b, c) = (space.destroy(1), space.destroy(2));
            let xb = quadrature(&b);
            let h = sum(
                n,
                [
                    scale(&space.number(2), re(p.bare_detuning())),
                    scale(&na, re(p.omega_a)),
                    scale(&space.number(1), re(p.omega_b)),
                    scale(&mul(&na, &xb), re(p.g_a)),
                    scale(&mul(&space.number(2), &xb), re(p.g_c)),
                    scale(&quadrature(&c), re(p.epsilon_c)),
                ],
            );
            TruncatedSystem {
                space,
                hamiltonian: h,
                collapse_ops: vec![
                    CollapseOp { rate: 2.0 * p.kappa_a, op: a },
                    CollapseOp { rate: 2.0 * p.kappa_b, op: b },
                    CollapseOp { rate: 2.0 * p.kappa_c, op: c },
                ],
                labels: vec!["a", "b", "c"],
            }
        }
        Model::Linearized { g, delta_c, omega_a_tilde, omega_b, g_a, kappa_a, kappa_b, kappa_c } => {
            let (b, c) = (space.destroy(1), space.destroy(2));
            let xb = quadrature(&b);
            let h = sum(
                n,
                [
                    scale(&space.number(2), re(delta_c)),
                    scale(&na, re(omega_a_tilde)),
                    scale(&space.number(1), re(omega_b)),
                    scale(&mul(&na, &xb), re(g_a)),
                    scale(&mul(&quadrature(&c), &xb), re(-g)),
                ],
            );
            TruncatedSystem {
                space,
                hamiltonian: h,
                collapse_ops: vec![
                    CollapseOp { rate: 2.0 * kappa_a, op: a },
                    CollapseOp { rate: 2.0 * kappa_b, op: b },
                    CollapseOp { rate: 2.0 * kappa_c, op: c },
                ],
                labels: vec!["a", "b", "c"],
            }
        }
        Model::Polaron { frame: f, omega_a_tilde, kappa_a } => {
            let h = sum(
                n,
                [
                    scale(&na, re(omega_a_tilde)),
                    scale(&mul(&na, &na), re(-f.eta)),
                    scale(&space.number(1), re(f.omega_minus)),
                    scale(&space.number(2), re(f.omega_plus)),
                ],
            );
            TruncatedSystem {
                space: space.clone(),
                hamiltonian: h,
                collapse_ops: normal_mode_jumps(&space, &f, kappa_a),
                labels: vec!["a", "B-", "B+"],
            }
        }
        Model::Driven { frame: f, delta_a, epsilon_a, kappa_a } => {
            let u = displacement(&space, &f);
            let dressed = mul(&a, &u);
            let h = sum(
                n,
                [
                    scale(&na, re(delta_a)),
                    scale(&mul(&na, &na), re(-f.eta)),
                    scale(&space.number(1), re(f.omega_minus)),
                    scale(&space.number(2), re(f.omega_plus)),
                    scale(&quadrature(&dressed), re(epsilon_a)),
                ],
            );
            let mut jumps = normal_mode_jumps(&space, &f, kappa_a);
            jumps[0].op = dressed;
            TruncatedSystem { space, hamiltonian: h, collapse_ops: jumps, labels: vec!["a", "B-", "B+"] }
        }
    };
    let defect = hermiticity_defect(&sys.hamiltonian);
    if defect > HERMITICITY_TOLERANCE {
        return Err(Error::InvalidParameter(format!("assembled Hamiltonian is not Hermitian (defect {defect:e})")));
    }
    Ok(sys)
}

fn normal_mode_jumps(space: &FockSpace, f: &PolaronFrame, kappa_a: f64) -> Vec<CollapseOp> {
    vec![
        CollapseOp { rate: 2.0 * kappa_a, op: space.destroy(0) },
        CollapseOp { rate: f.kappa_minus, op: space.destroy(1) },
        CollapseOp { rate: f.kappa_plus, op: space.destroy(2) },
    ]
}

/// Displacement generator `P = zeta_- (B_-^dag - B_-) - zeta_+ (B_+^dag - B_+)`
/// restricted to the normal modes, as a two-mode operator.
pub fn displacement_generator(dims: [usize; 2], zeta_minus: f64, zeta_plus: f64) -> (Op, Op) {
    let gen = |d: usize, z: f64| {
        let b = super::fock::destroy(d);
        scale(&add(&adjoint(&b), &scale(&b, re(-1.0))), re(z))
    };
    (gen(dims[0], zeta_minus), gen(dims[1], -zeta_plus))
}

/// `exp(P)` on the full `(a, B_-, B_+)` space.
pub fn displacement(space: &FockSpace, f: &PolaronFrame) -> Op {
    let (pm, pp) = displacement_generator([space.dims[1], space.dims[2]], f.zeta_minus, f.zeta_plus);
    let modes = kron(&expm(&pm), &expm(&pp));
    kron(&super::fock::identity(space.dims[0]), &modes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::fock::to_dense;

    fn frame() -> PolaronFrame {
        PolaronFrame {
            zeta_minus: 0.2,
            zeta_plus: 0.05,
            eta: 0.01,
            kappa_minus: 0.05,
            kappa_plus: 0.05,
            omega_minus: 0.36,
            omega_plus: 1.5,
            sum_rule_residual: 0.0,
        }
    }

    #[test]
    fn all_models_hermitian() {
        let f = frame();
        let models = [
            Model::Full { params: SystemParams { omega_a: 1.0, ..Default::default() } },
            Model::Linearized {
                g: 0.5,
                delta_c: 1.251,
                omega_a_tilde: 0.0,
                omega_b: 1.0,
                g_a: 1e-3,
                kappa_a: 0.1,
                kappa_b: 1e-4,
                kappa_c: 0.127,
            },
            Model::Polaron { frame: f, omega_a_tilde: 0.0, kappa_a: 0.1 },
            Model::Driven { frame: f, delta_a: 0.01, epsilon_a: 0.01, kappa_a: 0.1 },
        ];
        for m in &models {
            let s = build(m, [3, 5, 4], DEFAULT_BUDGET).unwrap();
            assert_eq!(s.dim(), 60);
            assert!(hermiticity_defect(&s.hamiltonian) < 1e-14);
            assert_eq!(s.collapse_ops.len(), 3);
        }
    }

    #[test]
    fn budget_enforced() {
        let m = Model::Polaron { frame: frame(), omega_a_tilde: 0.0, kappa_a: 0.1 };
        assert!(matches!(build(&m, [100, 40, 40], DEFAULT_BUDGET), Err(Error::DimensionOverflow { .. })));
    }

    #[test]
    fn uncoupled_microwave_is_block_diagonal() {
        let m = Model::Linearized {
            g: 0.0,
            delta_c: 1.3,
            omega_a_tilde: 0.0,
            omega_b: 1.0,
            g_a: 1e-3,
            kappa_a: 0.1,
            kappa_b: 0.0,
            kappa_c: 0.0,
        };
        let s = build(&m, [2, 4, 5], DEFAULT_BUDGET).unwrap();
        for (_, (i, j)) in s.hamiltonian.iter() {
            assert_eq!(s.space.occupation(i)[2], s.space.occupation(j)[2]);
        }
    }

    #[test]
    fn dressed_jump_preserves_photon_number_rate() {
        let s = build(&Model::Driven { frame: frame(), delta_a: 0.0, epsilon_a: 0.0, kappa_a: 0.1 }, [3, 8, 4], DEFAULT_BUDGET)
            .unwrap();
        let j = &s.collapse_ops[0].op;
        let jdj = to_dense(&mul(&adjoint(j), j));
        let n = to_dense(&s.space.number(0));
        assert!((jdj - n).norm() < 1e-12);
    }
}
