//! Decomposition of a Kerr-evolved state into coherent components.
//!
//! For a rational phase `theta_K / 2 pi = p / q` the sequence `exp(i theta_K m^2)`
//! is periodic in `m` with period `q`, so the state is a superposition of at most
//! `q` coherent states `|Upsilon e^{2 pi i k / q}>`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use super::state::{coherent_amplitudes, CatState};
use crate::error::{Error, Result};

/// Tolerance for matching the phase to a rational.
pub const RATIONAL_TOLERANCE: f64 = 1e-6;
/// Largest residual norm accepted for a decomposition.
pub const RESIDUAL_TOLERANCE: f64 = 1e-6;
/// Weights below this magnitude are not counted as components.
pub const WEIGHT_THRESHOLD: f64 = 1e-3;
/// Smallest accepted reciprocal condition number of the coherent Gram matrix.
pub const GRAM_CONDITION_LIMIT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatComponent {
    /// Rotation angle of the component in `[0, 2 pi)`.
    pub phase: f64,
    pub weight: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatDecomposition {
    /// Components with `|weight| > WEIGHT_THRESHOLD`.
    pub components: Vec<CatComponent>,
    /// Rational `p / q` approximating `theta_K / 2 pi`.
    pub p: u32,
    pub q: u32,
    /// Number of rotated coherent states used in the fit.
    pub basis_size: u32,
    pub residual: f64,
}

impl CatDecomposition {
    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    /// Fock amplitudes of the kept components recombined with amplitude
    /// `upsilon`, truncated to `dim` levels.
    pub fn reconstruct(&self, upsilon: Complex64, dim: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for c in &self.components {
            let coh = coherent_amplitudes(upsilon * Complex64::from_polar(1.0, c.phase), dim);
            for (o, a) in out.iter_mut().zip(coh) {
                *o += c.weight * a;
            }
        }
        out
    }
}

/// Best rational approximation `p / q` of `x` in `[0, 1)` with `q <= q_max`,
/// from the continued-fraction convergents. Returns the first convergent
/// within `tol`.
pub fn rational_approximation(x: f64, q_max: u32, tol: f64) -> Option<(u32, u32)> {
    let x = x.rem_euclid(1.0);
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let ai = a as u64;
        let (p2, q2) = (ai * p1 + p0, ai * q1 + q0);
        if q2 > q_max as u64 {
            return None;
        }
        if (x - p2 as f64 / q2 as f64).abs() <= tol {
            let p = (p2 % q2) as u32;
            return Some((p, q2 as u32));
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = r - a;
        if frac <= 0.0 {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}

/// Gauss-sum weights `w_k = (1/q) sum_m exp(2 pi i (p/q) m^2) exp(-2 pi i k m / q)`.
pub fn gauss_weights(p: u32, q: u32) -> Vec<Complex64> {
    let q64 = q as u64;
    (0..q)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for m in 0..q64 {
                let num = (p as u64 * m * m % q64) as f64 - (k as u64 * m % q64) as f64;
                acc += Complex64::from_polar(1.0, TAU * num / q as f64);
            }
            acc / q as f64
        })
        .collect()
}

/// Number of Gauss-sum weights above [`WEIGHT_THRESHOLD`].
pub fn component_count(p: u32, q: u32) -> usize {
    gauss_weights(p, q).iter().filter(|w| w.norm() > WEIGHT_THRESHOLD).count()
}

/// Fits the state with the smallest set of rotated coherent states.
pub fn decompose_cat(state: &CatState, q_max: u32) -> Result<CatDecomposition> {
    if q_max == 0 {
        return Err(Error::InvalidParameter("q_max must be positive".into()));
    }
    let x = state.phase_fraction;
    let (p, q) = rational_approximation(x, q_max, RATIONAL_TOLERANCE)
        .ok_or(Error::NonStroboscopicPhase { phase_over_two_pi: x, q_max })?;
    let n = state.dimension();
    let psi = DVector::from_vec(state.amplitudes.clone());
    let mut worst_condition: Option<(u32, f64)> = None;

    for size in 1..=q {
        let basis: Vec<Vec<Complex64>> = (0..size)
            .map(|k| coherent_amplitudes(state.upsilon * Complex64::from_polar(1.0, TAU * k as f64 / size as f64), n))
            .collect();
        let b = DMatrix::from_fn(n, size as usize, |i, k| basis[k][i]);
        let gram = b.adjoint() * &b;
        let eig = gram.clone().symmetric_eigenvalues();
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for v in eig.iter() {
            lo = lo.min(*v);
            hi = hi.max(*v);
        }
        let rcond = lo / hi;
        if !(rcond > GRAM_CONDITION_LIMIT) {
            worst_condition = Some((size, rcond));
            continue;
        }
        let rhs = b.adjoint() * &psi;
        let w = match gram.cholesky() {
            Some(ch) => ch.solve(&rhs),
            None => {
                worst_condition = Some((size, rcond));
                continue;
            }
        };
        let residual = (&psi - &b * &w).norm();
        if residual < RESIDUAL_TOLERANCE {
            let components = (0..size as usize)
                .filter(|&k| w[k].norm() > WEIGHT_THRESHOLD)
                .map(|k| CatComponent { phase: TAU * k as f64 / size as f64, weight: w[k] })
                .collect();
            return Ok(CatDecomposition { components, p, q, basis_size: size, residual });
        }
    }
    let (size, condition) = worst_condition.unwrap_or((q, f64::NAN));
    Err(Error::UnresolvableComponents { q: size, condition })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catstate::state::evolve_cat;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn cat(fraction: f64) -> CatDecomposition {
        let s = evolve_cat(Complex64::new(2.0, 0.0), fraction, 1, 40).unwrap();
        decompose_cat(&s, 12).unwrap()
    }

    #[test]
    fn continued_fractions() {
        assert_eq!(rational_approximation(0.5, 12, 1e-9), Some((1, 2)));
        assert_eq!(rational_approximation(1.0 / 3.0, 12, 1e-9), Some((1, 3)));
        assert_eq!(rational_approximation(0.375, 12, 1e-9), Some((3, 8)));
        assert_eq!(rational_approximation(0.0, 12, 1e-9), Some((0, 1)));
        assert_eq!(rational_approximation(1.0 / PI, 12, 1e-9), None);
    }

    #[test]
    fn quarter_turn() {
        let d = cat(0.25);
        assert_eq!(d.component_count(), 2);
        let w0 = d.components.iter().find(|c| c.phase == 0.0).unwrap().weight;
        let w1 = d.components.iter().find(|c| (c.phase - PI).abs() < 1e-12).unwrap().weight;
        assert!((w0 - Complex64::new(0.5, 0.5)).norm() < 1e-6);
        assert!((w1 - Complex64::new(0.5, -0.5)).norm() < 1e-6);
    }

    #[test]
    fn component_counts() {
        assert_eq!(cat(0.5).component_count(), 1);
        assert_relative_eq!(cat(0.5).components[0].phase, PI);
        assert_eq!(cat(1.0 / 3.0).component_count(), 3);
        let d = cat(0.125);
        assert_eq!(d.component_count(), 4);
        let mut phases: Vec<f64> = d.components.iter().map(|c| c.phase).collect();
        phases.sort_by(f64::total_cmp);
        for (got, want) in phases.iter().zip([0.0, 0.5 * PI, PI, 1.5 * PI]) {
            assert_relative_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn recombination_matches_state() {
        for f in [0.5, 0.25, 1.0 / 3.0, 0.125] {
            let s = evolve_cat(Complex64::new(2.0, 0.0), f, 1, 40).unwrap();
            let d = decompose_cat(&s, 12).unwrap();
            let r = d.reconstruct(s.upsilon, s.dimension());
            let err: f64 = r.iter().zip(&s.amplitudes).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            assert!(err < 1e-6, "fraction {f}: {err}");
        }
    }

    #[test]
    fn gauss_weights_normalized() {
        for q in 1..=12 {
            for p in 0..q {
                let s: f64 = gauss_weights(p, q).iter().map(|w| w.norm_sqr()).sum();
                assert!(s >= 1.0 - 1e-12, "p/q = {p}/{q}");
            }
        }
    }

    #[test]
    fn irrational_phase() {
        let s = evolve_cat(Complex64::new(2.0, 0.0), 0.5_f64.sqrt() / 3.0, 1, 40).unwrap();
        assert!(matches!(decompose_cat(&s, 12), Err(Error::NonStroboscopicPhase { .. })));
    }

    #[test]
    fn inconsistent_state_is_unresolvable() {
        // A number state cannot be built from eleven nearly parallel small
        // coherent states.
        let mut s = evolve_cat(Complex64::new(0.2, 0.0), 1.0 / 11.0, 1, 20).unwrap();
        s.amplitudes.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
        s.amplitudes[9] = Complex64::new(1.0, 0.0);
        let r = decompose_cat(&s, 12);
        assert!(matches!(r, Err(Error::UnresolvableComponents { .. })), "{r:?}");
    }
}
