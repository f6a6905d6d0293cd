//! Action of `exp(t L)` on a vector by restarted Arnoldi steps.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::fock::{apply, Op};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovOptions {
    pub subspace: usize,
    /// Error budget relative to the vector norm over the whole interval.
    pub tol: f64,
    /// Smallest step, relative to the interval, before giving up.
    pub min_step_fraction: f64,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self { subspace: 30, tol: 1e-10, min_step_fraction: 1e-12 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KrylovStats {
    pub steps: usize,
    pub rejected: usize,
    pub matvecs: usize,
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest absolute row sum.
pub fn row_norm(l: &Op) -> f64 {
    l.outer_iterator().map(|r| r.iter().map(|(_, c)| c.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Overwrites `v` with `exp(t L) v`.
pub fn expm_action(l: &Op, v: &mut [Complex64], t: f64, opts: &KrylovOptions) -> Result<KrylovStats> {
    let n = v.len();
    let mut stats = KrylovStats::default();
    if t == 0.0 || n == 0 {
        return Ok(stats);
    }
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidParameter(format!("propagation time must be non-negative, got {t}")));
    }
    let m_max = opts.subspace.min(n).max(1);
    let l_norm = row_norm(l);
    let mut h = if l_norm > 0.0 { (m_max as f64 / (2.0 * l_norm)).min(t) } else { t };
    let mut done = 0.0;
    let mut basis: Vec<Vec<Complex64>> = (0..=m_max).map(|_| vec![Complex64::new(0.0, 0.0); n]).collect();
    let mut w = vec![Complex64::new(0.0, 0.0); n];

    while done < t {
        let beta = norm(v);
        if beta == 0.0 {
            return Ok(stats);
        }
        for (b, x) in basis[0].iter_mut().zip(v.iter()) {
            *b = x / beta;
        }
        let mut hess = DMatrix::<Complex64>::zeros(m_max + 1, m_max);
        let mut m = m_max;
        let mut breakdown = false;
        for j in 0..m_max {
            apply(l, &basis[j], &mut w);
            stats.matvecs += 1;
            for i in 0..=j {
                let hij: Complex64 = basis[i].iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                hess[(i, j)] = hij;
                for (x, b) in w.iter_mut().zip(&basis[i]) {
                    *x -= hij * b;
                }
            }
            let hn = norm(&w);
            hess[(j + 1, j)] = Complex64::new(hn, 0.0);
            if hn <= 1e-13 * l_norm {
                m = j + 1;
                breakdown = true;
                break;
            }
            for (b, x) in basis[j + 1].iter_mut().zip(&w) {
                *b = x / hn;
            }
        }
        let h_sub = hess.view((0, 0), (m, m)).into_owned();
        let tail = hess[(m.min(m_max), m - 1)].norm();
        loop {
            let step = h.min(t - done);
            let e = (h_sub.clone() * Complex64::new(step, 0.0)).exp();
            let err = if breakdown { 0.0 } else { tail * step * e[(m - 1, 0)].norm() };
            if err <= opts.tol * step / t {
                for x in v.iter_mut() {
                    *x = Complex64::new(0.0, 0.0);
                }
                for k in 0..m {
                    let c = e[(k, 0)] * beta;
                    for (x, b) in v.iter_mut().zip(&basis[k]) {
                        *x += c * b;
                    }
                }
                done += step;
                stats.steps += 1;
                if err < 0.1 * opts.tol * step / t {
                    h = (h * 1.5).min(t);
                }
                break;
            }
            stats.rejected += 1;
            h *= 0.5;
            if h < opts.min_step_fraction * t {
                return Err(Error::IntegratorFailure(format!(
                    "Krylov step fell below {:e} of the interval",
                    opts.min_step_fraction
                )));
            }
        }
    }
    Ok(stats)
}
