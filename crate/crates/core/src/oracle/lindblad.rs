//! Lindblad generator on column-stacked density matrices.
//!
//! `vec(A rho B) = (B^T kron A) vec(rho)`, matching the column-major storage
//! of `nalgebra` matrices.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fock::{adjoint, conj, identity, kron, mul, scale, sum, transpose, FockSpace, Op};
use super::krylov::{expm_action, KrylovOptions};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Jump operator `sqrt(rate) op`.
#[derive(Debug, Clone)]
pub struct CollapseOp {
    pub rate: f64,
    pub op: Op,
}

#[derive(Debug, Clone)]
pub struct TruncatedSystem {
    pub space: FockSpace,
    pub hamiltonian: Op,
    pub collapse_ops: Vec<CollapseOp>,
    /// Human-readable mode labels in basis order.
    pub labels: Vec<&'static str>,
}

impl TruncatedSystem {
    pub fn dims(&self) -> &[usize] {
        &self.space.dims
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn liouvillian(&self) -> Op {
        let n = self.dim();
        let id = identity(n);
        let h = &self.hamiltonian;
        let mut terms = vec![
            scale(&kron(&id, h), -I),
            scale(&kron(&transpose(h), &id), I),
        ];
        for c in &self.collapse_ops {
            if c.rate == 0.0 {
                continue;
            }
            let j = scale(&c.op, Complex64::new(c.rate.sqrt(), 0.0));
            let jdj = mul(&adjoint(&j), &j);
            terms.push(kron(&conj(&j), &j));
            terms.push(scale(&kron(&id, &jdj), Complex64::new(-0.5, 0.0)));
            terms.push(scale(&kron(&transpose(&jdj), &id), Complex64::new(-0.5, 0.0)));
        }
        sum(n * n, terms)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyStateOptions {
    /// Liouvillian dimension up to which the null space is found by dense LU.
    pub dense_limit: usize,
    /// Relaxation time step for the iterative route.
    pub relax_step: f64,
    /// Largest number of relaxation steps.
    pub max_steps: usize,
    /// Longest relaxation step; steps grow geometrically up to this.
    pub max_relax_step: f64,
    /// Convergence threshold on the change of `rho` over one step.
    pub tol: f64,
    /// Two relaxations from different initial states that end further apart
    /// than this signal more than one steady state.
    pub degeneracy_tol: f64,
}

impl Default for SteadyStateOptions {
    fn default() -> Self {
        Self { dense_limit: 1600, relax_step: 10.0, max_relax_step: 200.0, max_steps: 10_000, tol: 1e-12, degeneracy_tol: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    pub rho: DMatrix<Complex64>,
    /// Most negative eigenvalue of the Hermitian part.
    pub min_eigenvalue: f64,
    /// Largest population in the top two Fock levels of any mode.
    pub leakage: f64,
}

impl SteadyState {
    pub fn expect(&self, op: &Op) -> Complex64 {
        trace_product(op, &self.rho)
    }
}

/// `Tr(A rho)` for sparse `A`.
pub fn trace_product(a: &Op, rho: &DMatrix<Complex64>) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (v, (i, j)) in a.iter() {
        acc += v * rho[(j, i)];
    }
    acc
}

pub fn vectorize(rho: &DMatrix<Complex64>) -> Vec<Complex64> {
    rho.as_slice().to_vec()
}

pub fn unvectorize(v: &[Complex64], n: usize) -> DMatrix<Complex64> {
    DMatrix::from_column_slice(n, n, v)
}

fn trace(rho: &DMatrix<Complex64>) -> Complex64 {
    rho.diagonal().iter().sum()
}

/// Population in the top two levels of each mode, maximized over modes.
pub fn leakage(space: &FockSpace, rho: &DMatrix<Complex64>) -> f64 {
    let mut per_mode = vec![0.0; space.dims.len()];
    for i in 0..space.dim() {
        let p = rho[(i, i)].re;
        for (k, (&n, &d)) in space.occupation(i).iter().zip(&space.dims).enumerate() {
            if d > 2 && n + 2 >= d {
                per_mode[k] += p;
            }
        }
    }
    per_mode.into_iter().fold(0.0, f64::max)
}

fn finish(space: &FockSpace, rho: DMatrix<Complex64>) -> SteadyState {
    let rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    let rho = &rho / trace(&rho);
    let min_eigenvalue = rho.clone().symmetric_eigenvalues().iter().fold(f64::INFINITY, |a, &b| a.min(b));
    let leakage = leakage(space, &rho);
    SteadyState { rho, min_eigenvalue, leakage }
}

pub fn steady_state(sys: &TruncatedSystem, opts: &SteadyStateOptions) -> Result<SteadyState> {
    if sys.collapse_ops.iter().all(|c| c.rate == 0.0) {
        return Err(Error::InvalidParameter("steady state needs at least one collapse operator".into()));
    }
    let n = sys.dim();
    let l = sys.liouvillian();
    if n * n <= opts.dense_limit {
        return dense_null_space(sys, &l);
    }
    let start_a = {
        let mut r = DMatrix::zeros(n, n);
        r[(0, 0)] = Complex64::new(1.0, 0.0);
        r
    };
    let start_b = DMatrix::<Complex64>::identity(n, n) / Complex64::new(n as f64, 0.0);
    let a = relax(&l, start_a, opts)?;
    let b = relax(&l, start_b, opts)?;
    let gap = (&a - &b).norm();
    if gap > opts.degeneracy_tol {
        return Err(Error::DegenerateLiouvillian(format!(
            "relaxation from pure and mixed initial states differs by {gap:e}"
        )));
    }
    Ok(finish(&sys.space, a))
}

fn dense_null_space(sys: &TruncatedSystem, l: &Op) -> Result<SteadyState> {
    let n = sys.dim();
    let dim = n * n;
    let mut m = super::fock::to_dense(l);
    // Replace the first row by the trace functional.
    for j in 0..dim {
        m[(0, j)] = Complex64::new(0.0, 0.0);
    }
    for k in 0..n {
        m[(0, k * n + k)] = Complex64::new(1.0, 0.0);
    }
    let mut rhs = DVector::zeros(dim);
    rhs[0] = Complex64::new(1.0, 0.0);
    let lu = m.lu();
    let u = lu.u();
    let (lo, hi) = u.diagonal().iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), d| (lo.min(d.norm()), hi.max(d.norm())));
    if !(lo > 1e-13 * hi) {
        return Err(Error::DegenerateLiouvillian(format!(
            "trace-augmented Liouvillian has pivot ratio {:e}",
            lo / hi
        )));
    }
    let x = lu
        .solve(&rhs)
        .ok_or_else(|| Error::DegenerateLiouvillian("singular trace-augmented Liouvillian".into()))?;
    Ok(finish(&sys.space, unvectorize(x.as_slice(), n)))
}

fn relax(l: &Op, rho: DMatrix<Complex64>, opts: &SteadyStateOptions) -> Result<DMatrix<Complex64>> {
    let n = rho.nrows();
    let kopts = KrylovOptions { tol: 1e-13, ..Default::default() };
    let mut v = vectorize(&rho);
    let mut step = opts.relax_step;
    for _ in 0..opts.max_steps {
        let prev = v.clone();
        expm_action(l, &mut v, step, &kopts)?;
        let tr: Complex64 = (0..n).map(|k| v[k * n + k]).sum();
        v.iter_mut().for_each(|x| *x /= tr);
        let change = v.iter().zip(&prev).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        if change <= opts.tol {
            return Ok(unvectorize(&v, n));
        }
        step = (1.5 * step).min(opts.max_relax_step);
    }
    Err(Error::IntegratorFailure(format!(
        "relaxation did not reach a steady state in {} steps",
        opts.max_steps
    )))
}

/// Propagates a (not necessarily physical) operator `x` by `exp(t L)`.
pub fn propagate(l: &Op, x: &DMatrix<Complex64>, t: f64, opts: &KrylovOptions) -> Result<DMatrix<Complex64>> {
    let n = x.nrows();
    let mut v = vectorize(x);
    let before = trace(x);
    expm_action(l, &mut v, t, opts)?;
    let out = unvectorize(&v, n);
    let drift = (trace(&out) - before).norm();
    let scale = x.norm().max(1e-300);
    if drift > 1e-8 * scale {
        return Err(Error::IntegratorFailure(format!("trace drifted by {drift:e} during propagation")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::fock::{add, destroy, number};

    fn cavity(n: usize, delta: f64, eps: f64, kappa: f64) -> TruncatedSystem {
        let a = destroy(n);
        let ad = adjoint(&a);
        let h = add(&scale(&number(n), Complex64::new(delta, 0.0)), &scale(&add(&a, &ad), Complex64::new(eps, 0.0)));
        TruncatedSystem {
            space: FockSpace::new(&[n], 1000).unwrap(),
            hamiltonian: h,
            collapse_ops: vec![CollapseOp { rate: 2.0 * kappa, op: a }],
            labels: vec!["a"],
        }
    }

    #[test]
    fn decays_to_vacuum() {
        let s = steady_state(&cavity(8, 0.3, 0.0, 0.1), &SteadyStateOptions::default()).unwrap();
        assert!((s.rho[(0, 0)].re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn coherent_photon_number() {
        let (delta, eps, kappa) = (0.2, 0.05, 0.1);
        let sys = cavity(12, delta, eps, kappa);
        let want = eps * eps / (kappa * kappa + delta * delta);
        let s = steady_state(&sys, &SteadyStateOptions::default()).unwrap();
        assert!((s.expect(&number(12)).re - want).abs() < 1e-6);
        assert!(s.min_eigenvalue > -1e-9);
        let relaxed = steady_state(&sys, &SteadyStateOptions { dense_limit: 0, ..Default::default() }).unwrap();
        assert!((&relaxed.rho - &s.rho).norm() < 1e-9);
    }

    #[test]
    fn closed_system_is_rejected() {
        let mut sys = cavity(4, 0.1, 0.0, 0.1);
        sys.collapse_ops.clear();
        assert!(steady_state(&sys, &SteadyStateOptions::default()).is_err());
        sys.collapse_ops.push(CollapseOp { rate: 0.1, op: number(4) });
        assert!(matches!(
            steady_state(&sys, &SteadyStateOptions::default()),
            Err(Error::DegenerateLiouvillian(_))
        ));
    }

    #[test]
    fn propagation_preserves_trace() {
        let sys = cavity(10, 0.2, 0.3, 0.1);
        let l = sys.liouvillian();
        let mut rho = DMatrix::zeros(10, 10);
        rho[(0, 0)] = Complex64::new(1.0, 0.0);
        let out = propagate(&l, &rho, 20.0, &KrylovOptions::default()).unwrap();
        assert!((trace(&out) - Complex64::new(1.0, 0.0)).norm() < 1e-10);
    }
}
