//! Multi-time correlators by the quantum regression theorem.
//!
//! Supported orderings are those whose times rise to a single latest
//! operator and fall after it, e.g. `<A(t1) B(t2) C(t3)>` with
//! `t1 <= t2 >= t3`. Operators left of the peak act on the right of the
//! propagated state, operators right of it act on the left.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::fock::{to_dense, Op};
use super::krylov::KrylovOptions;
use super::lindblad::{propagate, TruncatedSystem};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Insertion {
    pub op: Op,
    pub time: f64,
}

impl Insertion {
    pub fn new(op: Op, time: f64) -> Self {
        Self { op, time }
    }
}

enum Side {
    Left,
    Right,
}

/// `<O_1(t_1) O_2(t_2) ... O_k(t_k)>` in the state `rho` at the earliest time.
pub fn regression_correlator(
    sys: &TruncatedSystem,
    rho: &DMatrix<Complex64>,
    ops: &[Insertion],
    opts: &KrylovOptions,
) -> Result<Complex64> {
    if ops.is_empty() {
        return Err(Error::InvalidParameter("empty operator list".into()));
    }
    if ops.iter().any(|o| !o.time.is_finite()) {
        return Err(Error::InvalidParameter("non-finite insertion time".into()));
    }
    let peak = ops
        .iter()
        .enumerate()
        .fold(0, |best, (i, o)| if o.time > ops[best].time { i } else { best });
    let rising = ops[..=peak].windows(2).all(|w| w[0].time <= w[1].time);
    let falling = ops[peak..].windows(2).all(|w| w[0].time >= w[1].time);
    if !(rising && falling) {
        return Err(Error::InvalidParameter(
            "operator times must rise to a single latest insertion and then fall".into(),
        ));
    }

    // Events in time order; ties keep the operator closest to the state first.
    let mut events: Vec<(f64, usize, Side)> = Vec::new();
    for (i, o) in ops.iter().enumerate().take(peak) {
        events.push((o.time, i, Side::Left));
    }
    for (i, o) in ops.iter().enumerate().skip(peak + 1) {
        events.push((o.time, i, Side::Right));
    }
    events.sort_by(|x, y| {
        x.0.total_cmp(&y.0).then_with(|| match (&x.2, &y.2) {
            (Side::Left, Side::Left) => x.1.cmp(&y.1),
            (Side::Right, Side::Right) => y.1.cmp(&x.1),
            _ => std::cmp::Ordering::Equal,
        })
    });

    let l = sys.liouvillian();
    let mut x = rho.clone();
    let mut now = events.first().map_or(ops[peak].time, |e| e.0);
    for (t, i, side) in &events {
        if *t > now {
            x = propagate(&l, &x, *t - now, opts)?;
            now = *t;
        }
        let op = to_dense(&ops[*i].op);
        x = match side {
            Side::Left => &x * &op,
            Side::Right => &op * &x,
        };
    }
    if ops[peak].time > now {
        x = propagate(&l, &x, ops[peak].time - now, opts)?;
    }
    Ok(super::lindblad::trace_product(&ops[peak].op, &x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::fock::{adjoint, destroy, number, scale, FockSpace};
    use crate::oracle::lindblad::CollapseOp;

    #[test]
    fn linear_cavity_first_order_coherence() {
        let (n, delta, kappa) = (8, 0.3, 0.1);
        let a = destroy(n);
        let ad = adjoint(&a);
        let sys = TruncatedSystem {
            space: FockSpace::new(&[n], 1000).unwrap(),
            hamiltonian: scale(&number(n), Complex64::new(delta, 0.0)),
            collapse_ops: vec![CollapseOp { rate: 2.0 * kappa, op: a.clone() }],
            labels: vec!["a"],
        };
        let mut rho = DMatrix::zeros(n, n);
        for (k, p) in [0.5, 0.3, 0.2].iter().enumerate() {
            rho[(k, k)] = Complex64::new(*p, 0.0);
        }
        let nbar = 0.7;
        for tau in [0.5, 3.0, 10.0] {
            let got = regression_correlator(
                &sys,
                &rho,
                &[Insertion::new(ad.clone(), tau), Insertion::new(a.clone(), 0.0)],
                &KrylovOptions::default(),
            )
            .unwrap();
            let want = nbar * Complex64::new(-kappa * tau, delta * tau).exp();
            assert!((got - want).norm() < 1e-8, "tau = {tau}: {got} vs {want}");
        }
    }

    #[test]
    fn rejects_unsupported_ordering() {
        let sys = TruncatedSystem {
            space: FockSpace::new(&[3], 10).unwrap(),
            hamiltonian: number(3),
            collapse_ops: vec![],
            labels: vec!["a"],
        };
        let rho = DMatrix::identity(3, 3);
        let a = destroy(3);
        let ops = [Insertion::new(a.clone(), 2.0), Insertion::new(a.clone(), 0.0), Insertion::new(a, 1.0)];
        assert!(regression_correlator(&sys, &rho, &ops, &KrylovOptions::default()).is_err());
    }
}
