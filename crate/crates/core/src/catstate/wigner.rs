//! Wigner function of a pure single-mode state on a rectangular grid.
//!
//! Uses the displaced-parity form `W(alpha) = (1/pi) <psi| D(alpha) Pi D(alpha)^dag |psi>`
//! with `alpha = (x + i y) / sqrt 2`, so `W` integrates to one over `dx dy`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

use super::state::CatState;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl AxisSpec {
    pub fn symmetric(half_width: f64, points: usize) -> Self {
        Self { min: -half_width, max: half_width, points }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.points - 1) as f64;
        (0..self.points).map(|i| self.min + step * i as f64).collect()
    }

    fn validate(&self) -> Result<()> {
        if self.points == 0 || !(self.min.is_finite() && self.max.is_finite()) || self.max < self.min {
            return Err(Error::InvalidParameter(format!("invalid grid axis {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerGrid {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Row-major values, `values[iy * x.len() + ix]`.
    pub values: Vec<f64>,
}

impl WignerGrid {
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.x.len() + ix]
    }

    /// Riemann sum of `W dx dy`.
    pub fn integral(&self) -> f64 {
        let dx = if self.x.len() > 1 { self.x[1] - self.x[0] } else { 1.0 };
        let dy = if self.y.len() > 1 { self.y[1] - self.y[0] } else { 1.0 };
        self.values.iter().sum::<f64>() * dx * dy
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Wigner function of `amplitudes` at phase-space point `(x, y)`.
pub fn wigner_point(amplitudes: &[Complex64], x: f64, y: f64) -> f64 {
    // D(-alpha)|psi>, built column by column from displaced number states.
    let beta = -Complex64::new(x, y) / SQRT_2;
    let n = amplitudes.len();
    let b = beta.norm();
    let k_max = n + (b * b + 10.0 * b).ceil() as usize + 24;
    let mut column = vec![Complex64::new(0.0, 0.0); k_max];
    let mut c = Complex64::new((-0.5 * b * b).exp(), 0.0);
    for (k, v) in column.iter_mut().enumerate() {
        if k > 0 {
            c = c * beta / (k as f64).sqrt();
        }
        *v = c;
    }
    let mut phi = vec![Complex64::new(0.0, 0.0); k_max];
    let bc = beta.conj();
    for (m, &cm) in amplitudes.iter().enumerate() {
        if m > 0 {
            let s = 1.0 / (m as f64).sqrt();
            let mut prev = Complex64::new(0.0, 0.0);
            for k in 0..k_max {
                let cur = column[k];
                column[k] = ((k as f64).sqrt() * prev - bc * cur) * s;
                prev = cur;
            }
        }
        if cm != Complex64::new(0.0, 0.0) {
            for k in 0..k_max {
                phi[k] += cm * column[k];
            }
        }
    }
    let mut w = 0.0;
    for (k, v) in phi.iter().enumerate() {
        let p = v.norm_sqr();
        if k % 2 == 0 {
            w += p;
        } else {
            w -= p;
        }
    }
    w / PI
}

/// Wigner function of a cat state on the grid. Each axis must reach at least
/// `sqrt(2) |Upsilon| + 4` on both sides of the origin.
pub fn wigner(state: &CatState, x_axis: AxisSpec, y_axis: AxisSpec) -> Result<WignerGrid> {
    let reach = SQRT_2 * state.upsilon.norm() + 4.0;
    for a in [&x_axis, &y_axis] {
        a.validate()?;
        if a.min > -reach || a.max < reach {
            return Err(Error::InvalidParameter(format!(
                "grid [{}, {}] must cover [-{reach}, {reach}]",
                a.min, a.max
            )));
        }
    }
    Ok(wigner_unchecked(&state.amplitudes, x_axis, y_axis))
}

/// Wigner grid without the coverage requirement.
pub fn wigner_unchecked(amplitudes: &[Complex64], x_axis: AxisSpec, y_axis: AxisSpec) -> WignerGrid {
    let x = x_axis.values();
    let y = y_axis.values();
    let rows: Vec<Vec<f64>> = y
        .par_iter()
        .map(|&yy| x.iter().map(|&xx| wigner_point(amplitudes, xx, yy)).collect())
        .collect();
    WignerGrid { values: rows.concat(), x, y }
}
