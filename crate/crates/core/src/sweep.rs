//! Point evaluators and the parallel sweep driver.
//!
//! Every point is evaluated independently; rows come back in index order, so
//! the table does not depend on the worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catstate::{classify, regime::nearest_rational, RegimeCell, RegimeSettings};
use crate::config::{Axis, ParamsConfig, PointConfig, Quantity, RunConfig, Tolerances, Variable};
use crate::correlations::{g2_zero, DriveConfig, QuadratureConfig};
use crate::error::{Error, Result};
use crate::spectrum::{critical_point, diagonalize, kerr_strength, KerrOptions, NormalModeDecay, PolaronFrame};

/// Per-point outcome written to the `status` column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Unstable,
    Divergent,
    NotConverged,
    NonStroboscopic,
    Failed,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Unstable => "unstable",
            Status::Divergent => "divergent",
            Status::NotConverged => "not_converged",
            Status::NonStroboscopic => "non_stroboscopic",
            Status::Failed => "failed",
        }
    }

    /// Points that produced no usable number.
    pub fn is_failure(&self) -> bool {
        matches!(self, Status::Failed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub values: Vec<f64>,
    pub status: Status,
    pub message: Option<String>,
}

/// Numeric coordinates of one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub g: f64,
    pub delta_c: f64,
    pub kappa_minus: f64,
    pub kappa_plus: f64,
    pub delta_a: Option<f64>,
    pub epsilon_a: f64,
}

impl Point {
    pub fn from_config(p: &PointConfig) -> Self {
        Self {
            g: p.g,
            delta_c: p.delta_c,
            kappa_minus: p.kappa_minus,
            kappa_plus: p.kappa_plus,
            delta_a: p.delta_a,
            epsilon_a: p.epsilon_a,
        }
    }

    fn set(&mut self, var: Variable, v: f64) {
        match var {
            Variable::G | Variable::GGap => self.g = v,
            Variable::DeltaC => self.delta_c = v,
            Variable::KappaMinus => self.kappa_minus = v,
            Variable::KappaPlus => self.kappa_plus = v,
            Variable::DeltaA => self.delta_a = Some(v),
            Variable::EpsilonA => self.epsilon_a = v,
        }
    }
}

/// Shared, read-only inputs of every evaluation.
#[derive(Debug, Clone, Copy)]
pub struct Context {
    pub params: ParamsConfig,
    pub point: PointConfig,
    pub tolerances: Tolerances,
}

impl Context {
    pub fn from_config(cfg: &RunConfig) -> Self {
        Self { params: cfg.params, point: cfg.point, tolerances: cfg.tolerances }
    }

    pub fn quadrature(&self) -> QuadratureConfig {
        QuadratureConfig {
            rel_tol: self.tolerances.rel_tol,
            decay_lengths: self.tolerances.decay_lengths,
            max_cells: self.tolerances.max_cells,
            ..QuadratureConfig::default()
        }
    }

    pub fn frame(&self, p: &Point) -> Result<PolaronFrame> {
        let modes = diagonalize(p.g, p.delta_c, 1.0, self.params.g_a)?;
        kerr_strength(
            &modes,
            p.g,
            p.delta_c,
            1.0,
            self.params.g_a,
            NormalModeDecay { kappa_minus: p.kappa_minus, kappa_plus: p.kappa_plus },
            KerrOptions { divergence_floor: self.tolerances.divergence_floor },
        )
    }

    pub fn drive(&self, p: &Point, eta: f64) -> DriveConfig {
        DriveConfig { delta_a: p.delta_a.unwrap_or(eta), epsilon_a: p.epsilon_a, kappa_a: self.params.kappa_a }
    }

    pub fn regime(&self) -> RegimeSettings {
        RegimeSettings {
            g_a: self.params.g_a,
            period_index: self.point.period_index,
            q_max: self.point.q_max,
            divergence_floor: self.tolerances.divergence_floor,
            ..RegimeSettings::default()
        }
    }
}

pub fn columns(q: Quantity) -> &'static [&'static str] {
    match q {
        Quantity::Spectrum => &["G", "Delta_c", "omega_minus", "omega_plus", "eta", "stable"],
        Quantity::Kerr => &[
            "G",
            "Delta_c",
            "omega_minus",
            "omega_plus",
            "eta",
            "stable",
            "zeta_minus",
            "zeta_plus",
            "eta_over_kappa_a",
            "sum_rule_residual",
        ],
        Quantity::G2 => &[
            "G",
            "G_gap",
            "Delta_c",
            "kappa_minus",
            "kappa_plus",
            "Delta_a",
            "epsilon_a",
            "eta",
            "zeta_minus",
            "g2",
            "error_bound",
            "mean_photon_number",
        ],
        Quantity::Cat => &["G", "Delta_c", "count", "phase_fraction"],
    }
}

/// Variables that change the given quantity.
pub fn accepts(q: Quantity, v: Variable) -> bool {
    match q {
        Quantity::G2 => true,
        _ => matches!(v, Variable::G | Variable::GGap | Variable::DeltaC),
    }
}

fn status_of(e: &Error) -> Status {
    match e {
        Error::BeyondCriticalPoint { .. } => Status::Unstable,
        Error::CriticalDivergence { .. } => Status::Divergent,
        Error::QuadratureNotConverged(_) => Status::NotConverged,
        Error::NonStroboscopicPhase { .. } => Status::NonStroboscopic,
        _ => Status::Failed,
    }
}

fn flagged(values: Vec<f64>, e: &Error) -> Row {
    Row { values, status: status_of(e), message: Some(e.to_string()) }
}

pub fn evaluate(q: Quantity, p: &Point, ctx: &Context) -> Row {
    match q {
        Quantity::Spectrum => spectrum_row(p, ctx),
        Quantity::Kerr => kerr_row(p, ctx),
        Quantity::G2 => g2_row(p, ctx),
        Quantity::Cat => cat_row(p, ctx),
    }
}

fn spectrum_row(p: &Point, ctx: &Context) -> Row {
    match diagonalize(p.g, p.delta_c, 1.0, ctx.params.g_a) {
        Ok(m) => {
            let gap = 1.0 - 4.0 * p.g * p.g / p.delta_c;
            let eta = if m.stable { ctx.params.g_a * ctx.params.g_a / gap } else { f64::NAN };
            Row {
                values: vec![p.g, p.delta_c, m.omega_minus, m.omega_plus, eta, f64::from(u8::from(m.stable))],
                status: if m.stable { Status::Ok } else { Status::Unstable },
                message: None,
            }
        }
        Err(e) => flagged(vec![p.g, p.delta_c, f64::NAN, f64::NAN, f64::NAN, 0.0], &e),
    }
}

fn kerr_row(p: &Point, ctx: &Context) -> Row {
    let nan = f64::NAN;
    let modes = match diagonalize(p.g, p.delta_c, 1.0, ctx.params.g_a) {
        Ok(m) => m,
        Err(e) => return flagged(vec![p.g, p.delta_c, nan, nan, nan, 0.0, nan, nan, nan, nan], &e),
    };
    let stable = f64::from(u8::from(modes.stable));
    match ctx.frame(p) {
        Ok(f) => Row {
            values: vec![
                p.g,
                p.delta_c,
                f.omega_minus,
                f.omega_plus,
                f.eta,
                stable,
                f.zeta_minus,
                f.zeta_plus,
                f.eta / ctx.params.kappa_a,
                f.sum_rule_residual,
            ],
            status: Status::Ok,
            message: None,
        },
        Err(e) => {
            flagged(vec![p.g, p.delta_c, modes.omega_minus, modes.omega_plus, nan, stable, nan, nan, nan, nan], &e)
        }
    }
}

fn g2_row(p: &Point, ctx: &Context) -> Row {
    let nan = f64::NAN;
    let gap = critical_point(p.delta_c, 1.0).map_or(nan, |g| g - p.g);
    let mut values =
        vec![p.g, gap, p.delta_c, p.kappa_minus, p.kappa_plus, p.delta_a.unwrap_or(nan), p.epsilon_a, nan, nan, nan, nan, nan];
    let frame = match ctx.frame(p) {
        Ok(f) => f,
        Err(e) => return flagged(values, &e),
    };
    let drive = ctx.drive(p, frame.eta);
    values[5] = drive.delta_a;
    values[7] = frame.eta;
    values[8] = frame.zeta_minus;
    let fill = |v: &mut Vec<f64>, est: &crate::correlations::G2Estimate| {
        v[9] = est.g2;
        v[10] = est.error_bound;
        v[11] = est.mean_photon_number;
    };
    match g2_zero(&frame, &drive, &ctx.quadrature()) {
        Ok(est) => {
            fill(&mut values, &est);
            Row { values, status: Status::Ok, message: None }
        }
        Err(Error::QuadratureNotConverged(est)) => {
            fill(&mut values, &est);
            let e = Error::QuadratureNotConverged(est);
            flagged(values, &e)
        }
        Err(e) => flagged(values, &e),
    }
}

fn cat_row(p: &Point, ctx: &Context) -> Row {
    let nan = f64::NAN;
    let s = ctx.regime();
    let phase = ctx
        .frame(p)
        .map(|f| (s.period_index as f64 * f.eta / f.omega_minus).rem_euclid(1.0))
        .unwrap_or(nan);
    match classify(p.g, p.delta_c, &s) {
        Ok(cell) => {
            let status = match cell {
                RegimeCell::Components(_) => Status::Ok,
                RegimeCell::NonStroboscopic => Status::NonStroboscopic,
                RegimeCell::Unstable => Status::Unstable,
                RegimeCell::Divergent => Status::Divergent,
            };
            Row { values: vec![p.g, p.delta_c, cell.code() as f64, phase], status, message: None }
        }
        Err(e) => flagged(vec![p.g, p.delta_c, nan, phase], &e),
    }
}

/// Index-ordered points of a one- or two-axis grid. The first axis varies
/// fastest; `G_gap` is converted to `G` once `Delta_c` is known.
pub fn grid(base: &Point, axes: &[Axis]) -> Result<Vec<Point>> {
    let values: Vec<Vec<f64>> = axes.iter().map(Axis::values).collect();
    let n0 = values[0].len();
    let n1 = values.get(1).map_or(1, Vec::len);
    let mut out = Vec::with_capacity(n0 * n1);
    for i1 in 0..n1 {
        for i0 in 0..n0 {
            let mut p = *base;
            let mut gap = None;
            for (a, (axis, v)) in axes.iter().zip(&values).enumerate() {
                let x = v[if a == 0 { i0 } else { i1 }];
                if axis.var == Variable::GGap {
                    gap = Some(x);
                } else {
                    p.set(axis.var, x);
                }
            }
            if let Some(gap) = gap {
                p.g = critical_point(p.delta_c, 1.0)? - gap;
            }
            out.push(p);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct SweepTable {
    pub quantity: Quantity,
    pub axes: Vec<Axis>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Row>,
}

impl SweepTable {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.status.is_failure()).count()
    }

    pub fn flagged(&self) -> usize {
        self.rows.iter().filter(|r| r.status != Status::Ok).count()
    }

    /// Column that the heatmap of a two-axis sweep shows.
    pub fn heatmap_column(&self) -> &'static str {
        match self.quantity {
            Quantity::Spectrum => "omega_minus",
            Quantity::Kerr => "eta",
            Quantity::G2 => "g2",
            Quantity::Cat => "count",
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| r.values[i]).collect())
    }
}

/// Evaluates the configured sweep on a pool of `cfg.workers` threads.
pub fn run_sweep(cfg: &RunConfig) -> Result<SweepTable> {
    let sweep = cfg.sweep.as_ref().ok_or_else(|| Error::Config("no [sweep] table".into()))?;
    for a in &sweep.axis {
        if !accepts(sweep.quantity, a.var) {
            return Err(Error::Config(format!(
                "{} does not affect a {:?} sweep",
                a.var.name(),
                sweep.quantity
            )));
        }
    }
    let ctx = Context::from_config(cfg);
    let points = grid(&Point::from_config(&cfg.point), &sweep.axis)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {} workers: {e}", cfg.workers)))?;
    let rows = pool.install(|| points.par_iter().map(|p| evaluate(sweep.quantity, p, &ctx)).collect());
    Ok(SweepTable { quantity: sweep.quantity, axes: sweep.axis.clone(), columns: columns(sweep.quantity).to_vec(), rows })
}

/// `(p, q)` of the Kerr phase at a point, for reporting.
pub fn phase_rational(fraction: f64, q_max: u32) -> (u32, u32, f64) {
    nearest_rational(fraction, q_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{default_config, Mode, Scale, SweepConfig};

    fn kerr_sweep(workers: usize) -> RunConfig {
        let mut c = default_config(Mode::Sweep);
        c.workers = workers;
        c.sweep = Some(SweepConfig {
            quantity: Quantity::Kerr,
            axis: vec![Axis { var: Variable::G, from: 0.0, to: 0.6, steps: 31, scale: Scale::Linear }],
        });
        c
    }

    #[test]
    fn rows_flag_unstable_points() {
        let t = run_sweep(&kerr_sweep(2)).unwrap();
        assert_eq!(t.rows.len(), 31);
        assert_eq!(t.rows[0].status, Status::Ok);
        assert_eq!(t.rows[30].status, Status::Unstable);
        assert_eq!(t.failures(), 0);
        let eta = t.column("eta").unwrap();
        let ok: Vec<f64> = eta.into_iter().filter(|x| x.is_finite()).collect();
        assert!(ok.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn gap_axis_lands_below_critical_point() {
        let base = Point::from_config(&PointConfig::default());
        let axes = [
            Axis { var: Variable::GGap, from: 1e-4, to: 1e-2, steps: 3, scale: Scale::Log },
            Axis { var: Variable::DeltaC, from: 1.0, to: 2.0, steps: 2, scale: Scale::Linear },
        ];
        let pts = grid(&base, &axes).unwrap();
        assert_eq!(pts.len(), 6);
        assert!((critical_point(2.0, 1.0).unwrap() - pts[3].g - 1e-4).abs() < 1e-15);
        assert_eq!(pts[4].delta_c, 2.0);
    }

    #[test]
    fn worker_count_does_not_change_rows() {
        let a = run_sweep(&kerr_sweep(1)).unwrap();
        let b = run_sweep(&kerr_sweep(3)).unwrap();
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert_eq!(x.status, y.status);
            for (u, v) in x.values.iter().zip(&y.values) {
                assert_eq!(u.to_bits(), v.to_bits());
            }
        }
    }

    #[test]
    fn foreign_variable_rejected() {
        let mut c = kerr_sweep(1);
        c.sweep.as_mut().unwrap().axis[0].var = Variable::EpsilonA;
        assert!(run_sweep(&c).is_err());
    }
}
