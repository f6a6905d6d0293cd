//! Executes a [`RunConfig`]: evaluates the requested mode, renders the
//! artifacts and writes them as `<mode>_<timestamp>.<ext>`.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;

use crate::catstate::{decompose_cat, evolve_cat, stroboscopic_time, validity_margin, wigner, AxisSpec, CatState};
use crate::catstate::state::fidelity_with_fast_mode;
use crate::config::{Mode, Quantity, RunConfig};
use crate::correlations::g2_zero;
use crate::error::{Error, Result};
use crate::model::{linearize_with, LinearizeOptions};
use crate::oracle::{validate, ValidationSettings};
use crate::report::{self, num};
use crate::spectrum::{critical_detuning, critical_point, kerr_threshold_coupling, kerr_threshold_detuning};
use crate::sweep::{self, Context, Point, Row, Status, SweepTable};
use crate::{Complex64, PolaronFrame};

/// Timestamps of one run: `header` goes into the first line of every file,
/// `file` into the file names.
#[derive(Debug, Clone)]
pub struct Stamp {
    pub header: String,
    pub file: String,
}

impl Stamp {
    pub fn now() -> Self {
        let t = chrono::Utc::now();
        Self { header: t.to_rfc3339_opts(chrono::SecondsFormat::Secs, true), file: t.format("%Y%m%dT%H%M%SZ").to_string() }
    }
}

#[derive(Debug, Clone)]
pub struct Artifact {
    /// Suffix after `<mode>_<timestamp>`, including the extension.
    pub suffix: String,
    pub contents: String,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub mode: Mode,
    pub exit_code: i32,
    pub summary: Vec<String>,
    pub artifacts: Vec<Artifact>,
    pub written: Vec<PathBuf>,
}

fn artifact(suffix: &str, contents: String) -> Artifact {
    Artifact { suffix: suffix.to_string(), contents }
}

/// 0 when every point is fine, 2 when none is, 3 otherwise.
pub fn exit_code(rows: &[Row]) -> i32 {
    let ok = rows.iter().filter(|r| r.status == Status::Ok).count();
    if ok == rows.len() {
        0
    } else if ok == 0 {
        2
    } else {
        3
    }
}

/// Evaluates and renders without touching the file system.
pub fn render(cfg: &RunConfig, stamp: &Stamp) -> Result<Outcome> {
    cfg.validate()?;
    let ts = stamp.header.as_str();
    let ctx = Context::from_config(cfg);
    let pt = Point::from_config(&cfg.point);
    let mut summary = Vec::new();
    let mut artifacts = Vec::new();
    let exit = match cfg.mode {
        Mode::Critical => {
            let g_cp = critical_point(pt.delta_c, 1.0)?;
            let d_cp = critical_detuning(pt.g, 1.0)?;
            summary.push(format!("G_cp = {g_cp:.7} (Delta_c = {})", pt.delta_c));
            summary.push(format!("Delta_cp = {d_cp:.7} (G = {})", pt.g));
            let rows = vec![vec![num(pt.delta_c), num(g_cp), num(pt.g), num(d_cp)]];
            artifacts.push(artifact(".csv", report::csv(cfg, ts, &["Delta_c", "G_cp", "G", "Delta_cp"], &rows)));
            0
        }
        Mode::Spectrum | Mode::Kerr => {
            let q = if cfg.mode == Mode::Spectrum { Quantity::Spectrum } else { Quantity::Kerr };
            let table = single(q, &pt, &ctx);
            describe_row(&table, &mut summary);
            if q == Quantity::Kerr {
                let k = cfg.params.kappa_a;
                if let (Ok(g_th), Ok(g_cp)) = (kerr_threshold_coupling(k, pt.delta_c, 1.0, cfg.params.g_a), critical_point(pt.delta_c, 1.0)) {
                    summary.push(format!("eta > kappa_a for G in ({g_th}, {g_cp}), width {}", g_cp - g_th));
                }
                if let (Ok(d_th), Ok(d_cp)) = (kerr_threshold_detuning(k, pt.g, 1.0, cfg.params.g_a), critical_detuning(pt.g, 1.0)) {
                    summary.push(format!("eta > kappa_a for Delta_c in ({d_cp}, {d_th}), width {}", d_th - d_cp));
                }
            }
            artifacts.push(artifact(".csv", report::sweep_csv(cfg, ts, &table)));
            exit_code(&table.rows)
        }
        Mode::G2 => {
            let start = Instant::now();
            let table = single(Quantity::G2, &pt, &ctx);
            let wall = start.elapsed().as_secs_f64();
            describe_row(&table, &mut summary);
            summary.push(format!("wallclock = {wall:.3} s"));
            let mut cols = table.columns.clone();
            cols.extend(["wallclock", "status"]);
            let r = &table.rows[0];
            let row: Vec<String> =
                r.values.iter().map(|v| num(*v)).chain([num(wall), r.status.as_str().to_string()]).collect();
            artifacts.push(artifact(".csv", report::csv(cfg, ts, &cols, &[row])));
            exit_code(&table.rows)
        }
        Mode::Cat | Mode::Wigner => {
            let (state, frame) = cat_state(cfg, &ctx, &pt)?;
            if cfg.mode == Mode::Cat {
                let s = cat_summary(cfg, &state, frame.as_ref())?;
                summary.push(format!(
                    "theta_K = {} rad ({}/{} of 2 pi), {} components, residual {:e}, reconstruction error {:e}",
                    state.theta_k,
                    s.p,
                    s.q,
                    s.components.len(),
                    s.residual,
                    s.reconstruction_error
                ));
                if let Some(m) = s.validity_margin {
                    summary.push(format!("kappa_max t_n = {m}"));
                }
                let rows: Vec<Vec<String>> = s
                    .components
                    .iter()
                    .map(|c| vec![num(c.phase), num(c.weight.re), num(c.weight.im), num(c.weight.norm())])
                    .collect();
                artifacts.push(artifact(".csv", report::csv(cfg, ts, &["phase", "weight_re", "weight_im", "weight_abs"], &rows)));
                artifacts.push(artifact(".json", report::json(cfg, ts, &s)?));
            } else {
                let axis = AxisSpec::symmetric(cfg.point.wigner_half_width, cfg.point.wigner_points);
                let w = wigner(&state, axis, axis)?;
                summary.push(format!("integral = {}, min W = {}", w.integral(), w.min()));
                artifacts.push(artifact(".csv", report::grid_csv(cfg, ts, ("x", "y"), &w.x, &w.y, &w.values)));
                let title = format!("W(x, y), theta_K = {:.6} rad", state.theta_k);
                artifacts.push(artifact(".svg", report::svg_heatmap(&title, ("x", "y"), &w.x, &w.y, &w.values)));
            }
            0
        }
        Mode::Sweep => {
            let table = sweep::run_sweep(cfg)?;
            summary.push(format!(
                "{} points, {} flagged, {} failed",
                table.rows.len(),
                table.flagged(),
                table.failures()
            ));
            artifacts.push(artifact(".csv", report::sweep_csv(cfg, ts, &table)));
            let col = table.heatmap_column();
            if let Some((x, y, v)) = report::sweep_grid(&table, col) {
                let names = (table.axes[0].var.name(), table.axes[1].var.name());
                artifacts.push(artifact("_grid.csv", report::grid_csv(cfg, ts, names, &x, &y, &v)));
                let (title, shown) = if table.quantity == Quantity::Kerr {
                    ("log10 eta".to_string(), v.iter().map(|e| e.log10()).collect())
                } else {
                    (col.to_string(), v)
                };
                artifacts.push(artifact(".svg", report::svg_heatmap(&title, names, &x, &y, &shown)));
            }
            exit_code(&table.rows)
        }
        Mode::Oracle => {
            let rep = validate(&ValidationSettings::default());
            for c in &rep.checks {
                summary.push(format!(
                    "{} {}: oracle {:e}, analytic {:e}, deviation {:e} (tolerance {:e})",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.oracle,
                    c.analytic,
                    c.deviation,
                    c.tolerance
                ));
            }
            artifacts.push(artifact(".json", report::json(cfg, ts, &rep)?));
            if rep.passed {
                0
            } else {
                2
            }
        }
        Mode::Linearize => {
            let opts = LinearizeOptions { tol: cfg.tolerances.linearize_tol, ..LinearizeOptions::default() };
            let lin = linearize_with(&cfg.params.system(), &opts)?;
            let mut rec = lin.record();
            rec.push(("residual", lin.residual));
            rec.push(("iterations", lin.iterations as f64));
            rec.push(("real_roots", lin.real_roots.len() as f64));
            summary.push(rec.iter().map(|(k, v)| format!("{k} = {v}")).collect::<Vec<_>>().join(", "));
            let cols: Vec<&str> = rec.iter().map(|(k, _)| *k).collect();
            let row: Vec<String> = rec.iter().map(|(_, v)| num(*v)).collect();
            artifacts.push(artifact(".csv", report::csv(cfg, ts, &cols, &[row])));
            0
        }
    };
    Ok(Outcome { mode: cfg.mode, exit_code: exit, summary, artifacts, written: Vec::new() })
}

fn single(q: Quantity, p: &Point, ctx: &Context) -> SweepTable {
    SweepTable { quantity: q, axes: Vec::new(), columns: sweep::columns(q).to_vec(), rows: vec![sweep::evaluate(q, p, ctx)] }
}

fn describe_row(t: &SweepTable, out: &mut Vec<String>) {
    let r = &t.rows[0];
    let body: Vec<String> = t.columns.iter().zip(&r.values).map(|(c, v)| format!("{c} = {v}")).collect();
    out.push(format!("{} [{}]", body.join(", "), r.status.as_str()));
    if let Some(m) = &r.message {
        out.push(m.clone());
    }
}

fn cat_state(cfg: &RunConfig, ctx: &Context, pt: &Point) -> Result<(CatState, Option<PolaronFrame>)> {
    let n = cfg.point.period_index;
    let frame = ctx.frame(pt);
    let ratio = match cfg.point.phase_fraction {
        Some(f) => f / n as f64,
        None => {
            let f = frame.as_ref().map_err(clone_err)?;
            f.eta / f.omega_minus
        }
    };
    let state = evolve_cat(Complex64::new(cfg.point.upsilon, 0.0), ratio, n, cfg.point.truncation)?;
    Ok((state, frame.ok()))
}

fn clone_err(e: &Error) -> Error {
    match e {
        Error::BeyondCriticalPoint { g, g_cp } => Error::BeyondCriticalPoint { g: *g, g_cp: *g_cp },
        Error::CriticalDivergence { gap, eta } => Error::CriticalDivergence { gap: *gap, eta: *eta },
        other => Error::InvalidParameter(other.to_string()),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CatSummary {
    pub theta_k: f64,
    pub phase_fraction: f64,
    pub p: u32,
    pub q: u32,
    pub components: Vec<crate::catstate::CatComponent>,
    pub residual: f64,
    pub reconstruction_error: f64,
    pub truncation_loss: f64,
    /// `kappa_max t_n`, absent when the phase was given directly.
    pub validity_margin: Option<f64>,
    /// Overlap with the state that keeps the fast-mode displacement.
    pub fast_mode_fidelity: Option<f64>,
}

pub fn cat_summary(cfg: &RunConfig, state: &CatState, frame: Option<&PolaronFrame>) -> Result<CatSummary> {
    let d = decompose_cat(state, cfg.point.q_max)?;
    let r = d.reconstruct(state.upsilon, state.dimension());
    let err = r.iter().zip(&state.amplitudes).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    let n = state.period_index;
    let (margin, fidelity) = match (frame, cfg.point.phase_fraction) {
        (Some(f), None) => {
            let t = stroboscopic_time(n, f.omega_minus);
            let cycles = n as f64 * f.omega_plus / f.omega_minus;
            (Some(validity_margin(t, &[f.kappa_minus, f.kappa_plus])), Some(fidelity_with_fast_mode(state, f.zeta_plus, cycles)))
        }
        _ => (None, None),
    };
    Ok(CatSummary {
        theta_k: state.theta_k,
        phase_fraction: state.phase_fraction,
        p: d.p,
        q: d.q,
        components: d.components,
        residual: d.residual,
        reconstruction_error: err,
        truncation_loss: state.truncation_loss,
        validity_margin: margin,
        fast_mode_fidelity: fidelity,
    })
}

/// Renders and writes the artifacts into `cfg.out_dir`. An existing file
/// name gets a numeric suffix rather than being overwritten.
pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    run_with(cfg, &Stamp::now())
}

pub fn run_with(cfg: &RunConfig, stamp: &Stamp) -> Result<Outcome> {
    let mut out = render(cfg, stamp)?;
    fs::create_dir_all(&cfg.out_dir)?;
    let base = format!("{}_{}", cfg.mode.name(), stamp.file);
    let mut stem = base.clone();
    let mut k = 1;
    while out.artifacts.iter().any(|a| cfg.out_dir.join(format!("{stem}{}", a.suffix)).exists()) {
        stem = format!("{base}_{k}");
        k += 1;
    }
    for a in &out.artifacts {
        let path = cfg.out_dir.join(format!("{stem}{}", a.suffix));
        fs::write(&path, &a.contents)?;
        out.written.push(path);
    }
    Ok(out)
}

/// Quick g2 evaluation for callers that only need the estimate.
pub fn g2_at(cfg: &RunConfig) -> Result<crate::G2Estimate> {
    let ctx = Context::from_config(cfg);
    let pt = Point::from_config(&cfg.point);
    let frame = ctx.frame(&pt)?;
    g2_zero(&frame, &ctx.drive(&pt, frame.eta), &ctx.quadrature())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::default_config;

    fn stamp() -> Stamp {
        Stamp { header: "2000-01-01T00:00:00Z".into(), file: "20000101T000000Z".into() }
    }

    #[test]
    fn critical_prints_reference_value() {
        let out = render(&default_config(Mode::Critical), &stamp()).unwrap();
        assert_eq!(out.exit_code, 0);
        assert!(out.summary[0].starts_with("G_cp = 0.5592406"), "{}", out.summary[0]);
    }

    #[test]
    fn unstable_point_is_flagged() {
        let mut c = default_config(Mode::Kerr);
        c.point.g = 0.7;
        let out = render(&c, &stamp()).unwrap();
        assert_eq!(out.exit_code, 2);
        assert!(out.artifacts[0].contents.trim_end().ends_with(",unstable"));
    }

    #[test]
    fn cat_and_wigner_at_given_phase() {
        let mut c = default_config(Mode::Cat);
        c.point.phase_fraction = Some(0.25);
        let out = render(&c, &stamp()).unwrap();
        assert_eq!(out.exit_code, 0);
        assert_eq!(out.artifacts.len(), 2);
        c.mode = Mode::Wigner;
        c.point.wigner_points = 21;
        let out = render(&c, &stamp()).unwrap();
        assert!(out.artifacts[1].contents.starts_with("<svg"));
    }

    #[test]
    fn files_are_not_overwritten() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = default_config(Mode::Critical);
        c.out_dir = dir.path().to_path_buf();
        let a = run_with(&c, &stamp()).unwrap();
        let b = run_with(&c, &stamp()).unwrap();
        assert_ne!(a.written[0], b.written[0]);
        assert!(a.written[0].file_name().unwrap().to_str().unwrap().starts_with("critical_20000101T000000Z"));
    }

    #[test]
    fn linearize_reports_reference_drive() {
        let out = render(&default_config(Mode::Linearize), &stamp()).unwrap();
        assert_eq!(out.exit_code, 0);
        assert!(out.summary[0].contains("G = "));
    }
}
