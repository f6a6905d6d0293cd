//! Artifact formatting: provenance headers, CSV tables, gridded maps, SVG
//! heatmaps and JSON envelopes.

use std::fmt::Write as _;

use serde::Serialize;

use crate::config::{RunConfig, PROVENANCE_PREFIX};
use crate::error::{Error, Result};
use crate::sweep::SweepTable;

pub const GENERATOR: &str = concat!("optokerr ", env!("CARGO_PKG_VERSION"));

/// Shortest round-trip decimal form; `NaN` for missing values.
pub fn num(x: f64) -> String {
    format!("{x}")
}

/// First header line followed by the resolved configuration.
pub fn header(cfg: &RunConfig, timestamp: &str) -> String {
    format!("{PROVENANCE_PREFIX}{GENERATOR} generated {timestamp}\n{}", cfg.provenance())
}

pub fn csv(cfg: &RunConfig, timestamp: &str, columns: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header(cfg, timestamp);
    out.push_str(&columns.join(","));
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

pub fn sweep_csv(cfg: &RunConfig, timestamp: &str, table: &SweepTable) -> String {
    let mut cols = table.columns.clone();
    cols.push("status");
    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| r.values.iter().map(|v| num(*v)).chain([r.status.as_str().to_string()]).collect())
        .collect();
    csv(cfg, timestamp, &cols, &rows)
}

/// Matrix layout: first row holds the x values after a corner label, every
/// following row starts with its y value. `values[iy * x.len() + ix]`.
pub fn grid_csv(cfg: &RunConfig, timestamp: &str, names: (&str, &str), x: &[f64], y: &[f64], values: &[f64]) -> String {
    let mut out = header(cfg, timestamp);
    let _ = write!(out, "{}\\{}", names.1, names.0);
    for v in x {
        let _ = write!(out, ",{}", num(*v));
    }
    out.push('\n');
    for (iy, yv) in y.iter().enumerate() {
        out.push_str(&num(*yv));
        for v in &values[iy * x.len()..(iy + 1) * x.len()] {
            let _ = write!(out, ",{}", num(*v));
        }
        out.push('\n');
    }
    out
}

/// Matrix form of a two-axis sweep column.
pub fn sweep_grid(table: &SweepTable, column: &str) -> Option<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    if table.axes.len() != 2 {
        return None;
    }
    Some((table.axes[0].values(), table.axes[1].values(), table.column(column)?))
}

const PALETTE: [(f64, f64, f64); 5] = [
    (68.0, 1.0, 84.0),
    (59.0, 82.0, 139.0),
    (33.0, 145.0, 140.0),
    (94.0, 201.0, 98.0),
    (253.0, 231.0, 37.0),
];

fn color(t: f64) -> String {
    if !t.is_finite() {
        return "#bbbbbb".into();
    }
    let s = t.clamp(0.0, 1.0) * (PALETTE.len() - 1) as f64;
    let i = (s.floor() as usize).min(PALETTE.len() - 2);
    let f = s - i as f64;
    let (a, b) = (PALETTE[i], PALETTE[i + 1]);
    let mix = |x: f64, y: f64| (x + f * (y - x)).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

fn short(x: f64) -> String {
    format!("{x:.4e}")
}

/// Self-contained raster heatmap; non-finite cells are grey.
pub fn svg_heatmap(title: &str, names: (&str, &str), x: &[f64], y: &[f64], values: &[f64]) -> String {
    let (nx, ny) = (x.len(), y.len());
    let cell = (480.0 / nx.max(ny) as f64).clamp(1.0, 24.0);
    let (w, h) = (cell * nx as f64, cell * ny as f64);
    let (left, top) = (90.0, 40.0);
    let finite = values.iter().copied().filter(|v| v.is_finite());
    let lo = finite.clone().fold(f64::INFINITY, f64::min);
    let hi = finite.fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let total_w = left + w + 110.0;
    let total_h = top + h + 60.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total_w}" height="{total_h}" viewBox="0 0 {total_w} {total_h}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<text x="{left}" y="20" font-size="13">{}</text>"#, escape(title));
    let _ = writeln!(s, r#"<g shape-rendering="crispEdges">"#);
    for iy in 0..ny {
        for ix in 0..nx {
            let v = values[iy * nx + ix];
            let px = left + ix as f64 * cell;
            // Larger y values are drawn higher.
            let py = top + (ny - 1 - iy) as f64 * cell;
            let _ = writeln!(
                s,
                r#"<rect x="{px}" y="{py}" width="{cell}" height="{cell}" fill="{}"/>"#,
                color((v - lo) / span)
            );
        }
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<rect x="{left}" y="{top}" width="{w}" height="{h}" fill="none" stroke="black"/>"#);
    let _ = writeln!(s, r#"<text x="{left}" y="{}">{}</text>"#, top + h + 16.0, short(x[0]));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, left + w, top + h + 16.0, short(x[nx - 1]));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, left + w / 2.0, top + h + 34.0, escape(names.0));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, left - 4.0, top + h, short(y[0]));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, left - 4.0, top + 10.0, short(y[ny - 1]));
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" transform="rotate(-90 {} {})">{}</text>"#,
        left - 60.0,
        top + h / 2.0,
        left - 60.0,
        top + h / 2.0,
        escape(names.1)
    );
    let bar_x = left + w + 20.0;
    let steps = 32;
    for k in 0..steps {
        let t = 1.0 - k as f64 / (steps - 1) as f64;
        let by = top + h * k as f64 / steps as f64;
        let _ = writeln!(s, r#"<rect x="{bar_x}" y="{by}" width="14" height="{}" fill="{}"/>"#, h / steps as f64 + 0.5, color(t));
    }
    if lo.is_finite() {
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, bar_x + 18.0, top + 10.0, short(hi));
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, bar_x + 18.0, top + h, short(lo));
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    generator: &'a str,
    generated: &'a str,
    config: String,
    result: &'a T,
}

/// JSON document carrying the resolved configuration next to the result.
pub fn json<T: Serialize>(cfg: &RunConfig, timestamp: &str, result: &T) -> Result<String> {
    let env = Envelope { generator: GENERATOR, generated: timestamp, config: cfg.to_toml(), result };
    serde_json::to_string_pretty(&env).map(|s| s + "\n").map_err(|e| Error::Config(e.to_string()))
}

/// Configuration recorded in an emitted CSV, SVG-free grid or JSON file.
pub fn provenance_of(text: &str) -> Result<RunConfig> {
    if text.trim_start().starts_with('{') {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let cfg = v["config"].as_str().ok_or_else(|| Error::Config("no `config` field".into()))?;
        return RunConfig::load(cfg, &[]);
    }
    RunConfig::from_provenance(text)
}

/// Drops the generator line, which is the only line that differs between
/// reruns.
pub fn strip_timestamp(text: &str) -> &str {
    text.split_once('\n').map_or("", |(_, rest)| rest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{default_config, Mode};

    #[test]
    fn csv_round_trips_config() {
        let mut cfg = default_config(Mode::Kerr);
        cfg.point.g = 0.25;
        let text = csv(&cfg, "t0", &["a", "b"], &[vec![num(1.5), num(f64::NAN)]]);
        assert!(text.starts_with("# optokerr "));
        assert!(text.ends_with("a,b\n1.5,NaN\n"));
        assert_eq!(provenance_of(&text).unwrap(), cfg);
        let j = json(&cfg, "t0", &vec![1, 2]).unwrap();
        assert_eq!(provenance_of(&j).unwrap(), cfg);
    }

    #[test]
    fn grid_layout() {
        let cfg = default_config(Mode::Wigner);
        let text = grid_csv(&cfg, "t", ("x", "y"), &[0.0, 1.0], &[5.0], &[1.0, 2.0]);
        let body = strip_timestamp(&text);
        assert!(body.ends_with("y\\x,0,1\n5,1,2\n"));
    }

    #[test]
    fn heatmap_is_well_formed() {
        let svg = svg_heatmap("t", ("x", "y"), &[0.0, 1.0, 2.0], &[0.0, 1.0], &[0.0, 1.0, f64::NAN, 3.0, 4.0, 5.0]);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<rect").count(), 6 + 1 + 32);
        assert!(svg.contains("#bbbbbb"));
    }
}
