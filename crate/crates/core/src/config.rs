//! Run configuration: TOML schema, frequency units and provenance round trip.
//!
//! Frequencies are given either as bare numbers in units of `omega_b`, as
//! `"<value>wb"`, or as `"<value>Hz"`, `"kHz"`, `"MHz"`, `"GHz"` (meaning
//! `frequency / 2 pi`), converted with `frequency_scale = omega_b / 2 pi`.
//! Unknown keys are rejected. The resolved configuration is written back as
//! plain TOML with every frequency as a number, so it parses to itself.

use std::collections::BTreeSet;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::model::SystemParams;

/// Prefix of the provenance lines in emitted files.
pub const PROVENANCE_PREFIX: &str = "# ";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Spectrum,
    Critical,
    Kerr,
    G2,
    Cat,
    Wigner,
    Sweep,
    Oracle,
    Linearize,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Spectrum => "spectrum",
            Mode::Critical => "critical",
            Mode::Kerr => "kerr",
            Mode::G2 => "g2",
            Mode::Cat => "cat",
            Mode::Wigner => "wigner",
            Mode::Sweep => "sweep",
            Mode::Oracle => "oracle",
            Mode::Linearize => "linearize",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Linear,
    Log,
}

/// Quantity evaluated at every point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Spectrum,
    Kerr,
    G2,
    Cat,
}

/// Swept variable. `G_gap` is the distance `G_cp(Delta_c) - G` below the
/// critical coupling and is applied after the other axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variable {
    #[serde(rename = "G")]
    G,
    #[serde(rename = "G_gap")]
    GGap,
    #[serde(rename = "Delta_c")]
    DeltaC,
    #[serde(rename = "kappa_minus")]
    KappaMinus,
    #[serde(rename = "kappa_plus")]
    KappaPlus,
    #[serde(rename = "Delta_a")]
    DeltaA,
    #[serde(rename = "epsilon_a")]
    EpsilonA,
}

impl Variable {
    pub fn name(&self) -> &'static str {
        match self {
            Variable::G => "G",
            Variable::GGap => "G_gap",
            Variable::DeltaC => "Delta_c",
            Variable::KappaMinus => "kappa_minus",
            Variable::KappaPlus => "kappa_plus",
            Variable::DeltaA => "Delta_a",
            Variable::EpsilonA => "epsilon_a",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Value::String(s.to_string())
            .try_into()
            .map_err(|_| Error::Config(format!("unknown sweep variable `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub var: Variable,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    #[serde(default = "linear")]
    pub scale: Scale,
}

fn one() -> usize {
    1
}

fn linear() -> Scale {
    Scale::Linear
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        let n = self.steps;
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                if i == 0 {
                    return self.from;
                }
                if i == n - 1 {
                    return self.to;
                }
                match self.scale {
                    Scale::Linear => self.from + t * (self.to - self.from),
                    Scale::Log => (self.from.ln() + t * (self.to.ln() - self.from.ln())).exp(),
                }
            })
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::Config(format!("axis {}: steps must be at least 2", self.var.name())));
        }
        if !(self.from.is_finite() && self.to.is_finite() && self.from < self.to) {
            return Err(Error::Config(format!(
                "axis {}: need from < to, got {} .. {}",
                self.var.name(),
                self.from,
                self.to
            )));
        }
        if self.scale == Scale::Log && !(self.from > 0.0) {
            return Err(Error::Config(format!("axis {}: log scale needs a positive start", self.var.name())));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub quantity: Quantity,
    pub axis: Vec<Axis>,
}

/// Operating point shared by the single-point modes and used as the base of
/// sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PointConfig {
    #[serde(rename = "G")]
    pub g: f64,
    #[serde(rename = "Delta_c")]
    pub delta_c: f64,
    pub kappa_minus: f64,
    pub kappa_plus: f64,
    /// Probe detuning; the Kerr strength when absent.
    #[serde(rename = "Delta_a", skip_serializing_if = "Option::is_none")]
    pub delta_a: Option<f64>,
    pub epsilon_a: f64,
    pub upsilon: f64,
    pub period_index: u32,
    pub truncation: usize,
    pub q_max: u32,
    /// Kerr phase `theta_K / 2 pi` overriding the value from the working point.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase_fraction: Option<f64>,
    pub wigner_points: usize,
    pub wigner_half_width: f64,
}

impl Default for PointConfig {
    fn default() -> Self {
        Self {
            g: 0.5,
            delta_c: 1.251,
            kappa_minus: 0.05,
            kappa_plus: 0.05,
            delta_a: None,
            epsilon_a: 1e-4,
            upsilon: 2.0,
            period_index: 1,
            truncation: 40,
            q_max: 12,
            phase_fraction: None,
            wigner_points: 101,
            wigner_half_width: 7.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub rel_tol: f64,
    pub decay_lengths: f64,
    pub max_cells: usize,
    pub divergence_floor: f64,
    pub linearize_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let q = crate::correlations::QuadratureConfig::default();
        Self {
            rel_tol: q.rel_tol,
            decay_lengths: q.decay_lengths,
            max_cells: q.max_cells,
            divergence_floor: crate::spectrum::KerrOptions::default().divergence_floor,
            linearize_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    /// `omega_b / 2 pi` in Hz.
    #[serde(rename = "frequency_scale", with = "hz")]
    pub frequency_scale_hz: f64,
    pub out_dir: PathBuf,
    /// Execution setting only; results do not depend on it, so it is left
    /// out of the provenance header.
    #[serde(skip_serializing, default = "one")]
    pub workers: usize,
    pub params: ParamsConfig,
    pub point: PointConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    pub tolerances: Tolerances,
}

/// [`SystemParams`] without `omega_b`, which is the unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsConfig {
    pub omega_a: f64,
    pub omega_c: f64,
    pub g_a: f64,
    pub g_c: f64,
    pub kappa_a: f64,
    pub kappa_c: f64,
    pub kappa_b: f64,
    pub epsilon_c: f64,
    pub omega_ci: f64,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        let p = SystemParams::default();
        Self {
            omega_a: p.omega_a,
            omega_c: p.omega_c,
            g_a: p.g_a,
            g_c: p.g_c,
            kappa_a: p.kappa_a,
            kappa_c: p.kappa_c,
            kappa_b: p.kappa_b,
            epsilon_c: p.epsilon_c,
            omega_ci: p.omega_ci,
        }
    }
}

impl ParamsConfig {
    pub fn system(&self) -> SystemParams {
        SystemParams {
            omega_b: 1.0,
            omega_a: self.omega_a,
            omega_c: self.omega_c,
            g_a: self.g_a,
            g_c: self.g_c,
            kappa_a: self.kappa_a,
            kappa_c: self.kappa_c,
            kappa_b: self.kappa_b,
            epsilon_c: self.epsilon_c,
            omega_ci: self.omega_ci,
        }
    }
}

mod hz {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{v}Hz"))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_hz(&s).map_err(serde::de::Error::custom)
    }
}

pub const DEFAULT_FREQUENCY_SCALE_HZ: f64 = 1e7;

/// Parses `"<value><unit>"` with a Hz-family unit into Hz.
pub fn parse_hz(s: &str) -> Result<f64> {
    let (v, unit) = split_unit(s)?;
    let f = match unit {
        "Hz" => 1.0,
        "kHz" => 1e3,
        "MHz" => 1e6,
        "GHz" => 1e9,
        _ => return Err(Error::Config(format!("`{s}`: frequency scale needs a Hz, kHz, MHz or GHz unit"))),
    };
    let hz = v * f;
    if !(hz.is_finite() && hz > 0.0) {
        return Err(Error::Config(format!("`{s}`: frequency scale must be positive")));
    }
    Ok(hz)
}

fn split_unit(s: &str) -> Result<(f64, &str)> {
    let t = s.trim();
    let idx = t
        .char_indices()
        .find(|&(i, c)| c.is_ascii_alphabetic() && !is_exponent(t, i))
        .map_or(t.len(), |(i, _)| i);
    let (num, unit) = t.split_at(idx);
    let v: f64 = num
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("`{s}` is not a number with an optional unit")))?;
    Ok((v, unit.trim()))
}

/// `e`/`E` followed by a digit or sign belongs to the number.
fn is_exponent(t: &str, i: usize) -> bool {
    let b = t.as_bytes();
    matches!(b[i], b'e' | b'E')
        && i > 0
        && (b[i - 1].is_ascii_digit() || b[i - 1] == b'.')
        && b.get(i + 1).is_some_and(|c| c.is_ascii_digit() || *c == b'-' || *c == b'+')
}

/// Converts a frequency value to `omega_b` units.
pub fn parse_frequency(v: &Value, scale_hz: f64, key: &str) -> Result<f64> {
    match v {
        Value::Float(f) => Ok(*f),
        Value::Integer(i) => Ok(*i as f64),
        Value::String(s) => {
            let (x, unit) = split_unit(s).map_err(|e| Error::Config(format!("{key}: {e}")))?;
            let f = match unit {
                "" | "wb" => 1.0,
                "Hz" => 1.0 / scale_hz,
                "kHz" => 1e3 / scale_hz,
                "MHz" => 1e6 / scale_hz,
                "GHz" => 1e9 / scale_hz,
                _ => return Err(Error::Config(format!("{key}: unknown frequency unit `{unit}` in `{s}`"))),
            };
            Ok(x * f)
        }
        _ => Err(Error::Config(format!("{key}: expected a number or a `<value><unit>` string"))),
    }
}

const TOP_KEYS: &[&str] = &["mode", "frequency_scale", "out_dir", "workers", "params", "point", "sweep", "tolerances"];
const PARAM_KEYS: &[&str] =
    &["omega_a", "omega_c", "g_a", "g_c", "kappa_a", "kappa_c", "kappa_b", "epsilon_c", "omega_ci"];
const POINT_FREQ_KEYS: &[&str] = &["G", "Delta_c", "kappa_minus", "kappa_plus", "Delta_a", "epsilon_a"];
const POINT_KEYS: &[&str] = &[
    "G",
    "Delta_c",
    "kappa_minus",
    "kappa_plus",
    "Delta_a",
    "epsilon_a",
    "upsilon",
    "period_index",
    "truncation",
    "q_max",
    "phase_fraction",
    "wigner_points",
    "wigner_half_width",
];
const TOLERANCE_KEYS: &[&str] = &["rel_tol", "decay_lengths", "max_cells", "divergence_floor", "linearize_tol"];
const SWEEP_KEYS: &[&str] = &["quantity", "axis"];
const AXIS_KEYS: &[&str] = &["var", "from", "to", "steps", "scale"];

fn unknown_keys(t: &Table, known: &[&str], prefix: &str, out: &mut BTreeSet<String>) {
    for k in t.keys() {
        if !known.contains(&k.as_str()) {
            out.insert(format!("{prefix}{k}"));
        }
    }
}

fn sub_table<'a>(t: &'a mut Table, key: &str) -> Result<Option<&'a mut Table>> {
    match t.get_mut(key) {
        None => Ok(None),
        Some(Value::Table(s)) => Ok(Some(s)),
        Some(_) => Err(Error::Config(format!("`{key}` must be a table"))),
    }
}

fn convert_keys(t: &mut Table, keys: &[&str], scale: f64, prefix: &str) -> Result<()> {
    for k in keys {
        if let Some(v) = t.get(*k) {
            let x = parse_frequency(v, scale, &format!("{prefix}{k}"))?;
            t.insert((*k).to_string(), Value::Float(x));
        }
    }
    Ok(())
}

/// Sets `path = value` in a nested table; `value` is parsed as a TOML value
/// and taken as a string when that fails.
pub fn apply_override(t: &mut Table, path: &str, value: &str) -> Result<()> {
    let parsed: Value = toml::from_str::<Table>(&format!("v = {value}"))
        .ok()
        .and_then(|mut x| x.remove("v"))
        .unwrap_or_else(|| Value::String(value.to_string()));
    let parts: Vec<&str> = path.split('.').collect();
    let mut cur = t;
    for p in &parts[..parts.len() - 1] {
        let entry = cur.entry(p.to_string()).or_insert_with(|| Value::Table(Table::new()));
        cur = match entry {
            Value::Table(s) => s,
            _ => return Err(Error::Config(format!("`{path}`: `{p}` is not a table"))),
        };
    }
    cur.insert(parts[parts.len() - 1].to_string(), parsed);
    Ok(())
}

impl RunConfig {
    /// Parses a configuration text with `key.path=value` overrides applied
    /// on top.
    pub fn load(text: &str, overrides: &[(String, String)]) -> Result<Self> {
        let mut t: Table = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        for (k, v) in overrides {
            apply_override(&mut t, k, v)?;
        }
        Self::from_table(t)
    }

    pub fn from_table(mut t: Table) -> Result<Self> {
        let mut unknown = BTreeSet::new();
        unknown_keys(&t, TOP_KEYS, "", &mut unknown);
        for (key, known) in [("params", PARAM_KEYS), ("point", POINT_KEYS), ("tolerances", TOLERANCE_KEYS)] {
            if let Some(s) = sub_table(&mut t, key)? {
                unknown_keys(s, known, &format!("{key}."), &mut unknown);
            }
        }
        if let Some(s) = sub_table(&mut t, "sweep")? {
            unknown_keys(s, SWEEP_KEYS, "sweep.", &mut unknown);
            if let Some(Value::Array(axes)) = s.get("axis") {
                for (i, a) in axes.iter().enumerate() {
                    if let Value::Table(a) = a {
                        unknown_keys(a, AXIS_KEYS, &format!("sweep.axis[{i}]."), &mut unknown);
                    }
                }
            }
        }
        if !unknown.is_empty() {
            let list: Vec<String> = unknown.into_iter().collect();
            return Err(Error::Config(format!("unknown keys: {}", list.join(", "))));
        }

        let scale = match t.get("frequency_scale") {
            None => DEFAULT_FREQUENCY_SCALE_HZ,
            Some(Value::String(s)) => parse_hz(s)?,
            Some(_) => {
                return Err(Error::Config(
                    "frequency_scale must be a string with a Hz, kHz, MHz or GHz unit".into(),
                ))
            }
        };
        t.insert("frequency_scale".into(), Value::String(format!("{scale}Hz")));
        t.entry("out_dir").or_insert_with(|| Value::String(".".into()));
        t.entry("workers").or_insert(Value::Integer(1));
        for key in ["params", "point", "tolerances"] {
            t.entry(key).or_insert_with(|| Value::Table(Table::new()));
        }
        if let Some(s) = sub_table(&mut t, "params")? {
            convert_keys(s, PARAM_KEYS, scale, "params.")?;
        }
        if let Some(s) = sub_table(&mut t, "point")? {
            convert_keys(s, POINT_FREQ_KEYS, scale, "point.")?;
        }
        if let Some(s) = sub_table(&mut t, "sweep")? {
            if let Some(Value::Array(axes)) = s.get_mut("axis") {
                for (i, a) in axes.iter_mut().enumerate() {
                    if let Value::Table(a) = a {
                        convert_keys(a, &["from", "to"], scale, &format!("sweep.axis[{i}]."))?;
                    }
                }
            }
        }
        let cfg: RunConfig = Value::Table(t).try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        if let Some(s) = &self.sweep {
            if s.axis.is_empty() || s.axis.len() > 2 {
                return Err(Error::Config("a sweep needs one or two axes".into()));
            }
            for a in &s.axis {
                a.validate()?;
            }
            if s.axis.len() == 2 && s.axis[0].var == s.axis[1].var {
                return Err(Error::Config("the two sweep axes must differ".into()));
            }
        } else if self.mode == Mode::Sweep {
            return Err(Error::Config("mode = \"sweep\" requires a [sweep] table".into()));
        }
        let t = &self.tolerances;
        if !(t.rel_tol > 0.0 && t.decay_lengths > 2.0 && t.max_cells > 0 && t.divergence_floor > 0.0) {
            return Err(Error::Config("tolerances must be positive (decay_lengths > 2)".into()));
        }
        if self.point.wigner_points < 2 || !(self.point.wigner_half_width > 0.0) || self.point.truncation == 0 || self.point.q_max == 0 {
            return Err(Error::Config("wigner_points >= 2, truncation >= 1 and q_max >= 1 are required".into()));
        }
        self.params.system().validate().map_err(|e| Error::Config(e.to_string()))
    }

    /// Canonical TOML of the resolved configuration.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always serializable")
    }

    /// Provenance header lines, each starting with [`PROVENANCE_PREFIX`].
    pub fn provenance(&self) -> String {
        self.to_toml().lines().map(|l| format!("{PROVENANCE_PREFIX}{l}\n")).collect()
    }

    /// Recovers the configuration from the header of an emitted file. The
    /// first comment line (generator and timestamp) is skipped.
    pub fn from_provenance(text: &str) -> Result<Self> {
        let body: String = text
            .lines()
            .skip(1)
            .take_while(|l| l.starts_with(PROVENANCE_PREFIX.trim_end()))
            .map(|l| l.strip_prefix(PROVENANCE_PREFIX).unwrap_or("").to_string() + "\n")
            .collect();
        Self::load(&body, &[])
    }
}

/// Configuration with the reference device, the default operating point and
/// the given mode. A sweep mode still needs its `sweep` table.
pub fn default_config(mode: Mode) -> RunConfig {
    let mut c = RunConfig::load("mode = \"kerr\"", &[]).expect("defaults are valid");
    c.mode = mode;
    c
}

/// The shipped parameter file.
pub const DEFAULT_PARAMS_TOML: &str = r#"# Reference device; frequencies in units of omega_b unless a unit is given.
mode = "kerr"
frequency_scale = "10MHz"
out_dir = "."
workers = 1

[params]
omega_a = 1.934e7
omega_c = 1000
g_a = 1e-3
g_c = 1e-3
kappa_a = 0.1
kappa_c = 0.127
kappa_b = "1kHz"
epsilon_c = 703.5320394
omega_ci = 998.1229195

[point]
G = 0.5
Delta_c = 1.251
kappa_minus = "500kHz"
kappa_plus = "500kHz"
"#;

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn axis_values_are_increasing(from in 1e-6f64..10.0, span in 1e-3f64..100.0, steps in 2usize..400, log in any::<bool>()) {
            let scale = if log { Scale::Log } else { Scale::Linear };
            let axis = Axis { var: Variable::G, from, to: from + span, steps, scale };
            let v = axis.values();
            prop_assert_eq!(v.len(), steps);
            prop_assert_eq!(v[0], from);
            prop_assert_eq!(v[steps - 1], from + span);
            prop_assert!(v.windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn units() {
        assert_eq!(parse_hz("10MHz").unwrap(), 1e7);
        assert_eq!(parse_hz(" 2.5 kHz").unwrap(), 2500.0);
        assert!(parse_hz("10").is_err());
        assert!(parse_hz("10mhz").is_err());
        let v = |s: &str| parse_frequency(&Value::String(s.into()), 1e7, "k");
        assert!((v("500kHz").unwrap() - 0.05).abs() < 1e-15);
        assert_eq!(v("1e-3").unwrap(), 1e-3);
        assert_eq!(v("2e-3wb").unwrap(), 2e-3);
        assert!(v("3 furlongs").is_err());
        assert!(v("MHz").is_err());
    }

    #[test]
    fn shipped_defaults() {
        let c = RunConfig::load(DEFAULT_PARAMS_TOML, &[]).unwrap();
        assert_eq!(c.frequency_scale_hz, 1e7);
        assert_eq!(c.params.g_a, 1e-3);
        assert_eq!(c.params.kappa_a, 0.1);
        assert_eq!(c.params.kappa_c, 0.127);
        assert!((c.params.kappa_b - 1e-4).abs() < 1e-18);
        assert!((c.point.kappa_minus - 0.05).abs() < 1e-15);
    }

    #[test]
    fn unknown_keys_are_listed() {
        let e = RunConfig::load("mode = \"kerr\"\nfoo = 1\n[point]\nbar = 2\nG = 0.1\n", &[]).unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("foo") && msg.contains("point.bar"), "{msg}");
        assert_eq!(e.exit_code(), 1);
    }

    #[test]
    fn overrides_and_round_trip() {
        let sets = vec![
            ("point.G".to_string(), "0.3".to_string()),
            ("sweep.quantity".to_string(), "kerr".to_string()),
        ];
        let mut c = RunConfig::load("mode = \"sweep\"\n[[sweep.axis]]\nvar = \"G\"\nfrom = 0\nto = 0.5\nsteps = 5\n", &sets)
            .unwrap();
        assert_eq!(c.point.g, 0.3);
        c.point.delta_a = Some(1e-5);
        let text = format!("# header\n{}", c.provenance());
        assert_eq!(RunConfig::from_provenance(&text).unwrap(), c);
    }

    #[test]
    fn invalid_sweeps() {
        let bad = [
            "[[sweep.axis]]\nvar = \"G\"\nfrom = 0.5\nto = 0.1\nsteps = 5\n",
            "[[sweep.axis]]\nvar = \"G\"\nfrom = 0\nto = 0.5\nsteps = 1\n",
            "[[sweep.axis]]\nvar = \"G\"\nfrom = 0\nto = 0.5\nsteps = 4\nscale = \"log\"\n",
            "[[sweep.axis]]\nvar = \"H\"\nfrom = 0\nto = 0.5\nsteps = 4\n",
        ];
        for b in bad {
            let text = format!("mode = \"sweep\"\n[sweep]\nquantity = \"kerr\"\n{b}");
            assert!(RunConfig::load(&text, &[]).is_err(), "{b}");
        }
        assert!(RunConfig::load("mode = \"sweep\"", &[]).is_err());
    }

    #[test]
    fn log_axis() {
        let a = Axis { var: Variable::GGap, from: 1e-6, to: 1e-2, steps: 5, scale: Scale::Log };
        let v = a.values();
        assert!((v[2] - 1e-4).abs() < 1e-16);
        assert_eq!(v[0], 1e-6);
    }
}
