use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use optokerr::config::{apply_override, RunConfig, DEFAULT_PARAMS_TOML};
use optokerr::runner;
use optokerr::Error;

/// Criticality-enhanced Kerr nonlinearity: spectra, Kerr strength, photon
/// statistics and cat states.
///
/// Frequencies accept bare numbers (units of omega_b), `<v>wb`, or
/// `<v>Hz|kHz|MHz|GHz` converted with `frequency_scale`.
#[derive(Parser, Debug)]
#[command(name = "optokerr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normal-mode frequencies at a working point.
    Spectrum(Common),
    /// Critical coupling for `--delta-c` and critical detuning for `--g`.
    Critical(Common),
    /// Kerr strength, displacements and the eta > kappa_a windows.
    Kerr(Common),
    /// Equal-time second-order coherence of the probed optical mode.
    G2(Common),
    /// Cat state at a stroboscopic time and its coherent components.
    Cat(CatArgs),
    /// Wigner function of the cat state on a square grid.
    Wigner(WignerArgs),
    /// Parallel one- or two-axis parameter sweep.
    Sweep(SweepArgs),
    /// Truncated-Fock validation report.
    Oracle(Common),
    /// Mean-field linearization of the driven device.
    Linearize(Common),
    /// Prints the shipped parameter file.
    Params,
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// Parameter file (TOML); the shipped defaults when absent.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Override `key.path=value`, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// Linearized coupling G.
    #[arg(long = "g", alias = "G", allow_hyphen_values = true)]
    g: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    delta_c: Option<String>,
    #[arg(long)]
    kappa_minus: Option<String>,
    #[arg(long)]
    kappa_plus: Option<String>,
    /// Probe detuning; defaults to the Kerr strength.
    #[arg(long, allow_hyphen_values = true)]
    delta_a: Option<String>,
    #[arg(long)]
    epsilon_a: Option<String>,
}

#[derive(Args, Debug, Clone)]
struct CatArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    upsilon: Option<f64>,
    /// Stroboscopic period index n.
    #[arg(long)]
    period: Option<u32>,
    /// Kerr phase theta_K / 2 pi, replacing the working-point value.
    #[arg(long)]
    phase_fraction: Option<f64>,
    #[arg(long)]
    truncation: Option<usize>,
    #[arg(long)]
    q_max: Option<u32>,
}

#[derive(Args, Debug, Clone)]
struct WignerArgs {
    #[command(flatten)]
    cat: CatArgs,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    half_width: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Quantity per point: spectrum, kerr, g2 or cat.
    #[arg(long = "mode")]
    quantity: Option<String>,
    /// Variable of the first axis.
    #[arg(long)]
    var: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    from: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    to: Option<String>,
    #[arg(long)]
    steps: Option<usize>,
    /// linear or log.
    #[arg(long)]
    scale: Option<String>,
    /// Variable of the optional second axis.
    #[arg(long)]
    var2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    from2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    to2: Option<String>,
    #[arg(long)]
    steps2: Option<usize>,
    #[arg(long)]
    scale2: Option<String>,
}

fn quoted(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

/// Flag value as a TOML literal: numbers stay numbers, anything else
/// becomes a string.
fn literal(s: &str) -> String {
    if s.parse::<f64>().is_ok() {
        s.to_string()
    } else {
        quoted(s)
    }
}

struct Builder {
    table: toml::Table,
}

impl Builder {
    fn new(common: &Common, mode: &str) -> Result<Self, Error> {
        let text = match &common.params {
            Some(p) => std::fs::read_to_string(p)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?,
            None => DEFAULT_PARAMS_TOML.to_string(),
        };
        let mut table: toml::Table = toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
        for s in &common.set {
            let (k, v) = s
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got `{s}`")))?;
            apply_override(&mut table, k.trim(), v.trim())?;
        }
        let mut b = Self { table };
        b.set("mode", Some(&quoted(mode)))?;
        b.set("out_dir", common.out_dir.as_ref().map(|p| quoted(&p.display().to_string())).as_deref())?;
        b.set("workers", common.workers.map(|w| w.to_string()).as_deref())?;
        for (key, v) in [
            ("point.G", &common.g),
            ("point.Delta_c", &common.delta_c),
            ("point.kappa_minus", &common.kappa_minus),
            ("point.kappa_plus", &common.kappa_plus),
            ("point.Delta_a", &common.delta_a),
            ("point.epsilon_a", &common.epsilon_a),
        ] {
            b.set(key, v.as_deref().map(literal).as_deref())?;
        }
        Ok(b)
    }

    fn set(&mut self, key: &str, literal: Option<&str>) -> Result<(), Error> {
        match literal {
            Some(v) => apply_override(&mut self.table, key, v),
            None => Ok(()),
        }
    }

    fn cat(&mut self, c: &CatArgs) -> Result<(), Error> {
        self.set("point.upsilon", c.upsilon.map(|v| format!("{v:?}")).as_deref())?;
        self.set("point.period_index", c.period.map(|v| v.to_string()).as_deref())?;
        self.set("point.phase_fraction", c.phase_fraction.map(|v| format!("{v:?}")).as_deref())?;
        self.set("point.truncation", c.truncation.map(|v| v.to_string()).as_deref())?;
        self.set("point.q_max", c.q_max.map(|v| v.to_string()).as_deref())
    }

    fn sweep(&mut self, s: &SweepArgs) -> Result<(), Error> {
        self.set("sweep.quantity", s.quantity.as_deref().map(quoted).as_deref())?;
        let axes = [
            (&s.var, &s.from, &s.to, s.steps, &s.scale),
            (&s.var2, &s.from2, &s.to2, s.steps2, &s.scale2),
        ];
        let mut list = Vec::new();
        for (i, (var, from, to, steps, scale)) in axes.into_iter().enumerate() {
            let Some(var) = var else {
                if from.is_some() || to.is_some() || steps.is_some() || scale.is_some() {
                    return Err(Error::Config(format!("axis {} flags need --var{}", i + 1, if i == 0 { "" } else { "2" })));
                }
                continue;
            };
            let need = |x: &Option<String>, n: &str| {
                x.clone().ok_or_else(|| Error::Config(format!("--{n} is required with --var{}", if i == 0 { "" } else { "2" })))
            };
            let suffix = if i == 0 { "" } else { "2" };
            let mut t = toml::Table::new();
            t.insert("var".into(), var.clone().into());
            for (key, v) in [("from", need(from, &format!("from{suffix}"))?), ("to", need(to, &format!("to{suffix}"))?)] {
                let val: toml::Value = match v.parse::<f64>() {
                    Ok(x) => x.into(),
                    Err(_) => v.into(),
                };
                t.insert(key.into(), val);
            }
            let steps = steps.ok_or_else(|| Error::Config(format!("--steps{suffix} is required with --var{suffix}")))?;
            t.insert("steps".into(), toml::Value::Integer(steps as i64));
            if let Some(sc) = scale {
                t.insert("scale".into(), sc.clone().into());
            }
            list.push(toml::Value::Table(t));
        }
        if !list.is_empty() {
            let sweep = self
                .table
                .entry("sweep")
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
            match sweep {
                toml::Value::Table(t) => {
                    t.insert("axis".into(), toml::Value::Array(list));
                }
                _ => return Err(Error::Config("`sweep` must be a table".into())),
            }
        }
        Ok(())
    }

    fn finish(self) -> Result<RunConfig, Error> {
        RunConfig::from_table(self.table)
    }
}

fn config(command: &Command) -> Result<Option<RunConfig>, Error> {
    let cfg = match command {
        Command::Params => return Ok(None),
        Command::Spectrum(c) => Builder::new(c, "spectrum")?.finish()?,
        Command::Critical(c) => Builder::new(c, "critical")?.finish()?,
        Command::Kerr(c) => Builder::new(c, "kerr")?.finish()?,
        Command::G2(c) => Builder::new(c, "g2")?.finish()?,
        Command::Oracle(c) => Builder::new(c, "oracle")?.finish()?,
        Command::Linearize(c) => Builder::new(c, "linearize")?.finish()?,
        Command::Cat(c) => {
            let mut b = Builder::new(&c.common, "cat")?;
            b.cat(c)?;
            b.finish()?
        }
        Command::Wigner(w) => {
            let mut b = Builder::new(&w.cat.common, "wigner")?;
            b.cat(&w.cat)?;
            b.set("point.wigner_points", w.points.map(|v| v.to_string()).as_deref())?;
            b.set("point.wigner_half_width", w.half_width.map(|v| format!("{v:?}")).as_deref())?;
            b.finish()?
        }
        Command::Sweep(s) => {
            let mut b = Builder::new(&s.common, "sweep")?;
            b.sweep(s)?;
            b.finish()?
        }
    };
    Ok(Some(cfg))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match config(&cli.command) {
        Ok(Some(c)) => c,
        Ok(None) => {
            print!("{DEFAULT_PARAMS_TOML}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match runner::run(&cfg) {
        Ok(out) => {
            for line in &out.summary {
                println!("{line}");
            }
            for p in &out.written {
                eprintln!("wrote {}", p.display());
            }
            ExitCode::from(out.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<Option<RunConfig>, Error> {
        let cli = Cli::try_parse_from(std::iter::once("optokerr").chain(args.iter().copied())).unwrap();
        config(&cli.command)
    }

    #[test]
    fn flags_override_file_values() {
        let c = parse(&["g2", "--g", "0.55", "--kappa-minus", "50kHz", "--set", "point.G=0.1"]).unwrap().unwrap();
        assert_eq!(c.point.g, 0.55);
        assert!((c.point.kappa_minus - 0.005).abs() < 1e-15);
        assert_eq!(c.mode, optokerr::config::Mode::G2);
    }

    #[test]
    fn sweep_axes_from_flags() {
        let c = parse(&[
            "sweep", "--mode", "g2", "--var", "G_gap", "--from", "1e-7", "--to", "1e-3", "--steps", "5", "--scale", "log",
            "--var2", "kappa_minus", "--from2", "50kHz", "--to2", "500kHz", "--steps2", "2",
        ])
        .unwrap()
        .unwrap();
        let s = c.sweep.unwrap();
        assert_eq!(s.axis.len(), 2);
        assert_eq!(s.axis[0].from, 1e-7);
        assert!((s.axis[1].to - 0.05).abs() < 1e-15);
    }

    #[test]
    fn incomplete_axis_is_rejected() {
        assert!(parse(&["sweep", "--mode", "kerr", "--var", "G", "--from", "0"]).is_err());
        assert!(parse(&["sweep", "--mode", "kerr", "--from", "0"]).is_err());
    }

    #[test]
    fn negative_detuning_parses_as_number() {
        let c = parse(&["g2", "--delta-a", "-0.01"]).unwrap().unwrap();
        assert_eq!(c.point.delta_a, Some(-0.01));
    }
}
