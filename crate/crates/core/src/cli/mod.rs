//! Command-line front end. Data goes to stdout or `--out`, diagnostics to
//! stderr. Exit codes: 0 success, 1 selftest failure, 2 configuration or
//! axis error, 3 numeric failure, 4 unwritable output.

pub mod params;
pub mod selftest;
pub mod sweep;
pub mod table;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::refraction::{well_refraction, RefractionResult};
use crate::traversal::{traversal_times, TraversalReport};

pub use params::ParamArgs;
pub use selftest::{run_selftest, SelftestOptions, SuiteOutcome};
pub use sweep::{figure_table, run_sweep, Quantity};
pub use table::{AxisSpec, SweepRow, SweepTable};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(#[from] crate::Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("selftest failed: {0}")]
    Selftest(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Selftest(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "toa-traversal", version, about = "Traversal times of wave packets across square wells and barriers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Well refraction index terms as JSON
    Refraction(PointArgs),
    /// Traversal times and classification as JSON
    Traversal(PointArgs),
    /// CSV data behind one of the figure presets (4 to 9)
    Figure(FigureArgs),
    /// CSV table over one or two parameter axes
    Sweep(SweepArgs),
    /// Built-in consistency checks
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Output file (default stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct FigureArgs {
    /// Figure preset
    #[arg(long)]
    pub id: u8,
    /// Points per axis
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Axis as name:min:max[:count][:log]; names are k0, sigma, kappa, V0, L
    /// (or u, v for im-z). Give at most two.
    #[arg(long = "axis", required = true)]
    pub axes: Vec<String>,
    #[arg(long, value_enum, default_value_t = Quantity::Refraction)]
    pub quantity: Quantity,
    /// Count for axes that omit one
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SelftestArgs {
    /// Quadrature tolerance for every suite
    #[arg(long)]
    pub tol: Option<f64>,
    /// Use the wrong square-root branch in the continuation check
    #[arg(long)]
    pub inject_wrong_branch: bool,
}

#[derive(Debug, Serialize)]
struct RefractionOutput<'a> {
    parameters: &'a params::Base,
    result: RefractionResult,
}

#[derive(Debug, Serialize)]
struct TraversalOutput<'a> {
    parameters: &'a params::Base,
    result: TraversalReport,
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable output");
    s.push('\n');
    s
}

/// Executes one parsed command, writing data to `stdout` unless `--out` is set.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Refraction(a) => {
            let mut base = a.params.resolve()?;
            let p = base.packet().map_err(|e| CliError::Config(e.to_string()))?;
            base.q0 = Some(p.q0());
            let result = well_refraction(&p, base.kappa, &base.quad)?;
            emit(a.out.as_deref(), &json(&RefractionOutput { parameters: &base, result }), stdout)
        }
        Command::Traversal(a) => {
            let mut base = a.params.resolve()?;
            let p = base.packet().map_err(|e| CliError::Config(e.to_string()))?;
            base.q0 = Some(p.q0());
            let well = base.well().map_err(|e| CliError::Config(e.to_string()))?;
            let result = traversal_times(&p, &well, &base.constants, &base.quad).map_err(|e| match e {
                crate::Error::Validation(m) => CliError::Config(m),
                other => CliError::Numeric(other),
            })?;
            emit(a.out.as_deref(), &json(&TraversalOutput { parameters: &base, result }), stdout)
        }
        Command::Figure(a) => {
            let table = figure_table(a.id, a.points, &a.params)?;
            emit(a.out.as_deref(), &table.to_csv(), stdout)
        }
        Command::Sweep(a) => {
            let axes = a
                .axes
                .iter()
                .map(|s| AxisSpec::parse(s, a.points))
                .collect::<Result<Vec<_>, _>>()?;
            let base = a.params.resolve()?;
            let table = run_sweep(a.quantity, &base, axes, vec![("command".into(), "sweep".into())])?;
            emit(a.out.as_deref(), &table.to_csv(), stdout)
        }
        Command::Selftest(a) => {
            let quad = ParamArgs {
                tol: a.tol,
                ..Default::default()
            }
            .quad()?;
            let outcomes = run_selftest(&SelftestOptions {
                quad,
                inject_wrong_branch: a.inject_wrong_branch,
            });
            let mut text = String::new();
            for o in &outcomes {
                text.push_str(&o.line());
                text.push('\n');
            }
            emit(None, &text, stdout)?;
            let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.name).collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Selftest(failed.join(", ")))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (Result<(), CliError>, String) {
        let cli = Cli::try_parse_from(std::iter::once("toa-traversal").chain(args.iter().copied())).unwrap();
        let mut buf = Vec::new();
        let r = run(&cli, &mut buf);
        (r, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn refraction_json() {
        let (r, out) = run_args(&["refraction", "--k0", "5", "--sigma", "10", "--kappa", "1"]);
        r.unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let total = v["result"]["total"].as_f64().unwrap();
        assert!((total - 0.98058).abs() < 1e-4);
        let (r, out) = run_args(&["refraction", "--kappa", "0"]);
        r.unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["result"]["total"], v["result"]["q_free"]);
    }

    #[test]
    fn traversal_json() {
        let (r, out) = run_args(&["traversal", "--k0", "5", "--sigma", "10", "--kappa", "1", "--L", "2"]);
        r.unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!((v["result"]["tau_well"].as_f64().unwrap() - 0.3922).abs() < 1e-3);
        let (r, out) = run_args(&["traversal", "--kappa", "0"]);
        r.unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["result"]["delta_tau"].as_f64().unwrap(), 0.0);
        assert_eq!(v["result"]["classification"], "Neutral");
        let (r, out) = run_args(&["traversal", "--k0", "1", "--sigma", "1", "--kappa", "4"]);
        r.unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let c = v["result"]["classification"].as_str().unwrap();
        assert!(c == "Advanced" || c == "Delayed");
    }

    #[test]
    fn exit_codes() {
        let (r, _) = run_args(&["refraction", "--sigma=-1"]);
        assert_eq!(r.unwrap_err().exit_code(), 2);
        let (r, _) = run_args(&["sweep", "--axis", "kappa:0:1:0"]);
        assert_eq!(r.unwrap_err().exit_code(), 2);
        let (r, _) = run_args(&["refraction", "--k0", "1", "--sigma", "10", "--kappa", "5"]);
        assert_eq!(r.unwrap_err().exit_code(), 3);
        let (r, _) = run_args(&["figure", "--id", "4", "--points", "3", "--out", "/nonexistent-dir/x.csv"]);
        assert_eq!(r.unwrap_err().exit_code(), 4);
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("bad.json");
        std::fs::write(&cfg, "{\"k0\": ").unwrap();
        let (r, _) = run_args(&["refraction", "--config", cfg.to_str().unwrap()]);
        assert_eq!(r.unwrap_err().exit_code(), 2);
        let (r, _) = run_args(&["selftest", "--inject-wrong-branch"]);
        assert_eq!(r.unwrap_err().exit_code(), 1);
    }

    #[test]
    fn figure_file_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fig7.csv");
        let (r, _) = run_args(&["figure", "--id", "7", "--points", "21", "--out", path.to_str().unwrap()]);
        r.unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let t = SweepTable::from_csv(&text).unwrap();
        assert_eq!(t.rows.len(), 21);
        assert_eq!(t.to_csv(), text);
    }

    #[test]
    fn sweep_is_deterministic_across_pools() {
        let cli = Cli::try_parse_from(["t", "sweep", "--axis", "u:1:3:4", "--axis", "v:0.5:1:3", "--quantity", "im-z"]).unwrap();
        let mut a = Vec::new();
        run(&cli, &mut a).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let mut b = Vec::new();
        pool.install(|| run(&cli, &mut b)).unwrap();
        assert_eq!(a, b);
        assert_eq!(SweepTable::from_csv(std::str::from_utf8(&a).unwrap()).unwrap().rows.len(), 12);
    }

    #[test]
    fn conflicting_flags_rejected_by_parser() {
        assert!(Cli::try_parse_from(["t", "refraction", "--kappa", "1", "--V0", "2"]).is_err());
    }
}
