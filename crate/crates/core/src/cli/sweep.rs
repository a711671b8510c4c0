//! Grid evaluation for `sweep` and the `figure` presets.

use clap::ValueEnum;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::ParameterConfig;
use crate::refraction::{deep_well_z, well_refraction};
use crate::traversal::{traversal_times, Classification};

use super::params::{Base, ParamArgs};
use super::table::{validate_axes, AxisSpec, SweepRow, SweepTable, STATUS_OK};
use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
pub enum Quantity {
    /// Terms of the well index
    Refraction,
    /// Traversal times and their classification
    Traversal,
    /// Deep-well factor z(u, v)
    ImZ,
    /// Q, R_kappa and ln|R_kappa|/10 with a sign flag
    KappaLog,
}

impl Quantity {
    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Quantity::Refraction => &["r_plus", "r_minus", "r_kappa", "total", "q_free", "error_estimate"],
            Quantity::Traversal => &[
                "tau_well",
                "tau_free",
                "delta_tau",
                "classical_tau",
                "classification",
                "dead_band",
            ],
            Quantity::ImZ => &["im_z", "re_z", "error_estimate"],
            Quantity::KappaLog => &["q_free", "r_kappa", "total", "ln_abs_r_kappa_over_10", "r_kappa_negative"],
        }
    }

    pub fn axis_names(self) -> &'static [&'static str] {
        match self {
            Quantity::ImZ => &["u", "v"],
            _ => &["k0", "sigma", "kappa", "V0", "L"],
        }
    }

    fn name(self) -> &'static str {
        match self {
            Quantity::Refraction => "refraction",
            Quantity::Traversal => "traversal",
            Quantity::ImZ => "im-z",
            Quantity::KappaLog => "kappa-log",
        }
    }
}

/// `+1` advanced, `-1` delayed, `0` neutral.
pub fn classification_code(c: Classification) -> f64 {
    match c {
        Classification::Advanced => 1.0,
        Classification::Delayed => -1.0,
        Classification::Neutral => 0.0,
    }
}

fn apply(base: &Base, axes: &[AxisSpec], point: &[f64]) -> Base {
    let mut b = base.clone();
    for (a, &x) in axes.iter().zip(point) {
        match a.name.as_str() {
            "k0" => b.k0 = x,
            "sigma" => b.sigma = x,
            "kappa" => b.kappa = x,
            "V0" => b.kappa = (2.0 * b.constants.mass() * x).sqrt() / b.constants.hbar(),
            "L" => b.width = x,
            _ => {}
        }
    }
    b
}

/// Values of `q`'s columns at one grid point.
pub fn evaluate(q: Quantity, base: &Base, axes: &[AxisSpec], point: &[f64]) -> crate::Result<Vec<f64>> {
    if q == Quantity::ImZ {
        let mut u = base.sigma * base.kappa;
        let mut v = base.sigma * base.k0;
        for (a, &x) in axes.iter().zip(point) {
            match a.name.as_str() {
                "u" => u = x,
                "v" => v = x,
                _ => {}
            }
        }
        let z = deep_well_z(u, v, &base.quad)?;
        return Ok(vec![z.value.im, z.value.re, z.error_estimate]);
    }
    let b = apply(base, axes, point);
    let p = b.packet()?;
    Ok(match q {
        Quantity::Refraction => {
            let r = well_refraction(&p, b.kappa, &b.quad)?;
            vec![r.r_plus, r.r_minus, r.r_kappa, r.total, r.q_free, r.error_estimate]
        }
        Quantity::Traversal => {
            let t = traversal_times(&p, &b.well()?, &b.constants, &b.quad)?;
            vec![
                t.tau_well,
                t.tau_free,
                t.delta_tau,
                t.classical_tau,
                classification_code(t.classification),
                t.dead_band,
            ]
        }
        Quantity::KappaLog => {
            let r = well_refraction(&p, b.kappa, &b.quad)?;
            let neg = if r.r_kappa < 0.0 { 1.0 } else { 0.0 };
            vec![r.q_free, r.r_kappa, r.total, r.r_kappa.abs().ln() / 10.0, neg]
        }
        Quantity::ImZ => unreachable!("handled above"),
    })
}

/// Evaluates `q` over the grid in parallel; rows come out in grid order
/// whatever the worker count. Failed points keep `NaN` cells and carry the
/// error text in `status`.
pub fn run_sweep(
    q: Quantity,
    base: &Base,
    axes: Vec<AxisSpec>,
    mut metadata: Vec<(String, String)>,
) -> Result<SweepTable, CliError> {
    validate_axes(&axes)?;
    for a in &axes {
        if !q.axis_names().contains(&a.name.as_str()) {
            return Err(CliError::Config(format!(
                "axis `{}` is not valid for quantity {}; expected one of {:?}",
                a.name,
                q.name(),
                q.axis_names()
            )));
        }
    }
    let ncol = q.columns().len();
    let rows: Vec<SweepRow> = SweepTable::grid(&axes)
        .into_par_iter()
        .map(|point| {
            let (cells, status) = match evaluate(q, base, &axes, &point) {
                Ok(v) if v.iter().all(|x| x.is_finite()) => (v, STATUS_OK.to_string()),
                Ok(v) => (v, "non-finite value".to_string()),
                Err(e) => (vec![f64::NAN; ncol], format!("error: {e}")),
            };
            let mut values = point;
            values.extend(cells);
            SweepRow { values, status }
        })
        .collect();
    metadata.insert(0, ("generator".into(), format!("toa-traversal {}", env!("CARGO_PKG_VERSION"))));
    metadata.push(("quantity".into(), q.name().into()));
    metadata.push((
        "config".into(),
        serde_json::to_string(&base.echo).unwrap_or_default(),
    ));
    metadata.push((
        "tolerance".into(),
        format!("abs {:e} rel {:e}", base.quad.abs_tol, base.quad.rel_tol),
    ));
    let table = SweepTable {
        metadata,
        axes,
        columns: q.columns().iter().map(|s| s.to_string()).collect(),
        rows,
    };
    table.check()?;
    Ok(table)
}

/// Identifiers accepted by [`figure_table`].
pub const FIGURE_IDS: [u8; 6] = [4, 5, 6, 7, 8, 9];

/// Parameter presets for the figure data sets. Flags override the fixed
/// parameters; `points` sets the count of every axis.
pub fn figure_table(id: u8, points: usize, params: &ParamArgs) -> Result<SweepTable, CliError> {
    let preset = |k0: Option<f64>, sigma: Option<f64>| ParameterConfig {
        k0,
        sigma,
        ..Default::default()
    };
    let (defaults, kappa, axes, q) = match id {
        4 => (
            preset(Some(5.0), None),
            Some(1.0),
            vec![AxisSpec::logarithmic("sigma", 0.1, 10.0, points)],
            Quantity::Refraction,
        ),
        5 => (
            preset(None, Some(0.1)),
            Some(5.0),
            vec![AxisSpec::linear("k0", 0.5, 50.0, points)],
            Quantity::Refraction,
        ),
        6 => (
            preset(Some(5.0), None),
            Some(5.0),
            vec![AxisSpec::linear("sigma", 0.2, 2.0, points)],
            Quantity::Refraction,
        ),
        // v = σ k0 = 1
        7 => (
            preset(Some(1.0), Some(1.0)),
            None,
            vec![AxisSpec::linear("u", 1.0, 10.0, points)],
            Quantity::ImZ,
        ),
        8 => (
            preset(None, None),
            None,
            vec![
                AxisSpec::linear("u", 1.0, 10.0, points),
                AxisSpec::linear("v", 0.5, 2.0, points),
            ],
            Quantity::ImZ,
        ),
        9 => (
            preset(Some(1.0), Some(1.0)),
            None,
            vec![AxisSpec::linear("kappa", 1.0, 10.0, points)],
            Quantity::KappaLog,
        ),
        _ => {
            return Err(CliError::Config(format!(
                "unknown figure id {id}; expected one of {FIGURE_IDS:?}"
            )))
        }
    };
    let base = params.resolve_with(&defaults, kappa)?;
    run_sweep(q, &base, axes, vec![("figure".into(), id.to_string())])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn column(t: &SweepTable, name: &str) -> Vec<f64> {
        let j = t.axes.len() + t.columns.iter().position(|c| c == name).unwrap();
        t.rows.iter().map(|r| r.values[j]).collect()
    }

    fn sign_changes(v: &[f64]) -> usize {
        v.windows(2).filter(|w| w[0].signum() != w[1].signum()).count()
    }

    #[test]
    fn figure_4_tends_to_classical() {
        let t = figure_table(4, 25, &ParamArgs::default()).unwrap();
        assert_eq!(t.rows.len(), 25);
        let last = t.rows.last().unwrap();
        assert!(t.rows.iter().all(|r| r.status == STATUS_OK));
        assert!((column(&t, "r_plus")[24] - 5.0 / 26f64.sqrt()).abs() < 1e-3);
        assert!(column(&t, "r_minus")[24].abs() < 1e-12);
        assert!(column(&t, "r_kappa")[24].abs() < 1e-12);
        assert_eq!(last.values[0], 10.0);
    }

    #[test]
    fn figure_6_and_7_oscillate() {
        let t = figure_table(6, 60, &ParamArgs::default()).unwrap();
        assert!(sign_changes(&column(&t, "r_kappa")) >= 1);
        let t = figure_table(7, 201, &ParamArgs::default()).unwrap();
        assert!(sign_changes(&column(&t, "im_z")) >= 2);
    }

    #[test]
    fn figure_9_flags_negative_rows() {
        let t = figure_table(9, 40, &ParamArgs::default()).unwrap();
        let rk = column(&t, "r_kappa");
        let flag = column(&t, "r_kappa_negative");
        assert!(flag.contains(&1.0));
        for (r, f) in rk.iter().zip(&flag) {
            assert_eq!(*f == 1.0, *r < 0.0);
        }
    }

    #[test]
    fn bad_figure_and_axes() {
        assert_eq!(figure_table(3, 10, &ParamArgs::default()).unwrap_err().exit_code(), 2);
        let base = ParamArgs::default().resolve().unwrap();
        let e = run_sweep(Quantity::ImZ, &base, vec![AxisSpec::linear("k0", 1.0, 2.0, 3)], vec![]);
        assert_eq!(e.unwrap_err().exit_code(), 2);
        let e = run_sweep(Quantity::Refraction, &base, vec![AxisSpec::linear("k0", 1.0, 2.0, 0)], vec![]);
        assert_eq!(e.unwrap_err().exit_code(), 2);
    }

    #[test]
    fn failed_points_are_marked() {
        let base = ParamArgs::default().resolve().unwrap();
        let t = run_sweep(Quantity::Refraction, &base, vec![AxisSpec::linear("k0", -1.0, 1.0, 3)], vec![]).unwrap();
        assert!(t.rows[0].status.starts_with("error"));
        assert_eq!(t.rows[2].status, STATUS_OK);
        let back = SweepTable::from_csv(&t.to_csv()).unwrap();
        assert_eq!(back.rows[0].status, t.rows[0].status);
    }

    #[test]
    fn shallow_kappa_sweep_is_monotone() {
        let params = ParamArgs {
            k0: Some(3.0),
            sigma: Some(2.0),
            ..Default::default()
        };
        let base = params.resolve().unwrap();
        let t = run_sweep(Quantity::Refraction, &base, vec![AxisSpec::linear("kappa", 0.0, 1.0, 11)], vec![]).unwrap();
        let total = column(&t, "total");
        assert!(total.windows(2).all(|w| w[1] < w[0]));
    }
}
