//! Builds a figure preset table and a custom two-axis sweep, both as CSV.

use toa_traversal::cli::{figure_table, run_sweep, AxisSpec, ParamArgs, Quantity};

fn main() -> anyhow::Result<()> {
    let fig = figure_table(7, 10, &ParamArgs::default())?;
    print!("{}", fig.to_csv());

    let base = ParamArgs::default().resolve()?;
    let axes = vec![AxisSpec::parse("kappa:0.1:2:4", 4)?, AxisSpec::parse("sigma:0.5:2:3", 3)?];
    let t = run_sweep(Quantity::Traversal, &base, axes, vec![("source".into(), "example".into())])?;
    print!("{}", t.to_csv());
    Ok(())
}
