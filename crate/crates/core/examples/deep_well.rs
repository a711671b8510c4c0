//! Deep-well regime: the contour and direct forms of R_kappa in scaled units,
//! and the sign oscillation of Im z as the well deepens.

use toa_traversal::packet::GaussianPacket;
use toa_traversal::quadrature::QuadSpec;
use toa_traversal::refraction::{deep_well_r_kappa, deep_well_z};

fn main() -> anyhow::Result<()> {
    let q = QuadSpec::default();
    let p = GaussianPacket::new(-30.0, 1.0, 2.0)?;
    for kappa in [2.0, 3.0, 5.0, 8.0] {
        let d = deep_well_r_kappa(&p, kappa, &q)?;
        println!(
            "kappa {kappa}: R_kappa = {:.12e} x exp({:.3})  direct-form deviation {:.1e}",
            d.r_kappa.mantissa,
            d.r_kappa.ln_scale,
            d.scaled_deviation()
        );
    }
    let mut last = 0.0;
    for j in 0..=90 {
        let u = 1.0 + j as f64 * 0.1;
        let im = deep_well_z(u, 1.0, &q)?.value.im;
        if j > 0 && im.signum() != f64::signum(last) {
            println!("Im z changes sign near u = {u:.1}");
        }
        last = im;
    }
    Ok(())
}
