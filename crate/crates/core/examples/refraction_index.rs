//! Well refraction index of a Gaussian packet: term by term, and against the
//! position-difference route.

use toa_traversal::packet::GaussianPacket;
use toa_traversal::quadrature::QuadSpec;
use toa_traversal::refraction::{well_refraction, zeta_oracle_refraction};

fn main() -> anyhow::Result<()> {
    let q = QuadSpec::default();
    println!("{:>5} {:>5} {:>5} {:>14} {:>14} {:>14} {:>14}", "k0", "sigma", "kappa", "R+", "R-", "R_kappa", "R");
    for (k0, sigma, kappa) in [(2.0, 1.0, 1.0), (5.0, 0.1, 0.5), (1.0, 0.5, 1.0), (1.0, 1.0, 2.0)] {
        let p = GaussianPacket::new(-20.0, sigma, k0)?;
        let r = well_refraction(&p, kappa, &q)?;
        let oracle = zeta_oracle_refraction(&p, kappa, &q)?;
        println!(
            "{k0:5} {sigma:5} {kappa:5} {:14.10} {:14.10} {:14.10} {:14.10}  (zeta route {:.10})",
            r.r_plus, r.r_minus, r.r_kappa, r.total, oracle
        );
    }
    Ok(())
}
