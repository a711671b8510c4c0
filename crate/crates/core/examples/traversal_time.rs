//! Traversal time across a well compared with free flight and the classical
//! time, for a narrow and a wide packet.

use toa_traversal::domain::{depth_for_kappa, PhysicalConstants, WellGeometry};
use toa_traversal::packet::GaussianPacket;
use toa_traversal::quadrature::QuadSpec;
use toa_traversal::traversal::traversal_times;

fn main() -> anyhow::Result<()> {
    let c = PhysicalConstants::atomic();
    let well = WellGeometry::with_width(depth_for_kappa(1.0, &c), 2.0, 1.0)?;
    for sigma in [0.3, 1.0, 10.0] {
        let p = GaussianPacket::new(-well.edge_far() - 12.0 * sigma, sigma, 5.0)?;
        let t = traversal_times(&p, &well, &c, &QuadSpec::default())?;
        println!(
            "sigma {sigma:5}: tau_W {:.8} tau_free {:.8} classical {:.8} -> {:?}",
            t.tau_well, t.tau_free, t.classical_tau, t.classification
        );
    }
    Ok(())
}
