//! Asymptotic expansions next to the quadrature value in each regime.

use toa_traversal::asymptotics::{deep_well_dominant_r, high_energy_r, narrow_shallow_r, wide_packet_r};
use toa_traversal::domain::PhysicalConstants;
use toa_traversal::packet::GaussianPacket;
use toa_traversal::quadrature::QuadSpec;
use toa_traversal::refraction::well_refraction;

fn main() -> anyhow::Result<()> {
    let q = QuadSpec::default();

    let wide = GaussianPacket::new(-200.0, 10.0, 5.0)?;
    let exact = well_refraction(&wide, 1.0, &q)?.total;
    for n in 0..=3 {
        let r = wide_packet_r(&wide, 1.0, n)?;
        println!("wide packet, order {n}: {:.12} (quadrature {exact:.12})", r.value);
    }

    let narrow = GaussianPacket::new(-5.0, 0.1, 5.0)?;
    let r = narrow_shallow_r(&narrow, 0.2)?;
    println!("narrow shallow: {:.12} (quadrature {:.12})", r.value, well_refraction(&narrow, 0.2, &q)?.total);

    let c = PhysicalConstants::atomic();
    let r = high_energy_r(&wide, 12.5, 0.5, 2, 60, &c)?;
    println!("high energy, j <= 2: {:.12} (quadrature {exact:.12})", r.value);

    let deep = GaussianPacket::new(-20.0, 1.0, 1.0)?;
    let r = deep_well_dominant_r(&deep, 6.0, &q)?;
    let full = well_refraction(&deep, 6.0, &q)?.total;
    println!("deep well dominant term: {:.6e} (quadrature {full:.6e})", r.value);
    Ok(())
}
