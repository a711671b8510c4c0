//! Barrier refraction and its analytic continuation into the well index.

use toa_traversal::packet::GaussianPacket;
use toa_traversal::quadrature::QuadSpec;
use toa_traversal::refraction::{
    barrier_refraction, continuation_check_with, ContinuationBranch,
};

fn main() -> anyhow::Result<()> {
    let q = QuadSpec::default();
    let p = GaussianPacket::new(-20.0, 1.0, 2.0)?;
    println!("barrier R_B at kappa0 = 1: {:.3e}", barrier_refraction(&p, 1.0, &q)?);
    for branch in [ContinuationBranch::Upper, ContinuationBranch::Lower] {
        match continuation_check_with(&p, 1.0, branch, 1e-7, &q) {
            Ok(r) => println!("{branch:?}: consistent, worst deviation {:.1e}", r.max_deviation()),
            Err(e) => println!("{branch:?}: {e}"),
        }
    }
    Ok(())
}
