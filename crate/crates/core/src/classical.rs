//! Time-kernel factors of the well's arrival-time operator and their classical
//! limits.
//!
//! Coordinates follow the kernel convention: `η = (q + q')/2` and
//! `ζ = q - q'`. The regions split `η < 0` at the well edges `-b` and `-a`.

use serde::{Deserialize, Serialize};

use crate::domain::{PhysicalConstants, WellGeometry};
use crate::error::{domain, validation, Result};
use crate::specfun::{bessel_i0, bessel_j0, ln_bessel_i0};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelRegion {
    /// `-b < η ≤ 0`, between the well and the arrival point.
    Region1,
    /// `-a < η ≤ -b`, inside the well.
    Region2,
    /// `η ≤ -a`, left of the well.
    Region3,
}

impl KernelRegion {
    pub fn of(eta: f64, well: &WellGeometry) -> Result<Self> {
        if !eta.is_finite() || eta > 0.0 {
            return domain(format!("kernel regions cover eta <= 0, got {eta}"));
        }
        Ok(if eta > -well.edge_near() {
            Self::Region1
        } else if eta > -well.edge_far() {
            Self::Region2
        } else {
            Self::Region3
        })
    }

    pub fn contains(&self, eta: f64, well: &WellGeometry) -> bool {
        Self::of(eta, well).is_ok_and(|r| r == *self)
    }
}

/// Kernel value `T̃(η, ζ)` in `region`:
/// `η/2`, `η/2 - (b/2)[J₀(κ|ζ|) - 1]`, `η/2 - (L/2)[I₀(κ|ζ|) - 1]`.
///
/// In region 3 the result can exceed `f64` for very large `κ|ζ|`; that is
/// reported as a range error.
pub fn kernel_value(
    region: KernelRegion,
    eta: f64,
    zeta: f64,
    kappa: f64,
    well: &WellGeometry,
) -> Result<f64> {
    if !region.contains(eta, well) {
        return domain(format!("eta = {eta} is not in {region:?}"));
    }
    let x = kappa * zeta.abs();
    Ok(match region {
        KernelRegion::Region1 => 0.5 * eta,
        KernelRegion::Region2 => 0.5 * eta - 0.5 * well.edge_near() * (bessel_j0(x) - 1.0),
        KernelRegion::Region3 => {
            let i0m1 = if x > 500.0 {
                // (I₀ - 1) through the log form; the -1 is negligible here
                let ln = ln_bessel_i0(x);
                if ln > f64::MAX.ln() {
                    return Err(crate::Error::Range(format!("kernel overflows at kappa*|zeta| = {x}")));
                }
                ln.exp() - 1.0
            } else {
                bessel_i0(x)? - 1.0
            };
            0.5 * eta - 0.5 * well.width() * i0m1
        }
    })
}

fn check_p0(p0: f64) -> Result<()> {
    if !(p0 > 0.0 && p0.is_finite()) {
        return domain(format!("classical arrival times need p0 > 0, got {p0}"));
    }
    Ok(())
}

/// Classical arrival time at the origin for a particle starting at `q0` with
/// momentum `p0 > 0`, for each starting region.
pub fn classical_toa(
    region: KernelRegion,
    q0: f64,
    p0: f64,
    well: &WellGeometry,
    c: &PhysicalConstants,
) -> Result<f64> {
    check_p0(p0)?;
    if !region.contains(q0, well) {
        return domain(format!("q0 = {q0} is not in {region:?}"));
    }
    let mu = c.mass();
    let two_mu_v = 2.0 * mu * well.depth();
    Ok(match region {
        KernelRegion::Region1 => -mu * q0 / p0,
        KernelRegion::Region2 => {
            // closed-form radical, real only below the depth threshold
            if two_mu_v >= p0 * p0 {
                return domain(format!(
                    "region-2 arrival time needs 2*mu*V0/p0^2 < 1, got {}",
                    two_mu_v / (p0 * p0)
                ));
            }
            let b = well.edge_near();
            -mu * (q0 + b) / p0 + mu * b / (p0 * p0 - two_mu_v).sqrt()
        }
        KernelRegion::Region3 => {
            let l = well.width();
            -mu * (q0 + l) / p0 + classical_well_time(p0, well, c)?
        }
    })
}

/// `μL / sqrt(p0² + 2μV0)`, the classical time spent crossing the well.
pub fn classical_well_time(p0: f64, well: &WellGeometry, c: &PhysicalConstants) -> Result<f64> {
    check_p0(p0)?;
    let mu = c.mass();
    Ok(mu * well.width() / (p0 * p0 + 2.0 * mu * well.depth()).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesResult {
    pub value: f64,
    pub terms_used: usize,
    /// Magnitude of the first omitted term.
    pub truncation_estimate: f64,
    /// Set when the term magnitudes stopped decreasing somewhere in the tail.
    pub non_monotone_tail: bool,
}

/// Arrival time from the term-by-term inversion of the Bessel Taylor series
/// of the kernel.
///
/// Term `n` of `(L/2)[I₀(κ|ζ|) - 1]` carries `|ζ|^{2n}`, which the moment
/// identity maps to `(μL/p0)·C(2n, n)(-y/4)^n` with `y = 2μV0/p0²`; the
/// region-2 kernel gives the same with `b` and `+y/4`. `n_terms` counts the
/// terms of that sum including `n = 0`.
pub fn classical_limit_series(
    region: KernelRegion,
    q0: f64,
    p0: f64,
    well: &WellGeometry,
    c: &PhysicalConstants,
    n_terms: usize,
) -> Result<SeriesResult> {
    check_p0(p0)?;
    if !region.contains(q0, well) {
        return domain(format!("q0 = {q0} is not in {region:?}"));
    }
    let mu = c.mass();
    if region == KernelRegion::Region1 {
        if n_terms == 0 {
            return validation("n_terms must be at least 1");
        }
        return Ok(SeriesResult {
            value: -mu * q0 / p0,
            terms_used: 1,
            truncation_estimate: 0.0,
            non_monotone_tail: false,
        });
    }
    if n_terms < 4 {
        return validation(format!("n_terms must be at least 4, got {n_terms}"));
    }
    let y = 2.0 * mu * well.depth() / (p0 * p0);
    if y >= 1.0 {
        return domain(format!("series radius violated: 2*mu*V0/p0^2 = {y} >= 1"));
    }
    let (len, sign) = match region {
        KernelRegion::Region2 => (well.edge_near(), 1.0),
        _ => (well.width(), -1.0),
    };
    let x = sign * y / 4.0;
    let mut term = 1.0;
    let mut sum = 0.0;
    let mut non_monotone = false;
    for n in 0..n_terms {
        sum += term;
        let next = term * 2.0 * (2 * n + 1) as f64 / (n + 1) as f64 * x;
        if next.abs() > term.abs() {
            non_monotone = true;
        }
        term = next;
    }
    let scale = mu * len / p0;
    Ok(SeriesResult {
        value: -mu * (q0 + len) / p0 + scale * sum,
        terms_used: n_terms,
        truncation_estimate: scale * term.abs(),
        non_monotone_tail: non_monotone,
    })
}
