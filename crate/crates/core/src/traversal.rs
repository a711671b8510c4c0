//! Traversal times assembled from refraction indices.
//!
//! With `v0 = ħk0/μ` the expected time spent crossing a well of width `L` is
//! `τ_W = (L/v0) R`, the free-flight time over the same stretch is
//! `τ_F = (L/v0) Q`, and `Δτ = τ_F - τ_W` is positive for an advanced packet.

use serde::{Deserialize, Serialize};

use crate::classical::classical_well_time;
use crate::domain::{PhysicalConstants, WellGeometry};
use crate::error::{domain, validation, Result};
use crate::packet::PacketSpectrum;
use crate::quadrature::{integrate_sqrt_singular, integrate_with_breakpoints, QuadSpec};
use crate::refraction::{barrier_refraction_result, well_refraction, RefractionResult};

/// Packets may leak at most this much probability past the far edge.
pub const SUPPORT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Advanced,
    Delayed,
    Neutral,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraversalReport {
    pub tau_well: f64,
    pub tau_free: f64,
    pub delta_tau: f64,
    pub refraction: RefractionResult,
    /// Classical crossing time at the carrier momentum.
    pub classical_tau: f64,
    pub classification: Classification,
    /// Half-width of the `Neutral` band: the propagated error of `Δτ`.
    pub dead_band: f64,
}

fn check_support<S: PacketSpectrum + ?Sized>(s: &S, well: &WellGeometry) -> Result<()> {
    let leak = s.position_mass_right_of(-well.edge_far());
    if leak > SUPPORT_TOLERANCE {
        return validation(format!(
            "packet has probability {leak:.3e} to the right of the far edge q = {}",
            -well.edge_far()
        ));
    }
    Ok(())
}

/// `μL/(ħk0)`, the classical free crossing time at the carrier.
fn free_time(k0: f64, width: f64, c: &PhysicalConstants) -> f64 {
    width / c.velocity(k0)
}

/// `τ_W`, `τ_F`, `Δτ` and their sign for a packet incident on `well`.
///
/// The packet must sit to the left of the well up to [`SUPPORT_TOLERANCE`].
pub fn traversal_times<S: PacketSpectrum + ?Sized>(
    s: &S,
    well: &WellGeometry,
    c: &PhysicalConstants,
    spec: &QuadSpec,
) -> Result<TraversalReport> {
    check_support(s, well)?;
    let k0 = s.carrier();
    let r = well_refraction(s, well.kappa(c), spec)?;
    let t0 = free_time(k0, well.width(), c);
    let tau_well = t0 * r.total;
    let tau_free = t0 * r.q_free;
    let delta_tau = tau_free - tau_well;
    let dead_band = t0 * (r.error_estimate + r.q_error_estimate)
        + 4.0 * f64::EPSILON * (tau_free.abs() + tau_well.abs());
    let classification = if delta_tau > dead_band {
        Classification::Advanced
    } else if delta_tau < -dead_band {
        Classification::Delayed
    } else {
        Classification::Neutral
    };
    Ok(TraversalReport {
        tau_well,
        tau_free,
        delta_tau,
        refraction: r,
        classical_tau: classical_well_time(c.hbar() * k0, well, c)?,
        classification,
        dead_band,
    })
}

/// `(L/v0) R_B` across a barrier of height `barrier.depth()`.
pub fn barrier_traversal_time<S: PacketSpectrum + ?Sized>(
    s: &S,
    barrier: &WellGeometry,
    c: &PhysicalConstants,
    spec: &QuadSpec,
) -> Result<f64> {
    check_support(s, barrier)?;
    let r = barrier_refraction_result(s, barrier.kappa(c), spec)?;
    Ok(free_time(s.carrier(), barrier.width(), c) * r.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocityFunctionals {
    pub v_top: f64,
    pub v_in: f64,
    pub tau_top: f64,
    pub tau_in: f64,
}

/// `ħ sqrt(k² + κ²)/μ`, the speed of a wave of asymptotic wavenumber `k` over
/// the well.
pub fn top_velocity(k: f64, kappa: f64, c: &PhysicalConstants) -> f64 {
    c.velocity(k.hypot(kappa))
}

/// Over-the-well and in-well speeds and crossing times of a component with
/// `0 <= k < κ`.
pub fn velocity_functionals(
    k: f64,
    kappa: f64,
    width: f64,
    c: &PhysicalConstants,
) -> Result<VelocityFunctionals> {
    if !(width > 0.0) {
        return domain(format!("width must be positive, got {width}"));
    }
    if !(k >= 0.0 && k < kappa) {
        return domain(format!(
            "in-well velocity needs 0 <= k < kappa (k = {k}, kappa = {kappa})"
        ));
    }
    let v_top = top_velocity(k, kappa, c);
    let v_in = c.velocity(((kappa - k) * (kappa + k)).sqrt());
    Ok(VelocityFunctionals {
        v_top,
        v_in,
        tau_top: width / v_top,
        tau_in: width / v_in,
    })
}

/// `τ_W` assembled directly as a weighted sum of crossing times:
///
/// ```text
/// τ_W = ∫_0^∞ τ_top(k) (ρ(k) - ρ(-k)) dk + ∫_0^κ τ_in(k) W(k) dk
/// ```
///
/// with `τ_top = L/v_top`, `τ_in = L/v_in`. This is integrated in `k` without
/// the substitutions used by [`well_refraction`], so the two serve as
/// cross-checks.
pub fn weighted_sum_traversal<S: PacketSpectrum + ?Sized>(
    s: &S,
    kappa: f64,
    width: f64,
    c: &PhysicalConstants,
    spec: &QuadSpec,
) -> Result<f64> {
    if !(width > 0.0) {
        return domain(format!("width must be positive, got {width}"));
    }
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return domain(format!("kappa must be finite and >= 0, got {kappa}"));
    }
    let lt = width * c.mass() / c.hbar();
    let env = s.density_envelope();
    let (kp, _) = env.positive_branch().truncation(spec.abs_tol / 10.0);
    let (kn, _) = env.negative_branch().truncation(spec.abs_tol / 10.0);
    let k_max = kp.max(kn).max(2.0 * kappa).max(env.sigma_eff);
    let mut pts = vec![0.0, k_max];
    if kappa > 0.0 && kappa < k_max {
        pts.push(kappa);
    }
    for ctr in [env.center_lo, env.center_hi, -env.center_lo, -env.center_hi] {
        for m in [-4.0, 0.0, 4.0] {
            let k = ctr + m * env.sigma_eff;
            if k > 0.0 && k < k_max {
                pts.push(k);
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let top = integrate_with_breakpoints(
        |k: f64| (s.momentum_density(k) - s.momentum_density(-k)) / k.hypot(kappa),
        &pts,
        spec,
    )?;
    let mut total = lt * top.value;
    if kappa > 0.0 {
        // τ_in(k) W(k) = (μL/ħ) W(k)/sqrt(κ² - k²)
        let shift = s.ln_imag_axis_bound(kappa).max(0.0);
        let inner = integrate_sqrt_singular(|k| s.imag_axis_weight_scaled(k, shift), kappa, spec)?;
        total += lt * inner.value * shift.exp();
    }
    Ok(total)
}

/// `∫_ℝ τ_top(k) |Ψ̃(k)|² dk`, the wide-packet weighted average of
/// over-the-well crossing times.
pub fn mean_top_time<S: PacketSpectrum + ?Sized>(
    s: &S,
    kappa: f64,
    width: f64,
    c: &PhysicalConstants,
    spec: &QuadSpec,
) -> Result<f64> {
    if !(kappa > 0.0) || !(width > 0.0) {
        return domain("mean over-the-well time needs kappa > 0 and width > 0");
    }
    let env = s.density_envelope();
    let lo = env.center_lo - 12.0 * env.sigma_eff;
    let hi = env.center_hi + 12.0 * env.sigma_eff;
    let mut pts = vec![lo, hi];
    for x in [env.center_lo, env.center_hi, 0.0] {
        if x > lo && x < hi {
            pts.push(x);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let r = integrate_with_breakpoints(
        |k: f64| s.momentum_density(k) * width / top_velocity(k, kappa, c),
        &pts,
        spec,
    )?;
    Ok(r.value)
}
