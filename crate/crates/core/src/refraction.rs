//! Effective refraction indices of a rectangular well or barrier.
//!
//! For a packet with momentum density `ρ(k) = |Ψ̃(k)|²` and carrier `k0` the
//! well index is
//!
//! ```text
//! R = k0 ∫_0^∞ (ρ(k) - ρ(-k)) / sqrt(k² + κ²) dk
//!   + k0 ∫_0^κ Im[2 Ψ̃(ik) Ψ̃*(-ik)] / sqrt(κ² - k²) dk
//! ```
//!
//! split as `R = R₊ + R₋ + R_κ`. The same number is `Im k0 ∫_0^∞ Φ(ζ) e^{ik0ζ}
//! I₀(κζ) dζ` in position-difference space, which serves as an independent
//! oracle. The in-well term carries `e^{2σ²κ²}`, so deep-well quantities are
//! also offered as [`ScaledValue`]s.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, validation, Error, Result};
use crate::packet::{GaussianPacket, PacketSpectrum};
use crate::quadrature::{
    integrate_adaptive, integrate_contour_segment_sqrt_start, integrate_semi_infinite,
    integrate_with_breakpoints, GaussianEnvelope, QuadResult, QuadSpec,
};
use crate::specfun::{bessel_i0_scaled, dawson};

/// `mantissa · e^{ln_scale}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledValue {
    pub mantissa: f64,
    pub ln_scale: f64,
}

impl ScaledValue {
    pub fn new(mantissa: f64, ln_scale: f64) -> Self {
        Self { mantissa, ln_scale }
    }

    pub fn from_f64(v: f64) -> Self {
        Self::new(v, 0.0)
    }

    /// `ln|value|`.
    pub fn ln_abs(&self) -> f64 {
        self.mantissa.abs().ln() + self.ln_scale
    }

    pub fn signum(&self) -> f64 {
        if self.mantissa == 0.0 {
            0.0
        } else {
            self.mantissa.signum()
        }
    }

    /// Plain `f64`, or a range error when it is not representable.
    pub fn to_f64(&self) -> Result<f64> {
        if self.mantissa == 0.0 {
            return Ok(0.0);
        }
        if self.ln_abs() > f64::MAX.ln() {
            return Err(Error::Range(format!(
                "value with ln|x| = {:.3} exceeds f64",
                self.ln_abs()
            )));
        }
        Ok(self.mantissa * self.ln_scale.exp())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RefractionMethod {
    MomentumSpace,
    ZetaOracle,
    DeepWellForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefractionResult {
    /// `k0 ∫_0^∞ ρ(k)/sqrt(k²+κ²) dk`. At `κ = 0` the two momentum terms only
    /// converge together, and their sum `Q` is reported here.
    pub r_plus: f64,
    /// `-k0 ∫_0^∞ ρ(-k)/sqrt(k²+κ²) dk` (non-positive).
    pub r_minus: f64,
    /// In-well term.
    pub r_kappa: f64,
    pub total: f64,
    pub q_free: f64,
    pub method: RefractionMethod,
    /// Error estimate of `total`.
    pub error_estimate: f64,
    /// Error estimate of `q_free`.
    pub q_error_estimate: f64,
}

fn check_spectrum<S: PacketSpectrum + ?Sized>(s: &S) -> Result<f64> {
    if !s.is_entire() {
        return validation("spectrum has poles; only entire spectra are supported");
    }
    let k0 = s.carrier();
    if !(k0 > 0.0 && k0.is_finite()) {
        return domain(format!("refraction indices need k0 > 0, got {k0}"));
    }
    Ok(k0)
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return domain(format!("kappa must be finite and >= 0, got {kappa}"));
    }
    Ok(())
}

/// Absolute tolerance for an integrand rescaled by `e^{-ln_scale}/factor`,
/// floored where double rounding (about `1e-13` of `l1_bound`) makes a tighter
/// request unattainable.
fn scaled_spec(spec: &QuadSpec, ln_scale: f64, factor: f64, l1_bound: f64) -> QuadSpec {
    let wanted = spec.abs_tol * (-ln_scale).exp() / factor;
    let abs = wanted.max(1e-13 * l1_bound).clamp(f64::MIN_POSITIVE, 1e-3);
    QuadSpec {
        abs_tol: abs,
        ..*spec
    }
}

/// `∫_lo^∞ f(k)·kernel(k)` for a density under `env`, where `|kernel| ≤ kernel_max(x)`
/// beyond `x`. Returns the truncation point and its tail bound.
fn truncate(env: GaussianEnvelope, spec: &QuadSpec, kernel_at: impl Fn(f64) -> f64) -> (f64, f64) {
    let (k_max, tail) = env.truncation(spec.abs_tol / 10.0);
    (k_max, tail * kernel_at(k_max))
}

/// `k0 ∫_0^∞ f(k)/sqrt(k²+κ²) dk` through `k = κ sinh u`.
fn sinh_kernel_integral(
    f: impl Fn(f64) -> f64,
    env: GaussianEnvelope,
    kappa: f64,
    spec: &QuadSpec,
) -> Result<QuadResult<f64>> {
    let (k_max, tail) = truncate(env, spec, |k| 1.0 / k.hypot(kappa));
    if k_max <= 0.0 {
        return Ok(QuadResult {
            value: 0.0,
            error_estimate: tail,
            evaluations: 0,
        });
    }
    let u_max = (k_max / kappa).asinh();
    let mut pts = vec![0.0, u_max];
    for m in [-4.0, -1.0, 0.0, 1.0, 4.0] {
        let k = env.center + m * env.sigma_eff;
        if k > 0.0 && k < k_max {
            pts.push((k / kappa).asinh());
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut r = integrate_with_breakpoints(|u: f64| f(kappa * u.sinh()), &pts, spec)
        .map_err(|e| e.labelled("momentum term (k = kappa sinh u)"))?;
    r.error_estimate += tail;
    Ok(r)
}

fn positive_term<S: PacketSpectrum + ?Sized>(s: &S, kappa: f64, spec: &QuadSpec) -> Result<QuadResult<f64>> {
    let env = s.density_envelope().positive_branch();
    sinh_kernel_integral(|k| s.momentum_density(k), env, kappa, spec)
}

fn negative_term<S: PacketSpectrum + ?Sized>(s: &S, kappa: f64, spec: &QuadSpec) -> Result<QuadResult<f64>> {
    let env = s.density_envelope().negative_branch();
    sinh_kernel_integral(|k| s.momentum_density(-k), env, kappa, spec)
}

/// In-well term as a scaled value: `k0 ∫_0^{π/2} W(κ sin θ) dθ`.
fn kappa_term<S: PacketSpectrum + ?Sized>(
    s: &S,
    kappa: f64,
    spec: &QuadSpec,
) -> Result<(ScaledValue, f64)> {
    let k0 = s.carrier();
    let shift = s.ln_imag_axis_bound(kappa);
    let local = scaled_spec(spec, shift, k0, FRAC_PI_2);
    let r = integrate_adaptive(
        |t: f64| s.imag_axis_weight_scaled(kappa * t.sin(), shift),
        0.0,
        FRAC_PI_2,
        &local,
    )
    .map_err(|e| e.labelled("in-well term R_kappa"))?;
    let ln_scale = shift + k0.ln();
    Ok((
        ScaledValue::new(r.value, ln_scale),
        ScaledValue::new(r.error_estimate, ln_scale).to_f64().unwrap_or(f64::INFINITY),
    ))
}

/// Momentum-space well index with its three terms.
///
/// `κ = 0` is routed to [`free_q`], so the result equals `Q` bit for bit.
pub fn well_refraction<S: PacketSpectrum + ?Sized>(
    s: &S,
    kappa: f64,
    spec: &QuadSpec,
) -> Result<RefractionResult> {
    let k0 = check_spectrum(s)?;
    check_kappa(kappa)?;
    let q = free_q_result(s, spec)?;
    if kappa == 0.0 {
        return Ok(RefractionResult {
            r_plus: q.value,
            r_minus: 0.0,
            r_kappa: 0.0,
            total: q.value,
            q_free: q.value,
            method: RefractionMethod::MomentumSpace,
            error_estimate: q.error_estimate,
            q_error_estimate: q.error_estimate,
        });
    }
    let rp = positive_term(s, kappa, &scaled_spec(spec, 0.0, k0, 1.0))?.scale(k0);
    let rm = negative_term(s, kappa, &scaled_spec(spec, 0.0, k0, 1.0))?.scale(-k0);
    let (rk, rk_err) = kappa_term(s, kappa, spec)?;
    let r_kappa = rk.to_f64().map_err(|_| {
        Error::Range(format!(
            "in-well term overflows f64 at kappa = {kappa}; use the scaled deep-well form"
        ))
    })?;
    Ok(RefractionResult {
        r_plus: rp.value,
        r_minus: rm.value,
        r_kappa,
        total: rp.value + rm.value + r_kappa,
        q_free: q.value,
        method: RefractionMethod::MomentumSpace,
        error_estimate: rp.error_estimate + rm.error_estimate + rk_err,
        q_error_estimate: q.error_estimate,
    })
}

/// In-well term `R_κ` as a scaled value, for any entire spectrum.
pub fn well_r_kappa_scaled<S: PacketSpectrum + ?Sized>(
    s: &S,
    kappa: f64,
    spec: &QuadSpec,
) -> Result<ScaledValue> {
    check_spectrum(s)?;
    check_kappa(kappa)?;
    if kappa == 0.0 {
        return Ok(ScaledValue::from_f64(0.0));
    }
    Ok(kappa_term(s, kappa, spec)?.0)
}

/// Position-difference route `Im k0 ∫_0^∞ Φ(ζ) e^{ik0ζ} I₀(κζ) dζ`, with its
/// error estimate.
pub fn zeta_oracle_result<S: PacketSpectrum + ?Sized>(
    s: &S,
    kappa: f64,
    spec: &QuadSpec,
) -> Result<QuadResult<f64>> {
    let k0 = check_spectrum(s)?;
    check_kappa(kappa)?;
    let (amp, sig) = s.autocorrelation_envelope();
    // |Φ(ζ)| e^{κζ} ≤ A exp(2σ²κ² - (ζ-ζ*)²/(8σ²)), ζ* = 4σ²κ
    let shift = 2.0 * sig * sig * kappa * kappa;
    if shift > 300.0 {
        return Err(Error::Range(format!(
            "zeta route overflows at sigma*kappa = {:.3}; use the momentum-space route",
            sig * kappa
        )));
    }
    let zeta_star = 4.0 * sig * sig * kappa;
    let l1 = amp * (8.0 * PI).sqrt() * sig;
    let local = scaled_spec(spec, shift, k0, l1);
    let depth = (amp / (local.abs_tol * 1e-2)).ln().max(1.0);
    let zeta_max = zeta_star + (8.0 * depth).sqrt() * sig;
    let tail = amp * (2.0 * PI).sqrt() * sig * libm::erfc((zeta_max - zeta_star) / (8f64.sqrt() * sig));
    let n = ((zeta_max * k0 / (2.0 * PI)).ceil() as usize + 4).min(4000);
    let pts: Vec<f64> = (0..=n).map(|j| zeta_max * j as f64 / n as f64).collect();
    let local = QuadSpec {
        max_subdivisions: local.max_subdivisions.max(4 * n),
        ..local
    };
    let r = integrate_with_breakpoints(
        |z: f64| {
            let phase = Complex64::new(0.0, k0 * z).exp();
            let weight = (kappa * z - shift).exp() * bessel_i0_scaled(kappa * z);
            (s.autocorrelation(z) * phase).im * weight
        },
        &pts,
        &local,
    )
    .map_err(|e| e.labelled("zeta-space oracle"))?;
    let scale = k0 * shift.exp();
    Ok(QuadResult {
        value: r.value * scale,
        error_estimate: (r.error_estimate + tail) * scale,
        evaluations: r.evaluations,
    })
}

/// Value of [`zeta_oracle_result`].
pub fn zeta_oracle_refraction<S: PacketSpectrum + ?Sized>(
    s: &S,
    kappa: f64,
    spec: &QuadSpec,
) -> Result<f64> {
    zeta_oracle_result(s, kappa, spec).map(|r| r.value)
}

/// `Q = k0 ∫_0^∞ (ρ(k) - ρ(-k))/k dk` with its error estimate.
pub fn free_q_result<S: PacketSpectrum + ?Sized>(s: &S, spec: &QuadSpec) -> Result<QuadResult<f64>> {
    let k0 = check_spectrum(s)?;
    let env = s.density_envelope();
    let spec = scaled_spec(spec, 0.0, k0, 1.0);
    let (kp, tp) = env.positive_branch().truncation(spec.abs_tol / 10.0);
    let (kn, tn) = env.negative_branch().truncation(spec.abs_tol / 10.0);
    let k_max = kp.max(kn).max(env.sigma_eff);
    let mut pts = vec![0.0, k_max];
    for c in [env.center_lo, env.center_hi, -env.center_lo, -env.center_hi] {
        for m in [-4.0, 0.0, 4.0] {
            let k = c + m * env.sigma_eff;
            if k > 0.0 && k < k_max {
                pts.push(k);
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut r = integrate_with_breakpoints(
        |k: f64| (s.momentum_density(k) - s.momentum_density(-k)) / k,
        &pts,
        &spec,
    )
    .map_err(|e| e.labelled("free correction Q"))?;
    r.error_estimate += (tp + tn) / k_max;
    Ok(r.scale(k0))
}

/// Free-flight correction factor `Q`.
pub fn free_q<S: PacketSpectrum + ?Sized>(s: &S, spec: &QuadSpec) -> Result<f64> {
    free_q_result(s, spec).map(|r| r.value)
}

/// `Q` through the position-difference route `Im k0 ∫_0^∞ Φ(ζ) e^{ik0ζ} dζ`.
pub fn free_q_zeta<S: PacketSpectrum + ?Sized>(s: &S, spec: &QuadSpec) -> Result<f64> {
    zeta_oracle_refraction(s, 0.0, spec)
}

/// Closed form `√(2π) k0σ e^{-2k0²σ²} erfi(√2 k0σ) = 2√2 k0σ D(√2 k0σ)`.
pub fn gaussian_free_q(p: &GaussianPacket) -> f64 {
    let x = std::f64::consts::SQRT_2 * p.k0() * p.sigma();
    2.0 * x * dawson(x)
}

/// Barrier index `k0 ∫_{κ0}^∞ (ρ(k) - ρ(-k)) / sqrt(k² - κ0²) dk`, computed
/// through `k = κ0 cosh u`. `κ0 = 0` is free space and returns [`free_q`].
pub fn barrier_refraction_result<S: PacketSpectrum + ?Sized>(
    s: &S,
    kappa0: f64,
    spec: &QuadSpec,
) -> Result<QuadResult<f64>> {
    let k0 = check_spectrum(s)?;
    check_kappa(kappa0)?;
    if kappa0 == 0.0 {
        return free_q_result(s, spec);
    }
    let env = s.density_envelope();
    let spec = scaled_spec(spec, 0.0, k0, 1.0);
    let (kp, tp) = env.positive_branch().truncation(spec.abs_tol / 10.0);
    let (kn, tn) = env.negative_branch().truncation(spec.abs_tol / 10.0);
    let k_max = kp.max(kn).max(1.5 * kappa0);
    let tail = (tp + tn) / (k_max * k_max - kappa0 * kappa0).sqrt();
    let u_max = (k_max / kappa0).acosh();
    let mut pts = vec![0.0, u_max];
    for c in [env.center_lo, env.center_hi, -env.center_lo, -env.center_hi] {
        for m in [-4.0, 0.0, 4.0] {
            let k = c + m * env.sigma_eff;
            if k > kappa0 && k < k_max {
                pts.push((k / kappa0).acosh());
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut r = integrate_with_breakpoints(
        |u: f64| {
            let k = kappa0 * u.cosh();
            s.momentum_density(k) - s.momentum_density(-k)
        },
        &pts,
        &spec,
    )
    .map_err(|e| e.labelled("barrier index R_B"))?;
    r.error_estimate += tail;
    Ok(r.scale(k0))
}

pub fn barrier_refraction<S: PacketSpectrum + ?Sized>(s: &S, kappa0: f64, spec: &QuadSpec) -> Result<f64> {
    barrier_refraction_result(s, kappa0, spec).map(|r| r.value)
}

/// Pieces of the deep-well form of the in-well term for a Gaussian packet,
/// in the scaled variables `u = σκ`, `v = σk0`:
///
/// ```text
/// R_κ = -2k0σ√(2/π) [e^{2(u²-v²)} Im z - e^{-2v²} γ]
/// z   = e^{4iuv} ∫_0^∞ i e^{-2(t²+2vt)} e^{4iut} / sqrt(t² - 2iut) dt
/// γ   = ∫_0^∞ e^{-2(t²+2vt)} / sqrt(t² + u²) dt
/// ```
///
/// obtained by moving the `[0, κ]` segment onto `0 → i∞ → κ`; the square root
/// is the principal branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeepWellParts {
    pub u: f64,
    pub v: f64,
    pub z: Complex64,
    pub gamma: f64,
    /// `R_κ` from the `z`/`γ` form.
    pub r_kappa: ScaledValue,
    /// `R_κ` from the direct finite-interval form, same `ln_scale`.
    pub r_kappa_direct: ScaledValue,
    pub error_estimate: f64,
}

impl DeepWellParts {
    /// The two forms' common scale `ln(2k0σ√(2/π)) + 2(u² - v²)`.
    pub fn ln_scale(&self) -> f64 {
        self.r_kappa.ln_scale
    }

    /// Deviation between the two forms, in units of the common scale.
    pub fn scaled_deviation(&self) -> f64 {
        (self.r_kappa.mantissa - self.r_kappa_direct.mantissa).abs()
    }
}

fn check_uv(u: f64, v: f64) -> Result<()> {
    if !(u > 0.0 && u.is_finite()) {
        return domain(format!("u = sigma*kappa must be positive, got {u}"));
    }
    if !(v >= 0.0 && v.is_finite()) {
        return domain(format!("v = sigma*k0 must be >= 0, got {v}"));
    }
    Ok(())
}

/// The factor `z(u, v)`, through `t = s²` to remove the `t^{-1/2}` endpoint.
pub fn deep_well_z(u: f64, v: f64, spec: &QuadSpec) -> Result<QuadResult<Complex64>> {
    check_uv(u, v)?;
    let i = Complex64::new(0.0, 1.0);
    // e^{-2(s⁴+2vs²)} < e^{-50} beyond s_max
    let s_max = (-v + (v * v + 25.0).sqrt()).sqrt();
    let n = ((4.0 * u * s_max * s_max / (2.0 * PI)).ceil() as usize + 4).min(2000);
    let pts: Vec<f64> = (0..=n).map(|j| s_max * j as f64 / n as f64).collect();
    let local = scaled_spec(spec, 0.0, 1.0, 2.0 / (2.0 * u).sqrt());
    let r = integrate_with_breakpoints(
        |s: f64| {
            let s2 = s * s;
            let amp = (-2.0 * (s2 * s2 + 2.0 * v * s2)).exp();
            let phase = Complex64::new(0.0, 4.0 * u * s2).exp();
            i * 2.0 * amp * phase / Complex64::new(s2, -2.0 * u).sqrt()
        },
        &pts,
        &QuadSpec {
            max_subdivisions: local.max_subdivisions.max(4 * n),
            ..local
        },
    )?;
    let pref = Complex64::new(0.0, 4.0 * u * v).exp();
    Ok(QuadResult {
        value: pref * r.value,
        error_estimate: r.error_estimate + 1e-21,
        evaluations: r.evaluations,
    })
}

/// `γ(u, v)` through `t = u sinh w`.
pub fn deep_well_gamma(u: f64, v: f64, spec: &QuadSpec) -> Result<QuadResult<f64>> {
    check_uv(u, v)?;
    let t_max = -v + (v * v + 25.0).sqrt();
    let w_max = (t_max / u).asinh();
    integrate_adaptive(
        |w: f64| {
            let t = u * w.sinh();
            (-2.0 * (t * t + 2.0 * v * t)).exp()
        },
        0.0,
        w_max,
        &scaled_spec(spec, 0.0, 1.0, w_max),
    )
}

/// `∫_0^{π/2} e^{-2u² cos²θ} sin(4uv sin θ) dθ`, the direct in-well term in
/// units of `2k0σ√(2/π) e^{2(u²-v²)}`.
pub fn deep_well_direct_scaled(u: f64, v: f64, spec: &QuadSpec) -> Result<QuadResult<f64>> {
    check_uv(u, v)?;
    let mut pts = vec![0.0, FRAC_PI_2];
    let edge = FRAC_PI_2 - 6.0 / u;
    if edge > 0.0 {
        pts.insert(1, edge);
    }
    let n = ((4.0 * u * v / (2.0 * PI)).ceil() as usize).min(1000);
    for j in 1..n {
        pts.push(FRAC_PI_2 * j as f64 / n as f64);
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    integrate_with_breakpoints(
        |t: f64| (-2.0 * u * u * t.cos().powi(2)).exp() * (4.0 * u * v * t.sin()).sin(),
        &pts,
        &scaled_spec(spec, 0.0, 1.0, FRAC_PI_2),
    )
}

/// Both forms of the in-well term for a Gaussian packet, checked against each
/// other: a disagreement beyond `max(1e-7, 10 × error estimates)` in scaled
/// units is a consistency error.
pub fn deep_well_r_kappa(p: &GaussianPacket, kappa: f64, spec: &QuadSpec) -> Result<DeepWellParts> {
    check_spectrum(p)?;
    check_kappa(kappa)?;
    let (u, v) = (p.sigma() * kappa, p.sigma() * p.k0());
    let ln_pref = (2.0 * p.k0() * p.sigma() * (2.0 / PI).sqrt()).ln();
    let ln_scale = ln_pref + 2.0 * (u * u - v * v);
    if kappa == 0.0 {
        let zero = ScaledValue::new(0.0, ln_scale);
        return Ok(DeepWellParts {
            u,
            v,
            z: Complex64::new(0.0, 0.0),
            gamma: 0.0,
            r_kappa: zero,
            r_kappa_direct: zero,
            error_estimate: 0.0,
        });
    }
    let z = deep_well_z(u, v, spec)?;
    let g = deep_well_gamma(u, v, spec)?;
    let d = deep_well_direct_scaled(u, v, spec)?;
    let damp = (-2.0 * u * u).exp();
    let mantissa = -z.value.im + damp * g.value;
    let err = z.error_estimate + damp * g.error_estimate + d.error_estimate;
    let parts = DeepWellParts {
        u,
        v,
        z: z.value,
        gamma: g.value,
        r_kappa: ScaledValue::new(mantissa, ln_scale),
        r_kappa_direct: ScaledValue::new(d.value, ln_scale),
        error_estimate: err,
    };
    let tol = 1e-7f64.max(10.0 * err);
    if parts.scaled_deviation() > tol {
        return Err(Error::Consistency {
            check: "deep-well contour form vs direct form".into(),
            deviation: parts.scaled_deviation(),
            tolerance: tol,
        });
    }
    Ok(parts)
}

/// Well index for a Gaussian packet with the in-well term from the deep-well
/// contour form.
pub fn deep_well_refraction(p: &GaussianPacket, kappa: f64, spec: &QuadSpec) -> Result<RefractionResult> {
    let mut r = well_refraction(p, kappa, spec)?;
    if kappa == 0.0 {
        return Ok(r);
    }
    let parts = deep_well_r_kappa(p, kappa, spec)?;
    r.r_kappa = parts.r_kappa.to_f64()?;
    r.total = r.r_plus + r.r_minus + r.r_kappa;
    r.method = RefractionMethod::DeepWellForm;
    Ok(r)
}

/// Branch of `sqrt(k² - κ0²)` on `[0, κ0)` used when continuing the well
/// formula to a barrier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContinuationBranch {
    /// `+i sqrt(κ0² - k²)`, reached by rotating `κ → iκ0` through the upper half plane.
    Upper,
    /// `-i sqrt(κ0² - k²)`.
    Lower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuationReport {
    pub kappa0: f64,
    pub branch: ContinuationBranch,
    /// `k0 ∫_{iκ0}^∞ (p(z) - p(-z))/sqrt(z² + κ0²) dz` along `iκ0 → 0 → ∞`.
    pub path_l: Complex64,
    /// Same integral along `iκ0 → X → ∞`, one entry per `X`.
    pub path_alternatives: Vec<(f64, Complex64)>,
    /// Momentum-space well index at `κ = κ0`.
    pub well_total: f64,
    /// Continued in-well term `k0 ∫_0^{π/2} W(iκ0 sin θ) dθ`.
    pub continued_third_term: Complex64,
    /// `[0, κ0]` part of the continued momentum terms on the chosen branch.
    pub continued_first_two_portion: Complex64,
    pub barrier_index: f64,
    pub cancellation_residual: f64,
    pub path_deviation: f64,
    pub well_deviation: f64,
}

impl ContinuationReport {
    pub fn max_deviation(&self) -> f64 {
        self.cancellation_residual
            .max(self.path_deviation)
            .max(self.well_deviation)
    }
}

/// Checks the well/barrier continuation with the upper branch and a `1e-7`
/// tolerance; see [`continuation_check_with`].
pub fn barrier_well_continuation_check<S: PacketSpectrum + ?Sized>(
    s: &S,
    kappa0: f64,
    spec: &QuadSpec,
) -> Result<ContinuationReport> {
    continuation_check_with(s, kappa0, ContinuationBranch::Upper, 1e-7, spec)
}

/// Evaluates the continued momentum integral along two homotopic paths,
/// compares it with the well index, and checks that the continued in-well
/// term cancels the `[0, κ0]` part of the continued momentum terms.
pub fn continuation_check_with<S: PacketSpectrum + ?Sized>(
    s: &S,
    kappa0: f64,
    branch: ContinuationBranch,
    tol: f64,
    spec: &QuadSpec,
) -> Result<ContinuationReport> {
    let k0 = check_spectrum(s)?;
    check_kappa(kappa0)?;
    if kappa0 == 0.0 {
        let q = free_q(s, spec)?;
        let w = well_refraction(s, 0.0, spec)?.total;
        let b = barrier_refraction(s, 0.0, spec)?;
        let dev = (q - w).abs().max((q - b).abs());
        let report = ContinuationReport {
            kappa0,
            branch,
            path_l: Complex64::new(q, 0.0),
            path_alternatives: Vec::new(),
            well_total: w,
            continued_third_term: Complex64::new(0.0, 0.0),
            continued_first_two_portion: Complex64::new(0.0, 0.0),
            barrier_index: b,
            cancellation_residual: 0.0,
            path_deviation: 0.0,
            well_deviation: dev,
        };
        return finish(report, tol);
    }
    let i = Complex64::new(0.0, 1.0);
    let start = i * kappa0;
    let g = |z: Complex64| (s.continued_density(z) - s.continued_density(-z)) / (z * z + kappa0 * kappa0).sqrt();
    let real_tail = |from: f64| -> Result<Complex64> {
        let f = |k: f64| (s.momentum_density(k) - s.momentum_density(-k)) / k.hypot(kappa0);
        let env = s.density_envelope();
        let (kp, _) = env.positive_branch().truncation(spec.abs_tol / 10.0);
        let (kn, _) = env.negative_branch().truncation(spec.abs_tol / 10.0);
        let k_max = kp.max(kn).max(from);
        if k_max <= from {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let r = integrate_adaptive(f, from, k_max, spec)?;
        Ok(Complex64::new(r.value, 0.0))
    };

    let seg_l = integrate_contour_segment_sqrt_start(g, start, Complex64::new(0.0, 0.0), spec)?;
    let path_l = (seg_l.value + real_tail(0.0)?) * k0;
    let mut path_alternatives = Vec::new();
    let env = s.density_envelope();
    for x in [0.5 * kappa0, kappa0, env.center_hi.max(kappa0) + env.sigma_eff] {
        let seg = integrate_contour_segment_sqrt_start(g, start, Complex64::new(x, 0.0), spec)?;
        path_alternatives.push((x, (seg.value + real_tail(x)?) * k0));
    }
    let path_deviation = path_alternatives
        .iter()
        .map(|(_, v)| (v - path_l).norm())
        .fold(0.0, f64::max);

    let well_total = well_refraction(s, kappa0, spec)?.total;
    let well_deviation = (path_l - Complex64::new(well_total, 0.0)).norm();

    // continued in-well term through the analytic extension of W
    let t3 = integrate_adaptive(
        |t: f64| s.imag_axis_weight_complex(i * (kappa0 * t.sin())),
        0.0,
        FRAC_PI_2,
        spec,
    )?;
    let continued_third_term = t3.value * k0;
    // [0, κ0] part of the momentum terms, integrated directly in k with the
    // endpoint singularity removed by k = κ0(1 - s²)
    let root = match branch {
        ContinuationBranch::Upper => i,
        ContinuationBranch::Lower => -i,
    };
    let portion = integrate_adaptive(
        |sv: f64| {
            if sv == 0.0 {
                return 0.0;
            }
            let k = kappa0 * (1.0 - sv * sv);
            let jac = 2.0 * sv * kappa0;
            (s.momentum_density(k) - s.momentum_density(-k)) / (kappa0 * kappa0 - k * k).sqrt() * jac
        },
        0.0,
        1.0,
        spec,
    )?;
    let continued_first_two_portion = Complex64::new(portion.value * k0, 0.0) / root;
    let cancellation_residual = (continued_third_term + continued_first_two_portion).norm();
    let barrier_index = barrier_refraction(s, kappa0, spec)?;
    let report = ContinuationReport {
        kappa0,
        branch,
        path_l,
        path_alternatives,
        well_total,
        continued_third_term,
        continued_first_two_portion,
        barrier_index,
        cancellation_residual,
        path_deviation,
        well_deviation,
    };
    finish(report, tol)
}

fn finish(report: ContinuationReport, tol: f64) -> Result<ContinuationReport> {
    let checks = [
        ("cancellation identity", report.cancellation_residual),
        ("contour path independence", report.path_deviation),
        ("continued path vs well index", report.well_deviation),
    ];
    for (name, dev) in checks {
        if !(dev <= tol) {
            return Err(Error::Consistency {
                check: name.into(),
                deviation: dev,
                tolerance: tol,
            });
        }
    }
    Ok(report)
}

/// `R₊` through the map `k = t/(1-t)` instead of envelope truncation.
pub fn positive_term_semi_infinite<S: PacketSpectrum + ?Sized>(
    s: &S,
    kappa: f64,
    spec: &QuadSpec,
) -> Result<QuadResult<f64>> {
    check_spectrum(s)?;
    check_kappa(kappa)?;
    if kappa == 0.0 {
        return validation("the positive momentum term diverges at kappa = 0");
    }
    Ok(integrate_semi_infinite(|k: f64| s.momentum_density(k) / k.hypot(kappa), 0.0, spec)?.scale(s.carrier()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packet::GaussianPair;

    fn spec() -> QuadSpec {
        QuadSpec::default()
    }

    fn g(k0: f64, sigma: f64) -> GaussianPacket {
        GaussianPacket::new(-100.0, sigma, k0).unwrap()
    }

    /// Reference values from 30-digit quadrature of the position-difference
    /// integral.
    const REFERENCE: [(f64, f64, f64, f64); 5] = [
        (2.0, 1.0, 1.0, 0.929_187_564_168),
        (5.0, 0.1, 0.5, 0.727_282_447_723),
        (1.0, 0.5, 1.0, 1.018_433_974_42),
        (1.0, 1.0, 2.0, 193.308_440_771),
        (3.0, 2.0, 0.5, 0.992_909_298_763),
    ];

    #[test]
    fn well_index_reference_values() {
        for (k0, s, kap, want) in REFERENCE {
            let r = well_refraction(&g(k0, s), kap, &spec()).unwrap();
            assert!((r.total - want).abs() < 1e-9 * want.abs().max(1.0), "{k0} {s} {kap}: {}", r.total);
            assert!((r.total - (r.r_plus + r.r_minus + r.r_kappa)).abs() < 1e-12);
            assert!(r.r_minus <= 0.0);
        }
    }

    #[test]
    fn zeta_route_reference_values() {
        for (k0, s, kap, want) in REFERENCE {
            let z = zeta_oracle_refraction(&g(k0, s), kap, &spec()).unwrap();
            assert!((z - want).abs() < 1e-9 * want.abs().max(1.0), "{k0} {s} {kap}: {z}");
        }
        assert!(zeta_oracle_refraction(&g(1.0, 10.0), 5.0, &spec()).is_err());
    }

    #[test]
    fn routes_agree_for_two_gaussian_spectrum() {
        let pair = GaussianPair::new(-100.0, 0.8, 0.6, 2.4).unwrap();
        for kap in [0.3, 1.0, 1.8] {
            let a = well_refraction(&pair, kap, &spec()).unwrap().total;
            let b = zeta_oracle_refraction(&pair, kap, &spec()).unwrap();
            assert!((a - b).abs() < 1e-8, "kappa {kap}: {a} vs {b}");
        }
    }

    #[test]
    fn free_q_forms() {
        for (k0, s) in [(1.0, 1.0), (3.0, 1.0), (5.0, 1.0), (0.7, 0.4)] {
            let p = g(k0, s);
            let closed = gaussian_free_q(&p);
            let mom = free_q(&p, &spec()).unwrap();
            let zeta = free_q_zeta(&p, &spec()).unwrap();
            assert!((closed - mom).abs() < 1e-10, "{k0} {s}");
            assert!((closed - zeta).abs() < 1e-10, "{k0} {s}");
        }
        assert!((gaussian_free_q(&g(1.0, 1.0)) - 1.279_976_149_130_82).abs() < 1e-13);
        let q = gaussian_free_q(&g(5.0, 1.0));
        assert!((q - 1.010_316_156_491_86).abs() < 1e-13);
        // Q → 1 + 1/(4(k0σ)²) for large k0σ
        let q = gaussian_free_q(&g(50.0, 1.0));
        assert!((q - 1.0 - 1.0 / 10_000.0).abs() < 1e-6);
    }

    #[test]
    fn kappa_zero_is_free_q() {
        let p = g(2.0, 0.7);
        let r = well_refraction(&p, 0.0, &spec()).unwrap();
        assert_eq!(r.total.to_bits(), free_q(&p, &spec()).unwrap().to_bits());
        assert_eq!(r.r_kappa, 0.0);
        let r = well_refraction(&p, 1e-8, &spec()).unwrap();
        assert!((r.total - r.q_free).abs() < 1e-8);
    }

    #[test]
    fn barrier_values() {
        let p = g(1.0, 2.0);
        assert_eq!(barrier_refraction(&p, 0.0, &spec()).unwrap(), free_q(&p, &spec()).unwrap());
        assert!(barrier_refraction(&p, 10.0, &spec()).unwrap().abs() < 1e-6);
        let r = barrier_refraction(&g(10.0, 1.0), 1.0, &spec()).unwrap();
        assert!((r - 10.0 / 99f64.sqrt()).abs() < 1e-2);
        // small barrier approaches Q
        let r = barrier_refraction(&g(2.0, 1.0), 1e-6, &spec()).unwrap();
        assert!((r - gaussian_free_q(&g(2.0, 1.0))).abs() < 1e-8);
    }

    #[test]
    fn deep_well_forms() {
        let parts = deep_well_r_kappa(&g(2.0, 0.5), 3.0, &spec()).unwrap();
        assert!((parts.r_kappa.to_f64().unwrap() - -4.307_619_726_153_64).abs() < 1e-8);
        assert!(parts.scaled_deviation() < 1e-9);
        let direct = well_refraction(&g(2.0, 0.5), 3.0, &spec()).unwrap().r_kappa;
        assert!((direct - -4.307_619_726_153_64).abs() < 1e-8);
        let parts = deep_well_r_kappa(&g(1.0, 1.0), 2.0, &spec()).unwrap();
        assert!((parts.r_kappa.to_f64().unwrap() - 192.888_729_218_64).abs() < 1e-7);
        let parts = deep_well_r_kappa(&g(2.0, 1.0), 3.0, &spec()).unwrap();
        assert!((parts.r_kappa.to_f64().unwrap() / -13_337.652_256_997_2 - 1.0).abs() < 1e-10);
        let zero = deep_well_r_kappa(&g(1.0, 1.0), 0.0, &spec()).unwrap();
        assert_eq!(zero.r_kappa.mantissa, 0.0);
        let small = deep_well_r_kappa(&g(1.0, 1.0), 1e-3, &spec()).unwrap();
        let mom = well_refraction(&g(1.0, 1.0), 1e-3, &spec()).unwrap().r_kappa;
        assert!((small.r_kappa.to_f64().unwrap() - mom).abs() < 1e-12);
    }

    #[test]
    fn deep_well_scaled_beyond_f64() {
        let p = g(1.0, 10.0);
        let parts = deep_well_r_kappa(&p, 3.0, &spec()).unwrap();
        assert!(parts.r_kappa.ln_abs() > 710.0);
        assert!(parts.r_kappa.to_f64().is_err());
        assert!(well_refraction(&p, 3.0, &spec()).is_err());
        let s = well_r_kappa_scaled(&p, 3.0, &spec()).unwrap();
        let rel = (s.ln_abs() - parts.r_kappa.ln_abs()).abs();
        assert!(rel < 1e-6, "{rel}");
    }

    #[test]
    fn im_z_oscillates() {
        let mut signs = Vec::new();
        for j in 0..=200 {
            let u = 1.0 + 9.0 * j as f64 / 200.0;
            signs.push(deep_well_z(u, 1.0, &spec()).unwrap().value.im.signum());
        }
        let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
        assert_eq!(changes, 11);
    }

    #[test]
    fn continuation() {
        for (k0, s, kap0) in [(2.0, 1.0, 1.0), (5.0, 0.5, 2.0)] {
            let r = barrier_well_continuation_check(&g(k0, s), kap0, &spec()).unwrap();
            assert!(r.path_deviation < 1e-9, "{}", r.path_deviation);
            assert!(r.well_deviation < 1e-8);
            assert!(r.cancellation_residual < 1e-8);
        }
        let err = continuation_check_with(&g(2.0, 1.0), 1.0, ContinuationBranch::Lower, 1e-7, &spec()).unwrap_err();
        assert!(matches!(err, Error::Consistency { ref check, .. } if check == "cancellation identity"));
        let r = barrier_well_continuation_check(&g(2.0, 1.0), 0.0, &spec()).unwrap();
        assert!(r.well_deviation == 0.0);
    }

    #[test]
    fn r_kappa_ignores_q0() {
        let a = well_refraction(&GaussianPacket::new(-5.0, 1.0, 2.0).unwrap(), 1.5, &spec()).unwrap();
        for q0 in [-50.0, -500.0] {
            let b = well_refraction(&GaussianPacket::new(q0, 1.0, 2.0).unwrap(), 1.5, &spec()).unwrap();
            assert!((a.r_kappa - b.r_kappa).abs() <= 1e-12 * a.r_kappa.abs());
        }
    }

    #[test]
    fn semi_infinite_positive_term_agrees() {
        let p = g(2.0, 1.0);
        let a = positive_term_semi_infinite(&p, 1.0, &spec()).unwrap().value;
        let b = well_refraction(&p, 1.0, &spec()).unwrap().r_plus;
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn scaled_value() {
        let v = ScaledValue::new(-2.0, 800.0);
        assert!(v.to_f64().is_err());
        assert_eq!(v.signum(), -1.0);
        assert!((v.ln_abs() - (800.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(ScaledValue::new(0.0, 1e4).to_f64().unwrap(), 0.0);
        assert_eq!(ScaledValue::from_f64(3.5).to_f64().unwrap(), 3.5);
    }
}
