//! Closed-form expansions of the well index in four regimes.
//!
//! Each routine returns an [`ExpansionResult`] whose `truncation_estimate` is
//! the magnitude of the first omitted term. Regime checks only add warnings;
//! comparing against the quadrature routes is the real diagnostic.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domain::PhysicalConstants;
use crate::error::{domain, Error, Result};
use crate::packet::{EvenAutocorrelationDerivatives, GaussianPacket};
use crate::quadrature::QuadSpec;
use crate::refraction::{deep_well_gamma, deep_well_z, gaussian_free_q, ScaledValue};
use crate::specfun::{dawson, struve_h0, struve_l0, struve_l1};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    HighEnergy,
    WidePacket,
    NarrowShallow,
    DeepWell,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionResult {
    pub value: f64,
    pub terms_used: usize,
    pub truncation_estimate: f64,
    pub regime: Regime,
    pub warnings: Vec<String>,
    /// Index of the smallest term of an asymptotic series, where that is the
    /// best place to stop.
    pub optimal_index: Option<usize>,
}

/// Double series in `1/k0²` and `x = V0/E0`:
///
/// ```text
/// R ~ Σ_j Σ_l (-1)^{j+l} 4^{-l} k0^{-2j} C(2j+2l, 2l) C(2l, l) x^l Φ^{(2j)}(0)
/// ```
///
/// The `j = 0` slice is the binomial series of `(1 + x)^{-1/2}`, so `|x| < 1`
/// is required. The `l` sum runs to `l_max` for every `j`.
pub fn high_energy_r<S: EvenAutocorrelationDerivatives + ?Sized>(
    s: &S,
    e0: f64,
    v0: f64,
    j_max: usize,
    l_max: usize,
    c: &PhysicalConstants,
) -> Result<ExpansionResult> {
    if !(e0 > 0.0 && e0.is_finite()) {
        return domain(format!("incident energy must be positive, got {e0}"));
    }
    let x = v0 / e0;
    if !(x.abs() < 1.0) {
        return domain(format!(
            "high-energy series diverges for |V0/E0| >= 1 (got {x})"
        ));
    }
    let k0 = c.wavenumber(e0);
    // a_{j,0} = (-1)^j Φ^{(2j)}(0) / k0^{2j}
    let slice_head = |j: usize| {
        let sign = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * s.autocorrelation_even_derivative(j as u32) / k0.powi(2 * j as i32)
    };
    let mut value = 0.0;
    let mut omitted_l = 0.0;
    for j in 0..=j_max {
        let mut a = slice_head(j);
        for l in 0..=l_max {
            value += a;
            let (jf, lf) = (j as f64, l as f64);
            a *= (2.0 * jf + 2.0 * lf + 2.0) * (2.0 * jf + 2.0 * lf + 1.0) / ((lf + 1.0) * (lf + 1.0))
                * (-x / 4.0);
        }
        omitted_l += a.abs();
    }
    let omitted_j = slice_head(j_max + 1).abs();
    let mut warnings = Vec::new();
    if x.abs() > 0.5 {
        warnings.push(format!("|V0/E0| = {:.3} is close to the radius of convergence", x.abs()));
    }
    Ok(ExpansionResult {
        value,
        terms_used: (j_max + 1) * (l_max + 1),
        truncation_estimate: omitted_j + omitted_l,
        regime: Regime::HighEnergy,
        warnings,
        optimal_index: None,
    })
}

/// `χ_n = d^{2n}/dk^{2n} (k² + κ²)^{-1/2}` at `k`, for `n = 0..=n_max`.
///
/// Uses `f^{(m+1)} = -[(2m+1) k f^{(m)} + m² f^{(m-1)}] / (k² + κ²)`.
pub fn chi_coefficients(k: f64, kappa: f64, n_max: usize) -> Vec<f64> {
    let q = k * k + kappa * kappa;
    let mut prev = 0.0;
    let mut cur = 1.0 / q.sqrt();
    let mut out = vec![cur];
    for m in 0..2 * n_max {
        let mf = m as f64;
        let next = -((2.0 * mf + 1.0) * k * cur + mf * mf * prev) / q;
        prev = cur;
        cur = next;
        if m % 2 == 1 {
            out.push(cur);
        }
    }
    out
}

/// Highest order accepted by [`wide_packet_r`].
pub const WIDE_PACKET_MAX_ORDER: usize = 6;

/// Wide-packet expansion about the carrier:
///
/// ```text
/// R ~ k0/sqrt(k0² + κ²) + k0 Σ_{n=1}^{n_max} χ_n / ((2σ)^{2n} 2^n n!)
/// ```
///
/// Exponentially small contributions `O(e^{-2σ²k0²})` are dropped. The series
/// is asymptotic; `optimal_index` reports where its terms stop decreasing.
pub fn wide_packet_r(p: &GaussianPacket, kappa: f64, n_max: usize) -> Result<ExpansionResult> {
    if n_max > WIDE_PACKET_MAX_ORDER {
        return domain(format!(
            "wide-packet order {n_max} exceeds {WIDE_PACKET_MAX_ORDER}"
        ));
    }
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return domain(format!("kappa must be finite and >= 0, got {kappa}"));
    }
    let (k0, sigma) = (p.k0(), p.sigma());
    if !(k0 > 0.0) {
        return domain(format!("wide-packet expansion needs k0 > 0, got {k0}"));
    }
    const HORIZON: usize = 40;
    let chi = chi_coefficients(k0, kappa, HORIZON);
    let mut terms = Vec::with_capacity(HORIZON + 1);
    let mut weight = 1.0;
    for (n, c) in chi.iter().enumerate() {
        if n > 0 {
            weight /= 4.0 * sigma * sigma * 2.0 * n as f64;
        }
        terms.push(k0 * c * weight);
    }
    let value: f64 = terms[..=n_max].iter().sum();
    let optimal = (1..terms.len())
        .take_while(|&n| n == 1 || terms[n].abs() < terms[n - 1].abs())
        .last()
        .unwrap_or(1);
    let mut warnings = Vec::new();
    if sigma * k0 < 3.0 {
        warnings.push(format!("sigma*k0 = {:.3} is not large", sigma * k0));
    }
    if n_max > optimal {
        warnings.push(format!("terms grow beyond n = {optimal}"));
    }
    Ok(ExpansionResult {
        value,
        terms_used: n_max + 1,
        truncation_estimate: terms[n_max + 1].abs(),
        regime: Regime::WidePacket,
        warnings,
        optimal_index: Some(optimal),
    })
}

/// `G_m = ∫_0^∞ ζ^m e^{-aζ² + ibζ} dζ` for `m = 0..=m_max`, from
/// `G_{m+1} = (δ_{m0} + m G_{m-1} + ib G_m) / (2a)`.
pub fn gaussian_fourier_moments(a: f64, b: f64, m_max: usize) -> Vec<Complex64> {
    let ra = a.sqrt();
    let g0 = Complex64::new(
        0.5 * (PI / a).sqrt() * (-b * b / (4.0 * a)).exp(),
        dawson(b / (2.0 * ra)) / ra,
    );
    let mut out = vec![g0];
    let ib = Complex64::new(0.0, b);
    for m in 0..m_max {
        let delta = if m == 0 { 1.0 } else { 0.0 };
        let prev = if m == 0 { Complex64::new(0.0, 0.0) } else { out[m - 1] };
        let next = (delta + prev * m as f64 + ib * out[m]) / (2.0 * a);
        out.push(next);
    }
    out
}

/// Narrow-packet shallow-well series from `I₀(κζ) = Σ (κζ/2)^{2n}/(n!)²`:
///
/// ```text
/// R = Q + k0 Σ_{n>=1} (κ/2)^{2n}/(n!)² Im G_{2n},   a = 1/(8σ²), b = k0
/// ```
///
/// The sum converges for every `κ`; it is efficient when `σκ` is small.
pub fn narrow_shallow_r(p: &GaussianPacket, kappa: f64) -> Result<ExpansionResult> {
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return domain(format!("kappa must be finite and >= 0, got {kappa}"));
    }
    let (k0, sigma) = (p.k0(), p.sigma());
    if !(k0 > 0.0) {
        return domain(format!("narrow-packet series needs k0 > 0, got {k0}"));
    }
    let q = gaussian_free_q(p);
    let mut warnings = Vec::new();
    if sigma * kappa > 0.5 {
        warnings.push(format!("sigma*kappa = {:.3} is not small", sigma * kappa));
    }
    if kappa == 0.0 {
        return Ok(ExpansionResult {
            value: q,
            terms_used: 1,
            truncation_estimate: 0.0,
            regime: Regime::NarrowShallow,
            warnings,
            optimal_index: None,
        });
    }
    const MAX_TERMS: usize = 200;
    let g = gaussian_fourier_moments(1.0 / (8.0 * sigma * sigma), k0, 2 * MAX_TERMS + 2);
    let h2 = (kappa / 2.0).powi(2);
    let mut coef = 1.0;
    let mut omega = 0.0;
    let mut used = 1;
    let mut last = f64::INFINITY;
    for n in 1..=MAX_TERMS {
        coef *= h2 / (n as f64 * n as f64);
        let term = k0 * coef * g[2 * n].im;
        omega += term;
        used = n + 1;
        // the bound k0 coef |G_{2n}| also covers terms whose Im part vanishes by chance
        last = k0 * coef * g[2 * n].norm();
        if last <= 1e-17 * (q + omega).abs() {
            break;
        }
    }
    if !(q + omega).is_finite() {
        return Err(Error::Range("narrow-packet series overflowed".into()));
    }
    Ok(ExpansionResult {
        value: q + omega,
        terms_used: used,
        truncation_estimate: last,
        regime: Regime::NarrowShallow,
        warnings,
        optimal_index: None,
    })
}

/// Struve-function closed form
/// `Ω = √(2π) k0σ e^{-2k0²σ²}[k0 L₀(α) - k0 H₀(α) + κ L₁(α)]`, `α = 4k0κσ²`, kept for comparison only: it disagrees with the
/// quadrature value of `R - Q` (0.86e-4 against 4.0e-4 at k0 = 5, σ = 0.1,
/// κ = 0.2).
pub fn struve_omega_closed_form(p: &GaussianPacket, kappa: f64) -> Result<f64> {
    let (k0, sigma) = (p.k0(), p.sigma());
    let alpha = 4.0 * k0 * kappa * sigma * sigma;
    let bracket = k0 * struve_l0(alpha) - k0 * struve_h0(alpha) + kappa * struve_l1(alpha);
    let omega = (2.0 * PI).sqrt() * k0 * sigma * (-2.0 * k0 * k0 * sigma * sigma).exp() * bracket;
    if !omega.is_finite() {
        return Err(Error::Range(format!("Struve form overflows at alpha = {alpha}")));
    }
    Ok(omega)
}

/// Dominant deep-well term `R_κ ~ -2√(2/π) k0σ e^{2σ²(κ²-k0²)} Im z`, as a
/// scaled value. The dropped `γ` term bounds the error.
pub fn deep_well_dominant_scaled(
    p: &GaussianPacket,
    kappa: f64,
    spec: &QuadSpec,
) -> Result<(ScaledValue, f64)> {
    let (k0, sigma) = (p.k0(), p.sigma());
    if !(k0 > 0.0) || !(kappa > 0.0) {
        return domain("deep-well form needs k0 > 0 and kappa > 0");
    }
    let (u, v) = (sigma * kappa, sigma * k0);
    let z = deep_well_z(u, v, spec)?;
    let pref = 2.0 * (2.0 / PI).sqrt() * k0 * sigma;
    let value = ScaledValue::new(-z.value.im, pref.ln() + 2.0 * (u * u - v * v));
    let gamma = deep_well_gamma(u, v, spec)?;
    let dropped = pref * (-2.0 * v * v).exp() * gamma.value;
    Ok((value, dropped))
}

/// [`deep_well_dominant_scaled`] as a plain number.
pub fn deep_well_dominant_r(p: &GaussianPacket, kappa: f64, spec: &QuadSpec) -> Result<ExpansionResult> {
    let (value, dropped) = deep_well_dominant_scaled(p, kappa, spec)?;
    let mut warnings = Vec::new();
    if kappa < 2.0 * p.k0() {
        warnings.push(format!("kappa = {kappa} is not large against k0 = {}", p.k0()));
    }
    Ok(ExpansionResult {
        value: value.to_f64()?,
        terms_used: 1,
        truncation_estimate: dropped,
        regime: Regime::DeepWell,
        warnings,
        optimal_index: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::depth_for_kappa;
    use crate::refraction::{deep_well_r_kappa, well_refraction};

    fn g(k0: f64, sigma: f64) -> GaussianPacket {
        GaussianPacket::new(-100.0, sigma, k0).unwrap()
    }

    #[test]
    fn high_energy_binomial_slice() {
        let c = PhysicalConstants::atomic();
        let p = g(3.0, 1.0);
        let e0 = 4.5;
        let r = high_energy_r(&p, e0, 0.04 * e0, 0, 200, &c).unwrap();
        assert!((r.value - (1.0f64 / 1.04).sqrt()).abs() < 1e-10);
        let r = high_energy_r(&p, e0, -0.2 * e0, 0, 200, &c).unwrap();
        assert!((r.value - (1.0f64 / 0.8).sqrt()).abs() < 1e-10);
        assert!(high_energy_r(&p, e0, e0, 0, 10, &c).is_err());
        assert!(high_energy_r(&p, 0.0, 0.1, 0, 10, &c).is_err());
    }

    #[test]
    fn high_energy_free_expansion() {
        // V0 = 0 leaves the l = 0 column: Σ_j (2j)!/(j!(8σ²k0²)^j)
        let c = PhysicalConstants::atomic();
        let p = g(4.0, 1.5);
        let r = high_energy_r(&p, 8.0, 0.0, 2, 5, &c).unwrap();
        let y = 8.0 * 1.5f64.powi(2) * 16.0;
        let want = 1.0 + 2.0 / y + 12.0 / (y * y);
        assert!((r.value - want).abs() < 1e-15);
    }

    #[test]
    fn high_energy_vs_quadrature() {
        let c = PhysicalConstants::atomic();
        let p = g(10.0, 2.0);
        let e0 = 50.0;
        let r = high_energy_r(&p, e0, depth_for_kappa(1.0, &c), 2, 8, &c).unwrap();
        let q = well_refraction(&p, 1.0, &QuadSpec::default()).unwrap().total;
        assert!((r.value - q).abs() <= r.truncation_estimate, "{} vs {q}: {}", r.value, r.truncation_estimate);
    }

    #[test]
    fn chi_closed_forms() {
        let (k, kap) = (5.0, 1.0);
        let chi = chi_coefficients(k, kap, 2);
        let q: f64 = k * k + kap * kap;
        assert!((chi[0] - q.powf(-0.5)).abs() < 1e-16);
        assert!((chi[1] - (2.0 * k * k - kap * kap) * q.powf(-2.5)).abs() < 1e-16);
        // fourth derivative: 3(8k⁴ - 24k²κ² + 3κ⁴)(k²+κ²)^{-9/2}
        let d4 = 3.0 * (8.0 * k.powi(4) - 24.0 * k * k * kap * kap + 3.0 * kap.powi(4)) * q.powf(-4.5);
        assert!((chi[2] - d4).abs() < 1e-16);
    }

    #[test]
    fn wide_packet() {
        let p = g(5.0, 10.0);
        let r0 = wide_packet_r(&p, 1.0, 0).unwrap();
        assert_eq!(r0.value, 5.0 / 26f64.sqrt());
        let r1 = wide_packet_r(&p, 1.0, 1).unwrap();
        let corr = 5.0 * 49.0 * 26f64.powf(-2.5) / 800.0;
        assert!((r1.value - r0.value - corr).abs() < 1e-15);
        let q = well_refraction(&p, 1.0, &QuadSpec::default()).unwrap().total;
        for n in 1..=3 {
            let r = wide_packet_r(&p, 1.0, n).unwrap();
            assert!((r.value - q).abs() < 1e-6);
        }
        assert!(wide_packet_r(&p, 1.0, 7).is_err());
        assert!(!wide_packet_r(&g(1.0, 0.5), 1.0, 2).unwrap().warnings.is_empty());
    }

    #[test]
    fn wide_packet_is_asymptotic() {
        let p = g(1.0, 0.8);
        let r = wide_packet_r(&p, 0.5, 6).unwrap();
        let n = r.optimal_index.unwrap();
        assert!(n < 6, "{n}");
        assert!(r.warnings.iter().any(|w| w.contains("grow")));
    }

    #[test]
    fn fourier_moments_by_quadrature() {
        let (a, b) = (0.7, 2.3);
        let gm = gaussian_fourier_moments(a, b, 6);
        for (m, want) in gm.iter().enumerate() {
            let f = |z: f64| z.powi(m as i32) * (-a * z * z).exp();
            let spec = QuadSpec::new(1e-13, 1e-13, 2000).unwrap();
            let re = crate::quadrature::integrate_adaptive(|z| f(z) * (b * z).cos(), 0.0, 12.0, &spec).unwrap();
            let im = crate::quadrature::integrate_adaptive(|z| f(z) * (b * z).sin(), 0.0, 12.0, &spec).unwrap();
            assert!((want.re - re.value).abs() < 1e-11, "re {m}");
            assert!((want.im - im.value).abs() < 1e-11, "im {m}");
        }
    }

    #[test]
    fn narrow_shallow() {
        let p = g(5.0, 0.1);
        let r = narrow_shallow_r(&p, 0.0).unwrap();
        assert_eq!(r.value, gaussian_free_q(&p));
        let r = narrow_shallow_r(&p, 0.2).unwrap();
        let q = well_refraction(&p, 0.2, &QuadSpec::default()).unwrap().total;
        assert!((r.value - q).abs() < 1e-10, "{} {q}", r.value);
        let p = g(1.0, 0.5);
        let r = narrow_shallow_r(&p, 1.0).unwrap();
        let q = well_refraction(&p, 1.0, &QuadSpec::default()).unwrap().total;
        assert!((r.value - q).abs() < 1e-10);
    }

    #[test]
    fn struve_form_misses_the_correction() {
        let p = g(5.0, 0.1);
        let omega = struve_omega_closed_form(&p, 0.2).unwrap();
        let q = well_refraction(&p, 0.2, &QuadSpec::default()).unwrap().total;
        let true_omega = q - gaussian_free_q(&p);
        assert!((omega - 8.604e-5).abs() < 1e-7);
        assert!((true_omega - omega).abs() > 1e-4);
        assert_eq!(struve_omega_closed_form(&p, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn deep_well_dominant() {
        let p = g(1.0, 1.0);
        let spec = QuadSpec::default();
        let d = deep_well_dominant_r(&p, 5.0, &spec).unwrap();
        let full = deep_well_r_kappa(&p, 5.0, &spec).unwrap().r_kappa.to_f64().unwrap();
        assert!((d.value - full).abs() <= d.truncation_estimate * (1.0 + 1e-9) + 1e-9 * full.abs());
        let w = well_refraction(&p, 5.0, &spec).unwrap();
        assert!(w.r_kappa.abs() > 1e6 * (w.r_plus.abs() + w.r_minus.abs()));
    }
}
