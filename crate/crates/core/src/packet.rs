//! Incident wave packets seen through the momentum-space functionals the
//! traversal formulas consume.
//!
//! Everything is phrased in terms of the continued density
//! `p(z) = Ψ̃(z)·conj(Ψ̃(conj z))`, which is entire for the packets here and
//! reduces to `|Ψ̃(k)|²` on the real axis. The initial-position phase of `Ψ̃`
//! cancels inside `p`, so none of the functionals depend on `q0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};
use crate::quadrature::GaussianEnvelope;

/// Gaussian bound on the momentum density:
/// `|Ψ̃(k)|² ≤ peak·exp(-(k-c)²/(2 sigma_eff²))` for the nearest
/// `c ∈ [center_lo, center_hi]`, and `|Ψ̃(k)|² ≤ peak` between the centres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityEnvelope {
    pub center_lo: f64,
    pub center_hi: f64,
    pub sigma_eff: f64,
    pub peak: f64,
}

impl DensityEnvelope {
    /// Envelope of `k ↦ |Ψ̃(k)|²` restricted to `k > 0`.
    pub fn positive_branch(&self) -> GaussianEnvelope {
        GaussianEnvelope {
            center: self.center_hi,
            sigma_eff: self.sigma_eff,
            peak: self.peak,
        }
    }

    /// Envelope of `k ↦ |Ψ̃(-k)|²` restricted to `k > 0`.
    pub fn negative_branch(&self) -> GaussianEnvelope {
        GaussianEnvelope {
            center: -self.center_lo,
            sigma_eff: self.sigma_eff,
            peak: self.peak,
        }
    }
}

/// Momentum-space description of an incident packet.
pub trait PacketSpectrum: Send + Sync {
    /// Reference wavenumber `k0` (the carrier removed from the autocorrelation
    /// and the one that sets `v0 = ħk0/μ`).
    fn carrier(&self) -> f64;

    /// `p(z)·e^{-ln_shift}`, evaluated without forming `p(z)` itself.
    fn continued_density_scaled(&self, z: Complex64, ln_shift: f64) -> Complex64;

    /// Upper bound on `ln|2p(ik)|` for `0 ≤ k ≤ kappa`.
    fn ln_imag_axis_bound(&self, kappa: f64) -> f64;

    /// Envelope autocorrelation `Φ(ζ) = ∫ |Ψ̃(k)|² e^{i(k-k0)ζ} dk`.
    fn autocorrelation(&self, zeta: f64) -> Complex64;

    /// `(A, s)` with `|Φ(ζ)| ≤ A·exp(-ζ²/(8 s²))`.
    fn autocorrelation_envelope(&self) -> (f64, f64);

    fn density_envelope(&self) -> DensityEnvelope;

    /// Probability (or an upper bound on it) that the position-space packet
    /// lies to the right of `x` at the initial time.
    fn position_mass_right_of(&self, x: f64) -> f64;

    /// True when `Ψ̃` has no poles, so the contour arguments carry no residues.
    fn is_entire(&self) -> bool;

    fn continued_density(&self, z: Complex64) -> Complex64 {
        self.continued_density_scaled(z, 0.0)
    }

    /// `|Ψ̃(k)|²`.
    fn momentum_density(&self, k: f64) -> f64 {
        self.continued_density(Complex64::new(k, 0.0)).re
    }

    /// `Im[2 Ψ̃(ik) Ψ̃*(-ik)]`.
    fn imag_axis_weight(&self, k: f64) -> f64 {
        self.imag_axis_weight_scaled(k, 0.0)
    }

    /// `Im[2 Ψ̃(ik) Ψ̃*(-ik)]·e^{-ln_shift}`.
    fn imag_axis_weight_scaled(&self, k: f64, ln_shift: f64) -> f64 {
        2.0 * self.continued_density_scaled(Complex64::new(0.0, k), ln_shift).im
    }

    /// Imaginary-axis weight continued off the axis:
    /// `W(z) = -i(p(iz) - p(-iz))`, which equals `Im[2p(ik)]` for real `k`
    /// because `p(-ik) = conj p(ik)`.
    fn imag_axis_weight_complex(&self, z: Complex64) -> Complex64 {
        let i = Complex64::new(0.0, 1.0);
        -i * (self.continued_density(i * z) - self.continued_density(-i * z))
    }

    /// `Φ(ζ)` by direct quadrature of the momentum density; used as a check on
    /// closed forms.
    fn autocorrelation_by_quadrature(
        &self,
        zeta: f64,
        spec: &crate::quadrature::QuadSpec,
    ) -> Result<Complex64> {
        let env = self.density_envelope();
        let span = 40.0 * env.sigma_eff;
        let k0 = self.carrier();
        let r = crate::quadrature::integrate_with_breakpoints(
            |k: f64| Complex64::new(0.0, (k - k0) * zeta).exp() * self.momentum_density(k),
            &[env.center_lo - span, env.center_lo, env.center_hi, env.center_hi + span],
            spec,
        )?;
        Ok(r.value)
    }
}

/// Envelope derivatives at the origin, needed by the high-energy expansion.
pub trait EvenAutocorrelationDerivatives: PacketSpectrum {
    /// `Φ^{(2j)}(0)`.
    fn autocorrelation_even_derivative(&self, j: u32) -> f64;
}

/// `ψ(q) ∝ exp(-(q-q0)²/(4σ²) + i k0 q)`, i.e.
/// `Ψ̃(k) = (2σ²/π)^{1/4} exp(-σ²(k-k0)² - i q0 (k-k0))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacket {
    q0: f64,
    sigma: f64,
    k0: f64,
}

impl GaussianPacket {
    pub fn new(q0: f64, sigma: f64, k0: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return validation(format!("packet width sigma must be positive, got {sigma}"));
        }
        if !q0.is_finite() || !k0.is_finite() {
            return validation("packet centre and wavenumber must be finite");
        }
        Ok(Self { q0, sigma, k0 })
    }

    pub fn q0(&self) -> f64 {
        self.q0
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    fn ln_peak(&self) -> f64 {
        (2.0 / PI).sqrt().ln() + self.sigma.ln()
    }

    /// `Ψ̃(k)` itself, including the `q0` phase.
    pub fn amplitude(&self, k: Complex64) -> Complex64 {
        let s2 = self.sigma * self.sigma;
        let d = k - self.k0;
        let norm = (2.0 * s2 / PI).powf(0.25);
        (-s2 * d * d - Complex64::new(0.0, self.q0) * d).exp() * norm
    }
}

/// `√(2/π)σ exp(-2σ²(k∓k0)²)`.
pub fn gaussian_momentum_density(p: &GaussianPacket, k: f64) -> f64 {
    p.momentum_density(k)
}

/// `2√(2/π)σ exp(2σ²(k²-k0²)) sin(4σ²k0k)`.
pub fn gaussian_imag_axis_weight(p: &GaussianPacket, k: f64) -> f64 {
    let s2 = p.sigma * p.sigma;
    2.0 * (p.ln_peak() + 2.0 * s2 * (k * k - p.k0 * p.k0)).exp() * (4.0 * s2 * p.k0 * k).sin()
}

/// `Φ(ζ) = exp(-ζ²/(8σ²))`.
pub fn gaussian_autocorrelation(p: &GaussianPacket, zeta: f64) -> Complex64 {
    Complex64::new((-zeta * zeta / (8.0 * p.sigma * p.sigma)).exp(), 0.0)
}

impl PacketSpectrum for GaussianPacket {
    fn carrier(&self) -> f64 {
        self.k0
    }

    fn continued_density_scaled(&self, z: Complex64, ln_shift: f64) -> Complex64 {
        let d = z - self.k0;
        (d * d * (-2.0 * self.sigma * self.sigma) + (self.ln_peak() - ln_shift)).exp()
    }

    fn ln_imag_axis_bound(&self, kappa: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        2f64.ln() + self.ln_peak() + 2.0 * s2 * (kappa * kappa - self.k0 * self.k0)
    }

    fn autocorrelation(&self, zeta: f64) -> Complex64 {
        gaussian_autocorrelation(self, zeta)
    }

    fn autocorrelation_envelope(&self) -> (f64, f64) {
        (1.0, self.sigma)
    }

    fn density_envelope(&self) -> DensityEnvelope {
        DensityEnvelope {
            center_lo: self.k0,
            center_hi: self.k0,
            sigma_eff: 0.5 / self.sigma,
            peak: self.ln_peak().exp(),
        }
    }

    fn position_mass_right_of(&self, x: f64) -> f64 {
        0.5 * libm::erfc((x - self.q0) / (std::f64::consts::SQRT_2 * self.sigma))
    }

    fn is_entire(&self) -> bool {
        true
    }

    fn imag_axis_weight_scaled(&self, k: f64, ln_shift: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        2.0 * (self.ln_peak() + 2.0 * s2 * (k * k - self.k0 * self.k0) - ln_shift).exp()
            * (4.0 * s2 * self.k0 * k).sin()
    }
}

impl EvenAutocorrelationDerivatives for GaussianPacket {
    fn autocorrelation_even_derivative(&self, j: u32) -> f64 {
        // exp(-ζ²/(8σ²)) = Σ (-1)^j ζ^{2j} / (j! (8σ²)^j)
        let c = 8.0 * self.sigma * self.sigma;
        let mut v = 1.0;
        for m in 1..=j {
            // (2m)(2m-1)/m / c per step
            v *= -((2 * m) as f64) * ((2 * m - 1) as f64) / (m as f64 * c);
        }
        v
    }
}

/// Equal-weight superposition of two Gaussians with a common centre and width
/// but different carriers `k1`, `k2`. Its momentum density is bimodal and
/// asymmetric about `(k1+k2)/2` whenever the modes overlap unevenly with
/// negative momenta, which makes it a useful non-Gaussian test spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPair {
    q0: f64,
    sigma: f64,
    k1: f64,
    k2: f64,
    norm2: f64,
}

impl GaussianPair {
    pub fn new(q0: f64, sigma: f64, k1: f64, k2: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return validation(format!("packet width sigma must be positive, got {sigma}"));
        }
        if ![q0, k1, k2].iter().all(|v| v.is_finite()) {
            return validation("packet centre and wavenumbers must be finite");
        }
        let d = k1 - k2;
        let overlap = (-sigma * sigma * d * d / 2.0).exp();
        Ok(Self {
            q0,
            sigma,
            k1,
            k2,
            norm2: 1.0 / (2.0 + 2.0 * overlap),
        })
    }

    /// `(coefficient, centre)` of the Gaussian terms `c·√(2/π)σ e^{-2σ²(k-m)²}`
    /// that make up `p(k)`.
    fn terms(&self) -> [(f64, f64); 3] {
        let d = self.k1 - self.k2;
        let cross = 2.0 * self.norm2 * (-self.sigma * self.sigma * d * d / 2.0).exp();
        [
            (self.norm2, self.k1),
            (self.norm2, self.k2),
            (cross, 0.5 * (self.k1 + self.k2)),
        ]
    }
}

impl PacketSpectrum for GaussianPair {
    fn carrier(&self) -> f64 {
        0.5 * (self.k1 + self.k2)
    }

    fn continued_density_scaled(&self, z: Complex64, ln_shift: f64) -> Complex64 {
        let s2 = self.sigma * self.sigma;
        let ln_peak = (2.0 / PI).sqrt().ln() + self.sigma.ln() - ln_shift;
        self.terms()
            .iter()
            .map(|&(c, m)| {
                let d = z - m;
                (d * d * (-2.0 * s2) + ln_peak).exp() * c
            })
            .sum()
    }

    fn ln_imag_axis_bound(&self, kappa: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        let ln_peak = (2.0 / PI).sqrt().ln() + self.sigma.ln();
        let total: f64 = self.terms().iter().map(|t| t.0).sum();
        let m_min = self
            .terms()
            .iter()
            .map(|t| t.1.abs())
            .fold(f64::INFINITY, f64::min);
        2f64.ln() + total.ln() + ln_peak + 2.0 * s2 * (kappa * kappa - m_min * m_min)
    }

    fn autocorrelation(&self, zeta: f64) -> Complex64 {
        let env = (-zeta * zeta / (8.0 * self.sigma * self.sigma)).exp();
        let kc = self.carrier();
        self.terms()
            .iter()
            .map(|&(c, m)| Complex64::new(0.0, (m - kc) * zeta).exp() * (c * env))
            .sum()
    }

    fn autocorrelation_envelope(&self) -> (f64, f64) {
        (self.terms().iter().map(|t| t.0).sum(), self.sigma)
    }

    fn density_envelope(&self) -> DensityEnvelope {
        let total: f64 = self.terms().iter().map(|t| t.0).sum();
        DensityEnvelope {
            center_lo: self.k1.min(self.k2),
            center_hi: self.k1.max(self.k2),
            sigma_eff: 0.5 / self.sigma,
            peak: total * (2.0 / PI).sqrt() * self.sigma,
        }
    }

    /// Upper bound: `|ψ|² ≤ 4N²·G(q)²` for the common Gaussian envelope `G`.
    fn position_mass_right_of(&self, x: f64) -> f64 {
        let g = 0.5 * libm::erfc((x - self.q0) / (std::f64::consts::SQRT_2 * self.sigma));
        (4.0 * self.norm2 * g).min(1.0)
    }

    fn is_entire(&self) -> bool {
        true
    }
}
