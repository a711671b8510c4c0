//! Physical parameter types and unit conventions.
//!
//! Everything defaults to atomic units (`mass = hbar = 1`). A well occupies
//! `-a < q < -b` with the arrival point at the origin, so `a > b > 0` and the
//! width is `L = a - b`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, validation, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    mass: f64,
    hbar: f64,
}

impl PhysicalConstants {
    pub fn new(mass: f64, hbar: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return validation(format!("mass must be positive and finite, got {mass}"));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return validation(format!("hbar must be positive and finite, got {hbar}"));
        }
        Ok(Self { mass, hbar })
    }

    pub fn atomic() -> Self {
        Self {
            mass: 1.0,
            hbar: 1.0,
        }
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Group velocity `ħk/μ` of wavenumber `k`.
    pub fn velocity(&self, k: f64) -> f64 {
        self.hbar * k / self.mass
    }

    /// Wavenumber `sqrt(2μE)/ħ` for a non-negative energy.
    pub fn wavenumber(&self, energy: f64) -> f64 {
        (2.0 * self.mass * energy).sqrt() / self.hbar
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::atomic()
    }
}

/// Rectangular well `V(q) = -V0` on `-a < q < -b`.
///
/// The same geometry describes a barrier of height `V0` when the barrier
/// routines are used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WellGeometry {
    depth: f64,
    edge_far: f64,
    edge_near: f64,
}

impl WellGeometry {
    /// `depth` is `V0 >= 0` (zero is the free limit), `edge_far` is `a`,
    /// `edge_near` is `b`.
    pub fn new(depth: f64, edge_far: f64, edge_near: f64) -> Result<Self> {
        if !(depth.is_finite() && depth >= 0.0) {
            return validation(format!("well depth must be finite and >= 0, got {depth}"));
        }
        if !(edge_near.is_finite() && edge_near > 0.0) {
            return validation(format!("near edge b must be positive, got {edge_near}"));
        }
        if !(edge_far.is_finite() && edge_far > edge_near) {
            return validation(format!(
                "far edge a must exceed near edge b (a = {edge_far}, b = {edge_near})"
            ));
        }
        Ok(Self {
            depth,
            edge_far,
            edge_near,
        })
    }

    /// Well of width `width` whose near edge sits at `-edge_near`.
    pub fn with_width(depth: f64, width: f64, edge_near: f64) -> Result<Self> {
        Self::new(depth, edge_near + width, edge_near)
    }

    pub fn depth(&self) -> f64 {
        self.depth
    }

    pub fn edge_far(&self) -> f64 {
        self.edge_far
    }

    pub fn edge_near(&self) -> f64 {
        self.edge_near
    }

    pub fn width(&self) -> f64 {
        self.edge_far - self.edge_near
    }

    pub fn kappa(&self, c: &PhysicalConstants) -> f64 {
        kappa(self, c)
    }
}

/// `κ = sqrt(2 μ V0) / ħ`.
pub fn kappa(well: &WellGeometry, c: &PhysicalConstants) -> f64 {
    (2.0 * c.mass() * well.depth()).sqrt() / c.hbar()
}

/// Depth `V0 = (ħκ)² / 2μ` that produces wavenumber `kappa`.
pub fn depth_for_kappa(kappa: f64, c: &PhysicalConstants) -> f64 {
    let p = c.hbar() * kappa;
    p * p / (2.0 * c.mass())
}

/// High-energy refraction index `k0 / sqrt(k0² + κ²) = sqrt(E0 / (E0 + V0))`.
pub fn classical_refraction(k0: f64, kappa: f64) -> Result<f64> {
    if !(k0 > 0.0) {
        return domain(format!("classical refraction needs k0 > 0, got {k0}"));
    }
    if !(kappa >= 0.0) {
        return domain(format!("kappa must be >= 0, got {kappa}"));
    }
    Ok(k0 / k0.hypot(kappa))
}

/// Initial position and momentum of a classical particle or packet centre.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinematicState {
    pub q0: f64,
    pub k0: f64,
}

impl KinematicState {
    pub fn new(q0: f64, k0: f64) -> Result<Self> {
        if !q0.is_finite() || !k0.is_finite() {
            return validation("position and wavenumber must be finite");
        }
        Ok(Self { q0, k0 })
    }

    pub fn momentum(&self, c: &PhysicalConstants) -> f64 {
        c.hbar() * self.k0
    }

    pub fn energy(&self, c: &PhysicalConstants) -> f64 {
        let p = self.momentum(c);
        p * p / (2.0 * c.mass())
    }

    pub fn velocity(&self, c: &PhysicalConstants) -> f64 {
        c.velocity(self.k0)
    }
}

/// JSON parameter block. Absent keys fall back to defaults, unknown keys are
/// rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hbar: Option<f64>,
    #[serde(rename = "V0", default, skip_serializing_if = "Option::is_none")]
    pub v0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q0: Option<f64>,
}

impl ParameterConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| crate::Error::Config(e.to_string()))
    }

    pub fn constants(&self) -> Result<PhysicalConstants> {
        PhysicalConstants::new(self.mass.unwrap_or(1.0), self.hbar.unwrap_or(1.0))
    }

    /// Overlay `other` on top of `self`: keys set in `other` win.
    pub fn merged_with(&self, other: &ParameterConfig) -> ParameterConfig {
        ParameterConfig {
            mass: other.mass.or(self.mass),
            hbar: other.hbar.or(self.hbar),
            v0: other.v0.or(self.v0),
            a: other.a.or(self.a),
            b: other.b.or(self.b),
            k0: other.k0.or(self.k0),
            sigma: other.sigma.or(self.sigma),
            q0: other.q0.or(self.q0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_values() {
        let c = PhysicalConstants::atomic();
        let w = WellGeometry::new(0.5, 3.0, 1.0).unwrap();
        assert!((kappa(&w, &c) - 1.0).abs() < 1e-15);
        let w = WellGeometry::new(12.5, 3.0, 1.0).unwrap();
        assert!((kappa(&w, &c) - 5.0).abs() < 1e-15);
        let w = WellGeometry::new(0.0, 3.0, 1.0).unwrap();
        assert_eq!(kappa(&w, &c), 0.0);
        let w = WellGeometry::new(1e-20, 3.0, 1.0).unwrap();
        assert!(kappa(&w, &c) < 1e-9);
    }

    #[test]
    fn kappa_scaling() {
        let w1 = WellGeometry::new(2.0, 3.0, 1.0).unwrap();
        let w4 = WellGeometry::new(8.0, 3.0, 1.0).unwrap();
        let c1 = PhysicalConstants::new(1.5, 0.7).unwrap();
        let c4 = PhysicalConstants::new(6.0, 0.7).unwrap();
        assert!((kappa(&w4, &c1) / kappa(&w1, &c1) - 2.0).abs() < 1e-14);
        assert!((kappa(&w1, &c4) / kappa(&w1, &c1) - 2.0).abs() < 1e-14);
        assert!((depth_for_kappa(kappa(&w1, &c1), &c1) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn classical_refraction_values() {
        let r = classical_refraction(5.0, 1.0).unwrap();
        assert!((r - 5.0 / 26f64.sqrt()).abs() < 1e-15);
        assert!((r - 0.980581).abs() < 1e-6);
        assert_eq!(classical_refraction(3.0, 0.0).unwrap(), 1.0);
        assert!(1.0 - classical_refraction(1e8, 1.0).unwrap() < 1e-15);
        assert!(classical_refraction(0.0, 1.0).is_err());
        assert!(classical_refraction(-1.0, 1.0).is_err());
    }

    #[test]
    fn geometry_invariants() {
        assert!(WellGeometry::new(1.0, 1.0, 1.0).is_err());
        assert!(WellGeometry::new(1.0, 2.0, 0.0).is_err());
        assert!(WellGeometry::new(-1.0, 2.0, 1.0).is_err());
        let w = WellGeometry::with_width(1.0, 2.0, 1.0).unwrap();
        assert_eq!(w.edge_far(), 3.0);
        assert_eq!(w.width(), 2.0);
        assert!(PhysicalConstants::new(0.0, 1.0).is_err());
        assert!(PhysicalConstants::new(1.0, -1.0).is_err());
    }

    #[test]
    fn kinematics() {
        let c = PhysicalConstants::new(2.0, 0.5).unwrap();
        let s = KinematicState::new(-10.0, -4.0).unwrap();
        assert_eq!(s.momentum(&c), -2.0);
        assert_eq!(s.energy(&c), 1.0);
        assert!(s.velocity(&c) < 0.0);
    }

    #[test]
    fn config_json() {
        let cfg = ParameterConfig::from_json(r#"{"mass":1.0,"V0":0.5,"k0":5,"sigma":10}"#).unwrap();
        assert_eq!(cfg.v0, Some(0.5));
        assert_eq!(cfg.a, None);
        assert!(ParameterConfig::from_json(r#"{"sigmaa": 1}"#).is_err());
        assert!(ParameterConfig::from_json("{not json").is_err());
        let over = ParameterConfig {
            k0: Some(2.0),
            ..Default::default()
        };
        assert_eq!(cfg.merged_with(&over).k0, Some(2.0));
        assert_eq!(cfg.merged_with(&over).sigma, Some(10.0));
    }

    proptest::proptest! {
        #[test]
        fn refraction_monotone(k in 0.01f64..50.0, dk in 0.001f64..5.0, kap in 0.0f64..20.0, dkap in 0.001f64..5.0) {
            let r = classical_refraction(k, kap).unwrap();
            proptest::prop_assert!(r > 0.0 && r <= 1.0);
            proptest::prop_assert!(classical_refraction(k + dk, kap).unwrap() >= r);
            proptest::prop_assert!(classical_refraction(k, kap + dkap).unwrap() < r);
        }
    }
}
