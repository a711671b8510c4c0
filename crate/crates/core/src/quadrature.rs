//! Adaptive Gauss-Kronrod integration over real intervals and straight complex
//! segments.
//!
//! The engine is a global adaptive G10/K21 scheme: the panel with the largest
//! error estimate is bisected until the summed estimate meets the requested
//! tolerance. It is generic over real and complex integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};

/// Kronrod abscissae on [0, 1]; odd indices are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_351_996,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_5,
    0.149_445_554_002_916_9,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

/// Values an integrand may return.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
    fn is_finite_value(&self) -> bool;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let ok = |t: f64| t > 0.0 && t <= 1e-3;
        if !ok(abs_tol) || !ok(rel_tol) {
            return validation(format!(
                "quadrature tolerances must lie in (0, 1e-3], got abs {abs_tol:e}, rel {rel_tol:e}"
            ));
        }
        if max_subdivisions < 32 {
            return validation(format!(
                "max_subdivisions must be at least 32, got {max_subdivisions}"
            ));
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        })
    }

    /// Same limits with both tolerances replaced by `tol`.
    pub fn with_tol(&self, tol: f64) -> Result<Self> {
        Self::new(tol, tol, self.max_subdivisions)
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value)
    }
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-11,
            max_subdivisions: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult<T> {
    pub value: T,
    pub error_estimate: f64,
    pub evaluations: usize,
}

impl<T: QuadValue> QuadResult<T> {
    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> QuadResult<U> {
        QuadResult {
            value: f(self.value),
            error_estimate: self.error_estimate,
            evaluations: self.evaluations,
        }
    }

    pub fn scale(self, c: f64) -> QuadResult<T> {
        QuadResult {
            value: self.value * c,
            error_estimate: self.error_estimate * c.abs(),
            evaluations: self.evaluations,
        }
    }

    /// Sum of two independent results.
    pub fn plus(self, other: QuadResult<T>) -> QuadResult<T> {
        QuadResult {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            evaluations: self.evaluations + other.evaluations,
        }
    }
}

struct Panel<T> {
    lo: f64,
    hi: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One K21 panel with the QUADPACK error heuristic.
fn kronrod<T: QuadValue, F: Fn(f64) -> T>(f: &F, lo: f64, hi: f64) -> (T, f64) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut fv = [T::zero(); 21];
    fv[0] = f(center);
    for j in 0..10 {
        let dx = half * XGK[j];
        fv[2 * j + 1] = f(center - dx);
        fv[2 * j + 2] = f(center + dx);
    }
    let mut kres = fv[0] * WGK[10];
    let mut gres = T::zero();
    let mut resabs = fv[0].magnitude() * WGK[10];
    for j in 0..10 {
        let pair = fv[2 * j + 1] + fv[2 * j + 2];
        kres = kres + pair * WGK[j];
        resabs += WGK[j] * (fv[2 * j + 1].magnitude() + fv[2 * j + 2].magnitude());
        if j % 2 == 1 {
            gres = gres + pair * WG[j / 2];
        }
    }
    let mean = kres * 0.5;
    let mut resasc = WGK[10] * (fv[0] - mean).magnitude();
    for j in 0..10 {
        resasc += WGK[j] * ((fv[2 * j + 1] - mean).magnitude() + (fv[2 * j + 2] - mean).magnitude());
    }
    let h = half.abs();
    let resabs = resabs * h;
    let resasc = resasc * h;
    let mut err = ((kres - gres) * half).magnitude();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (kres * half, err)
}

/// Integrate `f` over `[lo, hi]`.
pub fn integrate_adaptive<T: QuadValue, F: Fn(f64) -> T>(
    f: F,
    lo: f64,
    hi: f64,
    spec: &QuadSpec,
) -> Result<QuadResult<T>> {
    integrate_with_breakpoints(f, &[lo, hi], spec)
}

/// Integrate `f` over `[points[0], points[last]]`, starting from one panel per
/// consecutive pair. Interior points are where the integrand is known to be
/// rough or sharply peaked.
pub fn integrate_with_breakpoints<T: QuadValue, F: Fn(f64) -> T>(
    f: F,
    points: &[f64],
    spec: &QuadSpec,
) -> Result<QuadResult<T>> {
    if points.len() < 2 {
        return validation("need at least two integration limits");
    }
    if points.iter().any(|p| !p.is_finite()) {
        return validation("integration limits must be finite");
    }
    if points.windows(2).any(|w| w[1] < w[0]) {
        return validation("integration limits must be nondecreasing");
    }
    let mut heap = BinaryHeap::new();
    let mut total = T::zero();
    let mut total_err = 0.0;
    let mut evaluations = 0;
    for w in points.windows(2) {
        if w[1] == w[0] {
            continue;
        }
        let (v, e) = kronrod(&f, w[0], w[1]);
        evaluations += 21;
        total = total + v;
        total_err += e;
        heap.push(Panel {
            lo: w[0],
            hi: w[1],
            value: v,
            error: e,
        });
    }
    if !total.is_finite_value() {
        return Err(Error::Range("integrand produced a non-finite value".into()));
    }
    let mut panels = heap.len();
    while total_err > spec.target(total.magnitude()) {
        if panels >= spec.max_subdivisions {
            return Err(Error::Accuracy {
                integral: format!("[{}, {}]", points[0], points[points.len() - 1]),
                estimate: total.magnitude(),
                error: total_err,
            });
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // The panel cannot be split further in floating point.
            heap.push(worst);
            return Err(Error::Accuracy {
                integral: format!("[{}, {}]", points[0], points[points.len() - 1]),
                estimate: total.magnitude(),
                error: total_err,
            });
        }
        let (v1, e1) = kronrod(&f, worst.lo, mid);
        let (v2, e2) = kronrod(&f, mid, worst.hi);
        evaluations += 42;
        total = total - worst.value + v1 + v2;
        total_err += e1 + e2 - worst.error;
        if !total.is_finite_value() {
            return Err(Error::Range("integrand produced a non-finite value".into()));
        }
        heap.push(Panel {
            lo: worst.lo,
            hi: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            lo: mid,
            hi: worst.hi,
            value: v2,
            error: e2,
        });
        panels += 1;
    }
    // Re-sum to shed the drift of incremental updates.
    let mut value = T::zero();
    let mut err = 0.0;
    for p in heap.iter() {
        value = value + p.value;
        err += p.error;
    }
    Ok(QuadResult {
        value,
        error_estimate: err,
        evaluations,
    })
}

/// `∫_lo^∞ f` through the map `x = lo + t/(1-t)`.
pub fn integrate_semi_infinite<T: QuadValue, F: Fn(f64) -> T>(
    f: F,
    lo: f64,
    spec: &QuadSpec,
) -> Result<QuadResult<T>> {
    let g = |t: f64| {
        if t >= 1.0 {
            return T::zero();
        }
        let s = 1.0 - t;
        let v = f(lo + t / s) * (1.0 / (s * s));
        if v.is_finite_value() {
            v
        } else {
            T::zero()
        }
    };
    integrate_adaptive(g, 0.0, 1.0, spec)
}

/// `∫_0^κ f(k) / sqrt(κ² - k²) dk` as `∫_0^{π/2} f(κ sin θ) dθ`.
pub fn integrate_sqrt_singular<T: QuadValue, F: Fn(f64) -> T>(
    f: F,
    kappa: f64,
    spec: &QuadSpec,
) -> Result<QuadResult<T>> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return validation(format!("kappa must be positive and finite, got {kappa}"));
    }
    integrate_adaptive(|t: f64| f(kappa * t.sin()), 0.0, std::f64::consts::FRAC_PI_2, spec)
}

/// Gaussian envelope bounding an integrand: `|f(k)| ≤ peak·exp(-(k-center)²/(2 s²))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianEnvelope {
    pub center: f64,
    pub sigma_eff: f64,
    pub peak: f64,
}

impl GaussianEnvelope {
    /// Smallest `k_max ≥ max(0, center)` whose discarded tail mass is below `budget`,
    /// together with that tail bound.
    pub fn truncation(&self, budget: f64) -> (f64, f64) {
        let start = self.center.max(0.0);
        let mut n = 0.0;
        loop {
            let k_max = start + n * self.sigma_eff;
            let tail = self.tail_bound(k_max);
            if tail < budget || n > 60.0 {
                return (k_max, tail);
            }
            n += 0.5;
        }
    }

    /// Upper bound on `∫_x^∞ peak·exp(-(k-center)²/(2s²)) dk`.
    pub fn tail_bound(&self, x: f64) -> f64 {
        let s = self.sigma_eff;
        let t = (x - self.center) / (std::f64::consts::SQRT_2 * s);
        let full = self.peak * s * (std::f64::consts::PI / 2.0).sqrt();
        if t <= 0.0 {
            return 2.0 * full;
        }
        // erfc(t) ≤ min(1, exp(-t²)/(t√π))
        let erfc = (1.0f64).min((-t * t).exp() / (t * std::f64::consts::PI.sqrt()));
        full * erfc
    }
}

/// `∫_0^∞ f(k) dk` for an integrand under a Gaussian envelope. The tail beyond
/// the truncation point is dropped and its bound added to the error estimate.
pub fn integrate_gaussian_tail<T: QuadValue, F: Fn(f64) -> T>(
    f: F,
    envelope: GaussianEnvelope,
    spec: &QuadSpec,
) -> Result<QuadResult<T>> {
    if !(envelope.sigma_eff > 0.0) || !envelope.center.is_finite() || !(envelope.peak >= 0.0) {
        return validation("gaussian envelope needs finite centre, positive width and peak >= 0");
    }
    let (k_max, tail) = envelope.truncation(spec.abs_tol / 10.0);
    if k_max <= 0.0 {
        return Ok(QuadResult {
            value: T::zero(),
            error_estimate: tail,
            evaluations: 0,
        });
    }
    let mut pts = vec![0.0];
    for m in [-4.0, 0.0, 4.0] {
        let p = envelope.center + m * envelope.sigma_eff;
        if p > 0.0 && p < k_max {
            pts.push(p);
        }
    }
    pts.push(k_max);
    pts.sort_by(f64::total_cmp);
    let mut r = integrate_with_breakpoints(f, &pts, spec)?;
    r.error_estimate += tail;
    Ok(r)
}

/// `∫ g(z) dz` along the straight segment from `z_start` to `z_end`.
pub fn integrate_contour_segment<F: Fn(Complex64) -> Complex64>(
    g: F,
    z_start: Complex64,
    z_end: Complex64,
    spec: &QuadSpec,
) -> Result<QuadResult<Complex64>> {
    let d = z_end - z_start;
    let r = integrate_adaptive(|t: f64| g(z_start + d * t), 0.0, 1.0, spec)?;
    Ok(QuadResult {
        value: r.value * d,
        error_estimate: r.error_estimate * d.norm(),
        evaluations: r.evaluations,
    })
}

/// Segment integral for `g` with an inverse square-root singularity at
/// `z_start`: the parameter is `t = s²` so the integrand in `s` is bounded.
pub fn integrate_contour_segment_sqrt_start<F: Fn(Complex64) -> Complex64>(
    g: F,
    z_start: Complex64,
    z_end: Complex64,
    spec: &QuadSpec,
) -> Result<QuadResult<Complex64>> {
    let d = z_end - z_start;
    let r = integrate_adaptive(
        |s: f64| {
            if s == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            g(z_start + d * (s * s)) * (2.0 * s)
        },
        0.0,
        1.0,
        spec,
    )?;
    Ok(QuadResult {
        value: r.value * d,
        error_estimate: r.error_estimate * d.norm(),
        evaluations: r.evaluations,
    })
}

/// Sum of segment integrals along the polyline through `vertices`.
pub fn integrate_polyline<F: Fn(Complex64) -> Complex64>(
    g: F,
    vertices: &[Complex64],
    spec: &QuadSpec,
) -> Result<QuadResult<Complex64>> {
    if vertices.len() < 2 {
        return validation("a polyline needs at least two vertices");
    }
    let mut acc = QuadResult {
        value: Complex64::new(0.0, 0.0),
        error_estimate: 0.0,
        evaluations: 0,
    };
    for w in vertices.windows(2) {
        acc = acc.plus(integrate_contour_segment(&g, w[0], w[1], spec)?);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn spec() -> QuadSpec {
        QuadSpec::new(1e-13, 1e-12, 2000).unwrap()
    }

    #[test]
    fn kronrod_rule_is_exact_for_low_degree() {
        for d in 0..=30 {
            let (v, _) = kronrod(&|x: f64| x.powi(d), -1.0, 1.0);
            let exact = if d % 2 == 0 { 2.0 / (d as f64 + 1.0) } else { 0.0 };
            assert!((v - exact).abs() < 1e-14, "degree {d}: {v} vs {exact}");
        }
    }

    #[test]
    fn polynomial_and_oscillatory() {
        let r = integrate_adaptive(|x: f64| x * x, 0.0, 1.0, &spec()).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-15);
        assert!(r.error_estimate <= 1e-12);
        let r = integrate_adaptive(|x: f64| (30.0 * x).sin(), 0.0, PI, &spec()).unwrap();
        assert!((r.value - (1.0 - (30.0 * PI).cos()) / 30.0).abs() < 1e-13);
    }

    #[test]
    fn complex_semi_infinite() {
        let r = integrate_semi_infinite(
            |z: f64| Complex64::new(0.0, z).exp() * (-z).exp(),
            0.0,
            &spec(),
        )
        .unwrap();
        assert!((r.value - Complex64::new(0.5, 0.5)).norm() < 1e-12);
        let r = integrate_semi_infinite(|k: f64| (-k * k).exp(), 0.0, &spec()).unwrap();
        assert!((r.value - PI.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn sqrt_singular_examples() {
        let r = integrate_sqrt_singular(|_k: f64| 1.0, 3.0, &spec()).unwrap();
        assert!((r.value - FRAC_PI_2).abs() < 1e-14);
        let r = integrate_sqrt_singular(|k: f64| k, 2.0, &spec()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-13);
        assert!(integrate_sqrt_singular(|k: f64| k, 0.0, &spec()).is_err());
    }

    #[test]
    fn sqrt_singular_split_invariance() {
        let f = |k: f64| (k * 1.7).cos() * (-k).exp();
        let kap = 2.5;
        let whole = integrate_sqrt_singular(f, kap, &spec()).unwrap().value;
        let split = integrate_with_breakpoints(
            |t: f64| f(kap * t.sin()),
            &[0.0, 0.3, 1.1, FRAC_PI_2],
            &spec(),
        )
        .unwrap()
        .value;
        assert!((whole - split).abs() < 1e-13);
        // Direct quadrature with the singular endpoint handled by t = s².
        let direct = integrate_adaptive(
            |s: f64| {
                let k = kap * (1.0 - s * s);
                if s == 0.0 {
                    0.0
                } else {
                    f(k) / (kap * kap - k * k).sqrt() * 2.0 * s * kap
                }
            },
            0.0,
            1.0,
            &spec(),
        )
        .unwrap()
        .value;
        assert!((whole - direct).abs() < 1e-10);
    }

    #[test]
    fn gaussian_tail_truncation() {
        let env = GaussianEnvelope {
            center: 2.0,
            sigma_eff: 0.5,
            peak: 1.0,
        };
        let r = integrate_gaussian_tail(
            |k: f64| (-(k - 2.0) * (k - 2.0) / 0.5).exp(),
            env,
            &spec(),
        )
        .unwrap();
        // ∫_0^∞ e^{-(k-2)²/(2·0.25)} = 0.5·√(π/2)·(1 + erf(2/(√2·0.5)))
        let exact = 0.5 * (PI / 2.0).sqrt() * (2.0 - 6.334_248_366_623_996e-5);
        assert!((r.value - exact).abs() < 1e-12, "{}", r.value - exact);
        let (_, tail) = env.truncation(1e-14);
        assert!(tail < 1e-14);
    }

    #[test]
    fn contour_segments() {
        let i = Complex64::new(0.0, 1.0);
        let r = integrate_contour_segment(|_| Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), i, &spec())
            .unwrap();
        assert!((r.value - i).norm() < 1e-15);
        let r = integrate_contour_segment(|z| z, Complex64::new(0.0, 0.0), Complex64::new(1.0, 1.0), &spec())
            .unwrap();
        assert!((r.value - i).norm() < 1e-14);
        let g = |z: Complex64| (-(z - 0.3) * (z - 0.3)).exp() * (2.0 * z).cos();
        let tri = [
            Complex64::new(-1.0, 0.0),
            Complex64::new(2.0, 0.5),
            Complex64::new(0.0, 2.0),
            Complex64::new(-1.0, 0.0),
        ];
        let r = integrate_polyline(g, &tri, &spec()).unwrap();
        assert!(r.value.norm() < 1e-10);
    }

    #[test]
    fn sqrt_start_segment() {
        // ∫_0^{i} dz / sqrt(z) = 2 sqrt(i)
        let i = Complex64::new(0.0, 1.0);
        let r = integrate_contour_segment_sqrt_start(
            |z| 1.0 / z.sqrt(),
            Complex64::new(0.0, 0.0),
            i,
            &spec(),
        )
        .unwrap();
        assert!((r.value - 2.0 * i.sqrt()).norm() < 1e-12);
    }

    #[test]
    fn nonconvergence_reports_best_estimate() {
        let tight = QuadSpec::new(1e-15, 1e-15, 32).unwrap();
        let err = integrate_adaptive(|x: f64| (1.0 / x).sin(), 1e-6, 1.0, &tight).unwrap_err();
        match err {
            Error::Accuracy { estimate, error, .. } => {
                assert!(estimate.is_finite() && error > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn spec_validation() {
        assert!(QuadSpec::new(0.0, 1e-6, 100).is_err());
        assert!(QuadSpec::new(1e-6, 1e-2, 100).is_err());
        assert!(QuadSpec::new(1e-6, 1e-6, 31).is_err());
        assert!(integrate_adaptive(|x: f64| x, 1.0, 0.0, &spec()).is_err());
    }

    proptest::proptest! {
        #[test]
        fn linearity(a in -3.0f64..3.0, b in -3.0f64..3.0, w in 0.1f64..5.0) {
            let s = spec();
            let f = |x: f64| (w * x).cos() * (-x * x).exp();
            let g = |x: f64| x.powi(3) + 1.0;
            let lhs = integrate_adaptive(|x| a * f(x) + b * g(x), -1.0, 2.0, &s).unwrap();
            let rf = integrate_adaptive(f, -1.0, 2.0, &s).unwrap();
            let rg = integrate_adaptive(g, -1.0, 2.0, &s).unwrap();
            let tol = lhs.error_estimate + a.abs() * rf.error_estimate + b.abs() * rg.error_estimate + 1e-13;
            proptest::prop_assert!((lhs.value - a * rf.value - b * rg.value).abs() <= tol);
        }
    }
}
