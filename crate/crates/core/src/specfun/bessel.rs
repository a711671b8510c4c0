//! Modified and ordinary Bessel functions of orders zero and one.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;

use super::SeriesControl;
use crate::error::{domain, Error, Result};

/// Above this the modified Bessel functions use the large-argument expansion.
const I_SWITCH: f64 = 30.0;
/// Above this `J₀` uses the Hankel expansion instead of the periodic trapezoid.
const J_SWITCH: f64 = 25.0;
/// `ln(f64::MAX)`.
pub(crate) const LN_MAX: f64 = 709.782_712_893_384;

fn i_series(nu: u32, x: f64) -> f64 {
    let q = 0.25 * x * x;
    let first = if nu == 0 { 1.0 } else { 0.5 * x };
    let nu = nu as f64;
    SeriesControl::default().sum_ratio(first, |k| {
        let k = k as f64;
        q / ((k + 1.0) * (k + 1.0 + nu))
    })
}

/// `e^{-x} I_ν(x)` for large positive `x`.
fn i_asymptotic_scaled(nu: u32, x: f64) -> f64 {
    let mu = 4.0 * (nu as f64).powi(2);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let j = (2 * k - 1) as f64;
        let next = term * -(mu - j * j) / (8.0 * k as f64 * x);
        if next.abs() > term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < f64::EPSILON * sum.abs() {
            break;
        }
    }
    sum / (2.0 * PI * x).sqrt()
}

/// Hankel amplitudes `(P, Q)` of order zero.
fn hankel_pq(x: f64) -> (f64, f64) {
    let mut b = 1.0;
    let (mut p, mut q) = (1.0, 0.0);
    for k in 1..200usize {
        let j = (2 * k - 1) as f64;
        let next = b * (-(j * j)) / (8.0 * k as f64 * x);
        if next.abs() > b.abs() {
            break;
        }
        b = next;
        // a_k / x^k enters P for even k and Q for odd k with alternating sign
        match k % 4 {
            0 => p += b,
            1 => q += b,
            2 => p -= b,
            _ => q -= b,
        }
        if b.abs() < 1e-17 {
            break;
        }
    }
    (p, q)
}

/// `I₀(x)`. Errors with a range error where the result overflows `f64`.
pub fn bessel_i0(x: f64) -> Result<f64> {
    let ax = x.abs();
    if ax <= I_SWITCH {
        return Ok(i_series(0, ax));
    }
    let s = i_asymptotic_scaled(0, ax);
    if ax + s.ln() > LN_MAX {
        return Err(Error::Range(format!("I0({x}) overflows f64")));
    }
    Ok(s * ax.exp())
}

/// `e^{-|x|} I₀(x)`; finite for every finite `x`.
pub fn bessel_i0_scaled(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= I_SWITCH {
        i_series(0, ax) * (-ax).exp()
    } else {
        i_asymptotic_scaled(0, ax)
    }
}

/// `ln I₀(x)`.
pub fn ln_bessel_i0(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= I_SWITCH {
        i_series(0, ax).ln()
    } else {
        ax + i_asymptotic_scaled(0, ax).ln()
    }
}

/// `I₁(x)`, odd in `x`.
pub fn bessel_i1(x: f64) -> Result<f64> {
    let ax = x.abs();
    let v = if ax <= I_SWITCH {
        i_series(1, ax)
    } else {
        let s = i_asymptotic_scaled(1, ax);
        if ax + s.ln() > LN_MAX {
            return Err(Error::Range(format!("I1({x}) overflows f64")));
        }
        s * ax.exp()
    };
    Ok(v.copysign(x))
}

/// `e^{-|x|} I₁(x)`.
pub fn bessel_i1_scaled(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= I_SWITCH {
        i_series(1, ax) * (-ax).exp()
    } else {
        i_asymptotic_scaled(1, ax)
    };
    v.copysign(x)
}

/// `I₀(z)` for complex `z` by the trapezoid rule on
/// `(1/2π)∫_0^{2π} e^{z cos θ} dθ`, which converges geometrically once the
/// node count exceeds `|z|`.
pub fn bessel_i0_complex(z: Complex64) -> Complex64 {
    let n = z.norm().ceil() as usize + 40;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        let t = 2.0 * PI * j as f64 / n as f64;
        acc += (z * t.cos()).exp();
    }
    acc / n as f64
}

/// `J₀(x)`.
pub fn bessel_j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= J_SWITCH {
        let n = ax.ceil() as usize + 40;
        let mut acc = 0.0;
        for j in 0..n {
            let t = 2.0 * PI * j as f64 / n as f64;
            acc += (ax * t.sin()).cos();
        }
        acc / n as f64
    } else {
        let (p, q) = hankel_pq(ax);
        let chi = ax - FRAC_PI_4;
        (2.0 / (PI * ax)).sqrt() * (p * chi.cos() - q * chi.sin())
    }
}

/// `Y₀(x)` from the Hankel expansion; only offered for `x ≥ 25`, where it is
/// accurate to double precision.
pub fn bessel_y0(x: f64) -> Result<f64> {
    if !(x >= J_SWITCH) {
        return domain(format!("bessel_y0 is implemented for x >= {J_SWITCH}, got {x}"));
    }
    let (p, q) = hankel_pq(x);
    let chi = x - FRAC_PI_4;
    Ok((2.0 / (PI * x)).sqrt() * (p * chi.sin() + q * chi.cos()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    /// Plain Maclaurin sums, written independently of the library code.
    fn i0_oracle(x: f64) -> f64 {
        let mut s = 0.0;
        let mut fact = 1.0;
        for n in 0..120 {
            if n > 0 {
                fact *= n as f64;
            }
            s += (x / 2.0).powi(2 * n) / (fact * fact);
        }
        s
    }

    fn j0_oracle(x: f64) -> f64 {
        let mut s = 0.0;
        let mut fact = 1.0;
        for n in 0..80 {
            if n > 0 {
                fact *= n as f64;
            }
            s += (-1f64).powi(n) * (x / 2.0).powi(2 * n) / (fact * fact);
        }
        s
    }

    #[test]
    fn i0_values() {
        assert_eq!(bessel_i0(0.0).unwrap(), 1.0);
        assert!(rel(bessel_i0(1.0).unwrap(), 1.266_065_877_752_008_4) < 1e-15);
        assert!(rel(bessel_i0_scaled(50.0), 0.056_561_626_647_454_2) < 1e-13);
        assert!(rel(bessel_i0_scaled(10.0), 0.127_833_337_163_429) < 1e-13);
        for x in [0.3, 2.0, 5.5, 8.0] {
            assert!(rel(bessel_i0(x).unwrap(), i0_oracle(x)) < 1e-14);
        }
        assert!(bessel_i0(800.0).is_err());
        assert!(bessel_i0_scaled(800.0).is_finite());
        assert!(rel(ln_bessel_i0(800.0), 800.0 + bessel_i0_scaled(800.0).ln()) < 1e-15);
    }

    #[test]
    fn i0_switchover_is_continuous() {
        let below = bessel_i0_scaled(I_SWITCH);
        let above = i_asymptotic_scaled(0, I_SWITCH);
        assert!(rel(below, above) < 1e-14);
        let below = i_series(1, I_SWITCH) * (-I_SWITCH).exp();
        let above = i_asymptotic_scaled(1, I_SWITCH);
        assert!(rel(below, above) < 1e-14);
    }

    #[test]
    fn i1_values() {
        assert!(rel(bessel_i1(1.0).unwrap(), 0.565_159_103_992_485) < 1e-14);
        assert!(rel(bessel_i1_scaled(35.0), 0.066_704_431_729_491_4) < 1e-13);
        assert_eq!(bessel_i1(-1.0).unwrap(), -bessel_i1(1.0).unwrap());
    }

    #[test]
    fn complex_i0() {
        let v = bessel_i0_complex(Complex64::new(2.0, 3.0));
        assert!((v - Complex64::new(-1.249_234_879_607_42, 0.947_983_792_057_735)).norm() < 1e-13);
        let v = bessel_i0_complex(Complex64::new(7.0, 0.0));
        assert!(rel(v.re, i0_oracle(7.0)) < 1e-14 && v.im.abs() < 1e-12);
        // I₀(ix) = J₀(x)
        let v = bessel_i0_complex(Complex64::new(0.0, 30.0));
        assert!((v.re - bessel_j0(30.0)).abs() < 1e-13);
    }

    #[test]
    fn j0_values() {
        assert_eq!(bessel_j0(0.0), 1.0);
        assert!((bessel_j0(1.0) - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((bessel_j0(50.0) - 0.055_812_327_669_251_8).abs() < 1e-14);
        for x in [0.5, 3.0, 7.7, 12.0] {
            assert!((bessel_j0(x) - j0_oracle(x)).abs() < 1e-12);
        }
        // switchover continuity
        let (p, q) = hankel_pq(J_SWITCH);
        let chi = J_SWITCH - FRAC_PI_4;
        let hankel = (2.0 / (PI * J_SWITCH)).sqrt() * (p * chi.cos() - q * chi.sin());
        assert!((hankel - bessel_j0(J_SWITCH)).abs() < 1e-15);
    }

    #[test]
    fn j0_first_zero() {
        let (mut lo, mut hi) = (2.0, 3.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if j0_oracle(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((lo - 2.404_825_557_695_773).abs() < 1e-12);
        assert!(bessel_j0(lo).abs() < 1e-14);
    }

    #[test]
    fn y0_values() {
        assert!((bessel_y0(30.0).unwrap() - -0.117_295_731_686_664).abs() < 1e-14);
        assert!((bessel_y0(50.0).unwrap() - -0.098_064_995_470_077_1).abs() < 1e-14);
        assert!(bessel_y0(3.0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn parity(x in -40.0f64..40.0) {
            proptest::prop_assert!(rel(bessel_i0(x).unwrap(), bessel_i0(-x).unwrap()) < 1e-12);
            proptest::prop_assert!((bessel_j0(x) - bessel_j0(-x)).abs() < 1e-12);
            proptest::prop_assert!(bessel_j0(x).abs() <= 1.0);
        }

        #[test]
        fn scaled_finite(x in -1e6f64..1e6) {
            proptest::prop_assert!(bessel_i0_scaled(x).is_finite());
            proptest::prop_assert!(bessel_i1_scaled(x).is_finite());
            proptest::prop_assert!(bessel_j0(x).is_finite());
        }

        #[test]
        fn oracle_agreement(x in -8.0f64..8.0) {
            proptest::prop_assert!(rel(bessel_i0(x).unwrap(), i0_oracle(x)) < 1e-14);
            proptest::prop_assert!((bessel_j0(x) - j0_oracle(x)).abs() < 1e-13);
        }
    }
}
