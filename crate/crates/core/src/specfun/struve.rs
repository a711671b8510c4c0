//! Struve `H₀` and modified Struve `L₀`, `L₁`.

use std::f64::consts::{FRAC_PI_2, PI};

use super::bessel::{bessel_i0_scaled, bessel_i1_scaled, bessel_y0};
use super::SeriesControl;
use crate::quadrature::{integrate_with_breakpoints, QuadSpec};

const L_SWITCH: f64 = 30.0;
const H_SERIES_MAX: f64 = 8.0;
const H_ASYMPTOTIC_MIN: f64 = 40.0;

/// Large-argument series `(1/π) Σ t_k` with `t_{k+1} = t_k · ratio(k) / x²`.
fn struve_tail(first: f64, x: f64, ratio: impl Fn(f64) -> f64) -> f64 {
    let mut term = first;
    let mut sum = first;
    for k in 0..200 {
        let next = term * ratio(k as f64) / (x * x);
        if next.abs() > term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < f64::EPSILON * sum.abs() {
            break;
        }
    }
    sum / PI
}

fn l0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    SeriesControl::default().sum_ratio(2.0 * x / PI, |k| q / (k as f64 + 1.5).powi(2))
}

fn l1_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    SeriesControl::default().sum_ratio(2.0 * x * x / (3.0 * PI), |k| {
        let k = k as f64;
        q / ((k + 1.5) * (k + 2.5))
    })
}

/// `L₀(x) - I₀(x)` for large `x`.
fn l0_minus_i0(x: f64) -> f64 {
    struve_tail(-2.0 / x, x, |k| (2.0 * k + 1.0).powi(2))
}

/// `L₁(x) - I₁(x)` for large `x`.
fn l1_minus_i1(x: f64) -> f64 {
    struve_tail(-2.0, x, |k| 4.0 * k * k - 1.0)
}

/// Modified Struve `L₀(x)`; odd. Overflows to `±∞` with `I₀`.
pub fn struve_l0(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= L_SWITCH {
        l0_series(ax)
    } else {
        bessel_i0_scaled(ax) * ax.exp() + l0_minus_i0(ax)
    };
    v.copysign(x)
}

/// `e^{-|x|} L₀(x)`.
pub fn struve_l0_scaled(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= L_SWITCH {
        l0_series(ax) * (-ax).exp()
    } else {
        bessel_i0_scaled(ax) + l0_minus_i0(ax) * (-ax).exp()
    };
    v.copysign(x)
}

/// Modified Struve `L₁(x)`; even.
pub fn struve_l1(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= L_SWITCH {
        l1_series(ax)
    } else {
        bessel_i1_scaled(ax) * ax.exp() + l1_minus_i1(ax)
    }
}

/// `e^{-|x|} L₁(x)`.
pub fn struve_l1_scaled(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= L_SWITCH {
        l1_series(ax) * (-ax).exp()
    } else {
        bessel_i1_scaled(ax) + l1_minus_i1(ax) * (-ax).exp()
    }
}

/// Struve `H₀(x)`; odd.
pub fn struve_h0(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= H_SERIES_MAX {
        let q = 0.25 * ax * ax;
        SeriesControl::default().sum_ratio(2.0 * ax / PI, |k| -q / (k as f64 + 1.5).powi(2))
    } else if ax <= H_ASYMPTOTIC_MIN {
        // (2/π) ∫_0^{π/2} sin(x cos θ) dθ
        let spec = QuadSpec::new(1e-13, 1e-13, 400).expect("static tolerances");
        let n = (ax / 4.0).ceil() as usize;
        let pts: Vec<f64> = (0..=n).map(|j| FRAC_PI_2 * j as f64 / n as f64).collect();
        let v = integrate_with_breakpoints(|t: f64| (ax * t.cos()).sin(), &pts, &spec)
            .map(|r| r.value)
            .unwrap_or(f64::NAN);
        2.0 / PI * v
    } else {
        let y0 = bessel_y0(ax).expect("argument above the Hankel threshold");
        y0 + struve_tail(2.0 / ax, ax, |k| -(2.0 * k + 1.0).powi(2))
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}
