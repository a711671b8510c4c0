//! Imaginary error function and Dawson's integral.

use std::f64::consts::PI;

use super::bessel::LN_MAX;
use super::SeriesControl;
use crate::error::{Error, Result};

/// Above this the Dawson asymptotic series is used.
const ERFI_SWITCH: f64 = 6.0;

fn erfi_series(x: f64) -> f64 {
    // (2/√π) Σ x^{2n+1} / (n! (2n+1)), summed with the power part carried separately
    let q = x * x;
    let mut t = x;
    let mut sum = x;
    let ctl = SeriesControl::default();
    for n in 0..ctl.max_terms {
        let n = n as f64;
        t *= q / (n + 1.0);
        let term = t / (2.0 * n + 3.0);
        sum += term;
        if term.abs() <= ctl.rel_tol * sum.abs() {
            break;
        }
    }
    2.0 / PI.sqrt() * sum
}

fn dawson_asymptotic(x: f64) -> f64 {
    let q = 2.0 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let next = term * (2 * k - 1) as f64 / q;
        if next > term {
            break;
        }
        term = next;
        sum += term;
        if term < f64::EPSILON * sum {
            break;
        }
    }
    sum / (2.0 * x)
}

/// Dawson's integral `D(x) = e^{-x²} ∫_0^x e^{t²} dt`.
pub fn dawson(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= ERFI_SWITCH {
        0.5 * PI.sqrt() * (-ax * ax).exp() * erfi_series(ax)
    } else {
        dawson_asymptotic(ax)
    };
    v.copysign(x)
}

/// `e^{-x²} erfi(x)`; finite for every finite `x`.
pub fn erfi_scaled(x: f64) -> f64 {
    2.0 / PI.sqrt() * dawson(x)
}

/// `erfi(x) = (2/√π) ∫_0^x e^{t²} dt`. Errors where the value overflows.
pub fn erfi(x: f64) -> Result<f64> {
    let ax = x.abs();
    if ax <= ERFI_SWITCH {
        return Ok(erfi_series(x));
    }
    let s = erfi_scaled(ax);
    if ax * ax + s.ln() > LN_MAX {
        return Err(Error::Range(format!("erfi({x}) overflows f64")));
    }
    Ok((s * (ax * ax).exp()).copysign(x))
}

/// `(ln|erfi(x)|, sign)`; usable for any finite `x`.
pub fn erfi_ln(x: f64) -> (f64, i32) {
    let sign = if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        return (f64::NEG_INFINITY, 0);
    };
    let ax = x.abs();
    let ln = if ax <= ERFI_SWITCH {
        erfi_series(ax).ln()
    } else {
        ax * ax + erfi_scaled(ax).ln()
    };
    (ln, sign)
}
