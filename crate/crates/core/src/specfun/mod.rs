//! Special functions used by the kernels, closed forms and expansions.
//!
//! Each function switches between a convergent power series and an
//! asymptotic expansion. The switchover points are fixed constants picked
//! where the smallest asymptotic term drops below `f64::EPSILON` while the
//! series still loses fewer than three digits to cancellation.

mod bessel;
mod erfi;
mod struve;

pub use bessel::{
    bessel_i0, bessel_i0_complex, bessel_i0_scaled, bessel_i1, bessel_i1_scaled, bessel_j0,
    bessel_y0, ln_bessel_i0,
};
pub use erfi::{dawson, erfi, erfi_ln, erfi_scaled};
pub use struve::{struve_h0, struve_l0, struve_l0_scaled, struve_l1, struve_l1_scaled};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};

/// Stopping rule for power series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesControl {
    pub max_terms: usize,
    pub rel_tol: f64,
}

impl SeriesControl {
    pub fn new(max_terms: usize, rel_tol: f64) -> Result<Self> {
        if max_terms < 16 {
            return validation(format!("max_terms must be at least 16, got {max_terms}"));
        }
        if !(rel_tol > 0.0 && rel_tol <= 1e-3) {
            return validation(format!("rel_tol must lie in (0, 1e-3], got {rel_tol:e}"));
        }
        Ok(Self { max_terms, rel_tol })
    }

    /// Sum `Σ t_n` where `t_{n+1} = t_n · ratio(n)`, stopping once a term is
    /// negligible against the running sum.
    pub fn sum_ratio(&self, first: f64, ratio: impl Fn(usize) -> f64) -> f64 {
        let mut term = first;
        let mut sum = first;
        for n in 0..self.max_terms {
            term *= ratio(n);
            sum += term;
            if term.abs() <= self.rel_tol * sum.abs() {
                break;
            }
        }
        sum
    }
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            max_terms: 2000,
            rel_tol: 1e-17,
        }
    }
}

/// `₀F₁(;1;z)`: `I₀(2√z)` for `z ≥ 0`, `J₀(2√(-z))` for `z < 0`.
/// Saturates to `+∞` where `I₀` overflows.
pub fn hyp0f1_1(z: f64) -> f64 {
    if z >= 0.0 {
        bessel_i0(2.0 * z.sqrt()).unwrap_or(f64::INFINITY)
    } else {
        bessel_j0(2.0 * (-z).sqrt())
    }
}

/// Complex sign: the sign of the real part, or of the imaginary part when the
/// real part vanishes; `csgn(0) = 0`.
pub fn csgn(k: Complex64) -> i32 {
    if k.re > 0.0 {
        1
    } else if k.re < 0.0 {
        -1
    } else if k.im > 0.0 {
        1
    } else if k.im < 0.0 {
        -1
    } else {
        0
    }
}
