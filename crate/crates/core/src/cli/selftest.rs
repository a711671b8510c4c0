//! Built-in consistency suite behind the `selftest` subcommand.

use std::time::Instant;

use serde::Serialize;

use crate::classical::{classical_limit_series, classical_toa, KernelRegion};
use crate::domain::{depth_for_kappa, PhysicalConstants, WellGeometry};
use crate::packet::{GaussianPacket, GaussianPair, PacketSpectrum};
use crate::quadrature::{integrate_gaussian_tail, QuadSpec};
use crate::refraction::{
    continuation_check_with, deep_well_r_kappa, well_refraction, zeta_oracle_refraction, ContinuationBranch,
};
use crate::traversal::{traversal_times, weighted_sum_traversal};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SelftestOptions {
    pub quad: QuadSpec,
    /// Use the wrong square-root branch in the continuation check.
    pub inject_wrong_branch: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl SuiteOutcome {
    pub fn line(&self) -> String {
        format!(
            "{} {} ({:.2}s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.seconds,
            self.detail
        )
    }
}

type SuiteResult = Result<String, String>;
type Suite = (&'static str, Box<dyn Fn() -> SuiteResult>);

fn within(what: &str, dev: f64, tol: f64) -> SuiteResult {
    if dev <= tol {
        Ok(format!("{what}: max deviation {dev:.2e} <= {tol:.0e}"))
    } else {
        Err(format!("{what}: deviation {dev:.3e} exceeds {tol:.0e}"))
    }
}

fn gauss(k0: f64, sigma: f64) -> Result<GaussianPacket, String> {
    GaussianPacket::new(-100.0, sigma, k0).map_err(|e| e.to_string())
}

fn oracle_equivalence(q: &QuadSpec) -> SuiteResult {
    let mut worst: f64 = 0.0;
    for k0 in [1.0, 3.0, 8.0] {
        for sigma in [0.5, 2.0] {
            for kappa in [0.5, 1.0] {
                let p = gauss(k0, sigma)?;
                let a = well_refraction(&p, kappa, q).map_err(|e| e.to_string())?.total;
                let b = zeta_oracle_refraction(&p, kappa, q).map_err(|e| e.to_string())?;
                worst = worst.max((a - b).abs());
            }
        }
    }
    let pair = GaussianPair::new(-100.0, 0.8, 0.6, 2.4).map_err(|e| e.to_string())?;
    let a = well_refraction(&pair, 1.0, q).map_err(|e| e.to_string())?.total;
    let b = zeta_oracle_refraction(&pair, 1.0, q).map_err(|e| e.to_string())?;
    worst = worst.max((a - b).abs());
    within("momentum vs position-difference route", worst, 1e-7)
}

fn continuation(q: &QuadSpec, branch: ContinuationBranch) -> SuiteResult {
    let mut worst: f64 = 0.0;
    for (k0, sigma, kappa0) in [(2.0, 1.0, 1.0), (5.0, 0.5, 2.0)] {
        let r = continuation_check_with(&gauss(k0, sigma)?, kappa0, branch, 1e-7, q).map_err(|e| e.to_string())?;
        worst = worst.max(r.max_deviation());
    }
    within("cancellation identity and path independence", worst, 1e-7)
}

fn classical_limit(q: &QuadSpec) -> SuiteResult {
    let p = gauss(5.0, 10.0)?;
    let r = well_refraction(&p, 1.0, q).map_err(|e| e.to_string())?.total;
    let dev_r = (r - 5.0 / 26f64.sqrt()).abs();
    let c = PhysicalConstants::atomic();
    let mut dev_s: f64 = 0.0;
    for y in [0.1, 0.3, 0.5] {
        let p0 = 2.0;
        let w = WellGeometry::new(y * p0 * p0 / 2.0, 3.0, 1.0).map_err(|e| e.to_string())?;
        let exact = classical_toa(KernelRegion::Region3, -5.0, p0, &w, &c).map_err(|e| e.to_string())?;
        let s = classical_limit_series(KernelRegion::Region3, -5.0, p0, &w, &c, 400).map_err(|e| e.to_string())?;
        dev_s = dev_s.max((s.value - exact).abs());
    }
    within("wide packet vs 5/sqrt(26)", dev_r, 1e-4)?;
    within("region-3 series vs closed form", dev_s, 1e-10)?;
    Ok(format!("|R - 5/sqrt(26)| = {dev_r:.2e}, series deviation {dev_s:.2e}"))
}

fn normalization(q: &QuadSpec) -> SuiteResult {
    let spectra: Vec<Box<dyn PacketSpectrum>> = vec![
        Box::new(gauss(2.0, 0.7)?),
        Box::new(GaussianPair::new(-100.0, 0.8, 0.6, 2.4).map_err(|e| e.to_string())?),
    ];
    let mut worst: f64 = 0.0;
    for s in &spectra {
        let env = s.density_envelope();
        let pos = integrate_gaussian_tail(|k| s.momentum_density(k), env.positive_branch(), q)
            .map_err(|e| e.labelled("momentum norm, k > 0").to_string())?;
        let neg = integrate_gaussian_tail(|k| s.momentum_density(-k), env.negative_branch(), q)
            .map_err(|e| e.labelled("momentum norm, k < 0").to_string())?;
        worst = worst.max((pos.value + neg.value - 1.0).abs());
        worst = worst.max((s.autocorrelation(0.0).re - 1.0).abs());
    }
    within("unit norm and autocorrelation at zero", worst, 1e-10)
}

fn weighted_sum(q: &QuadSpec) -> SuiteResult {
    let c = PhysicalConstants::atomic();
    let p = gauss(2.0, 1.0)?;
    let mut worst: f64 = 0.0;
    for kappa in [0.0, 1.0, 2.0] {
        let w = WellGeometry::with_width(depth_for_kappa(kappa, &c), 1.0, 1.0).map_err(|e| e.to_string())?;
        let t = traversal_times(&p, &w, &c, q).map_err(|e| e.to_string())?;
        let s = weighted_sum_traversal(&p, kappa, 1.0, &c, q).map_err(|e| e.to_string())?;
        worst = worst.max((t.tau_well - s).abs());
        let r = t.refraction;
        worst = worst.max((r.total - (r.r_plus + r.r_minus + r.r_kappa)).abs());
    }
    within("weighted sum vs (L/v0) R", worst, 1e-10)
}

fn deep_well(q: &QuadSpec) -> SuiteResult {
    let mut worst: f64 = 0.0;
    for (sigma, k0, kappa) in [(1.0, 1.0, 2.0), (1.0, 2.0, 3.0), (0.5, 2.0, 3.0)] {
        let parts = deep_well_r_kappa(&gauss(k0, sigma)?, kappa, q).map_err(|e| e.to_string())?;
        worst = worst.max(parts.scaled_deviation());
    }
    within("contour vs direct deep-well form (scaled)", worst, 1e-7)
}

/// Runs every suite and reports each one; never panics on numeric failure.
pub fn run_selftest(opts: &SelftestOptions) -> Vec<SuiteOutcome> {
    let branch = if opts.inject_wrong_branch {
        ContinuationBranch::Lower
    } else {
        ContinuationBranch::Upper
    };
    let q = opts.quad;
    let suites: Vec<Suite> = vec![
        ("normalization", Box::new(move || normalization(&q))),
        ("oracle equivalence", Box::new(move || oracle_equivalence(&q))),
        ("cancellation identity", Box::new(move || continuation(&q, branch))),
        ("classical limit", Box::new(move || classical_limit(&q))),
        ("weighted-sum identity", Box::new(move || weighted_sum(&q))),
        ("deep-well forms", Box::new(move || deep_well(&q))),
    ];
    suites
        .into_iter()
        .map(|(name, f)| {
            let t = Instant::now();
            let r = f();
            let seconds = t.elapsed().as_secs_f64();
            match r {
                Ok(detail) => SuiteOutcome {
                    name,
                    passed: true,
                    detail,
                    seconds,
                },
                Err(detail) => SuiteOutcome {
                    name,
                    passed: false,
                    detail,
                    seconds,
                },
            }
        })
        .collect()
}
