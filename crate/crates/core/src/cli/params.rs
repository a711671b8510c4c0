use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use crate::domain::{depth_for_kappa, ParameterConfig, PhysicalConstants, WellGeometry};
use crate::packet::GaussianPacket;
use crate::quadrature::QuadSpec;

use super::CliError;

/// Physical parameters shared by every subcommand. Precedence is
/// defaults < `--config` file < flags.
#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    /// Carrier wavenumber k0
    #[arg(long)]
    pub k0: Option<f64>,
    /// Momentum-space width parameter sigma (position width of the packet)
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Well wavenumber kappa = sqrt(2 mu V0)/hbar; overrides V0
    #[arg(long, conflicts_with = "v0")]
    pub kappa: Option<f64>,
    /// Well depth
    #[arg(long = "V0", id = "v0")]
    pub v0: Option<f64>,
    /// Well width a - b
    #[arg(long = "L", id = "width")]
    pub width: Option<f64>,
    /// Far edge of the well at q = -a
    #[arg(long)]
    pub a: Option<f64>,
    /// Near edge of the well at q = -b
    #[arg(long)]
    pub b: Option<f64>,
    /// Initial packet centre (default -a - 12 sigma)
    #[arg(long)]
    pub q0: Option<f64>,
    /// JSON parameter file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Quadrature tolerance (absolute and relative)
    #[arg(long)]
    pub tol: Option<f64>,
}

pub const DEFAULT_K0: f64 = 5.0;
pub const DEFAULT_SIGMA: f64 = 1.0;
pub const DEFAULT_V0: f64 = 0.5;
pub const DEFAULT_B: f64 = 1.0;
pub const DEFAULT_WIDTH: f64 = 1.0;
/// Default packets start this many `sigma` to the left of the far edge.
pub const STANDOFF: f64 = 12.0;

/// Fully resolved inputs before any axis is applied.
#[derive(Debug, Clone, Serialize)]
pub struct Base {
    pub constants: PhysicalConstants,
    pub k0: f64,
    pub sigma: f64,
    pub kappa: f64,
    pub width: f64,
    pub b: f64,
    pub q0: Option<f64>,
    #[serde(skip)]
    pub quad: QuadSpec,
    pub echo: ParameterConfig,
}

fn cfg_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be positive and finite, got {v}")))
    }
}

impl ParamArgs {
    fn file_config(&self) -> Result<ParameterConfig, CliError> {
        match &self.config {
            None => Ok(ParameterConfig::default()),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
                ParameterConfig::from_json(&text).map_err(cfg_err)
            }
        }
    }

    fn flag_config(&self) -> ParameterConfig {
        ParameterConfig {
            v0: self.v0,
            a: self.a,
            b: self.b,
            k0: self.k0,
            sigma: self.sigma,
            q0: self.q0,
            ..Default::default()
        }
    }

    pub fn quad(&self) -> Result<QuadSpec, CliError> {
        match self.tol {
            None => Ok(QuadSpec::default()),
            Some(t) => QuadSpec::default().with_tol(t).map_err(cfg_err),
        }
    }

    /// Resolve against `defaults`, which the figure presets replace.
    pub fn resolve_with(&self, defaults: &ParameterConfig, default_kappa: Option<f64>) -> Result<Base, CliError> {
        let file = self.file_config()?;
        let merged = defaults.merged_with(&file).merged_with(&self.flag_config());
        let c = merged.constants().map_err(cfg_err)?;
        let k0 = positive("k0", merged.k0.unwrap_or(DEFAULT_K0))?;
        let sigma = positive("sigma", merged.sigma.unwrap_or(DEFAULT_SIGMA))?;
        let explicit_depth = self.v0.is_some() || file.v0.is_some();
        let kappa = match (self.kappa, default_kappa) {
            (Some(k), _) => k,
            (None, Some(k)) if !explicit_depth => k,
            _ => {
                let v0 = merged.v0.unwrap_or(DEFAULT_V0);
                if !(v0 >= 0.0 && v0.is_finite()) {
                    return Err(CliError::Config(format!("V0 must be >= 0, got {v0}")));
                }
                (2.0 * c.mass() * v0).sqrt() / c.hbar()
            }
        };
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(CliError::Config(format!("kappa must be >= 0, got {kappa}")));
        }
        let b = positive("b", merged.b.unwrap_or(DEFAULT_B))?;
        let width = match (merged.a, self.width) {
            (Some(a), Some(l)) if ((a - b) - l).abs() > 1e-12 * l.abs().max(1.0) => {
                return Err(CliError::Config(format!(
                    "inconsistent geometry: a - b = {} but L = {l}",
                    a - b
                )))
            }
            (Some(a), _) => a - b,
            (None, Some(l)) => l,
            (None, None) => DEFAULT_WIDTH,
        };
        positive("L = a - b", width)?;
        let mut echo = merged.clone();
        echo.v0 = Some(depth_for_kappa(kappa, &c));
        echo.a = Some(b + width);
        echo.b = Some(b);
        echo.k0 = Some(k0);
        echo.sigma = Some(sigma);
        Ok(Base {
            constants: c,
            k0,
            sigma,
            kappa,
            width,
            b,
            q0: merged.q0,
            quad: self.quad()?,
            echo,
        })
    }

    pub fn resolve(&self) -> Result<Base, CliError> {
        self.resolve_with(&ParameterConfig::default(), None)
    }
}

impl Base {
    pub fn well(&self) -> crate::Result<WellGeometry> {
        WellGeometry::with_width(depth_for_kappa(self.kappa, &self.constants), self.width, self.b)
    }

    pub fn packet(&self) -> crate::Result<GaussianPacket> {
        let q0 = self
            .q0
            .unwrap_or(-(self.b + self.width) - STANDOFF * self.sigma);
        GaussianPacket::new(q0, self.sigma, self.k0)
    }

    /// Free crossing time `μL/(ħk0)`.
    pub fn free_time(&self) -> f64 {
        self.width / self.constants.velocity(self.k0)
    }
}
