use std::str::FromStr;

use clap::Args;
use z6_core::abel::sigma_thresholds;
use z6_core::dynamics::{CycleOptions, TOL_FIXED_POINT, TOL_INTEGRATE};
use z6_core::equilibria::EPS_Q;
use z6_core::SystemParams;

use crate::error::CliError;

/// `p1` as a number or as one of the thresholds of the other three parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum P1Value {
    Value(f64),
    SigmaPlus,
    SigmaMinus,
}

impl FromStr for P1Value {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sigma+" => Ok(P1Value::SigmaPlus),
            "sigma-" => Ok(P1Value::SigmaMinus),
            _ => s.parse::<f64>().map(P1Value::Value).map_err(|e| format!("expected a number, sigma+ or sigma-: {e}")),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// Number, or `sigma+` / `sigma-` for the outer thresholds
    #[arg(long, allow_hyphen_values = true)]
    pub p1: P1Value,
    #[arg(long, allow_hyphen_values = true)]
    pub p2: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub s1: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub s2: f64,
}

impl ParamArgs {
    pub fn resolve(&self) -> Result<SystemParams, CliError> {
        resolve_p1(self.p1, self.p2, self.s1, self.s2)
    }
}

pub fn resolve_p1(p1: P1Value, p2: f64, s1: f64, s2: f64) -> Result<SystemParams, CliError> {
    let p1 = match p1 {
        P1Value::Value(v) => v,
        keyword => {
            let s = sigma_thresholds(&SystemParams::new(0.0, p2, s1, s2)?)?;
            if keyword == P1Value::SigmaPlus {
                s.sigma_a_plus
            } else {
                s.sigma_a_minus
            }
        }
    };
    Ok(SystemParams::new(p1, p2, s1, s2)?)
}

#[derive(Debug, Clone, Args)]
pub struct TolArgs {
    /// Local tolerance of the trajectory integrator
    #[arg(long, default_value_t = TOL_INTEGRATE)]
    pub tol_integrate: f64,
    /// Target for |Pi(rho*) - rho*|
    #[arg(long, default_value_t = TOL_FIXED_POINT)]
    pub tol_fixed_point: f64,
    /// Relative tolerance for deciding Q = 0
    #[arg(long, default_value_t = EPS_Q)]
    pub tol_q_zero: f64,
}

impl TolArgs {
    pub fn cycle_options(&self) -> CycleOptions {
        let defaults = CycleOptions::default();
        CycleOptions {
            tol_integrate: self.tol_integrate,
            tol_refine: defaults.tol_refine.min(self.tol_integrate),
            tol_fixed_point: self.tol_fixed_point,
            tol_q_zero: self.tol_q_zero,
            ..defaults
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    /// Largest section radius (r = |z|^2) scanned; derived from the parameters when omitted
    #[arg(long)]
    pub rho_max: Option<f64>,
    /// Number of log-spaced radii
    #[arg(long, default_value_t = 150)]
    pub samples: usize,
}

impl ScanArgs {
    pub fn rho_max(&self, params: &SystemParams) -> Result<f64, CliError> {
        match self.rho_max {
            Some(r) => Ok(r),
            None => default_rho_max(params),
        }
    }
}

/// Ten times the scale of the equilibrium radii.
pub fn default_rho_max(params: &SystemParams) -> Result<f64, CliError> {
    params.require_regular()?;
    Ok(10.0 * (params.p1.abs() + params.p2.abs()) / (params.s2.abs() - 1.0))
}

pub fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [a, b] => Ok((a.trim().parse().map_err(|e| format!("{e}"))?, b.trim().parse().map_err(|e| format!("{e}"))?)),
        _ => Err(format!("expected two comma-separated numbers, got {s:?}")),
    }
}
