//! Stability of the origin and of infinity.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SystemParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OriginStability {
    Repellor,
    Attractor,
    /// `p1 = s1 = 0`: both Lyapunov constants vanish and the system is Hamiltonian.
    CenterCandidate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OriginReport {
    pub monodromic: bool,
    /// `exp(4 pi p1 / p2) - 1`
    pub v1: f64,
    /// `4 pi s1`, only meaningful (and only reported) when `v1 = 0`.
    pub v2: Option<f64>,
    pub stability: OriginStability,
}

/// Lyapunov constants of the origin and its stability in forward time.
///
/// The stability is read from the radial rate `2 p1` (then `s1` when `p1 = 0`),
/// which does not depend on the sense of rotation. `v1` is exposed as computed;
/// its sign follows `p1 / p2` because it measures the return map along
/// increasing `theta`.
pub fn origin_report(params: &SystemParams) -> Result<OriginReport> {
    if !params.rotation_defined() {
        return Err(Error::Regime("origin is not monodromic: p2 != 0 is required".into()));
    }
    let v1 = (4.0 * PI * params.p1 / params.p2).exp_m1();
    let v2 = (v1 == 0.0).then_some(4.0 * PI * params.s1);
    let stability = if params.p1 > 0.0 {
        OriginStability::Repellor
    } else if params.p1 < 0.0 {
        OriginStability::Attractor
    } else if params.s1 > 0.0 {
        OriginStability::Repellor
    } else if params.s1 < 0.0 {
        OriginStability::Attractor
    } else {
        OriginStability::CenterCandidate
    };
    Ok(OriginReport { monodromic: true, v1, v2, stability })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InfinityStability {
    Repellor,
    Attractor,
    /// Infinity carries equilibria (`|s2| <= 1`) or the integral vanishes (`s1 = 0`).
    Undefined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfinityReport {
    pub regular: bool,
    pub stability: InfinityStability,
    /// `-sgn(s2) 4 pi s1 / sqrt(s2^2 - 1)`; `None` when infinity is not regular.
    pub integral_value: Option<f64>,
    /// Regular infinity whose first-order stability test is inconclusive (`s1 = 0`).
    pub neutral: bool,
}

/// Integrand whose integral over `[0, 2 pi]` decides the stability of infinity
/// in the compactified variable `R = 1/r`.
pub fn infinity_integrand(params: &SystemParams, theta: f64) -> f64 {
    let (sin6, cos6) = (6.0 * theta).sin_cos();
    -2.0 * (params.s1 - cos6) / (params.s2 + sin6)
}

pub fn infinity_report(params: &SystemParams) -> InfinityReport {
    if !params.infinity_regular() {
        return InfinityReport {
            regular: false,
            stability: InfinityStability::Undefined,
            integral_value: None,
            neutral: false,
        };
    }
    // + 0.0 turns -0 into 0 when s1 = 0
    let value = -params.s2.signum() * 4.0 * PI * params.s1 / (params.s2 * params.s2 - 1.0).sqrt() + 0.0;
    // A negative integral means R = 0 attracts in the compactified system.
    let (stability, neutral) = if value < 0.0 {
        (InfinityStability::Attractor, false)
    } else if value > 0.0 {
        (InfinityStability::Repellor, false)
    } else {
        (InfinityStability::Undefined, true)
    };
    InfinityReport { regular: true, stability, integral_value: Some(value), neutral }
}
