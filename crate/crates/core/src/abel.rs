//! Reduction of the polar system to a scalar Abel equation
//!
//! ```text
//! dx/dθ = A(θ) x^3 + B(θ) x^2 + C(θ) x,     x = r / (p2 + r (s2 + sin 6θ)),
//! ```
//!
//! the thresholds in `p1` where `A` and `B` stop changing sign, and the region
//! classifier built on them.
//!
//! `B` carries the term `-6 cos 6θ` produced by differentiating the
//! denominator of the transformation; with it the push-forward of every polar
//! trajectory solves the Abel equation and `x = 1 / (s2 + sin 6θ)` (the image of
//! infinity) is an exact solution.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::equilibria::solve_equilibria;
use crate::error::{Error, Result};
use crate::model::{PolarState, SystemParams, SEXTANT};

/// Transformation denominators closer to zero than this are singular.
pub const SINGULAR_TOL: f64 = 1e-12;

/// Number of samples used to confirm a sign verdict over one period of `6θ`.
pub const SIGN_SAMPLES: usize = 10_000;

/// Parameters closer than this (relative) to a threshold skip the sampled confirmation.
pub const BOUNDARY_TOL: f64 = 1e-7;

/// `x = r / (p2 + r (s2 + sin 6θ))`.
pub fn cherkas_forward(params: &SystemParams, s: PolarState) -> Result<f64> {
    let den = params.p2 + s.r * params.c(s.theta);
    if den.abs() <= SINGULAR_TOL * (1.0 + s.r) {
        return Err(Error::SingularTransform { theta: s.theta });
    }
    Ok(s.r / den)
}

/// `r = p2 x / (1 - (s2 + sin 6θ) x)`.
pub fn cherkas_inverse(params: &SystemParams, x: f64, theta: f64) -> Result<f64> {
    let den = 1.0 - params.c(theta) * x;
    if den.abs() <= SINGULAR_TOL * (1.0 + x.abs()) {
        return Err(Error::SingularTransform { theta });
    }
    Ok(params.p2 * x / den)
}

/// Coefficients of the Abel equation. `A` and `B` have period `pi/3`; `C` is constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbelCoefficients {
    params: SystemParams,
}

pub fn abel_coefficients(params: &SystemParams) -> Result<AbelCoefficients> {
    params.require_rotation()?;
    Ok(AbelCoefficients { params: *params })
}

impl AbelCoefficients {
    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn a(&self, theta: f64) -> f64 {
        let SystemParams { p1, p2, s1, s2 } = self.params;
        let (s, c) = (6.0 * theta).sin_cos();
        2.0 / p2 * (p1 - p2 * s1 * s2 + p1 * s2 * s2 + (2.0 * p1 * s2 - p2 * s1) * s + (p2 * s - p1 * c + p2 * s2) * c)
    }

    pub fn b(&self, theta: f64) -> f64 {
        let SystemParams { p1, p2, s1, s2 } = self.params;
        let (s, c) = (6.0 * theta).sin_cos();
        2.0 / p2 * (p2 * s1 - 2.0 * p1 * s2 - 4.0 * p2 * c - 2.0 * p1 * s)
    }

    pub fn c(&self, _theta: f64) -> f64 {
        2.0 * self.params.p1 / self.params.p2
    }

    /// Right-hand side `A x^3 + B x^2 + C x`.
    pub fn rhs(&self, theta: f64, x: f64) -> f64 {
        ((self.a(theta) * x + self.b(theta)) * x + self.c(theta)) * x
    }

    /// `d(rhs)/dx`
    pub fn rhs_dx(&self, theta: f64, x: f64) -> f64 {
        (3.0 * self.a(theta) * x + 2.0 * self.b(theta)) * x + self.c(theta)
    }

    /// `A` as a function of `(X, Y) = (sin 6θ, cos 6θ)`, extended off the unit circle.
    pub fn a_xy(&self, x: f64, y: f64) -> f64 {
        let SystemParams { p1, p2, s1, s2 } = self.params;
        2.0 / p2 * (p1 - p2 * s1 * s2 + p1 * s2 * s2 + (2.0 * p1 * s2 - p2 * s1) * x + (p2 * x - p1 * y + p2 * s2) * y)
    }

    /// `B` as a function of `(X, Y) = (sin 6θ, cos 6θ)`.
    pub fn b_xy(&self, x: f64, y: f64) -> f64 {
        let SystemParams { p1, p2, s1, s2 } = self.params;
        2.0 / p2 * (p2 * s1 - 2.0 * p1 * s2 - 4.0 * p2 * y - 2.0 * p1 * x)
    }

    /// Zeros of `A` on the unit circle `X^2 + Y^2 = 1`, as `(X, Y)` pairs.
    ///
    /// The other two algebraic solutions have `X = -s2` and never lie on the
    /// circle when `|s2| > 1`. `None` when the discriminant is negative.
    pub fn a_zero_set(&self) -> Option<[(f64, f64); 2]> {
        let SystemParams { p1, p2, s1, s2 } = self.params;
        let norm = p1 * p1 + p2 * p2;
        let disc = norm - (p2 * s1 - p1 * s2).powi(2);
        if disc < 0.0 || norm == 0.0 {
            return None;
        }
        let root = disc.sqrt();
        let x = |sign: f64| (p1 * p2 * s1 - p1 * p1 * s2 + sign * p2 * root) / norm;
        let y = |sign: f64| (p2 * p2 * s1 - p1 * p2 * s2 - sign * p1 * root) / norm;
        Some([(x(1.0), y(1.0)), (x(-1.0), y(-1.0))])
    }

    /// Zeros of `B` on the unit circle: the line `2 p1 X + 4 p2 Y = p2 s1 - 2 p1 s2`
    /// intersected with the circle.
    pub fn b_zero_set(&self) -> Option<[(f64, f64); 2]> {
        let SystemParams { p1, p2, s1, s2 } = self.params;
        let (a, b, d) = (2.0 * p1, 4.0 * p2, p2 * s1 - 2.0 * p1 * s2);
        let norm = a * a + b * b;
        let disc = norm - d * d;
        if disc < 0.0 || norm == 0.0 {
            return None;
        }
        let root = disc.sqrt();
        let point = |sign: f64| ((a * d - sign * b * root) / norm, (b * d + sign * a * root) / norm);
        Some([point(1.0), point(-1.0)])
    }
}

/// Thresholds in `p1` delimiting the intervals of the region classifier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaThresholds {
    pub sigma_a_minus: f64,
    pub sigma_a_plus: f64,
    /// `sigma_a_minus / 2`
    pub sigma_b_minus: f64,
    /// `sigma_a_plus / 2`
    pub sigma_b_plus: f64,
}

impl SigmaThresholds {
    pub fn in_a_interval(&self, p1: f64) -> bool {
        self.sigma_a_minus < p1 && p1 < self.sigma_a_plus
    }

    pub fn in_b_interval(&self, p1: f64) -> bool {
        self.sigma_b_minus < p1 && p1 < self.sigma_b_plus
    }
}

/// The roots in `p1` of `Q(p1, p2) = 0`, and their halves.
pub fn sigma_thresholds(params: &SystemParams) -> Result<SigmaThresholds> {
    params.require_regular_infinity()?;
    let SystemParams { p2, s1, s2, .. } = *params;
    let centre = p2 * s1 * s2;
    let spread = (p2 * p2 * (s1 * s1 + s2 * s2 - 1.0)).sqrt();
    let den = s2 * s2 - 1.0;
    let (sigma_a_minus, sigma_a_plus) = ((centre - spread) / den, (centre + spread) / den);
    Ok(SigmaThresholds {
        sigma_a_minus,
        sigma_a_plus,
        sigma_b_minus: sigma_a_minus / 2.0,
        sigma_b_plus: sigma_a_plus / 2.0,
    })
}

/// Open interval of `p1` on which `B` changes sign:
/// `(p2 s1 s2 ∓ |p2| sqrt(s1^2 + 16 (s2^2 - 1))) / (2 (s2^2 - 1))`.
pub fn b_sign_change_interval(params: &SystemParams) -> Result<(f64, f64)> {
    params.require_regular_infinity()?;
    let SystemParams { p2, s1, s2, .. } = *params;
    let centre = p2 * s1 * s2;
    let spread = p2.abs() * (s1 * s1 + 16.0 * (s2 * s2 - 1.0)).sqrt();
    let den = 2.0 * (s2 * s2 - 1.0);
    Ok(((centre - spread) / den, (centre + spread) / den))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignCertificate {
    pub a_keeps_sign: bool,
    pub b_keeps_sign: bool,
}

/// Does `f` take both signs on one period `[0, pi/3)`?
///
/// Dense sampling locates the most extreme value of the minority sign, which is
/// then refined by golden-section search so that narrow excursions are not missed.
fn samples_change_sign(f: impl Fn(f64) -> f64) -> bool {
    let h = SEXTANT / SIGN_SAMPLES as f64;
    let values: Vec<f64> = (0..SIGN_SAMPLES).map(|i| f(i as f64 * h)).collect();
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return false;
    }
    let mean: f64 = values.iter().sum::<f64>() / values.len() as f64;
    // orient so that the majority sign is positive and look for negative dips
    let orient = if mean >= 0.0 { 1.0 } else { -1.0 };
    let (imin, _) = values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, v)| if orient * v < bv { (i, orient * v) } else { (bi, bv) });
    let (mut lo, mut hi) = ((imin as f64 - 1.0) * h, (imin as f64 + 1.0) * h);
    let g = |t: f64| orient * f(t);
    let phi = 0.5 * (5.0_f64.sqrt() - 1.0);
    for _ in 0..80 {
        let m1 = hi - phi * (hi - lo);
        let m2 = lo + phi * (hi - lo);
        if g(m1) < g(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let dip = g(0.5 * (lo + hi)).min(g(imin as f64 * h));
    dip < -1e-12 * scale
}

/// Whether `A` and `B` keep their sign, decided from the thresholds and
/// confirmed by sampling.
pub fn sign_certificate(params: &SystemParams) -> Result<SignCertificate> {
    params.require_regular()?;
    let sigma = sigma_thresholds(params)?;
    let (b_lo, b_hi) = b_sign_change_interval(params)?;
    let p1 = params.p1;
    let a_keeps_sign = !sigma.in_a_interval(p1);
    let b_keeps_sign = !(b_lo < p1 && p1 < b_hi);

    let coeffs = abel_coefficients(params)?;
    let near = |t: f64| (p1 - t).abs() <= BOUNDARY_TOL * (1.0 + p1.abs());
    if !(near(sigma.sigma_a_minus) || near(sigma.sigma_a_plus)) {
        let sampled = !samples_change_sign(|t| coeffs.a(t));
        if sampled != a_keeps_sign {
            return Err(Error::Consistency(format!(
                "A keeps sign: thresholds say {a_keeps_sign}, sampling says {sampled} for {params:?}"
            )));
        }
    }
    if !(near(b_lo) || near(b_hi)) {
        let sampled = !samples_change_sign(|t| coeffs.b(t));
        if sampled != b_keeps_sign {
            return Err(Error::Consistency(format!(
                "B keeps sign: thresholds say {b_keeps_sign}, sampling says {sampled} for {params:?}"
            )));
        }
    }
    Ok(SignCertificate { a_keeps_sign, b_keeps_sign })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certificate {
    /// At most one limit cycle surrounds the origin, and it is hyperbolic if it exists.
    AtMostOneLC,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    /// `p1` outside `(sigma_a_minus, sigma_a_plus)`
    pub condition_i: bool,
    /// `p1` outside `(sigma_b_minus, sigma_b_plus)`
    pub condition_ii: bool,
    /// 1, 7 or 13, origin included
    pub equilibria_count: usize,
    pub a_keeps_sign: bool,
    pub b_keeps_sign: bool,
    pub certificate: Certificate,
    pub thresholds: SigmaThresholds,
}

pub fn region_report(params: &SystemParams) -> Result<RegionReport> {
    params.require_regular()?;
    let thresholds = sigma_thresholds(params)?;
    let signs = sign_certificate(params)?;
    let equilibria_count = solve_equilibria(params)?.len();
    let condition_i = !thresholds.in_a_interval(params.p1);
    let condition_ii = !thresholds.in_b_interval(params.p1);
    let certificate =
        if condition_i || condition_ii { Certificate::AtMostOneLC } else { Certificate::Inconclusive };
    Ok(RegionReport {
        condition_i,
        condition_ii,
        equilibria_count,
        a_keeps_sign: signs.a_keeps_sign,
        b_keeps_sign: signs.b_keeps_sign,
        certificate,
        thresholds,
    })
}

/// Mean of `B` over a full turn, `(2 / p2)(p2 s1 - 2 p1 s2)`; times `2 pi` it is
/// the second Lyapunov constant when `p1 = 0`.
pub fn b_mean(params: &SystemParams) -> Result<f64> {
    params.require_rotation()?;
    Ok(2.0 / params.p2 * (params.p2 * params.s1 - 2.0 * params.p1 * params.s2))
}

/// Full-turn integral of `C`, `4 pi p1 / p2`.
pub fn c_integral(params: &SystemParams) -> Result<f64> {
    params.require_rotation()?;
    Ok(2.0 * PI * 2.0 * params.p1 / params.p2)
}
