//! Integration of the polar and Abel systems, the return map on the section
//! `theta = 0` and limit-cycle detection.
//!
//! Along the section the coordinate is `r = |z|^2`. Trajectories are followed
//! with `theta` as the independent variable while `theta' = p2 + r (s2 + sin 6θ)`
//! keeps its sign; otherwise the return map falls back to the cartesian field in
//! the original time.

mod cycles;
pub mod ode;

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::abel::abel_coefficients;
use crate::error::{Error, Result};
use crate::model::{cartesian_jacobian, eval_cartesian_field, CartesianState, PolarState, SystemParams};

pub use cycles::{
    find_limit_cycle, find_limit_cycle_with, scan_cycles, scan_cycles_with, winding_number, CycleOptions,
    CycleScan, CycleStability, LimitCycle, HYPERBOLICITY_MARGIN, TOL_FIXED_POINT,
};
pub use ode::{Control, IntegratorStats, OdeOptions, Trajectory};

/// Default local tolerance of the integrators.
pub const TOL_INTEGRATE: f64 = 1e-10;

/// `|theta'|` below this aborts a `theta`-parameterised integration.
pub const THETA_DOT_MIN: f64 = 1e-8;

/// Abel solutions above this magnitude are reported as escaping.
pub const ABEL_BLOWUP: f64 = 1e6;

fn theta_dot(params: &SystemParams, theta: f64, r: f64) -> f64 {
    params.p2 + r * params.c(theta)
}

/// `dr/dtheta` and its derivative with respect to `r`.
fn polar_slope(params: &SystemParams, theta: f64, r: f64) -> Result<(f64, f64)> {
    let den = theta_dot(params, theta, r);
    if den.abs() < THETA_DOT_MIN || !r.is_finite() {
        return Err(Error::SectionBreakdown { theta, r });
    }
    let (sin6, cos6) = (6.0 * theta).sin_cos();
    let c = params.s2 + sin6;
    let num = 2.0 * params.p1 * r + 2.0 * r * r * (params.s1 - cos6);
    let dnum = 2.0 * params.p1 + 4.0 * r * (params.s1 - cos6);
    Ok((num / den, (dnum * den - num * c) / (den * den)))
}

/// Follows `dr/dtheta` from `s0` over `theta_span` (either sign); samples are `(theta, r)`.
pub fn integrate_polar(params: &SystemParams, s0: PolarState, theta_span: f64, tol: f64) -> Result<Trajectory<f64>> {
    integrate_polar_with(params, s0, theta_span, &OdeOptions::with_tol(tol))
}

pub fn integrate_polar_with(
    params: &SystemParams,
    s0: PolarState,
    theta_span: f64,
    opts: &OdeOptions,
) -> Result<Trajectory<f64>> {
    if s0.r == 0.0 {
        return Ok(Trajectory {
            samples: vec![(s0.theta, 0.0), (s0.theta + theta_span, 0.0)],
            stats: IntegratorStats::default(),
        });
    }
    let sign0 = theta_dot(params, s0.theta, s0.r).signum();
    let mut samples = vec![(s0.theta, s0.r)];
    let (_, _, stats) = ode::integrate(
        |t, y: &[f64; 1]| Ok([polar_slope(params, t, y[0])?.0]),
        s0.theta,
        [s0.r],
        s0.theta + theta_span,
        opts,
        |_, _, t, y| {
            if theta_dot(params, t, y[0]).signum() != sign0 {
                return Err(Error::SectionBreakdown { theta: t, r: y[0] });
            }
            samples.push((t, y[0]));
            Ok(Control::Continue)
        },
    )?;
    Ok(Trajectory { samples, stats })
}

/// Solves the Abel equation over `theta in [0, 2pi]`; samples are `(theta, x)`.
pub fn integrate_abel(params: &SystemParams, x0: f64, tol: f64) -> Result<Trajectory<f64>> {
    let coeffs = abel_coefficients(params)?;
    if !x0.is_finite() {
        return Err(Error::InvalidInput(format!("initial value must be finite, got {x0}")));
    }
    let mut samples = vec![(0.0, x0)];
    let (_, _, stats) = ode::integrate(
        |t, y: &[f64; 1]| Ok([coeffs.rhs(t, y[0])]),
        0.0,
        [x0],
        TAU,
        &OdeOptions::with_tol(tol),
        |_, _, t, y| {
            if !(y[0].abs() <= ABEL_BLOWUP) {
                return Err(Error::BlowUp { theta: t, x: y[0] });
            }
            samples.push((t, y[0]));
            Ok(Control::Continue)
        },
    )
    .map_err(|e| match e {
        Error::Integration(_) => {
            let (theta, x) = *samples.last().expect("initial sample");
            Error::BlowUp { theta, x }
        }
        other => other,
    })?;
    Ok(Trajectory { samples, stats })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Route {
    /// `theta`-parameterised integration of `dr/dtheta`.
    Polar,
    /// Cartesian field in the original time with event location on the section.
    Cartesian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReturnMapSample {
    pub rho_in: f64,
    pub rho_out: f64,
    /// `dPi/drho`, positive since the flow preserves orientation on the section.
    pub multiplier: f64,
    /// Sense of rotation at `(rho_in, 0)`: `+1` counter-clockwise, `-1` clockwise.
    pub direction: i8,
    pub route: Route,
}

impl ReturnMapSample {
    /// `Pi(rho) - rho`
    pub fn displacement(&self) -> f64 {
        self.rho_out - self.rho_in
    }
}

/// First return to the half-line `theta = 0` following the flow forward in time.
pub fn return_map(params: &SystemParams, rho: f64, tol: f64) -> Result<ReturnMapSample> {
    match return_map_polar(params, rho, tol) {
        Err(e @ Error::SectionBreakdown { .. }) => {
            log::debug!("polar return map broke down at rho = {rho}: {e}; trying cartesian route");
            return_map_cartesian(params, rho, tol).map_err(|_| e)
        }
        other => other,
    }
}

fn check_rho(params: &SystemParams, rho: f64) -> Result<()> {
    params.require_rotation()?;
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::InvalidInput(format!("section radius must be positive, got {rho}")));
    }
    Ok(())
}

/// Return map with `theta` as the independent variable and the multiplier from
/// the variational equation, carried as `log(delta r)`.
pub fn return_map_polar(params: &SystemParams, rho: f64, tol: f64) -> Result<ReturnMapSample> {
    check_rho(params, rho)?;
    let sign0 = theta_dot(params, 0.0, rho);
    if sign0.abs() < THETA_DOT_MIN {
        return Err(Error::SectionBreakdown { theta: 0.0, r: rho });
    }
    let direction = sign0.signum();
    let (_, y, _) = ode::integrate(
        |t, y: &[f64; 2]| {
            let (f, df) = polar_slope(params, t, y[0])?;
            Ok([f, df])
        },
        0.0,
        [rho, 0.0],
        direction * TAU,
        &OdeOptions::with_tol(tol),
        |_, _, t, y| {
            if theta_dot(params, t, y[0]).signum() != direction {
                return Err(Error::SectionBreakdown { theta: t, r: y[0] });
            }
            Ok(Control::Continue)
        },
    )
    .map_err(|e| match e {
        Error::Integration(msg) => {
            log::debug!("polar integration failed: {msg}");
            Error::SectionBreakdown { theta: f64::NAN, r: rho }
        }
        other => other,
    })?;
    Ok(ReturnMapSample {
        rho_in: rho,
        rho_out: y[0],
        multiplier: y[1].exp(),
        direction: direction as i8,
        route: Route::Polar,
    })
}

fn wrap_angle(a: f64) -> f64 {
    (a + std::f64::consts::PI).rem_euclid(TAU) - std::f64::consts::PI
}

/// Return map integrating the cartesian field and its variational equation in
/// the original time; the crossing is located by bisection on the last step.
pub fn return_map_cartesian(params: &SystemParams, rho: f64, tol: f64) -> Result<ReturnMapSample> {
    check_rho(params, rho)?;
    let x0 = rho.sqrt();
    let (_, q0) = eval_cartesian_field(params, CartesianState::new(x0, 0.0));
    let omega0 = q0 / x0;
    if omega0 == 0.0 {
        return Err(Error::SectionBreakdown { theta: 0.0, r: rho });
    }
    let direction = omega0.signum();
    let target = direction * TAU;

    let mut field = |_t: f64, s: &[f64; 4]| -> Result<[f64; 4]> {
        let z = CartesianState::new(s[0], s[1]);
        let (p, q) = eval_cartesian_field(params, z);
        let j = cartesian_jacobian(params, z);
        let out = [p, q, j[0][0] * s[2] + j[0][1] * s[3], j[1][0] * s[2] + j[1][1] * s[3]];
        if out.iter().all(|v| v.is_finite()) {
            Ok(out)
        } else {
            Err(Error::Integration("non-finite cartesian field".into()))
        }
    };

    let opts = OdeOptions::with_tol(tol);
    let t_max = 1e3 * TAU / omega0.abs();
    let mut phi = 0.0_f64;
    let mut crossing: Option<(f64, [f64; 4], f64, f64)> = None;
    let y0 = [x0, 0.0, 0.5 / x0, 0.0];
    ode::integrate(&mut field, 0.0, y0, t_max, &opts, |t0, s0, t1, s1| {
        let phi_new = phi + wrap_angle(s1[1].atan2(s1[0]) - s0[1].atan2(s0[0]));
        if (phi_new - target) * direction >= 0.0 {
            crossing = Some((t0, *s0, t1 - t0, phi));
            return Ok(Control::Stop);
        }
        if phi_new * direction < -std::f64::consts::PI {
            // rotation reversed: the orbit does not return along the original sense
            return Err(Error::SectionBreakdown { theta: phi_new, r: s1[0] * s1[0] + s1[1] * s1[1] });
        }
        phi = phi_new;
        Ok(Control::Continue)
    })
    .map_err(|_| Error::SectionBreakdown { theta: phi, r: rho })?;

    let Some((t_prev, s_prev, h_full, phi_prev)) = crossing else {
        return Err(Error::SectionBreakdown { theta: phi, r: rho });
    };
    let k1 = field(t_prev, &s_prev)?;
    let angle_prev = s_prev[1].atan2(s_prev[0]);
    let mut advance = |h: f64| -> Result<([f64; 4], f64)> {
        let (s, _, _) = ode::dopri_step(&mut field, t_prev, &s_prev, &k1, h)?;
        Ok((s, phi_prev + wrap_angle(s[1].atan2(s[0]) - angle_prev)))
    };
    let (mut lo, mut hi) = (0.0, h_full);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (_, ph) = advance(mid)?;
        if (ph - target) * direction >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (state, _) = advance(hi)?;
    // project the variation onto the section y = 0 along the flow
    let (px, qy) = eval_cartesian_field(params, CartesianState::new(state[0], state[1]));
    let dt = -state[3] / qy;
    let dx = state[2] + px * dt;
    let rho_out = state[0] * state[0] + state[1] * state[1];
    Ok(ReturnMapSample {
        rho_in: rho,
        rho_out,
        multiplier: 2.0 * state[0] * dx,
        direction: direction as i8,
        route: Route::Cartesian,
    })
}
