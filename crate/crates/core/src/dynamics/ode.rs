//! Adaptive Dormand–Prince 5(4) integrator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        OdeOptions { rtol: tol, atol: tol, ..Default::default() }
    }

    pub fn h_max(mut self, h_max: f64) -> Self {
        self.h_max = h_max;
        self
    }
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-10, atol: 1e-10, h_max: f64::INFINITY, max_steps: 200_000 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct IntegratorStats {
    pub steps: usize,
    pub rejected: usize,
    pub evaluations: usize,
    /// Largest normalised local error estimate among accepted steps (≤ 1).
    pub max_error: f64,
}

/// Sampled solution; the independent variable is monotone along `samples`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<S> {
    pub samples: Vec<(f64, S)>,
    pub stats: IntegratorStats,
}

impl<S: Copy> Trajectory<S> {
    pub fn last(&self) -> (f64, S) {
        *self.samples.last().expect("trajectory holds at least its initial point")
    }
}

/// Returned by step observers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One step of size `h` from `(t, y)` with `k1 = f(t, y)`.
/// Returns the fifth-order solution, the error vector and `f` at the new point.
pub fn dopri_step<const N: usize, F>(
    f: &mut F,
    t: f64,
    y: &[f64; N],
    k1: &[f64; N],
    h: f64,
) -> Result<([f64; N], [f64; N], [f64; N])>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let mut k = [[0.0; N]; 7];
    k[0] = *k1;
    for s in 1..7 {
        let mut ys = *y;
        for (i, v) in ys.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, kj) in k.iter().take(s).enumerate() {
                acc += A[s][j] * kj[i];
            }
            *v += h * acc;
        }
        if s == 6 {
            // the last stage point is the fifth-order solution
            let k7 = f(t + h, &ys)?;
            k[6] = k7;
            let mut err = [0.0; N];
            for (i, e) in err.iter_mut().enumerate() {
                *e = h * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>();
            }
            return Ok((ys, err, k7));
        }
        k[s] = f(t + C[s] * h, &ys)?;
    }
    unreachable!()
}

fn error_norm<const N: usize>(err: &[f64; N], y0: &[f64; N], y1: &[f64; N], opts: &OdeOptions) -> f64 {
    let sum: f64 = (0..N)
        .map(|i| {
            let sc = opts.atol + opts.rtol * y0[i].abs().max(y1[i].abs());
            (err[i] / sc).powi(2)
        })
        .sum();
    (sum / N as f64).sqrt()
}

/// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction).
///
/// `observer(t_prev, y_prev, t, y)` sees every accepted step and may stop the
/// integration early. A failing right-hand side at a trial stage shrinks the
/// step; a failure at an accepted point is returned.
pub fn integrate<const N: usize, F, O>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    opts: &OdeOptions,
    mut observer: O,
) -> Result<(f64, [f64; N], IntegratorStats)>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    O: FnMut(f64, &[f64; N], f64, &[f64; N]) -> Result<Control>,
{
    let mut stats = IntegratorStats::default();
    let span = t1 - t0;
    if span == 0.0 {
        return Ok((t0, y0, stats));
    }
    let dir = span.signum();
    let (mut t, mut y) = (t0, y0);
    let mut k1 = f(t, &y)?;
    stats.evaluations += 1;

    let d0 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let d1 = k1.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h = h.min(span.abs()).min(opts.h_max) * dir;

    let min_step = 1e-14 * (1.0 + t0.abs().max(t1.abs()));
    while (t1 - t) * dir > 0.0 {
        if stats.steps + stats.rejected >= opts.max_steps {
            return Err(Error::Integration(format!("step budget of {} exhausted at t = {t}", opts.max_steps)));
        }
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        let trial = dopri_step(&mut f, t, &y, &k1, h);
        stats.evaluations += 6;
        let (y_new, err, k_new) = match trial {
            Ok(v) => v,
            Err(e) => {
                stats.rejected += 1;
                h *= 0.25;
                if h.abs() < min_step {
                    return Err(e);
                }
                continue;
            }
        };
        let en = error_norm(&err, &y, &y_new, opts);
        if !en.is_finite() || en > 1.0 {
            stats.rejected += 1;
            let fac = if en.is_finite() { (0.9 * en.powf(-0.2)).max(0.2) } else { 0.2 };
            h *= fac;
            if h.abs() < min_step {
                return Err(Error::Integration(format!("step size underflow at t = {t}")));
            }
            continue;
        }
        let t_new = if (t + h - t1) * dir >= 0.0 { t1 } else { t + h };
        stats.steps += 1;
        stats.max_error = stats.max_error.max(en);
        let control = observer(t, &y, t_new, &y_new)?;
        t = t_new;
        y = y_new;
        k1 = k_new;
        if control == Control::Stop {
            break;
        }
        let fac = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
        h = (h * fac).abs().min(opts.h_max) * dir;
    }
    Ok((t, y, stats))
}

/// Like [`integrate`] but records every accepted step.
pub fn integrate_dense<const N: usize, F>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    opts: &OdeOptions,
) -> Result<Trajectory<[f64; N]>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let mut samples = vec![(t0, y0)];
    let (_, _, stats) = integrate(f, t0, y0, t1, opts, |_, _, t, y| {
        samples.push((t, *y));
        Ok(Control::Continue)
    })?;
    Ok(Trajectory { samples, stats })
}
