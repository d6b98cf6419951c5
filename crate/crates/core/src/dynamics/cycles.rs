use std::cell::RefCell;
use std::f64::consts::TAU;

use roots::{find_root_brent, SimpleConvergency};
use serde::{Deserialize, Serialize};

use super::{integrate_polar_with, return_map, OdeOptions, ReturnMapSample, Route, Trajectory, TOL_INTEGRATE};
use crate::equilibria::{solve_equilibria_with_tol, EPS_Q};
use crate::error::{Error, Result};
use crate::model::{PolarState, SystemParams};

/// Default tolerance on `|Pi(rho) - rho|` at a detected cycle.
pub const TOL_FIXED_POINT: f64 = 1e-10;

/// `|multiplier - 1|` must exceed this for a cycle to count as hyperbolic.
pub const HYPERBOLICITY_MARGIN: f64 = 1e-4;

/// Fixed points closer than this are the same cycle.
const DEDUP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleOptions {
    /// Tolerance used while scanning for sign changes of `Pi(rho) - rho`.
    pub tol_integrate: f64,
    /// Tolerance used while refining a bracket; tighter than the fixed-point target.
    pub tol_refine: f64,
    pub tol_fixed_point: f64,
    /// Number of orbit samples per turn kept for the enclosure test.
    pub orbit_samples: usize,
    /// Tolerance for `Q = 0` when listing the equilibria a cycle encloses.
    pub tol_q_zero: f64,
}

impl Default for CycleOptions {
    fn default() -> Self {
        CycleOptions {
            tol_integrate: TOL_INTEGRATE,
            tol_refine: 1e-12,
            tol_fixed_point: TOL_FIXED_POINT,
            orbit_samples: 4000,
            tol_q_zero: EPS_Q,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CycleStability {
    Stable,
    Unstable,
    NonHyperbolicWithinTolerance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitCycle {
    /// Fixed point of the return map, as `r = |z|^2` on `theta = 0`.
    pub rho_star: f64,
    pub multiplier: f64,
    pub stability: CycleStability,
    pub hyperbolic: bool,
    pub direction: i8,
    /// One turn of the cycle as `(theta, r)` samples.
    pub orbit: Trajectory<f64>,
    /// Equilibria enclosed by the orbit, the origin included.
    pub surrounded_equilibria: usize,
    /// `|Pi(rho_star) - rho_star|`
    pub residual: f64,
}

impl LimitCycle {
    /// Orbit samples as cartesian points.
    pub fn cartesian_orbit(&self) -> Vec<(f64, f64)> {
        self.orbit
            .samples
            .iter()
            .map(|&(theta, r)| {
                let rho = r.sqrt();
                (rho * theta.cos(), rho * theta.sin())
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleScan {
    pub cycles: Vec<LimitCycle>,
    /// `Pi(rho) = rho` everywhere on the scanned range (a period annulus).
    pub degenerate: bool,
    /// Radii where the return map could not be evaluated.
    pub gaps: Vec<f64>,
    pub samples: Vec<ReturnMapSample>,
}

/// Winding number of the closed polygon `poly` around `p`.
pub fn winding_number(poly: &[(f64, f64)], p: (f64, f64)) -> i32 {
    let n = poly.len();
    let mut w = 0;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let cross = (b.0 - a.0) * (p.1 - a.1) - (p.0 - a.0) * (b.1 - a.1);
        if a.1 <= p.1 {
            if b.1 > p.1 && cross > 0.0 {
                w += 1;
            }
        } else if b.1 <= p.1 && cross < 0.0 {
            w -= 1;
        }
    }
    w
}

pub fn find_limit_cycle(params: &SystemParams, bracket: (f64, f64), tol_fp: f64) -> Result<LimitCycle> {
    find_limit_cycle_with(params, bracket, &CycleOptions { tol_fixed_point: tol_fp, ..Default::default() })
}

/// Brent's method on `g(rho) = Pi(rho) - rho` inside `bracket`.
pub fn find_limit_cycle_with(params: &SystemParams, bracket: (f64, f64), opts: &CycleOptions) -> Result<LimitCycle> {
    params.require_rotation()?;
    let (lo, hi) = (bracket.0.min(bracket.1), bracket.0.max(bracket.1));
    if !(lo > 0.0 && hi.is_finite()) {
        return Err(Error::InvalidInput(format!("bracket must lie in (0, inf), got {bracket:?}")));
    }
    let tol = opts.tol_refine;
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let mut g = |rho: f64| match return_map(params, rho, tol) {
        Ok(s) => s.displacement(),
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let (g_lo, g_hi) = (g(lo), g(hi));
    if let Some(e) = failure.take() {
        return Err(e);
    }
    if g_lo * g_hi > 0.0 {
        return Err(Error::NotFound { lo, hi });
    }
    let mut conv = SimpleConvergency { eps: opts.tol_fixed_point * 1e-3, max_iter: 200 };
    let root = find_root_brent(lo, hi, &mut g, &mut conv);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let rho_star = root.map_err(|_| Error::NotFound { lo, hi })?;
    let sample = return_map(params, rho_star, tol)?;
    let residual = sample.displacement().abs();
    if residual > opts.tol_fixed_point {
        log::warn!("cycle at rho = {rho_star} has residual {residual:e} above {:e}", opts.tol_fixed_point);
    }

    let multiplier = sample.multiplier;
    let hyperbolic = (multiplier - 1.0).abs() > HYPERBOLICITY_MARGIN;
    let stability = if !hyperbolic {
        CycleStability::NonHyperbolicWithinTolerance
    } else if multiplier < 1.0 {
        CycleStability::Stable
    } else {
        CycleStability::Unstable
    };

    let orbit = match sample.route {
        Route::Polar => {
            let ode = OdeOptions::with_tol(tol).h_max(TAU / opts.orbit_samples as f64);
            integrate_polar_with(params, PolarState::new(rho_star, 0.0)?, f64::from(sample.direction) * TAU, &ode)?
        }
        Route::Cartesian => {
            return Err(Error::Integration(format!(
                "periodic orbit through rho = {rho_star} meets the curve theta' = 0"
            )))
        }
    };

    let mut cycle = LimitCycle {
        rho_star,
        multiplier,
        stability,
        hyperbolic,
        direction: sample.direction,
        orbit,
        surrounded_equilibria: 0,
        residual,
    };
    let polygon = cycle.cartesian_orbit();
    cycle.surrounded_equilibria = if params.infinity_regular() {
        solve_equilibria_with_tol(params, opts.tol_q_zero)?
            .iter()
            .filter(|e| winding_number(&polygon, (e.x, e.y)) != 0)
            .count()
    } else {
        usize::from(winding_number(&polygon, (0.0, 0.0)) != 0)
    };
    Ok(cycle)
}

pub fn scan_cycles(params: &SystemParams, rho_max: f64, n: usize) -> Result<CycleScan> {
    scan_cycles_with(params, rho_max, n, &CycleOptions::default())
}

/// Evaluates `Pi(rho) - rho` on `n` log-spaced radii in `(0, rho_max]` and
/// refines every sign change between neighbouring radii with the same route
/// and sense of rotation.
pub fn scan_cycles_with(params: &SystemParams, rho_max: f64, n: usize, opts: &CycleOptions) -> Result<CycleScan> {
    params.require_rotation()?;
    if n < 100 {
        return Err(Error::InvalidInput(format!("at least 100 radii are required, got {n}")));
    }
    if !(rho_max > 0.0 && rho_max.is_finite()) {
        return Err(Error::InvalidInput(format!("rho_max must be positive, got {rho_max}")));
    }
    let rho_min = rho_max * 1e-4;
    let ratio = (rho_max / rho_min).ln() / (n - 1) as f64;
    let radii: Vec<f64> = (0..n).map(|i| rho_min * (ratio * i as f64).exp()).collect();

    let mut samples = Vec::with_capacity(n);
    let mut gaps = Vec::new();
    let mut evaluated: Vec<Option<ReturnMapSample>> = Vec::with_capacity(n);
    for &rho in &radii {
        match return_map(params, rho, opts.tol_integrate) {
            Ok(s) => {
                samples.push(s);
                evaluated.push(Some(s));
            }
            Err(e @ (Error::SectionBreakdown { .. } | Error::Integration(_))) => {
                log::debug!("return map unavailable at rho = {rho}: {e}");
                gaps.push(rho);
                evaluated.push(None);
            }
            Err(e) => return Err(e),
        }
    }

    let degenerate = !samples.is_empty()
        && samples.iter().all(|s| s.displacement().abs() < 1e-8 * (1.0 + s.rho_in));
    if degenerate {
        return Ok(CycleScan { cycles: Vec::new(), degenerate, gaps, samples });
    }

    let mut cycles: Vec<LimitCycle> = Vec::new();
    for w in evaluated.windows(2) {
        let (Some(a), Some(b)) = (w[0], w[1]) else { continue };
        if a.route != Route::Polar || b.route != Route::Polar || a.direction != b.direction {
            continue;
        }
        if a.displacement() * b.displacement() > 0.0 {
            continue;
        }
        match find_limit_cycle_with(params, (a.rho_in, b.rho_in), opts) {
            Ok(c) => {
                if cycles.iter().all(|d| (d.rho_star - c.rho_star).abs() > DEDUP) {
                    cycles.push(c);
                }
            }
            Err(e) => log::debug!("bracket [{}, {}] rejected: {e}", a.rho_in, b.rho_in),
        }
    }
    cycles.sort_by(|a, b| a.rho_star.total_cmp(&b.rho_star));
    Ok(CycleScan { cycles, degenerate, gaps, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abel::sigma_thresholds;
    use crate::model::SEXTANT;

    fn example(p1: f64) -> SystemParams {
        SystemParams::new(p1, -1.0, -0.5, 1.2).unwrap()
    }

    #[test]
    fn winding_of_square() {
        let sq = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
        assert_eq!(winding_number(&sq, (0.5, 0.5)), 1);
        assert_eq!(winding_number(&sq, (1.5, 0.5)), 0);
        let cw: Vec<_> = sq.iter().rev().copied().collect();
        assert_eq!(winding_number(&cw, (0.5, 0.5)), -1);
    }

    #[test]
    fn example_cycle_outside_all_equilibria() {
        let scan = scan_cycles(&example(3.3), 30.0, 120).unwrap();
        assert_eq!(scan.cycles.len(), 1, "{:?}", scan.cycles.iter().map(|c| c.rho_star).collect::<Vec<_>>());
        let c = &scan.cycles[0];
        assert_eq!(c.surrounded_equilibria, 1);
        assert_eq!(c.stability, CycleStability::Stable);
        assert!(c.residual < TOL_FIXED_POINT);
    }

    #[test]
    fn example_cycle_is_z6_symmetric() {
        let plus = sigma_thresholds(&example(0.0)).unwrap().sigma_a_plus;
        let p = example(plus);
        let scan = scan_cycles(&p, 30.0, 120).unwrap();
        let c = &scan.cycles[0];
        let sextant = integrate_polar_with(
            &p,
            PolarState::new(c.rho_star, 0.0).unwrap(),
            f64::from(c.direction) * SEXTANT,
            &OdeOptions::with_tol(1e-12),
        )
        .unwrap();
        assert!((sextant.last().1 - c.rho_star).abs() < 1e-6);
    }

    #[test]
    fn center_is_degenerate() {
        let p = SystemParams::new(0.0, 1.0, 0.0, 2.0).unwrap();
        let scan = scan_cycles(&p, 5.0, 100).unwrap();
        assert!(scan.degenerate);
        assert!(scan.cycles.is_empty());
    }

    #[test]
    fn bracket_without_sign_change() {
        let r = find_limit_cycle(&example(3.3), (0.9, 1.0), TOL_FIXED_POINT);
        assert!(matches!(r, Err(Error::NotFound { .. })));
    }

    #[test]
    fn scan_rejects_small_n() {
        assert!(matches!(scan_cycles(&example(3.3), 10.0, 10), Err(Error::InvalidInput(_))));
    }
}
