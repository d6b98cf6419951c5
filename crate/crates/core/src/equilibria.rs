//! Closed-form equilibria of the polar system and their classification.
//!
//! Away from the origin the equilibria solve
//!
//! ```text
//! p1 + r (s1 - cos 6θ) = 0,    p2 + r (s2 + sin 6θ) = 0.
//! ```
//!
//! Eliminating `r` and substituting `t = tan 3θ` gives the quadratic
//! `(p1 s2 - p2 - p2 s1) t^2 + 2 p1 t + (p2 + p1 s2 - p2 s1) = 0` whose roots are
//! `(p1 ∓ u) / (p2 - p1 s2 + p2 s1)` with `u = sqrt(Q(p1, p2))`. When the
//! denominator is small the reciprocal `tau = cot 3θ` form is used instead.
//! One root (or a double root) per sextant is replicated six times by the
//! rotation symmetry.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    cartesian_jacobian, eval_polar_field, is_hamiltonian, normalize_angle, polar_jacobian, CartesianState, PolarState,
    SystemParams, SEXTANT,
};

/// Relative zero tolerance for the quadratic form: `|Q| <= EPS_Q (p1^2 + p2^2)` counts as zero.
pub const EPS_Q: f64 = 1e-9;

/// Equilibria must satisfy `|field| < RESIDUAL_TOL (1 + r^2)`.
pub const RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

/// Value of `Q(p1, p2) = p1^2 + p2^2 - (p1 s2 - p2 s1)^2` with its tolerance-aware sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFormValue {
    pub value: f64,
    pub sign: Sign,
}

impl QuadraticFormValue {
    /// `u = sqrt(Q)`, clamped to zero when the sign is not positive.
    pub fn u(&self) -> f64 {
        match self.sign {
            Sign::Positive => self.value.sqrt(),
            _ => 0.0,
        }
    }
}

pub fn quadratic_form(params: &SystemParams) -> QuadraticFormValue {
    quadratic_form_with_tol(params, EPS_Q)
}

pub fn quadratic_form_with_tol(params: &SystemParams, eps: f64) -> QuadraticFormValue {
    let SystemParams { p1, p2, s1, s2 } = *params;
    let value = (1.0 - s2 * s2) * p1 * p1 + (1.0 - s1 * s1) * p2 * p2 + 2.0 * s1 * s2 * p1 * p2;
    let sign = if value.abs() <= eps * (p1 * p1 + p2 * p2) {
        Sign::Zero
    } else if value > 0.0 {
        Sign::Positive
    } else {
        Sign::Negative
    };
    QuadraticFormValue { value, sign }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EquilibriumKind {
    Focus,
    Node,
    Saddle,
    SaddleNode,
    Center,
    Degenerate,
}

impl EquilibriumKind {
    /// Poincaré index of an isolated equilibrium of this type.
    pub fn index(self) -> i8 {
        match self {
            EquilibriumKind::Focus | EquilibriumKind::Node | EquilibriumKind::Center => 1,
            EquilibriumKind::Saddle => -1,
            EquilibriumKind::SaddleNode | EquilibriumKind::Degenerate => 0,
        }
    }
}

/// Which root of the `tan 3θ` quadratic an equilibrium comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Origin,
    /// `t = (p1 - u) / (p2 - p1 s2 + p2 s1)`; its Jacobian determinant is
    /// `-12 (p1^2 + p2^2) u / (u - p1 s1 - p2 s2)`.
    Plus,
    /// `t = (p1 + u) / (p2 - p1 s2 + p2 s1)`; determinant `-12 (p1^2 + p2^2) u / (u + p1 s1 + p2 s2)`.
    Minus,
    /// `u = 0`: both roots coincide.
    Double,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    /// `|z|^2`
    pub r: f64,
    pub theta: f64,
    pub x: f64,
    pub y: f64,
    /// Eigenvalues of the polar Jacobian. The origin is monodromic and its
    /// linear part vanishes, so its eigenvalues are both zero.
    pub eigenvalues: [Complex64; 2],
    pub kind: EquilibriumKind,
    pub index_hint: i8,
    pub branch: Branch,
}

impl Equilibrium {
    pub fn is_origin(&self) -> bool {
        self.r == 0.0
    }

    pub fn polar(&self) -> PolarState {
        PolarState { r: self.r, theta: self.theta }
    }

    pub fn cartesian(&self) -> CartesianState {
        CartesianState { x: self.x, y: self.y }
    }

    fn unclassified(r: f64, theta: f64, branch: Branch) -> Self {
        let c = PolarState { r, theta }.to_cartesian();
        Equilibrium {
            r,
            theta,
            x: c.x,
            y: c.y,
            eigenvalues: [Complex64::new(0.0, 0.0); 2],
            kind: EquilibriumKind::Degenerate,
            index_hint: 0,
            branch,
        }
    }
}

fn origin(params: &SystemParams) -> Equilibrium {
    let kind = if is_hamiltonian(params) { EquilibriumKind::Center } else { EquilibriumKind::Focus };
    Equilibrium { kind, index_hint: 1, ..Equilibrium::unclassified(0.0, 0.0, Branch::Origin) }
}

/// Residual `|(r', theta')|` of the polar field, scaled by `1 + r^2`.
pub fn scaled_residual(params: &SystemParams, r: f64, theta: f64) -> f64 {
    let (dr, dth) = eval_polar_field(params, PolarState { r, theta });
    dr.hypot(dth) / (1.0 + r * r)
}

/// Angle in `[0, pi/3)` of the sextant representative of a branch.
fn base_angle(params: &SystemParams, u: f64, branch: Branch) -> Result<f64> {
    let SystemParams { p1, p2, s1, s2 } = *params;
    let den_tan = p2 - p1 * s2 + p2 * s1;
    let den_cot = p2 + p1 * s2 - p2 * s1;
    let scale = p1.abs() + p2.abs() * (1.0 + s1.abs()) + p1.abs() * s2.abs();
    if den_tan.abs().max(den_cot.abs()) <= 1e-14 * scale {
        return Err(Error::Degenerate(format!(
            "both the tan and cot parameterisations degenerate for {params:?}"
        )));
    }
    // Minus takes +u, Plus (and Double, u = 0) takes -u.
    let signed_u = if branch == Branch::Minus { u } else { -u };
    let three_theta = if den_tan.abs() >= den_cot.abs() {
        ((p1 + signed_u) / den_tan).atan()
    } else {
        // cot 3θ = tau, 3θ in (0, pi)
        let tau = (-p1 + signed_u) / den_cot;
        1.0_f64.atan2(tau)
    };
    Ok((three_theta / 3.0).rem_euclid(SEXTANT))
}

/// Newton refinement on `p1 + r (s1 - cos 6θ) = 0`, `p2 + r (s2 + sin 6θ) = 0`.
fn newton_polish(params: &SystemParams, mut r: f64, mut theta: f64, iterations: usize) -> (f64, f64) {
    for _ in 0..iterations {
        let (sin6, cos6) = (6.0 * theta).sin_cos();
        let f1 = params.p1 + r * (params.s1 - cos6);
        let f2 = params.p2 + r * (params.s2 + sin6);
        let (a, b) = (params.s1 - cos6, 6.0 * r * sin6);
        let (c, d) = (params.s2 + sin6, 6.0 * r * cos6);
        let det = a * d - b * c;
        if det == 0.0 || !det.is_finite() {
            break;
        }
        r -= (d * f1 - b * f2) / det;
        theta -= (a * f2 - c * f1) / det;
    }
    (r, theta)
}

/// All equilibria: the origin first, then the others sorted by angle.
///
/// Requires `p2 != 0` and `|s2| > 1`. Every non-origin equilibrium is classified
/// with [`classify_equilibrium`].
pub fn solve_equilibria(params: &SystemParams) -> Result<Vec<Equilibrium>> {
    solve_equilibria_with_tol(params, EPS_Q)
}

pub fn solve_equilibria_with_tol(params: &SystemParams, eps_q: f64) -> Result<Vec<Equilibrium>> {
    params.require_regular()?;
    let mut out = vec![origin(params)];
    let q = quadratic_form_with_tol(params, eps_q);
    if params.s2 * params.p2 >= 0.0 || q.sign == Sign::Negative {
        return Ok(out);
    }
    let branches: &[Branch] = match q.sign {
        Sign::Zero => &[Branch::Double],
        _ => &[Branch::Plus, Branch::Minus],
    };
    let u = q.u();
    // a saddle-node snapped from |Q| <= eps_q misses the field by O(eps_q)
    let double_tol = if eps_q > EPS_Q { RESIDUAL_TOL * 10.0 * eps_q / EPS_Q } else { RESIDUAL_TOL };
    let mut found = Vec::with_capacity(12);
    for &branch in branches {
        let theta0 = base_angle(params, u, branch)?;
        let r = -params.p2 / params.c(theta0);
        if !(r > 0.0) {
            return Err(Error::Degenerate(format!("closed form produced r = {r} for {params:?}")));
        }
        let (mut r, mut theta0) = (r, theta0);
        if scaled_residual(params, r, theta0) >= RESIDUAL_TOL && branch != Branch::Double {
            (r, theta0) = newton_polish(params, r, theta0, 4);
        }
        let tol = if branch == Branch::Double { double_tol } else { RESIDUAL_TOL };
        if scaled_residual(params, r, theta0) >= tol {
            return Err(Error::Consistency(format!(
                "equilibrium residual {:e} at (r, theta) = ({r}, {theta0})",
                scaled_residual(params, r, theta0)
            )));
        }
        for k in 0..6 {
            let theta = normalize_angle(theta0 + k as f64 * SEXTANT);
            found.push(Equilibrium::unclassified(r, theta, branch));
        }
    }
    found.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    for e in found {
        out.push(classify_with_sign(params, &e, q.sign));
    }
    Ok(out)
}

/// Closed-form eigenvalues of a real 2x2 matrix.
pub fn eigenvalues_2x2(m: [[f64; 2]; 2]) -> [Complex64; 2] {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = tr * tr / 4.0 - det;
    let half = tr / 2.0;
    if disc >= 0.0 {
        let s = disc.sqrt();
        // avoid cancellation in the smaller root
        let big = half + half.signum() * s;
        let big = if half == 0.0 { s } else { big };
        let small = if big != 0.0 { det / big } else { half - s };
        let (hi, lo) = if big >= small { (big, small) } else { (small, big) };
        [Complex64::new(hi, 0.0), Complex64::new(lo, 0.0)]
    } else {
        let s = (-disc).sqrt();
        [Complex64::new(half, s), Complex64::new(half, -s)]
    }
}

/// Fill eigenvalues and kind of a non-origin equilibrium from the polar Jacobian.
///
/// When `Q = 0` the pair of equilibria has merged and the point is reported as a
/// saddle-node. Otherwise the kind is read from the eigenvalues.
pub fn classify_equilibrium(params: &SystemParams, e: &Equilibrium) -> Result<Equilibrium> {
    if e.is_origin() {
        return Err(Error::InvalidInput(
            "the origin is monodromic; use the stability module to classify it".into(),
        ));
    }
    Ok(classify_with_sign(params, e, quadratic_form(params).sign))
}

fn classify_with_sign(params: &SystemParams, e: &Equilibrium, q_sign: Sign) -> Equilibrium {
    let j = polar_jacobian(params, e.polar());
    let eigenvalues = eigenvalues_2x2(j);
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let scale = j.iter().flatten().map(|v| v * v).sum::<f64>().max(f64::MIN_POSITIVE);
    let kind = if q_sign == Sign::Zero {
        EquilibriumKind::SaddleNode
    } else if det.abs() <= 1e-9 * scale {
        if tr.abs() <= 1e-9 * scale.sqrt() {
            EquilibriumKind::Degenerate
        } else {
            EquilibriumKind::SaddleNode
        }
    } else if det < 0.0 {
        EquilibriumKind::Saddle
    } else if tr.abs() <= 1e-12 * scale.sqrt() {
        EquilibriumKind::Center
    } else if tr * tr - 4.0 * det < 0.0 {
        EquilibriumKind::Focus
    } else {
        EquilibriumKind::Node
    };
    Equilibrium { eigenvalues, kind, index_hint: kind.index(), ..*e }
}

/// Eigen-decomposition of the cartesian Jacobian at `e`: real eigenvalues with
/// unit eigenvectors, largest modulus first. `None` for complex eigenvalues.
pub fn cartesian_eigen(params: &SystemParams, e: &Equilibrium) -> Option<[(f64, [f64; 2]); 2]> {
    let m = cartesian_jacobian(params, e.cartesian());
    let ev = eigenvalues_2x2(m);
    if ev[0].im != 0.0 {
        return None;
    }
    let mut pairs = [ev[0].re, ev[1].re].map(|lambda| {
        // (A - λ I) v = 0; use the better-conditioned row
        let (a, b) = (m[0][0] - lambda, m[0][1]);
        let (c, d) = (m[1][0], m[1][1] - lambda);
        let v = if a.hypot(b) >= c.hypot(d) { [-b, a] } else { [-d, c] };
        let n = v[0].hypot(v[1]);
        let v = if n > 0.0 { [v[0] / n, v[1] / n] } else { [1.0, 0.0] };
        (lambda, v)
    });
    if pairs[0].0.abs() < pairs[1].0.abs() {
        pairs.swap(0, 1);
    }
    Some(pairs)
}

/// Unit eigenvector of the nonzero eigenvalue of a saddle-node (the direction
/// of its hyperbolic sector), in cartesian coordinates.
pub fn hyperbolic_direction(params: &SystemParams, e: &Equilibrium) -> Option<[f64; 2]> {
    cartesian_eigen(params, e).map(|pairs| pairs[0].1)
}

/// Grid-search oracle for the non-origin equilibria, independent of the closed form.
///
/// Scans `(r, theta)` over `(0, 4 |p2| / (|s2| - 1)] x [0, 2pi)` for cells where
/// both equations change sign, then polishes with damped Newton iterations.
pub fn brute_force_equilibria(params: &SystemParams, grid_n: usize) -> Result<Vec<(f64, f64)>> {
    params.require_regular()?;
    if grid_n < 100 {
        return Err(Error::InvalidInput(format!("grid_n must be >= 100, got {grid_n}")));
    }
    let r_max = 4.0 * params.p2.abs() / (params.s2.abs() - 1.0);
    let n_r = grid_n;
    let n_t = 6 * grid_n;
    let dr = r_max / n_r as f64;
    let dt = 2.0 * PI / n_t as f64;
    let f = |r: f64, t: f64| {
        let (sin6, cos6) = (6.0 * t).sin_cos();
        (params.p1 + r * (params.s1 - cos6), params.p2 + r * (params.s2 + sin6))
    };
    let grid: Vec<Vec<(f64, f64)>> = (0..=n_r)
        .map(|i| {
            let r = (i as f64 + 0.5) * dr;
            (0..=n_t).map(|j| f(r, j as f64 * dt)).collect()
        })
        .collect();
    let changes = |vals: [f64; 4]| {
        vals.iter().any(|&v| v >= 0.0) && vals.iter().any(|&v| v <= 0.0)
    };
    let mut roots: Vec<(f64, f64)> = Vec::new();
    for i in 0..n_r {
        for j in 0..n_t {
            let corners = [grid[i][j], grid[i + 1][j], grid[i][j + 1], grid[i + 1][j + 1]];
            if !changes(corners.map(|c| c.0)) || !changes(corners.map(|c| c.1)) {
                continue;
            }
            let (mut r, mut t) = ((i as f64 + 1.0) * dr, (j as f64 + 0.5) * dt);
            let mut converged = false;
            for _ in 0..200 {
                let (f1, f2) = f(r, t);
                if f1.hypot(f2) < 1e-14 * (1.0 + params.p1.abs() + params.p2.abs()) {
                    converged = true;
                    break;
                }
                let (sin6, cos6) = (6.0 * t).sin_cos();
                let (a, b) = (params.s1 - cos6, 6.0 * r * sin6);
                let (c, d) = (params.s2 + sin6, 6.0 * r * cos6);
                let det = a * d - b * c;
                if det == 0.0 {
                    break;
                }
                let mut step_r = (d * f1 - b * f2) / det;
                let mut step_t = (a * f2 - c * f1) / det;
                // keep the iterate near its cell
                let shrink = (step_r.abs() / dr).max(step_t.abs() / dt);
                if shrink > 1.0 {
                    step_r /= shrink;
                    step_t /= shrink;
                }
                r -= step_r;
                t -= step_t;
            }
            if !converged {
                let (f1, f2) = f(r, t);
                converged = f1.hypot(f2) < 1e-10;
            }
            if !converged || r <= 0.0 {
                continue;
            }
            let t = normalize_angle(t);
            let duplicate = roots.iter().any(|&(r0, t0)| {
                let dtheta = (t - t0).abs();
                (r - r0).abs() < 1e-6 && dtheta.min(2.0 * PI - dtheta) < 1e-6
            });
            if !duplicate {
                roots.push((r, t));
            }
        }
    }
    roots.sort_by(|a, b| a.1.total_cmp(&b.1));
    Ok(roots)
}
