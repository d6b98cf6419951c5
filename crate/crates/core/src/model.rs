//! Parameter space and the three equivalent forms of the vector field
//!
//! ```text
//! z' = (p1 + i p2) z^2 zbar + (s1 + i s2) z^3 zbar^2 - zbar^5
//! ```
//!
//! * complex form, evaluated directly on `z`;
//! * cartesian form `(P(x, y), Q(x, y))`, a pair of real quintic polynomials;
//! * polar form in `(r, theta)` with `r = |z|^2` (so `z = sqrt(r) e^{i theta}`),
//!   divided by `r`:
//!
//! ```text
//! r'     = 2 p1 r + 2 r^2 (s1 - cos 6 theta)
//! theta' = p2 + r (s2 + sin 6 theta)
//! ```
//!
//! The polar time `s` satisfies `ds/dt = r`: multiplying the polar field by `r`
//! gives `(dr/dt, dtheta/dt)` of the original system.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance to a regime boundary (`p2 = 0`, `|s2| = 1`) below which a warning is issued.
pub const BOUNDARY_WARNING: f64 = 1e-9;

/// Width of one sextant, the fundamental domain of the rotation symmetry.
pub const SEXTANT: f64 = PI / 3.0;

/// The four real parameters of the system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub p1: f64,
    pub p2: f64,
    pub s1: f64,
    pub s2: f64,
}

impl SystemParams {
    pub fn new(p1: f64, p2: f64, s1: f64, s2: f64) -> Result<Self> {
        let params = SystemParams { p1, p2, s1, s2 };
        if [p1, p2, s1, s2].iter().all(|v| v.is_finite()) {
            Ok(params)
        } else {
            Err(Error::Regime(format!("parameters must be finite, got {params:?}")))
        }
    }

    /// The angular velocity at the origin is `p2`; the origin is monodromic iff it is nonzero.
    pub fn rotation_defined(&self) -> bool {
        self.p2 != 0.0
    }

    /// No equilibria at infinity in the Poincaré compactification.
    pub fn infinity_regular(&self) -> bool {
        self.s2.abs() > 1.0
    }

    pub fn require_rotation(&self) -> Result<()> {
        if self.rotation_defined() {
            Ok(())
        } else {
            Err(Error::Regime("p2 != 0 is required (p2 = 0)".into()))
        }
    }

    pub fn require_regular_infinity(&self) -> Result<()> {
        if self.infinity_regular() {
            Ok(())
        } else {
            Err(Error::Regime(format!("|s2| > 1 is required (s2 = {})", self.s2)))
        }
    }

    /// Both `p2 != 0` and `|s2| > 1`.
    pub fn require_regular(&self) -> Result<()> {
        self.require_rotation()?;
        self.require_regular_infinity()
    }

    /// Human-readable notes for parameters within [`BOUNDARY_WARNING`] of a regime boundary.
    pub fn boundary_warnings(&self) -> Vec<String> {
        let mut notes = Vec::new();
        if self.p2 != 0.0 && self.p2.abs() < BOUNDARY_WARNING {
            notes.push(format!("p2 = {:e} is close to the p2 = 0 boundary", self.p2));
        }
        let gap = self.s2.abs() - 1.0;
        if gap != 0.0 && gap.abs() < BOUNDARY_WARNING {
            notes.push(format!("|s2| = {} is close to the |s2| = 1 boundary", self.s2.abs()));
        }
        notes
    }

    /// `c(theta) = s2 + sin 6 theta`; never vanishes when `|s2| > 1`.
    #[inline]
    pub fn c(&self, theta: f64) -> f64 {
        self.s2 + (6.0 * theta).sin()
    }

    /// Radius of the curve `{theta' = 0}` at angle `theta`, when positive.
    pub fn theta_curve_radius(&self, theta: f64) -> Option<f64> {
        let r = -self.p2 / self.c(theta);
        (r.is_finite() && r > 0.0).then_some(r)
    }
}

/// Reduce an angle to `[0, 2pi)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    // rem_euclid can round up to TAU itself for tiny negative inputs
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Index of the sextant `floor(theta / (pi/3))`, in `0..6`.
pub fn sextant_index(theta: f64) -> usize {
    ((normalize_angle(theta) / SEXTANT).floor() as usize).min(5)
}

/// State in polar coordinates with `r = |z|^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarState {
    pub r: f64,
    pub theta: f64,
}

impl PolarState {
    /// `theta` is reduced to `[0, 2pi)`.
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !(r >= 0.0) || !theta.is_finite() || !r.is_finite() {
            return Err(Error::InvalidInput(format!("polar state needs r >= 0, got r = {r}, theta = {theta}")));
        }
        Ok(PolarState { r, theta: normalize_angle(theta) })
    }

    pub fn to_cartesian(&self) -> CartesianState {
        let rho = self.r.sqrt();
        CartesianState { x: rho * self.theta.cos(), y: rho * self.theta.sin() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartesianState {
    pub x: f64,
    pub y: f64,
}

impl CartesianState {
    pub fn new(x: f64, y: f64) -> Self {
        CartesianState { x, y }
    }

    pub fn to_polar(&self) -> PolarState {
        PolarState { r: self.x * self.x + self.y * self.y, theta: normalize_angle(self.y.atan2(self.x)) }
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }
}

/// `f(z)` of the complex equation.
pub fn eval_complex_field(params: &SystemParams, z: Complex64) -> Complex64 {
    let p = Complex64::new(params.p1, params.p2);
    let s = Complex64::new(params.s1, params.s2);
    let zb = z.conj();
    let modulus2 = z.norm_sqr();
    // z^2 zbar = |z|^2 z and z^3 zbar^2 = |z|^4 z
    p * z * modulus2 + s * z * modulus2 * modulus2 - zb.powu(5)
}

/// A monomial `coef * x^i * y^j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monomial {
    pub coef: f64,
    pub i: u32,
    pub j: u32,
}

/// Monomials of the cartesian field `(P, Q)`.
pub fn cartesian_monomials(params: &SystemParams) -> ([Monomial; 10], [Monomial; 10]) {
    let SystemParams { p1, p2, s1, s2 } = *params;
    let m = |coef, i, j| Monomial { coef, i, j };
    let p = [
        m(p1, 3, 0),
        m(-p2, 2, 1),
        m(p1, 1, 2),
        m(-p2, 0, 3),
        m(s1 - 1.0, 5, 0),
        m(-s2, 4, 1),
        m(2.0 * s1 + 10.0, 3, 2),
        m(-2.0 * s2, 2, 3),
        m(s1 - 5.0, 1, 4),
        m(-s2, 0, 5),
    ];
    let q = [
        m(p2, 3, 0),
        m(p1, 2, 1),
        m(p2, 1, 2),
        m(p1, 0, 3),
        m(s2, 5, 0),
        m(s1 + 5.0, 4, 1),
        m(2.0 * s2, 3, 2),
        m(2.0 * s1 - 10.0, 2, 3),
        m(s2, 1, 4),
        m(s1 + 1.0, 0, 5),
    ];
    (p, q)
}

fn eval_monomials(terms: &[Monomial], x: f64, y: f64) -> f64 {
    terms.iter().map(|t| t.coef * x.powi(t.i as i32) * y.powi(t.j as i32)).sum()
}

fn eval_partials(terms: &[Monomial], x: f64, y: f64) -> (f64, f64) {
    terms.iter().fold((0.0, 0.0), |(dx, dy), t| {
        let (i, j) = (t.i as i32, t.j as i32);
        let ddx = if i > 0 { t.coef * i as f64 * x.powi(i - 1) * y.powi(j) } else { 0.0 };
        let ddy = if j > 0 { t.coef * j as f64 * x.powi(i) * y.powi(j - 1) } else { 0.0 };
        (dx + ddx, dy + ddy)
    })
}

/// `(P(x, y), Q(x, y))`, the field in the original time `t`.
pub fn eval_cartesian_field(params: &SystemParams, s: CartesianState) -> (f64, f64) {
    let (p, q) = cartesian_monomials(params);
    (eval_monomials(&p, s.x, s.y), eval_monomials(&q, s.x, s.y))
}

/// Jacobian `[[P_x, P_y], [Q_x, Q_y]]` of the cartesian field.
pub fn cartesian_jacobian(params: &SystemParams, s: CartesianState) -> [[f64; 2]; 2] {
    let (p, q) = cartesian_monomials(params);
    let (px, py) = eval_partials(&p, s.x, s.y);
    let (qx, qy) = eval_partials(&q, s.x, s.y);
    [[px, py], [qx, qy]]
}

/// `P_x + Q_y`, which equals `4 p1 |z|^2 + 6 s1 |z|^4`.
pub fn divergence(params: &SystemParams, s: CartesianState) -> f64 {
    let j = cartesian_jacobian(params, s);
    j[0][0] + j[1][1]
}

/// `(dr/ds, dtheta/ds)` of the polar system.
pub fn eval_polar_field(params: &SystemParams, s: PolarState) -> (f64, f64) {
    let (sin6, cos6) = (6.0 * s.theta).sin_cos();
    let dr = 2.0 * s.r * params.p1 + 2.0 * s.r * s.r * (params.s1 - cos6);
    let dtheta = params.p2 + s.r * (params.s2 + sin6);
    (dr, dtheta)
}

/// Jacobian of the polar field with respect to `(r, theta)`.
pub fn polar_jacobian(params: &SystemParams, s: PolarState) -> [[f64; 2]; 2] {
    let (sin6, cos6) = (6.0 * s.theta).sin_cos();
    let r = s.r;
    [
        [2.0 * params.p1 + 4.0 * r * (params.s1 - cos6), 12.0 * r * r * sin6],
        [params.s2 + sin6, 6.0 * r * cos6],
    ]
}

/// The system is Hamiltonian exactly when `p1 = s1 = 0` (exact comparison).
pub fn is_hamiltonian(params: &SystemParams) -> bool {
    params.p1 == 0.0 && params.s1 == 0.0
}

/// `gamma_k = exp(2 pi i k / 6)`.
pub fn rotation(k: u32) -> Complex64 {
    Complex64::from_polar(1.0, TAU * f64::from(k % 6) / 6.0)
}

/// `|f(gamma_k z) - gamma_k f(z)|`.
pub fn equivariance_defect(params: &SystemParams, z: Complex64, k: u32) -> f64 {
    if k.is_multiple_of(6) {
        return 0.0;
    }
    let g = rotation(k);
    (eval_complex_field(params, g * z) - g * eval_complex_field(params, z)).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p1: f64, p2: f64, s1: f64, s2: f64) -> SystemParams {
        SystemParams::new(p1, p2, s1, s2).unwrap()
    }

    #[test]
    fn complex_field_vanishes_at_origin() {
        let p = params(1.3, -0.7, 0.2, 2.5);
        assert_eq!(eval_complex_field(&p, Complex64::new(0.0, 0.0)), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn complex_field_at_one() {
        let f = eval_complex_field(&params(0.0, 1.0, 0.0, 1.0), Complex64::new(1.0, 0.0));
        assert!((f - Complex64::new(-1.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn cartesian_field_vanishes_at_origin() {
        assert_eq!(eval_cartesian_field(&params(1.0, 2.0, 3.0, 4.0), CartesianState::new(0.0, 0.0)), (0.0, 0.0));
    }

    #[test]
    fn polar_field_at_origin_is_pure_rotation() {
        let p = params(0.4, -1.5, 0.3, 1.7);
        for theta in [0.0, 1.0, 4.0] {
            assert_eq!(eval_polar_field(&p, PolarState::new(0.0, theta).unwrap()), (0.0, -1.5));
        }
    }

    #[test]
    fn hamiltonian_predicate_is_exact() {
        assert!(is_hamiltonian(&params(0.0, 1.0, 0.0, 2.0)));
        assert!(!is_hamiltonian(&params(1e-9, 1.0, 0.0, 2.0)));
        assert!(!is_hamiltonian(&params(0.0, 1.0, -1e-300, 2.0)));
    }

    #[test]
    fn identity_rotation_has_zero_defect() {
        let p = params(0.3, 0.1, -2.0, 1.1);
        assert_eq!(equivariance_defect(&p, Complex64::new(3.0, -1.0), 0), 0.0);
    }

    #[test]
    fn unit_circle_defect_sweep() {
        let p = params(0.7, -1.2, 0.4, 1.9);
        let worst = (0..720)
            .flat_map(|n| (1..6).map(move |k| (n, k)))
            .map(|(n, k)| equivariance_defect(&p, Complex64::from_polar(1.0, TAU * n as f64 / 720.0), k))
            .fold(0.0_f64, f64::max);
        assert!(worst < 1e-13, "max defect {worst}");
    }

    #[test]
    fn divergence_matches_closed_form() {
        let p = params(0.3, -1.1, 0.8, 1.6);
        let s = CartesianState::new(0.7, -0.4);
        let m2 = s.x * s.x + s.y * s.y;
        let expected = 4.0 * p.p1 * m2 + 6.0 * p.s1 * m2 * m2;
        assert!((divergence(&p, s) - expected).abs() < 1e-13);
    }

    #[test]
    fn non_finite_params_rejected() {
        assert!(SystemParams::new(f64::NAN, 1.0, 0.0, 2.0).unwrap_err().is_regime());
        assert!(SystemParams::new(0.0, f64::INFINITY, 0.0, 2.0).is_err());
    }

    #[test]
    fn regime_predicates() {
        let p = params(0.0, 0.0, 0.0, 1.0);
        assert!(!p.rotation_defined());
        assert!(!p.infinity_regular());
        assert!(p.require_regular().is_err());
        assert!(params(0.0, 1.0, 0.0, -1.5).require_regular().is_ok());
        assert_eq!(params(0.0, 1e-12, 0.0, 1.0 + 1e-12).boundary_warnings().len(), 2);
    }

    #[test]
    fn angles_and_sextants() {
        assert_eq!(normalize_angle(-1e-18), 0.0);
        assert!((normalize_angle(-PI) - PI).abs() < 1e-15);
        assert_eq!(sextant_index(0.0), 0);
        assert_eq!(sextant_index(SEXTANT * 2.5), 2);
        assert_eq!(sextant_index(-0.01), 5);
        assert!(PolarState::new(-1.0, 0.0).is_err());
    }

    #[test]
    fn polar_cartesian_round_trip() {
        let s = PolarState::new(2.25, 5.5).unwrap();
        let back = s.to_cartesian().to_polar();
        assert!((back.r - s.r).abs() < 1e-14 && (back.theta - s.theta).abs() < 1e-14);
    }
}
