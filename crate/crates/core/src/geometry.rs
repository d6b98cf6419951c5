//! No-contact polygonals: the flow restricted to straight segments, real-root
//! isolation of the resulting polynomials and the polygonal around the
//! saddle-nodes at the outer threshold.

use std::f64::consts::FRAC_PI_4;

use roots::{find_root_brent, Convergency};
use serde::{Deserialize, Serialize};

use crate::abel::sigma_thresholds;
use crate::equilibria::{hyperbolic_direction, quadratic_form, solve_equilibria, EquilibriumKind, Sign};
use crate::error::{Error, Result};
use crate::model::{cartesian_monomials, SystemParams, SEXTANT};

/// Polynomial with coefficients in ascending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    pub coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Poly { coeffs }
    }

    /// From coefficients listed highest degree first.
    pub fn from_descending(coeffs: &[f64]) -> Self {
        Poly::new(coeffs.iter().rev().copied().collect())
    }

    pub fn constant(c: f64) -> Self {
        Poly::new(vec![c])
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// `sum |c_i| |x|^i`, a bound on the rounding error scale of [`Poly::eval`].
    pub fn eval_abs(&self, x: f64) -> f64 {
        let ax = x.abs();
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * ax + c.abs())
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::constant(0.0);
        }
        Poly::new(self.coeffs.iter().enumerate().skip(1).map(|(i, &c)| c * i as f64).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &Poly, i: usize| p.coeffs.get(i).copied().unwrap_or(0.0);
        Poly::new((0..n).map(|i| get(self, i) + get(other, i)).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, k: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Cauchy bound: every real root lies in `[-b, b]`.
    pub fn root_bound(&self) -> f64 {
        let lead = *self.coeffs.last().expect("non-empty");
        1.0 + self.coeffs[..self.coeffs.len() - 1].iter().fold(0.0_f64, |m, c| m.max((c / lead).abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealRoot {
    pub x: f64,
    /// Number of isolated roots merged into this one (touching roots count twice).
    pub multiplicity: usize,
    /// The polynomial changes sign across the root.
    pub sign_change: bool,
}

/// Roots closer than this (relative) are merged.
pub const CLUSTER_TOL: f64 = 1e-4;

const POLISH_TOL: f64 = 1e-12;

/// Roots within this fraction of the domain length from an end are not interior.
pub const BOUNDARY_TOL: f64 = 1e-9;

struct Polish;

impl Convergency<f64> for Polish {
    fn is_root_found(&mut self, y: f64) -> bool {
        y == 0.0
    }
    fn is_converged(&mut self, a: f64, b: f64) -> bool {
        (a - b).abs() <= POLISH_TOL * (1.0 + a.abs().max(b.abs()))
    }
    fn is_iteration_limit_reached(&mut self, iter: usize) -> bool {
        iter >= 500
    }
}

/// Candidate roots in `[lo, hi]`, flagged with whether the sign changes across
/// them. Between consecutive critical points the polynomial is monotone, so a
/// root is either a sign change on such a piece or a critical point where the
/// value vanishes to rounding.
fn isolate(p: &Poly, lo: f64, hi: f64) -> Vec<(f64, bool)> {
    if p.is_zero() || p.degree() == 0 {
        return Vec::new();
    }
    let crit: Vec<f64> = isolate(&p.derivative(), lo, hi).into_iter().map(|(x, _)| x).collect();
    let mut knots = vec![lo];
    knots.extend(crit.iter().copied().filter(|&c| c > lo && c < hi));
    knots.push(hi);
    knots.dedup();
    let values: Vec<f64> = knots.iter().map(|&x| p.eval(x)).collect();
    let zero: Vec<bool> = knots.iter().zip(&values).map(|(&x, &v)| v.abs() <= 1e-12 * p.eval_abs(x)).collect();

    let mut out = Vec::new();
    for i in 0..knots.len() {
        if zero[i] {
            let before = (0..i).rev().find(|&j| !zero[j]).map(|j| values[j].signum());
            let after = (i + 1..knots.len()).find(|&j| !zero[j]).map(|j| values[j].signum());
            let crosses = match (before, after) {
                (Some(a), Some(b)) => a != b,
                _ => true,
            };
            out.push((knots[i], crosses));
        }
        if i + 1 < knots.len() && !zero[i] && !zero[i + 1] && values[i] * values[i + 1] < 0.0 {
            let (a, b) = (knots[i], knots[i + 1]);
            match find_root_brent(a, b, |x| p.eval(x), &mut Polish) {
                Ok(x) => out.push((x, true)),
                Err(_) => out.push((0.5 * (a + b), true)),
            }
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Real roots in `[lo, hi]` after merging clusters; a cluster changes sign when
/// it holds an odd number of sign-changing roots.
pub fn real_roots_in(p: &Poly, lo: f64, hi: f64) -> Vec<RealRoot> {
    let (lo, hi) = (lo.min(hi), lo.max(hi));
    let candidates = isolate(p, lo, hi);
    let mut out: Vec<RealRoot> = Vec::new();
    let mut members: Vec<(f64, bool)> = Vec::new();
    let flush = |members: &mut Vec<(f64, bool)>, out: &mut Vec<RealRoot>| {
        if members.is_empty() {
            return;
        }
        let crossings = members.iter().filter(|m| m.1).count();
        let touching = members.len() - crossings;
        let x = members.iter().map(|m| m.0).sum::<f64>() / members.len() as f64;
        out.push(RealRoot { x, multiplicity: crossings + 2 * touching, sign_change: crossings % 2 == 1 });
        members.clear();
    };
    for c in candidates {
        if let Some(&(last, _)) = members.last() {
            if (c.0 - last).abs() > CLUSTER_TOL * (1.0 + last.abs()) {
                flush(&mut members, &mut out);
            }
        }
        members.push(c);
    }
    flush(&mut members, &mut out);
    out
}

/// All real roots.
pub fn real_roots(p: &Poly) -> Vec<RealRoot> {
    if p.degree() == 0 {
        return Vec::new();
    }
    let b = p.root_bound();
    real_roots_in(p, -b, b)
}

/// A straight segment `origin + t * direction`, `t` in `domain`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub origin: (f64, f64),
    pub direction: (f64, f64),
    pub domain: (f64, f64),
    /// Unit normal, perpendicular to `direction`.
    pub normal: (f64, f64),
}

impl Segment {
    /// Validates that `normal` is perpendicular to `direction` and normalises it.
    pub fn new(origin: (f64, f64), direction: (f64, f64), domain: (f64, f64), normal: (f64, f64)) -> Result<Self> {
        let dn = direction.0.hypot(direction.1);
        let nn = normal.0.hypot(normal.1);
        if dn == 0.0 || nn == 0.0 || !(dn.is_finite() && nn.is_finite()) {
            return Err(Error::InvalidInput("segment direction and normal must be nonzero".into()));
        }
        if (direction.0 * normal.0 + direction.1 * normal.1).abs() > 1e-9 * dn * nn {
            return Err(Error::InvalidInput("segment normal is not perpendicular to its direction".into()));
        }
        Ok(Segment { origin, direction, domain, normal: (normal.0 / nn, normal.1 / nn) })
    }

    /// Segment from `a` to `b` parameterised by `t in [0, 1]` with the normal on
    /// the left of the direction of travel.
    pub fn between(a: (f64, f64), b: (f64, f64)) -> Result<Self> {
        let d = (b.0 - a.0, b.1 - a.1);
        if d.0 == 0.0 && d.1 == 0.0 {
            // degenerate: any unit normal will do
            return Ok(Segment { origin: a, direction: (1.0, 0.0), domain: (0.0, 0.0), normal: (0.0, 1.0) });
        }
        Segment::new(a, d, (0.0, 1.0), (-d.1, d.0))
    }

    /// The part of the graph `y = y0 + slope (x - x0)` over `x in x_range`,
    /// parameterised by `x`.
    pub fn graph(point: (f64, f64), slope: f64, x_range: (f64, f64), normal: (f64, f64)) -> Result<Self> {
        Segment::new((0.0, point.1 - slope * point.0), (1.0, slope), x_range, normal)
    }

    pub fn at(&self, t: f64) -> (f64, f64) {
        (self.origin.0 + t * self.direction.0, self.origin.1 + t * self.direction.1)
    }

    pub fn endpoints(&self) -> ((f64, f64), (f64, f64)) {
        (self.at(self.domain.0), self.at(self.domain.1))
    }

    pub fn is_degenerate(&self) -> bool {
        self.domain.0 == self.domain.1
    }
}

/// `<(P, Q), normal>` along `origin + t direction`, for any (not necessarily unit) normal.
pub fn restricted_scalar_product(
    params: &SystemParams,
    origin: (f64, f64),
    direction: (f64, f64),
    normal: (f64, f64),
) -> Poly {
    let xt = Poly::new(vec![origin.0, direction.0]);
    let yt = Poly::new(vec![origin.1, direction.1]);
    let mut xp = vec![Poly::constant(1.0)];
    let mut yp = vec![Poly::constant(1.0)];
    for k in 1..=5 {
        xp.push(xp[k - 1].mul(&xt));
        yp.push(yp[k - 1].mul(&yt));
    }
    let (pm, qm) = cartesian_monomials(params);
    let mut out = Poly::constant(0.0);
    for (monos, weight) in [(pm, normal.0), (qm, normal.1)] {
        for m in monos {
            let term = xp[m.i as usize].mul(&yp[m.j as usize]).scale(m.coef * weight);
            out = out.add(&term);
        }
    }
    out
}

/// Scalar product of the field with the segment's unit normal, as a polynomial
/// in the segment parameter (degree at most 5).
pub fn scalar_product_poly(params: &SystemParams, seg: &Segment) -> Poly {
    restricted_scalar_product(params, seg.origin, seg.direction, seg.normal)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransversalSign {
    AlwaysPositive,
    AlwaysNegative,
    Mixed,
    /// Zero-length segment.
    Vacuous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransversalityReport {
    pub segment: Segment,
    pub sign: TransversalSign,
    /// Roots of the scalar product in the closed domain.
    pub roots: Vec<RealRoot>,
    /// Minimum of `|scalar product|` over the domain when the sign is uniform
    /// (zero if the field is tangent at isolated points), `+inf` for a vacuous
    /// segment, `0` when mixed.
    pub margin: f64,
    pub poly: Poly,
}

impl TransversalityReport {
    pub fn is_uniform(&self) -> bool {
        self.sign != TransversalSign::Mixed
    }
}

/// Classifies the sign of the flow across `seg`. The sign is mixed exactly when
/// a sign-changing root lies strictly inside the domain; tangencies (even
/// roots, equilibria on the segment) keep it uniform.
pub fn verify_transversality(params: &SystemParams, seg: &Segment) -> TransversalityReport {
    let poly = scalar_product_poly(params, seg);
    let (lo, hi) = (seg.domain.0.min(seg.domain.1), seg.domain.0.max(seg.domain.1));
    if seg.is_degenerate() {
        return TransversalityReport {
            segment: *seg,
            sign: TransversalSign::Vacuous,
            roots: Vec::new(),
            margin: f64::INFINITY,
            poly,
        };
    }
    if poly.is_zero() {
        return TransversalityReport { segment: *seg, sign: TransversalSign::Mixed, roots: Vec::new(), margin: 0.0, poly };
    }
    let roots = real_roots_in(&poly, lo, hi);
    let edge = BOUNDARY_TOL * (hi - lo);
    let interior = |x: f64| x > lo + edge && x < hi - edge;
    if roots.iter().any(|r| r.sign_change && interior(r.x)) {
        return TransversalityReport { segment: *seg, sign: TransversalSign::Mixed, roots, margin: 0.0, poly };
    }
    // extrema of a polynomial on an interval sit at the ends or at critical points
    let mut probes = vec![lo, hi];
    probes.extend(real_roots_in(&poly.derivative(), lo, hi).iter().map(|r| r.x));
    let values: Vec<f64> = probes.iter().map(|&x| poly.eval(x)).collect();
    let dominant = values.iter().copied().fold(0.0_f64, |m, v| if v.abs() > m.abs() { v } else { m });
    let margin = if roots.is_empty() { values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs())) } else { 0.0 };
    let sign = if dominant > 0.0 { TransversalSign::AlwaysPositive } else { TransversalSign::AlwaysNegative };
    TransversalityReport { segment: *seg, sign, roots, margin, poly }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PolygonalKind {
    /// The explicit three-piece polygonal for `p2 = -1, s1 = -0.5, s2 = 1.2`.
    Fixture,
    /// Ray, optional connector and tangent line at the saddle-node.
    Constructed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygonal {
    pub kind: PolygonalKind,
    pub segments: Vec<Segment>,
    pub reports: Vec<TransversalityReport>,
    /// The saddle-node in the sector `pi/4 < theta < pi/3`, cartesian.
    pub saddle_node: (f64, f64),
}

fn is_fixture_family(params: &SystemParams) -> bool {
    params.p2 == -1.0 && params.s1 == -0.5 && params.s2 == 1.2
}

/// The first-sextant saddle-node and the unit eigenvector of its nonzero eigenvalue.
fn sector_saddle_node(params: &SystemParams) -> Result<((f64, f64), [f64; 2], f64)> {
    let eqs = solve_equilibria(params)?;
    let e = eqs
        .iter()
        .find(|e| e.kind == EquilibriumKind::SaddleNode && e.theta > 0.0 && e.theta < SEXTANT)
        .ok_or_else(|| Error::Construction("no saddle-node in the first sextant".into()))?;
    let v = hyperbolic_direction(params, e)
        .ok_or_else(|| Error::Construction("saddle-node has complex eigenvalues".into()))?;
    Ok(((e.x, e.y), v, e.theta))
}

fn certify(kind: PolygonalKind, params: &SystemParams, segments: Vec<Segment>, z0: (f64, f64)) -> Result<Polygonal> {
    let reports: Vec<TransversalityReport> = segments.iter().map(|s| verify_transversality(params, s)).collect();
    if let Some((i, r)) = reports.iter().enumerate().find(|(_, r)| !r.is_uniform()) {
        let inside: Vec<f64> = r.roots.iter().filter(|x| x.sign_change).map(|x| x.x).collect();
        return Err(Error::Construction(format!("segment {i} is crossed in both directions (roots at {inside:?})")));
    }
    let mut signs = reports.iter().map(|r| r.sign).filter(|s| *s != TransversalSign::Vacuous);
    if let Some(first) = signs.next() {
        if signs.any(|s| s != first) {
            return Err(Error::Construction("segments are crossed in opposite senses".into()));
        }
    }
    Ok(Polygonal { kind, segments, reports, saddle_node: z0 })
}

/// Builds and certifies the polygonal at `p1 = sigma_a_plus`.
///
/// For `p2 = -1, s1 = -0.5, s2 = 1.2` the explicit three-piece polygonal is
/// used. Otherwise `0 < s1 <= 1, s2 > 1, p2 < 0` is required and the polygonal
/// is the ray `theta = pi/4` up to `r1 = -p2 / (s2 - 1)`, a connector if needed,
/// and the tangent line to the hyperbolic direction of the saddle-node.
pub fn build_polygonal(params: &SystemParams) -> Result<Polygonal> {
    params.require_regular()?;
    let sigma = sigma_thresholds(params)?;
    let at_threshold = quadratic_form(params).sign == Sign::Zero
        && (params.p1 - sigma.sigma_a_plus).abs() < (params.p1 - sigma.sigma_a_minus).abs();
    if !at_threshold {
        return Err(Error::Construction(format!(
            "p1 = {} is not at the outer threshold {}",
            params.p1, sigma.sigma_a_plus
        )));
    }
    let (z0, v, _) = sector_saddle_node(params)?;

    if is_fixture_family(params) {
        let a = 2.0 * (1.0 / 2.8_f64).sqrt();
        let v1 = (a, a);
        let v2 = (1.4250, 1.5399);
        let segments = vec![Segment::between((0.0, 0.0), v1)?, Segment::between(v1, v2)?, Segment::between(v2, z0)?];
        return certify(PolygonalKind::Fixture, params, segments, z0);
    }

    if !(params.s1 > 0.0 && params.s1 <= 1.0 && params.s2 > 1.0 && params.p2 < 0.0) {
        return Err(Error::Construction(format!(
            "construction needs 0 < s1 <= 1, s2 > 1, p2 < 0, got {params:?}"
        )));
    }
    let r1 = -params.p2 / (params.s2 - 1.0);
    let a = (r1 / 2.0).sqrt();

    // the sign of the eigenvector is free: try the clockwise sense first
    let mut v = (v[0], v[1]);
    if z0.0 * v.1 - z0.1 * v.0 > 0.0 {
        v = (-v.0, -v.1);
    }
    let mut failures = Vec::new();
    for dir in [v, (-v.0, -v.1)] {
        match tangent_polygonal(params, z0, dir, a).and_then(|s| certify(PolygonalKind::Constructed, params, s, z0)) {
            Ok(poly) => return Ok(poly),
            Err(Error::Construction(msg)) => failures.push(msg),
            Err(e) => failures.push(e.to_string()),
        }
    }
    Err(Error::Construction(failures.join("; ")))
}

/// Ray to the corner `(a, a)` and the tangent line `z0 + t v`, joined directly
/// when they cross before the first tangency `t0`, otherwise through the
/// segment from the corner to `z0 + t0 v`.
fn tangent_polygonal(params: &SystemParams, z0: (f64, f64), v: (f64, f64), a: f64) -> Result<Vec<Segment>> {
    let line = restricted_scalar_product(params, z0, v, (-v.1, v.0));
    let reach = 4.0 * z0.0.hypot(z0.1);
    let t0 = real_roots_in(&line, 0.0, reach)
        .iter()
        .find(|r| r.sign_change && r.x > BOUNDARY_TOL * reach)
        .map(|r| r.x);

    // intersection of z0 + t v with the diagonal y = x
    let den = v.0 - v.1;
    let t_cross = if den != 0.0 { (z0.1 - z0.0) / den } else { f64::INFINITY };
    let meet = (z0.0 + t_cross * v.0, z0.1 + t_cross * v.1);
    let before_t0 = t0.is_none_or(|t0| t_cross < t0);
    if t_cross > 0.0 && before_t0 && meet.0 > 0.0 && meet.0 <= a {
        return Ok(vec![Segment::between((0.0, 0.0), meet)?, Segment::between(meet, z0)?]);
    }
    let t_join = t0
        .or((t_cross > 0.0).then_some(t_cross))
        .ok_or_else(|| Error::Construction("tangent line never reaches the diagonal side".into()))?;
    let join = (z0.0 + t_join * v.0, z0.1 + t_join * v.1);
    let corner = (a, a);
    Ok(vec![Segment::between((0.0, 0.0), corner)?, Segment::between(corner, join)?, Segment::between(join, z0)?])
}

/// `theta' = p2 + r (s2 - 1)` on the ray `theta = pi/4`, the angular speed of the
/// polar system there.
pub fn diagonal_theta_dot(params: &SystemParams, r: f64) -> f64 {
    params.p2 + r * params.c(FRAC_PI_4)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example(p1: f64) -> SystemParams {
        SystemParams::new(p1, -1.0, -0.5, 1.2).unwrap()
    }

    fn sigma_plus() -> f64 {
        sigma_thresholds(&example(0.0)).unwrap().sigma_a_plus
    }

    #[test]
    fn poly_arithmetic() {
        let p = Poly::from_descending(&[1.0, 0.0, -2.0]);
        assert_eq!(p.eval(3.0), 7.0);
        assert_eq!(p.derivative().coeffs, vec![0.0, 2.0]);
        assert_eq!(p.mul(&Poly::new(vec![1.0, 1.0])).coeffs, vec![-2.0, -2.0, 1.0, 1.0]);
        assert_eq!(Poly::new(vec![1.0, 0.0, 0.0]).degree(), 0);
    }

    #[test]
    fn roots_of_simple_polynomials() {
        let p = Poly::from_descending(&[1.0, 0.0, -2.0]);
        let r = real_roots(&p);
        assert_eq!(r.len(), 2);
        assert!((r[1].x - 2.0_f64.sqrt()).abs() < 1e-12);
        // double root is touching
        let q = Poly::from_descending(&[1.0, -2.0, 1.0]);
        let r = real_roots(&q);
        assert_eq!(r.len(), 1);
        assert!(!r[0].sign_change);
        assert!((r[0].x - 1.0).abs() < 1e-7);
        // triple root changes sign
        let c = Poly::from_descending(&[1.0, -3.0, 3.0, -1.0]);
        let r = real_roots(&c);
        assert_eq!(r.len(), 1);
        assert!(r[0].sign_change);
        assert!(real_roots(&Poly::from_descending(&[1.0, 0.0, 1.0])).is_empty());
    }

    #[test]
    fn close_pair_is_merged() {
        let p = Poly::new(vec![1.0, -1.0]).mul(&Poly::new(vec![-1.0 - 5e-6, 1.0])).mul(&Poly::new(vec![3.0, 1.0]));
        let r = real_roots(&p);
        assert_eq!(r.len(), 2);
        assert!(r[0].sign_change && (r[0].x + 3.0).abs() < 1e-12);
        assert!(!r[1].sign_change && r[1].multiplicity == 2);
    }

    #[test]
    fn diagonal_restriction() {
        let p = SystemParams::new(0.7, -1.3, 0.4, 2.0).unwrap();
        // normal (-1, 1) gives y' - x' = x^3 (4 p2 + 8 x^2 (s2 - 1))
        let poly = restricted_scalar_product(&p, (0.0, 0.0), (1.0, 1.0), (-1.0, 1.0));
        let expected = Poly::new(vec![0.0, 0.0, 0.0, 4.0 * p.p2, 0.0, 8.0 * (p.s2 - 1.0)]);
        for (a, b) in poly.coeffs.iter().zip(&expected.coeffs) {
            assert!((a - b).abs() < 1e-12, "{poly:?}");
        }
    }

    #[test]
    fn diagonal_segment_is_negative() {
        let p = example(sigma_plus());
        let end = 2.0 * (-p.p2 / (9.0 * p.s2 - 8.0)).sqrt();
        let seg = Segment::new((0.0, 0.0), (1.0, 1.0), (0.0, end), (-1.0, 1.0)).unwrap();
        let r = verify_transversality(&p, &seg);
        assert_eq!(r.sign, TransversalSign::AlwaysNegative);
    }

    #[test]
    fn vanishes_at_equilibrium_on_any_line() {
        let p = example(sigma_plus());
        let (z0, _, _) = sector_saddle_node(&p).unwrap();
        for angle in [0.1_f64, 1.0, 2.5] {
            let poly = restricted_scalar_product(&p, z0, (angle.cos(), angle.sin()), (-angle.sin(), angle.cos()));
            assert!(poly.eval(0.0).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_length_segment_is_vacuous() {
        let seg = Segment::between((1.0, 1.0), (1.0, 1.0)).unwrap();
        let r = verify_transversality(&example(3.0), &seg);
        assert_eq!(r.sign, TransversalSign::Vacuous);
        assert_eq!(r.margin, f64::INFINITY);
        assert!(r.roots.is_empty());
    }

    #[test]
    fn mixed_segment_detected() {
        let p = example(sigma_plus());
        let seg = Segment::new((0.0, 0.0), (1.0, 1.0), (0.0, 3.0), (-1.0, 1.0)).unwrap();
        let r = verify_transversality(&p, &seg);
        assert_eq!(r.sign, TransversalSign::Mixed);
        assert!(r.roots.iter().any(|x| x.sign_change && x.x > 0.0 && x.x < 3.0));
    }

    #[test]
    fn perpendicularity_is_enforced() {
        assert!(Segment::new((0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)).is_err());
    }

    #[test]
    fn fixture_polygonal_is_certified() {
        let poly = build_polygonal(&example(sigma_plus())).unwrap();
        assert_eq!(poly.kind, PolygonalKind::Fixture);
        assert_eq!(poly.segments.len(), 3);
        for r in &poly.reports {
            assert_eq!(r.sign, TransversalSign::AlwaysNegative, "{r:?}");
        }
    }

    #[test]
    fn constructed_case_saddle_node_sector() {
        let base = SystemParams::new(0.0, -1.0, 0.5, 1.5).unwrap();
        let plus = sigma_thresholds(&base).unwrap().sigma_a_plus;
        let p = SystemParams::new(plus, -1.0, 0.5, 1.5).unwrap();
        let (_, _, theta0) = sector_saddle_node(&p).unwrap();
        assert!(theta0 > FRAC_PI_4 && theta0 < SEXTANT);
        let r1 = -p.p2 / (p.s2 - 1.0);
        for k in 1..10 {
            assert!(diagonal_theta_dot(&p, r1 * k as f64 / 10.0) < 0.0);
        }
    }

    #[test]
    fn constructed_polygonal_is_certified() {
        let base = SystemParams::new(0.0, -1.0, 0.5, 1.5).unwrap();
        let plus = sigma_thresholds(&base).unwrap().sigma_a_plus;
        let poly = build_polygonal(&SystemParams::new(plus, -1.0, 0.5, 1.5).unwrap()).unwrap();
        assert_eq!(poly.kind, PolygonalKind::Constructed);
        assert!(poly.segments.len() == 2 || poly.segments.len() == 3);
        assert!(poly.reports.iter().all(|r| r.sign == poly.reports[0].sign && r.is_uniform()));
    }

    #[test]
    fn outside_constructed_case_fails() {
        let base = SystemParams::new(0.0, -1.0, -0.3, 1.5).unwrap();
        let plus = sigma_thresholds(&base).unwrap().sigma_a_plus;
        let r = build_polygonal(&SystemParams::new(plus, -1.0, -0.3, 1.5).unwrap());
        assert!(matches!(r, Err(Error::Construction(_))));
    }

    #[test]
    fn away_from_threshold_fails() {
        assert!(matches!(build_polygonal(&example(3.0)), Err(Error::Construction(_))));
    }
}
