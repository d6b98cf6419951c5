//! Reproduction of the worked example at `p2 = -1, s1 = -0.5` (default `s2 = 1.2`).

use std::io::Write;

use serde::{Deserialize, Serialize};
use z6_core::abel::{region_report, sigma_thresholds, Certificate};
use z6_core::dynamics::{scan_cycles_with, CycleOptions};
use z6_core::equilibria::{
    cartesian_eigen, quadratic_form, solve_equilibria, Equilibrium, EquilibriumKind, Sign,
};
use z6_core::geometry::{build_polygonal, real_roots, restricted_scalar_product, Poly};
use z6_core::SystemParams;

use crate::error::CliError;

pub const P2: f64 = -1.0;
pub const S1: f64 = -0.5;
pub const S2: f64 = 1.2;

pub const PRINTED_QUINTIC: [f64; 6] = [
    -2.39191647949065,
    2.34410741916533,
    4.86235167862649,
    -2.71272659052423,
    -2.33924612305747,
    -0.92289951077311,
];
const PRINTED_SADDLE_NODE: (f64, f64) = (1.358, 1.5);
const PRINTED_EIGENVECTOR: (f64, f64) = (-0.8594, -0.5114);
const PRINTED_NORMAL: (f64, f64) = (0.5114, -0.8594);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    /// Compared with a value printed in the example.
    Printed,
    /// Must hold for any parameters of the family.
    Invariant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    /// Measured deviation or value.
    pub value: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example42Report {
    pub params: SystemParams,
    pub checks: Vec<Check>,
    pub passed: bool,
}

fn check(name: &str, kind: CheckKind, value: Option<f64>, tolerance: Option<f64>, pass: bool, detail: String) -> Check {
    Check { name: name.into(), kind, value, tolerance, pass, detail }
}

fn below(name: &str, kind: CheckKind, value: f64, tolerance: f64, detail: String) -> Check {
    check(name, kind, Some(value), Some(tolerance), value < tolerance, detail)
}

fn first_sextant_saddle_node(eqs: &[Equilibrium]) -> Option<&Equilibrium> {
    let d = |e: &Equilibrium| (e.x - PRINTED_SADDLE_NODE.0).hypot(e.y - PRINTED_SADDLE_NODE.1);
    eqs.iter().filter(|e| e.kind == EquilibriumKind::SaddleNode).min_by(|a, b| d(a).total_cmp(&d(b)))
}

fn line_angle(v: [f64; 2], w: (f64, f64)) -> f64 {
    let cos = (v[0] * w.0 + v[1] * w.1).abs() / (v[0].hypot(v[1]) * w.0.hypot(w.1));
    cos.min(1.0).acos()
}

pub fn run(s2: f64, opts: &CycleOptions, samples: usize) -> Result<Example42Report, CliError> {
    use CheckKind::{Invariant, Printed};
    let base = SystemParams::new(0.0, P2, S1, s2)?;
    let sigma = sigma_thresholds(&base)?;
    let params = SystemParams::new(sigma.sigma_a_plus, P2, S1, s2)?;
    let mut checks = Vec::new();

    let d = (sigma.sigma_a_minus + 0.52423).abs();
    checks.push(below("sigma_a_minus", Printed, d, 1e-4, format!("{:.8} vs -0.52423", sigma.sigma_a_minus)));
    let d = (sigma.sigma_a_plus - 3.25151).abs();
    checks.push(below("sigma_a_plus", Printed, d, 1e-4, format!("{:.8} vs 3.25151", sigma.sigma_a_plus)));

    let q = quadratic_form(&params);
    checks.push(check(
        "q_vanishes_at_sigma_a_plus",
        Invariant,
        Some(q.value),
        None,
        q.sign == Sign::Zero,
        format!("Q = {:.3e}", q.value),
    ));

    let eqs = solve_equilibria(&params)?;
    checks.push(check(
        "seven_equilibria",
        Invariant,
        Some(eqs.len() as f64),
        None,
        eqs.len() == 7,
        format!("{} equilibria", eqs.len()),
    ));

    let sn = first_sextant_saddle_node(&eqs);
    match sn {
        Some(e) => {
            let dist = (e.x - PRINTED_SADDLE_NODE.0).hypot(e.y - PRINTED_SADDLE_NODE.1);
            checks.push(below("saddle_node_position", Printed, dist, 5e-3, format!("({:.6}, {:.6})", e.x, e.y)));
            match cartesian_eigen(&params, e) {
                Some([(lambda, v), (zero, _)]) => {
                    checks.push(below(
                        "saddle_node_zero_eigenvalue",
                        Invariant,
                        zero.abs(),
                        1e-6,
                        format!("eigenvalues {lambda:.6}, {zero:.3e}"),
                    ));
                    let angle = line_angle(v, PRINTED_EIGENVECTOR);
                    checks.push(below(
                        "eigenvector_direction",
                        Printed,
                        angle,
                        1e-3,
                        format!("({:.6}, {:.6}), angle {angle:.3e} rad", v[0], v[1]),
                    ));
                }
                None => checks.push(check(
                    "saddle_node_zero_eigenvalue",
                    Invariant,
                    None,
                    None,
                    false,
                    "complex eigenvalues".into(),
                )),
            }
        }
        None => checks.push(check("saddle_node_position", Printed, None, None, false, "no saddle-node".into())),
    }

    // line R through the saddle-node with the printed slope and normal
    let z0 = sn.map_or(PRINTED_SADDLE_NODE, |e| (e.x, e.y));
    let slope = -PRINTED_EIGENVECTOR.1 / -PRINTED_EIGENVECTOR.0;
    let poly = restricted_scalar_product(&params, (0.0, z0.1 - slope * z0.0), (1.0, slope), PRINTED_NORMAL);
    let printed = Poly::from_descending(&PRINTED_QUINTIC);
    let rel = (0..=5)
        .map(|k| (poly.coeffs.get(k).copied().unwrap_or(0.0) - printed.coeffs[k]).abs() / printed.coeffs[k].abs())
        .fold(0.0, f64::max);
    checks.push(below("quintic_coefficients", Printed, rel, 1e-6, format!("max relative deviation {rel:.3e}")));
    let crossings: Vec<f64> = real_roots(&poly).iter().filter(|r| r.sign_change).map(|r| r.x).collect();
    let root_dev = match crossings.as_slice() {
        [x] => (x + 1.1737).abs(),
        _ => f64::INFINITY,
    };
    checks.push(check(
        "quintic_root",
        Printed,
        root_dev.is_finite().then_some(root_dev),
        Some(1e-3),
        root_dev < 1e-3,
        format!("sign-changing roots {crossings:?}"),
    ));

    let polygonal = build_polygonal(&params);
    checks.push(match &polygonal {
        Ok(p) => check(
            "polygonal_certified",
            Printed,
            None,
            None,
            true,
            format!("{:?}, {} segments, signs {:?}", p.kind, p.segments.len(), p.reports.iter().map(|r| r.sign).collect::<Vec<_>>()),
        ),
        Err(e) => check("polygonal_certified", Printed, None, None, false, e.to_string()),
    });

    let report = region_report(&params)?;
    checks.push(check(
        "certificate",
        Invariant,
        None,
        None,
        report.certificate == Certificate::AtMostOneLC,
        format!("{:?}", report.certificate),
    ));

    let rho_max = 10.0 * (params.p1.abs() + params.p2.abs()) / (s2.abs() - 1.0);
    let scan = scan_cycles_with(&params, rho_max, samples, opts)?;
    let (pass, detail) = match scan.cycles.as_slice() {
        [c] => (
            c.surrounded_equilibria == 7,
            format!("rho* = {:.10}, multiplier {:.3e}, surrounds {}", c.rho_star, c.multiplier, c.surrounded_equilibria),
        ),
        cs => (false, format!("{} cycles", cs.len())),
    };
    checks.push(check("one_cycle_around_seven", Invariant, Some(scan.cycles.len() as f64), None, pass, detail));

    let passed = checks.iter().all(|c| c.pass);
    Ok(Example42Report { params, checks, passed })
}

pub fn print_text<W: Write>(out: &mut W, r: &Example42Report) -> std::io::Result<()> {
    let p = &r.params;
    writeln!(out, "p1 = {} (sigma_a+)  p2 = {}  s1 = {}  s2 = {}", p.p1, p.p2, p.s1, p.s2)?;
    for c in &r.checks {
        let kind = match c.kind {
            CheckKind::Printed => "printed",
            CheckKind::Invariant => "invariant",
        };
        writeln!(out, "{}  {:<28} {:<9}  {}", if c.pass { "PASS" } else { "FAIL" }, c.name, kind, c.detail)?;
    }
    Ok(())
}
