//! Single-purpose subcommands.

use std::io::Write;

use serde::{Deserialize, Serialize};
use z6_core::abel::{b_sign_change_interval, sigma_thresholds, SigmaThresholds};
use z6_core::dynamics::{find_limit_cycle_with, scan_cycles_with, CycleOptions};
use z6_core::equilibria::{solve_equilibria_with_tol, Branch, EquilibriumKind};
use z6_core::geometry::{build_polygonal, verify_transversality, Segment, TransversalSign, TransversalityReport};
use z6_core::{LimitCycle, SystemParams};

use crate::analyze::CycleRecord;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaRecord {
    pub p2: f64,
    pub s1: f64,
    pub s2: f64,
    pub thresholds: SigmaThresholds,
    /// Exact interval of `p1` where `B` changes sign.
    pub b_sign_change: (f64, f64),
    pub p1: Option<f64>,
    pub in_a: Option<bool>,
    pub in_b: Option<bool>,
}

pub fn sigma(p2: f64, s1: f64, s2: f64, p1: Option<f64>) -> Result<SigmaRecord, CliError> {
    let params = SystemParams::new(p1.unwrap_or(0.0), p2, s1, s2)?;
    let thresholds = sigma_thresholds(&params)?;
    Ok(SigmaRecord {
        p2,
        s1,
        s2,
        thresholds,
        b_sign_change: b_sign_change_interval(&params)?,
        p1,
        in_a: p1.map(|v| thresholds.in_a_interval(v)),
        in_b: p1.map(|v| thresholds.in_b_interval(v)),
    })
}

pub fn print_sigma<W: Write>(out: &mut W, r: &SigmaRecord) -> std::io::Result<()> {
    let t = &r.thresholds;
    writeln!(out, "sigma_a-  {:.16e}", t.sigma_a_minus)?;
    writeln!(out, "sigma_a+  {:.16e}", t.sigma_a_plus)?;
    writeln!(out, "sigma_b-  {:.16e}", t.sigma_b_minus)?;
    writeln!(out, "sigma_b+  {:.16e}", t.sigma_b_plus)?;
    writeln!(out, "B changes sign for p1 in ({:.10}, {:.10})", r.b_sign_change.0, r.b_sign_change.1)?;
    if let (Some(p1), Some(a), Some(b)) = (r.p1, r.in_a, r.in_b) {
        writeln!(out, "p1 = {p1}: inside sigma_a interval {a}, inside sigma_b interval {b}")?;
    }
    Ok(())
}

/// One row per equilibrium.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumRow {
    pub index: usize,
    pub r: f64,
    pub theta: f64,
    pub x: f64,
    pub y: f64,
    pub kind: EquilibriumKind,
    pub branch: Branch,
    pub lambda1_re: f64,
    pub lambda1_im: f64,
    pub lambda2_re: f64,
    pub lambda2_im: f64,
}

pub fn equilibria(params: &SystemParams, eps_q: f64) -> Result<Vec<EquilibriumRow>, CliError> {
    Ok(solve_equilibria_with_tol(params, eps_q)?
        .iter()
        .enumerate()
        .map(|(index, e)| EquilibriumRow {
            index,
            r: e.r,
            theta: e.theta,
            x: e.x,
            y: e.y,
            kind: e.kind,
            branch: e.branch,
            lambda1_re: e.eigenvalues[0].re,
            lambda1_im: e.eigenvalues[0].im,
            lambda2_re: e.eigenvalues[1].re,
            lambda2_im: e.eigenvalues[1].im,
        })
        .collect())
}

pub fn print_equilibria<W: Write>(out: &mut W, rows: &[EquilibriumRow]) -> std::io::Result<()> {
    writeln!(out, "{:>3}  {:>14} {:>14} {:>14} {:>14}  {:<11} eigenvalues", "#", "r", "theta", "x", "y", "kind")?;
    for e in rows {
        writeln!(
            out,
            "{:>3}  {:>14.10} {:>14.10} {:>14.10} {:>14.10}  {:<11} {:.6e}{:+.6e}i, {:.6e}{:+.6e}i",
            e.index,
            e.r,
            e.theta,
            e.x,
            e.y,
            format!("{:?}", e.kind),
            e.lambda1_re,
            e.lambda1_im,
            e.lambda2_re,
            e.lambda2_im
        )?;
    }
    Ok(())
}

/// Point of a cycle orbit for plotting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitPoint {
    pub cycle: usize,
    pub theta: f64,
    pub r: f64,
    pub x: f64,
    pub y: f64,
}

pub fn limit_cycles(
    params: &SystemParams,
    bracket: Option<(f64, f64)>,
    rho_max: f64,
    samples: usize,
    opts: &CycleOptions,
) -> Result<(Vec<LimitCycle>, bool), CliError> {
    match bracket {
        Some(b) => Ok((vec![find_limit_cycle_with(params, b, opts)?], false)),
        None => {
            let scan = scan_cycles_with(params, rho_max, samples, opts)?;
            Ok((scan.cycles, scan.degenerate))
        }
    }
}

pub fn orbit_points(cycles: &[LimitCycle]) -> Vec<OrbitPoint> {
    cycles
        .iter()
        .enumerate()
        .flat_map(|(i, c)| {
            c.orbit.samples.iter().zip(c.cartesian_orbit()).map(move |(&(theta, r), (x, y))| OrbitPoint {
                cycle: i,
                theta,
                r,
                x,
                y,
            })
        })
        .collect()
}

pub fn print_cycles<W: Write>(out: &mut W, cycles: &[CycleRecord], degenerate: bool) -> std::io::Result<()> {
    if degenerate {
        return writeln!(out, "return map is the identity on the scanned range (period annulus)");
    }
    writeln!(out, "{} limit cycle(s)", cycles.len())?;
    for c in cycles {
        writeln!(
            out,
            "rho* = {:.15}  multiplier = {:.6e}  {:?}  direction {:+}  surrounds {}  residual {:.1e}",
            c.rho_star, c.multiplier, c.stability, c.direction, c.surrounded_equilibria, c.residual
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransversalityOutput {
    pub params: SystemParams,
    pub polygonal: bool,
    pub reports: Vec<TransversalityReport>,
    /// Every segment uniform and all crossed in the same sense.
    pub certified: bool,
}

/// Checks the given segments, or builds the no-contact polygonal when none are given.
pub fn transversality(params: &SystemParams, segments: &[[f64; 4]]) -> Result<TransversalityOutput, CliError> {
    if segments.is_empty() {
        let p = build_polygonal(params)?;
        return Ok(TransversalityOutput { params: *params, polygonal: true, reports: p.reports, certified: true });
    }
    let reports: Vec<TransversalityReport> = segments
        .iter()
        .map(|s| Segment::between((s[0], s[1]), (s[2], s[3])).map(|seg| verify_transversality(params, &seg)))
        .collect::<Result<_, _>>()?;
    let mut signs = reports.iter().map(|r| r.sign).filter(|s| *s != TransversalSign::Vacuous);
    let first = signs.next();
    let certified =
        reports.iter().all(|r| r.is_uniform()) && first.is_none_or(|f| signs.all(|s| s == f));
    Ok(TransversalityOutput { params: *params, polygonal: false, reports, certified })
}

pub fn print_transversality<W: Write>(out: &mut W, t: &TransversalityOutput) -> std::io::Result<()> {
    for (i, r) in t.reports.iter().enumerate() {
        let ((x0, y0), (x1, y1)) = r.segment.endpoints();
        let roots: Vec<String> = r.roots.iter().map(|x| format!("{:.6}", x.x)).collect();
        writeln!(
            out,
            "segment {i}: ({x0:.6}, {y0:.6}) -> ({x1:.6}, {y1:.6})  {:?}  margin {:.3e}  roots [{}]",
            r.sign,
            r.margin,
            roots.join(", ")
        )?;
    }
    writeln!(out, "{}", if t.certified { "certified" } else { "not certified" })
}

pub fn parse_segment(s: &str) -> Result<[f64; 4], String> {
    let v: Vec<f64> = s.split(',').map(|p| p.trim().parse::<f64>().map_err(|e| format!("{e}"))).collect::<Result<_, _>>()?;
    v.try_into().map_err(|_| format!("expected x0,y0,x1,y1, got {s:?}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segments_parse() {
        assert_eq!(parse_segment("0,0,1,-1").unwrap(), [0.0, 0.0, 1.0, -1.0]);
        assert!(parse_segment("0,0,1").is_err());
    }

    #[test]
    fn diagonal_segment_is_certified() {
        let p = SystemParams::new(3.2515054, -1.0, -0.5, 1.2).unwrap();
        let t = transversality(&p, &[[0.0, 0.0, 1.0, 1.0]]).unwrap();
        assert!(t.certified);
        assert_eq!(t.reports[0].sign, TransversalSign::AlwaysNegative);
    }

    #[test]
    fn equilibria_rows_at_sigma_plus() {
        let s = sigma(-1.0, -0.5, 1.2, None).unwrap();
        let p = SystemParams::new(s.thresholds.sigma_a_plus, -1.0, -0.5, 1.2).unwrap();
        let rows = equilibria(&p, 1e-9).unwrap();
        assert_eq!(rows.len(), 7);
        assert_eq!(rows.iter().filter(|r| r.kind == EquilibriumKind::SaddleNode).count(), 6);
    }
}
