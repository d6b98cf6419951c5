use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use z6_core::dynamics::{scan_cycles_with, CycleStability, LimitCycle};
use z6_core::equilibria::{quadratic_form_with_tol, solve_equilibria_with_tol, Equilibrium, QuadraticFormValue};
use z6_core::{infinity_report, origin_report, region_report, InfinityReport, OriginReport, RegionReport, SystemParams};

use crate::error::CliError;
use crate::params::{ScanArgs, TolArgs};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriaSummary {
    /// Origin included.
    pub count: usize,
    pub by_kind: BTreeMap<String, usize>,
    pub quadratic_form: QuadraticFormValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleRecord {
    pub rho_star: f64,
    pub multiplier: f64,
    pub stability: CycleStability,
    pub hyperbolic: bool,
    pub direction: i8,
    pub surrounded_equilibria: usize,
    pub residual: f64,
}

impl From<&LimitCycle> for CycleRecord {
    fn from(c: &LimitCycle) -> Self {
        CycleRecord {
            rho_star: c.rho_star,
            multiplier: c.multiplier,
            stability: c.stability,
            hyperbolic: c.hyperbolic,
            direction: c.direction,
            surrounded_equilibria: c.surrounded_equilibria,
            residual: c.residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub rho_max: f64,
    pub samples: usize,
    pub degenerate: bool,
    /// Radii where the return map was unavailable.
    pub gaps: usize,
    pub cycles: Vec<CycleRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisRecord {
    pub params: SystemParams,
    pub region: RegionReport,
    pub origin: OriginReport,
    pub infinity: InfinityReport,
    pub equilibria: EquilibriaSummary,
    pub scan: Option<ScanSummary>,
    pub warnings: Vec<String>,
}

pub fn summarize(eqs: &[Equilibrium], q: QuadraticFormValue) -> EquilibriaSummary {
    let mut by_kind = BTreeMap::new();
    for e in eqs {
        *by_kind.entry(format!("{:?}", e.kind)).or_insert(0) += 1;
    }
    EquilibriaSummary { count: eqs.len(), by_kind, quadratic_form: q }
}

pub fn analyze(params: &SystemParams, tol: &TolArgs, scan: Option<&ScanArgs>) -> Result<AnalysisRecord, CliError> {
    params.require_regular()?;
    let origin = origin_report(params)?;
    let infinity = infinity_report(params);
    let mut region = region_report(params)?;
    let eqs = solve_equilibria_with_tol(params, tol.tol_q_zero)?;
    region.equilibria_count = eqs.len();
    let equilibria = summarize(&eqs, quadratic_form_with_tol(params, tol.tol_q_zero));
    let scan = match scan {
        Some(args) => {
            let rho_max = args.rho_max(params)?;
            let result = scan_cycles_with(params, rho_max, args.samples, &tol.cycle_options())?;
            Some(ScanSummary {
                rho_max,
                samples: args.samples,
                degenerate: result.degenerate,
                gaps: result.gaps.len(),
                cycles: result.cycles.iter().map(CycleRecord::from).collect(),
            })
        }
        None => None,
    };
    Ok(AnalysisRecord { params: *params, region, origin, infinity, equilibria, scan, warnings: params.boundary_warnings() })
}

pub fn print_text<W: Write>(out: &mut W, rec: &AnalysisRecord) -> std::io::Result<()> {
    let p = &rec.params;
    writeln!(out, "params       p1 = {}  p2 = {}  s1 = {}  s2 = {}", p.p1, p.p2, p.s1, p.s2)?;
    writeln!(out, "origin       {:?}  (v1 = {:.6e})", rec.origin.stability, rec.origin.v1)?;
    match rec.infinity.integral_value {
        Some(v) => writeln!(out, "infinity     {:?}  (integral = {v:.6e})", rec.infinity.stability)?,
        None => writeln!(out, "infinity     {:?}", rec.infinity.stability)?,
    }
    let kinds: Vec<String> = rec.equilibria.by_kind.iter().map(|(k, n)| format!("{n} {k}")).collect();
    writeln!(
        out,
        "equilibria   {}  [{}]  Q = {:.6e} ({:?})",
        rec.equilibria.count,
        kinds.join(", "),
        rec.equilibria.quadratic_form.value,
        rec.equilibria.quadratic_form.sign
    )?;
    let t = &rec.region.thresholds;
    writeln!(out, "sigma_a      ({:.10}, {:.10})", t.sigma_a_minus, t.sigma_a_plus)?;
    writeln!(out, "sigma_b      ({:.10}, {:.10})", t.sigma_b_minus, t.sigma_b_plus)?;
    writeln!(
        out,
        "certificate  {:?}  (condition i: {}, condition ii: {}, A keeps sign: {}, B keeps sign: {})",
        rec.region.certificate,
        rec.region.condition_i,
        rec.region.condition_ii,
        rec.region.a_keeps_sign,
        rec.region.b_keeps_sign
    )?;
    if let Some(scan) = &rec.scan {
        if scan.degenerate {
            writeln!(out, "cycles       degenerate: the return map is the identity on (0, {}]", scan.rho_max)?;
        } else {
            writeln!(out, "cycles       {} in (0, {:.6}] ({} gaps)", scan.cycles.len(), scan.rho_max, scan.gaps)?;
        }
        for c in &scan.cycles {
            writeln!(
                out,
                "  rho* = {:.12}  multiplier = {:.6e}  {:?}  surrounds {}",
                c.rho_star, c.multiplier, c.stability, c.surrounded_equilibria
            )?;
        }
    }
    for w in &rec.warnings {
        writeln!(out, "warning      {w}")?;
    }
    Ok(())
}
