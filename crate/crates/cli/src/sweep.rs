//! Parameter-plane sweeps and figure data.

use std::fmt;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use z6_core::abel::{b_sign_change_interval, region_report, sigma_thresholds, Certificate};
use z6_core::dynamics::scan_cycles_with;
use z6_core::equilibria::{quadratic_form_with_tol, solve_equilibria_with_tol, Sign};
use z6_core::stability::{infinity_report, origin_report, InfinityStability, OriginStability};
use z6_core::SystemParams;

use crate::error::CliError;
use crate::params::{default_rho_max, TolArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamName {
    P1,
    P2,
    S1,
    S2,
}

impl ParamName {
    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for ParamName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["p1", "p2", "s1", "s2"][self.index()])
    }
}

impl FromStr for ParamName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "p1" => Ok(ParamName::P1),
            "p2" => Ok(ParamName::P2),
            "s1" => Ok(ParamName::S1),
            "s2" => Ok(ParamName::S2),
            _ => Err(format!("unknown parameter {s:?}")),
        }
    }
}

/// `name=lo:hi:n`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub name: ParamName,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Axis {
    pub fn value(&self, i: usize) -> f64 {
        self.lo + (self.hi - self.lo) * i as f64 / (self.n - 1) as f64
    }
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, range) = s.split_once('=').ok_or_else(|| format!("expected name=lo:hi:n, got {s:?}"))?;
        let parts: Vec<&str> = range.split(':').collect();
        let [lo, hi, n] = parts.as_slice() else {
            return Err(format!("expected name=lo:hi:n, got {s:?}"));
        };
        let axis = Axis {
            name: name.trim().parse()?,
            lo: lo.trim().parse().map_err(|e| format!("{e}"))?,
            hi: hi.trim().parse().map_err(|e| format!("{e}"))?,
            n: n.trim().parse().map_err(|e| format!("{e}"))?,
        };
        if axis.n < 2 {
            return Err(format!("resolution must be at least 2, got {}", axis.n));
        }
        if !(axis.lo.is_finite() && axis.hi.is_finite()) {
            return Err("range ends must be finite".into());
        }
        Ok(axis)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    /// Sigma curves over (s1, p1) at fixed (p2, s2)
    #[value(name = "1")]
    Thresholds,
    /// Sign regions of Q over (p1, p2) at fixed (s1, s2)
    #[value(name = "2")]
    Equilibria,
    /// p1-intervals where A or B keep sign at fixed (p2, s1, s2)
    #[value(name = "3")]
    Intervals,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub figure: Option<Figure>,
    /// First swept parameter, `name=lo:hi:n`
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<Axis>,
    /// Second swept parameter, `name=lo:hi:n`
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<Axis>,
    /// Fixed value when p1 is not an axis
    #[arg(long, allow_hyphen_values = true)]
    pub p1: Option<f64>,
    /// Fixed value when p2 is not an axis
    #[arg(long, allow_hyphen_values = true)]
    pub p2: Option<f64>,
    /// Fixed value when s1 is not an axis
    #[arg(long, allow_hyphen_values = true)]
    pub s1: Option<f64>,
    /// Fixed value when s2 is not an axis
    #[arg(long, allow_hyphen_values = true)]
    pub s2: Option<f64>,
    /// Also count limit cycles at every node (slow)
    #[arg(long)]
    pub cycles: bool,
    /// Radii per cycle scan
    #[arg(long, default_value_t = 120)]
    pub samples: usize,
    /// Worker threads; 0 uses every core
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

/// Fully resolved sweep: two distinct axes and the two fixed parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub x: Axis,
    pub y: Axis,
    /// Indexed by [`ParamName`]; the swept entries are ignored.
    pub fixed: [f64; 4],
    pub figure: Option<Figure>,
}

impl SweepSpec {
    pub fn from_args(args: &SweepArgs) -> Result<Self, CliError> {
        let given = [args.p1, args.p2, args.s1, args.s2];
        let (x, y, defaults) = match args.figure {
            Some(Figure::Thresholds) => (
                args.x.unwrap_or(Axis { name: ParamName::S1, lo: -3.0, hi: 3.0, n: 121 }),
                args.y.unwrap_or(Axis { name: ParamName::P1, lo: -3.0, hi: 3.0, n: 121 }),
                [0.0, 1.0, 0.0, 4.0],
            ),
            Some(Figure::Equilibria) => (
                args.x.unwrap_or(Axis { name: ParamName::P1, lo: -3.0, hi: 3.0, n: 121 }),
                args.y.unwrap_or(Axis { name: ParamName::P2, lo: -3.0, hi: 3.0, n: 121 }),
                [0.0, 0.0, 0.0, 2.0],
            ),
            Some(Figure::Intervals) => (
                // unused for this figure, kept so SweepSpec stays uniform
                Axis { name: ParamName::P1, lo: 0.0, hi: 1.0, n: 2 },
                Axis { name: ParamName::P2, lo: 0.0, hi: 1.0, n: 2 },
                [0.0, -1.0, -0.5, 1.2],
            ),
            None => (
                args.x.ok_or_else(|| CliError::Usage("--x is required without --figure".into()))?,
                args.y.ok_or_else(|| CliError::Usage("--y is required without --figure".into()))?,
                [f64::NAN; 4],
            ),
        };
        let expected = match args.figure {
            Some(Figure::Thresholds) => Some((ParamName::S1, ParamName::P1)),
            Some(Figure::Equilibria) => Some((ParamName::P1, ParamName::P2)),
            _ => None,
        };
        if let Some((ex, ey)) = expected {
            if (x.name, y.name) != (ex, ey) {
                return Err(CliError::Usage(format!("this figure sweeps --x {ex} and --y {ey}")));
            }
        }
        if x.name == y.name {
            return Err(CliError::Usage(format!("swept parameters must differ, both are {}", x.name)));
        }
        let swept = |i: usize| args.figure != Some(Figure::Intervals) && (x.name.index() == i || y.name.index() == i);
        let mut fixed = [0.0; 4];
        for i in 0..4 {
            let name = ["p1", "p2", "s1", "s2"][i];
            if swept(i) {
                if given[i].is_some() {
                    return Err(CliError::Usage(format!("--{name} is swept and cannot also be fixed")));
                }
                continue;
            }
            fixed[i] = match given[i].or((!defaults[i].is_nan()).then_some(defaults[i])) {
                Some(v) => v,
                None => return Err(CliError::Usage(format!("--{name} is required"))),
            };
        }
        Ok(SweepSpec { x, y, fixed, figure: args.figure })
    }

    pub fn len(&self) -> usize {
        self.x.n * self.y.n
    }

    /// Parameters of node `k`, row-major with `x` varying fastest.
    pub fn node(&self, k: usize) -> (usize, usize, [f64; 4]) {
        let (ix, iy) = (k % self.x.n, k / self.x.n);
        let mut v = self.fixed;
        v[self.x.name.index()] = self.x.value(ix);
        v[self.y.name.index()] = self.y.value(iy);
        (ix, iy, v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordKind {
    Node,
    QZeroCurve,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub record: RecordKind,
    pub ix: Option<usize>,
    pub iy: Option<usize>,
    pub p1: f64,
    pub p2: f64,
    pub s1: f64,
    pub s2: f64,
    pub q: Option<f64>,
    pub q_sign: Option<Sign>,
    pub equilibria: Option<usize>,
    pub sigma_a_minus: Option<f64>,
    pub sigma_a_plus: Option<f64>,
    pub sigma_b_minus: Option<f64>,
    pub sigma_b_plus: Option<f64>,
    pub in_a: Option<bool>,
    pub in_b: Option<bool>,
    pub certificate: Option<Certificate>,
    pub origin: Option<OriginStability>,
    pub infinity: Option<InfinityStability>,
    pub cycles: Option<usize>,
    pub error: Option<String>,
}

impl NodeRecord {
    fn blank(record: RecordKind, v: [f64; 4]) -> Self {
        NodeRecord {
            record,
            ix: None,
            iy: None,
            p1: v[0],
            p2: v[1],
            s1: v[2],
            s2: v[3],
            q: None,
            q_sign: None,
            equilibria: None,
            sigma_a_minus: None,
            sigma_a_plus: None,
            sigma_b_minus: None,
            sigma_b_plus: None,
            in_a: None,
            in_b: None,
            certificate: None,
            origin: None,
            infinity: None,
            cycles: None,
            error: None,
        }
    }
}

fn evaluate(v: [f64; 4], tol: &TolArgs, cycles: Option<usize>, rec: &mut NodeRecord) -> Result<(), CliError> {
    let params = SystemParams::new(v[0], v[1], v[2], v[3])?;
    let q = quadratic_form_with_tol(&params, tol.tol_q_zero);
    rec.q = Some(q.value);
    rec.q_sign = Some(q.sign);
    rec.infinity = Some(infinity_report(&params).stability);
    rec.origin = Some(origin_report(&params)?.stability);
    rec.equilibria = Some(solve_equilibria_with_tol(&params, tol.tol_q_zero)?.len());
    let report = region_report(&params)?;
    let t = report.thresholds;
    rec.sigma_a_minus = Some(t.sigma_a_minus);
    rec.sigma_a_plus = Some(t.sigma_a_plus);
    rec.sigma_b_minus = Some(t.sigma_b_minus);
    rec.sigma_b_plus = Some(t.sigma_b_plus);
    rec.in_a = Some(t.in_a_interval(params.p1));
    rec.in_b = Some(t.in_b_interval(params.p1));
    rec.certificate = Some(report.certificate);
    if let Some(n) = cycles {
        let scan = scan_cycles_with(&params, default_rho_max(&params)?, n, &tol.cycle_options())?;
        rec.cycles = Some(scan.cycles.len());
    }
    Ok(())
}

/// One record per node in grid order, then (figure 2) the `Q = 0` curve over the `p2` grid.
/// Nodes that fail keep the fields computed so far and carry the error message.
pub fn run_grid(spec: &SweepSpec, tol: &TolArgs, cycles: Option<usize>, jobs: usize) -> Result<Vec<NodeRecord>, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {jobs} workers: {e}")))?;
    let mut records: Vec<NodeRecord> = pool.install(|| {
        (0..spec.len())
            .into_par_iter()
            .map(|k| {
                let (ix, iy, v) = spec.node(k);
                let mut rec = NodeRecord::blank(RecordKind::Node, v);
                rec.ix = Some(ix);
                rec.iy = Some(iy);
                if let Err(e) = evaluate(v, tol, cycles, &mut rec) {
                    log::debug!("node ({ix}, {iy}) failed: {e}");
                    rec.error = Some(format!("{}: {e}", e.kind()));
                }
                rec
            })
            .collect()
    });
    if spec.figure == Some(Figure::Equilibria) {
        records.extend(q_zero_curve(spec));
    }
    Ok(records)
}

fn q_zero_curve(spec: &SweepSpec) -> Vec<NodeRecord> {
    let mut out = Vec::new();
    for iy in 0..spec.y.n {
        let (_, _, v) = spec.node(iy * spec.x.n);
        if v[1] == 0.0 {
            continue;
        }
        let Ok(t) = SystemParams::new(0.0, v[1], v[2], v[3]).and_then(|p| sigma_thresholds(&p)) else {
            continue;
        };
        for p1 in [t.sigma_a_minus, t.sigma_a_plus] {
            let mut rec = NodeRecord::blank(RecordKind::QZeroCurve, [p1, v[1], v[2], v[3]]);
            rec.iy = Some(iy);
            rec.q = Some(0.0);
            rec.q_sign = Some(Sign::Zero);
            out.push(rec);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalRecord {
    pub set: String,
    /// `None` for an unbounded end.
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub p2: f64,
    pub s1: f64,
    pub s2: f64,
}

/// The `p1`-intervals of figure 3 at fixed `(p2, s1, s2)`.
pub fn intervals(p2: f64, s1: f64, s2: f64) -> Result<Vec<IntervalRecord>, CliError> {
    let params = SystemParams::new(0.0, p2, s1, s2)?;
    let t = sigma_thresholds(&params)?;
    let (b_lo, b_hi) = b_sign_change_interval(&params)?;
    let rec = |set: &str, lo: Option<f64>, hi: Option<f64>| IntervalRecord { set: set.into(), lo, hi, p2, s1, s2 };
    let mut out = vec![
        rec("a_keeps_sign", None, Some(t.sigma_a_minus)),
        rec("a_keeps_sign", Some(t.sigma_a_plus), None),
        rec("b_keeps_sign", None, Some(b_lo)),
        rec("b_keeps_sign", Some(b_hi), None),
    ];
    if p2 * s2 < 0.0 {
        out.push(rec("thirteen_equilibria", Some(t.sigma_a_minus), Some(t.sigma_a_plus)));
    }
    // the certificate fails only where p1 is inside both threshold intervals
    let lo = t.sigma_a_minus.max(t.sigma_b_minus);
    let hi = t.sigma_a_plus.min(t.sigma_b_plus);
    if lo < hi {
        out.push(rec("at_most_one_cycle", None, Some(lo)));
        out.push(rec("at_most_one_cycle", Some(hi), None));
    } else {
        out.push(rec("at_most_one_cycle", None, None));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> TolArgs {
        TolArgs { tol_integrate: 1e-10, tol_fixed_point: 1e-10, tol_q_zero: 1e-9 }
    }

    fn args(figure: Option<Figure>) -> SweepArgs {
        SweepArgs {
            figure,
            x: None,
            y: None,
            p1: None,
            p2: None,
            s1: None,
            s2: None,
            cycles: false,
            samples: 120,
            jobs: 1,
        }
    }

    #[test]
    fn axis_parsing() {
        let a: Axis = "p1=-1:2:4".parse().unwrap();
        assert_eq!(a, Axis { name: ParamName::P1, lo: -1.0, hi: 2.0, n: 4 });
        assert_eq!(a.value(3), 2.0);
        assert!("p1=0:1:1".parse::<Axis>().is_err());
        assert!("q=0:1:3".parse::<Axis>().is_err());
        assert!("p1=0:1".parse::<Axis>().is_err());
    }

    #[test]
    fn spec_validation() {
        let mut a = args(None);
        a.x = Some("p1=0:1:2".parse().unwrap());
        a.y = Some("p1=0:1:2".parse().unwrap());
        assert!(SweepSpec::from_args(&a).is_err());
        a.y = Some("p2=0:1:2".parse().unwrap());
        a.s1 = Some(0.0);
        assert!(SweepSpec::from_args(&a).is_err(), "s2 missing");
        a.s2 = Some(2.0);
        let spec = SweepSpec::from_args(&a).unwrap();
        assert_eq!(spec.node(3), (1, 1, [1.0, 1.0, 0.0, 2.0]));
        a.p1 = Some(0.5);
        assert!(SweepSpec::from_args(&a).is_err(), "p1 both swept and fixed");
    }

    #[test]
    fn two_by_two_grid_classifies_every_node() {
        let mut a = args(None);
        a.x = Some("p1=-1:1:2".parse().unwrap());
        a.y = Some("p2=-1:-0.5:2".parse().unwrap());
        a.s1 = Some(0.0);
        a.s2 = Some(2.0);
        let spec = SweepSpec::from_args(&a).unwrap();
        let recs = run_grid(&spec, &tol(), None, 2).unwrap();
        assert_eq!(recs.len(), 4);
        for r in &recs {
            assert!(r.error.is_none(), "{r:?}");
            assert!(matches!(r.equilibria, Some(1 | 7 | 13)));
        }
    }

    #[test]
    fn figure2_regions() {
        let mut a = args(Some(Figure::Equilibria));
        a.x = Some("p1=-1:1:5".parse().unwrap());
        a.y = Some("p2=-1:1:5".parse().unwrap());
        let spec = SweepSpec::from_args(&a).unwrap();
        let recs = run_grid(&spec, &tol(), None, 0).unwrap();
        let nodes: Vec<&NodeRecord> = recs.iter().filter(|r| r.record == RecordKind::Node).collect();
        assert_eq!(nodes.len(), 25);
        // s1 = 0, s2 = 2: Q = p2^2 - 3 p1^2, so the p1 axis is never in the 13 region
        // while the negative p2 axis is
        for r in &nodes {
            let thirteen = r.p2 < 0.0 && r.p2 * r.p2 > 3.0 * r.p1 * r.p1;
            assert_eq!(r.equilibria == Some(13), thirteen, "{r:?}");
        }
        assert!(nodes.iter().any(|r| r.p1 == 0.0 && r.equilibria == Some(13)));
        // p2 = 0 breaks the rotation requirement and is tagged, not dropped
        assert!(nodes.iter().filter(|r| r.p2 == 0.0).all(|r| r.error.is_some()));
        let curve: Vec<&NodeRecord> = recs.iter().filter(|r| r.record == RecordKind::QZeroCurve).collect();
        assert_eq!(curve.len(), 8);
        for r in curve {
            assert!((r.p2 * r.p2 - 3.0 * r.p1 * r.p1).abs() < 1e-12);
        }
    }

    #[test]
    fn figure1_sigma_plus_is_monotone_in_s1() {
        let mut a = args(Some(Figure::Thresholds));
        a.x = Some("s1=-2:2:41".parse().unwrap());
        a.y = Some("p1=0:1:2".parse().unwrap());
        let spec = SweepSpec::from_args(&a).unwrap();
        let recs = run_grid(&spec, &tol(), None, 0).unwrap();
        let row: Vec<f64> = recs.iter().filter(|r| r.iy == Some(0)).map(|r| r.sigma_a_plus.unwrap()).collect();
        assert_eq!(row.len(), 41);
        let increasing = row.windows(2).all(|w| w[1] >= w[0]);
        let decreasing = row.windows(2).all(|w| w[1] <= w[0]);
        assert!(increasing || decreasing, "{row:?}");
    }

    #[test]
    fn figure3_intervals_at_the_example() {
        let recs = intervals(-1.0, -0.5, 1.2).unwrap();
        let thirteen = recs.iter().find(|r| r.set == "thirteen_equilibria").unwrap();
        assert!((thirteen.lo.unwrap() + 0.52423).abs() < 1e-4);
        assert!((thirteen.hi.unwrap() - 3.25151).abs() < 1e-4);
        assert_eq!(recs.iter().filter(|r| r.set == "b_keeps_sign").count(), 2);
    }

    #[test]
    fn sweep_is_independent_of_worker_count() {
        let mut a = args(None);
        a.x = Some("p1=-2:3:7".parse().unwrap());
        a.y = Some("s1=-1:1:5".parse().unwrap());
        a.p2 = Some(-1.0);
        a.s2 = Some(1.5);
        let spec = SweepSpec::from_args(&a).unwrap();
        assert_eq!(run_grid(&spec, &tol(), None, 1).unwrap(), run_grid(&spec, &tol(), None, 4).unwrap());
    }
}
