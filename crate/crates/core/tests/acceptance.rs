use std::f64::consts::{PI, TAU};
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use z6_core::abel::{cherkas_forward, region_report, sigma_thresholds, Certificate};
use z6_core::dynamics::{integrate_abel, integrate_polar, return_map, scan_cycles, CycleStability};
use z6_core::equilibria::{brute_force_equilibria, hyperbolic_direction, quadratic_form, solve_equilibria, Equilibrium, Sign};
use z6_core::geometry::{real_roots, restricted_scalar_product, Poly};
use z6_core::model::{divergence, equivariance_defect, CartesianState, PolarState, SystemParams};
use z6_core::stability::{infinity_integrand, infinity_report};

const P2: f64 = -1.0;
const S1: f64 = -0.5;
const S2: f64 = 1.2;

const PRINTED_QUINTIC: [f64; 6] = [
    -2.39191647949065,
    2.34410741916533,
    4.86235167862649,
    -2.71272659052423,
    -2.33924612305747,
    -0.92289951077311,
];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn example(p1: f64) -> SystemParams {
    SystemParams::new(p1, P2, S1, S2).unwrap()
}

fn sigma_plus() -> f64 {
    sigma_thresholds(&example(0.0)).unwrap().sigma_a_plus
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sym(rng: &mut StdRng, lo: f64, hi: f64) -> f64 {
    let v = rng.gen_range(lo..=hi);
    if rng.gen_bool(0.5) {
        -v
    } else {
        v
    }
}

fn random_regular(rng: &mut StdRng) -> SystemParams {
    let p1 = rng.gen_range(-4.0..=4.0);
    let p2 = sym(rng, 0.1, 3.0);
    let s1 = rng.gen_range(-2.0..=2.0);
    let s2 = sym(rng, 1.0501, 5.0);
    SystemParams::new(p1, p2, s1, s2).unwrap()
}

fn thresholds() -> Outcome {
    let s = sigma_thresholds(&example(0.0)).map_err(|e| e.to_string())?;
    let d_minus = (s.sigma_a_minus + 0.52423).abs();
    let d_plus = (s.sigma_a_plus - 3.25151).abs();
    check(
        d_minus < 1e-4 && d_plus < 1e-4,
        format!("sigma_a- = {:.6}, sigma_a+ = {:.6}", s.sigma_a_minus, s.sigma_a_plus),
    )
}

fn saddle_node() -> Outcome {
    let p = example(sigma_plus());
    let e = example_saddle_node(&p)?;
    let c = e.cartesian();
    let dist = (c.x - 1.358).hypot(c.y - 1.5);
    let v = hyperbolic_direction(&p, &e).ok_or("no hyperbolic direction")?;
    let w = (-0.8594f64, -0.5114f64);
    let cos = (v[0] * w.0 + v[1] * w.1).abs() / (v[0].hypot(v[1]) * w.0.hypot(w.1));
    let angle = cos.min(1.0).acos();
    check(
        dist < 5e-3 && angle < 1e-3,
        format!("({:.6}, {:.6}), distance {dist:.2e}, eigenvector angle {angle:.2e} rad", c.x, c.y),
    )
}

fn example_saddle_node(p: &SystemParams) -> Result<Equilibrium, String> {
    let eqs = solve_equilibria(p).map_err(|e| e.to_string())?;
    let target = (1.358, 1.5);
    let dist = |e: &Equilibrium| (e.cartesian().x - target.0).hypot(e.cartesian().y - target.1);
    eqs.into_iter()
        .filter(|e| !e.is_origin())
        .min_by(|a, b| dist(a).total_cmp(&dist(b)))
        .ok_or_else(|| "no non-origin equilibrium".to_string())
}

fn quintic() -> Outcome {
    let p = example(sigma_plus());
    // the printed coefficients carry the unrounded saddle-node, the rounded slope and the raw normal
    let z0 = example_saddle_node(&p)?.cartesian();
    let slope = 0.5114 / 0.8594;
    let poly = restricted_scalar_product(&p, (0.0, z0.y - slope * z0.x), (1.0, slope), (0.5114, -0.8594));
    let printed = Poly::from_descending(&PRINTED_QUINTIC);
    if poly.degree() != 5 {
        return Err(format!("degree {}", poly.degree()));
    }
    let rel = (0..=5)
        .map(|k| (poly.coeffs[k] - printed.coeffs[k]).abs() / printed.coeffs[k].abs())
        .fold(0.0, f64::max);
    let crossings: Vec<f64> = real_roots(&poly).iter().filter(|r| r.sign_change).map(|r| r.x).collect();
    let root_ok = crossings.len() == 1 && (crossings[0] + 1.1737).abs() < 1e-3;
    check(rel < 1e-6 && root_ok, format!("max relative coefficient error {rel:.2e}, sign-changing roots {crossings:?}"))
}

fn count_law() -> Outcome {
    let mut rng = StdRng::seed_from_u64(4);
    let mut by_count = [0usize; 3];
    for i in 0..70 {
        let mut p = random_regular(&mut rng);
        if i >= 60 {
            // boundary draws: p1 on a threshold, where saddle-nodes appear
            p.s2 = -p.p2.signum() * p.s2.abs();
            let s = sigma_thresholds(&p).map_err(|e| e.to_string())?;
            p.p1 = if i % 2 == 0 { s.sigma_a_plus } else { s.sigma_a_minus };
        }
        let expected = match (p.s2 * p.p2 < 0.0, quadratic_form(&p).sign) {
            (false, _) | (true, Sign::Negative) => 1,
            (true, Sign::Zero) => 7,
            (true, Sign::Positive) => 13,
        };
        let closed = solve_equilibria(&p).map_err(|e| e.to_string())?.len();
        let brute = brute_force_equilibria(&p, 400).map_err(|e| e.to_string())?.len() + 1;
        if closed != expected || brute != expected {
            return Err(format!("{p:?}: law {expected}, closed form {closed}, grid {brute}"));
        }
        by_count[usize::from(expected > 1) + usize::from(expected > 7)] += 1;
    }
    check(true, format!("70 draws agree ({} x1, {} x7, {} x13)", by_count[0], by_count[1], by_count[2]))
}

fn equivariance_and_divergence() -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let p = SystemParams::new(
            rng.gen_range(-5.0..=5.0),
            rng.gen_range(-5.0..=5.0),
            rng.gen_range(-5.0..=5.0),
            rng.gen_range(-5.0..=5.0),
        )
        .unwrap();
        let z = Complex64::from_polar(rng.gen_range(0.0..=3.0), rng.gen_range(0.0..TAU));
        let k = rng.gen_range(1..6);
        let ratio = equivariance_defect(&p, z, k) / (1e-12 * (1.0 + z.norm().powi(5)));
        worst = worst.max(ratio);
        if ratio >= 1.0 {
            return Err(format!("defect ratio {ratio:.3} at {p:?}, z = {z}"));
        }
    }
    for i in 0..100 {
        let hamiltonian = i % 2 == 0;
        let (p1, s1) = if hamiltonian {
            (0.0, 0.0)
        } else {
            match i % 3 {
                0 => (sym(&mut rng, 0.01, 3.0), 0.0),
                1 => (0.0, sym(&mut rng, 0.01, 3.0)),
                _ => (sym(&mut rng, 0.01, 3.0), sym(&mut rng, 0.01, 3.0)),
            }
        };
        let p = SystemParams::new(p1, rng.gen_range(-3.0..=3.0), s1, rng.gen_range(-3.0..=3.0)).unwrap();
        let max_div = (0..200)
            .map(|_| {
                let z = Complex64::from_polar(rng.gen_range(0.5..=2.0), rng.gen_range(0.0..TAU));
                divergence(&p, CartesianState::new(z.re, z.im)).abs()
            })
            .fold(0.0, f64::max);
        if (max_div < 1e-6) != hamiltonian {
            return Err(format!("{p:?}: max |div| = {max_div:.3e}"));
        }
    }
    check(true, format!("worst defect ratio {worst:.3}, divergence test on 100 draws"))
}

fn infinity_quadrature() -> Outcome {
    let mut rng = StdRng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let p = SystemParams::new(0.0, 1.0, rng.gen_range(-2.0..=2.0), sym(&mut rng, 1.0501, 5.0)).unwrap();
        // periodic analytic integrand: the trapezoid rule converges geometrically
        let n = 4000;
        let h = TAU / n as f64;
        let quad: f64 = (0..n).map(|i| infinity_integrand(&p, i as f64 * h)).sum::<f64>() * h;
        let closed = -p.s2.signum() * 4.0 * PI * p.s1 / (p.s2 * p.s2 - 1.0).sqrt();
        let report = infinity_report(&p).integral_value.ok_or("irregular infinity")?;
        let err = (quad - closed).abs().max((report - closed).abs());
        worst = worst.max(err);
        if err >= 1e-8 {
            return Err(format!("{p:?}: quadrature {quad}, closed form {closed}"));
        }
    }
    check(true, format!("worst deviation {worst:.2e} on 20 draws"))
}

fn abel_conjugacy() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut draws = 0;
    while draws < 10 {
        let p = SystemParams::new(
            rng.gen_range(-1.0..=1.0),
            sym(&mut rng, 0.5, 2.0),
            rng.gen_range(-1.0..=1.0),
            sym(&mut rng, 1.1, 3.0),
        )
        .unwrap();
        // stay well inside the curve theta' = 0 so the polar route exists for a full turn
        let r_theta = p.p2.abs() / (p.s2.abs() + 1.0);
        let r0 = rng.gen_range(0.05..=0.3) * r_theta;
        let x0 = cherkas_forward(&p, PolarState::new(r0, 0.0).unwrap()).map_err(|e| e.to_string())?;
        let abel = match integrate_abel(&p, x0, 1e-12) {
            Ok(t) => t,
            Err(_) => continue,
        };
        let mut state = PolarState::new(r0, 0.0).unwrap();
        for &(theta, x) in abel.samples.iter().skip(1) {
            let leg = integrate_polar(&p, state, theta - state.theta, 1e-12).map_err(|e| e.to_string())?;
            let (_, r) = leg.last();
            state = PolarState::new(r, theta).unwrap();
            let pushed = cherkas_forward(&p, state).map_err(|e| e.to_string())?;
            worst = worst.max((pushed - x).abs());
        }
        draws += 1;
    }
    check(worst < 1e-6, format!("sup deviation {worst:.2e} on 10 draws"))
}

fn cycle_counts() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (label, p1, expected) in [("3.3", 3.3, 1), ("sigma+", sigma_plus(), 7), ("3.2", 3.2, 13)] {
        let p = example(p1);
        let scan = scan_cycles(&p, 30.0, 120).map_err(|e| e.to_string())?;
        let boundary = expected == 7;
        let pass = match scan.cycles.as_slice() {
            [c] => {
                let hyperbolic = (c.multiplier - 1.0).abs() > 1e-4;
                let certified = region_report(&p).map(|r| r.certificate == Certificate::AtMostOneLC).unwrap_or(false);
                parts.push(format!(
                    "p1={label}: rho*={:.5}, multiplier {:.3e}, surrounds {}",
                    c.rho_star, c.multiplier, c.surrounded_equilibria
                ));
                let hyperbolic = hyperbolic && c.stability != CycleStability::NonHyperbolicWithinTolerance;
                c.surrounded_equilibria == expected && (hyperbolic || boundary && certified)
            }
            cs => {
                parts.push(format!("p1={label}: {} cycles", cs.len()));
                false
            }
        };
        ok &= pass;
    }
    check(ok, parts.join("; "))
}

fn certificate_soundness() -> Outcome {
    let mut rng = StdRng::seed_from_u64(9);
    let (mut certified, mut with_cycle, mut tried) = (0, 0, 0);
    while certified < 50 {
        tried += 1;
        if tried > 5000 {
            return Err(format!("only {certified} certified draws"));
        }
        let p = random_regular(&mut rng);
        let report = region_report(&p).map_err(|e| e.to_string())?;
        if report.certificate != Certificate::AtMostOneLC {
            continue;
        }
        certified += 1;
        let rho_max = 10.0 * (p.p1.abs() + p.p2.abs()) / (p.s2.abs() - 1.0);
        let scan = scan_cycles(&p, rho_max, 150).map_err(|e| e.to_string())?;
        if scan.cycles.len() >= 2 {
            let radii: Vec<f64> = scan.cycles.iter().map(|c| c.rho_star).collect();
            return Err(format!("{p:?}: cycles at {radii:?}"));
        }
        with_cycle += scan.cycles.len();
    }
    check(true, format!("{certified} certified draws, {with_cycle} with one cycle, none with two"))
}

fn center() -> Outcome {
    let mut worst = 0.0f64;
    for (p2, s2) in [(1.0, 2.0), (-1.5, -1.3)] {
        let p = SystemParams::new(0.0, p2, 0.0, s2).unwrap();
        for i in 0..10 {
            let rho = 0.01 * 1000f64.powf(i as f64 / 9.0);
            let s = return_map(&p, rho, 1e-12).map_err(|e| e.to_string())?;
            worst = worst.max((s.rho_out - rho).abs());
        }
    }
    check(worst < 1e-8, format!("max |Pi(rho) - rho| = {worst:.2e} over 10 radii in (0.01, 10), two centers"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("sigma thresholds", thresholds),
        ("saddle-node reproduction", saddle_node),
        ("quintic regression", quintic),
        ("equilibrium count law", count_law),
        ("equivariance and hamiltonian", equivariance_and_divergence),
        ("infinity stability identity", infinity_quadrature),
        ("abel conjugacy", abel_conjugacy),
        ("limit-cycle counts", cycle_counts),
        ("certificate soundness", certificate_soundness),
        ("center detection", center),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} [{secs:.1}s]: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name} [{secs:.1}s]: {detail}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}
