//! Acceptance suite: one line per criterion, exit status 1 if any fails.
//!
//! Tolerances are fixed here; a failing criterion is reported as such.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spslab::{execute, Outcome, ScenarioConfig, ScenarioReport};
use spslab_core::coulomb::{coulomb_bilinear_radial, coulomb_energy_3d, coulomb_energy_radial};
use spslab_core::energy::{
    dilate, eval_i, limit_epsilon, m_functional, residual, scale_to_limit, EnergyField, Params,
};
use spslab_core::grid::{sample_radial, BoxGrid, Field3D, RadialField, RadialGrid};
use spslab_core::inequalities::sequence_inequality_check;
use spslab_core::minimize::{init, minimize_radial, SolverConfig};

type Check = (bool, String);

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn scenario(json: &str) -> ScenarioReport {
    let cfg: ScenarioConfig = serde_json::from_str(json).expect("valid config");
    execute(&cfg).expect("scenario runs")
}

fn verdicts(report: &ScenarioReport, names: &[&str]) -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in names {
        match report.verdict(name) {
            Some(v) => {
                ok &= v.outcome == Outcome::Pass;
                parts.push(format!("{name}: {:?} ({})", v.outcome, v.detail));
            }
            None => {
                ok = false;
                parts.push(format!("{name}: missing"));
            }
        }
    }
    (ok, parts.join("; "))
}

fn indicator(r: f64) -> f64 {
    if (r - 1.0).abs() < 1e-12 {
        0.5f64.sqrt()
    } else if r < 1.0 {
        1.0
    } else {
        0.0
    }
}

fn c1_coulomb_oracle() -> Check {
    let exact = 32.0 * PI * PI / 15.0;
    let t = Instant::now();
    let u = sample_radial(indicator, RadialGrid::new(2049, 8.0).unwrap()).unwrap();
    let d1 = coulomb_energy_radial(&u).energy;
    let t1 = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let g = BoxGrid::new(96, 4.0).unwrap();
    let u3 = Field3D::sample_radial(g, None, [0.0; 3], indicator).unwrap();
    let d3 = coulomb_energy_3d(&u3).unwrap().energy;
    let t3 = t.elapsed().as_secs_f64();
    let (e1, e3) = (rel(d1, exact), rel(d3, exact));
    (
        e1 <= 0.01 && t1 < 1.0 && e3 <= 0.03 && t3 < 60.0,
        format!("radial error {e1:.2e} in {t1:.3}s; box n=96 error {e3:.2e} in {t3:.1}s"),
    )
}

fn caps(rng: &mut ChaCha8Rng) -> Vec<(f64, f64, f64)> {
    (0..rng.gen_range(1..4))
        .map(|_| (rng.gen_range(-3.0..3.0), rng.gen_range(0.0..6.0), rng.gen_range(0.5..4.0)))
        .collect()
}

fn cap_field(c: &[(f64, f64, f64)], g: RadialGrid) -> RadialField {
    sample_radial(
        |r| {
            c.iter()
                .map(|&(a, m, w)| {
                    let x = (r - m) / w;
                    if x.abs() < 1.0 {
                        a * (0.5 * PI * x).cos().powi(2)
                    } else {
                        0.0
                    }
                })
                .sum()
        },
        g,
    )
    .unwrap()
}

fn c2_prefix_vs_double_loop() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let g = RadialGrid::new(513, 12.0).unwrap();
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < 20 {
        let u = cap_field(&caps(&mut rng), g);
        if u.is_zero() {
            continue;
        }
        let mut s = 0.0;
        for i in 0..g.n() {
            let ri = g.node(i);
            let wi = g.trapezoid_weight(i) * u.values()[i].powi(2);
            for j in 0..g.n() {
                let rj = g.node(j);
                s += wi * g.trapezoid_weight(j) * u.values()[j].powi(2) * ri * rj * ri.min(rj);
            }
        }
        worst = worst.max(rel(coulomb_energy_radial(&u).energy, 16.0 * PI * PI * s));
        done += 1;
    }
    (worst <= 1e-10, format!("largest relative gap over 20 profiles: {worst:.2e}"))
}

fn c3_scaling() -> Check {
    let g = RadialGrid::new(4097, 16.0).unwrap();
    let profile = |r: f64| (1.0 + 0.5 * r * r) * (-r * r / 2.0).exp();
    let u = sample_radial(profile, g).unwrap();
    let mut worst: f64 = 0.0;
    for p in [2.6, 2.8] {
        let lp = |f: &RadialField| -p * eval_i(f, &Params::new(p, 0.0, 0.0).unwrap()).unwrap().power;
        for lam in [0.1, 10.0] {
            // v(x) = λ²u(λx), sampled from the closed form on the stretched grid.
            let gv = g.scaled(1.0 / lam).unwrap();
            let v = sample_radial(|r| lam * lam * profile(lam * r), gv).unwrap();
            let via_core = dilate(&u, lam).unwrap();
            worst = worst.max(rel(
                m_functional(&v).unwrap(),
                lam.powi(3) * m_functional(&u).unwrap(),
            ));
            worst = worst.max(rel(lp(&v), lam.powf(2.0 * p - 3.0) * lp(&u)));
            worst = worst.max(rel(m_functional(&via_core).unwrap(), m_functional(&v).unwrap()));

            let eps = limit_epsilon(lam, p).unwrap();
            let s = eps.powf(2.0 / (p - 2.0));
            let w = sample_radial(|r| s * profile(eps * r), g.scaled(1.0 / eps).unwrap()).unwrap();
            let (w_core, _) = scale_to_limit(&u, lam, p).unwrap();
            let j = eval_i(&w, &Params::rescaled(p, eps).unwrap()).unwrap().total;
            let i = eval_i(&u, &Params::new(p, lam, 1.0).unwrap()).unwrap().total;
            worst = worst.max(rel(j, eps.powf((6.0 - p) / (p - 2.0)) * i));
            worst = worst.max(rel(
                eval_i(&w_core, &Params::rescaled(p, eps).unwrap()).unwrap().total,
                j,
            ));
        }
    }
    (worst <= 1e-6, format!("largest relative deviation {worst:.2e}"))
}

fn fd_error<F: EnergyField>(u: &F, params: &Params, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let free = u.free_nodes();
    let res = residual(u, params).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let mut dir = u.clone();
        for (v, &f) in dir.values_mut().iter_mut().zip(&free) {
            *v = if f { rng.gen_range(-1.0..1.0) } else { 0.0 };
        }
        let analytic = u.inner(res.values(), dir.values());
        let t = 1e-4;
        let shift = |s: f64| {
            let mut w = u.clone();
            for (a, d) in w.values_mut().iter_mut().zip(dir.values()) {
                *a += s * d;
            }
            eval_i(&w, params).unwrap().total
        };
        worst = worst.max(rel((shift(t) - shift(-t)) / (2.0 * t), analytic));
    }
    worst
}

fn c4_gradient() -> Check {
    let u = sample_radial(
        |r| (1.0 + 0.3 * r) * (-r * r / 3.0).exp(),
        RadialGrid::new(201, 10.0).unwrap(),
    )
    .unwrap()
    .dirichlet();
    let er = fd_error(&u, &Params::new(2.8, 0.7, 1.0).unwrap(), 4);
    let g = BoxGrid::new(16, 4.0).unwrap();
    let u3 = Field3D::sample(g, Some(3.5), |x| {
        (-(x[0] - 0.4).powi(2) - x[1] * x[1] - 0.5 * x[2] * x[2]).exp()
    })
    .unwrap();
    let e3 = fd_error(&u3, &Params::new(2.6, 0.9, 0.5).unwrap(), 5);
    (
        er <= 1e-5 && e3 <= 1e-5,
        format!("worst relative error over 20 directions: radial {er:.2e}, box {e3:.2e}"),
    )
}

fn c10_j_minimization() -> Check {
    let p = 2.8;
    let params = Params::zero_mass(p).unwrap();
    let cfg = SolverConfig::radial();
    let mut runs = Vec::new();
    for (n, r_max) in [(4097, 3000.0), (8193, 3000.0), (8193, 6000.0)] {
        let g = RadialGrid::new(n, r_max).unwrap();
        let u0 = init::gaussian_radial(g, 1e-5, 300.0).unwrap();
        runs.push(minimize_radial(&params, &u0, &cfg).unwrap());
    }
    let base = &runs[0];
    let ok_base = base.converged && base.breakdown.total < 0.0 && base.relative_residual <= 1e-6;
    let drift = runs[1..]
        .iter()
        .map(|r| rel(r.breakdown.total, base.breakdown.total))
        .fold(0.0, f64::max);
    let all_conv = runs.iter().all(|r| r.converged);
    (
        ok_base && all_conv && drift <= 0.01,
        format!(
            "J = {:.6e}, residual {:.2e}, {:?}; refined energies {:.6e}, {:.6e} (drift {drift:.2e})",
            base.breakdown.total,
            base.relative_residual,
            base.status,
            runs[1].breakdown.total,
            runs[2].breakdown.total
        ),
    )
}

fn c12_symmetry_breaking() -> Check {
    let report = scenario(r#"{"scenario": "ball-symmetry"}"#);
    let (ok, detail) = verdicts(&report, &["symmetry-broken"]);
    let slowest = report
        .rows
        .iter()
        .zip(&report.runtimes)
        .filter(|(r, _)| r["kind"] == "box" && r["n"] == 64)
        .map(|(_, t)| *t)
        .fold(0.0, f64::max);
    (
        ok && slowest < 1800.0,
        format!("{detail}; slowest n=64 run {slowest:.0}s"),
    )
}

fn c13_inequalities() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let g = RadialGrid::new(257, 12.0).unwrap();
    let g_fine = RadialGrid::new(1025, 12.0).unwrap();
    let d = |u: &RadialField| coulomb_energy_radial(u).energy;
    let combine = |u: &RadialField, v: &RadialField, s: f64, t: f64| {
        RadialField::new(
            *u.grid(),
            u.values().iter().zip(v.values()).map(|(x, y)| s * x + t * y).collect(),
        )
        .unwrap()
    };
    let mut failures = [0usize; 5];
    let cases = 200;
    for _ in 0..cases {
        let (u, v) = (cap_field(&caps(&mut rng), g), cap_field(&caps(&mut rng), g));
        let (f, h) = (u.map(|x| x * x), v.map(|x| x * x));
        let fg = coulomb_bilinear_radial(&f, &h).unwrap();
        let ff = coulomb_bilinear_radial(&f, &f).unwrap();
        let hh = coulomb_bilinear_radial(&h, &h).unwrap();
        if fg * fg > ff * hh * (1.0 + 1e-12) {
            failures[0] += 1;
        }
        let q = |w: &RadialField| d(w).powf(0.25);
        if q(&combine(&u, &v, 1.0, 1.0)) > q(&u) + q(&v) + 1e-10 {
            failures[1] += 1;
        }
        let lhs = d(&combine(&u, &v, 0.5, 0.5)) + d(&combine(&u, &v, 0.5, -0.5));
        if lhs > 0.5 * (d(&u) + d(&v)) * (1.0 + 1e-12) {
            failures[2] += 1;
        }
        let len = rng.gen_range(1..60);
        let a: Vec<f64> = (0..len).map(|_| rng.gen_range(0.0..10.0)).collect();
        let b: Vec<f64> = (0..len).map(|n| (1.0 + n as f64).powf(1.2)).collect();
        if !sequence_inequality_check(&a, &b).unwrap().holds() {
            failures[3] += 1;
        }
        // ∫|u|³ ≤ ½∫|∇u|² + D(u²,u²)/(8π)
        let w = cap_field(&caps(&mut rng), g_fine);
        let e = eval_i(&w, &Params::new(3.0, 1.0, 0.0).unwrap()).unwrap();
        if -3.0 * e.power > e.kinetic + 4.0 * e.coulomb / (8.0 * PI) {
            failures[4] += 1;
        }
    }
    let dyadic = scenario(r#"{"scenario": "dyadic-lemma", "alpha": [0.6]}"#);
    let (dy_ok, dy) = verdicts(&dyadic, &["dyadic-floor-alpha0.6"]);
    (
        failures.iter().all(|&f| f == 0) && dy_ok,
        format!(
            "{cases} instances each; failures [CS, quarter-power, parallelogram, sequence, cubic] = {failures:?}; {dy}"
        ),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Check);
    let criteria: [Criterion; 14] = [
        ("1 Coulomb oracle", c1_coulomb_oracle),
        ("2 prefix sum vs double loop", c2_prefix_vs_double_loop),
        ("3 scaling identities", c3_scaling),
        ("4 gradient check", c4_gradient),
        ("5 tent sweep", || {
            verdicts(
                &scenario(r#"{"scenario": "tent-sweep", "eps": [0.2, 0.1, 0.05, 0.01], "p": [2.5]}"#),
                &["tent-bounds", "tent-slope-p2.5"],
            )
        }),
        ("6 bump sums", || {
            verdicts(
                &scenario(r#"{"scenario": "bump-sweep", "N": [1, 2, 4, 8, 16]}"#),
                &["linear-terms", "cross-term-bound", "affine-upper-bound"],
            )
        }),
        ("7 dilated bump sums", || {
            verdicts(
                &scenario(r#"{"scenario": "dilated-bump-sweep", "p": [2.5, 2.9]}"#),
                &[
                    "kinetic-constant-p2.5",
                    "lp-growth-exponent-p2.5",
                    "kinetic-constant-p2.9",
                    "lp-growth-exponent-p2.9",
                ],
            )
        }),
        ("8 positivity bound", || {
            verdicts(
                &scenario(r#"{"scenario": "lambda-positivity", "lambda": [0.2], "restarts": 50}"#),
                &["no-negative-energy-lambda0.2"],
            )
        }),
        ("9 threshold bracket", || {
            let t = Instant::now();
            let (ok, detail) = verdicts(
                &scenario(r#"{"scenario": "threshold-lambda0", "p": [2.8]}"#),
                &["bracket", "bracket-width"],
            );
            let secs = t.elapsed().as_secs_f64();
            (ok && secs < 300.0, format!("{detail}; {secs:.1}s"))
        }),
        ("10 J-minimization", c10_j_minimization),
        ("11 rescaled convergence", || {
            verdicts(
                &scenario(r#"{"scenario": "sweep-lambda", "p": [2.8], "lambda": [1e-2, 1e-3, 1e-4]}"#),
                &["all-converged-p2.8", "distance-monotone-p2.8"],
            )
        }),
        ("12 symmetry breaking", c12_symmetry_breaking),
        ("13 inequality suite", c13_inequalities),
        ("14 lower-bound sweep", || {
            verdicts(
                &scenario(r#"{"scenario": "lower-bound-sweep", "alpha": [0.6, 0.1]}"#),
                &["probe-infimum-positive-alpha0.6", "counterexample-divergence-alpha0.1"],
            )
        }),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        let t = Instant::now();
        let (ok, detail) = check();
        println!(
            "criterion {name}: {} [{:.1}s] {detail}",
            if ok { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
        if !ok {
            failed.push(name);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 14 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} failing: {}", failed.len(), failed.join(", "));
        ExitCode::FAILURE
    }
}
