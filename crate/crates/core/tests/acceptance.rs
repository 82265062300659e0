//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any failed.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use kac_core::boltzmann::{integrate_moments, MomentVector};
use kac_core::chaos::{chaos_metric_samples, compare_to_boltzmann};
use kac_core::entropy::{
    check_marginal_entropy_inequality, check_ou_contraction, check_thermostat_entropy_inequality, default_grid,
    entropy_decay_experiment, ou_apply, DensityGrid, DensityKind, JointDensity,
};
use kac_core::generator::{
    build_full, build_lk, direct_sum, kac_l4_eigenvector, second_gap, second_gap_limit, SectorBasis,
};
use kac_core::linalg::symmetric_eigen;
use kac_core::moments::kac_gap_lambda;
use kac_core::simulator::{fit_cooling_rate, run, uniform_grid, InitialCondition};
use kac_core::Params;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn grid_params() -> Vec<Params> {
    let mut out = Vec::new();
    for n in [2, 3, 5, 8] {
        for lambda in [0.2, 1.0, 5.0] {
            for mu in [0.5, 1.0, 2.0] {
                out.push(Params::new(n, lambda, mu, 1.0).unwrap());
            }
        }
    }
    out
}

fn spectral_gap_exactness() -> Outcome {
    let mut worst_value: f64 = 0.0;
    let mut worst_vec: f64 = 0.0;
    for p in grid_params() {
        let n = p.n_particles;
        let blocks = [
            build_full(&SectorBasis::symmetric(n, 1).unwrap(), &p).map_err(|e| e.to_string())?,
            build_full(&SectorBasis::symmetric(n, 2).unwrap(), &p).map_err(|e| e.to_string())?,
        ];
        let m = direct_sum(&blocks);
        let eig = symmetric_eigen(&m);
        worst_value = worst_value.max((eig.smallest() - 0.5 * p.mu).abs());
        // sum_i H_2(u_i) is the single L_2 orbit, the first coordinate
        let mut e = nalgebra::DVector::zeros(m.nrows());
        e[0] = 1.0;
        worst_vec = worst_vec.max((&m * &e - 0.5 * p.mu * &e).amax());
    }
    check(
        worst_value <= 1e-10 && worst_vec <= 1e-10,
        format!("max |eig - mu/2| = {worst_value:.1e}, max eigenvector residual = {worst_vec:.1e} over 36 points"),
    )
}

fn second_gap_routes() -> Outcome {
    let mut worst: f64 = 0.0;
    for p in grid_params() {
        let g = second_gap(&p).map_err(|e| e.to_string())?;
        worst = worst
            .max((g.matrix - g.quadratic).abs())
            .max((g.assembled - g.quadratic).abs());
    }
    let g = second_gap(&Params::new(3, 1.0, 1.0, 1.0).unwrap()).map_err(|e| e.to_string())?;
    let (b, c) = (2.875f64, 1.59375f64);
    let root = (b - (b * b - 4.0 * c).sqrt()) / 2.0;
    check(
        worst <= 1e-10 && (g.value - root).abs() <= 1e-10 && (root - 0.75).abs() < 1e-15,
        format!("max route spread {worst:.1e}; N=3 value {} vs oracle {root}", g.value),
    )
}

fn large_n_limit() -> Outcome {
    let mut report = Vec::new();
    let mut ok = true;
    for (lambda, mu) in [(0.2, 1.0), (1.0, 1.0), (5.0, 1.0), (1.0, 0.5), (1.0, 2.0)] {
        let limit = second_gap_limit(lambda, mu);
        let cs: Vec<f64> = [10usize, 100, 1000]
            .iter()
            .map(|&n| {
                let p = Params::new(n, lambda, mu, 1.0).unwrap();
                let g = second_gap(&p).unwrap().quadratic;
                n as f64 * (g - limit).abs()
            })
            .collect();
        let c = cs.iter().cloned().fold(0.0, f64::max);
        // N |gap - limit| must stay bounded, not grow along the ladder
        ok &= c.is_finite() && cs[2] <= 1.5 * cs[1] + 1e-9;
        report.push(format!("C(l={lambda},m={mu})={c:.3}"));
    }
    check(ok, report.join(" "))
}

fn kac_eigenfunction() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 3..=8 {
        let basis = SectorBasis::symmetric(n, 2).unwrap();
        let lk = build_lk(&basis).map_err(|e| e.to_string())?.entries;
        let e = kac_l4_eigenvector(n);
        let target = kac_gap_lambda(n).unwrap();
        let resid = (&lk * &e - target * &e).norm() / e.norm();
        let rayleigh = e.dot(&(&lk * &e)) / e.dot(&e);
        worst = worst.max(resid).max((rayleigh - target).abs());
    }
    check(worst <= 1e-10, format!("max residual {worst:.1e} for N = 3..8"))
}

fn newton_cooling() -> Outcome {
    let (n, beta, mu) = (100, 1.0, 1.0);
    let replicas = 10_000;
    let grid = uniform_grid(6.0 / mu, 7).unwrap();
    let eq = n as f64 / (2.0 * beta);
    let k0 = 2.0 * eq;
    let mut ok = true;
    let mut report = Vec::new();
    for (k, lambda) in [0.0, 1.0, 10.0].into_iter().enumerate() {
        let p = Params::new(n, lambda, mu, beta).unwrap();
        let init = InitialCondition::with_energy(k0, n).unwrap();
        let s = run(&p, init, replicas, &grid, 20_240_501 + k as u64).map_err(|e| e.to_string())?;
        let mut worst_z: f64 = 0.0;
        for (i, &t) in s.times.iter().enumerate() {
            let want = eq + (k0 - eq) * (-0.5 * mu * t).exp();
            worst_z = worst_z.max((s.kinetic_energy[i] - want).abs() / s.kinetic_energy_stderr[i]);
        }
        let rate = fit_cooling_rate(&s, &p).map_err(|e| e.to_string())?;
        let rel = (rate / (0.5 * mu) - 1.0).abs();
        ok &= worst_z <= 3.0 && rel <= 0.05;
        report.push(format!("lambda={lambda}: max z {worst_z:.2}, rate {rate:.4}"));
    }
    check(ok, report.join("; "))
}

fn moment_closed_forms() -> Outcome {
    let (lambda, mu, beta) = (1.3, 0.7, 1.5);
    let p = Params::new(1, lambda, mu, beta).unwrap();
    let init = InitialCondition::Shifted {
        mean: 0.6,
        temperature: 2.2,
    };
    let m0 = MomentVector::new(init.moments(8)).unwrap();
    let horizon = 10.0 / mu;
    let out = integrate_moments(&m0, &p, horizon, horizon / 200.0).map_err(|e| e.to_string())?;
    let m2_0 = m0.m[2];
    let mut worst: f64 = 0.0;
    for mv in &out {
        let t = mv.time;
        let m1 = 0.6 * (-(2.0 * lambda + mu) * t).exp();
        let m2 = 1.0 / beta + (m2_0 - 1.0 / beta) * (-0.5 * mu * t).exp();
        worst = worst.max((mv.m[1] - m1).abs()).max((mv.m[2] - m2).abs());
    }
    check(worst <= 1e-8, format!("max error {worst:.1e} over 201 times on [0, 10/mu]"))
}

fn boltzmann_consistency() -> Outcome {
    let p = Params::new(500, 1.0, 1.0, 1.0).unwrap();
    let init = InitialCondition::Shifted {
        mean: 0.5,
        temperature: 1.5,
    };
    let r = compare_to_boltzmann(&p, init, 4.0 / p.mu, 9, 1000, &[50, 500], 77_001).map_err(|e| e.to_string())?;
    let z50 = r[0].max_standardized;
    let z500 = r[1].max_standardized;
    check(
        z500 <= 3.0,
        format!("max |sim - limit| / sigma over m1..m6 and 9 times: N=50 {z50:.2}, N=500 {z500:.2}"),
    )
}

fn normal(v: f64, mean: f64, var: f64) -> f64 {
    (-(v - mean) * (v - mean) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Densities used by the semigroup checks.
fn ou_suite() -> Vec<(&'static str, DensityGrid)> {
    let grid = default_grid(1.0);
    let d = |h: Box<dyn Fn(f64) -> f64>| DensityGrid::from_fn(grid.clone(), 1.0, DensityKind::Density, h).unwrap();
    vec![
        ("temperature 2", d(Box::new(|v| normal(v, 0.0, 2.0)))),
        ("temperature 0.5", d(Box::new(|v| normal(v, 0.0, 0.5)))),
        ("shift 1", d(Box::new(|v| normal(v, 1.0, 1.0)))),
        (
            "bimodal",
            d(Box::new(|v| 0.5 * normal(v, 1.5, 0.5) + 0.5 * normal(v, -1.5, 0.5))),
        ),
        ("skewed", d(Box::new(|v| 2.0 * normal(v, 0.0, 1.0) * logistic(6.0 * v)))),
    ]
}

fn thermostat_suite() -> Vec<(&'static str, DensityGrid)> {
    let grid = default_grid(1.0);
    let d = |h: Box<dyn Fn(f64) -> f64>| DensityGrid::from_fn(grid.clone(), 1.0, DensityKind::Density, h).unwrap();
    let r = |h: Box<dyn Fn(f64) -> f64>| DensityGrid::from_fn(grid.clone(), 1.0, DensityKind::Ratio, h).unwrap();
    let mut out = ou_suite();
    out.push(("shift -0.7, temperature 1.5", d(Box::new(|v| normal(v, -0.7, 1.5)))));
    out.push(("skewed left", d(Box::new(|v| 2.0 * normal(v, 0.0, 1.0) * logistic(-10.0 * v)))));
    out.push((
        "1 + H4/(2 sqrt 24)",
        r(Box::new(|v| {
            let h4 = v.powi(4) - 6.0 * v * v + 3.0;
            1.0 + 0.5 * h4 / 24f64.sqrt()
        })),
    ));
    out.push((
        "two-temperature",
        d(Box::new(|v| 0.1 * normal(v, 0.0, 3.0) + 0.9 * normal(v, 0.0, 7.0 / 9.0))),
    ));
    out.push(("constant ratio", r(Box::new(|_| 1.0))));
    out
}

/// `int g |a - b|`, the L1 distance of the densities `g a` and `g b`.
fn l1g_distance(a: &DensityGrid, b: &DensityGrid) -> f64 {
    let g = a.bath();
    let w: Vec<f64> = a
        .values
        .iter()
        .zip(&b.values)
        .zip(&g)
        .map(|((x, y), g)| g * (x - y).abs())
        .collect();
    a.grid.trapezoid(&w)
}

fn ou_contraction() -> Outcome {
    let times = [0.1, 0.5, 1.0, 2.0];
    let mut worst_margin = f64::INFINITY;
    let mut worst_comp: f64 = 0.0;
    for (_, f) in ou_suite() {
        let ratio = f.to_ratio();
        for &s in &times {
            let r = check_ou_contraction(&f, s).map_err(|e| e.to_string())?;
            worst_margin = worst_margin.min(r.margin);
            for &t in &times {
                let two = ou_apply(&ou_apply(&ratio, s).unwrap(), t).unwrap();
                let one = ou_apply(&ratio, s + t).unwrap();
                worst_comp = worst_comp.max(l1g_distance(&two, &one));
            }
        }
    }
    check(
        worst_margin >= -1e-8 && worst_comp <= 1e-8,
        format!("min margin {worst_margin:.3e}, max composition error {worst_comp:.1e} (L1(g))"),
    )
}

fn thermostat_inequality() -> Outcome {
    let mut worst = f64::INFINITY;
    let mut names = Vec::new();
    for (name, f) in thermostat_suite() {
        let r = check_thermostat_entropy_inequality(&f).map_err(|e| format!("{name}: {e}"))?;
        let m = r.linear.margin.min(r.entropy.margin);
        if m < -1e-8 {
            names.push(name);
        }
        worst = worst.min(m);
    }
    check(
        names.is_empty(),
        format!("min margin {worst:.3e} over 10 densities; failing: {names:?}"),
    )
}

fn marginal_inequality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let mut min_random = f64::INFINITY;
    let mut max_product: f64 = 0.0;
    for k in 0..100 {
        let n = 2 + k % 3;
        let states: usize = 3;
        let size = states.pow(n as u32);
        let raw: Vec<f64> = (0..size).map(|_| rng.random::<f64>()).collect();
        let total: f64 = raw.iter().sum();
        let j = JointDensity::new(n, states, raw.iter().map(|x| x / total).collect()).unwrap();
        min_random = min_random.min(check_marginal_entropy_inequality(&j).margin);

        let factors: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let f: Vec<f64> = (0..states).map(|_| rng.random::<f64>() + 0.01).collect();
                let s: f64 = f.iter().sum();
                f.into_iter().map(|x| x / s).collect()
            })
            .collect();
        let prod = JointDensity::product(&factors).unwrap();
        max_product = max_product.max(check_marginal_entropy_inequality(&prod).margin.abs());
    }
    check(
        min_random > 1e-10 && max_product <= 1e-10,
        format!("random: min margin {min_random:.3e} (strict); products: max |margin| {max_product:.1e}"),
    )
}

fn entropy_decay() -> Outcome {
    let p = Params::new(50, 1.0, 1.0, 1.0).unwrap();
    let init = InitialCondition::TwoTemperature {
        hot_fraction: 0.1,
        t_hot: 5.0,
        t_cold: 5.0 / 9.0,
    };
    let times = uniform_grid(6.0 / p.mu, 13).unwrap();
    let r = entropy_decay_experiment(&p, init, &times, 2000, 31_337).map_err(|e| e.to_string())?;
    let fit = r
        .fitted_exponent
        .map_or("none".to_string(), |x| format!("{x:.3}"));
    check(
        r.worst_excess() <= 0.0,
        format!(
            "N S(0) = {:.4}, worst estimate - bound - 3 err = {:.3e}, fitted exponent {fit}",
            r.initial,
            r.worst_excess()
        ),
    )
}

fn chaos_trend() -> Outcome {
    let ns = [10usize, 50, 250, 1250];
    let mu = 1.0;
    let mut medians = Vec::new();
    for &n in &ns {
        let p = Params::new(n, 1.0, mu, 1.0).unwrap();
        let mut per_seed: Vec<f64> = (0..5)
            .map(|seed| {
                let mut ens = kac_core::simulator::Ensemble::new(
                    p,
                    InitialCondition::Gaussian { temperature: 2.0 },
                    1000,
                    900 + seed,
                )
                .unwrap();
                ens.advance_to(1.0 / mu).unwrap();
                chaos_metric_samples(&ens).unwrap().metric
            })
            .collect();
        per_seed.sort_by(f64::total_cmp);
        medians.push(per_seed[2]);
    }
    let decreasing = medians.windows(2).all(|w| w[1] < w[0]);
    check(
        decreasing,
        format!(
            "median metric at t = 1/mu: {}",
            ns.iter()
                .zip(&medians)
                .map(|(n, m)| format!("N={n}: {m:.2e}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let runs: [&[&str]; 5] = [
        &["simulate", "--n", "40", "--mu", "1", "--replicas", "100", "--samples", "5", "--seed", "3"],
        &["spectrum", "--n", "5", "--mu", "2", "--lambda", "0.2"],
        &["boltzmann", "--mu", "1", "--samples", "11"],
        &["entropy", "--n", "20", "--mu", "1", "--replicas", "100", "--samples", "4"],
        &["chaos", "--ns", "5,20", "--mu", "1", "--replicas", "50", "--samples", "3"],
    ];
    for (k, args) in runs.iter().enumerate() {
        let mut bytes = Vec::new();
        for rep in 0..2 {
            let path = dir.path().join(format!("{k}_{rep}.csv"));
            let status = Command::new(env!("CARGO_BIN_EXE_kac"))
                .args(*args)
                .arg("--output")
                .arg(&path)
                .status()
                .map_err(|e| e.to_string())?;
            if !status.success() {
                return Err(format!("{} exited with {status}", args[0]));
            }
            bytes.push(std::fs::read(&path).map_err(|e| e.to_string())?);
        }
        if bytes[0] != bytes[1] {
            return Err(format!("{} output differs between runs", args[0]));
        }
    }
    // the simulate histogram is a second file
    let h0 = std::fs::read(dir.path().join("0_0_histogram.csv")).map_err(|e| e.to_string())?;
    let h1 = std::fs::read(dir.path().join("0_1_histogram.csv")).map_err(|e| e.to_string())?;
    check(h0 == h1, "byte-identical output for all five verbs".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("spectral gap exactness", spectral_gap_exactness),
        ("second gap three-route agreement", second_gap_routes),
        ("large-N limit", large_n_limit),
        ("Kac L4 eigenfunction", kac_eigenfunction),
        ("Newton cooling", newton_cooling),
        ("moment ODE closed forms", moment_closed_forms),
        ("Boltzmann consistency", boltzmann_consistency),
        ("OU contraction", ou_contraction),
        ("thermostat entropy inequality", thermostat_inequality),
        ("marginal entropy inequality", marginal_inequality),
        ("entropy decay bound", entropy_decay),
        ("propagation of chaos", chaos_trend),
        ("determinism", determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|x| name.contains(x.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2}. {name}: {detail} [{secs:.1}s]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2}. {name}: {detail} [{secs:.1}s]", k + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
