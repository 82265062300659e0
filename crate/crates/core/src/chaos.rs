//! Propagation-of-chaos diagnostics: pooled one- and two-particle marginals,
//! a dictionary of bounded test functions, and a comparison of simulated
//! one-particle moments with the limiting moment hierarchy.

use rayon::prelude::*;

use crate::boltzmann::{integrate_moments, MomentVector};
use crate::error::{KacError, Result};
use crate::params::Params;
use crate::simulator::{run, uniform_grid, BinCounts, Ensemble, Histogram, InitialCondition, MOMENT_ORDER};

pub const MARGINAL_BINS: usize = 64;

/// `He_k(u) exp(-u^2 / (2 w^2))`, scaled to sup norm one, with `u = sqrt(beta) v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunction {
    pub degree: u32,
    pub width: f64,
    scale: f64,
}

fn hermite(k: u32, u: f64) -> f64 {
    let (mut a, mut b) = (1.0, u);
    if k == 0 {
        return a;
    }
    for j in 1..k {
        let c = u * b - j as f64 * a;
        a = b;
        b = c;
    }
    b
}

impl TestFunction {
    pub fn new(degree: u32, width: f64) -> Self {
        let raw = |u: f64| hermite(degree, u) * (-u * u / (2.0 * width * width)).exp();
        // the envelope is negligible past 10 widths
        let span = 10.0 * width + 4.0;
        let sup = (0..=20_000)
            .map(|k| raw(span * k as f64 / 20_000.0).abs())
            .fold(0.0, f64::max);
        TestFunction {
            degree,
            width,
            scale: 1.0 / sup,
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.scale * hermite(self.degree, u) * (-u * u / (2.0 * self.width * self.width)).exp()
    }
}

/// Degrees 1..=4 crossed with widths 1, sqrt 2, 2.
pub fn dictionary() -> Vec<TestFunction> {
    let mut out = Vec::with_capacity(12);
    for degree in 1..=4 {
        for width in [1.0, std::f64::consts::SQRT_2, 2.0] {
            out.push(TestFunction::new(degree, width));
        }
    }
    out
}

/// Histogram of the one-particle (`k = 1`) or pair (`k = 2`) marginal, pooled
/// over particles or ordered pairs of distinct particles and over replicas.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalSet {
    pub k: usize,
    pub n_particles: usize,
    pub time: f64,
    pub replicas: usize,
    pub lo: f64,
    pub hi: f64,
    pub bins: usize,
    /// Row-major, `bins^k` entries.
    pub masses: Vec<f64>,
    /// Mass with at least one coordinate outside `[lo, hi)`.
    pub outside: f64,
}

impl MarginalSet {
    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum::<f64>() + self.outside
    }

    pub fn center(&self, b: usize) -> f64 {
        self.lo + (b as f64 + 0.5) * (self.hi - self.lo) / self.bins as f64
    }
}

pub fn extract_marginals(ens: &Ensemble, k: usize) -> Result<MarginalSet> {
    extract_marginals_from(ens.iter(), ens.params(), ens.time(), k)
}

/// Same as [`extract_marginals`] for an arbitrary collection of replicas.
pub fn extract_marginals_from<'a>(
    replicas: impl Iterator<Item = &'a [f64]>,
    params: &Params,
    time: f64,
    k: usize,
) -> Result<MarginalSet> {
    if k != 1 && k != 2 {
        return Err(KacError::invalid(format!("marginal order must be 1 or 2, got {k}")));
    }
    let n = params.n_particles;
    if k == 2 && n < 2 {
        return Err(KacError::invalid("pair marginal needs N >= 2"));
    }
    let (lo, hi) = Histogram::default_range(params.beta);
    let bins = MARGINAL_BINS;
    let cells = bins.pow(k as u32);
    let mut counts = vec![0u64; cells];
    let mut total = 0u64;
    let mut m = 0;
    for v in replicas {
        m += 1;
        let mut bc = BinCounts::new(lo, hi, bins);
        for &x in v {
            bc.add(x);
        }
        if k == 1 {
            for (a, c) in counts.iter_mut().zip(&bc.counts) {
                *a += c;
            }
            total += v.len() as u64;
        } else {
            for (a, &ca) in bc.counts.iter().enumerate() {
                if ca == 0 {
                    continue;
                }
                for (b, &cb) in bc.counts.iter().enumerate() {
                    counts[a * bins + b] += ca * cb - if a == b { ca } else { 0 };
                }
            }
            let len = v.len() as u64;
            total += len * (len - 1);
        }
    }
    let tf = total.max(1) as f64;
    let masses: Vec<f64> = counts.iter().map(|&c| c as f64 / tf).collect();
    let inside: u64 = counts.iter().sum();
    Ok(MarginalSet {
        k,
        n_particles: n,
        time,
        replicas: m,
        lo,
        hi,
        bins,
        masses,
        outside: (total - inside) as f64 / tf,
    })
}

/// `max_{i <= j} |<phi_i x phi_j, f2> - <phi_i, f1><phi_j, f1>|` over the
/// dictionary, with both marginals read at bin centres.
pub fn chaos_metric(f1: &MarginalSet, f2: &MarginalSet) -> Result<f64> {
    if f1.k != 1 || f2.k != 2 {
        return Err(KacError::invalid("chaos_metric takes a one-particle and a pair marginal"));
    }
    if f1.bins != f2.bins || f1.lo != f2.lo || f1.hi != f2.hi {
        return Err(KacError::invalid("marginals live on different grids"));
    }
    let sb = scale_from_range(f1.lo, f1.hi);
    let dict = dictionary();
    let phi: Vec<Vec<f64>> = dict
        .iter()
        .map(|f| (0..f1.bins).map(|b| f.eval(sb * f1.center(b))).collect())
        .collect();
    let mean: Vec<f64> = phi
        .iter()
        .map(|p| p.iter().zip(&f1.masses).map(|(a, w)| a * w).sum())
        .collect();
    let nb = f1.bins;
    let mut worst: f64 = 0.0;
    for i in 0..dict.len() {
        for j in i..dict.len() {
            let mut pair = 0.0;
            for a in 0..nb {
                let row = &f2.masses[a * nb..(a + 1) * nb];
                let inner: f64 = row.iter().zip(&phi[j]).map(|(w, p)| w * p).sum();
                pair += phi[i][a] * inner;
            }
            worst = worst.max((pair - mean[i] * mean[j]).abs());
        }
    }
    Ok(worst)
}

/// `sqrt(beta)` recovered from the default histogram range `+-8 / sqrt(beta)`.
fn scale_from_range(lo: f64, hi: f64) -> f64 {
    16.0 / (hi - lo)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChaosEstimate {
    pub metric: f64,
    /// Largest delta-method standard error over the dictionary pairs.
    pub stderr: f64,
}

/// Dictionary metric computed directly from the velocities, with pair averages
/// taken as U-statistics over distinct particles within each replica.
pub fn chaos_metric_samples(ens: &Ensemble) -> Result<ChaosEstimate> {
    let params = ens.params();
    let n = params.n_particles;
    if n < 2 {
        return Err(KacError::invalid("chaos metric needs N >= 2"));
    }
    let m = ens.len();
    if m < 2 {
        return Err(KacError::invalid("chaos metric needs at least two replicas"));
    }
    let dict = dictionary();
    let d = dict.len();
    let sb = params.beta.sqrt();
    // per replica: particle means a_i and pair means b_ij (upper triangle)
    let per: Vec<(Vec<f64>, Vec<f64>)> = (0..m)
        .into_par_iter()
        .map(|r| {
            let v = ens.velocities(r);
            let mut sum = vec![0.0; d];
            let mut diag = vec![0.0; d * (d + 1) / 2];
            let mut vals = vec![0.0; d];
            for &x in v {
                for (f, out) in dict.iter().zip(vals.iter_mut()) {
                    *out = f.eval(sb * x);
                }
                let mut idx = 0;
                for i in 0..d {
                    sum[i] += vals[i];
                    for j in i..d {
                        diag[idx] += vals[i] * vals[j];
                        idx += 1;
                    }
                }
            }
            let nf = n as f64;
            let pairs = nf * (nf - 1.0);
            let mut b = vec![0.0; d * (d + 1) / 2];
            let mut idx = 0;
            for i in 0..d {
                for j in i..d {
                    b[idx] = (sum[i] * sum[j] - diag[idx]) / pairs;
                    idx += 1;
                }
            }
            (sum.iter().map(|s| s / nf).collect(), b)
        })
        .collect();
    let mf = m as f64;
    let mut a_bar = vec![0.0; d];
    for (a, _) in &per {
        for i in 0..d {
            a_bar[i] += a[i] / mf;
        }
    }
    let mut metric: f64 = 0.0;
    let mut stderr: f64 = 0.0;
    let mut idx = 0;
    for i in 0..d {
        for j in i..d {
            let b_bar = per.iter().map(|(_, b)| b[idx]).sum::<f64>() / mf;
            let infl: Vec<f64> = per
                .iter()
                .map(|(a, b)| b[idx] - a_bar[j] * a[i] - a_bar[i] * a[j])
                .collect();
            let mean = infl.iter().sum::<f64>() / mf;
            let var = infl.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (mf - 1.0);
            metric = metric.max((b_bar - a_bar[i] * a_bar[j]).abs());
            stderr = stderr.max((var / mf).sqrt());
            idx += 1;
        }
    }
    Ok(ChaosEstimate { metric, stderr })
}

/// Simulated one-particle moments at one `N` against the moment hierarchy.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentComparison {
    pub n_particles: usize,
    pub times: Vec<f64>,
    pub simulated: Vec<[f64; MOMENT_ORDER]>,
    pub stderr: Vec<[f64; MOMENT_ORDER]>,
    pub limit: Vec<[f64; MOMENT_ORDER]>,
    /// Largest `|simulated - limit| / stderr` over times and orders, skipping
    /// entries whose standard error vanishes.
    pub max_standardized: f64,
}

pub fn compare_to_boltzmann(
    params: &Params,
    init: InitialCondition,
    horizon: f64,
    points: usize,
    replicas: usize,
    ns: &[usize],
    seed: u64,
) -> Result<Vec<MomentComparison>> {
    let grid = uniform_grid(horizon, points)?;
    let m0 = MomentVector::new(init.moments(MOMENT_ORDER))?;
    let limit: Vec<[f64; MOMENT_ORDER]> = integrate_moments(&m0, params, horizon, horizon / (points - 1) as f64)?
        .into_iter()
        .map(|mv| {
            let mut row = [0.0; MOMENT_ORDER];
            row.copy_from_slice(&mv.m[1..=MOMENT_ORDER]);
            row
        })
        .collect();
    let mut out = Vec::with_capacity(ns.len());
    for &n in ns {
        let p = params.with_n(n);
        let series = run(&p, init, replicas, &grid, seed)?;
        let mut worst: f64 = 0.0;
        for (k, lim) in limit.iter().enumerate() {
            for j in 0..MOMENT_ORDER {
                let e = series.moment_stderr[k][j];
                if e > 0.0 {
                    worst = worst.max((series.moments[k][j] - lim[j]).abs() / e);
                }
            }
        }
        out.push(MomentComparison {
            n_particles: n,
            times: series.times.clone(),
            simulated: series.moments.clone(),
            stderr: series.moment_stderr.clone(),
            limit: limit.clone(),
            max_standardized: worst,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesRadius {
    /// Horizon below which the time series is guaranteed to converge:
    /// `1 / (4 lambda + mu)`.
    pub radius: f64,
    /// Horizon below which the term bounds themselves are summable:
    /// `1 / (4 lambda + 2 mu)`.
    pub ratio_horizon: f64,
}

pub fn mckean_series_radius(params: &Params, arity: u32) -> Result<SeriesRadius> {
    if arity == 0 {
        return Err(KacError::invalid("test-function arity must be at least 1"));
    }
    let (l, m) = (params.lambda, params.mu);
    let inv = |x: f64| if x > 0.0 { 1.0 / x } else { f64::INFINITY };
    Ok(SeriesRadius {
        radius: inv(4.0 * l + m),
        ratio_horizon: inv(4.0 * l + 2.0 * m),
    })
}

/// `t^l / l! (4 lambda + 2 mu)^l m (m + 1) ... (m + l - 1)` for `l = 0..count`.
pub fn series_term_bounds(params: &Params, arity: u32, t: f64, count: usize) -> Vec<f64> {
    let rate = 4.0 * params.lambda + 2.0 * params.mu;
    let mut out = Vec::with_capacity(count);
    let mut term = 1.0;
    for l in 0..count {
        out.push(term);
        term *= rate * t * (arity as f64 + l as f64) / (l as f64 + 1.0);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::EventKind;

    #[test]
    fn dictionary_is_bounded_by_one() {
        let d = dictionary();
        assert_eq!(d.len(), 12);
        for f in &d {
            let sup = (-4000..=4000)
                .map(|k| f.eval(k as f64 * 0.005).abs())
                .fold(0.0, f64::max);
            assert!(sup <= 1.0 + 1e-6 && sup > 0.999, "{f:?}: {sup}");
        }
    }

    #[test]
    fn marginals_have_unit_mass() {
        let p = Params::new(6, 1.0, 1.0, 1.0).unwrap();
        let ens = Ensemble::new(p, InitialCondition::Gaussian { temperature: 2.0 }, 50, 3).unwrap();
        for k in [1, 2] {
            let s = extract_marginals(&ens, k).unwrap();
            assert!((s.total_mass() - 1.0).abs() < 1e-10);
            assert_eq!(s.masses.len(), MARGINAL_BINS.pow(k as u32));
        }
        assert!(extract_marginals(&ens, 3).is_err());
    }

    #[test]
    fn pair_marginal_of_two_points() {
        let p = Params::new(2, 1.0, 1.0, 1.0).unwrap();
        let reps: Vec<Vec<f64>> = vec![vec![-1.0, 1.0]];
        let s = extract_marginals_from(reps.iter().map(|v| v.as_slice()), &p, 0.0, 2).unwrap();
        let nonzero: Vec<f64> = s.masses.iter().copied().filter(|&x| x > 0.0).collect();
        assert_eq!(nonzero, vec![0.5, 0.5]);
    }

    #[test]
    fn pooling_ignores_labels() {
        let p = Params::new(5, 1.0, 1.0, 1.0).unwrap();
        let ens = Ensemble::new(p, InitialCondition::Gaussian { temperature: 1.0 }, 20, 9).unwrap();
        let flipped: Vec<Vec<f64>> = ens.iter().map(|v| v.iter().rev().copied().collect()).collect();
        for k in [1, 2] {
            let a = extract_marginals(&ens, k).unwrap();
            let b = extract_marginals_from(flipped.iter().map(|v| v.as_slice()), &p, 0.0, k).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn product_data_has_no_correlation() {
        let p = Params::new(20, 1.0, 1.0, 1.0).unwrap();
        let ens = Ensemble::new(p, InitialCondition::Gaussian { temperature: 2.0 }, 400, 21).unwrap();
        let est = chaos_metric_samples(&ens).unwrap();
        assert!(est.metric < 4.0 * est.stderr, "{est:?}");
        let f1 = extract_marginals(&ens, 1).unwrap();
        let f2 = extract_marginals(&ens, 2).unwrap();
        assert!(chaos_metric(&f1, &f2).unwrap() < 0.02);
    }

    #[test]
    fn forced_collision_correlates_two_particles() {
        let p = Params::new(2, 1.0, 1.0, 1.0).unwrap();
        let mut ens = Ensemble::new(p, InitialCondition::Uniform { half_width: 1.5 }, 4000, 2).unwrap();
        let before = chaos_metric_samples(&ens).unwrap();
        ens.force_event(EventKind::Kac).unwrap();
        let after = chaos_metric_samples(&ens).unwrap();
        assert!(before.metric < 4.0 * before.stderr);
        assert!(after.metric > 5.0 * after.stderr, "{after:?}");
        let f1 = extract_marginals(&ens, 1).unwrap();
        let f2 = extract_marginals(&ens, 2).unwrap();
        assert!(chaos_metric(&f1, &f2).unwrap() > 0.02);
    }

    #[test]
    fn series_radius_values() {
        let p = |l, m| Params::new(1, l, m, 1.0).unwrap();
        assert!((mckean_series_radius(&p(1.0, 1.0), 1).unwrap().radius - 0.2).abs() < 1e-15);
        assert_eq!(mckean_series_radius(&p(0.0, 1.0), 2).unwrap().radius, 1.0);
        assert!(mckean_series_radius(&p(0.0, 0.0), 1).unwrap().radius.is_infinite());
        assert!(mckean_series_radius(&p(1.0, 1.0), 0).is_err());
    }

    #[test]
    fn term_ratio() {
        let p = Params::new(1, 1.0, 0.5, 1.0).unwrap();
        let (m, t) = (3, 0.1);
        let terms = series_term_bounds(&p, m, t, 30);
        for l in 0..29 {
            let want = 5.0 * (m as f64 + l as f64) * t / (l as f64 + 1.0);
            assert!((terms[l + 1] / terms[l] - want).abs() < 1e-12);
        }
        // summable below the ratio horizon, divergent above it
        let r = mckean_series_radius(&p, m).unwrap().ratio_horizon;
        assert!(series_term_bounds(&p, m, 0.9 * r, 400)[399] < 1e-10);
        assert!(series_term_bounds(&p, m, 1.1 * r, 400)[399] > 1.0);
    }

    #[test]
    fn boltzmann_comparison_at_equilibrium() {
        let p = Params::new(10, 1.0, 1.0, 1.0).unwrap();
        let r = compare_to_boltzmann(&p, InitialCondition::Gaussian { temperature: 1.0 }, 1.0, 3, 400, &[10], 4).unwrap();
        assert!(r[0].max_standardized < 4.5, "{}", r[0].max_standardized);
        assert_eq!(r[0].limit[2][1], 1.0);
    }
}
