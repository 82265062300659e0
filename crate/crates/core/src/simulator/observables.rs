use rayon::prelude::*;

use super::ensemble::Ensemble;
use super::initial::InitialCondition;
use crate::error::{KacError, Result};
use crate::params::Params;

pub const MOMENT_ORDER: usize = 6;
pub const DEFAULT_BINS: usize = 256;

/// Fixed-range histogram with separate under- and overflow. Masses are
/// fractions of all samples, so everything sums to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub masses: Vec<f64>,
    pub underflow: f64,
    pub overflow: f64,
}

impl Histogram {
    /// Range `+-8/sqrt(beta)`.
    pub fn default_range(beta: f64) -> (f64, f64) {
        let h = 8.0 / beta.sqrt();
        (-h, h)
    }

    pub fn from_samples<'a>(samples: impl IntoIterator<Item = &'a f64>, lo: f64, hi: f64, bins: usize) -> Self {
        let mut counts = BinCounts::new(lo, hi, bins);
        for &x in samples {
            counts.add(x);
        }
        counts.into_histogram()
    }

    pub fn bins(&self) -> usize {
        self.masses.len()
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bins() as f64
    }

    pub fn edges(&self, k: usize) -> (f64, f64) {
        let w = self.width();
        (self.lo + k as f64 * w, self.lo + (k + 1) as f64 * w)
    }

    pub fn center(&self, k: usize) -> f64 {
        let (a, b) = self.edges(k);
        0.5 * (a + b)
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum::<f64>() + self.underflow + self.overflow
    }
}

/// Integer bin counts; merged across replicas before normalizing.
#[derive(Debug, Clone)]
pub(crate) struct BinCounts {
    lo: f64,
    hi: f64,
    pub(crate) counts: Vec<u64>,
    under: u64,
    over: u64,
}

impl BinCounts {
    pub(crate) fn new(lo: f64, hi: f64, bins: usize) -> Self {
        assert!(hi > lo && bins > 0);
        BinCounts {
            lo,
            hi,
            counts: vec![0; bins],
            under: 0,
            over: 0,
        }
    }

    pub(crate) fn index(&self, x: f64) -> Option<usize> {
        if x < self.lo || x >= self.hi {
            return None;
        }
        let k = ((x - self.lo) / (self.hi - self.lo) * self.counts.len() as f64) as usize;
        Some(k.min(self.counts.len() - 1))
    }

    pub(crate) fn add(&mut self, x: f64) {
        match self.index(x) {
            Some(k) => self.counts[k] += 1,
            None if x < self.lo => self.under += 1,
            None => self.over += 1,
        }
    }

    pub(crate) fn merge(&mut self, other: &BinCounts) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.under += other.under;
        self.over += other.over;
    }

    pub(crate) fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.under + self.over
    }

    /// Underflow, the bins, overflow.
    pub(crate) fn cells(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.counts.len() + 2);
        out.push(self.under);
        out.extend_from_slice(&self.counts);
        out.push(self.over);
        out
    }

    pub(crate) fn into_histogram(self) -> Histogram {
        let total = self.total().max(1) as f64;
        Histogram {
            lo: self.lo,
            hi: self.hi,
            masses: self.counts.iter().map(|&c| c as f64 / total).collect(),
            underflow: self.under as f64 / total,
            overflow: self.over as f64 / total,
        }
    }
}

/// Ensemble averages at a list of times.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSeries {
    pub n_particles: usize,
    pub replicas: usize,
    pub times: Vec<f64>,
    /// Mean of `(1/2) sum_i v_i^2` over replicas.
    pub kinetic_energy: Vec<f64>,
    pub kinetic_energy_stderr: Vec<f64>,
    /// `moments[t][k-1]` is the one-particle moment `E[v^k]`, `k = 1..=6`.
    pub moments: Vec<[f64; MOMENT_ORDER]>,
    /// Standard errors from the spread of per-replica particle averages.
    pub moment_stderr: Vec<[f64; MOMENT_ORDER]>,
    pub histograms: Vec<Histogram>,
}

impl ObservableSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `2 K / N`.
    pub fn temperature(&self) -> Vec<f64> {
        let n = self.n_particles as f64;
        self.kinetic_energy.iter().map(|k| 2.0 * k / n).collect()
    }

    /// Excess kurtosis of the one-particle marginal along the run.
    pub fn excess_kurtosis(&self) -> Vec<f64> {
        self.moments
            .iter()
            .map(|m| {
                let (m1, m2, m3, m4) = (m[0], m[1], m[2], m[3]);
                let var = m2 - m1 * m1;
                let c4 = m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1.powi(4);
                c4 / (var * var) - 3.0
            })
            .collect()
    }
}

/// `count` equally spaced times from 0 to `horizon` inclusive.
pub fn uniform_grid(horizon: f64, count: usize) -> Result<Vec<f64>> {
    if !(horizon > 0.0) || count < 2 {
        return Err(KacError::invalid("a sample grid needs horizon > 0 and at least two points"));
    }
    Ok((0..count)
        .map(|k| horizon * k as f64 / (count - 1) as f64)
        .collect())
}

struct ReplicaStats {
    energy: f64,
    moments: [f64; MOMENT_ORDER],
    bins: BinCounts,
}

fn replica_stats(v: &[f64], lo: f64, hi: f64, bins: usize) -> ReplicaStats {
    let n = v.len() as f64;
    let mut moments = [0.0; MOMENT_ORDER];
    let mut energy = 0.0;
    let mut counts = BinCounts::new(lo, hi, bins);
    for &x in v {
        let mut p = 1.0;
        for m in moments.iter_mut() {
            p *= x;
            *m += p;
        }
        energy += 0.5 * x * x;
        counts.add(x);
    }
    for m in moments.iter_mut() {
        *m /= n;
    }
    ReplicaStats {
        energy,
        moments,
        bins: counts,
    }
}

fn mean_and_stderr(xs: impl Iterator<Item = f64> + Clone, m: usize) -> (f64, f64) {
    let mf = m as f64;
    let mean = xs.clone().sum::<f64>() / mf;
    if m < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (mf - 1.0);
    (mean, (var / mf).sqrt())
}

/// Record the current state of `ens` into `series`.
pub fn record(series: &mut ObservableSeries, ens: &Ensemble) {
    let (lo, hi) = Histogram::default_range(ens.params().beta);
    let stats: Vec<ReplicaStats> = (0..ens.len())
        .into_par_iter()
        .map(|r| replica_stats(ens.velocities(r), lo, hi, DEFAULT_BINS))
        .collect();
    // reduce in replica order so the result does not depend on scheduling
    let m = stats.len();
    let (k, k_err) = mean_and_stderr(stats.iter().map(|s| s.energy), m);
    let mut mom = [0.0; MOMENT_ORDER];
    let mut mom_err = [0.0; MOMENT_ORDER];
    for j in 0..MOMENT_ORDER {
        let (a, e) = mean_and_stderr(stats.iter().map(|s| s.moments[j]), m);
        mom[j] = a;
        mom_err[j] = e;
    }
    let mut counts = BinCounts::new(lo, hi, DEFAULT_BINS);
    for s in &stats {
        counts.merge(&s.bins);
    }
    series.times.push(ens.time());
    series.kinetic_energy.push(k);
    series.kinetic_energy_stderr.push(k_err);
    series.moments.push(mom);
    series.moment_stderr.push(mom_err);
    series.histograms.push(counts.into_histogram());
}

pub fn empty_series(params: &Params, replicas: usize) -> ObservableSeries {
    ObservableSeries {
        n_particles: params.n_particles,
        replicas,
        times: Vec::new(),
        kinetic_energy: Vec::new(),
        kinetic_energy_stderr: Vec::new(),
        moments: Vec::new(),
        moment_stderr: Vec::new(),
        histograms: Vec::new(),
    }
}

/// Simulate `replicas` copies from `init` and sample observables on `grid`.
pub fn run(
    params: &Params,
    init: InitialCondition,
    replicas: usize,
    grid: &[f64],
    seed: u64,
) -> Result<ObservableSeries> {
    if grid.is_empty() {
        return Err(KacError::invalid("empty sample grid"));
    }
    if grid.windows(2).any(|w| w[1] < w[0]) || grid[0] < 0.0 {
        return Err(KacError::invalid("sample times must be nonnegative and sorted"));
    }
    let mut ens = Ensemble::new(*params, init, replicas, seed)?;
    let mut series = empty_series(params, replicas);
    for &t in grid {
        ens.advance_to(t)?;
        record(&mut series, &ens);
    }
    Ok(series)
}

/// Rate of the exponential approach of `K(t)` to `N/(2 beta)`, from a weighted
/// least-squares line through `log |K - N/(2 beta)|`.
pub fn fit_cooling_rate(series: &ObservableSeries, params: &Params) -> Result<f64> {
    if series.len() < 3 {
        return Err(KacError::IllConditionedFit("need at least three sample times".into()));
    }
    let eq = params.equilibrium_energy();
    let y0 = series.kinetic_energy[0] - eq;
    let err0 = series.kinetic_energy_stderr[0];
    let sign = y0.signum();
    let noise_floor = if err0.is_finite() { 5.0 * err0 } else { 0.0 };
    if y0.abs() <= noise_floor.max(1e-9 * eq) {
        return Err(KacError::IllConditionedFit(format!(
            "initial energy {} is indistinguishable from equilibrium {eq}",
            series.kinetic_energy[0]
        )));
    }
    let (mut sw, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut used = 0;
    for k in 0..series.len() {
        let y = sign * (series.kinetic_energy[k] - eq);
        let err = series.kinetic_energy_stderr[k];
        if !(y > 0.0) {
            continue;
        }
        // drop points buried in noise; weight the rest by (y / sigma)^2
        let w = if err.is_finite() && err > 0.0 {
            if y < 3.0 * err {
                continue;
            }
            (y / err).powi(2)
        } else {
            1.0
        };
        let (x, ly) = (series.times[k], y.ln());
        sw += w;
        sx += w * x;
        sy += w * ly;
        sxx += w * x * x;
        sxy += w * x * ly;
        used += 1;
    }
    let denom = sw * sxx - sx * sx;
    if used < 3 || denom <= 0.0 {
        return Err(KacError::IllConditionedFit(format!(
            "only {used} sample times rise above the noise"
        )));
    }
    let slope = (sw * sxy - sx * sy) / denom;
    Ok(-slope)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_mass_and_edges() {
        let xs = [-10.0, -1.0, 0.0, 0.5, 7.99, 8.0, 100.0];
        let h = Histogram::from_samples(&xs, -8.0, 8.0, 16);
        assert!((h.total_mass() - 1.0).abs() < 1e-12);
        assert_eq!(h.underflow, 1.0 / 7.0);
        assert_eq!(h.overflow, 2.0 / 7.0);
        assert_eq!(h.edges(0), (-8.0, -7.0));
        assert_eq!(h.masses[8], 2.0 / 7.0);
    }

    #[test]
    fn series_is_reproducible() {
        let p = Params::new(8, 1.0, 1.0, 2.0).unwrap();
        let init = InitialCondition::Gaussian { temperature: 1.0 };
        let grid = uniform_grid(2.0, 5).unwrap();
        let a = run(&p, init, 16, &grid, 3).unwrap();
        let b = run(&p, init, 16, &grid, 3).unwrap();
        assert_eq!(a, b);
        for h in &a.histograms {
            assert!((h.total_mass() - 1.0).abs() < 1e-12);
        }
        assert!(a.kinetic_energy.iter().all(|&k| k >= 0.0));
    }

    #[test]
    fn equilibrium_start_stays_put() {
        let p = Params::new(20, 1.0, 1.0, 2.0).unwrap();
        let init = InitialCondition::Gaussian { temperature: 0.5 };
        let grid = uniform_grid(3.0, 4).unwrap();
        let s = run(&p, init, 2000, &grid, 17).unwrap();
        for (k, e) in s.kinetic_energy.iter().zip(&s.kinetic_energy_stderr) {
            assert!((k - 5.0).abs() < 3.0 * e, "{k} +- {e}");
        }
        assert!(matches!(
            fit_cooling_rate(&s, &p),
            Err(KacError::IllConditionedFit(_))
        ));
    }

    #[test]
    fn one_thermostat_event_halves_the_excess_temperature() {
        // N = 1, lambda = 0: one event takes E[v^2] from T0 to (T0 + 1/beta)/2
        let p = Params::new(1, 0.0, 1.0, 2.0).unwrap();
        let mut ens = Ensemble::new(p, InitialCondition::Gaussian { temperature: 3.0 }, 200_000, 8).unwrap();
        ens.force_event(super::super::ensemble::EventKind::Thermostat).unwrap();
        let xs: Vec<f64> = ens.iter().map(|v| v[0] * v[0]).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64;
        let err = (var / xs.len() as f64).sqrt();
        assert!((mean - 1.75).abs() < 4.0 * err, "{mean} +- {err}");
    }

    #[test]
    fn kurtosis_of_gaussian_moments_is_zero() {
        let mut s = empty_series(&Params::new(2, 1.0, 1.0, 1.0).unwrap(), 1);
        s.moments.push([0.0, 2.0, 0.0, 12.0, 0.0, 120.0]);
        assert!(s.excess_kurtosis()[0].abs() < 1e-15);
    }
}
