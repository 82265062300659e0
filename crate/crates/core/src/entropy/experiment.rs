use super::grid::relative_entropy_fn;
use super::samples::{relative_entropy_samples_with, EstimatorOptions};
use crate::error::{KacError, Result};
use crate::params::Params;
use crate::simulator::{Ensemble, InitialCondition};

/// Relative entropy of the pooled one-particle marginal against the bath,
/// scaled by `N`, next to the decay bound started from the exact initial value.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropySeries {
    pub n_particles: usize,
    pub replicas: usize,
    pub times: Vec<f64>,
    pub estimate: Vec<f64>,
    pub stderr: Vec<f64>,
    pub bound: Vec<f64>,
    /// Exact `N S(f_0 | g)` for the product initial data.
    pub initial: f64,
    /// Slope of `-log S` over the points that stand above three error bars.
    pub fitted_exponent: Option<f64>,
}

impl EntropySeries {
    /// Largest `estimate - bound - 3 stderr`; nonpositive when the bound holds.
    pub fn worst_excess(&self) -> f64 {
        (0..self.times.len())
            .map(|k| self.estimate[k] - self.bound[k] - 3.0 * self.stderr[k])
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn initial_entropy(init: &InitialCondition, beta: f64) -> f64 {
    let var = match *init {
        InitialCondition::Gaussian { temperature } => temperature,
        InitialCondition::Shifted { mean, temperature } => temperature + mean * mean,
        InitialCondition::TwoTemperature { t_hot, t_cold, .. } => t_hot.max(t_cold),
        InitialCondition::Uniform { half_width } => half_width * half_width,
    };
    let half_width = 12.0 * var.max(1.0 / beta).sqrt();
    relative_entropy_fn(|v| init.density(v), beta, half_width)
}

pub fn entropy_decay_experiment(
    params: &Params,
    init: InitialCondition,
    times: &[f64],
    replicas: usize,
    seed: u64,
) -> Result<EntropySeries> {
    params.validate()?;
    if times.is_empty() || times.windows(2).any(|w| w[1] < w[0]) || times[0] < 0.0 {
        return Err(KacError::invalid("sample times must be nonnegative and sorted"));
    }
    let n = params.n_particles as f64;
    let s0 = n * initial_entropy(&init, params.beta);
    let mut ens = Ensemble::new(*params, init, replicas, seed)?;
    let opts = EstimatorOptions {
        seed: seed ^ 0x00e7_7a0b,
        ..EstimatorOptions::default()
    };
    let mut out = EntropySeries {
        n_particles: params.n_particles,
        replicas,
        times: Vec::with_capacity(times.len()),
        estimate: Vec::new(),
        stderr: Vec::new(),
        bound: Vec::new(),
        initial: s0,
        fitted_exponent: None,
    };
    let mut pooled = Vec::with_capacity(params.n_particles * replicas);
    for &t in times {
        ens.advance_to(t)?;
        pooled.clear();
        for v in ens.iter() {
            pooled.extend_from_slice(v);
        }
        let e = relative_entropy_samples_with(&pooled, params.beta, &opts)?;
        out.times.push(t);
        out.estimate.push(n * e.value);
        out.stderr.push(n * e.stderr);
        out.bound.push((-0.5 * params.mu * t).exp() * s0);
    }
    out.fitted_exponent = fit_exponent(&out.times, &out.estimate, &out.stderr);
    Ok(out)
}

fn fit_exponent(t: &[f64], s: &[f64], err: &[f64]) -> Option<f64> {
    let (mut sw, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut used = 0;
    for k in 0..t.len() {
        if !(s[k] > 3.0 * err[k]) || !(s[k] > 0.0) {
            continue;
        }
        let w = if err[k] > 0.0 { (s[k] / err[k]).powi(2) } else { 1.0 };
        let y = s[k].ln();
        sw += w;
        sx += w * t[k];
        sy += w * y;
        sxx += w * t[k] * t[k];
        sxy += w * t[k] * y;
        used += 1;
    }
    let d = sw * sxx - sx * sx;
    (used >= 3 && d > 0.0).then(|| -(sw * sxy - sx * sy) / d)
}
