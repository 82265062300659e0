use rand::Rng;
use rand_distr::Binomial;

use super::grid::bath_density;
use crate::error::{KacError, Result};
use crate::quadrature::gauss_legendre;
use crate::simulator::{replica_rng, BinCounts};

pub const MIN_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorOptions {
    pub bins: usize,
    /// Histogram range is `+-half_width`; `None` means `8/sqrt(beta)`.
    pub half_width: Option<f64>,
    pub resamples: usize,
    pub seed: u64,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        EstimatorOptions {
            bins: 256,
            half_width: None,
            resamples: 200,
            seed: 0x5eed_0e57,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyEstimate {
    pub value: f64,
    /// Bootstrap standard deviation over multinomial resamples of the bins.
    pub stderr: f64,
    pub samples: usize,
    pub occupied_bins: usize,
}

/// Bath mass of every cell: underflow, the bins, overflow.
fn bath_cell_masses(lo: f64, hi: f64, bins: usize, beta: f64) -> Vec<f64> {
    let g = |v: f64| bath_density(v, beta);
    let w = (hi - lo) / bins as f64;
    let tail = gauss_legendre(48, hi, hi + 6.0 / beta.sqrt()).integrate(g);
    let mut out = Vec::with_capacity(bins + 2);
    out.push(tail);
    for k in 0..bins {
        let a = lo + k as f64 * w;
        out.push(gauss_legendre(8, a, a + w).integrate(g));
    }
    out.push(tail);
    out
}

/// Plug-in `sum p log(p/q)` minus the first-order bias `(m - 1) / (2n)`.
fn corrected_kl(counts: &[u64], q: &[f64], n: u64) -> f64 {
    let nf = n as f64;
    let mut kl = 0.0;
    let mut occupied = 0usize;
    for (&c, &qb) in counts.iter().zip(q) {
        if c == 0 {
            continue;
        }
        occupied += 1;
        let p = c as f64 / nf;
        kl += p * (p / qb.max(1e-300)).ln();
    }
    kl - (occupied.saturating_sub(1)) as f64 / (2.0 * nf)
}

/// Relative entropy of the sampled one-particle law with respect to the bath
/// Gaussian, from a histogram.
pub fn relative_entropy_samples(samples: &[f64], beta: f64) -> Result<EntropyEstimate> {
    relative_entropy_samples_with(samples, beta, &EstimatorOptions::default())
}

pub fn relative_entropy_samples_with(samples: &[f64], beta: f64, opts: &EstimatorOptions) -> Result<EntropyEstimate> {
    if samples.len() < MIN_SAMPLES {
        return Err(KacError::EstimatorUnreliable {
            samples: samples.len(),
            required: MIN_SAMPLES,
        });
    }
    if !(beta > 0.0) || opts.bins < 2 {
        return Err(KacError::invalid("estimator needs beta > 0 and at least two bins"));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(KacError::Domain("non-finite sample".into()));
    }
    let (min, max) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    if min == max {
        return Err(KacError::Domain("all samples are equal; the histogram is degenerate".into()));
    }
    let h = opts.half_width.unwrap_or(8.0 / beta.sqrt());
    let mut bc = BinCounts::new(-h, h, opts.bins);
    for &x in samples {
        bc.add(x);
    }
    let counts = bc.cells();
    let q = bath_cell_masses(-h, h, opts.bins, beta);
    let n = samples.len() as u64;
    let value = corrected_kl(&counts, &q, n);

    let p_hat: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
    let mut rng = replica_rng(opts.seed, 0);
    let mut boot = Vec::with_capacity(opts.resamples);
    let mut draw = vec![0u64; counts.len()];
    for _ in 0..opts.resamples {
        multinomial(&mut rng, n, &p_hat, &mut draw);
        boot.push(corrected_kl(&draw, &q, n));
    }
    let mean = boot.iter().sum::<f64>() / boot.len().max(1) as f64;
    let var = boot.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (boot.len().max(2) - 1) as f64;
    Ok(EntropyEstimate {
        value,
        stderr: var.sqrt(),
        samples: samples.len(),
        occupied_bins: counts.iter().filter(|&&c| c > 0).count(),
    })
}

fn multinomial<R: Rng>(rng: &mut R, n: u64, p: &[f64], out: &mut [u64]) {
    let mut left = n;
    let mut mass = 1.0;
    for (k, &pk) in p.iter().enumerate() {
        if left == 0 || pk <= 0.0 {
            out[k] = 0;
            continue;
        }
        let prob = (pk / mass).clamp(0.0, 1.0);
        let x = Binomial::new(left, prob).map(|b| rng.sample(b)).unwrap_or(left);
        out[k] = x;
        left -= x;
        mass -= pk;
    }
    if left > 0 {
        // rounding left a few draws unassigned; put them in the last occupied cell
        if let Some(k) = p.iter().rposition(|&x| x > 0.0) {
            out[k] += left;
        }
    }
}
