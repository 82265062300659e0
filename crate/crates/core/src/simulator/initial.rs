use rand::Rng;
use rand_distr::StandardNormal;

use crate::combinatorics::binomial;
use crate::error::{KacError, Result};
use crate::moments::gaussian_moments;

/// Product initial data: every velocity is drawn independently from the same
/// one-particle law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialCondition {
    /// Centred Gaussian with variance `temperature`.
    Gaussian { temperature: f64 },
    /// Gaussian with the given mean and variance.
    Shifted { mean: f64, temperature: f64 },
    /// With probability `hot_fraction` a Gaussian of variance `t_hot`, else
    /// one of variance `t_cold`.
    TwoTemperature {
        hot_fraction: f64,
        t_hot: f64,
        t_cold: f64,
    },
    /// Uniform on `[-half_width, half_width]`.
    Uniform { half_width: f64 },
}

impl InitialCondition {
    /// Gaussian data carrying mean total energy `k0` over `n` particles.
    pub fn with_energy(k0: f64, n: usize) -> Result<Self> {
        if !(k0 > 0.0) || n == 0 {
            return Err(KacError::invalid(format!("initial energy must be positive, got {k0}")));
        }
        Ok(InitialCondition::Gaussian {
            temperature: 2.0 * k0 / n as f64,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            InitialCondition::Gaussian { temperature } => temperature > 0.0,
            InitialCondition::Shifted { mean, temperature } => mean.is_finite() && temperature > 0.0,
            InitialCondition::TwoTemperature {
                hot_fraction,
                t_hot,
                t_cold,
            } => (0.0..=1.0).contains(&hot_fraction) && t_hot > 0.0 && t_cold > 0.0,
            InitialCondition::Uniform { half_width } => half_width > 0.0,
        };
        if ok && self.second_moment().is_finite() {
            Ok(())
        } else {
            Err(KacError::invalid(format!("bad initial condition {self:?}")))
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            InitialCondition::Gaussian { temperature } => {
                temperature.sqrt() * rng.sample::<f64, _>(StandardNormal)
            }
            InitialCondition::Shifted { mean, temperature } => {
                mean + temperature.sqrt() * rng.sample::<f64, _>(StandardNormal)
            }
            InitialCondition::TwoTemperature {
                hot_fraction,
                t_hot,
                t_cold,
            } => {
                let hot = rng.random::<f64>() < hot_fraction;
                let t = if hot { t_hot } else { t_cold };
                t.sqrt() * rng.sample::<f64, _>(StandardNormal)
            }
            InitialCondition::Uniform { half_width } => rng.random_range(-half_width..half_width),
        }
    }

    pub fn second_moment(&self) -> f64 {
        self.moments(2)[2]
    }

    /// Exact one-particle moments `E[v^k]`, `k = 0..=order`.
    pub fn moments(&self, order: usize) -> Vec<f64> {
        let z = gaussian_moments(order);
        match *self {
            InitialCondition::Gaussian { temperature } => scaled(&z, temperature),
            InitialCondition::Shifted { mean, temperature } => {
                let sd = temperature.sqrt();
                (0..=order)
                    .map(|k| {
                        (0..=k)
                            .map(|j| {
                                binomial(k as u64, j as u64) as f64
                                    * mean.powi((k - j) as i32)
                                    * sd.powi(j as i32)
                                    * z[j]
                            })
                            .sum()
                    })
                    .collect()
            }
            InitialCondition::TwoTemperature {
                hot_fraction,
                t_hot,
                t_cold,
            } => {
                let h = scaled(&z, t_hot);
                let c = scaled(&z, t_cold);
                h.iter()
                    .zip(&c)
                    .map(|(a, b)| hot_fraction * a + (1.0 - hot_fraction) * b)
                    .collect()
            }
            InitialCondition::Uniform { half_width } => (0..=order)
                .map(|k| {
                    if k % 2 == 1 {
                        0.0
                    } else {
                        half_width.powi(k as i32) / (k + 1) as f64
                    }
                })
                .collect(),
        }
    }

    /// One-particle density.
    pub fn density(&self, v: f64) -> f64 {
        match *self {
            InitialCondition::Gaussian { temperature } => normal_pdf(v, 0.0, temperature),
            InitialCondition::Shifted { mean, temperature } => normal_pdf(v, mean, temperature),
            InitialCondition::TwoTemperature {
                hot_fraction,
                t_hot,
                t_cold,
            } => {
                hot_fraction * normal_pdf(v, 0.0, t_hot)
                    + (1.0 - hot_fraction) * normal_pdf(v, 0.0, t_cold)
            }
            InitialCondition::Uniform { half_width } => {
                if v.abs() <= half_width {
                    0.5 / half_width
                } else {
                    0.0
                }
            }
        }
    }
}

/// Moments of `sqrt(var) Z` from those of `Z`; odd ones vanish anyway.
fn scaled(z: &[f64], var: f64) -> Vec<f64> {
    z.iter()
        .enumerate()
        .map(|(k, m)| m * var.powi((k / 2) as i32))
        .collect()
}

pub(crate) fn normal_pdf(v: f64, mean: f64, var: f64) -> f64 {
    let d = v - mean;
    (-0.5 * d * d / var).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}
