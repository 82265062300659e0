//! Moment hierarchy of the limiting one-particle Boltzmann equation.
//!
//! Integrating `v^n` against the kinetic equation gives
//!
//! ```text
//! dm_n/dt = 2 lambda [sum_k C(n,k) A(k, n-k) m_k m_{n-k} - m_n]
//!         +     mu   [sum_k C(n,k) A(k, n-k) m_k g_{n-k} - m_n]
//! ```
//!
//! with `A(p, q)` the angular average of `cos^p sin^q` and `g_j` the moments of
//! the bath Gaussian. The right side only involves `m_0..m_n`, so the system
//! truncates exactly at any order.

use crate::combinatorics::binomial;
use crate::error::{KacError, Result};
use crate::linalg::symmetric_eigen;
use crate::moments::{angular_moment, gaussian_moments, hermite_eigenvalue_s};
use crate::params::Params;
use nalgebra::DMatrix;

pub const DEFAULT_ORDER: usize = 8;
/// Local error allowance per unit time for the adaptive integrator.
pub const STEP_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector {
    pub time: f64,
    /// `m[k] = E[v^k]`, `k = 0..=order`.
    pub m: Vec<f64>,
}

impl MomentVector {
    pub fn new(m: Vec<f64>) -> Result<Self> {
        if m.is_empty() || (m[0] - 1.0).abs() > 1e-12 {
            return Err(KacError::invalid("moment vectors start with m_0 = 1"));
        }
        Ok(MomentVector { time: 0.0, m })
    }

    /// Moments of the Gaussian with variance `1/beta`.
    pub fn gaussian(order: usize, beta: f64) -> Self {
        MomentVector {
            time: 0.0,
            m: bath_moments(order, beta),
        }
    }

    pub fn order(&self) -> usize {
        self.m.len() - 1
    }
}

pub fn bath_moments(order: usize, beta: f64) -> Vec<f64> {
    gaussian_moments(order)
        .into_iter()
        .enumerate()
        .map(|(j, g)| if j % 2 == 1 { 0.0 } else { g / beta.powi((j / 2) as i32) })
        .collect()
}

/// Collision and bath coefficients `C(n,k) A(k, n-k)`, indexed `[n][k]`.
struct Coefficients {
    c: Vec<Vec<f64>>,
    g: Vec<f64>,
}

impl Coefficients {
    fn new(order: usize, beta: f64) -> Self {
        let c = (0..=order)
            .map(|n| {
                (0..=n)
                    .map(|k| binomial(n as u64, k as u64) as f64 * angular_moment(k as u32, (n - k) as u32))
                    .collect()
            })
            .collect();
        Coefficients {
            c,
            g: bath_moments(order, beta),
        }
    }

    fn rhs(&self, m: &[f64], lambda: f64, mu: f64, out: &mut [f64]) {
        for n in 0..m.len() {
            let (mut coll, mut bath) = (0.0, 0.0);
            for k in 0..=n {
                let c = self.c[n][k];
                if c == 0.0 {
                    continue;
                }
                coll += c * m[k] * m[n - k];
                bath += c * m[k] * self.g[n - k];
            }
            out[n] = 2.0 * lambda * (coll - m[n]) + mu * (bath - m[n]);
        }
    }
}

pub fn moment_rhs(m: &MomentVector, params: &Params) -> Result<Vec<f64>> {
    params.validate()?;
    if (m.m[0] - 1.0).abs() > 1e-12 {
        return Err(KacError::invalid("moment_rhs needs m_0 = 1"));
    }
    let co = Coefficients::new(m.order(), params.beta);
    let mut out = vec![0.0; m.m.len()];
    co.rhs(&m.m, params.lambda, params.mu, &mut out);
    Ok(out)
}

/// `2 lambda (1 - 2 s_n) + mu (1 - s_n)`.
pub fn linearized_eigenvalue(n: u32, params: &Params) -> Result<f64> {
    if n == 0 {
        return Err(KacError::invalid("the linearized spectrum starts at n = 1"));
    }
    let s = hermite_eigenvalue_s(n);
    Ok(2.0 * params.lambda * (1.0 - 2.0 * s) + params.mu * (1.0 - s))
}

fn rk4(co: &Coefficients, y: &[f64], h: f64, lambda: f64, mu: f64) -> Vec<f64> {
    let n = y.len();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    co.rhs(y, lambda, mu, &mut k1);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k1[i];
    }
    co.rhs(&tmp, lambda, mu, &mut k2);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k2[i];
    }
    co.rhs(&tmp, lambda, mu, &mut k3);
    for i in 0..n {
        tmp[i] = y[i] + h * k3[i];
    }
    co.rhs(&tmp, lambda, mu, &mut k4);
    (0..n)
        .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// Smallest eigenvalue of the Hankel matrix `[m_{i+j}]`, relative to its
/// largest entry.
pub fn hankel_margin(m: &[f64]) -> f64 {
    let k = (m.len() - 1) / 2;
    let h = DMatrix::from_fn(k + 1, k + 1, |i, j| m[i + j]);
    let scale = h.amax().max(1e-300);
    symmetric_eigen(&h).smallest() / scale
}

/// Integrate from `m0` to `horizon`, reporting every `dt`. Internally RK4 with
/// step doubling keeps the local error below [`STEP_TOLERANCE`] per unit time.
pub fn integrate_moments(m0: &MomentVector, params: &Params, horizon: f64, dt: f64) -> Result<Vec<MomentVector>> {
    params.validate()?;
    if !(dt > 0.0) || !(horizon >= 0.0) {
        return Err(KacError::invalid("integrate_moments needs dt > 0 and horizon >= 0"));
    }
    if (m0.m[0] - 1.0).abs() > 1e-12 {
        return Err(KacError::invalid("initial moments need m_0 = 1"));
    }
    let co = Coefficients::new(m0.order(), params.beta);
    let (lambda, mu) = (params.lambda, params.mu);
    let rate = 2.0 * lambda + mu;
    let mut h = if rate > 0.0 { (0.05 / rate).min(dt) } else { dt };

    let steps = (horizon / dt).round() as usize;
    let mut out = Vec::with_capacity(steps + 1);
    let mut y = m0.m.clone();
    let mut t = m0.time;
    check_hankel(&y, t)?;
    out.push(MomentVector { time: t, m: y.clone() });
    for s in 1..=steps {
        let target = m0.time + s as f64 * dt;
        while t < target {
            let last = target - t <= h * (1.0 + 1e-12);
            let step = if last { target - t } else { h };
            let full = rk4(&co, &y, step, lambda, mu);
            let half = rk4(&co, &y, 0.5 * step, lambda, mu);
            let two = rk4(&co, &half, 0.5 * step, lambda, mu);
            let mut ratio: f64 = 0.0;
            for i in 0..y.len() {
                let err = (two[i] - full[i]).abs() / 15.0;
                let tol = STEP_TOLERANCE * step * two[i].abs().max(1.0);
                ratio = ratio.max(err / tol);
            }
            if ratio <= 1.0 {
                // Richardson extrapolation of the two half steps
                y = two
                    .iter()
                    .zip(&full)
                    .map(|(a, b)| a + (a - b) / 15.0)
                    .collect();
                t = if last { target } else { t + step };
            }
            if step < 1e-14 {
                return Err(KacError::IntegrationFailure {
                    time: t,
                    detail: "step size underflow".into(),
                });
            }
            let grow = if ratio == 0.0 { 4.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 4.0) };
            if !last || ratio > 1.0 {
                h = step * grow;
            }
        }
        check_hankel(&y, t)?;
        out.push(MomentVector { time: t, m: y.clone() });
    }
    Ok(out)
}

fn check_hankel(m: &[f64], t: f64) -> Result<()> {
    if m.iter().any(|x| !x.is_finite()) {
        return Err(KacError::IntegrationFailure {
            time: t,
            detail: "non-finite moment".into(),
        });
    }
    let margin = hankel_margin(m);
    if margin < -1e-10 {
        return Err(KacError::IntegrationFailure {
            time: t,
            detail: format!("moment matrix lost positivity (relative margin {margin:e})"),
        });
    }
    Ok(())
}
