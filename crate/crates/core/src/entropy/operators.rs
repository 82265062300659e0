//! Ornstein-Uhlenbeck semigroup and the one-particle thermostat average,
//! applied to functions tabulated on a uniform grid.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;

use super::grid::{DensityGrid, DensityKind};
use crate::error::{KacError, Result};
use crate::quadrature::{gauss_hermite, gauss_legendre, periodic_average, Rule, UniformGrid};

pub const OU_NODES: usize = 32;
pub const THETA_NODES: usize = 256;
const QUARTER_NODES: usize = 128;

/// Gauss rule for the bath Gaussian at inverse temperature `beta`.
fn bath_rule(beta: f64) -> Rule {
    let mut r = gauss_hermite(OU_NODES);
    let scale = 1.0 / beta.sqrt();
    for x in r.nodes.iter_mut() {
        *x *= scale;
    }
    r
}

/// `P_s h(v) = int g(w) h(e^{-s} v + sqrt(1 - e^{-2s}) w) dw` at every node.
///
/// When the smoothing kernel spans several grid steps the integral is a sum
/// over the grid values themselves, with kernel mass falling off the grid
/// given to the nearest endpoint value. Shorter times use the Gauss rule in
/// `w` with `h` interpolated.
pub fn ou_values(grid: &UniformGrid, beta: f64, values: &[f64], s: f64) -> Vec<f64> {
    if s == 0.0 {
        return values.to_vec();
    }
    let a = (-s).exp();
    let c = (-(-2.0 * s).exp_m1()).sqrt();
    let sd = c / beta.sqrt();
    let h = grid.step();
    if sd < 4.0 * h {
        let rule = bath_rule(beta);
        return grid
            .nodes()
            .par_iter()
            .map(|&v| rule.integrate(|w| grid.interpolate(values, a * v + c * w)))
            .collect();
    }
    let norm = h / (sd * (2.0 * std::f64::consts::PI).sqrt());
    let reach = 14.0 * sd;
    grid.nodes()
        .par_iter()
        .map(|&v| {
            let centre = a * v;
            let lo = ((centre - reach - grid.node(0)) / h).floor().max(0.0) as usize;
            let hi = (((centre + reach - grid.node(0)) / h).ceil() as usize).min(grid.n - 1);
            let (mut acc, mut weight) = (0.0, 0.0);
            for (j, y) in values.iter().enumerate().take(hi + 1).skip(lo) {
                let z = (grid.node(j) - centre) / sd;
                let k = norm * (-0.5 * z * z).exp();
                acc += k * y;
                weight += k;
            }
            let edge = if centre < 0.0 { values[0] } else { values[grid.n - 1] };
            acc + (1.0 - weight) * edge
        })
        .collect()
}

pub fn ou_apply(ratio: &DensityGrid, s: f64) -> Result<DensityGrid> {
    if !(s >= 0.0) {
        return Err(KacError::invalid(format!("OU time must be nonnegative, got {s}")));
    }
    let r = ratio.to_ratio();
    let values = ou_values(&r.grid, r.beta, &r.values, s);
    DensityGrid::unchecked(r.grid.clone(), r.beta, DensityKind::Ratio, values)
}

/// `int g(w) avg_theta h(v cos theta + w sin theta) dw` for a function `h`,
/// with the angle averaged by `angles`.
fn thermostat_point(h: &impl Fn(f64) -> f64, v: f64, bath: &Rule, angles: &Rule) -> f64 {
    let trig: Vec<(f64, f64)> = angles.nodes.iter().map(|t| t.sin_cos()).collect();
    bath.integrate(|w| {
        trig.iter()
            .zip(&angles.weights)
            .map(|(&(s, c), &wt)| wt * h(v * c + w * s))
            .sum()
    })
}

/// `T[h](v)` with the angle averaged over a full period.
pub fn t_apply_fn(h: impl Fn(f64) -> f64, v: f64, beta: f64) -> f64 {
    thermostat_point(&h, v, &bath_rule(beta), &periodic_average(THETA_NODES))
}

/// Same average with the angle restricted to a quarter period.
pub fn t_bar_fn(h: impl Fn(f64) -> f64, v: f64, beta: f64) -> f64 {
    thermostat_point(&h, v, &bath_rule(beta), &quarter_rule())
}

fn quarter_rule() -> Rule {
    let mut r = gauss_legendre(QUARTER_NODES, 0.0, FRAC_PI_2);
    for w in r.weights.iter_mut() {
        *w /= FRAC_PI_2;
    }
    r
}

fn tabulated(grid: &UniformGrid, beta: f64, values: &[f64], angles: Rule) -> Vec<f64> {
    let bath = bath_rule(beta);
    let h = |x: f64| grid.interpolate(values, x);
    grid.nodes()
        .par_iter()
        .map(|&v| thermostat_point(&h, v, &bath, &angles))
        .collect()
}

pub fn t_values(grid: &UniformGrid, beta: f64, values: &[f64]) -> Vec<f64> {
    tabulated(grid, beta, values, periodic_average(THETA_NODES))
}

pub fn t_bar_values(grid: &UniformGrid, beta: f64, values: &[f64]) -> Vec<f64> {
    tabulated(grid, beta, values, quarter_rule())
}

pub fn t_apply(ratio: &DensityGrid) -> Result<DensityGrid> {
    let r = ratio.to_ratio();
    let values = t_values(&r.grid, r.beta, &r.values);
    DensityGrid::unchecked(r.grid.clone(), r.beta, DensityKind::Ratio, values)
}

pub fn t_bar(ratio: &DensityGrid) -> Result<DensityGrid> {
    let r = ratio.to_ratio();
    let values = t_bar_values(&r.grid, r.beta, &r.values);
    DensityGrid::unchecked(r.grid.clone(), r.beta, DensityKind::Ratio, values)
}
