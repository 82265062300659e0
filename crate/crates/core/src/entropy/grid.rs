use crate::error::{KacError, Result};
use crate::quadrature::{gauss_legendre, UniformGrid};

pub const DEFAULT_POINTS: usize = 2048;
const NORMALIZATION_TOL: f64 = 1e-10;
/// Floor applied before taking logarithms.
pub const LOG_FLOOR: f64 = 1e-300;

/// Bath density `g` at inverse temperature `beta`.
pub fn bath_density(v: f64, beta: f64) -> f64 {
    (beta / (2.0 * std::f64::consts::PI)).sqrt() * (-0.5 * beta * v * v).exp()
}

/// `x log x` with `0 log 0 = 0`.
pub fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.max(LOG_FLOOR).ln()
    }
}

pub fn default_grid(beta: f64) -> UniformGrid {
    UniformGrid::new(8.0 / beta.sqrt(), DEFAULT_POINTS)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityKind {
    /// A probability density `f`.
    Density,
    /// The ratio `G = f / g`.
    Ratio,
}

/// Grid values of a one-particle density or of its ratio to the bath density.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub grid: UniformGrid,
    pub beta: f64,
    pub kind: DensityKind,
    pub values: Vec<f64>,
}

impl DensityGrid {
    /// Checked constructor: values must be nonnegative and integrate to one
    /// (against `g` for ratios) by the trapezoid rule.
    pub fn new(grid: UniformGrid, beta: f64, kind: DensityKind, values: Vec<f64>) -> Result<Self> {
        let d = Self::unchecked(grid, beta, kind, values)?;
        let mass = d.mass();
        if (mass - 1.0).abs() > NORMALIZATION_TOL {
            return Err(KacError::Normalization { mass });
        }
        Ok(d)
    }

    /// Sample `h` on the grid and rescale so the mass is exactly one. Fails if
    /// the sampled mass is off by more than `1e-6`, which means the grid
    /// truncates too much of the density.
    pub fn from_fn(grid: UniformGrid, beta: f64, kind: DensityKind, h: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().into_iter().map(h).collect();
        let mut d = Self::unchecked(grid, beta, kind, values)?;
        let mass = d.mass();
        if (mass - 1.0).abs() > 1e-6 {
            return Err(KacError::Normalization { mass });
        }
        for x in d.values.iter_mut() {
            *x /= mass;
        }
        Ok(d)
    }

    pub(crate) fn unchecked(grid: UniformGrid, beta: f64, kind: DensityKind, values: Vec<f64>) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(KacError::invalid("beta must be positive"));
        }
        if values.len() != grid.n {
            return Err(KacError::invalid("value count does not match the grid"));
        }
        if let Some(x) = values.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
            return Err(KacError::Domain(format!("density value {x} is not a finite nonnegative number")));
        }
        Ok(DensityGrid {
            grid,
            beta,
            kind,
            values,
        })
    }

    pub fn bath(&self) -> Vec<f64> {
        self.grid
            .nodes()
            .into_iter()
            .map(|v| bath_density(v, self.beta))
            .collect()
    }

    /// `int f` for densities, `int g G` for ratios.
    pub fn mass(&self) -> f64 {
        match self.kind {
            DensityKind::Density => self.grid.trapezoid(&self.values),
            DensityKind::Ratio => {
                let w: Vec<f64> = self.values.iter().zip(self.bath()).map(|(h, g)| h * g).collect();
                self.grid.trapezoid(&w)
            }
        }
    }

    pub fn to_ratio(&self) -> DensityGrid {
        match self.kind {
            DensityKind::Ratio => self.clone(),
            DensityKind::Density => DensityGrid {
                values: self.values.iter().zip(self.bath()).map(|(f, g)| f / g).collect(),
                kind: DensityKind::Ratio,
                ..self.clone()
            },
        }
    }

    pub fn to_density(&self) -> DensityGrid {
        match self.kind {
            DensityKind::Density => self.clone(),
            DensityKind::Ratio => DensityGrid {
                values: self.values.iter().zip(self.bath()).map(|(h, g)| h * g).collect(),
                kind: DensityKind::Density,
                ..self.clone()
            },
        }
    }

    /// `int g G log G`, the relative entropy of `gG` with respect to `g`.
    pub fn ratio_entropy(&self) -> f64 {
        let r = self.to_ratio();
        let w: Vec<f64> = r.values.iter().zip(r.bath()).map(|(h, g)| g * xlogx(*h)).collect();
        self.grid.trapezoid(&w)
    }
}

/// `S(f | g) = int f log(f / g)` by the trapezoid rule on the grid.
pub fn relative_entropy_grid(f: &DensityGrid) -> f64 {
    let d = f.to_density();
    let beta = f.beta;
    let w: Vec<f64> = d
        .grid
        .nodes()
        .into_iter()
        .zip(&d.values)
        .map(|(v, &p)| {
            if p <= 0.0 {
                0.0
            } else {
                p * (p.max(LOG_FLOOR).ln() - bath_density(v, beta).max(LOG_FLOOR).ln())
            }
        })
        .collect();
    d.grid.trapezoid(&w)
}

/// `S(f | g)` for a density given as a function, by composite Gauss-Legendre
/// on `[-half_width, half_width]`.
pub fn relative_entropy_fn(f: impl Fn(f64) -> f64, beta: f64, half_width: f64) -> f64 {
    let panels = 200;
    let h = 2.0 * half_width / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let a = -half_width + k as f64 * h;
        let rule = gauss_legendre(16, a, a + h);
        total += rule.integrate(|v| {
            let p = f(v);
            if p <= 0.0 {
                0.0
            } else {
                // log g written out so the far tails do not underflow
                let log_g = 0.5 * (beta / (2.0 * std::f64::consts::PI)).ln() - 0.5 * beta * v * v;
                p * (p.max(LOG_FLOOR).ln() - log_g)
            }
        });
    }
    total
}
