//! Model constants shared by every engine.
//!
//! All engines work at unit inverse temperature. A velocity `v` in user units
//! maps to the reduced velocity `u = sqrt(beta) * v`; times are unchanged.

use crate::error::{KacError, Result};

/// Particle number, Kac collision rate, thermostat rate and inverse temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub n_particles: usize,
    pub lambda: f64,
    pub mu: f64,
    pub beta: f64,
}

impl Params {
    pub fn new(n_particles: usize, lambda: f64, mu: f64, beta: f64) -> Result<Self> {
        let p = Params {
            n_particles,
            lambda,
            mu,
            beta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_particles == 0 {
            return Err(KacError::invalid("n_particles must be at least 1"));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(KacError::invalid(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if !(self.mu.is_finite() && self.mu >= 0.0) {
            return Err(KacError::invalid(format!("mu must be >= 0, got {}", self.mu)));
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(KacError::invalid(format!("beta must be > 0, got {}", self.beta)));
        }
        Ok(())
    }

    pub fn with_n(self, n_particles: usize) -> Self {
        Params { n_particles, ..self }
    }

    /// Velocity scale factor `sqrt(beta)` taking user units to reduced units.
    pub fn velocity_scale(&self) -> f64 {
        self.beta.sqrt()
    }

    pub fn to_reduced(&self, v: f64) -> f64 {
        v * self.velocity_scale()
    }

    pub fn from_reduced(&self, u: f64) -> f64 {
        u / self.velocity_scale()
    }

    /// Equilibrium total kinetic energy `N / (2 beta)`.
    pub fn equilibrium_energy(&self) -> f64 {
        self.n_particles as f64 / (2.0 * self.beta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_values() {
        assert!(Params::new(0, 1.0, 1.0, 1.0).is_err());
        assert!(Params::new(3, -1.0, 1.0, 1.0).is_err());
        assert!(Params::new(3, 1.0, f64::NAN, 1.0).is_err());
        assert!(Params::new(3, 1.0, 1.0, 0.0).is_err());
        assert!(Params::new(1, 0.0, 0.0, 2.0).is_ok());
    }

    #[test]
    fn reduced_units_round_trip() {
        let p = Params::new(4, 1.0, 1.0, 4.0).unwrap();
        assert_eq!(p.to_reduced(1.5), 3.0);
        assert_eq!(p.from_reduced(3.0), 1.5);
        assert_eq!(p.equilibrium_energy(), 0.5);
    }
}
