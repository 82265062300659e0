//! Relative entropy with respect to the bath Gaussian: grid quadrature, a
//! histogram estimator for simulator output, the Ornstein-Uhlenbeck and
//! thermostat averaging operators, and the inequalities built on them.
//!
//! Only one-particle quantities are estimated from samples. The `N`-body
//! entropy is out of reach at these sample sizes, so the decay experiment
//! checks `N S(f_1 | g)`, which the full entropy dominates for product
//! reference measures.

mod experiment;
mod grid;
mod inequalities;
mod operators;
mod samples;

pub use experiment::{entropy_decay_experiment, initial_entropy, EntropySeries};
pub use grid::{
    bath_density, default_grid, relative_entropy_fn, relative_entropy_grid, xlogx, DensityGrid, DensityKind,
    DEFAULT_POINTS, LOG_FLOOR,
};
pub use inequalities::{
    check_marginal_entropy_inequality, check_ou_contraction, check_thermostat_entropy_inequality,
    InequalityReport, JointDensity, ThermostatReport,
};
pub use operators::{
    ou_apply, ou_values, t_apply, t_apply_fn, t_bar, t_bar_fn, t_bar_values, t_values, OU_NODES, THETA_NODES,
};
pub use samples::{relative_entropy_samples, relative_entropy_samples_with, EntropyEstimate, EstimatorOptions, MIN_SAMPLES};
