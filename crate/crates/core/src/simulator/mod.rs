//! Exact event-driven simulation of the thermostatted Kac walk.
//!
//! Jumps arrive at total rate `(lambda + mu) N`. A jump is a Kac collision of a
//! uniform pair with probability `lambda / (lambda + mu)` and otherwise a
//! collision of one uniform particle with a fresh Gaussian bath particle.

mod ensemble;
mod initial;
mod observables;

pub use ensemble::{replica_rng, step, Ensemble, Event, EventKind, ReplicaRng};
pub use initial::InitialCondition;
pub(crate) use observables::BinCounts;
pub use observables::{
    empty_series, fit_cooling_rate, record, run, uniform_grid, Histogram, ObservableSeries,
    DEFAULT_BINS, MOMENT_ORDER,
};
