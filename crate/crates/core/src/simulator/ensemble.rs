use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;

use super::initial::InitialCondition;
use crate::error::{KacError, Result};
use crate::params::Params;

/// Random stream owned by one replica.
pub type ReplicaRng = ChaCha20Rng;

/// Stream `index` of the ChaCha generator keyed by `seed`. Streams are
/// disjoint, so replica `r` draws the same numbers no matter how many other
/// replicas exist or which thread runs it.
pub fn replica_rng(seed: u64, index: u64) -> ReplicaRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Event {
    Kac { i: usize, j: usize, theta: f64 },
    Thermostat { j: usize, theta: f64, w: f64 },
}

impl Event {
    pub fn apply(&self, v: &mut [f64]) {
        match *self {
            Event::Kac { i, j, theta } => {
                let (s, c) = theta.sin_cos();
                let (a, b) = (v[i], v[j]);
                v[i] = a * c + b * s;
                v[j] = -a * s + b * c;
            }
            Event::Thermostat { j, theta, w } => {
                let (s, c) = theta.sin_cos();
                v[j] = v[j] * c + w * s;
            }
        }
    }
}

fn check_rates(params: &Params) -> Result<()> {
    params.validate()?;
    if params.lambda + params.mu <= 0.0 {
        return Err(KacError::NoEvents);
    }
    if params.lambda > 0.0 && params.n_particles < 2 {
        return Err(KacError::invalid("Kac collisions need N >= 2"));
    }
    Ok(())
}

fn total_rate(params: &Params) -> f64 {
    (params.lambda + params.mu) * params.n_particles as f64
}

fn draw_wait<R: Rng + ?Sized>(params: &Params, rng: &mut R) -> f64 {
    rng.sample::<f64, _>(Exp1) / total_rate(params)
}

fn draw_kac<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Event {
    let i = rng.random_range(0..n);
    let mut j = rng.random_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    Event::Kac {
        i,
        j,
        theta: rng.random::<f64>() * TAU,
    }
}

fn draw_thermostat<R: Rng + ?Sized>(n: usize, beta: f64, rng: &mut R) -> Event {
    let j = rng.random_range(0..n);
    let w = rng.sample::<f64, _>(StandardNormal) / beta.sqrt();
    Event::Thermostat {
        j,
        theta: rng.random::<f64>() * TAU,
        w,
    }
}

fn draw_event<R: Rng + ?Sized>(params: &Params, rng: &mut R) -> Event {
    let n = params.n_particles;
    let p_kac = params.lambda / (params.lambda + params.mu);
    if rng.random::<f64>() < p_kac {
        draw_kac(n, rng)
    } else {
        draw_thermostat(n, params.beta, rng)
    }
}

/// One jump of the chain: returns the holding time before the jump and the
/// event that was applied to `state`.
pub fn step<R: Rng + ?Sized>(state: &mut [f64], params: &Params, rng: &mut R) -> Result<(f64, Event)> {
    check_rates(params)?;
    if state.len() != params.n_particles {
        return Err(KacError::invalid(format!(
            "state has {} velocities, params say N = {}",
            state.len(),
            params.n_particles
        )));
    }
    let wait = draw_wait(params, rng);
    let event = draw_event(params, rng);
    event.apply(state);
    Ok((wait, event))
}

#[derive(Debug, Clone)]
struct Replica {
    v: Vec<f64>,
    /// Time of the next jump. Fixed in advance, so a trajectory does not
    /// depend on where it is observed.
    next_event: f64,
    rng: ReplicaRng,
}

impl Replica {
    fn advance_to(&mut self, t: f64, params: &Params) {
        while self.next_event <= t {
            let e = draw_event(params, &mut self.rng);
            e.apply(&mut self.v);
            self.next_event += draw_wait(params, &mut self.rng);
        }
    }
}

/// `M` independent copies of the `N`-particle system sharing one clock.
#[derive(Debug, Clone)]
pub struct Ensemble {
    params: Params,
    time: f64,
    replicas: Vec<Replica>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Kac,
    Thermostat,
}

impl Ensemble {
    pub fn new(params: Params, init: InitialCondition, replicas: usize, seed: u64) -> Result<Self> {
        init.validate()?;
        Self::from_sampler(params, replicas, seed, |rng, _| init.sample(rng))
    }

    /// Initial velocities from `sampler(rng, particle_index)`.
    pub fn from_sampler<F>(params: Params, replicas: usize, seed: u64, sampler: F) -> Result<Self>
    where
        F: Fn(&mut ReplicaRng, usize) -> f64 + Sync,
    {
        check_rates(&params)?;
        if replicas == 0 {
            return Err(KacError::invalid("need at least one replica"));
        }
        let n = params.n_particles;
        let replicas = (0..replicas)
            .into_par_iter()
            .map(|r| {
                let mut rng = replica_rng(seed, r as u64);
                let v: Vec<f64> = (0..n).map(|i| sampler(&mut rng, i)).collect();
                let next_event = draw_wait(&params, &mut rng);
                Replica { v, next_event, rng }
            })
            .collect();
        Ok(Ensemble {
            params,
            time: 0.0,
            replicas,
        })
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn len(&self) -> usize {
        self.replicas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.replicas.is_empty()
    }

    pub fn velocities(&self, replica: usize) -> &[f64] {
        &self.replicas[replica].v
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.replicas.iter().map(|r| r.v.as_slice())
    }

    /// Run every replica forward to time `t`.
    pub fn advance_to(&mut self, t: f64) -> Result<()> {
        if !(t >= self.time) || !t.is_finite() {
            return Err(KacError::invalid(format!(
                "cannot move the ensemble from t = {} to t = {t}",
                self.time
            )));
        }
        let params = self.params;
        self.replicas
            .par_iter_mut()
            .for_each(|r| r.advance_to(t, &params));
        self.time = t;
        Ok(())
    }

    /// Apply one extra event of the given kind to every replica at the current
    /// time, outside the Poisson clock.
    pub fn force_event(&mut self, kind: EventKind) -> Result<()> {
        let params = self.params;
        if kind == EventKind::Kac && params.n_particles < 2 {
            return Err(KacError::invalid("a Kac collision needs N >= 2"));
        }
        self.replicas.par_iter_mut().for_each(|r| {
            let e = match kind {
                EventKind::Kac => draw_kac(params.n_particles, &mut r.rng),
                EventKind::Thermostat => draw_thermostat(params.n_particles, params.beta, &mut r.rng),
            };
            e.apply(&mut r.v);
        });
        Ok(())
    }
}
