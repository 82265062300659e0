use super::config::{RunConfig, Verb};
use super::csv::{Cell, Table};
use crate::boltzmann::{integrate_moments, MomentVector};
use crate::chaos::{chaos_metric_samples, compare_to_boltzmann};
use crate::entropy::entropy_decay_experiment;
use crate::error::Result;
use crate::generator::{first_gap, second_gap, sector_gap_bound};
use crate::moments::kac_gap_lambda;
use crate::simulator::{run, uniform_grid, Ensemble, MOMENT_ORDER};

/// A table and the suffix of the file it goes to; `None` is the main output.
pub struct Output {
    pub suffix: Option<&'static str>,
    pub table: Table,
}

fn main(table: Table) -> Output {
    Output { suffix: None, table }
}

pub fn execute(cfg: &RunConfig) -> Result<Vec<Output>> {
    match cfg.verb {
        Verb::Simulate => simulate(cfg),
        Verb::Spectrum => spectrum(cfg).map(|t| vec![main(t)]),
        Verb::Boltzmann => boltzmann(cfg).map(|t| vec![main(t)]),
        Verb::Entropy => entropy(cfg).map(|t| vec![main(t)]),
        Verb::Chaos => chaos(cfg),
    }
}

fn simulate(cfg: &RunConfig) -> Result<Vec<Output>> {
    let grid = uniform_grid(cfg.horizon, cfg.samples)?;
    let s = run(&cfg.params, cfg.init, cfg.replicas, &grid, cfg.seed)?;
    let mut cols = vec!["time".to_string(), "K".into(), "T".into()];
    cols.extend((1..=MOMENT_ORDER).map(|k| format!("m{k}")));
    let mut table = Table {
        columns: cols,
        rows: Vec::new(),
    };
    let temp = s.temperature();
    for k in 0..s.len() {
        let mut row: Vec<Cell> = vec![s.times[k].into(), s.kinetic_energy[k].into(), temp[k].into()];
        row.extend(s.moments[k].iter().map(|&m| Cell::from(m)));
        table.push(row);
    }
    let mut hist = Table::new(&["bin_left", "bin_right", "mass"]);
    if let Some(h) = s.histograms.last() {
        for b in 0..h.bins() {
            let (l, r) = h.edges(b);
            hist.push(vec![l.into(), r.into(), h.masses[b].into()]);
        }
    }
    Ok(vec![
        main(table),
        Output {
            suffix: Some("histogram"),
            table: hist,
        },
    ])
}

fn spectrum(cfg: &RunConfig) -> Result<Table> {
    let p = &cfg.params;
    let mut t = Table::new(&["N", "lambda", "mu", "route", "value"]);
    let mut put = |route: &str, value: f64| {
        t.push(vec![p.n_particles.into(), p.lambda.into(), p.mu.into(), route.into(), value.into()]);
    };
    let first = first_gap(p)?;
    put("first_gap:closed", first.value);
    put("first_gap:eigensolve", first.eigensolve);
    let second = second_gap(p)?;
    put("second_gap:quadratic", second.quadratic);
    put("second_gap:matrix", second.matrix);
    put("second_gap:assembled", second.assembled);
    put("second_gap:upper_root", second.upper_root);
    put("second_gap:limit", second.limit);
    if let Some(x) = second.nonsymmetric {
        put("second_gap:nonsymmetric", x);
    }
    put("kac_gap:closed", kac_gap_lambda(p.n_particles)?);
    for l in [3, 4] {
        let route = format!("sector_bound:l{l}");
        put(&route, sector_gap_bound(l, p)?);
    }
    Ok(t)
}

fn boltzmann(cfg: &RunConfig) -> Result<Table> {
    let m0 = MomentVector::new(cfg.init.moments(cfg.order))?;
    let dt = cfg.horizon / (cfg.samples - 1) as f64;
    let out = integrate_moments(&m0, &cfg.params, cfg.horizon, dt)?;
    let mut cols = vec!["time".to_string()];
    cols.extend((1..=cfg.order).map(|k| format!("m{k}")));
    let mut t = Table {
        columns: cols,
        rows: Vec::new(),
    };
    for mv in out {
        let mut row = vec![Cell::from(mv.time)];
        row.extend(mv.m[1..].iter().map(|&x| Cell::from(x)));
        t.push(row);
    }
    Ok(t)
}

fn entropy(cfg: &RunConfig) -> Result<Table> {
    let grid = uniform_grid(cfg.horizon, cfg.samples)?;
    let r = entropy_decay_experiment(&cfg.params, cfg.init, &grid, cfg.replicas, cfg.seed)?;
    let mut t = Table::new(&["t", "S_estimate", "S_error", "bound"]);
    for k in 0..r.times.len() {
        t.push(vec![
            r.times[k].into(),
            r.estimate[k].into(),
            r.stderr[k].into(),
            r.bound[k].into(),
        ]);
    }
    Ok(t)
}

fn chaos(cfg: &RunConfig) -> Result<Vec<Output>> {
    let grid = uniform_grid(cfg.horizon, cfg.samples)?;
    let mut t = Table::new(&["N", "t", "metric", "stderr"]);
    for &n in &cfg.ns {
        let mut ens = Ensemble::new(cfg.params.with_n(n), cfg.init, cfg.replicas, cfg.seed)?;
        for &time in &grid {
            ens.advance_to(time)?;
            let e = chaos_metric_samples(&ens)?;
            t.push(vec![n.into(), time.into(), e.metric.into(), e.stderr.into()]);
        }
    }
    let mut out = vec![main(t)];
    if cfg.compare {
        let cmp = compare_to_boltzmann(
            &cfg.params,
            cfg.init,
            cfg.horizon,
            cfg.samples,
            cfg.replicas,
            &cfg.ns,
            cfg.seed,
        )?;
        let mut m = Table::new(&["N", "time", "order", "simulated", "stderr", "limit"]);
        for c in &cmp {
            for k in 0..c.times.len() {
                for j in 0..MOMENT_ORDER {
                    m.push(vec![
                        c.n_particles.into(),
                        c.times[k].into(),
                        (j + 1).into(),
                        c.simulated[k][j].into(),
                        c.stderr[k][j].into(),
                        c.limit[k][j].into(),
                    ]);
                }
            }
        }
        out.push(Output {
            suffix: Some("moments"),
            table: m,
        });
    }
    Ok(out)
}
