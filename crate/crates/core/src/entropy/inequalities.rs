use super::grid::{xlogx, DensityGrid, LOG_FLOOR};
use super::operators::{ou_apply, t_values};
use crate::error::{KacError, Result};

const MASS_TOL: f64 = 1e-8;

/// Both sides of an inequality `lhs <= rhs`; `margin = rhs - lhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

impl InequalityReport {
    fn new(lhs: f64, rhs: f64) -> Self {
        InequalityReport {
            lhs,
            rhs,
            margin: rhs - lhs,
        }
    }

    pub fn holds(&self, slack: f64) -> bool {
        self.margin >= -slack
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermostatReport {
    /// `int g T[G] log G <= (1/2) int g G log G`.
    pub linear: InequalityReport,
    /// `int g T[G] log T[G] <= (1/2) int g G log G`.
    pub entropy: InequalityReport,
}

fn check_mass(ratio: &DensityGrid) -> Result<()> {
    let mass = ratio.mass();
    if (mass - 1.0).abs() > MASS_TOL {
        return Err(KacError::Normalization { mass });
    }
    Ok(())
}

pub fn check_thermostat_entropy_inequality(g_ratio: &DensityGrid) -> Result<ThermostatReport> {
    let r = g_ratio.to_ratio();
    check_mass(&r)?;
    let bath = r.bath();
    let t = t_values(&r.grid, r.beta, &r.values);
    let weighted = |f: &dyn Fn(usize) -> f64| {
        let w: Vec<f64> = (0..r.grid.n).map(|k| bath[k] * f(k)).collect();
        r.grid.trapezoid(&w)
    };
    let half_entropy = 0.5 * weighted(&|k| xlogx(r.values[k]));
    let linear = weighted(&|k| t[k] * r.values[k].max(LOG_FLOOR).ln());
    let t_entropy = weighted(&|k| xlogx(t[k]));
    Ok(ThermostatReport {
        linear: InequalityReport::new(linear, half_entropy),
        entropy: InequalityReport::new(t_entropy, half_entropy),
    })
}

/// `int g P_s[G] log P_s[G] <= e^{-2s} int g G log G`.
pub fn check_ou_contraction(g_ratio: &DensityGrid, s: f64) -> Result<InequalityReport> {
    let r = g_ratio.to_ratio();
    check_mass(&r)?;
    let p = ou_apply(&r, s)?;
    Ok(InequalityReport::new(
        p.ratio_entropy(),
        (-2.0 * s).exp() * r.ratio_entropy(),
    ))
}

/// Probability table of `n` variables with `k` states each, row-major with the
/// last variable fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDensity {
    pub n: usize,
    pub k: usize,
    pub p: Vec<f64>,
}

impl JointDensity {
    pub fn new(n: usize, k: usize, p: Vec<f64>) -> Result<Self> {
        if n < 2 || k < 1 {
            return Err(KacError::invalid("need at least two variables and one state"));
        }
        let size = k.checked_pow(n as u32).filter(|&s| s <= 1 << 24);
        if size != Some(p.len()) {
            return Err(KacError::invalid(format!("table size {} does not match {k}^{n}", p.len())));
        }
        if p.iter().any(|x| !(*x >= 0.0)) {
            return Err(KacError::Domain("negative probability".into()));
        }
        let mass: f64 = p.iter().sum();
        if (mass - 1.0).abs() > 1e-10 {
            return Err(KacError::Normalization { mass });
        }
        Ok(JointDensity { n, k, p })
    }

    /// Product of one-variable tables.
    pub fn product(factors: &[Vec<f64>]) -> Result<Self> {
        let n = factors.len();
        let k = factors.first().map_or(0, Vec::len);
        if factors.iter().any(|f| f.len() != k) {
            return Err(KacError::invalid("factors must have equal length"));
        }
        let mut p = vec![1.0];
        for f in factors {
            p = p.iter().flat_map(|a| f.iter().map(move |b| a * b)).collect();
        }
        Self::new(n, k, p)
    }

    /// Marginal over all variables except `skip`.
    pub fn drop_variable(&self, skip: usize) -> Vec<f64> {
        let stride = self.k.pow((self.n - 1 - skip) as u32);
        let mut out = vec![0.0; self.p.len() / self.k];
        for (idx, &x) in self.p.iter().enumerate() {
            let high = idx / (stride * self.k);
            let low = idx % stride;
            out[high * stride + low] += x;
        }
        out
    }
}

fn neg_entropy(p: &[f64]) -> f64 {
    p.iter().map(|&x| xlogx(x)).sum()
}

/// `sum_j sum p_{-j} log p_{-j} <= (N - 1) sum p log p`, where `p_{-j}` drops
/// variable `j`.
pub fn check_marginal_entropy_inequality(joint: &JointDensity) -> InequalityReport {
    let lhs = (0..joint.n).map(|j| neg_entropy(&joint.drop_variable(j))).sum();
    let rhs = (joint.n - 1) as f64 * neg_entropy(&joint.p);
    InequalityReport::new(lhs, rhs)
}
