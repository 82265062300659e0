use nalgebra::{DMatrix, DVector};

use super::assemble::{build_full, direct_sum};
use super::basis::SectorBasis;
use crate::combinatorics::binomial;
use crate::error::{KacError, Result};
use crate::linalg::symmetric_eigen;
use crate::moments::{hermite_eigenvalue_s, kac_gap_lambda, sphere_moment_from_parts};
use crate::params::Params;

const AGREEMENT_TOL: f64 = 1e-10;

/// Smaller root of `x^2 - b x + c = 0`, in the form that does not cancel.
pub fn lower_root(b: f64, c: f64) -> f64 {
    let disc = (b * b - 4.0 * c).max(0.0);
    let denom = b + disc.sqrt();
    if denom == 0.0 {
        0.0
    } else {
        2.0 * c / denom
    }
}

fn upper_root(b: f64, c: f64) -> f64 {
    let disc = (b * b - 4.0 * c).max(0.0);
    0.5 * (b + disc.sqrt())
}

fn check_agreement(what: &str, expected: f64, got: f64) -> Result<()> {
    let tol = AGREEMENT_TOL * expected.abs().max(1.0);
    if (expected - got).abs() > tol || !got.is_finite() {
        return Err(KacError::AssemblyMismatch {
            what: what.to_string(),
            expected,
            got,
            tolerance: tol,
        });
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct FirstGap {
    /// `mu / 2`.
    pub value: f64,
    /// Smallest eigenvalue of the assembled operator on symmetric `L_2 + L_4`.
    pub eigensolve: f64,
    /// The energy mode `sum_i H_2(u_i)`, normalized, in the coordinates of
    /// symmetric `L_2 + L_4` (first coordinate is the `L_2` orbit).
    pub eigenvector: DVector<f64>,
    /// `|<solver eigenvector, energy mode>|`, or `None` when the lowest level
    /// is degenerate and the solver's choice of vector is arbitrary.
    pub overlap: Option<f64>,
}

pub fn first_gap(params: &Params) -> Result<FirstGap> {
    params.validate()?;
    let n = params.n_particles;
    if n < 2 {
        return Err(KacError::invalid("the first gap needs N >= 2"));
    }
    let l2 = build_full(&SectorBasis::symmetric(n, 1)?, params)?;
    let l4 = build_full(&SectorBasis::symmetric(n, 2)?, params)?;
    let m = direct_sum(&[l2, l4]);
    let eig = symmetric_eigen(&m);
    let value = 0.5 * params.mu;

    let mut energy = DVector::zeros(m.nrows());
    energy[0] = 1.0;
    check_agreement("first gap eigensolve", value, eig.smallest())?;
    let resid = (&m * &energy - value * &energy).amax();
    check_agreement("first gap eigenvector residual", 0.0, resid)?;

    let separated = eig.values.len() < 2 || eig.values[1] - eig.values[0] > 1e-8;
    let overlap = separated.then(|| eig.vector(0).dot(&energy).abs());
    if let Some(o) = overlap {
        check_agreement("first gap eigenvector overlap", 1.0, o)?;
    }
    Ok(FirstGap {
        value,
        eigensolve: eig.smallest(),
        eigenvector: energy,
        overlap,
    })
}

/// `min{lambda/2 + 5 mu/8, mu}`.
pub fn second_gap_limit(lambda: f64, mu: f64) -> f64 {
    (0.5 * lambda + 0.625 * mu).min(mu)
}

/// Coefficients `(b, c)` of `x^2 - b x + c` whose lower root is the second gap.
pub fn second_gap_quadratic(params: &Params) -> Result<(f64, f64)> {
    let n = params.n_particles as f64;
    let ll = params.lambda * kac_gap_lambda(params.n_particles)?;
    let mu = params.mu;
    let b = ll + 13.0 / 8.0 * mu;
    let c = mu * (ll + 5.0 / 8.0 * mu) - 3.0 / 8.0 * ll * mu * 3.0 / (n + 2.0);
    Ok((b, c))
}

/// The two-by-two block of the full operator on symmetric `L_4`, in the order
/// (pair products, fourth powers).
pub fn second_gap_matrix(params: &Params) -> DMatrix<f64> {
    let (lambda, mu) = (params.lambda, params.mu);
    let n1 = params.n_particles as f64 - 1.0;
    let off = -(3.0f64).sqrt() * lambda / (2.0 * n1.sqrt());
    DMatrix::from_row_slice(
        2,
        2,
        &[mu + 1.5 * lambda / n1, off, off, 0.625 * mu + 0.5 * lambda],
    )
}

#[derive(Debug, Clone)]
pub struct SecondGap {
    pub value: f64,
    pub quadratic: f64,
    pub matrix: f64,
    pub assembled: f64,
    pub upper_root: f64,
    /// Large-N limit at the same rates.
    pub limit: f64,
    /// Smallest eigenvalue of the full operator on `L_4` restricted to the
    /// complement of the symmetric vectors. Computed for `N <= 8` only.
    pub nonsymmetric: Option<f64>,
}

pub fn second_gap(params: &Params) -> Result<SecondGap> {
    params.validate()?;
    let n = params.n_particles;
    if n < 2 {
        return Err(KacError::invalid("the second gap needs N >= 2"));
    }
    if params.mu <= 0.0 {
        return Err(KacError::invalid("the second gap needs mu > 0"));
    }
    let (b, c) = second_gap_quadratic(params)?;
    let quadratic = lower_root(b, c);

    let mat = second_gap_matrix(params);
    let (a, off, d) = (mat[(0, 0)], mat[(0, 1)], mat[(1, 1)]);
    let matrix = 0.5 * (a + d) - ((0.5 * (a - d)).powi(2) + off * off).sqrt();

    let basis = SectorBasis::symmetric(n, 2)?;
    let assembled = build_full(&basis, params)?.smallest_eigenvalue();

    check_agreement("second gap matrix route", quadratic, matrix)?;
    check_agreement("second gap assembled route", quadratic, assembled)?;

    let nonsymmetric = if n <= 8 {
        nonsymmetric_l4_minimum(params)?
    } else {
        None
    };
    Ok(SecondGap {
        value: quadratic,
        quadratic,
        matrix,
        assembled,
        upper_root: upper_root(b, c),
        limit: second_gap_limit(params.lambda, params.mu),
        nonsymmetric,
    })
}

/// Lowest eigenvalue of the full `L_4` operator on vectors orthogonal to every
/// permutation-symmetric vector.
fn nonsymmetric_l4_minimum(params: &Params) -> Result<Option<f64>> {
    let n = params.n_particles;
    let full = SectorBasis::full(n, 2)?;
    let sym = SectorBasis::symmetric(n, 2)?;
    let a = build_full(&full, params)?.entries;
    let d = full.dim();
    if d == sym.dim() {
        return Ok(None);
    }
    // projector onto normalized orbit sums
    let mut proj = DMatrix::<f64>::zeros(d, d);
    for rep in sym.indices() {
        let p = rep.partition();
        let members: Vec<usize> = (0..d)
            .filter(|&k| full.indices()[k].partition() == p)
            .collect();
        let w = 1.0 / members.len() as f64;
        for &i in &members {
            for &j in &members {
                proj[(i, j)] += w;
            }
        }
    }
    let comp = DMatrix::<f64>::identity(d, d) - proj;
    let restricted = &comp * a * &comp;
    let eig = symmetric_eigen(&restricted);
    // the symmetric directions sit at exactly zero; the operator is bounded
    // below by a positive constant elsewhere when mu > 0
    let floor = 1e-9 * eig.values.last().copied().unwrap_or(1.0).abs().max(1.0);
    Ok(eig.values.into_iter().find(|&v| v > floor))
}

/// Lower bound `x_l` for the lowest eigenvalue of `mu L_T + lambda L_R` on
/// `L_{2l}`.
pub fn sector_gap_bound(l: u32, params: &Params) -> Result<f64> {
    params.validate()?;
    if l < 1 {
        return Err(KacError::invalid("sector_gap_bound needs l >= 1"));
    }
    let n = params.n_particles;
    let ll = params.lambda * kac_gap_lambda(n)?;
    let mu = params.mu;
    let s = hermite_eigenvalue_s(2 * l);
    let n_gamma = n as f64 * sphere_moment_from_parts(&[l], n);
    let b = ll + (2.0 - s) * mu;
    let c = (1.0 - s) * mu * mu + ll * mu - ll * mu * s * n_gamma;
    Ok(lower_root(b, c))
}

/// The Kac eigenfunction `sum v_j^4 - 3/(N+2) (sum v_j^2)^2` with eigenvalue
/// `Lambda_N`, in the coordinates of the symmetric `L_4` basis.
pub fn kac_l4_eigenvector(n: usize) -> DVector<f64> {
    let nf = n as f64;
    let pairs = binomial(n as u64, 2) as f64;
    // coordinates: (fourth powers, pair products); norms sqrt(24 N), sqrt(4 C(N,2))
    let fourth = (nf - 1.0) / (nf + 2.0) * (24.0 * nf).sqrt();
    let pair = -6.0 / (nf + 2.0) * (4.0 * pairs).sqrt();
    DVector::from_vec(vec![fourth, pair])
}
