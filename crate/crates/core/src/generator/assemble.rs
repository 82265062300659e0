use nalgebra::DMatrix;

use super::basis::{hermite_norm_sq, SectorBasis};
use super::kac::{defect_on_half_index, defect_orbit_image};
use crate::combinatorics::{multinomial, orbit_size, MultiIndex};
use crate::error::{KacError, Result};
use crate::linalg::{asymmetry, symmetric_eigen, EigenPairs};
use crate::moments::{hermite_eigenvalue_s, kac_gap_lambda, sphere_moment_from_parts};
use crate::params::Params;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorTag {
    /// Thermostat part `sum_j (I - T_j)`.
    Thermostat,
    /// Kac part `N (I - Q)`.
    Kac,
    /// Radial comparison operator `Lambda_N (I - B)`.
    Radial,
    /// `mu L_T + lambda L_K`.
    Full,
    /// `mu L_T + lambda L_R`.
    Comparison,
}

impl OperatorTag {
    pub fn as_str(self) -> &'static str {
        match self {
            OperatorTag::Thermostat => "L_T",
            OperatorTag::Kac => "L_K",
            OperatorTag::Radial => "L_R",
            OperatorTag::Full => "full",
            OperatorTag::Comparison => "comparison",
        }
    }
}

/// An operator restricted to one sector, in the basis's orthonormal coordinates.
#[derive(Debug, Clone)]
pub struct SectorMatrix {
    pub basis: SectorBasis,
    pub entries: DMatrix<f64>,
    pub tag: OperatorTag,
}

impl SectorMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn eigen(&self) -> EigenPairs {
        symmetric_eigen(&self.entries)
    }

    pub fn asymmetry(&self) -> f64 {
        asymmetry(&self.entries)
    }

    pub fn smallest_eigenvalue(&self) -> f64 {
        self.eigen().smallest()
    }

    /// `a * self + b * other` on the same basis.
    pub fn combine(&self, a: f64, other: &SectorMatrix, b: f64, tag: OperatorTag) -> SectorMatrix {
        assert_eq!(self.basis, other.basis, "sector bases differ");
        SectorMatrix {
            basis: self.basis.clone(),
            entries: &self.entries * a + &other.entries * b,
            tag,
        }
    }
}

/// `sigma(alpha) = sum_i (1 - s_{2 alpha_i})`.
pub fn thermostat_eigenvalue(alpha: &MultiIndex) -> f64 {
    alpha
        .entries()
        .iter()
        .filter(|&&a| a > 0)
        .map(|&a| 1.0 - hermite_eigenvalue_s(2 * a))
        .sum()
}

pub fn build_lt(basis: &SectorBasis) -> SectorMatrix {
    let d = basis.dim();
    let mut m = DMatrix::zeros(d, d);
    for (k, alpha) in basis.indices().iter().enumerate() {
        m[(k, k)] = thermostat_eigenvalue(alpha);
    }
    SectorMatrix {
        basis: basis.clone(),
        entries: m,
        tag: OperatorTag::Thermostat,
    }
}

pub fn build_lk(basis: &SectorBasis) -> Result<SectorMatrix> {
    let n = basis.n();
    if n < 2 {
        return Err(KacError::invalid("L_K needs at least two particles"));
    }
    let d = basis.dim();
    let nf = n as f64;
    let mut m = DMatrix::zeros(d, d);
    if basis.is_symmetric() {
        for (p, rep) in basis.indices().iter().enumerate() {
            let part = rep.partition();
            let image = defect_orbit_image(&part, n);
            let np = hermite_norm_sq(rep);
            let op = orbit_size(&part, n);
            for (q, rep_q) in basis.indices().iter().enumerate() {
                let Some(&c) = image.get(&rep_q.partition()) else {
                    continue;
                };
                let oq = basis.orbit(q);
                let nq = hermite_norm_sq(rep_q);
                m[(p, q)] = nf * c * (op / oq).sqrt() * (nq / np).sqrt();
            }
        }
    } else {
        for (col, alpha) in basis.indices().iter().enumerate() {
            let na = hermite_norm_sq(alpha);
            for (beta, c) in defect_on_half_index(alpha.entries()) {
                let row = basis
                    .position(&beta)
                    .ok_or_else(|| assembly_gap(&beta))?;
                m[(row, col)] = nf * c * (hermite_norm_sq(&beta) / na).sqrt();
            }
        }
    }
    Ok(SectorMatrix {
        basis: basis.clone(),
        entries: m,
        tag: OperatorTag::Kac,
    })
}

fn assembly_gap(beta: &MultiIndex) -> KacError {
    KacError::AssemblyMismatch {
        what: format!("Q image {beta:?} outside the sector basis"),
        expected: 0.0,
        got: 1.0,
        tolerance: 0.0,
    }
}

/// Orthogonal projection onto the radial polynomial of the sector.
pub fn build_radial_projector(basis: &SectorBasis) -> Result<SectorMatrix> {
    let n = basis.n();
    let d = basis.dim();
    let mut m = DMatrix::zeros(d, d);
    // B[H_{2a}] = Gamma(a) sum_b mult(b) H_{2b}
    for (p, a) in basis.indices().iter().enumerate() {
        let pa = a.partition();
        let gamma = sphere_moment_from_parts(&pa, n);
        let na = hermite_norm_sq(a);
        let oa = basis.orbit(p);
        for (q, b) in basis.indices().iter().enumerate() {
            let ob = basis.orbit(q);
            let nb = hermite_norm_sq(b);
            let val = gamma * multinomial(b.entries()) * (nb / na).sqrt();
            // row b, column a; orbit weights vanish for full bases
            m[(q, p)] = val * (oa * ob).sqrt();
        }
    }
    Ok(SectorMatrix {
        basis: basis.clone(),
        entries: m,
        tag: OperatorTag::Radial,
    })
}

pub fn build_lr(basis: &SectorBasis) -> Result<SectorMatrix> {
    let lam = kac_gap_lambda(basis.n())?;
    let b = build_radial_projector(basis)?;
    let d = basis.dim();
    Ok(SectorMatrix {
        basis: basis.clone(),
        entries: (DMatrix::identity(d, d) - b.entries) * lam,
        tag: OperatorTag::Radial,
    })
}

/// `mu L_T + lambda L_K` in reduced units.
pub fn build_full(basis: &SectorBasis, params: &Params) -> Result<SectorMatrix> {
    let lt = build_lt(basis);
    let lk = build_lk(basis)?;
    Ok(lt.combine(params.mu, &lk, params.lambda, OperatorTag::Full))
}

/// `mu L_T + lambda L_R` in reduced units.
pub fn build_comparison(basis: &SectorBasis, params: &Params) -> Result<SectorMatrix> {
    let lt = build_lt(basis);
    let lr = build_lr(basis)?;
    Ok(lt.combine(params.mu, &lr, params.lambda, OperatorTag::Comparison))
}

/// Block-diagonal sum of sector matrices (used for `L_2 + L_4`).
pub fn direct_sum(blocks: &[SectorMatrix]) -> DMatrix<f64> {
    let total: usize = blocks.iter().map(SectorMatrix::dim).sum();
    let mut m = DMatrix::zeros(total, total);
    let mut off = 0;
    for b in blocks {
        let d = b.dim();
        m.view_mut((off, off), (d, d)).copy_from(&b.entries);
        off += d;
    }
    m
}
