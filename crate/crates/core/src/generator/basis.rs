use crate::combinatorics::{compositions, factorial, orbit_size, partition_representative, partitions, MultiIndex};
use crate::error::{KacError, Result};

/// Assembly limits. Full (non-symmetrized) bases grow like `C(l + N - 1, l)`,
/// so they are capped; symmetric bases have one row per partition of `l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Truncation {
    pub l_max: u32,
    pub full_n_max: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation {
            l_max: 4,
            full_n_max: 8,
        }
    }
}

/// Orthonormal basis of the even Hermite sector `L_{2l}` in `N` variables.
///
/// Basis vector `k` is `H_{2 alpha}/sqrt(prod (2 alpha_i)!)` for the full basis,
/// or the normalized permutation-orbit sum of such products for the symmetric
/// basis, where `indices[k]` is the orbit's canonical representative.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorBasis {
    n: usize,
    l: u32,
    indices: Vec<MultiIndex>,
    symmetric: bool,
}

impl SectorBasis {
    pub fn full(n: usize, l: u32) -> Result<Self> {
        Self::full_with(n, l, Truncation::default())
    }

    pub fn full_with(n: usize, l: u32, trunc: Truncation) -> Result<Self> {
        check_sizes(n, l, trunc)?;
        if n > trunc.full_n_max {
            return Err(KacError::invalid(format!(
                "full sector assembly is limited to N <= {} (got {n}); use the symmetric basis",
                trunc.full_n_max
            )));
        }
        Ok(SectorBasis {
            n,
            l,
            indices: compositions(l, n),
            symmetric: false,
        })
    }

    pub fn symmetric(n: usize, l: u32) -> Result<Self> {
        Self::symmetric_with(n, l, Truncation::default())
    }

    pub fn symmetric_with(n: usize, l: u32, trunc: Truncation) -> Result<Self> {
        check_sizes(n, l, trunc)?;
        let indices = partitions(l, n)
            .iter()
            .map(|p| partition_representative(p, n))
            .collect();
        Ok(SectorBasis {
            n,
            l,
            indices,
            symmetric: true,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Half the polynomial degree.
    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn degree(&self) -> u32 {
        2 * self.l
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    /// Position of the label (an index, or a partition for symmetric bases).
    pub fn position(&self, alpha: &MultiIndex) -> Option<usize> {
        if self.symmetric {
            let p = alpha.partition();
            self.indices.iter().position(|r| r.partition() == p)
        } else {
            self.indices.iter().position(|r| r == alpha)
        }
    }

    /// Orbit size of basis element `k` (1 for full bases).
    pub fn orbit(&self, k: usize) -> f64 {
        if self.symmetric {
            orbit_size(&self.indices[k].partition(), self.n)
        } else {
            1.0
        }
    }
}

fn check_sizes(n: usize, l: u32, trunc: Truncation) -> Result<()> {
    if n == 0 {
        return Err(KacError::invalid("a sector needs at least one variable"));
    }
    if l > trunc.l_max {
        return Err(KacError::invalid(format!(
            "sector L_{} exceeds the truncation l_max = {}",
            2 * l,
            trunc.l_max
        )));
    }
    Ok(())
}

/// Squared norm of `H_{2 alpha}` in `L^2(gamma)`: `prod (2 alpha_i)!`.
pub fn hermite_norm_sq(alpha: &MultiIndex) -> f64 {
    alpha.entries().iter().map(|&a| factorial(2 * a)).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        let b = SectorBasis::full(2, 2).unwrap();
        assert_eq!(b.dim(), 3);
        assert_eq!(b.indices()[0], MultiIndex::new(vec![2, 0]));
        assert_eq!(b.indices()[1], MultiIndex::new(vec![1, 1]));
        assert_eq!(SectorBasis::symmetric(2, 2).unwrap().dim(), 2);
        assert_eq!(SectorBasis::symmetric(1000, 4).unwrap().dim(), 5);
        assert_eq!(SectorBasis::full(8, 4).unwrap().dim(), 330);
    }

    #[test]
    fn truncation_limits() {
        assert!(SectorBasis::full(9, 2).is_err());
        assert!(SectorBasis::symmetric(3, 5).is_err());
        let wide = Truncation {
            l_max: 6,
            full_n_max: 10,
        };
        assert!(SectorBasis::full_with(9, 5, wide).is_ok());
    }

    #[test]
    fn positions() {
        let b = SectorBasis::symmetric(4, 2).unwrap();
        assert_eq!(b.position(&MultiIndex::new(vec![0, 1, 0, 1])), Some(1));
        assert_eq!(b.orbit(1), 6.0);
        assert_eq!(hermite_norm_sq(&MultiIndex::new(vec![2, 1])), 48.0);
    }
}
