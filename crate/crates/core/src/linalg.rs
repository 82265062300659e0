//! Dense symmetric eigensolves for the small sector matrices.

use nalgebra::{DMatrix, DVector};

/// Eigenpairs sorted by ascending eigenvalue.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: DMatrix<f64>,
}

impl EigenPairs {
    pub fn vector(&self, k: usize) -> DVector<f64> {
        self.vectors.column(k).into_owned()
    }

    pub fn smallest(&self) -> f64 {
        self.values[0]
    }
}

pub fn symmetric_eigen(m: &DMatrix<f64>) -> EigenPairs {
    assert!(m.is_square());
    let n = m.nrows();
    if n == 0 {
        return EigenPairs {
            values: Vec::new(),
            vectors: DMatrix::zeros(0, 0),
        };
    }
    // Symmetrize so rounding in assembly cannot leak into the solver.
    let sym = 0.5 * (m + m.transpose());
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    EigenPairs { values, vectors }
}

/// Largest `|m_ij - m_ji|`.
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..i {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Residual `max_k |A v_k - e_k v_k|_inf`, a sanity check on a solve.
pub fn residual(m: &DMatrix<f64>, eig: &EigenPairs) -> f64 {
    let mut worst = 0.0f64;
    for (k, &e) in eig.values.iter().enumerate() {
        let v = eig.vector(k);
        let r = m * &v - e * &v;
        worst = worst.max(r.amax());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorted_pairs() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let e = symmetric_eigen(&m);
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] - 3.0).abs() < 1e-14);
        assert!(residual(&m, &e) < 1e-13);
        let v = e.vector(0);
        assert!((v[0] + v[1]).abs() < 1e-14);
    }
}
