//! Action of the Kac averaging operator `Q` on even monomials.
//!
//! `Q` averages a function over a uniformly chosen pair `(i, j)` rotated by a
//! uniform angle. On `v^{2 alpha}` each pair only touches two exponents, so the
//! image is a short sum computed from binomial expansions and angular moments.
//! Because `Q` preserves each space of homogeneous even polynomials and is
//! self-adjoint on `L^2(gamma)`, the same coefficients give its action on the
//! Hermite products `H_{2 alpha}`.

use std::collections::BTreeMap;

use crate::combinatorics::{binomial, MultiIndex};
use crate::error::{KacError, Result};
use crate::moments::angular_moment;

/// Coefficients of `avg_theta (x cos + y sin)^{2a} (-x sin + y cos)^{2b}` as
/// `(c, d, coef)` for the term `x^{2c} y^{2d}`, `c + d = a + b`.
pub(crate) fn pair_rotation(a: u32, b: u32) -> Vec<(u32, u32, f64)> {
    let total = a + b;
    let mut by_x = vec![0.0; (2 * total + 1) as usize];
    for k in 0..=2 * a {
        let ck = binomial(u64::from(2 * a), u64::from(k)) as f64;
        for m in 0..=2 * b {
            let cm = binomial(u64::from(2 * b), u64::from(m)) as f64;
            let cos_pow = k + 2 * b - m;
            let sin_pow = 2 * a - k + m;
            let avg = angular_moment(cos_pow, sin_pow);
            if avg == 0.0 {
                continue;
            }
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            by_x[(k + m) as usize] += sign * ck * cm * avg;
        }
    }
    (0..=total)
        .map(|c| (c, total - c, by_x[(2 * c) as usize]))
        .filter(|&(_, _, v)| v != 0.0)
        .collect()
}

/// `Q[v^e] = sum_f c_f v^f` for an even exponent tuple `e`; keys are exponents.
pub fn apply_q_monomial(exponents: &MultiIndex) -> Result<BTreeMap<MultiIndex, f64>> {
    let n = exponents.len();
    if n < 2 {
        return Err(KacError::invalid("Q needs at least two particles"));
    }
    if exponents.entries().iter().any(|e| e % 2 == 1) {
        return Err(KacError::OddIndex(exponents.entries().to_vec()));
    }
    let half: Vec<u32> = exponents.entries().iter().map(|e| e / 2).collect();
    let image = q_on_half_index(&half);
    Ok(image
        .into_iter()
        .map(|(k, v)| (MultiIndex::new(k.entries().iter().map(|x| 2 * x).collect()), v))
        .collect())
}

/// `Q[v^{2 alpha}]` keyed by half-exponents, summing over every pair.
pub(crate) fn q_on_half_index(alpha: &[u32]) -> BTreeMap<MultiIndex, f64> {
    let n = alpha.len();
    let pairs = (n * (n - 1) / 2) as f64;
    let mut out: BTreeMap<MultiIndex, f64> = BTreeMap::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for (c, d, coef) in pair_rotation(alpha[i], alpha[j]) {
                let mut beta = alpha.to_vec();
                beta[i] = c;
                beta[j] = d;
                *out.entry(MultiIndex::new(beta)).or_insert(0.0) += coef / pairs;
            }
        }
    }
    out
}

/// Coefficients of `(I - Q)[v^{2 alpha}]` with the `N(N-1)/2` normalization
/// left out: the sum over pairs of identity minus the pair rotation.
/// Pairs that do not change the monomial contribute nothing, so nothing close
/// to one is subtracted from one.
pub(crate) fn pair_defect(a: u32, b: u32) -> Vec<(u32, u32, f64)> {
    let mut out = pair_rotation(a, b);
    for t in out.iter_mut() {
        t.2 = -t.2;
    }
    match out.iter_mut().find(|t| t.0 == a && t.1 == b) {
        Some(t) => t.2 += 1.0,
        None => out.push((a, b, 1.0)),
    }
    out.retain(|t| t.2 != 0.0);
    out
}

/// `(I - Q)[v^{2 alpha}]` keyed by half-exponents.
pub(crate) fn defect_on_half_index(alpha: &[u32]) -> BTreeMap<MultiIndex, f64> {
    let n = alpha.len();
    let pairs = (n * (n - 1) / 2) as f64;
    let mut out: BTreeMap<MultiIndex, f64> = BTreeMap::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if alpha[i] == 0 && alpha[j] == 0 {
                continue;
            }
            for (c, d, coef) in pair_defect(alpha[i], alpha[j]) {
                let mut beta = alpha.to_vec();
                beta[i] = c;
                beta[j] = d;
                *out.entry(MultiIndex::new(beta)).or_insert(0.0) += coef / pairs;
            }
        }
    }
    out
}

/// `(I - Q)[v^{2 alpha}]` summed over permutation orbits of the result, keyed
/// by partition, for `alpha` the given partition padded with zeros to length
/// `n`. Empty slots are counted rather than enumerated, so the cost does not
/// depend on `n`.
pub(crate) fn defect_orbit_image(partition: &[u32], n: usize) -> BTreeMap<Vec<u32>, f64> {
    let k = partition.len();
    assert!(k <= n && n >= 2);
    let zeros = (n - k) as f64;
    let pairs = (n as f64) * (n as f64 - 1.0) / 2.0;
    let mut out: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    let mut add = |beta: Vec<u32>, w: f64| {
        let mut p: Vec<u32> = beta.into_iter().filter(|&x| x > 0).collect();
        p.sort_unstable_by(|a, b| b.cmp(a));
        *out.entry(p).or_insert(0.0) += w / pairs;
    };

    // one occupied slot, one empty slot; all empty slots are equivalent
    if zeros > 0.0 {
        for i in 0..k {
            for (c, d, coef) in pair_defect(partition[i], 0) {
                let mut beta = partition.to_vec();
                beta[i] = c;
                beta.push(d);
                add(beta, coef * zeros);
            }
        }
    }
    for i in 0..k {
        for j in (i + 1)..k {
            for (c, d, coef) in pair_defect(partition[i], partition[j]) {
                let mut beta = partition.to_vec();
                beta[i] = c;
                beta[j] = d;
                add(beta, coef);
            }
        }
    }
    out.retain(|_, v| *v != 0.0);
    out
}
