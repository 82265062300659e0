//! Angular and spherical moments.
//!
//! Everything here is a ratio of (double) factorials. Values are built as
//! reduced rationals and converted to `f64` at the end; if an intermediate
//! overflows `u128` the product is finished in floating point instead.

use num_rational::Ratio;
use num_traits::{CheckedMul, ToPrimitive};

use crate::combinatorics::MultiIndex;
use crate::error::{KacError, Result};

type Q = Ratio<u128>;

/// Running product of rational factors that degrades to `f64` on overflow.
#[derive(Clone, Copy)]
enum Product {
    Exact(Q),
    Float(f64),
}

impl Product {
    fn one() -> Self {
        Product::Exact(Q::from_integer(1))
    }

    fn mul(self, num: u128, den: u128) -> Self {
        match self {
            Product::Exact(q) => match q.checked_mul(&Q::new(num, den)) {
                Some(r) => Product::Exact(r),
                None => Product::Float(ratio_f64(&q) * (num as f64 / den as f64)),
            },
            Product::Float(x) => Product::Float(x * (num as f64 / den as f64)),
        }
    }

    fn value(self) -> f64 {
        match self {
            Product::Exact(q) => ratio_f64(&q),
            Product::Float(x) => x,
        }
    }

    fn exact(self) -> Option<Q> {
        match self {
            Product::Exact(q) => Some(q),
            Product::Float(_) => None,
        }
    }
}

fn ratio_f64(q: &Q) -> f64 {
    // Both parts fit in f64 exactly up to 2^53; beyond that the division
    // still rounds correctly to within an ulp or two.
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) => n / d,
        _ => f64::NAN,
    }
}

/// `s_alpha`, the average of `cos^alpha` over a full period.
///
/// Zero for odd `alpha`; `(2a)! / (4^a a!^2)` for `alpha = 2a`.
pub fn hermite_eigenvalue_s(alpha: u32) -> f64 {
    if alpha % 2 == 1 {
        return 0.0;
    }
    s_product(alpha / 2).value()
}

/// Exact `s_{2a}` when it fits in `u128` rationals.
pub fn hermite_eigenvalue_s_exact(alpha: u32) -> Option<(u128, u128)> {
    if alpha % 2 == 1 {
        return Some((0, 1));
    }
    s_product(alpha / 2).exact().map(|q| (*q.numer(), *q.denom()))
}

fn s_product(a: u32) -> Product {
    (1..=a as u128).fold(Product::one(), |p, k| p.mul(2 * k - 1, 2 * k))
}

/// Average of `cos^p(theta) sin^q(theta)` over a full period.
///
/// Zero unless both exponents are even, otherwise `(p-1)!! (q-1)!! / (p+q)!!`.
pub fn angular_moment(p: u32, q: u32) -> f64 {
    if p % 2 == 1 || q % 2 == 1 {
        return 0.0;
    }
    // (p-1)!!(q-1)!!/(p+q)!! = prod_{k<=p/2} (2k-1)/(2k) * prod_{k<=q/2} (2k-1)/(2k + p)
    let mut prod = Product::one();
    for k in 1..=(p / 2) as u128 {
        prod = prod.mul(2 * k - 1, 2 * k);
    }
    for k in 1..=(q / 2) as u128 {
        prod = prod.mul(2 * k - 1, 2 * k + p as u128);
    }
    prod.value()
}

/// Kac collision gap off the radial functions, `(N + 2) / (2 (N - 1))`.
pub fn kac_gap_lambda(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(KacError::invalid(format!(
            "the Kac gap needs at least two particles, got N = {n}"
        )));
    }
    let n = n as f64;
    Ok(0.5 * (n + 2.0) / (n - 1.0))
}

/// `Gamma(alpha)`: the average of `prod v_i^{2 alpha_i}` over the unit sphere in
/// `R^N` with normalized surface measure, `N = alpha.len()`.
pub fn sphere_moment_gamma(alpha: &MultiIndex) -> f64 {
    sphere_moment_from_parts(alpha.entries(), alpha.len())
}

/// Same as [`sphere_moment_gamma`] but from the nonzero entries and `N`.
pub fn sphere_moment_from_parts(parts: &[u32], n: usize) -> f64 {
    assert!(n >= 1, "sphere moments need N >= 1");
    let l: u32 = parts.iter().sum();
    let mut prod = Product::one();
    // numerator: prod (2a_i - 1)!!
    for &a in parts {
        for k in 1..=a as u128 {
            prod = prod.mul(2 * k - 1, 1);
        }
    }
    // denominator: N (N+2) ... (N + 2l - 2)
    for k in 0..l as u128 {
        prod = prod.mul(1, n as u128 + 2 * k);
    }
    prod.value()
}

/// Moments `E[u^j]`, `j = 0..=order`, of the standard Gaussian: `(j-1)!!` for
/// even `j`, zero for odd `j`.
pub fn gaussian_moments(order: usize) -> Vec<f64> {
    let mut g = vec![0.0; order + 1];
    g[0] = 1.0;
    for j in (2..=order).step_by(2) {
        g[j] = g[j - 2] * (j - 1) as f64;
    }
    g
}
