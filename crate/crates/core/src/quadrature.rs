//! Quadrature rules and grid interpolation used by the entropy checks.

use std::f64::consts::PI;

/// Nodes and weights of a one-dimensional rule.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Gauss rule for the standard normal weight `exp(-x^2/2)/sqrt(2 pi)`.
///
/// Weights sum to one. Exact for polynomials of degree `< 2n`.
pub fn gauss_hermite(n: usize) -> Rule {
    assert!(n >= 1);
    // Roots of He_n via Newton on the orthonormal recurrence, started from the
    // eigenvalues of the Jacobi matrix.
    let jacobi = nalgebra::DMatrix::from_fn(n, n, |i, j| {
        if i + 1 == j || j + 1 == i {
            (i.max(j) as f64).sqrt()
        } else {
            0.0
        }
    });
    let mut nodes: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
    nodes.sort_by(f64::total_cmp);

    let mut weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let (pn, pn1, _) = orthonormal_hermite(n, *x);
            let deriv = (n as f64).sqrt() * pn1;
            *x -= pn / deriv;
        }
        let (_, _, sumsq) = orthonormal_hermite(n, *x);
        weights.push(1.0 / sumsq);
    }
    // Symmetrize to kill the last bits of asymmetry.
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        let w = 0.5 * (weights[i] + weights[j]);
        nodes[i] = -x;
        nodes[j] = x;
        weights[i] = w;
        weights[j] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Rule { nodes, weights }
}

/// `(p_n(x), p_{n-1}(x), sum_{k<n} p_k(x)^2)` for the orthonormal Hermite
/// polynomials `p_k = He_k / sqrt(k!)`.
fn orthonormal_hermite(n: usize, x: f64) -> (f64, f64, f64) {
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut sumsq = 0.0;
    for k in 0..n {
        sumsq += cur * cur;
        let next = (x * cur - (k as f64).sqrt() * prev) / ((k + 1) as f64).sqrt();
        prev = cur;
        cur = next;
    }
    (cur, prev, sumsq)
}

/// Gauss-Legendre rule on `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Rule {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d.is_finite() { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = mid - half * x;
        nodes[n - 1 - i] = mid + half * x;
        weights[i] = half * w;
        weights[n - 1 - i] = half * w;
    }
    Rule { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Equal-weight rule on a full period `[0, 2 pi)`: exact for trigonometric
/// polynomials of degree below `n`. Weights sum to one, so this is an average.
pub fn periodic_average(n: usize) -> Rule {
    let nodes = (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect();
    Rule {
        nodes,
        weights: vec![1.0 / n as f64; n],
    }
}

/// Uniform grid `x_k = -half_width + k h`, `k = 0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformGrid {
    pub half_width: f64,
    pub n: usize,
}

impl UniformGrid {
    pub fn new(half_width: f64, n: usize) -> Self {
        assert!(n >= 4 && half_width > 0.0);
        UniformGrid { half_width, n }
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / (self.n - 1) as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        -self.half_width + k as f64 * self.step()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.node(k)).collect()
    }

    /// Composite trapezoid rule over the grid.
    pub fn trapezoid(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.n);
        let inner: f64 = values[1..self.n - 1].iter().sum();
        self.step() * (inner + 0.5 * (values[0] + values[self.n - 1]))
    }

    /// Four-point Lagrange interpolation of grid values at `x`; values outside
    /// the grid are held at the nearest endpoint.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        let h = self.step();
        let pos = (x + self.half_width) / h;
        if pos <= 0.0 {
            return values[0];
        }
        let last = (self.n - 1) as f64;
        if pos >= last {
            return values[self.n - 1];
        }
        let i = (pos.floor() as usize).clamp(1, self.n - 3);
        let t = pos - i as f64;
        let (y0, y1, y2, y3) = (values[i - 1], values[i], values[i + 1], values[i + 2]);
        // Lagrange basis on nodes -1, 0, 1, 2
        let l0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
        let l1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
        let l2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
        let l3 = (t + 1.0) * t * (t - 1.0) / 6.0;
        l0 * y0 + l1 * y1 + l2 * y2 + l3 * y3
    }
}
