//! Multi-indices and the enumerations used to label polynomial bases.

use std::cmp::Ordering;
use std::fmt;

/// A tuple of nonnegative exponents `(a_1, ..., a_N)`.
///
/// The derived ordering is lexicographic; basis enumerations list indices in
/// *descending* lexicographic order, so `(2,0)` precedes `(1,1)` precedes `(0,2)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn zeros(len: usize) -> Self {
        MultiIndex(vec![0; len])
    }

    /// The index with `l` in slot `pos` and zeros elsewhere.
    pub fn unit(len: usize, pos: usize, l: u32) -> Self {
        let mut e = vec![0; len];
        e[pos] = l;
        MultiIndex(e)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Nonzero entries sorted in descending order: the permutation orbit label.
    pub fn partition(&self) -> Vec<u32> {
        let mut p: Vec<u32> = self.0.iter().copied().filter(|&a| a > 0).collect();
        p.sort_unstable_by(|a, b| b.cmp(a));
        p
    }

    /// `l! / (a_1! ... a_N!)` with `l = weight`.
    pub fn multinomial(&self) -> f64 {
        multinomial(&self.0)
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

/// Descending lexicographic comparison, the canonical basis order.
pub fn canonical_cmp(a: &MultiIndex, b: &MultiIndex) -> Ordering {
    b.cmp(a)
}

/// All weak compositions of `l` into `n` parts, descending lexicographic.
pub fn compositions(l: u32, n: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    if n == 0 {
        if l == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return out;
    }
    let mut cur = vec![0u32; n];
    fill_compositions(l, 0, &mut cur, &mut out);
    out
}

fn fill_compositions(rem: u32, pos: usize, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if pos + 1 == cur.len() {
        cur[pos] = rem;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for a in (0..=rem).rev() {
        cur[pos] = a;
        fill_compositions(rem - a, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

/// Partitions of `l` into at most `max_parts` positive parts, each listed in
/// descending part order; the list itself is descending lexicographic.
pub fn partitions(l: u32, max_parts: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fill_partitions(l, l, max_parts, &mut cur, &mut out);
    out
}

fn fill_partitions(rem: u32, max_part: u32, parts_left: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if rem == 0 {
        out.push(cur.clone());
        return;
    }
    if parts_left == 0 {
        return;
    }
    for a in (1..=max_part.min(rem)).rev() {
        cur.push(a);
        fill_partitions(rem - a, a, parts_left - 1, cur, out);
        cur.pop();
    }
}

/// Number of weak compositions of `l` into `n` parts, `C(l + n - 1, n - 1)`.
pub fn composition_count(l: u32, n: usize) -> usize {
    if n == 0 {
        return usize::from(l == 0);
    }
    binomial((l as usize + n - 1) as u64, (n - 1) as u64) as usize
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

pub fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `(sum a_i)! / prod a_i!`, evaluated as a product of binomials.
pub fn multinomial(parts: &[u32]) -> f64 {
    let mut total = 0u64;
    let mut acc = 1.0;
    for &a in parts {
        total += u64::from(a);
        acc *= binomial(total, u64::from(a)) as f64;
    }
    acc
}

/// Size of the permutation orbit of an `n`-slot index whose nonzero entries
/// form `partition`: `n! / prod_k m_k!`, with `m_0 = n - len(partition)`.
pub fn orbit_size(partition: &[u32], n: usize) -> f64 {
    let k = partition.len();
    assert!(k <= n, "partition longer than the number of slots");
    // n! / (n-k)! counts placements of the nonzero entries; divide by the
    // multiplicities among equal nonzero parts.
    let placements: f64 = ((n - k + 1)..=n).map(|x| x as f64).product();
    let mut denom = 1.0;
    let mut i = 0;
    while i < k {
        let mut j = i;
        while j < k && partition[j] == partition[i] {
            j += 1;
        }
        denom *= factorial((j - i) as u32);
        i = j;
    }
    placements / denom
}

/// Expand a partition to its canonical representative in `n` slots.
pub fn partition_representative(partition: &[u32], n: usize) -> MultiIndex {
    let mut e = partition.to_vec();
    e.resize(n, 0);
    MultiIndex(e)
}
