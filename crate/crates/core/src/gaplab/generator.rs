use std::collections::HashMap;

use nalgebra::DMatrix;

use super::graph::{HyperWeights, WeightedGraph};
use super::perm;
use super::GapError;

/// Largest vertex count for operators over permutations (`7! = 5040` states).
pub const MAX_PERMUTATION_VERTICES: usize = 7;
/// Largest state count handled by dense eigensolves.
pub const MAX_DENSE_DIM: usize = 720;
/// Largest state count of any operator built here.
pub const MAX_DIM: usize = 5040;

/// A real symmetric matrix stored as a diagonal plus sorted off-diagonal rows.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSymmetric {
    diag: Vec<f64>,
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseSymmetric {
    pub fn zeros(dim: usize) -> Self {
        Self { diag: vec![0.0; dim], rows: vec![Vec::new(); dim] }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.diag[i];
        }
        match self.rows[i].binary_search_by_key(&j, |&(c, _)| c) {
            Ok(pos) => self.rows[i][pos].1,
            Err(_) => 0.0,
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim())
            .map(|i| self.diag[i] * x[i] + self.rows[i].iter().map(|&(j, v)| v * x[j]).sum::<f64>())
            .collect()
    }

    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        x.iter().zip(self.apply(x)).map(|(a, b)| a * b).sum()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            for &(j, v) in &self.rows[i] {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// Maximum absolute row sum, an upper bound on the spectral norm.
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim())
            .map(|i| self.diag[i].abs() + self.rows[i].iter().map(|&(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            for &(j, v) in &self.rows[i] {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn max_row_sum(&self) -> f64 {
        (0..self.dim())
            .map(|i| (self.diag[i] + self.rows[i].iter().map(|&(_, v)| v).sum::<f64>()).abs())
            .fold(0.0, f64::max)
    }

    fn scaled(&self, s: f64) -> Self {
        Self {
            diag: self.diag.iter().map(|v| v * s).collect(),
            rows: self.rows.iter().map(|r| r.iter().map(|&(j, v)| (j, v * s)).collect()).collect(),
        }
    }
}

/// Accumulates entries, merging repeated coordinates.
pub(crate) struct Builder {
    diag: Vec<f64>,
    rows: Vec<HashMap<usize, f64>>,
}

impl Builder {
    pub(crate) fn new(dim: usize) -> Self {
        Self { diag: vec![0.0; dim], rows: vec![HashMap::new(); dim] }
    }

    pub(crate) fn add(&mut self, i: usize, j: usize, v: f64) {
        if i == j {
            self.diag[i] += v;
        } else {
            *self.rows[i].entry(j).or_insert(0.0) += v;
        }
    }

    pub(crate) fn finish(self) -> SparseSymmetric {
        let rows = self
            .rows
            .into_iter()
            .map(|r| {
                let mut v: Vec<(usize, f64)> = r.into_iter().filter(|&(_, x)| x != 0.0).collect();
                v.sort_unstable_by_key(|&(j, _)| j);
                v
            })
            .collect();
        SparseSymmetric { diag: self.diag, rows }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StateSpace {
    /// Vertex -> label arrays of `0..n`, indexed by Lehmer rank.
    Permutations { n: usize },
    /// `k`-subsets of `0..n` as bitmasks, in lexicographic order of their
    /// sorted elements.
    Subsets { n: usize, k: usize, states: Vec<u32> },
    Vertices { n: usize },
}

impl StateSpace {
    pub fn dim(&self) -> usize {
        match self {
            StateSpace::Permutations { n } => perm::factorial(*n),
            StateSpace::Subsets { states, .. } => states.len(),
            StateSpace::Vertices { n } => *n,
        }
    }
}

/// Rate matrix `Q` of a reversible chain with uniform stationary law:
/// symmetric, nonnegative off the diagonal, zero row sums.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorOperator {
    space: StateSpace,
    q: SparseSymmetric,
}

impl GeneratorOperator {
    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.q.dim()
    }

    pub fn matrix(&self) -> &SparseSymmetric {
        &self.q
    }

    /// The negated generator `-Q` as a symmetric matrix.
    pub fn negated(&self) -> SparseSymmetric {
        self.q.scaled(-1.0)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        self.q.to_dense()
    }

    pub fn norm(&self) -> f64 {
        self.q.norm_inf()
    }

    /// Checks symmetry, zero row sums within `tol * ||Q||` and nonnegative
    /// off-diagonal rates.
    pub fn check_invariants(&self, tol: f64) -> Result<(), GapError> {
        let scale = self.norm().max(f64::MIN_POSITIVE);
        let asym = self.q.max_asymmetry();
        if asym > tol * scale {
            return Err(GapError::Invariant(format!("asymmetry {asym:e}")));
        }
        let rs = self.q.max_row_sum();
        if rs > tol * scale {
            return Err(GapError::Invariant(format!("row sum {rs:e}")));
        }
        if (0..self.dim()).any(|i| self.q.row(i).iter().any(|&(_, v)| v < 0.0)) {
            return Err(GapError::Invariant("negative off-diagonal rate".into()));
        }
        Ok(())
    }
}

fn check_permutation_capacity(n: usize) -> Result<(), GapError> {
    if !(2..=MAX_PERMUTATION_VERTICES).contains(&n) {
        return Err(GapError::Capacity { n, max: MAX_PERMUTATION_VERTICES });
    }
    Ok(())
}

/// Interchange process: labels at `i` and `j` swap at rate `c(i, j)`.
pub fn interchange_generator(g: &WeightedGraph) -> Result<GeneratorOperator, GapError> {
    let n = g.n();
    check_permutation_capacity(n)?;
    let states = perm::all(n);
    let edges = g.edges();
    let mut b = Builder::new(states.len());
    let mut buf = vec![0u8; n];
    for (s, sigma) in states.iter().enumerate() {
        for &(i, j, c) in &edges {
            buf.copy_from_slice(sigma);
            buf.swap(i, j);
            let t = perm::rank(&buf);
            b.add(s, t, c);
            b.add(s, s, -c);
        }
    }
    Ok(GeneratorOperator { space: StateSpace::Permutations { n }, q: b.finish() })
}

/// Continuous-time random walk: the negated weighted Laplacian.
pub fn rw_generator(g: &WeightedGraph) -> Result<GeneratorOperator, GapError> {
    let n = g.n();
    if n < 2 {
        return Err(GapError::Argument(format!("random walk needs at least 2 vertices, got {n}")));
    }
    let mut b = Builder::new(n);
    for (i, j, c) in g.edges() {
        b.add(i, j, c);
        b.add(j, i, c);
        b.add(i, i, -c);
        b.add(j, j, -c);
    }
    Ok(GeneratorOperator { space: StateSpace::Vertices { n }, q: b.finish() })
}

/// `k`-subsets of `0..n` in lexicographic order of their sorted elements.
pub fn subsets(n: usize, k: usize) -> Vec<u32> {
    fn rec(start: usize, n: usize, k: usize, mask: u32, out: &mut Vec<u32>) {
        if k == 0 {
            out.push(mask);
            return;
        }
        for v in start..=n - k {
            rec(v + 1, n, k - 1, mask | 1 << v, out);
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, 0, &mut out);
    out
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Symmetric exclusion with `k` particles.
pub fn exclusion_generator(g: &WeightedGraph, k: usize) -> Result<GeneratorOperator, GapError> {
    let n = g.n();
    if k == 0 || k >= n {
        return Err(GapError::Argument(format!("particle count {k} outside 1..={}", n.saturating_sub(1))));
    }
    if n > 31 || binomial(n, k) > MAX_DIM {
        return Err(GapError::Capacity { n, max: MAX_PERMUTATION_VERTICES });
    }
    let states = subsets(n, k);
    let index: HashMap<u32, usize> = states.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let edges = g.edges();
    let mut b = Builder::new(states.len());
    for (s, &mask) in states.iter().enumerate() {
        for &(i, j, c) in &edges {
            let (hi, hj) = (mask >> i & 1, mask >> j & 1);
            if hi != hj {
                let t = index[&(mask ^ (1 << i) ^ (1 << j))];
                b.add(s, t, c);
                b.add(s, s, -c);
            }
        }
    }
    Ok(GeneratorOperator { space: StateSpace::Subsets { n, k, states }, q: b.finish() })
}

/// `Q = Σ_A α_A (U_A - I)` where `U_A` rearranges the labels on `A` uniformly
/// among all `|A|!` arrangements, the identity included.
pub fn alpha_shuffle_generator(h: &HyperWeights) -> Result<GeneratorOperator, GapError> {
    let n = h.n();
    check_permutation_capacity(n)?;
    let states = perm::all(n);
    let mut b = Builder::new(states.len());
    let mut buf = vec![0u8; n];
    for (set, alpha) in h.rates() {
        if alpha == 0.0 {
            continue;
        }
        let arrangements = perm::all(set.len());
        let share = alpha / arrangements.len() as f64;
        for (s, sigma) in states.iter().enumerate() {
            for arr in arrangements.iter().skip(1) {
                // arr[0] is the identity, which only feeds the diagonal
                buf.copy_from_slice(sigma);
                for (slot, &src) in set.iter().zip(arr) {
                    buf[*slot] = sigma[set[src as usize]];
                }
                let t = perm::rank(&buf);
                b.add(s, t, share);
                b.add(s, s, -share);
            }
        }
    }
    Ok(GeneratorOperator { space: StateSpace::Permutations { n }, q: b.finish() })
}

/// Rates of a single tagged particle under the α-shuffle:
/// `c_α(i, j) = Σ_{A ∋ i, j} α_A / |A|`.
pub fn alpha_single_particle_rates(h: &HyperWeights) -> WeightedGraph {
    let n = h.n();
    let mut edges = Vec::new();
    for (set, alpha) in h.rates() {
        let share = alpha / set.len() as f64;
        for (a, &i) in set.iter().enumerate() {
            for &j in &set[a + 1..] {
                edges.push((i, j, share));
            }
        }
    }
    WeightedGraph::from_edges(n, &edges).expect("subsets were validated")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_vertex_interchange() {
        let g = WeightedGraph::from_edges(2, &[(0, 1, 0.7)]).unwrap();
        let q = interchange_generator(&g).unwrap().to_dense();
        assert_eq!(q, DMatrix::from_row_slice(2, 2, &[-0.7, 0.7, 0.7, -0.7]));
    }

    #[test]
    fn capacity_errors() {
        assert!(matches!(interchange_generator(&WeightedGraph::path(8, 1.0)), Err(GapError::Capacity { .. })));
        assert!(matches!(interchange_generator(&WeightedGraph::empty(1)), Err(GapError::Capacity { .. })));
        assert!(matches!(exclusion_generator(&WeightedGraph::path(3, 1.0), 3), Err(GapError::Argument(_))));
        assert!(matches!(exclusion_generator(&WeightedGraph::path(3, 1.0), 0), Err(GapError::Argument(_))));
    }

    #[test]
    fn one_particle_exclusion_is_random_walk() {
        let g = WeightedGraph::from_edges(4, &[(0, 1, 0.3), (1, 2, 1.5), (0, 3, 0.2), (2, 3, 0.9)]).unwrap();
        let ex = exclusion_generator(&g, 1).unwrap();
        let rw = rw_generator(&g).unwrap();
        assert_eq!(ex.to_dense(), rw.to_dense());
    }

    #[test]
    fn generators_satisfy_invariants() {
        let g = WeightedGraph::from_edges(4, &[(0, 1, 0.3), (1, 2, 1.5), (0, 3, 0.2), (2, 3, 0.9), (0, 2, 0.1)]).unwrap();
        interchange_generator(&g).unwrap().check_invariants(1e-12).unwrap();
        rw_generator(&g).unwrap().check_invariants(1e-12).unwrap();
        for k in 1..4 {
            exclusion_generator(&g, k).unwrap().check_invariants(1e-12).unwrap();
        }
        let mut h = HyperWeights::new(4);
        h.add(&[0, 1, 2], 0.4).unwrap();
        h.add(&[1, 3], 0.8).unwrap();
        h.add(&[0, 1, 2, 3], 0.1).unwrap();
        alpha_shuffle_generator(&h).unwrap().check_invariants(1e-12).unwrap();
    }

    #[test]
    fn pair_shuffle_is_half_interchange() {
        let g = WeightedGraph::from_edges(4, &[(0, 1, 0.3), (1, 2, 1.5), (0, 3, 0.2), (2, 3, 0.9)]).unwrap();
        let ip = interchange_generator(&g).unwrap().to_dense();
        let sh = alpha_shuffle_generator(&HyperWeights::from_graph_pairs(&g)).unwrap().to_dense();
        assert!((sh * 2.0 - ip).abs().max() <= 1e-12);
    }

    #[test]
    fn full_shuffle_rows() {
        let mut h = HyperWeights::new(3);
        h.add(&[0, 1, 2], 1.0).unwrap();
        let q = alpha_shuffle_generator(&h).unwrap().to_dense();
        for i in 0..6 {
            for j in 0..6 {
                let expected = if i == j { -5.0 / 6.0 } else { 1.0 / 6.0 };
                assert!((q[(i, j)] - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn single_particle_rates() {
        let mut h = HyperWeights::new(3);
        h.add(&[0, 1, 2], 1.0).unwrap();
        let c = alpha_single_particle_rates(&h);
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            assert!((c.weight(i, j) - 1.0 / 3.0).abs() < 1e-15);
        }
        let g = WeightedGraph::path(3, 0.8);
        let c = alpha_single_particle_rates(&HyperWeights::from_graph_pairs(&g));
        assert_eq!(c.weight(0, 1), 0.4);
        assert_eq!(c.weight(0, 2), 0.0);
        assert!(alpha_single_particle_rates(&HyperWeights::new(3)).edges().is_empty());
    }

    #[test]
    fn subset_order() {
        assert_eq!(subsets(3, 2), vec![0b011, 0b101, 0b110]);
        assert_eq!(subsets(4, 1), vec![1, 2, 4, 8]);
        assert_eq!(subsets(5, 2).len(), 10);
    }
}
