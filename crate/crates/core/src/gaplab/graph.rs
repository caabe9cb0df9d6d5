use std::collections::BTreeMap;

use super::GapError;

/// Symmetric nonnegative conductances on `n` vertices, zero diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    weights: Vec<f64>,
    connected: bool,
}

impl WeightedGraph {
    pub fn empty(n: usize) -> Self {
        Self { n, weights: vec![0.0; n * n], connected: n <= 1 }
    }

    /// Builds a graph from `(i, j, c)` triples; repeated pairs are summed.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self, GapError> {
        let mut weights = vec![0.0; n * n];
        for &(i, j, c) in edges {
            if i >= n || j >= n {
                return Err(GapError::Argument(format!("edge ({i}, {j}) outside 0..{n}")));
            }
            if i == j {
                return Err(GapError::Argument(format!("self-loop at {i}")));
            }
            if !(c.is_finite() && c >= 0.0) {
                return Err(GapError::Argument(format!("weight {c} on ({i}, {j}) is not a finite nonnegative number")));
            }
            weights[i * n + j] += c;
            weights[j * n + i] += c;
        }
        Ok(Self::from_dense_unchecked(n, weights))
    }

    /// Row-major `n x n` weights; must be symmetric with zero diagonal.
    pub fn from_dense(n: usize, weights: Vec<f64>) -> Result<Self, GapError> {
        if weights.len() != n * n {
            return Err(GapError::DimensionMismatch { expected: n * n, found: weights.len() });
        }
        for i in 0..n {
            if weights[i * n + i] != 0.0 {
                return Err(GapError::Argument(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let c = weights[i * n + j];
                if !(c.is_finite() && c >= 0.0) || c != weights[j * n + i] {
                    return Err(GapError::Argument(format!("weights not symmetric nonnegative at ({i}, {j})")));
                }
            }
        }
        Ok(Self::from_dense_unchecked(n, weights))
    }

    fn from_dense_unchecked(n: usize, weights: Vec<f64>) -> Self {
        let mut g = Self { n, weights, connected: false };
        g.connected = g.compute_connected();
        g
    }

    pub fn complete(n: usize, c: f64) -> Self {
        let edges: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j, c))).collect();
        Self::from_edges(n, &edges).expect("valid complete graph")
    }

    pub fn path(n: usize, c: f64) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i, c)).collect();
        Self::from_edges(n, &edges).expect("valid path")
    }

    /// Vertex 0 joined to every other vertex.
    pub fn star(n: usize, c: f64) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (0, i, c)).collect();
        Self::from_edges(n, &edges).expect("valid star")
    }

    pub fn cycle(n: usize, c: f64) -> Self {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, c)).collect();
        Self::from_edges(n, &edges).expect("valid cycle")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n + j]
    }

    /// Edges `(i, j, c)` with `i < j` and `c > 0`.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                let c = self.weight(i, j);
                if c > 0.0 {
                    out.push((i, j, c));
                }
            }
        }
        out
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| self.weight(i, j) > 0.0)
    }

    /// Total conductance at `i`.
    pub fn strength(&self, i: usize) -> f64 {
        self.weights[i * self.n..(i + 1) * self.n].iter().sum()
    }

    /// Whether the positive-weight support is connected.
    pub fn is_connected(&self) -> bool {
        self.connected
    }

    fn compute_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for u in 0..self.n {
                if !seen[u] && self.weight(v, u) > 0.0 {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Vertex-relabelled copy: vertex `v` of `self` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let n = self.n;
        let mut w = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                w[perm[i] * n + perm[j]] = self.weight(i, j);
            }
        }
        Self::from_dense_unchecked(n, w)
    }
}

/// Rates `α_A >= 0` on vertex subsets with at least two elements.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HyperWeights {
    n: usize,
    rates: BTreeMap<Vec<usize>, f64>,
}

impl HyperWeights {
    pub fn new(n: usize) -> Self {
        Self { n, rates: BTreeMap::new() }
    }

    /// Adds `rate` to the subset `set` (order and duplicates are normalized away).
    pub fn add(&mut self, set: &[usize], rate: f64) -> Result<(), GapError> {
        let mut s = set.to_vec();
        s.sort_unstable();
        s.dedup();
        if s.len() != set.len() {
            return Err(GapError::Argument(format!("repeated vertex in {set:?}")));
        }
        if s.len() < 2 {
            return Err(GapError::Argument(format!("subset {set:?} has fewer than two vertices")));
        }
        if let Some(&v) = s.iter().find(|&&v| v >= self.n) {
            return Err(GapError::Argument(format!("vertex {v} outside 0..{}", self.n)));
        }
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(GapError::Argument(format!("rate {rate} is not a finite nonnegative number")));
        }
        *self.rates.entry(s).or_insert(0.0) += rate;
        Ok(())
    }

    /// `α_{ij} = c(i, j)` on every edge.
    pub fn from_graph_pairs(g: &WeightedGraph) -> Self {
        let mut h = Self::new(g.n());
        for (i, j, c) in g.edges() {
            h.add(&[i, j], c).expect("edges are valid pairs");
        }
        h
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rates(&self) -> impl Iterator<Item = (&[usize], f64)> {
        self.rates.iter().map(|(s, &r)| (s.as_slice(), r))
    }

    pub fn is_zero(&self) -> bool {
        self.rates.values().all(|&r| r == 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_and_connectivity() {
        let g = WeightedGraph::path(3, 1.0);
        assert!(g.is_connected());
        assert_eq!(g.edges(), vec![(0, 1, 1.0), (1, 2, 1.0)]);
        assert_eq!(g.strength(1), 2.0);
        let split = WeightedGraph::from_edges(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert!(!split.is_connected());
        let doubled = WeightedGraph::from_edges(2, &[(0, 1, 0.5), (1, 0, 0.25)]).unwrap();
        assert_eq!(doubled.weight(0, 1), 0.75);
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(WeightedGraph::from_edges(2, &[(0, 0, 1.0)]).is_err());
        assert!(WeightedGraph::from_edges(2, &[(0, 1, -1.0)]).is_err());
        assert!(WeightedGraph::from_edges(2, &[(0, 2, 1.0)]).is_err());
        assert!(WeightedGraph::from_dense(2, vec![0.0, 1.0, 2.0, 0.0]).is_err());
    }

    #[test]
    fn hyperweights_validate() {
        let mut h = HyperWeights::new(3);
        h.add(&[2, 0], 0.5).unwrap();
        h.add(&[0, 2], 0.5).unwrap();
        assert_eq!(h.rates().collect::<Vec<_>>(), vec![(&[0usize, 2][..], 1.0)]);
        assert!(h.add(&[1], 1.0).is_err());
        assert!(h.add(&[1, 1], 1.0).is_err());
        assert!(h.add(&[0, 3], 1.0).is_err());
        assert!(h.add(&[0, 1], f64::NAN).is_err());
    }
}
