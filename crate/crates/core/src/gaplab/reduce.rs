//! One-vertex network reduction and the octopus form.

use super::generator::{interchange_generator, Builder, SparseSymmetric, MAX_PERMUTATION_VERTICES};
use super::graph::WeightedGraph;
use super::perm;
use super::spectral::{dirichlet_form, min_eigenvalue};
use super::GapError;

fn hub_strength(g: &WeightedGraph, i: usize) -> Result<f64, GapError> {
    if i >= g.n() {
        return Err(GapError::Argument(format!("vertex {i} outside 0..{}", g.n())));
    }
    let s = g.strength(i);
    if s <= 0.0 {
        return Err(GapError::IsolatedVertex(i));
    }
    Ok(s)
}

/// Conductances after eliminating `i`, still indexed over all `n` vertices
/// with `i` isolated.
pub fn reduced_weights_in_place(g: &WeightedGraph, i: usize) -> Result<WeightedGraph, GapError> {
    let s = hub_strength(g, i)?;
    let n = g.n();
    let mut w = vec![0.0; n * n];
    for j in (0..n).filter(|&j| j != i) {
        for k in (0..n).filter(|&k| k != i && k != j) {
            w[j * n + k] = g.weight(j, k) + g.weight(i, j) * g.weight(i, k) / s;
        }
    }
    WeightedGraph::from_dense(n, w)
}

/// Star-mesh reduction: `c'(j, k) = c(j, k) + c(i, j) c(i, k) / Σ_ℓ c(i, ℓ)`.
/// Vertices above `i` shift down by one.
pub fn reduce_vertex(g: &WeightedGraph, i: usize) -> Result<WeightedGraph, GapError> {
    let full = reduced_weights_in_place(g, i)?;
    let keep: Vec<usize> = (0..g.n()).filter(|&v| v != i).collect();
    let m = keep.len();
    let mut w = vec![0.0; m * m];
    for (a, &j) in keep.iter().enumerate() {
        for (b, &k) in keep.iter().enumerate() {
            w[a * m + b] = full.weight(j, k);
        }
    }
    WeightedGraph::from_dense(m, w)
}

/// The octopus matrix at hub `i`, over permutations of the vertices:
///
/// `C = Σ_ℓ c(i,ℓ)(I - T_iℓ) - ½ Σ_{j≠k} c(i,j)c(i,k)/Σ_ℓ c(i,ℓ) (I - T_jk)`
///
/// with `T_τ` the permutation matrix of swapping the entries at two vertices
/// and the second sum over ordered pairs of vertices other than `i`.
pub fn octopus_form(g: &WeightedGraph, i: usize) -> Result<SparseSymmetric, GapError> {
    let n = g.n();
    if !(2..=MAX_PERMUTATION_VERTICES).contains(&n) {
        return Err(GapError::Capacity { n, max: MAX_PERMUTATION_VERTICES });
    }
    let s = hub_strength(g, i)?;
    let mut terms: Vec<(usize, usize, f64)> = Vec::new();
    for l in (0..n).filter(|&l| l != i) {
        terms.push((i, l, g.weight(i, l)));
    }
    for j in (0..n).filter(|&j| j != i) {
        for k in (0..n).filter(|&k| k != i && k != j) {
            terms.push((j, k, -0.5 * g.weight(i, j) * g.weight(i, k) / s));
        }
    }
    let states = perm::all(n);
    let mut b = Builder::new(states.len());
    let mut buf = vec![0u8; n];
    for (st, sigma) in states.iter().enumerate() {
        for &(a, c, coeff) in &terms {
            if coeff == 0.0 {
                continue;
            }
            buf.copy_from_slice(sigma);
            buf.swap(a, c);
            b.add(st, st, coeff);
            b.add(st, perm::rank(&buf), -coeff);
        }
    }
    Ok(b.finish())
}

/// Minimum eigenvalue of the octopus matrix; the iterative path is needed
/// for seven vertices.
pub fn octopus_min_eigenvalue(g: &WeightedGraph, i: usize, allow_iterative: bool) -> Result<(f64, f64), GapError> {
    let c = octopus_form(g, i)?;
    let norm = c.norm_inf();
    Ok((min_eigenvalue(&c, allow_iterative)?, norm))
}

/// `ν[ℰ_{G_i}(g)]`: the reduced graph's interchange Dirichlet form applied to
/// `f` with the label at `i` frozen, averaged over that label. Equals the
/// Dirichlet form of the reduced conductances acting on all of `S_n` with `i`
/// isolated.
pub fn reduced_dirichlet_average(g: &WeightedGraph, i: usize, f: &[f64]) -> Result<f64, GapError> {
    let reduced = reduced_weights_in_place(g, i)?;
    dirichlet_form(&interchange_generator(&reduced)?, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaplab::spectral::eigenvalues;

    #[test]
    fn series_reduction() {
        let g = WeightedGraph::path(3, 1.0);
        let r = reduce_vertex(&g, 1).unwrap();
        assert_eq!(r.n(), 2);
        assert!((r.weight(0, 1) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn star_triangle() {
        let g = WeightedGraph::star(4, 1.0);
        let r = reduce_vertex(&g, 0).unwrap();
        assert_eq!(r.n(), 3);
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            assert!((r.weight(a, b) - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn leaf_removal_adds_nothing() {
        let g = WeightedGraph::from_edges(4, &[(0, 1, 0.4), (1, 2, 0.7), (2, 3, 0.2), (1, 3, 0.5)]).unwrap();
        let r = reduce_vertex(&g, 0).unwrap();
        assert_eq!(r.weight(0, 1), 0.7);
        assert_eq!(r.weight(0, 2), 0.5);
        assert_eq!(r.weight(1, 2), 0.2);
    }

    #[test]
    fn isolated_hub_is_an_error() {
        let g = WeightedGraph::from_edges(3, &[(0, 1, 1.0)]).unwrap();
        assert!(matches!(reduce_vertex(&g, 2), Err(GapError::IsolatedVertex(2))));
        assert!(matches!(octopus_form(&g, 2), Err(GapError::IsolatedVertex(2))));
        assert!(matches!(reduce_vertex(&g, 5), Err(GapError::Argument(_))));
    }

    #[test]
    fn single_edge_octopus() {
        let g = WeightedGraph::from_edges(2, &[(0, 1, 0.6)]).unwrap();
        let eig = eigenvalues(&octopus_form(&g, 0).unwrap().to_dense());
        assert!(eig[0].abs() < 1e-15 && (eig[1] - 1.2).abs() < 1e-15);
    }

    #[test]
    fn complete_triangle_octopus_is_psd() {
        let g = WeightedGraph::complete(3, 1.0);
        let (min, _) = octopus_min_eigenvalue(&g, 0, false).unwrap();
        assert!(min >= -1e-9, "{min}");
    }

    #[test]
    fn octopus_form_is_energy_difference() {
        // f^T C f = n! (ℰ_G(f) - ν[ℰ_{G_i}(g)])
        let g = WeightedGraph::from_edges(4, &[(0, 1, 0.4), (1, 2, 0.7), (2, 3, 0.2), (0, 3, 0.9), (0, 2, 0.3)])
            .unwrap();
        let f: Vec<f64> = (0..24).map(|s| ((s * 7919) % 23) as f64 / 23.0 - 0.4).collect();
        let full = dirichlet_form(&interchange_generator(&g).unwrap(), &f).unwrap();
        for hub in 0..4 {
            let c = octopus_form(&g, hub).unwrap();
            let reduced = reduced_dirichlet_average(&g, hub, &f).unwrap();
            let lhs = c.quadratic_form(&f);
            assert!((lhs - 24.0 * (full - reduced)).abs() < 1e-12, "hub {hub}");
        }
    }
}
