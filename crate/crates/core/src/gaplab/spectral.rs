//! Spectral gaps of reversible generators.
//!
//! Operators with at most [`MAX_DENSE_DIM`] states get a full dense symmetric
//! eigendecomposition. Larger ones (the 5040 permutations of seven vertices)
//! use Lanczos with full reorthogonalization, restricted to the complement of
//! the constant vector, and must be enabled explicitly.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::generator::{GeneratorOperator, SparseSymmetric, MAX_DENSE_DIM};
use super::GapError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SpectralOptions {
    /// Eigenvalues below `tol_zero` times the largest eigenvalue magnitude
    /// count as zero.
    pub tol_zero: f64,
    /// Permit the iterative path for operators above the dense limit.
    pub allow_iterative: bool,
    /// Force the iterative path even for small operators.
    pub force_iterative: bool,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self { tol_zero: 1e-9, allow_iterative: false, force_iterative: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GapValue {
    pub gap: f64,
    pub zero_eig_count: usize,
}

/// Smallest eigenvalue of `-Q` above the zero threshold.
pub fn spectral_gap(op: &GeneratorOperator, opts: &SpectralOptions) -> Result<f64, GapError> {
    gap_with_zero_count(op, opts).map(|g| g.gap)
}

pub fn gap_with_zero_count(op: &GeneratorOperator, opts: &SpectralOptions) -> Result<GapValue, GapError> {
    let dim = op.dim();
    if dim > MAX_DENSE_DIM || opts.force_iterative {
        if !opts.allow_iterative && !opts.force_iterative {
            return Err(GapError::DenseLimit { dim, max: MAX_DENSE_DIM });
        }
        return lanczos_gap(&op.negated(), opts.tol_zero);
    }
    let eig = eigenvalues(&op.negated().to_dense());
    gap_from_spectrum(&eig, opts.tol_zero)
}

/// Eigenvalues of a dense symmetric matrix in ascending order.
pub fn eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn gap_from_spectrum(sorted: &[f64], tol_zero: f64) -> Result<GapValue, GapError> {
    let scale = sorted.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Err(GapError::Degenerate);
    }
    let threshold = tol_zero * scale;
    let zero_eig_count = sorted.iter().filter(|v| v.abs() <= threshold).count();
    if let Some(&neg) = sorted.iter().find(|&&v| v < -threshold) {
        return Err(GapError::Invariant(format!("negated generator has eigenvalue {neg:e} < 0")));
    }
    if zero_eig_count > 1 {
        return Err(GapError::Reducible { zero_eig_count });
    }
    let gap = sorted.iter().copied().find(|&v| v > threshold).ok_or(GapError::Degenerate)?;
    Ok(GapValue { gap, zero_eig_count })
}

/// Smallest eigenvalue of a symmetric matrix; dense up to the dense limit,
/// Lanczos beyond it when allowed.
pub fn min_eigenvalue(m: &SparseSymmetric, allow_iterative: bool) -> Result<f64, GapError> {
    if m.dim() <= MAX_DENSE_DIM {
        return Ok(eigenvalues(&m.to_dense())[0]);
    }
    if !allow_iterative {
        return Err(GapError::DenseLimit { dim: m.dim(), max: MAX_DENSE_DIM });
    }
    Ok(lanczos_smallest(m, false).0)
}

fn lanczos_gap(neg_q: &SparseSymmetric, tol_zero: f64) -> Result<GapValue, GapError> {
    let scale = neg_q.norm_inf();
    if scale == 0.0 {
        return Err(GapError::Degenerate);
    }
    let (gap, _) = lanczos_smallest(neg_q, true);
    if gap <= tol_zero * scale {
        // a second zero eigenvalue besides the constants
        return Err(GapError::Reducible { zero_eig_count: 2 });
    }
    Ok(GapValue { gap, zero_eig_count: 1 })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn project_out_constant(v: &mut [f64]) {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= mean);
}

/// Smallest Ritz value of `m` (optionally on the complement of constants) and
/// the number of Lanczos steps taken.
fn lanczos_smallest(m: &SparseSymmetric, deflate_constant: bool) -> (f64, usize) {
    let dim = m.dim();
    let max_steps = if deflate_constant { dim - 1 } else { dim }.min(400);
    let tol = 1e-12 * m.norm_inf().max(f64::MIN_POSITIVE);
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a2c_2005);
    let mut v: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() - 0.5).collect();
    if deflate_constant {
        project_out_constant(&mut v);
    }
    let norm = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|x| *x /= norm);

    let mut basis: Vec<Vec<f64>> = vec![v];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    loop {
        let j = basis.len() - 1;
        let mut w = m.apply(&basis[j]);
        let a = dot(&w, &basis[j]);
        alphas.push(a);
        if deflate_constant {
            project_out_constant(&mut w);
        }
        // two passes of full reorthogonalization
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&w, b);
                axpy(-c, b, &mut w);
            }
        }
        let beta = dot(&w, &w).sqrt();
        let k = alphas.len();
        let t = DMatrix::from_fn(k, k, |r, c| {
            if r == c {
                alphas[r]
            } else if r + 1 == c || c + 1 == r {
                betas[r.min(c)]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        let (idx, &theta) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty tridiagonal");
        let residual = (beta * eig.eigenvectors[(k - 1, idx)]).abs();
        if residual < tol || beta < tol || k >= max_steps {
            return (theta, k);
        }
        betas.push(beta);
        w.iter_mut().for_each(|x| *x /= beta);
        basis.push(w);
    }
}

/// `ℰ(f) = -⟨f, Q f⟩` under the uniform measure.
pub fn dirichlet_form(op: &GeneratorOperator, f: &[f64]) -> Result<f64, GapError> {
    if f.len() != op.dim() {
        return Err(GapError::DimensionMismatch { expected: op.dim(), found: f.len() });
    }
    Ok(-op.matrix().quadratic_form(f) / f.len() as f64)
}

/// Variance of `f` under the uniform measure.
pub fn variance(f: &[f64]) -> f64 {
    let n = f.len() as f64;
    let mean = f.iter().sum::<f64>() / n;
    f.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n
}

/// Eigenvector of `-Q` for the spectral gap (dense path only).
pub fn gap_eigenvector(op: &GeneratorOperator, opts: &SpectralOptions) -> Result<Vec<f64>, GapError> {
    if op.dim() > MAX_DENSE_DIM {
        return Err(GapError::DenseLimit { dim: op.dim(), max: MAX_DENSE_DIM });
    }
    let gap = spectral_gap(op, opts)?;
    let eig = SymmetricEigen::new(op.negated().to_dense());
    let idx = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - gap).abs().total_cmp(&(b.1 - gap).abs()))
        .map(|(i, _)| i)
        .expect("nonempty spectrum");
    let col: DVector<f64> = eig.eigenvectors.column(idx).into_owned();
    Ok(col.iter().copied().collect())
}
