use serde::{Deserialize, Serialize};

use super::generator::{
    alpha_shuffle_generator, alpha_single_particle_rates, exclusion_generator, interchange_generator, rw_generator,
};
use super::graph::{HyperWeights, WeightedGraph};
use super::spectral::{gap_with_zero_count, spectral_gap, SpectralOptions};
use super::GapError;

#[derive(Clone, Debug, PartialEq)]
pub struct GapOptions {
    pub spectral: SpectralOptions,
    /// Relative tolerance for gap comparisons.
    pub rtol: f64,
    /// Compare the α-shuffle with its single-particle walk.
    pub shuffle: Option<HyperWeights>,
}

impl Default for GapOptions {
    fn default() -> Self {
        Self { spectral: SpectralOptions::default(), rtol: 1e-8, shuffle: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ShuffleComparison {
    pub lambda_shuffle: f64,
    pub lambda_single_particle: f64,
    /// Whether the two gaps agree within `rtol`. A mismatch is reported,
    /// never treated as an error.
    pub gaps_agree: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GapReport {
    pub n: usize,
    #[serde(rename = "lambdaIP")]
    pub lambda_ip: f64,
    #[serde(rename = "lambdaRW")]
    pub lambda_rw: f64,
    /// Gap of the exclusion process with `k` particles at index `k - 1`.
    pub exclusion_gaps: Vec<f64>,
    pub lambda_shuffle: Option<ShuffleComparison>,
    /// Zero eigenvalues of the interchange generator.
    pub zero_eig_count: usize,
    /// `|λ_IP - λ_RW| <= rtol λ_RW`.
    pub identity_holds: bool,
    /// `λ_IP <= (1 + rtol) λ_RW`.
    pub contraction_holds: bool,
    /// Every exclusion gap equals `λ_RW` within `rtol`.
    pub exclusion_constant: bool,
    pub tol_zero: f64,
    pub rtol: f64,
}

pub fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

pub fn gap_report(g: &WeightedGraph, opts: &GapOptions) -> Result<GapReport, GapError> {
    if !g.is_connected() {
        return Err(GapError::Argument("graph is not connected".into()));
    }
    let sp = &opts.spectral;
    let lambda_rw = spectral_gap(&rw_generator(g)?, sp)?;
    let ip = gap_with_zero_count(&interchange_generator(g)?, sp)?;
    let exclusion_gaps = (1..g.n())
        .map(|k| spectral_gap(&exclusion_generator(g, k)?, sp))
        .collect::<Result<Vec<_>, _>>()?;
    let lambda_shuffle = match &opts.shuffle {
        Some(h) => {
            if h.n() != g.n() {
                return Err(GapError::DimensionMismatch { expected: g.n(), found: h.n() });
            }
            let lambda_shuffle = spectral_gap(&alpha_shuffle_generator(h)?, sp)?;
            let lambda_single_particle = spectral_gap(&rw_generator(&alpha_single_particle_rates(h))?, sp)?;
            Some(ShuffleComparison {
                lambda_shuffle,
                lambda_single_particle,
                gaps_agree: relative_gap(lambda_shuffle, lambda_single_particle) <= opts.rtol,
            })
        }
        None => None,
    };
    Ok(GapReport {
        n: g.n(),
        lambda_ip: ip.gap,
        lambda_rw,
        identity_holds: relative_gap(ip.gap, lambda_rw) <= opts.rtol,
        contraction_holds: ip.gap <= lambda_rw * (1.0 + opts.rtol),
        exclusion_constant: exclusion_gaps.iter().all(|&x| relative_gap(x, lambda_rw) <= opts.rtol),
        exclusion_gaps,
        lambda_shuffle,
        zero_eig_count: ip.zero_eig_count,
        tol_zero: sp.tol_zero,
        rtol: opts.rtol,
    })
}
