//! Voter model on a finite graph and its coalescing random walk dual.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::gaplab::WeightedGraph;

use super::rng::{exp_time, trial_rng};
use super::stats::mean_var;
use super::SimError;

/// Unweighted simple graph as adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimpleGraph {
    adj: Vec<Vec<usize>>,
}

impl SimpleGraph {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, SimError> {
        let mut adj = vec![Vec::new(); n];
        for &(i, j) in edges {
            if i >= n || j >= n || i == j {
                return Err(SimError::Argument(format!("bad edge ({i}, {j}) on {n} vertices")));
            }
            if !adj[i].contains(&j) {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
        adj.iter_mut().for_each(|a| a.sort_unstable());
        Ok(Self { adj })
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least 3 vertices");
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::from_edges(n, &edges).expect("cycle edges are valid")
    }

    /// Support of a weighted graph; weights are dropped.
    pub fn from_weighted(g: &WeightedGraph) -> Self {
        let edges: Vec<_> = g.edges().into_iter().map(|(i, j, _)| (i, j)).collect();
        Self::from_edges(g.n(), &edges).expect("weighted graph edges are valid")
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn is_regular(&self) -> bool {
        self.adj.windows(2).all(|w| w[0].len() == w[1].len())
    }

    fn random_neighbor<R: Rng>(&self, v: usize, rng: &mut R) -> usize {
        let a = &self.adj[v];
        a[rng.gen_range(0..a.len())]
    }

    fn require_connected(&self) -> Result<(), SimError> {
        if self.is_connected() {
            Ok(())
        } else {
            Err(SimError::Argument("voter dynamics need a connected graph".into()))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VoterConfig {
    pub graph: SimpleGraph,
    pub opinions: Vec<u8>,
    /// Record the fraction of 1s on this time grid.
    pub sample_dt: Option<f64>,
}

impl VoterConfig {
    pub fn new(graph: SimpleGraph, opinions: Vec<u8>) -> Result<Self, SimError> {
        if opinions.len() != graph.n() {
            return Err(SimError::Argument(format!("{} opinions for {} vertices", opinions.len(), graph.n())));
        }
        if opinions.iter().any(|&o| o > 1) {
            return Err(SimError::Argument("opinions must be 0 or 1".into()));
        }
        Ok(Self { graph, opinions, sample_dt: None })
    }

    /// I.i.d. Bernoulli(`rho`) opinions.
    pub fn with_density<R: Rng>(graph: SimpleGraph, rho: f64, rng: &mut R) -> Result<Self, SimError> {
        check_density(rho)?;
        let opinions = (0..graph.n()).map(|_| rng.gen_bool(rho) as u8).collect();
        Self::new(graph, opinions)
    }
}

fn check_density(rho: f64) -> Result<(), SimError> {
    if (0.0..=1.0).contains(&rho) {
        Ok(())
    } else {
        Err(SimError::Argument(format!("density must lie in [0, 1], got {rho}")))
    }
}

fn check_time(t: f64) -> Result<(), SimError> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(SimError::Argument(format!("time horizon must be finite and nonnegative, got {t}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VoterOutcome {
    pub consensus_time: Option<f64>,
    pub final_opinions: Vec<u8>,
    /// `(t, fraction of 1s)` on the sampling grid.
    pub ones_path: Vec<(f64, f64)>,
    pub events: u64,
}

pub fn simulate_voter(cfg: &VoterConfig, t_max: f64, seed: u64) -> Result<VoterOutcome, SimError> {
    simulate_voter_with(cfg, t_max, &mut trial_rng(seed, 0))
}

/// Every vertex wakes at rate 1 and copies a uniformly chosen neighbor. Stops
/// at `t_max` or at consensus, whichever comes first.
pub fn simulate_voter_with(cfg: &VoterConfig, t_max: f64, rng: &mut ChaCha8Rng) -> Result<VoterOutcome, SimError> {
    check_time(t_max)?;
    let g = &cfg.graph;
    g.require_connected()?;
    let n = g.n();
    let mut op = cfg.opinions.clone();
    let mut ones = op.iter().filter(|&&o| o == 1).count();
    let unanimous = |ones: usize| ones == 0 || ones == n;
    let mut path = Vec::new();
    let mut next_sample = 0.0;
    let mut t = 0.0;
    let mut events = 0u64;
    let mut consensus_time = unanimous(ones).then_some(0.0);
    while consensus_time.is_none() {
        let t_next = t + exp_time(rng, n as f64);
        if let Some(step) = cfg.sample_dt {
            while next_sample <= t_next.min(t_max) {
                path.push((next_sample, ones as f64 / n as f64));
                next_sample += step;
            }
        }
        if t_next > t_max {
            break;
        }
        t = t_next;
        let v = rng.gen_range(0..n);
        let w = g.random_neighbor(v, rng);
        events += 1;
        if op[v] != op[w] {
            if op[w] == 1 {
                ones += 1;
            } else {
                ones -= 1;
            }
            op[v] = op[w];
            if unanimous(ones) {
                consensus_time = Some(t);
            }
        }
    }
    if let Some(step) = cfg.sample_dt {
        while next_sample <= t_max {
            path.push((next_sample, ones as f64 / n as f64));
            next_sample += step;
        }
    }
    Ok(VoterOutcome { consensus_time, final_opinions: op, ones_path: path, events })
}

/// Coalescing rate-1 walkers started on `start`, each stepping to a uniform
/// neighbor; walkers that meet merge. Returns the number of distinct walkers
/// left at time `t`.
pub fn coalescing_walkers<R: Rng>(graph: &SimpleGraph, start: &[usize], t: f64, rng: &mut R) -> Result<usize, SimError> {
    check_time(t)?;
    check_vertex_set(graph, start)?;
    let mut walkers: Vec<usize> = start.to_vec();
    walkers.sort_unstable();
    walkers.dedup();
    let mut clock = 0.0;
    while walkers.len() > 1 {
        clock += exp_time(rng, walkers.len() as f64);
        if clock > t {
            break;
        }
        let k = rng.gen_range(0..walkers.len());
        let to = graph.random_neighbor(walkers[k], rng);
        if walkers.contains(&to) {
            walkers.swap_remove(k);
        } else {
            walkers[k] = to;
        }
    }
    Ok(walkers.len())
}

fn check_vertex_set(graph: &SimpleGraph, set: &[usize]) -> Result<(), SimError> {
    if set.is_empty() {
        return Err(SimError::Argument("vertex set must be nonempty".into()));
    }
    if let Some(&v) = set.iter().find(|&&v| v >= graph.n()) {
        return Err(SimError::Argument(format!("vertex {v} outside 0..{}", graph.n())));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DualityCheck {
    /// Frequency of `ξ_t ≡ 1` on the set.
    pub lhs: f64,
    /// Mean of `ρ^(walkers left)`.
    pub rhs: f64,
    pub lhs_se: f64,
    pub rhs_se: f64,
    pub z_score: f64,
    pub trials: u64,
    pub seed: u64,
}

/// Two independent Monte Carlo estimates of both sides of the duality
/// `P(ξ_t ≡ 1 on A) = E[ρ^|ζ_t^A|]`. Trial `k` draws its voter run from
/// stream `2k` and its walkers from stream `2k + 1`.
pub fn duality_check(
    graph: &SimpleGraph,
    set: &[usize],
    t: f64,
    rho: f64,
    trials: u64,
    seed: u64,
) -> Result<DualityCheck, SimError> {
    check_density(rho)?;
    check_time(t)?;
    check_vertex_set(graph, set)?;
    graph.require_connected()?;
    if trials < 2 {
        return Err(SimError::Argument("need at least two trials".into()));
    }
    let samples = (0..trials)
        .into_par_iter()
        .map(|k| -> Result<(f64, f64), SimError> {
            let mut rng = trial_rng(seed, 2 * k);
            let cfg = VoterConfig::with_density(graph.clone(), rho, &mut rng)?;
            let out = simulate_voter_with(&cfg, t, &mut rng)?;
            let lhs = set.iter().all(|&v| out.final_opinions[v] == 1) as u8 as f64;
            let left = coalescing_walkers(graph, set, t, &mut trial_rng(seed, 2 * k + 1))?;
            Ok((lhs, rho.powi(left as i32)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let (l, r): (Vec<f64>, Vec<f64>) = samples.into_iter().unzip();
    let (lhs, lv) = mean_var(&l);
    let (rhs, rv) = mean_var(&r);
    let n = trials as f64;
    let (lhs_se, rhs_se) = ((lv / n).sqrt(), (rv / n).sqrt());
    let se = (lv / n + rv / n).sqrt();
    let z_score = if se > 0.0 {
        (lhs - rhs) / se
    } else if lhs == rhs {
        0.0
    } else {
        f64::INFINITY.copysign(lhs - rhs)
    };
    Ok(DualityCheck { lhs, rhs, lhs_se, rhs_se, z_score, trials, seed })
}
