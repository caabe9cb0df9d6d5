//! Contact process on a finite interval, and its right edge from a half-line.
//!
//! Both are exact event-driven simulations: every site carries its current
//! flip rate in a Fenwick tree, holding times are exponential in the total
//! rate, and the flipping site is drawn proportionally to its rate.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::rng::{exp_time, trial_rng};
use super::stats::{ls_slope, mean_var, wilson_interval};
use super::SimError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ContactMode {
    /// Vacant sites are born at rate `λ` times the number of occupied neighbors.
    Standard,
    /// Vacant sites are born at rate `λ` when at least one neighbor is occupied.
    Threshold,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContactConfig {
    /// Sites are `1..=length`; everything outside is vacant forever.
    pub length: usize,
    pub lambda: f64,
    pub neighborhood: Vec<i64>,
    pub mode: ContactMode,
    /// Record the right edge on this time grid.
    pub edge_sample_dt: Option<f64>,
}

impl ContactConfig {
    pub fn standard(length: usize, lambda: f64) -> Self {
        Self { length, lambda, neighborhood: vec![-1, 1], mode: ContactMode::Standard, edge_sample_dt: None }
    }

    /// Threshold births with neighborhood `{-2, -1, 1, 2}`.
    pub fn threshold(length: usize, lambda: f64) -> Self {
        Self { length, lambda, neighborhood: vec![-2, -1, 1, 2], mode: ContactMode::Threshold, edge_sample_dt: None }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.length == 0 {
            return Err(SimError::Argument("interval length must be at least 1".into()));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(SimError::Argument(format!("lambda must be finite and nonnegative, got {}", self.lambda)));
        }
        if self.neighborhood.contains(&0) {
            return Err(SimError::Argument("neighborhood must exclude 0".into()));
        }
        if self.neighborhood.iter().any(|o| !self.neighborhood.contains(&-o)) {
            return Err(SimError::Argument("neighborhood must be symmetric".into()));
        }
        if let Some(dt) = self.edge_sample_dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(SimError::Argument("edge sampling step must be positive".into()));
            }
        }
        Ok(())
    }

    /// The middle site of the interval.
    pub fn center(&self) -> usize {
        self.length.div_ceil(2)
    }
}

/// Prefix sums of per-site rates.
#[derive(Clone, Debug)]
struct Fenwick {
    tree: Vec<f64>,
    vals: Vec<f64>,
}

impl Fenwick {
    fn new(vals: Vec<f64>) -> Self {
        let mut f = Self { tree: vec![0.0; vals.len() + 1], vals: vec![0.0; vals.len()] };
        for (i, v) in vals.into_iter().enumerate() {
            f.set(i, v);
        }
        f
    }

    fn set(&mut self, i: usize, v: f64) {
        let delta = v - self.vals[i];
        if delta == 0.0 {
            return;
        }
        self.vals[i] = v;
        let mut k = i + 1;
        while k < self.tree.len() {
            self.tree[k] += delta;
            k += k & k.wrapping_neg();
        }
    }

    fn total(&self) -> f64 {
        let mut k = self.vals.len();
        let mut s = 0.0;
        while k > 0 {
            s += self.tree[k];
            k &= k - 1;
        }
        s
    }

    /// Index `i` with `prefix(i) <= u < prefix(i + 1)`, restricted to sites
    /// with positive rate.
    fn find(&self, mut u: f64) -> usize {
        let n = self.vals.len();
        let mut pos = 0;
        let mut step = n.next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= u {
                pos = next;
                u -= self.tree[next];
            }
            step >>= 1;
        }
        // floating drift can land on a zero-rate site; walk to a live one
        let mut i = pos.min(n - 1);
        while self.vals[i] == 0.0 && i > 0 {
            i -= 1;
        }
        while self.vals[i] == 0.0 && i + 1 < n {
            i += 1;
        }
        i
    }
}

/// Occupancy of a window of sites with a Fenwick tree of flip rates.
/// Indices outside the window read as `left_outside` on the left and vacant
/// on the right.
struct Lattice {
    occ: Vec<bool>,
    rates: Fenwick,
    lambda: f64,
    neighborhood: Vec<i64>,
    mode: ContactMode,
    left_outside: bool,
    occupied: usize,
    updates: u64,
}

impl Lattice {
    fn new(occ: Vec<bool>, cfg_lambda: f64, neighborhood: Vec<i64>, mode: ContactMode, left_outside: bool) -> Self {
        let occupied = occ.iter().filter(|&&o| o).count();
        let mut lat = Self {
            rates: Fenwick::new(vec![0.0; occ.len()]),
            occ,
            lambda: cfg_lambda,
            neighborhood,
            mode,
            left_outside,
            occupied,
            updates: 0,
        };
        lat.rebuild();
        lat
    }

    fn occupied_at(&self, idx: i64) -> bool {
        if idx < 0 {
            self.left_outside
        } else {
            self.occ.get(idx as usize).copied().unwrap_or(false)
        }
    }

    fn rate(&self, i: usize) -> f64 {
        if self.occ[i] {
            return 1.0;
        }
        let count = self.neighborhood.iter().filter(|&&o| self.occupied_at(i as i64 + o)).count();
        match self.mode {
            ContactMode::Standard => self.lambda * count as f64,
            ContactMode::Threshold if count > 0 => self.lambda,
            ContactMode::Threshold => 0.0,
        }
    }

    fn rebuild(&mut self) {
        let rates: Vec<f64> = (0..self.occ.len()).map(|i| self.rate(i)).collect();
        self.rates = Fenwick::new(rates);
    }

    fn total_rate(&self) -> f64 {
        self.rates.total()
    }

    /// Draws the next flipping site and applies the flip.
    fn step<R: Rng>(&mut self, rng: &mut R, total: f64) -> usize {
        let i = self.rates.find(rng.gen::<f64>() * total);
        self.occ[i] = !self.occ[i];
        if self.occ[i] {
            self.occupied += 1;
        } else {
            self.occupied -= 1;
        }
        self.refresh_around(i);
        i
    }

    fn refresh_around(&mut self, i: usize) {
        self.rates.set(i, self.rate(i));
        for k in 0..self.neighborhood.len() {
            let j = i as i64 + self.neighborhood[k];
            if j >= 0 && (j as usize) < self.occ.len() {
                let r = self.rate(j as usize);
                self.rates.set(j as usize, r);
            }
        }
        self.updates += 1;
        if self.updates % (1 << 16) == 0 {
            self.rebuild();
        }
    }

    fn rightmost(&self) -> Option<usize> {
        self.occ.iter().rposition(|&o| o)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ContactTrajectory {
    pub extinct_time: Option<f64>,
    pub alive_at_tmax: bool,
    pub occupied_at_end: usize,
    /// Whether an occupied site ever touched site 1 or site `length`.
    pub hit_boundary: bool,
    /// `(t, rightmost occupied site)` on the sampling grid, 1-based; `0` once
    /// extinct.
    pub right_edge_path: Vec<(f64, i64)>,
    pub events: u64,
}

pub fn simulate_contact(
    cfg: &ContactConfig,
    init: &[usize],
    t_max: f64,
    seed: u64,
) -> Result<ContactTrajectory, SimError> {
    simulate_contact_with(cfg, init, t_max, &mut trial_rng(seed, 0))
}

pub fn simulate_contact_with(
    cfg: &ContactConfig,
    init: &[usize],
    t_max: f64,
    rng: &mut ChaCha8Rng,
) -> Result<ContactTrajectory, SimError> {
    cfg.validate()?;
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(SimError::Argument(format!("t_max must be positive, got {t_max}")));
    }
    let l = cfg.length;
    let mut occ = vec![false; l];
    for &site in init {
        if site == 0 || site > l {
            return Err(SimError::Argument(format!("initial site {site} outside 1..={l}")));
        }
        occ[site - 1] = true;
    }
    let mut lat = Lattice::new(occ, cfg.lambda, cfg.neighborhood.clone(), cfg.mode, false);
    let touches = |lat: &Lattice| lat.occ[0] || lat.occ[l - 1];
    let mut hit_boundary = touches(&lat);
    let edge = |lat: &Lattice| lat.rightmost().map(|i| i as i64 + 1).unwrap_or(0);

    let mut path = Vec::new();
    let mut next_sample = cfg.edge_sample_dt.map(|_| 0.0);
    let mut t = 0.0;
    let mut events = 0u64;
    while lat.occupied > 0 {
        let total = lat.total_rate();
        let dt = exp_time(rng, total);
        let t_next = t + dt;
        if let (Some(step), Some(ns)) = (cfg.edge_sample_dt, next_sample.as_mut()) {
            while *ns <= t_next.min(t_max) {
                path.push((*ns, edge(&lat)));
                *ns += step;
            }
        }
        if t_next > t_max {
            break;
        }
        t = t_next;
        let i = lat.step(rng, total);
        events += 1;
        if lat.occ[i] && (i == 0 || i == l - 1) {
            hit_boundary = true;
        }
    }
    let extinct = lat.occupied == 0;
    if let (Some(step), Some(ns)) = (cfg.edge_sample_dt, next_sample.as_mut()) {
        while *ns <= t_max {
            path.push((*ns, edge(&lat)));
            *ns += step;
        }
    }
    Ok(ContactTrajectory {
        extinct_time: extinct.then_some(t),
        alive_at_tmax: !extinct,
        occupied_at_end: lat.occupied,
        hit_boundary,
        right_edge_path: path,
        events,
    })
}

/// Fixed-step reference: in each step of length `dt` every site flips
/// independently with probability `rate * dt`, rates frozen at the start of
/// the step. Returns the number of occupied sites at `t_max`.
pub fn simulate_contact_fixed_step(
    cfg: &ContactConfig,
    init: &[usize],
    t_max: f64,
    dt: f64,
    rng: &mut ChaCha8Rng,
) -> Result<usize, SimError> {
    cfg.validate()?;
    if !(t_max.is_finite() && t_max > 0.0 && dt > 0.0) {
        return Err(SimError::Argument("t_max and dt must be positive".into()));
    }
    let mut occ = vec![false; cfg.length];
    for &site in init {
        if site == 0 || site > cfg.length {
            return Err(SimError::Argument(format!("initial site {site} outside 1..={}", cfg.length)));
        }
        occ[site - 1] = true;
    }
    let mut lat = Lattice::new(occ, cfg.lambda, cfg.neighborhood.clone(), cfg.mode, false);
    let steps = (t_max / dt).round() as u64;
    for _ in 0..steps {
        if lat.occupied == 0 {
            break;
        }
        let flips: Vec<usize> = (0..cfg.length).filter(|&i| rng.gen::<f64>() < lat.rate(i) * dt).collect();
        for i in flips {
            lat.occ[i] = !lat.occ[i];
        }
        lat.occupied = lat.occ.iter().filter(|&&o| o).count();
    }
    Ok(lat.occupied)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SurvivalEstimate {
    pub trials: u64,
    pub survivals: u64,
    pub fraction: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Trials in which the process reached an end of the interval.
    pub boundary_hits: u64,
    pub seed: u64,
}

/// Fraction of trials, each started from the center site, that are still
/// alive at `t_max`, with a 95% Wilson interval.
pub fn estimate_survival(cfg: &ContactConfig, t_max: f64, trials: u64, seed: u64) -> Result<SurvivalEstimate, SimError> {
    if trials == 0 {
        return Err(SimError::Argument("need at least one trial".into()));
    }
    let init = [cfg.center()];
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|k| simulate_contact_with(cfg, &init, t_max, &mut trial_rng(seed, k)).map(|tr| (tr.alive_at_tmax, tr.hit_boundary)))
        .collect::<Result<Vec<_>, _>>()?;
    let survivals = outcomes.iter().filter(|o| o.0).count() as u64;
    let boundary_hits = outcomes.iter().filter(|o| o.1).count() as u64;
    let (ci_low, ci_high) = wilson_interval(survivals, trials);
    Ok(SurvivalEstimate {
        trials,
        survivals,
        fraction: survivals as f64 / trials as f64,
        ci_low,
        ci_high,
        boundary_hits,
        seed,
    })
}

/// Number of grid points on `[t_max / 2, t_max]` used for the edge fit.
pub const EDGE_FIT_POINTS: usize = 101;

/// Right edge of the nearest-neighbor contact process started from every
/// site `<= 0` occupied, on the fit grid over `[t_max / 2, t_max]`.
///
/// Only a window of `window` sites ending near the edge is simulated. Sites
/// left of the window are held occupied; when the edge comes within a quarter
/// window of the right end the window slides right by half its width. This
/// is exact for the dynamics near the edge as long as the occupied bulk
/// behind it stays dense, i.e. in the supercritical regime.
pub fn simulate_right_edge(lambda: f64, t_max: f64, window: usize, rng: &mut ChaCha8Rng) -> Result<Vec<(f64, f64)>, SimError> {
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(SimError::Argument(format!("t_max must be positive, got {t_max}")));
    }
    if window < 8 {
        return Err(SimError::Argument("edge window must have at least 8 sites".into()));
    }
    ContactConfig::standard(window, lambda).validate()?;
    // window index w is site offset + w; start with the window at (-window, 0]
    let mut offset: i64 = -(window as i64) + 1;
    let mut lat = Lattice::new(vec![true; window], lambda, vec![-1, 1], ContactMode::Standard, true);
    let margin = window / 4;
    let edge = |lat: &Lattice, offset: i64| lat.rightmost().map(|i| i as i64 + offset).unwrap_or(offset - 1) as f64;
    let grid: Vec<f64> =
        (0..EDGE_FIT_POINTS).map(|k| t_max / 2.0 + (t_max / 2.0) * k as f64 / (EDGE_FIT_POINTS - 1) as f64).collect();
    let mut samples = Vec::with_capacity(grid.len());
    let mut t = 0.0;
    for &tg in &grid {
        loop {
            let total = lat.total_rate();
            if total <= 0.0 {
                t = f64::INFINITY;
                break;
            }
            let dt = exp_time(rng, total);
            if t + dt > tg {
                // memoryless: the residual wait restarts from tg
                t = tg;
                break;
            }
            t += dt;
            let i = lat.step(rng, total);
            if lat.occ[i] && i + margin >= window {
                let shift = window / 2;
                let mut occ = lat.occ[shift..].to_vec();
                occ.resize(window, false);
                lat.occ = occ;
                lat.occupied = lat.occ.iter().filter(|&&o| o).count();
                lat.rebuild();
                offset += shift as i64;
            }
        }
        samples.push((tg, edge(&lat, offset)));
    }
    let _ = t;
    Ok(samples)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EdgeSpeed {
    pub lambda: f64,
    pub trials: u64,
    pub slope: f64,
    pub standard_error: f64,
    pub per_trial: Vec<f64>,
    pub seed: u64,
}

/// Least-squares slope of the right edge over `[t_max / 2, t_max]`,
/// averaged over trials.
pub fn right_edge_speed(lambda: f64, t_max: f64, trials: u64, seed: u64, window: usize) -> Result<EdgeSpeed, SimError> {
    if trials < 2 {
        return Err(SimError::Argument("need at least two trials for a standard error".into()));
    }
    let per_trial = (0..trials)
        .into_par_iter()
        .map(|k| simulate_right_edge(lambda, t_max, window, &mut trial_rng(seed, k)).map(|s| ls_slope(&s)))
        .collect::<Result<Vec<_>, _>>()?;
    let (slope, var) = mean_var(&per_trial);
    Ok(EdgeSpeed { lambda, trials, slope, standard_error: (var / trials as f64).sqrt(), per_trial, seed })
}
