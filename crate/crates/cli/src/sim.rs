use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Subcommand, ValueEnum};
use liggett_lab::gaplab::parse_graph_file;
use liggett_lab::ipslab::{
    duality_check, estimate_survival, mean_var, right_edge_speed, simulate_contact_with, simulate_right_edge,
    simulate_voter_with, trial_rng, write_csv, ContactConfig, ExperimentConfig, SimpleGraph, VoterConfig,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::report::{CliError, Report};

const FINITE_SIZE_NOTE: &str = "finite interval and finite horizon; an estimate, not an infinite-volume statement";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Standard,
    Threshold,
}

impl ModeArg {
    fn name(self) -> &'static str {
        match self {
            ModeArg::Standard => "standard",
            ModeArg::Threshold => "threshold",
        }
    }
}

impl FromStr for ModeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <ModeArg as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Args)]
pub struct ConfigFlag {
    /// Flat `key = value` file; keys are flag names, explicit flags win.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GraphChoice {
    /// Graph file in the gaplab format (weights are ignored).
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Use the cycle on this many vertices instead of a file.
    #[arg(long)]
    cycle: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum SimCmd {
    /// Survival of the contact process on `1..=L` from the center site.
    Contact {
        #[command(flatten)]
        config: ConfigFlag,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long = "L")]
        length: Option<usize>,
        #[arg(long)]
        tmax: Option<f64>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Write the right edge of trial 0 as `t,edge`.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        expect_min: Option<f64>,
        #[arg(long)]
        expect_max: Option<f64>,
    },
    /// Speed of the right edge started from the occupied half-line.
    Edge {
        #[command(flatten)]
        config: ConfigFlag,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        tmax: Option<f64>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        window: Option<usize>,
        /// Write the right edge of trial 0 on the fit grid as `t,edge`.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Consensus of the voter model from i.i.d. Bernoulli(rho) opinions.
    Voter {
        #[command(flatten)]
        config: ConfigFlag,
        #[command(flatten)]
        graph: GraphChoice,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        tmax: Option<f64>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write the fraction of 1s in trial 0 as `t,fraction`.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        sample_dt: Option<f64>,
        #[arg(long)]
        expect_min_consensus: Option<f64>,
    },
    /// Monte Carlo of both sides of the voter / coalescing walk duality.
    Duality {
        #[command(flatten)]
        config: ConfigFlag,
        #[command(flatten)]
        graph: GraphChoice,
        /// Comma-separated vertex set, 0-based.
        #[arg(long, value_delimiter = ',')]
        set: Option<Vec<usize>>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        expect_max_z: Option<f64>,
    },
}

/// Flag value, else config value, else default.
struct Resolver(Option<ExperimentConfig>);

impl Resolver {
    fn load(flag: &ConfigFlag) -> Result<Self, CliError> {
        match &flag.config {
            None => Ok(Self(None)),
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
                let cfg = ExperimentConfig::parse(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
                Ok(Self(Some(cfg)))
            }
        }
    }

    fn opt<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match &self.0 {
            Some(cfg) => Ok(cfg.get(key)?),
            None => Ok(None),
        }
    }

    fn get<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError> {
        Ok(self.opt(flag, key)?.unwrap_or(default))
    }

    fn list(&self, flag: Option<Vec<usize>>, key: &str) -> Result<Option<Vec<usize>>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match &self.0 {
            Some(cfg) => Ok(cfg.get_list(key)?),
            None => Ok(None),
        }
    }
}

fn resolve_graph(res: &Resolver, choice: GraphChoice) -> Result<(SimpleGraph, Option<String>, Option<usize>), CliError> {
    let path: Option<PathBuf> = res.opt(choice.graph, "graph")?;
    let cycle: Option<usize> = res.opt(choice.cycle, "cycle")?;
    match (path, cycle) {
        (Some(p), None) => {
            let file = parse_graph_file(&p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
            Ok((SimpleGraph::from_weighted(&file.graph), Some(p.display().to_string()), None))
        }
        (None, Some(n)) if n >= 3 => Ok((SimpleGraph::cycle(n), None, Some(n))),
        (None, Some(n)) => Err(CliError::Usage(format!("--cycle needs at least 3 vertices, got {n}"))),
        _ => Err(CliError::Usage("give exactly one of --graph or --cycle".into())),
    }
}

fn write_rows(path: &Path, columns: (&str, &str), rows: &[(f64, f64)]) -> Result<(), CliError> {
    let mut out = BufWriter::new(File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?);
    write_csv(&mut out, columns, rows)?;
    Ok(())
}

fn path_value(p: &Option<PathBuf>) -> Value {
    p.as_ref().map(|p| Value::from(p.display().to_string())).unwrap_or(Value::Null)
}

pub fn run(cmd: SimCmd) -> Result<Report, CliError> {
    match cmd {
        SimCmd::Contact { config, lambda, length, tmax, trials, seed, mode, csv, expect_min, expect_max } => {
            let res = Resolver::load(&config)?;
            let lambda = res.get(lambda, "lambda", 2.0)?;
            let length = res.get(length, "L", 400)?;
            let tmax = res.get(tmax, "tmax", 100.0)?;
            let trials = res.get(trials, "trials", 100)?;
            let seed = res.get(seed, "seed", 0)?;
            let mode = res.get(mode, "mode", ModeArg::Standard)?;
            let cfg = match mode {
                ModeArg::Standard => ContactConfig::standard(length, lambda),
                ModeArg::Threshold => ContactConfig::threshold(length, lambda),
            };
            let est = estimate_survival(&cfg, tmax, trials, seed)?;
            let mut r = Report::new("sim contact")
                .input("lambda", lambda)
                .input("L", length as u64)
                .input("tmax", tmax)
                .input("trials", trials)
                .input("seed", seed)
                .input("mode", mode.name())
                .input("csv", path_value(&csv))
                .input("expect-min", expect_min)
                .input("expect-max", expect_max);
            r.line(format!(
                "survival {}/{} = {:.4} (95% CI [{:.4}, {:.4}]), boundary hits {}",
                est.survivals, est.trials, est.fraction, est.ci_low, est.ci_high, est.boundary_hits
            ));
            r.line(format!("note: {FINITE_SIZE_NOTE}"));
            if let Some(path) = &csv {
                let cfg = ContactConfig { edge_sample_dt: Some(tmax / 200.0), ..cfg.clone() };
                let tr = simulate_contact_with(&cfg, &[cfg.center()], tmax, &mut trial_rng(seed, 0))?;
                let rows: Vec<(f64, f64)> = tr.right_edge_path.iter().map(|&(t, e)| (t, e as f64)).collect();
                write_rows(path, ("t", "edge"), &rows)?;
            }
            if let Value::Object(fields) = serde_json::to_value(&est).map_err(|e| CliError::Io(e.to_string()))? {
                r.result.extend(fields);
            }
            r.field("note", FINITE_SIZE_NOTE);
            if let Some(lo) = expect_min {
                r.expect(est.fraction >= lo, || format!("survival {} below {lo}", est.fraction));
            }
            if let Some(hi) = expect_max {
                r.expect(est.fraction <= hi, || format!("survival {} above {hi}", est.fraction));
            }
            Ok(r)
        }
        SimCmd::Edge { config, lambda, tmax, trials, seed, window, csv } => {
            let res = Resolver::load(&config)?;
            let lambda = res.get(lambda, "lambda", 2.0)?;
            let tmax = res.get(tmax, "tmax", 100.0)?;
            let trials = res.get(trials, "trials", 20)?;
            let seed = res.get(seed, "seed", 0)?;
            let window = res.get(window, "window", 256)?;
            let est = right_edge_speed(lambda, tmax, trials, seed, window)?;
            let mut r = Report::new("sim edge")
                .input("lambda", lambda)
                .input("tmax", tmax)
                .input("trials", trials)
                .input("seed", seed)
                .input("window", window as u64)
                .input("csv", path_value(&csv));
            r.line(format!("edge speed {:.4} ± {:.4} (SE, {} trials)", est.slope, est.standard_error, est.trials));
            if let Some(path) = &csv {
                let rows = simulate_right_edge(lambda, tmax, window, &mut trial_rng(seed, 0))?;
                write_rows(path, ("t", "edge"), &rows)?;
            }
            if let Value::Object(fields) = serde_json::to_value(&est).map_err(|e| CliError::Io(e.to_string()))? {
                r.result.extend(fields);
            }
            Ok(r)
        }
        SimCmd::Voter { config, graph, rho, tmax, trials, seed, csv, sample_dt, expect_min_consensus } => {
            let res = Resolver::load(&config)?;
            let (g, graph_path, cycle) = resolve_graph(&res, graph)?;
            let rho = res.get(rho, "rho", 0.5)?;
            let tmax = res.get(tmax, "tmax", 1e4)?;
            let trials = res.get(trials, "trials", 100)?;
            let seed = res.get(seed, "seed", 0)?;
            let sample_dt = res.get(sample_dt, "sample-dt", tmax / 200.0)?;
            if trials == 0 {
                return Err(CliError::Usage("need at least one trial".into()));
            }
            let times = (0..trials)
                .into_par_iter()
                .map(|k| {
                    let mut rng = trial_rng(seed, k);
                    let cfg = VoterConfig::with_density(g.clone(), rho, &mut rng)?;
                    simulate_voter_with(&cfg, tmax, &mut rng).map(|o| o.consensus_time)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let reached: Vec<f64> = times.iter().flatten().copied().collect();
            let fraction = reached.len() as f64 / trials as f64;
            let mean_time = (!reached.is_empty()).then(|| mean_var(&reached).0);
            let mut r = Report::new("sim voter")
                .input("graph", graph_path)
                .input("cycle", cycle.map(|n| n as u64))
                .input("rho", rho)
                .input("tmax", tmax)
                .input("trials", trials)
                .input("seed", seed)
                .input("sample-dt", sample_dt)
                .input("csv", path_value(&csv))
                .input("expect-min-consensus", expect_min_consensus);
            let mean_text = mean_time.map(|m| format!("{m:.3}")).unwrap_or_else(|| "n/a".into());
            r.line(format!("consensus {}/{} = {:.4}, mean consensus time {mean_text}", reached.len(), trials, fraction));
            if let Some(path) = &csv {
                let mut rng = trial_rng(seed, 0);
                let mut cfg = VoterConfig::with_density(g.clone(), rho, &mut rng)?;
                cfg.sample_dt = Some(sample_dt);
                let out = simulate_voter_with(&cfg, tmax, &mut rng)?;
                write_rows(path, ("t", "fraction"), &out.ones_path)?;
            }
            r.field("consensusFraction", fraction);
            r.field("meanConsensusTime", mean_time);
            r.field("consensusTimes", json!(times));
            if let Some(lo) = expect_min_consensus {
                r.expect(fraction >= lo, || format!("consensus fraction {fraction} below {lo}"));
            }
            Ok(r)
        }
        SimCmd::Duality { config, graph, set, t, rho, trials, seed, expect_max_z } => {
            let res = Resolver::load(&config)?;
            let (g, graph_path, cycle) = resolve_graph(&res, graph)?;
            let set = res.list(set, "set")?.ok_or_else(|| CliError::Usage("--set is required".into()))?;
            let t = res.get(t, "t", 1.0)?;
            let rho = res.get(rho, "rho", 0.5)?;
            let trials = res.get(trials, "trials", 10_000)?;
            let seed = res.get(seed, "seed", 0)?;
            let d = duality_check(&g, &set, t, rho, trials, seed)?;
            let mut r = Report::new("sim duality")
                .input("graph", graph_path)
                .input("cycle", cycle.map(|n| n as u64))
                .input("set", json!(set))
                .input("t", t)
                .input("rho", rho)
                .input("trials", trials)
                .input("seed", seed)
                .input("expect-max-z", expect_max_z);
            r.line(format!(
                "lhs {:.5} ± {:.5}  rhs {:.5} ± {:.5}  z {:.3}",
                d.lhs, d.lhs_se, d.rhs, d.rhs_se, d.z_score
            ));
            if let Value::Object(fields) = serde_json::to_value(&d).map_err(|e| CliError::Io(e.to_string()))? {
                r.result.extend(fields);
            }
            if let Some(zmax) = expect_max_z {
                r.expect(d.z_score.abs() <= zmax, || format!("|z| = {} exceeds {zmax}", d.z_score.abs()));
            }
            Ok(r)
        }
    }
}
