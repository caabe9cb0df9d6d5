use std::path::PathBuf;

use clap::{Subcommand, ValueEnum};
use liggett_lab::gaplab::{
    alpha_shuffle_generator, alpha_single_particle_rates, format_graph, gap_report, octopus_min_eigenvalue,
    parse_graph_file, reduce_vertex, relative_gap, rw_generator, spectral_gap, GapOptions, GraphFile, SpectralOptions,
};
use serde_json::{json, Value};

use crate::report::{CliError, Report};

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum GapExpectation {
    Identity,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum OctopusExpectation {
    Psd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ShuffleExpectation {
    Agree,
}

#[derive(Debug, Subcommand)]
pub enum GapCmd {
    /// Interchange, random-walk and exclusion gaps of a graph file.
    Report {
        #[arg(long)]
        graph: PathBuf,
        /// Allow the iterative eigensolver (needed for 7 vertices).
        #[arg(long)]
        iterative: bool,
        #[arg(long, default_value_t = 1e-8)]
        rtol: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol_zero: f64,
        #[arg(long, value_enum)]
        expect: Option<GapExpectation>,
    },
    /// Eliminate one vertex by the star-mesh transformation.
    Reduce {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        vertex: usize,
    },
    /// Smallest eigenvalue of the octopus matrix; every hub if `--vertex` is absent.
    Octopus {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        vertex: Option<usize>,
        #[arg(long)]
        iterative: bool,
        #[arg(long, value_enum)]
        expect: Option<OctopusExpectation>,
    },
    /// Compare the α-shuffle gap with its single-particle walk (needs `h` lines).
    Shuffle {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        rtol: f64,
        #[arg(long, value_enum)]
        expect: Option<ShuffleExpectation>,
    },
}

fn load(path: &PathBuf) -> Result<GraphFile, CliError> {
    parse_graph_file(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn path_str(p: &PathBuf) -> String {
    p.display().to_string()
}

pub fn run(cmd: GapCmd) -> Result<Report, CliError> {
    match cmd {
        GapCmd::Report { graph, iterative, rtol, tol_zero, expect } => {
            let file = load(&graph)?;
            let opts = GapOptions {
                spectral: SpectralOptions { tol_zero, allow_iterative: iterative, force_iterative: false },
                rtol,
                shuffle: file.hyper.clone(),
            };
            let rep = gap_report(&file.graph, &opts)?;
            let mut r = Report::new("gap report")
                .input("graph", path_str(&graph))
                .input("iterative", iterative)
                .input("rtol", rtol)
                .input("tol-zero", tol_zero)
                .input("expect", expect.map(|_| "identity"));
            r.line(format!("lambdaIP {:.12}", rep.lambda_ip));
            r.line(format!("lambdaRW {:.12}", rep.lambda_rw));
            r.line(format!("exclusion {:?}", rep.exclusion_gaps));
            r.line(format!(
                "identity {} contraction {} exclusion-constant {}",
                rep.identity_holds, rep.contraction_holds, rep.exclusion_constant
            ));
            if let Some(s) = &rep.lambda_shuffle {
                r.line(format!(
                    "shuffle {:.12} single-particle {:.12} agree {}",
                    s.lambda_shuffle, s.lambda_single_particle, s.gaps_agree
                ));
            }
            if let Value::Object(fields) = serde_json::to_value(&rep).map_err(|e| CliError::Io(e.to_string()))? {
                r.result.extend(fields);
            }
            if expect.is_some() {
                r.expect(rep.identity_holds, || format!("lambdaIP {} differs from lambdaRW {}", rep.lambda_ip, rep.lambda_rw));
            }
            Ok(r)
        }
        GapCmd::Reduce { graph, vertex } => {
            let file = load(&graph)?;
            let reduced = reduce_vertex(&file.graph, vertex)?;
            let text = format_graph(&GraphFile { graph: reduced.clone(), hyper: None });
            let mut r = Report::new("gap reduce").input("graph", path_str(&graph)).input("vertex", vertex as u64);
            r.text = text.clone();
            let edges: Vec<Value> = reduced.edges().into_iter().map(|(i, j, c)| json!([i, j, c])).collect();
            r.field("n", reduced.n() as u64);
            r.field("edges", edges);
            r.field("graphFile", text);
            Ok(r)
        }
        GapCmd::Octopus { graph, vertex, iterative, expect } => {
            let file = load(&graph)?;
            let hubs: Vec<usize> = match vertex {
                Some(v) => vec![v],
                None => (0..file.graph.n()).filter(|&v| file.graph.strength(v) > 0.0).collect(),
            };
            let mut r = Report::new("gap octopus")
                .input("graph", path_str(&graph))
                .input("vertex", vertex.map(|v| v as u64))
                .input("iterative", iterative)
                .input("expect", expect.map(|_| "psd"));
            let mut rows = Vec::new();
            let mut all_psd = true;
            for hub in hubs {
                let (min, norm) = octopus_min_eigenvalue(&file.graph, hub, iterative)?;
                let psd = min >= -1e-9 * norm;
                all_psd &= psd;
                r.line(format!("hub {hub} min-eigenvalue {min:.6e} norm {norm:.6e} psd {psd}"));
                rows.push(json!({"hub": hub, "minEigenvalue": min, "norm": norm, "psd": psd}));
            }
            r.field("hubs", rows);
            r.field("psd", all_psd);
            if expect.is_some() {
                r.expect(all_psd, || "octopus matrix has a negative eigenvalue".into());
            }
            Ok(r)
        }
        GapCmd::Shuffle { graph, rtol, expect } => {
            let file = load(&graph)?;
            let hyper = file
                .hyper
                .clone()
                .ok_or_else(|| CliError::Usage(format!("{}: no hyperedge (h) lines", graph.display())))?;
            let spectral = SpectralOptions::default();
            let shuffle = spectral_gap(&alpha_shuffle_generator(&hyper)?, &spectral)?;
            let walk_graph = alpha_single_particle_rates(&hyper);
            let walk = spectral_gap(&rw_generator(&walk_graph)?, &spectral)?;
            let agree = relative_gap(shuffle, walk) <= rtol;
            let mut r = Report::new("gap shuffle")
                .input("graph", path_str(&graph))
                .input("rtol", rtol)
                .input("expect", expect.map(|_| "agree"));
            r.line(format!("shuffle {shuffle:.12} single-particle {walk:.12} agree {agree}"));
            r.field("lambdaShuffle", shuffle);
            r.field("lambdaSingleParticle", walk);
            r.field("gapsAgree", agree);
            if expect.is_some() {
                r.expect(agree, || format!("shuffle gap {shuffle} differs from single-particle gap {walk}"));
            }
            Ok(r)
        }
    }
}
