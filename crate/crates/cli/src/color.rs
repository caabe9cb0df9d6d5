use clap::{Args, Subcommand, ValueEnum};
use liggett_lab::colorlab::{
    eliminate_fours_pushforward, format_rational, is_k_dependent, marginalize, parse_pattern, sample_window,
    ColorWord, CylinderMeasure,
};
use serde_json::{json, Value};

use crate::report::{CliError, Report};

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SourceArg {
    Recursion,
    Formula,
}

impl SourceArg {
    fn name(self) -> &'static str {
        match self {
            SourceArg::Recursion => "recursion",
            SourceArg::Formula => "formula",
        }
    }

    fn measure(self, q: u8) -> Result<CylinderMeasure, CliError> {
        match self {
            SourceArg::Recursion => Ok(CylinderMeasure::recursion(q)?.with_canonical_memo(true)),
            SourceArg::Formula if q == 4 => Ok(CylinderMeasure::formula()),
            SourceArg::Formula => Err(CliError::Usage(format!("the formula source needs --q 4, got {q}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum DependenceExpectation {
    Holds,
    Fails,
}

#[derive(Debug, Subcommand)]
pub enum ColorCmd {
    /// Exact cylinder probability of a word, e.g. `--word 1213`.
    Prob {
        #[arg(long)]
        q: u8,
        #[arg(long)]
        word: String,
        #[command(flatten)]
        source: SourceFlag,
    },
    /// Exact k-dependence check on all windows up to `--nmax`.
    CheckDep {
        #[arg(long)]
        q: u8,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        nmax: usize,
        #[command(flatten)]
        source: SourceFlag,
        /// Exit with status 1 unless the result matches.
        #[arg(long, value_enum)]
        expect: Option<DependenceExpectation>,
    },
    /// Probability of a pattern with `.` wildcards, e.g. `--pattern 1.3`.
    Marginal {
        #[arg(long)]
        q: u8,
        #[arg(long)]
        pattern: String,
        #[command(flatten)]
        source: SourceFlag,
    },
    /// Exact samples of a window.
    Sample {
        #[arg(long)]
        q: u8,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[command(flatten)]
        source: SourceFlag,
    },
    /// Law of a window after replacing every 4 by the smallest free color.
    Pushforward {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        source: SourceFlag,
    },
}

#[derive(Debug, Args)]
pub struct SourceFlag {
    #[arg(long, value_enum, default_value = "recursion")]
    source: SourceArg,
}

pub fn run(cmd: ColorCmd) -> Result<Report, CliError> {
    match cmd {
        ColorCmd::Prob { q, word, source } => {
            let measure = source.source.measure(q)?;
            let w = ColorWord::parse(q, &word)?;
            let p = format_rational(&measure.prob_word(&w)?);
            let mut r = Report::new("color prob").input("q", q).input("word", word).input("source", source.source.name());
            r.line(&p);
            r.field("value", p);
            Ok(r)
        }
        ColorCmd::CheckDep { q, k, nmax, source, expect } => {
            let measure = source.source.measure(q)?;
            let dep = is_k_dependent(&measure, k, nmax)?;
            let mut r = Report::new("color check-dep")
                .input("q", q)
                .input("k", k as u64)
                .input("nmax", nmax as u64)
                .input("source", source.source.name())
                .input("expect", expect.map(|e| if matches!(e, DependenceExpectation::Holds) { "holds" } else { "fails" }));
            r.line(format!("holds={}", dep.holds));
            r.field("holds", dep.holds);
            r.field("pairsChecked", dep.pairs_checked);
            if let Some(w) = &dep.witness {
                r.line(format!(
                    "witness: window {} A={:?} B={:?} pattern {} joint {} product {}",
                    w.window,
                    w.a,
                    w.b,
                    w.pattern(),
                    format_rational(&w.joint),
                    format_rational(&w.product)
                ));
                let mut wj = serde_json::to_value(w).map_err(|e| CliError::Io(e.to_string()))?;
                wj["pattern"] = Value::from(w.pattern());
                r.field("witness", wj);
            }
            if let Some(e) = expect {
                let want = matches!(e, DependenceExpectation::Holds);
                r.expect(dep.holds == want, || format!("expected holds={want}, got holds={}", dep.holds));
            }
            Ok(r)
        }
        ColorCmd::Marginal { q, pattern, source } => {
            let measure = source.source.measure(q)?;
            let parsed = parse_pattern(q, &pattern)?;
            let p = format_rational(&marginalize(&measure, &parsed));
            let mut r =
                Report::new("color marginal").input("q", q).input("pattern", pattern).input("source", source.source.name());
            r.line(&p);
            r.field("value", p);
            Ok(r)
        }
        ColorCmd::Sample { q, n, seed, count, source } => {
            let measure = source.source.measure(q)?;
            // sample i uses seed + i
            let words: Vec<String> =
                (0..count).map(|i| sample_window(&measure, n, seed.wrapping_add(i)).to_string()).collect();
            let mut r = Report::new("color sample")
                .input("q", q)
                .input("n", n as u64)
                .input("seed", seed)
                .input("count", count)
                .input("source", source.source.name());
            for w in &words {
                r.line(w);
            }
            r.field("samples", json!(words));
            Ok(r)
        }
        ColorCmd::Pushforward { n, source } => {
            let measure = source.source.measure(4)?;
            let law = eliminate_fours_pushforward(&measure, n);
            let mut r = Report::new("color pushforward").input("n", n as u64).input("source", source.source.name());
            let mut table = serde_json::Map::new();
            for (w, p) in &law {
                let word: String = w.iter().map(|c| char::from(b'0' + c)).collect();
                let p = format_rational(p);
                r.line(format!("{word} {p}"));
                table.insert(word, Value::from(p));
            }
            r.field("law", Value::Object(table));
            Ok(r)
        }
    }
}
