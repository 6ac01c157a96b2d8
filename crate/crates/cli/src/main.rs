//! `mnshift`: configurations, E-functions and the partial action from the
//! command line. Exit codes: 0 success, 1 violation or counterexample,
//! 2 usage or input error.

use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use mnshift_core::action::{act, ActError};
use mnshift_core::analysis::{
    certify_freeness, depth_isotropy_check, free_subgroup_witness, orbit, AnalysisError,
};
use mnshift_core::config::{enumerate_omega, Configuration};
use mnshift_core::efunc::{
    check_conditions, deepen, enumerate_pef, extend_forced, phi, psi, DeepenPolicy, PartialEFunction,
    TableEntry,
};
use mnshift_core::freegroup::{ball, f2_image, Signature, Word};
use mnshift_core::matrep::{
    check_r, check_r_prime, tame_check, trace_obstruction, PartialIsometrySet, PartialIsometrySetJson,
    TameResult,
};
use mnshift_core::model::{fixed_point, gamma, ModelPoint};
use serde::Serialize;
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "mnshift", version, about = "Combinatorial toolkit for (m,n)-dynamical systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct SigArgs {
    /// Number of a-generators.
    #[arg(short = 'n')]
    n: usize,
    /// Number of b-generators.
    #[arg(short = 'm')]
    m: usize,
}

impl SigArgs {
    fn signature(self) -> Result<Signature> {
        Ok(Signature::new(self.m, self.n)?)
    }
}

/// A configuration read from a file, or the image of a model point.
#[derive(Args, Debug)]
struct ConfigSource {
    /// Configuration JSON.
    #[arg(long, conflicts_with = "point")]
    config: Option<PathBuf>,
    /// Model point JSON, mapped to its configuration at `--depth`.
    #[arg(long, requires = "depth")]
    point: Option<PathBuf>,
    #[arg(long)]
    depth: Option<usize>,
}

impl ConfigSource {
    fn load(&self) -> Result<Configuration> {
        match (&self.config, &self.point) {
            (Some(path), None) => read_json(path),
            (None, Some(path)) => {
                let pt: ModelPoint = read_json(path)?;
                Ok(gamma(&pt, self.depth.expect("required by clap"))?)
            }
            _ => bail!("one of --config or --point is required"),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check identity, prefix closure and local patterns.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Every configuration of the given depth.
    EnumerateOmega {
        #[command(flatten)]
        sig: SigArgs,
        #[arg(long)]
        depth: usize,
    },
    /// Every partial E-function of the given depth.
    EnumeratePef {
        #[command(flatten)]
        sig: SigArgs,
        #[arg(long)]
        depth: usize,
    },
    /// Configuration of a partial E-function.
    Psi {
        #[arg(long)]
        efunc: PathBuf,
        #[arg(long)]
        dot: bool,
    },
    /// Partial E-function of a C2-rooted configuration.
    Phi {
        #[arg(long)]
        config: PathBuf,
    },
    /// Forced total extension with its law check.
    Extend {
        #[arg(long)]
        efunc: PathBuf,
    },
    /// Extend to a greater depth, lex-min or seeded.
    Deepen {
        #[arg(long)]
        efunc: PathBuf,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Image of a partial E-function under a word.
    Act {
        #[arg(long)]
        word: String,
        #[arg(long)]
        efunc: PathBuf,
    },
    /// Configuration of a model point.
    Gamma {
        #[arg(long)]
        point: PathBuf,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        dot: bool,
    },
    /// Configuration of the all-ones fixed point.
    FixedPoint {
        #[command(flatten)]
        sig: SigArgs,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        dot: bool,
    },
    /// Finite freeness certificate over a ball of words.
    Freeness {
        #[command(flatten)]
        sig: SigArgs,
        #[arg(long)]
        max_word: usize,
        #[arg(long)]
        open_depth: usize,
    },
    /// Free-subgroup witness in the isotropy, or a single-word check.
    Isotropy {
        #[command(flatten)]
        source: ConfigSource,
        /// Check only whether this word fixes the configuration.
        #[arg(long)]
        word: Option<String>,
    },
    /// Translates of a configuration by words up to `--max-len`.
    Orbit {
        #[command(flatten)]
        source: ConfigSource,
        #[arg(long)]
        max_len: usize,
    },
    /// Reduced words of length at most `--max-len`.
    Ball {
        #[command(flatten)]
        sig: SigArgs,
        #[arg(long)]
        max_len: usize,
    },
    /// Image in the free group on c1, c2.
    F2 {
        #[command(flatten)]
        sig: SigArgs,
        #[arg(long)]
        word: String,
    },
    /// Relation residuals of a set of partial isometries.
    CheckR {
        #[arg(long)]
        set: PathBuf,
        /// Use the range-projection form of the relations.
        #[arg(long)]
        prime: bool,
    },
    /// Whether all short products are partial isometries.
    Tame {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        max_len: usize,
        /// Defaults to the tolerance stored in the set.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Trace identities and the residual bound.
    Trace {
        #[arg(long)]
        set: PathBuf,
    },
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_set(path: &Path) -> Result<PartialIsometrySet> {
    let j: PartialIsometrySetJson = read_json(path)?;
    Ok(PartialIsometrySet::try_from(&j)?)
}

fn emit<T: Serialize>(value: &T) -> Result<()> {
    write_out(&format!("{}\n", serde_json::to_string_pretty(value)?))
}

fn write_out(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    Ok(out.flush()?)
}

fn emit_config(cfg: &Configuration, dot: bool) -> Result<()> {
    if dot {
        write_out(&cfg.to_dot())
    } else {
        emit(cfg)
    }
}

/// Status of a successful run: whether the result is a violation.
fn status(ok: bool) -> u8 {
    if ok {
        0
    } else {
        1
    }
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Validate { config } => {
            let cfg: Configuration = read_json(&config)?;
            let report = cfg.validate();
            emit(&json!({ "clean": report.is_clean(), "violations": report.violations }))?;
            Ok(status(report.is_clean()))
        }
        Command::EnumerateOmega { sig, depth } => {
            emit(&enumerate_omega(&sig.signature()?, depth)?)?;
            Ok(0)
        }
        Command::EnumeratePef { sig, depth } => {
            emit(&enumerate_pef(&sig.signature()?, depth)?)?;
            Ok(0)
        }
        Command::Psi { efunc, dot } => {
            let f: PartialEFunction = read_json(&efunc)?;
            emit_config(&psi(&f), dot)?;
            Ok(0)
        }
        Command::Phi { config } => {
            let cfg: Configuration = read_json(&config)?;
            emit(&phi(&cfg)?)?;
            Ok(0)
        }
        Command::Extend { efunc } => {
            let f: PartialEFunction = read_json(&efunc)?;
            let ext = extend_forced(&f);
            let report = check_conditions(&ext);
            let values: Vec<TableEntry> = ext
                .to_map()
                .into_iter()
                .map(|(alpha, v)| TableEntry { alpha: alpha.to_string(), value: v.to_string() })
                .collect();
            let sig = ext.signature();
            emit(&json!({ "n": sig.n, "m": sig.m, "depth": ext.depth(), "values": values, "conditions": report }))?;
            Ok(status(report.is_clean()))
        }
        Command::Deepen { efunc, depth, seed } => {
            let f: PartialEFunction = read_json(&efunc)?;
            let policy = seed.map_or(DeepenPolicy::LexMin, DeepenPolicy::Seeded);
            emit(&deepen(&f, depth, policy))?;
            Ok(0)
        }
        Command::Act { word, efunc } => {
            let f: PartialEFunction = read_json(&efunc)?;
            let g = Word::parse(&word, &f.signature())?;
            match act(&g, &f) {
                Ok(Some(image)) => {
                    emit(&image)?;
                    Ok(0)
                }
                Ok(None) => {
                    emit(&json!({ "diagnostic": "EmptyDomain", "word": g }))?;
                    Ok(1)
                }
                Err(ActError::NotAlternating(_)) => {
                    emit(&json!({ "diagnostic": "NotAlternating", "word": g }))?;
                    Ok(1)
                }
                Err(ActError::DepthShortfall { needed, available }) => {
                    emit(&json!({ "diagnostic": "DepthShortfall", "needed": needed, "available": available }))?;
                    Ok(1)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Gamma { point, depth, dot } => {
            let pt: ModelPoint = read_json(&point)?;
            emit_config(&gamma(&pt, depth)?, dot)?;
            Ok(0)
        }
        Command::FixedPoint { sig, depth, dot } => {
            let pt = fixed_point(sig.signature()?, 2 * depth + 2)?;
            emit_config(&gamma(&pt, depth)?, dot)?;
            Ok(0)
        }
        Command::Freeness { sig, max_word, open_depth } => {
            let cert = certify_freeness(&sig.signature()?, max_word, open_depth)?;
            emit(&cert)?;
            Ok(status(cert.is_certified()))
        }
        Command::Isotropy { source, word } => {
            let xi = source.load()?;
            if let Some(word) = word {
                let x = Word::parse(&word, &xi.signature())?;
                let fixed = depth_isotropy_check(&x, &xi, xi.depth())?;
                emit(&json!({ "word": x, "depth": xi.depth(), "isotropic": fixed }))?;
                return Ok(status(fixed));
            }
            match free_subgroup_witness(&xi) {
                Ok(witness) => {
                    emit(&witness)?;
                    Ok(0)
                }
                Err(AnalysisError::NoRepeatWithinDepth { j, depth }) => {
                    emit(&json!({ "diagnostic": "NoRepeatWithinDepth", "j": j, "depth": depth }))?;
                    Ok(1)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Orbit { source, max_len } => {
            emit(&orbit(&source.load()?, max_len)?)?;
            Ok(0)
        }
        Command::Ball { sig, max_len } => {
            let words = ball(&sig.signature()?, max_len);
            emit(&json!({ "n": sig.n, "m": sig.m, "radius": max_len, "size": words.len(), "words": words }))?;
            Ok(0)
        }
        Command::F2 { sig, word } => {
            let s = sig.signature()?;
            let g = Word::parse(&word, &s)?;
            emit(&json!({ "word": g, "image": f2_image(&g, &s)? }))?;
            Ok(0)
        }
        Command::CheckR { set, prime } => {
            let set = read_set(&set)?;
            let report = if prime { check_r_prime(&set) } else { check_r(&set) };
            let holds = report.holds(set.tol);
            emit(&json!({ "tol": set.tol, "holds": holds, "max": report.max(), "residuals": report }))?;
            Ok(status(holds))
        }
        Command::Tame { set, max_len, tol } => {
            let set = read_set(&set)?;
            let result = tame_check(&set, max_len, tol.unwrap_or(set.tol));
            emit(&result)?;
            Ok(status(matches!(result, TameResult::Tame { .. })))
        }
        Command::Trace { set } => {
            emit(&trace_obstruction(&read_set(&set)?))?;
            Ok(0)
        }
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(value) = std::env::var("MNSHIFT_THREADS") {
        let threads: usize = value.parse().context("MNSHIFT_THREADS must be a positive integer")?;
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|_| run(cli.command)) {
        Ok(code) => ExitCode::from(code),
        // A closed pipe (`mnshift ... | head`) is not an error.
        Err(e) if e.downcast_ref::<std::io::Error>().is_some_and(|e| e.kind() == ErrorKind::BrokenPipe) => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
