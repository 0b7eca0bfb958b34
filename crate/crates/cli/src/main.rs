use std::fmt::Write as _;
use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use jetgroup_core::group_dim::{cyclic_dim, dim_stabilization_probe, series_profile};
use jetgroup_core::intersection::{multiplicity, parse_ideal, pullback_ideal};
use jetgroup_core::jet::{log_map, matrix_of, power_t, JetMatrix};
use jetgroup_core::jordan::{is_semisimple_at, is_unipotent, multiplicative_jordan};
use jetgroup_core::linalg::RatMatrix;
use jetgroup_core::orbit::{
    arnold_sequence, boundedness_verdict, orbit_multiplicity_sweep, ExperimentConfig,
};
use jetgroup_core::parse::{infer_nvars, parse_map, parse_rational};
use jetgroup_core::{DiffeoJet, EigenvalueSpec, Error, GroupPresentation, VectorFieldJet};

const WARN_ROWS: usize = 3_000;
const MAX_ROWS: usize = 20_000;

#[derive(Parser)]
#[command(
    name = "jet",
    version,
    about = "Exact computations with jets of formal diffeomorphisms"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Truncation degree for parsed maps and fields.
    #[arg(long, global = true, default_value_t = 8)]
    cutoff: u32,
    /// Highest jet level for multiplicity stabilization.
    #[arg(long, global = true, default_value_t = 32)]
    kmax: u32,
    /// Worker threads for sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// Drop words whose jet already appeared.
    #[arg(long, global = true)]
    dedup: bool,
    /// Comma-separated rows instead of aligned text.
    #[arg(long, global = true)]
    csv: bool,
    /// Report wall-clock time on stderr.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Compose maps left to right: f1∘f2∘…
    Compose {
        #[arg(long, num_args = 1.., required = true)]
        maps: Vec<PathBuf>,
    },
    Inverse {
        #[arg(long)]
        map: PathBuf,
    },
    /// Time-one map of a nilpotent vector field.
    Exp {
        #[arg(long)]
        field: PathBuf,
    },
    /// Infinitesimal generator of a unipotent map.
    Log {
        #[arg(long)]
        map: PathBuf,
    },
    /// φ^t; non-integer t needs a unipotent map.
    Power {
        #[arg(long)]
        map: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// Multiplicative Jordan decomposition.
    Jordan {
        #[arg(long)]
        map: PathBuf,
        /// Allow pullback matrices above the row limit.
        #[arg(long)]
        force_large: bool,
    },
    /// Closure dimensions over a range of levels.
    Dim {
        #[arg(long)]
        gens: PathBuf,
        #[arg(long, value_parser = parse_level_range, default_value = "1..8")]
        krange: RangeInclusive<u32>,
        /// Eigenvalue data; computes the dimension of the cyclic group instead.
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Derived length and nilpotency class of the Lie algebra at one level.
    SeriesProfile {
        #[arg(long)]
        gens: PathBuf,
        #[arg(long)]
        level: Option<u32>,
    },
    /// Intersection multiplicity of two ideals.
    Mult {
        #[arg(long)]
        ideal_a: PathBuf,
        #[arg(long)]
        ideal_b: PathBuf,
        /// Pull the first ideal back by this map.
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Multiplicities over all words up to a given length.
    Sweep {
        #[arg(long)]
        gens: PathBuf,
        #[arg(long)]
        ideal_a: PathBuf,
        #[arg(long)]
        ideal_b: PathBuf,
        #[arg(long, default_value_t = 2)]
        length: usize,
        /// Also sweep up to this shorter length and compare.
        #[arg(long)]
        reference: Option<usize>,
        /// `key = value` file overriding length, kmax, cutoff, workers, dedup.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Multiplicities along the iterates of one map.
    Arnold {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        ideal_a: PathBuf,
        #[arg(long)]
        ideal_b: PathBuf,
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true, default_value = "-10..10")]
        range: RangeInclusive<i64>,
    },
}

fn parse_range(s: &str) -> Result<RangeInclusive<i64>, String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected A..B, got {s:?}"))?;
    let a: i64 = a.trim().parse().map_err(|_| format!("bad bound {a:?}"))?;
    let b: i64 = b
        .trim()
        .trim_start_matches('=')
        .parse()
        .map_err(|_| format!("bad bound {b:?}"))?;
    if a > b {
        return Err(format!("empty range {s}"));
    }
    Ok(a..=b)
}

fn parse_level_range(s: &str) -> Result<RangeInclusive<u32>, String> {
    let r = parse_range(s)?;
    let conv = |v: i64| u32::try_from(v).map_err(|_| format!("level {v} is negative"));
    Ok(conv(*r.start())?..=conv(*r.end())?)
}

enum Failure {
    Domain(Error),
    Io(String),
    TooLarge(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type Outcome<T = String> = Result<T, Failure>;

fn read(path: &Path) -> Outcome {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn strip_comments(text: &str) -> String {
    text.lines()
        .map(|l| l.split('#').next().unwrap())
        .collect::<Vec<_>>()
        .join("\n")
}

fn read_map(path: &Path, cutoff: u32) -> Outcome<DiffeoJet> {
    Ok(parse_map(&strip_comments(&read(path)?), cutoff)?)
}

/// Generators of a presentation with each flow sample as an extra map.
fn presentation_maps(p: &GroupPresentation) -> Outcome<Vec<DiffeoJet>> {
    let mut maps: Vec<DiffeoJet> = p.generators().iter().map(|(_, g)| g.clone()).collect();
    for f in p.flows() {
        for t in &f.samples {
            maps.push(f.field.scale(t).exp()?);
        }
    }
    Ok(maps)
}

fn run(cli: Cli) -> Outcome {
    let g = &cli.global;
    let mut out = String::new();
    match &cli.command {
        Command::Compose { maps } => {
            let mut acc: Option<DiffeoJet> = None;
            for path in maps {
                let m = read_map(path, g.cutoff)?;
                acc = Some(match acc {
                    None => m,
                    Some(a) => a.compose(&m)?,
                });
            }
            writeln!(out, "{}", acc.expect("at least one map")).unwrap();
        }
        Command::Inverse { map } => {
            writeln!(out, "{}", read_map(map, g.cutoff)?.inverse()).unwrap();
        }
        Command::Exp { field } => {
            let text = strip_comments(&read(field)?);
            let x = VectorFieldJet::parse(&text, infer_nvars(&text), g.cutoff)?;
            writeln!(out, "{}", x.exp()?).unwrap();
        }
        Command::Log { map } => {
            writeln!(out, "{}", log_map(&read_map(map, g.cutoff)?)?).unwrap();
        }
        Command::Power { map, t } => {
            let phi = read_map(map, g.cutoff)?;
            let t = parse_rational(t)?;
            let result = if t.is_integer() && !is_unipotent(&phi).holds {
                let e = t.to_integer().try_into().map_err(|_| {
                    Failure::Domain(Error::Parse {
                        position: 0,
                        message: "exponent out of range".into(),
                    })
                })?;
                phi.pow(e)
            } else {
                power_t(&phi, &t)?
            };
            writeln!(out, "{result}").unwrap();
        }
        Command::Jordan { map, force_large } => {
            let phi = read_map(map, g.cutoff)?;
            let rows = JetMatrix::dimension_for(phi.nvars(), phi.cutoff());
            if rows > MAX_ROWS && !force_large {
                return Err(Failure::TooLarge(format!(
                    "pullback matrix has {rows} rows (limit {MAX_ROWS}); pass --force-large to proceed"
                )));
            }
            if rows > WARN_ROWS {
                eprintln!("warning: pullback matrix has {rows} rows; this may be slow");
            }
            let pair = multiplicative_jordan(&phi)?;
            let unip = is_unipotent(&pair.unipotent);
            writeln!(out, "semisimple: {}", pair.semisimple).unwrap();
            writeln!(out, "unipotent: {}", pair.unipotent).unwrap();
            writeln!(
                out,
                "certificate: semisimple factor has squarefree minimal polynomial: {}",
                is_semisimple_at(&pair.semisimple)
            )
            .unwrap();
            let index = matrix_of(&pair.unipotent)
                .matrix()
                .sub(&RatMatrix::identity(rows))
                .nilpotency_index();
            writeln!(
                out,
                "certificate: unipotent factor linear part unipotent: {}; pullback minus identity nilpotent of index {}",
                unip.holds,
                index.map_or("none".into(), |i| i.to_string())
            )
            .unwrap();
        }
        Command::Dim { gens, krange, spec } => {
            let p = GroupPresentation::parse(&read(gens)?, g.cutoff)?;
            let maps = presentation_maps(&p)?;
            if let Some(spec) = spec {
                let spec = EigenvalueSpec::parse(&read(spec)?)?;
                let [phi] = maps.as_slice() else {
                    return Err(Failure::Domain(Error::DimensionMismatch(
                        "eigenvalue data describes exactly one generator".into(),
                    )));
                };
                writeln!(out, "cyclic dim: {}", cyclic_dim(phi, &spec)?).unwrap();
            } else {
                let report = dim_stabilization_probe(&maps, *krange.start(), *krange.end())?;
                if g.csv {
                    out.push_str(&report.to_csv());
                } else {
                    writeln!(out, "{report}").unwrap();
                }
            }
        }
        Command::SeriesProfile { gens, level } => {
            let p = GroupPresentation::parse(&read(gens)?, g.cutoff)?;
            let k = level.unwrap_or(g.cutoff);
            let prof = series_profile(&presentation_maps(&p)?, k)?;
            let show = |v: Option<usize>| v.map_or("not reached".into(), |v| v.to_string());
            if g.csv {
                writeln!(out, "k,dim,derived_length,nilpotency_class").unwrap();
                writeln!(
                    out,
                    "{},{},{},{}",
                    prof.level,
                    prof.dimension,
                    prof.derived_length.map_or(String::new(), |v| v.to_string()),
                    prof.nilpotency_class
                        .map_or(String::new(), |v| v.to_string())
                )
                .unwrap();
            } else {
                writeln!(out, "level: {}", prof.level).unwrap();
                writeln!(out, "dim: {}", prof.dimension).unwrap();
                writeln!(out, "derived length: {}", show(prof.derived_length)).unwrap();
                writeln!(out, "nilpotency class: {}", show(prof.nilpotency_class)).unwrap();
            }
        }
        Command::Mult {
            ideal_a,
            ideal_b,
            map,
        } => {
            let (text_a, text_b) = (read(ideal_a)?, read(ideal_b)?);
            let phi = match map {
                Some(m) => Some(read_map(m, g.cutoff)?),
                None => None,
            };
            let n = [
                infer_nvars(&strip_comments(&text_a)),
                infer_nvars(&strip_comments(&text_b)),
            ]
            .into_iter()
            .chain(phi.as_ref().map(DiffeoJet::nvars))
            .max()
            .unwrap();
            let mut a = parse_ideal(&text_a, Some(n))?;
            let b = parse_ideal(&text_b, Some(n))?;
            if let Some(phi) = &phi {
                a = pullback_ideal(&a, phi)?;
            }
            let m = multiplicity(&a, &b, g.kmax)?;
            if g.csv {
                writeln!(out, "k,d_k").unwrap();
                for (k, d) in &m.jet_dims {
                    writeln!(out, "{k},{d}").unwrap();
                }
            } else {
                writeln!(out, "{m}").unwrap();
                let trace: Vec<String> = m.jet_dims.iter().map(|(_, d)| d.to_string()).collect();
                writeln!(out, "d_k for k = 0..: {}", trace.join(" ")).unwrap();
            }
        }
        Command::Sweep {
            gens,
            ideal_a,
            ideal_b,
            length,
            reference,
            config,
        } => {
            let mut cfg = ExperimentConfig {
                word_length: *length,
                k_max: g.kmax,
                cutoff: g.cutoff,
                workers: g.workers,
                dedup: g.dedup,
            };
            if let Some(path) = config {
                let text = read(path)?;
                let file = ExperimentConfig::parse(&text)?;
                for line in strip_comments(&text).lines() {
                    match line.split_once('=').map(|(k, _)| k.trim()) {
                        Some("word_length") => cfg.word_length = file.word_length,
                        Some("k_max") => cfg.k_max = file.k_max,
                        Some("cutoff") => cfg.cutoff = file.cutoff,
                        Some("workers") => cfg.workers = file.workers,
                        Some("dedup") => cfg.dedup = file.dedup,
                        _ => {}
                    }
                }
            }
            let p = GroupPresentation::parse(&read(gens)?, cfg.cutoff)?;
            let a = parse_ideal(&read(ideal_a)?, Some(p.nvars()))?;
            let b = parse_ideal(&read(ideal_b)?, Some(p.nvars()))?;
            let sweep =
                |len| orbit_multiplicity_sweep(&p, &a, &b, len, cfg.k_max, cfg.dedup, cfg.workers);
            let report = sweep(cfg.word_length)?;
            if g.csv {
                out.push_str(&report.to_csv());
            } else {
                writeln!(out, "{report}").unwrap();
            }
            if let Some(r) = reference {
                let base = sweep(*r)?;
                let verdict = boundedness_verdict(&base, &report);
                let line = format!("{verdict} (lengths {r} vs {})", cfg.word_length);
                if g.csv {
                    eprintln!("{line}");
                } else {
                    writeln!(out, "{line}").unwrap();
                }
            }
        }
        Command::Arnold {
            map,
            ideal_a,
            ideal_b,
            range,
        } => {
            let phi = read_map(map, g.cutoff)?;
            let a = parse_ideal(&read(ideal_a)?, Some(phi.nvars()))?;
            let b = parse_ideal(&read(ideal_b)?, Some(phi.nvars()))?;
            let seq = arnold_sequence(&phi, &a, &b, range.clone(), g.kmax)?;
            if g.csv {
                writeln!(out, "n,value,kind,certified-level").unwrap();
            }
            for (n, r) in seq {
                match (r, g.csv) {
                    (Ok(m), true) => {
                        let kind = if m.is_exact() { "exact" } else { "lower-bound" };
                        let level = m.level().map_or(String::new(), |l| l.to_string());
                        writeln!(out, "{n},{},{kind},{level}", m.value()).unwrap();
                    }
                    (Ok(m), false) => writeln!(out, "{n:>5}  {m}").unwrap(),
                    (Err(e), true) => writeln!(out, "{n},,error:{},", e.code()).unwrap(),
                    (Err(e), false) => writeln!(out, "{n:>5}  error[{}]: {e}", e.code()).unwrap(),
                }
            }
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let timing = cli.global.timing;
    let start = Instant::now();
    let result = run(cli);
    if timing {
        eprintln!("time: {:.3?}", start.elapsed());
    }
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error[IO]: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::TooLarge(msg)) => {
            eprintln!("error[TOO_LARGE]: {msg}");
            ExitCode::from(1)
        }
    }
}
