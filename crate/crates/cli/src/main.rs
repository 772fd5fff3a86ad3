use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use igact::biorder::classify_squares;
use igact::endo::{ElementId, DEFAULT_MONOID_CAP};
use igact::error::{Error, Result};
use igact::group::{FiniteGroup, DEFAULT_GROUP_CAP};
use igact::lemmas::{replay_all, Lemma, Selection};
use igact::maxsub::{verify_theorem, Reducer, TheoremOptions, Verdict};
use igact::structure::Structure;
use igact::words::{derive_equal, render, Derivation, IdemWord, SearchBounds};

#[derive(Parser)]
#[command(
    name = "igact",
    version,
    about = "Endomorphism monoids of free G-acts and certified rewriting in IG(E)"
)]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunConfig {
    /// Group: cyclic:<m>, sym:<k> or file:<path to JSON table>
    #[arg(long, global = true, default_value = "cyclic:2")]
    group: String,
    /// Rank n of the free act
    #[arg(long, global = true, default_value_t = 3)]
    rank: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// State cap for derivation search
    #[arg(long, global = true, default_value_t = 100_000)]
    max_states: usize,
    /// Longest intermediate word in derivation search
    #[arg(long, global = true)]
    max_word_len: Option<usize>,
    /// Largest monoid that will be enumerated
    #[arg(long, global = true, default_value_t = DEFAULT_MONOID_CAP)]
    cap: u128,
    /// Output file (JSON); for `verify theorem` certificates go next to it
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write every monoid element to this JSON file
    #[arg(long, global = true)]
    dump: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the monoid and print its rank-1 D-class and sandwich matrix
    Build,
    /// Classify every E-square of the rank-1 D-class
    Squares,
    /// Search for a derivation between two words, e.g. "e[1,1] e[1,1]" "e[1,1]"
    Derive { lhs: String, rhs: String },
    /// Rewrite a word with image in H_11 to its canonical generator word
    Reduce { word: String },
    /// Run an audit suite: `theorem` or `lemma:<id>` (ids 3.2, 3.5, 3.6, 3.7i, 3.7ii, 3.8, 3.9 or names)
    Verify {
        target: String,
        /// Replay a seeded sample of this many instances per lemma
        #[arg(long)]
        sample: Option<usize>,
        /// Random words checked by the theorem audit
        #[arg(long, default_value_t = 1000)]
        words: usize,
        /// Random rewrite steps applied to each of those words
        #[arg(long, default_value_t = 100)]
        perturbations: usize,
    },
}

impl RunConfig {
    fn group(&self) -> Result<FiniteGroup> {
        let (kind, arg) = self
            .group
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("bad group argument {:?}", self.group)))?;
        let number = || {
            arg.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad group parameter {arg:?}")))
        };
        match kind {
            "cyclic" => FiniteGroup::cyclic(number()?),
            "sym" => FiniteGroup::symmetric_capped(number()?, DEFAULT_GROUP_CAP),
            "file" => FiniteGroup::from_json(&fs::read_to_string(arg)?),
            _ => Err(Error::Parse(format!("unknown group family {kind:?}"))),
        }
    }

    fn bounds(&self) -> Result<SearchBounds> {
        if self.max_states == 0 || self.max_word_len == Some(0) {
            return Err(Error::Invalid("search bounds must be positive".into()));
        }
        Ok(SearchBounds {
            max_word_len: self.max_word_len,
            max_states: self.max_states,
        })
    }

    fn structure(&self) -> Result<Structure> {
        if self.cap == 0 {
            return Err(Error::Invalid("--cap must be positive".into()));
        }
        let s = Structure::build_capped(&self.group()?, self.rank, self.cap)?;
        if let Some(path) = &self.dump {
            write_json(path, &s.monoid.dump())?;
        }
        Ok(s)
    }

    fn write<T: Serialize>(&self, value: &T) -> Result<()> {
        match &self.out {
            Some(path) => write_json(path, value),
            None => Ok(()),
        }
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Invalid(format!("cannot serialize output: {e}")))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

/// Parses letters `e[i,j]` (1-based row and column of the rank-1 D-class) or
/// raw element ids, separated by whitespace.
fn parse_word(s: &Structure, text: &str) -> Result<Vec<ElementId>> {
    let mut letters = Vec::new();
    let mut rest = text.trim_start();
    while !rest.is_empty() {
        if let Some(after) = rest.strip_prefix("e[") {
            let close = after
                .find(']')
                .ok_or_else(|| Error::Parse(format!("unclosed letter in {text:?}")))?;
            let (i, j) = after[..close]
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("expected e[i,j] in {text:?}")))?;
            let index = |x: &str, limit: usize| -> Result<usize> {
                match x.trim().parse::<usize>() {
                    Ok(v) if (1..=limit).contains(&v) => Ok(v - 1),
                    _ => Err(Error::Parse(format!(
                        "index {:?} not in 1..={limit}",
                        x.trim()
                    ))),
                }
            };
            let (i, j) = (index(i, s.rees.row_count())?, index(j, s.n())?);
            letters.push(s.rees.e(i, j));
            rest = &after[close + 1..];
        } else {
            let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
            let id = rest[..end]
                .parse::<ElementId>()
                .map_err(|_| Error::Parse(format!("bad letter {:?}", &rest[..end])))?;
            s.monoid.get(id)?;
            letters.push(id);
            rest = &rest[end..];
        }
        rest = rest.trim_start();
    }
    Ok(IdemWord::new(&s.monoid, letters)?.into_letters())
}

fn labels(g: &FiniteGroup, row: &[usize]) -> String {
    row.iter()
        .map(|&x| g.label(x))
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Serialize)]
struct BuildSummary {
    group: String,
    n: usize,
    elements: usize,
    idempotents: usize,
    rows: usize,
    cols: usize,
    h_class: usize,
    rees: igact::rees::ReesReport,
}

fn cmd_build(cfg: &RunConfig) -> Result<u8> {
    let s = cfg.structure()?;
    let g = s.group();
    let summary = BuildSummary {
        group: g.name().to_string(),
        n: s.n(),
        elements: s.monoid.len(),
        idempotents: s.monoid.idempotents().len(),
        rows: s.rees.row_count(),
        cols: s.n(),
        h_class: g.order(),
        rees: s.rees.report(),
    };
    println!(
        "group {} (order {}), n = {}",
        summary.group,
        g.order(),
        summary.n
    );
    println!("elements: {}", summary.elements);
    println!("idempotents: {}", summary.idempotents);
    println!(
        "rank-1 D-class: {} R-classes x {} L-classes, H-classes of size {} ({} elements)",
        summary.rows,
        summary.cols,
        summary.h_class,
        summary.rows * summary.cols * summary.h_class
    );
    println!("sandwich matrix P (rows j, columns i):");
    for row in s.rees.matrix() {
        println!("  {}", labels(g, row));
    }
    cfg.write(&summary)?;
    Ok(0)
}

fn cmd_squares(cfg: &RunConfig) -> Result<u8> {
    let s = cfg.structure()?;
    let rep = classify_squares(&s.monoid, &s.rees, &s.bio)?;
    println!("squares: {}", rep.total);
    println!("rectangular bands: {}", rep.rect_band);
    println!("singular: {}", rep.singular);
    println!("with up-down witness: {}", rep.up_down);
    println!("with left-right witness: {}", rep.left_right);
    cfg.write(&rep)?;
    Ok(0)
}

fn cmd_derive(cfg: &RunConfig, lhs: &str, rhs: &str) -> Result<u8> {
    let s = cfg.structure()?;
    let (w1, w2) = (parse_word(&s, lhs)?, parse_word(&s, rhs)?);
    match derive_equal(&s.monoid, &s.bio, &w1, &w2, cfg.bounds()?)? {
        Derivation::Found(cert) => {
            println!("derivation found: {} step(s)", cert.len());
            let mut word = cert.start.clone();
            println!("  {}", render(&word));
            for step in &cert.steps {
                word = igact::words::apply_step(&s.monoid, &s.bio, &word, *step)?;
                println!("  {}", render(&word));
            }
            cfg.write(&cert)?;
            Ok(0)
        }
        Derivation::Unequal { lhs, rhs } => {
            println!("unequal: the words evaluate to {lhs} and {rhs}");
            Ok(1)
        }
        Derivation::NotFound { explored, capped } => {
            let why = if capped {
                "state cap reached"
            } else {
                "length-bounded space exhausted"
            };
            println!("inconclusive: no derivation found ({explored} states, {why})");
            Ok(0)
        }
    }
}

fn cmd_reduce(cfg: &RunConfig, word: &str) -> Result<u8> {
    let s = cfg.structure()?;
    let w = parse_word(&s, word)?;
    let red = Reducer::with_bounds(&s, cfg.bounds()?)?;
    let trace = red.reduce(&w)?;
    let g = s.group();
    println!("value: {}", g.label(trace.result));
    let factors: Vec<String> = trace
        .factors
        .iter()
        .map(|(i, j)| format!("e[{},{}]", i + 1, j + 1))
        .collect();
    println!("factors: {}", factors.join(" "));
    println!("canonical word: {}", render(&trace.certificate.end));
    println!("certificate: {} steps", trace.certificate.len());
    cfg.write(&trace)?;
    Ok(0)
}

fn cmd_verify(
    cfg: &RunConfig,
    target: &str,
    sample: Option<usize>,
    words: usize,
    perturbations: usize,
) -> Result<u8> {
    let selection = match sample {
        Some(size) => Selection::Sample {
            size,
            seed: cfg.seed,
        },
        None => Selection::All,
    };
    if target == "theorem" {
        let out_dir = cfg.out.as_ref().map(|p| {
            let stem = p.file_stem().unwrap_or_default().to_string_lossy();
            p.with_file_name(format!("{stem}-certificates"))
        });
        let opts = TheoremOptions {
            seed: cfg.seed,
            words,
            perturbations,
            max_word_len: cfg.max_word_len.unwrap_or(8),
            lemmas: selection,
            search: cfg.bounds()?,
            cap: cfg.cap,
            out_dir: out_dir.clone(),
        };
        let mut rep = verify_theorem(&cfg.group()?, cfg.rank, &opts)?;
        if let Some(dir) = &out_dir {
            let name = dir.file_name().unwrap_or_default().to_string_lossy();
            for c in &mut rep.certificates {
                *c = format!("{name}/{c}");
            }
        }
        for a in &rep.audits {
            let mark = if a.pass { "pass" } else { "FAIL" };
            println!("{mark} {}: {}", a.name, a.detail);
        }
        let verdict = match rep.verdict {
            Verdict::Verified => "VERIFIED",
            Verdict::Falsified => "FALSIFIED",
        };
        println!(
            "{verdict}: maximal subgroup at e_11 for {} with n = {}",
            rep.group, rep.n
        );
        cfg.write(&rep)?;
        return Ok(if rep.verdict == Verdict::Verified {
            0
        } else {
            1
        });
    }
    let lemma = target
        .strip_prefix("lemma:")
        .and_then(Lemma::parse)
        .ok_or_else(|| {
            Error::Parse(format!(
                "unknown target {target:?}; expected theorem or lemma:<id>"
            ))
        })?;
    let s = cfg.structure()?;
    let rep = replay_all(&s, lemma, selection, cfg.bounds()?)?;
    println!(
        "{} ({}): {}/{} instances certified, {} steps",
        rep.name, rep.lemma, rep.certified, rep.instances, rep.total_steps
    );
    for f in &rep.failures {
        println!("FAIL {f}");
    }
    cfg.write(&rep)?;
    Ok(if rep.passed() { 0 } else { 1 })
}

fn run(cli: &Cli) -> Result<u8> {
    let cfg = &cli.config;
    match &cli.command {
        Command::Build => cmd_build(cfg),
        Command::Squares => cmd_squares(cfg),
        Command::Derive { lhs, rhs } => cmd_derive(cfg, lhs, rhs),
        Command::Reduce { word } => cmd_reduce(cfg, word),
        Command::Verify {
            target,
            sample,
            words,
            perturbations,
        } => cmd_verify(cfg, target, *sample, *words, *perturbations),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Falsified(_) => 1,
                Error::ResourceBound { .. } => 3,
                _ => 2,
            })
        }
    }
}
