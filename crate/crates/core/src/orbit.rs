//! Orbit experiments: multiplicities `dim O_n / (w*I + J)` over words `w` in
//! a finitely presented set of generators.
//!
//! Sweeps only ever look at finitely many words, so every boundedness
//! statement they produce is evidence rather than proof.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::ops::RangeInclusive;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::intersection::{
    multiplicity, pullback_ideal, IdealSpec, MultiplicityKind, MultiplicityResult,
};
use crate::jet::VectorFieldJet;
use crate::parse::{infer_nvars, parse_map, parse_rational};
use crate::series::DiffeoJet;
use crate::Rational;

/// A one-parameter family `t ↦ exp(tX)` sampled at finitely many `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flow {
    pub name: String,
    pub field: VectorFieldJet,
    pub samples: Vec<Rational>,
}

/// Named generators plus sampled flows, all at one cutoff.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPresentation {
    nvars: usize,
    cutoff: u32,
    generators: Vec<(String, DiffeoJet)>,
    flows: Vec<Flow>,
}

/// A generator or the inverse of one.
#[derive(Clone, Debug)]
pub struct Letter {
    pub name: String,
    pub jet: DiffeoJet,
}

#[derive(Clone, Debug)]
pub struct Word {
    /// Letter indices; `2i` and `2i + 1` are mutually inverse.
    pub letters: Vec<usize>,
    pub label: String,
    pub jet: DiffeoJet,
}

impl GroupPresentation {
    pub fn new(generators: Vec<(String, DiffeoJet)>, flows: Vec<Flow>) -> Result<Self> {
        let (n, k) = match (generators.first(), flows.first()) {
            (Some((_, g)), _) => (g.nvars(), g.cutoff()),
            (None, Some(f)) => (f.field.nvars(), f.field.cutoff()),
            (None, None) => return Err(Error::DimensionMismatch("empty presentation".into())),
        };
        let shapes = generators
            .iter()
            .map(|(_, g)| (g.nvars(), g.cutoff()))
            .chain(flows.iter().map(|f| (f.field.nvars(), f.field.cutoff())));
        for (gn, gk) in shapes {
            if (gn, gk) != (n, k) {
                return Err(Error::DimensionMismatch(format!(
                    "generators mix {n} variables at cutoff {k} with {gn} at cutoff {gk}"
                )));
            }
        }
        for f in &flows {
            if !f.field.nilpotency().holds {
                return Err(Error::NotNilpotent(format!(
                    "flow {} has a non-nilpotent linear part",
                    f.name
                )));
            }
        }
        Ok(GroupPresentation {
            nvars: n,
            cutoff: k,
            generators,
            flows,
        })
    }

    pub fn from_maps(maps: Vec<DiffeoJet>) -> Result<Self> {
        let named = maps
            .into_iter()
            .enumerate()
            .map(|(i, g)| (format!("g{}", i + 1), g))
            .collect();
        Self::new(named, Vec::new())
    }

    /// Reads one generator per line:
    ///
    /// ```text
    /// phi = (x, y*(1+x))
    /// (x, y + x^2)                  # named g2
    /// flow X = (x^2)*d/dy @ 1/2, 2
    /// ```
    pub fn parse(text: &str, cutoff: u32) -> Result<Self> {
        let mut generators = Vec::new();
        let mut flow_lines = Vec::new();
        let mut line_start = 0;
        let shift = |start: usize| {
            move |e: Error| match e {
                Error::Parse { position, message } => Error::Parse {
                    position: start + position,
                    message,
                },
                other => other,
            }
        };
        for line in text.split_inclusive('\n') {
            let body = line.split('#').next().unwrap();
            let trimmed = body.trim();
            let start = line_start;
            line_start += line.len();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix("flow ") {
                flow_lines.push((
                    start + (body.len() - body.trim_start().len()) + 5,
                    rest.to_string(),
                ));
                continue;
            }
            let (name, map_text, offset) = match body.split_once('=') {
                Some((lhs, rhs)) => (lhs.trim().to_string(), rhs, lhs.len() + 1),
                None => (format!("g{}", generators.len() + 1), body, 0),
            };
            let g = parse_map(map_text, cutoff).map_err(shift(start + offset))?;
            generators.push((name, g));
        }
        let nvars = generators
            .first()
            .map(|(_, g): &(String, DiffeoJet)| g.nvars());
        let mut flows = Vec::new();
        for (start, rest) in flow_lines {
            let (lhs, rhs) = rest
                .split_once('=')
                .ok_or_else(|| Error::parse(start, "expected `flow NAME = FIELD @ t, …`"))?;
            let (field_text, samples_text) = rhs
                .split_once('@')
                .ok_or_else(|| Error::parse(start, "flow needs `@` followed by sample times"))?;
            let n = nvars.unwrap_or_else(|| infer_nvars(field_text));
            let field = VectorFieldJet::parse(field_text, n, cutoff)
                .map_err(shift(start + lhs.len() + 1))?;
            let samples = samples_text
                .split(',')
                .map(|s| parse_rational(s.trim()))
                .collect::<Result<Vec<_>>>()?;
            flows.push(Flow {
                name: lhs.trim().to_string(),
                field,
                samples,
            });
        }
        Self::new(generators, flows)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn generators(&self) -> &[(String, DiffeoJet)] {
        &self.generators
    }

    pub fn flows(&self) -> &[Flow] {
        &self.flows
    }

    /// Alphabet `g1, g1^-1, g2, g2^-1, …` followed by flow samples and their
    /// inverses.
    pub fn letters(&self) -> Result<Vec<Letter>> {
        let mut out = Vec::new();
        for (name, g) in &self.generators {
            out.push(Letter {
                name: name.clone(),
                jet: g.clone(),
            });
            out.push(Letter {
                name: format!("{name}^-1"),
                jet: g.inverse(),
            });
        }
        for f in &self.flows {
            for t in &f.samples {
                let jet = f.field.scale(t).exp()?;
                out.push(Letter {
                    name: format!("exp({t}*{})", f.name),
                    jet: jet.clone(),
                });
                out.push(Letter {
                    name: format!("exp({}*{})", -t, f.name),
                    jet: jet.inverse(),
                });
            }
        }
        Ok(out)
    }
}

fn word_label(letters: &[Letter], word: &[usize]) -> String {
    if word.is_empty() {
        return "id".into();
    }
    word.iter()
        .map(|&l| letters[l].name.as_str())
        .collect::<Vec<_>>()
        .join(".")
}

/// Freely reduced words of length `≤ max_len` in order of length, then
/// lexicographically by letter index. The jet of `l1 l2 … lm` is
/// `l1∘l2∘…∘lm`. With `dedup`, words whose jet already appeared are dropped.
pub fn enumerate_words(p: &GroupPresentation, max_len: usize, dedup: bool) -> Result<Vec<Word>> {
    let letters = p.letters()?;
    let identity = DiffeoJet::identity(p.nvars(), p.cutoff());
    let mut seen: HashSet<String> = HashSet::new();
    seen.insert(identity.to_string());
    let mut frontier = vec![Word {
        letters: Vec::new(),
        label: "id".into(),
        jet: identity,
    }];
    let mut out = frontier.clone();
    for _ in 0..max_len {
        // dropped duplicates are still extended: their extensions are other words
        let mut next = Vec::new();
        for parent in &frontier {
            for (l, letter) in letters.iter().enumerate() {
                if parent.letters.last().is_some_and(|&last| last ^ 1 == l) {
                    continue;
                }
                let mut word = parent.letters.clone();
                word.push(l);
                next.push(Word {
                    label: word_label(&letters, &word),
                    letters: word,
                    jet: parent.jet.compose(&letter.jet)?,
                });
            }
        }
        out.extend(
            next.iter()
                .filter(|w| !dedup || seen.insert(w.jet.to_string()))
                .cloned(),
        );
        frontier = next;
    }
    Ok(out)
}

/// Multiplicity at one word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepEntry {
    pub word: String,
    pub result: Result<MultiplicityResult>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepReport {
    pub word_length: usize,
    pub k_max: u32,
    pub entries: Vec<SweepEntry>,
    /// Largest certified value, if any.
    pub max_finite: Option<usize>,
    /// Words where no stabilization was seen up to `k_max`.
    pub divergent_words: Vec<String>,
}

impl SweepReport {
    fn from_entries(entries: Vec<SweepEntry>, word_length: usize, k_max: u32) -> Self {
        let max_finite = entries
            .iter()
            .filter_map(|e| e.result.as_ref().ok())
            .filter(|r| r.is_exact())
            .map(MultiplicityResult::value)
            .max();
        let divergent_words = entries
            .iter()
            .filter(|e| matches!(&e.result, Ok(r) if !r.is_exact()))
            .map(|e| e.word.clone())
            .collect();
        SweepReport {
            word_length,
            k_max,
            entries,
            max_finite,
            divergent_words,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("word,value,kind,certified-level\n");
        for e in &self.entries {
            match &e.result {
                Ok(r) => match r.kind {
                    MultiplicityKind::Exact { value, level } => {
                        s.push_str(&format!("{},{value},exact,{level}\n", e.word))
                    }
                    MultiplicityKind::LowerBound { value, .. } => {
                        s.push_str(&format!("{},{value},lower-bound,\n", e.word))
                    }
                },
                Err(err) => s.push_str(&format!("{},,error:{},\n", e.word, err.code())),
            }
        }
        s
    }
}

impl fmt::Display for SweepReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .entries
            .iter()
            .map(|e| e.word.len())
            .max()
            .unwrap_or(4)
            .max(4);
        for e in &self.entries {
            match &e.result {
                Ok(r) => writeln!(f, "{:<width$}  {r}", e.word)?,
                Err(err) => writeln!(f, "{:<width$}  error[{}]: {err}", e.word, err.code())?,
            }
        }
        match self.max_finite {
            Some(m) => writeln!(f, "max finite: {m}")?,
            None => writeln!(f, "max finite: none")?,
        }
        writeln!(f, "divergent: {}", self.divergent_words.len())?;
        write!(
            f,
            "note: words of length <= {} at k_max = {} only; evidence, not a bound for the whole group",
            self.word_length, self.k_max
        )
    }
}

fn with_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
    {
        Ok(pool) => pool.install(job),
        Err(_) => job(),
    }
}

/// `μ_w = dim O_n / (w*I + J)` for every enumerated word. Results are
/// independent of `workers`.
pub fn orbit_multiplicity_sweep(
    p: &GroupPresentation,
    i: &IdealSpec,
    j: &IdealSpec,
    max_len: usize,
    k_max: u32,
    dedup: bool,
    workers: usize,
) -> Result<SweepReport> {
    if i.nvars != p.nvars() || j.nvars != p.nvars() {
        return Err(Error::DimensionMismatch(format!(
            "ideals in {} and {} variables, generators in {}",
            i.nvars,
            j.nvars,
            p.nvars()
        )));
    }
    let words = enumerate_words(p, max_len, dedup)?;
    let entries = with_pool(workers, || {
        words
            .par_iter()
            .map(|w| SweepEntry {
                word: w.label.clone(),
                result: pullback_ideal(i, &w.jet).and_then(|pi| multiplicity(&pi, j, k_max)),
            })
            .collect::<Vec<_>>()
    });
    Ok(SweepReport::from_entries(entries, max_len, k_max))
}

/// `μ_n = dim O_n / ((φⁿ)*I + J)` for `n` in `range`.
pub fn arnold_sequence(
    phi: &DiffeoJet,
    i: &IdealSpec,
    j: &IdealSpec,
    range: RangeInclusive<i64>,
    k_max: u32,
) -> Result<Vec<(i64, Result<MultiplicityResult>)>> {
    if i.nvars != phi.nvars() || j.nvars != phi.nvars() {
        return Err(Error::DimensionMismatch(format!(
            "ideals in {} and {} variables, map in {}",
            i.nvars,
            j.nvars,
            phi.nvars()
        )));
    }
    let mut powers: BTreeMap<i64, DiffeoJet> = BTreeMap::new();
    let (lo, hi) = (*range.start(), *range.end());
    let mut cur = phi.pow(lo);
    for n in lo..=hi {
        powers.insert(n, cur.clone());
        cur = cur.compose(phi)?;
    }
    Ok(powers
        .into_par_iter()
        .map(|(n, pn)| {
            (
                n,
                pullback_ideal(i, &pn).and_then(|pi| multiplicity(&pi, j, k_max)),
            )
        })
        .collect())
}

/// Comparison of a sweep with a longer one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundednessVerdict {
    /// The longer sweep found no larger finite value.
    BoundedEvidence {
        max: Option<usize>,
    },
    Growing {
        from: usize,
        to: usize,
    },
}

impl fmt::Display for BoundednessVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundednessVerdict::BoundedEvidence { max: Some(m) } => {
                write!(f, "bounded-evidence max {m}")
            }
            BoundednessVerdict::BoundedEvidence { max: None } => {
                write!(f, "bounded-evidence no finite values")
            }
            BoundednessVerdict::Growing { from, to } => write!(f, "growing {from} -> {to}"),
        }
    }
}

pub fn boundedness_verdict(reference: &SweepReport, extended: &SweepReport) -> BoundednessVerdict {
    match (reference.max_finite, extended.max_finite) {
        (Some(a), Some(b)) if b > a => BoundednessVerdict::Growing { from: a, to: b },
        (None, Some(b)) => BoundednessVerdict::Growing { from: 0, to: b },
        (a, _) => BoundednessVerdict::BoundedEvidence { max: a },
    }
}

/// `key = value` settings for sweeps; `#` starts a comment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub word_length: usize,
    pub k_max: u32,
    pub cutoff: u32,
    pub workers: usize,
    pub dedup: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            word_length: 2,
            k_max: 32,
            cutoff: 8,
            workers: 1,
            dedup: false,
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut offset = 0;
        for line in text.split_inclusive('\n') {
            let start = offset;
            offset += line.len();
            let body = line.split('#').next().unwrap().trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| Error::parse(start, "expected `key = value`"))?;
            let value = value.trim();
            let bad = || Error::parse(start, format!("bad value {value:?} for {}", key.trim()));
            match key.trim() {
                "word_length" => cfg.word_length = value.parse().map_err(|_| bad())?,
                "k_max" => cfg.k_max = value.parse().map_err(|_| bad())?,
                "cutoff" => cfg.cutoff = value.parse().map_err(|_| bad())?,
                "workers" => cfg.workers = value.parse().map_err(|_| bad())?,
                "dedup" => cfg.dedup = value.parse().map_err(|_| bad())?,
                other => return Err(Error::parse(start, format!("unknown key {other:?}"))),
            }
        }
        Ok(cfg)
    }
}
