//! Intersection multiplicities `dim_ℂ O_n / (I + J)` through jet quotients.
//!
//! With `m` the maximal ideal, `d_k = dim O_n / (I + m^{k+1})` is computed as
//! the corank of the span of all truncated multiples `z^α g`. The sequence
//! `d_k` is non-decreasing and bounded by the multiplicity; once
//! `d_k = d_{k+1}` Nakayama's lemma gives `m^{k+1} ⊂ I` and `d_k` is exact.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{EchelonBasis, SparseVec};
use crate::parse::{infer_nvars, parse_polynomial, POLYNOMIAL_CUTOFF};
use crate::series::{monomial_count, DiffeoJet, MonomialBasis, TruncatedSeries};

/// An ideal generator. `validity: None` marks an exact polynomial; `Some(v)`
/// means only terms of degree `≤ v` are known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub series: TruncatedSeries,
    pub validity: Option<u32>,
}

impl Generator {
    pub fn exact(series: TruncatedSeries) -> Self {
        Generator {
            series,
            validity: None,
        }
    }
}

/// Finitely many generators of an ideal of `O_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealSpec {
    pub nvars: usize,
    pub generators: Vec<Generator>,
}

impl IdealSpec {
    pub fn new(nvars: usize, generators: Vec<Generator>) -> Result<Self> {
        for g in &generators {
            if g.series.nvars() != nvars {
                return Err(Error::DimensionMismatch(format!(
                    "generator in {} variables for an ideal in {nvars}",
                    g.series.nvars()
                )));
            }
        }
        Ok(IdealSpec { nvars, generators })
    }

    /// Ideal generated by exact polynomials written in the text grammar.
    pub fn from_polynomials(nvars: usize, polys: &[&str]) -> Result<Self> {
        let generators = polys
            .iter()
            .map(|p| parse_polynomial(p, nvars).map(Generator::exact))
            .collect::<Result<_>>()?;
        IdealSpec::new(nvars, generators)
    }

    /// Degree up to which every generator is known (`None` if all are exact).
    pub fn validity(&self) -> Option<u32> {
        self.generators.iter().filter_map(|g| g.validity).min()
    }

    /// `I + J`.
    pub fn sum(&self, other: &IdealSpec) -> Result<IdealSpec> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch(format!(
                "ideals in {} and {} variables",
                self.nvars, other.nvars
            )));
        }
        let mut generators = self.generators.clone();
        generators.extend(other.generators.iter().cloned());
        Ok(IdealSpec {
            nvars: self.nvars,
            generators,
        })
    }
}

impl fmt::Display for IdealSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, g) in self.generators.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", g.series)?;
            if let Some(v) = g.validity {
                write!(f, " + O({})", v + 1)?;
            }
        }
        write!(f, ")")
    }
}

/// One polynomial per line; blank lines and `#` comments are skipped. The
/// variable count is inferred from the text unless given.
pub fn parse_ideal(text: &str, nvars: Option<usize>) -> Result<IdealSpec> {
    let n = nvars.unwrap_or_else(|| {
        text.lines()
            .map(|l| infer_nvars(l.split('#').next().unwrap()))
            .max()
            .unwrap_or(1)
    });
    let mut generators = Vec::new();
    let mut line_start = 0;
    for line in text.split_inclusive('\n') {
        let body = line.split('#').next().unwrap();
        if !body.trim().is_empty() {
            let g = parse_polynomial(body, n).map_err(|e| match e {
                Error::Parse { position, message } => Error::Parse {
                    position: line_start + position,
                    message,
                },
                other => other,
            })?;
            generators.push(Generator::exact(g));
        }
        line_start += line.len();
    }
    IdealSpec::new(n, generators)
}

/// `φ*I = (g∘φ)`, valid up to the cutoff of `φ`.
pub fn pullback_ideal(ideal: &IdealSpec, phi: &DiffeoJet) -> Result<IdealSpec> {
    if ideal.nvars != phi.nvars() {
        return Err(Error::DimensionMismatch(format!(
            "ideal in {} variables, map in {}",
            ideal.nvars,
            phi.nvars()
        )));
    }
    let k = phi.cutoff();
    let generators = ideal
        .generators
        .iter()
        .map(|g| {
            Ok(Generator {
                series: g.series.recut(k).substitute(phi)?,
                validity: Some(g.validity.map_or(k, |v| v.min(k))),
            })
        })
        .collect::<Result<_>>()?;
    Ok(IdealSpec {
        nvars: ideal.nvars,
        generators,
    })
}

/// `d_k = dim O_n / (I + m^{k+1})`.
pub fn jet_quotient_dim(ideal: &IdealSpec, k: u32) -> Result<usize> {
    if let Some(v) = ideal.validity() {
        if v < k {
            return Err(Error::Validity {
                needed: k,
                available: v,
            });
        }
    }
    let n = ideal.nvars;
    let basis = MonomialBasis::new(n, 0, k);
    let total = basis.len();
    let mut echelon = EchelonBasis::new();
    for g in &ideal.generators {
        let Some(ord) = g.series.order() else {
            continue;
        };
        if ord > k {
            continue;
        }
        let low: Vec<_> = g.series.terms().filter(|(m, _)| m.degree() <= k).collect();
        for alpha in MonomialBasis::new(n, 0, k - ord).monomials() {
            let room = k - alpha.degree();
            let row: SparseVec = low
                .iter()
                .filter(|(m, _)| m.degree() <= room)
                .map(|(m, c)| {
                    let idx = basis.index_of(&m.add(alpha)).expect("degree within k");
                    (idx, (*c).clone())
                })
                .collect();
            echelon.insert(row);
            if echelon.rank() == total {
                return Ok(0);
            }
        }
    }
    debug_assert_eq!(total, monomial_count(n, k));
    Ok(total - echelon.rank())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MultiplicityKind {
    /// `d_level = d_{level+1}`, so the value is the multiplicity.
    Exact { value: usize, level: u32 },
    /// No stabilization up to `horizon`; the multiplicity is at least `value`
    /// and may be infinite.
    LowerBound { value: usize, horizon: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicityResult {
    pub kind: MultiplicityKind,
    /// `(k, d_k)` for every computed level.
    pub jet_dims: Vec<(u32, usize)>,
}

impl MultiplicityResult {
    pub fn value(&self) -> usize {
        match self.kind {
            MultiplicityKind::Exact { value, .. } | MultiplicityKind::LowerBound { value, .. } => {
                value
            }
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.kind, MultiplicityKind::Exact { .. })
    }

    /// Certified level for exact results.
    pub fn level(&self) -> Option<u32> {
        match self.kind {
            MultiplicityKind::Exact { level, .. } => Some(level),
            MultiplicityKind::LowerBound { .. } => None,
        }
    }
}

impl fmt::Display for MultiplicityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MultiplicityKind::Exact { value, level } => {
                write!(f, "exact {value} certified-at {level}")
            }
            MultiplicityKind::LowerBound { value, horizon } => {
                write!(f, "lower-bound {value} horizon {horizon}")
            }
        }
    }
}

impl fmt::Display for MultiplicityResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.kind.fmt(f)
    }
}

/// `dim O_n / (I + J)`, certified exactly when the jet dimensions stabilize
/// within `k_max` (and within the validity of the generators).
pub fn multiplicity(i: &IdealSpec, j: &IdealSpec, k_max: u32) -> Result<MultiplicityResult> {
    let sum = i.sum(j)?;
    let validity = sum.validity().unwrap_or(POLYNOMIAL_CUTOFF);
    let horizon = k_max.min(validity);
    let mut jet_dims = Vec::new();
    let mut prev: Option<usize> = None;
    for k in 0..=horizon {
        let d = jet_quotient_dim(&sum, k)?;
        jet_dims.push((k, d));
        if prev == Some(d) {
            return Ok(MultiplicityResult {
                kind: MultiplicityKind::Exact {
                    value: d,
                    level: k - 1,
                },
                jet_dims,
            });
        }
        prev = Some(d);
    }
    if horizon < k_max {
        return Err(Error::Validity {
            needed: k_max,
            available: validity,
        });
    }
    Ok(MultiplicityResult {
        kind: MultiplicityKind::LowerBound {
            value: prev.unwrap_or(0),
            horizon,
        },
        jet_dims,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_map;

    fn ideal(n: usize, gens: &[&str]) -> IdealSpec {
        IdealSpec::from_polynomials(n, gens).unwrap()
    }

    fn exact(value: usize, level: u32) -> MultiplicityKind {
        MultiplicityKind::Exact { value, level }
    }

    #[test]
    fn transversal_and_tangent_lines() {
        let m = multiplicity(&ideal(2, &["y"]), &ideal(2, &["x"]), 10).unwrap();
        assert_eq!(m.kind, exact(1, 0));
        let m = multiplicity(&ideal(2, &["y - x^2"]), &ideal(2, &["y"]), 10).unwrap();
        assert_eq!(m.kind, exact(2, 1));
        let m = multiplicity(&ideal(2, &["y^2 - x^3"]), &ideal(2, &["y"]), 10).unwrap();
        assert_eq!(m.value(), 3);
        assert_eq!(
            m.jet_dims.iter().map(|d| d.1).collect::<Vec<_>>(),
            [1, 2, 3, 3]
        );
    }

    #[test]
    fn curve_with_itself_diverges() {
        let i = ideal(2, &["y"]);
        let m = multiplicity(&i, &i, 12).unwrap();
        assert_eq!(
            m.kind,
            MultiplicityKind::LowerBound {
                value: 13,
                horizon: 12
            }
        );
    }

    #[test]
    fn unit_ideal_has_zero_quotient() {
        let m = multiplicity(&ideal(2, &["1 + x"]), &ideal(2, &["y"]), 5).unwrap();
        assert_eq!(m.kind, exact(0, 0));
    }

    #[test]
    fn three_variables() {
        let m = multiplicity(&ideal(3, &["x", "y", "z^3"]), &ideal(3, &["y"]), 10).unwrap();
        assert_eq!(m.kind, exact(3, 2));
    }

    #[test]
    fn pullback_by_tangency() {
        // (x, y + x^2) pulls (y) back to (y + x^2)
        let phi = parse_map("(x, y + x^2)", 8).unwrap();
        let i = ideal(2, &["y"]);
        let pulled = pullback_ideal(&i, &phi).unwrap();
        assert_eq!(pulled.validity(), Some(8));
        assert_eq!(multiplicity(&i, &pulled, 12).unwrap().kind, exact(2, 1));
        // (x, y(1+x)) preserves (y): no stabilization before validity runs out
        let keep = pullback_ideal(&i, &parse_map("(x, y*(1+x))", 8).unwrap()).unwrap();
        let err = multiplicity(&i, &keep, 12).unwrap_err();
        assert_eq!(
            err,
            Error::Validity {
                needed: 12,
                available: 8
            }
        );
        assert_eq!(jet_quotient_dim(&pulled, 9).unwrap_err().code(), "VALIDITY");
    }

    #[test]
    fn ideal_file_format() {
        let i = parse_ideal("# a cusp\ny^2 - x^3\n\ny  # line\n", None).unwrap();
        assert_eq!(i.nvars, 2);
        assert_eq!(i.generators.len(), 2);
        let three = parse_ideal("x\nz^2\n", None).unwrap();
        assert_eq!(three.nvars, 3);
        match parse_ideal("x\ny +* x\n", None).unwrap_err() {
            Error::Parse { position, .. } => assert_eq!(position, 5),
            e => panic!("{e:?}"),
        }
        assert!(parse_ideal("x/y\n", None).is_err());
        let mismatch = ideal(2, &["y"]).sum(&ideal(3, &["z"]));
        assert_eq!(mismatch.unwrap_err().code(), "DIM_MISMATCH");
    }

    #[test]
    fn display_forms() {
        let m = multiplicity(&ideal(2, &["y - x^2"]), &ideal(2, &["y"]), 10).unwrap();
        assert_eq!(m.to_string(), "exact 2 certified-at 1");
        let i = ideal(2, &["y"]);
        assert_eq!(
            multiplicity(&i, &i, 4).unwrap().to_string(),
            "lower-bound 5 horizon 4"
        );
    }
}
