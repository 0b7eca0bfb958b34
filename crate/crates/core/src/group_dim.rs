//! Dimensions of Zariski closures of groups of jets.
//!
//! Diagonal (semisimple) data is handled through character lattices: the
//! closure of `⟨diag(λ)⟩` is the subtorus cut out by the relation lattice
//! `Λ = {a ∈ ℤⁿ : Πλᵢ^{aᵢ} = 1}`, of dimension `n − rank Λ`. Unipotent groups
//! are measured through the Lie algebra generated by the logarithms of their
//! generators in `L_k`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::jet::{log_map, VectorFieldJet};
use crate::jordan::multiplicative_jordan;
use crate::lattice::{hermite_normal_form, integer_kernel, IntMatrix};
use crate::linalg::{EchelonBasis, SparseVec};
use crate::parse::parse_rational;
use crate::series::{DiffeoJet, MonomialBasis, TruncatedSeries};
use crate::Rational;

/// `ζ_r^s · q`: a root of unity times a positive rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootTimesRational {
    pub modulus: Rational,
    pub numerator: u64,
    pub order: u64,
}

impl RootTimesRational {
    pub fn rational(q: Rational) -> Self {
        if q.is_negative() {
            RootTimesRational {
                modulus: -q,
                numerator: 1,
                order: 2,
            }
        } else {
            RootTimesRational {
                modulus: q,
                numerator: 0,
                order: 1,
            }
        }
    }

    /// The value when it is rational (root part ±1).
    pub fn as_rational(&self) -> Option<Rational> {
        if self.numerator == 0 {
            Some(self.modulus.clone())
        } else if 2 * self.numerator == self.order {
            Some(-self.modulus.clone())
        } else {
            None
        }
    }
}

/// Eigenvalue data in an exactly decidable form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EigenvalueSpec {
    /// `λᵢ = ζ_{rᵢ}^{sᵢ} qᵢ`.
    Roots(Vec<RootTimesRational>),
    /// `λᵢ = Π_j b_j^{e_ij}` over multiplicatively independent symbols `b_j`.
    Multiplicative(Vec<Vec<Rational>>),
    /// `μᵢ = Σ_j c_ij β_j` over ℚ-linearly independent symbols `β_j`.
    Additive(Vec<Vec<Rational>>),
}

impl EigenvalueSpec {
    pub fn from_rationals(values: &[Rational]) -> Self {
        EigenvalueSpec::Roots(
            values
                .iter()
                .cloned()
                .map(RootTimesRational::rational)
                .collect(),
        )
    }

    pub fn nvars(&self) -> usize {
        match self {
            EigenvalueSpec::Roots(v) => v.len(),
            EigenvalueSpec::Multiplicative(v) | EigenvalueSpec::Additive(v) => v.len(),
        }
    }

    pub fn is_additive(&self) -> bool {
        matches!(self, EigenvalueSpec::Additive(_))
    }

    pub fn validate(&self) -> Result<()> {
        if self.nvars() == 0 {
            return Err(Error::InvalidSpec("no coordinates".into()));
        }
        match self {
            EigenvalueSpec::Roots(v) => {
                for (i, e) in v.iter().enumerate() {
                    if !e.modulus.is_positive() {
                        return Err(Error::InvalidSpec(format!(
                            "coordinate {}: modulus must be positive",
                            i + 1
                        )));
                    }
                    if e.order == 0 || e.numerator >= e.order {
                        return Err(Error::InvalidSpec(format!(
                            "coordinate {}: need 0 <= s < r and r >= 1",
                            i + 1
                        )));
                    }
                }
            }
            EigenvalueSpec::Multiplicative(rows) | EigenvalueSpec::Additive(rows) => {
                let width = rows[0].len();
                if rows.iter().any(|r| r.len() != width) {
                    return Err(Error::InvalidSpec(
                        "symbol-basis vectors have inconsistent lengths".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Reads the line format:
    ///
    /// ```text
    /// roots            # or: multiplicative / additive
    /// 2
    /// 1/2 zeta 1 3     # ζ₃ · 1/2
    /// ```
    ///
    /// Symbol forms list one whitespace-separated rational vector per line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap().trim()))
            .filter(|(_, l)| !l.is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::InvalidSpec("empty eigenvalue file".into()))?;
        let bad = |line: usize, msg: &str| Error::InvalidSpec(format!("line {line}: {msg}"));
        let spec = match header {
            "roots" => {
                let mut v = Vec::new();
                for (ln, l) in lines {
                    let parts: Vec<&str> = l.split_whitespace().collect();
                    let q = parse_rational(parts[0]).map_err(|_| bad(ln, "bad rational"))?;
                    let entry = match parts.as_slice() {
                        [_] => RootTimesRational::rational(q),
                        [_, "zeta", s, r] => RootTimesRational {
                            modulus: q,
                            numerator: s.parse().map_err(|_| bad(ln, "bad root numerator"))?,
                            order: r.parse().map_err(|_| bad(ln, "bad root order"))?,
                        },
                        _ => return Err(bad(ln, "expected `q` or `q zeta s r`")),
                    };
                    v.push(entry);
                }
                EigenvalueSpec::Roots(v)
            }
            "multiplicative" | "additive" => {
                let mut rows = Vec::new();
                for (ln, l) in lines {
                    let row = l
                        .split_whitespace()
                        .map(parse_rational)
                        .collect::<Result<Vec<_>>>()
                        .map_err(|_| bad(ln, "bad rational"))?;
                    rows.push(row);
                }
                if header == "additive" {
                    EigenvalueSpec::Additive(rows)
                } else {
                    EigenvalueSpec::Multiplicative(rows)
                }
            }
            other => {
                return Err(Error::InvalidSpec(format!(
                    "unknown eigenvalue format {other:?}"
                )))
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Integer relations among eigenvalue data, as a Hermite-normal-form basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationLattice {
    nvars: usize,
    basis: IntMatrix,
}

impl RelationLattice {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }
}

fn prime_factors(n: &BigInt) -> Vec<BigInt> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        if (&n % &p).is_zero() {
            out.push(p.clone());
            while (&n % &p).is_zero() {
                n /= &p;
            }
        }
        p += 1;
    }
    if n > BigInt::one() {
        out.push(n);
    }
    out
}

fn valuation(n: &BigInt, p: &BigInt) -> i64 {
    let mut n = n.clone();
    let mut v = 0;
    while !n.is_zero() && (&n % p).is_zero() {
        n /= p;
        v += 1;
    }
    v
}

/// Integer rows whose kernel is `{a : Σᵢ aᵢ rowsᵢ = 0}` (one constraint per
/// symbol column).
fn symbol_constraints(rows: &[Vec<Rational>]) -> Vec<Vec<BigInt>> {
    let width = rows.first().map_or(0, Vec::len);
    (0..width)
        .map(|j| {
            let lcm = rows
                .iter()
                .fold(BigInt::one(), |acc, r| acc.lcm(r[j].denom()));
            rows.iter()
                .map(|r| (r[j].clone() * Rational::from_integer(lcm.clone())).to_integer())
                .collect()
        })
        .collect()
}

pub fn relation_lattice(spec: &EigenvalueSpec) -> Result<RelationLattice> {
    spec.validate()?;
    let n = spec.nvars();
    let basis = match spec {
        EigenvalueSpec::Roots(v) => {
            let mut primes: Vec<BigInt> = Vec::new();
            for e in v {
                for p in prime_factors(e.modulus.numer())
                    .into_iter()
                    .chain(prime_factors(e.modulus.denom()))
                {
                    if !primes.contains(&p) {
                        primes.push(p);
                    }
                }
            }
            primes.sort();
            let big_r = v.iter().fold(1u64, |acc, e| acc.lcm(&e.order));
            // extra column t: Σ aᵢ sᵢ R/rᵢ + R t = 0
            let mut constraints: Vec<Vec<BigInt>> = primes
                .iter()
                .map(|p| {
                    let mut row: Vec<BigInt> = v
                        .iter()
                        .map(|e| {
                            BigInt::from(
                                valuation(e.modulus.numer(), p) - valuation(e.modulus.denom(), p),
                            )
                        })
                        .collect();
                    row.push(BigInt::zero());
                    row
                })
                .collect();
            let mut row: Vec<BigInt> = v
                .iter()
                .map(|e| BigInt::from(e.numerator * (big_r / e.order)))
                .collect();
            row.push(BigInt::from(big_r));
            constraints.push(row);
            let kernel = integer_kernel(&constraints, n + 1);
            let projected: IntMatrix = kernel
                .into_iter()
                .map(|mut r| {
                    r.pop();
                    r
                })
                .collect();
            hermite_normal_form(&projected)
        }
        EigenvalueSpec::Multiplicative(rows) | EigenvalueSpec::Additive(rows) => {
            integer_kernel(&symbol_constraints(rows), n)
        }
    };
    Ok(RelationLattice { nvars: n, basis })
}

/// Dimension of the closure of the cyclic group of a diagonal map.
pub fn semisimple_closure_dim(spec: &EigenvalueSpec) -> Result<usize> {
    Ok(spec.nvars() - relation_lattice(spec)?.rank())
}

/// Checks `spec` against the linear part of `φ_s` where it is decidable.
fn cross_check(phi: &DiffeoJet, spec: &EigenvalueSpec) -> Result<()> {
    let EigenvalueSpec::Roots(entries) = spec else {
        return Ok(());
    };
    let a = phi.linear_part().matrix().clone();
    let chi = a.charpoly();
    let mut rational: Vec<(Rational, usize)> = Vec::new();
    for e in entries {
        if let Some(l) = e.as_rational() {
            match rational.iter_mut().find(|(v, _)| *v == l) {
                Some((_, m)) => *m += 1,
                None => rational.push((l, 1)),
            }
        }
    }
    for (l, m) in &rational {
        let got = chi.root_multiplicity(l);
        if got != *m {
            return Err(Error::SpecMismatch(format!(
                "eigenvalue {l} has multiplicity {got} in the linear part, {m} in the data"
            )));
        }
    }
    let modulus_product = entries
        .iter()
        .fold(Rational::one(), |acc, e| acc * &e.modulus);
    if a.determinant().abs() != modulus_product {
        return Err(Error::SpecMismatch(format!(
            "|det D₀φ| = {} but the data gives {}",
            a.determinant().abs(),
            modulus_product
        )));
    }
    for e in entries.iter().filter(|e| e.as_rational().is_none()) {
        for cand in [e.modulus.clone(), -e.modulus.clone()] {
            if chi.root_multiplicity(&cand)
                > rational.iter().find(|(v, _)| *v == cand).map_or(0, |x| x.1)
            {
                return Err(Error::SpecMismatch(format!(
                    "linear part has rational eigenvalue {cand} not declared"
                )));
            }
        }
    }
    Ok(())
}

/// `dim ⟨φ⟩_k = dim ⟨φ_s⟩_k + dim ⟨φ_u⟩_k`, with the caller describing the
/// eigenvalues of `D₀φ_s`.
pub fn cyclic_dim(phi: &DiffeoJet, spec: &EigenvalueSpec) -> Result<usize> {
    if spec.is_additive() {
        return Err(Error::InvalidSpec(
            "cyclic groups need multiplicative eigenvalue data".into(),
        ));
    }
    if spec.nvars() != phi.nvars() {
        return Err(Error::SpecMismatch(format!(
            "{} eigenvalues for a map in {} variables",
            spec.nvars(),
            phi.nvars()
        )));
    }
    let pair = multiplicative_jordan(phi)?;
    cross_check(&pair.semisimple, spec)?;
    let dim = semisimple_closure_dim(spec)? + usize::from(!pair.unipotent.is_identity());
    if dim > phi.nvars() {
        return Err(Error::SpecMismatch(format!(
            "closure dimension {dim} exceeds {} variables; the eigenvalue data must miss a relation",
            phi.nvars()
        )));
    }
    Ok(dim)
}

/// Dimension of `{exp(tX) : t ∈ ℂ}` for `X = X_s + X_N`, where `X_s` is the
/// diagonal field `Σ μᵢ zᵢ ∂/∂zᵢ` described by the additive `spec`.
pub fn one_param_dim(spec: &EigenvalueSpec, nilpotent: &VectorFieldJet) -> Result<usize> {
    let EigenvalueSpec::Additive(mu) = spec else {
        return Err(Error::InvalidSpec(
            "one-parameter groups need additive eigenvalue data".into(),
        ));
    };
    spec.validate()?;
    let n = spec.nvars();
    if nilpotent.nvars() != n {
        return Err(Error::DimensionMismatch(format!(
            "{n} eigenvalues for a field in {} variables",
            nilpotent.nvars()
        )));
    }
    if !nilpotent.nilpotency().holds {
        return Err(Error::InvalidSplitting(
            "declared nilpotent part has a non-nilpotent linear part".into(),
        ));
    }
    // [X_s, z^α ∂_j] = (⟨α, μ⟩ − μ_j) z^α ∂_j
    let width = mu[0].len();
    for (j, comp) in nilpotent.components().iter().enumerate() {
        for (m, _) in comp.terms() {
            let weight_is_zero = (0..width).all(|s| {
                let w = m
                    .exponents()
                    .iter()
                    .zip(mu)
                    .fold(Rational::zero(), |acc, (&e, row)| {
                        acc + &row[s] * Rational::from_integer(e.into())
                    });
                w == mu[j][s]
            });
            if !weight_is_zero {
                return Err(Error::InvalidSplitting(format!(
                    "term {} in component {} does not commute with the diagonal part",
                    TruncatedSeries::monomial(n, comp.cutoff(), m.clone(), Rational::one()),
                    j + 1
                )));
            }
        }
    }
    let dim = semisimple_closure_dim(spec)? + usize::from(!nilpotent.is_zero());
    if dim > n {
        return Err(Error::SpecMismatch(format!(
            "one-parameter dimension {dim} exceeds {n}"
        )));
    }
    Ok(dim)
}

/// `dim G ≤ Σ dim H_j` for `G = H₁⋯H_m`.
pub fn product_dim_bound(parts: &[usize]) -> usize {
    parts.iter().sum()
}

/// Coordinates of vector fields on the basis `z^α ∂/∂zᵢ`, ordered by the
/// monomial (graded-lex) then by the component.
struct FieldCoordinates {
    nvars: usize,
    cutoff: u32,
    monomials: MonomialBasis,
}

impl FieldCoordinates {
    fn new(nvars: usize, cutoff: u32) -> Self {
        FieldCoordinates {
            nvars,
            cutoff,
            monomials: MonomialBasis::new(nvars, 1, cutoff),
        }
    }

    fn to_vec(&self, x: &VectorFieldJet) -> SparseVec {
        let mut v = SparseVec::new();
        for (i, c) in x.components().iter().enumerate() {
            for (m, coeff) in c.terms() {
                let idx = self
                    .monomials
                    .index_of(m)
                    .expect("vector fields vanish at 0");
                v.insert(idx * self.nvars + i, coeff.clone());
            }
        }
        v
    }

    fn to_field(&self, v: &SparseVec) -> VectorFieldJet {
        let mut comps = vec![TruncatedSeries::zero(self.nvars, self.cutoff); self.nvars];
        for (&idx, coeff) in v {
            let m = self.monomials.get(idx / self.nvars).clone();
            let i = idx % self.nvars;
            comps[i] =
                &comps[i] + &TruncatedSeries::monomial(self.nvars, self.cutoff, m, coeff.clone());
        }
        VectorFieldJet::new(comps).expect("coordinates describe a vanishing field")
    }
}

/// Bracket-closed span of vector fields, in reduced row echelon form.
#[derive(Clone)]
pub struct LieBasis {
    coords: std::sync::Arc<FieldCoordinates>,
    echelon: EchelonBasis,
    elements: Vec<VectorFieldJet>,
}

impl fmt::Debug for LieBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LieBasis")
            .field("nvars", &self.coords.nvars)
            .field("cutoff", &self.coords.cutoff)
            .field("elements", &self.elements)
            .finish()
    }
}

impl PartialEq for LieBasis {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements
    }
}

impl LieBasis {
    fn from_echelon(coords: std::sync::Arc<FieldCoordinates>, echelon: EchelonBasis) -> Self {
        let elements = echelon
            .reduced_rows()
            .iter()
            .map(|r| coords.to_field(r))
            .collect();
        LieBasis {
            coords,
            echelon,
            elements,
        }
    }

    fn span_of(coords: &std::sync::Arc<FieldCoordinates>, fields: &[VectorFieldJet]) -> Self {
        let mut echelon = EchelonBasis::new();
        for f in fields {
            echelon.insert(coords.to_vec(f));
        }
        Self::from_echelon(coords.clone(), echelon)
    }

    pub fn nvars(&self) -> usize {
        self.coords.nvars
    }

    pub fn cutoff(&self) -> u32 {
        self.coords.cutoff
    }

    pub fn elements(&self) -> &[VectorFieldJet] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, x: &VectorFieldJet) -> bool {
        x.nvars() == self.nvars()
            && x.cutoff() == self.cutoff()
            && self.echelon.contains(&self.coords.to_vec(x))
    }

    pub fn contains_span(&self, other: &LieBasis) -> bool {
        other.elements.iter().all(|x| self.contains(x))
    }

    /// Span of all `[a, b]` with `a` from `self`, `b` from `other`.
    fn bracket_span(&self, other: &LieBasis) -> LieBasis {
        let mut echelon = EchelonBasis::new();
        for a in &self.elements {
            for b in &other.elements {
                let br = a.bracket(b).expect("same shape");
                echelon.insert(self.coords.to_vec(&br));
            }
        }
        Self::from_echelon(self.coords.clone(), echelon)
    }

    /// Length of the derived series; `None` if it stalls before reaching 0.
    pub fn derived_length(&self) -> Option<usize> {
        let mut cur = self.clone();
        let mut len = 0;
        while cur.dim() > 0 {
            let next = cur.bracket_span(&cur);
            if next.dim() == cur.dim() {
                return None;
            }
            cur = next;
            len += 1;
        }
        Some(len)
    }

    /// Least `c` with `C^c g = 0` for `C^0 = g`, `C^{i+1} = [g, C^i]`.
    pub fn nilpotency_class(&self) -> Option<usize> {
        let mut cur = self.clone();
        let mut class = 0;
        while cur.dim() > 0 {
            let next = self.bracket_span(&cur);
            if next.dim() == cur.dim() {
                return None;
            }
            cur = next;
            class += 1;
        }
        Some(class)
    }
}

/// Smallest bracket-closed subspace of `L_k` containing `gens`.
pub fn lie_closure(gens: &[VectorFieldJet]) -> Result<LieBasis> {
    let first = gens
        .first()
        .ok_or_else(|| Error::DimensionMismatch("no generators".into()))?;
    let (n, k) = (first.nvars(), first.cutoff());
    for g in gens {
        if g.nvars() != n || g.cutoff() != k {
            return Err(Error::DimensionMismatch(format!(
                "generators mix {n} variables at cutoff {k} with {} at cutoff {}",
                g.nvars(),
                g.cutoff()
            )));
        }
    }
    let coords = std::sync::Arc::new(FieldCoordinates::new(n, k));
    let mut echelon = EchelonBasis::new();
    let mut found: Vec<VectorFieldJet> = Vec::new();
    for g in gens {
        if echelon.insert(coords.to_vec(g)) {
            found.push(g.clone());
        }
    }
    // every pair (a, b) with b < a is bracketed once; new elements join the queue
    let mut a = 0;
    while a < found.len() {
        for b in 0..a {
            let br = found[a].bracket(&found[b])?;
            if echelon.insert(coords.to_vec(&br)) {
                found.push(br);
            }
        }
        a += 1;
    }
    Ok(LieBasis::from_echelon(coords, echelon))
}

fn logs_at(gens: &[DiffeoJet], k: u32) -> Result<Vec<VectorFieldJet>> {
    gens.iter().map(|g| log_map(&g.project(k)?)).collect()
}

fn closure_at(gens: &[DiffeoJet], k: u32) -> Result<Option<LieBasis>> {
    if gens.is_empty() {
        return Ok(None);
    }
    lie_closure(&logs_at(gens, k)?).map(Some)
}

/// `dim G_k` for `G` generated by unipotent jets.
pub fn unipotent_group_dim_at(gens: &[DiffeoJet], k: u32) -> Result<usize> {
    Ok(closure_at(gens, k)?.map_or(0, |b| b.dim()))
}

/// Outcome of a dimension probe over a finite window of levels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Constant from `since` to the end of the window. Evidence, not proof.
    Stabilized {
        value: usize,
        since: u32,
    },
    /// Increased at every step; certifies `dim > ` the last value.
    StrictlyGrowing {
        horizon: u32,
    },
    Inconclusive {
        horizon: u32,
    },
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Stabilized { value, since } => write!(f, "stabilized {value} since {since}"),
            Verdict::StrictlyGrowing { horizon } => write!(f, "strictly-growing horizon {horizon}"),
            Verdict::Inconclusive { horizon } => write!(f, "inconclusive horizon {horizon}"),
        }
    }
}

/// Per-level dimensions with a stabilization verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimReport {
    pub levels: Vec<(u32, usize)>,
    pub verdict: Verdict,
}

impl DimReport {
    pub fn from_levels(levels: Vec<(u32, usize)>) -> Self {
        let horizon = levels.last().map_or(0, |l| l.0);
        let dims: Vec<usize> = levels.iter().map(|l| l.1).collect();
        let verdict = if dims.len() >= 2 && dims.windows(2).all(|w| w[1] > w[0]) {
            Verdict::StrictlyGrowing { horizon }
        } else if dims.len() == 1 || dims.len() >= 2 && dims[dims.len() - 1] == dims[dims.len() - 2]
        {
            let last = *dims.last().unwrap();
            let start = dims.iter().rposition(|&d| d != last).map_or(0, |p| p + 1);
            Verdict::Stabilized {
                value: last,
                since: levels[start].0,
            }
        } else {
            Verdict::Inconclusive { horizon }
        };
        DimReport { levels, verdict }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,dim\n");
        for (k, d) in &self.levels {
            s.push_str(&format!("{k},{d}\n"));
        }
        s
    }
}

impl fmt::Display for DimReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>4}  {:>6}", "k", "dim")?;
        for (k, d) in &self.levels {
            writeln!(f, "{k:>4}  {d:>6}")?;
        }
        writeln!(f, "verdict: {}", self.verdict)?;
        write!(f, "note: verdicts cover the computed window only")
    }
}

/// Computes `dim G_k` for `k_min ≤ k ≤ k_max`. Levels are independent and
/// evaluated in parallel; the report is ordered by level.
pub fn dim_stabilization_probe(gens: &[DiffeoJet], k_min: u32, k_max: u32) -> Result<DimReport> {
    if k_min == 0 || k_min > k_max {
        return Err(Error::Level {
            requested: k_min,
            cutoff: k_max,
        });
    }
    let dims = (k_min..=k_max)
        .into_par_iter()
        .map(|k| unipotent_group_dim_at(gens, k).map(|d| (k, d)))
        .collect::<Result<Vec<_>>>()?;
    Ok(DimReport::from_levels(dims))
}

/// Derived length and nilpotency class of the Lie algebra of `G_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeriesProfile {
    pub level: u32,
    pub dimension: usize,
    pub derived_length: Option<usize>,
    pub nilpotency_class: Option<usize>,
}

pub fn series_profile(gens: &[DiffeoJet], k: u32) -> Result<SeriesProfile> {
    let (dimension, derived_length, nilpotency_class) = match closure_at(gens, k)? {
        None => (0, Some(0), Some(0)),
        Some(g) => (g.dim(), g.derived_length(), g.nilpotency_class()),
    };
    Ok(SeriesProfile {
        level: k,
        dimension,
        derived_length,
        nilpotency_class,
    })
}

/// `dim G_k − dim H_k` after checking that `H`'s Lie algebra lies in `G`'s.
pub fn codim_at(g: &[DiffeoJet], h: &[DiffeoJet], k: u32) -> Result<usize> {
    let gb = closure_at(g, k)?;
    let hb = closure_at(h, k)?;
    match (gb, hb) {
        (_, None) => Ok(unipotent_group_dim_at(g, k)?),
        (None, Some(hb)) if hb.dim() == 0 => Ok(0),
        (None, Some(_)) => Err(Error::Containment),
        (Some(gb), Some(hb)) => {
            if !gb.contains_span(&hb) {
                return Err(Error::Containment);
            }
            Ok(gb.dim() - hb.dim())
        }
    }
}

impl LieBasis {
    /// Rebuilds the span of the stored elements (used to check idempotence).
    pub fn respan(&self) -> LieBasis {
        Self::span_of(&self.coords, &self.elements)
    }
}
