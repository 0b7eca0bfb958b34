//! Truncated multivariate power series over ℚ and jets of formal
//! diffeomorphisms.
//!
//! A [`TruncatedSeries`] lives in `Ô_n / m̂^{k+1}`: every operation silently
//! drops terms of degree above the cutoff `k`. A [`DiffeoJet`] is an
//! `n`-tuple of such series without constant terms and with invertible linear
//! part; composition follows `(φ∘ψ)(z) = φ(ψ(z))`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::RatMatrix;
use crate::Rational;

/// Exponent vector of a monomial `z₁^{i₁}⋯z_n^{i_n}`.
///
/// Ordered graded-lexicographically: lower total degree first, and within a
/// degree `x² < xy < y²` (larger leading exponents come first).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiIndex {
    exponents: Vec<u32>,
    degree: u32,
}

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        assert!(
            !exponents.is_empty(),
            "monomials need at least one variable"
        );
        let degree = exponents.iter().sum();
        MultiIndex { exponents, degree }
    }

    pub fn zero(nvars: usize) -> Self {
        Self::new(vec![0; nvars])
    }

    pub fn unit(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::new(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn nvars(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_constant(&self) -> bool {
        self.degree == 0
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.nvars(), other.nvars());
        MultiIndex {
            exponents: self
                .exponents
                .iter()
                .zip(&other.exponents)
                .map(|(a, b)| a + b)
                .collect(),
            degree: self.degree + other.degree,
        }
    }

    /// Lowers exponent `i` by one.
    pub fn decrement(&self, i: usize) -> Option<Self> {
        if self.exponents[i] == 0 {
            return None;
        }
        let mut e = self.exponents.clone();
        e[i] -= 1;
        Some(MultiIndex {
            exponents: e,
            degree: self.degree - 1,
        })
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.exponents
            .iter()
            .zip(&other.exponents)
            .all(|(a, b)| a <= b)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| other.exponents.cmp(&self.exponents))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Graded-lex list of all monomials in `n` variables with degree in a range,
/// plus the reverse lookup.
#[derive(Clone, Debug)]
pub struct MonomialBasis {
    nvars: usize,
    monomials: Vec<MultiIndex>,
    index: HashMap<MultiIndex, usize>,
}

impl MonomialBasis {
    pub fn new(nvars: usize, min_degree: u32, max_degree: u32) -> Self {
        let mut monomials = Vec::new();
        for d in min_degree..=max_degree {
            let mut buf = vec![0; nvars];
            push_degree(&mut monomials, &mut buf, 0, d);
        }
        let index = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        MonomialBasis {
            nvars,
            monomials,
            index,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[MultiIndex] {
        &self.monomials
    }

    pub fn get(&self, i: usize) -> &MultiIndex {
        &self.monomials[i]
    }

    pub fn index_of(&self, m: &MultiIndex) -> Option<usize> {
        self.index.get(m).copied()
    }
}

fn push_degree(out: &mut Vec<MultiIndex>, buf: &mut Vec<u32>, pos: usize, remaining: u32) {
    if pos + 1 == buf.len() {
        buf[pos] = remaining;
        out.push(MultiIndex::new(buf.clone()));
        return;
    }
    for e in (0..=remaining).rev() {
        buf[pos] = e;
        push_degree(out, buf, pos + 1, remaining - e);
    }
    buf[pos] = 0;
}

/// Number of monomials of degree at most `k` in `n` variables, `C(n+k, k)`.
pub fn monomial_count(nvars: usize, k: u32) -> usize {
    let mut c: u128 = 1;
    for i in 1..=nvars as u128 {
        c = c * (k as u128 + i) / i;
    }
    c as usize
}

/// Element of `Ô_n / m̂^{k+1}` with exact rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TruncatedSeries {
    nvars: usize,
    cutoff: u32,
    terms: BTreeMap<MultiIndex, Rational>,
}

impl TruncatedSeries {
    pub fn zero(nvars: usize, cutoff: u32) -> Self {
        assert!(nvars >= 1, "series need at least one variable");
        TruncatedSeries {
            nvars,
            cutoff,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, cutoff: u32, c: Rational) -> Self {
        Self::monomial(nvars, cutoff, MultiIndex::zero(nvars), c)
    }

    pub fn one(nvars: usize, cutoff: u32) -> Self {
        Self::constant(nvars, cutoff, Rational::one())
    }

    /// The coordinate function `z_i` (0-based).
    pub fn variable(nvars: usize, cutoff: u32, i: usize) -> Self {
        Self::monomial(nvars, cutoff, MultiIndex::unit(nvars, i), Rational::one())
    }

    pub fn monomial(nvars: usize, cutoff: u32, m: MultiIndex, c: Rational) -> Self {
        Self::from_terms(nvars, cutoff, [(m, c)])
    }

    /// Sums the given terms, dropping zeros and anything above the cutoff.
    pub fn from_terms<I>(nvars: usize, cutoff: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, Rational)>,
    {
        let mut s = Self::zero(nvars, cutoff);
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars, "monomial has the wrong variable count");
            s.add_term(m, c);
        }
        s
    }

    /// Convenience constructor from integer exponent/numerator/denominator triples.
    pub fn from_i64_terms(nvars: usize, cutoff: u32, terms: &[(&[u32], i64, i64)]) -> Self {
        Self::from_terms(
            nvars,
            cutoff,
            terms.iter().map(|(e, n, d)| {
                (
                    MultiIndex::new(e.to_vec()),
                    Rational::new((*n).into(), (*d).into()),
                )
            }),
        )
    }

    pub(crate) fn add_term(&mut self, m: MultiIndex, c: Rational) {
        if m.degree() > self.cutoff || c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&MultiIndex, &Rational)> + '_ {
        self.terms.iter()
    }

    /// Number of nonzero terms.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &MultiIndex) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&MultiIndex::zero(self.nvars))
    }

    /// Lowest degree of a stored term; `None` for the zero series.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().next().map(MultiIndex::degree)
    }

    /// Highest degree of a stored term; `None` for the zero series.
    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::degree).max()
    }

    pub fn is_unit(&self) -> bool {
        !self.constant_term().is_zero()
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars || self.cutoff != other.cutoff {
            return Err(Error::DimensionMismatch(format!(
                "series in {} variables at cutoff {} vs {} variables at cutoff {}",
                self.nvars, self.cutoff, other.nvars, other.cutoff
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.nvars, self.cutoff);
        for (a, ca) in &self.terms {
            let room = self.cutoff - a.degree();
            for (b, cb) in &other.terms {
                if b.degree() > room {
                    break;
                }
                out.add_term(a.add(b), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars, self.cutoff);
        }
        TruncatedSeries {
            nvars: self.nvars,
            cutoff: self.cutoff,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// Multiplies by the monomial `z^α`, dropping terms past the cutoff.
    pub fn shift(&self, alpha: &MultiIndex) -> Self {
        Self::from_terms(
            self.nvars,
            self.cutoff,
            self.terms.iter().map(|(m, c)| (m.add(alpha), c.clone())),
        )
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.nvars, self.cutoff);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Multiplicative inverse of a unit, expanded to the cutoff.
    pub fn inverse(&self) -> Option<Self> {
        let c = self.constant_term();
        if c.is_zero() {
            return None;
        }
        let cinv = c.recip();
        // 1/f = c⁻¹ Σ g^m with g = 1 − f/c ∈ m̂
        let g = &Self::one(self.nvars, self.cutoff) - &self.scale(&cinv);
        let mut acc = Self::one(self.nvars, self.cutoff);
        let mut power = Self::one(self.nvars, self.cutoff);
        for _ in 0..self.cutoff {
            power = &power * &g;
            if power.is_zero() {
                break;
            }
            acc = &acc + &power;
        }
        Some(acc.scale(&cinv))
    }

    /// ∂f/∂z_i.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars, self.cutoff);
        for (m, c) in &self.terms {
            let e = m.exponents()[i];
            if let Some(lower) = m.decrement(i) {
                out.add_term(lower, c * Rational::from_integer(e.into()));
            }
        }
        out
    }

    /// Homogeneous component of degree `d`.
    pub fn homogeneous(&self, d: u32) -> Self {
        TruncatedSeries {
            nvars: self.nvars,
            cutoff: self.cutoff,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Projection to level `l ≤ cutoff`.
    pub fn truncate(&self, l: u32) -> Result<Self> {
        if l > self.cutoff {
            return Err(Error::Level {
                requested: l,
                cutoff: self.cutoff,
            });
        }
        Ok(self.recut(l))
    }

    /// Re-labels the cutoff. Lowering it truncates; raising it is exact only
    /// when the series is known to be a polynomial (e.g. ideal generators).
    pub fn recut(&self, cutoff: u32) -> Self {
        TruncatedSeries {
            nvars: self.nvars,
            cutoff,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= cutoff)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// `f ∘ φ`, truncated at the shared cutoff.
    pub fn substitute(&self, phi: &DiffeoJet) -> Result<Self> {
        if phi.nvars() != self.nvars || phi.cutoff() != self.cutoff {
            return Err(Error::DimensionMismatch(format!(
                "cannot substitute a jet in {} variables at cutoff {} into a series in {} variables at cutoff {}",
                phi.nvars(),
                phi.cutoff(),
                self.nvars,
                self.cutoff
            )));
        }
        Ok(Substitution::new(phi.components()).apply(self))
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;

    /// Panics on mismatched shapes; use [`TruncatedSeries::try_add`] to get an error.
    fn add(self, rhs: Self) -> TruncatedSeries {
        self.try_add(rhs).expect("series shape mismatch")
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn sub(self, rhs: Self) -> TruncatedSeries {
        self.try_sub(rhs).expect("series shape mismatch")
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn mul(self, rhs: Self) -> TruncatedSeries {
        self.try_mul(rhs).expect("series shape mismatch")
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn neg(self) -> TruncatedSeries {
        self.scale(&-Rational::one())
    }
}

/// Memoized evaluation of `f ↦ f(g₁, …, g_n)` for fixed images `gᵢ ∈ m̂`.
///
/// Images of monomials are built once and reused, so applying the same
/// substitution to many series costs one linear combination each.
pub(crate) struct Substitution<'a> {
    images: &'a [TruncatedSeries],
    memo: HashMap<MultiIndex, TruncatedSeries>,
}

impl<'a> Substitution<'a> {
    pub(crate) fn new(images: &'a [TruncatedSeries]) -> Self {
        Substitution {
            images,
            memo: HashMap::new(),
        }
    }

    fn nvars(&self) -> usize {
        self.images[0].nvars
    }

    fn cutoff(&self) -> u32 {
        self.images[0].cutoff
    }

    pub(crate) fn monomial_image(&mut self, alpha: &MultiIndex) -> &TruncatedSeries {
        if !self.memo.contains_key(alpha) {
            // walk down to a cached ancestor, then build back up
            let mut chain = Vec::new();
            let mut cur = alpha.clone();
            while !self.memo.contains_key(&cur) {
                if cur.is_constant() {
                    let one = TruncatedSeries::one(self.nvars(), self.cutoff());
                    self.memo.insert(cur.clone(), one);
                    break;
                }
                let i = cur.exponents().iter().position(|&e| e > 0).unwrap();
                let lower = cur.decrement(i).unwrap();
                chain.push((cur, i));
                cur = lower;
            }
            while let Some((m, i)) = chain.pop() {
                let lower = m.decrement(i).unwrap();
                let img = &self.memo[&lower] * &self.images[i];
                self.memo.insert(m, img);
            }
        }
        &self.memo[alpha]
    }

    pub(crate) fn apply(&mut self, f: &TruncatedSeries) -> TruncatedSeries {
        let mut out = TruncatedSeries::zero(self.nvars(), self.cutoff());
        for (m, c) in &f.terms {
            let img = self.monomial_image(m);
            for (mm, cc) in &img.terms {
                out.add_term(mm.clone(), c * cc);
            }
        }
        out
    }
}

/// `D₀φ`: the n×n matrix whose entry `(i, j)` is the coefficient of `z_j`
/// in the i-th component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearPart {
    matrix: RatMatrix,
}

impl LinearPart {
    pub fn new(matrix: RatMatrix) -> Self {
        assert!(matrix.is_square());
        LinearPart { matrix }
    }

    pub fn of_components(components: &[TruncatedSeries]) -> Self {
        let n = components.len();
        let mut m = RatMatrix::zeros(n, n);
        for (i, c) in components.iter().enumerate() {
            for j in 0..n {
                m.set(i, j, c.coeff(&MultiIndex::unit(n, j)));
            }
        }
        LinearPart { matrix: m }
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    pub fn determinant(&self) -> Rational {
        self.matrix.determinant()
    }

    pub fn is_invertible(&self) -> bool {
        !self.determinant().is_zero()
    }
}

/// Jet of a formal diffeomorphism: an element of the group `D_k`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DiffeoJet {
    components: Vec<TruncatedSeries>,
}

impl DiffeoJet {
    pub fn new(components: Vec<TruncatedSeries>) -> Result<Self> {
        let n = components.len();
        if n == 0 {
            return Err(Error::NotDiffeomorphism("no components".into()));
        }
        let cutoff = components[0].cutoff;
        if cutoff == 0 {
            return Err(Error::NotDiffeomorphism(
                "jets need cutoff at least 1".into(),
            ));
        }
        for (i, c) in components.iter().enumerate() {
            if c.nvars != n || c.cutoff != cutoff {
                return Err(Error::DimensionMismatch(format!(
                    "component {} has {} variables at cutoff {}, expected {} at cutoff {}",
                    i + 1,
                    c.nvars,
                    c.cutoff,
                    n,
                    cutoff
                )));
            }
            if !c.constant_term().is_zero() {
                return Err(Error::NotDiffeomorphism(format!(
                    "component {} has nonzero constant term",
                    i + 1
                )));
            }
        }
        if !LinearPart::of_components(&components).is_invertible() {
            return Err(Error::NotDiffeomorphism("singular linear part".into()));
        }
        Ok(DiffeoJet { components })
    }

    pub fn identity(nvars: usize, cutoff: u32) -> Self {
        DiffeoJet {
            components: (0..nvars)
                .map(|i| TruncatedSeries::variable(nvars, cutoff, i))
                .collect(),
        }
    }

    /// The linear map `z ↦ A z`.
    pub fn linear(matrix: &RatMatrix, cutoff: u32) -> Result<Self> {
        let n = matrix.rows();
        Self::new(linear_images(matrix, n, cutoff))
    }

    pub fn nvars(&self) -> usize {
        self.components.len()
    }

    pub fn cutoff(&self) -> u32 {
        self.components[0].cutoff
    }

    pub fn components(&self) -> &[TruncatedSeries] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &TruncatedSeries {
        &self.components[i]
    }

    pub fn linear_part(&self) -> LinearPart {
        LinearPart::of_components(&self.components)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.nvars(), self.cutoff())
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.nvars() != other.nvars() || self.cutoff() != other.cutoff() {
            return Err(Error::DimensionMismatch(format!(
                "jets in {} variables at cutoff {} vs {} variables at cutoff {}",
                self.nvars(),
                self.cutoff(),
                other.nvars(),
                other.cutoff()
            )));
        }
        Ok(())
    }

    /// `self ∘ other`, i.e. `z ↦ self(other(z))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut sub = Substitution::new(&other.components);
        Ok(DiffeoJet {
            components: self.components.iter().map(|c| sub.apply(c)).collect(),
        })
    }

    /// Group inverse, solved degree by degree after inverting the linear part.
    pub fn inverse(&self) -> Self {
        let n = self.nvars();
        let k = self.cutoff();
        let ainv = self
            .linear_part()
            .matrix
            .inverse()
            .expect("DiffeoJet invariant: invertible linear part");
        let mut psi = linear_images(&ainv, n, k);
        for d in 2..=k {
            let residual: Vec<TruncatedSeries> = {
                let mut sub = Substitution::new(&psi);
                self.components
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        (&sub.apply(c) - &TruncatedSeries::variable(n, k, i)).homogeneous(d)
                    })
                    .collect()
            };
            if residual.iter().all(TruncatedSeries::is_zero) {
                continue;
            }
            for (i, p) in psi.iter_mut().enumerate() {
                for (j, r) in residual.iter().enumerate() {
                    let a = ainv.get(i, j);
                    if !a.is_zero() {
                        *p = &*p - &r.scale(a);
                    }
                }
            }
        }
        DiffeoJet { components: psi }
    }

    /// `π_{k,l}`: drops every term of degree above `l`.
    pub fn project(&self, l: u32) -> Result<Self> {
        if l > self.cutoff() {
            return Err(Error::Level {
                requested: l,
                cutoff: self.cutoff(),
            });
        }
        if l == 0 {
            return Err(Error::NotDiffeomorphism(
                "jets need cutoff at least 1".into(),
            ));
        }
        Ok(DiffeoJet {
            components: self.components.iter().map(|c| c.recut(l)).collect(),
        })
    }

    /// Integer power by repeated composition (negative powers use the inverse).
    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut acc = Self::identity(self.nvars(), self.cutoff());
        for _ in 0..e.unsigned_abs() {
            acc = acc.compose(&base).expect("same shape");
        }
        acc
    }

    /// Group commutator `[f, g] = f∘g∘f⁻¹∘g⁻¹`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        self.compose(other)?
            .compose(&self.inverse())?
            .compose(&other.inverse())
    }
}

fn linear_images(matrix: &RatMatrix, n: usize, cutoff: u32) -> Vec<TruncatedSeries> {
    (0..n)
        .map(|i| {
            TruncatedSeries::from_terms(
                n,
                cutoff,
                (0..n).map(|j| (MultiIndex::unit(n, j), matrix.get(i, j).clone())),
            )
        })
        .collect()
}
