//! Vector-field jets, the exp/log correspondence and pullback matrices.
//!
//! A [`VectorFieldJet`] `X = Σ Xᵢ ∂/∂zᵢ` acts on truncated series as a
//! derivation. For nilpotent `X` the exponential `exp(X)` is the unipotent
//! jet whose i-th component is `Σ_m X^m(zᵢ)/m!`; the logarithm inverts it
//! through the operator series `Σ (−1)^{m+1} (Φ − Id)^m / m` where
//! `Φ(f) = f∘φ`. Both series are finite at a fixed cutoff.
//!
//! [`JetMatrix`] is the matrix of the pullback `f ↦ f∘φ` on the graded-lex
//! monomial basis of `m̂/m̂^{k+1}` (columns are images). Since pullback is
//! contravariant, `matrix_of(φ∘ψ) = matrix_of(ψ)·matrix_of(φ)`.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::RatMatrix;
use crate::parse::{variable_name, Parser, Tok};
use crate::series::{
    monomial_count, DiffeoJet, MonomialBasis, MultiIndex, Substitution, TruncatedSeries,
};
use crate::Rational;

/// Jet of a formal vector field vanishing at the origin: an element of `L_k`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct VectorFieldJet {
    components: Vec<TruncatedSeries>,
}

/// Whether a linear operator is nilpotent (or a map unipotent), with the
/// least vanishing exponent as witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NilpotencyCertificate {
    pub holds: bool,
    /// Least `p` with `N^p = 0`, where `N` is the tested nilpotent candidate.
    pub witness: Option<usize>,
}

impl NilpotencyCertificate {
    pub(crate) fn of_matrix(n: &RatMatrix) -> Self {
        let witness = n.nilpotency_index();
        NilpotencyCertificate {
            holds: witness.is_some(),
            witness,
        }
    }
}

impl VectorFieldJet {
    pub fn new(components: Vec<TruncatedSeries>) -> Result<Self> {
        let n = components.len();
        if n == 0 {
            return Err(Error::DimensionMismatch(
                "vector field with no components".into(),
            ));
        }
        let cutoff = components[0].cutoff();
        for (i, c) in components.iter().enumerate() {
            if c.nvars() != n || c.cutoff() != cutoff {
                return Err(Error::DimensionMismatch(format!(
                    "coefficient {} has {} variables at cutoff {}, expected {} at cutoff {}",
                    i + 1,
                    c.nvars(),
                    c.cutoff(),
                    n,
                    cutoff
                )));
            }
            if !c.constant_term().is_zero() {
                return Err(Error::DimensionMismatch(format!(
                    "coefficient {} does not vanish at the origin",
                    i + 1
                )));
            }
        }
        Ok(VectorFieldJet { components })
    }

    pub fn zero(nvars: usize, cutoff: u32) -> Self {
        VectorFieldJet {
            components: vec![TruncatedSeries::zero(nvars, cutoff); nvars],
        }
    }

    /// `f · ∂/∂z_i`.
    pub fn along(i: usize, f: TruncatedSeries) -> Result<Self> {
        let mut comps = vec![TruncatedSeries::zero(f.nvars(), f.cutoff()); f.nvars()];
        comps[i] = f;
        Self::new(comps)
    }

    pub fn nvars(&self) -> usize {
        self.components.len()
    }

    pub fn cutoff(&self) -> u32 {
        self.components[0].cutoff()
    }

    pub fn components(&self) -> &[TruncatedSeries] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &TruncatedSeries {
        &self.components[i]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(TruncatedSeries::is_zero)
    }

    /// Lowest order among the coefficients; `None` for the zero field.
    pub fn order(&self) -> Option<u32> {
        self.components
            .iter()
            .filter_map(TruncatedSeries::order)
            .min()
    }

    /// `D₀X`: entry `(i, j)` is the coefficient of `z_j` in `Xᵢ`.
    pub fn linear_part(&self) -> RatMatrix {
        let n = self.nvars();
        let mut m = RatMatrix::zeros(n, n);
        for (i, c) in self.components.iter().enumerate() {
            for j in 0..n {
                m.set(i, j, c.coeff(&MultiIndex::unit(n, j)));
            }
        }
        m
    }

    pub fn nilpotency(&self) -> NilpotencyCertificate {
        NilpotencyCertificate::of_matrix(&self.linear_part())
    }

    fn check_compatible(&self, n: usize, k: u32) -> Result<()> {
        if self.nvars() != n || self.cutoff() != k {
            return Err(Error::DimensionMismatch(format!(
                "vector field in {} variables at cutoff {} vs {} variables at cutoff {}",
                self.nvars(),
                self.cutoff(),
                n,
                k
            )));
        }
        Ok(())
    }

    /// `X(f) = Σ Xᵢ ∂f/∂zᵢ`.
    pub fn apply(&self, f: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check_compatible(f.nvars(), f.cutoff())?;
        Ok(self.apply_unchecked(f))
    }

    fn apply_unchecked(&self, f: &TruncatedSeries) -> TruncatedSeries {
        let mut acc = TruncatedSeries::zero(f.nvars(), f.cutoff());
        for (i, xi) in self.components.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            let d = f.derivative(i);
            if !d.is_zero() {
                acc = &acc + &(xi * &d);
            }
        }
        acc
    }

    /// Lie bracket; component i is `X(Yᵢ) − Y(Xᵢ)`.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        other.check_compatible(self.nvars(), self.cutoff())?;
        Ok(VectorFieldJet {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(xi, yi)| &self.apply_unchecked(yi) - &other.apply_unchecked(xi))
                .collect(),
        })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        VectorFieldJet {
            components: self.components.iter().map(|s| s.scale(c)).collect(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        other.check_compatible(self.nvars(), self.cutoff())?;
        Ok(VectorFieldJet {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scale(&-Rational::one()))
    }

    pub fn project(&self, l: u32) -> Result<Self> {
        if l > self.cutoff() {
            return Err(Error::Level {
                requested: l,
                cutoff: self.cutoff(),
            });
        }
        Ok(VectorFieldJet {
            components: self.components.iter().map(|c| c.recut(l)).collect(),
        })
    }

    /// Time-one flow of a nilpotent field.
    pub fn exp(&self) -> Result<DiffeoJet> {
        if !self.nilpotency().holds {
            return Err(Error::NotNilpotent(
                "linear part of the vector field is not nilpotent".into(),
            ));
        }
        let n = self.nvars();
        let k = self.cutoff();
        // X acts nilpotently on m̂/m̂^{k+1}, so X^D vanishes for D its dimension
        let bound = monomial_count(n, k);
        let mut comps = Vec::with_capacity(n);
        for i in 0..n {
            let mut term = TruncatedSeries::variable(n, k, i);
            let mut acc = term.clone();
            for m in 1..=bound {
                term = self
                    .apply_unchecked(&term)
                    .scale(&Rational::new(1.into(), (m as i64).into()));
                if term.is_zero() {
                    break;
                }
                acc = &acc + &term;
            }
            debug_assert!(term.is_zero());
            comps.push(acc);
        }
        DiffeoJet::new(comps)
    }

    /// Parses `(a1)*d/dx + (a2)*d/dy …`; `0` is the zero field.
    pub fn parse(text: &str, nvars: usize, cutoff: u32) -> Result<Self> {
        let mut p = Parser::new(text, nvars, cutoff)?;
        let mut comps = vec![TruncatedSeries::zero(nvars, cutoff); nvars];
        if p.peek() == Some(&Tok::Num(0.into())) && p.peek_at(1).is_none() {
            return Ok(VectorFieldJet { components: comps });
        }
        let mut first = true;
        while !p.at_end() {
            let negative = match p.peek() {
                Some(Tok::Plus) => {
                    p.bump();
                    false
                }
                Some(Tok::Minus) => {
                    p.bump();
                    true
                }
                _ if first => false,
                _ => {
                    return Err(crate::error::Error::parse(
                        p.offset(),
                        "expected '+' or '-'",
                    ))
                }
            };
            first = false;
            let at = p.offset();
            let coeff = p.expr()?;
            p.expect(Tok::Star, "'*d/dv'")?;
            let i = p.derivation()?;
            if !coeff.constant_term().is_zero() {
                return Err(Error::parse(
                    at,
                    "vector field coefficients must vanish at 0",
                ));
            }
            comps[i] = if negative {
                &comps[i] - &coeff
            } else {
                &comps[i] + &coeff
            };
        }
        debug_assert_eq!((p.nvars(), p.cutoff()), (nvars, cutoff));
        Self::new(comps)
    }
}

impl fmt::Display for VectorFieldJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.nvars();
        let mut first = true;
        for (i, c) in self.components.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({c})*d/d{}", variable_name(n, i))?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// `(D₀φ − Id)` nilpotency test.
pub fn unipotency(phi: &DiffeoJet) -> NilpotencyCertificate {
    let a = phi.linear_part().matrix().clone();
    let n = a.rows();
    NilpotencyCertificate::of_matrix(&a.sub(&RatMatrix::identity(n)))
}

pub fn exp_vf(x: &VectorFieldJet) -> Result<DiffeoJet> {
    x.exp()
}

/// Infinitesimal generator of a unipotent jet.
pub fn log_map(phi: &DiffeoJet) -> Result<VectorFieldJet> {
    if !unipotency(phi).holds {
        return Err(Error::NotUnipotent("linear part is not unipotent".into()));
    }
    let n = phi.nvars();
    let k = phi.cutoff();
    let bound = monomial_count(n, k);
    let mut sub = Substitution::new(phi.components());
    let mut comps = Vec::with_capacity(n);
    for i in 0..n {
        let mut term = TruncatedSeries::variable(n, k, i);
        let mut acc = TruncatedSeries::zero(n, k);
        for m in 1..=bound {
            term = &sub.apply(&term) - &term;
            if term.is_zero() {
                break;
            }
            let sign = if m % 2 == 1 { 1 } else { -1 };
            acc = &acc + &term.scale(&Rational::new(sign.into(), (m as i64).into()));
        }
        comps.push(acc);
    }
    VectorFieldJet::new(comps)
}

/// `φ^t = exp(t log φ)` for rational `t`.
pub fn power_t(phi: &DiffeoJet, t: &Rational) -> Result<DiffeoJet> {
    log_map(phi)?.scale(t).exp()
}

/// Matrix of the pullback `f ↦ f∘φ` on `m̂/m̂^{k+1}`.
#[derive(Clone, Debug)]
pub struct JetMatrix {
    nvars: usize,
    cutoff: u32,
    basis: MonomialBasis,
    matrix: RatMatrix,
}

impl PartialEq for JetMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.nvars == other.nvars && self.cutoff == other.cutoff && self.matrix == other.matrix
    }
}

impl JetMatrix {
    /// Wraps a matrix on the monomial basis of degrees `1..=cutoff`.
    pub fn new(nvars: usize, cutoff: u32, matrix: RatMatrix) -> Result<Self> {
        let basis = MonomialBasis::new(nvars, 1, cutoff);
        if !matrix.is_square() || matrix.rows() != basis.len() {
            return Err(Error::DimensionMismatch(format!(
                "expected a {0}×{0} matrix for {nvars} variables at cutoff {cutoff}",
                basis.len()
            )));
        }
        Ok(JetMatrix {
            nvars,
            cutoff,
            basis,
            matrix,
        })
    }

    /// Size of the pullback matrix, `C(n+k, k) − 1`.
    pub fn dimension_for(nvars: usize, cutoff: u32) -> usize {
        monomial_count(nvars, cutoff) - 1
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn basis(&self) -> &MonomialBasis {
        &self.basis
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> RatMatrix {
        self.matrix
    }
}

pub fn matrix_of(phi: &DiffeoJet) -> JetMatrix {
    let n = phi.nvars();
    let k = phi.cutoff();
    let basis = MonomialBasis::new(n, 1, k);
    let mut m = RatMatrix::zeros(basis.len(), basis.len());
    let mut sub = Substitution::new(phi.components());
    for (col, mono) in basis.monomials().iter().enumerate() {
        for (mm, c) in sub.monomial_image(mono).terms() {
            let row = basis.index_of(mm).expect("image lies in m̂");
            m.set(row, col, c.clone());
        }
    }
    JetMatrix {
        nvars: n,
        cutoff: k,
        basis,
        matrix: m,
    }
}

/// Reads the coordinate images back out of a pullback matrix, checking
/// that the matrix really is the pullback of the resulting jet.
pub fn matrix_to_map(m: &JetMatrix) -> Result<DiffeoJet> {
    let n = m.nvars;
    let k = m.cutoff;
    let comps = (0..n)
        .map(|i| {
            let col = m.basis.index_of(&MultiIndex::unit(n, i)).unwrap();
            TruncatedSeries::from_terms(
                n,
                k,
                m.basis
                    .monomials()
                    .iter()
                    .enumerate()
                    .map(|(row, mono)| (mono.clone(), m.matrix.get(row, col).clone())),
            )
        })
        .collect();
    let phi = DiffeoJet::new(comps).map_err(|e| Error::NotAJet(e.to_string()))?;
    if matrix_of(&phi).matrix != m.matrix {
        return Err(Error::NotAJet(
            "columns of products disagree with products of coordinate columns".into(),
        ));
    }
    Ok(phi)
}
