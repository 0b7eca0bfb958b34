//! Multiplicative Jordan–Chevalley decomposition `φ = φ_s∘φ_u` of jets.
//!
//! The additive decomposition `M = S + N` of the pullback matrix is found
//! without factoring: with `p` the squarefree part of the characteristic
//! polynomial, the Newton iteration `S ← S − p(S)·p′(S)⁻¹` starting at `M`
//! converges to the semisimple part in finitely many steps. `S` is then a
//! polynomial in `M`, so it stays rational and (the jet group being
//! algebraic) is again the pullback matrix of a jet.

use crate::error::{Error, Result};
use crate::jet::{matrix_of, matrix_to_map, unipotency, JetMatrix, NilpotencyCertificate};
use crate::linalg::RatMatrix;
use crate::series::DiffeoJet;

/// Commuting factors `φ = φ_s∘φ_u = φ_u∘φ_s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JordanPair {
    pub semisimple: DiffeoJet,
    pub unipotent: DiffeoJet,
}

/// Splits a square matrix as `M = S + N` with `S` semisimple, `N` nilpotent
/// and `SN = NS`.
pub fn additive_jordan(m: &RatMatrix) -> (RatMatrix, RatMatrix) {
    assert!(
        m.is_square(),
        "additive Jordan decomposition needs a square matrix"
    );
    let dim = m.rows();
    let chi = m.charpoly();
    let p = chi.squarefree_part();
    if p.degree() == chi.degree() {
        return (m.clone(), RatMatrix::zeros(dim, dim));
    }
    let dp = p.derivative();
    let mut s = m.clone();
    // quadratic convergence: the error lies in N^(2^i)
    let steps = usize::BITS - dim.leading_zeros() + 1;
    for _ in 0..=steps {
        let ps = s.eval_poly(&p);
        if ps.is_zero() {
            break;
        }
        let correction = s
            .eval_poly(&dp)
            .inverse()
            .expect("p'(S) is invertible for squarefree p");
        s = s.sub(&ps.mul(&correction));
    }
    debug_assert!(s.eval_poly(&p).is_zero());
    let n = m.sub(&s);
    (s, n)
}

pub fn multiplicative_jordan(phi: &DiffeoJet) -> Result<JordanPair> {
    let m = matrix_of(phi);
    let (n, k) = (m.nvars(), m.cutoff());
    let (s, _) = additive_jordan(m.matrix());
    let u = s
        .inverse()
        .expect("semisimple part of an invertible matrix is invertible")
        .mul(m.matrix());
    let semisimple = matrix_to_map(&JetMatrix::new(n, k, s)?)
        .map_err(|e| Error::NotAJet(format!("semisimple factor: {e}")))?;
    let unipotent = matrix_to_map(&JetMatrix::new(n, k, u)?)
        .map_err(|e| Error::NotAJet(format!("unipotent factor: {e}")))?;
    Ok(JordanPair {
        semisimple,
        unipotent,
    })
}

/// Unipotence of the linear part, with the nilpotency witness of `D₀φ − Id`.
pub fn is_unipotent(phi: &DiffeoJet) -> NilpotencyCertificate {
    unipotency(phi)
}

/// Whether the pullback matrix at the jet's own cutoff has squarefree
/// minimal polynomial.
pub fn is_semisimple_at(phi: &DiffeoJet) -> bool {
    is_semisimple_matrix(matrix_of(phi).matrix())
}

pub fn is_semisimple_matrix(m: &RatMatrix) -> bool {
    let p = m.charpoly().squarefree_part();
    m.eval_poly(&p).is_zero()
}

/// Whether `M − Id` is nilpotent.
pub fn is_unipotent_matrix(m: &RatMatrix) -> bool {
    m.sub(&RatMatrix::identity(m.rows()))
        .nilpotency_index()
        .is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_map;

    #[test]
    fn additive_examples() {
        let d = RatMatrix::from_i64_rows(&[&[2, 0], &[0, 5]]);
        let (s, n) = additive_jordan(&d);
        assert_eq!(s, d);
        assert!(n.is_zero());

        let j = RatMatrix::from_i64_rows(&[&[1, 1], &[0, 1]]);
        let (s, n) = additive_jordan(&j);
        assert!(s.is_identity());
        assert_eq!(n, RatMatrix::from_i64_rows(&[&[0, 1], &[0, 0]]));

        let m = RatMatrix::from_i64_rows(&[&[2, 0], &[1, 4]]);
        let (s, n) = additive_jordan(&m);
        assert_eq!(s, m);
        assert!(n.is_zero());
    }

    #[test]
    fn additive_mixed_blocks() {
        // block diag(J_2(3), 5) conjugated by an integer unimodular matrix
        let j = RatMatrix::from_i64_rows(&[&[3, 1, 0], &[0, 3, 0], &[0, 0, 5]]);
        let p = RatMatrix::from_i64_rows(&[&[1, 2, 0], &[0, 1, 1], &[1, 0, 1]]);
        let m = p.mul(&j).mul(&p.inverse().unwrap());
        let (s, n) = additive_jordan(&m);
        assert_eq!(s.add(&n), m);
        assert_eq!(s.mul(&n), n.mul(&s));
        assert_eq!(n.nilpotency_index(), Some(2));
        assert!(is_semisimple_matrix(&s));
        let expected_s = p
            .mul(&RatMatrix::from_i64_rows(&[
                &[3, 0, 0],
                &[0, 3, 0],
                &[0, 0, 5],
            ]))
            .mul(&p.inverse().unwrap());
        assert_eq!(s, expected_s);
    }

    #[test]
    fn multiplicative_examples() {
        let phi = parse_map("(x + x^2)", 4).unwrap();
        let pair = multiplicative_jordan(&phi).unwrap();
        assert!(pair.semisimple.is_identity());
        assert_eq!(pair.unipotent, phi);

        let lin = parse_map("(2*x, 3*y)", 4).unwrap();
        let pair = multiplicative_jordan(&lin).unwrap();
        assert_eq!(pair.semisimple, lin);
        assert!(pair.unipotent.is_identity());

        let nr = parse_map("(2*x + x^2)", 3).unwrap();
        let pair = multiplicative_jordan(&nr).unwrap();
        assert_eq!(pair.semisimple, nr);
        assert!(pair.unipotent.is_identity());
    }

    #[test]
    fn resonant_jet_splits() {
        // λ = (2, 4) with the resonant term x² in the second component
        let phi = parse_map("(2*x, 4*y + x^2)", 3).unwrap();
        let pair = multiplicative_jordan(&phi).unwrap();
        assert_eq!(pair.semisimple, parse_map("(2*x, 4*y)", 3).unwrap());
        assert_eq!(pair.unipotent, parse_map("(x, y + 1/4*x^2)", 3).unwrap());
        let a = pair.semisimple.compose(&pair.unipotent).unwrap();
        let b = pair.unipotent.compose(&pair.semisimple).unwrap();
        assert_eq!(a, phi);
        assert_eq!(b, phi);
    }

    #[test]
    fn predicates() {
        assert!(is_unipotent(&parse_map("(x, y + x^2)", 3).unwrap()).holds);
        assert!(!is_unipotent(&parse_map("(2*x)", 3).unwrap()).holds);
        assert!(is_semisimple_at(&parse_map("(2*x, 3*y)", 3).unwrap()));
        assert!(!is_semisimple_at(&parse_map("(x, y + x^2)", 2).unwrap()));
        assert!(is_semisimple_at(&DiffeoJet::identity(2, 3)));
    }
}
