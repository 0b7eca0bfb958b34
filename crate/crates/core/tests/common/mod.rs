//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use jetgroup_core::series::MonomialBasis;
use jetgroup_core::{DiffeoJet, MultiIndex, Rational, TruncatedSeries, VectorFieldJet};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Numerator in −3..=3, denominator in 1..=4.
pub fn small_rational(rng: &mut impl Rng) -> Rational {
    q(rng.gen_range(-3..=3), rng.gen_range(1..=4))
}

pub fn nonzero_rational(rng: &mut impl Rng) -> Rational {
    loop {
        let c = small_rational(rng);
        if c != q(0, 1) {
            return c;
        }
    }
}

/// Random terms of degree `lo..=k`, each monomial present with probability `density`.
pub fn random_series(
    rng: &mut impl Rng,
    n: usize,
    k: u32,
    lo: u32,
    density: f64,
) -> TruncatedSeries {
    let mut terms = Vec::new();
    for m in MonomialBasis::new(n, lo, k).monomials() {
        if rng.gen_bool(density) {
            terms.push((m.clone(), small_rational(rng)));
        }
    }
    TruncatedSeries::from_terms(n, k, terms)
}

fn linear_term(n: usize, k: u32, j: usize, c: Rational) -> TruncatedSeries {
    TruncatedSeries::monomial(n, k, MultiIndex::unit(n, j), c)
}

/// Upper-triangular linear part with the given diagonal, plus random
/// nonlinear terms.
pub fn triangular_jet(rng: &mut impl Rng, diag: &[Rational], k: u32, density: f64) -> DiffeoJet {
    let n = diag.len();
    let comps = (0..n)
        .map(|i| {
            let mut c = linear_term(n, k, i, diag[i].clone());
            for j in i + 1..n {
                c = &c + &linear_term(n, k, j, small_rational(rng));
            }
            &c + &random_series(rng, n, k, 2, density)
        })
        .collect();
    DiffeoJet::new(comps).expect("triangular jets are invertible")
}

pub fn random_unipotent(rng: &mut impl Rng, n: usize, k: u32, density: f64) -> DiffeoJet {
    triangular_jet(rng, &vec![q(1, 1); n], k, density)
}

/// Strictly upper-triangular linear part plus random nonlinear terms.
pub fn random_nilpotent_field(
    rng: &mut impl Rng,
    n: usize,
    k: u32,
    density: f64,
) -> VectorFieldJet {
    let comps = (0..n)
        .map(|i| {
            let mut c = random_series(rng, n, k, 2, density);
            for j in i + 1..n {
                c = &c + &linear_term(n, k, j, small_rational(rng));
            }
            c
        })
        .collect();
    VectorFieldJet::new(comps).expect("no constant terms")
}

/// Any invertible jet: a random triangular jet with nonzero diagonal,
/// conjugated by a coordinate permutation when `n = 2`.
pub fn random_diffeo(rng: &mut impl Rng, n: usize, k: u32, density: f64) -> DiffeoJet {
    let diag: Vec<_> = (0..n).map(|_| nonzero_rational(rng)).collect();
    let t = triangular_jet(rng, &diag, k, density);
    if n == 2 && rng.gen_bool(0.5) {
        DiffeoJet::new(vec![t.component(1).clone(), t.component(0).clone()]).unwrap()
    } else {
        t
    }
}
