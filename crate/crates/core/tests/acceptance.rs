//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every criterion prints exactly one PASS/FAIL line.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use jetgroup_core::group_dim::{
    cyclic_dim, dim_stabilization_probe, lie_closure, semisimple_closure_dim, series_profile,
    unipotent_group_dim_at, RootTimesRational,
};
use jetgroup_core::intersection::{multiplicity, pullback_ideal, Generator};
use jetgroup_core::jet::{exp_vf, log_map, matrix_of};
use jetgroup_core::jordan::{
    is_semisimple_at, is_unipotent, is_unipotent_matrix, multiplicative_jordan,
};
use jetgroup_core::orbit::arnold_sequence;
use jetgroup_core::parse::{parse_map, POLYNOMIAL_CUTOFF};
use jetgroup_core::{
    DiffeoJet, EigenvalueSpec, IdealSpec, MultiIndex, MultiplicityKind, Rational, TruncatedSeries,
    VectorFieldJet, Verdict,
};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn within(elapsed: Duration, limit_secs: u64) -> Outcome {
    if elapsed > Duration::from_secs(limit_secs) {
        Err(format!("took {elapsed:.2?}, limit {limit_secs}s"))
    } else {
        Ok(format!("{elapsed:.2?}"))
    }
}

fn phi_j_law() -> Outcome {
    let start = Instant::now();
    let k_max = 16;
    let xy = IdealSpec::from_polynomials(3, &["x", "y"]).unwrap();
    let y = IdealSpec::from_polynomials(3, &["y"]).unwrap();
    for j in 1..=6u32 {
        let map = format!("(x, y + 1/{j}*x^2 + z^{}, z)", j + 2);
        let phi = parse_map(&map, k_max).map_err(|e| e.to_string())?;
        let pulled = pullback_ideal(&xy, &phi).map_err(|e| e.to_string())?;
        let m = multiplicity(&pulled, &y, k_max).map_err(|e| e.to_string())?;
        ensure!(
            m.kind
                == MultiplicityKind::Exact {
                    value: j as usize + 2,
                    level: j + 1
                },
            "j = {j}: got {m}"
        );
    }
    within(start.elapsed(), 10).map(|t| format!("j = 1..6 give exact j+2 ({t})"))
}

fn commutator_identities() -> Outcome {
    let k = 8;
    let map = |s: &str| parse_map(s, k).unwrap();
    let phi = map("(x, y*(1+x))");
    let eta = map("(x, y + x^2)");
    let psi = map("(x/(1-x), y)");
    let a = psi.commutator(&phi).unwrap();
    let b = eta.inverse().commutator(&phi).unwrap();
    let c = a.commutator(&b).unwrap();
    ensure!(a == map("(x, y*(1+2*x)/(1+x)^2)"), "[psi, phi] = {a}");
    ensure!(b == map("(x, y + x^3)"), "[eta^-1, phi] = {b}");
    ensure!(
        c == map("(x, y - x^5/(1+x)^2)"),
        "[[psi, phi], [eta^-1, phi]] = {c}"
    );
    Ok("three identities exact at cutoff 8".into())
}

fn exp_log_bijection() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(0xE1);
    for case in 0..200 {
        let n = rng.gen_range(1..=3);
        let k = rng.gen_range(1..=6);
        let density = if n == 3 { 0.15 } else { 0.4 };
        let phi = random_unipotent(&mut rng, n, k, density);
        let x = log_map(&phi).map_err(|e| e.to_string())?;
        ensure!(
            exp_vf(&x).unwrap() == phi,
            "case {case}: exp(log φ) ≠ φ for {phi}"
        );
        let field = random_nilpotent_field(&mut rng, n, k, density);
        let back = log_map(&exp_vf(&field).unwrap()).unwrap();
        ensure!(back == field, "case {case}: log(exp X) ≠ X for {field}");
    }
    within(start.elapsed(), 30).map(|t| format!("200 random pairs round-trip ({t})"))
}

fn jordan_suite() -> Outcome {
    let mut rng = rng(0x70);
    let spectrum = [q(1, 1), q(-1, 1), q(2, 1), q(1, 2), q(3, 1), q(4, 1)];
    for case in 0..100 {
        let n = rng.gen_range(1..=2);
        let k = rng.gen_range(1..=4);
        let diag: Vec<Rational> = (0..n)
            .map(|_| spectrum[rng.gen_range(0..spectrum.len())].clone())
            .collect();
        let phi = triangular_jet(&mut rng, &diag, k, 0.5);
        let pair = multiplicative_jordan(&phi).map_err(|e| format!("case {case}: {e}"))?;
        let (s, u) = (&pair.semisimple, &pair.unipotent);
        ensure!(
            s.compose(u).unwrap() == phi,
            "case {case}: φ_s∘φ_u ≠ φ for {phi}"
        );
        ensure!(
            u.compose(s).unwrap() == phi,
            "case {case}: factors do not commute for {phi}"
        );
        ensure!(
            is_semisimple_at(s),
            "case {case}: φ_s not semisimple for {phi}"
        );
        ensure!(
            is_unipotent(u).holds,
            "case {case}: φ_u linear part not unipotent"
        );
        ensure!(
            is_unipotent_matrix(matrix_of(u).matrix()),
            "case {case}: pullback of φ_u not unipotent"
        );
        for l in 1..k {
            let low = multiplicative_jordan(&phi.project(l).unwrap()).unwrap();
            ensure!(
                low.semisimple == s.project(l).unwrap() && low.unipotent == u.project(l).unwrap(),
                "case {case}: projection to level {l} does not commute with the splitting"
            );
        }
    }
    Ok("100 random jets".into())
}

/// `[yA∂_y, f(x)∂_y] = −Af∂_y` predicts the basis
/// `{yL∂_y, x²∂_y, x²L∂_y, …, x²L^{k−2}∂_y}` with `L = log(1+x)`.
fn recurrence_basis(k: u32) -> Vec<VectorFieldJet> {
    let l = (1..=k as i64).fold(TruncatedSeries::zero(2, k), |acc, m| {
        let sign = if m % 2 == 1 { 1 } else { -1 };
        let term = TruncatedSeries::monomial(2, k, MultiIndex::new(vec![m as u32, 0]), q(sign, m));
        &acc + &term
    });
    let y = TruncatedSeries::variable(2, k, 1);
    let x2 = TruncatedSeries::monomial(2, k, MultiIndex::new(vec![2, 0]), q(1, 1));
    let mut out = vec![VectorFieldJet::along(1, &y * &l).unwrap()];
    let mut f = x2;
    for _ in 0..=k.saturating_sub(2) {
        out.push(VectorFieldJet::along(1, f.clone()).unwrap());
        f = &f * &l;
    }
    out.retain(|v| !v.is_zero());
    out
}

fn infinite_dimension_witness() -> Outcome {
    let gens = |k| {
        vec![
            parse_map("(x, y*(1+x))", k).unwrap(),
            parse_map("(x, y + x^2)", k).unwrap(),
        ]
    };
    let mut dims = Vec::new();
    for k in 2..=8u32 {
        let d = unipotent_group_dim_at(&gens(k), k).map_err(|e| e.to_string())?;
        ensure!(d == k as usize, "k = {k}: dim {d}");
        let algebra = lie_closure(
            &gens(k)
                .iter()
                .map(|g| log_map(g).unwrap())
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let oracle = recurrence_basis(k);
        let leading: std::collections::BTreeSet<_> = oracle
            .iter()
            .map(|v| v.component(1).terms().next().unwrap().0.clone())
            .collect();
        ensure!(
            oracle.len() == k as usize && leading.len() == oracle.len(),
            "k = {k}: recurrence basis has {} independent fields",
            leading.len()
        );
        ensure!(
            oracle.iter().all(|v| algebra.contains(v)),
            "k = {k}: recurrence basis not inside the computed algebra"
        );
        dims.push(d);
    }
    let report = dim_stabilization_probe(&gens(8), 2, 8).unwrap();
    ensure!(
        report.verdict == Verdict::StrictlyGrowing { horizon: 8 },
        "verdict {}",
        report.verdict
    );
    Ok(format!("dims {dims:?}, strictly growing"))
}

fn finite_dimension_witness() -> Outcome {
    let k = 8;
    let gens = vec![
        parse_map("(x, y + x^2)", k).unwrap(),
        parse_map("(x, y + x^3)", k).unwrap(),
    ];
    let report = dim_stabilization_probe(&gens, 2, k).map_err(|e| e.to_string())?;
    ensure!(
        report.levels.iter().filter(|l| l.0 >= 3).all(|l| l.1 == 2),
        "levels {:?}",
        report.levels
    );
    ensure!(
        report.verdict == Verdict::Stabilized { value: 2, since: 3 },
        "verdict {}",
        report.verdict
    );
    Ok("dim 2 for k = 3..8".into())
}

fn derived_length_witness() -> Outcome {
    let k = 6;
    let gens: Vec<DiffeoJet> = ["(x, y*(1+x))", "(x, y + x^2)", "(x/(1-x), y)"]
        .iter()
        .map(|s| parse_map(s, k).unwrap())
        .collect();
    let p = series_profile(&gens, k).map_err(|e| e.to_string())?;
    ensure!(
        p.derived_length == Some(3),
        "derived length {:?}",
        p.derived_length
    );
    Ok(format!("derived length 3 (dim {})", p.dimension))
}

fn dimension_bounds() -> Outcome {
    let fixtures = [
        (EigenvalueSpec::from_rationals(&[q(2, 1), q(3, 1)]), 2),
        (EigenvalueSpec::from_rationals(&[q(2, 1), q(4, 1)]), 1),
        (
            EigenvalueSpec::Roots(vec![RootTimesRational {
                modulus: q(1, 1),
                numerator: 1,
                order: 3,
            }]),
            0,
        ),
    ];
    for (spec, want) in &fixtures {
        let got = semisimple_closure_dim(spec).map_err(|e| e.to_string())?;
        ensure!(got == *want, "{spec:?}: {got}");
    }
    let mut rng = rng(0xC7);
    let spectrum = [
        q(1, 1),
        q(-1, 1),
        q(2, 1),
        q(1, 2),
        q(3, 1),
        q(4, 1),
        q(-2, 1),
    ];
    let mut hist = [0usize; 4];
    for case in 0..100 {
        let n = rng.gen_range(1..=3);
        let k = rng.gen_range(2..=if n == 3 { 3 } else { 4 });
        let diag: Vec<Rational> = (0..n)
            .map(|_| spectrum[rng.gen_range(0..spectrum.len())].clone())
            .collect();
        let phi = triangular_jet(&mut rng, &diag, k, 0.4);
        let d = cyclic_dim(&phi, &EigenvalueSpec::from_rationals(&diag))
            .map_err(|e| format!("case {case} ({phi}): {e}"))?;
        ensure!(d <= n, "case {case}: dim {d} > {n} for {phi}");
        hist[d] += 1;
    }
    Ok(format!("fixtures ok; 100 cyclic dims by value {hist:?}"))
}

fn arnold_sweep() -> Outcome {
    let k = 4;
    let phi = parse_map("(2*x, y/2)", k).unwrap();
    let i = IdealSpec::from_polynomials(2, &["y - x"]).unwrap();
    let j = IdealSpec::from_polynomials(2, &["y - 2*x"]).unwrap();
    let seq = arnold_sequence(&phi, &i, &j, -20..=20, k).map_err(|e| e.to_string())?;
    ensure!(seq.len() == 41, "{} terms", seq.len());
    for (n, r) in seq {
        let r = r.map_err(|e| format!("n = {n}: {e}"))?;
        ensure!(r.is_exact() && r.value() == 1, "n = {n}: {r}");
    }
    Ok("μ_n = 1 for n in -20..=20".into())
}

fn staircase_count(n: usize, gens: &[Vec<u32>]) -> usize {
    // each coordinate is bounded by its pure power in the generators
    let bound: Vec<u32> = (0..n)
        .map(|i| {
            gens.iter()
                .filter(|g| g.iter().enumerate().all(|(j, &e)| j == i || e == 0))
                .map(|g| g[i])
                .min()
                .expect("finite colength")
        })
        .collect();
    let mut count = 0;
    let mut alpha = vec![0u32; n];
    loop {
        if !gens
            .iter()
            .any(|g| g.iter().zip(&alpha).all(|(a, b)| a <= b))
        {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == n {
                return count;
            }
            alpha[i] += 1;
            if alpha[i] < bound[i] {
                break;
            }
            alpha[i] = 0;
            i += 1;
        }
    }
}

fn monomial_ideal(n: usize, gens: &[Vec<u32>]) -> IdealSpec {
    let generators = gens
        .iter()
        .map(|g| {
            Generator::exact(TruncatedSeries::monomial(
                n,
                POLYNOMIAL_CUTOFF,
                MultiIndex::new(g.clone()),
                q(1, 1),
            ))
        })
        .collect();
    IdealSpec::new(n, generators).unwrap()
}

fn random_polynomial_ideal(rng: &mut impl Rng, count: usize) -> IdealSpec {
    let generators = (0..count)
        .map(|_| Generator::exact(random_series(rng, 2, 3, 1, 0.5).recut(POLYNOMIAL_CUTOFF)))
        .collect();
    IdealSpec::new(2, generators).unwrap()
}

fn multiplicity_oracles() -> Outcome {
    let mut rng = rng(0x5A);
    let empty = |n| IdealSpec::new(n, Vec::new()).unwrap();
    for case in 0..50 {
        let n = rng.gen_range(1..=3);
        let mut gens: Vec<Vec<u32>> = (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = rng.gen_range(1..=5);
                e
            })
            .collect();
        for _ in 0..rng.gen_range(0..=3) {
            gens.push((0..n).map(|_| rng.gen_range(0..=3)).collect());
        }
        gens.retain(|g| g.iter().any(|&e| e > 0));
        let want = staircase_count(n, &gens);
        let m =
            multiplicity(&monomial_ideal(n, &gens), &empty(n), 16).map_err(|e| e.to_string())?;
        ensure!(
            m.is_exact() && m.value() == want,
            "case {case} {gens:?}: {m}, staircase {want}"
        );
    }
    let k = 12;
    let mut finite = 0;
    for case in 0..25 {
        let count = rng.gen_range(1..=2);
        let i = random_polynomial_ideal(&mut rng, count);
        let j = random_polynomial_ideal(&mut rng, 1);
        let phi = random_diffeo(&mut rng, 2, k, 0.3);
        let base = multiplicity(&i, &j, k).map_err(|e| e.to_string())?;
        let swapped = multiplicity(&j, &i, k).unwrap();
        ensure!(
            base == swapped,
            "case {case}: asymmetric {base} vs {swapped}"
        );
        let moved = multiplicity(
            &pullback_ideal(&i, &phi).unwrap(),
            &pullback_ideal(&j, &phi).unwrap(),
            k,
        )
        .map_err(|e| format!("case {case}: {e}"))?;
        ensure!(
            moved == base,
            "case {case}: {base} became {moved} under {phi}"
        );
        finite += usize::from(base.is_exact());
    }
    Ok(format!(
        "50 staircases; 25 pairs ({finite} finite) invariant"
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("φ(j) multiplicity law", phi_j_law),
        ("commutator identities", commutator_identities),
        ("exp/log bijection", exp_log_bijection),
        ("Jordan decomposition suite", jordan_suite),
        ("infinite-dimension witness", infinite_dimension_witness),
        ("finite-dimension witness", finite_dimension_witness),
        ("derived-length-3 witness", derived_length_witness),
        ("dimension bounds", dimension_bounds),
        ("Arnold sweep", arnold_sweep),
        ("multiplicity oracles", multiplicity_oracles),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
