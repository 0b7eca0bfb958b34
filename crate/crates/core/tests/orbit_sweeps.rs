use jetgroup_core::intersection::multiplicity;
use jetgroup_core::orbit::{
    boundedness_verdict, enumerate_words, orbit_multiplicity_sweep, BoundednessVerdict,
};
use jetgroup_core::parse::parse_map;
use jetgroup_core::{DiffeoJet, GroupPresentation, IdealSpec};

fn phi_family(m: u32, k: u32) -> GroupPresentation {
    let maps = (1..=m)
        .map(|j| parse_map(&format!("(x, y + 1/{j}*x^2 + z^{}, z)", j + 2), k).unwrap())
        .collect();
    GroupPresentation::from_maps(maps).unwrap()
}

#[test]
fn family_sweeps_grow_with_the_number_of_generators() {
    let k = 10;
    let i = IdealSpec::from_polynomials(3, &["x", "y"]).unwrap();
    let j = IdealSpec::from_polynomials(3, &["y"]).unwrap();
    let three = orbit_multiplicity_sweep(&phi_family(3, k), &i, &j, 1, k, false, 2).unwrap();
    let six = orbit_multiplicity_sweep(&phi_family(6, k), &i, &j, 1, k, false, 2).unwrap();
    assert_eq!(three.max_finite, Some(5));
    assert_eq!(six.max_finite, Some(8));
    // (x, y) + (y) leaves the z-axis: the identity word diverges
    assert_eq!(six.divergent_words, ["id"]);
    let best = six
        .entries
        .iter()
        .filter(|e| matches!(&e.result, Ok(r) if r.is_exact() && r.value() == 8))
        .map(|e| e.word.as_str())
        .collect::<Vec<_>>();
    assert_eq!(best, ["g6", "g6^-1"]);
    assert_eq!(
        boundedness_verdict(&three, &six),
        BoundednessVerdict::Growing { from: 5, to: 8 }
    );
}

#[test]
fn finite_dimensional_orbit_is_bounded() {
    let k = 8;
    let p = GroupPresentation::from_maps(vec![parse_map("(x, y + x^2)", k).unwrap()]).unwrap();
    let i = IdealSpec::from_polynomials(2, &["x", "y"]).unwrap();
    let j = IdealSpec::from_polynomials(2, &["y"]).unwrap();
    let short = orbit_multiplicity_sweep(&p, &i, &j, 3, k, false, 1).unwrap();
    let long = orbit_multiplicity_sweep(&p, &i, &j, 6, k, false, 3).unwrap();
    assert_eq!(long.entries.len(), 13);
    assert!(long
        .entries
        .iter()
        .all(|e| e.result.as_ref().unwrap().value() == 1));
    assert_eq!(
        boundedness_verdict(&short, &long),
        BoundednessVerdict::BoundedEvidence { max: Some(1) }
    );
}

#[test]
fn identity_presentation_reproduces_the_plain_multiplicity() {
    let k = 6;
    let p = GroupPresentation::from_maps(vec![DiffeoJet::identity(2, k)]).unwrap();
    let i = IdealSpec::from_polynomials(2, &["y^2 - x^3"]).unwrap();
    let j = IdealSpec::from_polynomials(2, &["y"]).unwrap();
    let plain = multiplicity(&i, &j, k).unwrap();
    let report = orbit_multiplicity_sweep(&p, &i, &j, 2, k, true, 1).unwrap();
    assert_eq!(report.entries.len(), 1);
    assert_eq!(report.entries[0].result.as_ref().unwrap(), &plain);
}

#[test]
fn stored_jets_match_their_words() {
    let k = 4;
    let text = "a = (x, y*(1+x))\nb = (x + y^2, y)\nflow X = (x^2)*d/dy @ 1, 1/2\n";
    let p = GroupPresentation::parse(text, k).unwrap();
    let letters = p.letters().unwrap();
    for w in enumerate_words(&p, 3, false).unwrap() {
        let mut jet = DiffeoJet::identity(2, k);
        for &l in &w.letters {
            jet = jet.compose(&letters[l].jet).unwrap();
        }
        assert_eq!(jet, w.jet, "{}", w.label);
        assert!(w.letters.windows(2).all(|p| p[0] ^ 1 != p[1]));
    }
}

#[test]
fn validity_errors_stay_per_word() {
    let p = GroupPresentation::from_maps(vec![parse_map("(x, y*(1+x))", 4).unwrap()]).unwrap();
    let i = IdealSpec::from_polynomials(2, &["y"]).unwrap();
    let report = orbit_multiplicity_sweep(&p, &i, &i, 1, 8, false, 1).unwrap();
    assert_eq!(report.entries.len(), 3);
    for e in &report.entries {
        assert_eq!(e.result.as_ref().unwrap_err().code(), "VALIDITY");
    }
    assert!(report.to_csv().contains("g1,,error:VALIDITY,"));
}
