//! Fixed workloads shared by the benchmarks.

use jetgroup_core::parse::parse_map;
use jetgroup_core::DiffeoJet;

/// A non-linear jet in `n ≤ 3` variables whose pullback matrix is full.
pub fn dense_jet(nvars: usize, cutoff: u32) -> DiffeoJet {
    let text = match nvars {
        1 => "(x + x^2 - 1/3*x^3)",
        2 => "(x + y^2, y + x^2 - 1/2*x*y)",
        _ => "(x + y*z, y + x^2 - z^3, z + 1/2*x*y)",
    };
    parse_map(text, cutoff).expect("fixture parses")
}

pub fn solvable_pair(cutoff: u32) -> Vec<DiffeoJet> {
    vec![
        parse_map("(x, y*(1+x))", cutoff).expect("fixture parses"),
        parse_map("(x, y + x^2)", cutoff).expect("fixture parses"),
    ]
}
