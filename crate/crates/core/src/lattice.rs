//! Integer lattices: row Hermite normal form and integer kernels.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Integer matrix as a list of rows.
pub type IntMatrix = Vec<Vec<BigInt>>;

/// Row-reduces with unimodular operations so that the first `limit` columns
/// are in Hermite normal form: pivots positive, entries above each pivot
/// reduced into `[0, pivot)`, zero rows last. Returns the rank within the
/// first `limit` columns.
fn hermite_in_place(rows: &mut IntMatrix, limit: usize) -> usize {
    let mut r = 0;
    for c in 0..limit {
        if r == rows.len() {
            break;
        }
        // Euclid on column c among rows r..
        loop {
            let pivot = (r..rows.len())
                .filter(|&i| !rows[i][c].is_zero())
                .min_by(|&a, &b| rows[a][c].abs().cmp(&rows[b][c].abs()));
            let Some(p) = pivot else { break };
            rows.swap(r, p);
            let mut done = true;
            for i in r + 1..rows.len() {
                if rows[i][c].is_zero() {
                    continue;
                }
                let q = rows[i][c].div_floor(&rows[r][c]);
                let pivot_row = rows[r].clone();
                for (a, b) in rows[i].iter_mut().zip(&pivot_row) {
                    *a -= &q * b;
                }
                if !rows[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if rows[r][c].is_zero() {
            continue;
        }
        if rows[r][c].is_negative() {
            for a in rows[r].iter_mut() {
                *a = -&*a;
            }
        }
        let pivot_row = rows[r].clone();
        for row in rows.iter_mut().take(r) {
            let q = row[c].div_floor(&pivot_row[c]);
            if q.is_zero() {
                continue;
            }
            for (a, b) in row.iter_mut().zip(&pivot_row) {
                *a -= &q * b;
            }
        }
        r += 1;
    }
    r
}

/// Hermite normal form of the lattice spanned by `rows`; zero rows removed.
pub fn hermite_normal_form(rows: &[Vec<BigInt>]) -> IntMatrix {
    let Some(width) = rows.first().map(Vec::len) else {
        return Vec::new();
    };
    let mut m = rows.to_vec();
    let rank = hermite_in_place(&mut m, width);
    m.truncate(rank);
    m
}

/// Basis (in Hermite normal form) of `{a ∈ ℤⁿ : A·a = 0}` for an `m×n`
/// constraint matrix `A`.
pub fn integer_kernel(constraints: &[Vec<BigInt>], n: usize) -> IntMatrix {
    let m = constraints.len();
    // rows of [Aᵀ | I]; unimodular row ops preserve the lattice relation
    let mut aug: IntMatrix = (0..n)
        .map(|j| {
            let mut row: Vec<BigInt> = constraints.iter().map(|c| c[j].clone()).collect();
            row.extend((0..n).map(|i| BigInt::from((i == j) as i64)));
            row
        })
        .collect();
    let rank = hermite_in_place(&mut aug, m);
    let kernel: IntMatrix = aug[rank..].iter().map(|r| r[m..].to_vec()).collect();
    hermite_normal_form(&kernel)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> IntMatrix {
        rows.iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect()
    }

    #[test]
    fn hnf_of_small_lattice() {
        let h = hermite_normal_form(&mat(&[&[2, 4], &[3, 5]]));
        assert_eq!(h, mat(&[&[1, 1], &[0, 2]]));
        let h = hermite_normal_form(&mat(&[&[2, -1], &[4, -2]]));
        assert_eq!(h, mat(&[&[2, -1]]));
    }

    #[test]
    fn kernel_of_valuation_rows() {
        // 2^a · 4^b = 1  ⇔  a + 2b = 0
        let k = integer_kernel(&mat(&[&[1, 2]]), 2);
        assert_eq!(k, mat(&[&[2, -1]]));
        assert!(integer_kernel(&mat(&[&[1, 0], &[0, 1]]), 2).is_empty());
        assert_eq!(integer_kernel(&[], 2), mat(&[&[1, 0], &[0, 1]]));
    }

    #[test]
    fn kernel_vectors_satisfy_constraints() {
        let a = mat(&[&[3, 6, -9, 2], &[1, 1, 1, 1]]);
        let k = integer_kernel(&a, 4);
        assert_eq!(k.len(), 2);
        for v in &k {
            for row in &a {
                let dot: BigInt = row.iter().zip(v).map(|(x, y)| x * y).sum();
                assert!(dot.is_zero());
            }
        }
    }
}
