use logfan::lattice::{coordinates_in, saturate_subgroup, smith_normal_form, IntMatrix, IntVector};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn matrix(max_dim: usize, bound: i64) -> impl Strategy<Value = IntMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(r, c)| {
        prop::collection::vec(prop::collection::vec(-bound..=bound, c), r).prop_map(move |rows| {
            let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
            IntMatrix::from_i64(&refs)
        })
    })
}

#[derive(Clone, Debug)]
enum Elementary {
    Add(usize, usize, i64),
    Swap(usize, usize),
    Negate(usize),
}

fn elementary_ops() -> impl Strategy<Value = Vec<Elementary>> {
    prop::collection::vec(
        prop_oneof![
            (0..5usize, 0..5usize, -3i64..=3).prop_map(|(a, b, c)| Elementary::Add(a, b, c)),
            (0..5usize, 0..5usize).prop_map(|(a, b)| Elementary::Swap(a, b)),
            (0..5usize).prop_map(Elementary::Negate),
        ],
        0..8,
    )
}

fn unimodular(n: usize, ops: &[Elementary]) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    for op in ops {
        match *op {
            Elementary::Add(a, b, c) if a % n != b % n => {
                m.add_row_multiple(a % n, b % n, &BigInt::from(c))
            }
            Elementary::Swap(a, b) => m.swap_rows(a % n, b % n),
            Elementary::Negate(a) => m.negate_row(a % n),
            _ => {}
        }
    }
    m
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Cofactor expansion, independent of the elimination-based determinant.
fn cofactor_det(m: &[Vec<BigInt>]) -> BigInt {
    if m.is_empty() {
        return BigInt::from(1);
    }
    let mut total = BigInt::zero();
    for j in 0..m.len() {
        let minor: Vec<Vec<BigInt>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        let term = &m[0][j] * cofactor_det(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// `gcd` of all `k × k` minors.
fn determinantal_divisor(a: &IntMatrix, k: usize) -> BigInt {
    let mut g = BigInt::zero();
    for rows in subsets(a.rows(), k) {
        for cols in subsets(a.cols(), k) {
            let m: Vec<Vec<BigInt>> = rows
                .iter()
                .map(|&i| cols.iter().map(|&j| a.get(i, j).clone()).collect())
                .collect();
            g = g.gcd(&cofactor_det(&m));
        }
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn smith_recomposes(a in matrix(5, 5)) {
        let s = smith_normal_form(&a);
        prop_assert_eq!(s.u.mul(&a).mul(&s.v), s.d.clone());
        prop_assert!(s.u.is_unimodular());
        prop_assert!(s.v.is_unimodular());
        prop_assert_eq!(s.u.mul(&s.u_inv), IntMatrix::identity(a.rows()));
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                if i != j {
                    prop_assert!(s.d.get(i, j).is_zero());
                }
            }
        }
        let f = s.invariant_factors();
        for w in f.windows(2) {
            prop_assert!(w[1].is_multiple_of(&w[0]));
        }
        prop_assert!(f.iter().all(|x| x.is_positive()));
    }

    #[test]
    fn smith_matches_determinantal_divisors(a in matrix(4, 5)) {
        let f = smith_normal_form(&a).invariant_factors();
        let mut product = BigInt::from(1);
        for k in 1..=a.rows().min(a.cols()) {
            let dk = determinantal_divisor(&a, k);
            if k <= f.len() {
                product *= &f[k - 1];
                prop_assert_eq!(&dk, &product);
            } else {
                prop_assert!(dk.is_zero());
            }
        }
    }

    #[test]
    fn smith_is_unimodularly_invariant(a in matrix(5, 5), left in elementary_ops(), right in elementary_ops()) {
        let p = unimodular(a.rows(), &left);
        let q = unimodular(a.cols(), &right).transpose();
        let b = p.mul(&a).mul(&q);
        prop_assert_eq!(
            smith_normal_form(&a).invariant_factors(),
            smith_normal_form(&b).invariant_factors()
        );
    }

    #[test]
    fn saturation_of_subgroups(a in matrix(4, 6)) {
        let n = a.rows();
        let gens: Vec<IntVector> = a.column_vectors();
        let sat = saturate_subgroup(&gens, n);
        prop_assert_eq!(saturate_subgroup(&sat, n), sat.clone());
        prop_assert_eq!(sat.len(), a.rank());
        if !sat.is_empty() {
            let basis = IntMatrix::from_columns(&sat, n).unwrap();
            for g in &gens {
                prop_assert!(coordinates_in(&basis, g).is_some());
            }
            // the index of span(gens) in its saturation is finite, and the
            // saturation is primitive: its maximal minors are coprime
            let d = determinantal_divisor(&basis, sat.len());
            prop_assert_eq!(d, BigInt::from(1));
        }
    }
}

#[test]
fn empty_matrices_decompose() {
    let a = IntMatrix::zeros(0, 3);
    let s = smith_normal_form(&a);
    assert_eq!(s.v.mul(&IntMatrix::identity(3)).rows(), 3);
    assert!(s.invariant_factors().is_empty());
    let b = IntMatrix::zeros(2, 0);
    assert_eq!(smith_normal_form(&b).u.rows(), 2);
}
