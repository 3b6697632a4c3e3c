use std::collections::BTreeMap;

use logfan::conecomplex::star_subdivision;
use logfan::hkr::{hh_cohomology, hh_homology, periodic_cyclic, HHTable};
use logfan::lattice::{ivec, IntVector};
use logfan::logmodel::{
    affine_space, binomial, h0_line_bundle, h1_line_bundle, marked_p1, mixed_affine, nodal_cubic,
    point, product_model, projective_space, subdivided_model, toric_model, GradedEntry, LogModel,
};
use logfan::orbifold::{
    check_firm, orbifold_hh, sector_isotypic, twisted_sector, DiagonalAction, IsotypicTable,
};
use proptest::prelude::*;

fn hirzebruch(a: i64) -> LogModel {
    let rays: Vec<IntVector> = [[1, 0], [0, 1], [-1, a], [0, -1]]
        .iter()
        .map(|r| ivec(r))
        .collect();
    let cones = vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]];
    toric_model(&rays, &cones, 2, true, 10).unwrap()
}

fn finite_builtins() -> Vec<LogModel> {
    let mut out = vec![point(), nodal_cubic(), hirzebruch(1), hirzebruch(2)];
    out.extend((0..6).map(marked_p1));
    out.extend((1..=3).map(projective_space));
    out
}

fn complete_smooth_toric() -> Vec<LogModel> {
    let mut out: Vec<LogModel> = (1..=3).map(projective_space).collect();
    out.push(hirzebruch(0));
    out.push(hirzebruch(1));
    out.push(hirzebruch(3));
    out
}

/// Anti-diagonal sums of the Hodge table, computed from the raw grid.
fn resum(x: &LogModel) -> BTreeMap<i64, u64> {
    let mut out = BTreeMap::new();
    for p in 0..=x.dim {
        for q in 0..=x.dim {
            let v = x.hodge.get(p, q).as_finite().unwrap();
            if v > 0 {
                *out.entry(q as i64 - p as i64).or_insert(0) += v;
            }
        }
    }
    out
}

fn finite(t: &HHTable) -> BTreeMap<i64, u64> {
    t.degrees
        .iter()
        .map(|(n, v)| (*n, v.as_finite().unwrap()))
        .collect()
}

#[test]
fn omega_rank_equals_dimension() {
    let mut models = finite_builtins();
    models.push(affine_space(2, 4));
    models.push(mixed_affine(3, &[1], 4).unwrap());
    for x in models {
        assert_eq!(x.omega_log_rank, x.dim, "{}", x.name);
        assert!(x.flags.weakly_log_separated);
    }
}

#[test]
fn serre_duality_on_the_line() {
    for m in -5..=5 {
        assert_eq!(h1_line_bundle(m), h0_line_bundle(-2 - m));
    }
    for n in 0..8 {
        let x = marked_p1(n);
        let m = n as i64 - 2;
        assert_eq!(
            x.hodge.get(1, 1).as_finite().unwrap(),
            h0_line_bundle(-2 - m)
        );
    }
}

#[test]
fn convolution_is_commutative_and_associative() {
    let models = finite_builtins();
    let small: Vec<LogModel> = models.iter().filter(|x| x.dim <= 1).cloned().collect();
    for x in &models {
        for y in &models {
            let xy = product_model(x, y).unwrap();
            let yx = product_model(y, x).unwrap();
            assert_eq!(xy.hodge, yx.hodge);
        }
    }
    for x in &small {
        for y in &small {
            for z in &small {
                let left = product_model(&product_model(x, y).unwrap(), z).unwrap();
                let right = product_model(x, &product_model(y, z).unwrap()).unwrap();
                assert_eq!(left.hodge, right.hodge);
            }
        }
    }
    let a = affine_space(1, 5);
    assert_eq!(
        product_model(&a, &nodal_cubic()).unwrap().hodge,
        product_model(&nodal_cubic(), &a).unwrap().hodge
    );
}

#[test]
fn complete_toric_tables_are_binomial() {
    for x in complete_smooth_toric() {
        let d = x.dim;
        let total: u64 = (0..=d)
            .map(|q| x.hodge.get(0, q).as_finite().unwrap())
            .sum();
        assert_eq!(total, 1 << d);
        for p in 1..=d {
            for q in 0..=d {
                assert!(x.hodge.get(p, q).is_zero());
            }
        }
        let expected: BTreeMap<i64, u64> = (0..=d).map(|n| (n as i64, binomial(d, n))).collect();
        assert_eq!(finite(&hh_homology(&x).unwrap()), expected);
        assert_eq!(finite(&hh_cohomology(&x).unwrap()), expected);
    }
}

#[test]
fn homology_is_the_antidiagonal_sum() {
    for x in finite_builtins() {
        assert_eq!(finite(&hh_homology(&x).unwrap()), resum(&x), "{}", x.name);
        let c = periodic_cyclic(&x).unwrap();
        let total: u64 = resum(&x).values().sum();
        assert_eq!(c.even + c.odd, total);
    }
}

#[test]
fn kunneth_for_hochschild_homology() {
    let models = finite_builtins();
    for x in &models {
        for y in &models {
            if x.dim + y.dim > 4 {
                continue;
            }
            let hx = finite(&hh_homology(x).unwrap());
            let hy = finite(&hh_homology(y).unwrap());
            let mut expected: BTreeMap<i64, u64> = BTreeMap::new();
            for (a, u) in &hx {
                for (b, v) in &hy {
                    *expected.entry(a + b).or_insert(0) += u * v;
                }
            }
            expected.retain(|_, v| *v > 0);
            let xy = product_model(x, y).unwrap();
            assert_eq!(finite(&hh_homology(&xy).unwrap()), expected);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn subdivisions_keep_hochschild_homology(which in 0usize..6, weights in prop::collection::vec(1i64..=3, 3)) {
        let x = complete_smooth_toric()[which].clone();
        let f = &x.artin_fan;
        let top = f.cones().iter().position(|c| c.dim() == x.dim).unwrap();
        let c = f.cone(top).unwrap();
        // the sum of the rays keeps every star of a smooth cone unimodular
        let mut p = vec![num_bigint::BigInt::from(0); c.dim()];
        for r in c.rays() {
            for (a, b) in p.iter_mut().zip(r) {
                *a += b;
            }
        }
        let s = star_subdivision(f, top, &p).unwrap();
        let y = subdivided_model(&x, &s).unwrap();
        prop_assert_eq!(&y.hodge, &x.hodge);
        prop_assert_eq!(hh_homology(&y).unwrap(), hh_homology(&x).unwrap());
        let general: IntVector = c
            .rays()
            .iter()
            .zip(weights.iter().cycle())
            .fold(vec![num_bigint::BigInt::from(0); c.dim()], |acc, (r, w)| {
                acc.iter().zip(r).map(|(a, b)| a + b * w).collect()
            });
        let t = star_subdivision(f, top, &general).unwrap();
        if !t.all_unimodular() {
            prop_assert!(subdivided_model(&x, &t).is_err());
        }
    }
}

fn action_strategy() -> impl Strategy<Value = (usize, Vec<usize>, Vec<u64>, Vec<Vec<i64>>)> {
    (
        1usize..=3,
        prop::collection::vec(any::<bool>(), 3),
        prop::collection::vec(1u64..=4, 1..=2),
    )
        .prop_flat_map(|(n, mask, orders)| {
            let log: Vec<usize> = (0..n).filter(|&i| mask[i]).collect();
            let k = orders.len();
            (
                Just(n),
                Just(log),
                Just(orders),
                prop::collection::vec(prop::collection::vec(-3i64..=3, n), k),
            )
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sectors_follow_the_characters((n, log, orders, chars) in action_strategy()) {
        let model = mixed_affine(n, &log, 4).unwrap();
        let a = DiagonalAction::new(model, orders.clone(), chars.clone(), None).unwrap();
        prop_assert!(check_firm(&a));
        for g in a.elements() {
            let trivial_on = |i: usize| {
                orders.iter().enumerate().all(|(j, &o)| {
                    (g[j] as i64 * chars[j][i]).rem_euclid(o as i64) == 0
                })
            };
            let sector = twisted_sector(&a, &g).unwrap();
            if log.iter().any(|&i| !trivial_on(i)) {
                prop_assert!(sector.locus.is_none());
            } else {
                let locus = sector.locus.unwrap();
                let fixed = (0..n).filter(|&i| trivial_on(i)).count();
                prop_assert_eq!(locus.dim, fixed);
                prop_assert_eq!(locus.omega_log_rank, fixed);
            }
        }
    }

    #[test]
    fn invariants_commute_with_sector_sums((n, log, orders, chars) in action_strategy()) {
        let model = mixed_affine(n, &log, 4).unwrap();
        let a = DiagonalAction::new(model, orders, chars, None).unwrap();
        let template = hh_homology(&a.model).unwrap();
        let mut summed = IsotypicTable { entries: BTreeMap::new() };
        for g in a.elements() {
            summed.merge(&sector_isotypic(&a, &g).unwrap()).unwrap();
        }
        prop_assert_eq!(summed.invariants(&template).unwrap(), orbifold_hh(&a).unwrap());
    }
}

#[test]
fn trivial_groups_change_nothing() {
    let mut models = finite_builtins();
    models.push(affine_space(2, 5));
    models.push(mixed_affine(2, &[0], 5).unwrap());
    for x in models {
        let a = DiagonalAction::trivial(x.clone());
        assert_eq!(orbifold_hh(&a).unwrap(), hh_homology(&x).unwrap());
    }
}

#[test]
fn invariant_series_by_direct_count() {
    // x ↦ ζ x on 𝔸¹ for ζ of order r, no log: untwisted invariants are
    // x^{kr} and x^{kr-1} dx, each of the r - 1 twisted sectors is a point
    for r in 2..=4u64 {
        let a = DiagonalAction::new(
            mixed_affine(1, &[], 8).unwrap(),
            vec![r],
            vec![vec![1]],
            None,
        )
        .unwrap();
        let hh = orbifold_hh(&a).unwrap();
        let deg0 = hh.get(0);
        let deg1 = hh.get(1);
        let (s0, s1) = (deg0.as_series().unwrap(), deg1.as_series().unwrap());
        for w in 0..=8usize {
            let untwisted = u64::from((w as u64).is_multiple_of(r));
            let twisted = if w == 0 { r - 1 } else { 0 };
            assert_eq!(s0.coeffs[w], untwisted + twisted);
            assert_eq!(
                s1.coeffs[w],
                u64::from(w > 0 && (w as u64).is_multiple_of(r))
            );
        }
        assert!(matches!(hh.get(2), GradedEntry::Series(ref s) if s.is_zero()));
    }
}
