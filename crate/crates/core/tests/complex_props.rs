use std::collections::BTreeSet;

use logfan::conecomplex::{
    diagonal, from_toric_fan, nodal_cubic_complex, product, snc_artin_fan, star_subdivision,
    subdivide_along, GeneralizedConeComplex,
};
use logfan::lattice::{ivec, IntVector};
use num_bigint::BigInt;
use proptest::prelude::*;

fn fan(rays: &[&[i64]], cones: &[&[usize]]) -> GeneralizedConeComplex {
    let rays: Vec<IntVector> = rays.iter().map(|r| ivec(r)).collect();
    let rank = rays[0].len();
    let cones: Vec<Vec<usize>> = cones.iter().map(|c| c.to_vec()).collect();
    from_toric_fan(&rays, &cones, rank).unwrap()
}

fn affine_line() -> GeneralizedConeComplex {
    fan(&[&[1]], &[&[0]])
}

fn affine_plane() -> GeneralizedConeComplex {
    fan(&[&[1, 0], &[0, 1]], &[&[0, 1]])
}

fn projective_line() -> GeneralizedConeComplex {
    fan(&[&[1], &[-1]], &[&[0], &[1]])
}

fn projective_plane() -> GeneralizedConeComplex {
    fan(&[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[1, 2], &[2, 0]])
}

fn affine_space_3() -> GeneralizedConeComplex {
    fan(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]], &[&[0, 1, 2]])
}

fn builtins() -> Vec<GeneralizedConeComplex> {
    vec![
        GeneralizedConeComplex::point(),
        affine_line(),
        affine_plane(),
        projective_line(),
        projective_plane(),
        nodal_cubic_complex(),
        snc_artin_fan(3, &[vec![0, 1], vec![1, 2]]).unwrap(),
    ]
}

#[test]
fn product_counts_multiply() {
    for f in builtins() {
        for g in builtins() {
            let p = product(&f, &g).complex;
            assert_eq!(p.cone_count(), f.cone_count() * g.cone_count());
            assert_eq!(p.face_map_count(), f.face_map_count() * g.face_map_count());
        }
    }
}

#[test]
fn product_is_unital_and_associative() {
    let point = GeneralizedConeComplex::point();
    let small = [affine_line(), projective_line(), nodal_cubic_complex()];
    for f in builtins() {
        assert!(product(&point, &f).complex.is_isomorphic(&f));
        assert!(product(&f, &point).complex.is_isomorphic(&f));
    }
    for f in &small {
        for g in &small {
            assert!(product(f, g).complex.is_isomorphic(&product(g, f).complex));
            for h in &small {
                let left = product(&product(f, g).complex, h).complex;
                let right = product(f, &product(g, h).complex).complex;
                assert!(left.is_isomorphic(&right));
            }
        }
    }
}

/// Positive combination of the rays of `cone` in its own coordinates.
fn interior_point(f: &GeneralizedConeComplex, cone: usize, weights: &[i64]) -> IntVector {
    let c = f.cone(cone).unwrap();
    let mut p = vec![BigInt::from(0); c.dim()];
    for (r, w) in c.rays().iter().zip(weights.iter().cycle()) {
        for (x, y) in p.iter_mut().zip(r) {
            *x += y * BigInt::from(*w);
        }
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn stars_conserve_volume(
        which in 0usize..3,
        pick in 0usize..16,
        weights in prop::collection::vec(1i64..=4, 3),
        second in prop::collection::vec(1i64..=3, 3),
    ) {
        let base = [projective_plane(), affine_space_3(), affine_plane()][which].clone();
        let candidates: Vec<usize> = (0..base.cone_count())
            .filter(|&i| base.cones()[i].dim() >= 2)
            .collect();
        let cone = candidates[pick % candidates.len()];
        let p = interior_point(&base, cone, &weights);
        let s = star_subdivision(&base, cone, &p).unwrap();
        prop_assert!(s.preserves_volume());
        prop_assert_eq!(s.refined.ray_count(), base.ray_count() + 1);
        // and again on the refinement
        let refined = &s.refined;
        let top: Vec<usize> = (0..refined.cone_count())
            .filter(|&i| refined.cones()[i].dim() >= 2)
            .collect();
        let c2 = top[pick % top.len()];
        let p2 = interior_point(refined, c2, &second);
        let t = star_subdivision(refined, c2, &p2).unwrap();
        prop_assert!(t.preserves_volume());
        prop_assert_eq!(t.refined.ray_count(), refined.ray_count() + 1);
    }
}

#[test]
fn diagonal_subcomplexes_are_face_closed_and_factor() {
    let cases = [
        affine_line(),
        affine_plane(),
        projective_line(),
        projective_plane(),
        nodal_cubic_complex(),
        snc_artin_fan(3, &[vec![0, 1], vec![1, 2]]).unwrap(),
    ];
    for f in &cases {
        let d = subdivide_along(&diagonal(f)).unwrap();
        assert!(d.factors);
        assert!(d.subdivision.preserves_volume());
        let image: BTreeSet<usize> = d.image_cones.iter().copied().collect();
        for m in d.subdivision.refined.face_maps() {
            if image.contains(&m.target) {
                assert!(image.contains(&m.source));
            }
        }
        assert!(d.image_subcomplex.is_isomorphic(f));
    }
}
