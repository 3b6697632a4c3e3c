//! Built-in reproduction suite: twelve exact checks with time limits.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use logfan::cone::Cone;
use logfan::conecomplex::{
    b_subcomplex, diagonal, from_toric_fan, nodal_cubic_complex, product, star_subdivision,
    subdivide_along, GeneralizedConeComplex,
};
use logfan::hkr::{euler_check, hh_cohomology, hh_homology, periodic_cyclic, HHTable};
use logfan::lattice::{ivec, smith_normal_form, IntMatrix, IntVector};
use logfan::logmodel::{
    affine_space, binomial, marked_p1, mixed_affine, nodal_cubic, point, product_model,
    projective_space, subdivided_model, toric_model, GradedEntry, LogModel, Series,
    DEFAULT_TRUNCATION,
};
use logfan::monoid::{
    fs_pushout, fs_pushout_with_maps, hilbert_basis, saturate, spec_component_count, FineMonoid,
    MonoidHom,
};
use logfan::orbifold::{check_firm, orbifold_hh, twisted_sector, DiagonalAction, OrbifoldError};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

const SEED: u64 = 0x6c6f_6766_616e;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "{} {:>2}. {} ({:.2?} of {:?}): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.elapsed,
            self.limit,
            self.detail
        )
    }
}

type Check = fn() -> Result<String, String>;
type Suite<'a> = (&'a str, &'a dyn Fn(&mut ChaCha8Rng) -> Result<(), String>);

const CRITERIA: [(u8, &str, u64, Check); 12] = [
    (1, "r disjoint lines", 1, r_disjoint_lines),
    (2, "product of Artin fans", 1, product_of_artin_fans),
    (3, "log blowup of the line diagonal", 1, line_diagonal),
    (4, "diagonal of the plane", 5, plane_diagonal),
    (5, "HKR for the nodal cubic", 1, nodal_cubic_hkr),
    (6, "HKR for marked lines", 1, marked_lines),
    (7, "affine line concentration", 1, affine_line_concentration),
    (8, "invariance under a toric blowup", 1, blowup_invariance),
    (9, "periodic cyclic homology", 1, periodic_cyclic_check),
    (10, "orbifold decomposition", 1, orbifold_decomposition),
    (11, "property suites", 60, property_suites),
    (12, "Koszul oracle", 10, koszul_oracle),
];

pub fn run_criterion(id: u8) -> Option<CriterionResult> {
    let &(id, title, secs, check) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(secs);
    let (mut passed, mut detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if passed && elapsed > limit {
        passed = false;
        detail = format!("{detail}; exceeded the time limit");
    }
    Some(CriterionResult {
        id,
        title,
        passed,
        detail,
        elapsed,
        limit,
    })
}

pub fn run_all() -> Vec<CriterionResult> {
    CRITERIA.iter().filter_map(|c| run_criterion(c.0)).collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fan(rays: &[&[i64]], cones: &[&[usize]]) -> GeneralizedConeComplex {
    let rays: Vec<IntVector> = rays.iter().map(|r| ivec(r)).collect();
    let rank = rays[0].len();
    let cones: Vec<Vec<usize>> = cones.iter().map(|c| c.to_vec()).collect();
    from_toric_fan(&rays, &cones, rank).expect("valid fan")
}

fn affine_line() -> GeneralizedConeComplex {
    fan(&[&[1]], &[&[0]])
}

fn affine_plane() -> GeneralizedConeComplex {
    fan(&[&[1, 0], &[0, 1]], &[&[0, 1]])
}

fn scalar_hom(r: i64) -> MonoidHom {
    MonoidHom::new(
        FineMonoid::free(1),
        FineMonoid::free(1),
        IntMatrix::from_i64(&[&[r]]),
    )
    .expect("multiplication is a monoid map")
}

fn finite_table(t: &HHTable) -> BTreeMap<i64, u64> {
    t.degrees
        .iter()
        .filter_map(|(n, v)| v.as_finite().map(|v| (*n, v)))
        .collect()
}

fn table(entries: &[(i64, u64)]) -> BTreeMap<i64, u64> {
    entries.iter().copied().collect()
}

fn r_disjoint_lines() -> Result<String, String> {
    let mut counts = Vec::new();
    for r in [2, 3, 5] {
        let f = scalar_hom(r);
        let rep = fs_pushout(&f, &f).map_err(|e| e.to_string())?;
        let c = spec_component_count(&rep.saturated, true).map_err(|e| e.to_string())?;
        ensure(c == BigInt::from(r), || {
            format!("r = {r} gave {c} components")
        })?;
        counts.push(c.to_string());
    }
    Ok(format!("components {}", counts.join(", ")))
}

fn product_of_artin_fans() -> Result<String, String> {
    let a1 = affine_line();
    let square = product(&a1, &a1).complex;
    ensure(square.cone_count() == 4, || {
        format!("𝔸¹ × 𝔸¹ has {} cones", square.cone_count())
    })?;
    ensure(square.is_isomorphic(&affine_plane()), || {
        "𝔸¹ × 𝔸¹ is not the 𝔸² fan".into()
    })?;
    let w = product(&nodal_cubic_complex(), &a1).complex;
    ensure(w.cone_count() == 6, || {
        format!("waffle × 𝔸¹ has {} cones", w.cone_count())
    })?;
    Ok("4 and 6 cones".into())
}

fn top_cone(f: &GeneralizedConeComplex) -> usize {
    let d = f.dim();
    f.cones()
        .iter()
        .position(|c| c.dim() == d)
        .expect("a top-dimensional cone")
}

fn line_diagonal() -> Result<String, String> {
    let a1 = affine_line();
    let delta = diagonal(&a1);
    let along = subdivide_along(&delta).map_err(|e| e.to_string())?;
    let sub = &along.subdivision;
    let top = top_cone(&delta.target);
    let maximal = sub.maximal_cones_over(top);
    ensure(maximal.len() == 2, || {
        format!("{} maximal cones", maximal.len())
    })?;
    ensure(sub.all_unimodular(), || "non-unimodular cone".into())?;
    let star = star_subdivision(&delta.target, top, &ivec(&[1, 1])).map_err(|e| e.to_string())?;
    ensure(sub.refined.is_isomorphic(&star.refined), || {
        "refinement is not the star at (1,1)".into()
    })?;
    let b = b_subcomplex(&a1, &along);
    let dims: BTreeSet<usize> = b.cones().iter().map(Cone::dim).collect();
    ensure(
        b.cone_count() == 2 && dims == BTreeSet::from([0, 1]),
        || format!("B has {} cones", b.cone_count()),
    )?;
    let ray = along
        .image_cones
        .iter()
        .find(|&&i| sub.refined.cones()[i].dim() == 1)
        .ok_or("no image ray")?;
    ensure(sub.rays_in_base[*ray] == vec![ivec(&[1, 1])], || {
        format!("image ray is {:?}", sub.rays_in_base[*ray])
    })?;
    Ok("star at (1,1), 2 unimodular cones, B = {0, ray(1,1)}".into())
}

fn plane_diagonal() -> Result<String, String> {
    let a2 = affine_plane();
    let delta = diagonal(&a2);
    let along = subdivide_along(&delta).map_err(|e| e.to_string())?;
    let sub = &along.subdivision;
    let top = top_cone(&delta.target);
    ensure(sub.preserves_volume(), || "volume changed".into())?;
    let maximal = sub.maximal_cones_over(top);
    let cones: Vec<Cone> = maximal
        .iter()
        .map(|&i| Cone::new(4, &sub.rays_in_base[i]).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    for (i, a) in cones.iter().enumerate() {
        ensure(a.is_full_dimensional(), || {
            format!("cone {i} is not 4-dimensional")
        })?;
        for b in &cones[i + 1..] {
            let meet = a.intersect(b);
            ensure(a.has_face(&meet) && b.has_face(&meet), || {
                "two refined cones meet outside a common face".into()
            })?;
        }
    }
    let wanted: BTreeSet<IntVector> = [ivec(&[1, 0, 1, 0]), ivec(&[0, 1, 0, 1])].into();
    let found = sub
        .rays_in_base
        .iter()
        .zip(&sub.structure_map.assignments)
        .any(|(rays, (base, _))| {
            *base == top && rays.iter().cloned().collect::<BTreeSet<_>>() == wanted
        });
    ensure(found, || "⟨(1,0,1,0),(0,1,0,1)⟩ is not a cone".into())?;
    ensure(!along.nonconvex.is_empty(), || {
        "no non-convex pieces recorded".into()
    })?;
    Ok(format!(
        "{} maximal cones, {} non-convex pieces recorded",
        cones.len(),
        along.nonconvex.len()
    ))
}

fn nodal_cubic_hkr() -> Result<String, String> {
    let x = nodal_cubic();
    let hh = finite_table(&hh_homology(&x).map_err(|e| e.to_string())?);
    ensure(hh == table(&[(-1, 1), (0, 2), (1, 1)]), || {
        format!("{hh:?}")
    })?;
    let chi = euler_check(&x).map_err(|e| e.to_string())?;
    ensure(chi == 0, || format!("Euler characteristic {chi}"))?;
    Ok("{-1: 1, 0: 2, 1: 1}, χ = 0".into())
}

fn marked_lines() -> Result<String, String> {
    for n in 2..=6usize {
        let hh = finite_table(&hh_homology(&marked_p1(n)).map_err(|e| e.to_string())?);
        let top = hh.get(&1).copied().unwrap_or(0);
        ensure(top == n as u64 - 1, || format!("n = {n}: HH_1 = {top}"))?;
    }
    let hh = finite_table(&hh_homology(&marked_p1(0)).map_err(|e| e.to_string())?);
    ensure(hh == table(&[(0, 2)]), || format!("n = 0: {hh:?}"))?;
    Ok("HH_1 = n - 1 for n = 2..6, P¹ gives {0: 2}".into())
}

/// The single shift `s` with `entry = t^s k[t]`, if any.
fn free_rank_one_shift(entry: &GradedEntry, truncation: usize) -> Option<usize> {
    let s = entry.as_series()?;
    (0..=truncation).find(|&k| *s == Series::polynomial_ring(1, truncation).shift(k))
}

fn affine_line_concentration() -> Result<String, String> {
    let n = DEFAULT_TRUNCATION;
    let x = affine_space(1, n);
    let mut out = Vec::new();
    for (name, t) in [
        ("homology", hh_homology(&x).map_err(|e| e.to_string())?),
        ("cohomology", hh_cohomology(&x).map_err(|e| e.to_string())?),
    ] {
        let support: Vec<i64> = t
            .degrees
            .iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(k, _)| *k)
            .collect();
        ensure(support == [0, 1], || {
            format!("{name} supported in {support:?}")
        })?;
        let shifts = support
            .iter()
            .map(|k| {
                free_rank_one_shift(&t.get(*k), n)
                    .ok_or(format!("{name} degree {k} is not free of rank 1"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        out.push(format!("{name} shifts {shifts:?}"));
    }
    Ok(out.join(", "))
}

fn blowup_invariance() -> Result<String, String> {
    let x = projective_space(2);
    let top = top_cone(&x.artin_fan);
    let c = &x.artin_fan.cones()[top];
    let barycenter = c.rays().iter().fold(vec![BigInt::zero(); 2], |acc, r| {
        acc.iter().zip(r).map(|(a, b)| a + b).collect()
    });
    let s = star_subdivision(&x.artin_fan, top, &barycenter).map_err(|e| e.to_string())?;
    let y = subdivided_model(&x, &s).map_err(|e| e.to_string())?;
    let expected = table(&[(0, 1), (1, 2), (2, 1)]);
    let hx = finite_table(&hh_homology(&x).map_err(|e| e.to_string())?);
    let hy = finite_table(&hh_homology(&y).map_err(|e| e.to_string())?);
    ensure(hx == expected, || format!("P²: {hx:?}"))?;
    ensure(hy == expected, || format!("blowup: {hy:?}"))?;
    ensure(
        y.artin_fan.ray_count() == x.artin_fan.ray_count() + 1,
        || "blowup did not add a ray".into(),
    )?;
    Ok("{0: 1, 1: 2, 2: 1} before and after".into())
}

/// Betti numbers of a sphere with `n` punctures.
fn punctured_sphere_betti(n: usize) -> [u64; 3] {
    if n == 0 {
        [1, 0, 1]
    } else {
        [1, n as u64 - 1, 0]
    }
}

fn periodic_cyclic_check() -> Result<String, String> {
    for n in 0..=6 {
        let c = periodic_cyclic(&marked_p1(n)).map_err(|e| e.to_string())?;
        let b = punctured_sphere_betti(n);
        ensure(c.even == b[0] + b[2] && c.odd == b[1], || {
            format!("n = {n}: ({}, {}) against Betti {b:?}", c.even, c.odd)
        })?;
    }
    let three = periodic_cyclic(&marked_p1(3)).map_err(|e| e.to_string())?;
    let zero = periodic_cyclic(&marked_p1(0)).map_err(|e| e.to_string())?;
    ensure((three.even, three.odd) == (1, 2), || "marked_p1(3)".into())?;
    ensure((zero.even, zero.odd) == (2, 0), || "marked_p1(0)".into())?;
    Ok("(1, 2) and (2, 0), Betti oracle agrees for n = 0..6".into())
}

fn orbifold_decomposition() -> Result<String, String> {
    let n = DEFAULT_TRUNCATION;
    let e = |e: OrbifoldError| e.to_string();
    let even: Vec<u64> = (0..=n).map(|w| u64::from(w % 2 == 0)).collect();
    let with_log = DiagonalAction::new(
        mixed_affine(1, &[0], n).map_err(|e| e.to_string())?,
        vec![2],
        vec![vec![1]],
        None,
    )
    .map_err(e)?;
    let sector = twisted_sector(&with_log, &[1]).map_err(e)?;
    ensure(sector.locus.is_none(), || {
        "twisted sector is not empty".into()
    })?;
    let hh = orbifold_hh(&with_log).map_err(e)?;
    for k in [0, 1] {
        let s = hh.get(k);
        ensure(s.as_series().map(|s| &s.coeffs) == Some(&even), || {
            format!("degree {k}: {s}")
        })?;
    }
    ensure(
        hh.degrees.iter().filter(|(_, v)| !v.is_zero()).count() == 2,
        || "extra degrees".into(),
    )?;
    let plain = DiagonalAction::new(
        mixed_affine(1, &[], n).map_err(|e| e.to_string())?,
        vec![2],
        vec![vec![1]],
        None,
    )
    .map_err(e)?;
    let point_sector = twisted_sector(&plain, &[1]).map_err(e)?;
    ensure(
        point_sector.locus.as_ref().map(|l| l.dim) == Some(0),
        || "the twisted locus is not a point".into(),
    )?;
    let gained = orbifold_hh(&plain).map_err(e)?.get(0);
    let gained = gained.as_series().ok_or("degree 0 is not a series")?;
    let diff: Vec<i64> = gained
        .coeffs
        .iter()
        .zip(&even)
        .map(|(a, b)| *a as i64 - *b as i64)
        .collect();
    ensure(diff[0] == 1 && diff[1..].iter().all(|d| *d == 0), || {
        format!("no-log degree 0 differs by {diff:?}")
    })?;
    let inversion =
        DiagonalAction::new(marked_p1(2), vec![2], vec![vec![0]], Some(vec![vec![1, 0]]))
            .map_err(e)?;
    ensure(!check_firm(&inversion), || "inversion reported firm".into())?;
    ensure(
        orbifold_hh(&inversion) == Err(OrbifoldError::NotFirm),
        || "inversion was not rejected".into(),
    )?;
    Ok("log: empty sector, 1 + t² + … twice; no log: +1 in degree 0; P¹ inversion not firm".into())
}

fn random_monoid(rng: &mut ChaCha8Rng) -> FineMonoid {
    let k = rng.gen_range(1..=4);
    let gens: Vec<IntVector> = (0..k)
        .map(|_| ivec(&[rng.gen_range(-3..=3), rng.gen_range(-3..=3)]))
        .collect();
    FineMonoid::new(logfan::lattice::FgAbelianGroup::free(2), gens).expect("free ambient")
}

fn check_saturation(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for _ in 0..40 {
        let p = random_monoid(rng);
        let once = saturate(&p);
        let twice = saturate(&once.saturated);
        ensure(once.idempotent && twice.added.is_empty(), || {
            format!("saturation of {:?} is not idempotent", p.generators())
        })?;
        for g in p.generators() {
            ensure(once.saturated.contains(g), || {
                "saturation lost a generator".into()
            })?;
        }
    }
    Ok(())
}

fn check_hilbert_minimality(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let mut done = 0;
    while done < 25 {
        let a = ivec(&[rng.gen_range(-3..=3), rng.gen_range(-3..=3)]);
        let b = ivec(&[rng.gen_range(-3..=3), rng.gen_range(-3..=3)]);
        let Ok(cone) = Cone::new(2, &[a.clone(), b.clone()]) else {
            continue;
        };
        if cone.dim() == 0 {
            continue;
        }
        done += 1;
        let basis: BTreeSet<IntVector> = hilbert_basis(&[a, b], 2)
            .map_err(|e| e.to_string())?
            .into_iter()
            .collect();
        let bound = 6i64;
        let in_box = |v: &IntVector| v.iter().all(|x| x.abs() <= BigInt::from(bound));
        let points: Vec<IntVector> = (-bound..=bound)
            .flat_map(|x| (-bound..=bound).map(move |y| ivec(&[x, y])))
            .filter(|v| cone.contains(v) && v.iter().any(|x| !x.is_zero()))
            .collect();
        let member: BTreeSet<&IntVector> = points.iter().collect();
        let irreducible: BTreeSet<IntVector> = points
            .iter()
            .filter(|h| {
                !points.iter().any(|p| {
                    let rest: IntVector = h.iter().zip(p.iter()).map(|(x, y)| x - y).collect();
                    member.contains(&rest)
                })
            })
            .cloned()
            .collect();
        ensure(basis.iter().all(in_box), || {
            "basis element outside the box".into()
        })?;
        ensure(basis == irreducible, || {
            format!("basis {basis:?} differs from the irreducibles {irreducible:?}")
        })?;
    }
    Ok(())
}

fn nonnegative_maps(rows: usize, cols: usize) -> Vec<IntMatrix> {
    let cells = rows * cols;
    (0..4usize.pow(cells as u32))
        .map(|mut code| {
            let mut m = IntMatrix::zeros(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    m.set(i, j, BigInt::from(code % 4));
                    code /= 4;
                }
            }
            m
        })
        .collect()
}

fn check_pushout_universal(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for _ in 0..8 {
        let (a, b) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let (f, g) = (scalar_hom(a), scalar_hom(b));
        let po = fs_pushout_with_maps(&f, &g).map_err(|e| e.to_string())?;
        for rank in [1usize, 2] {
            let target = FineMonoid::free(rank);
            let maps = nonnegative_maps(rank, 1);
            for alpha in &maps {
                for beta in &maps {
                    let one = ivec(&[1]);
                    if alpha.mul_vec(&f.apply(&one)) != beta.mul_vec(&g.apply(&one)) {
                        continue;
                    }
                    let joint = IntMatrix::from_rows(
                        (0..rank)
                            .map(|i| {
                                let mut row = alpha.row(i);
                                row.extend(beta.row(i));
                                row
                            })
                            .collect(),
                        2,
                    )
                    .map_err(|e| e.to_string())?;
                    let gamma = joint.mul(&po.lift);
                    ensure(
                        gamma.mul_vec(&po.from_p.apply(&one)) == alpha.mul_vec(&one),
                        || "induced map does not restrict to the first leg".into(),
                    )?;
                    ensure(
                        gamma.mul_vec(&po.from_q.apply(&one)) == beta.mul_vec(&one),
                        || "induced map does not restrict to the second leg".into(),
                    )?;
                    for s in po.report.saturated.generators() {
                        ensure(target.contains(&gamma.mul_vec(s)), || {
                            "induced map leaves the target".into()
                        })?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn check_smith(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for _ in 0..60 {
        let (r, c) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let rows: Vec<IntVector> = (0..r)
            .map(|_| {
                (0..c)
                    .map(|_| BigInt::from(rng.gen_range(-6..=6)))
                    .collect()
            })
            .collect();
        let a = IntMatrix::from_rows(rows, c).map_err(|e| e.to_string())?;
        let s = smith_normal_form(&a);
        ensure(s.u.mul(&a).mul(&s.v) == s.d, || {
            format!("U A V ≠ D for {a:?}")
        })?;
        ensure(s.u.mul(&s.u_inv) == IntMatrix::identity(r), || {
            "U⁻¹ is wrong".into()
        })?;
        ensure(s.u.det().abs().is_one() && s.v.det().abs().is_one(), || {
            "transforms are not unimodular".into()
        })?;
        let f = s.invariant_factors();
        ensure(f.windows(2).all(|w| (&w[1] % &w[0]).is_zero()), || {
            "invariant factors do not divide".into()
        })?;
    }
    Ok(())
}

fn check_subdivision_volume(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let fans = [
        affine_plane(),
        fan(&[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[1, 2], &[2, 0]]),
        fan(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]], &[&[0, 1, 2]]),
    ];
    for f in &fans {
        for _ in 0..4 {
            let top = top_cone(f);
            let c = &f.cones()[top];
            let point = c
                .rays()
                .iter()
                .fold(vec![BigInt::zero(); c.dim()], |acc, r| {
                    let w = BigInt::from(rng.gen_range(1..=4));
                    acc.iter().zip(r).map(|(x, y)| x + y * &w).collect()
                });
            let s = star_subdivision(f, top, &point).map_err(|e| e.to_string())?;
            ensure(s.preserves_volume(), || "star changed the volume".into())?;
            ensure(s.refined.ray_count() == f.ray_count() + 1, || {
                "ray count".into()
            })?;
        }
    }
    Ok(())
}

fn check_kunneth() -> Result<(), String> {
    let hirzebruch = |a: i64| {
        let rays: Vec<IntVector> = [[1, 0], [0, 1], [-1, a], [0, -1]]
            .iter()
            .map(|r| ivec(r))
            .collect();
        toric_model(
            &rays,
            &[vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
            2,
            true,
            10,
        )
        .expect("complete fan")
    };
    let mut models: Vec<LogModel> = vec![point(), nodal_cubic(), hirzebruch(1)];
    models.extend([0, 2, 4].map(marked_p1));
    models.push(projective_space(1));
    for x in &models {
        for y in &models {
            let hx = finite_table(&hh_homology(x).map_err(|e| e.to_string())?);
            let hy = finite_table(&hh_homology(y).map_err(|e| e.to_string())?);
            let mut expected: BTreeMap<i64, u64> = BTreeMap::new();
            for (a, u) in &hx {
                for (b, v) in &hy {
                    *expected.entry(a + b).or_insert(0) += u * v;
                }
            }
            expected.retain(|_, v| *v > 0);
            let xy = product_model(x, y).map_err(|e| e.to_string())?;
            let got = finite_table(&hh_homology(&xy).map_err(|e| e.to_string())?);
            ensure(got == expected, || format!("{} × {}", x.name, y.name))?;
        }
    }
    Ok(())
}

fn property_suites() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let suites: [Suite; 6] = [
        ("saturation idempotence", &check_saturation),
        ("Hilbert basis minimality", &check_hilbert_minimality),
        ("pushout universal property", &check_pushout_universal),
        ("Smith recomposition", &check_smith),
        ("subdivision volume", &check_subdivision_volume),
        ("Künneth", &|_| check_kunneth()),
    ];
    for (name, suite) in suites {
        suite(&mut rng).map_err(|e| format!("{name}: {e}"))?;
    }
    Ok("6 suites".into())
}

/// Rank over Q by fraction-based elimination.
fn rational_rank(rows: Vec<Vec<i64>>) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(|x| BigRational::from_integer(x.into()))
                .collect()
        })
        .collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][c].clone();
        let (head, tail) = m.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        for row in tail.iter_mut().filter(|r| !r[c].is_zero()) {
            let factor = &row[c] / &pivot;
            for (x, p) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                *x -= &factor * p;
            }
        }
        rank += 1;
    }
    rank
}

/// Exponent vectors of total degree `m` in `d` variables.
fn monomials(d: usize, m: usize) -> Vec<Vec<usize>> {
    if d == 0 {
        return if m == 0 { vec![vec![]] } else { vec![] };
    }
    (0..=m)
        .flat_map(|first| {
            monomials(d - 1, m - first)
                .into_iter()
                .map(move |mut rest| {
                    rest.insert(0, first);
                    rest
                })
        })
        .collect()
}

/// Subsets of `0..d` of size `q`, as sorted index lists.
fn subsets(d: usize, q: usize) -> Vec<Vec<usize>> {
    (0..1usize << d)
        .filter(|s| s.count_ones() as usize == q)
        .map(|s| (0..d).filter(|i| s >> i & 1 == 1).collect())
        .collect()
}

/// Matrix of `K_q → K_{q-1}` in internal degree `m`, where `K_q` in degree
/// `m` is spanned by `u^a e_S` with `|S| = q` and `|a| + q = m`.
fn koszul_differential(d: usize, q: usize, m: usize) -> Vec<Vec<i64>> {
    let source: Vec<(Vec<usize>, Vec<usize>)> = subsets(d, q)
        .into_iter()
        .flat_map(|s| monomials(d, m - q).into_iter().map(move |a| (a, s.clone())))
        .collect();
    let target: Vec<(Vec<usize>, Vec<usize>)> = subsets(d, q - 1)
        .into_iter()
        .flat_map(|s| {
            monomials(d, m - q + 1)
                .into_iter()
                .map(move |a| (a, s.clone()))
        })
        .collect();
    let index: BTreeMap<&(Vec<usize>, Vec<usize>), usize> =
        target.iter().enumerate().map(|(i, b)| (b, i)).collect();
    let mut rows = vec![vec![0i64; target.len()]; source.len()];
    for (r, (a, s)) in source.iter().enumerate() {
        for (pos, &i) in s.iter().enumerate() {
            let mut a2 = a.clone();
            a2[i] += 1;
            let s2: Vec<usize> = s.iter().copied().filter(|&j| j != i).collect();
            let sign = if pos % 2 == 0 { 1 } else { -1 };
            rows[r][index[&(a2, s2)]] += sign;
        }
    }
    rows
}

/// Koszul resolution of `k` by `u_i = t_i - 1` on `k[u_1, …, u_d]`: checks
/// exactness degree by degree up to `n` and returns the ranks of `K ⊗ k`.
fn koszul_tor_ranks(d: usize, n: usize) -> Result<Vec<u64>, String> {
    for m in 0..=n {
        let top = d.min(m);
        let dims: Vec<usize> = (0..=top)
            .map(|q| subsets(d, q).len() * monomials(d, m - q).len())
            .collect();
        let ranks: Vec<usize> = (0..=top + 1)
            .map(|q| match q {
                0 => 0,
                q if q > top => 0,
                q => rational_rank(koszul_differential(d, q, m)),
            })
            .collect();
        for (q, dim) in dims.iter().enumerate() {
            let homology = dim - ranks[q] - ranks[q + 1];
            let expected = usize::from(q == 0 && m == 0);
            ensure(homology == expected, || {
                format!("d = {d}: H_{q} in degree {m} has rank {homology}")
            })?;
        }
    }
    // the differentials of K ⊗ k vanish since every entry lies in (u)
    Ok((0..=d).map(|q| subsets(d, q).len() as u64).collect())
}

fn monomial_count_series(d: usize, n: usize) -> Vec<u64> {
    (0..=n).map(|m| monomials(d, m).len() as u64).collect()
}

fn koszul_oracle() -> Result<String, String> {
    let n = DEFAULT_TRUNCATION;
    for d in 1..=3 {
        let tor = koszul_tor_ranks(d, n)?;
        let counts = monomial_count_series(d, n);
        let hh = hh_homology(&affine_space(d, n)).map_err(|e| e.to_string())?;
        for (q, &rank) in tor.iter().enumerate() {
            ensure(rank == binomial(d, q), || {
                format!("Tor_{q} has rank {rank}")
            })?;
            let expected: Vec<u64> = counts.iter().map(|c| c * rank).collect();
            let entry = hh.get(q as i64);
            ensure(
                entry.as_series().map(|s| &s.coeffs) == Some(&expected),
                || format!("d = {d}: HH_{q} = {entry}"),
            )?;
        }
    }
    Ok(format!("d = 1, 2, 3 exact to degree {n}"))
}
