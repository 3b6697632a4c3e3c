//! Fine and fine saturated monoids inside finitely generated abelian groups.
//!
//! A [`FineMonoid`] is a finitely generated submonoid of an
//! [`FgAbelianGroup`]; it is integral by construction. Saturation splits the
//! groupification into free and torsion parts, computes the Hilbert basis of
//! the rational cone on the free side and adds back the whole torsion
//! subgroup.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cone::{cone_hilbert_basis, facet_data, Cone, ConeError};
use crate::lattice::{
    dot, is_zero_vec, kernel_basis, quotient_group, smith_normal_form, subgroup, subgroup_coords,
    FgAbelianGroup, GroupMap, IntMatrix, IntVector, LatticeError, Quotient, Subgroup,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MonoidError {
    #[error("cone contains a line; quotient by the units first")]
    NotStronglyConvex,
    #[error("monoid is not saturated")]
    NotSaturated,
    #[error("generator {0} of the source is not sent into the target monoid")]
    NotInMonoid(usize),
    #[error("the two homomorphisms have different sources")]
    SourceMismatch,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

impl From<ConeError> for MonoidError {
    fn from(e: ConeError) -> Self {
        match e {
            ConeError::NotStronglyConvex => MonoidError::NotStronglyConvex,
            ConeError::DimensionMismatch { expected, found } => {
                MonoidError::Lattice(LatticeError::DimensionMismatch(format!(
                    "vector of length {found} in a lattice of rank {expected}"
                )))
            }
        }
    }
}

/// Finitely generated submonoid of a finitely generated abelian group.
///
/// Generators are kept in canonical form: reduced, nonzero, deduplicated and
/// sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FineMonoid {
    ambient: FgAbelianGroup,
    generators: Vec<IntVector>,
}

impl FineMonoid {
    pub fn new(ambient: FgAbelianGroup, generators: Vec<IntVector>) -> Result<Self, MonoidError> {
        let n = ambient.coords();
        if let Some(g) = generators.iter().find(|g| g.len() != n) {
            return Err(LatticeError::DimensionMismatch(format!(
                "generator of length {} in a group with {n} coordinates",
                g.len()
            ))
            .into());
        }
        let set: BTreeSet<IntVector> = generators
            .iter()
            .map(|g| ambient.reduced(g))
            .filter(|g| !is_zero_vec(g))
            .collect();
        Ok(FineMonoid {
            ambient,
            generators: set.into_iter().collect(),
        })
    }

    /// `N^n` inside `Z^n`.
    pub fn free(n: usize) -> Self {
        let g = FgAbelianGroup::free(n);
        let gens = (0..n).map(|i| g.unit(i)).collect();
        FineMonoid::new(g, gens).expect("standard basis")
    }

    /// Submonoid of `Z` generated by the given integers.
    pub fn numerical(generators: &[i64]) -> Self {
        FineMonoid::new(
            FgAbelianGroup::free(1),
            generators.iter().map(|&a| vec![BigInt::from(a)]).collect(),
        )
        .expect("one coordinate")
    }

    pub fn ambient(&self) -> &FgAbelianGroup {
        &self.ambient
    }

    pub fn generators(&self) -> &[IntVector] {
        &self.generators
    }

    /// The groupification `P^gp` as a subgroup of the ambient group.
    pub fn groupification(&self) -> Subgroup {
        subgroup(&self.ambient, &self.generators)
    }

    /// Whether `x` is a sum of generators.
    pub fn contains(&self, x: &[BigInt]) -> bool {
        Structure::of(self).contains(x)
    }
}

/// Free/torsion split of `P^gp` together with the cone data of `P`.
struct Structure {
    gp: Subgroup,
    /// Generators in `P^gp` coordinates.
    coords: Vec<IntVector>,
    free_rank: usize,
    facets: Vec<IntVector>,
    lineality: Vec<IntVector>,
}

impl Structure {
    fn of(p: &FineMonoid) -> Structure {
        Structure::within(p, p.groupification())
    }

    /// Cone data of `p` relative to a subgroup `gp` of the ambient group that
    /// contains every generator and lies in their rational span up to torsion.
    fn within(p: &FineMonoid, gp: Subgroup) -> Structure {
        let free_rank = gp.group.free_rank;
        let coords: Vec<IntVector> = p
            .generators
            .iter()
            .map(|g| subgroup_coords(&gp, g).expect("generator lies in the group"))
            .collect();
        let proj: Vec<IntVector> = coords.iter().map(|c| c[..free_rank].to_vec()).collect();
        let (eqs, facets) = facet_data(&proj, free_rank);
        let mut constraints = facets.clone();
        constraints.extend(eqs);
        let lineality = if constraints.is_empty() {
            (0..free_rank)
                .map(|i| FgAbelianGroup::free(free_rank).unit(i))
                .collect()
        } else {
            kernel_basis(&IntMatrix::from_rows(constraints, free_rank).expect("width"))
        };
        Structure {
            gp,
            coords,
            free_rank,
            facets,
            lineality,
        }
    }

    fn is_unit_coord(&self, c: &[BigInt]) -> bool {
        self.facets
            .iter()
            .all(|f| dot(f, &c[..self.free_rank]).is_zero())
    }

    fn contains(&self, x: &[BigInt]) -> bool {
        let Some(y) = subgroup_coords(&self.gp, x) else {
            return false;
        };
        let (units, others): (Vec<&IntVector>, Vec<&IntVector>) =
            self.coords.iter().partition(|c| self.is_unit_coord(c));
        let units: Vec<IntVector> = units.into_iter().cloned().collect();
        let q: Quotient = quotient_group(&self.gp.group, &units);
        let target = q.project(&y);
        let gens: Vec<IntVector> = others.iter().map(|c| q.project(c)).collect();
        let fr = q.group.free_rank;
        let free_parts: Vec<IntVector> = gens.iter().map(|g| g[..fr].to_vec()).collect();
        let (eqs, facets) = facet_data(&free_parts, fr);
        let weight: IntVector = facets.iter().fold(vec![BigInt::zero(); fr], |acc, f| {
            crate::lattice::add_vec(&acc, f)
        });
        let in_cone = |z: &[BigInt]| {
            let zf = &z[..fr];
            eqs.iter().all(|e| dot(e, zf).is_zero())
                && facets.iter().all(|f| !dot(f, zf).is_negative())
        };
        let mut memo: HashMap<IntVector, bool> = HashMap::new();
        reachable(&target, &gens, &q.group, &weight, fr, &in_cone, &mut memo)
    }
}

fn reachable(
    z: &IntVector,
    gens: &[IntVector],
    group: &FgAbelianGroup,
    weight: &[BigInt],
    fr: usize,
    in_cone: &dyn Fn(&[BigInt]) -> bool,
    memo: &mut HashMap<IntVector, bool>,
) -> bool {
    if is_zero_vec(z) {
        return true;
    }
    if let Some(&known) = memo.get(z) {
        return known;
    }
    let deg = dot(weight, &z[..fr]);
    let mut result = false;
    if deg.is_positive() && in_cone(z) {
        for g in gens {
            let rest = group.reduced(&crate::lattice::sub_vec(z, g));
            if in_cone(&rest) && reachable(&rest, gens, group, weight, fr, in_cone, memo) {
                result = true;
                break;
            }
        }
    }
    memo.insert(z.clone(), result);
    result
}

/// Outcome of [`saturate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SaturationReport {
    pub saturated: FineMonoid,
    /// Order of the torsion subgroup of `P^gp`.
    pub torsion_order: BigInt,
    /// Rank of the group of units of the saturation modulo torsion.
    pub unit_rank: usize,
    /// Generators of the saturation that do not lie in the input monoid.
    pub added: Vec<IntVector>,
    /// Re-saturating the result returned the same monoid.
    pub idempotent: bool,
}

fn saturate_generators(s: &Structure) -> (Vec<IntVector>, BigInt, usize) {
    let f = s.free_rank;
    let l = s.lineality.len();
    let group = &s.gp.group;
    let mut gens_gp: Vec<IntVector> = Vec::new();
    let extend = |free: IntVector| -> IntVector {
        let mut v = free;
        v.extend(std::iter::repeat_n(
            BigInt::zero(),
            group.torsion_orders.len(),
        ));
        v
    };
    // Unimodular coordinates whose first l basis vectors span the lineality space.
    let (to_new, to_old) = if l == 0 {
        (IntMatrix::identity(f), IntMatrix::identity(f))
    } else {
        let snf = smith_normal_form(&IntMatrix::from_columns(&s.lineality, f).expect("width"));
        (snf.u, snf.u_inv)
    };
    for j in 0..l {
        let b = to_old.column(j);
        gens_gp.push(extend(b.iter().map(|x| -x).collect()));
        gens_gp.push(extend(b));
    }
    let pointed: Vec<IntVector> = s
        .coords
        .iter()
        .map(|c| to_new.mul_vec(&c[..f])[l..].to_vec())
        .collect();
    let cone = Cone::new(f - l, &pointed).expect("cone modulo its lineality is pointed");
    for h in cone_hilbert_basis(&cone) {
        let mut y = vec![BigInt::zero(); l];
        y.extend(h);
        gens_gp.push(extend(to_old.mul_vec(&y)));
    }
    for j in 0..group.torsion_orders.len() {
        gens_gp.push(group.unit(f + j));
    }
    let ambient_gens = gens_gp.iter().map(|g| s.gp.inclusion.apply(g)).collect();
    (ambient_gens, group.torsion_order(), l)
}

/// The subgroup `{g ∈ A : n g ∈ P^gp for some n ≥ 1}` of the ambient group `A`.
fn ambient_saturation(p: &FineMonoid) -> Subgroup {
    let a = &p.ambient;
    let f = a.free_rank;
    let free_parts: Vec<IntVector> = p.generators.iter().map(|g| g[..f].to_vec()).collect();
    let mut gens: Vec<IntVector> = crate::lattice::saturate_subgroup(&free_parts, f)
        .into_iter()
        .map(|mut v| {
            v.extend(std::iter::repeat_n(BigInt::zero(), a.torsion_orders.len()));
            v
        })
        .collect();
    gens.extend((0..a.torsion_orders.len()).map(|j| a.unit(f + j)));
    subgroup(a, &gens)
}

/// `P^sat = {g ∈ P^gp : n g ∈ P for some n ≥ 1}`.
pub fn saturate(p: &FineMonoid) -> SaturationReport {
    report(p, saturate_generators(&Structure::of(p)))
}

/// Saturation relative to the ambient group: `{g ∈ A : n g ∈ P for some n ≥ 1}`.
///
/// This is the normalization of `P` when `P^gp` has finite index in the
/// lattice it spans inside `A`.
pub fn saturate_in_ambient(p: &FineMonoid) -> SaturationReport {
    report(
        p,
        saturate_generators(&Structure::within(p, ambient_saturation(p))),
    )
}

fn report(p: &FineMonoid, data: (Vec<IntVector>, BigInt, usize)) -> SaturationReport {
    let (gens, _, unit_rank) = data;
    let saturated = FineMonoid::new(p.ambient.clone(), gens).expect("same ambient");
    let torsion_order = saturated.groupification().group.torsion_order();
    let (again, _, _) = saturate_generators(&Structure::of(&saturated));
    let again = FineMonoid::new(p.ambient.clone(), again).expect("same ambient");
    let structure = Structure::of(p);
    let added = saturated
        .generators
        .iter()
        .filter(|g| !structure.contains(g))
        .cloned()
        .collect();
    SaturationReport {
        idempotent: again == saturated,
        saturated,
        torsion_order,
        unit_rank,
        added,
    }
}

pub fn is_saturated(p: &FineMonoid) -> bool {
    let structure = Structure::of(p);
    let (gens, _, _) = saturate_generators(&structure);
    gens.iter().all(|g| structure.contains(g))
}

/// Whether `P` equals its saturation relative to the ambient group.
pub fn is_saturated_in_ambient(p: &FineMonoid) -> bool {
    let (gens, _, _) = saturate_generators(&Structure::within(p, ambient_saturation(p)));
    let structure = Structure::of(p);
    gens.iter().all(|g| structure.contains(g))
}

/// Minimal generating set of `cone(generators) ∩ Z^rank`, sorted.
pub fn hilbert_basis(
    cone_generators: &[IntVector],
    lattice_rank: usize,
) -> Result<Vec<IntVector>, MonoidError> {
    let cone = Cone::new(lattice_rank, cone_generators)?;
    Ok(cone_hilbert_basis(&cone))
}

/// Homomorphism of fine monoids, given by a homomorphism of ambient groups.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonoidHom {
    pub source: FineMonoid,
    pub target: FineMonoid,
    pub group_map: GroupMap,
}

impl MonoidHom {
    pub fn new(
        source: FineMonoid,
        target: FineMonoid,
        matrix: IntMatrix,
    ) -> Result<Self, MonoidError> {
        let group_map = GroupMap::new(source.ambient.clone(), target.ambient.clone(), matrix)?;
        let structure = Structure::of(&target);
        for (i, g) in source.generators.iter().enumerate() {
            if !structure.contains(&group_map.apply(g)) {
                return Err(MonoidError::NotInMonoid(i));
            }
        }
        Ok(MonoidHom {
            source,
            target,
            group_map,
        })
    }

    pub fn apply(&self, x: &[BigInt]) -> IntVector {
        self.group_map.apply(x)
    }
}

/// The fs pushout together with the structure maps out of the two legs'
/// ambient groups.
#[derive(Clone, Debug)]
pub struct Pushout {
    pub report: SaturationReport,
    pub from_p: GroupMap,
    pub from_q: GroupMap,
    /// Column `i` lifts basis element `i` of the pushout group to the
    /// direct sum of the two ambient groups.
    pub lift: IntMatrix,
}

/// fs pushout `P ⊕_R Q` for `f: R → P` and `g: R → Q`, with its structure maps.
pub fn fs_pushout_with_maps(f: &MonoidHom, g: &MonoidHom) -> Result<Pushout, MonoidError> {
    if f.source != g.source {
        return Err(MonoidError::SourceMismatch);
    }
    let a = &f.target.ambient;
    let b = &g.target.ambient;
    let (na, nb) = (a.coords(), b.coords());
    let mut relations = Vec::new();
    for c in a.relation_columns() {
        let mut r = c;
        r.extend(std::iter::repeat_n(BigInt::zero(), nb));
        relations.push(r);
    }
    for c in b.relation_columns() {
        let mut r = vec![BigInt::zero(); na];
        r.extend(c);
        relations.push(r);
    }
    for r in f.source.generators() {
        let mut rel = f.group_map.matrix.mul_vec(r);
        rel.extend(g.group_map.matrix.mul_vec(r).into_iter().map(|x| -x));
        relations.push(rel);
    }
    let q = Quotient::of_presentation(na + nb, &relations);
    let columns = |range: std::ops::Range<usize>| -> IntMatrix {
        let cols: Vec<IntVector> = range
            .map(|j| q.group.reduced(&q.projection.column(j)))
            .collect();
        IntMatrix::from_columns(&cols, q.group.coords()).expect("width")
    };
    let from_p = GroupMap::new(a.clone(), q.group.clone(), columns(0..na))?;
    let from_q = GroupMap::new(b.clone(), q.group.clone(), columns(na..na + nb))?;
    let mut gens: Vec<IntVector> = f
        .target
        .generators()
        .iter()
        .map(|x| from_p.apply(x))
        .collect();
    gens.extend(g.target.generators().iter().map(|x| from_q.apply(x)));
    let image = FineMonoid::new(q.group.clone(), gens)?;
    Ok(Pushout {
        report: saturate(&image),
        from_p,
        from_q,
        lift: q.section,
    })
}

pub fn fs_pushout(f: &MonoidHom, g: &MonoidHom) -> Result<SaturationReport, MonoidError> {
    Ok(fs_pushout_with_maps(f, g)?.report)
}

/// Like [`fs_pushout`], but requires the result to be sharp up to torsion.
pub fn fs_pushout_sharp(f: &MonoidHom, g: &MonoidHom) -> Result<SaturationReport, MonoidError> {
    let report = fs_pushout(f, g)?;
    if report.unit_rank > 0 {
        return Err(MonoidError::NotStronglyConvex);
    }
    Ok(report)
}

/// Number of connected components of `Spec k[P]` over an algebraically
/// closed field of characteristic zero: `|torsion(P^gp)|` for fs `P`.
pub fn spec_component_count(
    p: &FineMonoid,
    require_saturated: bool,
) -> Result<BigInt, MonoidError> {
    if require_saturated && !is_saturated(p) {
        return Err(MonoidError::NotSaturated);
    }
    Ok(p.groupification().group.torsion_order())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::ivec;

    fn times(r: i64) -> MonoidHom {
        MonoidHom::new(
            FineMonoid::free(1),
            FineMonoid::free(1),
            IntMatrix::from_i64(&[&[r]]),
        )
        .unwrap()
    }

    #[test]
    fn numerical_semigroup_saturates_to_n() {
        let p = FineMonoid::numerical(&[2, 3]);
        assert!(!is_saturated(&p));
        let rep = saturate(&p);
        assert_eq!(rep.saturated.generators(), &[ivec(&[1])]);
        assert_eq!(rep.added, vec![ivec(&[1])]);
        assert!(rep.idempotent);
        assert!(!p.contains(&ivec(&[1])));
        assert!(p.contains(&ivec(&[7])));
    }

    #[test]
    fn free_monoid_is_saturated() {
        let p = FineMonoid::free(2);
        assert!(is_saturated(&p));
        let rep = saturate(&FineMonoid::free(1));
        assert_eq!(rep.saturated, FineMonoid::free(1));
        assert!(rep.idempotent);
        assert!(rep.added.is_empty());
    }

    #[test]
    fn missing_lattice_point() {
        let p =
            FineMonoid::new(FgAbelianGroup::free(2), vec![ivec(&[1, 0]), ivec(&[1, 2])]).unwrap();
        // the generators form a basis of P^gp, which has index 2 in Z^2
        assert!(is_saturated(&p));
        assert!(!is_saturated_in_ambient(&p));
        let rep = saturate_in_ambient(&p);
        assert_eq!(
            rep.saturated.generators(),
            &[ivec(&[1, 0]), ivec(&[1, 1]), ivec(&[1, 2])]
        );
        assert_eq!(rep.added, vec![ivec(&[1, 1])]);
    }

    #[test]
    fn r_lines() {
        for r in [2, 3, 5] {
            let rep = fs_pushout(&times(r), &times(r)).unwrap();
            assert_eq!(rep.torsion_order, BigInt::from(r));
            assert_eq!(
                spec_component_count(&rep.saturated, true).unwrap(),
                BigInt::from(r)
            );
        }
    }

    #[test]
    fn coproduct_and_diagonal() {
        let zero = FineMonoid::free(0);
        let f = MonoidHom::new(zero.clone(), FineMonoid::free(1), IntMatrix::zeros(1, 0)).unwrap();
        let rep = fs_pushout(&f, &f).unwrap();
        assert_eq!(rep.saturated.generators().len(), 2);
        assert_eq!(rep.torsion_order, BigInt::from(1));

        let diag = MonoidHom::new(
            FineMonoid::free(1),
            FineMonoid::free(2),
            IntMatrix::from_i64(&[&[1], &[1]]),
        )
        .unwrap();
        let rep = fs_pushout_sharp(&diag, &times(1)).unwrap();
        assert_eq!(rep.saturated.ambient(), &FgAbelianGroup::free(2));
        assert_eq!(rep.saturated.generators().len(), 2);
        assert!(is_saturated(&rep.saturated));
    }

    #[test]
    fn units_are_handled() {
        // N^2 pushed out with Z along the diagonal: N ⊕ Z
        let p = FineMonoid::new(
            FgAbelianGroup::free(2),
            vec![ivec(&[1, 0]), ivec(&[0, 1]), ivec(&[0, -1])],
        )
        .unwrap();
        let rep = saturate(&p);
        assert_eq!(rep.unit_rank, 1);
        assert!(rep.idempotent);
        assert!(p.contains(&ivec(&[3, -7])));
        assert!(!p.contains(&ivec(&[-1, 0])));
    }

    #[test]
    fn hom_validation() {
        let bad = MonoidHom::new(
            FineMonoid::free(1),
            FineMonoid::numerical(&[2, 3]),
            IntMatrix::from_i64(&[&[1]]),
        );
        assert_eq!(bad, Err(MonoidError::NotInMonoid(0)));
    }

    #[test]
    fn hilbert_basis_rejects_lines() {
        assert_eq!(
            hilbert_basis(&[ivec(&[1, 0]), ivec(&[-1, 0])], 2),
            Err(MonoidError::NotStronglyConvex)
        );
    }
}
