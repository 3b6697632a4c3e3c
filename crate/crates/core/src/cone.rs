//! Rational polyhedral cones in a lattice `Z^n`.
//!
//! A [`Cone`] is stored by its extremal rays together with its facet
//! normals and the equations of its linear span, all computed exactly.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{
    coordinates_in, dot, hermite_rows, is_zero_vec, kernel_basis, primitive, saturate_subgroup,
    smith_normal_form, sub_vec, IntMatrix, IntVector,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConeError {
    #[error("cone contains a line")]
    NotStronglyConvex,
    #[error("vector of length {found} in a lattice of rank {expected}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub(crate) fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

fn rank_of(rows: &[IntVector], width: usize) -> usize {
    if rows.is_empty() {
        return 0;
    }
    IntMatrix::from_rows(rows.to_vec(), width)
        .expect("uniform width")
        .rank()
}

/// Equations of the linear span and inward facet normals of `cone(gens)`.
///
/// Works for cones with lineality as well. Facet normals are primitive and
/// lie in the rational span of the generators, which makes them canonical.
pub(crate) fn facet_data(gens: &[IntVector], n: usize) -> (Vec<IntVector>, Vec<IntVector>) {
    let gens: Vec<IntVector> = gens.iter().filter(|g| !is_zero_vec(g)).cloned().collect();
    let equations = if gens.is_empty() {
        (0..n)
            .map(|i| {
                let mut e = vec![BigInt::zero(); n];
                e[i] = BigInt::one();
                e
            })
            .collect()
    } else {
        let g = IntMatrix::from_rows(gens.clone(), n).expect("uniform width");
        hermite_rows(&kernel_basis(&g), n)
    };
    let dim = n - equations.len();
    let mut facets = BTreeSet::new();
    if dim == 0 {
        return (equations, Vec::new());
    }
    for subset in subsets(gens.len(), dim - 1) {
        let mut rows: Vec<IntVector> = subset.iter().map(|&i| gens[i].clone()).collect();
        if rank_of(&rows, n) != dim - 1 {
            continue;
        }
        rows.extend(equations.iter().cloned());
        let m = IntMatrix::from_rows(rows, n).expect("uniform width");
        let ker = kernel_basis(&m);
        debug_assert_eq!(ker.len(), 1);
        let y = primitive(&ker[0]);
        let values: Vec<BigInt> = gens.iter().map(|g| dot(g, &y)).collect();
        let pos = values.iter().any(|v| v.is_positive());
        let neg = values.iter().any(|v| v.is_negative());
        match (pos, neg) {
            (true, false) => {
                facets.insert(y);
            }
            (false, true) => {
                facets.insert(y.iter().map(|x| -x).collect::<IntVector>());
            }
            _ => {}
        }
    }
    (equations, facets.into_iter().collect())
}

/// A strongly convex rational polyhedral cone.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cone {
    lattice_rank: usize,
    rays: Vec<IntVector>,
    facets: Vec<IntVector>,
    equations: Vec<IntVector>,
}

impl Cone {
    /// The cone generated by `generators`. Zero vectors are ignored; the
    /// stored rays are the primitive extremal generators in lexicographic
    /// order.
    pub fn new(lattice_rank: usize, generators: &[IntVector]) -> Result<Cone, ConeError> {
        for g in generators {
            if g.len() != lattice_rank {
                return Err(ConeError::DimensionMismatch {
                    expected: lattice_rank,
                    found: g.len(),
                });
            }
        }
        let prims: BTreeSet<IntVector> = generators
            .iter()
            .filter(|g| !is_zero_vec(g))
            .map(|g| primitive(g))
            .collect();
        let prims: Vec<IntVector> = prims.into_iter().collect();
        let (equations, facets) = facet_data(&prims, lattice_rank);
        let dim = lattice_rank - equations.len();
        let mut constraint_rows = facets.clone();
        constraint_rows.extend(equations.iter().cloned());
        if rank_of(&constraint_rows, lattice_rank) < lattice_rank {
            return Err(ConeError::NotStronglyConvex);
        }
        let rays: Vec<IntVector> = prims
            .into_iter()
            .filter(|r| {
                let tight: Vec<IntVector> = facets
                    .iter()
                    .filter(|f| dot(f, r).is_zero())
                    .cloned()
                    .collect();
                rank_of(&tight, lattice_rank) + 1 == dim
            })
            .collect();
        Ok(Cone {
            lattice_rank,
            rays,
            facets,
            equations,
        })
    }

    pub fn from_i64(lattice_rank: usize, generators: &[&[i64]]) -> Result<Cone, ConeError> {
        let gens: Vec<IntVector> = generators.iter().map(|g| crate::lattice::ivec(g)).collect();
        Cone::new(lattice_rank, &gens)
    }

    pub fn zero(lattice_rank: usize) -> Cone {
        Cone::new(lattice_rank, &[]).expect("zero cone")
    }

    /// The positive orthant of `Z^n`.
    pub fn orthant(n: usize) -> Cone {
        let gens: Vec<IntVector> = (0..n)
            .map(|i| {
                let mut e = vec![BigInt::zero(); n];
                e[i] = BigInt::one();
                e
            })
            .collect();
        Cone::new(n, &gens).expect("orthant")
    }

    /// `{x : a·x ≥ 0 for a in inequalities, e·x = 0 for e in equations}`.
    pub fn from_inequalities(
        lattice_rank: usize,
        inequalities: &[IntVector],
        equations: &[IntVector],
    ) -> Result<Cone, ConeError> {
        let mut dual_gens = inequalities.to_vec();
        for e in equations {
            dual_gens.push(e.clone());
            dual_gens.push(e.iter().map(|x| -x).collect());
        }
        if lattice_rank == 0 {
            return Ok(Cone::zero(0));
        }
        let (dual_eqs, dual_facets) = facet_data(&dual_gens, lattice_rank);
        if !dual_eqs.is_empty() {
            return Err(ConeError::NotStronglyConvex);
        }
        Cone::new(lattice_rank, &dual_facets)
    }

    pub fn lattice_rank(&self) -> usize {
        self.lattice_rank
    }

    pub fn dim(&self) -> usize {
        self.lattice_rank - self.equations.len()
    }

    pub fn rays(&self) -> &[IntVector] {
        &self.rays
    }

    pub fn facets(&self) -> &[IntVector] {
        &self.facets
    }

    /// Basis of the annihilator of the linear span.
    pub fn equations(&self) -> &[IntVector] {
        &self.equations
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn is_simplicial(&self) -> bool {
        self.rays.len() == self.dim()
    }

    pub fn in_span(&self, x: &[BigInt]) -> bool {
        self.equations.iter().all(|e| dot(e, x).is_zero())
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        self.in_span(x) && self.facets.iter().all(|f| !dot(f, x).is_negative())
    }

    pub fn contains_cone(&self, other: &Cone) -> bool {
        other.rays.iter().all(|r| self.contains(r))
    }

    pub fn in_relative_interior(&self, x: &[BigInt]) -> bool {
        self.in_span(x) && self.facets.iter().all(|f| dot(f, x).is_positive())
    }

    /// Indices of rays lying on every facet that is tight at `x`.
    fn tight_rays(&self, x: &[BigInt]) -> Vec<usize> {
        let tight: Vec<&IntVector> = self.facets.iter().filter(|f| dot(f, x).is_zero()).collect();
        (0..self.rays.len())
            .filter(|&i| tight.iter().all(|f| dot(f, &self.rays[i]).is_zero()))
            .collect()
    }

    /// The smallest face containing `x`, as indices into [`Cone::rays`].
    pub fn minimal_face_of(&self, x: &[BigInt]) -> Option<Vec<usize>> {
        self.contains(x).then(|| self.tight_rays(x))
    }

    /// The face spanned by a subset of rays.
    pub fn sub_cone(&self, ray_indices: &[usize]) -> Cone {
        let gens: Vec<IntVector> = ray_indices.iter().map(|&i| self.rays[i].clone()).collect();
        Cone::new(self.lattice_rank, &gens).expect("subcone of a strongly convex cone")
    }

    /// All faces, including the zero face and the cone itself, as sorted
    /// ray-index sets ordered by dimension and then lexicographically.
    pub fn face_indices(&self) -> Vec<Vec<usize>> {
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let all: Vec<usize> = (0..self.rays.len()).collect();
        let mut stack = vec![all.clone()];
        seen.insert(all);
        while let Some(face) = stack.pop() {
            for f in &self.facets {
                let next: Vec<usize> = face
                    .iter()
                    .copied()
                    .filter(|&i| dot(f, &self.rays[i]).is_zero())
                    .collect();
                if seen.insert(next.clone()) {
                    stack.push(next);
                }
            }
        }
        let mut faces: Vec<(usize, Vec<usize>)> = seen
            .into_iter()
            .map(|s| (self.sub_cone(&s).dim(), s))
            .collect();
        faces.sort();
        faces.into_iter().map(|(_, s)| s).collect()
    }

    pub fn faces(&self) -> Vec<Cone> {
        self.face_indices()
            .iter()
            .map(|s| self.sub_cone(s))
            .collect()
    }

    /// Whether `other` is a face of this cone.
    pub fn has_face(&self, other: &Cone) -> bool {
        if other.lattice_rank != self.lattice_rank || !self.contains_cone(other) {
            return false;
        }
        let interior_point: IntVector = other
            .rays
            .iter()
            .fold(vec![BigInt::zero(); self.lattice_rank], |acc, r| {
                crate::lattice::add_vec(&acc, r)
            });
        let face = self.sub_cone(&self.tight_rays(&interior_point));
        face == *other
    }

    /// Basis (rows) of the saturated lattice `span ∩ Z^n`, in Hermite form.
    pub fn intrinsic_basis(&self) -> Vec<IntVector> {
        saturate_subgroup(&self.rays, self.lattice_rank)
    }

    /// Coordinates of `x` in the intrinsic basis, if `x` lies in the span.
    pub fn intrinsic_coordinates(&self, x: &[BigInt]) -> Option<IntVector> {
        let basis = self.intrinsic_basis();
        let m = IntMatrix::from_columns(&basis, self.lattice_rank).expect("basis width");
        coordinates_in(&m, x)
    }

    /// This cone as a full-dimensional cone in `Z^dim` together with the
    /// `n × dim` embedding matrix back into the ambient lattice.
    pub fn intrinsic(&self) -> (Cone, IntMatrix) {
        let basis = self.intrinsic_basis();
        let embed = IntMatrix::from_columns(&basis, self.lattice_rank).expect("basis width");
        let rays: Vec<IntVector> = self
            .rays
            .iter()
            .map(|r| coordinates_in(&embed, r).expect("ray in its own span"))
            .collect();
        (
            Cone::new(self.dim(), &rays).expect("same cone in new coordinates"),
            embed,
        )
    }

    /// Lattice index of the rays of a simplicial cone inside `span ∩ Z^n`.
    pub fn index(&self) -> Option<BigInt> {
        if !self.is_simplicial() {
            return None;
        }
        if self.rays.is_empty() {
            return Some(BigInt::one());
        }
        let m = IntMatrix::from_columns(&self.rays, self.lattice_rank).expect("ray width");
        Some(smith_normal_form(&m).invariant_factors().iter().product())
    }

    pub fn is_unimodular(&self) -> bool {
        self.index().is_some_and(|i| i.is_one())
    }

    /// Image of the cone under an injective linear map.
    pub fn image(&self, matrix: &IntMatrix) -> Cone {
        let rays: Vec<IntVector> = self.rays.iter().map(|r| matrix.mul_vec(r)).collect();
        Cone::new(matrix.rows(), &rays).expect("image of a strongly convex cone")
    }

    /// Intersection with another cone in the same lattice.
    pub fn intersect(&self, other: &Cone) -> Cone {
        let mut ineqs = self.facets.clone();
        ineqs.extend(other.facets.iter().cloned());
        let mut eqs = self.equations.clone();
        eqs.extend(other.equations.iter().cloned());
        intersect_constraints(self.lattice_rank, &ineqs, &eqs)
    }

    /// Intersection with the linear span of another cone.
    pub fn intersect_span(&self, other: &Cone) -> Cone {
        let mut eqs = self.equations.clone();
        eqs.extend(other.equations.iter().cloned());
        intersect_constraints(self.lattice_rank, &self.facets, &eqs)
    }

    /// Placing triangulation using the rays in lexicographic order. Each
    /// simplex is a sorted list of ray indices.
    pub fn triangulation(&self) -> Vec<Vec<usize>> {
        let d = self.dim();
        if d == 0 {
            return vec![Vec::new()];
        }
        let mut initial: Vec<usize> = Vec::new();
        let mut rows: Vec<IntVector> = Vec::new();
        for (i, r) in self.rays.iter().enumerate() {
            rows.push(r.clone());
            if rank_of(&rows, self.lattice_rank) > initial.len() {
                initial.push(i);
            } else {
                rows.pop();
            }
            if initial.len() == d {
                break;
            }
        }
        let mut simplices = vec![initial.clone()];
        let mut placed = initial;
        for v in 0..self.rays.len() {
            if placed.contains(&v) {
                continue;
            }
            let current = self.sub_cone_of_rays(&placed);
            let mut new_simplices = Vec::new();
            for f in current.facets() {
                if !dot(f, &self.rays[v]).is_negative() {
                    continue;
                }
                for s in &simplices {
                    let on_facet: Vec<usize> = s
                        .iter()
                        .copied()
                        .filter(|&i| dot(f, &self.rays[i]).is_zero())
                        .collect();
                    if on_facet.len() == d - 1 {
                        let mut ns = on_facet;
                        ns.push(v);
                        ns.sort();
                        new_simplices.push(ns);
                    }
                }
            }
            simplices.extend(new_simplices);
            placed.push(v);
        }
        simplices.sort();
        simplices
    }

    fn sub_cone_of_rays(&self, idx: &[usize]) -> Cone {
        self.sub_cone(idx)
    }

    /// Volume of the slice `{x ∈ cone : w·x ≤ 1}` of a full-dimensional cone,
    /// in units where the standard simplex has volume 1. The functional `w`
    /// must be positive on every ray.
    pub fn slice_volume(&self, w: &[BigInt]) -> BigRational {
        assert!(
            self.is_full_dimensional(),
            "slice volume of a lower-dimensional cone"
        );
        let mut total = BigRational::zero();
        for s in self.triangulation() {
            let cols: Vec<IntVector> = s.iter().map(|&i| self.rays[i].clone()).collect();
            let det = IntMatrix::from_columns(&cols, self.lattice_rank)
                .expect("square")
                .det()
                .abs();
            let denom: BigInt = cols.iter().map(|r| dot(w, r)).product();
            total += BigRational::new(det, denom);
        }
        total
    }

    /// A functional positive on every nonzero point of the cone.
    pub fn interior_functional(&self) -> IntVector {
        self.facets
            .iter()
            .fold(vec![BigInt::zero(); self.lattice_rank], |acc, f| {
                crate::lattice::add_vec(&acc, f)
            })
    }

    /// Lattice-normalized volume: the sum of simplex indices over any
    /// triangulation by rays.
    pub fn normalized_volume(&self) -> BigInt {
        self.triangulation()
            .iter()
            .map(|s| self.sub_cone(s).index().expect("simplex"))
            .sum()
    }
}

fn intersect_constraints(n: usize, ineqs: &[IntVector], eqs: &[IntVector]) -> Cone {
    // The intersection of strongly convex cones is strongly convex, so the
    // dual cone generated by the constraints is full-dimensional.
    let mut dual_gens = ineqs.to_vec();
    for e in eqs {
        dual_gens.push(e.clone());
        dual_gens.push(e.iter().map(|x| -x).collect());
    }
    let (dual_eqs, dual_facets) = facet_data(&dual_gens, n);
    debug_assert!(dual_eqs.is_empty());
    if dual_eqs.len() == n {
        return Cone::zero(n);
    }
    Cone::new(n, &dual_facets).expect("intersection of strongly convex cones")
}

/// Lattice points `x` with `x = Σ λ_i r_i`, `0 ≤ λ_i < 1`, for a full-rank
/// square matrix of rays (columns).
pub fn fundamental_parallelepiped(rays: &IntMatrix) -> Vec<IntVector> {
    let n = rays.rows();
    let snf = smith_normal_form(rays);
    let factors = snf.invariant_factors();
    assert_eq!(factors.len(), n, "parallelepiped of a singular matrix");
    let det = rays.det();
    let adj = rays.adjugate();
    let mut points = Vec::new();
    let mut z = vec![BigInt::zero(); n];
    loop {
        let x = snf.u_inv.mul_vec(&z);
        // λ = adj x / det; subtract the integer parts
        let num = adj.mul_vec(&x);
        let floors: IntVector = num
            .iter()
            .map(|a| num_integer::Integer::div_floor(a, &det))
            .collect();
        let p = sub_vec(&x, &rays.mul_vec(&floors));
        points.push(p);
        // odometer over Π [0, d_i)
        let mut i = 0;
        loop {
            if i == n {
                points.sort();
                return points;
            }
            z[i] += 1;
            if z[i] < factors[i] {
                break;
            }
            z[i] = BigInt::zero();
            i += 1;
        }
    }
}

/// Hilbert basis of `cone ∩ Z^n` for a strongly convex cone, sorted
/// lexicographically.
pub fn cone_hilbert_basis(cone: &Cone) -> Vec<IntVector> {
    if cone.dim() == 0 {
        return Vec::new();
    }
    let (inner, embed) = cone.intrinsic();
    let mut candidates: BTreeSet<IntVector> = inner.rays().iter().cloned().collect();
    for simplex in inner.triangulation() {
        let cols: Vec<IntVector> = simplex.iter().map(|&i| inner.rays()[i].clone()).collect();
        let m = IntMatrix::from_columns(&cols, inner.dim()).expect("square");
        for p in fundamental_parallelepiped(&m) {
            if !is_zero_vec(&p) {
                candidates.insert(p);
            }
        }
    }
    let candidates: Vec<IntVector> = candidates.into_iter().collect();
    let mut basis: Vec<IntVector> = candidates
        .iter()
        .filter(|x| {
            !candidates
                .iter()
                .any(|y| y != *x && inner.contains(&sub_vec(x, y)))
        })
        .map(|x| embed.mul_vec(x))
        .collect();
    basis.sort();
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::ivec;

    #[test]
    fn quadrant_data() {
        let c = Cone::orthant(2);
        assert_eq!(c.dim(), 2);
        assert_eq!(c.facets(), &[ivec(&[0, 1]), ivec(&[1, 0])]);
        assert_eq!(c.face_indices().len(), 4);
        assert!(c.is_unimodular());
    }

    #[test]
    fn redundant_generators_are_dropped() {
        let c = Cone::from_i64(2, &[&[1, 0], &[1, 1], &[0, 2], &[2, 2]]).unwrap();
        assert_eq!(c.rays(), &[ivec(&[0, 1]), ivec(&[1, 0])]);
    }

    #[test]
    fn lines_are_rejected() {
        assert_eq!(
            Cone::from_i64(1, &[&[1], &[-1]]),
            Err(ConeError::NotStronglyConvex)
        );
        assert_eq!(
            Cone::from_i64(2, &[&[1, 0], &[-1, 0], &[0, 1]]),
            Err(ConeError::NotStronglyConvex)
        );
    }

    #[test]
    fn non_full_dimensional_cone() {
        let c = Cone::from_i64(3, &[&[1, 0, 1], &[0, 1, 0]]).unwrap();
        assert_eq!(c.dim(), 2);
        assert!(c.contains(&ivec(&[2, 3, 2])));
        assert!(!c.contains(&ivec(&[2, 3, 1])));
        assert!(c.is_unimodular());
        let (inner, embed) = c.intrinsic();
        assert_eq!(inner.dim(), 2);
        assert_eq!(embed.cols(), 2);
    }

    #[test]
    fn index_of_non_unimodular_cone() {
        let c = Cone::from_i64(2, &[&[1, 0], &[1, 2]]).unwrap();
        assert_eq!(c.index(), Some(BigInt::from(2)));
        assert_eq!(
            fundamental_parallelepiped(&IntMatrix::from_i64(&[&[1, 1], &[0, 2]])).len(),
            2
        );
    }

    #[test]
    fn hilbert_basis_examples() {
        let c = Cone::from_i64(2, &[&[1, 0], &[1, 2]]).unwrap();
        assert_eq!(
            cone_hilbert_basis(&c),
            vec![ivec(&[1, 0]), ivec(&[1, 1]), ivec(&[1, 2])]
        );
        let c = Cone::from_i64(2, &[&[0, 1], &[2, -1]]).unwrap();
        assert_eq!(
            cone_hilbert_basis(&c),
            vec![ivec(&[0, 1]), ivec(&[1, 0]), ivec(&[2, -1])]
        );
    }

    #[test]
    fn square_cone_triangulation() {
        let c = Cone::from_i64(3, &[&[1, 0, 1], &[0, 1, 1], &[-1, 0, 1], &[0, -1, 1]]).unwrap();
        assert_eq!(c.rays().len(), 4);
        assert_eq!(c.triangulation().len(), 2);
        assert_eq!(c.normalized_volume(), BigInt::from(4));
        assert_eq!(c.face_indices().len(), 10);
    }

    #[test]
    fn intersections() {
        let q = Cone::orthant(2);
        let half = Cone::from_i64(2, &[&[1, 1], &[1, -1]]).unwrap();
        let i = q.intersect(&half);
        assert_eq!(i.rays(), &[ivec(&[1, 0]), ivec(&[1, 1])]);
        let diag = Cone::from_i64(2, &[&[1, 1]]).unwrap();
        assert_eq!(q.intersect_span(&diag), diag);
    }

    #[test]
    fn faces_are_recognized() {
        let q = Cone::orthant(3);
        let f = Cone::from_i64(3, &[&[1, 0, 0], &[0, 0, 1]]).unwrap();
        assert!(q.has_face(&f));
        let g = Cone::from_i64(3, &[&[1, 1, 0]]).unwrap();
        assert!(!q.has_face(&g));
        assert_eq!(q.minimal_face_of(&ivec(&[2, 0, 1])), Some(vec![0, 2]));
    }
}
