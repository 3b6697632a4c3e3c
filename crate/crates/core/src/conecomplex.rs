//! Generalized cone complexes: finite diagrams of rational polyhedral cones
//! glued along face maps, with morphisms, products and subdivisions.
//!
//! Every cone of a complex is stored full-dimensionally in its own lattice
//! `Z^dim`. A face map `σ → τ` is an injective integer matrix identifying the
//! lattice of `σ` with the saturated lattice of a face of `τ`. Self-gluing is
//! expressed by several face maps with the same source and target.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cone::{Cone, ConeError};
use crate::lattice::{
    add_vec, coordinates_in, is_zero_vec, primitive, smith_normal_form, IntMatrix, IntVector,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("cone {0} is not full-dimensional in its lattice")]
    NotFullDimensional(usize),
    #[error("invalid face map {index}: {reason}")]
    InvalidFaceMap { index: usize, reason: String },
    #[error("face {face:?} of cone {cone} is not the image of any face map")]
    NotFaceComplete { cone: usize, face: Vec<IntVector> },
    #[error("not a fan: {0}")]
    NotAFan(String),
    #[error("not a simplicial complex: {0}")]
    NotSimplicial(String),
    #[error("morphism is not compatible with face maps: {0}")]
    NotCompatible(String),
    #[error("vector lies outside the support of the complex")]
    RayOutsideSupport,
    #[error("outside implemented scope: {0}")]
    ScopeExceeded(String),
    #[error("no cone with index {0}")]
    NoSuchCone(usize),
    #[error(transparent)]
    Cone(#[from] ConeError),
}

/// An injective lattice map carrying `source` onto a face of `target`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FaceMap {
    pub source: usize,
    pub target: usize,
    pub matrix: IntMatrix,
}

/// Matrix `M` with `outer · M = inner`, for bases whose spans are nested.
fn relative_matrix(inner: &IntMatrix, outer: &IntMatrix) -> Option<IntMatrix> {
    let cols: Option<Vec<IntVector>> = inner
        .column_vectors()
        .iter()
        .map(|c| coordinates_in(outer, c))
        .collect();
    IntMatrix::from_columns(&cols?, outer.cols()).ok()
}

/// Whether the columns of `m` are a basis of a saturated sublattice.
fn is_saturated_embedding(m: &IntMatrix) -> bool {
    let snf = smith_normal_form(m);
    let f = snf.invariant_factors();
    f.len() == m.cols() && f.iter().all(One::is_one)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralizedConeComplex {
    cones: Vec<Cone>,
    face_maps: Vec<FaceMap>,
}

impl GeneralizedConeComplex {
    /// Validates the data, adds identity maps and closes the face maps under
    /// composition.
    pub fn new(cones: Vec<Cone>, face_maps: Vec<FaceMap>) -> Result<Self, ComplexError> {
        for (i, c) in cones.iter().enumerate() {
            if !c.is_full_dimensional() {
                return Err(ComplexError::NotFullDimensional(i));
            }
        }
        let mut set: BTreeSet<FaceMap> = BTreeSet::new();
        for (index, m) in face_maps.into_iter().enumerate() {
            let bad = |reason: &str| ComplexError::InvalidFaceMap {
                index,
                reason: reason.to_string(),
            };
            let (Some(s), Some(t)) = (cones.get(m.source), cones.get(m.target)) else {
                return Err(bad("unknown cone index"));
            };
            if m.matrix.rows() != t.dim() || m.matrix.cols() != s.dim() {
                return Err(bad("matrix shape does not match cone dimensions"));
            }
            if !is_saturated_embedding(&m.matrix) {
                return Err(bad("matrix is not a saturated lattice embedding"));
            }
            if !t.has_face(&s.image(&m.matrix)) {
                return Err(bad("image is not a face of the target cone"));
            }
            set.insert(m);
        }
        for (i, c) in cones.iter().enumerate() {
            set.insert(FaceMap {
                source: i,
                target: i,
                matrix: IntMatrix::identity(c.dim()),
            });
        }
        loop {
            let maps: Vec<FaceMap> = set.iter().cloned().collect();
            let mut added = false;
            for a in &maps {
                for b in maps.iter().filter(|b| b.source == a.target) {
                    let c = FaceMap {
                        source: a.source,
                        target: b.target,
                        matrix: b.matrix.mul(&a.matrix),
                    };
                    added |= set.insert(c);
                }
            }
            if !added {
                break;
            }
        }
        let complex = GeneralizedConeComplex {
            cones,
            face_maps: set.into_iter().collect(),
        };
        complex.check_face_complete()?;
        Ok(complex)
    }

    fn check_face_complete(&self) -> Result<(), ComplexError> {
        for (t, cone) in self.cones.iter().enumerate() {
            let images: BTreeSet<Cone> = self
                .maps_into(t)
                .map(|m| self.cones[m.source].image(&m.matrix))
                .collect();
            for face in cone.faces() {
                if !images.contains(&face) {
                    return Err(ComplexError::NotFaceComplete {
                        cone: t,
                        face: face.rays().to_vec(),
                    });
                }
            }
        }
        Ok(())
    }

    /// The complex with a single zero cone.
    pub fn point() -> Self {
        GeneralizedConeComplex::new(vec![Cone::zero(0)], Vec::new()).expect("point")
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    pub fn cone(&self, i: usize) -> Result<&Cone, ComplexError> {
        self.cones.get(i).ok_or(ComplexError::NoSuchCone(i))
    }

    pub fn face_maps(&self) -> &[FaceMap] {
        &self.face_maps
    }

    pub fn cone_count(&self) -> usize {
        self.cones.len()
    }

    pub fn face_map_count(&self) -> usize {
        self.face_maps.len()
    }

    /// Number of one-dimensional cones.
    pub fn ray_count(&self) -> usize {
        self.cones.iter().filter(|c| c.dim() == 1).count()
    }

    pub fn dim(&self) -> usize {
        self.cones.iter().map(Cone::dim).max().unwrap_or(0)
    }

    pub fn maps_into(&self, target: usize) -> impl Iterator<Item = &FaceMap> {
        self.face_maps.iter().filter(move |m| m.target == target)
    }

    pub fn maps_from(&self, source: usize) -> impl Iterator<Item = &FaceMap> {
        self.face_maps.iter().filter(move |m| m.source == source)
    }

    pub fn maps_between(&self, source: usize, target: usize) -> Vec<&FaceMap> {
        self.face_maps
            .iter()
            .filter(|m| m.source == source && m.target == target)
            .collect()
    }

    /// Face maps other than identities.
    pub fn proper_face_maps(&self) -> Vec<&FaceMap> {
        self.face_maps
            .iter()
            .filter(|m| m.source != m.target)
            .collect()
    }

    /// Cones not contained in a proper face of another cone.
    pub fn maximal_cones(&self) -> Vec<usize> {
        (0..self.cones.len())
            .filter(|&i| self.maps_from(i).all(|m| m.target == i))
            .collect()
    }

    /// Structural isomorphism: a bijection of cones preserving dimension,
    /// ray count and normalized volume, and the number of face maps between
    /// every ordered pair of cones.
    pub fn is_isomorphic(&self, other: &GeneralizedConeComplex) -> bool {
        if self.cones.len() != other.cones.len() || self.face_maps.len() != other.face_maps.len() {
            return false;
        }
        let key = |c: &Cone| (c.dim(), c.rays().len(), c.normalized_volume());
        let counts = |x: &GeneralizedConeComplex| {
            let mut m: BTreeMap<(usize, usize), usize> = BTreeMap::new();
            for f in &x.face_maps {
                *m.entry((f.source, f.target)).or_default() += 1;
            }
            m
        };
        let (ca, cb) = (counts(self), counts(other));
        let ka: Vec<_> = self.cones.iter().map(key).collect();
        let kb: Vec<_> = other.cones.iter().map(key).collect();
        let mut assignment = vec![usize::MAX; self.cones.len()];
        let mut used = vec![false; other.cones.len()];

        fn extend(
            i: usize,
            assignment: &mut Vec<usize>,
            used: &mut Vec<bool>,
            ka: &[(usize, usize, BigInt)],
            kb: &[(usize, usize, BigInt)],
            ca: &BTreeMap<(usize, usize), usize>,
            cb: &BTreeMap<(usize, usize), usize>,
        ) -> bool {
            if i == assignment.len() {
                return true;
            }
            for j in 0..kb.len() {
                if used[j] || ka[i] != kb[j] {
                    continue;
                }
                let consistent = (0..=i).all(|p| {
                    let q = if p == i { j } else { assignment[p] };
                    ca.get(&(p, i)).copied().unwrap_or(0) == cb.get(&(q, j)).copied().unwrap_or(0)
                        && ca.get(&(i, p)).copied().unwrap_or(0)
                            == cb.get(&(j, q)).copied().unwrap_or(0)
                });
                if !consistent {
                    continue;
                }
                assignment[i] = j;
                used[j] = true;
                if extend(i + 1, assignment, used, ka, kb, ca, cb) {
                    return true;
                }
                used[j] = false;
            }
            assignment[i] = usize::MAX;
            false
        }
        extend(0, &mut assignment, &mut used, &ka, &kb, &ca, &cb)
    }
}

/// All faces of a family of cones in a common lattice, as a complex whose
/// face maps are the inclusions. Cones are sorted by dimension, then rays.
fn complex_of_embedded_cones(cones: &BTreeSet<(usize, Cone)>) -> GeneralizedConeComplex {
    let list: Vec<&Cone> = cones.iter().map(|(_, c)| c).collect();
    let bases: Vec<IntMatrix> = list
        .iter()
        .map(|c| {
            IntMatrix::from_columns(&c.intrinsic_basis(), c.lattice_rank()).expect("basis width")
        })
        .collect();
    let intrinsic: Vec<Cone> = list.iter().map(|c| c.intrinsic().0).collect();
    let mut maps = Vec::new();
    for (i, f) in list.iter().enumerate() {
        for (j, g) in list.iter().enumerate() {
            if i != j && g.has_face(f) {
                maps.push(FaceMap {
                    source: i,
                    target: j,
                    matrix: relative_matrix(&bases[i], &bases[j]).expect("nested spans"),
                });
            }
        }
    }
    GeneralizedConeComplex::new(intrinsic, maps).expect("faces of a fan form a complex")
}

/// Complex of a fan in `Z^rank` given by rays and maximal cones.
pub fn from_toric_fan(
    rays: &[IntVector],
    maximal_cones: &[Vec<usize>],
    rank: usize,
) -> Result<GeneralizedConeComplex, ComplexError> {
    let mut maximal = Vec::new();
    for idx in maximal_cones {
        let gens: Result<Vec<IntVector>, ComplexError> = idx
            .iter()
            .map(|&i| {
                rays.get(i)
                    .cloned()
                    .ok_or_else(|| ComplexError::NotAFan(format!("ray index {i} out of range")))
            })
            .collect();
        maximal.push(Cone::new(rank, &gens?)?);
    }
    for (a, s) in maximal.iter().enumerate() {
        for t in &maximal[a + 1..] {
            let meet = s.intersect(t);
            if !s.has_face(&meet) || !t.has_face(&meet) {
                return Err(ComplexError::NotAFan(format!(
                    "cones {:?} and {:?} meet in a non-face",
                    s.rays(),
                    t.rays()
                )));
            }
        }
    }
    let mut all: BTreeSet<(usize, Cone)> = BTreeSet::new();
    all.insert((0, Cone::zero(rank)));
    for c in &maximal {
        for f in c.faces() {
            all.insert((f.dim(), f));
        }
    }
    Ok(complex_of_embedded_cones(&all))
}

/// Complex of an snc pair from the intersection complex of its divisor
/// components: one smooth `k`-dimensional cone per `(k-1)`-simplex and the
/// zero cone. `simplices` lists faces (closed under subsets automatically);
/// every vertex below `vertices` is a component.
pub fn snc_artin_fan(
    vertices: usize,
    simplices: &[Vec<usize>],
) -> Result<GeneralizedConeComplex, ComplexError> {
    let mut faces: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
    faces.insert((0, Vec::new()));
    for v in 0..vertices {
        faces.insert((1, vec![v]));
    }
    for s in simplices {
        let set: BTreeSet<usize> = s.iter().copied().collect();
        if set.len() != s.len() {
            return Err(ComplexError::NotSimplicial(format!(
                "simplex {s:?} repeats a vertex"
            )));
        }
        if let Some(v) = set.iter().find(|&&v| v >= vertices) {
            return Err(ComplexError::NotSimplicial(format!(
                "vertex {v} out of range"
            )));
        }
        let sorted: Vec<usize> = set.into_iter().collect();
        for k in 0..=sorted.len() {
            for sub in crate::cone::subsets(sorted.len(), k) {
                let face: Vec<usize> = sub.iter().map(|&i| sorted[i]).collect();
                faces.insert((face.len(), face));
            }
        }
    }
    let faces: Vec<Vec<usize>> = faces.into_iter().map(|(_, f)| f).collect();
    let cones: Vec<Cone> = faces.iter().map(|f| Cone::orthant(f.len())).collect();
    let mut maps = Vec::new();
    for (i, small) in faces.iter().enumerate() {
        for (j, big) in faces.iter().enumerate() {
            if i == j || !small.iter().all(|v| big.contains(v)) {
                continue;
            }
            let mut m = IntMatrix::zeros(big.len(), small.len());
            for (c, v) in small.iter().enumerate() {
                let r = big.iter().position(|w| w == v).expect("subset");
                m.set(r, c, BigInt::one());
            }
            maps.push(FaceMap {
                source: i,
                target: j,
                matrix: m,
            });
        }
    }
    GeneralizedConeComplex::new(cones, maps)
}

/// The quadrant with both axes glued to a single ray.
pub fn nodal_cubic_complex() -> GeneralizedConeComplex {
    let cones = vec![Cone::zero(0), Cone::orthant(1), Cone::orthant(2)];
    let maps = vec![
        FaceMap {
            source: 0,
            target: 1,
            matrix: IntMatrix::zeros(1, 0),
        },
        FaceMap {
            source: 1,
            target: 2,
            matrix: IntMatrix::from_i64(&[&[1], &[0]]),
        },
        FaceMap {
            source: 1,
            target: 2,
            matrix: IntMatrix::from_i64(&[&[0], &[1]]),
        },
    ];
    GeneralizedConeComplex::new(cones, maps).expect("waffle cone")
}

/// A map of complexes: every source cone goes into a target cone by a
/// lattice map, compatibly with face maps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexMorphism {
    pub source: GeneralizedConeComplex,
    pub target: GeneralizedConeComplex,
    /// For each source cone: target cone index and lattice map.
    pub assignments: Vec<(usize, IntMatrix)>,
}

impl ComplexMorphism {
    pub fn new(
        source: GeneralizedConeComplex,
        target: GeneralizedConeComplex,
        assignments: Vec<(usize, IntMatrix)>,
    ) -> Result<Self, ComplexError> {
        if assignments.len() != source.cones.len() {
            return Err(ComplexError::NotCompatible(format!(
                "{} assignments for {} cones",
                assignments.len(),
                source.cones.len()
            )));
        }
        for (i, (t, m)) in assignments.iter().enumerate() {
            let tc = target.cone(*t)?;
            let sc = &source.cones[i];
            if m.rows() != tc.dim() || m.cols() != sc.dim() {
                return Err(ComplexError::NotCompatible(format!(
                    "cone {i}: matrix shape does not match"
                )));
            }
            if !sc.rays().iter().all(|r| tc.contains(&m.mul_vec(r))) {
                return Err(ComplexError::NotCompatible(format!(
                    "cone {i} is not sent into cone {t}"
                )));
            }
        }
        for f in &source.face_maps {
            let (ts, a_s) = &assignments[f.source];
            let (tt, a_t) = &assignments[f.target];
            let lhs = a_t.mul(&f.matrix);
            let ok = target
                .maps_between(*ts, *tt)
                .iter()
                .any(|g| g.matrix.mul(a_s) == lhs);
            if !ok {
                return Err(ComplexError::NotCompatible(format!(
                    "square for face map {} -> {} does not commute",
                    f.source, f.target
                )));
            }
        }
        Ok(ComplexMorphism {
            source,
            target,
            assignments,
        })
    }

    pub fn identity(f: &GeneralizedConeComplex) -> Self {
        ComplexMorphism {
            source: f.clone(),
            target: f.clone(),
            assignments: f
                .cones
                .iter()
                .enumerate()
                .map(|(i, c)| (i, IntMatrix::identity(c.dim())))
                .collect(),
        }
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &ComplexMorphism) -> Result<ComplexMorphism, ComplexError> {
        let assignments = first
            .assignments
            .iter()
            .map(|(t, m)| {
                let (u, n) = &self.assignments[*t];
                (*u, n.mul(m))
            })
            .collect();
        ComplexMorphism::new(first.source.clone(), self.target.clone(), assignments)
    }
}

/// Product complex with its projections.
#[derive(Clone, Debug)]
pub struct Product {
    pub complex: GeneralizedConeComplex,
    pub first: ComplexMorphism,
    pub second: ComplexMorphism,
}

fn product_cone(a: &Cone, b: &Cone) -> Cone {
    let (da, db) = (a.dim(), b.dim());
    let mut gens = Vec::new();
    for r in a.rays() {
        let mut v = r.clone();
        v.extend(std::iter::repeat_n(BigInt::zero(), db));
        gens.push(v);
    }
    for r in b.rays() {
        let mut v = vec![BigInt::zero(); da];
        v.extend(r.iter().cloned());
        gens.push(v);
    }
    Cone::new(da + db, &gens).expect("product of strongly convex cones")
}

/// Cone `(i, j)` of the product has index `i * |G| + j`.
pub fn product(f: &GeneralizedConeComplex, g: &GeneralizedConeComplex) -> Product {
    let ng = g.cones.len();
    let mut cones = Vec::new();
    for a in &f.cones {
        for b in &g.cones {
            cones.push(product_cone(a, b));
        }
    }
    let mut maps = Vec::new();
    for p in &f.face_maps {
        for q in &g.face_maps {
            maps.push(FaceMap {
                source: p.source * ng + q.source,
                target: p.target * ng + q.target,
                matrix: p.matrix.direct_sum(&q.matrix),
            });
        }
    }
    // faces of a product cone are products of faces, and products of
    // composition-closed map sets containing identities are closed
    let complex = GeneralizedConeComplex {
        cones,
        face_maps: maps
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
    };
    let mut first = Vec::new();
    let mut second = Vec::new();
    for (i, a) in f.cones.iter().enumerate() {
        for (j, b) in g.cones.iter().enumerate() {
            let (da, db) = (a.dim(), b.dim());
            let p1 = IntMatrix::identity(da).direct_sum(&IntMatrix::zeros(0, db));
            let p2 = IntMatrix::zeros(0, da).direct_sum(&IntMatrix::identity(db));
            first.push((i, p1));
            second.push((j, p2));
        }
    }
    Product {
        first: ComplexMorphism {
            source: complex.clone(),
            target: f.clone(),
            assignments: first,
        },
        second: ComplexMorphism {
            source: complex.clone(),
            target: g.clone(),
            assignments: second,
        },
        complex,
    }
}

/// The diagonal morphism `F → F × F`.
pub fn diagonal(f: &GeneralizedConeComplex) -> ComplexMorphism {
    let prod = product(f, f).complex;
    let n = f.cones.len();
    let assignments = f
        .cones
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let id = IntMatrix::identity(c.dim());
            (i * n + i, id.vstack(&id))
        })
        .collect();
    ComplexMorphism {
        source: f.clone(),
        target: prod,
        assignments,
    }
}

/// Per-cone markers of a subdivision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeFlags {
    pub simplicial: bool,
    /// Lattice index of the rays, for simplicial cones.
    pub index: Option<BigInt>,
    pub unimodular: bool,
}

impl ConeFlags {
    fn of(c: &Cone) -> Self {
        let index = c.index();
        ConeFlags {
            simplicial: c.is_simplicial(),
            unimodular: index.as_ref().is_some_and(One::is_one),
            index,
        }
    }
}

/// A refinement of a complex together with the map back to it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subdivision {
    pub refined: GeneralizedConeComplex,
    pub structure_map: ComplexMorphism,
    pub flags: Vec<ConeFlags>,
    /// For each refined cone, its rays in the coordinates of the original
    /// cone it maps to.
    pub rays_in_base: Vec<Vec<IntVector>>,
}

impl Subdivision {
    pub fn all_unimodular(&self) -> bool {
        self.flags.iter().all(|f| f.unimodular)
    }

    /// Refined cones of top dimension inside original cone `base`.
    pub fn maximal_cones_over(&self, base: usize) -> Vec<usize> {
        let d = self.structure_map.target.cones[base].dim();
        (0..self.refined.cones.len())
            .filter(|&i| {
                self.structure_map.assignments[i].0 == base && self.refined.cones[i].dim() == d
            })
            .collect()
    }

    /// Whether every original cone of top dimension has the same normalized
    /// volume as the refined cones covering it.
    pub fn preserves_volume(&self) -> bool {
        let base = &self.structure_map.target;
        base.maximal_cones().iter().all(|&b| {
            let cone = &base.cones[b];
            let w = cone.interior_functional();
            let total: BigRational = self
                .maximal_cones_over(b)
                .iter()
                .map(|&i| {
                    Cone::new(cone.dim(), &self.rays_in_base[i])
                        .expect("refined cone")
                        .slice_volume(&w)
                })
                .sum();
            total == cone.slice_volume(&w)
        })
    }
}

/// Incremental stellar refinement of a complex.
///
/// Each original cone carries a local fan (its maximal cones, in the cone's
/// own coordinates). Stars are propagated along all face maps so the local
/// fans agree on shared faces.
#[derive(Clone, Debug)]
struct Refiner {
    base: GeneralizedConeComplex,
    local: Vec<Vec<Cone>>,
}

impl Refiner {
    fn new(base: &GeneralizedConeComplex) -> Self {
        Refiner {
            local: base.cones.iter().map(|c| vec![c.clone()]).collect(),
            base: base.clone(),
        }
    }

    fn local_cones(&self, c: usize) -> BTreeSet<Cone> {
        self.local[c].iter().flat_map(|m| m.faces()).collect()
    }

    fn is_ray(&self, c: usize, p: &IntVector) -> bool {
        self.local[c].iter().any(|m| m.rays().contains(p))
    }

    fn has_cone(&self, c: usize, cone: &Cone) -> bool {
        self.local[c].iter().any(|m| m.has_face(cone))
    }

    /// Star at the point `v` of cone `c` (in its coordinates).
    fn star(&mut self, c: usize, v: &IntVector) -> Result<bool, ComplexError> {
        let cone = &self.base.cones[c];
        let v = primitive(v);
        if is_zero_vec(&v) {
            return Ok(false);
        }
        let face_idx = cone
            .minimal_face_of(&v)
            .ok_or(ComplexError::RayOutsideSupport)?;
        let face = cone.sub_cone(&face_idx);
        let phi = self
            .base
            .maps_into(c)
            .find(|m| self.base.cones[m.source].image(&m.matrix) == face)
            .cloned()
            .expect("face completeness");
        let tau = phi.source;
        let w = coordinates_in(&phi.matrix, &v).expect("point in the image face");
        if self.is_ray(tau, &w) {
            return Ok(false);
        }
        let mut targets: BTreeMap<(usize, Cone), IntVector> = BTreeMap::new();
        for psi in self.base.maps_from(tau) {
            let image = self.base.cones[tau].image(&psi.matrix);
            let p = psi.matrix.mul_vec(&w);
            if let Some(q) = targets.insert((psi.target, image), p.clone()) {
                if q != p {
                    return Err(ComplexError::ScopeExceeded(
                        "star at a point moved by a self-gluing of its face".into(),
                    ));
                }
            }
        }
        let points: BTreeSet<(usize, IntVector)> =
            targets.into_iter().map(|((t, _), p)| (t, p)).collect();
        for (t, p) in points {
            self.local_star(t, &p);
        }
        Ok(true)
    }

    fn local_star(&mut self, c: usize, p: &IntVector) {
        let rank = self.base.cones[c].dim();
        let mut next = Vec::new();
        for m in &self.local[c] {
            if !m.contains(p) {
                next.push(m.clone());
                continue;
            }
            for f in m.facets() {
                if crate::lattice::dot(f, p).is_zero() {
                    continue;
                }
                let mut gens: Vec<IntVector> = m
                    .rays()
                    .iter()
                    .filter(|r| crate::lattice::dot(f, r).is_zero())
                    .cloned()
                    .collect();
                gens.push(p.clone());
                next.push(Cone::new(rank, &gens).expect("subcone"));
            }
        }
        next.sort();
        next.dedup();
        self.local[c] = next;
    }

    fn is_owned(&self, c: usize, k: &Cone) -> bool {
        let base = &self.base.cones[c];
        let interior = k
            .rays()
            .iter()
            .fold(vec![BigInt::zero(); base.dim()], |acc, r| add_vec(&acc, r));
        base.in_relative_interior(&interior)
    }

    fn finalize(&self) -> Subdivision {
        let mut owned: Vec<(usize, usize, Cone)> = Vec::new();
        for c in 0..self.base.cones.len() {
            for k in self.local_cones(c) {
                if self.is_owned(c, &k) {
                    owned.push((k.dim(), c, k));
                }
            }
        }
        owned.sort();
        let index: BTreeMap<(usize, Cone), usize> = owned
            .iter()
            .enumerate()
            .map(|(i, (_, c, k))| ((*c, k.clone()), i))
            .collect();
        let bases: Vec<IntMatrix> = owned
            .iter()
            .map(|(_, c, k)| {
                IntMatrix::from_columns(&k.intrinsic_basis(), self.base.cones[*c].dim())
                    .expect("basis width")
            })
            .collect();
        let mut maps = Vec::new();
        for (i, (_, c, k)) in owned.iter().enumerate() {
            let base_cone = &self.base.cones[*c];
            for lambda in k.faces() {
                let interior = lambda
                    .rays()
                    .iter()
                    .fold(vec![BigInt::zero(); base_cone.dim()], |acc, r| {
                        add_vec(&acc, r)
                    });
                let face =
                    base_cone.sub_cone(&base_cone.minimal_face_of(&interior).expect("inside"));
                for phi in self.base.maps_into(*c) {
                    let tau = &self.base.cones[phi.source];
                    if tau.image(&phi.matrix) != face {
                        continue;
                    }
                    let pulled: Vec<IntVector> = lambda
                        .rays()
                        .iter()
                        .map(|r| coordinates_in(&phi.matrix, r).expect("in face"))
                        .collect();
                    let pulled = Cone::new(tau.dim(), &pulled).expect("pulled back cone");
                    let j = index[&(phi.source, pulled)];
                    let matrix = relative_matrix(&phi.matrix.mul(&bases[j]), &bases[i])
                        .expect("face lattice inside cone lattice");
                    maps.push(FaceMap {
                        source: j,
                        target: i,
                        matrix,
                    });
                }
            }
        }
        let cones: Vec<Cone> = owned.iter().map(|(_, _, k)| k.intrinsic().0).collect();
        let flags = cones.iter().map(ConeFlags::of).collect();
        let refined = GeneralizedConeComplex::new(cones, maps).expect("refined complex");
        let assignments = owned
            .iter()
            .zip(&bases)
            .map(|((_, c, _), b)| (*c, b.clone()))
            .collect();
        let structure_map = ComplexMorphism {
            source: refined.clone(),
            target: self.base.clone(),
            assignments,
        };
        Subdivision {
            rays_in_base: owned.iter().map(|(_, _, k)| k.rays().to_vec()).collect(),
            refined,
            structure_map,
            flags,
        }
    }
}

/// Stellar subdivision at the ray through `point`, which lies in cone
/// `cone` (given in that cone's coordinates).
pub fn star_subdivision(
    f: &GeneralizedConeComplex,
    cone: usize,
    point: &[BigInt],
) -> Result<Subdivision, ComplexError> {
    let c = f.cone(cone)?;
    if point.len() != c.dim() || is_zero_vec(point) || !c.contains(point) {
        return Err(ComplexError::RayOutsideSupport);
    }
    let mut r = Refiner::new(f);
    r.star(cone, &point.to_vec())?;
    Ok(r.finalize())
}

/// The trivial subdivision of a complex.
pub fn identity_subdivision(f: &GeneralizedConeComplex) -> Subdivision {
    Refiner::new(f).finalize()
}

/// Record of an image cone whose naive insertion would cut its carrier
/// into non-convex pieces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonConvexPiece {
    pub source_cone: usize,
    pub target_cone: usize,
    /// Rays of the image cone in target coordinates.
    pub image_rays: Vec<IntVector>,
    /// Dimension of the smallest face of the target cone containing the image.
    pub carrier_dim: usize,
}

/// Outcome of [`subdivide_along`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlongSubdivision {
    pub subdivision: Subdivision,
    /// Indices of refined cones lying in the image of the morphism.
    pub image_cones: Vec<usize>,
    /// The image cones as a complex.
    pub image_subcomplex: GeneralizedConeComplex,
    /// Naive insertions that would not have been convex.
    pub nonconvex: Vec<NonConvexPiece>,
    /// Source cones of the morphism lift cone-wise to the image subcomplex
    /// and recompose to the original morphism.
    pub factors: bool,
}

const MAX_RESOLUTION_STEPS: usize = 64;

/// Refines the target of `phi` by star subdivisions until the image of every
/// source cone is a union of cones.
///
/// Stars are taken at the image rays first (ordered by target cone, then
/// lexicographically), then at sums of consecutive rays of image 2-cones
/// that are not yet unions of cones.
pub fn subdivide_along(phi: &ComplexMorphism) -> Result<AlongSubdivision, ComplexError> {
    let target = &phi.target;
    for (i, c) in phi.source.cones.iter().enumerate() {
        if c.dim() > 2 {
            return Err(ComplexError::ScopeExceeded(format!(
                "source cone {i} has dimension {} > 2",
                c.dim()
            )));
        }
    }
    for (i, c) in target.cones.iter().enumerate() {
        if c.dim() > 4 || !c.is_simplicial() {
            return Err(ComplexError::ScopeExceeded(format!(
                "target cone {i} is not simplicial of dimension at most 4"
            )));
        }
    }
    let mut images: Vec<(usize, usize, Cone)> = Vec::new();
    for (s, (t, m)) in phi.assignments.iter().enumerate() {
        let sc = &phi.source.cones[s];
        if m.rank() != sc.dim() {
            return Err(ComplexError::ScopeExceeded(format!(
                "morphism is not injective on cone {s}"
            )));
        }
        images.push((s, *t, sc.image(m)));
    }

    let mut nonconvex = Vec::new();
    for (s, t, k) in &images {
        if k.dim() == 0 {
            continue;
        }
        let tc = &target.cones[*t];
        let interior = k
            .rays()
            .iter()
            .fold(vec![BigInt::zero(); tc.dim()], |acc, r| add_vec(&acc, r));
        let carrier = tc.sub_cone(&tc.minimal_face_of(&interior).expect("image inside target"));
        let convex = (carrier.dim() == k.dim() && carrier == *k)
            || (carrier.dim() == k.dim() + 1 && carrier.intersect_span(k) == *k);
        if !convex {
            nonconvex.push(NonConvexPiece {
                source_cone: *s,
                target_cone: *t,
                image_rays: k.rays().to_vec(),
                carrier_dim: carrier.dim(),
            });
        }
    }

    let mut refiner = Refiner::new(target);
    let rays: BTreeSet<(usize, IntVector)> = images
        .iter()
        .flat_map(|(_, t, k)| k.rays().iter().map(move |r| (*t, r.clone())))
        .collect();
    for (t, r) in &rays {
        refiner.star(*t, r)?;
    }
    for (_, t, k) in images.iter().filter(|(_, _, k)| k.dim() == 2) {
        let mut chain: Vec<IntVector> = k.rays().to_vec();
        let mut steps = 0;
        loop {
            let gap = chain.windows(2).position(|w| {
                let piece = Cone::new(k.lattice_rank(), &[w[0].clone(), w[1].clone()])
                    .expect("two independent rays");
                !refiner.has_cone(*t, &piece)
            });
            let Some(i) = gap else { break };
            steps += 1;
            if steps > MAX_RESOLUTION_STEPS {
                return Err(ComplexError::ScopeExceeded(
                    "image cone did not resolve into cones".into(),
                ));
            }
            let mid = primitive(&add_vec(&chain[i], &chain[i + 1]));
            refiner.star(*t, &mid)?;
            chain.insert(i + 1, mid);
        }
    }

    let subdivision = refiner.finalize();
    let image_cones = image_cone_indices(&subdivision, &images);
    let image_subcomplex = subcomplex(&subdivision.refined, &image_cones);
    let factors = factorization(phi, &subdivision, &images, &image_cones).is_some();
    Ok(AlongSubdivision {
        subdivision,
        image_cones,
        image_subcomplex,
        nonconvex,
        factors,
    })
}

fn image_cone_indices(sub: &Subdivision, images: &[(usize, usize, Cone)]) -> Vec<usize> {
    let base = &sub.structure_map.target;
    (0..sub.refined.cones.len())
        .filter(|&i| {
            let c = sub.structure_map.assignments[i].0;
            let rays = &sub.rays_in_base[i];
            images.iter().any(|(_, t, k)| {
                base.maps_between(c, *t)
                    .iter()
                    .any(|psi| rays.iter().all(|r| k.contains(&psi.matrix.mul_vec(r))))
            })
        })
        .collect()
}

/// Full subcomplex on a face-closed set of cones.
pub fn subcomplex(f: &GeneralizedConeComplex, indices: &[usize]) -> GeneralizedConeComplex {
    let pos: BTreeMap<usize, usize> = indices.iter().enumerate().map(|(a, &b)| (b, a)).collect();
    let cones = indices.iter().map(|&i| f.cones[i].clone()).collect();
    let maps = f
        .face_maps
        .iter()
        .filter_map(|m| {
            Some(FaceMap {
                source: *pos.get(&m.source)?,
                target: *pos.get(&m.target)?,
                matrix: m.matrix.clone(),
            })
        })
        .collect();
    GeneralizedConeComplex::new(cones, maps).expect("face-closed subcomplex")
}

/// Lift of `phi` through the image subcomplex, if every source cone lands in
/// a single refined cone and the lift recomposes to `phi`.
fn factorization(
    phi: &ComplexMorphism,
    sub: &Subdivision,
    images: &[(usize, usize, Cone)],
    image_cones: &[usize],
) -> Option<ComplexMorphism> {
    let base = &sub.structure_map.target;
    let image_complex = subcomplex(&sub.refined, image_cones);
    let mut assignments = Vec::new();
    for (s, t, k) in images {
        let a = &phi.assignments[*s].1;
        let mut best: Option<(usize, usize, IntMatrix)> = None;
        for (pos, &i) in image_cones.iter().enumerate() {
            let (c, b) = &sub.structure_map.assignments[i];
            for psi in base.maps_between(*c, *t) {
                let span = psi.matrix.mul(b);
                let Some(m) = relative_matrix(a, &span) else {
                    continue;
                };
                let inside = phi.source.cones[*s]
                    .rays()
                    .iter()
                    .all(|r| sub.refined.cones[i].contains(&m.mul_vec(r)));
                let dim = sub.refined.cones[i].dim();
                if inside && span.mul(&m) == *a && best.as_ref().is_none_or(|(d, _, _)| dim < *d) {
                    best = Some((dim, pos, m));
                }
            }
        }
        let _ = k;
        let (_, pos, m) = best?;
        assignments.push((pos, m));
    }
    ComplexMorphism::new(phi.source.clone(), image_complex, assignments).ok()
}

/// The part of a diagonal subdivision through which the diagonal factors.
pub fn b_subcomplex(_f: &GeneralizedConeComplex, d: &AlongSubdivision) -> GeneralizedConeComplex {
    d.image_subcomplex.clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::ivec;

    fn a1() -> GeneralizedConeComplex {
        from_toric_fan(&[ivec(&[1])], &[vec![0]], 1).unwrap()
    }

    fn a2() -> GeneralizedConeComplex {
        from_toric_fan(&[ivec(&[1, 0]), ivec(&[0, 1])], &[vec![0, 1]], 2).unwrap()
    }

    #[test]
    fn toric_fans() {
        assert_eq!(a1().cone_count(), 2);
        assert_eq!(a2().cone_count(), 4);
        let p1 = from_toric_fan(&[ivec(&[1]), ivec(&[-1])], &[vec![0], vec![1]], 1).unwrap();
        assert_eq!(p1.cone_count(), 3);
        let bad = from_toric_fan(
            &[ivec(&[1, 0]), ivec(&[0, 1]), ivec(&[1, 1]), ivec(&[1, -1])],
            &[vec![0, 1], vec![2, 3]],
            2,
        );
        assert!(matches!(bad, Err(ComplexError::NotAFan(_))));
    }

    #[test]
    fn snc_fans() {
        assert_eq!(snc_artin_fan(1, &[]).unwrap().cone_count(), 2);
        let two = snc_artin_fan(2, &[vec![0, 1]]).unwrap();
        assert_eq!(two.cone_count(), 4);
        assert!(two.is_isomorphic(&a2()));
        assert_eq!(snc_artin_fan(2, &[]).unwrap().cone_count(), 3);
        assert!(matches!(
            snc_artin_fan(2, &[vec![0, 0]]),
            Err(ComplexError::NotSimplicial(_))
        ));
    }

    #[test]
    fn waffle_cone() {
        let w = nodal_cubic_complex();
        assert_eq!(w.cone_count(), 3);
        assert_eq!(w.ray_count(), 1);
        assert_eq!(w.maps_between(1, 2).len(), 2);
        assert_eq!(w.face_map_count(), 7);
        assert!(!w.is_isomorphic(&a2()));
    }

    #[test]
    fn products() {
        let p = product(&a1(), &a1());
        assert_eq!(p.complex.cone_count(), 4);
        assert!(p.complex.is_isomorphic(&a2()));
        let q = product(&nodal_cubic_complex(), &a1());
        assert_eq!(q.complex.cone_count(), 6);
        assert_eq!(q.complex.face_map_count(), 7 * 3);
        let unit = product(&a2(), &GeneralizedConeComplex::point());
        assert!(unit.complex.is_isomorphic(&a2()));
        ComplexMorphism::new(p.complex.clone(), a1(), p.first.assignments.clone()).unwrap();
    }

    #[test]
    fn quadrant_stars() {
        let s = star_subdivision(&a2(), 3, &ivec(&[1, 1])).unwrap();
        assert_eq!(s.refined.cone_count(), 6);
        assert_eq!(s.maximal_cones_over(3).len(), 2);
        assert!(s.all_unimodular());
        assert!(s.preserves_volume());

        let s = star_subdivision(&a2(), 3, &ivec(&[1, 2])).unwrap();
        let tops = s.maximal_cones_over(3);
        assert_eq!(tops.len(), 2);
        let indices: Vec<_> = tops
            .iter()
            .map(|&i| s.flags[i].index.clone().unwrap())
            .collect();
        assert!(indices.contains(&BigInt::from(2)));
        assert!(s.preserves_volume());

        let same = star_subdivision(&a2(), 1, &ivec(&[3])).unwrap();
        assert!(same.refined.is_isomorphic(&a2()));
        assert_eq!(
            star_subdivision(&a2(), 3, &ivec(&[-1, 1])),
            Err(ComplexError::RayOutsideSupport)
        );
    }

    #[test]
    fn diagonal_of_affine_line() {
        let along = subdivide_along(&diagonal(&a1())).unwrap();
        let sub = &along.subdivision;
        assert_eq!(sub.maximal_cones_over(3).len(), 2);
        assert!(sub.all_unimodular());
        assert_eq!(along.image_subcomplex.cone_count(), 2);
        assert!(along.nonconvex.is_empty());
        assert!(along.factors);
        let ray = along
            .image_cones
            .iter()
            .find(|&&i| sub.refined.cones()[i].dim() == 1)
            .unwrap();
        assert_eq!(sub.rays_in_base[*ray], vec![ivec(&[1, 1])]);
    }

    #[test]
    fn diagonal_of_affine_plane() {
        let along = subdivide_along(&diagonal(&a2())).unwrap();
        let sub = &along.subdivision;
        let top = a2().cone_count() * 4 - 1;
        let target = ivec(&[1, 0, 1, 0]);
        let other = ivec(&[0, 1, 0, 1]);
        assert!(sub
            .rays_in_base
            .iter()
            .zip(sub.structure_map.assignments.iter())
            .any(|(r, (c, _))| *c == top
                && r.contains(&target)
                && r.contains(&other)
                && r.len() == 2));
        assert!(!along.nonconvex.is_empty());
        assert_eq!(along.image_subcomplex.cone_count(), 4);
        assert!(along.factors);
        assert!(sub.preserves_volume());
    }

    #[test]
    fn diagonal_of_waffle() {
        let along = subdivide_along(&diagonal(&nodal_cubic_complex())).unwrap();
        assert!(along.factors);
        assert!(along.subdivision.preserves_volume());
    }

    #[test]
    fn identity_morphism_is_trivial() {
        let along = subdivide_along(&ComplexMorphism::identity(&a2())).unwrap();
        assert!(along.subdivision.refined.is_isomorphic(&a2()));
        assert!(along.nonconvex.is_empty());
        let pt = GeneralizedConeComplex::point();
        let along = subdivide_along(&diagonal(&pt)).unwrap();
        assert!(b_subcomplex(&pt, &along).is_isomorphic(&pt));
    }
}
