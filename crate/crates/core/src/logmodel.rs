//! Small log smooth schemes described by their Artin fan and log Hodge
//! numbers `h^p(X, Ω^{q,log})`.
//!
//! Complete models carry finite dimensions. Affine models carry weight
//! series truncated at a fixed order: forms `dlog x` have weight 0, `dx`
//! and `x` weight 1. Polyvector tables record `h^p(X, Λ^q T^log)`; on affine
//! models they are graded by the monomial degree of the coefficient in the
//! basis `∂/∂x`, so `x ∂/∂x` has weight 1.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cone::{cone_hilbert_basis, Cone};
use crate::conecomplex::{
    from_toric_fan, nodal_cubic_complex, product, snc_artin_fan, ComplexError,
    GeneralizedConeComplex, Subdivision,
};
use crate::lattice::{add_vec, dot, IntVector};

/// Default truncation order of weight series.
pub const DEFAULT_TRUNCATION: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("completeness flag contradicts the support of the fan")]
    NotComplete,
    #[error("outside implemented scope: {0}")]
    ScopeExceeded(String),
    #[error("cannot combine a weight series with a weight series")]
    KindMismatch,
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Truncated weight series `c_0 + c_1 t + … + c_N t^N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Series {
    pub coeffs: Vec<u64>,
    pub truncation: usize,
}

impl Series {
    pub fn zero(truncation: usize) -> Self {
        Series {
            coeffs: vec![0; truncation + 1],
            truncation,
        }
    }

    /// The series of a single weight.
    pub fn monomial(weight: usize, truncation: usize) -> Self {
        let mut s = Series::zero(truncation);
        if weight <= truncation {
            s.coeffs[weight] = 1;
        }
        s
    }

    pub fn from_coeffs(mut coeffs: Vec<u64>, truncation: usize) -> Self {
        coeffs.resize(truncation + 1, 0);
        Series { coeffs, truncation }
    }

    /// Series of the polynomial ring in `n` variables of weight 1.
    pub fn polynomial_ring(n: usize, truncation: usize) -> Self {
        let coeffs = (0..=truncation)
            .map(|k| {
                if n == 0 {
                    u64::from(k == 0)
                } else {
                    binomial(k + n - 1, n - 1)
                }
            })
            .collect();
        Series { coeffs, truncation }
    }

    pub fn truncate(&self, truncation: usize) -> Self {
        let t = truncation.min(self.truncation);
        Series::from_coeffs(self.coeffs[..=t].to_vec(), t)
    }

    pub fn shift(&self, by: usize) -> Self {
        let mut s = Series::zero(self.truncation);
        for (i, c) in self.coeffs.iter().enumerate() {
            if i + by <= self.truncation {
                s.coeffs[i + by] = *c;
            }
        }
        s
    }

    pub fn add(&self, other: &Series) -> Self {
        let t = self.truncation.min(other.truncation);
        Series::from_coeffs(
            (0..=t).map(|i| self.coeffs[i] + other.coeffs[i]).collect(),
            t,
        )
    }

    pub fn mul(&self, other: &Series) -> Self {
        let t = self.truncation.min(other.truncation);
        let mut s = Series::zero(t);
        for i in 0..=t {
            for j in 0..=t - i {
                s.coeffs[i + j] += self.coeffs[i] * other.coeffs[j];
            }
        }
        s
    }

    pub fn scale(&self, c: u64) -> Self {
        Series::from_coeffs(self.coeffs.iter().map(|x| x * c).collect(), self.truncation)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{i}"),
            };
            terms.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}{mono}"),
            });
        }
        terms.push(format!("O(t^{})", self.truncation + 1));
        write!(f, "{}", terms.join(" + "))
    }
}

/// A dimension: either a plain number or a truncated weight series.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GradedEntry {
    Finite(u64),
    Series(Series),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryKind {
    Finite,
    Series { truncation: usize },
}

impl EntryKind {
    pub fn zero(self) -> GradedEntry {
        match self {
            EntryKind::Finite => GradedEntry::Finite(0),
            EntryKind::Series { truncation } => GradedEntry::Series(Series::zero(truncation)),
        }
    }
}

impl GradedEntry {
    pub fn kind(&self) -> EntryKind {
        match self {
            GradedEntry::Finite(_) => EntryKind::Finite,
            GradedEntry::Series(s) => EntryKind::Series {
                truncation: s.truncation,
            },
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            GradedEntry::Finite(v) => *v == 0,
            GradedEntry::Series(s) => s.is_zero(),
        }
    }

    pub fn as_finite(&self) -> Option<u64> {
        match self {
            GradedEntry::Finite(v) => Some(*v),
            GradedEntry::Series(_) => None,
        }
    }

    pub fn as_series(&self) -> Option<&Series> {
        match self {
            GradedEntry::Series(s) => Some(s),
            GradedEntry::Finite(_) => None,
        }
    }

    /// Sum of two entries of the same kind. A finite zero is neutral.
    pub fn add(&self, other: &GradedEntry) -> Result<GradedEntry, ModelError> {
        match (self, other) {
            (GradedEntry::Finite(a), GradedEntry::Finite(b)) => Ok(GradedEntry::Finite(a + b)),
            (GradedEntry::Series(a), GradedEntry::Series(b)) => Ok(GradedEntry::Series(a.add(b))),
            (GradedEntry::Finite(0), s @ GradedEntry::Series(_))
            | (s @ GradedEntry::Series(_), GradedEntry::Finite(0)) => Ok(s.clone()),
            _ => Err(ModelError::KindMismatch),
        }
    }

    /// Product; a series times a series is outside scope.
    pub fn mul(&self, other: &GradedEntry) -> Result<GradedEntry, ModelError> {
        match (self, other) {
            (GradedEntry::Finite(a), GradedEntry::Finite(b)) => Ok(GradedEntry::Finite(a * b)),
            (GradedEntry::Finite(a), GradedEntry::Series(s))
            | (GradedEntry::Series(s), GradedEntry::Finite(a)) => {
                Ok(GradedEntry::Series(s.scale(*a)))
            }
            (GradedEntry::Series(_), GradedEntry::Series(_)) => Err(ModelError::KindMismatch),
        }
    }
}

impl fmt::Display for GradedEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GradedEntry::Finite(v) => write!(f, "{v}"),
            GradedEntry::Series(s) => write!(f, "{s}"),
        }
    }
}

/// `entries[p][q] = h^p(X, Ω^{q,log})` (or `h^p(X, Λ^q T^log)`), for
/// `0 ≤ p, q ≤ dim`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HodgeTable {
    pub dim: usize,
    pub kind: EntryKind,
    entries: Vec<Vec<GradedEntry>>,
}

impl HodgeTable {
    pub fn zeros(dim: usize, kind: EntryKind) -> Self {
        HodgeTable {
            dim,
            kind,
            entries: vec![vec![kind.zero(); dim + 1]; dim + 1],
        }
    }

    /// Builds a finite table from rows `[p][q]`.
    pub fn finite(rows: &[&[u64]]) -> Self {
        let dim = rows.len() - 1;
        let mut t = HodgeTable::zeros(dim, EntryKind::Finite);
        for (p, row) in rows.iter().enumerate() {
            for (q, &v) in row.iter().enumerate() {
                t.set(p, q, GradedEntry::Finite(v));
            }
        }
        t
    }

    pub fn get(&self, p: usize, q: usize) -> GradedEntry {
        if p > self.dim || q > self.dim {
            return self.kind.zero();
        }
        self.entries[p][q].clone()
    }

    pub fn set(&mut self, p: usize, q: usize, v: GradedEntry) {
        assert_eq!(v.kind(), self.kind, "entry kind differs from table kind");
        self.entries[p][q] = v;
    }

    /// Nonzero entries as `((p, q), value)`.
    pub fn nonzero(&self) -> Vec<((usize, usize), GradedEntry)> {
        let mut out = Vec::new();
        for p in 0..=self.dim {
            for q in 0..=self.dim {
                if !self.entries[p][q].is_zero() {
                    out.push(((p, q), self.entries[p][q].clone()));
                }
            }
        }
        out
    }

    /// Bigraded convolution `Σ h^{p1,q1}(X) h^{p2,q2}(Y)`.
    pub fn convolve(&self, other: &HodgeTable) -> Result<HodgeTable, ModelError> {
        let kind = match (self.kind, other.kind) {
            (EntryKind::Finite, EntryKind::Finite) => EntryKind::Finite,
            (EntryKind::Series { truncation }, EntryKind::Finite)
            | (EntryKind::Finite, EntryKind::Series { truncation }) => {
                EntryKind::Series { truncation }
            }
            _ => return Err(ModelError::KindMismatch),
        };
        let dim = self.dim + other.dim;
        let mut out = HodgeTable::zeros(dim, kind);
        for p1 in 0..=self.dim {
            for q1 in 0..=self.dim {
                for p2 in 0..=other.dim {
                    for q2 in 0..=other.dim {
                        let term = self.entries[p1][q1].mul(&other.entries[p2][q2])?;
                        let sum = out.entries[p1 + p2][q1 + q2].add(&term)?;
                        out.entries[p1 + p2][q1 + q2] = sum;
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelFlags {
    pub complete: bool,
    pub affine: bool,
    pub weakly_log_separated: bool,
}

/// How a model was built; determines which further constructions apply.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelClass {
    Points {
        count: usize,
    },
    Toric {
        rays: Vec<IntVector>,
        maximal_cones: Vec<Vec<usize>>,
        rank: usize,
        complete: bool,
        smooth: bool,
    },
    MarkedP1 {
        marked: usize,
    },
    NodalCubic,
    MixedAffine {
        n: usize,
        log: Vec<usize>,
    },
    Product(Box<LogModel>, Box<LogModel>),
    Subdivided(Box<LogModel>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogModel {
    pub name: String,
    pub dim: usize,
    pub artin_fan: GeneralizedConeComplex,
    /// `h^p(X, Ω^{q,log})`.
    pub hodge: HodgeTable,
    /// `h^p(X, Λ^q T^log)`, when a rule for it is implemented.
    pub polyvector: Option<HodgeTable>,
    pub flags: ModelFlags,
    /// Rank of `Ω^{1,log}`; always equal to `dim`.
    pub omega_log_rank: usize,
    pub class: ModelClass,
}

impl LogModel {
    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Truncation order of series entries, if any.
    pub fn truncation(&self) -> Option<usize> {
        match self.hodge.kind {
            EntryKind::Series { truncation } => Some(truncation),
            EntryKind::Finite => None,
        }
    }
}

pub(crate) fn superscript(n: usize) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string()
        .chars()
        .map(|c| DIGITS[c.to_digit(10).expect("digit") as usize])
        .collect()
}

/// The reduced point.
pub fn point() -> LogModel {
    points(1)
}

/// A disjoint union of `count` reduced points with trivial log structure.
pub fn points(count: usize) -> LogModel {
    let table = HodgeTable::finite(&[&[count as u64]]);
    LogModel {
        name: if count == 1 {
            "point".into()
        } else {
            format!("{count} points")
        },
        dim: 0,
        artin_fan: GeneralizedConeComplex::point(),
        hodge: table.clone(),
        polyvector: Some(table),
        flags: ModelFlags {
            complete: true,
            affine: true,
            weakly_log_separated: true,
        },
        omega_log_rank: 0,
        class: ModelClass::Points { count },
    }
}

/// Whether every codimension-one cone lies in exactly two maximal cones and
/// all maximal cones are full-dimensional.
fn fan_is_complete(maximal: &[Cone], rank: usize) -> bool {
    if rank == 0 {
        return true;
    }
    if maximal.is_empty() || maximal.iter().any(|c| c.dim() != rank) {
        return false;
    }
    let walls: BTreeSet<Cone> = maximal
        .iter()
        .flat_map(|c| c.faces().into_iter().filter(|f| f.dim() + 1 == rank))
        .collect();
    walls
        .iter()
        .all(|w| maximal.iter().filter(|c| c.has_face(w)).count() == 2)
}

/// Graded monomial count of `k[σ^∨ ∩ M]`, grading by pairing with the sum
/// of the rays of `σ`.
fn monomial_series(sigma: &Cone, truncation: usize) -> Series {
    let rank = sigma.lattice_rank();
    let dual = Cone::new(rank, sigma.facets()).expect("dual of a full-dimensional cone");
    let grading: IntVector = sigma
        .rays()
        .iter()
        .fold(vec![BigInt::from(0); rank], |acc, r| add_vec(&acc, r));
    let basis = cone_hilbert_basis(&dual);
    let degree = |m: &IntVector| dot(&grading, m).to_usize().expect("nonnegative degree");
    let mut seen: BTreeSet<IntVector> = BTreeSet::new();
    let mut stack = vec![vec![BigInt::from(0); rank]];
    while let Some(m) = stack.pop() {
        if !seen.insert(m.clone()) {
            continue;
        }
        for h in &basis {
            let next = add_vec(&m, h);
            if degree(&next) <= truncation && !seen.contains(&next) {
                stack.push(next);
            }
        }
    }
    let mut s = Series::zero(truncation);
    for m in &seen {
        s.coeffs[degree(m)] += 1;
    }
    s
}

/// Toric variety of a fan with its full toric boundary.
///
/// Complete fans give finite tables `h^{0,q} = C(d, q)`. A fan with a single
/// full-dimensional maximal cone gives the affine toric variety, with
/// `h^{0,q} = C(d, q)` times the monomial series of its coordinate ring.
pub fn toric_model(
    rays: &[IntVector],
    maximal_cones: &[Vec<usize>],
    rank: usize,
    complete: bool,
    truncation: usize,
) -> Result<LogModel, ModelError> {
    let fan = from_toric_fan(rays, maximal_cones, rank)?;
    let maximal: Vec<Cone> = maximal_cones
        .iter()
        .map(|idx| {
            let gens: Vec<IntVector> = idx.iter().map(|&i| rays[i].clone()).collect();
            Cone::new(rank, &gens).expect("validated by the fan constructor")
        })
        .collect();
    let is_complete = fan_is_complete(&maximal, rank);
    if is_complete != complete {
        return Err(ModelError::NotComplete);
    }
    let smooth = maximal.iter().all(Cone::is_unimodular);
    let d = rank;
    let (hodge, polyvector, affine) = if complete {
        let mut t = HodgeTable::zeros(d, EntryKind::Finite);
        for q in 0..=d {
            t.set(0, q, GradedEntry::Finite(binomial(d, q)));
        }
        (t.clone(), Some(t), rank == 0)
    } else {
        let distinct: BTreeSet<&Cone> = maximal.iter().collect();
        if distinct.len() != 1 || maximal[0].dim() != rank {
            return Err(ModelError::ScopeExceeded(
                "only complete fans and single full-dimensional cones are supported".into(),
            ));
        }
        let sigma = &maximal[0];
        let series = monomial_series(sigma, truncation);
        let kind = EntryKind::Series { truncation };
        let mut forms = HodgeTable::zeros(d, kind);
        let mut vectors = HodgeTable::zeros(d, kind);
        for q in 0..=d {
            forms.set(0, q, GradedEntry::Series(series.scale(binomial(d, q))));
            vectors.set(
                0,
                q,
                GradedEntry::Series(series.shift(q).scale(binomial(d, q))),
            );
        }
        (forms, sigma.is_unimodular().then_some(vectors), true)
    };
    Ok(LogModel {
        name: format!("toric variety of rank {rank}"),
        dim: d,
        artin_fan: fan,
        hodge,
        polyvector,
        flags: ModelFlags {
            complete,
            affine,
            weakly_log_separated: true,
        },
        omega_log_rank: d,
        class: ModelClass::Toric {
            rays: rays.to_vec(),
            maximal_cones: maximal_cones.to_vec(),
            rank,
            complete,
            smooth,
        },
    })
}

fn unit_vectors(d: usize) -> Vec<IntVector> {
    (0..d)
        .map(|i| {
            let mut e = vec![BigInt::from(0); d];
            e[i] = BigInt::from(1);
            e
        })
        .collect()
}

/// `𝔸^d` with its toric boundary.
pub fn affine_space(d: usize, truncation: usize) -> LogModel {
    let cones = if d == 0 {
        vec![Vec::new()]
    } else {
        vec![(0..d).collect()]
    };
    let name = if d == 0 {
        "point".to_string()
    } else {
        format!("𝔸{}", superscript(d))
    };
    if d == 0 {
        return point();
    }
    toric_model(&unit_vectors(d), &cones, d, false, truncation)
        .expect("orthant")
        .with_name(name)
}

/// `P^d` with its toric boundary.
pub fn projective_space(d: usize) -> LogModel {
    if d == 0 {
        return point();
    }
    let mut rays = unit_vectors(d);
    rays.push(vec![BigInt::from(-1); d]);
    let cones: Vec<Vec<usize>> = (0..=d)
        .map(|skip| (0..=d).filter(|&i| i != skip).collect())
        .collect();
    toric_model(&rays, &cones, d, true, DEFAULT_TRUNCATION)
        .expect("complete simplicial fan")
        .with_name(format!("P{}", superscript(d)))
}

/// `h^0(P^1, O(m))`.
pub fn h0_line_bundle(m: i64) -> u64 {
    (m + 1).max(0) as u64
}

/// `h^1(P^1, O(m))`.
pub fn h1_line_bundle(m: i64) -> u64 {
    (-m - 1).max(0) as u64
}

/// `P^1` with `n` marked points, where `Ω^{1,log} = O(n - 2)`.
pub fn marked_p1(n: usize) -> LogModel {
    let m = n as i64 - 2;
    let hodge = HodgeTable::finite(&[&[1, h0_line_bundle(m)], &[0, h1_line_bundle(m)]]);
    let polyvector = HodgeTable::finite(&[&[1, h0_line_bundle(-m)], &[0, h1_line_bundle(-m)]]);
    LogModel {
        name: format!("P¹ with {n} marked points"),
        dim: 1,
        artin_fan: snc_artin_fan(n, &[]).expect("disjoint vertices"),
        hodge,
        polyvector: Some(polyvector),
        flags: ModelFlags {
            complete: true,
            affine: false,
            weakly_log_separated: true,
        },
        omega_log_rank: 1,
        class: ModelClass::MarkedP1 { marked: n },
    }
}

/// Nodal cubic with the log structure of its node; `Ω^{1,log} = O` and the
/// arithmetic genus is 1.
pub fn nodal_cubic() -> LogModel {
    let table = HodgeTable::finite(&[&[1, 1], &[1, 1]]);
    LogModel {
        name: "nodal cubic".into(),
        dim: 1,
        artin_fan: nodal_cubic_complex(),
        hodge: table.clone(),
        polyvector: Some(table),
        flags: ModelFlags {
            complete: true,
            affine: false,
            weakly_log_separated: true,
        },
        omega_log_rank: 1,
        class: ModelClass::NodalCubic,
    }
}

/// `𝔸^n` whose log structure comes from the coordinate hyperplanes `x_i = 0`
/// for `i` in `log`.
pub fn mixed_affine(n: usize, log: &[usize], truncation: usize) -> Result<LogModel, ModelError> {
    let log: BTreeSet<usize> = log.iter().copied().collect();
    if log.iter().any(|&i| i >= n) {
        return Err(ModelError::ScopeExceeded(format!(
            "log coordinate out of range for 𝔸^{n}"
        )));
    }
    let ring = Series::polynomial_ring(n, truncation);
    let kind = EntryKind::Series { truncation };
    let mut forms = HodgeTable::zeros(n, kind);
    let mut vectors = HodgeTable::zeros(n, kind);
    for q in 0..=n {
        let mut f = Series::zero(truncation);
        let mut v = Series::zero(truncation);
        for subset in crate::cone::subsets(n, q) {
            let logs = subset.iter().filter(|i| log.contains(i)).count();
            f = f.add(&ring.shift(q - logs));
            v = v.add(&ring.shift(logs));
        }
        forms.set(0, q, GradedEntry::Series(f));
        vectors.set(0, q, GradedEntry::Series(v));
    }
    let k = log.len();
    let simplex: Vec<usize> = (0..k).collect();
    let fan = snc_artin_fan(k, &[simplex])?;
    let log_names: Vec<String> = log.iter().map(|i| format!("x{}", i + 1)).collect();
    Ok(LogModel {
        name: if k == 0 {
            format!("𝔸{}", superscript(n))
        } else {
            format!(
                "𝔸{} with log along {}",
                superscript(n),
                log_names.join(", ")
            )
        },
        dim: n,
        artin_fan: fan,
        hodge: forms,
        polyvector: Some(vectors),
        flags: ModelFlags {
            complete: n == 0,
            affine: true,
            weakly_log_separated: true,
        },
        omega_log_rank: n,
        class: ModelClass::MixedAffine {
            n,
            log: log.into_iter().collect(),
        },
    })
}

/// Product model: the Artin fan is the product of Artin fans and the Hodge
/// table is the bigraded convolution.
pub fn product_model(x: &LogModel, y: &LogModel) -> Result<LogModel, ModelError> {
    let hodge = x.hodge.convolve(&y.hodge)?;
    let polyvector = match (&x.polyvector, &y.polyvector) {
        (Some(a), Some(b)) => Some(a.convolve(b)?),
        _ => None,
    };
    Ok(LogModel {
        name: format!("{} × {}", x.name, y.name),
        dim: x.dim + y.dim,
        artin_fan: product(&x.artin_fan, &y.artin_fan).complex,
        hodge,
        polyvector,
        flags: ModelFlags {
            complete: x.flags.complete && y.flags.complete,
            affine: x.flags.affine && y.flags.affine,
            weakly_log_separated: x.flags.weakly_log_separated && y.flags.weakly_log_separated,
        },
        omega_log_rank: x.omega_log_rank + y.omega_log_rank,
        class: ModelClass::Product(Box::new(x.clone()), Box::new(y.clone())),
    })
}

/// The log modification of a complete smooth toric model along a unimodular
/// subdivision of its fan. The tables are unchanged.
pub fn subdivided_model(x: &LogModel, s: &Subdivision) -> Result<LogModel, ModelError> {
    let ok_class = matches!(
        x.class,
        ModelClass::Toric {
            complete: true,
            smooth: true,
            ..
        }
    );
    if !ok_class {
        return Err(ModelError::ScopeExceeded(
            "subdivisions are supported for complete smooth toric models".into(),
        ));
    }
    if s.structure_map.target != x.artin_fan {
        return Err(ModelError::ScopeExceeded(
            "subdivision is not a subdivision of this model's fan".into(),
        ));
    }
    if !s.all_unimodular() {
        return Err(ModelError::ScopeExceeded(
            "subdivision has non-unimodular cones".into(),
        ));
    }
    Ok(LogModel {
        name: format!("{} (subdivided)", x.name),
        artin_fan: s.refined.clone(),
        class: ModelClass::Subdivided(Box::new(x.clone())),
        ..x.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conecomplex::{identity_subdivision, star_subdivision};
    use crate::lattice::ivec;

    fn series(coeffs: &[u64]) -> GradedEntry {
        GradedEntry::Series(Series::from_coeffs(coeffs.to_vec(), coeffs.len() - 1))
    }

    #[test]
    fn affine_line() {
        let a1 = affine_space(1, 4);
        assert_eq!(a1.hodge.get(0, 0), series(&[1, 1, 1, 1, 1]));
        assert_eq!(a1.hodge.get(0, 1), series(&[1, 1, 1, 1, 1]));
        assert!(a1.hodge.get(1, 0).is_zero());
        assert_eq!(
            a1.polyvector.as_ref().unwrap().get(0, 1),
            series(&[0, 1, 1, 1, 1])
        );
        assert_eq!(a1.artin_fan.cone_count(), 2);
    }

    #[test]
    fn complete_toric() {
        let p1 = toric_model(&[ivec(&[1]), ivec(&[-1])], &[vec![0], vec![1]], 1, true, 10).unwrap();
        assert_eq!(p1.hodge, HodgeTable::finite(&[&[1, 1], &[0, 0]]));
        let p2 = projective_space(2);
        assert_eq!(p2.hodge.get(0, 1), GradedEntry::Finite(2));
        assert_eq!(p2.hodge.get(0, 2), GradedEntry::Finite(1));
        assert!(matches!(
            toric_model(&[ivec(&[1])], &[vec![0]], 1, true, 10),
            Err(ModelError::NotComplete)
        ));
    }

    #[test]
    fn non_smooth_affine_cone() {
        // k[x, xy, xy^2]-type cone: σ = ⟨(0,1), (2,-1)⟩
        let m = toric_model(&[ivec(&[0, 1]), ivec(&[2, -1])], &[vec![0, 1]], 2, false, 3).unwrap();
        assert!(m.polyvector.is_none());
        assert_eq!(m.hodge.get(0, 0).as_series().unwrap().coeffs[0], 1);
    }

    #[test]
    fn marked_lines() {
        assert_eq!(marked_p1(0).hodge, HodgeTable::finite(&[&[1, 0], &[0, 1]]));
        assert_eq!(marked_p1(2).hodge, HodgeTable::finite(&[&[1, 1], &[0, 0]]));
        assert_eq!(marked_p1(5).hodge.get(0, 1), GradedEntry::Finite(4));
        assert_eq!(marked_p1(5).hodge.get(1, 1), GradedEntry::Finite(0));
        assert_eq!(marked_p1(3).artin_fan.cone_count(), 4);
    }

    #[test]
    fn nodal_cubic_table() {
        let x = nodal_cubic();
        assert_eq!(x.artin_fan.ray_count(), 1);
        assert_eq!(x.omega_log_rank, 1);
        assert_eq!(x.hodge.nonzero().len(), 4);
    }

    #[test]
    fn products_convolve() {
        let p = product_model(&marked_p1(2), &marked_p1(2)).unwrap();
        assert_eq!(p.hodge, projective_line_squared());
        assert!(product_model(&affine_space(1, 3), &affine_space(1, 3)).is_err());
        let q = product_model(&point(), &nodal_cubic()).unwrap();
        assert_eq!(q.hodge, nodal_cubic().hodge);
    }

    fn projective_line_squared() -> HodgeTable {
        HodgeTable::finite(&[&[1, 2, 1], &[0, 0, 0], &[0, 0, 0]])
    }

    #[test]
    fn blowup_keeps_table() {
        let p2 = projective_space(2);
        let top = p2
            .artin_fan
            .cones()
            .iter()
            .position(|c| c.dim() == 2 && c.contains(&ivec(&[1, 1])))
            .unwrap();
        let s = star_subdivision(&p2.artin_fan, top, &ivec(&[1, 1])).unwrap();
        let b = subdivided_model(&p2, &s).unwrap();
        assert_eq!(b.hodge, p2.hodge);
        assert_eq!(b.artin_fan.ray_count(), 4);
        let same = subdivided_model(&p2, &identity_subdivision(&p2.artin_fan)).unwrap();
        assert_eq!(same.hodge, p2.hodge);
        assert!(subdivided_model(
            &nodal_cubic(),
            &identity_subdivision(&nodal_cubic().artin_fan)
        )
        .is_err());
    }

    #[test]
    fn mixed_affine_weights() {
        let x = mixed_affine(1, &[], 4).unwrap();
        assert_eq!(x.hodge.get(0, 1), series(&[0, 1, 1, 1, 1]));
        let y = mixed_affine(1, &[0], 4).unwrap();
        assert_eq!(y.hodge, affine_space(1, 4).hodge);
    }
}
