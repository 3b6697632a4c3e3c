//! Log Hochschild invariants assembled from Hodge tables.
//!
//! Homology: `HH_n = ⊕_{q-p=n} H^p(X, Ω^{q,log})`. Cohomology:
//! `HH^n = ⊕_{p+q=n} H^p(X, Λ^q T^log)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conecomplex::{
    diagonal, subdivide_along, AlongSubdivision, ComplexError, GeneralizedConeComplex,
};
use crate::logmodel::{
    superscript, EntryKind, GradedEntry, HodgeTable, LogModel, ModelClass, ModelError,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HkrError {
    #[error("weight series are not supported here; the model is not proper")]
    SeriesNotSupported,
    #[error("outside implemented scope: {0}")]
    ScopeExceeded(String),
    #[error("Euler characteristic of HH_* is {homology} but the Hodge table gives {table}")]
    EulerMismatch { homology: i64, table: i64 },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variance {
    Homology,
    Cohomology,
}

/// Nonzero graded pieces of a Hochschild table, keyed by degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HHTable {
    pub variance: Variance,
    pub kind: EntryKind,
    pub degrees: BTreeMap<i64, GradedEntry>,
}

impl HHTable {
    pub fn get(&self, n: i64) -> GradedEntry {
        self.degrees
            .get(&n)
            .cloned()
            .unwrap_or_else(|| self.kind.zero())
    }

    /// Adds `value` in degree `n`, dropping zero entries.
    pub fn accumulate(&mut self, n: i64, value: &GradedEntry) -> Result<(), ModelError> {
        if value.is_zero() {
            return Ok(());
        }
        let sum = self.get(n).add(value)?;
        if sum.is_zero() {
            self.degrees.remove(&n);
        } else {
            self.degrees.insert(n, sum);
        }
        Ok(())
    }

    pub fn empty(variance: Variance, kind: EntryKind) -> Self {
        HHTable {
            variance,
            kind,
            degrees: BTreeMap::new(),
        }
    }

    /// Alternating sum of finite entries.
    pub fn euler_characteristic(&self) -> Result<i64, HkrError> {
        self.degrees.iter().try_fold(0i64, |acc, (n, v)| {
            let v = v.as_finite().ok_or(HkrError::SeriesNotSupported)? as i64;
            Ok(if n.rem_euclid(2) == 0 {
                acc + v
            } else {
                acc - v
            })
        })
    }
}

fn collapse(
    table: &HodgeTable,
    variance: Variance,
    degree: impl Fn(i64, i64) -> i64,
) -> Result<HHTable, HkrError> {
    let mut out = HHTable::empty(variance, table.kind);
    for ((p, q), v) in table.nonzero() {
        out.accumulate(degree(p as i64, q as i64), &v)?;
    }
    Ok(out)
}

/// `HH_n(X) = ⊕_{q-p=n} h^p(Ω^{q,log})`.
pub fn hh_homology(x: &LogModel) -> Result<HHTable, HkrError> {
    collapse(&x.hodge, Variance::Homology, |p, q| q - p)
}

/// `HH^n(X) = ⊕_{p+q=n} h^p(Λ^q T^log)`.
pub fn hh_cohomology(x: &LogModel) -> Result<HHTable, HkrError> {
    let table = x.polyvector.as_ref().ok_or_else(|| {
        HkrError::ScopeExceeded(format!("no polyvector field table for {}", x.name))
    })?;
    collapse(table, Variance::Cohomology, |p, q| p + q)
}

/// Even and odd totals of periodic cyclic homology.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicTable {
    pub even: u64,
    pub odd: u64,
}

/// Periodic cyclic homology of a proper model, as the even and odd sums of
/// its log Hodge numbers.
pub fn periodic_cyclic(x: &LogModel) -> Result<CyclicTable, HkrError> {
    if x.hodge.kind != EntryKind::Finite {
        return Err(HkrError::SeriesNotSupported);
    }
    let mut out = CyclicTable { even: 0, odd: 0 };
    for ((p, q), v) in x.hodge.nonzero() {
        let v = v.as_finite().expect("finite table");
        if (p + q) % 2 == 0 {
            out.even += v;
        } else {
            out.odd += v;
        }
    }
    Ok(out)
}

/// Euler characteristic of `HH_*`, checked against the signed sum
/// `Σ (-1)^{q-p} h^{p,q}` of the Hodge table.
pub fn euler_check(x: &LogModel) -> Result<i64, HkrError> {
    let homology = hh_homology(x)?.euler_characteristic()?;
    let direct = x
        .hodge
        .nonzero()
        .into_iter()
        .try_fold(0i64, |acc, ((p, q), v)| {
            let v = v.as_finite().ok_or(HkrError::SeriesNotSupported)? as i64;
            Ok::<_, HkrError>(if (p + q) % 2 == 0 { acc + v } else { acc - v })
        })?;
    if homology != direct {
        return Err(HkrError::EulerMismatch {
            homology,
            table: direct,
        });
    }
    Ok(homology)
}

/// Structured description of the log diagonal `B(X)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BDescription {
    pub text: String,
    /// Rank of the torus factor when `B(X)` is `X × G_m^r`.
    pub torus_rank: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogDiagonalPicture {
    pub base_model: LogModel,
    pub b_description: BDescription,
    pub diagonal_subdivision: AlongSubdivision,
    pub b_subcomplex: GeneralizedConeComplex,
    /// Rank of the conormal bundle of `X` in `B(X)`.
    pub conormal_rank: usize,
}

fn describe_b(x: &LogModel) -> BDescription {
    let torus = |r: usize| match r {
        0 => String::new(),
        1 => "G_m".to_string(),
        _ => format!("G_m{}", superscript(r)),
    };
    match &x.class {
        ModelClass::Points { .. } => BDescription {
            text: x.name.clone(),
            torus_rank: Some(0),
        },
        ModelClass::Toric { rank, .. } => BDescription {
            text: if *rank == 0 {
                x.name.clone()
            } else {
                format!("{} × {}", x.name, torus(*rank))
            },
            torus_rank: Some(*rank),
        },
        ModelClass::MixedAffine { log, .. } if !log.is_empty() => BDescription {
            text: format!("{} × {}", x.name, torus(log.len())),
            torus_rank: Some(log.len()),
        },
        ModelClass::MixedAffine { .. } => BDescription {
            text: x.name.clone(),
            torus_rank: Some(0),
        },
        _ => BDescription {
            text: format!("log diagonal of {}", x.name),
            torus_rank: None,
        },
    }
}

/// Subdivides `F_X × F_X` along the diagonal and records the log diagonal.
pub fn log_diagonal(x: &LogModel) -> Result<LogDiagonalPicture, HkrError> {
    let along = subdivide_along(&diagonal(&x.artin_fan))?;
    Ok(LogDiagonalPicture {
        base_model: x.clone(),
        b_description: describe_b(x),
        b_subcomplex: along.image_subcomplex.clone(),
        diagonal_subdivision: along,
        conormal_rank: x.omega_log_rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logmodel::{affine_space, marked_p1, nodal_cubic, point, projective_space};

    #[test]
    fn nodal_cubic_hochschild() {
        let h = hh_homology(&nodal_cubic()).unwrap();
        assert_eq!(h.get(-1), GradedEntry::Finite(1));
        assert_eq!(h.get(0), GradedEntry::Finite(2));
        assert_eq!(h.get(1), GradedEntry::Finite(1));
        assert_eq!(h.degrees.len(), 3);
        assert_eq!(euler_check(&nodal_cubic()).unwrap(), 0);
        assert_eq!(
            periodic_cyclic(&nodal_cubic()).unwrap(),
            CyclicTable { even: 2, odd: 2 }
        );
    }

    #[test]
    fn projective_plane() {
        let h = hh_homology(&projective_space(2)).unwrap();
        assert_eq!(h.get(0), GradedEntry::Finite(1));
        assert_eq!(h.get(1), GradedEntry::Finite(2));
        assert_eq!(h.get(2), GradedEntry::Finite(1));
        let c = hh_cohomology(&projective_space(2)).unwrap();
        assert_eq!(c.degrees, h.degrees);
    }

    #[test]
    fn affine_line_cohomology() {
        let c = hh_cohomology(&affine_space(1, 5)).unwrap();
        assert_eq!(c.get(0).as_series().unwrap().coeffs, vec![1, 1, 1, 1, 1, 1]);
        assert_eq!(c.get(1).as_series().unwrap().coeffs, vec![0, 1, 1, 1, 1, 1]);
        assert!(matches!(
            euler_check(&affine_space(1, 5)),
            Err(HkrError::SeriesNotSupported)
        ));
    }

    #[test]
    fn euler_of_marked_lines() {
        for n in 0..6 {
            assert_eq!(euler_check(&marked_p1(n)).unwrap(), 2 - n as i64);
        }
        assert_eq!(euler_check(&point()).unwrap(), 1);
    }

    #[test]
    fn diagonal_descriptions() {
        let a1 = log_diagonal(&affine_space(1, 3)).unwrap();
        assert_eq!(a1.b_description.text, "𝔸¹ × G_m");
        assert_eq!(a1.conormal_rank, 1);
        let a2 = log_diagonal(&affine_space(2, 3)).unwrap();
        assert_eq!(a2.b_description.text, "𝔸² × G_m²");
        assert_eq!(a2.conormal_rank, 2);
        let nc = log_diagonal(&nodal_cubic()).unwrap();
        assert!(nc.diagonal_subdivision.factors);
    }
}
