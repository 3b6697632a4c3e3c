//! Finite abelian group actions on log models, their log fixed loci and the
//! orbifold Hochschild decomposition
//! `HH_n([X/G]) = (⊕_g ⊕_{q-p=n} H^p(X^g_log, Ω^{q,log}))^G`.
//!
//! Actions are diagonal: generator `j` scales coordinate `i` by
//! `ζ_{o_j}^{χ_{j,i}}`. An optional permutation part only serves to detect
//! actions that move the Artin fan.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hkr::{hh_homology, HHTable, HkrError, Variance};
use crate::logmodel::{
    mixed_affine, points, GradedEntry, HodgeTable, LogModel, ModelClass, ModelError, Series,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrbifoldError {
    #[error("the action is not firm: it moves the Artin fan")]
    NotFirm,
    #[error("requested order {requested} exceeds series truncation {available}")]
    TruncationTooSmall { requested: usize, available: usize },
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("outside implemented scope: {0}")]
    ScopeExceeded(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Hkr(#[from] HkrError),
}

/// A group element as exponents of the cyclic generators.
pub type GroupElement = Vec<u64>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalAction {
    pub model: LogModel,
    /// Orders of the cyclic factors of `G`.
    pub group_orders: Vec<u64>,
    /// `characters[j][i]`: exponent of generator `j` on coordinate `i`,
    /// reduced modulo `group_orders[j]`.
    pub characters: Vec<Vec<u64>>,
    /// Optional permutation of the special points for each generator.
    pub permutations: Option<Vec<Vec<usize>>>,
}

/// Coordinates carrying characters, and the special points a permutation
/// acts on, as `(coordinates, points, log points)`.
fn action_shape(model: &LogModel) -> (usize, usize, BTreeSet<usize>) {
    match &model.class {
        ModelClass::MixedAffine { n, log } => (*n, *n, log.iter().copied().collect()),
        // one coordinate z; special points 0 and ∞, marked in that order
        ModelClass::MarkedP1 { marked } => (1, 2, (0..(*marked).min(2)).collect()),
        _ => (0, 0, BTreeSet::new()),
    }
}

impl DiagonalAction {
    pub fn new(
        model: LogModel,
        group_orders: Vec<u64>,
        characters: Vec<Vec<i64>>,
        permutations: Option<Vec<Vec<usize>>>,
    ) -> Result<Self, OrbifoldError> {
        if group_orders.contains(&0) {
            return Err(OrbifoldError::InvalidAction(
                "group orders must be positive".into(),
            ));
        }
        if characters.len() != group_orders.len() {
            return Err(OrbifoldError::InvalidAction(
                "one character row per generator is required".into(),
            ));
        }
        let (coords, special, _) = action_shape(&model);
        if characters.iter().any(|row| row.len() != coords) {
            return Err(OrbifoldError::InvalidAction(format!(
                "character rows must have length {coords}"
            )));
        }
        let characters: Vec<Vec<u64>> = characters
            .iter()
            .zip(&group_orders)
            .map(|(row, &o)| {
                row.iter()
                    .map(|&c| c.mod_floor(&(o as i64)) as u64)
                    .collect()
            })
            .collect();
        if let ModelClass::MarkedP1 { marked } = model.class {
            if marked > 2 && characters.iter().flatten().any(|&c| c != 0) {
                return Err(OrbifoldError::ScopeExceeded(
                    "diagonal actions need the marked points among 0 and ∞".into(),
                ));
            }
        }
        if let Some(perms) = &permutations {
            if perms.len() != group_orders.len() {
                return Err(OrbifoldError::InvalidAction(
                    "one permutation per generator is required".into(),
                ));
            }
            for p in perms {
                let image: BTreeSet<usize> = p.iter().copied().collect();
                if p.len() != special
                    || image.len() != special
                    || image.iter().any(|&i| i >= special)
                {
                    return Err(OrbifoldError::InvalidAction(format!(
                        "permutations must permute {special} points"
                    )));
                }
            }
        }
        Ok(DiagonalAction {
            model,
            group_orders,
            characters,
            permutations,
        })
    }

    /// Group of order 1 acting on `model`.
    pub fn trivial(model: LogModel) -> Self {
        DiagonalAction {
            model,
            group_orders: Vec::new(),
            characters: Vec::new(),
            permutations: None,
        }
    }

    pub fn group_order(&self) -> u64 {
        self.group_orders.iter().product()
    }

    /// All group elements in lexicographic order of exponents.
    pub fn elements(&self) -> Vec<GroupElement> {
        self.group_orders.iter().fold(vec![Vec::new()], |acc, &o| {
            acc.into_iter()
                .flat_map(|e| {
                    (0..o).map(move |k| {
                        let mut next = e.clone();
                        next.push(k);
                        next
                    })
                })
                .collect()
        })
    }

    /// Character of coordinate `i` under `g`, as residues per generator.
    fn character_of(&self, g: &[u64], i: usize) -> Vec<u64> {
        self.group_orders
            .iter()
            .enumerate()
            .map(|(j, &o)| (g[j] * self.characters[j][i]) % o)
            .collect()
    }

    fn acts_trivially_on(&self, g: &[u64], i: usize) -> bool {
        self.character_of(g, i).iter().all(|&c| c == 0)
    }

    fn has_permutations(&self) -> bool {
        self.permutations.as_ref().is_some_and(|ps| {
            ps.iter()
                .any(|p| p.iter().enumerate().any(|(i, &j)| i != j))
        })
    }

    fn validate_element(&self, g: &[u64]) -> Result<(), OrbifoldError> {
        if g.len() != self.group_orders.len()
            || g.iter().zip(&self.group_orders).any(|(e, o)| e >= o)
        {
            return Err(OrbifoldError::InvalidAction(format!(
                "{g:?} is not a group element"
            )));
        }
        Ok(())
    }
}

/// Whether `G` acts trivially on the Artin fan. Characters always fix it;
/// a permutation moving a log point does not.
pub fn check_firm(a: &DiagonalAction) -> bool {
    let (_, _, log) = action_shape(&a.model);
    a.permutations
        .as_ref()
        .is_none_or(|ps| ps.iter().all(|p| log.iter().all(|&i| p[i] == i)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistedSector {
    pub element: GroupElement,
    /// The log fixed locus `X^g_log`; `None` when it is empty.
    pub locus: Option<LogModel>,
    pub hodge_contribution: Option<HodgeTable>,
}

/// The log fixed locus of `g`.
pub fn twisted_sector(a: &DiagonalAction, g: &[u64]) -> Result<TwistedSector, OrbifoldError> {
    if !check_firm(a) {
        return Err(OrbifoldError::NotFirm);
    }
    a.validate_element(g)?;
    if a.has_permutations() {
        return Err(OrbifoldError::ScopeExceeded(
            "fixed loci of permutation actions are not implemented".into(),
        ));
    }
    let locus = match &a.model.class {
        ModelClass::MixedAffine { n, log } => {
            if log.iter().any(|&i| !a.acts_trivially_on(g, i)) {
                None
            } else {
                let fixed: Vec<usize> = (0..*n).filter(|&i| a.acts_trivially_on(g, i)).collect();
                let sub_log: Vec<usize> = fixed
                    .iter()
                    .enumerate()
                    .filter(|(_, i)| log.contains(i))
                    .map(|(k, _)| k)
                    .collect();
                let truncation = a.model.truncation().expect("affine model");
                Some(mixed_affine(fixed.len(), &sub_log, truncation)?)
            }
        }
        ModelClass::MarkedP1 { marked } if !a.acts_trivially_on(g, 0) => {
            let unmarked = 2 - (*marked).min(2);
            (unmarked > 0).then(|| points(unmarked))
        }
        _ => Some(a.model.clone()),
    };
    Ok(TwistedSector {
        element: g.to_vec(),
        hodge_contribution: locus.as_ref().map(|l| l.hodge.clone()),
        locus,
    })
}

/// Hochschild homology of one sector split by character of `G`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsotypicTable {
    /// `(degree, character residues) ↦ dimension`.
    pub entries: BTreeMap<(i64, Vec<u64>), GradedEntry>,
}

impl IsotypicTable {
    fn accumulate(&mut self, key: (i64, Vec<u64>), v: &GradedEntry) -> Result<(), ModelError> {
        if v.is_zero() {
            return Ok(());
        }
        let sum = match self.entries.get(&key) {
            Some(old) => old.add(v)?,
            None => v.clone(),
        };
        self.entries.insert(key, sum);
        Ok(())
    }

    pub fn merge(&mut self, other: &IsotypicTable) -> Result<(), ModelError> {
        for (k, v) in &other.entries {
            self.accumulate(k.clone(), v)?;
        }
        Ok(())
    }

    /// The trivial-character part as a Hochschild table.
    pub fn invariants(&self, template: &HHTable) -> Result<HHTable, ModelError> {
        let mut out = HHTable::empty(Variance::Homology, template.kind);
        for ((n, chi), v) in &self.entries {
            if chi.iter().all(|&c| c == 0) {
                out.accumulate(*n, v)?;
            }
        }
        Ok(out)
    }
}

/// Monomials `x^a` in `vars` variables with `|a| ≤ bound`.
fn monomials(vars: usize, bound: usize) -> Vec<Vec<usize>> {
    if vars == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 0..=bound {
        for mut rest in monomials(vars - 1, bound - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Character-graded Hochschild homology of the `g`-sector, by monomial
/// enumeration for affine sectors.
pub fn sector_isotypic(a: &DiagonalAction, g: &[u64]) -> Result<IsotypicTable, OrbifoldError> {
    let sector = twisted_sector(a, g)?;
    let mut out = IsotypicTable {
        entries: BTreeMap::new(),
    };
    let Some(locus) = sector.locus else {
        return Ok(out);
    };
    let trivial = vec![0u64; a.group_orders.len()];
    match &a.model.class {
        ModelClass::MixedAffine { n, log } => {
            let truncation = a.model.truncation().expect("affine model");
            let fixed: Vec<usize> = (0..*n).filter(|&i| a.acts_trivially_on(g, i)).collect();
            let coordinate_chars: Vec<Vec<u64>> = fixed
                .iter()
                .map(|&i| a.characters.iter().map(|row| row[i]).collect())
                .collect();
            let add_chars = |acc: &mut Vec<u64>, chi: &[u64], times: u64| {
                for (j, o) in a.group_orders.iter().enumerate() {
                    acc[j] = (acc[j] + chi[j] * times) % o;
                }
            };
            for q in 0..=fixed.len() {
                for forms in crate::cone::subsets(fixed.len(), q) {
                    let mut form_char = trivial.clone();
                    let mut form_weight = 0;
                    for &k in &forms {
                        if !log.contains(&fixed[k]) {
                            add_chars(&mut form_char, &coordinate_chars[k], 1);
                            form_weight += 1;
                        }
                    }
                    if form_weight > truncation {
                        continue;
                    }
                    for mono in monomials(fixed.len(), truncation - form_weight) {
                        let mut chi = form_char.clone();
                        for (k, &e) in mono.iter().enumerate() {
                            add_chars(&mut chi, &coordinate_chars[k], e as u64);
                        }
                        let weight = form_weight + mono.iter().sum::<usize>();
                        let v = GradedEntry::Series(Series::monomial(weight, truncation));
                        out.accumulate((q as i64, chi), &v)?;
                    }
                }
            }
        }
        _ => {
            // G fixes every point of these loci and acts trivially on
            // their cohomology
            for (n, v) in hh_homology(&locus)?.degrees {
                out.accumulate((n, trivial.clone()), &v)?;
            }
        }
    }
    Ok(out)
}

/// Orbifold Hochschild homology at the model's own truncation order.
pub fn orbifold_hh(a: &DiagonalAction) -> Result<HHTable, OrbifoldError> {
    if !check_firm(a) {
        return Err(OrbifoldError::NotFirm);
    }
    let template = hh_homology(&a.model)?;
    let mut total = HHTable::empty(Variance::Homology, template.kind);
    for g in a.elements() {
        let inv = sector_isotypic(a, &g)?.invariants(&template)?;
        for (n, v) in &inv.degrees {
            total.accumulate(*n, v)?;
        }
    }
    Ok(total)
}

/// Orbifold Hochschild homology with series truncated at `order`.
pub fn orbifold_hh_to_order(a: &DiagonalAction, order: usize) -> Result<HHTable, OrbifoldError> {
    let table = orbifold_hh(a)?;
    let Some(available) = a.model.truncation() else {
        return Ok(table);
    };
    if order > available {
        return Err(OrbifoldError::TruncationTooSmall {
            requested: order,
            available,
        });
    }
    let degrees = table
        .degrees
        .into_iter()
        .map(|(n, v)| {
            let s = v.as_series().expect("series table").truncate(order);
            (n, GradedEntry::Series(s))
        })
        .filter(|(_, v)| !v.is_zero())
        .collect();
    Ok(HHTable {
        variance: table.variance,
        kind: crate::logmodel::EntryKind::Series { truncation: order },
        degrees,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logmodel::{marked_p1, nodal_cubic};

    fn negation(log: &[usize]) -> DiagonalAction {
        DiagonalAction::new(
            mixed_affine(1, log, 6).unwrap(),
            vec![2],
            vec![vec![1]],
            None,
        )
        .unwrap()
    }

    fn coeffs(t: &HHTable, n: i64) -> Vec<u64> {
        t.get(n).as_series().unwrap().coeffs.clone()
    }

    #[test]
    fn log_line_mod_two() {
        let a = negation(&[0]);
        assert!(check_firm(&a));
        assert!(twisted_sector(&a, &[1]).unwrap().locus.is_none());
        assert_eq!(twisted_sector(&a, &[0]).unwrap().locus.unwrap().dim, 1);
        let hh = orbifold_hh(&a).unwrap();
        assert_eq!(coeffs(&hh, 0), vec![1, 0, 1, 0, 1, 0, 1]);
        assert_eq!(coeffs(&hh, 1), vec![1, 0, 1, 0, 1, 0, 1]);
        assert_eq!(hh.degrees.len(), 2);
    }

    #[test]
    fn plain_line_mod_two() {
        let a = negation(&[]);
        let sector = twisted_sector(&a, &[1]).unwrap();
        assert_eq!(sector.locus.unwrap().dim, 0);
        let hh = orbifold_hh(&a).unwrap();
        assert_eq!(coeffs(&hh, 0), vec![2, 0, 1, 0, 1, 0, 1]);
        assert_eq!(coeffs(&hh, 1), vec![0, 0, 1, 0, 1, 0, 1]);
        let short = orbifold_hh_to_order(&a, 2).unwrap();
        assert_eq!(coeffs(&short, 0), vec![2, 0, 1]);
        assert!(matches!(
            orbifold_hh_to_order(&a, 7),
            Err(OrbifoldError::TruncationTooSmall { .. })
        ));
    }

    #[test]
    fn inversion_of_p1_is_not_firm() {
        let a = DiagonalAction::new(marked_p1(2), vec![2], vec![vec![0]], Some(vec![vec![1, 0]]))
            .unwrap();
        assert!(!check_firm(&a));
        assert_eq!(orbifold_hh(&a), Err(OrbifoldError::NotFirm));
        assert_eq!(twisted_sector(&a, &[1]), Err(OrbifoldError::NotFirm));
    }

    #[test]
    fn trivial_group() {
        let a = DiagonalAction::trivial(nodal_cubic());
        assert!(check_firm(&a));
        assert_eq!(
            orbifold_hh(&a).unwrap(),
            hh_homology(&nodal_cubic()).unwrap()
        );
    }

    #[test]
    fn rotation_of_p1() {
        let a = DiagonalAction::new(marked_p1(0), vec![3], vec![vec![1]], None).unwrap();
        let hh = orbifold_hh(&a).unwrap();
        // untwisted P¹ plus two fixed points for each of the two rotations
        assert_eq!(hh.get(0), GradedEntry::Finite(2 + 2 * 2));
        let b = DiagonalAction::new(marked_p1(2), vec![3], vec![vec![1]], None).unwrap();
        assert_eq!(
            orbifold_hh(&b).unwrap(),
            hh_homology(&marked_p1(2)).unwrap()
        );
    }
}
