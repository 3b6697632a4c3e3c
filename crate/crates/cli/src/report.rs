//! Structured results and their text, JSON and DOT renderings.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use logfan::conecomplex::{AlongSubdivision, GeneralizedConeComplex, Subdivision};
use logfan::hkr::{HHTable, Variance};
use logfan::lattice::IntMatrix;
use logfan::logmodel::{GradedEntry, HodgeTable};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::CliError;

/// An integer written as a JSON number when it fits in 64 bits and as a
/// decimal string otherwise.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Int(pub BigInt);

impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct IntVisitor;
        impl Visitor<'_> for IntVisitor {
            type Value = Int;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer or a decimal string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Int, E> {
                Ok(Int(v.into()))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Int, E> {
                Ok(Int(v.into()))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Int, E> {
                v.parse().map(Int).map_err(E::custom)
            }
        }
        d.deserialize_any(IntVisitor)
    }
}

impl fmt::Display for Int {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn ints(v: &[BigInt]) -> Vec<Int> {
    v.iter().cloned().map(Int).collect()
}

pub fn int_rows(m: &IntMatrix) -> Vec<Vec<Int>> {
    m.row_vectors().iter().map(|r| ints(r)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub kind: String,
    pub message: String,
}

impl Diagnostic {
    /// Names the diagnostic after the innermost error variant.
    pub fn from_error<E: std::error::Error + fmt::Debug>(e: &E) -> Self {
        const WRAPPERS: [&str; 6] = ["Complex(", "Model(", "Hkr(", "Cone(", "Lattice(", "Monoid("];
        let mut debug = format!("{e:?}");
        while let Some(inner) = WRAPPERS.iter().find_map(|w| debug.strip_prefix(w)) {
            debug = inner.to_string();
        }
        let kind = debug
            .split(|c: char| !c.is_alphanumeric() && c != '_')
            .next()
            .unwrap_or("Error")
            .to_string();
        Diagnostic {
            kind,
            message: e.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeView {
    pub dim: usize,
    pub rays: Vec<Vec<Int>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceMapView {
    pub source: usize,
    pub target: usize,
    pub matrix: Vec<Vec<Int>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexView {
    pub cones: Vec<ConeView>,
    /// All face maps, identities included.
    pub face_maps: Vec<FaceMapView>,
    pub maximal: Vec<usize>,
    pub ray_count: usize,
}

impl From<&GeneralizedConeComplex> for ComplexView {
    fn from(f: &GeneralizedConeComplex) -> Self {
        ComplexView {
            cones: f
                .cones()
                .iter()
                .map(|c| ConeView {
                    dim: c.dim(),
                    rays: c.rays().iter().map(|r| ints(r)).collect(),
                })
                .collect(),
            face_maps: f
                .face_maps()
                .iter()
                .map(|m| FaceMapView {
                    source: m.source,
                    target: m.target,
                    matrix: int_rows(&m.matrix),
                })
                .collect(),
            maximal: f.maximal_cones(),
            ray_count: f.ray_count(),
        }
    }
}

impl ComplexView {
    fn proper_maps(&self) -> impl Iterator<Item = &FaceMapView> {
        self.face_maps.iter().filter(|m| {
            m.source != m.target
                || m.matrix.iter().enumerate().any(|(i, row)| {
                    row.iter()
                        .enumerate()
                        .any(|(j, x)| x.0 != BigInt::from(i32::from(i == j)))
                })
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubdivisionView {
    pub refined: ComplexView,
    /// Original cone containing each refined cone.
    pub base_cone: Vec<usize>,
    /// Rays of each refined cone in the coordinates of its base cone.
    pub rays_in_base: Vec<Vec<Vec<Int>>>,
    pub unimodular: Vec<bool>,
    pub all_unimodular: bool,
    pub preserves_volume: bool,
}

impl From<&Subdivision> for SubdivisionView {
    fn from(s: &Subdivision) -> Self {
        SubdivisionView {
            refined: (&s.refined).into(),
            base_cone: s
                .structure_map
                .assignments
                .iter()
                .map(|(t, _)| *t)
                .collect(),
            rays_in_base: s
                .rays_in_base
                .iter()
                .map(|rs| rs.iter().map(|r| ints(r)).collect())
                .collect(),
            unimodular: s.flags.iter().map(|f| f.unimodular).collect(),
            all_unimodular: s.all_unimodular(),
            preserves_volume: s.preserves_volume(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonConvexView {
    pub source_cone: usize,
    pub target_cone: usize,
    pub image_rays: Vec<Vec<Int>>,
    pub carrier_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlongView {
    pub subdivision: SubdivisionView,
    pub image_cones: Vec<usize>,
    pub image_subcomplex: ComplexView,
    pub nonconvex: Vec<NonConvexView>,
    pub factors: bool,
}

impl From<&AlongSubdivision> for AlongView {
    fn from(a: &AlongSubdivision) -> Self {
        AlongView {
            subdivision: (&a.subdivision).into(),
            image_cones: a.image_cones.clone(),
            image_subcomplex: (&a.image_subcomplex).into(),
            nonconvex: a
                .nonconvex
                .iter()
                .map(|p| NonConvexView {
                    source_cone: p.source_cone,
                    target_cone: p.target_cone,
                    image_rays: p.image_rays.iter().map(|r| ints(r)).collect(),
                    carrier_dim: p.carrier_dim,
                })
                .collect(),
            factors: a.factors,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HodgeView {
    pub dim: usize,
    /// `rows[p][q] = h^p(Ω^{q,log})`.
    pub rows: Vec<Vec<GradedEntry>>,
}

impl From<&HodgeTable> for HodgeView {
    fn from(t: &HodgeTable) -> Self {
        HodgeView {
            dim: t.dim,
            rows: (0..=t.dim)
                .map(|p| (0..=t.dim).map(|q| t.get(p, q)).collect())
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HochschildView {
    pub variance: Variance,
    pub degrees: BTreeMap<i64, GradedEntry>,
}

impl From<&HHTable> for HochschildView {
    fn from(t: &HHTable) -> Self {
        HochschildView {
            variance: t.variance,
            degrees: t.degrees.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonoidView {
    pub free_rank: usize,
    pub torsion: Vec<Int>,
    pub generators: Vec<Vec<Int>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SaturationView {
    pub monoid: MonoidView,
    pub torsion_order: Int,
    pub unit_rank: usize,
    pub added: Vec<Vec<Int>>,
    pub idempotent: bool,
    /// Connected components of `Spec k[P]` of the result.
    pub components: Int,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogDiagonalView {
    pub model: String,
    pub description: String,
    pub torus_rank: Option<usize>,
    pub conormal_rank: usize,
    pub b_subcomplex: ComplexView,
    pub refined_cone_count: usize,
    pub nonconvex_count: usize,
    pub factors: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectorView {
    pub element: Vec<u64>,
    pub empty: bool,
    pub locus: Option<String>,
    pub dim: Option<usize>,
    pub hodge: Option<HodgeView>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResultValue {
    Smith {
        invariant_factors: Vec<Int>,
        rank: usize,
        d: Vec<Vec<Int>>,
    },
    Saturation(SaturationView),
    HilbertBasis {
        elements: Vec<Vec<Int>>,
    },
    Integer {
        value: Int,
    },
    Flag {
        value: bool,
    },
    Complex(ComplexView),
    Subdivision(SubdivisionView),
    Along(AlongView),
    Hodge(HodgeView),
    Hochschild(HochschildView),
    Cyclic {
        even: u64,
        odd: u64,
    },
    LogDiagonal(LogDiagonalView),
    Sector(SectorView),
}

impl ResultValue {
    /// The face poset carried by the result, if any.
    fn complex(&self) -> Option<&ComplexView> {
        match self {
            ResultValue::Complex(c) => Some(c),
            ResultValue::Subdivision(s) => Some(&s.refined),
            ResultValue::Along(a) => Some(&a.subdivision.refined),
            ResultValue::LogDiagonal(l) => Some(&l.b_subcomplex),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Ok(Box<ResultValue>),
    Error(Diagnostic),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskReport {
    pub index: usize,
    pub op: String,
    pub args: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub outcome: Outcome,
}

impl TaskReport {
    fn title(&self) -> String {
        let call = format!("{}({})", self.op, self.args.join(", "));
        match &self.label {
            Some(l) => format!("[{}] {l}: {call}", self.index),
            None => format!("[{}] {call}", self.index),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub tasks: Vec<TaskReport>,
}

impl Report {
    pub fn succeeded(&self) -> bool {
        self.tasks
            .iter()
            .all(|t| matches!(t.outcome, Outcome::Ok(_)))
    }

    pub fn exit_code(&self) -> i32 {
        if self.succeeded() {
            0
        } else {
            1
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Dot,
}

impl std::str::FromStr for Format {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "dot" => Ok(Format::Dot),
            other => Err(CliError::FormatUnavailable(other.to_string())),
        }
    }
}

pub fn emit(report: &Report, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            Ok(s)
        }
        Format::Text => Ok(emit_text(report)),
        Format::Dot => emit_dot(report),
    }
}

fn table(out: &mut String, header: [&str; 2], rows: &[(String, String)]) {
    let w0 = rows
        .iter()
        .map(|r| r.0.chars().count())
        .chain([header[0].len()])
        .max()
        .unwrap_or(0);
    let _ = writeln!(out, "  {:>w0$}  {}", header[0], header[1]);
    for (a, b) in rows {
        let _ = writeln!(out, "  {a:>w0$}  {b}");
    }
}

fn vector(v: &[Int]) -> String {
    let parts: Vec<String> = v.iter().map(Int::to_string).collect();
    format!("({})", parts.join(", "))
}

fn complex_text(out: &mut String, c: &ComplexView) {
    let _ = writeln!(
        out,
        "  {} cones, {} rays, {} face maps",
        c.cones.len(),
        c.ray_count,
        c.face_maps.len()
    );
    for (i, cone) in c.cones.iter().enumerate() {
        let rays: Vec<String> = cone.rays.iter().map(|r| vector(r)).collect();
        let _ = writeln!(
            out,
            "  cone {i}: dim {} rays [{}]",
            cone.dim,
            rays.join(", ")
        );
    }
}

fn hodge_text(out: &mut String, h: &HodgeView) {
    for (p, row) in h.rows.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(GradedEntry::to_string).collect();
        let _ = writeln!(out, "  p={p}: {}", cells.join(" | "));
    }
}

fn value_text(out: &mut String, v: &ResultValue) {
    match v {
        ResultValue::Smith {
            invariant_factors,
            rank,
            ..
        } => {
            let _ = writeln!(
                out,
                "  rank {rank}, invariant factors {}",
                vector(invariant_factors)
            );
        }
        ResultValue::Saturation(s) => {
            let gens: Vec<String> = s.monoid.generators.iter().map(|g| vector(g)).collect();
            let _ = writeln!(
                out,
                "  ambient Z^{} ⊕ torsion {}",
                s.monoid.free_rank,
                vector(&s.monoid.torsion)
            );
            let _ = writeln!(out, "  generators [{}]", gens.join(", "));
            let _ = writeln!(
                out,
                "  torsion order {}, unit rank {}, {} added, components {}",
                s.torsion_order,
                s.unit_rank,
                s.added.len(),
                s.components
            );
        }
        ResultValue::HilbertBasis { elements } => {
            let gens: Vec<String> = elements.iter().map(|g| vector(g)).collect();
            let _ = writeln!(out, "  [{}]", gens.join(", "));
        }
        ResultValue::Integer { value } => {
            let _ = writeln!(out, "  {value}");
        }
        ResultValue::Flag { value } => {
            let _ = writeln!(out, "  {value}");
        }
        ResultValue::Complex(c) => complex_text(out, c),
        ResultValue::Subdivision(s) => {
            complex_text(out, &s.refined);
            let _ = writeln!(
                out,
                "  all unimodular: {}, preserves volume: {}",
                s.all_unimodular, s.preserves_volume
            );
        }
        ResultValue::Along(a) => {
            complex_text(out, &a.subdivision.refined);
            let _ = writeln!(
                out,
                "  image cones {:?}, non-convex pieces {}, factors: {}",
                a.image_cones,
                a.nonconvex.len(),
                a.factors
            );
        }
        ResultValue::Hodge(h) => hodge_text(out, h),
        ResultValue::Hochschild(h) => {
            let rows: Vec<(String, String)> = h
                .degrees
                .iter()
                .map(|(n, v)| (n.to_string(), v.to_string()))
                .collect();
            table(out, ["degree", "dimension"], &rows);
        }
        ResultValue::Cyclic { even, odd } => {
            table(
                out,
                ["parity", "dimension"],
                &[
                    ("even".into(), even.to_string()),
                    ("odd".into(), odd.to_string()),
                ],
            );
        }
        ResultValue::LogDiagonal(l) => {
            let _ = writeln!(out, "  B = {}", l.description);
            let _ = writeln!(
                out,
                "  conormal rank {}, refined cones {}, non-convex pieces {}",
                l.conormal_rank, l.refined_cone_count, l.nonconvex_count
            );
            complex_text(out, &l.b_subcomplex);
        }
        ResultValue::Sector(s) => match &s.locus {
            None => {
                let _ = writeln!(out, "  g = {:?}: empty", s.element);
            }
            Some(name) => {
                let _ = writeln!(out, "  g = {:?}: {name}", s.element);
                if let Some(h) = &s.hodge {
                    hodge_text(out, h);
                }
            }
        },
    }
}

fn emit_text(report: &Report) -> String {
    let mut out = String::new();
    for t in &report.tasks {
        let _ = writeln!(out, "{}", t.title());
        match &t.outcome {
            Outcome::Ok(v) => value_text(&mut out, v),
            Outcome::Error(d) => {
                let _ = writeln!(out, "  error {}: {}", d.kind, d.message);
            }
        }
    }
    out
}

fn emit_dot(report: &Report) -> Result<String, CliError> {
    let mut out = String::new();
    let mut any = false;
    for t in &report.tasks {
        let Outcome::Ok(v) = &t.outcome else { continue };
        let Some(c) = v.complex() else { continue };
        any = true;
        let _ = writeln!(out, "digraph task{} {{", t.index);
        for (i, cone) in c.cones.iter().enumerate() {
            let _ = writeln!(out, "  c{i} [label=\"{i}: dim {}\"];", cone.dim);
        }
        for m in c.proper_maps() {
            let _ = writeln!(out, "  c{} -> c{};", m.source, m.target);
        }
        let _ = writeln!(out, "}}");
    }
    if any {
        Ok(out)
    } else {
        Err(CliError::FormatUnavailable("dot".into()))
    }
}
