//! Input documents: named object definitions followed by tasks.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const VERSION: &str = "logfan/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub version: String,
    #[serde(default)]
    pub objects: Vec<ObjectDef>,
    #[serde(default)]
    pub tasks: Vec<Task>,
}

/// One named definition. Which fields apply depends on `kind`; see
/// [`ObjectDef::spec`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectDef {
    pub name: String,
    pub kind: Option<Kind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free_rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torsion: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fan: Option<FanSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snc: Option<SncSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cones: Option<Vec<ConeSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub face_maps: Option<Vec<FaceMapSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub of_model: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub toric: Option<ToricSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub product: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subdivide: Option<SubdivideSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_orders: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub characters: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutations: Option<Vec<Vec<usize>>>,
}

impl ObjectDef {
    fn present(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        macro_rules! mark {
            ($($f:ident),*) => {
                $(if self.$f.is_some() { out.push(stringify!($f)); })*
            };
        }
        mark!(
            rows,
            cols,
            free_rank,
            torsion,
            generators,
            source,
            target,
            matrix,
            builtin,
            fan,
            snc,
            cones,
            face_maps,
            of_model,
            n,
            d,
            log,
            toric,
            product,
            subdivide,
            label,
            model,
            group_orders,
            characters,
            permutations
        );
        out
    }

    /// The typed definition, checking that exactly the fields of its kind
    /// are present.
    pub fn spec(&self) -> Result<ObjectSpec, CliError> {
        let kind = self.kind.ok_or_else(|| CliError::MissingField {
            object: self.name.clone(),
            field: "kind",
        })?;
        let allowed: &[&str] = match kind {
            Kind::Matrix => &["rows", "cols"],
            Kind::Monoid => &["free_rank", "torsion", "generators"],
            Kind::Hom => &["source", "target", "matrix"],
            Kind::Complex => &["builtin", "fan", "snc", "cones", "face_maps", "of_model"],
            Kind::Model => &[
                "builtin",
                "n",
                "d",
                "log",
                "toric",
                "product",
                "subdivide",
                "label",
            ],
            Kind::Action => &["model", "group_orders", "characters", "permutations"],
        };
        if let Some(field) = self.present().into_iter().find(|f| !allowed.contains(f)) {
            return Err(CliError::UnexpectedField {
                object: self.name.clone(),
                kind,
                field,
            });
        }
        let need = |field: &'static str| CliError::MissingField {
            object: self.name.clone(),
            field,
        };
        Ok(match kind {
            Kind::Matrix => ObjectSpec::Matrix {
                rows: self.rows.clone().ok_or_else(|| need("rows"))?,
                cols: self.cols,
            },
            Kind::Monoid => ObjectSpec::Monoid {
                free_rank: self.free_rank,
                torsion: self.torsion.clone().unwrap_or_default(),
                generators: self.generators.clone().ok_or_else(|| need("generators"))?,
            },
            Kind::Hom => ObjectSpec::Hom {
                source: self.source.clone().ok_or_else(|| need("source"))?,
                target: self.target.clone().ok_or_else(|| need("target"))?,
                matrix: self.matrix.clone().ok_or_else(|| need("matrix"))?,
            },
            Kind::Complex => ObjectSpec::Complex(ComplexSpec {
                builtin: self.builtin.clone(),
                fan: self.fan.clone(),
                snc: self.snc.clone(),
                cones: self.cones.clone(),
                face_maps: self.face_maps.clone(),
                of_model: self.of_model.clone(),
            }),
            Kind::Model => ObjectSpec::Model(ModelSpec {
                builtin: self.builtin.clone(),
                n: self.n,
                d: self.d,
                log: self.log.clone(),
                toric: self.toric.clone(),
                product: self.product.clone(),
                subdivide: self.subdivide.clone(),
                label: self.label.clone(),
            }),
            Kind::Action => ObjectSpec::Action {
                model: self.model.clone().ok_or_else(|| need("model"))?,
                group_orders: self.group_orders.clone().unwrap_or_default(),
                characters: self.characters.clone().unwrap_or_default(),
                permutations: self.permutations.clone(),
            },
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Matrix,
    Monoid,
    Hom,
    Complex,
    Model,
    Action,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Kind::Matrix => "matrix",
            Kind::Monoid => "monoid",
            Kind::Hom => "hom",
            Kind::Complex => "complex",
            Kind::Model => "model",
            Kind::Action => "action",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ObjectSpec {
    Matrix {
        rows: Vec<Vec<i64>>,
        /// Needed only when `rows` is empty.
        cols: Option<usize>,
    },
    Monoid {
        free_rank: Option<usize>,
        /// Orders of the torsion factors of the ambient group.
        torsion: Vec<i64>,
        generators: Vec<Vec<i64>>,
    },
    Hom {
        source: String,
        target: String,
        matrix: Vec<Vec<i64>>,
    },
    Complex(ComplexSpec),
    Model(ModelSpec),
    Action {
        model: String,
        group_orders: Vec<u64>,
        characters: Vec<Vec<i64>>,
        permutations: Option<Vec<Vec<usize>>>,
    },
}

impl ObjectSpec {
    pub fn kind(&self) -> Kind {
        match self {
            ObjectSpec::Matrix { .. } => Kind::Matrix,
            ObjectSpec::Monoid { .. } => Kind::Monoid,
            ObjectSpec::Hom { .. } => Kind::Hom,
            ObjectSpec::Complex(_) => Kind::Complex,
            ObjectSpec::Model(_) => Kind::Model,
            ObjectSpec::Action { .. } => Kind::Action,
        }
    }

    /// Names of other objects this definition refers to, with their kinds.
    pub fn references(&self) -> Vec<(&str, Kind)> {
        match self {
            ObjectSpec::Hom { source, target, .. } => {
                vec![(source, Kind::Monoid), (target, Kind::Monoid)]
            }
            ObjectSpec::Complex(c) => c
                .of_model
                .iter()
                .map(|m| (m.as_str(), Kind::Model))
                .collect(),
            ObjectSpec::Model(m) => {
                let mut out: Vec<(&str, Kind)> = m
                    .product
                    .iter()
                    .flatten()
                    .map(|n| (n.as_str(), Kind::Model))
                    .collect();
                if let Some(s) = &m.subdivide {
                    out.push((s.model.as_str(), Kind::Model));
                }
                out
            }
            ObjectSpec::Action { model, .. } => vec![(model, Kind::Model)],
            _ => Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanSpec {
    pub rays: Vec<Vec<i64>>,
    pub cones: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SncSpec {
    pub vertices: usize,
    #[serde(default)]
    pub simplices: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeSpec {
    pub dim: usize,
    pub rays: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaceMapSpec {
    pub source: usize,
    pub target: usize,
    pub matrix: Vec<Vec<i64>>,
}

/// Exactly one of `builtin`, `fan`, `snc`, `cones` (with `face_maps`) or
/// `of_model` selects how the complex is built.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ComplexSpec {
    /// `point` or `nodal_cubic`.
    pub builtin: Option<String>,
    pub fan: Option<FanSpec>,
    pub snc: Option<SncSpec>,
    pub cones: Option<Vec<ConeSpec>>,
    pub face_maps: Option<Vec<FaceMapSpec>>,
    /// Artin fan of a previously defined model.
    pub of_model: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToricSpec {
    pub rays: Vec<Vec<i64>>,
    pub cones: Vec<Vec<usize>>,
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubdivideSpec {
    pub model: String,
    pub cone: usize,
    pub point: Vec<i64>,
}

/// Exactly one of `builtin`, `toric`, `product`, `subdivide` is set.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ModelSpec {
    /// `point`, `nodal_cubic`, `marked_p1`, `affine_space`,
    /// `projective_space` or `mixed_affine`.
    pub builtin: Option<String>,
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub log: Option<Vec<usize>>,
    pub toric: Option<ToricSpec>,
    pub product: Option<Vec<String>>,
    pub subdivide: Option<SubdivideSpec>,
    /// Display name overriding the default.
    pub label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Task {
    pub op: String,
    #[serde(default)]
    pub args: Vec<String>,
    /// Operation-specific parameters.
    #[serde(default)]
    pub params: serde_json::Map<String, serde_json::Value>,
    /// Name of the result in reports.
    #[serde(default)]
    pub label: Option<String>,
}

/// Argument kinds of every operation.
pub fn operation_signature(op: &str) -> Option<&'static [Kind]> {
    use Kind::*;
    Some(match op {
        "smith" => &[Matrix],
        "saturate" | "is_saturated" | "hilbert_basis" | "component_count" => &[Monoid],
        "fs_pushout" => &[Hom, Hom],
        "describe" | "diagonal_subdivision" | "b_subcomplex" | "star" => &[Complex],
        "product" | "is_isomorphic" => &[Complex, Complex],
        "hodge" | "hh_homology" | "hh_cohomology" | "periodic_cyclic" | "euler_check"
        | "log_diagonal" => &[Model],
        "check_firm" | "twisted_sector" | "orbifold_hh" => &[Action],
        _ => return None,
    })
}

pub const OPERATIONS: &[&str] = &[
    "smith",
    "saturate",
    "is_saturated",
    "hilbert_basis",
    "component_count",
    "fs_pushout",
    "describe",
    "product",
    "is_isomorphic",
    "star",
    "diagonal_subdivision",
    "b_subcomplex",
    "hodge",
    "hh_homology",
    "hh_cohomology",
    "periodic_cyclic",
    "euler_check",
    "log_diagonal",
    "check_firm",
    "twisted_sector",
    "orbifold_hh",
];

/// Parses and validates a document.
pub fn parse(text: &str) -> Result<Document, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: Document = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        CliError::Parse {
            line: inner.line(),
            column: inner.column(),
            path,
            message: inner.to_string(),
        }
    })?;
    validate(&doc)?;
    Ok(doc)
}

/// Checks the version tag, operation names and every reference.
pub fn validate(doc: &Document) -> Result<(), CliError> {
    if doc.version != VERSION {
        return Err(CliError::UnsupportedVersion(doc.version.clone()));
    }
    let mut kinds: BTreeMap<&str, Kind> = BTreeMap::new();
    for def in &doc.objects {
        let spec = def.spec()?;
        for (name, expected) in spec.references() {
            let found = *kinds
                .get(name)
                .ok_or_else(|| CliError::UnresolvedReference {
                    name: name.to_string(),
                    context: format!("object `{}`", def.name),
                })?;
            if found != expected {
                return Err(CliError::KindMismatch {
                    context: format!("object `{}`", def.name),
                    expected,
                    found,
                });
            }
        }
        if kinds.insert(&def.name, spec.kind()).is_some() {
            return Err(CliError::DuplicateName(def.name.clone()));
        }
    }
    for (i, task) in doc.tasks.iter().enumerate() {
        let signature =
            operation_signature(&task.op).ok_or_else(|| CliError::UnknownOperation {
                task: i,
                op: task.op.clone(),
            })?;
        if task.args.len() != signature.len() {
            return Err(CliError::Arity {
                task: i,
                op: task.op.clone(),
                expected: signature.len(),
                found: task.args.len(),
            });
        }
        for (arg, &expected) in task.args.iter().zip(signature) {
            let found = *kinds
                .get(arg.as_str())
                .ok_or_else(|| CliError::UnresolvedReference {
                    name: arg.clone(),
                    context: format!("task {i} ({})", task.op),
                })?;
            if found != expected {
                return Err(CliError::KindMismatch {
                    context: format!("task {i} ({})", task.op),
                    expected,
                    found,
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
  "version": "logfan/1",
  "objects": [
    {"name": "A2", "kind": "complex", "fan": {"rays": [[1, 0], [0, 1]], "cones": [[0, 1]]}}
  ],
  "tasks": [{"op": "product", "args": ["A2", "A2"]}]
}"#;

    #[test]
    fn minimal_document() {
        let doc = parse(MINIMAL).unwrap();
        assert_eq!(doc.objects.len(), 1);
        assert_eq!(doc.tasks.len(), 1);
    }

    #[test]
    fn unresolved_reference_names_identifier() {
        let text = MINIMAL.replace(r#"["A2", "A2"]"#, r#"["A2", "B"]"#);
        match parse(&text) {
            Err(CliError::UnresolvedReference { name, .. }) => assert_eq!(name, "B"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_operation_and_kind_mismatch() {
        let text = MINIMAL.replace("\"product\"", "\"frobnicate\"");
        assert!(matches!(
            parse(&text),
            Err(CliError::UnknownOperation { .. })
        ));
        let text = MINIMAL.replace(
            r#""op": "product", "args": ["A2", "A2"]"#,
            r#""op": "hodge", "args": ["A2"]"#,
        );
        assert!(matches!(parse(&text), Err(CliError::KindMismatch { .. })));
    }

    #[test]
    fn parse_errors_carry_position() {
        let text = MINIMAL.replace("[[1, 0], [0, 1]]", "[[1, 0], [0, \"x\"]]");
        match parse(&text) {
            Err(CliError::Parse { line, path, .. }) => {
                assert_eq!(line, 4);
                assert!(path.contains("rays"), "{path}");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse(&MINIMAL.replace("logfan/1", "logfan/9")),
            Err(CliError::UnsupportedVersion(_))
        ));
    }
}
