//! Turning object definitions into library values.

use std::collections::BTreeMap;

use logfan::cone::Cone;
use logfan::conecomplex::{
    from_toric_fan, nodal_cubic_complex, snc_artin_fan, star_subdivision, FaceMap,
    GeneralizedConeComplex,
};
use logfan::lattice::{ivec, FgAbelianGroup, IntMatrix, IntVector};
use logfan::logmodel::{
    affine_space, marked_p1, mixed_affine, nodal_cubic, point, product_model, projective_space,
    subdivided_model, toric_model, LogModel,
};
use logfan::monoid::{FineMonoid, MonoidHom};
use logfan::orbifold::DiagonalAction;
use num_bigint::BigInt;

use crate::document::{ComplexSpec, Document, ModelSpec, ObjectSpec};
use crate::report::Diagnostic;

#[derive(Clone, Debug)]
pub enum Value {
    Matrix(IntMatrix),
    Monoid(FineMonoid),
    Hom(MonoidHom),
    Complex(GeneralizedConeComplex),
    Model(Box<LogModel>),
    Action(Box<DiagonalAction>),
}

pub type Built = BTreeMap<String, Result<Value, Diagnostic>>;

fn invalid(message: impl Into<String>) -> Diagnostic {
    Diagnostic {
        kind: "InvalidObject".into(),
        message: message.into(),
    }
}

pub fn matrix(rows: &[Vec<i64>], cols: Option<usize>) -> Result<IntMatrix, Diagnostic> {
    let width = cols.or_else(|| rows.first().map(Vec::len)).unwrap_or(0);
    IntMatrix::from_rows(rows.iter().map(|r| ivec(r)).collect(), width)
        .map_err(|e| Diagnostic::from_error(&e))
}

fn vectors(rows: &[Vec<i64>]) -> Vec<IntVector> {
    rows.iter().map(|r| ivec(r)).collect()
}

/// Builds every object in order. Failures are recorded per object.
pub fn build_all(doc: &Document, truncation: usize) -> Built {
    let mut built = Built::new();
    for def in &doc.objects {
        let value = def
            .spec()
            .map_err(|e| invalid(e.to_string()))
            .and_then(|spec| build(&spec, &built, truncation));
        built.insert(def.name.clone(), value);
    }
    built
}

fn lookup<'a>(built: &'a Built, name: &str) -> Result<&'a Value, Diagnostic> {
    match built.get(name) {
        Some(Ok(v)) => Ok(v),
        Some(Err(e)) => Err(Diagnostic {
            kind: "DependencyFailed".into(),
            message: format!("`{name}` could not be built: {}", e.message),
        }),
        None => Err(Diagnostic {
            kind: "UnresolvedReference".into(),
            message: format!("`{name}` is not defined"),
        }),
    }
}

pub fn lookup_model<'a>(built: &'a Built, name: &str) -> Result<&'a LogModel, Diagnostic> {
    match lookup(built, name)? {
        Value::Model(m) => Ok(m),
        _ => Err(invalid(format!("`{name}` is not a model"))),
    }
}

fn lookup_monoid<'a>(built: &'a Built, name: &str) -> Result<&'a FineMonoid, Diagnostic> {
    match lookup(built, name)? {
        Value::Monoid(m) => Ok(m),
        _ => Err(invalid(format!("`{name}` is not a monoid"))),
    }
}

pub fn lookup_value<'a>(built: &'a Built, name: &str) -> Result<&'a Value, Diagnostic> {
    lookup(built, name)
}

fn build(spec: &ObjectSpec, built: &Built, truncation: usize) -> Result<Value, Diagnostic> {
    match spec {
        ObjectSpec::Matrix { rows, cols } => Ok(Value::Matrix(matrix(rows, *cols)?)),
        ObjectSpec::Monoid {
            free_rank,
            torsion,
            generators,
        } => {
            let coords = generators.first().map(Vec::len);
            let free = free_rank
                .or_else(|| coords.map(|c| c.saturating_sub(torsion.len())))
                .unwrap_or(0);
            let group =
                FgAbelianGroup::new(free, torsion.iter().map(|&t| BigInt::from(t)).collect())
                    .map_err(|e| Diagnostic::from_error(&e))?;
            FineMonoid::new(group, vectors(generators))
                .map(Value::Monoid)
                .map_err(|e| Diagnostic::from_error(&e))
        }
        ObjectSpec::Hom {
            source,
            target,
            matrix: rows,
        } => {
            let s = lookup_monoid(built, source)?.clone();
            let t = lookup_monoid(built, target)?.clone();
            let m = matrix(rows, Some(s.ambient().coords()))?;
            MonoidHom::new(s, t, m)
                .map(Value::Hom)
                .map_err(|e| Diagnostic::from_error(&e))
        }
        ObjectSpec::Complex(c) => build_complex(c, built).map(Value::Complex),
        ObjectSpec::Model(m) => {
            build_model(m, built, truncation).map(|m| Value::Model(Box::new(m)))
        }
        ObjectSpec::Action {
            model,
            group_orders,
            characters,
            permutations,
        } => {
            let x = lookup_model(built, model)?.clone();
            DiagonalAction::new(
                x,
                group_orders.clone(),
                characters.clone(),
                permutations.clone(),
            )
            .map(|a| Value::Action(Box::new(a)))
            .map_err(|e| Diagnostic::from_error(&e))
        }
    }
}

fn exactly_one(name: &str, flags: &[bool]) -> Result<(), Diagnostic> {
    match flags.iter().filter(|&&f| f).count() {
        1 => Ok(()),
        _ => Err(invalid(format!("a {name} needs exactly one construction"))),
    }
}

fn build_complex(c: &ComplexSpec, built: &Built) -> Result<GeneralizedConeComplex, Diagnostic> {
    exactly_one(
        "complex",
        &[
            c.builtin.is_some(),
            c.fan.is_some(),
            c.snc.is_some(),
            c.cones.is_some(),
            c.of_model.is_some(),
        ],
    )?;
    let err = |e: logfan::conecomplex::ComplexError| Diagnostic::from_error(&e);
    if let Some(b) = &c.builtin {
        return match b.as_str() {
            "point" => Ok(GeneralizedConeComplex::point()),
            "nodal_cubic" | "waffle" => Ok(nodal_cubic_complex()),
            other => Err(invalid(format!("unknown built-in complex `{other}`"))),
        };
    }
    if let Some(f) = &c.fan {
        let rank = f.rays.first().map(Vec::len).unwrap_or(0);
        return from_toric_fan(&vectors(&f.rays), &f.cones, rank).map_err(err);
    }
    if let Some(s) = &c.snc {
        return snc_artin_fan(s.vertices, &s.simplices).map_err(err);
    }
    if let Some(m) = &c.of_model {
        return Ok(lookup_model(built, m)?.artin_fan.clone());
    }
    let cones = c
        .cones
        .as_ref()
        .expect("one construction is present")
        .iter()
        .map(|k| Cone::new(k.dim, &vectors(&k.rays)).map_err(|e| Diagnostic::from_error(&e)))
        .collect::<Result<Vec<_>, _>>()?;
    let maps = c
        .face_maps
        .iter()
        .flatten()
        .map(|m| {
            let cols = cones.get(m.source).map(Cone::dim);
            Ok(FaceMap {
                source: m.source,
                target: m.target,
                matrix: matrix(&m.matrix, cols)?,
            })
        })
        .collect::<Result<Vec<_>, Diagnostic>>()?;
    GeneralizedConeComplex::new(cones, maps).map_err(err)
}

fn build_model(m: &ModelSpec, built: &Built, truncation: usize) -> Result<LogModel, Diagnostic> {
    exactly_one(
        "model",
        &[
            m.builtin.is_some(),
            m.toric.is_some(),
            m.product.is_some(),
            m.subdivide.is_some(),
        ],
    )?;
    let model_err = |e: logfan::logmodel::ModelError| Diagnostic::from_error(&e);
    let need = |field: Option<usize>, what: &str| {
        field.ok_or_else(|| invalid(format!("built-in model needs `{what}`")))
    };
    let model = if let Some(b) = &m.builtin {
        match b.as_str() {
            "point" => point(),
            "nodal_cubic" => nodal_cubic(),
            "marked_p1" => marked_p1(need(m.n, "n")?),
            "affine_space" => affine_space(need(m.d, "d")?, truncation),
            "projective_space" => projective_space(need(m.d, "d")?),
            "mixed_affine" => {
                mixed_affine(need(m.n, "n")?, m.log.as_deref().unwrap_or(&[]), truncation)
                    .map_err(model_err)?
            }
            other => return Err(invalid(format!("unknown built-in model `{other}`"))),
        }
    } else if let Some(t) = &m.toric {
        let rank = t.rays.first().map(Vec::len).unwrap_or(0);
        toric_model(&vectors(&t.rays), &t.cones, rank, t.complete, truncation).map_err(model_err)?
    } else if let Some(names) = &m.product {
        let (first, rest) = names
            .split_first()
            .ok_or_else(|| invalid("a product needs at least one factor"))?;
        let mut acc = lookup_model(built, first)?.clone();
        for n in rest {
            acc = product_model(&acc, lookup_model(built, n)?).map_err(model_err)?;
        }
        acc
    } else {
        let s = m.subdivide.as_ref().expect("one construction is present");
        let x = lookup_model(built, &s.model)?;
        let sub = star_subdivision(&x.artin_fan, s.cone, &ivec(&s.point))
            .map_err(|e| Diagnostic::from_error(&e))?;
        subdivided_model(x, &sub).map_err(model_err)?
    };
    Ok(match &m.label {
        Some(l) => model.with_name(l.clone()),
        None => model,
    })
}
