//! Executes the tasks of a validated document.

use logfan::conecomplex::{
    b_subcomplex, diagonal, product, star_subdivision, subdivide_along, GeneralizedConeComplex,
};
use logfan::hkr::{euler_check, hh_cohomology, hh_homology, log_diagonal, periodic_cyclic};
use logfan::lattice::{ivec, smith_normal_form};
use logfan::logmodel::LogModel;
use logfan::monoid::{
    fs_pushout, hilbert_basis, is_saturated, saturate, spec_component_count, FineMonoid,
    SaturationReport,
};
use logfan::orbifold::{
    check_firm, orbifold_hh, orbifold_hh_to_order, twisted_sector, DiagonalAction,
};
use num_bigint::BigInt;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::document::{Document, Task};
use crate::objects::{build_all, lookup_value, Built, Value};
use crate::report::{
    int_rows, ints, Diagnostic, HodgeView, Int, LogDiagonalView, MonoidView, Outcome, Report,
    ResultValue, SaturationView, SectorView, TaskReport,
};

pub const DEFAULT_TRUNCATION: usize = logfan::logmodel::DEFAULT_TRUNCATION;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub truncation: usize,
    /// Worker threads; 0 picks one per core.
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            truncation: DEFAULT_TRUNCATION,
            jobs: 0,
        }
    }
}

pub fn run(doc: &Document, cfg: RunConfig) -> Report {
    let built = build_all(doc, cfg.truncation);
    let indexed: Vec<(usize, &Task)> = doc.tasks.iter().enumerate().collect();
    let exec = |&(index, task): &(usize, &Task)| TaskReport {
        index,
        op: task.op.clone(),
        args: task.args.clone(),
        label: task.label.clone(),
        outcome: match execute(task, &built) {
            Ok(v) => Outcome::Ok(Box::new(v)),
            Err(d) => Outcome::Error(d),
        },
    };
    let tasks = match rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
    {
        Ok(pool) => pool.install(|| indexed.par_iter().map(exec).collect()),
        Err(_) => indexed.iter().map(exec).collect(),
    };
    Report {
        version: doc.version.clone(),
        tasks,
    }
}

fn err<E: std::error::Error>(e: E) -> Diagnostic {
    Diagnostic::from_error(&e)
}

fn params<T: DeserializeOwned>(task: &Task) -> Result<T, Diagnostic> {
    serde_json::from_value(serde_json::Value::Object(task.params.clone())).map_err(|e| Diagnostic {
        kind: "InvalidParams".into(),
        message: format!("`{}`: {e}", task.op),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NoParams {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentParams {
    #[serde(default)]
    require_saturated: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StarParams {
    cone: usize,
    point: Vec<i64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SectorParams {
    element: Vec<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OrderParams {
    #[serde(default)]
    order: Option<usize>,
}

fn arg<'a>(task: &Task, built: &'a Built, i: usize) -> Result<&'a Value, Diagnostic> {
    lookup_value(built, &task.args[i])
}

fn monoid_view(p: &FineMonoid) -> MonoidView {
    MonoidView {
        free_rank: p.ambient().free_rank,
        torsion: ints(&p.ambient().torsion_orders),
        generators: p.generators().iter().map(|g| ints(g)).collect(),
    }
}

fn saturation_view(r: &SaturationReport) -> Result<SaturationView, Diagnostic> {
    Ok(SaturationView {
        monoid: monoid_view(&r.saturated),
        torsion_order: Int(r.torsion_order.clone()),
        unit_rank: r.unit_rank,
        added: r.added.iter().map(|g| ints(g)).collect(),
        idempotent: r.idempotent,
        components: Int(spec_component_count(&r.saturated, false).map_err(err)?),
    })
}

fn sector_view(a: &DiagonalAction, g: &[u64]) -> Result<ResultValue, Diagnostic> {
    let s = twisted_sector(a, g).map_err(err)?;
    Ok(ResultValue::Sector(SectorView {
        element: s.element.clone(),
        empty: s.locus.is_none(),
        locus: s.locus.as_ref().map(|m| m.name.clone()),
        dim: s.locus.as_ref().map(|m| m.dim),
        hodge: s.hodge_contribution.as_ref().map(HodgeView::from),
    }))
}

fn log_diagonal_view(x: &LogModel) -> Result<ResultValue, Diagnostic> {
    let pic = log_diagonal(x).map_err(err)?;
    Ok(ResultValue::LogDiagonal(LogDiagonalView {
        model: pic.base_model.name.clone(),
        description: pic.b_description.text.clone(),
        torus_rank: pic.b_description.torus_rank,
        conormal_rank: pic.conormal_rank,
        b_subcomplex: (&pic.b_subcomplex).into(),
        refined_cone_count: pic.diagonal_subdivision.subdivision.refined.cone_count(),
        nonconvex_count: pic.diagonal_subdivision.nonconvex.len(),
        factors: pic.diagonal_subdivision.factors,
    }))
}

fn execute(task: &Task, built: &Built) -> Result<ResultValue, Diagnostic> {
    let op = task.op.as_str();
    if !matches!(
        op,
        "star" | "twisted_sector" | "orbifold_hh" | "component_count"
    ) {
        params::<NoParams>(task)?;
    }
    match (op, arg(task, built, 0)?) {
        ("smith", Value::Matrix(m)) => {
            let s = smith_normal_form(m);
            Ok(ResultValue::Smith {
                invariant_factors: ints(&s.invariant_factors()),
                rank: s.rank(),
                d: int_rows(&s.d),
            })
        }
        ("saturate", Value::Monoid(p)) => {
            Ok(ResultValue::Saturation(saturation_view(&saturate(p))?))
        }
        ("is_saturated", Value::Monoid(p)) => Ok(ResultValue::Flag {
            value: is_saturated(p),
        }),
        ("hilbert_basis", Value::Monoid(p)) => {
            if !p.ambient().torsion_orders.is_empty() {
                return Err(Diagnostic {
                    kind: "ScopeExceeded".into(),
                    message: "Hilbert bases are computed in torsion-free ambient groups".into(),
                });
            }
            let hb = hilbert_basis(p.generators(), p.ambient().coords()).map_err(err)?;
            Ok(ResultValue::HilbertBasis {
                elements: hb.iter().map(|g| ints(g)).collect(),
            })
        }
        ("component_count", Value::Monoid(p)) => {
            let ComponentParams { require_saturated } = params(task)?;
            Ok(ResultValue::Integer {
                value: Int(spec_component_count(p, require_saturated).map_err(err)?),
            })
        }
        ("fs_pushout", Value::Hom(f)) => {
            let Value::Hom(g) = arg(task, built, 1)? else {
                return Err(kind_error(task));
            };
            let r = fs_pushout(f, g).map_err(err)?;
            Ok(ResultValue::Saturation(saturation_view(&r)?))
        }
        ("describe", Value::Complex(f)) => Ok(ResultValue::Complex(f.into())),
        ("product", Value::Complex(f)) => {
            let g = complex_arg(task, built, 1)?;
            Ok(ResultValue::Complex((&product(f, g).complex).into()))
        }
        ("is_isomorphic", Value::Complex(f)) => {
            let g = complex_arg(task, built, 1)?;
            Ok(ResultValue::Flag {
                value: f.is_isomorphic(g),
            })
        }
        ("star", Value::Complex(f)) => {
            let StarParams { cone, point } = params(task)?;
            let s = star_subdivision(f, cone, &ivec(&point)).map_err(err)?;
            Ok(ResultValue::Subdivision((&s).into()))
        }
        ("diagonal_subdivision", Value::Complex(f)) => {
            let a = subdivide_along(&diagonal(f)).map_err(err)?;
            Ok(ResultValue::Along((&a).into()))
        }
        ("b_subcomplex", Value::Complex(f)) => {
            let a = subdivide_along(&diagonal(f)).map_err(err)?;
            Ok(ResultValue::Complex((&b_subcomplex(f, &a)).into()))
        }
        ("hodge", Value::Model(x)) => Ok(ResultValue::Hodge((&x.hodge).into())),
        ("hh_homology", Value::Model(x)) => Ok(ResultValue::Hochschild(
            (&hh_homology(x).map_err(err)?).into(),
        )),
        ("hh_cohomology", Value::Model(x)) => Ok(ResultValue::Hochschild(
            (&hh_cohomology(x).map_err(err)?).into(),
        )),
        ("periodic_cyclic", Value::Model(x)) => {
            let c = periodic_cyclic(x).map_err(err)?;
            Ok(ResultValue::Cyclic {
                even: c.even,
                odd: c.odd,
            })
        }
        ("euler_check", Value::Model(x)) => Ok(ResultValue::Integer {
            value: Int(BigInt::from(euler_check(x).map_err(err)?)),
        }),
        ("log_diagonal", Value::Model(x)) => log_diagonal_view(x),
        ("check_firm", Value::Action(a)) => Ok(ResultValue::Flag {
            value: check_firm(a),
        }),
        ("twisted_sector", Value::Action(a)) => {
            let SectorParams { element } = params(task)?;
            sector_view(a, &element)
        }
        ("orbifold_hh", Value::Action(a)) => {
            let OrderParams { order } = params(task)?;
            let t = match order {
                Some(n) => orbifold_hh_to_order(a, n),
                None => orbifold_hh(a),
            }
            .map_err(err)?;
            Ok(ResultValue::Hochschild((&t).into()))
        }
        _ => Err(kind_error(task)),
    }
}

fn complex_arg<'a>(
    task: &Task,
    built: &'a Built,
    i: usize,
) -> Result<&'a GeneralizedConeComplex, Diagnostic> {
    match arg(task, built, i)? {
        Value::Complex(g) => Ok(g),
        _ => Err(kind_error(task)),
    }
}

fn kind_error(task: &Task) -> Diagnostic {
    Diagnostic {
        kind: "KindMismatch".into(),
        message: format!("`{}` received arguments of the wrong kind", task.op),
    }
}
