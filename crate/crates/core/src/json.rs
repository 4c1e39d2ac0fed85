//! Versioned JSON encodings (schema 1) for fields, groups, categories,
//! gradings, and the report types, with loaders for everything the command
//! line accepts back. Loaders re-run the full structural validation, so a
//! hand-edited file is either honest or rejected.

use std::collections::HashMap;

use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::{AlgebraError, LinearCategory};
use crate::catalog::{CatalogEntry, SpecificRow};
use crate::grading::{Grading, GradingError};
use crate::groups::{Atom, GroupDescriptor, GroupError};
use crate::pi1::{Certification, NoUniversalReport, Pi1Result};
use crate::scalars::{parse_scalar, FieldDescriptor, Scalar, ScalarError};
use crate::smash::CoveringReport;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed document: {0}")]
    Shape(String),
    #[error("unsupported schema version {0}")]
    Schema(u64),
    #[error(transparent)]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Grading(#[from] GradingError),
}

fn shape(msg: impl Into<String>) -> JsonError {
    JsonError::Shape(msg.into())
}

fn get<'a>(v: &'a Value, key: &str) -> Result<&'a Value, JsonError> {
    v.get(key).ok_or_else(|| shape(format!("missing key '{key}'")))
}

fn get_str<'a>(v: &'a Value, key: &str) -> Result<&'a str, JsonError> {
    get(v, key)?
        .as_str()
        .ok_or_else(|| shape(format!("key '{key}' must be a string")))
}

fn get_u64(v: &Value, key: &str) -> Result<u64, JsonError> {
    get(v, key)?
        .as_u64()
        .ok_or_else(|| shape(format!("key '{key}' must be a nonnegative integer")))
}

fn get_usize(v: &Value, key: &str) -> Result<usize, JsonError> {
    Ok(get_u64(v, key)? as usize)
}

fn get_array<'a>(v: &'a Value, key: &str) -> Result<&'a [Value], JsonError> {
    get(v, key)?
        .as_array()
        .map(|a| a.as_slice())
        .ok_or_else(|| shape(format!("key '{key}' must be an array")))
}

fn check_schema(v: &Value) -> Result<(), JsonError> {
    let s = get_u64(v, "schema")?;
    if s != SCHEMA_VERSION {
        return Err(JsonError::Schema(s));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Fields.

pub fn field_to_json(f: &FieldDescriptor) -> Value {
    match f {
        FieldDescriptor::Rational => json!({ "kind": "rational" }),
        FieldDescriptor::Cyclotomic { m } => json!({ "kind": "cyclotomic", "m": m }),
        FieldDescriptor::Prime { p } => json!({ "kind": "prime", "p": p }),
    }
}

pub fn field_from_json(v: &Value) -> Result<FieldDescriptor, JsonError> {
    match get_str(v, "kind")? {
        "rational" => Ok(FieldDescriptor::rational()),
        "cyclotomic" => Ok(FieldDescriptor::cyclotomic(get_u64(v, "m")?)?),
        "prime" => Ok(FieldDescriptor::prime(get_u64(v, "p")?)?),
        other => Err(shape(format!("unknown field kind '{other}'"))),
    }
}

/// Parses the command-line spelling of a field: `Q`, `Q(z<m>)` for the m-th
/// cyclotomic field, or `F<p>` for a prime field.
pub fn parse_field(s: &str) -> Result<FieldDescriptor, JsonError> {
    let s = s.trim();
    if s == "Q" {
        return Ok(FieldDescriptor::rational());
    }
    if let Some(rest) = s.strip_prefix("Q(z").and_then(|r| r.strip_suffix(')')) {
        let m: u64 = rest
            .parse()
            .map_err(|_| shape(format!("bad cyclotomic order in '{s}'")))?;
        return Ok(FieldDescriptor::cyclotomic(m)?);
    }
    if let Some(rest) = s.strip_prefix('F') {
        let p: u64 = rest
            .parse()
            .map_err(|_| shape(format!("bad prime in '{s}'")))?;
        return Ok(FieldDescriptor::prime(p)?);
    }
    Err(shape(format!(
        "unrecognized field '{s}': expected Q, Q(z<m>), or F<p>"
    )))
}

/// The command-line spelling accepted by `parse_field`.
pub fn render_field(f: &FieldDescriptor) -> String {
    match f {
        FieldDescriptor::Rational => "Q".to_string(),
        FieldDescriptor::Cyclotomic { m } => format!("Q(z{m})"),
        FieldDescriptor::Prime { p } => format!("F{p}"),
    }
}

// ---------------------------------------------------------------------------
// Groups.

fn atom_to_json(a: &Atom) -> Value {
    match a {
        Atom::FiniteAbelian { factors } => json!({ "kind": "finite_abelian", "factors": factors }),
        Atom::FiniteTable { names, table, .. } => {
            json!({ "kind": "finite_table", "names": names, "table": table })
        }
        Atom::Free { names } => json!({ "kind": "free", "names": names }),
        Atom::FreeProductCyclic { orders, names } => json!({
            "kind": "free_product_cyclic",
            "orders": orders,
            "names": names,
        }),
    }
}

pub fn group_to_json(g: &GroupDescriptor) -> Value {
    json!({
        "describe": g.describe(),
        "atoms": g.atoms().iter().map(atom_to_json).collect::<Vec<_>>(),
    })
}

fn atom_from_json(v: &Value) -> Result<GroupDescriptor, JsonError> {
    let names = |v: &Value| -> Result<Vec<String>, JsonError> {
        get_array(v, "names")?
            .iter()
            .map(|n| {
                n.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| shape("names must be strings"))
            })
            .collect()
    };
    match get_str(v, "kind")? {
        "finite_abelian" => {
            let factors: Vec<u64> = get_array(v, "factors")?
                .iter()
                .map(|f| f.as_u64().ok_or_else(|| shape("factors must be integers")))
                .collect::<Result<_, _>>()?;
            if factors.is_empty() {
                return Ok(GroupDescriptor::trivial());
            }
            Ok(GroupDescriptor::finite_abelian(factors)?)
        }
        "finite_table" => {
            let table: Vec<Vec<usize>> = get_array(v, "table")?
                .iter()
                .map(|row| {
                    row.as_array()
                        .ok_or_else(|| shape("table rows must be arrays"))?
                        .iter()
                        .map(|e| {
                            e.as_u64()
                                .map(|x| x as usize)
                                .ok_or_else(|| shape("table entries must be integers"))
                        })
                        .collect()
                })
                .collect::<Result<_, _>>()?;
            Ok(GroupDescriptor::finite_table(names(v)?, table)?)
        }
        "free" => {
            let names = names(v)?;
            Ok(GroupDescriptor::free(names.len(), Some(names))?)
        }
        "free_product_cyclic" => {
            let orders: Vec<Option<u64>> = get_array(v, "orders")?
                .iter()
                .map(|o| {
                    if o.is_null() {
                        Ok(None)
                    } else {
                        o.as_u64()
                            .map(Some)
                            .ok_or_else(|| shape("orders must be integers or null"))
                    }
                })
                .collect::<Result<_, _>>()?;
            Ok(GroupDescriptor::free_product_cyclic(orders, Some(names(v)?))?)
        }
        other => Err(shape(format!("unknown atom kind '{other}'"))),
    }
}

pub fn group_from_json(v: &Value) -> Result<GroupDescriptor, JsonError> {
    let parts: Vec<GroupDescriptor> = get_array(v, "atoms")?
        .iter()
        .map(atom_from_json)
        .collect::<Result<_, _>>()?;
    Ok(GroupDescriptor::direct_product(parts))
}

// ---------------------------------------------------------------------------
// Categories and gradings.

pub fn category_to_json(c: &LinearCategory) -> Value {
    let compose: Vec<Value> = c
        .composition_entries()
        .into_iter()
        .map(|(g, f, k, s)| json!([g, f, k, s.to_string()]))
        .collect();
    let identities: Vec<Value> = (0..c.object_count())
        .map(|x| {
            let e = c.identity_element(x);
            let hom = c.hom_basis(x, x);
            let terms: Vec<Value> = e
                .coords
                .iter()
                .enumerate()
                .filter(|(_, s)| !s.is_zero())
                .map(|(p, s)| json!([hom[p], s.to_string()]))
                .collect();
            Value::Array(terms)
        })
        .collect();
    json!({
        "objects": c.objects(),
        "basis": c
            .basis()
            .iter()
            .map(|b| json!({ "name": b.name, "source": b.source, "target": b.target }))
            .collect::<Vec<_>>(),
        "compose": compose,
        "identities": identities,
    })
}

fn scalar_term(field: &FieldDescriptor, v: &Value) -> Result<(usize, Scalar), JsonError> {
    let pair = v.as_array().filter(|a| a.len() == 2).ok_or_else(|| {
        shape("linear-combination terms must be [basis_index, coefficient] pairs")
    })?;
    let k = pair[0]
        .as_u64()
        .ok_or_else(|| shape("basis index must be an integer"))? as usize;
    let s = pair[1]
        .as_str()
        .ok_or_else(|| shape("coefficients must be strings"))?;
    Ok((k, parse_scalar(field, s)?))
}

pub fn category_from_json(
    field: &FieldDescriptor,
    v: &Value,
) -> Result<LinearCategory, JsonError> {
    let objects: Vec<String> = get_array(v, "objects")?
        .iter()
        .map(|o| {
            o.as_str()
                .map(str::to_string)
                .ok_or_else(|| shape("object names must be strings"))
        })
        .collect::<Result<_, _>>()?;
    let basis: Vec<(String, usize, usize)> = get_array(v, "basis")?
        .iter()
        .map(|b| {
            Ok((
                get_str(b, "name")?.to_string(),
                get_usize(b, "source")?,
                get_usize(b, "target")?,
            ))
        })
        .collect::<Result<_, JsonError>>()?;
    let mut compose: HashMap<(usize, usize), Vec<(usize, Scalar)>> = HashMap::new();
    for entry in get_array(v, "compose")? {
        let quad = entry.as_array().filter(|a| a.len() == 4).ok_or_else(|| {
            shape("compose entries must be [g, f, k, coefficient] quadruples")
        })?;
        let idx = |i: usize| -> Result<usize, JsonError> {
            quad[i]
                .as_u64()
                .map(|x| x as usize)
                .ok_or_else(|| shape("compose indices must be integers"))
        };
        let s = quad[3]
            .as_str()
            .ok_or_else(|| shape("coefficients must be strings"))?;
        compose
            .entry((idx(0)?, idx(1)?))
            .or_default()
            .push((idx(2)?, parse_scalar(field, s)?));
    }
    let identities: Vec<Vec<(usize, Scalar)>> = get_array(v, "identities")?
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| shape("identities must be arrays of terms"))?
                .iter()
                .map(|t| scalar_term(field, t))
                .collect()
        })
        .collect::<Result<_, _>>()?;
    Ok(LinearCategory::new(field.clone(), objects, basis, compose, identities)?)
}

pub fn grading_to_json(g: &Grading) -> Value {
    let mut degrees = serde_json::Map::new();
    for (i, b) in g.category().basis().iter().enumerate() {
        degrees.insert(
            b.name.clone(),
            Value::String(g.group().render(g.degree_by_index(i))),
        );
    }
    json!({
        "schema": SCHEMA_VERSION,
        "field": field_to_json(g.category().field()),
        "category": category_to_json(g.category()),
        "group": group_to_json(g.group()),
        "degrees": degrees,
    })
}

pub fn grading_from_json(v: &Value) -> Result<Grading, JsonError> {
    check_schema(v)?;
    let field = field_from_json(get(v, "field")?)?;
    let category = category_from_json(&field, get(v, "category")?)?;
    let group = group_from_json(get(v, "group")?)?;
    let degrees_json = get(v, "degrees")?
        .as_object()
        .ok_or_else(|| shape("degrees must be an object"))?;
    let mut degrees = HashMap::new();
    for (name, render) in degrees_json {
        let r = render
            .as_str()
            .ok_or_else(|| shape("degrees must map names to element strings"))?;
        degrees.insert(name.clone(), group.parse(r)?);
    }
    Ok(Grading::new(category, group, &degrees)?)
}

// ---------------------------------------------------------------------------
// Reports.

pub fn entry_to_json(e: &CatalogEntry) -> Value {
    json!({
        "schema": SCHEMA_VERSION,
        "name": e.name,
        "summary": e.summary,
        "grading": grading_to_json(&e.grading),
    })
}

pub fn covering_to_json(r: &CoveringReport) -> Value {
    json!({
        "schema": SCHEMA_VERSION,
        "radius": r.radius,
        "interior": r.interior,
        "boundary": r.boundary,
        "stars": r
            .stars
            .iter()
            .map(|s| json!({
                "object": s.object,
                "out_dim": s.out_dim,
                "in_dim": s.in_dim,
                "base_out": s.base_out,
                "base_in": s.base_in,
            }))
            .collect::<Vec<_>>(),
        "galois": r.galois,
    })
}

pub fn k4_table_to_json(rows: &[SpecificRow]) -> Value {
    json!({
        "schema": SCHEMA_VERSION,
        "rows": rows
            .iter()
            .map(|r| json!({
                "group": r.group,
                "trivial_dimension": r.trivial_dimension,
                "other_dimensions": r.other_dimensions,
            }))
            .collect::<Vec<_>>(),
    })
}

pub fn pi1_to_json(r: &Pi1Result) -> Value {
    let certification = match &r.certification {
        Certification::Exact => json!({ "kind": "exact" }),
        Certification::Bounded(c) => json!({
            "kind": "bounded",
            "radius": c.radius,
            "candidate_elements": c.candidate_elements,
            "compatible_tuples": c.compatible_tuples,
        }),
    };
    let projections: Vec<Value> = r
        .projections
        .iter()
        .enumerate()
        .map(|(v, h)| {
            json!({
                "node": v,
                "generator_images": h
                    .images()
                    .iter()
                    .map(|e| h.target().render(e))
                    .collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "schema": SCHEMA_VERSION,
        "tag": r.tag,
        "group": group_to_json(&r.group),
        "reference": group_to_json(&r.reference),
        "certification": certification,
        "node_groups": r.node_groups,
        "diagram_arrows": r.diagram_arrows,
        "pruned_nodes": r.pruned_nodes,
        "methods": r.methods,
        "projections": projections,
    })
}

pub fn no_universal_to_json(r: &NoUniversalReport) -> Value {
    json!({
        "schema": SCHEMA_VERSION,
        "tag": r.tag,
        "left": { "name": r.left_name, "evidence": r.left_evidence.to_string() },
        "right": { "name": r.right_name, "evidence": r.right_evidence.to_string() },
        "discriminator": r.discriminator,
        "bounded": r.bounded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::pi1;

    #[test]
    fn field_spellings_round_trip() {
        for f in [
            FieldDescriptor::rational(),
            FieldDescriptor::cyclotomic(12).unwrap(),
            FieldDescriptor::prime(5).unwrap(),
        ] {
            assert_eq!(parse_field(&render_field(&f)).unwrap(), f);
            assert_eq!(field_from_json(&field_to_json(&f)).unwrap(), f);
        }
        assert!(parse_field("R").is_err());
        assert!(parse_field("Q(z)").is_err());
        assert!(parse_field("F0").is_err());
    }

    #[test]
    fn every_catalog_entry_round_trips() {
        let field = FieldDescriptor::cyclotomic(12).unwrap();
        for entry in catalog::catalog_entries(&field).unwrap() {
            let doc = grading_to_json(&entry.grading);
            let back = grading_from_json(&doc).unwrap();
            assert_eq!(back, entry.grading, "entry {}", entry.name);
            // Serialization is deterministic.
            assert_eq!(doc.to_string(), grading_to_json(&back).to_string());
        }
    }

    #[test]
    fn cyclotomic_coefficients_survive_the_trip() {
        let field = FieldDescriptor::cyclotomic(3).unwrap();
        let fine = catalog::fine_matrix_grading(3, &field).unwrap();
        let back = grading_from_json(&grading_to_json(&fine)).unwrap();
        assert_eq!(back, fine);
    }

    #[test]
    fn limit_groups_with_table_atoms_round_trip() {
        let r = pi1::fundamental_group("M2", &FieldDescriptor::rational(), 3).unwrap();
        let back = group_from_json(&group_to_json(&r.group)).unwrap();
        assert_eq!(back, r.group);
        let doc = pi1_to_json(&r);
        assert_eq!(doc["schema"], 1);
        assert_eq!(doc["tag"], "M2");
        assert_eq!(doc["certification"]["kind"], "bounded");
        assert_eq!(doc["projections"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn loaders_reject_tampered_documents() {
        let field = FieldDescriptor::rational();
        let entry = catalog::build_entry("M2:good", &field).unwrap();
        let mut doc = grading_to_json(&entry.grading);

        doc["schema"] = json!(2);
        assert!(matches!(grading_from_json(&doc), Err(JsonError::Schema(2))));
        doc["schema"] = json!(1);

        // A degree outside the group is rejected by the element parser.
        doc["degrees"]["E_1_1"] = json!("t^9billion");
        assert!(grading_from_json(&doc).is_err());

        // A nontrivial degree on a diagonal unit loads (structure is fine)
        // but fails verification, which is the command line's exit-2 path.
        doc["degrees"]["E_1_1"] = json!("t");
        let loaded = grading_from_json(&doc).unwrap();
        let err = crate::grading::verify_grading(&loaded).unwrap_err();
        assert!(err.to_string().contains("E_1_1"));
    }

    #[test]
    fn report_emitters_have_the_stated_shapes() {
        let field = FieldDescriptor::cyclotomic(12).unwrap();
        let table = k4_table_to_json(&catalog::k4_table_report(&field).unwrap());
        assert_eq!(table["rows"].as_array().unwrap().len(), 6);
        assert_eq!(table["rows"][0]["group"], "1");
        assert_eq!(table["rows"][0]["trivial_dimension"], 4);

        let report = pi1::check_no_universal("trunc:2", &field).unwrap();
        let doc = no_universal_to_json(&report);
        assert_eq!(doc["bounded"], true);
        assert!(doc["discriminator"].as_str().unwrap().contains("invertible"));

        let entry = catalog::build_entry("k2:C2", &field).unwrap();
        let s = crate::smash::smash_product(&entry.grading, None).unwrap();
        let covering = crate::smash::verify_covering(&s).unwrap();
        let doc = covering_to_json(&covering);
        assert_eq!(doc["stars"].as_array().unwrap().len(), 2);
        assert!(doc["radius"].is_null());
    }
}
