//! The JSON documents spoken by the command-line tool: FMT models and
//! Hilbert proofs. Validation reports JSON pointer paths, and serialization
//! is deterministic (relations in canonical index order, valuation keys in
//! numeric order), so identical inputs produce byte-identical documents.
//!
//! Model document:
//!
//! ```json
//! {
//!   "kind": "prop",
//!   "worlds": [0, 1, 2],
//!   "root": 0,
//!   "relations": [{"index": "top -> p & q", "edges": [[0, 0], [0, 1]]}],
//!   "default": "total",
//!   "valuation": {"2": ["p"]}
//! }
//! ```
//!
//! Modal documents use `"kind": "modal"` and omit `root`. The default may
//! also be `{"edges": [[a, b], ...]}`.
//!
//! Proof document:
//!
//! ```json
//! {
//!   "logic": "vf",
//!   "axioms": ["~~top"],
//!   "lines": [
//!     {"formula": "p & q -> q", "by": {"schema": 2, "subst": {"A": "p", "B": "q"}}},
//!     {"formula": "~~top", "by": {"extra": 0}},
//!     {"formula": "p & q -> q & q", "by": {"rule": "rc", "from": [0, 0]}}
//!   ]
//! }
//! ```
//!
//! N proofs use `"logic": "n"`, justification `{"taut": true}`, and the
//! rules `mp` and `nec`.

use serde_json::{json, Map, Value};
use std::collections::BTreeSet;

use crate::formula::{ModalFormula, PropFormula};
use crate::hilbert::{
    NJust, NLine, NProof, NRule, Proof, VfJust, VfLine, VfProof, VfRule,
};
use crate::parse::{parse_modal, parse_prop};
use crate::semantics::{
    EdgeSet, ModalFmtFrame, ModalFmtModel, PropFmtFrame, PropFmtModel, RelationDefault,
    RelationFamily, Valuation, World,
};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("{pointer}: {message}")]
pub struct JsonError {
    pub pointer: String,
    pub message: String,
}

fn err<T>(pointer: impl Into<String>, message: impl Into<String>) -> Result<T, JsonError> {
    Err(JsonError {
        pointer: pointer.into(),
        message: message.into(),
    })
}

/// A model in either language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelDoc {
    Prop(PropFmtModel),
    Modal(ModalFmtModel),
}

fn edges_to_json(edges: &EdgeSet) -> Value {
    Value::Array(
        edges
            .iter()
            .map(|(a, b)| json!([a, b]))
            .collect(),
    )
}

fn default_to_json(default: &RelationDefault) -> Value {
    match default {
        RelationDefault::Total => json!("total"),
        RelationDefault::Edges(edges) => json!({ "edges": edges_to_json(edges) }),
    }
}

fn valuation_to_json(valuation: &Valuation) -> Value {
    let mut map = Map::new();
    for (world, atoms) in valuation {
        map.insert(
            world.to_string(),
            Value::Array(atoms.iter().map(|a| json!(a)).collect()),
        );
    }
    Value::Object(map)
}

fn relations_to_json<F: Ord + Clone + std::fmt::Display>(family: &RelationFamily<F>) -> Value {
    Value::Array(
        family
            .explicit_entries()
            .map(|(index, edges)| {
                json!({
                    "index": index.to_string(),
                    "edges": edges_to_json(edges),
                })
            })
            .collect(),
    )
}

/// Serialize a model document.
pub fn model_to_json(doc: &ModelDoc) -> Value {
    match doc {
        ModelDoc::Prop(m) => json!({
            "kind": "prop",
            "worlds": m.frame().worlds().iter().collect::<Vec<_>>(),
            "root": m.frame().root(),
            "relations": relations_to_json(m.frame().relations()),
            "default": default_to_json(m.frame().relations().default_edges()),
            "valuation": valuation_to_json(m.valuation()),
        }),
        ModelDoc::Modal(m) => json!({
            "kind": "modal",
            "worlds": m.frame().worlds().iter().collect::<Vec<_>>(),
            "relations": relations_to_json(m.frame().relations()),
            "default": default_to_json(m.frame().relations().default_edges()),
            "valuation": valuation_to_json(m.valuation()),
        }),
    }
}

fn expect_object<'v>(v: &'v Value, pointer: &str) -> Result<&'v Map<String, Value>, JsonError> {
    v.as_object()
        .ok_or(())
        .or_else(|_| err(pointer, "expected an object"))
}

fn expect_array<'v>(v: &'v Value, pointer: &str) -> Result<&'v Vec<Value>, JsonError> {
    v.as_array()
        .ok_or(())
        .or_else(|_| err(pointer, "expected an array"))
}

fn expect_str<'v>(v: &'v Value, pointer: &str) -> Result<&'v str, JsonError> {
    v.as_str()
        .ok_or(())
        .or_else(|_| err(pointer, "expected a string"))
}

fn expect_world(v: &Value, pointer: &str) -> Result<World, JsonError> {
    v.as_u64()
        .ok_or(())
        .or_else(|_| err(pointer, "expected a non-negative world id"))
}

fn field<'v>(
    obj: &'v Map<String, Value>,
    name: &str,
    pointer: &str,
) -> Result<&'v Value, JsonError> {
    obj.get(name)
        .ok_or(())
        .or_else(|_| err(pointer, format!("missing field `{name}`")))
}

fn parse_edges(v: &Value, pointer: &str) -> Result<EdgeSet, JsonError> {
    let mut edges = EdgeSet::new();
    for (i, pair) in expect_array(v, pointer)?.iter().enumerate() {
        let ptr = format!("{pointer}/{i}");
        let pair = expect_array(pair, &ptr)?;
        if pair.len() != 2 {
            return err(&ptr, "expected a two-element [from, to] pair");
        }
        let a = expect_world(&pair[0], &format!("{ptr}/0"))?;
        let b = expect_world(&pair[1], &format!("{ptr}/1"))?;
        edges.insert((a, b));
    }
    Ok(edges)
}

fn parse_default(v: &Value, pointer: &str) -> Result<RelationDefault, JsonError> {
    match v {
        Value::String(s) if s == "total" => Ok(RelationDefault::Total),
        Value::Object(obj) => {
            let edges = field(obj, "edges", pointer)?;
            Ok(RelationDefault::Edges(parse_edges(
                edges,
                &format!("{pointer}/edges"),
            )?))
        }
        _ => err(pointer, "expected \"total\" or {\"edges\": [...]}"),
    }
}

fn parse_valuation(v: &Value, pointer: &str) -> Result<Valuation, JsonError> {
    let mut valuation = Valuation::new();
    for (key, atoms) in expect_object(v, pointer)? {
        let ptr = format!("{pointer}/{key}");
        let world: World = key
            .parse()
            .map_err(|_| JsonError {
                pointer: ptr.clone(),
                message: "valuation key is not a world id".to_string(),
            })?;
        let mut set = BTreeSet::new();
        for (i, atom) in expect_array(atoms, &ptr)?.iter().enumerate() {
            set.insert(expect_str(atom, &format!("{ptr}/{i}"))?.to_string());
        }
        valuation.insert(world, set);
    }
    Ok(valuation)
}

/// Deserialize and validate a model document.
pub fn model_from_json(v: &Value) -> Result<ModelDoc, JsonError> {
    let obj = expect_object(v, "")?;
    let kind = expect_str(field(obj, "kind", "")?, "/kind")?;
    if kind != "prop" && kind != "modal" {
        return err("/kind", "expected \"prop\" or \"modal\"");
    }

    let mut worlds = BTreeSet::new();
    for (i, w) in expect_array(field(obj, "worlds", "")?, "/worlds")?
        .iter()
        .enumerate()
    {
        worlds.insert(expect_world(w, &format!("/worlds/{i}"))?);
    }

    let default = match obj.get("default") {
        Some(v) => parse_default(v, "/default")?,
        None => RelationDefault::Total,
    };
    let valuation = match obj.get("valuation") {
        Some(v) => parse_valuation(v, "/valuation")?,
        None => Valuation::new(),
    };
    let relations_json = match obj.get("relations") {
        Some(v) => expect_array(v, "/relations")?.clone(),
        None => Vec::new(),
    };

    if kind == "prop" {
        let root = expect_world(field(obj, "root", "")?, "/root")?;
        let mut relations = RelationFamily::with_default(default);
        for (i, entry) in relations_json.iter().enumerate() {
            let ptr = format!("/relations/{i}");
            let entry = expect_object(entry, &ptr)?;
            let index_text = expect_str(field(entry, "index", &ptr)?, &format!("{ptr}/index"))?;
            let index = parse_prop(index_text).map_err(|e| JsonError {
                pointer: format!("{ptr}/index"),
                message: e.to_string(),
            })?;
            let edges = parse_edges(field(entry, "edges", &ptr)?, &format!("{ptr}/edges"))?;
            relations.insert(index, edges);
        }
        let frame = PropFmtFrame::new(worlds, relations, root)
            .map_err(|e| JsonError {
                pointer: String::new(),
                message: e.to_string(),
            })?;
        let model = PropFmtModel::new(frame, valuation).map_err(|e| JsonError {
            pointer: "/valuation".to_string(),
            message: e.to_string(),
        })?;
        Ok(ModelDoc::Prop(model))
    } else {
        if obj.contains_key("root") {
            return err("/root", "modal models have no root");
        }
        let mut relations = RelationFamily::with_default(default);
        for (i, entry) in relations_json.iter().enumerate() {
            let ptr = format!("/relations/{i}");
            let entry = expect_object(entry, &ptr)?;
            let index_text = expect_str(field(entry, "index", &ptr)?, &format!("{ptr}/index"))?;
            let index = parse_modal(index_text).map_err(|e| JsonError {
                pointer: format!("{ptr}/index"),
                message: e.to_string(),
            })?;
            let edges = parse_edges(field(entry, "edges", &ptr)?, &format!("{ptr}/edges"))?;
            relations.insert(index, edges);
        }
        let frame = ModalFmtFrame::new(worlds, relations).map_err(|e| JsonError {
            pointer: String::new(),
            message: e.to_string(),
        })?;
        let model = ModalFmtModel::new(frame, valuation).map_err(|e| JsonError {
            pointer: "/valuation".to_string(),
            message: e.to_string(),
        })?;
        Ok(ModelDoc::Modal(model))
    }
}

fn vf_just_to_json(just: &VfJust) -> Value {
    match just {
        VfJust::Axiom { schema, subst } => {
            let mut map = Map::new();
            for (k, f) in subst {
                map.insert(k.clone(), json!(f.to_string()));
            }
            json!({ "schema": schema, "subst": Value::Object(map) })
        }
        VfJust::Extra(k) => json!({ "extra": k }),
        VfJust::Rule { rule, from } => json!({ "rule": rule.name(), "from": from }),
    }
}

fn n_just_to_json(just: &NJust) -> Value {
    match just {
        NJust::Taut => json!({ "taut": true }),
        NJust::Extra(k) => json!({ "extra": k }),
        NJust::Rule { rule, from } => json!({ "rule": rule.name(), "from": from }),
    }
}

/// Serialize a proof document.
pub fn proof_to_json(proof: &Proof) -> Value {
    match proof {
        Proof::Vf(p) => json!({
            "logic": "vf",
            "axioms": p.axioms.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            "lines": p.lines.iter().map(|l| json!({
                "formula": l.formula.to_string(),
                "by": vf_just_to_json(&l.just),
            })).collect::<Vec<_>>(),
        }),
        Proof::N(p) => json!({
            "logic": "n",
            "axioms": p.axioms.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            "lines": p.lines.iter().map(|l| json!({
                "formula": l.formula.to_string(),
                "by": n_just_to_json(&l.just),
            })).collect::<Vec<_>>(),
        }),
    }
}

fn parse_from(v: &Value, pointer: &str) -> Result<Vec<usize>, JsonError> {
    let mut out = Vec::new();
    for (i, n) in expect_array(v, pointer)?.iter().enumerate() {
        let n = n
            .as_u64()
            .ok_or(())
            .or_else(|_| err(format!("{pointer}/{i}"), "expected a line index"))?;
        out.push(n as usize);
    }
    Ok(out)
}

/// Deserialize and validate a proof document.
pub fn proof_from_json(v: &Value) -> Result<Proof, JsonError> {
    let obj = expect_object(v, "")?;
    let logic = expect_str(field(obj, "logic", "")?, "/logic")?;
    if logic != "vf" && logic != "n" {
        return err("/logic", "expected \"vf\" or \"n\"");
    }
    let axiom_texts: Vec<&str> = {
        let mut out = Vec::new();
        match obj.get("axioms") {
            None => {}
            Some(v) => {
                for (i, a) in expect_array(v, "/axioms")?.iter().enumerate() {
                    out.push(expect_str(a, &format!("/axioms/{i}"))?);
                }
            }
        }
        out
    };
    let lines_json = expect_array(field(obj, "lines", "")?, "/lines")?;

    if logic == "vf" {
        let mut axioms = Vec::new();
        for (i, text) in axiom_texts.iter().enumerate() {
            axioms.push(parse_prop(text).map_err(|e| JsonError {
                pointer: format!("/axioms/{i}"),
                message: e.to_string(),
            })?);
        }
        let mut lines = Vec::new();
        for (i, line) in lines_json.iter().enumerate() {
            let ptr = format!("/lines/{i}");
            let line = expect_object(line, &ptr)?;
            let formula_text =
                expect_str(field(line, "formula", &ptr)?, &format!("{ptr}/formula"))?;
            let formula = parse_prop(formula_text).map_err(|e| JsonError {
                pointer: format!("{ptr}/formula"),
                message: e.to_string(),
            })?;
            let by = expect_object(field(line, "by", &ptr)?, &format!("{ptr}/by"))?;
            let by_ptr = format!("{ptr}/by");
            let just = if let Some(schema) = by.get("schema") {
                let schema = schema
                    .as_u64()
                    .ok_or(())
                    .or_else(|_| err(format!("{by_ptr}/schema"), "expected a schema number"))?
                    as u8;
                let mut subst = std::collections::BTreeMap::new();
                if let Some(s) = by.get("subst") {
                    for (k, text) in expect_object(s, &format!("{by_ptr}/subst"))? {
                        let sub_ptr = format!("{by_ptr}/subst/{k}");
                        let text = expect_str(text, &sub_ptr)?;
                        subst.insert(
                            k.clone(),
                            parse_prop(text).map_err(|e| JsonError {
                                pointer: sub_ptr,
                                message: e.to_string(),
                            })?,
                        );
                    }
                }
                VfJust::Axiom { schema, subst }
            } else if let Some(k) = by.get("extra") {
                let k = k
                    .as_u64()
                    .ok_or(())
                    .or_else(|_| err(format!("{by_ptr}/extra"), "expected an axiom index"))?;
                VfJust::Extra(k as usize)
            } else if let Some(name) = by.get("rule") {
                let name = expect_str(name, &format!("{by_ptr}/rule"))?;
                let rule = VfRule::from_name(name)
                    .ok_or(())
                    .or_else(|_| err(format!("{by_ptr}/rule"), format!("unknown rule `{name}`")))?;
                let from = parse_from(field(by, "from", &by_ptr)?, &format!("{by_ptr}/from"))?;
                VfJust::Rule { rule, from }
            } else {
                return err(&by_ptr, "expected schema, extra, or rule justification");
            };
            lines.push(VfLine { formula, just });
        }
        Ok(Proof::Vf(VfProof { axioms, lines }))
    } else {
        let mut axioms = Vec::new();
        for (i, text) in axiom_texts.iter().enumerate() {
            axioms.push(parse_modal(text).map_err(|e| JsonError {
                pointer: format!("/axioms/{i}"),
                message: e.to_string(),
            })?);
        }
        let mut lines = Vec::new();
        for (i, line) in lines_json.iter().enumerate() {
            let ptr = format!("/lines/{i}");
            let line = expect_object(line, &ptr)?;
            let formula_text =
                expect_str(field(line, "formula", &ptr)?, &format!("{ptr}/formula"))?;
            let formula = parse_modal(formula_text).map_err(|e| JsonError {
                pointer: format!("{ptr}/formula"),
                message: e.to_string(),
            })?;
            let by = expect_object(field(line, "by", &ptr)?, &format!("{ptr}/by"))?;
            let by_ptr = format!("{ptr}/by");
            let just = if by.get("taut").is_some_and(|t| t == &json!(true)) {
                NJust::Taut
            } else if let Some(k) = by.get("extra") {
                let k = k
                    .as_u64()
                    .ok_or(())
                    .or_else(|_| err(format!("{by_ptr}/extra"), "expected an axiom index"))?;
                NJust::Extra(k as usize)
            } else if let Some(name) = by.get("rule") {
                let name = expect_str(name, &format!("{by_ptr}/rule"))?;
                let rule = NRule::from_name(name)
                    .ok_or(())
                    .or_else(|_| err(format!("{by_ptr}/rule"), format!("unknown rule `{name}`")))?;
                let from = parse_from(field(by, "from", &by_ptr)?, &format!("{by_ptr}/from"))?;
                NJust::Rule { rule, from }
            } else {
                return err(&by_ptr, "expected taut, extra, or rule justification");
            };
            lines.push(NLine { formula, just });
        }
        Ok(Proof::N(NProof { axioms, lines }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::fixtures;
    use crate::semantics::fig1_model;

    #[test]
    fn model_round_trips() {
        let doc = ModelDoc::Prop(fig1_model());
        let v = model_to_json(&doc);
        let back = model_from_json(&v).unwrap();
        assert_eq!(doc, back);
    }

    #[test]
    fn serialization_is_deterministic() {
        let doc = ModelDoc::Prop(fig1_model());
        let a = serde_json::to_string(&model_to_json(&doc)).unwrap();
        let b = serde_json::to_string(&model_to_json(&doc)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn schema_errors_carry_pointers() {
        let v = json!({"kind": "prop", "worlds": [0], "root": 0,
                       "relations": [{"index": "p ->", "edges": []}]});
        let e = model_from_json(&v).unwrap_err();
        assert_eq!(e.pointer, "/relations/0/index");

        let v = json!({"kind": "prop", "worlds": [0], "root": 0,
                       "relations": [{"index": "p -> q", "edges": [[0, 7]]}]});
        let e = model_from_json(&v).unwrap_err();
        assert!(e.message.contains("undeclared world"));

        let v = json!({"kind": "wrong"});
        assert_eq!(model_from_json(&v).unwrap_err().pointer, "/kind");

        let v = json!({"kind": "modal", "worlds": [0], "root": 0});
        assert_eq!(model_from_json(&v).unwrap_err().pointer, "/root");
    }

    #[test]
    fn missing_root_edge_is_a_wellformedness_error() {
        let v = json!({"kind": "prop", "worlds": [0, 1], "root": 0,
                       "relations": [{"index": "p -> q", "edges": [[0, 0]]}]});
        let e = model_from_json(&v).unwrap_err();
        assert!(e.message.contains("root condition"));
    }

    #[test]
    fn proofs_round_trip() {
        for (_, fixture) in fixtures::all() {
            let proof = Proof::Vf(fixture);
            let v = proof_to_json(&proof);
            assert_eq!(proof_from_json(&v).unwrap(), proof);
        }
    }

    #[test]
    fn proof_json_errors_carry_pointers() {
        let v = json!({"logic": "vf", "lines": [{"formula": "p", "by": {"rule": "xx", "from": []}}]});
        assert_eq!(proof_from_json(&v).unwrap_err().pointer, "/lines/0/by/rule");
        let v = json!({"logic": "k", "lines": []});
        assert_eq!(proof_from_json(&v).unwrap_err().pointer, "/logic");
    }
}
