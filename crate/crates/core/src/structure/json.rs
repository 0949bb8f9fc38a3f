use serde::Deserialize;
use serde_json::{json, Map, Value};

use super::tree::build_forest;
use super::{Admissible, ElemSet, Frame, StructureError};
use crate::syntax::Vocabulary;

/// Nested tree shorthand: `{"label": ["P1"], "children": [...]}`.
#[derive(Debug, Clone, Default, Deserialize)]
pub struct TreeSpec {
    #[serde(default, alias = "labels")]
    pub label: Vec<String>,
    #[serde(default)]
    pub children: Vec<TreeSpec>,
}

fn bad(msg: impl Into<String>) -> StructureError {
    StructureError::Json(msg.into())
}

/// Reads a structure document. The document's own `"vocab"` wins over
/// `default_vocab`; tree and forest shorthands infer `lt, slt, R, P1..Pk`.
pub fn parse_structure(
    text: &str,
    default_vocab: Option<&Vocabulary>,
) -> Result<Frame, StructureError> {
    let v: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    frame_from_json(&v, default_vocab)
}

pub fn frame_from_json(
    v: &Value,
    default_vocab: Option<&Vocabulary>,
) -> Result<Frame, StructureError> {
    let obj = v.as_object().ok_or_else(|| bad("expected a JSON object"))?;
    let doc_vocab = match obj.get("vocab") {
        Some(vv) => Some(Vocabulary::from_json(vv)?),
        None => None,
    };
    let vocab = doc_vocab.as_ref().or(default_vocab);
    if obj.contains_key("tree") || obj.contains_key("forest") {
        return tree_doc(obj, vocab);
    }
    let vocab = match vocab {
        Some(v) => v.clone(),
        None => infer_vocab(obj.get("rel"))?,
    };
    let n = obj
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| bad("missing or non-integer \"n\""))? as usize;
    let mut frame = Frame::new(vocab, n)?;
    if let Some(rels) = obj.get("rel") {
        let rels = rels
            .as_object()
            .ok_or_else(|| bad("\"rel\" must be an object"))?;
        for (name, tuples) in rels {
            let arity = frame
                .vocab()
                .arity(name)
                .ok_or_else(|| StructureError::UnknownSymbol(name.clone()))?;
            for t in tuples
                .as_array()
                .ok_or_else(|| bad(format!("tuples of `{name}` must be an array")))?
            {
                let tuple = read_tuple(t, arity)?;
                frame.add_tuple(name, &tuple)?;
            }
        }
    }
    if let Some(adm) = obj.get("admissible") {
        frame.set_admissible(read_admissible(adm)?)?;
    }
    Ok(frame)
}

/// Vocabulary read off the tuples of `"rel"` when none is declared.
fn infer_vocab(rel: Option<&Value>) -> Result<Vocabulary, StructureError> {
    let mut vocab = Vocabulary::default();
    let Some(rel) = rel else {
        return Ok(vocab);
    };
    let rels = rel
        .as_object()
        .ok_or_else(|| bad("\"rel\" must be an object"))?;
    for (name, tuples) in rels {
        let first = tuples.as_array().and_then(|t| t.first());
        let arity = match first {
            Some(Value::Array(items)) => items.len(),
            Some(Value::Number(_)) => 1,
            _ => {
                return Err(bad(format!(
                    "cannot infer the arity of `{name}`; give \"vocab\""
                )))
            }
        };
        vocab.add(name, arity)?;
    }
    Ok(vocab)
}

fn read_tuple(t: &Value, arity: usize) -> Result<Vec<usize>, StructureError> {
    let elem = |x: &Value| {
        x.as_u64()
            .map(|e| e as usize)
            .ok_or_else(|| bad(format!("bad element {x}")))
    };
    match t {
        Value::Array(items) => items.iter().map(elem).collect(),
        Value::Number(_) if arity == 1 => Ok(vec![elem(t)?]),
        other => Err(bad(format!("bad tuple {other}"))),
    }
}

fn read_set(v: &Value) -> Result<ElemSet, StructureError> {
    let items = v.as_array().ok_or_else(|| bad(format!("bad set {v}")))?;
    let mut s = ElemSet::EMPTY;
    for x in items {
        let e = x.as_u64().ok_or_else(|| bad(format!("bad element {x}")))? as usize;
        if e >= super::MAX_DOMAIN {
            return Err(StructureError::OutOfRange {
                elem: e,
                n: super::MAX_DOMAIN,
            });
        }
        s.insert(e);
    }
    Ok(s)
}

fn read_admissible(v: &Value) -> Result<Admissible, StructureError> {
    match v {
        Value::String(s) if s == "full" => Ok(Admissible::Full),
        Value::Array(items) => Ok(Admissible::Listed(
            items.iter().map(read_set).collect::<Result<_, _>>()?,
        )),
        other => Err(bad(format!(
            "\"admissible\" must be \"full\" or a list of sets, got {other}"
        ))),
    }
}

fn tree_doc(obj: &Map<String, Value>, vocab: Option<&Vocabulary>) -> Result<Frame, StructureError> {
    let roots: Vec<TreeSpec> = if let Some(t) = obj.get("tree") {
        vec![serde_json::from_value(t.clone()).map_err(|e| bad(e.to_string()))?]
    } else {
        serde_json::from_value(obj["forest"].clone()).map_err(|e| bad(e.to_string()))?
    };
    let mut children: Vec<Vec<usize>> = Vec::new();
    let mut labels: Vec<Vec<String>> = Vec::new();
    fn visit(
        spec: &TreeSpec,
        children: &mut Vec<Vec<usize>>,
        labels: &mut Vec<Vec<String>>,
    ) -> usize {
        let id = children.len();
        children.push(Vec::new());
        labels.push(spec.label.clone());
        for c in &spec.children {
            let cid = visit(c, children, labels);
            children[id].push(cid);
        }
        id
    }
    let root_ids: Vec<usize> = roots
        .iter()
        .map(|r| visit(r, &mut children, &mut labels))
        .collect();
    let vocab = match vocab {
        Some(v) => v.clone(),
        None => {
            let mut k = 0;
            let mut extra = Vec::new();
            for l in labels.iter().flatten() {
                match l.strip_prefix('P').and_then(|d| d.parse::<usize>().ok()) {
                    Some(i) if i >= 1 => k = k.max(i),
                    _ => extra.push(l.clone()),
                }
            }
            let mut v = Vocabulary::tree(k);
            for l in extra {
                v.add(&l, 1)?;
            }
            v
        }
    };
    let mut frame = build_forest(&vocab, &root_ids, &children, &labels)?;
    if let Some(adm) = obj.get("admissible") {
        frame.set_admissible(read_admissible(adm)?)?;
    }
    Ok(frame)
}

/// The canonical document form, always carrying `"vocab"`.
pub fn frame_to_json(frame: &Frame) -> Value {
    let mut rel = Map::new();
    for (name, r) in frame.relations() {
        rel.insert(name.to_string(), json!(r.tuples()));
    }
    let admissible = match frame.admissible() {
        Admissible::Full => json!("full"),
        Admissible::Listed(sets) => json!(sets.iter().map(|s| s.to_vec()).collect::<Vec<_>>()),
    };
    json!({
        "vocab": frame.vocab().to_json(),
        "n": frame.size(),
        "rel": rel,
        "admissible": admissible,
    })
}
