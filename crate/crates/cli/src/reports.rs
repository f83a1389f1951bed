//! Report construction and rendering. Commands build serde_json Values with
//! sorted keys; the same report prints as pretty JSON or as flat
//! "path: value" text lines.

use forge_core::linalg::Mat;
use forge_core::morphcalc::Value as EvalValue;
use forge_core::scalars::Scalar;
use forge_core::tensors::{decode_index, Tensor};
use serde_json::{json, Map, Value};

pub fn scalar(s: &Scalar) -> Value {
    Value::String(s.to_string())
}

pub fn scalar_list(v: &[Scalar]) -> Value {
    Value::Array(v.iter().map(scalar).collect())
}

pub fn scalar_grid(g: &[Vec<Scalar>]) -> Value {
    Value::Array(g.iter().map(|r| scalar_list(r)).collect())
}

pub fn matrix(m: &Mat) -> Value {
    let rows: Vec<Value> = (0..m.nrows()).map(|i| scalar_list(m.row(i))).collect();
    json!({ "rows": rows, "nrows": m.nrows(), "ncols": m.ncols() })
}

pub fn tensor(t: &Tensor) -> Value {
    let (p, q) = (t.ttype().p, t.ttype().q);
    let slots = p + q;
    let entries: Vec<Value> = t
        .entries()
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(flat, v)| {
            let idx = decode_index(flat, t.dim(), slots);
            json!({
                "up": idx[..p].to_vec(),
                "down": idx[p..].to_vec(),
                "value": v.to_string(),
            })
        })
        .collect();
    json!({ "p": p, "q": q, "dim": t.dim(), "entries": entries })
}

pub fn eval_value(v: &EvalValue) -> Value {
    match v {
        EvalValue::Scalar(s) => scalar(s),
        EvalValue::Tensor(t) => tensor(t),
        EvalValue::Map(m) => matrix(m.matrix()),
        EvalValue::Space(sp) => json!({ "kind": "space", "dim": sp.dim() }),
    }
}

/// Sorted-key object from labeled parts; determinism matters because report
/// bytes are asserted in tests and documented verbatim.
pub fn report(parts: Vec<(&str, Value)>) -> Value {
    let mut m = Map::new();
    for (k, v) in parts {
        m.insert(k.to_string(), v);
    }
    m.sort_keys();
    Value::Object(m)
}

pub fn render(v: &Value, format: &str) -> String {
    match format {
        "text" => {
            let mut out = String::new();
            render_text(v, "", &mut out);
            out
        }
        _ => {
            let mut s = serde_json::to_string_pretty(v).expect("serializable");
            s.push('\n');
            s
        }
    }
}

fn render_text(v: &Value, path: &str, out: &mut String) {
    match v {
        Value::Object(m) => {
            for (k, child) in m {
                let next = if path.is_empty() {
                    k.clone()
                } else {
                    format!("{path}.{k}")
                };
                render_text(child, &next, out);
            }
        }
        Value::Array(items) => {
            if items.iter().all(|i| !i.is_object() && !i.is_array()) {
                let flat: Vec<String> = items.iter().map(plain).collect();
                out.push_str(&format!("{path}: [{}]\n", flat.join(", ")));
            } else {
                for (i, child) in items.iter().enumerate() {
                    render_text(child, &format!("{path}[{i}]"), out);
                }
            }
        }
        leaf => out.push_str(&format!("{path}: {}\n", plain(leaf))),
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_rendering_flattens_nested_reports() {
        let r = report(vec![
            ("trace", json!("t + 1")),
            ("dims", json!([1, 2])),
            ("inner", json!({"a": 3})),
        ]);
        let text = render(&r, "text");
        assert!(text.contains("trace: t + 1\n"));
        assert!(text.contains("dims: [1, 2]\n"));
        assert!(text.contains("inner.a: 3\n"));
    }

    #[test]
    fn json_rendering_sorts_keys_and_ends_with_newline() {
        let r = report(vec![("zeta", json!(1)), ("alpha", json!(2))]);
        let s = render(&r, "json");
        let za = s.find("zeta").unwrap();
        let al = s.find("alpha").unwrap();
        assert!(al < za);
        assert!(s.ends_with('\n'));
    }
}
