//! Canonical rendering. JSON objects have sorted keys (serde_json's default
//! map), floats carry 12 significant digits, and non-finite floats become the
//! strings `"inf"`, `"-inf"`, `"nan"`. Canonicalization is idempotent, so a
//! parsed document re-renders byte for byte.

use serde_json::{Map, Number, Value};

use crate::config::Format;

pub fn round_sig12(x: f64) -> f64 {
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

pub fn float(x: f64) -> Value {
    if x.is_nan() {
        Value::String("nan".into())
    } else if x.is_infinite() {
        Value::String(if x > 0.0 { "inf" } else { "-inf" }.into())
    } else {
        Value::Number(Number::from_f64(round_sig12(x)).expect("finite"))
    }
}

pub fn canonicalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => float(n.as_f64().expect("f64 number")),
        Value::Array(items) => Value::Array(items.into_iter().map(canonicalize).collect()),
        Value::Object(map) => Value::Object(
            map.into_iter()
                .map(|(k, v)| (k, canonicalize(v)))
                .collect::<Map<_, _>>(),
        ),
        other => other,
    }
}

pub fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(&canonicalize(v.clone())).expect("values serialize");
    s.push('\n');
    s
}

/// Fixed CSV layout: JSON pointers for each column, optionally evaluated
/// per element of an array (falling back to the document root).
pub struct CsvLayout {
    pub rows: Option<&'static str>,
    pub columns: &'static [(&'static str, &'static str)],
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    }
}

pub fn to_csv(doc: &Value, layout: &CsvLayout) -> csv::Result<String> {
    let doc = canonicalize(doc.clone());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(layout.columns.iter().map(|(name, _)| *name))?;
    let rows: Vec<&Value> = match layout.rows.and_then(|r| doc.pointer(r)) {
        Some(Value::Array(items)) => items.iter().collect(),
        _ => vec![&doc],
    };
    for row in rows {
        w.write_record(
            layout
                .columns
                .iter()
                .map(|(_, ptr)| cell(row.pointer(ptr).or_else(|| doc.pointer(ptr)))),
        )?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn to_text(doc: &Value) -> String {
    fn walk(v: &Value, indent: usize, out: &mut String) {
        let pad = "  ".repeat(indent);
        match v {
            Value::Object(map) => {
                for (k, v) in map {
                    match v {
                        Value::Object(_) => {
                            out.push_str(&format!("{pad}{k}:\n"));
                            walk(v, indent + 1, out);
                        }
                        Value::Array(items) if items.iter().any(|i| i.is_object()) => {
                            out.push_str(&format!("{pad}{k}:\n"));
                            for item in items {
                                out.push_str(&format!("{pad}  -\n"));
                                walk(item, indent + 2, out);
                            }
                        }
                        _ => out.push_str(&format!("{pad}{k}: {}\n", cell(Some(v)))),
                    }
                }
            }
            other => out.push_str(&format!("{pad}{}\n", cell(Some(other)))),
        }
    }
    let mut out = String::new();
    walk(&canonicalize(doc.clone()), 0, &mut out);
    out
}

pub fn render(doc: &Value, layout: &CsvLayout, format: Format) -> csv::Result<String> {
    Ok(match format {
        Format::Json => to_json(doc),
        Format::Csv => to_csv(doc, layout)?,
        Format::Text => to_text(doc),
    })
}
