use serde_json::{json, Map, Value};

use qshare_core::rational;

use crate::args::Format;

pub fn envelope(config: Value, mut result: Value, negative: bool) -> Value {
    annotate(&mut result);
    json!({
        "config": config,
        "status": if negative { "negative" } else { "ok" },
        "result": result,
    })
}

fn looks_rational(s: &str) -> bool {
    let body = s.strip_prefix('-').unwrap_or(s);
    match body.split_once('/') {
        Some((p, q)) => {
            !p.is_empty() && !q.is_empty() && p.bytes().all(|b| b.is_ascii_digit()) && q.bytes().all(|b| b.is_ascii_digit())
        }
        None => false,
    }
}

/// Adds `<key>_approx` next to every `"p/q"` string field.
fn annotate(value: &mut Value) {
    match value {
        Value::Object(map) => {
            let mut extra = Map::new();
            for (k, v) in map.iter_mut() {
                if let Value::String(s) = v {
                    if looks_rational(s) {
                        if let Ok(r) = rational::parse(s) {
                            extra.insert(format!("{k}_approx"), json!(rational::to_f64(&r)));
                        }
                    }
                } else {
                    annotate(v);
                }
            }
            map.extend(extra);
        }
        Value::Array(items) => items.iter_mut().for_each(annotate),
        _ => {}
    }
}

fn flatten(prefix: &str, value: &Value, out: &mut String) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        Value::Array(items) if !items.is_empty() => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), v, out);
            }
        }
        Value::String(s) => {
            let escaped = s.replace('\\', "\\\\").replace('\t', "\\t").replace('\n', "\\n");
            out.push_str(&format!("{prefix}\t{escaped}\n"));
        }
        other => out.push_str(&format!("{prefix}\t{other}\n")),
    }
}

pub fn render(doc: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(doc).expect("JSON renders");
            s.push('\n');
            s
        }
        Format::Tsv => {
            let mut s = String::new();
            flatten("", doc, &mut s);
            s
        }
    }
}
