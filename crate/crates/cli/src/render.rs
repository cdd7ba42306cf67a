use serde_json::{Map, Value};

/// Report envelope shared by every verb.
pub fn envelope(command: &str, parameters: Value, result: Value) -> Value {
    let mut m = Map::new();
    m.insert("tool".into(), Value::from("defconn"));
    m.insert("version".into(), Value::from(defconn::VERSION));
    m.insert("command".into(), Value::from(command));
    m.insert("parameters".into(), parameters);
    m.insert("result".into(), result);
    Value::Object(m)
}

pub fn to_json(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("report serializes")
}

/// `path: value` lines, one per leaf.
pub fn to_text(v: &Value) -> String {
    let mut out = String::new();
    flatten("", v, &mut out);
    out
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(m) if !m.is_empty() => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::Array(a) if !a.is_empty() && a.iter().all(|x| x.is_number()) => {
            let items: Vec<String> = a.iter().map(|x| x.to_string()).collect();
            out.push_str(&format!("{prefix}: [{}]\n", items.join(", ")));
        }
        Value::Array(a) if !a.is_empty() => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        Value::String(s) => out.push_str(&format!("{prefix}: {s}\n")),
        other => out.push_str(&format!("{prefix}: {other}\n")),
    }
}
