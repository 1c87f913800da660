//! Deterministic JSON: keys sorted, two-space indentation, every float printed
//! in scientific notation with 17 significant digits. Non-finite floats are
//! emitted as the strings `"NaN"`, `"inf"`, `"-inf"`.

use serde_json::{Map, Value};

/// Float value that survives the JSON model even when non-finite.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else if x.is_nan() {
        Value::from("NaN")
    } else if x > 0.0 {
        Value::from("inf")
    } else {
        Value::from("-inf")
    }
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

pub fn format_float(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

pub fn to_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out.push('\n');
    out
}

fn write_value(v: &Value, depth: usize, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string serializes")),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            let scalar = items.iter().all(|i| !matches!(i, Value::Array(_) | Value::Object(_)));
            if scalar {
                out.push('[');
                for (k, item) in items.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    write_value(item, depth + 1, out);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                indent(depth + 1, out);
                write_value(item, depth + 1, out);
                if k + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            indent(depth, out);
            out.push(']');
        }
        Value::Object(map) => write_object(map, depth, out),
    }
}

fn write_object(map: &Map<String, Value>, depth: usize, out: &mut String) {
    if map.is_empty() {
        out.push_str("{}");
        return;
    }
    let mut keys: Vec<&String> = map.keys().collect();
    keys.sort();
    out.push_str("{\n");
    for (k, key) in keys.iter().enumerate() {
        indent(depth + 1, out);
        out.push_str(&serde_json::to_string(key).expect("string serializes"));
        out.push_str(": ");
        write_value(&map[*key], depth + 1, out);
        if k + 1 < keys.len() {
            out.push(',');
        }
        out.push('\n');
    }
    indent(depth, out);
    out.push('}');
}

fn indent(depth: usize, out: &mut String) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn sorted_and_fixed_precision() {
        let v = json!({"b": 1, "a": [0.1, -0.75], "c": {"z": null, "y": "q\""}});
        let s = to_json(&v);
        assert_eq!(
            s,
            "{\n  \"a\": [1.0000000000000001e-1, -7.5000000000000000e-1],\n  \"b\": 1,\n  \"c\": {\n    \"y\": \"q\\\"\",\n    \"z\": null\n  }\n}\n"
        );
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["a"][0].as_f64().unwrap(), 0.1);
    }

    #[test]
    fn round_trip_is_exact() {
        for x in [std::f64::consts::PI, 1.0 / 3.0, -1e-300, 6.02e23, -0.0] {
            let back: f64 = format_float(x).parse().unwrap();
            assert_eq!(back, if x == 0.0 { 0.0 } else { x });
        }
        assert_eq!(num(f64::NAN), Value::from("NaN"));
        assert_eq!(to_json(&nums(&[f64::NEG_INFINITY])), "[\"-inf\"]\n");
    }
}
