//! Canonical JSON rendering for reports.
//!
//! Golden-file and determinism tests compare report bytes, so rendering is
//! fully pinned: object keys appear in the order they are inserted (report
//! builders insert them in a fixed schema order), and every real is written
//! with 17 significant digits so values round-trip through any conforming
//! parser without drift.

/// Render a real with 17 significant digits.
pub fn format_float(x: f64) -> String {
    debug_assert!(x.is_finite(), "reports never contain non-finite reals");
    format!("{x:.16e}")
}

/// A JSON value with deterministic rendering.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Null,
    Bool(bool),
    UInt(u64),
    Float(f64),
    Str(String),
    Array(Vec<Value>),
    Object(Vec<(String, Value)>),
}

impl Value {
    pub fn object() -> Self {
        Value::Object(Vec::new())
    }

    /// Insert a key; builders call this in schema order.
    pub fn insert(&mut self, key: &str, value: Value) -> &mut Self {
        match self {
            Value::Object(entries) => entries.push((key.to_string(), value)),
            _ => panic!("insert on non-object"),
        }
        self
    }

    pub fn opt_float(value: Option<f64>) -> Value {
        match value {
            Some(v) => Value::Float(v),
            None => Value::Null,
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out
    }

    fn write(&self, out: &mut String, indent: usize) {
        match self {
            Value::Null => out.push_str("null"),
            Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Value::UInt(n) => out.push_str(&n.to_string()),
            Value::Float(x) => {
                if x.is_finite() {
                    out.push_str(&format_float(*x));
                } else {
                    out.push_str("null");
                }
            }
            Value::Str(s) => write_escaped(out, s),
            Value::Array(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    newline_indent(out, indent + 1);
                    item.write(out, indent + 1);
                }
                newline_indent(out, indent);
                out.push(']');
            }
            Value::Object(entries) => {
                if entries.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push('{');
                for (i, (key, value)) in entries.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    newline_indent(out, indent + 1);
                    write_escaped(out, key);
                    out.push_str(": ");
                    value.write(out, indent + 1);
                }
                newline_indent(out, indent);
                out.push('}');
            }
        }
    }
}

fn newline_indent(out: &mut String, indent: usize) {
    out.push('\n');
    for _ in 0..indent {
        out.push_str("  ");
    }
}

fn write_escaped(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                out.push_str(&format!("\\u{:04x}", c as u32));
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for &x in &[0.0, 1.0, 0.96, 0.1 + 0.2, 1.0 / 3.0, 638.0 / 1024.0, -0.25] {
            let s = format_float(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
        }
    }

    #[test]
    fn rendering_is_valid_json_with_insertion_order() {
        let mut obj = Value::object();
        obj.insert("b", Value::UInt(2));
        obj.insert("a", Value::Float(0.5));
        obj.insert("list", Value::Array(vec![Value::Null, Value::Bool(true)]));
        obj.insert("text", Value::Str("a \"quoted\"\nline".into()));
        let rendered = obj.render();
        let parsed: serde_json::Value = serde_json::from_str(&rendered).unwrap();
        assert_eq!(parsed["b"], 2);
        assert_eq!(parsed["a"], 0.5);
        assert_eq!(parsed["text"], "a \"quoted\"\nline");
        // Insertion order survives.
        assert!(rendered.find("\"b\"").unwrap() < rendered.find("\"a\"").unwrap());
    }
}
