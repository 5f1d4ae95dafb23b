//! Plain-text rendering of report JSON. Arrays of flat objects become
//! aligned tables; everything else is printed as `key: value` lines.

use serde_json::Value;

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

/// An object whose fields are scalars or arrays without objects.
fn is_row(v: &Value) -> bool {
    let flat = |x: &Value| match x {
        Value::Object(_) => false,
        Value::Array(items) => !items.iter().any(Value::is_object),
        _ => true,
    };
    v.as_object().is_some_and(|o| o.values().all(flat))
}

fn grid(rows: &[Value]) -> Vec<String> {
    let mut columns: Vec<String> = Vec::new();
    for row in rows {
        for key in row.as_object().expect("row").keys() {
            if !columns.contains(key) {
                columns.push(key.clone());
            }
        }
    }
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| columns.iter().map(|c| r.get(c).map(scalar).unwrap_or_default()).collect())
        .collect();
    let widths: Vec<usize> = columns
        .iter()
        .enumerate()
        .map(|(i, c)| cells.iter().map(|r| r[i].chars().count()).chain([c.chars().count()]).max().unwrap_or(0))
        .collect();
    let line = |items: &[String]| {
        items.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string()
    };
    let mut out = vec![line(&columns)];
    out.push(widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  "));
    out.extend(cells.iter().map(|r| line(r)));
    out
}

fn walk(prefix: &str, v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Object(o) => {
            for (k, x) in o {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                walk(&key, x, out);
            }
        }
        Value::Array(items) if !items.is_empty() && items.iter().all(is_row) => {
            out.push(format!("{prefix}:"));
            out.extend(grid(items).into_iter().map(|l| format!("  {l}")));
        }
        Value::Array(items) if items.iter().any(Value::is_object) => {
            for (i, x) in items.iter().enumerate() {
                walk(&format!("{prefix}[{i}]"), x, out);
            }
        }
        other => out.push(format!("{prefix}: {}", scalar(other))),
    }
}

pub fn table(report: &Value) -> String {
    let mut out = Vec::new();
    walk("", report, &mut out);
    out.join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn rows_become_aligned_columns() {
        let text = table(&json!({"result": {"rows": [{"a": 1, "bb": "x"}, {"a": 22, "bb": [1, 2]}]}}));
        assert_eq!(text, "result.rows:\n  a   bb\n  --  -----\n  1   x\n  22  [1,2]");
    }

    #[test]
    fn nested_objects_use_dotted_keys() {
        assert_eq!(table(&json!({"a": {"b": null, "c": [1]}})), "a.b: -\na.c: [1]");
    }
}
