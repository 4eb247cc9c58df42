//! Support library for the `pary` binary: CSV encoding/decoding of the
//! tabular outputs and a small structural JSON-document checker that keeps
//! the emitted documents in sync with the schemas shipped under `schemas/`.
//!
//! Everything the binary prints in `--format csv` round-trips through the
//! loaders in [`csv`]; the integration tests rely on that.

#![forbid(unsafe_code)]

pub mod csv {
    //! Plain-text CSV for the tabular artifacts.
    //!
    //! All fields are decimal integers or short ASCII labels, so no quoting
    //! or escaping is ever required; the loaders reject anything else.

    /// Renders a two-column table. `rows` supplies already-formatted cells.
    pub fn render_two_col(
        header: (&str, &str),
        rows: impl IntoIterator<Item = (String, String)>,
    ) -> String {
        let mut out = format!("{},{}\n", header.0, header.1);
        for (a, b) in rows {
            out.push_str(&a);
            out.push(',');
            out.push_str(&b);
            out.push('\n');
        }
        out
    }

    /// Canonicalizes a decimal integer literal: optional sign, digits, no
    /// leading zeros, `-0` folded to `0`. Returns `None` on anything else.
    fn canonical_int(s: &str) -> Option<String> {
        let (neg, digits) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let trimmed = digits.trim_start_matches('0');
        let trimmed = if trimmed.is_empty() { "0" } else { trimmed };
        if neg && trimmed != "0" {
            Some(format!("-{trimmed}"))
        } else {
            Some(trimmed.to_string())
        }
    }

    fn split_row(line: &str, cols: usize, lineno: usize) -> Result<Vec<&str>, String> {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != cols {
            return Err(format!(
                "line {lineno}: expected {cols} fields, found {}",
                cells.len()
            ));
        }
        Ok(cells)
    }

    /// Renders a Walsh spectrum: header `beta,z1,…,z{p−1}`, one row per
    /// field element, coefficients on the basis ζ, …, ζ^{p−1}.
    pub fn render_walsh(p: u64, rows: impl IntoIterator<Item = (u64, Vec<String>)>) -> String {
        let mut out = String::from("beta");
        for k in 1..p {
            out.push_str(&format!(",z{k}"));
        }
        out.push('\n');
        for (beta, coeffs) in rows {
            out.push_str(&beta.to_string());
            for c in coeffs {
                out.push(',');
                out.push_str(&c);
            }
            out.push('\n');
        }
        out
    }

    /// Parses [`render_walsh`] output back into `(beta, coefficient)` rows
    /// with canonical decimal coefficient strings.
    pub fn parse_walsh(text: &str) -> Result<Vec<(u64, Vec<String>)>, String> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or("empty input")?;
        let head: Vec<&str> = header.split(',').collect();
        if head.first() != Some(&"beta") || head.len() < 2 {
            return Err(format!("bad header {header:?}"));
        }
        for (k, cell) in head[1..].iter().enumerate() {
            if *cell != format!("z{}", k + 1) {
                return Err(format!("bad header column {cell:?}"));
            }
        }
        let cols = head.len();
        let mut rows = Vec::new();
        for (idx, line) in lines {
            let cells = split_row(line, cols, idx + 1)?;
            let beta: u64 = cells[0]
                .parse()
                .map_err(|_| format!("line {}: bad beta {:?}", idx + 1, cells[0]))?;
            let coeffs = cells[1..]
                .iter()
                .map(|c| {
                    canonical_int(c)
                        .ok_or_else(|| format!("line {}: bad integer {c:?}", idx + 1))
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push((beta, coeffs));
        }
        Ok(rows)
    }

    /// Parses a two-column `u64` table with the given header, e.g.
    /// `weight,frequency` or `value,frequency` rows.
    pub fn parse_u64_pairs(text: &str, header: (&str, &str)) -> Result<Vec<(u64, String)>, String> {
        let mut lines = text.lines().enumerate();
        let (_, head) = lines.next().ok_or("empty input")?;
        if head != format!("{},{}", header.0, header.1) {
            return Err(format!("bad header {head:?}"));
        }
        let mut rows = Vec::new();
        for (idx, line) in lines {
            let cells = split_row(line, 2, idx + 1)?;
            let key: u64 = cells[0]
                .parse()
                .map_err(|_| format!("line {}: bad {} {:?}", idx + 1, header.0, cells[0]))?;
            let val = canonical_int(cells[1])
                .filter(|v| !v.starts_with('-'))
                .ok_or_else(|| format!("line {}: bad {} {:?}", idx + 1, header.1, cells[1]))?;
            rows.push((key, val));
        }
        Ok(rows)
    }

    /// Parses the bent-profile table: `beta,mu,g` rows, μ ∈ {−1, 1}.
    pub fn parse_bent(text: &str) -> Result<Vec<(u64, i8, u64)>, String> {
        let mut lines = text.lines().enumerate();
        let (_, head) = lines.next().ok_or("empty input")?;
        if head != "beta,mu,g" {
            return Err(format!("bad header {head:?}"));
        }
        let mut rows = Vec::new();
        for (idx, line) in lines {
            let cells = split_row(line, 3, idx + 1)?;
            let beta: u64 = cells[0]
                .parse()
                .map_err(|_| format!("line {}: bad beta {:?}", idx + 1, cells[0]))?;
            let mu: i8 = match cells[1] {
                "1" => 1,
                "-1" => -1,
                other => return Err(format!("line {}: bad mu {other:?}", idx + 1)),
            };
            let g: u64 = cells[2]
                .parse()
                .map_err(|_| format!("line {}: bad g {:?}", idx + 1, cells[2]))?;
            rows.push((beta, mu, g));
        }
        Ok(rows)
    }
}

pub mod schema {
    //! Structural checker for the JSON documents the binary emits.
    //!
    //! Understands the subset of JSON-Schema keywords the files under
    //! `schemas/` use: `type` (string or list), `enum`, `properties` /
    //! `required` / `additionalProperties`, and `items`. Unknown keywords
    //! are rejected so the schemas cannot silently promise more than this
    //! checker enforces.

    use serde_json::Value;

    const KNOWN_KEYWORDS: &[&str] = &[
        "$schema",
        "title",
        "description",
        "type",
        "enum",
        "properties",
        "required",
        "additionalProperties",
        "items",
    ];

    fn type_name(v: &Value) -> &'static str {
        match v {
            Value::Null => "null",
            Value::Bool(_) => "boolean",
            Value::Number(n) if n.is_i64() || n.is_u64() => "integer",
            Value::Number(_) => "number",
            Value::String(_) => "string",
            Value::Array(_) => "array",
            Value::Object(_) => "object",
        }
    }

    fn type_matches(instance: &Value, ty: &str) -> bool {
        match ty {
            // Every integer is also a number.
            "number" => matches!(instance, Value::Number(_)),
            other => type_name(instance) == other,
        }
    }

    /// Checks `instance` against `schema`, returning the first violation as
    /// `Err(path: message)`.
    pub fn validate(instance: &Value, schema: &Value) -> Result<(), String> {
        check(instance, schema, "$")
    }

    fn check(instance: &Value, schema: &Value, path: &str) -> Result<(), String> {
        let obj = schema
            .as_object()
            .ok_or_else(|| format!("{path}: schema is not an object"))?;
        for key in obj.keys() {
            if !KNOWN_KEYWORDS.contains(&key.as_str()) {
                return Err(format!("{path}: unsupported schema keyword {key:?}"));
            }
        }

        if let Some(ty) = obj.get("type") {
            let allowed: Vec<&str> = match ty {
                Value::String(s) => vec![s.as_str()],
                Value::Array(list) => list.iter().filter_map(Value::as_str).collect(),
                _ => return Err(format!("{path}: malformed \"type\"")),
            };
            if !allowed.iter().any(|t| type_matches(instance, t)) {
                return Err(format!(
                    "{path}: expected {}, found {}",
                    allowed.join(" | "),
                    type_name(instance)
                ));
            }
        }

        if let Some(choices) = obj.get("enum") {
            let list = choices
                .as_array()
                .ok_or_else(|| format!("{path}: malformed \"enum\""))?;
            if !list.contains(instance) {
                return Err(format!("{path}: value {instance} not in enum"));
            }
        }

        if let Some(props) = obj.get("properties") {
            let props = props
                .as_object()
                .ok_or_else(|| format!("{path}: malformed \"properties\""))?;
            if let Value::Object(fields) = instance {
                for (name, sub) in props {
                    if let Some(v) = fields.get(name) {
                        check(v, sub, &format!("{path}.{name}"))?;
                    }
                }
                match obj.get("additionalProperties") {
                    Some(Value::Bool(false)) => {
                        for name in fields.keys() {
                            if !props.contains_key(name) {
                                return Err(format!("{path}: unexpected property {name:?}"));
                            }
                        }
                    }
                    Some(Value::Bool(true)) | None => {}
                    Some(sub) => {
                        for (name, v) in fields {
                            if !props.contains_key(name) {
                                check(v, sub, &format!("{path}.{name}"))?;
                            }
                        }
                    }
                }
            }
        }

        if let Some(required) = obj.get("required") {
            let names = required
                .as_array()
                .ok_or_else(|| format!("{path}: malformed \"required\""))?;
            if let Value::Object(fields) = instance {
                for name in names.iter().filter_map(Value::as_str) {
                    if !fields.contains_key(name) {
                        return Err(format!("{path}: missing required property {name:?}"));
                    }
                }
            }
        }

        if let Some(items) = obj.get("items") {
            if let Value::Array(elems) = instance {
                for (i, v) in elems.iter().enumerate() {
                    check(v, items, &format!("{path}[{i}]"))?;
                }
            }
        }

        Ok(())
    }
}
