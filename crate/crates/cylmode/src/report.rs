//! Deterministic emission of reports: JSON with sorted keys and fixed float
//! formatting (12 significant digits), so identical inputs yield
//! byte-identical files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::verify::CheckReport;
use crate::{Error, Result};

/// Fixed 12-significant-digit float formatting used by every emitted file.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    format!("{x:.11e}")
}

/// Minimal JSON value with deterministic serialization.
#[derive(Debug, Clone)]
pub enum Json {
    Bool(bool),
    Num(f64),
    Str(String),
    Arr(Vec<Json>),
    /// Keys are emitted sorted.
    Obj(BTreeMap<String, Json>),
}

impl Json {
    pub fn obj(pairs: impl IntoIterator<Item = (String, Json)>) -> Json {
        Json::Obj(pairs.into_iter().collect())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn write(&self, out: &mut String, indent: usize) {
        match self {
            Json::Bool(b) => {
                let _ = write!(out, "{b}");
            }
            Json::Num(x) => {
                if x.is_finite() {
                    let _ = write!(out, "{}", fmt_float(*x));
                } else {
                    // JSON has no NaN/inf; emit as strings.
                    let _ = write!(out, "\"{}\"", fmt_float(*x));
                }
            }
            Json::Str(s) => {
                out.push('"');
                for c in s.chars() {
                    match c {
                        '"' => out.push_str("\\\""),
                        '\\' => out.push_str("\\\\"),
                        '\n' => out.push_str("\\n"),
                        '\t' => out.push_str("\\t"),
                        '\r' => out.push_str("\\r"),
                        c if (c as u32) < 0x20 => {
                            let _ = write!(out, "\\u{:04x}", c as u32);
                        }
                        c => out.push(c),
                    }
                }
                out.push('"');
            }
            Json::Arr(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    out.push_str(&"  ".repeat(indent + 1));
                    item.write(out, indent + 1);
                }
                out.push('\n');
                out.push_str(&"  ".repeat(indent));
                out.push(']');
            }
            Json::Obj(map) => {
                if map.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push('{');
                for (i, (k, v)) in map.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    out.push_str(&"  ".repeat(indent + 1));
                    let _ = write!(out, "\"{k}\": ");
                    v.write(out, indent + 1);
                }
                out.push('\n');
                out.push_str(&"  ".repeat(indent));
                out.push('}');
            }
        }
    }
}

fn report_json(r: &CheckReport) -> Json {
    let constants = Json::Obj(
        r.constants
            .iter()
            .map(|(k, v)| (k.clone(), Json::Num(*v)))
            .collect(),
    );
    Json::obj([
        ("name".to_string(), Json::Str(r.name.clone())),
        ("holds".to_string(), Json::Bool(r.holds)),
        ("worst_margin".to_string(), Json::Num(r.worst_margin)),
        ("worst_t".to_string(), Json::Num(r.worst_t)),
        ("constants".to_string(), constants),
        (
            "notes".to_string(),
            Json::Arr(r.notes.iter().map(|n| Json::Str(n.clone())).collect()),
        ),
    ])
}

/// FNV-1a hash of the canonical config echo; the run id.
pub fn run_id(echo: &[(String, String)]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for (k, v) in echo {
        for b in k.bytes().chain([0u8]).chain(v.bytes()).chain([0u8]) {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01B3);
        }
    }
    format!("{h:016x}")
}

/// The summary JSON document `{run_id, config_echo, reports[…]}`.
pub fn summary_json(echo: &[(String, String)], reports: &[CheckReport]) -> Result<String> {
    if reports.is_empty() {
        return Err(Error::EmptyReports);
    }
    let config_echo = Json::Obj(
        echo.iter()
            .map(|(k, v)| (k.clone(), Json::Str(v.clone())))
            .collect(),
    );
    let doc = Json::obj([
        ("run_id".to_string(), Json::Str(run_id(echo))),
        ("config_echo".to_string(), config_echo),
        (
            "reports".to_string(),
            Json::Arr(reports.iter().map(report_json).collect()),
        ),
    ]);
    Ok(doc.render())
}

/// Write a file, creating parent directories.
pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, contents)?;
    Ok(())
}

/// Poincaré map JSON: row-major 4-vector, classification tag, det residual.
pub fn poincare_json(p: &crate::poincare::PoincareMap) -> Json {
    let m = &p.matrix;
    let mut fields: BTreeMap<String, Json> = BTreeMap::new();
    fields.insert(
        "matrix".into(),
        Json::Arr(vec![
            Json::Num(m[0][0]),
            Json::Num(m[0][1]),
            Json::Num(m[1][0]),
            Json::Num(m[1][1]),
        ]),
    );
    fields.insert("lambda".into(), Json::Num(p.lambda));
    fields.insert(
        "span".into(),
        Json::Arr(vec![Json::Num(p.span.0), Json::Num(p.span.1)]),
    );
    fields.insert("det_residual".into(), Json::Num(p.det_residual));
    fields.insert("classification".into(), Json::Str(p.class.tag().into()));
    match &p.class {
        crate::poincare::MapClass::Hyperbolic { c, .. } => {
            fields.insert("eigenvalue".into(), Json::Num(*c));
        }
        crate::poincare::MapClass::Elliptic { phi } => {
            fields.insert("angle".into(), Json::Num(*phi));
        }
        crate::poincare::MapClass::Parabolic { sign } => {
            fields.insert("sign".into(), Json::Num(*sign as f64));
        }
    }
    Json::Obj(fields)
}

/// 2x2 matrix as a two-line CSV.
pub fn matrix_csv(m: &crate::poincare::Mat2) -> String {
    format!(
        "{},{}\n{},{}\n",
        fmt_float(m[0][0]),
        fmt_float(m[0][1]),
        fmt_float(m[1][0]),
        fmt_float(m[1][1])
    )
}
