//! Run configuration: a small sectioned `key = value` text format, plus the
//! two-column CSV tables for tabulated potentials.
//!
//! Both parsers accept untrusted input: they validate everything, bound every
//! resource (grid sizes, table lengths), and never panic.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::{Error, Result};

/// Hard caps keeping hostile configs from requesting absurd work.
const MAX_GRID_STEPS: usize = 1 << 20;
const MAX_KMAX: usize = 64;
const MAX_SCAN_STEPS: usize = 10_000;
const MAX_TABLE_ROWS: usize = 1 << 20;
const MAX_CONFIG_LEN: usize = 1 << 20;

/// Which field a run operates on.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldSpec {
    /// One of the catenoid closed forms by name.
    ClosedForm(String),
    /// `amplitude·e^{rate t}` on the `cos(kθ)` mode with `V = 0` semantics.
    Separable { k: usize, rate: f64 },
    /// Explicit per-mode Cauchy data `(mode, a, b)`.
    Cauchy(Vec<(usize, f64, f64)>),
    /// Seeded random battery member.
    Seeded { seed: u64, k_theta: usize },
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: String,
    pub grid_t0: f64,
    pub grid_t1: f64,
    pub grid_h: f64,
    pub basis_kmax: usize,
    pub preset: String,
    pub params: BTreeMap<String, f64>,
    /// Table files for `preset = tabulated`, in stack order
    /// (symmetric, cos1, sin1, …).
    pub tables: Vec<PathBuf>,
    pub field: FieldSpec,
    pub m_cut: Option<usize>,
    pub alpha: Option<f64>,
    pub kappa: f64,
    pub lambda: f64,
    pub span: (f64, f64),
    pub scan: (f64, f64),
    pub scan_steps: usize,
    pub ell: f64,
    pub out_dir: PathBuf,
    pub tol_margin: f64,
    pub tol_identity: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: "verify".into(),
            grid_t0: 0.0,
            grid_t1: 2.0,
            grid_h: 1.0 / 128.0,
            basis_kmax: 5,
            preset: "zero".into(),
            params: BTreeMap::new(),
            tables: Vec::new(),
            field: FieldSpec::Separable { k: 1, rate: 1.0 },
            m_cut: None,
            alpha: None,
            kappa: 1.0,
            lambda: 1.0,
            span: (0.0, 1.0),
            scan: (-0.9, -0.1),
            scan_steps: 17,
            ell: 1.0,
            out_dir: PathBuf::from("out"),
            tol_margin: 1e-6,
            tol_identity: 1e-4,
        }
    }
}

impl RunConfig {
    /// Canonical text echo; hashed into the run id and embedded in reports.
    pub fn echo(&self) -> Vec<(String, String)> {
        let mut kv = vec![
            ("command".to_string(), self.command.clone()),
            ("grid_t0".to_string(), crate::report::fmt_float(self.grid_t0)),
            ("grid_t1".to_string(), crate::report::fmt_float(self.grid_t1)),
            ("grid_h".to_string(), crate::report::fmt_float(self.grid_h)),
            ("basis_kmax".to_string(), self.basis_kmax.to_string()),
            ("preset".to_string(), self.preset.clone()),
            ("field".to_string(), format!("{:?}", self.field)),
            (
                "m".to_string(),
                self.m_cut.map_or("auto".into(), |m| m.to_string()),
            ),
            (
                "alpha".to_string(),
                self.alpha.map_or("auto".into(), crate::report::fmt_float),
            ),
            ("kappa".to_string(), crate::report::fmt_float(self.kappa)),
            ("lambda".to_string(), crate::report::fmt_float(self.lambda)),
            (
                "span".to_string(),
                format!(
                    "{}..{}",
                    crate::report::fmt_float(self.span.0),
                    crate::report::fmt_float(self.span.1)
                ),
            ),
            ("tol_margin".to_string(), crate::report::fmt_float(self.tol_margin)),
            ("tol_identity".to_string(), crate::report::fmt_float(self.tol_identity)),
        ];
        for (k, v) in &self.params {
            kv.push((format!("param_{k}"), crate::report::fmt_float(*v)));
        }
        kv
    }
}

fn parse_f64(section: &str, key: &str, raw: &str) -> Result<f64> {
    let v: f64 = raw
        .parse()
        .map_err(|_| Error::Config(format!("[{section}] {key}: `{raw}` is not a number")))?;
    if !v.is_finite() {
        return Err(Error::Config(format!(
            "[{section}] {key}: `{raw}` is not finite"
        )));
    }
    Ok(v)
}

fn parse_usize(section: &str, key: &str, raw: &str, max: usize) -> Result<usize> {
    let v: usize = raw
        .parse()
        .map_err(|_| Error::Config(format!("[{section}] {key}: `{raw}` is not a count")))?;
    if v > max {
        return Err(Error::Config(format!(
            "[{section}] {key}: {v} exceeds the cap {max}"
        )));
    }
    Ok(v)
}

/// Parse the sectioned `key = value` config text.
///
/// Unknown sections and keys are rejected, `#` starts a comment, and the last
/// assignment of a duplicated key wins.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    if text.len() > MAX_CONFIG_LEN {
        return Err(Error::Config("config text exceeds 1 MiB".into()));
    }
    let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    let mut current = String::from("run");
    for (lineno, raw_line) in text.lines().enumerate() {
        let line = match raw_line.find('#') {
            Some(p) => &raw_line[..p],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(stripped) = line.strip_prefix('[') {
            let name = stripped
                .strip_suffix(']')
                .ok_or_else(|| Error::Config(format!("line {}: unterminated section header", lineno + 1)))?
                .trim();
            if !matches!(name, "run" | "grid" | "basis" | "potential" | "field") {
                return Err(Error::Config(format!(
                    "line {}: unknown section `[{name}]`",
                    lineno + 1
                )));
            }
            current = name.to_string();
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() || value.is_empty() {
            return Err(Error::Config(format!(
                "line {}: empty key or value",
                lineno + 1
            )));
        }
        sections
            .entry(current.clone())
            .or_default()
            .insert(key.to_string(), value.to_string());
    }
    resolve(sections)
}

fn resolve(sections: BTreeMap<String, BTreeMap<String, String>>) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(grid) = sections.get("grid") {
        for (k, v) in grid {
            match k.as_str() {
                "t0" => cfg.grid_t0 = parse_f64("grid", k, v)?,
                "t1" => cfg.grid_t1 = parse_f64("grid", k, v)?,
                "h" => cfg.grid_h = parse_f64("grid", k, v)?,
                other => return Err(Error::Config(format!("[grid] unknown key `{other}`"))),
            }
        }
    }
    if let Some(basis) = sections.get("basis") {
        for (k, v) in basis {
            match k.as_str() {
                "kmax" => cfg.basis_kmax = parse_usize("basis", k, v, MAX_KMAX)?,
                other => return Err(Error::Config(format!("[basis] unknown key `{other}`"))),
            }
        }
    }
    if let Some(pot) = sections.get("potential") {
        for (k, v) in pot {
            match k.as_str() {
                "preset" => cfg.preset = v.clone(),
                key if key.starts_with("table") => {
                    let idx: usize = key[5..]
                        .parse()
                        .map_err(|_| Error::Config(format!("[potential] bad table index `{key}`")))?;
                    if idx >= 16 {
                        return Err(Error::Config("[potential] at most 16 tables".into()));
                    }
                    if cfg.tables.len() <= idx {
                        cfg.tables.resize(idx + 1, PathBuf::new());
                    }
                    cfg.tables[idx] = PathBuf::from(v);
                }
                key => {
                    cfg.params.insert(key.to_string(), parse_f64("potential", key, v)?);
                }
            }
        }
    }
    if let Some(field) = sections.get("field") {
        let kind = field.get("kind").map(String::as_str).unwrap_or("separable");
        cfg.field = match kind {
            "closed_form" => {
                let label = field
                    .get("label")
                    .ok_or_else(|| Error::Config("[field] closed_form needs `label`".into()))?;
                FieldSpec::ClosedForm(label.clone())
            }
            "separable" => FieldSpec::Separable {
                k: field
                    .get("k")
                    .map(|v| parse_usize("field", "k", v, MAX_KMAX))
                    .transpose()?
                    .unwrap_or(1),
                rate: field
                    .get("rate")
                    .map(|v| parse_f64("field", "rate", v))
                    .transpose()?
                    .unwrap_or(1.0),
            },
            "seeded" => FieldSpec::Seeded {
                seed: field
                    .get("seed")
                    .map(|v| {
                        v.parse::<u64>()
                            .map_err(|_| Error::Config(format!("[field] seed: `{v}` is not an integer")))
                    })
                    .transpose()?
                    .unwrap_or(1),
                k_theta: field
                    .get("k_theta")
                    .map(|v| parse_usize("field", "k_theta", v, 8))
                    .transpose()?
                    .unwrap_or(0),
            },
            "cauchy" => {
                let data = field
                    .get("data")
                    .ok_or_else(|| Error::Config("[field] cauchy needs `data`".into()))?;
                FieldSpec::Cauchy(parse_cauchy_data(data)?)
            }
            other => return Err(Error::Config(format!("[field] unknown kind `{other}`"))),
        };
        for k in field.keys() {
            if !matches!(k.as_str(), "kind" | "label" | "k" | "rate" | "seed" | "k_theta" | "data") {
                return Err(Error::Config(format!("[field] unknown key `{k}`")));
            }
        }
    }
    if let Some(run) = sections.get("run") {
        for (k, v) in run {
            match k.as_str() {
                "command" => cfg.command = v.clone(),
                "m" => cfg.m_cut = if v == "auto" { None } else { Some(parse_usize("run", k, v, 4096)?) },
                "alpha" => cfg.alpha = if v == "auto" { None } else { Some(parse_f64("run", k, v)?) },
                "kappa" => cfg.kappa = parse_f64("run", k, v)?,
                "lambda" => cfg.lambda = parse_f64("run", k, v)?,
                "span0" => cfg.span.0 = parse_f64("run", k, v)?,
                "span1" => cfg.span.1 = parse_f64("run", k, v)?,
                "scan0" => cfg.scan.0 = parse_f64("run", k, v)?,
                "scan1" => cfg.scan.1 = parse_f64("run", k, v)?,
                "steps" => cfg.scan_steps = parse_usize("run", k, v, MAX_SCAN_STEPS)?,
                "ell" => cfg.ell = parse_f64("run", k, v)?,
                "out" => cfg.out_dir = PathBuf::from(v),
                "tol_margin" => cfg.tol_margin = parse_f64("run", k, v)?,
                "tol_identity" => cfg.tol_identity = parse_f64("run", k, v)?,
                other => return Err(Error::Config(format!("[run] unknown key `{other}`"))),
            }
        }
    }
    validate(&cfg)?;
    Ok(cfg)
}

/// `mode:a:b;mode:a:b;…`
pub fn parse_cauchy_data(text: &str) -> Result<Vec<(usize, f64, f64)>> {
    let mut out = Vec::new();
    for part in text.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let fields: Vec<&str> = part.split(':').collect();
        if fields.len() != 3 {
            return Err(Error::Config(format!(
                "cauchy entry `{part}` is not mode:a:b"
            )));
        }
        let mode = parse_usize("field", "data.mode", fields[0].trim(), 4096)?;
        let a = parse_f64("field", "data.a", fields[1].trim())?;
        let b = parse_f64("field", "data.b", fields[2].trim())?;
        out.push((mode, a, b));
    }
    if out.is_empty() {
        return Err(Error::Config("cauchy data is empty".into()));
    }
    Ok(out)
}

fn validate(cfg: &RunConfig) -> Result<()> {
    if !(cfg.grid_t0.is_finite() && cfg.grid_t1.is_finite()) || cfg.grid_t1 <= cfg.grid_t0 {
        return Err(Error::Config(format!(
            "grid [{}, {}] is not a forward interval",
            cfg.grid_t0, cfg.grid_t1
        )));
    }
    if cfg.grid_h <= 0.0 || cfg.grid_h.is_nan() {
        return Err(Error::Config("grid step must be positive".into()));
    }
    let steps = (cfg.grid_t1 - cfg.grid_t0) / cfg.grid_h;
    if !steps.is_finite() || steps > MAX_GRID_STEPS as f64 {
        return Err(Error::Config(format!(
            "grid would need {steps:.0} steps; cap is {MAX_GRID_STEPS}"
        )));
    }
    if cfg.basis_kmax == 0 || cfg.basis_kmax > MAX_KMAX {
        return Err(Error::Config(format!(
            "basis kmax must be in 1..={MAX_KMAX}"
        )));
    }
    if cfg.span.1 <= cfg.span.0 || cfg.span.0.is_nan() || cfg.span.1.is_nan() {
        return Err(Error::Config("span must be a forward interval".into()));
    }
    if !(cfg.tol_margin > 0.0 && cfg.tol_identity > 0.0) {
        return Err(Error::Config("tolerances must be positive".into()));
    }
    if cfg.scan_steps == 0 {
        return Err(Error::Config("scan needs at least one step".into()));
    }
    if !(cfg.ell > 0.0 && cfg.ell.is_finite()) {
        return Err(Error::Config("period ell must be positive".into()));
    }
    if !cfg.lambda.is_finite() || !cfg.kappa.is_finite() {
        return Err(Error::Config("lambda and kappa must be finite".into()));
    }
    Ok(())
}

/// Parse a two-column `t,value` CSV (one tabulated stack profile).
///
/// A single header row is allowed. Rows must be strictly increasing in `t`
/// and every value finite.
pub fn parse_table(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut rows = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (a, b) = line
            .split_once(',')
            .ok_or_else(|| Error::Config(format!("table line {}: expected `t,value`", lineno + 1)))?;
        let (a, b) = (a.trim(), b.trim());
        let parsed = (a.parse::<f64>(), b.parse::<f64>());
        match parsed {
            (Ok(t), Ok(v)) => {
                if !t.is_finite() || !v.is_finite() {
                    return Err(Error::Config(format!(
                        "table line {}: non-finite entry",
                        lineno + 1
                    )));
                }
                rows.push((t, v));
            }
            _ if lineno == 0 => continue, // header row
            _ => {
                return Err(Error::Config(format!(
                    "table line {}: `{line}` is not numeric",
                    lineno + 1
                )))
            }
        }
        if rows.len() > MAX_TABLE_ROWS {
            return Err(Error::Config("table exceeds the row cap".into()));
        }
    }
    if rows.len() < 2 {
        return Err(Error::Config("table needs at least two rows".into()));
    }
    for w in rows.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(Error::Config(format!(
                "table t values must increase (got {} after {})",
                w[1].0, w[0].0
            )));
        }
    }
    Ok(rows)
}
