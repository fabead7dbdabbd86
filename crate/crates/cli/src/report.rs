use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use pencillab_core::compat::{CurvatureClass, Status, Verdict};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// One named result. `status` is `None` for purely informational records.
#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub name: String,
    pub status: Option<Status>,
    pub result: Value,
    #[serde(skip)]
    pub summary: String,
}

impl Record {
    pub fn verdict(name: &str, v: &Verdict<f64>) -> Record {
        let mut summary = format!(
            "{name}: {} (max residual {:.3e}, tolerance {:.1e})",
            status_word(v.status),
            v.max_residual,
            v.tolerance
        );
        if v.status != Status::Holds {
            if let Some(w) = &v.witness {
                summary += &format!("; worst {}{:?} at u = {:?}", w.tensor, w.indices, w.point);
                if let Some(l) = w.lambda {
                    summary += &format!(" with lambda = ({}, {})", l.lambda1, l.lambda2);
                }
            }
        }
        let mut result = to_value(v);
        if !v.lambda_samples.is_empty() {
            result["certificate"] = json!("probabilistic: linearity in lambda is tested on finitely many samples");
        }
        Record { name: name.into(), status: Some(v.status), result, summary }
    }

    /// A residual compared against `tol` without a witness.
    pub fn residual(name: &str, residual: f64, tol: f64, extra: Value) -> Record {
        let status = if residual.is_nan() { Status::Fails } else { Status::classify(residual, tol) };
        let mut result = json!({ "max_residual": residual, "tolerance": tol });
        merge(&mut result, extra);
        let summary = format!("{name}: {} (max residual {residual:.3e}, tolerance {tol:.1e})", status_word(status));
        Record { name: name.into(), status: Some(status), result, summary }
    }

    pub fn curvature(name: &str, c: &CurvatureClass<f64>, expect: Option<&str>) -> Record {
        let kind = kind_word(c);
        let status = expect.map(|e| if e == kind { Status::Holds } else { Status::Fails });
        let mut summary = format!("{name}: {kind}");
        if c.constant_k().is_some() {
            summary += &format!(" with K = {:.9}", c.k);
        }
        summary += &format!(" (flat residual {:.3e}, constant residual {:.3e})", c.flat_residual, c.constant_residual);
        if let (Some(e), Some(s)) = (expect, status) {
            summary += &format!("; expected {e}: {}", status_word(s));
        }
        let mut result = to_value(c);
        if let Some(e) = expect {
            result["expected"] = json!(e);
        }
        Record { name: name.into(), status, result, summary }
    }

    /// The curvature class as a pass/fail record: holds when `kind` matches.
    pub fn curvature_is(name: &str, c: &CurvatureClass<f64>, kind: &str) -> Record {
        Record::curvature(name, c, Some(kind))
    }

    pub fn info(name: &str, result: Value, summary: String) -> Record {
        Record { name: name.into(), status: None, result, summary: format!("{name}: {summary}") }
    }
}

pub fn kind_word(c: &CurvatureClass<f64>) -> &'static str {
    use pencillab_core::compat::CurvatureKind::*;
    match c.kind {
        Flat => "flat",
        ConstantCurvature => "constant_curvature",
        General => "general",
    }
}

pub fn status_word(s: Status) -> &'static str {
    match s {
        Status::Holds => "holds",
        Status::Fails => "fails",
        Status::Inconclusive => "inconclusive",
    }
}

fn to_value<S: Serialize>(s: &S) -> Value {
    serde_json::to_value(s).expect("report values serialize")
}

fn merge(into: &mut Value, extra: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, extra) {
        a.extend(b);
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub input_sha256: String,
    pub settings: Value,
    pub status: Option<Status>,
    pub records: Vec<Record>,
}

impl Report {
    pub fn new(command: &str, input: &[u8], settings: Value, records: Vec<Record>) -> Report {
        let mut h = Sha256::new();
        h.update(input);
        h.update(settings.to_string().as_bytes());
        let status = records.iter().filter_map(|r| r.status).reduce(Status::and);
        Report {
            tool: "pencillab",
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            input_sha256: format!("{:x}", h.finalize()),
            settings,
            status,
            records,
        }
    }

    /// 0 when every checked record holds, 2 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self.status {
            None | Some(Status::Holds) => 0,
            Some(_) => 2,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Writes through a temporary file in the target directory and renames it into place.
    pub fn write_atomic(&self, path: &Path) -> Result<()> {
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d,
            _ => Path::new("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir)
            .with_context(|| format!("cannot create a temporary file in {}", dir.display()))?;
        tmp.write_all(self.to_json().as_bytes()).context("cannot write report")?;
        tmp.persist(path).with_context(|| format!("cannot write report to {}", path.display()))?;
        Ok(())
    }
}
