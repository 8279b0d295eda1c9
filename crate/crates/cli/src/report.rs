//! Machine-readable results.

use std::fmt::Write;

use fibsite_core::sset::FgAbelianGroup;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bundle::Bundle;
use crate::parse::sha256_hex;

pub const SCHEMA: &str = "fibsite-report/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Input {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parameters {
    pub seed: u64,
    pub truncation: usize,
    pub nmax: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub step: String,
    pub millis: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub inputs: Vec<Input>,
    /// SHA-256 over the per-file hashes in order.
    pub inputs_hash: String,
    pub parameters: Parameters,
    pub verdicts: Vec<Verdict>,
    pub payload: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Vec<Timing>>,
}

impl Report {
    pub fn new(command: &str, bundle: &Bundle, parameters: Parameters) -> Self {
        let inputs: Vec<Input> =
            bundle.sources.iter().map(|s| Input { path: s.path.clone(), sha256: s.sha256.clone() }).collect();
        let joined: String = inputs.iter().map(|i| i.sha256.as_str()).collect::<Vec<_>>().join("\n");
        Report {
            schema: SCHEMA.into(),
            command: command.into(),
            inputs,
            inputs_hash: sha256_hex(joined.as_bytes()),
            parameters,
            verdicts: Vec::new(),
            payload: json!({}),
            timings: None,
        }
    }

    pub fn verdict(&mut self, check: impl Into<String>, pass: bool, detail: Option<String>) {
        self.verdicts.push(Verdict { check: check.into(), pass, detail });
    }

    pub fn pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Markdown,
}

pub fn emit_report(r: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(r).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Markdown => markdown(r),
    }
}

pub fn parse_report(text: &str) -> serde_json::Result<Report> {
    serde_json::from_str(text)
}

/// `{"group": "Z ⊕ Z/2", "rank": 1, "torsion": [2]}`.
pub fn group_json(g: &FgAbelianGroup) -> Value {
    let torsion: Vec<Value> =
        g.torsion.iter().map(|t| t.to_u64().map_or_else(|| Value::String(t.to_string()), Value::from)).collect();
    json!({ "group": g.to_string(), "rank": g.free_rank, "torsion": torsion })
}

/// One row per degree.
pub fn degrees_json(groups: &[FgAbelianGroup]) -> Value {
    Value::Array(
        groups
            .iter()
            .enumerate()
            .map(|(n, g)| {
                let mut v = group_json(g);
                v["degree"] = json!(n);
                v
            })
            .collect(),
    )
}

fn markdown(r: &Report) -> String {
    let mut out = String::new();
    writeln!(out, "# fibsite {}\n", r.command).unwrap();
    writeln!(out, "- schema: `{}`", r.schema).unwrap();
    for i in &r.inputs {
        writeln!(out, "- input: `{}` (sha256 `{}`)", i.path, &i.sha256[..16.min(i.sha256.len())]).unwrap();
    }
    let p = &r.parameters;
    writeln!(out, "- seed: {}, truncation: {}, nmax: {}\n", p.seed, p.truncation, p.nmax).unwrap();
    writeln!(out, "## Verdicts\n").unwrap();
    if r.verdicts.is_empty() {
        writeln!(out, "(none)\n").unwrap();
    } else {
        writeln!(out, "| check | result | detail |\n|---|---|---|").unwrap();
        for v in &r.verdicts {
            let detail = v.detail.as_deref().unwrap_or("").replace('|', "\\|");
            writeln!(out, "| {} | {} | {} |", v.check.replace('|', "\\|"), if v.pass { "pass" } else { "FAIL" }, detail)
                .unwrap();
        }
        out.push('\n');
    }
    write_tables(&mut out, &r.payload);
    if let Some(t) = &r.timings {
        writeln!(out, "## Timings\n\n| step | ms |\n|---|---|").unwrap();
        for s in t {
            writeln!(out, "| {} | {:.1} |", s.step, s.millis).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Degree tables for every `degrees` array found in the payload, then the
/// rest as JSON.
fn write_tables(out: &mut String, payload: &Value) {
    let mut tables = Vec::new();
    collect_degree_tables(payload, String::new(), &mut tables);
    for (title, rows) in tables {
        writeln!(out, "## {}\n\n| n | group |\n|---|---|", if title.is_empty() { "Groups".into() } else { title }).unwrap();
        for row in rows {
            let n = row["degree"].as_u64().unwrap_or(0);
            let g = row["group"].as_str().unwrap_or("?");
            writeln!(out, "| {n} | {g} |").unwrap();
        }
        out.push('\n');
    }
    writeln!(out, "## Payload\n\n```json\n{}\n```", serde_json::to_string_pretty(payload).unwrap()).unwrap();
}

fn collect_degree_tables<'a>(v: &'a Value, path: String, out: &mut Vec<(String, &'a Vec<Value>)>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let here = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                if k == "degrees" {
                    if let Value::Array(rows) = child {
                        let title = map.get("title").and_then(Value::as_str).map_or(path.clone(), str::to_string);
                        out.push((title, rows));
                        continue;
                    }
                }
                collect_degree_tables(child, here, out);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                collect_degree_tables(child, format!("{path}[{i}]"), out);
            }
        }
        _ => {}
    }
}
