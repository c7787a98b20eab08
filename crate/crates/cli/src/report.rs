use std::fs;
use std::path::Path;

use serde_json::Value;

use crate::{CmdResult, Failure};

struct Row {
    kind: String,
    name: String,
    status: String,
    detail: String,
}

fn row(file: &str, v: &Value) -> Option<Row> {
    let s = |k: &str| v.get(k).and_then(Value::as_str).unwrap_or("").to_string();
    match v.get("kind")?.as_str()? {
        "verify" => Some(Row {
            kind: "verify".into(),
            name: format!("{} (n={})", s("suite"), v["config"]["n"]),
            status: s("status"),
            detail: format!(
                "{} checks, {} failures, {} infeasible",
                v["checks"],
                v["failures"].as_array().map_or(0, Vec::len),
                v["infeasible"].as_array().map_or(0, Vec::len)
            ),
        }),
        "census" => {
            let counts: Vec<String> = v["results"]
                .as_array()?
                .iter()
                .map(|r| format!("q={}:{}", r["q"], r["orbit_count"]))
                .collect();
            Some(Row {
                kind: "census".into(),
                name: format!("{} (n={})", v["config"]["space"].as_str().unwrap_or(file), v["config"]["n"]),
                status: v["verdict"].as_str().unwrap_or("-").to_string(),
                detail: counts.join(" "),
            })
        }
        _ => None,
    }
}

pub fn run(store: &Path, format: &str) -> CmdResult {
    if format != "markdown" && format != "csv" {
        return Err(Failure::usage(format!("unknown format {format:?}")));
    }
    let mut rows = Vec::new();
    if store.is_dir() {
        let mut paths: Vec<_> = fs::read_dir(store)?.filter_map(|e| e.ok().map(|e| e.path())).collect();
        paths.sort();
        for p in paths {
            if p.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            let text = fs::read_to_string(&p)?;
            let v: Value = serde_json::from_str(&text)
                .map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?;
            let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("").to_string();
            if let Some(r) = row(&name, &v) {
                rows.push(r);
            }
        }
    }
    if rows.is_empty() {
        return Err(Failure::usage(format!("no results in {}", store.display())));
    }
    if format == "csv" {
        let mut w = csv::Writer::from_writer(std::io::stdout());
        w.write_record(["kind", "name", "status", "detail"]).map_err(|e| Failure::usage(e.to_string()))?;
        for r in &rows {
            w.write_record([&r.kind, &r.name, &r.status, &r.detail]).map_err(|e| Failure::usage(e.to_string()))?;
        }
        w.flush()?;
    } else {
        crate::out!("| kind | name | status | detail |");
        crate::out!("|---|---|---|---|");
        for r in &rows {
            let cell = |s: &str| s.replace('|', "\\|");
            crate::out!("| {} | {} | {} | {} |", r.kind, cell(&r.name), cell(&r.status), cell(&r.detail));
        }
    }
    let failed = rows.iter().any(|r| r.kind == "verify" && r.status == "fail");
    Ok(if failed { 1 } else { 0 })
}
