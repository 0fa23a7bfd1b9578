//! The checked-in enumeration table and σ self-check snapshot.

use std::fs;
use std::path::Path;

use serde_json::{json, Value};
use uat_topo_core::sigma::SelfCheckReport;
use uat_topo_core::{nat_to_poly, EnumIndex, SigmaMode, Superactivation};

use crate::report::{rational_text, uint_text};
use crate::{CliError, Outcome};

pub const ENUMERATION_FILE: &str = "enumeration.json";
pub const SELF_CHECK_FILE: &str = "sigma_self_check.json";
pub const GOLDEN_ENTRIES: u64 = 64;
pub const SNAPSHOT_MMAX: u64 = 20;
pub const SNAPSHOT_GRID: usize = 21;

pub fn self_check_json(report: &SelfCheckReport, passed: bool) -> Value {
    let segments: Vec<Value> = report
        .segments
        .iter()
        .map(|s| {
            json!({
                "m": s.m,
                "deviation": s.deviation,
                "poly_sup": s.poly_sup,
                "junction_gap_left": s.junction_gap_left,
                "junction_gap_right": s.junction_gap_right,
                "first_derivative": s.first_derivative,
                "second_derivative": s.second_derivative,
            })
        })
        .collect();
    json!({
        "mode": report.mode_name(),
        "alpha": rational_text(&report.alpha),
        "m_max": report.m_max,
        "grid": report.grid,
        "max_deviation": report.max_deviation,
        "max_junction_gap": report.max_junction_gap,
        "max_first_derivative_ratio": report.max_first_derivative_ratio,
        "max_second_derivative_ratio": report.max_second_derivative_ratio,
        "passed": passed,
        "segments": segments,
    })
}

/// Index ↦ polynomial for the first [`GOLDEN_ENTRIES`] indices.
pub fn enumeration_json() -> Result<String, CliError> {
    let mut entries = Vec::new();
    for n in 0..GOLDEN_ENTRIES {
        let p = nat_to_poly(&EnumIndex::from(n))?;
        entries.push(json!({
            "index": uint_text(EnumIndex::from(n).value()),
            "coeffs": p.coeffs().iter().map(rational_text).collect::<Vec<_>>(),
            "poly": p.to_string(),
        }));
    }
    Ok(to_pretty(&json!({ "entries": entries })))
}

pub fn self_check_snapshot() -> Result<String, CliError> {
    let mut modes = Vec::new();
    for mode in [SigmaMode::PaperLiteral, SigmaMode::SmoothGlued] {
        let report = Superactivation::with_mode(mode).self_check(SNAPSHOT_MMAX, SNAPSHOT_GRID)?;
        modes.push(self_check_json(&report, true));
    }
    // The pass flag is decided by `sigma check`; the snapshot only records values.
    for m in &mut modes {
        m.as_object_mut().expect("object").remove("passed");
    }
    Ok(to_pretty(&json!({ "reports": modes })))
}

fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data");
    s.push('\n');
    s
}

pub fn dump(dir: &Path) -> Result<Outcome, CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    let mut files = Vec::new();
    for (name, body) in [(ENUMERATION_FILE, enumeration_json()?), (SELF_CHECK_FILE, self_check_snapshot()?)] {
        fs::write(dir.join(name), &body).map_err(io)?;
        files.push(json!({ "file": name, "bytes": body.len() }));
    }
    let results = json!({ "dir": dir.display().to_string(), "files": files });
    Ok(Outcome { results, certificate: None, passed: true })
}
