//! Human-readable and JSON renderings of verification results.

use std::fmt::Write as _;

use ars_core::regularity::{GenerationReport, TheoremReport};
use serde::Serialize;

#[derive(Serialize)]
struct CheckRecord<'a> {
    claim: &'a str,
    status: &'static str,
    detail: &'a str,
    witness: Option<String>,
}

#[derive(Serialize)]
struct TheoremRecord<'a> {
    theorem: &'static str,
    holds: bool,
    checks: Vec<CheckRecord<'a>>,
}

pub fn theorem_json(report: &TheoremReport) -> String {
    let record = TheoremRecord {
        theorem: report.theorem.name(),
        holds: report.holds(),
        checks: report
            .checks
            .iter()
            .map(|c| CheckRecord {
                claim: &c.claim,
                status: if c.passed { "pass" } else { "fail" },
                detail: &c.detail,
                witness: c.evidence.as_ref().map(ToString::to_string),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&record).expect("plain data serializes")
}

pub fn theorem_text(report: &TheoremReport) -> String {
    let mut out = String::new();
    let verdict = if report.holds() { "holds" } else { "FAILS" };
    let _ = writeln!(out, "theorem {}: {verdict}", report.theorem);
    for c in &report.checks {
        let mark = if c.passed { "ok  " } else { "FAIL" };
        let _ = writeln!(out, "  [{mark}] {} ({})", c.claim, c.detail);
        if let Some(e) = &c.evidence {
            let _ = writeln!(out, "         witness: {e}");
        }
    }
    out
}

#[derive(Serialize)]
struct GenerationRecord {
    generated: bool,
    witnesses: usize,
    counterexample: Option<CounterexampleRecord>,
}

#[derive(Serialize)]
struct CounterexampleRecord {
    input: String,
    state: String,
    conflict: String,
}

pub fn generation_json(report: &GenerationReport) -> String {
    let record = GenerationRecord {
        generated: report.generated(),
        witnesses: report
            .computation()
            .map_or(0, |pi| pi.iter().map(|(_, rs)| rs.len()).sum()),
        counterexample: report.counterexample().map(|c| CounterexampleRecord {
            input: c.input.to_string(),
            state: c.state.to_string(),
            conflict: c.refutation.to_string(),
        }),
    };
    serde_json::to_string_pretty(&record).expect("plain data serializes")
}

pub fn generation_text(report: &GenerationReport) -> String {
    match report.counterexample() {
        None => "generated: yes\n".to_string(),
        Some(c) => format!(
            "generated: no\n  input: {}\n  state: {}\n  reason: {}\n",
            c.input, c.state, c.refutation
        ),
    }
}
