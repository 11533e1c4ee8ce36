use std::fmt::Write as _;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::kernel::{Derivation, Judgment, Step};
use crate::suites::SuiteReport;
use crate::syntax::Theory;

/// Version tag of the JSON form.
pub const SCHEMA: &str = "decor-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Failed,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Translation {
    /// The translated theory in script syntax.
    pub script: String,
    pub theory: Theory,
}

/// Outcome of one command or failed declaration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub line: usize,
    pub command: String,
    pub status: Status,
    /// Derivation nodes checked by the kernel.
    pub nodes: usize,
    /// Points enumerated by the finite model.
    pub points: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conclusion: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub tree: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<SuiteReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub translation: Option<Translation>,
    /// Wall-clock time, shown in text reports only.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl Entry {
    pub fn new(line: usize, command: String, status: Status) -> Entry {
        Entry {
            line,
            command,
            status,
            nodes: 0,
            points: 0,
            conclusion: None,
            message: None,
            witness: None,
            output: None,
            tree: Vec::new(),
            suite: None,
            translation: None,
            elapsed: Duration::ZERO,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub ok: usize,
    pub failed: usize,
    pub errors: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub entries: Vec<Entry>,
    pub summary: Summary,
}

impl Report {
    pub fn new(entries: Vec<Entry>) -> Report {
        let count = |s: Status| entries.iter().filter(|e| e.status == s).count();
        let summary = Summary {
            ok: count(Status::Ok),
            failed: count(Status::Failed),
            errors: count(Status::Error),
        };
        Report {
            schema: SCHEMA.to_string(),
            entries,
            summary,
        }
    }

    /// 0 when everything succeeded, 2 on any error, else 1.
    pub fn exit_code(&self) -> i32 {
        if self.summary.errors > 0 {
            2
        } else if self.summary.failed > 0 {
            1
        } else {
            0
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

/// Renders a report; the JSON form depends only on the script and options.
pub fn emit_report(report: &Report, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            s.into_bytes()
        }
        Format::Text => text(report).into_bytes(),
    }
}

fn text(report: &Report) -> String {
    let mut out = String::new();
    for e in &report.entries {
        let tag = match e.status {
            Status::Ok => "ok",
            Status::Failed => "FAILED",
            Status::Error => "error",
        };
        let _ = writeln!(out, "[{tag}] line {}: {}", e.line, e.command);
        if let Some(c) = &e.conclusion {
            let _ = writeln!(out, "    conclusion: {c}");
        }
        if let Some(o) = &e.output {
            let _ = writeln!(out, "    result: {o}");
        }
        if let Some(m) = &e.message {
            let _ = writeln!(out, "    {m}");
        }
        if let Some(w) = &e.witness {
            let _ = writeln!(out, "    witness: {w}");
        }
        for line in &e.tree {
            let _ = writeln!(out, "    {line}");
        }
        if let Some(s) = &e.suite {
            suite_text(&mut out, s);
        }
        if let Some(t) = &e.translation {
            for line in t.script.lines() {
                let _ = writeln!(out, "    {line}");
            }
        }
        let mut counters = Vec::new();
        if e.nodes > 0 {
            counters.push(format!("{} nodes", e.nodes));
        }
        if e.points > 0 {
            counters.push(format!("{} points", e.points));
        }
        counters.push(format!("{:.1?}", e.elapsed));
        let _ = writeln!(out, "    ({})", counters.join(", "));
    }
    let s = &report.summary;
    let _ = writeln!(out, "{} ok, {} failed, {} errors", s.ok, s.failed, s.errors);
    out
}

fn suite_text(out: &mut String, s: &SuiteReport) {
    use crate::suites::LawStatus;
    for l in &s.laws {
        let verdict = match &l.status {
            LawStatus::Checked(v) if v.holds() => "holds".to_string(),
            LawStatus::Checked(crate::model::Verdict::Fails { witness }) => format!("fails at {witness}"),
            LawStatus::Checked(_) => unreachable!(),
            LawStatus::Skipped(why) => format!("skipped: {why}"),
        };
        let _ = writeln!(out, "    {}: {verdict}", l.law);
    }
    for r in &s.nesting {
        let _ = writeln!(out, "    {}: {} (predicted {})", r.scenario, r.observed.join(" | "), r.predicted.join(" | "));
    }
    for r in &s.duality {
        let _ = writeln!(
            out,
            "    {} / {}: {}",
            r.states_law,
            r.exceptions_law,
            if r.ok() { "both hold" } else { "mismatch" }
        );
    }
}

/// Indented rule tree: each conclusion above its premises.
pub fn render_tree(theory: &Theory, d: &Derivation) -> Vec<String> {
    fn go(theory: &Theory, d: &Derivation, depth: usize, out: &mut Vec<String>) {
        let step = match &d.step {
            Step::Axiom(i) => match theory.axioms.get(*i) {
                Some(a) => format!("axiom {}", a.label),
                None => format!("axiom #{i}"),
            },
            other => other.to_string(),
        };
        let inst: Vec<String> = d.inst.iter().map(|(k, v)| format!("{k} = {v}")).collect();
        let what = match &d.conclusion {
            Judgment::Holds(e) => e.to_string(),
            j => j.to_string(),
        };
        let mut line = format!("{}{what}   [{step}", "  ".repeat(depth));
        if !inst.is_empty() {
            let _ = write!(line, "; {}", inst.join(", "));
        }
        line.push(']');
        out.push(line);
        for p in &d.premises {
            go(theory, p, depth + 1, out);
        }
    }
    let mut out = Vec::new();
    go(theory, d, 0, &mut out);
    out
}
