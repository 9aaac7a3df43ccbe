//! Deterministic reports in a readable text form or as `key=value` lines.

use std::fmt::{Display, Write as _};

use ktg_core::strand_algebra::diagram_label;
use ktg_core::{Coeff, LinComb, RELATIONS_VERSION};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// Informational output.
    Done,
    Pass,
    Fail,
}

impl Status {
    pub fn from_check(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Done | Status::Pass => 0,
            Status::Fail => 1,
        }
    }
}

/// Text lines for humans plus ordered machine fields.
#[derive(Clone, Debug)]
pub struct Report {
    command: String,
    text: Vec<String>,
    fields: Vec<(String, String)>,
    pub status: Status,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report { command: command.into(), text: Vec::new(), fields: Vec::new(), status: Status::Done }
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.text.push(s.into());
    }

    pub fn field(&mut self, key: impl Into<String>, value: impl Display) {
        self.fields.push((key.into(), value.to_string()));
    }

    /// A text line `label: value` with a matching machine field.
    pub fn both(&mut self, key: &str, label: &str, value: impl Display) {
        let v = value.to_string();
        self.line(format!("{label}: {v}"));
        self.field(key, v);
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Text => {
                let _ = writeln!(out, "ktg {} (relations {RELATIONS_VERSION})", self.command);
                for l in &self.text {
                    let _ = writeln!(out, "{l}");
                }
                match self.status {
                    Status::Pass => out.push_str("PASS\n"),
                    Status::Fail => out.push_str("FAIL\n"),
                    Status::Done => {}
                }
            }
            Format::Machine => {
                let _ = writeln!(out, "command={}", self.command);
                let _ = writeln!(out, "relations_version={RELATIONS_VERSION}");
                for (k, v) in &self.fields {
                    let _ = writeln!(out, "{k}={v}");
                }
                let status = match self.status {
                    Status::Done => "done",
                    Status::Pass => "pass",
                    Status::Fail => "fail",
                };
                let _ = writeln!(out, "status={status}");
            }
        }
        out
    }
}

/// `c [label] + ...` on one line, `0` for the zero combination.
pub fn show<C: Coeff + Display>(v: &LinComb<C>) -> String {
    let terms: Vec<String> = v.terms().map(|(d, c)| format!("({c}){}", diagram_label(d))).collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}
