//! Plain-text reports: one line per check, stable ordering, no timings.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::{RunConfig, Suite};

pub const REPORT_HEADER: &str = "tracklab-report v1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub id: String,
    /// Stable name of the property the check stands for.
    pub anchor: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(id: impl Into<String>, anchor: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            id: id.into(),
            anchor,
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub suite: Suite,
    pub params: String,
    pub checks: Vec<Check>,
    /// Free-form lines, e.g. excluded runs and diagnostics.
    pub notes: Vec<String>,
    /// Extra files written next to the report, by name.
    pub artifacts: Vec<(String, String)>,
}

impl Report {
    pub fn new(suite: Suite, cfg: &RunConfig) -> Self {
        Report {
            suite,
            params: cfg.describe(suite),
            checks: Vec::new(),
            notes: Vec::new(),
            artifacts: Vec::new(),
        }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    pub fn failed(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    pub fn passed(&self) -> bool {
        self.failed() == 0
    }

    /// Checks whose anchor is `anchor`.
    pub fn with_anchor<'a>(&'a self, anchor: &'a str) -> impl Iterator<Item = &'a Check> + 'a {
        self.checks.iter().filter(move |c| c.anchor == anchor)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{REPORT_HEADER}").unwrap();
        writeln!(s, "suite {}", self.suite).unwrap();
        writeln!(s, "params {}", self.params).unwrap();
        for c in &self.checks {
            let status = if c.passed { "pass" } else { "FAIL" };
            let line = format!("check {} anchor={} status={} {}", c.id, c.anchor, status, c.detail);
            writeln!(s, "{}", line.trim_end()).unwrap();
        }
        for n in &self.notes {
            writeln!(s, "note {n}").unwrap();
        }
        writeln!(
            s,
            "summary checks={} passed={} failed={}",
            self.checks.len(),
            self.checks.len() - self.failed(),
            self.failed()
        )
        .unwrap();
        s
    }

    pub fn file_name(&self) -> String {
        format!("{}.report", self.suite)
    }

    /// Writes the report and its artifacts into `dir`; returns the paths.
    pub fn write_to(&self, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut out = Vec::new();
        let p = dir.join(self.file_name());
        std::fs::write(&p, self.render())?;
        out.push(p);
        for (name, body) in &self.artifacts {
            let p = dir.join(name);
            std::fs::write(&p, body)?;
            out.push(p);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_lists_checks_then_summary() {
        let mut r = Report::new(Suite::Claims, &RunConfig::for_suite(Suite::Claims));
        r.push(Check::new("a", "x.y", true, "n=1"));
        r.push(Check::new("b", "x.y", false, ""));
        r.note("hello");
        let text = r.render();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], REPORT_HEADER);
        assert_eq!(lines[1], "suite claims");
        assert!(lines[2].contains("seed=7"));
        assert_eq!(lines[3], "check a anchor=x.y status=pass n=1");
        assert_eq!(lines.last().unwrap(), &"summary checks=2 passed=1 failed=1");
        assert!(!r.passed());
        assert_eq!(r.with_anchor("x.y").count(), 2);
    }
}
