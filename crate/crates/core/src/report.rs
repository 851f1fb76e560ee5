//! Structured check reports shared by the verifiers and the CLI.

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub check: String,
    pub context: String,
    pub expected: String,
    pub got: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
    pub summary: Summary,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(
        &mut self,
        check: impl Into<String>,
        context: impl Into<String>,
        expected: impl Into<String>,
        got: impl Into<String>,
        pass: bool,
    ) {
        self.checks.push(Check {
            check: check.into(),
            context: context.into(),
            expected: expected.into(),
            got: got.into(),
            pass,
        });
        self.summary.total += 1;
        if pass {
            self.summary.passed += 1;
        } else {
            self.summary.failed += 1;
        }
    }

    /// Record an equality check, rendering both sides with `Display`.
    pub fn push_eq<T: PartialEq + std::fmt::Display>(
        &mut self,
        check: impl Into<String>,
        context: impl Into<String>,
        expected: &T,
        got: &T,
    ) {
        let pass = expected == got;
        self.push(check, context, expected.to_string(), got.to_string(), pass);
    }

    pub fn extend(&mut self, other: Report) {
        for c in other.checks {
            self.push(c.check, c.context, c.expected, c.got, c.pass);
        }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.check == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
