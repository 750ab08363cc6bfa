//! Machine-readable verification reports with deterministic serialization.

use serde::Serialize;

/// One check in a suite.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CheckResult {
    pub fn pass(name: impl Into<String>) -> CheckResult {
        CheckResult {
            name: name.into(),
            status: "pass".into(),
            witness: None,
        }
    }

    pub fn fail(name: impl Into<String>, witness: impl Into<String>) -> CheckResult {
        CheckResult {
            name: name.into(),
            status: "fail".into(),
            witness: Some(witness.into()),
        }
    }

    pub fn skip(name: impl Into<String>, reason: impl Into<String>) -> CheckResult {
        CheckResult {
            name: name.into(),
            status: "skip".into(),
            witness: Some(reason.into()),
        }
    }

    pub fn of(name: impl Into<String>, ok: bool, witness: impl Into<String>) -> CheckResult {
        if ok {
            CheckResult::pass(name)
        } else {
            CheckResult::fail(name, witness)
        }
    }
}

/// A suite report: checks, seed, failure count; timing is kept out of the
/// canonical output so identical runs are byte-identical.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

impl Report {
    pub fn new(suite: impl Into<String>, seed: u64) -> Report {
        Report {
            suite: suite.into(),
            seed,
            checks: Vec::new(),
            failures: 0,
        	timing_ms: None,
        }
    }

    pub fn push(&mut self, check: CheckResult) {
        if check.status == "fail" {
            self.failures += 1;
        }
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: Vec<CheckResult>) {
        for c in checks {
            self.push(c);
        }
    }

    pub fn all_passed(&self) -> bool {
        self.failures == 0
    }

    pub fn exit_code(&self) -> i32 {
        if self.failures == 0 {
            0
        } else {
            1
        }
    }

    /// Canonical JSON: sorted keys, newline-terminated, no volatile fields.
    pub fn to_canonical_json(&self) -> String {
        let v = serde_json::to_value(self).expect("report serializes");
        let mut s = serde_json::to_string_pretty(&v).expect("canonical json");
        s.push('\n');
        s
    }

    /// TSV with a header row, one line per check.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("suite\tname\tstatus\twitness\n");
        for c in &self.checks {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                self.suite,
                c.name,
                c.status,
                c.witness.as_deref().unwrap_or("")
            ));
        }
        out
    }
}

/// Canonical JSON for arbitrary serializable data (sorted keys, newline
/// terminated).
pub fn emit_json<T: Serialize>(data: &T) -> String {
    let v = serde_json::to_value(data).expect("serializable");
    let mut s = serde_json::to_string_pretty(&v).expect("canonical json");
    s.push('\n');
    s
}

/// TSV table with a header; rows are stringified cells.
pub fn emit_tsv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join("\t");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join("\t"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_code_contract() {
        let mut r = Report::new("demo", 1);
        r.push(CheckResult::pass("a"));
        assert_eq!(r.exit_code(), 0);
        r.push(CheckResult::fail("b", "broken"));
        assert_eq!(r.exit_code(), 1);
        assert_eq!(r.failures, 1);
    }

    #[test]
    fn canonical_json_is_sorted_and_newline_terminated() {
        let mut r = Report::new("demo", 42);
        r.push(CheckResult::pass("x"));
        let s = r.to_canonical_json();
        assert!(s.ends_with('\n'));
        // keys of the top object appear in sorted order
        let c = s.find("\"checks\"").unwrap();
        let f = s.find("\"failures\"").unwrap();
        let seed = s.find("\"seed\"").unwrap();
        let suite = s.find("\"suite\"").unwrap();
        assert!(c < f && f < seed && seed < suite);
    }

    #[test]
    fn tsv_has_header_even_when_empty() {
        let r = Report::new("demo", 0);
        let tsv = r.to_tsv();
        assert!(tsv.starts_with("suite\tname\tstatus\twitness\n"));
        assert_eq!(tsv.lines().count(), 1);
    }
}
