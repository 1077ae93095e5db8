//! Structured verification reports.
//!
//! Reports are deterministic artifacts: identical configuration, seed and
//! precision produce byte-identical JSON. Residuals are serialized in
//! scientific notation with three significant digits; wall-clock timings are
//! kept in memory for live display but never serialized, so reruns compare
//! equal.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum CheckStatus {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CheckRecord {
    pub id: String,
    pub params: String,
    pub status: CheckStatus,
    /// `"residual"` for tolerance checks, `"exact"` for exact ones.
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<bool>,
    /// Failure detail: the violated condition or a witness.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    /// Informational notes (orientation flips, normalizations).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Per-sample residuals, when a sweep wants them on record.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<String>>,
    /// Not serialized: timings vary run to run.
    #[serde(skip)]
    pub runtime_ms: Option<u128>,
}

pub fn fmt_residual(x: f64) -> String {
    format!("{x:.2e}")
}

impl CheckRecord {
    pub fn residual_check(id: impl Into<String>, params: impl Into<String>, residual: f64, tol: f64) -> Self {
        CheckRecord {
            id: id.into(),
            params: params.into(),
            status: if residual <= tol && residual.is_finite() {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            kind: "residual".into(),
            residual: Some(fmt_residual(residual)),
            tolerance: Some(fmt_residual(tol)),
            exact: None,
            witness: None,
            note: None,
            samples: None,
            runtime_ms: None,
        }
    }

    pub fn exact_check(id: impl Into<String>, params: impl Into<String>, ok: bool) -> Self {
        CheckRecord {
            id: id.into(),
            params: params.into(),
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            kind: "exact".into(),
            residual: None,
            tolerance: None,
            exact: Some(ok),
            witness: None,
            note: None,
            samples: None,
            runtime_ms: None,
        }
    }

    pub fn failed(id: impl Into<String>, params: impl Into<String>, witness: impl ToString) -> Self {
        CheckRecord {
            id: id.into(),
            params: params.into(),
            status: CheckStatus::Fail,
            kind: "exact".into(),
            residual: None,
            tolerance: None,
            exact: Some(false),
            witness: Some(witness.to_string()),
            note: None,
            samples: None,
            runtime_ms: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn with_samples(mut self, samples: Vec<f64>) -> Self {
        self.samples = Some(samples.into_iter().map(fmt_residual).collect());
        self
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VerificationReport {
    pub version: String,
    pub seed: u64,
    pub digits: u32,
    pub checks: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn new(seed: u64, digits: u32) -> Self {
        VerificationReport {
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            digits,
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, record: CheckRecord) {
        self.checks.push(record);
    }

    pub fn extend(&mut self, records: Vec<CheckRecord>) {
        self.checks.extend(records);
    }

    /// Assembly is order-independent: records sort by id.
    pub fn finalize(&mut self) {
        self.checks.sort_by(|a, b| a.id.cmp(&b.id));
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == CheckStatus::Pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn from_json(src: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(src)
    }

    pub fn to_text_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "verification report v{} (seed {}, {} digits)\n",
            self.version, self.seed, self.digits
        ));
        let id_width = self.checks.iter().map(|c| c.id.len()).max().unwrap_or(8).max(8);
        out.push_str(&format!(
            "{:<width$}  {:<6}  {:<10}  {:<10}  detail\n",
            "check", "status", "residual", "tolerance",
            width = id_width
        ));
        for c in &self.checks {
            let status = match c.status {
                CheckStatus::Pass => "PASS",
                CheckStatus::Fail => "FAIL",
            };
            let residual = c.residual.clone().unwrap_or_else(|| "-".into());
            let tol = c.tolerance.clone().unwrap_or_else(|| "-".into());
            let mut detail = String::new();
            if let Some(w) = &c.witness {
                detail.push_str(w);
            }
            if let Some(n) = &c.note {
                if !detail.is_empty() {
                    detail.push_str("; ");
                }
                detail.push_str(n);
            }
            if let Some(ms) = c.runtime_ms {
                if !detail.is_empty() {
                    detail.push_str("; ");
                }
                detail.push_str(&format!("{ms} ms"));
            }
            out.push_str(&format!(
                "{:<width$}  {:<6}  {:<10}  {:<10}  {}\n",
                c.id, status, residual, tol, detail,
                width = id_width
            ));
        }
        let (pass, fail) = self.checks.iter().fold((0, 0), |(p, f), c| match c.status {
            CheckStatus::Pass => (p + 1, f),
            CheckStatus::Fail => (p, f + 1),
        });
        out.push_str(&format!("{pass} passed, {fail} failed\n"));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residual_formatting() {
        assert_eq!(fmt_residual(1.234e-12), "1.23e-12");
        assert_eq!(fmt_residual(0.0), "0.00e0");
        assert_eq!(fmt_residual(5.678e3), "5.68e3");
    }

    #[test]
    fn json_round_trip_and_determinism() {
        let mut r = VerificationReport::new(7, 40);
        r.push(CheckRecord::residual_check("b/check", "x=1", 1e-13, 1e-10));
        r.push(CheckRecord::exact_check("a/check", "", true).with_note("orientation: -E"));
        r.finalize();
        assert_eq!(r.checks[0].id, "a/check");
        let json = r.to_json();
        let back = VerificationReport::from_json(&json).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json(), json);
        assert!(r.all_passed());
    }

    #[test]
    fn runtime_not_serialized() {
        let mut r = VerificationReport::new(1, 40);
        let mut c = CheckRecord::exact_check("x", "", true);
        c.runtime_ms = Some(12345);
        r.push(c);
        let json = r.to_json();
        assert!(!json.contains("12345"));
        assert!(!json.contains("runtime"));
    }

    #[test]
    fn failed_checks_show_in_table() {
        let mut r = VerificationReport::new(1, 40);
        r.push(CheckRecord::failed("z/bad", "", "violating vector (1, 0)"));
        assert!(!r.all_passed());
        let t = r.to_text_table();
        assert!(t.contains("FAIL"));
        assert!(t.contains("violating vector"));
        assert!(t.contains("0 passed, 1 failed"));
    }

    #[test]
    fn empty_report_is_valid() {
        let mut r = VerificationReport::new(0, 40);
        r.finalize();
        assert!(r.all_passed());
        assert!(r.to_text_table().contains("0 passed, 0 failed"));
    }
}
