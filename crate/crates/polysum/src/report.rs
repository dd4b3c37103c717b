//! Line-delimited report records: stable, diff-able output for golden
//! files. Wall time is deliberately not serialized.

use serde::Serialize;
use serde_json::{json, Value};

use crate::verify::{Status, VerificationReport};

/// One serialized result line: `{claim, status, bound, data}`.
#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub claim: String,
    pub status: Status,
    pub bound: u64,
    pub data: Value,
}

impl From<&VerificationReport> for Record {
    fn from(r: &VerificationReport) -> Self {
        let mut data = r.data.clone();
        if !r.counterexamples.is_empty() {
            data.as_object_mut()
                .expect("report data is an object")
                .insert("counterexamples".into(), json!(r.counterexamples));
        }
        Record {
            claim: r.claim.clone(),
            status: r.status,
            bound: r.bound,
            data,
        }
    }
}

impl Record {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }
}

/// Serializes reports as one JSON object per line, in input order.
pub fn to_jsonl(reports: &[VerificationReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&Record::from(r).to_line());
        out.push('\n');
    }
    out
}

/// One-line human summary for a report stream.
pub fn summary(reports: &[VerificationReport]) -> String {
    let passed = reports.iter().filter(|r| r.passed()).count();
    let total_ms: u64 = reports.iter().map(|r| r.wall_time_ms).sum();
    format!("{passed}/{} claims passed in {total_ms} ms", reports.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify;

    #[test]
    fn records_are_stable_and_exclude_wall_time() {
        let mut a = verify::run_by_id("truant-tables", Some(200)).unwrap();
        let mut b = verify::run_by_id("truant-tables", Some(200)).unwrap();
        a.wall_time_ms = 7;
        b.wall_time_ms = 900;
        let la = Record::from(&a).to_line();
        let lb = Record::from(&b).to_line();
        assert_eq!(la, lb);
        assert!(!la.contains("wall_time"));
        assert!(la.starts_with("{\"claim\":\"truant-tables\""));
    }

    #[test]
    fn failures_carry_counterexamples_in_data() {
        let r = VerificationReport {
            claim: "x".into(),
            status: Status::Fail,
            bound: 10,
            counterexamples: vec![3],
            data: serde_json::json!({}),
            wall_time_ms: 0,
        };
        let line = Record::from(&r).to_line();
        assert!(line.contains("\"counterexamples\":[3]"));
        assert_eq!(summary(&[r]), "0/1 claims passed in 0 ms");
    }
}
