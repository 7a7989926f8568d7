//! Verification records and their CSV/JSON serialization.
//!
//! Reports are byte-deterministic for a fixed config and seed, apart from the
//! `generated_at` stamp: records are sorted by (field, point, operator), and
//! floats are written with 17 significant digits so they round-trip exactly.

use crate::{Point, Result};
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct PointRecord {
    pub field_index: usize,
    pub point_index: usize,
    pub operator: String,
    pub point: Point,
    pub true_value: f64,
    pub continued_value: f64,
    pub abs_error: f64,
    pub correction: f64,
    pub truncation_k_used: usize,
    pub quadrature_error_estimate: f64,
    /// `ok` or the error the operator reported for this point.
    pub status: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct OperatorSummary {
    pub operator: String,
    pub points: usize,
    pub failures: usize,
    pub max_abs_error: f64,
    pub median_abs_error: f64,
    pub gate: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub generated_at: String,
    pub config: BTreeMap<String, String>,
    pub records: Vec<PointRecord>,
    pub summaries: Vec<OperatorSummary>,
    pub passed: bool,
}

impl VerificationReport {
    pub fn new(
        config: BTreeMap<String, String>,
        mut records: Vec<PointRecord>,
        gates: &BTreeMap<String, f64>,
    ) -> Self {
        records.sort_by(|a, b| {
            (a.field_index, a.point_index, &a.operator).cmp(&(
                b.field_index,
                b.point_index,
                &b.operator,
            ))
        });
        let mut by_op: BTreeMap<String, Vec<&PointRecord>> = BTreeMap::new();
        for r in &records {
            by_op.entry(r.operator.clone()).or_default().push(r);
        }
        let mut summaries = Vec::new();
        let mut passed = true;
        for (op, rs) in by_op {
            let gate = gates.get(&op).copied().unwrap_or(f64::INFINITY);
            let mut errs: Vec<f64> = rs
                .iter()
                .filter(|r| r.status == "ok")
                .map(|r| r.abs_error)
                .collect();
            errs.sort_by(f64::total_cmp);
            let failures = rs.iter().filter(|r| r.status != "ok").count();
            let max = errs.last().copied().unwrap_or(f64::NAN);
            let median = if errs.is_empty() {
                f64::NAN
            } else {
                errs[errs.len() / 2]
            };
            let ok = failures == 0 && max <= gate;
            passed &= ok;
            summaries.push(OperatorSummary {
                operator: op,
                points: rs.len(),
                failures,
                max_abs_error: max,
                median_abs_error: median,
                gate,
                passed: ok,
            });
        }
        VerificationReport {
            schema_version: SCHEMA_VERSION,
            generated_at: timestamp(),
            config,
            records,
            summaries,
            passed,
        }
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        writeln!(f, "# generated_at {}", self.generated_at)?;
        writeln!(f, "# schema_version {}", self.schema_version)?;
        writeln!(
            f,
            "field_index,point_index,operator,x,y,true_value,continued_value,abs_error,correction,truncation_k_used,quadrature_error_estimate,status"
        )?;
        for r in &self.records {
            writeln!(
                f,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                r.field_index,
                r.point_index,
                r.operator,
                fmt(r.point.x),
                fmt(r.point.y),
                fmt(r.true_value),
                fmt(r.continued_value),
                fmt(r.abs_error),
                fmt(r.correction),
                r.truncation_k_used,
                fmt(r.quadrature_error_estimate),
                r.status
            )?;
        }
        Ok(())
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| crate::Error::Internal(format!("json serialization: {e}")))?;
        std::fs::write(path, text)?;
        Ok(())
    }
}

/// 17 significant digits: enough to round-trip an f64 exactly.
pub fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn timestamp() -> String {
    use std::time::{SystemTime, UNIX_EPOCH};
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("unix:{secs}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(op: &str, err: f64) -> PointRecord {
        PointRecord {
            field_index: 0,
            point_index: 0,
            operator: op.into(),
            point: Point::new(0.0, 0.1),
            true_value: 1.0,
            continued_value: 1.0 + err,
            abs_error: err,
            correction: 0.0,
            truncation_k_used: 0,
            quadrature_error_estimate: 0.0,
            status: "ok".into(),
        }
    }

    #[test]
    fn summaries_respect_gates() {
        let mut gates = BTreeMap::new();
        gates.insert("continue_line".to_string(), 1e-10);
        let report = VerificationReport::new(
            BTreeMap::new(),
            vec![
                record("continue_line", 1e-12),
                record("continue_line", 1e-9),
            ],
            &gates,
        );
        assert!(!report.passed);
        assert_eq!(report.summaries.len(), 1);
        assert_eq!(report.summaries[0].points, 2);
    }

    #[test]
    fn csv_is_deterministic_modulo_timestamp() {
        let gates = BTreeMap::new();
        let recs = || vec![record("op", 1e-12), record("op", 2e-12)];
        let a = VerificationReport::new(BTreeMap::new(), recs(), &gates);
        let b = VerificationReport::new(BTreeMap::new(), recs(), &gates);
        let dir = tempfile::tempdir().unwrap();
        let pa = dir.path().join("a.csv");
        let pb = dir.path().join("b.csv");
        a.write_csv(&pa).unwrap();
        b.write_csv(&pb).unwrap();
        let strip = |p: &Path| {
            std::fs::read_to_string(p)
                .unwrap()
                .lines()
                .filter(|l| !l.starts_with("# generated_at"))
                .collect::<Vec<_>>()
                .join("\n")
        };
        assert_eq!(strip(&pa), strip(&pb));
    }
}
