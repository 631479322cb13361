use ncgauge::numerics::Tolerances;
use ncgauge::report::Report;
use serde::{Deserialize, Serialize};

use crate::{Settings, Table};

/// Bumped whenever the JSON layout changes; see `schema/report.schema.json`.
pub const SCHEMA: &str = "ncgauge-report/1";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ToleranceLadder {
    pub construction: f64,
    pub structural: f64,
    pub derived: f64,
    pub grid: f64,
}

impl From<&Tolerances> for ToleranceLadder {
    fn from(t: &Tolerances) -> Self {
        Self {
            construction: t.construction,
            structural: t.structural,
            derived: t.derived,
            grid: t.grid,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FiberRow {
    pub point: String,
    pub dim: usize,
    pub gauge_dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_dim: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ProfileRecord {
    pub chi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<f64>,
    pub r: f64,
    pub s: f64,
    pub x: f64,
    pub norm: f64,
    pub stratum: String,
    pub fiber_dim: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Document {
    pub schema: String,
    pub command: String,
    pub model: String,
    pub seed: Option<u64>,
    pub tolerances: ToleranceLadder,
    pub tolerance_override: Option<f64>,
    pub passed: bool,
    pub reports: Vec<Report>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fibers: Vec<FiberRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub profile: Vec<ProfileRecord>,
}

impl Document {
    pub fn new(
        command: &str,
        model: String,
        seed: Option<u64>,
        s: &Settings,
        reports: Vec<Report>,
    ) -> Self {
        let passed = reports.iter().all(Report::passed);
        Self {
            schema: SCHEMA.into(),
            command: command.into(),
            model,
            seed,
            tolerances: (&s.tol).into(),
            tolerance_override: s.tol_override,
            passed,
            reports,
            fibers: Vec::new(),
            profile: Vec::new(),
        }
    }

    pub fn summary(&self) -> String {
        let total: usize = self.reports.iter().map(|r| r.checks.len()).sum();
        let failed: Vec<&str> = self
            .reports
            .iter()
            .flat_map(|r| r.failures())
            .map(|c| c.name.as_str())
            .collect();
        if failed.is_empty() {
            format!("PASS {} {}: {total} checks", self.command, self.model)
        } else {
            format!(
                "FAIL {} {}: {} of {total} checks failed ({})",
                self.command,
                self.model,
                failed.len(),
                failed.join(", ")
            )
        }
    }

    /// One row per check.
    pub fn check_table(&self) -> Table {
        let header = [
            "report",
            "name",
            "statement",
            "residual",
            "tolerance",
            "passed",
            "scope",
        ]
        .map(String::from)
        .to_vec();
        let rows = self
            .reports
            .iter()
            .flat_map(|r| {
                r.checks.iter().map(move |c| {
                    vec![
                        r.subject.clone(),
                        c.name.clone(),
                        c.statement.clone(),
                        format!("{:e}", c.residual),
                        format!("{:e}", c.tolerance),
                        c.passed.to_string(),
                        c.scope.to_string(),
                    ]
                })
            })
            .collect();
        Table { header, rows }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ncgauge::report::{Check, Scope};

    #[test]
    fn round_trips_through_json() {
        let s = Settings {
            seed: Some(4),
            tol: Tolerances::default(),
            tol_override: None,
        };
        let mut r = Report::new("demo");
        r.push(Check::residual("c", "x = x", 1e-12, 1e-9, Scope::Exact));
        let mut doc = Document::new("check", "hs:N=1".into(), Some(4), &s, vec![r]);
        doc.fibers.push(FiberRow {
            point: "0".into(),
            dim: 4,
            gauge_dim: 3,
            omega_dim: None,
        });
        let text = serde_json::to_string(&doc).unwrap();
        let back: Document = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
        assert!(doc.summary().starts_with("PASS"));
        assert_eq!(doc.check_table().rows.len(), 1);
    }
}
