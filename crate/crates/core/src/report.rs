//! Pass/fail records shared by every verification routine.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// What kind of evidence a check provides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Scope {
    /// The statement itself, decided at finite dimension.
    Exact,
    /// A finite-dimensional analog of a statement about infinite objects.
    FiniteShadow,
    /// A rational-phase stand-in for a statement about general phase.
    RationalShadow,
    /// Numerical evidence for a continuity statement.
    ContinuityEvidence,
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scope::Exact => "exact",
            Scope::FiniteShadow => "finite-shadow",
            Scope::RationalShadow => "rational-shadow",
            Scope::ContinuityEvidence => "continuity-evidence",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Check {
    pub name: String,
    /// The identity being tested, in words.
    pub statement: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub scope: Scope,
}

impl Check {
    /// Passes iff `residual < tolerance` (and the residual is finite).
    pub fn residual(
        name: &str,
        statement: &str,
        residual: f64,
        tolerance: f64,
        scope: Scope,
    ) -> Self {
        Self {
            name: name.into(),
            statement: statement.into(),
            residual,
            tolerance,
            passed: residual.is_finite() && residual < tolerance,
            scope,
        }
    }

    /// Integer equality; the residual is the absolute difference.
    pub fn count(
        name: &str,
        statement: &str,
        observed: usize,
        expected: usize,
        scope: Scope,
    ) -> Self {
        Self {
            name: name.into(),
            statement: statement.into(),
            residual: (observed as f64 - expected as f64).abs(),
            tolerance: 0.0,
            passed: observed == expected,
            scope,
        }
    }

    /// A yes/no condition with no meaningful residual.
    pub fn flag(name: &str, statement: &str, holds: bool, scope: Scope) -> Self {
        Self {
            name: name.into(),
            statement: statement.into(),
            residual: if holds { 0.0 } else { 1.0 },
            tolerance: 0.0,
            passed: holds,
            scope,
        }
    }
}

/// A reported number that is not itself a pass/fail condition.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(untagged))]
pub enum Value {
    Int(i64),
    Real(f64),
    Text(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Real(v) => write!(f, "{v:e}"),
            Value::Text(v) => f.write_str(v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Report {
    pub subject: String,
    pub checks: Vec<Check>,
    pub quantities: Vec<(String, Value)>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(subject: &str) -> Self {
        Self {
            subject: subject.into(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn quantity(&mut self, name: &str, value: Value) {
        self.quantities.push((name.into(), value));
    }

    pub fn note(&mut self, text: &str) {
        self.notes.push(text.to_string());
    }

    /// Appends another report's checks, quantities and notes.
    pub fn absorb(&mut self, other: Report) {
        self.checks.extend(other.checks);
        self.quantities.extend(other.quantities);
        self.notes.extend(other.notes);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.quantities
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.subject)?;
        for c in &self.checks {
            let mark = if c.passed { "pass" } else { "FAIL" };
            writeln!(
                f,
                "  [{mark}] {:<28} residual {:.3e} (tol {:.1e}, {})",
                c.name, c.residual, c.tolerance, c.scope
            )?;
        }
        for (name, value) in &self.quantities {
            writeln!(f, "  {name} = {value}")?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}
