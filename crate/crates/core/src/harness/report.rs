use std::io::Write;

use crate::depbreak::{BoundCheck, ReportedQuantity};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Recorded but not asserted.
    Report,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Report => "report",
        }
    }
}

/// One named check read as `lhs ≤ rhs`; equalities use `lhs = |a − b|` and
/// `rhs` = tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckRow {
    pub check: String,
    pub lhs: Option<f64>,
    pub rhs: f64,
    pub status: Status,
}

impl CheckRow {
    pub fn assert(check: impl Into<String>, lhs: f64, rhs: f64, holds: bool) -> Self {
        CheckRow {
            check: check.into(),
            lhs: Some(lhs),
            rhs,
            status: if holds { Status::Pass } else { Status::Fail },
        }
    }

    /// `lhs ≤ rhs` with the comparison done in floating point.
    pub fn le(check: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self::assert(check, lhs, rhs, lhs <= rhs)
    }

    pub fn report(check: impl Into<String>, lhs: Option<f64>, rhs: f64) -> Self {
        CheckRow {
            check: check.into(),
            lhs,
            rhs,
            status: Status::Report,
        }
    }

    pub fn slack(&self) -> Option<f64> {
        self.lhs.map(|l| self.rhs - l)
    }
}

impl From<&BoundCheck> for CheckRow {
    fn from(b: &BoundCheck) -> Self {
        CheckRow::assert(b.name.clone(), b.lhs, b.rhs, b.holds)
    }
}

impl From<&ReportedQuantity> for CheckRow {
    fn from(q: &ReportedQuantity) -> Self {
        CheckRow::report(q.name.clone(), q.value, q.scale)
    }
}

/// Ordered check rows of one run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SuiteReport {
    pub rows: Vec<CheckRow>,
}

impl SuiteReport {
    pub fn push(&mut self, row: CheckRow) {
        self.rows.push(row);
    }

    pub fn extend(&mut self, rows: impl IntoIterator<Item = CheckRow>) {
        self.rows.extend(rows);
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRow> {
        self.rows.iter().filter(|r| r.status == Status::Fail)
    }

    pub fn passed(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn get(&self, check: &str) -> Option<&CheckRow> {
        self.rows.iter().find(|r| r.check == check)
    }

    /// CSV with columns `check, lhs, rhs, slack, status`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["check", "lhs", "rhs", "slack", "status"])?;
        let num = |v: Option<f64>| v.map(number).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                r.check.clone(),
                num(r.lhs),
                number(r.rhs),
                num(r.slack()),
                r.status.as_str().to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Shortest round-trip form, scientific below `1e-4`.
pub fn number(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-4 {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

/// Process exit status for an error: 3 budget, 2 usage or parse, 1 otherwise.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::BudgetExceeded { .. } | Error::SizeLimit { .. } => 3,
        Error::Config(_)
        | Error::Json(_)
        | Error::Io(_)
        | Error::Csv(_)
        | Error::InvalidGame(_)
        | Error::ParseRational(_)
        | Error::InvalidAlpha(_)
        | Error::ReservedLabel { .. }
        | Error::InvalidCoordinates(_)
        | Error::InvalidStrategy(_)
        | Error::Dimension(_) => 2,
        _ => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut r = SuiteReport::default();
        r.push(CheckRow::le("a", 0.5, 1.0));
        r.push(CheckRow::report("b", None, 0.25));
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "check,lhs,rhs,slack,status\na,0.5,1,0.5,pass\nb,,0.25,,report\n"
        );
        assert!(r.passed());
    }

    #[test]
    fn failure_detected() {
        let mut r = SuiteReport::default();
        r.push(CheckRow::le("x", 2.0, 1.0));
        assert!(!r.passed());
        assert_eq!(r.failures().count(), 1);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Config("x".into())), 2);
        assert_eq!(
            exit_code(&Error::BudgetExceeded {
                space: "1".into(),
                required: "1".into(),
                budget: 1
            }),
            3
        );
        assert_eq!(exit_code(&Error::CheckFailed("x".into())), 1);
    }
}
