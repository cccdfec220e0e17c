//! Pass/fail bookkeeping for the acceptance run in `tests/acceptance.rs`.

use std::fmt;
use std::time::Duration;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    /// Required input was not available.
    Skipped,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Skipped => "SKIP",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Check {
    pub criterion: u32,
    pub name: String,
    pub outcome: Outcome,
    pub detail: String,
}

impl Check {
    pub fn new(criterion: u32, name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            criterion,
            name: name.into(),
            outcome: if passed { Outcome::Pass } else { Outcome::Fail },
            detail: detail.into(),
        }
    }

    pub fn skipped(criterion: u32, name: impl Into<String>, detail: impl Into<String>) -> Self {
        Self {
            criterion,
            name: name.into(),
            outcome: Outcome::Skipped,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] criterion {} {}: {}", self.outcome, self.criterion, self.name, self.detail)
    }
}

/// One criterion's checks and wall time.
#[derive(Debug, Clone)]
pub struct CriterionRun {
    pub criterion: u32,
    pub title: &'static str,
    pub budget: Duration,
    pub elapsed: Duration,
    pub checks: Vec<Check>,
}

impl CriterionRun {
    pub fn outcome(&self) -> Outcome {
        if self.checks.iter().any(|c| c.outcome == Outcome::Fail) || self.elapsed > self.budget {
            Outcome::Fail
        } else if self.checks.iter().all(|c| c.outcome == Outcome::Skipped) {
            Outcome::Skipped
        } else {
            Outcome::Pass
        }
    }
}

impl fmt::Display for CriterionRun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} criterion {} ({}) in {:.1}s of {}s budget",
            self.outcome(),
            self.criterion,
            self.title,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs()
        )
    }
}

/// Relative agreement within a multiplicative factor.
pub fn within_factor(value: f64, target: f64, factor: f64) -> bool {
    value > 0.0 && target > 0.0 && value <= target * factor && value >= target / factor
}
