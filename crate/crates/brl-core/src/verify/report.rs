use serde::{Deserialize, Serialize};

/// Outcome of one numerical check over a batch of random instances.
/// `pass` holds exactly when `max_violation <= tolerance`. For negative
/// controls (`control = true`) the violation is defined so that "the check
/// failed in the predicted way" still reads as `pass`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_name: String,
    pub instances_run: usize,
    /// Instances dropped for non-convergence or degeneracy, as reported.
    pub excluded: usize,
    /// Zero-gradient pairs skipped inside instances.
    pub skipped: usize,
    pub max_violation: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub control: bool,
}

impl CheckReport {
    pub fn new(check_name: impl Into<String>, tolerance: f64) -> CheckReportBuilder {
        CheckReportBuilder {
            check_name: check_name.into(),
            tolerance,
            instances_run: 0,
            excluded: 0,
            skipped: 0,
            max_violation: 0.0,
            control: false,
        }
    }

    pub fn summary_line(&self) -> String {
        format!(
            "[{}] {:<34} instances={:<4} excluded={:<3} max_violation={:.3e} tol={:.1e}{}",
            if self.pass { "PASS" } else { "FAIL" },
            self.check_name,
            self.instances_run,
            self.excluded,
            self.max_violation,
            self.tolerance,
            if self.control { " (control)" } else { "" }
        )
    }
}

pub struct CheckReportBuilder {
    check_name: String,
    tolerance: f64,
    instances_run: usize,
    excluded: usize,
    skipped: usize,
    max_violation: f64,
    control: bool,
}

impl CheckReportBuilder {
    pub fn record(&mut self, violation: f64) {
        self.instances_run += 1;
        if violation > self.max_violation {
            self.max_violation = violation;
        }
    }

    pub fn exclude(&mut self) {
        self.excluded += 1;
    }

    pub fn skip(&mut self, n: usize) {
        self.skipped += n;
    }

    pub fn control(mut self) -> Self {
        self.control = true;
        self
    }

    pub fn finish(self) -> CheckReport {
        CheckReport {
            pass: self.max_violation <= self.tolerance,
            check_name: self.check_name,
            instances_run: self.instances_run,
            excluded: self.excluded,
            skipped: self.skipped,
            max_violation: self.max_violation,
            tolerance: self.tolerance,
            control: self.control,
        }
    }
}
