//! Check results and the line-oriented verification report.

use std::time::Instant;

/// Outcome of one named check. `pass` holds exactly when
/// `max_abs_error <= tolerance`.
#[derive(Debug, Clone)]
pub struct CheckEntry {
    pub name: String,
    pub max_abs_error: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub runtime_ms: u128,
}

impl CheckEntry {
    pub fn new(name: impl Into<String>, max_abs_error: f64, tolerance: f64, runtime_ms: u128) -> Self {
        CheckEntry {
            name: name.into(),
            max_abs_error,
            tolerance,
            pass: max_abs_error <= tolerance,
            runtime_ms,
        }
    }

    /// Runs `body`, timing it; `body` returns the measured max error.
    pub fn timed(name: impl Into<String>, tolerance: f64, body: impl FnOnce() -> f64) -> Self {
        let start = Instant::now();
        let err = body();
        Self::new(name, err, tolerance, start.elapsed().as_millis())
    }

    pub fn line(&self) -> String {
        format!(
            "CHECK {} err={:e} tol={:e} {} {}ms",
            self.name,
            self.max_abs_error,
            self.tolerance,
            if self.pass { "PASS" } else { "FAIL" },
            self.runtime_ms
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerificationReport {
    pub entries: Vec<CheckEntry>,
}

impl VerificationReport {
    pub fn push(&mut self, e: CheckEntry) {
        self.entries.push(e);
    }

    pub fn extend(&mut self, es: Vec<CheckEntry>) {
        self.entries.extend(es);
    }

    pub fn passed(&self) -> usize {
        self.entries.iter().filter(|e| e.pass).count()
    }

    pub fn all_pass(&self) -> bool {
        self.passed() == self.entries.len()
    }

    pub fn summary_line(&self) -> String {
        format!("SUMMARY {}/{}", self.passed(), self.entries.len())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&e.line());
            out.push('\n');
        }
        out.push_str(&self.summary_line());
        out.push('\n');
        out
    }
}
