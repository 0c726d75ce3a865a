//! Pass/fail reports shared by the verification suites and the CLI.

/// Outcome of a single named check.
#[derive(Debug, Clone)]
pub struct ReportItem {
    /// Stable machine-readable name of the check.
    pub name: String,
    /// Whether the check passed.
    pub pass: bool,
    /// On failure, a human-readable account of the first mismatch, with both
    /// sides printed; on success, optional summary counts.
    pub detail: Option<String>,
    /// Wall-clock time spent in the check, in milliseconds.
    pub millis: u128,
}

/// A list of check outcomes produced by one verification suite.
#[derive(Debug, Clone, Default)]
pub struct Report {
    /// Individual check outcomes, in execution order.
    pub items: Vec<ReportItem>,
}

impl Report {
    /// Run `f`, time it, and record the outcome under `name`.
    ///
    /// `f` returns `Ok(summary)` on success and `Err(detail)` on failure.
    pub fn check<F>(&mut self, name: &str, f: F)
    where
        F: FnOnce() -> Result<Option<String>, String>,
    {
        let start = std::time::Instant::now();
        let outcome = f();
        let millis = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => self.items.push(ReportItem {
                name: name.to_string(),
                pass: true,
                detail,
                millis,
            }),
            Err(detail) => self.items.push(ReportItem {
                name: name.to_string(),
                pass: false,
                detail: Some(detail),
                millis,
            }),
        }
    }

    /// Whether every recorded check passed.
    pub fn all_pass(&self) -> bool {
        self.items.iter().all(|i| i.pass)
    }

    /// Append all items of `other`.
    pub fn extend(&mut self, other: Report) {
        self.items.extend(other.items);
    }

    /// First failing item, if any.
    pub fn first_failure(&self) -> Option<&ReportItem> {
        self.items.iter().find(|i| !i.pass)
    }
}
