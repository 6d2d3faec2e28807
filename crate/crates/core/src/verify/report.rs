use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Worst value of one quantity over the trials of a check.
#[derive(Clone, Debug, PartialEq)]
pub struct Measurement {
    pub name: String,
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Outcome of one property check.
///
/// `worst_residual` is the largest measured value over all trials and
/// measurements; a failing report always carries a witness.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub property: String,
    pub anchor: String,
    pub trials: usize,
    pub worst_residual: f64,
    pub passed: bool,
    pub measurements: Vec<Measurement>,
    pub witness: Option<String>,
    pub notes: Vec<String>,
}

impl VerifyReport {
    pub(crate) fn new(
        property: String,
        anchor: &str,
        trials: usize,
        measurements: Vec<Measurement>,
    ) -> Self {
        let worst_residual = measurements.iter().map(|m| m.worst).fold(0.0, f64::max);
        let passed = measurements.iter().all(|m| m.passed);
        VerifyReport {
            property,
            anchor: anchor.to_string(),
            trials,
            worst_residual,
            passed,
            measurements,
            witness: None,
            notes: Vec::new(),
        }
    }

    pub(crate) fn with_witness(mut self, witness: Option<String>) -> Self {
        self.witness = witness;
        if !self.passed && self.witness.is_none() {
            self.witness = Some("no witness recorded".into());
        }
        self
    }

    pub(crate) fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// One status line, e.g. `PASS monotonicity mean geometric ...`.
    pub fn summary_line(&self) -> String {
        format!(
            "{} {} trials={} worst_residual={:e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.property,
            self.trials,
            self.worst_residual
        )
    }
}

pub(crate) fn float_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::INFINITY
    } else {
        a.max(b)
    }
}

/// Human-readable report listing, stable for a fixed seed.
pub fn format_text(reports: &[VerifyReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let _ = writeln!(out, "{}", r.summary_line());
        let _ = writeln!(out, "  anchor: {}", r.anchor);
        for m in &r.measurements {
            let _ = writeln!(
                out,
                "  {} {}: worst {:e}, tolerance {:e}",
                if m.passed { "ok  " } else { "FAIL" },
                m.name,
                m.worst,
                m.tolerance
            );
        }
        for n in &r.notes {
            let _ = writeln!(out, "  note: {n}");
        }
        if let Some(w) = &r.witness {
            let _ = writeln!(out, "  witness:");
            for line in w.lines() {
                let _ = writeln!(out, "    {line}");
            }
        }
    }
    let passed = reports.iter().filter(|r| r.passed).count();
    let _ = writeln!(out, "{passed}/{} properties passed", reports.len());
    out
}

/// CSV with columns `property, anchor, trials, worst_residual, pass`.
pub fn format_csv(reports: &[VerifyReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["property", "anchor", "trials", "worst_residual", "pass"])
        .map_err(io)?;
    for r in reports {
        w.write_record([
            r.property.as_str(),
            r.anchor.as_str(),
            &r.trials.to_string(),
            &format!("{:e}", r.worst_residual),
            if r.passed { "true" } else { "false" },
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}
