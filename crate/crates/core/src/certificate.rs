//! Truncated convergence certificates.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Which smallness condition a certificate checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// Brute-force stability `H_n + sum B >= 0`.
    Stability,
    /// Weighted smallness of the `A_n` series.
    Sb,
    /// Activity condition for convergence of the Mayer series.
    Pu,
    /// Density condition with weights `a <= b`.
    Sab,
    /// Bound on the biconnected series by `b`.
    VirMb,
    /// Bound of the tree series `T` by `exp(b)`.
    Mb,
    /// Three-part condition for the density form of the pressure.
    DissymB,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::Stability => "stability",
            Condition::Sb => "Sb",
            Condition::Pu => "PU",
            Condition::Sab => "Sab",
            Condition::VirMb => "virMb",
            Condition::Mb => "Mb",
            Condition::DissymB => "dissym_b",
        };
        f.write_str(s)
    }
}

/// Result of checking one condition species by species.
///
/// `passed` holds exactly when every margin is non-negative. Whenever the
/// condition involves an infinite series, only the partial sum through
/// `truncation` was evaluated and the certificate says nothing about the tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub condition: Condition,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub margins: Vec<f64>,
    pub passed: bool,
    pub truncation: Option<usize>,
    pub note: Option<String>,
}

impl BoundCertificate {
    pub fn new(condition: Condition, a: Vec<f64>, b: Vec<f64>, margins: Vec<f64>) -> Self {
        let passed = margins.iter().all(|m| *m >= 0.0);
        BoundCertificate { condition, a, b, margins, passed, truncation: None, note: None }
    }

    pub fn truncated(mut self, order: usize) -> Self {
        self.truncation = Some(order);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn worst_margin(&self) -> f64 {
        self.margins.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn summary(&self) -> String {
        let trunc = match self.truncation {
            Some(n) => format!(" (truncated at order {n})"),
            None => String::new(),
        };
        format!(
            "{} {}{}: worst margin {:e}",
            self.condition,
            if self.passed { "passed" } else { "failed" },
            trunc,
            self.worst_margin()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn passed_iff_all_margins_nonnegative() {
        let ok = BoundCertificate::new(Condition::Sb, vec![], vec![1.0], vec![0.0, 0.5]);
        assert!(ok.passed);
        let bad = BoundCertificate::new(Condition::Sb, vec![], vec![1.0], vec![0.1, -1e-12]);
        assert!(!bad.passed);
        assert_eq!(bad.worst_margin(), -1e-12);
        assert!(bad.truncated(3).summary().contains("order 3"));
    }
}
