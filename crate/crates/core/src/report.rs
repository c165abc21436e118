use serde::Serialize;

use crate::fps::{FormalSeries, RootedFamily};
use crate::scalar::Scalar;

/// Coefficientwise residual of an identity between truncated series.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub identity: String,
    /// Largest coefficient modulus of the residual, per order.
    pub per_order: Vec<f64>,
    pub max_residual: f64,
    pub exact: bool,
    /// All residual coefficients are exactly zero.
    pub exact_zero: bool,
    pub tolerance: f64,
    pub passed: bool,
}

impl ResidualReport {
    pub fn from_orders(identity: &str, per_order: Vec<f64>, exact: bool, exact_zero: bool, tolerance: f64) -> Self {
        let max_residual = per_order.iter().cloned().fold(0.0, f64::max);
        let passed = if exact { exact_zero } else { max_residual <= tolerance };
        ResidualReport { identity: identity.to_string(), per_order, max_residual, exact, exact_zero, tolerance, passed }
    }

    pub fn of_series<S: Scalar>(identity: &str, residual: &FormalSeries<S>, tolerance: f64) -> Self {
        Self::from_orders(identity, residual.max_magnitude_by_order(), S::is_exact(), residual.is_zero(), tolerance)
    }

    pub fn of_family<S: Scalar>(identity: &str, residual: &RootedFamily<S>, tolerance: f64) -> Self {
        let mut per_order = vec![0.0; residual.trunc() + 1];
        for r in residual.roots() {
            for (slot, v) in per_order.iter_mut().zip(r.max_magnitude_by_order()) {
                *slot = f64::max(*slot, v);
            }
        }
        Self::from_orders(identity, per_order, S::is_exact(), residual.is_zero(), tolerance)
    }

    /// Merges several reports of the same identity (e.g. one per root).
    pub fn combine(identity: &str, parts: &[ResidualReport]) -> Self {
        let len = parts.iter().map(|p| p.per_order.len()).max().unwrap_or(0);
        let mut per_order = vec![0.0; len];
        for p in parts {
            for (slot, v) in per_order.iter_mut().zip(&p.per_order) {
                *slot = f64::max(*slot, *v);
            }
        }
        let exact = parts.iter().all(|p| p.exact);
        let tol = parts.iter().map(|p| p.tolerance).fold(0.0, f64::max);
        Self::from_orders(identity, per_order, exact, parts.iter().all(|p| p.exact_zero), tol)
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {} (max residual {:.3e}{})",
            self.identity,
            if self.passed { "ok" } else { "FAILED" },
            self.max_residual,
            if self.exact { ", exact arithmetic" } else { "" }
        )
    }
}
