use serde::{Deserialize, Serialize};

/// A single failed property together with the point(s) that exhibit it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub property: String,
    pub witness: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

impl Violation {
    pub fn new(property: impl Into<String>, witness: Vec<f64>, lhs: f64, rhs: f64) -> Self {
        Self {
            property: property.into(),
            witness,
            lhs,
            rhs,
        }
    }
}

/// Outcome of a sampled validation. `valid` is true exactly when no
/// violation was recorded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn from_violations(violations: Vec<Violation>) -> Self {
        Self {
            valid: violations.is_empty(),
            violations,
        }
    }

    pub fn ok() -> Self {
        Self::from_violations(Vec::new())
    }

    /// Violations recorded for `property`.
    pub fn violations_of<'a>(&'a self, property: &'a str) -> impl Iterator<Item = &'a Violation> {
        self.violations.iter().filter(move |v| v.property == property)
    }
}

/// Additive slack of `abs` scaled up for values above one.
#[inline]
pub(crate) fn slack(abs: f64, scale: f64) -> f64 {
    abs * scale.abs().max(1.0)
}
