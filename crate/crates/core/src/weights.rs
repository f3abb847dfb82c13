//! Weights `φ` on the odd integers `2N + 1`.
//!
//! A weight belongs to the class used by the windowed norm when it is
//! positive, nondecreasing, and `φ(n)/n` is nonincreasing. The three
//! built-in families satisfy this for every parameter in range.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::validation::{slack, ValidationReport, Violation};

const SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum WeightSpec {
    /// `φ(n) = n`
    Identity,
    /// `φ(n) = n^θ`, `θ ∈ [0, 1]`
    Power { theta: f64 },
    /// `φ(n) = c`, `c > 0`
    Constant { c: f64 },
}

impl WeightSpec {
    /// Parameter ranges that make the family a member of the weight class.
    pub fn check_params(&self) -> Result<()> {
        match *self {
            WeightSpec::Identity => Ok(()),
            WeightSpec::Power { theta } if (0.0..=1.0).contains(&theta) => Ok(()),
            WeightSpec::Power { theta } => domain(format!("theta out of [0,1]: {theta}")),
            WeightSpec::Constant { c } if c.is_finite() && c > 0.0 => Ok(()),
            WeightSpec::Constant { c } => domain(format!("c must be finite and positive, got {c}")),
        }
    }

    /// `φ(n)` for odd `n ≥ 1`.
    pub fn eval(&self, n: u64) -> Result<f64> {
        if n == 0 || n.is_multiple_of(2) {
            return domain(format!("weights are defined on odd n >= 1, got {n}"));
        }
        Ok(self.raw(n))
    }

    #[inline]
    fn raw(&self, n: u64) -> f64 {
        match *self {
            WeightSpec::Identity => n as f64,
            WeightSpec::Power { theta } => (n as f64).powf(theta),
            WeightSpec::Constant { c } => c,
        }
    }

    /// The factor `φ(2N+1)/(2N+1)` multiplying a window's Φ-sum.
    pub fn window_factor(&self, half_width: u64) -> Result<f64> {
        let n = half_width
            .checked_mul(2)
            .and_then(|v| v.checked_add(1))
            .ok_or_else(|| crate::Error::Domain(format!("half-width {half_width} too large")))?;
        Ok(match *self {
            WeightSpec::Identity => 1.0,
            _ => self.raw(n) / n as f64,
        })
    }
}

/// Checks `φ > 0`, `φ` nondecreasing and `φ(n)/n` nonincreasing over
/// `n = 1, 3, …, n_max`.
pub fn validate_weight(w: &WeightSpec, n_max: u64) -> Result<ValidationReport> {
    if n_max == 0 || n_max.is_multiple_of(2) {
        return domain(format!("n_max must be odd and >= 1, got {n_max}"));
    }
    let mut violations = Vec::new();
    let mut prev: Option<(u64, f64)> = None;
    for n in (1..=n_max).step_by(2) {
        let v = w.raw(n);
        if !(v > 0.0) {
            violations.push(Violation::new("positive", vec![n as f64], v, 0.0));
        }
        if let Some((pn, pv)) = prev {
            if pv > v + slack(SLACK, v) {
                violations.push(Violation::new("nondecreasing", vec![pn as f64, n as f64], pv, v));
            }
            let (pr, r) = (pv / pn as f64, v / n as f64);
            if r > pr + slack(SLACK, pr) {
                violations.push(Violation::new("ratio_nonincreasing", vec![pn as f64, n as f64], r, pr));
            }
        }
        prev = Some((n, v));
    }
    Ok(ValidationReport::from_violations(violations))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        assert_eq!(WeightSpec::Identity.eval(5).unwrap(), 5.0);
        assert_eq!(WeightSpec::Constant { c: 1.0 }.eval(999).unwrap(), 1.0);
        assert_eq!(WeightSpec::Power { theta: 0.5 }.eval(9).unwrap(), 3.0);
    }

    #[test]
    fn eval_rejects_even_and_zero() {
        assert!(WeightSpec::Identity.eval(4).is_err());
        assert!(WeightSpec::Identity.eval(0).is_err());
    }

    #[test]
    fn identity_is_exact_on_large_odd_arguments() {
        for n_half in [0u64, 1, 17, 1 << 20, (1 << 40) - 1, 1 << 40] {
            let n = 2 * n_half + 1;
            assert_eq!(WeightSpec::Identity.eval(n).unwrap(), n as f64);
            assert_eq!((n as f64) as u64, n);
        }
    }

    #[test]
    fn validate_examples() {
        assert!(validate_weight(&WeightSpec::Identity, 101).unwrap().valid);
        assert!(validate_weight(&WeightSpec::Constant { c: 1.0 }, 101).unwrap().valid);
        let r = validate_weight(&WeightSpec::Power { theta: 2.0 }, 101).unwrap();
        assert!(!r.valid);
        assert!(r.violations.iter().all(|v| v.property == "ratio_nonincreasing"));
        assert!(validate_weight(&WeightSpec::Identity, 100).is_err());
    }

    #[test]
    fn parameter_ranges() {
        assert!(WeightSpec::Power { theta: 1.0 }.check_params().is_ok());
        assert!(WeightSpec::Power { theta: -0.1 }.check_params().is_err());
        assert!(WeightSpec::Constant { c: 0.0 }.check_params().is_err());
    }

    #[test]
    fn window_factor_matches_definition() {
        let w = WeightSpec::Power { theta: 0.5 };
        assert!((w.window_factor(4).unwrap() - 3.0 / 9.0).abs() < 1e-16);
        assert_eq!(WeightSpec::Identity.window_factor(1000).unwrap(), 1.0);
        assert!(WeightSpec::Identity.window_factor(u64::MAX).is_err());
    }
}
