//! s-Young functions: evaluation, generalized inverse and sampled validation.
//!
//! A function `Φ: [0, ∞) → [0, ∞)` is s-convex for `s ∈ (0, 1]` when
//! `Φ(a·x + b·y) ≤ a^s·Φ(x) + b^s·Φ(y)` for all `x, y ≥ 0` and `a, b ≥ 0`
//! with `a^s + b^s = 1`. An s-Young function is s-convex, continuous,
//! vanishes at the origin and diverges at infinity. The built-in families
//! are additionally strictly positive away from the origin and strictly
//! increasing, which the windowed norm solver relies on.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::validation::{slack, ValidationReport, Violation};

/// Slack used by every sampled inequality in this module.
pub const INEQUALITY_SLACK: f64 = 1e-12;
/// Relative tolerance of the bisection fallback in [`SYoungSpec::inverse`].
pub const INVERSE_TOL: f64 = 1e-12;

const MAX_BRACKET_STEPS: usize = 2000;
const MAX_BISECTIONS: usize = 400;

/// Parametric family of a Young-type function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum YoungFamily {
    /// `Φ(t) = t^p`
    Power { p: f64 },
    /// `Φ(t) = e^t − 1`
    ExpMinusOne,
    /// `Φ(t) = t^p · ln(1 + t)`
    PowerLog { p: f64 },
}

impl YoungFamily {
    /// Largest exponent `s` the family is admitted with.
    pub fn max_exponent(&self) -> f64 {
        match *self {
            YoungFamily::Power { p } | YoungFamily::PowerLog { p } => p.min(1.0),
            YoungFamily::ExpMinusOne => 1.0,
        }
    }

    /// True when the function is convex, i.e. admissible at `s = 1`.
    pub fn is_convex(&self) -> bool {
        self.max_exponent() >= 1.0
    }
}

/// An s-Young function `Φ_s` together with the exponent `s` it is declared
/// against. Serialized as `{"family": "power", "p": 2, "s": 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SYoungSpec {
    #[serde(flatten)]
    pub family: YoungFamily,
    pub s: f64,
}

impl SYoungSpec {
    /// Builds a spec and checks every admission rule: parameters in range,
    /// `s ∈ (0, 1]`, and `s ≤ min(p, 1)` for the `p`-parameterized families.
    pub fn new(family: YoungFamily, s: f64) -> Result<Self> {
        let spec = Self { family, s };
        spec.check()?;
        Ok(spec)
    }

    pub fn power(p: f64, s: f64) -> Result<Self> {
        Self::new(YoungFamily::Power { p }, s)
    }

    pub fn exp_minus_one(s: f64) -> Result<Self> {
        Self::new(YoungFamily::ExpMinusOne, s)
    }

    pub fn power_log(p: f64, s: f64) -> Result<Self> {
        Self::new(YoungFamily::PowerLog { p }, s)
    }

    /// Parameter ranges that evaluation needs (`p` finite and positive).
    pub fn check_structure(&self) -> Result<()> {
        match self.family {
            YoungFamily::Power { p } | YoungFamily::PowerLog { p } => {
                if !(p.is_finite() && p > 0.0) {
                    return domain(format!("p must be a finite positive number, got {p}"));
                }
            }
            YoungFamily::ExpMinusOne => {}
        }
        Ok(())
    }

    /// All admission rules, see [`SYoungSpec::new`].
    pub fn check(&self) -> Result<()> {
        self.check_structure()?;
        if !(self.s > 0.0 && self.s <= 1.0) {
            return domain(format!("s out of (0,1]: {}", self.s));
        }
        let max = self.family.max_exponent();
        if self.s > max {
            return domain(format!(
                "s = {} exceeds min(p, 1) = {max} for the {} family",
                self.s,
                self.family_name()
            ));
        }
        Ok(())
    }

    pub fn family_name(&self) -> &'static str {
        match self.family {
            YoungFamily::Power { .. } => "power",
            YoungFamily::ExpMinusOne => "exp_minus_one",
            YoungFamily::PowerLog { .. } => "power_log",
        }
    }

    /// `Φ_s(t)` for `t ≥ 0`. Exact at the origin.
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        self.check_structure()?;
        if !(t >= 0.0) {
            return domain(format!("Φ is defined on [0, ∞), got t = {t}"));
        }
        Ok(self.phi(t))
    }

    /// Unchecked evaluation for hot loops; `t ≥ 0` and a structurally valid
    /// spec are the caller's responsibility.
    #[inline]
    pub(crate) fn phi(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        match self.family {
            YoungFamily::Power { p } => t.powf(p),
            YoungFamily::ExpMinusOne => t.exp_m1(),
            YoungFamily::PowerLog { p } => t.powf(p) * t.ln_1p(),
        }
    }

    /// Generalized inverse `Φ^{-1}(x) = inf{ r ≥ 0 | Φ(r) > x }`.
    ///
    /// Closed forms are used for `power` and `exp_minus_one`; `power_log`
    /// goes through [`SYoungSpec::bisect_inverse`].
    pub fn inverse(&self, x: f64) -> Result<f64> {
        self.check_structure()?;
        if !(x >= 0.0) {
            return domain(format!("Φ^-1 is defined on [0, ∞), got x = {x}"));
        }
        if x == 0.0 {
            return Ok(0.0);
        }
        if x == f64::INFINITY {
            return Ok(f64::INFINITY);
        }
        match self.family {
            YoungFamily::Power { p } => Ok(x.powf(1.0 / p)),
            YoungFamily::ExpMinusOne => Ok(x.ln_1p()),
            YoungFamily::PowerLog { .. } => self.bisect_inverse(x),
        }
    }

    /// Generalized inverse by monotone bisection, for any family.
    ///
    /// Keeps `Φ(lo) ≤ x < Φ(hi)` and returns `lo` once the bracket is
    /// relatively narrower than [`INVERSE_TOL`], so `Φ(Φ^{-1}(x)) ≤ x`
    /// holds exactly.
    pub fn bisect_inverse(&self, x: f64) -> Result<f64> {
        self.check_structure()?;
        if !(x >= 0.0) {
            return domain(format!("Φ^-1 is defined on [0, ∞), got x = {x}"));
        }
        if x == 0.0 {
            return Ok(0.0);
        }
        let mut lo = 0.0;
        let mut hi = 1.0;
        let mut steps = 0;
        while self.phi(hi) <= x {
            lo = hi;
            hi *= 2.0;
            steps += 1;
            if steps > MAX_BRACKET_STEPS || !hi.is_finite() {
                return Err(Error::NonConvergence(format!(
                    "Φ stays below {x} on [0, {hi}]"
                )));
            }
        }
        for _ in 0..MAX_BISECTIONS {
            if hi - lo <= INVERSE_TOL * hi {
                break;
            }
            let mid = lo + 0.5 * (hi - lo);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.phi(mid) > x {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(lo)
    }
}

/// Sample sets used by [`validate_s_young`].
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingPlan {
    /// Points for the origin, positivity and monotonicity checks.
    pub ts: Vec<f64>,
    /// Points `x`, `y` for the s-convexity inequality (all pairs are used).
    pub points: Vec<f64>,
    /// Coefficients `a ∈ [0, 1]`; the partner is `b = (1 − a^s)^{1/s}`.
    pub coefficients: Vec<f64>,
    /// First rung of the decade ladder used as a divergence proxy.
    pub growth_start: f64,
    /// `Φ` must exceed this value somewhere on the ladder.
    pub growth_threshold: f64,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        let mut ts: Vec<f64> = (0..=60).map(|i| 10f64.powf(-3.0 + i as f64 / 12.0)).collect();
        ts.extend((1..=20).map(f64::from));
        ts.push(0.0);
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        Self {
            ts,
            points: vec![0.0, 0.1, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 7.5, 10.0],
            coefficients: (0..=20).map(|i| i as f64 / 20.0).collect(),
            growth_start: 1e9,
            growth_threshold: 1e6,
        }
    }
}

/// Checks, at every sampled point, that `f` behaves as an s-Young function
/// for its declared `s`. Never fails; problems are reported as violations.
pub fn validate_s_young(f: &SYoungSpec, plan: &SamplingPlan) -> ValidationReport {
    let mut violations = Vec::new();
    if let Err(e) = f.check_structure() {
        violations.push(Violation::new(format!("parameter_range: {e}"), vec![], f64::NAN, f64::NAN));
        return ValidationReport::from_violations(violations);
    }
    let s = f.s;
    if !(s > 0.0 && s <= 1.0) {
        violations.push(Violation::new("s_range", vec![s], s, 1.0));
        return ValidationReport::from_violations(violations);
    }
    let max = f.family.max_exponent();
    if s > max {
        violations.push(Violation::new("declared_exponent", vec![s], s, max));
    }

    let at_zero = f.phi(0.0);
    if at_zero != 0.0 {
        violations.push(Violation::new("zero_at_origin", vec![0.0], at_zero, 0.0));
    }

    let mut ts: Vec<f64> = plan.ts.iter().copied().filter(|t| *t >= 0.0).collect();
    ts.sort_by(f64::total_cmp);
    for &t in ts.iter().filter(|t| **t > 0.0) {
        let v = f.phi(t);
        if !(v > 0.0) {
            violations.push(Violation::new("positive_away_from_origin", vec![t], v, 0.0));
        }
    }
    for pair in ts.windows(2) {
        let (a, b) = (f.phi(pair[0]), f.phi(pair[1]));
        if a > b + slack(INEQUALITY_SLACK, b) {
            violations.push(Violation::new("nondecreasing", vec![pair[0], pair[1]], a, b));
        }
    }

    let mut t = plan.growth_start;
    let mut grew = false;
    let mut last = f.phi(t);
    while t.is_finite() && t <= 1e300 {
        last = f.phi(t);
        if last > plan.growth_threshold {
            grew = true;
            break;
        }
        t *= 10.0;
    }
    if !grew {
        violations.push(Violation::new("divergence", vec![t], last, plan.growth_threshold));
    }

    for &x in &plan.points {
        for &y in &plan.points {
            for &a in &plan.coefficients {
                if !(0.0..=1.0).contains(&a) {
                    continue;
                }
                let a_s = a.powf(s);
                let b = (1.0 - a_s).max(0.0).powf(1.0 / s);
                let b_s = 1.0 - a_s;
                let lhs = f.phi(a * x + b * y);
                let rhs = a_s * f.phi(x) + b_s * f.phi(y);
                if lhs > rhs + slack(INEQUALITY_SLACK, rhs) {
                    violations.push(Violation::new("s_convexity", vec![x, y, a, b], lhs, rhs));
                }
            }
        }
    }
    ValidationReport::from_violations(violations)
}

/// Checks `Φ_s(a·t) ≤ a^s·Φ_s(t)` at each `(a, t)` sample.
pub fn check_scaling_inequality(f: &SYoungSpec, samples: &[(f64, f64)]) -> Result<ValidationReport> {
    f.check_structure()?;
    let mut violations = Vec::new();
    for &(a, t) in samples {
        if !(0.0..=1.0).contains(&a) {
            return domain(format!("scaling factor must lie in [0, 1], got {a}"));
        }
        if !(t >= 0.0) {
            return domain(format!("t must be nonnegative, got {t}"));
        }
        let lhs = f.phi(a * t);
        let rhs = a.powf(f.s) * f.phi(t);
        if lhs > rhs + slack(INEQUALITY_SLACK, rhs) {
            violations.push(Violation::new("scaling", vec![a, t], lhs, rhs));
        }
    }
    Ok(ValidationReport::from_violations(violations))
}

/// Checks that `ω(t) = Φ_s(t)/t^s` is nondecreasing over strictly
/// increasing positive samples.
pub fn check_ratio_monotone(f: &SYoungSpec, samples: &[f64]) -> Result<ValidationReport> {
    f.check_structure()?;
    if let Some(bad) = samples.iter().find(|t| !(**t > 0.0)) {
        return domain(format!("ratio samples must be positive, got {bad}"));
    }
    if samples.windows(2).any(|w| w[0] >= w[1]) {
        return domain("ratio samples must be strictly increasing");
    }
    let omega = |t: f64| f.phi(t) / t.powf(f.s);
    let mut violations = Vec::new();
    for w in samples.windows(2) {
        let (lo, hi) = (omega(w[0]), omega(w[1]));
        if lo > hi + slack(INEQUALITY_SLACK, hi) {
            violations.push(Violation::new("ratio_monotone", vec![w[0], w[1]], lo, hi));
        }
    }
    Ok(ValidationReport::from_violations(violations))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power(p: f64, s: f64) -> SYoungSpec {
        SYoungSpec { family: YoungFamily::Power { p }, s }
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(power(2.0, 1.0).evaluate(3.0).unwrap(), 9.0);
        assert_eq!(SYoungSpec::exp_minus_one(1.0).unwrap().evaluate(0.0).unwrap(), 0.0);
        assert_eq!(power(0.5, 0.5).evaluate(4.0).unwrap(), 2.0);
    }

    #[test]
    fn evaluate_rejects_bad_inputs() {
        assert!(matches!(power(2.0, 1.0).evaluate(-1.0), Err(Error::Domain(_))));
        assert!(matches!(power(0.0, 1.0).evaluate(1.0), Err(Error::Domain(_))));
        assert!(matches!(power(-1.0, 1.0).evaluate(1.0), Err(Error::Domain(_))));
        assert!(power(2.0, 1.0).evaluate(f64::NAN).is_err());
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(power(2.0, 1.0).inverse(9.0).unwrap(), 3.0);
        let e = SYoungSpec::exp_minus_one(1.0).unwrap();
        assert!((e.inverse(std::f64::consts::E - 1.0).unwrap() - 1.0).abs() < 1e-15);
        for f in [power(2.0, 1.0), e, SYoungSpec::power_log(1.5, 1.0).unwrap()] {
            assert_eq!(f.inverse(0.0).unwrap(), 0.0);
        }
        assert!(power(2.0, 1.0).inverse(-0.5).is_err());
    }

    #[test]
    fn bisection_agrees_with_closed_forms() {
        for f in [power(2.0, 1.0), power(0.5, 0.5), SYoungSpec::exp_minus_one(0.7).unwrap()] {
            for x in [1e-6, 0.3, 1.0, 7.0, 250.0] {
                let closed = f.inverse(x).unwrap();
                let bisected = f.bisect_inverse(x).unwrap();
                assert!((closed - bisected).abs() <= 1e-11 * closed.max(1.0), "{f:?} {x}");
            }
        }
    }

    #[test]
    fn admission_rules() {
        assert!(SYoungSpec::power(0.5, 0.5).is_ok());
        assert!(SYoungSpec::power(0.5, 0.6).is_err());
        assert!(SYoungSpec::power(3.0, 1.0).is_ok());
        assert!(SYoungSpec::power_log(0.4, 0.5).is_err());
        let err = SYoungSpec::exp_minus_one(1.5).unwrap_err();
        assert!(err.to_string().contains("s out of (0,1]"));
        assert!(SYoungSpec::exp_minus_one(0.0).is_err());
    }

    #[test]
    fn validate_examples() {
        let plan = SamplingPlan::default();
        assert!(validate_s_young(&power(2.0, 1.0), &plan).valid);
        assert!(validate_s_young(&power(0.5, 0.5), &plan).valid);

        let report = validate_s_young(&power(0.5, 1.0), &plan);
        assert!(!report.valid);
        let witness = report
            .violations_of("s_convexity")
            .find(|v| v.witness[0] == 0.0 && v.witness[1] == 4.0 && v.witness[2] == 0.5)
            .expect("midpoint witness between 0 and 4");
        assert_eq!(witness.witness[3], 0.5);
        assert!((witness.lhs - 2f64.sqrt()).abs() < 1e-15);
        assert!((witness.rhs - 1.0).abs() < 1e-15);
    }

    #[test]
    fn validate_reports_bad_parameters() {
        let report = validate_s_young(&power(-2.0, 1.0), &SamplingPlan::default());
        assert!(!report.valid);
        let report = validate_s_young(&power(2.0, 1.5), &SamplingPlan::default());
        assert_eq!(report.violations[0].property, "s_range");
    }

    #[test]
    fn small_exponents_pass_the_growth_proxy() {
        // t^{1/2} stays below 1e6 at 1e9 but is divergent.
        let report = validate_s_young(&power(0.5, 0.5), &SamplingPlan::default());
        assert_eq!(report.violations_of("divergence").count(), 0);
    }

    #[test]
    fn scaling_examples() {
        let r = check_scaling_inequality(&power(2.0, 1.0), &[(0.5, 2.0)]).unwrap();
        assert!(r.valid);
        let r = check_scaling_inequality(&power(0.5, 0.5), &[(0.25, 4.0)]).unwrap();
        assert!(r.valid);
        for f in [power(2.0, 1.0), SYoungSpec::exp_minus_one(0.3).unwrap()] {
            let samples: Vec<_> = [0.0, 0.5, 3.0].iter().map(|t| (1.0, *t)).collect();
            assert!(check_scaling_inequality(&f, &samples).unwrap().valid);
        }
        assert!(check_scaling_inequality(&power(2.0, 1.0), &[(1.5, 1.0)]).is_err());
        assert!(check_scaling_inequality(&power(2.0, 1.0), &[(0.5, -1.0)]).is_err());
    }

    #[test]
    fn ratio_examples() {
        let samples = [0.1, 0.5, 1.0, 2.0, 10.0];
        assert!(check_ratio_monotone(&power(0.3, 0.3), &samples).unwrap().valid);
        let r = check_ratio_monotone(&power(2.0, 1.0), &[1.0, 2.0, 3.0]).unwrap();
        assert!(r.valid);
        assert!(check_ratio_monotone(&power(2.0, 1.0), &[0.0, 1.0]).is_err());
        assert!(check_ratio_monotone(&power(2.0, 1.0), &[2.0, 1.0]).is_err());
        // t^{1/2} declared at s = 1: ω(t) = t^{-1/2} decreases.
        let bad = SYoungSpec { family: YoungFamily::Power { p: 0.5 }, s: 1.0 };
        assert!(!check_ratio_monotone(&bad, &samples).unwrap().valid);
    }
}
