//! Randomized verification of the quasi-norm axioms and the windowed-norm
//! lemmas, plus the `x = y` doubling comparison.
//!
//! Every check draws its trials from a ChaCha stream keyed by the suite seed
//! and the check's own stream id, so a report depends only on the seed and
//! the trial count, never on which other checks ran or in what order.
//! A failing trial is stored whole in the report and can be replayed with
//! [`Counterexample::replay`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::norm::{
    coordinate_bound_check, geometric_closed_form, global_norm, modular, window_norm, DEFAULT_TOL,
};
use crate::oracle::{brute_force_global, centered_grid_norm, grid_window_norm};
use crate::sequence::{geometric_example, FiniteSequence, Window};
use crate::validation::slack;
use crate::weights::WeightSpec;
use crate::young::{SYoungSpec, YoungFamily};

/// Slack of every norm inequality, scaled by `max(1, value)`.
pub const PROPERTY_SLACK: f64 = 1e-9;
/// Relative agreement required between the solver and the grid oracle.
pub const ORACLE_REL_TOL: f64 = 1e-4;
/// Agreement required in the doubling comparison.
pub const COMPARISON_TOL: f64 = 1e-6;
/// Lower slack on `C ≥ 1` that absorbs rounding of `(X+Y)^s`.
const C_FLOOR_SLACK: f64 = 1e-12;

const MAX_SUPPORT: i64 = 33;
const MAX_ENTRY: f64 = 10.0;

/// Names of the checks a suite can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    CoordinateBound,
    Homogeneity,
    InverseSandwich,
    LemmaSuite,
    OracleEquivalence,
    PositivityAndZero,
    QuasiTriangle,
    ReproduceCounterexample,
    TriangleS1,
    TriangleViolationSearch,
    WindowDominance,
    ZeroCharacterization,
}

impl CheckName {
    pub const ALL: [CheckName; 12] = [
        CheckName::CoordinateBound,
        CheckName::Homogeneity,
        CheckName::InverseSandwich,
        CheckName::LemmaSuite,
        CheckName::OracleEquivalence,
        CheckName::PositivityAndZero,
        CheckName::QuasiTriangle,
        CheckName::ReproduceCounterexample,
        CheckName::TriangleS1,
        CheckName::TriangleViolationSearch,
        CheckName::WindowDominance,
        CheckName::ZeroCharacterization,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CheckName::CoordinateBound => "coordinate_bound",
            CheckName::Homogeneity => "homogeneity",
            CheckName::InverseSandwich => "inverse_sandwich",
            CheckName::LemmaSuite => "lemma_suite",
            CheckName::OracleEquivalence => "oracle_equivalence",
            CheckName::PositivityAndZero => "positivity_and_zero",
            CheckName::QuasiTriangle => "quasi_triangle",
            CheckName::ReproduceCounterexample => "reproduce_counterexample",
            CheckName::TriangleS1 => "triangle_s1",
            CheckName::TriangleViolationSearch => "triangle_violation_search",
            CheckName::WindowDominance => "window_dominance",
            CheckName::ZeroCharacterization => "zero_characterization",
        }
    }

    fn stream(&self) -> u64 {
        Self::ALL.iter().position(|c| c == self).unwrap() as u64 + 1
    }

    /// Checks whose outcome does not depend on randomness.
    fn is_deterministic(&self) -> bool {
        matches!(self, CheckName::ReproduceCounterexample)
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown check \"{s}\"")))
    }
}

/// The windowed-norm lemmas exercised by the lemma suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lemma {
    /// `ρ(‖x‖_w) ≤ 1` whenever `‖x‖_w > 0`.
    ModularAtNorm,
    /// `‖x‖_w ≤ 1 ⟺ ρ(1) ≤ 1`.
    UnitBall,
    /// `ρ(b) ≤ 1` for all `b > 0` `⟺ ‖x‖_w = 0`.
    BoundedModular,
    /// `‖x‖_w ≤ 1 ⟺ ρ(b) ≤ b^{−s}` for all `b ≥ 1`.
    ScaledBall,
    /// `Σ Φ(a|x_k|) = 0` for every `a > 0` `⟺ ‖x‖_w = 0`.
    ZeroScaledSum,
}

impl Lemma {
    pub const ALL: [Lemma; 5] = [
        Lemma::ModularAtNorm,
        Lemma::UnitBall,
        Lemma::BoundedModular,
        Lemma::ScaledBall,
        Lemma::ZeroScaledSum,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Lemma::ModularAtNorm => "modular_at_norm",
            Lemma::UnitBall => "unit_ball",
            Lemma::BoundedModular => "bounded_modular",
            Lemma::ScaledBall => "scaled_ball",
            Lemma::ZeroScaledSum => "zero_scaled_sum",
        }
    }
}

/// One randomized (or constructed) instance of a check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Trial {
    Positivity {
        x: FiniteSequence,
        young: SYoungSpec,
        weight: WeightSpec,
    },
    Homogeneity {
        x: FiniteSequence,
        a: f64,
        young: SYoungSpec,
        weight: WeightSpec,
    },
    QuasiTriangle {
        x: FiniteSequence,
        y: FiniteSequence,
        young: SYoungSpec,
        weight: WeightSpec,
    },
    TriangleS1 {
        x: FiniteSequence,
        y: FiniteSequence,
        young: SYoungSpec,
        weight: WeightSpec,
    },
    Lemma {
        lemma: Lemma,
        x: FiniteSequence,
        window: Window,
        young: SYoungSpec,
        weight: WeightSpec,
    },
    ZeroCharacterization {
        x: FiniteSequence,
        window: Window,
        young: SYoungSpec,
        weight: WeightSpec,
    },
    CoordinateBound {
        x: FiniteSequence,
        young: SYoungSpec,
        weight: WeightSpec,
    },
    InverseSandwich {
        young: SYoungSpec,
        t: f64,
    },
    OracleWindow {
        x: FiniteSequence,
        window: Window,
        young: SYoungSpec,
        weight: WeightSpec,
    },
    WindowDominance {
        x: FiniteSequence,
        young: SYoungSpec,
        weight: WeightSpec,
    },
}

/// Result of evaluating a [`Trial`].
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub measurements: Value,
    /// Which branch of a biconditional (or which case) the trial exercised.
    pub case: &'static str,
}

/// `‖x‖, ‖y‖, ‖x+y‖` and the constant `C = (X^s + Y^s)/(X + Y)^s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasiConstantSample {
    #[serde(rename = "X")]
    pub x_norm: f64,
    #[serde(rename = "Y")]
    pub y_norm: f64,
    #[serde(rename = "C")]
    pub c: f64,
    /// `C^{1/s}(X + Y) = (X^s + Y^s)^{1/s}`
    pub bound: f64,
    /// `‖x + y‖`
    pub actual: f64,
}

impl QuasiConstantSample {
    pub fn compute(
        x: &FiniteSequence,
        y: &FiniteSequence,
        young: &SYoungSpec,
        weight: &WeightSpec,
    ) -> Result<Self> {
        let s = young.s;
        let xn = global_norm(x, young, weight, DEFAULT_TOL)?.value;
        let yn = global_norm(y, young, weight, DEFAULT_TOL)?.value;
        let actual = global_norm(&x.add(y), young, weight, DEFAULT_TOL)?.value;
        let c = if xn + yn > 0.0 {
            (xn.powf(s) + yn.powf(s)) / (xn + yn).powf(s)
        } else {
            f64::NAN
        };
        let bound = (xn.powf(s) + yn.powf(s)).powf(1.0 / s);
        Ok(Self {
            x_norm: xn,
            y_norm: yn,
            c,
            bound,
            actual,
        })
    }
}

fn within(actual: f64, bound: f64) -> bool {
    actual <= bound + slack(PROPERTY_SLACK, bound)
}

impl Trial {
    pub fn evaluate(&self) -> Result<Outcome> {
        match self {
            Trial::Positivity { x, young, weight } => {
                let n = global_norm(x, young, weight, DEFAULT_TOL)?.value;
                let zero = x.is_zero();
                Ok(Outcome {
                    passed: n >= 0.0 && (n == 0.0) == zero,
                    measurements: json!({ "norm": n, "zero_sequence": zero }),
                    case: if zero { "zero_sequence" } else { "nonzero_sequence" },
                })
            }
            Trial::Homogeneity { x, a, young, weight } => {
                let n = global_norm(x, young, weight, DEFAULT_TOL)?.value;
                let scaled = global_norm(&x.scale(*a), young, weight, DEFAULT_TOL)?.value;
                let gap = (scaled - a.abs() * n).abs();
                Ok(Outcome {
                    passed: gap <= slack(PROPERTY_SLACK, n),
                    measurements: json!({ "norm": n, "scaled_norm": scaled, "gap": gap }),
                    case: if *a == 0.0 { "zero_scalar" } else { "nonzero_scalar" },
                })
            }
            Trial::QuasiTriangle { x, y, young, weight } => {
                let q = QuasiConstantSample::compute(x, y, young, weight)?;
                let s = young.s;
                let both = q.x_norm > 0.0 && q.y_norm > 0.0;
                let mut passed = within(q.actual, q.bound)
                    && within(q.actual, 2f64.powf(1.0 / s) * (q.x_norm + q.y_norm));
                let case = if both {
                    passed &= q.c >= 1.0 - C_FLOOR_SLACK && q.c < 2.0;
                    "both_nonzero"
                } else {
                    let other = q.x_norm.max(q.y_norm);
                    passed &= (q.actual - other).abs() <= slack(PROPERTY_SLACK, other);
                    "one_zero"
                };
                Ok(Outcome {
                    passed,
                    measurements: serde_json::to_value(q).expect("plain struct"),
                    case,
                })
            }
            Trial::TriangleS1 { x, y, young, weight } => {
                let q = QuasiConstantSample::compute(x, y, young, weight)?;
                let both = q.x_norm > 0.0 && q.y_norm > 0.0;
                let mut passed = young.s == 1.0 && within(q.actual, q.x_norm + q.y_norm);
                if both {
                    passed &= q.c == 1.0;
                }
                Ok(Outcome {
                    passed,
                    measurements: serde_json::to_value(q).expect("plain struct"),
                    case: if both { "both_nonzero" } else { "one_zero" },
                })
            }
            Trial::Lemma { lemma, x, window, young, weight } => {
                evaluate_lemma(*lemma, x, window, young, weight)
            }
            Trial::ZeroCharacterization { x, window, young, weight } => {
                let n = window_norm(x, window, young, weight, DEFAULT_TOL)?;
                let content_zero = x.window_slice(window).iter().all(|v| *v == 0.0);
                Ok(Outcome {
                    passed: if content_zero { n == 0.0 } else { n > 0.0 },
                    measurements: json!({ "window_norm": n, "zero_content": content_zero }),
                    case: if content_zero { "zero_content" } else { "nonzero_content" },
                })
            }
            Trial::CoordinateBound { x, young, weight } => {
                let report = coordinate_bound_check(x, young, weight)?;
                Ok(Outcome {
                    passed: report.valid,
                    measurements: serde_json::to_value(&report).expect("plain struct"),
                    case: if x.is_zero() { "zero_sequence" } else { "nonzero_sequence" },
                })
            }
            Trial::InverseSandwich { young, t } => {
                let inner = young.evaluate(young.inverse(*t)?)?;
                let outer = young.inverse(young.evaluate(*t)?)?;
                Ok(Outcome {
                    passed: inner <= t + PROPERTY_SLACK && *t <= outer + PROPERTY_SLACK,
                    measurements: json!({ "phi_of_inverse": inner, "inverse_of_phi": outer }),
                    case: young.family_name(),
                })
            }
            Trial::OracleWindow { x, window, young, weight } => {
                let engine = window_norm(x, window, young, weight, DEFAULT_TOL)?;
                let grid = grid_window_norm(x, window, young, weight)?;
                let passed = if grid == 0.0 {
                    engine == 0.0
                } else {
                    (engine - grid).abs() <= ORACLE_REL_TOL * grid
                };
                Ok(Outcome {
                    passed,
                    measurements: json!({ "engine": engine, "grid": grid }),
                    case: if grid == 0.0 { "zero_window" } else { "nonzero_window" },
                })
            }
            Trial::WindowDominance { x, young, weight } => {
                let g = global_norm(x, young, weight, DEFAULT_TOL)?;
                let (brute, at) = brute_force_global(x, young, weight)?;
                Ok(Outcome {
                    passed: within(brute, g.value),
                    measurements: json!({
                        "global": g.value,
                        "witness": g.witness,
                        "brute_force": brute,
                        "brute_force_window": at,
                    }),
                    case: "sweep",
                })
            }
        }
    }
}

fn evaluate_lemma(
    lemma: Lemma,
    x: &FiniteSequence,
    w: &Window,
    young: &SYoungSpec,
    weight: &WeightSpec,
) -> Result<Outcome> {
    let n = window_norm(x, w, young, weight, DEFAULT_TOL)?;
    let rho = |b: f64| modular(x, w, b, young, weight);
    let inside = n <= 1.0 + PROPERTY_SLACK;
    let ball_case = if inside { "norm_at_most_one" } else { "norm_above_one" };
    let zero_case = if n == 0.0 { "zero_norm" } else { "positive_norm" };
    let outcome = match lemma {
        Lemma::ModularAtNorm => {
            let at = if n > 0.0 { rho(n)? } else { 0.0 };
            Outcome {
                passed: n == 0.0 || at <= 1.0 + PROPERTY_SLACK,
                measurements: json!({ "window_norm": n, "modular_at_norm": at }),
                case: zero_case,
            }
        }
        Lemma::UnitBall => {
            let at_one = rho(1.0)?;
            Outcome {
                passed: inside == (at_one <= 1.0 + PROPERTY_SLACK),
                measurements: json!({ "window_norm": n, "modular_at_one": at_one }),
                case: ball_case,
            }
        }
        Lemma::BoundedModular => {
            let mut bs: Vec<f64> = (-8..=8).map(|k| 10f64.powi(k)).collect();
            if n > 0.0 {
                bs.push(0.5 * n);
            }
            let mut worst = (0.0f64, 0.0f64);
            for b in bs {
                let r = rho(b)?;
                if r > worst.1 {
                    worst = (b, r);
                }
            }
            let bounded = worst.1 <= 1.0;
            Outcome {
                passed: bounded == (n == 0.0),
                measurements: json!({ "window_norm": n, "largest_modular": worst.1, "at_b": worst.0 }),
                case: zero_case,
            }
        }
        Lemma::ScaledBall => {
            let bs = [1.0, 1.25, 1.5, 2.0, 3.0, 5.0, 10.0, 100.0, 1e3, 1e4];
            let mut first_violation = None;
            for b in bs {
                let r = rho(b)?;
                if r > b.powf(-young.s) + PROPERTY_SLACK {
                    first_violation = Some((b, r));
                    break;
                }
            }
            Outcome {
                passed: inside == first_violation.is_none(),
                measurements: json!({ "window_norm": n, "violation": first_violation }),
                case: ball_case,
            }
        }
        Lemma::ZeroScaledSum => {
            let mut all_zero = true;
            for a in [1e-3, 0.1, 1.0, 10.0, 1e3] {
                if rho(1.0 / a)? != 0.0 {
                    all_zero = false;
                }
            }
            Outcome {
                passed: all_zero == (n == 0.0),
                measurements: json!({ "window_norm": n, "all_scaled_sums_zero": all_zero }),
                case: zero_case,
            }
        }
    };
    Ok(outcome)
}

/// A failing trial, kept whole so it can be re-run in isolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub trial: Trial,
    pub measurements: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Counterexample {
    /// Re-runs the trial; `true` when it fails again.
    pub fn replay(&self) -> bool {
        match self.trial.evaluate() {
            Ok(o) => !o.passed,
            Err(_) => true,
        }
    }
}

/// One check's entry in a [`PropertyReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    pub trials: u64,
    pub failures: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckRecord>,
    pub trial_counts: BTreeMap<String, u64>,
}

impl PropertyReport {
    fn from_records(seed: u64, mut checks: Vec<CheckRecord>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let trial_counts = checks.iter().map(|c| (c.name.clone(), c.trials)).collect();
        Self {
            seed,
            passed: checks.iter().all(|c| c.passed),
            checks,
            trial_counts,
        }
    }

    pub fn record(&self, name: CheckName) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name.as_str())
    }
}

/// Suite configuration file: `{"seed": 42, "trials": 100, "checks": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub trials: u64,
    pub checks: Vec<String>,
}

impl SuiteConfig {
    /// Every known check.
    pub fn all(seed: u64, trials: u64) -> Self {
        Self {
            seed,
            trials,
            checks: CheckName::ALL.iter().map(|c| c.as_str().to_string()).collect(),
        }
    }
}

/// Random instance generator for the checks.
pub struct TrialGen {
    rng: ChaCha8Rng,
}

impl TrialGen {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Entries in `[−10, 10]` with a fraction `zero_prob` of exact zeros,
    /// on a run of length `1..=33`.
    pub fn sequence(&mut self, zero_prob: f64) -> FiniteSequence {
        let len = self.rng.gen_range(1..=MAX_SUPPORT) as usize;
        let offset = self.rng.gen_range(-20..=20);
        let values = (0..len)
            .map(|_| {
                if self.rng.gen_bool(zero_prob) {
                    0.0
                } else {
                    let sign = if self.rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                    sign * self.rng.gen_range(f64::MIN_POSITIVE..=MAX_ENTRY)
                }
            })
            .collect();
        FiniteSequence::new(offset, values)
    }

    pub fn nonzero_sequence(&mut self) -> FiniteSequence {
        loop {
            let x = self.sequence(0.15);
            if !x.is_zero() {
                return x;
            }
        }
    }

    /// Any admissible spec: `s ∈ (0, min(p, 1)]`.
    pub fn young(&mut self) -> SYoungSpec {
        let family = match self.rng.gen_range(0..3) {
            0 => YoungFamily::Power { p: self.rng.gen_range(0.25..=4.0) },
            1 => YoungFamily::ExpMinusOne,
            _ => YoungFamily::PowerLog { p: self.rng.gen_range(0.25..=3.0) },
        };
        let max = family.max_exponent();
        let s = if self.rng.gen_bool(0.25) {
            max
        } else {
            max * self.rng.gen_range(0.05..=1.0)
        };
        SYoungSpec { family, s }
    }

    /// A convex spec declared at `s = 1`.
    pub fn convex_young(&mut self) -> SYoungSpec {
        let family = match self.rng.gen_range(0..3) {
            0 => YoungFamily::Power { p: self.rng.gen_range(1.0..=4.0) },
            1 => YoungFamily::ExpMinusOne,
            _ => YoungFamily::PowerLog { p: self.rng.gen_range(1.0..=3.0) },
        };
        SYoungSpec { family, s: 1.0 }
    }

    pub fn weight(&mut self) -> WeightSpec {
        match self.rng.gen_range(0..3) {
            0 => WeightSpec::Identity,
            1 => WeightSpec::Power { theta: self.rng.gen_range(0.0..=1.0) },
            _ => WeightSpec::Constant { c: self.rng.gen_range(0.2..=5.0) },
        }
    }

    /// A window whose center lies within 5 of the stored run and whose
    /// half-width is at most the run length plus 5.
    pub fn window_near(&mut self, x: &FiniteSequence) -> Window {
        let len = x.values.len() as i64;
        let m = self.rng.gen_range(x.offset - 5..=x.offset + len + 5);
        let n = self.rng.gen_range(0..=(len + 5) as u64);
        Window::new(m, n)
    }

    /// A window that misses the stored run entirely.
    pub fn window_disjoint(&mut self, x: &FiniteSequence) -> Window {
        let n = self.rng.gen_range(0..=6u64);
        let gap = self.rng.gen_range(1..=10) + n as i64;
        if self.rng.gen_bool(0.5) {
            Window::new(x.offset - gap, n)
        } else {
            Window::new(x.offset + x.values.len() as i64 - 1 + gap, n)
        }
    }

    /// Second operand for the triangle checks.
    pub fn partner(&mut self, x: &FiniteSequence) -> FiniteSequence {
        match self.rng.gen_range(0..10) {
            0..=4 => self.sequence(0.15),
            5 => x.scale(self.rng.gen_range(-3.0..=3.0)),
            6 => x.clone(),
            7 => {
                let mut y = self.sequence(0.15);
                y.offset = x.offset + x.values.len() as i64 + self.rng.gen_range(0..=5);
                y
            }
            8 => FiniteSequence::zero(),
            _ => x.scale(-1.0).add(&self.sequence(0.5).scale(0.01)),
        }
    }
}

struct Tally {
    name: CheckName,
    trials: u64,
    failures: u64,
    counterexample: Option<Counterexample>,
    cases: BTreeMap<String, u64>,
}

impl Tally {
    fn new(name: CheckName) -> Self {
        Self {
            name,
            trials: 0,
            failures: 0,
            counterexample: None,
            cases: BTreeMap::new(),
        }
    }

    fn run(&mut self, trial: Trial, case_prefix: &str) {
        self.trials += 1;
        match trial.evaluate() {
            Ok(o) => {
                *self.cases.entry(format!("{case_prefix}{}", o.case)).or_default() += 1;
                if !o.passed {
                    self.fail(trial, o.measurements, None);
                }
            }
            Err(e) => self.fail(trial, Value::Null, Some(e.to_string())),
        }
    }

    fn fail(&mut self, trial: Trial, measurements: Value, error: Option<String>) {
        self.failures += 1;
        if self.counterexample.is_none() {
            self.counterexample = Some(Counterexample { trial, measurements, error });
        }
    }

    fn finish(self, extra: Option<Value>) -> CheckRecord {
        let mut details = json!({ "cases": self.cases });
        if let Some(Value::Object(map)) = extra {
            details.as_object_mut().unwrap().extend(map);
        }
        CheckRecord {
            name: self.name.as_str().to_string(),
            passed: self.failures == 0,
            trials: self.trials,
            failures: self.failures,
            counterexample: self.counterexample,
            details: Some(details),
        }
    }
}

/// Scales `x` so that its norm on `w` becomes `target` (zero stays zero).
fn rescale_to(x: &FiniteSequence, w: &Window, young: &SYoungSpec, weight: &WeightSpec, target: f64) -> Result<FiniteSequence> {
    let n = window_norm(x, w, young, weight, DEFAULT_TOL)?;
    if n == 0.0 {
        return Ok(x.clone());
    }
    Ok(x.scale(target / n))
}

/// Inputs placed on both sides of, and exactly on, the unit sphere.
fn lemma_target(gen: &mut TrialGen) -> f64 {
    let rng = gen.rng();
    match rng.gen_range(0..10) {
        0..=2 => 1.0,
        3 => 0.5,
        4 => 0.9,
        5 => 1.1,
        6 => 2.0,
        _ => 10f64.powf(rng.gen_range(-2.0..=2.0)),
    }
}

fn lemma_trial(gen: &mut TrialGen, lemma: Lemma) -> Result<Trial> {
    let young = gen.young();
    let weight = gen.weight();
    let x = if gen.rng().gen_bool(0.1) {
        FiniteSequence::zero()
    } else {
        gen.nonzero_sequence()
    };
    let window = if gen.rng().gen_bool(0.1) {
        gen.window_disjoint(&x)
    } else {
        gen.window_near(&x)
    };
    let target = lemma_target(gen);
    let x = rescale_to(&x, &window, &young, &weight, target)?;
    Ok(Trial::Lemma { lemma, x, window, young, weight })
}

/// Instances constructed to sit exactly on the unit sphere.
fn boundary_trials() -> Vec<Trial> {
    let mut out = Vec::new();
    let pythagorean = FiniteSequence::new(0, vec![0.6, 0.0, 0.8]);
    let p2 = SYoungSpec { family: YoungFamily::Power { p: 2.0 }, s: 1.0 };
    for lemma in Lemma::ALL {
        out.push(Trial::Lemma {
            lemma,
            x: pythagorean.clone(),
            window: Window::new(1, 1),
            young: p2,
            weight: WeightSpec::Identity,
        });
    }
    // Unit-modulus delta under e^t − 1 has norm 1/ln 2.
    let ln2 = std::f64::consts::LN_2;
    let e = SYoungSpec { family: YoungFamily::ExpMinusOne, s: 0.5 };
    for lemma in Lemma::ALL {
        out.push(Trial::Lemma {
            lemma,
            x: FiniteSequence::delta(3, ln2),
            window: Window::new(3, 0),
            young: e,
            weight: WeightSpec::Identity,
        });
    }
    out
}

fn check_record(name: CheckName, trials: u64, seed: u64) -> CheckRecord {
    let mut gen = TrialGen::new(seed, name.stream());
    let mut tally = Tally::new(name);
    let mut extra = None;
    macro_rules! gen_or_fail {
        ($e:expr) => {
            match $e {
                Ok(t) => t,
                Err(err) => {
                    tally.trials += 1;
                    tally.failures += 1;
                    extra = Some(json!({ "generation_error": err.to_string() }));
                    continue;
                }
            }
        };
    }
    match name {
        CheckName::PositivityAndZero => {
            for _ in 0..trials {
                let x = if gen.rng().gen_bool(0.15) {
                    FiniteSequence::new(gen.rng().gen_range(-5..=5), vec![0.0; 3])
                } else {
                    gen.sequence(0.3)
                };
                let (young, weight) = (gen.young(), gen.weight());
                tally.run(Trial::Positivity { x, young, weight }, "");
            }
        }
        CheckName::Homogeneity => {
            for _ in 0..trials {
                let x = gen.sequence(0.15);
                let a = match gen.rng().gen_range(0..10) {
                    0 => 0.0,
                    1 => -1.0,
                    _ => gen.rng().gen_range(-10.0..=10.0),
                };
                let (young, weight) = (gen.young(), gen.weight());
                tally.run(Trial::Homogeneity { x, a, young, weight }, "");
            }
        }
        CheckName::QuasiTriangle => {
            for _ in 0..trials {
                let x = gen.sequence(0.15);
                let y = gen.partner(&x);
                let (young, weight) = (gen.young(), gen.weight());
                tally.run(Trial::QuasiTriangle { x, y, young, weight }, "");
            }
        }
        CheckName::TriangleS1 => {
            for _ in 0..trials {
                let x = gen.sequence(0.15);
                let y = gen.partner(&x);
                let (young, weight) = (gen.convex_young(), gen.weight());
                tally.run(Trial::TriangleS1 { x, y, young, weight }, "");
            }
        }
        CheckName::LemmaSuite => {
            for trial in boundary_trials() {
                tally.run(trial, "boundary:");
            }
            // Constructed instances are not randomized trials.
            tally.trials = 0;
            for lemma in Lemma::ALL {
                for _ in 0..trials {
                    let trial = gen_or_fail!(lemma_trial(&mut gen, lemma));
                    tally.run(trial, &format!("{}:", lemma.as_str()));
                }
            }
        }
        CheckName::ZeroCharacterization => {
            for _ in 0..trials {
                let x = gen.sequence(0.35);
                let window = if gen.rng().gen_bool(0.3) {
                    gen.window_disjoint(&x)
                } else {
                    gen.window_near(&x)
                };
                let (young, weight) = (gen.young(), gen.weight());
                tally.run(Trial::ZeroCharacterization { x, window, young, weight }, "");
            }
        }
        CheckName::CoordinateBound => {
            for _ in 0..trials {
                let x = gen.sequence(0.15);
                let (young, weight) = (gen.young(), gen.weight());
                tally.run(Trial::CoordinateBound { x, young, weight }, "");
            }
        }
        CheckName::InverseSandwich => {
            for _ in 0..trials {
                let young = gen.young();
                let t = match gen.rng().gen_range(0..10) {
                    0 => 0.0,
                    _ => gen.rng().gen_range(0.0..=100.0),
                };
                tally.run(Trial::InverseSandwich { young, t }, "");
            }
        }
        CheckName::OracleEquivalence => {
            for _ in 0..trials {
                let x = gen.sequence(0.15);
                let window = gen.window_near(&x);
                let (young, weight) = (gen.young(), gen.weight());
                tally.run(Trial::OracleWindow { x, window, young, weight }, "window:");
            }
            for _ in 0..trials {
                let x = gen.sequence(0.15);
                let (young, weight) = (gen.young(), gen.weight());
                tally.run(Trial::WindowDominance { x, young, weight }, "global:");
            }
        }
        CheckName::WindowDominance => {
            for _ in 0..trials {
                let x = gen.sequence(0.15);
                let (young, weight) = (gen.young(), gen.weight());
                tally.run(Trial::WindowDominance { x, young, weight }, "");
            }
        }
        CheckName::TriangleViolationSearch => {
            let search = search_triangle_violation(&mut gen, trials);
            tally.trials = trials;
            match search {
                Ok(v) => extra = Some(v),
                Err(e) => tally.fail_without_trial(e),
            }
        }
        CheckName::ReproduceCounterexample => match reproduce_counterexample(COUNTEREXAMPLE_TRUNCATION) {
            Ok(cmp) => {
                let consistent = cmp.is_consistent();
                if !consistent {
                    tally.failures += 1;
                }
                extra = Some(json!({ "comparison": cmp }));
            }
            Err(e) => tally.fail_without_trial(e),
        },
    }
    tally.finish(extra)
}

impl Tally {
    fn fail_without_trial(&mut self, e: Error) {
        self.failures += 1;
        self.cases.insert(format!("error: {e}"), 1);
    }
}

/// Looks for a pair with `‖x+y‖ > ‖x‖ + ‖y‖` under `Φ(t) = t^s`, `s < 1`.
/// Finding one is reported, not required; the check always passes.
fn search_triangle_violation(gen: &mut TrialGen, trials: u64) -> Result<Value> {
    let mut best: Option<(f64, Value)> = None;
    for _ in 0..trials {
        let s = gen.rng().gen_range(0.25..0.95);
        let young = SYoungSpec { family: YoungFamily::Power { p: s }, s };
        let weight = gen.weight();
        let x = gen.nonzero_sequence();
        let y = gen.partner(&x);
        let q = QuasiConstantSample::compute(&x, &y, &young, &weight)?;
        let sum = q.x_norm + q.y_norm;
        if sum == 0.0 {
            continue;
        }
        let ratio = q.actual / sum;
        if best.as_ref().is_none_or(|(r, _)| ratio > *r) {
            best = Some((
                ratio,
                json!({ "x": x, "y": y, "young": young, "weight": weight, "sample": q }),
            ));
        }
    }
    let (ratio, example) = best.unwrap_or((0.0, Value::Null));
    let found = ratio > 1.0 + PROPERTY_SLACK;
    Ok(json!({
        "violation_found": found,
        "largest_ratio": ratio,
        "example": if found { example } else { Value::Null },
    }))
}

/// Side-by-side values for `x = y` with `x_k = (1+√2)^{−2(|k|+1)}` under
/// `Φ(t) = t^{1/2}`, `s = 1/2` and the identity weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleComparison {
    #[serde(rename = "D")]
    pub d: f64,
    pub p: f64,
    pub s: f64,
    pub truncation: u64,
    pub closed_form: f64,
    pub engine_norm_x: f64,
    pub engine_norm_sum: f64,
    pub oracle_norm_x: f64,
    pub oracle_norm_sum: f64,
    /// `2·‖x‖`, what homogeneity forces for `‖x + x‖`.
    pub homogeneity_prediction: f64,
    pub claimed_norm_x: f64,
    pub claimed_norm_sum: f64,
    /// True when the claimed `‖x+y‖` disagrees with the oracle.
    pub discrepancy: bool,
    pub note: String,
}

impl CounterexampleComparison {
    /// Engine, oracle and closed form agree and the claimed sum is flagged.
    pub fn is_consistent(&self) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= COMPARISON_TOL;
        close(self.engine_norm_x, 1.0)
            && close(self.oracle_norm_x, 1.0)
            && close(self.closed_form, 1.0)
            && close(self.engine_norm_sum, self.homogeneity_prediction)
            && close(self.oracle_norm_sum, self.engine_norm_sum)
            && self.discrepancy
    }
}

/// Truncation used by the suite's doubling comparison.
pub const COUNTEREXAMPLE_TRUNCATION: u64 = 80;

/// Recomputes the doubling example, truncated to `|k| ≤ truncation`, with
/// the solver and the grid oracle.
pub fn reproduce_counterexample(truncation: u64) -> Result<CounterexampleComparison> {
    let l = truncation;
    let d = 1.0 + 2f64.sqrt();
    let p = 0.5;
    let young = SYoungSpec { family: YoungFamily::Power { p }, s: 0.5 };
    let weight = WeightSpec::Identity;
    let x = geometric_example(d, p, l)?;
    let sum = x.add(&x);

    let engine_x = global_norm(&x, &young, &weight, DEFAULT_TOL)?.value;
    let engine_sum = global_norm(&sum, &young, &weight, DEFAULT_TOL)?.value;
    let (oracle_x, _) = centered_grid_norm(&x, &young, &weight, l)?;
    let (oracle_sum, _) = centered_grid_norm(&sum, &young, &weight, l)?;
    let claimed_sum = 4.0;
    Ok(CounterexampleComparison {
        d,
        p,
        s: young.s,
        truncation: l,
        closed_form: geometric_closed_form(d, p)?,
        engine_norm_x: engine_x,
        engine_norm_sum: engine_sum,
        oracle_norm_x: oracle_x,
        oracle_norm_sum: oracle_sum,
        homogeneity_prediction: 2.0 * engine_x,
        claimed_norm_x: 1.0,
        claimed_norm_sum: claimed_sum,
        discrepancy: (claimed_sum - oracle_sum).abs() > COMPARISON_TOL,
        note: "x + y = 2x, so homogeneity forces ||x+y|| = 2||x|| = 2 = ||x|| + ||y||; \
               the claimed value 4 contradicts homogeneity and the example attains \
               the triangle inequality with equality rather than violating it"
            .to_string(),
    })
}

fn single(name: CheckName, trials: u64, seed: u64) -> PropertyReport {
    PropertyReport::from_records(seed, vec![check_record(name, trials, seed)])
}

/// Norm is nonnegative and vanishes exactly on the zero sequence.
pub fn check_positivity_and_zero(trials: u64, seed: u64) -> PropertyReport {
    single(CheckName::PositivityAndZero, trials, seed)
}

/// `‖a·x‖ = |a|·‖x‖`.
pub fn check_homogeneity(trials: u64, seed: u64) -> PropertyReport {
    single(CheckName::Homogeneity, trials, seed)
}

/// `‖x+y‖ ≤ (X^s + Y^s)^{1/s} ≤ 2^{1/s}(X+Y)` and `1 ≤ C < 2`.
pub fn check_quasi_triangle(trials: u64, seed: u64) -> PropertyReport {
    single(CheckName::QuasiTriangle, trials, seed)
}

/// The plain triangle inequality for convex Φ at `s = 1`.
pub fn check_triangle_s1(trials: u64, seed: u64) -> PropertyReport {
    single(CheckName::TriangleS1, trials, seed)
}

/// The five windowed-norm lemmas, `trials` random instances each.
pub fn check_lemma_suite(trials: u64, seed: u64) -> PropertyReport {
    single(CheckName::LemmaSuite, trials, seed)
}

/// Runs every configured check and aggregates them, sorted by name.
/// Checks run on separate threads; the report does not depend on timing.
pub fn run_suite(config: &SuiteConfig) -> Result<PropertyReport> {
    let mut names = config
        .checks
        .iter()
        .map(|s| s.parse::<CheckName>())
        .collect::<Result<Vec<_>>>()?;
    names.sort();
    names.dedup();
    let records = std::thread::scope(|scope| {
        let handles: Vec<_> = names
            .iter()
            .map(|&name| {
                let trials = if name.is_deterministic() { 0 } else { config.trials };
                scope.spawn(move || check_record(name, trials, config.seed))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("check thread panicked"))
            .collect::<Vec<_>>()
    });
    Ok(PropertyReport::from_records(config.seed, records))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_names_round_trip() {
        for c in CheckName::ALL {
            assert_eq!(c.as_str().parse::<CheckName>().unwrap(), c);
            assert_eq!(serde_json::to_value(c).unwrap(), json!(c.as_str()));
        }
        assert!(matches!("foo".parse::<CheckName>(), Err(Error::Config(_))));
    }

    #[test]
    fn streams_are_distinct() {
        let mut ids: Vec<_> = CheckName::ALL.iter().map(|c| c.stream()).collect();
        ids.dedup();
        assert_eq!(ids.len(), CheckName::ALL.len());
    }

    #[test]
    fn generators_respect_ranges() {
        let mut gen = TrialGen::new(7, 1);
        for _ in 0..500 {
            let f = gen.young();
            assert!(f.check().is_ok(), "{f:?}");
            let c = gen.convex_young();
            assert!(c.check().is_ok() && c.s == 1.0);
            assert!(gen.weight().check_params().is_ok());
            let x = gen.sequence(0.2);
            assert!((1..=33).contains(&x.values.len()));
            assert!(x.values.iter().all(|v| v.abs() <= 10.0));
        }
    }

    #[test]
    fn disjoint_windows_miss_the_run() {
        let mut gen = TrialGen::new(3, 2);
        for _ in 0..200 {
            let x = gen.sequence(0.0);
            let w = gen.window_disjoint(&x);
            assert!(x.window_slice(&w).iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn empty_suite_is_valid() {
        let r = run_suite(&SuiteConfig { seed: 1, trials: 10, checks: vec![] }).unwrap();
        assert!(r.passed && r.checks.is_empty());
    }

    #[test]
    fn unknown_check_is_a_config_error() {
        let cfg = SuiteConfig { seed: 1, trials: 10, checks: vec!["foo".into()] };
        assert!(matches!(run_suite(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn duplicate_names_appear_once() {
        let cfg = SuiteConfig {
            seed: 5,
            trials: 3,
            checks: vec!["homogeneity".into(), "homogeneity".into()],
        };
        let r = run_suite(&cfg).unwrap();
        assert_eq!(r.checks.len(), 1);
        assert_eq!(r.trial_counts["homogeneity"], 3);
    }

    #[test]
    fn misdeclared_exponent_yields_replayable_counterexample() {
        // t^{1/2} declared at s = 1: disjoint deltas break the triangle bound.
        let young = SYoungSpec { family: YoungFamily::Power { p: 0.5 }, s: 1.0 };
        let trial = Trial::QuasiTriangle {
            x: FiniteSequence::delta(0, 1.0),
            y: FiniteSequence::delta(1, 1.0),
            young,
            weight: WeightSpec::Identity,
        };
        let o = trial.evaluate().unwrap();
        assert!(!o.passed);
        let cx = Counterexample { trial, measurements: o.measurements, error: None };
        let text = serde_json::to_string(&cx).unwrap();
        let back: Counterexample = serde_json::from_str(&text).unwrap();
        assert!(back.replay());
    }

    #[test]
    fn doubled_deltas_meet_the_quasi_bound_with_equality() {
        let young = SYoungSpec { family: YoungFamily::Power { p: 0.5 }, s: 0.5 };
        let q = QuasiConstantSample::compute(
            &FiniteSequence::delta(0, 1.0),
            &FiniteSequence::delta(1, 1.0),
            &young,
            &WeightSpec::Identity,
        )
        .unwrap();
        assert!((q.actual - 4.0).abs() < 1e-10);
        assert!((q.bound - 4.0).abs() < 1e-12);
        assert!((q.c - 2f64.sqrt()).abs() < 1e-12);
    }
}
