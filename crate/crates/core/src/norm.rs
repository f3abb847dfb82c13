//! The modular, the windowed Luxemburg-type norm and the global
//! Orlicz-Morrey quasi-norm.
//!
//! For a window `S = S_{m,N}` the modular at scale `b > 0` is
//!
//! ```text
//! ρ_S(b) = φ(2N+1)/(2N+1) · Σ_{k∈S} Φ_s(|x_k| / b)
//! ```
//!
//! and the window norm is `inf{ b > 0 | ρ_S(b) ≤ 1 }`. `ρ_S` is continuous
//! and nonincreasing in `b`; when some entry in `S` is nonzero it diverges
//! as `b → 0+` and vanishes as `b → ∞`, so the window norm is the point
//! where `ρ_S` crosses 1. It is found by doubling/halving to a bracket and
//! then bisecting.
//!
//! The global quasi-norm is the supremum of window norms over all `m ∈ Z`
//! and `N ≥ 0`. For a sequence with support hull `[lo, hi]` the supremum is
//! attained on the finite set `m ∈ [lo, hi]`, `N ∈ [0, hi − lo]`:
//!
//! * a center `m < lo` (or `m > hi`) sees the support through
//!   `[lo, min(m+N, hi)]`; moving the center to `lo` with the same `N` only
//!   enlarges that intersection while keeping the weight factor, so the
//!   modular and hence the norm can only grow;
//! * with `m` in the hull and `N ≥ hi − lo` the window already covers the
//!   whole support. Growing `N` further leaves the Φ-sum unchanged while
//!   `φ(2N+1)/(2N+1)` is nonincreasing, so the norm cannot grow.
//!
//! The search visits that set in a fixed order and keeps the first
//! maximum, so the result is deterministic. A window is skipped without
//! solving when its modular at the current best is already `≤ 1`, which
//! proves its norm does not exceed the best.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::sequence::{FiniteSequence, Window};
use crate::validation::{ValidationReport, Violation};
use crate::weights::WeightSpec;
use crate::young::SYoungSpec;

/// Default relative tolerance of the bisection.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Bracketing gives up after this many doublings or halvings.
pub const MAX_BRACKET_STEPS: u32 = 2000;
/// Slack of the coordinate bound.
pub const COORDINATE_SLACK: f64 = 1e-9;

const MAX_BISECTIONS: u32 = 2200;

/// A computed global quasi-norm with the window that attains it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    #[serde(rename = "norm")]
    pub value: f64,
    pub witness: Window,
    /// Bisection iterations spent on the witness window.
    pub iterations: u32,
    /// `|ρ_witness(value) − 1|` when `value > 0`, else 0.
    pub residual: f64,
}

/// Root of a single window's modular equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSolution {
    pub value: f64,
    pub iterations: u32,
}

struct WindowProblem<'a> {
    entries: &'a [f64],
    factor: f64,
    young: &'a SYoungSpec,
}

impl<'a> WindowProblem<'a> {
    fn new(x: &'a FiniteSequence, w: &Window, young: &'a SYoungSpec, weight: &WeightSpec) -> Result<Self> {
        Ok(Self {
            entries: x.stored_in(w),
            factor: weight.window_factor(w.n)?,
            young,
        })
    }

    fn is_zero(&self) -> bool {
        self.entries.iter().all(|v| *v == 0.0)
    }

    fn modular(&self, b: f64) -> f64 {
        let sum: f64 = self.entries.iter().map(|v| self.young.phi(v.abs() / b)).sum();
        self.factor * sum
    }

    /// Smallest `b` with `ρ(b) ≤ 1`, to relative precision `tol`.
    ///
    /// `floor`, when given, is a point already known to have `ρ > 1`.
    fn solve(&self, floor: Option<f64>, tol: f64) -> Result<WindowSolution> {
        if self.is_zero() {
            return Ok(WindowSolution { value: 0.0, iterations: 0 });
        }
        let above_one = |b: f64| -> Result<bool> {
            let r = self.modular(b);
            if r.is_nan() {
                return Err(Error::NonConvergence(format!("modular is NaN at b = {b}")));
            }
            Ok(r > 1.0)
        };

        // Invariant after bracketing: ρ(lo) > 1 ≥ ρ(hi).
        let (mut lo, mut hi);
        let mut steps = 0;
        match floor {
            Some(f) => {
                lo = f;
                hi = 2.0 * f;
                while above_one(hi)? {
                    lo = hi;
                    hi *= 2.0;
                    steps += 1;
                    if steps > MAX_BRACKET_STEPS {
                        return Err(nonconvergent(steps));
                    }
                }
            }
            None => {
                let start = self.entries.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                if above_one(start)? {
                    lo = start;
                    hi = 2.0 * start;
                    while above_one(hi)? {
                        lo = hi;
                        hi *= 2.0;
                        steps += 1;
                        if steps > MAX_BRACKET_STEPS {
                            return Err(nonconvergent(steps));
                        }
                    }
                } else {
                    hi = start;
                    lo = 0.5 * start;
                    while !above_one(lo)? {
                        hi = lo;
                        lo *= 0.5;
                        steps += 1;
                        if steps > MAX_BRACKET_STEPS {
                            return Err(nonconvergent(steps));
                        }
                    }
                }
            }
        }
        if !hi.is_finite() {
            return Err(Error::NonConvergence(format!(
                "window norm exceeds the floating-point range (bracket reached {lo:e})"
            )));
        }

        let mut iterations = 0;
        while hi - lo > tol * hi && iterations < MAX_BISECTIONS {
            let mid = lo + 0.5 * (hi - lo);
            if mid <= lo || mid >= hi {
                break;
            }
            if above_one(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
            iterations += 1;
        }
        Ok(WindowSolution { value: hi, iterations })
    }
}

fn nonconvergent(steps: u32) -> Error {
    Error::NonConvergence(format!(
        "no bracket for the modular equation after {steps} doublings/halvings"
    ))
}

fn check_inputs(young: &SYoungSpec, weight: &WeightSpec) -> Result<()> {
    young.check_structure()?;
    weight.check_params()
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return domain(format!("tolerance must be positive, got {tol}"));
    }
    Ok(())
}

/// `φ(2N+1)/(2N+1) · Σ_{k∈S_{m,N}} Φ_s(|x_k|/b)`.
pub fn modular(
    x: &FiniteSequence,
    w: &Window,
    b: f64,
    young: &SYoungSpec,
    weight: &WeightSpec,
) -> Result<f64> {
    check_inputs(young, weight)?;
    if !(b > 0.0) {
        return domain(format!("b must be positive, got {b}"));
    }
    Ok(WindowProblem::new(x, w, young, weight)?.modular(b))
}

/// Window norm `inf{ b > 0 | ρ_{m,N}(b) ≤ 1 }`; exactly 0 on an all-zero
/// window.
pub fn window_norm(
    x: &FiniteSequence,
    w: &Window,
    young: &SYoungSpec,
    weight: &WeightSpec,
    tol: f64,
) -> Result<f64> {
    window_norm_solution(x, w, young, weight, tol).map(|s| s.value)
}

/// [`window_norm`] together with the number of bisection steps.
pub fn window_norm_solution(
    x: &FiniteSequence,
    w: &Window,
    young: &SYoungSpec,
    weight: &WeightSpec,
    tol: f64,
) -> Result<WindowSolution> {
    check_inputs(young, weight)?;
    check_tol(tol)?;
    WindowProblem::new(x, w, young, weight)?.solve(None, tol)
}

/// Global quasi-norm: the supremum of window norms, searched over the
/// finite dominating set described in the module docs.
pub fn global_norm(
    x: &FiniteSequence,
    young: &SYoungSpec,
    weight: &WeightSpec,
    tol: f64,
) -> Result<NormResult> {
    check_inputs(young, weight)?;
    check_tol(tol)?;
    let Some((lo, hi)) = x.support_hull() else {
        return Ok(NormResult {
            value: 0.0,
            witness: Window::new(0, 0),
            iterations: 0,
            residual: 0.0,
        });
    };
    let width = (hi - lo) as u64;

    let mut best: Option<(WindowSolution, Window)> = None;
    for n in 0..=width {
        for m in lo..=hi {
            let w = Window::new(m, n);
            let problem = WindowProblem::new(x, &w, young, weight)?;
            if problem.is_zero() {
                continue;
            }
            let floor = match best {
                Some((sol, _)) if problem.modular(sol.value) <= 1.0 => continue,
                Some((sol, _)) => Some(sol.value),
                None => None,
            };
            let sol = problem.solve(floor, tol)?;
            if best.is_none_or(|(b, _)| sol.value > b.value) {
                best = Some((sol, w));
            }
        }
    }

    let (sol, witness) = best.expect("a nonzero sequence has a nonzero window");
    let residual = (WindowProblem::new(x, &witness, young, weight)?.modular(sol.value) - 1.0).abs();
    Ok(NormResult {
        value: sol.value,
        witness,
        iterations: sol.iterations,
        residual,
    })
}

fn check_geometric(d: f64, p: f64) -> Result<()> {
    if !(d > 1.0 && d.is_finite()) {
        return domain(format!("D must exceed 1, got {d}"));
    }
    if !(p > 0.0 && p.is_finite()) {
        return domain(format!("p must be positive, got {p}"));
    }
    Ok(())
}

/// `((D+1)/(D(D−1)))^{1/p}`: the quasi-norm of the untruncated sequence
/// `x_k = D^{−(|k|+1)/p}` under `Φ(t) = t^p` and `φ(n) = n`.
pub fn geometric_closed_form(d: f64, p: f64) -> Result<f64> {
    check_geometric(d, p)?;
    Ok(((d + 1.0) / (d * (d - 1.0))).powf(1.0 / p))
}

/// Centered (`m = 0`) window norm of the same sequence at half-width `N`:
/// `((D+1)/(D(D−1)) − 2·D^{−N}/(D(D−1)))^{1/p}`.
pub fn geometric_partial_closed_form(d: f64, p: f64, n: u64) -> Result<f64> {
    check_geometric(d, p)?;
    let denom = d * (d - 1.0);
    let sum = (d + 1.0) / denom - 2.0 * d.powf(-(n as f64)) / denom;
    Ok(sum.powf(1.0 / p))
}

/// Checks `sup_j |x_j| ≤ ‖x‖ · Φ_s^{-1}(1/φ(1))`, the single-coordinate
/// bound obtained from the `N = 0` windows.
pub fn coordinate_bound_check(
    x: &FiniteSequence,
    young: &SYoungSpec,
    weight: &WeightSpec,
) -> Result<ValidationReport> {
    let norm = global_norm(x, young, weight, DEFAULT_TOL)?;
    let unit = young.inverse(1.0 / weight.eval(1)?)?;
    let bound = norm.value * unit;
    let mut violations = Vec::new();
    for (i, v) in x.values.iter().enumerate() {
        if v.abs() > bound + COORDINATE_SLACK {
            violations.push(Violation::new(
                "coordinate_bound",
                vec![(x.offset + i as i64) as f64, v.abs()],
                v.abs(),
                bound,
            ));
        }
    }
    Ok(ValidationReport::from_violations(violations))
}
