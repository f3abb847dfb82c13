//! Brute-force reference computations that avoid the solver's code path.
//!
//! [`grid_window_norm`] locates the crossing of the modular through 1 on
//! nested logarithmic/uniform grids of `b` and evaluates the modular on
//! the full zero-padded window, without bracketing or bisection.
//! [`brute_force_global`] sweeps a window set strictly larger than the one
//! [`crate::norm::global_norm`] searches.

use crate::error::Result;
use crate::norm::{window_norm, DEFAULT_TOL};
use crate::sequence::{FiniteSequence, Window};
use crate::weights::WeightSpec;
use crate::young::SYoungSpec;

/// Coarse grid `b = 2^{k/8}` for `k ∈ [−8·80, 8·80]`.
const COARSE_STEPS_PER_OCTAVE: i32 = 8;
const COARSE_OCTAVES: i32 = 80;
/// Points per refinement level and number of levels.
const FINE_POINTS: usize = 1000;
const FINE_LEVELS: usize = 3;

fn padded_modular(slice: &[f64], factor: f64, young: &SYoungSpec, b: f64) -> Result<f64> {
    let mut sum = 0.0;
    for v in slice {
        sum += young.evaluate(v.abs() / b)?;
    }
    Ok(factor * sum)
}

/// Window norm by grid search. The returned grid point is the first one
/// (in increasing `b`) with modular `≤ 1`; its relative distance to the
/// infimum is below `~1e-10`.
pub fn grid_window_norm(
    x: &FiniteSequence,
    w: &Window,
    young: &SYoungSpec,
    weight: &WeightSpec,
) -> Result<f64> {
    let slice = x.window_slice(w);
    if slice.iter().all(|v| *v == 0.0) {
        return Ok(0.0);
    }
    let n = 2 * w.n + 1;
    let factor = weight.eval(n)? / n as f64;
    let feasible = |b: f64| -> Result<bool> { Ok(padded_modular(&slice, factor, young, b)? <= 1.0) };

    let ks = -COARSE_STEPS_PER_OCTAVE * COARSE_OCTAVES..=COARSE_STEPS_PER_OCTAVE * COARSE_OCTAVES;
    let mut upper = None;
    let mut previous = 0.0;
    for k in ks {
        let b = 2f64.powf(k as f64 / COARSE_STEPS_PER_OCTAVE as f64);
        if feasible(b)? {
            upper = Some(b);
            break;
        }
        previous = b;
    }
    let Some(mut hi) = upper else {
        return Ok(f64::INFINITY);
    };
    let mut lo = previous;
    if lo == 0.0 {
        return Ok(hi);
    }
    for _ in 0..FINE_LEVELS {
        let step = (hi - lo) / FINE_POINTS as f64;
        let mut next = None;
        for i in 1..=FINE_POINTS {
            let b = lo + step * i as f64;
            if feasible(b)? {
                next = Some((b - step, b));
                break;
            }
        }
        // The last point is `hi` itself up to rounding, which is feasible.
        let (l, h) = next.unwrap_or((hi - step, hi));
        lo = l;
        hi = h;
    }
    Ok(hi)
}

/// Maximum of [`grid_window_norm`] over the centered windows `(0, N)`,
/// `N = 0..=max_n`.
pub fn centered_grid_norm(
    x: &FiniteSequence,
    young: &SYoungSpec,
    weight: &WeightSpec,
    max_n: u64,
) -> Result<(f64, Window)> {
    let mut best = (0.0, Window::new(0, 0));
    for n in 0..=max_n {
        let w = Window::new(0, n);
        let v = grid_window_norm(x, &w, young, weight)?;
        if v > best.0 {
            best = (v, w);
        }
    }
    Ok(best)
}

/// Largest window norm over `m ∈ [lo − 2W, hi + 2W]`, `N ∈ [0, 3W]`, with
/// `W = max(hi − lo, 1)`. Each window goes through the solver; only the
/// window set differs from the global search.
pub fn brute_force_global(
    x: &FiniteSequence,
    young: &SYoungSpec,
    weight: &WeightSpec,
) -> Result<(f64, Window)> {
    let Some((lo, hi)) = x.support_hull() else {
        return Ok((0.0, Window::new(0, 0)));
    };
    let width = (hi - lo).max(1);
    let mut best = (0.0, Window::new(0, 0));
    for n in 0..=(3 * width) as u64 {
        for m in (lo - 2 * width)..=(hi + 2 * width) {
            let w = Window::new(m, n);
            let v = window_norm(x, &w, young, weight, DEFAULT_TOL)?;
            if v > best.0 {
                best = (v, w);
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_recovers_pythagorean_norm() {
        let x = FiniteSequence::new(0, vec![3.0, 0.0, 4.0]);
        let f = SYoungSpec::power(2.0, 1.0).unwrap();
        let v = grid_window_norm(&x, &Window::new(1, 1), &f, &WeightSpec::Identity).unwrap();
        assert!((v - 5.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn grid_handles_zero_and_tiny_windows() {
        let f = SYoungSpec::power(1.0, 1.0).unwrap();
        let id = WeightSpec::Identity;
        let zero = FiniteSequence::new(0, vec![0.0, 0.0]);
        assert_eq!(grid_window_norm(&zero, &Window::new(0, 3), &f, &id).unwrap(), 0.0);
        let tiny = FiniteSequence::delta(0, 1e-3);
        let v = grid_window_norm(&tiny, &Window::new(0, 0), &f, &id).unwrap();
        assert!((v - 1e-3).abs() < 1e-12, "{v}");
    }
}
