//! Windowed Orlicz-Morrey quasi-norms of finitely supported real sequences.
//!
//! For an s-Young function `Φ_s`, a weight `φ` and a window
//! `S_{m,N} = {m−N, …, m+N}`, the window norm of `x` is the smallest `b > 0`
//! with
//!
//! ```text
//! φ(2N+1)/(2N+1) · Σ_{k∈S_{m,N}} Φ_s(|x_k|/b) ≤ 1,
//! ```
//!
//! and the global quasi-norm is the supremum over all windows.
//!
//! ```
//! use omseq::{global_norm, FiniteSequence, SYoungSpec, WeightSpec, DEFAULT_TOL};
//!
//! let x = FiniteSequence::new(0, vec![3.0, 0.0, 4.0]);
//! let phi = SYoungSpec::power(2.0, 1.0).unwrap();
//! let r = global_norm(&x, &phi, &WeightSpec::Identity, DEFAULT_TOL).unwrap();
//! assert!((r.value - 5.0).abs() < 1e-9);
//! ```

// `!(x > 0.0)` guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod norm;
pub mod oracle;
pub mod output;
pub mod property;
pub mod sequence;
pub mod validation;
pub mod weights;
pub mod young;

pub use error::{Error, Result};
pub use norm::{
    coordinate_bound_check, geometric_closed_form, geometric_partial_closed_form, global_norm,
    modular, window_norm, window_norm_solution, NormResult, WindowSolution, DEFAULT_TOL,
};
pub use property::{run_suite, CheckName, PropertyReport, SuiteConfig};
pub use sequence::{geometric_example, FiniteSequence, Window};
pub use validation::{ValidationReport, Violation};
pub use weights::{validate_weight, WeightSpec};
pub use young::{validate_s_young, SYoungSpec, SamplingPlan, YoungFamily};
