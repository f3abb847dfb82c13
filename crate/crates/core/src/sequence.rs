//! Finitely supported two-sided sequences and index windows.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// A real sequence `(x_k)_{k∈Z}` stored as a contiguous run starting at
/// `offset`; every index outside the run is zero.
///
/// Equality is entrywise: stored zeros at either end do not matter.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct FiniteSequence {
    pub offset: i64,
    pub values: Vec<f64>,
}

impl FiniteSequence {
    pub fn new(offset: i64, values: Vec<f64>) -> Self {
        Self { offset, values }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// Unit mass at index `k`.
    pub fn delta(k: i64, value: f64) -> Self {
        Self::new(k, vec![value])
    }

    /// Index one past the last stored entry.
    fn end(&self) -> i64 {
        self.offset + self.values.len() as i64
    }

    /// Entry `x_k`.
    pub fn get(&self, k: i64) -> f64 {
        if k < self.offset || k >= self.end() {
            return 0.0;
        }
        self.values[(k - self.offset) as usize]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    /// Smallest and largest index holding a nonzero entry.
    pub fn support_hull(&self) -> Option<(i64, i64)> {
        let first = self.values.iter().position(|v| *v != 0.0)?;
        let last = self.values.iter().rposition(|v| *v != 0.0)?;
        Some((self.offset + first as i64, self.offset + last as i64))
    }

    /// `sup_k |x_k|`.
    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Stored entries whose index falls inside `w`. Indices outside the
    /// stored run are zero and contribute nothing to a window sum.
    pub(crate) fn stored_in(&self, w: &Window) -> &[f64] {
        let lo = w.lo().max(self.offset as i128);
        let hi = w.hi().min(self.end() as i128 - 1);
        if lo > hi {
            return &[];
        }
        let start = (lo - self.offset as i128) as usize;
        let stop = (hi - self.offset as i128) as usize + 1;
        &self.values[start..stop]
    }

    /// `(x_{m−N}, …, x_{m+N})`, zero-padded outside the stored run.
    pub fn window_slice(&self, w: &Window) -> Vec<f64> {
        let (lo, hi) = (w.lo(), w.hi());
        (lo..=hi).map(|k| self.get_wide(k)).collect()
    }

    fn get_wide(&self, k: i128) -> f64 {
        if k < self.offset as i128 || k >= self.end() as i128 {
            0.0
        } else {
            self.values[(k - self.offset as i128) as usize]
        }
    }

    /// Entrywise `a·x`.
    pub fn scale(&self, a: f64) -> Self {
        if a == 0.0 {
            return Self::zero();
        }
        Self::new(self.offset, self.values.iter().map(|v| a * v).collect())
    }

    /// Entrywise `x + y` over the union of the stored runs.
    pub fn add(&self, other: &Self) -> Self {
        if other.values.is_empty() {
            return self.clone();
        }
        if self.values.is_empty() {
            return other.clone();
        }
        let lo = self.offset.min(other.offset);
        let hi = self.end().max(other.end());
        let values = (lo..hi).map(|k| self.get(k) + other.get(k)).collect();
        Self::new(lo, values)
    }

    /// Drops leading and trailing zeros.
    pub fn trimmed(&self) -> Self {
        match self.support_hull() {
            None => Self::zero(),
            Some((lo, hi)) => Self::new(
                lo,
                self.values[(lo - self.offset) as usize..=(hi - self.offset) as usize].to_vec(),
            ),
        }
    }
}

impl PartialEq for FiniteSequence {
    fn eq(&self, other: &Self) -> bool {
        let a = self.trimmed();
        let b = other.trimmed();
        (a.values.is_empty() && b.values.is_empty()) || (a.offset == b.offset && a.values == b.values)
    }
}

/// The index window `S_{m,N} = {m − N, …, m + N}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub m: i64,
    #[serde(rename = "N")]
    pub n: u64,
}

impl Window {
    pub fn new(m: i64, n: u64) -> Self {
        Self { m, n }
    }

    pub fn lo(&self) -> i128 {
        self.m as i128 - self.n as i128
    }

    pub fn hi(&self) -> i128 {
        self.m as i128 + self.n as i128
    }

    /// `|S_{m,N}| = 2N + 1`.
    pub fn cardinality(&self) -> u128 {
        2 * self.n as u128 + 1
    }

    pub fn contains(&self, k: i64) -> bool {
        (self.lo()..=self.hi()).contains(&(k as i128))
    }
}

/// Truncation to `|k| ≤ L` of `x_k = D^{−(|k|+1)/p}`.
pub fn geometric_example(d: f64, p: f64, l: u64) -> Result<FiniteSequence> {
    if !(d > 1.0 && d.is_finite()) {
        return domain(format!("D must exceed 1, got {d}"));
    }
    if !(p > 0.0 && p.is_finite()) {
        return domain(format!("p must be positive, got {p}"));
    }
    let l = i64::try_from(l).map_err(|_| crate::Error::Domain("truncation too large".into()))?;
    let values = (-l..=l)
        .map(|k| d.powf(-((k.unsigned_abs() + 1) as f64) / p))
        .collect();
    Ok(FiniteSequence::new(-l, values))
}
