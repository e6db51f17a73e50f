//! Finite integer digit sets `A` over a base `p`, standing for the sets
//! `A_p = { sum x_i / p^i : x_i in A }`.
//!
//! Everything here is exact integer or rational arithmetic. The algebraic
//! identities `A_p + B_p = (A + B)_p`, `A_p - B_p = (A - B)_p` and
//! `k A_p = (kA)_p` mean that set operations on the fractal side reduce to
//! Minkowski operations on the digit side.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DigitError {
    #[error("base must be at least 2, got {0}")]
    BaseTooSmall(u32),
    #[error("digit set must be nonempty")]
    Empty,
    #[error("digit {digit} is outside (-{base}, {base})")]
    DigitOutOfRange { digit: i64, base: u32 },
    #[error("digit sets have different bases ({0} and {1})")]
    BaseMismatch(u32, u32),
    #[error("set is empty")]
    EmptySet,
    #[error("need at least two elements, got {0}")]
    TooFewElements(usize),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

/// The integer range `<lo, hi>`: `[lo, hi] ∩ Z`, a singleton when `lo == hi`,
/// empty when `lo > hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IntRange {
    pub lo: i64,
    pub hi: i64,
}

impl IntRange {
    pub fn new(lo: i64, hi: i64) -> Self {
        IntRange { lo, hi }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn len(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            (self.hi - self.lo + 1) as usize
        }
    }

    pub fn contains(&self, x: i64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }

    pub fn to_set(&self) -> BTreeSet<i64> {
        self.iter().collect()
    }
}

/// `<lo, hi>` materialized.
pub fn range_set(lo: i64, hi: i64) -> BTreeSet<i64> {
    IntRange::new(lo, hi).to_set()
}

/// A nonempty, sorted, duplicate-free digit set over base `p`.
///
/// Sets built with [`DigitSet::new`] satisfy `|d| < p` for every digit.
/// Minkowski sums and scalings can leave that range; such sets are still
/// representable (see [`DigitSet::is_within_base`]) but the geometry engine
/// refuses them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DigitSet {
    base: u32,
    digits: Vec<i64>,
    within_base: bool,
}

impl DigitSet {
    pub fn new<I: IntoIterator<Item = i64>>(base: u32, digits: I) -> Result<Self, DigitError> {
        let set = Self::widened(base, digits)?;
        if let Some(&d) = set.digits.iter().find(|&&d| d.unsigned_abs() >= base as u64) {
            return Err(DigitError::DigitOutOfRange { digit: d, base });
        }
        Ok(set)
    }

    /// Like [`DigitSet::new`] but accepts digits outside `(-p, p)`.
    pub fn widened<I: IntoIterator<Item = i64>>(base: u32, digits: I) -> Result<Self, DigitError> {
        if base < 2 {
            return Err(DigitError::BaseTooSmall(base));
        }
        let mut digits: Vec<i64> = digits.into_iter().collect();
        digits.sort_unstable();
        digits.dedup();
        if digits.is_empty() {
            return Err(DigitError::Empty);
        }
        let within_base = digits.iter().all(|d| d.unsigned_abs() < base as u64);
        Ok(DigitSet { base, digits, within_base })
    }

    /// The full signed alphabet `<-p+1, p-1>`.
    pub fn full_signed(base: u32) -> Result<Self, DigitError> {
        let b = base as i64;
        Self::new(base, -b + 1..=b - 1)
    }

    /// The standard alphabet `<0, p-1>`.
    pub fn standard(base: u32) -> Result<Self, DigitError> {
        Self::new(base, 0..base as i64)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn digits(&self) -> &[i64] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min(&self) -> i64 {
        self.digits[0]
    }

    pub fn max(&self) -> i64 {
        self.digits[self.digits.len() - 1]
    }

    pub fn contains(&self, d: i64) -> bool {
        self.digits.binary_search(&d).is_ok()
    }

    pub fn is_within_base(&self) -> bool {
        self.within_base
    }

    pub fn ensure_within_base(&self) -> Result<(), DigitError> {
        match self.digits.iter().find(|d| d.unsigned_abs() >= self.base as u64) {
            Some(&digit) => Err(DigitError::DigitOutOfRange { digit, base: self.base }),
            None => Ok(()),
        }
    }

    pub fn negated(&self) -> DigitSet {
        scale(-1, self)
    }

    pub fn to_set(&self) -> BTreeSet<i64> {
        self.digits.iter().copied().collect()
    }

    /// `diam` of the digits.
    pub fn diam(&self) -> i64 {
        self.max() - self.min()
    }

    /// `Δ` of the digits.
    pub fn delta(&self) -> Result<i64, DigitError> {
        sorted_delta(&self.digits)
    }

    pub fn interval_ratio(&self) -> Result<BigRational, DigitError> {
        interval_ratio(&self.digits)
    }
}

impl fmt::Display for DigitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, d) in self.digits.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, "}}_{}", self.base)
    }
}

fn combine(a: &DigitSet, b: &DigitSet, op: impl Fn(i64, i64) -> i64 + Copy) -> Result<DigitSet, DigitError> {
    if a.base != b.base {
        return Err(DigitError::BaseMismatch(a.base, b.base));
    }
    // `op` is monotone in each argument, so the extremes come from the
    // corners. Small spans go through a presence bitmap instead of a sort.
    let corners = [op(a.min(), b.min()), op(a.min(), b.max()), op(a.max(), b.min()), op(a.max(), b.max())];
    let lo = *corners.iter().min().unwrap();
    let span = (*corners.iter().max().unwrap() - lo) as usize + 1;
    let pairs = a.digits.iter().flat_map(|&x| b.digits.iter().map(move |&y| op(x, y)));
    if span > 4 * a.len() * b.len() + 64 {
        return DigitSet::widened(a.base, pairs);
    }
    let mut seen = vec![false; span];
    for v in pairs {
        seen[(v - lo) as usize] = true;
    }
    let digits: Vec<i64> = (0..span).filter(|&i| seen[i]).map(|i| lo + i as i64).collect();
    let within_base = digits.iter().all(|d| d.unsigned_abs() < a.base as u64);
    Ok(DigitSet { base: a.base, digits, within_base })
}

/// `A + B`.
pub fn minkowski_sum(a: &DigitSet, b: &DigitSet) -> Result<DigitSet, DigitError> {
    combine(a, b, |x, y| x + y)
}

/// `A - B`.
pub fn minkowski_diff(a: &DigitSet, b: &DigitSet) -> Result<DigitSet, DigitError> {
    combine(a, b, |x, y| x - y)
}

/// `kA`. The result may be widened.
pub fn scale(k: i64, a: &DigitSet) -> DigitSet {
    DigitSet::widened(a.base, a.digits.iter().map(|&d| k * d))
        .expect("scaling a nonempty set with a valid base")
}

pub fn diam(set: &[i64]) -> Result<i64, DigitError> {
    let lo = set.iter().min().ok_or(DigitError::EmptySet)?;
    let hi = set.iter().max().ok_or(DigitError::EmptySet)?;
    Ok(hi - lo)
}

/// Largest jump between consecutive elements. Undefined on fewer than two
/// distinct elements.
pub fn delta(set: &[i64]) -> Result<i64, DigitError> {
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    sorted_delta(&sorted)
}

fn sorted_delta(sorted: &[i64]) -> Result<i64, DigitError> {
    if sorted.len() < 2 {
        return Err(DigitError::TooFewElements(sorted.len()));
    }
    Ok(sorted.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0))
}

/// `I(A) = Δ(A) / (Δ(A) + diam(A))`.
pub fn interval_ratio(set: &[i64]) -> Result<BigRational, DigitError> {
    let gap = delta(set)?;
    let width = diam(set)?;
    Ok(BigRational::new(BigInt::from(gap), BigInt::from(gap + width)))
}

/// `A_p` is an interval iff `1/p >= I(A)`.
pub fn is_full_interval(a: &DigitSet) -> Result<bool, DigitError> {
    // 1/p >= g/(g+w)  <=>  g+w >= p*g, all terms positive.
    let gap = a.delta()? as i128;
    Ok(gap + a.diam() as i128 >= a.base as i128 * gap)
}

/// For `A, B ⊆ <0, p-1>` both containing `0` and `p - 1`:
/// `A_p - B_p = [-1, 1]` iff `Δ(A - B) <= 2`.
pub fn full_diff_interval(a: &DigitSet, b: &DigitSet) -> Result<bool, DigitError> {
    if a.base != b.base {
        return Err(DigitError::BaseMismatch(a.base, b.base));
    }
    let top = a.base as i64 - 1;
    if a.base <= 2 {
        return Err(DigitError::PreconditionViolated(format!("base must exceed 2, got {}", a.base)));
    }
    for (name, set) in [("A", a), ("B", b)] {
        if !set.contains(0) || !set.contains(top) {
            return Err(DigitError::PreconditionViolated(format!(
                "{name} must contain 0 and {top}"
            )));
        }
        if set.min() < 0 || set.max() > top {
            return Err(DigitError::PreconditionViolated(format!(
                "{name} must lie in <0, {top}>"
            )));
        }
    }
    Ok(minkowski_diff(a, b)?.delta()? <= 2)
}
