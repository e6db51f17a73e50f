//! Exact finite-depth geometry of `A_p` for a digit set `A` with `|d| < p`.
//!
//! * [`cover`] gives a closed superset of `A_p` that shrinks with depth; its
//!   gaps are certified gaps of `A_p` (their endpoints belong to `A_p`).
//! * [`certified_intervals`] gives closed intervals proved to lie inside
//!   `A_p` from pairs of adjacent representable grid points.
//! * [`member`] decides `x ∈ A_p` for rational `x`.

mod grid;
mod intervals;
mod member;
mod padic;

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::digits::{DigitError, DigitSet};

pub(crate) use grid::{Grid, Scaled};
pub use intervals::{Gap, GapList, Interval, IntervalSet};
pub use member::{member, DigitWord, Membership, OutWitness};
pub use padic::{ExactPoint, PAdicRational};

/// Default cap on the number of intervals (or grid points) held at one depth.
pub const DEFAULT_INTERVAL_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Digits(#[from] DigitError),
    #[error("depth {depth}: {count} intervals exceed the budget of {limit}")]
    DepthTooLarge { depth: u32, count: usize, limit: usize },
    #[error("depth {depth} overflows the fixed-width grid arithmetic")]
    ArithmeticOverflow { depth: u32 },
}

impl GeometryError {
    /// True for errors caused by resource limits rather than bad input.
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, GeometryError::DepthTooLarge { .. } | GeometryError::ArithmeticOverflow { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverLimits {
    pub max_intervals: usize,
}

impl Default for CoverLimits {
    fn default() -> Self {
        CoverLimits { max_intervals: DEFAULT_INTERVAL_BUDGET }
    }
}

/// Hull of all tails `Σ_{i>n} x_i / p^i`:
/// `[min A / (p^n (p-1)), max A / (p^n (p-1))]`.
pub fn tail_hull(a: &DigitSet, n: u32) -> Interval {
    let unit = BigInt::from(a.base()).pow(n) * BigInt::from(a.base() - 1);
    Interval::new(
        BigRational::new(BigInt::from(a.min()), unit.clone()),
        BigRational::new(BigInt::from(a.max()), unit),
    )
}

pub fn cover(a: &DigitSet, n: u32) -> Result<IntervalSet, GeometryError> {
    cover_with(a, n, &CoverLimits::default())
}

/// Merged union of `x̄_n + tail_hull(A, n)` over all words of length `n`,
/// built level by level from merged intervals.
pub fn cover_with(a: &DigitSet, n: u32, limits: &CoverLimits) -> Result<IntervalSet, GeometryError> {
    let g = Grid::new(a, limits)?;
    g.to_interval_set(&g.cover(n)?)
}

/// Covers at every depth `0..=n`.
pub fn covers_upto(a: &DigitSet, n: u32, limits: &CoverLimits) -> Result<Vec<IntervalSet>, GeometryError> {
    let g = Grid::new(a, limits)?;
    g.covers(n)?.iter().map(|s| g.to_interval_set(s)).collect()
}

/// The same set as [`cover_with`], built instead from the distinct depth-`n`
/// grid points. Slower on dense sets; kept as an independent route.
pub fn cover_by_words(a: &DigitSet, n: u32, limits: &CoverLimits) -> Result<IntervalSet, GeometryError> {
    let g = Grid::new(a, limits)?;
    let points = g.points(n, None)?;
    g.to_interval_set(&Scaled { depth: n, ivs: g.cover_from_points(&points) })
}

pub fn gaps(a: &DigitSet, n: u32) -> Result<GapList, GeometryError> {
    gaps_with(a, n, &CoverLimits::default())
}

pub fn gaps_with(a: &DigitSet, n: u32, limits: &CoverLimits) -> Result<GapList, GeometryError> {
    Ok(cover_with(a, n, limits)?.gaps())
}

/// A word `(x_1..x_n) ∈ A^n` with `Σ x_i p^{n-i} = k`, if any.
///
/// Digits are peeled from the least significant end: the last digit must
/// be congruent to `k` mod `p`, which leaves at most two candidates, and
/// the remaining prefix must fit the range spanned by shorter words.
pub fn representable(a: &DigitSet, k: &BigInt, n: u32) -> Option<Vec<i64>> {
    let p = BigInt::from(a.base());
    let lo_digit = BigInt::from(a.min());
    let hi_digit = BigInt::from(a.max());
    // Span of Σ x_i p^{j-i} over words of length j is [min, max] * (p^j - 1)/(p - 1).
    let spans: Vec<(BigInt, BigInt)> = (0..=n)
        .map(|j| {
            let geo = (p.pow(j) - 1u32) / (&p - 1u32);
            (&lo_digit * &geo, &hi_digit * &geo)
        })
        .collect();
    let mut dead: HashSet<(BigInt, u32)> = HashSet::new();
    let mut word = Vec::with_capacity(n as usize);
    if search(a, &p, &spans, k.clone(), n, &mut dead, &mut word) {
        word.reverse();
        Some(word)
    } else {
        None
    }
}

fn search(
    a: &DigitSet,
    p: &BigInt,
    spans: &[(BigInt, BigInt)],
    k: BigInt,
    len: u32,
    dead: &mut HashSet<(BigInt, u32)>,
    word: &mut Vec<i64>,
) -> bool {
    let (lo, hi) = &spans[len as usize];
    if &k < lo || &k > hi {
        return false;
    }
    if len == 0 {
        return k.is_zero();
    }
    if dead.contains(&(k.clone(), len)) {
        return false;
    }
    let residue = k.mod_floor(p);
    for &d in a.digits() {
        if BigInt::from(d).mod_floor(p) != residue {
            continue;
        }
        let rest = (&k - d) / p;
        word.push(d);
        if search(a, p, spans, rest, len - 1, dead, word) {
            return true;
        }
        word.pop();
    }
    dead.insert((k, len));
    false
}

/// Both `k / p^n` and `(k+1) / p^n` are depth-`n` word values.
pub fn bi_obtainable(a: &DigitSet, k: &BigInt, n: u32) -> bool {
    representable(a, k, n).is_some() && representable(a, &(k + 1), n).is_some()
}

/// For every `k ∈ <0, p-1>`, `k ∈ A` or `k - p ∈ A`.
pub fn has_closure_property(a: &DigitSet) -> bool {
    let p = a.base() as i64;
    (0..p).all(|k| a.contains(k) || a.contains(k - p))
}

/// Union of `[k/p^n, (k+1)/p^n]` over bi-obtainable `k`.
///
/// Every returned interval lies in `A_p` when the closure property holds;
/// without it no certificate is issued and the result is empty.
pub fn certified_intervals(a: &DigitSet, n: u32) -> Result<IntervalSet, GeometryError> {
    certified_intervals_with(a, n, &CoverLimits::default())
}

pub fn certified_intervals_with(a: &DigitSet, n: u32, limits: &CoverLimits) -> Result<IntervalSet, GeometryError> {
    let g = Grid::new(a, limits)?;
    if !g.has_closure_property() {
        return Ok(IntervalSet::empty(a.base()));
    }
    let points = g.points(n, None)?;
    g.to_interval_set(&Scaled { depth: n, ivs: g.certified_from_points(&points) })
}

/// Membership of a gap or cover endpoint; see [`member`].
pub fn endpoint_membership(endpoint: &BigRational, a: &DigitSet) -> Result<Membership, GeometryError> {
    member(endpoint, a)
}

/// Grid numerators `k` of all depth-`n` word values `k / p^n`, sorted.
pub fn representable_points(a: &DigitSet, n: u32, limits: &CoverLimits) -> Result<Vec<BigInt>, GeometryError> {
    let g = Grid::new(a, limits)?;
    Ok(g.points(n, None)?.into_iter().map(BigInt::from).collect())
}

/// `|k| <= p^n`, the range where bi-obtainability is meaningful.
pub fn grid_index_in_range(a: &DigitSet, k: &BigInt, n: u32) -> bool {
    let bound = BigInt::from(a.base()).pow(n);
    k.abs() <= bound && k < &bound
}
