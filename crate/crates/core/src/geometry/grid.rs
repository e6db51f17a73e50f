//! Fixed-width integer kernel behind the public geometry API.
//!
//! At depth `n` every quantity is an integer multiple of `1 / (p^n (p-1))`,
//! the "cover unit". In that unit the tail hull of a depth-`n` word is just
//! `[min A, max A]` and the word interval of a grid point `k / p^n` is
//! `[k(p-1) + min A, k(p-1) + max A]`.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::intervals::{Interval, IntervalSet};
use super::{CoverLimits, GeometryError};
use crate::digits::DigitSet;

/// Closed intervals in cover units at `depth`, sorted and merged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Scaled {
    pub depth: u32,
    pub ivs: Vec<(i128, i128)>,
}

#[derive(Debug, Clone)]
pub(crate) struct Grid {
    pub base: u32,
    pub p: i128,
    pub q: i128,
    pub digits: Vec<i128>,
    pub min: i128,
    pub max: i128,
    pub limit: usize,
}

impl Grid {
    pub fn new(a: &DigitSet, limits: &CoverLimits) -> Result<Self, GeometryError> {
        a.ensure_within_base()?;
        let p = a.base() as i128;
        Ok(Grid {
            base: a.base(),
            p,
            q: p - 1,
            digits: a.digits().iter().map(|&d| d as i128).collect(),
            min: a.min() as i128,
            max: a.max() as i128,
            limit: limits.max_intervals,
        })
    }

    /// `p^e`, refusing values too large to leave headroom for scaled sums.
    pub fn pow(&self, e: u32) -> Result<i128, GeometryError> {
        let headroom = i128::MAX / (4 * self.p * self.p);
        let mut acc: i128 = 1;
        for _ in 0..e {
            acc = acc
                .checked_mul(self.p)
                .filter(|v| *v <= headroom)
                .ok_or(GeometryError::ArithmeticOverflow { depth: e })?;
        }
        Ok(acc)
    }

    /// `p^depth (p-1)`.
    pub fn unit(&self, depth: u32) -> Result<i128, GeometryError> {
        Ok(self.pow(depth)? * self.q)
    }

    fn check_budget(&self, depth: u32, count: usize) -> Result<(), GeometryError> {
        if count > self.limit {
            Err(GeometryError::DepthTooLarge { depth, count, limit: self.limit })
        } else {
            Ok(())
        }
    }

    pub fn word_interval(&self, k: i128) -> (i128, i128) {
        (k * self.q + self.min, k * self.q + self.max)
    }

    pub fn hull_cover(&self) -> Scaled {
        Scaled { depth: 0, ivs: vec![(self.min, self.max)] }
    }

    /// `merge(∪_d (d + C) / p)`.
    pub fn refine(&self, prev: &Scaled) -> Result<Scaled, GeometryError> {
        let depth = prev.depth + 1;
        let shift = self.unit(prev.depth)?;
        self.unit(depth)?;
        let sources = self.digits.iter().map(|&d| {
            let off = d * shift;
            prev.ivs.iter().map(move |&(a, b)| (a + off, b + off))
        });
        let mut out: Vec<(i128, i128)> = Vec::with_capacity(prev.ivs.len());
        let mut err = None;
        kway_merge(sources.collect(), |(a, b)| {
            if err.is_some() {
                return;
            }
            match out.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => {
                    out.push((a, b));
                    if out.len() > self.limit {
                        err = Some(GeometryError::DepthTooLarge {
                            depth,
                            count: out.len(),
                            limit: self.limit,
                        });
                    }
                }
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(Scaled { depth, ivs: out }),
        }
    }

    /// Covers at depths `0..=n`.
    pub fn covers(&self, n: u32) -> Result<Vec<Scaled>, GeometryError> {
        let mut levels = vec![self.hull_cover()];
        for _ in 0..n {
            let next = self.refine(levels.last().expect("nonempty"))?;
            levels.push(next);
        }
        Ok(levels)
    }

    pub fn cover(&self, n: u32) -> Result<Scaled, GeometryError> {
        let mut cur = self.hull_cover();
        for _ in 0..n {
            cur = self.refine(&cur)?;
        }
        Ok(cur)
    }

    /// Sorted integers `k` with `k / p^n` a depth-`n` word value.
    ///
    /// With a window `[lo, hi]` (cover units at depth `n`), only prefixes whose
    /// descendants can reach the window are expanded; every `k` whose word
    /// interval or grid point meets the window is returned, possibly with a
    /// few extra.
    pub fn points(&self, n: u32, window: Option<(i128, i128)>) -> Result<Vec<i128>, GeometryError> {
        match window {
            Some(w) => self.points_in(n, Some(&[w])),
            None => self.points_in(n, None),
        }
    }

    /// As [`Grid::points`] with several sorted, disjoint windows.
    pub fn points_in(&self, n: u32, windows: Option<&[(i128, i128)]>) -> Result<Vec<i128>, GeometryError> {
        self.unit(n)?;
        let ext_lo = self.min.min(0);
        let ext_hi = self.max.max(0);
        let meets = |lo: i128, hi: i128| match windows {
            None => true,
            Some(ws) => {
                let idx = ws.partition_point(|w| w.1 < lo);
                ws.get(idx).is_some_and(|w| w.0 <= hi)
            }
        };
        let mut cur: Vec<i128> = vec![0];
        for j in 1..=n {
            let scale = self.pow(n - j)?;
            let sources = self.digits.iter().map(|&d| cur.iter().map(move |&k| k * self.p + d));
            let mut next: Vec<i128> = Vec::with_capacity(cur.len());
            let mut over = false;
            kway_merge(sources.collect(), |k| {
                if over || next.last() == Some(&k) {
                    return;
                }
                if !meets((k * self.q + ext_lo) * scale, (k * self.q + ext_hi) * scale) {
                    return;
                }
                next.push(k);
                over = next.len() > self.limit;
            });
            if over {
                return Err(GeometryError::DepthTooLarge { depth: j, count: next.len(), limit: self.limit });
            }
            cur = next;
        }
        self.check_budget(n, cur.len())?;
        Ok(cur)
    }

    /// Merged word intervals of sorted grid points (cover units).
    pub fn cover_from_points(&self, points: &[i128]) -> Vec<(i128, i128)> {
        let mut out: Vec<(i128, i128)> = Vec::new();
        for &k in points {
            let (a, b) = self.word_interval(k);
            match out.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => out.push((a, b)),
            }
        }
        out
    }

    /// Merged `[k, k+1] / p^n` over consecutive grid points, in cover units.
    pub fn certified_from_points(&self, points: &[i128]) -> Vec<(i128, i128)> {
        let mut out: Vec<(i128, i128)> = Vec::new();
        for w in points.windows(2) {
            if w[1] != w[0] + 1 {
                continue;
            }
            let (a, b) = (w[0] * self.q, w[1] * self.q);
            match out.last_mut() {
                Some(last) if a <= last.1 => last.1 = b,
                _ => out.push((a, b)),
            }
        }
        out
    }

    pub fn has_closure_property(&self) -> bool {
        (0..self.p).all(|k| self.digits.binary_search(&k).is_ok() || self.digits.binary_search(&(k - self.p)).is_ok())
    }

    pub fn to_rational(&self, x: i128, depth: u32) -> Result<BigRational, GeometryError> {
        Ok(BigRational::new(BigInt::from(x), BigInt::from(self.unit(depth)?)))
    }

    pub fn to_interval_set(&self, scaled: &Scaled) -> Result<IntervalSet, GeometryError> {
        let unit = BigInt::from(self.unit(scaled.depth)?);
        let intervals = scaled
            .ivs
            .iter()
            .map(|&(a, b)| {
                Interval::new(
                    BigRational::new(BigInt::from(a), unit.clone()),
                    BigRational::new(BigInt::from(b), unit.clone()),
                )
            })
            .collect();
        Ok(IntervalSet::from_sorted_merged(self.base, intervals))
    }
}

/// Feeds the items of several individually sorted sources to `sink` in
/// globally sorted order.
fn kway_merge<T, I, F>(sources: Vec<I>, mut sink: F)
where
    T: Ord + Copy,
    I: Iterator<Item = T>,
    F: FnMut(T),
{
    let mut sources = sources;
    let mut heap = BinaryHeap::with_capacity(sources.len());
    for (i, src) in sources.iter_mut().enumerate() {
        if let Some(x) = src.next() {
            heap.push(Reverse((x, i)));
        }
    }
    while let Some(Reverse((x, i))) = heap.pop() {
        sink(x);
        if let Some(y) = sources[i].next() {
            heap.push(Reverse((y, i)));
        }
    }
}
