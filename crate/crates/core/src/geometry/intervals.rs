use std::fmt;

use num_rational::BigRational;

use super::padic::ExactPoint;

/// A closed interval `[lo, hi]` with exact endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Interval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn length(&self) -> BigRational {
        &self.hi - &self.lo
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// An open interval `(lo, hi)` known to miss the set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gap {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Gap {
    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo < x && x < &self.hi
    }
}

impl fmt::Display for Gap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

/// Sorted, pairwise disjoint, non-touching closed intervals over one base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalSet {
    base: u32,
    intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty(base: u32) -> Self {
        IntervalSet { base, intervals: Vec::new() }
    }

    /// Sorts and merges arbitrary closed intervals; touching intervals merge.
    pub fn from_intervals(base: u32, mut raw: Vec<Interval>) -> Self {
        raw.sort_by(|a, b| a.lo.cmp(&b.lo));
        let mut intervals: Vec<Interval> = Vec::with_capacity(raw.len());
        for iv in raw {
            match intervals.last_mut() {
                Some(last) if iv.lo <= last.hi => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                }
                _ => intervals.push(iv),
            }
        }
        IntervalSet { base, intervals }
    }

    pub(crate) fn from_sorted_merged(base: u32, intervals: Vec<Interval>) -> Self {
        debug_assert!(intervals.windows(2).all(|w| w[0].hi < w[1].lo));
        IntervalSet { base, intervals }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Smallest closed interval containing the set.
    pub fn hull(&self) -> Option<Interval> {
        let first = self.intervals.first()?;
        let last = self.intervals.last()?;
        Some(Interval::new(first.lo.clone(), last.hi.clone()))
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        let idx = self.intervals.partition_point(|iv| &iv.hi < x);
        self.intervals.get(idx).is_some_and(|iv| iv.contains(x))
    }

    pub fn contains_interval(&self, target: &Interval) -> bool {
        let idx = self.intervals.partition_point(|iv| iv.hi < target.lo);
        self.intervals.get(idx).is_some_and(|iv| iv.contains_interval(target))
    }

    pub fn is_subset_of(&self, other: &IntervalSet) -> bool {
        self.intervals.iter().all(|iv| other.contains_interval(iv))
    }

    /// The bounded complementary components, left to right.
    pub fn gaps(&self) -> GapList {
        let gaps = self
            .intervals
            .windows(2)
            .map(|w| Gap { lo: w[0].hi.clone(), hi: w[1].lo.clone() })
            .collect();
        GapList { base: self.base, gaps, hull: self.hull() }
    }

    pub fn to_json(&self) -> Vec<[ExactPoint; 2]> {
        self.intervals
            .iter()
            .map(|iv| {
                [ExactPoint::from_rational(&iv.lo, self.base), ExactPoint::from_rational(&iv.hi, self.base)]
            })
            .collect()
    }

    pub fn from_json(base: u32, raw: &[[ExactPoint; 2]]) -> Result<Self, String> {
        let mut intervals = Vec::with_capacity(raw.len());
        for [lo, hi] in raw {
            let lo = lo.to_rational(base)?;
            let hi = hi.to_rational(base)?;
            if lo > hi {
                return Err(format!("interval endpoints out of order: {lo} > {hi}"));
            }
            intervals.push(Interval::new(lo, hi));
        }
        Ok(Self::from_intervals(base, intervals))
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "∅");
        }
        for (i, iv) in self.intervals.iter().enumerate() {
            if i > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "{iv}")?;
        }
        Ok(())
    }
}

/// Gaps between consecutive cover intervals, with the cover's hull.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapList {
    pub base: u32,
    pub gaps: Vec<Gap>,
    pub hull: Option<Interval>,
}

impl GapList {
    pub fn len(&self) -> usize {
        self.gaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaps.is_empty()
    }

    pub fn to_json(&self) -> Vec<[ExactPoint; 2]> {
        self.gaps
            .iter()
            .map(|g| [ExactPoint::from_rational(&g.lo, self.base), ExactPoint::from_rational(&g.hi, self.base)])
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn iv(a: (i64, i64), b: (i64, i64)) -> Interval {
        Interval::new(rat(a.0, a.1), rat(b.0, b.1))
    }

    #[test]
    fn merging_joins_touching_intervals() {
        let set = IntervalSet::from_intervals(
            3,
            vec![iv((2, 3), (1, 1)), iv((0, 1), (1, 3)), iv((1, 3), (4, 9))],
        );
        assert_eq!(set.intervals(), &[iv((0, 1), (4, 9)), iv((2, 3), (1, 1))]);
        assert!(set.contains(&rat(1, 3)));
        assert!(!set.contains(&rat(1, 2)));
        assert!(set.contains_interval(&iv((7, 9), (8, 9))));
        assert!(!set.contains_interval(&iv((4, 9), (7, 9))));
        let gaps = set.gaps();
        assert_eq!(gaps.gaps, vec![Gap { lo: rat(4, 9), hi: rat(2, 3) }]);
        assert!(gaps.gaps[0].contains(&rat(1, 2)));
        assert!(!gaps.gaps[0].contains(&rat(2, 3)));
    }

    #[test]
    fn json_round_trip() {
        let set = IntervalSet::from_intervals(5, vec![iv((-1, 1), (-3, 5)), iv((-1, 5), (1, 1))]);
        let json = serde_json::to_string(&set.to_json()).unwrap();
        assert_eq!(
            json,
            r#"[[{"num":"-1","den_pow":0},{"num":"-3","den_pow":1}],[{"num":"-1","den_pow":1},{"num":"1","den_pow":0}]]"#
        );
        let raw: Vec<[ExactPoint; 2]> = serde_json::from_str(&json).unwrap();
        assert_eq!(IntervalSet::from_json(5, &raw).unwrap(), set);
    }

    #[test]
    fn subset_check() {
        let big = IntervalSet::from_intervals(3, vec![iv((0, 1), (1, 1))]);
        let small = IntervalSet::from_intervals(3, vec![iv((0, 1), (1, 3)), iv((2, 3), (1, 1))]);
        assert!(small.is_subset_of(&big));
        assert!(!big.is_subset_of(&small));
        assert!(IntervalSet::empty(3).is_subset_of(&small));
    }
}
