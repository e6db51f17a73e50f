//! Closed-form topological classification of `C(l1,r1,p) - C(l2,r2,p)`.
//!
//! `C(l, r, p)` keeps the `l` leftmost and `r` rightmost of the `p`
//! subintervals at every step of the construction, i.e. it is `A(l,r,p)_p`
//! with `A(l,r,p) = <0, l-1> ∪ <p-r, p-1>`. The difference of two such sets is
//! always one of five shapes and the shape is decided by five linear
//! inequalities in the parameters.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::digits::{self, DigitError, DigitSet, IntRange};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("invalid parameters: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Digits(#[from] DigitError),
}

/// Parameters of a single S-Cantor set `C(l, r, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SCantorSpec {
    pub l: u32,
    pub r: u32,
    pub p: u32,
}

impl SCantorSpec {
    pub fn new(l: u32, r: u32, p: u32) -> Result<Self, SpecError> {
        let spec = SCantorSpec { l, r, p };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        if self.p <= 2 {
            return Err(SpecError::InvalidSpec(format!("p must exceed 2, got {}", self.p)));
        }
        if self.l < 1 || self.r < 1 {
            return Err(SpecError::InvalidSpec(format!(
                "l and r must be at least 1, got l={} r={}",
                self.l, self.r
            )));
        }
        if self.l as u64 + self.r as u64 >= self.p as u64 {
            return Err(SpecError::InvalidSpec(format!(
                "need l + r < p, got {} + {} >= {}",
                self.l, self.r, self.p
            )));
        }
        Ok(())
    }
}

/// Parameters of the difference `C(l1,r1,p) - C(l2,r2,p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DiffSpec {
    pub l1: u32,
    pub r1: u32,
    pub l2: u32,
    pub r2: u32,
    pub p: u32,
}

impl DiffSpec {
    pub fn new(l1: u32, r1: u32, l2: u32, r2: u32, p: u32) -> Result<Self, SpecError> {
        let spec = DiffSpec { l1, r1, l2, r2, p };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        self.first().validate()?;
        self.second().validate()
    }

    pub fn first(&self) -> SCantorSpec {
        SCantorSpec { l: self.l1, r: self.r1, p: self.p }
    }

    pub fn second(&self) -> SCantorSpec {
        SCantorSpec { l: self.l2, r: self.r2, p: self.p }
    }

    /// The spec of `C(l2,r2,p) - C(l1,r1,p)`, the negated set.
    pub fn swapped(&self) -> DiffSpec {
        DiffSpec { l1: self.l2, r1: self.r2, l2: self.l1, r2: self.r1, p: self.p }
    }

    /// Sort key `(p, l1, r1, l2, r2)`, the order used by [`DiffSpec::enumerate`].
    pub fn key(&self) -> (u32, u32, u32, u32, u32) {
        (self.p, self.l1, self.r1, self.l2, self.r2)
    }

    /// Every valid spec with `3 <= p <= p_max`, ordered by `(p, l1, r1, l2, r2)`.
    pub fn enumerate(p_max: u32) -> Vec<DiffSpec> {
        let mut out = Vec::new();
        for p in 3..=p_max {
            let pairs: Vec<(u32, u32)> =
                (1..p).flat_map(|l| (1..p - l).map(move |r| (l, r))).collect();
            for &(l1, r1) in &pairs {
                for &(l2, r2) in &pairs {
                    out.push(DiffSpec { l1, r1, l2, r2, p });
                }
            }
        }
        out
    }

    /// `A(l1,r1,p) - A(l2,r2,p)`.
    pub fn difference_digits(&self) -> Result<DigitSet, SpecError> {
        Ok(digits::minkowski_diff(&a_set(self.first())?, &a_set(self.second())?)?)
    }
}

impl fmt::Display for DiffSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C({},{},{}) - C({},{},{})", self.l1, self.r1, self.p, self.l2, self.r2, self.p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TopologicalType {
    FullInterval,
    CantorSet,
    LCantorval,
    RCantorval,
    MCantorval,
}

impl TopologicalType {
    pub const ALL: [TopologicalType; 5] = [
        TopologicalType::FullInterval,
        TopologicalType::CantorSet,
        TopologicalType::LCantorval,
        TopologicalType::RCantorval,
        TopologicalType::MCantorval,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TopologicalType::FullInterval => "FullInterval",
            TopologicalType::CantorSet => "CantorSet",
            TopologicalType::LCantorval => "LCantorval",
            TopologicalType::RCantorval => "RCantorval",
            TopologicalType::MCantorval => "MCantorval",
        }
    }
}

impl fmt::Display for TopologicalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TopologicalType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TopologicalType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown type {s:?}"))
    }
}

/// Truth values of the five parameter inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConditionProfile {
    pub s1: bool,
    pub s2: bool,
    pub s3: bool,
    pub s1_star: bool,
    pub s2_star: bool,
}

impl ConditionProfile {
    /// The five combinations deciding the type, in order
    /// (full, Cantor, L, R, M). Exactly one is true.
    pub fn branches(&self) -> [bool; 5] {
        let full = self.s1 && self.s2;
        [
            full,
            self.s3,
            self.s1_star && !self.s2,
            self.s2_star && !self.s1,
            !self.s1_star && !self.s2_star && !self.s3 && !full,
        ]
    }

    pub fn implications_hold(&self) -> bool {
        (!self.s1_star || self.s1) && (!self.s2_star || self.s2) && (!self.s3 || (!self.s1 && !self.s2))
    }
}

/// `A(l, r, p) = <0, l-1> ∪ <p-r, p-1>`.
pub fn a_set(spec: SCantorSpec) -> Result<DigitSet, SpecError> {
    spec.validate()?;
    let (l, r, p) = (spec.l as i64, spec.r as i64, spec.p as i64);
    let digits = IntRange::new(0, l - 1).iter().chain(IntRange::new(p - r, p - 1).iter());
    Ok(DigitSet::new(spec.p, digits)?)
}

pub fn conditions(spec: DiffSpec) -> Result<ConditionProfile, SpecError> {
    spec.validate()?;
    let DiffSpec { l1, r1, l2, r2, p } = spec;
    let (l1, r1, l2, r2, p) = (l1 as u64, r1 as u64, l2 as u64, r2 as u64, p as u64);
    Ok(ConditionProfile {
        s1: l1 + l2 + r2 >= p || l1 + r1 + r2 >= p,
        s2: l1 + r1 + l2 >= p || r1 + l2 + r2 >= p,
        s3: l1 + r1 + l2 + r2 <= p,
        s1_star: l1 + l2 + r2 > p || l1 + r1 + r2 > p,
        s2_star: l1 + r1 + l2 > p || r1 + l2 + r2 > p,
    })
}

/// The two runs of digits missing from `A - B` inside `<-p+1, p-1>`:
/// `L = <l1+r2-p, min(-l2,-r1)>` and `R = <max(l1,r2), p-r1-l2>`.
pub fn lr_blocks(spec: DiffSpec) -> Result<(IntRange, IntRange), SpecError> {
    spec.validate()?;
    let DiffSpec { l1, r1, l2, r2, p } = spec;
    let (l1, r1, l2, r2, p) = (l1 as i64, r1 as i64, l2 as i64, r2 as i64, p as i64);
    let left = IntRange::new(l1 + r2 - p, (-l2).min(-r1));
    let right = IntRange::new(l1.max(r2), p - r1 - l2);
    Ok((left, right))
}

pub fn classify(spec: DiffSpec) -> Result<TopologicalType, SpecError> {
    let profile = conditions(spec)?;
    let branches = profile.branches();
    debug_assert_eq!(branches.iter().filter(|&&b| b).count(), 1);
    let idx = branches.iter().position(|&b| b).expect("branches cover every spec");
    Ok(TopologicalType::ALL[idx])
}

/// Type of the negated set.
pub fn mirror(t: TopologicalType) -> TopologicalType {
    match t {
        TopologicalType::LCantorval => TopologicalType::RCantorval,
        TopologicalType::RCantorval => TopologicalType::LCantorval,
        other => other,
    }
}

/// Type of `C(l,r,p) - C(l,r,p)`.
pub fn classify_self(spec: SCantorSpec) -> Result<TopologicalType, SpecError> {
    classify(DiffSpec { l1: spec.l, r1: spec.r, l2: spec.l, r2: spec.r, p: spec.p })
}

/// Type of `C(l1,l1,p) - C(l2,l2,p)` for symmetric sets.
pub fn classify_symmetric(l1: u32, l2: u32, p: u32) -> Result<TopologicalType, SpecError> {
    classify(DiffSpec::new(l1, l1, l2, l2, p)?)
}

/// Type of `C(l,l,p) - C(l,l,p)` from the ratio `l/p` alone:
/// at least 1/3 gives the interval, at most 1/4 a Cantor set, M-Cantorval
/// strictly between.
pub fn kraft_classify(l: u32, p: u32) -> Result<TopologicalType, SpecError> {
    SCantorSpec::new(l, l, p)?;
    let (l, p) = (l as u64, p as u64);
    Ok(if 3 * l >= p {
        TopologicalType::FullInterval
    } else if 4 * l <= p {
        TopologicalType::CantorSet
    } else {
        TopologicalType::MCantorval
    })
}
