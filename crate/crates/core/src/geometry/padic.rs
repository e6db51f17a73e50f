use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// An exact grid point `numerator / base^depth`.
///
/// Canonical form: the numerator is not divisible by the base unless the
/// depth is zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PAdicRational {
    numerator: BigInt,
    depth: u32,
    base: u32,
}

impl PAdicRational {
    pub fn new(numerator: impl Into<BigInt>, depth: u32, base: u32) -> Self {
        assert!(base >= 2, "base must be at least 2");
        let mut numerator = numerator.into();
        let mut depth = depth;
        let b = BigInt::from(base);
        while depth > 0 && !numerator.is_zero() && numerator.is_multiple_of(&b) {
            numerator /= &b;
            depth -= 1;
        }
        if numerator.is_zero() {
            depth = 0;
        }
        PAdicRational { numerator, depth, base }
    }

    pub fn integer(value: impl Into<BigInt>, base: u32) -> Self {
        Self::new(value, 0, base)
    }

    /// `Some` iff the reduced denominator of `x` is a power of `base`.
    pub fn from_rational(x: &BigRational, base: u32) -> Option<Self> {
        let (pow, cofactor) = split_denominator(x.denom(), base);
        cofactor.is_one().then(|| Self::new(x.numer().clone(), pow, base))
    }

    pub fn numerator(&self) -> &BigInt {
        &self.numerator
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.numerator.clone(), BigInt::from(self.base).pow(self.depth))
    }

    /// Numerator when written over `base^depth`, if `depth` is deep enough.
    pub fn numerator_at(&self, depth: u32) -> Option<BigInt> {
        (depth >= self.depth)
            .then(|| &self.numerator * BigInt::from(self.base).pow(depth - self.depth))
    }
}

impl PartialOrd for PAdicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.base != other.base {
            return None;
        }
        let depth = self.depth.max(other.depth);
        let a = self.numerator_at(depth)?;
        let b = other.numerator_at(depth)?;
        Some(a.cmp(&b))
    }
}

impl fmt::Display for PAdicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.depth == 0 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/{}^{}", self.numerator, self.base, self.depth)
        }
    }
}

/// Splits a positive denominator into `base^pow * cofactor` with the
/// cofactor not divisible by `base`.
pub(crate) fn split_denominator(den: &BigInt, base: u32) -> (u32, BigInt) {
    let b = BigInt::from(base);
    let mut pow = 0;
    let mut rest = den.abs();
    loop {
        let (q, r) = rest.div_rem(&b);
        if !r.is_zero() {
            break;
        }
        rest = q;
        pow += 1;
    }
    (pow, rest)
}

/// Lossless JSON form of an exact endpoint: `num / (den_cofactor * p^den_pow)`.
///
/// The cofactor is omitted when it is 1, which is the case for every grid
/// point and for the covers of digit sets whose extreme digits are
/// multiples of `p - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactPoint {
    pub num: String,
    pub den_pow: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub den_cofactor: Option<String>,
}

impl ExactPoint {
    pub fn from_rational(x: &BigRational, base: u32) -> Self {
        let (pow, cofactor) = split_denominator(x.denom(), base);
        ExactPoint {
            num: x.numer().to_string(),
            den_pow: pow,
            den_cofactor: (!cofactor.is_one()).then(|| cofactor.to_string()),
        }
    }

    pub fn to_rational(&self, base: u32) -> Result<BigRational, String> {
        let num: BigInt = self.num.parse().map_err(|e| format!("bad numerator {:?}: {e}", self.num))?;
        let cofactor: BigInt = match &self.den_cofactor {
            Some(c) => c.parse().map_err(|e| format!("bad cofactor {c:?}: {e}"))?,
            None => BigInt::one(),
        };
        if !cofactor.is_positive() {
            return Err(format!("cofactor must be positive, got {cofactor}"));
        }
        Ok(BigRational::new(num, cofactor * BigInt::from(base).pow(self.den_pow)))
    }
}
