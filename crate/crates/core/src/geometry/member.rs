//! Exact decision procedure for `x ∈ A_p` with `x` rational.
//!
//! Write `x = a/b`. Choosing digits greedily defines residuals
//! `r_0 = x`, `r_{j+1} = p r_j - x_{j+1}`, and `x ∈ A_p` iff some infinite
//! digit sequence keeps every residual inside the tail hull
//! `[min A/(p-1), max A/(p-1)]`. Every residual has denominator `b` and a
//! bounded numerator, so the residual graph is finite: membership is the
//! existence of a reachable cycle. When there is none, the longest path
//! length `L` gives the exact depth `L + 1` at which `x` leaves the cover.

use std::cmp::Reverse;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::GeometryError;
use crate::digits::DigitSet;

/// An eventually periodic digit word `prefix (cycle)^∞`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigitWord {
    pub prefix: Vec<i64>,
    pub cycle: Vec<i64>,
}

impl DigitWord {
    /// `Σ x_i / p^i` evaluated exactly.
    pub fn value(&self, base: u32) -> BigRational {
        let p = BigInt::from(base);
        let mut prefix = BigRational::zero();
        let mut scale = BigRational::one();
        for &d in &self.prefix {
            scale /= BigRational::from_integer(p.clone());
            prefix += &scale * BigRational::from_integer(d.into());
        }
        if self.cycle.is_empty() {
            return prefix;
        }
        let mut block = BigInt::zero();
        for &d in &self.cycle {
            block = block * &p + d;
        }
        let period = BigRational::new(block, p.pow(self.cycle.len() as u32) - 1u32);
        prefix + scale * period
    }

    pub fn digits_in(&self, a: &DigitSet) -> bool {
        self.prefix.iter().chain(&self.cycle).all(|&d| a.contains(d))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum OutWitness {
    /// `x` lies outside `[min A/(p-1), max A/(p-1)]`.
    OutsideHull,
    /// Every residual path dies; `x ∉ cover(A, exclusion_depth)`.
    Exhausted { exclusion_depth: usize, states: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "member", content = "witness")]
pub enum Membership {
    In(DigitWord),
    Out(OutWitness),
}

impl Membership {
    pub fn is_in(&self) -> bool {
        matches!(self, Membership::In(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Membership::In(_) => "In",
            Membership::Out(_) => "Out",
        }
    }
}

const GRAY: u8 = 1;
const BLACK: u8 = 2;

struct Node {
    numer: BigInt,
    color: u8,
    longest: usize,
}

struct Frame {
    node: usize,
    /// Digit indices still to try, best last.
    pending: Vec<usize>,
    entered_by: i64,
}

pub fn member(x: &BigRational, a: &DigitSet) -> Result<Membership, GeometryError> {
    a.ensure_within_base()?;
    let p = BigInt::from(a.base());
    let q = &p - 1u32;
    let b = x.denom().clone();
    let lo = BigInt::from(a.min()) * &b;
    let hi = BigInt::from(a.max()) * &b;
    let in_hull = |c: &BigInt| {
        let scaled = c * &q;
        lo <= scaled && scaled <= hi
    };
    if !in_hull(x.numer()) {
        return Ok(Membership::Out(OutWitness::OutsideHull));
    }
    let digits: Vec<BigInt> = a.digits().iter().map(|&d| BigInt::from(d) * &b).collect();
    let mut nodes: Vec<Node> = vec![Node { numer: x.numer().clone(), color: GRAY, longest: 0 }];
    let mut index: HashMap<BigInt, usize> = HashMap::from([(x.numer().clone(), 0)]);
    // Children closest to the hull centre are tried first: they have the
    // most room to stay inside, so cycles tend to be found early.
    let centre = &lo + &hi;
    let order = |numer: &BigInt| -> Vec<usize> {
        let mut idx: Vec<usize> = (0..digits.len()).collect();
        idx.sort_by_cached_key(|&i| Reverse(((numer * &p - &digits[i]) * &q * 2u32 - &centre).abs()));
        idx
    };
    let mut stack = vec![Frame { node: 0, pending: order(x.numer()), entered_by: 0 }];

    while let Some(top) = stack.last_mut() {
        let node = top.node;
        let Some(di) = top.pending.pop() else {
            // All children are finished; none lies on a cycle.
            let numer = nodes[node].numer.clone();
            let mut longest = 0;
            for shifted in &digits {
                let child = &numer * &p - shifted;
                if let Some(&c) = index.get(&child) {
                    longest = longest.max(nodes[c].longest + 1);
                }
            }
            nodes[node].longest = longest;
            nodes[node].color = BLACK;
            stack.pop();
            continue;
        };
        let child = &nodes[node].numer * &p - &digits[di];
        if !in_hull(&child) {
            continue;
        }
        match index.get(&child) {
            Some(&c) if nodes[c].color == GRAY => {
                let start = stack.iter().position(|f| f.node == c).expect("gray nodes are on the stack");
                let prefix = stack[1..=start].iter().map(|f| f.entered_by).collect();
                let mut cycle: Vec<i64> = stack[start + 1..].iter().map(|f| f.entered_by).collect();
                cycle.push(a.digits()[di]);
                return Ok(Membership::In(DigitWord { prefix, cycle }));
            }
            Some(_) => {}
            None => {
                let id = nodes.len();
                let pending = order(&child);
                index.insert(child.clone(), id);
                nodes.push(Node { numer: child, color: GRAY, longest: 0 });
                stack.push(Frame { node: id, pending, entered_by: a.digits()[di] });
            }
        }
    }
    debug_assert!(nodes.iter().all(|n| n.color == BLACK));
    Ok(Membership::Out(OutWitness::Exhausted { exclusion_depth: nodes[0].longest + 1, states: nodes.len() }))
}
