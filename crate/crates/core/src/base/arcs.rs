use num_traits::{One, Zero};

use crate::arith::Rational;
use crate::error::{Error, Result};

use super::group::frac;

/// A finite union of half-open arcs `[a, b)` of the circle `R/Z`, stored as
/// sorted, pairwise disjoint, non-adjacent intervals with `0 <= a < b <= 1`.
///
/// An arc through the origin is held as two intervals `[a, 1)` and `[0, b)`;
/// this keeps the representation unique without wrapping intervals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArcUnion {
    arcs: Vec<(Rational, Rational)>,
}

impl ArcUnion {
    pub fn empty() -> Self {
        ArcUnion { arcs: Vec::new() }
    }

    pub fn full() -> Self {
        ArcUnion {
            arcs: vec![(Rational::zero(), Rational::one())],
        }
    }

    /// Accepts possibly overlapping arcs with `0 <= a < b <= 1` and normalizes.
    pub fn new(arcs: Vec<(Rational, Rational)>) -> Result<Self> {
        for (a, b) in &arcs {
            if a < &Rational::zero() || b > &Rational::one() || a >= b {
                return Err(Error::InvalidSet(format!("arc [{a}, {b}) outside [0, 1] or empty")));
            }
        }
        Ok(Self::normalize(arcs))
    }

    fn normalize(mut arcs: Vec<(Rational, Rational)>) -> Self {
        arcs.sort();
        let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(arcs.len());
        for (a, b) in arcs {
            match out.last_mut() {
                Some(last) if a <= last.1 => {
                    if b > last.1 {
                        last.1 = b;
                    }
                }
                _ => out.push((a, b)),
            }
        }
        ArcUnion { arcs: out }
    }

    pub fn arcs(&self) -> &[(Rational, Rational)] {
        &self.arcs
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn measure(&self) -> Rational {
        self.arcs.iter().map(|(a, b)| b - a).sum()
    }

    pub fn contains(&self, p: &Rational) -> bool {
        self.arcs.iter().any(|(a, b)| a <= p && p < b)
    }

    pub fn rotated(&self, theta: &Rational) -> Self {
        let mut out = Vec::with_capacity(self.arcs.len() + 1);
        for (a, b) in &self.arcs {
            let len = b - a;
            let start = frac(&(a + theta));
            let end = &start + &len;
            if end > Rational::one() {
                out.push((start, Rational::one()));
                out.push((Rational::zero(), end - Rational::one()));
            } else {
                out.push((start, end));
            }
        }
        Self::normalize(out)
    }

    /// Pointwise boolean combination via a sweep over all breakpoints.
    /// Membership is constant on each `[p_i, p_{i+1})` and decided at `p_i`.
    pub(crate) fn combine(&self, other: &ArcUnion, op: impl Fn(bool, bool) -> bool) -> Self {
        let mut points: Vec<Rational> = vec![Rational::zero(), Rational::one()];
        for (a, b) in self.arcs.iter().chain(other.arcs.iter()) {
            points.push(a.clone());
            points.push(b.clone());
        }
        points.sort();
        points.dedup();
        let mut out = Vec::new();
        for w in points.windows(2) {
            if op(self.contains(&w[0]), other.contains(&w[0])) {
                out.push((w[0].clone(), w[1].clone()));
            }
        }
        Self::normalize(out)
    }
}
