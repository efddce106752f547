use std::fmt;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{fmt_rational, Rational};

use super::Model;

/// An element of the acting group: the integers (shifts) or the circle (rotations).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupElement {
    ShiftBy(i64),
    /// Rotation angle in turns, normalized to `[0, 1)`.
    RotateBy(Rational),
}

impl GroupElement {
    pub fn shift(d: i64) -> Self {
        GroupElement::ShiftBy(d)
    }

    pub fn rotate(theta: Rational) -> Self {
        GroupElement::RotateBy(frac(&theta))
    }

    pub fn identity(model: Model) -> Self {
        match model {
            Model::Bernoulli => GroupElement::ShiftBy(0),
            Model::Circle => GroupElement::RotateBy(Rational::zero()),
        }
    }

    pub fn model(&self) -> Model {
        match self {
            GroupElement::ShiftBy(_) => Model::Bernoulli,
            GroupElement::RotateBy(_) => Model::Circle,
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            GroupElement::ShiftBy(d) => *d == 0,
            GroupElement::RotateBy(t) => t.is_zero(),
        }
    }

    pub fn inverse(&self) -> Self {
        match self {
            GroupElement::ShiftBy(d) => GroupElement::ShiftBy(-d),
            GroupElement::RotateBy(t) => GroupElement::rotate(-t.clone()),
        }
    }

    /// Group product `self * other`; `None` across models.
    pub fn compose(&self, other: &GroupElement) -> Option<GroupElement> {
        match (self, other) {
            (GroupElement::ShiftBy(a), GroupElement::ShiftBy(b)) => Some(GroupElement::ShiftBy(a + b)),
            (GroupElement::RotateBy(a), GroupElement::RotateBy(b)) => Some(GroupElement::rotate(a + b)),
            _ => None,
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::ShiftBy(d) => write!(f, "{d}"),
            GroupElement::RotateBy(t) => write!(f, "{}", fmt_rational(t)),
        }
    }
}

/// Fractional part in `[0, 1)`.
pub(crate) fn frac(t: &Rational) -> Rational {
    let fl = t.numer().div_floor(t.denom());
    let r = t - Rational::from_integer(fl);
    debug_assert!(r >= Rational::zero() && r < Rational::one());
    r
}

/// A symmetric compact neighbourhood of the identity.
///
/// For the integers, `Radius(r)` is `{-r, ..., r}`; the circle is compact, so
/// its only window is the whole group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CompactWindow {
    Radius(u64),
    WholeCircle,
}

impl CompactWindow {
    pub fn radius(r: u64) -> Self {
        CompactWindow::Radius(r)
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        match (self, g) {
            (CompactWindow::Radius(r), GroupElement::ShiftBy(d)) => d.unsigned_abs() <= *r,
            (CompactWindow::WholeCircle, GroupElement::RotateBy(_)) => true,
            _ => false,
        }
    }

    /// Elements of an integer window in the order `0, -1, 1, -2, 2, ...`.
    pub fn shifts(&self) -> Vec<i64> {
        match self {
            CompactWindow::Radius(r) => {
                let mut v = vec![0];
                for d in 1..=*r as i64 {
                    v.push(-d);
                    v.push(d);
                }
                v
            }
            CompactWindow::WholeCircle => Vec::new(),
        }
    }

    pub fn is_subset_of(&self, other: &CompactWindow) -> bool {
        match (self, other) {
            (CompactWindow::Radius(a), CompactWindow::Radius(b)) => a <= b,
            (CompactWindow::WholeCircle, CompactWindow::WholeCircle) => true,
            _ => false,
        }
    }
}
