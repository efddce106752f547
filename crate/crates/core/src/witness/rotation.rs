//! Irrational-looking rotations of the circle defeat the `C_0` property for
//! the diagonal action of constant products.

use num_traits::{One, Zero};

use crate::arith::{int, MeasureValue, Rational};
use crate::base::{BaseSet, GroupElement, Model};
use crate::error::{Error, Result};
use crate::product::{c0_eval, Rectangle, TailContext};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationReport {
    pub theta: Rational,
    /// `nu(theta A ∩ A)`.
    pub overlap: Rational,
    /// Per-coordinate factor `2 nu(theta A ∩ A)`.
    pub factor: Rational,
    pub depth: usize,
    /// `mu(theta B ∩ B)` through `depth` for `B = prod A`.
    pub truncated: Rational,
    pub infinite: MeasureValue,
    /// `mu(B ∩ B)`, the identity value.
    pub identity_infinite: MeasureValue,
}

/// Evaluates the constant product `B = prod_k A` against its rotation by `theta`.
pub fn rotation_counterexample(theta: &Rational, a: &BaseSet, depth: usize) -> Result<RotationReport> {
    if a.model() != Model::Circle {
        return Err(Error::ModelMismatch);
    }
    let g = GroupElement::rotate(theta.clone());
    let GroupElement::RotateBy(t) = &g else { unreachable!() };
    if t.is_zero() {
        return Err(Error::InvalidArgument("theta must not be an integer".into()));
    }
    let b = Rectangle::tail_only(TailContext::half(a.clone())?);
    let overlap = a.act(&g)?.intersection_measure(a)?;
    let v = c0_eval(&g, &b, &b, depth)?;
    let id = c0_eval(&GroupElement::identity(Model::Circle), &b, &b, depth)?;
    debug_assert_eq!(id.infinite, MeasureValue::Exact(Rational::one()));
    Ok(RotationReport {
        theta: t.clone(),
        factor: int(2) * &overlap,
        overlap,
        depth,
        truncated: v.truncated,
        infinite: v.infinite,
        identity_infinite: id.infinite,
    })
}
