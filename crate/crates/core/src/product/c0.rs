//! Matrix coefficients `mu(gA ∩ B)` of the diagonal action and their decay.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::{int, MeasureValue, Rational};
use crate::base::{mixing_threshold, CompactWindow, GroupElement, Model};
use crate::error::{Error, Result};
use crate::invariance::overlap;

use super::{rect_measure, Rectangle, TailContext};

/// `mu(gA ∩ B)` at a finite depth and for the infinite product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct C0Value {
    /// `prod_{k<=D} 2 nu(gA_k ∩ B_k)`.
    pub truncated: Rational,
    pub infinite: MeasureValue,
}

fn factor_at(g: &GroupElement, a: &Rectangle, b: &Rectangle, k: usize) -> Result<Rational> {
    let ga = a.factor(k)?.act(g)?;
    Ok(int(2) * ga.intersection_measure(&b.factor(k)?)?)
}

/// Evaluates `mu(gA ∩ B)` through depth `depth` and certifies the infinite value.
///
/// With half-measure tails every tail factor equals `c = 2 nu(gT_A ∩ T_B) <= 1`,
/// so the infinite product is exactly `0` when `c < 1` and the head product
/// when `c = 1`. With schedule tails the factors beyond the schedule's range
/// are bounded below only inside the certified window `|d| <= m`.
pub fn c0_eval(g: &GroupElement, a: &Rectangle, b: &Rectangle, depth: usize) -> Result<C0Value> {
    if a.model() != b.model() || g.model() != a.model() {
        return Err(Error::ModelMismatch);
    }
    let heads = a.head().len().max(b.head().len());
    if depth < heads {
        return Err(Error::DepthTooSmall { needed: heads, depth });
    }
    match (a.tail(), b.tail()) {
        (TailContext::Half(ta), TailContext::Half(tb)) => {
            let mut head_product = Rational::one();
            for k in 1..=heads {
                head_product *= factor_at(g, a, b, k)?;
            }
            let c = int(2) * ta.act(g)?.intersection_measure(tb)?;
            let tail_len = (depth - heads) as i32;
            let truncated = &head_product * c.pow(tail_len);
            let infinite = if c < Rational::one() {
                MeasureValue::Exact(Rational::zero())
            } else {
                MeasureValue::Exact(head_product)
            };
            Ok(C0Value { truncated, infinite })
        }
        (
            TailContext::Schedule {
                schedule: sa,
                m: ma,
                shift: xa,
            },
            TailContext::Schedule {
                schedule: sb,
                m: mb,
                shift: xb,
            },
        ) if sa == sb && ma == mb => {
            let GroupElement::ShiftBy(d) = g else {
                return Err(Error::ModelMismatch);
            };
            let k_max = sa.k_max();
            if depth > k_max {
                return Err(Error::ScheduleIndexOutOfRange { k: depth, m: *ma });
            }
            let offset = (d + xa - xb).unsigned_abs();
            let tail_factor = |k: usize| -> Result<Rational> { Ok(int(2) * overlap(sa.n(k, *ma)?, offset)) };
            let mut truncated = Rational::one();
            for k in 1..=depth {
                truncated *= if k <= heads {
                    factor_at(g, a, b, k)?
                } else {
                    tail_factor(k)?
                };
            }
            let mut through_kmax = truncated.clone();
            for k in depth + 1..=k_max {
                through_kmax *= if k <= heads {
                    factor_at(g, a, b, k)?
                } else {
                    tail_factor(k)?
                };
            }
            let infinite = if offset == 0 && heads <= k_max {
                MeasureValue::Exact(through_kmax)
            } else if offset <= *ma {
                let lo = &through_kmax * sa.beyond_lower(*ma)?;
                MeasureValue::interval(lo, through_kmax)?
            } else {
                MeasureValue::interval(Rational::zero(), through_kmax)?
            };
            Ok(C0Value { truncated, infinite })
        }
        _ => Err(Error::TailMismatch),
    }
}

/// A window outside of which the truncated coefficient is at most `epsilon`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct C0Threshold {
    pub window: CompactWindow,
    /// Number of consecutive tail factors the bound controls.
    pub controlled_factors: usize,
    /// Index of the first controlled factor.
    pub first_controlled: usize,
    /// Per-factor contraction beyond the mixing threshold.
    pub delta: Rational,
    /// The exhaustive scan covered every `radius < |g| <= scanned_to`; beyond
    /// `scanned_to` all factors are in their mixed regime and constant.
    pub scanned_to: u64,
}

/// Constructs the decay window from mixing thresholds.
///
/// Beyond the heads both rectangles have half-measure tails. For
/// `|g| >= thr(T_A, T_B)` each tail factor mixes exactly to
/// `2 nu(T_A) nu(T_B) = 1/2`, while head factors are bounded by `2 nu(A_k)`.
/// Hence `mu(gA ∩ B) <= mu(A) (1/2)^j` once `j` tail factors are controlled;
/// the least `j` with `mu(A) / 2^j <= epsilon` must fit inside the depth.
/// The result is then checked by scanning every `g` up to the point where
/// every factor pair is mixed.
pub fn c0_threshold(a: &Rectangle, b: &Rectangle, epsilon: &Rational, depth: usize) -> Result<C0Threshold> {
    if a.model() != Model::Bernoulli || b.model() != Model::Bernoulli {
        return Err(Error::NotBernoulli);
    }
    let (TailContext::Half(ta), TailContext::Half(tb)) = (a.tail(), b.tail()) else {
        return Err(Error::TailMismatch);
    };
    if epsilon <= &Rational::zero() {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    let mu_a = rect_measure(a);
    if mu_a.is_zero() {
        return Err(Error::InvalidArgument("mu(A) must be positive".into()));
    }
    let heads = a.head().len().max(b.head().len());
    if depth < heads {
        return Err(Error::DepthTooSmall { needed: heads, depth });
    }
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let first_controlled = heads + 1;

    let (radius, controlled) = if epsilon >= &mu_a.clone().min(rect_measure(b)) {
        // every factor is bounded by 2 nu(A_k) and by 2 nu(B_k)
        (0, 0)
    } else {
        let mut j = 0usize;
        let mut bound = mu_a.clone();
        while &bound > epsilon {
            bound *= &half;
            j += 1;
        }
        let available = depth - heads;
        if j > available {
            return Err(Error::DepthTooSmall {
                needed: j,
                depth: available,
            });
        }
        (mixing_threshold(ta, tb)?, j)
    };

    // past every pairwise threshold the truncated value is constant in g
    let mut all_mixed = mixing_threshold(ta, tb)?;
    for k in 1..=heads {
        all_mixed = all_mixed.max(mixing_threshold(&a.factor(k)?, &b.factor(k)?)?);
    }
    let scanned_to = all_mixed.max(radius) + 1;
    for r in radius + 1..=scanned_to {
        for d in [-(r as i64), r as i64] {
            let v = c0_eval(&GroupElement::shift(d), a, b, depth)?;
            if &v.truncated > epsilon {
                return Err(Error::InvalidArgument(format!(
                    "scan found mu(gA ∩ B) = {} > epsilon at g = {d}",
                    v.truncated
                )));
            }
        }
    }
    Ok(C0Threshold {
        window: CompactWindow::radius(radius),
        controlled_factors: controlled,
        first_controlled,
        delta: half,
        scanned_to,
    })
}
