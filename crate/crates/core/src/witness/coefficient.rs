use std::sync::Arc;

use num_traits::One;

use crate::arith::{int, MeasureValue, Rational};
use crate::base::GroupElement;
use crate::error::{Error, Result};
use crate::invariance::overlap;
use crate::product::{c0_eval, rect_measure, Rectangle, TailContext};

use super::WitnessSchedule;

/// `xi_m`, the indicator of `X_m = prod_k A_{n(k,m)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessVector {
    pub m: u64,
    pub support: Rectangle,
}

impl WitnessVector {
    pub fn new(schedule: Arc<WitnessSchedule>, m: u64) -> Result<Self> {
        let tail = TailContext::schedule(schedule, m)?;
        Ok(WitnessVector {
            m,
            support: Rectangle::tail_only(tail),
        })
    }

    /// `||xi_m||^2 = mu(X_m)`.
    pub fn norm_squared(&self) -> Rational {
        rect_measure(&self.support)
    }
}

/// Certified enclosure of `<g xi_m, xi_m>` for `|g| <= m`.
///
/// The upper end is the exact partial product over `k <= depth` (omitted
/// factors are at most 1). The lower end replaces factors `depth < k <= k_max`
/// by their schedule certificates `1 - s(k, m)` and everything past `k_max`
/// by the schedule's analytic tail bound.
pub fn coefficient(g: &GroupElement, m: u64, depth: usize, schedule: &WitnessSchedule) -> Result<MeasureValue> {
    let GroupElement::ShiftBy(d) = g else {
        return Err(Error::ModelMismatch);
    };
    if d.unsigned_abs() > m {
        return Err(Error::OutsideCertifiedWindow { g: *d, m });
    }
    if depth == 0 || depth > schedule.k_max() {
        return Err(Error::ScheduleIndexOutOfRange { k: depth, m });
    }
    schedule.entry(1, m)?;
    if *d == 0 {
        return Ok(MeasureValue::Exact(Rational::one()));
    }
    let offset = d.unsigned_abs();
    let mut upper = Rational::one();
    for k in 1..=depth {
        upper *= int(2) * overlap(schedule.n(k, m)?, offset);
    }
    let mut lower = upper.clone();
    for k in depth + 1..=schedule.k_max() {
        lower *= schedule.entry(k, m)?.factor_lower();
    }
    lower *= schedule.beyond_lower(m)?;
    MeasureValue::interval(lower, upper)
}

/// Uncertified evaluation for any `g`: the exact partial product through
/// `depth`, as an upper bound.
pub fn coefficient_upper(g: &GroupElement, m: u64, depth: usize, schedule: &Arc<WitnessSchedule>) -> Result<Rational> {
    let x = WitnessVector::new(Arc::clone(schedule), m)?;
    Ok(c0_eval(g, &x.support, &x.support, depth)?.truncated)
}
