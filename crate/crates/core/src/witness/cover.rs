use std::sync::Arc;

use crate::arith::Rational;
use crate::base::GroupElement;
use crate::error::{Error, Result};
use crate::product::{rect_measure, Rectangle};

use super::{WitnessSchedule, WitnessVector};

/// One translate `g X_m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverPiece {
    pub g: i64,
    pub m: u64,
    pub set: Rectangle,
    pub measure: Rational,
}

/// The translates `g X_m` for `|g| <= radius`, `1 <= m <= m_max`: countably
/// many such sets of finite measure exhaust the support of the witnesses.
pub fn sigma_finite_cover(schedule: &Arc<WitnessSchedule>, radius: u64, m_max: u64) -> Result<Vec<CoverPiece>> {
    if m_max == 0 || m_max > schedule.m_max() {
        return Err(Error::ScheduleIndexOutOfRange { k: 1, m: m_max });
    }
    let r = radius as i64;
    let mut out = Vec::with_capacity((2 * radius as usize + 1) * m_max as usize);
    for m in 1..=m_max {
        let x = WitnessVector::new(Arc::clone(schedule), m)?;
        for g in -r..=r {
            let set = x.support.act(&GroupElement::shift(g))?;
            let measure = rect_measure(&set);
            out.push(CoverPiece { g, m, set, measure });
        }
    }
    Ok(out)
}
