//! Exact scalars and rigorous rational enclosures.
//!
//! Every scalar in the crate is a [`Rational`]: `num_rational::BigRational`
//! keeps numerator and denominator reduced with a positive denominator, so
//! structural equality is value equality. Transcendental values (only
//! `e^{-x}` is ever needed) are carried as [`Enclosure`]s with rational
//! endpoints; no floating point enters any computation.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// `2^{-k}` as an exact rational.
pub fn pow2_inv(k: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << k)
}

/// Serializes as `p/q`, always with an explicit denominator.
pub fn fmt_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Decimal expansion truncated toward `-inf` after `digits` places, for display only.
pub fn fmt_decimal(r: &Rational, digits: u32) -> String {
    let scaled = (r * Rational::from_integer(BigInt::from(10).pow(digits)))
        .floor()
        .to_integer();
    let sign = if scaled.is_negative() { "-" } else { "" };
    let s = scaled.abs().to_string();
    if digits == 0 {
        return format!("{sign}{s}");
    }
    let s = format!("{s:0>width$}", width = digits as usize + 1);
    let (int_part, frac) = s.split_at(s.len() - digits as usize);
    format!("{sign}{int_part}.{frac}")
}

/// Parses `p/q` or a bare integer `p`. The denominator must be nonzero; the
/// result is reduced.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let numer: BigInt = num
        .parse()
        .map_err(|_| Error::parse(0, format!("bad numerator in '{s}'")))?;
    let denom: BigInt = den
        .parse()
        .map_err(|_| Error::parse(0, format!("bad denominator in '{s}'")))?;
    if denom.is_zero() {
        return Err(Error::parse(0, format!("zero denominator in '{s}'")));
    }
    Ok(Rational::new(numer, denom))
}

/// A closed interval `[lo, hi]` with rational endpoints that brackets a real value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Enclosure {
    lo: Rational,
    hi: Rational,
}

impl Enclosure {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidEnclosure {
                lo: Box::new(lo),
                hi: Box::new(hi),
            });
        }
        Ok(Enclosure { lo, hi })
    }

    pub fn point(v: Rational) -> Self {
        Enclosure { lo: v.clone(), hi: v }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lo <= v && v <= &self.hi
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", fmt_rational(&self.lo), fmt_rational(&self.hi))
    }
}

/// A nonnegative measure value: exact, or certified to lie in an interval.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MeasureValue {
    Exact(Rational),
    Interval(Enclosure),
}

impl MeasureValue {
    pub fn exact(v: Rational) -> Result<Self> {
        if v.is_negative() {
            return Err(Error::NegativeMeasure(v));
        }
        Ok(MeasureValue::Exact(v))
    }

    pub fn interval(lo: Rational, hi: Rational) -> Result<Self> {
        if lo.is_negative() {
            return Err(Error::NegativeMeasure(lo));
        }
        Ok(MeasureValue::Interval(Enclosure::new(lo, hi)?))
    }

    pub fn lo(&self) -> &Rational {
        match self {
            MeasureValue::Exact(v) => v,
            MeasureValue::Interval(e) => e.lo(),
        }
    }

    pub fn hi(&self) -> &Rational {
        match self {
            MeasureValue::Exact(v) => v,
            MeasureValue::Interval(e) => e.hi(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, MeasureValue::Exact(_))
    }

    /// `{"exact": "p/q"}` or `{"lo": "p/q", "hi": "p/q"}`.
    pub fn to_json(&self) -> Value {
        match self {
            MeasureValue::Exact(v) => json!({ "exact": fmt_rational(v) }),
            MeasureValue::Interval(e) => {
                json!({ "lo": fmt_rational(e.lo()), "hi": fmt_rational(e.hi()) })
            }
        }
    }
}

impl fmt::Display for MeasureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureValue::Exact(v) => write!(f, "{}", fmt_rational(v)),
            MeasureValue::Interval(e) => write!(f, "{e}"),
        }
    }
}

/// Encloses `e^{-x}` for `0 < x <= 1` between alternating Taylor partial sums.
///
/// With `S_j = sum_{i<=j} (-x)^i / i!` the terms decrease in magnitude, so
/// `S_{2j+1} <= e^{-x} <= S_{2j}`. The best odd sum seen so far is the lower
/// end and the best even sum the upper end; summation stops once they are
/// within `width_bound`.
pub fn exp_neg_enclosure(x: &Rational, width_bound: &Rational) -> Result<Enclosure> {
    if !x.is_positive() || x > &Rational::one() {
        return Err(Error::ExpArgumentOutOfRange(x.clone()));
    }
    if !width_bound.is_positive() {
        return Err(Error::NonPositiveWidth(width_bound.clone()));
    }
    let mut term = Rational::one();
    let mut partial = Rational::one();
    let mut hi = partial.clone();
    let mut lo = Rational::zero();
    let mut i: u64 = 0;
    loop {
        i += 1;
        term = -(term * x) / Rational::from_integer(BigInt::from(i));
        partial += &term;
        if i % 2 == 1 {
            lo = partial.clone();
        } else {
            hi = partial.clone();
        }
        if &(&hi - &lo) <= width_bound {
            return Enclosure::new(lo, hi);
        }
    }
}

/// Product of nonnegative measure values; exact iff every input is exact.
pub fn interval_product<'a, I>(values: I) -> MeasureValue
where
    I: IntoIterator<Item = &'a MeasureValue>,
{
    let mut lo = Rational::one();
    let mut hi = Rational::one();
    let mut exact = true;
    for v in values {
        exact &= v.is_exact();
        lo *= v.lo();
        hi *= v.hi();
    }
    if exact {
        MeasureValue::Exact(lo)
    } else {
        MeasureValue::Interval(Enclosure { lo, hi })
    }
}
