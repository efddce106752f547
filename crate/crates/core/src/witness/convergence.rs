//! If `x_k -> 1` with `prod x_k` convergent and `0 <= a_k < 1/2` summable,
//! then `prod (x_k - a_k)` is sandwiched by `prod x_k (1 - a_k)^2` and
//! `prod x_k`. Checked here on finite sequences.

use num_traits::{One, Zero};

use crate::arith::{rat, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SandwichRow {
    /// Products run over `k >= n`.
    pub n: usize,
    pub lower: Rational,
    pub middle: Rational,
    pub upper: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergenceReport {
    pub rows: Vec<SandwichRow>,
    pub holds: bool,
}

/// Tail products from every `n >= n0` (1-based indices) for sequences
/// satisfying `x_k > 2/3` and `0 <= a_k < 1/2` from `n0` on.
pub fn convergence_lemma_check(x: &[Rational], a: &[Rational], n0: usize) -> Result<ConvergenceReport> {
    if x.len() != a.len() {
        return Err(Error::InvalidArgument("sequences differ in length".into()));
    }
    if n0 == 0 || n0 > x.len() {
        return Err(Error::InvalidArgument(format!("n0 = {n0} outside 1..={}", x.len())));
    }
    let two_thirds = rat(2, 3);
    let half = rat(1, 2);
    for k in n0..=x.len() {
        if x[k - 1] <= two_thirds {
            return Err(Error::Precondition {
                index: k,
                reason: "x_k must exceed 2/3".into(),
            });
        }
        if a[k - 1] < Rational::zero() || a[k - 1] >= half {
            return Err(Error::Precondition {
                index: k,
                reason: "a_k must lie in [0, 1/2)".into(),
            });
        }
    }
    let mut rows = Vec::new();
    let (mut lower, mut middle, mut upper) = (Rational::one(), Rational::one(), Rational::one());
    for k in (n0..=x.len()).rev() {
        let (xk, ak) = (&x[k - 1], &a[k - 1]);
        let one_minus = Rational::one() - ak;
        upper *= xk;
        middle *= xk - ak;
        lower *= xk * &one_minus * &one_minus;
        rows.push(SandwichRow {
            n: k,
            lower: lower.clone(),
            middle: middle.clone(),
            upper: upper.clone(),
        });
    }
    rows.reverse();
    let holds = rows.iter().all(|r| r.lower <= r.middle && r.middle <= r.upper);
    Ok(ConvergenceReport { rows, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn precondition_reports_index() {
        let x = vec![rat(1, 2), rat(9, 10), rat(1, 2)];
        let a = vec![rat(0, 1); 3];
        assert_eq!(
            convergence_lemma_check(&x, &a, 2).unwrap_err(),
            Error::Precondition {
                index: 3,
                reason: "x_k must exceed 2/3".into()
            }
        );
        // index 1 is before n0 and not checked
        let x = vec![rat(1, 2), rat(9, 10)];
        assert!(convergence_lemma_check(&x, &[rat(0, 1), rat(1, 4)], 2).unwrap().holds);
        assert!(convergence_lemma_check(&x, &[rat(0, 1), rat(1, 2)], 2).is_err());
    }

    #[test]
    fn geometric_example() {
        let x: Vec<_> = (1..=12).map(|k| Rational::one() - rat(1, 1 << (k + 1))).collect();
        let a: Vec<_> = (1..=12).map(|k| rat(1, 1 << (k + 2))).collect();
        let r = convergence_lemma_check(&x, &a, 1).unwrap();
        assert!(r.holds);
        assert_eq!(r.rows.len(), 12);
        assert_eq!(r.rows[11].upper, x[11]);
    }

    proptest! {
        #[test]
        fn sandwich_holds(seq in prop::collection::vec((1u32..=30, 0u32..50), 1..15)) {
            let x: Vec<_> = seq.iter().map(|(p, _)| rat(70 + *p as i64, 100)).collect();
            let a: Vec<_> = seq.iter().map(|(_, q)| rat(*q as i64, 100)).collect();
            prop_assert!(convergence_lemma_check(&x, &a, 1).unwrap().holds);
        }
    }
}
