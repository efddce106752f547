//! The asymptotically invariant sequence of window-majority sets
//! `A_n = {x : x_0 + ... + x_{2n} >= n+1}` in the Bernoulli model.
//!
//! `nu(A_n) = 1/2` by bit-flip symmetry. For a shift by `d` the windows of
//! `A_n` and `dA_n` share `L = max(0, 2n+1-d)` coordinates and each has
//! `w = min(d, 2n+1)` private ones. Conditioning on the shared sum `s`:
//!
//! ```text
//! nu(dA_n ∩ A_n) = sum_{s=0}^{L} C(L,s) 2^{-L} P(s + U >= n+1)^2,  U ~ Bin(w, 1/2)
//! ```
//!
//! The tail probability is `1` for `s >= n+1` and `0` for `s < n+1-w`, so only
//! the block `s in [n+1-w, n]` carries non-constant weight; the constant
//! block `sum_{s>n} C(L,s)` equals `(2^L - sum_{s=n-d+1}^{n} C(L,s)) / 2` by the
//! symmetry `C(L,s) = C(L,L-s)`. Both blocks need only the binomials
//! `C(L, s)` for `s` near `n`, so one evaluation costs `O(n + d)` big-integer
//! operations.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::arith::Rational;
use crate::base::CompactWindow;
use crate::error::{Error, Result};

/// Default ceiling for [`ai_find`].
pub const DEFAULT_SEARCH_CAP: u64 = 1 << 20;

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `nu(A_n)` from the binomial tail `sum_{j>=n+1} C(2n+1, j) / 2^{2n+1}`.
pub fn majority_measure(n: u64) -> Rational {
    let len = 2 * n + 1;
    let count: BigInt = (n + 1..=len).map(|j| binomial(len, j)).sum();
    Rational::new(count, BigInt::one() << len)
}

/// Exact `nu(dA_n ∩ A_n)`.
pub fn overlap(n: u64, d: u64) -> Rational {
    assert!(n >= 1, "majority window needs n >= 1");
    let window = 2 * n + 1;
    let shared = window.saturating_sub(d);
    let private = d.min(window);

    // Weighted count over all 2^{shared + 2 private} configurations.
    let mut count = BigInt::zero();

    // Binomials C(shared, s) for s in [lo, hi], generated downward from s = hi.
    let hi = n.min(shared);
    let lo = (n + 1).saturating_sub(private);
    let mut row: Vec<(u64, BigInt)> = Vec::new();
    if lo <= hi {
        let mut c = binomial(shared, hi);
        let mut s = hi;
        loop {
            row.push((s, c.clone()));
            if s == lo {
                break;
            }
            // C(L, s-1) = C(L, s) * s / (L - s + 1)
            c = c * s / (shared - s + 1);
            s -= 1;
        }
    }

    // Private-window tail counts T(s) = #{u : s + u >= n+1}, u in {0..w} weighted by C(w, u).
    let private_row: Vec<BigInt> = (0..=private).map(|u| binomial(private, u)).collect();
    let tail_count = |s: u64| -> BigInt {
        let need = (n + 1).saturating_sub(s);
        private_row.iter().skip(need as usize).sum()
    };

    for (s, c) in &row {
        let t = tail_count(*s);
        count += c * &t * &t;
    }

    // Block s >= n+1 where both tails are certain.
    if shared > n {
        let full_tail = BigInt::one() << shared;
        // middle block s in [shared - n, n] is exactly the d-term block above
        // (when d <= 2n+1): shared - n = n + 1 - d.
        let mid_lo = shared - n;
        let middle: BigInt = if mid_lo <= n {
            row.iter().filter(|(s, _)| *s >= mid_lo).map(|(_, c)| c.clone()).sum()
        } else {
            BigInt::zero()
        };
        let upper = (full_tail - middle) >> 1u32;
        count += upper << (2 * private);
    }

    Rational::new(count, BigInt::one() << (shared + 2 * private))
}

/// `nu(dA_n △ A_n) = 1 - 2 nu(dA_n ∩ A_n)`, using `nu(dA_n) = nu(A_n) = 1/2`.
pub fn symdiff_shift(n: u64, d: u64) -> Rational {
    Rational::one() - overlap(n, d) * Rational::from_integer(BigInt::from(2))
}

/// `max_{0 <= d <= r} nu(dA_n △ A_n)`; symmetric in `±d`.
pub fn window_symdiff(n: u64, r: u64) -> Rational {
    (0..=r)
        .into_par_iter()
        .map(|d| symdiff_shift(n, d))
        .reduce(Rational::zero, |a, b| a.max(b))
}

/// Least `n` such that `nu(dA_n △ A_n) <= slack` for every `|d| <= r`.
///
/// The window maximum is nonincreasing in `n`, so the search gallops to a
/// feasible `n` and bisects back to the least one.
pub fn ai_find(window: CompactWindow, slack: &Rational) -> Result<u64> {
    ai_find_capped(window, slack, DEFAULT_SEARCH_CAP)
}

pub fn ai_find_capped(window: CompactWindow, slack: &Rational, cap: u64) -> Result<u64> {
    let CompactWindow::Radius(r) = window else {
        return Err(Error::NotBernoulli);
    };
    if slack <= &Rational::zero() || slack > &Rational::new(BigInt::one(), BigInt::from(2)) {
        return Err(Error::InvalidArgument(format!("slack {slack} outside (0, 1/2]")));
    }
    let ok = |n: u64| window_symdiff(n, r) <= *slack;
    if ok(1) {
        return Ok(1);
    }
    let mut fail = 1u64;
    let mut pass = 2u64;
    loop {
        if pass > cap {
            if ok(cap) {
                pass = cap;
                break;
            }
            return Err(Error::SearchCapExceeded {
                cap,
                slack: slack.clone(),
            });
        }
        if ok(pass) {
            break;
        }
        fail = pass;
        pass *= 2;
    }
    while pass - fail > 1 {
        let mid = fail + (pass - fail) / 2;
        if ok(mid) {
            pass = mid;
        } else {
            fail = mid;
        }
    }
    Ok(pass)
}

/// `nu(dA_n ∩ A_n)` for `d = 0..=d_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverlapTable {
    pub n: u64,
    pub entries: Vec<Rational>,
}

impl OverlapTable {
    pub fn build(n: u64, d_max: u64) -> Self {
        let entries = (0..=d_max).into_par_iter().map(|d| overlap(n, d)).collect();
        OverlapTable { n, entries }
    }

    pub fn entry(&self, d: u64) -> Option<&Rational> {
        self.entries.get(d as usize)
    }
}
