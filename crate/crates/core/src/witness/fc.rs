//! Certificates that a product set's tail factors are uniformly almost
//! invariant on a window: `prod_{k>=N} 2 nu(gA_k ∩ A_k) -> 1` uniformly.

use num_traits::{One, Zero};

use crate::arith::{int, pow2_inv, Rational};
use crate::base::{BaseSet, CompactWindow, GroupElement};
use crate::error::{Error, Result};
use crate::invariance::window_symdiff;
use crate::product::{Rectangle, TailContext};

/// Per-index lower bounds `l_k <= 2 nu(gA_k ∩ A_k)` for all `g` in the window,
/// explicit for `k <= lower.len()`, with the geometric tail schedule
/// `1 - l_k <= tail_constant * 2^{-k}` beyond.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FcCertificate {
    pub window: CompactWindow,
    pub lower: Vec<Rational>,
    /// First index belonging to the tail context.
    pub first_tail_index: usize,
    pub tail_constant: Rational,
    /// Lower bound for `prod_{k > lower.len()} l_k`.
    pub beyond_lower: Rational,
}

impl FcCertificate {
    pub fn depth(&self) -> usize {
        self.lower.len()
    }

    /// `eps_N` with `sum_{k>=N} (1 - l_k) <= eps_N`; by
    /// `prod (1 - a_k) >= 1 - sum a_k` the tail product from `N` is at least
    /// `1 - eps_N`, and `eps_N -> 0`.
    pub fn tail_eps(&self, n: usize) -> Rational {
        let depth = self.depth();
        if n > depth {
            return &self.tail_constant * pow2_inv((n - 1) as u32);
        }
        let explicit: Rational = self.lower[n - 1..].iter().map(|l| Rational::one() - l).sum();
        explicit + &self.tail_constant * pow2_inv(depth as u32)
    }

    /// `prod_{k>=n} l_k` bounded below using the explicit factors and `beyond_lower`.
    pub fn tail_product_lower(&self, n: usize) -> Rational {
        let start = n.min(self.depth() + 1);
        let explicit: Rational = self.lower[start - 1..].iter().cloned().product();
        explicit * &self.beyond_lower
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FcOutcome {
    Certified(FcCertificate),
    /// No summable schedule fits: the factor at `index` and all tail factors
    /// after it stay at `factor < 1`.
    Refuted {
        index: usize,
        factor: Rational,
    },
    Inconclusive(String),
}

/// `min_{g in window} 2 nu(gF ∩ F)`.
fn window_min(f: &BaseSet, window: &CompactWindow) -> Result<Rational> {
    let shifts = window.shifts();
    if shifts.is_empty() {
        return Err(Error::NotBernoulli);
    }
    // 2 nu(dA ∩ A) = 1 - nu(dA △ A) for nu(A) = 1/2, independent of the offset
    if let (BaseSet::Majority(ms), CompactWindow::Radius(r)) = (f, window) {
        return Ok(Rational::one() - window_symdiff(ms.n, *r));
    }
    let mut best: Option<Rational> = None;
    for d in shifts {
        let v = int(2) * f.act(&GroupElement::shift(d))?.intersection_measure(f)?;
        best = Some(match best {
            Some(b) if b <= v => b,
            _ => v,
        });
    }
    Ok(best.expect("window contains the identity"))
}

/// Exact window minima `min_g 2 nu(gA_k ∩ A_k)` for `k = 1..=depth`.
pub fn fc_exact_minima(a: &Rectangle, window: &CompactWindow, depth: usize) -> Result<Vec<Rational>> {
    (1..=depth).map(|k| window_min(&a.factor(k)?, window)).collect()
}

pub fn fc_check(a: &Rectangle, window: &CompactWindow) -> Result<FcOutcome> {
    let CompactWindow::Radius(r) = *window else {
        return Err(Error::NotBernoulli);
    };
    let heads = a.head().len();
    match a.tail() {
        TailContext::Half(t) => {
            let mut lower = fc_exact_minima(a, window, heads)?;
            let tail_factor = window_min(t, window)?;
            if tail_factor < Rational::one() {
                return Ok(FcOutcome::Refuted {
                    index: heads + 1,
                    factor: tail_factor,
                });
            }
            lower.push(tail_factor);
            Ok(FcOutcome::Certified(FcCertificate {
                window: *window,
                lower,
                first_tail_index: heads + 1,
                tail_constant: Rational::zero(),
                beyond_lower: Rational::one(),
            }))
        }
        TailContext::Schedule { schedule, m, .. } => {
            let k_max = schedule.k_max();
            if heads > k_max {
                return Ok(FcOutcome::Inconclusive(format!(
                    "head longer than schedule depth {k_max}"
                )));
            }
            if r > *m {
                return Ok(FcOutcome::Inconclusive(format!(
                    "window radius {r} exceeds the schedule's certified radius {m}"
                )));
            }
            let mut lower = fc_exact_minima(a, window, heads)?;
            for k in heads + 1..=k_max {
                let n = schedule.n(k, *m)?;
                lower.push(Rational::one() - window_symdiff(n, r));
            }
            // the schedule keeps 1 - l_k <= 1 - e^{-1/(m 2^k)} <= 1/(m 2^k)
            let tail_constant = Rational::new(1.into(), (*m).into());
            for (k, l) in lower.iter().enumerate().skip(heads) {
                let budget = &tail_constant * pow2_inv(k as u32 + 1);
                if Rational::one() - l > budget {
                    return Ok(FcOutcome::Refuted {
                        index: k + 1,
                        factor: l.clone(),
                    });
                }
            }
            Ok(FcOutcome::Certified(FcCertificate {
                window: *window,
                lower,
                first_tail_index: heads + 1,
                tail_constant,
                beyond_lower: schedule.beyond_lower(*m)?,
            }))
        }
    }
}

/// Assembles a certificate for `A ∩ B` from certificates for `A` and `B`
/// over the same window, using
/// `2 nu(gC ∩ C) >= 2 nu(C) - 2 nu(A \ gA) - 2 nu(B \ gB)` for `C = A ∩ B`
/// and `2 nu(A \ gA) = 2 nu(A) - 2 nu(gA ∩ A) <= 2 nu(A) - l^A`.
pub fn fc_intersect(
    a: &Rectangle,
    cert_a: &FcCertificate,
    b: &Rectangle,
    cert_b: &FcCertificate,
) -> Result<(Rectangle, FcCertificate)> {
    if cert_a.window != cert_b.window {
        return Err(Error::InvalidArgument("certificates use different windows".into()));
    }
    let c = a.intersect(b)?;
    let depth = cert_a.depth().max(cert_b.depth());
    let two = int(2);
    let mut lower = Vec::with_capacity(depth);
    for k in 1..=depth {
        let (ak, bk) = (a.factor(k)?, b.factor(k)?);
        let la = cert_lower_at(cert_a, k);
        let lb = cert_lower_at(cert_b, k);
        let ck = c.factor(k)?;
        let bound = &two * ck.nu() - (&two * ak.nu() - la) - (&two * bk.nu() - lb);
        lower.push(bound.max(Rational::zero()));
    }
    let tail_constant = &cert_a.tail_constant + &cert_b.tail_constant;
    let beyond = (Rational::one() - &tail_constant * pow2_inv(depth as u32)).max(Rational::zero());
    Ok((
        c,
        FcCertificate {
            window: cert_a.window,
            lower,
            first_tail_index: cert_a.first_tail_index.max(cert_b.first_tail_index),
            tail_constant,
            beyond_lower: beyond,
        },
    ))
}

/// `l_k` of a certificate; past the explicit range only the geometric
/// schedule is known.
fn cert_lower_at(cert: &FcCertificate, k: usize) -> Rational {
    match cert.lower.get(k - 1) {
        Some(l) => l.clone(),
        None => Rational::one() - &cert.tail_constant * pow2_inv(k as u32),
    }
}
