use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::arith::{exp_neg_enclosure, fmt_rational, parse_rational, pow2_inv, Enclosure, Rational};
use crate::base::CompactWindow;
use crate::error::{Error, Result};
use crate::invariance::{ai_find_capped, window_symdiff, DEFAULT_SEARCH_CAP};

/// One cell `(k, m)` of the schedule.
///
/// `n` is the least majority index with `nu(dA_n △ A_n) <= target` for all
/// `|d| <= m`, where `target = 1 - hi` and `[lo, hi]` encloses
/// `e^{-1/(m 2^k)}`. Since `target <= 1 - e^{-1/(m 2^k)}`, every factor
/// `2 nu(gA_n ∩ A_n) = 1 - nu(gA_n △ A_n)` is at least `e^{-1/(m 2^k)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScheduleEntry {
    pub k: usize,
    pub m: u64,
    pub n: u64,
    /// Exact `max_{|d| <= m} nu(dA_n △ A_n)`.
    pub slack: Rational,
    /// The slack the search had to reach.
    pub target: Rational,
    pub enclosure: Enclosure,
}

impl ScheduleEntry {
    /// Certified lower bound for `2 nu(gA_n ∩ A_n)`, `|g| <= m`.
    pub fn factor_lower(&self) -> Rational {
        Rational::one() - &self.slack
    }

    pub fn to_json(&self) -> Value {
        json!({
            "k": self.k,
            "m": self.m,
            "n": self.n,
            "slack": fmt_rational(&self.slack),
            "target": fmt_rational(&self.target),
            "enclosure_lo": fmt_rational(self.enclosure.lo()),
            "enclosure_hi": fmt_rational(self.enclosure.hi()),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let field = |name: &str| {
            v.get(name)
                .ok_or_else(|| Error::parse(0, format!("certificate record missing '{name}'")))
        };
        let uint = |name: &str| -> Result<u64> {
            field(name)?
                .as_u64()
                .ok_or_else(|| Error::parse(0, format!("'{name}' is not an unsigned integer")))
        };
        let ratf = |name: &str| -> Result<Rational> {
            let s = field(name)?
                .as_str()
                .ok_or_else(|| Error::parse(0, format!("'{name}' is not a p/q string")))?;
            parse_rational(s)
        };
        Ok(ScheduleEntry {
            k: uint("k")? as usize,
            m: uint("m")?,
            n: uint("n")?,
            slack: ratf("slack")?,
            target: ratf("target")?,
            enclosure: Enclosure::new(ratf("enclosure_lo")?, ratf("enclosure_hi")?)?,
        })
    }
}

#[derive(Clone, Debug)]
pub struct ScheduleOptions {
    pub search_cap: u64,
    /// Replaces every per-cell target; used to exercise failure paths.
    pub slack_override: Option<Rational>,
}

impl Default for ScheduleOptions {
    fn default() -> Self {
        ScheduleOptions {
            search_cap: DEFAULT_SEARCH_CAP,
            slack_override: None,
        }
    }
}

/// The map `(k, m) -> n(k, m)` together with its certificates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessSchedule {
    k_max: usize,
    m_max: u64,
    entries: BTreeMap<(usize, u64), ScheduleEntry>,
}

/// Enclosure width used for cell `(k, m)`: `2^{-(k+m+4)}`.
pub fn cell_width(k: usize, m: u64) -> Rational {
    pow2_inv((k as u64 + m + 4) as u32)
}

/// `1 / (m 2^k)`.
pub fn cell_exponent(k: usize, m: u64) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(m) << k)
}

pub fn build_schedule(k_max: usize, m_max: u64) -> Result<WitnessSchedule> {
    build_schedule_with(k_max, m_max, &ScheduleOptions::default())
}

pub fn build_schedule_with(k_max: usize, m_max: u64, opts: &ScheduleOptions) -> Result<WitnessSchedule> {
    if k_max == 0 || m_max == 0 {
        return Err(Error::InvalidArgument("schedule needs k_max, m_max >= 1".into()));
    }
    let cells: Vec<(usize, u64)> = (1..=m_max).flat_map(|m| (1..=k_max).map(move |k| (k, m))).collect();
    let entries = cells
        .par_iter()
        .map(|&(k, m)| build_entry(k, m, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(WitnessSchedule {
        k_max,
        m_max,
        entries: entries.into_iter().map(|e| ((e.k, e.m), e)).collect(),
    })
}

fn build_entry(k: usize, m: u64, opts: &ScheduleOptions) -> Result<ScheduleEntry> {
    let enclosure = exp_neg_enclosure(&cell_exponent(k, m), &cell_width(k, m))?;
    let target = match &opts.slack_override {
        Some(s) => s.clone(),
        None => Rational::one() - enclosure.hi(),
    };
    let n = ai_find_capped(CompactWindow::radius(m), &target, opts.search_cap)?;
    let slack = window_symdiff(n, m);
    Ok(ScheduleEntry {
        k,
        m,
        n,
        slack,
        target,
        enclosure,
    })
}

impl WitnessSchedule {
    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn m_max(&self) -> u64 {
        self.m_max
    }

    pub fn entries(&self) -> impl Iterator<Item = &ScheduleEntry> {
        self.entries.values()
    }

    pub fn entry(&self, k: usize, m: u64) -> Result<&ScheduleEntry> {
        self.entries.get(&(k, m)).ok_or(Error::ScheduleIndexOutOfRange { k, m })
    }

    pub fn n(&self, k: usize, m: u64) -> Result<u64> {
        Ok(self.entry(k, m)?.n)
    }

    /// Lower bound for the infinite product of the factors the schedule rule
    /// assigns beyond `k_max`: those cells would satisfy the same rule, so
    /// their product is at least `e^{-sum_{k > k_max} 1/(m 2^k)} = e^{-1/(m 2^{k_max})}`.
    pub fn beyond_lower(&self, m: u64) -> Result<Rational> {
        let enc = exp_neg_enclosure(&cell_exponent(self.k_max, m), &pow2_inv(64))?;
        Ok(enc.lo().clone())
    }

    /// One JSON object per line, ordered by `(k, m)`.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in self.entries.values() {
            out.push_str(&e.to_json().to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let v: Value = serde_json::from_str(line).map_err(|e| Error::parse(0, format!("line {}: {e}", i + 1)))?;
            let e = ScheduleEntry::from_json(&v)?;
            entries.insert((e.k, e.m), e);
        }
        let k_max = entries.keys().map(|(k, _)| *k).max().unwrap_or(0);
        let m_max = entries.keys().map(|(_, m)| *m).max().unwrap_or(0);
        if entries.len() != k_max * m_max as usize {
            return Err(Error::InvalidArgument(
                "certificate file does not cover a full k x m grid".into(),
            ));
        }
        Ok(WitnessSchedule { k_max, m_max, entries })
    }

    /// Independently re-derives every certificate.
    pub fn verify(&self) -> Vec<ScheduleViolation> {
        self.entries
            .par_iter()
            .filter_map(|(_, e)| verify_entry(e).err())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScheduleViolation {
    pub k: usize,
    pub m: u64,
    pub reason: String,
}

fn verify_entry(e: &ScheduleEntry) -> std::result::Result<(), ScheduleViolation> {
    let fail = |reason: String| ScheduleViolation { k: e.k, m: e.m, reason };
    let x = cell_exponent(e.k, e.m);
    // The enclosure must bracket the deep partial sums of the series.
    let deep = exp_neg_enclosure(&x, &pow2_inv(80)).map_err(|err| fail(err.to_string()))?;
    if e.enclosure.lo() > deep.hi() || e.enclosure.hi() < deep.lo() {
        return Err(fail("enclosure does not bracket e^{-x}".into()));
    }
    if e.enclosure.width() > cell_width(e.k, e.m) {
        return Err(fail("enclosure wider than 2^{-(k+m+4)}".into()));
    }
    let actual = window_symdiff(e.n, e.m);
    if actual > e.slack {
        return Err(fail(format!(
            "window symdiff {actual} exceeds certified slack {}",
            e.slack
        )));
    }
    if e.slack > Rational::one() - e.enclosure.lo() {
        return Err(fail("slack exceeds 1 - lo(e^{-x})".into()));
    }
    if e.slack > Rational::one() - e.enclosure.hi() {
        return Err(fail(
            "slack exceeds 1 - hi(e^{-x}); factor bound not conservative".into(),
        ));
    }
    Ok(())
}
