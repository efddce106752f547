//! The experiments behind each subcommand, as tables and JSON values.

use std::sync::Arc;

use anyhow::{bail, Result};
use c0dyn::arith::{exp_neg_enclosure, fmt_decimal, fmt_rational, pow2_inv, Rational};
use c0dyn::base::{mixing_threshold, BaseSet, CompactWindow, GroupElement, Model};
use c0dyn::invariance::{overlap, symdiff_shift};
use c0dyn::literal::format_base_set;
use c0dyn::product::{c0_eval, disjoint_family_capped, mu, rect_measure, ring_normalize, Rectangle};
use c0dyn::witness::{
    build_schedule_with, coefficient, coefficient_upper, fc_check, rotation_counterexample, sigma_finite_cover,
    FcOutcome, ScheduleOptions, WitnessSchedule,
};
use num_traits::Zero;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::expr::parse_expr;
use crate::table::{Cell, Table};

fn r(v: &Rational) -> Cell {
    Cell::Text(fmt_rational(v))
}

pub struct MixingScan {
    pub threshold: u64,
    pub table: Table,
}

/// `nu(dA ∩ B)` against `nu(A) nu(B)` for `|d| <= d_max`.
pub fn run_mixing_scan(config: &ExperimentConfig, a: &BaseSet, b: &BaseSet, d_max: u64) -> Result<MixingScan> {
    if config.model != Model::Bernoulli || a.model() != Model::Bernoulli || b.model() != Model::Bernoulli {
        bail!("mixing scans need the bernoulli model");
    }
    let threshold = mixing_threshold(a, b)?;
    let product = a.nu() * b.nu();
    let d_max = d_max as i64;
    let values = (-d_max..=d_max)
        .into_par_iter()
        .map(|d| Ok((d, a.act(&GroupElement::shift(d))?.intersection_measure(b)?)))
        .collect::<c0dyn::Result<Vec<_>>>()?;
    let mut table = Table::new(&["d", "nu_dA_cap_B", "nu_A_nu_B", "equal", "threshold"]);
    for (d, v) in values {
        table.push(vec![
            d.into(),
            r(&v),
            r(&product),
            (v == product).into(),
            threshold.into(),
        ]);
    }
    Ok(MixingScan { threshold, table })
}

/// Overlaps `nu(dA_n ∩ A_n)` and symmetric differences for `n <= n_max`, `0 <= d <= d_max`.
pub fn run_ai_table(n_max: u64, d_max: u64) -> Table {
    let cells: Vec<(u64, u64)> = (1..=n_max).flat_map(|n| (0..=d_max).map(move |d| (n, d))).collect();
    let values: Vec<_> = cells
        .par_iter()
        .map(|&(n, d)| (n, d, overlap(n, d), symdiff_shift(n, d)))
        .collect();
    let mut t = Table::new(&["n", "d", "overlap", "symdiff"]);
    for (n, d, o, s) in values {
        t.push(vec![n.into(), d.into(), r(&o), r(&s)]);
    }
    t
}

pub struct C0Scan {
    pub table: Table,
    /// Whitespace-separated `g truncated lo hi` rows.
    pub plot: String,
}

/// `mu(gA ∩ B)` for `|g| <= g_max` at the configured depth, with the running
/// maximum over `|g'| >= |g|` inside the scanned range.
pub fn run_c0_scan(config: &ExperimentConfig, a: &Rectangle, b: &Rectangle, g_max: u64) -> Result<C0Scan> {
    if config.model != Model::Bernoulli {
        bail!("c0 scans run over integer shifts; use `witness rotation` for the circle");
    }
    let g_max = g_max as i64;
    let values = (-g_max..=g_max)
        .into_par_iter()
        .map(|g| Ok((g, c0_eval(&GroupElement::shift(g), a, b, config.depth)?)))
        .collect::<c0dyn::Result<Vec<_>>>()?;
    let mut window_max = vec![Rational::zero(); g_max as usize + 1];
    for (g, v) in &values {
        let i = g.unsigned_abs() as usize;
        if v.truncated > window_max[i] {
            window_max[i] = v.truncated.clone();
        }
    }
    for i in (0..g_max as usize).rev() {
        if window_max[i + 1] > window_max[i] {
            window_max[i] = window_max[i + 1].clone();
        }
    }
    let mut table = Table::new(&["g", "truncated", "lo", "hi", "window_max"]);
    let mut plot = String::from("# g truncated lo hi\n");
    for (g, v) in &values {
        let (lo, hi) = (v.infinite.lo(), v.infinite.hi());
        table.push(vec![
            (*g).into(),
            r(&v.truncated),
            r(lo),
            r(hi),
            r(&window_max[g.unsigned_abs() as usize]),
        ]);
        plot.push_str(&format!(
            "{g} {} {} {}\n",
            fmt_rational(&v.truncated),
            fmt_rational(lo),
            fmt_rational(hi)
        ));
    }
    Ok(C0Scan { table, plot })
}

pub fn build_schedule_for(config: &ExperimentConfig) -> Result<WitnessSchedule> {
    let opts = ScheduleOptions {
        search_cap: config.search_cap,
        slack_override: config.slack_override.clone(),
    };
    Ok(build_schedule_with(config.k_max, config.m_max, &opts)?)
}

/// Normalizes a set expression and lists its disjoint pieces, then the total.
pub fn run_mu(config: &ExperimentConfig, src: &str) -> Result<Table> {
    let ast = parse_expr(src)?;
    let schedule = if ast.needs_schedule() {
        Some(Arc::new(build_schedule_for(config)?))
    } else {
        None
    };
    let set = ring_normalize(&ast.bind(schedule.as_ref())?)?;
    if !set.verify_certificates()? {
        bail!("disjointness certificates failed to verify");
    }
    let mut t = Table::new(&["piece", "rect", "measure"]);
    for (i, p) in set.pieces().iter().enumerate() {
        t.push(vec![i.into(), p.to_string().into(), r(&rect_measure(p))]);
    }
    t.push(vec!["total".into(), "".into(), r(&mu(&set))]);
    Ok(t)
}

pub struct FamilyListing {
    pub table: Table,
    pub certified: bool,
}

/// The `2^n` pairwise disjoint unit-measure rectangles built from `a`.
pub fn run_non_sigma_finite(n: u32, a: &BaseSet) -> Result<FamilyListing> {
    let fam = disjoint_family_capped(n, a, n.max(c0dyn::product::DEFAULT_FAMILY_CAP))?;
    let mut table = Table::new(&["index", "pattern", "rect", "measure"]);
    for (i, p) in fam.pieces().iter().enumerate() {
        let pattern: String = (0..n).map(|k| if i >> k & 1 == 0 { '0' } else { '1' }).collect();
        table.push(vec![
            i.into(),
            pattern.into(),
            p.to_string().into(),
            r(&rect_measure(p)),
        ]);
    }
    let certified = fam.verify_certificates()?;
    Ok(FamilyListing { table, certified })
}

/// `lo(e^{-1/m})` at width `2^{-10}`.
pub fn witness_target(m: u64) -> Result<Rational> {
    let x = Rational::new(1.into(), m.into());
    Ok(exp_neg_enclosure(&x, &pow2_inv(10))?.lo().clone())
}

/// Certified coefficient enclosures for every `|g| <= m` and depth `1..=k_max`.
pub fn run_coefficient_table(schedule: &WitnessSchedule, m: u64) -> Result<Table> {
    let target = witness_target(m)?;
    let mut t = Table::new(&["g", "depth", "lo", "hi", "target", "ok"]);
    for g in -(m as i64)..=m as i64 {
        for depth in 1..=schedule.k_max() {
            let c = coefficient(&GroupElement::shift(g), m, depth, schedule)?;
            let ok = c.lo() >= &target;
            t.push(vec![
                g.into(),
                depth.into(),
                r(c.lo()),
                r(c.hi()),
                r(&target),
                ok.into(),
            ]);
        }
    }
    Ok(t)
}

/// One coefficient: certified inside the window, otherwise the evaluated upper bound.
pub fn coefficient_json(schedule: &Arc<WitnessSchedule>, g: i64, m: u64, depth: usize) -> Result<Value> {
    let el = GroupElement::shift(g);
    if g.unsigned_abs() <= m {
        let c = coefficient(&el, m, depth, schedule)?;
        Ok(json!({
            "g": g, "m": m, "depth": depth, "certified": true, "value": c.to_json(),
            "approx": {"lo": fmt_decimal(c.lo(), 12), "hi": fmt_decimal(c.hi(), 12)},
        }))
    } else {
        let u = coefficient_upper(&el, m, depth, schedule)?;
        Ok(json!({
            "g": g, "m": m, "depth": depth, "certified": false,
            "value": {"lo": "0/1", "hi": fmt_rational(&u)},
            "approx": {"lo": "0.000000000000", "hi": fmt_decimal(&u, 12)},
        }))
    }
}

pub fn fc_json(a: &Rectangle, radius: u64) -> Result<Value> {
    Ok(match fc_check(a, &CompactWindow::radius(radius))? {
        FcOutcome::Certified(c) => json!({
            "rect": a.to_string(),
            "radius": radius,
            "outcome": "certified",
            "lower": c.lower.iter().map(fmt_rational).collect::<Vec<_>>(),
            "first_tail_index": c.first_tail_index,
            "tail_constant": fmt_rational(&c.tail_constant),
            "beyond_lower": fmt_rational(&c.beyond_lower),
            "product_lower": fmt_rational(&c.tail_product_lower(1)),
        }),
        FcOutcome::Refuted { index, factor } => json!({
            "rect": a.to_string(),
            "radius": radius,
            "outcome": "refuted",
            "index": index,
            "factor": fmt_rational(&factor),
        }),
        FcOutcome::Inconclusive(reason) => json!({
            "rect": a.to_string(),
            "radius": radius,
            "outcome": "inconclusive",
            "reason": reason,
        }),
    })
}

pub fn rotation_json(theta: &Rational, a: &BaseSet, depth: usize) -> Result<Value> {
    let rep = rotation_counterexample(theta, a, depth)?;
    Ok(json!({
        "theta": fmt_rational(&rep.theta),
        "set": format_base_set(a),
        "overlap": fmt_rational(&rep.overlap),
        "factor": fmt_rational(&rep.factor),
        "depth": rep.depth,
        "truncated": fmt_rational(&rep.truncated),
        "infinite": rep.infinite.to_json(),
        "identity_infinite": rep.identity_infinite.to_json(),
    }))
}

pub fn run_cover(schedule: &Arc<WitnessSchedule>, radius: u64, m_max: u64) -> Result<Table> {
    let mut t = Table::new(&["g", "m", "rect", "measure"]);
    for p in sigma_finite_cover(schedule, radius, m_max)? {
        t.push(vec![p.g.into(), p.m.into(), p.set.to_string().into(), r(&p.measure)]);
    }
    Ok(t)
}
