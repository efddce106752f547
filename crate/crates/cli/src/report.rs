//! One-shot reproduction: every table, certificate file and a pass/fail summary.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use anyhow::{Context, Result};
use c0dyn::arith::{fmt_rational, pow2_inv, rat, MeasureValue, Rational};
use c0dyn::base::{BaseSet, CompactWindow, GroupElement};
use c0dyn::invariance::{binomial, majority_measure, symdiff_shift};
use c0dyn::literal::parse_base_set;
use c0dyn::product::{c0_eval, c0_threshold, Rectangle, TailContext};
use c0dyn::witness::{convergence_lemma_check, fc_check, FcOutcome, WitnessSchedule, WitnessVector};
use num_traits::{One, Zero};
use serde_json::Value;

use crate::config::ExperimentConfig;
use crate::run::{
    build_schedule_for, fc_json, rotation_json, run_ai_table, run_c0_scan, run_coefficient_table, run_mixing_scan,
    run_non_sigma_finite,
};
use crate::table::{Cell, Table};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportOutcome {
    pub checks: Vec<Check>,
}

impl ReportOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn summary_text(&self) -> String {
        self.checks
            .iter()
            .map(|c| format!("{}\t{}\t{}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail))
            .collect()
    }
}

struct Writer<'a> {
    dir: &'a Path,
    config: &'a ExperimentConfig,
}

impl Writer<'_> {
    fn file(&self, name: &str, text: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }

    fn table(&self, stem: &str, t: &Table) -> Result<()> {
        let fmt = self.config.format;
        self.file(&format!("{stem}.{}", fmt.extension()), &t.render(fmt)?)
    }

    fn json(&self, name: &str, v: &Value) -> Result<()> {
        self.file(name, &format!("{}\n", serde_json::to_string_pretty(v)?))
    }
}

fn check(name: &'static str, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        name,
        passed,
        detail: detail.into(),
    }
}

fn bool_col(t: &Table, name: &str) -> Vec<bool> {
    let i = t.column(name).expect("column");
    t.rows.iter().map(|r| r[i] == Cell::Bool(true)).collect()
}

/// Writes the report into `config.output_dir`. Check failures are reported in
/// the outcome; only I/O and setup errors are returned as `Err`.
pub fn run_full_report(config: &ExperimentConfig) -> Result<ReportOutcome> {
    config.validate()?;
    let dir = config.output_dir.as_path();
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let w = Writer { dir, config };
    let mut checks = Vec::new();

    let mut echo = config.clone();
    echo.output_dir = ".".into();
    w.file("config.txt", &echo.to_file_text())?;

    // majority measures and the closed form of the shift-by-one symmetric difference
    let bad: Vec<u64> = (1..=8).filter(|&n| majority_measure(n) != rat(1, 2)).collect();
    checks.push(check(
        "majority_half",
        bad.is_empty(),
        format!("n = 1..8, failures {bad:?}"),
    ));
    let bad: Vec<u64> = (1..=8)
        .filter(|&n| symdiff_shift(n, 1) != Rational::from_integer(binomial(2 * n, n)) * pow2_inv(2 * n as u32 + 1))
        .collect();
    checks.push(check(
        "symdiff_closed_form",
        bad.is_empty(),
        format!("n = 1..8, failures {bad:?}"),
    ));
    w.table("ai_table", &run_ai_table(8, 4))?;

    // exact mixing beyond the threshold
    let mut mixing_ok = true;
    let mut thresholds = Vec::new();
    for (stem, lit) in [("mixing_literal", "cyl 0:1"), ("mixing_majority", "maj 1")] {
        let a = parse_base_set(lit)?;
        let mut cfg = config.clone();
        cfg.model = c0dyn::base::Model::Bernoulli;
        let scan = run_mixing_scan(&cfg, &a, &a, config.d_max.max(4))?;
        let d_col = scan.table.column("d").expect("column");
        for (row, eq) in scan.table.rows.iter().zip(bool_col(&scan.table, "equal")) {
            let Cell::Int(d) = row[d_col] else { unreachable!() };
            if d.unsigned_abs() >= scan.threshold && !eq {
                mixing_ok = false;
            }
        }
        thresholds.push(format!("{lit}: {}", scan.threshold));
        w.table(stem, &scan.table)?;
    }
    checks.push(check("mixing_exact", mixing_ok, thresholds.join(", ")));

    // decay of the diagonal coefficients
    let tail = TailContext::half(parse_base_set("cyl 0:1")?)?;
    let pure = Rectangle::tail_only(tail.clone());
    let headed = Rectangle::new(vec![parse_base_set("cyl 0:1 1:1")?], tail)?;
    let mut cfg = config.clone();
    cfg.model = c0dyn::base::Model::Bernoulli;
    let scan = run_c0_scan(&cfg, &pure, &pure, config.d_max)?;
    w.table("c0_scan", &scan.table)?;
    w.file("c0_plot.dat", &scan.plot)?;
    let floor = pow2_inv(config.depth as u32);
    let mut decay_ok = true;
    for d in 1..=config.d_max.max(1) as i64 {
        for g in [d, -d] {
            let v = c0_eval(&GroupElement::shift(g), &pure, &pure, config.depth)?;
            decay_ok &= v.truncated == floor && v.infinite == MeasureValue::Exact(Rational::zero());
        }
    }
    let thr = c0_threshold(&headed, &pure, &floor, config.depth);
    decay_ok &= thr.is_ok();
    checks.push(check(
        "c0_decay",
        decay_ok,
        format!(
            "depth {}, floor {}, window {}",
            config.depth,
            fmt_rational(&floor),
            thr.map_or_else(|e| e.to_string(), |t| format!("{:?}", t.window))
        ),
    ));

    // schedule, coefficients and fc certificates
    match build_schedule_for(config) {
        Ok(schedule) => {
            let schedule = Arc::new(schedule);
            let text = schedule.to_jsonl();
            w.file("schedule.jsonl", &text)?;
            let violations = schedule.verify();
            let reparsed = WitnessSchedule::from_jsonl(&text)
                .map(|s| s == *schedule)
                .unwrap_or(false);
            checks.push(check(
                "schedule_certificates",
                violations.is_empty() && reparsed,
                format!(
                    "k_max {}, m_max {}, {} violations, reparse {}",
                    config.k_max,
                    config.m_max,
                    violations.len(),
                    if reparsed { "equal" } else { "differs" }
                ),
            ));
            let mut coeff_ok = true;
            for m in 1..=config.m_max {
                let t = run_coefficient_table(&schedule, m)?;
                coeff_ok &= bool_col(&t, "ok").iter().all(|b| *b);
                w.table(&format!("coefficients_m{m}"), &t)?;
            }
            checks.push(check(
                "coefficient_bound",
                coeff_ok,
                "lo >= lo(e^{-1/m}) for |g| <= m, all depths",
            ));
            checks.push(fc_checks(&w, &schedule)?);
        }
        Err(e) => {
            let why = format!("schedule unavailable: {e}");
            checks.push(check("schedule_certificates", false, why.clone()));
            checks.push(check("coefficient_bound", false, why.clone()));
            checks.push(check("fc_certificates", false, why));
        }
    }

    // non-sigma-finite family
    let listing = run_non_sigma_finite(config.family_n, &parse_base_set("cyl 0:1")?)?;
    w.table("non_sigma_finite", &listing.table)?;
    let measures_ok = listing
        .table
        .rows
        .iter()
        .all(|r| r[listing.table.column("measure").expect("column")] == Cell::Text("1/1".into()));
    checks.push(check(
        "non_sigma_finite",
        listing.certified && measures_ok && listing.table.rows.len() == 1 << config.family_n,
        format!("{} pieces of measure 1", listing.table.rows.len()),
    ));

    // rotation on the circle
    let half_arc = BaseSet::arc(rat(0, 1), rat(1, 2))?;
    match rotation_json(&config.theta, &half_arc, config.depth) {
        Ok(v) => {
            w.json("rotation.json", &v)?;
            let factor_lt_one = c0dyn::arith::parse_rational(v["factor"].as_str().unwrap_or(""))? < Rational::one();
            let zero = serde_json::json!({"exact": "0/1"});
            let one = serde_json::json!({"exact": "1/1"});
            let ok = v["identity_infinite"] == one && (!factor_lt_one || v["infinite"] == zero);
            checks.push(check(
                "rotation_discontinuity",
                ok,
                format!(
                    "theta {}, overlap {}",
                    fmt_rational(&config.theta),
                    v["overlap"].as_str().unwrap_or("?")
                ),
            ));
        }
        Err(e) => checks.push(check("rotation_discontinuity", false, e.to_string())),
    }

    // the product sandwich on a geometric example
    let x: Vec<Rational> = (1..=12u32).map(|k| Rational::one() - pow2_inv(2 * k)).collect();
    let a: Vec<Rational> = (1..=12u32).map(|k| pow2_inv(2 * k)).collect();
    let rep = convergence_lemma_check(&x, &a, 1)?;
    let mut t = Table::new(&["n", "lower", "middle", "upper"]);
    for row in &rep.rows {
        t.push(vec![
            row.n.into(),
            fmt_rational(&row.lower).into(),
            fmt_rational(&row.middle).into(),
            fmt_rational(&row.upper).into(),
        ]);
    }
    w.table("sandwich", &t)?;
    checks.push(check(
        "product_sandwich",
        rep.holds,
        "x_k = 1 - 4^-k, a_k = 4^-k, k <= 12",
    ));

    let outcome = ReportOutcome { checks };
    w.file("summary.txt", &outcome.summary_text())?;
    Ok(outcome)
}

fn fc_checks(w: &Writer<'_>, schedule: &Arc<WitnessSchedule>) -> Result<Check> {
    let mut lines = String::new();
    let mut ok = true;
    for m in 1..=schedule.m_max() {
        let x = WitnessVector::new(Arc::clone(schedule), m)?;
        let v = fc_json(&x.support, m)?;
        ok &= matches!(
            fc_check(&x.support, &CompactWindow::radius(m))?,
            FcOutcome::Certified(_)
        );
        lines.push_str(&format!("{v}\n"));
    }
    let constant = Rectangle::tail_only(TailContext::half(parse_base_set("cyl 0:1")?)?);
    let v = fc_json(&constant, 1)?;
    ok &= v["outcome"] == "refuted" && v["index"] == 1;
    lines.push_str(&format!("{v}\n"));
    w.file("fc_checks.jsonl", &lines)?;
    Ok(check(
        "fc_certificates",
        ok,
        "X_m certified on radius m; constant product refuted at index 1",
    ))
}
