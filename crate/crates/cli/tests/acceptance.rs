//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
//!
//! Run alone with `cargo test -p c0dyn-cli --test acceptance`.

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use c0dyn::arith::{exp_neg_enclosure, pow2_inv, rat, MeasureValue, Rational};
use c0dyn::base::{
    mixing_threshold, BaseSet, CompactWindow, Cylinder, GroupElement, MajoritySet, DEFAULT_LOWERING_CAP,
};
use c0dyn::invariance::{binomial, majority_measure, overlap, symdiff_shift};
use c0dyn::product::{
    c0_eval, c0_threshold, diag_act, disjoint_family, mu, p_cond, rect_measure, ring_normalize, Rectangle, RingSet,
    SetExpr, TailContext,
};
use c0dyn::witness::{
    build_schedule, coefficient, convergence_lemma_check, fc_check, fc_exact_minima, fc_intersect,
    rotation_counterexample, FcOutcome, WitnessVector,
};
use c0dyn_cli::{run_full_report, ExperimentConfig};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5eed_c0d7;

type Outcome = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

// 1. overlap DP against exhaustive enumeration, n <= 3, 0 <= d <= 4
fn overlap_by_enumeration(n: u64, d: u64) -> Rational {
    let width = 2 * n + 1;
    let bits = width + d;
    let window = (1u64 << width) - 1;
    let mut hits = 0u64;
    for x in 0u64..1 << bits {
        let own = (x & window).count_ones() as u64;
        let shifted = ((x >> d) & window).count_ones() as u64;
        if own > n && shifted > n {
            hits += 1;
        }
    }
    Rational::new(hits.into(), (1u64 << bits).into())
}

fn criterion_1() -> Outcome {
    for n in 1..=3 {
        for d in 0..=4 {
            let (dp, brute) = (overlap(n, d), overlap_by_enumeration(n, d));
            ensure!(dp == brute, "overlap({n},{d}) = {dp}, enumeration gives {brute}");
        }
    }
    Ok(())
}

// 2. majority measures and the shift-by-one closed form, n = 1..8
fn criterion_2() -> Outcome {
    for n in 1..=8u64 {
        ensure!(majority_measure(n) == rat(1, 2), "nu(A_{n}) = {}", majority_measure(n));
        let lowered = BaseSet::majority(n)
            .map_err(fail)?
            .lowered(DEFAULT_LOWERING_CAP)
            .map_err(fail)?;
        ensure!(lowered.nu() == rat(1, 2), "lowered nu(A_{n}) = {}", lowered.nu());
        let closed = Rational::from_integer(binomial(2 * n, n)) * pow2_inv(2 * n as u32 + 1);
        ensure!(
            symdiff_shift(n, 1) == closed,
            "symdiff_shift({n},1) = {} != {closed}",
            symdiff_shift(n, 1)
        );
    }
    ensure!(symdiff_shift(1, 1) == rat(1, 4), "n = 1 example");
    ensure!(symdiff_shift(2, 1) == rat(3, 16), "n = 2 example");
    Ok(())
}

fn random_clause(rng: &mut ChaCha8Rng, coords: std::ops::RangeInclusive<i64>, max_len: usize) -> Vec<(i64, bool)> {
    let len = rng.gen_range(1..=max_len);
    let mut out: Vec<(i64, bool)> = Vec::new();
    while out.len() < len {
        let c = rng.gen_range(coords.clone());
        if out.iter().all(|(x, _)| *x != c) {
            out.push((c, rng.gen()));
        }
    }
    out
}

fn random_cylinder(rng: &mut ChaCha8Rng, coords: std::ops::RangeInclusive<i64>, clauses: usize) -> BaseSet {
    let cs: Vec<_> = (0..clauses).map(|_| random_clause(rng, coords.clone(), 3)).collect();
    BaseSet::Cylinder(Cylinder::from_clauses(&cs).expect("small cylinder"))
}

// 3. exact mixing beyond the threshold, and a defect just inside it
fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for case in 0..100 {
        // single clauses guarantee a defect at |d| = threshold - 1
        let a = random_cylinder(&mut rng, -5..=5, 1);
        let b = random_cylinder(&mut rng, -5..=5, 1);
        let thr = mixing_threshold(&a, &b).map_err(fail)?;
        let product = a.nu() * b.nu();
        let at = |d: i64| -> Result<Rational, String> {
            a.act(&GroupElement::shift(d))
                .map_err(fail)?
                .intersection_measure(&b)
                .map_err(fail)
        };
        for d in thr as i64..thr as i64 + 4 {
            for g in [d, -d] {
                ensure!(
                    at(g)? == product,
                    "case {case}: nu(dA ∩ B) != nu(A)nu(B) at d = {g} >= {thr}"
                );
            }
        }
        let mut defect = false;
        for d in 0..thr as i64 {
            defect |= at(d)? != product || at(-d)? != product;
        }
        ensure!(defect, "case {case}: no defect below threshold {thr}");
        // unions of clauses still mix exactly beyond the threshold
        let a = random_cylinder(&mut rng, -4..=4, 2);
        let b = random_cylinder(&mut rng, -4..=4, 2);
        let thr = mixing_threshold(&a, &b).map_err(fail)? as i64;
        let product = a.nu() * b.nu();
        for g in [thr, -thr, thr + 3] {
            let v = a
                .act(&GroupElement::shift(g))
                .map_err(fail)?
                .intersection_measure(&b)
                .map_err(fail)?;
            ensure!(v == product, "case {case}: multi-clause pair fails at d = {g}");
        }
    }
    Ok(())
}

fn half_tail() -> TailContext {
    TailContext::half(BaseSet::literal(0, true)).expect("half")
}

fn random_rect(rng: &mut ChaCha8Rng, max_head: usize, nonempty: bool) -> Rectangle {
    let h = rng.gen_range(0..=max_head);
    let head = (0..h)
        .map(|_| loop {
            let clauses = rng.gen_range(1..=2);
            let f = random_cylinder(rng, 0..=3, clauses);
            if !nonempty || !f.is_empty() {
                break f;
            }
        })
        .collect();
    Rectangle::new(head, half_tail()).expect("rect")
}

// 4. P_B(A) mu(B) = P_C(A) mu(C) for A ⊆ B ∩ C
fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    for case in 0..100 {
        let b = random_rect(&mut rng, 6, true);
        let c = random_rect(&mut rng, 6, true);
        let a0 = random_rect(&mut rng, 6, false);
        let a = a0.intersect(&b).and_then(|x| x.intersect(&c)).map_err(fail)?;
        let e = RingSet::from_rect(a);
        let lhs = p_cond(&b, &e).map_err(fail)? * rect_measure(&b);
        let rhs = p_cond(&c, &e).map_err(fail)? * rect_measure(&c);
        ensure!(lhs == rhs, "case {case}: {lhs} != {rhs}");
        ensure!(lhs == mu(&e), "case {case}: conditional value differs from mu(A)");
    }
    Ok(())
}

fn pairwise_disjoint(e: &RingSet) -> Result<bool, String> {
    let p = e.pieces();
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i].separating_coordinate(&p[j]).map_err(fail)?.is_none() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

// 5. ring normalization, additivity and invariance
fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    for case in 0..150 {
        let a = random_rect(&mut rng, 4, false);
        let b = random_rect(&mut rng, 4, false);
        let c = random_rect(&mut rng, 4, false);
        let (ra, rb) = (SetExpr::rect(a.clone()), SetExpr::rect(b.clone()));
        let union = ring_normalize(&ra.clone().union(rb.clone())).map_err(fail)?;
        let inter = rect_measure(&a.intersect(&b).map_err(fail)?);
        ensure!(union.verify_certificates().map_err(fail)?, "case {case}: certificates");
        ensure!(pairwise_disjoint(&union)?, "case {case}: pieces overlap");
        ensure!(
            mu(&union) == rect_measure(&a) + rect_measure(&b) - &inter,
            "case {case}: union measure vs inclusion-exclusion"
        );
        let diff = ring_normalize(&ra.clone().diff(rb.clone())).map_err(fail)?;
        ensure!(pairwise_disjoint(&diff)?, "case {case}: difference pieces overlap");
        ensure!(
            mu(&diff) == rect_measure(&a) - &inter,
            "case {case}: difference measure"
        );
        // additivity on the disjoint decomposition (a \ b) ⊔ b
        let joined = ring_normalize(&ra.clone().diff(rb.clone()).union(rb.clone())).map_err(fail)?;
        ensure!(mu(&joined) == mu(&diff) + rect_measure(&b), "case {case}: additivity");
        // triple expression and invariance
        let e = ring_normalize(&ra.union(rb).diff(SetExpr::rect(c))).map_err(fail)?;
        let g = GroupElement::shift(rng.gen_range(-20..=20));
        let moved = diag_act(&g, &e).map_err(fail)?;
        ensure!(mu(&moved) == mu(&e), "case {case}: mu(gE) != mu(E)");
        ensure!(
            moved.verify_certificates().map_err(fail)?,
            "case {case}: moved certificates"
        );
    }
    Ok(())
}

// 6. decay to (1/2)^20 at depth 20 and a certified threshold window
fn criterion_6() -> Outcome {
    let depth = 20;
    let floor = pow2_inv(20);
    let pure = Rectangle::tail_only(half_tail());
    let thr = mixing_threshold(&BaseSet::literal(0, true), &BaseSet::literal(0, true)).map_err(fail)? as i64;
    for d in thr..thr + 30 {
        for g in [d, -d] {
            let v = c0_eval(&GroupElement::shift(g), &pure, &pure, depth).map_err(fail)?;
            ensure!(v.truncated == floor, "g = {g}: truncated {}", v.truncated);
            ensure!(
                v.infinite == MeasureValue::Exact(Rational::zero()),
                "g = {g}: infinite {:?}",
                v.infinite
            );
        }
    }
    let t = c0_threshold(&pure, &pure, &floor, depth).map_err(fail)?;
    let CompactWindow::Radius(r) = t.window else {
        return Err("window is not a radius".into());
    };
    for d in r + 1..=t.scanned_to + 10 {
        for g in [d as i64, -(d as i64)] {
            let v = c0_eval(&GroupElement::shift(g), &pure, &pure, depth).map_err(fail)?;
            ensure!(v.truncated <= floor, "outside window at g = {g}: {}", v.truncated);
        }
    }
    // with a head: window from the thresholds, scan confirms
    let headed = Rectangle::new(
        vec![BaseSet::literal(0, true)
            .boolean(c0dyn::base::BoolOp::Intersect, &BaseSet::literal(1, true))
            .map_err(fail)?],
        half_tail(),
    )
    .map_err(fail)?;
    let eps = pow2_inv(19);
    let t = c0_threshold(&headed, &pure, &eps, depth).map_err(fail)?;
    let CompactWindow::Radius(r) = t.window else {
        return Err("window is not a radius".into());
    };
    for d in r + 1..=t.scanned_to + 10 {
        for g in [d as i64, -(d as i64)] {
            let v = c0_eval(&GroupElement::shift(g), &headed, &pure, depth).map_err(fail)?;
            ensure!(v.truncated <= eps, "headed: outside window at g = {g}");
        }
    }
    Ok(())
}

// 7. witness coefficient lower bounds for K = 6, M = 3
fn criterion_7() -> Outcome {
    let schedule = build_schedule(6, 3).map_err(fail)?;
    ensure!(
        schedule.verify().is_empty(),
        "schedule certificates fail re-verification"
    );
    let width = pow2_inv(10);
    for m in 1..=3u64 {
        let target = exp_neg_enclosure(&rat(1, m as i64), &width).map_err(fail)?;
        ensure!(target.width() <= width, "enclosure too wide");
        for g in -(m as i64)..=m as i64 {
            for depth in 1..=6 {
                let c = coefficient(&GroupElement::shift(g), m, depth, &schedule).map_err(fail)?;
                ensure!(
                    c.lo() >= target.lo(),
                    "m={m} g={g} D={depth}: lo {} < {}",
                    c.lo(),
                    target.lo()
                );
                ensure!(c.hi() <= &Rational::one(), "m={m} g={g} D={depth}: hi above 1");
                if m == 3 {
                    ensure!(c.lo() > &rat(143, 200), "m=3 g={g} D={depth}: lo not above 143/200");
                }
            }
        }
    }
    Ok(())
}

// 8. 256 pairwise disjoint rectangles of measure 1
fn criterion_8() -> Outcome {
    let fam = disjoint_family(8, &BaseSet::literal(0, true)).map_err(fail)?;
    ensure!(fam.pieces().len() == 256, "{} pieces", fam.pieces().len());
    ensure!(
        fam.pieces().iter().all(|p| rect_measure(p) == Rational::one()),
        "a piece has measure != 1"
    );
    ensure!(
        fam.certificates().len() == 256 * 255 / 2,
        "{} certificates",
        fam.certificates().len()
    );
    ensure!(fam.verify_certificates().map_err(fail)?, "stored certificates fail");
    ensure!(pairwise_disjoint(&fam)?, "independent disjointness check fails");
    ensure!(
        mu(&fam) == Rational::from_integer(256.into()),
        "total measure {}",
        mu(&fam)
    );
    Ok(())
}

// 9. rotation by a third of a turn on the half circle
fn criterion_9() -> Outcome {
    let a = BaseSet::arc(rat(0, 1), rat(1, 2)).map_err(fail)?;
    for depth in [1usize, 5, 20] {
        let r = rotation_counterexample(&rat(1, 3), &a, depth).map_err(fail)?;
        ensure!(r.overlap == rat(1, 6), "overlap {}", r.overlap);
        ensure!(r.factor == rat(1, 3), "factor {}", r.factor);
        let expected = Rational::one() / Rational::from_integer(3.into()).pow(depth as i32);
        ensure!(r.truncated == expected, "truncated {} at depth {depth}", r.truncated);
        ensure!(
            r.infinite == MeasureValue::Exact(Rational::zero()),
            "infinite {:?}",
            r.infinite
        );
        ensure!(
            r.identity_infinite == MeasureValue::Exact(Rational::one()),
            "identity {:?}",
            r.identity_infinite
        );
    }
    Ok(())
}

// 10. product sandwich, certificate closure, fc refutation and certification
fn criterion_10() -> Outcome {
    // sandwich
    let x: Vec<Rational> = (1..=16u32).map(|k| Rational::one() - pow2_inv(2 * k)).collect();
    let a: Vec<Rational> = (1..=16u32).map(|k| pow2_inv(2 * k)).collect();
    ensure!(
        convergence_lemma_check(&x, &a, 1).map_err(fail)?.holds,
        "geometric sandwich"
    );
    let ones = vec![Rational::one(); 8];
    let zeros = vec![Rational::zero(); 8];
    let rep = convergence_lemma_check(&ones, &zeros, 1).map_err(fail)?;
    ensure!(
        rep.rows
            .iter()
            .all(|r| r.lower.is_one() && r.middle.is_one() && r.upper.is_one()),
        "constant sandwich"
    );
    let mut bad = a.clone();
    bad[4] = rat(1, 2);
    ensure!(
        matches!(
            convergence_lemma_check(&x, &bad, 1),
            Err(c0dyn::Error::Precondition { index: 5, .. })
        ),
        "a_5 = 1/2 must be refused at index 5"
    );

    // fc: constant product refuted, X_m certified
    let constant = Rectangle::tail_only(half_tail());
    ensure!(
        fc_check(&constant, &CompactWindow::radius(1)).map_err(fail)?
            == FcOutcome::Refuted {
                index: 1,
                factor: rat(1, 2)
            },
        "constant product not refuted at index 1"
    );
    let schedule = Arc::new(build_schedule(5, 3).map_err(fail)?);
    for m in 1..=3 {
        let xm = WitnessVector::new(Arc::clone(&schedule), m).map_err(fail)?;
        let FcOutcome::Certified(cert) = fc_check(&xm.support, &CompactWindow::radius(m)).map_err(fail)? else {
            return Err(format!("X_{m} not certified"));
        };
        let target = exp_neg_enclosure(&rat(1, m as i64), &pow2_inv(10)).map_err(fail)?;
        ensure!(
            cert.tail_product_lower(1) >= *target.lo(),
            "X_{m}: tail product below lo(e^-1/m)"
        );
    }

    // closure under intersection on desk instances
    let maj = |n, d| BaseSet::Majority(MajoritySet { n, offset: d });
    let lit = |c, b| BaseSet::literal(c, b);
    for m in 1..=3u64 {
        let tail = TailContext::schedule(Arc::clone(&schedule), m).map_err(fail)?;
        // equal head lengths keep every intersection inside the lowering cap
        let pairs = [
            (vec![maj(1, 0), maj(2, 0)], vec![maj(2, 1), lit(0, true)]),
            (
                vec![maj(1, -1), maj(1, 1), lit(2, false)],
                vec![maj(1, 1), maj(1, 0), maj(2, 2)],
            ),
            (vec![lit(0, true), maj(3, 0)], vec![maj(1, 0), lit(1, false)]),
        ];
        for (i, (ha, hb)) in pairs.into_iter().enumerate() {
            let a = Rectangle::new(ha, tail.clone()).map_err(fail)?;
            let b = Rectangle::new(hb, tail.clone()).map_err(fail)?;
            let w = CompactWindow::radius(m);
            let (FcOutcome::Certified(ca), FcOutcome::Certified(cb)) =
                (fc_check(&a, &w).map_err(fail)?, fc_check(&b, &w).map_err(fail)?)
            else {
                return Err(format!("m={m} pair {i}: operands not certified"));
            };
            let (c, cc) = fc_intersect(&a, &ca, &b, &cb).map_err(fail)?;
            let exact = fc_exact_minima(&c, &w, cc.depth()).map_err(fail)?;
            for (k, (l, e)) in cc.lower.iter().zip(&exact).enumerate() {
                ensure!(
                    l <= e,
                    "m={m} pair {i} index {}: assembled {l} exceeds exact {e}",
                    k + 1
                );
            }
            for n in 1..=cc.depth() + 3 {
                ensure!(
                    cc.tail_eps(n + 1) <= cc.tail_eps(n),
                    "m={m} pair {i}: eps not decreasing"
                );
            }
        }
    }
    Ok(())
}

fn read_dir_sorted(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(fail)? {
        let entry = entry.map_err(fail)?;
        let name = entry.file_name().to_string_lossy().into_owned();
        files.push((name, fs::read(entry.path()).map_err(fail)?));
    }
    files.sort();
    Ok(files)
}

// 11. two report runs on the default config are byte-identical
fn criterion_11() -> Outcome {
    let tmp = tempfile::tempdir().map_err(fail)?;
    let mut outputs = Vec::new();
    for run in ["first", "second"] {
        let config = ExperimentConfig {
            output_dir: tmp.path().join(run),
            ..ExperimentConfig::default()
        };
        let outcome = run_full_report(&config).map_err(fail)?;
        ensure!(outcome.passed(), "{run} report has failures: {:?}", outcome.failures());
        outputs.push(read_dir_sorted(&config.output_dir)?);
    }
    ensure!(!outputs[0].is_empty(), "report wrote nothing");
    let names: Vec<_> = outputs[0].iter().map(|(n, _)| n.clone()).collect();
    ensure!(
        names == outputs[1].iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
        "file lists differ"
    );
    for ((name, x), (_, y)) in outputs[0].iter().zip(&outputs[1]) {
        ensure!(x == y, "{name} differs between runs");
    }
    Ok(())
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion {
            id: 1,
            name: "overlap DP equals exhaustive enumeration",
            limit: secs(10),
            run: criterion_1,
        },
        Criterion {
            id: 2,
            name: "majority measures and shift-one closed form",
            limit: secs(1),
            run: criterion_2,
        },
        Criterion {
            id: 3,
            name: "exact strong mixing on random cylinders",
            limit: secs(10),
            run: criterion_3,
        },
        Criterion {
            id: 4,
            name: "conditional measure is well defined",
            limit: secs(10),
            run: criterion_4,
        },
        Criterion {
            id: 5,
            name: "ring normalization, additivity, invariance",
            limit: secs(30),
            run: criterion_5,
        },
        Criterion {
            id: 6,
            name: "C0 decay at depth 20",
            limit: secs(10),
            run: criterion_6,
        },
        Criterion {
            id: 7,
            name: "witness coefficient lower bounds",
            limit: secs(60),
            run: criterion_7,
        },
        Criterion {
            id: 8,
            name: "disjoint unit-measure family of 256",
            limit: secs(5),
            run: criterion_8,
        },
        Criterion {
            id: 9,
            name: "rotation by 1/3 kills the coefficient",
            limit: secs(1),
            run: criterion_9,
        },
        Criterion {
            id: 10,
            name: "sandwich, certificate closure, fc checks",
            limit: secs(10),
            run: criterion_10,
        },
        Criterion {
            id: 11,
            name: "report is deterministic",
            limit: secs(120),
            run: criterion_11,
        },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(()) if elapsed > c.limit => Err(format!("took {elapsed:.2?}, limit {:?}", c.limit)),
            r => r,
        };
        match &result {
            Ok(()) => println!("criterion {:>2} PASS  {} ({elapsed:.2?})", c.id, c.name),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {} ({elapsed:.2?}): {e}", c.id, c.name);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
