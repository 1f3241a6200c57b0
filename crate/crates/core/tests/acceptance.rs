//! Acceptance suite: runs criteria 1 to 8 and prints one line per criterion.
//! Exits nonzero if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use dgtwist::baroracle::{compare_with_twist, BarOracle};
use dgtwist::dgcat::{interval, FiniteDgCategory};
use dgtwist::fixtures::{collapse_category, collapse_functor};
use dgtwist::operad::{check_contractible, sweep, sweep_ordinals, Ordinal2, SweepReport};
use dgtwist::scalar::Field;
use dgtwist::twist::{
    check_projection_square, twisted_map_on_second_factor, Morphism, TwistedCategory,
};
use rayon::prelude::*;

const FP: Field = Field::Fp(32003);

struct Verdict {
    passed: bool,
    detail: String,
}

impl Verdict {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Verdict {
            passed,
            detail: detail.into(),
        }
    }
}

struct Instance {
    name: String,
    n: usize,
    twisted: TwistedCategory,
    classical: FiniteDgCategory,
}

/// Shared state computed once and reused by later criteria.
struct Context {
    instances: Vec<Instance>,
    sweep_q: Option<SweepReport>,
}

fn golden(field: Field) -> Result<Verdict, String> {
    let o: Ordinal2 = "1,1".parse().map_err(|e| format!("{e}"))?;
    let cert = check_contractible(&o, field, None, false).map_err(|e| e.to_string())?;
    let dims_ok = cert.dims == BTreeMap::from([(-1, 1), (0, 2)]);
    let d = cert
        .differentials
        .get(&-1)
        .ok_or("no differential in degree -1")?;
    let (one, minus) = (field.from_i64(1), field.from_i64(-1));
    let (x, y) = (d.get(0, 0), d.get(1, 0));
    let shape_ok = d.rows() == 2 && d.cols() == 1;
    let entries_ok = (x == one && y == minus) || (x == minus && y == one);
    let ranks_ok = cert.ranks == BTreeMap::from([(-1, 1)]);
    let h_ok = cert.cohomology == BTreeMap::from([(0, 1)]);
    let passed = dims_ok && shape_ok && entries_ok && ranks_ok && h_ok && cert.verdict;
    Ok(Verdict::new(
        passed,
        format!(
            "dims {:?}, d = ({x}, {y})ᵀ, rank {:?}, H {:?}, verdict {}",
            cert.dims, cert.ranks, cert.cohomology, cert.verdict
        ),
    ))
}

fn criterion_1(_: &mut Context) -> Result<Verdict, String> {
    let start = Instant::now();
    let mut v = golden(Field::Q)?;
    let elapsed = start.elapsed();
    v.passed &= elapsed < Duration::from_secs(1);
    v.detail = format!("{}, {elapsed:.2?} (limit 1 s)", v.detail);
    Ok(v)
}

fn criterion_2(ctx: &mut Context) -> Result<Verdict, String> {
    let start = Instant::now();
    let report = sweep(3, 5, Field::Q, None, false).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let failing: Vec<String> = report
        .entries
        .iter()
        .filter(|e| e.status != dgtwist::operad::SweepStatus::Pass)
        .map(|e| format!("{} {:?}", e.ordinal, e.status))
        .collect();
    let passed =
        report.all_passed && report.entries.len() == 83 && elapsed < Duration::from_secs(300);
    let detail = format!(
        "{} ordinals (k <= 3, sum <= 5): {} pass, {} fail, {} aborted{}, {elapsed:.2?} (limit 300 s)",
        report.entries.len(),
        report.passed,
        report.failed,
        report.aborted,
        if failing.is_empty() { String::new() } else { format!(" [{}]", failing.join("; ")) }
    );
    ctx.sweep_q = Some(report);
    Ok(Verdict::new(passed, detail))
}

fn criterion_3(ctx: &mut Context) -> Result<Verdict, String> {
    let start = Instant::now();
    let results: Vec<Result<(Instance, usize, bool), String>> = common::projection_instances()
        .into_par_iter()
        .map(|(name, n, base)| {
            let twisted =
                TwistedCategory::new(n, base).map_err(|e| format!("{name}, n={n}: {e}"))?;
            let classical = twisted.classical().map_err(|e| e.to_string())?;
            let projection = twisted
                .projection()
                .map_err(|e| format!("{name}, n={n}: {e}"))?;
            let cert = projection
                .quasi_equivalence_certificate(Field::Q)
                .map_err(|e| format!("{name}, n={n}: {e}"))?;
            let pairs = cert.pairs.len();
            let ok = cert.quasi_equivalence;
            Ok((
                Instance {
                    name,
                    n,
                    twisted,
                    classical,
                },
                pairs,
                ok,
            ))
        })
        .collect();
    let elapsed = start.elapsed();
    let mut pairs = 0;
    let mut failures = Vec::new();
    for r in results {
        let (inst, p, ok) = r?;
        pairs += p;
        if !ok {
            failures.push(format!("{} n={}", inst.name, inst.n));
        }
        ctx.instances.push(inst);
    }
    let passed = failures.is_empty() && elapsed < Duration::from_secs(120);
    Ok(Verdict::new(
        passed,
        format!(
            "{} instances, {pairs} hom pairs, {} failing{}, {elapsed:.2?} (limit 120 s)",
            ctx.instances.len(),
            failures.len(),
            if failures.is_empty() {
                String::new()
            } else {
                format!(" [{}]", failures.join("; "))
            }
        ),
    ))
}

fn criterion_4(ctx: &mut Context) -> Result<Verdict, String> {
    let results: Vec<Result<(usize, Vec<String>), String>> = ctx
        .instances
        .par_iter()
        .map(|inst| {
            let base = inst.twisted.base().clone();
            let oracle = BarOracle::new(base.clone()).map_err(|e| e.to_string())?;
            let t = inst.twisted.twist();
            let mut checked = 0;
            let mut failures = Vec::new();
            for a in 0..=inst.n {
                for b in a..=inst.n {
                    for x in 0..base.num_objects() {
                        for y in 0..base.num_objects() {
                            let cmp = compare_with_twist(&oracle, t, (a, x), (b, y), Field::Q)
                                .map_err(|e| e.to_string())?;
                            let acyclic = oracle
                                .acyclicity_report(&oracle.k_complex(a, x, b, y), Field::Q)
                                .map_err(|e| e.to_string())?;
                            checked += 1;
                            if !cmp.passed() || !acyclic.passed {
                                failures.push(format!(
                                    "{} n={} ({a},{x})->({b},{y})",
                                    inst.name, inst.n
                                ));
                            }
                        }
                    }
                }
            }
            Ok((checked, failures))
        })
        .collect();
    let mut checked = 0;
    let mut failures = Vec::new();
    for r in results {
        let (c, f) = r?;
        checked += c;
        failures.extend(f);
    }
    Ok(Verdict::new(
        failures.is_empty(),
        format!(
            "{checked} hom pairs compared with the bar-complex oracle (bijection, degrees, differentials, dims, H, bar-degree acyclicity), {} failing{}",
            failures.len(),
            failures.first().map_or(String::new(), |f| format!(", first {f}"))
        ),
    ))
}

/// All chains of non-identity basis morphisms of length at most `max_len`.
fn chains(c: &FiniteDgCategory, max_len: usize) -> Vec<(usize, Vec<Morphism>)> {
    let mut all: Vec<(usize, Vec<Morphism>)> =
        (0..c.num_objects()).map(|x| (x, Vec::new())).collect();
    let mut frontier = all.clone();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (x, chain) in &frontier {
            let z = chain.last().map_or(*x, |g| g.dst);
            for y in 0..c.num_objects() {
                for i in 0..c.hom(z, y).len() {
                    if !c.is_identity(z, y, i) {
                        let mut longer = chain.clone();
                        longer.push(Morphism::new(z, y, i));
                        next.push((*x, longer));
                    }
                }
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all
}

/// Agreement of the composite-generator differential with the differential
/// of its expansion, for every generator range of length at least two.
fn composite_consistency(t: &TwistedCategory) -> (usize, usize) {
    let tw = t.twist();
    let mut checked = 0;
    let mut failures = 0;
    for (x, chain) in chains(t.base(), 3) {
        for a in 0..t.n() {
            for b in a + 2..=t.n() {
                checked += 1;
                let direct = tw.composite_epsilon_differential(a, b, x, &chain);
                let expanded = tw
                    .expand_composite_epsilon(a, b, x, &chain)
                    .map(|e| tw.differential_of(&e));
                if direct.is_err() || direct != expanded {
                    failures += 1;
                }
            }
        }
    }
    (checked, failures)
}

/// Every stage `D_j` of every sweep ordinal, with its twisted construction
/// when `j > 1`.
type Stage = (String, Arc<FiniteDgCategory>, Option<TwistedCategory>);

fn sweep_stage_categories() -> Result<Vec<Stage>, String> {
    let mut cache: BTreeMap<Vec<usize>, Arc<FiniteDgCategory>> = BTreeMap::new();
    let mut out = Vec::new();
    for o in sweep_ordinals(3, 5) {
        let p = o.parts();
        for j in 1..=p.len() {
            let key = p[..j].to_vec();
            if cache.contains_key(&key) {
                continue;
            }
            let name = format!("D{key:?}");
            let (c, twisted) = if j == 1 {
                (Arc::new(interval(p[0])), None)
            } else {
                let t = TwistedCategory::new(p[j - 1], cache[&p[..j - 1]].clone())
                    .map_err(|e| format!("{name}: {e}"))?;
                (t.category().clone(), Some(t))
            };
            cache.insert(key, c.clone());
            out.push((name, c, twisted));
        }
    }
    Ok(out)
}

fn criterion_5(ctx: &mut Context) -> Result<Verdict, String> {
    let stages = sweep_stage_categories()?;
    let mut categories: Vec<(String, &FiniteDgCategory)> = Vec::new();
    for inst in &ctx.instances {
        categories.push((
            format!("{} n={} twisted", inst.name, inst.n),
            inst.twisted.category(),
        ));
        categories.push((
            format!("{} n={} classical", inst.name, inst.n),
            &inst.classical,
        ));
        if inst.n == 0 {
            categories.push((inst.name.clone(), inst.twisted.base()));
        }
    }
    for (name, c, _) in &stages {
        categories.push((name.clone(), c));
    }
    let axiom_failures: Vec<String> = categories
        .par_iter()
        .filter_map(|(name, c)| c.validate().first_failure().map(|f| format!("{name}: {f}")))
        .collect();
    let mut twisted: Vec<&TwistedCategory> = ctx.instances.iter().map(|i| &i.twisted).collect();
    twisted.extend(stages.iter().filter_map(|(_, _, t)| t.as_ref()));
    let (eq_checked, eq_failures) = twisted
        .par_iter()
        .map(|t| composite_consistency(t))
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let words = common::randomized_word_suite(60);
    let passed = axiom_failures.is_empty()
        && eq_failures == 0
        && words.failures.is_empty()
        && words.leibniz >= 1000
        && words.associativity >= 1000;
    Ok(Verdict::new(
        passed,
        format!(
            "{} categories validated (d², Leibniz, associativity, units), {} failing; {eq_checked} composite-generator differentials, {eq_failures} failing; {} random word pairs, {} triples, {} d² and {} composite samples, {} failing{}",
            categories.len(),
            axiom_failures.len(),
            words.leibniz,
            words.associativity,
            words.d_squared,
            words.composite_epsilon,
            words.failures.len(),
            axiom_failures
                .first()
                .or(words.failures.first())
                .map_or(String::new(), |f| format!(", first {f}"))
        ),
    ))
}

fn criterion_6(_: &mut Context) -> Result<Verdict, String> {
    let f = collapse_functor();
    let plain = f
        .quasi_equivalence_certificate(Field::Q)
        .map_err(|e| e.to_string())?;
    let source =
        TwistedCategory::new(1, Arc::new(collapse_category())).map_err(|e| e.to_string())?;
    let target = TwistedCategory::new(1, Arc::new(interval(1))).map_err(|e| e.to_string())?;
    let lifted = twisted_map_on_second_factor(&source, &target, &f).map_err(|e| e.to_string())?;
    let lifted_cert = lifted
        .quasi_equivalence_certificate(Field::Q)
        .map_err(|e| e.to_string())?;
    let square = check_projection_square(&source, &target, &f).map_err(|e| e.to_string())?;
    let words: usize = source.all_words().map(|(_, w)| w.len()).sum();
    let passed = plain.quasi_equivalence
        && lifted_cert.quasi_equivalence
        && square.passed()
        && square.checked == words;
    Ok(Verdict::new(
        passed,
        format!(
            "F quasi-equivalence {}, Id ⊗̃ F quasi-equivalence {} ({} hom pairs), square on {}/{words} basis words with {} failures",
            plain.quasi_equivalence,
            lifted_cert.quasi_equivalence,
            lifted_cert.pairs.len(),
            square.checked,
            square.failures
        ),
    ))
}

fn criterion_7(ctx: &mut Context) -> Result<Verdict, String> {
    let mut pairs = 0;
    let mut failures = Vec::new();
    let mut differs_from_total_dim = 0;
    for inst in &ctx.instances {
        let w = inst.twisted.category();
        for s in 0..w.num_objects() {
            for t in 0..w.num_objects() {
                let (h, k) = (w.hom(s, t), inst.classical.hom(s, t));
                if h.is_empty() && k.is_empty() {
                    continue;
                }
                pairs += 1;
                if h.euler_characteristic() != k.euler_characteristic() {
                    failures.push(format!(
                        "{} n={} {}->{}",
                        inst.name,
                        inst.n,
                        w.object_label(s),
                        w.object_label(t)
                    ));
                }
                if h.euler_characteristic() != k.len() as i64 {
                    differs_from_total_dim += 1;
                }
            }
        }
    }
    let report = ctx.sweep_q.as_ref().ok_or("criterion 2 did not run")?;
    let bad_chi: Vec<String> = report
        .entries
        .iter()
        .filter(|e| e.euler_characteristic != 1)
        .map(|e| e.ordinal.to_string())
        .collect();
    Ok(Verdict::new(
        failures.is_empty() && bad_chi.is_empty(),
        format!(
            "χ(twisted hom) = χ(classical hom) on {pairs} hom pairs, {} failing; χ(O(o)) = 1 on {} ordinals, {} failing; note: {differs_from_total_dim} pairs have χ ≠ ungraded dimension of the classical hom (graded reading used)",
            failures.len(),
            report.entries.len(),
            bad_chi.len()
        ),
    ))
}

fn criterion_8(ctx: &mut Context) -> Result<Verdict, String> {
    let golden_fp = golden(FP)?;
    let q = ctx.sweep_q.as_ref().ok_or("criterion 2 did not run")?;
    let fp = sweep(3, 5, FP, None, false).map_err(|e| e.to_string())?;
    let golden_q = check_contractible(&"1,1".parse().unwrap(), Field::Q, None, false)
        .map_err(|e| e.to_string())?;
    let golden_p =
        check_contractible(&"1,1".parse().unwrap(), FP, None, false).map_err(|e| e.to_string())?;
    let mismatches: Vec<String> = q
        .entries
        .iter()
        .zip(&fp.entries)
        .filter(|(a, b)| a.ordinal != b.ordinal || a.cohomology != b.cohomology)
        .map(|(a, _)| a.ordinal.to_string())
        .collect();
    let passed = golden_fp.passed
        && golden_q.cohomology == golden_p.cohomology
        && q.entries.len() == fp.entries.len()
        && mismatches.is_empty()
        && fp.all_passed;
    Ok(Verdict::new(
        passed,
        format!(
            "O(1,1) over F_32003: {}; sweep over F_32003: {} pass, {} fail, {} aborted; H dims differ from ℚ on {} ordinals",
            if golden_fp.passed { "pass" } else { "FAIL" },
            fp.passed,
            fp.failed,
            fp.aborted,
            mismatches.len()
        ),
    ))
}

type Criterion = fn(&mut Context) -> Result<Verdict, String>;

fn main() {
    let criteria: [(&str, Criterion); 8] = [
        ("golden O(1,1)", criterion_1),
        ("contractibility sweep", criterion_2),
        ("projection is a quasi-isomorphism", criterion_3),
        ("bar-complex oracle equivalence", criterion_4),
        ("axiom suites", criterion_5),
        ("collapse functor square", criterion_6),
        ("Euler characteristic", criterion_7),
        ("field robustness", criterion_8),
    ];
    let mut ctx = Context {
        instances: Vec::new(),
        sweep_q: None,
    };
    let mut all = true;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = run(&mut ctx).unwrap_or_else(|e| Verdict::new(false, format!("error: {e}")));
        all &= verdict.passed;
        println!(
            "criterion {} {}: {} ({}) [{:.2?}]",
            i + 1,
            if verdict.passed { "PASS" } else { "FAIL" },
            title,
            verdict.detail,
            start.elapsed()
        );
    }
    if !all {
        std::process::exit(1);
    }
}
