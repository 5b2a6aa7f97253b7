//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! with a failure status if any criterion fails.

mod common;

use std::cell::RefCell;
use std::collections::BTreeSet;
use std::rc::Rc;
use std::time::{Duration, Instant};

use common::{bisimilar, check_table_relations, first_word, seeded_machine};
use prodlearn::automata::DEFAULT_REVERSE_CAP;
use prodlearn::experiment::{
    hypothesis_log_csv, load_model, run_experiment, stats_csv, ExperimentConfig, LearnerKind,
    ModelSource, Split,
};
use prodlearn::models::{
    letters, make_register_component, make_register_machine, random_machine, write_moore,
};
use prodlearn::reduction::{check_allowed_outputs, run_reduction_learner, ReductionConfig};
use prodlearn::table::{lstar, lstar_factory, product_lstar, LStar};
use prodlearn::{
    learn, Alphabet, Counterexample, EqMode, MachineError, MooreMachine, Output,
    OutputDecomposition, QueryStats, SamplingEqConfig, SimulatorTeacher, Teacher,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Required MQ reduction factor of the composed learner at n = 6.
const MQ_FACTOR_AT_6: f64 = 2.0;
/// Upper bound on the log-log slope of composed-learner MQs over n = 2..7.
const MAX_PRODUCT_SLOPE: f64 = 4.0;
const MAX_PRODUCT_RATIO_7_6: f64 = 2.5;
const MIN_MONO_RATIO_7_6: f64 = 3.0;
/// Register machine and sampling seed whose hypothesis log is non-monotone.
const NON_MONOTONE_N: usize = 4;
const NON_MONOTONE_SEED: u64 = 4;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict, Duration);

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_1() -> Verdict {
    let mut sizes = Vec::new();
    for n in 2..=6 {
        let m = make_register_machine(n).unwrap();
        let expected = n << n;
        if m.size() != expected || m.minimize().size() != expected {
            return Err(format!(
                "M_{n}: {} states, minimized {}",
                m.size(),
                m.minimize().size()
            ));
        }
        let d = OutputDecomposition::bitwise(n);
        for l in 1..=n {
            let c = make_register_component(n, l).unwrap();
            let projected = m.project(&d, l - 1).unwrap().minimize().size();
            if c.size() != 2 * n || projected != 2 * n {
                return Err(format!(
                    "M_{n}^{l}: {} states, projection {projected}",
                    c.size()
                ));
            }
        }
        sizes.push(m.size());
    }
    Ok(format!("sizes {sizes:?}, components 2n"))
}

fn criterion_2() -> Verdict {
    for n in 1..=5 {
        let m = make_register_machine(n).unwrap();
        let parts: Vec<MooreMachine> = (1..=n)
            .map(|l| make_register_component(n, l).unwrap())
            .collect();
        let product = MooreMachine::product_all(&parts).unwrap();
        if !m.equivalent(&product).unwrap().is_equivalent() {
            return Err(format!("M_{n} differs from the product of its components"));
        }
    }
    Ok("M_1..M_5 equivalent to their component products".into())
}

fn learners_agree(target: &MooreMachine, d: &OutputDecomposition) -> Result<(), String> {
    let h = lstar(&mut SimulatorTeacher::exact(target.clone())).map_err(|e| e.to_string())?;
    if !bisimilar(&h.hypothesis, target) {
        return Err("lstar".into());
    }
    let p = product_lstar(&mut SimulatorTeacher::exact(target.clone()), d.clone())
        .map_err(|e| e.to_string())?;
    if !bisimilar(&p.outcome.hypothesis, target) {
        return Err("product_lstar".into());
    }
    let r = run_reduction_learner(
        &mut SimulatorTeacher::exact(target.clone()),
        d,
        lstar_factory(),
        &ReductionConfig::default(),
    )
    .map_err(|e| e.to_string())?;
    if !bisimilar(&r.hypothesis, target) {
        return Err("reduction".into());
    }
    Ok(())
}

fn criterion_3() -> Verdict {
    for n in 1..=4 {
        let m = make_register_machine(n).unwrap();
        learners_agree(&m, &OutputDecomposition::bitwise(n)).map_err(|e| format!("M_{n}: {e}"))?;
    }
    for seed in 0..50 {
        let m = seeded_machine(seed, 1 + seed as usize % 8, 2, 2);
        learners_agree(&m, &OutputDecomposition::bitwise(2))
            .map_err(|e| format!("random seed {seed}: {e}"))?;
    }
    Ok("M_1..M_4 and 50 random targets learned by all three learners".into())
}

fn mono_and_product(n: usize) -> (QueryStats, QueryStats) {
    let m = make_register_machine(n).unwrap();
    let mut mono = SimulatorTeacher::exact(m.clone());
    lstar(&mut mono).unwrap();
    let mut product = SimulatorTeacher::exact(m);
    run_reduction_learner(
        &mut product,
        &OutputDecomposition::bitwise(n),
        lstar_factory(),
        &ReductionConfig::default(),
    )
    .unwrap();
    (mono.stats(), product.stats())
}

fn criterion_4() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 4..=6 {
        let (mono, product) = mono_and_product(n);
        let (pm, mm) = (product.total_mqs(), mono.total_mqs());
        let (pa, ma) = (product.action_count, mono.action_count);
        ok &= pm < mm && pa < ma;
        if n == 6 {
            ok &= mm as f64 >= MQ_FACTOR_AT_6 * pm as f64;
        }
        parts.push(format!("n={n}: MQs {pm} vs {mm}, actions {pa} vs {ma}"));
    }
    check(ok, format!("product vs mono; {}", parts.join("; ")))
}

fn criterion_5() -> Verdict {
    let ns: Vec<usize> = (2..=7).collect();
    let mut product = Vec::new();
    let mut mono = Vec::new();
    for &n in &ns {
        let (m, p) = mono_and_product(n);
        product.push(p.total_mqs() as f64);
        mono.push(m.total_mqs() as f64);
    }
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = product.iter().map(|m| m.ln()).collect();
    let mean_x = xs.iter().sum::<f64>() / xs.len() as f64;
    let mean_y = ys.iter().sum::<f64>() / ys.len() as f64;
    let slope = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum::<f64>()
        / xs.iter().map(|x| (x - mean_x).powi(2)).sum::<f64>();
    let product_ratio = product[5] / product[4];
    let mono_ratio = mono[5] / mono[4];
    check(
        slope <= MAX_PRODUCT_SLOPE
            && product_ratio < MAX_PRODUCT_RATIO_7_6
            && mono_ratio > MIN_MONO_RATIO_7_6,
        format!(
            "product slope {slope:.3} (<= {MAX_PRODUCT_SLOPE}), product MQ(7)/MQ(6) {product_ratio:.3} \
             (< {MAX_PRODUCT_RATIO_7_6}), mono MQ(7)/MQ(6) {mono_ratio:.3} (> {MIN_MONO_RATIO_7_6}); \
             product {product:?}, mono {mono:?}"
        ),
    )
}

fn lemma_run(target: &MooreMachine, d: OutputDecomposition) -> Result<usize, String> {
    let seen: Rc<RefCell<Vec<Result<(), String>>>> = Rc::new(RefCell::new(Vec::new()));
    let sink = Rc::clone(&seen);
    let mut learner = LStar::product(target.inputs().clone(), d)
        .with_observer(move |t| sink.borrow_mut().push(check_table_relations(t)));
    learn(&mut learner, &mut SimulatorTeacher::exact(target.clone())).map_err(|e| e.to_string())?;
    let results = seen.borrow();
    results
        .iter()
        .cloned()
        .collect::<Result<Vec<()>, String>>()?;
    Ok(results.len())
}

fn criterion_6() -> Verdict {
    let mut snapshots = 0;
    for n in 2..=3 {
        let m = make_register_machine(n).unwrap();
        snapshots +=
            lemma_run(&m, OutputDecomposition::bitwise(n)).map_err(|e| format!("M_{n}: {e}"))?;
    }
    for seed in 0..200 {
        let m = seeded_machine(1000 + seed, 1 + seed as usize % 8, 2, 2);
        snapshots += lemma_run(&m, OutputDecomposition::bitwise(2))
            .map_err(|e| format!("random seed {seed}: {e}"))?;
    }
    Ok(format!(
        "{snapshots} table snapshots satisfy the implications"
    ))
}

fn criterion_7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..50 {
        let size = rng.random_range(1..=8);
        let k = rng.random_range(1..=3);
        let m = random_machine(&mut rng, size, &letters(k), 2, &["0", "1"]);
        let r = m.reverse(DEFAULT_REVERSE_CAP).map_err(|e| e.to_string())?;
        for _ in 0..1000 {
            let len = rng.random_range(0..20);
            let w: Vec<usize> = (0..len).map(|_| rng.random_range(0..k)).collect();
            let rev: Vec<usize> = w.iter().rev().copied().collect();
            if r.run(&w).unwrap() != m.run(&rev).unwrap() {
                return Err(format!("machine {i}, word {w:?}"));
            }
        }
    }
    Ok("50 machines x 1000 words".into())
}

/// Sampling teacher that checks every counterexample it hands out.
struct Audited {
    inner: SimulatorTeacher,
    checked: usize,
    unsound: usize,
}

impl Teacher for Audited {
    fn inputs(&self) -> &Alphabet {
        self.inner.inputs()
    }
    fn mq(&self, w: &[usize]) -> Result<Output, MachineError> {
        self.inner.mq(w)
    }
    fn dispatch_mq(&self, w: &[usize]) -> Result<Output, MachineError> {
        self.inner.dispatch_mq(w)
    }
    fn eq(&mut self, h: &MooreMachine) -> Result<Option<Counterexample>, MachineError> {
        let ce = self.inner.eq(h)?;
        if let Some(ce) = &ce {
            self.checked += 1;
            let target = self.inner.target().run(&ce.word)?;
            let actual = h.run(&ce.word)?;
            if target == actual || &ce.expected != target || &ce.actual != actual {
                self.unsound += 1;
            }
        }
        Ok(ce)
    }
    fn stats(&self) -> QueryStats {
        self.inner.stats()
    }
}

fn artifacts(cfg: &ExperimentConfig) -> String {
    let model = load_model(&cfg.model, cfg.split).unwrap();
    let report = run_experiment(cfg, &model).unwrap();
    stats_csv(&[report.stats]).unwrap()
        + &hypothesis_log_csv(&report.hypothesis_log).unwrap()
        + &write_moore(&report.learned)
}

fn criterion_8() -> Verdict {
    let mut checked = 0;
    let mut unsound = 0;
    for n in 2..=4 {
        for seed in 0..5 {
            let cfg = SamplingEqConfig {
                seed,
                ..SamplingEqConfig::default()
            };
            let target = make_register_machine(n).unwrap();
            let mut teacher = Audited {
                inner: SimulatorTeacher::new(target, EqMode::Sampling(cfg)),
                checked: 0,
                unsound: 0,
            };
            run_reduction_learner(
                &mut teacher,
                &OutputDecomposition::bitwise(n),
                lstar_factory(),
                &ReductionConfig::default(),
            )
            .map_err(|e| e.to_string())?;
            lstar(&mut teacher).map_err(|e| e.to_string())?;
            checked += teacher.checked;
            unsound += teacher.unsound;
        }
    }
    let mut identical = true;
    for learner in [LearnerKind::Product, LearnerKind::Mono] {
        let cfg = ExperimentConfig {
            model: ModelSource::Register(4),
            learner,
            split: Split::Bits,
            eq: EqMode::Sampling(SamplingEqConfig::default()),
            seed: 21,
        };
        identical &= artifacts(&cfg) == artifacts(&cfg);
    }
    check(
        unsound == 0 && identical && checked > 0,
        format!("{checked} counterexamples verified, {unsound} unsound; reruns byte-identical: {identical}"),
    )
}

fn sampled_log(n: usize, seed: u64) -> (Vec<usize>, usize) {
    let target = make_register_machine(n).unwrap();
    let cfg = SamplingEqConfig {
        seed,
        ..SamplingEqConfig::default()
    };
    let mut teacher = SimulatorTeacher::new(target.clone(), EqMode::Sampling(cfg));
    let outcome = run_reduction_learner(
        &mut teacher,
        &OutputDecomposition::bitwise(n),
        lstar_factory(),
        &ReductionConfig::default(),
    )
    .unwrap();
    (outcome.hypothesis_log, target.minimize().size())
}

fn criterion_9() -> Verdict {
    let (log, size) = sampled_log(NON_MONOTONE_N, NON_MONOTONE_SEED);
    let non_monotone = log.windows(2).any(|w| w[1] < w[0]);
    let mut finals_ok = log.last() == Some(&size);
    for n in 2..=4 {
        for seed in 0..8 {
            let (log, size) = sampled_log(n, seed);
            finals_ok &= log.last() == Some(&size);
        }
    }
    check(
        non_monotone && finals_ok,
        format!(
            "M_{NON_MONOTONE_N} seed {NON_MONOTONE_SEED}: log {log:?}; final = minimized size on all seeds: {finals_ok}"
        ),
    )
}

fn criterion_10() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut found = 0;
    for i in 0..100 {
        let size = rng.random_range(1..=8);
        let k = rng.random_range(1..=3);
        let h = random_machine(&mut rng, size, &letters(k), 2, &["0", "1"]);
        let all = ["00", "01", "10", "11"];
        let allowed: BTreeSet<Output> = all
            .iter()
            .filter(|_| rng.random_bool(0.6))
            .map(|s| Output::from_chars(s))
            .collect();
        let oracle = first_word(k, size, |w| !allowed.contains(h.run(w).unwrap()));
        let trace = check_allowed_outputs(&h, &allowed);
        if trace != oracle {
            return Err(format!("hypothesis {i}: {trace:?} vs oracle {oracle:?}"));
        }
        found += usize::from(trace.is_some());
    }
    Ok(format!("100 hypotheses, {found} with a disallowed output"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        (
            "register machine sizes",
            criterion_1,
            Duration::from_secs(10),
        ),
        (
            "decomposition equivalence",
            criterion_2,
            Duration::from_secs(30),
        ),
        ("learner correctness", criterion_3, Duration::from_secs(120)),
        (
            "query reduction direction",
            criterion_4,
            Duration::from_secs(300),
        ),
        ("empirical scaling", criterion_5, Duration::from_secs(600)),
        (
            "table implication suite",
            criterion_6,
            Duration::from_secs(120),
        ),
        ("reversal identity", criterion_7, Duration::from_secs(60)),
        (
            "sampling soundness and determinism",
            criterion_8,
            Duration::from_secs(60),
        ),
        (
            "hypothesis log shape",
            criterion_9,
            Duration::from_secs(600),
        ),
        (
            "disallowed output detection",
            criterion_10,
            Duration::from_secs(60),
        ),
    ];
    let mut failures = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = run();
        let elapsed = start.elapsed();
        let (status, detail) = match (&verdict, elapsed <= *budget) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("{d}; over time budget {budget:?}")),
            (Err(d), _) => ("FAIL", d.clone()),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!(
            "criterion {:>2} {status} [{:.2}s] {name}: {detail}",
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
