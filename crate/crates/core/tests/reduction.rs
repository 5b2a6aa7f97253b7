mod common;

use std::collections::BTreeSet;
use std::sync::{Arc, Mutex};

use common::{bisimilar, seeded_machine};
use prodlearn::models::{letters, make_register_machine};
use prodlearn::reduction::{run_reduction_learner, ReductionConfig};
use prodlearn::table::{lstar, lstar_factory, LStar};
use prodlearn::{
    ActiveLearner, Alphabet, Counterexample, LearnError, MooreMachine, Output, OutputDecomposition,
    SimulatorTeacher, Step, Teacher,
};

/// Bit 0 is set when the number of `a`s is 2 mod 3, bit 1 is always 0.
fn counter_and_constant() -> MooreMachine {
    MooreMachine::from_fn(
        letters(2),
        3,
        0,
        |q, x| if x == 0 { (q + 1) % 3 } else { q },
        |q| Output::from_chars(if q == 2 { "10" } else { "00" }),
    )
    .unwrap()
}

type HypothesisLog = Arc<Mutex<Vec<Vec<MooreMachine>>>>;

/// L* that logs every hypothesis it proposes.
struct Logged {
    inner: LStar,
    component: usize,
    log: HypothesisLog,
}

impl ActiveLearner for Logged {
    fn step(&mut self) -> Result<Step, LearnError> {
        let step = self.inner.step()?;
        if let Step::Hypothesis(h) = &step {
            self.log.lock().unwrap()[self.component].push(h.clone());
        }
        Ok(step)
    }
    fn answer(&mut self, output: Output) -> Result<(), LearnError> {
        self.inner.answer(output)
    }
    fn refute(&mut self, ce: Counterexample) -> Result<(), LearnError> {
        self.inner.refute(ce)
    }
    fn accept(&mut self) {
        self.inner.accept()
    }
}

fn logged_factory(
    k: usize,
) -> (
    impl FnMut(usize, &Alphabet) -> Box<dyn ActiveLearner>,
    HypothesisLog,
) {
    let log: HypothesisLog = Arc::new(Mutex::new(vec![Vec::new(); k]));
    let shared = Arc::clone(&log);
    let factory = move |i: usize, inputs: &Alphabet| -> Box<dyn ActiveLearner> {
        Box::new(Logged {
            inner: LStar::new(inputs.clone()),
            component: i,
            log: Arc::clone(&shared),
        })
    };
    (factory, log)
}

#[test]
fn counterexamples_go_only_to_wrong_components() {
    let target = counter_and_constant();
    let mut teacher = SimulatorTeacher::exact(target.clone());
    let outcome = run_reduction_learner(
        &mut teacher,
        &OutputDecomposition::bitwise(2),
        lstar_factory(),
        &ReductionConfig::default(),
    )
    .unwrap();
    assert!(bisimilar(&outcome.hypothesis, &target));
    let (last, earlier) = outcome.rounds.split_last().unwrap();
    assert!(last.refuted.is_empty());
    assert!(!earlier.is_empty());
    for r in earlier {
        assert_eq!(r.refuted, vec![0]);
    }
    // the constant component is never re-driven after its first hypothesis
    for r in &outcome.rounds[1..] {
        assert_eq!(r.forwarded[1], 0);
    }
    assert_eq!(outcome.components[1].size(), 1);
    assert_eq!(outcome.components[0].size(), 3);
}

#[test]
fn suspended_components_ask_nothing_and_refuted_ones_progress() {
    for n in 2..=4 {
        let target = make_register_machine(n).unwrap();
        let mut teacher = SimulatorTeacher::exact(target.clone());
        let (factory, log) = logged_factory(n);
        let outcome = run_reduction_learner(
            &mut teacher,
            &OutputDecomposition::bitwise(n),
            factory,
            &ReductionConfig::default(),
        )
        .unwrap();
        assert!(bisimilar(&outcome.hypothesis, &target));
        for pair in outcome.rounds.windows(2) {
            for i in 0..n {
                if !pair[0].refuted.contains(&i) {
                    assert_eq!(
                        pair[1].forwarded[i], 0,
                        "suspended component {i} asked queries"
                    );
                }
            }
        }
        for hypotheses in log.lock().unwrap().iter() {
            for pair in hypotheses.windows(2) {
                assert_ne!(
                    pair[0], pair[1],
                    "refuted learner proposed the same hypothesis"
                );
            }
        }
        // each hypothesis check after the first refuted at least one learner
        let refutations: usize = outcome.rounds.iter().map(|r| r.refuted.len()).sum();
        let proposals: usize = log.lock().unwrap().iter().map(Vec::len).sum();
        assert_eq!(proposals, n + refutations);
    }
}

#[test]
fn query_accounting_matches_teacher() {
    for n in 2..=4 {
        let target = make_register_machine(n).unwrap();
        let mut teacher = SimulatorTeacher::exact(target);
        let outcome = run_reduction_learner(
            &mut teacher,
            &OutputDecomposition::bitwise(n),
            lstar_factory(),
            &ReductionConfig::default(),
        )
        .unwrap();
        let stats = teacher.stats();
        assert_eq!(outcome.forwarded.iter().sum::<u64>(), stats.mq_count);
        let per_round: u64 = outcome.rounds.iter().flat_map(|r| r.forwarded.iter()).sum();
        assert_eq!(per_round, stats.mq_count);
        assert_eq!(outcome.dispatch_queries, stats.dispatch_mq_count);
        assert_eq!(outcome.dispatch_queries + 1, stats.eq_count);
        assert_eq!(outcome.hypothesis_log.len() as u64, stats.eq_count);
        assert_eq!(stats.total_mqs(), stats.mq_count + stats.dispatch_mq_count);
    }
}

#[test]
fn single_component_matches_plain_lstar() {
    for n in 1..=3 {
        let target = make_register_machine(n).unwrap();
        let mut plain = SimulatorTeacher::exact(target.clone());
        let expected = lstar(&mut plain).unwrap();
        let mut composed = SimulatorTeacher::exact(target.clone());
        let outcome = run_reduction_learner(
            &mut composed,
            &OutputDecomposition::whole(n),
            lstar_factory(),
            &ReductionConfig::default(),
        )
        .unwrap();
        assert_eq!(outcome.hypothesis_log, expected.hypothesis_sizes);
        assert_eq!(composed.stats().mq_count, plain.stats().mq_count);
        assert_eq!(composed.stats().eq_count, plain.stats().eq_count);
        assert_eq!(
            composed.stats().dispatch_mq_count,
            plain.stats().eq_count - 1
        );
        assert!(bisimilar(&outcome.hypothesis, &expected.hypothesis));
    }
}

#[test]
fn allowed_output_check_replaces_some_equivalence_queries() {
    let mut fired = 0;
    for seed in 0..100 {
        let target = seeded_machine(seed, 6, 2, 2);
        let allowed: BTreeSet<Output> = target.reachable().output_alphabet();
        let mut teacher = SimulatorTeacher::exact(target.clone());
        let outcome = run_reduction_learner(
            &mut teacher,
            &OutputDecomposition::bitwise(2),
            lstar_factory(),
            &ReductionConfig {
                allowed_outputs: Some(allowed.clone()),
            },
        )
        .unwrap();
        assert!(bisimilar(&outcome.hypothesis, &target), "seed {seed}");
        let stats = teacher.stats();
        assert_eq!(outcome.hypothesis_log.len() as u64, stats.eq_count);
        let from_check = outcome
            .rounds
            .iter()
            .filter(|r| r.from_allowed_check)
            .count() as u64;
        assert_eq!(from_check + stats.eq_count - 1, outcome.dispatch_queries);
        assert!(outcome.hypothesis.output_alphabet().is_subset(&allowed));
        fired += from_check;
    }
    assert!(fired > 0, "the allowed-output check never fired");
}

#[test]
fn random_targets_are_learned() {
    for seed in 0..50 {
        let target = seeded_machine(seed, 1 + (seed as usize % 8), 2, 2);
        let mut teacher = SimulatorTeacher::exact(target.clone());
        let outcome = run_reduction_learner(
            &mut teacher,
            &OutputDecomposition::bitwise(2),
            lstar_factory(),
            &ReductionConfig::default(),
        )
        .unwrap();
        assert!(bisimilar(&outcome.hypothesis, &target), "seed {seed}");
    }
}

#[test]
fn bogus_counterexample_is_rejected() {
    /// Claims a counterexample even for a correct hypothesis.
    struct Liar(SimulatorTeacher);
    impl Teacher for Liar {
        fn inputs(&self) -> &Alphabet {
            self.0.inputs()
        }
        fn mq(&self, w: &[usize]) -> Result<Output, prodlearn::MachineError> {
            self.0.mq(w)
        }
        fn dispatch_mq(&self, w: &[usize]) -> Result<Output, prodlearn::MachineError> {
            self.0.dispatch_mq(w)
        }
        fn eq(
            &mut self,
            h: &MooreMachine,
        ) -> Result<Option<Counterexample>, prodlearn::MachineError> {
            Ok(Some(Counterexample {
                word: vec![],
                expected: h.run(&[])?.clone(),
                actual: h.run(&[])?.clone(),
            }))
        }
        fn stats(&self) -> prodlearn::QueryStats {
            self.0.stats()
        }
    }
    let target = make_register_machine(1).unwrap();
    let mut teacher = Liar(SimulatorTeacher::exact(target));
    let result = run_reduction_learner(
        &mut teacher,
        &OutputDecomposition::bitwise(1),
        lstar_factory(),
        &ReductionConfig::default(),
    );
    assert!(matches!(result, Err(LearnError::Protocol(_))));
}
