//! Composed learning of product machines from independent component
//! learners.
//!
//! One base learner runs per component of the output decomposition. The
//! driver answers each learner's membership queries with the matching
//! projection of the teacher's answer, and when every learner has a
//! hypothesis it checks their product. A counterexample is routed to exactly
//! those components whose hypothesis mispredicts it; the others stay
//! suspended with their current hypothesis.

use std::collections::{BTreeSet, VecDeque};

use crate::automata::{Counterexample, MooreMachine, OutputDecomposition};
use crate::learner::{ActiveLearner, LearnError, Step};
use crate::sym::{Alphabet, Output, Word};
use crate::teacher::Teacher;

#[derive(Clone, Debug)]
pub enum HandleState {
    /// The learner has work to do and must be driven.
    Running,
    AwaitingAnswer(Word),
    ProposingHypothesis(MooreMachine),
    /// Holds the last hypothesis; receives no events until a counterexample
    /// is routed to it.
    Suspended(MooreMachine),
    Done(MooreMachine),
}

pub struct LearnerHandle {
    pub component: usize,
    learner: Box<dyn ActiveLearner>,
    state: HandleState,
}

impl LearnerHandle {
    pub fn state(&self) -> &HandleState {
        &self.state
    }

    fn hypothesis(&self) -> Option<&MooreMachine> {
        match &self.state {
            HandleState::ProposingHypothesis(h)
            | HandleState::Suspended(h)
            | HandleState::Done(h) => Some(h),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ReductionConfig {
    /// When set, product hypotheses are first checked for reachable outputs
    /// outside this set; a trace to one is resolved without consulting the
    /// equivalence oracle.
    pub allowed_outputs: Option<BTreeSet<Output>>,
}

/// What happened in one round, i.e. between two hypothesis checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundRecord {
    /// Membership queries forwarded per component during the round.
    pub forwarded: Vec<u64>,
    /// Components that received the counterexample ending the round.
    pub refuted: Vec<usize>,
    /// `true` when the round ended with a disallowed-output trace rather than
    /// an EQ counterexample.
    pub from_allowed_check: bool,
}

#[derive(Clone, Debug)]
pub struct ReductionOutcome {
    /// Reachable product of the final component hypotheses.
    pub hypothesis: MooreMachine,
    pub components: Vec<MooreMachine>,
    /// Reachable product size at each equivalence query.
    pub hypothesis_log: Vec<usize>,
    /// Total membership queries forwarded per component.
    pub forwarded: Vec<u64>,
    pub dispatch_queries: u64,
    pub rounds: Vec<RoundRecord>,
}

/// First word (length-lexicographic) reaching a state of `h` whose output is
/// not in `allowed`.
pub fn check_allowed_outputs(h: &MooreMachine, allowed: &BTreeSet<Output>) -> Option<Word> {
    let k = h.inputs().len();
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; h.size()];
    let mut seen = vec![false; h.size()];
    let mut queue = VecDeque::from([h.initial()]);
    seen[h.initial()] = true;
    while let Some(q) = queue.pop_front() {
        if !allowed.contains(h.output(q)) {
            let mut word = Vec::new();
            let mut cur = q;
            while let Some((p, a)) = parent[cur] {
                word.push(a);
                cur = p;
            }
            word.reverse();
            return Some(word);
        }
        for a in 0..k {
            let t = h.successor(q, a);
            if !seen[t] {
                seen[t] = true;
                parent[t] = Some((q, a));
                queue.push_back(t);
            }
        }
    }
    None
}

struct CompositionRun<'t, T: Teacher + ?Sized> {
    handles: Vec<LearnerHandle>,
    teacher: &'t mut T,
    decomposition: OutputDecomposition,
    hypothesis_log: Vec<usize>,
    forwarded: Vec<u64>,
    dispatch_queries: u64,
    rounds: Vec<RoundRecord>,
    round_forwarded: Vec<u64>,
}

impl<T: Teacher + ?Sized> CompositionRun<'_, T> {
    /// Drives every running learner, in component order, to its hypothesis.
    fn drive(&mut self) -> Result<(), LearnError> {
        for handle in &mut self.handles {
            if !matches!(handle.state, HandleState::Running) {
                continue;
            }
            let i = handle.component;
            loop {
                match handle.learner.step()? {
                    Step::Query(word) => {
                        let out = self.teacher.mq(&word)?;
                        handle.state = HandleState::AwaitingAnswer(word);
                        self.forwarded[i] += 1;
                        self.round_forwarded[i] += 1;
                        handle.learner.answer(self.decomposition.project(&out, i))?;
                        handle.state = HandleState::Running;
                    }
                    Step::Hypothesis(h) => {
                        handle.state = HandleState::ProposingHypothesis(h);
                        break;
                    }
                }
            }
        }
        Ok(())
    }

    fn components(&self) -> Vec<&MooreMachine> {
        self.handles
            .iter()
            .map(|h| {
                h.hypothesis()
                    .expect("every learner was driven to a hypothesis")
            })
            .collect()
    }

    /// Routes `word` to every component whose hypothesis disagrees with the
    /// target, using one fresh query for the target's output.
    fn dispatch(&mut self, word: Word, from_allowed_check: bool) -> Result<(), LearnError> {
        let target = self.teacher.dispatch_mq(&word)?;
        self.dispatch_queries += 1;
        let mut refuted = Vec::new();
        for handle in &mut self.handles {
            let i = handle.component;
            let h = handle.hypothesis().expect("hypothesis present").clone();
            let expected = self.decomposition.project(&target, i);
            let actual = h.run(&word)?.clone();
            if actual != expected {
                handle.learner.refute(Counterexample {
                    word: word.clone(),
                    expected,
                    actual,
                })?;
                handle.state = HandleState::Running;
                refuted.push(i);
            } else {
                handle.state = HandleState::Suspended(h);
            }
        }
        if refuted.is_empty() {
            return Err(LearnError::Protocol(format!(
                "word {} is not a counterexample for any component (target outputs {target})",
                self.teacher.inputs().format_word(&word)
            )));
        }
        let forwarded = std::mem::replace(&mut self.round_forwarded, vec![0; self.handles.len()]);
        self.rounds.push(RoundRecord {
            forwarded,
            refuted,
            from_allowed_check,
        });
        Ok(())
    }
}

/// Learns the target behind `teacher` as a product of one machine per
/// component of `decomposition`, each learned by a learner from `factory`
/// (called with the component index and the input alphabet).
pub fn run_reduction_learner<T, F>(
    teacher: &mut T,
    decomposition: &OutputDecomposition,
    mut factory: F,
    config: &ReductionConfig,
) -> Result<ReductionOutcome, LearnError>
where
    T: Teacher + ?Sized,
    F: FnMut(usize, &Alphabet) -> Box<dyn ActiveLearner>,
{
    let inputs = teacher.inputs().clone();
    let k = decomposition.arity();
    let handles = (0..k)
        .map(|i| LearnerHandle {
            component: i,
            learner: factory(i, &inputs),
            state: HandleState::Running,
        })
        .collect();
    let mut run = CompositionRun {
        handles,
        teacher,
        decomposition: decomposition.clone(),
        hypothesis_log: Vec::new(),
        forwarded: vec![0; k],
        dispatch_queries: 0,
        rounds: Vec::new(),
        round_forwarded: vec![0; k],
    };

    loop {
        run.drive()?;
        let product = MooreMachine::reachable_product(&run.components(), Some(decomposition))?;

        if let Some(allowed) = &config.allowed_outputs {
            if let Some(trace) = check_allowed_outputs(&product, allowed) {
                run.dispatch(trace, true)?;
                continue;
            }
        }

        run.hypothesis_log.push(product.size());
        match run.teacher.eq(&product)? {
            Some(ce) => run.dispatch(ce.word, false)?,
            None => {
                let forwarded = std::mem::take(&mut run.round_forwarded);
                run.rounds.push(RoundRecord {
                    forwarded,
                    refuted: Vec::new(),
                    from_allowed_check: false,
                });
                for handle in &mut run.handles {
                    handle.learner.accept();
                    let h = handle.hypothesis().expect("hypothesis present").clone();
                    handle.state = HandleState::Done(h);
                }
                let components = run.components().into_iter().cloned().collect();
                return Ok(ReductionOutcome {
                    hypothesis: product,
                    components,
                    hypothesis_log: run.hypothesis_log,
                    forwarded: run.forwarded,
                    dispatch_queries: run.dispatch_queries,
                    rounds: run.rounds,
                });
            }
        }
    }
}

/// The set of all combinations of component values; with it the allowed
/// output check never fires.
pub fn full_output_set(
    decomposition: &OutputDecomposition,
    component_alphabets: &[BTreeSet<Output>],
) -> BTreeSet<Output> {
    let mut combos: Vec<Vec<&Output>> = vec![Vec::new()];
    for alphabet in component_alphabets {
        combos = combos
            .into_iter()
            .flat_map(|prefix| {
                alphabet.iter().map(move |v| {
                    let mut c = prefix.clone();
                    c.push(v);
                    c
                })
            })
            .collect();
    }
    combos
        .iter()
        .map(|parts| decomposition.compose(parts))
        .collect()
}
