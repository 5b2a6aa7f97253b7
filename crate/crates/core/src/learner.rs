//! Resumable learners and a driver that connects one to a teacher.
//!
//! A learner never calls its teacher. It is advanced with [`ActiveLearner::step`]
//! and reports either a membership query it needs answered or a hypothesis
//! it wants checked. This lets a driver multiplex several learners over one
//! teacher.

use thiserror::Error;

use crate::automata::{Counterexample, MachineError, MooreMachine};
use crate::sym::{Output, Word};
use crate::teacher::Teacher;

#[derive(Debug, Error)]
pub enum LearnError {
    #[error(transparent)]
    Teacher(#[from] MachineError),
    /// The teacher (or driver) broke the MQ/EQ protocol, e.g. by returning a
    /// counterexample the hypothesis already handles correctly.
    #[error("protocol violation: {0}")]
    Protocol(String),
    /// An operation was called without its precondition.
    #[error("contract violation: {0}")]
    Contract(String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    Query(Word),
    Hypothesis(MooreMachine),
}

pub trait ActiveLearner {
    /// Advances until the learner needs something. Must not be called while
    /// a query is unanswered.
    fn step(&mut self) -> Result<Step, LearnError>;

    /// Answers the pending query.
    fn answer(&mut self, output: Output) -> Result<(), LearnError>;

    /// Refutes the current hypothesis. `expected` is the target's output.
    fn refute(&mut self, counterexample: Counterexample) -> Result<(), LearnError>;

    /// Signals that the current hypothesis was accepted.
    fn accept(&mut self);
}

/// Result of driving one learner to completion.
#[derive(Clone, Debug)]
pub struct LearnOutcome {
    pub hypothesis: MooreMachine,
    /// Reachable state count of each hypothesis submitted, in EQ order.
    pub hypothesis_sizes: Vec<usize>,
}

/// Runs `learner` against `teacher` until an equivalence query succeeds.
pub fn learn<L: ActiveLearner + ?Sized, T: Teacher + ?Sized>(
    learner: &mut L,
    teacher: &mut T,
) -> Result<LearnOutcome, LearnError> {
    let mut sizes = Vec::new();
    loop {
        match learner.step()? {
            Step::Query(word) => {
                let out = teacher.mq(&word)?;
                learner.answer(out)?;
            }
            Step::Hypothesis(h) => {
                sizes.push(h.reachable().size());
                match teacher.eq(&h)? {
                    None => {
                        learner.accept();
                        return Ok(LearnOutcome {
                            hypothesis: h,
                            hypothesis_sizes: sizes,
                        });
                    }
                    Some(ce) => learner.refute(ce)?,
                }
            }
        }
    }
}
