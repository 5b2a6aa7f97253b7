use std::collections::{HashMap, VecDeque};

use super::{MachineError, MooreMachine};
use crate::sym::{Output, Word};

/// A word on which two behaviours differ. `expected` is the output of the
/// reference side (the target, or the first machine compared), `actual` the
/// output of the other side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub word: Word,
    pub expected: Output,
    pub actual: Output,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Equivalence {
    Equivalent,
    Counterexample(Counterexample),
}

impl Equivalence {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Equivalence::Equivalent)
    }

    pub fn counterexample(self) -> Option<Counterexample> {
        match self {
            Equivalence::Equivalent => None,
            Equivalence::Counterexample(ce) => Some(ce),
        }
    }
}

impl MooreMachine {
    /// Decides `⟦self⟧ = ⟦other⟧` by breadth-first search over pairs of
    /// states reachable in lockstep. A difference is reported with the
    /// length-lexicographically least word exposing it.
    pub fn equivalent(&self, other: &MooreMachine) -> Result<Equivalence, MachineError> {
        if self.inputs != other.inputs {
            return Err(MachineError::AlphabetMismatch);
        }
        if self.arity != other.arity {
            return Err(MachineError::ArityMismatch {
                expected: self.arity,
                found: other.arity,
            });
        }
        let k = self.inputs.len();
        let start = (self.initial, other.initial);
        // pair -> (predecessor pair, input)
        type Parents = HashMap<(usize, usize), Option<((usize, usize), usize)>>;
        let mut parent: Parents = HashMap::from([(start, None)]);
        let mut queue = VecDeque::from([start]);
        while let Some(pair @ (p, q)) = queue.pop_front() {
            if self.out[p] != other.out[q] {
                let mut word = Vec::new();
                let mut cur = pair;
                while let Some((prev, a)) = parent[&cur] {
                    word.push(a);
                    cur = prev;
                }
                word.reverse();
                return Ok(Equivalence::Counterexample(Counterexample {
                    word,
                    expected: self.out[p].clone(),
                    actual: other.out[q].clone(),
                }));
            }
            for a in 0..k {
                let next = (self.successor(p, a), other.successor(q, a));
                parent.entry(next).or_insert_with(|| {
                    queue.push_back(next);
                    Some((pair, a))
                });
            }
        }
        Ok(Equivalence::Equivalent)
    }
}
