//! Deterministic Moore machines and their algebra.
//!
//! States are dense indices `0..size()`. The transition table is a flat
//! `size() * inputs().len()` array, and every state carries an output tuple
//! of a common arity.

mod decomposition;
mod equivalence;
mod minimize;
mod product;
mod reverse;

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

pub use decomposition::OutputDecomposition;
pub use equivalence::{Counterexample, Equivalence};
pub use reverse::DEFAULT_REVERSE_CAP;

use crate::sym::{Alphabet, Input, Output};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachineError {
    #[error("input index {symbol} at position {position} is not in the alphabet")]
    UnknownInput { symbol: usize, position: usize },
    #[error("symbol {symbol:?} at position {position} is not in the alphabet")]
    UnknownSymbol { symbol: String, position: usize },
    #[error("input alphabet is empty")]
    EmptyAlphabet,
    #[error("input symbol {0:?} declared twice")]
    DuplicateInput(String),
    #[error("input alphabets differ")]
    AlphabetMismatch,
    #[error("output arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("machine has no states")]
    NoStates,
    #[error("transition table has {found} entries, expected {expected}")]
    IncompleteTransitions { expected: usize, found: usize },
    #[error("transition from state {state} on input {input} targets missing state {target}")]
    DanglingTransition {
        state: usize,
        input: usize,
        target: usize,
    },
    #[error("initial state {0} does not exist")]
    InvalidInitial(usize),
    #[error("output tuples must have arity at least 1")]
    ZeroArity,
    #[error("component index {index} out of range for arity {arity}")]
    ComponentOutOfRange { index: usize, arity: usize },
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("state-space limit exceeded: more than {limit} states")]
    SizeLimit { limit: usize },
}

#[derive(Clone, PartialEq, Eq)]
pub struct MooreMachine {
    inputs: Alphabet,
    delta: Vec<usize>,
    out: Vec<Output>,
    initial: usize,
    arity: usize,
    names: Option<Vec<String>>,
}

impl MooreMachine {
    /// Builds a machine from a flat transition table indexed by
    /// `state * inputs.len() + input`, validating totality and arity.
    pub fn new(
        inputs: Alphabet,
        delta: Vec<usize>,
        out: Vec<Output>,
        initial: usize,
    ) -> Result<Self, MachineError> {
        let n = out.len();
        if n == 0 {
            return Err(MachineError::NoStates);
        }
        let k = inputs.len();
        if delta.len() != n * k {
            return Err(MachineError::IncompleteTransitions {
                expected: n * k,
                found: delta.len(),
            });
        }
        if let Some((i, &target)) = delta.iter().enumerate().find(|(_, &t)| t >= n) {
            return Err(MachineError::DanglingTransition {
                state: i / k,
                input: i % k,
                target,
            });
        }
        if initial >= n {
            return Err(MachineError::InvalidInitial(initial));
        }
        let arity = out[0].arity();
        if arity == 0 {
            return Err(MachineError::ZeroArity);
        }
        if let Some(o) = out.iter().find(|o| o.arity() != arity) {
            return Err(MachineError::ArityMismatch {
                expected: arity,
                found: o.arity(),
            });
        }
        Ok(MooreMachine {
            inputs,
            delta,
            out,
            initial,
            arity,
            names: None,
        })
    }

    /// Builds a machine with `size` states from a transition function and an
    /// output function.
    pub fn from_fn(
        inputs: Alphabet,
        size: usize,
        initial: usize,
        mut delta: impl FnMut(usize, Input) -> usize,
        mut out: impl FnMut(usize) -> Output,
    ) -> Result<Self, MachineError> {
        let k = inputs.len();
        let table = (0..size * k).map(|i| delta(i / k, i % k)).collect();
        let outputs = (0..size).map(&mut out).collect();
        Self::new(inputs, table, outputs, initial)
    }

    /// Attaches external state names, used when printing.
    pub fn with_state_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.size(), "one name per state");
        self.names = Some(names);
        self
    }

    pub fn state_name(&self, state: usize) -> String {
        match &self.names {
            Some(names) => names[state].clone(),
            None => format!("s{state}"),
        }
    }

    pub fn has_state_names(&self) -> bool {
        self.names.is_some()
    }

    /// Number of states, |Q|.
    pub fn size(&self) -> usize {
        self.out.len()
    }

    pub fn inputs(&self) -> &Alphabet {
        &self.inputs
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    /// Tuple arity shared by every output.
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn output(&self, state: usize) -> &Output {
        &self.out[state]
    }

    pub fn outputs(&self) -> &[Output] {
        &self.out
    }

    #[inline]
    pub fn successor(&self, state: usize, input: Input) -> usize {
        self.delta[state * self.inputs.len() + input]
    }

    /// The set of outputs actually used by some state.
    pub fn output_alphabet(&self) -> BTreeSet<Output> {
        self.out.iter().cloned().collect()
    }

    pub fn state_after_from(&self, state: usize, word: &[Input]) -> Result<usize, MachineError> {
        let k = self.inputs.len();
        word.iter()
            .enumerate()
            .try_fold(state, |q, (position, &a)| {
                if a < k {
                    Ok(self.delta[q * k + a])
                } else {
                    Err(MachineError::UnknownInput {
                        symbol: a,
                        position,
                    })
                }
            })
    }

    pub fn state_after(&self, word: &[Input]) -> Result<usize, MachineError> {
        self.state_after_from(self.initial, word)
    }

    /// The behaviour of the machine on `word`: the output of the state reached
    /// from the initial state.
    pub fn run(&self, word: &[Input]) -> Result<&Output, MachineError> {
        Ok(&self.out[self.state_after(word)?])
    }

    /// Same machine with every output rewritten by `f`.
    pub fn map_outputs(&self, mut f: impl FnMut(&Output) -> Output) -> Result<Self, MachineError> {
        let out = self.out.iter().map(&mut f).collect();
        let mut m = Self::new(self.inputs.clone(), self.delta.clone(), out, self.initial)?;
        m.names = self.names.clone();
        Ok(m)
    }

    /// Component `index` (0-based) of the machine under `decomposition`: same
    /// transition structure, outputs projected.
    pub fn project(
        &self,
        decomposition: &OutputDecomposition,
        index: usize,
    ) -> Result<Self, MachineError> {
        decomposition.check_width(self.arity)?;
        if index >= decomposition.arity() {
            return Err(MachineError::ComponentOutOfRange {
                index,
                arity: decomposition.arity(),
            });
        }
        self.map_outputs(|o| decomposition.project(o, index))
    }

    /// Breadth-first order of the states reachable from the initial state,
    /// together with a shortest (length-lexicographically least) access word
    /// for each.
    pub fn access_words(&self) -> Vec<(usize, Vec<Input>)> {
        let k = self.inputs.len();
        let mut parent: Vec<Option<(usize, Input)>> = vec![None; self.size()];
        let mut seen = vec![false; self.size()];
        let mut order = Vec::new();
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial] = true;
        while let Some(q) = queue.pop_front() {
            order.push(q);
            for a in 0..k {
                let t = self.delta[q * k + a];
                if !seen[t] {
                    seen[t] = true;
                    parent[t] = Some((q, a));
                    queue.push_back(t);
                }
            }
        }
        order
            .into_iter()
            .map(|q| {
                let mut word = Vec::new();
                let mut cur = q;
                while let Some((p, a)) = parent[cur] {
                    word.push(a);
                    cur = p;
                }
                word.reverse();
                (q, word)
            })
            .collect()
    }

    /// The sub-machine of states reachable from the initial state, renumbered
    /// in breadth-first order (initial state becomes 0).
    pub fn reachable(&self) -> Self {
        let k = self.inputs.len();
        let mut index = vec![usize::MAX; self.size()];
        let mut order = Vec::new();
        let mut queue = VecDeque::from([self.initial]);
        index[self.initial] = 0;
        order.push(self.initial);
        while let Some(q) = queue.pop_front() {
            for a in 0..k {
                let t = self.delta[q * k + a];
                if index[t] == usize::MAX {
                    index[t] = order.len();
                    order.push(t);
                    queue.push_back(t);
                }
            }
        }
        let delta = order
            .iter()
            .flat_map(|&q| (0..k).map(move |a| (q, a)))
            .map(|(q, a)| index[self.delta[q * k + a]])
            .collect();
        let out = order.iter().map(|&q| self.out[q].clone()).collect();
        let names = self
            .names
            .as_ref()
            .map(|names| order.iter().map(|&q| names[q].clone()).collect());
        MooreMachine {
            inputs: self.inputs.clone(),
            delta,
            out,
            initial: 0,
            arity: self.arity,
            names,
        }
    }

    pub fn is_minimal(&self) -> bool {
        self.minimize().size() == self.size()
    }
}

impl std::fmt::Debug for MooreMachine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MooreMachine")
            .field("states", &self.size())
            .field("inputs", &self.inputs)
            .field("arity", &self.arity)
            .field("initial", &self.initial)
            .finish()
    }
}
