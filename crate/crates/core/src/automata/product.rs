use std::collections::{HashMap, VecDeque};

use super::{MachineError, MooreMachine, OutputDecomposition};
use crate::sym::Output;

impl MooreMachine {
    /// Synchronous product on the full Cartesian state space. State `(p, q)`
    /// is numbered `p * other.size() + q`; outputs are concatenated left to
    /// right. Unreachable pairs are kept.
    pub fn product(&self, other: &MooreMachine) -> Result<MooreMachine, MachineError> {
        if self.inputs != other.inputs {
            return Err(MachineError::AlphabetMismatch);
        }
        let n2 = other.size();
        MooreMachine::from_fn(
            self.inputs.clone(),
            self.size() * n2,
            self.initial * n2 + other.initial,
            |s, a| self.successor(s / n2, a) * n2 + other.successor(s % n2, a),
            |s| Output::concat([self.output(s / n2), other.output(s % n2)]),
        )
    }

    /// Right-nested iterated product `m_1 × (m_2 × (… × m_k))`, untrimmed.
    pub fn product_all(machines: &[MooreMachine]) -> Result<MooreMachine, MachineError> {
        let (last, init) = machines.split_last().ok_or(MachineError::NoStates)?;
        init.iter()
            .rev()
            .try_fold(last.clone(), |acc, m| m.product(&acc))
    }

    /// The reachable part of `parts[0] × … × parts[k-1]`, built by exploring
    /// state tuples from the initial tuple only. With a decomposition, the
    /// component outputs are reassembled into the decomposition's flat
    /// layout instead of being concatenated.
    pub fn reachable_product(
        parts: &[&MooreMachine],
        layout: Option<&OutputDecomposition>,
    ) -> Result<MooreMachine, MachineError> {
        let first = parts.first().ok_or(MachineError::NoStates)?;
        if parts.iter().any(|m| m.inputs != first.inputs) {
            return Err(MachineError::AlphabetMismatch);
        }
        if let Some(d) = layout {
            if d.arity() != parts.len() {
                return Err(MachineError::ArityMismatch {
                    expected: d.arity(),
                    found: parts.len(),
                });
            }
            for (group, m) in d.groups().iter().zip(parts) {
                if group.len() != m.arity() {
                    return Err(MachineError::ArityMismatch {
                        expected: group.len(),
                        found: m.arity(),
                    });
                }
            }
        }
        let k = first.inputs.len();
        let start: Vec<usize> = parts.iter().map(|m| m.initial).collect();
        let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(start.clone(), 0)]);
        let mut tuples = vec![start];
        let mut delta = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(s) = queue.pop_front() {
            for a in 0..k {
                let next: Vec<usize> = tuples[s]
                    .iter()
                    .zip(parts)
                    .map(|(&q, m)| m.successor(q, a))
                    .collect();
                let id = match index.get(&next) {
                    Some(&id) => id,
                    None => {
                        let id = tuples.len();
                        index.insert(next.clone(), id);
                        tuples.push(next);
                        queue.push_back(id);
                        id
                    }
                };
                delta.push(id);
            }
        }
        let out = tuples
            .iter()
            .map(|tuple| {
                let outs: Vec<&Output> =
                    tuple.iter().zip(parts).map(|(&q, m)| m.output(q)).collect();
                match layout {
                    Some(d) => d.compose(&outs),
                    None => Output::concat(outs),
                }
            })
            .collect();
        // Queue order equals id order, so the table is laid out row by row.
        MooreMachine::new(first.inputs.clone(), delta, out, 0)
    }
}
