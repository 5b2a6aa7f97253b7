use std::collections::{HashMap, VecDeque};

use super::{MachineError, MooreMachine};

/// Default bound on the number of residual functions explored by
/// [`MooreMachine::reverse`].
pub const DEFAULT_REVERSE_CAP: usize = 1_000_000;

impl MooreMachine {
    /// The minimal machine `R` with `⟦R⟧(w) = ⟦self⟧(reverse(w))`.
    ///
    /// States of `R` are functions `f: Q → O`. The start function is the
    /// output map, input `a` sends `f` to `q ↦ f(δ(q, a))`, and the output of
    /// `f` is `f(q0)`. Only functions reachable from the start are built;
    /// exceeding `cap` of them aborts with [`MachineError::SizeLimit`].
    pub fn reverse(&self, cap: usize) -> Result<MooreMachine, MachineError> {
        let n = self.size();
        let k = self.inputs.len();

        let mut values = Vec::new();
        let mut value_ids = HashMap::new();
        let start: Vec<u32> = self
            .out
            .iter()
            .map(|o| {
                *value_ids.entry(o.clone()).or_insert_with(|| {
                    values.push(o.clone());
                    (values.len() - 1) as u32
                })
            })
            .collect();

        let mut index: HashMap<Vec<u32>, usize> = HashMap::from([(start.clone(), 0)]);
        let mut functions = vec![start];
        let mut delta = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(f) = queue.pop_front() {
            for a in 0..k {
                let g: Vec<u32> = (0..n).map(|q| functions[f][self.successor(q, a)]).collect();
                let id = match index.get(&g) {
                    Some(&id) => id,
                    None => {
                        if functions.len() >= cap {
                            return Err(MachineError::SizeLimit { limit: cap });
                        }
                        let id = functions.len();
                        index.insert(g.clone(), id);
                        functions.push(g);
                        queue.push_back(id);
                        id
                    }
                };
                delta.push(id);
            }
        }
        let out = functions
            .iter()
            .map(|f| values[f[self.initial] as usize].clone())
            .collect();
        Ok(MooreMachine::new(self.inputs.clone(), delta, out, 0)?.minimize())
    }
}
