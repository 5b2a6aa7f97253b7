use std::collections::HashMap;

use super::MooreMachine;

impl MooreMachine {
    /// The minimal machine with the same behaviour.
    ///
    /// Trims unreachable states, then runs Moore-style partition refinement:
    /// blocks start as output classes and are split by the block signature of
    /// each state's successors until stable. The result is renumbered in
    /// breadth-first order, so equivalent machines minimize to identical
    /// values.
    pub fn minimize(&self) -> MooreMachine {
        let m = self.reachable();
        let n = m.size();
        let k = m.inputs.len();

        let mut block = {
            let mut ids = HashMap::new();
            m.out
                .iter()
                .map(|o| {
                    let next = ids.len();
                    *ids.entry(o).or_insert(next)
                })
                .collect::<Vec<usize>>()
        };
        let mut count = block.iter().max().map_or(0, |b| b + 1);

        loop {
            let mut ids: HashMap<Vec<usize>, usize> = HashMap::with_capacity(count * 2);
            let mut signature = Vec::with_capacity(k + 1);
            let refined: Vec<usize> = (0..n)
                .map(|q| {
                    signature.clear();
                    signature.push(block[q]);
                    signature.extend((0..k).map(|a| block[m.delta[q * k + a]]));
                    let next = ids.len();
                    *ids.entry(signature.clone()).or_insert(next)
                })
                .collect();
            let refined_count = ids.len();
            block = refined;
            if refined_count == count {
                break;
            }
            count = refined_count;
        }

        let mut rep = vec![usize::MAX; count];
        for q in 0..n {
            if rep[block[q]] == usize::MAX {
                rep[block[q]] = q;
            }
        }
        let delta = rep
            .iter()
            .flat_map(|&q| (0..k).map(move |a| (q, a)))
            .map(|(q, a)| block[m.delta[q * k + a]])
            .collect();
        let out = rep.iter().map(|&q| m.out[q].clone()).collect();
        MooreMachine::new(m.inputs.clone(), delta, out, block[m.initial])
            .expect("quotient of a valid machine")
            .reachable()
    }
}
