//! Brute-force reference implementations used as test oracles. They share no
//! code with the library algorithms they check.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use prodlearn::models::{letters, random_machine};
use prodlearn::table::ObservationTable;
use prodlearn::{MooreMachine, Output, Word};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random machine from a seed: `size` states, `inputs` letters, `arity`
/// binary atoms.
pub fn seeded_machine(seed: u64, size: usize, inputs: usize, arity: usize) -> MooreMachine {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_machine(&mut rng, size, &letters(inputs), arity, &["0", "1"])
}

/// Greatest-fixpoint bisimulation over all state pairs.
pub fn bisimilar(a: &MooreMachine, b: &MooreMachine) -> bool {
    let k = a.inputs().len();
    assert_eq!(k, b.inputs().len());
    let mut related = vec![vec![false; b.size()]; a.size()];
    for (p, row) in related.iter_mut().enumerate() {
        for (q, cell) in row.iter_mut().enumerate() {
            *cell = a.output(p) == b.output(q);
        }
    }
    loop {
        let mut changed = false;
        for p in 0..a.size() {
            for q in 0..b.size() {
                if related[p][q] && (0..k).any(|x| !related[a.successor(p, x)][b.successor(q, x)]) {
                    related[p][q] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            return related[a.initial()][b.initial()];
        }
    }
}

/// Length of the shortest word on which the machines differ, found by
/// exploring the set of state pairs reachable by words of each length.
pub fn shortest_difference_length(a: &MooreMachine, b: &MooreMachine) -> Option<usize> {
    let k = a.inputs().len();
    let mut layer: BTreeSet<(usize, usize)> = [(a.initial(), b.initial())].into();
    let mut seen: HashSet<BTreeSet<(usize, usize)>> = HashSet::new();
    for len in 0.. {
        if layer.iter().any(|&(p, q)| a.output(p) != b.output(q)) {
            return Some(len);
        }
        if !seen.insert(layer.clone()) {
            return None;
        }
        layer = layer
            .iter()
            .flat_map(|&(p, q)| (0..k).map(move |x| (a.successor(p, x), b.successor(q, x))))
            .collect();
    }
    unreachable!()
}

/// All words of length `len` over `k` letters, in lexicographic order.
pub fn words_of_length(k: usize, len: usize) -> impl Iterator<Item = Word> {
    let total = k.pow(len as u32);
    (0..total).map(move |mut index| {
        let mut w = vec![0; len];
        for slot in w.iter_mut().rev() {
            *slot = index % k;
            index /= k;
        }
        w
    })
}

/// First word in length-lexicographic order satisfying `pred`, searching
/// words up to `max_len`.
pub fn first_word(
    k: usize,
    max_len: usize,
    mut pred: impl FnMut(&[usize]) -> bool,
) -> Option<Word> {
    (0..=max_len).find_map(|len| words_of_length(k, len).find(|w| pred(w)))
}

/// Number of distinct residual functions `q ↦ out(δ(q, wᴿ))` restricted to
/// reachable states, enumerating words by length until a layer adds none.
pub fn reverse_size(m: &MooreMachine) -> usize {
    let k = m.inputs().len();
    let reachable: Vec<usize> = {
        let mut seen = vec![false; m.size()];
        let mut stack = vec![m.initial()];
        seen[m.initial()] = true;
        while let Some(q) = stack.pop() {
            for x in 0..k {
                let t = m.successor(q, x);
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        (0..m.size()).filter(|&q| seen[q]).collect()
    };
    let residual = |w: &[usize]| -> Vec<Output> {
        let reversed: Vec<usize> = w.iter().rev().copied().collect();
        reachable
            .iter()
            .map(|&q| m.output(m.state_after_from(q, &reversed).unwrap()).clone())
            .collect()
    };
    let mut functions: HashSet<Vec<Output>> = HashSet::new();
    // one representative word per new function; extensions of old ones add
    // nothing new
    let mut frontier: Vec<Word> = vec![Vec::new()];
    functions.insert(residual(&[]));
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for w in &frontier {
            for x in 0..k {
                let mut v = w.clone();
                v.push(x);
                if functions.insert(residual(&v)) {
                    next.push(v);
                }
            }
        }
        frontier = next;
    }
    functions.len()
}

/// Naive closedness and consistency checks computed from the visible cells
/// of a table, for full rows (`component = None`) or one component.
pub struct NaiveTable {
    pub short: Vec<Word>,
    pub long: Vec<Word>,
    pub columns: usize,
    pub k: usize,
    rows: std::collections::HashMap<Word, Vec<Output>>,
}

impl NaiveTable {
    pub fn from_table(t: &ObservationTable, project: impl Fn(&Output) -> Output) -> Self {
        let short: Vec<Word> = t.short_rows().cloned().collect();
        let long: Vec<Word> = t.long_rows().cloned().collect();
        let columns = t.suffixes().len();
        let rows = short
            .iter()
            .chain(&long)
            .map(|w| {
                let cells = (0..columns)
                    .map(|c| project(t.cell(w, c).expect("filled table")))
                    .collect();
                (w.clone(), cells)
            })
            .collect();
        NaiveTable {
            short,
            long,
            columns,
            k: t.inputs().len(),
            rows,
        }
    }

    pub fn row(&self, w: &[usize]) -> &[Output] {
        &self.rows[w]
    }

    pub fn closed(&self) -> bool {
        self.long
            .iter()
            .all(|t| self.short.iter().any(|s| self.row(s) == self.row(t)))
    }

    pub fn consistent(&self) -> bool {
        for s in &self.short {
            for s2 in &self.short {
                if self.row(s) != self.row(s2) {
                    continue;
                }
                for a in 0..self.k {
                    let mut sa = s.clone();
                    sa.push(a);
                    let mut s2a = s2.clone();
                    s2a.push(a);
                    if self.row(&sa) != self.row(&s2a) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Checks the closedness/consistency relations between a filled table, its
/// library checks and its materialized component tables.
pub fn check_table_relations(t: &ObservationTable) -> Result<(), String> {
    let full = NaiveTable::from_table(t, |o| o.clone());
    let d = t.decomposition().cloned();
    let parts: Vec<NaiveTable> = match &d {
        Some(d) => (0..d.arity())
            .map(|i| NaiveTable::from_table(t, |o| d.project(o, i)))
            .collect(),
        None => vec![NaiveTable::from_table(t, |o| o.clone())],
    };
    let ensure = |ok: bool, what: &str| if ok { Ok(()) } else { Err(what.to_owned()) };
    ensure(
        t.is_closed() == full.closed(),
        "is_closed disagrees with naive check",
    )?;
    ensure(
        t.is_consistent() == full.consistent(),
        "is_consistent disagrees with naive check",
    )?;
    ensure(
        !t.is_closed() || t.is_product_closed(),
        "closed but not product-closed",
    )?;
    ensure(
        !t.is_product_consistent() || t.is_consistent(),
        "product-consistent but not consistent",
    )?;
    ensure(
        t.is_product_closed() == parts.iter().all(NaiveTable::closed),
        "product-closed differs from componentwise closedness",
    )?;
    ensure(
        t.is_product_consistent() == parts.iter().all(NaiveTable::consistent),
        "product-consistent differs from componentwise consistency",
    )?;
    for (i, part) in parts.iter().enumerate() {
        let view = t.component_view(i);
        ensure(
            view.is_closed() == part.closed(),
            "component view closedness",
        )?;
        ensure(
            view.is_consistent() == part.consistent(),
            "component view consistency",
        )?;
    }
    Ok(())
}
