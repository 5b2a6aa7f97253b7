//! Observation tables and the table-based learners.
//!
//! A table `(S, E, T)` has a prefix-closed set `S` of access words ("short
//! rows"), a suffix set `E` with `ε` as its first column, and cells
//! `T(r)(e) = ⟦target⟧(r·e)` for every `r ∈ S ∪ S·I`. Rows in `S·I` that are
//! not themselves in `S` are the "long rows".
//!
//! With an [`OutputDecomposition`] the table also answers the per-component
//! questions: a row's `i`-th component row is the projection `π_i` of each
//! cell. Without one there is a single component, the whole output.

mod lstar;

use std::collections::{HashMap, VecDeque};

pub use lstar::{lstar, lstar_factory, product_lstar, LStar, LStarMode, ProductLStarOutcome};

use crate::automata::{MooreMachine, OutputDecomposition};
use crate::learner::LearnError;
use crate::sym::{Alphabet, Input, Output, Word};

/// A pair of short rows with equal (component) rows whose successors on
/// `input` differ in column `suffix`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inconsistency {
    /// Component index; always 0 for the classical check.
    pub component: usize,
    pub first: Word,
    pub second: Word,
    pub input: Input,
    pub suffix: Word,
}

impl Inconsistency {
    /// The column that separates `first` and `second`: `input · suffix`.
    pub fn new_suffix(&self) -> Word {
        let mut e = vec![self.input];
        e.extend_from_slice(&self.suffix);
        e
    }
}

/// A long row whose (component) row matches no short row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Unclosed {
    pub component: usize,
    pub row: Word,
}

/// Component hypotheses together with their reachable product.
#[derive(Clone, Debug)]
pub struct ProductHypothesis {
    pub components: Vec<MooreMachine>,
    pub product: MooreMachine,
}

const UNKNOWN: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct Row {
    word: Word,
    short: bool,
    /// Row ids of `word · a` for each input, once the row is short.
    succ: Vec<usize>,
    cells: Vec<u32>,
}

/// Interned cell values and their per-component projections.
#[derive(Clone, Debug, Default)]
struct OutputPool {
    values: Vec<Output>,
    ids: HashMap<Output, u32>,
    /// `projected[id][i]` is the id of `π_i(values[id])` in `component_values[i]`.
    projected: Vec<Vec<u32>>,
    component_values: Vec<Vec<Output>>,
    component_ids: Vec<HashMap<Output, u32>>,
}

impl OutputPool {
    fn intern(&mut self, out: Output, decomposition: Option<&OutputDecomposition>) -> u32 {
        if let Some(&id) = self.ids.get(&out) {
            return id;
        }
        let parts: Vec<Output> = match decomposition {
            Some(d) => (0..d.arity()).map(|i| d.project(&out, i)).collect(),
            None => vec![out.clone()],
        };
        if self.component_values.is_empty() {
            self.component_values = vec![Vec::new(); parts.len()];
            self.component_ids = vec![HashMap::new(); parts.len()];
        }
        let projected = parts
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                let values = &mut self.component_values[i];
                *self.component_ids[i].entry(p.clone()).or_insert_with(|| {
                    values.push(p);
                    (values.len() - 1) as u32
                })
            })
            .collect();
        let id = self.values.len() as u32;
        self.values.push(out.clone());
        self.ids.insert(out, id);
        self.projected.push(projected);
        id
    }
}

#[derive(Clone, Debug)]
pub struct ObservationTable {
    inputs: Alphabet,
    decomposition: Option<OutputDecomposition>,
    short: Vec<usize>,
    suffixes: Vec<Word>,
    rows: Vec<Row>,
    row_ids: HashMap<Word, usize>,
    pool: OutputPool,
    missing: VecDeque<(usize, usize)>,
    /// Cell value per word; a word in several cells is asked once.
    answers: HashMap<Word, u32>,
    width: Option<usize>,
}

impl ObservationTable {
    /// A fresh table with `S = E = {ε}` and a single component.
    pub fn new(inputs: Alphabet) -> Self {
        let mut t = ObservationTable {
            inputs,
            decomposition: None,
            short: Vec::new(),
            suffixes: vec![Vec::new()],
            rows: Vec::new(),
            row_ids: HashMap::new(),
            pool: OutputPool::default(),
            missing: VecDeque::new(),
            answers: HashMap::new(),
            width: None,
        };
        t.add_short(&[]);
        t
    }

    /// A fresh table whose component questions use `decomposition`.
    pub fn with_decomposition(inputs: Alphabet, decomposition: OutputDecomposition) -> Self {
        let mut t = Self::new(inputs);
        t.width = Some(decomposition.width());
        t.decomposition = Some(decomposition);
        t
    }

    pub fn inputs(&self) -> &Alphabet {
        &self.inputs
    }

    pub fn decomposition(&self) -> Option<&OutputDecomposition> {
        self.decomposition.as_ref()
    }

    /// Number of components, k.
    pub fn components(&self) -> usize {
        self.decomposition
            .as_ref()
            .map_or(1, OutputDecomposition::arity)
    }

    /// `S`, in insertion order.
    pub fn short_rows(&self) -> impl Iterator<Item = &Word> {
        self.short.iter().map(|&r| &self.rows[r].word)
    }

    /// `S·I \ S`, in (S order × input order).
    pub fn long_rows(&self) -> impl Iterator<Item = &Word> {
        self.short
            .iter()
            .flat_map(|&s| self.rows[s].succ.iter())
            .filter(|&&r| !self.rows[r].short)
            .map(|&r| &self.rows[r].word)
    }

    pub fn suffixes(&self) -> &[Word] {
        &self.suffixes
    }

    pub fn short_count(&self) -> usize {
        self.short.len()
    }

    /// `|S ∪ S·I|`.
    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn contains_short(&self, word: &[Input]) -> bool {
        self.row_ids.get(word).is_some_and(|&r| self.rows[r].short)
    }

    pub fn cell(&self, row: &[Input], column: usize) -> Option<&Output> {
        let &r = self.row_ids.get(row)?;
        let id = *self.rows[r].cells.get(column)?;
        (id != UNKNOWN).then(|| &self.pool.values[id as usize])
    }

    pub fn defined_cells(&self) -> usize {
        self.rows
            .iter()
            .map(|r| r.cells.iter().filter(|&&c| c != UNKNOWN).count())
            .sum()
    }

    pub fn is_filled(&self) -> bool {
        self.missing.is_empty()
    }

    fn ensure_row(&mut self, word: &[Input]) -> usize {
        if let Some(&r) = self.row_ids.get(word) {
            return r;
        }
        let r = self.rows.len();
        self.rows.push(Row {
            word: word.to_vec(),
            short: false,
            succ: Vec::new(),
            cells: vec![UNKNOWN; self.suffixes.len()],
        });
        self.row_ids.insert(word.to_vec(), r);
        for c in 0..self.suffixes.len() {
            self.require(r, c);
        }
        r
    }

    /// Moves `word` into `S`, creating its row and its successor rows.
    /// Returns `false` if it already was in `S`.
    pub fn add_short(&mut self, word: &[Input]) -> bool {
        debug_assert!(
            word.is_empty() || self.contains_short(&word[..word.len() - 1]),
            "S must stay prefix-closed"
        );
        let r = self.ensure_row(word);
        if self.rows[r].short {
            return false;
        }
        self.rows[r].short = true;
        self.short.push(r);
        let mut extended = word.to_vec();
        let succ = (0..self.inputs.len())
            .map(|a| {
                extended.push(a);
                let id = self.ensure_row(&extended);
                extended.pop();
                id
            })
            .collect();
        self.rows[r].succ = succ;
        true
    }

    /// Adds every prefix of `word` (including `ε` and `word`) to `S`.
    pub fn add_prefixes(&mut self, word: &[Input]) -> usize {
        (0..=word.len())
            .filter(|&i| self.add_short(&word[..i]))
            .count()
    }

    /// Appends a column. Returns `false` if it already was in `E`.
    pub fn add_suffix(&mut self, suffix: Word) -> bool {
        if self.suffixes.contains(&suffix) {
            return false;
        }
        let c = self.suffixes.len();
        self.suffixes.push(suffix);
        for r in 0..self.rows.len() {
            self.rows[r].cells.push(UNKNOWN);
            self.require(r, c);
        }
        true
    }

    fn cell_word(&self, r: usize, c: usize) -> Word {
        let mut w = self.rows[r].word.clone();
        w.extend_from_slice(&self.suffixes[c]);
        w
    }

    /// Fills cell `(r, c)` from a known answer or queues it.
    fn require(&mut self, r: usize, c: usize) {
        match self.answers.get(&self.cell_word(r, c)) {
            Some(&id) => self.rows[r].cells[c] = id,
            None => self.missing.push_back((r, c)),
        }
    }

    /// The word whose output the next undefined cell needs.
    pub fn next_query(&self) -> Option<Word> {
        let &(r, c) = self.missing.front()?;
        Some(self.cell_word(r, c))
    }

    /// Stores the answer to [`next_query`](Self::next_query).
    pub fn record(&mut self, output: Output) -> Result<(), LearnError> {
        let (r, c) = self
            .missing
            .front()
            .copied()
            .ok_or_else(|| LearnError::Contract("no cell is waiting for an answer".into()))?;
        match self.width {
            Some(w) if w != output.arity() => {
                return Err(LearnError::Protocol(format!(
                    "answer {output} has arity {}, expected {w}",
                    output.arity()
                )))
            }
            None => self.width = Some(output.arity()),
            _ => {}
        }
        self.missing.pop_front();
        let id = self.pool.intern(output, self.decomposition.as_ref());
        self.rows[r].cells[c] = id;
        self.answers.insert(self.cell_word(r, c), id);
        // cells queued for the same word before it was answered
        while let Some(&(r, c)) = self.missing.front() {
            match self.answers.get(&self.cell_word(r, c)) {
                Some(&id) => {
                    self.rows[r].cells[c] = id;
                    self.missing.pop_front();
                }
                None => break,
            }
        }
        Ok(())
    }

    /// Fills every undefined cell with `mq(row · suffix)`. Defined cells are
    /// never queried again.
    pub fn fill<E>(&mut self, mut mq: impl FnMut(&[Input]) -> Result<Output, E>) -> Result<(), E>
    where
        E: From<LearnError>,
    {
        while let Some(w) = self.next_query() {
            let out = mq(&w)?;
            self.record(out)?;
        }
        Ok(())
    }

    fn projected(&self, id: u32, component: Option<usize>) -> u32 {
        match (component, id) {
            (_, UNKNOWN) | (None, _) => id,
            (Some(i), id) => self.pool.projected[id as usize][i],
        }
    }

    /// Class id of every row under full (`None`) or component row equality.
    /// Undefined cells compare as a distinct value.
    fn row_classes(&self, component: Option<usize>) -> Vec<u32> {
        let mut ids: HashMap<Vec<u32>, u32> = HashMap::with_capacity(self.rows.len());
        let mut key = Vec::with_capacity(self.suffixes.len());
        self.rows
            .iter()
            .map(|row| {
                key.clear();
                key.extend(row.cells.iter().map(|&c| self.projected(c, component)));
                let next = ids.len() as u32;
                *ids.entry(key.clone()).or_insert(next)
            })
            .collect()
    }

    fn unclosed(&self, classes: &[u32]) -> Option<usize> {
        let mut present = vec![false; self.rows.len()];
        for &s in &self.short {
            present[classes[s] as usize] = true;
        }
        self.short
            .iter()
            .flat_map(|&s| self.rows[s].succ.iter().copied())
            .find(|&u| !present[classes[u] as usize])
    }

    fn inconsistent(&self, classes: &[u32], component: Option<usize>) -> Option<Inconsistency> {
        let mut rep: HashMap<u32, usize> = HashMap::new();
        for &s in &self.short {
            let &mut r = rep.entry(classes[s]).or_insert(s);
            if r == s {
                continue;
            }
            for a in 0..self.inputs.len() {
                let (ra, sa) = (self.rows[r].succ[a], self.rows[s].succ[a]);
                if classes[ra] == classes[sa] {
                    continue;
                }
                let column = (0..self.suffixes.len())
                    .find(|&c| {
                        self.projected(self.rows[ra].cells[c], component)
                            != self.projected(self.rows[sa].cells[c], component)
                    })
                    .expect("different classes differ in some column");
                return Some(Inconsistency {
                    component: component.unwrap_or(0),
                    first: self.rows[r].word.clone(),
                    second: self.rows[s].word.clone(),
                    input: a,
                    suffix: self.suffixes[column].clone(),
                });
            }
        }
        None
    }

    /// Classical closedness: the first long row (S order × input order) whose
    /// full row equals no short row.
    pub fn find_unclosed(&self) -> Option<Word> {
        let classes = self.row_classes(None);
        self.unclosed(&classes).map(|u| self.rows[u].word.clone())
    }

    pub fn is_closed(&self) -> bool {
        self.find_unclosed().is_none()
    }

    /// Classical consistency: the first pair of short rows with equal rows
    /// whose successors on some input differ.
    pub fn find_inconsistency(&self) -> Option<Inconsistency> {
        let classes = self.row_classes(None);
        self.inconsistent(&classes, None)
    }

    pub fn is_consistent(&self) -> bool {
        self.find_inconsistency().is_none()
    }

    fn component_classes(&self) -> Vec<Vec<u32>> {
        match self.decomposition {
            Some(_) => (0..self.components())
                .map(|i| self.row_classes(Some(i)))
                .collect(),
            None => vec![self.row_classes(None)],
        }
    }

    fn component_key(&self, i: usize) -> Option<usize> {
        self.decomposition.as_ref().map(|_| i)
    }

    /// Product-closedness: every long row must, for each component `i`,
    /// match some short row on `π_i`. Returns the first failing long row,
    /// with its lowest failing component.
    pub fn find_product_unclosed(&self) -> Option<Unclosed> {
        let classes = self.component_classes();
        let mut present: Vec<Vec<bool>> = classes
            .iter()
            .map(|_| vec![false; self.rows.len()])
            .collect();
        for &s in &self.short {
            for (i, cls) in classes.iter().enumerate() {
                present[i][cls[s] as usize] = true;
            }
        }
        for &s in &self.short {
            for &u in &self.rows[s].succ {
                if let Some(i) = (0..classes.len()).find(|&i| !present[i][classes[i][u] as usize]) {
                    return Some(Unclosed {
                        component: i,
                        row: self.rows[u].word.clone(),
                    });
                }
            }
        }
        None
    }

    pub fn is_product_closed(&self) -> bool {
        self.find_product_unclosed().is_none()
    }

    /// Product-consistency: for each component `i`, short rows with equal
    /// `π_i` rows must have successors with equal `π_i` rows. Components are
    /// checked in order; within one, the scan matches
    /// [`find_inconsistency`](Self::find_inconsistency).
    pub fn find_product_inconsistency(&self) -> Option<Inconsistency> {
        self.component_classes()
            .iter()
            .enumerate()
            .find_map(|(i, cls)| self.inconsistent(cls, self.component_key(i)))
    }

    pub fn is_product_consistent(&self) -> bool {
        self.find_product_inconsistency().is_none()
    }

    fn require_filled(&self) -> Result<(), LearnError> {
        if !self.is_filled() {
            return Err(LearnError::Contract("table has undefined cells".into()));
        }
        Ok(())
    }

    /// Quotient of the short rows by `classes`, with outputs taken from the
    /// `ε` column through `output`.
    fn quotient(
        &self,
        classes: &[u32],
        mut output: impl FnMut(u32) -> Output,
    ) -> Result<MooreMachine, LearnError> {
        let mut state_of: HashMap<u32, usize> = HashMap::new();
        let mut reps = Vec::new();
        for &s in &self.short {
            state_of.entry(classes[s]).or_insert_with(|| {
                reps.push(s);
                reps.len() - 1
            });
        }
        let k = self.inputs.len();
        let mut delta = Vec::with_capacity(reps.len() * k);
        for &r in &reps {
            for a in 0..k {
                let target = classes[self.rows[r].succ[a]];
                delta.push(*state_of.get(&target).ok_or_else(|| {
                    LearnError::Contract(format!(
                        "row {} is not closed",
                        self.inputs
                            .format_word(&self.rows[self.rows[r].succ[a]].word)
                    ))
                })?);
            }
        }
        let out = reps
            .iter()
            .map(|&r| output(self.rows[r].cells[0]))
            .collect();
        // ε is the first short row, so the initial state is 0.
        Ok(MooreMachine::new(self.inputs.clone(), delta, out, 0)?)
    }

    /// The classical hypothesis: one state per distinct short row.
    pub fn hypothesis(&self) -> Result<MooreMachine, LearnError> {
        self.require_filled()?;
        if !self.is_consistent() {
            return Err(LearnError::Contract("table is not consistent".into()));
        }
        let classes = self.row_classes(None);
        self.quotient(&classes, |id| self.pool.values[id as usize].clone())
    }

    /// One minimal hypothesis per component, built from component rows, and
    /// their reachable product laid out by the decomposition.
    pub fn product_hypothesis(&self) -> Result<ProductHypothesis, LearnError> {
        self.require_filled()?;
        if !self.is_product_consistent() {
            return Err(LearnError::Contract(
                "table is not product-consistent".into(),
            ));
        }
        let components = self
            .component_classes()
            .iter()
            .enumerate()
            .map(|(i, cls)| {
                self.quotient(cls, |id| {
                    let p = self.projected(id, self.component_key(i));
                    match self.decomposition {
                        Some(_) => self.pool.component_values[i][p as usize].clone(),
                        None => self.pool.values[p as usize].clone(),
                    }
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let parts: Vec<&MooreMachine> = components.iter().collect();
        let product = MooreMachine::reachable_product(&parts, self.decomposition.as_ref())?;
        Ok(ProductHypothesis {
            components,
            product,
        })
    }

    /// The table `(S, E, π_i T)` as a standalone single-component table.
    pub fn component_view(&self, component: usize) -> ObservationTable {
        let mut view = ObservationTable {
            inputs: self.inputs.clone(),
            decomposition: None,
            short: self.short.clone(),
            suffixes: self.suffixes.clone(),
            rows: self.rows.clone(),
            row_ids: self.row_ids.clone(),
            pool: OutputPool::default(),
            missing: self.missing.clone(),
            answers: self.answers.clone(),
            width: None,
        };
        let Some(d) = &self.decomposition else {
            view.pool = self.pool.clone();
            view.width = self.width;
            return view;
        };
        let mut remap: HashMap<u32, u32> = HashMap::new();
        for row in &mut view.rows {
            for cell in row.cells.iter_mut().filter(|c| **c != UNKNOWN) {
                *cell = *remap.entry(*cell).or_insert_with(|| {
                    let p = self.pool.projected[*cell as usize][component];
                    view.pool.intern(
                        self.pool.component_values[component][p as usize].clone(),
                        None,
                    )
                });
            }
        }
        for id in view.answers.values_mut() {
            *id = *remap.entry(*id).or_insert_with(|| {
                let p = self.pool.projected[*id as usize][component];
                view.pool.intern(
                    self.pool.component_values[component][p as usize].clone(),
                    None,
                )
            });
        }
        view.width = Some(d.groups()[component].len());
        view
    }
}
