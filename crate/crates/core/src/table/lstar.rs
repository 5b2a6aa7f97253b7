use super::{ObservationTable, ProductHypothesis};
use crate::automata::{Counterexample, MooreMachine, OutputDecomposition};
use crate::learner::{learn, ActiveLearner, LearnError, LearnOutcome, Step};
use crate::sym::{Alphabet, Output};
use crate::teacher::Teacher;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LStarMode {
    /// Classical closedness/consistency over whole rows.
    Classic,
    /// Product-closedness/consistency over component rows, with one minimal
    /// hypothesis per component.
    Product,
}

#[derive(Clone, Debug)]
enum Current {
    Classic(MooreMachine),
    Product(ProductHypothesis),
}

impl Current {
    fn machine(&self) -> &MooreMachine {
        match self {
            Current::Classic(m) => m,
            Current::Product(p) => &p.product,
        }
    }
}

type Observer = Box<dyn FnMut(&ObservationTable)>;

/// Angluin-style learner over an [`ObservationTable`].
///
/// Each pass repairs closedness first (moving the offending long row into
/// `S`), then consistency (adding the separating column `a·e`), and proposes
/// a hypothesis once both hold. A counterexample adds all of its prefixes
/// to `S`.
pub struct LStar {
    table: ObservationTable,
    mode: LStarMode,
    pending: bool,
    current: Option<Current>,
    done: bool,
    observer: Option<Observer>,
}

impl LStar {
    pub fn new(inputs: Alphabet) -> Self {
        LStar {
            table: ObservationTable::new(inputs),
            mode: LStarMode::Classic,
            pending: false,
            current: None,
            done: false,
            observer: None,
        }
    }

    pub fn product(inputs: Alphabet, decomposition: OutputDecomposition) -> Self {
        LStar {
            table: ObservationTable::with_decomposition(inputs, decomposition),
            mode: LStarMode::Product,
            pending: false,
            current: None,
            done: false,
            observer: None,
        }
    }

    /// Calls `observer` with every fully filled table the learner inspects,
    /// before each closedness/consistency check.
    pub fn with_observer(mut self, observer: impl FnMut(&ObservationTable) + 'static) -> Self {
        self.observer = Some(Box::new(observer));
        self
    }

    pub fn mode(&self) -> LStarMode {
        self.mode
    }

    pub fn table(&self) -> &ObservationTable {
        &self.table
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    /// Component hypotheses of the last product-mode hypothesis.
    pub fn components(&self) -> Option<&[MooreMachine]> {
        match &self.current {
            Some(Current::Product(p)) => Some(&p.components),
            _ => None,
        }
    }

    fn repair_or_build(&mut self) -> Result<Option<Current>, LearnError> {
        match self.mode {
            LStarMode::Classic => {
                if let Some(row) = self.table.find_unclosed() {
                    self.table.add_short(&row);
                    return Ok(None);
                }
                if let Some(inc) = self.table.find_inconsistency() {
                    self.table.add_suffix(inc.new_suffix());
                    return Ok(None);
                }
                Ok(Some(Current::Classic(self.table.hypothesis()?)))
            }
            LStarMode::Product => {
                if let Some(u) = self.table.find_product_unclosed() {
                    self.table.add_short(&u.row);
                    return Ok(None);
                }
                if let Some(inc) = self.table.find_product_inconsistency() {
                    self.table.add_suffix(inc.new_suffix());
                    return Ok(None);
                }
                Ok(Some(Current::Product(self.table.product_hypothesis()?)))
            }
        }
    }
}

impl ActiveLearner for LStar {
    fn step(&mut self) -> Result<Step, LearnError> {
        if self.pending {
            return Err(LearnError::Contract(
                "step called with a query pending".into(),
            ));
        }
        if let Some(current) = &self.current {
            return Ok(Step::Hypothesis(current.machine().clone()));
        }
        loop {
            if let Some(word) = self.table.next_query() {
                self.pending = true;
                return Ok(Step::Query(word));
            }
            if let Some(observer) = &mut self.observer {
                observer(&self.table);
            }
            if let Some(current) = self.repair_or_build()? {
                let h = current.machine().clone();
                self.current = Some(current);
                return Ok(Step::Hypothesis(h));
            }
        }
    }

    fn answer(&mut self, output: Output) -> Result<(), LearnError> {
        if !self.pending {
            return Err(LearnError::Contract(
                "answer without a pending query".into(),
            ));
        }
        self.table.record(output)?;
        self.pending = false;
        Ok(())
    }

    fn refute(&mut self, ce: Counterexample) -> Result<(), LearnError> {
        let current = self
            .current
            .take()
            .ok_or_else(|| LearnError::Contract("no hypothesis to refute".into()))?;
        let predicted = current.machine().run(&ce.word)?;
        if predicted == &ce.expected {
            let word = self.table.inputs().format_word(&ce.word);
            self.current = Some(current);
            return Err(LearnError::Protocol(format!(
                "counterexample {word} agrees with the hypothesis (both output {})",
                ce.expected
            )));
        }
        self.table.add_prefixes(&ce.word);
        Ok(())
    }

    fn accept(&mut self) {
        self.done = true;
    }
}

/// Classical L* against `teacher`.
pub fn lstar<T: Teacher + ?Sized>(teacher: &mut T) -> Result<LearnOutcome, LearnError> {
    let mut learner = LStar::new(teacher.inputs().clone());
    learn(&mut learner, teacher)
}

#[derive(Clone, Debug)]
pub struct ProductLStarOutcome {
    pub outcome: LearnOutcome,
    pub components: Vec<MooreMachine>,
}

/// Product-L*: a single table, one minimal hypothesis per component.
pub fn product_lstar<T: Teacher + ?Sized>(
    teacher: &mut T,
    decomposition: OutputDecomposition,
) -> Result<ProductLStarOutcome, LearnError> {
    let mut learner = LStar::product(teacher.inputs().clone(), decomposition);
    let outcome = learn(&mut learner, teacher)?;
    let components = learner.components().map(<[_]>::to_vec).unwrap_or_default();
    Ok(ProductLStarOutcome {
        outcome,
        components,
    })
}

/// Factory for the composed learner: a classic L* per component.
pub fn lstar_factory() -> impl FnMut(usize, &Alphabet) -> Box<dyn ActiveLearner> {
    |_, inputs| Box::new(LStar::new(inputs.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{letters, make_register_machine, random_machine};
    use crate::teacher::SimulatorTeacher;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn one_state_target() {
        let inputs = letters(2);
        let target =
            MooreMachine::from_fn(inputs.clone(), 1, 0, |_, _| 0, |_| Output::from_chars("1"))
                .unwrap();
        let mut teacher = SimulatorTeacher::exact(target);
        let mut learner = LStar::new(inputs);
        let outcome = learn(&mut learner, &mut teacher).unwrap();
        assert_eq!(outcome.hypothesis.size(), 1);
        assert_eq!(teacher.stats().eq_count, 1);
        assert_eq!(learner.table().short_count(), 1);
    }

    #[test]
    fn learns_m2_and_m3() {
        for (n, size) in [(2, 8), (3, 24)] {
            let target = make_register_machine(n).unwrap();
            let mut teacher = SimulatorTeacher::exact(target.clone());
            let outcome = lstar(&mut teacher).unwrap();
            assert_eq!(outcome.hypothesis.size(), size);
            assert!(outcome
                .hypothesis
                .equivalent(&target)
                .unwrap()
                .is_equivalent());
        }
    }

    #[test]
    fn product_lstar_on_m3_has_small_components() {
        let target = make_register_machine(3).unwrap();
        let mut teacher = SimulatorTeacher::exact(target.clone());
        let result = product_lstar(&mut teacher, OutputDecomposition::bitwise(3)).unwrap();
        assert_eq!(result.components.len(), 3);
        for c in &result.components {
            assert_eq!(c.size(), 6);
            assert!(c.is_minimal());
        }
        assert!(result
            .outcome
            .hypothesis
            .equivalent(&target)
            .unwrap()
            .is_equivalent());
    }

    #[test]
    fn bogus_counterexample_is_a_protocol_violation() {
        let target = make_register_machine(1).unwrap();
        let mut learner = LStar::new(target.inputs().clone());
        let h = loop {
            match learner.step().unwrap() {
                Step::Query(w) => learner.answer(target.run(&w).unwrap().clone()).unwrap(),
                Step::Hypothesis(h) => break h,
            }
        };
        let ce = Counterexample {
            word: vec![0],
            expected: h.run(&[0]).unwrap().clone(),
            actual: h.run(&[0]).unwrap().clone(),
        };
        assert!(matches!(learner.refute(ce), Err(LearnError::Protocol(_))));
    }

    #[test]
    fn protocol_misuse_is_reported() {
        let mut learner = LStar::new(letters(1));
        assert!(matches!(
            learner.answer(Output::from_chars("0")),
            Err(LearnError::Contract(_))
        ));
        assert!(matches!(learner.step().unwrap(), Step::Query(_)));
        assert!(matches!(learner.step(), Err(LearnError::Contract(_))));
    }

    #[test]
    fn random_targets() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let target = random_machine(&mut rng, 6, &letters(2), 2, &["0", "1"]);
            let mut teacher = SimulatorTeacher::exact(target.clone());
            let h = lstar(&mut teacher).unwrap().hypothesis;
            assert!(target.equivalent(&h).unwrap().is_equivalent());
            assert_eq!(h.size(), target.minimize().size());
        }
    }
}
