//! Minimally adequate teachers backed by a hidden simulator machine.
//!
//! Every word executed on the hidden machine costs its length plus one reset
//! action. Equivalence queries are either answered exactly by a bisimulation
//! check (free of actions) or by random sampling of test words (each sampled
//! word is executed and paid for).

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};

use crate::automata::{Counterexample, MachineError, MooreMachine};
use crate::sym::{Alphabet, Output, Word};

/// Query counters in the layout of the experiment tables.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QueryStats {
    /// Membership queries issued by learners.
    pub mq_count: u64,
    pub eq_count: u64,
    /// Input symbols executed on the hidden machine plus one per reset.
    pub action_count: u64,
    /// Membership queries issued by a composition driver to route
    /// counterexamples.
    pub dispatch_mq_count: u64,
}

impl QueryStats {
    pub fn total_mqs(&self) -> u64 {
        self.mq_count + self.dispatch_mq_count
    }
}

/// The MQ/EQ interface learners talk to.
///
/// Membership queries take `&self` so one teacher can serve several
/// learners; counters are updated atomically.
pub trait Teacher {
    fn inputs(&self) -> &Alphabet;

    fn mq(&self, word: &[usize]) -> Result<Output, MachineError>;

    /// A membership query made by a driver rather than a learner. Counted in
    /// `dispatch_mq_count` instead of `mq_count`.
    fn dispatch_mq(&self, word: &[usize]) -> Result<Output, MachineError>;

    /// `None` means the hypothesis was accepted.
    fn eq(&mut self, hypothesis: &MooreMachine) -> Result<Option<Counterexample>, MachineError>;

    fn stats(&self) -> QueryStats;
}

#[derive(Clone, Debug, PartialEq)]
pub struct SamplingEqConfig {
    /// Words drawn per equivalence query.
    pub sample_count: usize,
    pub min_length: usize,
    /// Mean of the geometric number of symbols added to `min_length`.
    pub expected_extra_length: f64,
    pub seed: u64,
}

impl Default for SamplingEqConfig {
    fn default() -> Self {
        SamplingEqConfig {
            sample_count: 1000,
            min_length: 3,
            expected_extra_length: 10.0,
            seed: 0,
        }
    }
}

impl SamplingEqConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.sample_count == 0 {
            return Err("sample count must be at least 1".into());
        }
        if !(self.expected_extra_length >= 0.0 && self.expected_extra_length.is_finite()) {
            return Err("expected extra length must be a finite nonnegative number".into());
        }
        Ok(())
    }

    /// Random test words for the equivalence query with the given ordinal
    /// (0-based). The stream depends only on the seed and the ordinal.
    pub fn words(&self, inputs: usize, ordinal: u64) -> impl Iterator<Item = Word> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(ordinal);
        let tail = Geometric::new(1.0 / (1.0 + self.expected_extra_length))
            .expect("success probability in (0, 1]");
        let min_length = self.min_length;
        (0..self.sample_count).map(move |_| {
            let len = min_length + tail.sample(&mut rng) as usize;
            (0..len).map(|_| rng.random_range(0..inputs)).collect()
        })
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub enum EqMode {
    #[default]
    Exact,
    Sampling(SamplingEqConfig),
}

#[derive(Debug, Default)]
struct Counters {
    mq: AtomicU64,
    eq: AtomicU64,
    actions: AtomicU64,
    dispatch: AtomicU64,
}

/// A teacher that simulates a hidden Moore machine.
#[derive(Debug)]
pub struct SimulatorTeacher {
    target: MooreMachine,
    mode: EqMode,
    counters: Counters,
}

impl SimulatorTeacher {
    pub fn new(target: MooreMachine, mode: EqMode) -> Self {
        SimulatorTeacher {
            target,
            mode,
            counters: Counters::default(),
        }
    }

    pub fn exact(target: MooreMachine) -> Self {
        Self::new(target, EqMode::Exact)
    }

    pub fn target(&self) -> &MooreMachine {
        &self.target
    }

    pub fn mode(&self) -> &EqMode {
        &self.mode
    }

    fn execute(&self, word: &[usize]) -> Result<Output, MachineError> {
        let out = self.target.run(word)?.clone();
        self.counters
            .actions
            .fetch_add(word.len() as u64 + 1, Ordering::Relaxed);
        Ok(out)
    }

    /// Exact equivalence by bisimulation; returns the shortest counterexample.
    pub fn exact_eq(
        &mut self,
        hypothesis: &MooreMachine,
    ) -> Result<Option<Counterexample>, MachineError> {
        self.counters.eq.fetch_add(1, Ordering::Relaxed);
        Ok(self.target.equivalent(hypothesis)?.counterexample())
    }

    /// Random-sampling equivalence: sound, but may accept a wrong hypothesis.
    pub fn sampling_eq(
        &mut self,
        hypothesis: &MooreMachine,
        config: &SamplingEqConfig,
    ) -> Result<Option<Counterexample>, MachineError> {
        if self.target.inputs() != hypothesis.inputs() {
            return Err(MachineError::AlphabetMismatch);
        }
        let ordinal = self.counters.eq.fetch_add(1, Ordering::Relaxed);
        for word in config.words(self.target.inputs().len(), ordinal) {
            let expected = self.execute(&word)?;
            let actual = hypothesis.run(&word)?;
            if &expected != actual {
                return Ok(Some(Counterexample {
                    word,
                    actual: actual.clone(),
                    expected,
                }));
            }
        }
        Ok(None)
    }
}

impl Teacher for SimulatorTeacher {
    fn inputs(&self) -> &Alphabet {
        self.target.inputs()
    }

    fn mq(&self, word: &[usize]) -> Result<Output, MachineError> {
        let out = self.execute(word)?;
        self.counters.mq.fetch_add(1, Ordering::Relaxed);
        Ok(out)
    }

    fn dispatch_mq(&self, word: &[usize]) -> Result<Output, MachineError> {
        let out = self.execute(word)?;
        self.counters.dispatch.fetch_add(1, Ordering::Relaxed);
        Ok(out)
    }

    fn eq(&mut self, hypothesis: &MooreMachine) -> Result<Option<Counterexample>, MachineError> {
        match self.mode.clone() {
            EqMode::Exact => self.exact_eq(hypothesis),
            EqMode::Sampling(config) => self.sampling_eq(hypothesis, &config),
        }
    }

    fn stats(&self) -> QueryStats {
        QueryStats {
            mq_count: self.counters.mq.load(Ordering::Relaxed),
            eq_count: self.counters.eq.load(Ordering::Relaxed),
            action_count: self.counters.actions.load(Ordering::Relaxed),
            dispatch_mq_count: self.counters.dispatch.load(Ordering::Relaxed),
        }
    }
}

/// Opt-in memoizing wrapper. Repeated membership queries are answered from
/// the cache without reaching the inner teacher; hits are counted separately
/// and the inner counters only ever see cache misses.
pub struct CachedTeacher<T> {
    inner: T,
    cache: Mutex<HashMap<Word, Output>>,
    hits: AtomicU64,
}

impl<T: Teacher> CachedTeacher<T> {
    pub fn new(inner: T) -> Self {
        CachedTeacher {
            inner,
            cache: Mutex::new(HashMap::new()),
            hits: AtomicU64::new(0),
        }
    }

    pub fn cache_hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn into_inner(self) -> T {
        self.inner
    }

    fn cached(
        &self,
        word: &[usize],
        query: impl FnOnce(&[usize]) -> Result<Output, MachineError>,
    ) -> Result<Output, MachineError> {
        if let Some(out) = self.cache.lock().unwrap().get(word) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(out.clone());
        }
        let out = query(word)?;
        self.cache
            .lock()
            .unwrap()
            .insert(word.to_vec(), out.clone());
        Ok(out)
    }
}

impl<T: Teacher> Teacher for CachedTeacher<T> {
    fn inputs(&self) -> &Alphabet {
        self.inner.inputs()
    }

    fn mq(&self, word: &[usize]) -> Result<Output, MachineError> {
        self.cached(word, |w| self.inner.mq(w))
    }

    fn dispatch_mq(&self, word: &[usize]) -> Result<Output, MachineError> {
        self.cached(word, |w| self.inner.dispatch_mq(w))
    }

    fn eq(&mut self, hypothesis: &MooreMachine) -> Result<Option<Counterexample>, MachineError> {
        self.inner.eq(hypothesis)
    }

    fn stats(&self) -> QueryStats {
        self.inner.stats()
    }
}
