//! Active learning of Moore machines whose outputs decompose as products.
//!
//! The crate provides the machine algebra ([`automata`]), simulator teachers
//! with query accounting ([`teacher`]), observation-table learners including
//! product-L* ([`table`]), the composed learner that runs one base learner
//! per output component ([`reduction`]), benchmark models and file formats
//! ([`models`]), and the experiment harness behind the command-line tool
//! ([`experiment`]).

pub mod automata;
pub mod experiment;
pub mod learner;
pub mod models;
pub mod reduction;
pub mod sym;
pub mod table;
pub mod teacher;

pub use automata::{Counterexample, Equivalence, MachineError, MooreMachine, OutputDecomposition};
pub use learner::{learn, ActiveLearner, LearnError, LearnOutcome, Step};
pub use sym::{Alphabet, Input, Output, Sym, Word};
pub use teacher::{EqMode, QueryStats, SamplingEqConfig, SimulatorTeacher, Teacher};
