use rand::Rng;

use crate::automata::MooreMachine;
use crate::sym::{Alphabet, Output, Sym};

/// A uniformly random machine: every transition target and every output
/// atom is drawn independently. Initial state is 0; unreachable states are
/// kept.
pub fn random_machine<R: Rng + ?Sized>(
    rng: &mut R,
    size: usize,
    inputs: &Alphabet,
    arity: usize,
    atoms: &[&str],
) -> MooreMachine {
    assert!(size > 0 && arity > 0 && !atoms.is_empty());
    let atoms: Vec<Sym> = atoms.iter().map(|a| Sym::new(a)).collect();
    let delta = (0..size * inputs.len())
        .map(|_| rng.random_range(0..size))
        .collect();
    let out = (0..size)
        .map(|_| Output::new((0..arity).map(|_| atoms[rng.random_range(0..atoms.len())])))
        .collect();
    MooreMachine::new(inputs.clone(), delta, out, 0).expect("well-formed by construction")
}

/// Alphabet `a, b, c, …` of the given size (at most 26).
pub fn letters(count: usize) -> Alphabet {
    assert!((1..=26).contains(&count));
    let names: Vec<String> = (0..count)
        .map(|i| char::from(b'a' + i as u8).to_string())
        .collect();
    Alphabet::new(names.iter().map(String::as_str)).expect("distinct letters")
}
