use super::ModelError;
use crate::automata::MooreMachine;
use crate::sym::{Alphabet, Output, Sym};

/// Largest bit count accepted by [`make_register_machine`].
pub const MAX_REGISTER_BITS: usize = 20;

const LEFT: usize = 0;
const RIGHT: usize = 1;
const FLIP: usize = 2;

pub fn register_inputs() -> Alphabet {
    Alphabet::new(["L", "R", "F"]).expect("three distinct letters")
}

fn bit(b: bool) -> Sym {
    Sym::new(if b { "1" } else { "0" })
}

/// Head movement on positions `0..n`, wrapping at both ends.
fn move_head(head: usize, input: usize, n: usize) -> usize {
    match input {
        LEFT => (head + n - 1) % n,
        RIGHT => (head + 1) % n,
        _ => head,
    }
}

/// The n-bit register machine: a circular tape of `n` bits with a head that
/// moves left (`L`), right (`R`), or flips the bit under it (`F`). The output
/// is the whole bit vector. It has `n * 2^n` states, all reachable and
/// pairwise distinguishable.
///
/// State `s` encodes head position `s % n` and bit vector `s / n`, with bit
/// `i` of the vector stored in bit `i` of the integer.
pub fn make_register_machine(n: usize) -> Result<MooreMachine, ModelError> {
    if n == 0 {
        return Err(ModelError::InvalidParameter(
            "register machine needs n >= 1".into(),
        ));
    }
    if n > MAX_REGISTER_BITS {
        return Err(ModelError::TooLarge(format!(
            "register machine with {n} bits exceeds the cap of {MAX_REGISTER_BITS}"
        )));
    }
    let size = n << n;
    let m = MooreMachine::from_fn(
        register_inputs(),
        size,
        0,
        |s, a| {
            let (bits, head) = (s / n, s % n);
            match a {
                FLIP => (bits ^ (1 << head)) * n + head,
                _ => bits * n + move_head(head, a, n),
            }
        },
        |s| Output::new((0..n).map(|i| bit((s / n) >> i & 1 == 1))),
    )?;
    Ok(m)
}

/// Component `l` (1-based) of the n-bit register machine: tracks only bit
/// `l` and the head, and flips only when the head is on position `l`. It has
/// `2n` states.
///
/// State `s` encodes head position `s % n` and the tracked bit `s / n`.
pub fn make_register_component(n: usize, l: usize) -> Result<MooreMachine, ModelError> {
    if n == 0 || n > MAX_REGISTER_BITS {
        return Err(ModelError::InvalidParameter(format!(
            "bit count {n} out of range"
        )));
    }
    if l == 0 || l > n {
        return Err(ModelError::InvalidParameter(format!(
            "component {l} out of range 1..={n}"
        )));
    }
    let m = MooreMachine::from_fn(
        register_inputs(),
        2 * n,
        0,
        |s, a| {
            let (b, head) = (s / n, s % n);
            match a {
                FLIP if head == l - 1 => (1 - b) * n + head,
                _ => b * n + move_head(head, a, n),
            }
        },
        |s| Output::new([bit(s / n == 1)]),
    )?;
    Ok(m)
}
