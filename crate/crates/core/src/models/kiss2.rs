//! KISS2 finite-state-machine descriptions, as used by the logic-synthesis
//! benchmark suites, and their conversion to Moore machines.
//!
//! A file has `.i`, `.o`, `.p`, `.s` and `.r` headers followed by transition
//! lines `INPUT CURRENT NEXT OUTPUT`. Input patterns may contain `-` (don't
//! care). Outputs are taken literally, so a `-` output bit is just another
//! atom. Parsing stops at `.e` or `.end`.

use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use super::ModelError;
use crate::automata::{MooreMachine, OutputDecomposition};
use crate::sym::{Alphabet, Output, Sym};

/// Largest number of concrete input vectors a circuit may expand to.
pub const MAX_INPUT_VECTORS: usize = 1 << 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KissError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: {field} has width {found}, expected {expected}")]
    WidthMismatch {
        line: usize,
        field: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("missing `{0}` header")]
    MissingHeader(&'static str),
    #[error("conflicting transitions from state {state:?} on input {input} (lines {first} and {second})")]
    Conflict {
        state: String,
        input: String,
        first: usize,
        second: usize,
    },
    #[error("reset state {0:?} has no transitions")]
    UnknownReset(String),
    #[error("file declares no transitions")]
    Empty,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KissTransition {
    /// `Some(bit)` for a fixed input bit, `None` for don't care.
    pub input: Vec<Option<bool>>,
    pub current: usize,
    pub next: usize,
    pub output: String,
    pub line: usize,
}

impl KissTransition {
    fn matches(&self, input: &[bool]) -> bool {
        self.input
            .iter()
            .zip(input)
            .all(|(p, b)| p.is_none_or(|p| p == *b))
    }

    fn overlaps(&self, other: &KissTransition) -> Option<Vec<bool>> {
        self.input
            .iter()
            .zip(&other.input)
            .map(|(a, b)| match (a, b) {
                (Some(x), Some(y)) if x != y => None,
                (Some(x), _) | (None, Some(x)) => Some(*x),
                (None, None) => Some(false),
            })
            .collect()
    }
}

/// A parsed circuit: a transition-labelled (Mealy-style) machine over input
/// bit vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitModel {
    pub input_width: usize,
    pub output_width: usize,
    pub states: Vec<String>,
    pub reset: usize,
    pub transitions: Vec<KissTransition>,
    by_state: Vec<Vec<usize>>,
}

fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

impl CircuitModel {
    /// Number of transitions after replacing every don't-care by both values.
    pub fn expanded_transition_count(&self) -> usize {
        self.transitions
            .iter()
            .map(|t| 1usize << t.input.iter().filter(|b| b.is_none()).count())
            .sum()
    }

    /// The transition taken from `state` on a concrete input vector, if the
    /// circuit specifies one. Don't-care patterns are matched on lookup.
    pub fn step(&self, state: usize, input: &[bool]) -> Option<(usize, &str)> {
        self.by_state[state]
            .iter()
            .map(|&i| &self.transitions[i])
            .find(|t| t.matches(input))
            .map(|t| (t.next, t.output.as_str()))
    }

    /// The concrete input vectors that occur in some transition, sorted.
    pub fn input_vectors(&self) -> Result<Vec<Vec<bool>>, ModelError> {
        let mut vectors = BTreeSet::new();
        for t in &self.transitions {
            let free: Vec<usize> = (0..t.input.len())
                .filter(|&i| t.input[i].is_none())
                .collect();
            if free.len() >= usize::BITS as usize - 1 || 1usize << free.len() > MAX_INPUT_VECTORS {
                return Err(ModelError::TooLarge(format!(
                    "line {}: pattern expands to more than {MAX_INPUT_VECTORS} input vectors",
                    t.line
                )));
            }
            for mask in 0..1usize << free.len() {
                let mut v: Vec<bool> = t.input.iter().map(|b| b.unwrap_or(false)).collect();
                for (j, &pos) in free.iter().enumerate() {
                    v[pos] = mask >> j & 1 == 1;
                }
                vectors.insert(v);
                if vectors.len() > MAX_INPUT_VECTORS {
                    return Err(ModelError::TooLarge(format!(
                        "more than {MAX_INPUT_VECTORS} distinct input vectors"
                    )));
                }
            }
        }
        // BTreeSet<Vec<bool>> orders false < true, i.e. lexicographic on "0"/"1".
        Ok(vectors.into_iter().collect())
    }
}

pub fn parse_kiss2(text: &str) -> Result<CircuitModel, KissError> {
    let mut input_width = None;
    let mut output_width = None;
    let mut declared_products = None;
    let mut declared_states = None;
    let mut reset_name: Option<(usize, String)> = None;
    let mut states: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut transitions = Vec::new();

    let mut intern = |name: &str, states: &mut Vec<String>| -> usize {
        *index.entry(name.to_owned()).or_insert_with(|| {
            states.push(name.to_owned());
            states.len() - 1
        })
    };

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("");
        let fields: Vec<(usize, &str)> = content
            .split_whitespace()
            .map(|f| {
                let offset = f.as_ptr() as usize - content.as_ptr() as usize;
                (content[..offset].chars().count() + 1, f)
            })
            .collect();
        let Some(&(col, head)) = fields.first() else {
            continue;
        };
        let syntax = |column: usize, message: String| KissError::Syntax {
            line,
            column,
            message,
        };
        let number = |fields: &[(usize, &str)]| -> Result<usize, KissError> {
            match fields {
                [_, (c, v)] => v
                    .parse()
                    .map_err(|_| syntax(*c, format!("expected a number, found {v:?}"))),
                _ => Err(syntax(col, format!("`{head}` takes one number"))),
            }
        };
        if head.starts_with('.') {
            match head {
                ".i" => input_width = Some(number(&fields)?),
                ".o" => output_width = Some(number(&fields)?),
                ".p" => declared_products = Some(number(&fields)?),
                ".s" => declared_states = Some(number(&fields)?),
                ".r" => match fields.as_slice() {
                    [_, (_, name)] => reset_name = Some((line, (*name).to_owned())),
                    _ => return Err(syntax(col, "`.r` takes one state name".into())),
                },
                ".e" | ".end" => break,
                other => log::debug!("line {line}: ignoring directive {other}"),
            }
            continue;
        }

        let iw = input_width.ok_or(KissError::MissingHeader(".i"))?;
        let ow = output_width.ok_or(KissError::MissingHeader(".o"))?;
        let (pattern, current, next, output) = match fields.as_slice() {
            [i, c, n, o] => (*i, c.1, n.1, *o),
            [c, n, o] if iw == 0 => ((c.0, ""), c.1, n.1, *o),
            _ => {
                return Err(syntax(
                    col,
                    format!(
                        "expected 4 fields `input current next output`, found {}",
                        fields.len()
                    ),
                ))
            }
        };
        if pattern.1.chars().count() != iw {
            return Err(KissError::WidthMismatch {
                line,
                field: "input",
                expected: iw,
                found: pattern.1.chars().count(),
            });
        }
        if output.1.chars().count() != ow {
            return Err(KissError::WidthMismatch {
                line,
                field: "output",
                expected: ow,
                found: output.1.chars().count(),
            });
        }
        let input = pattern
            .1
            .chars()
            .enumerate()
            .map(|(i, c)| match c {
                '0' => Ok(Some(false)),
                '1' => Ok(Some(true)),
                '-' => Ok(None),
                other => Err(syntax(
                    pattern.0 + i,
                    format!("invalid input bit {other:?}"),
                )),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if let Some((i, c)) = output
            .1
            .chars()
            .enumerate()
            .find(|(_, c)| !matches!(c, '0' | '1' | '-'))
        {
            return Err(syntax(output.0 + i, format!("invalid output bit {c:?}")));
        }
        if next == "*" {
            return Err(syntax(
                col,
                "unspecified next state `*` is not supported".into(),
            ));
        }
        let current = intern(current, &mut states);
        let next = intern(next, &mut states);
        transitions.push(KissTransition {
            input,
            current,
            next,
            output: output.1.to_owned(),
            line,
        });
    }

    let input_width = input_width.ok_or(KissError::MissingHeader(".i"))?;
    let output_width = output_width.ok_or(KissError::MissingHeader(".o"))?;
    let first = transitions.first().ok_or(KissError::Empty)?;
    let reset = match reset_name {
        Some((_, name)) => *index.get(&name).ok_or(KissError::UnknownReset(name))?,
        None => first.current,
    };
    if declared_products.is_some_and(|p| p != transitions.len()) {
        log::warn!(
            ".p declares {} transitions, found {}",
            declared_products.unwrap_or_default(),
            transitions.len()
        );
    }
    if declared_states.is_some_and(|s| s != states.len()) {
        log::warn!(
            ".s declares {} states, found {}",
            declared_states.unwrap_or_default(),
            states.len()
        );
    }

    let mut by_state = vec![Vec::new(); states.len()];
    for (i, t) in transitions.iter().enumerate() {
        by_state[t.current].push(i);
    }
    for outgoing in &by_state {
        for (x, &i) in outgoing.iter().enumerate() {
            for &j in &outgoing[x + 1..] {
                let (a, b) = (&transitions[i], &transitions[j]);
                if let Some(witness) = a.overlaps(b) {
                    if a.next != b.next || a.output != b.output {
                        return Err(KissError::Conflict {
                            state: states[a.current].clone(),
                            input: bits_to_string(&witness),
                            first: a.line,
                            second: b.line,
                        });
                    }
                }
            }
        }
    }

    Ok(CircuitModel {
        input_width,
        output_width,
        states,
        reset,
        transitions,
        by_state,
    })
}

/// Output atom used at the initial Moore state, before any transition fired.
pub const INITIAL_OUTPUT_MARKER: &str = "*";

/// Converts a circuit to a Moore machine whose states pair a circuit state
/// with the output emitted on entering it. See
/// [`circuit_to_moore_with_initial`].
pub fn circuit_to_moore(
    circuit: &CircuitModel,
    grouping: &[Vec<usize>],
) -> Result<(MooreMachine, OutputDecomposition), ModelError> {
    circuit_to_moore_with_initial(circuit, grouping, INITIAL_OUTPUT_MARKER)
}

/// Converts a circuit to a Moore machine.
///
/// The initial state is `(reset, marker)`, outputting `marker` in every bit.
/// Taking input `x` from `(s, _)` leads to `(s', o)` where the circuit moves
/// from `s` to `s'` emitting `o`. Inputs the circuit leaves unspecified lead
/// to an absorbing `undef` state that outputs `-` in every bit. The input
/// alphabet is the sorted set of concrete input vectors that occur in the
/// file. Output bits are grouped into components by `grouping`, which must
/// partition `0..output_width`.
pub fn circuit_to_moore_with_initial(
    circuit: &CircuitModel,
    grouping: &[Vec<usize>],
    marker: &str,
) -> Result<(MooreMachine, OutputDecomposition), ModelError> {
    let decomposition = OutputDecomposition::from_groups(circuit.output_width, grouping.to_vec())?;
    let vectors = circuit.input_vectors()?;
    let names: Vec<String> = vectors.iter().map(|v| bits_to_string(v)).collect();
    let inputs = Alphabet::new(names.iter().map(String::as_str))?;
    let k = vectors.len();

    #[derive(Clone, PartialEq, Eq, Hash)]
    enum Key {
        Start,
        At(usize, String),
        Undefined,
    }
    let mut keys = vec![Key::Start];
    let mut ids: HashMap<Key, usize> = HashMap::from([(Key::Start, 0)]);
    let mut delta = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(id) = queue.pop_front() {
        let state = match &keys[id] {
            Key::Start => Some(circuit.reset),
            Key::At(s, _) => Some(*s),
            Key::Undefined => None,
        };
        for v in &vectors {
            let key = match state.and_then(|s| circuit.step(s, v)) {
                Some((next, out)) => Key::At(next, out.to_owned()),
                None => Key::Undefined,
            };
            let target = *ids.entry(key.clone()).or_insert_with(|| {
                keys.push(key);
                queue.push_back(keys.len() - 1);
                keys.len() - 1
            });
            delta.push(target);
        }
    }
    debug_assert_eq!(delta.len(), keys.len() * k);

    let width = circuit.output_width;
    let out = keys
        .iter()
        .map(|key| match key {
            Key::Start => Output::new(std::iter::repeat_n(Sym::new(marker), width)),
            Key::At(_, o) => Output::from_chars(o),
            Key::Undefined => Output::new(std::iter::repeat_n(Sym::new("-"), width)),
        })
        .collect();
    let state_names = keys
        .iter()
        .map(|key| match key {
            Key::Start => format!("{}/{marker}", circuit.states[circuit.reset]),
            Key::At(s, o) => format!("{}/{o}", circuit.states[*s]),
            Key::Undefined => "undef".to_owned(),
        })
        .collect();
    let machine = MooreMachine::new(inputs, delta, out, 0)?.with_state_names(state_names);
    Ok((machine, decomposition))
}
