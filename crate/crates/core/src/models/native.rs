//! Line-oriented text format for Moore machines.
//!
//! ```text
//! file        = { line } ;
//! line        = [ statement ] [ "#" { any } ] newline ;
//! statement   = inputs | outputs | states | initial | output-line | transition ;
//! inputs      = "inputs" symbol { symbol } ;
//! outputs     = "outputs" arity ;
//! states      = "states" name { name } ;
//! initial     = "initial" name ;
//! output-line = name ":" atom { atom } ;
//! transition  = name symbol "->" name ;
//! ```
//!
//! Fields are separated by whitespace; `name:` is accepted for `name :`.
//! `inputs`, `outputs` and `initial` are required. When `states` is present
//! it fixes the state order and every referenced state must be listed;
//! otherwise states are numbered by first appearance. Every state needs one
//! output line and one transition per input.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::automata::{MachineError, MooreMachine};
use crate::sym::{Alphabet, Output, Sym};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: input {symbol:?} is not declared")]
    UndeclaredInput { line: usize, symbol: String },
    #[error("line {line}: state {state:?} is not declared")]
    UndeclaredState { line: usize, state: String },
    #[error("line {line}: output has {found} atoms but the declared arity is {expected}")]
    ArityMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: duplicate {what}")]
    Duplicate { line: usize, what: String },
    #[error("missing `{0}` directive")]
    MissingDirective(&'static str),
    #[error("no transition from state {state:?} on input {input:?}")]
    MissingTransition { state: String, input: String },
    #[error("no output declared for state {state:?}")]
    MissingOutput { state: String },
    #[error(transparent)]
    Machine(#[from] MachineError),
}

fn tokenize(line: &str) -> Vec<(usize, &str)> {
    let line = line.split('#').next().unwrap_or("");
    let mut tokens = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                tokens.push((s, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        tokens.push((s, &line[s..]));
    }
    // byte offset -> 1-based character column
    tokens
        .into_iter()
        .map(|(s, t)| (line[..s].chars().count() + 1, t))
        .collect()
}

struct States {
    declared: bool,
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl States {
    fn resolve(&mut self, name: &str, line: usize) -> Result<usize, ParseError> {
        if let Some(&i) = self.index.get(name) {
            return Ok(i);
        }
        if self.declared {
            return Err(ParseError::UndeclaredState {
                line,
                state: name.to_owned(),
            });
        }
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), self.names.len() - 1);
        Ok(self.names.len() - 1)
    }
}

pub fn parse_moore(text: &str) -> Result<MooreMachine, ParseError> {
    let mut inputs: Option<Alphabet> = None;
    let mut arity: Option<usize> = None;
    let mut initial: Option<usize> = None;
    let mut states = States {
        declared: false,
        names: Vec::new(),
        index: HashMap::new(),
    };
    let mut outputs: HashMap<usize, Output> = HashMap::new();
    let mut transitions: HashMap<(usize, usize), usize> = HashMap::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let tokens = tokenize(raw);
        let Some(&(col, head)) = tokens.first() else {
            continue;
        };
        let syntax = |column: usize, message: String| ParseError::Syntax {
            line,
            column,
            message,
        };
        let duplicate = |what: &str| ParseError::Duplicate {
            line,
            what: what.to_owned(),
        };
        match head {
            "inputs" => {
                if inputs.is_some() {
                    return Err(duplicate("inputs directive"));
                }
                if tokens.len() < 2 {
                    return Err(syntax(col, "`inputs` needs at least one symbol".into()));
                }
                let alphabet =
                    Alphabet::new(tokens[1..].iter().map(|&(_, t)| t)).map_err(|e| match e {
                        MachineError::DuplicateInput(s) => duplicate(&format!("input {s:?}")),
                        other => other.into(),
                    })?;
                inputs = Some(alphabet);
            }
            "outputs" => {
                if arity.is_some() {
                    return Err(duplicate("outputs directive"));
                }
                let value = match tokens.as_slice() {
                    [_, (c, n)] => n.parse::<usize>().ok().filter(|&n| n > 0).ok_or_else(|| {
                        syntax(*c, format!("expected a positive arity, found {n:?}"))
                    })?,
                    _ => return Err(syntax(col, "expected `outputs <arity>`".into())),
                };
                arity = Some(value);
            }
            "states" => {
                if states.declared || !states.names.is_empty() {
                    return Err(syntax(
                        col,
                        "`states` must precede every state reference".into(),
                    ));
                }
                for &(_, name) in &tokens[1..] {
                    if states.index.contains_key(name) {
                        return Err(duplicate(&format!("state {name:?}")));
                    }
                    states.resolve(name, line)?;
                }
                states.declared = true;
            }
            "initial" => {
                if initial.is_some() {
                    return Err(duplicate("initial directive"));
                }
                match tokens.as_slice() {
                    [_, (_, name)] => initial = Some(states.resolve(name, line)?),
                    _ => return Err(syntax(col, "expected `initial <state>`".into())),
                }
            }
            _ => {
                let (name, rest) = match head.strip_suffix(':') {
                    Some(stripped) if !stripped.is_empty() => (stripped, &tokens[..]),
                    _ => (head, &tokens[1..]),
                };
                let is_output = head.ends_with(':') && head.len() > 1
                    || rest.first().is_some_and(|&(_, t)| t == ":");
                if is_output {
                    let atoms = if head.ends_with(':') && head.len() > 1 {
                        &tokens[1..]
                    } else {
                        &tokens[2..]
                    };
                    let expected = arity.ok_or_else(|| {
                        syntax(col, "`outputs` must be declared before output lines".into())
                    })?;
                    if atoms.len() != expected {
                        return Err(ParseError::ArityMismatch {
                            line,
                            expected,
                            found: atoms.len(),
                        });
                    }
                    let state = states.resolve(name, line)?;
                    let out = Output::from_strs(atoms.iter().map(|&(_, t)| t));
                    if outputs.insert(state, out).is_some() {
                        return Err(duplicate(&format!("output for state {name:?}")));
                    }
                } else {
                    let [_, (scol, symbol), (acol, arrow), (_, target)] = tokens.as_slice() else {
                        return Err(syntax(
                            col,
                            format!("unrecognised line; expected `state input -> state` or `state : atoms`, found {head:?}"),
                        ));
                    };
                    if *arrow != "->" {
                        return Err(syntax(*acol, format!("expected `->`, found {arrow:?}")));
                    }
                    let alphabet = inputs.as_ref().ok_or_else(|| {
                        syntax(*scol, "`inputs` must be declared before transitions".into())
                    })?;
                    let input = alphabet.index_of(Sym::new(symbol)).ok_or_else(|| {
                        ParseError::UndeclaredInput {
                            line,
                            symbol: (*symbol).to_owned(),
                        }
                    })?;
                    let from = states.resolve(head, line)?;
                    let to = states.resolve(target, line)?;
                    if transitions.insert((from, input), to).is_some() {
                        return Err(duplicate(&format!("transition ({head}, {symbol})")));
                    }
                }
            }
        }
    }

    let inputs = inputs.ok_or(ParseError::MissingDirective("inputs"))?;
    arity.ok_or(ParseError::MissingDirective("outputs"))?;
    let initial = initial.ok_or(ParseError::MissingDirective("initial"))?;
    let k = inputs.len();
    let n = states.names.len();
    let mut delta = Vec::with_capacity(n * k);
    let mut out = Vec::with_capacity(n);
    for q in 0..n {
        out.push(
            outputs
                .remove(&q)
                .ok_or_else(|| ParseError::MissingOutput {
                    state: states.names[q].clone(),
                })?,
        );
        for a in 0..k {
            delta.push(
                *transitions
                    .get(&(q, a))
                    .ok_or_else(|| ParseError::MissingTransition {
                        state: states.names[q].clone(),
                        input: inputs.symbol(a).to_string(),
                    })?,
            );
        }
    }
    Ok(MooreMachine::new(inputs, delta, out, initial)?.with_state_names(states.names))
}

/// Writes a machine in the native format. States appear in index order,
/// inputs in alphabet order, so `parse_moore` reproduces the machine.
pub fn write_moore(m: &MooreMachine) -> String {
    let mut s = String::new();
    let inputs: Vec<&str> = m.inputs().symbols().iter().map(|x| x.as_str()).collect();
    let names: Vec<String> = (0..m.size()).map(|q| m.state_name(q)).collect();
    writeln!(s, "inputs {}", inputs.join(" ")).unwrap();
    writeln!(s, "outputs {}", m.arity()).unwrap();
    writeln!(s, "states {}", names.join(" ")).unwrap();
    writeln!(s, "initial {}", names[m.initial()]).unwrap();
    for q in 0..m.size() {
        let atoms: Vec<&str> = m.output(q).atoms().iter().map(|x| x.as_str()).collect();
        writeln!(s, "{} : {}", names[q], atoms.join(" ")).unwrap();
        for (a, symbol) in inputs.iter().enumerate() {
            writeln!(s, "{} {} -> {}", names[q], symbol, names[m.successor(q, a)]).unwrap();
        }
    }
    s
}
