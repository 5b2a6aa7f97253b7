//! Interned symbols, ordered input alphabets, words and output tuples.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, LazyLock, RwLock};

use crate::automata::MachineError;

/// An interned atomic symbol, used both for input letters and for the atoms
/// that make up an output tuple.
///
/// Symbols compare by their text, never by interning order, so anything
/// sorted by `Sym` is deterministic across threads and runs.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Sym(u32);

#[derive(Default)]
struct Interner {
    names: Vec<&'static str>,
    ids: HashMap<&'static str, u32>,
}

static INTERNER: LazyLock<RwLock<Interner>> = LazyLock::new(Default::default);

impl Sym {
    pub fn new(name: &str) -> Sym {
        if let Some(&id) = INTERNER.read().unwrap().ids.get(name) {
            return Sym(id);
        }
        let mut interner = INTERNER.write().unwrap();
        if let Some(&id) = interner.ids.get(name) {
            return Sym(id);
        }
        let leaked: &'static str = Box::leak(name.to_owned().into_boxed_str());
        let id = interner.names.len() as u32;
        interner.names.push(leaked);
        interner.ids.insert(leaked, id);
        Sym(id)
    }

    pub fn as_str(self) -> &'static str {
        INTERNER.read().unwrap().names[self.0 as usize]
    }
}

impl PartialOrd for Sym {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Sym {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.0 == other.0 {
            Ordering::Equal
        } else {
            self.as_str().cmp(other.as_str())
        }
    }
}

impl fmt::Debug for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.as_str())
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl From<&str> for Sym {
    fn from(s: &str) -> Self {
        Sym::new(s)
    }
}

/// An input letter, as an index into an [`Alphabet`].
pub type Input = usize;

/// A finite word over an input alphabet, stored as letter indices.
pub type Word = Vec<Input>;

/// A finite, nonempty, ordered input alphabet.
///
/// Letter order is significant: every traversal in the crate follows it.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Alphabet(Arc<[Sym]>);

impl Alphabet {
    pub fn new<I, S>(symbols: I) -> Result<Self, MachineError>
    where
        I: IntoIterator<Item = S>,
        S: Into<Sym>,
    {
        let symbols: Vec<Sym> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(MachineError::EmptyAlphabet);
        }
        for (i, s) in symbols.iter().enumerate() {
            if symbols[..i].contains(s) {
                return Err(MachineError::DuplicateInput(s.to_string()));
            }
        }
        Ok(Alphabet(symbols.into()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Sym] {
        &self.0
    }

    pub fn symbol(&self, input: Input) -> Sym {
        self.0[input]
    }

    pub fn index_of(&self, symbol: Sym) -> Option<Input> {
        self.0.iter().position(|&s| s == symbol)
    }

    /// Parses a word written either as whitespace-separated symbols or, when
    /// it contains no whitespace, as one symbol per character. The empty
    /// string and `ε` denote the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Word, MachineError> {
        let text = text.trim();
        if text.is_empty() || text == "ε" {
            return Ok(Vec::new());
        }
        let tokens: Vec<String> = if text.contains(char::is_whitespace) {
            text.split_whitespace().map(str::to_owned).collect()
        } else {
            text.chars().map(String::from).collect()
        };
        tokens
            .iter()
            .enumerate()
            .map(|(position, tok)| {
                self.index_of(Sym::new(tok))
                    .ok_or_else(|| MachineError::UnknownSymbol {
                        symbol: tok.clone(),
                        position,
                    })
            })
            .collect()
    }

    pub fn format_word(&self, word: &[Input]) -> String {
        if word.is_empty() {
            return "ε".to_owned();
        }
        let single_char = self.0.iter().all(|s| s.as_str().chars().count() == 1);
        let parts: Vec<&str> = word.iter().map(|&a| self.0[a].as_str()).collect();
        if single_char {
            parts.concat()
        } else {
            parts.join(" ")
        }
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// A flat output tuple of atomic symbols.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Output(Box<[Sym]>);

impl Output {
    pub fn new(atoms: impl IntoIterator<Item = Sym>) -> Self {
        Output(atoms.into_iter().collect())
    }

    pub fn from_strs<'a>(atoms: impl IntoIterator<Item = &'a str>) -> Self {
        Output(atoms.into_iter().map(Sym::new).collect())
    }

    /// Builds a tuple of single-character atoms, e.g. `"01"` → `(0,1)`.
    pub fn from_chars(text: &str) -> Self {
        let mut buf = [0u8; 4];
        Output(
            text.chars()
                .map(|c| Sym::new(c.encode_utf8(&mut buf)))
                .collect(),
        )
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn atoms(&self) -> &[Sym] {
        &self.0
    }

    /// Left-to-right concatenation of tuples.
    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a Output>) -> Output {
        Output(
            parts
                .into_iter()
                .flat_map(|p| p.0.iter().copied())
                .collect(),
        )
    }

    pub fn select(&self, positions: &[usize]) -> Output {
        Output(positions.iter().map(|&p| self.0[p]).collect())
    }
}

impl fmt::Debug for Output {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Output {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(s.as_str())?;
        }
        f.write_str(")")
    }
}
