//! The `.ptx` machine file format.
//!
//! JSON text. Plain letters are one-character strings, annotated letters are objects
//! `{"base": "a", "bits": "01", "matrix": ["10", "01"]}`. The endmarker is never written:
//! a transition without `letter` reads it.

use std::collections::HashMap;

use pebbles::guard::{Atom, Test};
use pebbles::{PebbleOp, State, Symbol, Transducer, Transition};
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SymbolRepr {
    Plain(String),
    Annotated(Annotated),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Annotated {
    pub base: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bits: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateRepr {
    pub id: String,
    pub polarity: i8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpRepr {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionRepr {
    pub from: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub letter: Option<SymbolRepr>,
    #[serde(default)]
    pub test: Vec<String>,
    pub op: OpRepr,
    pub to: String,
    #[serde(default)]
    pub output: Vec<SymbolRepr>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineFile {
    pub format_version: u32,
    pub name: String,
    pub pebbles: usize,
    pub equality_tests: bool,
    pub input_alphabet: Vec<SymbolRepr>,
    pub output_alphabet: Vec<SymbolRepr>,
    pub states: Vec<StateRepr>,
    pub initial: String,
    #[serde(rename = "final")]
    pub final_state: String,
    pub transitions: Vec<TransitionRepr>,
}

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unsupported format_version {0}")]
    Version(u32),
    #[error("{place}: unknown state {state:?}")]
    UnknownState { place: String, state: String },
    #[error("{place}: duplicate state {state:?}")]
    DuplicateState { place: String, state: String },
    #[error("{place}: pebble index {index} outside 1..={k}")]
    IndexOutOfRange { place: String, index: usize, k: usize },
    #[error("{place}: the endmarker # is implicit and may not be written")]
    ReservedLetter { place: String },
    #[error("{place}: bad symbol {text:?}")]
    BadSymbol { place: String, text: String },
    #[error("{place}: bad test atom {text:?}")]
    BadAtom { place: String, text: String },
    #[error("{place}: bad operation {text:?}")]
    BadOp { place: String, text: String },
    #[error("{place}: polarity {polarity} outside -1..=1")]
    BadPolarity { place: String, polarity: i8 },
}

fn bits_of(place: &str, s: &str) -> Result<Vec<bool>, FormatError> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(FormatError::BadSymbol { place: place.to_string(), text: s.to_string() }),
        })
        .collect()
}

fn one_char(place: &str, s: &str) -> Result<char, FormatError> {
    let mut it = s.chars();
    match (it.next(), it.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(FormatError::BadSymbol { place: place.to_string(), text: s.to_string() }),
    }
}

pub fn symbol_from_repr(place: &str, r: &SymbolRepr) -> Result<Symbol, FormatError> {
    match r {
        SymbolRepr::Plain(s) => {
            let c = one_char(place, s)?;
            if c == pebbles::symbol::ENDMARKER {
                return Err(FormatError::ReservedLetter { place: place.to_string() });
            }
            Ok(Symbol::plain(c))
        }
        SymbolRepr::Annotated(a) => {
            let base = one_char(place, &a.base)?;
            let bits = a.bits.as_deref().map(|b| bits_of(place, b)).transpose()?;
            let matrix = match &a.matrix {
                Some(rows) => Some(rows.iter().map(|r| bits_of(place, r)).collect::<Result<Vec<_>, _>>()?),
                None => None,
            };
            let s = Symbol { base, bits, matrix };
            if s.is_endmarker() {
                return Err(FormatError::ReservedLetter { place: place.to_string() });
            }
            Ok(s)
        }
    }
}

fn bitstring(b: &[bool]) -> String {
    b.iter().map(|&x| if x { '1' } else { '0' }).collect()
}

pub fn symbol_to_repr(s: &Symbol) -> SymbolRepr {
    if s.bits.is_none() && s.matrix.is_none() {
        return SymbolRepr::Plain(s.base.to_string());
    }
    SymbolRepr::Annotated(Annotated {
        base: s.base.to_string(),
        bits: s.bits.as_deref().map(bitstring),
        matrix: s.matrix.as_ref().map(|m| m.iter().map(|r| bitstring(r)).collect()),
    })
}

fn parse_index(s: &str) -> Option<usize> {
    s.strip_prefix('p')?.parse().ok()
}

/// `h=p1`, `p1=p2`, optionally prefixed by `!`.
pub fn parse_atom(s: &str) -> Option<Atom> {
    let (neg, body) = match s.trim().strip_prefix('!') {
        Some(rest) => (true, rest),
        None => (false, s.trim()),
    };
    let (l, r) = body.split_once('=')?;
    let a = if l == "h" {
        Atom::head(parse_index(r)?)
    } else {
        Atom::peb(parse_index(l)?, parse_index(r)?)
    };
    Some(if neg { a.not() } else { a })
}

fn test_to_repr(t: &Test) -> Vec<String> {
    match t {
        Test::False => vec!["false".to_string()],
        Test::Conj(v) => v.iter().map(|a| a.to_string()).collect(),
    }
}

fn op_to_repr(op: PebbleOp) -> OpRepr {
    match op {
        PebbleOp::Nop => OpRepr { kind: "nop".into(), index: None },
        PebbleOp::Drop(i) => OpRepr { kind: "drop".into(), index: Some(i) },
        PebbleOp::Lift(i) => OpRepr { kind: "lift".into(), index: Some(i) },
    }
}

impl MachineFile {
    /// Canonical form: states sorted by name, transitions sorted by their rendering.
    pub fn from_machine(m: &Transducer) -> MachineFile {
        let name = |q: usize| m.states[q].name.clone();
        let mut states: Vec<StateRepr> =
            m.states.iter().map(|s| StateRepr { id: s.name.clone(), polarity: s.polarity }).collect();
        states.sort_by(|a, b| a.id.cmp(&b.id));
        let mut transitions: Vec<TransitionRepr> = m
            .transitions
            .iter()
            .map(|t| TransitionRepr {
                from: name(t.from),
                letter: (!t.letter.is_endmarker()).then(|| symbol_to_repr(&t.letter)),
                test: test_to_repr(&t.test),
                op: op_to_repr(t.op),
                to: name(t.to),
                output: t.output.iter().map(symbol_to_repr).collect(),
            })
            .collect();
        transitions.sort_by_key(|t| serde_json::to_string(t).unwrap_or_default());
        let mut input = m.input_alphabet.clone();
        input.sort();
        let mut output = m.output_alphabet.clone();
        output.sort();
        MachineFile {
            format_version: FORMAT_VERSION,
            name: m.name.clone(),
            pebbles: m.k,
            equality_tests: m.equality_tests,
            input_alphabet: input.iter().map(symbol_to_repr).collect(),
            output_alphabet: output.iter().map(symbol_to_repr).collect(),
            states,
            initial: name(m.initial),
            final_state: name(m.final_state),
            transitions,
        }
    }

    pub fn to_machine(&self) -> Result<Transducer, FormatError> {
        if self.format_version != FORMAT_VERSION {
            return Err(FormatError::Version(self.format_version));
        }
        let k = self.pebbles;
        let mut ids: HashMap<&str, usize> = HashMap::new();
        let mut states = Vec::new();
        for (i, s) in self.states.iter().enumerate() {
            let place = format!("state {i}");
            if !(-1..=1).contains(&s.polarity) {
                return Err(FormatError::BadPolarity { place, polarity: s.polarity });
            }
            if ids.insert(&s.id, i).is_some() {
                return Err(FormatError::DuplicateState { place, state: s.id.clone() });
            }
            states.push(State { name: s.id.clone(), polarity: s.polarity });
        }
        let lookup = |place: &str, s: &str| {
            ids.get(s).copied().ok_or_else(|| FormatError::UnknownState { place: place.to_string(), state: s.to_string() })
        };
        let alphabet = |what: &str, v: &[SymbolRepr]| -> Result<Vec<Symbol>, FormatError> {
            v.iter().enumerate().map(|(i, r)| symbol_from_repr(&format!("{what} entry {i}"), r)).collect()
        };
        let input_alphabet = alphabet("input_alphabet", &self.input_alphabet)?;
        let output_alphabet = alphabet("output_alphabet", &self.output_alphabet)?;
        let initial = lookup("initial", &self.initial)?;
        let final_state = lookup("final", &self.final_state)?;
        let mut transitions = Vec::new();
        for (i, t) in self.transitions.iter().enumerate() {
            let place = format!("transition {i}");
            let from = lookup(&place, &t.from)?;
            let to = lookup(&place, &t.to)?;
            let letter = match &t.letter {
                Some(r) => symbol_from_repr(&place, r)?,
                None => Symbol::endmarker(),
            };
            let test = if t.test.iter().any(|a| a == "false") {
                Test::ff()
            } else {
                let mut atoms = Vec::new();
                for a in &t.test {
                    let atom = parse_atom(a).ok_or_else(|| FormatError::BadAtom { place: place.clone(), text: a.clone() })?;
                    let (lo, hi) = (atom.min_index(), atom.max_index());
                    if lo == 0 || hi > k {
                        return Err(FormatError::IndexOutOfRange { place, index: if lo == 0 { 0 } else { hi }, k });
                    }
                    atoms.push(atom);
                }
                Test::from_atoms(atoms)
            };
            let bad_op = || FormatError::BadOp { place: place.clone(), text: format!("{:?}", t.op) };
            let op = match (t.op.kind.as_str(), t.op.index) {
                ("nop", None) => PebbleOp::Nop,
                ("drop", Some(i)) => PebbleOp::Drop(i),
                ("lift", Some(i)) => PebbleOp::Lift(i),
                _ => return Err(bad_op()),
            };
            if let Some(i) = op.index() {
                if i == 0 || i > k {
                    return Err(FormatError::IndexOutOfRange { place, index: i, k });
                }
            }
            let output =
                t.output.iter().map(|r| symbol_from_repr(&place, r)).collect::<Result<Vec<_>, _>>()?;
            transitions.push(Transition { from, letter, test, op, to, output });
        }
        Ok(Transducer {
            name: self.name.clone(),
            k,
            equality_tests: self.equality_tests,
            input_alphabet,
            output_alphabet,
            states,
            initial,
            final_state,
            transitions,
        })
    }
}

pub fn parse(text: &str) -> Result<Transducer, FormatError> {
    let f: MachineFile = serde_json::from_str(text).map_err(|e| FormatError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    f.to_machine()
}

pub fn serialize(m: &Transducer) -> String {
    let mut s = serde_json::to_string_pretty(&MachineFile::from_machine(m)).expect("serializable");
    s.push('\n');
    s
}
