//! Well-formedness, determinism and reversibility checks.

use std::collections::HashMap;
use std::fmt;

use crate::guard::{satisfiable, test_of_op_unchecked, Test};
use crate::machine::{Configuration, StateId, Transducer, Transition};
use crate::runner::{all_configurations, reverse_enabled, step};
use crate::symbol::Symbol;
use crate::transforms::reverse_test_under_op;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    InitialNotNeutral,
    FinalNotNeutral,
    InitialIsFinal,
    FinalStateHasOutgoing { transition: usize },
    TransitionIntoInitial { transition: usize },
    EqualityAtomInBasicMachine { transition: usize },
    IndexOutOfRange { transition: usize, index: usize },
    UnknownState { transition: usize, state: StateId },
    LetterNotInAlphabet { transition: usize, letter: Symbol },
    BadPolarity { state: StateId },
    ReservedLetterInAlphabet,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::InitialNotNeutral => write!(f, "initial state must have polarity 0"),
            Violation::FinalNotNeutral => write!(f, "final state must have polarity 0"),
            Violation::InitialIsFinal => write!(f, "initial and final states coincide"),
            Violation::FinalStateHasOutgoing { transition } => {
                write!(f, "transition {transition} leaves the final state")
            }
            Violation::TransitionIntoInitial { transition } => {
                write!(f, "transition {transition} enters the initial state")
            }
            Violation::EqualityAtomInBasicMachine { transition } => {
                write!(f, "transition {transition} uses a pebble equality in a basic machine")
            }
            Violation::IndexOutOfRange { transition, index } => {
                write!(f, "transition {transition} uses pebble index {index}")
            }
            Violation::UnknownState { transition, state } => {
                write!(f, "transition {transition} refers to unknown state {state}")
            }
            Violation::LetterNotInAlphabet { transition, letter } => {
                write!(f, "transition {transition} reads {letter} outside the input alphabet")
            }
            Violation::BadPolarity { state } => write!(f, "state {state} has polarity outside -1..=1"),
            Violation::ReservedLetterInAlphabet => write!(f, "input alphabet contains #"),
        }
    }
}

pub fn validate(m: &Transducer) -> Vec<Violation> {
    let mut v = Vec::new();
    let n = m.num_states();
    for (q, s) in m.states.iter().enumerate() {
        if !(-1..=1).contains(&s.polarity) {
            v.push(Violation::BadPolarity { state: q });
        }
    }
    if m.initial < n && m.polarity(m.initial) != 0 {
        v.push(Violation::InitialNotNeutral);
    }
    if m.final_state < n && m.polarity(m.final_state) != 0 {
        v.push(Violation::FinalNotNeutral);
    }
    if m.initial == m.final_state {
        v.push(Violation::InitialIsFinal);
    }
    if m.input_alphabet.iter().any(|s| s.is_endmarker()) {
        v.push(Violation::ReservedLetterInAlphabet);
    }
    for (i, t) in m.transitions.iter().enumerate() {
        for q in [t.from, t.to] {
            if q >= n {
                v.push(Violation::UnknownState { transition: i, state: q });
            }
        }
        if t.from == m.final_state {
            v.push(Violation::FinalStateHasOutgoing { transition: i });
        }
        if t.to == m.initial {
            v.push(Violation::TransitionIntoInitial { transition: i });
        }
        if !m.equality_tests && t.test.has_equality() {
            v.push(Violation::EqualityAtomInBasicMachine { transition: i });
        }
        let idx = t.test.max_index().max(t.op.index().unwrap_or(0));
        let low = t.test.atoms().iter().any(|a| a.min_index() == 0) || t.op.index() == Some(0);
        if idx > m.k || low {
            v.push(Violation::IndexOutOfRange { transition: i, index: if low { 0 } else { idx } });
        }
        if !t.letter.is_endmarker() && !m.input_alphabet.contains(&t.letter) {
            v.push(Violation::LetterNotInAlphabet { transition: i, letter: t.letter.clone() });
        }
    }
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictWitness {
    pub t1: usize,
    pub t2: usize,
    pub direction: Direction,
    pub joint_test: Test,
}

impl ConflictWitness {
    pub fn describe(&self, m: &Transducer) -> String {
        format!(
            "{:?} conflict between [{}] and [{}] under {}",
            self.direction,
            m.describe(&m.transitions[self.t1]),
            m.describe(&m.transitions[self.t2]),
            self.joint_test
        )
    }
}

fn guard(m: &Transducer, t: &Transition) -> Test {
    t.test.and(&test_of_op_unchecked(t.op, m.k))
}

/// Guard of the reversed transition, read at the target configuration.
fn reverse_guard(m: &Transducer, t: &Transition) -> Test {
    reverse_test_under_op(t.op, &t.test).and(&test_of_op_unchecked(t.op.reverse(), m.k))
}

fn find_conflict(
    m: &Transducer,
    direction: Direction,
    key: impl Fn(&Transition) -> StateId,
    g: impl Fn(&Transition) -> Test,
) -> Option<ConflictWitness> {
    let mut groups: HashMap<(StateId, &Symbol), Vec<usize>> = HashMap::new();
    for (i, t) in m.transitions.iter().enumerate() {
        groups.entry((key(t), &t.letter)).or_default().push(i);
    }
    let mut keys: Vec<_> = groups.keys().cloned().collect();
    keys.sort();
    for k in keys {
        let ids = &groups[&k];
        let guards: Vec<Test> = ids.iter().map(|&i| g(&m.transitions[i])).collect();
        for a in 0..ids.len() {
            for b in a + 1..ids.len() {
                let joint = guards[a].and(&guards[b]);
                if satisfiable(&joint, m.k) {
                    return Some(ConflictWitness { t1: ids[a], t2: ids[b], direction, joint_test: joint });
                }
            }
        }
    }
    None
}

pub fn determinism_witness(m: &Transducer) -> Option<ConflictWitness> {
    find_conflict(m, Direction::Forward, |t| t.from, |t| guard(m, t))
}

pub fn reverse_determinism_witness(m: &Transducer) -> Option<ConflictWitness> {
    find_conflict(m, Direction::Backward, |t| t.to, |t| reverse_guard(m, t))
}

pub fn is_deterministic(m: &Transducer) -> bool {
    determinism_witness(m).is_none()
}

pub fn is_reverse_deterministic(m: &Transducer) -> bool {
    reverse_determinism_witness(m).is_none()
}

pub fn is_reversible(m: &Transducer) -> bool {
    is_deterministic(m) && is_reverse_deterministic(m)
}

/// A configuration on `#u` where two transitions are enabled, if any.
pub fn semantic_forward_conflict(m: &Transducer, u: &[Symbol]) -> Option<(Configuration, usize, usize)> {
    for c in all_configurations(m, u) {
        let s = step(m, &c, u);
        if s.len() > 1 {
            return Some((c, s[0].0, s[1].0));
        }
    }
    None
}

/// A configuration on `#u` where two transitions are reverse-enabled, if any.
pub fn semantic_backward_conflict(m: &Transducer, u: &[Symbol]) -> Option<(Configuration, usize, usize)> {
    for c in all_configurations(m, u) {
        let ids: Vec<usize> =
            (0..m.transitions.len()).filter(|&i| reverse_enabled(m, &m.transitions[i], &c, u)).collect();
        if ids.len() > 1 {
            return Some((c, ids[0], ids[1]));
        }
    }
    None
}
