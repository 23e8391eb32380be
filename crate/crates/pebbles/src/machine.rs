use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::guard::Test;
use crate::op::PebbleOp;
use crate::symbol::Symbol;

pub type StateId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct State {
    pub name: String,
    pub polarity: i8,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub from: StateId,
    pub letter: Symbol,
    pub test: Test,
    pub op: PebbleOp,
    pub to: StateId,
    pub output: Vec<Symbol>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transducer {
    pub name: String,
    pub k: usize,
    pub equality_tests: bool,
    pub input_alphabet: Vec<Symbol>,
    pub output_alphabet: Vec<Symbol>,
    pub states: Vec<State>,
    pub initial: StateId,
    pub final_state: StateId,
    pub transitions: Vec<Transition>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    pub state: StateId,
    pub peb: Vec<usize>,
    pub head: usize,
}

impl Configuration {
    pub fn new(state: StateId, peb: Vec<usize>, head: usize) -> Self {
        Configuration { state, peb, head }
    }
}

impl Transducer {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn polarity(&self, q: StateId) -> i8 {
        self.states[q].polarity
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q].name
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s.name == name)
    }

    pub fn initial_config(&self) -> Configuration {
        Configuration::new(self.initial, Vec::new(), 0)
    }

    pub fn is_accepting(&self, c: &Configuration) -> bool {
        c.state == self.final_state && c.peb.is_empty() && c.head == 0
    }

    /// Σ together with the endmarker.
    pub fn letters(&self) -> Vec<Symbol> {
        let mut v = self.input_alphabet.clone();
        v.push(Symbol::endmarker());
        v
    }

    /// Output letters actually emitted by transitions.
    pub fn used_outputs(&self) -> Vec<Symbol> {
        let set: BTreeSet<&Symbol> = self.transitions.iter().flat_map(|t| t.output.iter()).collect();
        set.into_iter().cloned().collect()
    }

    pub fn uses_equality(&self) -> bool {
        self.transitions.iter().any(|t| t.test.has_equality())
    }

    /// Drops states unreachable from the initial state along transitions, and transitions among them.
    pub fn prune_unreachable(&self) -> Transducer {
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.states.len()];
        for t in &self.transitions {
            adj[t.from].push(t.to);
        }
        let mut seen = vec![false; self.states.len()];
        let mut stack = vec![self.initial];
        seen[self.initial] = true;
        while let Some(q) = stack.pop() {
            for &r in &adj[q] {
                if !seen[r] {
                    seen[r] = true;
                    stack.push(r);
                }
            }
        }
        seen[self.final_state] = true;
        let mut remap = vec![usize::MAX; self.states.len()];
        let mut states = Vec::new();
        for (q, s) in self.states.iter().enumerate() {
            if seen[q] {
                remap[q] = states.len();
                states.push(s.clone());
            }
        }
        let transitions = self
            .transitions
            .iter()
            .filter(|t| seen[t.from])
            .map(|t| Transition { from: remap[t.from], to: remap[t.to], ..t.clone() })
            .collect();
        Transducer {
            states,
            initial: remap[self.initial],
            final_state: remap[self.final_state],
            transitions,
            ..self.clone()
        }
    }

    pub fn describe(&self, t: &Transition) -> String {
        let out: Vec<String> = t.output.iter().map(|s| s.to_string()).collect();
        format!(
            "{} -{}, {}, {}-> {} / [{}]",
            self.state_name(t.from),
            t.letter,
            t.test,
            t.op,
            self.state_name(t.to),
            out.join(" ")
        )
    }
}

impl fmt::Display for Transducer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "machine {} (k={}, {} states)", self.name, self.k, self.states.len())?;
        for t in &self.transitions {
            writeln!(f, "  {}", self.describe(t))?;
        }
        Ok(())
    }
}

/// Incremental construction with states addressed by name.
#[derive(Clone, Debug)]
pub struct Builder {
    machine: Transducer,
    index: HashMap<String, StateId>,
}

impl Builder {
    pub fn new(name: &str, k: usize, input: Vec<Symbol>, output: Vec<Symbol>) -> Self {
        Builder {
            machine: Transducer {
                name: name.to_string(),
                k,
                equality_tests: false,
                input_alphabet: input,
                output_alphabet: output,
                states: Vec::new(),
                initial: 0,
                final_state: 0,
                transitions: Vec::new(),
            },
            index: HashMap::new(),
        }
    }

    pub fn equality_tests(mut self, allowed: bool) -> Self {
        self.machine.equality_tests = allowed;
        self
    }

    /// Returns the id of `name`, creating the state on first use.
    pub fn state(&mut self, name: &str, polarity: i8) -> StateId {
        if let Some(&q) = self.index.get(name) {
            return q;
        }
        let q = self.machine.states.len();
        self.machine.states.push(State { name: name.to_string(), polarity });
        self.index.insert(name.to_string(), q);
        q
    }

    pub fn lookup(&self, name: &str) -> Option<StateId> {
        self.index.get(name).copied()
    }

    pub fn polarity(&self, q: StateId) -> i8 {
        self.machine.states[q].polarity
    }

    pub fn initial(&mut self, q: StateId) {
        self.machine.initial = q;
    }

    pub fn final_state(&mut self, q: StateId) {
        self.machine.final_state = q;
    }

    pub fn add(&mut self, from: StateId, letter: Symbol, test: Test, op: PebbleOp, to: StateId, output: Vec<Symbol>) {
        self.machine.transitions.push(Transition { from, letter, test, op, to, output });
    }

    pub fn push(&mut self, t: Transition) {
        self.machine.transitions.push(t);
    }

    pub fn num_states(&self) -> usize {
        self.machine.states.len()
    }

    pub fn build(mut self) -> Transducer {
        if self.machine.output_alphabet.is_empty() {
            self.machine.output_alphabet = self.machine.used_outputs();
        }
        self.machine
    }
}
