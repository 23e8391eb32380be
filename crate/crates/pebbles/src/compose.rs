//! Composition of a reversible transducer with a deterministic one.
//!
//! The product runs in synchronisation states, where a letter produced by the
//! first machine is consumed by the second, and in simulation states, where the
//! first machine is run forwards or backwards to the next or previous letter.
//! When the second machine has pebbles, each of its pebbles is stored as a
//! copy of the first machine's configuration on the pebble stack (a block),
//! and pebble operations of the second machine are carried out by gadgets.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::analysis::{is_deterministic, is_reversible};
use crate::guard::{satisfiable, shift_test, test_of_op_unchecked, Atom, AtomKind, Test};
use crate::machine::{Builder, StateId, Transducer, Transition};
use crate::op::PebbleOp;
use crate::symbol::Symbol;
use crate::transforms::{full_read_unchecked, reverse_test_under_op, separate_unchecked, split_outputs};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComposeError {
    #[error("first machine is not reversible")]
    NotReversible,
    #[error("second machine is not deterministic")]
    NotDeterministic,
    #[error("output letter {0} of the first machine is not read by the second")]
    AlphabetMismatch(Symbol),
    #[error("second machine has pebbles; use the general construction")]
    HasPebbles,
}

/// The rule that produced a transition of the product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    TrA,
    TrB,
    TrC,
    MvA,
    MvB,
    SwA,
    SwB,
    LiftA,
    LiftLoop,
    LiftStep,
    LiftB,
    DropA,
    DropLoop,
    DropStep,
    DropB,
}

impl Rule {
    /// `tr`, `mv`, `sw`, `lift` or `drop`.
    pub fn family(&self) -> &'static str {
        match self {
            Rule::TrA | Rule::TrB | Rule::TrC => "tr",
            Rule::MvA | Rule::MvB => "mv",
            Rule::SwA | Rule::SwB => "sw",
            Rule::LiftA | Rule::LiftLoop | Rule::LiftStep | Rule::LiftB => "lift",
            Rule::DropA | Rule::DropLoop | Rule::DropStep | Rule::DropB => "drop",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateKind {
    Sync,
    Sim,
    LiftGadget,
    DropGadget,
}

/// Product machine together with per-transition and per-state provenance.
#[derive(Debug, Clone)]
pub struct Composition {
    pub machine: Transducer,
    pub rules: Vec<Rule>,
    pub kinds: Vec<StateKind>,
    /// The `(q, q', x, y)` component of every state.
    pub keys: Vec<Key>,
    /// Normalised first machine, including the wrap transition.
    pub first: Transducer,
    /// Normalised second machine.
    pub second: Transducer,
}

/// States of both machines, with the stack of T-states and segment sizes encoding the pebbles of T'.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Key {
    pub q: StateId,
    pub qp: StateId,
    pub x: Vec<StateId>,
    pub y: Vec<usize>,
}

impl Key {
    fn k(&self) -> usize {
        self.x.len()
    }

    fn d(&self, i: usize) -> usize {
        self.y[..i].iter().sum()
    }

    fn dk(&self) -> usize {
        self.d(self.k())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Node {
    Sync(Key),
    Sim(Key),
    /// `(q'', -l)` for `l >= 1`, and `(q'', 0)` for `l = 0`.
    Lift(Key, usize),
    Drop(Key, usize, usize),
}

/// Prefixes the first output with `#` and splits outputs into single letters.
pub fn normalize_first(t: &Transducer) -> Transducer {
    let mut m = t.clone();
    for tr in m.transitions.iter_mut() {
        if tr.from == m.initial && tr.letter.is_endmarker() {
            tr.output.insert(0, Symbol::endmarker());
        }
    }
    split_outputs(&m)
}

struct Engine<'a> {
    t: &'a Transducer,
    tp: &'a Transducer,
    n: usize,
    r: usize,
    general: bool,
    from_t: Vec<Vec<usize>>,
    to_t: Vec<Vec<usize>>,
    from_tp: Vec<Vec<usize>>,
    letters: Vec<Symbol>,
    b: Builder,
    ids: HashMap<Node, StateId>,
    kinds: Vec<StateKind>,
    keys: Vec<Key>,
    rules: Vec<Rule>,
    queue: VecDeque<Node>,
}

impl<'a> Engine<'a> {
    fn name(&self, node: &Node) -> String {
        let key_name = |k: &Key, hat: bool| {
            let q = format!("{}{}", if hat { "^" } else { "" }, self.t.state_name(k.q));
            let qp = self.tp.state_name(k.qp);
            if self.general {
                let xs: Vec<&str> = k.x.iter().map(|&x| self.t.state_name(x)).collect();
                let ys: Vec<String> = k.y.iter().map(|y| y.to_string()).collect();
                format!("({q},{qp},[{}],[{}])", xs.join(" "), ys.join(" "))
            } else {
                format!("({q},{qp})")
            }
        };
        match node {
            Node::Sync(k) => key_name(k, false),
            Node::Sim(k) => key_name(k, true),
            Node::Lift(k, l) => format!("{}<-{l}>", key_name(k, false)),
            Node::Drop(k, z, l) => format!("{}<{z},{l}>", key_name(k, false)),
        }
    }

    fn polarity(&self, node: &Node) -> i8 {
        match node {
            Node::Sync(_) => 0,
            Node::Sim(k) => self.t.polarity(k.q) * self.tp.polarity(k.qp),
            Node::Lift(_, 0) => 0,
            Node::Lift(..) | Node::Drop(..) => 1,
        }
    }

    fn kind(node: &Node) -> StateKind {
        match node {
            Node::Sync(_) => StateKind::Sync,
            Node::Sim(_) => StateKind::Sim,
            Node::Lift(..) => StateKind::LiftGadget,
            Node::Drop(..) => StateKind::DropGadget,
        }
    }

    fn id(&mut self, node: Node) -> StateId {
        if let Some(&q) = self.ids.get(&node) {
            return q;
        }
        let q = self.b.state(&self.name(&node), self.polarity(&node));
        self.kinds.push(Self::kind(&node));
        self.keys.push(match &node {
            Node::Sync(k) | Node::Sim(k) | Node::Lift(k, _) | Node::Drop(k, _, _) => k.clone(),
        });
        self.ids.insert(node.clone(), q);
        self.queue.push_back(node);
        q
    }

    /// Drops atoms about pebbles beyond the budget: negated ones hold, positive ones fail.
    fn clip(&self, t: &Test) -> Test {
        t.map_lits(|a| {
            if a.max_index() > self.r || a.min_index() == 0 {
                if a.negated {
                    crate::guard::Lit::True
                } else {
                    crate::guard::Lit::False
                }
            } else {
                crate::guard::Lit::Atom(a)
            }
        })
    }

    fn emit(&mut self, from: StateId, letter: &Symbol, test: Test, op: PebbleOp, to: Node, out: Vec<Symbol>, rule: Rule) {
        let test = self.clip(&test);
        if !satisfiable(&test, self.r) {
            return;
        }
        let to = self.id(to);
        self.b.add(from, letter.clone(), test, op, to, out);
        self.rules.push(rule);
    }

    fn xi0(&self, d: usize) -> Test {
        let mut v = vec![Atom::dropped(d + self.n + 1).not()];
        if d > 0 {
            v.push(Atom::dropped(d));
        }
        Test::from_atoms(v)
    }

    /// `(ξ0 ∧ φ ∧ test(op))` shifted by `d`.
    fn first_part(&self, t: &Transition, d: usize) -> Test {
        let base = self.xi0(0).and(&t.test).and(&test_of_op_unchecked(t.op, self.n));
        let shifted = shift_test(&base, d);
        if d > 0 {
            shifted.and_atom(Atom::dropped(d))
        } else {
            shifted
        }
    }

    fn xi(&self, key: &Key, t: &Transition, psi: &Test, d: usize) -> Vec<Test> {
        let first = self.first_part(t, d);
        xi_bar(key, psi).into_iter().map(|b| first.and(&b)).collect()
    }

    fn expand(&mut self, node: Node) {
        let from = self.ids[&node];
        match node.clone() {
            Node::Sync(key) => self.expand_sync(from, key),
            Node::Sim(key) => self.expand_sim(from, key),
            Node::Lift(key, l) => self.expand_lift(from, key, l),
            Node::Drop(key, z, l) => self.expand_drop(from, key, z, l),
        }
    }

    fn expand_sync(&mut self, from: StateId, key: Key) {
        let k = key.k();
        let dk = key.dk();
        for &ti in &self.from_t[key.q].clone() {
            let t = self.t.transitions[ti].clone();
            if t.output.len() != 1 {
                continue;
            }
            let a2 = &t.output[0];
            for &tj in &self.from_tp[key.qp].clone() {
                let tp = self.tp.transitions[tj].clone();
                if &tp.letter != a2 {
                    continue;
                }
                let psi = tp.test.and(&test_of_op_unchecked(tp.op, self.tp.k));
                let branches = if self.general {
                    self.xi(&key, &t, &psi, dk)
                } else {
                    vec![t.test.and(&test_of_op_unchecked(t.op, self.n))]
                };
                let out = tp.output.clone();
                match tp.op {
                    PebbleOp::Nop => {
                        let pol = self.tp.polarity(tp.to);
                        for g in branches {
                            match pol {
                                1 => {
                                    let g = if self.general { g } else { t.test.clone() };
                                    let to = Node::Sim(Key { q: t.to, qp: tp.to, ..key.clone() });
                                    self.emit(from, &t.letter, g, t.op.shift(dk), to, out.clone(), Rule::TrA);
                                }
                                -1 => {
                                    let to = Node::Sim(Key { qp: tp.to, ..key.clone() });
                                    self.emit(from, &t.letter, g, PebbleOp::Nop, to, out.clone(), Rule::TrB);
                                }
                                _ => {
                                    let to = Node::Sync(Key { qp: tp.to, ..key.clone() });
                                    self.emit(from, &t.letter, g, PebbleOp::Nop, to, out.clone(), Rule::TrC);
                                }
                            }
                        }
                    }
                    PebbleOp::Lift(_) => {
                        if k == 0 {
                            continue;
                        }
                        for g in branches {
                            self.emit(from, &t.letter, g, PebbleOp::Nop, Node::Lift(key.clone(), 1), out.clone(), Rule::LiftA);
                        }
                        let yk = key.y[k - 1];
                        let s2 = Key { q: key.q, qp: tp.to, x: key.x[..k - 1].to_vec(), y: key.y[..k - 1].to_vec() };
                        let psi2 = reverse_test_under_op(tp.op, &tp.test)
                            .and(&test_of_op_unchecked(tp.op.reverse(), self.tp.k));
                        let gate = self.id(Node::Lift(key.clone(), 0));
                        // the exit also pins the stack size, otherwise exits of gadgets
                        // for different block sizes meet in reverse
                        let mut size = vec![Atom::dropped(dk).not()];
                        if dk > 1 {
                            size.push(Atom::dropped(dk - 1));
                        }
                        let size = Test::from_atoms(size);
                        for g in self.xi(&s2, &t, &psi2, dk - yk) {
                            let g = g.and(&size);
                            self.emit(gate, &t.letter, g, PebbleOp::Nop, Node::Sync(s2.clone()), vec![], Rule::LiftB);
                        }
                    }
                    PebbleOp::Drop(_) => {
                        for z in 1..=self.n + 1 {
                            for g in &branches {
                                self.emit(
                                    from,
                                    &t.letter,
                                    g.clone(),
                                    PebbleOp::Drop(dk + z),
                                    Node::Drop(key.clone(), z, 1),
                                    out.clone(),
                                    Rule::DropA,
                                );
                            }
                            let mut x = key.x.clone();
                            x.push(key.q);
                            let mut y = key.y.clone();
                            y.push(z);
                            let s2 = Key { q: key.q, qp: tp.to, x, y };
                            let psi2 = reverse_test_under_op(tp.op, &tp.test)
                                .and(&test_of_op_unchecked(tp.op.reverse(), self.tp.k));
                            let gate = self.id(Node::Drop(key.clone(), z, z));
                            for g in self.xi(&s2, &t, &psi2, dk + z) {
                                self.emit(gate, &t.letter, g, PebbleOp::Nop, Node::Sync(s2.clone()), vec![], Rule::DropB);
                            }
                        }
                    }
                }
            }
        }
    }

    fn expand_sim(&mut self, from: StateId, key: Key) {
        let dk = key.dk();
        if self.tp.polarity(key.qp) > 0 {
            for &ti in &self.from_t[key.q].clone() {
                let t = self.t.transitions[ti].clone();
                if t.output.is_empty() {
                    let to = Node::Sim(Key { q: t.to, ..key.clone() });
                    self.emit(from, &t.letter, shift_test(&t.test, dk), t.op.shift(dk), to, vec![], Rule::MvA);
                } else {
                    let g = shift_test(&t.test.and(&test_of_op_unchecked(t.op, self.n)), dk);
                    self.emit(from, &t.letter, g, PebbleOp::Nop, Node::Sync(key.clone()), vec![], Rule::SwA);
                }
            }
        } else {
            for &ti in &self.to_t[key.q].clone() {
                let t = self.t.transitions[ti].clone();
                let g = shift_test(&reverse_test_under_op(t.op, &t.test), dk);
                let op = t.op.reverse().shift(dk);
                let moved = Key { q: t.from, ..key.clone() };
                if t.output.is_empty() {
                    self.emit(from, &t.letter, g, op, Node::Sim(moved), vec![], Rule::MvB);
                } else {
                    self.emit(from, &t.letter, g, op, Node::Sync(moved), vec![], Rule::SwB);
                }
            }
        }
    }

    fn not_head(i: usize) -> Atom {
        Atom::head(i).not()
    }

    fn expand_lift(&mut self, from: StateId, key: Key, l: usize) {
        if l == 0 {
            return;
        }
        let k = key.k();
        let dk = key.dk();
        let yk = key.y[k - 1];
        let target = dk + yk - l;
        let lets = self.letters.clone();
        for a in &lets {
            let lp = Test::from_atoms([Self::not_head(target), Self::not_head(dk + 1 - l)]);
            self.emit(from, a, lp, PebbleOp::Nop, Node::Lift(key.clone(), l), vec![], Rule::LiftLoop);
            if l < yk {
                let g = Test::atom(Atom::head(dk - l));
                self.emit(from, a, g, PebbleOp::Lift(target), Node::Lift(key.clone(), l + 1), vec![], Rule::LiftStep);
            } else {
                self.emit(from, a, Test::tt(), PebbleOp::Lift(dk), Node::Lift(key.clone(), 0), vec![], Rule::LiftStep);
            }
        }
    }

    fn expand_drop(&mut self, from: StateId, key: Key, z: usize, l: usize) {
        let dk = key.dk();
        let lets = self.letters.clone();
        for a in &lets {
            let lp = Test::from_atoms([Self::not_head(dk + l), Self::not_head(dk + z + l - 1)]);
            self.emit(from, a, lp, PebbleOp::Nop, Node::Drop(key.clone(), z, l), vec![], Rule::DropLoop);
            if l < z {
                let g = Test::atom(Atom::head(dk + l));
                let to = Node::Drop(key.clone(), z, l + 1);
                self.emit(from, a, g, PebbleOp::Drop(dk + z + l), to, vec![], Rule::DropStep);
            }
        }
    }
}

/// `ξ̄(q'', ψ')` as a list of pairwise disjoint conjunctions whose disjunction is meant.
fn xi_bar(key: &Key, psi: &Test) -> Vec<Test> {
    let atoms = match psi {
        Test::False => return vec![],
        Test::Conj(v) => v.clone(),
    };
    let k = key.k();
    let mut branches = vec![Test::tt()];
    for a in atoms {
        let sub: Option<Vec<Atom>> = match a.kind {
            AtomKind::HeadEq(i) => {
                if i == 0 || i > k || key.x[i - 1] != key.q {
                    None
                } else {
                    let (yi, dk, di1, di) = (key.y[i - 1], key.dk(), key.d(i - 1), key.d(i));
                    let mut v: Vec<Atom> = (1..yi).map(|l| Atom::peb(l + dk, l + di1)).collect();
                    v.push(Atom::head(di));
                    v.push(Atom::dropped(yi + dk).not());
                    Some(v)
                }
            }
            AtomKind::PebEq(i, j) => {
                if i == 0 || i > k || j > k || key.x[i - 1] != key.x[j - 1] || key.y[i - 1] != key.y[j - 1] {
                    None
                } else {
                    let (yi, di1, dj1) = (key.y[i - 1], key.d(i - 1), key.d(j - 1));
                    Some((1..=yi).map(|l| Atom::peb(l + di1, l + dj1)).collect())
                }
            }
        };
        match (sub, a.negated) {
            (None, false) => return vec![],
            (None, true) => {}
            (Some(conj), false) => {
                let c = Test::from_atoms(conj);
                for b in branches.iter_mut() {
                    *b = b.and(&c);
                }
            }
            (Some(conj), true) => {
                let mut cases = Vec::new();
                for (idx, atom) in conj.iter().enumerate() {
                    let mut v: Vec<Atom> = conj[..idx].to_vec();
                    v.push(atom.not());
                    cases.push(Test::from_atoms(v));
                }
                let mut next = Vec::new();
                for b in &branches {
                    for c in &cases {
                        next.push(b.and(c));
                    }
                }
                branches = next;
            }
        }
    }
    branches.retain(|b| !b.is_false());
    branches
}

/// `ξ̄` for an explicit state `(q, q', x̄, ȳ)`; exposed for the encoding contract tests.
pub fn xi_bar_for(q: StateId, x: &[StateId], y: &[usize], psi: &Test) -> Vec<Test> {
    xi_bar(&Key { q, qp: 0, x: x.to_vec(), y: y.to_vec() }, psi)
}

/// `ξ0` shifted by `d`, for a first machine with `n` pebbles.
pub fn xi0_shifted(n: usize, d: usize) -> Test {
    let mut v = vec![Atom::dropped(d + n + 1).not()];
    if d > 0 {
        v.push(Atom::dropped(d));
    }
    Test::from_atoms(v)
}

fn product(t: &Transducer, tp: &Transducer, general: bool) -> Composition {
    let n = t.k;
    let m = tp.k;
    let r = (n + 1) * (m + 1) - 1;
    let mut first = normalize_first(t);
    let wrap = if n > 0 { Test::atom(Atom::dropped(1).not()) } else { Test::tt() };
    first.transitions.push(Transition {
        from: first.final_state,
        letter: Symbol::endmarker(),
        test: wrap,
        op: PebbleOp::Nop,
        to: first.initial,
        output: vec![],
    });
    let mut from_t = vec![Vec::new(); first.num_states()];
    let mut to_t = vec![Vec::new(); first.num_states()];
    for (i, tr) in first.transitions.iter().enumerate() {
        from_t[tr.from].push(i);
        to_t[tr.to].push(i);
    }
    let mut from_tp = vec![Vec::new(); tp.num_states()];
    for (i, tr) in tp.transitions.iter().enumerate() {
        if !tr.test.is_false() {
            from_tp[tr.from].push(i);
        }
    }
    let mut letters = t.input_alphabet.clone();
    letters.push(Symbol::endmarker());
    let b = Builder::new(&format!("{};{}", t.name, tp.name), r, t.input_alphabet.clone(), tp.output_alphabet.clone())
        .equality_tests(general || t.equality_tests);
    let mut e = Engine {
        t: &first,
        tp,
        n,
        r,
        general,
        from_t,
        to_t,
        from_tp,
        letters,
        b,
        ids: HashMap::new(),
        kinds: Vec::new(),
        keys: Vec::new(),
        rules: Vec::new(),
        queue: VecDeque::new(),
    };
    let init = e.id(Node::Sync(Key { q: first.initial, qp: tp.initial, x: vec![], y: vec![] }));
    let fin = e.id(Node::Sync(Key { q: first.initial, qp: tp.final_state, x: vec![], y: vec![] }));
    e.b.initial(init);
    e.b.final_state(fin);
    while let Some(node) = e.queue.pop_front() {
        e.expand(node);
    }
    let Engine { b, kinds, keys, rules, .. } = e;
    let full = b.build();
    // gadget exits are generated before their entries are known to be enabled
    let seen = reachable(&full);
    let rules = rules.into_iter().zip(&full.transitions).filter(|(_, t)| seen[t.from]).map(|(r, _)| r).collect();
    let kinds = kinds.into_iter().enumerate().filter(|(q, _)| seen[*q]).map(|(_, k)| k).collect();
    let keys = keys.into_iter().enumerate().filter(|(q, _)| seen[*q]).map(|(_, k)| k).collect();
    let mut machine = full.prune_unreachable();
    if machine.output_alphabet.is_empty() {
        machine.output_alphabet = machine.used_outputs();
    }
    Composition { machine, rules, kinds, keys, first, second: tp.clone() }
}

fn reachable(m: &Transducer) -> Vec<bool> {
    let mut seen = vec![false; m.num_states()];
    let mut adj = vec![Vec::new(); m.num_states()];
    for t in &m.transitions {
        adj[t.from].push(t.to);
    }
    let mut stack = vec![m.initial];
    seen[m.initial] = true;
    while let Some(q) = stack.pop() {
        for &r in &adj[q] {
            if !seen[r] {
                seen[r] = true;
                stack.push(r);
            }
        }
    }
    seen[m.final_state] = true;
    seen
}

fn check_inputs(t: &Transducer, tp: &Transducer) -> Result<(), ComposeError> {
    if !is_reversible(t) {
        return Err(ComposeError::NotReversible);
    }
    if !is_deterministic(tp) {
        return Err(ComposeError::NotDeterministic);
    }
    for s in t.used_outputs() {
        if !tp.input_alphabet.contains(&s) {
            return Err(ComposeError::AlphabetMismatch(s));
        }
    }
    Ok(())
}

/// Composition when the second machine has no pebbles.
pub fn compose_simple_detailed(t: &Transducer, tp: &Transducer) -> Result<Composition, ComposeError> {
    if tp.k != 0 {
        return Err(ComposeError::HasPebbles);
    }
    check_inputs(t, tp)?;
    let second = full_read_unchecked(tp);
    Ok(product(t, &second, false))
}

/// Composition for a second machine with pebbles; the product has `(n+1)(m+1)-1` pebbles.
pub fn compose_general_detailed(t: &Transducer, tp: &Transducer) -> Result<Composition, ComposeError> {
    check_inputs(t, tp)?;
    let second = separate_unchecked(&full_read_unchecked(tp));
    Ok(product(t, &second, true))
}

pub fn compose_simple(t: &Transducer, tp: &Transducer) -> Result<Transducer, ComposeError> {
    compose_simple_detailed(t, tp).map(|c| c.machine)
}

pub fn compose_general(t: &Transducer, tp: &Transducer) -> Result<Transducer, ComposeError> {
    compose_general_detailed(t, tp).map(|c| c.machine)
}

/// Machine for `⟦tp⟧ ∘ ⟦t⟧`, choosing the construction by the pebble count of `tp`.
pub fn compose(t: &Transducer, tp: &Transducer) -> Result<Transducer, ComposeError> {
    if tp.k == 0 {
        compose_simple(t, tp)
    } else {
        compose_general(t, tp)
    }
}

/// State bound of the pebbleless case, measured on the normalised inputs.
pub fn simple_state_bound(c: &Composition) -> usize {
    2 * (c.first.num_states()) * c.second.num_states()
}

/// `|Q|^{m+2} |Q'| (n+1)^{m+3}` on the normalised inputs.
pub fn general_state_bound(c: &Composition) -> usize {
    let q = c.first.num_states();
    let n = c.first.k;
    let m = c.second.k;
    q.pow(m as u32 + 2) * c.second.num_states() * (n + 1).pow(m as u32 + 3)
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::TrA => "tr-a",
            Rule::TrB => "tr-b",
            Rule::TrC => "tr-c",
            Rule::MvA => "mv-a",
            Rule::MvB => "mv-b",
            Rule::SwA => "sw-a",
            Rule::SwB => "sw-b",
            Rule::LiftA => "lift-a",
            Rule::LiftLoop => "lift-loop",
            Rule::LiftStep => "lift-step",
            Rule::LiftB => "lift-b",
            Rule::DropA => "drop-a",
            Rule::DropLoop => "drop-loop",
            Rule::DropStep => "drop-step",
            Rule::DropB => "drop-b",
        };
        write!(f, "{s}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;
    use crate::runner::eval;
    use crate::symbol::word;

    #[test]
    fn example_three_output() {
        let t = builtins::modified_squaring(&word("bcd")).unwrap();
        let tp = builtins::iterated_reverse(&word("bcd")).unwrap();
        let c = compose_simple_detailed(&t, &tp).unwrap();
        assert_eq!(eval(&c.machine, &word("bcd")).unwrap().unwrap(), word("!bdc!cbd!"));
        assert!(c.machine.num_states() <= simple_state_bound(&c));
    }

    #[test]
    fn xi_bar_cases() {
        let psi = Test::atom(Atom::head(1));
        assert_eq!(xi_bar_for(0, &[1], &[1], &psi), Vec::<Test>::new());
        assert_eq!(xi_bar_for(0, &[], &[], &Test::tt()), vec![Test::tt()]);
        let got = xi_bar_for(0, &[0], &[2], &psi);
        let want = Test::from_atoms([Atom::peb(3, 1), Atom::head(2), Atom::dropped(4).not()]);
        assert_eq!(got, vec![want]);
        assert_eq!(xi_bar_for(0, &[0], &[2], &Test::atom(Atom::head(1).not())).len(), 3);
    }

    #[test]
    fn xi0_range() {
        for n in 0..=2 {
            for d in 0..=4 {
                let x = xi0_shifted(n, d);
                for size in 0..=d + n + 2 {
                    let peb: Vec<usize> = (0..size).collect();
                    assert_eq!(x.eval(&peb, 0), d <= size && size <= d + n, "n={n} d={d} size={size}");
                }
            }
        }
    }
}
