//! Decomposition of a pebble transducer into a configuration enumerator, an
//! equality annotator and a pebbleless simulator; two-way transducers and their
//! conversions to and from 0-pebble machines; the uniformization pipeline.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::analysis::{is_deterministic, is_reversible};
use crate::compose::{compose_simple, ComposeError};
use crate::guard::{test_of_op_unchecked, Atom, AtomKind, Test};
use crate::machine::{Builder, StateId, Transducer, Transition};
use crate::op::PebbleOp;
use crate::runner::{enumerate_runs, eval, RunError};
use crate::symbol::Symbol;
use crate::transforms::{reverse_test_under_op, separate_unchecked};

pub type Matrix = Vec<Vec<bool>>;

/// All bit vectors of length `k`, in lexicographic order.
pub fn bit_vectors(k: usize) -> Vec<Vec<bool>> {
    (0..1usize << k).map(|x| (0..k).map(|i| x >> (k - 1 - i) & 1 == 1).collect()).collect()
}

/// The letter `(σ, b)`: `σ` with the bits of `b` appended.
pub fn tag(s: &Symbol, b: &[bool]) -> Symbol {
    b.iter().fold(s.clone(), |acc, &x| acc.push_bit(x))
}

/// The letter `(σ, b, M)`.
pub fn tag_matrix(s: &Symbol, b: &[bool], m: &Matrix) -> Symbol {
    tag(s, b).with_matrix(m.clone())
}

/// `M_b`: entry `(i, j)` set iff `b_i = b_j = 1`.
pub fn matrix_of(b: &[bool]) -> Matrix {
    b.iter().map(|&x| b.iter().map(|&y| x && y).collect()).collect()
}

fn zero(k: usize) -> Matrix {
    vec![vec![false; k]; k]
}

fn ones(k: usize) -> Matrix {
    vec![vec![true; k]; k]
}

fn disjoint(a: &Matrix, b: &Matrix) -> bool {
    a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| !(*x && *y))
}

fn contains(a: &Matrix, b: &Matrix) -> bool {
    a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| *x || !*y)
}

fn zip_with(a: &Matrix, b: &Matrix, f: impl Fn(bool, bool) -> bool) -> Matrix {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(&x, &y)| f(x, y)).collect()).collect()
}

fn matrix_label(m: &Matrix) -> String {
    m.iter().map(|r| r.iter().map(|&x| if x { '1' } else { '0' }).collect::<String>()).collect::<Vec<_>>().join("/")
}

fn head_bits_test(b: &[bool]) -> Test {
    Test::from_atoms(b.iter().enumerate().map(|(i, &x)| if x { Atom::head(i + 1) } else { Atom::head(i + 1).not() }))
}

fn dedup_sorted(sigma: &[Symbol]) -> Vec<Symbol> {
    let mut v: Vec<Symbol> = sigma.iter().filter(|s| !s.is_endmarker()).cloned().collect();
    v.sort();
    v.dedup();
    v
}

/// Adds the level using pebble `p` and returns its initial and final states.
fn enumerator_level(b: &mut Builder, sigma: &[Symbol], k: usize, p: usize) -> (StateId, StateId) {
    let hash = Symbol::endmarker();
    let q0 = b.state(&format!("q0.{p}"), 0);
    let q1 = b.state(&format!("q1.{p}"), 1);
    let q2 = b.state(&format!("q2.{p}"), 0);
    let q3 = b.state(&format!("q3.{p}"), 1);
    let q5 = b.state(&format!("q5.{p}"), 1);
    let not_here = Test::atom(Atom::head(p).not());
    b.add(q0, hash.clone(), Test::tt(), PebbleOp::Drop(p), q3, vec![]);
    b.add(q1, hash.clone(), Test::tt(), PebbleOp::Nop, q2, vec![]);
    for a in sigma {
        b.add(q1, a.clone(), Test::tt(), PebbleOp::Drop(p), q3, vec![]);
        b.add(q3, a.clone(), not_here.clone(), PebbleOp::Nop, q3, vec![]);
        b.add(q5, a.clone(), not_here.clone(), PebbleOp::Nop, q5, vec![]);
    }
    for a in sigma.iter().chain([&hash]) {
        b.add(q5, a.clone(), Test::tt(), PebbleOp::Lift(p), q1, vec![]);
    }
    if p == k {
        let q4 = b.state(&format!("q4.{p}"), 1);
        for bits in bit_vectors(k) {
            let t = head_bits_test(&bits);
            b.add(q3, hash.clone(), t.clone(), PebbleOp::Nop, q4, vec![tag(&hash, &bits)]);
            for a in sigma {
                b.add(q4, a.clone(), t.clone(), PebbleOp::Nop, q4, vec![tag(a, &bits)]);
            }
        }
        b.add(q4, hash, Test::tt(), PebbleOp::Nop, q5, vec![]);
    } else {
        let (i0, f0) = enumerator_level(b, sigma, k, p + 1);
        b.add(q3, hash.clone(), Test::tt(), PebbleOp::Nop, i0, vec![]);
        b.add(f0, hash, Test::tt(), PebbleOp::Nop, q5, vec![]);
    }
    (q0, q2)
}

/// `C_k`: the lexicographic sequence of all markings of `k` positions of `#u`.
pub fn build_config_enumerator(k: usize, sigma: &[Symbol]) -> Transducer {
    assert!(k >= 1, "the enumerator needs at least one pebble");
    let sigma = dedup_sorted(sigma);
    let mut out = Vec::new();
    for s in sigma.iter().chain([&Symbol::endmarker()]) {
        for bits in bit_vectors(k) {
            out.push(tag(s, &bits));
        }
    }
    out.sort();
    let mut b = Builder::new(&format!("C{k}"), k, sigma.clone(), out);
    let (i, f) = enumerator_level(&mut b, &sigma, k, 1);
    b.initial(i);
    b.final_state(f);
    b.build()
}

/// Reference value of `C_k(u)`, computed directly.
pub fn config_markings(k: usize, u: &[Symbol]) -> Vec<Symbol> {
    let n = u.len() + 1;
    let letter = |h: usize| if h == 0 { Symbol::endmarker() } else { u[h - 1].clone() };
    let mut out = Vec::new();
    let total = n.pow(k as u32);
    for c in 0..total {
        let pos: Vec<usize> = (0..k).map(|i| c / n.pow((k - 1 - i) as u32) % n).collect();
        for h in 0..n {
            let bits: Vec<bool> = pos.iter().map(|&p| p == h).collect();
            out.push(tag(&letter(h), &bits));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Mode {
    Compute,
    Left,
    Write,
    Undo,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum AnnState {
    Init,
    Final,
    Reset,
    M(Matrix, Mode),
}

/// `C_k^=`: extends every letter of a copy with the co-marking matrix of that copy.
///
/// Matrix addition is only defined for disjoint operands and subtraction only for
/// contained ones, which on enumerator outputs is always the case.
pub fn build_equality_annotator(k: usize, sigma: &[Symbol]) -> Transducer {
    assert!(k >= 1, "the annotator needs at least one pebble");
    let sigma = dedup_sorted(sigma);
    let hash = Symbol::endmarker();
    let vectors = bit_vectors(k);
    let mut input = Vec::new();
    for s in sigma.iter().chain([&hash]) {
        for bits in &vectors {
            input.push(tag(s, bits));
        }
    }
    input.sort();
    let mut b = Builder::new(&format!("C{k}="), 0, input, Vec::new());
    let mut ids: HashMap<AnnState, StateId> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut id = |b: &mut Builder, s: AnnState, queue: &mut VecDeque<AnnState>| -> StateId {
        if let Some(&q) = ids.get(&s) {
            return q;
        }
        let (name, pol) = match &s {
            AnnState::Init => ("pi".to_string(), 0),
            AnnState::Final => ("pf".to_string(), 0),
            AnnState::Reset => ("r".to_string(), 1),
            AnnState::M(m, mode) => {
                let (c, pol) = match mode {
                    Mode::Compute => ('c', 1),
                    Mode::Left => ('l', -1),
                    Mode::Write => ('w', 1),
                    Mode::Undo => ('u', -1),
                };
                (format!("{c}:{}", matrix_label(m)), pol)
            }
        };
        let q = b.state(&name, pol);
        ids.insert(s.clone(), q);
        queue.push_back(s);
        q
    };
    let pi = id(&mut b, AnnState::Init, &mut queue);
    let pf = id(&mut b, AnnState::Final, &mut queue);
    b.initial(pi);
    b.final_state(pf);
    let tt = Test::tt;
    let nop = PebbleOp::Nop;
    while let Some(s) = queue.pop_front() {
        let from = id(&mut b, s.clone(), &mut queue);
        match s {
            AnnState::Init => {
                let r = id(&mut b, AnnState::Reset, &mut queue);
                b.add(from, hash.clone(), tt(), nop, r, vec![]);
            }
            AnnState::Final => {}
            AnnState::Reset => {
                for bits in &vectors {
                    for a in &sigma {
                        b.add(from, tag(a, bits), tt(), nop, from, vec![]);
                    }
                    let to = id(&mut b, AnnState::M(matrix_of(bits), Mode::Compute), &mut queue);
                    b.add(from, tag(&hash, bits), tt(), nop, to, vec![]);
                }
            }
            AnnState::M(m, mode) => {
                for bits in &vectors {
                    let mb = matrix_of(bits);
                    match mode {
                        Mode::Compute => {
                            if disjoint(&m, &mb) {
                                let to = id(&mut b, AnnState::M(zip_with(&m, &mb, |x, y| x || y), Mode::Compute), &mut queue);
                                for a in &sigma {
                                    b.add(from, tag(a, bits), tt(), nop, to, vec![]);
                                }
                            }
                            let to = id(&mut b, AnnState::M(m.clone(), Mode::Left), &mut queue);
                            b.add(from, tag(&hash, bits), tt(), nop, to, vec![]);
                        }
                        Mode::Left => {
                            for a in &sigma {
                                b.add(from, tag(a, bits), tt(), nop, from, vec![]);
                            }
                            let to = id(&mut b, AnnState::M(m.clone(), Mode::Write), &mut queue);
                            b.add(from, tag(&hash, bits), tt(), nop, to, vec![tag_matrix(&hash, bits, &m)]);
                        }
                        Mode::Write => {
                            for a in &sigma {
                                b.add(from, tag(a, bits), tt(), nop, from, vec![tag_matrix(a, bits, &m)]);
                            }
                            let to = id(&mut b, AnnState::M(m.clone(), Mode::Undo), &mut queue);
                            b.add(from, tag(&hash, bits), tt(), nop, to, vec![]);
                        }
                        Mode::Undo => {
                            if contains(&m, &mb) {
                                let to = id(&mut b, AnnState::M(zip_with(&m, &mb, |x, y| x && !y), Mode::Undo), &mut queue);
                                for a in &sigma {
                                    b.add(from, tag(a, bits), tt(), nop, to, vec![]);
                                }
                            }
                            if m == mb {
                                let r = id(&mut b, AnnState::Reset, &mut queue);
                                b.add(from, tag(&hash, bits), tt(), nop, r, vec![]);
                            }
                        }
                    }
                }
                if m == ones(k) {
                    match mode {
                        Mode::Compute => {
                            let to = id(&mut b, AnnState::M(m.clone(), Mode::Left), &mut queue);
                            b.add(from, hash.clone(), tt(), nop, to, vec![]);
                        }
                        Mode::Write => b.add(from, hash.clone(), tt(), nop, pf, vec![]),
                        _ => {}
                    }
                }
            }
        }
    }
    b.build()
}

/// Reference value of `C_k^=` on a sequence of marked copies.
pub fn annotate_markings(k: usize, w: &[Symbol]) -> Vec<Symbol> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < w.len() {
        let mut end = start + 1;
        while end < w.len() && w[end].base != crate::symbol::ENDMARKER {
            end += 1;
        }
        let mut m = zero(k);
        for s in &w[start..end] {
            let bits = s.bits.clone().unwrap_or_default();
            let b = &bits[bits.len() - k..];
            m = zip_with(&m, &matrix_of(b), |x, y| x || y);
        }
        for s in &w[start..end] {
            out.push(s.clone().with_matrix(m.clone()));
        }
        start = end;
    }
    out
}

fn all_matrices(k: usize) -> Vec<Matrix> {
    (0..1usize << (k * k))
        .map(|x| (0..k).map(|i| (0..k).map(|j| x >> (i * k + j) & 1 == 1).collect()).collect())
        .collect()
}

/// Whether `(b, M)` can occur on an annotated copy: `M` is an equivalence and `b` a union of classes.
pub fn consistent(b: &[bool], m: &Matrix) -> bool {
    let k = b.len();
    for i in 0..k {
        if !m[i][i] {
            return false;
        }
        for j in 0..k {
            if m[i][j] != m[j][i] || (m[i][j] && b[i] != b[j]) {
                return false;
            }
            for l in 0..k {
                if m[i][j] && m[j][l] && !m[i][l] {
                    return false;
                }
            }
        }
    }
    true
}

/// `b, M, i ⊨ φ`: only the first `i` pebbles count as dropped.
pub fn models(b: &[bool], m: &Matrix, i: usize, t: &Test) -> bool {
    match t {
        Test::False => false,
        Test::Conj(atoms) => atoms.iter().all(|a| {
            let v = match a.kind {
                AtomKind::HeadEq(l) => l >= 1 && l <= i && b[l - 1],
                AtomKind::PebEq(l, r) => l >= 1 && l <= i && r <= i && m[l - 1][r - 1],
            };
            v != a.negated
        }),
    }
}

/// Splits drop/lift moves per transition, so that nondeterministic choices are not mixed.
fn split_each(m: &Transducer) -> Transducer {
    let mut b = Builder::new(&m.name, m.k, m.input_alphabet.clone(), m.output_alphabet.clone())
        .equality_tests(m.equality_tests);
    for s in &m.states {
        b.state(&s.name, s.polarity);
    }
    b.initial(m.initial);
    b.final_state(m.final_state);
    for (i, t) in m.transitions.iter().enumerate() {
        if t.op.is_nop() || m.polarity(t.to) == 0 {
            b.push(t.clone());
            continue;
        }
        let mid = b.state(&format!("{}[t{i}]", m.state_name(t.from)), 0);
        b.add(t.from, t.letter.clone(), t.test.clone(), t.op, mid, t.output.clone());
        let g = reverse_test_under_op(t.op, &t.test).and(&test_of_op_unchecked(t.op.reverse(), m.k));
        b.add(mid, t.letter.clone(), g, PebbleOp::Nop, t.to, vec![]);
    }
    b.build()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Sim {
    S,
    Right,
    Left,
}

/// `T₀`: a 0-pebble machine simulating `T` on `C_k^=(C_k(u))`.
pub fn decompose(t: &Transducer) -> Transducer {
    let k = t.k;
    assert!(k >= 1, "decomposition needs at least one pebble");
    let t = if is_deterministic(t) { separate_unchecked(t) } else { split_each(t) };
    let hash = Symbol::endmarker();
    let sigma = dedup_sorted(&t.input_alphabet);
    let vectors = bit_vectors(k);
    let matrices = all_matrices(k);
    let mut letters: Vec<(Symbol, Vec<bool>, Matrix, Symbol)> = Vec::new();
    for s in sigma.iter().chain([&hash]) {
        for bits in &vectors {
            for m in &matrices {
                letters.push((s.clone(), bits.clone(), m.clone(), tag_matrix(s, bits, m)));
            }
        }
    }
    let mut input: Vec<Symbol> = letters.iter().map(|l| l.3.clone()).collect();
    input.sort();
    let mut b = Builder::new(&format!("{}0", t.name), 0, input, t.output_alphabet.clone());
    let pi = b.state("pi", 0);
    let pf = b.state("pf", 0);
    b.initial(pi);
    b.final_state(pf);
    let name = |q: StateId, i: usize, s: Sim| {
        let m = match s {
            Sim::S => "s",
            Sim::Right => "mr",
            Sim::Left => "ml",
        };
        format!("({},{i},{m})", t.state_name(q))
    };
    let pol = |s: Sim| match s {
        Sim::S => 0,
        Sim::Right => 1,
        Sim::Left => -1,
    };
    let st = |b: &mut Builder, q: StateId, i: usize, s: Sim| b.state(&name(q, i, s), pol(s));
    let plus = |bits: &[bool], i: usize| bits[i..].iter().all(|&x| x);
    let tt = Test::tt;
    let nop = PebbleOp::Nop;
    let all_ones = vec![true; k];
    let first = tag_matrix(&hash, &all_ones, &ones(k));

    let qi_r = st(&mut b, t.initial, 0, Sim::Right);
    let qi_s = st(&mut b, t.initial, 0, Sim::S);
    b.add(pi, hash.clone(), tt(), nop, qi_r, vec![]);
    b.add(qi_r, first.clone(), tt(), nop, qi_s, vec![]);
    let qf_s = st(&mut b, t.final_state, 0, Sim::S);
    let qf_l = st(&mut b, t.final_state, 0, Sim::Left);
    b.add(qf_s, first, tt(), nop, qf_l, vec![]);
    b.add(qf_l, hash.clone(), tt(), nop, pf, vec![]);

    for tr in &t.transitions {
        let g = tr.test.and(&test_of_op_unchecked(tr.op, k));
        for i in 0..=k {
            let i2 = match tr.op {
                PebbleOp::Nop => i,
                PebbleOp::Drop(j) if j == i + 1 => i + 1,
                PebbleOp::Lift(j) if j == i && i >= 1 => i - 1,
                _ => continue,
            };
            let from = st(&mut b, tr.from, i, Sim::S);
            for (s, bits, m, letter) in &letters {
                if s != &tr.letter || !plus(bits, i) || !consistent(bits, m) || !models(bits, m, i, &g) {
                    continue;
                }
                let mode = match t.polarity(tr.to) {
                    0 => Sim::S,
                    -1 if !s.is_endmarker() => Sim::Left,
                    _ => Sim::Right,
                };
                let to = st(&mut b, tr.to, i2, mode);
                b.add(from, letter.clone(), tt(), nop, to, tr.output.clone());
            }
        }
    }
    for q in 0..t.num_states() {
        let p = t.polarity(q);
        if p == 0 {
            continue;
        }
        for i in 0..=k {
            let s = st(&mut b, q, i, Sim::S);
            let r = st(&mut b, q, i, Sim::Right);
            let l = st(&mut b, q, i, Sim::Left);
            for (sym, bits, _, letter) in &letters {
                let on_hash = sym.is_endmarker();
                let ok = plus(bits, i);
                if p < 0 {
                    b.add(l, letter.clone(), tt(), nop, if ok { s } else { l }, vec![]);
                    b.add(r, letter.clone(), tt(), nop, if on_hash && ok { l } else { r }, vec![]);
                } else {
                    let rt = if !ok {
                        r
                    } else if on_hash {
                        l
                    } else {
                        s
                    };
                    b.add(r, letter.clone(), tt(), nop, rt, vec![]);
                    b.add(l, letter.clone(), tt(), nop, if on_hash && ok { s } else { l }, vec![]);
                }
            }
            b.add(r, hash.clone(), tt(), nop, l, vec![]);
        }
    }
    b.build().prune_unreachable()
}

// ---------------------------------------------------------------------------
// two-way transducers

/// Letters of a two-way transducer: the left and right endmarkers and input letters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TwoWayLetter {
    Left,
    Right,
    Sym(Symbol),
}

impl fmt::Display for TwoWayLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TwoWayLetter::Left => write!(f, "|-"),
            TwoWayLetter::Right => write!(f, "-|"),
            TwoWayLetter::Sym(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoWayTransition {
    pub from: StateId,
    pub letter: TwoWayLetter,
    pub to: StateId,
    pub output: Vec<Symbol>,
}

/// Two-way transducer with the head between letters on `⊢u⊣`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoWayTransducer {
    pub name: String,
    /// `(name, forward)`.
    pub states: Vec<(String, bool)>,
    pub initial: StateId,
    pub final_state: StateId,
    pub input_alphabet: Vec<Symbol>,
    pub output_alphabet: Vec<Symbol>,
    pub transitions: Vec<TwoWayTransition>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TwoWayViolation {
    InitialNotForward,
    FinalNotForward,
    LeftMarkerIntoBackward { transition: usize },
    RightMarkerIntoForward { transition: usize },
    BadInitialUse { transition: usize },
    BadFinalUse { transition: usize },
    WrongSideMarker { transition: usize },
}

impl TwoWayTransducer {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn is_forward(&self, q: StateId) -> bool {
        self.states[q].1
    }

    pub fn validate(&self) -> Vec<TwoWayViolation> {
        let mut v = Vec::new();
        if !self.is_forward(self.initial) {
            v.push(TwoWayViolation::InitialNotForward);
        }
        if !self.is_forward(self.final_state) {
            v.push(TwoWayViolation::FinalNotForward);
        }
        for (i, t) in self.transitions.iter().enumerate() {
            match t.letter {
                TwoWayLetter::Left => {
                    if !self.is_forward(t.to) || t.to == self.final_state {
                        v.push(TwoWayViolation::LeftMarkerIntoBackward { transition: i });
                    }
                    if self.is_forward(t.from) && t.from != self.initial {
                        v.push(TwoWayViolation::WrongSideMarker { transition: i });
                    }
                }
                TwoWayLetter::Right => {
                    if self.is_forward(t.to) && t.to != self.final_state {
                        v.push(TwoWayViolation::RightMarkerIntoForward { transition: i });
                    }
                    if !self.is_forward(t.from) || t.from == self.initial {
                        v.push(TwoWayViolation::WrongSideMarker { transition: i });
                    }
                }
                TwoWayLetter::Sym(_) => {}
            }
            if (t.from == self.initial && t.letter != TwoWayLetter::Left) || t.to == self.initial {
                v.push(TwoWayViolation::BadInitialUse { transition: i });
            }
            if t.from == self.final_state || (t.to == self.final_state && t.letter != TwoWayLetter::Right) {
                v.push(TwoWayViolation::BadFinalUse { transition: i });
            }
        }
        v
    }

    pub fn is_deterministic(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.transitions.iter().all(|t| seen.insert((t.from, t.letter.clone())))
    }

    pub fn is_reverse_deterministic(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.transitions.iter().all(|t| seen.insert((t.to, t.letter.clone())))
    }

    pub fn is_reversible(&self) -> bool {
        self.is_deterministic() && self.is_reverse_deterministic()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TwoWayRunError {
    #[error("two transitions apply in state {state} at position {head}")]
    Nondeterministic { state: StateId, head: usize },
}

/// Deterministic run on `⊢u⊣`; `None` when the run blocks or repeats a configuration.
pub fn run_two_way(t: &TwoWayTransducer, u: &[Symbol]) -> Result<Option<Vec<Symbol>>, TwoWayRunError> {
    let mut w = vec![TwoWayLetter::Left];
    w.extend(u.iter().cloned().map(TwoWayLetter::Sym));
    w.push(TwoWayLetter::Right);
    let mut by_from: HashMap<(StateId, &TwoWayLetter), Vec<&TwoWayTransition>> = HashMap::new();
    for tr in &t.transitions {
        by_from.entry((tr.from, &tr.letter)).or_default().push(tr);
    }
    let (mut q, mut h) = (t.initial, 0usize);
    let mut out = Vec::new();
    let limit = t.num_states() * (u.len() + 3) + 1;
    for _ in 0..limit {
        if q == t.final_state && h == u.len() + 2 {
            return Ok(Some(out));
        }
        let read = if t.is_forward(q) {
            w.get(h)
        } else if h >= 1 {
            w.get(h - 1)
        } else {
            None
        };
        let Some(a) = read else { return Ok(None) };
        let ts = by_from.get(&(q, a)).cloned().unwrap_or_default();
        let tr = match ts.as_slice() {
            [] => return Ok(None),
            [one] => *one,
            _ => return Err(TwoWayRunError::Nondeterministic { state: q, head: h }),
        };
        let (f, g) = (t.is_forward(q), t.is_forward(tr.to));
        h = match (f, g) {
            (true, true) => h + 1,
            (false, false) => h - 1,
            _ => h,
        };
        q = tr.to;
        out.extend(tr.output.iter().cloned());
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UniformizeError {
    #[error("the machine has {0} pebbles; a 0-pebble machine is required")]
    HasPebbles(usize),
    #[error("the pebbleless simulator is nondeterministic and no uniformizer hook was given")]
    HookRequired,
    #[error("the uniformizer hook returned a machine that is not reversible")]
    HookNotReversible,
    #[error("composition failed: {0}")]
    Compose(#[from] ComposeError),
}

/// Two-way machine equivalent to a 0-pebble machine, with right, stay, left and wrap copies.
pub fn zero_pebble_to_two_way(p: &Transducer) -> Result<TwoWayTransducer, UniformizeError> {
    if p.k != 0 {
        return Err(UniformizeError::HasPebbles(p.k));
    }
    let mut states: Vec<(String, bool)> = Vec::new();
    let mut index: HashMap<(u8, StateId), StateId> = HashMap::new();
    let mut add = |states: &mut Vec<(String, bool)>, kind: u8, q: StateId, fwd: bool| -> StateId {
        *index.entry((kind, q)).or_insert_with(|| {
            let tag = ["r", "s", "l1", "l2", "+", "-", "i", "f"][kind as usize];
            let name = if kind >= 6 { format!("s{tag}") } else { format!("{}_{tag}", p.state_name(q)) };
            states.push((name, fwd));
            states.len() - 1
        })
    };
    let (r, stay, l1, l2, pl, mi) = (0u8, 1u8, 2u8, 3u8, 4u8, 5u8);
    let si = add(&mut states, 6, 0, true);
    let sf = add(&mut states, 7, 0, true);
    for q in 0..p.num_states() {
        add(&mut states, r, q, true);
    }
    for q in 0..p.num_states() {
        match p.polarity(q) {
            1 => {
                add(&mut states, mi, q, false);
            }
            -1 => {
                add(&mut states, l1, q, false);
                add(&mut states, l2, q, false);
                add(&mut states, pl, q, true);
            }
            _ => {
                if q != p.initial && q != p.final_state {
                    add(&mut states, stay, q, false);
                }
            }
        }
    }
    let sigma = dedup_sorted(&p.input_alphabet);
    let s = |a: &Symbol| TwoWayLetter::Sym(a.clone());
    let mut ts = Vec::new();
    let mut push = |from, letter, to, output: Vec<Symbol>| ts.push(TwoWayTransition { from, letter, to, output });
    let qir = add(&mut states, r, p.initial, true);
    push(si, TwoWayLetter::Left, qir, vec![]);
    for a in &sigma {
        push(qir, s(a), qir, vec![]);
    }
    for t in &p.transitions {
        if t.test.is_false() {
            continue;
        }
        let on_hash = t.letter.is_endmarker();
        if t.from == p.initial && !on_hash {
            continue;
        }
        let from = add(&mut states, r, t.from, true);
        let to = match p.polarity(t.to) {
            1 if on_hash => add(&mut states, mi, t.to, false),
            1 => add(&mut states, r, t.to, true),
            -1 => add(&mut states, l1, t.to, false),
            _ if t.to == p.final_state && on_hash => sf,
            _ if t.to == p.final_state || t.to == p.initial => continue,
            _ => add(&mut states, stay, t.to, false),
        };
        let letter = if on_hash { TwoWayLetter::Right } else { s(&t.letter) };
        push(from, letter, to, t.output.clone());
    }
    for q in 0..p.num_states() {
        let qr = add(&mut states, r, q, true);
        match p.polarity(q) {
            1 => {
                let m = add(&mut states, mi, q, false);
                for a in &sigma {
                    push(m, s(a), m, vec![]);
                }
                push(m, TwoWayLetter::Left, qr, vec![]);
            }
            -1 => {
                let (a1, a2, ap) = (add(&mut states, l1, q, false), add(&mut states, l2, q, false), add(&mut states, pl, q, true));
                for a in &sigma {
                    push(a1, s(a), a2, vec![]);
                    push(a2, s(a), qr, vec![]);
                    push(ap, s(a), ap, vec![]);
                }
                push(a2, TwoWayLetter::Left, qr, vec![]);
                push(a1, TwoWayLetter::Left, ap, vec![]);
                push(ap, TwoWayLetter::Right, a2, vec![]);
            }
            _ => {
                if q != p.initial && q != p.final_state {
                    let st = add(&mut states, stay, q, false);
                    for a in &sigma {
                        push(st, s(a), qr, vec![]);
                    }
                    push(st, TwoWayLetter::Left, qr, vec![]);
                }
            }
        }
    }
    Ok(TwoWayTransducer {
        name: format!("{}-2w", p.name),
        states,
        initial: si,
        final_state: sf,
        input_alphabet: sigma,
        output_alphabet: p.output_alphabet.clone(),
        transitions: ts,
    })
}

/// The same states and transitions read as a 0-pebble machine; both endmarkers become `#`.
pub fn two_way_to_zero_pebble(t: &TwoWayTransducer) -> Transducer {
    let mut b = Builder::new(&format!("{}-0p", t.name), 0, t.input_alphabet.clone(), t.output_alphabet.clone());
    for (q, (name, fwd)) in t.states.iter().enumerate() {
        let pol = if q == t.initial || q == t.final_state {
            0
        } else if *fwd {
            1
        } else {
            -1
        };
        b.state(name, pol);
    }
    b.initial(t.initial);
    b.final_state(t.final_state);
    for tr in &t.transitions {
        let letter = match &tr.letter {
            TwoWayLetter::Left | TwoWayLetter::Right => Symbol::endmarker(),
            TwoWayLetter::Sym(s) => s.clone(),
        };
        b.add(tr.from, letter, Test::tt(), PebbleOp::Nop, tr.to, tr.output.clone());
    }
    b.build()
}

// ---------------------------------------------------------------------------
// pipeline

/// Seam for an external reversible uniformizer of two-way transducers.
pub enum UniformizerHook {
    /// Keeps the simulator as is; legal only when it is deterministic.
    Identity,
    /// Must return a reversible two-way machine realizing a uniformization of its input.
    TwoWay(Box<dyn Fn(&TwoWayTransducer) -> TwoWayTransducer>),
    /// Picks one output of the simulator per input word without building a machine.
    Selector(Box<dyn Fn(&Transducer, &[Symbol]) -> Option<Vec<Symbol>>>),
}

impl UniformizerHook {
    pub fn name(&self) -> &'static str {
        match self {
            UniformizerHook::Identity => "identity",
            UniformizerHook::TwoWay(_) => "two-way",
            UniformizerHook::Selector(_) => "selector",
        }
    }
}

/// The least output of a possibly nondeterministic machine, by brute-force enumeration.
pub fn least_output(m: &Transducer, w: &[Symbol]) -> Option<Vec<Symbol>> {
    enumerate_runs(m, w, None).outputs.into_iter().next()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// The result machine is reversible.
    Reversible,
    /// The result machine is deterministic but not reversible.
    Deterministic,
    /// No machine was built; outputs come from the selector hook.
    SelectorOnly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformizeMetadata {
    pub hook: &'static str,
    pub outcome: Outcome,
    pub pebbles: usize,
    pub simulator_states: usize,
    pub simulator_deterministic: bool,
    pub result_states: Option<usize>,
    /// Claims that are not checked by this implementation.
    pub not_reproduced: Vec<&'static str>,
}

pub const STATE_BOUND_NOTE: &str = "state bound 2^O((kn)^2) not asserted: it comes from the external reversible uniformizer of two-way transducers, which is not implemented (only an identity hook and caller-supplied hooks exist)";

pub struct Uniformization {
    pub enumerator: Transducer,
    pub annotator: Transducer,
    /// `C_k` followed by `C_k^=`, as one k-pebble machine.
    pub front: Transducer,
    pub simulator: Transducer,
    /// The hooked simulator, when the hook builds one.
    pub back: Option<Transducer>,
    pub machine: Option<Transducer>,
    pub metadata: UniformizeMetadata,
    selector: Option<Box<dyn Fn(&Transducer, &[Symbol]) -> Option<Vec<Symbol>>>>,
}

impl Uniformization {
    pub fn eval(&self, u: &[Symbol]) -> Result<Option<Vec<Symbol>>, RunError> {
        if let Some(m) = &self.machine {
            return eval(m, u);
        }
        let Some(mid) = eval(&self.front, u)? else { return Ok(None) };
        Ok(self.selector.as_ref().and_then(|f| f(&self.simulator, &mid)))
    }
}

impl fmt::Debug for Uniformization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Uniformization").field("metadata", &self.metadata).finish_non_exhaustive()
    }
}

/// Decomposes `t`, applies the hook to the simulator and composes everything back.
pub fn uniformize_pipeline(t: &Transducer, hook: UniformizerHook) -> Result<Uniformization, UniformizeError> {
    let k = t.k;
    let enumerator = build_config_enumerator(k, &t.input_alphabet);
    let annotator = build_equality_annotator(k, &t.input_alphabet);
    let simulator = decompose(t);
    let front = compose_simple(&enumerator, &annotator)?;
    let simulator_deterministic = is_deterministic(&simulator);
    let (back, selector) = match hook {
        UniformizerHook::Identity => {
            if !simulator_deterministic {
                return Err(UniformizeError::HookRequired);
            }
            let two = zero_pebble_to_two_way(&simulator)?;
            (Some(two_way_to_zero_pebble(&two)), None)
        }
        UniformizerHook::TwoWay(f) => {
            let two = f(&zero_pebble_to_two_way(&simulator)?);
            let back = two_way_to_zero_pebble(&two);
            if !is_reversible(&back) {
                return Err(UniformizeError::HookNotReversible);
            }
            (Some(back), None)
        }
        UniformizerHook::Selector(f) => (None, Some(f)),
    };
    let hook_name = match (&back, &selector) {
        (_, Some(_)) => "selector",
        _ => "identity",
    };
    let machine = match &back {
        Some(b) => Some(compose_simple(&front, b)?),
        None => None,
    };
    let outcome = match &machine {
        Some(m) if is_reversible(m) => Outcome::Reversible,
        Some(_) => Outcome::Deterministic,
        None => Outcome::SelectorOnly,
    };
    let metadata = UniformizeMetadata {
        hook: hook_name,
        outcome,
        pebbles: k,
        simulator_states: simulator.num_states(),
        simulator_deterministic,
        result_states: machine.as_ref().map(|m| m.num_states()),
        not_reproduced: vec![STATE_BOUND_NOTE],
    };
    Ok(Uniformization { enumerator, annotator, front, simulator, back, machine, metadata, selector })
}

/// Transitions as `(from, letter, to)` triples; used for diagnostics.
pub fn transition_triples(m: &Transducer) -> Vec<(String, String, String)> {
    m.transitions
        .iter()
        .map(|t: &Transition| (m.state_name(t.from).to_string(), t.letter.to_string(), m.state_name(t.to).to_string()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::word;

    fn bits_row(w: &[Symbol], i: usize) -> String {
        w.iter().map(|s| if s.bits.as_ref().unwrap()[i] { '1' } else { '0' }).collect()
    }

    #[test]
    fn enumerator_c1_on_ab() {
        let c1 = build_config_enumerator(1, &word("ab"));
        let out = eval(&c1, &word("ab")).unwrap().unwrap();
        let bases: String = out.iter().map(|s| s.base).collect();
        assert_eq!(bases, "#ab#ab#ab");
        assert_eq!(bits_row(&out, 0), "100010001");
    }

    #[test]
    fn enumerator_c2_on_ab() {
        let c2 = build_config_enumerator(2, &word("ab"));
        let out = eval(&c2, &word("ab")).unwrap().unwrap();
        assert_eq!(bits_row(&out, 0), "100100100010010010001001001");
        assert_eq!(bits_row(&out, 1), "100010001100010001100010001");
        assert_eq!(out, config_markings(2, &word("ab")));
    }

    #[test]
    fn annotator_on_c1() {
        let sigma = word("a");
        let c1 = build_config_enumerator(1, &sigma);
        let ann = build_equality_annotator(1, &sigma);
        let mid = eval(&c1, &word("a")).unwrap().unwrap();
        let out = eval(&ann, &mid).unwrap().unwrap();
        assert_eq!(out, annotate_markings(1, &mid));
        assert!(out.iter().all(|s| s.matrix == Some(vec![vec![true]])));
    }

    #[test]
    fn labels() {
        assert_eq!(matrix_label(&matrix_of(&[true, false])), "10/00");
    }
}
