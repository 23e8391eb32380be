//! Machine-to-machine rewrites: reversal, equality elimination and the
//! normal forms used by composition.

use std::collections::{HashMap, VecDeque};

use crate::analysis::is_reversible;
use crate::guard::{test_of_op_unchecked, Atom, AtomKind, Lit, Test};
use crate::machine::{Builder, State, StateId, Transducer, Transition};
use crate::op::PebbleOp;
use crate::symbol::{render_word, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransformError {
    #[error("machine is not reversible")]
    NotReversible,
    #[error("machine uses {0} pebbles, expected none")]
    HasPebbles(usize),
}

fn reverse_atom(op: PebbleOp, a: Atom) -> Lit {
    let base = Atom { negated: false, ..a };
    let lit = match (op, base.kind) {
        (PebbleOp::Nop, _) => Lit::Atom(base),
        (PebbleOp::Drop(l), kind) => {
            let max = match kind {
                AtomKind::HeadEq(i) => i,
                AtomKind::PebEq(_, j) => j,
            };
            if max < l {
                Lit::Atom(base)
            } else {
                Lit::False
            }
        }
        (PebbleOp::Lift(l), AtomKind::HeadEq(i)) => {
            if i < l {
                Lit::Atom(base)
            } else if i == l {
                Lit::True
            } else {
                Lit::False
            }
        }
        (PebbleOp::Lift(l), AtomKind::PebEq(i, j)) => {
            if j < l {
                Lit::Atom(base)
            } else if i < j && j == l {
                Lit::Atom(Atom::head(i))
            } else if i == l && j == l {
                Lit::True
            } else {
                Lit::False
            }
        }
    };
    if a.negated {
        lit.not()
    } else {
        lit
    }
}

/// `op(φ)`: holds after `op` exactly when `φ` held before it.
pub fn reverse_test_under_op(op: PebbleOp, t: &Test) -> Test {
    t.map_lits(|a| reverse_atom(op, a))
}

/// The machine computing the mirror image of the output.
pub fn reverse_transducer(m: &Transducer) -> Result<Transducer, TransformError> {
    if !is_reversible(m) {
        return Err(TransformError::NotReversible);
    }
    Ok(reverse_unchecked(m))
}

pub(crate) fn reverse_unchecked(m: &Transducer) -> Transducer {
    let states = m.states.iter().map(|s| State { name: s.name.clone(), polarity: -s.polarity }).collect();
    let transitions = m
        .transitions
        .iter()
        .map(|t| Transition {
            from: t.to,
            letter: t.letter.clone(),
            test: reverse_test_under_op(t.op, &t.test),
            op: t.op.reverse(),
            to: t.from,
            output: t.output.clone(),
        })
        .collect();
    Transducer {
        name: format!("reverse({})", m.name),
        states,
        initial: m.final_state,
        final_state: m.initial,
        transitions,
        ..m.clone()
    }
}

/// `α`: which pebbles share a position; the diagonal marks dropped pebbles.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EqualityMatrix {
    pub k: usize,
    pub m: Vec<Vec<bool>>,
}

pub type BitVector = Vec<bool>;

impl EqualityMatrix {
    pub fn zero(k: usize) -> Self {
        EqualityMatrix { k, m: vec![vec![false; k]; k] }
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.m[i - 1][j - 1]
    }

    fn set(&mut self, i: usize, j: usize, v: bool) {
        self.m[i - 1][j - 1] = v;
        self.m[j - 1][i - 1] = v;
    }

    /// Number of dropped pebbles.
    pub fn size(&self) -> usize {
        (1..=self.k).take_while(|&i| self.get(i, i)).count()
    }

    /// I1 and I5.
    pub fn is_consistent(&self) -> bool {
        let k = self.k;
        for i in 1..=k {
            for j in 1..=k {
                if self.get(i, j) != self.get(j, i) {
                    return false;
                }
                for n in 1..=k {
                    if self.get(i, j) && self.get(j, n) && !self.get(i, n) {
                        return false;
                    }
                }
                if i < j && self.get(j, j) && !self.get(i, i) {
                    return false;
                }
            }
        }
        true
    }

    /// I2 to I4 for a bit vector read alongside this matrix.
    pub fn admits(&self, b: &[bool]) -> bool {
        let k = self.k;
        for i in 1..=k {
            if b[i - 1] && !self.get(i, i) {
                return false;
            }
            for j in 1..=k {
                if b[i - 1] && b[j - 1] && !self.get(i, j) {
                    return false;
                }
                if self.get(i, j) && !(self.get(i, i) && self.get(j, j) && b[i - 1] == b[j - 1]) {
                    return false;
                }
            }
        }
        true
    }

    pub fn satisfies(&self, b: &[bool], t: &Test) -> bool {
        match t {
            Test::False => false,
            Test::Conj(v) => v.iter().all(|a| {
                let val = match a.kind {
                    AtomKind::HeadEq(i) => i >= 1 && i <= self.k && b[i - 1],
                    AtomKind::PebEq(i, j) => i >= 1 && j <= self.k && self.get(i, j),
                };
                val != a.negated
            }),
        }
    }

    pub fn enables(&self, b: &[bool], op: PebbleOp) -> bool {
        match op {
            PebbleOp::Nop => true,
            PebbleOp::Drop(n) => !self.get(n, n) && (n == 1 || self.get(n - 1, n - 1)),
            PebbleOp::Lift(n) => b[n - 1] && (n == self.k || !self.get(n + 1, n + 1)),
        }
    }

    /// `op(α, b)`.
    pub fn apply(&self, b: &[bool], op: PebbleOp) -> EqualityMatrix {
        let k = self.k;
        let mut out = EqualityMatrix::zero(k);
        let keep = match op {
            PebbleOp::Nop => return self.clone(),
            PebbleOp::Drop(n) | PebbleOp::Lift(n) => n,
        };
        for i in 1..keep {
            for j in 1..keep {
                out.m[i - 1][j - 1] = self.get(i, j);
            }
        }
        if let PebbleOp::Drop(n) = op {
            out.set(n, n, true);
            for j in 1..n {
                if b[j - 1] {
                    out.set(n, j, true);
                }
            }
        }
        out
    }

    pub fn label(&self) -> String {
        self.m
            .iter()
            .map(|r| r.iter().map(|&x| if x { '1' } else { '0' }).collect::<String>())
            .collect::<Vec<_>>()
            .join("/")
    }
}

pub fn phi1(peb: &[usize], k: usize) -> EqualityMatrix {
    let mut a = EqualityMatrix::zero(k);
    for i in 0..peb.len() {
        for j in 0..peb.len() {
            a.m[i][j] = peb[i] == peb[j];
        }
    }
    a
}

pub fn phi2(h: usize, peb: &[usize], k: usize) -> BitVector {
    (0..k).map(|i| i < peb.len() && peb[i] == h).collect()
}

fn all_bits(k: usize) -> impl Iterator<Item = BitVector> {
    (0u32..(1u32 << k)).map(move |x| (0..k).map(|i| x & (1 << i) != 0).collect())
}

fn bits_test(b: &[bool], upto: usize) -> Test {
    Test::from_atoms((1..=upto).map(|i| if b[i - 1] { Atom::head(i) } else { Atom::head(i).not() }))
}

/// Equivalent basic machine over states `(q, α)`, keeping only matrices reachable from `M0`.
pub fn eliminate_equality(a: &Transducer) -> Transducer {
    let k = a.k;
    let mut b = Builder::new(&format!("basic({})", a.name), k, a.input_alphabet.clone(), a.output_alphabet.clone());
    let name = |q: StateId, al: &EqualityMatrix| format!("{}@{}", a.state_name(q), al.label());
    let mut by_state: Vec<Vec<usize>> = vec![Vec::new(); a.num_states()];
    for (i, t) in a.transitions.iter().enumerate() {
        by_state[t.from].push(i);
    }
    let m0 = EqualityMatrix::zero(k);
    let init = b.state(&name(a.initial, &m0), 0);
    let fin = b.state(&name(a.final_state, &m0), 0);
    b.initial(init);
    b.final_state(fin);
    let mut ids: HashMap<(StateId, EqualityMatrix), StateId> = HashMap::new();
    ids.insert((a.initial, m0.clone()), init);
    ids.insert((a.final_state, m0.clone()), fin);
    let mut queue = VecDeque::from([(a.initial, m0)]);
    while let Some((q, al)) = queue.pop_front() {
        let src = ids[&(q, al.clone())];
        let s = al.size();
        for bits in all_bits(k) {
            if !al.admits(&bits) {
                continue;
            }
            for &ti in &by_state[q] {
                let t = &a.transitions[ti];
                if !al.satisfies(&bits, &t.test) || !al.enables(&bits, t.op) {
                    continue;
                }
                let al2 = al.apply(&bits, t.op);
                let key = (t.to, al2.clone());
                let dst = match ids.get(&key) {
                    Some(&d) => d,
                    None => {
                        let d = b.state(&name(t.to, &al2), a.polarity(t.to));
                        ids.insert(key.clone(), d);
                        queue.push_back(key);
                        d
                    }
                };
                b.add(src, t.letter.clone(), bits_test(&bits, s), t.op, dst, t.output.clone());
            }
        }
    }
    b.build()
}

/// Every transition emits at most one letter; longer outputs become chains of neutral states.
pub fn split_outputs(m: &Transducer) -> Transducer {
    let mut b = Builder::new(&m.name, m.k, m.input_alphabet.clone(), m.output_alphabet.clone())
        .equality_tests(m.equality_tests);
    for s in &m.states {
        b.state(&s.name, s.polarity);
    }
    b.initial(m.initial);
    b.final_state(m.final_state);
    for t in &m.transitions {
        let n = t.output.len();
        if n <= 1 {
            b.push(t.clone());
            continue;
        }
        let pre = t.test.and(&test_of_op_unchecked(t.op, m.k));
        let mut cur = t.from;
        for i in 1..n {
            let label = format!("<{}|{}>", m.state_name(t.from), render_word(&t.output[..i]));
            let next = b.state(&label, 0);
            b.add(cur, t.letter.clone(), pre.clone(), PebbleOp::Nop, next, vec![t.output[i - 1].clone()]);
            cur = next;
        }
        b.add(cur, t.letter.clone(), t.test.clone(), t.op, t.to, vec![t.output[n - 1].clone()]);
    }
    b.build()
}

fn fresh(m: &Transducer, base: &str) -> String {
    let mut s = base.to_string();
    while m.state_id(&s).is_some() {
        s.push('\'');
    }
    s
}

/// Sweeps the whole input once before the original first move.
pub fn ensure_full_read(m: &Transducer) -> Result<Transducer, TransformError> {
    if m.k != 0 {
        return Err(TransformError::HasPebbles(m.k));
    }
    Ok(full_read_unchecked(m))
}

pub(crate) fn full_read_unchecked(m: &Transducer) -> Transducer {
    let mut out = m.clone();
    let r = out.states.len();
    out.states.push(State { name: fresh(m, "sweep"), polarity: 1 });
    let hash = Symbol::endmarker();
    let mut transitions = vec![Transition {
        from: m.initial,
        letter: hash.clone(),
        test: Test::tt(),
        op: PebbleOp::Nop,
        to: r,
        output: vec![],
    }];
    for a in &m.input_alphabet {
        transitions.push(Transition {
            from: r,
            letter: a.clone(),
            test: Test::tt(),
            op: PebbleOp::Nop,
            to: r,
            output: vec![],
        });
    }
    for t in &m.transitions {
        if t.from == m.initial && t.letter == hash {
            transitions.push(Transition { from: r, ..t.clone() });
        } else {
            transitions.push(t.clone());
        }
    }
    out.transitions = transitions;
    out
}

/// Pebble operations happen on transitions into neutral states, so head moves carry `nop`.
pub fn separate_drop_lift_moves(m: &Transducer) -> Result<Transducer, TransformError> {
    if !is_reversible(m) {
        return Err(TransformError::NotReversible);
    }
    Ok(separate_unchecked(m))
}

pub(crate) fn separate_unchecked(m: &Transducer) -> Transducer {
    let mut b = Builder::new(&m.name, m.k, m.input_alphabet.clone(), m.output_alphabet.clone())
        .equality_tests(m.equality_tests);
    for s in &m.states {
        b.state(&s.name, s.polarity);
    }
    b.initial(m.initial);
    b.final_state(m.final_state);
    for t in &m.transitions {
        if t.op.is_nop() {
            b.push(t.clone());
            continue;
        }
        let mid = b.state(&format!("{}[{}]", m.state_name(t.from), t.op), 0);
        b.add(t.from, t.letter.clone(), t.test.clone(), t.op, mid, t.output.clone());
        let g = reverse_test_under_op(t.op, &t.test).and(&test_of_op_unchecked(t.op.reverse(), m.k));
        b.add(mid, t.letter.clone(), g, PebbleOp::Nop, t.to, vec![]);
    }
    b.build()
}
