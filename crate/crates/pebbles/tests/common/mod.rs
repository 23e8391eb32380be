#![allow(dead_code)]

use pebbles::analysis::validate;
use pebbles::compose::{xi_bar_for, Composition, StateKind};
use pebbles::guard::{Atom, Test};
use pebbles::machine::Configuration;
use pebbles::runner::{eval, run_with, RunOptions};
use pebbles::uniformize::build_config_enumerator;
use pebbles::{Builder, PebbleOp, Symbol, Transducer};
use rand::rngs::StdRng;
use rand::Rng;

pub fn words(sigma: &str, max: usize) -> Vec<Vec<Symbol>> {
    let mut all = vec![vec![]];
    let mut layer: Vec<Vec<Symbol>> = vec![vec![]];
    for _ in 0..max {
        layer = layer
            .iter()
            .flat_map(|w| sigma.chars().map(move |c| [w.clone(), vec![Symbol::plain(c)]].concat()))
            .collect();
        all.extend(layer.clone());
    }
    all
}

pub fn marked_alphabet(sigma: &[Symbol]) -> Vec<Symbol> {
    sigma.iter().flat_map(|s| [s.clone(), s.push_bit(true)]).collect()
}

fn bang() -> Symbol {
    Symbol::plain('!')
}

pub fn squaring_oracle(u: &[Symbol]) -> Vec<Symbol> {
    let mut out = Vec::new();
    for i in 0..u.len() {
        for (j, a) in u.iter().enumerate() {
            out.push(if i == j { a.push_bit(true) } else { a.clone() });
        }
    }
    out
}

pub fn modified_squaring_oracle(u: &[Symbol]) -> Vec<Symbol> {
    let mut out = Vec::new();
    for i in 0..u.len() {
        for (j, a) in u.iter().enumerate() {
            out.push(if i == j { bang() } else { a.clone() });
        }
    }
    out
}

pub fn prefixes_oracle(u: &[Symbol]) -> Vec<Symbol> {
    let mut out = Vec::new();
    for i in 1..=u.len() {
        out.extend(u[..i].iter().rev().cloned());
        out.push(bang());
    }
    out
}

pub fn iterated_reverse_oracle(u: &[Symbol]) -> Vec<Symbol> {
    let mut out = Vec::new();
    for (i, block) in u.split(|s| *s == bang()).enumerate() {
        if i > 0 {
            out.push(bang());
        }
        out.extend(block.iter().rev().cloned());
    }
    out
}

/// Two-pebble machine with an equality test: for every pair of positions of `#u`, `!`
/// followed by `u` with the letter under pebble 2 marked and, when both pebbles share a
/// position, every letter away from them doubled.
pub fn pairs_fixture(sigma: &[Symbol]) -> Transducer {
    let c2 = build_config_enumerator(2, sigma);
    let mut b = Builder::new("pairs", 2, c2.input_alphabet.clone(), Vec::new()).equality_tests(true);
    for s in &c2.states {
        b.state(&s.name, s.polarity);
    }
    b.initial(c2.initial);
    b.final_state(c2.final_state);
    let eq = Atom::peb(1, 2);
    for t in &c2.transitions {
        let Some(o) = t.output.first() else {
            b.push(t.clone());
            continue;
        };
        let bits = o.bits.clone().unwrap();
        let base = if o.base == '#' { bang() } else { Symbol::plain(o.base) };
        if o.base == '#' {
            b.add(t.from, t.letter.clone(), t.test.clone(), t.op, t.to, vec![base]);
        } else if bits[1] {
            b.add(t.from, t.letter.clone(), t.test.clone(), t.op, t.to, vec![base.push_bit(true)]);
        } else if bits[0] {
            b.add(t.from, t.letter.clone(), t.test.clone(), t.op, t.to, vec![base]);
        } else {
            b.add(t.from, t.letter.clone(), t.test.and_atom(eq), t.op, t.to, vec![base.clone(), base.clone()]);
            b.add(t.from, t.letter.clone(), t.test.and_atom(eq.not()), t.op, t.to, vec![base]);
        }
    }
    b.build()
}

pub fn pairs_oracle(u: &[Symbol]) -> Vec<Symbol> {
    let n = u.len();
    let mut out = Vec::new();
    for p1 in 0..=n {
        for p2 in 0..=n {
            out.push(bang());
            for h in 1..=n {
                let a = u[h - 1].clone();
                if h == p2 {
                    out.push(a.push_bit(true));
                } else if p1 == p2 && h != p1 {
                    out.extend([a.clone(), a]);
                } else {
                    out.push(a);
                }
            }
        }
    }
    out
}

pub fn atom_universe(k: usize) -> Vec<Atom> {
    let mut v = Vec::new();
    for i in 1..=k {
        v.push(Atom::head(i));
        for j in i..=k {
            v.push(Atom::peb(i, j));
        }
    }
    v
}

/// Whether some stack of at most `k` pebbles and head on `#u`, `|u| <= k + 2`, satisfies `t`.
pub fn satisfiable_by_search(t: &Test, k: usize) -> bool {
    let positions = k + 3;
    let mut stacks: Vec<Vec<usize>> = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..k {
        layer = layer
            .iter()
            .flat_map(|s: &Vec<usize>| (0..positions).map(move |p| [s.clone(), vec![p]].concat()))
            .collect();
        stacks.extend(layer.clone());
    }
    stacks.iter().any(|peb| (0..positions).any(|h| t.eval(peb, h)))
}

fn random_atom(rng: &mut StdRng, k: usize) -> Atom {
    let i = rng.gen_range(1..=k);
    let a = if rng.gen_bool(0.5) { Atom::head(i) } else { Atom::peb(i, rng.gen_range(1..=k)) };
    if rng.gen_bool(0.5) {
        a.not()
    } else {
        a
    }
}

pub fn random_test(rng: &mut StdRng, k: usize, max_atoms: usize) -> Test {
    if k == 0 {
        return Test::tt();
    }
    let n = rng.gen_range(0..=max_atoms);
    Test::from_atoms((0..n).map(|_| random_atom(rng, k)))
}

/// A valid machine with `k` pebbles and at most `n` states, over `{a, b}`.
pub fn random_machine(rng: &mut StdRng, k: usize, n: usize, equality: bool) -> Transducer {
    loop {
        let sigma = vec![Symbol::plain('a'), Symbol::plain('b')];
        let mut b = Builder::new("random", k, sigma.clone(), Vec::new()).equality_tests(equality);
        let n = rng.gen_range(2..=n.max(2));
        let q0 = b.state("q0", 0);
        let qf = b.state("qf", 0);
        let mut states = vec![q0, qf];
        for i in 2..n {
            states.push(b.state(&format!("q{i}"), rng.gen_range(-1..=1)));
        }
        b.initial(q0);
        b.final_state(qf);
        let letters: Vec<Symbol> = sigma.iter().cloned().chain([Symbol::endmarker()]).collect();
        let outs = [Symbol::plain('x'), Symbol::plain('y')];
        let first = if n > 2 { states[rng.gen_range(2..n)] } else { qf };
        b.add(q0, Symbol::endmarker(), Test::tt(), PebbleOp::Nop, first, vec![]);
        for _ in 0..rng.gen_range(2..=3 * n) {
            let from = states[if rng.gen_bool(0.2) { 0 } else { rng.gen_range(0..n) }];
            let from = if from == qf { q0 } else { from };
            let to = states[rng.gen_range(1..n)];
            let letter = letters[rng.gen_range(0..letters.len())].clone();
            let mut test = random_test(rng, k, 2);
            if !equality {
                test = Test::from_atoms(test.atoms().iter().copied().filter(|a| !a.is_equality()));
            }
            let op = match (k, rng.gen_range(0..3)) {
                (0, _) | (_, 0) => PebbleOp::Nop,
                (_, 1) => PebbleOp::Drop(rng.gen_range(1..=k)),
                _ => PebbleOp::Lift(rng.gen_range(1..=k)),
            };
            let out = if rng.gen_bool(0.5) { vec![outs[rng.gen_range(0..2)].clone()] } else { vec![] };
            b.add(from, letter, test, op, to, out);
        }
        let m = b.build();
        if validate(&m).is_empty() {
            return m;
        }
    }
}


/// Like [`random_machine`], retried until the result is syntactically deterministic.
pub fn random_deterministic_machine(rng: &mut StdRng, k: usize, n: usize) -> Transducer {
    loop {
        let m = random_machine(rng, k, n, true);
        if pebbles::analysis::is_deterministic(&m) {
            return m;
        }
    }
}

pub fn configs(m: &Transducer, u: &[Symbol]) -> (Vec<Configuration>, Vec<usize>) {
    let r = run_with(m, u, RunOptions { trace: true, ..Default::default() }).unwrap();
    assert!(r.output().is_some());
    let trace = r.trace.unwrap();
    let mut cs = vec![m.initial_config()];
    cs.extend(trace.iter().map(|s| s.config.clone()));
    (cs, trace.iter().map(|s| s.transition).collect())
}

/// Tests over one pebble of the second machine, up to two atoms.
pub fn psi_grid() -> Vec<Test> {
    let atoms = [Atom::head(1), Atom::head(1).not(), Atom::dropped(1), Atom::dropped(1).not()];
    let mut v = vec![Test::tt()];
    for (i, a) in atoms.iter().enumerate() {
        v.push(Test::atom(*a));
        for b in &atoms[i + 1..] {
            v.push(Test::from_atoms([*a, *b]));
        }
    }
    v
}

/// Segments at Sync states match the second machine's run step for step; gadgets keep the head.
pub fn check_trace(c: &Composition, u: &[Symbol]) {
    let (cs, _) = configs(&c.machine, u);
    let v = eval(&c.first, u).unwrap().unwrap();
    let v = &v[1..];
    let (cs2, _) = configs(&c.second, v);
    let sync: Vec<&Configuration> = cs.iter().filter(|x| c.kinds[x.state] == StateKind::Sync).collect();
    assert_eq!(sync.len(), cs2.len(), "segments on {u:?}");
    for (s, s2) in sync.iter().zip(&cs2) {
        let key = &c.keys[s.state];
        assert_eq!(key.qp, s2.state);
        assert_eq!(key.x.len(), s2.peb.len());
        if c.second.k > 0 {
            for psi in psi_grid() {
                let want = psi.eval(&s2.peb, s2.head);
                let got = xi_bar_for(key.q, &key.x, &key.y, &psi).iter().any(|t| t.eval(&s.peb, s.head));
                assert_eq!(got, want, "{psi} at {s:?} / {s2:?}");
            }
        }
    }
    let gadget = |q: usize| matches!(c.kinds[q], StateKind::LiftGadget | StateKind::DropGadget);
    let mut entry: Option<usize> = None;
    for w in cs.windows(2) {
        match (gadget(w[0].state), gadget(w[1].state)) {
            (false, true) => entry = Some(w[0].head),
            (true, false) => assert_eq!(Some(w[1].head), entry.take(), "gadget moved the head on {u:?}"),
            _ => {}
        }
    }
    assert!(entry.is_none());
}
