//! The concrete machines of the paper, over arbitrary alphabets.

use crate::guard::{Atom, Test};
use crate::machine::{Builder, Transducer};
use crate::op::PebbleOp::{Drop, Lift, Nop};
use crate::symbol::Symbol;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BuiltinError {
    #[error("the alphabet contains the reserved endmarker")]
    ReservedLetter,
    #[error("unknown builtin {0}")]
    Unknown(String),
}

fn check(sigma: &[Symbol]) -> Result<Vec<Symbol>, BuiltinError> {
    if sigma.iter().any(|s| s.is_endmarker()) {
        return Err(BuiltinError::ReservedLetter);
    }
    let mut v = sigma.to_vec();
    v.sort();
    v.dedup();
    Ok(v)
}

fn hash() -> Symbol {
    Symbol::endmarker()
}

fn p1() -> Test {
    Test::atom(Atom::head(1))
}

fn not_p1() -> Test {
    Test::atom(Atom::head(1).not())
}

fn squaring_with(
    name: &str,
    sigma: &[Symbol],
    q3_polarity: i8,
    mark: impl Fn(&Symbol) -> Symbol,
) -> Result<Transducer, BuiltinError> {
    let sigma = check(sigma)?;
    let mut b = Builder::new(name, 1, sigma.clone(), Vec::new());
    let q0 = b.state("q0", 0);
    let q1 = b.state("q1", 1);
    let q2 = b.state("q2", 0);
    let q3 = b.state("q3", q3_polarity);
    let q4 = b.state("q4", 1);
    let q5 = b.state("q5", 1);
    b.initial(q0);
    b.final_state(q2);
    b.add(q0, hash(), Test::tt(), Nop, q1, vec![]);
    b.add(q1, hash(), Test::tt(), Nop, q2, vec![]);
    for a in &sigma {
        b.add(q1, a.clone(), Test::tt(), Drop(1), q3, vec![]);
        b.add(q3, a.clone(), not_p1(), Nop, q3, vec![]);
        b.add(q4, a.clone(), not_p1(), Nop, q4, vec![a.clone()]);
        b.add(q4, a.clone(), p1(), Nop, q4, vec![mark(a)]);
        b.add(q5, a.clone(), not_p1(), Nop, q5, vec![]);
        b.add(q5, a.clone(), Test::tt(), Lift(1), q1, vec![]);
    }
    b.add(q3, hash(), Test::tt(), Nop, q4, vec![]);
    b.add(q4, hash(), Test::tt(), Nop, q5, vec![]);
    Ok(b.build())
}

/// One copy of the input per letter, the i-th letter of the i-th copy marked.
pub fn squaring(sigma: &[Symbol]) -> Result<Transducer, BuiltinError> {
    squaring_with("squaring", sigma, 1, |a| a.push_bit(true))
}

/// Same function, with q3 sweeping leftwards.
pub fn squaring_variant(sigma: &[Symbol]) -> Result<Transducer, BuiltinError> {
    squaring_with("squaring_variant", sigma, -1, |a| a.push_bit(true))
}

/// Squaring that prints `!` in place of the marked letter.
pub fn modified_squaring(sigma: &[Symbol]) -> Result<Transducer, BuiltinError> {
    squaring_with("modified_squaring", sigma, 1, |_| Symbol::plain('!'))
}

/// The reverses of all nonempty prefixes, each followed by `!`.
pub fn all_prefixes_reversed(sigma: &[Symbol]) -> Result<Transducer, BuiltinError> {
    let sigma = check(sigma)?;
    let bang = Symbol::plain('!');
    let mut b = Builder::new("all_prefixes_reversed", 1, sigma.clone(), Vec::new());
    let q0 = b.state("q0", 0);
    let q1 = b.state("q1", 1);
    let q2 = b.state("q2", 0);
    let q3 = b.state("q3", -1);
    let q4 = b.state("q4", 1);
    b.initial(q0);
    b.final_state(q2);
    b.add(q0, hash(), Test::tt(), Nop, q1, vec![]);
    b.add(q1, hash(), Test::tt(), Nop, q2, vec![]);
    for a in &sigma {
        b.add(q1, a.clone(), Test::tt(), Drop(1), q3, vec![a.clone()]);
        b.add(q3, a.clone(), not_p1(), Nop, q3, vec![a.clone()]);
        b.add(q4, a.clone(), not_p1(), Nop, q4, vec![]);
        b.add(q4, a.clone(), Test::tt(), Lift(1), q1, vec![]);
    }
    b.add(q3, hash(), Test::tt(), Nop, q4, vec![bang]);
    Ok(b.build())
}

/// Reverses every `!`-separated block. `!` is added to the alphabet if missing.
pub fn iterated_reverse(sigma: &[Symbol]) -> Result<Transducer, BuiltinError> {
    let bang = Symbol::plain('!');
    let mut sigma = check(sigma)?;
    if !sigma.contains(&bang) {
        sigma.push(bang.clone());
        sigma.sort();
    }
    let mut b = Builder::new("iterated_reverse", 0, sigma.clone(), Vec::new());
    let q0 = b.state("q0'", 0);
    let q1 = b.state("q1'", 1);
    let q2 = b.state("q2'", -1);
    let q3 = b.state("q3'", 1);
    let qf = b.state("qf'", 0);
    b.initial(q0);
    b.final_state(qf);
    b.add(q0, hash(), Test::tt(), Nop, q1, vec![]);
    for a in sigma.iter().filter(|a| **a != bang) {
        b.add(q1, a.clone(), Test::tt(), Nop, q1, vec![]);
        b.add(q2, a.clone(), Test::tt(), Nop, q2, vec![a.clone()]);
        b.add(q3, a.clone(), Test::tt(), Nop, q3, vec![]);
    }
    for sep in [hash(), bang.clone()] {
        b.add(q1, sep.clone(), Test::tt(), Nop, q2, vec![]);
        b.add(q2, sep, Test::tt(), Nop, q3, vec![]);
    }
    b.add(q3, bang.clone(), Test::tt(), Nop, q1, vec![bang]);
    b.add(q3, hash(), Test::tt(), Nop, qf, vec![]);
    Ok(b.build())
}

/// Identity, one left-to-right sweep.
pub fn copier(sigma: &[Symbol]) -> Result<Transducer, BuiltinError> {
    let sigma = check(sigma)?;
    let mut b = Builder::new("copier", 0, sigma.clone(), Vec::new());
    let q0 = b.state("q0", 0);
    let q1 = b.state("q1", 1);
    let qf = b.state("qf", 0);
    b.initial(q0);
    b.final_state(qf);
    b.add(q0, hash(), Test::tt(), Nop, q1, vec![]);
    for a in &sigma {
        b.add(q1, a.clone(), Test::tt(), Nop, q1, vec![a.clone()]);
    }
    b.add(q1, hash(), Test::tt(), Nop, qf, vec![]);
    Ok(b.build())
}

pub const NAMES: &[&str] = &[
    "squaring",
    "squaring_variant",
    "modified_squaring",
    "all_prefixes_reversed",
    "iterated_reverse",
    "copier",
];

pub fn by_name(name: &str, sigma: &[Symbol]) -> Result<Transducer, BuiltinError> {
    match name {
        "squaring" => squaring(sigma),
        "squaring_variant" => squaring_variant(sigma),
        "modified_squaring" => modified_squaring(sigma),
        "all_prefixes_reversed" => all_prefixes_reversed(sigma),
        "iterated_reverse" => iterated_reverse(sigma),
        "copier" => copier(sigma),
        other => Err(BuiltinError::Unknown(other.to_string())),
    }
}
