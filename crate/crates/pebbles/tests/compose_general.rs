use pebbles::analysis::{determinism_witness, reverse_determinism_witness, validate};
use pebbles::builtins;
use pebbles::compose::{compose, compose_general_detailed, general_state_bound, Composition};
use pebbles::runner::eval;
use pebbles::symbol::{render_word, word, Symbol};
use pebbles::Transducer;

fn marked_alphabet(sigma: &[Symbol]) -> Vec<Symbol> {
    let mut v: Vec<Symbol> = sigma.iter().flat_map(|a| [a.clone(), a.push_bit(true)]).collect();
    v.sort();
    v
}

fn words(sigma: &str, max: usize) -> Vec<Vec<Symbol>> {
    let letters = word(sigma);
    let mut all = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..max {
        let mut next = Vec::new();
        for w in &layer {
            for a in &letters {
                let mut v: Vec<Symbol> = w.clone();
                v.push(a.clone());
                next.push(v);
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}

fn check(c: &Composition, t: &Transducer, tp: &Transducer, sigma: &str, max: usize) {
    let m = &c.machine;
    assert_eq!(validate(m), vec![]);
    if let Some(w) = determinism_witness(m) {
        panic!("{}", w.describe(m));
    }
    if let Some(w) = reverse_determinism_witness(m) {
        panic!("{}", w.describe(m));
    }
    assert!(m.num_states() <= general_state_bound(c));
    assert_eq!(m.k, (t.k + 1) * (tp.k + 1) - 1);
    for u in words(sigma, max) {
        let want = eval(t, &u).unwrap().and_then(|mid| eval(tp, &mid).unwrap());
        let got = eval(m, &u).unwrap();
        assert_eq!(got.map(|w| render_word(&w)), want.map(|w| render_word(&w)), "on {}", render_word(&u));
    }
}

#[test]
fn squaring_after_squaring() {
    let ab = word("ab");
    let t = builtins::squaring(&ab).unwrap();
    let tp = builtins::squaring(&marked_alphabet(&ab)).unwrap();
    let c = compose_general_detailed(&t, &tp).unwrap();
    check(&c, &t, &tp, "ab", 4);
}

#[test]
fn prefixes_after_squaring() {
    let ab = word("ab");
    let t = builtins::squaring(&ab).unwrap();
    let tp = builtins::all_prefixes_reversed(&marked_alphabet(&ab)).unwrap();
    let c = compose_general_detailed(&t, &tp).unwrap();
    check(&c, &t, &tp, "ab", 3);
}

#[test]
fn squaring_after_prefixes() {
    let ab = word("ab");
    let t = builtins::all_prefixes_reversed(&ab).unwrap();
    let tp = builtins::squaring(&word("ab!")).unwrap();
    let c = compose_general_detailed(&t, &tp).unwrap();
    check(&c, &t, &tp, "ab", 3);
}

#[test]
fn squaring_variant_after_modified_squaring() {
    let t = builtins::modified_squaring(&word("ab")).unwrap();
    let tp = builtins::squaring_variant(&word("ab!")).unwrap();
    let c = compose_general_detailed(&t, &tp).unwrap();
    check(&c, &t, &tp, "ab", 3);
}

#[test]
fn pebbleless_second_machine_through_general_construction() {
    let t = builtins::modified_squaring(&word("bcd")).unwrap();
    let tp = builtins::iterated_reverse(&word("bcd")).unwrap();
    let c = compose_general_detailed(&t, &tp).unwrap();
    check(&c, &t, &tp, "bcd", 3);
    assert_eq!(eval(&compose(&t, &tp).unwrap(), &word("bcd")).unwrap().unwrap(), word("!bdc!cbd!"));
}
