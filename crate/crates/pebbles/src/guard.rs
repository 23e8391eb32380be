//! Guards: conjunctions of head/pebble equality atoms.

use std::fmt;

use crate::op::PebbleOp;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AtomKind {
    /// `h = p_i`
    HeadEq(usize),
    /// `p_i = p_j`, stored with `i <= j`
    PebEq(usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub kind: AtomKind,
    pub negated: bool,
}

impl Atom {
    pub fn head(i: usize) -> Self {
        Atom { kind: AtomKind::HeadEq(i), negated: false }
    }

    pub fn peb(i: usize, j: usize) -> Self {
        Atom { kind: AtomKind::PebEq(i.min(j), i.max(j)), negated: false }
    }

    /// `p_i = p_i`, i.e. pebble `i` is on the stack.
    pub fn dropped(i: usize) -> Self {
        Atom::peb(i, i)
    }

    pub fn not(self) -> Self {
        Atom { negated: !self.negated, ..self }
    }

    pub fn max_index(&self) -> usize {
        match self.kind {
            AtomKind::HeadEq(i) => i,
            AtomKind::PebEq(_, j) => j,
        }
    }

    pub fn min_index(&self) -> usize {
        match self.kind {
            AtomKind::HeadEq(i) => i,
            AtomKind::PebEq(i, _) => i,
        }
    }

    pub fn is_equality(&self) -> bool {
        matches!(self.kind, AtomKind::PebEq(..))
    }

    pub fn eval(&self, peb: &[usize], h: usize) -> bool {
        let v = match self.kind {
            AtomKind::HeadEq(i) => i >= 1 && i <= peb.len() && peb[i - 1] == h,
            AtomKind::PebEq(i, j) => i >= 1 && j <= peb.len() && peb[i - 1] == peb[j - 1],
        };
        v != self.negated
    }

    fn map_indices(&self, f: impl Fn(usize) -> usize) -> Atom {
        let kind = match self.kind {
            AtomKind::HeadEq(i) => AtomKind::HeadEq(f(i)),
            AtomKind::PebEq(i, j) => {
                let (a, b) = (f(i), f(j));
                AtomKind::PebEq(a.min(b), a.max(b))
            }
        };
        Atom { kind, negated: self.negated }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "!")?;
        }
        match self.kind {
            AtomKind::HeadEq(i) => write!(f, "h=p{i}"),
            AtomKind::PebEq(i, j) => write!(f, "p{i}=p{j}"),
        }
    }
}

/// Result of simplifying a single literal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lit {
    True,
    False,
    Atom(Atom),
}

impl Lit {
    pub fn not(self) -> Lit {
        match self {
            Lit::True => Lit::False,
            Lit::False => Lit::True,
            Lit::Atom(a) => Lit::Atom(a.not()),
        }
    }
}

/// A conjunction of atoms, or the constant `false`. Kept sorted and deduplicated.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Test {
    False,
    Conj(Vec<Atom>),
}

impl Default for Test {
    fn default() -> Self {
        Test::tt()
    }
}

impl Test {
    pub fn tt() -> Self {
        Test::Conj(Vec::new())
    }

    pub fn ff() -> Self {
        Test::False
    }

    pub fn atom(a: Atom) -> Self {
        Test::Conj(vec![a])
    }

    pub fn from_atoms(atoms: impl IntoIterator<Item = Atom>) -> Self {
        let mut v: Vec<Atom> = atoms.into_iter().collect();
        v.sort();
        v.dedup();
        Test::Conj(v)
    }

    /// Builds a conjunction from literals; any `False` makes the whole test false.
    pub fn from_lits(lits: impl IntoIterator<Item = Lit>) -> Self {
        let mut atoms = Vec::new();
        for l in lits {
            match l {
                Lit::True => {}
                Lit::False => return Test::False,
                Lit::Atom(a) => atoms.push(a),
            }
        }
        Test::from_atoms(atoms)
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Test::False)
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Test::Conj(v) if v.is_empty())
    }

    pub fn atoms(&self) -> &[Atom] {
        match self {
            Test::False => &[],
            Test::Conj(v) => v,
        }
    }

    pub fn and(&self, other: &Test) -> Test {
        match (self, other) {
            (Test::Conj(a), Test::Conj(b)) => Test::from_atoms(a.iter().chain(b).copied()),
            _ => Test::False,
        }
    }

    pub fn and_atom(&self, a: Atom) -> Test {
        self.and(&Test::atom(a))
    }

    pub fn eval(&self, peb: &[usize], h: usize) -> bool {
        match self {
            Test::False => false,
            Test::Conj(v) => v.iter().all(|a| a.eval(peb, h)),
        }
    }

    pub fn max_index(&self) -> usize {
        self.atoms().iter().map(|a| a.max_index()).max().unwrap_or(0)
    }

    pub fn has_equality(&self) -> bool {
        self.atoms().iter().any(|a| a.is_equality() && !matches!(a.kind, AtomKind::PebEq(i, j) if i == j))
    }

    /// Applies `f` to every literal and conjoins the results.
    pub fn map_lits(&self, f: impl Fn(Atom) -> Lit) -> Test {
        match self {
            Test::False => Test::False,
            Test::Conj(v) => Test::from_lits(v.iter().map(|&a| f(a))),
        }
    }
}

impl fmt::Display for Test {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Test::False => write!(f, "false"),
            Test::Conj(v) if v.is_empty() => write!(f, "true"),
            Test::Conj(v) => {
                let parts: Vec<String> = v.iter().map(|a| a.to_string()).collect();
                write!(f, "{}", parts.join(" & "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IndexError {
    #[error("pebble index {index} out of range 1..={k}")]
    OutOfRange { index: usize, k: usize },
}

/// The enabling test of an operation. `p_0 = p_0` is read as true and `p_{k+1}` never exists.
pub fn test_of_op(op: PebbleOp, k: usize) -> Result<Test, IndexError> {
    if let Some(i) = op.index() {
        if i == 0 || i > k {
            return Err(IndexError::OutOfRange { index: i, k });
        }
    }
    Ok(test_of_op_unchecked(op, k))
}

pub(crate) fn test_of_op_unchecked(op: PebbleOp, k: usize) -> Test {
    match op {
        PebbleOp::Nop => Test::tt(),
        PebbleOp::Drop(i) => {
            let mut v = vec![Atom::dropped(i).not()];
            if i > 1 {
                v.push(Atom::dropped(i - 1));
            }
            Test::from_atoms(v)
        }
        PebbleOp::Lift(i) => {
            let mut v = vec![Atom::head(i)];
            if i < k {
                v.push(Atom::dropped(i + 1).not());
            }
            Test::from_atoms(v)
        }
    }
}

/// Adds `d` to every pebble index.
pub fn shift_test(t: &Test, d: usize) -> Test {
    match t {
        Test::False => Test::False,
        Test::Conj(v) => Test::from_atoms(v.iter().map(|a| a.map_indices(|i| i + d))),
    }
}

/// Checks a shifted test against a pebble budget.
pub fn shift_test_checked(t: &Test, d: usize, k: usize) -> Result<Test, IndexError> {
    let s = shift_test(t, d);
    let m = s.max_index();
    if m > k {
        return Err(IndexError::OutOfRange { index: m, k });
    }
    Ok(s)
}

struct Classes {
    parent: Vec<usize>,
}

impl Classes {
    fn new(n: usize) -> Self {
        Classes { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = x;
        while self.parent[c] != r {
            let n = self.parent[c];
            self.parent[c] = r;
            c = n;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Whether some word and configuration with at most `k` pebbles satisfy `t`.
///
/// Guesses the stack size, merges positively equated terms, and rejects when a
/// negative atom joins two terms of one class. Node 0 stands for the head.
pub fn satisfiable(t: &Test, k: usize) -> bool {
    let atoms = match t {
        Test::False => return false,
        Test::Conj(v) => v,
    };
    'size: for s in 0..=k {
        let mut uf = Classes::new(s + 1);
        for a in atoms.iter().filter(|a| !a.negated) {
            if a.min_index() == 0 || a.max_index() > s {
                continue 'size;
            }
            match a.kind {
                AtomKind::HeadEq(i) => uf.union(0, i),
                AtomKind::PebEq(i, j) => uf.union(i, j),
            }
        }
        for a in atoms.iter().filter(|a| a.negated) {
            if a.min_index() == 0 || a.max_index() > s {
                continue;
            }
            let same = match a.kind {
                AtomKind::HeadEq(i) => uf.find(0) == uf.find(i),
                AtomKind::PebEq(i, j) => uf.find(i) == uf.find(j),
            };
            if same {
                continue 'size;
            }
        }
        return true;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enabling_tests() {
        assert_eq!(test_of_op(PebbleOp::Nop, 2).unwrap(), Test::tt());
        assert_eq!(test_of_op(PebbleOp::Drop(1), 2).unwrap(), Test::atom(Atom::dropped(1).not()));
        assert_eq!(test_of_op(PebbleOp::Lift(2), 2).unwrap(), Test::atom(Atom::head(2)));
        assert_eq!(
            test_of_op(PebbleOp::Lift(1), 2).unwrap(),
            Test::from_atoms([Atom::head(1), Atom::dropped(2).not()])
        );
        assert!(test_of_op(PebbleOp::Drop(3), 2).is_err());
    }

    #[test]
    fn eval_examples() {
        assert!(Test::atom(Atom::head(1)).eval(&[3], 3));
        assert!(!Test::atom(Atom::dropped(1)).eval(&[], 0));
        assert!(Test::atom(Atom::head(2).not()).eval(&[1], 1));
    }

    #[test]
    fn shifting() {
        let t = Test::from_atoms([Atom::head(1), Atom::peb(1, 2).not()]);
        assert_eq!(shift_test(&t, 2), Test::from_atoms([Atom::head(3), Atom::peb(3, 4).not()]));
        assert_eq!(shift_test(&Test::tt(), 5), Test::tt());
        assert!(shift_test_checked(&t, 2, 3).is_err());
    }

    #[test]
    fn satisfiability_examples() {
        assert!(!satisfiable(&Test::from_atoms([Atom::head(1), Atom::dropped(1).not()]), 1));
        let t = test_of_op(PebbleOp::Lift(1), 2).unwrap().and_atom(Atom::head(1).not());
        assert!(!satisfiable(&t, 2));
        let t = Test::from_atoms([Atom::peb(1, 2), Atom::head(1).not(), Atom::head(2)]);
        assert!(!satisfiable(&t, 2));
        assert!(satisfiable(&Test::from_atoms([Atom::head(1).not(), Atom::dropped(1)]), 1));
        assert!(!satisfiable(&Test::atom(Atom::dropped(2)), 1));
        assert!(!satisfiable(&Test::ff(), 3));
    }
}
