//! Operational semantics on the circular word `#u`.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use crate::machine::{Configuration, Transducer, Transition};
use crate::symbol::Symbol;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Accept(Vec<Symbol>),
    Reject,
    /// Step budget exhausted; `repeated` is set in loop-detection mode.
    Diverge { steps: usize, repeated: Option<Configuration> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub transition: usize,
    pub config: Configuration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub verdict: Verdict,
    pub trace: Option<Vec<TraceStep>>,
}

impl RunResult {
    pub fn output(&self) -> Option<&[Symbol]> {
        match &self.verdict {
            Verdict::Accept(v) => Some(v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RunError {
    #[error("two transitions ({first}, {second}) enabled at {config:?}")]
    NondeterministicChoice { config: Configuration, first: usize, second: usize },
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub budget: Option<usize>,
    pub trace: bool,
    pub detect_loop: bool,
}

/// Number of distinct configurations, plus one.
pub fn default_budget(t: &Transducer, u: &[Symbol]) -> usize {
    let n = u.len() + 1;
    let mut b = t.num_states().max(1);
    for _ in 0..=t.k {
        b = b.saturating_mul(n);
    }
    b.saturating_mul(t.k + 1).saturating_add(1)
}

/// Letter of `#u` at position `h`.
pub fn letter_at(u: &[Symbol], h: usize) -> Symbol {
    if h == 0 {
        Symbol::endmarker()
    } else {
        u[h - 1].clone()
    }
}

fn moved(h: usize, polarity: i8, n: usize) -> usize {
    match polarity {
        1 => (h + 1) % n,
        -1 => (h + n - 1) % n,
        _ => h,
    }
}

fn unmoved(h: usize, polarity: i8, n: usize) -> usize {
    moved(h, -polarity, n)
}

pub fn enabled(_m: &Transducer, t: &Transition, c: &Configuration, u: &[Symbol]) -> bool {
    c.state == t.from
        && c.head <= u.len()
        && t.letter == letter_at(u, c.head)
        && t.test.eval(&c.peb, c.head)
        && t.op.enabled(&c.peb, c.head)
}

fn fire(m: &Transducer, t: &Transition, c: &Configuration, n: usize) -> Configuration {
    let peb = t.op.apply(&c.peb, c.head).expect("enabled operation");
    Configuration::new(t.to, peb, moved(c.head, m.polarity(t.to), n))
}

pub fn step(m: &Transducer, c: &Configuration, u: &[Symbol]) -> Vec<(usize, Configuration)> {
    let n = u.len() + 1;
    m.transitions
        .iter()
        .enumerate()
        .filter(|(_, t)| enabled(m, t, c, u))
        .map(|(i, t)| (i, fire(m, t, c, n)))
        .collect()
}

/// Whether `c2` may have been produced by `t`.
pub fn reverse_enabled(m: &Transducer, t: &Transition, c2: &Configuration, u: &[Symbol]) -> bool {
    if c2.state != t.to || c2.head > u.len() {
        return false;
    }
    let n = u.len() + 1;
    let h = unmoved(c2.head, m.polarity(t.to), n);
    let back = t.op.reverse();
    if t.letter != letter_at(u, h) {
        return false;
    }
    match back.apply(&c2.peb, h) {
        Ok(peb) => t.test.eval(&peb, h),
        Err(_) => false,
    }
}

pub fn step_back(m: &Transducer, c2: &Configuration, u: &[Symbol]) -> Vec<(usize, Configuration)> {
    let n = u.len() + 1;
    m.transitions
        .iter()
        .enumerate()
        .filter(|(_, t)| reverse_enabled(m, t, c2, u))
        .map(|(i, t)| {
            let h = unmoved(c2.head, m.polarity(t.to), n);
            let peb = t.op.reverse().apply(&c2.peb, h).expect("reverse-enabled");
            (i, Configuration::new(t.from, peb, h))
        })
        .collect()
}

/// Transitions grouped by source state, with letters interned.
pub(crate) struct Index<'a> {
    m: &'a Transducer,
    by_state: Vec<Vec<usize>>,
    letter_id: Vec<usize>,
    ids: HashMap<Symbol, usize>,
}

impl<'a> Index<'a> {
    pub(crate) fn new(m: &'a Transducer) -> Self {
        let mut by_state = vec![Vec::new(); m.num_states()];
        let mut ids: HashMap<Symbol, usize> = HashMap::new();
        let mut letter_id = Vec::with_capacity(m.transitions.len());
        for (i, t) in m.transitions.iter().enumerate() {
            by_state[t.from].push(i);
            let next = ids.len();
            letter_id.push(*ids.entry(t.letter.clone()).or_insert(next));
        }
        Index { m, by_state, letter_id, ids }
    }

    pub(crate) fn tape(&self, u: &[Symbol]) -> Vec<usize> {
        (0..=u.len()).map(|h| self.ids.get(&letter_at(u, h)).copied().unwrap_or(usize::MAX)).collect()
    }

    pub(crate) fn successors(&self, c: &Configuration, tape: &[usize]) -> Vec<(usize, Configuration)> {
        let n = tape.len();
        let mut out = Vec::new();
        for &i in &self.by_state[c.state] {
            let t = &self.m.transitions[i];
            if self.letter_id[i] == tape[c.head] && t.test.eval(&c.peb, c.head) && t.op.enabled(&c.peb, c.head) {
                out.push((i, fire(self.m, t, c, n)));
            }
        }
        out
    }
}

pub fn run(m: &Transducer, u: &[Symbol]) -> Result<RunResult, RunError> {
    run_with(m, u, RunOptions::default())
}

pub fn run_with(m: &Transducer, u: &[Symbol], opts: RunOptions) -> Result<RunResult, RunError> {
    let budget = opts.budget.unwrap_or_else(|| default_budget(m, u));
    let index = Index::new(m);
    let tape = index.tape(u);
    let mut c = m.initial_config();
    let mut output = Vec::new();
    let mut trace = opts.trace.then(Vec::new);
    let mut seen: HashSet<Configuration> = HashSet::new();
    let mut steps = 0;
    loop {
        if m.is_accepting(&c) {
            return Ok(RunResult { verdict: Verdict::Accept(output), trace });
        }
        if opts.detect_loop && !seen.insert(c.clone()) {
            return Ok(RunResult { verdict: Verdict::Diverge { steps, repeated: Some(c) }, trace });
        }
        if steps >= budget {
            return Ok(RunResult { verdict: Verdict::Diverge { steps, repeated: None }, trace });
        }
        let mut next = index.successors(&c, &tape);
        if next.len() > 1 {
            return Err(RunError::NondeterministicChoice { config: c, first: next[0].0, second: next[1].0 });
        }
        let Some((i, c2)) = next.pop() else {
            return Ok(RunResult { verdict: Verdict::Reject, trace });
        };
        output.extend(m.transitions[i].output.iter().cloned());
        if let Some(tr) = trace.as_mut() {
            tr.push(TraceStep { transition: i, config: c2.clone() });
        }
        c = c2;
        steps += 1;
    }
}

/// Output of a deterministic run, `None` on reject or divergence.
pub fn eval(m: &Transducer, u: &[Symbol]) -> Result<Option<Vec<Symbol>>, RunError> {
    Ok(run(m, u)?.output().map(|v| v.to_vec()))
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Relation {
    pub outputs: BTreeSet<Vec<Symbol>>,
    pub truncated: bool,
}

const EXPANSION_CAP: usize = 200_000;

/// All outputs of accepting runs of length at most `budget`.
pub fn enumerate_runs(m: &Transducer, u: &[Symbol], budget: Option<usize>) -> Relation {
    let budget = budget.unwrap_or_else(|| default_budget(m, u));
    let index = Index::new(m);
    let tape = index.tape(u);

    let mut ids: HashMap<Configuration, usize> = HashMap::new();
    let mut configs = Vec::new();
    let mut succ: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut queue = VecDeque::new();
    ids.insert(m.initial_config(), 0);
    configs.push(m.initial_config());
    queue.push_back(0);
    while let Some(x) = queue.pop_front() {
        let mut out = Vec::new();
        for (t, c2) in index.successors(&configs[x], &tape) {
            let y = *ids.entry(c2.clone()).or_insert_with(|| {
                configs.push(c2);
                queue.push_back(configs.len() - 1);
                configs.len() - 1
            });
            out.push((t, y));
        }
        succ.push(out);
    }
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); configs.len()];
    for (x, s) in succ.iter().enumerate() {
        for &(_, y) in s {
            pred[y].push(x);
        }
    }
    let mut live = vec![false; configs.len()];
    let mut stack: Vec<usize> = (0..configs.len()).filter(|&x| m.is_accepting(&configs[x])).collect();
    for &x in &stack {
        live[x] = true;
    }
    while let Some(y) = stack.pop() {
        for &x in &pred[y] {
            if !live[x] {
                live[x] = true;
                stack.push(x);
            }
        }
    }

    let mut rel = Relation::default();
    if !live[0] {
        return rel;
    }
    struct Search<'b> {
        m: &'b Transducer,
        succ: &'b [Vec<(usize, usize)>],
        live: &'b [bool],
        configs: &'b [Configuration],
        budget: usize,
        expansions: usize,
        out: Vec<Symbol>,
    }
    fn dfs(s: &mut Search<'_>, x: usize, depth: usize, rel: &mut Relation) {
        if s.m.is_accepting(&s.configs[x]) {
            rel.outputs.insert(s.out.clone());
            return;
        }
        if depth >= s.budget || s.expansions >= EXPANSION_CAP {
            rel.truncated = true;
            return;
        }
        s.expansions += 1;
        for &(t, y) in &s.succ[x] {
            if !s.live[y] {
                continue;
            }
            let len = s.out.len();
            s.out.extend(s.m.transitions[t].output.iter().cloned());
            dfs(s, y, depth + 1, rel);
            s.out.truncate(len);
        }
    }
    let mut s = Search { m, succ: &succ, live: &live, configs: &configs, budget, expansions: 0, out: Vec::new() };
    dfs(&mut s, 0, 0, &mut rel);
    rel
}

/// Every configuration on `#u`, reachable or not.
pub fn all_configurations(m: &Transducer, u: &[Symbol]) -> Vec<Configuration> {
    let n = u.len() + 1;
    let mut stacks: Vec<Vec<usize>> = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..m.k {
        let mut next = Vec::new();
        for s in &frontier {
            for p in 0..n {
                let mut s2: Vec<usize> = s.clone();
                s2.push(p);
                next.push(s2);
            }
        }
        stacks.extend(next.iter().cloned());
        frontier = next;
    }
    let mut out = Vec::new();
    for q in 0..m.num_states() {
        for s in &stacks {
            for h in 0..n {
                out.push(Configuration::new(q, s.clone(), h));
            }
        }
    }
    out
}
