#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use mmnlearn_core::{Alphabet, DetMoore, Moore, StateId, Symbol};
use proptest::prelude::*;

pub fn alphabet(prefix: &str, n: usize) -> Alphabet {
    Alphabet::flat((0..n).map(|k| format!("{prefix}{k}"))).unwrap()
}

/// Raw description of a random machine: per state an output and, per
/// input, a target (`None` for an undefined transition).
#[derive(Clone, Debug)]
pub struct RawMoore {
    pub inputs: usize,
    pub outputs: usize,
    pub outs: Vec<u32>,
    pub next: Vec<Vec<Option<u32>>>,
}

impl RawMoore {
    pub fn build(&self) -> DetMoore {
        DetMoore::from_fn(
            alphabet("i", self.inputs),
            alphabet("o", self.outputs),
            0,
            self.outs.iter().map(|o| Symbol(*o)).collect(),
            |q, i| self.next[q as usize][i.index()],
        )
        .unwrap()
    }
}

/// Machines with up to `max_states` states over fixed alphabet sizes;
/// `partial` allows undefined transitions.
pub fn raw_moore(
    max_states: usize,
    inputs: usize,
    outputs: usize,
    partial: bool,
) -> impl Strategy<Value = RawMoore> {
    (1..=max_states).prop_flat_map(move |n| {
        let target = if partial {
            prop_oneof![4 => (0..n as u32).prop_map(Some), 1 => Just(None)].boxed()
        } else {
            (0..n as u32).prop_map(Some).boxed()
        };
        (
            proptest::collection::vec(0..outputs as u32, n),
            proptest::collection::vec(proptest::collection::vec(target, inputs), n),
        )
            .prop_map(move |(outs, next)| RawMoore {
                inputs,
                outputs,
                outs,
                next,
            })
    })
}

pub fn random_word(len: usize, alphabet: usize) -> impl Strategy<Value = Vec<Symbol>> {
    proptest::collection::vec((0..alphabet as u32).prop_map(Symbol), 0..=len)
}

/// Length of the shortest word on which the traces of `a` and `b` differ,
/// found by sweeping the set of state pairs reachable by words of each
/// length in turn, up to `max_len`. An undefined run is its own state.
pub fn brute_force_distance(a: &DetMoore, b: &DetMoore, max_len: usize) -> Option<usize> {
    type Pair = (Option<StateId>, Option<StateId>);
    let differs = |p: &Pair| match p {
        (Some(x), Some(y)) => a.output(x) != b.output(y),
        (None, None) => false,
        _ => true,
    };
    let mut level: BTreeSet<Pair> = [(Some(a.initial()), Some(b.initial()))].into();
    for len in 0..=max_len {
        if level.iter().any(differs) {
            return Some(len);
        }
        let mut next = BTreeSet::new();
        for &(x, y) in &level {
            if x.is_none() && y.is_none() {
                continue;
            }
            for i in a.inputs().symbols() {
                let step = |m: &DetMoore, q: Option<StateId>| q.and_then(|q| m.next(q, i));
                next.insert((step(a, x), step(b, y)));
            }
        }
        if next == level {
            return None;
        }
        level = next;
    }
    None
}

/// Every word over `k` letters of length exactly `len`.
pub fn all_words(k: usize, len: usize) -> Vec<Vec<Symbol>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..k as u32).map(move |s| {
                    let mut v = w.clone();
                    v.push(Symbol(s));
                    v
                })
            })
            .collect();
    }
    out
}

/// Breadth-first reachable states, independent of the library's search.
pub fn reachable(m: &DetMoore) -> BTreeSet<StateId> {
    let mut seen = BTreeSet::from([m.initial_state()]);
    let mut queue = VecDeque::from([m.initial_state()]);
    while let Some(q) = queue.pop_front() {
        for i in m.inputs().symbols() {
            if let Some(t) = m.next(q, i) {
                if seen.insert(t) {
                    queue.push_back(t);
                }
            }
        }
    }
    seen
}
