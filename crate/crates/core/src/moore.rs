//! Deterministic (possibly partial) and nondeterministic Moore machines.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::hash::Hash;

use crate::alphabet::{Alphabet, Symbol, Word};
use crate::error::{Error, Result};

pub type StateId = u32;

const UNDEFINED: u32 = u32::MAX;
const DENSE_LIMIT: usize = 1 << 22;

/// Anything that behaves like a deterministic, possibly partial, Moore machine.
pub trait Moore {
    type State: Clone + Eq + Hash;

    fn inputs(&self) -> &Alphabet;
    fn outputs(&self) -> &Alphabet;
    fn initial(&self) -> Self::State;
    fn output(&self, q: &Self::State) -> Symbol;
    fn step(&self, q: &Self::State, i: Symbol) -> Option<Self::State>;

    /// Output word from `q`, truncated after the longest defined prefix of `w`.
    /// Symbols are assumed to belong to the input alphabet.
    fn trace_from(&self, q: &Self::State, w: &[Symbol]) -> Word {
        let mut out = Vec::with_capacity(w.len() + 1);
        let mut cur = q.clone();
        out.push(self.output(&cur));
        for &i in w {
            match self.step(&cur, i) {
                Some(next) => {
                    out.push(self.output(&next));
                    cur = next;
                }
                None => break,
            }
        }
        out
    }

    fn trace(&self, w: &[Symbol]) -> Word {
        self.trace_from(&self.initial(), w)
    }

    /// Checked semantics from the initial state.
    fn semantics(&self, w: &[Symbol]) -> Result<Word> {
        check_word(self.inputs(), w)?;
        Ok(self.trace(w))
    }
}

pub fn check_word(alphabet: &Alphabet, w: &[Symbol]) -> Result<()> {
    match w.iter().find(|s| !alphabet.contains(**s)) {
        Some(s) => Err(Error::InvalidSymbol {
            symbol: s.0,
            alphabet: format!("{alphabet:?}"),
        }),
        None => Ok(()),
    }
}

/// Breadth-first reachable states, optionally limited to words of length `<= depth`.
pub fn reachable_from<M: Moore>(m: &M, depth: Option<usize>) -> Vec<M::State> {
    let start = m.initial();
    let mut seen: HashSet<M::State> = HashSet::from([start.clone()]);
    let mut order = vec![start.clone()];
    let mut queue = VecDeque::from([(start, 0usize)]);
    while let Some((q, d)) = queue.pop_front() {
        if depth.is_some_and(|limit| d >= limit) {
            continue;
        }
        for i in m.inputs().symbols() {
            if let Some(next) = m.step(&q, i) {
                if seen.insert(next.clone()) {
                    order.push(next.clone());
                    queue.push_back((next, d + 1));
                }
            }
        }
    }
    order
}

/// Breadth-first reachable states, failing once more than `budget` are found.
pub fn reachable_within<M: Moore>(m: &M, budget: usize) -> Result<Vec<M::State>> {
    let start = m.initial();
    let mut seen: HashSet<M::State> = HashSet::from([start.clone()]);
    let mut order = vec![start.clone()];
    let mut queue = VecDeque::from([start]);
    while let Some(q) = queue.pop_front() {
        for i in m.inputs().symbols() {
            if let Some(next) = m.step(&q, i) {
                if seen.insert(next.clone()) {
                    if order.len() >= budget {
                        return Err(Error::BudgetExceeded(budget));
                    }
                    order.push(next.clone());
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(order)
}

#[derive(Clone, Debug)]
enum Delta {
    Dense { width: usize, next: Vec<u32> },
    Sparse(Vec<BTreeMap<Symbol, StateId>>),
}

#[derive(Clone, Debug)]
pub struct DetMoore {
    inputs: Alphabet,
    outputs: Alphabet,
    initial: StateId,
    out: Vec<Symbol>,
    delta: Delta,
}

impl DetMoore {
    pub fn builder(inputs: Alphabet, outputs: Alphabet) -> DetMooreBuilder {
        DetMooreBuilder {
            inputs,
            outputs,
            initial: 0,
            out: Vec::new(),
            edges: Vec::new(),
        }
    }

    /// Builds a machine with states `0..outs.len()` and transitions given by
    /// `next`, which may leave some undefined.
    pub fn from_fn(
        inputs: Alphabet,
        outputs: Alphabet,
        initial: StateId,
        outs: Vec<Symbol>,
        mut next: impl FnMut(StateId, Symbol) -> Option<StateId>,
    ) -> Result<Self> {
        let mut b = Self::builder(inputs.clone(), outputs);
        for &o in &outs {
            b.add_state(o);
        }
        b.set_initial(initial);
        for q in 0..outs.len() as u32 {
            for i in inputs.symbols() {
                if let Some(t) = next(q, i) {
                    b.add_transition(q, i, t);
                }
            }
        }
        b.build()
    }

    pub fn num_states(&self) -> usize {
        self.out.len()
    }

    pub fn initial_state(&self) -> StateId {
        self.initial
    }

    pub fn state_output(&self, q: StateId) -> Symbol {
        self.out[q as usize]
    }

    pub fn next(&self, q: StateId, i: Symbol) -> Option<StateId> {
        match &self.delta {
            Delta::Dense { width, next } => {
                let t = next[q as usize * width + i.index()];
                (t != UNDEFINED).then_some(t)
            }
            Delta::Sparse(rows) => rows[q as usize].get(&i).copied(),
        }
    }

    /// Defined transitions out of `q`, in input-symbol order.
    pub fn transitions_from(&self, q: StateId) -> Vec<(Symbol, StateId)> {
        match &self.delta {
            Delta::Dense { width, next } => next[q as usize * width..(q as usize + 1) * width]
                .iter()
                .enumerate()
                .filter(|(_, t)| **t != UNDEFINED)
                .map(|(i, t)| (Symbol::from(i), *t))
                .collect(),
            Delta::Sparse(rows) => rows[q as usize].iter().map(|(i, t)| (*i, *t)).collect(),
        }
    }

    /// All defined transitions in (source, input) order.
    pub fn transitions(&self) -> Vec<(StateId, Symbol, StateId)> {
        (0..self.num_states() as u32)
            .flat_map(|q| {
                self.transitions_from(q)
                    .into_iter()
                    .map(move |(i, t)| (q, i, t))
            })
            .collect()
    }

    pub fn transition_count(&self) -> usize {
        match &self.delta {
            Delta::Dense { next, .. } => next.iter().filter(|t| **t != UNDEFINED).count(),
            Delta::Sparse(rows) => rows.iter().map(BTreeMap::len).sum(),
        }
    }

    pub fn is_complete(&self) -> bool {
        self.transition_count() as u128 == self.num_states() as u128 * self.inputs.cardinality()
    }

    fn check_state(&self, q: StateId) -> Result<()> {
        if (q as usize) < self.num_states() {
            Ok(())
        } else {
            Err(Error::InvalidState(q))
        }
    }

    /// State reached from `q` on `w`, or `None` if some transition is undefined.
    pub fn run(&self, q: StateId, w: &[Symbol]) -> Result<Option<StateId>> {
        self.check_state(q)?;
        check_word(&self.inputs, w)?;
        let mut cur = q;
        for &i in w {
            match self.next(cur, i) {
                Some(t) => cur = t,
                None => return Ok(None),
            }
        }
        Ok(Some(cur))
    }

    /// Output word from `q` on `w`, truncated at the first undefined transition.
    pub fn semantics_from(&self, q: StateId, w: &[Symbol]) -> Result<Word> {
        self.check_state(q)?;
        check_word(&self.inputs, w)?;
        Ok(self.trace_from(&q, w))
    }

    pub fn reachable(&self, depth: Option<usize>) -> BTreeSet<StateId> {
        reachable_from(self, depth).into_iter().collect()
    }

    /// The same machine viewed as nondeterministic, with singleton sets.
    pub fn to_nondet(&self) -> NondetMoore {
        NondetMoore {
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            initial: vec![self.initial],
            out: self.out.iter().map(|o| vec![*o]).collect(),
            delta: (0..self.num_states() as u32)
                .map(|q| {
                    self.transitions_from(q)
                        .into_iter()
                        .map(|(i, t)| (i, vec![t]))
                        .collect()
                })
                .collect(),
        }
    }

    /// Restriction to the states reachable from the initial state, renumbered
    /// in breadth-first order.
    pub fn trim(&self) -> DetMoore {
        let order = reachable_from(self, None);
        let mut index = vec![UNDEFINED; self.num_states()];
        for (k, q) in order.iter().enumerate() {
            index[*q as usize] = k as u32;
        }
        let outs = order.iter().map(|q| self.state_output(*q)).collect();
        DetMoore::from_fn(
            self.inputs.clone(),
            self.outputs.clone(),
            0,
            outs,
            |q, i| self.next(order[q as usize], i).map(|t| index[t as usize]),
        )
        .expect("trimmed machine is well formed")
    }
}

impl Moore for DetMoore {
    type State = StateId;

    fn inputs(&self) -> &Alphabet {
        &self.inputs
    }

    fn outputs(&self) -> &Alphabet {
        &self.outputs
    }

    fn initial(&self) -> StateId {
        self.initial
    }

    fn output(&self, q: &StateId) -> Symbol {
        self.out[*q as usize]
    }

    fn step(&self, q: &StateId, i: Symbol) -> Option<StateId> {
        self.next(*q, i)
    }
}

impl PartialEq for DetMoore {
    fn eq(&self, other: &Self) -> bool {
        self.inputs == other.inputs
            && self.outputs == other.outputs
            && self.initial == other.initial
            && self.out == other.out
            && self.transitions() == other.transitions()
    }
}

impl Eq for DetMoore {}

pub struct DetMooreBuilder {
    inputs: Alphabet,
    outputs: Alphabet,
    initial: StateId,
    out: Vec<Symbol>,
    edges: Vec<(StateId, Symbol, StateId)>,
}

impl DetMooreBuilder {
    pub fn add_state(&mut self, output: Symbol) -> StateId {
        self.out.push(output);
        (self.out.len() - 1) as StateId
    }

    pub fn set_initial(&mut self, q: StateId) -> &mut Self {
        self.initial = q;
        self
    }

    pub fn add_transition(&mut self, from: StateId, input: Symbol, to: StateId) -> &mut Self {
        self.edges.push((from, input, to));
        self
    }

    pub fn build(self) -> Result<DetMoore> {
        let n = self.out.len();
        if n == 0 {
            return Err(Error::NoStates);
        }
        if self.initial as usize >= n {
            return Err(Error::InvalidState(self.initial));
        }
        if let Some(o) = self.out.iter().find(|o| !self.outputs.contains(**o)) {
            return Err(Error::InvalidSymbol {
                symbol: o.0,
                alphabet: format!("{:?}", self.outputs),
            });
        }
        if !self.inputs.is_indexable() {
            return Err(Error::AlphabetMismatch(
                "input alphabet too large for a machine".into(),
            ));
        }
        let width = self.inputs.len();
        let mut delta = if n.saturating_mul(width) <= DENSE_LIMIT {
            Delta::Dense {
                width,
                next: vec![UNDEFINED; n * width],
            }
        } else {
            Delta::Sparse(vec![BTreeMap::new(); n])
        };
        for (q, i, t) in self.edges {
            if q as usize >= n {
                return Err(Error::InvalidState(q));
            }
            if t as usize >= n {
                return Err(Error::InvalidState(t));
            }
            if !self.inputs.contains(i) {
                return Err(Error::InvalidSymbol {
                    symbol: i.0,
                    alphabet: format!("{:?}", self.inputs),
                });
            }
            let fresh = match &mut delta {
                Delta::Dense { width, next } => {
                    let slot = &mut next[q as usize * *width + i.index()];
                    let fresh = *slot == UNDEFINED;
                    *slot = t;
                    fresh
                }
                Delta::Sparse(rows) => rows[q as usize].insert(i, t).is_none(),
            };
            if !fresh {
                return Err(Error::DuplicateTransition {
                    state: q,
                    input: self.inputs.name(i),
                });
            }
        }
        Ok(DetMoore {
            inputs: self.inputs,
            outputs: self.outputs,
            initial: self.initial,
            out: self.out,
            delta,
        })
    }
}

/// A nondeterministic Moore machine with a set of initial states, set-valued
/// transitions and nonempty output sets. State sets are kept sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NondetMoore {
    inputs: Alphabet,
    outputs: Alphabet,
    initial: Vec<StateId>,
    out: Vec<Vec<Symbol>>,
    delta: Vec<BTreeMap<Symbol, Vec<StateId>>>,
}

impl NondetMoore {
    pub fn new(
        inputs: Alphabet,
        outputs: Alphabet,
        initial: impl IntoIterator<Item = StateId>,
        out: Vec<Vec<Symbol>>,
        transitions: impl IntoIterator<Item = (StateId, Symbol, StateId)>,
    ) -> Result<Self> {
        let n = out.len();
        if n == 0 {
            return Err(Error::NoStates);
        }
        let initial: BTreeSet<StateId> = initial.into_iter().collect();
        if let Some(q) = initial.iter().find(|q| **q as usize >= n) {
            return Err(Error::InvalidState(*q));
        }
        let mut out_sets = Vec::with_capacity(n);
        for set in out {
            let set: BTreeSet<Symbol> = set.into_iter().collect();
            if set.is_empty() {
                return Err(Error::AlphabetMismatch("empty output set".into()));
            }
            if let Some(o) = set.iter().find(|o| !outputs.contains(**o)) {
                return Err(Error::InvalidSymbol {
                    symbol: o.0,
                    alphabet: format!("{outputs:?}"),
                });
            }
            out_sets.push(set.into_iter().collect());
        }
        let mut delta: Vec<BTreeMap<Symbol, BTreeSet<StateId>>> = vec![BTreeMap::new(); n];
        for (q, i, t) in transitions {
            if q as usize >= n {
                return Err(Error::InvalidState(q));
            }
            if t as usize >= n {
                return Err(Error::InvalidState(t));
            }
            if !inputs.contains(i) {
                return Err(Error::InvalidSymbol {
                    symbol: i.0,
                    alphabet: format!("{inputs:?}"),
                });
            }
            delta[q as usize].entry(i).or_default().insert(t);
        }
        Ok(NondetMoore {
            inputs,
            outputs,
            initial: initial.into_iter().collect(),
            out: out_sets,
            delta: delta
                .into_iter()
                .map(|row| {
                    row.into_iter()
                        .map(|(i, ts)| (i, ts.into_iter().collect()))
                        .collect()
                })
                .collect(),
        })
    }

    pub fn inputs(&self) -> &Alphabet {
        &self.inputs
    }

    pub fn outputs(&self) -> &Alphabet {
        &self.outputs
    }

    pub fn num_states(&self) -> usize {
        self.out.len()
    }

    pub fn initial_states(&self) -> &[StateId] {
        &self.initial
    }

    pub fn output_set(&self, q: StateId) -> &[Symbol] {
        &self.out[q as usize]
    }

    pub fn successors(&self, q: StateId, i: Symbol) -> &[StateId] {
        self.delta[q as usize]
            .get(&i)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Inputs with at least one successor from `q`.
    pub fn enabled_inputs(&self, q: StateId) -> impl Iterator<Item = Symbol> + '_ {
        self.delta[q as usize].keys().copied()
    }

    pub fn post(&self, states: &[StateId], i: Symbol) -> Vec<StateId> {
        let set: BTreeSet<StateId> = states
            .iter()
            .flat_map(|q| self.successors(*q, i).iter().copied())
            .collect();
        set.into_iter().collect()
    }

    pub fn outputs_of(&self, states: &[StateId]) -> Vec<Symbol> {
        let set: BTreeSet<Symbol> = states
            .iter()
            .flat_map(|q| self.output_set(*q).iter().copied())
            .collect();
        set.into_iter().collect()
    }

    /// Output-set word of length `|w| + 1` from the state set `start`.
    pub fn semantics_from(&self, start: &[StateId], w: &[Symbol]) -> Result<Vec<Vec<Symbol>>> {
        check_word(&self.inputs, w)?;
        if let Some(q) = start.iter().find(|q| **q as usize >= self.num_states()) {
            return Err(Error::InvalidState(*q));
        }
        let mut cur: Vec<StateId> = start.to_vec();
        let mut res = Vec::with_capacity(w.len() + 1);
        res.push(self.outputs_of(&cur));
        for &i in w {
            cur = self.post(&cur, i);
            res.push(self.outputs_of(&cur));
        }
        Ok(res)
    }

    pub fn semantics(&self, w: &[Symbol]) -> Result<Vec<Vec<Symbol>>> {
        self.semantics_from(&self.initial, w)
    }

    pub fn reachable(&self, depth: Option<usize>) -> BTreeSet<StateId> {
        let mut seen: BTreeSet<StateId> = self.initial.iter().copied().collect();
        let mut queue: VecDeque<(StateId, usize)> = self.initial.iter().map(|q| (*q, 0)).collect();
        while let Some((q, d)) = queue.pop_front() {
            if depth.is_some_and(|limit| d >= limit) {
                continue;
            }
            for targets in self.delta[q as usize].values() {
                for &t in targets {
                    if seen.insert(t) {
                        queue.push_back((t, d + 1));
                    }
                }
            }
        }
        seen
    }
}
