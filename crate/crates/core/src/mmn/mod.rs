//! Moore machine networks: synchronous composition of component machines.

mod network;
mod nondet;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

pub use network::{Edge, EdgeTuple, Layout, Network, Node, NodeKind, Source};
pub use nondet::{NondetMmn, DEFAULT_OUTPUT_CAP};

use crate::alphabet::{Alphabet, Symbol, Word};
use crate::error::{Error, Result};
use crate::moore::{check_word, DetMoore, Moore, StateId};
use crate::partition::{quotient_det, StatePartition};

/// Per-component state tuple, ordered by component index.
pub type Config = Box<[StateId]>;

/// Default ceiling on configurations interned by an induced machine.
pub const DEFAULT_CONFIG_BUDGET: usize = 1_000_000;

#[derive(Clone, Debug)]
pub struct Mmn {
    network: Arc<Network>,
    layout: Arc<Layout>,
    components: Vec<DetMoore>,
}

impl Mmn {
    pub fn new(network: Network, components: Vec<DetMoore>) -> Result<Self> {
        let layout = Layout::new(&network).map_err(Error::InvalidNetwork)?;
        Self::from_shared(Arc::new(network), Arc::new(layout), components)
    }

    pub fn from_shared(
        network: Arc<Network>,
        layout: Arc<Layout>,
        components: Vec<DetMoore>,
    ) -> Result<Self> {
        let diags = check_accordance(&network, &layout, &components, |m| {
            (m.inputs().clone(), m.outputs().clone())
        });
        if !diags.is_empty() {
            return Err(Error::InvalidNetwork(diags));
        }
        Ok(Mmn {
            network,
            layout,
            components,
        })
    }

    /// All structural problems of a prospective network, or an empty list.
    pub fn validate(network: &Network, components: &[DetMoore]) -> Vec<String> {
        match Layout::new(network) {
            Err(d) => d,
            Ok(layout) => check_accordance(network, &layout, components, |m| {
                (m.inputs().clone(), m.outputs().clone())
            }),
        }
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn shared_parts(&self) -> (Arc<Network>, Arc<Layout>) {
        (self.network.clone(), self.layout.clone())
    }

    pub fn components(&self) -> &[DetMoore] {
        &self.components
    }

    pub fn component(&self, c: usize) -> &DetMoore {
        &self.components[c]
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn component_name(&self, c: usize) -> &str {
        &self.network.nodes()[self.layout.component_node(c)].name
    }

    pub fn component_by_name(&self, name: &str) -> Option<usize> {
        self.network
            .node_id(name)
            .and_then(|v| self.layout.component_of_node(v))
    }

    /// Σ^in, Σ^out and the total output alphabet.
    pub fn system_alphabets(&self) -> (Alphabet, Alphabet, Alphabet) {
        (
            self.layout.system_inputs().clone(),
            self.layout.system_outputs().clone(),
            self.layout.total_output_alphabet(),
        )
    }

    pub fn total_states(&self) -> usize {
        self.components.iter().map(DetMoore::num_states).sum()
    }

    pub fn total_transitions(&self) -> usize {
        self.components.iter().map(DetMoore::transition_count).sum()
    }

    pub fn initial_config(&self) -> Config {
        self.components
            .iter()
            .map(DetMoore::initial_state)
            .collect()
    }

    pub fn total_output(&self, q: &[StateId]) -> Vec<Symbol> {
        self.components
            .iter()
            .zip(q)
            .map(|(m, s)| m.state_output(*s))
            .collect()
    }

    /// Characters each component reads at configuration `q` on system input `i`.
    pub fn component_inputs(&self, q: &[StateId], i: Symbol) -> Vec<Symbol> {
        let total = self.total_output(q);
        (0..self.components.len())
            .map(|c| self.layout.component_input(c, i, &total))
            .collect()
    }

    pub fn system_transition(&self, q: &[StateId], i: Symbol) -> Option<Config> {
        let total = self.total_output(q);
        let mut next = Vec::with_capacity(q.len());
        for (c, m) in self.components.iter().enumerate() {
            next.push(m.next(q[c], self.layout.component_input(c, i, &total))?);
        }
        Some(next.into_boxed_slice())
    }

    /// Total outputs tick by tick, truncated at the first undefined
    /// component transition.
    pub fn simulate(&self, w: &[Symbol]) -> Result<Vec<Vec<Symbol>>> {
        check_word(self.layout.system_inputs(), w)?;
        let mut q = self.initial_config();
        let mut ticks = vec![self.total_output(&q)];
        for &i in w {
            match self.system_transition(&q, i) {
                Some(n) => {
                    q = n;
                    ticks.push(self.total_output(&q));
                }
                None => break,
            }
        }
        Ok(ticks)
    }

    /// Per-edge character sequence of a simulation, `None` for system
    /// input edges.
    pub fn edge_trace(&self, ticks: &[Vec<Symbol>], e: usize) -> Option<Word> {
        match self.layout.edge_source(e) {
            Source::System(_) => None,
            Source::Component { .. } => Some(
                ticks
                    .iter()
                    .map(|t| self.layout.edge_value(e, None, t).unwrap())
                    .collect(),
            ),
        }
    }

    pub fn induced(&self) -> InducedMoore<'_> {
        InducedMoore::new(self)
    }

    pub fn quotient(&self, partitions: &[StatePartition]) -> NondetMmn {
        assert_eq!(partitions.len(), self.components.len());
        let comps = self
            .components
            .iter()
            .zip(partitions)
            .map(|(m, p)| quotient_det(m, p))
            .collect();
        NondetMmn::from_parts(self.network.clone(), self.layout.clone(), comps)
    }

    pub fn to_nondet(&self) -> NondetMmn {
        let comps = self.components.iter().map(DetMoore::to_nondet).collect();
        NondetMmn::from_parts(self.network.clone(), self.layout.clone(), comps)
    }
}

pub(crate) fn check_accordance<M>(
    network: &Network,
    layout: &Layout,
    components: &[M],
    alphabets: impl Fn(&M) -> (Alphabet, Alphabet),
) -> Vec<String> {
    let mut diags = Vec::new();
    if components.len() != layout.num_components() {
        diags.push(format!(
            "expected {} component machines, got {}",
            layout.num_components(),
            components.len()
        ));
        return diags;
    }
    for (c, m) in components.iter().enumerate() {
        let name = &network.nodes()[layout.component_node(c)].name;
        let (i, o) = alphabets(m);
        if &i != layout.input_alphabet(c) {
            diags.push(format!(
                "component `{name}` input alphabet does not match its incoming edges"
            ));
        }
        if &o != layout.output_alphabet(c) {
            diags.push(format!(
                "component `{name}` output alphabet does not match its outgoing edges"
            ));
        }
    }
    diags
}

impl Moore for Mmn {
    type State = Config;

    fn inputs(&self) -> &Alphabet {
        self.layout.system_inputs()
    }

    fn outputs(&self) -> &Alphabet {
        self.layout.system_outputs()
    }

    fn initial(&self) -> Config {
        self.initial_config()
    }

    fn output(&self, q: &Config) -> Symbol {
        self.layout.system_output(&self.total_output(q))
    }

    fn step(&self, q: &Config, i: Symbol) -> Option<Config> {
        self.system_transition(q, i)
    }
}

#[derive(Default)]
struct Interner {
    configs: Vec<Config>,
    ids: HashMap<Config, StateId>,
    succ: HashMap<(StateId, Symbol), Option<StateId>>,
}

impl Interner {
    fn intern(&mut self, q: Config) -> StateId {
        if let Some(id) = self.ids.get(&q) {
            return *id;
        }
        let id = self.configs.len() as StateId;
        self.configs.push(q.clone());
        self.ids.insert(q, id);
        id
    }
}

/// The system-level machine of a network, with configurations interned on
/// demand. Safe to share between threads.
pub struct InducedMoore<'a> {
    mmn: &'a Mmn,
    memo: Mutex<Interner>,
}

impl<'a> InducedMoore<'a> {
    pub fn new(mmn: &'a Mmn) -> Self {
        let mut interner = Interner::default();
        interner.intern(mmn.initial_config());
        InducedMoore {
            mmn,
            memo: Mutex::new(interner),
        }
    }

    pub fn config(&self, id: StateId) -> Config {
        self.memo.lock().unwrap().configs[id as usize].clone()
    }

    pub fn interned(&self) -> usize {
        self.memo.lock().unwrap().configs.len()
    }

    /// Eagerly builds the reachable part as a [`DetMoore`], numbering
    /// configurations in breadth-first order. Refuses once more than
    /// `budget` configurations are reachable.
    pub fn materialize(&self, budget: usize) -> Result<DetMoore> {
        let order = crate::moore::reachable_within(self, budget)?;
        let index: HashMap<StateId, StateId> = order
            .iter()
            .enumerate()
            .map(|(k, q)| (*q, k as StateId))
            .collect();
        let outs = order.iter().map(|q| self.output(q)).collect();
        DetMoore::from_fn(
            self.inputs().clone(),
            self.outputs().clone(),
            0,
            outs,
            |q, i| self.step(&order[q as usize], i).map(|t| index[&t]),
        )
    }
}

impl Moore for InducedMoore<'_> {
    type State = StateId;

    fn inputs(&self) -> &Alphabet {
        self.mmn.layout.system_inputs()
    }

    fn outputs(&self) -> &Alphabet {
        self.mmn.layout.system_outputs()
    }

    fn initial(&self) -> StateId {
        0
    }

    fn output(&self, q: &StateId) -> Symbol {
        let cfg = self.config(*q);
        self.mmn.output(&cfg)
    }

    fn step(&self, q: &StateId, i: Symbol) -> Option<StateId> {
        let mut memo = self.memo.lock().unwrap();
        if let Some(hit) = memo.succ.get(&(*q, i)) {
            return *hit;
        }
        let cfg = memo.configs[*q as usize].clone();
        let next = self.mmn.system_transition(&cfg, i).map(|n| memo.intern(n));
        memo.succ.insert((*q, i), next);
        next
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// A one-component network whose machine toggles on input 1.
    fn toggle() -> Mmn {
        let bits = Alphabet::flat(["0", "1"]).unwrap();
        let mut n = Network::new();
        let i = n.add_input("i");
        let o = n.add_output("o");
        let c = n.add_component("c");
        n.add_edge(i, c, bits.clone());
        n.add_edge(c, o, bits.clone());
        let l = Layout::new(&n).unwrap();
        let m = DetMoore::from_fn(
            l.input_alphabet(0).clone(),
            l.output_alphabet(0).clone(),
            0,
            vec![Symbol(0), Symbol(1)],
            |q, s| Some(q ^ s.0),
        )
        .unwrap();
        Mmn::new(n, vec![m]).unwrap()
    }

    #[test]
    fn single_component_is_the_component() {
        let m = toggle();
        let w = [Symbol(1), Symbol(0), Symbol(1)];
        assert_eq!(m.semantics(&w).unwrap(), m.component(0).trace(&w));
        let ticks = m.simulate(&w).unwrap();
        assert_eq!(m.edge_trace(&ticks, 1).unwrap(), m.trace(&w));
        assert_eq!(m.edge_trace(&ticks, 0), None);
    }

    #[test]
    fn materialize_respects_budget() {
        let m = toggle();
        let ind = m.induced();
        assert_eq!(ind.materialize(10).unwrap().num_states(), 2);
        assert!(matches!(
            m.induced().materialize(1),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn mismatched_component_is_named() {
        let m = toggle();
        let wrong = DetMoore::from_fn(
            Alphabet::flat(["0", "1"]).unwrap(),
            m.layout().output_alphabet(0).clone(),
            0,
            vec![Symbol(0)],
            |_, _| Some(0),
        )
        .unwrap();
        let diags = Mmn::validate(m.network(), &[wrong]);
        assert_eq!(diags.len(), 1);
        assert!(diags[0].contains("`c` input alphabet"));
    }
}
