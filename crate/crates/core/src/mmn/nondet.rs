use std::collections::{BTreeSet, HashSet, VecDeque};
use std::sync::Arc;

use super::{check_accordance, Config, Layout, Network};
use crate::alphabet::Symbol;
use crate::error::{Error, Result};
use crate::moore::{NondetMoore, StateId};

/// Default ceiling on output tuples enumerated per configuration.
pub const DEFAULT_OUTPUT_CAP: u128 = 100_000;

/// A network of nondeterministic components, typically a quotient of a
/// hypothesis network.
#[derive(Clone, Debug)]
pub struct NondetMmn {
    network: Arc<Network>,
    layout: Arc<Layout>,
    components: Vec<NondetMoore>,
}

/// What one abstract configuration can do in a single tick.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Expansion {
    /// Per component, every character it may read.
    pub inputs: Vec<BTreeSet<Symbol>>,
    /// Successor configurations over all system inputs, deduplicated, in
    /// first-seen order.
    pub successors: Vec<Config>,
}

/// Calls `f` on every tuple of the cartesian product of `sets`.
fn for_each_combo<T: Copy>(sets: &[&[T]], mut f: impl FnMut(&[T])) {
    if sets.iter().any(|s| s.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; sets.len()];
    let mut cur: Vec<T> = sets.iter().map(|s| s[0]).collect();
    loop {
        f(&cur);
        let mut k = sets.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < sets[k].len() {
                cur[k] = sets[k][idx[k]];
                break;
            }
            idx[k] = 0;
            cur[k] = sets[k][0];
        }
    }
}

fn product_size<T>(sets: &[&[T]]) -> u128 {
    sets.iter()
        .fold(1u128, |acc, s| acc.saturating_mul(s.len() as u128))
}

impl NondetMmn {
    pub(crate) fn from_parts(
        network: Arc<Network>,
        layout: Arc<Layout>,
        components: Vec<NondetMoore>,
    ) -> Self {
        NondetMmn {
            network,
            layout,
            components,
        }
    }

    pub fn new(network: Network, components: Vec<NondetMoore>) -> Result<Self> {
        let layout = Layout::new(&network).map_err(Error::InvalidNetwork)?;
        let diags = check_accordance(&network, &layout, &components, |m| {
            (m.inputs().clone(), m.outputs().clone())
        });
        if !diags.is_empty() {
            return Err(Error::InvalidNetwork(diags));
        }
        Ok(Self::from_parts(
            Arc::new(network),
            Arc::new(layout),
            components,
        ))
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn components(&self) -> &[NondetMoore] {
        &self.components
    }

    pub fn component(&self, c: usize) -> &NondetMoore {
        &self.components[c]
    }

    pub fn initial_configs(&self) -> Vec<Config> {
        let sets: Vec<&[StateId]> = self.components.iter().map(|m| m.initial_states()).collect();
        let mut out = Vec::new();
        for_each_combo(&sets, |t| out.push(t.to_vec().into_boxed_slice()));
        out
    }

    /// Number of total-output tuples at `q`.
    pub fn total_output_count(&self, q: &[StateId]) -> u128 {
        let sets: Vec<&[Symbol]> = self.output_sets(q);
        product_size(&sets)
    }

    pub fn output_sets(&self, q: &[StateId]) -> Vec<&[Symbol]> {
        self.components
            .iter()
            .zip(q)
            .map(|(m, s)| m.output_set(*s))
            .collect()
    }

    /// Every total-output tuple at `q`, in component-major symbol order.
    pub fn total_outputs(&self, q: &[StateId], cap: u128) -> Result<Vec<Vec<Symbol>>> {
        let sets = self.output_sets(q);
        let size = product_size(&sets);
        if size > cap {
            return Err(Error::CaBlowUp { size, cap });
        }
        let mut out = Vec::with_capacity(size as usize);
        for_each_combo(&sets, |t| out.push(t.to_vec()));
        Ok(out)
    }

    /// Characters component `c` may read at `q` on system input `i`: the
    /// restriction of `(i, o)` to `in(c)` for every total output `o`. Only
    /// the output sets of the components feeding `c` are enumerated.
    pub fn component_input_set(
        &self,
        q: &[StateId],
        c: usize,
        i: Symbol,
        cap: u128,
    ) -> Result<BTreeSet<Symbol>> {
        let feeders = self.layout.feeders(c);
        let sets: Vec<&[Symbol]> = feeders
            .iter()
            .map(|f| self.components[*f].output_set(q[*f]))
            .collect();
        let size = product_size(&sets);
        if size > cap {
            return Err(Error::CaBlowUp { size, cap });
        }
        let mut total = vec![Symbol(0); self.components.len()];
        let mut res = BTreeSet::new();
        for_each_combo(&sets, |t| {
            for (f, s) in feeders.iter().zip(t) {
                total[*f] = *s;
            }
            res.insert(self.layout.component_input(c, i, &total));
        });
        Ok(res)
    }

    /// Successor configurations on system input `i`: the product over
    /// components of the union of their successors over all possible inputs.
    pub fn successors(&self, q: &[StateId], i: Symbol, cap: u128) -> Result<Vec<Config>> {
        let mut per_comp: Vec<Vec<StateId>> = Vec::with_capacity(self.components.len());
        for (c, m) in self.components.iter().enumerate() {
            let mut next = BTreeSet::new();
            for inp in self.component_input_set(q, c, i, cap)? {
                next.extend(m.successors(q[c], inp).iter().copied());
            }
            if next.is_empty() {
                return Ok(Vec::new());
            }
            per_comp.push(next.into_iter().collect());
        }
        let sets: Vec<&[StateId]> = per_comp.iter().map(Vec::as_slice).collect();
        let size = product_size(&sets);
        if size > cap {
            return Err(Error::CaBlowUp { size, cap });
        }
        let mut out = Vec::with_capacity(size as usize);
        for_each_combo(&sets, |t| out.push(t.to_vec().into_boxed_slice()));
        Ok(out)
    }

    /// Possible component inputs and successors of `q` over all system inputs.
    pub fn expand(&self, q: &[StateId], cap: u128) -> Result<Expansion> {
        let mut inputs = vec![BTreeSet::new(); self.components.len()];
        let mut successors = Vec::new();
        let mut seen = HashSet::new();
        for i in self.layout.system_inputs().symbols() {
            for (c, set) in inputs.iter_mut().enumerate() {
                set.extend(self.component_input_set(q, c, i, cap)?);
            }
            for s in self.successors(q, i, cap)? {
                if seen.insert(s.clone()) {
                    successors.push(s);
                }
            }
        }
        Ok(Expansion { inputs, successors })
    }

    /// Configurations reachable within `depth` ticks (unbounded if `None`),
    /// in breadth-first order.
    pub fn reachable(&self, depth: Option<usize>, cap: u128) -> Result<Vec<Config>> {
        let mut seen: HashSet<Config> = HashSet::new();
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        for q in self.initial_configs() {
            if seen.insert(q.clone()) {
                order.push(q.clone());
                queue.push_back((q, 0usize));
            }
        }
        while let Some((q, d)) = queue.pop_front() {
            if depth.is_some_and(|limit| d >= limit) {
                continue;
            }
            for i in self.layout.system_inputs().symbols() {
                for s in self.successors(&q, i, cap)? {
                    if seen.insert(s.clone()) {
                        order.push(s.clone());
                        queue.push_back((s, d + 1));
                    }
                }
            }
        }
        Ok(order)
    }
}
