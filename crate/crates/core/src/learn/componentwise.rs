//! System-level learners: monolithic, naive componentwise, and contextual
//! componentwise with context analysis over the hypothesis network.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use log::{debug, info};
use serde::{Deserialize, Serialize};

use super::cache::{Memo, QueryCache};
use super::lstar::{analyze_cex_lstar, lstar, Teacher};
use super::table::{Hypothesis, ObservationTable};
use crate::alphabet::{Symbol, Word};
use crate::error::{Error, Result};
use crate::mmn::{Config, Layout, Mmn, Network, DEFAULT_OUTPUT_CAP};
use crate::moore::{DetMoore, StateId};
use crate::oracle::Sul;
use crate::partition::{partition_eq_k, partition_uni, StatePartition};

/// How hypothesis components are abstracted before context analysis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Abstraction {
    /// No quotienting.
    Eq,
    /// States equivalent on words up to the given length are merged.
    EqK(usize),
    /// Each component collapses to one state.
    Uni,
}

/// Depth bound of the reachability search over abstract configurations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DepthBound {
    DInf,
    D(usize),
    /// Sum of the current component state counts.
    DSum,
    /// Maximum of the current component state counts.
    DMax,
    /// Minimum of the current component state counts.
    DMin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CaParams {
    pub abstraction: Abstraction,
    pub bound: DepthBound,
}

impl CaParams {
    pub const fn new(abstraction: Abstraction, bound: DepthBound) -> Self {
        CaParams { abstraction, bound }
    }

    /// Only unbounded search guarantees that every reachable input is proposed.
    pub fn is_sound(&self) -> bool {
        self.bound == DepthBound::DInf
    }
}

impl Default for CaParams {
    fn default() -> Self {
        CaParams::new(Abstraction::Eq, DepthBound::DInf)
    }
}

impl fmt::Display for Abstraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Abstraction::Eq => write!(f, "eq"),
            Abstraction::EqK(k) => write!(f, "eqk:{k}"),
            Abstraction::Uni => write!(f, "uni"),
        }
    }
}

impl fmt::Display for DepthBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DepthBound::DInf => write!(f, "dinf"),
            DepthBound::D(d) => write!(f, "d:{d}"),
            DepthBound::DSum => write!(f, "dsum"),
            DepthBound::DMax => write!(f, "dmax"),
            DepthBound::DMin => write!(f, "dmin"),
        }
    }
}

impl fmt::Display for CaParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.abstraction, self.bound)
    }
}

impl FromStr for Abstraction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "eq" => Ok(Abstraction::Eq),
            "uni" => Ok(Abstraction::Uni),
            _ => s
                .strip_prefix("eqk:")
                .and_then(|k| k.parse().ok())
                .map(Abstraction::EqK)
                .ok_or_else(|| format!("unknown abstraction `{s}` (eq, eqk:<k>, uni)")),
        }
    }
}

impl FromStr for DepthBound {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "dinf" => Ok(DepthBound::DInf),
            "dsum" => Ok(DepthBound::DSum),
            "dmax" => Ok(DepthBound::DMax),
            "dmin" => Ok(DepthBound::DMin),
            _ => s
                .strip_prefix("d:")
                .and_then(|k| k.parse().ok())
                .map(DepthBound::D)
                .ok_or_else(|| {
                    format!("unknown depth bound `{s}` (dinf, d:<n>, dsum, dmax, dmin)")
                }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    Mnl,
    Cwl,
    Ccwl,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Mnl => "mnl",
            Algorithm::Cwl => "cwl",
            Algorithm::Ccwl => "ccwl",
        })
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "mnl" => Ok(Algorithm::Mnl),
            "cwl" => Ok(Algorithm::Cwl),
            "ccwl" => Ok(Algorithm::Ccwl),
            _ => Err(format!("unknown algorithm `{s}` (mnl, cwl, ccwl)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LearnOptions {
    pub memo: Memo,
    /// Ceiling on output tuples enumerated per abstract configuration.
    pub output_cap: u128,
}

impl Default for LearnOptions {
    fn default() -> Self {
        LearnOptions {
            memo: Memo::Exact,
            output_cap: DEFAULT_OUTPUT_CAP,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Learned {
    Monolithic(DetMoore),
    Network(Mmn),
}

/// Outcome of a learning run.
#[derive(Clone, Debug)]
pub struct LearnedSystem {
    pub algorithm: Algorithm,
    pub params: Option<CaParams>,
    pub learned: Learned,
    /// One line per learner event; see [`ccwl`] for the format.
    pub events: Vec<String>,
}

impl LearnedSystem {
    pub fn states(&self) -> usize {
        match &self.learned {
            Learned::Monolithic(m) => m.num_states(),
            Learned::Network(n) => n.total_states(),
        }
    }

    pub fn transitions(&self) -> usize {
        match &self.learned {
            Learned::Monolithic(m) => m.transition_count(),
            Learned::Network(n) => n.total_transitions(),
        }
    }

    /// Per-component state counts; a single entry for monolithic results.
    pub fn component_states(&self) -> Vec<usize> {
        match &self.learned {
            Learned::Monolithic(m) => vec![m.num_states()],
            Learned::Network(n) => n.components().iter().map(DetMoore::num_states).collect(),
        }
    }

    /// Exact check against the hidden system; not charged.
    pub fn validate(&self, sul: &Sul) -> Result<bool> {
        Ok(match &self.learned {
            Learned::Monolithic(m) => sul.validate_exact(m)?.is_equivalent(),
            Learned::Network(n) => sul.validate_exact(n)?.is_equivalent(),
        })
    }
}

struct SystemTeacher<'a> {
    sul: &'a mut Sul,
    cache: QueryCache,
}

impl Teacher for SystemTeacher<'_> {
    fn output(&mut self, w: &[Symbol]) -> Result<Symbol> {
        let sul = &mut *self.sul;
        self.cache.answer(w, |w| sul.oq(w))
    }

    fn trace(&mut self, w: &[Symbol]) -> Result<Word> {
        let sul = &mut *self.sul;
        self.cache.trace(w, |w| sul.oq(w))
    }

    fn equivalence(&mut self, h: &DetMoore) -> Result<Option<Word>> {
        self.sul.eq(h)
    }
}

struct ComponentTeacher<'a> {
    sul: &'a mut Sul,
    c: usize,
    cache: &'a mut QueryCache,
}

impl Teacher for ComponentTeacher<'_> {
    fn output(&mut self, w: &[Symbol]) -> Result<Symbol> {
        let (sul, c) = (&mut *self.sul, self.c);
        self.cache.answer(w, |w| sul.oq_c(c, w))
    }

    fn trace(&mut self, w: &[Symbol]) -> Result<Word> {
        let (sul, c) = (&mut *self.sul, self.c);
        self.cache.trace(w, |w| sul.oq_c(c, w))
    }

    fn equivalence(&mut self, h: &DetMoore) -> Result<Option<Word>> {
        self.sul.eq_c(self.c, h)
    }
}

/// Monolithic learning over the system alphabets, ignoring the network.
pub fn mnl(sul: &mut Sul, opts: &LearnOptions) -> Result<LearnedSystem> {
    let inputs = sul.layout().system_inputs().clone();
    let outputs = sul.layout().system_outputs().clone();
    let mut teacher = SystemTeacher {
        sul,
        cache: QueryCache::new(opts.memo),
    };
    let run = lstar(inputs, outputs, &mut teacher)?;
    Ok(LearnedSystem {
        algorithm: Algorithm::Mnl,
        params: None,
        learned: Learned::Monolithic(run.hypothesis.machine),
        events: vec![format!("eq-rounds {}", run.rounds)],
    })
}

/// Learns every component in isolation with component-level oracles.
pub fn cwl(sul: &mut Sul, opts: &LearnOptions) -> Result<LearnedSystem> {
    let (network, layout) = sul.structure();
    let mut comps = Vec::with_capacity(layout.num_components());
    let mut events = Vec::new();
    for c in 0..layout.num_components() {
        let mut cache = QueryCache::new(opts.memo);
        let mut teacher = ComponentTeacher {
            sul: &mut *sul,
            c,
            cache: &mut cache,
        };
        let run = lstar(
            layout.input_alphabet(c).clone(),
            layout.output_alphabet(c).clone(),
            &mut teacher,
        )?;
        events.push(format!("component {c} eq-rounds {}", run.rounds));
        comps.push(run.hypothesis.machine);
    }
    Ok(LearnedSystem {
        algorithm: Algorithm::Cwl,
        params: None,
        learned: Learned::Network(Mmn::from_shared(network, layout, comps)?),
        events,
    })
}

/// Per-component learning state of the contextual learner.
pub struct ComponentTables {
    pub tables: Vec<ObservationTable>,
    pub caches: Vec<QueryCache>,
}

impl ComponentTables {
    pub fn new(layout: &Layout, memo: Memo) -> Self {
        ComponentTables {
            tables: (0..layout.num_components())
                .map(|c| {
                    ObservationTable::new(
                        layout.input_alphabet(c).clone(),
                        layout.output_alphabet(c).clone(),
                    )
                })
                .collect(),
            caches: (0..layout.num_components())
                .map(|_| QueryCache::new(memo))
                .collect(),
        }
    }

    pub fn close_all(&mut self, sul: &mut Sul) -> Result<()> {
        for (c, (t, cache)) in self.tables.iter_mut().zip(&mut self.caches).enumerate() {
            t.close(&mut |w| cache.answer(w, |w| sul.oq_c(c, w)))?;
        }
        Ok(())
    }

    /// Distinct rows per component, i.e. current hypothesis sizes.
    pub fn sizes(&self) -> Vec<usize> {
        self.tables
            .iter()
            .map(|t| t.short_prefixes().len())
            .collect()
    }
}

/// The hypothesis network of closed tables.
pub struct HypothesisNetwork {
    pub mmn: Mmn,
    pub access: Vec<Vec<Word>>,
}

pub fn assemble(
    network: Arc<Network>,
    layout: Arc<Layout>,
    tables: &[ObservationTable],
) -> Result<HypothesisNetwork> {
    let hyps: Vec<Hypothesis> = tables.iter().map(ObservationTable::hypothesis).collect();
    let access = hyps.iter().map(|h| h.access.clone()).collect();
    let comps = hyps.into_iter().map(|h| h.machine).collect();
    Ok(HypothesisNetwork {
        mmn: Mmn::from_shared(network, layout, comps)?,
        access,
    })
}

/// Search depth for the current table sizes.
pub fn resolve_depth(params: &CaParams, sizes: &[usize]) -> Option<usize> {
    match params.bound {
        DepthBound::DInf => None,
        DepthBound::D(d) => Some(d),
        DepthBound::DSum => Some(sizes.iter().sum()),
        DepthBound::DMax => Some(sizes.iter().copied().max().unwrap_or(0)),
        DepthBound::DMin => Some(sizes.iter().copied().min().unwrap_or(0)),
    }
}

pub fn abstraction_partition(m: &DetMoore, a: Abstraction) -> StatePartition {
    match a {
        Abstraction::Eq => StatePartition::identity(m.num_states()),
        Abstraction::EqK(k) => partition_eq_k(m, Some(k)),
        Abstraction::Uni => partition_uni(m),
    }
}

/// Context analysis: every `(component, hypothesis state, input)` such
/// that the input may reach the component while its abstract state
/// contains that state, over abstract configurations within `depth` ticks.
pub fn one_ext_er(
    hyp: &Mmn,
    abstraction: Abstraction,
    depth: Option<usize>,
    cap: u128,
) -> Result<BTreeSet<(usize, StateId, Symbol)>> {
    let parts: Vec<StatePartition> = hyp
        .components()
        .iter()
        .map(|m| abstraction_partition(m, abstraction))
        .collect();
    let quotient = hyp.quotient(&parts);
    let mut seen: HashSet<Config> = HashSet::new();
    let mut queue: VecDeque<(Config, usize)> = VecDeque::new();
    for q in quotient.initial_configs() {
        if seen.insert(q.clone()) {
            queue.push_back((q, 0));
        }
    }
    let mut inputs: BTreeMap<(usize, u32), BTreeSet<Symbol>> = BTreeMap::new();
    while let Some((q, d)) = queue.pop_front() {
        let exp = quotient.expand(&q, cap)?;
        for (c, set) in exp.inputs.into_iter().enumerate() {
            inputs.entry((c, q[c])).or_default().extend(set);
        }
        if depth.is_some_and(|limit| d >= limit) {
            continue;
        }
        for s in exp.successors {
            if seen.insert(s.clone()) {
                queue.push_back((s, d + 1));
            }
        }
    }
    let mut out = BTreeSet::new();
    for ((c, block), set) in inputs {
        for &state in parts[c].block(block) {
            for &i in &set {
                out.insert((c, state, i));
            }
        }
    }
    Ok(out)
}

/// Which branch a counterexample analysis took.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CexBranch {
    /// A component lacked a transition; its extension was added to R.
    Missing { component: usize, prefix: Word },
    /// A component produced a wrong output; a suffix was added to its E.
    Blame { component: usize, suffix: Word },
}

/// Counterexample analysis for the hypothesis network. A missing
/// component transition along `w` extends that component's R; otherwise a
/// total output query locates the earliest tick where the hypothesis
/// diverges, the smallest diverging component is blamed, and its local
/// counterexample is analysed as in L*.
pub fn analyze_cex_c(
    hyp: &HypothesisNetwork,
    w: &[Symbol],
    sul: &mut Sul,
    state: &mut ComponentTables,
) -> Result<CexBranch> {
    let mmn = &hyp.mmn;
    let layout = mmn.layout();
    let mut q = mmn.initial_config();
    for &i in w {
        let total = mmn.total_output(&q);
        let mut next = Vec::with_capacity(q.len());
        for (c, m) in mmn.components().iter().enumerate() {
            let inp = layout.component_input(c, i, &total);
            match m.next(q[c], inp) {
                Some(t) => next.push(t),
                None => {
                    let mut prefix = hyp.access[c][q[c] as usize].clone();
                    prefix.push(inp);
                    state.tables[c].add_long(prefix.clone());
                    return Ok(CexBranch::Missing {
                        component: c,
                        prefix,
                    });
                }
            }
        }
        q = next.into_boxed_slice();
    }
    let truth = sul.oq_bar(w)?;
    let predicted = mmn.simulate(w)?;
    let Some(t) = (0..truth.len()).find(|t| truth[*t] != predicted[*t]) else {
        return Err(Error::SpuriousCounterexample(
            "total outputs agree along the counterexample".into(),
        ));
    };
    let local = |c: usize| -> (Word, Word) {
        let inputs: Word = (0..truth.len() - 1)
            .map(|k| layout.component_input(c, w[k], &truth[k]))
            .collect();
        let outputs: Word = truth.iter().map(|tick| tick[c]).collect();
        (inputs, outputs)
    };
    for c in 0..mmn.num_components() {
        let (inputs, outputs) = local(c);
        state.caches[c].record(&inputs, &outputs);
    }
    let c = (0..mmn.num_components())
        .find(|c| truth[t][*c] != predicted[t][*c])
        .expect("diverging tick has a diverging component");
    let (inputs, outputs) = local(c);
    let component_hyp = Hypothesis {
        machine: mmn.component(c).clone(),
        access: hyp.access[c].clone(),
    };
    let cache = &mut state.caches[c];
    let suffix = analyze_cex_lstar(
        &mut state.tables[c],
        &component_hyp,
        &inputs[..t],
        &outputs[..=t],
        &mut |u| cache.answer(u, |u| sul.oq_c(c, u)),
    )?;
    Ok(CexBranch::Blame {
        component: c,
        suffix,
    })
}

/// Contextual componentwise learning. Event lines:
/// `ext <round> <count>` after context analysis proposes `count` new
/// prefixes, `eq <round> pass` or `eq <round> cex <length>`, then
/// `missing <component> <prefix length>` or `blame <component> <suffix length>`.
pub fn ccwl(sul: &mut Sul, params: CaParams, opts: &LearnOptions) -> Result<LearnedSystem> {
    let (network, layout) = sul.structure();
    let mut state = ComponentTables::new(&layout, opts.memo);
    let mut events = Vec::new();
    let mut round = 0usize;
    loop {
        sul.check_deadline()?;
        round += 1;
        state.close_all(sul)?;
        let hyp = assemble(network.clone(), layout.clone(), &state.tables)?;
        let depth = resolve_depth(&params, &state.sizes());
        let proposed = one_ext_er(&hyp.mmn, params.abstraction, depth, opts.output_cap)?;
        let mut added = 0;
        for (c, s, i) in proposed {
            let mut u = hyp.access[c][s as usize].clone();
            u.push(i);
            if state.tables[c].add_long(u) {
                added += 1;
            }
        }
        if added > 0 {
            debug!("round {round}: context analysis added {added} prefixes");
            events.push(format!("ext {round} {added}"));
            continue;
        }
        match sul.eq(&hyp.mmn)? {
            None => {
                events.push(format!("eq {round} pass"));
                info!("ccwl{params} finished after {round} rounds");
                return Ok(LearnedSystem {
                    algorithm: Algorithm::Ccwl,
                    params: Some(params),
                    learned: Learned::Network(hyp.mmn),
                    events,
                });
            }
            Some(w) => {
                events.push(format!("eq {round} cex {}", w.len()));
                match analyze_cex_c(&hyp, &w, sul, &mut state)? {
                    CexBranch::Missing { component, prefix } => {
                        events.push(format!("missing {component} {}", prefix.len()))
                    }
                    CexBranch::Blame { component, suffix } => {
                        events.push(format!("blame {component} {}", suffix.len()))
                    }
                }
            }
        }
    }
}

/// Runs the selected algorithm.
pub fn learn(
    sul: &mut Sul,
    algorithm: Algorithm,
    params: CaParams,
    opts: &LearnOptions,
) -> Result<LearnedSystem> {
    match algorithm {
        Algorithm::Mnl => mnl(sul, opts),
        Algorithm::Cwl => cwl(sul, opts),
        Algorithm::Ccwl => ccwl(sul, params, opts),
    }
}
