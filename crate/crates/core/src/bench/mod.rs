//! Systems to learn: the two small worked examples, the binary counter,
//! the MQTT lighting system and random networks.

mod counter;
mod examples;
mod mqtt;
mod random;

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use counter::binary_counter;
pub use examples::{counter_with_init, mmn_ex};
pub use mqtt::mqtt_lighting;
pub use random::{is_dormant_name, rand_mmn, CompKind, RandSpec, Topology, DEFAULT_MEAN_STATES};

use crate::alphabet::{Alphabet, Symbol};
use crate::error::{Error, Result};
use crate::mmn::{Layout, Mmn, Network};
use crate::moore::DetMoore;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum BenchmarkSpec {
    MmnEx,
    CounterWithInit,
    BinaryCounter(usize),
    MqttLighting,
    Rand(RandSpec),
}

impl BenchmarkSpec {
    pub fn build(&self) -> Mmn {
        match self {
            BenchmarkSpec::MmnEx => mmn_ex(),
            BenchmarkSpec::CounterWithInit => counter_with_init(),
            BenchmarkSpec::BinaryCounter(k) => binary_counter(*k),
            BenchmarkSpec::MqttLighting => mqtt_lighting(),
            BenchmarkSpec::Rand(r) => r.build(),
        }
    }

    pub fn expected_components(&self) -> usize {
        match self {
            BenchmarkSpec::MmnEx | BenchmarkSpec::CounterWithInit => 2,
            BenchmarkSpec::BinaryCounter(k) => *k,
            BenchmarkSpec::MqttLighting => 4,
            BenchmarkSpec::Rand(r) => r.topology.components(),
        }
    }

    pub fn is_random(&self) -> bool {
        matches!(self, BenchmarkSpec::Rand(_))
    }

    /// The same benchmark with another generator seed; fixed systems are
    /// returned unchanged.
    pub fn with_seed(&self, seed: u64) -> Self {
        match self {
            BenchmarkSpec::Rand(r) => BenchmarkSpec::Rand(RandSpec { seed, ..r.clone() }),
            other => other.clone(),
        }
    }

    /// One-line description of the alphabets and sizes of a built system.
    pub fn summary(mmn: &Mmn) -> String {
        let layout = mmn.layout();
        let comps: Vec<String> = (0..mmn.num_components())
            .map(|c| {
                format!(
                    "{}:{}st/{}in/{}out",
                    mmn.component_name(c),
                    mmn.component(c).num_states(),
                    layout.input_alphabet(c).cardinality(),
                    layout.output_alphabet(c).cardinality()
                )
            })
            .collect();
        format!(
            "|in|={} |out|={} states={} [{}]",
            layout.system_inputs().cardinality(),
            layout.system_outputs().cardinality(),
            mmn.total_states(),
            comps.join(" ")
        )
    }
}

impl fmt::Display for BenchmarkSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BenchmarkSpec::MmnEx => write!(f, "mmnex"),
            BenchmarkSpec::CounterWithInit => write!(f, "cwi"),
            BenchmarkSpec::BinaryCounter(k) => write!(f, "binctr:{k}"),
            BenchmarkSpec::MqttLighting => write!(f, "mqtt"),
            BenchmarkSpec::Rand(r) => write!(f, "{r}"),
        }
    }
}

impl FromStr for BenchmarkSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownBenchmark(s.to_string());
        match s {
            "mmnex" => return Ok(BenchmarkSpec::MmnEx),
            "cwi" => return Ok(BenchmarkSpec::CounterWithInit),
            "mqtt" => return Ok(BenchmarkSpec::MqttLighting),
            _ => {}
        }
        if let Some(k) = s.strip_prefix("binctr:") {
            let k: usize = k.parse().map_err(|_| unknown())?;
            return if k >= 1 {
                Ok(BenchmarkSpec::BinaryCounter(k))
            } else {
                Err(unknown())
            };
        }
        if s.starts_with("rand:") {
            return s.parse::<RandSpec>().map(BenchmarkSpec::Rand);
        }
        Err(unknown())
    }
}

pub(crate) fn names(xs: &[&str]) -> Alphabet {
    Alphabet::flat(xs.iter().copied()).expect("benchmark alphabets are well formed")
}

pub(crate) fn sym(a: &Alphabet, name: &str) -> Symbol {
    a.parse_token(name)
        .unwrap_or_else(|| panic!("`{name}` is not in the alphabet"))
}

/// Explores the states reachable from `init` under every input and numbers
/// them in discovery order.
pub(crate) fn explore<S: Clone + Eq + Hash>(
    inputs: &Alphabet,
    outputs: &Alphabet,
    init: S,
    output: impl Fn(&S) -> Symbol,
    step: impl Fn(&S, Symbol) -> S,
) -> DetMoore {
    let mut ids: HashMap<S, u32> = HashMap::new();
    let mut states = vec![init.clone()];
    ids.insert(init, 0);
    let mut edges: Vec<Vec<u32>> = Vec::new();
    let mut k = 0;
    while k < states.len() {
        let row = inputs
            .symbols()
            .map(|i| {
                let t = step(&states[k], i);
                *ids.entry(t.clone()).or_insert_with(|| {
                    states.push(t);
                    (states.len() - 1) as u32
                })
            })
            .collect();
        edges.push(row);
        k += 1;
    }
    let outs = states.iter().map(&output).collect();
    DetMoore::from_fn(inputs.clone(), outputs.clone(), 0, outs, |q, i| {
        Some(edges[q as usize][i.index()])
    })
    .expect("explored machine is well formed")
}

/// A component machine over the layout alphabets of `c`, explored from
/// `init`. `output` and `step` work on per-edge symbols in edge order.
pub(crate) fn component<S: Clone + Eq + Hash>(
    layout: &Layout,
    c: usize,
    init: S,
    output: impl Fn(&S) -> Vec<Symbol>,
    step: impl Fn(&S, &[Symbol]) -> S,
) -> DetMoore {
    let ins = layout.input_alphabet(c);
    let outs = layout.output_alphabet(c);
    explore(
        ins,
        outs,
        init,
        |q| outs.encode(&output(q)),
        |q, i| step(q, &ins.decode(i)),
    )
}

pub(crate) fn assemble(network: Network, components: Vec<DetMoore>) -> Mmn {
    Mmn::new(network, components).expect("benchmark networks are well formed")
}
