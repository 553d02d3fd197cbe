use std::fmt;
use std::str::FromStr;

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{assemble, component};
use crate::alphabet::{Alphabet, Symbol};
use crate::error::Error;
use crate::mmn::{Layout, Mmn, Network, NodeKind};
use crate::moore::DetMoore;

pub const DEFAULT_MEAN_STATES: f64 = 10.0;
const MIN_STATES: usize = 2;
const EDGE_SIZES: std::ops::RangeInclusive<usize> = 2..=5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Topology {
    /// `k` components in a row; system input at the first, output at the last.
    Path(usize),
    /// A hub connected both ways to `k` leaves; system input and output at the hub.
    Star(usize),
    /// `k` components, all ordered pairs connected; system input and output
    /// at the first.
    Compl(usize),
}

impl Topology {
    pub fn components(&self) -> usize {
        match *self {
            Topology::Path(k) | Topology::Compl(k) => k,
            Topology::Star(k) => k + 1,
        }
    }

    fn network(&self) -> Network {
        let mut net = Network::new();
        let input = net.add_input("in");
        let comps: Vec<usize> = (1..=self.components())
            .map(|j| net.add_component(format!("c{j}")))
            .collect();
        let output = net.add_output("out");
        // edge alphabets are filled in later
        let blank = Alphabet::flat(["_"]).expect("valid");
        net.add_edge(input, comps[0], blank.clone());
        match *self {
            Topology::Path(_) => {
                for w in comps.windows(2) {
                    net.add_edge(w[0], w[1], blank.clone());
                }
                net.add_edge(*comps.last().unwrap(), output, blank);
            }
            Topology::Star(_) => {
                for &leaf in &comps[1..] {
                    net.add_edge(comps[0], leaf, blank.clone());
                    net.add_edge(leaf, comps[0], blank.clone());
                }
                net.add_edge(comps[0], output, blank);
            }
            Topology::Compl(_) => {
                for &a in &comps {
                    for &b in &comps {
                        if a != b {
                            net.add_edge(a, b, blank.clone());
                        }
                    }
                }
                net.add_edge(comps[0], output, blank);
            }
        }
        net
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Topology::Path(k) => write!(f, "path{k}"),
            Topology::Star(k) => write!(f, "star{k}"),
            Topology::Compl(k) => write!(f, "compl{k}"),
        }
    }
}

impl FromStr for Topology {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let split = s.find(|c: char| c.is_ascii_digit()).ok_or("missing size")?;
        let k: usize = s[split..]
            .parse()
            .map_err(|_| format!("bad size in `{s}`"))?;
        if k == 0 {
            return Err("size must be positive".into());
        }
        match &s[..split] {
            "path" => Ok(Topology::Path(k)),
            "star" => Ok(Topology::Star(k)),
            "compl" => Ok(Topology::Compl(k)),
            other => Err(format!("unknown topology `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CompKind {
    /// Plain random machines.
    Lean,
    /// Random machines paired with a second machine that the composed
    /// system never activates.
    Rich,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandSpec {
    pub topology: Topology,
    pub comp: CompKind,
    pub seed: u64,
    /// Mean of the normal distribution of per-machine state counts.
    pub mean: f64,
}

impl RandSpec {
    pub fn build(&self) -> Mmn {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rand_mmn(self.topology, self.comp, self.mean, &mut rng)
    }
}

impl fmt::Display for RandSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let comp = match self.comp {
            CompKind::Lean => "lean",
            CompKind::Rich => "rich",
        };
        write!(f, "rand:{}:{comp}:seed={}", self.topology, self.seed)?;
        if self.mean != DEFAULT_MEAN_STATES {
            write!(f, ":mean={}", self.mean)?;
        }
        Ok(())
    }
}

impl FromStr for RandSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let unknown = || Error::UnknownBenchmark(s.to_string());
        let mut parts = s.split(':');
        if parts.next() != Some("rand") {
            return Err(unknown());
        }
        let topology = parts
            .next()
            .ok_or_else(unknown)?
            .parse()
            .map_err(|_| unknown())?;
        let comp = match parts.next() {
            Some("lean") => CompKind::Lean,
            Some("rich") => CompKind::Rich,
            _ => return Err(unknown()),
        };
        let seed = parts
            .next()
            .and_then(|p| p.strip_prefix("seed="))
            .and_then(|v| v.parse().ok())
            .ok_or_else(unknown)?;
        let mut mean = DEFAULT_MEAN_STATES;
        if let Some(p) = parts.next() {
            mean = p
                .strip_prefix("mean=")
                .and_then(|v| v.parse::<f64>().ok())
                .filter(|m| m.is_finite() && *m > 0.0)
                .ok_or_else(unknown)?;
        }
        if parts.next().is_some() {
            return Err(unknown());
        }
        Ok(RandSpec {
            topology,
            comp,
            seed,
            mean,
        })
    }
}

fn sample_states(normal: &Normal<f64>, rng: &mut impl Rng) -> usize {
    let x = normal.sample(rng);
    let n = (x + 0.5).floor();
    if n < MIN_STATES as f64 {
        warn!("sampled state count {x:.2} clamped to {MIN_STATES}");
        MIN_STATES
    } else {
        n as usize
    }
}

/// A random complete machine over abstract input indices `0..inputs`, with
/// one output index per output edge.
struct RawMachine {
    outs: Vec<Vec<u32>>,
    delta: Vec<Vec<u32>>,
}

impl RawMachine {
    fn generate(n: usize, inputs: usize, out_sizes: &[usize], rng: &mut impl Rng) -> Self {
        let outs = (0..n)
            .map(|_| {
                out_sizes
                    .iter()
                    .map(|m| rng.random_range(0..*m) as u32)
                    .collect()
            })
            .collect();
        let delta = (0..n)
            .map(|_| (0..inputs).map(|_| rng.random_range(0..n) as u32).collect())
            .collect();
        RawMachine { outs, delta }
    }
}

/// Mixed-radix index of `digits`, first digit most significant.
fn index_of(digits: impl Iterator<Item = (usize, usize)>) -> usize {
    digits.fold(0, |acc, (d, radix)| acc * radix + d)
}

/// Rich components: states of the active and the dormant machine plus a
/// flag naming the machine that moved last.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct Interleaved {
    active: u32,
    dormant: u32,
    dormant_last: bool,
}

/// A random network. Lean edges carry `2..=5` symbols `c0, c1, ...`. Rich
/// edges other than system inputs carry an active half `c*` and a dormant
/// half `b*`, each of `2..=5` symbols.
pub fn rand_mmn(topology: Topology, comp: CompKind, mean: f64, rng: &mut impl Rng) -> Mmn {
    let normal = Normal::new(mean, 1.0).expect("unit deviation is valid");
    let blank = topology.network();
    let rich = comp == CompKind::Rich;
    // (active, dormant) sizes per edge
    let halves: Vec<(usize, usize)> = blank
        .edges()
        .iter()
        .map(|e| {
            let active = rng.random_range(EDGE_SIZES);
            let system_input = blank.nodes()[e.src].kind == NodeKind::Input;
            let dormant = if rich && !system_input {
                rng.random_range(EDGE_SIZES)
            } else {
                0
            };
            (active, dormant)
        })
        .collect();
    let mut net = Network::new();
    for n in blank.nodes() {
        net.add_node(n.name.clone(), n.kind);
    }
    for (e, &(a, d)) in blank.edges().iter().zip(&halves) {
        let mut names: Vec<String> = (0..a).map(|k| format!("c{k}")).collect();
        names.extend((0..d).map(|k| format!("b{k}")));
        net.add_edge(e.src, e.dst, Alphabet::flat(names).expect("valid"));
    }
    let layout = Layout::new(&net).expect("generated network is valid");

    let comps = (0..layout.num_components())
        .map(|c| {
            let in_edges = layout.component_in_edges(c);
            let out_edges = layout.component_out_edges(c);
            let active_in: Vec<usize> = in_edges.iter().map(|e| halves[*e].0).collect();
            let active_out: Vec<usize> = out_edges.iter().map(|e| halves[*e].0).collect();
            let active = RawMachine::generate(
                sample_states(&normal, rng),
                active_in.iter().product(),
                &active_out,
                rng,
            );
            if !rich {
                let ins = layout.input_alphabet(c);
                let outs = layout.output_alphabet(c);
                let to_symbols = |o: &[u32]| o.iter().map(|x| Symbol(*x)).collect::<Vec<_>>();
                let outputs = active
                    .outs
                    .iter()
                    .map(|o| outs.encode(&to_symbols(o)))
                    .collect();
                return DetMoore::from_fn(ins.clone(), outs.clone(), 0, outputs, |q, i| {
                    Some(active.delta[q as usize][i.index()])
                })
                .expect("generated machine is well formed");
            }
            // the dormant machine reads only inter-component edges
            let dormant_edges: Vec<usize> = (0..in_edges.len())
                .filter(|j| halves[in_edges[*j]].1 > 0)
                .collect();
            let dormant_in: Vec<usize> = dormant_edges
                .iter()
                .map(|j| halves[in_edges[*j]].1)
                .collect();
            let dormant_out: Vec<usize> = out_edges.iter().map(|e| halves[*e].1).collect();
            let dormant = RawMachine::generate(
                sample_states(&normal, rng),
                dormant_in.iter().product(),
                &dormant_out,
                rng,
            );
            component(
                &layout,
                c,
                Interleaved {
                    active: 0,
                    dormant: 0,
                    dormant_last: false,
                },
                |q| {
                    if q.dormant_last {
                        dormant.outs[q.dormant as usize]
                            .iter()
                            .zip(&active_out)
                            .map(|(o, a)| Symbol(*o + *a as u32))
                            .collect()
                    } else {
                        active.outs[q.active as usize]
                            .iter()
                            .map(|o| Symbol(*o))
                            .collect()
                    }
                },
                |q, i| {
                    let is_active = |j: usize| i[j].index() < active_in[j];
                    if dormant_edges.iter().all(|j| is_active(*j)) {
                        let k = index_of((0..i.len()).map(|j| (i[j].index(), active_in[j])));
                        Interleaved {
                            active: active.delta[q.active as usize][k],
                            dormant_last: false,
                            ..*q
                        }
                    } else if !dormant_edges.is_empty()
                        && dormant_edges.iter().all(|j| !is_active(*j))
                    {
                        let k = index_of(
                            dormant_edges
                                .iter()
                                .zip(&dormant_in)
                                .map(|(j, r)| (i[*j].index() - active_in[*j], *r)),
                        );
                        Interleaved {
                            dormant: dormant.delta[q.dormant as usize][k],
                            dormant_last: true,
                            ..*q
                        }
                    } else {
                        *q
                    }
                },
            )
        })
        .collect();
    assemble(net, comps)
}

/// All symbols named as dormant-half characters.
pub fn is_dormant_name(name: &str) -> bool {
    name.starts_with('b')
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moore::Moore;

    fn spec(s: &str) -> RandSpec {
        s.parse().unwrap()
    }

    #[test]
    fn same_seed_same_network() {
        let a = spec("rand:star2:lean:seed=5").build();
        let b = spec("rand:star2:lean:seed=5").build();
        assert_eq!(a.components(), b.components());
        assert_eq!(a.network(), b.network());
        let c = spec("rand:star2:lean:seed=6").build();
        assert_ne!(a.components(), c.components());
    }

    #[test]
    fn lean_components_are_complete_and_sized() {
        for t in ["path3", "star2", "compl3"] {
            let m = spec(&format!("rand:{t}:lean:seed=1")).build();
            for c in m.components() {
                assert!(c.is_complete());
                assert!(c.num_states() >= MIN_STATES);
            }
            for e in m.network().edges() {
                assert!(EDGE_SIZES.contains(&e.alphabet.len()));
            }
        }
    }

    #[test]
    fn topologies_place_system_edges() {
        let m = spec("rand:path3:lean:seed=2").build();
        let l = m.layout();
        assert_eq!(l.component_in_edges(0).len(), 1);
        assert_eq!(l.component_out_edges(2).len(), 1);
        let star = spec("rand:star3:lean:seed=2").build();
        assert_eq!(star.num_components(), 4);
        assert_eq!(star.layout().component_in_edges(0).len(), 4);
        let compl = spec("rand:compl3:lean:seed=2").build();
        assert_eq!(compl.network().edges().len(), 1 + 6 + 1);
    }

    #[test]
    fn rich_system_never_emits_dormant_symbols() {
        let m = spec("rand:path3:rich:seed=4:mean=5").build();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..50 {
            let w: Vec<Symbol> = (0..40)
                .map(|_| Symbol::from(rng.random_range(0..m.inputs().len())))
                .collect();
            for tick in m.simulate(&w).unwrap() {
                for e in 0..m.network().edges().len() {
                    if let Some(v) = m.layout().edge_value(e, None, &tick) {
                        let name = m.network().edges()[e].alphabet.name(v);
                        assert!(!is_dormant_name(&name), "{name}");
                    }
                }
            }
        }
        // in isolation the dormant half is observable
        let c2 = m.component(1);
        let trace_names: Vec<String> = {
            let dormant_input = c2
                .inputs()
                .symbols()
                .find(|i| is_dormant_name(&c2.inputs().name(*i)))
                .unwrap();
            c2.trace(&[dormant_input])
                .iter()
                .map(|o| c2.outputs().name(*o))
                .collect()
        };
        assert!(trace_names[1].contains('b'));
    }
}
