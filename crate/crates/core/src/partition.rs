//! State partitions and quotient machines.

use std::collections::{BTreeSet, HashMap};
use std::hash::Hash;

use crate::alphabet::Symbol;
use crate::moore::{DetMoore, NondetMoore, StateId};

/// A partition of `0..n` into nonempty blocks, numbered by smallest member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StatePartition {
    block_of: Vec<u32>,
    blocks: Vec<Vec<StateId>>,
}

impl StatePartition {
    /// Groups states with equal labels.
    pub fn from_labels<L: Hash + Eq>(labels: &[L]) -> Self {
        let mut ids: HashMap<&L, u32> = HashMap::new();
        let mut block_of = Vec::with_capacity(labels.len());
        let mut blocks: Vec<Vec<StateId>> = Vec::new();
        for (q, l) in labels.iter().enumerate() {
            let b = *ids.entry(l).or_insert_with(|| {
                blocks.push(Vec::new());
                (blocks.len() - 1) as u32
            });
            blocks[b as usize].push(q as StateId);
            block_of.push(b);
        }
        StatePartition { block_of, blocks }
    }

    pub fn identity(n: usize) -> Self {
        StatePartition {
            block_of: (0..n as u32).collect(),
            blocks: (0..n as u32).map(|q| vec![q]).collect(),
        }
    }

    pub fn uni(n: usize) -> Self {
        StatePartition {
            block_of: vec![0; n],
            blocks: if n == 0 {
                vec![]
            } else {
                vec![(0..n as u32).collect()]
            },
        }
    }

    pub fn num_states(&self) -> usize {
        self.block_of.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_of(&self, q: StateId) -> u32 {
        self.block_of[q as usize]
    }

    pub fn block(&self, b: u32) -> &[StateId] {
        &self.blocks[b as usize]
    }

    pub fn blocks(&self) -> &[Vec<StateId>] {
        &self.blocks
    }

    /// Whether every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &StatePartition) -> bool {
        self.num_states() == coarser.num_states()
            && self.blocks.iter().all(|b| {
                let target = coarser.block_of(b[0]);
                b.iter().all(|q| coarser.block_of(*q) == target)
            })
    }
}

/// States equivalent on all words of length `<= k`; `None` stands for the
/// unbounded case, which yields the identity partition. An undefined
/// transition acts as a pseudo-output equal only to itself.
pub fn partition_eq_k(m: &DetMoore, k: Option<usize>) -> StatePartition {
    let Some(k) = k else {
        return StatePartition::identity(m.num_states());
    };
    let n = m.num_states() as u32;
    let mut part =
        StatePartition::from_labels(&(0..n).map(|q| m.state_output(q)).collect::<Vec<_>>());
    for _ in 0..k {
        let sigs: Vec<(u32, Vec<(Symbol, u32)>)> = (0..n)
            .map(|q| {
                let succ = m
                    .transitions_from(q)
                    .into_iter()
                    .map(|(i, t)| (i, part.block_of(t)))
                    .collect();
                (part.block_of(q), succ)
            })
            .collect();
        let next = StatePartition::from_labels(&sigs);
        if next.num_blocks() == part.num_blocks() {
            break;
        }
        part = next;
    }
    part
}

pub fn partition_uni(m: &DetMoore) -> StatePartition {
    StatePartition::uni(m.num_states())
}

/// Quotient of a nondeterministic machine: blocks become states, outputs
/// and successors are unioned over each block.
pub fn quotient(m: &NondetMoore, p: &StatePartition) -> NondetMoore {
    assert_eq!(
        m.num_states(),
        p.num_states(),
        "partition does not match machine"
    );
    let out = p
        .blocks()
        .iter()
        .map(|b| m.outputs_of(b))
        .collect::<Vec<_>>();
    let mut trans: BTreeSet<(StateId, Symbol, StateId)> = BTreeSet::new();
    for (bid, block) in p.blocks().iter().enumerate() {
        for &q in block {
            for i in m.enabled_inputs(q) {
                for &t in m.successors(q, i) {
                    trans.insert((bid as StateId, i, p.block_of(t)));
                }
            }
        }
    }
    let initial = m.initial_states().iter().map(|q| p.block_of(*q));
    NondetMoore::new(m.inputs().clone(), m.outputs().clone(), initial, out, trans)
        .expect("quotient of a well-formed machine is well formed")
}

pub fn quotient_det(m: &DetMoore, p: &StatePartition) -> NondetMoore {
    quotient(&m.to_nondet(), p)
}
