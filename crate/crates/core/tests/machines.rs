mod common;

use common::{brute_force_distance, random_word, raw_moore, reachable};
use mmnlearn_core::learn::{lstar, Teacher};
use mmnlearn_core::partition::{partition_eq_k, partition_uni, quotient_det, StatePartition};
use mmnlearn_core::{equivalent, DetMoore, Moore, Result, Symbol, Verdict, Word};
use proptest::prelude::*;

/// Exact teacher for a complete machine.
struct Exact<'a>(&'a DetMoore);

impl Teacher for Exact<'_> {
    fn output(&mut self, w: &[Symbol]) -> Result<Symbol> {
        Ok(*self.0.trace(w).last().unwrap())
    }

    fn trace(&mut self, w: &[Symbol]) -> Result<Word> {
        Ok(self.0.trace(w))
    }

    fn equivalence(&mut self, h: &DetMoore) -> Result<Option<Word>> {
        Ok(equivalent(self.0, h)?.counterexample().cloned())
    }
}

fn min_states(m: &DetMoore) -> usize {
    let trimmed = m.trim();
    partition_eq_k(&trimmed, Some(trimmed.num_states())).num_blocks()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn equivalence_matches_brute_force(
        a in raw_moore(6, 3, 2, true),
        b in raw_moore(6, 3, 2, true),
    ) {
        let (a, b) = (a.build(), b.build());
        let bound = 2 * a.num_states() * b.num_states();
        let expected = brute_force_distance(&a, &b, bound);
        match equivalent(&a, &b).unwrap() {
            Verdict::Equivalent => prop_assert_eq!(expected, None),
            Verdict::Counterexample(w) => {
                prop_assert_eq!(Some(w.len()), expected);
                prop_assert_ne!(a.trace(&w), b.trace(&w));
            }
        }
    }

    #[test]
    fn machines_are_equivalent_to_themselves(a in raw_moore(8, 3, 3, true)) {
        let a = a.build();
        prop_assert_eq!(equivalent(&a, &a).unwrap(), Verdict::Equivalent);
        prop_assert_eq!(equivalent(&a, &a.trim()).unwrap(), Verdict::Equivalent);
    }

    #[test]
    fn refinement_is_monotone_in_depth(a in raw_moore(8, 2, 2, true)) {
        let a = a.build();
        let finest = partition_eq_k(&a, Some(a.num_states()));
        prop_assert_eq!(partition_eq_k(&a, None), StatePartition::identity(a.num_states()));
        let mut prev = StatePartition::uni(a.num_states());
        prop_assert!(partition_uni(&a).refines(&prev));
        for k in 0..=a.num_states() {
            let p = partition_eq_k(&a, Some(k));
            prop_assert!(p.refines(&prev));
            prop_assert!(finest.refines(&p));
            prev = p;
        }
        prop_assert_eq!(prev.num_blocks(), finest.num_blocks());
        prop_assert!(StatePartition::identity(a.num_states()).refines(&finest));
    }

    #[test]
    fn equal_blocks_mean_equal_futures(a in raw_moore(6, 2, 2, true), w in random_word(12, 2)) {
        let a = a.build();
        let p = partition_eq_k(&a, Some(a.num_states()));
        for block in p.blocks() {
            let t = a.trace_from(&block[0], &w);
            for q in &block[1..] {
                prop_assert_eq!(&a.trace_from(q, &w), &t);
            }
        }
    }

    #[test]
    fn quotients_overapproximate(
        a in raw_moore(7, 2, 3, true),
        k in 0usize..3,
        w in random_word(15, 2),
    ) {
        let a = a.build();
        for p in [
            StatePartition::identity(a.num_states()),
            partition_eq_k(&a, Some(k)),
            partition_uni(&a),
        ] {
            let q = quotient_det(&a, &p);
            let sets = q.semantics(&w).unwrap();
            let trace = a.trace(&w);
            for (j, o) in trace.iter().enumerate() {
                prop_assert!(sets[j].contains(o));
            }
            let reach: Vec<u32> = reachable(&a).iter().map(|s| p.block_of(*s)).collect();
            let qreach = q.reachable(None);
            prop_assert!(reach.iter().all(|b| qreach.contains(b)));
        }
    }

    #[test]
    fn lstar_learns_minimal_equivalent_machines(a in raw_moore(6, 3, 2, false)) {
        let a = a.build();
        let run = lstar(a.inputs().clone(), a.outputs().clone(), &mut Exact(&a)).unwrap();
        let h = &run.hypothesis.machine;
        prop_assert_eq!(equivalent(&a, h).unwrap(), Verdict::Equivalent);
        prop_assert_eq!(h.num_states(), min_states(&a));
        prop_assert!(run.rounds <= min_states(&a));
    }
}
