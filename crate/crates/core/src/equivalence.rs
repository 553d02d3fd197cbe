//! Equivalence checking by breadth-first search over the synchronous product.

use std::collections::{HashMap, VecDeque};

use crate::alphabet::{Symbol, Word};
use crate::error::{Error, Result};
use crate::moore::Moore;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Equivalent,
    Counterexample(Word),
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Verdict::Equivalent)
    }

    pub fn counterexample(&self) -> Option<&Word> {
        match self {
            Verdict::Equivalent => None,
            Verdict::Counterexample(w) => Some(w),
        }
    }
}

/// Shortest word on which the two machines' output words differ, comparing
/// defined lengths too.
pub fn equivalent<A: Moore, B: Moore>(a: &A, b: &B) -> Result<Verdict> {
    equivalent_within(a, b, None)
}

/// Like [`equivalent`], but gives up with [`Error::BudgetExceeded`] after
/// visiting `max_pairs` state pairs.
pub fn equivalent_within<A: Moore, B: Moore>(
    a: &A,
    b: &B,
    max_pairs: Option<usize>,
) -> Result<Verdict> {
    if a.inputs() != b.inputs() {
        return Err(Error::AlphabetMismatch(format!(
            "inputs {:?} vs {:?}",
            a.inputs(),
            b.inputs()
        )));
    }
    if a.outputs() != b.outputs() {
        return Err(Error::AlphabetMismatch(format!(
            "outputs {:?} vs {:?}",
            a.outputs(),
            b.outputs()
        )));
    }
    let start = (a.initial(), b.initial());
    if a.output(&start.0) != b.output(&start.1) {
        return Ok(Verdict::Counterexample(Vec::new()));
    }
    // parent pointers: pair index -> (parent index, input)
    let mut index: HashMap<(A::State, B::State), usize> = HashMap::new();
    let mut parent: Vec<Option<(usize, Symbol)>> = vec![None];
    index.insert(start.clone(), 0);
    let mut queue = VecDeque::from([(start, 0usize)]);
    let witness = |parent: &[Option<(usize, Symbol)>], mut at: usize, last: Symbol| {
        let mut w = vec![last];
        while let Some((p, i)) = parent[at] {
            w.push(i);
            at = p;
        }
        w.reverse();
        w
    };
    while let Some(((qa, qb), id)) = queue.pop_front() {
        for i in a.inputs().symbols() {
            match (a.step(&qa, i), b.step(&qb, i)) {
                (None, None) => {}
                (Some(na), Some(nb)) => {
                    if a.output(&na) != b.output(&nb) {
                        return Ok(Verdict::Counterexample(witness(&parent, id, i)));
                    }
                    let key = (na, nb);
                    if !index.contains_key(&key) {
                        if max_pairs.is_some_and(|m| index.len() >= m) {
                            return Err(Error::BudgetExceeded(index.len()));
                        }
                        let nid = parent.len();
                        parent.push(Some((id, i)));
                        index.insert(key.clone(), nid);
                        queue.push_back((key, nid));
                    }
                }
                _ => return Ok(Verdict::Counterexample(witness(&parent, id, i))),
            }
        }
    }
    Ok(Verdict::Equivalent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use crate::moore::DetMoore;

    fn one_state(out: u32) -> DetMoore {
        let i = Alphabet::flat(["a"]).unwrap();
        let o = Alphabet::flat(["x", "y"]).unwrap();
        DetMoore::from_fn(i, o, 0, vec![Symbol(out)], |_, _| Some(0)).unwrap()
    }

    #[test]
    fn self_equivalent() {
        let m = one_state(0);
        assert_eq!(equivalent(&m, &m).unwrap(), Verdict::Equivalent);
    }

    #[test]
    fn initial_output_difference() {
        assert_eq!(
            equivalent(&one_state(0), &one_state(1)).unwrap(),
            Verdict::Counterexample(vec![])
        );
    }

    #[test]
    fn definedness_is_a_difference() {
        let i = Alphabet::flat(["a"]).unwrap();
        let o = Alphabet::flat(["x"]).unwrap();
        let stuck =
            DetMoore::from_fn(i.clone(), o.clone(), 0, vec![Symbol(0)], |_, _| None).unwrap();
        let loops = DetMoore::from_fn(i, o, 0, vec![Symbol(0)], |_, _| Some(0)).unwrap();
        assert_eq!(
            equivalent(&stuck, &loops).unwrap(),
            Verdict::Counterexample(vec![Symbol(0)])
        );
    }

    #[test]
    fn mismatched_alphabets() {
        let i = Alphabet::flat(["b"]).unwrap();
        let o = Alphabet::flat(["x", "y"]).unwrap();
        let other = DetMoore::from_fn(i, o, 0, vec![Symbol(0)], |_, _| Some(0)).unwrap();
        assert!(matches!(
            equivalent(&one_state(0), &other),
            Err(Error::AlphabetMismatch(_))
        ));
    }

    #[test]
    fn shortest_witness_in_symbol_order() {
        // a counter mod 3 that outputs y only at 2, against constant x
        let i = Alphabet::flat(["a", "b"]).unwrap();
        let o = Alphabet::flat(["x", "y"]).unwrap();
        let ctr = DetMoore::from_fn(
            i.clone(),
            o.clone(),
            0,
            vec![Symbol(0), Symbol(0), Symbol(1)],
            |q, s| Some(if s == Symbol(1) { (q + 1) % 3 } else { q }),
        )
        .unwrap();
        let flat = DetMoore::from_fn(i, o, 0, vec![Symbol(0)], |_, _| Some(0)).unwrap();
        assert_eq!(
            equivalent(&ctr, &flat).unwrap(),
            Verdict::Counterexample(vec![Symbol(1), Symbol(1)])
        );
        assert!(matches!(
            equivalent_within(&ctr, &ctr, Some(1)),
            Err(Error::BudgetExceeded(1))
        ));
    }
}
