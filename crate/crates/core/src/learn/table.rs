//! Observation tables over a prefix set S, one-step extensions R and
//! suffixes E.

use std::cmp::Reverse;
use std::collections::HashMap;
use std::fmt::Write as _;

use crate::alphabet::{Alphabet, Symbol, Word};
use crate::error::Result;
use crate::moore::DetMoore;

/// Answers an output query with the final output character.
pub type Answer<'a> = dyn FnMut(&[Symbol]) -> Result<Symbol> + 'a;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Part {
    Short,
    Long,
}

#[derive(Clone, Debug)]
pub struct ObservationTable {
    inputs: Alphabet,
    outputs: Alphabet,
    short: Vec<Word>,
    long: Vec<Word>,
    suffixes: Vec<Word>,
    part: HashMap<Word, Part>,
    cells: HashMap<Word, Vec<Option<Symbol>>>,
}

/// A hypothesis together with the access string of each state.
#[derive(Clone, Debug)]
pub struct Hypothesis {
    pub machine: DetMoore,
    pub access: Vec<Word>,
}

impl ObservationTable {
    /// The table `({ε}, ∅, {ε})`, not yet filled.
    pub fn new(inputs: Alphabet, outputs: Alphabet) -> Self {
        let mut t = ObservationTable {
            inputs,
            outputs,
            short: vec![Vec::new()],
            long: Vec::new(),
            suffixes: vec![Vec::new()],
            part: HashMap::new(),
            cells: HashMap::new(),
        };
        t.part.insert(Vec::new(), Part::Short);
        t.cells.insert(Vec::new(), vec![None]);
        t
    }

    pub fn inputs(&self) -> &Alphabet {
        &self.inputs
    }

    pub fn outputs(&self) -> &Alphabet {
        &self.outputs
    }

    pub fn short_prefixes(&self) -> &[Word] {
        &self.short
    }

    pub fn long_prefixes(&self) -> &[Word] {
        &self.long
    }

    pub fn suffixes(&self) -> &[Word] {
        &self.suffixes
    }

    /// Whether `u` is in S ∪ R.
    pub fn contains(&self, u: &[Symbol]) -> bool {
        self.part.contains_key(u)
    }

    pub fn has_suffix(&self, e: &[Symbol]) -> bool {
        self.suffixes.iter().any(|x| x == e)
    }

    /// Number of prefixes in S ∪ R.
    pub fn prefix_count(&self) -> usize {
        self.short.len() + self.long.len()
    }

    pub fn filled_cells(&self) -> usize {
        self.cells
            .values()
            .map(|r| r.iter().filter(|c| c.is_some()).count())
            .sum()
    }

    /// Adds `u` to R unless it is already in S ∪ R. Returns whether it was new.
    pub fn add_long(&mut self, u: Word) -> bool {
        if self.part.contains_key(&u) {
            return false;
        }
        self.part.insert(u.clone(), Part::Long);
        self.cells
            .insert(u.clone(), vec![None; self.suffixes.len()]);
        self.long.push(u);
        true
    }

    /// Adds a suffix column. Returns whether it was new.
    pub fn add_suffix(&mut self, e: Word) -> bool {
        if self.has_suffix(&e) {
            return false;
        }
        self.suffixes.push(e);
        for row in self.cells.values_mut() {
            row.push(None);
        }
        true
    }

    /// Queries every missing cell, longest words first.
    pub fn fill(&mut self, answer: &mut Answer<'_>) -> Result<()> {
        let mut pending: Vec<(Word, usize, Word)> = Vec::new();
        for u in self.short.iter().chain(&self.long) {
            let row = &self.cells[u];
            for (j, cell) in row.iter().enumerate() {
                if cell.is_none() {
                    let mut w = u.clone();
                    w.extend_from_slice(&self.suffixes[j]);
                    pending.push((u.clone(), j, w));
                }
            }
        }
        pending.sort_by_key(|p| Reverse(p.2.len()));
        for (u, j, w) in pending {
            let v = answer(&w)?;
            self.cells.get_mut(&u).unwrap()[j] = Some(v);
        }
        Ok(())
    }

    /// The row of a filled prefix.
    pub fn row(&self, u: &[Symbol]) -> Vec<Symbol> {
        self.cells[u]
            .iter()
            .map(|c| c.expect("row is filled"))
            .collect()
    }

    fn short_rows(&self) -> HashMap<Vec<Symbol>, usize> {
        self.short
            .iter()
            .enumerate()
            .map(|(k, s)| (self.row(s), k))
            .collect()
    }

    /// First prefix of R, in insertion order, whose row matches no row of S.
    pub fn find_unclosed(&self) -> Option<usize> {
        let rows = self.short_rows();
        self.long
            .iter()
            .position(|r| !rows.contains_key(&self.row(r)))
    }

    pub fn is_closed(&self) -> bool {
        self.find_unclosed().is_none()
    }

    /// Fills the table and moves unmatched rows from R to S until closed.
    pub fn close(&mut self, answer: &mut Answer<'_>) -> Result<()> {
        loop {
            self.fill(answer)?;
            match self.find_unclosed() {
                None => return Ok(()),
                Some(k) => {
                    let r = self.long.remove(k);
                    self.part.insert(r.clone(), Part::Short);
                    self.short.push(r);
                }
            }
        }
    }

    /// The hypothesis of a closed, filled table. State `k` is the `k`-th
    /// prefix of S; transitions exist exactly for `s·i ∈ S ∪ R`.
    pub fn hypothesis(&self) -> Hypothesis {
        let rows = self.short_rows();
        let outs = self.short.iter().map(|s| self.row(s)[0]).collect();
        let mut key = Vec::new();
        let machine = DetMoore::from_fn(
            self.inputs.clone(),
            self.outputs.clone(),
            0,
            outs,
            |q, i| {
                key.clear();
                key.extend_from_slice(&self.short[q as usize]);
                key.push(i);
                self.part
                    .contains_key(&key)
                    .then(|| rows[&self.row(&key)] as u32)
            },
        )
        .expect("table hypothesis is well formed");
        Hypothesis {
            machine,
            access: self.short.clone(),
        }
    }

    /// Human-readable dump: a header of suffixes, then one line per prefix.
    pub fn dump(&self) -> String {
        let word = |w: &[Symbol]| self.inputs.word_name(w).replace(' ', ".");
        let mut out = String::new();
        let cols: Vec<String> = self.suffixes.iter().map(|e| word(e)).collect();
        writeln!(out, "E | {}", cols.join(" | ")).unwrap();
        for (tag, set) in [("S", &self.short), ("R", &self.long)] {
            for u in set {
                let cells: Vec<String> = self.cells[u]
                    .iter()
                    .map(|c| c.map_or("?".to_string(), |s| self.outputs.name(s)))
                    .collect();
                writeln!(out, "{tag} {} | {}", word(u), cells.join(" | ")).unwrap();
            }
        }
        out
    }
}
