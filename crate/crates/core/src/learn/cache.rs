use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::alphabet::{Symbol, Word};
use crate::error::{Error, Result};

/// How output-query answers are memoized within one learner.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Memo {
    /// Every table cell costs a query.
    Off,
    /// Repeated words are answered from memory.
    #[default]
    Exact,
    /// Any prefix of an already queried word is answered from memory.
    Prefix,
}

#[derive(Default)]
struct TrieNode {
    children: HashMap<Symbol, usize>,
    output: Option<Symbol>,
}

/// Output-query memo. In prefix mode a query for `w` records the output
/// after every prefix of `w`.
pub struct QueryCache {
    memo: Memo,
    nodes: Vec<TrieNode>,
    words: HashMap<Word, Symbol>,
}

impl QueryCache {
    pub fn new(memo: Memo) -> Self {
        QueryCache {
            memo,
            nodes: vec![TrieNode::default()],
            words: HashMap::new(),
        }
    }

    pub fn memo(&self) -> Memo {
        self.memo
    }

    pub fn lookup(&self, w: &[Symbol]) -> Option<Symbol> {
        match self.memo {
            Memo::Off => None,
            Memo::Exact => self.words.get(w).copied(),
            Memo::Prefix => {
                let mut at = 0;
                for s in w {
                    at = *self.nodes[at].children.get(s)?;
                }
                self.nodes[at].output
            }
        }
    }

    /// Records `trace`, the output word observed for input `w`; a trace
    /// shorter than `|w| + 1` records only its defined prefix.
    pub fn record(&mut self, w: &[Symbol], trace: &[Symbol]) {
        match self.memo {
            Memo::Off => {}
            Memo::Exact => {
                if trace.len() == w.len() + 1 {
                    self.words.insert(w.to_vec(), trace[w.len()]);
                }
            }
            Memo::Prefix => {
                let mut at = 0;
                self.nodes[0].output = trace.first().copied();
                for (k, s) in w.iter().enumerate() {
                    let Some(out) = trace.get(k + 1) else { break };
                    at = match self.nodes[at].children.get(s) {
                        Some(n) => *n,
                        None => {
                            self.nodes.push(TrieNode::default());
                            let n = self.nodes.len() - 1;
                            self.nodes[at].children.insert(*s, n);
                            n
                        }
                    };
                    self.nodes[at].output = Some(*out);
                }
            }
        }
    }

    /// Final output for `w`, asking `ask` for a full trace on a miss.
    pub fn answer(
        &mut self,
        w: &[Symbol],
        ask: impl FnOnce(&[Symbol]) -> Result<Word>,
    ) -> Result<Symbol> {
        if let Some(o) = self.lookup(w) {
            return Ok(o);
        }
        let trace = ask(w)?;
        if trace.len() != w.len() + 1 {
            return Err(Error::UndefinedQuery(w.len()));
        }
        self.record(w, &trace);
        Ok(trace[w.len()])
    }

    /// Full output trace for `w`, from memory when every prefix is known.
    pub fn trace(
        &mut self,
        w: &[Symbol],
        ask: impl FnOnce(&[Symbol]) -> Result<Word>,
    ) -> Result<Word> {
        if self.memo == Memo::Prefix {
            let known: Option<Word> = (0..=w.len()).map(|k| self.lookup(&w[..k])).collect();
            if let Some(t) = known {
                return Ok(t);
            }
        }
        let trace = ask(w)?;
        if trace.len() != w.len() + 1 {
            return Err(Error::UndefinedQuery(w.len()));
        }
        self.record(w, &trace);
        Ok(trace)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[u32]) -> Word {
        v.iter().map(|x| Symbol(*x)).collect()
    }

    #[test]
    fn prefix_mode_answers_prefixes() {
        let mut c = QueryCache::new(Memo::Prefix);
        let mut asked = 0;
        let out = c
            .answer(&s(&[1, 1]), |_| {
                asked += 1;
                Ok(s(&[0, 1, 0]))
            })
            .unwrap();
        assert_eq!(out, Symbol(0));
        assert_eq!(c.lookup(&s(&[1])), Some(Symbol(1)));
        assert_eq!(c.lookup(&[]), Some(Symbol(0)));
        assert_eq!(c.lookup(&s(&[0])), None);
        assert_eq!(asked, 1);
    }

    #[test]
    fn exact_mode_only_answers_whole_words() {
        let mut c = QueryCache::new(Memo::Exact);
        c.record(&s(&[1, 1]), &s(&[0, 1, 0]));
        assert_eq!(c.lookup(&s(&[1, 1])), Some(Symbol(0)));
        assert_eq!(c.lookup(&s(&[1])), None);
    }

    #[test]
    fn off_mode_always_asks() {
        let mut c = QueryCache::new(Memo::Off);
        let mut asked = 0;
        for _ in 0..3 {
            c.answer(&[], |_| {
                asked += 1;
                Ok(s(&[4]))
            })
            .unwrap();
        }
        assert_eq!(asked, 3);
    }

    #[test]
    fn undefined_answers_are_errors() {
        let mut c = QueryCache::new(Memo::Prefix);
        let r = c.answer(&s(&[1, 1]), |_| Ok(s(&[0, 1])));
        assert!(matches!(r, Err(Error::UndefinedQuery(2))));
    }

    #[test]
    fn truncated_traces_record_defined_prefix() {
        let mut c = QueryCache::new(Memo::Prefix);
        c.record(&s(&[1, 1, 1]), &s(&[0, 1]));
        assert_eq!(c.lookup(&s(&[1])), Some(Symbol(1)));
        assert_eq!(c.lookup(&s(&[1, 1])), None);
    }
}
