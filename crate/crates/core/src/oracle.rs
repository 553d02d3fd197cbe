//! Query access to a hidden network, with reset/step accounting.

use std::collections::BTreeSet;
use std::io::Write;
use std::sync::Arc;
use std::time::{Duration, Instant};

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, Symbol, Word};
use crate::equivalence::{equivalent_within, Verdict};
use crate::error::{Error, Result};
use crate::mmn::{Layout, Mmn, Network};
use crate::moore::{check_word, DetMoore, Moore};

/// Reset and step counts for one kind of query.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub resets: u64,
    pub steps: u64,
}

impl Counters {
    fn charge(&mut self, resets: u64, steps: u64) {
        self.resets += resets;
        self.steps += steps;
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryStats {
    pub oq_resets: u64,
    pub oq_steps: u64,
    pub eq_count: u64,
    pub eq_resets: u64,
    pub eq_steps: u64,
    /// System-level output queries.
    pub system_oq: Counters,
    /// Component-level output queries, including the per-component runs
    /// behind total output queries.
    pub component_oq: Vec<Counters>,
    /// Total output queries, counted once each.
    pub total_oq_calls: u64,
    /// Longest counterexample returned by an equivalence query.
    pub max_cex_len: usize,
}

impl QueryStats {
    fn new(components: usize) -> Self {
        QueryStats {
            component_oq: vec![Counters::default(); components],
            ..Default::default()
        }
    }
}

/// Parameters of the random-testing equivalence oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EqTestConfig {
    pub words_per_eq: usize,
    pub word_length: usize,
    pub seed: u64,
}

impl Default for EqTestConfig {
    fn default() -> Self {
        EqTestConfig {
            words_per_eq: 100,
            word_length: 260,
            seed: 0,
        }
    }
}

impl EqTestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.words_per_eq == 0 || self.word_length == 0 {
            return Err(Error::InvalidConfig(
                "equivalence testing needs at least one word of length at least one".into(),
            ));
        }
        Ok(())
    }
}

/// How equivalence queries are answered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EqMode {
    /// Uniform random words, as configured.
    Random(EqTestConfig),
    /// Exact comparison against the hidden machine; each query still counts
    /// as one equivalence query with the returned word's length as steps.
    Exact,
}

/// The system under learning. Learners only see the network structure and
/// the answers to queries; the component machines stay hidden.
pub struct Sul {
    mmn: Mmn,
    stats: QueryStats,
    mode: EqMode,
    rng: ChaCha8Rng,
    deadline: Option<Instant>,
    oracle_time: Duration,
    log: Option<Box<dyn Write + Send>>,
    seen_inputs: Vec<BTreeSet<Symbol>>,
    contract_violations: u64,
    validation_budget: usize,
}

impl Sul {
    pub fn new(mmn: Mmn, mode: EqMode) -> Self {
        let seed = match mode {
            EqMode::Random(cfg) => cfg.seed,
            EqMode::Exact => 0,
        };
        let k = mmn.num_components();
        Sul {
            mmn,
            stats: QueryStats::new(k),
            mode,
            rng: ChaCha8Rng::seed_from_u64(seed),
            deadline: None,
            oracle_time: Duration::ZERO,
            log: None,
            seen_inputs: vec![BTreeSet::new(); k],
            contract_violations: 0,
            validation_budget: 10_000_000,
        }
    }

    pub fn set_deadline(&mut self, deadline: Option<Instant>) {
        self.deadline = deadline;
    }

    /// Query log sink: one line per query, `<kind> <level> <word length> <response length>`.
    pub fn set_log(&mut self, sink: Box<dyn Write + Send>) {
        self.log = Some(sink);
    }

    pub fn set_validation_budget(&mut self, pairs: usize) {
        self.validation_budget = pairs;
    }

    pub fn check_deadline(&self) -> Result<()> {
        match self.deadline {
            Some(d) if Instant::now() >= d => Err(Error::Timeout),
            _ => Ok(()),
        }
    }

    pub fn stats(&self) -> &QueryStats {
        &self.stats
    }

    pub fn oracle_time(&self) -> Duration {
        self.oracle_time
    }

    pub fn eq_mode(&self) -> EqMode {
        self.mode
    }

    pub fn network(&self) -> &Network {
        self.mmn.network()
    }

    pub fn layout(&self) -> &Layout {
        self.mmn.layout()
    }

    /// Shared handles to the network structure and its layout.
    pub fn structure(&self) -> (Arc<Network>, Arc<Layout>) {
        self.mmn.shared_parts()
    }

    pub fn num_components(&self) -> usize {
        self.mmn.num_components()
    }

    /// Every character each component has been fed by a query so far.
    pub fn seen_component_inputs(&self) -> &[BTreeSet<Symbol>] {
        &self.seen_inputs
    }

    /// Component queries that fell off a partial component.
    pub fn contract_violations(&self) -> u64 {
        self.contract_violations
    }

    fn log_line(&mut self, kind: &str, level: &str, len: usize, resp: usize) {
        if let Some(sink) = self.log.as_mut() {
            let _ = writeln!(sink, "{kind} {level} {len} {resp}");
        }
    }

    fn timed<T>(&mut self, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        self.check_deadline()?;
        let start = Instant::now();
        let r = f(self);
        self.oracle_time += start.elapsed();
        r
    }

    /// System-level output query.
    pub fn oq(&mut self, w: &[Symbol]) -> Result<Word> {
        self.timed(|s| {
            let out = s.mmn.semantics(w)?;
            s.stats.oq_resets += 1;
            s.stats.oq_steps += w.len() as u64;
            s.stats.system_oq.charge(1, w.len() as u64);
            s.log_line("oq", "system", w.len(), out.len());
            Ok(out)
        })
    }

    /// Output query to component `c` alone.
    pub fn oq_c(&mut self, c: usize, w: &[Symbol]) -> Result<Word> {
        self.timed(|s| {
            let m = s.mmn.component(c);
            check_word(m.inputs(), w)?;
            let out = m.trace(w);
            if out.len() != w.len() + 1 {
                s.contract_violations += 1;
                warn!("component {c} is undefined on a queried word");
            }
            s.seen_inputs[c].extend(w.iter().copied());
            s.stats.oq_resets += 1;
            s.stats.oq_steps += w.len() as u64;
            s.stats.component_oq[c].charge(1, w.len() as u64);
            let name = s.mmn.component_name(c).to_string();
            s.log_line("oq", &name, w.len(), out.len());
            Ok(out)
        })
    }

    /// Total output query: every component's output at every tick, obtained
    /// by one run of each component driven in lockstep.
    pub fn oq_bar(&mut self, w: &[Symbol]) -> Result<Vec<Vec<Symbol>>> {
        self.timed(|s| {
            let ticks = s.mmn.simulate(w)?;
            let k = s.mmn.num_components() as u64;
            let steps = w.len() as u64;
            s.stats.oq_resets += k;
            s.stats.oq_steps += k * steps;
            s.stats.total_oq_calls += 1;
            for c in 0..s.mmn.num_components() {
                s.stats.component_oq[c].charge(1, steps);
                for (t, i) in w.iter().enumerate().take(ticks.len().saturating_sub(1)) {
                    let inp = s.mmn.layout().component_input(c, *i, &ticks[t]);
                    s.seen_inputs[c].insert(inp);
                }
            }
            s.log_line("oqbar", "all", w.len(), ticks.len());
            Ok(ticks)
        })
    }

    fn random_word(&mut self, alphabet: &Alphabet, len: usize) -> Word {
        let n = alphabet.len();
        (0..len)
            .map(|_| Symbol::from(self.rng.random_range(0..n)))
            .collect()
    }

    fn test_words<H: Moore>(
        &mut self,
        h: &H,
        alphabet: &Alphabet,
        truth: impl Fn(&Self, &[Symbol]) -> Word,
    ) -> Result<Option<Word>> {
        let EqMode::Random(cfg) = self.mode else {
            unreachable!("random testing only in random mode")
        };
        for _ in 0..cfg.words_per_eq {
            let w = self.random_word(alphabet, cfg.word_length);
            self.stats.eq_resets += 1;
            self.stats.eq_steps += w.len() as u64;
            if h.trace(&w) != truth(self, &w) {
                return Ok(Some(w));
            }
        }
        Ok(None)
    }

    fn finish_eq(&mut self, level: &str, cex: Option<Word>) -> Option<Word> {
        self.stats.eq_count += 1;
        let len = cex.as_ref().map_or(0, Vec::len);
        self.stats.max_cex_len = self.stats.max_cex_len.max(len);
        self.log_line("eq", level, len, usize::from(cex.is_some()));
        cex
    }

    /// System-level equivalence query for a hypothesis over Σ^in / Σ^out.
    pub fn eq<H: Moore>(&mut self, h: &H) -> Result<Option<Word>> {
        self.timed(|s| {
            if h.inputs() != s.mmn.inputs() || h.outputs() != s.mmn.outputs() {
                return Err(Error::AlphabetMismatch(
                    "hypothesis must use the system alphabets".into(),
                ));
            }
            let cex = match s.mode {
                EqMode::Random(_) => {
                    let alpha = s.mmn.inputs().clone();
                    s.test_words(h, &alpha, |s, w| s.mmn.trace(w))?
                }
                EqMode::Exact => {
                    let v = equivalent_within(h, &s.mmn, Some(s.validation_budget))?;
                    let cex = v.counterexample().cloned();
                    s.stats.eq_resets += 1;
                    s.stats.eq_steps += cex.as_ref().map_or(0, |w| w.len() as u64);
                    cex
                }
            };
            Ok(s.finish_eq("system", cex))
        })
    }

    /// Component-level equivalence query.
    pub fn eq_c(&mut self, c: usize, h: &DetMoore) -> Result<Option<Word>> {
        self.timed(|s| {
            let m = s.mmn.component(c);
            if h.inputs() != m.inputs() || h.outputs() != m.outputs() {
                return Err(Error::AlphabetMismatch(
                    "hypothesis must use the component alphabets".into(),
                ));
            }
            let cex = match s.mode {
                EqMode::Random(_) => {
                    let alpha = m.inputs().clone();
                    s.test_words(h, &alpha, |s, w| s.mmn.component(c).trace(w))?
                }
                EqMode::Exact => {
                    let v = equivalent_within(h, s.mmn.component(c), Some(s.validation_budget))?;
                    let cex = v.counterexample().cloned();
                    s.stats.eq_resets += 1;
                    s.stats.eq_steps += cex.as_ref().map_or(0, |w| w.len() as u64);
                    cex
                }
            };
            let name = s.mmn.component_name(c).to_string();
            Ok(s.finish_eq(&name, cex))
        })
    }

    /// Exact equivalence of a learned system against the hidden one. Not
    /// charged to the statistics.
    pub fn validate_exact<H: Moore>(&self, h: &H) -> Result<Verdict> {
        equivalent_within(h, &self.mmn, Some(self.validation_budget))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mmn::Network;

    fn toggle() -> Mmn {
        let bits = Alphabet::flat(["0", "1"]).unwrap();
        let mut n = Network::new();
        let i = n.add_input("i");
        let o = n.add_output("o");
        let c = n.add_component("c");
        n.add_edge(i, c, bits.clone());
        n.add_edge(c, o, bits);
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
    fn output_queries_are_charged() {
        let mut sul = Sul::new(toggle(), EqMode::Random(EqTestConfig::default()));
        assert_eq!(sul.oq(&[]).unwrap(), vec![Symbol(0)]);
        sul.oq(&[Symbol(1), Symbol(1)]).unwrap();
        sul.oq_c(0, &[Symbol(1)]).unwrap();
        sul.oq_bar(&[Symbol(1)]).unwrap();
        let s = sul.stats();
        assert_eq!((s.oq_resets, s.oq_steps), (4, 4));
        assert_eq!(
            s.system_oq,
            Counters {
                resets: 2,
                steps: 2
            }
        );
        assert_eq!(
            s.component_oq[0],
            Counters {
                resets: 2,
                steps: 2
            }
        );
        assert!(matches!(
            sul.oq(&[Symbol(5)]),
            Err(Error::InvalidSymbol { .. })
        ));
    }

    #[test]
    fn correct_hypothesis_passes_all_words() {
        let mmn = toggle();
        let h = mmn.induced().materialize(10).unwrap();
        let mut sul = Sul::new(mmn, EqMode::Random(EqTestConfig::default()));
        assert_eq!(sul.eq(&h).unwrap(), None);
        let s = sul.stats();
        assert_eq!((s.eq_count, s.eq_resets, s.eq_steps), (1, 100, 26_000));
        assert!(sul.validate_exact(&h).unwrap().is_equivalent());
    }

    #[test]
    fn wrong_initial_output_fails_on_first_word() {
        let mmn = toggle();
        let (si, so, _) = mmn.system_alphabets();
        let h = DetMoore::from_fn(si, so, 0, vec![Symbol(1)], |_, _| Some(0)).unwrap();
        let mut sul = Sul::new(mmn, EqMode::Random(EqTestConfig::default()));
        assert!(sul.eq(&h).unwrap().is_some());
        assert_eq!(sul.stats().eq_resets, 1);
        let mut exact = Sul::new(toggle(), EqMode::Exact);
        assert_eq!(exact.eq(&h).unwrap(), Some(vec![]));
    }

    #[test]
    fn zero_deadline_times_out() {
        let mut sul = Sul::new(toggle(), EqMode::Exact);
        sul.set_deadline(Some(Instant::now()));
        assert!(matches!(sul.oq(&[]), Err(Error::Timeout)));
    }
}
