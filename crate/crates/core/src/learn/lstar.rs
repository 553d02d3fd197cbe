//! L*-style learning of a single Moore machine.

use log::debug;

use super::table::{Answer, Hypothesis, ObservationTable};
use crate::alphabet::{Alphabet, Symbol, Word};
use crate::error::{Error, Result};
use crate::moore::{DetMoore, Moore};

/// Output and equivalence oracles for one learning problem.
pub trait Teacher {
    /// Final output character after `w`.
    fn output(&mut self, w: &[Symbol]) -> Result<Symbol>;
    /// Full output word for `w`.
    fn trace(&mut self, w: &[Symbol]) -> Result<Word>;
    fn equivalence(&mut self, h: &DetMoore) -> Result<Option<Word>>;
}

/// Classic completion: every access string extended by every input,
/// minus prefixes already in the table.
pub fn one_ext_lstar(table: &ObservationTable) -> Vec<Word> {
    let mut out = Vec::new();
    for s in table.short_prefixes() {
        for i in table.inputs().symbols() {
            let mut u = s.clone();
            u.push(i);
            if !table.contains(&u) {
                out.push(u);
            }
        }
    }
    out
}

/// Rivest-Schapire analysis of a counterexample: finds a split
/// `w = u·i·d` at which replacing the prefix by its access string flips the
/// final output, and adds `d` to E. `truth` is the true output word for `w`.
pub fn analyze_cex_lstar(
    table: &mut ObservationTable,
    hyp: &Hypothesis,
    w: &[Symbol],
    truth: &[Symbol],
    answer: &mut Answer<'_>,
) -> Result<Word> {
    let predicted = hyp.machine.trace(w);
    let m = match (0..truth.len().min(predicted.len())).find(|k| truth[*k] != predicted[*k]) {
        Some(m) => m,
        None if predicted.len() < truth.len() => {
            return Err(Error::SpuriousCounterexample(
                "hypothesis is undefined along the counterexample".into(),
            ))
        }
        None => {
            return Err(Error::SpuriousCounterexample(
                "outputs agree along the counterexample".into(),
            ))
        }
    };
    let w = &w[..m];
    let mut states = Vec::with_capacity(m + 1);
    let mut q = hyp.machine.initial_state();
    states.push(q);
    for &i in w {
        q = hyp.machine.next(q, i).expect("prediction was defined");
        states.push(q);
    }
    let mut alpha = |k: usize| -> Result<Symbol> {
        let mut u = hyp.access[states[k] as usize].clone();
        u.extend_from_slice(&w[k..]);
        answer(&u)
    };
    let base = truth[m];
    let (mut lo, mut hi) = (0usize, m);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if alpha(mid)? == base {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let d: Word = w[lo + 1..].to_vec();
    debug!(
        "counterexample of length {m} split at {lo}, suffix length {}",
        d.len()
    );
    if d.is_empty() || table.has_suffix(&d) {
        return Err(Error::SpuriousCounterexample(format!(
            "no new distinguishing suffix at split {lo}"
        )));
    }
    table.add_suffix(d.clone());
    table.fill(answer)?;
    Ok(d)
}

/// Result of an L* run.
pub struct LStarRun {
    pub hypothesis: Hypothesis,
    pub table: ObservationTable,
    pub rounds: usize,
}

/// Learns a machine over `inputs` / `outputs` from `teacher`.
pub fn lstar<T: Teacher>(inputs: Alphabet, outputs: Alphabet, teacher: &mut T) -> Result<LStarRun> {
    let mut table = ObservationTable::new(inputs, outputs);
    let mut rounds = 0;
    loop {
        table.close(&mut |w| teacher.output(w))?;
        let hyp = table.hypothesis();
        let ext = one_ext_lstar(&table);
        if !ext.is_empty() {
            for u in ext {
                table.add_long(u);
            }
            continue;
        }
        rounds += 1;
        match teacher.equivalence(&hyp.machine)? {
            None => {
                return Ok(LStarRun {
                    hypothesis: hyp,
                    table,
                    rounds,
                })
            }
            Some(w) => {
                let truth = teacher.trace(&w)?;
                analyze_cex_lstar(&mut table, &hyp, &w, &truth, &mut |u| teacher.output(u))?;
            }
        }
    }
}
