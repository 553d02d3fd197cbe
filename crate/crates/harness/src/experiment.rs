use std::fmt;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use mmnlearn_core::bench::BenchmarkSpec;
use mmnlearn_core::learn::{
    learn, Algorithm, CaParams, LearnOptions, Learned, LearnedSystem, Memo,
};
use mmnlearn_core::oracle::{EqMode, EqTestConfig, Sul};
use mmnlearn_core::Error;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(3600);
pub const DEFAULT_RANDOM_INSTANCES: usize = 10;

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub bench: BenchmarkSpec,
    pub algorithm: Algorithm,
    /// Required for ccwl, ignored otherwise.
    pub params: Option<CaParams>,
    /// Random testing parameters; the seed is replaced per instance.
    pub eq: EqTestConfig,
    /// Use exact equivalence checking instead of random testing.
    pub exact_eq: bool,
    pub seeds: Vec<u64>,
    pub timeout: Duration,
    pub validate: bool,
    pub memo: Memo,
}

impl ExperimentConfig {
    /// Defaults for `bench` and `algorithm`: ten seeds for random
    /// benchmarks, one otherwise, starting at 1.
    pub fn new(bench: BenchmarkSpec, algorithm: Algorithm) -> Self {
        let n = if bench.is_random() {
            DEFAULT_RANDOM_INSTANCES
        } else {
            1
        };
        ExperimentConfig {
            bench,
            algorithm,
            params: (algorithm == Algorithm::Ccwl).then(CaParams::default),
            eq: EqTestConfig::default(),
            exact_eq: false,
            seeds: (1..=n as u64).collect(),
            timeout: DEFAULT_TIMEOUT,
            validate: true,
            memo: Memo::default(),
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.algorithm == Algorithm::Ccwl && self.params.is_none() {
            bail!("ccwl needs context-analysis parameters");
        }
        if self.seeds.is_empty() {
            bail!("at least one instance is needed");
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.seeds.len() {
            bail!("instance seeds must be distinct");
        }
        self.eq.validate()?;
        Ok(())
    }

    /// The configuration of a single instance.
    pub fn instance(&self, seed: u64) -> ExperimentConfig {
        ExperimentConfig {
            seeds: vec![seed],
            ..self.clone()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Validation {
    Validated,
    Incorrect,
    Timeout,
    /// Validation was switched off.
    Skipped,
}

impl fmt::Display for Validation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Validation::Validated => "validated",
            Validation::Incorrect => "incorrect",
            Validation::Timeout => "timeout",
            Validation::Skipped => "skipped",
        })
    }
}

/// One learning run. Sizes are zero after a timeout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub bench: String,
    pub algorithm: String,
    pub params: Option<String>,
    pub seed: u64,
    pub states: usize,
    pub transitions: usize,
    pub component_states: Vec<usize>,
    pub oq_resets: u64,
    pub oq_steps: u64,
    pub eq_count: u64,
    pub eq_resets: u64,
    pub eq_steps: u64,
    pub learner_time: f64,
    pub wall_time: f64,
    pub validation: Validation,
    /// Input alphabet size seen by the learner: the system alphabet for mnl,
    /// the largest component alphabet otherwise.
    pub input_alphabet: usize,
    pub components: usize,
    /// Total component states of the hidden system.
    pub sul_states: usize,
    pub max_cex_len: usize,
}

impl ExperimentResult {
    /// Learned machine size for the monolithic bound, or the hidden
    /// component total for componentwise learners.
    pub fn target_size(&self) -> usize {
        if self.algorithm == Algorithm::Mnl.to_string() {
            self.states
        } else {
            self.sul_states
        }
    }
}

/// A finished run together with the learned system, when there is one.
pub struct Outcome {
    pub result: ExperimentResult,
    pub learned: Option<LearnedSystem>,
}

/// Runs the first seed of `cfg`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    Ok(run_instance(cfg, cfg.seeds[0])?.result)
}

pub fn run_instance(cfg: &ExperimentConfig, seed: u64) -> Result<Outcome> {
    cfg.check()?;
    let bench = cfg.bench.with_seed(seed);
    let mmn = bench.build();
    let layout = mmn.layout();
    let input_alphabet = match cfg.algorithm {
        Algorithm::Mnl => layout.system_inputs().len(),
        _ => (0..mmn.num_components())
            .map(|c| layout.input_alphabet(c).len())
            .max()
            .unwrap_or(0),
    };
    let components = mmn.num_components();
    let sul_states = mmn.total_states();
    let mode = if cfg.exact_eq {
        EqMode::Exact
    } else {
        EqMode::Random(EqTestConfig { seed, ..cfg.eq })
    };
    let mut sul = Sul::new(mmn, mode);
    let params = cfg.params.unwrap_or_default();
    let opts = LearnOptions {
        memo: cfg.memo,
        ..LearnOptions::default()
    };
    let start = Instant::now();
    sul.set_deadline(Some(start + cfg.timeout));
    let outcome = learn(&mut sul, cfg.algorithm, params, &opts);
    let wall = start.elapsed();
    let learner_time = wall.saturating_sub(sul.oracle_time()).as_secs_f64();
    let (learned, validation) = match outcome {
        Ok(l) => {
            let v = if !cfg.validate {
                Validation::Skipped
            } else if l.validate(&sul).context("validation")? {
                Validation::Validated
            } else {
                Validation::Incorrect
            };
            (Some(l), v)
        }
        Err(Error::Timeout) => (None, Validation::Timeout),
        Err(e) => {
            return Err(e).with_context(|| format!("learning {bench} with {}", cfg.algorithm))
        }
    };
    let stats = sul.stats();
    info!("{bench} {} seed {seed}: {validation}", cfg.algorithm);
    let result = ExperimentResult {
        bench: bench.to_string(),
        algorithm: cfg.algorithm.to_string(),
        params: (cfg.algorithm == Algorithm::Ccwl).then(|| params.to_string()),
        seed,
        states: learned.as_ref().map_or(0, LearnedSystem::states),
        transitions: learned.as_ref().map_or(0, LearnedSystem::transitions),
        component_states: learned
            .as_ref()
            .map_or_else(Vec::new, LearnedSystem::component_states),
        oq_resets: stats.oq_resets,
        oq_steps: stats.oq_steps,
        eq_count: stats.eq_count,
        eq_resets: stats.eq_resets,
        eq_steps: stats.eq_steps,
        learner_time,
        wall_time: wall.as_secs_f64(),
        validation,
        input_alphabet,
        components,
        sul_states,
        max_cex_len: stats.max_cex_len,
    };
    Ok(Outcome { result, learned })
}

/// Column means over instances, with validation outcomes counted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub instances: usize,
    pub states: f64,
    pub transitions: f64,
    pub oq_resets: f64,
    pub oq_steps: f64,
    pub eq_count: f64,
    pub eq_resets: f64,
    pub eq_steps: f64,
    pub learner_time: f64,
    pub validated: usize,
    pub incorrect: usize,
    pub timeout: usize,
}

impl Aggregate {
    pub fn of(rows: &[ExperimentResult]) -> Self {
        let n = rows.len();
        let mean = |f: &dyn Fn(&ExperimentResult) -> f64| {
            if n == 0 {
                0.0
            } else {
                rows.iter().map(f).sum::<f64>() / n as f64
            }
        };
        let count = |v: Validation| rows.iter().filter(|r| r.validation == v).count();
        Aggregate {
            instances: n,
            states: mean(&|r| r.states as f64),
            transitions: mean(&|r| r.transitions as f64),
            oq_resets: mean(&|r| r.oq_resets as f64),
            oq_steps: mean(&|r| r.oq_steps as f64),
            eq_count: mean(&|r| r.eq_count as f64),
            eq_resets: mean(&|r| r.eq_resets as f64),
            eq_steps: mean(&|r| r.eq_steps as f64),
            learner_time: mean(&|r| r.learner_time),
            validated: count(Validation::Validated),
            incorrect: count(Validation::Incorrect),
            timeout: count(Validation::Timeout),
        }
    }

    /// Validated / incorrect / timed out.
    pub fn validation_triple(&self) -> String {
        format!("{}/{}/{}", self.validated, self.incorrect, self.timeout)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Batch {
    pub rows: Vec<ExperimentResult>,
    pub aggregate: Aggregate,
}

/// Runs every seed of `cfg` on the worker pool; rows keep seed order.
pub fn run_batch(cfg: &ExperimentConfig) -> Result<Batch> {
    cfg.check()?;
    let rows = cfg
        .seeds
        .par_iter()
        .map(|s| run_instance(cfg, *s).map(|o| o.result))
        .collect::<Result<Vec<_>>>()?;
    Ok(Batch {
        aggregate: Aggregate::of(&rows),
        rows,
    })
}

/// Serializes a learned system in the text format.
pub fn serialize_learned(l: &LearnedSystem) -> Result<String> {
    Ok(match &l.learned {
        Learned::Monolithic(m) => mmnlearn_core::format::write_moore(m)?,
        Learned::Network(n) => mmnlearn_core::format::write_mmn(n)?,
    })
}
