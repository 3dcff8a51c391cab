//! Evolutionary algorithm over candidate private keys.
//!
//! Each generation is rebuilt from fixed operator counts. Parents are drawn
//! uniformly from the top `truncation_fraction` of the cost-ranked
//! population; the first selection slot always carries the current best
//! (elitism). All random draws happen on the coordinating thread in a fixed
//! order, and only cost evaluation is farmed out to the [`Executor`], so a
//! seeded run is identical for any worker count.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::aag::{cost, AagInstance, CostVector};
use crate::error::{Error, Result};
use crate::harness::parallel::Executor;
use crate::harness::seed::{RunSeed, SearchRng};
use crate::heuristics::{apply_chain, apply_heuristic, HeuristicChain, HeuristicId};
use crate::pcgroup::{free_reduce, GroupSpec, Word};

/// Default cap on the number of letters in a candidate word.
pub const DEFAULT_LETTER_CAP: usize = 10_000;

/// Offspring per generation for each operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorCounts {
    pub h1: usize,
    pub h2: usize,
    pub h3: usize,
    pub h4: usize,
    pub h5: usize,
    pub h6: usize,
    pub crossover: usize,
    pub selection: usize,
    pub chain: usize,
}

impl Default for OperatorCounts {
    fn default() -> Self {
        OperatorCounts {
            h1: 6,
            h2: 1,
            h3: 1,
            h4: 5,
            h5: 1,
            h6: 1,
            crossover: 4,
            selection: 2,
            chain: 4,
        }
    }
}

impl OperatorCounts {
    pub fn total(&self) -> usize {
        self.h1
            + self.h2
            + self.h3
            + self.h4
            + self.h5
            + self.h6
            + self.crossover
            + self.selection
            + self.chain
    }

    fn heuristic_counts(&self) -> [(HeuristicId, usize); 6] {
        [
            (HeuristicId::H1, self.h1),
            (HeuristicId::H2, self.h2),
            (HeuristicId::H3, self.h3),
            (HeuristicId::H4, self.h4),
            (HeuristicId::H5, self.h5),
            (HeuristicId::H6, self.h6),
        ]
    }
}

/// Origin of a population member.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Operator {
    Initial,
    Heuristic(HeuristicId),
    Crossover,
    Selection,
    Chain,
}

impl Operator {
    /// Column order of [`Attribution`].
    pub const COLUMNS: [&'static str; 10] = [
        "initial",
        "h1",
        "h2",
        "h3",
        "h4",
        "h5",
        "h6",
        "crossover",
        "selection",
        "chain",
    ];

    fn slot(self) -> usize {
        match self {
            Operator::Initial => 0,
            Operator::Heuristic(h) => h.number(),
            Operator::Crossover => 7,
            Operator::Selection => 8,
            Operator::Chain => 9,
        }
    }
}

/// How many members of a generation each operator produced.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attribution(pub [usize; 10]);

impl Attribution {
    fn record(&mut self, op: Operator) {
        self.0[op.slot()] += 1;
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn get(&self, op: Operator) -> usize {
        self.0[op.slot()]
    }

    /// Whether this generation was assembled exactly from `counts`.
    pub fn matches(&self, counts: &OperatorCounts) -> bool {
        let expected = [
            0,
            counts.h1,
            counts.h2,
            counts.h3,
            counts.h4,
            counts.h5,
            counts.h6,
            counts.crossover,
            counts.selection,
            counts.chain,
        ];
        self.0 == expected
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EaConfig {
    pub population_size: usize,
    pub truncation_fraction: f64,
    pub counts: OperatorCounts,
    pub maxsteps: usize,
    pub initial_word_length: usize,
    pub injected_chain: HeuristicChain,
    pub letter_cap: usize,
}

impl Default for EaConfig {
    fn default() -> Self {
        EaConfig {
            population_size: 25,
            truncation_fraction: 0.40,
            counts: OperatorCounts::default(),
            maxsteps: 1250,
            initial_word_length: 10,
            injected_chain: HeuristicChain::single(HeuristicId::H2),
            letter_cap: DEFAULT_LETTER_CAP,
        }
    }
}

impl EaConfig {
    pub fn with_chain(mut self, chain: HeuristicChain) -> Self {
        self.injected_chain = chain;
        self
    }

    pub fn with_maxsteps(mut self, maxsteps: usize) -> Self {
        self.maxsteps = maxsteps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if self.counts.total() != self.population_size {
            return bad(format!(
                "operator counts sum to {}, population size is {}",
                self.counts.total(),
                self.population_size
            ));
        }
        if !(self.truncation_fraction > 0.0 && self.truncation_fraction <= 1.0) {
            return bad(format!(
                "truncation fraction {} outside (0, 1]",
                self.truncation_fraction
            ));
        }
        if self.maxsteps == 0 {
            return bad("maxsteps must be at least 1".into());
        }
        if self.counts.selection == 0 {
            return bad("at least one selection slot is needed for elitism".into());
        }
        if self.letter_cap == 0 {
            return bad("letter cap must be positive".into());
        }
        Ok(())
    }

    /// Size of the parent pool.
    pub fn parent_pool(&self, population: usize) -> usize {
        ((self.truncation_fraction * population as f64).ceil() as usize).clamp(1, population.max(1))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EaRunResult {
    pub success: bool,
    pub generations_used: usize,
    pub best_cost: CostVector,
    pub best_word: Word,
    pub seed: RunSeed,
}

/// One line of the per-run trace.
#[derive(Clone, Debug, PartialEq)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_cost: CostVector,
    pub best_word: Word,
    pub attribution: Attribution,
}

#[derive(Clone, Debug)]
pub struct Ranked {
    pub word: Word,
    pub cost: CostVector,
}

/// Stable ascending sort by cost; ties keep their order.
pub fn sort_ranked(pop: &mut [Ranked]) {
    pop.sort_by(|a, b| a.cost.cmp(&b.cost));
}

/// Evaluates and ranks a population.
pub fn rank_population(
    spec: &GroupSpec,
    inst: &AagInstance,
    words: Vec<Word>,
    exec: &Executor,
) -> Vec<Ranked> {
    let costs = exec.map(&words, |w| cost(spec, inst, w));
    let mut pop: Vec<Ranked> = words
        .into_iter()
        .zip(costs)
        .map(|(word, cost)| Ranked { word, cost })
        .collect();
    sort_ranked(&mut pop);
    pop
}

/// One-point crossover: `w1[..r1] w2[r2..]` or `w2[..r2] w1[r1..]`, chosen
/// uniformly, with `r1 ∈ [1, |w1|]` and `r2 ∈ [1, |w2|]` (0 for an empty
/// word). Draw order: `r1`, `r2`, choice.
pub fn crossover<R: Rng + ?Sized>(w1: &Word, w2: &Word, rng: &mut R) -> Word {
    let (a, b) = (w1.letters(), w2.letters());
    let r1 = if a.is_empty() {
        0
    } else {
        rng.gen_range(1..=a.len())
    };
    let r2 = if b.is_empty() {
        0
    } else {
        rng.gen_range(1..=b.len())
    };
    crossover_at(w1, w2, r1, r2, rng.gen_bool(0.5))
}

/// The splice for fixed cut points; `first` selects `w1[..r1] w2[r2..]`.
pub fn crossover_at(w1: &Word, w2: &Word, r1: usize, r2: usize, first: bool) -> Word {
    let (a, b) = (w1.letters(), w2.letters());
    if first {
        free_reduce(a[..r1].iter().chain(&b[r2..]).copied())
    } else {
        free_reduce(b[..r2].iter().chain(&a[r1..]).copied())
    }
}

/// Runs the EA from a random initial population.
pub fn run_ea(
    spec: &GroupSpec,
    inst: &AagInstance,
    cfg: &EaConfig,
    seed: RunSeed,
    exec: &Executor,
) -> Result<EaRunResult> {
    run_ea_traced(spec, inst, cfg, seed, exec, None).map(|(r, _)| r)
}

/// Runs the EA and returns the per-generation trace. `initial` replaces the
/// random first generation when given.
pub fn run_ea_traced(
    spec: &GroupSpec,
    inst: &AagInstance,
    cfg: &EaConfig,
    seed: RunSeed,
    exec: &Executor,
    initial: Option<Vec<Word>>,
) -> Result<(EaRunResult, Vec<GenerationRecord>)> {
    cfg.validate()?;
    let mut rng = seed.rng();
    let words = match initial {
        Some(ws) => {
            if ws.len() != cfg.population_size {
                return Err(Error::InvalidParams(format!(
                    "initial population has {} words, expected {}",
                    ws.len(),
                    cfg.population_size
                )));
            }
            ws.into_iter()
                .map(|w| free_reduce(w.into_letters()))
                .collect()
        }
        None => (0..cfg.population_size)
            .map(|_| spec.random_word_of_length(cfg.initial_word_length, &mut rng))
            .collect(),
    };
    let mut pop = rank_population(spec, inst, words, exec);
    let mut attribution = Attribution::default();
    for _ in 0..cfg.population_size {
        attribution.record(Operator::Initial);
    }
    let mut trace = vec![GenerationRecord {
        generation: 1,
        best_cost: pop[0].cost.clone(),
        best_word: pop[0].word.clone(),
        attribution,
    }];
    let mut generation = 1;
    while !pop[0].cost.is_solved() && generation < cfg.maxsteps {
        generation += 1;
        let (next, attribution) = next_generation(spec, inst, cfg, &pop, &mut rng, exec);
        pop = next;
        trace.push(GenerationRecord {
            generation,
            best_cost: pop[0].cost.clone(),
            best_word: pop[0].word.clone(),
            attribution,
        });
    }
    let best = &pop[0];
    Ok((
        EaRunResult {
            success: best.cost.is_solved(),
            generations_used: generation,
            best_cost: best.cost.clone(),
            best_word: best.word.clone(),
            seed,
        },
        trace,
    ))
}

fn capped<F: FnMut() -> Word>(cap: usize, parent: &Word, mut op: F) -> Word {
    let child = op();
    if child.len() <= cap {
        return child;
    }
    let retry = op();
    if retry.len() <= cap {
        retry
    } else {
        parent.clone()
    }
}

fn next_generation(
    spec: &GroupSpec,
    inst: &AagInstance,
    cfg: &EaConfig,
    pop: &[Ranked],
    rng: &mut SearchRng,
    exec: &Executor,
) -> (Vec<Ranked>, Attribution) {
    let pool = cfg.parent_pool(pop.len());
    let pick = |rng: &mut SearchRng| rng.gen_range(0..pool);
    let mut attribution = Attribution::default();
    let mut kept: Vec<Ranked> = Vec::with_capacity(cfg.counts.selection);
    let mut fresh: Vec<Word> = Vec::with_capacity(cfg.population_size);

    kept.push(pop[0].clone());
    attribution.record(Operator::Selection);
    for _ in 1..cfg.counts.selection {
        kept.push(pop[pick(rng)].clone());
        attribution.record(Operator::Selection);
    }
    for (h, count) in cfg.counts.heuristic_counts() {
        for _ in 0..count {
            let parent = &pop[pick(rng)].word;
            fresh.push(capped(cfg.letter_cap, parent, || {
                apply_heuristic(h, spec, inst, parent, rng)
            }));
            attribution.record(Operator::Heuristic(h));
        }
    }
    for _ in 0..cfg.counts.crossover {
        let p1 = &pop[pick(rng)].word;
        let p2 = &pop[pick(rng)].word;
        fresh.push(capped(cfg.letter_cap, p1, || crossover(p1, p2, rng)));
        attribution.record(Operator::Crossover);
    }
    for _ in 0..cfg.counts.chain {
        let parent = &pop[pick(rng)].word;
        fresh.push(capped(cfg.letter_cap, parent, || {
            apply_chain(&cfg.injected_chain, spec, inst, parent, rng)
        }));
        attribution.record(Operator::Chain);
    }

    let costs = exec.map(&fresh, |w| cost(spec, inst, w));
    let mut next = kept;
    next.extend(
        fresh
            .into_iter()
            .zip(costs)
            .map(|(word, cost)| Ranked { word, cost }),
    );
    sort_ranked(&mut next);
    (next, attribution)
}
