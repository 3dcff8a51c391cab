//! Generate-and-test search over heuristic chains.
//!
//! Each iteration mutates the incumbent chain, injects it into the EA and
//! scores it on the training instances. A chain that beats the best training
//! score is also scored on the testing instances, against the initial
//! chain's testing score, which is computed once on first demand; a testing
//! improvement makes it the new best. Any chain that does not become best is
//! kept as incumbent with probability `p_h`, otherwise the search rewinds to
//! the best chain. If the best chain is not the initial one, both are finally
//! run on the validation instances, where the objective ranks success rate
//! first.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::aag::AagInstance;
use crate::ea::{run_ea, EaConfig, EaRunResult};
use crate::error::{Error, Result};
use crate::harness::parallel::Executor;
use crate::harness::seed::RunSeed;
use crate::heuristics::{HeuristicChain, HeuristicId};
use crate::pcgroup::GroupSpec;

/// Edit budget of the chain generator.
pub const CHAIN_EDIT_CAP: usize = 10_000;

/// Three-component heuristic objective, compared lexicographically; lower is
/// better.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector(pub [f64; 3]);

impl ObjectiveVector {
    pub fn swapped(self) -> Self {
        let [a, b, c] = self.0;
        ObjectiveVector([b, a, c])
    }
}

impl Eq for ObjectiveVector {}

impl Ord for ObjectiveVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    }
}

impl PartialOrd for ObjectiveVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ObjectiveVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

/// Aggregate of a batch of EA runs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseMetrics {
    pub runs: usize,
    pub successes: usize,
    /// Mean best cost `c` over unsuccessful runs; 0 if all succeeded.
    pub mean_fail_cost: f64,
    /// Mean generations over successful runs; 0 if none succeeded.
    pub mean_success_generations: f64,
}

impl PhaseMetrics {
    pub fn from_results(results: &[EaRunResult]) -> Result<Self> {
        if results.is_empty() {
            return Err(Error::EmptyResults);
        }
        let (ok, failed): (Vec<&EaRunResult>, Vec<&EaRunResult>) =
            results.iter().partition(|r| r.success);
        let mean = |xs: Vec<f64>| {
            if xs.is_empty() {
                0.0
            } else {
                xs.iter().sum::<f64>() / xs.len() as f64
            }
        };
        Ok(PhaseMetrics {
            runs: results.len(),
            successes: ok.len(),
            mean_fail_cost: mean(failed.iter().map(|r| r.best_cost.sum_f64()).collect()),
            mean_success_generations: mean(ok.iter().map(|r| r.generations_used as f64).collect()),
        })
    }

    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.runs as f64
    }

    /// `(mean fail cost, -success rate, mean success generations)`.
    pub fn objective(&self) -> ObjectiveVector {
        ObjectiveVector([
            self.mean_fail_cost,
            -self.success_rate(),
            self.mean_success_generations,
        ])
    }

    /// The objective with its first two components swapped.
    pub fn validation_objective(&self) -> ObjectiveVector {
        self.objective().swapped()
    }
}

/// `[success%, mean fail cost, mean generations]`.
impl fmt::Display for PhaseMetrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}%, {}, {}]",
            fmt_num(100.0 * self.success_rate()),
            fmt_num(self.mean_fail_cost),
            fmt_num(self.mean_success_generations)
        )
    }
}

fn fmt_num(x: f64) -> String {
    let s = format!("{x:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

pub fn objective(results: &[EaRunResult]) -> Result<ObjectiveVector> {
    Ok(PhaseMetrics::from_results(results)?.objective())
}

pub fn validation_objective(results: &[EaRunResult]) -> Result<ObjectiveVector> {
    Ok(PhaseMetrics::from_results(results)?.validation_objective())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialChain {
    Given(HeuristicChain),
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HhConfig {
    /// Number of chains examined.
    pub c_max: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub n_valid: usize,
    pub p_insert: f64,
    pub p_substitute: f64,
    pub p_delete: f64,
    /// Probability of keeping a non-improving chain as incumbent.
    pub p_accept: f64,
    pub initial_chain: InitialChain,
    /// Length range of a random initial chain.
    pub random_init_len: (usize, usize),
    pub train_maxsteps: usize,
    pub test_maxsteps: usize,
    pub valid_maxsteps: usize,
    /// Optional wall-clock budget in seconds for the search loop.
    pub time_budget_secs: Option<f64>,
}

impl Default for HhConfig {
    fn default() -> Self {
        HhConfig {
            c_max: 20,
            n_train: 15,
            n_test: 50,
            n_valid: 50,
            p_insert: 0.4,
            p_substitute: 0.4,
            p_delete: 0.2,
            p_accept: 0.1,
            initial_chain: InitialChain::Given(HeuristicChain::single(HeuristicId::H2)),
            random_init_len: (2, 10),
            train_maxsteps: 50,
            test_maxsteps: 50,
            valid_maxsteps: 1250,
            time_budget_secs: None,
        }
    }
}

impl HhConfig {
    /// Phase `maxsteps` for a polynomial degree: 50/1250 up to degree 3,
    /// 100/2500 above.
    pub fn for_degree(degree: usize) -> Self {
        let (search, valid) = if degree <= 3 { (50, 1250) } else { (100, 2500) };
        HhConfig {
            train_maxsteps: search,
            test_maxsteps: search,
            valid_maxsteps: valid,
            ..HhConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        let probs = [
            self.p_insert,
            self.p_substitute,
            self.p_delete,
            self.p_accept,
        ];
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return bad("probabilities must lie in [0, 1]");
        }
        if (self.p_insert + self.p_substitute + self.p_delete - 1.0).abs() > 1e-9 {
            return bad("p_insert + p_substitute + p_delete must equal 1");
        }
        if self.c_max == 0 {
            return bad("c_max must be at least 1");
        }
        if self.n_train == 0 || self.n_test == 0 || self.n_valid == 0 {
            return bad("every phase needs at least one instance");
        }
        if self.train_maxsteps == 0 || self.test_maxsteps == 0 || self.valid_maxsteps == 0 {
            return bad("phase maxsteps must be positive");
        }
        let (lo, hi) = self.random_init_len;
        if lo == 0 || lo > hi {
            return bad("random initial chain length range must satisfy 1 <= lo <= hi");
        }
        if let InitialChain::Given(c) = &self.initial_chain {
            if c.is_empty() {
                return bad("initial chain is empty");
            }
        }
        Ok(())
    }
}

/// Chain-edit probabilities of the generator.
#[derive(Clone, Copy, Debug)]
pub struct EditProbabilities {
    pub insert: f64,
    pub substitute: f64,
    pub delete: f64,
}

impl From<&HhConfig> for EditProbabilities {
    fn from(c: &HhConfig) -> Self {
        EditProbabilities {
            insert: c.p_insert,
            substitute: c.p_substitute,
            delete: c.p_delete,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainEdit {
    Insert,
    Substitute,
    Delete,
}

impl EditProbabilities {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> ChainEdit {
        let x: f64 = rng.gen();
        if x < self.insert {
            ChainEdit::Insert
        } else if x < self.insert + self.substitute {
            ChainEdit::Substitute
        } else {
            ChainEdit::Delete
        }
    }
}

/// Applies one edit at `pos` (ignored deletions of the last element are
/// reported as `false`).
pub fn edit_chain(ids: &mut Vec<HeuristicId>, edit: ChainEdit, pos: usize, h: HeuristicId) -> bool {
    match edit {
        ChainEdit::Insert => ids.insert(pos, h),
        ChainEdit::Substitute => ids[pos] = h,
        ChainEdit::Delete => {
            if ids.len() <= 1 {
                return false;
            }
            ids.remove(pos);
        }
    }
    true
}

/// Mutates a copy of `incumbent` until it is new, non-empty and not a pure
/// deletion chain `H3^k`.
///
/// Each step draws the edit kind, then a position, then (except for
/// deletions) a heuristic uniformly from H1–H7. Deleting the only element is
/// skipped.
pub fn generate_chain<R: Rng + ?Sized>(
    incumbent: &HeuristicChain,
    seen: &HashSet<HeuristicChain>,
    probs: EditProbabilities,
    rng: &mut R,
) -> Result<HeuristicChain> {
    let mut ids = incumbent.ids().to_vec();
    let acceptable = |ids: &[HeuristicId]| {
        !ids.is_empty() && !ids.iter().all(|&h| h == HeuristicId::H3) && {
            let c = HeuristicChain::new(ids.to_vec()).expect("non-empty");
            !seen.contains(&c)
        }
    };
    for _ in 0..CHAIN_EDIT_CAP {
        if acceptable(&ids) {
            return HeuristicChain::new(ids);
        }
        let edit = probs.draw(rng);
        let pos = match edit {
            ChainEdit::Insert => rng.gen_range(0..=ids.len()),
            _ => rng.gen_range(0..ids.len()),
        };
        let h = match edit {
            ChainEdit::Delete => HeuristicId::H3,
            _ => HeuristicId::random(rng),
        };
        edit_chain(&mut ids, edit, pos, h);
    }
    if acceptable(&ids) {
        return HeuristicChain::new(ids);
    }
    Err(Error::ChainSpaceExhausted(CHAIN_EDIT_CAP))
}

/// A random chain of length in `[lo, hi]`, redrawn while it is `H3^k`.
pub fn random_chain<R: Rng + ?Sized>(lo: usize, hi: usize, rng: &mut R) -> HeuristicChain {
    loop {
        let len = rng.gen_range(lo..=hi);
        let ids: Vec<HeuristicId> = (0..len).map(|_| HeuristicId::random(rng)).collect();
        let c = HeuristicChain::new(ids).expect("lo >= 1");
        if !c.is_pure_deletion() {
            return c;
        }
    }
}

/// Training, testing and validation instances.
#[derive(Clone, Debug)]
pub struct InstanceSets {
    pub train: Vec<AagInstance>,
    pub test: Vec<AagInstance>,
    pub valid: Vec<AagInstance>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainRecord {
    /// 1-based iteration at which the chain was examined.
    pub iteration: usize,
    pub chain: HeuristicChain,
    pub train: PhaseMetrics,
    pub test: Option<PhaseMetrics>,
    /// Became (or stayed, for iteration 1) the best chain.
    pub best: bool,
    /// Used as the incumbent for the next mutation.
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub best_chain: HeuristicChain,
    pub initial_chain: HeuristicChain,
    pub best: PhaseMetrics,
    pub initial: PhaseMetrics,
    pub best_objective: ObjectiveVector,
    pub initial_objective: ObjectiveVector,
    /// Whether the best chain beats the initial chain on validation.
    pub improved: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HhRunReport {
    pub records: Vec<ChainRecord>,
    /// 1-based iteration of the best chain.
    pub best_iteration: usize,
    pub best_chain: HeuristicChain,
    /// Testing metrics of the initial chain, if they were ever needed.
    pub initial_test: Option<PhaseMetrics>,
    /// How many times the initial chain was run on the testing set.
    pub initial_test_evaluations: usize,
    pub validation: Option<ValidationReport>,
    pub timed_out: bool,
    pub ea_runs: usize,
    pub elapsed_secs: f64,
}

struct PhaseRunner<'a> {
    spec: &'a GroupSpec,
    ea_cfg: &'a EaConfig,
    seed: RunSeed,
    exec: &'a Executor,
    ea_runs: usize,
}

impl PhaseRunner<'_> {
    fn run(
        &mut self,
        chain: &HeuristicChain,
        instances: &[AagInstance],
        maxsteps: usize,
        path: &str,
    ) -> Result<PhaseMetrics> {
        let cfg = self
            .ea_cfg
            .clone()
            .with_chain(chain.clone())
            .with_maxsteps(maxsteps);
        let results = self.exec.map_indexed(instances, |j, inst| {
            let seed = self.seed.child(&format!("{path}/inst{j}"));
            run_ea(self.spec, inst, &cfg, seed, self.exec)
        });
        self.ea_runs += instances.len();
        let results = results.into_iter().collect::<Result<Vec<_>>>()?;
        PhaseMetrics::from_results(&results)
    }
}

/// Runs the chain search. The EA settings other than the chain and
/// `maxsteps` come from `ea_cfg`.
pub fn run_hyperheuristic(
    spec: &GroupSpec,
    sets: &InstanceSets,
    ea_cfg: &EaConfig,
    cfg: &HhConfig,
    seed: RunSeed,
    exec: &Executor,
) -> Result<HhRunReport> {
    cfg.validate()?;
    ea_cfg.validate()?;
    if sets.train.is_empty() || sets.test.is_empty() || sets.valid.is_empty() {
        return Err(Error::InvalidParams(
            "every instance set must be non-empty".into(),
        ));
    }
    let start = Instant::now();
    let mut rng = seed.child("chains").rng();
    let probs = EditProbabilities::from(cfg);
    let mut runner = PhaseRunner {
        spec,
        ea_cfg,
        seed,
        exec,
        ea_runs: 0,
    };

    let mut records: Vec<ChainRecord> = Vec::new();
    let mut seen: HashSet<HeuristicChain> = HashSet::new();
    let mut chains: Vec<HeuristicChain> = Vec::new();
    let mut best = 0usize; // index into `chains`
    let mut incumbent = 0usize;
    let mut best_train: Option<PhaseMetrics> = None;
    let mut best_test: Option<PhaseMetrics> = None;
    let mut initial_test: Option<PhaseMetrics> = None;
    let mut initial_test_evaluations = 0;
    let mut timed_out = false;

    for i in 1..=cfg.c_max {
        if let Some(budget) = cfg.time_budget_secs {
            if start.elapsed().as_secs_f64() > budget {
                timed_out = true;
                break;
            }
        }
        let chain = if i == 1 {
            match &cfg.initial_chain {
                InitialChain::Given(c) => c.clone(),
                InitialChain::Random => {
                    random_chain(cfg.random_init_len.0, cfg.random_init_len.1, &mut rng)
                }
            }
        } else {
            generate_chain(&chains[incumbent], &seen, probs, &mut rng)?
        };
        seen.insert(chain.clone());
        chains.push(chain.clone());
        let idx = chains.len() - 1;

        let train = runner.run(
            &chain,
            &sets.train,
            cfg.train_maxsteps,
            &format!("train/iter{i}"),
        )?;
        let mut record = ChainRecord {
            iteration: i,
            chain: chain.clone(),
            train,
            test: None,
            best: false,
            accepted: false,
        };
        if i == 1 {
            best_train = Some(train);
            best = idx;
            incumbent = idx;
            record.best = true;
            record.accepted = true;
        } else {
            let train_best = best_train.expect("set at iteration 1");
            let mut became_best = false;
            if train.objective() < train_best.objective() {
                let test = runner.run(
                    &chain,
                    &sets.test,
                    cfg.test_maxsteps,
                    &format!("test/iter{i}"),
                )?;
                record.test = Some(test);
                if initial_test.is_none() {
                    let t = runner.run(&chains[0], &sets.test, cfg.test_maxsteps, "test/iter1")?;
                    initial_test_evaluations += 1;
                    initial_test = Some(t);
                    best_test = Some(t);
                }
                let test_best = best_test.expect("initialised above");
                if test.objective() < test_best.objective() {
                    became_best = true;
                    best = idx;
                    incumbent = idx;
                    best_train = Some(train);
                    best_test = Some(test);
                    record.best = true;
                    record.accepted = true;
                }
            }
            if !became_best {
                if rng.gen_bool(cfg.p_accept) {
                    incumbent = idx;
                    record.accepted = true;
                } else {
                    incumbent = best;
                }
            }
        }
        records.push(record);
    }

    let best_iteration = best + 1;
    let validation = if best_iteration != 1 {
        let b = runner.run(&chains[best], &sets.valid, cfg.valid_maxsteps, "valid/best")?;
        let init = runner.run(&chains[0], &sets.valid, cfg.valid_maxsteps, "valid/initial")?;
        Some(ValidationReport {
            best_chain: chains[best].clone(),
            initial_chain: chains[0].clone(),
            best: b,
            initial: init,
            best_objective: b.validation_objective(),
            initial_objective: init.validation_objective(),
            improved: b.validation_objective() < init.validation_objective(),
        })
    } else {
        None
    };

    Ok(HhRunReport {
        records,
        best_iteration,
        best_chain: chains[best].clone(),
        initial_test,
        initial_test_evaluations,
        validation,
        timed_out,
        ea_runs: runner.ea_runs,
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcgroup::Word;
    use num_bigint::BigUint;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn result(success: bool, gens: usize, c: u32) -> EaRunResult {
        let mut best_cost = crate::aag::CostVector::zero();
        best_cost.sum = BigUint::from(c);
        EaRunResult {
            success,
            generations_used: gens,
            best_cost,
            best_word: Word::empty(),
            seed: RunSeed::derive(0, ""),
        }
    }

    #[test]
    fn objective_examples() {
        let all = [result(true, 4, 0), result(true, 6, 0)];
        assert_eq!(objective(&all).unwrap(), ObjectiveVector([0.0, -1.0, 5.0]));
        assert_eq!(
            validation_objective(&all).unwrap(),
            ObjectiveVector([-1.0, 0.0, 5.0])
        );
        let none = [result(false, 50, 10), result(false, 50, 20)];
        assert_eq!(objective(&none).unwrap(), ObjectiveVector([15.0, 0.0, 0.0]));
        assert_eq!(
            validation_objective(&none).unwrap(),
            ObjectiveVector([0.0, 15.0, 0.0])
        );
        let mixed = [result(false, 50, 12), result(true, 30, 0)];
        assert_eq!(
            objective(&mixed).unwrap(),
            ObjectiveVector([12.0, -0.5, 30.0])
        );
        assert_eq!(
            validation_objective(&mixed).unwrap(),
            ObjectiveVector([-0.5, 12.0, 30.0])
        );
        assert!(matches!(objective(&[]), Err(Error::EmptyResults)));
    }

    #[test]
    fn validation_order_prefers_success_rate() {
        // more successes but slower and with higher leftover cost
        let a = PhaseMetrics {
            runs: 10,
            successes: 9,
            mean_fail_cost: 50.0,
            mean_success_generations: 400.0,
        };
        let b = PhaseMetrics {
            runs: 10,
            successes: 8,
            mean_fail_cost: 5.0,
            mean_success_generations: 100.0,
        };
        assert!(a.validation_objective() < b.validation_objective());
        assert!(a.objective() > b.objective());
    }

    #[test]
    fn metrics_display() {
        let m = PhaseMetrics {
            runs: 50,
            successes: 50,
            mean_fail_cost: 0.0,
            mean_success_generations: 7.88,
        };
        assert_eq!(m.to_string(), "[100%, 0, 7.88]");
        let m = PhaseMetrics {
            runs: 50,
            successes: 30,
            mean_fail_cost: 299.55,
            mean_success_generations: 491.2,
        };
        assert_eq!(m.to_string(), "[60%, 299.55, 491.2]");
    }

    #[test]
    fn forced_substitution() {
        let inc = HeuristicChain::single(HeuristicId::H2);
        let mut ids = inc.ids().to_vec();
        assert!(edit_chain(
            &mut ids,
            ChainEdit::Substitute,
            0,
            HeuristicId::H7
        ));
        assert_eq!(ids, vec![HeuristicId::H7]);
        let mut ids = inc.ids().to_vec();
        assert!(!edit_chain(&mut ids, ChainEdit::Delete, 0, HeuristicId::H3));
        assert_eq!(ids, vec![HeuristicId::H2]);
    }

    #[test]
    fn generated_chains_are_new_and_not_pure_deletion() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let probs = EditProbabilities {
            insert: 0.4,
            substitute: 0.4,
            delete: 0.2,
        };
        let mut seen = HashSet::new();
        let mut inc = HeuristicChain::single(HeuristicId::H2);
        seen.insert(inc.clone());
        for _ in 0..300 {
            let c = generate_chain(&inc, &seen, probs, &mut rng).unwrap();
            assert!(!seen.contains(&c));
            assert!(!c.is_pure_deletion());
            assert!(!c.is_empty());
            seen.insert(c.clone());
            inc = c;
        }
        // an H3 incumbent must still escape H3^k
        let h3 = HeuristicChain::single(HeuristicId::H3);
        let mut seen = HashSet::new();
        seen.insert(h3.clone());
        for s in 0..50 {
            let c = generate_chain(&h3, &seen, probs, &mut ChaCha8Rng::seed_from_u64(s)).unwrap();
            assert!(!c.is_pure_deletion());
        }
    }

    #[test]
    fn random_chains_respect_length() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let c = random_chain(2, 10, &mut rng);
            assert!((2..=10).contains(&c.len()));
            assert!(!c.is_pure_deletion());
        }
    }

    #[test]
    fn config_validation() {
        HhConfig::default().validate().unwrap();
        let c = HhConfig {
            p_delete: 0.3,
            ..HhConfig::default()
        };
        assert!(c.validate().is_err());
        let c = HhConfig {
            c_max: 0,
            ..HhConfig::default()
        };
        assert!(c.validate().is_err());
        let c = HhConfig::for_degree(5);
        assert_eq!((c.train_maxsteps, c.valid_maxsteps), (100, 2500));
        let c = HhConfig::for_degree(2);
        assert_eq!((c.train_maxsteps, c.valid_maxsteps), (50, 1250));
    }
}
