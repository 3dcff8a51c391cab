//! Single-heuristic hillclimbers (length-based attacks).

use serde::{Deserialize, Serialize};

use crate::aag::{cost, AagInstance, CostVector};
use crate::ea::EaRunResult;
use crate::harness::seed::RunSeed;
use crate::heuristics::{apply_heuristic, HeuristicId};
use crate::pcgroup::{GroupSpec, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LbaConfig {
    pub heuristic: HeuristicId,
    pub max_iterations: usize,
    pub initial_word_length: usize,
}

impl LbaConfig {
    pub fn new(heuristic: HeuristicId, max_iterations: usize) -> Self {
        LbaConfig {
            heuristic,
            max_iterations,
            initial_word_length: 10,
        }
    }
}

/// Heuristics swept by default. H7 only makes sense inside chains.
pub const DEFAULT_SWEEP: [HeuristicId; 6] = [
    HeuristicId::H1,
    HeuristicId::H2,
    HeuristicId::H3,
    HeuristicId::H4,
    HeuristicId::H5,
    HeuristicId::H6,
];

/// Runs the hillclimber from a random word of the configured length.
pub fn run_lba(
    spec: &GroupSpec,
    inst: &AagInstance,
    cfg: &LbaConfig,
    seed: RunSeed,
) -> EaRunResult {
    run_lba_traced(spec, inst, cfg, seed, None).0
}

/// Runs the hillclimber; `start` overrides the random initial word. Also
/// returns the cost of every accepted solution, starting with the initial one.
///
/// `generations_used` counts the iterations performed.
pub fn run_lba_traced(
    spec: &GroupSpec,
    inst: &AagInstance,
    cfg: &LbaConfig,
    seed: RunSeed,
    start: Option<Word>,
) -> (EaRunResult, Vec<CostVector>) {
    let mut rng = seed.rng();
    let mut current = match start {
        Some(w) => w,
        None => spec.random_word_of_length(cfg.initial_word_length, &mut rng),
    };
    let mut current_cost = cost(spec, inst, &current);
    let mut accepted = vec![current_cost.clone()];
    let mut iterations = 0;
    while !current_cost.is_solved() && iterations < cfg.max_iterations {
        iterations += 1;
        let candidate = apply_heuristic(cfg.heuristic, spec, inst, &current, &mut rng);
        let candidate_cost = cost(spec, inst, &candidate);
        if candidate_cost < current_cost {
            current = candidate;
            current_cost = candidate_cost;
            accepted.push(current_cost.clone());
        }
    }
    (
        EaRunResult {
            success: current_cost.is_solved(),
            generations_used: iterations,
            best_cost: current_cost,
            best_word: current,
            seed,
        },
        accepted,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aag::{generate_instance, AagParams};
    use crate::pcgroup::builtin::builtin_group;

    #[test]
    fn planted_start_succeeds_without_iterating() {
        let g = builtin_group(2).unwrap();
        let inst =
            generate_instance(&g, AagParams::narrow_short(), RunSeed::derive(1, "i")).unwrap();
        let cfg = LbaConfig::new(HeuristicId::H3, 100);
        let (r, acc) = run_lba_traced(
            &g,
            &inst,
            &cfg,
            RunSeed::derive(1, "l"),
            Some(inst.planted_key.clone()),
        );
        assert!(r.success);
        assert_eq!(r.generations_used, 0);
        assert_eq!(acc.len(), 1);
    }

    #[test]
    fn zero_iterations_returns_initial_cost() {
        let g = builtin_group(1).unwrap();
        let inst =
            generate_instance(&g, AagParams::narrow_short(), RunSeed::derive(2, "i")).unwrap();
        let start: Word = "1 2 2 2".parse().unwrap();
        let cfg = LbaConfig::new(HeuristicId::H2, 0);
        let (r, _) = run_lba_traced(
            &g,
            &inst,
            &cfg,
            RunSeed::derive(2, "l"),
            Some(start.clone()),
        );
        assert_eq!(r.best_cost, cost(&g, &inst, &start));
        assert_eq!(r.best_word, start);
        assert_eq!(r.generations_used, 0);
    }

    #[test]
    fn accepted_costs_strictly_decrease() {
        let g = builtin_group(2).unwrap();
        for s in 0..5 {
            let inst =
                generate_instance(&g, AagParams::narrow_short(), RunSeed::derive(s, "i")).unwrap();
            for h in DEFAULT_SWEEP {
                let (r, acc) = run_lba_traced(
                    &g,
                    &inst,
                    &LbaConfig::new(h, 300),
                    RunSeed::derive(s, "l"),
                    None,
                );
                assert!(acc.windows(2).all(|p| p[1] < p[0]));
                assert_eq!(acc.last().unwrap(), &r.best_cost);
                assert_eq!(r.best_cost, cost(&g, &inst, &r.best_word));
            }
        }
    }
}
