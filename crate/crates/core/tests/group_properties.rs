mod common;

use num_bigint::BigUint;
use num_traits::Zero;
use polyhh_core::pcgroup::builtin::builtin_group;
use polyhh_core::pcgroup::{concat_words, free_reduce, invert_word, Letter, Word};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn axioms_and_oracles_hold_for_builtin_groups() {
    for d in [1, 2, 3] {
        let g = builtin_group(d).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(d as u64);
        common::group_property_suite(&g, 10_000, &mut rng).unwrap_or_else(|e| panic!("d={d}: {e}"));
    }
}

#[test]
fn infinite_dihedral_sanity() {
    let g = builtin_group(1).unwrap();
    let u: Word = "1 1".parse().unwrap();
    assert_eq!(g.evaluate_word(&u), g.identity());
    for k in -40i32..=40 {
        let letter = if k >= 0 { "2" } else { "-2" };
        let w: Word = vec![letter; k.unsigned_abs() as usize]
            .join(" ")
            .parse()
            .unwrap();
        assert_eq!(
            g.nf_length(&g.evaluate_word(&w)),
            BigUint::from(k.unsigned_abs())
        );
    }
}

/// Inversion moves the `O` part through the unit action, so `ℓ` is not
/// inversion-symmetric once the action is not a signed permutation.
#[test]
fn length_is_not_inversion_symmetric_under_golden_action() {
    let g = builtin_group(2).unwrap();
    let e = g.evaluate_word(&"-1 2 -3".parse().unwrap());
    assert_eq!(g.nf_length(&e), BigUint::from(3u32));
    assert_eq!(g.nf_length(&g.inverse(&e)), BigUint::from(4u32));
}

fn raw_letters(n: usize, max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((1..=n, any::<bool>()), 0..max_len)
        .prop_map(|v| v.into_iter().map(|(i, p)| Letter::new(i, p)).collect())
}

/// Cancels adjacent inverse pairs in a random order until none remain.
fn reduce_in_random_order(mut letters: Vec<Letter>, picks: &[usize]) -> Vec<Letter> {
    let mut k = 0;
    loop {
        let spots: Vec<usize> = (0..letters.len().saturating_sub(1))
            .filter(|&i| letters[i].inverse() == letters[i + 1])
            .collect();
        if spots.is_empty() {
            return letters;
        }
        let i = spots[picks.get(k).copied().unwrap_or(0) % spots.len()];
        k += 1;
        letters.drain(i..i + 2);
    }
}

proptest! {
    #[test]
    fn evaluation_distributes(d in 1usize..=3, a in raw_letters(5, 20), b in raw_letters(5, 20)) {
        let g = builtin_group(d).unwrap();
        let n = g.generator_count();
        let fix = |v: Vec<Letter>| Word::reduced(v.into_iter().filter(|l| l.index() <= n));
        let (wa, wb) = (fix(a), fix(b));
        let ea = g.evaluate_word(&wa);
        prop_assert_eq!(g.evaluate_word(&concat_words(&wa, &wb)), g.multiply(&ea, &g.evaluate_word(&wb)));
        prop_assert_eq!(g.evaluate_word(&invert_word(&wa)), g.inverse(&ea));
    }

    #[test]
    fn length_vanishes_only_at_identity(d in 1usize..=3, a in raw_letters(5, 30)) {
        let g = builtin_group(d).unwrap();
        let n = g.generator_count();
        let w = Word::reduced(a.into_iter().filter(|l| l.index() <= n));
        let e = g.evaluate_word(&w);
        prop_assert_eq!(g.nf_length(&e).is_zero(), e == g.identity());
    }

    #[test]
    fn dihedral_length_is_inversion_symmetric(a in raw_letters(2, 40)) {
        let g = builtin_group(1).unwrap();
        let e = g.evaluate_word(&Word::reduced(a));
        prop_assert_eq!(g.nf_length(&g.inverse(&e)), g.nf_length(&e));
    }

    #[test]
    fn free_reduction_is_idempotent_and_confluent(
        a in raw_letters(3, 40),
        picks in prop::collection::vec(any::<usize>(), 0..40),
    ) {
        let once = free_reduce(a.iter().copied());
        prop_assert!(once.is_reduced());
        prop_assert_eq!(free_reduce(once.letters().iter().copied()), once.clone());
        prop_assert_eq!(reduce_in_random_order(a, &picks), once.into_letters());
    }
}
