mod common;

use common::{brute_value, rat, reversed_value};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reprep::anchoring::anchor_transform;
use reprep::game::{classical_value, eval_deterministic, library, Budget, DeterministicStrategy};
use reprep::repetition::{product_strategy, repeat_game, repeated_classical_value, win_probability, WinEvent};
use reprep::scalar::pow;

#[test]
fn chsh_twice() {
    let rg = repeat_game(&library::chsh(), 2).unwrap();
    let g2 = rg.materialize().unwrap();
    assert_eq!(brute_value(g2), rat(10, 16));
    assert_eq!(repeated_classical_value(&library::chsh(), 2, Budget::default()).unwrap().value, rat(10, 16));
}

#[test]
fn anchored_chsh_twice_matches_reversed_enumeration() {
    let g = anchor_transform(&library::chsh(), &rat(1, 4)).unwrap();
    let rg = repeat_game(&g, 2).unwrap();
    let v = repeated_classical_value(&g, 2, Budget::default()).unwrap().value;
    assert_eq!(v, reversed_value(rg.materialize().unwrap()));
    assert_eq!(v, rat(1553, 2048));
}

#[test]
fn sandwich_on_small_games() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..15 {
        let g = library::random_game(&mut rng, 2, 2);
        let val = classical_value(&g, Budget::default()).unwrap().value;
        let v2 = repeated_classical_value(&g, 2, Budget::default()).unwrap().value;
        assert!(pow(&val, 2) <= v2 && v2 <= val);
        assert_eq!(v2, reversed_value(repeat_game(&g, 2).unwrap().materialize().unwrap()));
    }
}

#[test]
fn full_event_matches_materialized_game() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..10 {
        let g = library::random_game(&mut rng, 2, 2);
        let rg = repeat_game(&g, 2).unwrap();
        let g2 = rg.materialize().unwrap();
        for _ in 0..5 {
            let maps: Vec<Vec<usize>> = (0..2)
                .map(|t| (0..g2.questions(t).len()).map(|_| rng.gen_range(0..g2.answers(t).len())).collect())
                .collect();
            let s = DeterministicStrategy::new(g2, maps).unwrap();
            let all = WinEvent::new([0, 1], 2).unwrap();
            assert_eq!(win_probability(&rg, &s, &all).unwrap(), eval_deterministic(g2, &s).unwrap());
        }
    }
}

#[test]
fn product_strategy_multiplies() {
    let g = library::chsh();
    let best = classical_value(&g, Budget::default()).unwrap().strategy;
    let rg = repeat_game(&g, 3).unwrap();
    let s = product_strategy(&rg, &vec![best; 3]).unwrap();
    let all = WinEvent::new([0, 1, 2], 3).unwrap();
    assert_eq!(win_probability(&rg, &s, &all).unwrap(), rat(27, 64));
    assert_eq!(win_probability(&rg, &s, &WinEvent::new([1], 3).unwrap()).unwrap(), rat(3, 4));
}

#[test]
fn one_based_parsing() {
    let c = WinEvent::parse_one_based("1,3", 3).unwrap();
    assert_eq!(c.coords(), vec![0, 2]);
    assert_eq!(c.free(), vec![1]);
    assert!(WinEvent::parse_one_based("0", 3).is_err());
    assert!(WinEvent::parse_one_based("4", 3).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn win_probability_shrinks_with_more_coordinates(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = library::random_game(&mut rng, 2, 2);
        let rg = repeat_game(&g, 3).unwrap();
        let g3 = rg.materialize().unwrap();
        let maps: Vec<Vec<usize>> = (0..2)
            .map(|t| (0..g3.questions(t).len()).map(|_| rng.gen_range(0..g3.answers(t).len())).collect())
            .collect();
        let s = DeterministicStrategy::new(g3, maps).unwrap();
        let small = WinEvent::new([rng.gen_range(0..3)], 3).unwrap();
        let mut coords = small.coords();
        coords.push(rng.gen_range(0..3));
        let big = WinEvent::new(coords, 3).unwrap();
        prop_assert!(small.is_subset(&big));
        prop_assert!(win_probability(&rg, &s, &big).unwrap() <= win_probability(&rg, &s, &small).unwrap());
    }

    #[test]
    fn repeated_value_is_monotone_in_n(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = library::random_game(&mut rng, 2, 2);
        let v1 = repeated_classical_value(&g, 1, Budget::default()).unwrap().value;
        let v2 = repeated_classical_value(&g, 2, Budget::default()).unwrap().value;
        prop_assert!(v2 <= v1);
        prop_assert!(pow(&v1, 2) <= v2);
    }
}
