mod common;

use common::{anchored_oracle, brute_value, eval_maps, rat, reversed_value};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reprep::game::{
    classical_value, eval_deterministic, is_anchored, library, nonsignaling_value, validate_game, AnchorSets, Budget,
    DeterministicStrategy, GameFile,
};
use reprep::Game;

#[test]
fn named_game_values() {
    assert_eq!(classical_value(&library::chsh(), Budget::default()).unwrap().value, rat(3, 4));
    assert_eq!(brute_value(&library::chsh()), rat(3, 4));
    assert_eq!(classical_value(&library::ghz(), Budget::default()).unwrap().value, rat(3, 4));
    assert_eq!(brute_value(&library::ghz()), rat(3, 4));
    assert_eq!(classical_value(&library::equality_questions(), Budget::default()).unwrap().value, rat(1, 1));
    assert_eq!(classical_value(&library::constant_predicate(false), Budget::default()).unwrap().value, rat(0, 1));
    let free = library::free_game();
    assert_eq!(classical_value(&free, Budget::default()).unwrap().value, brute_value(&free));
}

#[test]
fn value_matches_full_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let k = rng.gen_range(2..=3);
        let g = library::random_game(&mut rng, k, 3);
        let sol = classical_value(&g, Budget::default()).unwrap();
        assert_eq!(sol.value, brute_value(&g));
        assert_eq!(eval_deterministic(&g, &sol.strategy).unwrap(), sol.value);
        if k == 2 {
            assert_eq!(sol.value, reversed_value(&g));
        }
    }
}

#[test]
fn random_strategies_never_beat_the_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..30 {
        let g = library::random_game(&mut rng, 2, 3);
        let val = classical_value(&g, Budget::default()).unwrap().value;
        for _ in 0..20 {
            let maps: Vec<Vec<usize>> = (0..2)
                .map(|t| (0..g.questions(t).len()).map(|_| rng.gen_range(0..g.answers(t).len())).collect())
                .collect();
            let s = DeterministicStrategy::new(&g, maps.clone()).unwrap();
            let v = eval_deterministic(&g, &s).unwrap();
            assert_eq!(v, eval_maps(&g, &maps));
            assert!(v <= val);
        }
    }
}

#[test]
fn nonsignaling_dominates_classical() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..20 {
        let g = library::random_game(&mut rng, 2, 3);
        let val = reprep::scalar::rational_to_f64(&classical_value(&g, Budget::default()).unwrap().value);
        assert!(nonsignaling_value(&g).unwrap() >= val - 1e-8);
    }
    assert!((nonsignaling_value(&library::chsh()).unwrap() - 1.0).abs() < 1e-8);
}

#[test]
fn budget_is_enforced() {
    assert!(matches!(
        classical_value(&library::chsh(), Budget::new(1)),
        Err(reprep::Error::BudgetExceeded { .. })
    ));
}

#[test]
fn uniform_chsh_is_anchored_on_one_question() {
    let g = library::chsh();
    let anchors = AnchorSets::from_indices(&g, &[vec![0], vec![0]]).unwrap();
    assert_eq!(is_anchored(&g, &anchors), (true, rat(1, 2)));
    assert_eq!(anchored_oracle(&g, &[vec![0], vec![0]]), (true, rat(1, 2)));
}

#[test]
fn correlated_questions_are_not_anchored() {
    let g = library::equality_questions();
    let anchors = AnchorSets::from_indices(&g, &[vec![0], vec![0]]).unwrap();
    assert!(!is_anchored(&g, &anchors).0);
    assert!(!anchored_oracle(&g, &[vec![0], vec![0]]).0);
}

#[test]
fn anchoring_check_matches_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..200 {
        let k = rng.gen_range(2..=3);
        let g = library::random_game(&mut rng, k, 3);
        let sets: Vec<Vec<usize>> = (0..k)
            .map(|t| (0..g.questions(t).len()).filter(|_| rng.gen_bool(0.5)).collect())
            .collect();
        let anchors = AnchorSets::from_indices(&g, &sets).unwrap();
        assert_eq!(is_anchored(&g, &anchors), anchored_oracle(&g, &sets), "{sets:?}");
    }
}

#[test]
fn file_round_trip() {
    for g in [library::chsh(), library::ghz(), library::free_game()] {
        let back = Game::from_json(&g.to_json()).unwrap();
        assert_eq!(back.to_json(), g.to_json());
        validate_game(&GameFile::from_game(&g)).unwrap();
    }
}

fn relax(g: &Game, extra: &[bool]) -> Game {
    let qs = g.question_shape().clone();
    let as_ = g.answer_shape().clone();
    let na = as_.size();
    let mu = g.support().iter().map(|&x| (qs.decode(x), g.mu(x).clone())).collect();
    Game::new(
        g.question_alphabets().to_vec(),
        g.answer_alphabets().to_vec(),
        mu,
        |x, a| {
            let (xi, ai) = (qs.encode(x), as_.encode(a));
            g.accepts(xi, ai) || extra[xi * na + ai]
        },
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn accepting_more_never_lowers_the_value(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = library::random_game(&mut rng, 2, 3);
        let cells = g.question_shape().size() * g.answer_shape().size();
        let extra: Vec<bool> = (0..cells).map(|_| rng.gen_bool(0.3)).collect();
        let looser = relax(&g, &extra);
        let before = classical_value(&g, Budget::default()).unwrap().value;
        let after = classical_value(&looser, Budget::default()).unwrap().value;
        prop_assert!(after >= before);
    }

    #[test]
    fn value_is_a_probability(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = library::random_game(&mut rng, 3, 2);
        let v = classical_value(&g, Budget::default()).unwrap().value;
        prop_assert!(v >= rat(0, 1) && v <= rat(1, 1));
        prop_assert_eq!(v, brute_value(&g));
    }
}
