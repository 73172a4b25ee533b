mod common;

use common::{anchored_oracle, brute_value, rat};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use reprep::anchoring::{anchor_transform, classical_decay_bound, predicted_value, DecayBoundParams};
use reprep::game::{classical_value, is_anchored, library, Budget, Label};
use reprep::Error;

#[test]
fn anchored_chsh_value() {
    let g = anchor_transform(&library::chsh(), &rat(1, 4)).unwrap();
    assert_eq!(brute_value(&g), rat(55, 64));
    assert_eq!(classical_value(&g, Budget::default()).unwrap().value, rat(55, 64));
}

#[test]
fn transform_is_anchored_with_alpha() {
    let g = anchor_transform(&library::ghz(), &rat(1, 3)).unwrap();
    assert_eq!(is_anchored(&g, g.anchors().unwrap()), (true, rat(1, 3)));
    let last: Vec<Vec<usize>> = (0..3).map(|t| vec![g.questions(t).len() - 1]).collect();
    assert_eq!(anchored_oracle(&g, &last), (true, rat(1, 3)));
}

#[test]
fn rejects_bad_input() {
    let chsh = library::chsh();
    assert!(matches!(anchor_transform(&chsh, &rat(0, 1)), Err(Error::InvalidAlpha(_))));
    assert!(matches!(anchor_transform(&chsh, &rat(1, 1)), Err(Error::InvalidAlpha(_))));
    let once = anchor_transform(&chsh, &rat(1, 2)).unwrap();
    assert!(matches!(anchor_transform(&once, &rat(1, 2)), Err(Error::ReservedLabel { .. })));
    assert!(once.questions(0).contains(&Label::anchor()));
}

#[test]
fn predicted_value_in_floats() {
    let alpha = 1.0 - 3f64.sqrt() / 2.0;
    let v = predicted_value(&0.75, &alpha, 2);
    assert!((v - (1.0 - (1.0 - alpha).powi(2) * 0.25)).abs() < 1e-15);
}

#[test]
fn decay_bound_is_monotone_in_n() {
    let mut last = f64::INFINITY;
    for n in [1u64, 10, 100, 1000, 100_000] {
        let p = DecayBoundParams::for_game(2, 0.25, 55.0 / 64.0, 4, n).unwrap();
        let b = classical_decay_bound(&p);
        assert!(b <= last);
        last = b;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn identity_against_enumeration(seed in any::<u64>(), num in 1i64..8, extra in 1i64..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = library::random_game(&mut rng, 2, 2);
        let alpha = rat(num, num + extra);
        let anchored = anchor_transform(&g, &alpha).unwrap();
        let want = predicted_value(&brute_value(&g), &alpha, 2);
        prop_assert_eq!(brute_value(&anchored), want.clone());
        prop_assert_eq!(classical_value(&anchored, Budget::default()).unwrap().value, want);
    }
}
