mod common;

use common::{cross_fidelity, fidelity_oracle, random_state, rat, reduce_first, reduce_second};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reprep::anchoring::{anchor_transform, predicted_value};
use reprep::game::{classical_value, library, nonsignaling_value, Budget};
use reprep::quantum::linalg::{identity, random_density};
use reprep::quantum::{
    apply_local, build_cq_states, check_fuchs_van_de_graaf, check_pinsker, cq_report, deterministic_value, fidelity,
    inner, quantum_rounding_value, seesaw, uhlmann_unitary, EntangledStrategy, EntangledTable, Register,
    SeesawConfig,
};
use reprep::repetition::WinEvent;

const TSIRELSON: f64 = 0.853_553_390_593_273_8;

#[test]
fn uhlmann_overlap_is_the_reduced_fidelity() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..100 {
        let (da, db) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let p1 = random_state(&mut rng, da * db);
        let p2 = random_state(&mut rng, da * db);
        for register in [Register::First, Register::Second] {
            let r = uhlmann_unitary(&p1, &p2, da, db, register);
            let first = register == Register::First;
            let dim = if first { da } else { db };
            let untouched = if da != db {
                cross_fidelity(&p1, &p2, da, db, first)
            } else if first {
                fidelity_oracle(&reduce_first(&p1, da, db), &reduce_first(&p2, da, db))
            } else {
                fidelity_oracle(&reduce_second(&p1, da, db), &reduce_second(&p2, da, db))
            };
            assert!((r.overlap - untouched).abs() < 1e-8, "{} vs {untouched}", r.overlap);
            assert!((r.unitary.adjoint() * &r.unitary - identity(dim)).norm() < 1e-9);
            let rotated = apply_local(&p1, &r.unitary, da, db, register);
            let z = inner(&p2, &rotated);
            assert!((z.re - r.overlap).abs() < 1e-8 && z.im.abs() < 1e-8);
        }
    }
}

#[test]
fn fidelity_matches_eigen_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..100 {
        let d = rng.gen_range(1..=4);
        let (a, b) = (random_density(&mut rng, d), random_density(&mut rng, d));
        assert!((fidelity(&a, &b) - fidelity_oracle(&a, &b)).abs() < 1e-8);
    }
}

#[test]
fn distance_inequalities() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for _ in 0..100 {
        let d = rng.gen_range(2..=4);
        let (a, b) = (random_density(&mut rng, d), random_density(&mut rng, d));
        assert!(check_pinsker(&a, &b).holds(1e-8));
        let [lo, hi] = check_fuchs_van_de_graaf(&a, &b);
        assert!(lo.holds(1e-8) && hi.holds(1e-8));
    }
}

#[test]
fn tsirelson_strategy_value() {
    let s = EntangledStrategy::chsh_optimal();
    assert!((s.value(&library::chsh()).unwrap() - TSIRELSON).abs() < 1e-12);
}

#[test]
fn extension_obeys_anchoring_identity() {
    let alpha = rat(1, 4);
    let g = anchor_transform(&library::chsh(), &alpha).unwrap();
    let s = EntangledStrategy::chsh_optimal().extend_to_anchored(&g).unwrap();
    assert!((s.value(&g).unwrap() - predicted_value(&TSIRELSON, &0.25, 2)).abs() < 1e-12);
}

#[test]
fn deterministic_embedding_keeps_value() {
    let g = library::free_game();
    let best = classical_value(&g, Budget::default()).unwrap();
    for d in [1, 2] {
        let s = EntangledStrategy::from_deterministic(&g, &best.strategy, d).unwrap();
        assert!((s.value(&g).unwrap() - deterministic_value(&g, &best.strategy).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn strategy_file_round_trip() {
    let g = anchor_transform(&library::chsh(), &rat(1, 4)).unwrap();
    let s = EntangledStrategy::chsh_optimal().extend_to_anchored(&g).unwrap();
    let back = EntangledStrategy::from_json(&s.to_json(&g).unwrap(), &g).unwrap();
    assert!((back.value(&g).unwrap() - s.value(&g).unwrap()).abs() < 1e-12);
}

#[test]
fn seesaw_on_chsh_is_monotone_and_bounded() {
    let g = library::chsh();
    let r = seesaw(&g, &SeesawConfig::new(2)).unwrap();
    assert!(r.monotone);
    assert!(r.value >= TSIRELSON - 5e-4);
    assert!(r.value <= nonsignaling_value(&g).unwrap() + 1e-8);
    assert!((r.strategy.value(&g).unwrap() - r.value).abs() < 1e-9);
}

#[test]
fn phi_identities_on_product_fixture() {
    let g = anchor_transform(&library::chsh(), &rat(1, 4)).unwrap();
    let one = EntangledStrategy::chsh_optimal().extend_to_anchored(&g).unwrap();
    let s = EntangledStrategy::product(&[one.clone(), one]).unwrap();
    let et = EntangledTable::build(&g, 2, &WinEvent::new([0], 2).unwrap(), &s).unwrap();
    let p = et.phi_report().unwrap();
    assert!(p.gamma_error <= 1e-10 && p.ando_error <= 1e-10 && p.mixing_error <= 1e-10);
    let c = cq_report(&et, &build_cq_states(&et).unwrap()).unwrap();
    assert!(c.relative_entropy <= c.log_inverse_win + 1e-8);
    assert!(c.max_divergence <= c.max_divergence_bound + 1e-6);
    let r = quantum_rounding_value(&et, 0).unwrap();
    assert!(r.holds, "{} < {}", r.value, r.lower_bound);
}
