//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

mod common;

use std::collections::BTreeMap;
use std::io::Write;
use std::time::{Duration, Instant};

use common::{fidelity_oracle, rat, random_rational_weights, random_state, reduce_first, reduce_second, reversed_value};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reprep::anchoring::{anchor_transform, predicted_value};
use reprep::depbreak::{build_table_multi, check_trivial_lemma, rounding_strategy_multi, AutoTable};
use reprep::game::{classical_value, library, nonsignaling_value, AnchorSets, Budget, DeterministicStrategy};
use reprep::quantum::linalg::random_density;
use reprep::quantum::{
    build_cq_states, check_chain_rule, check_fuchs_van_de_graaf, check_pinsker, check_quantum_raz, cq_report, seesaw,
    uhlmann_unitary, EntangledStrategy, EntangledTable, MultiCq, Register, SeesawConfig,
};
use reprep::repetition::{product_strategy, repeat_game, repeated_classical_value, WinEvent};
use reprep::scalar::pow;
use reprep::{ExactDistribution, Game, Rational};

fn verdict(id: u32, name: &str, ok: bool, detail: String, started: Instant, limit: Duration) {
    let elapsed = started.elapsed();
    let pass = ok && elapsed < limit;
    let line = format!(
        "{} [{id}] {name}: {detail} ({:.2}s, limit {}s)\n",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
    assert!(pass, "{line}");
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn random_alpha<R: Rng>(rng: &mut R) -> Rational {
    let den = rng.gen_range(2..=12);
    rat(rng.gen_range(1..den), den)
}

fn optimal_product(g: &Game, n: usize) -> DeterministicStrategy {
    let best = classical_value(g, Budget::default()).unwrap().strategy;
    product_strategy(&repeat_game(g, n).unwrap(), &vec![best; n]).unwrap()
}

/// Every `C ⊊ [n]`.
fn proper_events(n: usize) -> Vec<WinEvent> {
    (0u32..(1 << n) - 1)
        .map(|mask| WinEvent::new((0..n).filter(|j| mask & (1 << j) != 0), n).unwrap())
        .collect()
}

fn anchored_chsh() -> Game {
    anchor_transform(&library::chsh(), &rat(1, 4)).unwrap()
}

#[test]
fn c01_anchoring_value_identity() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let (mut games, mut mismatches) = (0, 0);
    for i in 0..120 {
        let k = 2 + i % 2;
        let g = library::random_game(&mut rng, k, 3);
        let alpha = random_alpha(&mut rng);
        let val = classical_value(&g, Budget::default()).unwrap().value;
        let anchored = classical_value(&anchor_transform(&g, &alpha).unwrap(), Budget::default()).unwrap().value;
        let want = Rational::one() - pow(&(Rational::one() - &alpha), k) * (Rational::one() - &val);
        assert_eq!(want, predicted_value(&val, &alpha, k));
        games += 1;
        if anchored != want {
            mismatches += 1;
        }
    }
    verdict(
        1,
        "anchoring value identity",
        mismatches == 0,
        format!("{games} random games, {mismatches} mismatches"),
        started,
        secs(120),
    );
}

#[test]
fn c02_two_player_marginals() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let exact_alphas = [rat(7, 8), rat(26, 27), rat(19, 27), rat(63, 64), rat(37, 64)];
    let float_alphas = [rat(1, 4), rat(1, 3), rat(1, 2)];
    let (mut fixtures, mut exact_fixtures, mut worst, mut ok) = (0, 0, 0f64, true);
    for i in 0..24 {
        let base = if i < 3 { library::chsh() } else { library::random_game(&mut rng, 2, 2) };
        let alpha = if i % 3 == 2 {
            float_alphas[i % float_alphas.len()].clone()
        } else {
            exact_alphas[i % exact_alphas.len()].clone()
        };
        let g = anchor_transform(&base, &alpha).unwrap();
        let n = 1 + i % 2;
        let coords = if n == 1 { Vec::new() } else { vec![rng.gen_range(0..n)] };
        let event = WinEvent::new(coords, n).unwrap();
        let t = AutoTable::build(&g, n, &event, &optimal_product(&g, n)).unwrap();
        for m in t.marginal_checks() {
            worst = worst.max(m.max_deviation);
            ok &= if t.is_exact() { m.exact && m.max_deviation == 0.0 } else { m.max_deviation <= 1e-12 };
        }
        fixtures += 1;
        exact_fixtures += usize::from(t.is_exact());
    }
    verdict(
        2,
        "two-player coordinate marginals equal the question distribution",
        ok && fixtures >= 20,
        format!("{fixtures} anchored fixtures ({exact_fixtures} exact), worst deviation {worst:e}"),
        started,
        secs(60),
    );
}

#[test]
fn c03_local_sampling_factorization() {
    let started = Instant::now();
    let free = library::free_game();
    let free_anchored = free
        .clone()
        .with_anchors(AnchorSets::from_indices(&free, &[vec![0], vec![0]]).unwrap())
        .unwrap();
    let fixtures: Vec<(Game, Vec<usize>)> = vec![
        (anchored_chsh(), vec![1, 2, 3]),
        (anchor_transform(&library::ghz(), &rat(1, 3)).unwrap(), vec![1, 2]),
        (free_anchored, vec![1, 2, 3]),
    ];
    let (mut conditions, mut tables, mut ok) = (0, 0, true);
    for (g, ns) in &fixtures {
        for &n in ns {
            let s = optimal_product(g, n);
            for event in proper_events(n) {
                let t = build_table_multi(g, n, &event, &s).unwrap();
                for i in 0..t.m() {
                    let r = t.check_local_sampling(i).unwrap();
                    ok &= r.max_tv.is_zero();
                    conditions += r.conditions;
                }
                tables += 1;
            }
        }
    }
    verdict(
        3,
        "local sampling factorization",
        ok,
        format!("{tables} tables, {conditions} conditioning values, max TV 0"),
        started,
        secs(300),
    );
}

fn random_dist<R: Rng>(rng: &mut R, n: usize) -> ExactDistribution<usize> {
    ExactDistribution::new(random_rational_weights(rng, n).into_iter().enumerate().collect()).unwrap()
}

#[test]
fn c04_kernel_composition_preserves_distance() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut failures = 0;
    for _ in 0..1000 {
        let (f, g) = (rng.gen_range(1..=5), rng.gen_range(1..=4));
        let q = random_dist(&mut rng, f);
        let s = random_dist(&mut rng, f);
        let kernel: BTreeMap<usize, ExactDistribution<usize>> = (0..f).map(|x| (x, random_dist(&mut rng, g))).collect();
        let c = check_trivial_lemma(&q, &s, &kernel).unwrap();
        if c.lhs != c.rhs {
            failures += 1;
        }
    }
    verdict(
        4,
        "kernel composition preserves total variation",
        failures == 0,
        format!("1000 rational triples, {failures} unequal"),
        started,
        secs(10),
    );
}

#[test]
fn c05_conditioning_bounds() {
    let started = Instant::now();
    let g = anchored_chsh();
    let mut strategies = vec![(2, optimal_product(&g, 2)), (3, optimal_product(&g, 3))];
    strategies.push((2, repeated_classical_value(&g, 2, Budget::default()).unwrap().strategy));
    let (mut checks, mut worst, mut ok) = (0, f64::INFINITY, true);
    for (n, s) in &strategies {
        for event in proper_events(*n) {
            let t = build_table_multi(&g, *n, &event, s).unwrap();
            for b in t.verify_holenstein_bounds().unwrap() {
                ok &= b.holds;
                worst = worst.min(b.slack());
                checks += 1;
            }
        }
    }
    verdict(
        5,
        "conditioning inequalities",
        ok,
        format!("{checks} inequalities on anchored CHSH n=2,3, minimum slack {worst:e}"),
        started,
        secs(600),
    );
}

#[test]
fn c06_repeated_value_sandwich() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let mut games = vec![library::chsh(), library::ghz(), library::free_game(), anchored_chsh()];
    games.extend((0..6).map(|_| library::random_game(&mut rng, 2, 2)));
    let mut ok = true;
    for g in &games {
        let val = classical_value(g, Budget::default()).unwrap().value;
        let v2 = repeated_classical_value(g, 2, Budget::default()).unwrap().value;
        ok &= pow(&val, 2) <= v2 && v2 <= val;
    }
    let g = anchored_chsh();
    let v2 = repeated_classical_value(&g, 2, Budget::default()).unwrap().value;
    let oracle = reversed_value(repeat_game(&g, 2).unwrap().materialize().unwrap());
    ok &= v2 == oracle;
    verdict(
        6,
        "repeated value sandwich",
        ok,
        format!("{} games at n=2; anchored CHSH twice = {v2}, oracle {oracle}", games.len()),
        started,
        secs(600),
    );
}

fn random_blocks<R: Rng>(rng: &mut R, count: usize, d: usize) -> Vec<reprep::quantum::linalg::CMat> {
    let w: Vec<f64> = (0..count).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    w.iter().map(|p| random_density(rng, d).scale(p / total)).collect()
}

#[test]
fn c07_entropic_toolbox() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let mut worst = [f64::INFINITY; 3];
    let mut chain_gap = 0f64;
    let mut raz_worst = f64::INFINITY;
    for _ in 0..1000 {
        let d = rng.gen_range(2..=4);
        let (a, b) = (random_density(&mut rng, d), random_density(&mut rng, d));
        worst[0] = worst[0].min(check_pinsker(&a, &b).slack());
        let [lo, hi] = check_fuchs_van_de_graaf(&a, &b);
        worst[1] = worst[1].min(lo.slack());
        worst[2] = worst[2].min(hi.slack());

        let (z, q) = (rng.gen_range(2..=3), rng.gen_range(1..=4));
        let c = check_chain_rule(&random_blocks(&mut rng, z, q), &random_blocks(&mut rng, z, q)).unwrap();
        chain_gap = chain_gap.max((c.lhs - c.rhs).abs());

        let e = rng.gen_range(1..=4);
        let dims = vec![2, 2];
        let state = MultiCq::new(dims.clone(), random_blocks(&mut rng, 4, e)).unwrap();
        let marg = state.classical_marginals();
        let quantum = state.quantum_marginal();
        let reference = (0..4).map(|x| quantum.scale(marg[0][x / 2] * marg[1][x % 2])).collect();
        raz_worst = raz_worst.min(check_quantum_raz(&state, &MultiCq::new(dims, reference).unwrap()).unwrap().slack());
    }
    let ok = worst.iter().all(|&s| s >= -1e-8) && chain_gap <= 1e-8 && raz_worst >= -1e-8;
    verdict(
        7,
        "entropic toolbox",
        ok,
        format!(
            "1000 instances each; slack pinsker {:e}, fidelity lower {:e}, upper {:e}; chain rule gap {chain_gap:e}; \
             raz slack {raz_worst:e}",
            worst[0], worst[1], worst[2]
        ),
        started,
        secs(300),
    );
}

#[test]
fn c08_entangled_identities() {
    let started = Instant::now();
    let g = anchored_chsh();
    let tsirelson = EntangledStrategy::chsh_optimal().extend_to_anchored(&g).unwrap();
    let classical = classical_value(&g, Budget::default()).unwrap().strategy;
    let trivial = EntangledStrategy::from_deterministic(&g, &classical, 1).unwrap();
    let g2 = repeat_game(&g, 2).unwrap();
    let cfg = SeesawConfig {
        restarts: 3,
        seed: 8,
        ..SeesawConfig::new(2)
    };
    let optimized = seesaw(g2.materialize().unwrap(), &cfg).unwrap().strategy;
    let fixtures = [
        EntangledStrategy::product(&[tsirelson.clone(), tsirelson.clone()]).unwrap(),
        EntangledStrategy::product(&[tsirelson, trivial]).unwrap(),
        optimized,
    ];
    let (mut identity, mut entropy_slack, mut divergence_slack, mut tables) = (0f64, f64::INFINITY, f64::INFINITY, 0);
    for s in &fixtures {
        for c in [0, 1] {
            let et = EntangledTable::build(&g, 2, &WinEvent::new([c], 2).unwrap(), s).unwrap();
            let p = et.phi_report().unwrap();
            identity = identity.max(p.gamma_error).max(p.normalization_error).max(p.ando_error).max(p.mixing_error);
            let r = cq_report(&et, &build_cq_states(&et).unwrap()).unwrap();
            entropy_slack = entropy_slack.min(r.log_inverse_win - r.relative_entropy.max(r.relative_entropy_pi));
            divergence_slack = divergence_slack.min(r.max_divergence_bound - r.max_divergence);
            tables += 1;
        }
    }
    let ok = identity <= 1e-10 && entropy_slack >= -1e-8 && divergence_slack >= -1e-6;
    verdict(
        8,
        "partially measured state identities",
        ok,
        format!(
            "{tables} tables; identity error {identity:e}, entropy slack {entropy_slack:e}, \
             max-divergence slack {divergence_slack:e}"
        ),
        started,
        secs(600),
    );
}

#[test]
fn c09_seesaw_reaches_tsirelson() {
    let started = Instant::now();
    let g = library::chsh();
    let r = seesaw(&g, &SeesawConfig::new(2)).unwrap();
    let ns = nonsignaling_value(&g).unwrap();
    let ok = r.value >= 0.8535 && (ns - 1.0).abs() <= 1e-8 && ns >= r.value && r.restart_values.len() == 10;
    verdict(
        9,
        "seesaw on CHSH",
        ok,
        format!("best of {} restarts {:.6}, non-signaling {ns:.9}", r.restart_values.len(), r.value),
        started,
        secs(60),
    );
}

#[test]
fn c10_uhlmann_overlap() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(110);
    let mut worst = 0f64;
    for _ in 0..200 {
        let d = rng.gen_range(1..=4);
        let p1 = random_state(&mut rng, d * d);
        let p2 = random_state(&mut rng, d * d);
        for register in [Register::First, Register::Second] {
            let r = uhlmann_unitary(&p1, &p2, d, d, register);
            let f = match register {
                Register::First => fidelity_oracle(&reduce_first(&p1, d, d), &reduce_first(&p2, d, d)),
                Register::Second => fidelity_oracle(&reduce_second(&p1, d, d), &reduce_second(&p2, d, d)),
            };
            worst = worst.max((r.overlap - f).abs());
        }
    }
    verdict(
        10,
        "Uhlmann overlap equals fidelity",
        worst <= 1e-8,
        format!("200 pure-state pairs, both registers, worst gap {worst:e}"),
        started,
        secs(30),
    );
}

#[test]
fn c11_classical_rounding() {
    let started = Instant::now();
    let g = anchored_chsh();
    let (mut checks, mut ok) = (0, true);
    let mut worst: Option<Rational> = None;
    for n in [2, 3] {
        let s = optimal_product(&g, n);
        for event in proper_events(n) {
            let t = build_table_multi(&g, n, &event, &s).unwrap();
            for i in 0..t.m() {
                let c = rounding_strategy_multi(&t, i).unwrap().check(&t).unwrap();
                let slack = &c.value + &c.tv - &c.conditional_win;
                ok &= slack >= Rational::zero() && c.holds;
                worst = Some(match worst {
                    Some(w) if w <= slack => w,
                    _ => slack,
                });
                checks += 1;
            }
        }
    }
    verdict(
        11,
        "classical rounding",
        ok,
        format!("{checks} coordinates on anchored CHSH n=2,3, minimum exact slack {}", worst.unwrap()),
        started,
        secs(300),
    );
}
