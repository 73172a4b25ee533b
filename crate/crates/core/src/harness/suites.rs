use std::path::Path;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{ExperimentConfig, QuantumSuite};
use super::report::{CheckRow, SuiteReport};
use crate::anchoring::{anchor_transform, predicted_value};
use crate::depbreak::{build_table_multi, rounding_strategy_multi, AutoTable};
use crate::error::{Error, Result};
use crate::game::{
    classical_value, is_anchored, nonsignaling_value, validate_game, Budget, DeterministicStrategy, Game, GameFile,
    StrategyMaps,
};
use crate::quantum::linalg::{random_density, CMat};
use crate::quantum::{
    build_cq_states, check_chain_rule, check_fuchs_van_de_graaf, check_pinsker, check_quantum_raz, cq_report,
    quantum_rounding_value, seesaw, EntangledStrategy, EntangledTable, MultiCq, SeesawConfig, ToolboxCheck,
};
use crate::repetition::{product_strategy, repeat_game, repeated_classical_value, WinEvent};
use crate::scalar::{parse_rational, pow, rational_to_f64};

/// Tolerance of the entangled identities.
pub const IDENTITY_TOL: f64 = 1e-10;
/// Tolerance of the entropic inequalities.
pub const ENTROPY_TOL: f64 = 1e-8;
/// Random instances per toolbox inequality.
pub const TOOLBOX_INSTANCES: usize = 1000;

/// Repetitions used by the verification suite when none are configured.
const DEFAULT_N: usize = 2;

pub fn read_game(path: &Path) -> Result<Game> {
    Game::from_json(&std::fs::read_to_string(path)?)
}

/// `C` from 1-based coordinates, defaulting to the last coordinate.
pub fn event_from(coords: Option<&[usize]>, n: usize) -> Result<WinEvent> {
    match coords {
        Some(list) => {
            if list.iter().any(|&c| c == 0 || c > n) {
                return Err(Error::InvalidCoordinates(format!("{list:?} not within 1..={n}")));
            }
            WinEvent::new(list.iter().map(|c| c - 1), n)
        }
        None => WinEvent::new([n - 1], n),
    }
}

/// Optimal single-game strategy played on every coordinate.
pub fn optimal_product(game: &Game, n: usize, budget: Budget) -> Result<DeterministicStrategy> {
    let best = classical_value(game, budget)?.strategy;
    let rg = repeat_game(game, n)?;
    product_strategy(&rg, &vec![best; n])
}

/// Reads a deterministic strategy for `G^n`, or for `G` played on every coordinate.
pub fn read_deterministic(path: &Path, game: &Game, n: usize) -> Result<DeterministicStrategy> {
    let maps: StrategyMaps = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let rg = repeat_game(game, n)?;
    match maps.to_strategy(rg.materialize()?) {
        Ok(s) => Ok(s),
        Err(first) => match maps.to_strategy(game) {
            Ok(s) => product_strategy(&rg, &vec![s; n]),
            Err(_) => Err(first),
        },
    }
}

/// Every dependency-breaking check for a deterministic strategy on `G^n`.
pub fn depbreak_rows(game: &Game, n: usize, event: &WinEvent, strategy: &DeterministicStrategy) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let t = build_table_multi(game, n, event, strategy)?;
    rows.push(CheckRow::report("depbreak.delta", Some(t.delta()), 0.0));
    rows.extend(t.verify_holenstein_bounds()?.iter().map(|b| {
        let mut r = CheckRow::from(b);
        r.check = format!("depbreak.{}", r.check);
        r
    }));
    for i in 0..t.m() {
        let rep = t.check_local_sampling(i)?;
        rows.push(CheckRow::assert(
            format!("depbreak.local_sampling[i={}]", rep.coordinate),
            rational_to_f64(&rep.max_tv),
            0.0,
            rep.max_tv.is_zero(),
        ));
        let name = format!("depbreak.rounding[i={}]", t.free()[i] + 1);
        match rounding_strategy_multi(&t, i) {
            Ok(r) => {
                let c = r.check(&t)?;
                rows.push(CheckRow::assert(
                    name,
                    rational_to_f64(&c.conditional_win),
                    rational_to_f64(&(&c.value + &c.tv)),
                    c.holds,
                ));
            }
            Err(Error::AnchorEventUnreachable { .. }) => rows.push(CheckRow::report(name, None, 0.0)),
            Err(e) => return Err(e),
        }
    }
    if game.k() == 2 {
        let auto = AutoTable::build(game, n, event, strategy)?;
        let tol = if auto.is_exact() { 0.0 } else { 1e-12 };
        for m in auto.marginal_checks() {
            rows.push(CheckRow::assert(
                format!("depbreak.marginal[i={}]", m.coordinate),
                m.max_deviation,
                tol,
                m.exact || m.max_deviation <= tol,
            ));
        }
        rows.extend(auto.skew_report().iter().map(|q| {
            let mut r = CheckRow::from(q);
            r.check = format!("depbreak.{}", r.check);
            r
        }));
    }
    Ok(rows)
}

fn worst(name: &str, checks: &[ToolboxCheck], tol: f64) -> CheckRow {
    let w = checks
        .iter()
        .min_by(|a, b| a.slack().total_cmp(&b.slack()))
        .expect("at least one instance");
    CheckRow::assert(format!("toolbox.{name}"), w.lhs, w.rhs, checks.iter().all(|c| c.holds(tol)))
}

fn random_blocks<R: Rng>(rng: &mut R, count: usize, d: usize) -> Vec<CMat> {
    let w: Vec<f64> = (0..count).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    w.iter().map(|p| random_density(rng, d).scale(p / total)).collect()
}

/// Worst case of each entropic inequality over seeded random instances, `d ≤ 4`.
pub fn toolbox_rows(seed: u64, instances: usize) -> Result<Vec<CheckRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut pinsker, mut lower, mut upper, mut raz) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let mut chain_gap = 0f64;
    for _ in 0..instances {
        let d = rng.gen_range(2..=4);
        let rho = random_density(&mut rng, d);
        let sigma = random_density(&mut rng, d);
        pinsker.push(check_pinsker(&rho, &sigma));
        let [l, u] = check_fuchs_van_de_graaf(&rho, &sigma);
        lower.push(l);
        upper.push(u);

        let z = rng.gen_range(2..=3);
        let q = rng.gen_range(1..=2);
        let c = check_chain_rule(&random_blocks(&mut rng, z, q), &random_blocks(&mut rng, z, q))?;
        chain_gap = chain_gap.max((c.lhs - c.rhs).abs());

        let dims = vec![2, 2];
        let state = MultiCq::new(dims.clone(), random_blocks(&mut rng, 4, 2))?;
        let marg = state.classical_marginals();
        let a = state.quantum_marginal();
        let reference: Vec<CMat> = (0..4).map(|x| a.scale(marg[0][x / 2] * marg[1][x % 2])).collect();
        raz.push(check_quantum_raz(&state, &MultiCq::new(dims, reference)?)?);
    }
    Ok(vec![
        worst("pinsker", &pinsker, ENTROPY_TOL),
        worst("fuchs_van_de_graaf_lower", &lower, ENTROPY_TOL),
        worst("fuchs_van_de_graaf_upper", &upper, ENTROPY_TOL),
        CheckRow::le("toolbox.chain_rule", chain_gap, ENTROPY_TOL),
        worst("quantum_raz", &raz, ENTROPY_TOL),
    ])
}

/// Entangled table for `strategy` played on every coordinate of `G^n`.
pub fn entangled_table(game: &Game, n: usize, event: &WinEvent, strategy: &EntangledStrategy) -> Result<EntangledTable> {
    let s = EntangledStrategy::product(&vec![strategy.clone(); n])?;
    EntangledTable::build(game, n, event, &s)
}

/// γ, mixing, Ando and classical-quantum checks.
pub fn phi_rows(et: &EntangledTable) -> Result<Vec<CheckRow>> {
    let p = et.phi_report()?;
    let states = build_cq_states(et)?;
    let c = cq_report(et, &states)?;
    let tol_le = |name: &str, lhs: f64, rhs: f64, tol: f64| CheckRow::assert(name, lhs, rhs, lhs <= rhs + tol);
    Ok(vec![
        CheckRow::le("quantum.gamma", p.gamma_error, IDENTITY_TOL),
        CheckRow::le("quantum.gamma_normalization", p.normalization_error, IDENTITY_TOL),
        CheckRow::le("quantum.mixing", p.mixing_error, IDENTITY_TOL),
        CheckRow::le("quantum.ando", p.ando_error, IDENTITY_TOL),
        CheckRow::le("quantum.cq_marginal", c.marginal_error, IDENTITY_TOL),
        CheckRow::le("quantum.cq_dominance", -c.dominance_min_eigenvalue, IDENTITY_TOL),
        tol_le("quantum.relative_entropy", c.relative_entropy, c.log_inverse_win, ENTROPY_TOL),
        tol_le("quantum.relative_entropy_bob", c.relative_entropy_pi, c.log_inverse_win, ENTROPY_TOL),
        tol_le("quantum.max_divergence", c.max_divergence, c.max_divergence_bound, 1e-6),
        CheckRow::report("quantum.max_divergence_per_z", Some(c.max_divergence_per_z), c.max_divergence_bound),
    ])
}

/// Extracted single-game strategy for every free coordinate.
pub fn rounding_rows(et: &EntangledTable) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for i in 0..et.table().m() {
        let r = quantum_rounding_value(et, i)?;
        rows.push(CheckRow::assert(
            format!("quantum.rounding[i={}]", r.coordinate),
            r.lower_bound,
            r.value,
            r.holds,
        ));
        for q in &r.distances {
            let mut row = CheckRow::from(q);
            row.check = format!("quantum.{}[i={}]", q.name, r.coordinate);
            rows.push(row);
        }
    }
    Ok(rows)
}

fn seesaw_config(seed: u64) -> SeesawConfig {
    SeesawConfig {
        seed,
        ..SeesawConfig::new(2)
    }
}

fn entangled_strategy(cfg: &ExperimentConfig, game: &Game) -> Result<EntangledStrategy> {
    match &cfg.strategy {
        Some(path) => EntangledStrategy::from_json(&std::fs::read_to_string(path)?, game),
        None => Ok(seesaw(game, &seesaw_config(cfg.seed()))?.strategy),
    }
}

/// `depbreak-verify`: every dependency-breaking check for one instance.
pub fn run_depbreak_verify(cfg: &ExperimentConfig) -> Result<SuiteReport> {
    let game = read_game(cfg.game.as_deref().ok_or_else(|| Error::Config("no game".into()))?)?;
    let n = cfg.n.unwrap_or(DEFAULT_N);
    let event = event_from(cfg.coords.as_deref(), n)?;
    let budget = cfg.budget()?;
    let strategy = match &cfg.strategy {
        Some(p) => read_deterministic(p, &game, n)?,
        None => optimal_product(&game, n, budget)?,
    };
    let mut report = SuiteReport::default();
    report.extend(depbreak_rows(&game, n, &event, &strategy)?);
    Ok(report)
}

/// `quantum-check`: one of the toolbox, Φ or rounding suites.
pub fn run_quantum_check(cfg: &ExperimentConfig) -> Result<SuiteReport> {
    let suite = cfg.suite.ok_or_else(|| Error::Config("no suite".into()))?;
    let mut report = SuiteReport::default();
    if suite == QuantumSuite::Toolbox {
        report.extend(toolbox_rows(cfg.seed(), TOOLBOX_INSTANCES)?);
        return Ok(report);
    }
    let game = read_game(cfg.game.as_deref().ok_or_else(|| Error::Config("no game".into()))?)?;
    let n = cfg.n.unwrap_or(DEFAULT_N);
    let event = event_from(cfg.coords.as_deref(), n)?;
    let s = entangled_strategy(cfg, &game)?;
    let et = entangled_table(&game, n, &event, &s)?;
    match suite {
        QuantumSuite::Phi => report.extend(phi_rows(&et)?),
        QuantumSuite::Rounding => report.extend(rounding_rows(&et)?),
        QuantumSuite::Toolbox => unreachable!("handled above"),
    }
    Ok(report)
}

/// Full verification of one game file.
///
/// A file that parses but violates a game invariant yields a failed
/// `game.validate` row and no further checks.
pub fn run_verification_suite(cfg: &ExperimentConfig) -> Result<SuiteReport> {
    let path = cfg.game.as_deref().ok_or_else(|| Error::Config("no game".into()))?;
    let file = GameFile::from_json(&std::fs::read_to_string(path)?)?;
    let mut report = SuiteReport::default();
    if let Err(v) = validate_game(&file) {
        report.push(CheckRow::assert("game.validate", v.violations.len() as f64, 0.0, false));
        return Ok(report);
    }
    report.push(CheckRow::assert("game.validate", 0.0, 0.0, true));
    let game = file.to_game()?;
    let budget = cfg.budget()?;
    let n = cfg.n.unwrap_or(DEFAULT_N);

    let val = classical_value(&game, budget)?.value;
    let val_f = rational_to_f64(&val);
    report.push(CheckRow::report("game.classical_value", Some(val_f), 1.0));
    match nonsignaling_value(&game) {
        Ok(ns) => report.push(CheckRow::assert("game.nonsignaling_upper", val_f, ns, val_f <= ns + 1e-8)),
        Err(Error::SizeLimit { .. }) => report.push(CheckRow::report("game.nonsignaling_upper", None, 0.0)),
        Err(e) => return Err(e),
    }

    let mentions_anchor = (0..game.k()).any(|t| game.questions(t).iter().any(|l| l.mentions_anchor()));
    if let (Some(a), false) = (&cfg.alpha, mentions_anchor) {
        let alpha = parse_rational(a)?;
        let anchored = anchor_transform(&game, &alpha)?;
        let got = classical_value(&anchored, budget)?.value;
        let want = predicted_value(&val, &alpha, game.k());
        report.push(CheckRow::assert(
            format!("anchoring.identity[alpha={a}]"),
            rational_to_f64(&(&got - &want)).abs(),
            0.0,
            got == want,
        ));
    }
    let anchored = match game.anchors() {
        Some(a) => {
            let (ok, alpha) = is_anchored(&game, a);
            report.push(CheckRow::assert("anchoring.is_anchored", 0.0, rational_to_f64(&alpha), ok));
            ok
        }
        None => false,
    };

    for m in 2..=n {
        let rep = repeated_classical_value(&game, m, budget)?.value;
        let lower = pow(&val, m);
        report.push(CheckRow::assert(
            format!("repetition.lower[n={m}]"),
            rational_to_f64(&lower),
            rational_to_f64(&rep),
            lower <= rep,
        ));
        report.push(CheckRow::assert(
            format!("repetition.upper[n={m}]"),
            rational_to_f64(&rep),
            val_f,
            rep <= val,
        ));
    }

    let event = event_from(cfg.coords.as_deref(), n)?;
    if anchored {
        let s = optimal_product(&game, n, budget)?;
        report.extend(depbreak_rows(&game, n, &event, &s)?);
    }

    if game.k() == 2 {
        let sw = seesaw(&game, &seesaw_config(cfg.seed()))?;
        report.push(CheckRow::assert("quantum.seesaw_monotone", 0.0, 0.0, sw.monotone));
        report.push(CheckRow::assert(
            "quantum.seesaw_above_classical",
            val_f,
            sw.value,
            val_f <= sw.value + 1e-6,
        ));
        if let Some(ns) = report.get("game.nonsignaling_upper").map(|r| r.rhs) {
            report.push(CheckRow::assert("quantum.seesaw_below_nonsignaling", sw.value, ns, sw.value <= ns + 1e-8));
        }
        if anchored {
            let et = entangled_table(&game, n, &event, &sw.strategy)?;
            report.extend(phi_rows(&et)?);
            report.extend(rounding_rows(&et)?);
        }
    }
    Ok(report)
}
