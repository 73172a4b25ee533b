//! Alternating optimization of entangled strategies (a lower bound on the
//! entangled value).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::linalg::{eigh, ginibre, hermitize, inv_sqrt_psd, kron, positive_projector, random_pure, sqrt_psd, CMat};
use super::strategy::{EntangledStrategy, Povms};
use crate::error::{Error, Result};
use crate::game::Game;
use crate::scalar::rational_to_f64;

/// Allowed per-step decrease of the objective.
pub const MONOTONE_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct SeesawConfig {
    pub d: usize,
    pub iterations: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Stop a restart once a full round improves by less than this.
    pub tolerance: f64,
}

impl SeesawConfig {
    pub fn new(d: usize) -> Self {
        SeesawConfig {
            d,
            iterations: 200,
            restarts: 10,
            seed: 0,
            tolerance: 1e-13,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SeesawResult {
    pub value: f64,
    pub strategy: EntangledStrategy,
    /// Objective after every half step of the best restart.
    pub history: Vec<f64>,
    /// Whether every restart was non-decreasing within [`MONOTONE_TOL`].
    pub monotone: bool,
    /// Best value of each restart, in order.
    pub restart_values: Vec<f64>,
}

/// `(x, y, μ(x,y), accept[a][b])` for every question pair in the support.
struct Terms {
    na: usize,
    nb: usize,
    nx: usize,
    ny: usize,
    entries: Vec<(usize, usize, f64, Vec<Vec<bool>>)>,
}

fn terms(game: &Game) -> Result<Terms> {
    if game.k() != 2 {
        return Err(Error::Unsupported(format!("seesaw needs k = 2, got {}", game.k())));
    }
    let qs = game.question_shape();
    let as_ = game.answer_shape();
    let (na, nb) = (game.answers(0).len(), game.answers(1).len());
    let entries = game
        .support()
        .iter()
        .map(|&q| {
            let acc = (0..na)
                .map(|a| (0..nb).map(|b| game.accepts(q, as_.encode(&[a, b]))).collect())
                .collect();
            (qs.digit(q, 0), qs.digit(q, 1), rational_to_f64(game.mu(q)), acc)
        })
        .collect();
    Ok(Terms {
        na,
        nb,
        nx: game.questions(0).len(),
        ny: game.questions(1).len(),
        entries,
    })
}

fn random_povm(rng: &mut ChaCha8Rng, d: usize, outcomes: usize) -> Vec<CMat> {
    let raw: Vec<CMat> = (0..outcomes)
        .map(|_| {
            let g = ginibre(rng, d, d);
            &g * g.adjoint()
        })
        .collect();
    let total = raw.iter().fold(CMat::zeros(d, d), |acc, m| acc + m);
    let s = inv_sqrt_psd(&total);
    raw.iter().map(|m| hermitize(&(&s * m * &s))).collect()
}

/// Best response of one player: maximizes `Σ_a Tr(M_a T_a)` for each question.
///
/// Two outcomes are solved exactly; more outcomes are improved by re-splitting
/// every pair of elements optimally with the pair's sum held fixed.
fn best_response(current: &[CMat], targets: &[CMat]) -> Vec<CMat> {
    let d = targets[0].nrows();
    let mut m: Vec<CMat> = current.to_vec();
    if targets.len() == 2 {
        let p = positive_projector(&(&targets[0] - &targets[1]));
        return vec![p.clone(), CMat::identity(d, d) - p];
    }
    for a in 0..m.len() {
        for b in a + 1..m.len() {
            let sum = &m[a] + &m[b];
            let root = sqrt_psd(&sum);
            let p = positive_projector(&(&root * (&targets[a] - &targets[b]) * &root));
            let first = hermitize(&(&root * p * &root));
            m[b] = hermitize(&(&sum - &first));
            m[a] = first;
        }
    }
    m
}

fn objective(terms: &Terms, s: &EntangledStrategy) -> f64 {
    let mut v = 0.0;
    for (x, y, w, acc) in &terms.entries {
        for (a, row) in acc.iter().enumerate() {
            for (b, &ok) in row.iter().enumerate() {
                if ok {
                    v += w * s.correlator(&s.povm(0, *x)[a], &s.povm(1, *y)[b]);
                }
            }
        }
    }
    v
}

/// Effective operators `T[q][a]` of `player` with the other side fixed.
fn effective(terms: &Terms, s: &EntangledStrategy, player: usize) -> Vec<Vec<CMat>> {
    let d = s.d();
    let root = s.sqrt_reduced();
    let (nq, na) = if player == 0 { (terms.nx, terms.na) } else { (terms.ny, terms.nb) };
    let mut t = vec![vec![CMat::zeros(d, d); na]; nq];
    for (x, y, w, acc) in &terms.entries {
        for (a, row) in acc.iter().enumerate() {
            for (b, &ok) in row.iter().enumerate() {
                if !ok {
                    continue;
                }
                if player == 0 {
                    let n = &s.povm(1, *y)[b];
                    t[*x][a] += (&root * n.transpose() * &root).scale(*w);
                } else {
                    let m = &s.povm(0, *x)[a];
                    t[*y][b] += (&root * m.transpose() * &root).scale(*w);
                }
            }
        }
    }
    t
}

fn update_player(terms: &Terms, s: &EntangledStrategy, player: usize) -> Result<EntangledStrategy> {
    let t = effective(terms, s, player);
    let fam: Povms = s
        .povms(player)
        .iter()
        .zip(&t)
        .map(|(cur, targ)| best_response(cur, targ))
        .collect();
    let (alice, bob) = if player == 0 {
        (fam, s.povms(1).clone())
    } else {
        (s.povms(0).clone(), fam)
    };
    EntangledStrategy::new(s.weights().to_vec(), alice, bob)
}

fn update_state(terms: &Terms, s: &EntangledStrategy) -> Result<EntangledStrategy> {
    let d = s.d();
    let mut h = CMat::zeros(d * d, d * d);
    for (x, y, w, acc) in &terms.entries {
        for (a, row) in acc.iter().enumerate() {
            for (b, &ok) in row.iter().enumerate() {
                if ok {
                    h += kron(&s.povm(0, *x)[a], &s.povm(1, *y)[b]).scale(*w);
                }
            }
        }
    }
    let (vals, vecs) = eigh(&h);
    let top = (0..vals.len()).fold(0, |best, j| if vals[j] > vals[best] { j } else { best });
    let v = vecs.column(top).into_owned();
    let coeffs = super::linalg::coefficients(&v.unscale(v.norm()), d, d);
    EntangledStrategy::from_pure_state(&coeffs, s.povms(0), s.povms(1))
}

fn single_run(terms: &Terms, start: EntangledStrategy, cfg: &SeesawConfig) -> Result<(EntangledStrategy, f64, Vec<f64>, bool)> {
    let mut s = start;
    let mut value = objective(terms, &s);
    let mut history = vec![value];
    let mut best = (s.clone(), value);
    let mut monotone = true;
    for _ in 0..cfg.iterations {
        let round_start = value;
        for step in 0..3 {
            let next = match step {
                0 => update_player(terms, &s, 0)?,
                1 => update_player(terms, &s, 1)?,
                _ => update_state(terms, &s)?,
            };
            let v = objective(terms, &next);
            if v < value - MONOTONE_TOL {
                monotone = false;
            }
            s = next;
            value = v;
            history.push(v);
            if v > best.1 {
                best = (s.clone(), v);
            }
        }
        if value - round_start < cfg.tolerance {
            break;
        }
    }
    Ok((best.0, best.1, history, monotone))
}

/// Seeded restarts of alternating optimization; returns the best iterate.
pub fn seesaw(game: &Game, cfg: &SeesawConfig) -> Result<SeesawResult> {
    if cfg.d < 1 || cfg.restarts == 0 {
        return Err(Error::Unsupported("seesaw needs d ≥ 1 and at least one restart".into()));
    }
    let terms = terms(game)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best: Option<SeesawResult> = None;
    let mut restart_values = Vec::with_capacity(cfg.restarts);
    let mut monotone = true;
    for _ in 0..cfg.restarts {
        let mut local = ChaCha8Rng::seed_from_u64(rng.gen());
        let d = cfg.d;
        let alice = (0..terms.nx).map(|_| random_povm(&mut local, d, terms.na)).collect();
        let bob = (0..terms.ny).map(|_| random_povm(&mut local, d, terms.nb)).collect();
        let psi = random_pure(&mut local, d * d);
        let start = EntangledStrategy::from_pure_state(&super::linalg::coefficients(&psi, d, d), &alice, &bob)?;
        let (s, v, history, mono) = single_run(&terms, start, cfg)?;
        monotone &= mono;
        restart_values.push(v);
        if best.as_ref().map_or(true, |b| v > b.value) {
            best = Some(SeesawResult {
                value: v,
                strategy: s,
                history,
                monotone: true,
                restart_values: Vec::new(),
            });
        }
    }
    let mut out = best.expect("at least one restart");
    out.monotone = monotone;
    out.restart_values = restart_values;
    Ok(out)
}
