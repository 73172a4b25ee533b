//! Averaged measurement operators and the partially measured states
//! `√A ⊗ √B |ψ⟩` of an entangled strategy on a repeated anchored game.

use std::collections::BTreeMap;

use super::linalg::{kron, sqrt_psd, CMat, CVec};
use super::strategy::EntangledStrategy;
use crate::depbreak::{build_table_twoplayer, AnswerModel, Kernel, Pmf, Side, TwoPlayerTable};
use crate::error::{Error, Result};
use crate::game::Game;
use crate::repetition::{repeat_game, RepeatedGame, WinEvent};
use crate::scalar::rational_to_f64;

fn player(side: Side) -> usize {
    match side {
        Side::Alice => 0,
        Side::Bob => 1,
    }
}

/// `A(q, a_C)` for every repeated question `q` and answer restriction `a_C`.
#[derive(Clone, Debug)]
struct Restricted {
    /// `[player][question][code of a_C]`.
    coarse: [Vec<Vec<CMat>>; 2],
    /// `[player][free coordinate position][question][answer at that coordinate][code of a_C]`.
    fine: [Vec<Vec<Vec<Vec<CMat>>>>; 2],
}

/// Answer distributions of an entangled strategy on `G^n`, with the
/// dependency-breaking table they induce.
#[derive(Clone, Debug)]
pub struct EntangledTable {
    repeated: RepeatedGame,
    strategy: EntangledStrategy,
    coords: Vec<usize>,
    restricted: Restricted,
    table: TwoPlayerTable<f64>,
}

struct Model<'a> {
    repeated: &'a RepeatedGame,
    strategy: &'a EntangledStrategy,
    coords: &'a [usize],
    coarse: &'a [Vec<Vec<CMat>>; 2],
}

impl AnswerModel<f64> for Model<'_> {
    fn answers(&self, x: &[usize], y: &[usize], coords: &[usize]) -> Result<Vec<(Vec<usize>, Vec<usize>, f64)>> {
        if coords != self.coords {
            return Err(Error::InvalidCoordinates("answer model built for other coordinates".into()));
        }
        let rg = self.repeated;
        let base = rg.base();
        let (na, nb) = (base.answers(0).len(), base.answers(1).len());
        let qa = rg.question_index(0, x);
        let qb = rg.question_index(1, y);
        let mut out = Vec::new();
        for (ca, ma) in self.coarse[0][qa].iter().enumerate() {
            for (cb, mb) in self.coarse[1][qb].iter().enumerate() {
                let p = self.strategy.correlator(ma, mb);
                if p > 0.0 {
                    out.push((digits(ca, na, coords.len()), digits(cb, nb, coords.len()), p));
                }
            }
        }
        Ok(out)
    }
}

/// Mixed-radix digits of `code`, most significant first.
fn digits(mut code: usize, base: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = code % base;
        code /= base;
    }
    out
}

fn encode(values: &[u32], base: usize) -> usize {
    values.iter().fold(0, |acc, &v| acc * base + v as usize)
}

fn restricted(rg: &RepeatedGame, s: &EntangledStrategy, coords: &[usize], free: &[usize]) -> Restricted {
    let d = s.d();
    let c = coords.len();
    let build = |t: usize| {
        let na = rg.base().answers(t).len();
        let codes = na.pow(c as u32);
        let mut coarse = vec![vec![CMat::zeros(d, d); codes]; rg.player_questions(t)];
        let mut fine = vec![vec![vec![vec![CMat::zeros(d, d); codes]; na]; rg.player_questions(t)]; free.len()];
        for q in 0..rg.player_questions(t) {
            for (a, m) in s.povm(t, q).iter().enumerate() {
                let code = coords
                    .iter()
                    .fold(0, |acc, &j| acc * na + rg.answer_at(t, a, j));
                coarse[q][code] += m;
                for (f, &j) in free.iter().enumerate() {
                    fine[f][q][rg.answer_at(t, a, j)][code] += m;
                }
            }
        }
        (coarse, fine)
    };
    let (ca, fa) = build(0);
    let (cb, fb) = build(1);
    Restricted {
        coarse: [ca, cb],
        fine: [fa, fb],
    }
}

impl EntangledTable {
    /// `strategy` acts on the materialized `n`-fold repetition of `game`.
    pub fn build(game: &Game, n: usize, event: &WinEvent, strategy: &EntangledStrategy) -> Result<Self> {
        let repeated = repeat_game(game, n)?;
        for t in 0..2 {
            let fam = strategy.povms(t);
            if fam.len() != repeated.player_questions(t)
                || fam.iter().any(|p| p.len() != repeated.player_answers(t))
            {
                return Err(Error::Dimension(format!(
                    "player {}: strategy does not match the {n}-fold repetition",
                    t + 1
                )));
            }
        }
        let coords = event.coords();
        let restricted = restricted(&repeated, strategy, &coords, &event.free());
        let model = Model {
            repeated: &repeated,
            strategy,
            coords: &coords,
            coarse: &restricted.coarse,
        };
        let table = build_table_twoplayer(game, n, event, &model)?;
        Ok(EntangledTable {
            repeated,
            strategy: strategy.clone(),
            coords,
            restricted,
            table,
        })
    }

    pub fn table(&self) -> &TwoPlayerTable<f64> {
        &self.table
    }

    pub fn strategy(&self) -> &EntangledStrategy {
        &self.strategy
    }

    pub fn repeated(&self) -> &RepeatedGame {
        &self.repeated
    }

    pub fn coords(&self) -> &[usize] {
        &self.coords
    }

    pub fn game(&self) -> &Game {
        self.repeated.base()
    }

    /// Answer alphabet size of `side` in the base game.
    pub fn answers(&self, side: Side) -> usize {
        self.game().answers(player(side)).len()
    }

    /// Number of `a_C` (or `b_C`) values.
    pub fn codes(&self, side: Side) -> usize {
        self.answers(side).pow(self.coords.len() as u32)
    }

    /// Splits a `z` key (`a_C` then `b_C`) into the two codes.
    pub fn split_z(&self, z: &[u32]) -> (usize, usize) {
        let c = self.coords.len();
        (
            encode(&z[..c], self.answers(Side::Alice)),
            encode(&z[c..], self.answers(Side::Bob)),
        )
    }

    /// All `z` keys in order.
    pub fn z_keys(&self) -> Vec<Vec<u32>> {
        let c = self.coords.len();
        let (na, nb) = (self.answers(Side::Alice), self.answers(Side::Bob));
        let mut out = Vec::new();
        for ca in 0..self.codes(Side::Alice) {
            for cb in 0..self.codes(Side::Bob) {
                let mut k: Vec<u32> = digits(ca, na, c).into_iter().map(|v| v as u32).collect();
                k.extend(digits(cb, nb, c).into_iter().map(|v| v as u32));
                out.push(k);
            }
        }
        out
    }

    /// `A(x_[n], a_C)` for a repeated question index.
    pub fn restricted_operator(&self, side: Side, question: usize, code: usize) -> &CMat {
        &self.restricted.coarse[player(side)][question][code]
    }

    /// `Σ_{a | a_i, a_C} A(x_[n], a)` for free coordinate `i`.
    pub fn fine_operator(&self, side: Side, i: usize, question: usize, answer: usize, code: usize) -> &CMat {
        &self.restricted.fine[player(side)][i][question][answer][code]
    }

    /// `Σ_q law(q) · op(q)` over repeated questions keyed by their `n` coordinates.
    pub fn average(&self, side: Side, law: &Pmf<f64>, op: impl Fn(usize) -> CMat) -> CMat {
        let d = self.strategy.d();
        let t = player(side);
        let mut acc = CMat::zeros(d, d);
        for (key, &w) in law {
            let coords: Vec<usize> = key.iter().map(|&v| v as usize).collect();
            acc += op(self.repeated.question_index(t, &coords)).scale(w);
        }
        acc
    }

    /// `Pr(W_J)` for the coordinates `J`, computed from the strategy on `μ^{⊗n}`.
    pub fn win_probability_on(&self, coords: &[usize]) -> f64 {
        let rg = &self.repeated;
        let game = rg.base();
        let qs = game.question_shape();
        let as_ = game.answer_shape();
        let n = rg.n();
        let mut total = 0.0;
        rg.for_each_support(|x, mass| {
            let w = rational_to_f64(mass);
            let xa: Vec<usize> = x.iter().map(|&q| qs.digit(q, 0)).collect();
            let yb: Vec<usize> = x.iter().map(|&q| qs.digit(q, 1)).collect();
            let qa = rg.question_index(0, &xa);
            let qb = rg.question_index(1, &yb);
            for (a, m) in self.strategy.povm(0, qa).iter().enumerate() {
                for (b, nn) in self.strategy.povm(1, qb).iter().enumerate() {
                    let ok = coords.iter().all(|&j| {
                        j < n && game.accepts(x[j], as_.encode(&[rg.answer_at(0, a, j), rg.answer_at(1, b, j)]))
                    });
                    if ok {
                        total += w * self.strategy.correlator(m, nn);
                    }
                }
            }
        });
        total
    }
}

/// Which averaged operator a player uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Slot {
    /// `X_i = q`.
    Question(usize),
    /// `X_i` in the anchor set.
    Anchor,
    /// `M_i = ⊥/q`: the mixture `(1−p)·Anchor + p·Question(q)`.
    Mixed(usize),
}

/// Averaged operators of one player for fixed `(i, ω_{-i}, z)`.
#[derive(Clone, Debug)]
pub struct SideOperators {
    pub question: Vec<Option<CMat>>,
    pub anchor: Option<CMat>,
    pub mixed: Vec<Option<CMat>>,
}

impl SideOperators {
    pub fn get(&self, slot: Slot) -> Option<&CMat> {
        match slot {
            Slot::Question(q) => self.question.get(q)?.as_ref(),
            Slot::Anchor => self.anchor.as_ref(),
            Slot::Mixed(q) => self.mixed.get(q)?.as_ref(),
        }
    }
}

/// Operators and states `√A ⊗ √B |ψ⟩` for one `(i, ω_{-i}, z)`.
#[derive(Clone, Debug)]
pub struct PhiFamily {
    /// Free coordinate position (0-based, among free coordinates).
    pub coordinate: usize,
    pub omega: Vec<u32>,
    pub z: Vec<u32>,
    pub alice: SideOperators,
    pub bob: SideOperators,
    d: usize,
    state: CVec,
}

impl PhiFamily {
    pub fn operators(&self, side: Side) -> &SideOperators {
        match side {
            Side::Alice => &self.alice,
            Side::Bob => &self.bob,
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `√A ⊗ √B |ψ⟩`; `None` when either operator is undefined.
    pub fn phi(&self, a: Slot, b: Slot) -> Option<CVec> {
        let ma = self.alice.get(a)?;
        let mb = self.bob.get(b)?;
        Some(kron(&sqrt_psd(ma), &sqrt_psd(mb)) * &self.state)
    }

    pub fn gamma(&self, a: Slot, b: Slot) -> Option<f64> {
        Some(self.phi(a, b)?.norm())
    }

    /// The normalized state; `None` when undefined or of zero norm.
    pub fn normalized(&self, a: Slot, b: Slot) -> Option<CVec> {
        let v = self.phi(a, b)?;
        let n = v.norm();
        (n > 0.0).then(|| v.unscale(n))
    }
}

/// Conditional question laws of one free coordinate, computed once.
pub(crate) struct Laws {
    pub(crate) question: [Kernel<f64>; 2],
    pub(crate) anchor: [Kernel<f64>; 2],
}

impl EntangledTable {
    pub(crate) fn laws(&self, i: usize) -> Laws {
        let t = &self.table;
        Laws {
            question: [t.question_kernel(i, Side::Alice), t.question_kernel(i, Side::Bob)],
            anchor: [t.anchor_question_kernel(i, Side::Alice), t.anchor_question_kernel(i, Side::Bob)],
        }
    }

    fn side_operators(&self, laws: &Laws, side: Side, omega: &[u32], code: usize) -> SideOperators {
        let t = player(side);
        let nq = self.game().questions(t).len();
        let op = |law: &Pmf<f64>| self.average(side, law, |q| self.restricted.coarse[t][q][code].clone());
        let question: Vec<Option<CMat>> = (0..nq)
            .map(|q| {
                laws.question[t]
                    .get(&TwoPlayerTable::<f64>::key_with(omega, &[q as u32]))
                    .map(op)
            })
            .collect();
        let anchor = laws.anchor[t].get(omega).map(op);
        let p = *self.table.p(side);
        let mixed = question
            .iter()
            .map(|a| match (a, &anchor) {
                (Some(a), Some(b)) => Some(b.scale(1.0 - p) + a.scale(p)),
                _ => None,
            })
            .collect();
        SideOperators {
            question,
            anchor,
            mixed,
        }
    }

    pub(crate) fn family_with(&self, laws: &Laws, i: usize, omega: &[u32], z: &[u32]) -> PhiFamily {
        let (ca, cb) = self.split_z(z);
        PhiFamily {
            coordinate: i,
            omega: omega.to_vec(),
            z: z.to_vec(),
            alice: self.side_operators(laws, Side::Alice, omega, ca),
            bob: self.side_operators(laws, Side::Bob, omega, cb),
            d: self.strategy.d(),
            state: self.strategy.state(),
        }
    }

    /// The Φ family for free coordinate `i`, `ω_{-i}` and `z = (a_C, b_C)`.
    pub fn phi_family(&self, i: usize, omega: &[u32], z: &[u32]) -> Result<PhiFamily> {
        if i >= self.table.m() {
            return Err(Error::InvalidCoordinates(format!("free coordinate {i} out of range")));
        }
        if z.len() != 2 * self.coords.len() {
            return Err(Error::Dimension(format!("z has {} entries", z.len())));
        }
        let present = self.table.joint().marginal(&self.table.cols_omega_minus(i));
        if !present.contains_key(omega) {
            return Err(Error::ZeroMass(format!("Ω_-i = {omega:?}")));
        }
        Ok(self.family_with(&self.laws(i), i, omega, z))
    }

    /// Values of `Ω_{-i}` with positive probability.
    pub fn omega_values(&self, i: usize) -> Vec<Vec<u32>> {
        self.table
            .joint()
            .marginal(&self.table.cols_omega_minus(i))
            .into_keys()
            .collect()
    }

    /// Checks the γ identity, its normalization, the mixing identity and Ando's
    /// identity over every free coordinate, `ω_{-i}` and `z`.
    pub fn phi_report(&self) -> Result<PhiReport> {
        let mut r = PhiReport::default();
        let game = self.game();
        let (nx, ny) = (game.questions(0).len(), game.questions(1).len());
        let zs = self.z_keys();
        for i in 0..self.table.m() {
            let laws = self.laws(i);
            let answer = self.table.answer_kernel(i);
            let direct = self.direct_mixed(i);
            for omega in self.omega_values(i) {
                let mut sums: BTreeMap<(usize, usize), f64> = BTreeMap::new();
                for z in &zs {
                    let fam = self.family_with(&laws, i, &omega, z);
                    r.families += 1;
                    for x in 0..nx {
                        for y in 0..ny {
                            let key = TwoPlayerTable::<f64>::key_with(&omega, &[x as u32, y as u32]);
                            let Some(law) = answer.get(&key) else { continue };
                            let Some(g) = fam.gamma(Slot::Question(x), Slot::Question(y)) else {
                                return Err(Error::ZeroMass(format!("averaged operators at {key:?}")));
                            };
                            let want = law.get(z).copied().unwrap_or(0.0);
                            r.gamma_error = r.gamma_error.max((g * g - want).abs());
                            r.gamma_checks += 1;
                            *sums.entry((x, y)).or_insert(0.0) += g * g;
                            let (ma, mb) = (fam.alice.question[x].as_ref(), fam.bob.question[y].as_ref());
                            if let (Some(ma), Some(mb)) = (ma, mb) {
                                let s = &self.strategy;
                                r.ando_error = r.ando_error.max((s.correlator(ma, mb) - s.correlator_direct(ma, mb)).abs());
                            }
                        }
                    }
                    for (side, ops) in [(Side::Alice, &fam.alice), (Side::Bob, &fam.bob)] {
                        let t = player(side);
                        let code = if t == 0 { self.split_z(z).0 } else { self.split_z(z).1 };
                        for (q, mixed) in ops.mixed.iter().enumerate() {
                            let key = TwoPlayerTable::<f64>::key_with(&omega, &[t as u32, 1 + q as u32]);
                            let (Some(mixed), Some(law)) = (mixed, direct[t].get(&key)) else { continue };
                            let want = self.average(side, law, |qq| self.restricted.coarse[t][qq][code].clone());
                            r.mixing_error = r.mixing_error.max((mixed - want).camax());
                            r.mixing_checks += 1;
                        }
                    }
                }
                for s in sums.values() {
                    r.normalization_error = r.normalization_error.max((s - 1.0).abs());
                }
            }
        }
        Ok(r)
    }

    /// `P_{X_[n] | Ω_{-i}, D_i, M_i}` (and the `Y` analogue), keyed `ω ++ [D, M]`.
    fn direct_mixed(&self, i: usize) -> [Kernel<f64>; 2] {
        let t = &self.table;
        let n = t.n();
        let mut given = t.cols_omega_minus(i);
        given.push(t.col_d(i));
        given.push(t.col_m(i));
        let xs: Vec<usize> = (0..n).map(|c| t.col_x(c)).collect();
        let ys: Vec<usize> = (0..n).map(|c| t.col_y(c)).collect();
        [t.joint().kernel(&xs, &given), t.joint().kernel(&ys, &given)]
    }
}

/// Worst deviations of the identities satisfied by the Φ states.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PhiReport {
    pub families: usize,
    pub gamma_checks: usize,
    pub mixing_checks: usize,
    /// `max |γ² − P(z | ω_{-i}, x, y)|`.
    pub gamma_error: f64,
    /// `max |Σ_z γ² − 1|`.
    pub normalization_error: f64,
    /// Largest entry of the mixed operator minus the directly averaged one.
    pub mixing_error: f64,
    /// `max |Tr(X√ρYᵀ√ρ) − ⟨ψ|X⊗Y|ψ⟩|` over averaged operator pairs.
    pub ando_error: f64,
}
