use std::collections::BTreeMap;

use super::pmf::{attach, tv, Joint, Key, Pmf};
use super::ReportedQuantity;
use crate::error::{Error, Result};
use crate::game::{is_anchored, AnchorSets, DeterministicStrategy, Game};
use crate::repetition::{check_repeated_strategy, repeat_game, RepeatedGame, WinEvent};
use crate::scalar::{rational_to_f64, Prob, Rational};

/// Cap on the number of table rows.
const ROW_LIMIT: u64 = 20_000_000;

/// Which player's questions `M_i` reveals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Alice,
    Bob,
}

impl Side {
    fn index(self) -> usize {
        match self {
            Side::Alice => 0,
            Side::Bob => 1,
        }
    }

    fn code(self) -> u32 {
        self.index() as u32
    }
}

/// One joint answer `(a_C, b_C)` with its probability.
pub type AnswerEntry<P> = (Vec<usize>, Vec<usize>, P);

/// Joint law of `(a_C, b_C)` given full question tuples.
pub trait AnswerModel<P> {
    /// Entries for questions `x`, `y` on coordinates `coords`.
    fn answers(&self, x: &[usize], y: &[usize], coords: &[usize]) -> Result<Vec<AnswerEntry<P>>>;
}

/// Answers of a deterministic strategy on `G^n`.
#[derive(Clone, Debug)]
pub struct DeterministicAnswers {
    repeated: RepeatedGame,
    strategy: DeterministicStrategy,
}

impl DeterministicAnswers {
    pub fn new(game: &Game, n: usize, strategy: &DeterministicStrategy) -> Result<Self> {
        let repeated = repeat_game(game, n)?;
        check_repeated_strategy(&repeated, strategy)?;
        Ok(DeterministicAnswers {
            repeated,
            strategy: strategy.clone(),
        })
    }
}

impl<P: Prob> AnswerModel<P> for DeterministicAnswers {
    fn answers(&self, x: &[usize], y: &[usize], coords: &[usize]) -> Result<Vec<AnswerEntry<P>>> {
        let rg = &self.repeated;
        let a = self.strategy.answer(0, rg.question_index(0, x));
        let b = self.strategy.answer(1, rg.question_index(1, y));
        let ac = coords.iter().map(|&c| rg.answer_at(0, a, c)).collect();
        let bc = coords.iter().map(|&c| rg.answer_at(1, b, c)).collect();
        Ok(vec![(ac, bc, P::one())])
    }
}

/// One term of the per-coordinate law: `(D_i, M_i, X_i, Y_i)` with its mass.
#[derive(Clone, Debug, PartialEq)]
struct Entry<P> {
    side: u32,
    m: u32,
    x: usize,
    y: usize,
    mass: P,
}

/// Per-player marginals and conditionals of `μ` used by the construction.
struct Marginals<P> {
    /// `μ(q, other)` indexed `[side][q][other]` from the given side's point of view.
    mu: [Vec<Vec<P>>; 2],
    marginal: [Vec<P>; 2],
    anchor_mass: [P; 2],
    p: [P; 2],
}

fn marginals<P: Prob>(game: &Game, anchors: &AnchorSets) -> Result<Marginals<P>> {
    let (nx, ny) = (game.questions(0).len(), game.questions(1).len());
    let qs = game.question_shape();
    let mut alice = vec![vec![P::zero(); ny]; nx];
    let mut bob = vec![vec![P::zero(); nx]; ny];
    for x in 0..nx {
        for y in 0..ny {
            let v = P::from_rational(game.mu(qs.encode(&[x, y])));
            alice[x][y] = v.clone();
            bob[y][x] = v;
        }
    }
    let sum = |v: &Vec<P>| v.iter().fold(P::zero(), |a, b| a + b.clone());
    let marginal = [
        alice.iter().map(sum).collect::<Vec<P>>(),
        bob.iter().map(sum).collect::<Vec<P>>(),
    ];
    let mut anchor_mass = [P::zero(), P::zero()];
    let mut p = [P::zero(), P::zero()];
    for s in 0..2 {
        anchor_mass[s] = marginal[s]
            .iter()
            .enumerate()
            .filter(|(q, _)| anchors.contains(s, *q))
            .fold(P::zero(), |a, (_, v)| a + v.clone());
        let rest = P::one() - anchor_mass[s].clone();
        p[s] = rest.cbrt().ok_or_else(|| {
            Error::Unsupported(format!(
                "1 - mu(anchor set of player {}) = {rest:?} has no cube root in this scalar type",
                s + 1
            ))
        })?;
    }
    Ok(Marginals {
        mu: [alice, bob],
        marginal,
        anchor_mass,
        p,
    })
}

/// Law of `(D_i, M_i, X_i, Y_i)` for one free coordinate, with `D_i` a fair coin.
fn free_coordinate_law<P: Prob>(game: &Game, anchors: &AnchorSets, mg: &Marginals<P>) -> Vec<Entry<P>> {
    let half = P::from_ratio(1, 2);
    let mut acc: BTreeMap<(u32, u32, usize, usize), P> = BTreeMap::new();
    for side in [Side::Alice, Side::Bob] {
        let s = side.index();
        let o = 1 - s;
        let nq = game.questions(s).len();
        let no = game.questions(o).len();
        let p = mg.p[s].clone();
        let keep = P::one() - p.clone();
        let anchor = mg.anchor_mass[s].clone();
        let rest = P::one() - anchor.clone();
        let in_anchor = |q: usize| anchors.contains(s, q);
        let anchored_law = |q: usize| -> P {
            if in_anchor(q) && !anchor.is_zero() {
                mg.marginal[s][q].clone() / anchor.clone()
            } else {
                P::zero()
            }
        };
        let mut push = |m: u32, q: usize, other: usize, mass: P| {
            if mass.is_zero() {
                return;
            }
            let (x, y) = if s == 0 { (q, other) } else { (other, q) };
            let e = acc.entry((side.code(), m, x, y)).or_insert_with(P::zero);
            *e = e.clone() + mass;
        };
        for q in 0..nq {
            let w = anchored_law(q);
            for other in 0..no {
                let m = half.clone() * keep.clone() * w.clone() * mg.marginal[o][other].clone();
                push(0, q, other, m);
            }
        }
        for revealed in 0..nq {
            let mq = mg.marginal[s][revealed].clone();
            if mq.is_zero() {
                continue;
            }
            let weight = if in_anchor(revealed) {
                p.clone() * keep.clone() * mq.clone() / anchor.clone()
            } else {
                p.clone() * p.clone() * mq.clone() / rest.clone()
            };
            if weight.is_zero() {
                continue;
            }
            for q in 0..nq {
                let mut law = keep.clone() * anchored_law(q);
                if q == revealed {
                    law = law + p.clone();
                }
                for other in 0..no {
                    let cond = mg.mu[s][revealed][other].clone() / mq.clone();
                    push(
                        1 + revealed as u32,
                        q,
                        other,
                        half.clone() * weight.clone() * law.clone() * cond,
                    );
                }
            }
        }
    }
    acc.into_iter()
        .map(|((side, m, x, y), mass)| Entry { side, m, x, y, mass })
        .collect()
}

/// The four summands for one `(x, y)` with `x` in the revealing player's anchor set.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchSum<P> {
    pub side: Side,
    /// Question of the revealing player.
    pub question: usize,
    /// Question of the other player.
    pub other: usize,
    pub bot: P,
    pub non_anchor: P,
    pub anchor_other: P,
    pub anchor_same: P,
    pub total: P,
    pub target: P,
}

/// Branch decomposition of `P_{X_iY_i | D_i = side}` on anchor questions.
pub fn branch_sums<P: Prob>(game: &Game, side: Side) -> Result<Vec<BranchSum<P>>> {
    let anchors = check_two_player(game)?.0;
    let mg = marginals::<P>(game, &anchors)?;
    let s = side.index();
    let o = 1 - s;
    let p = mg.p[s].clone();
    let keep = P::one() - p.clone();
    let anchor = mg.anchor_mass[s].clone();
    let rest = P::one() - anchor.clone();
    let mut out = Vec::new();
    for q in (0..game.questions(s).len()).filter(|&q| anchors.contains(s, q)) {
        let law = mg.marginal[s][q].clone() / anchor.clone();
        for other in 0..game.questions(o).len() {
            let bot = keep.clone() * law.clone() * mg.marginal[o][other].clone();
            let mut non_anchor = P::zero();
            let mut anchor_other = P::zero();
            for r in 0..game.questions(s).len() {
                let mr = mg.marginal[s][r].clone();
                if mr.is_zero() {
                    continue;
                }
                let cond = mg.mu[s][r][other].clone() / mr.clone();
                if anchors.contains(s, r) {
                    anchor_other = anchor_other
                        + p.clone() * keep.clone() * (mr / anchor.clone()) * keep.clone() * law.clone() * cond;
                } else {
                    non_anchor = non_anchor
                        + p.clone() * p.clone() * (mr / rest.clone()) * keep.clone() * law.clone() * cond;
                }
            }
            let own = mg.marginal[s][q].clone();
            let anchor_same = if own.is_zero() {
                P::zero()
            } else {
                p.clone() * keep.clone() * law.clone() * p.clone() * mg.mu[s][q][other].clone() / own
            };
            let total = bot.clone() + non_anchor.clone() + anchor_other.clone() + anchor_same.clone();
            out.push(BranchSum {
                side,
                question: q,
                other,
                bot,
                non_anchor,
                anchor_other,
                anchor_same,
                total,
                target: mg.mu[s][q][other].clone(),
            });
        }
    }
    Ok(out)
}

fn check_two_player(game: &Game) -> Result<(AnchorSets, Rational)> {
    if game.k() != 2 {
        return Err(Error::Unsupported(format!(
            "two-player construction needs k = 2, got {}",
            game.k()
        )));
    }
    let anchors = game.anchors().cloned().ok_or(Error::NotAnchored)?;
    let (ok, alpha) = is_anchored(game, &anchors);
    if !ok {
        return Err(Error::NotAnchored);
    }
    Ok((anchors, alpha))
}

/// Per-coordinate comparison of `P_{X_jY_j}` with `μ`.
#[derive(Clone, Debug, PartialEq)]
pub struct MarginalCheck {
    /// 1-based coordinate.
    pub coordinate: usize,
    pub max_deviation: f64,
    /// Whether every entry matches exactly in the table's scalar type.
    pub exact: bool,
}

/// Joint law of `(D, M, X_[n], Y_[n], Z, W)` for a two-player anchored game.
///
/// `D` codes Alice as 0 and Bob as 1; `M` codes `⊥` as 0 and `⊥/q` as `1 + q`.
#[derive(Clone, Debug)]
pub struct TwoPlayerTable<P> {
    game: Game,
    alpha: Rational,
    n: usize,
    event: WinEvent,
    free: Vec<usize>,
    p: [P; 2],
    joint: Joint<P>,
    win: Joint<P>,
    win_probability: P,
}

/// Builds the two-player table with answers drawn from `model`.
pub fn build_table_twoplayer<P: Prob>(
    game: &Game,
    n: usize,
    event: &WinEvent,
    model: &dyn AnswerModel<P>,
) -> Result<TwoPlayerTable<P>> {
    let (anchors, alpha) = check_two_player(game)?;
    if event.n() != n || n == 0 {
        return Err(Error::InvalidCoordinates(format!(
            "event over {} coordinates for n = {n}",
            event.n()
        )));
    }
    let free = event.free();
    if free.is_empty() {
        return Err(Error::InvalidCoordinates(
            "C must leave at least one free coordinate".into(),
        ));
    }
    let coords = event.coords();
    let mg = marginals::<P>(game, &anchors)?;
    let law = free_coordinate_law(game, &anchors, &mg);
    let qs = game.question_shape();
    let fixed: Vec<(usize, usize, P)> = game
        .support()
        .iter()
        .map(|&q| {
            let d = qs.decode(q);
            (d[0], d[1], P::from_rational(game.mu(q)))
        })
        .collect();
    let rows_needed = (law.len() as u128).pow(free.len() as u32) * (fixed.len() as u128).pow(coords.len() as u32);
    if rows_needed > ROW_LIMIT as u128 {
        return Err(Error::SizeLimit {
            what: "two-player dependency-breaking table rows",
            required: rows_needed.to_string(),
            limit: ROW_LIMIT,
        });
    }

    let m = free.len();
    let c = coords.len();
    let width = 2 * m + 2 * n + 2 * c + 1;
    let sizes: Vec<usize> = (0..n)
        .map(|j| if event.contains(j) { fixed.len() } else { law.len() })
        .collect();
    let free_pos: Vec<Option<usize>> = (0..n).map(|j| free.iter().position(|&f| f == j)).collect();
    let as_ = game.answer_shape();
    let mut rows = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        let mut key = vec![0u32; width];
        let mut mass = P::one();
        let mut x = vec![0usize; n];
        let mut y = vec![0usize; n];
        for j in 0..n {
            match free_pos[j] {
                Some(i) => {
                    let e = &law[idx[j]];
                    key[i] = e.side;
                    key[m + i] = e.m;
                    x[j] = e.x;
                    y[j] = e.y;
                    mass = mass * e.mass.clone();
                }
                None => {
                    let (a, b, w) = &fixed[idx[j]];
                    x[j] = *a;
                    y[j] = *b;
                    mass = mass * w.clone();
                }
            }
            key[2 * m + j] = x[j] as u32;
            key[2 * m + n + j] = y[j] as u32;
        }
        if !mass.is_zero() {
            for (ac, bc, pz) in model.answers(&x, &y, &coords)? {
                if pz.is_zero() {
                    continue;
                }
                let mut row = key.clone();
                for ci in 0..c {
                    row[2 * m + 2 * n + ci] = ac[ci] as u32;
                    row[2 * m + 2 * n + c + ci] = bc[ci] as u32;
                }
                let won = coords.iter().enumerate().all(|(ci, &j)| {
                    game.accepts(qs.encode(&[x[j], y[j]]), as_.encode(&[ac[ci], bc[ci]]))
                });
                row[width - 1] = u32::from(won);
                rows.push((row, mass.clone() * pz));
            }
        }
        let mut pos = n;
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < sizes[pos] {
                break;
            }
            idx[pos] = 0;
        }
        if idx.iter().all(|&v| v == 0) {
            break;
        }
    }
    let joint = Joint::new(rows);
    let w = width - 1;
    let win_probability = joint.mass(|r| r[w] == 1);
    if win_probability.is_zero() {
        return Err(Error::ZeroWinProbability(coords.iter().map(|c| c + 1).collect()));
    }
    let win = joint.condition(|r| r[w] == 1, "W")?;
    Ok(TwoPlayerTable {
        game: game.clone(),
        alpha,
        n,
        event: event.clone(),
        free,
        p: mg.p,
        joint,
        win,
        win_probability,
    })
}

impl<P: Prob> TwoPlayerTable<P> {
    pub fn game(&self) -> &Game {
        &self.game
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.free.len()
    }

    pub fn free(&self) -> &[usize] {
        &self.free
    }

    pub fn event(&self) -> &WinEvent {
        &self.event
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    /// Mixing weight of `side`.
    pub fn p(&self, side: Side) -> &P {
        &self.p[side.index()]
    }

    pub fn joint(&self) -> &Joint<P> {
        &self.joint
    }

    /// The joint conditioned on the win event.
    pub fn conditioned(&self) -> &Joint<P> {
        &self.win
    }

    pub fn win_probability(&self) -> &P {
        &self.win_probability
    }

    /// `(log₂(1/Pr W_C) + |C| log₂|A||B|) / m`.
    pub fn delta(&self) -> f64 {
        let c = self.event.len() as f64;
        let ab = (self.game.answer_space() as f64).log2();
        let w = -self.win_probability.to_f64().log2();
        ((w + c * ab) / self.m() as f64).max(0.0)
    }

    pub fn col_d(&self, i: usize) -> usize {
        i
    }

    pub fn col_m(&self, i: usize) -> usize {
        self.m() + i
    }

    pub fn col_x(&self, j: usize) -> usize {
        2 * self.m() + j
    }

    pub fn col_y(&self, j: usize) -> usize {
        2 * self.m() + self.n + j
    }

    /// `a_C` then `b_C`.
    pub fn cols_z(&self) -> Vec<usize> {
        let start = 2 * self.m() + 2 * self.n;
        (start..start + 2 * self.event.len()).collect()
    }

    pub fn col_w(&self) -> usize {
        2 * self.m() + 2 * self.n + 2 * self.event.len()
    }

    /// `(D_j, M_j)` for the other free coordinates, then `X_C`, then `Y_C`.
    pub fn cols_omega_minus(&self, i: usize) -> Vec<usize> {
        let mut v = Vec::new();
        for j in (0..self.m()).filter(|&j| j != i) {
            v.push(self.col_d(j));
            v.push(self.col_m(j));
        }
        let coords = self.event.coords();
        v.extend(coords.iter().map(|&c| self.col_x(c)));
        v.extend(coords.iter().map(|&c| self.col_y(c)));
        v
    }

    /// Compares `P_{X_jY_j}` with `μ` on every coordinate.
    pub fn marginal_checks(&self) -> Vec<MarginalCheck> {
        let qs = self.game.question_shape();
        (0..self.n)
            .map(|j| {
                let marg = self.joint.marginal(&[self.col_x(j), self.col_y(j)]);
                let mut max = 0f64;
                let mut exact = true;
                for x in 0..self.game.questions(0).len() {
                    for y in 0..self.game.questions(1).len() {
                        let want = P::from_rational(self.game.mu(qs.encode(&[x, y])));
                        let got = marg.get(&vec![x as u32, y as u32]).cloned().unwrap_or_else(P::zero);
                        exact &= got == want;
                        max = max.max((got - want).to_f64().abs());
                    }
                }
                MarginalCheck {
                    coordinate: j + 1,
                    max_deviation: max,
                    exact,
                }
            })
            .collect()
    }

    fn mean(&self, terms: &[Option<P>]) -> Option<f64> {
        let mut s = 0.0;
        for t in terms {
            s += t.as_ref()?.to_f64();
        }
        Some(s / terms.len() as f64)
    }

    fn cols_xy(&self, i: usize) -> [usize; 2] {
        let j = self.free[i];
        [self.col_x(j), self.col_y(j)]
    }

    fn cols_omega_i(&self, i: usize) -> [usize; 2] {
        [self.col_d(i), self.col_m(i)]
    }

    /// `‖P_{D_iM_iX_iY_i|W} − P_{D_iM_iX_iY_i}‖`.
    pub fn skew_local(&self, i: usize) -> P {
        let mut cols = self.cols_omega_i(i).to_vec();
        cols.extend(self.cols_xy(i));
        tv(&self.win.marginal(&cols), &self.joint.marginal(&cols))
    }

    /// `‖P_{ΩZX_iY_i|W} − P_{ΩZ|W} P_{X_iY_i|Ω}‖`.
    pub fn skew_kernel(&self, i: usize) -> Result<P> {
        let mut omega = self.cols_omega_i(i).to_vec();
        omega.extend(self.cols_omega_minus(i));
        let olen = omega.len();
        let mut base = omega.clone();
        base.extend(self.cols_z());
        let mut all = base.clone();
        all.extend(self.cols_xy(i));
        let kernel = self.joint.kernel(&self.cols_xy(i), &omega);
        let rhs = attach(&self.win.marginal(&base), &kernel, |k| k[..olen].to_vec(), "X_iY_i | Ω")?;
        Ok(tv(&self.win.marginal(&all), &rhs))
    }

    fn rest_cols(&self, i: usize) -> Vec<usize> {
        let mut v = self.cols_omega_minus(i);
        v.extend(self.cols_z());
        v
    }

    fn given_questions(&self, i: usize) -> Result<Pmf<P>> {
        let pq = self.joint.marginal(&self.cols_xy(i));
        let kernel = self.win.kernel(&self.rest_cols(i), &self.cols_xy(i));
        attach(&pq, &kernel, |k| k.to_vec(), "W, X_i, Y_i")
    }

    /// `‖P_{X_iY_i} P_{Ω_{-i}Z|X_i∈⊥,Y_i∈⊥,W} − P_{X_iY_i} P_{Ω_{-i}Z|X_iY_iW}‖`.
    pub fn skew_anchor(&self, i: usize) -> Result<P> {
        let anchors = self.game.anchors().expect("checked at construction");
        let [cx, cy] = self.cols_xy(i);
        let both = self.win.condition(
            |r| anchors.contains(0, r[cx] as usize) && anchors.contains(1, r[cy] as usize),
            "W, X_i ∈ ⊥, Y_i ∈ ⊥",
        )?;
        let pq = self.joint.marginal(&[cx, cy]);
        let left: Pmf<P> = super::pmf::product(&pq, &both.marginal(&self.rest_cols(i)));
        Ok(tv(&left, &self.given_questions(i)?))
    }

    /// `‖P_{X_iY_i} P_{Ω_{-i}Z|X_iY_iW} − P_{X_iY_iΩ_{-i}Z|W}‖`.
    pub fn skew_questions(&self, i: usize) -> Result<P> {
        let mut all = self.cols_xy(i).to_vec();
        all.extend(self.rest_cols(i));
        Ok(tv(&self.given_questions(i)?, &self.win.marginal(&all)))
    }

    /// The four averaged distances with their `√δ` or `√δ/α²` scale.
    pub fn skew_report(&self) -> Vec<ReportedQuantity> {
        let m = self.m();
        let sd = self.delta().sqrt();
        let a2 = rational_to_f64(&self.alpha).powi(2);
        let local: Vec<Option<P>> = (0..m).map(|i| Some(self.skew_local(i))).collect();
        let kernel: Vec<Option<P>> = (0..m).map(|i| self.skew_kernel(i).ok()).collect();
        let anchor: Vec<Option<P>> = (0..m).map(|i| self.skew_anchor(i).ok()).collect();
        let questions: Vec<Option<P>> = (0..m).map(|i| self.skew_questions(i).ok()).collect();
        vec![
            ReportedQuantity {
                name: "skew_local".into(),
                value: self.mean(&local),
                scale: sd,
            },
            ReportedQuantity {
                name: "skew_kernel".into(),
                value: self.mean(&kernel),
                scale: sd,
            },
            ReportedQuantity {
                name: "skew_anchor".into(),
                value: self.mean(&anchor),
                scale: sd / a2,
            },
            ReportedQuantity {
                name: "skew_questions".into(),
                value: self.mean(&questions),
                scale: sd / a2,
            },
        ]
    }

    /// `P_{Z | Ω_{-i} = ω, X_i = x, Y_i = y}` keyed by `ω ++ [x, y]`.
    pub fn answer_kernel(&self, i: usize) -> super::pmf::Kernel<P> {
        let mut given = self.cols_omega_minus(i);
        given.extend(self.cols_xy(i));
        self.joint.kernel(&self.cols_z(), &given)
    }

    /// `P_{X_[n] | Ω_{-i} = ω, X_i = x}` (Alice) or the `Y` analogue (Bob),
    /// keyed by `ω ++ [q]` with outputs over all `n` questions of that player.
    pub fn question_kernel(&self, i: usize, side: Side) -> super::pmf::Kernel<P> {
        let j = self.free[i];
        let own: Vec<usize> = match side {
            Side::Alice => (0..self.n).map(|c| self.col_x(c)).collect(),
            Side::Bob => (0..self.n).map(|c| self.col_y(c)).collect(),
        };
        let mut given = self.cols_omega_minus(i);
        given.push(own[j]);
        self.joint.kernel(&own, &given)
    }

    /// `P_{X_[n] | Ω_{-i} = ω, X_i ∈ ⊥}` (or the `Y` analogue), keyed by `ω`.
    pub fn anchor_question_kernel(&self, i: usize, side: Side) -> super::pmf::Kernel<P> {
        let anchors = self.game.anchors().expect("checked at construction");
        let j = self.free[i];
        let s = side.index();
        let own: Vec<usize> = match side {
            Side::Alice => (0..self.n).map(|c| self.col_x(c)).collect(),
            Side::Bob => (0..self.n).map(|c| self.col_y(c)).collect(),
        };
        let col = own[j];
        let rows = self
            .joint
            .rows()
            .iter()
            .filter(|(k, _)| anchors.contains(s, k[col] as usize))
            .cloned()
            .collect();
        Joint::new(rows).kernel(&own, &self.cols_omega_minus(i))
    }

    /// Distinct values of `Ω_{-i}` under `W`, with their conditional mass.
    pub fn omega_minus_given_win(&self, i: usize) -> Pmf<P> {
        self.win.marginal(&self.cols_omega_minus(i))
    }

    /// Raw key helper for callers that need `ω ++ extra`.
    pub fn key_with(omega: &[u32], extra: &[u32]) -> Key {
        let mut k = omega.to_vec();
        k.extend_from_slice(extra);
        k
    }
}

/// A two-player table in exact mode when both mixing weights are rational.
#[derive(Clone, Debug)]
pub enum AutoTable {
    Exact(TwoPlayerTable<Rational>),
    Float(TwoPlayerTable<f64>),
}

impl AutoTable {
    pub fn build(game: &Game, n: usize, event: &WinEvent, strategy: &DeterministicStrategy) -> Result<Self> {
        let model = DeterministicAnswers::new(game, n, strategy)?;
        let (anchors, _) = check_two_player(game)?;
        if marginals::<Rational>(game, &anchors).is_ok() {
            Ok(AutoTable::Exact(build_table_twoplayer(game, n, event, &model)?))
        } else {
            Ok(AutoTable::Float(build_table_twoplayer(game, n, event, &model)?))
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, AutoTable::Exact(_))
    }

    pub fn marginal_checks(&self) -> Vec<MarginalCheck> {
        match self {
            AutoTable::Exact(t) => t.marginal_checks(),
            AutoTable::Float(t) => t.marginal_checks(),
        }
    }

    pub fn skew_report(&self) -> Vec<ReportedQuantity> {
        match self {
            AutoTable::Exact(t) => t.skew_report(),
            AutoTable::Float(t) => t.skew_report(),
        }
    }

    pub fn delta(&self) -> f64 {
        match self {
            AutoTable::Exact(t) => t.delta(),
            AutoTable::Float(t) => t.delta(),
        }
    }

    pub fn p(&self, side: Side) -> f64 {
        match self {
            AutoTable::Exact(t) => rational_to_f64(t.p(side)),
            AutoTable::Float(t) => *t.p(side),
        }
    }
}
