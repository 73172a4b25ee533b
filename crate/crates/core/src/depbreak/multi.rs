use num_traits::{One, Zero};

use super::pmf::{attach, product, tv, Joint, Key};
use super::{BoundCheck, BOT, HIDDEN};
use crate::error::{Error, Result};
use crate::game::{is_anchored, AnchorSets, DeterministicStrategy, Game};
use crate::repetition::{check_repeated_strategy, repeat_game, RepeatedGame, WinEvent};
use crate::scalar::{pow, rational_to_f64, Rational};

/// Cap on the number of table rows.
const ROW_LIMIT: u64 = 20_000_000;

/// Column positions of the k-player table.
#[derive(Clone, Debug)]
struct Layout {
    n: usize,
    k: usize,
    m: usize,
    c: usize,
}

impl Layout {
    fn x(&self, j: usize, t: usize) -> usize {
        j * self.k + t
    }
    fn y(&self, j: usize, t: usize) -> usize {
        (self.n + j) * self.k + t
    }
    fn d(&self, i: usize) -> usize {
        2 * self.n * self.k + i
    }
    fn mh(&self, i: usize, t: usize) -> usize {
        2 * self.n * self.k + self.m + i * self.k + t
    }
    fn z(&self, t: usize, ci: usize) -> usize {
        2 * self.n * self.k + self.m + self.m * self.k + t * self.c + ci
    }
    fn w(&self) -> usize {
        2 * self.n * self.k + self.m + self.m * self.k + self.k * self.c
    }
    fn width(&self) -> usize {
        self.w() + 1
    }
}

/// Exact joint law of `(X_[n], Y_[n], D, M, Z, W)` for a fixed strategy on `G^n`.
///
/// Free coordinates are those outside `C`; the `i`-th free coordinate is
/// `free()[i]`. `D_i` records the excluded player.
#[derive(Clone, Debug)]
pub struct MultiTable {
    game: Game,
    anchors: AnchorSets,
    alpha: Rational,
    event: WinEvent,
    free: Vec<usize>,
    layout: Layout,
    joint: Joint<Rational>,
    win: Joint<Rational>,
    win_probability: Rational,
    repeated: RepeatedGame,
    strategy: DeterministicStrategy,
}

/// Builds the exact table for an anchored game, `n` repetitions, event `C`
/// and a deterministic strategy on the repeated game.
pub fn build_table_multi(
    game: &Game,
    n: usize,
    event: &WinEvent,
    strategy: &DeterministicStrategy,
) -> Result<MultiTable> {
    let anchors = game.anchors().cloned().ok_or(Error::NotAnchored)?;
    let (ok, alpha) = is_anchored(game, &anchors);
    if !ok {
        return Err(Error::NotAnchored);
    }
    let rg = repeat_game(game, n)?;
    check_repeated_strategy(&rg, strategy)?;
    if event.n() != n {
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
    let k = game.k();
    let c_coords = event.coords();
    let layout = Layout {
        n,
        k,
        m: free.len(),
        c: c_coords.len(),
    };
    let rows_needed = (game.support().len() as u128).pow(n as u32) * (k as u128).pow(free.len() as u32);
    if rows_needed > ROW_LIMIT as u128 {
        return Err(Error::SizeLimit {
            what: "dependency-breaking table rows",
            required: rows_needed.to_string(),
            limit: ROW_LIMIT,
        });
    }

    let qs = game.question_shape();
    let d_count = k.pow(free.len() as u32);
    let d_weight = Rational::new(1.into(), (d_count as i64).into());
    let mut rows = Vec::with_capacity(rows_needed as usize);
    rg.for_each_support(|x, mass| {
        let mut key = vec![0u32; layout.width()];
        for j in 0..n {
            for t in 0..k {
                let q = qs.digit(x[j], t);
                key[layout.x(j, t)] = q as u32;
                key[layout.y(j, t)] = if anchors.contains(t, q) { BOT } else { q as u32 };
            }
        }
        let pq = rg.player_questions_of(x);
        let answers: Vec<usize> = (0..k).map(|t| strategy.answer(t, pq[t])).collect();
        let ca = rg.coordinate_answers(&answers);
        for t in 0..k {
            for (ci, &c) in c_coords.iter().enumerate() {
                key[layout.z(t, ci)] = rg.answer_at(t, answers[t], c) as u32;
            }
        }
        let won = c_coords.iter().all(|&c| game.accepts(x[c], ca[c]));
        key[layout.w()] = u32::from(won);
        let weight = mass * &d_weight;
        for dsel in 0..d_count {
            let mut row = key.clone();
            let mut rest = dsel;
            for i in (0..free.len()).rev() {
                let excluded = rest % k;
                rest /= k;
                row[layout.d(i)] = excluded as u32;
                for t in 0..k {
                    row[layout.mh(i, t)] = if t == excluded {
                        HIDDEN
                    } else {
                        row[layout.y(free[i], t)]
                    };
                }
            }
            rows.push((row, weight.clone()));
        }
    });
    let joint = Joint::new(rows);
    let w_col = layout.w();
    let win_probability = joint.mass(|r| r[w_col] == 1);
    if win_probability.is_zero() {
        return Err(Error::ZeroWinProbability(c_coords.iter().map(|c| c + 1).collect()));
    }
    let win = joint.condition(|r| r[w_col] == 1, "W")?;
    Ok(MultiTable {
        game: game.clone(),
        anchors,
        alpha,
        event: event.clone(),
        free,
        layout,
        joint,
        win,
        win_probability,
        repeated: rg,
        strategy: strategy.clone(),
    })
}

/// Maximum and mass-weighted mean TV distance of the local sampling factorization.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalSamplingReport {
    pub coordinate: usize,
    pub max_tv: Rational,
    pub mean_tv: Rational,
    pub conditions: usize,
}

impl MultiTable {
    pub fn game(&self) -> &Game {
        &self.game
    }

    pub fn anchors(&self) -> &AnchorSets {
        &self.anchors
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn event(&self) -> &WinEvent {
        &self.event
    }

    pub fn free(&self) -> &[usize] {
        &self.free
    }

    pub fn m(&self) -> usize {
        self.free.len()
    }

    pub fn joint(&self) -> &Joint<Rational> {
        &self.joint
    }

    pub fn win_probability(&self) -> &Rational {
        &self.win_probability
    }

    pub fn repeated(&self) -> &RepeatedGame {
        &self.repeated
    }

    pub fn strategy(&self) -> &DeterministicStrategy {
        &self.strategy
    }

    /// `(|C| log₂|A| + log₂(1/Pr W_C)) / m`.
    pub fn delta(&self) -> f64 {
        let c = self.event.len() as f64;
        let a = (self.game.answer_space() as f64).log2();
        let w = -rational_to_f64(&self.win_probability).log2();
        ((c * a + w) / self.m() as f64).max(0.0)
    }

    pub(crate) fn cols_x(&self, i: usize) -> Vec<usize> {
        (0..self.layout.k).map(|t| self.layout.x(self.free[i], t)).collect()
    }

    pub(crate) fn cols_y(&self, i: usize) -> Vec<usize> {
        (0..self.layout.k).map(|t| self.layout.y(self.free[i], t)).collect()
    }

    fn cols_omega_i(&self, i: usize) -> Vec<usize> {
        let mut v = vec![self.layout.d(i)];
        v.extend((0..self.layout.k).map(|t| self.layout.mh(i, t)));
        v
    }

    /// `Ω_{-i}`: `(D_j, M_j)` for the other free coordinates, then `X_C`.
    pub(crate) fn cols_omega_minus(&self, i: usize) -> Vec<usize> {
        let mut v = Vec::new();
        for j in (0..self.m()).filter(|&j| j != i) {
            v.extend(self.cols_omega_i(j));
        }
        for c in self.event.coords() {
            v.extend((0..self.layout.k).map(|t| self.layout.x(c, t)));
        }
        v
    }

    pub(crate) fn cols_z(&self) -> Vec<usize> {
        (0..self.layout.k)
            .flat_map(|t| (0..self.layout.c).map(move |ci| (t, ci)))
            .map(|(t, ci)| self.layout.z(t, ci))
            .collect()
    }

    pub(crate) fn cols_z_player(&self, t: usize) -> Vec<usize> {
        (0..self.layout.c).map(|ci| self.layout.z(t, ci)).collect()
    }

    /// Player `t`'s questions outside free coordinate `i`, in coordinate order.
    pub(crate) fn cols_x_rest(&self, i: usize, t: usize) -> Vec<usize> {
        (0..self.layout.n)
            .filter(|&j| j != self.free[i])
            .map(|j| self.layout.x(j, t))
            .collect()
    }

    fn ycols_positions_without(&self, t: usize) -> Vec<usize> {
        (0..self.layout.k).filter(|&s| s != t).collect()
    }

    pub(crate) fn concat(parts: &[&[usize]]) -> Vec<usize> {
        parts.iter().flat_map(|p| p.iter().copied()).collect()
    }

    fn mean(&self, terms: Vec<Rational>) -> Rational {
        let m = Rational::from_integer((self.m() as i64).into());
        terms.into_iter().sum::<Rational>() / m
    }

    fn check_sqrt(&self, name: &str, lhs: Rational, factor: f64) -> BoundCheck {
        let rhs = factor * self.delta().sqrt();
        let lf = rational_to_f64(&lhs);
        let holds = if rhs == 0.0 { lhs.is_zero() } else { lf <= rhs };
        BoundCheck {
            name: name.to_string(),
            lhs: lf,
            rhs,
            holds,
        }
    }

    /// `‖P_{X_iY_iΩ_i|W} − P_{X_iY_iΩ_i}‖` for free coordinate `i`.
    pub fn lemma_i_term(&self, i: usize) -> Rational {
        let cols = Self::concat(&[&self.cols_x(i), &self.cols_y(i), &self.cols_omega_i(i)]);
        tv(&self.win.marginal(&cols), &self.joint.marginal(&cols))
    }

    /// `‖P_{X_iY_iZΩ_{-i}|W} − P_{X_i|Y_i} P_{Y_iZΩ_{-i}|W}‖`.
    pub fn lemma_ii_term(&self, i: usize) -> Result<Rational> {
        let k = self.layout.k;
        let base_cols = Self::concat(&[&self.cols_y(i), &self.cols_z(), &self.cols_omega_minus(i)]);
        let all = Self::concat(&[&base_cols, &self.cols_x(i)]);
        let kernel = self.joint.kernel(&self.cols_x(i), &self.cols_y(i));
        let rhs = attach(&self.win.marginal(&base_cols), &kernel, |key| key[..k].to_vec(), "X_i | Y_i")?;
        Ok(tv(&self.win.marginal(&all), &rhs))
    }

    /// `‖P_{Y_iZΩ|W} − P_{Y_i|Ω_i} P_{ZΩ|W}‖`.
    pub fn lemma_iii_term(&self, i: usize) -> Result<Rational> {
        let oi = self.cols_omega_i(i);
        let base_cols = Self::concat(&[&oi, &self.cols_omega_minus(i), &self.cols_z()]);
        let all = Self::concat(&[&base_cols, &self.cols_y(i)]);
        let kernel = self.joint.kernel(&self.cols_y(i), &oi);
        let len = oi.len();
        let rhs = attach(&self.win.marginal(&base_cols), &kernel, |key| key[..len].to_vec(), "Y_i | Ω_i")?;
        Ok(tv(&self.win.marginal(&all), &rhs))
    }

    /// `‖P_{Y_i} P_{ZΩ_{-i}|W,Y_i} − P_{Y_i} P_{ZΩ_{-i}|W,Y_i^{-t}}‖`.
    pub fn drop_player_term(&self, i: usize, t: usize) -> Result<Rational> {
        let rest = Self::concat(&[&self.cols_z(), &self.cols_omega_minus(i)]);
        let y = self.cols_y(i);
        let py = self.joint.marginal(&y);
        let full = attach(&py, &self.win.kernel(&rest, &y), |key| key.to_vec(), "W, Y_i")?;
        let keep = self.ycols_positions_without(t);
        let y_minus: Vec<usize> = keep.iter().map(|&s| y[s]).collect();
        let partial = attach(
            &py,
            &self.win.kernel(&rest, &y_minus),
            |key| keep.iter().map(|&s| key[s]).collect(),
            "W, Y_i^{-t}",
        )?;
        Ok(tv(&full, &partial))
    }

    /// `P_{Ω_{-i}Z|W,Y_i=⊥^k}`, keyed by `Ω_{-i} ++ Z`.
    pub fn anchored_shared(&self, i: usize) -> Result<super::pmf::Pmf<Rational>> {
        let rest = Self::concat(&[&self.cols_omega_minus(i), &self.cols_z()]);
        let y = self.cols_y(i);
        let anchored = self
            .win
            .condition(|r| y.iter().all(|&c| r[c] == BOT), "W, Y_i = ⊥^k")
            .map_err(|_| Error::AnchorEventUnreachable {
                coordinate: self.free[i] + 1,
            })?;
        Ok(anchored.marginal(&rest))
    }

    /// `‖P_{X_iΩ_{-i}Z|W} − P_{X_i} P_{Ω_{-i}Z|W,Y_i=⊥^k}‖`.
    pub fn anchor_substitution_term(&self, i: usize) -> Result<Rational> {
        let rest = Self::concat(&[&self.cols_omega_minus(i), &self.cols_z()]);
        let all = Self::concat(&[&self.cols_x(i), &rest]);
        let rhs = product(&self.joint.marginal(&self.cols_x(i)), &self.anchored_shared(i)?);
        Ok(tv(&self.win.marginal(&all), &rhs))
    }

    /// Both sides of the symmetrization bound for `S ⊊ [k]` (bitmask) and `t ∉ S`.
    pub fn symmetrization_terms(&self, i: usize, s_mask: u32, t: usize) -> Result<(Rational, Rational)> {
        let k = self.layout.k;
        let rest = Self::concat(&[&self.cols_z(), &self.cols_omega_minus(i)]);
        let y = self.cols_y(i);
        let py = self.joint.marginal(&y);
        let kernel = self.win.kernel(&rest, &y);
        let with = |mask: u32| {
            move |key: &[u32]| -> Key {
                (0..k)
                    .map(|s| if mask & (1 << s) != 0 { BOT } else { key[s] })
                    .collect()
            }
        };
        let left = attach(&py, &kernel, with(s_mask), "W, Y_i^S = ⊥")?;
        let right = attach(&py, &kernel, with(s_mask | (1 << t)), "W, Y_i^{S∪t} = ⊥")?;
        let lhs = tv(&left, &right);
        let size = s_mask.count_ones() as usize + 1;
        let factor = Rational::from_integer(2.into()) / pow(&self.alpha, size);
        Ok((lhs, factor * self.drop_player_term(i, t)?))
    }

    /// Every averaged inequality plus the per-coordinate symmetrization bounds.
    pub fn verify_holenstein_bounds(&self) -> Result<Vec<BoundCheck>> {
        let m = self.m();
        let k = self.layout.k;
        let mut out = Vec::new();

        let t1: Vec<Rational> = (0..m).map(|i| self.lemma_i_term(i)).collect();
        out.push(self.check_sqrt("holenstein_i", self.mean(t1), 1.0));
        let t2 = (0..m).map(|i| self.lemma_ii_term(i)).collect::<Result<Vec<_>>>()?;
        out.push(self.check_sqrt("holenstein_ii", self.mean(t2), 1.0));
        let t3 = (0..m).map(|i| self.lemma_iii_term(i)).collect::<Result<Vec<_>>>()?;
        out.push(self.check_sqrt("holenstein_iii", self.mean(t3), 1.0));

        let mut cor = Vec::with_capacity(m);
        for i in 0..m {
            let mut s = Rational::zero();
            for t in 0..k {
                s += self.drop_player_term(i, t)?;
            }
            cor.push(s);
        }
        out.push(self.check_sqrt("drop_one_player", self.mean(cor), 3.0 * k as f64));

        let a = rational_to_f64(&self.alpha);
        let t4 = (0..m)
            .map(|i| self.anchor_substitution_term(i))
            .collect::<Result<Vec<_>>>()?;
        let factor = 6.0 * k as f64 * a.powi(-(k as i32)) + 1.0;
        out.push(self.check_sqrt("anchor_substitution", self.mean(t4), factor));

        for i in 0..m {
            for s_mask in 0u32..(1 << k) - 1 {
                for t in (0..k).filter(|&t| s_mask & (1 << t) == 0) {
                    let (lhs, rhs) = self.symmetrization_terms(i, s_mask, t)?;
                    let members: Vec<String> = (0..k)
                        .filter(|&s| s_mask & (1 << s) != 0)
                        .map(|s| (s + 1).to_string())
                        .collect();
                    out.push(BoundCheck {
                        name: format!(
                            "symmetrization[i={},S={{{}}},t={}]",
                            self.free[i] + 1,
                            members.join(" "),
                            t + 1
                        ),
                        lhs: rational_to_f64(&lhs),
                        rhs: rational_to_f64(&rhs),
                        holds: lhs <= rhs,
                    });
                }
            }
        }
        Ok(out)
    }

    /// Exact TV between `P_{X_{-i}|X_i,Ω_{-i},Z}` and the product of the
    /// per-player conditionals `P_{X^t_{-i}|Ω_{-i},Z^t,X^t_i}`.
    pub fn check_local_sampling(&self, i: usize) -> Result<LocalSamplingReport> {
        let k = self.layout.k;
        let om = self.cols_omega_minus(i);
        let xi = self.cols_x(i);
        let cond_cols = Self::concat(&[&xi, &om, &self.cols_z()]);
        let rest_all: Vec<usize> = (0..k).flat_map(|t| self.cols_x_rest(i, t)).collect();
        let joint_kernel = self.joint.kernel(&rest_all, &cond_cols);
        let per_player: Vec<_> = (0..k)
            .map(|t| {
                let given = Self::concat(&[&om, &self.cols_z_player(t), &[xi[t]]]);
                self.joint.kernel(&self.cols_x_rest(i, t), &given)
            })
            .collect();
        let weights = self.joint.marginal(&cond_cols);
        let (olen, zlen) = (om.len(), self.layout.c);

        let mut max_tv = Rational::zero();
        let mut mean_tv = Rational::zero();
        for (c, w) in &weights {
            let target = joint_kernel
                .get(c)
                .ok_or_else(|| Error::ZeroMass("X_i, Ω_{-i}, Z".into()))?;
            let omega = &c[k..k + olen];
            let z = &c[k + olen..];
            let mut prod = super::pmf::Pmf::from([(Key::new(), Rational::one())]);
            for t in 0..k {
                let mut given = omega.to_vec();
                given.extend_from_slice(&z[t * zlen..(t + 1) * zlen]);
                given.push(c[t]);
                let row = per_player[t]
                    .get(&given)
                    .ok_or_else(|| Error::ZeroMass(format!("player {} local view", t + 1)))?;
                prod = product(&prod, row);
            }
            let d = tv(target, &prod);
            mean_tv += w * &d;
            if d > max_tv {
                max_tv = d;
            }
        }
        Ok(LocalSamplingReport {
            coordinate: self.free[i] + 1,
            max_tv,
            mean_tv,
            conditions: weights.len(),
        })
    }
}
