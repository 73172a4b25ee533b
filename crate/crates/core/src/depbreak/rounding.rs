use num_traits::{One, Zero};
use rand::distributions::{Distribution as _, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::multi::MultiTable;
use super::pmf::Key;
use crate::error::{Error, Result};
use crate::game::{classical_value, Budget, DeterministicStrategy};
use crate::repetition::{win_probability, WinEvent};
use crate::scalar::{rational_to_f64, Rational};

/// Single-copy strategy obtained by local sampling on one free coordinate.
///
/// Players share a sample of `(Ω_{-i}, Z)` drawn conditioned on the win event
/// and an all-anchor coordinate `i`; each player then resamples its questions
/// outside `i` from its own conditional law and answers as in `G^n`.
#[derive(Clone, Debug)]
pub struct RoundingStrategy {
    coordinate: usize,
    shared: Vec<(Key, Rational)>,
    /// `responses[t][s][q]`: law of player `t`'s base answer on question `q`.
    responses: Vec<Vec<Vec<Vec<Rational>>>>,
}

/// Outcome of comparing the rounded value with the conditional win probability.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundingCheck {
    /// 1-based coordinate of the rounded copy.
    pub coordinate: usize,
    /// `Pr[W_i | W_C]`.
    pub conditional_win: Rational,
    pub value: Rational,
    /// Distance between the rounded and actual local views.
    pub tv: Rational,
    pub classical_value: Rational,
    pub holds: bool,
}

/// Builds the rounding strategy for the `i`-th free coordinate of `table`.
pub fn rounding_strategy_multi(table: &MultiTable, i: usize) -> Result<RoundingStrategy> {
    if i >= table.m() {
        return Err(Error::InvalidCoordinates(format!(
            "free index {i} out of range for m = {}",
            table.m()
        )));
    }
    let game = table.game();
    let rg = table.repeated();
    let k = game.k();
    let coord = table.free()[i];
    let shared: Vec<(Key, Rational)> = table.anchored_shared(i)?.into_iter().collect();
    let om = table.cols_omega_minus(i);
    let olen = om.len();
    let zlen = table.event().len();
    let xi = table.cols_x(i);

    let mut responses = Vec::with_capacity(k);
    for t in 0..k {
        let given = MultiTable::concat(&[&om, &table.cols_z_player(t), &[xi[t]]]);
        let kernel = table.joint().kernel(&table.cols_x_rest(i, t), &given);
        let nq = game.questions(t).len();
        let na = game.answers(t).len();
        let mut per_sample = Vec::with_capacity(shared.len());
        for (s, _) in &shared {
            let mut per_q = Vec::with_capacity(nq);
            for q in 0..nq {
                let mut key: Key = s[..olen].to_vec();
                key.extend_from_slice(&s[olen + t * zlen..olen + (t + 1) * zlen]);
                key.push(q as u32);
                let mut law = vec![Rational::zero(); na];
                match kernel.get(&key) {
                    Some(rest) => {
                        for (others, p) in rest {
                            let mut coords = Vec::with_capacity(rg.n());
                            let mut it = others.iter();
                            for j in 0..rg.n() {
                                if j == coord {
                                    coords.push(q);
                                } else {
                                    coords.push(*it.next().expect("one entry per other coordinate") as usize);
                                }
                            }
                            let a = table.strategy().answer(t, rg.question_index(t, &coords));
                            law[rg.answer_at(t, a, coord)] += p;
                        }
                    }
                    None => law[0] = Rational::one(),
                }
                per_q.push(law);
            }
            per_sample.push(per_q);
        }
        responses.push(per_sample);
    }
    Ok(RoundingStrategy {
        coordinate: coord,
        shared,
        responses,
    })
}

impl RoundingStrategy {
    /// 0-based coordinate of `G^n` the strategy plays.
    pub fn coordinate(&self) -> usize {
        self.coordinate
    }

    pub fn shared_support(&self) -> usize {
        self.shared.len()
    }

    /// Law of player `t`'s answer to question `q` given shared sample `s`.
    pub fn response(&self, t: usize, s: usize, q: usize) -> &[Rational] {
        &self.responses[t][s][q]
    }

    /// Exact winning probability in the base game.
    pub fn value(&self, table: &MultiTable) -> Rational {
        let game = table.game();
        let qs = game.question_shape();
        let as_ = game.answer_shape();
        let k = game.k();
        let mut total = Rational::zero();
        for (si, (_, ps)) in self.shared.iter().enumerate() {
            for &x in game.support() {
                let mut win = Rational::zero();
                for a in 0..as_.size() {
                    if !game.accepts(x, a) {
                        continue;
                    }
                    let mut p = Rational::one();
                    for t in 0..k {
                        p *= &self.responses[t][si][qs.digit(x, t)][as_.digit(a, t)];
                        if p.is_zero() {
                            break;
                        }
                    }
                    win += p;
                }
                total += ps * game.mu(x) * win;
            }
        }
        total
    }

    /// Compares the value with `Pr[W_i | W_C]` minus the local-view distance.
    pub fn check(&self, table: &MultiTable) -> Result<RoundingCheck> {
        let rg = table.repeated();
        let free_index = table
            .free()
            .iter()
            .position(|&c| c == self.coordinate)
            .ok_or_else(|| Error::InvalidCoordinates("coordinate is not free".into()))?;
        let mut coords = table.event().coords();
        coords.push(self.coordinate);
        let both = WinEvent::new(coords, rg.n())?;
        let conditional_win = win_probability(rg, table.strategy(), &both)? / table.win_probability();
        let tv = table.anchor_substitution_term(free_index)?;
        let value = self.value(table);
        let classical = classical_value(table.game(), Budget::default())?.value;
        let holds = conditional_win <= &value + &tv && value <= classical;
        Ok(RoundingCheck {
            coordinate: self.coordinate + 1,
            conditional_win,
            value,
            tv,
            classical_value: classical,
            holds,
        })
    }

    /// Draws the shared sample and every private answer from a seeded generator.
    pub fn sample(&self, seed: u64) -> Result<DeterministicStrategy> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights: Vec<f64> = self.shared.iter().map(|(_, p)| rational_to_f64(p)).collect();
        let si = WeightedIndex::new(&weights)
            .map_err(|e| Error::InvalidDistribution(e.to_string()))?
            .sample(&mut rng);
        let mut maps = Vec::with_capacity(self.responses.len());
        for per_sample in &self.responses {
            let mut map = Vec::with_capacity(per_sample[si].len());
            for law in &per_sample[si] {
                let w: Vec<f64> = law.iter().map(rational_to_f64).collect();
                let a = WeightedIndex::new(&w)
                    .map_err(|e| Error::InvalidDistribution(e.to_string()))?
                    .sample(&mut rng);
                map.push(a);
            }
            maps.push(map);
        }
        Ok(DeterministicStrategy::from_maps_unchecked(maps))
    }
}

impl RoundingCheck {
    pub fn slack(&self) -> f64 {
        rational_to_f64(&(&self.value + &self.tv - &self.conditional_win))
    }
}
