use std::ops::AddAssign;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use super::{DeterministicStrategy, Game};
use crate::error::{Error, Result};
use crate::scalar::Rational;

/// Default cap on evaluated (strategy, question) pairs.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Enumeration budget, counted in (outer strategy, question, answer) evaluations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub evaluations: u64,
}

impl Budget {
    pub fn new(evaluations: u64) -> Self {
        Budget { evaluations }
    }

    pub fn unlimited() -> Self {
        Budget {
            evaluations: u64::MAX,
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            evaluations: DEFAULT_BUDGET,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalSolution {
    pub value: Rational,
    pub strategy: DeterministicStrategy,
    /// Evaluations charged against the budget.
    pub evaluations: u64,
}

trait Weight: Clone + Ord + Zero + Send + Sync + for<'a> AddAssign<&'a Self> {}
impl Weight for u128 {}
impl Weight for BigUint {}

struct Entry<W> {
    /// Question index of the last player.
    last_q: usize,
    /// Offset of this question tuple's row in the predicate table.
    row: usize,
    /// Question indices of the enumerated players.
    outer_q: Vec<usize>,
    weight: W,
}

struct Search<'g, W> {
    game: &'g Game,
    entries: Vec<Entry<W>>,
    /// Radix of each strategy digit (answer alphabet size of the owning player).
    radices: Vec<usize>,
    /// First digit position of each enumerated player.
    offsets: Vec<usize>,
    last_questions: usize,
    last_answers: usize,
}

/// Exact classical value by enumerating players `0..k-1` and best-responding
/// with the last player.
///
/// Ties among best responses go to the lowest answer index; among outer
/// strategies the first maximizer in lexicographic order is returned,
/// independently of how the work is split across threads.
pub fn classical_value(game: &Game, budget: Budget) -> Result<ClassicalSolution> {
    let k = game.k();
    let last = k - 1;
    let mut radices = Vec::new();
    let mut offsets = Vec::new();
    for t in 0..last {
        offsets.push(radices.len());
        radices.extend(std::iter::repeat(game.answers(t).len()).take(game.questions(t).len()));
    }
    let space: BigUint = radices.iter().map(|&r| BigUint::from(r)).product();
    let required = &space * game.support().len().max(1) * game.answers(last).len();
    let evaluations = required.to_u64().filter(|&r| r <= budget.evaluations);
    let (Some(evaluations), Some(space_n)) = (evaluations, space.to_u64()) else {
        return Err(Error::BudgetExceeded {
            space: space.to_string(),
            required: required.to_string(),
            budget: budget.evaluations,
        });
    };

    let denom_lcm = game
        .support()
        .iter()
        .fold(BigInt::from(1), |acc, &x| acc.lcm(game.mu(x).denom()));
    let weight_of = |x: usize| -> BigUint {
        let w = game.mu(x) * Rational::from(denom_lcm.clone());
        w.to_integer().to_biguint().expect("masses are non-negative")
    };
    let lcm_u = denom_lcm.to_biguint().expect("positive");

    let (best, strategy) = match lcm_u.to_u128() {
        Some(_) => Search::build(game, &radices, &offsets, |x| weight_of(x).to_u128().unwrap())
            .run(space_n),
        None => Search::build(game, &radices, &offsets, weight_of).run(space_n),
    };
    let value = Rational::new(BigInt::from(best), denom_lcm);
    Ok(ClassicalSolution {
        value,
        strategy,
        evaluations,
    })
}

impl<'g, W: Weight + Into<BigUint>> Search<'g, W> {
    fn build(
        game: &'g Game,
        radices: &[usize],
        offsets: &[usize],
        weight: impl Fn(usize) -> W,
    ) -> Self {
        let k = game.k();
        let qs = game.question_shape();
        let na = game.answer_shape().size();
        let entries = game
            .support()
            .iter()
            .map(|&x| {
                let digits = qs.decode(x);
                Entry {
                    last_q: digits[k - 1],
                    row: x * na,
                    outer_q: digits[..k - 1].to_vec(),
                    weight: weight(x),
                }
            })
            .collect();
        Search {
            game,
            entries,
            radices: radices.to_vec(),
            offsets: offsets.to_vec(),
            last_questions: game.questions(k - 1).len(),
            last_answers: game.answers(k - 1).len(),
        }
    }

    fn decode(&self, mut s: u64) -> Vec<usize> {
        let mut digits = vec![0; self.radices.len()];
        for pos in (0..self.radices.len()).rev() {
            let r = self.radices[pos] as u64;
            digits[pos] = (s % r) as usize;
            s /= r;
        }
        digits
    }

    fn increment(&self, digits: &mut [usize]) {
        for pos in (0..digits.len()).rev() {
            digits[pos] += 1;
            if digits[pos] < self.radices[pos] {
                return;
            }
            digits[pos] = 0;
        }
    }

    /// Best-response table and total for one outer strategy.
    fn score(&self, digits: &[usize], scores: &mut [W]) -> W {
        let pred = self.game.predicate_dense();
        let astride = self.game.answer_shape();
        for s in scores.iter_mut() {
            *s = W::zero();
        }
        for e in &self.entries {
            let mut base = e.row;
            for (t, &q) in e.outer_q.iter().enumerate() {
                base += digits[self.offsets[t] + q] * astride.stride(t);
            }
            let cell = &mut scores[e.last_q * self.last_answers..][..self.last_answers];
            for (a, c) in cell.iter_mut().enumerate() {
                if pred[base + a] {
                    *c += &e.weight;
                }
            }
        }
        let mut total = W::zero();
        for q in 0..self.last_questions {
            let cell = &scores[q * self.last_answers..][..self.last_answers];
            if let Some(m) = cell.iter().max() {
                total += m;
            }
        }
        total
    }

    fn run(&self, space: u64) -> (BigUint, DeterministicStrategy) {
        const BLOCK: u64 = 1 << 12;
        let blocks = space.div_ceil(BLOCK);
        let (best, best_s) = (0..blocks)
            .into_par_iter()
            .map(|b| {
                let start = b * BLOCK;
                let end = (start + BLOCK).min(space);
                let mut digits = self.decode(start);
                let mut scores = vec![W::zero(); self.last_questions * self.last_answers];
                let mut best = (self.score(&digits, &mut scores), start);
                for s in start + 1..end {
                    self.increment(&mut digits);
                    let v = self.score(&digits, &mut scores);
                    if v > best.0 {
                        best = (v, s);
                    }
                }
                best
            })
            .reduce_with(|a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            })
            .expect("strategy space is non-empty");

        let digits = self.decode(best_s);
        let mut scores = vec![W::zero(); self.last_questions * self.last_answers];
        self.score(&digits, &mut scores);
        let k = self.game.k();
        let mut maps: Vec<Vec<usize>> = (0..k - 1)
            .map(|t| {
                let n = self.game.questions(t).len();
                digits[self.offsets[t]..self.offsets[t] + n].to_vec()
            })
            .collect();
        let response = (0..self.last_questions)
            .map(|q| {
                let cell = &scores[q * self.last_answers..][..self.last_answers];
                let mut arg = 0;
                for a in 1..cell.len() {
                    if cell[a] > cell[arg] {
                        arg = a;
                    }
                }
                arg
            })
            .collect();
        maps.push(response);
        (best.into(), DeterministicStrategy::from_maps_unchecked(maps))
    }
}
