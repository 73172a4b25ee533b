//! n-fold parallel repetition.
//!
//! Player `t` of `G^n` receives a tuple of `n` base questions, indexed in
//! mixed radix with coordinate 0 most significant. The same convention is
//! used for answers and for the tuple labels of the materialized game.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::game::{classical_value, Budget, ClassicalSolution, DeterministicStrategy, Game, Label, Shape};
use crate::scalar::Rational;

/// Default cap on `|X|^n · |A|^n` for materialization.
pub const MATERIALIZE_LIMIT: u64 = 10_000_000;

/// `G^n` with lazy accessors and an on-demand explicit form.
#[derive(Debug)]
pub struct RepeatedGame {
    base: Game,
    n: usize,
    questions: Vec<Shape>,
    answers: Vec<Shape>,
    materialized: OnceLock<Game>,
}

impl Clone for RepeatedGame {
    fn clone(&self) -> Self {
        let out = RepeatedGame {
            base: self.base.clone(),
            n: self.n,
            questions: self.questions.clone(),
            answers: self.answers.clone(),
            materialized: OnceLock::new(),
        };
        if let Some(g) = self.materialized.get() {
            let _ = out.materialized.set(g.clone());
        }
        out
    }
}

/// Builds the lazy n-fold repetition of `g`.
pub fn repeat_game(g: &Game, n: usize) -> Result<RepeatedGame> {
    if n == 0 {
        return Err(Error::InvalidCoordinates("repetition count must be at least 1".into()));
    }
    let per_player = |len: usize| Shape::new(vec![len; n]);
    let questions = (0..g.k())
        .map(|t| per_player(g.questions(t).len()))
        .collect::<Result<Vec<_>>>()?;
    let answers = (0..g.k())
        .map(|t| per_player(g.answers(t).len()))
        .collect::<Result<Vec<_>>>()?;
    Ok(RepeatedGame {
        base: g.clone(),
        n,
        questions,
        answers,
        materialized: OnceLock::new(),
    })
}

impl RepeatedGame {
    pub fn base(&self) -> &Game {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.base.k()
    }

    /// Number of repeated questions of player `t`, `|X^t|^n`.
    pub fn player_questions(&self, t: usize) -> usize {
        self.questions[t].size()
    }

    pub fn player_answers(&self, t: usize) -> usize {
        self.answers[t].size()
    }

    /// Player `t`'s repeated question index from per-coordinate base questions.
    pub fn question_index(&self, t: usize, coords: &[usize]) -> usize {
        self.questions[t].encode(coords)
    }

    pub fn question_coords(&self, t: usize, q: usize) -> Vec<usize> {
        self.questions[t].decode(q)
    }

    pub fn answer_index(&self, t: usize, coords: &[usize]) -> usize {
        self.answers[t].encode(coords)
    }

    pub fn answer_coords(&self, t: usize, a: usize) -> Vec<usize> {
        self.answers[t].decode(a)
    }

    /// Base answer of player `t` in coordinate `j` of a repeated answer.
    pub fn answer_at(&self, t: usize, a: usize, j: usize) -> usize {
        self.answers[t].digit(a, j)
    }

    /// `μ^{⊗n}` of per-coordinate joint question indices.
    pub fn mu(&self, coords: &[usize]) -> Rational {
        coords.iter().map(|&x| self.base.mu(x).clone()).product()
    }

    /// Whether every coordinate accepts, given per-coordinate joint indices.
    pub fn accepts(&self, questions: &[usize], answers: &[usize]) -> bool {
        questions
            .iter()
            .zip(answers)
            .all(|(&x, &a)| self.base.accepts(x, a))
    }

    /// `|X|^n · |A|^n` as an exact count.
    pub fn table_entries(&self) -> u128 {
        let q = self.base.question_shape().size() as u128;
        let a = self.base.answer_space() as u128;
        (q * a).checked_pow(self.n as u32).unwrap_or(u128::MAX)
    }

    /// Visits every tuple of support points `(x_1..x_n)` with its mass.
    pub fn for_each_support(&self, mut f: impl FnMut(&[usize], &Rational)) {
        let supp = self.base.support();
        if supp.is_empty() {
            return;
        }
        let mut idx = vec![0usize; self.n];
        let mut coords: Vec<usize> = vec![supp[0]; self.n];
        loop {
            let mass = self.mu(&coords);
            f(&coords, &mass);
            let mut pos = self.n;
            loop {
                if pos == 0 {
                    return;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < supp.len() {
                    coords[pos] = supp[idx[pos]];
                    break;
                }
                idx[pos] = 0;
                coords[pos] = supp[0];
            }
        }
    }

    /// Per-player repeated question indices for per-coordinate joint questions.
    pub fn player_questions_of(&self, coords: &[usize]) -> Vec<usize> {
        let qs = self.base.question_shape();
        (0..self.k())
            .map(|t| {
                let digits: Vec<usize> = coords.iter().map(|&x| qs.digit(x, t)).collect();
                self.question_index(t, &digits)
            })
            .collect()
    }

    /// Per-coordinate joint base answers for per-player repeated answers.
    pub fn coordinate_answers(&self, answers: &[usize]) -> Vec<usize> {
        let as_ = self.base.answer_shape();
        (0..self.n)
            .map(|j| {
                (0..self.k())
                    .map(|t| self.answer_at(t, answers[t], j) * as_.stride(t))
                    .sum()
            })
            .collect()
    }

    /// Explicit game over tuple alphabets, within the default limit.
    pub fn materialize(&self) -> Result<&Game> {
        self.materialize_with_limit(MATERIALIZE_LIMIT)
    }

    pub fn materialize_with_limit(&self, limit: u64) -> Result<&Game> {
        if let Some(g) = self.materialized.get() {
            return Ok(g);
        }
        let entries = self.table_entries();
        if entries > limit as u128 {
            return Err(Error::SizeLimit {
                what: "repeated game table",
                required: entries.to_string(),
                limit,
            });
        }
        let game = self.build()?;
        let _ = self.materialized.set(game);
        Ok(self.materialized.get().expect("just set"))
    }

    fn build(&self) -> Result<Game> {
        let k = self.k();
        let tuple_labels = |shape: &Shape, base: &[Label]| -> Vec<Label> {
            (0..shape.size())
                .map(|i| Label::Tuple(shape.decode(i).into_iter().map(|d| base[d].clone()).collect()))
                .collect()
        };
        let questions: Vec<Vec<Label>> = (0..k)
            .map(|t| tuple_labels(&self.questions[t], self.base.questions(t)))
            .collect();
        let answers: Vec<Vec<Label>> = (0..k)
            .map(|t| tuple_labels(&self.answers[t], self.base.answers(t)))
            .collect();
        let qshape = Shape::new(questions.iter().map(Vec::len).collect())?;
        let ashape = Shape::new(answers.iter().map(Vec::len).collect())?;

        let mut mu = vec![Rational::zero(); qshape.size()];
        self.for_each_support(|coords, mass| {
            mu[qshape.encode(&self.player_questions_of(coords))] = mass.clone();
        });

        let base_q = self.base.question_shape();
        let coord_answers: Vec<Vec<usize>> = (0..ashape.size())
            .map(|ai| self.coordinate_answers(&ashape.decode(ai)))
            .collect();
        let mut predicate = Vec::with_capacity(qshape.size() * ashape.size());
        for xi in 0..qshape.size() {
            let players = qshape.decode(xi);
            let coords: Vec<usize> = (0..self.n)
                .map(|j| {
                    (0..k)
                        .map(|t| self.questions[t].digit(players[t], j) * base_q.stride(t))
                        .sum()
                })
                .collect();
            for ca in &coord_answers {
                predicate.push(self.accepts(&coords, ca));
            }
        }
        Game::from_dense(questions, answers, mu, predicate)
    }
}

/// Exact classical value of `G^n`.
pub fn repeated_classical_value(g: &Game, n: usize, budget: Budget) -> Result<ClassicalSolution> {
    let rg = repeat_game(g, n)?;
    check_budget(&rg, budget)?;
    classical_value(rg.materialize()?, budget)
}

/// Rejects before materializing when the outer strategy space is over budget.
fn check_budget(rg: &RepeatedGame, budget: Budget) -> Result<()> {
    let k = rg.k();
    let mut log_space = 0f64;
    for t in 0..k - 1 {
        log_space += rg.player_questions(t) as f64 * (rg.player_answers(t) as f64).log2();
    }
    if log_space > 64.0 {
        let exact = (0..k - 1).fold(num_bigint::BigUint::one(), |acc, t| {
            acc * num_bigint::BigUint::from(rg.player_answers(t)).pow(rg.player_questions(t) as u32)
        });
        return Err(Error::BudgetExceeded {
            space: exact.to_string(),
            required: "more than 2^64".into(),
            budget: budget.evaluations,
        });
    }
    Ok(())
}

/// A set of coordinates `C ⊆ [n]`, 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WinEvent {
    coords: BTreeSet<usize>,
    n: usize,
}

impl WinEvent {
    pub fn new(coords: impl IntoIterator<Item = usize>, n: usize) -> Result<Self> {
        let coords: BTreeSet<usize> = coords.into_iter().collect();
        if let Some(&bad) = coords.iter().find(|&&c| c >= n) {
            return Err(Error::InvalidCoordinates(format!(
                "coordinate {} outside 1..={n}",
                bad + 1
            )));
        }
        Ok(WinEvent { coords, n })
    }

    /// Parses a 1-based comma-separated list such as `"2,3"`; empty means `C = ∅`.
    pub fn parse_one_based(list: &str, n: usize) -> Result<Self> {
        let mut coords = Vec::new();
        for part in list.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let c: usize = part
                .parse()
                .map_err(|_| Error::InvalidCoordinates(format!("not a coordinate: {part:?}")))?;
            if c == 0 || c > n {
                return Err(Error::InvalidCoordinates(format!("coordinate {c} outside 1..={n}")));
            }
            coords.push(c - 1);
        }
        Self::new(coords, n)
    }

    pub fn coords(&self) -> Vec<usize> {
        self.coords.iter().copied().collect()
    }

    /// Coordinates outside `C`, ascending.
    pub fn free(&self) -> Vec<usize> {
        (0..self.n).filter(|j| !self.coords.contains(j)).collect()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.coords.contains(&j)
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_subset(&self, other: &WinEvent) -> bool {
        self.coords.is_subset(&other.coords)
    }
}

/// `Pr[all coordinates in C accept]` under `μ^{⊗n}` for a strategy on `G^n`.
pub fn win_probability(rg: &RepeatedGame, s: &DeterministicStrategy, c: &WinEvent) -> Result<Rational> {
    check_repeated_strategy(rg, s)?;
    if c.n() != rg.n() {
        return Err(Error::InvalidCoordinates(format!(
            "event over {} coordinates for a {}-fold game",
            c.n(),
            rg.n()
        )));
    }
    let coords = c.coords();
    let mut total = Rational::zero();
    rg.for_each_support(|x, mass| {
        let pq = rg.player_questions_of(x);
        let answers: Vec<usize> = (0..rg.k()).map(|t| s.answer(t, pq[t])).collect();
        let ca = rg.coordinate_answers(&answers);
        if coords.iter().all(|&j| rg.base().accepts(x[j], ca[j])) {
            total += mass;
        }
    });
    Ok(total)
}

pub(crate) fn check_repeated_strategy(rg: &RepeatedGame, s: &DeterministicStrategy) -> Result<()> {
    if s.maps().len() != rg.k() {
        return Err(Error::InvalidStrategy(format!(
            "{} answer maps for a {}-player game",
            s.maps().len(),
            rg.k()
        )));
    }
    for t in 0..rg.k() {
        if s.maps()[t].len() != rg.player_questions(t)
            || s.maps()[t].iter().any(|&a| a >= rg.player_answers(t))
        {
            return Err(Error::InvalidStrategy(format!(
                "player {t}: strategy does not match the {}-fold repeated alphabets",
                rg.n()
            )));
        }
    }
    Ok(())
}

/// Plays `per_coordinate[j]` independently in every coordinate.
pub fn product_strategy(rg: &RepeatedGame, per_coordinate: &[DeterministicStrategy]) -> Result<DeterministicStrategy> {
    if per_coordinate.len() != rg.n() {
        return Err(Error::InvalidStrategy(format!(
            "{} coordinate strategies for n = {}",
            per_coordinate.len(),
            rg.n()
        )));
    }
    for s in per_coordinate {
        s.check(rg.base())?;
    }
    let maps = (0..rg.k())
        .map(|t| {
            (0..rg.player_questions(t))
                .map(|q| {
                    let qs = rg.question_coords(t, q);
                    let a: Vec<usize> = qs
                        .iter()
                        .enumerate()
                        .map(|(j, &x)| per_coordinate[j].answer(t, x))
                        .collect();
                    rg.answer_index(t, &a)
                })
                .collect()
        })
        .collect();
    Ok(DeterministicStrategy::from_maps_unchecked(maps))
}
