//! k-player one-round games with exact rational question distributions.
//!
//! Question and answer tuples are addressed by mixed-radix indices (player 0
//! most significant). The predicate is stored densely, so every
//! (question tuple, answer tuple) pair has a defined verdict.

mod anchors;
mod distribution;
mod file;
pub mod library;
mod nonsignaling;
mod strategy;
mod value;

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{format_rational, Rational};

pub use anchors::{is_anchored, AnchorSets};
pub use distribution::{tv_distance, Distribution};
pub use file::{validate_game, GameFile, MuEntry, PredicateEntry, ValidationReport, Violation};
pub use nonsignaling::{nonsignaling_value, nonsignaling_value_with_limit, NS_VARIABLE_LIMIT};
pub use strategy::{eval_deterministic, DeterministicStrategy, StrategyMaps};
pub use value::{classical_value, Budget, ClassicalSolution, DEFAULT_BUDGET};

/// Reserved anchor label added by the anchoring transform.
pub const ANCHOR_LABEL: &str = "⊥";

/// Upper bound on dense predicate entries for any constructed game.
pub const MAX_TABLE_ENTRIES: u64 = 100_000_000;

/// A question or answer label. Repeated games use tuples of base labels.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Atom(String),
    Tuple(Vec<Label>),
}

impl Label {
    pub fn anchor() -> Self {
        Label::Atom(ANCHOR_LABEL.to_string())
    }

    /// Whether the reserved anchor token occurs anywhere inside the label.
    pub fn mentions_anchor(&self) -> bool {
        match self {
            Label::Atom(s) => s == ANCHOR_LABEL,
            Label::Tuple(parts) => parts.iter().any(Label::mentions_anchor),
        }
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label::Atom(s.to_string())
    }
}

impl From<String> for Label {
    fn from(s: String) -> Self {
        Label::Atom(s)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Atom(s) => f.write_str(s),
            Label::Tuple(parts) => {
                f.write_str("(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Mixed-radix index space; position 0 is the most significant digit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shape {
    radices: Vec<usize>,
    strides: Vec<usize>,
    size: usize,
}

impl Shape {
    pub fn new(radices: Vec<usize>) -> Result<Self> {
        let mut strides = vec![0; radices.len()];
        let mut size: usize = 1;
        for (pos, &r) in radices.iter().enumerate().rev() {
            strides[pos] = size;
            size = size.checked_mul(r).ok_or_else(|| Error::SizeLimit {
                what: "index space",
                required: format!("product of {radices:?}"),
                limit: usize::MAX as u64,
            })?;
        }
        Ok(Shape {
            radices,
            strides,
            size,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn len(&self) -> usize {
        self.radices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radices.is_empty()
    }

    pub fn radices(&self) -> &[usize] {
        &self.radices
    }

    pub fn stride(&self, pos: usize) -> usize {
        self.strides[pos]
    }

    pub fn encode(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.radices.len());
        digits.iter().zip(&self.strides).map(|(d, s)| d * s).sum()
    }

    pub fn decode(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.radices.len()];
        for (pos, &s) in self.strides.iter().enumerate() {
            out[pos] = index / s;
            index %= s;
        }
        out
    }

    pub fn digit(&self, index: usize, pos: usize) -> usize {
        (index / self.strides[pos]) % self.radices[pos]
    }
}

/// A k-player one-round game `(X, A, μ, V)`.
#[derive(Clone, Debug)]
pub struct Game {
    questions: Vec<Vec<Label>>,
    answers: Vec<Vec<Label>>,
    qshape: Shape,
    ashape: Shape,
    mu: Vec<Rational>,
    support: Vec<usize>,
    predicate: Vec<bool>,
    anchors: Option<AnchorSets>,
}

impl PartialEq for Game {
    fn eq(&self, other: &Self) -> bool {
        self.questions == other.questions
            && self.answers == other.answers
            && self.mu == other.mu
            && self.predicate == other.predicate
            && self.anchors == other.anchors
    }
}

impl Game {
    /// Builds a game from sparse μ entries (question digits, mass) and a predicate closure.
    pub fn new<F>(
        questions: Vec<Vec<Label>>,
        answers: Vec<Vec<Label>>,
        mu: Vec<(Vec<usize>, Rational)>,
        mut predicate: F,
    ) -> Result<Self>
    where
        F: FnMut(&[usize], &[usize]) -> bool,
    {
        let qshape = Shape::new(questions.iter().map(Vec::len).collect())?;
        let ashape = Shape::new(answers.iter().map(Vec::len).collect())?;
        check_table_size(&qshape, &ashape)?;
        let mut dense = vec![Rational::zero(); qshape.size()];
        for (x, p) in mu {
            if x.len() != questions.len() || x.iter().zip(qshape.radices()).any(|(d, r)| d >= r) {
                return Err(Error::InvalidDistribution(format!(
                    "question tuple {x:?} outside the alphabets"
                )));
            }
            let idx = qshape.encode(&x);
            if !dense[idx].is_zero() {
                return Err(Error::InvalidDistribution(format!(
                    "question tuple {x:?} listed twice"
                )));
            }
            dense[idx] = p;
        }
        let mut table = Vec::with_capacity(qshape.size() * ashape.size());
        for xi in 0..qshape.size() {
            let x = qshape.decode(xi);
            for ai in 0..ashape.size() {
                table.push(predicate(&x, &ashape.decode(ai)));
            }
        }
        Self::from_dense(questions, answers, dense, table)
    }

    /// Builds a game from a dense μ vector and a dense predicate table.
    pub fn from_dense(
        questions: Vec<Vec<Label>>,
        answers: Vec<Vec<Label>>,
        mu: Vec<Rational>,
        predicate: Vec<bool>,
    ) -> Result<Self> {
        let k = questions.len();
        if k < 2 || answers.len() != k {
            return Err(Error::InvalidDistribution(format!(
                "need k >= 2 players with matching alphabets, got {k} question and {} answer alphabets",
                answers.len()
            )));
        }
        if questions.iter().chain(&answers).any(Vec::is_empty) {
            return Err(Error::InvalidDistribution("empty alphabet".into()));
        }
        for alphabet in questions.iter().chain(&answers) {
            let mut sorted: Vec<_> = alphabet.iter().collect();
            sorted.sort();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidDistribution(format!(
                    "duplicate label in alphabet {alphabet:?}"
                )));
            }
        }
        let qshape = Shape::new(questions.iter().map(Vec::len).collect())?;
        let ashape = Shape::new(answers.iter().map(Vec::len).collect())?;
        check_table_size(&qshape, &ashape)?;
        if mu.len() != qshape.size() || predicate.len() != qshape.size() * ashape.size() {
            return Err(Error::InvalidDistribution("dense table size mismatch".into()));
        }
        if let Some(bad) = mu.iter().find(|p| p.is_negative()) {
            return Err(Error::InvalidDistribution(format!(
                "negative mass {}",
                format_rational(bad)
            )));
        }
        let total: Rational = mu.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "mass sum ≠ 1 (got {})",
                format_rational(&total)
            )));
        }
        let support = (0..mu.len()).filter(|&i| !mu[i].is_zero()).collect();
        Ok(Game {
            questions,
            answers,
            qshape,
            ashape,
            mu,
            support,
            predicate,
            anchors: None,
        })
    }

    /// Attaches anchor sets after checking they are subsets of the alphabets.
    pub fn with_anchors(mut self, anchors: AnchorSets) -> Result<Self> {
        anchors.check_against(&self)?;
        self.anchors = Some(anchors);
        Ok(self)
    }

    pub fn without_anchors(mut self) -> Self {
        self.anchors = None;
        self
    }

    pub fn k(&self) -> usize {
        self.questions.len()
    }

    pub fn questions(&self, player: usize) -> &[Label] {
        &self.questions[player]
    }

    pub fn answers(&self, player: usize) -> &[Label] {
        &self.answers[player]
    }

    pub fn question_alphabets(&self) -> &[Vec<Label>] {
        &self.questions
    }

    pub fn answer_alphabets(&self) -> &[Vec<Label>] {
        &self.answers
    }

    pub fn question_shape(&self) -> &Shape {
        &self.qshape
    }

    pub fn answer_shape(&self) -> &Shape {
        &self.ashape
    }

    pub fn anchors(&self) -> Option<&AnchorSets> {
        self.anchors.as_ref()
    }

    /// μ of a question tuple given by its joint index.
    pub fn mu(&self, x: usize) -> &Rational {
        &self.mu[x]
    }

    pub fn mu_dense(&self) -> &[Rational] {
        &self.mu
    }

    /// Joint indices of question tuples with positive mass, ascending.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn accepts(&self, x: usize, a: usize) -> bool {
        self.predicate[x * self.ashape.size() + a]
    }

    pub fn predicate_dense(&self) -> &[bool] {
        &self.predicate
    }

    /// μ as a [`Distribution`] over question digit tuples.
    pub fn mu_distribution(&self) -> Distribution<Vec<usize>> {
        Distribution::from_parts_unchecked(
            self.support
                .iter()
                .map(|&x| (self.qshape.decode(x), self.mu[x].clone()))
                .collect(),
        )
    }

    /// Marginal of μ on one player's questions.
    pub fn marginal(&self, player: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.questions[player].len()];
        for &x in &self.support {
            out[self.qshape.digit(x, player)] += &self.mu[x];
        }
        out
    }

    pub fn question_index(&self, player: usize, label: &Label) -> Option<usize> {
        self.questions[player].iter().position(|l| l == label)
    }

    pub fn answer_index(&self, player: usize, label: &Label) -> Option<usize> {
        self.answers[player].iter().position(|l| l == label)
    }

    /// Product of the answer alphabet sizes, `|A|`.
    pub fn answer_space(&self) -> usize {
        self.ashape.size()
    }
}

fn check_table_size(q: &Shape, a: &Shape) -> Result<()> {
    let entries = (q.size() as u128) * (a.size() as u128);
    if entries > MAX_TABLE_ENTRIES as u128 {
        return Err(Error::SizeLimit {
            what: "predicate table",
            required: entries.to_string(),
            limit: MAX_TABLE_ENTRIES,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn shape_round_trips() {
        let s = Shape::new(vec![2, 3, 4]).unwrap();
        assert_eq!(s.size(), 24);
        for i in 0..24 {
            assert_eq!(s.encode(&s.decode(i)), i);
        }
        assert_eq!(s.decode(23), vec![1, 2, 3]);
        assert_eq!(s.digit(23, 1), 2);
    }

    #[test]
    fn labels_serialize_as_strings_or_arrays() {
        let l = Label::Tuple(vec!["0".into(), Label::anchor()]);
        let json = serde_json::to_string(&l).unwrap();
        assert_eq!(json, r#"["0","⊥"]"#);
        assert_eq!(serde_json::from_str::<Label>(&json).unwrap(), l);
        assert!(l.mentions_anchor());
        assert_eq!(l.to_string(), "(0,⊥)");
    }

    #[test]
    fn rejects_mass_not_summing_to_one() {
        let bits: Vec<Label> = vec!["0".into(), "1".into()];
        let err = Game::new(
            vec![bits.clone(), bits.clone()],
            vec![bits.clone(), bits],
            vec![(vec![0, 0], rat(1, 2))],
            |_, _| true,
        )
        .unwrap_err();
        assert!(err.to_string().contains("mass sum ≠ 1"));
    }

    #[test]
    fn marginals_of_chsh_are_uniform() {
        let g = library::chsh();
        assert_eq!(g.marginal(0), vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(g.support().len(), 4);
        assert_eq!(g.answer_space(), 4);
    }
}
