use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{Game, Label};
use crate::error::{Error, Result};
use crate::scalar::Rational;

/// One answer index per question index, for every player.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy {
    maps: Vec<Vec<usize>>,
}

impl DeterministicStrategy {
    pub fn new(game: &Game, maps: Vec<Vec<usize>>) -> Result<Self> {
        let s = DeterministicStrategy { maps };
        s.check(game)?;
        Ok(s)
    }

    /// Every player answers with answer index 0.
    pub fn constant(game: &Game) -> Self {
        DeterministicStrategy {
            maps: (0..game.k())
                .map(|t| vec![0; game.questions(t).len()])
                .collect(),
        }
    }

    pub fn check(&self, game: &Game) -> Result<()> {
        if self.maps.len() != game.k() {
            return Err(Error::InvalidStrategy(format!(
                "{} answer maps for a {}-player game",
                self.maps.len(),
                game.k()
            )));
        }
        for (t, map) in self.maps.iter().enumerate() {
            if map.len() != game.questions(t).len() {
                return Err(Error::InvalidStrategy(format!(
                    "player {t}: {} answers for {} questions",
                    map.len(),
                    game.questions(t).len()
                )));
            }
            if let Some(&a) = map.iter().find(|&&a| a >= game.answers(t).len()) {
                return Err(Error::InvalidStrategy(format!(
                    "player {t}: answer index {a} out of range"
                )));
            }
        }
        Ok(())
    }

    pub fn answer(&self, player: usize, question: usize) -> usize {
        self.maps[player][question]
    }

    pub fn maps(&self) -> &[Vec<usize>] {
        &self.maps
    }

    pub(crate) fn from_maps_unchecked(maps: Vec<Vec<usize>>) -> Self {
        DeterministicStrategy { maps }
    }

    /// Joint answer index for a joint question index.
    pub fn joint_answer(&self, game: &Game, x: usize) -> usize {
        let qs = game.question_shape();
        let as_ = game.answer_shape();
        (0..game.k())
            .map(|t| self.maps[t][qs.digit(x, t)] * as_.stride(t))
            .sum()
    }

    pub fn to_file(&self, game: &Game) -> StrategyMaps {
        StrategyMaps {
            maps: self
                .maps
                .iter()
                .enumerate()
                .map(|(t, m)| {
                    m.iter()
                        .enumerate()
                        .map(|(q, &a)| (game.questions(t)[q].clone(), game.answers(t)[a].clone()))
                        .collect()
                })
                .collect(),
        }
    }
}

/// Serialized deterministic strategy: per player, `[question, answer]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyMaps {
    pub maps: Vec<Vec<(Label, Label)>>,
}

impl StrategyMaps {
    pub fn to_strategy(&self, game: &Game) -> Result<DeterministicStrategy> {
        if self.maps.len() != game.k() {
            return Err(Error::InvalidStrategy(format!(
                "{} players in strategy file, game has {}",
                self.maps.len(),
                game.k()
            )));
        }
        let mut maps = Vec::with_capacity(game.k());
        for (t, pairs) in self.maps.iter().enumerate() {
            let mut map = vec![None; game.questions(t).len()];
            for (q, a) in pairs {
                let qi = game.question_index(t, q).ok_or_else(|| {
                    Error::InvalidStrategy(format!("player {t}: unknown question {q}"))
                })?;
                let ai = game.answer_index(t, a).ok_or_else(|| {
                    Error::InvalidStrategy(format!("player {t}: unknown answer {a}"))
                })?;
                map[qi] = Some(ai);
            }
            let map = map
                .into_iter()
                .enumerate()
                .map(|(q, a)| {
                    a.ok_or_else(|| {
                        Error::InvalidStrategy(format!(
                            "player {t}: no answer for question {}",
                            game.questions(t)[q]
                        ))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            maps.push(map);
        }
        DeterministicStrategy::new(game, maps)
    }
}

/// Exact winning probability `Σ_x μ(x)·V(x, f(x))`.
pub fn eval_deterministic(game: &Game, strategy: &DeterministicStrategy) -> Result<Rational> {
    strategy.check(game)?;
    let mut total = Rational::zero();
    for &x in game.support() {
        if game.accepts(x, strategy.joint_answer(game, x)) {
            total += game.mu(x);
        }
    }
    Ok(total)
}
