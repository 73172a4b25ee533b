use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use super::{Game, Label};
use crate::error::{Error, Result};
use crate::scalar::Rational;

/// Per-player anchor subsets of the question alphabets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnchorSets {
    member: Vec<Vec<bool>>,
}

impl AnchorSets {
    /// Membership masks, one per player, each as long as that player's alphabet.
    pub fn from_masks(member: Vec<Vec<bool>>) -> Self {
        AnchorSets { member }
    }

    pub fn from_indices(game: &Game, sets: &[Vec<usize>]) -> Result<Self> {
        if sets.len() != game.k() {
            return Err(Error::InvalidDistribution(format!(
                "anchor sets for {} players, game has {}",
                sets.len(),
                game.k()
            )));
        }
        let mut member: Vec<Vec<bool>> = (0..game.k())
            .map(|t| vec![false; game.questions(t).len()])
            .collect();
        for (t, set) in sets.iter().enumerate() {
            for &q in set {
                *member[t].get_mut(q).ok_or_else(|| {
                    Error::InvalidDistribution(format!("anchor index {q} out of range for player {t}"))
                })? = true;
            }
        }
        Ok(AnchorSets { member })
    }

    pub fn from_labels(game: &Game, sets: &[Vec<Label>]) -> Result<Self> {
        let indices = sets
            .iter()
            .enumerate()
            .map(|(t, set)| {
                set.iter()
                    .map(|l| {
                        game.question_index(t, l).ok_or_else(|| {
                            Error::InvalidDistribution(format!(
                                "anchor label {l} not in player {t}'s alphabet"
                            ))
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_indices(game, &indices)
    }

    /// Every question is an anchor.
    pub fn full(game: &Game) -> Self {
        AnchorSets {
            member: (0..game.k())
                .map(|t| vec![true; game.questions(t).len()])
                .collect(),
        }
    }

    pub fn k(&self) -> usize {
        self.member.len()
    }

    pub fn contains(&self, player: usize, question: usize) -> bool {
        self.member[player][question]
    }

    pub fn members(&self, player: usize) -> Vec<usize> {
        (0..self.member[player].len())
            .filter(|&q| self.member[player][q])
            .collect()
    }

    pub fn labels(&self, game: &Game) -> Vec<Vec<Label>> {
        (0..self.k())
            .map(|t| {
                self.members(t)
                    .into_iter()
                    .map(|q| game.questions(t)[q].clone())
                    .collect()
            })
            .collect()
    }

    pub(crate) fn check_against(&self, game: &Game) -> Result<()> {
        let ok = self.member.len() == game.k()
            && (0..game.k()).all(|t| self.member[t].len() == game.questions(t).len());
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidDistribution(
                "anchor sets do not match the question alphabets".into(),
            ))
        }
    }

    /// Total μ-mass of player `t`'s anchor set.
    pub fn anchor_mass(&self, game: &Game, player: usize) -> Rational {
        game.marginal(player)
            .into_iter()
            .enumerate()
            .filter(|(q, _)| self.member[player][*q])
            .map(|(_, p)| p)
            .sum()
    }
}

/// Checks the anchoring factorization on μ's support.
///
/// For each supported `x` with anchored coordinates `F_x`, requires
/// `μ(x) = μ(x restricted to the complement of F_x) · Π_{t∈F_x} μ(x^t)`.
/// Returns whether it holds everywhere with a positive minimum anchor mass,
/// together with that minimum.
pub fn is_anchored(game: &Game, anchors: &AnchorSets) -> (bool, Rational) {
    if anchors.check_against(game).is_err() {
        return (false, Rational::zero());
    }
    let k = game.k();
    let shape = game.question_shape();
    let singles: Vec<Vec<Rational>> = (0..k).map(|t| game.marginal(t)).collect();
    let alpha_max = (0..k)
        .map(|t| anchors.anchor_mass(game, t))
        .min()
        .unwrap_or_else(Rational::zero);

    let mut subset_marginals: HashMap<u32, BTreeMap<Vec<usize>, Rational>> = HashMap::new();
    let mut factorizes = true;
    for &xi in game.support() {
        let x = shape.decode(xi);
        let free_mask: u32 = (0..k)
            .filter(|&t| !anchors.contains(t, x[t]))
            .fold(0, |m, t| m | (1 << t));
        let marg = subset_marginals
            .entry(free_mask)
            .or_insert_with(|| marginal_on(game, free_mask));
        let restricted: Vec<usize> = (0..k)
            .filter(|t| free_mask & (1 << t) != 0)
            .map(|t| x[t])
            .collect();
        let mut rhs = if free_mask == 0 {
            Rational::one()
        } else {
            marg.get(&restricted).cloned().unwrap_or_else(Rational::zero)
        };
        for t in (0..k).filter(|t| free_mask & (1 << t) == 0) {
            rhs *= &singles[t][x[t]];
        }
        if *game.mu(xi) != rhs {
            factorizes = false;
            break;
        }
    }
    (factorizes && alpha_max > Rational::zero(), alpha_max)
}

fn marginal_on(game: &Game, mask: u32) -> BTreeMap<Vec<usize>, Rational> {
    let shape = game.question_shape();
    let mut out: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
    for &xi in game.support() {
        let key: Vec<usize> = (0..game.k())
            .filter(|t| mask & (1 << t) != 0)
            .map(|t| shape.digit(xi, t))
            .collect();
        *out.entry(key).or_insert_with(Rational::zero) += game.mu(xi);
    }
    out
}
