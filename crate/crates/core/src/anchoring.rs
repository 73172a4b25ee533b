//! The anchoring transform and the decay-bound reference curves.
//!
//! Anchoring gives every player an extra question `⊥`, drawn independently
//! with probability α, and accepts whenever any player receives it. The
//! classical value then satisfies `val(G⊥) = 1 − (1−α)^k (1 − val(G))`.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::game::{AnchorSets, Game, Label};
use crate::scalar::{format_rational, pow, Prob, Rational};

/// Label attached to every output of [`quantum_decay_reference`].
pub const QUANTUM_REFERENCE_LABEL: &str = "reference curve, unspecified constant";

/// Anchors `game` with rational probability `alpha ∈ (0, 1)`.
///
/// The result carries anchor sets `{⊥}` for every player.
pub fn anchor_transform(game: &Game, alpha: &Rational) -> Result<Game> {
    if !alpha.is_positive() || *alpha >= Rational::one() {
        return Err(Error::InvalidAlpha(format_rational(alpha)));
    }
    let k = game.k();
    for t in 0..k {
        if game.questions(t).iter().any(Label::mentions_anchor) {
            return Err(Error::ReservedLabel {
                label: Label::anchor().to_string(),
                player: t,
            });
        }
    }
    let questions: Vec<Vec<Label>> = (0..k)
        .map(|t| {
            let mut q = game.questions(t).to_vec();
            q.push(Label::anchor());
            q
        })
        .collect();
    let answers = game.answer_alphabets().to_vec();
    let old = game.question_shape();
    let new_shape = crate::game::Shape::new(questions.iter().map(Vec::len).collect())?;
    let keep = Rational::one() - alpha;

    let mut mu = vec![Rational::zero(); new_shape.size()];
    for &xi in game.support() {
        let x = old.decode(xi);
        for mask in 0u32..(1 << k) {
            let mut weight = game.mu(xi).clone();
            let mut y = x.clone();
            for (t, yt) in y.iter_mut().enumerate() {
                if mask & (1 << t) != 0 {
                    *yt = game.questions(t).len();
                    weight *= alpha;
                } else {
                    weight *= &keep;
                }
            }
            mu[new_shape.encode(&y)] += weight;
        }
    }

    let na = game.answer_space();
    let mut predicate = Vec::with_capacity(new_shape.size() * na);
    for yi in 0..new_shape.size() {
        let y = new_shape.decode(yi);
        let anchored = (0..k).any(|t| y[t] == game.questions(t).len());
        if anchored {
            predicate.extend(std::iter::repeat(true).take(na));
        } else {
            let xi = old.encode(&y);
            predicate.extend((0..na).map(|a| game.accepts(xi, a)));
        }
    }

    let out = Game::from_dense(questions, answers, mu, predicate)?;
    let anchors = AnchorSets::from_indices(
        &out,
        &(0..k)
            .map(|t| vec![game.questions(t).len()])
            .collect::<Vec<_>>(),
    )?;
    out.with_anchors(anchors)
}

/// `1 − (1−α)^k (1 − val)`, exact for rationals.
pub fn predicted_value<P: Prob>(val: &P, alpha: &P, k: usize) -> P {
    let keep = P::one() - alpha.clone();
    P::one() - pow(&keep, k) * (P::one() - val.clone())
}

/// Parameters of the decay-bound curves.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayBoundParams {
    pub k: usize,
    pub alpha: f64,
    /// `1 − val(G)` (or `1 − val*(G)` for the quantum curve).
    pub eps: f64,
    /// `log₂` of the answer-space size.
    pub s: f64,
    pub n: u64,
}

impl DecayBoundParams {
    pub fn new(k: usize, alpha: f64, eps: f64, s: f64, n: u64) -> Result<Self> {
        let ok = k >= 2
            && alpha > 0.0
            && alpha <= 1.0
            && (0.0..=1.0).contains(&eps)
            && s > 0.0
            && n >= 1;
        if ok {
            Ok(DecayBoundParams { k, alpha, eps, s, n })
        } else {
            Err(Error::Config(format!(
                "decay parameters out of range: k={k}, alpha={alpha}, eps={eps}, s={s}, n={n}"
            )))
        }
    }

    /// Parameters for an anchored game with value `val`, anchoring mass `alpha`
    /// and `answer_space` joint answers.
    pub fn for_game(k: usize, alpha: f64, val: f64, answer_space: usize, n: u64) -> Result<Self> {
        Self::new(k, alpha, (1.0 - val).clamp(0.0, 1.0), (answer_space as f64).log2(), n)
    }
}

/// `exp(−α^{2k} ε³ n / (384 s k²))`.
pub fn classical_decay_bound(p: &DecayBoundParams) -> f64 {
    if p.eps == 0.0 {
        return 1.0;
    }
    let k = p.k as f64;
    let exponent = p.alpha.powi(2 * p.k as i32) * p.eps.powi(3) * p.n as f64 / (384.0 * p.s * k * k);
    (-exponent).exp().min(1.0)
}

/// `exp(−c α^16 ε^8 n / s)`, with the constant `c` supplied by the caller.
pub fn quantum_decay_reference(p: &DecayBoundParams, c: f64) -> Result<f64> {
    if c <= 0.0 || !c.is_finite() {
        return Err(Error::Config(format!("reference constant must be positive, got {c}")));
    }
    if p.eps == 0.0 {
        return Ok(1.0);
    }
    let exponent = c * p.alpha.powi(16) * p.eps.powi(8) * p.n as f64 / p.s;
    Ok((-exponent).exp().min(1.0))
}
