//! Two-player entangled strategies in symmetric Schmidt form.

use std::collections::BTreeMap;

use nalgebra::{Complex, DVector};
use serde::{Deserialize, Serialize};

use super::linalg::{c, is_psd, kron, svd, C64, CMat, CVec};
use crate::error::{Error, Result};
use crate::game::{eval_deterministic, DeterministicStrategy, Game, Label};
use crate::scalar::rational_to_f64;

/// Tolerance on POVM and state validity.
pub const VALIDITY_TOL: f64 = 1e-10;

/// POVM elements indexed `[question][outcome]`.
pub type Povms = Vec<Vec<CMat>>;

/// Shared state `Σ_j √λ_j |j⟩|j⟩` and per-player POVMs in the Schmidt basis.
#[derive(Clone, Debug)]
pub struct EntangledStrategy {
    d: usize,
    weights: Vec<f64>,
    povms: [Povms; 2],
}

impl EntangledStrategy {
    pub fn new(weights: Vec<f64>, alice: Povms, bob: Povms) -> Result<Self> {
        let d = weights.len();
        if d == 0 {
            return Err(Error::InvalidStrategy("empty Schmidt spectrum".into()));
        }
        if weights.iter().any(|&w| w < -VALIDITY_TOL) {
            return Err(Error::InvalidStrategy("negative Schmidt weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > VALIDITY_TOL {
            return Err(Error::InvalidStrategy(format!("Schmidt weights sum to {total}")));
        }
        for (t, family) in [&alice, &bob].into_iter().enumerate() {
            for (q, povm) in family.iter().enumerate() {
                check_povm(povm, d).map_err(|e| Error::InvalidStrategy(format!("player {}, question {q}: {e}", t + 1)))?;
            }
        }
        Ok(EntangledStrategy {
            d,
            weights: weights.into_iter().map(|w| w.max(0.0)).collect(),
            povms: [alice, bob],
        })
    }

    /// Canonical form of an arbitrary pure state `Σ Ψ[a,b] |a⟩|b⟩` with POVMs
    /// on each player's original space.
    pub fn from_pure_state(coeffs: &CMat, alice: &Povms, bob: &Povms) -> Result<Self> {
        let (da, db) = coeffs.shape();
        let norm = coeffs.norm();
        if (norm - 1.0).abs() > VALIDITY_TOL {
            return Err(Error::InvalidStrategy(format!("state norm {norm}")));
        }
        let dec = svd(coeffs);
        let r = da.min(db);
        // Ψ = U S V†, so Bob's basis vectors are the columns of conj(V).
        let wb = dec.v.conjugate();
        let ua = dec.u;
        let weights: Vec<f64> = dec.s.iter().map(|s| s * s).collect();
        let total: f64 = weights.iter().sum();
        let weights: Vec<f64> = weights.iter().map(|w| w / total).collect();
        debug_assert_eq!(weights.len(), r);
        let map = |family: &Povms, basis: &CMat| -> Povms {
            family
                .iter()
                .map(|povm| povm.iter().map(|m| basis.adjoint() * m * basis).collect())
                .collect()
        };
        let s = EntangledStrategy::new(weights, map(alice, &ua), map(bob, &wb))?;
        Ok(s)
    }

    /// Deterministic strategy as diagonal projectors on a `d`-dimensional
    /// maximally entangled state.
    pub fn from_deterministic(game: &Game, s: &DeterministicStrategy, d: usize) -> Result<Self> {
        check_two_player(game)?;
        s.check(game)?;
        let d = d.max(1);
        let fam = |t: usize| -> Povms {
            (0..game.questions(t).len())
                .map(|q| {
                    (0..game.answers(t).len())
                        .map(|a| {
                            if s.answer(t, q) == a {
                                CMat::identity(d, d)
                            } else {
                                CMat::zeros(d, d)
                            }
                        })
                        .collect()
                })
                .collect()
        };
        EntangledStrategy::new(vec![1.0 / d as f64; d], fam(0), fam(1))
    }

    /// Optimal qubit strategy for CHSH in its question and answer order.
    pub fn chsh_optimal() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = pauli(&[1.0, 0.0, 0.0, -1.0]);
        let x = pauli(&[0.0, 1.0, 1.0, 0.0]);
        let proj = |o: &CMat| -> Vec<CMat> {
            let i = CMat::identity(2, 2);
            vec![(&i + o).scale(0.5), (&i - o).scale(0.5)]
        };
        let alice = vec![proj(&z), proj(&x)];
        let bob = vec![proj(&(&z + &x).scale(h)), proj(&(&z - &x).scale(h))];
        EntangledStrategy::new(vec![0.5, 0.5], alice, bob).expect("valid by construction")
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn povms(&self, player: usize) -> &Povms {
        &self.povms[player]
    }

    pub fn povm(&self, player: usize, question: usize) -> &[CMat] {
        &self.povms[player][question]
    }

    /// `√ρ` of either reduced state, diagonal in the Schmidt basis.
    pub fn sqrt_reduced(&self) -> CMat {
        CMat::from_diagonal(&DVector::from_iterator(self.d, self.weights.iter().map(|&w| c(w.sqrt()))))
    }

    /// The shared state as a vector with index `j·d + k`.
    pub fn state(&self) -> CVec {
        let mut v = CVec::zeros(self.d * self.d);
        for (j, &w) in self.weights.iter().enumerate() {
            v[j * self.d + j] = c(w.sqrt());
        }
        v
    }

    /// `⟨ψ| X ⊗ Y |ψ⟩` by Ando's identity `Tr(X √ρ Yᵀ √ρ)`.
    pub fn correlator(&self, x: &CMat, y: &CMat) -> f64 {
        let mut s = C64::new(0.0, 0.0);
        for j in 0..self.d {
            for k in 0..self.d {
                s += x[(j, k)] * y[(j, k)] * (self.weights[j] * self.weights[k]).sqrt();
            }
        }
        s.re
    }

    /// `⟨ψ| X ⊗ Y |ψ⟩` through the explicit tensor product.
    pub fn correlator_direct(&self, x: &CMat, y: &CMat) -> f64 {
        let psi = self.state();
        (psi.adjoint() * kron(x, y) * &psi)[(0, 0)].re
    }

    fn check_game(&self, game: &Game) -> Result<()> {
        check_two_player(game)?;
        for t in 0..2 {
            let family = &self.povms[t];
            if family.len() != game.questions(t).len() {
                return Err(Error::Dimension(format!(
                    "player {}: {} POVMs for {} questions",
                    t + 1,
                    family.len(),
                    game.questions(t).len()
                )));
            }
            if let Some(bad) = family.iter().position(|p| p.len() != game.answers(t).len()) {
                return Err(Error::Dimension(format!(
                    "player {}, question {bad}: {} outcomes for {} answers",
                    t + 1,
                    family[bad].len(),
                    game.answers(t).len()
                )));
            }
        }
        Ok(())
    }

    /// Winning probability on `game`.
    pub fn value(&self, game: &Game) -> Result<f64> {
        self.value_with(game, |x, y| self.correlator(x, y))
    }

    /// Winning probability through explicit tensor products.
    pub fn value_direct(&self, game: &Game) -> Result<f64> {
        self.value_with(game, |x, y| self.correlator_direct(x, y))
    }

    fn value_with(&self, game: &Game, corr: impl Fn(&CMat, &CMat) -> f64) -> Result<f64> {
        self.check_game(game)?;
        let qs = game.question_shape();
        let as_ = game.answer_shape();
        let mut total = 0.0;
        for &q in game.support() {
            let w = rational_to_f64(game.mu(q));
            let (x, y) = (qs.digit(q, 0), qs.digit(q, 1));
            for (a, m) in self.povms[0][x].iter().enumerate() {
                for (b, n) in self.povms[1][y].iter().enumerate() {
                    if game.accepts(q, as_.encode(&[a, b])) {
                        total += w * corr(m, n);
                    }
                }
            }
        }
        Ok(total)
    }

    /// Extends to the anchored game by answering the appended anchor question
    /// with the first answer.
    pub fn extend_to_anchored(&self, anchored: &Game) -> Result<Self> {
        check_two_player(anchored)?;
        let mut povms = self.povms.clone();
        for (t, family) in povms.iter_mut().enumerate() {
            if anchored.questions(t).len() != family.len() + 1 || anchored.questions(t).last() != Some(&Label::anchor()) {
                return Err(Error::Dimension(format!(
                    "player {}: anchored game must append one anchor question",
                    t + 1
                )));
            }
            let outcomes = anchored.answers(t).len();
            let mut trivial = vec![CMat::zeros(self.d, self.d); outcomes];
            trivial[0] = CMat::identity(self.d, self.d);
            family.push(trivial);
        }
        let s = EntangledStrategy {
            d: self.d,
            weights: self.weights.clone(),
            povms,
        };
        s.check_game(anchored)?;
        Ok(s)
    }

    /// Tensor product strategy on the `n`-fold repetition, with question and
    /// answer tuples in mixed radix (coordinate 0 most significant).
    pub fn product(parts: &[EntangledStrategy]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidStrategy("product of no strategies".into()))?;
        let mut acc = first.clone();
        for p in &parts[1..] {
            acc = acc.tensor(p);
        }
        Ok(acc)
    }

    fn tensor(&self, other: &EntangledStrategy) -> Self {
        let weights = self
            .weights
            .iter()
            .flat_map(|&a| other.weights.iter().map(move |&b| a * b))
            .collect();
        let fam = |t: usize| -> Povms {
            let mine = &self.povms[t];
            let theirs = &other.povms[t];
            let mut out = Vec::with_capacity(mine.len() * theirs.len());
            for p in mine {
                for q in theirs {
                    let mut row = Vec::with_capacity(p.len() * q.len());
                    for m in p {
                        for n in q {
                            row.push(kron(m, n));
                        }
                    }
                    out.push(row);
                }
            }
            out
        };
        EntangledStrategy {
            d: self.d * other.d,
            weights,
            povms: [fam(0), fam(1)],
        }
    }

    /// The shared state as a coefficient matrix.
    pub fn coefficients(&self) -> CMat {
        CMat::from_diagonal(&DVector::from_iterator(self.d, self.weights.iter().map(|&w| c(w.sqrt()))))
    }

    pub fn to_file(&self, game: &Game) -> Result<StrategyFile> {
        self.check_game(game)?;
        let povms = (0..2)
            .map(|t| {
                game.questions(t)
                    .iter()
                    .zip(&self.povms[t])
                    .map(|(label, povm)| (label.to_string(), povm.iter().map(matrix_to_rows).collect()))
                    .collect()
            })
            .collect();
        Ok(StrategyFile {
            d: self.d,
            schmidt_weights: self.weights.clone(),
            povms,
        })
    }

    pub fn from_file(file: &StrategyFile, game: &Game) -> Result<Self> {
        check_two_player(game)?;
        if file.povms.len() != 2 {
            return Err(Error::InvalidStrategy(format!("{} players in strategy file", file.povms.len())));
        }
        if file.schmidt_weights.len() != file.d {
            return Err(Error::InvalidStrategy(format!(
                "{} Schmidt weights for d = {}",
                file.schmidt_weights.len(),
                file.d
            )));
        }
        let mut fams = Vec::with_capacity(2);
        for t in 0..2 {
            let mut family = Vec::with_capacity(game.questions(t).len());
            for label in game.questions(t) {
                let key = label.to_string();
                let outcomes = file.povms[t].get(&key).ok_or_else(|| {
                    Error::InvalidStrategy(format!("player {}: no POVM for question {key}", t + 1))
                })?;
                let povm = outcomes
                    .iter()
                    .map(|rows| rows_to_matrix(rows, file.d))
                    .collect::<Result<Vec<_>>>()?;
                family.push(povm);
            }
            fams.push(family);
        }
        let bob = fams.pop().expect("two players");
        let alice = fams.pop().expect("two players");
        let s = EntangledStrategy::new(file.schmidt_weights.clone(), alice, bob)?;
        s.check_game(game)?;
        Ok(s)
    }

    pub fn from_json(text: &str, game: &Game) -> Result<Self> {
        let file: StrategyFile = serde_json::from_str(text)?;
        Self::from_file(&file, game)
    }

    pub fn to_json(&self, game: &Game) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file(game)?)?)
    }
}

/// A row-major matrix of `[re, im]` pairs.
pub type MatrixRows = Vec<Vec<[f64; 2]>>;

/// Serialized entangled strategy; POVMs keyed by question label per player.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyFile {
    pub d: usize,
    pub schmidt_weights: Vec<f64>,
    pub povms: Vec<BTreeMap<String, Vec<MatrixRows>>>,
}

fn matrix_to_rows(m: &CMat) -> MatrixRows {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn rows_to_matrix(rows: &MatrixRows, d: usize) -> Result<CMat> {
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(Error::Dimension(format!("POVM element is not {d}x{d}")));
    }
    Ok(CMat::from_fn(d, d, |i, j| Complex::new(rows[i][j][0], rows[i][j][1])))
}

fn pauli(entries: &[f64; 4]) -> CMat {
    CMat::from_row_slice(2, 2, &entries.map(c))
}

fn check_two_player(game: &Game) -> Result<()> {
    if game.k() != 2 {
        return Err(Error::Unsupported(format!(
            "entangled strategies need k = 2, got {}",
            game.k()
        )));
    }
    Ok(())
}

/// Checks that `povm` is a POVM on dimension `d`.
pub fn check_povm(povm: &[CMat], d: usize) -> std::result::Result<(), String> {
    if povm.is_empty() {
        return Err("no outcomes".into());
    }
    let mut sum = CMat::zeros(d, d);
    for (a, m) in povm.iter().enumerate() {
        if m.shape() != (d, d) {
            return Err(format!("outcome {a} has shape {:?}, expected {d}x{d}", m.shape()));
        }
        if !is_psd(m, VALIDITY_TOL) {
            return Err(format!("outcome {a} is not positive semidefinite"));
        }
        sum += m;
    }
    let dev = (sum - CMat::identity(d, d)).camax();
    if dev > VALIDITY_TOL {
        return Err(format!("elements sum to identity only within {dev:e}"));
    }
    Ok(())
}

/// Exact deterministic value as a float, for comparison with embeddings.
pub fn deterministic_value(game: &Game, s: &DeterministicStrategy) -> Result<f64> {
    Ok(rational_to_f64(&eval_deterministic(game, s)?))
}

#[cfg(test)]
mod tests {
    use super::super::linalg::{coefficients, random_pure, random_unitary};
    use super::*;
    use crate::anchoring::{anchor_transform, predicted_value};
    use crate::game::library;
    use crate::scalar::rat;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn chsh_optimal_reaches_tsirelson() {
        let v = EntangledStrategy::chsh_optimal().value(&library::chsh()).unwrap();
        assert!((v - (2.0 + 2f64.sqrt()) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn embedded_classical_strategy_matches_exact_value() {
        let g = library::chsh();
        let s = DeterministicStrategy::new(&g, vec![vec![0, 1], vec![1, 0]]).unwrap();
        let e = EntangledStrategy::from_deterministic(&g, &s, 2).unwrap();
        assert!((e.value(&g).unwrap() - deterministic_value(&g, &s).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn always_accepting_game_has_value_one() {
        let g = library::constant_predicate(true);
        let s = DeterministicStrategy::constant(&g);
        let e = EntangledStrategy::from_deterministic(&g, &s, 2).unwrap();
        assert!((e.value(&g).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ando_matches_tensor_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let psi = random_pure(&mut rng, 9);
            let eye = vec![vec![CMat::identity(3, 3)]];
            let s = EntangledStrategy::from_pure_state(&coefficients(&psi, 3, 3), &eye, &eye).unwrap();
            let x = super::super::linalg::ginibre(&mut rng, 3, 3);
            let y = super::super::linalg::ginibre(&mut rng, 3, 3);
            let (x, y) = (&x + x.adjoint(), &y + y.adjoint());
            assert!((s.correlator(&x, &y) - s.correlator_direct(&x, &y)).abs() < 1e-10);
        }
    }

    #[test]
    fn canonicalization_preserves_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let g = library::chsh();
        let base = EntangledStrategy::chsh_optimal();
        let u = random_unitary(&mut rng, 2);
        let v = random_unitary(&mut rng, 2);
        let psi = (kron(&u, &v) * base.state()).into_owned();
        let rot = |fam: &Povms, w: &CMat| -> Povms {
            fam.iter().map(|p| p.iter().map(|m| w * m * w.adjoint()).collect()).collect()
        };
        let s = EntangledStrategy::from_pure_state(
            &coefficients(&psi, 2, 2),
            &rot(base.povms(0), &u),
            &rot(base.povms(1), &v),
        )
        .unwrap();
        assert!((s.value(&g).unwrap() - base.value(&g).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn anchored_extension_follows_affine_identity() {
        let g = library::chsh();
        let alpha = rat(1, 4);
        let anchored = anchor_transform(&g, &alpha).unwrap();
        let base = EntangledStrategy::chsh_optimal();
        let ext = base.extend_to_anchored(&anchored).unwrap();
        let want = predicted_value(&base.value(&g).unwrap(), &0.25, 2);
        assert!((ext.value(&anchored).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn product_strategy_value_multiplies() {
        let g = library::chsh();
        let rg = crate::repetition::repeat_game(&g, 2).unwrap();
        let m = rg.materialize().unwrap();
        let s = EntangledStrategy::chsh_optimal();
        let p = EntangledStrategy::product(&[s.clone(), s.clone()]).unwrap();
        let v = s.value(&g).unwrap();
        assert!((p.value(m).unwrap() - v * v).abs() < 1e-12);
    }

    #[test]
    fn file_round_trip() {
        let g = library::chsh();
        let s = EntangledStrategy::chsh_optimal();
        let back = EntangledStrategy::from_json(&s.to_json(&g).unwrap(), &g).unwrap();
        assert!((back.value(&g).unwrap() - s.value(&g).unwrap()).abs() < 1e-15);
        let mut broken = s.to_file(&g).unwrap();
        broken.schmidt_weights = vec![0.7, 0.7];
        assert!(EntangledStrategy::from_file(&broken, &g).is_err());
    }
}
