//! Small named games and a random game generator.

use rand::Rng;

use super::{Game, Label};
use crate::scalar::{rat, Rational};

fn alphabet(n: usize) -> Vec<Label> {
    (0..n).map(|i| Label::Atom(i.to_string())).collect()
}

fn uniform_pairs(nx: usize, ny: usize) -> Vec<(Vec<usize>, Rational)> {
    let w = rat(1, (nx * ny) as i64);
    let w = &w;
    (0..nx)
        .flat_map(|x| (0..ny).map(move |y| (vec![x, y], w.clone())))
        .collect()
}

/// CHSH: uniform bits, win iff `a ⊕ b = x ∧ y`.
pub fn chsh() -> Game {
    Game::new(
        vec![alphabet(2), alphabet(2)],
        vec![alphabet(2), alphabet(2)],
        uniform_pairs(2, 2),
        |x, a| (a[0] ^ a[1]) == (x[0] & x[1]),
    )
    .expect("CHSH is well formed")
}

/// Three-player GHZ game: uniform over even-parity question triples,
/// win iff `a ⊕ b ⊕ c = x ∨ y ∨ z`.
pub fn ghz() -> Game {
    let mu = [[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0]]
        .iter()
        .map(|x| (x.to_vec(), rat(1, 4)))
        .collect();
    Game::new(
        vec![alphabet(2); 3],
        vec![alphabet(2); 3],
        mu,
        |x, a| (a[0] ^ a[1] ^ a[2]) == (x[0] | x[1] | x[2]),
    )
    .expect("GHZ is well formed")
}

/// A free game on 2×3 questions with a non-uniform product distribution.
pub fn free_game() -> Game {
    let px = [rat(1, 3), rat(2, 3)];
    let py = [rat(1, 2), rat(1, 4), rat(1, 4)];
    let mu = (0..2)
        .flat_map(|x| {
            let py = py.clone();
            let pxx = px[x].clone();
            (0..3).map(move |y| (vec![x, y], &pxx * &py[y]))
        })
        .collect();
    Game::new(
        vec![alphabet(2), alphabet(3)],
        vec![alphabet(2), alphabet(2)],
        mu,
        |x, a| (a[0] ^ a[1]) == usize::from(x[0] == 1 && x[1] >= 1),
    )
    .expect("free game is well formed")
}

/// Perfectly correlated question bits, win iff the answers agree.
pub fn equality_questions() -> Game {
    Game::new(
        vec![alphabet(2), alphabet(2)],
        vec![alphabet(2), alphabet(2)],
        vec![(vec![0, 0], rat(1, 2)), (vec![1, 1], rat(1, 2))],
        |_, a| a[0] == a[1],
    )
    .expect("well formed")
}

/// Two-player game with uniform bit questions and a constant predicate.
pub fn constant_predicate(verdict: bool) -> Game {
    Game::new(
        vec![alphabet(2), alphabet(2)],
        vec![alphabet(2), alphabet(2)],
        uniform_pairs(2, 2),
        |_, _| verdict,
    )
    .expect("well formed")
}

/// Random game with `k` players and alphabets of size `1..=max_alphabet`.
///
/// μ has small integer weights (so denominators stay small) and the
/// predicate accepts each entry with probability one half.
pub fn random_game<R: Rng + ?Sized>(rng: &mut R, k: usize, max_alphabet: usize) -> Game {
    let questions: Vec<Vec<Label>> = (0..k)
        .map(|_| alphabet(rng.gen_range(1..=max_alphabet)))
        .collect();
    let answers: Vec<Vec<Label>> = (0..k)
        .map(|_| alphabet(rng.gen_range(1..=max_alphabet)))
        .collect();
    let total: usize = questions.iter().map(Vec::len).product();
    let mut weights: Vec<i64> = (0..total).map(|_| rng.gen_range(0..=3)).collect();
    if weights.iter().all(|&w| w == 0) {
        let i = rng.gen_range(0..total);
        weights[i] = 1;
    }
    let sum: i64 = weights.iter().sum();
    let shape = super::Shape::new(questions.iter().map(Vec::len).collect()).expect("small");
    let mu = weights
        .iter()
        .enumerate()
        .filter(|(_, &w)| w > 0)
        .map(|(i, &w)| (shape.decode(i), rat(w, sum)))
        .collect();
    let na: usize = answers.iter().map(Vec::len).product();
    let table: Vec<bool> = (0..total * na).map(|_| rng.gen_bool(0.5)).collect();
    let ashape = super::Shape::new(answers.iter().map(Vec::len).collect()).expect("small");
    Game::new(questions, answers, mu, |x, a| {
        table[shape.encode(x) * na + ashape.encode(a)]
    })
    .expect("random game is well formed")
}
