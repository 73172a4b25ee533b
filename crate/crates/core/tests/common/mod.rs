//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use nalgebra::{Complex, DMatrix, DVector};
use num_traits::{One, Zero};
use rand::Rng;
use reprep::{Game, Rational};

pub type CMat = DMatrix<Complex<f64>>;
pub type CVec = DVector<Complex<f64>>;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Winning probability of per-player answer maps, summed over every question tuple.
pub fn eval_maps(game: &Game, maps: &[Vec<usize>]) -> Rational {
    let qs = game.question_shape();
    let as_ = game.answer_shape();
    let mut total = Rational::zero();
    for x in 0..qs.size() {
        let mu = game.mu(x);
        if mu.is_zero() {
            continue;
        }
        let digits = qs.decode(x);
        let answers: Vec<usize> = digits.iter().enumerate().map(|(t, &q)| maps[t][q]).collect();
        if game.accepts(x, as_.encode(&answers)) {
            total += mu;
        }
    }
    total
}

/// Advances a mixed-radix counter; false after the last value.
fn step(digits: &mut [usize], radix: &[usize]) -> bool {
    for i in (0..digits.len()).rev() {
        digits[i] += 1;
        if digits[i] < radix[i] {
            return true;
        }
        digits[i] = 0;
    }
    false
}

/// Maximum over every deterministic strategy of every player.
pub fn brute_value(game: &Game) -> Rational {
    let k = game.k();
    let mut radix = Vec::new();
    let mut offsets = Vec::new();
    for t in 0..k {
        offsets.push(radix.len());
        radix.extend(std::iter::repeat(game.answers(t).len()).take(game.questions(t).len()));
    }
    let mut digits = vec![0; radix.len()];
    let mut best = Rational::zero();
    loop {
        let maps: Vec<Vec<usize>> = (0..k)
            .map(|t| digits[offsets[t]..offsets[t] + game.questions(t).len()].to_vec())
            .collect();
        let v = eval_maps(game, &maps);
        if v > best {
            best = v;
        }
        if !step(&mut digits, &radix) {
            return best;
        }
    }
}

/// `μ` as integer weights over a common denominator.
fn integer_weights(game: &Game) -> (Vec<u128>, u128) {
    let den = game
        .mu_dense()
        .iter()
        .fold(num_bigint::BigInt::from(1), |acc, m| num_integer::Integer::lcm(&acc, m.denom()));
    let w = game
        .mu_dense()
        .iter()
        .map(|m| u128::try_from((m * Rational::from(den.clone())).to_integer()).unwrap())
        .collect();
    (w, u128::try_from(den).unwrap())
}

/// Two-player value by enumerating the second player and best-responding with the first.
pub fn reversed_value(game: &Game) -> Rational {
    assert_eq!(game.k(), 2);
    let (nx, ny) = (game.questions(0).len(), game.questions(1).len());
    let (na, nb) = (game.answers(0).len(), game.answers(1).len());
    let (w, den) = integer_weights(game);
    let mut bob = vec![0; ny];
    let radix = vec![nb; ny];
    let mut best = 0u128;
    loop {
        let mut total = 0u128;
        for x in 0..nx {
            let mut top = 0u128;
            for a in 0..na {
                let mut s = 0u128;
                for (y, &b) in bob.iter().enumerate() {
                    let q = x * ny + y;
                    if w[q] > 0 && game.accepts(q, a * nb + b) {
                        s += w[q];
                    }
                }
                top = top.max(s);
            }
            total += top;
        }
        best = best.max(total);
        if !step(&mut bob, &radix) {
            return Rational::new(best.into(), den.into());
        }
    }
}

/// Definition-level anchoring check: every support point factors over its anchored players.
pub fn anchored_oracle(game: &Game, anchors: &[Vec<usize>]) -> (bool, Rational) {
    let k = game.k();
    let qs = game.question_shape();
    let marg: Vec<Vec<Rational>> = (0..k)
        .map(|t| {
            let mut m = vec![Rational::zero(); game.questions(t).len()];
            for x in 0..qs.size() {
                m[qs.digit(x, t)] += game.mu(x);
            }
            m
        })
        .collect();
    let alpha = (0..k)
        .map(|t| anchors[t].iter().fold(Rational::zero(), |acc, &q| acc + &marg[t][q]))
        .min()
        .unwrap();
    let mut ok = alpha > Rational::zero();
    for x in 0..qs.size() {
        if game.mu(x).is_zero() {
            continue;
        }
        let d = qs.decode(x);
        let anchored: Vec<bool> = (0..k).map(|t| anchors[t].contains(&d[t])).collect();
        let mut rest = Rational::zero();
        for y in 0..qs.size() {
            let e = qs.decode(y);
            if (0..k).all(|t| anchored[t] || e[t] == d[t]) {
                rest += game.mu(y);
            }
        }
        let mut prod = rest;
        for t in 0..k {
            if anchored[t] {
                prod *= &marg[t][d[t]];
            }
        }
        if &prod != game.mu(x) {
            ok = false;
        }
    }
    (ok, alpha)
}

/// Random distribution with positive rational weights over `n` labels.
pub fn random_rational_weights<R: Rng>(rng: &mut R, n: usize) -> Vec<Rational> {
    let w: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=9)).collect();
    let total: i64 = w.iter().sum();
    w.iter().map(|&v| rat(v, total)).collect()
}

pub fn c(re: f64) -> Complex<f64> {
    Complex::new(re, 0.0)
}

fn gaussian_matrix<R: Rng>(rng: &mut R, r: usize, c_: usize) -> CMat {
    CMat::from_fn(r, c_, |_, _| {
        Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

pub fn random_state<R: Rng>(rng: &mut R, dim: usize) -> CVec {
    let v = gaussian_matrix(rng, dim, 1).column(0).into_owned();
    let n = v.norm();
    v.unscale(n)
}

/// Eigen-decomposition square root of a Hermitian PSD matrix.
pub fn psd_sqrt(m: &CMat) -> CMat {
    let h = (m + m.adjoint()).scale(0.5);
    let e = h.symmetric_eigen();
    let d = CVec::from_iterator(e.eigenvalues.len(), e.eigenvalues.iter().map(|&l| c(l.max(0.0).sqrt())));
    &e.eigenvectors * CMat::from_diagonal(&d) * e.eigenvectors.adjoint()
}

/// `Tr √(√ρ σ √ρ)`.
pub fn fidelity_oracle(rho: &CMat, sigma: &CMat) -> f64 {
    let s = psd_sqrt(rho);
    psd_sqrt(&(&s * sigma * &s)).trace().re
}

/// Reduced-state fidelity as the trace norm of the coefficient cross product,
/// for the register the unitary acts on (`first` = the first factor).
pub fn cross_fidelity(p1: &CVec, p2: &CVec, da: usize, db: usize, first: bool) -> f64 {
    let coeff = |v: &CVec| CMat::from_fn(da, db, |a, b| v[a * db + b]);
    let (c1, c2) = (coeff(p1), coeff(p2));
    let m = if first { &c1 * c2.adjoint() } else { c1.transpose() * c2.conjugate() };
    m.singular_values().iter().sum()
}

/// Reduced state on the second factor of `v ∈ C^{da} ⊗ C^{db}`.
pub fn reduce_first(v: &CVec, da: usize, db: usize) -> CMat {
    let mut out = CMat::zeros(db, db);
    for a in 0..da {
        for i in 0..db {
            for j in 0..db {
                out[(i, j)] += v[a * db + i] * v[a * db + j].conj();
            }
        }
    }
    out
}

/// Reduced state on the first factor.
pub fn reduce_second(v: &CVec, da: usize, db: usize) -> CMat {
    let mut out = CMat::zeros(da, da);
    for b in 0..db {
        for i in 0..da {
            for j in 0..da {
                out[(i, j)] += v[i * db + b] * v[j * db + b].conj();
            }
        }
    }
    out
}

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

pub fn one() -> Rational {
    Rational::one()
}
