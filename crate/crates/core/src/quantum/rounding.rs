//! The single-game strategy extracted from an entangled strategy on `G^n`:
//! share `Φ̃_{⊥,⊥}`, rotate it locally towards `Φ̃_{x,y}` and measure the
//! renormalized operators of one free coordinate.

use std::collections::BTreeMap;

use super::linalg::{identity, inv_sqrt_psd, kron, support_projector, CMat, CVec};
use super::phi::{EntangledTable, PhiFamily, Slot};
use super::uhlmann::{apply_local, inner, uhlmann_unitary, Register};
use crate::depbreak::{tv, Pmf, ReportedQuantity, Side, TwoPlayerTable};
use crate::error::{Error, Result};
use crate::scalar::rational_to_f64;

/// Outcome of the extracted strategy on one free coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumRoundingReport {
    /// 1-based coordinate in `[n]`.
    pub coordinate: usize,
    /// Exact winning probability of the extracted strategy in `G`.
    pub value: f64,
    /// `Pr(W_i | W_C)`.
    pub conditional_win: f64,
    /// `‖P_{Ω_{-i}Z|W} μ − P_{Ω_{-i}Z X_i Y_i|W}‖`.
    pub tv: f64,
    /// `E √(1 − |⟨(U⊗V)Φ̃_{⊥,⊥} | Φ̃_{x,y}⟩|²)`, counting undefined states as 1.
    pub state_residual: f64,
    /// Mass of `(ω_{-i}, z)` under `W` whose shared state is undefined.
    pub undefined_mass: f64,
    /// `conditional_win − tv − state_residual`.
    pub lower_bound: f64,
    pub holds: bool,
    /// Average squared distances after each local rotation, with the scaling
    /// argument of their unstated bounds.
    pub distances: Vec<ReportedQuantity>,
}

/// Renormalized POVM `{A^{-1/2} A(a_i) A^{-1/2}}` completed by `I − Π` on outcome 0.
/// `(side, question, ω_{-i}, z)` of a renormalized measurement.
type HatKey = (Side, usize, Vec<u32>, Vec<u32>);

fn hat_povm(total: &CMat, parts: &[CMat]) -> Vec<CMat> {
    let d = total.nrows();
    let s = inv_sqrt_psd(total);
    let mut out: Vec<CMat> = parts.iter().map(|m| &s * m * &s).collect();
    out[0] += identity(d) - support_projector(total);
    out
}

struct Accumulator {
    value: f64,
    residual: f64,
    undefined: f64,
    ux: (f64, f64),
    vy: (f64, f64),
    joint: (f64, f64),
}

/// Evaluates the extracted strategy for free coordinate `i` (0-based among
/// free coordinates) and the bound it must satisfy.
pub fn quantum_rounding_value(et: &EntangledTable, i: usize) -> Result<QuantumRoundingReport> {
    let t = et.table();
    if i >= t.m() {
        return Err(Error::InvalidCoordinates(format!("free coordinate {i} out of range")));
    }
    let j = t.free()[i];
    let game = et.game();
    let qs = game.question_shape();
    let as_ = game.answer_shape();
    let (na, nb) = (game.answers(0).len(), game.answers(1).len());
    let d = et.strategy().d();
    let mu: Vec<(usize, usize, f64)> = game
        .support()
        .iter()
        .map(|&q| (qs.digit(q, 0), qs.digit(q, 1), rational_to_f64(game.mu(q))))
        .collect();

    let mut rest = t.cols_omega_minus(i);
    rest.extend(t.cols_z());
    let olen = t.cols_omega_minus(i).len();
    let given_w: Pmf<f64> = t.conditioned().marginal(&rest);
    let mut with_q = rest.clone();
    with_q.extend([t.col_x(j), t.col_y(j)]);
    let actual: Pmf<f64> = t.conditioned().marginal(&with_q);
    let mut ideal: Pmf<f64> = BTreeMap::new();
    for (k, &p) in &given_w {
        for &(x, y, m) in &mu {
            ideal.insert(TwoPlayerTable::<f64>::key_with(k, &[x as u32, y as u32]), p * m);
        }
    }
    let tv_dist = tv(&ideal, &actual);

    let laws = et.laws(i);
    let mut acc = Accumulator {
        value: 0.0,
        residual: 0.0,
        undefined: 0.0,
        ux: (0.0, 0.0),
        vy: (0.0, 0.0),
        joint: (0.0, 0.0),
    };
    let mut hats: BTreeMap<HatKey, Vec<CMat>> = BTreeMap::new();
    for (key, &weight) in &given_w {
        if weight <= 0.0 {
            continue;
        }
        let (omega, z) = key.split_at(olen);
        let fam = et.family_with(&laws, i, omega, z);
        let Some(start) = fam.normalized(Slot::Anchor, Slot::Anchor) else {
            acc.undefined += weight;
            acc.residual += weight;
            continue;
        };
        let (ca, cb) = et.split_z(z);
        let mut rot_a: BTreeMap<usize, Rotation> = BTreeMap::new();
        let mut rot_b: BTreeMap<usize, Rotation> = BTreeMap::new();
        for &(x, y, m) in &mu {
            let w = weight * m;
            let (u, du) = rot_a
                .entry(x)
                .or_insert_with(|| rotation(&fam, &start, Slot::Question(x), Slot::Anchor, d, Register::First))
                .clone();
            let (v, dv) = rot_b
                .entry(y)
                .or_insert_with(|| rotation(&fam, &start, Slot::Anchor, Slot::Question(y), d, Register::Second))
                .clone();
            for (dist, slot) in [(du, &mut acc.ux), (dv, &mut acc.vy)] {
                if let Some(dist) = dist {
                    slot.0 += w * dist;
                    slot.1 += w;
                }
            }
            let state = apply_local(&apply_local(&start, &u, d, d, Register::First), &v, d, d, Register::Second);
            let ha = hats
                .entry((Side::Alice, x, omega.to_vec(), z.to_vec()))
                .or_insert_with(|| hat_for(et, &laws, Side::Alice, i, omega, x, ca, na))
                .clone();
            let hb = hats
                .entry((Side::Bob, y, omega.to_vec(), z.to_vec()))
                .or_insert_with(|| hat_for(et, &laws, Side::Bob, i, omega, y, cb, nb))
                .clone();
            let q = qs.encode(&[x, y]);
            let mut win = 0.0;
            for (a, ma) in ha.iter().enumerate() {
                for (b, mb) in hb.iter().enumerate() {
                    if game.accepts(q, as_.encode(&[a, b])) {
                        win += (state.adjoint() * kron(ma, mb) * &state)[(0, 0)].re;
                    }
                }
            }
            acc.value += w * win;
            match fam.normalized(Slot::Question(x), Slot::Question(y)) {
                Some(target) => {
                    let o = inner(&state, &target).norm();
                    acc.residual += w * (1.0 - o * o).max(0.0).sqrt();
                    acc.joint.0 += w * (&state - &target).norm_squared();
                    acc.joint.1 += w;
                }
                None => acc.residual += w,
            }
        }
    }
    let both = et.win_probability_on(&{
        let mut c = et.coords().to_vec();
        c.push(j);
        c
    });
    let conditional_win = both / *t.win_probability();
    let lower_bound = conditional_win - tv_dist - acc.residual;
    let delta = t.delta();
    let alpha = rational_to_f64(t.alpha());
    let mean = |(s, w): (f64, f64)| (w > 0.0).then(|| s / w);
    Ok(QuantumRoundingReport {
        coordinate: j + 1,
        value: acc.value,
        conditional_win,
        tv: tv_dist,
        state_residual: acc.residual,
        undefined_mass: acc.undefined,
        lower_bound,
        holds: acc.value >= lower_bound - 1e-9 && (-1e-9..=1.0 + 1e-9).contains(&acc.value),
        distances: vec![
            ReportedQuantity {
                name: "rotation_alice".into(),
                value: mean(acc.ux),
                scale: delta.powf(0.25) / alpha.powi(2),
            },
            ReportedQuantity {
                name: "rotation_bob".into(),
                value: mean(acc.vy),
                scale: delta.powf(0.25) / alpha.powi(2),
            },
            ReportedQuantity {
                name: "rotation_joint".into(),
                value: mean(acc.joint),
                scale: delta.powf(0.25) / alpha.powi(4),
            },
        ],
    })
}

/// Local unitary and the squared distance it leaves to its target.
type Rotation = (CMat, Option<f64>);

/// Uhlmann rotation of `start` towards the `(a, b)` state; identity if undefined.
fn rotation(fam: &PhiFamily, start: &CVec, a: Slot, b: Slot, d: usize, register: Register) -> Rotation {
    match fam.normalized(a, b) {
        Some(target) => {
            let r = uhlmann_unitary(start, &target, d, d, register);
            let moved = apply_local(start, &r.unitary, d, d, register);
            let dist = (&moved - &target).norm_squared();
            (r.unitary, Some(dist))
        }
        None => (identity(d), None),
    }
}

#[allow(clippy::too_many_arguments)]
fn hat_for(
    et: &EntangledTable,
    laws: &super::phi::Laws,
    side: Side,
    i: usize,
    omega: &[u32],
    q: usize,
    code: usize,
    outcomes: usize,
) -> Vec<CMat> {
    let t = if side == Side::Alice { 0 } else { 1 };
    let d = et.strategy().d();
    let key = TwoPlayerTable::<f64>::key_with(omega, &[q as u32]);
    let Some(law) = laws.question[t].get(&key) else {
        let mut trivial = vec![CMat::zeros(d, d); outcomes];
        trivial[0] = identity(d);
        return trivial;
    };
    let total = et.average(side, law, |qq| et.restricted_operator(side, qq, code).clone());
    let parts: Vec<CMat> = (0..outcomes)
        .map(|a| et.average(side, law, |qq| et.fine_operator(side, i, qq, a, code).clone()))
        .collect();
    hat_povm(&total, &parts)
}
