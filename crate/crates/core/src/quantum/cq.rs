//! Classical-quantum states over `(Ω, X_[n], Z)` (or `Y_[n]`) and the players'
//! registers, and the win-conditioned versions.

use std::collections::BTreeMap;

use super::entropy::{cq_relative_entropy, max_relative_entropy};
use super::linalg::{kron, min_eigenvalue, sqrt_psd, trace, trace_first, CMat, CVec};
use super::phi::EntangledTable;
use crate::depbreak::{Kernel, Side};
use crate::error::{Error, Result};

/// Blocks keyed by the classical registers; the traces sum to the total mass.
#[derive(Clone, Debug, Default)]
pub struct CqState {
    pub blocks: BTreeMap<Vec<u32>, CMat>,
}

impl CqState {
    pub fn trace(&self) -> f64 {
        self.blocks.values().map(|b| trace(b).re).sum()
    }

    /// Blocks of `other` aligned with `self`'s keys (zero where absent).
    fn aligned(&self, other: &CqState) -> (Vec<CMat>, Vec<CMat>) {
        let d = self.blocks.values().next().map_or(0, |b| b.nrows());
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (k, m) in &self.blocks {
            a.push(m.clone());
            b.push(other.blocks.get(k).cloned().unwrap_or_else(|| CMat::zeros(d, d)));
        }
        (a, b)
    }
}

/// `Ξ`, `ξ = Ξ | W`, `Π` and `π = Π | W`.
///
/// Keys are `ω ++ x_[n] ++ z` for `Ξ` and `ω ++ y_[n] ++ z` for `Π`, where
/// `ω` lists `(D_i, M_i)` for every free coordinate, then `X_C`, then `Y_C`.
#[derive(Clone, Debug)]
pub struct CqStates {
    pub xi: CqState,
    pub xi_win: CqState,
    pub pi: CqState,
    pub pi_win: CqState,
    pub win_probability: f64,
}

/// `(x, z, block)` of one conditioning value.
type XzBlock = (Vec<u32>, Vec<u32>, CMat);

fn omega_cols(et: &EntangledTable) -> Vec<usize> {
    let t = et.table();
    let mut cols = Vec::new();
    for i in 0..t.m() {
        cols.push(t.col_d(i));
        cols.push(t.col_m(i));
    }
    for &c in et.coords() {
        cols.push(t.col_x(c));
    }
    for &c in et.coords() {
        cols.push(t.col_y(c));
    }
    cols
}

fn own_cols(et: &EntangledTable, side: Side) -> Vec<usize> {
    let t = et.table();
    (0..t.n())
        .map(|j| match side {
            Side::Alice => t.col_x(j),
            Side::Bob => t.col_y(j),
        })
        .collect()
}

/// Whether `(x_C, y_C, z)` wins on every coordinate of `C`.
fn wins(et: &EntangledTable, omega: &[u32], z: &[u32]) -> bool {
    let game = et.game();
    let qs = game.question_shape();
    let as_ = game.answer_shape();
    let c = et.coords().len();
    let base = omega.len() - 2 * c;
    (0..c).all(|k| {
        let x = omega[base + k] as usize;
        let y = omega[base + c + k] as usize;
        game.accepts(qs.encode(&[x, y]), as_.encode(&[z[k] as usize, z[c + k] as usize]))
    })
}

fn build_side(et: &EntangledTable, side: Side) -> Result<(CqState, CqState)> {
    let t = et.table();
    let omega = omega_cols(et);
    let own = own_cols(et, side);
    let other_side = match side {
        Side::Alice => Side::Bob,
        Side::Bob => Side::Alice,
    };
    let other_kernel: Kernel<f64> = t.joint().kernel(&own_cols(et, other_side), &omega);
    let mut cols = omega.clone();
    cols.extend(&own);
    let weights = t.joint().marginal(&cols);
    let psi: CVec = et.strategy().state();
    let zs = et.z_keys();
    let w = *t.win_probability();
    let mut full = CqState::default();
    let mut win = CqState::default();
    let mut other_cache: BTreeMap<(Vec<u32>, usize), CMat> = BTreeMap::new();
    for (key, &p) in &weights {
        let (om, q) = key.split_at(omega.len());
        let own_q: Vec<usize> = q.iter().map(|&v| v as usize).collect();
        let player = if side == Side::Alice { 0 } else { 1 };
        let qi = et.repeated().question_index(player, &own_q);
        let law = other_kernel
            .get(om)
            .ok_or_else(|| Error::ZeroMass(format!("Ω = {om:?}")))?;
        for z in &zs {
            let (ca, cb) = et.split_z(z);
            let (own_code, other_code) = if side == Side::Alice { (ca, cb) } else { (cb, ca) };
            let mine = sqrt_psd(et.restricted_operator(side, qi, own_code));
            let theirs = other_cache
                .entry((om.to_vec(), other_code))
                .or_insert_with(|| {
                    sqrt_psd(&et.average(other_side, law, |qq| et.restricted_operator(other_side, qq, other_code).clone()))
                })
                .clone();
            let op = if side == Side::Alice { kron(&mine, &theirs) } else { kron(&theirs, &mine) };
            let v = op * &psi;
            let block = (&v * v.adjoint()).scale(p);
            let mut k = key.clone();
            k.extend_from_slice(z);
            if wins(et, om, z) {
                win.blocks.insert(k.clone(), block.unscale(w));
            }
            full.blocks.insert(k, block);
        }
    }
    Ok((full, win))
}

/// Builds `Ξ`, `ξ`, `Π` and `π`.
pub fn build_cq_states(et: &EntangledTable) -> Result<CqStates> {
    let w = *et.table().win_probability();
    if w <= 0.0 {
        return Err(Error::ZeroWinProbability(et.coords().iter().map(|c| c + 1).collect()));
    }
    let (xi, xi_win) = build_side(et, Side::Alice)?;
    let (pi, pi_win) = build_side(et, Side::Bob)?;
    Ok(CqStates {
        xi,
        xi_win,
        pi,
        pi_win,
        win_probability: w,
    })
}

/// Checks on the classical-quantum states.
#[derive(Clone, Debug, PartialEq)]
pub struct CqReport {
    /// `max |Tr Ξ_block − P(ω, x_[n], z)|` over `Ξ` and `Π`.
    pub marginal_error: f64,
    /// Smallest eigenvalue of `Ξ − Pr(W)·ξ` over blocks (and of the `Π` analogue).
    pub dominance_min_eigenvalue: f64,
    /// `S(ξ‖Ξ)`.
    pub relative_entropy: f64,
    /// `S(π‖Π)`.
    pub relative_entropy_pi: f64,
    /// `log₂(1/Pr W)`.
    pub log_inverse_win: f64,
    /// `max_ω S_∞(Ξ_{X E_B Z | ω} ‖ Ξ_{X|ω} ⊗ Ξ_{E_B|ω} ⊗ u_Z)` with `u_Z` uniform.
    pub max_divergence: f64,
    /// `max_{ω,z} S_∞(Ξ_{X E_B | ω, z} ‖ Ξ_{X|ω} ⊗ Ξ_{E_B|ω})`, reported only.
    pub max_divergence_per_z: f64,
    /// `|C| · log₂ |A||B|`.
    pub max_divergence_bound: f64,
}

/// Evaluates the marginal, dominance, relative entropy and `S_∞` checks.
pub fn cq_report(et: &EntangledTable, states: &CqStates) -> Result<CqReport> {
    let t = et.table();
    let omega = omega_cols(et);
    let mut marginal_error = 0f64;
    for (state, side) in [(&states.xi, Side::Alice), (&states.pi, Side::Bob)] {
        let mut cols = omega.clone();
        cols.extend(own_cols(et, side));
        cols.extend(t.cols_z());
        let want = t.joint().marginal(&cols);
        for (k, b) in &state.blocks {
            let got = trace(b).re;
            let w = want.get(k).copied().unwrap_or(0.0);
            marginal_error = marginal_error.max((got - w).abs());
        }
        for (k, w) in &want {
            if !state.blocks.contains_key(k) {
                marginal_error = marginal_error.max(w.abs());
            }
        }
    }
    let pw = states.win_probability;
    let mut dominance = f64::INFINITY;
    for (full, win) in [(&states.xi, &states.xi_win), (&states.pi, &states.pi_win)] {
        for (k, b) in &full.blocks {
            let diff = match win.blocks.get(k) {
                Some(c) => b - c.scale(pw),
                None => b.clone(),
            };
            dominance = dominance.min(min_eigenvalue(&diff));
        }
    }
    let (xw, xf) = states.xi_win.aligned(&states.xi);
    let (pw_, pf) = states.pi_win.aligned(&states.pi);
    let relative_entropy = cq_relative_entropy(&xw, &xf)?;
    let relative_entropy_pi = cq_relative_entropy(&pw_, &pf)?;

    let d = et.strategy().d();
    let z_size = et.codes(Side::Alice) * et.codes(Side::Bob);
    let olen = omega.len();
    let n = t.n();
    // Per ω: blocks (x, z) of the E_B part, and their sums.
    let mut per_omega: BTreeMap<Vec<u32>, Vec<XzBlock>> = BTreeMap::new();
    for (k, b) in &states.xi.blocks {
        let (om, rest) = k.split_at(olen);
        let (x, z) = rest.split_at(n);
        per_omega
            .entry(om.to_vec())
            .or_default()
            .push((x.to_vec(), z.to_vec(), trace_first(b, d, d)));
    }
    let mut joint_max = f64::NEG_INFINITY;
    let mut per_z_max = f64::NEG_INFINITY;
    for blocks in per_omega.values() {
        let total: f64 = blocks.iter().map(|(_, _, b)| trace(b).re).sum();
        if total <= 0.0 {
            continue;
        }
        let mut px: BTreeMap<&Vec<u32>, f64> = BTreeMap::new();
        let mut pz: BTreeMap<&Vec<u32>, f64> = BTreeMap::new();
        let mut eb = CMat::zeros(d, d);
        for (x, z, b) in blocks {
            let tr = trace(b).re / total;
            *px.entry(x).or_insert(0.0) += tr;
            *pz.entry(z).or_insert(0.0) += tr;
            eb += b.unscale(total);
        }
        for (x, z, b) in blocks {
            let rho = b.unscale(total);
            let sigma = eb.scale(px[x]);
            let v = max_relative_entropy(&rho, &sigma.unscale(z_size as f64));
            joint_max = joint_max.max(v);
            if pz[z] > 0.0 {
                per_z_max = per_z_max.max(max_relative_entropy(&rho.unscale(pz[z]), &sigma));
            }
        }
    }
    let ab = (et.game().answer_space() as f64).log2();
    Ok(CqReport {
        marginal_error,
        dominance_min_eigenvalue: dominance,
        relative_entropy,
        relative_entropy_pi,
        log_inverse_win: -pw.log2(),
        max_divergence: joint_max,
        max_divergence_per_z: per_z_max,
        max_divergence_bound: et.coords().len() as f64 * ab,
    })
}
