//! Local unitaries that align two bipartite pure states.

use nalgebra::Complex;

use super::entropy::fidelity;
use super::linalg::{coefficients, identity, kron, svd, CMat, CVec};

/// Register the unitary acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Register {
    First,
    Second,
}

#[derive(Clone, Debug)]
pub struct UhlmannResult {
    pub unitary: CMat,
    /// `⟨φ₂| U |φ₁⟩`, real and non-negative.
    pub overlap: f64,
}

/// Unitary on `register` maximizing `|⟨φ₂|U|φ₁⟩|` for states on `da ⊗ db`,
/// with the phase chosen so the overlap is real and non-negative.
pub fn uhlmann_unitary(phi1: &CVec, phi2: &CVec, da: usize, db: usize, register: Register) -> UhlmannResult {
    let p1 = coefficients(phi1, da, db);
    let p2 = coefficients(phi2, da, db);
    // ⟨φ₂|(U⊗I)|φ₁⟩ = Tr(U Ψ₁Ψ₂†) and ⟨φ₂|(I⊗V)|φ₁⟩ = Tr(V Ψ₁ᵀ conj(Ψ₂)).
    let m = match register {
        Register::First => &p1 * p2.adjoint(),
        Register::Second => p1.transpose() * p2.conjugate(),
    };
    let dec = svd(&m);
    let mut u = &dec.v * dec.u.adjoint();
    let full = match register {
        Register::First => kron(&u, &identity(db)),
        Register::Second => kron(&identity(da), &u),
    };
    let inner = (phi2.adjoint() * full * phi1)[(0, 0)];
    if inner.norm() > 0.0 {
        let phase = inner.conj() / inner.norm();
        u *= phase;
    }
    UhlmannResult {
        unitary: u,
        overlap: inner.norm(),
    }
}

/// Applies `U` on one register of a bipartite vector.
pub fn apply_local(v: &CVec, u: &CMat, da: usize, db: usize, register: Register) -> CVec {
    let p = coefficients(v, da, db);
    let out = match register {
        Register::First => u * p,
        Register::Second => p * u.transpose(),
    };
    CVec::from_fn(da * db, |i, _| out[(i / db, i % db)])
}

/// Fidelity of the reduced states on the register the unitary does not touch.
pub fn reduced_fidelity(phi1: &CVec, phi2: &CVec, da: usize, db: usize, register: Register) -> f64 {
    let reduced = |v: &CVec| -> CMat {
        let p = coefficients(v, da, db);
        match register {
            Register::First => p.transpose() * p.conjugate(),
            Register::Second => &p * p.adjoint(),
        }
    };
    fidelity(&reduced(phi1), &reduced(phi2))
}

/// `⟨u|v⟩`.
pub fn inner(u: &CVec, v: &CVec) -> Complex<f64> {
    (u.adjoint() * v)[(0, 0)]
}
