//! Dense complex matrices: spectral functions, tensor products, partial traces.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Eigenvalues at or below this are treated as zero.
pub const EIG_FLOOR: f64 = 1e-12;

pub fn c(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

pub fn zeros(d: usize) -> CMat {
    CMat::zeros(d, d)
}

/// `(M + M†) / 2`.
pub fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// Eigenvalues and eigenvectors (columns) of the Hermitian part of `m`.
pub fn eigh(m: &CMat) -> (Vec<f64>, CMat) {
    let e = SymmetricEigen::new(hermitize(m));
    (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
}

/// `V f(Λ) V†` for a Hermitian matrix.
pub fn spectral_map(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = eigh(m);
    let d = CMat::from_diagonal(&DVector::from_iterator(vals.len(), vals.iter().map(|&l| c(f(l)))));
    &vecs * d * vecs.adjoint()
}

pub fn sqrt_psd(m: &CMat) -> CMat {
    spectral_map(m, |l| l.max(0.0).sqrt())
}

/// Pseudo-inverse square root: eigenvalues at or below the floor map to zero.
pub fn inv_sqrt_psd(m: &CMat) -> CMat {
    spectral_map(m, |l| if l > EIG_FLOOR { 1.0 / l.sqrt() } else { 0.0 })
}

/// Projector onto eigenvectors with eigenvalue above the floor.
pub fn support_projector(m: &CMat) -> CMat {
    spectral_map(m, |l| if l > EIG_FLOOR { 1.0 } else { 0.0 })
}

/// Projector onto the strictly positive eigenspace.
pub fn positive_projector(m: &CMat) -> CMat {
    spectral_map(m, |l| if l > 0.0 { 1.0 } else { 0.0 })
}

pub fn min_eigenvalue(m: &CMat) -> f64 {
    eigh(m).0.into_iter().fold(f64::INFINITY, f64::min)
}

pub fn max_eigenvalue(m: &CMat) -> f64 {
    eigh(m).0.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

pub fn trace(m: &CMat) -> C64 {
    m.trace()
}

/// Sum of singular values.
pub fn trace_norm(m: &CMat) -> f64 {
    svd(m).s.iter().sum()
}

/// Thin singular value decomposition `M = U diag(s) V†` with `k = min(rows, cols)`
/// columns in `U` and `V`, singular values in decreasing order.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMat,
    pub s: Vec<f64>,
    pub v: CMat,
}

impl Svd {
    pub fn recompose(&self) -> CMat {
        let k = self.s.len();
        let d = CMat::from_diagonal(&DVector::from_iterator(k, self.s.iter().map(|&x| c(x))));
        &self.u * d * self.v.adjoint()
    }
}

/// One-sided Jacobi SVD; columns of `U` for zero singular values are completed
/// to an orthonormal set.
pub fn svd(m: &CMat) -> Svd {
    if m.nrows() < m.ncols() {
        let t = svd(&m.adjoint());
        return Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        };
    }
    let (rows, k) = m.shape();
    let mut a = m.clone();
    let mut v = CMat::identity(k, k);
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dotc(&a.column(q));
                let g = gamma.norm();
                if g <= f64::EPSILON * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                // Columns (p, q) ← (p, q) · diag(1, conj(phase)) · [[c, s], [−s, c]].
                let rotate = |x: &mut CMat| {
                    for r in 0..x.nrows() {
                        let xp = x[(r, p)];
                        let xq = x[(r, q)] * phase.conj();
                        x[(r, p)] = xp * cs - xq * sn;
                        x[(r, q)] = xp * sn + xq * cs;
                    }
                };
                rotate(&mut a);
                rotate(&mut v);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..k).collect();
    let norms: Vec<f64> = (0..k).map(|j| a.column(j).norm()).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let scale = norms.iter().fold(0f64, |acc, &x| acc.max(x));
    let mut u = CMat::zeros(rows, k);
    let mut vv = CMat::zeros(k, k);
    let mut s = Vec::with_capacity(k);
    let mut filled = Vec::new();
    for (col, &j) in order.iter().enumerate() {
        vv.set_column(col, &v.column(j));
        s.push(norms[j]);
        if norms[j] > scale * 1e-14 && norms[j] > 0.0 {
            u.set_column(col, &a.column(j).unscale(norms[j]));
            filled.push(col);
        }
    }
    complete_columns(&mut u, &filled);
    Svd { u, s, v: vv }
}

/// Fills the columns of `u` not listed in `filled` with an orthonormal
/// completion of the listed ones.
fn complete_columns(u: &mut CMat, filled: &[usize]) {
    let rows = u.nrows();
    let mut basis: Vec<CVec> = filled.iter().map(|&j| u.column(j).into_owned()).collect();
    let mut candidate = 0;
    for j in 0..u.ncols() {
        if filled.contains(&j) {
            continue;
        }
        while candidate < rows {
            let mut e = CVec::zeros(rows);
            e[candidate] = c(1.0);
            candidate += 1;
            for _ in 0..2 {
                for b in &basis {
                    let proj = b.dotc(&e);
                    e -= b * proj;
                }
            }
            let n = e.norm();
            if n > 1e-8 {
                let e = e.unscale(n);
                u.set_column(j, &e);
                basis.push(e);
                break;
            }
        }
    }
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    m.is_square() && (m - m.adjoint()).camax() <= tol
}

pub fn is_psd(m: &CMat, tol: f64) -> bool {
    is_hermitian(m, tol) && min_eigenvalue(m) >= -tol
}

/// Traces out the first factor of a `da·db` operator.
pub fn trace_first(m: &CMat, da: usize, db: usize) -> CMat {
    let mut out = CMat::zeros(db, db);
    for a in 0..da {
        out += m.view((a * db, a * db), (db, db));
    }
    out
}

/// Traces out the second factor of a `da·db` operator.
pub fn trace_second(m: &CMat, da: usize, db: usize) -> CMat {
    CMat::from_fn(da, da, |i, j| (0..db).map(|b| m[(i * db + b, j * db + b)]).sum())
}

/// `|v⟩⟨v|`.
pub fn outer(v: &CVec) -> CMat {
    v * v.adjoint()
}

/// Coefficient matrix `Ψ[a, b]` of a bipartite vector with index `a·db + b`.
pub fn coefficients(v: &CVec, da: usize, db: usize) -> CMat {
    CMat::from_fn(da, db, |a, b| v[a * db + b])
}

pub fn from_coefficients(m: &CMat) -> CVec {
    let (da, db) = m.shape();
    CVec::from_fn(da * db, |i, _| m[(i / db, i % db)])
}

/// Block-diagonal matrix of the given square blocks.
pub fn block_diagonal(blocks: &[CMat]) -> CMat {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMat::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        let k = b.nrows();
        out.view_mut((off, off), (k, k)).copy_from(b);
        off += k;
    }
    out
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-random unitary via QR with phase correction.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMat {
    let qr = ginibre(rng, d, d).qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = CMat::from_diagonal(&DVector::from_iterator(
        d,
        (0..d).map(|i| {
            let x = r[(i, i)];
            if x.norm() > 0.0 {
                x / x.norm()
            } else {
                c(1.0)
            }
        }),
    ));
    q * phases
}

/// Random full-rank density matrix from the induced measure.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMat {
    let g = ginibre(rng, d, d);
    let m = &g * g.adjoint();
    let t = trace(&m).re;
    hermitize(&m.unscale(t))
}

pub fn random_pure<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CVec {
    let v = CVec::from_fn(d, |_, _| gaussian(rng));
    let n = v.norm();
    v.unscale(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn square_roots_and_pseudo_inverses() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = random_density(&mut rng, 3);
        let s = sqrt_psd(&rho);
        assert!((&s * &s - &rho).camax() < 1e-12);
        let p = CMat::from_diagonal(&DVector::from_vec(vec![c(0.5), c(0.0)]));
        let inv = inv_sqrt_psd(&p);
        assert!((inv[(0, 0)].re - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(inv[(1, 1)].re, 0.0);
    }

    #[test]
    fn partial_traces_of_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_density(&mut rng, 2);
        let b = random_density(&mut rng, 3);
        let ab = kron(&a, &b);
        assert!((trace_first(&ab, 2, 3) - &b).camax() < 1e-12);
        assert!((trace_second(&ab, 2, 3) - &a).camax() < 1e-12);
    }

    #[test]
    fn random_unitaries_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_unitary(&mut rng, 4);
        assert!((&u * u.adjoint() - identity(4)).camax() < 1e-12);
    }

    #[test]
    fn svd_reconstructs_rank_deficient_input() {
        let col = |v: &[(f64, f64)]| CMat::from_fn(v.len(), 1, |i, _| Complex::new(v[i].0, v[i].1));
        let u = col(&[(0.4, 0.0), (0.36, -0.17)]);
        let v = col(&[(-0.52, 0.26), (-0.35, 0.46)]);
        let m = &u * v.adjoint();
        let d = svd(&m);
        assert!((d.recompose() - &m).camax() < 1e-14);
        assert!((&d.u.adjoint() * &d.u - identity(2)).camax() < 1e-12);
        assert!(d.s[1].abs() < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (r, k) in [(3, 3), (4, 2), (2, 4)] {
            let g = ginibre(&mut rng, r, k);
            let d = svd(&g);
            assert!((d.recompose() - &g).camax() < 1e-12);
            assert!(d.s.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn coefficient_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let v = random_pure(&mut rng, 6);
        assert_eq!(from_coefficients(&coefficients(&v, 2, 3)), v);
    }
}
