//! Entropic quantities in bits and the inequalities they satisfy.

use crate::error::{Error, Result};

use super::linalg::{
    block_diagonal, eigh, inv_sqrt_psd, max_eigenvalue, sqrt_psd, trace, trace_first, trace_norm, trace_second,
    CMat, EIG_FLOOR,
};

/// Weight outside the support that counts as a support violation.
const SUPPORT_TOL: f64 = 1e-10;

fn xlog2x(x: f64) -> f64 {
    if x > EIG_FLOOR {
        x * x.log2()
    } else {
        0.0
    }
}

pub fn von_neumann(rho: &CMat) -> f64 {
    -eigh(rho).0.into_iter().map(xlog2x).sum::<f64>()
}

/// `Tr ρ (log ρ − log σ)` without normalizing either argument.
fn relative_term(rho: &CMat, sigma: &CMat) -> f64 {
    let (sv, svec) = eigh(sigma);
    let mut cross = 0.0;
    for (j, &l) in sv.iter().enumerate() {
        let col = svec.column(j);
        let w = (col.adjoint() * rho * col)[(0, 0)].re;
        if l > EIG_FLOOR {
            cross += w * l.log2();
        } else if w > SUPPORT_TOL {
            return f64::INFINITY;
        }
    }
    let own: f64 = eigh(rho).0.into_iter().map(xlog2x).sum();
    own - cross
}

/// `S(ρ‖σ)`; `+∞` when the support of ρ is not contained in that of σ.
pub fn relative_entropy(rho: &CMat, sigma: &CMat) -> f64 {
    relative_term(rho, sigma)
}

/// `Σ_z S`-terms of block-diagonal (classical-quantum) operators.
pub fn cq_relative_entropy(rho: &[CMat], sigma: &[CMat]) -> Result<f64> {
    if rho.len() != sigma.len() {
        return Err(Error::Dimension(format!(
            "{} blocks against {} blocks",
            rho.len(),
            sigma.len()
        )));
    }
    Ok(rho.iter().zip(sigma).map(|(r, s)| relative_term(r, s)).sum())
}

/// `log₂ λ_max(σ^{-1/2} ρ σ^{-1/2})`; `+∞` on support mismatch.
pub fn max_relative_entropy(rho: &CMat, sigma: &CMat) -> f64 {
    let (sv, svec) = eigh(sigma);
    for (j, &l) in sv.iter().enumerate() {
        if l <= EIG_FLOOR {
            let col = svec.column(j);
            if (col.adjoint() * rho * col)[(0, 0)].re > SUPPORT_TOL {
                return f64::INFINITY;
            }
        }
    }
    let s = inv_sqrt_psd(sigma);
    max_eigenvalue(&(&s * rho * &s)).log2()
}

/// `‖√ρ √σ‖₁`.
pub fn fidelity(rho: &CMat, sigma: &CMat) -> f64 {
    trace_norm(&(sqrt_psd(rho) * sqrt_psd(sigma)))
}

/// `‖ρ − σ‖₁`.
pub fn trace_distance(rho: &CMat, sigma: &CMat) -> f64 {
    trace_norm(&(rho - sigma))
}

/// `I(A:B) = S(A) + S(B) − S(AB)`.
pub fn mutual_information(rho_ab: &CMat, da: usize, db: usize) -> f64 {
    von_neumann(&trace_second(rho_ab, da, db)) + von_neumann(&trace_first(rho_ab, da, db)) - von_neumann(rho_ab)
}

/// One inequality `lhs ≤ rhs` (or equality when `lhs` and `rhs` should agree).
#[derive(Clone, Debug, PartialEq)]
pub struct ToolboxCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
}

impl ToolboxCheck {
    pub fn slack(&self) -> f64 {
        if self.lhs.is_infinite() && self.rhs.is_infinite() {
            0.0
        } else {
            self.rhs - self.lhs
        }
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.slack() >= -tol
    }

    pub fn equal(&self, tol: f64) -> bool {
        self.slack().abs() <= tol
    }
}

/// `½‖ρ−σ‖₁² ≤ S(ρ‖σ)`.
pub fn check_pinsker(rho: &CMat, sigma: &CMat) -> ToolboxCheck {
    ToolboxCheck {
        name: "pinsker",
        lhs: 0.5 * trace_distance(rho, sigma).powi(2),
        rhs: relative_entropy(rho, sigma),
    }
}

/// `1 − F ≤ ½‖ρ−σ‖₁ ≤ √(1−F²)` as two checks.
pub fn check_fuchs_van_de_graaf(rho: &CMat, sigma: &CMat) -> [ToolboxCheck; 2] {
    let f = fidelity(rho, sigma).min(1.0);
    let half = 0.5 * trace_distance(rho, sigma);
    [
        ToolboxCheck {
            name: "fidelity_lower",
            lhs: 1.0 - f,
            rhs: half,
        },
        ToolboxCheck {
            name: "fidelity_upper",
            lhs: half,
            rhs: (1.0 - f * f).max(0.0).sqrt(),
        },
    ]
}

fn block_weights(blocks: &[CMat]) -> Vec<f64> {
    blocks.iter().map(|b| trace(b).re).collect()
}

/// Both sides of `S(ρ'‖ρ) = S(P'‖P) + E_{P'} S(ρ'_z‖ρ_z)` for classical-quantum
/// states given as subnormalized blocks over `z`.
///
/// The left side is evaluated on the assembled block-diagonal matrices.
pub fn check_chain_rule(rho_prime: &[CMat], rho: &[CMat]) -> Result<ToolboxCheck> {
    if rho_prime.len() != rho.len() || rho_prime.iter().zip(rho).any(|(a, b)| a.shape() != b.shape()) {
        return Err(Error::Dimension("chain rule needs matching block structure".into()));
    }
    let lhs = relative_entropy(&block_diagonal(rho_prime), &block_diagonal(rho));
    let (pp, p) = (block_weights(rho_prime), block_weights(rho));
    let mut classical = 0.0;
    let mut quantum = 0.0;
    for z in 0..rho.len() {
        if pp[z] <= EIG_FLOOR {
            continue;
        }
        if p[z] <= EIG_FLOOR {
            classical = f64::INFINITY;
            continue;
        }
        classical += pp[z] * (pp[z] / p[z]).log2();
        quantum += pp[z] * relative_entropy(&rho_prime[z].unscale(pp[z]), &rho[z].unscale(p[z]));
    }
    Ok(ToolboxCheck {
        name: "chain_rule",
        lhs,
        rhs: classical + quantum,
    })
}

/// A classical-quantum state over registers `X_1..X_n` (alphabet sizes
/// `dims`) and a quantum register; block `x` is indexed in mixed radix with
/// `X_1` most significant.
#[derive(Clone, Debug)]
pub struct MultiCq {
    pub dims: Vec<usize>,
    pub blocks: Vec<CMat>,
}

impl MultiCq {
    pub fn new(dims: Vec<usize>, blocks: Vec<CMat>) -> Result<Self> {
        let size: usize = dims.iter().product();
        if blocks.len() != size {
            return Err(Error::Dimension(format!("{} blocks for {size} classical values", blocks.len())));
        }
        Ok(MultiCq { dims, blocks })
    }

    fn digit(&self, mut idx: usize, pos: usize) -> usize {
        for &d in self.dims[pos + 1..].iter() {
            idx /= d;
        }
        idx % self.dims[pos]
    }

    /// Blocks of `ρ_{X_i A}`.
    pub fn marginal(&self, i: usize) -> Vec<CMat> {
        let q = self.blocks[0].nrows();
        let mut out = vec![CMat::zeros(q, q); self.dims[i]];
        for (idx, b) in self.blocks.iter().enumerate() {
            out[self.digit(idx, i)] += b;
        }
        out
    }

    pub fn quantum_marginal(&self) -> CMat {
        let q = self.blocks[0].nrows();
        self.blocks.iter().fold(CMat::zeros(q, q), |acc, b| acc + b)
    }

    /// Per-register classical marginals.
    pub fn classical_marginals(&self) -> Vec<Vec<f64>> {
        (0..self.dims.len())
            .map(|i| self.marginal(i).iter().map(|b| trace(b).re).collect())
            .collect()
    }
}

/// `Σ_i I(X_i:A)_ρ ≤ S(ρ‖σ)` for σ of the form `σ_{X_1}⊗…⊗σ_{X_n}⊗σ_A`.
pub fn check_quantum_raz(rho: &MultiCq, sigma: &MultiCq) -> Result<ToolboxCheck> {
    if rho.dims != sigma.dims {
        return Err(Error::Dimension("classical registers differ".into()));
    }
    let marg = sigma.classical_marginals();
    let sa = sigma.quantum_marginal();
    for (idx, b) in sigma.blocks.iter().enumerate() {
        let w: f64 = (0..sigma.dims.len()).map(|i| marg[i][sigma.digit(idx, i)]).product();
        if (b - sa.scale(w)).camax() > 1e-10 {
            return Err(Error::Unsupported("reference state is not of product form".into()));
        }
    }
    let ra = rho.quantum_marginal();
    let mut lhs = 0.0;
    for i in 0..rho.dims.len() {
        let joint = rho.marginal(i);
        let product: Vec<CMat> = joint.iter().map(|b| ra.scale(trace(b).re)).collect();
        lhs += cq_relative_entropy(&joint, &product)?;
    }
    Ok(ToolboxCheck {
        name: "quantum_raz",
        lhs,
        rhs: cq_relative_entropy(&rho.blocks, &sigma.blocks)?,
    })
}

#[cfg(test)]
mod tests {
    use super::super::linalg::{c, kron, random_density};
    use super::*;
    use nalgebra::DVector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag(v: &[f64]) -> CMat {
        CMat::from_diagonal(&DVector::from_iterator(v.len(), v.iter().map(|&x| c(x))))
    }

    #[test]
    fn identities_on_equal_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho = random_density(&mut rng, 3);
        assert!(relative_entropy(&rho, &rho).abs() < 1e-10);
        assert!((fidelity(&rho, &rho) - 1.0).abs() < 1e-10);
        assert!(trace_distance(&rho, &rho) < 1e-12);
    }

    #[test]
    fn classical_values() {
        let p = diag(&[0.5, 0.5]);
        let q = diag(&[1.0, 0.0]);
        assert!((relative_entropy(&q, &p) - 1.0).abs() < 1e-12);
        assert_eq!(relative_entropy(&p, &q), f64::INFINITY);
        assert!((von_neumann(&p) - 1.0).abs() < 1e-12);
        assert!((trace_distance(&p, &q) - 1.0).abs() < 1e-12);
        assert!((max_relative_entropy(&q, &p) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mutual_information_of_product_and_bell() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = random_density(&mut rng, 2);
        let b = random_density(&mut rng, 2);
        assert!(mutual_information(&kron(&a, &b), 2, 2).abs() < 1e-10);
        let mut bell = CMat::zeros(4, 4);
        for i in [0, 3] {
            for j in [0, 3] {
                bell[(i, j)] = c(0.5);
            }
        }
        assert!((mutual_information(&bell, 2, 2) - 2.0).abs() < 1e-10);
    }

    #[test]
    fn chain_rule_with_identical_conditionals() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let r = random_density(&mut rng, 2);
        let rho = vec![r.scale(0.25), r.scale(0.75)];
        let rho_prime = vec![r.scale(0.5), r.scale(0.5)];
        let check = check_chain_rule(&rho_prime, &rho).unwrap();
        let classical = 0.5 * (0.5f64 / 0.25).log2() + 0.5 * (0.5f64 / 0.75).log2();
        assert!((check.lhs - classical).abs() < 1e-10);
        assert!(check.equal(1e-10));
    }

    #[test]
    fn raz_rejects_correlated_reference() {
        let r = diag(&[0.5, 0.0]);
        let zero = CMat::zeros(2, 2);
        let corr = MultiCq::new(vec![2, 2], vec![r.clone(), zero.clone(), zero, r]).unwrap();
        assert!(check_quantum_raz(&corr, &corr).is_err());
    }
}
