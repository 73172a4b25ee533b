//! Joint probability tables over integer-coded columns.
//!
//! A [`Joint`] is a list of rows `(key, mass)`; marginals, conditionals and
//! kernel compositions produce [`Pmf`] maps keyed by column projections.

use std::collections::BTreeMap;
use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::game::Distribution;
use crate::scalar::Prob;

pub type Key = Vec<u32>;
pub type Pmf<P> = BTreeMap<Key, P>;

/// `½ Σ |a(k) − b(k)|` over the union of the key sets.
pub fn tv<K: Ord, P: Prob>(a: &BTreeMap<K, P>, b: &BTreeMap<K, P>) -> P {
    let mut sum = P::zero();
    for (k, pa) in a {
        let d = match b.get(k) {
            Some(pb) => pa.clone() - pb.clone(),
            None => pa.clone(),
        };
        sum = sum + d.abs();
    }
    for (k, pb) in b {
        if !a.contains_key(k) {
            sum = sum + pb.abs();
        }
    }
    sum / (P::one() + P::one())
}

/// Rescales to total mass one.
pub fn normalize<P: Prob>(p: &Pmf<P>, what: &str) -> Result<Pmf<P>> {
    let total = p.values().fold(P::zero(), |acc, v| acc + v.clone());
    if total.is_zero() {
        return Err(Error::ZeroMass(what.to_string()));
    }
    Ok(p.iter()
        .map(|(k, v)| (k.clone(), v.clone() / total.clone()))
        .collect())
}

/// Product measure with concatenated keys.
pub fn product<P: Prob>(a: &Pmf<P>, b: &Pmf<P>) -> Pmf<P> {
    let mut out = Pmf::new();
    for (ka, pa) in a {
        for (kb, pb) in b {
            let mut k = ka.clone();
            k.extend_from_slice(kb);
            out.insert(k, pa.clone() * pb.clone());
        }
    }
    out
}

/// Keeps only entries with positive mass.
pub fn prune<P: Prob>(p: Pmf<P>) -> Pmf<P> {
    p.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

fn project(key: &[u32], cols: &[usize]) -> Key {
    cols.iter().map(|&c| key[c]).collect()
}

/// A finite joint distribution whose rows are integer tuples.
#[derive(Clone, Debug)]
pub struct Joint<P> {
    rows: Vec<(Key, P)>,
}

impl<P: Prob> Joint<P> {
    pub fn new(rows: Vec<(Key, P)>) -> Self {
        Joint { rows }
    }

    pub fn rows(&self) -> &[(Key, P)] {
        &self.rows
    }

    pub fn total(&self) -> P {
        self.rows.iter().fold(P::zero(), |acc, (_, p)| acc + p.clone())
    }

    pub fn marginal(&self, cols: &[usize]) -> Pmf<P> {
        let mut out = Pmf::new();
        for (k, p) in &self.rows {
            let e = out.entry(project(k, cols)).or_insert_with(P::zero);
            *e = e.clone() + p.clone();
        }
        prune(out)
    }

    pub fn mass(&self, pred: impl Fn(&[u32]) -> bool) -> P {
        self.rows
            .iter()
            .filter(|(k, _)| pred(k))
            .fold(P::zero(), |acc, (_, p)| acc + p.clone())
    }

    /// Rows satisfying `pred`, renormalized.
    pub fn condition(&self, pred: impl Fn(&[u32]) -> bool, what: &str) -> Result<Joint<P>> {
        let mass = self.mass(&pred);
        if mass.is_zero() {
            return Err(Error::ZeroMass(what.to_string()));
        }
        Ok(Joint {
            rows: self
                .rows
                .iter()
                .filter(|(k, _)| pred(k))
                .map(|(k, p)| (k.clone(), p.clone() / mass.clone()))
                .collect(),
        })
    }

    /// Conditional law of `out` given `given`, for every given value of positive mass.
    pub fn kernel(&self, out: &[usize], given: &[usize]) -> Kernel<P> {
        let mut table: BTreeMap<Key, Pmf<P>> = BTreeMap::new();
        for (k, p) in &self.rows {
            if p.is_zero() {
                continue;
            }
            let row = table.entry(project(k, given)).or_default();
            let e = row.entry(project(k, out)).or_insert_with(P::zero);
            *e = e.clone() + p.clone();
        }
        for row in table.values_mut() {
            let total = row.values().fold(P::zero(), |acc, v| acc + v.clone());
            for v in row.values_mut() {
                *v = v.clone() / total.clone();
            }
        }
        Kernel { table }
    }
}

/// A conditional distribution `out | given`, defined on given values of positive mass.
#[derive(Clone, Debug)]
pub struct Kernel<P> {
    table: BTreeMap<Key, Pmf<P>>,
}

impl<P: Prob> Kernel<P> {
    pub fn get(&self, given: &[u32]) -> Option<&Pmf<P>> {
        self.table.get(given)
    }

    pub fn given_values(&self) -> impl Iterator<Item = &Key> {
        self.table.keys()
    }
}

/// `base(k) · kernel(o | given_of(k))` keyed by `k ++ o`.
///
/// Fails when a key of positive base mass maps to an undefined conditional.
pub fn attach<P: Prob>(
    base: &Pmf<P>,
    kernel: &Kernel<P>,
    given_of: impl Fn(&[u32]) -> Key,
    what: &str,
) -> Result<Pmf<P>> {
    let mut out = Pmf::new();
    for (k, p) in base {
        if p.is_zero() {
            continue;
        }
        let g = given_of(k);
        let row = kernel
            .get(&g)
            .ok_or_else(|| Error::ZeroMass(format!("{what} at {g:?}")))?;
        for (o, q) in row {
            let mut key = k.clone();
            key.extend_from_slice(o);
            out.insert(key, p.clone() * q.clone());
        }
    }
    Ok(out)
}

/// Both sides of `‖Q·R − S·R‖ = ‖Q − S‖`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrivialLemmaCheck<P> {
    pub lhs: P,
    pub rhs: P,
    pub equal: bool,
}

/// Compares `‖Q_F R_{G|F} − S_F R_{G|F}‖` with `‖Q_F − S_F‖`.
///
/// `kernel` must hold a distribution for every label in either support.
pub fn check_trivial_lemma<F, G, P>(
    q: &Distribution<F, P>,
    s: &Distribution<F, P>,
    kernel: &BTreeMap<F, Distribution<G, P>>,
) -> Result<TrivialLemmaCheck<P>>
where
    F: Clone + Ord + Debug,
    G: Clone + Ord + Debug,
    P: Prob,
{
    let compose = |d: &Distribution<F, P>| -> Result<BTreeMap<(F, G), P>> {
        let mut out = BTreeMap::new();
        for (f, p) in d.iter() {
            let r = kernel
                .get(f)
                .ok_or_else(|| Error::InvalidDistribution(format!("kernel missing row {f:?}")))?;
            for (g, w) in r.iter() {
                out.insert((f.clone(), g.clone()), p.clone() * w.clone());
            }
        }
        Ok(out)
    };
    let lhs = tv(&compose(q)?, &compose(s)?);
    let rhs = tv(&q.to_map(), &s.to_map());
    let equal = lhs.approx_eq(&rhs, 1e-12);
    Ok(TrivialLemmaCheck { lhs, rhs, equal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};
    use num_traits::Zero;
    use proptest::prelude::*;

    fn joint() -> Joint<Rational> {
        Joint::new(vec![
            (vec![0, 0], rat(1, 4)),
            (vec![0, 1], rat(1, 4)),
            (vec![1, 1], rat(1, 2)),
        ])
    }

    #[test]
    fn marginals_and_kernels() {
        let j = joint();
        let m = j.marginal(&[1]);
        assert_eq!(m[&vec![1]], rat(3, 4));
        let k = j.kernel(&[0], &[1]);
        assert_eq!(k.get(&[1]).unwrap()[&vec![0]], rat(1, 3));
        let back = attach(&m, &k, |key| key.to_vec(), "test").unwrap();
        assert_eq!(back[&vec![1, 1]], rat(1, 2));
    }

    #[test]
    fn conditioning_on_nothing_fails() {
        let err = joint().condition(|k| k[0] == 7, "x = 7").unwrap_err();
        assert!(matches!(err, Error::ZeroMass(_)));
    }

    #[test]
    fn lemma_identity_cases() {
        let q = Distribution::new(vec![(0u8, rat(1, 3)), (1, rat(2, 3))]).unwrap();
        let s = Distribution::new(vec![(0u8, rat(1, 2)), (1, rat(1, 2))]).unwrap();
        let r: BTreeMap<u8, Distribution<u8, Rational>> = [
            (0, Distribution::new(vec![(5, rat(1, 5)), (6, rat(4, 5))]).unwrap()),
            (1, Distribution::new(vec![(6, rat(1, 1))]).unwrap()),
        ]
        .into_iter()
        .collect();
        let same = check_trivial_lemma(&q, &q, &r).unwrap();
        assert!(same.lhs.is_zero() && same.rhs.is_zero() && same.equal);
        let c = check_trivial_lemma(&q, &s, &r).unwrap();
        assert_eq!(c.rhs, rat(1, 6));
        assert!(c.equal);
    }

    fn weights(n: usize) -> impl Strategy<Value = Vec<u32>> {
        prop::collection::vec(0u32..5, n).prop_filter("nonzero", |w| w.iter().any(|&x| x > 0))
    }

    fn to_dist(w: &[u32]) -> Distribution<usize, Rational> {
        let total: u32 = w.iter().sum();
        Distribution::new(
            w.iter()
                .enumerate()
                .map(|(i, &x)| (i, rat(x as i64, total as i64)))
                .collect(),
        )
        .unwrap()
    }

    proptest! {
        #[test]
        fn tv_is_a_metric(a in weights(4), b in weights(4), c in weights(4)) {
            let (p, q, r) = (to_dist(&a).to_map(), to_dist(&b).to_map(), to_dist(&c).to_map());
            prop_assert_eq!(tv(&p, &q), tv(&q, &p));
            prop_assert!(tv(&p, &r) <= tv(&p, &q) + tv(&q, &r));
            prop_assert!(tv(&p, &q) <= rat(1, 1));
        }

        #[test]
        fn trivial_lemma_is_exact(a in weights(4), b in weights(4), rows in prop::collection::vec(weights(3), 4)) {
            let kernel = rows.iter().enumerate().map(|(f, w)| (f, to_dist(w))).collect();
            let c = check_trivial_lemma(&to_dist(&a), &to_dist(&b), &kernel).unwrap();
            prop_assert_eq!(c.lhs, c.rhs);
        }
    }
}
