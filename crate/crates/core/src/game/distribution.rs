use std::collections::BTreeMap;
use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::scalar::{Prob, Rational};

/// Slack for float distributions; exact scalars must sum to one exactly.
const FLOAT_MASS_TOL: f64 = 1e-9;

/// A probability mass function over an ordered list of distinct labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution<L, P = Rational> {
    entries: Vec<(L, P)>,
}

impl<L: Clone + Ord + Debug, P: Prob> Distribution<L, P> {
    pub fn new(entries: Vec<(L, P)>) -> Result<Self> {
        let mut seen = BTreeMap::new();
        let mut total = P::zero();
        for (label, p) in &entries {
            if p.is_negative() {
                return Err(Error::InvalidDistribution(format!(
                    "negative mass {p:?} at {label:?}"
                )));
            }
            if seen.insert(label, ()).is_some() {
                return Err(Error::InvalidDistribution(format!(
                    "duplicate label {label:?}"
                )));
            }
            total = total + p.clone();
        }
        if !total.approx_eq(&P::one(), FLOAT_MASS_TOL) {
            return Err(Error::InvalidDistribution(format!(
                "mass sum ≠ 1 (got {total:?})"
            )));
        }
        Ok(Distribution { entries })
    }

    pub(crate) fn from_parts_unchecked(entries: Vec<(L, P)>) -> Self {
        Distribution { entries }
    }

    pub fn uniform(labels: Vec<L>) -> Result<Self> {
        let w = P::from_ratio(1, labels.len() as i64);
        Self::new(labels.into_iter().map(|l| (l, w.clone())).collect())
    }

    pub fn support(&self) -> impl Iterator<Item = &L> {
        self.entries.iter().map(|(l, _)| l)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&L, &P)> {
        self.entries.iter().map(|(l, p)| (l, p))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn mass(&self, label: &L) -> P {
        self.entries
            .iter()
            .find(|(l, _)| l == label)
            .map_or_else(P::zero, |(_, p)| p.clone())
    }

    pub fn to_map(&self) -> BTreeMap<L, P> {
        let mut out = BTreeMap::new();
        for (l, p) in &self.entries {
            out.insert(l.clone(), p.clone());
        }
        out
    }

    pub fn tv_distance(&self, other: &Self) -> P {
        tv_distance(self, other)
    }
}

/// Total variation distance `½ Σ |p(x) − q(x)|` over the union of supports.
pub fn tv_distance<L: Clone + Ord + Debug, P: Prob>(
    p: &Distribution<L, P>,
    q: &Distribution<L, P>,
) -> P {
    crate::depbreak::pmf::tv(&p.to_map(), &q.to_map())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use num_traits::{One, Zero};

    #[test]
    fn tv_examples() {
        let p = Distribution::new(vec![(0, rat(1, 2)), (1, rat(1, 2))]).unwrap();
        let q = Distribution::new(vec![(0, Rational::one())]).unwrap();
        assert_eq!(p.tv_distance(&q), rat(1, 2));
        assert!(p.tv_distance(&p).is_zero());
        let r = Distribution::new(vec![(7, Rational::one())]).unwrap();
        assert!(q.tv_distance(&r).is_one());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(Distribution::new(vec![(0, rat(1, 2))]).is_err());
        assert!(Distribution::new(vec![(0, rat(1, 2)), (0, rat(1, 2))]).is_err());
        assert!(Distribution::new(vec![(0, rat(3, 2)), (1, rat(-1, 2))]).is_err());
        assert!(Distribution::<_, f64>::new(vec![(0, 0.5), (1, 0.5 + 1e-12)]).is_ok());
    }

    #[test]
    fn uniform_masses() {
        let u = Distribution::<_, Rational>::uniform(vec!['a', 'b', 'c']).unwrap();
        assert_eq!(u.mass(&'b'), rat(1, 3));
        assert!(u.mass(&'z').is_zero());
    }
}
