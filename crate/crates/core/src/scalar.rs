//! Probability scalars.
//!
//! Distribution code is written once against [`Prob`] and instantiated with
//! exact rationals for the classical identities and with floats where
//! irrational weights (cube roots, quantum amplitudes) make exactness moot.

use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational probability.
pub type Rational = BigRational;

/// A field of probability weights.
pub trait Prob: Clone + Debug + PartialOrd + Num + Signed + Send + Sync + 'static {
    /// Whether arithmetic in this type is exact.
    const EXACT: bool;

    fn from_rational(r: &Rational) -> Self;

    fn to_f64(&self) -> f64;

    /// Real cube root, or `None` when it is not representable.
    fn cbrt(&self) -> Option<Self>;

    /// Equality up to the type's arithmetic precision.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if Self::EXACT {
            self == other
        } else {
            (self.to_f64() - other.to_f64()).abs() <= tol
        }
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(&Rational::new(num.into(), den.into()))
    }
}

impl Prob for Rational {
    const EXACT: bool = true;

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn cbrt(&self) -> Option<Self> {
        let root = |v: &BigInt| {
            let r = v.cbrt();
            (&r * &r * &r == *v).then_some(r)
        };
        Some(Rational::new(root(self.numer())?, root(self.denom())?))
    }
}

impl Prob for f64 {
    const EXACT: bool = false;

    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn cbrt(&self) -> Option<Self> {
        Some(f64::cbrt(*self))
    }
}

impl Prob for f32 {
    const EXACT: bool = false;

    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r) as f32
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }

    fn cbrt(&self) -> Option<Self> {
        Some(f32::cbrt(*self))
    }
}

/// Nearest `f64`, robust to numerators and denominators beyond `f64` range.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    // Scale so the integer quotient carries about 64 significant bits.
    let s = 64 - (r.numer().bits() as i64 - r.denom().bits() as i64);
    let q = if s >= 0 {
        (r.numer() << s as usize) / r.denom()
    } else {
        r.numer() / (r.denom() << (-s) as usize)
    };
    let s = s.clamp(i32::MIN as i64, i32::MAX as i64) as i32;
    q.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-s)
}

/// Parses `"num/den"` or a bare integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::ParseRational(s.to_string());
    let t = s.trim();
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| bad())?;
    let d = BigInt::from_str(d).map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// Formats as `"num/den"`, always with an explicit denominator.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// `base^exp` for a non-negative integer exponent.
pub fn pow<P: Prob>(base: &P, exp: usize) -> P {
    let mut acc = P::one();
    for _ in 0..exp {
        acc = acc * base.clone();
    }
    acc
}

pub(crate) fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        let r = parse_rational("6/8").unwrap();
        assert_eq!(format_rational(&r), "3/4");
        assert_eq!(parse_rational(" 2 ").unwrap(), rat(2, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("0.25").is_err());
    }

    #[test]
    fn exact_cube_roots() {
        assert_eq!(rat(27, 64).cbrt(), Some(rat(3, 4)));
        assert_eq!(rat(1, 8).cbrt(), Some(rat(1, 2)));
        assert_eq!(rat(3, 4).cbrt(), None);
        assert!((Prob::cbrt(&0.125f64).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn huge_rationals_convert() {
        let big = BigInt::from(3) << 2000usize;
        let r = Rational::new(big.clone(), big * 4);
        assert_eq!(rational_to_f64(&r), 0.25);
        let tiny = Rational::new(BigInt::from(1), BigInt::from(3) << 1100usize);
        assert_eq!(rational_to_f64(&tiny), 0.0);
    }
}
