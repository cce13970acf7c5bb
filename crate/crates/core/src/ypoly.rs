//! Polynomials in the symmetry parameter `y = beta(beta/2 - 1)`.

use num::{BigInt, One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::Result;
use crate::rational::{int, parse_rational, to_fraction_string, Rational};

/// Dense polynomial in `y` with exact rational coefficients; index = power.
///
/// Trailing zeros are never stored, so the zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct YPolynomial {
    coeffs: Vec<Rational>,
}

impl YPolynomial {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The monomial `y`.
    pub fn y() -> Self {
        Self::from_coeffs(vec![Rational::zero(), Rational::one()])
    }

    /// `c0 + c1 y` with both coefficients rational.
    pub fn linear(c0: Rational, c1: Rational) -> Self {
        Self::from_coeffs(vec![c0, c1])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `y^power` (zero beyond the degree).
    pub fn coeff(&self, power: usize) -> Rational {
        self.coeffs.get(power).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Self::from_coeffs(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Multiplies by `y^shift`.
    pub fn shift(&self, shift: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); shift];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    /// Exact Horner evaluation.
    pub fn eval(&self, y: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * y + c)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Exact division by `(y - root)`; returns `None` if the remainder is non-zero.
    pub fn divide_by_root(&self, root: &Rational) -> Option<Self> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        let n = self.coeffs.len();
        let mut quotient = vec![Rational::zero(); n - 1];
        let mut carry = Rational::zero();
        for i in (0..n).rev() {
            let v = &self.coeffs[i] + &carry * root;
            if i == 0 {
                if !v.is_zero() {
                    return None;
                }
            } else {
                quotient[i - 1] = v.clone();
            }
            carry = v;
        }
        Some(Self::from_coeffs(quotient))
    }

    /// Splits off the two-point factors `(-(l-1) + y/(2l))` with their
    /// multiplicities, returning `(factors, remainder)` with
    /// `self = prod_l factor_l^mult * remainder`. Only factors with
    /// `l <= max_l` are tried.
    pub fn split_two_point_factors(&self, max_l: u32) -> (Vec<(u32, u32)>, YPolynomial) {
        let mut rest = self.clone();
        let mut out = Vec::new();
        if rest.is_zero() {
            return (out, rest);
        }
        for l in 1..=max_l {
            // -(l-1) + y/(2l) vanishes at y = 2l(l-1)
            let root = int(2 * l as i64 * (l as i64 - 1));
            let mut mult = 0;
            while let Some(q) = rest.divide_by_root(&root) {
                // rest = (y - root) q = factor_l * (2l q)
                rest = q.scale(&int(2 * l as i64));
                mult += 1;
            }
            if mult > 0 {
                out.push((l, mult));
            }
        }
        (out, rest)
    }

    /// Text form with factored two-point prefactors, e.g.
    /// `(y/2)^2(-1+y/4)^2(-6+3y/2+y^2/8)`.
    pub fn to_factored_string(&self) -> String {
        let (factors, rest) = self.split_two_point_factors(16);
        if factors.is_empty() {
            return self.to_string();
        }
        let mut s = String::new();
        for (l, mult) in factors {
            s.push('(');
            s.push_str(&two_point_factor(l).to_string());
            s.push(')');
            if mult > 1 {
                s.push_str(&format!("^{mult}"));
            }
        }
        if rest != YPolynomial::one() {
            s.push('(');
            s.push_str(&rest.to_string());
            s.push(')');
        }
        s
    }

    pub fn to_fraction_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(to_fraction_string).collect()
    }

    pub fn from_fraction_strings<S: AsRef<str>>(items: &[S]) -> Result<Self> {
        let coeffs = items
            .iter()
            .map(|s| parse_rational(s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_coeffs(coeffs))
    }
}

/// `-(l-1) + y/(2l)`, the l-th factor of the two-point weight.
pub fn two_point_factor(l: u32) -> YPolynomial {
    let l = l as i64;
    YPolynomial::linear(int(-(l - 1)), Rational::new(BigInt::one(), BigInt::from(2 * l)))
}

impl From<Rational> for YPolynomial {
    fn from(c: Rational) -> Self {
        Self::constant(c)
    }
}

impl From<i64> for YPolynomial {
    fn from(c: i64) -> Self {
        Self::constant(int(c))
    }
}

impl Add for &YPolynomial {
    type Output = YPolynomial;
    fn add(self, rhs: &YPolynomial) -> YPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        YPolynomial::from_coeffs((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Add for YPolynomial {
    type Output = YPolynomial;
    fn add(self, rhs: YPolynomial) -> YPolynomial {
        &self + &rhs
    }
}

impl AddAssign<&YPolynomial> for YPolynomial {
    fn add_assign(&mut self, rhs: &YPolynomial) {
        if self.coeffs.len() < rhs.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), Rational::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }
}

impl Sub for &YPolynomial {
    type Output = YPolynomial;
    fn sub(self, rhs: &YPolynomial) -> YPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        YPolynomial::from_coeffs((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Sub for YPolynomial {
    type Output = YPolynomial;
    fn sub(self, rhs: YPolynomial) -> YPolynomial {
        &self - &rhs
    }
}

impl Neg for &YPolynomial {
    type Output = YPolynomial;
    fn neg(self) -> YPolynomial {
        YPolynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for YPolynomial {
    type Output = YPolynomial;
    fn neg(self) -> YPolynomial {
        -&self
    }
}

impl Mul for &YPolynomial {
    type Output = YPolynomial;
    fn mul(self, rhs: &YPolynomial) -> YPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return YPolynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        YPolynomial::from_coeffs(out)
    }
}

impl Mul for YPolynomial {
    type Output = YPolynomial;
    fn mul(self, rhs: YPolynomial) -> YPolynomial {
        &self * &rhs
    }
}

impl fmt::Display for YPolynomial {
    /// Ascending powers without spaces: `-48-8y+19y^2/24+y^3/48`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (power, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            if neg {
                write!(f, "-")?;
            } else if !first {
                write!(f, "+")?;
            }
            first = false;
            let num = c.numer().abs();
            let den = c.denom();
            let ypart = match power {
                0 => String::new(),
                1 => "y".to_string(),
                p => format!("y^{p}"),
            };
            if power == 0 {
                write!(f, "{num}")?;
            } else if num.is_one() {
                write!(f, "{ypart}")?;
            } else {
                write!(f, "{num}{ypart}")?;
            }
            if !den.is_one() {
                write!(f, "/{den}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for YPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_fraction_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for YPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let items: Vec<String> = Vec::deserialize(d)?;
        YPolynomial::from_fraction_strings(&items).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn half_y() -> YPolynomial {
        YPolynomial::linear(int(0), rat(1, 2))
    }

    #[test]
    fn evaluates_two_point_weights() {
        assert_eq!(half_y().eval(&int(4)), int(2));
        let double = &half_y() * &two_point_factor(2);
        assert_eq!(double.eval(&int(4)), int(0));
        assert_eq!(double.eval(&int(12)), int(12));
    }

    #[test]
    fn display_matches_compact_form() {
        let p = YPolynomial::from_coeffs(vec![int(-6), rat(3, 2), rat(1, 8)]);
        assert_eq!(p.to_string(), "-6+3y/2+y^2/8");
        assert_eq!(YPolynomial::zero().to_string(), "0");
        assert_eq!(two_point_factor(1).to_string(), "y/2");
        assert_eq!(two_point_factor(3).to_string(), "-2+y/6");
        let q = YPolynomial::from_coeffs(vec![int(0), rat(-59, 8)]);
        assert_eq!(q.to_string(), "-59y/8");
    }

    #[test]
    fn factored_form_recovers_prefactors() {
        let cubic = YPolynomial::from_coeffs(vec![int(-6), rat(3, 2), rat(1, 8)]);
        let p = &(&half_y().pow(2) * &two_point_factor(2).pow(2)) * &cubic;
        assert_eq!(p.to_factored_string(), "(y/2)^2(-1+y/4)^2(-6+3y/2+y^2/8)");
        assert_eq!(YPolynomial::one().to_factored_string(), "1");
    }

    #[test]
    fn divide_by_root_rejects_non_roots() {
        let p = YPolynomial::from_coeffs(vec![int(1), int(1)]);
        assert!(p.divide_by_root(&int(1)).is_none());
        assert_eq!(p.divide_by_root(&int(-1)).unwrap(), YPolynomial::one());
    }

    fn small_poly() -> impl Strategy<Value = YPolynomial> {
        prop::collection::vec((-9i64..10, 1i64..5), 0..4).prop_map(|cs| {
            YPolynomial::from_coeffs(cs.into_iter().map(|(n, d)| rat(n, d)).collect())
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in small_poly(), b in small_poly(), c in small_poly()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn eval_is_a_ring_homomorphism(a in small_poly(), b in small_poly(), n in -5i64..6, d in 1i64..4) {
            let y = rat(n, d);
            prop_assert_eq!((&a * &b).eval(&y), a.eval(&y) * b.eval(&y));
            prop_assert_eq!((&a + &b).eval(&y), a.eval(&y) + b.eval(&y));
        }

        #[test]
        fn fraction_strings_round_trip(a in small_poly()) {
            let back = YPolynomial::from_fraction_strings(&a.to_fraction_strings()).unwrap();
            prop_assert_eq!(back, a);
        }
    }
}
