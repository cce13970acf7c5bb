//! Spectral points: the eigenvalues `x` and `lambda` at which series and
//! operators are evaluated.

use num::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::edge::EdgeIndex;
use crate::error::{HizError, Result};
use crate::rational::{int, to_f64, Rational};

/// Two lists of `k` rationals, pairwise distinct within each list, so every
/// `tau_ab = (lambda_a - lambda_b)(x_a - x_b)` is non-zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralPoint {
    x: Vec<Rational>,
    lambda: Vec<Rational>,
}

impl SpectralPoint {
    pub fn new(x: Vec<Rational>, lambda: Vec<Rational>) -> Result<Self> {
        if x.len() != lambda.len() {
            return Err(HizError::MismatchedK { left: x.len(), right: lambda.len() });
        }
        if x.is_empty() {
            return Err(HizError::InvalidArgument("empty spectral point".into()));
        }
        for (name, list) in [("x", &x), ("lambda", &lambda)] {
            for i in 0..list.len() {
                for j in i + 1..list.len() {
                    if list[i] == list[j] {
                        return Err(HizError::CoincidentEigenvalues(format!(
                            "{name}[{}] == {name}[{}] == {}",
                            i + 1,
                            j + 1,
                            list[i]
                        )));
                    }
                }
            }
        }
        Ok(Self { x, lambda })
    }

    pub fn from_ints(x: &[i64], lambda: &[i64]) -> Result<Self> {
        Self::new(x.iter().map(|v| int(*v)).collect(), lambda.iter().map(|v| int(*v)).collect())
    }

    /// Integers drawn uniformly from `[-bound, bound]`, redrawn until valid.
    pub fn random_int<R: Rng + ?Sized>(rng: &mut R, k: usize, bound: i64) -> Self {
        loop {
            let x: Vec<i64> = (0..k).map(|_| rng.random_range(-bound..=bound)).collect();
            let l: Vec<i64> = (0..k).map(|_| rng.random_range(-bound..=bound)).collect();
            if let Ok(p) = Self::from_ints(&x, &l) {
                return p;
            }
        }
    }

    pub fn k(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[Rational] {
        &self.x
    }

    pub fn lambda(&self) -> &[Rational] {
        &self.lambda
    }

    pub fn x_diff(&self, e: EdgeIndex) -> Rational {
        let (a, b) = e.ends0();
        &self.x[a] - &self.x[b]
    }

    pub fn lambda_diff(&self, e: EdgeIndex) -> Rational {
        let (a, b) = e.ends0();
        &self.lambda[a] - &self.lambda[b]
    }

    pub fn tau(&self, e: EdgeIndex) -> Rational {
        self.x_diff(e) * self.lambda_diff(e)
    }

    /// Same `x`, eigenvalues `lambda` permuted: `lambda'_a = lambda_{perm[a]}`.
    pub fn permute_lambda(&self, perm: &[usize]) -> Self {
        Self { x: self.x.clone(), lambda: perm.iter().map(|&p| self.lambda[p].clone()).collect() }
    }

    /// `x -> s x` (tau scales by `s`).
    pub fn scale_x(&self, s: &Rational) -> Result<Self> {
        if s.is_zero() {
            return Err(HizError::InvalidArgument("zero scale".into()));
        }
        Ok(Self { x: self.x.iter().map(|v| v * s).collect(), lambda: self.lambda.clone() })
    }

    pub fn x_f64(&self) -> Vec<f64> {
        self.x.iter().map(to_f64).collect()
    }

    pub fn lambda_f64(&self) -> Vec<f64> {
        self.lambda.iter().map(to_f64).collect()
    }
}
