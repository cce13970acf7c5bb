//! Haar-distributed elements of O(k), U(k) and Sp(k).
//!
//! Columns of a Gaussian matrix are orthonormalised by Gram-Schmidt with
//! positive real norms, which is the QR factorisation with a positive
//! diagonal and therefore exactly Haar distributed.

use std::fmt;
use std::str::FromStr;

use num::complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::quaternion::Quaternion;
use crate::error::HizError;

/// Scalars of the three classical groups.
pub trait Scalar: Copy + std::fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn from_real(r: f64) -> Self;
    fn conj(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, s: f64) -> Self;
    fn norm_sqr(&self) -> f64;
    /// Real part (half the trace of the 2x2 complex form for quaternions).
    fn re(&self) -> f64;
    fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_real(r: f64) -> Self {
        r
    }
    fn conj(&self) -> Self {
        *self
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, s: f64) -> Self {
        self * s
    }
    fn norm_sqr(&self) -> f64 {
        self * self
    }
    fn re(&self) -> f64 {
        *self
    }
    fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn from_real(r: f64) -> Self {
        Complex64::new(r, 0.0)
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, s: f64) -> Self {
        self * s
    }
    fn norm_sqr(&self) -> f64 {
        Complex64::norm_sqr(self)
    }
    fn re(&self) -> f64 {
        self.re
    }
    fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    }
}

impl Scalar for Quaternion {
    fn zero() -> Self {
        Quaternion::ZERO
    }
    fn from_real(r: f64) -> Self {
        Quaternion::real(r)
    }
    fn conj(&self) -> Self {
        Quaternion::conj(self)
    }
    fn add(&self, o: &Self) -> Self {
        *self + *o
    }
    fn sub(&self, o: &Self) -> Self {
        *self - *o
    }
    fn mul(&self, o: &Self) -> Self {
        *self * *o
    }
    fn scale(&self, s: f64) -> Self {
        Quaternion::scale(self, s)
    }
    fn norm_sqr(&self) -> f64 {
        Quaternion::norm_sqr(self)
    }
    fn re(&self) -> f64 {
        self.a
    }
    fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Quaternion::gaussian(rng)
    }
}

/// Square matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    pub k: usize,
    pub data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn identity(k: usize) -> Self {
        Self::diagonal(&vec![1.0; k])
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let k = d.len();
        let mut data = vec![S::zero(); k * k];
        for (a, v) in d.iter().enumerate() {
            data[a * k + a] = S::from_real(*v);
        }
        Self { k, data }
    }

    pub fn at(&self, r: usize, c: usize) -> S {
        self.data[r * self.k + c]
    }

    pub fn mul(&self, o: &Self) -> Self {
        let k = self.k;
        let mut data = vec![S::zero(); k * k];
        for r in 0..k {
            for c in 0..k {
                let mut s = S::zero();
                for j in 0..k {
                    s = s.add(&self.at(r, j).mul(&o.at(j, c)));
                }
                data[r * k + c] = s;
            }
        }
        Self { k, data }
    }

    pub fn adjoint(&self) -> Self {
        let k = self.k;
        let mut data = vec![S::zero(); k * k];
        for r in 0..k {
            for c in 0..k {
                data[c * k + r] = self.at(r, c).conj();
            }
        }
        Self { k, data }
    }

    /// Largest entry modulus of `M^dagger M - 1`.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.adjoint().mul(self);
        let mut worst: f64 = 0.0;
        for r in 0..self.k {
            for c in 0..self.k {
                let target = if r == c { S::from_real(1.0) } else { S::zero() };
                worst = worst.max(p.at(r, c).sub(&target).norm_sqr().sqrt());
            }
        }
        worst
    }

    /// Haar-distributed element from Gram-Schmidt on Gaussian columns.
    pub fn haar<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Self {
        let mut cols: Vec<Vec<S>> = Vec::with_capacity(k);
        while cols.len() < k {
            let mut v: Vec<S> = (0..k).map(|_| S::gaussian(rng)).collect();
            // two passes keep the basis orthonormal to round-off
            for _ in 0..2 {
                for u in &cols {
                    let c = u.iter().zip(&v).fold(S::zero(), |s, (ui, vi)| s.add(&ui.conj().mul(vi)));
                    for (vi, ui) in v.iter_mut().zip(u) {
                        *vi = vi.sub(&ui.mul(&c));
                    }
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                continue;
            }
            cols.push(v.iter().map(|z| z.scale(1.0 / norm)).collect());
        }
        let mut data = vec![S::zero(); k * k];
        for (c, col) in cols.iter().enumerate() {
            for (r, v) in col.iter().enumerate() {
                data[r * k + c] = *v;
            }
        }
        Self { k, data }
    }

    /// `Re tr(Lambda g X g^dagger)` for diagonal `Lambda` and Hermitian `X`.
    pub fn trace_phase_general(&self, x: &Self, lambda: &[f64]) -> f64 {
        let gx = self.mul(x);
        let mut total = 0.0;
        for (a, l) in lambda.iter().enumerate() {
            let mut d = S::zero();
            for c in 0..self.k {
                d = d.add(&gx.at(a, c).mul(&self.at(a, c).conj()));
            }
            total += l * d.re();
        }
        total
    }

    /// `tr(Lambda g X g^-1) = sum_ab lambda_a x_b |g_ab|^2` for diagonal `X`.
    pub fn trace_phase(&self, x: &[f64], lambda: &[f64]) -> f64 {
        let mut total = 0.0;
        for (a, l) in lambda.iter().enumerate() {
            for (b, xb) in x.iter().enumerate() {
                total += l * xb * self.at(a, b).norm_sqr();
            }
        }
        total
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ensemble {
    Orthogonal,
    Unitary,
    Symplectic,
}

impl Ensemble {
    pub fn beta(&self) -> u32 {
        match self {
            Self::Orthogonal => 1,
            Self::Unitary => 2,
            Self::Symplectic => 4,
        }
    }

    pub fn from_beta(beta: u32) -> Option<Self> {
        match beta {
            1 => Some(Self::Orthogonal),
            2 => Some(Self::Unitary),
            4 => Some(Self::Symplectic),
            _ => None,
        }
    }
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Orthogonal => "orthogonal",
            Self::Unitary => "unitary",
            Self::Symplectic => "symplectic",
        })
    }
}

impl FromStr for Ensemble {
    type Err = HizError;
    fn from_str(s: &str) -> Result<Self, HizError> {
        match s.to_ascii_lowercase().as_str() {
            "o" | "orthogonal" => Ok(Self::Orthogonal),
            "u" | "unitary" => Ok(Self::Unitary),
            "s" | "sp" | "symplectic" => Ok(Self::Symplectic),
            _ => Err(HizError::Parse(format!("unknown ensemble {s:?}"))),
        }
    }
}

/// One Haar draw from the ensemble's group.
#[derive(Clone, Debug, PartialEq)]
pub enum HaarSample {
    Orthogonal(Matrix<f64>),
    Unitary(Matrix<Complex64>),
    Symplectic(Matrix<Quaternion>),
}

pub const UNITARITY_TOLERANCE: f64 = 1e-12;

impl HaarSample {
    pub fn draw<R: Rng + ?Sized>(ensemble: Ensemble, k: usize, rng: &mut R) -> Self {
        match ensemble {
            Ensemble::Orthogonal => Self::Orthogonal(Matrix::haar(k, rng)),
            Ensemble::Unitary => Self::Unitary(Matrix::haar(k, rng)),
            Ensemble::Symplectic => Self::Symplectic(Matrix::haar(k, rng)),
        }
    }

    pub fn ensemble(&self) -> Ensemble {
        match self {
            Self::Orthogonal(_) => Ensemble::Orthogonal,
            Self::Unitary(_) => Ensemble::Unitary,
            Self::Symplectic(_) => Ensemble::Symplectic,
        }
    }

    pub fn k(&self) -> usize {
        match self {
            Self::Orthogonal(m) => m.k,
            Self::Unitary(m) => m.k,
            Self::Symplectic(m) => m.k,
        }
    }

    pub fn unitarity_defect(&self) -> f64 {
        match self {
            Self::Orthogonal(m) => m.unitarity_defect(),
            Self::Unitary(m) => m.unitarity_defect(),
            Self::Symplectic(m) => m.unitarity_defect(),
        }
    }

    pub fn trace_phase(&self, x: &[f64], lambda: &[f64]) -> f64 {
        match self {
            Self::Orthogonal(m) => m.trace_phase(x, lambda),
            Self::Unitary(m) => m.trace_phase(x, lambda),
            Self::Symplectic(m) => m.trace_phase(x, lambda),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::mc::{mc_mean, McConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for e in [Ensemble::Orthogonal, Ensemble::Unitary, Ensemble::Symplectic] {
            for k in 1..=5 {
                for _ in 0..50 {
                    let g = HaarSample::draw(e, k, &mut rng);
                    assert!(g.unitarity_defect() < UNITARITY_TOLERANCE, "{e} k={k}");
                }
            }
        }
    }

    #[test]
    fn diagonal_phase_matches_general_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x = [0.3, -1.2, 2.0];
        let l = [1.0, 0.5, -0.7];
        let g: Matrix<Quaternion> = Matrix::haar(3, &mut rng);
        let a = g.trace_phase(&x, &l);
        let b = g.trace_phase_general(&Matrix::diagonal(&x), &l);
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn second_moments_of_entries() {
        // E|g_11|^2 = 1/k for every ensemble
        let k = 3;
        for e in [Ensemble::Orthogonal, Ensemble::Unitary, Ensemble::Symplectic] {
            let cfg = McConfig::new(40_000, 12).unwrap();
            let est = mc_mean(&cfg, |rng| {
                let g = HaarSample::draw(e, k, rng);
                Complex64::new(g.trace_phase(&[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0]), 0.0)
            });
            assert!((est.mean.re - 1.0 / k as f64).abs() < 4.0 * est.std_error, "{e}");
        }
    }

    #[test]
    fn fourth_moment_distinguishes_ensembles() {
        // E|g_11|^4 = 3/(k(k+2)), 2/(k(k+1)), 3/(k(2k+1)) for beta = 1, 2, 4
        let k = 2.0;
        for (e, expect) in [
            (Ensemble::Orthogonal, 3.0 / (k * (k + 2.0))),
            (Ensemble::Unitary, 2.0 / (k * (k + 1.0))),
            (Ensemble::Symplectic, 3.0 / (k * (2.0 * k + 1.0))),
        ] {
            let cfg = McConfig::new(100_000, 21).unwrap();
            let est = mc_mean(&cfg, |rng| {
                let g = HaarSample::draw(e, 2, rng);
                let p = g.trace_phase(&[1.0, 0.0], &[1.0, 0.0]);
                Complex64::new(p * p, 0.0)
            });
            assert!((est.mean.re - expect).abs() < 4.0 * est.std_error, "{e}: {} vs {expect}", est.mean.re);
        }
    }

    #[test]
    fn ensemble_names() {
        assert_eq!("u".parse::<Ensemble>().unwrap(), Ensemble::Unitary);
        assert_eq!("Symplectic".parse::<Ensemble>().unwrap(), Ensemble::Symplectic);
        assert!("x".parse::<Ensemble>().is_err());
        assert_eq!(Ensemble::from_beta(4), Some(Ensemble::Symplectic));
    }
}
