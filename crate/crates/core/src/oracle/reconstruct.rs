//! The full group integral rebuilt from an exact series by summing over
//! permutations of the `lambda` eigenvalues.

use std::fmt;
use std::str::FromStr;

use num::complex::Complex64;

use crate::edge::{permutation_sign, permutations};
use crate::error::{HizError, Result};
use crate::oracle::det::vandermonde;
use crate::pde::even_beta_of_y;
use crate::point::SpectralPoint;
use crate::rational::Rational;
use crate::series::ChiSeries;

/// Weight attached to each permutation in the symmetrised sum.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PermutationWeights {
    /// `sign(sigma)^(beta/2 mod 2)`.
    #[default]
    Canonical,
    /// `sign(sigma)` for every beta.
    Sign,
    /// `+1` for every beta.
    Plus,
}

impl PermutationWeights {
    pub fn weight(&self, perm: &[usize], beta: u32) -> f64 {
        let sign = permutation_sign(perm) as f64;
        match self {
            Self::Canonical if (beta / 2) % 2 == 1 => sign,
            Self::Canonical | Self::Plus => 1.0,
            Self::Sign => sign,
        }
    }
}

impl fmt::Display for PermutationWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Canonical => "canonical",
            Self::Sign => "sign",
            Self::Plus => "plus",
        })
    }
}

impl FromStr for PermutationWeights {
    type Err = HizError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "canonical" => Ok(Self::Canonical),
            "sign" => Ok(Self::Sign),
            "plus" => Ok(Self::Plus),
            _ => Err(HizError::Parse(format!("unknown permutation weights '{s}'"))),
        }
    }
}

/// `sum_sigma w(sigma) exp(i sum_a lambda_sigma(a) x_a) chi(x, lambda o sigma)
/// / (Delta(x) Delta(lambda))^(beta/2)`, without absolute normalisation.
pub fn reconstruct_full_integral(
    series: &ChiSeries,
    y: &Rational,
    pt: &SpectralPoint,
    weights: PermutationWeights,
) -> Result<Complex64> {
    if pt.k() != series.k() {
        return Err(HizError::MismatchedK { left: series.k(), right: pt.k() });
    }
    reconstruct_f64(series, y, &pt.x_f64(), &pt.lambda_f64(), weights)
}

/// As [`reconstruct_full_integral`] at floating-point spectral data.
pub fn reconstruct_f64(
    series: &ChiSeries,
    y: &Rational,
    x: &[f64],
    lambda: &[f64],
    weights: PermutationWeights,
) -> Result<Complex64> {
    let k = series.k();
    if x.len() != k || lambda.len() != k {
        return Err(HizError::MismatchedK { left: k, right: x.len() });
    }
    let beta = even_beta_of_y(y)
        .ok_or_else(|| HizError::InvalidArgument("reconstruction needs an even beta".into()))?;
    let denom = (vandermonde(x) * vandermonde(lambda)).powi(beta as i32 / 2);
    if denom == 0.0 {
        return Err(HizError::CoincidentEigenvalues("Vandermonde vanishes".into()));
    }
    let mut total = Complex64::new(0.0, 0.0);
    for perm in permutations(k) {
        let l: Vec<f64> = perm.iter().map(|&p| lambda[p]).collect();
        let phase: f64 = l.iter().zip(x).map(|(a, b)| a * b).sum();
        let chi = series.eval_f64(x, &l, y);
        total += weights.weight(&perm, beta) * Complex64::new(0.0, phase).exp() * chi;
    }
    let value = total / denom;
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(HizError::NonFinite("reconstruction".into()));
    }
    Ok(value)
}
