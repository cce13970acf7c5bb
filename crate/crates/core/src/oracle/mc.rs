//! Seeded, batched Monte Carlo means with standard errors.

use num::complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::haar::{Ensemble, HaarSample};
use crate::error::{HizError, Result};
use crate::point::SpectralPoint;

pub const MIN_SAMPLES: u64 = 1000;
const BATCH: u64 = 8192;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Result<Self> {
        if samples < MIN_SAMPLES {
            return Err(HizError::InsufficientSamples(format!(
                "{samples} samples requested, at least {MIN_SAMPLES} needed"
            )));
        }
        Ok(Self { samples, seed })
    }
}

/// Mean of a complex observable with its standard error
/// `sqrt(sum |z - mean|^2 / (n - 1)) / sqrt(n)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub mean: Complex64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Running moments of a complex sample, merged pairwise.
#[derive(Clone, Copy, Debug, Default)]
struct Moments {
    n: u64,
    mean: Complex64,
    /// sum of |z - mean|^2
    m2: f64,
}

impl Moments {
    fn push(&mut self, z: Complex64) {
        self.n += 1;
        let delta = z - self.mean;
        self.mean += delta / self.n as f64;
        let delta2 = z - self.mean;
        self.m2 += delta.re * delta2.re + delta.im * delta2.im;
    }

    fn merge(self, other: Self) -> Self {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let w = other.n as f64 / n as f64;
        Self {
            n,
            mean: self.mean + delta * w,
            m2: self.m2 + other.m2 + delta.norm_sqr() * self.n as f64 * w,
        }
    }
}

fn batch_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    rng
}

/// Parallel mean of `f` over `cfg.samples` draws; batch `b` uses stream `b`
/// of the seeded generator, so results do not depend on the thread count.
pub fn mc_mean<F>(cfg: &McConfig, f: F) -> MCEstimate
where
    F: Fn(&mut ChaCha8Rng) -> Complex64 + Sync,
{
    let batches = cfg.samples.div_ceil(BATCH);
    let moments = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = batch_rng(cfg.seed, b);
            let count = BATCH.min(cfg.samples - b * BATCH);
            let mut m = Moments::default();
            for _ in 0..count {
                m.push(f(&mut rng));
            }
            m
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Moments::default(), Moments::merge);
    let var = if moments.n > 1 { moments.m2 / (moments.n - 1) as f64 } else { 0.0 };
    MCEstimate {
        mean: moments.mean,
        std_error: (var / moments.n as f64).sqrt(),
        samples: moments.n,
        seed: cfg.seed,
    }
}

/// Monte Carlo estimate of `int dg exp(i tr Lambda g X g^-1)` over the
/// Haar measure of the ensemble's group.
pub fn mc_group_integral(ensemble: Ensemble, pt: &SpectralPoint, samples: u64, seed: u64) -> Result<MCEstimate> {
    let cfg = McConfig::new(samples, seed)?;
    let (x, lambda) = (pt.x_f64(), pt.lambda_f64());
    if x.iter().chain(&lambda).any(|v| !v.is_finite()) {
        return Err(HizError::NonFinite("spectral point".into()));
    }
    let k = pt.k();
    let est = mc_mean(&cfg, |rng| {
        let g = HaarSample::draw(ensemble, k, rng);
        Complex64::new(0.0, g.trace_phase(&x, &lambda)).exp()
    });
    if !est.mean.re.is_finite() || !est.mean.im.is_finite() {
        return Err(HizError::NonFinite("Monte Carlo mean".into()));
    }
    Ok(est)
}

/// Ratio `a/b` of two estimates with a first-order standard error.
pub fn ratio(a: &MCEstimate, b: &MCEstimate) -> (Complex64, f64) {
    let r = a.mean / b.mean;
    let rel = (a.std_error / a.mean.norm()).powi(2) + (b.std_error / b.mean.norm()).powi(2);
    (r, r.norm() * rel.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn merged_moments_match_direct_computation() {
        let data: Vec<Complex64> = (0..100).map(|i| Complex64::new(i as f64, (i * i % 7) as f64)).collect();
        let mut whole = Moments::default();
        data.iter().for_each(|z| whole.push(*z));
        let (mut a, mut b) = (Moments::default(), Moments::default());
        data[..37].iter().for_each(|z| a.push(*z));
        data[37..].iter().for_each(|z| b.push(*z));
        let merged = a.merge(b);
        assert!((merged.mean - whole.mean).norm() < 1e-12);
        assert!((merged.m2 - whole.m2).abs() < 1e-8);
    }

    #[test]
    fn uniform_mean_and_error() {
        let cfg = McConfig::new(100_000, 3).unwrap();
        let est = mc_mean(&cfg, |rng| Complex64::new(rng.random::<f64>(), 0.0));
        assert!((est.mean.re - 0.5).abs() < 4.0 * est.std_error);
        // variance of U(0,1) is 1/12
        assert!((est.std_error - (1.0f64 / 12.0 / 1e5).sqrt()).abs() < 1e-4);
    }

    #[test]
    fn deterministic_for_a_seed() {
        let cfg = McConfig::new(20_000, 9).unwrap();
        let f = |rng: &mut ChaCha8Rng| Complex64::new(rng.random::<f64>(), 0.0);
        assert_eq!(mc_mean(&cfg, f), mc_mean(&cfg, f));
    }

    #[test]
    fn too_few_samples() {
        assert!(matches!(McConfig::new(999, 0), Err(HizError::InsufficientSamples(_))));
    }

    #[test]
    fn one_point_integral_is_exact() {
        let pt = SpectralPoint::from_ints(&[3], &[2]).unwrap();
        for e in [Ensemble::Orthogonal, Ensemble::Unitary, Ensemble::Symplectic] {
            let est = mc_group_integral(e, &pt, 2000, 1).unwrap();
            assert!((est.mean - Complex64::new(0.0, 6.0).exp()).norm() < 1e-12);
            assert!(est.std_error < 1e-12);
        }
    }
}
