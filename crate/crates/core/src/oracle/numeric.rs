//! Floating-point mirror of the exact operator application.

use num::complex::Complex64;

use crate::edge::edges;
use crate::error::{HizError, Result};
use crate::point::SpectralPoint;
use crate::rational::{to_f64, Rational};
use crate::series::ChiSeries;

/// `L chi` at real `(x, lambda)` in double precision.
pub fn pde_apply_f64(s: &ChiSeries, y: &Rational, x: &[f64], lambda: &[f64]) -> Result<Complex64> {
    let k = s.k();
    if x.len() != k || lambda.len() != k {
        return Err(HizError::MismatchedK { left: k, right: x.len() });
    }
    let es = edges(k);
    let mut w = Vec::with_capacity(es.len());
    let mut q = Vec::with_capacity(es.len());
    let mut dx_inv = Vec::with_capacity(es.len());
    for e in &es {
        let (a, b) = e.ends0();
        let (dx, dl) = (x[a] - x[b], lambda[a] - lambda[b]);
        if dx == 0.0 || dl == 0.0 {
            return Err(HizError::CoincidentEigenvalues(format!("edge {e}")));
        }
        w.push(1.0 / (dx * dl));
        q.push(dl / dx);
        dx_inv.push(1.0 / dx);
    }
    let yf = to_f64(y);
    let mut total = Complex64::new(0.0, 0.0);
    for (m, c) in s.terms() {
        let coeff = to_f64(&c.eval(y));
        let dense = m.to_dense(k);
        let mut mono = 1.0;
        let (mut s1, mut s2) = (0.0, 0.0);
        let mut g = vec![0.0; k];
        for (i, &n) in dense.iter().enumerate() {
            s2 += (2.0 * n as f64 - yf) * dx_inv[i] * dx_inv[i];
            if n == 0 {
                continue;
            }
            mono *= w[i].powi(n as i32);
            s1 += n as f64 * q[i];
            let (a, b) = es[i].ends0();
            g[a] -= n as f64 * dx_inv[i];
            g[b] += n as f64 * dx_inv[i];
        }
        let a_val = -mono * s1;
        let b_val = mono * (g.iter().map(|v| v * v).sum::<f64>() + s2);
        let phase = Complex64::new(0.0, 1.0).powu(m.degree());
        total += phase * coeff * Complex64::new(b_val, 2.0 * a_val);
    }
    if !total.re.is_finite() || !total.im.is_finite() {
        return Err(HizError::NonFinite("operator value".into()));
    }
    Ok(total)
}

/// `L chi` at a spectral point in double precision.
pub fn pde_residual_numeric(s: &ChiSeries, y: &Rational, pt: &SpectralPoint) -> Result<Complex64> {
    pde_apply_f64(s, y, &pt.x_f64(), &pt.lambda_f64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::pde_apply;
    use crate::rational::{int, rat};
    use crate::recursion::chi_k3;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_solution_has_float_noise_only() {
        let s = chi_k3(Some(&int(4)), 3);
        let pt = SpectralPoint::from_ints(&[0, 1, 3], &[0, 1, 2]).unwrap();
        assert!(pde_residual_numeric(&s, &int(4), &pt).unwrap().norm() < 1e-10);
    }

    #[test]
    fn constant_series_gives_potential() {
        let pt = SpectralPoint::from_ints(&[0, 1, 3], &[0, 1, 2]).unwrap();
        let v = pde_residual_numeric(&ChiSeries::one(3, 0), &int(4), &pt).unwrap();
        let expect = -49.0 / 9.0;
        assert!((v.re - expect).abs() < 1e-12 * expect.abs());
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn agrees_with_exact_application() {
        // a series applied at the wrong y, so the values are of order one
        let s = chi_k3(Some(&rat(3, 2)), 5);
        let y = int(5);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let pt = SpectralPoint::random_int(&mut rng, 3, 20);
            let exact = pde_apply(&s, &pt, &y).unwrap().to_f64_pair();
            let exact = Complex64::new(exact.0, exact.1);
            let float = pde_residual_numeric(&s, &y, &pt).unwrap();
            assert!((exact - float).norm() <= 1e-9 * exact.norm(), "{exact} vs {float}");
        }
    }

    #[test]
    fn truncated_series_residual_scales_with_order() {
        // order 6 leaves a piece homogeneous of degree -8 in x
        let y = rat(3, 2);
        let s = chi_k3(Some(&y), 6);
        let (x, l) = ([0.0, 1.3, -2.1], [0.0, 1.0, 2.5]);
        let at = |scale: f64| {
            let xs: Vec<f64> = x.iter().map(|v| v * scale).collect();
            pde_apply_f64(&s, &y, &xs, &l).unwrap().norm()
        };
        let (r1, r2) = (at(40.0), at(80.0));
        let slope = (r2 / r1).log2();
        assert!((slope + 8.0).abs() < 1e-6, "slope {slope}");
    }
}
