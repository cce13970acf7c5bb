//! The unitary group integral in closed form:
//! `c_k det(exp(i x_a lambda_b)) / (Delta(x) Delta(lambda))`.

use num::complex::Complex64;

use crate::error::{HizError, Result};
use crate::point::SpectralPoint;

/// `c_k = (prod_{p=1..k-1} p!) i^(-k(k-1)/2)`, fixed by the limit `Lambda -> 0` being 1.
pub fn unitary_normalization(k: usize) -> Complex64 {
    let mut c = 1.0;
    let mut fact = 1.0;
    for p in 1..k {
        fact *= p as f64;
        c *= fact;
    }
    let quarter_turns = (k * k.saturating_sub(1) / 2) % 4;
    // i^-n
    let phase = match quarter_turns {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    };
    phase * c
}

/// Determinant by LU decomposition with partial pivoting.
pub fn complex_det(mut m: Vec<Vec<Complex64>>) -> Complex64 {
    let n = m.len();
    let mut det = Complex64::new(1.0, 0.0);
    for c in 0..n {
        let p = (c..n)
            .max_by(|a, b| m[*a][c].norm().total_cmp(&m[*b][c].norm()))
            .expect("non-empty column");
        if m[p][c].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= m[c][c];
        let (top, rest) = m.split_at_mut(c + 1);
        let pivot = &top[c];
        for row in rest.iter_mut() {
            let f = row[c] / pivot[c];
            for (v, p) in row[c..n].iter_mut().zip(&pivot[c..n]) {
                *v -= f * p;
            }
        }
    }
    det
}

/// `prod_{a<b} (v_a - v_b)`.
pub fn vandermonde(v: &[f64]) -> f64 {
    let mut d = 1.0;
    for a in 0..v.len() {
        for b in a + 1..v.len() {
            d *= v[a] - v[b];
        }
    }
    d
}

/// The normalised unitary integral at `pt`.
pub fn hciz_unitary_det(pt: &SpectralPoint) -> Result<Complex64> {
    hciz_unitary_det_f64(&pt.x_f64(), &pt.lambda_f64())
}

pub fn hciz_unitary_det_f64(x: &[f64], lambda: &[f64]) -> Result<Complex64> {
    let k = x.len();
    let denom = vandermonde(x) * vandermonde(lambda);
    if denom == 0.0 {
        return Err(HizError::CoincidentEigenvalues("Vandermonde vanishes".into()));
    }
    let m: Vec<Vec<Complex64>> = x
        .iter()
        .map(|xa| lambda.iter().map(|lb| Complex64::new(0.0, xa * lb).exp()).collect())
        .collect();
    let value = unitary_normalization(k) * complex_det(m) / denom;
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(HizError::NonFinite("determinant formula".into()));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_point() {
        let v = hciz_unitary_det_f64(&[2.0], &[0.7]).unwrap();
        assert!((v - Complex64::new(0.0, 1.4).exp()).norm() < 1e-15);
    }

    #[test]
    fn small_lambda_limit_is_one() {
        for (x, l) in [
            (vec![1.0, -1.0], vec![1.0, -1.0]),
            (vec![0.0, 1.0, 3.0], vec![0.5, -1.0, 2.0]),
            (vec![0.0, 1.0, 3.0, -2.0], vec![0.5, -1.0, 2.0, 1.5]),
        ] {
            let t = 1e-3;
            let ls: Vec<f64> = l.iter().map(|v| v * t).collect();
            let v = hciz_unitary_det_f64(&x, &ls).unwrap();
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-2, "k={}: {v}", x.len());
        }
    }

    #[test]
    fn two_point_closed_form() {
        // x = (1, -1), lambda = (t, -t): c_2 2i sin(2t) / (4t)
        let t = 0.37;
        let v = hciz_unitary_det_f64(&[1.0, -1.0], &[t, -t]).unwrap();
        let expect = Complex64::new(0.0, -1.0) * Complex64::new(0.0, 2.0 * (2.0 * t).sin()) / (4.0 * t);
        assert!((v - expect).norm() < 1e-14);
    }

    #[test]
    fn coincident_is_an_error() {
        assert!(hciz_unitary_det_f64(&[1.0, 1.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn determinant_of_known_matrix() {
        let m = vec![
            vec![Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.0)],
            vec![Complex64::new(0.0, -1.0), Complex64::new(3.0, 0.0)],
        ];
        assert!((complex_det(m) - Complex64::new(5.0, 0.0)).norm() < 1e-14);
    }
}
