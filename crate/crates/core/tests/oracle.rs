use hiz_core::oracle::det::hciz_unitary_det;
use hiz_core::oracle::haar::{Matrix, Scalar};
use hiz_core::oracle::mc::{mc_mean, McConfig};
use hiz_core::oracle::{mc_group_integral, Ensemble, Quaternion};
use hiz_core::SpectralPoint;
use num::complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sigma_distance(est: Complex64, reference: Complex64, se: f64) -> f64 {
    (est - reference).norm() / se
}

#[test]
fn unitary_monte_carlo_matches_determinant() {
    for (x, l) in [(vec![0, 1], vec![0, 2]), (vec![0, 1, 3], vec![0, 1, 2])] {
        let pt = SpectralPoint::from_ints(&x, &l).unwrap();
        let est = mc_group_integral(Ensemble::Unitary, &pt, 200_000, 7).unwrap();
        let exact = hciz_unitary_det(&pt).unwrap();
        assert!(sigma_distance(est.mean, exact, est.std_error) < 4.0, "k={}: {} vs {exact}", x.len(), est.mean);
    }
}

fn invariance_gap<S: Scalar>(k: usize, seed: u64) -> f64 {
    let x = [0.3, -1.1, 0.8, 2.0][..k].to_vec();
    let l = [1.0, 0.2, -0.7, 0.5][..k].to_vec();
    let h: Matrix<S> = Matrix::haar(k, &mut ChaCha8Rng::seed_from_u64(seed));
    let conjugated = h.mul(&Matrix::diagonal(&x)).mul(&h.adjoint());
    let diag = Matrix::<S>::diagonal(&x);
    let cfg = McConfig::new(10_000, seed + 1).unwrap();
    let a = mc_mean(&cfg, |rng| {
        let g: Matrix<S> = Matrix::haar(k, rng);
        Complex64::new(0.0, g.trace_phase_general(&diag, &l)).exp()
    });
    let cfg = McConfig::new(10_000, seed + 2).unwrap();
    let b = mc_mean(&cfg, |rng| {
        let g: Matrix<S> = Matrix::haar(k, rng);
        Complex64::new(0.0, g.trace_phase_general(&conjugated, &l)).exp()
    });
    (a.mean - b.mean).norm() / a.std_error.hypot(b.std_error)
}

#[test]
fn haar_measure_is_invariant_under_conjugation() {
    for k in [2, 3] {
        assert!(invariance_gap::<f64>(k, 1) < 4.0);
        assert!(invariance_gap::<Complex64>(k, 2) < 4.0);
        assert!(invariance_gap::<Quaternion>(k, 3) < 4.0);
    }
}

#[test]
fn conjugated_phase_differs_per_sample() {
    // the invariance above is a statement about the measure, not each draw
    let h: Matrix<Complex64> = Matrix::haar(3, &mut ChaCha8Rng::seed_from_u64(4));
    let x = [0.3, -1.1, 0.8];
    let conj = h.mul(&Matrix::diagonal(&x)).mul(&h.adjoint());
    let g: Matrix<Complex64> = Matrix::haar(3, &mut ChaCha8Rng::seed_from_u64(5));
    let l = [1.0, 0.2, -0.7];
    assert!((g.trace_phase_general(&conj, &l) - g.trace_phase(&x, &l)).abs() > 1e-6);
}

#[test]
fn symplectic_one_point_reduces_to_plane_wave() {
    let pt = SpectralPoint::from_ints(&[-2], &[5]).unwrap();
    let est = mc_group_integral(Ensemble::Symplectic, &pt, 1000, 3).unwrap();
    assert!((est.mean - Complex64::new(0.0, -10.0).exp()).norm() < 1e-12);
}

#[test]
fn seeds_are_recorded_and_reproducible() {
    let pt = SpectralPoint::from_ints(&[0, 1], &[0, 2]).unwrap();
    let a = mc_group_integral(Ensemble::Orthogonal, &pt, 5000, 42).unwrap();
    let b = mc_group_integral(Ensemble::Orthogonal, &pt, 5000, 42).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.seed, 42);
    assert_eq!(a.samples, 5000);
}
