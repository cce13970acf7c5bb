//! Closed-form coefficients for two and three points.
//!
//! For `k = 3` the solution is written as
//! `chi = sum i^(n+m+r) C_{n,m,r} / (tau_12^n tau_23^m tau_13^r)` and the
//! coefficients follow from a recursion in `r` at fixed `m`:
//!
//! ```text
//! C_{n,m,0} = c(n) c(m),        c(n) = prod_{l=1..n} (-(l-1) + y/(2l))
//! C_{n,m,r} = sum_{s=1..r} C_{n+s-1, m, r-s} * a_s
//! a_1 = m(n-r+1)/r - (r-1) + y/(2r),   a_s = (m/r)(n-r+2s-1)  (s >= 2)
//! ```
//!
//! Symmetry of `C` under permutations of `(n, m, r)` is not built in; it is
//! checked in the tests.

use std::collections::HashMap;

use num::Zero;

use crate::edge::{EdgeIndex, EdgeMonomial};
use crate::error::Result;
use crate::gauss::GaussRational;
use crate::point::SpectralPoint;
use crate::rational::{int, rat, to_fraction_string, Rational};
use crate::report::VerificationReport;
use crate::series::{series_exp_truncate, ChiSeries};
use crate::ypoly::{two_point_factor, YPolynomial};

/// Two-point weight `prod_{l=1..n} (-(l-1) + y/(2l))`.
pub fn c_two_point(n: u32) -> YPolynomial {
    (1..=n).fold(YPolynomial::one(), |acc, l| &acc * &two_point_factor(l))
}

/// `C_{n,m,0} = c(n) c(m)`.
pub fn c_pair(n: u32, m: u32) -> YPolynomial {
    &c_two_point(n) * &c_two_point(m)
}

/// Memo of `C_{n,m,r}`.
///
/// `raw` holds the recursion evaluated with the indices in the order given;
/// `entries` is keyed by the descending-sorted triple.
#[derive(Clone, Debug, Default)]
pub struct CoefficientTable3 {
    max_order: u32,
    raw: HashMap<(u32, u32, u32), YPolynomial>,
}

impl CoefficientTable3 {
    pub fn new() -> Self {
        Self::default()
    }

    /// Table filled for every triple with `n + m + r <= max_order`.
    pub fn with_order(max_order: u32) -> Self {
        let mut t = Self::new();
        for total in 0..=max_order {
            for (n, m, r) in sorted_triples(total) {
                t.get(n, m, r);
            }
        }
        t.max_order = max_order;
        t
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    /// `C_{n,m,r}` looked up through the sorted key.
    pub fn get(&mut self, n: u32, m: u32, r: u32) -> YPolynomial {
        let mut key = [n, m, r];
        key.sort_unstable_by(|a, b| b.cmp(a));
        self.max_order = self.max_order.max(n + m + r);
        self.raw_recursion(key[0], key[1], key[2])
    }

    /// Entries keyed by descending-sorted triples.
    pub fn entries(&self) -> Vec<((u32, u32, u32), YPolynomial)> {
        let mut out: Vec<_> = self
            .raw
            .iter()
            .filter(|((n, m, r), _)| n >= m && m >= r)
            .map(|(k, v)| (*k, v.clone()))
            .collect();
        out.sort_by_key(|((n, m, r), _)| (n + m + r, (*n, *m, *r)));
        out
    }

    /// The recursion in `r` exactly as written, with `(n, m, r)` taken in the
    /// order given (used to test symmetry).
    pub fn raw_recursion(&mut self, n: u32, m: u32, r: u32) -> YPolynomial {
        if let Some(v) = self.raw.get(&(n, m, r)) {
            return v.clone();
        }
        let value = if r == 0 {
            c_pair(n, m)
        } else {
            let mut acc = YPolynomial::zero();
            for s in 1..=r {
                let prev = self.raw_recursion(n + s - 1, m, r - s);
                if prev.is_zero() {
                    continue;
                }
                acc += &(&prev * &recursion_coefficient(n, m, r, s));
            }
            acc
        };
        self.raw.insert((n, m, r), value.clone());
        value
    }
}

/// Coefficient `a_s` multiplying `C_{n+s-1, m, r-s}` in the recursion for `C_{n,m,r}`.
pub fn recursion_coefficient(n: u32, m: u32, r: u32, s: u32) -> YPolynomial {
    let (n, m, r, s) = (n as i64, m as i64, r as i64, s as i64);
    if s == 1 {
        let c0 = rat(m * (n - r + 1), r) - int(r - 1);
        YPolynomial::linear(c0, rat(1, 2 * r))
    } else {
        YPolynomial::constant(rat(m * (n - r + 2 * s - 1), r))
    }
}

/// `C_{n,m,r}` from a fresh table.
pub fn c_triple(n: u32, m: u32, r: u32) -> YPolynomial {
    CoefficientTable3::new().get(n, m, r)
}

fn sorted_triples(total: u32) -> Vec<(u32, u32, u32)> {
    let mut out = Vec::new();
    for n in (0..=total).rev() {
        for m in (0..=n.min(total - n)).rev() {
            let r = total - n - m;
            if r <= m {
                out.push((n, m, r));
            }
        }
    }
    out
}

fn e(a: usize, b: usize) -> EdgeIndex {
    EdgeIndex::new(a, b).expect("valid edge")
}

/// Monomial `1/(tau_12^n tau_23^m tau_13^r)`.
pub fn k3_monomial(n: u32, m: u32, r: u32) -> EdgeMonomial {
    EdgeMonomial::from_pairs([(e(1, 2), n), (e(2, 3), m), (e(1, 3), r)])
}

/// The `k = 3` series through total order `max_order`; `y = None` keeps the
/// coefficients as polynomials in `y`, otherwise they are evaluated.
pub fn chi_k3(y: Option<&Rational>, max_order: u32) -> ChiSeries {
    let mut table = CoefficientTable3::with_order(max_order);
    let mut terms = Vec::new();
    for total in 0..=max_order {
        for n in 0..=total {
            for m in 0..=total - n {
                let r = total - n - m;
                let c = table.get(n, m, r);
                let c = match y {
                    Some(y) => YPolynomial::constant(c.eval(y)),
                    None => c,
                };
                if !c.is_zero() {
                    terms.push((k3_monomial(n, m, r), c));
                }
            }
        }
    }
    ChiSeries::from_terms(3, max_order, terms).expect("k=3 monomials fit")
}

/// `exp(phi)` with `phi = 2i sum 1/tau - 4i/(tau_12 tau_23 tau_13)`, dropping
/// every power of a single `1/tau` above one.
pub fn chi_k3_beta4_compact() -> ChiSeries {
    // stored coefficients exclude i^degree: 2i = i*2, -4i = i^3*4
    let terms = vec![
        (k3_monomial(1, 0, 0), YPolynomial::from(2)),
        (k3_monomial(0, 1, 0), YPolynomial::from(2)),
        (k3_monomial(0, 0, 1), YPolynomial::from(2)),
        (k3_monomial(1, 1, 1), YPolynomial::from(4)),
    ];
    let phi = ChiSeries::from_terms(3, 3, terms).expect("k=3 monomials fit");
    series_exp_truncate(&phi, 3, Some(1)).expect("phi has no constant term")
}

/// The two-point series `sum_n i^n c(n) / tau^n` through `max_order`.
pub fn chi_k2(y: Option<&Rational>, max_order: u32) -> ChiSeries {
    let terms = (0..=max_order).filter_map(|n| {
        let c = c_two_point(n);
        let c = match y {
            Some(y) => YPolynomial::constant(c.eval(y)),
            None => c,
        };
        (!c.is_zero()).then(|| (EdgeMonomial::single(e(1, 2), n), c))
    });
    ChiSeries::from_terms(2, max_order, terms.collect::<Vec<_>>()).expect("k=2 monomials fit")
}

/// Checks `a_{n+1} 2i(n+1) = a_n (2n(n+1) - y)` for `a_n = i^n c(n)`,
/// `n < max_n`, as identities in `y`.
pub fn k2_ode_recursion_check(max_n: u32) -> VerificationReport {
    let mut residual = Vec::new();
    for n in 0..max_n {
        let (a, b) = (c_two_point(n), c_two_point(n + 1));
        // i^(n+1) 2i (n+1) b = i^n (2n(n+1) - y) a  <=>  -2(n+1) b = (2n(n+1) - y) a
        let lhs = b.scale(&int(-2 * (n as i64 + 1)));
        let rhs = &YPolynomial::linear(int(2 * n as i64 * (n as i64 + 1)), int(-1)) * &a;
        residual.extend((&lhs - &rhs).to_fraction_strings());
    }
    VerificationReport::exact("k=2 series recursion", residual).with_input("max_n", max_n)
}

/// Value of `2 chi'' + 2i chi' - y chi / tau^2` for the series truncated at
/// `max_order`, at `tau = tau_12(pt)`.
pub fn k2_ode_value(max_order: u32, y: &Rational, pt: &SpectralPoint) -> Result<GaussRational> {
    let tau = pt.tau(e(1, 2));
    if tau.is_zero() {
        return Err(crate::error::HizError::CoincidentEigenvalues("tau_12 = 0".into()));
    }
    let inv = tau.recip();
    let mut total = GaussRational::zero();
    for n in 0..=max_order {
        let c = c_two_point(n).eval(y);
        if c.is_zero() {
            continue;
        }
        let a = GaussRational::phased(c, n);
        let nn = int(n as i64);
        let p = |k: u32| -> Rational { num::pow(inv.clone(), k as usize) };
        // d/dtau tau^-n = -n tau^-(n+1); second derivative n(n+1) tau^-(n+2)
        let second = a.scale(&(int(2) * &nn * (&nn + int(1)) * p(n + 2)));
        let first = (&GaussRational::i() * &a).scale(&(int(-2) * &nn * p(n + 1)));
        let potential = a.scale(&(-(y * p(n + 2))));
        total = &(&(&total + &second) + &first) + &potential;
    }
    Ok(total)
}

/// The boundary term `(2N(N+1) - y) a_N tau^-(N+2)` left by truncation at `N`.
pub fn k2_boundary_term(max_order: u32, y: &Rational, tau: &Rational) -> GaussRational {
    let n = int(max_order as i64);
    let c = c_two_point(max_order).eval(y);
    let factor = (int(2) * &n * (&n + int(1)) - y) * num::pow(tau.recip(), max_order as usize + 2);
    GaussRational::phased(c * factor, max_order)
}

/// Residual of the truncated series in the reduced two-point equation minus
/// the forced boundary term; exactly zero when the series is correct.
pub fn k2_ode_residual(max_order: u32, y: &Rational, pt: &SpectralPoint) -> Result<VerificationReport> {
    let value = k2_ode_value(max_order, y, pt)?;
    let boundary = k2_boundary_term(max_order, y, &pt.tau(e(1, 2)));
    let diff = &value - &boundary;
    Ok(VerificationReport::exact("k=2 reduced equation", diff.to_fraction_pair().to_vec())
        .with_input("max_order", max_order)
        .with_input("y", to_fraction_string(y))
        .with_input("tau", pt.tau(e(1, 2)))
        .with_note(format!("residual {value}, boundary term {boundary}")))
}

/// `true` if every coefficient vanishes once an index exceeds `cap`.
pub fn terminates_at(y: &Rational, cap: u32, max_order: u32) -> bool {
    let mut table = CoefficientTable3::with_order(max_order);
    sorted_triples_upto(max_order)
        .into_iter()
        .filter(|(n, _, _)| *n > cap)
        .all(|(n, m, r)| table.get(n, m, r).eval(y).is_zero())
}

fn sorted_triples_upto(max_order: u32) -> Vec<(u32, u32, u32)> {
    (0..=max_order).flat_map(sorted_triples).collect()
}

impl CoefficientTable3 {
    /// `true` if the recursion gives the same polynomial for every ordering
    /// of every triple with `n + m + r <= max_order`.
    pub fn is_symmetric(&mut self, max_order: u32) -> bool {
        self.asymmetric_triples(max_order).is_empty()
    }

    pub fn asymmetric_triples(&mut self, max_order: u32) -> Vec<(u32, u32, u32)> {
        let mut bad = Vec::new();
        for (n, m, r) in sorted_triples_upto(max_order) {
            let base = self.raw_recursion(n, m, r);
            let perms = [(n, r, m), (m, n, r), (m, r, n), (r, n, m), (r, m, n)];
            if perms.iter().any(|&(a, b, c)| self.raw_recursion(a, b, c) != base) {
                bad.push((n, m, r));
            }
        }
        bad
    }
}

impl From<(u32, u32, u32)> for EdgeMonomial {
    fn from((n, m, r): (u32, u32, u32)) -> Self {
        k3_monomial(n, m, r)
    }
}

/// `true` if `p` has the unit constant term expected of every coefficient at `y = 0`.
pub fn vanishes_at_y_zero(p: &YPolynomial) -> bool {
    p.eval(&Rational::zero()).is_zero() || p == &YPolynomial::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::pde_apply;
    use proptest::prelude::*;

    fn poly(cs: &[(i64, i64)]) -> YPolynomial {
        YPolynomial::from_coeffs(cs.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    fn prefactor(l_max: u32) -> YPolynomial {
        (1..=l_max).fold(YPolynomial::one(), |acc, l| &acc * &two_point_factor(l).pow(2))
    }

    #[test]
    fn two_point_weights() {
        assert_eq!(c_two_point(0), YPolynomial::one());
        assert_eq!(c_two_point(1).eval(&int(4)), int(2));
        assert!(c_two_point(2).eval(&int(4)).is_zero());
        assert_eq!(c_pair(2, 2).eval(&int(12)), int(144));
        assert_eq!(c_pair(3, 0), c_two_point(3));
    }

    #[test]
    fn first_order_recursion_matches_closed_form() {
        for n in 0..5 {
            for m in 0..5 {
                let expected = &c_pair(n, m) * &YPolynomial::linear(int((n * m) as i64), rat(1, 2));
                assert_eq!(c_triple(n, m, 1), expected);
            }
        }
    }

    #[test]
    fn low_order_values() {
        // (y/2)^2 (1 + y/2)
        let c111 = &two_point_factor(1).pow(2) * &poly(&[(1, 1), (1, 2)]);
        assert_eq!(c_triple(1, 1, 1), c111);
        assert_eq!(c_triple(1, 1, 1).eval(&int(4)), int(12));
        let c222 = &prefactor(2) * &poly(&[(-6, 1), (3, 2), (1, 8)]);
        assert_eq!(c_triple(2, 2, 2), c222);
        assert_eq!(c_triple(2, 2, 2).eval(&int(12)), int(4320));
    }

    #[test]
    fn third_order_value_from_recursion() {
        let rest = poly(&[(-48, 1), (-8, 1), (19, 24), (1, 48)]);
        assert_eq!(c_triple(3, 3, 3), &prefactor(3) * &rest);
    }

    #[test]
    fn symmetric_through_total_nine() {
        let mut t = CoefficientTable3::new();
        assert_eq!(t.asymmetric_triples(9), vec![]);
    }

    #[test]
    fn terminates_for_even_beta() {
        for (cap, y) in [(1, 4), (2, 12), (3, 24)] {
            assert!(terminates_at(&int(y), cap, 9), "cap {cap}");
        }
        assert!(!terminates_at(&int(3), 1, 4));
    }

    #[test]
    fn beta2_is_trivial() {
        let s = chi_k3(Some(&int(0)), 6);
        assert_eq!(s, ChiSeries::one(3, 6));
    }

    #[test]
    fn beta4_series_and_compact_form_agree() {
        let s = chi_k3(Some(&int(4)), 3);
        assert_eq!(s.len(), 8);
        assert_eq!(s.coeff(&k3_monomial(1, 0, 0)), 2.into());
        assert_eq!(s.coeff(&k3_monomial(1, 1, 0)), 4.into());
        assert_eq!(s.coeff(&k3_monomial(1, 1, 1)), 12.into());
        assert_eq!(chi_k3_beta4_compact(), s);
    }

    #[test]
    fn k3_series_solves_the_equation_through_order_nine() {
        // at y = 3 nothing terminates; if every layer through order nine is
        // right, the residual is the single homogeneous piece of x-degree -11
        let y = int(3);
        let full = chi_k3(Some(&y), 9);
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(11);
        for _ in 0..3 {
            let pt = SpectralPoint::random_int(&mut rng, 3, 20);
            let r1 = pde_apply(&full, &pt, &y).unwrap();
            let r2 = pde_apply(&full, &pt.scale_x(&int(2)).unwrap(), &y).unwrap();
            assert!(!r1.is_zero());
            assert_eq!(r2.scale(&int(2048)), r1);
        }
    }

    #[test]
    fn terminating_k3_series_are_exact_solutions() {
        for (y, order) in [(4, 3), (12, 6), (24, 9)] {
            let s = chi_k3(Some(&int(y)), order);
            let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(y as u64);
            for _ in 0..5 {
                let pt = SpectralPoint::random_int(&mut rng, 3, 20);
                assert!(pde_apply(&s, &pt, &int(y)).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn k2_recursion_holds_symbolically() {
        assert!(k2_ode_recursion_check(20).passed);
    }

    #[test]
    fn k2_residual_is_the_boundary_term() {
        let pt = SpectralPoint::from_ints(&[0, 5], &[0, 2]).unwrap();
        for (y, order) in [(4, 1), (0, 3), (3, 6)] {
            let r = k2_ode_residual(order, &int(y), &pt).unwrap();
            assert!(r.passed, "{r}");
        }
        // terminating cases leave nothing behind
        assert!(k2_ode_value(1, &int(4), &pt).unwrap().is_zero());
    }

    #[test]
    fn k2_reduced_equation_matches_full_operator() {
        // L chi = (lambda_1 - lambda_2)^2 (2 chi'' + 2i chi' - y chi/tau^2)
        let y = rat(3, 2);
        let pt = SpectralPoint::from_ints(&[1, 4], &[2, -1]).unwrap();
        let s = chi_k2(Some(&y), 5);
        let full = pde_apply(&s, &pt, &y).unwrap();
        let reduced = k2_ode_value(5, &y, &pt).unwrap().scale(&int(9));
        assert_eq!(full, reduced);
    }

    #[test]
    fn k2_series_coefficients_are_two_point_weights() {
        let s = chi_k2(None, 6);
        for n in 0..=6 {
            assert_eq!(s.coeff(&EdgeMonomial::single(e(1, 2), n)), c_two_point(n));
        }
    }

    #[test]
    fn sorted_entries() {
        let t = CoefficientTable3::with_order(3);
        let keys: Vec<_> = t.entries().into_iter().map(|(k, _)| k).collect();
        assert_eq!(keys[0], (0, 0, 0));
        assert!(keys.contains(&(1, 1, 1)));
        assert!(keys.iter().all(|(n, m, r)| n >= m && m >= r));
    }

    proptest! {
        #[test]
        fn every_coefficient_carries_the_y_factor(n in 0u32..4, m in 0u32..4, r in 0u32..4) {
            let c = c_triple(n, m, r);
            prop_assert!(vanishes_at_y_zero(&c));
        }

        #[test]
        fn lookup_is_order_independent(n in 0u32..4, m in 0u32..4, r in 0u32..4) {
            let mut t = CoefficientTable3::new();
            let a = t.get(n, m, r);
            prop_assert_eq!(&a, &t.get(r, n, m));
            prop_assert_eq!(&a, &t.raw_recursion(n, m, r));
        }
    }
}
