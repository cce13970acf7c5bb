//! Polynomial identities among the pair variables `tau_ab`.
//!
//! For three points: `id0` (quadratic in tau) and `id1`..`id3` (in
//! `V_1 = 1/tau_23`, `V_2 = 1/tau_31`, `V_3 = 1/tau_12`). For four points:
//! the cubic relation among the six `tau_ab`, the source of the
//! non-uniqueness of the `k >= 4` expansion.

use num::Zero;

use crate::edge::{EdgeIndex, EdgeMonomial};
use crate::error::{HizError, Result};
use crate::point::SpectralPoint;
use crate::rational::{int, rat, Rational};
use crate::series::ChiSeries;
use crate::ypoly::YPolynomial;

/// `tau_ab` for 0-based vertices in either order.
fn tau(pt: &SpectralPoint, a: usize, b: usize) -> Rational {
    (&pt.lambda()[a] - &pt.lambda()[b]) * (&pt.x()[a] - &pt.x()[b])
}

fn lam(pt: &SpectralPoint, a: usize, b: usize) -> Rational {
    &pt.lambda()[a] - &pt.lambda()[b]
}

/// The cubic polynomial in the six `tau` of vertices `q = [q1, q2, q3, q4]`
/// as `(coefficient, [three vertex pairs])`, 22 terms.
fn cubic_terms() -> Vec<(i64, [(usize, usize); 3])> {
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let opposite = |p: (usize, usize)| -> (usize, usize) {
        let rest: Vec<usize> = (0..4).filter(|v| *v != p.0 && *v != p.1).collect();
        (rest[0], rest[1])
    };
    let mut out = Vec::new();
    // tau_p^2 tau_opp(p)
    for p in pairs {
        out.push((1, [p, p, opposite(p)]));
    }
    // -tau_p tau_opp(p) * (sum of the other four), once per opposite pair
    for p in [(0, 1), (0, 2), (0, 3)] {
        let o = opposite(p);
        for q in pairs.iter().filter(|q| **q != p && **q != o) {
            out.push((-1, [p, o, *q]));
        }
    }
    // triangles
    for t in [[0, 1, 3], [0, 2, 3], [1, 2, 3], [0, 1, 2]] {
        out.push((1, [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])]));
    }
    out
}

/// Exact value of the cubic identity for the vertices `quadruple` (1-based);
/// zero for every point.
pub fn cubic_identity_residual(pt: &SpectralPoint, quadruple: [usize; 4]) -> Result<Rational> {
    let k = pt.k();
    if k < 4 {
        return Err(HizError::UnsupportedK { k, min: 4, max: usize::MAX });
    }
    let mut seen = quadruple;
    seen.sort_unstable();
    if seen[0] == 0 || seen[3] > k || seen.windows(2).any(|w| w[0] == w[1]) {
        return Err(HizError::InvalidArgument(format!("bad quadruple {quadruple:?} for k={k}")));
    }
    let v: Vec<usize> = quadruple.iter().map(|q| q - 1).collect();
    let mut total = Rational::zero();
    for (c, factors) in cubic_terms() {
        let prod = factors
            .iter()
            .fold(int(c), |acc, (a, b)| acc * tau(pt, v[*a], v[*b]));
        total += prod;
    }
    Ok(total)
}

/// The cubic identity divided by `prod tau_ab^2` over the six edges of
/// `quadruple`: a combination of degree-9 monomials in `1/tau` with every
/// exponent at most 2 that vanishes identically.
pub fn cubic_identity_over_vandermonde(quadruple: [usize; 4]) -> Result<Vec<(EdgeMonomial, i64)>> {
    let mut terms: std::collections::BTreeMap<EdgeMonomial, i64> = Default::default();
    let edge = |a: usize, b: usize| -> Result<EdgeIndex> {
        let (p, q) = (quadruple[a], quadruple[b]);
        EdgeIndex::new(p.min(q), p.max(q))
    };
    for (c, factors) in cubic_terms() {
        let mut exps: std::collections::BTreeMap<EdgeIndex, u32> = Default::default();
        for (a, b) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
            exps.insert(edge(a, b)?, 2);
        }
        for (a, b) in factors {
            *exps.get_mut(&edge(a, b)?).expect("edge of the quadruple") -= 1;
        }
        *terms.entry(EdgeMonomial::from_pairs(exps)).or_default() += c;
    }
    Ok(terms.into_iter().filter(|(_, c)| *c != 0).collect())
}

/// Four-point series of the divided cubic identity times `multiplier`; its
/// value vanishes identically, so adding any multiple to a solution leaves a
/// solution.
pub fn cubic_gauge_direction(multiplier: &EdgeMonomial) -> Result<ChiSeries> {
    let terms: Vec<(EdgeMonomial, YPolynomial)> = cubic_identity_over_vandermonde([1, 2, 3, 4])?
        .into_iter()
        .map(|(m, c)| (m.mul(multiplier), YPolynomial::from(c)))
        .collect();
    let degree = terms.first().map_or(0, |(m, _)| m.degree());
    ChiSeries::from_terms(4, degree, terms)
}

/// Residuals `lhs - rhs` of `id0`, `id1`, `id2`, `id3` at a three-point
/// spectral point; all exactly zero.
pub fn id_residuals(pt: &SpectralPoint) -> Result<Vec<Rational>> {
    if pt.k() != 3 {
        return Err(HizError::MismatchedK { left: pt.k(), right: 3 });
    }
    // V_a is the inverse tau of the edge opposite vertex a
    let v = [tau(pt, 1, 2).recip(), tau(pt, 2, 0).recip(), tau(pt, 0, 1).recip()];
    let cyc = [(0, 1, 2), (1, 2, 0), (2, 0, 1)];
    let sum = |f: &dyn Fn(usize, usize, usize) -> Rational| -> Rational {
        cyc.iter().map(|&(a, b, c)| f(a, b, c)).fold(Rational::zero(), |s, t| s + t)
    };
    let vvv = &v[0] * &v[1] * &v[2];
    let sq_sum = v.iter().map(|x| x * x).fold(Rational::zero(), |s, t| s + t);

    let id0 = sum(&|a, b, c| lam(pt, a, b) * lam(pt, c, a) * tau(pt, b, c) * tau(pt, b, c))
        - sum(&|a, b, c| {
            let l = lam(pt, a, b);
            &l * &l * tau(pt, c, a) * tau(pt, b, c)
        });
    let id1 = sum(&|a, b, c| &v[b] * &v[c] * lam(pt, a, b) * lam(pt, a, c));
    let id2 = sum(&|a, b, c| {
        let w = &v[b] * &v[c];
        &w * &w * lam(pt, a, b) * lam(pt, a, c)
    }) + &vvv * sum(&|a, b, c| {
        let l = lam(pt, b, c);
        &l * &l * &v[a]
    });
    let id3 = sum(&|a, b, c| {
        let w = &v[b] * &v[c];
        &w * &w * (&v[b] * &v[b] + &v[c] * &v[c]) * lam(pt, a, b) * lam(pt, a, c)
    }) + sum(&|a, b, c| {
        let l = lam(pt, b, c);
        &l * &l * &vvv * (&v[a] * &sq_sum + &vvv * rat(1, 2))
    });
    Ok(vec![id0, id1, id2, id3])
}

pub const ID_NAMES: [&str; 4] = ["id0", "id1", "id2", "id3"];

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cubic_identity_has_22_terms() {
        assert_eq!(cubic_terms().len(), 22);
        let net: i64 = cubic_terms().iter().map(|t| t.0).sum();
        assert_eq!(net, 6 - 12 + 4);
    }

    #[test]
    fn cubic_identity_at_listed_points() {
        let p = SpectralPoint::from_ints(&[0, 1, 2, 3], &[0, 1, 4, 9]).unwrap();
        assert!(cubic_identity_residual(&p, [1, 2, 3, 4]).unwrap().is_zero());
        let p = SpectralPoint::from_ints(&[1, 2, 3, 5], &[1, -1, 2, -2]).unwrap();
        assert!(cubic_identity_residual(&p, [1, 2, 3, 4]).unwrap().is_zero());
    }

    #[test]
    fn cubic_identity_on_any_quadruple_of_five_points() {
        let p = SpectralPoint::from_ints(&[3, -1, 7, 2, 11], &[5, 0, -4, 8, 1]).unwrap();
        for q in [[1, 2, 3, 4], [2, 3, 4, 5], [5, 1, 3, 2], [4, 5, 1, 3]] {
            assert!(cubic_identity_residual(&p, q).unwrap().is_zero());
        }
    }

    #[test]
    fn cubic_identity_rejects_bad_input() {
        let p = SpectralPoint::from_ints(&[0, 1, 2, 3], &[0, 1, 4, 9]).unwrap();
        assert!(cubic_identity_residual(&p, [1, 1, 2, 3]).is_err());
        assert!(cubic_identity_residual(&p, [1, 2, 3, 5]).is_err());
        let p3 = SpectralPoint::from_ints(&[0, 1, 2], &[0, 1, 4]).unwrap();
        assert!(cubic_identity_residual(&p3, [1, 2, 3, 4]).is_err());
    }

    #[test]
    fn divided_identity_lives_in_cap_two_degree_nine() {
        let terms = cubic_identity_over_vandermonde([1, 2, 3, 4]).unwrap();
        assert_eq!(terms.len(), 22);
        assert!(terms.iter().all(|(m, _)| m.degree() == 9 && m.max_exponent() <= 2));
    }

    #[test]
    fn identities_at_listed_point() {
        let p = SpectralPoint::from_ints(&[0, 1, 3], &[0, 2, 5]).unwrap();
        for r in id_residuals(&p).unwrap() {
            assert!(r.is_zero());
        }
    }

    #[test]
    fn a_wrong_sign_is_detected() {
        // flipping the right-hand side of id2 must leave a non-zero value
        let p = SpectralPoint::from_ints(&[0, 1, 3], &[0, 2, 5]).unwrap();
        let v = [tau(&p, 1, 2).recip(), tau(&p, 2, 0).recip(), tau(&p, 0, 1).recip()];
        let lhs: Rational = [(0, 1, 2), (1, 2, 0), (2, 0, 1)]
            .iter()
            .map(|&(a, b, c)| {
                let w = &v[b] * &v[c];
                &w * &w * lam(&p, a, b) * lam(&p, a, c)
            })
            .fold(Rational::zero(), |s, t| s + t);
        assert!(!lhs.is_zero());
    }

    #[test]
    fn gauge_direction_evaluates_to_zero() {
        let all = EdgeMonomial::from_pairs(crate::edge::edges(4).into_iter().map(|e| (e, 1)));
        let g = cubic_gauge_direction(&all).unwrap();
        assert_eq!(g.len(), 22);
        assert!(g.terms().keys().all(|m| m.degree() == 15 && m.max_exponent() <= 3));
        let p = SpectralPoint::from_ints(&[3, -1, 7, 2], &[5, 0, -4, 8]).unwrap();
        assert!(g.eval(&p, &int(0)).unwrap().is_zero());
    }

    proptest! {
        #[test]
        fn identities_vanish_at_random_rational_points(
            xs in prop::collection::vec((-30i64..30, 1i64..6), 4),
            ls in prop::collection::vec((-30i64..30, 1i64..6), 4),
        ) {
            let x: Vec<Rational> = xs.iter().map(|&(n, d)| rat(n, d)).collect();
            let l: Vec<Rational> = ls.iter().map(|&(n, d)| rat(n, d)).collect();
            if let Ok(p4) = SpectralPoint::new(x.clone(), l.clone()) {
                prop_assert!(cubic_identity_residual(&p4, [1, 2, 3, 4]).unwrap().is_zero());
            }
            if let Ok(p3) = SpectralPoint::new(x[..3].to_vec(), l[..3].to_vec()) {
                for r in id_residuals(&p3).unwrap() {
                    prop_assert!(r.is_zero());
                }
            }
        }
    }
}
