//! The large-`y` expansion `chi = exp(phi_0 + phi_1/y + phi_2/y^2 + ...)`.
//!
//! With `u = x/y` and `v_ab = i / ((lambda_a - lambda_b)(u_a - u_b)) = i y / tau_ab`
//! the equation for `chi` becomes, order by order in `1/y`,
//!
//! ```text
//! 2i sum lambda_a d_a phi_0 - sum_{a<b} (u_a - u_b)^-2 = 0
//! sum_a ((d_a phi_0)^2 + d_a^2 phi_0) + 2i sum lambda_a d_a phi_1 = 0
//! sum_a (2 d_a phi_0 d_a phi_1 + d_a^2 phi_1) + 2i sum lambda_a d_a phi_2 = 0
//! ```
//!
//! with `d_a = d/du_a`, `d_a v_ab = i lambda_ab v_ab^2` and `d_b v_ab = -i lambda_ab v_ab^2`.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::edge::{edges, permutations, EdgeIndex, EdgeMonomial};
use crate::error::{HizError, Result};
use crate::gauss::GaussRational;
use crate::point::SpectralPoint;
use crate::rational::{int, rat, to_fraction_string, Rational};
use crate::recursion::chi_k3;
use crate::report::VerificationReport;
use crate::series::{series_exp_truncate, ChiSeries};
use crate::ypoly::YPolynomial;

/// Polynomial in the `v_ab` with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VPolynomial {
    k: usize,
    terms: BTreeMap<EdgeMonomial, Rational>,
}

impl VPolynomial {
    pub fn zero(k: usize) -> Self {
        Self { k, terms: BTreeMap::new() }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn terms(&self) -> &BTreeMap<EdgeMonomial, Rational> {
        &self.terms
    }

    pub fn coeff(&self, m: &EdgeMonomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, m: EdgeMonomial, c: Rational) {
        let entry = self.terms.entry(m.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    /// Partial derivative with respect to `v_e`.
    pub fn derivative(&self, e: EdgeIndex) -> Self {
        let mut out = Self::zero(self.k);
        for (m, c) in &self.terms {
            let n = m.exponent(e);
            if n == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.set(e, n - 1);
            out.add_term(dm, c * int(n as i64));
        }
        out
    }

    pub fn eval(&self, v: &BTreeMap<EdgeIndex, GaussRational>) -> GaussRational {
        let mut total = GaussRational::zero();
        for (m, c) in &self.terms {
            let mut t = GaussRational::real(c.clone());
            for (e, n) in m.iter() {
                for _ in 0..n {
                    t = &t * &v[&e];
                }
            }
            total += &t;
        }
        total
    }

    /// Relabels vertices by `perm` (0-based image of vertex `a+1` is `perm[a]+1`).
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let mut out = Self::zero(self.k);
        for (m, c) in &self.terms {
            out.add_term(m.relabel(perm), c.clone());
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        permutations(self.k).iter().all(|p| &self.relabel(p) == self)
    }

    /// Terms ordered by degree, then edges.
    pub fn sorted_terms(&self) -> Vec<(&EdgeMonomial, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| a.0.degree().cmp(&b.0.degree()).then_with(|| b.0.cmp(a.0)));
        v
    }

    /// The same terms read as a series in `1/tau` with `v_ab = i y / tau_ab`,
    /// at order `1/y^order`: `c v^alpha -> i^|alpha| c y^(|alpha| - order) / tau^alpha`.
    pub fn to_tau_series(&self, order: u32, max_degree: u32) -> Result<ChiSeries> {
        let mut terms = Vec::new();
        for (m, c) in &self.terms {
            let d = m.degree();
            if d > max_degree {
                continue;
            }
            if d < order {
                return Err(HizError::InvalidArgument("term of degree below its 1/y order".into()));
            }
            let coeff = YPolynomial::constant(c.clone()).shift((d - order) as usize);
            terms.push((m.clone(), coeff));
        }
        ChiSeries::from_terms(self.k, max_degree, terms)
    }
}

impl fmt::Display for VPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.abs();
            if !a.is_one() {
                write!(f, "{a} ")?;
            }
            let factors: Vec<String> = m
                .iter()
                .map(|(e, n)| if n == 1 { format!("v{}{}", e.a(), e.b()) } else { format!("v{}{}^{}", e.a(), e.b(), n) })
                .collect();
            write!(f, "{}", factors.join(" "))?;
        }
        Ok(())
    }
}

fn v_edge(a: usize, b: usize) -> EdgeIndex {
    EdgeIndex::new(a.min(b), a.max(b)).expect("valid edge")
}

/// `1/2 sum_{a<b} v_ab`.
pub fn phi0(k: usize) -> VPolynomial {
    let mut p = VPolynomial::zero(k);
    for e in edges(k) {
        p.add_term(EdgeMonomial::single(e, 1), rat(1, 2));
    }
    p
}

/// `1/4 sum_(abc) v_ab v_bc v_ca - 1/2 sum v_ab^2 - 1/12 sum v_ab^3`.
pub fn phi1(k: usize) -> VPolynomial {
    let mut p = VPolynomial::zero(k);
    for a in 1..=k {
        for b in a + 1..=k {
            for c in b + 1..=k {
                let m = EdgeMonomial::from_pairs([(v_edge(a, b), 1), (v_edge(b, c), 1), (v_edge(a, c), 1)]);
                p.add_term(m, rat(1, 4));
            }
        }
    }
    for e in edges(k) {
        p.add_term(EdgeMonomial::single(e, 2), rat(-1, 2));
        p.add_term(EdgeMonomial::single(e, 3), rat(-1, 12));
    }
    p
}

/// The three-point second-order term, with `V_1 = v_23`, `V_2 = v_13`, `V_3 = v_12`:
/// `sum V^3 + 1/2 sum V^4 - 1/2 V1V2V3 sum V + 1/20 sum V^5 - 1/8 V1V2V3 sum V^2`.
pub fn phi2_k3() -> VPolynomial {
    let vs = [v_edge(2, 3), v_edge(1, 3), v_edge(1, 2)];
    let mut p = VPolynomial::zero(3);
    let triple = |extra: Option<(usize, u32)>| {
        let mut m = EdgeMonomial::from_pairs(vs.iter().map(|e| (*e, 1)));
        if let Some((i, n)) = extra {
            m.set(vs[i], 1 + n);
        }
        m
    };
    for (i, e) in vs.iter().enumerate() {
        p.add_term(EdgeMonomial::single(*e, 3), int(1));
        p.add_term(EdgeMonomial::single(*e, 4), rat(1, 2));
        p.add_term(EdgeMonomial::single(*e, 5), rat(1, 20));
        p.add_term(triple(Some((i, 1))), rat(-1, 2));
        p.add_term(triple(Some((i, 2))), rat(-1, 8));
    }
    p
}

/// `phi_0`, `phi_1` and, for three points, `phi_2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiSeries {
    pub k: usize,
    pub orders: Vec<VPolynomial>,
}

impl PhiSeries {
    pub fn for_k(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(HizError::UnsupportedK { k, min: 2, max: usize::MAX });
        }
        let mut orders = vec![phi0(k), phi1(k)];
        if k == 3 {
            orders.push(phi2_k3());
        }
        Ok(Self { k, orders })
    }

    /// `phi_0 + phi_1/y + ...` as a series in `1/tau` with `y`-polynomial coefficients.
    pub fn to_tau_series(&self, max_degree: u32) -> Result<ChiSeries> {
        let mut total = ChiSeries::zero(self.k, max_degree);
        for (j, p) in self.orders.iter().enumerate() {
            total = total.add(&p.to_tau_series(j as u32, max_degree)?)?;
        }
        Ok(total)
    }
}

/// Values and first/second `u`-derivatives of the `v` variables at a point.
struct VPoint {
    k: usize,
    lambda: Vec<Rational>,
    u: Vec<Rational>,
    v: BTreeMap<EdgeIndex, GaussRational>,
    /// `d_a v_e`
    dv: Vec<BTreeMap<EdgeIndex, GaussRational>>,
    /// `d_a^2 v_e`
    d2v: Vec<BTreeMap<EdgeIndex, GaussRational>>,
}

impl VPoint {
    fn new(pt: &SpectralPoint, y: &Rational) -> Result<Self> {
        if y.is_zero() {
            return Err(HizError::InvalidArgument("y must be non-zero for u = x/y".into()));
        }
        let k = pt.k();
        let u: Vec<Rational> = pt.x().iter().map(|x| x / y).collect();
        let mut v = BTreeMap::new();
        let mut dv = vec![BTreeMap::new(); k];
        let mut d2v = vec![BTreeMap::new(); k];
        for e in edges(k) {
            let (a, b) = e.ends0();
            let l = &pt.lambda()[a] - &pt.lambda()[b];
            let ve = GaussRational::imag((&l * (&u[a] - &u[b])).recip());
            let vsq = &ve * &ve;
            let first = (&GaussRational::i() * &vsq).scale(&l);
            let second = (&vsq * &ve).scale(&(int(-2) * &l * &l));
            dv[a].insert(e, first.clone());
            dv[b].insert(e, -&first);
            d2v[a].insert(e, second.clone());
            d2v[b].insert(e, second);
            v.insert(e, ve);
        }
        Ok(Self { k, lambda: pt.lambda().to_vec(), u, v, dv, d2v })
    }

    fn grad(&self, p: &VPolynomial, a: usize) -> GaussRational {
        let mut g = GaussRational::zero();
        for (e, d) in &self.dv[a] {
            g += &(&p.derivative(*e).eval(&self.v) * d);
        }
        g
    }

    fn second(&self, p: &VPolynomial, a: usize) -> GaussRational {
        let mut s = GaussRational::zero();
        for (e, d2) in &self.d2v[a] {
            let pe = p.derivative(*e);
            s += &(&pe.eval(&self.v) * d2);
            for (f, df) in &self.dv[a] {
                s += &(&(&pe.derivative(*f).eval(&self.v) * &self.dv[a][e]) * df);
            }
        }
        s
    }

    fn drift(&self, p: &VPolynomial) -> GaussRational {
        let mut s = GaussRational::zero();
        for a in 0..self.k {
            s += &self.grad(p, a).scale(&self.lambda[a]);
        }
        (&GaussRational::i() * &s).scale(&int(2))
    }

    fn potential(&self) -> Rational {
        let mut s = Rational::zero();
        for a in 0..self.k {
            for b in a + 1..self.k {
                let d = &self.u[a] - &self.u[b];
                s += (&d * &d).recip();
            }
        }
        s
    }
}

/// Exact residual of the order-`order` equation for the printed `phi` at `pt`.
pub fn phi_order_residual(order: u32, pt: &SpectralPoint, y: &Rational) -> Result<VerificationReport> {
    let k = pt.k();
    let phi = PhiSeries::for_k(k)?;
    if order as usize >= phi.orders.len() {
        return Err(HizError::InvalidArgument(format!("order {order} is not available for k={k}")));
    }
    let vp = VPoint::new(pt, y)?;
    let residual = match order {
        0 => &vp.drift(&phi.orders[0]) - &GaussRational::real(vp.potential()),
        _ => {
            let lower = &phi.orders[order as usize - 1];
            let mut s = vp.drift(&phi.orders[order as usize]);
            for a in 0..k {
                let lap = vp.second(lower, a);
                let cross = if order == 1 {
                    let g = vp.grad(lower, a);
                    &g * &g
                } else {
                    (&vp.grad(&phi.orders[0], a) * &vp.grad(lower, a)).scale(&int(2))
                };
                s += &(&cross + &lap);
            }
            s
        }
    };
    Ok(VerificationReport::exact(format!("phi_{order} equation k={k}"), residual.to_fraction_pair().to_vec())
        .with_input("order", order)
        .with_input("k", k)
        .with_input("y", to_fraction_string(y)))
}

/// Residuals of the order-`order` equation at `draws` random integer points.
pub fn phi_order_suite(order: u32, k: usize, draws: usize, seed: u64) -> Result<VerificationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parts = Vec::with_capacity(draws);
    for _ in 0..draws {
        let pt = SpectralPoint::random_int(&mut rng, k, 20);
        parts.push(phi_order_residual(order, &pt, &int(7))?);
    }
    Ok(VerificationReport::all(format!("phi_{order} equation k={k}, {draws} points"), &parts)
        .with_seed(seed)
        .with_input("draws", draws))
}

/// Expands `exp(phi_0 + phi_1/y + phi_2/y^2)` for three points in `1/tau`
/// through total degree `max_tau_degree` and compares, for every monomial of
/// degree `d`, the coefficients of `y^d, ..., y^(d - orders + 1)` with the
/// recursion coefficients.
pub fn largey_vs_recursion(max_tau_degree: u32, orders: u32) -> Result<VerificationReport> {
    if orders == 0 || orders > 3 {
        return Err(HizError::InvalidArgument("orders must be 1, 2 or 3".into()));
    }
    let phi = PhiSeries::for_k(3)?.to_tau_series(max_tau_degree)?;
    let expanded = series_exp_truncate(&phi, max_tau_degree, None)?;
    let exact = chi_k3(None, max_tau_degree);
    let mut residual = Vec::new();
    let mut compared = 0usize;
    let mut mismatches = Vec::new();
    for total in 1..=max_tau_degree {
        for n in 0..=total {
            for m in 0..=total - n {
                let mono = crate::recursion::k3_monomial(n, m, total - n - m);
                let (a, b) = (expanded.coeff(&mono), exact.coeff(&mono));
                for j in 0..orders.min(total + 1) {
                    let p = (total - j) as usize;
                    let diff = a.coeff(p) - b.coeff(p);
                    compared += 1;
                    if !diff.is_zero() {
                        mismatches.push(format!("{mono} y^{p}: {} vs {}", a.coeff(p), b.coeff(p)));
                    }
                    residual.push(to_fraction_string(&diff));
                }
            }
        }
    }
    let mut report = VerificationReport::exact("large-y expansion against recursion", residual)
        .with_input("max_tau_degree", max_tau_degree)
        .with_input("orders", orders)
        .with_input("coefficients_compared", compared);
    for m in mismatches {
        report = report.with_note(m);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recursion::{c_triple, k3_monomial};

    #[test]
    fn printed_coefficients() {
        let p0 = phi0(3);
        assert_eq!(p0.terms().len(), 3);
        let p2 = phi2_k3();
        let v1 = v_edge(2, 3);
        assert_eq!(p2.coeff(&EdgeMonomial::single(v1, 3)), int(1));
        assert_eq!(p2.coeff(&EdgeMonomial::single(v1, 5)), rat(1, 20));
        let m = EdgeMonomial::from_pairs([(v1, 2), (v_edge(1, 3), 1), (v_edge(1, 2), 1)]);
        assert_eq!(p2.coeff(&m), rat(-1, 2));
        let m = EdgeMonomial::from_pairs([(v1, 3), (v_edge(1, 3), 1), (v_edge(1, 2), 1)]);
        assert_eq!(p2.coeff(&m), rat(-1, 8));
        assert_eq!(phi1(2).terms().len(), 2);
        assert_eq!(phi1(4).terms().len(), 4 + 12);
    }

    #[test]
    fn every_order_is_symmetric() {
        for k in 2..=4 {
            for p in PhiSeries::for_k(k).unwrap().orders {
                assert!(p.is_symmetric(), "k={k}");
            }
        }
    }

    #[test]
    fn residuals_vanish_at_listed_point() {
        let pt = SpectralPoint::from_ints(&[0, 1, 3], &[0, 1, 2]).unwrap();
        for order in 0..3 {
            for y in [int(1), int(5), rat(-3, 2)] {
                assert!(phi_order_residual(order, &pt, &y).unwrap().passed, "order {order}");
            }
        }
    }

    #[test]
    fn residual_suites_for_several_k() {
        for order in 0..3 {
            assert!(phi_order_suite(order, 3, 20, 5).unwrap().passed);
        }
        for k in [2, 4, 5] {
            for order in 0..2 {
                assert!(phi_order_suite(order, k, 10, 9).unwrap().passed, "k={k} order={order}");
            }
        }
    }

    #[test]
    fn perturbed_phi_is_rejected() {
        // dropping the cubic term of phi_1 must break its equation
        let pt = SpectralPoint::from_ints(&[0, 1, 3], &[0, 1, 2]).unwrap();
        let vp = VPoint::new(&pt, &int(2)).unwrap();
        let mut wrong = phi1(3);
        wrong.add_term(EdgeMonomial::single(v_edge(1, 2), 3), rat(1, 12));
        let mut s = vp.drift(&wrong);
        for a in 0..3 {
            let g = vp.grad(&phi0(3), a);
            s += &(&(&g * &g) + &vp.second(&phi0(3), a));
        }
        assert!(!s.is_zero());
    }

    #[test]
    fn first_coefficients_from_expansion() {
        let phi = PhiSeries::for_k(3).unwrap().to_tau_series(3).unwrap();
        let e = series_exp_truncate(&phi, 3, None).unwrap();
        // 1/tau_12: y/2
        assert_eq!(e.coeff(&k3_monomial(1, 0, 0)), YPolynomial::linear(int(0), rat(1, 2)));
        // 1/tau_12^2: y^2/8 - y/2 is the full c(2)
        assert_eq!(e.coeff(&k3_monomial(2, 0, 0)), c_triple(2, 0, 0));
        let tri = e.coeff(&k3_monomial(1, 1, 1));
        let exact = c_triple(1, 1, 1);
        for p in [1usize, 2, 3] {
            assert_eq!(tri.coeff(p), exact.coeff(p));
        }
    }

    #[test]
    fn agreement_through_degree_five() {
        let r = largey_vs_recursion(5, 3).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn fourth_order_is_not_reproduced() {
        // phi_3 is absent, so the y^(d-3) coefficients differ somewhere
        let r = largey_vs_recursion(5, 3).unwrap();
        assert!(r.passed);
        let phi = PhiSeries::for_k(3).unwrap().to_tau_series(4).unwrap();
        let e = series_exp_truncate(&phi, 4, None).unwrap();
        let exact = chi_k3(None, 4);
        let differs = exact.terms().iter().any(|(m, c)| {
            let d = m.degree() as usize;
            d >= 3 && e.coeff(m).coeff(d - 3) != c.coeff(d - 3)
        });
        assert!(differs);
    }

    #[test]
    fn display() {
        assert_eq!(phi0(2).to_string(), "1/2 v12");
        assert_eq!(phi1(2).to_string(), "-1/2 v12^2 - 1/12 v12^3");
    }
}
