//! Truncated series in the edge variables `1/tau_ab` with coefficients in `y`.
//!
//! A stored coefficient `c` on a monomial of total degree `d` stands for the
//! term `i^d * c * prod_ab tau_ab^(-n_ab)`. The phase is multiplicative, so
//! products of series multiply stored coefficients directly and all linear
//! algebra stays over the rationals.

use num::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use crate::edge::{EdgeMonomial, VLabeling};
use crate::error::{HizError, Result};
use crate::gauss::GaussRational;
use crate::point::SpectralPoint;
use crate::rational::{to_fraction_string, Rational};
use crate::ypoly::YPolynomial;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChiSeries {
    k: usize,
    max_degree: u32,
    terms: BTreeMap<EdgeMonomial, YPolynomial>,
}

impl ChiSeries {
    /// The series `1`.
    pub fn one(k: usize, max_degree: u32) -> Self {
        Self::from_terms(k, max_degree, [(EdgeMonomial::one(), YPolynomial::one())])
            .expect("constant term always fits")
    }

    pub fn zero(k: usize, max_degree: u32) -> Self {
        Self { k, max_degree, terms: BTreeMap::new() }
    }

    /// Builds a series, summing repeated monomials and dropping zeros.
    ///
    /// Fails if a monomial touches a vertex above `k` or exceeds `max_degree`.
    pub fn from_terms<I>(k: usize, max_degree: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (EdgeMonomial, YPolynomial)>,
    {
        let mut s = Self::zero(k, max_degree);
        for (m, c) in terms {
            if m.max_vertex() > k {
                return Err(HizError::InvalidArgument(format!("monomial {m} does not fit k={k}")));
            }
            if m.degree() > max_degree {
                return Err(HizError::InvalidArgument(format!(
                    "monomial {m} exceeds max_degree {max_degree}"
                )));
            }
            s.add_term(m, &c);
        }
        Ok(s)
    }

    pub(crate) fn add_term(&mut self, m: EdgeMonomial, c: &YPolynomial) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<EdgeMonomial, YPolynomial> {
        &self.terms
    }

    pub fn coeff(&self, m: &EdgeMonomial) -> YPolynomial {
        self.terms.get(m).cloned().unwrap_or_else(YPolynomial::zero)
    }

    /// Highest degree actually present.
    pub fn top_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// True when the constant term is exactly 1, as required of chi.
    pub fn has_unit_constant(&self) -> bool {
        self.coeff(&EdgeMonomial::one()) == YPolynomial::one()
    }

    /// Terms sorted by (total degree, lexicographic edges).
    pub fn sorted_terms(&self) -> Vec<(&EdgeMonomial, &YPolynomial)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| a.0.display_cmp(b.0, self.k));
        v
    }

    pub fn with_max_degree(&self, max_degree: u32) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.degree() <= max_degree)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        Self { k: self.k, max_degree, terms }
    }

    /// Substitutes a numeric `y`; every coefficient becomes a constant.
    pub fn at_y(&self, y: &Rational) -> Self {
        let mut out = Self::zero(self.k, self.max_degree);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &YPolynomial::constant(c.eval(y)));
        }
        out
    }

    /// Numeric coefficient at `y` (stored value, no phase).
    pub fn coeff_at(&self, m: &EdgeMonomial, y: &Rational) -> Rational {
        self.terms.get(m).map(|c| c.eval(y)).unwrap_or_else(Rational::zero)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.k != other.k {
            return Err(HizError::MismatchedK { left: self.k, right: other.k });
        }
        let mut out = self.clone();
        out.max_degree = self.max_degree.max(other.max_degree);
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn scale(&self, s: &YPolynomial) -> Self {
        let mut out = Self::zero(self.k, self.max_degree);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &(c * s));
        }
        out
    }

    /// Relabels vertices (`perm[v]` = image of zero-based vertex `v`).
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let mut out = Self::zero(self.k, self.max_degree);
        for (m, c) in &self.terms {
            out.add_term(m.relabel(perm), c);
        }
        out
    }

    /// Exact value `sum_M i^deg(M) c_M(y) prod tau^-n` at a spectral point.
    pub fn eval(&self, pt: &SpectralPoint, y: &Rational) -> Result<GaussRational> {
        if pt.k() != self.k {
            return Err(HizError::MismatchedK { left: self.k, right: pt.k() });
        }
        let inv_tau = inverse_taus(pt, self.k)?;
        let mut re = Rational::zero();
        let mut im = Rational::zero();
        for (m, c) in &self.terms {
            let mut v = c.eval(y);
            if v.is_zero() {
                continue;
            }
            for (e, n) in m.iter() {
                let w = &inv_tau[&e];
                for _ in 0..n {
                    v *= w;
                }
            }
            match m.degree() % 4 {
                0 => re += v,
                1 => im += v,
                2 => re -= v,
                _ => im -= v,
            }
        }
        Ok(GaussRational::new(re, im))
    }

    /// Floating-point value at real spectral data (`x`, `lambda` as f64).
    pub fn eval_f64(&self, x: &[f64], lambda: &[f64], y: &Rational) -> num::complex::Complex64 {
        let mut acc = num::complex::Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut v = crate::rational::to_f64(&c.eval(y));
            for (e, n) in m.iter() {
                let (a, b) = e.ends0();
                let tau = (x[a] - x[b]) * (lambda[a] - lambda[b]);
                v /= tau.powi(n as i32);
            }
            acc += match m.degree() % 4 {
                0 => num::complex::Complex64::new(v, 0.0),
                1 => num::complex::Complex64::new(0.0, v),
                2 => num::complex::Complex64::new(-v, 0.0),
                _ => num::complex::Complex64::new(0.0, -v),
            };
        }
        acc
    }

    /// Aligned text with the phase written out, in `τ` (or `v`) notation.
    pub fn to_text(&self, labels: Option<&VLabeling>) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            let d = m.degree();
            // i^d * c: sign flips for d = 2, 3 mod 4, an `i` for odd d
            let negate = matches!(d % 4, 2 | 3);
            let imaginary = d % 2 == 1;
            let (sign, body) = if c.is_constant() {
                let v = c.coeff(0);
                let v = if negate { -v } else { v };
                let neg = v < Rational::zero();
                let mag = if neg { -v } else { v };
                let mut body = if mag.is_one() && (imaginary || !m.is_one()) {
                    String::new()
                } else {
                    mag.to_string()
                };
                if imaginary {
                    body.push('i');
                }
                (if neg { "-" } else { "+" }, body)
            } else {
                let mut body = format!("({c})");
                if imaginary {
                    body = format!("i{body}");
                }
                (if negate { "-" } else { "+" }, body)
            };
            let denom = match labels {
                Some(l) => l.format(m),
                None => m.to_string(),
            };
            // v labels already name inverse taus
            let term = match (m.is_one(), body.is_empty(), labels.is_some()) {
                (true, _, _) => body,
                (false, true, true) => denom,
                (false, false, true) => format!("{body} {denom}"),
                (false, true, false) => format!("1/({denom})"),
                (false, false, false) => format!("{body}/({denom})"),
            };
            if idx == 0 {
                if sign == "-" {
                    out.push('-');
                }
            } else {
                out.push_str(&format!(" {sign} "));
            }
            out.push_str(&term);
        }
        out
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(SeriesJson::from(self)).expect("series serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SeriesJson::from(self)).expect("series serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: SeriesJson =
            serde_json::from_str(text).map_err(|e| HizError::Parse(e.to_string()))?;
        raw.try_into()
    }

    pub fn from_json_value(v: serde_json::Value) -> Result<Self> {
        let raw: SeriesJson = serde_json::from_value(v).map_err(|e| HizError::Parse(e.to_string()))?;
        raw.try_into()
    }
}

fn inverse_taus(
    pt: &SpectralPoint,
    k: usize,
) -> Result<BTreeMap<crate::edge::EdgeIndex, Rational>> {
    let mut out = BTreeMap::new();
    for e in crate::edge::edges(k) {
        let t = pt.tau(e);
        if t.is_zero() {
            return Err(HizError::CoincidentEigenvalues(format!("tau_{e} = 0")));
        }
        out.insert(e, t.recip());
    }
    Ok(out)
}

/// Product with truncation by total degree and, optionally, per-edge exponent.
pub fn series_multiply_truncate(
    s1: &ChiSeries,
    s2: &ChiSeries,
    max_total_degree: u32,
    per_edge_cap: Option<u32>,
) -> Result<ChiSeries> {
    if s1.k != s2.k {
        return Err(HizError::MismatchedK { left: s1.k, right: s2.k });
    }
    let mut out = ChiSeries::zero(s1.k, max_total_degree);
    for (m1, c1) in &s1.terms {
        for (m2, c2) in &s2.terms {
            if m1.degree() + m2.degree() > max_total_degree {
                continue;
            }
            let m = m1.mul(m2);
            if per_edge_cap.is_some_and(|cap| m.max_exponent() > cap) {
                continue;
            }
            out.add_term(m, &(c1 * c2));
        }
    }
    Ok(out)
}

/// `exp(phi)` truncated like [`series_multiply_truncate`]; `phi` must have
/// no constant term.
pub fn series_exp_truncate(
    phi: &ChiSeries,
    max_total_degree: u32,
    per_edge_cap: Option<u32>,
) -> Result<ChiSeries> {
    if !phi.coeff(&EdgeMonomial::one()).is_zero() {
        return Err(HizError::InvalidArgument("exp needs a series without constant term".into()));
    }
    let phi = phi.with_max_degree(max_total_degree);
    let mut result = ChiSeries::one(phi.k, max_total_degree);
    let mut power = ChiSeries::one(phi.k, max_total_degree);
    let mut factorial = Rational::one();
    for n in 1..=max_total_degree {
        power = series_multiply_truncate(&power, &phi, max_total_degree, per_edge_cap)?;
        if power.is_empty() {
            break;
        }
        factorial *= Rational::from_integer(n.into());
        result = result.add(&power.scale(&YPolynomial::constant(factorial.recip())))?;
    }
    result.max_degree = max_total_degree;
    Ok(result)
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    k: usize,
    max_degree: u32,
    terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    edges: BTreeMap<String, u32>,
    coeff_y: Vec<String>,
}

impl From<&ChiSeries> for SeriesJson {
    fn from(s: &ChiSeries) -> Self {
        SeriesJson {
            k: s.k,
            max_degree: s.max_degree,
            terms: s
                .sorted_terms()
                .into_iter()
                .map(|(m, c)| TermJson {
                    edges: m.to_json_map(),
                    coeff_y: c.coeffs().iter().map(to_fraction_string).collect(),
                })
                .collect(),
        }
    }
}

impl TryFrom<SeriesJson> for ChiSeries {
    type Error = HizError;
    fn try_from(raw: SeriesJson) -> Result<Self> {
        let mut terms = Vec::with_capacity(raw.terms.len());
        for t in raw.terms {
            terms.push((
                EdgeMonomial::from_json_map(&t.edges)?,
                YPolynomial::from_fraction_strings(&t.coeff_y)?,
            ));
        }
        ChiSeries::from_terms(raw.k, raw.max_degree, terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edge::EdgeIndex;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    fn e(a: usize, b: usize) -> EdgeIndex {
        EdgeIndex::new(a, b).unwrap()
    }

    /// The printed k=3, beta=4 series with stored (phase-free) coefficients.
    fn i3() -> ChiSeries {
        let m = |pairs: &[(usize, usize)]| EdgeMonomial::from_pairs(pairs.iter().map(|&(a, b)| (e(a, b), 1)));
        ChiSeries::from_terms(
            3,
            3,
            vec![
                (EdgeMonomial::one(), YPolynomial::one()),
                (m(&[(1, 2)]), 2.into()),
                (m(&[(2, 3)]), 2.into()),
                (m(&[(1, 3)]), 2.into()),
                (m(&[(1, 2), (2, 3)]), 4.into()),
                (m(&[(2, 3), (1, 3)]), 4.into()),
                (m(&[(1, 2), (1, 3)]), 4.into()),
                (m(&[(1, 2), (2, 3), (1, 3)]), 12.into()),
            ],
        )
        .unwrap()
    }

    #[test]
    fn constant_series_evaluates_to_one() {
        let pt = SpectralPoint::from_ints(&[0, 1, 3], &[0, 1, 2]).unwrap();
        assert_eq!(ChiSeries::one(3, 0).eval(&pt, &int(4)).unwrap(), GaussRational::one());
    }

    #[test]
    fn single_edge_phase() {
        // i (y/2)/tau_12 at y=4, tau_12=2 gives i
        let s = ChiSeries::from_terms(
            2,
            1,
            [(EdgeMonomial::single(e(1, 2), 1), YPolynomial::linear(int(0), rat(1, 2)))],
        )
        .unwrap();
        let pt = SpectralPoint::from_ints(&[0, 2], &[0, 1]).unwrap();
        assert_eq!(s.eval(&pt, &int(4)).unwrap(), GaussRational::i());
    }

    #[test]
    fn printed_k3_series_matches_direct_substitution() {
        // direct: 1 + 2i(1/t12 + 1/t23 + 1/t31) - 4(...) - 12i/(t12 t23 t31)
        // x=(0,1,3), lambda=(0,1,2): t12=1, t23=2, t31=6
        let (t12, t23, t31) = (int(1), int(2), int(6));
        let one = Rational::one();
        let s1 = &one / &t12 + &one / &t23 + &one / &t31;
        let s2 = &one / (&t12 * &t23) + &one / (&t23 * &t31) + &one / (&t31 * &t12);
        let s3 = &one / (&t12 * &t23 * &t31);
        let expected = GaussRational::new(&one - int(4) * s2, int(2) * s1 - int(12) * s3);
        let pt = SpectralPoint::from_ints(&[0, 1, 3], &[0, 1, 2]).unwrap();
        assert_eq!(i3().eval(&pt, &int(4)).unwrap(), expected);
    }

    #[test]
    fn eval_rejects_wrong_k() {
        let pt = SpectralPoint::from_ints(&[0, 1], &[0, 1]).unwrap();
        assert!(matches!(i3().eval(&pt, &int(4)), Err(HizError::MismatchedK { .. })));
    }

    #[test]
    fn product_with_cap() {
        let a = ChiSeries::from_terms(3, 1, [(EdgeMonomial::one(), 1.into()), (EdgeMonomial::single(e(1, 2), 1), 1.into())]).unwrap();
        let b = ChiSeries::from_terms(3, 1, [(EdgeMonomial::one(), 1.into()), (EdgeMonomial::single(e(2, 3), 1), 1.into())]).unwrap();
        let p = series_multiply_truncate(&a, &b, 2, Some(1)).unwrap();
        assert_eq!(p.len(), 4);
        let sq = series_multiply_truncate(&a, &a, 2, Some(1)).unwrap();
        assert_eq!(sq.coeff(&EdgeMonomial::single(e(1, 2), 1)), 2.into());
        assert!(sq.coeff(&EdgeMonomial::single(e(1, 2), 2)).is_zero());
        let one = ChiSeries::one(3, 4);
        assert_eq!(series_multiply_truncate(&one, &one, 4, None).unwrap(), one);
        let other = ChiSeries::one(2, 1);
        assert!(series_multiply_truncate(&one, &other, 1, None).is_err());
    }

    #[test]
    fn exp_of_phi_gives_capped_printed_series() {
        let m = |pairs: &[(usize, usize)]| EdgeMonomial::from_pairs(pairs.iter().map(|&(a, b)| (e(a, b), 1)));
        let phi = ChiSeries::from_terms(
            3,
            3,
            vec![
                (m(&[(1, 2)]), 2.into()),
                (m(&[(2, 3)]), 2.into()),
                (m(&[(1, 3)]), 2.into()),
                (m(&[(1, 2), (2, 3), (1, 3)]), 4.into()),
            ],
        )
        .unwrap();
        assert_eq!(series_exp_truncate(&phi, 3, Some(1)).unwrap(), i3());
    }

    #[test]
    fn text_form() {
        let t = i3().to_text(None);
        assert_eq!(
            t,
            "1 + 2i/(τ12) + 2i/(τ13) + 2i/(τ23) - 4/(τ12 τ13) - 4/(τ12 τ23) - 4/(τ13 τ23) - 12i/(τ12 τ13 τ23)"
        );
        assert_eq!(ChiSeries::one(2, 0).to_text(None), "1");
    }

    #[test]
    fn json_schema_shape() {
        let v = i3().to_json_value();
        assert_eq!(v["k"], 3);
        assert_eq!(v["terms"][0]["edges"], serde_json::json!({}));
        assert_eq!(v["terms"][1]["edges"], serde_json::json!({"1-2": 1}));
        assert_eq!(v["terms"][1]["coeff_y"], serde_json::json!(["2/1"]));
        assert!(ChiSeries::from_json("{\"k\":2,\"max_degree\":1,\"terms\":[{\"edges\":{\"1-3\":1},\"coeff_y\":[\"1/1\"]}]}").is_err());
    }

    fn small_series(k: usize) -> impl Strategy<Value = ChiSeries> {
        let ne = crate::edge::edge_count(k);
        prop::collection::vec((prop::collection::vec(0u32..3, ne), -4i64..5, -3i64..4), 0..5).prop_map(move |ts| {
            ChiSeries::from_terms(
                k,
                12,
                ts.into_iter().map(|(d, c0, c1)| {
                    (EdgeMonomial::from_dense(k, &d), YPolynomial::from_coeffs(vec![int(c0), int(c1)]))
                }),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn json_round_trip(s in small_series(3)) {
            prop_assert_eq!(ChiSeries::from_json(&s.to_json()).unwrap(), s);
        }

        #[test]
        fn truncated_product_is_associative_and_distributive(a in small_series(3), b in small_series(3), c in small_series(3)) {
            let ab_c = series_multiply_truncate(&series_multiply_truncate(&a, &b, 8, Some(3)).unwrap(), &c, 8, Some(3)).unwrap();
            let a_bc = series_multiply_truncate(&a, &series_multiply_truncate(&b, &c, 8, Some(3)).unwrap(), 8, Some(3)).unwrap();
            prop_assert_eq!(ab_c, a_bc);
            let left = series_multiply_truncate(&a, &b.add(&c).unwrap(), 8, None).unwrap();
            let right = series_multiply_truncate(&a, &b, 8, None).unwrap().add(&series_multiply_truncate(&a, &c, 8, None).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn untruncated_product_evaluates_multiplicatively(a in small_series(3), b in small_series(3), xs in prop::collection::vec(-6i64..7, 3), ls in prop::collection::vec(-6i64..7, 3), yv in -3i64..4) {
            let pt = SpectralPoint::from_ints(&xs, &ls);
            prop_assume!(pt.is_ok());
            let pt = pt.unwrap();
            let y = int(yv);
            // every factor has degree <= 12 so the product fits in 24
            let p = series_multiply_truncate(&a, &b, 24, None).unwrap();
            prop_assert_eq!(p.eval(&pt, &y).unwrap(), &a.eval(&pt, &y).unwrap() * &b.eval(&pt, &y).unwrap());
        }
    }
}
