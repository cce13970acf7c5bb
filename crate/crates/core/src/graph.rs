//! Complete-graph weights and the `beta = 4` expansion.
//!
//! At `beta = 4` every monomial of `chi` has edge exponents 0 or 1, i.e. it is
//! a graph on `k` vertices, and the coefficient of the complete graph `K_n`
//! is `C_n = prod_{l=1..n} l!`. The full series is obtained from the PDE
//! solver; the documented graph rules are kept as independent checks.

use std::fmt;
use std::str::FromStr;

use num::{BigInt, One, Zero};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::edge::{edges, EdgeIndex, EdgeMonomial, VLabeling};
use crate::error::{HizError, Result};
use crate::oracle::mc::{mc_mean, McConfig};
use crate::pde::{solve_chi, SolveOptions};
use crate::rational::{int, Rational};
use crate::report::VerificationReport;
use crate::series::ChiSeries;

/// `C_n = prod_{l=1..n} l!`, with `C_0 = 1`.
pub fn complete_weight(n: u32) -> BigInt {
    let mut total = BigInt::one();
    let mut fact = BigInt::one();
    for l in 1..=n {
        fact *= l;
        total *= &fact;
    }
    total
}

/// Tetrahedron monomial `1/(tau_12^n tau_13^m tau_23^r tau_24^p tau_34^q tau_14^l)`
/// for `[n, m, r, p, q, l]`.
pub fn tetrahedron_monomial(idx: [u32; 6]) -> EdgeMonomial {
    let order = [(1, 2), (1, 3), (2, 3), (2, 4), (3, 4), (1, 4)];
    EdgeMonomial::from_pairs(
        order
            .iter()
            .zip(idx)
            .map(|(&(a, b), n)| (EdgeIndex::new(a, b).expect("tetrahedron edge"), n)),
    )
}

fn cw(n: u32) -> Rational {
    Rational::from_integer(complete_weight(n))
}

/// Monte Carlo estimate of `E[prod_{i<j} (z_i - z_j)^2]` for independent
/// standard normal `z_1..z_n`, compared with `C_n` at four standard errors.
pub fn gaussian_weight_check(n: u32, samples: u64, seed: u64) -> Result<VerificationReport> {
    if !(1..=4).contains(&n) {
        return Err(HizError::InvalidArgument(format!("n={n} outside 1..=4")));
    }
    let cfg = McConfig::new(samples, seed)?;
    let est = mc_mean(&cfg, |rng| {
        let z: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let mut p = 1.0;
        for i in 0..z.len() {
            for j in i + 1..z.len() {
                p *= (z[i] - z[j]).powi(2);
            }
        }
        num::complex::Complex64::new(p, 0.0)
    });
    let reference = crate::rational::to_f64(&cw(n));
    Ok(VerificationReport::statistical(
        format!("gaussian weight n={n}"),
        [est.mean.re, est.mean.im],
        [reference, 0.0],
        est.std_error,
        4.0,
        est.samples,
    )
    .with_seed(seed)
    .with_input("n", n))
}

/// The exact `beta = 4` series for `2 <= k <= 6`.
pub fn beta4_chi(k: usize) -> Result<ChiSeries> {
    beta4_chi_with(k, &SolveOptions::default())
}

pub fn beta4_chi_with(k: usize, opts: &SolveOptions) -> Result<ChiSeries> {
    if !(2..=6).contains(&k) {
        return Err(HizError::UnsupportedK { k, min: 2, max: 6 });
    }
    Ok(solve_chi(k, &int(4), 1, opts)?.series)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeletionRule {
    /// `K_k` minus one edge: `C_{k-1}^2 / C_{k-2}`.
    OneLine,
    /// `K_k` minus two edges sharing a vertex: `C_{k-1} C_{k-2} / C_{k-3}`.
    TwoLinesSamePoint,
    /// `K_k` minus two disjoint edges: `C_{k-2}^4 C_{k-4} / C_{k-3}^4`.
    TwoLinesNonadjacent,
}

impl DeletionRule {
    pub const ALL: [DeletionRule; 3] = [Self::OneLine, Self::TwoLinesSamePoint, Self::TwoLinesNonadjacent];

    pub fn name(&self) -> &'static str {
        match self {
            Self::OneLine => "one_line",
            Self::TwoLinesSamePoint => "two_lines_same_point",
            Self::TwoLinesNonadjacent => "two_lines_nonadjacent",
        }
    }

    /// Smallest `k` for which the rule is defined.
    pub fn min_k(&self) -> usize {
        match self {
            Self::OneLine => 2,
            _ => 4,
        }
    }

    /// The monomial of the complete graph with the rule's edges removed.
    pub fn monomial(&self, k: usize) -> Result<EdgeMonomial> {
        self.check(k)?;
        let e = |a, b| EdgeIndex::new(a, b).expect("valid edge");
        let removed = match self {
            Self::OneLine => vec![e(1, 2)],
            Self::TwoLinesSamePoint => vec![e(1, 2), e(1, 3)],
            Self::TwoLinesNonadjacent => vec![e(1, 2), e(3, 4)],
        };
        Ok(EdgeMonomial::from_pairs(edges(k).into_iter().filter(|x| !removed.contains(x)).map(|x| (x, 1))))
    }

    fn check(&self, k: usize) -> Result<()> {
        if k < self.min_k() {
            return Err(HizError::UndefinedRule { rule: self.name().into(), k });
        }
        Ok(())
    }
}

impl fmt::Display for DeletionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DeletionRule {
    type Err = HizError;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|r| r.name() == s || r.name().replace('_', "-") == s)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|r| r.name()).collect();
                HizError::Parse(format!("unknown rule {s:?}; expected one of {}", names.join(", ")))
            })
    }
}

/// Weight of the graph obtained from `K_k` by the deletion `rule`.
pub fn deletion_rule_weight(k: usize, rule: DeletionRule) -> Result<Rational> {
    rule.check(k)?;
    let k = k as u32;
    Ok(match rule {
        DeletionRule::OneLine => cw(k - 1) * cw(k - 1) / cw(k - 2),
        DeletionRule::TwoLinesSamePoint => cw(k - 1) * cw(k - 2) / cw(k - 3),
        DeletionRule::TwoLinesNonadjacent => {
            let (a, b) = (cw(k - 2), cw(k - 3));
            num::pow(a, 4) * cw(k - 4) / num::pow(b, 4)
        }
    })
}

/// `deletion_rule_weight / C_k`.
pub fn deletion_rule_ratio(k: usize, rule: DeletionRule) -> Result<Rational> {
    Ok(deletion_rule_weight(k, rule)? / cw(k as u32))
}

/// Sizes of the connected components of the graph of `m` on `k` vertices
/// (isolated vertices count as size 1) if every component is complete.
pub fn clique_decomposition(m: &EdgeMonomial, k: usize) -> Option<Vec<usize>> {
    if m.max_exponent() > 1 {
        return None;
    }
    let mut comp: Vec<usize> = (0..k).collect();
    fn root(c: &mut [usize], mut v: usize) -> usize {
        while c[v] != v {
            c[v] = c[c[v]];
            v = c[v];
        }
        v
    }
    for (e, _) in m.iter() {
        let (a, b) = e.ends0();
        let (ra, rb) = (root(&mut comp, a), root(&mut comp, b));
        comp[ra] = rb;
    }
    let mut sizes = std::collections::BTreeMap::<usize, (usize, usize)>::new();
    for v in 0..k {
        sizes.entry(root(&mut comp, v)).or_default().0 += 1;
    }
    for (e, _) in m.iter() {
        let r = root(&mut comp, e.ends0().0);
        sizes.get_mut(&r).expect("component").1 += 1;
    }
    sizes
        .values()
        .all(|(n, edges)| *edges == n * (n - 1) / 2)
        .then(|| sizes.values().map(|(n, _)| *n).collect())
}

/// `prod C_{size}` over the cliques of a disjoint union of complete graphs.
pub fn clique_product_weight(m: &EdgeMonomial, k: usize) -> Option<BigInt> {
    clique_decomposition(m, k).map(|sizes| sizes.into_iter().map(|s| complete_weight(s as u32)).product())
}

/// A group of monomials sharing a weight in a printed table; the weight is
/// `prod C_num / prod C_den` and the displayed coefficient carries `i^degree`.
#[derive(Clone, Debug)]
pub struct PrintedGroup {
    pub weight: &'static str,
    pub num: Vec<u32>,
    pub den: Vec<u32>,
    pub monomials: Vec<Vec<usize>>,
}

impl PrintedGroup {
    pub fn value(&self) -> Rational {
        let n = self.num.iter().fold(Rational::one(), |a, c| a * cw(*c));
        let d = self.den.iter().fold(Rational::one(), |a, c| a * cw(*c));
        n / d
    }
}

fn group(weight: &'static str, num: &[u32], den: &[u32], monomials: &[&[usize]]) -> PrintedGroup {
    PrintedGroup {
        weight,
        num: num.to_vec(),
        den: den.to_vec(),
        monomials: monomials.iter().map(|m| m.to_vec()).collect(),
    }
}

/// The printed three-point table in `v_1 = 1/tau_23, v_2 = 1/tau_13, v_3 = 1/tau_12`.
pub fn printed_table_k3() -> Vec<PrintedGroup> {
    vec![
        group("1", &[], &[], &[&[]]),
        group("C2", &[2], &[], &[&[1], &[2], &[3]]),
        group("C2^2", &[2, 2], &[], &[&[1, 2], &[2, 3], &[1, 3]]),
        group("C3", &[3], &[], &[&[1, 2, 3]]),
    ]
}

/// The printed four-point table in the labelling
/// `v_1 = 1/tau_12, v_2 = 1/tau_23, v_3 = 1/tau_13, v_4 = 1/tau_14, v_5 = 1/tau_24, v_6 = 1/tau_34`.
pub fn printed_table_k4() -> Vec<PrintedGroup> {
    vec![
        group("1", &[], &[], &[&[]]),
        group("C2 C1/C0", &[2, 1], &[0], &[&[1], &[2], &[3], &[4], &[5], &[6]]),
        group(
            "C2^2/C1",
            &[2, 2],
            &[1],
            &[
                &[1, 2], &[2, 3], &[1, 3], &[1, 4], &[1, 5], &[2, 5],
                &[2, 6], &[3, 6], &[3, 4], &[4, 5], &[4, 6], &[5, 6],
            ],
        ),
        group("C2^2", &[2, 2], &[], &[&[1, 6], &[2, 4], &[3, 5]]),
        group("C3 C1/C0", &[3, 1], &[0], &[&[1, 2, 3], &[1, 4, 5], &[2, 5, 6], &[3, 4, 6]]),
        group(
            "C2^3/C1^2",
            &[2, 2, 2],
            &[1, 1],
            &[
                &[1, 3, 5], &[1, 3, 6], &[2, 3, 4], &[3, 4, 5], &[3, 5, 6], &[1, 5, 6],
                &[2, 4, 5], &[2, 3, 5], &[1, 2, 4], &[1, 4, 6], &[1, 2, 6], &[2, 4, 6],
            ],
        ),
        group("C2^3/C1", &[2, 2, 2], &[1], &[&[1, 2, 5], &[1, 3, 4], &[2, 3, 6], &[4, 5, 6]]),
        group(
            "C2^4 C0/C1^4",
            &[2, 2, 2, 2, 0],
            &[1, 1, 1, 1],
            &[&[1, 2, 4, 6], &[1, 3, 5, 6], &[2, 3, 4, 5]],
        ),
        group(
            "C3 C2/C1",
            &[3, 2],
            &[1],
            &[
                &[2, 4, 5, 6], &[2, 3, 5, 6], &[1, 2, 5, 6], &[3, 4, 5, 6],
                &[1, 3, 4, 6], &[2, 3, 4, 6], &[1, 2, 3, 5], &[1, 2, 3, 6],
                &[1, 2, 3, 4], &[1, 3, 4, 5], &[1, 2, 4, 5], &[1, 4, 5, 6],
            ],
        ),
        group(
            "C3^2/C2",
            &[3, 3],
            &[2],
            &[
                &[2, 3, 4, 5, 6], &[1, 3, 4, 5, 6], &[1, 2, 4, 5, 6],
                &[1, 2, 3, 5, 6], &[1, 2, 3, 4, 6], &[1, 2, 3, 4, 5],
            ],
        ),
        group("C4", &[4], &[], &[&[1, 2, 3, 4, 5, 6]]),
    ]
}

/// Compares a series with a printed table; returns the mismatches as
/// `(monomial, printed, found)`. Monomials missing from the table must be absent.
pub fn compare_with_table(
    s: &ChiSeries,
    labels: &VLabeling,
    table: &[PrintedGroup],
) -> Result<Vec<(EdgeMonomial, Rational, Rational)>> {
    let mut listed = std::collections::BTreeSet::new();
    let mut bad = Vec::new();
    let y = int(4);
    for g in table {
        for vs in &g.monomials {
            let m = labels.monomial(vs)?;
            let found = s.coeff_at(&m, &y);
            if found != g.value() {
                bad.push((m.clone(), g.value(), found));
            }
            listed.insert(m);
        }
    }
    for m in s.terms().keys() {
        if !listed.contains(m) {
            bad.push((m.clone(), Rational::zero(), s.coeff_at(m, &y)));
        }
    }
    Ok(bad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edge::permutations;
    use crate::rational::rat;

    #[test]
    fn complete_weights() {
        let expect = [1u64, 1, 2, 12, 288, 34560, 24883200];
        for (n, v) in expect.iter().enumerate() {
            assert_eq!(complete_weight(n as u32), BigInt::from(*v));
        }
    }

    #[test]
    fn deletion_rules() {
        use DeletionRule::*;
        assert_eq!(deletion_rule_weight(4, OneLine).unwrap(), int(72));
        assert_eq!(deletion_rule_weight(4, TwoLinesNonadjacent).unwrap(), int(16));
        assert_eq!(deletion_rule_weight(5, OneLine).unwrap(), int(6912));
        assert_eq!(deletion_rule_ratio(4, TwoLinesNonadjacent).unwrap(), rat(1, 18));
        assert_eq!(deletion_rule_ratio(5, TwoLinesNonadjacent).unwrap(), rat(3, 80));
        assert_eq!(deletion_rule_ratio(6, TwoLinesNonadjacent).unwrap(), rat(2, 75));
        assert_eq!(deletion_rule_weight(4, TwoLinesSamePoint).unwrap(), int(24));
        assert!(matches!(deletion_rule_weight(3, TwoLinesSamePoint), Err(HizError::UndefinedRule { .. })));
        assert_eq!("two_lines_nonadjacent".parse::<DeletionRule>().unwrap(), TwoLinesNonadjacent);
        assert!("three_lines".parse::<DeletionRule>().is_err());
    }

    #[test]
    fn printed_tables_cover_every_graph() {
        let n: usize = printed_table_k4().iter().map(|g| g.monomials.len()).sum();
        assert_eq!(n, 64);
        let labels = VLabeling::k4();
        let mut all = std::collections::BTreeSet::new();
        for g in printed_table_k4() {
            for vs in &g.monomials {
                assert!(all.insert(labels.monomial(vs).unwrap()));
            }
        }
    }

    #[test]
    fn clique_decompositions() {
        let e = |a, b| EdgeIndex::new(a, b).unwrap();
        let two_edges = EdgeMonomial::from_pairs([(e(1, 2), 1), (e(3, 4), 1)]);
        assert_eq!(clique_decomposition(&two_edges, 4), Some(vec![2, 2]));
        assert_eq!(clique_product_weight(&two_edges, 4), Some(BigInt::from(4)));
        let path = EdgeMonomial::from_pairs([(e(1, 2), 1), (e(2, 3), 1)]);
        assert_eq!(clique_decomposition(&path, 3), None);
        assert_eq!(clique_product_weight(&EdgeMonomial::one(), 3), Some(BigInt::one()));
    }

    #[test]
    fn k3_and_k4_solutions_match_printed_tables() {
        let s3 = beta4_chi(3).unwrap();
        assert!(compare_with_table(&s3, &VLabeling::k3(), &printed_table_k3()).unwrap().is_empty());
        let s4 = beta4_chi(4).unwrap();
        assert!(compare_with_table(&s4, &VLabeling::k4(), &printed_table_k4()).unwrap().is_empty());
    }

    #[test]
    fn clique_unions_and_covariance_for_small_k() {
        for k in 2..=5 {
            let s = beta4_chi(k).unwrap();
            let top = EdgeMonomial::from_pairs(edges(k).into_iter().map(|e| (e, 1)));
            assert_eq!(s.coeff_at(&top, &int(4)), cw(k as u32));
            for (m, c) in s.terms() {
                if let Some(w) = clique_product_weight(m, k) {
                    assert_eq!(c.eval(&int(4)), Rational::from_integer(w), "k={k} {m}");
                }
                assert!(crate::rational::is_integer(&c.eval(&int(4))));
            }
            for p in permutations(k) {
                assert_eq!(s.relabel(&p), s, "k={k}");
            }
        }
    }

    #[test]
    fn deletion_rules_match_solved_coefficients() {
        for k in [4, 5] {
            let s = beta4_chi(k).unwrap();
            let top = cw(k as u32);
            for rule in DeletionRule::ALL {
                let c = s.coeff_at(&rule.monomial(k).unwrap(), &int(4));
                assert_eq!(c, deletion_rule_weight(k, rule).unwrap(), "k={k} {rule}");
                assert_eq!(c / &top, deletion_rule_ratio(k, rule).unwrap());
            }
        }
    }

    #[test]
    fn gaussian_weights_small_n() {
        for (n, samples) in [(1u32, 2_000u64), (2, 200_000), (3, 400_000)] {
            let r = gaussian_weight_check(n, samples, 17).unwrap();
            assert!(r.passed, "{r}");
        }
        assert!(matches!(gaussian_weight_check(2, 10, 1), Err(HizError::InsufficientSamples(_))));
    }
}
