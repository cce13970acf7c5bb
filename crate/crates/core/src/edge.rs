//! Edges of the complete graph on `k` vertices and monomials over them.
//!
//! An edge `a-b` stands for the pair variable `1/tau_ab`; an [`EdgeMonomial`]
//! is an exponent vector over those variables (or over `v_ab` in the
//! large-y module).

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{HizError, Result};

/// Unordered vertex pair stored as `a < b`, vertices labelled `1..=k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeIndex {
    a: u8,
    b: u8,
}

impl EdgeIndex {
    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a == b || a == 0 || b == 0 || a > 255 || b > 255 {
            return Err(HizError::InvalidArgument(format!("bad edge {a}-{b}")));
        }
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        Ok(Self { a: a as u8, b: b as u8 })
    }

    pub fn a(&self) -> usize {
        self.a as usize
    }

    pub fn b(&self) -> usize {
        self.b as usize
    }

    /// Zero-based vertex positions.
    pub fn ends0(&self) -> (usize, usize) {
        (self.a() - 1, self.b() - 1)
    }

    pub fn fits(&self, k: usize) -> bool {
        self.b() <= k
    }

    /// Image under a vertex relabeling given zero-based (`perm[v] = image of v`).
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let (a, b) = self.ends0();
        Self::new(perm[a] + 1, perm[b] + 1).expect("permutation maps distinct vertices apart")
    }
}

impl fmt::Display for EdgeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.a, self.b)
    }
}

impl FromStr for EdgeIndex {
    type Err = HizError;
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once('-')
            .ok_or_else(|| HizError::Parse(format!("edge '{s}' is not of the form a-b")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| HizError::Parse(format!("edge '{s}': {e}")))
        };
        EdgeIndex::new(parse(a)?, parse(b)?)
    }
}

/// All `k(k-1)/2` edges in lexicographic order.
pub fn edges(k: usize) -> Vec<EdgeIndex> {
    let mut out = Vec::with_capacity(k * k.saturating_sub(1) / 2);
    for a in 1..=k {
        for b in a + 1..=k {
            out.push(EdgeIndex { a: a as u8, b: b as u8 });
        }
    }
    out
}

pub fn edge_count(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

/// Position of an edge in [`edges`]`(k)`.
pub fn edge_position(e: EdgeIndex, k: usize) -> usize {
    let (a, b) = e.ends0();
    // rows before a contribute (k-1) + (k-2) + ... + (k-a)
    a * (2 * k - a - 1) / 2 + (b - a - 1)
}

/// Sparse exponent vector; absent edges have exponent zero.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct EdgeMonomial {
    exps: BTreeMap<EdgeIndex, u32>,
}

impl EdgeMonomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn single(e: EdgeIndex, exp: u32) -> Self {
        let mut m = Self::one();
        m.set(e, exp);
        m
    }

    pub fn from_pairs<I: IntoIterator<Item = (EdgeIndex, u32)>>(pairs: I) -> Self {
        let mut m = Self::one();
        for (e, n) in pairs {
            let cur = m.exponent(e);
            m.set(e, cur + n);
        }
        m
    }

    /// From a dense exponent vector aligned with [`edges`]`(k)`.
    pub fn from_dense(k: usize, dense: &[u32]) -> Self {
        Self::from_pairs(edges(k).into_iter().zip(dense.iter().copied()))
    }

    pub fn to_dense(&self, k: usize) -> Vec<u32> {
        let mut out = vec![0; edge_count(k)];
        for (e, n) in &self.exps {
            out[edge_position(*e, k)] = *n;
        }
        out
    }

    pub fn set(&mut self, e: EdgeIndex, exp: u32) {
        if exp == 0 {
            self.exps.remove(&e);
        } else {
            self.exps.insert(e, exp);
        }
    }

    pub fn exponent(&self, e: EdgeIndex) -> u32 {
        self.exps.get(&e).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (EdgeIndex, u32)> + '_ {
        self.exps.iter().map(|(e, n)| (*e, *n))
    }

    pub fn degree(&self) -> u32 {
        self.exps.values().sum()
    }

    pub fn max_exponent(&self) -> u32 {
        self.exps.values().copied().max().unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    /// Largest vertex label touched (0 for the empty monomial).
    pub fn max_vertex(&self) -> usize {
        self.exps.keys().map(|e| e.b()).max().unwrap_or(0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut m = self.clone();
        for (e, n) in other.iter() {
            let cur = m.exponent(e);
            m.set(e, cur + n);
        }
        m
    }

    pub fn relabel(&self, perm: &[usize]) -> Self {
        Self::from_pairs(self.iter().map(|(e, n)| (e.relabel(perm), n)))
    }

    /// Supporting edges (exponent > 0).
    pub fn support(&self) -> Vec<EdgeIndex> {
        self.exps.keys().copied().collect()
    }

    /// Order used for text output: total degree, then dense exponent vector
    /// descending (so `1-2` precedes `1-3` at equal degree).
    pub fn display_cmp(&self, other: &Self, k: usize) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.to_dense(k).cmp(&self.to_dense(k)))
    }

    /// Map form used by the JSON schema: `{"a-b": exp}`.
    pub fn to_json_map(&self) -> BTreeMap<String, u32> {
        self.exps.iter().map(|(e, n)| (e.to_string(), *n)).collect()
    }

    pub fn from_json_map(map: &BTreeMap<String, u32>) -> Result<Self> {
        let mut pairs = Vec::with_capacity(map.len());
        for (key, n) in map {
            pairs.push((key.parse::<EdgeIndex>()?, *n));
        }
        Ok(Self::from_pairs(pairs))
    }
}

impl Serialize for EdgeMonomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json_map().serialize(s)
    }
}

impl<'de> Deserialize<'de> for EdgeMonomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let map = BTreeMap::<String, u32>::deserialize(d)?;
        Self::from_json_map(&map).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for EdgeMonomial {
    /// `τ12 τ13^2` style (the monomial stands for the inverse of this product).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .iter()
            .map(|(e, n)| {
                if n == 1 {
                    format!("τ{}{}", e.a(), e.b())
                } else {
                    format!("τ{}{}^{}", e.a(), e.b(), n)
                }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// The `v_1..v_6` naming of edge variables used in the printed tables.
///
/// The k=3 and k=4 tables use different conventions, so both are kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VLabeling {
    pub k: usize,
    /// `labels[i]` is the edge named `v_{i+1}`.
    pub labels: Vec<EdgeIndex>,
}

impl VLabeling {
    /// k=3: `v1 = 1/τ23`, `v2 = 1/τ31`, `v3 = 1/τ12`.
    pub fn k3() -> Self {
        let e = |a, b| EdgeIndex::new(a, b).unwrap();
        Self { k: 3, labels: vec![e(2, 3), e(1, 3), e(1, 2)] }
    }

    /// k=4: `v1..v6 = 1/τ12, 1/τ23, 1/τ13, 1/τ14, 1/τ24, 1/τ34`.
    pub fn k4() -> Self {
        let e = |a, b| EdgeIndex::new(a, b).unwrap();
        Self {
            k: 4,
            labels: vec![e(1, 2), e(2, 3), e(1, 3), e(1, 4), e(2, 4), e(3, 4)],
        }
    }

    pub fn for_k(k: usize) -> Option<Self> {
        match k {
            3 => Some(Self::k3()),
            4 => Some(Self::k4()),
            _ => None,
        }
    }

    /// Edge named `v_index` (1-based).
    pub fn edge(&self, index: usize) -> Result<EdgeIndex> {
        index
            .checked_sub(1)
            .and_then(|i| self.labels.get(i))
            .copied()
            .ok_or_else(|| HizError::InvalidArgument(format!("no v_{index} for k={}", self.k)))
    }

    pub fn index_of(&self, e: EdgeIndex) -> Option<usize> {
        self.labels.iter().position(|l| *l == e).map(|i| i + 1)
    }

    /// Monomial for a product of `v` indices, e.g. `[1, 2, 4, 6]`.
    pub fn monomial(&self, vs: &[usize]) -> Result<EdgeMonomial> {
        let mut pairs = Vec::with_capacity(vs.len());
        for v in vs {
            pairs.push((self.edge(*v)?, 1));
        }
        Ok(EdgeMonomial::from_pairs(pairs))
    }

    pub fn format(&self, m: &EdgeMonomial) -> String {
        if m.is_one() {
            return "1".into();
        }
        let mut parts: Vec<(usize, u32)> = m
            .iter()
            .map(|(e, n)| (self.index_of(e).unwrap_or(0), n))
            .collect();
        parts.sort();
        parts
            .into_iter()
            .map(|(i, n)| if n == 1 { format!("v{i}") } else { format!("v{i}^{n}") })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// All permutations of `0..n` in lexicographic order (Heap-free, small n).
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    loop {
        out.push(current.clone());
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| current[i] < current[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| current[j] > current[i]).unwrap();
        current.swap(i, j);
        current[i + 1..].reverse();
    }
    out
}

/// Sign of a permutation given as an image vector.
pub fn permutation_sign(perm: &[usize]) -> i32 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut v = start;
        while !seen[v] {
            seen[v] = true;
            v = perm[v];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_enumeration_and_positions() {
        for k in 2..7 {
            let es = edges(k);
            assert_eq!(es.len(), edge_count(k));
            for (i, e) in es.iter().enumerate() {
                assert_eq!(edge_position(*e, k), i);
            }
            assert!(es.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn edge_parsing() {
        let e: EdgeIndex = "3-1".parse().unwrap();
        assert_eq!((e.a(), e.b()), (1, 3));
        assert!("2-2".parse::<EdgeIndex>().is_err());
        assert!("0-2".parse::<EdgeIndex>().is_err());
        assert!("12".parse::<EdgeIndex>().is_err());
    }

    #[test]
    fn dense_round_trip_and_degree() {
        let m = EdgeMonomial::from_dense(4, &[1, 0, 2, 0, 0, 3]);
        assert_eq!(m.degree(), 6);
        assert_eq!(m.to_dense(4), vec![1, 0, 2, 0, 0, 3]);
        assert_eq!(m.max_exponent(), 3);
        assert_eq!(m.to_string(), "τ12 τ14^2 τ34^3");
    }

    #[test]
    fn labelings_match_printed_conventions() {
        let l3 = VLabeling::k3();
        assert_eq!(l3.edge(3).unwrap(), EdgeIndex::new(1, 2).unwrap());
        assert_eq!(l3.edge(2).unwrap(), EdgeIndex::new(3, 1).unwrap());
        let l4 = VLabeling::k4();
        assert_eq!(l4.edge(5).unwrap(), EdgeIndex::new(2, 4).unwrap());
        let m = l4.monomial(&[1, 6]).unwrap();
        assert_eq!(l4.format(&m), "v1 v6");
        assert!(l4.edge(7).is_err());
    }

    #[test]
    fn permutation_helpers() {
        let ps = permutations(4);
        assert_eq!(ps.len(), 24);
        let total: i32 = ps.iter().map(|p| permutation_sign(p)).sum();
        assert_eq!(total, 0);
        assert_eq!(permutation_sign(&[1, 0, 2]), -1);
        assert_eq!(permutation_sign(&[1, 2, 0]), 1);
    }
}
