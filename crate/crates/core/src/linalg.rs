//! Exact linear algebra for collocation systems.
//!
//! Elimination is written once against the [`Field`] trait and instantiated
//! over exact rationals and over prime fields. Prime-field solutions are
//! lifted back to rationals by CRT and rational reconstruction.

use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};

use crate::rational::{bit_cost, Rational};

pub trait Field {
    type E: Clone + PartialEq + std::fmt::Debug;
    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn lift_i64(&self, v: i64) -> Self::E;
    /// `None` when the denominator is not invertible in this field.
    fn lift_rational(&self, r: &Rational) -> Option<Self::E>;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    fn inv(&self, a: &Self::E) -> Option<Self::E>;
    fn is_zero(&self, a: &Self::E) -> bool;
    /// Pivot preference: lower is better.
    fn cost(&self, _a: &Self::E) -> u64 {
        0
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RationalField;

impl Field for RationalField {
    type E = Rational;
    fn zero(&self) -> Rational {
        Rational::zero()
    }
    fn one(&self) -> Rational {
        Rational::one()
    }
    fn lift_i64(&self, v: i64) -> Rational {
        Rational::from_integer(BigInt::from(v))
    }
    fn lift_rational(&self, r: &Rational) -> Option<Rational> {
        Some(r.clone())
    }
    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        a + b
    }
    fn sub(&self, a: &Rational, b: &Rational) -> Rational {
        a - b
    }
    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a * b
    }
    fn neg(&self, a: &Rational) -> Rational {
        -a
    }
    fn inv(&self, a: &Rational) -> Option<Rational> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn is_zero(&self, a: &Rational) -> bool {
        a.is_zero()
    }
    fn cost(&self, a: &Rational) -> u64 {
        bit_cost(a)
    }
}

/// Integers modulo a prime `p < 2^63`.
#[derive(Clone, Copy, Debug)]
pub struct PrimeField {
    pub p: u64,
}

/// Large primes just below 2^62.
pub const PRIMES: [u64; 10] = [
    4611686018427387847,
    4611686018427387817,
    4611686018427387787,
    4611686018427387761,
    4611686018427387751,
    4611686018427387737,
    4611686018427387733,
    4611686018427387709,
    4611686018427387701,
    4611686018427387631,
];

impl PrimeField {
    pub fn new(p: u64) -> Self {
        Self { p }
    }

    pub fn pow(&self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn reduce_big(&self, v: &BigInt) -> u64 {
        let m = v.mod_floor(&BigInt::from(self.p));
        m.to_u64().expect("reduced value fits")
    }
}

impl Field for PrimeField {
    type E = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn lift_i64(&self, v: i64) -> u64 {
        (v as i128).rem_euclid(self.p as i128) as u64
    }
    fn lift_rational(&self, r: &Rational) -> Option<u64> {
        let n = self.reduce_big(r.numer());
        let d = self.reduce_big(r.denom());
        self.inv(&d).map(|di| self.mul(&n, &di))
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + *b as u128) % self.p as u128) as u64
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + self.p as u128 - *b as u128) % self.p as u128) as u64
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        (!(*a).is_multiple_of(self.p)).then(|| self.pow(*a, self.p - 2))
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
}

/// Result of reducing an augmented system `[A | b]`.
#[derive(Clone, Debug)]
pub struct RrefSolution<E> {
    /// Solution with every free variable set to zero.
    pub solution: Vec<E>,
    pub pivot_columns: Vec<usize>,
    pub free_columns: Vec<usize>,
    pub consistent: bool,
    pub rank: usize,
}

/// Gauss-Jordan elimination of `rows` (each of length `ncols + 1`, last
/// entry = right-hand side). Pivots are taken column by column from the
/// left, so the free columns are the right-most ones that can be free.
/// Among candidate rows the pivot with the lowest [`Field::cost`] wins.
pub fn solve_rref<F: Field>(field: &F, mut rows: Vec<Vec<F::E>>, ncols: usize) -> RrefSolution<F::E> {
    let nrows = rows.len();
    let mut pivot_columns = Vec::new();
    let mut free_columns = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let candidate = (r..nrows)
            .filter(|&i| !field.is_zero(&rows[i][c]))
            .min_by_key(|&i| field.cost(&rows[i][c]));
        let Some(p) = candidate else {
            free_columns.push(c);
            continue;
        };
        rows.swap(r, p);
        let inv = field.inv(&rows[r][c]).expect("pivot is non-zero");
        for v in rows[r][c..=ncols].iter_mut() {
            *v = field.mul(v, &inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || field.is_zero(&row[c]) {
                continue;
            }
            let f = row[c].clone();
            for j in c..=ncols {
                if !field.is_zero(&pivot_row[j]) {
                    row[j] = field.sub(&row[j], &field.mul(&f, &pivot_row[j]));
                }
            }
        }
        pivot_columns.push(c);
        r += 1;
        if r == nrows {
            free_columns.extend(c + 1..ncols);
            break;
        }
    }
    let consistent = rows[r..].iter().all(|row| field.is_zero(&row[ncols]));
    let mut solution = vec![field.zero(); ncols];
    for (i, &c) in pivot_columns.iter().enumerate() {
        solution[c] = rows[i][ncols].clone();
    }
    RrefSolution { solution, rank: pivot_columns.len(), pivot_columns, free_columns, consistent }
}

/// Chinese remaindering of residues `vals[i] mod primes[i]` into `[0, M)`.
pub fn crt(vals: &[u64], primes: &[u64]) -> (BigInt, BigInt) {
    let mut acc = BigInt::zero();
    let mut modulus = BigInt::one();
    for (&v, &p) in vals.iter().zip(primes) {
        let pb = BigInt::from(p);
        // acc + modulus * t == v (mod p)
        let field = PrimeField::new(p);
        let acc_mod = field.reduce_big(&acc);
        let m_mod = field.reduce_big(&modulus);
        let t = field.mul(&field.sub(&v, &acc_mod), &field.inv(&m_mod).expect("coprime moduli"));
        acc += &modulus * BigInt::from(t);
        modulus *= pb;
    }
    (acc, modulus)
}

/// Wang's rational reconstruction: finds `n/d` with `|n|, d <= sqrt(M/2)`
/// and `n == a d (mod M)`, if one exists.
pub fn rational_reconstruct(a: &BigInt, modulus: &BigInt) -> Option<Rational> {
    let bound = (modulus / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (modulus.clone(), a.mod_floor(modulus));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    if !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(Rational::new(r1, t1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn exact_rref_solves_and_reports_free_columns() {
        // x0 + x1 = 3, 2x0 + 2x1 = 6, x2 = 5 -> x1 is free
        let rows = vec![
            vec![int(1), int(1), int(0), int(3)],
            vec![int(2), int(2), int(0), int(6)],
            vec![int(0), int(0), int(1), int(5)],
        ];
        let s = solve_rref(&RationalField, rows, 3);
        assert!(s.consistent);
        assert_eq!(s.pivot_columns, vec![0, 2]);
        assert_eq!(s.free_columns, vec![1]);
        assert_eq!(s.solution, vec![int(3), int(0), int(5)]);
    }

    #[test]
    fn detects_inconsistency() {
        let rows = vec![vec![int(1), int(1)], vec![int(2), int(3)]];
        assert!(!solve_rref(&RationalField, rows, 1).consistent);
    }

    #[test]
    fn modular_and_exact_agree() {
        let a = [[rat(1, 2), int(3), int(-1)], [int(2), rat(-1, 3), int(4)], [int(0), int(5), rat(7, 5)]];
        let b = [int(1), int(2), int(3)];
        let rows_q: Vec<Vec<Rational>> =
            (0..3).map(|i| a[i].iter().cloned().chain([b[i].clone()]).collect()).collect();
        let exact = solve_rref(&RationalField, rows_q.clone(), 3);
        let residues: Vec<Vec<u64>> = PRIMES[..3]
            .iter()
            .map(|&p| {
                let f = PrimeField::new(p);
                let rows = rows_q.iter().map(|r| r.iter().map(|v| f.lift_rational(v).unwrap()).collect()).collect();
                solve_rref(&f, rows, 3).solution
            })
            .collect();
        for j in 0..3 {
            let vals: Vec<u64> = residues.iter().map(|s| s[j]).collect();
            let (a, m) = crt(&vals, &PRIMES[..3]);
            assert_eq!(rational_reconstruct(&a, &m).unwrap(), exact.solution[j]);
        }
    }

    #[test]
    fn reconstruction_of_negative_fraction() {
        let f = PrimeField::new(PRIMES[0]);
        let v = f.lift_rational(&rat(-355, 113)).unwrap();
        let (a, m) = crt(&[v], &PRIMES[..1]);
        assert_eq!(rational_reconstruct(&a, &m).unwrap(), rat(-355, 113));
    }
}
