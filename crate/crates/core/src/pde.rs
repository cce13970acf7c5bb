//! The heat-kernel operator acting on chi and the collocation solver.
//!
//! For `chi = sum_M i^|M| c_M M` with `M = prod tau_ab^-n_ab`, the operator
//!
//! ```text
//! L = sum_a d^2/dx_a^2 + 2i sum_a lambda_a d/dx_a - y sum_{a<b} (x_a - x_b)^-2
//! ```
//!
//! splits as `L M = B(M) + 2i A(M)` with real rational functions
//!
//! ```text
//! A(M) = -M sum_e n_e (lambda_e)^2 / tau_e
//! B(M) =  M [ sum_a g_a^2 + sum_e (2 n_e - y) / (x_e)^2 ],   g_a = -sum_c n_ac / (x_a - x_c)
//! ```
//!
//! (`x_e`, `lambda_e` the differences along edge `e`). `A` lowers the
//! x-homogeneity degree by one and `B` by two, so `L chi = 0` is equivalent
//! to the layered system
//!
//! ```text
//! 2 sum_{|M| = d} c_M A(M) = sum_{|M| = d-1} c_M B(M)      for every d >= 1,
//! ```
//!
//! each layer holding identically in `(x, lambda)`. The solver determines
//! one layer at a time by exact collocation at random integer points.

use num::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::edge::{edge_count, edges, EdgeMonomial};
use crate::error::{HizError, Result};
use crate::gauss::GaussRational;
use crate::linalg::{crt, rational_reconstruct, solve_rref, Field, PrimeField, RationalField, PRIMES};
use crate::point::SpectralPoint;
use crate::rational::{int, Rational};
use crate::report::VerificationReport;
use crate::series::ChiSeries;
use crate::ypoly::YPolynomial;

/// Exact value of the operator applied to `s` at `pt`.
pub fn pde_apply(s: &ChiSeries, pt: &SpectralPoint, y: &Rational) -> Result<GaussRational> {
    if s.k() != pt.k() {
        return Err(HizError::MismatchedK { left: s.k(), right: pt.k() });
    }
    let data = PointData::from_rational_point(&RationalField, pt)?;
    let y_e = y.clone();
    let mut re = Rational::zero();
    let mut im = Rational::zero();
    for (m, c) in s.terms() {
        let coeff = c.eval(y);
        if coeff.is_zero() {
            continue;
        }
        let dense = m.to_dense(s.k());
        let (a, b) = data.a_b(&RationalField, &dense, &y_e);
        // i^d c (B + 2i A)
        let real = &coeff * b;
        let imag = &coeff * int(2) * a;
        match m.degree() % 4 {
            0 => {
                re += real;
                im += imag;
            }
            1 => {
                im += real;
                re -= imag;
            }
            2 => {
                re -= real;
                im -= imag;
            }
            _ => {
                im -= real;
                re += imag;
            }
        }
    }
    Ok(GaussRational::new(re, im))
}

/// Exact residual check of a series at `points` random integer points.
pub fn pde_residual_report(
    s: &ChiSeries,
    y: &Rational,
    points: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<SpectralPoint> = (0..points).map(|_| SpectralPoint::random_int(&mut rng, s.k(), 20)).collect();
    let residuals = pts
        .par_iter()
        .map(|pt| pde_apply(s, pt, y))
        .collect::<Result<Vec<_>>>()?;
    let strings = residuals
        .iter()
        .flat_map(|r| r.to_fraction_pair())
        .collect::<Vec<_>>();
    Ok(VerificationReport::exact(format!("pde residual k={} y={y}", s.k()), strings)
        .with_seed(seed)
        .with_input("k", s.k())
        .with_input("y", y)
        .with_input("points", points)
        .with_input("terms", s.len()))
}

/// Per-point quantities shared by all monomials, in an arbitrary field.
struct PointData<E> {
    k: usize,
    ends: Vec<(usize, usize)>,
    /// `1/tau_e`
    w: Vec<E>,
    /// `lambda_e^2 / tau_e`
    q: Vec<E>,
    /// `1/(x_a - x_b)` for the edge
    dx_inv: Vec<E>,
    /// `1/(x_a - x_b)^2`
    dx_inv_sq: Vec<E>,
}

impl<E: Clone> PointData<E> {
    fn build<F: Field<E = E>>(f: &F, k: usize, x: &[E], lambda: &[E]) -> Option<Self> {
        let es = edges(k);
        let mut data = PointData {
            k,
            ends: Vec::with_capacity(es.len()),
            w: Vec::with_capacity(es.len()),
            q: Vec::with_capacity(es.len()),
            dx_inv: Vec::with_capacity(es.len()),
            dx_inv_sq: Vec::with_capacity(es.len()),
        };
        for e in es {
            let (a, b) = e.ends0();
            let dx = f.sub(&x[a], &x[b]);
            let dl = f.sub(&lambda[a], &lambda[b]);
            let dx_inv = f.inv(&dx)?;
            let dl_inv = f.inv(&dl)?;
            let w = f.mul(&dx_inv, &dl_inv);
            data.ends.push((a, b));
            data.q.push(f.mul(&dl, &dx_inv));
            data.dx_inv_sq.push(f.mul(&dx_inv, &dx_inv));
            data.dx_inv.push(dx_inv);
            data.w.push(w);
        }
        Some(data)
    }

    fn from_ints<F: Field<E = E>>(f: &F, x: &[i64], lambda: &[i64]) -> Option<Self> {
        let x: Vec<E> = x.iter().map(|v| f.lift_i64(*v)).collect();
        let l: Vec<E> = lambda.iter().map(|v| f.lift_i64(*v)).collect();
        Self::build(f, x.len(), &x, &l)
    }

    /// `(A(M), B(M))` for a dense exponent vector.
    fn a_b<F: Field<E = E>>(&self, f: &F, dense: &[u32], y: &E) -> (E, E) {
        let mut m = f.one();
        let mut s1 = f.zero();
        let mut s2 = f.zero();
        let mut g = vec![f.zero(); self.k];
        for (e, &n) in dense.iter().enumerate() {
            // potential term enters for every edge
            let coef = f.sub(&f.lift_i64(2 * n as i64), y);
            s2 = f.add(&s2, &f.mul(&coef, &self.dx_inv_sq[e]));
            if n == 0 {
                continue;
            }
            let ne = f.lift_i64(n as i64);
            for _ in 0..n {
                m = f.mul(&m, &self.w[e]);
            }
            s1 = f.add(&s1, &f.mul(&ne, &self.q[e]));
            let (a, b) = self.ends[e];
            let t = f.mul(&ne, &self.dx_inv[e]);
            g[a] = f.sub(&g[a], &t);
            g[b] = f.add(&g[b], &t);
        }
        let gsq = g.iter().fold(f.zero(), |acc, ga| f.add(&acc, &f.mul(ga, ga)));
        let a_val = f.neg(&f.mul(&m, &s1));
        let b_val = f.mul(&m, &f.add(&gsq, &s2));
        (a_val, b_val)
    }
}

impl PointData<Rational> {
    fn from_rational_point(f: &RationalField, pt: &SpectralPoint) -> Result<Self> {
        Self::build(f, pt.k(), pt.x(), pt.lambda())
            .ok_or_else(|| HizError::CoincidentEigenvalues("zero difference in spectral point".into()))
    }
}

/// Integer collocation point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntPoint {
    pub x: Vec<i64>,
    pub lambda: Vec<i64>,
}

impl IntPoint {
    fn random(rng: &mut ChaCha8Rng, k: usize, bound: i64) -> Self {
        let p = SpectralPoint::random_int(rng, k, bound);
        let to_i = |v: &Rational| -> i64 { v.numer().try_into().expect("small integer") };
        IntPoint { x: p.x().iter().map(to_i).collect(), lambda: p.lambda().iter().map(to_i).collect() }
    }

    pub fn to_spectral(&self) -> SpectralPoint {
        SpectralPoint::from_ints(&self.x, &self.lambda).expect("valid by construction")
    }
}

/// One layer of the collocation system, assembled over the rationals.
#[derive(Clone, Debug)]
pub struct ResidualSystem {
    pub k: usize,
    pub y: Rational,
    pub degree: u32,
    /// Unknown monomials in column order (ascending lexicographic).
    pub unknowns: Vec<EdgeMonomial>,
    /// Augmented rows `[2A(M_1) .. 2A(M_n) | sum c B(M_prev)]`, one per point.
    pub rows: Vec<Vec<Rational>>,
    pub points: Vec<IntPoint>,
}

impl ResidualSystem {
    /// Assembles the degree-`degree` layer given the solved previous layer.
    pub fn assemble(
        k: usize,
        y: &Rational,
        degree: u32,
        unknowns: &[Vec<u32>],
        previous: &[(Vec<u32>, Rational)],
        points: &[IntPoint],
    ) -> Self {
        let rows = assemble_rows(&RationalField, y, unknowns, previous, points);
        ResidualSystem {
            k,
            y: y.clone(),
            degree,
            unknowns: unknowns.iter().map(|d| EdgeMonomial::from_dense(k, d)).collect(),
            rows,
            points: points.to_vec(),
        }
    }
}

fn assemble_rows<F: Field + Sync>(
    f: &F,
    y: &Rational,
    unknowns: &[Vec<u32>],
    previous: &[(Vec<u32>, F::E)],
    points: &[IntPoint],
) -> Vec<Vec<F::E>>
where
    F::E: Send + Sync,
{
    let y_e = f.lift_rational(y).expect("y representable in field");
    let two = f.lift_i64(2);
    points
        .par_iter()
        .map(|p| {
            let data = PointData::from_ints(f, &p.x, &p.lambda).expect("valid point in field");
            let mut row: Vec<F::E> = unknowns
                .iter()
                .map(|d| f.mul(&two, &data.a_b(f, d, &y_e).0))
                .collect();
            let rhs = previous.iter().fold(f.zero(), |acc, (d, c)| {
                if f.is_zero(c) {
                    acc
                } else {
                    f.add(&acc, &f.mul(c, &data.a_b(f, d, &y_e).1))
                }
            });
            row.push(rhs);
            row
        })
        .collect()
}

/// Dense exponent vectors of total degree `d` with entries `<= cap`, in
/// ascending lexicographic order.
pub fn layer_monomials(num_edges: usize, d: u32, cap: u32) -> Vec<Vec<u32>> {
    fn rec(pos: usize, left: u32, cap: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        let n = cur.len();
        if pos == n {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let remaining_slots = (n - pos - 1) as u32;
        // ascending lex: small values at early positions first
        for v in 0..=cap.min(left) {
            if left - v > remaining_slots * cap {
                continue;
            }
            cur[pos] = v;
            rec(pos + 1, left - v, cap, cur, out);
        }
        cur[pos] = 0;
    }
    let mut out = Vec::new();
    let mut cur = vec![0; num_edges];
    rec(0, d, cap, &mut cur, &mut out);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Exact rational elimination for small layers, modular otherwise.
    Auto,
    /// Exact rational Gauss-Jordan on every layer.
    Exact,
    /// Elimination modulo word-size primes, CRT and rational reconstruction,
    /// then exact verification.
    Modular,
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub seed: u64,
    pub backend: Backend,
    /// Extra collocation points beyond the layer size.
    pub margin: usize,
    /// Fresh points used to check each layer before accepting it.
    pub layer_checks: usize,
    /// Fresh points for the final exact residual check.
    pub verify_points: usize,
    /// Solve only layers up to this degree (no termination required).
    pub truncate_degree: Option<u32>,
    /// Largest layer handled by the exact backend under `Auto`.
    pub exact_layer_limit: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            backend: Backend::Auto,
            margin: 8,
            layer_checks: 3,
            verify_points: 6,
            truncate_degree: None,
            exact_layer_limit: 40,
        }
    }
}

pub const DEFAULT_SEED: u64 = 20021;

/// Free directions fixed to zero while solving.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaugeReport {
    pub free_monomials: Vec<EdgeMonomial>,
    /// Number of free directions, i.e. independent identically-vanishing
    /// combinations of the admissible monomials found by the elimination.
    pub identity_count: usize,
    /// `(degree, count)` for every degree with free directions.
    pub per_degree: Vec<(u32, usize)>,
    /// Number of independent cubic relations among the tau variables, `(k-2)(k-3)/2`.
    pub cubic_relations: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveDiagnostics {
    pub backend: Backend,
    pub seed: u64,
    pub primes_used: usize,
    pub max_layer: usize,
    pub point_refreshes: usize,
    pub verify_points: usize,
}

#[derive(Clone, Debug)]
pub struct SolveOutput {
    pub series: ChiSeries,
    pub gauge: GaugeReport,
    pub diagnostics: SolveDiagnostics,
}

/// Solves for chi at numeric `y` with every edge exponent at most
/// `per_edge_cap`; for even beta the cap is `beta/2 - 1` and the series
/// terminates at degree `cap * k(k-1)/2`.
pub fn solve_chi(k: usize, y: &Rational, per_edge_cap: u32, opts: &SolveOptions) -> Result<SolveOutput> {
    if !(2..=8).contains(&k) {
        return Err(HizError::UnsupportedK { k, min: 2, max: 8 });
    }
    let ne = edge_count(k);
    let full_degree = per_edge_cap * ne as u32;
    let top = opts.truncate_degree.map_or(full_degree, |t| t.min(full_degree));
    let layers: Vec<Vec<Vec<u32>>> = (0..=top).map(|d| layer_monomials(ne, d, per_edge_cap)).collect();
    let max_layer = layers.iter().map(|l| l.len()).max().unwrap_or(1);
    let check_terminal = opts.truncate_degree.is_none_or(|t| t >= full_degree);
    let backend = match opts.backend {
        Backend::Auto if max_layer <= opts.exact_layer_limit => Backend::Exact,
        Backend::Auto => Backend::Modular,
        b => b,
    };

    let (coeffs, free, refreshes, primes_used) = match backend {
        Backend::Exact => {
            let run = solve_layers(&RationalField, k, y, &layers, check_terminal, opts)?;
            (run.coeffs, run.free, run.refreshes, 0)
        }
        _ => solve_modular(k, y, &layers, check_terminal, opts)?,
    };

    let mut terms = Vec::new();
    for (d, layer) in layers.iter().enumerate() {
        for (dense, c) in layer.iter().zip(&coeffs[d]) {
            if !c.is_zero() {
                terms.push((EdgeMonomial::from_dense(k, dense), YPolynomial::constant(c.clone())));
            }
        }
    }
    let series = ChiSeries::from_terms(k, top, terms)?;

    let mut per_degree = Vec::new();
    let mut free_monomials = Vec::new();
    for (d, cols) in free.iter().enumerate() {
        if !cols.is_empty() {
            per_degree.push((d as u32, cols.len()));
        }
        for &c in cols {
            free_monomials.push(EdgeMonomial::from_dense(k, &layers[d][c]));
        }
    }
    let gauge = GaugeReport {
        identity_count: free_monomials.len(),
        free_monomials,
        per_degree,
        cubic_relations: (k - 2) * k.saturating_sub(3) / 2,
    };

    if check_terminal && opts.verify_points > 0 {
        let report = pde_residual_report(&series, y, opts.verify_points, opts.seed ^ 0x7e57)?;
        if !report.passed {
            return Err(HizError::Collocation(format!("final exact residual check failed: {report}")));
        }
    }

    Ok(SolveOutput {
        series,
        gauge,
        diagnostics: SolveDiagnostics {
            backend,
            seed: opts.seed,
            primes_used,
            max_layer,
            point_refreshes: refreshes,
            verify_points: opts.verify_points,
        },
    })
}

/// Convenience wrapper for even `beta`: `y = beta(beta/2 - 1)`, cap `beta/2 - 1`.
pub fn solve_chi_even_beta(k: usize, beta: u32, opts: &SolveOptions) -> Result<SolveOutput> {
    if beta < 2 || !beta.is_multiple_of(2) {
        return Err(HizError::InvalidArgument(format!("beta={beta} is not an even integer >= 2")));
    }
    solve_chi(k, &y_of_beta(&int(beta as i64)), beta / 2 - 1, opts)
}

/// `y = beta (beta/2 - 1)`.
pub fn y_of_beta(beta: &Rational) -> Rational {
    beta * (beta / int(2) - Rational::one())
}

/// The even beta with `beta(beta/2 - 1) = y`, if any (`beta = 1 + sqrt(1 + 2y)`).
pub fn even_beta_of_y(y: &Rational) -> Option<u32> {
    if !crate::rational::is_integer(y) {
        return None;
    }
    let disc: i64 = (int(1) + int(2) * y).numer().try_into().ok()?;
    if disc < 0 {
        return None;
    }
    let r = (disc as f64).sqrt().round() as i64;
    if r * r != disc {
        return None;
    }
    let beta = 1 + r;
    (beta >= 2 && beta % 2 == 0).then_some(beta as u32)
}

struct LayerRun<E> {
    coeffs: Vec<Vec<E>>,
    free: Vec<Vec<usize>>,
    pivots: Vec<Vec<usize>>,
    refreshes: usize,
}

fn layer_points(seed: u64, k: usize, degree: usize, attempt: usize, count: usize) -> Vec<IntPoint> {
    let stream = seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((degree as u64) << 20)
        .wrapping_add(attempt as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(stream);
    (0..count).map(|_| IntPoint::random(&mut rng, k, 20)).collect()
}

fn solve_layers<F: Field + Sync>(
    f: &F,
    k: usize,
    y: &Rational,
    layers: &[Vec<Vec<u32>>],
    check_terminal: bool,
    opts: &SolveOptions,
) -> Result<LayerRun<F::E>>
where
    F::E: Send + Sync,
{
    let mut coeffs: Vec<Vec<F::E>> = vec![vec![f.one()]];
    let mut free = vec![Vec::new()];
    let mut pivots = vec![vec![0]];
    let mut refreshes = 0;
    for d in 1..layers.len() {
        let unknowns = &layers[d];
        let previous: Vec<(Vec<u32>, F::E)> =
            layers[d - 1].iter().cloned().zip(coeffs[d - 1].iter().cloned()).collect();
        let mut count = unknowns.len() + opts.margin;
        let mut attempt = 0;
        loop {
            let pts = layer_points(opts.seed, k, d, attempt, count);
            let rows = assemble_rows(f, y, unknowns, &previous, &pts);
            let sol = solve_rref(f, rows, unknowns.len());
            if !sol.consistent {
                return Err(HizError::InconsistentSystem { degree: d as u32 });
            }
            // a layer is accepted only if it also holds at fresh points
            let check_pts = layer_points(opts.seed ^ 0xC0FFEE, k, d, attempt, opts.layer_checks);
            let check_rows = assemble_rows(f, y, unknowns, &previous, &check_pts);
            let holds = check_rows.iter().all(|row| {
                let lhs = row[..unknowns.len()]
                    .iter()
                    .zip(&sol.solution)
                    .fold(f.zero(), |acc, (a, c)| f.add(&acc, &f.mul(a, c)));
                lhs == row[unknowns.len()]
            });
            if holds {
                coeffs.push(sol.solution);
                free.push(sol.free_columns);
                pivots.push(sol.pivot_columns);
                break;
            }
            attempt += 1;
            refreshes += 1;
            count *= 2;
            if attempt > 4 {
                return Err(HizError::Collocation(format!(
                    "layer {d} still underdetermined with {count} points"
                )));
            }
        }
    }
    if check_terminal {
        // the top layer must be annihilated by B on its own
        let last = layers.len() - 1;
        let previous: Vec<(Vec<u32>, F::E)> =
            layers[last].iter().cloned().zip(coeffs[last].iter().cloned()).collect();
        let pts = layer_points(opts.seed, k, layers.len(), 0, opts.layer_checks.max(2));
        let rows = assemble_rows(f, y, &[], &previous, &pts);
        if rows.iter().any(|r| !f.is_zero(&r[0])) {
            return Err(HizError::InconsistentSystem { degree: layers.len() as u32 });
        }
    }
    Ok(LayerRun { coeffs, free, pivots, refreshes })
}

type ModularResult = (Vec<Vec<Rational>>, Vec<Vec<usize>>, usize, usize);

fn solve_modular(
    k: usize,
    y: &Rational,
    layers: &[Vec<Vec<u32>>],
    check_terminal: bool,
    opts: &SolveOptions,
) -> Result<ModularResult> {
    let mut runs: Vec<(u64, LayerRun<u64>)> = Vec::new();
    let mut next_prime = 0;
    let mut batch = 2;
    loop {
        let fresh: Vec<u64> = PRIMES[next_prime..(next_prime + batch).min(PRIMES.len())].to_vec();
        if fresh.is_empty() {
            return Err(HizError::Collocation("rational reconstruction did not stabilise".into()));
        }
        next_prime += fresh.len();
        let new_runs = fresh
            .par_iter()
            .filter_map(|&p| {
                let f = PrimeField::new(p);
                // y with a denominator divisible by p cannot be used with this prime
                f.lift_rational(y)?;
                Some(solve_layers(&f, k, y, layers, check_terminal, opts).map(|r| (p, r)))
            })
            .collect::<Result<Vec<_>>>()?;
        runs.extend(new_runs);
        // all primes must agree on the pivot structure; drop outliers
        let reference = runs[0].1.pivots.clone();
        runs.retain(|(_, r)| r.pivots == reference);
        let primes: Vec<u64> = runs.iter().map(|(p, _)| *p).collect();
        if let Some(coeffs) = reconstruct(layers, &runs, &primes) {
            let series_terms = layers.iter().zip(&coeffs).flat_map(|(layer, cs)| {
                layer
                    .iter()
                    .zip(cs)
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(d, c)| (EdgeMonomial::from_dense(k, d), YPolynomial::constant(c.clone())))
            });
            let top = (layers.len() - 1) as u32;
            let candidate = ChiSeries::from_terms(k, top, series_terms.collect::<Vec<_>>())?;
            let ok = if check_terminal {
                pde_residual_report(&candidate, y, 2, opts.seed ^ 0xABCD)?.passed
            } else {
                true
            };
            if ok {
                let refreshes = runs[0].1.refreshes;
                return Ok((coeffs, runs[0].1.free.clone(), refreshes, primes.len()));
            }
        }
        batch = 2;
    }
}

fn reconstruct(layers: &[Vec<Vec<u32>>], runs: &[(u64, LayerRun<u64>)], primes: &[u64]) -> Option<Vec<Vec<Rational>>> {
    let mut out = Vec::with_capacity(layers.len());
    for (d, monomials) in layers.iter().enumerate() {
        let mut layer = Vec::with_capacity(monomials.len());
        for j in 0..monomials.len() {
            let residues: Vec<u64> = runs.iter().map(|(_, r)| r.coeffs[d][j]).collect();
            if residues.iter().all(|v| *v == 0) {
                layer.push(Rational::zero());
                continue;
            }
            let (a, m) = crt(&residues, primes);
            layer.push(rational_reconstruct(&a, &m)?);
        }
        out.push(layer);
    }
    Some(out)
}
