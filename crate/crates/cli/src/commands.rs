//! Command implementations. Each returns an [`Output`] holding both renderings.

use std::fs;

use hiz_core::edge::VLabeling;
use hiz_core::graph::{beta4_chi_with, complete_weight, deletion_rule_ratio, deletion_rule_weight, DeletionRule};
use hiz_core::identities::{cubic_identity_residual, id_residuals, ID_NAMES};
use hiz_core::largey::{largey_vs_recursion, phi0, phi1, phi2_k3, phi_order_suite, VPolynomial};
use hiz_core::oracle::mc::ratio;
use hiz_core::oracle::{hciz_unitary_det, mc_group_integral, reconstruct_full_integral, Ensemble, PermutationWeights};
use hiz_core::pde::{
    even_beta_of_y, pde_residual_report, solve_chi, solve_chi_even_beta, y_of_beta, Backend, SolveOptions, SolveOutput,
};
use hiz_core::rational::{int, parse_rational, rat, to_fraction_string};
use hiz_core::recursion::{c_triple, chi_k2, chi_k3, CoefficientTable3};
use hiz_core::report::VerificationReport;
use hiz_core::{ChiSeries, HizError, Rational, SpectralPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::args::{BackendArg, CoeffArgs, Coupling, K3Args, Labels, Suite, VerifyArgs};

pub type CmdResult = Result<Output, HizError>;

/// A command result in text and JSON form; `passed` is false when a
/// verification failed.
pub struct Output {
    pub text: String,
    pub json: Value,
    pub passed: bool,
}

impl Output {
    fn ok(text: impl Into<String>, json: Value) -> Self {
        Self { text: text.into(), json, passed: true }
    }

    fn reports(reports: Vec<VerificationReport>) -> Self {
        let passed = reports.iter().all(|r| r.passed);
        let mut text: Vec<String> = reports.iter().map(|r| r.to_string()).collect();
        let failed = reports.iter().filter(|r| !r.passed).count();
        text.push(format!("{} checks, {failed} failed", reports.len()));
        Self {
            text: text.join("\n"),
            json: json!({ "passed": passed, "reports": reports }),
            passed,
        }
    }
}

fn invalid(msg: impl Into<String>) -> HizError {
    HizError::InvalidArgument(msg.into())
}

impl Coupling {
    /// `y` from `--beta` or `--y`, if either was given.
    pub fn resolve(&self) -> Result<Option<Rational>, HizError> {
        match (&self.beta, &self.y) {
            (Some(b), None) => Ok(Some(y_of_beta(&parse_rational(b)?))),
            (None, Some(y)) => Ok(Some(parse_rational(y)?)),
            (None, None) => Ok(None),
            (Some(_), Some(_)) => Err(invalid("--beta and --y are mutually exclusive")),
        }
    }

    fn require(&self) -> Result<Rational, HizError> {
        self.resolve()?.ok_or_else(|| invalid("one of --beta or --y is required"))
    }
}

fn labels_for(labels: Labels, k: usize) -> Option<VLabeling> {
    match labels {
        Labels::Tau => None,
        Labels::V => VLabeling::for_k(k),
    }
}

fn options(seed: u64) -> SolveOptions {
    SolveOptions { seed, ..SolveOptions::default() }
}

fn gauge_json(out: &SolveOutput) -> Value {
    json!({ "gauge": out.gauge, "diagnostics": out.diagnostics })
}

fn gauge_text(out: &SolveOutput) -> String {
    let per: Vec<String> = out.gauge.per_degree.iter().map(|(d, n)| format!("{n} at degree {d}")).collect();
    let free: Vec<String> = out.gauge.free_monomials.iter().map(|m| m.to_string()).collect();
    format!(
        "gauge: {} free directions{}{}",
        out.gauge.identity_count,
        if per.is_empty() { String::new() } else { format!(" ({})", per.join(", ")) },
        if free.is_empty() { String::new() } else { format!(", set to zero: {}", free.join("; ")) }
    )
}

/// Series JSON with extra top-level fields merged in.
fn series_json(s: &ChiSeries, extra: Option<Value>) -> Value {
    let mut v = s.to_json_value();
    if let (Value::Object(map), Some(Value::Object(more))) = (&mut v, extra) {
        map.extend(more);
    }
    v
}

/// The series for `k` points at `y`: recursion for two and three points,
/// the collocation solver otherwise.
fn series_for(k: usize, y: &Rational, order: Option<u32>, seed: u64) -> Result<(ChiSeries, Option<SolveOutput>), HizError> {
    let beta = even_beta_of_y(y);
    let cap = beta.map(|b| b / 2 - 1);
    match k {
        2 | 3 => {
            let edges = (k * (k - 1) / 2) as u32;
            let order = order
                .or(cap.map(|c| c * edges))
                .ok_or_else(|| invalid(format!("y={y} does not terminate; give --order")))?;
            Ok((if k == 2 { chi_k2(Some(y), order) } else { chi_k3(Some(y), order) }, None))
        }
        _ => {
            let cap = cap.ok_or_else(|| invalid(format!("k={k} needs an even beta (y={y})")))?;
            let opts = SolveOptions { truncate_degree: order, ..options(seed) };
            let out = solve_chi(k, y, cap, &opts)?;
            Ok((out.series.clone(), Some(out)))
        }
    }
}

pub fn expand(k: usize, coupling: &Coupling, order: Option<u32>, symbolic: bool, labels: Labels, seed: u64) -> CmdResult {
    if k < 2 {
        return Err(HizError::UnsupportedK { k, min: 2, max: 8 });
    }
    let labels = labels_for(labels, k);
    if symbolic {
        let order = order.unwrap_or(6);
        let s = match k {
            2 => chi_k2(None, order),
            3 => chi_k3(None, order),
            _ => return Err(invalid("--symbolic is available for two and three points")),
        };
        return Ok(Output::ok(s.to_text(labels.as_ref()), s.to_json_value()));
    }
    let y = coupling.require()?;
    let (s, solved) = series_for(k, &y, order, seed)?;
    let mut text = s.to_text(labels.as_ref());
    if let Some(out) = &solved {
        text.push('\n');
        text.push_str(&gauge_text(out));
    }
    Ok(Output::ok(text, series_json(&s, solved.as_ref().map(gauge_json))))
}

pub fn solve(k: usize, beta: u32, backend: BackendArg, seed: u64) -> CmdResult {
    let backend = match backend {
        BackendArg::Auto => Backend::Auto,
        BackendArg::Exact => Backend::Exact,
        BackendArg::Modular => Backend::Modular,
    };
    let out = solve_chi_even_beta(k, beta, &SolveOptions { backend, ..options(seed) })?;
    let text = format!(
        "{}\n{}\nterms: {}, seed: {}, backend: {:?}",
        out.series.to_text(None),
        gauge_text(&out),
        out.series.len(),
        seed,
        out.diagnostics.backend
    );
    Ok(Output::ok(text, series_json(&out.series, Some(gauge_json(&out)))))
}

pub fn coeff(a: &CoeffArgs) -> CmdResult {
    if let Some(idx) = &a.k3 {
        let p = c_triple(idx[0], idx[1], idx[2]);
        let key = json!([idx[0], idx[1], idx[2]]);
        return Ok(match a.coupling.resolve()? {
            Some(y) => {
                let v = p.eval(&y);
                Output::ok(v.to_string(), json!({ "k3": key, "y": to_fraction_string(&y), "value": to_fraction_string(&v) }))
            }
            None => {
                let text = if a.expanded { p.to_string() } else { p.to_factored_string() };
                Output::ok(
                    text,
                    json!({ "k3": key, "coeff_y": p.to_fraction_strings(), "factored": p.to_factored_string() }),
                )
            }
        });
    }
    if let Some(n) = a.complete {
        let w = complete_weight(n);
        return Ok(Output::ok(w.to_string(), json!({ "complete": n, "value": w.to_string() })));
    }
    let (name, as_ratio) = match (&a.ratio, &a.weight) {
        (Some(r), _) => (r, true),
        (None, Some(w)) => (w, false),
        _ => return Err(invalid("nothing to compute")),
    };
    let k = a.k.ok_or_else(|| invalid("--k is required with --ratio and --weight"))?;
    let rule: DeletionRule = name.parse()?;
    let v = if as_ratio { deletion_rule_ratio(k, rule)? } else { deletion_rule_weight(k, rule)? };
    Ok(Output::ok(
        v.to_string(),
        json!({ "rule": rule.name(), "k": k, if as_ratio { "ratio" } else { "weight" }: to_fraction_string(&v) }),
    ))
}

pub fn k3(a: &K3Args) -> CmdResult {
    let y = a.coupling.resolve()?;
    if let Some(order) = a.table {
        let table = CoefficientTable3::with_order(order);
        let mut lines = Vec::new();
        let mut rows = Vec::new();
        for ((n, m, r), p) in table.entries() {
            match &y {
                Some(y) => {
                    let v = p.eval(y);
                    lines.push(format!("C_{{{n},{m},{r}}} = {v}"));
                    rows.push(json!({ "n": n, "m": m, "r": r, "value": to_fraction_string(&v) }));
                }
                None => {
                    lines.push(format!("C_{{{n},{m},{r}}} = {}", p.to_factored_string()));
                    rows.push(json!({ "n": n, "m": m, "r": r, "coeff_y": p.to_fraction_strings() }));
                }
            }
        }
        return Ok(Output::ok(lines.join("\n"), json!({ "max_order": order, "entries": rows })));
    }
    let (n, m, r) = match (a.n, a.m, a.r) {
        (Some(n), Some(m), Some(r)) => (n, m, r),
        _ => return Err(invalid("give --n --m --r or --table")),
    };
    coeff(&CoeffArgs {
        k3: Some(vec![n, m, r]),
        complete: None,
        ratio: None,
        weight: None,
        k: None,
        expanded: false,
        coupling: a.coupling.clone(),
    })
}

pub fn graph(k: Option<usize>, weights: Option<u32>, labels: Labels, seed: u64) -> CmdResult {
    if let Some(n) = weights {
        let ws: Vec<String> = (0..=n).map(|l| complete_weight(l).to_string()).collect();
        let text = ws.iter().enumerate().map(|(l, w)| format!("C_{l} = {w}")).collect::<Vec<_>>().join("\n");
        return Ok(Output::ok(text, json!({ "complete_weights": ws })));
    }
    let k = k.ok_or_else(|| invalid("give --k or --weights"))?;
    let s = beta4_chi_with(k, &options(seed))?;
    Ok(Output::ok(s.to_text(labels_for(labels, k).as_ref()), s.to_json_value()))
}

fn vpoly_json(p: &VPolynomial) -> Value {
    let terms: Vec<Value> = p
        .sorted_terms()
        .into_iter()
        .map(|(m, c)| json!({ "edges": m.to_json_map(), "coeff": to_fraction_string(c) }))
        .collect();
    json!({ "k": p.k(), "terms": terms })
}

pub fn largey(order: Option<u32>, k: usize, check: bool, seed: u64) -> CmdResult {
    if check {
        return largey_reports(k, 50, seed).map(Output::reports);
    }
    let order = order.ok_or_else(|| invalid("--order is required"))?;
    if k < 2 {
        return Err(HizError::UnsupportedK { k, min: 2, max: usize::MAX });
    }
    let p = match order {
        0 => phi0(k),
        1 => phi1(k),
        2 if k == 3 => phi2_k3(),
        2 => return Err(HizError::UnsupportedK { k, min: 3, max: 3 }),
        _ => return Err(invalid("order must be 0, 1 or 2")),
    };
    Ok(Output::ok(p.to_string(), json!({ "order": order, "phi": vpoly_json(&p) })))
}

fn largey_reports(k: usize, draws: usize, seed: u64) -> Result<Vec<VerificationReport>, HizError> {
    let mut out = vec![phi_order_suite(0, k, draws, seed)?, phi_order_suite(1, k, draws, seed + 1)?];
    out.push(phi_order_suite(2, 3, draws, seed + 2)?);
    out.push(largey_vs_recursion(5, 2)?);
    Ok(out)
}

fn parse_list(items: &[String]) -> Result<Vec<Rational>, HizError> {
    items.iter().map(|s| parse_rational(s)).collect()
}

pub fn mc(ensemble: &str, k: usize, samples: u64, seed: u64, x: &[String], lambda: &[String]) -> CmdResult {
    let ensemble: Ensemble = ensemble.parse()?;
    let (x, lambda) = (parse_list(x)?, parse_list(lambda)?);
    if x.len() != k || lambda.len() != k {
        return Err(invalid(format!("--x and --lambda need {k} values each")));
    }
    let pt = SpectralPoint::new(x, lambda)?;
    let est = mc_group_integral(ensemble, &pt, samples, seed)?;
    let text = format!(
        "{} k={k}: mean {:.12} {:+.12}i, std error {:.3e}, samples {}, seed {}",
        ensemble, est.mean.re, est.mean.im, est.std_error, est.samples, est.seed
    );
    Ok(Output::ok(text, serde_json::to_value(est).expect("estimate serializes")))
}

fn random_rational_point(rng: &mut ChaCha8Rng, k: usize) -> SpectralPoint {
    loop {
        let mut draw = || (0..k).map(|_| rat(rng.random_range(-40..=40), rng.random_range(1..=9))).collect();
        if let Ok(pt) = SpectralPoint::new(draw(), draw()) {
            return pt;
        }
    }
}

fn quadruples(k: usize) -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 1..=k {
        for b in a + 1..=k {
            for c in b + 1..=k {
                for d in c + 1..=k {
                    out.push([a, b, c, d]);
                }
            }
        }
    }
    out
}

fn identity_reports(k: usize, draws: usize, seed: u64) -> Result<Vec<VerificationReport>, HizError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if k == 3 {
        let mut residuals = vec![Vec::new(); 4];
        for _ in 0..draws {
            let pt = random_rational_point(&mut rng, 3);
            for (acc, r) in residuals.iter_mut().zip(id_residuals(&pt)?) {
                acc.push(to_fraction_string(&r));
            }
        }
        return Ok(ID_NAMES
            .iter()
            .zip(residuals)
            .map(|(name, r)| {
                VerificationReport::exact(format!("{name} at {draws} rational points"), r)
                    .with_seed(seed)
                    .with_input("draws", draws)
            })
            .collect());
    }
    if k < 3 {
        return Err(HizError::UnsupportedK { k, min: 3, max: usize::MAX });
    }
    let quads = quadruples(k);
    let mut residual = Vec::with_capacity(draws * quads.len());
    for _ in 0..draws {
        let pt = random_rational_point(&mut rng, k);
        for q in &quads {
            residual.push(to_fraction_string(&cubic_identity_residual(&pt, *q)?));
        }
    }
    Ok(vec![VerificationReport::exact(
        format!("cubic identity on {} quadruples at {draws} rational points", quads.len()),
        residual,
    )
    .with_seed(seed)
    .with_input("k", k)
    .with_input("draws", draws)])
}

fn pde_reports(a: &VerifyArgs, k: usize, y: &Rational) -> Result<Vec<VerificationReport>, HizError> {
    let series = match &a.series {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
            let s = ChiSeries::from_json(&text)?;
            if a.k.is_some_and(|k| k != s.k()) {
                return Err(HizError::MismatchedK { left: k, right: s.k() });
            }
            s
        }
        None => series_for(k, y, None, a.seed.seed)?.0,
    };
    let report = pde_residual_report(&series, y, a.points, a.seed.seed ^ 0x5eed)?;
    Ok(vec![report.with_input("terms", series.len())])
}

fn default_point(k: usize, stretch: i64) -> Result<SpectralPoint, HizError> {
    let x: Vec<i64> = (0..k as i64).collect();
    let lambda: Vec<i64> = (0..k as i64).map(|a| a * stretch + a * a).collect();
    SpectralPoint::from_ints(&x, &lambda)
}

fn mc_reports(a: &VerifyArgs, k: usize, y: &Rational) -> Result<Vec<VerificationReport>, HizError> {
    let seed = a.seed.seed;
    match even_beta_of_y(y) {
        Some(2) => {
            let pt = default_point(k, 2)?;
            let est = mc_group_integral(Ensemble::Unitary, &pt, a.samples, seed)?;
            let exact = hciz_unitary_det(&pt)?;
            Ok(vec![VerificationReport::statistical(
                format!("U({k}) Monte Carlo against the determinant formula"),
                [est.mean.re, est.mean.im],
                [exact.re, exact.im],
                est.std_error,
                a.max_sigma,
                est.samples,
            )
            .with_seed(seed)
            .with_input("k", k)])
        }
        Some(4) if (2..=3).contains(&k) => {
            let series = series_for(k, y, None, seed)?.0;
            let (p1, p2) = (default_point(k, 2)?, default_point(k, 1)?);
            let w = PermutationWeights::Canonical;
            let rec = reconstruct_full_integral(&series, y, &p1, w)? / reconstruct_full_integral(&series, y, &p2, w)?;
            let e1 = mc_group_integral(Ensemble::Symplectic, &p1, a.samples, seed)?;
            let e2 = mc_group_integral(Ensemble::Symplectic, &p2, a.samples, seed + 1)?;
            let (m, se) = ratio(&e1, &e2);
            Ok(vec![VerificationReport::statistical(
                format!("Sp({k}) Monte Carlo ratio against the reconstruction"),
                [m.re, m.im],
                [rec.re, rec.im],
                se,
                a.max_sigma,
                e1.samples,
            )
            .with_seed(seed)
            .with_input("k", k)])
        }
        _ => Err(invalid("the mc suite needs beta=2 (any k) or beta=4 (k = 2, 3)")),
    }
}

pub fn verify(a: &VerifyArgs) -> CmdResult {
    let y = a.coupling.resolve()?;
    let reports = match a.suite {
        Suite::Identities => identity_reports(a.k.unwrap_or(4), a.draws, a.seed.seed)?,
        Suite::Pde => pde_reports(a, a.k.unwrap_or(3), &y.unwrap_or_else(|| int(4)))?,
        Suite::Largey => largey_reports(a.k.unwrap_or(3), a.draws.min(50), a.seed.seed)?,
        Suite::Mc => mc_reports(a, a.k.unwrap_or(2), &y.unwrap_or_else(|| int(0)))?,
        Suite::All => {
            let mut out = identity_reports(3, a.draws, a.seed.seed)?;
            out.extend(identity_reports(4, a.draws, a.seed.seed)?);
            for k in [3, 4] {
                out.extend(pde_reports(&VerifyArgs { series: None, ..a.clone() }, k, &int(4))?);
            }
            out.extend(largey_reports(3, 50, a.seed.seed)?);
            out.extend(mc_reports(a, 2, &int(0))?);
            out.extend(mc_reports(a, 2, &int(4))?);
            out
        }
    };
    Ok(Output::reports(reports))
}
