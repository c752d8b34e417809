//! Property suites over seeded generic draws, one per acceptance criterion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use kzdk_core::category_checks::{
    assoc, beta_braid_residual, beta_inverse_residual, braiding_equivariance, equivariance_residual, hexagon_residual,
    pentagon_residual, AXIOM_TOL, EQUIVARIANCE_TOL,
};
use kzdk_core::correlators::{
    closed_form, invariant_basis, invariance_residual, log_coefficient_probe, verify_solution, FormKind, LogSlot,
    Transcription,
};
use kzdk_core::gl11_modules::{build_module, tensor_casimir, Kind, ModuleRep, ModuleSpec};
use kzdk_core::kz_engine::{
    associator, associator_pexp, braiding, delta, frame, kz_residual, series_at0, spectral_table, KzSystem, Pair, Point,
    DEFAULT_ORDER_CAP,
};
use kzdk_core::quantum_gl11::{
    build_qmodule, coassociativity_residual, dk_compare, h_of_kappa, hopf_axioms_residual, intertwining_residual, qdecompose,
    quasitriangularity_residual,
};
use kzdk_core::superlinalg::{jordan_chains, max_abs, op_norm, re, CMat, C64, RANK_TOL};
use kzdk_core::tensor_ring::{decompose, quoted_ring_line, same_multiset, same_multiset_up_to_parity};
use kzdk_core::KzError;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::report::Check;
use crate::sampler::{Sampler, Slot};

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub criterion: u8,
    pub name: String,
    pub passed: bool,
    pub summary: String,
    pub checks: Vec<Check>,
    /// Corrected or complementary checks reported alongside the criterion.
    pub supplementary: Vec<Check>,
    pub rejections: usize,
    pub seconds: f64,
}

impl Outcome {
    fn new(criterion: u8, name: &str) -> Self {
        Outcome {
            criterion,
            name: name.into(),
            passed: false,
            summary: String::new(),
            checks: Vec::new(),
            supplementary: Vec::new(),
            rejections: 0,
            seconds: 0.0,
        }
    }

    fn finish(mut self, start: Instant, budget: Option<f64>) -> Self {
        self.seconds = start.elapsed().as_secs_f64();
        if let Some(limit) = budget {
            self.checks.push(Check::below("runtime seconds", self.seconds, limit, json!({})));
        }
        self.passed = self.checks.iter().all(|c| c.passed);
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        let sfail = self.supplementary.iter().filter(|c| !c.passed).count();
        self.summary = format!(
            "{}/{} checks passed, supplementary {}/{}, {:.2}s",
            self.checks.len() - failed,
            self.checks.len(),
            self.supplementary.len() - sfail,
            self.supplementary.len(),
            self.seconds
        );
        self
    }

    /// Labels of failing primary checks, deduplicated by label.
    pub fn failing_labels(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for c in self.checks.iter().filter(|c| !c.passed) {
            if !out.contains(&c.label) {
                out.push(c.label.clone());
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Overrides the per-criterion draw count.
    pub draws: Option<usize>,
    pub enforce_runtime: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 2024,
            draws: None,
            enforce_runtime: true,
        }
    }
}

impl SuiteConfig {
    fn count(&self, default: usize) -> usize {
        self.draws.unwrap_or(default)
    }

    fn budget(&self, seconds: f64) -> Option<f64> {
        self.enforce_runtime.then_some(seconds)
    }
}

pub const SUITES: [&str; 9] = ["spectral", "series", "pexp", "axioms", "ring", "hopf", "dk", "correlators", "excluded"];

pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Option<Outcome> {
    Some(match name {
        "spectral" => spectral(cfg),
        "series" => series(cfg),
        "pexp" => pexp(cfg),
        "axioms" => axioms(cfg),
        "ring" => ring(cfg),
        "hopf" => hopf(cfg),
        "dk" => dk(cfg),
        "correlators" => correlators(cfg),
        "excluded" => excluded(cfg),
        _ => return None,
    })
}

fn labels(specs: &[ModuleSpec]) -> Value {
    json!(specs.iter().map(|s| s.to_string()).collect::<Vec<_>>())
}

fn reps(specs: &[ModuleSpec]) -> Vec<ModuleRep> {
    specs.iter().map(|s| build_module(s).expect("valid spec")).collect()
}

fn error_check(label: &str, err: &KzError, params: Value) -> Check {
    let mut c = Check::flag(label, false, json!({ "operands": params, "error": err.to_string() }));
    c.residual = f64::INFINITY;
    c
}

fn one() -> C64 {
    re(1.0)
}

/// Eigenvalues and, where stated, Jordan profiles in their commonly quoted form.
fn quoted_spectrum(x: &ModuleSpec, y: &ModuleSpec) -> Vec<(C64, Option<Vec<usize>>)> {
    use Kind::*;
    let z = C64::default();
    match (x.kind, y.kind) {
        (Typical, Typical) if (x.e + y.e).norm() < 1e-12 => {
            vec![(x.e * (y.n - x.n) - x.e * x.e, Some(vec![2, 1, 1]))]
        }
        (Typical, Typical) => vec![
            (delta(x, y, 1.0, 1.0), Some(vec![1, 1])),
            (delta(x, y, -1.0, -1.0), Some(vec![1, 1])),
        ],
        (Typical, Projective) => vec![(x.e * (y.n - 1.0), None), (x.e * (y.n + 1.0), None)],
        (Projective, Projective) => vec![(z, Some(vec![3, 2, 2, 2, 1, 1, 1, 1, 1, 1, 1]))],
        (Typical, Atypical) => vec![(x.e * y.n, None)],
        _ => vec![(z, None)],
    }
}

fn table_check(label: &str, omega: &CMat, claims: &[(C64, Option<Vec<usize>>)], params: Value) -> Check {
    let cands: Vec<C64> = claims.iter().map(|(l, _)| *l).collect();
    match jordan_chains(omega, &cands, RANK_TOL) {
        Ok(jd) => {
            let scale = max_abs(omega).max(1.0);
            let residual = jd.max_chain_residual(omega) / scale;
            let profiles_ok = claims
                .iter()
                .all(|(l, p)| p.as_ref().is_none_or(|p| &jd.profile(*l, 1e-12) == p));
            let mut c = Check::below(label, residual, 1e-12, json!({ "operands": params }));
            if !profiles_ok {
                c.passed = false;
                c.params["profiles"] = json!(claims
                    .iter()
                    .map(|(l, _)| (crate::report::complex(*l), jd.profile(*l, 1e-12)))
                    .collect::<Vec<_>>());
            }
            c
        }
        Err(e) => error_check(label, &e, params),
    }
}

/// Criterion 1: eigenvalues and Jordan profiles of `Ω` on basic pairs.
pub fn spectral(cfg: &SuiteConfig) -> Outcome {
    let start = Instant::now();
    let mut out = Outcome::new(1, "spectral table");
    let cases: [(&str, Vec<Slot>); 7] = [
        ("TT generic", Slot::pattern("TT")),
        ("TT opposite", vec![Slot::Typical, Slot::OppositeOf(0)]),
        ("TP", Slot::pattern("TP")),
        ("PP", Slot::pattern("PP")),
        ("TA", Slot::pattern("TA")),
        ("PA", Slot::pattern("PA")),
        ("AA", Slot::pattern("AA")),
    ];
    let mut sampler = Sampler::new(cfg.seed);
    for (name, pattern) in cases {
        for _ in 0..cfg.count(50) {
            let specs = sampler.draw(&pattern, one());
            let r = reps(&specs);
            let omega = tensor_casimir(&[&r[0], &r[1]], 0, 1).expect("casimir").mat;
            let params = labels(&specs);
            out.checks.push(table_check(&format!("{name} quoted"), &omega, &quoted_spectrum(&specs[0], &specs[1]), params.clone()));
            let corrected: Vec<(C64, Option<Vec<usize>>)> =
                spectral_table(&specs[0], &specs[1]).into_iter().map(|(l, p)| (l, Some(p))).collect();
            out.supplementary.push(table_check(&format!("{name} corrected"), &omega, &corrected, params));
        }
    }
    out.rejections = sampler.rejections;
    out.finish(start, cfg.budget(5.0))
}

fn random_kinds(sampler: &mut Sampler, allowed: &str, len: usize) -> Vec<Slot> {
    let kinds: Vec<char> = allowed.chars().collect();
    (0..len)
        .map(|_| {
            let k = kinds[(sampler.uniform(0.0, kinds.len() as f64) as usize).min(kinds.len() - 1)];
            Slot::pattern(&k.to_string())[0]
        })
        .collect()
}

/// Criterion 2: every series solution at order 20 solves KZ near its base point.
pub fn series(cfg: &SuiteConfig) -> Outcome {
    let start = Instant::now();
    let mut out = Outcome::new(2, "series residuals");
    let mut sampler = Sampler::new(cfg.seed ^ 0x2);
    let draws: Vec<Vec<ModuleSpec>> = (0..cfg.count(100))
        .map(|_| {
            let pat = random_kinds(&mut sampler, "TPA", 3);
            sampler.draw(&pat, one())
        })
        .collect();
    let checks: Vec<Vec<Check>> = draws
        .par_iter()
        .map(|specs| {
            let r = reps(specs);
            let params = labels(specs);
            let sys = match KzSystem::new([&r[0], &r[1], &r[2]], one()) {
                Ok(s) => s,
                Err(e) => return vec![error_check("system", &e, params)],
            };
            [(Point::Zero, 1e-3), (Point::One, 1.0 - 1e-3)]
                .iter()
                .map(|&(point, x)| {
                    let label = format!("series at {point:?}");
                    match frame(&sys, point, 20) {
                        Ok(sols) => {
                            let worst = sols.iter().map(|s| kz_residual(&sys, s, re(x))).fold(0.0, f64::max);
                            Check::below(label, worst, 1e-10, params.clone())
                        }
                        Err(e) => error_check(&label, &e, params.clone()),
                    }
                })
                .collect()
        })
        .collect();
    out.checks = checks.into_iter().flatten().collect();
    out.rejections = sampler.rejections;
    out.finish(start, cfg.budget(30.0))
}

/// Criterion 3: frame associator against the regularized path-ordered exponential.
pub fn pexp(cfg: &SuiteConfig) -> Outcome {
    let start = Instant::now();
    let mut out = Outcome::new(3, "associator cross-method");
    let mut sampler = Sampler::new(cfg.seed ^ 0x3);
    let draws: Vec<Vec<ModuleSpec>> = (0..cfg.count(20))
        .map(|_| {
            let pat = random_kinds(&mut sampler, "TP", 3);
            sampler.draw(&pat, one())
        })
        .collect();
    let pairs: Vec<(Check, Check)> = draws
        .par_iter()
        .map(|specs| {
            let r = reps(specs);
            let params = labels(specs);
            let run = || -> kzdk_core::Result<(f64, f64)> {
                let sys = KzSystem::new([&r[0], &r[1], &r[2]], one())?;
                let a = associator(&sys, DEFAULT_ORDER_CAP)?.matrix;
                let p = associator_pexp(&sys, 1e-4, 100_000)?;
                Ok((op_norm(&(&a - &p.bare)), op_norm(&(&a - &p.corrected))))
            };
            match run() {
                Ok((bare, corr)) => (
                    Check::below("frames vs bare pexp", bare, 1e-6, params.clone()),
                    Check::below("frames vs endpoint-corrected pexp", corr, 1e-6, params),
                ),
                Err(e) => (error_check("frames vs bare pexp", &e, params.clone()), error_check("corrected", &e, params)),
            }
        })
        .collect();
    for (a, b) in pairs {
        out.checks.push(a);
        out.supplementary.push(b);
    }
    out.rejections = sampler.rejections;
    out.finish(start, cfg.budget(120.0))
}

fn with_one_projective(sampler: &mut Sampler, len: usize) -> Vec<Slot> {
    let mut pat = random_kinds(sampler, "TA", len);
    if sampler.uniform(0.0, 1.0) < 0.5 {
        let i = (sampler.uniform(0.0, len as f64) as usize).min(len - 1);
        pat[i] = Slot::Projective;
    }
    pat
}

/// Criterion 4: pentagon, hexagons, β-relations, equivariance, trivial associators.
pub fn axioms(cfg: &SuiteConfig) -> Outcome {
    let start = Instant::now();
    let mut out = Outcome::new(4, "categorical axioms");
    let mut sampler = Sampler::new(cfg.seed ^ 0x4);
    let n = cfg.count(20);
    let mut jobs: Vec<(Vec<ModuleSpec>, C64)> = Vec::new();
    for _ in 0..n {
        let kappa = re(sampler.uniform(0.7, 2.0));
        let pat = with_one_projective(&mut sampler, 4);
        jobs.push((sampler.draw(&pat, kappa), kappa));
    }
    let mut triples: Vec<(Vec<ModuleSpec>, C64)> = Vec::new();
    for _ in 0..n {
        let kappa = re(sampler.uniform(0.7, 2.0));
        let pat = random_kinds(&mut sampler, "TPA", 3);
        triples.push((sampler.draw(&pat, kappa), kappa));
    }
    let mut with_a: Vec<(Vec<ModuleSpec>, C64)> = Vec::new();
    for _ in 0..n {
        let kappa = re(sampler.uniform(0.7, 2.0));
        let mut pat = random_kinds(&mut sampler, "TPA", 3);
        let i = (sampler.uniform(0.0, 3.0) as usize).min(2);
        pat[i] = Slot::Atypical;
        with_a.push((sampler.draw(&pat, kappa), kappa));
    }
    let k = DEFAULT_ORDER_CAP;
    let quad: Vec<Vec<Check>> = jobs
        .par_iter()
        .map(|(specs, kappa)| {
            let r = reps(specs);
            let v = [&r[0], &r[1], &r[2], &r[3]];
            let p = json!({ "modules": labels(specs), "kappa": crate::report::complex(*kappa) });
            let mut cs = Vec::new();
            match pentagon_residual(v, *kappa, k) {
                Ok(rep) => cs.push(Check::below("pentagon", rep.residual, AXIOM_TOL, p.clone())),
                Err(e) => cs.push(error_check("pentagon", &e, p.clone())),
            }
            for sign in [1.0, -1.0] {
                match beta_braid_residual(v, *kappa, sign, k) {
                    Ok(rep) => cs.push(Check::below("beta braid relation", rep.residual, AXIOM_TOL, p.clone())),
                    Err(e) => cs.push(error_check("beta braid relation", &e, p.clone())),
                }
            }
            cs
        })
        .collect();
    let tri: Vec<Vec<Check>> = triples
        .par_iter()
        .map(|(specs, kappa)| {
            let r = reps(specs);
            let v = [&r[0], &r[1], &r[2]];
            let p = json!({ "modules": labels(specs), "kappa": crate::report::complex(*kappa) });
            let mut cs = Vec::new();
            for sign in [1.0, -1.0] {
                let label = if sign > 0.0 { "hexagon +" } else { "hexagon -" };
                match hexagon_residual(v, *kappa, sign, k) {
                    Ok(rep) => cs.push(Check::below(label, rep.residual, AXIOM_TOL, p.clone())),
                    Err(e) => cs.push(error_check(label, &e, p.clone())),
                }
            }
            match beta_inverse_residual(v, *kappa, k) {
                Ok(rep) => cs.push(Check::below("beta inverse relation", rep.residual, AXIOM_TOL, p.clone())),
                Err(e) => cs.push(error_check("beta inverse relation", &e, p.clone())),
            }
            match assoc(v[0], v[1], v[2], *kappa, k).and_then(|a| equivariance_residual(&a, &v)) {
                Ok(rep) => cs.push(Check::below("associator equivariance", rep.residual, EQUIVARIANCE_TOL, p.clone())),
                Err(e) => cs.push(error_check("associator equivariance", &e, p.clone())),
            }
            for (a, b) in [(v[0], v[1]), (v[1], v[2])] {
                match braiding(a, b, *kappa, 1.0).and_then(|s| braiding_equivariance(&s, a, b)) {
                    Ok(rep) => cs.push(Check::below("braiding equivariance", rep.residual, EQUIVARIANCE_TOL, p.clone())),
                    Err(e) => cs.push(error_check("braiding equivariance", &e, p.clone())),
                }
            }
            cs
        })
        .collect();
    let triv: Vec<Check> = with_a
        .par_iter()
        .map(|(specs, kappa)| {
            let r = reps(specs);
            let p = json!({ "modules": labels(specs), "kappa": crate::report::complex(*kappa) });
            match assoc(&r[0], &r[1], &r[2], *kappa, k) {
                Ok(a) => {
                    let n = a.nrows();
                    Check::below("associator with atypical is identity", op_norm(&(a - CMat::identity(n, n))), 1e-13, p)
                }
                Err(e) => error_check("associator with atypical is identity", &e, p),
            }
        })
        .collect();
    out.checks = quad.into_iter().chain(tri).flatten().chain(triv).collect();
    out.rejections = sampler.rejections;
    out.finish(start, None)
}

/// Pair patterns covering every line of the ring table.
fn ring_patterns() -> Vec<Vec<Slot>> {
    vec![
        Slot::pattern("TT"),
        vec![Slot::Typical, Slot::OppositeOf(0)],
        Slot::pattern("TP"),
        Slot::pattern("PT"),
        Slot::pattern("PP"),
        Slot::pattern("TA"),
        Slot::pattern("AT"),
        Slot::pattern("PA"),
        Slot::pattern("AP"),
        Slot::pattern("AA"),
    ]
}

/// Criterion 5: classical and quantum decompositions agree with the ring table.
pub fn ring(cfg: &SuiteConfig) -> Outcome {
    let start = Instant::now();
    let mut out = Outcome::new(5, "tensor ring");
    let mut sampler = Sampler::new(cfg.seed ^ 0x5);
    let patterns = ring_patterns();
    let draws: Vec<(Vec<ModuleSpec>, C64)> = (0..cfg.count(100))
        .map(|i| {
            let kappa = re(sampler.uniform(0.7, 2.0));
            (sampler.draw(&patterns[i % patterns.len()], kappa), kappa)
        })
        .collect();
    let rows: Vec<(Vec<Check>, Vec<Check>)> = draws
        .par_iter()
        .map(|(specs, kappa)| {
            let p = json!({ "modules": labels(specs), "kappa": crate::report::complex(*kappa) });
            let run = || -> kzdk_core::Result<(Vec<Check>, Vec<Check>)> {
                let (a, b) = (build_module(&specs[0])?, build_module(&specs[1])?);
                let h = h_of_kappa(*kappa);
                let (qa, qb) = (build_qmodule(&specs[0], h)?, build_qmodule(&specs[1], h)?);
                let cl = decompose(&a, &b, *kappa)?;
                let qu = qdecompose(&qa, &qb)?;
                let quoted = quoted_ring_line(&specs[0], &specs[1]);
                let (lc, lq) = (cl.labels(), qu.labels());
                let mut p = p.clone();
                p["classical"] = labels(&lc);
                p["quoted"] = labels(&quoted);
                let primary = vec![
                    Check::flag("classical = quantum multiset", same_multiset(&lc, &lq), p.clone()),
                    Check::flag("matches quoted line with parity flags", same_multiset(&lc, &quoted), p.clone()),
                    Check::below("classical certificate", cl.certificate_residual, 1e-9, p.clone()),
                    Check::below("quantum certificate", qu.certificate_residual, 1e-9, p.clone()),
                ];
                let extra = vec![Check::flag("matches quoted line up to parity", same_multiset_up_to_parity(&lc, &quoted), p)];
                Ok((primary, extra))
            };
            run().unwrap_or_else(|e| (vec![error_check("decomposition", &e, p)], vec![]))
        })
        .collect();
    for (a, b) in rows {
        out.checks.extend(a);
        out.supplementary.extend(b);
    }
    out.rejections = sampler.rejections;
    out.finish(start, cfg.budget(30.0))
}

/// Criterion 6: quasitriangularity, coassociativity, counit and antipode.
pub fn hopf(cfg: &SuiteConfig) -> Outcome {
    let start = Instant::now();
    let mut out = Outcome::new(6, "Hopf and quasitriangularity");
    let mut sampler = Sampler::new(cfg.seed ^ 0x6);
    let kinds = ["T", "P", "A"];
    let mut triples: Vec<(Vec<ModuleSpec>, C64)> = Vec::new();
    for _ in 0..cfg.count(1) {
        for a in kinds {
            for b in kinds {
                for c in kinds {
                    let kappa = re(sampler.uniform(0.7, 2.0));
                    triples.push((sampler.draw(&Slot::pattern(&format!("{a}{b}{c}")), kappa), kappa));
                }
            }
        }
    }
    let tol = 1e-11;
    let rows: Vec<(Vec<Check>, Vec<Check>)> = triples
        .par_iter()
        .map(|(specs, kappa)| {
            let p = json!({ "modules": labels(specs), "kappa": crate::report::complex(*kappa) });
            let run = || -> kzdk_core::Result<(Vec<Check>, Vec<Check>)> {
                let h = h_of_kappa(*kappa);
                let q: Vec<ModuleRep> = specs.iter().map(|s| build_qmodule(s, h)).collect::<kzdk_core::Result<_>>()?;
                let qt = quasitriangularity_residual(&q[0], &q[1], &q[2])?;
                let hr = hopf_axioms_residual(&q[0])?;
                let mut p1 = p.clone();
                p1["module"] = json!(specs[0].to_string());
                let primary = vec![
                    Check::below("(Delta x id)R = R13 R23", qt.left_cabling, tol, p.clone()),
                    Check::below("(id x Delta)R = R13 R12", qt.right_cabling, tol, p.clone()),
                    Check::below("R intertwines coproducts", qt.intertwining.max(intertwining_residual(&q[0], &q[1])?), tol, p.clone()),
                    Check::below("coassociativity", coassociativity_residual(&q[0], &q[1], &q[2])?, tol, p.clone()),
                    Check::below("counit", hr.counit, tol, p1.clone()),
                    Check::below("antipode (quoted)", hr.antipode_quoted, tol, p1.clone()),
                ];
                let extra = vec![Check::below("antipode (gamma(psi) = -psi)", hr.antipode_consistent, tol, p1)];
                Ok((primary, extra))
            };
            run().unwrap_or_else(|e| (vec![error_check("quantum build", &e, p)], vec![]))
        })
        .collect();
    for (a, b) in rows {
        out.checks.extend(a);
        out.supplementary.extend(b);
    }
    out.rejections = sampler.rejections;
    out.finish(start, cfg.budget(10.0))
}

/// Criterion 7: KZ and R-matrix braidings have the same conjugation invariants.
pub fn dk(cfg: &SuiteConfig) -> Outcome {
    let start = Instant::now();
    let mut out = Outcome::new(7, "Drinfeld-Kohno eigen-data");
    let mut sampler = Sampler::new(cfg.seed ^ 0x7);
    let kinds = ["T", "P", "A"];
    let mut draws: Vec<(Vec<ModuleSpec>, C64)> = Vec::new();
    for _ in 0..cfg.count(50) {
        for a in kinds {
            for b in kinds {
                let kappa = re(sampler.uniform(0.7, 2.0));
                draws.push((sampler.draw(&Slot::pattern(&format!("{a}{b}")), kappa), kappa));
            }
            let kappa = re(sampler.uniform(0.7, 2.0));
            let x = sampler.draw(&Slot::pattern(a), kappa);
            draws.push((vec![x[0], x[0]], kappa));
        }
    }
    out.checks = draws
        .par_iter()
        .map(|(specs, kappa)| {
            let p = json!({ "modules": labels(specs), "kappa": crate::report::complex(*kappa) });
            match dk_compare(&specs[0], &specs[1], *kappa) {
                Ok(r) => {
                    let label = if r.braiding.is_some() {
                        "braiding and double braiding"
                    } else {
                        "double braiding"
                    };
                    Check::flag(label, r.matched(), p)
                }
                Err(e) => error_check("dk-compare", &e, p),
            }
        })
        .collect();
    out.rejections = sampler.rejections;
    out.finish(start, None)
}

struct FormCase {
    kind: FormKind,
    code: &'static str,
    sector: f64,
}

const CORRELATOR_CASES: [FormCase; 13] = [
    FormCase { kind: FormKind::TwoTypical, code: "TT", sector: 0.0 },
    FormCase { kind: FormKind::TwoProjective, code: "PP", sector: -1.0 },
    FormCase { kind: FormKind::TwoProjective, code: "PP", sector: 0.0 },
    FormCase { kind: FormKind::TwoProjective, code: "PP", sector: 1.0 },
    FormCase { kind: FormKind::OneDimensional, code: "TTT", sector: -0.5 },
    FormCase { kind: FormKind::OneDimensional, code: "TTT", sector: 0.5 },
    FormCase { kind: FormKind::OneDimensional, code: "TTP", sector: -1.0 },
    FormCase { kind: FormKind::OneDimensional, code: "PPP", sector: 2.0 },
    FormCase { kind: FormKind::TypicalPairProjective, code: "TTP", sector: 0.0 },
    FormCase { kind: FormKind::ProjectiveTripleZero, code: "PPP", sector: 0.0 },
    FormCase { kind: FormKind::ProjectiveTripleOne, code: "PPP", sector: -1.0 },
    FormCase { kind: FormKind::ProjectiveTripleOne, code: "PPP", sector: 1.0 },
    FormCase { kind: FormKind::OneDimensional, code: "PPP", sector: -2.0 },
];

fn form_name(kind: FormKind) -> &'static str {
    match kind {
        FormKind::TwoTypical => "sol1",
        FormKind::TwoProjective => "sol2",
        FormKind::OneDimensional => "sol31",
        FormKind::TypicalPairProjective => "TTP1",
        FormKind::ProjectiveTripleZero => "PPP0",
        FormKind::ProjectiveTripleOne => "PPP1",
    }
}

/// Draw for a correlator case: opposite `e` on the first two typicals, `Σ n` fixed.
fn correlator_specs(sampler: &mut Sampler, case: &FormCase, kappa: C64) -> Vec<ModuleSpec> {
    let mut pat = Slot::pattern(case.code);
    let typicals = case.code.matches('T').count();
    if typicals == 2 {
        pat[1] = Slot::OppositeOf(0);
    }
    loop {
        let mut specs = sampler.draw(&pat, kappa);
        if typicals == 3 {
            let e3 = -(specs[0].e + specs[1].e);
            if e3.norm() < 0.05 || ((e3 / kappa).re - (e3 / kappa).re.round()).abs() < 1e-4 {
                continue;
            }
            specs[2] = ModuleSpec::typical_c(e3, specs[2].n);
        }
        let rest: C64 = specs[..specs.len() - 1].iter().map(|s| s.n).sum();
        let last = specs.len() - 1;
        specs[last].n = re(case.sector) - rest;
        return specs;
    }
}

/// Samples in `(0.1, 0.9)` for three points, `{0.5, 1.3, 2.7}` for two.
pub fn correlator_samples(points: usize) -> Vec<f64> {
    if points == 2 {
        vec![0.5, 1.3, 2.7]
    } else {
        vec![0.1, 0.25, 0.4, 0.55, 0.7, 0.85, 0.9]
    }
}

/// Log-coefficient probes named in the criterion: `(term, slot)` per form.
fn probe_targets(kind: FormKind, sector: f64, transcription: Transcription) -> Vec<(usize, LogSlot)> {
    match (kind, transcription) {
        (FormKind::TwoProjective, Transcription::Quoted) if sector == 0.0 => vec![(1, LogSlot::LnX)],
        (FormKind::TwoProjective, Transcription::Consistent) if sector == 0.0 => vec![(1, LogSlot::LnX)],
        (FormKind::ProjectiveTripleOne, _) => vec![(2, LogSlot::LnX), (2, LogSlot::LnOneMinusX)],
        _ => vec![],
    }
}

/// Criterion 8: closed-form correlators, forced log coefficients, invariant dimensions.
pub fn correlators(cfg: &SuiteConfig) -> Outcome {
    let start = Instant::now();
    let mut out = Outcome::new(8, "correlator closed forms");
    let mut sampler = Sampler::new(cfg.seed ^ 0x8);
    let mut jobs = Vec::new();
    for _ in 0..cfg.count(5) {
        for case in &CORRELATOR_CASES {
            let kappa = C64::new(sampler.uniform(0.7, 2.0), sampler.uniform(-0.3, 0.3));
            let specs = correlator_specs(&mut sampler, case, kappa);
            let constants: Vec<C64> = (0..4)
                .map(|_| C64::new(sampler.uniform(-1.0, 1.0), sampler.uniform(-1.0, 1.0)))
                .collect();
            jobs.push((case, specs, kappa, constants));
        }
    }
    let rows: Vec<(Vec<Check>, Vec<Check>)> = jobs
        .par_iter()
        .map(|(case, specs, kappa, constants)| {
            let name = form_name(case.kind);
            let p = json!({
                "modules": labels(specs),
                "kappa": crate::report::complex(*kappa),
                "sector": case.sector,
                "constants": constants.iter().map(|z| crate::report::complex(*z)).collect::<Vec<_>>(),
            });
            let samples = correlator_samples(specs.len());
            let mut primary = Vec::new();
            let mut extra = Vec::new();
            for tr in [Transcription::Quoted, Transcription::Consistent] {
                let tag = match tr {
                    Transcription::Quoted => "quoted",
                    Transcription::Consistent => "consistent",
                };
                let label = format!("{name} (n-sum {}) {tag}", case.sector);
                let sol = match closed_form(case.kind, specs, *kappa, constants, tr) {
                    Ok(s) => s,
                    Err(e) => {
                        primary.push(error_check(&label, &e, p.clone()));
                        continue;
                    }
                };
                let sink = if tr == Transcription::Quoted { &mut primary } else { &mut extra };
                match verify_solution(&sol, &samples) {
                    Ok(r) => sink.push(Check::below(label.clone(), r.max, 1e-10, p.clone())),
                    Err(e) => sink.push(error_check(&label, &e, p.clone())),
                }
                for (term, slot) in probe_targets(case.kind, case.sector, tr) {
                    let plabel = format!("{name} (n-sum {}) {tag} log coefficient {term}/{slot:?} forced", case.sector);
                    match log_coefficient_probe(&sol, term, slot, 1e-3, &samples) {
                        Ok(pr) => {
                            let mut pp = p.clone();
                            pp["base"] = json!(pr.base);
                            pp["perturbed"] = json!(pr.perturbed);
                            sink.push(Check::flag(plabel, pr.forced(1e-10, 1e-4), pp));
                        }
                        Err(e) => sink.push(error_check(&plabel, &e, p.clone())),
                    }
                }
            }
            (primary, extra)
        })
        .collect();
    for (a, b) in rows {
        out.checks.extend(a);
        out.supplementary.extend(b);
    }
    let ledger: [(&str, usize); 5] = [("TT", 1), ("PP", 4), ("TTT", 2), ("TTP", 4), ("PPP", 12)];
    for (code, expected) in ledger {
        let case = FormCase {
            kind: FormKind::OneDimensional,
            code,
            sector: 0.0,
        };
        let specs = correlator_specs(&mut sampler, &case, one());
        let p = json!({ "modules": labels(&specs), "expected": expected });
        match invariant_basis(&specs) {
            Ok(inv) => {
                let mut pc = p.clone();
                pc["computed"] = json!(inv.dim());
                pc["sectors"] = json!(inv.comparison);
                out.checks.push(Check::flag(format!("{code} invariant dimension"), inv.dim() == expected, pc));
                let quoted = inv.quoted.clone().unwrap_or_default();
                let worst = quoted
                    .iter()
                    .map(|v| invariance_residual(&specs, v).unwrap_or(f64::INFINITY))
                    .fold(0.0, f64::max);
                let inside = inv.comparison.iter().all(|c| c.quoted_inside);
                let mut pq = p.clone();
                pq["quotedCount"] = json!(quoted.len());
                out.supplementary.push(Check::flag(
                    format!("{code} quoted invariants: count, invariance, independence"),
                    quoted.len() == expected && inside && worst < 1e-12,
                    pq,
                ));
            }
            Err(e) => out.checks.push(error_check(&format!("{code} invariant dimension"), &e, p)),
        }
    }
    out.rejections = sampler.rejections;
    out.finish(start, None)
}

fn is_excluded<T>(r: std::thread::Result<kzdk_core::Result<T>>) -> (bool, String) {
    match r {
        Ok(Err(KzError::ExcludedParameter(m))) => (true, m),
        Ok(Err(e)) => (false, format!("wrong error: {e}")),
        Ok(Ok(_)) => (false, "no error".into()),
        Err(_) => (false, "panicked".into()),
    }
}

/// Criterion 9: `(e₁+e₂)/κ = 1` is rejected with the designated error.
pub fn excluded(_cfg: &SuiteConfig) -> Outcome {
    let start = Instant::now();
    let mut out = Outcome::new(9, "excluded parameters");
    for (e1, e2, kappa) in [(0.3, 0.7, 1.0), (0.25, 0.5, 0.75), (-0.4, 1.6, 1.2)] {
        let k = re(kappa);
        let x = ModuleSpec::typical(e1, 0.2);
        let y = ModuleSpec::typical(e2, -0.3);
        let z = ModuleSpec::atypical(0.4);
        let p = json!({ "modules": labels(&[x, y, z]), "kappa": kappa });
        let series = catch_unwind(AssertUnwindSafe(|| -> kzdk_core::Result<()> {
            let r = reps(&[x, y, z]);
            let sys = KzSystem::new([&r[0], &r[1], &r[2]], k)?;
            for chain in &sys.spectral_data(Pair::Omega12).blocks {
                series_at0(&sys, chain, 20)?;
            }
            Ok(())
        }));
        let (ok, msg) = is_excluded(series);
        let mut ps = p.clone();
        ps["outcome"] = json!(msg);
        out.checks.push(Check::flag("series_at0 raises excluded-parameter", ok, ps));
        let dec = catch_unwind(AssertUnwindSafe(|| {
            let r = reps(&[x, y]);
            decompose(&r[0], &r[1], k)
        }));
        let (ok, msg) = is_excluded(dec);
        let mut pd = p.clone();
        pd["outcome"] = json!(msg);
        out.checks.push(Check::flag("decompose raises excluded-parameter", ok, pd));
    }
    out.finish(start, None)
}
