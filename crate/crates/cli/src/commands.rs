//! Argument definitions and dispatch for the `kzdk` binary.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use kzdk_core::category_checks::{
    assoc, beta_braid_residual, beta_inverse_residual, braiding_equivariance, equivariance_residual, hexagon_residual,
    pentagon_residual, AxiomReport, AXIOM_TOL,
};
use kzdk_core::correlators::{
    auto_form, closed_form, invariant_basis, log_coefficient_probe, verify_solution, FormKind, LabeledVector, LogSlot,
    Transcription,
};
use kzdk_core::gl11_modules::{build_module, parse_number, ModuleRep, ModuleSpec};
use kzdk_core::kz_engine::{associator, associator_pexp, braiding, monodromy0, KzSystem, DEFAULT_ORDER_CAP, MATCH_POINT};
use kzdk_core::quantum_gl11::{
    build_qmodule, classical_limit_defect, coassociativity_residual, dk_compare, h_of_kappa, hopf_axioms_residual,
    intertwining_residual, qdecompose, qtensor, quasitriangularity_residual,
};
use kzdk_core::superlinalg::{kron, op_norm, CMat, C64};
use kzdk_core::tensor_ring::{
    decompose, decompose_rep, genericity, quoted_ring_line, require_generic, same_multiset, same_multiset_up_to_parity,
    tensor_all, DecompositionResult,
};
use kzdk_core::{KzError, Result};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::report::{complex, matrix, vector, Check, Report};
use crate::sampler::{Sampler, Slot};
use crate::suites::{correlator_samples, run_suite, SuiteConfig, SUITES};

#[derive(Parser, Debug)]
#[command(name = "kzdk", version, about = "KZ associators, braidings and quantum R-matrices for gl(1|1)")]
pub struct Cli {
    /// Level κ: real, `p/q`, or complex `a+bi`.
    #[arg(long, global = true, default_value = "1", value_parser = parse_complex)]
    pub kappa: C64,
    /// Pass threshold for the command's primary checks.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Series order cap.
    #[arg(long, global = true, default_value_t = DEFAULT_ORDER_CAP)]
    pub order: usize,
    #[arg(long, global = true, default_value_t = 2024)]
    pub seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub emit_matrices: bool,
    /// Include wall-clock timings (the report is then not bit-reproducible).
    #[arg(long, global = true)]
    pub timings: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decompose a tensor product into indecomposables.
    Decompose {
        #[arg(long, num_args = 2.., required = true, value_parser = parse_spec)]
        modules: Vec<ModuleSpec>,
        /// Use the quantum modules at `h = iπ/κ`.
        #[arg(long)]
        quantum: bool,
    },
    /// Associator of a triple.
    Associator {
        #[arg(long, num_args = 3, required = true, value_parser = parse_spec)]
        modules: Vec<ModuleSpec>,
        #[arg(long, value_enum, default_value_t = Method::Frames)]
        method: Method,
        #[arg(long, default_value_t = 1e-4)]
        t: f64,
        #[arg(long, default_value_t = 100_000)]
        steps: usize,
    },
    /// Braiding `σ = P·exp(±iπΩ/κ)` of a pair.
    Braiding {
        #[arg(long, num_args = 2, required = true, value_parser = parse_spec)]
        modules: Vec<ModuleSpec>,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        sign: f64,
    },
    /// Monodromy `exp(2πiΩ₁₂/κ)` around `x = 0`.
    Monodromy {
        #[arg(long, num_args = 3, required = true, value_parser = parse_spec)]
        modules: Vec<ModuleSpec>,
    },
    /// Braided-category axioms.
    Verify {
        #[arg(long, value_enum, default_value_t = AxiomArg::All)]
        axiom: AxiomArg,
        #[arg(long, num_args = 3..=4, required = true, value_parser = parse_spec)]
        modules: Vec<ModuleSpec>,
        /// Replace the parameters by this many seeded draws of the same kinds.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Quantum tensor ring against the classical one.
    Qring {
        #[arg(long, num_args = 2, required = true, value_parser = parse_spec)]
        modules: Vec<ModuleSpec>,
    },
    /// Hopf and quasitriangularity identities on quantum modules.
    Qverify {
        #[arg(long, num_args = 1..=3, required = true, value_parser = parse_spec)]
        modules: Vec<ModuleSpec>,
    },
    /// Eigen-data of KZ and R-matrix braidings.
    DkCompare {
        #[arg(long, num_args = 2, required = true, value_parser = parse_spec)]
        modules: Vec<ModuleSpec>,
    },
    /// Invariants and closed-form correlators.
    Correlator {
        #[arg(long, num_args = 2..=3, required = true, value_parser = parse_spec)]
        modules: Vec<ModuleSpec>,
        #[arg(long, value_enum, default_value_t = FormArg::Auto)]
        form: FormArg,
        #[arg(long, value_enum, default_value_t = TranscriptionArg::Both)]
        transcription: TranscriptionArg,
        /// Constants `A, B, C3, C4` (real or `a+bi`); missing ones are 1.
        #[arg(long, num_args = 1.., value_parser = parse_complex, allow_hyphen_values = true)]
        constants: Vec<C64>,
        #[arg(long, num_args = 1.., value_parser = parse_real)]
        samples: Vec<f64>,
    },
    /// Property suites over seeded generic draws.
    Sweep {
        #[arg(long, num_args = 1.., default_values_t = vec!["all".to_string()])]
        suite: Vec<String>,
        /// Override the per-suite draw count.
        #[arg(long)]
        draws: Option<usize>,
        #[arg(long)]
        no_runtime_limits: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Frames,
    Pexp,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AxiomArg {
    Pentagon,
    Hexagon,
    Beta,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormArg {
    Auto,
    Sol1,
    Sol2,
    Sol31,
    Ttp1,
    Ppp0,
    Ppp1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TranscriptionArg {
    Quoted,
    Consistent,
    Both,
}

pub fn parse_spec(s: &str) -> std::result::Result<ModuleSpec, String> {
    s.parse::<ModuleSpec>().map_err(|e| e.to_string())
}

fn parse_real(s: &str) -> std::result::Result<f64, String> {
    parse_number(s).map_err(|e| e.to_string())
}

/// `a`, `a+bi`, `a-bi`, `bi`; each part decimal or `p/q`.
pub fn parse_complex(s: &str) -> std::result::Result<C64, String> {
    let t = s.trim().replace(' ', "");
    let Some(body) = t.strip_suffix('i') else {
        return parse_real(&t).map(|x| C64::new(x, 0.0));
    };
    let split = body
        .char_indices()
        .skip(1)
        .filter(|&(i, c)| (c == '+' || c == '-') && !body[..i].ends_with(['e', 'E']))
        .map(|(i, _)| i)
        .last();
    let (re_part, im_part) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im_part {
        "" | "+" => 1.0,
        "-" => -1.0,
        p => parse_real(p.strip_prefix('+').unwrap_or(p))?,
    };
    Ok(C64::new(parse_real(re_part)?, im))
}

/// Process exit status for a finished run.
pub fn exit_code(result: &Result<Report>) -> i32 {
    match result {
        Ok(r) if r.passed() => 0,
        Ok(_) => 1,
        Err(KzError::Parse(_)) => 2,
        Err(KzError::ExcludedParameter(_)) => 3,
        Err(_) => 1,
    }
}

fn specs_json(specs: &[ModuleSpec]) -> Value {
    json!(specs.iter().map(|s| s.to_string()).collect::<Vec<_>>())
}

fn config(cli: &Cli, name: &str, extra: Value) -> Value {
    let mut c = json!({
        "command": name,
        "kappa": complex(cli.kappa),
        "tol": cli.tol,
        "order": cli.order,
        "seed": cli.seed,
        "emitMatrices": cli.emit_matrices,
    });
    if let (Some(obj), Value::Object(more)) = (c.as_object_mut(), extra) {
        obj.extend(more);
    }
    c
}

fn reps(specs: &[ModuleSpec]) -> Result<Vec<ModuleRep>> {
    specs.iter().map(build_module).collect()
}

fn summands_json(d: &DecompositionResult) -> Value {
    json!(d
        .summands
        .iter()
        .map(|(s, m)| json!({
            "label": s.with_parity(false).to_string(),
            "parityReversed": s.parity_reversed,
            "multiplicity": m,
        }))
        .collect::<Vec<_>>())
}

fn axiom_check(r: &AxiomReport, label: &str, tol: f64) -> Check {
    Check::below(label, r.residual, tol, json!({ "operands": r.operands }))
}

fn vectors_json(list: &[LabeledVector]) -> Value {
    json!(list
        .iter()
        .map(|v| json!({ "label": v.label, "sector": v.sector, "vector": vector(&v.vector) }))
        .collect::<Vec<_>>())
}

pub fn run(cli: &Cli) -> Result<Report> {
    let start = Instant::now();
    let mut report = match &cli.command {
        Command::Decompose { modules, quantum } => run_decompose(cli, modules, *quantum)?,
        Command::Associator { modules, method, t, steps } => run_associator(cli, modules, *method, *t, *steps)?,
        Command::Braiding { modules, sign } => run_braiding(cli, modules, *sign)?,
        Command::Monodromy { modules } => run_monodromy(cli, modules)?,
        Command::Verify { axiom, modules, samples } => run_verify(cli, *axiom, modules, *samples)?,
        Command::Qring { modules } => run_qring(cli, modules)?,
        Command::Qverify { modules } => run_qverify(cli, modules)?,
        Command::DkCompare { modules } => run_dk(cli, modules)?,
        Command::Correlator {
            modules,
            form,
            transcription,
            constants,
            samples,
        } => run_correlator(cli, modules, *form, *transcription, constants, samples)?,
        Command::Sweep {
            suite,
            draws,
            no_runtime_limits,
        } => run_sweep(cli, suite, *draws, *no_runtime_limits)?,
    };
    if cli.timings {
        let mut t = Map::new();
        t.insert("totalSeconds".into(), json!(start.elapsed().as_secs_f64()));
        report.timings = Some(t);
    }
    Ok(report)
}

fn run_decompose(cli: &Cli, modules: &[ModuleSpec], quantum: bool) -> Result<Report> {
    let mut report = Report::new("decompose", config(cli, "decompose", json!({ "modules": specs_json(modules), "quantum": quantum })));
    let tol = cli.tol.unwrap_or(1e-9);
    let h = h_of_kappa(cli.kappa);
    let result = if quantum {
        let q: Vec<ModuleRep> = modules.iter().map(|s| build_qmodule(s, h)).collect::<Result<_>>()?;
        if q.len() == 2 {
            qdecompose(&q[0], &q[1])?
        } else {
            require_generic(modules, cli.kappa, false)?;
            let mut acc = q[0].clone();
            for m in &q[1..] {
                acc = qtensor(&acc, m)?;
            }
            decompose_rep(&acc)?
        }
    } else {
        let r = reps(modules)?;
        if r.len() == 2 {
            decompose(&r[0], &r[1], cli.kappa)?
        } else {
            require_generic(modules, cli.kappa, false)?;
            decompose_rep(&tensor_all(&r.iter().collect::<Vec<_>>())?)?
        }
    };
    report.set("summands", summands_json(&result));
    report.set("certificateResidual", result.certificate_residual);
    report.set("conditionNumber", result.condition_number);
    report.checks.push(Check::below("block-diagonal certificate", result.certificate_residual, tol, json!({})));
    if modules.len() == 2 {
        let quoted = quoted_ring_line(&modules[0], &modules[1]);
        let labels = result.labels();
        report.set("quotedLine", specs_json(&quoted));
        report.set("matchesQuotedLine", same_multiset(&labels, &quoted));
        report.set("matchesQuotedLineUpToParity", same_multiset_up_to_parity(&labels, &quoted));
    }
    report.matrices.insert("changeOfBasis".into(), matrix(&result.change_of_basis));
    Ok(report)
}

fn run_associator(cli: &Cli, modules: &[ModuleSpec], method: Method, t: f64, steps: usize) -> Result<Report> {
    let cfg = json!({ "modules": specs_json(modules), "method": format!("{method:?}").to_lowercase(), "t": t, "steps": steps });
    let mut report = Report::new("associator", config(cli, "associator", cfg));
    require_generic(modules, cli.kappa, true)?;
    let r = reps(modules)?;
    let sys = KzSystem::new([&r[0], &r[1], &r[2]], cli.kappa)?;
    let tol = cli.tol.unwrap_or(1e-8);
    report.set("flatnessResidual", sys.flatness_residual());
    report.set("casimirEquivarianceResidual", sys.equivariance_residual());
    report.note("matchPoint", MATCH_POINT);
    let mut frames = None;
    if method != Method::Pexp {
        let a = associator(&sys, cli.order)?;
        report.set("orderUsed", a.order);
        report.set("frameCondition", [a.frame_condition.0, a.frame_condition.1]);
        report.note("seriesOrderCap", cli.order);
        let eq = equivariance_residual(&a.matrix, &[&r[0], &r[1], &r[2]])?;
        report.checks.push(axiom_check(&eq, "associator equivariance", cli.tol.unwrap_or(1e-9)));
        report.matrices.insert("associator".into(), matrix(&a.matrix));
        frames = Some(a.matrix);
    }
    if method != Method::Frames {
        let p = associator_pexp(&sys, t, steps)?;
        report.note("pexp", json!({ "t": t, "steps": steps, "scheme": "RK4 in logit coordinate" }));
        report.matrices.insert("pexpBare".into(), matrix(&p.bare));
        report.matrices.insert("pexpCorrected".into(), matrix(&p.corrected));
        if let Some(a) = &frames {
            let bare = op_norm(&(a - &p.bare));
            let corrected = op_norm(&(a - &p.corrected));
            report.set("framesVsPexpBare", bare);
            report.set("framesVsPexpCorrected", corrected);
            report.checks.push(Check::below("frames vs bare pexp", bare, cli.tol.unwrap_or(1e-6), json!({})));
            report.checks.push(Check::below("frames vs endpoint-corrected pexp", corrected, cli.tol.unwrap_or(1e-6), json!({})));
        }
    }
    let _ = tol;
    Ok(report)
}

fn run_braiding(cli: &Cli, modules: &[ModuleSpec], sign: f64) -> Result<Report> {
    let mut report = Report::new("braiding", config(cli, "braiding", json!({ "modules": specs_json(modules), "sign": sign })));
    require_generic(modules, cli.kappa, false)?;
    let r = reps(modules)?;
    let s = braiding(&r[0], &r[1], cli.kappa, sign.signum())?;
    let eq = braiding_equivariance(&s, &r[0], &r[1])?;
    report.checks.push(axiom_check(&eq, "braiding equivariance", cli.tol.unwrap_or(1e-9)));
    let back = braiding(&r[1], &r[0], cli.kappa, -sign.signum())?;
    let n = s.nrows();
    let inv = op_norm(&(&back * &s - CMat::identity(n, n)));
    report.checks.push(Check::below("sigma^-_{BA} sigma^+_{AB} = id", inv, cli.tol.unwrap_or(1e-9), json!({})));
    report.note("braiding", "P exp(sign i pi Omega / kappa), P the graded swap");
    report.matrices.insert("sigma".into(), matrix(&s));
    Ok(report)
}

fn run_monodromy(cli: &Cli, modules: &[ModuleSpec]) -> Result<Report> {
    let mut report = Report::new("monodromy", config(cli, "monodromy", json!({ "modules": specs_json(modules) })));
    require_generic(modules, cli.kappa, true)?;
    let r = reps(modules)?;
    let sys = KzSystem::new([&r[0], &r[1], &r[2]], cli.kappa)?;
    let m = monodromy0(&sys)?;
    let twice = braiding(&r[1], &r[0], cli.kappa, 1.0)? * braiding(&r[0], &r[1], cli.kappa, 1.0)?;
    let d3 = r[2].dim();
    let res = op_norm(&(&m - kron(&twice, &CMat::identity(d3, d3))));
    report.checks.push(Check::below("monodromy = double braiding on first pair", res, cli.tol.unwrap_or(1e-9), json!({})));
    report.note("loop", "counterclockwise around x = 0");
    report.matrices.insert("monodromy".into(), matrix(&m));
    Ok(report)
}

fn verify_instance(specs: &[ModuleSpec], kappa: C64, axiom: AxiomArg, order: usize, tol: f64) -> Result<Vec<Check>> {
    let r = reps(specs)?;
    let mut out = Vec::new();
    let want = |a: AxiomArg| axiom == a || axiom == AxiomArg::All;
    let p = json!({ "modules": specs_json(specs), "kappa": complex(kappa) });
    let tag = |mut c: Check| {
        c.params = p.clone();
        c
    };
    if r.len() == 4 && want(AxiomArg::Pentagon) {
        out.push(tag(axiom_check(&pentagon_residual([&r[0], &r[1], &r[2], &r[3]], kappa, order)?, "pentagon", tol)));
    }
    if want(AxiomArg::Hexagon) {
        for sign in [1.0, -1.0] {
            let rep = hexagon_residual([&r[0], &r[1], &r[2]], kappa, sign, order)?;
            out.push(tag(axiom_check(&rep, if sign > 0.0 { "hexagon +" } else { "hexagon -" }, tol)));
        }
    }
    if want(AxiomArg::Beta) {
        out.push(tag(axiom_check(&beta_inverse_residual([&r[0], &r[1], &r[2]], kappa, order)?, "beta inverse relation", tol)));
        if r.len() == 4 {
            for sign in [1.0, -1.0] {
                let rep = beta_braid_residual([&r[0], &r[1], &r[2], &r[3]], kappa, sign, order)?;
                out.push(tag(axiom_check(&rep, "beta braid relation", tol)));
            }
        }
    }
    if axiom == AxiomArg::All {
        let a = assoc(&r[0], &r[1], &r[2], kappa, order)?;
        out.push(tag(axiom_check(&equivariance_residual(&a, &[&r[0], &r[1], &r[2]])?, "associator equivariance", 1e-9)));
    }
    Ok(out)
}

fn run_verify(cli: &Cli, axiom: AxiomArg, modules: &[ModuleSpec], samples: Option<usize>) -> Result<Report> {
    let cfg = json!({ "modules": specs_json(modules), "axiom": format!("{axiom:?}").to_lowercase(), "samples": samples });
    let mut report = Report::new("verify", config(cli, "verify", cfg));
    if axiom == AxiomArg::Pentagon && modules.len() != 4 {
        return Err(KzError::Parse("pentagon needs four modules".into()));
    }
    let tol = cli.tol.unwrap_or(AXIOM_TOL);
    let instances: Vec<Vec<ModuleSpec>> = match samples {
        None => {
            require_generic(modules, cli.kappa, true)?;
            vec![modules.to_vec()]
        }
        Some(n) => {
            let mut sampler = Sampler::new(cli.seed);
            let pattern: Vec<Slot> = modules.iter().map(|m| Slot::of_kind(m.kind)).collect();
            let draws = (0..n).map(|_| sampler.draw(&pattern, cli.kappa)).collect();
            report.set("rejections", sampler.rejections);
            draws
        }
    };
    let results: Vec<Result<Vec<Check>>> = instances
        .par_iter()
        .map(|specs| verify_instance(specs, cli.kappa, axiom, cli.order, tol))
        .collect();
    for r in results {
        report.checks.extend(r?);
    }
    report.note("signConvention", "Koszul signs on permuted tensor factors");
    report.note("seriesOrderCap", cli.order);
    Ok(report)
}

fn run_qring(cli: &Cli, modules: &[ModuleSpec]) -> Result<Report> {
    let mut report = Report::new("qring", config(cli, "qring", json!({ "modules": specs_json(modules) })));
    let h = h_of_kappa(cli.kappa);
    let tol = cli.tol.unwrap_or(1e-9);
    let r = reps(modules)?;
    let cl = decompose(&r[0], &r[1], cli.kappa)?;
    let q: Vec<ModuleRep> = modules.iter().map(|s| build_qmodule(s, h)).collect::<Result<_>>()?;
    let qu = qdecompose(&q[0], &q[1])?;
    report.set("h", complex(h));
    report.set("classical", summands_json(&cl));
    report.set("quantum", summands_json(&qu));
    report.checks.push(Check::flag("same summand multiset", same_multiset(&cl.labels(), &qu.labels()), json!({})));
    report.checks.push(Check::below("classical certificate", cl.certificate_residual, tol, json!({})));
    report.checks.push(Check::below("quantum certificate", qu.certificate_residual, tol, json!({})));
    report.matrices.insert("quantumChangeOfBasis".into(), matrix(&qu.change_of_basis));
    Ok(report)
}

fn run_qverify(cli: &Cli, modules: &[ModuleSpec]) -> Result<Report> {
    let mut report = Report::new("qverify", config(cli, "qverify", json!({ "modules": specs_json(modules) })));
    require_generic(modules, cli.kappa, false)?;
    let h = h_of_kappa(cli.kappa);
    let tol = cli.tol.unwrap_or(1e-11);
    report.set("h", complex(h));
    let q: Vec<ModuleRep> = modules.iter().map(|s| build_qmodule(s, h)).collect::<Result<_>>()?;
    for (m, spec) in q.iter().zip(modules) {
        let p = json!({ "module": spec.to_string() });
        let hr = hopf_axioms_residual(m)?;
        report.checks.push(Check::below("counit", hr.counit, tol, p.clone()));
        report.checks.push(Check::below("antipode (quoted)", hr.antipode_quoted, tol, p.clone()));
        report.checks.push(Check::below("antipode (gamma(psi) = -psi)", hr.antipode_consistent, tol, p));
    }
    if q.len() >= 2 {
        let p = json!({ "modules": specs_json(&modules[..2]) });
        report.checks.push(Check::below("R intertwines coproducts", intertwining_residual(&q[0], &q[1])?, tol, p.clone()));
        let defect = classical_limit_defect(&modules[0], &modules[1], h)?;
        report.set("classicalLimitDefect", defect);
        if q.len() == 2 {
            report.matrices.insert("R".into(), matrix(&kzdk_core::quantum_gl11::r_matrix(&q[0], &q[1])?));
        }
    }
    if q.len() == 3 {
        let p = json!({ "modules": specs_json(modules) });
        let qt = quasitriangularity_residual(&q[0], &q[1], &q[2])?;
        report.checks.push(Check::below("(Delta x id)R = R13 R23", qt.left_cabling, tol, p.clone()));
        report.checks.push(Check::below("(id x Delta)R = R13 R12", qt.right_cabling, tol, p.clone()));
        report.checks.push(Check::below("coassociativity", coassociativity_residual(&q[0], &q[1], &q[2])?, tol, p));
    }
    Ok(report)
}

fn run_dk(cli: &Cli, modules: &[ModuleSpec]) -> Result<Report> {
    let mut report = Report::new("dk-compare", config(cli, "dk-compare", json!({ "modules": specs_json(modules) })));
    let r = dk_compare(&modules[0], &modules[1], cli.kappa)?;
    let eig = |list: &[(C64, Vec<usize>)]| json!(list.iter().map(|(l, p)| json!({ "eigenvalue": complex(*l), "jordan": p })).collect::<Vec<_>>());
    report.set("h", complex(r.h));
    report.set(
        "doubleBraiding",
        json!({ "classical": eig(&r.double_braiding.classical), "quantum": eig(&r.double_braiding.quantum), "note": r.double_braiding.note }),
    );
    report.checks.push(Check::flag("double braiding eigen-data", r.double_braiding.matched, json!({})));
    match &r.braiding {
        Some(b) => {
            report.set("braiding", json!({ "classical": eig(&b.classical), "quantum": eig(&b.quantum), "note": b.note }));
            report.checks.push(Check::flag("braiding eigen-data", b.matched, json!({})));
        }
        None => report.note("braiding", "sigma compared only for equal labels; double braiding compared instead"),
    }
    Ok(report)
}

fn form_kind(form: FormArg, specs: &[ModuleSpec]) -> Result<FormKind> {
    Ok(match form {
        FormArg::Auto => auto_form(specs)?,
        FormArg::Sol1 => FormKind::TwoTypical,
        FormArg::Sol2 => FormKind::TwoProjective,
        FormArg::Sol31 => FormKind::OneDimensional,
        FormArg::Ttp1 => FormKind::TypicalPairProjective,
        FormArg::Ppp0 => FormKind::ProjectiveTripleZero,
        FormArg::Ppp1 => FormKind::ProjectiveTripleOne,
    })
}

fn run_correlator(
    cli: &Cli,
    modules: &[ModuleSpec],
    form: FormArg,
    transcription: TranscriptionArg,
    constants: &[C64],
    samples: &[f64],
) -> Result<Report> {
    let cfg = json!({
        "modules": specs_json(modules),
        "form": format!("{form:?}").to_lowercase(),
        "transcription": format!("{transcription:?}").to_lowercase(),
        "constants": constants.iter().map(|z| complex(*z)).collect::<Vec<_>>(),
        "samples": samples,
    });
    let mut report = Report::new("correlator", config(cli, "correlator", cfg));
    require_generic(modules, cli.kappa, false)?;
    let tol = cli.tol.unwrap_or(1e-10);
    let inv = invariant_basis(modules)?;
    report.set(
        "invariantBasis",
        json!({
            "dimension": inv.dim(),
            "computed": vectors_json(&inv.vectors),
            "quoted": inv.quoted.as_deref().map(vectors_json),
            "sectors": inv.comparison,
            "matchesQuoted": inv.matches_quoted(),
        }),
    );
    let kind = form_kind(form, modules)?;
    let samples = if samples.is_empty() {
        correlator_samples(modules.len())
    } else {
        samples.to_vec()
    };
    let which: Vec<Transcription> = match transcription {
        TranscriptionArg::Quoted => vec![Transcription::Quoted],
        TranscriptionArg::Consistent => vec![Transcription::Consistent],
        TranscriptionArg::Both => vec![Transcription::Quoted, Transcription::Consistent],
    };
    let mut table = Vec::new();
    let mut probes = Vec::new();
    for tr in which {
        let sol = closed_form(kind, modules, cli.kappa, constants, tr)?;
        let res = verify_solution(&sol, &samples)?;
        let tag = format!("{tr:?}").to_lowercase();
        report.checks.push(Check::below(format!("{kind:?} {tag} residual"), res.max, tol, json!({ "labels": sol.labels })));
        table.push(json!({
            "transcription": tag,
            "form": kind,
            "alpha": complex(sol.alpha),
            "beta": complex(sol.beta),
            "samples": res.samples,
            "residuals": res.residuals,
        }));
        for (i, t) in sol.terms.iter().enumerate() {
            for (slot, coef) in [(LogSlot::LnX, t.p), (LogSlot::LnOneMinusX, t.q)] {
                if coef.norm() == 0.0 {
                    continue;
                }
                let pr = log_coefficient_probe(&sol, i, slot, 1e-3, &samples)?;
                probes.push(json!({
                    "transcription": tag,
                    "basisVector": sol.labels.get(t.index),
                    "slot": slot,
                    "coefficient": complex(coef),
                    "base": pr.base,
                    "perturbed": pr.perturbed,
                    "forced": pr.forced(tol, 1e-4),
                }));
            }
        }
    }
    report.set("residualTable", table);
    report.set("logProbes", probes);
    report.note("normalization", "residual divided by |x^(alpha/kappa) (1-x)^(beta/kappa)|");
    Ok(report)
}

fn run_sweep(cli: &Cli, suites: &[String], draws: Option<usize>, no_limits: bool) -> Result<Report> {
    let names: Vec<String> = if suites.iter().any(|s| s == "all") {
        SUITES.iter().map(|s| s.to_string()).collect()
    } else {
        suites.to_vec()
    };
    if let Some(bad) = names.iter().find(|n| !SUITES.contains(&n.as_str())) {
        return Err(KzError::Parse(format!("unknown suite '{bad}'; known: {}", SUITES.join(", "))));
    }
    let cfg = SuiteConfig {
        seed: cli.seed,
        draws,
        enforce_runtime: !no_limits && cli.timings,
    };
    let mut report = Report::new("sweep", config(cli, "sweep", json!({ "suites": names, "draws": draws })));
    let mut outcomes = Vec::new();
    for name in &names {
        let o = run_suite(name, &cfg).expect("known suite");
        report.checks.push(Check::flag(format!("criterion {}: {}", o.criterion, o.name), o.passed, json!({ "failing": o.failing_labels() })));
        outcomes.push(o);
    }
    if !cli.timings {
        for o in &mut outcomes {
            o.seconds = 0.0;
            o.summary = o.summary.rsplit_once(',').map(|(a, _)| a.to_string()).unwrap_or_default();
        }
    }
    report.set("outcomes", outcomes);
    let _ = genericity;
    Ok(report)
}
