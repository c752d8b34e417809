//! The quantum deformation `U_h(gl(1|1))`: modules, coproduct, R-matrix and the
//! eigen-data comparison with the KZ braiding.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{KzError, Result};
use crate::gl11_modules::{build_module, build_qmodule_raw, Algebra, ModuleRep, ModuleSpec};
use crate::kz_engine::{omega_eigenvalues, pair_spectral_data};
use crate::superlinalg::{
    dedup_eigenvalues, exp_scaled, graded_swap, inverse, jordan_chains, kron, max_abs, re,
    super_kron_raw, CMat, SignRule, C64, RANK_TOL,
};
use crate::tensor_ring::{decompose_rep, require_generic, tensor_product, DecompositionResult};

/// `h = iπ/κ`.
pub fn h_of_kappa(kappa: C64) -> C64 {
    C64::new(0.0, PI) / kappa
}

pub fn kappa_of_h(h: C64) -> C64 {
    C64::new(0.0, PI) / h
}

fn h_of(rep: &ModuleRep) -> Result<C64> {
    match rep.algebra {
        Algebra::Quantum { h } => Ok(h),
        Algebra::Classical => Err(KzError::InvalidInput("expected a quantum module".into())),
    }
}

/// Quantum module; typical labels need `e/κ ∉ ℤ`.
pub fn build_qmodule(spec: &ModuleSpec, h: C64) -> Result<ModuleRep> {
    build_qmodule_raw(spec, h)
}

/// Tensor product with `Δψ^± = ψ^±⊗K + K⁻¹⊗ψ^±`, `K = e^{hE/2}`.
pub fn qtensor(a: &ModuleRep, b: &ModuleRep) -> Result<ModuleRep> {
    h_of(a)?;
    tensor_product(a, b)
}

/// `‖(Δ⊗id)Δ − (id⊗Δ)Δ‖` over generators.
pub fn coassociativity_residual(a: &ModuleRep, b: &ModuleRep, c: &ModuleRep) -> Result<f64> {
    let left = qtensor(&qtensor(a, b)?, c)?;
    let right = qtensor(a, &qtensor(b, c)?)?;
    Ok(left
        .generators()
        .iter()
        .zip(right.generators().iter())
        .map(|((_, x), (_, y))| max_abs(&(*x - *y)))
        .fold(0.0, f64::max))
}

/// `R = exp[h(E⊗E + E⊗N + N⊗E)]·(1 − Kψ⁺ ⊗ K⁻¹ψ⁻)` on `a ⊗ b`.
pub fn r_matrix(a: &ModuleRep, b: &ModuleRep) -> Result<CMat> {
    let h = h_of(a)?;
    let sk = |x: &CMat, y: &CMat| super_kron_raw(x, &a.parities, y, &b.parities, SignRule::Koszul);
    let cartan = (kron(&a.e, &b.e) + kron(&a.e, &b.n) + kron(&a.n, &b.e)) * h;
    let n = cartan.nrows();
    let mut even = CMat::zeros(n, n);
    for i in 0..n {
        if (0..n).any(|j| j != i && cartan[(i, j)].norm() > 0.0) {
            return Err(KzError::InvalidInput("E and N must be diagonal".into()));
        }
        even[(i, i)] = cartan[(i, i)].exp();
    }
    let odd = sk(&(a.k_factor(1.0) * &a.psi_plus), &(b.k_factor(-1.0) * &b.psi_minus));
    Ok(even * (CMat::identity(n, n) - odd))
}

/// `R₂₁` transported back to `a ⊗ b`.
pub fn r_matrix_21(a: &ModuleRep, b: &ModuleRep) -> Result<CMat> {
    let p = graded_swap(&a.parities, &b.parities);
    Ok(inverse(&p)? * r_matrix(b, a)? * p)
}

/// `max_x ‖RΔ(x) − Δ^{op}(x)R‖` with `Δ^{op} = P⁻¹Δ_{ba}P`.
pub fn intertwining_residual(a: &ModuleRep, b: &ModuleRep) -> Result<f64> {
    let r = r_matrix(a, b)?;
    let ab = qtensor(a, b)?;
    let ba = qtensor(b, a)?;
    let p = graded_swap(&a.parities, &b.parities);
    let pinv = inverse(&p)?;
    Ok(ab
        .generators()
        .iter()
        .zip(ba.generators().iter())
        .map(|((_, x), (_, y))| max_abs(&(&r * *x - &pinv * *y * &p * &r)))
        .fold(0.0, f64::max))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuasitriangularityReport {
    /// `‖(Δ⊗id)R − R₁₃R₂₃‖`.
    pub left_cabling: f64,
    /// `‖(id⊗Δ)R − R₁₃R₁₂‖`.
    pub right_cabling: f64,
    /// Worst intertwining residual over the three pairs.
    pub intertwining: f64,
}

impl QuasitriangularityReport {
    pub fn max(&self) -> f64 {
        self.left_cabling.max(self.right_cabling).max(self.intertwining)
    }
}

pub fn quasitriangularity_residual(a: &ModuleRep, b: &ModuleRep, c: &ModuleRep) -> Result<QuasitriangularityReport> {
    let eye = |m: &ModuleRep| CMat::identity(m.dim(), m.dim());
    let s23 = kron(&eye(a), &graded_swap(&b.parities, &c.parities));
    let r13 = inverse(&s23)? * kron(&r_matrix(a, c)?, &eye(b)) * &s23;
    let r12 = kron(&r_matrix(a, b)?, &eye(c));
    let r23 = kron(&eye(a), &r_matrix(b, c)?);
    let left = r_matrix(&qtensor(a, b)?, c)?;
    let right = r_matrix(a, &qtensor(b, c)?)?;
    let intertwining = [(a, b), (b, c), (a, c)]
        .iter()
        .map(|(x, y)| intertwining_residual(x, y))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(QuasitriangularityReport {
        left_cabling: max_abs(&(left - &r13 * &r23)),
        right_cabling: max_abs(&(right - &r13 * &r12)),
        intertwining,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Antipode {
    /// `γ(ψ⁺) = −Kψ⁺`, `γ(ψ⁻) = −ψ⁻K⁻¹`.
    Quoted,
    /// `γ(ψ^±) = −ψ^±`.
    Consistent,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HopfReport {
    /// Generators of `A₀⊗V` and `V⊗A₀` against those of `V`.
    pub counit: f64,
    pub antipode_quoted: f64,
    pub antipode_consistent: f64,
}

/// `max ‖m(γ⊗id)Δ(x) − ε(x)‖, ‖m(id⊗γ)Δ(x) − ε(x)‖` over generators.
pub fn antipode_residual(v: &ModuleRep, rule: Antipode) -> Result<f64> {
    h_of(v)?;
    let k = v.k_factor(1.0);
    let ki = v.k_factor(-1.0);
    let (gp, gm) = match rule {
        Antipode::Quoted => (-(&k * &v.psi_plus), -(&v.psi_minus * &ki)),
        Antipode::Consistent => (-v.psi_plus.clone(), -v.psi_minus.clone()),
    };
    // Δψ = ψ⊗K + K⁻¹⊗ψ, γ(K^{±1}) = K^{∓1}; E and N hold trivially.
    let mut worst: f64 = 0.0;
    for (psi, gpsi) in [(&v.psi_plus, &gp), (&v.psi_minus, &gm)] {
        worst = worst.max(max_abs(&(gpsi * &k + &k * psi)));
        worst = worst.max(max_abs(&(psi * &ki + &ki * gpsi)));
    }
    Ok(worst)
}

pub fn hopf_axioms_residual(v: &ModuleRep) -> Result<HopfReport> {
    let h = h_of(v)?;
    let unit = build_qmodule(&ModuleSpec::atypical(0.0), h)?;
    let mut counit: f64 = 0.0;
    for t in [qtensor(&unit, v)?, qtensor(v, &unit)?] {
        for ((_, x), (_, y)) in t.generators().iter().zip(v.generators().iter()) {
            counit = counit.max(max_abs(&(*x - *y)));
        }
    }
    Ok(HopfReport {
        counit,
        antipode_quoted: antipode_residual(v, Antipode::Quoted)?,
        antipode_consistent: antipode_residual(v, Antipode::Consistent)?,
    })
}

/// Decomposition of `a ⊗ b` for quantum modules, after the genericity screen.
pub fn qdecompose(a: &ModuleRep, b: &ModuleRep) -> Result<DecompositionResult> {
    let h = h_of(a)?;
    let specs: Vec<ModuleSpec> = a.summands.iter().chain(&b.summands).cloned().collect();
    require_generic(&specs, kappa_of_h(h), false)?;
    decompose_rep(&qtensor(a, b)?)
}

/// `‖(R₂₁R − 1)/h − 2Ω_h‖` where `Ω_h` is the Casimir with its odd part divided by `2h`.
///
/// Vanishes linearly in `h` on typical and atypical modules.
pub fn classical_limit_defect(x: &ModuleSpec, y: &ModuleSpec, h: C64) -> Result<f64> {
    let (a, b) = (build_qmodule(x, h)?, build_qmodule(y, h)?);
    let sk = |p: &CMat, q: &CMat| super_kron_raw(p, &a.parities, q, &b.parities, SignRule::Koszul);
    let omega = kron(&a.e, &b.e) + kron(&a.e, &b.n) + kron(&a.n, &b.e)
        + (sk(&a.psi_minus, &b.psi_plus) - sk(&a.psi_plus, &b.psi_minus)) / (h * 2.0);
    let q = r_matrix_21(&a, &b)? * r_matrix(&a, &b)?;
    let n = q.nrows();
    Ok(max_abs(&((q - CMat::identity(n, n)) / h - omega * re(2.0))))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EigenComparison {
    /// `(eigenvalue, chain lengths)` for the KZ side.
    pub classical: Vec<(C64, Vec<usize>)>,
    pub quantum: Vec<(C64, Vec<usize>)>,
    pub matched: bool,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DkReport {
    pub operands: Vec<String>,
    pub h: C64,
    /// `exp(2πiΩ/κ)` against `R₂₁R`.
    pub double_braiding: EigenComparison,
    /// `P·exp(iπΩ/κ)` against `P·R`, only when the two objects coincide.
    pub braiding: Option<EigenComparison>,
}

impl DkReport {
    pub fn matched(&self) -> bool {
        self.double_braiding.matched && self.braiding.as_ref().is_none_or(|b| b.matched)
    }
}

fn profiles(m: &CMat, candidates: &[C64]) -> Result<Vec<(C64, Vec<usize>)>> {
    let jd = jordan_chains(m, candidates, RANK_TOL)?;
    Ok(candidates
        .iter()
        .map(|&c| (c, jd.profile(c, 1e-9)))
        .filter(|(_, p)| !p.is_empty())
        .collect())
}

fn compare(classical: &CMat, quantum: &CMat, candidates: &[C64]) -> EigenComparison {
    let cands = dedup_eigenvalues(candidates, 1e-9);
    let cl = profiles(classical, &cands);
    let qu = profiles(quantum, &cands);
    match (cl, qu) {
        (Ok(c), Ok(q)) => {
            let matched = c.len() == q.len()
                && c.iter().zip(&q).all(|((x, p), (y, r))| (x - y).norm() < 1e-8 && p == r);
            EigenComparison {
                classical: c,
                quantum: q,
                matched,
                note: None,
            }
        }
        (c, q) => EigenComparison {
            classical: c.clone().unwrap_or_default(),
            quantum: q.clone().unwrap_or_default(),
            matched: false,
            note: Some(format!(
                "spectral data incomplete: {}",
                [c.err(), q.err()].into_iter().flatten().map(|e| e.to_string()).collect::<Vec<_>>().join("; ")
            )),
        },
    }
}

/// Conjugation invariants of the KZ braiding against those of the R-matrix braiding at `h = iπ/κ`.
pub fn dk_compare(x: &ModuleSpec, y: &ModuleSpec, kappa: C64) -> Result<DkReport> {
    require_generic(&[*x, *y], kappa, true)?;
    let h = h_of_kappa(kappa);
    let (a, b) = (build_module(x)?, build_module(y)?);
    let (qa, qb) = (build_qmodule(x, h)?, build_qmodule(y, h)?);
    let (_, jd) = pair_spectral_data(&a, &b)?;
    let lambdas = omega_eigenvalues(&a, &b);
    let full = C64::new(0.0, 2.0 * PI) / kappa;
    let half = full / 2.0;
    let mono = exp_scaled(&jd, full)?;
    let r = r_matrix(&qa, &qb)?;
    let q = r_matrix_21(&qa, &qb)? * &r;
    let cands: Vec<C64> = lambdas.iter().map(|l| (full * l).exp()).collect();
    let double_braiding = compare(&mono, &q, &cands);
    let braiding = if x.same_label(y, 1e-12) {
        let p = graded_swap(&a.parities, &b.parities);
        let sigma = &p * exp_scaled(&jd, half)?;
        let sigma_q = &p * &r;
        let cands: Vec<C64> = lambdas
            .iter()
            .flat_map(|l| {
                let z = (half * l).exp();
                [z, -z]
            })
            .collect();
        Some(compare(&sigma, &sigma_q, &cands))
    } else {
        None
    };
    Ok(DkReport {
        operands: vec![x.to_string(), y.to_string()],
        h,
        double_braiding,
        braiding,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superlinalg::re;
    use crate::tensor_ring::{decompose, same_multiset};

    fn q(s: &str, kappa: f64) -> ModuleRep {
        build_qmodule(&s.parse().unwrap(), h_of_kappa(re(kappa))).unwrap()
    }

    const LABELS: [&str; 5] = ["T:0.3,0.1", "T:-0.45,0.7", "P:0.2", "A:0.35", "Pi*T:0.21,-1"];

    #[test]
    fn modules_satisfy_relations() {
        for s in LABELS {
            let m = q(s, 1.7);
            assert!(m.relation_residual() < 1e-12, "{s}");
            assert!(m.gradings_consistent(1e-14));
        }
        assert!(matches!(
            build_qmodule(&ModuleSpec::typical(1.7, 0.0), h_of_kappa(re(1.7))),
            Err(KzError::ExcludedParameter(_))
        ));
    }

    #[test]
    fn products_and_r_matrix() {
        for x in LABELS {
            for y in LABELS {
                let (a, b) = (q(x, 1.7), q(y, 1.7));
                let t = qtensor(&a, &b).unwrap();
                assert!(t.relation_residual() < 1e-12, "{x} {y}");
                assert!(intertwining_residual(&a, &b).unwrap() < 1e-12, "{x} {y}");
            }
        }
        let aa = r_matrix(&q("A:0.3", 1.1), &q("A:-2", 1.1)).unwrap();
        assert!((aa[(0, 0)] - re(1.0)).norm() < 1e-15);
    }

    #[test]
    fn cabling_and_coassociativity() {
        for (x, y, z) in [("T:0.3,0.1", "T:-0.45,0.7", "A:0.35"), ("T:0.3,0.1", "T:0.2,0", "P:0.2"), ("P:0.1", "Pi*T:0.21,-1", "P:-0.4")] {
            let (a, b, c) = (q(x, 1.3), q(y, 1.3), q(z, 1.3));
            assert!(coassociativity_residual(&a, &b, &c).unwrap() < 1e-12);
            let r = quasitriangularity_residual(&a, &b, &c).unwrap();
            assert!(r.max() < 1e-11, "{r:?}");
        }
    }

    #[test]
    fn hopf_axioms() {
        for s in LABELS {
            let r = hopf_axioms_residual(&q(s, 1.7)).unwrap();
            assert!(r.counit < 1e-13 && r.antipode_consistent < 1e-13, "{s} {r:?}");
        }
        let t = hopf_axioms_residual(&q("T:0.3,0.1", 1.7)).unwrap();
        assert!(t.antipode_quoted > 1e-3);
    }

    #[test]
    fn quantum_ring_matches_classical() {
        let kappa = re(1.7);
        for x in LABELS {
            for y in LABELS {
                let (sx, sy): (ModuleSpec, ModuleSpec) = (x.parse().unwrap(), y.parse().unwrap());
                let cl = decompose(&build_module(&sx).unwrap(), &build_module(&sy).unwrap(), kappa).unwrap();
                let qu = qdecompose(&q(x, 1.7), &q(y, 1.7)).unwrap();
                assert!(qu.certificate_residual < 1e-9, "{x} {y} {}", qu.certificate_residual);
                assert!(same_multiset(&cl.labels(), &qu.labels()), "{x} {y}");
            }
        }
        let opp = qdecompose(&q("T:0.3,0.1", 1.7), &q("T:-0.3,0.5", 1.7)).unwrap();
        assert_eq!(opp.labels().len(), 1);
    }

    #[test]
    fn drinfeld_kohno_pairs() {
        for x in LABELS {
            for y in LABELS {
                let r = dk_compare(&x.parse().unwrap(), &y.parse().unwrap(), re(1.7)).unwrap();
                assert!(r.matched(), "{x} {y} {r:?}");
            }
        }
    }

    #[test]
    fn slope_vanishes_linearly() {
        let (x, y) = ("T:0.3,0.1".parse().unwrap(), "T:-0.45,0.7".parse().unwrap());
        let d1 = classical_limit_defect(&x, &y, C64::new(0.0, 1e-3)).unwrap();
        let d2 = classical_limit_defect(&x, &y, C64::new(0.0, 5e-4)).unwrap();
        assert!(d1 < 1e-2 && (d1 / d2 - 2.0).abs() < 0.1, "{d1} {d2}");
    }
}
