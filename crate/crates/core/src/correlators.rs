//! Invariant subspaces of two- and three-fold products and closed-form KZ
//! solutions on them, including logarithmic ones.

use serde::{Deserialize, Serialize};

use crate::error::{KzError, Result};
use crate::gl11_modules::{build_module, projective_vectors, tensor_casimir, Kind, ModuleRep, ModuleSpec};
use crate::superlinalg::{diagonal_sectors, hcat, hstack, max_abs, null_space, rank, re, CMat, CVec, C64, RANK_TOL};
use crate::tensor_ring::tensor_all;

#[derive(Clone, Debug)]
pub struct LabeledVector {
    pub label: String,
    /// Value of `Σ nᵢ` for which the vector is invariant.
    pub sector: f64,
    pub vector: CVec,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SectorComparison {
    pub sector: f64,
    pub computed_dim: usize,
    pub quoted_dim: usize,
    /// The quoted vectors are independent and lie in the computed kernel.
    pub quoted_inside: bool,
}

impl SectorComparison {
    pub fn complete(&self) -> bool {
        self.quoted_inside && self.quoted_dim == self.computed_dim
    }
}

#[derive(Clone, Debug)]
pub struct InvariantBasis {
    pub factors: Vec<ModuleSpec>,
    /// Computed kernel, sector by sector.
    pub vectors: Vec<LabeledVector>,
    pub quoted: Option<Vec<LabeledVector>>,
    /// Empty when no quoted list exists.
    pub comparison: Vec<SectorComparison>,
}

fn select(list: &[LabeledVector], sector: f64) -> Vec<&LabeledVector> {
    list.iter().filter(|v| (v.sector - sector).abs() < 1e-9).collect()
}

impl InvariantBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn in_sector(&self, sector: f64) -> Vec<&LabeledVector> {
        select(&self.vectors, sector)
    }

    pub fn quoted_in_sector(&self, sector: f64) -> Vec<&LabeledVector> {
        self.quoted.as_deref().map(|q| select(q, sector)).unwrap_or_default()
    }

    /// The quoted list is a basis of the computed kernel in every sector.
    pub fn matches_quoted(&self) -> Option<bool> {
        self.quoted.as_ref().map(|_| self.comparison.iter().all(SectorComparison::complete))
    }

    /// Quoted vectors when they exist for the sector, computed ones otherwise.
    pub fn preferred(&self, sector: f64) -> Vec<&LabeledVector> {
        let q = self.quoted_in_sector(sector);
        if q.is_empty() {
            self.in_sector(sector)
        } else {
            q
        }
    }
}

fn kind_code(specs: &[ModuleSpec]) -> String {
    specs
        .iter()
        .map(|s| match s.kind {
            Kind::Typical => 'T',
            Kind::Atypical => 'A',
            Kind::Projective => 'P',
        })
        .collect()
}

/// Modules with every `n` set to zero: `Δ(N)` then measures the shift from `Σ nᵢ`.
fn shifted(specs: &[ModuleSpec]) -> Result<ModuleRep> {
    let reps: Vec<ModuleRep> = specs
        .iter()
        .map(|s| build_module(&ModuleSpec { n: C64::default(), ..*s }))
        .collect::<Result<_>>()?;
    tensor_all(&reps.iter().collect::<Vec<_>>())
}

fn word(parts: &[&CVec]) -> CVec {
    parts.iter().skip(1).fold(parts[0].clone(), |acc, v| {
        CVec::from_iterator(acc.len() * v.len(), acc.iter().flat_map(|a| v.iter().map(move |b| a * b)))
    })
}

/// The commonly quoted invariant lists for `TT`, `PP`, `TTT`, `TTP` and `PPP`.
pub fn quoted_invariants(specs: &[ModuleSpec]) -> Option<Vec<LabeledVector>> {
    let [r, t, b, l] = projective_vectors().map(|(_, v)| v);
    let up = CVec::from_vec(vec![re(1.0), re(0.0)]);
    let dn = CVec::from_vec(vec![re(0.0), re(1.0)]);
    let lv = |label: &str, sector: f64, vector: CVec| LabeledVector {
        label: label.to_string(),
        sector,
        vector,
    };
    let code = kind_code(specs);
    let w = |p: &[&CVec]| word(p);
    let out = match code.as_str() {
        "TT" => vec![lv("I_0^TT", 0.0, w(&[&up, &dn]) + w(&[&dn, &up]))],
        "PP" => vec![
            lv("I_-1^PP", -1.0, w(&[&r, &b]) - w(&[&b, &r])),
            lv("I_0,1^PP", 0.0, w(&[&t, &b]) + w(&[&r, &l]) - w(&[&l, &r]) + w(&[&b, &t])),
            lv("I_0,2^PP", 0.0, w(&[&b, &b])),
            lv("I_1^PP", 1.0, w(&[&l, &b]) - w(&[&b, &l])),
        ],
        "TTT" => {
            let (e1, e2, e3) = (specs[0].e, specs[1].e, specs[2].e);
            vec![
                lv("I_-1/2^TTT", -0.5, w(&[&up, &up, &dn]) + w(&[&up, &dn, &up]) + w(&[&dn, &up, &up])),
                lv(
                    "I_1/2^TTT",
                    0.5,
                    w(&[&up, &dn, &dn]) * e1 - w(&[&dn, &up, &dn]) * e2 + w(&[&dn, &dn, &up]) * e3,
                ),
            ]
        }
        "TTP" => {
            let e1 = specs[0].e;
            vec![
                lv("I_-1^TTP", -1.0, w(&[&up, &up, &b]) - w(&[&up, &dn, &r]) - w(&[&dn, &up, &r])),
                lv(
                    "I_0,1^TTP",
                    0.0,
                    (w(&[&up, &up, &l]) + w(&[&up, &dn, &t]) + w(&[&dn, &up, &t])) * e1
                        + w(&[&up, &dn, &b])
                        + w(&[&dn, &dn, &r]),
                ),
                lv("I_0,2^TTP", 0.0, w(&[&up, &dn, &b]) + w(&[&dn, &up, &b])),
                lv("I_1^TTP", 1.0, (w(&[&up, &dn, &l]) + w(&[&dn, &up, &l])) * e1 + w(&[&dn, &dn, &b])),
            ]
        }
        "PPP" => vec![
            lv("I_-2^PPP", -2.0, w(&[&r, &r, &b]) - w(&[&r, &b, &r]) + w(&[&b, &r, &r])),
            lv(
                "I_-1,1^PPP",
                -1.0,
                w(&[&t, &r, &b]) - w(&[&t, &b, &r]) - w(&[&r, &r, &l]) - w(&[&r, &b, &t]) + w(&[&l, &r, &r]) + w(&[&b, &r, &t]),
            ),
            lv(
                "I_-1,2^PPP",
                -1.0,
                w(&[&r, &t, &b]) + w(&[&r, &r, &l]) - w(&[&r, &l, &r]) + w(&[&r, &b, &t]) - w(&[&b, &t, &r]) - w(&[&b, &r, &t]),
            ),
            lv("I_-1,3^PPP", -1.0, w(&[&r, &b, &b]) - w(&[&b, &r, &b])),
            lv("I_-1,4^PPP", -1.0, w(&[&r, &b, &b]) - w(&[&b, &b, &r])),
            lv("I_0,1^PPP", 0.0, w(&[&b, &t, &b]) + w(&[&b, &r, &l]) - w(&[&b, &l, &r]) + w(&[&b, &b, &t])),
            lv("I_0,2^PPP", 0.0, w(&[&b, &b, &b])),
            lv(
                "I_1,1^PPP",
                1.0,
                w(&[&t, &l, &b]) - w(&[&t, &b, &l]) - w(&[&r, &l, &l]) + w(&[&l, &l, &r]) - w(&[&l, &b, &t]) + w(&[&b, &l, &t]),
            ),
            lv(
                "I_1,2^PPP",
                1.0,
                w(&[&l, &t, &b]) + w(&[&l, &r, &l]) - w(&[&l, &l, &r]) + w(&[&l, &b, &t]) - w(&[&b, &t, &l]) - w(&[&b, &l, &t]),
            ),
            lv("I_1,3^PPP", 1.0, w(&[&l, &b, &b]) - w(&[&b, &b, &l])),
            lv("I_1,4^PPP", 1.0, w(&[&b, &l, &b]) - w(&[&b, &b, &l])),
            lv("I_2^PPP", 2.0, w(&[&l, &l, &b]) - w(&[&l, &b, &l]) + w(&[&b, &l, &l])),
        ],
        _ => return None,
    };
    Some(out)
}

/// Largest `‖Δ(x)v‖` over `E, ψ^±` and `‖(Δ(N) + sector)v‖` with all `n` set to zero.
pub fn invariance_residual(specs: &[ModuleSpec], v: &LabeledVector) -> Result<f64> {
    let rep = shifted(specs)?;
    let mut worst = (&rep.n * &v.vector + &v.vector * re(v.sector)).norm();
    for g in [&rep.e, &rep.psi_plus, &rep.psi_minus] {
        worst = worst.max((g * &v.vector).norm());
    }
    Ok(worst / v.vector.norm().max(1e-300))
}

/// Joint kernel of `Δ(E), Δ(ψ^±)`, graded by the `Σ n` for which it is invariant.
///
/// When a quoted list exists it is compared with the kernel sector by sector.
pub fn invariant_basis(specs: &[ModuleSpec]) -> Result<InvariantBasis> {
    if specs.is_empty() {
        return Err(KzError::InvalidInput("no factors".into()));
    }
    let rep = shifted(specs)?;
    let dim = rep.dim();
    let mut computed: Vec<LabeledVector> = Vec::new();
    for idx in diagonal_sectors(&[&rep.n], 1e-9) {
        let w = rep.n[(idx[0], idx[0])].re;
        let mut stack = CMat::zeros(3 * dim, idx.len());
        for (k, g) in [&rep.e, &rep.psi_plus, &rep.psi_minus].iter().enumerate() {
            for (c, &i) in idx.iter().enumerate() {
                for r in 0..dim {
                    stack[(k * dim + r, c)] = g[(r, i)];
                }
            }
        }
        let ker = null_space(&stack, 1e-10);
        for (j, col) in ker.column_iter().enumerate() {
            let mut v = CVec::zeros(dim);
            for (c, &i) in idx.iter().enumerate() {
                v[i] = col[c];
            }
            let sector = -w + 0.0;
            computed.push(LabeledVector {
                label: format!("v_{sector},{}", j + 1),
                sector,
                vector: v,
            });
        }
    }
    computed.sort_by(|a, b| a.sector.total_cmp(&b.sector));
    let quoted = quoted_invariants(specs);
    let comparison = quoted
        .as_ref()
        .map(|q| {
            let mut sectors: Vec<f64> = computed.iter().chain(q.iter()).map(|v| v.sector).collect();
            sectors.sort_by(f64::total_cmp);
            sectors.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
            sectors
                .iter()
                .map(|&s| {
                    let pick = |list: &[LabeledVector]| -> Vec<CVec> {
                        list.iter().filter(|v| (v.sector - s).abs() < 1e-9).map(|v| v.vector.clone()).collect()
                    };
                    let (c, q) = (pick(&computed), pick(q));
                    SectorComparison {
                        sector: s,
                        computed_dim: c.len(),
                        quoted_dim: q.len(),
                        quoted_inside: contained(&q, &c, dim),
                    }
                })
                .collect()
        })
        .unwrap_or_default();
    Ok(InvariantBasis {
        factors: specs.to_vec(),
        vectors: computed,
        quoted,
        comparison,
    })
}

/// Whether `span(a) ⊆ span(b)` and `a` is independent.
fn contained(a: &[CVec], b: &[CVec], dim: usize) -> bool {
    if a.is_empty() {
        return true;
    }
    if b.is_empty() {
        return false;
    }
    let ma = hstack(a, dim);
    let mb = hstack(b, dim);
    let rb = rank(&mb, RANK_TOL);
    rank(&ma, RANK_TOL) == a.len() && rank(&hcat(&mb, &ma), RANK_TOL) == rb
}

/// KZ operators restricted to an invariant subspace, in the coordinates of `basis`.
#[derive(Clone, Debug)]
pub struct ProjectedSystem {
    pub basis: Vec<CVec>,
    /// `Ω₁₂` on the span (`Ω` for two points).
    pub a: CMat,
    /// `Ω₂₃` on the span, absent for two points.
    pub b: Option<CMat>,
    pub kappa: C64,
    /// Residual of the restriction (zero when the span is invariant).
    pub restriction_residual: f64,
}

fn casimirs(specs: &[ModuleSpec]) -> Result<(CMat, Option<CMat>)> {
    let reps: Vec<ModuleRep> = specs.iter().map(build_module).collect::<Result<_>>()?;
    let refs: Vec<&ModuleRep> = reps.iter().collect();
    match specs.len() {
        2 => Ok((tensor_casimir(&refs, 0, 1)?.mat, None)),
        3 => Ok((tensor_casimir(&refs, 0, 1)?.mat, Some(tensor_casimir(&refs, 1, 2)?.mat))),
        n => Err(KzError::InvalidInput(format!("correlators need 2 or 3 points, got {n}"))),
    }
}

fn restrict(m: &CMat, basis: &CMat) -> Result<(CMat, f64)> {
    let image = m * basis;
    let coords = basis
        .clone()
        .svd(true, true)
        .solve(&image, 1e-14)
        .map_err(|e| KzError::Singular(e.into()))?;
    let res = max_abs(&(basis * &coords - image));
    Ok((coords, res))
}

/// Projection of the KZ operators onto the full invariant space of one `Σ n` sector.
pub fn project(specs: &[ModuleSpec], sector: f64, kappa: C64) -> Result<ProjectedSystem> {
    let inv = invariant_basis(specs)?;
    let basis: Vec<CVec> = inv.in_sector(sector).into_iter().map(|v| v.vector.clone()).collect();
    project_onto(specs, basis, kappa)
}

/// Projection onto the span of `basis`, which must be preserved by the Casimirs.
pub fn project_onto(specs: &[ModuleSpec], basis: Vec<CVec>, kappa: C64) -> Result<ProjectedSystem> {
    if basis.is_empty() {
        return Err(KzError::InvalidInput("empty invariant basis".into()));
    }
    let (o12, o23) = casimirs(specs)?;
    let bm = hstack(&basis, o12.nrows());
    let (a, ra) = restrict(&o12, &bm)?;
    let (b, rb) = match o23 {
        Some(o) => {
            let (b, r) = restrict(&o, &bm)?;
            (Some(b), r)
        }
        None => (None, 0.0),
    };
    if ra.max(rb) > 1e-9 {
        return Err(KzError::Singular("invariant span is not preserved by the Casimirs".into()));
    }
    Ok(ProjectedSystem {
        basis,
        a,
        b,
        kappa,
        restriction_residual: ra.max(rb),
    })
}

impl ProjectedSystem {
    fn rhs(&self, x: f64, c: &CVec) -> CVec {
        let mut out = &self.a * c / re(x);
        if let Some(b) = &self.b {
            out += b * c / re(x - 1.0);
        }
        out / self.kappa
    }

    /// Anchor of the numerical integration: `x = 1/2` or `z = 1`.
    pub fn anchor(&self) -> f64 {
        if self.b.is_some() {
            0.5
        } else {
            1.0
        }
    }

    /// Integrates from the anchor value `c0` (coordinates) to each grid point with RK4.
    pub fn solve(&self, c0: &CVec, grid: &[f64]) -> Result<Vec<CVec>> {
        grid.iter()
            .map(|&x| {
                if x <= 0.0 || (self.b.is_some() && x >= 1.0) {
                    return Err(KzError::InvalidInput(format!("grid point {x} outside the domain")));
                }
                let x0 = self.anchor();
                let steps = ((x - x0).abs() / 1e-3).ceil().max(1.0) as usize;
                let h = (x - x0) / steps as f64;
                let mut c = c0.clone();
                for k in 0..steps {
                    let s = x0 + h * k as f64;
                    let k1 = self.rhs(s, &c);
                    let k2 = self.rhs(s + h / 2.0, &(&c + &k1 * re(h / 2.0)));
                    let k3 = self.rhs(s + h / 2.0, &(&c + &k2 * re(h / 2.0)));
                    let k4 = self.rhs(s + h, &(&c + &k3 * re(h)));
                    c += (k1 + k2 * re(2.0) + k3 * re(2.0) + k4) * re(h / 6.0);
                }
                Ok(c)
            })
            .collect()
    }
}

/// Numerical solution of the projected system with initial coordinates `c0` at the anchor.
pub fn projected_kz_solve(specs: &[ModuleSpec], sector: f64, kappa: C64, c0: &CVec, grid: &[f64]) -> Result<Vec<CVec>> {
    project(specs, sector, kappa)?.solve(c0, grid)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum FormKind {
    /// `TT`: `A z^{δ/κ} I₀`.
    TwoTypical,
    /// `PP`: constant for `Σn = ±1`, logarithmic for `Σn = 0`.
    TwoProjective,
    /// One-dimensional three-point sector: `A x^{α/κ}(1−x)^{β/κ} I`.
    OneDimensional,
    /// `TTP`, `Σn = 0`.
    TypicalPairProjective,
    /// `PPP`, `Σn = 0`.
    ProjectiveTripleZero,
    /// `PPP`, `Σn = ±1`.
    ProjectiveTripleOne,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Transcription {
    /// The formulas as commonly quoted.
    Quoted,
    /// Coefficients re-derived from the projected operators.
    Consistent,
}

/// `(c + p ln x + q ln(1−x))·I_index`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Term {
    pub index: usize,
    pub c: C64,
    pub p: C64,
    pub q: C64,
}

fn term(index: usize, c: C64, p: C64, q: C64) -> Term {
    Term { index, c, p, q }
}

/// `f(x) = x^{α/κ}(1−x)^{β/κ} Σ (c + p ln x + q ln(1−x)) I_j`; for two points `x = z₁ − z₂`, `β = q = 0`.
#[derive(Clone, Debug)]
pub struct CorrelatorSolution {
    pub kind: FormKind,
    pub transcription: Transcription,
    pub specs: Vec<ModuleSpec>,
    pub kappa: C64,
    pub sector: f64,
    pub labels: Vec<String>,
    pub basis: Vec<CVec>,
    pub alpha: C64,
    pub beta: C64,
    pub terms: Vec<Term>,
    omega12: CMat,
    omega23: Option<CMat>,
}

impl CorrelatorSolution {
    pub fn points(&self) -> usize {
        self.specs.len()
    }

    pub fn prefactor(&self, x: f64) -> C64 {
        let k = self.kappa;
        (re(x).ln() * self.alpha / k).exp() * (re(1.0 - x).ln() * self.beta / k).exp()
    }

    /// The bracketed sum without the prefactor.
    fn inner(&self, x: f64) -> (CVec, CVec) {
        let n = self.basis[0].len();
        let (lx, l1) = (x.ln(), (1.0 - x).ln());
        let mut f = CVec::zeros(n);
        let mut df = CVec::zeros(n);
        for t in &self.terms {
            let v = &self.basis[t.index];
            f += v * (t.c + t.p * lx + t.q * l1);
            df += v * (t.p / x - t.q / (1.0 - x));
        }
        (f, df)
    }

    pub fn eval(&self, x: f64) -> CVec {
        self.inner(x).0 * self.prefactor(x)
    }

    pub fn derivative(&self, x: f64) -> CVec {
        let (f, df) = self.inner(x);
        let log_d = self.alpha / (self.kappa * x) - self.beta / (self.kappa * (1.0 - x));
        (df + f * log_d) * self.prefactor(x)
    }

    /// `‖κf' − (Ω₁₂/x + Ω₂₃/(x−1))f‖ / |prefactor|`.
    pub fn residual(&self, x: f64) -> Result<f64> {
        if x <= 0.0 || (self.omega23.is_some() && x >= 1.0) {
            return Err(KzError::InvalidInput(format!("sample {x} is a singular point")));
        }
        let f = self.eval(x);
        let mut r = self.derivative(x) * self.kappa - &self.omega12 * &f / re(x);
        if let Some(o) = &self.omega23 {
            r -= o * &f / re(x - 1.0);
        }
        Ok(r.norm() / self.prefactor(x).norm().max(1e-300))
    }
}

fn n_sum(specs: &[ModuleSpec]) -> f64 {
    specs.iter().map(|s| s.n.re).sum()
}

fn constant(constants: &[C64], i: usize) -> C64 {
    constants.get(i).copied().unwrap_or(re(1.0))
}

/// Closed-form correlator of the given kind; missing constants default to 1.
pub fn closed_form(
    kind: FormKind,
    specs: &[ModuleSpec],
    kappa: C64,
    constants: &[C64],
    transcription: Transcription,
) -> Result<CorrelatorSolution> {
    let code = kind_code(specs);
    let sector = n_sum(specs);
    let mismatch = || KzError::InvalidInput(format!("form {kind:?} does not apply to {code} with n-sum {sector}"));
    let want = |c: &str, sectors: &[f64]| -> Result<()> {
        if code == c && sectors.iter().any(|s| (s - sector).abs() < 1e-9) {
            Ok(())
        } else {
            Err(mismatch())
        }
    };
    let (a, b) = (constant(constants, 0), constant(constants, 1));
    let z = C64::default();
    let k = kappa;
    let mut alpha = z;
    let mut beta = z;
    let terms = match kind {
        FormKind::TwoTypical => {
            want("TT", &[0.0])?;
            let (x, y) = (&specs[0], &specs[1]);
            if (x.e + y.e).norm() > 1e-12 {
                return Err(mismatch());
            }
            alpha = x.n * y.e + y.n * x.e + x.e * y.e;
            vec![term(0, a, z, z)]
        }
        FormKind::TwoProjective => {
            want("PP", &[-1.0, 0.0, 1.0])?;
            if sector.abs() > 0.5 {
                vec![term(0, a, z, z)]
            } else {
                match transcription {
                    Transcription::Quoted => vec![term(1, a, z, z), term(0, b, a * 2.0 / k, z)],
                    Transcription::Consistent => vec![term(0, a, z, z), term(1, b, a * 2.0 / k, z)],
                }
            }
        }
        FormKind::OneDimensional => {
            let inv = invariant_basis(specs)?;
            let basis = inv.preferred(sector).into_iter().map(|v| v.vector.clone()).collect();
            let p = project_onto(specs, basis, kappa)?;
            if p.basis.len() != 1 || p.b.is_none() {
                return Err(mismatch());
            }
            alpha = p.a[(0, 0)];
            beta = p.b.as_ref().map(|m| m[(0, 0)]).unwrap_or_default();
            vec![term(0, a, z, z)]
        }
        FormKind::TypicalPairProjective => {
            want("TTP", &[0.0])?;
            let (x, y, w) = (&specs[0], &specs[1], &specs[2]);
            if (x.e + y.e).norm() > 1e-12 {
                return Err(mismatch());
            }
            alpha = x.n * y.e + y.n * x.e + x.e * y.e;
            beta = y.n * w.e + w.n * y.e + y.e * w.e;
            let e1 = x.e;
            vec![term(0, a, z, z), term(1, a * b, -a * e1 / k, a * e1 / k)]
        }
        FormKind::ProjectiveTripleZero => {
            want("PPP", &[0.0])?;
            match transcription {
                Transcription::Quoted => vec![term(0, a, z, z), term(1, b, z, z)],
                Transcription::Consistent => vec![term(0, a, z, z), term(1, b, z, a * 2.0 / k)],
            }
        }
        FormKind::ProjectiveTripleOne => {
            want("PPP", &[-1.0, 1.0])?;
            let (c3, c4) = (constant(constants, 2), constant(constants, 3));
            let head = vec![term(0, a, z, z), term(1, b, z, z)];
            let tail = match transcription {
                Transcription::Quoted => vec![
                    term(2, c3, (a - b) / k, (b - a * 2.0) / k),
                    term(3, c4, b / k, (a - b) / k),
                ],
                Transcription::Consistent if sector < 0.0 => vec![
                    term(2, c3, -b / k, b / k),
                    term(3, c4, (a + b) / k, (b - a) / k),
                ],
                Transcription::Consistent => vec![
                    term(2, c3, a / k, (b * 2.0 - a) / k),
                    term(3, c4, b / k, -b / k),
                ],
            };
            head.into_iter().chain(tail).collect()
        }
    };
    let inv = invariant_basis(specs)?;
    let chosen = inv.preferred(sector);
    let (o12, o23) = casimirs(specs)?;
    Ok(CorrelatorSolution {
        kind,
        transcription,
        specs: specs.to_vec(),
        kappa,
        sector,
        labels: chosen.iter().map(|v| v.label.clone()).collect(),
        basis: chosen.iter().map(|v| v.vector.clone()).collect(),
        alpha,
        beta,
        terms,
        omega12: o12,
        omega23: o23,
    })
}

/// The form that applies to `specs`, if any.
pub fn auto_form(specs: &[ModuleSpec]) -> Result<FormKind> {
    let code = kind_code(specs);
    let s = n_sum(specs);
    let is = |v: f64| (s - v).abs() < 1e-9;
    Ok(match code.as_str() {
        "TT" => FormKind::TwoTypical,
        "PP" => FormKind::TwoProjective,
        "TTP" if is(0.0) => FormKind::TypicalPairProjective,
        "PPP" if is(0.0) => FormKind::ProjectiveTripleZero,
        "PPP" if is(1.0) || is(-1.0) => FormKind::ProjectiveTripleOne,
        _ if specs.len() == 3 => FormKind::OneDimensional,
        _ => return Err(KzError::InvalidInput(format!("no closed form for {code}"))),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResidualReport {
    pub samples: Vec<f64>,
    pub residuals: Vec<f64>,
    pub max: f64,
}

pub fn verify_solution(sol: &CorrelatorSolution, samples: &[f64]) -> Result<ResidualReport> {
    let residuals = samples.iter().map(|&x| sol.residual(x)).collect::<Result<Vec<_>>>()?;
    let max = residuals.iter().cloned().fold(0.0, f64::max);
    Ok(ResidualReport {
        samples: samples.to_vec(),
        residuals,
        max,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum LogSlot {
    LnX,
    LnOneMinusX,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbeReport {
    pub term: usize,
    pub slot: LogSlot,
    pub shift: f64,
    pub base: f64,
    pub perturbed: f64,
}

impl ProbeReport {
    /// The coefficient is forced: exact at the stated value, visibly wrong when shifted.
    pub fn forced(&self, base_tol: f64, raised: f64) -> bool {
        self.base < base_tol && self.perturbed > raised
    }
}

/// Residual before and after shifting one logarithmic coefficient by `shift`.
pub fn log_coefficient_probe(sol: &CorrelatorSolution, term: usize, slot: LogSlot, shift: f64, samples: &[f64]) -> Result<ProbeReport> {
    let base = verify_solution(sol, samples)?.max;
    let mut moved = sol.clone();
    let t = moved
        .terms
        .get_mut(term)
        .ok_or_else(|| KzError::InvalidInput(format!("no term {term}")))?;
    match slot {
        LogSlot::LnX => t.p += shift,
        LogSlot::LnOneMinusX => t.q += shift,
    }
    Ok(ProbeReport {
        term,
        slot,
        shift,
        base,
        perturbed: verify_solution(&moved, samples)?.max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superlinalg::c;

    fn specs(list: &[&str]) -> Vec<ModuleSpec> {
        list.iter().map(|s| s.parse().unwrap()).collect()
    }

    const XS: [f64; 4] = [0.1, 0.35, 0.6, 0.9];

    #[test]
    fn dimension_ledger() {
        for (list, d, q) in [
            (vec!["T:0.37,0.2", "T:-0.37,-0.2"], 1, 1),
            (vec!["P:0.3", "P:-0.3"], 4, 4),
            (vec!["T:0.37,0.2", "T:0.21,0.1", "T:-0.58,-0.8"], 2, 2),
            (vec!["T:0.37,0.2", "T:-0.37,0.1", "P:-0.3"], 4, 4),
            (vec!["P:0.37", "P:0.2", "P:-0.5"], 16, 12),
        ] {
            let s = specs(&list);
            let inv = invariant_basis(&s).unwrap();
            let quoted = inv.quoted.clone().unwrap();
            assert_eq!(inv.dim(), d, "{list:?}");
            assert_eq!(quoted.len(), q, "{list:?}");
            assert!(inv.comparison.iter().all(|c| c.quoted_inside), "{list:?}");
            assert_eq!(inv.matches_quoted(), Some(d == q));
            for v in inv.vectors.iter().chain(&quoted) {
                assert!(invariance_residual(&s, v).unwrap() < 1e-12, "{}", v.label);
            }
        }
    }

    #[test]
    fn triple_projective_middle_sector_is_larger() {
        let inv = invariant_basis(&specs(&["P:0.37", "P:0.2", "P:-0.5"])).unwrap();
        let dims: Vec<_> = inv.comparison.iter().map(|c| (c.computed_dim, c.quoted_dim)).collect();
        assert_eq!(dims, vec![(1, 1), (4, 4), (6, 2), (4, 4), (1, 1)]);
    }

    #[test]
    fn two_point_forms() {
        let k = re(1.3);
        let tt = closed_form(FormKind::TwoTypical, &specs(&["T:0.37,0.2", "T:-0.37,-0.2"]), k, &[re(1.0)], Transcription::Quoted).unwrap();
        assert!(verify_solution(&tt, &[0.5, 1.3, 2.7]).unwrap().max < 1e-12);
        let pp = specs(&["P:0.3", "P:-0.3"]);
        let cons = closed_form(FormKind::TwoProjective, &pp, k, &[re(0.7), re(-0.2)], Transcription::Consistent).unwrap();
        assert!(verify_solution(&cons, &[0.5, 1.3, 2.7]).unwrap().max < 1e-11);
        let probe = log_coefficient_probe(&cons, 1, LogSlot::LnX, 1e-3, &[0.5, 1.3, 2.7]).unwrap();
        assert!(probe.forced(1e-11, 1e-4), "{probe:?}");
        let quoted = closed_form(FormKind::TwoProjective, &pp, k, &[re(0.7), re(-0.2)], Transcription::Quoted).unwrap();
        assert!(verify_solution(&quoted, &[0.5, 1.3]).unwrap().max > 1e-3);
    }

    #[test]
    fn three_point_forms() {
        let k = c(1.3, 0.1);
        let consts = [re(0.7), re(-0.4), re(0.2), re(1.1)];
        let ttp = specs(&["T:0.37,0.3", "T:-0.37,-0.7", "P:0.4"]);
        let f = closed_form(FormKind::TypicalPairProjective, &ttp, k, &consts, Transcription::Quoted).unwrap();
        assert!(verify_solution(&f, &XS).unwrap().max < 1e-10);
        for n3 in ["P:0.4", "P:-0.6", "P:1.4"] {
            let s = specs(&["P:0.3", "P:-0.7", n3]);
            let kind = auto_form(&s).unwrap();
            let good = closed_form(kind, &s, k, &consts, Transcription::Consistent).unwrap();
            assert!(verify_solution(&good, &XS).unwrap().max < 1e-10, "{n3}");
            let bad = closed_form(kind, &s, k, &consts, Transcription::Quoted).unwrap();
            assert!(verify_solution(&bad, &XS).unwrap().max > 1e-4, "{n3}");
        }
        for list in [
            vec!["T:0.37,0.2", "T:0.21,0.1", "T:-0.58,-0.8"],
            vec!["T:0.37,0.2", "T:0.21,0.1", "T:-0.58,0.2"],
            vec!["T:0.37,0.2", "T:-0.37,0.1", "P:-1.3"],
            vec!["P:0.3", "P:0.2", "P:-2.5"],
        ] {
            let s = specs(&list);
            let f = closed_form(FormKind::OneDimensional, &s, k, &consts, Transcription::Quoted).unwrap();
            assert!(verify_solution(&f, &XS).unwrap().max < 1e-10, "{list:?}");
        }
    }

    #[test]
    fn numeric_solution_matches_closed_form() {
        let k = re(1.3);
        let s = specs(&["P:0.3", "P:-0.7", "P:1.4"]);
        let f = closed_form(FormKind::ProjectiveTripleOne, &s, k, &[re(0.7), re(-0.4), re(0.2), re(1.1)], Transcription::Consistent).unwrap();
        let p = project(&s, 1.0, k).unwrap();
        let bm = hstack(&p.basis, p.basis[0].len());
        let coords = |v: &CVec| bm.clone().svd(true, true).solve(v, 1e-14).unwrap();
        let c0 = coords(&f.eval(0.5));
        let out = p.solve(&c0, &[0.2, 0.8]).unwrap();
        for (x, c) in [0.2, 0.8].iter().zip(out) {
            assert!((coords(&f.eval(*x)) - c).norm() < 1e-8);
        }
    }
}
