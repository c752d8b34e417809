//! Tensor products of modules and their decomposition into indecomposables.

use serde::{Deserialize, Serialize};

use crate::error::{KzError, Result};
use crate::gl11_modules::{build_module, build_qmodule_raw, Algebra, Kind, ModuleRep, ModuleSpec};
use crate::superlinalg::{
    column_span, condition_number, diagonal_sectors, hcat, hstack, inverse, is_diagonal, kron,
    max_abs, null_space, re, super_kron_raw, tensor_parities, CMat, CVec, Parity, SignRule, C64,
    RANK_TOL,
};

/// Label tolerance when comparing summands.
pub const LABEL_TOL: f64 = 1e-9;
/// Default distance to the excluded set below which parameters count as non-generic.
pub const GENERICITY_TOL: f64 = 1e-9;

/// Tensor product with the coproduct of the acting algebra.
pub fn tensor_product(a: &ModuleRep, b: &ModuleRep) -> Result<ModuleRep> {
    if a.algebra != b.algebra {
        return Err(KzError::InvalidInput("factors belong to different algebras".into()));
    }
    let (da, db) = (a.dim(), b.dim());
    let (ia, ib) = (CMat::identity(da, da), CMat::identity(db, db));
    let sk = |x: &CMat, y: &CMat| super_kron_raw(x, &a.parities, y, &b.parities, SignRule::Koszul);
    let e = kron(&a.e, &ib) + kron(&ia, &b.e);
    let n = kron(&a.n, &ib) + kron(&ia, &b.n);
    let (kb, kai) = (b.k_factor(1.0), a.k_factor(-1.0));
    let psi_plus = sk(&a.psi_plus, &kb) + sk(&kai, &b.psi_plus);
    let psi_minus = sk(&a.psi_minus, &kb) + sk(&kai, &b.psi_minus);
    let mut summands = Vec::new();
    for x in &a.summands {
        for y in &b.summands {
            summands.extend(fuse_labels(x, y));
        }
    }
    Ok(ModuleRep {
        algebra: a.algebra,
        parities: tensor_parities(&a.parities, &b.parities),
        e,
        n,
        psi_plus,
        psi_minus,
        summands,
    })
}

/// Iterated tensor product `((V1⊗V2)⊗V3)⊗…`.
pub fn tensor_all(factors: &[&ModuleRep]) -> Result<ModuleRep> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| KzError::InvalidInput("empty tensor product".into()))?;
    rest.iter().try_fold((*first).clone(), |acc, f| tensor_product(&acc, f))
}

/// Summand labels of `x ⊗ y` for generic parameters.
pub fn fuse_labels(x: &ModuleSpec, y: &ModuleSpec) -> Vec<ModuleSpec> {
    let flip = x.parity_reversed ^ y.parity_reversed;
    let half = 0.5;
    let out: Vec<ModuleSpec> = match (x.kind, y.kind) {
        (Kind::Atypical, _) => vec![ModuleSpec { n: y.n + x.n, parity_reversed: false, ..*y }],
        (_, Kind::Atypical) => vec![ModuleSpec { n: x.n + y.n, parity_reversed: false, ..*x }],
        (Kind::Typical, Kind::Typical) => {
            let e = x.e + y.e;
            let n = x.n + y.n;
            if e.norm() <= LABEL_TOL {
                vec![ModuleSpec::projective_c(n).reversed()]
            } else {
                vec![
                    ModuleSpec::typical_c(e, n + half),
                    ModuleSpec::typical_c(e, n - half).reversed(),
                ]
            }
        }
        (Kind::Typical, Kind::Projective) | (Kind::Projective, Kind::Typical) => {
            let e = x.e + y.e;
            let n = x.n + y.n;
            vec![
                ModuleSpec::typical_c(e, n + 1.0).reversed(),
                ModuleSpec::typical_c(e, n),
                ModuleSpec::typical_c(e, n),
                ModuleSpec::typical_c(e, n - 1.0).reversed(),
            ]
        }
        (Kind::Projective, Kind::Projective) => {
            let n = x.n + y.n;
            vec![
                ModuleSpec::projective_c(n + 1.0).reversed(),
                ModuleSpec::projective_c(n),
                ModuleSpec::projective_c(n),
                ModuleSpec::projective_c(n - 1.0).reversed(),
            ]
        }
    };
    out.into_iter()
        .map(|s| if flip { s.reversed() } else { s })
        .collect()
}

/// The ring table in its commonly quoted form, for two basic labels.
///
/// It differs from [`fuse_labels`] by an overall parity reversal on the
/// `T(e)⊗T(−e)` and `P⊗P` lines once the top vector of `P` is taken even.
pub fn quoted_ring_line(x: &ModuleSpec, y: &ModuleSpec) -> Vec<ModuleSpec> {
    let mut out = fuse_labels(x, y);
    let opposite = x.kind == Kind::Typical && y.kind == Kind::Typical && (x.e + y.e).norm() <= LABEL_TOL;
    if opposite || (x.kind == Kind::Projective && y.kind == Kind::Projective) {
        out = out.into_iter().map(|s| s.reversed()).collect();
    }
    out
}

/// Multiset equality ignoring parity-reversal flags.
pub fn same_multiset_up_to_parity(a: &[ModuleSpec], b: &[ModuleSpec]) -> bool {
    let strip = |v: &[ModuleSpec]| v.iter().map(|s| s.with_parity(false)).collect::<Vec<_>>();
    same_multiset(&strip(a), &strip(b))
}

/// Collapses a list of labels into `(label, multiplicity)` pairs, first-seen order.
pub fn multiset(labels: &[ModuleSpec]) -> Vec<(ModuleSpec, usize)> {
    let mut out: Vec<(ModuleSpec, usize)> = Vec::new();
    for l in labels {
        match out.iter_mut().find(|(s, _)| s.same_label(l, LABEL_TOL)) {
            Some(entry) => entry.1 += 1,
            None => out.push((*l, 1)),
        }
    }
    out
}

/// Multiset equality of label lists.
pub fn same_multiset(a: &[ModuleSpec], b: &[ModuleSpec]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    a.iter().all(|x| {
        match (0..b.len()).find(|&j| !used[j] && b[j].same_label(x, LABEL_TOL)) {
            Some(j) => {
                used[j] = true;
                true
            }
            None => false,
        }
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Violation {
    pub condition: String,
    pub value: C64,
    /// Distance from `value` to the excluded set.
    pub distance: f64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct GenericityReport {
    /// Violated conditions of the category (`e/κ ∉ ℤ`, subset sums `∉ ℤ∖{0}`).
    pub violations: Vec<Violation>,
    /// Violated spectral non-resonance conditions (`2e/κ ∉ ℤ`).
    pub resonances: Vec<Violation>,
    /// Smallest distance to any excluded value over all conditions checked.
    pub margin: f64,
}

impl GenericityReport {
    pub fn is_generic(&self) -> bool {
        self.violations.is_empty() && self.resonances.is_empty()
    }
}

fn distance_to_integers(v: C64, allow_zero: bool) -> f64 {
    let k = v.re.round();
    let mut best = (v - re(k)).norm();
    if allow_zero && k == 0.0 {
        let alt = if v.re >= 0.0 { 1.0 } else { -1.0 };
        best = (v - re(alt)).norm();
    }
    best
}

/// Checks the genericity conditions with threshold `tol`.
pub fn genericity_with_tol(specs: &[ModuleSpec], kappa: C64, tol: f64) -> GenericityReport {
    let typ: Vec<(usize, C64)> = specs
        .iter()
        .enumerate()
        .filter(|(_, s)| s.kind == Kind::Typical)
        .map(|(i, s)| (i, s.e))
        .collect();
    let mut rep = GenericityReport {
        margin: f64::INFINITY,
        ..Default::default()
    };
    let check = |cond: String, v: C64, allow_zero: bool, resonance: bool, rep: &mut GenericityReport| {
        let d = distance_to_integers(v, allow_zero);
        rep.margin = rep.margin.min(d);
        if d < tol {
            let viol = Violation {
                condition: cond,
                value: v,
                distance: d,
            };
            if resonance {
                rep.resonances.push(viol);
            } else {
                rep.violations.push(viol);
            }
        }
    };
    for &(i, e) in &typ {
        check(format!("e{}/kappa not in Z", i + 1), e / kappa, false, false, &mut rep);
    }
    let m = typ.len();
    for mask in 1u32..(1 << m) {
        if mask.count_ones() < 2 {
            continue;
        }
        let members: Vec<usize> = (0..m).filter(|k| mask & (1 << k) != 0).collect();
        let sum: C64 = members.iter().map(|&k| typ[k].1).sum();
        let name = members
            .iter()
            .map(|&k| format!("e{}", typ[k].0 + 1))
            .collect::<Vec<_>>()
            .join("+");
        check(format!("({name})/kappa not in Z\\{{0}}"), sum / kappa, true, false, &mut rep);
    }
    for &(i, e) in &typ {
        check(format!("2 e{}/kappa not in Z", i + 1), e * 2.0 / kappa, false, true, &mut rep);
    }
    rep
}

pub fn genericity(specs: &[ModuleSpec], kappa: C64) -> GenericityReport {
    genericity_with_tol(specs, kappa, GENERICITY_TOL)
}

/// Fails with [`KzError::ExcludedParameter`] on any category-level violation.
pub fn require_generic(specs: &[ModuleSpec], kappa: C64, include_resonances: bool) -> Result<()> {
    let rep = genericity(specs, kappa);
    let mut bad: Vec<&Violation> = rep.violations.iter().collect();
    if include_resonances {
        bad.extend(rep.resonances.iter());
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(KzError::ExcludedParameter(
            bad.iter()
                .map(|v| format!("{} violated (value {})", v.condition, v.value))
                .collect::<Vec<_>>()
                .join("; "),
        ))
    }
}

#[derive(Clone, Debug)]
pub struct DecompositionResult {
    pub summands: Vec<(ModuleSpec, usize)>,
    /// Label of each diagonal block, in the column order of `change_of_basis`.
    pub blocks: Vec<ModuleSpec>,
    /// Columns: block basis vectors expressed in the standard tensor basis.
    pub change_of_basis: CMat,
    pub certificate_residual: f64,
    pub condition_number: f64,
}

impl DecompositionResult {
    pub fn labels(&self) -> Vec<ModuleSpec> {
        self.blocks.clone()
    }
}

fn reference(spec: &ModuleSpec, algebra: Algebra) -> Result<ModuleRep> {
    match algebra {
        Algebra::Classical => build_module(spec),
        Algebra::Quantum { h } => build_qmodule_raw(spec, h),
    }
}

fn generator_index(kind: Kind) -> usize {
    match kind {
        Kind::Projective => 1,
        _ => 0,
    }
}

fn words(rep: &ModuleRep) -> [CMat; 4] {
    let d = rep.dim();
    [
        CMat::identity(d, d),
        rep.psi_plus.clone(),
        rep.psi_minus.clone(),
        &rep.psi_plus * &rep.psi_minus,
    ]
}

/// Columns spanning the summand generated by `top`, in the reference basis order.
fn summand_basis(rep: &ModuleRep, spec: &ModuleSpec, top: &CVec) -> Result<CMat> {
    let r = reference(spec, rep.algebra)?;
    let g = generator_index(spec.kind);
    let d = r.dim();
    let rw = words(&r);
    let w_ref = hstack(&rw.iter().map(|w| w.column(g).into_owned()).collect::<Vec<_>>(), d);
    let coeffs = w_ref
        .clone()
        .svd(true, true)
        .solve(&CMat::identity(d, d), 1e-12)
        .map_err(|e| KzError::Singular(e.into()))?;
    if max_abs(&(&w_ref * &coeffs - CMat::identity(d, d))) > 1e-10 {
        return Err(KzError::Inconsistent(format!("{spec} is not cyclic on its generator")));
    }
    let pw = words(rep);
    let images = hstack(&pw.iter().map(|w| w * top).collect::<Vec<_>>(), rep.dim());
    Ok(images * coeffs)
}

/// Decomposes any module whose E and N are diagonal into indecomposables.
pub fn decompose_rep(rep: &ModuleRep) -> Result<DecompositionResult> {
    let tol = 1e-9;
    if !is_diagonal(&rep.e, 1e-12) || !is_diagonal(&rep.n, 1e-12) {
        return Err(KzError::InvalidInput("E and N must be diagonal".into()));
    }
    let dim = rep.dim();
    let sectors = diagonal_sectors(&[&rep.e, &rep.n], tol);
    let embed = |idx: &[usize], v: CVec| {
        let mut out = CVec::zeros(dim);
        for (k, &i) in idx.iter().enumerate() {
            out[i] = v[k];
        }
        out
    };
    let restrict_cols = |m: &CMat, idx: &[usize]| {
        CMat::from_fn(m.nrows(), idx.len(), |r, k| m[(r, idx[k])])
    };
    let sector_parity = |idx: &[usize]| -> Result<Parity> {
        let p = rep.parities[idx[0]];
        if idx.iter().any(|&i| rep.parities[i] != p) {
            return Err(KzError::Inconsistent("weight space is not parity homogeneous".into()));
        }
        Ok(p)
    };
    let mut tops: Vec<(ModuleSpec, CVec)> = Vec::new();
    let pp_pm = &rep.psi_plus * &rep.psi_minus;
    for idx in &sectors {
        let eps = rep.e[(idx[0], idx[0])];
        let mu = rep.n[(idx[0], idx[0])];
        let odd = sector_parity(idx)? == Parity::Odd;
        let nonzero = match rep.algebra {
            Algebra::Classical => eps.norm() > tol,
            Algebra::Quantum { h } => {
                if eps.norm() > tol && (eps * h).sinh().norm() < 1e-9 {
                    return Err(KzError::ExcludedParameter(format!(
                        "sinh(E h) vanishes on the E = {eps} sector"
                    )));
                }
                eps.norm() > tol
            }
        };
        if nonzero {
            let k = null_space(&restrict_cols(&rep.psi_plus, idx), RANK_TOL);
            for col in k.column_iter() {
                let spec = ModuleSpec::typical_c(eps, mu - 0.5).with_parity(odd);
                tops.push((spec, embed(idx, col.into_owned())));
            }
        } else {
            let m = restrict_cols(&pp_pm, idx);
            let svd = m.clone().svd(false, true);
            let v_t = svd.v_t.expect("requested");
            let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
            let mut bvecs: Vec<CVec> = Vec::new();
            for (k, &s) in svd.singular_values.iter().enumerate() {
                if s > RANK_TOL * smax.max(1.0) {
                    let coef: CVec = v_t.row(k).adjoint();
                    let top = embed(idx, coef);
                    bvecs.push(&pp_pm * &top);
                    let spec = ModuleSpec::projective_c(mu).with_parity(odd);
                    tops.push((spec, top));
                }
            }
            let stacked = {
                let a = restrict_cols(&rep.psi_plus, idx);
                let b = restrict_cols(&rep.psi_minus, idx);
                let mut s = CMat::zeros(2 * dim, idx.len());
                s.view_mut((0, 0), (dim, idx.len())).copy_from(&a);
                s.view_mut((dim, 0), (dim, idx.len())).copy_from(&b);
                s
            };
            let joint = null_space(&stacked, RANK_TOL);
            let joint_full = hstack(
                &joint.column_iter().map(|c| embed(idx, c.into_owned())).collect::<Vec<_>>(),
                dim,
            );
            let q = column_span(&hstack(&bvecs, dim), RANK_TOL);
            let proj = &joint_full - &q * (q.adjoint() * &joint_full);
            let free = column_span(&proj, RANK_TOL);
            for col in free.column_iter() {
                // lift back into the joint kernel
                let coef = joint_full.adjoint() * col;
                let v = &joint_full * coef;
                let spec = ModuleSpec::atypical_c(mu).with_parity(odd);
                tops.push((spec, v));
            }
        }
    }
    let mut c = CMat::zeros(dim, 0);
    let mut blocks = Vec::new();
    for (spec, top) in &tops {
        let cols = match spec.kind {
            Kind::Atypical => {
                let mut m = CMat::zeros(dim, 1);
                m.set_column(0, top);
                m
            }
            _ => summand_basis(rep, spec, top)?,
        };
        c = hcat(&c, &cols);
        blocks.push(*spec);
    }
    if c.ncols() != dim {
        return Err(KzError::Inconsistent(format!(
            "summands span {} of {} dimensions",
            c.ncols(),
            dim
        )));
    }
    let cond = condition_number(&c);
    let cinv = inverse(&c)?;
    let mut residual: f64 = 0.0;
    let refs: Vec<ModuleRep> = blocks
        .iter()
        .map(|s| reference(s, rep.algebra))
        .collect::<Result<_>>()?;
    for g in 0..4 {
        let mut target = CMat::zeros(dim, dim);
        let mut off = 0;
        for r in &refs {
            let m = r.generators()[g].1;
            target.view_mut((off, off), (r.dim(), r.dim())).copy_from(m);
            off += r.dim();
        }
        let conj = &cinv * rep.generators()[g].1 * &c;
        residual = residual.max(max_abs(&(conj - target)));
    }
    let mut par_ok = true;
    let mut off = 0;
    for r in &refs {
        for k in 0..r.dim() {
            let col = c.column(off + k);
            let (i, _) = col.iter().enumerate().fold((0, 0.0), |acc, (i, z)| {
                if z.norm() > acc.1 {
                    (i, z.norm())
                } else {
                    acc
                }
            });
            par_ok &= rep.parities[i] == r.parities[k];
        }
        off += r.dim();
    }
    if !par_ok {
        return Err(KzError::Inconsistent("block parities disagree with labels".into()));
    }
    Ok(DecompositionResult {
        summands: multiset(&blocks),
        blocks,
        change_of_basis: c,
        certificate_residual: residual,
        condition_number: cond,
    })
}

/// Decomposition of `a ⊗ b` after the genericity screen for `κ`.
pub fn decompose(a: &ModuleRep, b: &ModuleRep, kappa: C64) -> Result<DecompositionResult> {
    let specs: Vec<ModuleSpec> = a.summands.iter().chain(&b.summands).cloned().collect();
    require_generic(&specs, kappa, false)?;
    decompose_rep(&tensor_product(a, b)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superlinalg::c;

    fn classical(s: &ModuleSpec) -> ModuleRep {
        build_module(s).unwrap()
    }

    #[test]
    fn atypical_pair() {
        let a = classical(&ModuleSpec::atypical(0.3));
        let b = classical(&ModuleSpec::atypical(-1.1));
        let t = tensor_product(&a, &b).unwrap();
        assert_eq!(t.dim(), 1);
        assert!((t.n[(0, 0)] - re(-0.8)).norm() < 1e-15);
    }

    #[test]
    fn primitive_e() {
        let a = classical(&ModuleSpec::typical(0.3, 0.0));
        let b = classical(&ModuleSpec::typical(0.45, 1.0));
        let t = tensor_product(&a, &b).unwrap();
        assert!(max_abs(&(&t.e - CMat::identity(4, 4) * re(0.75))) < 1e-15);
    }

    #[test]
    fn products_are_modules() {
        let p = classical(&ModuleSpec::projective(0.2));
        let q = classical(&ModuleSpec::projective(-0.7).reversed());
        let t = tensor_product(&p, &q).unwrap();
        assert!(t.relation_residual() < 1e-12);
        let h = c(0.0, 1.3);
        let qp = build_qmodule_raw(&ModuleSpec::projective(0.2), h).unwrap();
        let qt = build_qmodule_raw(&ModuleSpec::typical(0.4, 0.1), h).unwrap();
        assert!(tensor_product(&qp, &qt).unwrap().relation_residual() < 1e-12);
        assert!(tensor_product(&qt, &qt).unwrap().relation_residual() < 1e-12);
    }

    fn check_line(a: ModuleSpec, b: ModuleSpec, expected: Vec<ModuleSpec>) {
        let kappa = re(1.0);
        let d = decompose(&classical(&a), &classical(&b), kappa).unwrap();
        assert!(same_multiset(&d.blocks, &expected), "{a} x {b}: {:?}", d.blocks);
        assert!(d.certificate_residual < 1e-9, "{}", d.certificate_residual);
        let h = c(0.0, std::f64::consts::PI);
        let qa = build_qmodule_raw(&a, h).unwrap();
        let qb = build_qmodule_raw(&b, h).unwrap();
        let qd = decompose(&qa, &qb, kappa).unwrap();
        assert!(same_multiset(&qd.blocks, &expected), "q {a} x {b}: {:?}", qd.blocks);
        assert!(qd.certificate_residual < 1e-9, "q {}", qd.certificate_residual);
    }

    #[test]
    fn ring_lines() {
        let (e, n, e2, n2) = (0.37, 0.2, 0.21, -0.6);
        check_line(
            ModuleSpec::typical(e, n),
            ModuleSpec::typical(e2, n2),
            vec![
                ModuleSpec::typical(e + e2, n + n2 + 0.5),
                ModuleSpec::typical(e + e2, n + n2 - 0.5).reversed(),
            ],
        );
        check_line(
            ModuleSpec::typical(e, n),
            ModuleSpec::typical(-e, n2),
            vec![ModuleSpec::projective(n + n2).reversed()],
        );
        check_line(
            ModuleSpec::projective(n),
            ModuleSpec::projective(n2),
            vec![
                ModuleSpec::projective(n + n2 + 1.0).reversed(),
                ModuleSpec::projective(n + n2),
                ModuleSpec::projective(n + n2),
                ModuleSpec::projective(n + n2 - 1.0).reversed(),
            ],
        );
        check_line(
            ModuleSpec::typical(e, n),
            ModuleSpec::projective(n2),
            vec![
                ModuleSpec::typical(e, n + n2 + 1.0).reversed(),
                ModuleSpec::typical(e, n + n2),
                ModuleSpec::typical(e, n + n2),
                ModuleSpec::typical(e, n + n2 - 1.0).reversed(),
            ],
        );
        check_line(
            ModuleSpec::atypical(n),
            ModuleSpec::projective(n2).reversed(),
            vec![ModuleSpec::projective(n + n2).reversed()],
        );
    }

    #[test]
    fn fused_labels_agree_with_decomposition() {
        let specs = [
            ModuleSpec::typical(0.3, 0.1),
            ModuleSpec::typical(-0.3, 0.5).reversed(),
            ModuleSpec::projective(0.25),
            ModuleSpec::atypical(-0.4).reversed(),
            ModuleSpec::projective(-1.0).reversed(),
        ];
        for a in &specs {
            for b in &specs {
                let t = tensor_product(&classical(a), &classical(b)).unwrap();
                let d = decompose_rep(&t).unwrap();
                assert!(same_multiset(&d.blocks, &t.summands), "{a} x {b}: {:?} vs {:?}", d.blocks, t.summands);
            }
        }
    }

    #[test]
    fn quoted_table_differs_only_in_parity() {
        let specs = [ModuleSpec::typical(0.3, 0.1), ModuleSpec::typical(-0.3, 0.4), ModuleSpec::projective(0.2)];
        for a in &specs {
            for b in &specs {
                assert!(same_multiset_up_to_parity(&fuse_labels(a, b), &quoted_ring_line(a, b)));
            }
        }
        let p = ModuleSpec::projective(0.0);
        assert!(!same_multiset(&fuse_labels(&p, &p), &quoted_ring_line(&p, &p)));
    }

    #[test]
    fn parity_reversal_shifts_labels() {
        let a = ModuleSpec::typical(0.3, 0.1);
        let b = ModuleSpec::typical(0.2, 0.0);
        let plain = decompose_rep(&tensor_product(&classical(&a), &classical(&b)).unwrap()).unwrap();
        let flipped = decompose_rep(&tensor_product(&classical(&a.reversed()), &classical(&b)).unwrap()).unwrap();
        let expect: Vec<ModuleSpec> = plain.blocks.iter().map(|s| s.reversed()).collect();
        assert!(same_multiset(&flipped.blocks, &expect));
    }

    #[test]
    fn genericity_examples() {
        let k = re(1.0);
        assert!(genericity(&[ModuleSpec::typical(0.3, 0.0)], k).is_generic());
        let r = genericity(&[ModuleSpec::typical(0.6, 0.0), ModuleSpec::typical(0.4, 1.0)], k);
        assert_eq!(r.violations.len(), 1);
        assert!(r.violations[0].condition.contains("e1+e2"));
        let r = genericity(&[ModuleSpec::typical(0.3, 0.0), ModuleSpec::typical(-0.3, 1.0)], re(1.7));
        assert!(r.violations.is_empty());
    }

    #[test]
    fn excluded_decomposition() {
        let k = re(1.3);
        let a = classical(&ModuleSpec::typical(0.5, 0.0));
        let b = classical(&ModuleSpec::typical(0.8, 0.0));
        assert!(matches!(decompose(&a, &b, k), Err(KzError::ExcludedParameter(_))));
    }
}
