//! The three module families of gl(1|1): typical `T(e,n)`, atypical `A(n)` and
//! projective `P(n)`, in the classical and the quantum (`h`-deformed) setting.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{KzError, Result};
use crate::superlinalg::{
    act_in_slot, max_abs, re, CMat, CVec, GradedMatrix, Parity, C64,
};

/// Tolerance for the defining relations of a representation.
pub const RELATION_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kind {
    Typical,
    Atypical,
    Projective,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModuleSpec {
    pub kind: Kind,
    pub e: C64,
    pub n: C64,
    pub parity_reversed: bool,
}

impl ModuleSpec {
    pub fn typical(e: f64, n: f64) -> Self {
        Self::typical_c(re(e), re(n))
    }

    pub fn typical_c(e: C64, n: C64) -> Self {
        Self {
            kind: Kind::Typical,
            e,
            n,
            parity_reversed: false,
        }
    }

    pub fn atypical(n: f64) -> Self {
        Self::atypical_c(re(n))
    }

    pub fn atypical_c(n: C64) -> Self {
        Self {
            kind: Kind::Atypical,
            e: C64::default(),
            n,
            parity_reversed: false,
        }
    }

    pub fn projective(n: f64) -> Self {
        Self::projective_c(re(n))
    }

    pub fn projective_c(n: C64) -> Self {
        Self {
            kind: Kind::Projective,
            e: C64::default(),
            n,
            parity_reversed: false,
        }
    }

    pub fn reversed(mut self) -> Self {
        self.parity_reversed = !self.parity_reversed;
        self
    }

    pub fn with_parity(mut self, reversed: bool) -> Self {
        self.parity_reversed = reversed;
        self
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            Kind::Typical => 2,
            Kind::Atypical => 1,
            Kind::Projective => 4,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            Kind::Typical if self.e.norm() == 0.0 => {
                Err(KzError::InvalidInput("typical module requires e != 0".into()))
            }
            Kind::Atypical | Kind::Projective if self.e.norm() != 0.0 => Err(
                KzError::InvalidInput("atypical and projective modules have e = 0".into()),
            ),
            _ => Ok(()),
        }
    }

    /// Equality of labels up to `tol` in the parameters.
    pub fn same_label(&self, other: &ModuleSpec, tol: f64) -> bool {
        self.kind == other.kind
            && self.parity_reversed == other.parity_reversed
            && (self.e - other.e).norm() <= tol
            && (self.n - other.n).norm() <= tol
    }
}

fn fmt_num(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

impl fmt::Display for ModuleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parity_reversed {
            write!(f, "Pi*")?;
        }
        match self.kind {
            Kind::Typical => write!(f, "T:{},{}", fmt_num(self.e), fmt_num(self.n)),
            Kind::Atypical => write!(f, "A:{}", fmt_num(self.n)),
            Kind::Projective => write!(f, "P:{}", fmt_num(self.n)),
        }
    }
}

/// Parses a decimal or rational `p/q` real number.
pub fn parse_number(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = || KzError::Parse(format!("cannot parse number '{s}'"));
    let v = if let Some((p, q)) = s.split_once('/') {
        let p: f64 = p.trim().parse().map_err(|_| bad())?;
        let q: f64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0.0 {
            return Err(bad());
        }
        p / q
    } else {
        s.parse().map_err(|_| bad())?
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

impl FromStr for ModuleSpec {
    type Err = KzError;

    /// `T:e,n`, `A:n`, `P:n`, optionally prefixed by `Pi*`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (reversed, body) = match s.strip_prefix("Pi*") {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (head, args) = body
            .split_once(':')
            .ok_or_else(|| KzError::Parse(format!("module spec '{s}' lacks ':'")))?;
        let nums: Vec<f64> = args.split(',').map(parse_number).collect::<Result<_>>()?;
        let spec = match (head.trim(), nums.as_slice()) {
            ("T", [e, n]) => ModuleSpec::typical(*e, *n),
            ("A", [n]) => ModuleSpec::atypical(*n),
            ("P", [n]) => ModuleSpec::projective(*n),
            _ => return Err(KzError::Parse(format!("unrecognized module spec '{s}'"))),
        };
        spec.validate().map_err(|e| KzError::Parse(e.to_string()))?;
        Ok(spec.with_parity(reversed))
    }
}

/// Which algebra acts: the classical enveloping algebra or its deformation at `h`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Algebra {
    Classical,
    Quantum { h: C64 },
}

/// A concrete finite-dimensional module: parities and the four generator matrices.
///
/// `summands` lists the indecomposable labels; a single entry for the basic
/// families, several for tensor products.
#[derive(Clone, Debug)]
pub struct ModuleRep {
    pub algebra: Algebra,
    pub parities: Vec<Parity>,
    pub e: CMat,
    pub n: CMat,
    pub psi_plus: CMat,
    pub psi_minus: CMat,
    pub summands: Vec<ModuleSpec>,
}

impl ModuleRep {
    pub fn dim(&self) -> usize {
        self.parities.len()
    }

    /// The basic module label, if this is one of the three families.
    pub fn spec(&self) -> Option<&ModuleSpec> {
        match self.summands.as_slice() {
            [s] if s.dim() == self.dim() => Some(s),
            _ => None,
        }
    }

    pub fn generators(&self) -> [(&'static str, &CMat); 4] {
        [
            ("E", &self.e),
            ("N", &self.n),
            ("psi+", &self.psi_plus),
            ("psi-", &self.psi_minus),
        ]
    }

    pub fn graded(&self, m: &CMat) -> GradedMatrix {
        GradedMatrix {
            parities: self.parities.clone(),
            mat: m.clone(),
        }
    }

    pub fn label(&self) -> String {
        self.summands
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// `K = exp(hE/2)`; the identity in the classical case.
    pub fn k_factor(&self, power: f64) -> CMat {
        match self.algebra {
            Algebra::Classical => CMat::identity(self.dim(), self.dim()),
            Algebra::Quantum { h } => crate::superlinalg::expm(&(&self.e * (h * power / 2.0))),
        }
    }

    /// Largest residual among the defining relations of the acting algebra.
    pub fn relation_residual(&self) -> f64 {
        let anti = &self.psi_plus * &self.psi_minus + &self.psi_minus * &self.psi_plus;
        let target = match self.algebra {
            Algebra::Classical => self.e.clone(),
            Algebra::Quantum { h } => {
                let k2 = crate::superlinalg::expm(&(&self.e * h));
                let k2i = crate::superlinalg::expm(&(&self.e * -h));
                k2 - k2i
            }
        };
        let mut r = max_abs(&(anti - target));
        r = r.max(max_abs(&(&self.n * &self.psi_plus - &self.psi_plus * &self.n - &self.psi_plus)));
        r = r.max(max_abs(&(&self.n * &self.psi_minus - &self.psi_minus * &self.n + &self.psi_minus)));
        r = r.max(max_abs(&(&self.psi_plus * &self.psi_plus)));
        r = r.max(max_abs(&(&self.psi_minus * &self.psi_minus)));
        for (_, g) in self.generators() {
            r = r.max(max_abs(&(&self.e * g - g * &self.e)));
        }
        r
    }

    /// True when E, N are even and ψ± odd with respect to the parities.
    pub fn gradings_consistent(&self, tol: f64) -> bool {
        let even = |m: &CMat| self.graded(m).homogeneous_parity(tol) == Some(Parity::Even);
        let odd = |m: &CMat| {
            max_abs(m) <= tol || self.graded(m).homogeneous_parity(tol) == Some(Parity::Odd)
        };
        even(&self.e) && even(&self.n) && odd(&self.psi_plus) && odd(&self.psi_minus)
    }
}

fn mat(rows: usize, v: &[C64]) -> CMat {
    CMat::from_row_slice(rows, rows, v)
}

fn diag(v: &[C64]) -> CMat {
    CMat::from_diagonal(&CVec::from_row_slice(v))
}

fn base_parities(spec: &ModuleSpec) -> Vec<Parity> {
    use Parity::*;
    let p = match spec.kind {
        Kind::Typical => vec![Even, Odd],
        Kind::Atypical => vec![Even],
        Kind::Projective => vec![Odd, Even, Even, Odd],
    };
    if spec.parity_reversed {
        p.into_iter().map(Parity::flip).collect()
    } else {
        p
    }
}

/// Classical module with the standard matrices.
pub fn build_module(spec: &ModuleSpec) -> Result<ModuleRep> {
    spec.validate()?;
    let z = C64::default();
    let one = re(1.0);
    let half = re(0.5);
    let (e, n, pp, pm) = match spec.kind {
        Kind::Typical => (
            CMat::identity(2, 2) * spec.e,
            diag(&[spec.n + half, spec.n - half]),
            mat(2, &[z, spec.e, z, z]),
            mat(2, &[z, z, one, z]),
        ),
        Kind::Atypical => (
            CMat::zeros(1, 1),
            diag(&[spec.n]),
            CMat::zeros(1, 1),
            CMat::zeros(1, 1),
        ),
        Kind::Projective => (
            CMat::zeros(4, 4),
            diag(&[spec.n + one, spec.n, spec.n, spec.n - one]),
            mat(4, &[z, one, one, z, z, z, z, one, z, z, z, -one, z, z, z, z]) * half,
            mat(4, &[z, z, z, z, -one, z, z, z, one, z, z, z, z, one, one, z]) * half,
        ),
    };
    Ok(ModuleRep {
        algebra: Algebra::Classical,
        parities: base_parities(spec),
        e,
        n,
        psi_plus: pp,
        psi_minus: pm,
        summands: vec![*spec],
    })
}

/// Quantum module at deformation `h`; typical modules require `sinh(eh) ≠ 0`.
pub fn build_qmodule_raw(spec: &ModuleSpec, h: C64) -> Result<ModuleRep> {
    spec.validate()?;
    let z = C64::default();
    let one = re(1.0);
    let half = re(0.5);
    let (e, n, pp, pm) = match spec.kind {
        Kind::Typical => {
            let s = (spec.e * h).sinh() * 2.0;
            if s.norm() < 1e-12 {
                return Err(KzError::ExcludedParameter(format!(
                    "sinh(e h) = 0 for {spec} at h = {h}"
                )));
            }
            (
                CMat::identity(2, 2) * spec.e,
                diag(&[spec.n + half, spec.n - half]),
                mat(2, &[z, s, z, z]),
                mat(2, &[z, z, one, z]),
            )
        }
        Kind::Atypical => (
            CMat::zeros(1, 1),
            diag(&[spec.n]),
            CMat::zeros(1, 1),
            CMat::zeros(1, 1),
        ),
        Kind::Projective => {
            let eh = h.exp();
            let emh = (-h).exp();
            (
                CMat::zeros(4, 4),
                diag(&[spec.n + one, spec.n, spec.n, spec.n - one]),
                mat(4, &[z, one, -eh, z, z, z, z, eh, z, z, z, one, z, z, z, z]),
                mat(4, &[z, z, z, z, -one, z, z, z, -emh, z, z, z, z, emh, -one, z]),
            )
        }
    };
    Ok(ModuleRep {
        algebra: Algebra::Quantum { h },
        parities: base_parities(spec),
        e,
        n,
        psi_plus: pp,
        psi_minus: pm,
        summands: vec![*spec],
    })
}

/// Same matrices, flipped parities.
pub fn parity_reverse(rep: &ModuleRep) -> ModuleRep {
    let mut out = rep.clone();
    out.parities = rep.parities.iter().map(|p| p.flip()).collect();
    out.summands = rep.summands.iter().map(|s| s.reversed()).collect();
    out
}

/// Supertranspose `(A^{st})[i,j] = (-1)^{(p_i+p_j)p_i} A[j,i]`.
pub fn supertranspose(m: &CMat, parities: &[Parity]) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| {
        let s = (parities[i].bit() + parities[j].bit()) * parities[i].bit();
        if s.is_multiple_of(2) {
            m[(j, i)]
        } else {
            -m[(j, i)]
        }
    })
}

/// Dual module `x ↦ −x^{st}` (classical only).
pub fn dual(rep: &ModuleRep) -> Result<ModuleRep> {
    if rep.algebra != Algebra::Classical {
        return Err(KzError::InvalidInput("dual is implemented for classical modules".into()));
    }
    let st = |m: &CMat| -supertranspose(m, &rep.parities);
    let summands = rep
        .summands
        .iter()
        .map(|s| ModuleSpec {
            e: -s.e,
            n: -s.n,
            ..*s
        })
        .collect();
    Ok(ModuleRep {
        algebra: Algebra::Classical,
        parities: rep.parities.clone(),
        e: st(&rep.e),
        n: st(&rep.n),
        psi_plus: st(&rep.psi_plus),
        psi_minus: st(&rep.psi_minus),
        summands,
    })
}

/// Casimir `Ω = NE + EN + ψ⁻ψ⁺ − ψ⁺ψ⁻ + E²`.
pub fn casimir(rep: &ModuleRep) -> GradedMatrix {
    let m = &rep.n * &rep.e + &rep.e * &rep.n + &rep.psi_minus * &rep.psi_plus
        - &rep.psi_plus * &rep.psi_minus
        + &rep.e * &rep.e;
    rep.graded(&m)
}

/// Two-slot Casimir
/// `Ω_ij = N_i E_j + E_i N_j + ψ⁻_i ψ⁺_j − ψ⁺_i ψ⁻_j + E_i E_j` on the full tensor product.
pub fn tensor_casimir(factors: &[&ModuleRep], i: usize, j: usize) -> Result<GradedMatrix> {
    if i == j || i >= factors.len() || j >= factors.len() {
        return Err(KzError::InvalidInput(format!(
            "invalid slot pair ({i}, {j}) for {} factors",
            factors.len()
        )));
    }
    let pars: Vec<Vec<Parity>> = factors.iter().map(|f| f.parities.clone()).collect();
    let slot = |x: &CMat, s: usize| act_in_slot(x, s, &pars).map(|g| g.mat);
    let (a, b) = (factors[i], factors[j]);
    let m = slot(&a.n, i)? * slot(&b.e, j)?
        + slot(&a.e, i)? * slot(&b.n, j)?
        + slot(&a.psi_minus, i)? * slot(&b.psi_plus, j)?
        - slot(&a.psi_plus, i)? * slot(&b.psi_minus, j)?
        + slot(&a.e, i)? * slot(&b.e, j)?;
    Ok(GradedMatrix {
        parities: crate::superlinalg::flatten_parities(&pars),
        mat: m,
    })
}

/// Named vectors of the projective module: `r, t, b, l`.
pub fn projective_vectors() -> [(char, CVec); 4] {
    let v = |a: [f64; 4]| CVec::from_iterator(4, a.iter().map(|&x| re(x)));
    [
        ('r', v([1.0, 0.0, 0.0, 0.0])),
        ('t', v([0.0, 1.0, 1.0, 0.0])),
        ('b', v([0.0, 0.5, -0.5, 0.0])),
        ('l', v([0.0, 0.0, 0.0, 1.0])),
    ]
}

/// Conformal weight `e(n + e/2)`; the Casimir on `T(e,n)` is twice this.
pub fn conformal_weight(spec: &ModuleSpec) -> C64 {
    spec.e * (spec.n + spec.e / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superlinalg::c;

    fn samples() -> Vec<ModuleSpec> {
        vec![
            ModuleSpec::typical(0.37, 0.21),
            ModuleSpec::typical(-0.6, 1.5),
            ModuleSpec::atypical(0.4),
            ModuleSpec::projective(-0.3),
            ModuleSpec::projective(0.8).reversed(),
            ModuleSpec::typical(0.2, -1.0).reversed(),
        ]
    }

    #[test]
    fn typical_matrices() {
        let r = build_module(&ModuleSpec::typical(0.3, 0.1)).unwrap();
        assert_eq!(r.n[(0, 0)], re(0.6));
        assert_eq!(r.n[(1, 1)], re(0.1 - 0.5));
        assert_eq!(r.psi_plus[(0, 1)], re(0.3));
        assert_eq!(r.psi_minus[(1, 0)], re(1.0));
        assert_eq!(r.parities, vec![Parity::Even, Parity::Odd]);
    }

    #[test]
    fn relations_hold() {
        for s in samples() {
            let r = build_module(&s).unwrap();
            assert!(r.relation_residual() < RELATION_TOL, "{s}");
            assert!(r.gradings_consistent(1e-14), "{s}");
            assert_eq!(r.dim(), s.dim());
            let q = build_qmodule_raw(&s, c(0.0, 1.1)).unwrap();
            assert!(q.relation_residual() < RELATION_TOL, "q {s}");
        }
    }

    #[test]
    fn typical_needs_nonzero_e() {
        let s = ModuleSpec {
            kind: Kind::Typical,
            e: re(0.0),
            n: re(1.0),
            parity_reversed: false,
        };
        assert!(build_module(&s).is_err());
    }

    #[test]
    fn quantum_typical_excluded() {
        let kappa = 0.7;
        let h = c(0.0, std::f64::consts::PI / kappa);
        assert!(matches!(
            build_qmodule_raw(&ModuleSpec::typical(kappa, 0.0), h),
            Err(KzError::ExcludedParameter(_))
        ));
    }

    #[test]
    fn casimir_values() {
        let a = build_module(&ModuleSpec::atypical(0.3)).unwrap();
        assert_eq!(max_abs(&casimir(&a).mat), 0.0);
        let s = ModuleSpec::typical(0.45, -0.3);
        let t = build_module(&s).unwrap();
        let w = conformal_weight(&s) * 2.0;
        assert!(max_abs(&(casimir(&t).mat - CMat::identity(2, 2) * w)) < 1e-15);
        let p = build_module(&ModuleSpec::projective(0.2)).unwrap();
        let cp = casimir(&p).mat;
        assert!(max_abs(&cp) > 0.1);
        assert!(max_abs(&(&cp * &cp)) < 1e-15);
        for s in samples() {
            let r = build_module(&s).unwrap();
            let cm = casimir(&r).mat;
            for (_, g) in r.generators() {
                assert!(max_abs(&(&cm * g - g * &cm)) < 1e-14);
            }
        }
    }

    #[test]
    fn parity_reversal_involution() {
        let r = build_module(&ModuleSpec::typical(0.3, 0.1)).unwrap();
        let rr = parity_reverse(&parity_reverse(&r));
        assert_eq!(rr.parities, r.parities);
        assert_eq!(rr.summands, r.summands);
        let a = parity_reverse(&build_module(&ModuleSpec::atypical(0.5)).unwrap());
        assert_eq!(a.parities, vec![Parity::Odd]);
        assert_eq!(a.n[(0, 0)], re(0.5));
    }

    #[test]
    fn duals_are_modules() {
        for s in samples() {
            let d = dual(&build_module(&s).unwrap()).unwrap();
            assert!(d.relation_residual() < RELATION_TOL, "{s}");
        }
    }

    #[test]
    fn atypical_pair_casimir_vanishes() {
        let a = build_module(&ModuleSpec::atypical(0.3)).unwrap();
        let b = build_module(&ModuleSpec::atypical(-1.0)).unwrap();
        assert_eq!(max_abs(&tensor_casimir(&[&a, &b], 0, 1).unwrap().mat), 0.0);
        assert!(tensor_casimir(&[&a, &b], 0, 0).is_err());
        assert!(tensor_casimir(&[&a, &b], 0, 2).is_err());
    }

    #[test]
    fn parse_specs() {
        let s: ModuleSpec = "T:1/3,-0.5".parse().unwrap();
        assert!((s.e.re - 1.0 / 3.0).abs() < 1e-15 && s.n.re == -0.5);
        let p: ModuleSpec = "Pi*P:2".parse().unwrap();
        assert!(p.parity_reversed && p.kind == Kind::Projective);
        assert!("T:0,1".parse::<ModuleSpec>().is_err());
        assert!("Q:1".parse::<ModuleSpec>().is_err());
        assert!("A:1/0".parse::<ModuleSpec>().is_err());
        let round: ModuleSpec = s.to_string().parse().unwrap();
        assert!(round.same_label(&s, 1e-15));
    }
}
