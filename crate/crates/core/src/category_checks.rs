//! Numeric checks of the braided tensor category axioms built from KZ associators.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gl11_modules::ModuleRep;
use crate::kz_engine::{associator, braiding, KzSystem};
use crate::superlinalg::{inverse, kron, max_abs, op_norm, CMat, C64};
use crate::tensor_ring::{tensor_all, tensor_product};

/// Default pass threshold for composite axioms.
pub const AXIOM_TOL: f64 = 1e-8;
/// Pass threshold for equivariance.
pub const EQUIVARIANCE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Axiom {
    Pentagon,
    HexagonPlus,
    HexagonMinus,
    BetaInverse,
    BetaBraid,
    Equivariance,
    Unitality,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub operands: Vec<String>,
    /// Operator norm of `LHS − RHS`.
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl AxiomReport {
    fn new(axiom: Axiom, operands: &[&ModuleRep], residual: f64, tolerance: f64) -> Self {
        AxiomReport {
            axiom,
            operands: operands.iter().map(|m| m.label()).collect(),
            residual,
            tolerance,
            passed: residual.is_finite() && residual < tolerance,
        }
    }
}

fn eye(m: &ModuleRep) -> CMat {
    CMat::identity(m.dim(), m.dim())
}

/// `α_{X,Y,Z}: (X⊗Y)⊗Z → X⊗(Y⊗Z)` in the flattened basis.
pub fn assoc(x: &ModuleRep, y: &ModuleRep, z: &ModuleRep, kappa: C64, order: usize) -> Result<CMat> {
    let sys = KzSystem::new([x, y, z], kappa)?;
    Ok(associator(&sys, order)?.matrix)
}

/// `α_{1,2,34}α_{12,3,4}` against `(1⊗α_{234})α_{1,23,4}(α_{123}⊗1)`.
pub fn pentagon_residual(v: [&ModuleRep; 4], kappa: C64, order: usize) -> Result<AxiomReport> {
    let [a, b, c, d] = v;
    let ab = tensor_product(a, b)?;
    let bc = tensor_product(b, c)?;
    let cd = tensor_product(c, d)?;
    let lhs = assoc(a, b, &cd, kappa, order)? * assoc(&ab, c, d, kappa, order)?;
    let rhs = kron(&eye(a), &assoc(b, c, d, kappa, order)?)
        * assoc(a, &bc, d, kappa, order)?
        * kron(&assoc(a, b, c, kappa, order)?, &eye(d));
    Ok(AxiomReport::new(Axiom::Pentagon, &v, op_norm(&(lhs - rhs)), AXIOM_TOL))
}

/// `α_{231}σ_{1,23}α_{123}` against `(1⊗σ_{13})α_{213}(σ_{12}⊗1)` with `σ^{±}`.
pub fn hexagon_residual(v: [&ModuleRep; 3], kappa: C64, sign: f64, order: usize) -> Result<AxiomReport> {
    let [a, b, c] = v;
    let bc = tensor_product(b, c)?;
    let lhs = assoc(b, c, a, kappa, order)? * braiding(a, &bc, kappa, sign)? * assoc(a, b, c, kappa, order)?;
    let rhs = kron(&eye(b), &braiding(a, c, kappa, sign)?)
        * assoc(b, a, c, kappa, order)?
        * kron(&braiding(a, b, kappa, sign)?, &eye(c));
    let axiom = if sign > 0.0 { Axiom::HexagonPlus } else { Axiom::HexagonMinus };
    Ok(AxiomReport::new(axiom, &v, op_norm(&(lhs - rhs)), AXIOM_TOL))
}

/// `max_x ‖α Δ(x) − Δ(x) α‖` for an endomorphism of `⊗ factors`.
pub fn equivariance_residual(alpha: &CMat, factors: &[&ModuleRep]) -> Result<AxiomReport> {
    let total = tensor_all(factors)?;
    let r = total
        .generators()
        .iter()
        .map(|(_, g)| max_abs(&(alpha * *g - *g * alpha)))
        .fold(0.0, f64::max);
    Ok(AxiomReport::new(Axiom::Equivariance, factors, r, EQUIVARIANCE_TOL))
}

/// `max_x ‖σ Δ_{AB}(x) − Δ_{BA}(x) σ‖` for a map `a ⊗ b → b ⊗ a`.
pub fn braiding_equivariance(sigma: &CMat, a: &ModuleRep, b: &ModuleRep) -> Result<AxiomReport> {
    let ab = tensor_product(a, b)?;
    let ba = tensor_product(b, a)?;
    let r = ab
        .generators()
        .iter()
        .zip(ba.generators().iter())
        .map(|((_, x), (_, y))| max_abs(&(sigma * *x - *y * sigma)))
        .fold(0.0, f64::max);
    Ok(AxiomReport::new(Axiom::Equivariance, &[a, b], r, EQUIVARIANCE_TOL))
}

/// `β^±_{X,Y,Z} = α_{YXZ}(σ^±_{XY}⊗1)α_{XYZ}⁻¹ : X⊗(Y⊗Z) → Y⊗(X⊗Z)`.
pub fn beta(x: &ModuleRep, y: &ModuleRep, z: &ModuleRep, kappa: C64, sign: f64, order: usize) -> Result<CMat> {
    let right = inverse(&assoc(x, y, z, kappa, order)?)?;
    Ok(assoc(y, x, z, kappa, order)? * kron(&braiding(x, y, kappa, sign)?, &eye(z)) * right)
}

/// `β^∓_{YXZ}β^±_{XYZ} = Id`, worst over both signs.
pub fn beta_inverse_residual(v: [&ModuleRep; 3], kappa: C64, order: usize) -> Result<AxiomReport> {
    let [x, y, z] = v;
    let mut worst: f64 = 0.0;
    for sign in [1.0, -1.0] {
        let prod = beta(y, x, z, kappa, -sign, order)? * beta(x, y, z, kappa, sign, order)?;
        let n = prod.nrows();
        worst = worst.max(op_norm(&(prod - CMat::identity(n, n))));
    }
    Ok(AxiomReport::new(Axiom::BetaInverse, &v, worst, AXIOM_TOL))
}

/// `β₁₂β₂₃β₁₂ = β₂₃β₁₂β₂₃` on `X⊗(Y⊗(Z⊗U))`, each `β` taken at the objects it meets.
pub fn beta_braid_residual(v: [&ModuleRep; 4], kappa: C64, sign: f64, order: usize) -> Result<AxiomReport> {
    let [a, b, c, d] = v;
    let b12 = |p: &ModuleRep, q: &ModuleRep, r: &ModuleRep, s: &ModuleRep| -> Result<CMat> {
        beta(p, q, &tensor_product(r, s)?, kappa, sign, order)
    };
    let b23 = |p: &ModuleRep, q: &ModuleRep, r: &ModuleRep, s: &ModuleRep| -> Result<CMat> {
        Ok(kron(&eye(p), &beta(q, r, s, kappa, sign, order)?))
    };
    let lhs = b12(b, c, a, d)? * b23(b, a, c, d)? * b12(a, b, c, d)?;
    let rhs = b23(c, a, b, d)? * b12(a, c, b, d)? * b23(a, b, c, d)?;
    Ok(AxiomReport::new(Axiom::BetaBraid, &v, op_norm(&(lhs - rhs)), AXIOM_TOL))
}

/// Triangle identity with a trivial middle object: `‖α_{X,1,Z} − Id‖`.
pub fn unitality_residual(x: &ModuleRep, unit: &ModuleRep, z: &ModuleRep, kappa: C64, order: usize) -> Result<AxiomReport> {
    let a = assoc(x, unit, z, kappa, order)?;
    let n = a.nrows();
    Ok(AxiomReport::new(
        Axiom::Unitality,
        &[x, unit, z],
        op_norm(&(a - CMat::identity(n, n))),
        1e-13,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gl11_modules::build_module;
    use crate::kz_engine::DEFAULT_ORDER_CAP;
    use crate::superlinalg::re;

    fn rep(s: &str) -> ModuleRep {
        build_module(&s.parse().unwrap()).unwrap()
    }

    const K: usize = DEFAULT_ORDER_CAP;

    #[test]
    fn pentagon_mixed() {
        let v = [rep("T:0.37,0"), rep("T:0.21,0.5"), rep("P:0.3"), rep("T:-0.13,1")];
        let r = pentagon_residual([&v[0], &v[1], &v[2], &v[3]], re(1.0), K).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn pentagon_trivial_with_atypicals() {
        let v = [rep("A:0.2"), rep("T:0.21,0.5"), rep("T:0.33,-1"), rep("A:0")];
        let r = pentagon_residual([&v[0], &v[1], &v[2], &v[3]], re(1.3), K).unwrap();
        assert!(r.residual < 1e-13, "{r:?}");
    }

    #[test]
    fn hexagons() {
        let v = [rep("T:0.37,0.1"), rep("T:0.21,-0.5"), rep("P:0.2")];
        for sign in [1.0, -1.0] {
            let r = hexagon_residual([&v[0], &v[1], &v[2]], re(1.1), sign, K).unwrap();
            assert!(r.passed, "{r:?}");
        }
        let w = [rep("T:0.37,0.1"), rep("A:0.4"), rep("T:0.21,-0.5")];
        let r = hexagon_residual([&w[0], &w[1], &w[2]], re(1.1), 1.0, K).unwrap();
        assert!(r.residual < 1e-10, "{r:?}");
    }

    #[test]
    fn betas() {
        let v = [rep("T:0.37,0.1"), rep("T:0.21,-0.5"), rep("T:0.16,0.3"), rep("A:0.5")];
        let r = beta_inverse_residual([&v[0], &v[1], &v[2]], re(0.9), K).unwrap();
        assert!(r.passed, "{r:?}");
        let r = beta_braid_residual([&v[0], &v[1], &v[2], &v[3]], re(0.9), 1.0, K).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn equivariance_and_unit() {
        let v = [rep("T:0.37,0.1"), rep("P:0.4"), rep("T:-0.2,1")];
        let a = assoc(&v[0], &v[1], &v[2], re(1.0), K).unwrap();
        assert!(equivariance_residual(&a, &[&v[0], &v[1], &v[2]]).unwrap().passed);
        let s = braiding(&v[0], &v[1], re(1.0), 1.0).unwrap();
        assert!(braiding_equivariance(&s, &v[0], &v[1]).unwrap().residual < 1e-10);
        let u = unitality_residual(&v[0], &rep("A:0"), &v[2], re(1.0), K).unwrap();
        assert!(u.passed, "{u:?}");
    }
}
