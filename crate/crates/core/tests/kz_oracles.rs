use kzdk_core::gl11_modules::{build_module, tensor_casimir, ModuleSpec};
use kzdk_core::kz_engine::{associator, associator_pexp, frame, KzSystem, Point};
use kzdk_core::superlinalg::{op_norm, re, CMat, CVec, C64};

fn rhs(o12: &CMat, o23: &CMat, kappa: C64, x: f64, f: &CVec) -> CVec {
    (o12 * f / re(x) + o23 * f / re(x - 1.0)) / kappa
}

/// Plain RK4 for `κf' = (Ω₁₂/x + Ω₂₃/(x−1))f` on the real segment.
fn integrate(o12: &CMat, o23: &CMat, kappa: C64, f0: CVec, from: f64, to: f64, steps: usize) -> CVec {
    let h = (to - from) / steps as f64;
    let mut f = f0;
    for k in 0..steps {
        let x = from + h * k as f64;
        let k1 = rhs(o12, o23, kappa, x, &f);
        let k2 = rhs(o12, o23, kappa, x + h / 2.0, &(&f + &k1 * re(h / 2.0)));
        let k3 = rhs(o12, o23, kappa, x + h / 2.0, &(&f + &k2 * re(h / 2.0)));
        let k4 = rhs(o12, o23, kappa, x + h, &(&f + &k3 * re(h)));
        f += (k1 + k2 * re(2.0) + k3 * re(2.0) + k4) * re(h / 6.0);
    }
    f
}

fn triple(specs: &[ModuleSpec; 3]) -> Vec<kzdk_core::gl11_modules::ModuleRep> {
    specs.iter().map(|s| build_module(s).unwrap()).collect()
}

#[test]
fn series_frames_agree_with_direct_integration() {
    let kappa = C64::new(1.3, 0.2);
    let cases = [
        [ModuleSpec::typical(0.31, 0.2), ModuleSpec::typical(0.17, -0.6), ModuleSpec::projective(0.4)],
        [ModuleSpec::projective(0.1), ModuleSpec::typical(0.23, 0.5), ModuleSpec::projective(-0.7)],
        [ModuleSpec::typical(0.41, 0.0), ModuleSpec::typical(-0.41, 1.1), ModuleSpec::typical(0.12, -0.3)],
    ];
    for specs in &cases {
        let r = triple(specs);
        let refs = [&r[0], &r[1], &r[2]];
        let o12 = tensor_casimir(&refs, 0, 1).unwrap().mat;
        let o23 = tensor_casimir(&refs, 1, 2).unwrap().mat;
        let sys = KzSystem::new(refs, kappa).unwrap();
        for (point, a, b) in [(Point::Zero, 0.2, 0.6), (Point::One, 0.8, 0.4)] {
            for sol in frame(&sys, point, 60).unwrap() {
                let start = sol.eval(re(a));
                let end = integrate(&o12, &o23, kappa, start.clone(), a, b, 4000);
                let err = (end - sol.eval(re(b))).norm() / start.norm();
                assert!(err < 1e-9, "{specs:?} {point:?}: {err:e}");
            }
        }
    }
}

#[test]
fn atypical_third_factor_gives_product_solutions() {
    // Ω₂₃ is the scalar e₂n₃ on T ⊗ A, so every solution is x^{λ/κ}(1−x)^{e₂n₃/κ}v.
    let kappa = re(0.9);
    let specs = [ModuleSpec::typical(0.37, 0.4), ModuleSpec::typical(0.21, -0.5), ModuleSpec::atypical(0.8)];
    let r = triple(&specs);
    let sys = KzSystem::new([&r[0], &r[1], &r[2]], kappa).unwrap();
    let c = specs[1].e * specs[2].n;
    for sol in frame(&sys, Point::Zero, 60).unwrap() {
        let lead = sol.exponent / kappa;
        let normalized = |x: f64| sol.eval(re(x)) / ((re(x).ln() * lead).exp() * (re(1.0 - x).ln() * c / kappa).exp());
        let v = normalized(0.1);
        for x in [0.3, 0.5] {
            let err = (normalized(x) - &v).norm() / v.norm();
            assert!(err < 1e-11, "x = {x}: {err:e}");
        }
    }
    let a = associator(&sys, 60).unwrap().matrix;
    let n = a.nrows();
    assert!(op_norm(&(a - CMat::identity(n, n))) < 1e-13);
}

#[test]
fn endpoint_corrected_pexp_matches_frames() {
    let kappa = re(1.0);
    let specs = [ModuleSpec::typical(0.3, 0.0), ModuleSpec::typical(0.2, 0.0), ModuleSpec::projective(0.0)];
    let r = triple(&specs);
    let sys = KzSystem::new([&r[0], &r[1], &r[2]], kappa).unwrap();
    let a = associator(&sys, 60).unwrap().matrix;
    let p = associator_pexp(&sys, 1e-4, 20_000).unwrap();
    assert!(op_norm(&(&a - &p.corrected)) < 1e-6);
    assert!(op_norm(&(&a - &p.bare)) > op_norm(&(&a - &p.corrected)));
}
