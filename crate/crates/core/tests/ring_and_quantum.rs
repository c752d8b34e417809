use kzdk_core::gl11_modules::{build_module, ModuleSpec};
use kzdk_core::quantum_gl11::{build_qmodule, dk_compare, h_of_kappa, qdecompose, quasitriangularity_residual};
use kzdk_core::superlinalg::{re, C64};
use kzdk_core::tensor_ring::{decompose, same_multiset, same_multiset_up_to_parity, quoted_ring_line};
use kzdk_core::KzError;

fn pool() -> Vec<ModuleSpec> {
    vec![
        ModuleSpec::typical(0.37, 0.25),
        ModuleSpec::typical(-0.22, -1.1),
        ModuleSpec::atypical(0.6),
        ModuleSpec::projective(-0.4),
    ]
}

#[test]
fn classical_and_quantum_rings_agree() {
    let kappa = C64::new(1.4, 0.3);
    let h = h_of_kappa(kappa);
    for x in pool() {
        for y in pool() {
            let cl = decompose(&build_module(&x).unwrap(), &build_module(&y).unwrap(), kappa).unwrap();
            let qu = qdecompose(&build_qmodule(&x, h).unwrap(), &build_qmodule(&y, h).unwrap()).unwrap();
            assert!(same_multiset(&cl.labels(), &qu.labels()), "{x} {y}");
            assert!(same_multiset_up_to_parity(&cl.labels(), &quoted_ring_line(&x, &y)), "{x} {y}");
            let dim: usize = cl.summands.iter().map(|(s, m)| build_module(s).unwrap().dim() * m).sum();
            assert_eq!(dim, build_module(&x).unwrap().dim() * build_module(&y).unwrap().dim());
            assert!(cl.certificate_residual < 1e-9 && qu.certificate_residual < 1e-9);
        }
    }
}

#[test]
fn braiding_spectra_correspond() {
    let kappa = re(1.7);
    for x in pool() {
        for y in pool() {
            assert!(dk_compare(&x, &y, kappa).unwrap().matched(), "{x} {y}");
        }
    }
}

#[test]
fn cabling_identities_on_mixed_triple() {
    let h = h_of_kappa(re(1.2));
    let q: Vec<_> = pool()[..3].iter().map(|s| build_qmodule(s, h).unwrap()).collect();
    let r = quasitriangularity_residual(&q[0], &q[1], &q[2]).unwrap();
    assert!(r.left_cabling < 1e-11 && r.right_cabling < 1e-11 && r.intertwining < 1e-11);
}

#[test]
fn resonant_pair_is_rejected() {
    let x = ModuleSpec::typical(0.5, 0.0);
    let err = decompose(&build_module(&x).unwrap(), &build_module(&x).unwrap(), re(1.0)).unwrap_err();
    assert!(matches!(err, KzError::ExcludedParameter(_)));
}
