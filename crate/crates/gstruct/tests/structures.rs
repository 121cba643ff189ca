//! Torsion-class identities, representation projections, solitons and the
//! error paths of the structure and reduction modules.

mod common;

use common::*;
use gstruct::exterior::{default_labels, KForm, VectorField};
use gstruct::g_structures::{model_g2, Component, Forms, GStructure, StructureError, TorsionClasses};
use gstruct::reduction::{central_extend, reduce_g2, ExtensionInput, ReductionError};
use gstruct::scalar::Scalar;
use gstruct::soliton::{
    g2_rigidity_identity, grs_residual, spin7_dilatino_residual, string_grs_residual, weighted_scalar, SolitonData,
    SolitonError,
};
use rand::Rng;

const FIXTURES: [&str; 6] =
    ["nonintsu3", "nonintG2", "nonintG2nonclosedLee", "nonintSpin7OneA", "nonintSpin7TwoCompleted", "nonintG2reduced"];

fn transported(s: &GStructure<E>, r: &mut impl Rng) -> (GStructure<E>, gstruct::linalg::Mat<E>) {
    let fr = s.space().frame();
    let n = fr.dim();
    let a = random_orthogonal(n, r);
    let (fr2, m) = fr.change_coframe(&a, default_labels(n)).unwrap();
    let sp = full(fr2);
    let t = |f: &KForm<E>| f.substitute(&m);
    let s2 = match s.forms() {
        Forms::SU3 { omega, omega_plus, .. } => GStructure::su3(sp, t(omega), t(omega_plus)),
        Forms::G2 { phi, .. } => GStructure::g2(sp, t(phi)),
        Forms::Spin7 { psi } => GStructure::spin7(sp, t(psi)),
        Forms::AlmostHermitian { omega } => GStructure::almost_hermitian(sp, t(omega)),
    };
    (s2.unwrap(), m)
}

#[test]
fn torsion_is_frame_equivariant() {
    let mut r = rng(31);
    for name in FIXTURES {
        let s = structure(name);
        let before = s.torsion().unwrap().components();
        for _ in 0..5 {
            let (s2, m) = transported(&s, &mut r);
            let after = s2.torsion().unwrap().components();
            for ((key, a), (_, b)) in before.iter().zip(&after) {
                match (a, b) {
                    (Component::Scalar(x), Component::Scalar(y)) => assert_eq!(x, y, "{name} {key}"),
                    (Component::Form(x), Component::Form(y)) => assert_eq!(&x.substitute(&m), y, "{name} {key}"),
                    _ => unreachable!(),
                }
            }
        }
    }
}

#[test]
fn g2_two_form_projection() {
    let mut r = rng(32);
    for name in ["nonintG2", "nonintG2nonclosedLee"] {
        let s = structure(name);
        let Forms::G2 { phi, .. } = s.forms() else { unreachable!() };
        let sp = s.space();
        for _ in 0..10 {
            let a = random_form(7, 2, 0.5, &mut r);
            let parts = s.project(&a).unwrap();
            let (seven, fourteen) = (&parts[0].1, &parts[1].1);
            assert_eq!(seven.wedge(phi), sp.star(seven).scale(&E::from_i64(2)));
            assert_eq!(fourteen.wedge(phi), -sp.star(fourteen));
            assert_eq!(seven + fourteen, a);
        }
    }
}

#[test]
fn spin7_lee_form_re_extracts_to_zero() {
    for name in ["nonintSpin7OneA", "nonintSpin7TwoCompleted"] {
        let s = structure(name);
        let Forms::Spin7 { psi } = s.forms() else { unreachable!() };
        let TorsionClasses::Spin7 { theta, zeta5 } = s.torsion().unwrap() else { unreachable!() };
        let sp = s.space();
        assert_eq!(zeta5, sp.d(psi) - theta.wedge(psi));
        let again = sp.star(&sp.star(&zeta5).wedge(psi)).scale(&q(-1, 7));
        assert!(again.is_zero(), "{name}");
    }
}

#[test]
fn g2_torsion_pairs_with_phi_to_seven_sixths_tau0() {
    let mut r = rng(33);
    for name in ["nonintG2", "nonintG2nonclosedLee"] {
        let s0 = structure(name);
        let mut cases = vec![s0.clone()];
        cases.extend((0..3).map(|_| transported(&s0, &mut r).0));
        for s in cases {
            let Forms::G2 { phi, .. } = s.forms() else { unreachable!() };
            let TorsionClasses::G2 { tau0, .. } = s.torsion().unwrap() else { unreachable!() };
            let h = s.bismut_torsion().unwrap();
            assert_eq!(s.space().inner(&h, phi), tau0 * q(7, 6), "{name}");
        }
    }
}

/// A rotated model φ on a Heisenberg algebra generically has τ₂ ≠ 0.
#[test]
fn nonzero_tau2_rejects_both_routes() {
    let mut r = rng(34);
    let fr = heisenberg_plus(7);
    let s = (0..50)
        .map(|_| GStructure::g2(full(fr.clone()), rotate(&model_g2(), &random_orthogonal(7, &mut r))).unwrap())
        .find(|s| matches!(s.torsion().unwrap(), TorsionClasses::G2 { ref tau2, .. } if !tau2.is_zero()))
        .expect("a twisted structure with τ₂ ≠ 0");
    assert_eq!(s.bismut_torsion(), Err(StructureError::Tau2Nonzero));
    assert_eq!(s.solve_skew_torsion(), Err(StructureError::NoSolution));
}

#[test]
fn g2_rigidity_identity_cases() {
    let flat = GStructure::g2(full(frame(7, &[])), model_g2()).unwrap();
    let zero = KForm::zero(7, 1);
    assert_eq!(g2_rigidity_identity(&flat, &zero).unwrap(), (E::zero(), E::zero()));
    let s = structure("nonintG2");
    assert!(matches!(g2_rigidity_identity(&s, &zero), Err(SolitonError::Precondition(_))));
    let su3 = structure("nonintsu3");
    assert!(matches!(g2_rigidity_identity(&su3, &KForm::zero(6, 1)), Err(SolitonError::Precondition(_))));
}

#[test]
fn grs_residual_is_affine_in_x() {
    let mut r = rng(35);
    for name in FIXTURES {
        let s = structure(name);
        let n = s.space().dim();
        let h = s.bismut_torsion().unwrap();
        let res = |x: VectorField<E>| grs_residual(&SolitonData::new(s.space().clone(), h.clone(), x)).unwrap();
        for _ in 0..3 {
            let (x1, x2) = (random_vector(n, &mut r), random_vector(n, &mut r));
            let lhs = res(x1.add(&x2)).sub(&res(x1)).sub(&res(x2)).add(&res(VectorField::zero(n)));
            assert!(lhs.is_zero(), "{name}");
        }
    }
}

#[test]
fn string_residual_without_flux_is_the_grs_residual() {
    let mut r = rng(36);
    for name in FIXTURES {
        let s = structure(name);
        let n = s.space().dim();
        let h = s.bismut_torsion().unwrap();
        let data = SolitonData::new(s.space().clone(), h, random_vector(n, &mut r)).with_flux(KForm::zero(n, 2));
        let (first, _, _) = string_grs_residual(&data).unwrap();
        assert_eq!(first, grs_residual(&data).unwrap());
    }
}

#[test]
fn lee_vector_solves_the_soliton_equations() {
    for name in ["nonintG2", "nonintG2nonclosedLee", "nonintSpin7OneA", "nonintSpin7TwoCompleted"] {
        let s = structure(name);
        let sp = s.space();
        let h = s.bismut_torsion().unwrap();
        assert!(sp.d(&h).is_zero(), "{name}");
        let x = sp.sharp(&s.lee_form().unwrap().scale(&s.lee_weight()));
        assert!(grs_residual(&SolitonData::new(sp.clone(), h, x)).unwrap().is_zero(), "{name}");
        if name.contains("Spin7") {
            assert_eq!(spin7_dilatino_residual(&s).unwrap(), (E::zero(), true));
        }
    }
}

/// On a bi-invariant algebra R = ¼Σ|[e_i, e_j]|² = (3/2)|H|² for the Cartan form.
#[test]
fn weighted_scalar_on_bi_invariant_algebras() {
    for n in 6..=8 {
        let fr = bi_invariant(n);
        let h = cartan(&fr);
        let data = SolitonData::new(full(fr), h, VectorField::zero(n));
        assert_eq!(weighted_scalar(&data).unwrap(), q(17, 6));
    }
}

#[test]
fn extension_requires_half_sigma0() {
    let s = structure("nonintG2reduced");
    let scaled = s.rebuild(full(s.space().frame().rescale(&E::from_i64(2)))).unwrap();
    let TorsionClasses::SU3 { sigma0, .. } = scaled.torsion().unwrap() else { unreachable!() };
    assert_eq!(sigma0, q(1, 4));
    let input = ExtensionInput { structure: scaled, flux: KForm::zero(6, 2), df: KForm::zero(6, 1) };
    assert!(matches!(central_extend(&input), Err(ReductionError::Hypotheses(_))));
    let ok = ExtensionInput { structure: s, flux: KForm::zero(6, 2), df: KForm::zero(6, 1) };
    let up = central_extend(&ok).unwrap();
    assert!(reduce_g2(&up.structure, &KForm::zero(7, 1)).unwrap().all_passed());
}
