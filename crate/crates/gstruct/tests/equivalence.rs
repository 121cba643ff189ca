//! bismut_torsion against solve_skew_torsion on fixtures and random structures.

mod common;

use common::laws::{compare, equivalence_run, Agreement};
use common::structure;
use gstruct::g_structures::Kind;

#[test]
fn fixtures_agree() {
    for name in ["nonintsu3", "nonintG2", "nonintG2nonclosedLee", "nonintSpin7OneA", "nonintSpin7TwoCompleted", "nonintG2reduced"] {
        assert_eq!(compare(&structure(name)), Ok(Agreement::Equal), "{name}");
    }
}

#[test]
fn random_almost_hermitian() {
    let (equal, _) = equivalence_run(Kind::AlmostHermitian, 6, 1).unwrap();
    assert!(equal >= 66);
}

#[test]
fn random_su3() {
    let (equal, _) = equivalence_run(Kind::SU3, 6, 2).unwrap();
    assert!(equal >= 66);
}

#[test]
fn random_g2() {
    let (equal, _) = equivalence_run(Kind::G2, 7, 3).unwrap();
    assert!(equal >= 66);
}

#[test]
fn random_spin7() {
    let (equal, _) = equivalence_run(Kind::Spin7, 8, 4).unwrap();
    assert!(equal >= 66);
}
