//! Property bodies shared by the proptest suite and the acceptance runner.
//! Each law draws its instance from `seed` and reports the first violation.

use super::*;
use gstruct::exterior::FrameGeometry;
use gstruct::g_structures::{model_form, Forms, Kind, StructureError};
use gstruct::lie_frame::RicciTrace;
use gstruct::reduction::{central_extend, quotient_input, reduce_g2, reduce_pair, reduce_spin7, splitting_check, ExtensionInput};

pub type Law = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn sign(k: usize) -> E {
    if k % 2 == 0 { E::one() } else { -E::one() }
}

pub fn wedge_graded(seed: u64, n: usize) -> Law {
    let mut r = rng(seed);
    let (ka, kb) = (r.gen_range(0..=n), r.gen_range(0..=n));
    let a = random_form(n, ka, 0.4, &mut r);
    let b = random_form(n, kb, 0.4, &mut r);
    ensure!(a.wedge(&b) == b.wedge(&a).scale(&sign(ka * kb)), "a∧b for degrees {ka}, {kb}");
    Ok(())
}

pub fn interior_antiderivation(seed: u64, n: usize) -> Law {
    let mut r = rng(seed);
    let (ka, kb) = (r.gen_range(1..=n), r.gen_range(0..=n));
    let a = random_form(n, ka, 0.4, &mut r);
    let b = random_form(n, kb, 0.4, &mut r);
    let (x, y) = (random_vector(n, &mut r), random_vector(n, &mut r));
    let rhs = a.interior(&x).wedge(&b) + a.wedge(&b.interior(&x)).scale(&sign(ka));
    ensure!(a.wedge(&b).interior(&x) == rhs, "Leibniz rule");
    ensure!(a.interior(&x).interior(&y) == -a.interior(&y).interior(&x), "i_X i_Y = −i_Y i_X");
    Ok(())
}

pub fn d_squared(seed: u64, n: usize, pick: u8) -> Law {
    let mut r = rng(seed);
    let fr = frame_pool(n, pick, &mut r);
    let k = r.gen_range(0..n);
    let a = random_form(n, k, 0.3, &mut r);
    ensure!(fr.d(&fr.d(&a)).is_zero(), "d² ≠ 0 in degree {k}");
    ensure!(fr.d(&a) == Brackets::of(&fr).d(&Dense::from_kform(&a)).to_kform(), "d differs from the bracket formula");
    Ok(())
}

pub fn hodge(seed: u64, n: usize) -> Law {
    let mut r = rng(seed);
    let g = if r.gen_bool(0.5) { Mat::identity(n) } else { random_metric(n, &mut r) };
    let geom = FrameGeometry::new(g, (0..n).collect()).unwrap();
    let k = r.gen_range(0..=n);
    let a = random_form(n, k, 0.4, &mut r);
    let b = random_form(n, k, 0.4, &mut r);
    ensure!(geom.star(&geom.star(&a)) == a.scale(&sign(k * (n - k))), "⋆⋆ in degree {k}");
    ensure!(a.wedge(&geom.star(&b)) == geom.vol().scale(&geom.inner(&a, &b).unwrap()), "α∧⋆β in degree {k}");
    Ok(())
}

pub fn random_structure(kind: Kind, fr: LieAlgebraFrame<E>, r: &mut impl Rng) -> GStructure<E> {
    let n = fr.dim();
    let rot = random_orthogonal(n, r);
    let f: Vec<KForm<E>> = model_form(kind, n).unwrap().iter().map(|a| rotate(a, &rot)).collect();
    let sp = full(fr);
    match kind {
        Kind::AlmostHermitian => GStructure::almost_hermitian(sp, f[0].clone()),
        Kind::SU3 => GStructure::su3(sp, f[0].clone(), f[1].clone()),
        Kind::G2 => GStructure::g2(sp, f[0].clone()),
        Kind::Spin7 => GStructure::spin7(sp, f[0].clone()),
    }
    .expect("rotated model is valid")
}

pub const KINDS: [(Kind, usize); 4] = [(Kind::AlmostHermitian, 6), (Kind::SU3, 6), (Kind::G2, 7), (Kind::Spin7, 8)];

pub fn torsion_reconstructs(seed: u64, pick: u8, which: usize) -> Law {
    let mut r = rng(seed);
    let (kind, n) = KINDS[which];
    let fr = frame_pool(n, pick, &mut r);
    let s = random_structure(kind, fr, &mut r);
    let t = s.torsion().map_err(|e| e.to_string())?;
    for (i, (lhs, rhs)) in s.reconstruct(&t).into_iter().enumerate() {
        ensure!(lhs == rhs, "{kind}: equation {i} not reconstructed");
    }
    Ok(())
}

/// Outcome of comparing the closed-form and solved Bismut torsion.
#[derive(Debug, PartialEq)]
pub enum Agreement {
    Equal,
    BothRejected,
}

pub fn compare(s: &GStructure<E>) -> Result<Agreement, String> {
    match (s.bismut_torsion(), s.solve_skew_torsion()) {
        (Ok(a), Ok(b)) if a == b => Ok(Agreement::Equal),
        (Ok(a), Ok(b)) => Err(format!("closed form {a:?} ≠ solved {b:?}")),
        (Err(_), Err(StructureError::NoSolution)) => Ok(Agreement::BothRejected),
        (a, b) => Err(format!("routes disagree: {:?} vs {:?}", a.map(|_| ()), b.map(|_| ()))),
    }
}

/// 100 samples of one kind; two thirds on a bi-invariant algebra, where
/// skew torsion always exists. Returns (equal, both rejected).
pub fn equivalence_run(kind: Kind, n: usize, seed: u64) -> Result<(usize, usize), String> {
    let mut r = rng(seed);
    let (mut equal, mut rejected) = (0, 0);
    for i in 0..100 {
        let fr = if i % 3 == 2 { heisenberg_plus(n) } else { bi_invariant(n) };
        let s = random_structure(kind, fr, &mut r);
        match compare(&s).map_err(|e| format!("{kind} sample {i}: {e}"))? {
            Agreement::Equal => equal += 1,
            Agreement::BothRejected => rejected += 1,
        }
    }
    Ok((equal, rejected))
}

/// Orthogonal automorphism of su(2) ⊕ su(2) sitting at indices off..off+6.
pub fn su2su2_automorphism(n: usize, off: usize, r: &mut impl Rng) -> Mat<E> {
    let r1 = rational_rotation(3, r.gen_range(1..=2), r);
    let r2 = rational_rotation(3, r.gen_range(1..=2), r);
    let block = |i: usize| (i >= off && i < off + 6).then(|| (i - off) / 3);
    Mat::from_fn(n, n, |i, j| match (block(i), block(j)) {
        (Some(0), Some(0)) => r1[(i - off, j - off)].clone(),
        (Some(1), Some(1)) => r2[(i - off - 3, j - off - 3)].clone(),
        (None, None) if i == j => E::one(),
        _ => E::zero(),
    })
}

/// A fixture's structure pulled back by a random automorphism.
pub fn rotated_fixture(name: &str, off: usize, r: &mut impl Rng) -> GStructure<E> {
    let s = structure(name);
    let n = s.space().dim();
    let a = su2su2_automorphism(n, off, r);
    let sp = full(s.space().frame().clone());
    match s.forms() {
        Forms::G2 { phi, .. } => GStructure::g2(sp, rotate(phi, &a)),
        Forms::Spin7 { psi } => GStructure::spin7(sp, rotate(psi, &a)),
        Forms::SU3 { omega, omega_plus, .. } => GStructure::su3(sp, rotate(omega, &a), rotate(omega_plus, &a)),
        Forms::AlmostHermitian { omega } => GStructure::almost_hermitian(sp, rotate(omega, &a)),
    }
    .unwrap()
}

/// Strong-torsion pair (Cartan H on a bi-invariant algebra) along a random unit V.
pub fn reduction_reassembles(seed: u64, n: usize) -> Law {
    let mut r = rng(seed);
    let fr = bi_invariant(n);
    let h = cartan(&fr);
    let conn = fr.bismut(&h).unwrap();
    ensure!(fr.curvature(&conn, RicciTrace::First).is_flat(), "Cartan connection not flat");
    let o = rational_rotation(n, 3, &mut r);
    let v = VectorField::new((0..n).map(|i| o[(i, 0)].clone()).collect());
    let red = reduce_pair(&fr, &h, &v, false).map_err(|e| e.to_string())?;
    let (g, hh) = red.reassemble();
    ensure!(g == Mat::identity(n), "g ≠ μ⊗μ + ĝ");
    ensure!(hh == h, "H ≠ μ∧F + Ĥ");
    ensure!(red.anomaly.is_zero(), "dĤ + F∧F = {:?}", red.anomaly);
    ensure!(red.basic, "Ĥ not basic");
    // without a G-structure only these implications are forced
    let sp = splitting_check(&red);
    ensure!(sp.dmu_zero == sp.parallel_mu, "{sp:?}");
    ensure!(!sp.dmu_zero || sp.dh_hat_zero, "{sp:?}");
    Ok(())
}

pub fn g2_verifier_on_rotated_example(seed: u64) -> Law {
    let mut r = rng(seed);
    let s = rotated_fixture("nonintG2", 0, &mut r);
    let red = reduce_g2(&s, &KForm::zero(7, 1)).map_err(|e| e.to_string())?;
    for c in &red.checks {
        ensure!(c.passed(), "{}", c.name);
    }
    ensure!(splitting_check(&red).splits(), "splitting");
    Ok(())
}

pub fn extend_then_reduce(seed: u64) -> Law {
    let mut r = rng(seed);
    let base = structure("nonintG2reduced");
    let Forms::SU3 { omega, omega_plus, .. } = base.forms() else { unreachable!() };
    let a = su2su2_automorphism(6, 0, &mut r);
    let (w, wp) = (rotate(omega, &a), rotate(omega_plus, &a));
    let s = GStructure::su3(full(base.space().frame().clone()), w.clone(), wp.clone()).unwrap();
    let input = ExtensionInput { structure: s, flux: KForm::zero(6, 2), df: KForm::zero(6, 1) };
    let up = central_extend(&input).map_err(|e| e.to_string())?;
    ensure!(up.structure.space().d(&up.h).is_zero(), "extension not strong");
    let red = reduce_g2(&up.structure, &KForm::zero(7, 1)).map_err(|e| e.to_string())?;
    ensure!(red.anomaly.is_zero(), "anomaly");
    let back = quotient_input(&red, default_labels(7)).map_err(|e| e.to_string())?;
    let Forms::SU3 { omega: w2, omega_plus: wp2, .. } = back.structure.forms() else { unreachable!() };
    ensure!(*w2 == w && *wp2 == wp, "forms not recovered");
    ensure!(back.flux.is_zero(), "flux not recovered");
    Ok(())
}

pub fn splitting_equivalent(seed: u64, which: usize) -> Law {
    let mut r = rng(seed);
    let (name, off) = [("nonintG2", 0), ("nonintG2nonclosedLee", 0), ("nonintSpin7OneA", 1)][which];
    let s = rotated_fixture(name, off, &mut r);
    let red = match s.kind() {
        Kind::G2 => reduce_g2(&s, &KForm::zero(7, 1)),
        _ => reduce_spin7(&s, &KForm::zero(8, 1)),
    }
    .map_err(|e| e.to_string())?;
    let sp = splitting_check(&red);
    ensure!(sp.equivalent(), "{name}: {sp:?}");
    ensure!(sp.splits() == (which == 0), "{name}: {sp:?}");
    ensure!(red.anomaly.is_zero(), "{name}: anomaly");
    Ok(())
}
