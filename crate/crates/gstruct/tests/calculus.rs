//! Connections, curvature and the float backend against direct computation.

mod common;

use common::*;
use gstruct::exterior::{FrameGeometry, VectorField};
use gstruct::lie_frame::{ConnectionCoeffs, LieAlgebraFrame, RicciTrace};
use gstruct::linalg::LinearSystem;
use gstruct::scalar::{Float, Scalar};
use rand::Rng;

fn with_random_metric(fr: LieAlgebraFrame<E>, r: &mut impl Rng) -> LieAlgebraFrame<E> {
    let n = fr.dim();
    let g = random_metric(n, r);
    fr.with_geometry(FrameGeometry::new(g, (0..n).collect()).unwrap()).unwrap()
}

fn small_frames(r: &mut impl Rng) -> Vec<LieAlgebraFrame<E>> {
    let mut out = vec![];
    for n in 3..=6 {
        for pick in 0..3u8 {
            let fr = frame_pool(n, pick, r);
            out.push(fr.clone());
            out.push(with_random_metric(fr, r));
        }
    }
    out
}

/// Γ^k_ij with Γ^k_ij − Γ^k_ji = c^k_ij and ∇g = 0, solved as a linear system.
fn solve_torsion_free_metric(fr: &LieAlgebraFrame<E>) -> (Vec<E>, usize) {
    let n = fr.dim();
    let g = fr.geometry().metric();
    let var = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
    let mut sys = LinearSystem::new(n * n * n);
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..n {
                sys.push([(var(i, j, k), E::one()), (var(j, i, k), -E::one())], fr.structure_constant(k, i, j).clone());
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in j..n {
                let mut row = vec![];
                for m in 0..n {
                    row.push((var(i, j, m), g[(m, k)].clone()));
                    row.push((var(i, k, m), g[(j, m)].clone()));
                }
                sys.push(row, E::zero());
            }
        }
    }
    let sol = sys.solve().expect("consistent");
    (sol.particular, sol.nullspace.len())
}

#[test]
fn levi_civita_is_the_unique_torsion_free_metric_connection() {
    let mut r = rng(21);
    for fr in small_frames(&mut r) {
        let n = fr.dim();
        let (gamma, free) = solve_torsion_free_metric(&fr);
        assert_eq!(free, 0);
        let lc = fr.levi_civita();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    assert_eq!(*lc.get(i, j, k), gamma[(i * n + j) * n + k]);
                }
            }
        }
    }
}

#[test]
fn bismut_torsion_round_trips() {
    let mut r = rng(22);
    for fr in small_frames(&mut r) {
        for _ in 0..4 {
            let h = random_form(fr.dim(), 3, 0.5, &mut r);
            let conn = fr.bismut(&h).unwrap();
            assert_eq!(fr.torsion_form(&conn), Some(h));
        }
    }
}

fn torsion_tensor(fr: &LieAlgebraFrame<E>, conn: &ConnectionCoeffs<E>) -> Vec<E> {
    let n = fr.dim();
    let mut t = vec![E::zero(); n * n * n];
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                t[(i * n + j) * n + l] =
                    conn.get(i, j, l).clone() - conn.get(j, i, l).clone() - fr.structure_constant(l, i, j).clone();
            }
        }
    }
    t
}

/// 𝔖 R(X,Y)Z = 𝔖 [T(T(X,Y),Z) + (∇_X T)(Y,Z)], every index spelled out.
#[test]
fn first_bianchi_defect_matches_torsion_terms() {
    let mut r = rng(23);
    for fr in small_frames(&mut r) {
        let n = fr.dim();
        let h = random_form(n, 3, 0.5, &mut r);
        let conn = fr.bismut(&h).unwrap();
        let t = torsion_tensor(&fr, &conn);
        let tt = |i: usize, j: usize, l: usize| t[(i * n + j) * n + l].clone();
        let ginv = fr.geometry().inverse();
        let low = fr.riemann_lowered(&conn);
        let riem = |i: usize, j: usize, k: usize, l: usize| {
            (0..n).fold(E::zero(), |acc, q| acc + low[((i * n + j) * n + k) * n + q].clone() * ginv[(q, l)].clone())
        };
        let nabla_t = |i: usize, j: usize, k: usize, l: usize| {
            let mut acc = E::zero();
            for m in 0..n {
                acc = acc + tt(j, k, m) * conn.get(i, m, l).clone();
                acc = acc - conn.get(i, j, m).clone() * tt(m, k, l);
                acc = acc - conn.get(i, k, m).clone() * tt(j, m, l);
            }
            acc
        };
        let quad = |i: usize, j: usize, k: usize, l: usize| (0..n).fold(E::zero(), |acc, m| acc + tt(i, j, m) * tt(m, k, l));
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let cyc = [(i, j, k), (j, k, i), (k, i, j)];
                        let lhs = cyc.iter().fold(E::zero(), |a, &(x, y, z)| a + riem(x, y, z, l));
                        let rhs = cyc.iter().fold(E::zero(), |a, &(x, y, z)| a + quad(x, y, z, l) + nabla_t(x, y, z, l));
                        assert_eq!(lhs, rhs, "({i},{j},{k},{l})");
                    }
                }
            }
        }
    }
}

#[test]
fn levi_civita_has_no_bianchi_defect() {
    let mut r = rng(24);
    for fr in small_frames(&mut r) {
        let n = fr.dim();
        let low = fr.riemann_lowered(&fr.levi_civita());
        let at = |i: usize, j: usize, k: usize, l: usize| low[((i * n + j) * n + k) * n + l].clone();
        for (i, j, k, l) in (0..n * n * n * n).map(|x| (x / (n * n * n), x / (n * n) % n, x / n % n, x % n)) {
            assert!((at(i, j, k, l) + at(j, k, i, l) + at(k, i, j, l)).is_zero());
            assert_eq!(at(i, j, k, l), at(k, l, i, j));
        }
    }
}

fn to_float(x: &E) -> Float {
    Float::new(x.to_f64(), 1e-9)
}

/// 1000 randomized operations, each computed in both backends.
#[test]
fn float_backend_agrees_with_exact() {
    let mut r = rng(25);
    let mut ops = 0;
    while ops < 1000 {
        let n = r.gen_range(3..=8);
        let fr = frame_pool(n, r.gen(), &mut r);
        let fr = if r.gen_bool(0.5) { with_random_metric(fr, &mut r) } else { fr };
        let ff = fr.convert(to_float);
        let k = r.gen_range(1..n);
        let a = random_form(n, k, 0.4, &mut r);
        let b = random_form(n, r.gen_range(0..=n - k), 0.4, &mut r);
        let x = random_vector(n, &mut r);
        let (af, bf) = (a.map_coeffs(to_float), b.map_coeffs(to_float));
        let xf = VectorField::new(x.comps().iter().map(to_float).collect());
        let (ge, gf) = (fr.geometry(), ff.geometry());

        assert_eq!(a.wedge(&b).map_coeffs(to_float), af.wedge(&bf));
        assert_eq!(a.interior(&x).map_coeffs(to_float), af.interior(&xf));
        assert_eq!(fr.d(&a).map_coeffs(to_float), ff.d(&af));
        assert_eq!(ge.star(&a).map_coeffs(to_float), gf.star(&af));
        assert_eq!(to_float(&ge.norm2(&a)), gf.norm2(&af));
        let exact: Vec<Float> = fr.levi_civita().apply(&x, &x).comps().iter().map(to_float).collect();
        assert_eq!(ff.levi_civita().apply(&xf, &xf).comps(), &exact[..]);
        ops += 6;
    }
}

#[test]
fn cartan_connection_is_flat_on_bi_invariant_algebras() {
    for n in 6..=8 {
        let fr = bi_invariant(n);
        let conn = fr.bismut(&cartan(&fr)).unwrap();
        assert!(fr.curvature(&conn, RicciTrace::First).is_flat());
        let minus = fr.bismut(&-cartan(&fr)).unwrap();
        assert!(fr.curvature(&minus, RicciTrace::First).is_flat());
        assert!(!fr.curvature(&fr.levi_civita(), RicciTrace::First).is_flat());
    }
}
