//! Shared fixtures, random generators and a brute-force exterior calculus used
//! as an independent oracle by the integration tests.
#![allow(dead_code)]

pub mod laws;

use gstruct::cli::{parse, Document};
use gstruct::exterior::{default_labels, KForm, VectorField};
use gstruct::g_structures::GStructure;
use gstruct::lie_frame::LieAlgebraFrame;
use gstruct::linalg::Mat;
use gstruct::scalar::{Exact, Scalar};
use gstruct::space::Space;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

pub type E = Exact;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixture_text(name: &str) -> String {
    let path = format!("{}/examples/{name}.gs", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).expect("fixture")
}

pub fn fixture(name: &str) -> Document {
    parse(&fixture_text(name)).expect("fixture parses")
}

pub fn structure(name: &str) -> GStructure<E> {
    fixture(name).structure().unwrap().expect("fixture has a structure")
}

pub fn form(doc: &Document, text: &str) -> KForm<E> {
    doc.form(text).expect("expression")
}

pub fn q(n: i64, d: i64) -> E {
    E::ratio(n, d)
}

// ---------------------------------------------------------------------------
// Frames

/// Frame from (target, coefficient, j, k) entries of de^target.
pub fn frame(n: usize, terms: &[(usize, i64, usize, usize)]) -> LieAlgebraFrame<E> {
    let mut de = vec![KForm::zero(n, 2); n];
    for &(i, c, a, b) in terms {
        de[i] = de[i].clone() + KForm::basis(n, &[a, b]).scale(&E::from_i64(c));
    }
    LieAlgebraFrame::with_identity(default_labels(n), de).expect("valid frame")
}

/// su(2) ⊕ su(2) on indices off..off+6 with the Cartan-normalised brackets.
pub fn su2su2_terms(off: usize) -> Vec<(usize, i64, usize, usize)> {
    let o = off;
    vec![
        (o, 1, o + 1, o + 2),
        (o + 1, -1, o, o + 2),
        (o + 2, 1, o, o + 1),
        (o + 3, 1, o + 4, o + 5),
        (o + 4, -1, o + 3, o + 5),
        (o + 5, 1, o + 3, o + 4),
    ]
}

pub fn su2su2_plus(n: usize) -> LieAlgebraFrame<E> {
    frame(n, &su2su2_terms(0))
}

/// Heisenberg algebra h₃ in the first three slots, abelian elsewhere.
pub fn heisenberg_plus(n: usize) -> LieAlgebraFrame<E> {
    frame(n, &[(2, 1, 0, 1)])
}

/// A pool of bi-invariant algebras of dimension n: every invariant structure on
/// them has skew torsion (the flat Cartan connection preserves it).
pub fn bi_invariant(n: usize) -> LieAlgebraFrame<E> {
    su2su2_plus(n)
}

// ---------------------------------------------------------------------------
// Random data

const TRIPLES: [(i64, i64, i64); 4] = [(3, 4, 5), (5, 12, 13), (8, 15, 17), (7, 24, 25)];

/// Product of a few Givens rotations with Pythagorean angles: rational orthogonal, det 1.
pub fn rational_rotation(n: usize, rotations: usize, r: &mut impl Rng) -> Mat<E> {
    let mut m = Mat::<E>::identity(n);
    for _ in 0..rotations {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(r);
        let (i, j) = (idx[0], idx[1]);
        let (a, b, c) = TRIPLES[r.gen_range(0..TRIPLES.len())];
        let s = if r.gen_bool(0.5) { 1 } else { -1 };
        let mut g = Mat::<E>::identity(n);
        g[(i, i)] = q(a, c);
        g[(j, j)] = q(a, c);
        g[(i, j)] = q(-s * b, c);
        g[(j, i)] = q(s * b, c);
        m = m.mul(&g);
    }
    m
}

/// Random signed permutation with determinant 1.
pub fn signed_permutation(n: usize, r: &mut impl Rng) -> Mat<E> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(r);
    let signs: Vec<i64> = (0..n).map(|_| if r.gen_bool(0.5) { 1 } else { -1 }).collect();
    let mut m = Mat::from_fn(n, n, |i, j| if p[i] == j { E::from_i64(signs[i]) } else { E::zero() });
    if m.det().signum() < 0 {
        for j in 0..n {
            m[(0, j)] = -m[(0, j)].clone();
        }
    }
    m
}

/// Signed permutation followed by one Pythagorean rotation.
pub fn random_orthogonal(n: usize, r: &mut impl Rng) -> Mat<E> {
    signed_permutation(n, r).mul(&rational_rotation(n, 1, r))
}

/// Rotate a form written in an orthonormal coframe η = R e.
pub fn rotate(a: &KForm<E>, r: &Mat<E>) -> KForm<E> {
    a.substitute(r)
}

pub fn small_rational(r: &mut impl Rng) -> E {
    let n = r.gen_range(-4i64..=4);
    let d = r.gen_range(1i64..=3);
    q(n, d)
}

pub fn random_form(n: usize, k: usize, density: f64, r: &mut impl Rng) -> KForm<E> {
    let mut out = KForm::zero(n, k);
    for m in gstruct::exterior::subsets(n, k) {
        if r.gen_bool(density) {
            out.add_term(m, small_rational(r));
        }
    }
    out
}

pub fn random_vector(n: usize, r: &mut impl Rng) -> VectorField<E> {
    VectorField::new((0..n).map(|_| small_rational(r)).collect())
}

/// Symmetric positive definite rational matrix: AᵀA + I with small integer A.
pub fn random_metric(n: usize, r: &mut impl Rng) -> Mat<E> {
    let rows = (0..n)
        .map(|i| (0..n).map(|j| if i == j || r.gen_bool(0.2) { E::from_i64(r.gen_range(-1..=1)) } else { E::zero() }).collect())
        .collect();
    let a = Mat::from_rows(rows);
    a.transpose().mul(&a).add(&Mat::identity(n))
}

/// H(e_i, e_j, e_k) = −⟨[e_i, e_j], e_k⟩: the torsion whose connection kills
/// every left-invariant field on a bi-invariant algebra.
pub fn cartan(fr: &LieAlgebraFrame<E>) -> KForm<E> {
    let n = fr.dim();
    KForm::from_alternating(n, 3, |ix| {
        let de = &fr.coframe_d()[ix[2]];
        de.eval(&[ix[0], ix[1]])
    })
}

/// A random algebra from the pool, pushed through an orthogonal change of coframe.
pub fn frame_pool(n: usize, pick: u8, r: &mut impl Rng) -> LieAlgebraFrame<E> {
    let base = match (n, pick % 3) {
        (n, 0) if n >= 6 => bi_invariant(n),
        (n, 1) if n >= 3 => heisenberg_plus(n),
        (n, _) => frame(n, &[]),
    };
    // rotate the algebra itself so structure constants are generic
    let a = random_orthogonal(n, r);
    base.change_coframe(&a, default_labels(n)).unwrap().0
}

pub fn full(frame: LieAlgebraFrame<E>) -> Space<E> {
    Space::full(frame)
}

// ---------------------------------------------------------------------------
// Brute-force oracle: forms as maps from sorted index lists, d from the
// bracket formula, ⋆ from the complement rule on an orthonormal frame.

#[derive(Clone, Debug, PartialEq)]
pub struct Dense {
    pub n: usize,
    pub k: usize,
    pub c: BTreeMap<Vec<usize>, E>,
}

fn sort_sign(idx: &[usize]) -> Option<(Vec<usize>, i64)> {
    let mut v = idx.to_vec();
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] == v[j + 1] {
                return None;
            }
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

impl Dense {
    pub fn zero(n: usize, k: usize) -> Self {
        Dense { n, k, c: BTreeMap::new() }
    }

    pub fn from_kform(a: &KForm<E>) -> Self {
        let mut d = Dense::zero(a.dim(), a.degree());
        for (m, v) in a.terms() {
            let idx: Vec<usize> = (0..a.dim()).filter(|i| m >> i & 1 == 1).collect();
            d.c.insert(idx, v.clone());
        }
        d
    }

    pub fn to_kform(&self) -> KForm<E> {
        let mut out = KForm::zero(self.n, self.k);
        for (idx, v) in &self.c {
            out = out + KForm::basis(self.n, idx).scale(v);
        }
        out
    }

    fn add_at(&mut self, idx: &[usize], v: E) {
        if let Some((s, sign)) = sort_sign(idx) {
            let e = self.c.entry(s).or_insert_with(E::zero);
            *e = e.clone() + v * E::from_i64(sign);
            if e.is_zero() {
                let key = sort_sign(idx).unwrap().0;
                self.c.remove(&key);
            }
        }
    }

    pub fn add(&self, o: &Dense) -> Dense {
        let mut out = self.clone();
        for (idx, v) in &o.c {
            out.add_at(idx, v.clone());
        }
        out
    }

    pub fn scale(&self, s: &E) -> Dense {
        let mut out = Dense::zero(self.n, self.k);
        for (idx, v) in &self.c {
            out.add_at(idx, v.clone() * s.clone());
        }
        out
    }

    /// Value on basis vectors e_{i1}, …, e_{ik}.
    pub fn eval(&self, idx: &[usize]) -> E {
        match sort_sign(idx) {
            None => E::zero(),
            Some((s, sign)) => self.c.get(&s).cloned().unwrap_or_else(E::zero) * E::from_i64(sign),
        }
    }

    pub fn wedge(&self, o: &Dense) -> Dense {
        let mut out = Dense::zero(self.n, self.k + o.k);
        for (a, x) in &self.c {
            for (b, y) in &o.c {
                let cat: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
                out.add_at(&cat, x.clone() * y.clone());
            }
        }
        out
    }

    /// Contraction with a vector in the first slot.
    pub fn interior(&self, x: &[E]) -> Dense {
        let mut out = Dense::zero(self.n, self.k - 1);
        for (idx, v) in &self.c {
            for (p, &i) in idx.iter().enumerate() {
                let rest: Vec<usize> = idx.iter().enumerate().filter(|&(q, _)| q != p).map(|(_, &j)| j).collect();
                let sign = if p % 2 == 0 { 1 } else { -1 };
                out.add_at(&rest, v.clone() * x[i].clone() * E::from_i64(sign));
            }
        }
        out
    }

    /// Sum of coefficient products: the inner product on an orthonormal coframe.
    pub fn inner(&self, o: &Dense) -> E {
        self.c.iter().fold(E::zero(), |acc, (idx, v)| acc + v.clone() * o.c.get(idx).cloned().unwrap_or_else(E::zero))
    }

    /// ⋆ for the identity metric with volume `orient`·e^{0…n−1}.
    pub fn star(&self, orient: i64) -> Dense {
        let mut out = Dense::zero(self.n, self.n - self.k);
        for (idx, v) in &self.c {
            let comp: Vec<usize> = (0..self.n).filter(|i| !idx.contains(i)).collect();
            let cat: Vec<usize> = idx.iter().chain(comp.iter()).copied().collect();
            let (_, sign) = sort_sign(&cat).unwrap();
            out.add_at(&comp, v.clone() * E::from_i64(sign * orient));
        }
        out
    }

    pub fn top_coeff(&self) -> E {
        let all: Vec<usize> = (0..self.n).collect();
        self.c.get(&all).cloned().unwrap_or_else(E::zero)
    }
}

/// Brackets c^k_{ij} read off the structure equations de^k = −Σ_{i<j} c^k_{ij} e^{ij}.
pub struct Brackets {
    pub n: usize,
    c: Vec<Vec<Vec<E>>>,
}

impl Brackets {
    pub fn of(frame: &LieAlgebraFrame<E>) -> Self {
        let n = frame.dim();
        let mut c = vec![vec![vec![E::zero(); n]; n]; n];
        for k in 0..n {
            let de = Dense::from_kform(&frame.coframe_d()[k]);
            for i in 0..n {
                for j in 0..n {
                    c[i][j][k] = -de.eval(&[i, j]);
                }
            }
        }
        Brackets { n, c }
    }

    /// dα(e_{i0}, …, e_{ik}) = Σ_{a<b} (−1)^{a+b} α([e_{ia}, e_{ib}], …).
    pub fn d(&self, a: &Dense) -> Dense {
        let n = self.n;
        let k = a.k;
        let mut out = Dense::zero(n, k + 1);
        for idx in combos(n, k + 1) {
            let mut total = E::zero();
            for p in 0..=k {
                for r in p + 1..=k {
                    let rest: Vec<usize> = idx.iter().enumerate().filter(|&(t, _)| t != p && t != r).map(|(_, &j)| j).collect();
                    let sign = if (p + r) % 2 == 0 { 1 } else { -1 };
                    for (m, cm) in self.c[idx[p]][idx[r]].iter().enumerate() {
                        if cm.is_zero() {
                            continue;
                        }
                        let mut args = vec![m];
                        args.extend(&rest);
                        total = total + cm.clone() * a.eval(&args) * E::from_i64(sign);
                    }
                }
            }
            if !total.is_zero() {
                out.c.insert(idx, total);
            }
        }
        out
    }
}

pub fn combos(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = vec![];
    go(0, n, k, &mut vec![], &mut out);
    out
}

/// Orientation sign making B(e₀, e₀) > 0 for a 3-form in dimension 7.
pub fn g2_orientation(phi: &Dense) -> i64 {
    let mut x = vec![E::zero(); 7];
    x[0] = E::one();
    let a = phi.interior(&x);
    let top = a.wedge(&a).wedge(phi).top_coeff();
    if top.signum() > 0 { 1 } else { -1 }
}

/// θ_φ = ⟨d⋆φ, e^i∧⋆φ⟩ / 3 for φ orthonormal in the identity metric.
pub fn oracle_g2_lee(br: &Brackets, phi: &Dense) -> Dense {
    let o = g2_orientation(phi);
    let sphi = phi.star(o);
    let dsphi = br.d(&sphi);
    let mut out = Dense::zero(7, 1);
    for i in 0..7 {
        let ei = Dense { n: 7, k: 1, c: [(vec![i], E::one())].into_iter().collect() };
        let v = dsphi.inner(&ei.wedge(&sphi)) * q(1, 3);
        if !v.is_zero() {
            out.c.insert(vec![i], v);
        }
    }
    out
}

/// τ₀ = ⟨dφ, ⋆φ⟩ / 7.
pub fn oracle_g2_tau0(br: &Brackets, phi: &Dense) -> E {
    let o = g2_orientation(phi);
    br.d(phi).inner(&phi.star(o)) * q(1, 7)
}

/// θ_Ψ = −(1/7) ⋆(⋆dΨ ∧ Ψ) for Ψ with Ψ∧Ψ = 14 vol in the orientation `o`.
pub fn oracle_spin7_lee(br: &Brackets, psi: &Dense) -> Dense {
    let top = psi.wedge(psi).top_coeff();
    let o = if top.signum() > 0 { 1 } else { -1 };
    br.d(psi).star(o).wedge(psi).star(o).scale(&q(-1, 7))
}
