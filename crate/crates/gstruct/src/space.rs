//! The geometry on which a structure lives: either a full Lie frame or the
//! transverse geometry of a unit Killing field V, computed upstairs.
//!
//! Transverse calculus uses horizontal forms (`i_V = 0`), `d̂ = d`,
//! `⋆̂β = (−1)^k i_V ⋆β`, the inverse metric `ĝ⁻¹ = g⁻¹ − V⊗V`, and the
//! projector `P X = X − g(X, V) V`. The transverse connection for a basic
//! 3-form `Ĥ` is the horizontal part of the upstairs Bismut connection of
//! `μ∧F + Ĥ`, with `μ = V♭` and `F = dμ`.

use crate::exterior::{subsets, KForm, VectorField};
use crate::lie_frame::{nabla_form, nabla_oneform, ConnectionCoeffs, CurvatureData, LieAlgebraFrame, LieError, RicciTrace};
use crate::linalg::Mat;
use crate::scalar::Scalar;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpaceError {
    #[error("V is zero")]
    ZeroVector,
    #[error("|V|² = {0}, expected 1")]
    NotUnit(String),
    #[error("V is not Killing: ad_V is not skew")]
    NotKilling,
    #[error(transparent)]
    Lie(#[from] LieError),
}

#[derive(Clone, Debug)]
struct Normal<S: Scalar> {
    v: VectorField<S>,
    mu: KForm<S>,
    flux: KForm<S>,
    proj: Mat<S>,
    ginv: Mat<S>,
    pivot: usize,
}

#[derive(Clone, Debug)]
pub struct Space<S: Scalar> {
    frame: LieAlgebraFrame<S>,
    normal: Option<Normal<S>>,
    orient: i8,
}

impl<S: Scalar> Space<S> {
    pub fn full(frame: LieAlgebraFrame<S>) -> Self {
        Space { frame, normal: None, orient: 1 }
    }

    /// Transverse geometry of a unit Killing field.
    pub fn transverse(frame: LieAlgebraFrame<S>, v: VectorField<S>) -> Result<Self, SpaceError> {
        if v.is_zero() {
            return Err(SpaceError::ZeroVector);
        }
        let geom = frame.geometry();
        let n2 = geom.inner_vectors(&v, &v);
        if n2 != S::one() {
            return Err(SpaceError::NotUnit(n2.canonical()));
        }
        if !is_killing(&frame, &v) {
            return Err(SpaceError::NotKilling);
        }
        let n = frame.dim();
        let mu = geom.flat(&v);
        let flux = frame.d(&mu);
        let muc = mu.components();
        let proj = Mat::from_fn(n, n, |a, i| {
            let d = if a == i { S::one() } else { S::zero() };
            d - muc[i].clone() * v.get(a).clone()
        });
        let ginv = Mat::from_fn(n, n, |a, b| geom.inverse()[(a, b)].clone() - v.get(a).clone() * v.get(b).clone());
        let pivot = (0..n).find(|&i| !muc[i].is_zero()).expect("nonzero μ");
        Ok(Space { frame, normal: Some(Normal { v, mu, flux, proj, ginv, pivot }), orient: 1 })
    }

    pub fn frame(&self) -> &LieAlgebraFrame<S> {
        &self.frame
    }
    pub fn labels(&self) -> &[String] {
        self.frame.labels()
    }
    pub fn is_transverse(&self) -> bool {
        self.normal.is_some()
    }
    /// Intrinsic dimension.
    pub fn dim(&self) -> usize {
        self.frame.dim() - usize::from(self.normal.is_some())
    }
    /// Dimension of the frame forms live in.
    pub fn ambient_dim(&self) -> usize {
        self.frame.dim()
    }
    pub fn normal_vector(&self) -> Option<&VectorField<S>> {
        self.normal.as_ref().map(|n| &n.v)
    }
    pub fn mu(&self) -> Option<&KForm<S>> {
        self.normal.as_ref().map(|n| &n.mu)
    }
    /// F = dμ (zero form on a full space).
    pub fn flux(&self) -> KForm<S> {
        match &self.normal {
            Some(n) => n.flux.clone(),
            None => KForm::zero(self.ambient_dim(), 2),
        }
    }
    pub fn orientation(&self) -> i8 {
        self.orient
    }

    pub fn flipped(&self) -> Self {
        let mut s = self.clone();
        s.orient = -s.orient;
        s
    }

    /// β − μ ∧ i_V β.
    pub fn hor(&self, a: &KForm<S>) -> KForm<S> {
        match &self.normal {
            None => a.clone(),
            Some(n) => a.clone() - n.mu.wedge(&a.interior(&n.v)),
        }
    }

    pub fn is_horizontal(&self, a: &KForm<S>) -> bool {
        match &self.normal {
            None => true,
            Some(n) => a.interior(&n.v).is_zero(),
        }
    }

    /// i_V β = 0 and L_V β = 0.
    pub fn is_basic(&self, a: &KForm<S>) -> bool {
        match &self.normal {
            None => true,
            Some(n) => a.interior(&n.v).is_zero() && self.frame.lie_derivative(&n.v, a).is_zero(),
        }
    }

    fn signed(&self, a: KForm<S>) -> KForm<S> {
        if self.orient > 0 {
            a
        } else {
            -a
        }
    }

    pub fn vol(&self) -> KForm<S> {
        let up = self.frame.geometry().vol();
        match &self.normal {
            None => self.signed(up),
            Some(n) => self.signed(up.interior(&n.v)),
        }
    }

    pub fn star(&self, a: &KForm<S>) -> KForm<S> {
        let s = self.frame.hodge(a);
        match &self.normal {
            None => self.signed(s),
            Some(n) => {
                let r = s.interior(&n.v);
                self.signed(if a.degree() % 2 == 0 { r } else { -r })
            }
        }
    }

    pub fn inner(&self, a: &KForm<S>, b: &KForm<S>) -> S {
        self.frame.geometry().inner(a, b).expect("inner product")
    }

    pub fn norm2(&self, a: &KForm<S>) -> S {
        self.inner(a, a)
    }

    /// Inverse metric on covectors (ĝ⁻¹ on a transverse space).
    pub fn ginv(&self) -> &Mat<S> {
        match &self.normal {
            None => self.frame.geometry().inverse(),
            Some(n) => &n.ginv,
        }
    }

    /// Metric on frame vectors after projection: g(P e_a, P e_b).
    pub fn metric(&self) -> Mat<S> {
        let g = self.frame.geometry().metric();
        match &self.normal {
            None => g.clone(),
            Some(n) => {
                let m = n.mu.components();
                Mat::from_fn(g.rows(), g.cols(), |a, b| g[(a, b)].clone() - m[a].clone() * m[b].clone())
            }
        }
    }

    /// Projector with column i equal to P e_i.
    pub fn projector(&self) -> Mat<S> {
        match &self.normal {
            None => Mat::identity(self.ambient_dim()),
            Some(n) => n.proj.clone(),
        }
    }

    pub fn project(&self, x: &VectorField<S>) -> VectorField<S> {
        match &self.normal {
            None => x.clone(),
            Some(n) => VectorField::new(n.proj.mul_vec(x.comps())),
        }
    }

    /// Projected frame vectors P e_i.
    pub fn frame_vectors(&self) -> Vec<VectorField<S>> {
        let n = self.ambient_dim();
        (0..n).map(|i| self.project(&VectorField::basis(n, i))).collect()
    }

    pub fn sharp(&self, a: &KForm<S>) -> VectorField<S> {
        VectorField::new(self.ginv().mul_vec(&a.components()))
    }

    pub fn flat(&self, x: &VectorField<S>) -> KForm<S> {
        self.hor(&self.frame.geometry().flat(x))
    }

    pub fn inner_vectors(&self, x: &VectorField<S>, y: &VectorField<S>) -> S {
        self.frame.geometry().inner_vectors(&self.project(x), &self.project(y))
    }

    pub fn d(&self, a: &KForm<S>) -> KForm<S> {
        self.frame.d(a)
    }

    /// d⋆ = (−1)^{m(k+1)+1} ⋆ d ⋆ with m the intrinsic dimension.
    pub fn codifferential(&self, a: &KForm<S>) -> KForm<S> {
        if a.degree() == 0 {
            return KForm::zero(self.ambient_dim(), 0);
        }
        let r = self.star(&self.d(&self.star(a)));
        if (self.dim() * (a.degree() + 1) + 1) % 2 == 0 {
            r
        } else {
            -r
        }
    }

    /// A basis of (horizontal) k-forms.
    pub fn basis(&self, k: usize) -> Vec<KForm<S>> {
        let n = self.ambient_dim();
        match &self.normal {
            None => subsets(n, k).into_iter().map(|m| KForm::from_terms(n, k, [(m, S::one())])).collect(),
            Some(nm) => subsets(n, k)
                .into_iter()
                .filter(|m| m >> nm.pivot & 1 == 0)
                .map(|m| self.hor(&KForm::from_terms(n, k, [(m, S::one())])))
                .collect(),
        }
    }

    /// Connection with skew torsion `h` (intrinsic torsion on a transverse space).
    pub fn connection(&self, h: &KForm<S>) -> Result<ConnectionCoeffs<S>, LieError> {
        match &self.normal {
            None => self.frame.bismut(h),
            Some(n) => {
                let h = if h.is_zero() { KForm::zero(self.ambient_dim(), 3) } else { h.clone() };
                self.frame.bismut(&(n.mu.wedge(&n.flux) + h))
            }
        }
    }

    pub fn levi_civita(&self) -> ConnectionCoeffs<S> {
        self.connection(&KForm::zero(self.ambient_dim(), 3)).expect("levi-civita")
    }

    pub fn curvature(&self, conn: &ConnectionCoeffs<S>, trace: RicciTrace) -> CurvatureData<S> {
        let n = self.ambient_dim();
        let low = self.frame.riemann_lowered(conn);
        let Some(nm) = &self.normal else {
            return CurvatureData::from_lowered(n, low, self.ginv(), trace);
        };
        let mut t = low;
        for slot in 0..4 {
            t = contract_slot(&t, n, slot, &nm.proj);
        }
        let f = &nm.flux;
        let fp = Mat::from_fn(n, n, |a, b| {
            let mut acc = S::zero();
            for c in 0..n {
                for d in 0..n {
                    let x = f.eval(&[c, d]);
                    if !x.is_zero() {
                        acc = acc + nm.proj[(c, a)].clone() * nm.proj[(d, b)].clone() * x;
                    }
                }
            }
            acc
        });
        for i in 0..n {
            for j in 0..n {
                if fp[(i, j)].is_zero() {
                    continue;
                }
                for k in 0..n {
                    for l in 0..n {
                        if !fp[(k, l)].is_zero() {
                            let e = &mut t[((i * n + j) * n + k) * n + l];
                            *e = e.clone() - fp[(i, j)].clone() * fp[(k, l)].clone();
                        }
                    }
                }
            }
        }
        CurvatureData::from_lowered(n, t, &nm.ginv, trace)
    }

    /// (∇θ)(P e_i, P e_j).
    pub fn nabla_oneform(&self, conn: &ConnectionCoeffs<S>, theta: &KForm<S>) -> Mat<S> {
        let m = nabla_oneform(conn, theta);
        match &self.normal {
            None => m,
            Some(n) => n.proj.transpose().mul(&m).mul(&n.proj),
        }
    }

    /// hor(∇_{P e_i} α) for each i.
    pub fn nabla_form(&self, conn: &ConnectionCoeffs<S>, a: &KForm<S>) -> Vec<KForm<S>> {
        let raw = nabla_form(conn, a);
        let Some(nm) = &self.normal else { return raw };
        let n = self.ambient_dim();
        (0..n)
            .map(|i| {
                let mut acc = KForm::zero(n, a.degree());
                for (b, f) in raw.iter().enumerate() {
                    let p = &nm.proj[(b, i)];
                    if !p.is_zero() && !f.is_zero() {
                        acc = acc + f.scale(p);
                    }
                }
                self.hor(&acc)
            })
            .collect()
    }

    /// Row i holds P(∇_{P e_i} X).
    pub fn nabla_vector(&self, conn: &ConnectionCoeffs<S>, x: &VectorField<S>) -> Mat<S> {
        let m = self.frame.nabla_vector(conn, x);
        match &self.normal {
            None => m,
            Some(n) => n.proj.transpose().mul(&m).mul(&n.proj.transpose()),
        }
    }

    /// P[X, Y].
    pub fn bracket(&self, x: &VectorField<S>, y: &VectorField<S>) -> VectorField<S> {
        self.project(&self.frame.bracket(x, y))
    }

    pub fn convert<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> Space<T> {
        let frame = self.frame.convert(f);
        let mut s = match &self.normal {
            None => Space::full(frame),
            Some(n) => {
                let v = VectorField::new(n.v.comps().iter().map(f).collect());
                Space::transverse(frame, v).expect("converted transverse space")
            }
        };
        s.orient = self.orient;
        s
    }
}

/// ad_V skew with respect to g.
pub fn is_killing<S: Scalar>(frame: &LieAlgebraFrame<S>, v: &VectorField<S>) -> bool {
    let m = frame.geometry().metric().mul(&frame.ad(v));
    m.add(&m.transpose()).is_zero()
}

/// Contract one slot of an n⁴ tensor with the matrix `p` (column i = image of e_i).
fn contract_slot<S: Scalar>(t: &[S], n: usize, slot: usize, p: &Mat<S>) -> Vec<S> {
    let stride = n.pow(3 - slot as u32);
    let mut out = vec![S::zero(); t.len()];
    for (idx, v) in t.iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        let a = (idx / stride) % n;
        let base = idx - a * stride;
        for i in 0..n {
            let c = &p[(a, i)];
            if !c.is_zero() {
                let e = &mut out[base + i * stride];
                *e = e.clone() + c.clone() * v.clone();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::default_labels;
    use crate::scalar::Exact;

    fn su2_r() -> LieAlgebraFrame<Exact> {
        let n = 4;
        let m2 = Exact::int(-2);
        let de = vec![
            KForm::basis(n, &[1, 2]).scale(&m2),
            KForm::basis(n, &[2, 0]).scale(&m2),
            KForm::basis(n, &[0, 1]).scale(&m2),
            KForm::zero(n, 2),
        ];
        LieAlgebraFrame::with_identity(default_labels(4), de).unwrap()
    }

    #[test]
    fn transverse_star_is_involutive() {
        let s = Space::transverse(su2_r(), VectorField::basis(4, 3)).unwrap();
        assert_eq!(s.dim(), 3);
        let a = s.hor(&KForm::basis(4, &[0]));
        assert_eq!(s.star(&s.star(&a)), a);
        assert_eq!(s.vol(), -KForm::basis(4, &[0, 1, 2]));
        assert_eq!(a.wedge(&s.star(&a)), s.vol());
    }

    #[test]
    fn quotient_curvature_of_product() {
        // transverse geometry along the flat factor is the round su(2)
        let s = Space::transverse(su2_r(), VectorField::basis(4, 3)).unwrap();
        let curv = s.curvature(&s.levi_civita(), RicciTrace::First);
        let expect = Mat::from_fn(4, 4, |i, j| if i == j && i < 3 { Exact::int(2) } else { Exact::zero() });
        assert_eq!(curv.ricci, expect);
    }

    #[test]
    fn rejects_non_killing_and_non_unit() {
        let n = 2;
        let de = vec![KForm::basis(n, &[0, 1]), KForm::zero(n, 2)];
        let f = LieAlgebraFrame::<Exact>::with_identity(default_labels(2), de).unwrap();
        assert_eq!(Space::transverse(f.clone(), VectorField::basis(2, 0)).unwrap_err(), SpaceError::NotKilling);
        let v = VectorField::basis(2, 1).scale(&Exact::int(2));
        assert!(matches!(Space::transverse(f, v), Err(SpaceError::NotUnit(_))));
    }
}
