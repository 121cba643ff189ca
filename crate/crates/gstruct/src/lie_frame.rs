//! Left-invariant geometry on a Lie algebra given by its coframe differentials.

use crate::exterior::{indices, merge_sign, ExteriorError, FrameGeometry, KForm, Mask, VectorField};
use crate::linalg::Mat;
use crate::scalar::Scalar;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LieError {
    #[error("expected {expected} coframe differentials, got {got}")]
    WrongCount { expected: usize, got: usize },
    #[error("d e^{label} must be a 2-form on {n} generators")]
    BadDifferential { label: String, n: usize },
    #[error("Jacobi identity fails: d(d {label}) = {value}")]
    Jacobi { label: String, value: String },
    #[error("coframe change is singular")]
    SingularCoframe,
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
}

/// Which trace of the curvature defines the Ricci tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RicciTrace {
    /// Rc(X, Y) = tr(Z ↦ R(Z, X)Y).
    #[default]
    First,
    /// The transpose, tr(Z ↦ R(Z, Y)X).
    Second,
}

/// A Lie algebra with a chosen basis, its dual coframe differentials and a metric.
#[derive(Clone, Debug)]
pub struct LieAlgebraFrame<S: Scalar> {
    labels: Vec<String>,
    de: Vec<KForm<S>>,
    geometry: FrameGeometry<S>,
    /// c[(i * n + j) * n + k] = c^i_{jk}, [e_j, e_k] = c^i_{jk} e_i
    c: Vec<S>,
}

impl<S: Scalar> PartialEq for LieAlgebraFrame<S> {
    fn eq(&self, o: &Self) -> bool {
        self.labels == o.labels && self.de == o.de && self.geometry == o.geometry
    }
}

/// Connection coefficients Γ^k_{ij}: ∇_{e_i} e_j = Γ^k_{ij} e_k.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionCoeffs<S> {
    n: usize,
    gamma: Vec<S>,
    nonzero: Vec<(usize, usize, usize)>,
}

impl<S: Scalar> ConnectionCoeffs<S> {
    fn from_vec(n: usize, gamma: Vec<S>) -> Self {
        let mut nonzero = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if !gamma[(i * n + j) * n + k].is_zero() {
                        nonzero.push((i, j, k));
                    }
                }
            }
        }
        ConnectionCoeffs { n, gamma, nonzero }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Γ^k_{ij}
    pub fn get(&self, i: usize, j: usize, k: usize) -> &S {
        &self.gamma[(i * self.n + j) * self.n + k]
    }

    /// Nonzero coefficients as (i, j, k).
    pub fn support(&self) -> &[(usize, usize, usize)] {
        &self.nonzero
    }

    pub fn is_zero(&self) -> bool {
        self.nonzero.is_empty()
    }

    /// ∇_X Y for constant fields.
    pub fn apply(&self, x: &VectorField<S>, y: &VectorField<S>) -> VectorField<S> {
        let mut out = vec![S::zero(); self.n];
        for &(i, j, k) in &self.nonzero {
            let (a, b) = (x.get(i), y.get(j));
            if !a.is_zero() && !b.is_zero() {
                out[k] = out[k].clone() + a.clone() * b.clone() * self.get(i, j, k).clone();
            }
        }
        VectorField::new(out)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::from_vec(self.n, self.gamma.iter().zip(&o.gamma).map(|(a, b)| a.clone() - b.clone()).collect())
    }
}

/// Riemann tensor and Ricci form of a connection.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureData<S> {
    n: usize,
    /// R(e_i, e_j, e_k, e_l) = g(R(e_i, e_j) e_k, e_l)
    lowered: Vec<S>,
    /// R^l_{ijk}: R(e_i, e_j) e_k = R^l_{ijk} e_l
    raised: Vec<S>,
    pub ricci: Mat<S>,
}

impl<S: Scalar> CurvatureData<S> {
    /// Build from the lowered tensor, raising and tracing with `ginv`.
    pub fn from_lowered(n: usize, lowered: Vec<S>, ginv: &Mat<S>, trace: RicciTrace) -> Self {
        let idx = |i: usize, j: usize, k: usize, l: usize| ((i * n + j) * n + k) * n + l;
        let mut raised = vec![S::zero(); n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for m in 0..n {
                        let r = &lowered[idx(i, j, k, m)];
                        if r.is_zero() {
                            continue;
                        }
                        for l in 0..n {
                            let g = &ginv[(l, m)];
                            if !g.is_zero() {
                                let t = &mut raised[idx(i, j, k, l)];
                                *t = t.clone() + g.clone() * r.clone();
                            }
                        }
                    }
                }
            }
        }
        let mut ricci = Mat::<S>::zeros(n, n);
        for a in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let r = &raised[idx(a, j, k, a)];
                    if !r.is_zero() {
                        ricci[(j, k)] = ricci[(j, k)].clone() + r.clone();
                    }
                }
            }
        }
        if trace == RicciTrace::Second {
            ricci = ricci.transpose();
        }
        CurvatureData { n, lowered, raised, ricci }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// R^l_{ijk}
    pub fn riemann(&self, i: usize, j: usize, k: usize, l: usize) -> &S {
        let n = self.n;
        &self.raised[((i * n + j) * n + k) * n + l]
    }

    /// g(R(e_i, e_j) e_k, e_l)
    pub fn riemann_lowered(&self, i: usize, j: usize, k: usize, l: usize) -> &S {
        let n = self.n;
        &self.lowered[((i * n + j) * n + k) * n + l]
    }

    pub fn is_flat(&self) -> bool {
        self.lowered.iter().all(|x| x.is_zero())
    }

    pub fn scalar(&self, ginv: &Mat<S>) -> S {
        let mut s = S::zero();
        for a in 0..self.n {
            for b in 0..self.n {
                s = s + ginv[(a, b)].clone() * self.ricci[(a, b)].clone();
            }
        }
        s
    }
}

impl<S: Scalar> LieAlgebraFrame<S> {
    /// Validates shape and the Jacobi identity d² = 0 on every generator.
    pub fn new(labels: Vec<String>, de: Vec<KForm<S>>, geometry: FrameGeometry<S>) -> Result<Self, LieError> {
        let n = labels.len();
        if n == 0 || n > crate::exterior::MAX_DIM {
            return Err(ExteriorError::BadDimension(n).into());
        }
        if de.len() != n {
            return Err(LieError::WrongCount { expected: n, got: de.len() });
        }
        if geometry.dim() != n {
            return Err(ExteriorError::DimensionMismatch(geometry.dim(), n).into());
        }
        for (l, f) in labels.iter().zip(&de) {
            if f.dim() != n || (f.degree() != 2 && !f.is_zero()) {
                return Err(LieError::BadDifferential { label: l.clone(), n });
            }
        }
        let de: Vec<KForm<S>> =
            de.into_iter().map(|f| if f.is_zero() { KForm::zero(n, 2) } else { f }).collect();
        let mut c = vec![S::zero(); n * n * n];
        for (i, f) in de.iter().enumerate() {
            for (m, v) in f.terms() {
                let jk: Vec<usize> = indices(m).collect();
                let (j, k) = (jk[0], jk[1]);
                c[(i * n + j) * n + k] = -v.clone();
                c[(i * n + k) * n + j] = v.clone();
            }
        }
        let frame = LieAlgebraFrame { labels, de, geometry, c };
        for (i, f) in frame.de.iter().enumerate() {
            let dd = frame.d(f);
            if !dd.is_zero() {
                return Err(LieError::Jacobi { label: frame.labels[i].clone(), value: dd.render(&frame.labels) });
            }
        }
        Ok(frame)
    }

    /// Frame with labels e1…en (or e0…e(n−1)) and identity metric.
    pub fn with_identity(labels: Vec<String>, de: Vec<KForm<S>>) -> Result<Self, LieError> {
        let n = labels.len();
        Self::new(labels, de, FrameGeometry::identity(n))
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }
    pub fn labels(&self) -> &[String] {
        &self.labels
    }
    pub fn geometry(&self) -> &FrameGeometry<S> {
        &self.geometry
    }
    pub fn coframe_d(&self) -> &[KForm<S>] {
        &self.de
    }

    pub fn with_geometry(&self, geometry: FrameGeometry<S>) -> Result<Self, LieError> {
        if geometry.dim() != self.dim() {
            return Err(ExteriorError::DimensionMismatch(geometry.dim(), self.dim()).into());
        }
        let mut f = self.clone();
        f.geometry = geometry;
        Ok(f)
    }

    pub fn with_labels(&self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.dim());
        let mut f = self.clone();
        f.labels = labels;
        f
    }

    /// c^i_{jk}
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> &S {
        let n = self.dim();
        &self.c[(i * n + j) * n + k]
    }

    pub fn is_abelian(&self) -> bool {
        self.de.iter().all(|f| f.is_zero())
    }

    pub fn bracket(&self, x: &VectorField<S>, y: &VectorField<S>) -> VectorField<S> {
        let n = self.dim();
        let mut out = vec![S::zero(); n];
        for j in 0..n {
            if x.get(j).is_zero() {
                continue;
            }
            for k in 0..n {
                if y.get(k).is_zero() {
                    continue;
                }
                let xy = x.get(j).clone() * y.get(k).clone();
                for (i, o) in out.iter_mut().enumerate() {
                    let c = self.structure_constant(i, j, k);
                    if !c.is_zero() {
                        *o = o.clone() + c.clone() * xy.clone();
                    }
                }
            }
        }
        VectorField::new(out)
    }

    /// Chevalley–Eilenberg differential.
    pub fn d(&self, a: &KForm<S>) -> KForm<S> {
        let n = self.dim();
        assert_eq!(a.dim(), n, "form dimension does not match frame");
        let mut out = KForm::zero(n, a.degree() + 1);
        if a.degree() >= n {
            return out;
        }
        for (m, v) in a.terms() {
            for (p, i) in indices(m).enumerate() {
                let rest: Mask = m & !(1 << i);
                let pre: Mask = m & ((1 << i) - 1);
                let post: Mask = rest & !pre;
                for (jk, w) in self.de[i].terms() {
                    if jk & rest != 0 {
                        continue;
                    }
                    let s = merge_sign(pre, jk) * merge_sign(pre | jk, post);
                    let t = v.clone() * w.clone();
                    let sign = if p % 2 == 0 { s } else { -s };
                    out.add_term(rest | jk, if sign > 0 { t } else { -t });
                }
            }
        }
        out
    }

    pub fn hodge(&self, a: &KForm<S>) -> KForm<S> {
        self.geometry.star(a)
    }

    /// d⋆ = (−1)^{n(k+1)+1} ⋆ d ⋆ on k-forms.
    pub fn codifferential(&self, a: &KForm<S>) -> KForm<S> {
        let n = self.dim();
        if a.degree() == 0 {
            return KForm::zero(n, 0);
        }
        let r = self.hodge(&self.d(&self.hodge(a)));
        if (n * (a.degree() + 1) + 1) % 2 == 0 {
            r
        } else {
            -r
        }
    }

    /// New coframe η^a = Σ_i A[a][i] e^i. Returns the frame in η and the
    /// substitution matrix e^j = Σ_b M[j][b] η^b for transporting forms.
    pub fn change_coframe(&self, a: &Mat<S>, labels: Vec<String>) -> Result<(Self, Mat<S>), LieError> {
        let m = a.inverse().ok_or(LieError::SingularCoframe)?;
        let n = self.dim();
        let de: Vec<KForm<S>> = (0..n)
            .map(|r| {
                let mut f = KForm::zero(n, 2);
                for i in 0..n {
                    if !a[(r, i)].is_zero() {
                        f = f + self.de[i].scale(&a[(r, i)]);
                    }
                }
                f.substitute(&m)
            })
            .collect();
        // dual frame f_a = Σ_i M[i][a] e_i
        let metric = m.transpose().mul(self.geometry.metric()).mul(&m);
        let g = FrameGeometry::new(metric, (0..n).collect())?;
        let g = if a.det().signum() * self.geometry.orientation_sign() < 0 { g.flipped() } else { g };
        Ok((LieAlgebraFrame::new(labels, de, g)?, m))
    }

    /// Divide all structure constants by λ (a homothety of the metric by λ²
    /// when form coefficients are kept).
    pub fn rescale(&self, lambda: &S) -> Self {
        let inv = lambda.inv().expect("nonzero scale");
        let de = self.de.iter().map(|f| f.scale(&inv)).collect();
        LieAlgebraFrame::new(self.labels.clone(), de, self.geometry.clone()).expect("rescaling keeps Jacobi")
    }

    fn connection_from_lowered(&self, low: Vec<S>) -> ConnectionCoeffs<S> {
        let n = self.dim();
        let ginv = self.geometry.inverse();
        let mut gamma = vec![S::zero(); n * n * n];
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let v = &low[(i * n + j) * n + l];
                    if v.is_zero() {
                        continue;
                    }
                    for k in 0..n {
                        let gi = &ginv[(k, l)];
                        if !gi.is_zero() {
                            let t = &mut gamma[(i * n + j) * n + k];
                            *t = t.clone() + gi.clone() * v.clone();
                        }
                    }
                }
            }
        }
        ConnectionCoeffs::from_vec(n, gamma)
    }

    /// g(∇_{e_i} e_j, e_k) for the Levi-Civita connection (Koszul formula).
    fn levi_civita_lowered(&self) -> Vec<S> {
        let n = self.dim();
        let g = self.geometry.metric();
        let mut b = vec![S::zero(); n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut acc = S::zero();
                    for m in 0..n {
                        let c = self.structure_constant(m, i, j);
                        if !c.is_zero() && !g[(m, k)].is_zero() {
                            acc = acc + c.clone() * g[(m, k)].clone();
                        }
                    }
                    b[(i * n + j) * n + k] = acc;
                }
            }
        }
        let at = |i: usize, j: usize, k: usize| b[(i * n + j) * n + k].clone();
        let half = S::ratio(1, 2);
        let mut low = vec![S::zero(); n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = at(i, j, k) - at(j, k, i) + at(k, i, j);
                    if !v.is_zero() {
                        low[(i * n + j) * n + k] = v * half.clone();
                    }
                }
            }
        }
        low
    }

    pub fn levi_civita(&self) -> ConnectionCoeffs<S> {
        self.connection_from_lowered(self.levi_civita_lowered())
    }

    /// ∇ = D + ½ g⁻¹H.
    pub fn bismut(&self, h: &KForm<S>) -> Result<ConnectionCoeffs<S>, LieError> {
        let n = self.dim();
        if h.dim() != n {
            return Err(ExteriorError::DimensionMismatch(h.dim(), n).into());
        }
        if h.degree() != 3 && !h.is_zero() {
            return Err(ExteriorError::DegreeMismatch(h.degree(), 3).into());
        }
        let mut low = self.levi_civita_lowered();
        add_half_torsion(&mut low, n, h);
        Ok(self.connection_from_lowered(low))
    }

    /// Connection D + ½ g⁻¹H restricted to the H part (no Levi-Civita term).
    pub fn torsion_part(&self, h: &KForm<S>) -> ConnectionCoeffs<S> {
        let n = self.dim();
        let mut low = vec![S::zero(); n * n * n];
        add_half_torsion(&mut low, n, h);
        self.connection_from_lowered(low)
    }

    /// Torsion 3-form T(X, Y, Z) = g(∇_X Y − ∇_Y X − [X, Y], Z); `None` if not totally skew.
    pub fn torsion_form(&self, conn: &ConnectionCoeffs<S>) -> Option<KForm<S>> {
        let n = self.dim();
        let g = self.geometry.metric();
        let t = |i: usize, j: usize, k: usize| {
            let mut acc = S::zero();
            for m in 0..n {
                let v = conn.get(i, j, m).clone() - conn.get(j, i, m).clone() - self.structure_constant(m, i, j).clone();
                if !v.is_zero() {
                    acc = acc + v * g[(m, k)].clone();
                }
            }
            acc
        };
        let form = KForm::from_alternating(n, 3, |ix| t(ix[0], ix[1], ix[2]));
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if t(i, j, k) != form.eval(&[i, j, k]) {
                        return None;
                    }
                }
            }
        }
        Some(form)
    }

    /// Lowered Riemann tensor g(R(e_i, e_j) e_k, e_l).
    pub fn riemann_lowered(&self, conn: &ConnectionCoeffs<S>) -> Vec<S> {
        let n = self.dim();
        let idx3 = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
        // R^l_{ijk} = Σ_m (Γ^m_{jk} Γ^l_{im} − Γ^m_{ik} Γ^l_{jm}) − Σ_m c^m_{ij} Γ^l_{mk}
        let mut raised = vec![S::zero(); n * n * n * n];
        let mut add = |i: usize, j: usize, k: usize, l: usize, v: S| {
            let t = &mut raised[((i * n + j) * n + k) * n + l];
            *t = t.clone() + v;
        };
        for &(j, k, m) in conn.support() {
            let a = conn.get(j, k, m).clone();
            for &(i, m2, l) in conn.support() {
                if m2 != m {
                    continue;
                }
                let v = a.clone() * conn.get(i, m, l).clone();
                add(i, j, k, l, v.clone());
                add(j, i, k, l, -v);
            }
        }
        for i in 0..n {
            for j in 0..n {
                for m in 0..n {
                    let c = self.c[idx3(m, i, j)].clone();
                    if c.is_zero() {
                        continue;
                    }
                    for &(m2, k, l) in conn.support() {
                        if m2 == m {
                            add(i, j, k, l, -(c.clone() * conn.get(m, k, l).clone()));
                        }
                    }
                }
            }
        }
        let g = self.geometry.metric();
        let mut low = vec![S::zero(); n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let r = &raised[((i * n + j) * n + k) * n + l];
                        if r.is_zero() {
                            continue;
                        }
                        for q in 0..n {
                            if !g[(l, q)].is_zero() {
                                let t = &mut low[((i * n + j) * n + k) * n + q];
                                *t = t.clone() + r.clone() * g[(l, q)].clone();
                            }
                        }
                    }
                }
            }
        }
        low
    }

    pub fn curvature(&self, conn: &ConnectionCoeffs<S>, trace: RicciTrace) -> CurvatureData<S> {
        CurvatureData::from_lowered(self.dim(), self.riemann_lowered(conn), self.geometry.inverse(), trace)
    }

    /// (∇_{e_i} θ)(e_j) = −θ(∇_{e_i} e_j).
    pub fn nabla_oneform(&self, conn: &ConnectionCoeffs<S>, theta: &KForm<S>) -> Mat<S> {
        nabla_oneform(conn, theta)
    }

    /// ∇_{e_i} α for each i.
    pub fn nabla_form(&self, conn: &ConnectionCoeffs<S>, a: &KForm<S>) -> Vec<KForm<S>> {
        nabla_form(conn, a)
    }

    /// ∇_{e_i} X as a matrix (i, k) of components.
    pub fn nabla_vector(&self, conn: &ConnectionCoeffs<S>, x: &VectorField<S>) -> Mat<S> {
        let n = self.dim();
        let mut out = Mat::<S>::zeros(n, n);
        for &(i, j, k) in conn.support() {
            if !x.get(j).is_zero() {
                out[(i, k)] = out[(i, k)].clone() + x.get(j).clone() * conn.get(i, j, k).clone();
            }
        }
        out
    }

    /// ad_V as a matrix: column j holds [V, e_j].
    pub fn ad(&self, v: &VectorField<S>) -> Mat<S> {
        let n = self.dim();
        let cols: Vec<VectorField<S>> = (0..n).map(|j| self.bracket(v, &VectorField::basis(n, j))).collect();
        Mat::from_fn(n, n, |i, j| cols[j].get(i).clone())
    }

    /// L_V = d i_V + i_V d on invariant forms.
    pub fn lie_derivative(&self, v: &VectorField<S>, a: &KForm<S>) -> KForm<S> {
        let x = self.d(&a.interior(v));
        let y = self.d(a).interior(v);
        if a.degree() == 0 {
            return KForm::zero(self.dim(), 0);
        }
        x + y
    }

    pub fn convert<T: Scalar>(&self, f: impl Fn(&S) -> T) -> LieAlgebraFrame<T> {
        let de = self.de.iter().map(|x| x.map_coeffs(&f)).collect();
        LieAlgebraFrame::new(self.labels.clone(), de, self.geometry.convert(&f)).expect("converted frame")
    }
}

fn add_half_torsion<S: Scalar>(low: &mut [S], n: usize, h: &KForm<S>) {
    let half = S::ratio(1, 2);
    for (m, v) in h.terms() {
        let ix: Vec<usize> = indices(m).collect();
        let hv = v.clone() * half.clone();
        for (p, s) in PERMS3 {
            let (i, j, k) = (ix[p[0]], ix[p[1]], ix[p[2]]);
            let t = &mut low[(i * n + j) * n + k];
            *t = t.clone() + if s > 0 { hv.clone() } else { -hv.clone() };
        }
    }
}

const PERMS3: [([usize; 3], i8); 6] = [
    ([0, 1, 2], 1),
    ([1, 2, 0], 1),
    ([2, 0, 1], 1),
    ([1, 0, 2], -1),
    ([0, 2, 1], -1),
    ([2, 1, 0], -1),
];

/// (∇_{e_i} θ)(e_j) = −Σ_m Γ^m_{ij} θ_m.
pub fn nabla_oneform<S: Scalar>(conn: &ConnectionCoeffs<S>, theta: &KForm<S>) -> Mat<S> {
    let n = conn.dim();
    let th = theta.components();
    let mut out = Mat::<S>::zeros(n, n);
    for &(i, j, m) in conn.support() {
        if !th[m].is_zero() {
            out[(i, j)] = out[(i, j)].clone() - conn.get(i, j, m).clone() * th[m].clone();
        }
    }
    out
}

/// ∇_{e_i} α, using ∇_{e_i} e^a = −Σ_m Γ^a_{im} e^m.
pub fn nabla_form<S: Scalar>(conn: &ConnectionCoeffs<S>, a: &KForm<S>) -> Vec<KForm<S>> {
    let n = conn.dim();
    let mut out: Vec<KForm<S>> = (0..n).map(|_| KForm::zero(n, a.degree())).collect();
    for &(i, m, ai) in conn.support() {
        let g = conn.get(i, m, ai);
        for (mask, v) in a.terms() {
            if mask >> ai & 1 == 0 {
                continue;
            }
            let rest = mask & !(1 << ai);
            // e^I = (−1)^pos e^a ∧ e^{I∖a}; replace e^a by e^m
            let pos = (mask & ((1 << ai) - 1)).count_ones();
            let s = merge_sign(1 << m, rest);
            if s == 0 {
                continue;
            }
            let sign = if pos % 2 == 0 { -s } else { s };
            let t = g.clone() * v.clone();
            out[i].add_term(rest | (1 << m), if sign > 0 { t } else { -t });
        }
    }
    out
}
