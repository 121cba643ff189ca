//! Exterior algebra on an oriented inner-product space of dimension at most 8.
//!
//! Basis k-forms `e^I` are encoded by bitmasks; bit `i` set means index `i`
//! (0-based) occurs in `I`.

use crate::linalg::Mat;
use crate::scalar::Scalar;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

pub type Mask = u16;

pub const MAX_DIM: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExteriorError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("dimension {0} outside 1..=8")]
    BadDimension(usize),
    #[error("index {0} out of range for dimension {1}")]
    IndexOutOfRange(usize, usize),
    #[error("metric is not symmetric")]
    NotSymmetric,
    #[error("metric is not positive definite")]
    NotPositiveDefinite,
    #[error("det g is not a perfect square in the scalar field")]
    NonSquareDeterminant,
    #[error("orientation is not a permutation of 0..{0}")]
    BadOrientation(usize),
}

pub fn indices(mask: Mask) -> impl Iterator<Item = usize> {
    (0..16).filter(move |i| mask >> i & 1 == 1)
}

pub fn mask_of(idx: &[usize]) -> Mask {
    idx.iter().fold(0, |m, &i| m | (1 << i))
}

/// Sign of the shuffle that sorts the concatenation `a ++ b`, or 0 if they overlap.
pub fn merge_sign(a: Mask, b: Mask) -> i8 {
    if a & b != 0 {
        return 0;
    }
    let mut inversions = 0u32;
    for j in indices(b) {
        inversions += (a >> (j + 1)).count_ones();
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Parity of a sequence of distinct indices, or 0 on repetition.
pub fn perm_sign(seq: &[usize]) -> i8 {
    let mut s = 1;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] == seq[j] {
                return 0;
            }
            if seq[i] > seq[j] {
                s = -s;
            }
        }
    }
    s
}

fn signed<S: Scalar>(s: i8, x: S) -> S {
    match s {
        1 => x,
        -1 => -x,
        _ => S::zero(),
    }
}

/// Binomial coefficient for small arguments.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// All k-subsets of `0..n` as masks, in lexicographic index order.
pub fn subsets(n: usize, k: usize) -> Vec<Mask> {
    fn rec(start: usize, n: usize, k: usize, cur: Mask, out: &mut Vec<Mask>) {
        if k == 0 {
            out.push(cur);
            return;
        }
        for i in start..n {
            rec(i + 1, n, k - 1, cur | (1 << i), out);
        }
    }
    let mut out = Vec::with_capacity(binomial(n, k));
    rec(0, n, k, 0, &mut out);
    out
}

/// A constant-coefficient k-form on an n-dimensional frame.
#[derive(Clone)]
pub struct KForm<S> {
    n: usize,
    k: usize,
    c: BTreeMap<Mask, S>,
}

impl<S: Scalar> PartialEq for KForm<S> {
    fn eq(&self, o: &Self) -> bool {
        if self.n != o.n || self.k != o.k {
            return false;
        }
        let z = S::zero();
        self.c.iter().all(|(m, v)| *v == *o.c.get(m).unwrap_or(&z))
            && o.c.iter().all(|(m, v)| *v == *self.c.get(m).unwrap_or(&z))
    }
}

impl<S: Scalar> fmt::Debug for KForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(&default_labels(self.n)))
    }
}

impl<S: Scalar> fmt::Display for KForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(&default_labels(self.n)))
    }
}

/// Labels `e1 … en`.
pub fn default_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("e{i}")).collect()
}

impl<S: Scalar> KForm<S> {
    pub fn zero(n: usize, k: usize) -> Self {
        assert!(n <= MAX_DIM && k <= n.max(k), "bad form shape");
        KForm { n, k, c: BTreeMap::new() }
    }

    pub fn constant(n: usize, s: S) -> Self {
        Self::from_terms(n, 0, [(0, s)])
    }

    /// `e^{i₁} ∧ … ∧ e^{i_k}` for arbitrary (possibly unsorted) indices.
    pub fn basis(n: usize, idx: &[usize]) -> Self {
        assert!(idx.iter().all(|&i| i < n), "index out of range");
        let s = perm_sign(idx);
        let mut f = Self::zero(n, idx.len());
        if s != 0 {
            f.c.insert(mask_of(idx), signed(s, S::one()));
        }
        f
    }

    pub fn from_terms(n: usize, k: usize, terms: impl IntoIterator<Item = (Mask, S)>) -> Self {
        let mut f = Self::zero(n, k);
        for (m, v) in terms {
            debug_assert_eq!(m.count_ones() as usize, k);
            f.add_term(m, v);
        }
        f
    }

    /// Build from an alternating function evaluated on sorted index tuples.
    pub fn from_alternating(n: usize, k: usize, f: impl Fn(&[usize]) -> S) -> Self {
        Self::from_terms(
            n,
            k,
            subsets(n, k).into_iter().map(|m| {
                let idx: Vec<usize> = indices(m).collect();
                (m, f(&idx))
            }),
        )
    }

    /// One-form with the given components.
    pub fn one_form(comps: &[S]) -> Self {
        Self::from_terms(comps.len(), 1, comps.iter().enumerate().map(|(i, v)| (1 << i, v.clone())))
    }

    pub fn add_term(&mut self, m: Mask, v: S) {
        if v.is_zero() {
            return;
        }
        match self.c.get_mut(&m) {
            Some(x) => {
                *x = x.clone() + v;
                if x.is_zero() {
                    self.c.remove(&m);
                }
            }
            None => {
                self.c.insert(m, v);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }
    pub fn degree(&self) -> usize {
        self.k
    }
    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
    pub fn len(&self) -> usize {
        self.c.len()
    }
    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    pub fn coeff(&self, m: Mask) -> S {
        self.c.get(&m).cloned().unwrap_or_else(S::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (Mask, &S)> {
        self.c.iter().map(|(m, v)| (*m, v))
    }

    /// Value of the 0-form.
    pub fn scalar_value(&self) -> S {
        assert_eq!(self.k, 0, "not a 0-form");
        self.coeff(0)
    }

    /// Coefficients of a one-form as a dense vector.
    pub fn components(&self) -> Vec<S> {
        assert_eq!(self.k, 1, "not a 1-form");
        (0..self.n).map(|i| self.coeff(1 << i)).collect()
    }

    /// Antisymmetric tensor component α(e_{i₁}, …, e_{i_k}).
    pub fn eval(&self, idx: &[usize]) -> S {
        assert_eq!(idx.len(), self.k);
        let s = perm_sign(idx);
        if s == 0 {
            return S::zero();
        }
        signed(s, self.coeff(mask_of(idx)))
    }

    /// α(X₁, …, X_k) for arbitrary vectors.
    pub fn eval_vectors(&self, xs: &[&VectorField<S>]) -> S {
        assert_eq!(xs.len(), self.k);
        let mut f = self.clone();
        for x in xs {
            f = x.interior_unchecked(&f);
        }
        f.scalar_value()
    }

    pub fn check_same_dim(&self, o: &Self) -> Result<(), ExteriorError> {
        if self.n != o.n {
            Err(ExteriorError::DimensionMismatch(self.n, o.n))
        } else {
            Ok(())
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        if s.is_zero() {
            return Self::zero(self.n, self.k);
        }
        Self::from_terms(self.n, self.k, self.c.iter().map(|(m, v)| (*m, v.clone() * s.clone())))
    }

    pub fn map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> T) -> KForm<T> {
        KForm::from_terms(self.n, self.k, self.c.iter().map(|(m, v)| (*m, f(v))))
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self, ExteriorError> {
        self.check_same_dim(o)?;
        if o.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(o.clone());
        }
        if self.k != o.k {
            return Err(ExteriorError::DegreeMismatch(self.k, o.k));
        }
        let mut r = self.clone();
        for (m, v) in &o.c {
            r.add_term(*m, v.clone());
        }
        Ok(r)
    }

    pub fn checked_wedge(&self, o: &Self) -> Result<Self, ExteriorError> {
        self.check_same_dim(o)?;
        let k = self.k + o.k;
        if k > self.n {
            return Ok(Self::zero(self.n, k));
        }
        let mut r = Self::zero(self.n, k);
        for (a, x) in &self.c {
            for (b, y) in &o.c {
                let s = merge_sign(*a, *b);
                if s != 0 {
                    r.add_term(a | b, signed(s, x.clone() * y.clone()));
                }
            }
        }
        Ok(r)
    }

    /// Wedge product. Panics on dimension mismatch; see [`KForm::checked_wedge`].
    pub fn wedge(&self, o: &Self) -> Self {
        self.checked_wedge(o).expect("wedge")
    }

    /// Interior product with a vector. Panics on dimension mismatch.
    pub fn interior(&self, x: &VectorField<S>) -> Self {
        x.interior(self).expect("interior")
    }

    /// Replace the coframe: `e^j = Σ_b m[(j, b)] η^b`.
    pub fn substitute(&self, m: &Mat<S>) -> Self {
        let n = self.n;
        let rows: Vec<KForm<S>> = (0..n).map(|j| KForm::one_form(&m.row(j))).collect();
        let mut out = Self::zero(n, self.k);
        for (mask, v) in &self.c {
            let mut t = KForm::constant(n, v.clone());
            for j in indices(*mask) {
                t = t.wedge(&rows[j]);
            }
            out = out + t;
        }
        out
    }

    /// Embed into a larger dimension, keeping indices.
    pub fn embed(&self, n: usize) -> Self {
        assert!(n >= self.n);
        KForm { n, k: self.k, c: self.c.clone() }
    }

    /// Restrict to the first `n` indices; fails if a term involves a later index.
    pub fn restrict(&self, n: usize) -> Option<Self> {
        let lim: Mask = ((1u32 << n) - 1) as Mask;
        if self.c.keys().any(|m| m & !lim != 0) {
            return None;
        }
        Some(KForm { n, k: self.k, c: self.c.clone() })
    }

    /// Relabel indices by `perm[i]`.
    pub fn permute(&self, perm: &[usize], n: usize) -> Self {
        let mut out = Self::zero(n, self.k);
        for (m, v) in &self.c {
            let idx: Vec<usize> = indices(*m).map(|i| perm[i]).collect();
            let s = perm_sign(&idx);
            out.add_term(mask_of(&idx), signed(s, v.clone()));
        }
        out
    }

    /// Human-readable rendering with the given frame labels.
    pub fn render(&self, labels: &[String]) -> String {
        if self.c.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, v)) in self.c.iter().enumerate() {
            let mono: Vec<&str> = indices(*m).map(|j| labels[j].as_str()).collect();
            let mono = mono.join("^");
            let (neg, mag) = split_sign(v);
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            match (mag.as_str(), mono.is_empty()) {
                ("1", false) => out.push_str(&mono),
                (_, true) => out.push_str(&mag),
                _ => {
                    out.push_str(&mag);
                    out.push('*');
                    out.push_str(&mono);
                }
            }
        }
        out
    }
}

/// Split a scalar into (is_negative, canonical magnitude text) for rendering.
/// Compound magnitudes are parenthesised.
pub fn split_sign<S: Scalar>(v: &S) -> (bool, String) {
    let neg = v.signum() < 0;
    let m = if neg { -v.clone() } else { v.clone() };
    let s = m.canonical();
    let atomic = s.chars().all(|c| c.is_ascii_alphanumeric() || c == '/' || c == '.')
        || (s.starts_with('(') && s.ends_with(')') && !s[1..].contains('('));
    if atomic && !s.contains('/') {
        (neg, s)
    } else {
        (neg, format!("({s})"))
    }
}

impl<S: Scalar> std::ops::Add for KForm<S> {
    type Output = KForm<S>;
    fn add(self, o: KForm<S>) -> KForm<S> {
        self.checked_add(&o).expect("form addition")
    }
}

impl<S: Scalar> std::ops::Sub for KForm<S> {
    type Output = KForm<S>;
    fn sub(self, o: KForm<S>) -> KForm<S> {
        self.checked_add(&(-o)).expect("form subtraction")
    }
}

impl<S: Scalar> std::ops::Neg for KForm<S> {
    type Output = KForm<S>;
    fn neg(self) -> KForm<S> {
        KForm { n: self.n, k: self.k, c: self.c.into_iter().map(|(m, v)| (m, -v)).collect() }
    }
}

impl<'a, S: Scalar> std::ops::Add<&'a KForm<S>> for &'a KForm<S> {
    type Output = KForm<S>;
    fn add(self, o: &KForm<S>) -> KForm<S> {
        self.checked_add(o).expect("form addition")
    }
}

impl<'a, S: Scalar> std::ops::Sub<&'a KForm<S>> for &'a KForm<S> {
    type Output = KForm<S>;
    fn sub(self, o: &KForm<S>) -> KForm<S> {
        self.checked_add(&-(o.clone())).expect("form subtraction")
    }
}

/// Constant vector field in the frame basis.
#[derive(Clone, PartialEq)]
pub struct VectorField<S> {
    comps: Vec<S>,
}

impl<S: Scalar> fmt::Debug for VectorField<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.comps.iter().map(|x| x.canonical()).collect();
        write!(f, "V[{}]", c.join(", "))
    }
}

impl<S: Scalar> VectorField<S> {
    pub fn new(comps: Vec<S>) -> Self {
        VectorField { comps }
    }
    pub fn zero(n: usize) -> Self {
        VectorField { comps: vec![S::zero(); n] }
    }
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = Self::zero(n);
        v.comps[i] = S::one();
        v
    }
    pub fn dim(&self) -> usize {
        self.comps.len()
    }
    pub fn comps(&self) -> &[S] {
        &self.comps
    }
    pub fn get(&self, i: usize) -> &S {
        &self.comps[i]
    }
    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|x| x.is_zero())
    }
    pub fn scale(&self, s: &S) -> Self {
        VectorField { comps: self.comps.iter().map(|x| x.clone() * s.clone()).collect() }
    }
    pub fn add(&self, o: &Self) -> Self {
        VectorField { comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a.clone() + b.clone()).collect() }
    }
    pub fn sub(&self, o: &Self) -> Self {
        VectorField { comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a.clone() - b.clone()).collect() }
    }

    /// `i_X α`, contracting the first slot.
    pub fn interior(&self, a: &KForm<S>) -> Result<KForm<S>, ExteriorError> {
        if self.dim() != a.n {
            return Err(ExteriorError::DimensionMismatch(self.dim(), a.n));
        }
        Ok(self.interior_unchecked(a))
    }

    fn interior_unchecked(&self, a: &KForm<S>) -> KForm<S> {
        if a.k == 0 {
            return KForm::zero(a.n, 0);
        }
        let mut r = KForm::zero(a.n, a.k - 1);
        for (m, v) in &a.c {
            for i in indices(*m) {
                let x = &self.comps[i];
                if x.is_zero() {
                    continue;
                }
                let pos = (m & ((1 << i) - 1)).count_ones();
                let t = x.clone() * v.clone();
                r.add_term(m & !(1 << i), if pos % 2 == 0 { t } else { -t });
            }
        }
        r
    }
}

/// Metric, inverse metric and orientation of a frame.
#[derive(Clone, PartialEq)]
pub struct FrameGeometry<S> {
    n: usize,
    metric: Mat<S>,
    inverse: Mat<S>,
    orientation: Vec<usize>,
    /// vol = vol_scale · e^{0…n−1}
    vol_scale: S,
    diagonal: bool,
}

impl<S: Scalar> fmt::Debug for FrameGeometry<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FrameGeometry")
            .field("metric", &self.metric)
            .field("orientation", &self.orientation)
            .finish()
    }
}

impl<S: Scalar> FrameGeometry<S> {
    pub fn identity(n: usize) -> Self {
        Self::new(Mat::identity(n), (0..n).collect()).expect("identity metric")
    }

    pub fn new(metric: Mat<S>, orientation: Vec<usize>) -> Result<Self, ExteriorError> {
        let n = metric.rows();
        if n == 0 || n > MAX_DIM {
            return Err(ExteriorError::BadDimension(n));
        }
        if !metric.is_symmetric() {
            return Err(ExteriorError::NotSymmetric);
        }
        let mut seen = vec![false; n];
        if orientation.len() != n || orientation.iter().any(|&i| i >= n || std::mem::replace(&mut seen[i], true)) {
            return Err(ExteriorError::BadOrientation(n));
        }
        if !metric.is_positive_definite() {
            return Err(ExteriorError::NotPositiveDefinite);
        }
        let root = metric.det().sqrt().ok_or(ExteriorError::NonSquareDeterminant)?;
        let inverse = metric.inverse().ok_or(ExteriorError::NotPositiveDefinite)?;
        let s = perm_sign(&orientation);
        let vol_scale = if s > 0 { root } else { -root };
        let diagonal = metric.is_diagonal();
        Ok(FrameGeometry { n, metric, inverse, orientation, vol_scale, diagonal })
    }

    pub fn dim(&self) -> usize {
        self.n
    }
    pub fn metric(&self) -> &Mat<S> {
        &self.metric
    }
    pub fn inverse(&self) -> &Mat<S> {
        &self.inverse
    }
    pub fn orientation(&self) -> &[usize] {
        &self.orientation
    }
    /// +1 if the orientation agrees with the label order.
    pub fn orientation_sign(&self) -> i8 {
        perm_sign(&self.orientation)
    }

    /// Same metric, opposite orientation.
    pub fn flipped(&self) -> Self {
        let mut g = self.clone();
        if g.n >= 2 {
            g.orientation.swap(0, 1);
        }
        g.vol_scale = -g.vol_scale;
        g
    }

    pub fn with_metric(&self, metric: Mat<S>) -> Result<Self, ExteriorError> {
        Self::new(metric, self.orientation.clone())
    }

    pub fn vol_scale(&self) -> &S {
        &self.vol_scale
    }

    pub fn vol(&self) -> KForm<S> {
        KForm::from_terms(self.n, self.n, [(((1u32 << self.n) - 1) as Mask, self.vol_scale.clone())])
    }

    /// ⟨e^I, e^J⟩ = det(g^{-1}[I, J]).
    pub fn basis_inner(&self, a: Mask, b: Mask) -> S {
        if self.diagonal {
            if a != b {
                return S::zero();
            }
            return indices(a).fold(S::one(), |acc, i| acc * self.inverse[(i, i)].clone());
        }
        let ia: Vec<usize> = indices(a).collect();
        let ib: Vec<usize> = indices(b).collect();
        self.inverse.submatrix(&ia, &ib).det()
    }

    pub fn inner(&self, a: &KForm<S>, b: &KForm<S>) -> Result<S, ExteriorError> {
        a.check_same_dim(b)?;
        if a.n != self.n {
            return Err(ExteriorError::DimensionMismatch(a.n, self.n));
        }
        if a.k != b.k {
            return Err(ExteriorError::DegreeMismatch(a.k, b.k));
        }
        let mut acc = S::zero();
        if self.diagonal {
            for (m, x) in &a.c {
                if let Some(y) = b.c.get(m) {
                    acc = acc + x.clone() * y.clone() * self.basis_inner(*m, *m);
                }
            }
            return Ok(acc);
        }
        for (ma, x) in &a.c {
            for (mb, y) in &b.c {
                let g = self.basis_inner(*ma, *mb);
                if !g.is_zero() {
                    acc = acc + x.clone() * y.clone() * g;
                }
            }
        }
        Ok(acc)
    }

    pub fn norm2(&self, a: &KForm<S>) -> S {
        self.inner(a, a).expect("norm")
    }

    /// Hodge star: α ∧ ⋆β = ⟨α, β⟩ vol.
    pub fn hodge(&self, b: &KForm<S>) -> Result<KForm<S>, ExteriorError> {
        if b.n != self.n {
            return Err(ExteriorError::DimensionMismatch(b.n, self.n));
        }
        let full: Mask = ((1u32 << self.n) - 1) as Mask;
        let mut out = KForm::zero(self.n, self.n - b.k);
        let push = |out: &mut KForm<S>, j: Mask, c: S| {
            let jc = full & !j;
            let s = merge_sign(j, jc);
            out.add_term(jc, signed(s, c * self.vol_scale.clone()));
        };
        if self.diagonal {
            for (m, x) in &b.c {
                push(&mut out, *m, x.clone() * self.basis_inner(*m, *m));
            }
        } else {
            for j in subsets(self.n, b.k) {
                let mut c = S::zero();
                for (m, x) in &b.c {
                    let g = self.basis_inner(j, *m);
                    if !g.is_zero() {
                        c = c + g * x.clone();
                    }
                }
                push(&mut out, j, c);
            }
        }
        Ok(out)
    }

    pub fn star(&self, b: &KForm<S>) -> KForm<S> {
        self.hodge(b).expect("hodge star")
    }

    pub fn flat(&self, x: &VectorField<S>) -> KForm<S> {
        KForm::one_form(&self.metric.mul_vec(x.comps()))
    }

    pub fn sharp(&self, a: &KForm<S>) -> Result<VectorField<S>, ExteriorError> {
        if a.k != 1 {
            return Err(ExteriorError::DegreeMismatch(a.k, 1));
        }
        Ok(VectorField::new(self.inverse.mul_vec(&a.components())))
    }

    pub fn inner_vectors(&self, x: &VectorField<S>, y: &VectorField<S>) -> S {
        let gy = self.metric.mul_vec(y.comps());
        x.comps().iter().zip(gy).fold(S::zero(), |acc, (a, b)| acc + a.clone() * b)
    }

    pub fn convert<T: Scalar>(&self, f: impl Fn(&S) -> T) -> FrameGeometry<T> {
        FrameGeometry {
            n: self.n,
            metric: self.metric.convert(&f),
            inverse: self.inverse.convert(&f),
            orientation: self.orientation.clone(),
            vol_scale: f(&self.vol_scale),
            diagonal: self.diagonal,
        }
    }
}

/// F²(X, Y) = ⟨i_X F, i_Y F⟩ on the frame vectors, with the inner product on
/// 1-forms given by `ginv`.
pub fn two_form_square<S: Scalar>(f: &KForm<S>, ginv: &Mat<S>) -> Mat<S> {
    assert_eq!(f.degree(), 2, "two_form_square needs a 2-form");
    let n = f.dim();
    let rows: Vec<Vec<S>> = (0..n).map(|a| f.interior(&VectorField::basis(n, a)).components()).collect();
    let g_rows: Vec<Vec<S>> = rows.iter().map(|r| ginv.mul_vec(r)).collect();
    Mat::from_fn(n, n, |a, b| {
        rows[a].iter().zip(&g_rows[b]).fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
    })
}

/// ⟨F, H⟩(Z) = ½ Σ F^{ab} H(e_a, e_b, Z) = ⟨F, i_Z H⟩.
pub fn contract_2_3<S: Scalar>(f: &KForm<S>, h: &KForm<S>, geom: &FrameGeometry<S>) -> Result<KForm<S>, ExteriorError> {
    if f.degree() != 2 {
        return Err(ExteriorError::DegreeMismatch(f.degree(), 2));
    }
    if h.degree() != 3 {
        return Err(ExteriorError::DegreeMismatch(h.degree(), 3));
    }
    f.check_same_dim(h)?;
    let n = f.dim();
    let comps: Result<Vec<S>, _> =
        (0..n).map(|z| geom.inner(f, &h.interior(&VectorField::basis(n, z)))).collect();
    Ok(KForm::one_form(&comps?))
}
