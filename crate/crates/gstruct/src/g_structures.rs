//! Almost Hermitian, SU(3), G₂ and Spin(7) structures: validation, induced
//! metrics, representation projections, torsion classes and Bismut torsion.

use crate::exterior::{ExteriorError, FrameGeometry, KForm, Mask, VectorField};
use crate::lie_frame::{nabla_form, ConnectionCoeffs, LieError, RicciTrace};
use crate::linalg::{LinearSystem, Mat};
use crate::scalar::Scalar;
use crate::space::Space;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Kind {
    AlmostHermitian,
    SU3,
    G2,
    Spin7,
}

impl Kind {
    pub fn name(&self) -> &'static str {
        match self {
            Kind::AlmostHermitian => "ah",
            Kind::SU3 => "su3",
            Kind::G2 => "g2",
            Kind::Spin7 => "spin7",
        }
    }

    pub fn from_name(s: &str) -> Option<Kind> {
        match s {
            "ah" => Some(Kind::AlmostHermitian),
            "su3" => Some(Kind::SU3),
            "g2" => Some(Kind::G2),
            "spin7" => Some(Kind::Spin7),
            _ => None,
        }
    }

    /// Required intrinsic dimension (AH: any even dimension ≥ 4).
    pub fn dimension(&self) -> Option<usize> {
        match self {
            Kind::AlmostHermitian => None,
            Kind::SU3 => Some(6),
            Kind::G2 => Some(7),
            Kind::Spin7 => Some(8),
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StructureError {
    #[error("{kind} structures need dimension {expected}, got {got}")]
    Dimension { kind: Kind, expected: usize, got: usize },
    #[error("form has degree {got}, expected {expected}")]
    Degree { expected: usize, got: usize },
    #[error("incompatible structure: {0}")]
    Incompatible(String),
    #[error("not a positive 3-form: B is not definite")]
    NotPositive,
    #[error("metric not representable exactly")]
    MetricNotRepresentable,
    #[error("frame not adapted: {0}")]
    FrameNotAdapted(String),
    #[error("J² ≠ −1: ω is not compatible with the metric")]
    NotAlmostComplex,
    #[error("Nijenhuis not skew — no skew-torsion connection exists")]
    NijenhuisNotSkew,
    #[error("no skew-torsion connection for this G₂ structure (τ₂ ≠ 0)")]
    Tau2Nonzero,
    #[error("the Hermitian Bismut connection does not preserve Ω⁺")]
    OmegaPlusNotParallel,
    #[error("no solution: the structure admits no skew-torsion connection")]
    NoSolution,
    #[error("non-unique solution")]
    NonUnique,
    #[error("inconsistent decomposition: {0}")]
    Inconsistent(String),
    #[error("no decomposition for {kind} forms of degree {degree}")]
    NoDecomposition { kind: Kind, degree: usize },
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
}

type Result<T> = std::result::Result<T, StructureError>;

// ---------------------------------------------------------------------------
// Model forms

fn terms_form<S: Scalar>(n: usize, terms: &[(i64, &[usize])]) -> KForm<S> {
    terms.iter().fold(KForm::zero(n, terms[0].1.len()), |acc, (c, idx)| {
        acc + KForm::basis(n, idx).scale(&S::from_i64(*c))
    })
}

/// (ω₀, Ω₀⁺) = (e12 + e34 + e56, e135 − e146 − e236 − e245).
pub fn model_su3<S: Scalar>() -> (KForm<S>, KForm<S>) {
    let om = terms_form(6, &[(1, &[0, 1]), (1, &[2, 3]), (1, &[4, 5])]);
    let op = terms_form(6, &[(1, &[0, 2, 4]), (-1, &[0, 3, 5]), (-1, &[1, 2, 5]), (-1, &[1, 3, 4])]);
    (om, op)
}

/// φ₀ = e127 + e135 − e146 − e236 − e245 + e347 + e567.
pub fn model_g2<S: Scalar>() -> KForm<S> {
    terms_form(
        7,
        &[
            (1, &[0, 1, 6]),
            (1, &[0, 2, 4]),
            (-1, &[0, 3, 5]),
            (-1, &[1, 2, 5]),
            (-1, &[1, 3, 4]),
            (1, &[2, 3, 6]),
            (1, &[4, 5, 6]),
        ],
    )
}

/// Ψ₀ with the printed labels 1…8 mapped to indices 0…7.
pub fn model_spin7<S: Scalar>() -> KForm<S> {
    let printed: [(i64, [usize; 4]); 14] = [
        (-1, [1, 2, 3, 8]),
        (1, [1, 3, 4, 7]),
        (-1, [1, 4, 5, 8]),
        (-1, [1, 6, 7, 8]),
        (1, [1, 2, 5, 7]),
        (1, [1, 3, 5, 6]),
        (-1, [1, 2, 4, 6]),
        (-1, [4, 5, 6, 7]),
        (-1, [2, 5, 6, 8]),
        (-1, [2, 3, 6, 7]),
        (-1, [2, 3, 4, 5]),
        (-1, [3, 4, 6, 8]),
        (-1, [2, 4, 7, 8]),
        (1, [3, 5, 7, 8]),
    ];
    printed.iter().fold(KForm::zero(8, 4), |acc, (c, idx)| {
        let z: Vec<usize> = idx.iter().map(|i| i - 1).collect();
        acc + KForm::basis(8, &z).scale(&S::from_i64(*c))
    })
}

/// Model forms of a kind in its dimension.
pub fn model_form<S: Scalar>(kind: Kind, n: usize) -> Result<Vec<KForm<S>>> {
    let expected = match kind {
        Kind::AlmostHermitian => {
            if n % 2 != 0 || n < 2 {
                return Err(StructureError::Dimension { kind, expected: n + 1, got: n });
            }
            let om = (0..n / 2).fold(KForm::zero(n, 2), |acc, i| acc + KForm::basis(n, &[2 * i, 2 * i + 1]));
            return Ok(vec![om]);
        }
        k => k.dimension().unwrap(),
    };
    if n != expected {
        return Err(StructureError::Dimension { kind, expected, got: n });
    }
    Ok(match kind {
        Kind::SU3 => {
            let (a, b) = model_su3();
            vec![a, b]
        }
        Kind::G2 => vec![model_g2()],
        Kind::Spin7 => vec![model_spin7()],
        Kind::AlmostHermitian => unreachable!(),
    })
}

// ---------------------------------------------------------------------------
// Linear-combination solver over forms

/// Solve Σ x_c cols[c][b] = target[b] for all equation blocks b.
pub(crate) fn solve_combination<S: Scalar>(cols: &[Vec<KForm<S>>], target: &[KForm<S>]) -> Option<(Vec<S>, Vec<Vec<S>>)> {
    use std::collections::BTreeMap;
    let mut rows: BTreeMap<(usize, Mask), Vec<(usize, S)>> = BTreeMap::new();
    for (c, col) in cols.iter().enumerate() {
        for (b, f) in col.iter().enumerate() {
            for (m, v) in f.terms() {
                rows.entry((b, m)).or_default().push((c, v.clone()));
            }
        }
    }
    for (b, f) in target.iter().enumerate() {
        for (m, _) in f.terms() {
            rows.entry((b, m)).or_default();
        }
    }
    let mut sys = LinearSystem::new(cols.len());
    for ((b, m), entries) in rows {
        sys.push(entries, target[b].coeff(m));
    }
    let sol = sys.solve()?;
    Some((sol.particular, sol.nullspace))
}

fn combine<S: Scalar>(x: &[S], gens: &[KForm<S>], n: usize, k: usize) -> KForm<S> {
    let mut acc = KForm::zero(n, k);
    for (c, g) in x.iter().zip(gens) {
        if !c.is_zero() {
            acc = acc + g.scale(c);
        }
    }
    acc
}

fn zero_blocks<S: Scalar>(shapes: &[(usize, usize)]) -> Vec<KForm<S>> {
    shapes.iter().map(|&(n, k)| KForm::zero(n, k)).collect()
}

// ---------------------------------------------------------------------------
// Structures

#[derive(Clone, Debug, PartialEq)]
pub enum Forms<S: Scalar> {
    AlmostHermitian { omega: KForm<S> },
    SU3 { omega: KForm<S>, omega_plus: KForm<S>, omega_minus: KForm<S> },
    G2 { phi: KForm<S>, star_phi: KForm<S> },
    Spin7 { psi: KForm<S> },
}

/// A validated G-structure on a [`Space`].
#[derive(Clone, Debug)]
pub struct GStructure<S: Scalar> {
    kind: Kind,
    space: Space<S>,
    forms: Forms<S>,
    /// J e_j = Σ_k J[(k, j)] e_k
    j: Option<Mat<S>>,
}

fn top_pivot<S: Scalar>(vol: &KForm<S>) -> (Mask, S) {
    let (m, v) = vol.terms().next().expect("nonzero volume");
    (m, v.clone())
}

impl<S: Scalar> GStructure<S> {
    pub fn kind(&self) -> Kind {
        self.kind
    }
    pub fn space(&self) -> &Space<S> {
        &self.space
    }
    pub fn forms(&self) -> &Forms<S> {
        &self.forms
    }
    pub fn j(&self) -> Option<&Mat<S>> {
        self.j.as_ref()
    }
    fn n(&self) -> usize {
        self.space.ambient_dim()
    }

    pub fn omega(&self) -> Option<&KForm<S>> {
        match &self.forms {
            Forms::AlmostHermitian { omega } | Forms::SU3 { omega, .. } => Some(omega),
            _ => None,
        }
    }

    /// The structure forms a compatible connection must preserve.
    pub fn primary_forms(&self) -> Vec<KForm<S>> {
        match &self.forms {
            Forms::AlmostHermitian { omega } => vec![omega.clone()],
            Forms::SU3 { omega, omega_plus, .. } => vec![omega.clone(), omega_plus.clone()],
            Forms::G2 { phi, .. } => vec![phi.clone()],
            Forms::Spin7 { psi } => vec![psi.clone()],
        }
    }

    fn check_dim(kind: Kind, space: &Space<S>) -> Result<()> {
        let got = space.dim();
        match kind.dimension() {
            Some(e) if e != got => Err(StructureError::Dimension { kind, expected: e, got }),
            None if got % 2 != 0 || got < 4 => Err(StructureError::Dimension { kind, expected: got + 1, got }),
            _ => Ok(()),
        }
    }

    fn check_form(space: &Space<S>, f: &KForm<S>, k: usize) -> Result<()> {
        if f.dim() != space.ambient_dim() {
            return Err(ExteriorError::DimensionMismatch(f.dim(), space.ambient_dim()).into());
        }
        if f.degree() != k {
            return Err(StructureError::Degree { expected: k, got: f.degree() });
        }
        if !space.is_horizontal(f) {
            return Err(StructureError::FrameNotAdapted("form is not horizontal".into()));
        }
        Ok(())
    }

    fn compute_j(space: &Space<S>, omega: &KForm<S>) -> Result<Mat<S>> {
        let n = space.ambient_dim();
        let w = Mat::from_fn(n, n, |i, j| omega.eval(&[i, j]));
        let j = space.ginv().mul(&w);
        let minus_p = space.projector().scale(&-S::one());
        if j.mul(&j) != minus_p {
            return Err(StructureError::NotAlmostComplex);
        }
        Ok(j)
    }

    /// Almost Hermitian structure using the space's metric.
    pub fn almost_hermitian(space: Space<S>, omega: KForm<S>) -> Result<Self> {
        Self::check_dim(Kind::AlmostHermitian, &space)?;
        Self::check_form(&space, &omega, 2)?;
        let j = Self::compute_j(&space, &omega)?;
        Ok(GStructure { kind: Kind::AlmostHermitian, space, forms: Forms::AlmostHermitian { omega }, j: Some(j) })
    }

    /// SU(3) structure; the metric is g_ω from −½ i_Xω∧i_YΩ⁺∧Ω⁺ = g(X,Y) ω³/6.
    pub fn su3(space: Space<S>, omega: KForm<S>, omega_plus: KForm<S>) -> Result<Self> {
        Self::check_dim(Kind::SU3, &space)?;
        Self::check_form(&space, &omega, 2)?;
        Self::check_form(&space, &omega_plus, 3)?;
        if !omega.wedge(&omega_plus).is_zero() {
            return Err(StructureError::Incompatible("ω∧Ω⁺ ≠ 0".into()));
        }
        let n = space.ambient_dim();
        let om3 = omega.wedge(&omega).wedge(&omega).scale(&S::ratio(1, 6));
        if om3.is_zero() {
            return Err(StructureError::Incompatible("ω is degenerate".into()));
        }
        let (m0, c0) = top_pivot(&om3);
        let cinv = c0.inv().unwrap();
        let basis = space.frame_vectors();
        let ip: Vec<KForm<S>> = basis.iter().map(|x| omega_plus.interior(x)).collect();
        let io: Vec<KForm<S>> = basis.iter().map(|x| omega.interior(x)).collect();
        let half = S::ratio(-1, 2);
        let gw = Mat::from_fn(n, n, |a, b| {
            io[a].wedge(&ip[b]).wedge(&omega_plus).coeff(m0) * half.clone() * cinv.clone()
        });
        let mut space = space;
        if gw != space.metric() {
            if space.is_transverse() {
                return Err(StructureError::FrameNotAdapted("g_ω differs from the transverse metric".into()));
            }
            let geom = space.frame().geometry().with_metric(gw).map_err(|e| match e {
                ExteriorError::NonSquareDeterminant => StructureError::MetricNotRepresentable,
                ExteriorError::NotPositiveDefinite | ExteriorError::NotSymmetric => {
                    StructureError::Incompatible("g_ω is not positive definite".into())
                }
                e => e.into(),
            })?;
            space = Space::full(space.frame().with_geometry(geom)?);
        }
        let vol = space.vol();
        let ratio = om3.coeff(m0).div(&vol.coeff(m0)).expect("volume pivot");
        if ratio.signum() < 0 {
            space = space.flipped();
        }
        let omega_minus = space.star(&omega_plus);
        let lhs = omega.wedge(&omega).wedge(&omega);
        let rhs = omega_plus.wedge(&omega_minus).scale(&S::ratio(3, 2));
        if lhs != rhs {
            return Err(StructureError::Incompatible("volume identity ω³ = (3/2)Ω⁺∧Ω⁻ fails".into()));
        }
        let j = Self::compute_j(&space, &omega)?;
        Ok(GStructure { kind: Kind::SU3, space, forms: Forms::SU3 { omega, omega_plus, omega_minus }, j: Some(j) })
    }

    /// G₂ structure; the metric is induced from φ.
    pub fn g2(space: Space<S>, phi: KForm<S>) -> Result<Self> {
        Self::check_dim(Kind::G2, &space)?;
        Self::check_form(&space, &phi, 3)?;
        let vol = space.vol();
        let (m0, v0) = top_pivot(&vol);
        let b = g2_bilinear(&phi, &space.frame_vectors(), m0, &v0);
        let g = space.metric();
        let mut space = space;
        if b == g {
        } else if b.scale(&-S::one()) == g {
            space = space.flipped();
        } else if space.is_transverse() {
            return Err(StructureError::FrameNotAdapted("φ does not induce the transverse metric".into()));
        } else {
            let geom = induced_metric_g2(&phi)?;
            space = Space::full(space.frame().with_geometry(geom)?);
        }
        let star_phi = space.star(&phi);
        if space.norm2(&phi) != S::from_i64(7) {
            return Err(StructureError::Incompatible("|φ|² ≠ 7".into()));
        }
        Ok(GStructure { kind: Kind::G2, space, forms: Forms::G2 { phi, star_phi }, j: None })
    }

    /// Spin(7) structure; the frame metric must make Ψ a pointwise model.
    pub fn spin7(space: Space<S>, psi: KForm<S>) -> Result<Self> {
        Self::check_dim(Kind::Spin7, &space)?;
        Self::check_form(&space, &psi, 4)?;
        let mut space = space;
        let vol = space.vol();
        let pp = psi.wedge(&psi);
        if pp == vol.scale(&S::from_i64(-14)) {
            space = space.flipped();
        } else if pp != vol.scale(&S::from_i64(14)) {
            return Err(StructureError::FrameNotAdapted("Ψ∧Ψ ≠ ±14 vol".into()));
        }
        if space.star(&psi) != psi {
            return Err(StructureError::FrameNotAdapted("Ψ is not self-dual".into()));
        }
        Ok(GStructure { kind: Kind::Spin7, space, forms: Forms::Spin7 { psi }, j: None })
    }

    /// Same forms on another (e.g. rescaled) space, revalidated.
    pub fn rebuild(&self, space: Space<S>) -> Result<Self> {
        match &self.forms {
            Forms::AlmostHermitian { omega } => Self::almost_hermitian(space, omega.clone()),
            Forms::SU3 { omega, omega_plus, .. } => Self::su3(space, omega.clone(), omega_plus.clone()),
            Forms::G2 { phi, .. } => Self::g2(space, phi.clone()),
            Forms::Spin7 { psi } => Self::spin7(space, psi.clone()),
        }
    }

    /// J acting on a vector.
    pub fn apply_j(&self, x: &VectorField<S>) -> VectorField<S> {
        VectorField::new(self.j.as_ref().expect("J").mul_vec(x.comps()))
    }

    /// (Jα)(X) = −α(JX), the action of J on 1-forms dual to the one on vectors.
    pub fn apply_j_oneform(&self, a: &KForm<S>) -> KForm<S> {
        let j = self.j.as_ref().expect("J");
        let c = a.components();
        let n = self.n();
        let comps: Vec<S> = (0..n)
            .map(|x| (0..n).fold(S::zero(), |acc, k| acc - c[k].clone() * j[(k, x)].clone()))
            .collect();
        KForm::one_form(&comps)
    }

    // -----------------------------------------------------------------------
    // Representation projections

    /// Decompose a form into the irreducible summands listed for the kind.
    pub fn project(&self, a: &KForm<S>) -> Result<Vec<(String, KForm<S>)>> {
        let n = self.n();
        let k = a.degree();
        let sp = &self.space;
        let b1 = sp.basis(1);
        let shape = |m: usize| (n, m);
        match (&self.forms, k) {
            (Forms::SU3 { omega, omega_plus, .. }, 2) => {
                let om2 = omega.wedge(omega);
                let mut gens = vec![omega.clone()];
                gens.extend(b1.iter().map(|e| sp.star(&e.wedge(omega_plus))));
                let cons = |r: &KForm<S>| vec![r.wedge(&om2), r.wedge(omega_plus)];
                let parts = self.decompose(a, &gens, &cons, &[shape(6), shape(5)])?;
                let one = combine(&parts[..1], &gens[..1], n, 2);
                let six = combine(&parts[1..], &gens[1..], n, 2);
                let eight = a.clone() - one.clone() - six.clone();
                Ok(vec![("1".into(), one), ("6".into(), six), ("8".into(), eight)])
            }
            (Forms::SU3 { omega, omega_plus, omega_minus }, 3) => {
                let mut gens = vec![omega_plus.clone(), omega_minus.clone()];
                gens.extend(b1.iter().map(|e| e.wedge(omega)));
                let cons = |r: &KForm<S>| vec![r.wedge(omega), r.wedge(omega_plus), r.wedge(omega_minus)];
                let parts = self.decompose(a, &gens, &cons, &[shape(5), shape(6), shape(6)])?;
                let two = combine(&parts[..2], &gens[..2], n, 3);
                let six = combine(&parts[2..], &gens[2..], n, 3);
                let twelve = a.clone() - two.clone() - six.clone();
                Ok(vec![("1+1".into(), two), ("6".into(), six), ("12".into(), twelve)])
            }
            (Forms::G2 { phi, .. }, 2) => {
                // T α = ⋆(α∧φ) has eigenvalue 2 on Λ²₇ and −1 on Λ²₁₄
                let t = |x: &KForm<S>| sp.star(&x.wedge(phi));
                let gens: Vec<KForm<S>> = sp.basis(2).iter().map(|b| t(b) + b.clone()).collect();
                let cons = |r: &KForm<S>| vec![t(r) + r.clone()];
                let parts = self.decompose(a, &gens, &cons, &[shape(2)])?;
                let seven = combine(&parts, &gens, n, 2);
                let fourteen = a.clone() - seven.clone();
                Ok(vec![("7".into(), seven), ("14".into(), fourteen)])
            }
            (Forms::G2 { phi, star_phi }, 3) => {
                let mut gens = vec![phi.clone()];
                gens.extend(b1.iter().map(|e| sp.star(&e.wedge(phi))));
                let cons = |r: &KForm<S>| vec![r.wedge(phi), r.wedge(star_phi)];
                let parts = self.decompose(a, &gens, &cons, &[shape(6), shape(7)])?;
                let one = combine(&parts[..1], &gens[..1], n, 3);
                let seven = combine(&parts[1..], &gens[1..], n, 3);
                let rest = a.clone() - one.clone() - seven.clone();
                Ok(vec![("1".into(), one), ("7".into(), seven), ("27".into(), rest)])
            }
            (Forms::Spin7 { psi }, 2) => {
                // T β = ⋆(Ψ∧β) has eigenvalue −3 on Λ²₇ and 1 on Λ²₂₁
                let t = |x: &KForm<S>| sp.star(&psi.wedge(x));
                let gens: Vec<KForm<S>> = sp.basis(2).iter().map(|b| t(b) - b.clone()).collect();
                let cons = |r: &KForm<S>| vec![t(r) - r.clone()];
                let parts = self.decompose(a, &gens, &cons, &[shape(2)])?;
                let seven = combine(&parts, &gens, n, 2);
                let rest = a.clone() - seven.clone();
                Ok(vec![("7".into(), seven), ("21".into(), rest)])
            }
            (Forms::Spin7 { psi }, 3) => {
                let gens: Vec<KForm<S>> = sp.frame_vectors().iter().map(|x| psi.interior(x)).collect();
                let cons = |r: &KForm<S>| vec![r.wedge(psi)];
                let parts = self.decompose(a, &gens, &cons, &[shape(7)])?;
                let eight = combine(&parts, &gens, n, 3);
                let rest = a.clone() - eight.clone();
                Ok(vec![("8".into(), eight), ("48".into(), rest)])
            }
            _ => Err(StructureError::NoDecomposition { kind: self.kind, degree: k }),
        }
    }

    /// Coefficients x with `a − Σ x g` satisfying every constraint.
    fn decompose(
        &self,
        a: &KForm<S>,
        gens: &[KForm<S>],
        cons: &dyn Fn(&KForm<S>) -> Vec<KForm<S>>,
        shapes: &[(usize, usize)],
    ) -> Result<Vec<S>> {
        let cols: Vec<Vec<KForm<S>>> = gens.iter().map(cons).collect();
        let mut target = cons(a);
        if target.len() != shapes.len() {
            target = zero_blocks(shapes);
        }
        let (x, _) = solve_combination(&cols, &target)
            .ok_or_else(|| StructureError::Inconsistent("projection system has no solution".into()))?;
        Ok(x)
    }

    // -----------------------------------------------------------------------
    // Torsion

    pub fn torsion(&self) -> Result<TorsionClasses<S>> {
        match self.kind {
            Kind::AlmostHermitian => self.torsion_ah(),
            Kind::SU3 => self.torsion_su3(),
            Kind::G2 => self.torsion_g2(),
            Kind::Spin7 => self.torsion_spin7(),
        }
    }

    fn torsion_ah(&self) -> Result<TorsionClasses<S>> {
        let theta = self.lee_form_ah()?;
        let nijenhuis = self.nijenhuis().ok();
        Ok(TorsionClasses::AlmostHermitian { theta, nijenhuis })
    }

    /// θ with (m−1) dω∧ω^{m−2} = θ∧ω^{m−1}, m = dim/2.
    fn lee_form_ah(&self) -> Result<KForm<S>> {
        let om = self.omega().expect("ω");
        let n = self.n();
        let m = self.space.dim() / 2;
        let mut pow = KForm::constant(n, S::one());
        for _ in 0..m - 2 {
            pow = pow.wedge(om);
        }
        let target = self.space.d(om).wedge(&pow).scale(&S::from_i64(m as i64 - 1));
        let top = pow.wedge(om);
        let b1 = self.space.basis(1);
        let cols: Vec<Vec<KForm<S>>> = b1.iter().map(|e| vec![e.wedge(&top)]).collect();
        let (x, _) = solve_combination(&cols, &[target])
            .ok_or_else(|| StructureError::Inconsistent("Lee form equation".into()))?;
        Ok(combine(&x, &b1, n, 1))
    }

    fn torsion_su3(&self) -> Result<TorsionClasses<S>> {
        let Forms::SU3 { omega, omega_plus: op, omega_minus: om } = &self.forms else { unreachable!() };
        let n = self.n();
        let sp = &self.space;
        let b1 = sp.basis(1);
        let b2 = sp.basis(2);
        let (dw, dop, dom) = (sp.d(omega), sp.d(op), sp.d(om));
        let w2 = omega.wedge(omega);
        let inconsistent = |s: &str| StructureError::Inconsistent(s.into());

        // dω = a Ω⁺ + b Ω⁻ + ν₁∧ω + ν₃ with ν₃ ∧ {ω, Ω⁺, Ω⁻} = 0
        let probes = [omega, op, om];
        let tests = |f: &KForm<S>| probes.iter().map(|p| f.wedge(p)).collect::<Vec<_>>();
        let mut cols = vec![tests(op), tests(om)];
        cols.extend(b1.iter().map(|e| tests(&e.wedge(omega))));
        let (x, _) = solve_combination(&cols, &tests(&dw)).ok_or_else(|| inconsistent("dω"))?;
        let nu1 = combine(&x[2..], &b1, n, 1);
        let nu3 = dw.clone() - op.scale(&x[0]) - om.scale(&x[1]) - nu1.wedge(omega);
        let sigma0 = x[0].clone() * S::ratio(-2, 3);
        let pi0 = x[1].clone() * S::ratio(2, 3);

        // dΩ^± = c ω² + ρ∧Ω⁺ − β∧ω with β ∈ Λ²₈
        let solve4 = |target: &KForm<S>| -> Result<(S, KForm<S>, KForm<S>)> {
            let z = |k: usize| KForm::zero(n, k);
            let mut cols = vec![vec![w2.clone(), z(6), z(5)]];
            cols.extend(b1.iter().map(|e| vec![e.wedge(op), z(6), z(5)]));
            cols.extend(b2.iter().map(|b| vec![-b.wedge(omega), b.wedge(&w2), b.wedge(op)]));
            let (y, _) = solve_combination(&cols, &[target.clone(), z(6), z(5)]).ok_or_else(|| inconsistent("dΩ"))?;
            let rho = combine(&y[1..1 + b1.len()], &b1, n, 1);
            let beta = combine(&y[1 + b1.len()..], &b2, n, 2);
            Ok((y[0].clone(), rho, beta))
        };
        let (pi0b, pi1, pi2) = solve4(&dop)?;
        let (sigma0b, jpi1, sigma2) = solve4(&dom)?;
        if pi0b != pi0 || sigma0b != sigma0 {
            return Err(inconsistent("scalar torsion from dω and dΩ^± disagree"));
        }
        if jpi1 != self.apply_j_oneform(&pi1) {
            return Err(inconsistent("the 1-form part of dΩ⁻ is not Jπ₁"));
        }
        Ok(TorsionClasses::SU3 { sigma0, pi0, nu1, pi1, sigma2, pi2, nu3 })
    }

    fn torsion_g2(&self) -> Result<TorsionClasses<S>> {
        let Forms::G2 { phi, star_phi } = &self.forms else { unreachable!() };
        let n = self.n();
        let sp = &self.space;
        let dphi = sp.d(phi);
        let dsphi = sp.d(star_phi);
        let tau0 = sp.inner(&dphi, star_phi) * S::ratio(1, 7);
        let b1 = sp.basis(1);
        let b2 = sp.basis(2);
        let mut cols: Vec<Vec<KForm<S>>> = b1.iter().map(|e| vec![e.wedge(star_phi), KForm::zero(n, 6)]).collect();
        cols.extend(b2.iter().map(|b| vec![b.wedge(phi), b.wedge(star_phi)]));
        let (x, _) = solve_combination(&cols, &[dsphi, KForm::zero(n, 6)])
            .ok_or_else(|| StructureError::Inconsistent("d⋆φ".into()))?;
        let theta = combine(&x[..b1.len()], &b1, n, 1);
        let tau2 = combine(&x[b1.len()..], &b2, n, 2);
        let star_tau3 = dphi - star_phi.scale(&tau0) - theta.wedge(phi).scale(&S::ratio(3, 4));
        let tau3 = sp.star(&star_tau3);
        Ok(TorsionClasses::G2 { tau0, tau1: theta.scale(&S::ratio(1, 4)), tau2, tau3 })
    }

    fn torsion_spin7(&self) -> Result<TorsionClasses<S>> {
        let Forms::Spin7 { psi } = &self.forms else { unreachable!() };
        let sp = &self.space;
        let dpsi = sp.d(psi);
        let theta = spin7_lee(sp, psi, &dpsi);
        let zeta5 = dpsi - theta.wedge(psi);
        Ok(TorsionClasses::Spin7 { theta, zeta5 })
    }

    /// Lee form: θ_ω (AH), 2ν₁ (SU3), 4τ₁ (G₂), θ_Ψ (Spin(7)).
    pub fn lee_form(&self) -> Result<KForm<S>> {
        match self.kind {
            Kind::AlmostHermitian => self.lee_form_ah(),
            _ => Ok(self.torsion()?.lee_form()),
        }
    }

    /// Reassemble the differentials of the structure forms from torsion classes.
    pub fn reconstruct(&self, t: &TorsionClasses<S>) -> Vec<(KForm<S>, KForm<S>)> {
        let sp = &self.space;
        match (&self.forms, t) {
            (Forms::SU3 { omega, omega_plus, omega_minus }, TorsionClasses::SU3 { sigma0, pi0, nu1, pi1, sigma2, pi2, nu3 }) => {
                let w2 = omega.wedge(omega);
                let dw = omega_plus.scale(&(sigma0.clone() * S::ratio(-3, 2)))
                    + omega_minus.scale(&(pi0.clone() * S::ratio(3, 2)))
                    + nu1.wedge(omega)
                    + nu3.clone();
                let dop = w2.scale(pi0) + pi1.wedge(omega_plus) - pi2.wedge(omega);
                let dom = w2.scale(sigma0) + self.apply_j_oneform(pi1).wedge(omega_plus) - sigma2.wedge(omega);
                vec![(sp.d(omega), dw), (sp.d(omega_plus), dop), (sp.d(omega_minus), dom)]
            }
            (Forms::G2 { phi, star_phi }, TorsionClasses::G2 { tau0, tau1, tau2, tau3 }) => {
                let dphi = star_phi.scale(tau0) + tau1.wedge(phi).scale(&S::from_i64(3)) + sp.star(tau3);
                let dsphi = tau1.wedge(star_phi).scale(&S::from_i64(4)) + tau2.wedge(phi);
                vec![(sp.d(phi), dphi), (sp.d(star_phi), dsphi)]
            }
            (Forms::Spin7 { psi }, TorsionClasses::Spin7 { theta, zeta5 }) => {
                vec![(sp.d(psi), theta.wedge(psi) + zeta5.clone())]
            }
            (Forms::AlmostHermitian { .. }, _) => vec![],
            _ => panic!("torsion classes of another kind"),
        }
    }

    // -----------------------------------------------------------------------
    // Nijenhuis tensor and Bismut torsion

    /// N(X, Y, Z) = g(N^vec(X, Y), Z); errors when not totally skew.
    pub fn nijenhuis(&self) -> Result<KForm<S>> {
        if self.j.is_none() {
            return Err(StructureError::NoDecomposition { kind: self.kind, degree: 3 });
        }
        let sp = &self.space;
        let n = self.n();
        let xs = sp.frame_vectors();
        let jx: Vec<VectorField<S>> = xs.iter().map(|x| self.apply_j(x)).collect();
        let g = sp.frame().geometry();
        let mut t = vec![S::zero(); n * n * n];
        for a in 0..n {
            for b in 0..n {
                let v1 = sp.bracket(&jx[a], &jx[b]);
                let v2 = self.apply_j(&sp.bracket(&jx[a], &xs[b]));
                let v3 = self.apply_j(&sp.bracket(&xs[a], &jx[b]));
                let v4 = sp.bracket(&xs[a], &xs[b]);
                let nv = v1.sub(&v2).sub(&v3).sub(&v4);
                for c in 0..n {
                    t[(a * n + b) * n + c] = g.inner_vectors(&nv, &xs[c]);
                }
            }
        }
        let form = KForm::from_alternating(n, 3, |ix| t[(ix[0] * n + ix[1]) * n + ix[2]].clone());
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if t[(a * n + b) * n + c] != form.eval(&[a, b, c]) {
                        return Err(StructureError::NijenhuisNotSkew);
                    }
                }
            }
        }
        Ok(form)
    }

    /// d^cω(X, Y, Z) = −dω(JX, JY, JZ).
    pub fn dc_omega(&self) -> KForm<S> {
        let om = self.omega().expect("ω");
        let dw = self.space.d(om);
        let n = self.n();
        let jx: Vec<VectorField<S>> = self.space.frame_vectors().iter().map(|x| self.apply_j(x)).collect();
        KForm::from_alternating(n, 3, |ix| -dw.eval_vectors(&[&jx[ix[0]], &jx[ix[1]], &jx[ix[2]]]))
    }

    /// Closed-form Bismut torsion.
    pub fn bismut_torsion(&self) -> Result<KForm<S>> {
        let sp = &self.space;
        match &self.forms {
            Forms::AlmostHermitian { .. } => Ok(self.dc_omega() + self.nijenhuis()?),
            Forms::SU3 { omega_plus, .. } => {
                // the unitary connection is unique; it is special unitary only if Ω⁺ is parallel
                let h = self.dc_omega() + self.nijenhuis()?;
                let conn = sp.connection(&h)?;
                if sp.nabla_form(&conn, omega_plus).iter().any(|f| !f.is_zero()) {
                    return Err(StructureError::OmegaPlusNotParallel);
                }
                Ok(h)
            }
            Forms::G2 { phi, star_phi } => {
                let TorsionClasses::G2 { tau2, tau1, .. } = self.torsion()? else { unreachable!() };
                if !tau2.is_zero() {
                    return Err(StructureError::Tau2Nonzero);
                }
                let theta = tau1.scale(&S::from_i64(4));
                let dphi = sp.d(phi);
                let c = sp.inner(&dphi, star_phi) * S::ratio(1, 6);
                Ok(-sp.star(&dphi) + sp.star(&theta.wedge(phi)) + phi.scale(&c))
            }
            Forms::Spin7 { psi } => {
                let dpsi = sp.d(psi);
                let theta = spin7_lee(sp, psi, &dpsi);
                Ok(-sp.star(&dpsi) + sp.star(&theta.wedge(psi)).scale(&S::ratio(7, 6)))
            }
        }
    }

    /// Independent route: solve ∇(structure forms) = 0 for H in the linear span of 3-forms.
    pub fn solve_skew_torsion(&self) -> Result<KForm<S>> {
        use std::collections::BTreeMap;
        let sp = &self.space;
        let n = self.n();
        let forms = self.primary_forms();
        let base = sp.connection(&KForm::zero(n, 3))?;
        let b3 = sp.basis(3);
        let eqs = |conn: &ConnectionCoeffs<S>, projected: bool| -> Vec<KForm<S>> {
            forms
                .iter()
                .flat_map(|f| if projected { sp.nabla_form(conn, f) } else { nabla_form(conn, f) })
                .collect()
        };
        let rhs = eqs(&base, true);
        let mut rows: BTreeMap<(usize, Mask), Vec<(usize, S)>> = BTreeMap::new();
        for (c, b) in b3.iter().enumerate() {
            let delta = sp.frame().torsion_part(b);
            for (blk, f) in eqs(&delta, true).iter().enumerate() {
                for (m, v) in f.terms() {
                    rows.entry((blk, m)).or_default().push((c, v.clone()));
                }
            }
        }
        for (blk, f) in rhs.iter().enumerate() {
            for (m, _) in f.terms() {
                rows.entry((blk, m)).or_default();
            }
        }
        let mut sys = LinearSystem::new(b3.len());
        for ((blk, m), entries) in rows {
            sys.push(entries, -rhs[blk].coeff(m));
        }
        let sol = sys.solve().ok_or(StructureError::NoSolution)?;
        for v in &sol.nullspace {
            if !combine(v, &b3, n, 3).is_zero() {
                return Err(StructureError::NonUnique);
            }
        }
        Ok(combine(&sol.particular, &b3, n, 3))
    }

    /// ρ(X, Y) = ½ Σ R(X, Y, e_a, J e^a♯) for the connection with torsion `h`.
    pub fn bismut_ricci_form(&self, h: &KForm<S>) -> Result<KForm<S>> {
        let j = self.j.as_ref().ok_or(StructureError::NoDecomposition { kind: self.kind, degree: 2 })?;
        let sp = &self.space;
        let n = self.n();
        let conn = sp.connection(h)?;
        let curv = sp.curvature(&conn, RicciTrace::First);
        let ginv = sp.ginv();
        // M[a][k] = Σ_b ginv[a][b] J[k][b]
        let m = ginv.mul(&j.transpose());
        let half = S::ratio(1, 2);
        Ok(KForm::from_alternating(n, 2, |ix| {
            let mut acc = S::zero();
            for a in 0..n {
                for k in 0..n {
                    let c = &m[(a, k)];
                    if !c.is_zero() {
                        let r = curv.riemann_lowered(ix[0], ix[1], a, k);
                        if !r.is_zero() {
                            acc = acc + c.clone() * r.clone();
                        }
                    }
                }
            }
            acc * half.clone()
        }))
    }

    /// −½ Σ H(J·, e_i, J e_i) traced with the metric; the almost Hermitian Lee form.
    pub fn lee_form_from_torsion(&self, h: &KForm<S>) -> KForm<S> {
        let j = self.j.as_ref().expect("J");
        let sp = &self.space;
        let n = self.n();
        let xs = sp.frame_vectors();
        let jx: Vec<VectorField<S>> = xs.iter().map(|x| self.apply_j(x)).collect();
        let ginv = sp.ginv();
        let m = ginv.mul(&j.transpose());
        let comps: Vec<S> = (0..n)
            .map(|x| {
                let mut acc = S::zero();
                for a in 0..n {
                    for k in 0..n {
                        let c = &m[(a, k)];
                        if !c.is_zero() {
                            acc = acc + c.clone() * h.eval_vectors(&[&jx[x], &xs[a], &xs[k]]);
                        }
                    }
                }
                acc * S::ratio(-1, 2)
            })
            .collect();
        KForm::one_form(&comps)
    }

    /// Scalar multiple of the canonical vector's Lee part: 1, or 7/6 for Spin(7).
    pub fn lee_weight(&self) -> S {
        match self.kind {
            Kind::Spin7 => S::ratio(7, 6),
            _ => S::one(),
        }
    }

    pub fn convert<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> GStructure<T> {
        let space = self.space.convert(f);
        let forms = match &self.forms {
            Forms::AlmostHermitian { omega } => Forms::AlmostHermitian { omega: omega.map_coeffs(f) },
            Forms::SU3 { omega, omega_plus, omega_minus } => Forms::SU3 {
                omega: omega.map_coeffs(f),
                omega_plus: omega_plus.map_coeffs(f),
                omega_minus: omega_minus.map_coeffs(f),
            },
            Forms::G2 { phi, star_phi } => Forms::G2 { phi: phi.map_coeffs(f), star_phi: star_phi.map_coeffs(f) },
            Forms::Spin7 { psi } => Forms::Spin7 { psi: psi.map_coeffs(f) },
        };
        GStructure { kind: self.kind, space, forms, j: self.j.as_ref().map(|m| m.convert(f)) }
    }
}

fn spin7_lee<S: Scalar>(sp: &Space<S>, psi: &KForm<S>, dpsi: &KForm<S>) -> KForm<S> {
    sp.star(&sp.star(dpsi).wedge(psi)).scale(&S::ratio(-1, 7))
}

/// B(X, Y) with (X⌟φ)∧(Y⌟φ)∧φ = 6 B(X, Y) vol, reading the coefficient at `m0`.
fn g2_bilinear<S: Scalar>(phi: &KForm<S>, xs: &[VectorField<S>], m0: Mask, v0: &S) -> Mat<S> {
    let n = xs.len();
    let ip: Vec<KForm<S>> = xs.iter().map(|x| phi.interior(x)).collect();
    let scale = (v0.clone() * S::from_i64(6)).inv().expect("volume");
    let mut b = Mat::zeros(n, n);
    for a in 0..n {
        for c in a..n {
            let v = ip[a].wedge(&ip[c]).wedge(phi).coeff(m0) * scale.clone();
            b[(a, c)] = v.clone();
            b[(c, a)] = v;
        }
    }
    b
}

/// Hitchin metric g = det(B)^{−1/9} B of a 3-form on a 7-dimensional frame.
pub fn induced_metric_g2<S: Scalar>(phi: &KForm<S>) -> Result<FrameGeometry<S>> {
    if phi.dim() != 7 {
        return Err(StructureError::Dimension { kind: Kind::G2, expected: 7, got: phi.dim() });
    }
    if phi.degree() != 3 {
        return Err(StructureError::Degree { expected: 3, got: phi.degree() });
    }
    let xs: Vec<VectorField<S>> = (0..7).map(|i| VectorField::basis(7, i)).collect();
    let full: Mask = 0x7f;
    let mut b = g2_bilinear(phi, &xs, full, &S::one());
    let mut orientation: Vec<usize> = (0..7).collect();
    let det = b.det();
    if det.is_zero() {
        return Err(StructureError::NotPositive);
    }
    if det.signum() < 0 {
        b = b.scale(&-S::one());
        orientation.swap(0, 1);
    }
    if !b.is_positive_definite() {
        return Err(StructureError::NotPositive);
    }
    let det = b.det();
    let root = det.root(9).ok_or(StructureError::MetricNotRepresentable)?;
    let g = b.scale(&root.inv().unwrap());
    FrameGeometry::new(g, orientation).map_err(|e| match e {
        ExteriorError::NonSquareDeterminant => StructureError::MetricNotRepresentable,
        e => e.into(),
    })
}

/// Torsion classes per kind.
#[derive(Clone, Debug, PartialEq)]
pub enum TorsionClasses<S: Scalar> {
    AlmostHermitian { theta: KForm<S>, nijenhuis: Option<KForm<S>> },
    SU3 { sigma0: S, pi0: S, nu1: KForm<S>, pi1: KForm<S>, sigma2: KForm<S>, pi2: KForm<S>, nu3: KForm<S> },
    G2 { tau0: S, tau1: KForm<S>, tau2: KForm<S>, tau3: KForm<S> },
    Spin7 { theta: KForm<S>, zeta5: KForm<S> },
}

/// A named torsion component, scalar or form.
#[derive(Clone, Debug, PartialEq)]
pub enum Component<S: Scalar> {
    Scalar(S),
    Form(KForm<S>),
}

impl<S: Scalar> Component<S> {
    pub fn is_zero(&self) -> bool {
        match self {
            Component::Scalar(s) => s.is_zero(),
            Component::Form(f) => f.is_zero(),
        }
    }
    pub fn render(&self, labels: &[String]) -> String {
        match self {
            Component::Scalar(s) => s.canonical(),
            Component::Form(f) => f.render(labels),
        }
    }
}

impl<S: Scalar> TorsionClasses<S> {
    pub fn lee_form(&self) -> KForm<S> {
        match self {
            TorsionClasses::AlmostHermitian { theta, .. } => theta.clone(),
            TorsionClasses::SU3 { nu1, .. } => nu1.scale(&S::from_i64(2)),
            TorsionClasses::G2 { tau1, .. } => tau1.scale(&S::from_i64(4)),
            TorsionClasses::Spin7 { theta, .. } => theta.clone(),
        }
    }

    /// Components in a fixed order.
    pub fn components(&self) -> Vec<(&'static str, Component<S>)> {
        use Component::{Form as F, Scalar as C};
        match self {
            TorsionClasses::AlmostHermitian { theta, nijenhuis } => {
                let mut v = vec![("theta", F(theta.clone()))];
                if let Some(nj) = nijenhuis {
                    v.push(("N", F(nj.clone())));
                }
                v
            }
            TorsionClasses::SU3 { sigma0, pi0, nu1, pi1, sigma2, pi2, nu3 } => vec![
                ("sigma0", C(sigma0.clone())),
                ("pi0", C(pi0.clone())),
                ("nu1", F(nu1.clone())),
                ("pi1", F(pi1.clone())),
                ("sigma2", F(sigma2.clone())),
                ("pi2", F(pi2.clone())),
                ("nu3", F(nu3.clone())),
            ],
            TorsionClasses::G2 { tau0, tau1, tau2, tau3 } => vec![
                ("tau0", C(tau0.clone())),
                ("tau1", F(tau1.clone())),
                ("tau2", F(tau2.clone())),
                ("tau3", F(tau3.clone())),
            ],
            TorsionClasses::Spin7 { theta, zeta5 } => vec![("theta", F(theta.clone())), ("zeta5", F(zeta5.clone()))],
        }
    }

    /// Names of the nonzero components.
    pub fn support(&self) -> Vec<&'static str> {
        self.components().into_iter().filter(|(_, c)| !c.is_zero()).map(|(n, _)| n).collect()
    }
}
