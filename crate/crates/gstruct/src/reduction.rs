//! Reduction along a unit Bismut-parallel Killing field, the G₂ → SU(3) and
//! Spin(7) → G₂ verifiers, the splitting test and central extensions.

use crate::exterior::{ExteriorError, FrameGeometry, KForm, VectorField};
use crate::g_structures::{Forms, GStructure, Kind, StructureError, TorsionClasses};
use crate::lie_frame::{LieAlgebraFrame, LieError};
use crate::linalg::Mat;
use crate::scalar::Scalar;
use crate::soliton::{canonical_vector, parallel_certificate, string_grs_residual, SolitonData, SolitonError};
use crate::space::{is_killing, Space, SpaceError};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReductionError {
    #[error("V = 0: rigid case — no reduction")]
    ZeroVector,
    #[error("|V| = {0} without normalisation; expected 1")]
    NotUnit(String),
    #[error("|V| is not representable exactly")]
    NormNotRepresentable,
    #[error("V is not Killing")]
    NotKilling,
    #[error("V is not parallel: dμ ≠ i_V H")]
    NotParallel,
    #[error("structure is not strong: dH ≠ 0")]
    NotStrong,
    #[error("quotient not closed: d{0} involves the normal direction")]
    NotClosed(String),
    #[error("Bianchi obstruction: dĤ + F∧F = {0}")]
    BianchiObstruction(String),
    #[error("hypotheses violated: {}", .0.join("; "))]
    Hypotheses(Vec<String>),
    #[error("{0} structures cannot be reduced or extended this way")]
    WrongKind(Kind),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Soliton(#[from] SolitonError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
}

type Result<T> = std::result::Result<T, ReductionError>;

/// Difference between the two sides of a verified identity.
#[derive(Clone, Debug, PartialEq)]
pub enum Residual<S: Scalar> {
    Scalar(S),
    Form(KForm<S>),
    Matrix(Mat<S>),
    Flag(bool),
}

impl<S: Scalar> Residual<S> {
    pub fn is_zero(&self) -> bool {
        match self {
            Residual::Scalar(s) => s.is_zero(),
            Residual::Form(f) => f.is_zero(),
            Residual::Matrix(m) => m.is_zero(),
            Residual::Flag(b) => *b,
        }
    }

    pub fn render(&self, labels: &[String]) -> String {
        match self {
            Residual::Scalar(s) => s.canonical(),
            Residual::Form(f) => f.render(labels),
            Residual::Matrix(m) => {
                if m.is_zero() {
                    "0".into()
                } else {
                    let rows: Vec<String> = (0..m.rows())
                        .map(|i| {
                            let r: Vec<String> = (0..m.cols()).map(|j| m[(i, j)].canonical()).collect();
                            format!("[{}]", r.join(", "))
                        })
                        .collect();
                    format!("[{}]", rows.join(", "))
                }
            }
            Residual::Flag(b) => if *b { "holds" } else { "fails" }.into(),
        }
    }
}

/// One verified claim.
#[derive(Clone, Debug, PartialEq)]
pub struct Check<S: Scalar> {
    pub name: String,
    pub residual: Residual<S>,
}

impl<S: Scalar> Check<S> {
    fn new(name: &str, residual: Residual<S>) -> Self {
        Check { name: name.into(), residual }
    }
    fn scalar(name: &str, lhs: S, rhs: S) -> Self {
        Self::new(name, Residual::Scalar(lhs - rhs))
    }
    fn form(name: &str, lhs: KForm<S>, rhs: KForm<S>) -> Self {
        Self::new(name, Residual::Form(lhs - rhs))
    }
    pub fn passed(&self) -> bool {
        self.residual.is_zero()
    }
}

// ---------------------------------------------------------------------------

/// A g-orthonormal frame whose last vector is V/|V|.
#[derive(Clone, Debug)]
pub struct AdaptedFrame<S: Scalar> {
    pub frame: LieAlgebraFrame<S>,
    /// e^j = Σ_b M[j][b] η^b
    pub substitution: Mat<S>,
    /// dual vectors f_a = Σ_i columns[i][a] e_i
    pub vectors: Mat<S>,
    /// whether the first n−1 covectors close under d
    pub closed: bool,
}

impl<S: Scalar> AdaptedFrame<S> {
    /// Transport a form to the adapted coframe.
    pub fn transport(&self, a: &KForm<S>) -> KForm<S> {
        a.substitute(&self.substitution)
    }

    /// The transverse Lie frame of dimension n−1 (requires `closed`).
    pub fn quotient(&self) -> Result<LieAlgebraFrame<S>> {
        let n = self.frame.dim();
        let de: Option<Vec<KForm<S>>> = (0..n - 1).map(|a| self.frame.coframe_d()[a].restrict(n - 1)).collect();
        let de = de.ok_or_else(|| ReductionError::NotClosed(self.frame.labels()[0].clone()))?;
        let labels = self.frame.labels()[..n - 1].to_vec();
        Ok(LieAlgebraFrame::with_identity(labels, de)?)
    }
}

/// Gram–Schmidt adaptation to V, with V/|V| last.
pub fn adapt_frame<S: Scalar>(frame: &LieAlgebraFrame<S>, v: &VectorField<S>, labels: Vec<String>) -> Result<AdaptedFrame<S>> {
    if v.is_zero() {
        return Err(ReductionError::ZeroVector);
    }
    if !is_killing(frame, v) {
        return Err(ReductionError::NotKilling);
    }
    let geom = frame.geometry();
    let n = frame.dim();
    let unit = |x: &VectorField<S>| -> Result<VectorField<S>> {
        let r = geom.inner_vectors(x, x).sqrt().ok_or(ReductionError::NormNotRepresentable)?;
        Ok(x.scale(&r.inv().unwrap()))
    };
    let last = unit(v)?;
    let mut basis: Vec<VectorField<S>> = vec![last.clone()];
    for i in 0..n {
        if basis.len() == n {
            break;
        }
        let mut x = VectorField::basis(n, i);
        for b in &basis {
            x = x.sub(&b.scale(&geom.inner_vectors(&x, b)));
        }
        if !x.is_zero() {
            basis.push(unit(&x)?);
        }
    }
    basis.rotate_left(1);
    let vectors = Mat::from_fn(n, n, |i, a| basis[a].get(i).clone());
    let a = vectors.inverse().expect("orthonormal basis");
    let (adapted, m) = frame.change_coframe(&a, labels)?;
    let closed = (0..n - 1).all(|r| adapted.coframe_d()[r].restrict(n - 1).is_some());
    Ok(AdaptedFrame { frame: adapted, substitution: m, vectors, closed })
}

/// Divide structure constants by λ: the metric scales by λ² in the old frame.
pub fn homothety<S: Scalar>(frame: &LieAlgebraFrame<S>, lambda: &S) -> LieAlgebraFrame<S> {
    frame.rescale(lambda)
}

/// Data of the reduction of (g, H) along V.
#[derive(Clone, Debug)]
pub struct ReductionResult<S: Scalar> {
    /// |V| before normalisation
    pub lambda: S,
    /// upstairs frame after the homothety making |V| = 1
    pub upstairs: LieAlgebraFrame<S>,
    pub h: KForm<S>,
    pub v: VectorField<S>,
    pub mu: KForm<S>,
    pub flux: KForm<S>,
    pub space: Space<S>,
    pub h_hat: KForm<S>,
    pub anomaly: KForm<S>,
    pub basic: bool,
    pub structure: Option<GStructure<S>>,
    pub torsion: Option<TorsionClasses<S>>,
    pub checks: Vec<Check<S>>,
    /// forms computed with the unnormalised Lee vector
    pub raw: Vec<(String, KForm<S>)>,
}

impl<S: Scalar> ReductionResult<S> {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed())
    }
    pub fn check(&self, name: &str) -> Option<&Check<S>> {
        self.checks.iter().find(|c| c.name == name)
    }
    /// g = μ⊗μ + ĝ and H = μ∧F + Ĥ.
    pub fn reassemble(&self) -> (Mat<S>, KForm<S>) {
        let n = self.mu.dim();
        let m = self.mu.components();
        let g = self.space.metric().add(&Mat::from_fn(n, n, |a, b| m[a].clone() * m[b].clone()));
        (g, self.mu.wedge(&self.flux) + self.h_hat.clone())
    }
}

fn norm_of<S: Scalar>(frame: &LieAlgebraFrame<S>, v: &VectorField<S>) -> Result<S> {
    let n2 = frame.geometry().inner_vectors(v, v);
    n2.sqrt().ok_or(ReductionError::NormNotRepresentable)
}

/// μ = V♭, F = dμ, Ĥ = H − μ∧F on the transverse geometry of V.
pub fn reduce_pair<S: Scalar>(frame: &LieAlgebraFrame<S>, h: &KForm<S>, v: &VectorField<S>, normalize: bool) -> Result<ReductionResult<S>> {
    if v.is_zero() {
        return Err(ReductionError::ZeroVector);
    }
    let lambda = norm_of(frame, v)?;
    let (frame, h, v) = if lambda == S::one() {
        (frame.clone(), h.clone(), v.clone())
    } else if normalize {
        let inv = lambda.inv().unwrap();
        (homothety(frame, &lambda), h.scale(&inv), v.scale(&inv))
    } else {
        return Err(ReductionError::NotUnit(lambda.canonical()));
    };
    let mu = frame.geometry().flat(&v);
    let flux = frame.d(&mu);
    if flux != h.interior(&v) {
        return Err(ReductionError::NotParallel);
    }
    let space = Space::transverse(frame.clone(), v.clone()).map_err(|e| match e {
        SpaceError::NotKilling => ReductionError::NotKilling,
        e => e.into(),
    })?;
    let h_hat = h.clone() - mu.wedge(&flux);
    let anomaly = frame.d(&h_hat) + flux.wedge(&flux);
    let basic = space.is_basic(&h_hat);
    Ok(ReductionResult {
        lambda,
        upstairs: frame,
        h,
        v,
        mu,
        flux,
        space,
        h_hat,
        anomaly,
        basic,
        structure: None,
        torsion: None,
        checks: vec![],
        raw: vec![],
    })
}

/// α = i_V φ, β = φ − μ∧α.
pub fn split_parallel_form<S: Scalar>(phi: &KForm<S>, v: &VectorField<S>, mu: &KForm<S>) -> (KForm<S>, KForm<S>) {
    let a = phi.interior(v);
    let b = phi.clone() - mu.wedge(&a);
    (a, b)
}

fn strong_upstairs<S: Scalar>(s: &GStructure<S>, df: &KForm<S>) -> Result<(GStructure<S>, KForm<S>, VectorField<S>, S)> {
    let v = canonical_vector(s, df)?;
    if v.is_zero() {
        return Err(ReductionError::ZeroVector);
    }
    let lambda = norm_of(s.space().frame(), &v)?;
    let s1 = if lambda == S::one() {
        s.clone()
    } else {
        s.rebuild(Space::full(homothety(s.space().frame(), &lambda)))?
    };
    let df1 = df.scale(&lambda.inv().unwrap());
    let h = s1.bismut_torsion()?;
    if !s1.space().d(&h).is_zero() {
        return Err(ReductionError::NotStrong);
    }
    let v1 = canonical_vector(&s1, &df1)?;
    let data = SolitonData::new(s1.space().clone(), h.clone(), v1.clone());
    if !parallel_certificate(&data, &v1)? {
        return Err(ReductionError::NotParallel);
    }
    Ok((s1, h, v1, lambda))
}

fn string_checks<S: Scalar>(red: &ReductionResult<S>, df: &KForm<S>, out: &mut Vec<Check<S>>) -> Result<()> {
    let sp = &red.space;
    let data = SolitonData::new(sp.clone(), red.h_hat.clone(), sp.sharp(df)).with_flux(red.flux.clone()).with_df(df.clone());
    let (a, b, c) = string_grs_residual(&data)?;
    out.push(Check::new("string GRS: Rc − F² + ∇X♭ = 0", Residual::Matrix(a)));
    out.push(Check::new("string GRS: d*F − ⟨F,Ĥ⟩ + i_X F = 0", Residual::Form(b)));
    out.push(Check::new("string GRS: dĤ + F∧F = 0", Residual::Form(c)));
    Ok(())
}

/// Reduce a strong G₂ structure along V = θ♯ − df♯ and verify the reduced SU(3) torsion.
pub fn reduce_g2<S: Scalar>(s: &GStructure<S>, df: &KForm<S>) -> Result<ReductionResult<S>> {
    let Forms::G2 { phi, .. } = s.forms() else { return Err(ReductionError::WrongKind(s.kind())) };
    let (s1, h, v, _) = strong_upstairs(s, df)?;
    let lambda = norm_of(s.space().frame(), &canonical_vector(s, df)?)?;
    let df1 = df.scale(&lambda.inv().unwrap());
    let mut red = reduce_pair(s1.space().frame(), &h, &v, false)?;
    red.lambda = lambda;
    let (omega, omega_plus) = split_parallel_form(phi, &v, &red.mu);
    let su3 = GStructure::su3(red.space.clone(), omega.clone(), omega_plus.clone())?;
    let t = su3.torsion()?;
    let TorsionClasses::SU3 { sigma0, pi0, nu1, pi1, sigma2, pi2, nu3 } = t.clone() else { unreachable!() };
    let TorsionClasses::G2 { tau0, tau3, .. } = s1.torsion()? else { unreachable!() };
    let Forms::SU3 { omega_minus, .. } = su3.forms() else { unreachable!() };
    red.space = su3.space().clone();
    let sp = &red.space;
    let w2 = omega.wedge(&omega);
    let half = S::ratio(1, 2);
    let c712 = S::ratio(7, 12) * tau0.clone();
    let mut checks = vec![
        Check::scalar("σ₀ = 1/2", sigma0, half.clone()),
        Check::form("σ₂ = 0", sigma2, KForm::zero(7, 2)),
        Check::form("π₂ = 0", pi2, KForm::zero(7, 2)),
        Check::form("ν₁ = ½df", nu1, df1.scale(&half)),
        Check::form("π₁ = df", pi1, df1.clone()),
        Check::scalar("π₀ = (7/12)τ₀", pi0, c712.clone()),
        Check::form(
            "ν₃ = (1/8)τ₀Ω⁻ + ¼df∧ω − i_V(⋆τ₃)",
            nu3,
            omega_minus.scale(&(tau0.clone() * S::ratio(1, 8))) + df1.wedge(&omega).scale(&S::ratio(1, 4))
                - s1.space().star(&tau3).interior(&v),
        ),
        Check::form("dΩ⁻ − df∧Ω⁻ = ½ω²", sp.d(omega_minus) - df1.wedge(omega_minus), w2.scale(&half)),
        Check::form("dΩ⁺ − df∧Ω⁺ = (7/12)τ₀ω²", sp.d(&omega_plus) - df1.wedge(&omega_plus), w2.scale(&c712)),
        Check::form("θ_ω = df", su3.lee_form()?, df1.clone()),
        Check::form("Ĥ = d^cω + N", red.h_hat.clone(), su3.bismut_torsion()?),
        Check::form("F∧ω² = 0", red.flux.wedge(&w2), KForm::zero(7, 6)),
        Check::form("F∧Ω⁻ = 0", red.flux.wedge(omega_minus), KForm::zero(7, 5)),
    ];
    string_checks(&red, &df1, &mut checks)?;

    let theta = s.lee_form()?;
    let tv = s.space().sharp(&theta);
    let w_raw = phi.interior(&tv);
    let op_raw = phi.clone() - theta.wedge(&w_raw).scale(&s.space().norm2(&theta).inv().unwrap());
    red.raw = vec![
        ("omega".into(), w_raw),
        ("omega_plus".into(), op_raw),
        ("F".into(), s.space().d(&theta)),
    ];
    red.structure = Some(su3);
    red.torsion = Some(t);
    red.checks = checks;
    Ok(red)
}

/// Reduce a strong Spin(7) structure along V = (7/6)θ♯ − df♯ and verify the reduced G₂ torsion.
pub fn reduce_spin7<S: Scalar>(s: &GStructure<S>, df: &KForm<S>) -> Result<ReductionResult<S>> {
    let Forms::Spin7 { psi } = s.forms() else { return Err(ReductionError::WrongKind(s.kind())) };
    let (s1, h, v, _) = strong_upstairs(s, df)?;
    let lambda = norm_of(s.space().frame(), &canonical_vector(s, df)?)?;
    let df1 = df.scale(&lambda.inv().unwrap());
    let mut red = reduce_pair(s1.space().frame(), &h, &v, false)?;
    red.lambda = lambda;
    let (phi, _) = split_parallel_form(psi, &v, &red.mu);
    let g2 = GStructure::g2(red.space.clone(), phi.clone())?;
    let t = g2.torsion()?;
    let TorsionClasses::G2 { tau0, tau1, tau2, tau3 } = t.clone() else { unreachable!() };
    let TorsionClasses::Spin7 { theta: theta_psi, zeta5 } = s1.torsion()? else { unreachable!() };
    let Forms::G2 { star_phi, .. } = g2.forms() else { unreachable!() };
    red.space = g2.space().clone();
    let sp = &red.space;
    let theta_phi = tau1.scale(&S::from_i64(4));
    let dth = s1.space().d(&theta_psi);
    let up = s1.project(&dth)?;
    let down = g2.project(&red.flux)?;
    let mut checks = vec![
        Check::form("Ψ = μ∧φ + ⋆φ", psi.clone(), red.mu.wedge(&phi) + star_phi.clone()),
        Check::scalar("τ₀ = −6/7", tau0, S::ratio(-6, 7)),
        Check::form("τ₂ = 0", tau2, KForm::zero(8, 2)),
        Check::form("d⋆φ − df∧⋆φ = 0", sp.d(star_phi) - df1.wedge(star_phi), KForm::zero(8, 5)),
        Check::form(
            "⋆τ₃ = (3/28)θ_φ∧φ − i_Vζ₅",
            sp.star(&tau3),
            theta_phi.wedge(&phi).scale(&S::ratio(3, 28)) - zeta5.interior(&v),
        ),
        Check::form("θ_φ = df", theta_phi, df1.clone()),
        Check::form("dθ_Ψ ∈ Λ²₂₁", up[0].1.clone(), KForm::zero(8, 2)),
        Check::form("F ∈ Λ²₁₄", down[0].1.clone(), KForm::zero(8, 2)),
        Check::form("Ĥ = H_φ", red.h_hat.clone(), g2.bismut_torsion()?),
    ];
    string_checks(&red, &df1, &mut checks)?;

    let theta = s.lee_form()?;
    let tv = s.space().sharp(&theta);
    red.raw = vec![("phi".into(), psi.interior(&tv)), ("F".into(), s.space().d(&theta))];
    red.structure = Some(g2);
    red.torsion = Some(t);
    red.checks = checks;
    Ok(red)
}

/// The three splitting conditions dĤ = 0, dμ = 0, Dμ = 0.
#[derive(Clone, Debug, PartialEq)]
pub struct Splitting {
    pub dh_hat_zero: bool,
    pub dmu_zero: bool,
    pub parallel_mu: bool,
}

impl Splitting {
    pub fn equivalent(&self) -> bool {
        self.dh_hat_zero == self.dmu_zero && self.dmu_zero == self.parallel_mu
    }
    pub fn splits(&self) -> bool {
        self.dh_hat_zero && self.dmu_zero && self.parallel_mu
    }
}

pub fn splitting_check<S: Scalar>(red: &ReductionResult<S>) -> Splitting {
    let up = &red.upstairs;
    let lc = up.levi_civita();
    Splitting {
        dh_hat_zero: up.d(&red.h_hat).is_zero(),
        dmu_zero: red.flux.is_zero(),
        parallel_mu: up.nabla_oneform(&lc, &red.mu).is_zero(),
    }
}

/// Transverse data on a quotient frame, to be extended by a central generator.
#[derive(Clone, Debug)]
pub struct ExtensionInput<S: Scalar> {
    pub structure: GStructure<S>,
    pub flux: KForm<S>,
    pub df: KForm<S>,
}

/// Result of [`central_extend`]: the structure upstairs and its torsion.
#[derive(Clone, Debug)]
pub struct Extension<S: Scalar> {
    pub structure: GStructure<S>,
    pub h: KForm<S>,
}

fn next_label(labels: &[String]) -> String {
    let n = labels.len();
    let candidate = format!("e{}", n + 1);
    if !labels.contains(&candidate) {
        return candidate;
    }
    (0..).map(|i| format!("t{i}")).find(|l| !labels.contains(l)).unwrap()
}

/// Append e^{n+1} with de^{n+1} = F and assemble φ = μ∧ω + Ω⁺ or Ψ = μ∧φ + ⋆φ.
pub fn central_extend<S: Scalar>(input: &ExtensionInput<S>) -> Result<Extension<S>> {
    let base = &input.structure;
    let sp = base.space();
    if sp.is_transverse() {
        return Err(ReductionError::Hypotheses(vec!["base must be a full frame".into()]));
    }
    let frame = sp.frame();
    let n = frame.dim();
    let f = &input.flux;
    let mut problems = vec![];
    if !frame.d(f).is_zero() {
        problems.push("F is not closed".to_string());
    }
    let lee = base.lee_form()?;
    if lee != input.df {
        problems.push(format!("Lee form {} ≠ df", lee.render(frame.labels())));
    }
    let t = base.torsion()?;
    match (base.kind(), &t) {
        (Kind::SU3, TorsionClasses::SU3 { sigma0, .. }) => {
            if *sigma0 != S::ratio(1, 2) {
                problems.push(format!("σ₀ = {} ≠ 1/2", sigma0.canonical()));
            }
        }
        (Kind::G2, _) => {}
        (k, _) => return Err(ReductionError::WrongKind(k)),
    }
    let h_hat = base.bismut_torsion()?;
    if !problems.is_empty() {
        return Err(ReductionError::Hypotheses(problems));
    }
    let anomaly = frame.d(&h_hat) + f.wedge(f);
    if !anomaly.is_zero() {
        return Err(ReductionError::BianchiObstruction(anomaly.render(frame.labels())));
    }

    let m = n + 1;
    let mut labels = frame.labels().to_vec();
    labels.push(next_label(&labels));
    let mut de: Vec<KForm<S>> = (0..n).map(|i| frame.coframe_d()[i].embed(m)).collect();
    de.push(f.embed(m));
    let g = frame.geometry().metric();
    let metric = Mat::from_fn(m, m, |a, b| {
        if a < n && b < n {
            g[(a, b)].clone()
        } else if a == b {
            S::one()
        } else {
            S::zero()
        }
    });
    let geom = FrameGeometry::new(metric, (0..m).collect())?;
    let up = Space::full(LieAlgebraFrame::new(labels, de, geom)?);
    let mu = KForm::basis(m, &[n]);
    let structure = match base.forms() {
        Forms::SU3 { omega, omega_plus, .. } => {
            GStructure::g2(up, mu.wedge(&omega.embed(m)) + omega_plus.embed(m))?
        }
        Forms::G2 { phi, star_phi } => GStructure::spin7(up, mu.wedge(&phi.embed(m)) + star_phi.embed(m))?,
        _ => unreachable!(),
    };
    let h = structure.bismut_torsion()?;
    if !structure.space().d(&h).is_zero() {
        return Err(ReductionError::NotStrong);
    }
    Ok(Extension { structure, h })
}

/// Quotient structure along a central unit V: the base data for [`central_extend`].
pub fn quotient_input<S: Scalar>(red: &ReductionResult<S>, labels: Vec<String>) -> Result<ExtensionInput<S>> {
    let adapted = adapt_frame(&red.upstairs, &red.v, labels)?;
    if !adapted.closed {
        return Err(ReductionError::NotClosed("the transverse coframe".into()));
    }
    let q = adapted.quotient()?;
    let n = q.dim();
    let down = |a: &KForm<S>| -> Result<KForm<S>> {
        adapted
            .transport(a)
            .restrict(n)
            .ok_or_else(|| ReductionError::NotClosed("a basic form".into()))
    };
    let s = red.structure.as_ref().ok_or(ReductionError::Hypotheses(vec!["no reduced structure".into()]))?;
    let space = Space::full(q);
    let structure = match s.forms() {
        Forms::SU3 { omega, omega_plus, .. } => GStructure::su3(space, down(omega)?, down(omega_plus)?)?,
        Forms::G2 { phi, .. } => GStructure::g2(space, down(phi)?)?,
        _ => return Err(ReductionError::WrongKind(s.kind())),
    };
    let df = structure.lee_form()?;
    Ok(ExtensionInput { structure, flux: down(&red.flux)?, df })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::default_labels;
    use crate::g_structures::{model_g2, model_spin7};
    use crate::scalar::Exact;

    fn e(n: usize, idx: &[usize]) -> KForm<Exact> {
        KForm::basis(n, idx)
    }

    /// su(2)⊕su(2)⊕ℝ^{n−6}, with the simple factors starting at `off`.
    fn su2su2(n: usize, off: usize) -> LieAlgebraFrame<Exact> {
        let mut de = vec![KForm::zero(n, 2); n];
        for b in [off, off + 3] {
            de[b] = e(n, &[b + 1, b + 2]);
            de[b + 1] = -e(n, &[b, b + 2]);
            de[b + 2] = e(n, &[b, b + 1]);
        }
        LieAlgebraFrame::with_identity(default_labels(n), de).unwrap()
    }

    fn failures(r: &ReductionResult<Exact>) -> Vec<String> {
        let labels = r.upstairs.labels().to_vec();
        r.checks.iter().filter(|c| !c.passed()).map(|c| format!("{}: {}", c.name, c.residual.render(&labels))).collect()
    }

    fn nonint_g2_phi() -> KForm<Exact> {
        let t: [(i64, [usize; 3]); 7] = [
            (1, [0, 3, 6]),
            (1, [1, 4, 6]),
            (-1, [2, 5, 6]),
            (1, [0, 1, 2]),
            (1, [0, 4, 5]),
            (-1, [1, 3, 5]),
            (-1, [2, 3, 4]),
        ];
        t.iter().fold(KForm::zero(7, 3), |acc, (c, i)| acc + e(7, i).scale(&Exact::int(*c)))
    }

    #[test]
    fn g2_reduction_along_central_lee_vector() {
        let s = GStructure::g2(Space::full(su2su2(7, 0)), nonint_g2_phi()).unwrap();
        let r = reduce_g2(&s, &KForm::zero(7, 1)).unwrap();
        assert_eq!(r.lambda, Exact::int(1));
        assert!(failures(&r).is_empty(), "{:?}", failures(&r));
        assert!(r.torsion.as_ref().unwrap().support() == vec!["sigma0", "pi0", "nu3"]);
        let sp = splitting_check(&r);
        assert!(sp.splits() && sp.equivalent());
        let (g, h) = r.reassemble();
        assert_eq!(g, Mat::identity(7));
        assert_eq!(h, s.bismut_torsion().unwrap());

        let q = quotient_input(&r, default_labels(7)).unwrap();
        let ext = central_extend(&q).unwrap();
        let Forms::G2 { phi, .. } = ext.structure.forms() else { panic!() };
        assert_eq!(*phi, nonint_g2_phi());
    }

    #[test]
    fn g2_reduction_with_non_closed_lee_form() {
        let s = GStructure::g2(Space::full(su2su2(7, 0)), model_g2()).unwrap();
        let r = reduce_g2(&s, &KForm::zero(7, 1)).unwrap();
        assert_eq!(r.lambda, Exact::int(2).sqrt().unwrap());
        assert!(failures(&r).is_empty(), "{:?}", failures(&r));
        assert!(r.basic && r.anomaly.is_zero());
        let sp = splitting_check(&r);
        assert!(!sp.dh_hat_zero && !sp.dmu_zero && !sp.parallel_mu);
        assert_eq!(r.raw[2].1, e(7, &[4, 5]) - e(7, &[0, 1]));
        let adapted = adapt_frame(s.space().frame(), &r.v, default_labels(7)).unwrap();
        assert!(!adapted.closed);
    }

    #[test]
    fn spin7_reduction() {
        let s = GStructure::spin7(Space::full(su2su2(8, 1)), model_spin7()).unwrap();
        let r = reduce_spin7(&s, &KForm::zero(8, 1)).unwrap();
        // φ = i_VΨ₀ is positively oriented by its own B, and then Ψ₀ = μ∧φ − ⋆φ,
        // which flips the sign of τ₀ relative to the +⋆φ decomposition
        let failed: Vec<&str> = r.checks.iter().filter(|c| !c.passed()).map(|c| c.name.as_str()).collect();
        assert_eq!(failed, vec!["Ψ = μ∧φ + ⋆φ", "τ₀ = −6/7"]);
        let TorsionClasses::G2 { tau0, .. } = r.torsion.clone().unwrap() else { panic!() };
        assert_eq!(tau0, Exact::ratio(6, 7));
    }

    #[test]
    fn abelian_pair_reduces_trivially() {
        let l = LieAlgebraFrame::with_identity(default_labels(4), vec![KForm::zero(4, 2); 4]).unwrap();
        let r = reduce_pair(&l, &KForm::zero(4, 3), &VectorField::basis(4, 3), false).unwrap();
        assert!(r.h_hat.is_zero() && r.flux.is_zero());
        let err = reduce_pair(&l, &KForm::zero(4, 3), &VectorField::basis(4, 3).scale(&Exact::int(2)), false).unwrap_err();
        assert!(matches!(err, ReductionError::NotUnit(_)));
    }

    #[test]
    fn extension_rejects_wrong_scalar_torsion() {
        let s = GStructure::g2(Space::full(su2su2(7, 0)), nonint_g2_phi()).unwrap();
        let r = reduce_g2(&s, &KForm::zero(7, 1)).unwrap();
        let mut q = quotient_input(&r, default_labels(7)).unwrap();
        let f = q.structure.space().frame().rescale(&Exact::int(2));
        q.structure = q.structure.rebuild(Space::full(f)).unwrap();
        let err = central_extend(&q).unwrap_err();
        assert!(err.to_string().contains("σ₀"), "{err}");
    }
}
