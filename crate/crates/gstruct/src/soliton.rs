//! Generalized Ricci soliton residuals, the weighted scalar curvature and the
//! canonical parallel vector field of a skew-torsion structure.

use crate::exterior::{KForm, VectorField};
use crate::g_structures::{GStructure, Kind, StructureError, TorsionClasses};
use crate::lie_frame::{LieError, RicciTrace};
use crate::linalg::Mat;
use crate::scalar::Scalar;
use crate::space::Space;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolitonError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Lie(#[from] LieError),
}

/// Metric (via the space), torsion, soliton vector, df and optional string flux.
#[derive(Clone, Debug)]
pub struct SolitonData<S: Scalar> {
    pub space: Space<S>,
    pub h: KForm<S>,
    pub x: VectorField<S>,
    pub df: KForm<S>,
    pub flux: Option<KForm<S>>,
}

impl<S: Scalar> SolitonData<S> {
    pub fn new(space: Space<S>, h: KForm<S>, x: VectorField<S>) -> Self {
        let n = space.ambient_dim();
        SolitonData { space, h, x, df: KForm::zero(n, 1), flux: None }
    }

    pub fn with_df(mut self, df: KForm<S>) -> Self {
        self.df = df;
        self
    }

    pub fn with_flux(mut self, f: KForm<S>) -> Self {
        self.flux = Some(f);
        self
    }

    /// dH, or dH + F∧F when a flux is present.
    pub fn bianchi(&self) -> KForm<S> {
        let dh = self.space.d(&self.h);
        match &self.flux {
            Some(f) => dh + f.wedge(f),
            None => dh,
        }
    }
}

/// Rc^∇ + ∇X♭ for the connection with torsion H; entry (i, j) pairs e_i, e_j.
pub fn grs_residual<S: Scalar>(data: &SolitonData<S>) -> Result<Mat<S>, SolitonError> {
    let sp = &data.space;
    let conn = sp.connection(&data.h)?;
    let rc = sp.curvature(&conn, RicciTrace::First).ricci;
    let nx = sp.nabla_oneform(&conn, &sp.flat(&data.x));
    Ok(rc.add(&nx))
}

/// F²(X, Y) = ⟨i_X F, i_Y F⟩ on the space.
pub fn flux_square<S: Scalar>(sp: &Space<S>, f: &KForm<S>) -> Mat<S> {
    let xs = sp.frame_vectors();
    let ifs: Vec<KForm<S>> = xs.iter().map(|x| f.interior(x)).collect();
    let n = xs.len();
    let mut m = Mat::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let v = sp.inner(&ifs[a], &ifs[b]);
            m[(a, b)] = v.clone();
            m[(b, a)] = v;
        }
    }
    m
}

/// ⟨F, H⟩(Z) = ⟨F, i_Z H⟩.
pub fn contract_flux<S: Scalar>(sp: &Space<S>, f: &KForm<S>, h: &KForm<S>) -> KForm<S> {
    let comps: Vec<S> = sp.frame_vectors().iter().map(|z| sp.inner(f, &h.interior(z))).collect();
    KForm::one_form(&comps)
}

/// The string soliton triple (Rc − F² + ∇X♭, d*F − ⟨F, H⟩ + i_X F, dH + F∧F).
pub fn string_grs_residual<S: Scalar>(data: &SolitonData<S>) -> Result<(Mat<S>, KForm<S>, KForm<S>), SolitonError> {
    let sp = &data.space;
    let n = sp.ambient_dim();
    let f = data.flux.clone().unwrap_or_else(|| KForm::zero(n, 2));
    let first = grs_residual(data)?.sub(&flux_square(sp, &f));
    let second = sp.codifferential(&f) - contract_flux(sp, &f, &data.h) + f.interior(&data.x);
    Ok((first, second, data.bianchi()))
}

/// Levi-Civita divergence of a vector field.
pub fn divergence<S: Scalar>(sp: &Space<S>, x: &VectorField<S>) -> S {
    sp.nabla_vector(&sp.levi_civita(), x).trace()
}

/// R − (1/12)|H|² + 2 div X − |X|², with R the Riemannian scalar curvature.
pub fn weighted_scalar<S: Scalar>(data: &SolitonData<S>) -> Result<S, SolitonError> {
    let sp = &data.space;
    let lc = sp.levi_civita();
    let r = sp.curvature(&lc, RicciTrace::First).scalar(sp.ginv());
    let div = divergence(sp, &data.x);
    Ok(r - sp.norm2(&data.h) * S::ratio(1, 12) + div * S::from_i64(2) - sp.inner_vectors(&data.x, &data.x))
}

/// V = w θ♯ − df♯ with w = 7/6 for Spin(7) and 1 otherwise.
pub fn canonical_vector<S: Scalar>(s: &GStructure<S>, df: &KForm<S>) -> Result<VectorField<S>, SolitonError> {
    let sp = s.space();
    let theta = s.lee_form()?;
    Ok(sp.sharp(&theta.scale(&s.lee_weight())).sub(&sp.sharp(df)))
}

/// ∇V = 0 for the connection with torsion H. |V| is constant for invariant V.
pub fn parallel_certificate<S: Scalar>(data: &SolitonData<S>, v: &VectorField<S>) -> Result<bool, SolitonError> {
    let sp = &data.space;
    let conn = sp.connection(&data.h)?;
    Ok(sp.nabla_vector(&conn, v).is_zero())
}

/// (|H_φ|², (49/36)τ₀²) for a G₂ structure with V = 0 and df = 0.
pub fn g2_rigidity_identity<S: Scalar>(s: &GStructure<S>, df: &KForm<S>) -> Result<(S, S), SolitonError> {
    if s.kind() != Kind::G2 {
        return Err(SolitonError::Precondition(format!("needs a g2 structure, got {}", s.kind())));
    }
    if !df.is_zero() {
        return Err(SolitonError::Precondition("df ≠ 0".into()));
    }
    if !canonical_vector(s, df)?.is_zero() {
        return Err(SolitonError::Precondition("V ≠ 0".into()));
    }
    let h = s.bismut_torsion()?;
    let TorsionClasses::G2 { tau0, .. } = s.torsion()? else { unreachable!() };
    Ok((s.space().norm2(&h), tau0.square() * S::ratio(49, 36)))
}

/// Dilatino residual and whether the structure is strong (dH_Ψ = 0).
pub fn spin7_dilatino_residual<S: Scalar>(s: &GStructure<S>) -> Result<(S, bool), SolitonError> {
    if s.kind() != Kind::Spin7 {
        return Err(SolitonError::Precondition(format!("needs a spin7 structure, got {}", s.kind())));
    }
    let sp = s.space();
    let TorsionClasses::Spin7 { theta, zeta5 } = s.torsion()? else { unreachable!() };
    let strong = sp.d(&s.bismut_torsion()?).is_zero();
    let w = S::ratio(7, 6);
    let value = sp.codifferential(&theta).scalar_value() * w.clone() + sp.norm2(&theta) * w - sp.norm2(&zeta5);
    Ok((value, strong))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::default_labels;
    use crate::g_structures::{model_g2, model_spin7};
    use crate::lie_frame::LieAlgebraFrame;
    use crate::scalar::Exact;

    fn frame(n: usize, des: &[(usize, &[(i64, usize, usize)])]) -> LieAlgebraFrame<Exact> {
        let mut de = vec![KForm::zero(n, 2); n];
        for (i, terms) in des {
            for &(c, a, b) in terms.iter() {
                de[*i] = de[*i].clone() + KForm::basis(n, &[a, b]).scale(&Exact::int(c));
            }
        }
        LieAlgebraFrame::with_identity(default_labels(n), de).unwrap()
    }

    fn su2su2r(n: usize, off: usize) -> LieAlgebraFrame<Exact> {
        let o = off;
        frame(
            n,
            &[
                (o, &[(1, o + 1, o + 2)]),
                (o + 1, &[(-1, o, o + 2)]),
                (o + 2, &[(1, o, o + 1)]),
                (o + 3, &[(1, o + 4, o + 5)]),
                (o + 4, &[(-1, o + 3, o + 5)]),
                (o + 5, &[(1, o + 3, o + 4)]),
            ],
        )
    }

    #[test]
    fn abelian_data_is_trivial() {
        let sp = Space::full(frame(4, &[]));
        let d = SolitonData::new(sp, KForm::zero(4, 3), VectorField::zero(4));
        assert!(grs_residual(&d).unwrap().is_zero());
        assert!(weighted_scalar(&d).unwrap().is_zero());
    }

    #[test]
    fn g2_lee_vector_is_a_soliton_and_parallel() {
        let s = GStructure::g2(Space::full(su2su2r(7, 0)), model_g2()).unwrap();
        let h = s.bismut_torsion().unwrap();
        assert!(s.space().d(&h).is_zero());
        let v = canonical_vector(&s, &KForm::zero(7, 1)).unwrap();
        let d = SolitonData::new(s.space().clone(), h, v.clone());
        assert!(grs_residual(&d).unwrap().is_zero());
        assert!(parallel_certificate(&d, &v).unwrap());
        let err = g2_rigidity_identity(&s, &KForm::zero(7, 1)).unwrap_err();
        assert!(err.to_string().contains("V ≠ 0"));
    }

    #[test]
    fn spin7_dilatino_vanishes() {
        let s = GStructure::spin7(Space::full(su2su2r(8, 1)), model_spin7()).unwrap();
        let (r, strong) = spin7_dilatino_residual(&s).unwrap();
        assert!(strong);
        assert!(r.is_zero(), "{r}");
        let h = s.bismut_torsion().unwrap();
        let v = canonical_vector(&s, &KForm::zero(8, 1)).unwrap();
        assert!(grs_residual(&SolitonData::new(s.space().clone(), h, v)).unwrap().is_zero());
    }
}
