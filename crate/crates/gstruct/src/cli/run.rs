//! Command pipelines: check, reduce and extend, over either scalar backend.

use super::parse::{parse_bytes, Document, ErrorClass, ParseError};
use super::report::{ErrorInfo, ExtensionSummary, Named, ReductionSummary, Report, SolitonSummary, SplittingReport, VerifierRow};
use crate::exterior::{KForm, VectorField};
use crate::g_structures::{Forms, GStructure, Kind};
use crate::lie_frame::{LieAlgebraFrame, RicciTrace};
use crate::linalg::Mat;
use crate::reduction::{central_extend, reduce_g2, reduce_pair, reduce_spin7, splitting_check, ExtensionInput, ReductionResult};
use crate::scalar::{Exact, Float, Scalar};
use crate::soliton::{canonical_vector, grs_residual, parallel_certificate, spin7_dilatino_residual, SolitonData};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Check,
    Reduce,
    Extend,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Reduce => "reduce",
            Command::Extend => "extend",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Backend {
    Exact,
    Float { tol: f64 },
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::Exact => "exact",
            Backend::Float { .. } => "float",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Options {
    pub backend: Backend,
    /// report forms built from the unnormalised Lee vector
    pub raw_lee: bool,
    /// overrides the document's df
    pub df: Option<String>,
}

impl Default for Options {
    fn default() -> Self {
        Options { backend: Backend::Exact, raw_lee: false, df: None }
    }
}

/// A module error with its qualified code.
#[derive(Clone, Debug)]
struct Failure {
    code: String,
    message: String,
}

impl<E: fmt::Debug + fmt::Display> From<(&str, E)> for Failure {
    fn from((module, e): (&str, E)) -> Self {
        Failure { code: super::parse::variant_code(module, &e), message: e.to_string() }
    }
}

fn fail<E: fmt::Debug + fmt::Display>(module: &'static str) -> impl Fn(E) -> Failure {
    move |e| Failure::from((module, e))
}

fn parse_error_info(e: &ParseError) -> ErrorInfo {
    ErrorInfo {
        code: e.code.clone(),
        class: match e.class {
            ErrorClass::Syntax => "parse".into(),
            ErrorClass::Structural => "structural".into(),
        },
        line: Some(e.line),
        col: Some(e.col),
        message: e.message.clone(),
    }
}

/// Parse and run; all failures are recorded in the report.
pub fn run_source(bytes: &[u8], source: &str, command: Command, opts: &Options) -> Report {
    match parse_bytes(bytes) {
        Ok(doc) => run(&doc, command, source, opts),
        Err(e) => {
            let mut r = Report::new(command.name(), source, opts.backend.name());
            r.error = Some(parse_error_info(&e));
            r
        }
    }
}

pub fn run(doc: &Document, command: Command, source: &str, opts: &Options) -> Report {
    let mut report = Report::new(command.name(), source, opts.backend.name());
    report.labels = doc.final_labels().to_vec();
    let prepared = (|| -> Result<(Option<GStructure<Exact>>, LieAlgebraFrame<Exact>, KForm<Exact>), ParseError> {
        let s = doc.structure()?;
        let frame = doc.frame()?;
        let df = match &opts.df {
            Some(t) => {
                let f = doc.form(t).map_err(|e| ParseError { message: format!("--df: {}", e.message), ..e })?;
                if !f.is_zero() && f.degree() != 1 {
                    return Err(ParseError { line: 1, col: 1, class: ErrorClass::Syntax, code: "parse::syntax".into(), message: "--df must be a 1-form".into() });
                }
                if f.is_zero() { KForm::zero(doc.dim, 1) } else { f }
            }
            None => doc.df.clone().unwrap_or_else(|| KForm::zero(doc.dim, 1)),
        };
        Ok((s, frame, df))
    })();
    let (s, frame, df) = match prepared {
        Ok(p) => p,
        Err(e) => {
            report.error = Some(parse_error_info(&e));
            return report;
        }
    };
    let result = match opts.backend {
        Backend::Exact => pipeline(doc, s, frame, df, command, opts, &mut report, |x: &Exact| x.clone()),
        Backend::Float { tol } => pipeline(doc, s, frame, df, command, opts, &mut report, move |x: &Exact| Float::new(x.to_f64(), tol)),
    };
    if let Err(f) = result {
        report.error = Some(ErrorInfo { code: f.code, class: "structural".into(), line: None, col: None, message: f.message });
    }
    report
}

fn row<S: Scalar>(item: &str, diff: &KForm<S>, labels: &[String]) -> VerifierRow {
    VerifierRow { item: item.into(), passed: diff.is_zero(), residual: diff.render(labels) }
}

fn matrix_norm2<S: Scalar>(m: &Mat<S>) -> S {
    m.entries().iter().fold(S::zero(), |acc, x| acc + x.square())
}

fn vector_text<S: Scalar>(v: &VectorField<S>, labels: &[String]) -> String {
    KForm::one_form(v.comps()).render(labels)
}

fn named_forms<S: Scalar>(s: &GStructure<S>, labels: &[String]) -> Vec<Named> {
    let pairs: Vec<(&str, &KForm<S>)> = match s.forms() {
        Forms::AlmostHermitian { omega } => vec![("omega", omega)],
        Forms::SU3 { omega, omega_plus, omega_minus } => vec![("omega", omega), ("omega_plus", omega_plus), ("omega_minus", omega_minus)],
        Forms::G2 { phi, star_phi } => vec![("phi", phi), ("star_phi", star_phi)],
        Forms::Spin7 { psi } => vec![("psi", psi)],
    };
    pairs.into_iter().map(|(n, f)| Named::new(n, f.render(labels))).collect()
}

#[allow(clippy::too_many_arguments)]
fn pipeline<S: Scalar>(
    doc: &Document,
    s: Option<GStructure<Exact>>,
    frame: LieAlgebraFrame<Exact>,
    df: KForm<Exact>,
    command: Command,
    opts: &Options,
    report: &mut Report,
    lift: impl Fn(&Exact) -> S + Copy,
) -> Result<(), Failure> {
    let labels = frame.labels().to_vec();
    let df: KForm<S> = df.map_coeffs(lift);
    let Some(s) = s.map(|s| s.convert(lift)) else {
        return frame_only(doc, &frame.convert(lift), command, report, lift);
    };
    let h = check(&s, &df, report, &labels)?;
    match command {
        Command::Check => Ok(()),
        Command::Reduce => reduce(doc, &s, h, &df, opts, report, &labels, lift),
        Command::Extend => extend(doc, &s, &df, report, lift),
    }
}

fn frame_only<S: Scalar>(doc: &Document, frame: &LieAlgebraFrame<S>, command: Command, report: &mut Report, lift: impl Fn(&Exact) -> S + Copy) -> Result<(), Failure> {
    match command {
        Command::Check => Ok(()),
        Command::Reduce => {
            let v = doc.vector.as_ref().ok_or(Failure { code: "cli::missing_input".into(), message: "reduce needs a structure or a 'vector V' line".into() })?;
            let v = VectorField::new(v.comps().iter().map(lift).collect());
            let h = KForm::zero(frame.dim(), 3);
            let red = reduce_pair(frame, &h, &v, true).map_err(fail("reduction"))?;
            summarize_pair(&red, report, frame.labels(), "normalized");
            Ok(())
        }
        Command::Extend => Err(Failure { code: "cli::missing_input".into(), message: "extend needs an su3 or g2 structure".into() }),
    }
}

/// Torsion, Lee form, Bismut torsion and soliton data; returns H if it exists.
fn check<S: Scalar>(s: &GStructure<S>, df: &KForm<S>, report: &mut Report, labels: &[String]) -> Result<Option<KForm<S>>, Failure> {
    let sp = s.space();
    report.kind = Some(s.kind().name().into());
    let t = s.torsion().map_err(fail("g_structures"))?;
    report.torsion = t.components().into_iter().map(|(n, c)| Named::new(n, c.render(labels))).collect();
    report.support = t.support().into_iter().map(String::from).collect();
    let lee = s.lee_form().map_err(fail("g_structures"))?;
    report.lee_form = Some(lee.render(labels));
    report.d_lee_form = Some(sp.d(&lee).render(labels));
    let rebuilt = s.reconstruct(&t);
    let bad = rebuilt.iter().find(|(a, b)| a != b);
    report.verifier.push(VerifierRow {
        item: "torsion reconstruction".into(),
        passed: bad.is_none(),
        residual: bad.map(|(a, b)| (a.clone() - b.clone()).render(labels)).unwrap_or_else(|| "0".into()),
    });

    let h = match s.bismut_torsion() {
        Ok(h) => h,
        Err(_) => return Ok(None),
    };
    report.h = Some(h.render(labels));
    match s.solve_skew_torsion() {
        Ok(h2) => report.verifier.push(row("bismut_torsion = solve_skew_torsion", &(h.clone() - h2), labels)),
        Err(e) => report.verifier.push(VerifierRow { item: "bismut_torsion = solve_skew_torsion".into(), passed: false, residual: e.to_string() }),
    }
    let strong = sp.d(&h).is_zero();
    report.strong_torsion = Some(strong);
    let conn = sp.connection(&h).map_err(fail("lie_frame"))?;
    report.bismut_flat = Some(sp.curvature(&conn, RicciTrace::First).is_flat());
    let v = canonical_vector(s, df).map_err(fail("soliton"))?;
    let data = SolitonData::new(sp.clone(), h.clone(), v.clone()).with_df(df.clone());
    let grs = grs_residual(&data).map_err(fail("soliton"))?;
    let parallel = parallel_certificate(&data, &v).map_err(fail("soliton"))?;
    report.soliton = Some(SolitonSummary {
        vector: vector_text(&v, labels),
        vector_zero: v.is_zero(),
        grs_residual_norm2: matrix_norm2(&grs).canonical(),
        parallel,
    });
    if s.kind() == Kind::Spin7 {
        let (dil, _) = spin7_dilatino_residual(s).map_err(fail("soliton"))?;
        report.dilatino = Some(dil.canonical());
        if strong {
            report.verifier.push(VerifierRow { item: "dilatino = 0".into(), passed: dil.is_zero(), residual: dil.canonical() });
        }
    }
    if strong && s.kind() != Kind::AlmostHermitian {
        report.verifier.push(VerifierRow { item: "GRS: Rc + ∇V♭ = 0".into(), passed: grs.is_zero(), residual: matrix_norm2(&grs).canonical() });
        report.verifier.push(VerifierRow { item: "∇V = 0".into(), passed: parallel, residual: if parallel { "0".into() } else { "∇V ≠ 0".into() } });
    }
    Ok(Some(h))
}

fn summarize_pair<S: Scalar>(red: &ReductionResult<S>, report: &mut Report, labels: &[String], mode: &str) {
    report.reduction = Some(ReductionSummary {
        mode: mode.into(),
        lambda: red.lambda.canonical(),
        vector: vector_text(&red.v, labels),
        mu: red.mu.render(labels),
        flux: red.flux.render(labels),
        h_hat: red.h_hat.render(labels),
        basic: red.basic,
        kind: None,
        forms: vec![],
        torsion: vec![],
        support: vec![],
        raw: vec![],
    });
    let sp = splitting_check(red);
    let summary = match (sp.dh_hat_zero, sp.dmu_zero, sp.parallel_mu) {
        (true, true, true) => "all hold",
        (false, false, false) => "none hold",
        _ => "mixed",
    };
    report.splitting = Some(SplittingReport { dh_hat_zero: sp.dh_hat_zero, dmu_zero: sp.dmu_zero, parallel_mu: sp.parallel_mu, summary: summary.into() });
    report.anomaly = Some(red.anomaly.render(labels));
}

#[allow(clippy::too_many_arguments)]
fn reduce<S: Scalar>(
    doc: &Document,
    s: &GStructure<S>,
    h: Option<KForm<S>>,
    df: &KForm<S>,
    opts: &Options,
    report: &mut Report,
    labels: &[String],
    lift: impl Fn(&Exact) -> S + Copy,
) -> Result<(), Failure> {
    let mode = if opts.raw_lee { "raw" } else { "normalized" };
    let red = match s.kind() {
        Kind::G2 => reduce_g2(s, df),
        Kind::Spin7 => reduce_spin7(s, df),
        _ => {
            let v = doc.vector.as_ref().ok_or(Failure {
                code: "reduction::wrong_kind".into(),
                message: format!("{} structures reduce only along an explicit 'vector V'", s.kind()),
            })?;
            let v = VectorField::new(v.comps().iter().map(lift).collect());
            let h = h.ok_or(Failure { code: "g_structures::no_solution".into(), message: "no skew-torsion connection".into() })?;
            reduce_pair(s.space().frame(), &h, &v, true)
        }
    }
    .map_err(fail("reduction"))?;
    summarize_pair(&red, report, labels, mode);
    let summary = report.reduction.as_mut().unwrap();
    let raw: Vec<Named> = red.raw.iter().map(|(n, f)| Named::new(n.clone(), f.render(labels))).collect();
    if let Some(rs) = &red.structure {
        summary.kind = Some(rs.kind().name().into());
        summary.forms = if opts.raw_lee { raw.iter().filter(|n| n.name != "F").cloned().collect() } else { named_forms(rs, labels) };
    }
    if let Some(t) = &red.torsion {
        summary.torsion = t.components().into_iter().map(|(n, c)| Named::new(n, c.render(labels))).collect();
        summary.support = t.support().into_iter().map(String::from).collect();
    }
    summary.raw = raw;
    for c in &red.checks {
        report.verifier.push(VerifierRow { item: c.name.clone(), passed: c.passed(), residual: c.residual.render(labels) });
    }
    Ok(())
}

fn extend<S: Scalar>(doc: &Document, s: &GStructure<S>, df: &KForm<S>, report: &mut Report, lift: impl Fn(&Exact) -> S + Copy) -> Result<(), Failure> {
    let n = doc.dim;
    let flux = doc.flux.as_ref().map(|f| f.map_coeffs(lift)).unwrap_or_else(|| KForm::zero(n, 2));
    let input = ExtensionInput { structure: s.clone(), flux: flux.clone(), df: df.clone() };
    let ext = central_extend(&input).map_err(fail("reduction"))?;
    let up = ext.structure.space();
    let labels = up.labels().to_vec();
    let m = n + 1;
    let forms = named_forms(&ext.structure, &labels);
    report.extension = Some(ExtensionSummary {
        kind: ext.structure.kind().name().into(),
        labels: labels.clone(),
        forms: forms.clone(),
        h: ext.h.render(&labels),
        strong: up.d(&ext.h).is_zero(),
        document: render_document(up.frame(), &ext.structure, &df.embed(m)),
    });

    // reduce the extension again and compare with the input
    let df_up = df.embed(m);
    let red = match ext.structure.kind() {
        Kind::G2 => reduce_g2(&ext.structure, &df_up),
        _ => reduce_spin7(&ext.structure, &df_up),
    }
    .map_err(fail("reduction"))?;
    let unit = red.lambda == S::one() && red.v == VectorField::basis(m, n);
    report.verifier.push(VerifierRow {
        item: format!("V = {}", labels[n]),
        passed: unit,
        residual: format!("|V| = {}, V = {}", red.lambda.canonical(), vector_text(&red.v, &labels)),
    });
    let base: Vec<KForm<S>> = match s.forms() {
        Forms::SU3 { omega, omega_plus, .. } => vec![omega.clone(), omega_plus.clone()],
        Forms::G2 { phi, .. } => vec![phi.clone()],
        _ => vec![],
    };
    let back: Vec<KForm<S>> = match red.structure.as_ref().map(|r| r.forms()) {
        Some(Forms::SU3 { omega, omega_plus, .. }) => vec![omega.clone(), omega_plus.clone()],
        Some(Forms::G2 { phi, .. }) => vec![phi.clone()],
        _ => vec![],
    };
    let names: &[&str] = if base.len() == 2 { &["ω", "Ω⁺"] } else { &["φ"] };
    for ((name, a), b) in names.iter().zip(&base).zip(&back) {
        report.verifier.push(row(&format!("reduce∘extend recovers {name}"), &(b.clone() - a.embed(m)), &labels));
    }
    report.verifier.push(row("reduce∘extend recovers F", &(red.flux.clone() - flux.embed(m)), &labels));
    Ok(())
}

/// `.gs` text for a structure on a full frame.
pub fn render_document<S: Scalar>(frame: &LieAlgebraFrame<S>, s: &GStructure<S>, df: &KForm<S>) -> String {
    let labels = frame.labels();
    let n = frame.dim();
    let mut out = format!("dim {n}\n");
    let mut rads: Vec<u64> = vec![];
    let mut note = |x: &S| {
        for d in radicands(&x.canonical()) {
            if !rads.contains(&d) {
                rads.push(d);
            }
        }
    };
    let g = frame.geometry().metric();
    for x in g.entries() {
        note(x);
    }
    for f in frame.coframe_d().iter().chain(s.primary_forms().iter()).chain(std::iter::once(df)) {
        for (_, x) in f.terms() {
            note(x);
        }
    }
    rads.sort();
    for d in rads {
        out.push_str(&format!("field sqrt {d}\n"));
    }
    out.push_str(&format!("frame {}\n", labels.join(" ")));
    for (l, f) in labels.iter().zip(frame.coframe_d()) {
        if !f.is_zero() {
            out.push_str(&format!("d {l} = {}\n", f.render(labels)));
        }
    }
    if *g != Mat::identity(n) {
        let rows: Vec<String> = (0..n).map(|i| g.row(i).iter().map(|x| x.canonical()).collect::<Vec<_>>().join(", ")).collect();
        out.push_str(&format!("metric rows {}\n", rows.join("; ")));
    }
    for nf in named_forms(s, labels) {
        if matches!(nf.name.as_str(), "omega" | "omega_plus" | "phi" | "psi") {
            out.push_str(&format!("structure {} {} = {}\n", s.kind(), nf.name, nf.value));
        }
    }
    out.push_str(&format!("df = {}\n", df.render(labels)));
    out
}

fn radicands(text: &str) -> Vec<u64> {
    text.match_indices("sqrt")
        .filter_map(|(i, _)| {
            let digits: String = text[i + 4..].chars().take_while(|c| c.is_ascii_digit()).collect();
            digits.parse().ok()
        })
        .collect()
}
