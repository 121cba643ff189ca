//! The `report_v1` schema: every scalar and form is a canonical string.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

pub const SCHEMA: &str = "report_v1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Named {
    pub name: String,
    pub value: String,
}

impl Named {
    pub fn new(name: impl Into<String>, value: impl Into<String>) -> Self {
        Named { name: name.into(), value: value.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorInfo {
    pub code: String,
    /// "parse" or "structural"
    pub class: String,
    pub line: Option<usize>,
    pub col: Option<usize>,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolitonSummary {
    pub vector: String,
    pub vector_zero: bool,
    pub grs_residual_norm2: String,
    pub parallel: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionSummary {
    /// "normalized" or "raw"
    pub mode: String,
    pub lambda: String,
    pub vector: String,
    pub mu: String,
    pub flux: String,
    pub h_hat: String,
    pub basic: bool,
    pub kind: Option<String>,
    pub forms: Vec<Named>,
    pub torsion: Vec<Named>,
    pub support: Vec<String>,
    pub raw: Vec<Named>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplittingReport {
    pub dh_hat_zero: bool,
    pub dmu_zero: bool,
    pub parallel_mu: bool,
    /// "all hold", "none hold" or "mixed"
    pub summary: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionSummary {
    pub kind: String,
    pub labels: Vec<String>,
    pub forms: Vec<Named>,
    pub h: String,
    pub strong: bool,
    /// the extended structure as `.gs` input
    pub document: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifierRow {
    pub item: String,
    pub passed: bool,
    pub residual: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub key: String,
    /// "paper" or "derived"
    pub provenance: String,
    pub expected: String,
    pub actual: Option<String>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub source: String,
    pub backend: String,
    pub error: Option<ErrorInfo>,
    pub kind: Option<String>,
    pub labels: Vec<String>,
    pub torsion: Vec<Named>,
    pub support: Vec<String>,
    pub lee_form: Option<String>,
    pub d_lee_form: Option<String>,
    pub h: Option<String>,
    pub strong_torsion: Option<bool>,
    pub bismut_flat: Option<bool>,
    pub dilatino: Option<String>,
    pub soliton: Option<SolitonSummary>,
    pub reduction: Option<ReductionSummary>,
    pub splitting: Option<SplittingReport>,
    pub anomaly: Option<String>,
    pub extension: Option<ExtensionSummary>,
    pub verifier: Vec<VerifierRow>,
    pub expectations: Vec<Expectation>,
}

impl Report {
    pub fn new(command: &str, source: &str, backend: &str) -> Self {
        Report {
            schema: SCHEMA.into(),
            command: command.into(),
            source: source.into(),
            backend: backend.into(),
            error: None,
            kind: None,
            labels: vec![],
            torsion: vec![],
            support: vec![],
            lee_form: None,
            d_lee_form: None,
            h: None,
            strong_torsion: None,
            bismut_flat: None,
            dilatino: None,
            soliton: None,
            reduction: None,
            splitting: None,
            anomaly: None,
            extension: None,
            verifier: vec![],
            expectations: vec![],
        }
    }

    /// 0 ok, 1 verifier or expectation failure, 2 parse error, 3 structural error.
    pub fn exit_code(&self) -> i32 {
        match &self.error {
            Some(e) if e.class == "parse" => 2,
            Some(_) => 3,
            None if self.verifier.iter().all(|r| r.passed) && self.expectations.iter().all(|e| e.passed) => 0,
            None => 1,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// Flat key/value view used to diff against stored expectations.
    pub fn observations(&self) -> Vec<(String, String)> {
        let mut out = vec![];
        let mut put = |k: String, v: String| out.push((k, v));
        if let Some(e) = &self.error {
            put("error.code".into(), e.code.clone());
        }
        if let Some(k) = &self.kind {
            put("kind".into(), k.clone());
        }
        for t in &self.torsion {
            put(format!("torsion.{}", t.name), t.value.clone());
        }
        if self.kind.is_some() {
            put("support".into(), self.support.join(", "));
        }
        let opt = [("lee_form", &self.lee_form), ("d_lee_form", &self.d_lee_form), ("h", &self.h), ("dilatino", &self.dilatino), ("anomaly", &self.anomaly)];
        for (k, v) in opt {
            if let Some(v) = v {
                put(k.into(), v.clone());
            }
        }
        if let Some(b) = self.strong_torsion {
            put("strong_torsion".into(), b.to_string());
        }
        if let Some(b) = self.bismut_flat {
            put("bismut_flat".into(), b.to_string());
        }
        if let Some(s) = &self.soliton {
            put("soliton.vector".into(), s.vector.clone());
            put("soliton.grs_residual_norm2".into(), s.grs_residual_norm2.clone());
            put("soliton.parallel".into(), s.parallel.to_string());
        }
        if let Some(r) = &self.reduction {
            put("reduction.lambda".into(), r.lambda.clone());
            put("reduction.vector".into(), r.vector.clone());
            put("reduction.flux".into(), r.flux.clone());
            put("reduction.h_hat".into(), r.h_hat.clone());
            for f in &r.forms {
                put(format!("reduction.forms.{}", f.name), f.value.clone());
            }
            for f in &r.torsion {
                put(format!("reduction.torsion.{}", f.name), f.value.clone());
            }
            put("reduction.support".into(), r.support.join(", "));
            for f in &r.raw {
                put(format!("reduction.raw.{}", f.name), f.value.clone());
            }
        }
        if let Some(s) = &self.splitting {
            put("splitting".into(), s.summary.clone());
        }
        if let Some(x) = &self.extension {
            put("extension.kind".into(), x.kind.clone());
            for f in &x.forms {
                put(format!("extension.forms.{}", f.name), f.value.clone());
            }
            put("extension.h".into(), x.h.clone());
            put("extension.strong".into(), x.strong.to_string());
        }
        for row in &self.verifier {
            put(format!("verifier.{}", row.item), if row.passed { "pass" } else { "fail" }.into());
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {} [{}]", self.command, self.source, self.backend);
        if let Some(e) = &self.error {
            let at = match (e.line, e.col) {
                (Some(l), Some(c)) => format!(" at line {l}, column {c}"),
                _ => String::new(),
            };
            let _ = writeln!(s, "error ({}){at}: {}", e.code, e.message);
        }
        if let Some(k) = &self.kind {
            let _ = writeln!(s, "structure: {k}");
        }
        if !self.torsion.is_empty() {
            let _ = writeln!(s, "torsion:");
            for t in &self.torsion {
                let _ = writeln!(s, "  {:<8} {}", t.name, t.value);
            }
        }
        let lines = [
            ("Lee form", self.lee_form.clone()),
            ("d(Lee form)", self.d_lee_form.clone()),
            ("H", self.h.clone()),
            ("strong torsion", self.strong_torsion.map(|b| b.to_string())),
            ("Bismut flat", self.bismut_flat.map(|b| b.to_string())),
            ("dilatino", self.dilatino.clone()),
        ];
        for (k, v) in lines {
            if let Some(v) = v {
                let _ = writeln!(s, "{k}: {v}");
            }
        }
        if let Some(sol) = &self.soliton {
            let _ = writeln!(s, "soliton vector V: {}", sol.vector);
            let _ = writeln!(s, "|Rc + ∇V♭|²: {}", sol.grs_residual_norm2);
        }
        if let Some(r) = &self.reduction {
            let _ = writeln!(s, "reduction ({}, |V| = {}):", r.mode, r.lambda);
            let _ = writeln!(s, "  μ = {}", r.mu);
            let _ = writeln!(s, "  F = {}", r.flux);
            let _ = writeln!(s, "  Ĥ = {}", r.h_hat);
            for f in &r.forms {
                let _ = writeln!(s, "  {} = {}", f.name, f.value);
            }
            for f in &r.torsion {
                let _ = writeln!(s, "  {:<8} {}", f.name, f.value);
            }
            for f in &r.raw {
                let _ = writeln!(s, "  raw {} = {}", f.name, f.value);
            }
        }
        if let Some(sp) = &self.splitting {
            let _ = writeln!(
                s,
                "splitting: {} (dĤ = 0: {}, dμ = 0: {}, Dμ = 0: {})",
                sp.summary, sp.dh_hat_zero, sp.dmu_zero, sp.parallel_mu
            );
        }
        if let Some(a) = &self.anomaly {
            let _ = writeln!(s, "anomaly dĤ + F∧F: {a}");
        }
        if let Some(x) = &self.extension {
            let _ = writeln!(s, "extension: {} on {}", x.kind, x.labels.join(" "));
            for f in &x.forms {
                let _ = writeln!(s, "  {} = {}", f.name, f.value);
            }
            let _ = writeln!(s, "  H = {} (strong: {})", x.h, x.strong);
        }
        if !self.verifier.is_empty() {
            let _ = writeln!(s, "verifier:");
            for r in &self.verifier {
                let mark = if r.passed { "pass" } else { "FAIL" };
                let _ = writeln!(s, "  [{mark}] {}", r.item);
                if !r.passed {
                    let _ = writeln!(s, "         residual: {}", r.residual);
                }
            }
        }
        if !self.expectations.is_empty() {
            let _ = writeln!(s, "expectations:");
            for e in &self.expectations {
                let mark = if e.passed { "pass" } else { "FAIL" };
                let _ = writeln!(s, "  [{mark}] {} ({}): {}", e.key, e.provenance, e.expected);
                if !e.passed {
                    let _ = writeln!(s, "         actual: {}", e.actual.as_deref().unwrap_or("(missing)"));
                }
            }
        }
        s
    }
}
