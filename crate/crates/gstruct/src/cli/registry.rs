//! Shipped example fixtures with stored expectations.
//!
//! `paper` holds values as printed; `derived` holds values computed here and
//! frozen after cross-checking. Both are diffed in `example` mode.

use super::parse::parse_expression;
use super::report::{Expectation, Report};
use super::run::{run_source, Command, Options};
use crate::scalar::Scalar;

pub struct Fixture {
    pub id: &'static str,
    pub file: &'static str,
    pub source: &'static str,
    pub command: Command,
    pub raw_lee: bool,
    pub paper: &'static [(&'static str, &'static str)],
    pub derived: &'static [(&'static str, &'static str)],
}

pub const FIXTURES: &[Fixture] = &[
    Fixture {
        id: "nonintsu3",
        file: "nonintsu3.gs",
        source: include_str!("../../examples/nonintsu3.gs"),
        command: Command::Check,
        raw_lee: false,
        paper: &[
            ("torsion.sigma0", "-2"),
            ("torsion.nu3", "3*eta1^eta3^eta5 + eta1^eta4^eta6 + eta2^eta3^eta6 + eta2^eta4^eta5"),
            ("support", "sigma0, nu3"),
        ],
        derived: &[("lee_form", "0"), ("strong_torsion", "true"), ("bismut_flat", "true"), ("soliton.vector", "0")],
    },
    Fixture {
        id: "nonintG2",
        file: "nonintG2.gs",
        source: include_str!("../../examples/nonintG2.gs"),
        command: Command::Reduce,
        raw_lee: false,
        paper: &[
            ("lee_form", "e7"),
            ("d_lee_form", "0"),
            ("torsion.tau0", "1"),
            ("reduction.forms.omega", "e1^e4 - e2^e5 - e3^e6"),
            ("reduction.forms.omega_plus", "e1^e2^e3 + e1^e5^e6 - e2^e4^e6 - e3^e4^e5"),
            ("reduction.support", "sigma0, pi0, nu3"),
            ("reduction.torsion.sigma0", "1/2"),
            ("reduction.torsion.pi0", "7/12"),
            ("splitting", "all hold"),
        ],
        derived: &[
            ("torsion.tau0", "6/7"),
            ("torsion.tau1", "1/4*e7"),
            ("reduction.forms.omega", "e1^e4 + e2^e5 - e3^e6"),
            ("reduction.torsion.pi0", "1/2"),
            ("reduction.h_hat", "e1^e2^e3 + e4^e5^e6"),
        ],
    },
    Fixture {
        id: "nonintG2nonclosedLee",
        file: "nonintG2nonclosedLee.gs",
        source: include_str!("../../examples/nonintG2nonclosedLee.gs"),
        command: Command::Reduce,
        raw_lee: true,
        paper: &[
            ("lee_form", "e4 - e3"),
            ("d_lee_form", "e5^e6 - e1^e2"),
            ("reduction.raw.omega", "e1^e6 + e2^e5 - e3^e7 + e1^e5 - e2^e6 - e4^e7"),
            ("reduction.raw.omega_plus", "e1^e2^e7 - e1^e4^e6 - e2^e4^e5 + e5^e6^e7 - e1^e3^e6 - e2^e3^e5"),
        ],
        derived: &[
            ("reduction.lambda", "sqrt2"),
            ("reduction.raw.F", "e5^e6 - e1^e2"),
            (
                "reduction.raw.omega_plus",
                "e1^e2^e7 + e5^e6^e7 + 1/2*(e1^e3^e5 - e2^e3^e5 + e1^e4^e5 - e2^e4^e5 - e1^e3^e6 - e2^e3^e6 - e1^e4^e6 - e2^e4^e6)",
            ),
            ("splitting", "none hold"),
        ],
    },
    Fixture {
        id: "nonintSpin7OneA",
        file: "nonintSpin7OneA.gs",
        source: include_str!("../../examples/nonintSpin7OneA.gs"),
        command: Command::Reduce,
        raw_lee: false,
        paper: &[
            ("lee_form", "6/7*(e4 - e3)"),
            (
                "reduction.raw.phi",
                "6/7*(-e0^e2^e6 - e0^e3^e7 - e0^e4^e7 + e0^e1^e6 + e0^e2^e5 - e0^e1^e5 + e3^e5^e6 + e4^e5^e6 - e1^e5^e7 + e1^e2^e4 + e1^e2^e3 - e2^e5^e7 - e1^e6^e7 - e2^e6^e7)",
            ),
            ("reduction.torsion.tau0", "-6/7"),
            ("reduction.torsion.tau2", "0"),
            ("splitting", "none hold"),
        ],
        derived: &[
            ("reduction.lambda", "sqrt2"),
            ("reduction.torsion.tau0", "6/7"),
            (
                "reduction.raw.phi",
                "6/7*(e1^e2^e3 + e1^e2^e4 + e0^e1^e5 + e0^e2^e5 + e0^e1^e6 - e0^e2^e6 + e3^e5^e6 + e4^e5^e6 - e0^e3^e7 - e0^e4^e7 + e1^e5^e7 - e2^e5^e7 - e1^e6^e7 - e2^e6^e7)",
            ),
            ("dilatino", "0"),
        ],
    },
    Fixture {
        id: "nonintSpin7Two",
        file: "nonintSpin7Two.gs",
        source: include_str!("../../examples/nonintSpin7Two.gs"),
        command: Command::Check,
        raw_lee: false,
        paper: &[
            ("lee_form", "1/7*((sqrt3 + 1)*e2 - e3 - 2*e4 - (sqrt3 - 1)*e5 - e6 + e7)"),
            ("d_lee_form", "1/14*(2*e1^e2 + (sqrt3 - 1)*e3^e4 - e1^e5 + e2^e4 - e1^e4 - e2^e5 + e3^e6)"),
            ("dilatino", "0"),
            ("bismut_flat", "true"),
        ],
        derived: &[("error.code", "lie_frame::jacobi")],
    },
    Fixture {
        id: "nonintSpin7TwoCompleted",
        file: "nonintSpin7TwoCompleted.gs",
        source: include_str!("../../examples/nonintSpin7TwoCompleted.gs"),
        command: Command::Reduce,
        raw_lee: false,
        paper: &[],
        derived: &[
            ("lee_form", "3/7*(-e1 + (sqrt3 + 1)*e2 - e3 - 2*e4 - (sqrt3 - 1)*e5 - e6 + e7)"),
            ("dilatino", "0"),
            ("strong_torsion", "true"),
            ("bismut_flat", "true"),
            ("reduction.lambda", "2"),
        ],
    },
    Fixture {
        id: "nonintG2reduced",
        file: "nonintG2reduced.gs",
        source: include_str!("../../examples/nonintG2reduced.gs"),
        command: Command::Extend,
        raw_lee: false,
        paper: &[],
        derived: &[
            ("extension.forms.phi", "e1^e2^e3 - e3^e4^e5 - e2^e4^e6 + e1^e5^e6 + e1^e4^e7 + e2^e5^e7 - e3^e6^e7"),
            ("extension.h", "e1^e2^e3 + e4^e5^e6"),
            ("extension.strong", "true"),
        ],
    },
];

pub fn fixture(id: &str) -> Option<&'static Fixture> {
    FIXTURES.iter().find(|f| f.id == id)
}

/// Expressions compare as forms; anything else compares as text.
fn normalize(text: &str, labels: &[String]) -> String {
    match parse_expression(text, labels) {
        Ok(f) if f.is_zero() => "0".into(),
        Ok(f) if f.degree() == 0 => f.scalar_value().canonical(),
        Ok(f) => f.render(labels),
        Err(_) => text.trim().to_string(),
    }
}

/// Run a fixture and diff it against its stored expectations.
pub fn example(id: &str) -> Option<Report> {
    let fx = fixture(id)?;
    let opts = Options { raw_lee: fx.raw_lee, ..Options::default() };
    let mut report = run_source(fx.source.as_bytes(), fx.file, fx.command, &opts);
    report.command = format!("example {}", fx.id);
    let obs = report.observations();
    let labels = report.labels.clone();
    for (prov, list) in [("paper", fx.paper), ("derived", fx.derived)] {
        for (key, expected) in list {
            let actual = obs.iter().find(|(k, _)| k == key).map(|(_, v)| v.clone());
            let passed = actual.as_ref().is_some_and(|a| normalize(a, &labels) == normalize(expected, &labels));
            report.expectations.push(Expectation {
                key: key.to_string(),
                provenance: prov.into(),
                expected: expected.to_string(),
                actual,
                passed,
            });
        }
    }
    Some(report)
}
