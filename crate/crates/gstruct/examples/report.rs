//! Parse an inline document, run `check` and print the JSON report.

use gstruct::cli::{run_source, Command, Options};

const DOC: &str = "\
dim 6
frame e1 e2 e3 e4 e5 e6
d e1 = e2^e3
d e2 = e3^e1
d e3 = e1^e2
d e4 = e5^e6
d e5 = e6^e4
d e6 = e4^e5
structure su3 omega = e1^e4 + e2^e5 - e3^e6
structure su3 omega_plus = e1^e2^e3 + e1^e5^e6 - e2^e4^e6 - e3^e4^e5
";

fn main() {
    let report = run_source(DOC.as_bytes(), "inline", Command::Check, &Options::default());
    print!("{}", report.to_json());
    std::process::exit(report.exit_code());
}
