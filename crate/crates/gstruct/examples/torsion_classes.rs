//! Intrinsic torsion of the shipped SU(3), G₂ and Spin(7) examples.

use gstruct::cli::parse;

const FILES: [(&str, &str); 4] = [
    ("nonintsu3", include_str!("nonintsu3.gs")),
    ("nonintG2", include_str!("nonintG2.gs")),
    ("nonintG2nonclosedLee", include_str!("nonintG2nonclosedLee.gs")),
    ("nonintSpin7OneA", include_str!("nonintSpin7OneA.gs")),
];

fn main() {
    for (name, text) in FILES {
        let doc = parse(text).expect("fixture parses");
        let s = doc.structure().unwrap().expect("fixture has a structure");
        let labels = s.space().labels();
        let t = s.torsion().unwrap();
        println!("{name} ({})", s.kind());
        for (key, c) in t.components() {
            if !c.is_zero() {
                println!("  {key:<7} {}", c.render(labels));
            }
        }
        println!("  lee     {}", s.lee_form().unwrap().render(labels));
    }
}
