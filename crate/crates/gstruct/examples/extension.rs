//! Build the strong G₂ structure on the central extension of an SU(3) structure
//! and reduce it again.

use gstruct::cli::parse;
use gstruct::exterior::{default_labels, KForm};
use gstruct::reduction::{central_extend, quotient_input, reduce_g2, ExtensionInput};

fn main() {
    let doc = parse(include_str!("nonintG2reduced.gs")).unwrap();
    let base = doc.structure().unwrap().unwrap();
    let input = ExtensionInput { structure: base.clone(), flux: KForm::zero(6, 2), df: KForm::zero(6, 1) };
    let up = central_extend(&input).unwrap();
    let labels = up.structure.space().labels();
    println!("φ = {}", up.structure.primary_forms()[0].render(labels));
    println!("H = {}", up.h.render(labels));

    let red = reduce_g2(&up.structure, &KForm::zero(7, 1)).unwrap();
    let back = quotient_input(&red, default_labels(7)).unwrap();
    println!("round trip = {}", back.structure.primary_forms() == base.primary_forms());
}
