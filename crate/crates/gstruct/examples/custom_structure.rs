//! Assemble a frame and a G₂ structure in code instead of from a file.

use gstruct::exterior::{default_labels, KForm};
use gstruct::g_structures::{model_g2, GStructure};
use gstruct::lie_frame::LieAlgebraFrame;
use gstruct::scalar::Exact;
use gstruct::space::Space;

fn main() {
    // su(2) ⊕ ℝ⁴: de1 = e23, de2 = e31, de3 = e12
    let n = 7;
    let mut de = vec![KForm::zero(n, 2); n];
    de[0] = KForm::basis(n, &[1, 2]);
    de[1] = -KForm::basis(n, &[0, 2]);
    de[2] = KForm::basis(n, &[0, 1]);
    let frame = LieAlgebraFrame::<Exact>::with_identity(default_labels(n), de).unwrap();
    let s = GStructure::g2(Space::full(frame), model_g2()).unwrap();
    let labels = s.space().labels();

    for (key, c) in s.torsion().unwrap().components() {
        println!("{key:<5} {}", c.render(labels));
    }
    match s.bismut_torsion() {
        Ok(h) => println!("H = {}", h.render(labels)),
        Err(e) => println!("no skew torsion: {e}"),
    }
}
