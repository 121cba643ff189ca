//! Reduce a strong G₂ structure along its Lee vector and print the verifier table.

use gstruct::cli::parse;
use gstruct::exterior::KForm;
use gstruct::reduction::{reduce_g2, splitting_check};

fn main() {
    let doc = parse(include_str!("nonintG2.gs")).unwrap();
    let s = doc.structure().unwrap().unwrap();
    let red = reduce_g2(&s, &KForm::zero(7, 1)).unwrap();
    let labels = s.space().labels();

    println!("|V| = {}", red.lambda);
    println!("F   = {}", red.flux.render(labels));
    println!("Ĥ   = {}", red.h_hat.render(labels));
    let su3 = red.structure.as_ref().unwrap();
    for f in su3.primary_forms() {
        println!("    {}", f.render(labels));
    }
    for c in &red.checks {
        println!("{:<6} {}", if c.passed() { "ok" } else { "FAIL" }, c.name);
    }
    println!("{:?}", splitting_check(&red));
}
