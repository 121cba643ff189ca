//! Bismut torsion by closed formula and by linear solve, flatness of the
//! connection, and the soliton residual Rc + ∇θ on a G₂ example.

use gstruct::cli::parse;
use gstruct::lie_frame::RicciTrace;
use gstruct::soliton::{grs_residual, SolitonData};

fn main() {
    let doc = parse(include_str!("nonintG2nonclosedLee.gs")).unwrap();
    let s = doc.structure().unwrap().unwrap();
    let sp = s.space();

    let h = s.bismut_torsion().unwrap();
    let solved = s.solve_skew_torsion().unwrap();
    println!("H            = {}", h.render(sp.labels()));
    println!("routes agree = {}", h == solved);
    println!("dH = 0       = {}", sp.d(&h).is_zero());

    let conn = sp.connection(&h).unwrap();
    println!("flat         = {}", sp.curvature(&conn, RicciTrace::First).is_flat());

    let x = sp.sharp(&s.lee_form().unwrap());
    let residual = grs_residual(&SolitonData::new(sp.clone(), h, x)).unwrap();
    println!("Rc + ∇θ = 0  = {}", residual.is_zero());
}
