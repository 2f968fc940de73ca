//! A bundle of so(3) Lie algebras coupled to TR^2 by a non-flat connection:
//! Yang-Mills equations and agreement with Mackenzie's bracket.

use agd::adjustment::{check_mym, nabla_zeta, reconstruct_adjustment, strict_bla_bracket};
use agd::extension::{build_extension, compare_structure, mackenzie_extension};
use agd::fixtures::mackenzie;

fn main() {
    let d = mackenzie().classify().expect("K = 0 is a morphism").data;
    assert!(d.is_strict());
    let h = strict_bla_bracket(&d).expect("strict");
    let nz = nabla_zeta(&d);
    println!("{}", check_mym(&nz, &h, d.zeta(), Some(d.k())));

    let built = build_extension(&d).expect("strict data");
    let mack = mackenzie_extension(d.f_alg(), &d.e_alg().fibrewise(), d.nabla(), d.zeta()).expect("coupling holds");
    let cmp = compare_structure(&built.a, &mack.a);
    println!("extension vs Mackenzie: {} ({} frame pairs)", cmp.status, cmp.evaluated);

    let back = reconstruct_adjustment(&nz, &h, d.zeta(), d.k(), d.e_alg(), d.f_alg()).expect("hypotheses hold");
    println!("connection recovered: {}", back.data.nabla() == d.nabla());
}
