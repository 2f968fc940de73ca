//! The so(3) action algebroid on R^3 with K its anchor: classification,
//! strict bracket and the rank-6 extension.

use agd::adjustment::strict_bla_bracket;
use agd::algebroid::verify_algebroid;
use agd::extension::{build_extension, verify_sandglass};
use agd::fixtures::so3_action;

fn main() {
    let d = so3_action();
    println!("{}", verify_algebroid(d.e_alg()));

    let classified = d.classify().expect("K is a morphism");
    println!("{}", classified.report);
    let d = classified.data;
    println!("flags: {:?}\n", d.flags());

    let h = strict_bla_bracket(&d).expect("strict");
    let eb = d.e_alg().bundle();
    for (a, b) in [(0, 1), (1, 2), (2, 0)] {
        println!(
            "H({}, {}) = {}",
            eb.frame()[a],
            eb.frame()[b],
            eb.render(h.structure_function(a, b))
        );
    }

    let ext = build_extension(&d).expect("strict data");
    println!("\nA has rank {} with frame {:?}", ext.a.rank(), ext.a.bundle().frame());
    println!("{}", verify_sandglass(&ext));
}
