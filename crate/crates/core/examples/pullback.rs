//! Pull the so(3) adjustment back along R^4 -> R^3 and build the extension
//! over the pullback algebroid.

use agd::algebroid::verify_algebroid;
use agd::extension::build_extension;
use agd::fixtures::so3_action;
use agd::pullback::{pullback_adjustment, verify_pullback_relations, Submersion};

fn main() {
    let d = so3_action().classify().expect("K is a morphism").data;
    let phi = Submersion::product(d.f_alg().patch(), ["x4"]).expect("fresh coordinate");
    let pulled = pullback_adjustment(&d, &phi, None).expect("strict data pulls back");
    println!("{}", pulled.report);
    println!("{}", verify_pullback_relations(&d, &pulled));

    let frame = pulled.data.f_alg().bundle().frame();
    println!("pullback frame: {frame:?}");
    let ext = build_extension(&pulled.data).expect("strict over N");
    println!("extension rank {}: {}", ext.a.rank(), verify_algebroid(&ext.a).passed());
}
