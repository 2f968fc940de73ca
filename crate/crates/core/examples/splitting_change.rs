//! Change of splitting by a 1-form lambda on the Mackenzie fixture, in both
//! readings of the primitive's transformation rule.

use agd::adjustment::{apply_splitting_change, SplittingVariant};
use agd::dsl::load_str;

const MODEL: &str = include_str!("../fixtures/mackenzie.agd");

fn main() {
    let model = load_str(MODEL).expect("fixture loads");
    let d = &model.adjustments["adj"];
    let lambda = &model.forms1["lambda"].lambda;
    for variant in [SplittingVariant::Additive, SplittingVariant::Printed] {
        let change = apply_splitting_change(d, lambda, variant).expect("K = 0");
        println!(
            "{variant:?}: Yang-Mills after the change {}",
            if change.report.passed() { "holds" } else { "fails" }
        );
        print!("{}", change.report);
    }
}
