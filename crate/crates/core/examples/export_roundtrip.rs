//! Export a built extension as a model file and load it back.

use agd::dsl::{build_named_extension, export_extension_text, load_str};

const MODEL: &str = include_str!("../fixtures/mackenzie.agd");

fn main() {
    let model = load_str(MODEL).expect("fixture loads");
    let text = export_extension_text(&model, "M").expect("extension builds");
    println!("{text}");
    let back = load_str(&text).expect("export reloads");
    let built = build_named_extension(&model, "M").expect("extension builds");
    println!(
        "same structure functions: {}",
        back.algebroids["M"].structure() == built.a.structure()
    );
}
