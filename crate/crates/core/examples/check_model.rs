//! Load a model file and run its tasks, as `agd check` does.
//!
//! `cargo run --example check_model -- fixtures/shear.agd 'verify_*'`

use agd::dsl::{load_model, run};

fn main() {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/so3_action.agd").into());
    let filter = args.next();
    let model = match load_model(&path) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("{path}: {e}");
            std::process::exit(2);
        }
    };
    let report = run(&model, filter.as_deref()).expect("valid glob");
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    println!("{report}");
    std::process::exit(report.exit_code());
}
