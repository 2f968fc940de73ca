//! Exact rational functions: parsing, canonical form, derivatives.

use agd::symexpr::{parse_expr, partial, CoordinatePatch};

fn main() {
    let patch = CoordinatePatch::new(["x", "y"]).expect("valid names");
    let f = parse_expr("(x^2 - y^2)/(x + y) + 1/2*y", &patch).expect("rational");
    println!("f          = {}", f.render(&patch));

    let g = parse_expr("x/(x*y + 1)", &patch).expect("rational");
    for (i, name) in patch.names().iter().enumerate() {
        let d = partial(&g, i, &patch).expect("index in range");
        println!("d{name} g       = {}", d.render(&patch));
    }

    let sum = &g + &parse_expr("-x/(x*y + 1)", &patch).unwrap();
    println!("g - g      = {}", sum.render(&patch));

    match parse_expr("sin(x)", &patch) {
        Ok(_) => unreachable!(),
        Err(e) => println!("sin(x)     : {e}"),
    }
}
