use std::fmt::Write as _;
use std::path::Path;

use super::{build_named_extension, Model};
use crate::algebroid::{verify_algebroid, LieAlgebroid};
use crate::report::Report;

#[derive(Debug, thiserror::Error)]
pub enum ExportError {
    #[error("extension `{name}` could not be built:\n{report}")]
    NotBuilt { name: String, report: Report },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn components(a: &LieAlgebroid, s: &[crate::symexpr::ScalarExpr]) -> String {
    s.iter().map(|c| c.render(a.patch())).collect::<Vec<_>>().join(", ")
}

/// A standalone model declaring `a` under `name`, with one
/// `verify_algebroid` task. Brackets are written for `i < j`; the reverse
/// order is written only when it is not the negative.
pub fn algebroid_text(name: &str, a: &LieAlgebroid) -> String {
    let b = a.bundle();
    let mut out = String::new();
    writeln!(out, "patch {}", a.patch().names().join(" ")).unwrap();
    writeln!(out, "algebroid {name}").unwrap();
    writeln!(out, "  frame {}", b.frame().join(" ")).unwrap();
    for (i, row) in a.anchor_matrix().iter().enumerate() {
        if row.iter().any(|c| !c.is_zero()) {
            writeln!(out, "  anchor {}: {}", b.frame()[i], components(a, row)).unwrap();
        }
    }
    let bracket = |out: &mut String, i: usize, j: usize| {
        let s = a.structure_function(i, j);
        writeln!(
            out,
            "  bracket {} {}: {}",
            b.frame()[i],
            b.frame()[j],
            components(a, s.components())
        )
        .unwrap();
    };
    for i in 0..a.rank() {
        for j in i..a.rank() {
            let (s, t) = (a.structure_function(i, j), a.structure_function(j, i));
            if i == j {
                if !s.is_zero() {
                    bracket(&mut out, i, i);
                }
                continue;
            }
            if !s.is_zero() || !t.is_zero() {
                bracket(&mut out, i, j);
            }
            if *t != -s {
                bracket(&mut out, j, i);
            }
        }
    }
    writeln!(out, "end").unwrap();
    writeln!(out, "task verify_{name}: verify_algebroid {name}").unwrap();
    out
}

/// Build the named extension, insist that it verifies, and render it.
pub fn export_extension_text(model: &Model, name: &str) -> Result<String, ExportError> {
    let not_built = |report| ExportError::NotBuilt {
        name: name.to_string(),
        report,
    };
    let res = build_named_extension(model, name).map_err(not_built)?;
    let check = verify_algebroid(&res.a);
    if !res.report.passed() || !check.passed() {
        let mut r = res.report;
        r.extend(check);
        return Err(not_built(r));
    }
    Ok(algebroid_text(name, &res.a))
}

pub fn export_extension(model: &Model, name: &str, out: impl AsRef<Path>) -> Result<(), ExportError> {
    let text = export_extension_text(model, name)?;
    let out = out.as_ref();
    std::fs::write(out, text).map_err(|source| ExportError::Write {
        path: out.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::super::load_str;
    use super::*;
    use crate::extension::compare_structure;

    fn round_trip(src: &str, name: &str) -> (LieAlgebroid, LieAlgebroid) {
        let m = load_str(src).unwrap();
        let built = build_named_extension(&m, name).unwrap().a;
        let text = export_extension_text(&m, name).unwrap();
        let back = load_str(&text).unwrap();
        (built, back.algebroids[name].clone())
    }

    #[test]
    fn so3_round_trip() {
        let (a, b) = round_trip(include_str!("../../fixtures/so3_action.agd"), "A");
        assert_eq!(a.rank(), 6);
        assert_eq!(a, b);
        assert!(verify_algebroid(&b).passed());
    }

    #[test]
    fn rank_zero_export_is_the_tangent_declaration() {
        let src = "patch x1 x2\nalgebroid T tangent\nalgebroid E\n frame\nend\nadjustment adj\n E = E\n F = T\nend\nextension A = adj\n";
        let (a, b) = round_trip(src, "A");
        assert_eq!(a, b);
        let t = crate::algebroid::tangent_algebroid(&crate::symexpr::CoordinatePatch::standard(2));
        assert!(compare_structure(&b, &t).passed());
        let text = export_extension_text(&load_str(src).unwrap(), "A").unwrap();
        assert_eq!(
            text,
            "patch x1 x2\nalgebroid A\n  frame d_x1 d_x2\n  anchor d_x1: 1, 0\n  anchor d_x2: 0, 1\nend\ntask verify_A: verify_algebroid A\n"
        );
    }

    #[test]
    fn unbuilt_extension_is_an_error() {
        let src = include_str!("../../fixtures/so3_action.agd")
            .replace("morphism K: E -> T anchor", "morphism K: E -> T zero");
        let m = load_str(&src).unwrap();
        assert!(matches!(
            export_extension_text(&m, "A"),
            Err(ExportError::NotBuilt { .. })
        ));
    }
}
