//! Ready-made adjustment data used by the examples and tests.

use num_rational::BigRational;

use crate::adjustment::AdjustmentData;
use crate::algebroid::{action_algebroid, tangent_algebroid, FibrewiseBracket, LieAlgebroid};
use crate::connection::{ETwoFormOnF, FConnection};
use crate::geometry::{BundleMorphism, Section, VectorBundle, VectorField};
use crate::symexpr::{CoordinatePatch, ScalarExpr};

/// Structure constants of so(3): `[e1,e2] = e3`, `[e2,e3] = e1`, `[e3,e1] = e2`.
pub fn so3_constants() -> Vec<Vec<Vec<BigRational>>> {
    let q = |n: i64| BigRational::from_integer(n.into());
    let mut c = vec![vec![vec![q(0); 3]; 3]; 3];
    for (a, b, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        c[a][b][k] = q(1);
        c[b][a][k] = q(-1);
    }
    c
}

/// Rotation fields on the first three coordinates of an `n ≥ 3` patch,
/// `ρ(e_a) = ε_{abc} x_c ∂_b`, which realize `so(3)` with the constants above.
pub fn rotation_fields(n: usize) -> Vec<VectorField> {
    let x = ScalarExpr::var;
    let field = |entries: [(usize, ScalarExpr); 2]| {
        let mut c = vec![ScalarExpr::zero(); n];
        for (i, v) in entries {
            c[i] = v;
        }
        VectorField::from_components(c)
    };
    vec![
        field([(1, x(2)), (2, -x(1))]),
        field([(0, -x(2)), (2, x(0))]),
        field([(0, x(1)), (1, -x(0))]),
    ]
}

fn so3_bundle(patch: &CoordinatePatch) -> VectorBundle {
    VectorBundle::with_rank(patch.clone(), "e", 3)
}

/// The so(3) action algebroid on ℝ³ by rotations.
pub fn so3_action_algebroid() -> LieAlgebroid {
    let patch = CoordinatePatch::standard(3);
    action_algebroid(so3_bundle(&patch), &so3_constants(), rotation_fields(3)).expect("so(3) acts by rotations")
}

/// The so(3) Lie algebra bundle over `patch` (zero anchor).
pub fn so3_lab(patch: &CoordinatePatch) -> LieAlgebroid {
    let h = FibrewiseBracket::constant(so3_bundle(patch), &so3_constants()).expect("3x3x3 constants");
    LieAlgebroid::from_fibrewise(&h)
}

/// E = so(3) action algebroid on ℝ³, F = Tℝ³, K = ρ, flat ∇, ζ = 0.
pub fn so3_action() -> AdjustmentData {
    let e = so3_action_algebroid();
    let f = tangent_algebroid(e.patch());
    let k = BundleMorphism::from_columns(
        e.bundle().clone(),
        f.bundle().clone(),
        rotation_fields(3).iter().map(VectorField::as_section).collect(),
    )
    .expect("rank 3 into rank 3");
    let nabla = FConnection::flat(f.clone(), e.bundle().clone());
    let zeta = ETwoFormOnF::zero(f.bundle().clone(), e.bundle().clone());
    AdjustmentData::new(e, f, k, nabla, zeta).expect("so(3) fixture is well formed")
}

/// The Mackenzie coupling on ℝ²: E = so(3) LAB, F = Tℝ², K = 0,
/// `∇ = d + ad(x1 dx2 ⊗ e1)` and `ζ = dx1∧dx2 ⊗ e1`.
pub fn mackenzie() -> AdjustmentData {
    let patch = CoordinatePatch::standard(2);
    let e = so3_lab(&patch);
    let f = tangent_algebroid(&patch);
    let eb = e.bundle().clone();
    let x1 = ScalarExpr::var(0);
    let mut nabla = FConnection::flat(f.clone(), eb.clone());
    for a in 0..3 {
        let ad = e.structure_function(0, a).scale(&x1);
        nabla.set_christoffel(1, a, ad);
    }
    let mut zeta = ETwoFormOnF::zero(f.bundle().clone(), eb.clone());
    zeta.set(0, 1, eb.basis(0));
    let k = BundleMorphism::zero(eb, f.bundle().clone());
    AdjustmentData::new(e, f, k, nabla, zeta).expect("Mackenzie fixture is well formed")
}

/// E = F = so(3) action algebroid, K = id, flat ∇ and `ζ(e_a, e_b) = −[e_a, e_b]`,
/// a strict adjustment whose bracket H vanishes.
pub fn abelian_zeta() -> AdjustmentData {
    let e = so3_action_algebroid();
    let eb = e.bundle().clone();
    let mut zeta = ETwoFormOnF::zero(eb.clone(), eb.clone());
    for a in 0..3 {
        for b in (a + 1)..3 {
            zeta.set(a, b, -e.structure_function(a, b));
        }
    }
    let nabla = FConnection::flat(e.clone(), eb.clone());
    AdjustmentData::new(e.clone(), e, BundleMorphism::identity(eb), nabla, zeta).expect("well formed")
}

/// E of rank 0 over ℝ², F = Tℝ².
pub fn trivial() -> AdjustmentData {
    let patch = CoordinatePatch::standard(2);
    let f = tangent_algebroid(&patch);
    let e = LieAlgebroid::abelian(VectorBundle::with_rank(patch, "e", 0));
    let nabla = FConnection::flat(f.clone(), e.bundle().clone());
    let zeta = ETwoFormOnF::zero(f.bundle().clone(), e.bundle().clone());
    let k = BundleMorphism::zero(e.bundle().clone(), f.bundle().clone());
    AdjustmentData::new(e, f, k, nabla, zeta).expect("well formed")
}

/// Abelian rank-1 E over ℝ³, F = Tℝ³, K = 0, flat ∇ and the closed form
/// `ζ = x1 dx2∧dx3 + x2 dx1∧dx3`. With `flip` the second term changes sign
/// and `dζ = 2 dx1∧dx2∧dx3`.
pub fn closed_line_form(flip: bool) -> AdjustmentData {
    let patch = CoordinatePatch::standard(3);
    let f = tangent_algebroid(&patch);
    let e = LieAlgebroid::abelian(VectorBundle::new(patch, ["e"]).expect("valid name"));
    let one = |s: ScalarExpr| Section::new(vec![s]);
    let mut zeta = ETwoFormOnF::zero(f.bundle().clone(), e.bundle().clone());
    zeta.set(1, 2, one(ScalarExpr::var(0)));
    let x2 = ScalarExpr::var(1);
    zeta.set(0, 2, one(if flip { -x2 } else { x2 }));
    let nabla = FConnection::flat(f.clone(), e.bundle().clone());
    let k = BundleMorphism::zero(e.bundle().clone(), f.bundle().clone());
    AdjustmentData::new(e, f, k, nabla, zeta).expect("well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adjustment::{
        check_basic_flatness_of_h, check_cartan, check_covariant_adjustment, check_mym, check_strict, nabla_zeta,
        strict_bla_bracket, verify_decomposition, Flag,
    };
    use crate::algebroid::verify_algebroid;
    use crate::connection::verify_basic_identities;

    fn strict(d: &AdjustmentData) -> AdjustmentData {
        let c = d.classify().unwrap();
        assert!(c.report.passed(), "{}", c.report);
        assert!(c.data.is_strict());
        c.data
    }

    #[test]
    fn all_fixtures_are_strict() {
        for d in [
            so3_action(),
            mackenzie(),
            abelian_zeta(),
            trivial(),
            closed_line_form(false),
        ] {
            assert!(verify_algebroid(d.e_alg()).passed());
            let d = strict(&d);
            let h = strict_bla_bracket(&d).unwrap();
            assert!(verify_decomposition(&d, &h).passed());
            assert!(check_mym(&nabla_zeta(&d), &h, d.zeta(), Some(d.k())).passed());
            assert!(check_basic_flatness_of_h(&d, &h).unwrap().passed());
            let r = verify_basic_identities(&d.basic_pair().unwrap());
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn h_values() {
        let d = strict(&so3_action());
        assert_eq!(strict_bla_bracket(&d).unwrap(), d.e_alg().fibrewise());
        let d = strict(&abelian_zeta());
        let h = strict_bla_bracket(&d).unwrap();
        assert!(h.structure().iter().flatten().all(Section::is_zero));
    }

    #[test]
    fn closed_form_flip_fails_strictness_only() {
        let d = closed_line_form(true);
        let d = check_cartan(&d).unwrap().data;
        let d = check_covariant_adjustment(&d).unwrap().data;
        assert_eq!(d.flags().covariant, Flag::Pass);
        let c = check_strict(&d).unwrap();
        assert_eq!(c.data.flags().strict, Flag::Fail);
        assert_eq!(c.report.checks[0].residuals[0].value, "2*e");
    }
}
