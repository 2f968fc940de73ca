use agd::algebroid::LieAlgebroid;
use agd::connection::basic_connection;
use agd::extension::{build_extension, extension_bracket};
use agd::fixtures::{mackenzie, so3_action};
use agd::geometry::{apply_vf, vf_bracket, VectorBundle};
use agd::symexpr::{parse_expr, CoordinatePatch, ScalarExpr};
use agd::testing::Gen;
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(100))]

    #[test]
    fn ring_laws(seed in any::<u64>()) {
        let mut g = Gen::new(seed, 3);
        let (a, b, c) = (g.fraction(), g.fraction(), g.fraction());
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a.clone()).is_zero());
        prop_assert_eq!(&a * &ScalarExpr::one(), a.clone());
        if !a.is_zero() {
            prop_assert!((&a * &ScalarExpr::one().checked_div(&a).unwrap()).is_one());
        }
    }

    #[test]
    fn partials_commute(seed in any::<u64>(), i in 0usize..3, j in 0usize..3) {
        let f = Gen::new(seed, 3).fraction();
        prop_assert_eq!(f.partial(i).partial(j), f.partial(j).partial(i));
    }

    #[test]
    fn partial_is_a_derivation(seed in any::<u64>(), i in 0usize..3) {
        let mut g = Gen::new(seed, 3);
        let (f, h) = (g.fraction(), g.fraction());
        prop_assert_eq!((&f * &h).partial(i), &(&f.partial(i) * &h) + &(&f * &h.partial(i)));
    }

    #[test]
    fn parse_print_round_trip(seed in any::<u64>()) {
        let patch = CoordinatePatch::standard(3);
        let f = Gen::new(seed, 3).fraction();
        prop_assert_eq!(parse_expr(&f.render(&patch), &patch).unwrap(), f);
    }

    /// `[μ, fν] = f[μ, ν] + ρ(μ)(f) ν` for an arbitrary anchored bracket.
    #[test]
    fn bracket_leibniz(seed in any::<u64>()) {
        let patch = CoordinatePatch::standard(3);
        let mut g = Gen::new(seed, 3);
        let a: LieAlgebroid = g.algebroid(VectorBundle::with_rank(patch.clone(), "e", 3));
        let (mu, nu, f) = (g.section(3), g.section(3), g.expr());
        let lhs = a.bracket(&mu, &nu.scale(&f)).unwrap();
        let rho_f = apply_vf(&a.anchor_of(&mu), &f, &patch).unwrap();
        let rhs = a.bracket(&mu, &nu).unwrap().scale(&f) + nu.scale(&rho_f);
        prop_assert!((lhs - rhs).is_zero());
    }

    /// The basic curvature is a tensor in each of its three arguments.
    #[test]
    fn basic_curvature_is_tensorial(seed in any::<u64>(), slot in 0usize..3, which in 0usize..2) {
        let d = if which == 0 { so3_action() } else { mackenzie() };
        let n = d.f_alg().patch().dimension();
        let pair = basic_connection(d.nabla(), d.k(), d.e_alg()).unwrap();
        let mut g = Gen::new(seed, n);
        let (mu, nu, x) = (g.section(d.e_alg().rank()), g.section(d.e_alg().rank()), g.section(n));
        let f = g.expr();
        let base = pair.basic_curvature(&mu, &nu, &x);
        let scaled = match slot {
            0 => pair.basic_curvature(&mu.scale(&f), &nu, &x),
            1 => pair.basic_curvature(&mu, &nu.scale(&f), &x),
            _ => pair.basic_curvature(&mu, &nu, &x.scale(&f)),
        };
        prop_assert!((scaled - base.scale(&f)).is_zero());
    }

    #[test]
    fn vector_field_jacobi(seed in any::<u64>()) {
        let mut g = Gen::new(seed, 3);
        let (x, y, z) = (g.field(), g.field(), g.field());
        let br = |a: &_, b: &_| vf_bracket(a, b).unwrap();
        let j = br(&x, &br(&y, &z)).add(&br(&y, &br(&z, &x))).add(&br(&z, &br(&x, &y)));
        prop_assert!(j.is_zero());
    }
}

proptest! {
    #![proptest_config(config(30))]

    /// Jacobi on arbitrary (non-frame) sections of the so(3) action algebroid.
    #[test]
    fn action_algebroid_jacobi_on_sections(seed in any::<u64>()) {
        let d = so3_action();
        let mut g = Gen::new(seed, 3);
        let (a, b, c) = (g.section(3), g.section(3), g.section(3));
        prop_assert!(d.e_alg().jacobiator(&a, &b, &c).is_zero());
    }

    /// The extension bracket of the so(3) fixture on arbitrary sections agrees
    /// with the bracket of the built algebroid and is antisymmetric.
    #[test]
    fn extension_bracket_on_sections(seed in any::<u64>()) {
        let d = so3_action().classify().unwrap().data;
        let a = build_extension(&d).unwrap().a;
        let mut g = Gen::new(seed, 3);
        let (p, q) = (g.section(6), g.section(6));
        let direct = extension_bracket(&d, &p, &q);
        prop_assert_eq!(&direct, &a.bracket(&p, &q).unwrap());
        prop_assert!((direct + extension_bracket(&d, &q, &p)).is_zero());
    }
}
