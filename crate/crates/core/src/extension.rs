//! The extension algebroid `A = F ⊕ E` of a strict covariant adjustment and
//! the maps of its sandglass sequence.

use thiserror::Error;

use crate::adjustment::{nabla_zeta, strict_bla_bracket, AdjustmentData, AdjustmentError, Flags};
use crate::algebroid::{pair_label, triple_label, verify_algebroid, verify_morphism, FibrewiseBracket, LieAlgebroid};
use crate::connection::{ETwoFormOnF, FConnection};
use crate::geometry::{BundleMorphism, GeometryError, Section, VectorBundle};
use crate::report::{Check, CheckBuilder, Report, Residual, Status};
use crate::symexpr::ScalarExpr;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExtensionError {
    #[error("adjustment is not strict (flags: {0:?})")]
    NotStrict(Flags),
    #[error("the two forms of the extension bracket disagree:\n{0}")]
    CrossCheck(Report),
    #[error("coupling conditions fail:\n{0}")]
    Conditions(Report),
    #[error(transparent)]
    Adjustment(#[from] AdjustmentError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// The constructed algebroid with the six maps of the sandglass sequence,
/// all stored as matrices in the frame `F-frame ++ E-frame`.
#[derive(Clone, Debug)]
pub struct ExtensionResult {
    pub a: LieAlgebroid,
    /// `D(X, μ) = X + Kμ`, `A → F`.
    pub d: BundleMorphism,
    /// `ι(μ) = (−Kμ, μ)`, `E → A`.
    pub iota: BundleMorphism,
    /// `ι̂(μ) = (0, μ)`, `E → A`.
    pub iota_hat: BundleMorphism,
    /// `ψ(X, μ) = X`, `A → F`.
    pub psi: BundleMorphism,
    /// `χ(X) = (X, 0)`, `F → A`.
    pub chi: BundleMorphism,
    /// `χ̂(X, μ) = μ`, `A → E`.
    pub chi_hat: BundleMorphism,
    /// Bracket induced on `Graph(−K)` through `ι`.
    pub graph_bracket: FibrewiseBracket,
    /// The strict bracket `H` of the adjustment.
    pub h: FibrewiseBracket,
    pub source: AdjustmentData,
    pub report: Report,
}

/// Frame of `A`: F names then E names, suffixed `_F`/`_E` if they clash.
fn combined_bundle(f: &VectorBundle, e: &VectorBundle) -> VectorBundle {
    let clash = e.frame().iter().any(|n| f.frame().contains(n));
    let names: Vec<String> = if clash {
        f.frame()
            .iter()
            .map(|n| format!("{n}_F"))
            .chain(e.frame().iter().map(|n| format!("{n}_E")))
            .collect()
    } else {
        f.frame().iter().chain(e.frame()).cloned().collect()
    };
    VectorBundle::new(f.patch().clone(), names).expect("distinct after suffixing")
}

fn block(source: &VectorBundle, target: &VectorBundle, column: impl Fn(usize) -> Section) -> BundleMorphism {
    BundleMorphism::from_columns(source.clone(), target.clone(), (0..source.rank()).map(column).collect())
        .expect("block shapes agree")
}

/// Split a section of `A` into its F and E parts.
fn split(s: &Section, m: usize) -> (Section, Section) {
    (s.slice(0, m), s.slice(m, s.rank()))
}

/// `S = [μ,ν]_E + ∇_Xν − ∇_Yμ + ζ(X,Y)`, the E-component of the bracket.
fn e_component(d: &AdjustmentData, x: &Section, mu: &Section, y: &Section, nu: &Section) -> Section {
    d.e_alg().bracket_unchecked(mu, nu) + d.nabla().apply_unchecked(x, nu) - d.nabla().apply_unchecked(y, mu)
        + d.zeta().apply(x, y)
}

/// `[(X,μ),(Y,ν)]_A = ([X + Kμ, Y + Kν]_F − K(S), S)` for arbitrary sections.
pub fn extension_bracket(d: &AdjustmentData, p: &Section, q: &Section) -> Section {
    let m = d.f_alg().rank();
    let ((x, mu), (y, nu)) = (split(p, m), split(q, m));
    let s = e_component(d, &x, &mu, &y, &nu);
    let k = d.k();
    let xf = &x + &k.apply_unchecked(&mu);
    let yf = &y + &k.apply_unchecked(&nu);
    let first = d.f_alg().bracket_unchecked(&xf, &yf) - k.apply_unchecked(&s);
    first.concat(&s)
}

/// The second form: F-component `[X,Y]_F + ∇bas_μ Y − ∇bas_ν X − K(ζ(X,Y))`.
fn extension_bracket_basic(d: &AdjustmentData, on_f: &FConnection, p: &Section, q: &Section) -> Section {
    let m = d.f_alg().rank();
    let ((x, mu), (y, nu)) = (split(p, m), split(q, m));
    let s = e_component(d, &x, &mu, &y, &nu);
    let first = d.f_alg().bracket_unchecked(&x, &y) + on_f.apply_unchecked(&mu, &y)
        - on_f.apply_unchecked(&nu, &x)
        - d.k().apply_unchecked(&d.zeta().apply(&x, &y));
    first.concat(&s)
}

fn anchor_rows(f: &LieAlgebroid, e: &LieAlgebroid) -> Vec<Vec<ScalarExpr>> {
    f.anchor_matrix().iter().chain(e.anchor_matrix()).cloned().collect()
}

/// Build `A = F ⊕ E` from a strict covariant adjustment and verify it.
pub fn build_extension(d: &AdjustmentData) -> Result<ExtensionResult, ExtensionError> {
    if !d.is_strict() {
        return Err(ExtensionError::NotStrict(d.flags()));
    }
    let h = strict_bla_bracket(d)?;
    let pair = d.basic_pair()?;
    let ab = combined_bundle(d.f_alg().bundle(), d.e_alg().bundle());
    let n = ab.rank();
    let mut structure = vec![vec![Section::zero(n); n]; n];
    let mut cross = CheckBuilder::new("bracket forms agree", &ab);
    for i in 0..n {
        for j in 0..n {
            let (p, q) = (ab.basis(i), ab.basis(j));
            let s = extension_bracket(d, &p, &q);
            let alt = extension_bracket_basic(d, pair.on_f(), &p, &q);
            cross.record(|| pair_label(&ab, i, j), (&s - &alt).into_components());
            structure[i][j] = s;
        }
    }
    let cross = cross.finish();
    if !cross.passed() {
        return Err(ExtensionError::CrossCheck(Report::new("extension").with(cross)));
    }
    let a = LieAlgebroid::new(ab, anchor_rows(d.f_alg(), d.e_alg()), structure)?;
    Ok(assemble(d.clone(), a, h, Some(cross)))
}

fn assemble(d: AdjustmentData, a: LieAlgebroid, h: FibrewiseBracket, cross: Option<Check>) -> ExtensionResult {
    let (fb, eb, ab) = (
        d.f_alg().bundle().clone(),
        d.e_alg().bundle().clone(),
        a.bundle().clone(),
    );
    let m = fb.rank();
    let k = d.k().clone();
    let dmap = block(&ab, &fb, |i| if i < m { fb.basis(i) } else { k.column(i - m) });
    let iota = block(&eb, &ab, |a| (-k.column(a)).concat(&eb.basis(a)));
    let iota_hat = block(&eb, &ab, |a| fb.zero().concat(&eb.basis(a)));
    let psi = block(&ab, &fb, |i| if i < m { fb.basis(i) } else { fb.zero() });
    let chi = block(&fb, &ab, |i| fb.basis(i).concat(&eb.zero()));
    let chi_hat = block(&ab, &eb, |i| if i < m { eb.zero() } else { eb.basis(i - m) });
    let graph = {
        let r = eb.rank();
        let table = (0..r)
            .map(|x| {
                (0..r)
                    .map(|y| chi_hat.apply_unchecked(&a.bracket_unchecked(&iota.column(x), &iota.column(y))))
                    .collect()
            })
            .collect();
        FibrewiseBracket::new(eb.clone(), table).expect("rank r table")
    };
    let mut res = ExtensionResult {
        a,
        d: dmap,
        iota,
        iota_hat,
        psi,
        chi,
        chi_hat,
        graph_bracket: graph,
        h,
        source: d,
        report: Report::new("extension"),
    };
    let mut report = Report::new("extension");
    report.checks.extend(cross);
    report.extend(verify_algebroid(&res.a));
    let mut chk = CheckBuilder::new("graph bracket = H", &eb);
    for x in 0..eb.rank() {
        for y in (x + 1)..eb.rank() {
            let r = res.graph_bracket.structure_function(x, y) - res.h.structure_function(x, y);
            chk.record(|| pair_label(&eb, x, y), r.into_components());
        }
    }
    report.push(chk.finish());
    report.extend(verify_sandglass(&res));
    res.report = report;
    res
}

/// Free-function form of [`ExtensionResult::graph_bracket`].
pub fn graph_bracket(res: &ExtensionResult) -> &FibrewiseBracket {
    &res.graph_bracket
}

/// Collapse several checks into one named check, prefixing residual
/// locations with the sub-check names.
fn merge(name: &str, parts: Vec<Check>) -> Check {
    let mut residuals: Vec<Residual> = Vec::new();
    let mut evaluated = 0;
    for p in parts {
        evaluated += p.evaluated;
        residuals.extend(p.residuals.into_iter().map(|r| Residual {
            at: format!("{} {}", p.name, r.at),
            ..r
        }));
    }
    Check {
        name: name.into(),
        status: if residuals.is_empty() {
            Status::Pass
        } else {
            Status::Fail
        },
        residuals,
        note: None,
        evaluated,
    }
}

fn morphism_check(name: &str, k: &BundleMorphism, s: &LieAlgebroid, t: &LieAlgebroid) -> Check {
    let r = verify_morphism(k, s, t).expect("maps are built on the algebroids' bundles");
    merge(name, r.checks)
}

/// Matrix identity `lhs = rhs` checked column by column.
fn matrix_check(name: &str, lhs: &BundleMorphism, rhs: &BundleMorphism) -> Check {
    let mut chk = CheckBuilder::new(name, lhs.target());
    for c in 0..lhs.source().rank() {
        chk.record(
            || lhs.source().frame()[c].clone(),
            (lhs.column(c) - rhs.column(c)).into_components(),
        );
    }
    chk.finish()
}

fn compose(a: &BundleMorphism, b: &BundleMorphism) -> BundleMorphism {
    a.compose(b).expect("sandglass maps compose")
}

/// The nine sandglass checks.
pub fn verify_sandglass(res: &ExtensionResult) -> Report {
    let d = &res.source;
    let (e, f, a) = (d.e_alg(), d.f_alg(), &res.a);
    let (eb, fb, ab) = (e.bundle(), f.bundle(), a.bundle());
    let mut report = Report::new("sandglass");

    report.push(morphism_check("1: D is a morphism", &res.d, a, f));

    report.push(matrix_check(
        "2: D o iota = 0",
        &compose(&res.d, &res.iota),
        &BundleMorphism::zero(eb.clone(), fb.clone()),
    ));

    let mut chk = CheckBuilder::new("3: [iota mu, iota nu] = iota H", ab);
    for x in 0..eb.rank() {
        for y in (x + 1)..eb.rank() {
            let lhs = a.bracket_unchecked(&res.iota.column(x), &res.iota.column(y));
            let rhs = res.iota.apply_unchecked(res.h.structure_function(x, y));
            chk.record(|| pair_label(eb, x, y), (lhs - rhs).into_components());
        }
    }
    report.push(chk.finish());

    report.push(morphism_check("4: iota_hat is a morphism", &res.iota_hat, e, a));

    let split_sum = {
        let p = compose(&res.iota_hat, &res.chi_hat);
        let q = compose(&res.chi, &res.psi);
        let cols = (0..ab.rank()).map(|i| p.column(i) + q.column(i)).collect();
        BundleMorphism::from_columns(ab.clone(), ab.clone(), cols).expect("square")
    };
    report.push(merge(
        "5: splitting identities",
        vec![
            matrix_check(
                "id_A = iota_hat chi_hat + chi psi",
                &split_sum,
                &BundleMorphism::identity(ab.clone()),
            ),
            matrix_check(
                "chi_hat iota_hat = id_E",
                &compose(&res.chi_hat, &res.iota_hat),
                &BundleMorphism::identity(eb.clone()),
            ),
            matrix_check(
                "D chi = id_F",
                &compose(&res.d, &res.chi),
                &BundleMorphism::identity(fb.clone()),
            ),
        ],
    ));

    let mut curv = CheckBuilder::new("R_chi = iota zeta", ab);
    let mut dcurv = CheckBuilder::new("D o R_chi = 0", fb);
    for x in 0..fb.rank() {
        for y in (x + 1)..fb.rank() {
            let (cx, cy) = (res.chi.column(x), res.chi.column(y));
            let r_chi = a.bracket_unchecked(&cx, &cy) - res.chi.apply_unchecked(f.structure_function(x, y));
            let target = res.iota.apply_unchecked(d.zeta().component(x, y));
            curv.record(|| pair_label(fb, x, y), (&r_chi - &target).into_components());
            dcurv.record(|| pair_label(fb, x, y), res.d.apply_unchecked(&r_chi).into_components());
        }
    }
    report.push(merge("6: curvature of chi", vec![curv.finish(), dcurv.finish()]));

    report.push(psi_not_anchored(res));

    let pair = d.basic_pair().expect("strict data has a morphism K");
    let mut conn = CheckBuilder::new("nabla_X mu = chi_hat [chi X, iota_hat mu]", eb);
    let mut bas = CheckBuilder::new("nabla_bas_mu X = psi [iota_hat mu, chi X]", fb);
    for x in 0..fb.rank() {
        for mu in 0..eb.rank() {
            let (cx, im) = (res.chi.column(x), res.iota_hat.column(mu));
            let lhs = d.nabla().christoffel(x, mu).clone();
            let rhs = res.chi_hat.apply_unchecked(&a.bracket_unchecked(&cx, &im));
            let label = || format!("({}, {})", fb.frame()[x], eb.frame()[mu]);
            conn.record(label, (lhs - rhs).into_components());
            let lhs = pair.on_f().christoffel(mu, x).clone();
            let rhs = res.psi.apply_unchecked(&a.bracket_unchecked(&im, &cx));
            bas.record(label, (lhs - rhs).into_components());
        }
    }
    report.push(merge(
        "8: connections from the bracket",
        vec![conn.finish(), bas.finish()],
    ));

    report.push(flat_embedding(res));
    report
}

/// Negative check: `ρ_F ∘ ψ ≠ ρ_A` whenever `ρ_E ≠ 0`.
fn psi_not_anchored(res: &ExtensionResult) -> Check {
    const NAME: &str = "7: psi is not anchor-preserving";
    let e = res.source.e_alg();
    if e.anchor_is_zero() {
        return Check::skipped(NAME, "rho_E = 0, negative check skipped");
    }
    let f = res.source.f_alg();
    let ab = res.a.bundle();
    let tangent = VectorBundle::tangent(ab.patch().clone());
    for i in 0..ab.rank() {
        let diff = f.anchor_of(&res.psi.column(i)).sub(&res.a.anchor_field(i));
        if !diff.is_zero() {
            let witness = tangent.render_components(diff.components());
            return CheckBuilder::new(NAME, ab).finish().with_note(format!(
                "rho_F psi - rho_A at {} = {}",
                ab.frame()[i],
                witness
            ));
        }
    }
    Check {
        name: NAME.into(),
        status: Status::Fail,
        residuals: Vec::new(),
        note: Some("rho_F o psi = rho_A although rho_E != 0".into()),
        evaluated: ab.rank(),
    }
}

/// When `R_{∇ζ} = 0` and `ζ = 0`, `χ` is a morphism `F → A`.
fn flat_embedding(res: &ExtensionResult) -> Check {
    const NAME: &str = "9: flat splitting embeds F";
    let d = &res.source;
    let nz = nabla_zeta(d);
    let (fb, eb) = (d.f_alg().bundle(), d.e_alg().bundle());
    for x in 0..fb.rank() {
        for y in (x + 1)..fb.rank() {
            for mu in 0..eb.rank() {
                if !nz
                    .curvature_unchecked(&fb.basis(x), &fb.basis(y), &eb.basis(mu))
                    .is_zero()
                {
                    let at = format!("({}, {}, {})", fb.frame()[x], fb.frame()[y], eb.frame()[mu]);
                    return Check::skipped(
                        NAME,
                        format!("R_nabla_zeta != 0 (e.g. at {at}), check applies only when flat"),
                    );
                }
            }
        }
    }
    if !d.zeta().is_zero() {
        return Check::skipped(
            NAME,
            "R_nabla_zeta = 0 but zeta != 0: the embedding uses a local flat splitting, not constructed",
        );
    }
    morphism_check(NAME, &res.chi, d.f_alg(), &res.a)
}

/// Mackenzie's construction for a bundle of Lie algebras `E` coupled to F
/// by `(∇, ζ)`: `[(X,μ),(Y,ν)] = ([X,Y]_F, [μ,ν] + ∇_Xν − ∇_Yμ + ζ(X,Y))`,
/// subject to `∇[·,·] = 0`, `R_∇ = ad ∘ ζ` and `d^∇ζ = 0`.
pub fn mackenzie_extension(
    f_alg: &LieAlgebroid,
    e_bla: &FibrewiseBracket,
    nabla: &FConnection,
    zeta: &ETwoFormOnF,
) -> Result<ExtensionResult, ExtensionError> {
    let e_alg = LieAlgebroid::from_fibrewise(e_bla);
    let (fb, eb) = (f_alg.bundle(), e_alg.bundle());
    let br = |a: &Section, b: &Section| e_bla.apply(a, b);
    let mut conditions = Report::new("coupling conditions");
    let mut chk = CheckBuilder::new("nabla [.,.] = 0", eb);
    for x in 0..fb.rank() {
        for a in 0..eb.rank() {
            for b in (a + 1)..eb.rank() {
                let (xs, ea, e_b) = (fb.basis(x), eb.basis(a), eb.basis(b));
                let r = nabla.apply_unchecked(&xs, &br(&ea, &e_b))
                    - br(&nabla.apply_unchecked(&xs, &ea), &e_b)
                    - br(&ea, &nabla.apply_unchecked(&xs, &e_b));
                chk.record(
                    || format!("({}; {}, {})", fb.frame()[x], eb.frame()[a], eb.frame()[b]),
                    r.into_components(),
                );
            }
        }
    }
    conditions.push(chk.finish());
    let mut chk = CheckBuilder::new("R = ad o zeta", eb);
    for x in 0..fb.rank() {
        for y in (x + 1)..fb.rank() {
            for c in 0..eb.rank() {
                let (xs, ys, ec) = (fb.basis(x), fb.basis(y), eb.basis(c));
                let r = nabla.curvature_unchecked(&xs, &ys, &ec) - br(&zeta.apply(&xs, &ys), &ec);
                chk.record(
                    || format!("({}, {}, {})", fb.frame()[x], fb.frame()[y], eb.frame()[c]),
                    r.into_components(),
                );
            }
        }
    }
    conditions.push(chk.finish());
    let mut chk = CheckBuilder::new("d zeta = 0", eb);
    for x in 0..fb.rank() {
        for y in (x + 1)..fb.rank() {
            for z in (y + 1)..fb.rank() {
                let r = crate::connection::dzeta_zeta(nabla, zeta, &fb.basis(x), &fb.basis(y), &fb.basis(z));
                chk.record(|| triple_label(fb, x, y, z), r.into_components());
            }
        }
    }
    conditions.push(chk.finish());
    if !conditions.passed() {
        return Err(ExtensionError::Conditions(conditions));
    }

    let ab = combined_bundle(fb, eb);
    let m = fb.rank();
    let n = ab.rank();
    let mut structure = vec![vec![Section::zero(n); n]; n];
    for i in 0..n {
        for j in 0..n {
            let ((x, mu), (y, nu)) = (split(&ab.basis(i), m), split(&ab.basis(j), m));
            let first = f_alg.bracket_unchecked(&x, &y);
            let second =
                br(&mu, &nu) + nabla.apply_unchecked(&x, &nu) - nabla.apply_unchecked(&y, &mu) + zeta.apply(&x, &y);
            structure[i][j] = first.concat(&second);
        }
    }
    let a = LieAlgebroid::new(ab, anchor_rows(f_alg, &e_alg), structure)?;
    let k = BundleMorphism::zero(eb.clone(), fb.clone());
    let d = AdjustmentData::new(e_alg, f_alg.clone(), k, nabla.clone(), zeta.clone())?;
    let classified = d.classify()?;
    if !classified.data.is_strict() {
        return Err(ExtensionError::Conditions(classified.report));
    }
    let mut res = assemble(classified.data, a, e_bla.clone(), None);
    res.report.subject = "mackenzie extension".into();
    Ok(res)
}

/// Structure-function differences between two algebroids on the same frame.
pub fn compare_structure(a: &LieAlgebroid, b: &LieAlgebroid) -> Check {
    let ab = a.bundle();
    if a.rank() != b.rank() || a.patch() != b.patch() {
        return Check {
            name: "structure functions agree".into(),
            status: Status::Fail,
            residuals: Vec::new(),
            note: Some(format!("ranks {} and {} or patches differ", a.rank(), b.rank())),
            evaluated: 0,
        };
    }
    let mut chk = CheckBuilder::new("structure functions agree", ab);
    for i in 0..a.rank() {
        for j in 0..a.rank() {
            let r = a.structure_function(i, j) - b.structure_function(i, j);
            chk.record(|| pair_label(ab, i, j), r.into_components());
        }
    }
    let tangent = VectorBundle::tangent(ab.patch().clone());
    let mut anc = CheckBuilder::new("anchors agree", &tangent);
    for i in 0..a.rank() {
        anc.record(
            || ab.frame()[i].clone(),
            a.anchor_field(i).sub(&b.anchor_field(i)).components().to_vec(),
        );
    }
    merge("structure functions agree", vec![chk.finish(), anc.finish()])
}
