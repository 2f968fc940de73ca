//! Adjustment data `(∇, ζ, K)`: the Cartan, covariant and strict
//! conditions, the strict bundle-of-Lie-algebras bracket `H`, the
//! multiplicative Yang-Mills equations, and changes of splitting.

use std::fmt;

use thiserror::Error;

use crate::algebroid::{
    pair_label, triple_label, verify_fibrewise_bracket, verify_morphism, FibrewiseBracket, LieAlgebroid,
};
use crate::connection::{basic_connection, dzeta_zeta, BasicConnectionPair, ConnectionError, ETwoFormOnF, FConnection};
use crate::geometry::{BundleMorphism, GeometryError, Section};
use crate::report::{CheckBuilder, Report};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdjustmentError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Connection(#[from] ConnectionError),
    #[error("{check} refuses to run: {needs} has not passed")]
    Precondition { check: &'static str, needs: &'static str },
    #[error("the two formulas for H disagree:\n{0}")]
    CrossCheck(Report),
    #[error("extracted H is not a field of Lie brackets:\n{0}")]
    NotLie(Report),
    #[error("hypotheses not met:\n{0}")]
    Hypotheses(Report),
    #[error("changes of splitting are only supported for K = 0")]
    NonzeroK,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Flag {
    #[default]
    Unchecked,
    Pass,
    Fail,
}

impl Flag {
    fn from_report(r: &Report) -> Flag {
        if r.passed() {
            Flag::Pass
        } else {
            Flag::Fail
        }
    }
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flag::Unchecked => "unchecked",
            Flag::Pass => "pass",
            Flag::Fail => "fail",
        })
    }
}

/// Ordered classification flags: strict ⇒ covariant ⇒ Cartan ⇒ morphism.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Flags {
    pub morphism: Flag,
    pub cartan: Flag,
    pub covariant: Flag,
    pub strict: Flag,
}

/// A triple `(∇, ζ, K)` for algebroids `E`, `F` and `K: E → F`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdjustmentData {
    e_alg: LieAlgebroid,
    f_alg: LieAlgebroid,
    k: BundleMorphism,
    nabla: FConnection,
    zeta: ETwoFormOnF,
    flags: Flags,
    morphism_report: Report,
}

/// A check's report together with the data carrying the updated flag.
#[derive(Clone, Debug)]
pub struct Classified {
    pub report: Report,
    pub data: AdjustmentData,
}

impl AdjustmentData {
    /// Assemble the data and verify that `K` is a morphism; the other flags
    /// start unchecked.
    pub fn new(
        e_alg: LieAlgebroid,
        f_alg: LieAlgebroid,
        k: BundleMorphism,
        nabla: FConnection,
        zeta: ETwoFormOnF,
    ) -> Result<Self, AdjustmentError> {
        let mismatch = |m: &str| {
            AdjustmentError::Connection(ConnectionError::Algebroid(
                crate::algebroid::AlgebroidError::BundleMismatch(m.into()),
            ))
        };
        if nabla.algebroid() != &f_alg || nabla.bundle() != e_alg.bundle() {
            return Err(mismatch("connection must be an F-connection on E"));
        }
        if zeta.f_bundle() != f_alg.bundle() || zeta.e_bundle() != e_alg.bundle() {
            return Err(mismatch("ζ must be an E-valued 2-form on F"));
        }
        let morphism_report = verify_morphism(&k, &e_alg, &f_alg).map_err(ConnectionError::from)?;
        let flags = Flags {
            morphism: Flag::from_report(&morphism_report),
            ..Flags::default()
        };
        Ok(AdjustmentData {
            e_alg,
            f_alg,
            k,
            nabla,
            zeta,
            flags,
            morphism_report,
        })
    }

    pub fn e_alg(&self) -> &LieAlgebroid {
        &self.e_alg
    }

    pub fn f_alg(&self) -> &LieAlgebroid {
        &self.f_alg
    }

    pub fn k(&self) -> &BundleMorphism {
        &self.k
    }

    pub fn nabla(&self) -> &FConnection {
        &self.nabla
    }

    pub fn zeta(&self) -> &ETwoFormOnF {
        &self.zeta
    }

    pub fn flags(&self) -> Flags {
        self.flags
    }

    pub fn morphism_report(&self) -> &Report {
        &self.morphism_report
    }

    /// All three classification flags passed.
    pub fn is_strict(&self) -> bool {
        self.flags.strict == Flag::Pass
    }

    pub fn basic_pair(&self) -> Result<BasicConnectionPair, AdjustmentError> {
        require(self.flags.morphism, "basic connection", "K morphism check")?;
        Ok(basic_connection(&self.nabla, &self.k, &self.e_alg)?)
    }

    /// Run the Cartan, covariant and strict checks in order, stopping at the
    /// first failure. The returned data carries every flag that was set.
    pub fn classify(&self) -> Result<Classified, AdjustmentError> {
        let mut report = Report::new("adjustment classification");
        report.extend(self.morphism_report.clone());
        let mut data = self.clone();
        if data.flags.morphism != Flag::Pass {
            return Ok(Classified { report, data });
        }
        for step in [check_cartan, check_covariant_adjustment, check_strict] {
            let c = step(&data)?;
            report.extend(c.report);
            data = c.data;
            if !report.passed() {
                break;
            }
        }
        Ok(Classified { report, data })
    }

    fn with_flag(&self, set: impl FnOnce(&mut Flags)) -> AdjustmentData {
        let mut d = self.clone();
        set(&mut d.flags);
        d
    }
}

fn require(flag: Flag, check: &'static str, needs: &'static str) -> Result<(), AdjustmentError> {
    if flag == Flag::Pass {
        Ok(())
    } else {
        Err(AdjustmentError::Precondition { check, needs })
    }
}

/// `R∇bas = 0` on all frame triples.
pub fn check_cartan(d: &AdjustmentData) -> Result<Classified, AdjustmentError> {
    require(d.flags.morphism, "check_cartan", "K morphism check")?;
    let pair = d.basic_pair()?;
    let eb = d.e_alg.bundle();
    let fb = d.f_alg.bundle();
    let mut chk = CheckBuilder::new("cartan", eb);
    for a in 0..eb.rank() {
        for b in (a + 1)..eb.rank() {
            for alpha in 0..fb.rank() {
                let r = pair.basic_curvature(&eb.basis(a), &eb.basis(b), &fb.basis(alpha));
                chk.record(
                    || format!("({}, {}, {})", eb.frame()[a], eb.frame()[b], fb.frame()[alpha]),
                    r.into_components(),
                );
            }
        }
    }
    let report = Report::new("cartan").with(chk.finish());
    let flag = Flag::from_report(&report);
    Ok(Classified {
        data: d.with_flag(|f| f.cartan = flag),
        report,
    })
}

/// `R∇(X,Y)ν + d^{∇bas}ζ(X,Y,ν) = 0` on all frame triples. For `K = 0`
/// the reduced form `R∇(X,Y)ν = [ζ(X,Y), ν]_E` is checked as well.
pub fn check_covariant_adjustment(d: &AdjustmentData) -> Result<Classified, AdjustmentError> {
    require(d.flags.cartan, "check_covariant_adjustment", "check_cartan")?;
    let pair = d.basic_pair()?;
    let eb = d.e_alg.bundle();
    let fb = d.f_alg.bundle();
    let label = |a: usize, b: usize, c: usize| format!("({}, {}, {})", fb.frame()[a], fb.frame()[b], eb.frame()[c]);
    let mut report = Report::new("covariant adjustment");
    let mut chk = CheckBuilder::new("covariant adjustment", eb);
    for alpha in 0..fb.rank() {
        for beta in (alpha + 1)..fb.rank() {
            for c in 0..eb.rank() {
                let (x, y, nu) = (fb.basis(alpha), fb.basis(beta), eb.basis(c));
                let r = d.nabla.curvature_unchecked(&x, &y, &nu) + pair.dbas_zeta(&d.zeta, &x, &y, &nu);
                chk.record(|| label(alpha, beta, c), r.into_components());
            }
        }
    }
    report.push(chk.finish());
    if d.k.is_zero() {
        let mut chk = CheckBuilder::new("curvature = ad o zeta", eb);
        for alpha in 0..fb.rank() {
            for beta in (alpha + 1)..fb.rank() {
                for c in 0..eb.rank() {
                    let (x, y, nu) = (fb.basis(alpha), fb.basis(beta), eb.basis(c));
                    let r = d.nabla.curvature_unchecked(&x, &y, &nu)
                        - d.e_alg.bracket_unchecked(&d.zeta.apply(&x, &y), &nu);
                    chk.record(|| label(alpha, beta, c), r.into_components());
                }
            }
        }
        report.push(
            chk.finish()
                .with_note("K = 0: fibre-wise adjoint representation of the BLA E"),
        );
    }
    let flag = Flag::from_report(&report);
    Ok(Classified {
        data: d.with_flag(|f| f.covariant = flag),
        report,
    })
}

/// `d^{∇ζ}ζ = 0` on all frame triples of F.
pub fn check_strict(d: &AdjustmentData) -> Result<Classified, AdjustmentError> {
    require(d.flags.covariant, "check_strict", "check_covariant_adjustment")?;
    let nz = nabla_zeta(d);
    let fb = d.f_alg.bundle();
    let mut chk = CheckBuilder::new("strict", d.e_alg.bundle());
    for a in 0..fb.rank() {
        for b in (a + 1)..fb.rank() {
            for c in (b + 1)..fb.rank() {
                let r = dzeta_zeta(&nz, &d.zeta, &fb.basis(a), &fb.basis(b), &fb.basis(c));
                chk.record(|| triple_label(fb, a, b, c), r.into_components());
            }
        }
    }
    let mut check = chk.finish();
    if fb.rank() < 3 {
        check = check.with_note("rank F < 3: vacuous");
    }
    let report = Report::new("strict").with(check);
    let flag = Flag::from_report(&report);
    Ok(Classified {
        data: d.with_flag(|f| f.strict = flag),
        report,
    })
}

/// `∇ζ_X ν = ∇_X ν − ζ(X, Kν)`.
pub fn nabla_zeta(d: &AdjustmentData) -> FConnection {
    let fb = d.f_alg.bundle();
    FConnection::from_rule(d.f_alg.clone(), d.e_alg.bundle().clone(), |alpha, a| {
        d.nabla.christoffel(alpha, a) - &d.zeta.apply(&fb.basis(alpha), &d.k.column(a))
    })
}

/// `H = t_bas(μ,ν) + ζ(Kμ, Kν)`, cross-checked against
/// `−t_K(μ,ν) + ζ(Kμ, Kν)` and verified to be a field of Lie brackets. The
/// report holds both verifications; an error is returned only when the
/// strict flag has not passed.
pub fn extract_h(d: &AdjustmentData) -> Result<(FibrewiseBracket, Report), AdjustmentError> {
    require(d.flags.strict, "strict_bla_bracket", "check_strict")?;
    let pair = d.basic_pair()?;
    let eb = d.e_alg.bundle();
    let r = eb.rank();
    let mut table = vec![vec![Section::zero(r); r]; r];
    let mut cross = CheckBuilder::new("H cross-check", eb);
    for a in 0..r {
        for b in 0..r {
            let (ea, e_b) = (eb.basis(a), eb.basis(b));
            let zk = d.zeta.apply(&d.k.column(a), &d.k.column(b));
            let h = pair.torsion_basic(&ea, &e_b) + &zk;
            let alt = zk - pair.torsion_k(&ea, &e_b);
            cross.record(|| pair_label(eb, a, b), (&h - &alt).into_components());
            table[a][b] = h;
        }
    }
    let h = FibrewiseBracket::new(eb.clone(), table)?;
    let mut report = Report::new("strict BLA bracket").with(cross.finish());
    report.extend(verify_fibrewise_bracket(&h));
    Ok((h, report))
}

/// The strict bracket `H`, failing if the cross-check or the Lie axioms fail.
pub fn strict_bla_bracket(d: &AdjustmentData) -> Result<FibrewiseBracket, AdjustmentError> {
    let (h, report) = extract_h(d)?;
    if report.check("H cross-check").is_some_and(|c| !c.passed()) {
        return Err(AdjustmentError::CrossCheck(report));
    }
    if !report.passed() {
        return Err(AdjustmentError::NotLie(report));
    }
    Ok(h)
}

/// `[μ,ν]_E = H(μ,ν) + ∇ζ_{Kμ}ν − ∇ζ_{Kν}μ + ζ(Kμ,Kν)` on frame pairs.
pub fn verify_decomposition(d: &AdjustmentData, h: &FibrewiseBracket) -> Report {
    let nz = nabla_zeta(d);
    let eb = d.e_alg.bundle();
    let mut chk = CheckBuilder::new("decomposition", eb);
    for a in 0..eb.rank() {
        for b in (a + 1)..eb.rank() {
            let (ea, e_b) = (eb.basis(a), eb.basis(b));
            let (ka, kb) = (d.k.column(a), d.k.column(b));
            let rhs = h.apply(&ea, &e_b) + nz.apply_unchecked(&ka, &e_b) - nz.apply_unchecked(&kb, &ea)
                + d.zeta.apply(&ka, &kb);
            let r = d.e_alg.bracket_unchecked(&ea, &e_b) - rhs;
            chk.record(|| pair_label(eb, a, b), r.into_components());
        }
    }
    Report::new("decomposition").with(chk.finish())
}

/// The strict multiplicative Yang-Mills equations for `(∇ζ, H, ζ)`:
/// `∇ζH = 0`, `R_{∇ζ} = ad_H ∘ ζ` and `d^{∇ζ}ζ = 0`, on all frames of F.
/// When `k` is given, the subset along `image(K)` is tallied in the notes.
pub fn check_mym(nz: &FConnection, h: &FibrewiseBracket, zeta: &ETwoFormOnF, k: Option<&BundleMorphism>) -> Report {
    let f = nz.algebroid();
    let fb = f.bundle();
    let eb = h.bundle();
    let mut report = Report::new("multiplicative Yang-Mills");

    let cov_h = |x: &Section, mu: &Section, nu: &Section| {
        nz.apply_unchecked(x, &h.apply(mu, nu))
            - h.apply(&nz.apply_unchecked(x, mu), nu)
            - h.apply(mu, &nz.apply_unchecked(x, nu))
    };
    let curv =
        |x: &Section, y: &Section, nu: &Section| nz.curvature_unchecked(x, y, nu) - h.apply(&zeta.apply(x, y), nu);

    let mut chk = CheckBuilder::new("nabla_zeta H = 0", eb);
    for alpha in 0..fb.rank() {
        for a in 0..eb.rank() {
            for b in (a + 1)..eb.rank() {
                let r = cov_h(&fb.basis(alpha), &eb.basis(a), &eb.basis(b));
                chk.record(
                    || format!("({}; {}, {})", fb.frame()[alpha], eb.frame()[a], eb.frame()[b]),
                    r.into_components(),
                );
            }
        }
    }
    let mut c1 = chk.finish();

    let mut chk = CheckBuilder::new("R_nabla_zeta = ad_H o zeta", eb);
    for alpha in 0..fb.rank() {
        for beta in (alpha + 1)..fb.rank() {
            for c in 0..eb.rank() {
                let r = curv(&fb.basis(alpha), &fb.basis(beta), &eb.basis(c));
                chk.record(
                    || format!("({}, {}, {})", fb.frame()[alpha], fb.frame()[beta], eb.frame()[c]),
                    r.into_components(),
                );
            }
        }
    }
    let mut c2 = chk.finish();

    if let Some(k) = k {
        let r = k.source().rank();
        let (mut n1, mut bad1) = (0, 0);
        let (mut n2, mut bad2) = (0, 0);
        for c in 0..r {
            let x = k.column(c);
            for a in 0..eb.rank() {
                for b in (a + 1)..eb.rank() {
                    n1 += 1;
                    bad1 += usize::from(!cov_h(&x, &eb.basis(a), &eb.basis(b)).is_zero());
                }
            }
            for dd in (c + 1)..r {
                let y = k.column(dd);
                for s in 0..eb.rank() {
                    n2 += 1;
                    bad2 += usize::from(!curv(&x, &y, &eb.basis(s)).is_zero());
                }
            }
        }
        c1 = c1.with_note(format!("along image(K): {bad1} of {n1} nonzero"));
        c2 = c2.with_note(format!("along image(K): {bad2} of {n2} nonzero"));
    }
    report.push(c1);
    report.push(c2);

    let mut chk = CheckBuilder::new("d_nabla_zeta zeta = 0", eb);
    for a in 0..fb.rank() {
        for b in (a + 1)..fb.rank() {
            for c in (b + 1)..fb.rank() {
                let r = dzeta_zeta(nz, zeta, &fb.basis(a), &fb.basis(b), &fb.basis(c));
                chk.record(|| triple_label(fb, a, b, c), r.into_components());
            }
        }
    }
    report.push(chk.finish());
    report
}

/// Rebuild `∇_X μ = ∇ζ_X μ + ζ(X, Kμ)` from multiplicative Yang-Mills data
/// and classify the result. Fails unless the Yang-Mills equations, the
/// decomposition of E's bracket and all three flags pass.
pub fn reconstruct_adjustment(
    nz: &FConnection,
    h: &FibrewiseBracket,
    zeta: &ETwoFormOnF,
    k: &BundleMorphism,
    e_alg: &LieAlgebroid,
    f_alg: &LieAlgebroid,
) -> Result<Classified, AdjustmentError> {
    let fb = f_alg.bundle();
    let nabla = FConnection::from_rule(f_alg.clone(), e_alg.bundle().clone(), |alpha, a| {
        nz.christoffel(alpha, a) + &zeta.apply(&fb.basis(alpha), &k.column(a))
    });
    let d = AdjustmentData::new(e_alg.clone(), f_alg.clone(), k.clone(), nabla, zeta.clone())?;
    let mut report = check_mym(nz, h, zeta, Some(k));
    report.subject = "reconstruction".into();
    report.extend(verify_decomposition(&d, h));
    let classified = d.classify()?;
    report.extend(classified.report);
    if !report.passed() || !classified.data.is_strict() {
        return Err(AdjustmentError::Hypotheses(report));
    }
    Ok(Classified {
        report,
        data: classified.data,
    })
}

/// `∇bas_μ(H(ν,σ)) − H(∇bas_μ ν, σ) − H(ν, ∇bas_μ σ) = 0` on frame triples.
pub fn check_basic_flatness_of_h(d: &AdjustmentData, h: &FibrewiseBracket) -> Result<Report, AdjustmentError> {
    let pair = d.basic_pair()?;
    let on_e = pair.on_e();
    let eb = d.e_alg.bundle();
    let mut chk = CheckBuilder::new("basic flatness of H", eb);
    for a in 0..eb.rank() {
        for b in 0..eb.rank() {
            for c in (b + 1)..eb.rank() {
                let (mu, nu, s) = (eb.basis(a), eb.basis(b), eb.basis(c));
                let r = on_e.apply_unchecked(&mu, &h.apply(&nu, &s))
                    - h.apply(&on_e.apply_unchecked(&mu, &nu), &s)
                    - h.apply(&nu, &on_e.apply_unchecked(&mu, &s));
                chk.record(
                    || format!("({}; {}, {})", eb.frame()[a], eb.frame()[b], eb.frame()[c]),
                    r.into_components(),
                );
            }
        }
    }
    Ok(Report::new("basic flatness of H").with(chk.finish()))
}

/// How the primitive is updated under a change of splitting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplittingVariant {
    /// `ζ^λ = d^∇λ + ½[λ∧λ]`, with no `ζ` term.
    Printed,
    /// `ζ^λ = ζ + d^∇λ + ½[λ∧λ]`.
    Additive,
}

#[derive(Clone, Debug)]
pub struct SplittingChange {
    pub nabla: FConnection,
    pub zeta: ETwoFormOnF,
    /// `check_mym` on the new pair, with `H = [·,·]_E`.
    pub report: Report,
}

/// Change of splitting by `λ: F → E` for `K = 0`:
/// `∇^λ_X μ = ∇_X μ + [λX, μ]_E`,
/// `d^∇λ(X,Y) = ∇_X λY − ∇_Y λX − λ[X,Y]_F`, `½[λ∧λ](X,Y) = [λX, λY]_E`.
pub fn apply_splitting_change(
    d: &AdjustmentData,
    lambda: &BundleMorphism,
    variant: SplittingVariant,
) -> Result<SplittingChange, AdjustmentError> {
    if !d.k.is_zero() {
        return Err(AdjustmentError::NonzeroK);
    }
    let fb = d.f_alg.bundle();
    let eb = d.e_alg.bundle();
    if lambda.source() != fb || lambda.target() != eb {
        return Err(GeometryError::PatchMismatch("λ must map F to E".into()).into());
    }
    let br = |a: &Section, b: &Section| d.e_alg.bracket_unchecked(a, b);
    let nabla = FConnection::from_rule(d.f_alg.clone(), eb.clone(), |alpha, a| {
        d.nabla.christoffel(alpha, a) + &br(&lambda.column(alpha), &eb.basis(a))
    });
    let mut zeta = match variant {
        SplittingVariant::Printed => ETwoFormOnF::zero(fb.clone(), eb.clone()),
        SplittingVariant::Additive => d.zeta.clone(),
    };
    for alpha in 0..fb.rank() {
        for beta in (alpha + 1)..fb.rank() {
            let (x, y) = (fb.basis(alpha), fb.basis(beta));
            let (lx, ly) = (lambda.column(alpha), lambda.column(beta));
            let dl = d.nabla.apply_unchecked(&x, &ly)
                - d.nabla.apply_unchecked(&y, &lx)
                - lambda.apply_unchecked(&d.f_alg.bracket_unchecked(&x, &y));
            let value = zeta.component(alpha, beta) + &dl + br(&lx, &ly);
            zeta.set(alpha, beta, value);
        }
    }
    let report = check_mym(&nabla, &d.e_alg.fibrewise(), &zeta, None);
    Ok(SplittingChange { nabla, zeta, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::tangent_algebroid;
    use crate::fixtures::{closed_line_form, mackenzie, so3_action, so3_lab};
    use crate::symexpr::{CoordinatePatch, ScalarExpr};

    fn strict(d: &AdjustmentData) -> AdjustmentData {
        d.classify().unwrap().data
    }

    #[test]
    fn checks_refuse_to_run_out_of_order() {
        let d = mackenzie();
        assert!(matches!(check_strict(&d), Err(AdjustmentError::Precondition { .. })));
        assert!(matches!(
            check_covariant_adjustment(&d),
            Err(AdjustmentError::Precondition { .. })
        ));
        assert!(matches!(extract_h(&d), Err(AdjustmentError::Precondition { .. })));
        let c = check_cartan(&d).unwrap();
        assert_eq!(c.data.flags().cartan, Flag::Pass);
        assert_eq!(d.flags().cartan, Flag::Unchecked);
    }

    #[test]
    fn cartan_detects_non_derivation() {
        let p = CoordinatePatch::standard(3);
        let e = so3_lab(&p);
        let f = tangent_algebroid(&p);
        let mut nabla = FConnection::flat(f.clone(), e.bundle().clone());
        nabla.set_christoffel(0, 0, e.bundle().basis(0).scale(&ScalarExpr::var(0)));
        let k = BundleMorphism::zero(e.bundle().clone(), f.bundle().clone());
        let zeta = ETwoFormOnF::zero(f.bundle().clone(), e.bundle().clone());
        let d = AdjustmentData::new(e, f, k, nabla, zeta).unwrap();
        let c = check_cartan(&d).unwrap();
        assert_eq!(c.data.flags().cartan, Flag::Fail);
        assert!(!c.report.checks[0].residuals.is_empty());
        assert!(matches!(
            check_covariant_adjustment(&c.data),
            Err(AdjustmentError::Precondition { .. })
        ));
    }

    #[test]
    fn covariant_needs_the_primitive() {
        let m = mackenzie();
        let zero = ETwoFormOnF::zero(m.f_alg().bundle().clone(), m.e_alg().bundle().clone());
        let d = AdjustmentData::new(
            m.e_alg().clone(),
            m.f_alg().clone(),
            m.k().clone(),
            m.nabla().clone(),
            zero,
        )
        .unwrap();
        let c = d.classify().unwrap();
        assert_eq!(c.data.flags().cartan, Flag::Pass);
        assert_eq!(c.data.flags().covariant, Flag::Fail);
        assert_eq!(c.data.flags().strict, Flag::Unchecked);
        assert!(c.report.failing().contains(&"covariant adjustment"));
    }

    #[test]
    fn nabla_zeta_examples() {
        let m = mackenzie();
        assert_eq!(nabla_zeta(&m), *m.nabla());
        let s = so3_action();
        assert_eq!(nabla_zeta(&s), *s.nabla());

        let (fb, eb) = (s.f_alg().bundle().clone(), s.e_alg().bundle().clone());
        let mut zeta = ETwoFormOnF::zero(fb.clone(), eb.clone());
        zeta.set(0, 1, eb.basis(2));
        let d = AdjustmentData::new(
            s.e_alg().clone(),
            s.f_alg().clone(),
            s.k().clone(),
            s.nabla().clone(),
            zeta,
        )
        .unwrap();
        // ρ(e1) = x3 ∂2 − x2 ∂3, so ζ(∂1, ρ(e1)) = x3 e3
        let got = nabla_zeta(&d).christoffel(0, 0).clone();
        assert_eq!(got, eb.basis(2).scale(&-ScalarExpr::var(2)));
    }

    #[test]
    fn decomposition_detects_sign_swap() {
        let d = strict(&so3_action());
        let mut h = strict_bla_bracket(&d).unwrap();
        assert!(verify_decomposition(&d, &h).passed());
        h.set_structure_function(0, 1, -h.structure_function(0, 1));
        let r = verify_decomposition(&d, &h);
        assert_eq!(r.checks[0].residuals.len(), 1);
        assert_eq!(r.checks[0].residuals[0].value, "2*e3");
        assert!(!check_basic_flatness_of_h(&d, &h).unwrap().passed());
    }

    #[test]
    fn mym_detects_missing_connection() {
        let m = strict(&mackenzie());
        let h = strict_bla_bracket(&m).unwrap();
        assert_eq!(h, m.e_alg().fibrewise());
        let flat = FConnection::flat(m.f_alg().clone(), m.e_alg().bundle().clone());
        let r = check_mym(&flat, &h, m.zeta(), None);
        assert_eq!(r.failing(), vec!["R_nabla_zeta = ad_H o zeta"]);
    }

    #[test]
    fn reconstruction_round_trip() {
        for d in [
            strict(&so3_action()),
            strict(&mackenzie()),
            strict(&closed_line_form(false)),
        ] {
            let h = strict_bla_bracket(&d).unwrap();
            let nz = nabla_zeta(&d);
            let c = reconstruct_adjustment(&nz, &h, d.zeta(), d.k(), d.e_alg(), d.f_alg()).unwrap();
            assert_eq!(c.data.nabla(), d.nabla());
            assert!(c.data.is_strict());
        }
    }

    #[test]
    fn splitting_change() {
        let m = strict(&mackenzie());
        let (fb, eb) = (m.f_alg().bundle().clone(), m.e_alg().bundle().clone());
        let zero = BundleMorphism::zero(fb.clone(), eb.clone());
        let printed = apply_splitting_change(&m, &zero, SplittingVariant::Printed).unwrap();
        assert_eq!(printed.nabla, *m.nabla());
        assert!(printed.zeta.is_zero());
        let additive = apply_splitting_change(&m, &zero, SplittingVariant::Additive).unwrap();
        assert_eq!(additive.zeta, *m.zeta());
        assert!(additive.report.passed());

        let mut cols = vec![Section::zero(3); 2];
        cols[0] = eb.basis(1).scale(&ScalarExpr::var(1));
        let lambda = BundleMorphism::from_columns(fb.clone(), eb.clone(), cols).unwrap();
        let additive = apply_splitting_change(&m, &lambda, SplittingVariant::Additive).unwrap();
        assert!(additive.report.passed(), "{}", additive.report);
        let printed = apply_splitting_change(&m, &lambda, SplittingVariant::Printed).unwrap();
        assert_eq!(printed.report.failing(), vec!["R_nabla_zeta = ad_H o zeta"]);

        assert!(matches!(
            apply_splitting_change(&strict(&so3_action()), &zero, SplittingVariant::Additive),
            Err(AdjustmentError::NonzeroK | AdjustmentError::Geometry(_))
        ));
    }

    #[test]
    fn splitting_change_on_abelian_e_is_exterior_derivative() {
        let d = strict(&closed_line_form(false));
        let (fb, eb) = (d.f_alg().bundle().clone(), d.e_alg().bundle().clone());
        // λ = x2 dx1 + x1 x3 dx2, dλ = (x3 − 1) dx1∧dx2 − x1 dx2∧dx3
        let one = |e: ScalarExpr| Section::new(vec![e]);
        let x = ScalarExpr::var;
        let cols = vec![one(x(1)), one(&x(0) * &x(2)), one(ScalarExpr::zero())];
        let lambda = BundleMorphism::from_columns(fb, eb, cols).unwrap();
        let out = apply_splitting_change(&d, &lambda, SplittingVariant::Printed).unwrap();
        assert_eq!(out.zeta.component(0, 1), &one(x(2) - ScalarExpr::one()));
        assert_eq!(out.zeta.component(1, 2), &one(-x(0)));
        assert!(out.zeta.component(0, 2).is_zero());
    }
}
