//! F-connections on E, E-valued 2-forms on F, and the basic connection pair
//! with its curvature, torsions and the exterior derivatives of ζ.

use thiserror::Error;

use crate::algebroid::{pair_label, triple_label, verify_morphism, AlgebroidError, LieAlgebroid};
use crate::geometry::{expect_len, BundleMorphism, GeometryError, Section, VectorBundle};
use crate::report::{CheckBuilder, Report};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConnectionError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Algebroid(#[from] AlgebroidError),
    #[error("K is not a Lie algebroid morphism:\n{0}")]
    NotMorphism(Report),
    #[error("basic connections fail to intertwine K:\n{0}")]
    Intertwining(Report),
    #[error("2-form is not antisymmetric at ({0}, {1})")]
    NotAntisymmetric(usize, usize),
}

/// An `F`-connection on the bundle `E`: `∇_{ξ_α} e_a = Γ[α][a]^b e_b`.
#[derive(Clone, Debug, PartialEq)]
pub struct FConnection {
    f: LieAlgebroid,
    e: VectorBundle,
    gamma: Vec<Vec<Section>>,
}

impl FConnection {
    pub fn new(f: LieAlgebroid, e: VectorBundle, gamma: Vec<Vec<Section>>) -> Result<Self, GeometryError> {
        if f.patch() != e.patch() {
            return Err(GeometryError::PatchMismatch(
                "connection bundles over different patches".into(),
            ));
        }
        expect_len("christoffel rows", f.rank(), gamma.len())?;
        for row in &gamma {
            expect_len("christoffel row", e.rank(), row.len())?;
            for s in row {
                expect_len("christoffel entry", e.rank(), s.rank())?;
            }
        }
        Ok(FConnection { f, e, gamma })
    }

    /// Zero Christoffel symbols in the given frame.
    pub fn flat(f: LieAlgebroid, e: VectorBundle) -> Self {
        let gamma = vec![vec![Section::zero(e.rank()); e.rank()]; f.rank()];
        FConnection { f, e, gamma }
    }

    pub fn algebroid(&self) -> &LieAlgebroid {
        &self.f
    }

    pub fn bundle(&self) -> &VectorBundle {
        &self.e
    }

    pub fn christoffel(&self, alpha: usize, a: usize) -> &Section {
        &self.gamma[alpha][a]
    }

    pub fn christoffel_table(&self) -> &[Vec<Section>] {
        &self.gamma
    }

    pub fn set_christoffel(&mut self, alpha: usize, a: usize, value: Section) {
        assert_eq!(value.rank(), self.e.rank());
        self.gamma[alpha][a] = value;
    }

    pub fn is_flat_table(&self) -> bool {
        self.gamma.iter().flatten().all(Section::is_zero)
    }

    /// `∇_X μ = X^α (μ^a Γ[α][a] + ρ_α(μ^b) e_b)`.
    pub(crate) fn apply_unchecked(&self, x: &Section, mu: &Section) -> Section {
        let mut out = Section::zero(self.e.rank());
        for (alpha, xa) in x.components().iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (a, ma) in mu.components().iter().enumerate() {
                if !ma.is_zero() && !self.gamma[alpha][a].is_zero() {
                    out.add_scaled(&(xa * ma), &self.gamma[alpha][a]);
                }
            }
        }
        if !self.f.anchor_is_zero() {
            out = out + mu.derive_along(&self.f.anchor_of(x));
        }
        out
    }

    pub fn apply(&self, x: &Section, mu: &Section) -> Result<Section, GeometryError> {
        expect_len("connection direction", self.f.rank(), x.rank())?;
        expect_len("connection argument", self.e.rank(), mu.rank())?;
        Ok(self.apply_unchecked(x, mu))
    }

    /// `R(X,Y)μ = ∇_X∇_Yμ − ∇_Y∇_Xμ − ∇_{[X,Y]}μ`.
    pub(crate) fn curvature_unchecked(&self, x: &Section, y: &Section, mu: &Section) -> Section {
        let d = |v: &Section, s: &Section| self.apply_unchecked(v, s);
        d(x, &d(y, mu)) - d(y, &d(x, mu)) - d(&self.f.bracket_unchecked(x, y), mu)
    }

    pub fn curvature(&self, x: &Section, y: &Section, mu: &Section) -> Result<Section, GeometryError> {
        expect_len("curvature direction", self.f.rank(), x.rank())?;
        expect_len("curvature direction", self.f.rank(), y.rank())?;
        expect_len("curvature argument", self.e.rank(), mu.rank())?;
        Ok(self.curvature_unchecked(x, y, mu))
    }

    /// Frame values `∇_{ξ_α} e_a` recomputed from an arbitrary rule.
    pub(crate) fn from_rule(f: LieAlgebroid, e: VectorBundle, rule: impl Fn(usize, usize) -> Section) -> Self {
        let gamma = (0..f.rank())
            .map(|alpha| (0..e.rank()).map(|a| rule(alpha, a)).collect())
            .collect();
        FConnection { f, e, gamma }
    }
}

/// Free-function form of [`FConnection::apply`].
pub fn apply_connection(nabla: &FConnection, x: &Section, mu: &Section) -> Result<Section, GeometryError> {
    nabla.apply(x, mu)
}

/// Free-function form of [`FConnection::curvature`].
pub fn curvature(nabla: &FConnection, x: &Section, y: &Section, mu: &Section) -> Result<Section, GeometryError> {
    nabla.curvature(x, y, mu)
}

/// `ζ ∈ Ω²(F; E)`, stored as `ζ(ξ_α, ξ_β) = comps[α][β]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ETwoFormOnF {
    f: VectorBundle,
    e: VectorBundle,
    comps: Vec<Vec<Section>>,
}

impl ETwoFormOnF {
    pub fn new(f: VectorBundle, e: VectorBundle, comps: Vec<Vec<Section>>) -> Result<Self, ConnectionError> {
        expect_len("2-form rows", f.rank(), comps.len())?;
        for row in &comps {
            expect_len("2-form row", f.rank(), row.len())?;
            for s in row {
                expect_len("2-form entry", e.rank(), s.rank())?;
            }
        }
        for a in 0..f.rank() {
            for b in a..f.rank() {
                if !(&comps[a][b] + &comps[b][a]).is_zero() {
                    return Err(ConnectionError::NotAntisymmetric(a, b));
                }
            }
        }
        Ok(ETwoFormOnF { f, e, comps })
    }

    pub fn zero(f: VectorBundle, e: VectorBundle) -> Self {
        let comps = vec![vec![Section::zero(e.rank()); f.rank()]; f.rank()];
        ETwoFormOnF { f, e, comps }
    }

    /// Set `ζ(ξ_α, ξ_β) = value` and `ζ(ξ_β, ξ_α) = −value`.
    pub fn set(&mut self, alpha: usize, beta: usize, value: Section) {
        assert_eq!(value.rank(), self.e.rank());
        assert!(alpha != beta || value.is_zero(), "diagonal of a 2-form is zero");
        self.comps[beta][alpha] = -&value;
        self.comps[alpha][beta] = value;
    }

    pub fn f_bundle(&self) -> &VectorBundle {
        &self.f
    }

    pub fn e_bundle(&self) -> &VectorBundle {
        &self.e
    }

    pub fn component(&self, alpha: usize, beta: usize) -> &Section {
        &self.comps[alpha][beta]
    }

    pub fn components(&self) -> &[Vec<Section>] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().flatten().all(Section::is_zero)
    }

    /// `ζ(X, Y) = X^α Y^β ζ_αβ`.
    pub fn apply(&self, x: &Section, y: &Section) -> Section {
        let mut out = Section::zero(self.e.rank());
        for (a, xa) in x.components().iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, yb) in y.components().iter().enumerate() {
                if !yb.is_zero() && !self.comps[a][b].is_zero() {
                    out.add_scaled(&(xa * yb), &self.comps[a][b]);
                }
            }
        }
        out
    }

    pub fn scale(&self, f: &crate::symexpr::ScalarExpr) -> Self {
        ETwoFormOnF {
            f: self.f.clone(),
            e: self.e.clone(),
            comps: self
                .comps
                .iter()
                .map(|r| r.iter().map(|s| s.scale(f)).collect())
                .collect(),
        }
    }
}

/// The basic E-connections on E and on F built from `(∇, K)`:
/// `∇bas_μ ν = [μ,ν]_E + ∇_{Kν} μ` and `∇bas_μ X = [Kμ, X]_F + K(∇_X μ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BasicConnectionPair {
    nabla: FConnection,
    k: BundleMorphism,
    e_alg: LieAlgebroid,
    on_e: FConnection,
    on_f: FConnection,
}

impl BasicConnectionPair {
    pub fn nabla(&self) -> &FConnection {
        &self.nabla
    }

    pub fn k(&self) -> &BundleMorphism {
        &self.k
    }

    pub fn e_alg(&self) -> &LieAlgebroid {
        &self.e_alg
    }

    pub fn f_alg(&self) -> &LieAlgebroid {
        self.nabla.algebroid()
    }

    /// `∇bas` on E, an E-connection on E.
    pub fn on_e(&self) -> &FConnection {
        &self.on_e
    }

    /// `∇bas` on F, an E-connection on F.
    pub fn on_f(&self) -> &FConnection {
        &self.on_f
    }

    /// The five-term basic curvature
    /// `∇_X[μ,ν] − [∇_Xμ,ν] − [μ,∇_Xν] − ∇_{∇bas_ν X}μ + ∇_{∇bas_μ X}ν`.
    pub fn basic_curvature(&self, mu: &Section, nu: &Section, x: &Section) -> Section {
        let n = &self.nabla;
        let br = |a: &Section, b: &Section| self.e_alg.bracket_unchecked(a, b);
        n.apply_unchecked(x, &br(mu, nu))
            - br(&n.apply_unchecked(x, mu), nu)
            - br(mu, &n.apply_unchecked(x, nu))
            - n.apply_unchecked(&self.on_f.apply_unchecked(nu, x), mu)
            + n.apply_unchecked(&self.on_f.apply_unchecked(mu, x), nu)
    }

    /// `t_bas(μ,ν) = ∇bas_μ ν − ∇bas_ν μ − [μ,ν]_E`.
    pub fn torsion_basic(&self, mu: &Section, nu: &Section) -> Section {
        self.on_e.apply_unchecked(mu, nu) - self.on_e.apply_unchecked(nu, mu) - self.e_alg.bracket_unchecked(mu, nu)
    }

    /// `t_K(μ,ν) = ∇_{Kμ} ν − ∇_{Kν} μ − [μ,ν]_E`.
    pub fn torsion_k(&self, mu: &Section, nu: &Section) -> Section {
        let (km, kn) = (self.k.apply_unchecked(mu), self.k.apply_unchecked(nu));
        self.nabla.apply_unchecked(&km, nu) - self.nabla.apply_unchecked(&kn, mu) - self.e_alg.bracket_unchecked(mu, nu)
    }

    pub fn torsion(&self, kind: TorsionKind, mu: &Section, nu: &Section) -> Section {
        match kind {
            TorsionKind::Basic => self.torsion_basic(mu, nu),
            TorsionKind::InducedByK => self.torsion_k(mu, nu),
        }
    }

    /// `(∇_X t_bas)(μ,ν) = ∇_X(t(μ,ν)) − t(∇_Xμ, ν) − t(μ, ∇_Xν)`.
    pub fn covariant_torsion(&self, x: &Section, mu: &Section, nu: &Section) -> Section {
        let n = &self.nabla;
        n.apply_unchecked(x, &self.torsion_basic(mu, nu))
            - self.torsion_basic(&n.apply_unchecked(x, mu), nu)
            - self.torsion_basic(mu, &n.apply_unchecked(x, nu))
    }

    /// `d^{∇bas}ζ(X,Y,ν) = ∇bas_ν(ζ(X,Y)) − ζ(∇bas_ν X, Y) − ζ(X, ∇bas_ν Y)`.
    pub fn dbas_zeta(&self, zeta: &ETwoFormOnF, x: &Section, y: &Section, nu: &Section) -> Section {
        self.on_e.apply_unchecked(nu, &zeta.apply(x, y))
            - zeta.apply(&self.on_f.apply_unchecked(nu, x), y)
            - zeta.apply(x, &self.on_f.apply_unchecked(nu, y))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TorsionKind {
    /// Torsion of `∇bas` on E.
    Basic,
    /// Torsion of the E-connection `μ, ν ↦ ∇_{Kμ} ν`.
    InducedByK,
}

/// Build the basic connection pair. `K` must be a Lie algebroid morphism
/// `E → F`; the intertwining `K ∘ ∇bas = ∇bas ∘ K` is verified on frames.
pub fn basic_connection(
    nabla: &FConnection,
    k: &BundleMorphism,
    e_alg: &LieAlgebroid,
) -> Result<BasicConnectionPair, ConnectionError> {
    let f_alg = nabla.algebroid();
    if nabla.bundle() != e_alg.bundle() {
        return Err(AlgebroidError::BundleMismatch("connection acts on a different bundle than E".into()).into());
    }
    let morph = verify_morphism(k, e_alg, f_alg)?;
    if !morph.passed() {
        return Err(ConnectionError::NotMorphism(morph));
    }
    let eb = e_alg.bundle();
    let fb = f_alg.bundle();
    let on_e = FConnection::from_rule(e_alg.clone(), eb.clone(), |a, b| {
        let mut s = e_alg.structure_function(a, b).clone();
        for alpha in 0..f_alg.rank() {
            s.add_scaled(k.entry(alpha, b), nabla.christoffel(alpha, a));
        }
        s
    });
    let on_f = FConnection::from_rule(e_alg.clone(), fb.clone(), |a, beta| {
        f_alg.bracket_unchecked(&k.column(a), &fb.basis(beta)) + k.apply_unchecked(nabla.christoffel(beta, a))
    });
    let pair = BasicConnectionPair {
        nabla: nabla.clone(),
        k: k.clone(),
        e_alg: e_alg.clone(),
        on_e,
        on_f,
    };
    let mut chk = CheckBuilder::new("intertwining", fb);
    for a in 0..eb.rank() {
        for b in 0..eb.rank() {
            let lhs = k.apply_unchecked(pair.on_e.christoffel(a, b));
            let rhs = pair.on_f.apply_unchecked(&eb.basis(a), &k.column(b));
            chk.record(|| pair_label(eb, a, b), (lhs - rhs).into_components());
        }
    }
    let check = chk.finish();
    if !check.passed() {
        return Err(ConnectionError::Intertwining(
            Report::new("basic connection").with(check),
        ));
    }
    Ok(pair)
}

/// Free-function form of [`BasicConnectionPair::basic_curvature`].
pub fn basic_curvature(pair: &BasicConnectionPair, mu: &Section, nu: &Section, x: &Section) -> Section {
    pair.basic_curvature(mu, nu, x)
}

/// Free-function form of [`BasicConnectionPair::torsion`].
pub fn torsion(pair: &BasicConnectionPair, kind: TorsionKind, mu: &Section, nu: &Section) -> Section {
    pair.torsion(kind, mu, nu)
}

/// Free-function form of [`BasicConnectionPair::dbas_zeta`].
pub fn dbas_zeta(pair: &BasicConnectionPair, zeta: &ETwoFormOnF, x: &Section, y: &Section, nu: &Section) -> Section {
    pair.dbas_zeta(zeta, x, y, nu)
}

/// `d^{∇ζ}ζ(X,Y,Z) = ∇ζ_X ζ(Y,Z) − ∇ζ_Y ζ(X,Z) + ∇ζ_Z ζ(X,Y)
/// − ζ([X,Y],Z) + ζ([X,Z],Y) − ζ([Y,Z],X)`.
pub fn dzeta_zeta(nabla_zeta: &FConnection, zeta: &ETwoFormOnF, x: &Section, y: &Section, z: &Section) -> Section {
    let f = nabla_zeta.algebroid();
    if f.rank() < 3 {
        return Section::zero(zeta.e_bundle().rank());
    }
    let d = |v: &Section, s: &Section| nabla_zeta.apply_unchecked(v, s);
    let br = |a: &Section, b: &Section| f.bracket_unchecked(a, b);
    d(x, &zeta.apply(y, z)) - d(y, &zeta.apply(x, z)) + d(z, &zeta.apply(x, y)) - zeta.apply(&br(x, y), z)
        + zeta.apply(&br(x, z), y)
        - zeta.apply(&br(y, z), x)
}

/// The identities the basic pair satisfies for any `(∇, K)`, checked on
/// frames: the two torsions cancel, the torsion relation for the basic
/// curvature, and the curvatures of `∇bas` on E and F in terms of it.
pub fn verify_basic_identities(pair: &BasicConnectionPair) -> Report {
    let eb = pair.e_alg.bundle();
    let fb = pair.f_alg().bundle();
    let (r, m) = (eb.rank(), fb.rank());
    let mut report = Report::new("basic connection identities");

    let mut chk = CheckBuilder::new("t_bas + t_K", eb);
    for a in 0..r {
        for b in (a + 1)..r {
            let (ea, e_b) = (eb.basis(a), eb.basis(b));
            let res = pair.torsion_basic(&ea, &e_b) + pair.torsion_k(&ea, &e_b);
            chk.record(|| pair_label(eb, a, b), res.into_components());
        }
    }
    report.push(chk.finish());

    let n = &pair.nabla;
    let mut chk = CheckBuilder::new("torsion relation", eb);
    for a in 0..r {
        for b in (a + 1)..r {
            for alpha in 0..m {
                let (ea, e_b, x) = (eb.basis(a), eb.basis(b), fb.basis(alpha));
                let lhs = pair.basic_curvature(&ea, &e_b, &x);
                let rhs = pair.covariant_torsion(&x, &ea, &e_b) - n.curvature_unchecked(&pair.k.column(a), &x, &e_b)
                    + n.curvature_unchecked(&pair.k.column(b), &x, &ea);
                chk.record(
                    || format!("({}, {}, {})", eb.frame()[a], eb.frame()[b], fb.frame()[alpha]),
                    (lhs - rhs).into_components(),
                );
            }
        }
    }
    report.push(chk.finish());

    let mut chk = CheckBuilder::new("curvature of basic connection on E", eb);
    for a in 0..r {
        for b in (a + 1)..r {
            for c in 0..r {
                let (ea, e_b, ec) = (eb.basis(a), eb.basis(b), eb.basis(c));
                let res =
                    pair.on_e.curvature_unchecked(&ea, &e_b, &ec) + pair.basic_curvature(&ea, &e_b, &pair.k.column(c));
                chk.record(|| triple_label(eb, a, b, c), res.into_components());
            }
        }
    }
    report.push(chk.finish());

    let mut chk = CheckBuilder::new("curvature of basic connection on F", fb);
    for a in 0..r {
        for b in (a + 1)..r {
            for alpha in 0..m {
                let (ea, e_b, x) = (eb.basis(a), eb.basis(b), fb.basis(alpha));
                let res = pair.on_f.curvature_unchecked(&ea, &e_b, &x)
                    + pair.k.apply_unchecked(&pair.basic_curvature(&ea, &e_b, &x));
                chk.record(
                    || format!("({}, {}, {})", eb.frame()[a], eb.frame()[b], fb.frame()[alpha]),
                    res.into_components(),
                );
            }
        }
    }
    report.push(chk.finish());
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::tangent_algebroid;
    use crate::fixtures::{mackenzie, so3_action, so3_lab};
    use crate::symexpr::{parse_expr, CoordinatePatch, ScalarExpr};

    fn sec(p: &CoordinatePatch, cs: &[&str]) -> Section {
        Section::new(cs.iter().map(|s| parse_expr(s, p).unwrap()).collect())
    }

    #[test]
    fn apply_examples() {
        let p = CoordinatePatch::standard(3);
        let t = tangent_algebroid(&p);
        let flat = FConnection::flat(t.clone(), VectorBundle::with_rank(p.clone(), "e", 2));
        let x = sec(&p, &["x2", "1", "x1*x3"]);
        assert!(flat.apply(&x, &sec(&p, &["3", "-1/2"])).unwrap().is_zero());
        let got = flat.apply(&t.bundle().basis(0), &sec(&p, &["x1", "0"])).unwrap();
        assert_eq!(got, Section::basis(2, 0));
        assert!(flat.apply(&Section::zero(2), &Section::zero(2)).is_err());

        let d = mackenzie();
        let q = d.e_alg().patch().clone();
        let got = d
            .nabla()
            .apply(&d.f_alg().bundle().basis(1), &d.e_alg().bundle().basis(1))
            .unwrap();
        assert_eq!(got, sec(&q, &["0", "0", "x1"]));
    }

    #[test]
    fn curvature_examples() {
        let d = mackenzie();
        let (fb, eb) = (d.f_alg().bundle(), d.e_alg().bundle());
        let r = d.nabla().curvature(&fb.basis(0), &fb.basis(1), &eb.basis(1)).unwrap();
        assert_eq!(r, eb.basis(2));
        let s = so3_action();
        let (fb, eb) = (s.f_alg().bundle(), s.e_alg().bundle());
        for (a, b, c) in [(0, 1, 0), (1, 2, 2), (0, 2, 1)] {
            assert!(s
                .nabla()
                .curvature(&fb.basis(a), &fb.basis(b), &eb.basis(c))
                .unwrap()
                .is_zero());
        }
    }

    #[test]
    fn basic_connection_examples() {
        let d = so3_action();
        let pair = basic_connection(d.nabla(), d.k(), d.e_alg()).unwrap();
        let eb = d.e_alg().bundle();
        assert_eq!(pair.on_e().christoffel(0, 1), &eb.basis(2));

        let m = mackenzie();
        let pair = basic_connection(m.nabla(), m.k(), m.e_alg()).unwrap();
        assert!(pair.on_f().is_flat_table());
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(pair.on_e().christoffel(a, b), m.e_alg().structure_function(a, b));
            }
        }

        let p = CoordinatePatch::standard(2);
        let t = tangent_algebroid(&p);
        let id = BundleMorphism::identity(t.bundle().clone());
        let pair = basic_connection(&FConnection::flat(t.clone(), t.bundle().clone()), &id, &t).unwrap();
        assert!(pair.on_f().is_flat_table());

        let mut bad = d.k().clone().matrix().to_vec();
        bad[1][0] = -&bad[1][0];
        let bad = BundleMorphism::new(d.k().source().clone(), d.k().target().clone(), bad).unwrap();
        assert!(matches!(
            basic_connection(d.nabla(), &bad, d.e_alg()),
            Err(ConnectionError::NotMorphism(_))
        ));
    }

    #[test]
    fn basic_curvature_and_torsion_examples() {
        for d in [so3_action(), mackenzie()] {
            let pair = basic_connection(d.nabla(), d.k(), d.e_alg()).unwrap();
            let (eb, fb) = (d.e_alg().bundle(), d.f_alg().bundle());
            for a in 0..3 {
                for b in 0..3 {
                    for x in 0..fb.rank() {
                        assert!(basic_curvature(&pair, &eb.basis(a), &eb.basis(b), &fb.basis(x)).is_zero());
                    }
                    let (ea, e_b) = (eb.basis(a), eb.basis(b));
                    assert_eq!(
                        torsion(&pair, TorsionKind::Basic, &ea, &e_b),
                        *d.e_alg().structure_function(a, b)
                    );
                    let sum =
                        pair.torsion(TorsionKind::Basic, &ea, &e_b) + pair.torsion(TorsionKind::InducedByK, &ea, &e_b);
                    assert!(sum.is_zero());
                }
            }
        }

        // K = 0 with abelian E: every term of the basic curvature vanishes
        let p = CoordinatePatch::standard(2);
        let t = tangent_algebroid(&p);
        let e = LieAlgebroid::abelian(VectorBundle::with_rank(p.clone(), "e", 2));
        let mut nabla = FConnection::flat(t.clone(), e.bundle().clone());
        nabla.set_christoffel(0, 1, sec(&p, &["x2^2", "x1"]));
        let k = BundleMorphism::zero(e.bundle().clone(), t.bundle().clone());
        let pair = basic_connection(&nabla, &k, &e).unwrap();
        let r = pair.basic_curvature(&sec(&p, &["x1", "1"]), &sec(&p, &["0", "x2"]), &sec(&p, &["1", "x1"]));
        assert!(r.is_zero());
    }

    #[test]
    fn zeta_derivatives() {
        let m = mackenzie();
        let pair = basic_connection(m.nabla(), m.k(), m.e_alg()).unwrap();
        let (eb, fb) = (m.e_alg().bundle(), m.f_alg().bundle());
        let (x, y, nu) = (fb.basis(0), fb.basis(1), eb.basis(1));
        let zero = ETwoFormOnF::zero(fb.clone(), eb.clone());
        assert!(dbas_zeta(&pair, &zero, &x, &y, &nu).is_zero());
        let residual = m.nabla().curvature(&x, &y, &nu).unwrap() + dbas_zeta(&pair, m.zeta(), &x, &y, &nu);
        assert!(residual.is_zero());
        // rank F = 2: no independent triple
        let xs = sec(m.f_alg().patch(), &["x1", "1"]);
        assert!(dzeta_zeta(m.nabla(), m.zeta(), &x, &y, &xs).is_zero());

        let so = so3_action();
        let fb = so.f_alg().bundle();
        let zero = ETwoFormOnF::zero(fb.clone(), so.e_alg().bundle().clone());
        assert!(dzeta_zeta(so.nabla(), &zero, &fb.basis(0), &fb.basis(1), &fb.basis(2)).is_zero());
    }

    #[test]
    fn two_form_validation() {
        let p = CoordinatePatch::standard(2);
        let fb = VectorBundle::tangent(p.clone());
        let eb = VectorBundle::with_rank(p.clone(), "e", 1);
        let one = Section::new(vec![ScalarExpr::one()]);
        let comps = vec![vec![Section::zero(1), one.clone()], vec![one, Section::zero(1)]];
        assert_eq!(
            ETwoFormOnF::new(fb.clone(), eb.clone(), comps),
            Err(ConnectionError::NotAntisymmetric(0, 1))
        );
        let lab = so3_lab(&p);
        assert_eq!(lab.rank(), 3);
    }
}
