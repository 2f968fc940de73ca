//! Pullbacks along a coordinate projection `φ: N = M × fibre → M`.
//!
//! Expressions on M are expressions on N unchanged, because M's coordinates
//! are the leading coordinates of N.

use thiserror::Error;

use crate::adjustment::{AdjustmentData, AdjustmentError, Flags};
use crate::algebroid::{pair_label, verify_algebroid, verify_morphism, AlgebroidError, LieAlgebroid};
use crate::connection::{ETwoFormOnF, FConnection};
use crate::geometry::{BundleMorphism, GeometryError, Section, VectorBundle, VectorField};
use crate::report::{CheckBuilder, Report};
use crate::symexpr::{CoordinatePatch, PatchError, ScalarExpr};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PullbackError {
    #[error("base coordinates are not a prefix of the total coordinates")]
    NotAProjection,
    #[error(transparent)]
    Patch(#[from] PatchError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Algebroid(#[from] AlgebroidError),
    #[error(transparent)]
    Adjustment(#[from] AdjustmentError),
    #[error("frame name `{0}` clashes with a vertical field")]
    NameClash(String),
    #[error("action fields do not cover the base action:\n{0}")]
    ActionCompatibility(Report),
    #[error("base adjustment is not strict (flags: {0:?})")]
    NotStrict(Flags),
    #[error("pulled-back data fails its checks:\n{0}")]
    Downstream(Report),
}

/// The projection of `N = M × fibre` onto `M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Submersion {
    total: CoordinatePatch,
    base: CoordinatePatch,
}

impl Submersion {
    pub fn new(total: CoordinatePatch, base: CoordinatePatch) -> Result<Self, PullbackError> {
        if !base.is_prefix_of(&total) {
            return Err(PullbackError::NotAProjection);
        }
        Ok(Submersion { total, base })
    }

    /// `M × ℝ^k` with the given fibre coordinate names.
    pub fn product<S: Into<String>>(
        base: &CoordinatePatch,
        fibre: impl IntoIterator<Item = S>,
    ) -> Result<Self, PullbackError> {
        let names = base.names().iter().cloned().chain(fibre.into_iter().map(Into::into));
        Submersion::new(CoordinatePatch::new(names)?, base.clone())
    }

    pub fn total(&self) -> &CoordinatePatch {
        &self.total
    }

    pub fn base(&self) -> &CoordinatePatch {
        &self.base
    }

    pub fn fibre_dimension(&self) -> usize {
        self.total.dimension() - self.base.dimension()
    }

    /// A section over M read as a section over N.
    pub fn pull(&self, s: &Section) -> Section {
        s.clone()
    }

    /// A base vector field as a field on N with zero vertical part.
    pub fn lift_field(&self, x: &VectorField) -> VectorField {
        let mut c = x.components().to_vec();
        c.resize(self.total.dimension(), ScalarExpr::zero());
        VectorField::from_components(c)
    }

    fn lift_bundle(&self, b: &VectorBundle) -> VectorBundle {
        VectorBundle::new(self.total.clone(), b.frame().to_vec()).expect("frame already validated")
    }
}

/// `φ!F` with frame `(lifted F-frame) ++ (∂/∂ fibre coordinates)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PullbackAlgebroid {
    pub phi: Submersion,
    pub base: LieAlgebroid,
    pub algebroid: LieAlgebroid,
}

impl PullbackAlgebroid {
    /// `ξ`: the F-components of a section of `φ!F`.
    pub fn project(&self, s: &Section) -> Section {
        s.slice(0, self.base.rank())
    }

    /// `φ!X`, the canonical lift with zero vertical part.
    pub fn lift(&self, x: &Section) -> Section {
        x.concat(&Section::zero(self.phi.fibre_dimension()))
    }
}

/// The pullback algebroid `φ!F`.
pub fn pullback_algebroid(f: &LieAlgebroid, phi: &Submersion) -> Result<PullbackAlgebroid, PullbackError> {
    if f.patch() != phi.base() {
        return Err(GeometryError::PatchMismatch("F does not live on the base of φ".into()).into());
    }
    let (n, k, m) = (phi.base.dimension(), phi.fibre_dimension(), f.rank());
    let vertical: Vec<String> = phi.total.names()[n..].iter().map(|c| format!("d_{c}")).collect();
    if let Some(clash) = vertical.iter().find(|v| f.bundle().frame().contains(v)) {
        return Err(PullbackError::NameClash(clash.clone()));
    }
    let bundle = VectorBundle::new(phi.total.clone(), f.bundle().frame().iter().cloned().chain(vertical))?;
    let mut anchor: Vec<Vec<ScalarExpr>> = (0..m)
        .map(|a| phi.lift_field(&f.anchor_field(a)).components().to_vec())
        .collect();
    for v in 0..k {
        anchor.push(VectorField::coordinate(n + k, n + v).components().to_vec());
    }
    let mut structure = vec![vec![Section::zero(m + k); m + k]; m + k];
    for a in 0..m {
        for b in 0..m {
            structure[a][b] = f.structure_function(a, b).concat(&Section::zero(k));
        }
    }
    let algebroid = LieAlgebroid::new(bundle, anchor, structure)?;
    Ok(PullbackAlgebroid {
        phi: phi.clone(),
        base: f.clone(),
        algebroid,
    })
}

/// `ξ: φ!F → F` is a Lie algebroid morphism over `φ`: on frames,
/// `Dφ ρ(ε) = ρ_F(ξ ε)` and `ξ[ε_i, ε_j] = [ξ ε_i, ξ ε_j]_F`.
pub fn verify_projection(pb: &PullbackAlgebroid) -> Report {
    let a = &pb.algebroid;
    let ab = a.bundle();
    let n = pb.phi.base.dimension();
    let base_tangent = VectorBundle::tangent(pb.phi.base.clone());
    let mut report = Report::new("projection");
    let mut chk = CheckBuilder::new("anchor over phi", &base_tangent);
    for i in 0..a.rank() {
        let pushed = Section::new(a.anchor_field(i).components()[..n].to_vec());
        let expected = pb.base.anchor_of(&pb.project(&ab.basis(i))).as_section();
        chk.record(|| ab.frame()[i].clone(), (pushed - expected).into_components());
    }
    report.push(chk.finish());
    let mut chk = CheckBuilder::new("bracket over phi", pb.base.bundle());
    for i in 0..a.rank() {
        for j in (i + 1)..a.rank() {
            let lhs = pb.project(a.structure_function(i, j));
            let rhs = pb
                .base
                .bracket_unchecked(&pb.project(&ab.basis(i)), &pb.project(&ab.basis(j)));
            chk.record(|| pair_label(ab, i, j), (lhs - rhs).into_components());
        }
    }
    report.push(chk.finish());
    report
}

/// `φ*∇`: base Christoffel symbols along lifted directions, zero along
/// vertical ones.
pub fn pullback_connection(pb: &PullbackAlgebroid, nabla: &FConnection) -> Result<FConnection, PullbackError> {
    if nabla.algebroid() != &pb.base {
        return Err(AlgebroidError::BundleMismatch("connection is not along the pulled-back F".into()).into());
    }
    let e = pb.phi.lift_bundle(nabla.bundle());
    let m = pb.base.rank();
    let r = e.rank();
    let gamma = (0..pb.algebroid.rank())
        .map(|alpha| {
            (0..r)
                .map(|a| {
                    if alpha < m {
                        nabla.christoffel(alpha, a).clone()
                    } else {
                        Section::zero(r)
                    }
                })
                .collect()
        })
        .collect();
    Ok(FConnection::new(pb.algebroid.clone(), e, gamma)?)
}

/// Result of pulling back an action algebroid.
#[derive(Clone, Debug)]
pub struct PulledAction {
    /// `φ*E` with the action fields as anchor.
    pub e: LieAlgebroid,
    /// `φ!K(μ) = ((φ*K)μ, ρ_{φ*E}(μ))`.
    pub k: BundleMorphism,
    /// `verify_algebroid(φ*E)` and `verify_morphism(φ!K)`.
    pub report: Report,
}

/// The base anchor of E lifted with zero vertical part.
pub fn lifted_action_fields(e: &LieAlgebroid, phi: &Submersion) -> Vec<VectorField> {
    (0..e.rank()).map(|a| phi.lift_field(&e.anchor_field(a))).collect()
}

/// `φ*E` with anchor `action` and the morphism `φ!K: φ*E → φ!F`.
pub fn pullback_action_algebroid(
    e: &LieAlgebroid,
    k: &BundleMorphism,
    action: &[VectorField],
    pb: &PullbackAlgebroid,
) -> Result<PulledAction, PullbackError> {
    let phi = &pb.phi;
    let (n, nk) = (phi.base.dimension(), phi.total.dimension());
    if action.len() != e.rank() || action.iter().any(|v| v.dimension() != nk) {
        return Err(GeometryError::Shape {
            what: "action fields".into(),
            expected: e.rank(),
            found: action.len(),
        }
        .into());
    }
    let base_tangent = VectorBundle::tangent(phi.base.clone());
    let mut chk = CheckBuilder::new("action compatibility", &base_tangent);
    for (a, v) in action.iter().enumerate() {
        let pushed = Section::new(v.components()[..n].to_vec());
        chk.record(
            || e.bundle().frame()[a].clone(),
            (pushed - e.anchor_field(a).as_section()).into_components(),
        );
    }
    let compat = chk.finish();
    if !compat.passed() {
        return Err(PullbackError::ActionCompatibility(
            Report::new("pullback action").with(compat),
        ));
    }
    let eb = phi.lift_bundle(e.bundle());
    let anchor = action.iter().map(|v| v.components().to_vec()).collect();
    let pe = LieAlgebroid::new(eb.clone(), anchor, e.structure().clone())?;
    let cols = (0..e.rank())
        .map(|a| k.column(a).concat(&Section::new(action[a].components()[n..].to_vec())))
        .collect();
    let pk = BundleMorphism::from_columns(eb, pb.algebroid.bundle().clone(), cols)?;
    let mut report = verify_algebroid(&pe);
    report.subject = "pulled-back action".into();
    report.extend(verify_morphism(&pk, &pe, &pb.algebroid)?);
    Ok(PulledAction { e: pe, k: pk, report })
}

/// `ζ′`: base ζ on lifted pairs, zero whenever an argument is vertical.
pub fn pullback_zeta(pb: &PullbackAlgebroid, zeta: &ETwoFormOnF) -> ETwoFormOnF {
    let e = pb.phi.lift_bundle(zeta.e_bundle());
    let mut out = ETwoFormOnF::zero(pb.algebroid.bundle().clone(), e);
    let m = pb.base.rank();
    for a in 0..m {
        for b in (a + 1)..m {
            out.set(a, b, zeta.component(a, b).clone());
        }
    }
    out
}

/// Everything produced by pulling back a strict adjustment.
#[derive(Clone, Debug)]
pub struct PulledAdjustment {
    pub pullback: PullbackAlgebroid,
    pub action: PulledAction,
    /// The classified data over N; all flags pass.
    pub data: AdjustmentData,
    pub report: Report,
}

/// Pull a strict adjustment back to `N`; `action` defaults to the lifted
/// base anchor of E.
pub fn pullback_adjustment(
    d: &AdjustmentData,
    phi: &Submersion,
    action: Option<&[VectorField]>,
) -> Result<PulledAdjustment, PullbackError> {
    if !d.is_strict() {
        return Err(PullbackError::NotStrict(d.flags()));
    }
    let pb = pullback_algebroid(d.f_alg(), phi)?;
    let default_action;
    let action = match action {
        Some(a) => a,
        None => {
            default_action = lifted_action_fields(d.e_alg(), phi);
            &default_action
        }
    };
    let pa = pullback_action_algebroid(d.e_alg(), d.k(), action, &pb)?;
    let nabla = pullback_connection(&pb, d.nabla())?;
    let zeta = pullback_zeta(&pb, d.zeta());
    let data = AdjustmentData::new(pa.e.clone(), pb.algebroid.clone(), pa.k.clone(), nabla, zeta)?;
    let mut report = verify_projection(&pb);
    report.subject = "pullback".into();
    report.extend(pa.report.clone());
    let classified = data.classify()?;
    report.extend(classified.report);
    if !report.passed() || !classified.data.is_strict() {
        return Err(PullbackError::Downstream(report));
    }
    Ok(PulledAdjustment {
        pullback: pb,
        action: pa,
        data: classified.data,
        report,
    })
}

/// The relations `ξ(φ!K(φ*μ)) = φ*(Kμ)` and `(φ*∇)_{φ!X} φ*μ = φ*(∇_X μ)`
/// on frames.
pub fn verify_pullback_relations(base: &AdjustmentData, pulled: &PulledAdjustment) -> Report {
    let pb = &pulled.pullback;
    let (eb, fb) = (base.e_alg().bundle(), base.f_alg().bundle());
    let mut report = Report::new("pullback relations");
    let mut chk = CheckBuilder::new("xi o K' = K", fb);
    for a in 0..eb.rank() {
        let lhs = pb.project(&pulled.data.k().apply_unchecked(&eb.basis(a)));
        chk.record(
            || eb.frame()[a].clone(),
            (lhs - pb.phi.pull(&base.k().column(a))).into_components(),
        );
    }
    report.push(chk.finish());
    let mut chk = CheckBuilder::new("pulled connection", eb);
    for x in 0..fb.rank() {
        for a in 0..eb.rank() {
            let lhs = pulled
                .data
                .nabla()
                .apply_unchecked(&pb.lift(&fb.basis(x)), &eb.basis(a));
            let rhs = pb.phi.pull(&base.nabla().apply_unchecked(&fb.basis(x), &eb.basis(a)));
            chk.record(
                || format!("({}, {})", fb.frame()[x], eb.frame()[a]),
                (lhs - rhs).into_components(),
            );
        }
    }
    report.push(chk.finish());
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::tangent_algebroid;
    use crate::extension::build_extension;
    use crate::fixtures::{mackenzie, so3_action};
    use crate::symexpr::parse_expr;

    fn strict(d: AdjustmentData) -> AdjustmentData {
        d.classify().unwrap().data
    }

    fn r3_to_r4() -> Submersion {
        Submersion::product(&CoordinatePatch::standard(3), ["x4"]).unwrap()
    }

    #[test]
    fn tangent_pulls_back_to_tangent() {
        let pb = pullback_algebroid(&tangent_algebroid(&CoordinatePatch::standard(3)), &r3_to_r4()).unwrap();
        assert_eq!(pb.algebroid.rank(), 4);
        assert!(pb.algebroid.structure().iter().flatten().all(Section::is_zero));
        assert_eq!(
            pb.algebroid.anchor_matrix(),
            tangent_algebroid(&CoordinatePatch::standard(4)).anchor_matrix()
        );
        assert!(verify_projection(&pb).passed());
    }

    #[test]
    fn rank_zero_pulls_back_to_vertical() {
        let p = CoordinatePatch::standard(2);
        let zero = LieAlgebroid::abelian(VectorBundle::with_rank(p.clone(), "f", 0));
        let pb = pullback_algebroid(&zero, &Submersion::product(&p, ["y1"]).unwrap()).unwrap();
        assert_eq!(pb.algebroid.rank(), 1);
        assert_eq!(pb.algebroid.anchor_field(0), VectorField::coordinate(3, 2));
    }

    #[test]
    fn so3_pulls_back() {
        let d = strict(so3_action());
        let pb = pullback_algebroid(d.e_alg(), &r3_to_r4()).unwrap();
        assert!(verify_algebroid(&pb.algebroid).passed());
        let pulled = pullback_adjustment(&d, &r3_to_r4(), None).unwrap();
        assert!(pulled.data.is_strict());
        assert!(verify_pullback_relations(&d, &pulled).passed());
        let ext = build_extension(&pulled.data).unwrap();
        assert!(ext.report.passed(), "{}", ext.report);
    }

    #[test]
    fn vertical_action_parts() {
        let d = strict(so3_action());
        let phi = r3_to_r4();
        let p4 = phi.total().clone();
        let field =
            |cs: [&str; 4]| VectorField::new(&p4, cs.iter().map(|s| parse_expr(s, &p4).unwrap()).collect()).unwrap();
        // ρ_a + ρ_a(x1) ∂4 is ρ_a transported by the shear x4 ↦ x4 + x1
        let sheared = vec![
            field(["0", "x3", "-x2", "0"]),
            field(["-x3", "0", "x1", "-x3"]),
            field(["x2", "-x1", "0", "x2"]),
        ];
        let pulled = pullback_adjustment(&d, &phi, Some(&sheared)).unwrap();
        assert!(pulled.data.is_strict());

        let mut broken = sheared.clone();
        broken[0] = field(["0", "x3", "-x2", "x1"]);
        assert!(matches!(
            pullback_adjustment(&d, &phi, Some(&broken)),
            Err(PullbackError::Downstream(_))
        ));

        let mut incompatible = sheared;
        incompatible[0] = field(["1", "x3", "-x2", "0"]);
        assert!(matches!(
            pullback_adjustment(&d, &phi, Some(&incompatible)),
            Err(PullbackError::ActionCompatibility(_))
        ));
    }

    #[test]
    fn mackenzie_pulls_back_with_genuine_rank_three_check() {
        let d = strict(mackenzie());
        let phi = Submersion::product(d.f_alg().patch(), ["x3"]).unwrap();
        let pulled = pullback_adjustment(&d, &phi, None).unwrap();
        assert_eq!(pulled.data.f_alg().rank(), 3);
        let strict_check = pulled.report.check("strict").unwrap();
        assert_eq!(strict_check.evaluated, 1);
        assert!(pulled.action.k.is_zero());
        // vertical column of the pulled connection is zero, the rest unchanged
        let n = pulled.data.nabla();
        assert!((0..3).all(|a| n.christoffel(2, a).is_zero()));
        assert_eq!(n.christoffel(1, 1), d.nabla().christoffel(1, 1));
        assert!(verify_pullback_relations(&d, &pulled).passed());
        let ext = build_extension(&pulled.data).unwrap();
        assert!(ext.report.passed(), "{}", ext.report);
    }

    #[test]
    fn rejects_bad_projection() {
        let p = CoordinatePatch::new(["y", "x"]).unwrap();
        assert_eq!(
            Submersion::new(p, CoordinatePatch::standard(1)),
            Err(PullbackError::NotAProjection)
        );
        let t = tangent_algebroid(&CoordinatePatch::new(["a"]).unwrap());
        let phi = Submersion::product(t.patch(), ["x"]).unwrap();
        let clash = LieAlgebroid::new(
            VectorBundle::new(t.patch().clone(), ["d_x"]).unwrap(),
            t.anchor_matrix().to_vec(),
            t.structure().clone(),
        )
        .unwrap();
        assert!(matches!(
            pullback_algebroid(&clash, &phi),
            Err(PullbackError::NameClash(_))
        ));
    }
}
