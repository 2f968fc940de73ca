//! Lie algebroids over one patch, given by an anchor matrix and structure
//! functions on a frame, plus fibrewise brackets (bundles of Lie algebras).

use num_rational::BigRational;
use thiserror::Error;

use crate::geometry::{expect_len, BundleMorphism, GeometryError, Section, VectorBundle, VectorField};
use crate::report::{Check, CheckBuilder, Report};
use crate::symexpr::{CoordinatePatch, ScalarExpr};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebroidError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("bundle mismatch: {0}")]
    BundleMismatch(String),
    #[error("invalid action data:\n{0}")]
    InvalidAction(Report),
}

/// Structure functions `c[a][b]`, each a section: `[e_a, e_b] = c[a][b]^c e_c`.
pub type StructureTable = Vec<Vec<Section>>;

fn zero_table(rank: usize) -> StructureTable {
    vec![vec![Section::zero(rank); rank]; rank]
}

fn check_table(rank: usize, table: &StructureTable) -> Result<(), GeometryError> {
    expect_len("structure table", rank, table.len())?;
    for row in table {
        expect_len("structure table row", rank, row.len())?;
        for s in row {
            expect_len("structure function", rank, s.rank())?;
        }
    }
    Ok(())
}

/// Tensorial bilinear product `μ^a ν^b T[a][b]`.
fn contract(table: &StructureTable, mu: &Section, nu: &Section) -> Section {
    let rank = table.len();
    let mut out = Section::zero(rank);
    for (a, ma) in mu.components().iter().enumerate() {
        if ma.is_zero() {
            continue;
        }
        for (b, nb) in nu.components().iter().enumerate() {
            if nb.is_zero() || table[a][b].is_zero() {
                continue;
            }
            out.add_scaled(&(ma * nb), &table[a][b]);
        }
    }
    out
}

pub(crate) fn pair_label(bundle: &VectorBundle, a: usize, b: usize) -> String {
    format!("({}, {})", bundle.frame()[a], bundle.frame()[b])
}

pub(crate) fn triple_label(bundle: &VectorBundle, a: usize, b: usize, c: usize) -> String {
    format!("({}, {}, {})", bundle.frame()[a], bundle.frame()[b], bundle.frame()[c])
}

#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebroid {
    bundle: VectorBundle,
    /// `anchor[a][i]`: `ρ(e_a) = anchor[a][i] ∂_i`.
    anchor: Vec<Vec<ScalarExpr>>,
    structure: StructureTable,
}

impl LieAlgebroid {
    pub fn new(
        bundle: VectorBundle,
        anchor: Vec<Vec<ScalarExpr>>,
        structure: StructureTable,
    ) -> Result<Self, GeometryError> {
        let n = bundle.patch().dimension();
        expect_len("anchor rows", bundle.rank(), anchor.len())?;
        for row in &anchor {
            expect_len("anchor row", n, row.len())?;
        }
        check_table(bundle.rank(), &structure)?;
        Ok(LieAlgebroid {
            bundle,
            anchor,
            structure,
        })
    }

    /// Zero anchor and zero bracket.
    pub fn abelian(bundle: VectorBundle) -> Self {
        let n = bundle.patch().dimension();
        let r = bundle.rank();
        LieAlgebroid {
            anchor: vec![vec![ScalarExpr::zero(); n]; r],
            structure: zero_table(r),
            bundle,
        }
    }

    /// The bundle of Lie algebras with zero anchor and bracket `h`.
    pub fn from_fibrewise(h: &FibrewiseBracket) -> Self {
        let mut a = LieAlgebroid::abelian(h.bundle.clone());
        a.structure = h.structure.clone();
        a
    }

    pub fn bundle(&self) -> &VectorBundle {
        &self.bundle
    }

    pub fn patch(&self) -> &CoordinatePatch {
        self.bundle.patch()
    }

    pub fn rank(&self) -> usize {
        self.bundle.rank()
    }

    pub fn anchor_matrix(&self) -> &[Vec<ScalarExpr>] {
        &self.anchor
    }

    pub fn structure(&self) -> &StructureTable {
        &self.structure
    }

    /// `c[a][b]`, the components of `[e_a, e_b]`.
    pub fn structure_function(&self, a: usize, b: usize) -> &Section {
        &self.structure[a][b]
    }

    /// Overwrite one structure function without touching `c[b][a]`.
    pub fn set_structure_function(&mut self, a: usize, b: usize, value: Section) {
        assert_eq!(value.rank(), self.rank());
        self.structure[a][b] = value;
    }

    pub fn set_anchor_row(&mut self, a: usize, row: Vec<ScalarExpr>) {
        assert_eq!(row.len(), self.patch().dimension());
        self.anchor[a] = row;
    }

    pub fn anchor_is_zero(&self) -> bool {
        self.anchor.iter().flatten().all(ScalarExpr::is_zero)
    }

    /// `ρ(e_a)`.
    pub fn anchor_field(&self, a: usize) -> VectorField {
        VectorField::from_components(self.anchor[a].clone())
    }

    /// `ρ(μ)`.
    pub fn anchor_of(&self, mu: &Section) -> VectorField {
        let n = self.patch().dimension();
        let mut out = Section::zero(n);
        for (a, m) in mu.components().iter().enumerate() {
            if !m.is_zero() {
                out.add_scaled(m, &Section::new(self.anchor[a].clone()));
            }
        }
        VectorField::from_components(out.into_components())
    }

    /// The anchor as a bundle morphism into the tangent bundle.
    pub fn anchor_morphism(&self) -> BundleMorphism {
        let cols = (0..self.rank()).map(|a| Section::new(self.anchor[a].clone())).collect();
        BundleMorphism::from_columns(self.bundle.clone(), VectorBundle::tangent(self.patch().clone()), cols)
            .expect("anchor shape checked at construction")
    }

    /// `μ^a ν^b c[a][b]`, the tensorial part of the bracket.
    pub fn tensorial_bracket(&self, mu: &Section, nu: &Section) -> Section {
        contract(&self.structure, mu, nu)
    }

    pub(crate) fn bracket_unchecked(&self, mu: &Section, nu: &Section) -> Section {
        let mut out = self.tensorial_bracket(mu, nu);
        if !self.anchor_is_zero() {
            out = out + nu.derive_along(&self.anchor_of(mu)) - mu.derive_along(&self.anchor_of(nu));
        }
        out
    }

    /// Bracket of arbitrary sections by the Leibniz extension of the
    /// structure functions:
    /// `[μ, ν] = μ^a ν^b c_ab + ρ(μ)(ν^b) e_b − ρ(ν)(μ^a) e_a`.
    pub fn bracket(&self, mu: &Section, nu: &Section) -> Result<Section, GeometryError> {
        expect_len("bracket argument", self.rank(), mu.rank())?;
        expect_len("bracket argument", self.rank(), nu.rank())?;
        Ok(self.bracket_unchecked(mu, nu))
    }

    /// `[[μ,ν],σ] + [[ν,σ],μ] + [[σ,μ],ν]`.
    pub fn jacobiator(&self, mu: &Section, nu: &Section, sigma: &Section) -> Section {
        let b = |x: &Section, y: &Section| self.bracket_unchecked(x, y);
        b(&b(mu, nu), sigma) + b(&b(nu, sigma), mu) + b(&b(sigma, mu), nu)
    }

    /// The fibrewise part of the bracket (forgetting the anchor).
    pub fn fibrewise(&self) -> FibrewiseBracket {
        FibrewiseBracket {
            bundle: self.bundle.clone(),
            structure: self.structure.clone(),
        }
    }
}

/// Free-function form of [`LieAlgebroid::bracket`].
pub fn extend_bracket(a: &LieAlgebroid, mu: &Section, nu: &Section) -> Result<Section, GeometryError> {
    a.bracket(mu, nu)
}

/// A field of brackets on the fibres of a bundle, `H(e_a, e_b) = H[a][b]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FibrewiseBracket {
    bundle: VectorBundle,
    structure: StructureTable,
}

impl FibrewiseBracket {
    pub fn new(bundle: VectorBundle, structure: StructureTable) -> Result<Self, GeometryError> {
        check_table(bundle.rank(), &structure)?;
        Ok(FibrewiseBracket { bundle, structure })
    }

    pub fn zero(bundle: VectorBundle) -> Self {
        FibrewiseBracket {
            structure: zero_table(bundle.rank()),
            bundle,
        }
    }

    /// Constant structure constants `c[a][b][c]`.
    pub fn constant(bundle: VectorBundle, constants: &[Vec<Vec<BigRational>>]) -> Result<Self, GeometryError> {
        let table = constants
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| Section::new(v.iter().cloned().map(ScalarExpr::constant).collect()))
                    .collect()
            })
            .collect();
        FibrewiseBracket::new(bundle, table)
    }

    pub fn bundle(&self) -> &VectorBundle {
        &self.bundle
    }

    pub fn rank(&self) -> usize {
        self.bundle.rank()
    }

    pub fn structure(&self) -> &StructureTable {
        &self.structure
    }

    pub fn structure_function(&self, a: usize, b: usize) -> &Section {
        &self.structure[a][b]
    }

    pub fn set_structure_function(&mut self, a: usize, b: usize, value: Section) {
        assert_eq!(value.rank(), self.rank());
        self.structure[a][b] = value;
    }

    /// `H(μ, ν) = μ^a ν^b H[a][b]`.
    pub fn apply(&self, mu: &Section, nu: &Section) -> Section {
        contract(&self.structure, mu, nu)
    }
}

/// Antisymmetry `c[a][b] + c[b][a]` on all pairs `a ≤ b`.
fn antisymmetry_check(bundle: &VectorBundle, table: &StructureTable) -> Check {
    let mut chk = CheckBuilder::new("antisymmetry", bundle);
    for a in 0..bundle.rank() {
        for b in a..bundle.rank() {
            let r = &table[a][b] + &table[b][a];
            chk.record(|| pair_label(bundle, a, b), r.into_components());
        }
    }
    chk.finish()
}

/// Check the Lie algebroid axioms on the frame: antisymmetry of the
/// structure functions, anchor compatibility `ρ[e_a,e_b] = [ρe_a, ρe_b]`
/// and the Jacobi identity on all frame triples.
pub fn verify_algebroid(a: &LieAlgebroid) -> Report {
    let bundle = a.bundle();
    let tangent = VectorBundle::tangent(a.patch().clone());
    let mut report = Report::new("algebroid axioms");
    report.push(antisymmetry_check(bundle, &a.structure));

    let mut chk = CheckBuilder::new("anchor compatibility", &tangent);
    for i in 0..a.rank() {
        for j in (i + 1)..a.rank() {
            let lhs = a.anchor_of(&a.structure[i][j]);
            let rhs = a.anchor_field(i).bracket_unchecked(&a.anchor_field(j));
            chk.record(|| pair_label(bundle, i, j), lhs.sub(&rhs).components().to_vec());
        }
    }
    report.push(chk.finish());

    let mut chk = CheckBuilder::new("jacobi", bundle);
    for i in 0..a.rank() {
        for j in (i + 1)..a.rank() {
            for k in (j + 1)..a.rank() {
                let r = a.jacobiator(&bundle.basis(i), &bundle.basis(j), &bundle.basis(k));
                chk.record(|| triple_label(bundle, i, j, k), r.into_components());
            }
        }
    }
    report.push(chk.finish());
    report
}

/// Antisymmetry and pointwise Jacobi of a fibrewise bracket.
pub fn verify_fibrewise_bracket(h: &FibrewiseBracket) -> Report {
    let bundle = h.bundle();
    let mut report = Report::new("fibrewise bracket");
    report.push(antisymmetry_check(bundle, &h.structure));
    let mut chk = CheckBuilder::new("jacobi", bundle);
    let r = h.rank();
    for i in 0..r {
        for j in (i + 1)..r {
            for k in (j + 1)..r {
                let (ei, ej, ek) = (bundle.basis(i), bundle.basis(j), bundle.basis(k));
                let res = h.apply(&h.apply(&ei, &ej), &ek)
                    + h.apply(&h.apply(&ej, &ek), &ei)
                    + h.apply(&h.apply(&ek, &ei), &ej);
                chk.record(|| triple_label(bundle, i, j, k), res.into_components());
            }
        }
    }
    report.push(chk.finish());
    report
}

/// The tangent algebroid: frame `d_<coord>`, identity anchor, zero bracket.
pub fn tangent_algebroid(patch: &CoordinatePatch) -> LieAlgebroid {
    let n = patch.dimension();
    let anchor = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { ScalarExpr::one() } else { ScalarExpr::zero() })
                .collect()
        })
        .collect();
    LieAlgebroid::new(VectorBundle::tangent(patch.clone()), anchor, zero_table(n)).expect("square identity anchor")
}

/// The action algebroid `M × g` for structure constants `c[a][b][c]` and
/// an action `e_a ↦ fields[a]`. Both the Lie algebra axioms of the
/// constants and the action identity `[ρ_a, ρ_b] = c^c_ab ρ_c` are checked.
pub fn action_algebroid(
    bundle: VectorBundle,
    constants: &[Vec<Vec<BigRational>>],
    fields: Vec<VectorField>,
) -> Result<LieAlgebroid, AlgebroidError> {
    let h = FibrewiseBracket::constant(bundle.clone(), constants)?;
    expect_len("action fields", bundle.rank(), fields.len())?;
    let n = bundle.patch().dimension();
    let mut anchor = Vec::with_capacity(fields.len());
    for f in fields {
        expect_len("action field", n, f.dimension())?;
        anchor.push(f.components().to_vec());
    }
    let alg = LieAlgebroid::new(bundle, anchor, h.structure.clone())?;
    let mut report = verify_fibrewise_bracket(&h);
    report.subject = "action algebroid".into();
    let axioms = verify_algebroid(&alg);
    report.push(axioms.check("anchor compatibility").cloned().expect("named check"));
    if report.passed() {
        Ok(alg)
    } else {
        Err(AlgebroidError::InvalidAction(report))
    }
}

/// Check that `K: E → F` is a Lie algebroid morphism over the identity:
/// `ρ_F ∘ K = ρ_E` and `K[e_a, e_b]_E = [K e_a, K e_b]_F` on frames.
pub fn verify_morphism(k: &BundleMorphism, e: &LieAlgebroid, f: &LieAlgebroid) -> Result<Report, AlgebroidError> {
    if k.source() != e.bundle() || k.target() != f.bundle() {
        return Err(AlgebroidError::BundleMismatch(
            "morphism source/target differ from the algebroids' bundles".into(),
        ));
    }
    let eb = e.bundle();
    let tangent = VectorBundle::tangent(e.patch().clone());
    let mut report = Report::new("morphism");
    let mut chk = CheckBuilder::new("anchor", &tangent);
    for a in 0..e.rank() {
        let r = f.anchor_of(&k.column(a)).sub(&e.anchor_field(a));
        chk.record(|| eb.frame()[a].clone(), r.components().to_vec());
    }
    report.push(chk.finish());
    let mut chk = CheckBuilder::new("bracket", f.bundle());
    for a in 0..e.rank() {
        for b in (a + 1)..e.rank() {
            let lhs = k.apply_unchecked(e.structure_function(a, b));
            let rhs = f.bracket_unchecked(&k.column(a), &k.column(b));
            chk.record(|| pair_label(eb, a, b), (lhs - rhs).into_components());
        }
    }
    report.push(chk.finish());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::parse_expr;

    fn p3() -> CoordinatePatch {
        CoordinatePatch::standard(3)
    }

    fn e(s: &str) -> ScalarExpr {
        parse_expr(s, &p3()).unwrap()
    }

    fn sec(cs: &[&str]) -> Section {
        Section::new(cs.iter().map(|s| e(s)).collect())
    }

    fn so3_constants() -> Vec<Vec<Vec<BigRational>>> {
        let q = |n: i64| BigRational::from_integer(n.into());
        let mut c = vec![vec![vec![q(0); 3]; 3]; 3];
        for (a, b, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            c[a][b][k] = q(1);
            c[b][a][k] = q(-1);
        }
        c
    }

    fn rotations() -> Vec<VectorField> {
        [["0", "x3", "-x2"], ["-x3", "0", "x1"], ["x2", "-x1", "0"]]
            .iter()
            .map(|cs| VectorField::new(&p3(), cs.iter().map(|s| e(s)).collect()).unwrap())
            .collect()
    }

    fn so3() -> LieAlgebroid {
        action_algebroid(VectorBundle::with_rank(p3(), "e", 3), &so3_constants(), rotations()).unwrap()
    }

    #[test]
    fn extend_bracket_examples() {
        let a = so3();
        let b = a.bundle().clone();
        assert_eq!(a.bracket(&b.basis(0), &b.basis(1)).unwrap(), b.basis(2));
        // ρ(e3)(x1) = x2 with the right-action anchor
        let got = a.bracket(&b.basis(2), &sec(&["0", "x1", "0"])).unwrap();
        assert_eq!(got, sec(&["-x1", "x2", "0"]));

        let p1 = CoordinatePatch::standard(1);
        let line = LieAlgebroid::new(
            VectorBundle::with_rank(p1.clone(), "e", 1),
            vec![vec![ScalarExpr::one()]],
            zero_table(1),
        )
        .unwrap();
        let x1e = Section::new(vec![ScalarExpr::var(0)]);
        assert_eq!(line.bracket(&Section::basis(1, 0), &x1e).unwrap(), Section::basis(1, 0));
    }

    #[test]
    fn verify_examples() {
        assert!(verify_algebroid(&tangent_algebroid(&p3())).passed());
        assert!(verify_algebroid(&so3()).passed());
        let mut bad = so3();
        bad.set_structure_function(0, 1, sec(&["1", "0", "0"]));
        bad.set_structure_function(1, 0, sec(&["-1", "0", "0"]));
        let r = verify_algebroid(&bad);
        // the mutated constants are not a Lie algebra either
        assert_eq!(r.failing(), vec!["anchor compatibility", "jacobi"]);
        // residual ρ(e1) − [ρ1, ρ2] = ρ(e1) − ρ(e3)
        let res = &r.check("anchor compatibility").unwrap().residuals[0];
        let expected = rotations()[0].sub(&rotations()[2]);
        assert_eq!(res.components, expected.components());
    }

    #[test]
    fn action_algebroid_validation() {
        let b = VectorBundle::with_rank(p3(), "e", 3);
        let trivial = action_algebroid(b.clone(), &so3_constants(), vec![VectorField::zero(3); 3]).unwrap();
        assert!(trivial.anchor_is_zero());
        // the left-action generators realize the opposite algebra
        let left: Vec<VectorField> = rotations().iter().map(|f| f.scale(&ScalarExpr::integer(-1))).collect();
        assert!(matches!(
            action_algebroid(b, &so3_constants(), left),
            Err(AlgebroidError::InvalidAction(_))
        ));
        let t = tangent_algebroid(&CoordinatePatch::standard(1));
        assert_eq!(t.rank(), 1);
        assert!(t.anchor_field(0).components()[0].is_one());
    }

    #[test]
    fn tangent_leibniz() {
        let t = tangent_algebroid(&p3());
        let got = t.bracket(&t.bundle().basis(0), &sec(&["0", "x1", "0"])).unwrap();
        assert_eq!(got, t.bundle().basis(1));
    }

    #[test]
    fn morphisms() {
        let a = so3();
        let t = tangent_algebroid(&p3());
        let k = BundleMorphism::from_columns(
            a.bundle().clone(),
            t.bundle().clone(),
            rotations().iter().map(VectorField::as_section).collect(),
        )
        .unwrap();
        assert!(verify_morphism(&k, &a, &t).unwrap().passed());
        assert_eq!(k.apply(&a.bundle().basis(0)).unwrap(), sec(&["0", "x3", "-x2"]));

        let bla = LieAlgebroid::from_fibrewise(&a.fibrewise());
        let zero = BundleMorphism::zero(bla.bundle().clone(), t.bundle().clone());
        assert!(verify_morphism(&zero, &bla, &t).unwrap().passed());

        let abelian = LieAlgebroid::abelian(a.bundle().clone());
        let id = BundleMorphism::identity(a.bundle().clone());
        let r = verify_morphism(&id, &bla, &abelian).unwrap();
        assert_eq!(r.failing(), vec!["bracket"]);
        assert!(verify_morphism(&id, &a, &t).is_err());
    }

    #[test]
    fn fibrewise_examples() {
        let b = VectorBundle::with_rank(p3(), "e", 3);
        assert!(verify_fibrewise_bracket(&FibrewiseBracket::zero(b.clone())).passed());
        assert!(verify_fibrewise_bracket(&so3().fibrewise()).passed());
        let mut h = FibrewiseBracket::zero(b);
        h.set_structure_function(0, 1, sec(&["0", "0", "x1"]));
        h.set_structure_function(1, 0, sec(&["0", "0", "-x1"]));
        assert!(verify_fibrewise_bracket(&h).passed());
        h.set_structure_function(0, 2, sec(&["1", "0", "0"]));
        h.set_structure_function(2, 0, sec(&["-1", "0", "0"]));
        let r = verify_fibrewise_bracket(&h);
        assert_eq!(r.failing(), vec!["jacobi"]);
    }
}
