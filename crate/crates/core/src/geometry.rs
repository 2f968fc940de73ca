//! Vector bundles over one coordinate patch, their sections in the declared
//! frame, vector fields and bundle morphisms.

use std::ops::{Add, Neg, Sub};

use thiserror::Error;

use crate::symexpr::{is_identifier, CoordinatePatch, ScalarExpr};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("{what}: expected {expected} components, found {found}")]
    Shape {
        what: String,
        expected: usize,
        found: usize,
    },
    #[error("patch mismatch: {0}")]
    PatchMismatch(String),
    #[error("frame name `{0}` is invalid or repeated")]
    FrameName(String),
}

pub(crate) fn expect_len(what: &str, expected: usize, found: usize) -> Result<(), GeometryError> {
    if expected == found {
        Ok(())
    } else {
        Err(GeometryError::Shape {
            what: what.to_string(),
            expected,
            found,
        })
    }
}

/// A trivialized vector bundle: a patch, a rank and names for the frame.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VectorBundle {
    patch: CoordinatePatch,
    frame: Vec<String>,
}

impl VectorBundle {
    pub fn new<S: Into<String>>(
        patch: CoordinatePatch,
        frame: impl IntoIterator<Item = S>,
    ) -> Result<Self, GeometryError> {
        let frame: Vec<String> = frame.into_iter().map(Into::into).collect();
        for (i, n) in frame.iter().enumerate() {
            if !is_identifier(n) || frame[..i].contains(n) {
                return Err(GeometryError::FrameName(n.clone()));
            }
        }
        Ok(VectorBundle { patch, frame })
    }

    /// Frame `prefix1, ..., prefix{rank}`.
    pub fn with_rank(patch: CoordinatePatch, prefix: &str, rank: usize) -> Self {
        VectorBundle::new(patch, (1..=rank).map(|i| format!("{prefix}{i}")))
            .expect("generated names are distinct identifiers")
    }

    /// The tangent bundle with frame `d_<coordinate>`.
    pub fn tangent(patch: CoordinatePatch) -> Self {
        let frame: Vec<String> = patch.names().iter().map(|n| format!("d_{n}")).collect();
        VectorBundle::new(patch, frame).expect("coordinate names are distinct")
    }

    pub fn patch(&self) -> &CoordinatePatch {
        &self.patch
    }

    pub fn rank(&self) -> usize {
        self.frame.len()
    }

    pub fn frame(&self) -> &[String] {
        &self.frame
    }

    pub fn frame_index(&self, name: &str) -> Option<usize> {
        self.frame.iter().position(|n| n == name)
    }

    pub fn zero(&self) -> Section {
        Section::zero(self.rank())
    }

    /// The `a`-th frame section.
    pub fn basis(&self, a: usize) -> Section {
        Section::basis(self.rank(), a)
    }

    pub fn section(&self, components: Vec<ScalarExpr>) -> Result<Section, GeometryError> {
        expect_len("section", self.rank(), components.len())?;
        Ok(Section(components))
    }

    /// Print a component vector as a combination of frame names, e.g.
    /// `x1*e3 - e1`.
    pub fn render_components(&self, comps: &[ScalarExpr]) -> String {
        let mut out = String::new();
        for (i, c) in comps.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let name = self.frame.get(i).cloned().unwrap_or_else(|| format!("#{}", i + 1));
            let mut text = c.render(&self.patch);
            let negative = text.starts_with('-') && c.is_monomial_like();
            if negative {
                text.remove(0);
            }
            let term = if text == "1" {
                name
            } else if c.is_monomial_like() {
                format!("{text}*{name}")
            } else {
                format!("({text})*{name}")
            };
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            out.push_str(&term);
        }
        if out.is_empty() {
            "0".to_string()
        } else {
            out
        }
    }

    pub fn render(&self, s: &Section) -> String {
        self.render_components(s.components())
    }
}

/// Components of a section with respect to a bundle's frame.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Section(Vec<ScalarExpr>);

impl Section {
    pub fn new(components: Vec<ScalarExpr>) -> Self {
        Section(components)
    }

    pub fn zero(rank: usize) -> Self {
        Section(vec![ScalarExpr::zero(); rank])
    }

    pub fn basis(rank: usize, a: usize) -> Self {
        let mut s = Section::zero(rank);
        s.0[a] = ScalarExpr::one();
        s
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[ScalarExpr] {
        &self.0
    }

    pub fn into_components(self) -> Vec<ScalarExpr> {
        self.0
    }

    pub fn get(&self, i: usize) -> &ScalarExpr {
        &self.0[i]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(ScalarExpr::is_zero)
    }

    pub fn scale(&self, f: &ScalarExpr) -> Section {
        Section(self.0.iter().map(|c| c * f).collect())
    }

    /// `self + f * other`.
    pub fn add_scaled(&mut self, f: &ScalarExpr, other: &Section) {
        if f.is_zero() {
            return;
        }
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            if !b.is_zero() {
                *a = &*a + &(f * b);
            }
        }
    }

    /// Concatenate two component vectors (direct-sum sections).
    pub fn concat(&self, other: &Section) -> Section {
        Section(self.0.iter().chain(&other.0).cloned().collect())
    }

    /// Components `start..end`.
    pub fn slice(&self, start: usize, end: usize) -> Section {
        Section(self.0[start..end].to_vec())
    }

    /// Derivative of every component along a vector field.
    pub fn derive_along(&self, x: &VectorField) -> Section {
        Section(self.0.iter().map(|c| x.apply_unchecked(c)).collect())
    }
}

impl Add<&Section> for &Section {
    type Output = Section;
    fn add(self, rhs: &Section) -> Section {
        debug_assert_eq!(self.rank(), rhs.rank());
        Section(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub<&Section> for &Section {
    type Output = Section;
    fn sub(self, rhs: &Section) -> Section {
        debug_assert_eq!(self.rank(), rhs.rank());
        Section(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Section {
    type Output = Section;
    fn neg(self) -> Section {
        Section(self.0.iter().map(|a| -a).collect())
    }
}

macro_rules! section_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Section> for Section {
            type Output = Section;
            fn $m(self, rhs: Section) -> Section { (&self).$m(&rhs) }
        }
        impl $tr<&Section> for Section {
            type Output = Section;
            fn $m(self, rhs: &Section) -> Section { (&self).$m(rhs) }
        }
        impl $tr<Section> for &Section {
            type Output = Section;
            fn $m(self, rhs: Section) -> Section { self.$m(&rhs) }
        }
    )*};
}
section_owned!(Add add, Sub sub);

impl Neg for Section {
    type Output = Section;
    fn neg(self) -> Section {
        -&self
    }
}

/// `Σ X^i ∂/∂x^i` on a patch.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VectorField {
    components: Vec<ScalarExpr>,
}

impl VectorField {
    pub fn new(patch: &CoordinatePatch, components: Vec<ScalarExpr>) -> Result<Self, GeometryError> {
        expect_len("vector field", patch.dimension(), components.len())?;
        Ok(VectorField { components })
    }

    pub(crate) fn from_components(components: Vec<ScalarExpr>) -> Self {
        VectorField { components }
    }

    pub fn zero(dim: usize) -> Self {
        VectorField {
            components: vec![ScalarExpr::zero(); dim],
        }
    }

    /// `∂/∂x^i`.
    pub fn coordinate(dim: usize, i: usize) -> Self {
        let mut c = vec![ScalarExpr::zero(); dim];
        c[i] = ScalarExpr::one();
        VectorField { components: c }
    }

    pub fn dimension(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[ScalarExpr] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(ScalarExpr::is_zero)
    }

    pub fn as_section(&self) -> Section {
        Section(self.components.clone())
    }

    pub(crate) fn apply_unchecked(&self, f: &ScalarExpr) -> ScalarExpr {
        if f.is_constant() {
            return ScalarExpr::zero();
        }
        let mut acc = ScalarExpr::zero();
        for (i, xi) in self.components.iter().enumerate() {
            if !xi.is_zero() {
                let d = f.partial(i);
                if !d.is_zero() {
                    acc = acc + xi * &d;
                }
            }
        }
        acc
    }

    /// `𝔏_X(f) = Σ X^i ∂f/∂x^i`.
    pub fn apply(&self, patch: &CoordinatePatch, f: &ScalarExpr) -> Result<ScalarExpr, GeometryError> {
        expect_len("vector field", patch.dimension(), self.dimension())?;
        if f.width() > patch.dimension() {
            return Err(GeometryError::PatchMismatch(
                "function depends on coordinates outside the patch".into(),
            ));
        }
        Ok(self.apply_unchecked(f))
    }

    /// Commutator `[X, Y]^i = X(Y^i) - Y(X^i)`.
    pub fn bracket(&self, other: &VectorField) -> Result<VectorField, GeometryError> {
        expect_len("vector field bracket", self.dimension(), other.dimension())?;
        Ok(self.bracket_unchecked(other))
    }

    pub(crate) fn bracket_unchecked(&self, other: &VectorField) -> VectorField {
        let components = (0..self.dimension())
            .map(|i| self.apply_unchecked(&other.components[i]) - other.apply_unchecked(&self.components[i]))
            .collect();
        VectorField { components }
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        VectorField {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &VectorField) -> VectorField {
        VectorField {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, f: &ScalarExpr) -> VectorField {
        VectorField {
            components: self.components.iter().map(|c| c * f).collect(),
        }
    }
}

/// Free-function form of [`VectorField::apply`].
pub fn apply_vf(x: &VectorField, f: &ScalarExpr, patch: &CoordinatePatch) -> Result<ScalarExpr, GeometryError> {
    x.apply(patch, f)
}

/// Free-function form of [`VectorField::bracket`].
pub fn vf_bracket(x: &VectorField, y: &VectorField) -> Result<VectorField, GeometryError> {
    x.bracket(y)
}

/// A vector bundle map over the identity, stored as a
/// `target.rank() × source.rank()` matrix: `(Kμ)^α = K^α_a μ^a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleMorphism {
    source: VectorBundle,
    target: VectorBundle,
    matrix: Vec<Vec<ScalarExpr>>,
}

impl BundleMorphism {
    pub fn new(
        source: VectorBundle,
        target: VectorBundle,
        matrix: Vec<Vec<ScalarExpr>>,
    ) -> Result<Self, GeometryError> {
        if source.patch() != target.patch() {
            return Err(GeometryError::PatchMismatch(
                "morphism source and target live over different patches".into(),
            ));
        }
        expect_len("morphism rows", target.rank(), matrix.len())?;
        for row in &matrix {
            expect_len("morphism columns", source.rank(), row.len())?;
        }
        Ok(BundleMorphism { source, target, matrix })
    }

    /// Build from the images of the source frame sections.
    pub fn from_columns(
        source: VectorBundle,
        target: VectorBundle,
        columns: Vec<Section>,
    ) -> Result<Self, GeometryError> {
        expect_len("morphism columns", source.rank(), columns.len())?;
        for c in &columns {
            expect_len("morphism column", target.rank(), c.rank())?;
        }
        let matrix = (0..target.rank())
            .map(|alpha| columns.iter().map(|c| c.get(alpha).clone()).collect())
            .collect();
        BundleMorphism::new(source, target, matrix)
    }

    pub fn zero(source: VectorBundle, target: VectorBundle) -> Self {
        let matrix = vec![vec![ScalarExpr::zero(); source.rank()]; target.rank()];
        BundleMorphism::new(source, target, matrix).expect("shapes agree")
    }

    pub fn identity(bundle: VectorBundle) -> Self {
        let r = bundle.rank();
        let matrix = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| if i == j { ScalarExpr::one() } else { ScalarExpr::zero() })
                    .collect()
            })
            .collect();
        BundleMorphism::new(bundle.clone(), bundle, matrix).expect("square")
    }

    pub fn source(&self) -> &VectorBundle {
        &self.source
    }

    pub fn target(&self) -> &VectorBundle {
        &self.target
    }

    pub fn matrix(&self) -> &[Vec<ScalarExpr>] {
        &self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> &ScalarExpr {
        &self.matrix[row][col]
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().flatten().all(ScalarExpr::is_zero)
    }

    /// Image of the `a`-th source frame section.
    pub fn column(&self, a: usize) -> Section {
        Section(self.matrix.iter().map(|row| row[a].clone()).collect())
    }

    pub fn apply(&self, mu: &Section) -> Result<Section, GeometryError> {
        expect_len("morphism argument", self.source.rank(), mu.rank())?;
        Ok(self.apply_unchecked(mu))
    }

    pub(crate) fn apply_unchecked(&self, mu: &Section) -> Section {
        Section(
            self.matrix
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(mu.components())
                        .filter(|(k, m)| !k.is_zero() && !m.is_zero())
                        .map(|(k, m)| k * m)
                        .sum()
                })
                .collect(),
        )
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &BundleMorphism) -> Result<BundleMorphism, GeometryError> {
        expect_len("composition", self.source.rank(), other.target.rank())?;
        let cols = (0..other.source.rank())
            .map(|a| self.apply_unchecked(&other.column(a)))
            .collect();
        BundleMorphism::from_columns(other.source.clone(), self.target.clone(), cols)
    }

    pub fn sub(&self, other: &BundleMorphism) -> Result<BundleMorphism, GeometryError> {
        expect_len("difference rows", self.target.rank(), other.target.rank())?;
        expect_len("difference columns", self.source.rank(), other.source.rank())?;
        let matrix = self
            .matrix
            .iter()
            .zip(&other.matrix)
            .map(|(r1, r2)| r1.iter().zip(r2).map(|(a, b)| a - b).collect())
            .collect();
        BundleMorphism::new(self.source.clone(), self.target.clone(), matrix)
    }
}

/// Free-function form of [`BundleMorphism::apply`].
pub fn apply_morphism(k: &BundleMorphism, mu: &Section) -> Result<Section, GeometryError> {
    k.apply(mu)
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

    fn vf(cs: [&str; 3]) -> VectorField {
        VectorField::new(&p3(), cs.iter().map(|s| e(s)).collect()).unwrap()
    }

    #[test]
    fn apply_vector_fields() {
        assert_eq!(vf(["1", "0", "0"]).apply(&p3(), &e("x1^2")).unwrap(), e("2*x1"));
        // rotation generator kills the radius
        assert!(vf(["x2", "-x1", "0"])
            .apply(&p3(), &e("x1^2 + x2^2"))
            .unwrap()
            .is_zero());
        assert!(VectorField::zero(3).apply(&p3(), &e("x1*x3 + 7")).unwrap().is_zero());
    }

    #[test]
    fn brackets() {
        let d1 = VectorField::coordinate(3, 0);
        let d2 = VectorField::coordinate(3, 1);
        assert!(d1.bracket(&d2).unwrap().is_zero());
        assert_eq!(d1.bracket(&vf(["x1", "0", "0"])).unwrap(), d1);
        let r1 = vf(["0", "-x3", "x2"]);
        let r2 = vf(["x3", "0", "-x1"]);
        assert_eq!(r1.bracket(&r2).unwrap(), vf(["x2", "-x1", "0"]));
        assert!(d1.bracket(&VectorField::zero(2)).is_err());
    }

    #[test]
    fn morphisms() {
        let e3 = VectorBundle::with_rank(p3(), "e", 3);
        let t = VectorBundle::tangent(p3());
        let mu = Section::new(vec![e("x1"), e("1"), e("x2*x3")]);
        assert!(BundleMorphism::zero(e3.clone(), t.clone())
            .apply(&mu)
            .unwrap()
            .is_zero());
        assert_eq!(BundleMorphism::identity(e3.clone()).apply(&mu).unwrap(), mu);
        let rho = BundleMorphism::from_columns(
            e3.clone(),
            t,
            vec![
                vf(["0", "-x3", "x2"]).as_section(),
                vf(["x3", "0", "-x1"]).as_section(),
                vf(["-x2", "x1", "0"]).as_section(),
            ],
        )
        .unwrap();
        assert_eq!(rho.apply(&e3.basis(0)).unwrap(), vf(["0", "-x3", "x2"]).as_section());
        assert!(rho.apply(&Section::zero(2)).is_err());
    }

    #[test]
    fn render_sections() {
        let e3 = VectorBundle::with_rank(p3(), "e", 3);
        let s = Section::new(vec![e("-1"), e("0"), e("2*x1")]);
        assert_eq!(e3.render(&s), "-e1 + 2*x1*e3");
        let s = Section::new(vec![e("x1 + 1"), e("-x2"), e("0")]);
        assert_eq!(e3.render(&s), "(x1 + 1)*e1 - x2*e2");
        assert_eq!(e3.render(&e3.zero()), "0");
    }

    #[test]
    fn bundle_validation() {
        assert!(VectorBundle::new(p3(), ["e", "e"]).is_err());
        assert_eq!(VectorBundle::new(p3(), Vec::<String>::new()).unwrap().rank(), 0);
        assert_eq!(VectorBundle::tangent(p3()).frame()[1], "d_x2");
    }
}
