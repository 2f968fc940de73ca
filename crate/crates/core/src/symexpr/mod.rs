//! Exact rational functions of patch coordinates.
//!
//! Every coefficient in the workbench (anchors, structure functions,
//! Christoffel symbols, form components) is a [`ScalarExpr`]: a reduced
//! quotient of two polynomials over ℚ. Equality is structural equality of
//! canonical forms, so the zero test is a decision, not a tolerance.

mod parse;
pub mod poly;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

pub use parse::{parse_expr, ParseError};
pub use poly::{gcd, Monomial, Poly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PatchError {
    #[error("coordinate patch needs at least one coordinate")]
    Empty,
    #[error("duplicate coordinate name `{0}`")]
    DuplicateName(String),
    #[error("invalid coordinate name `{0}`")]
    InvalidName(String),
}

/// Local chart of the base manifold: an ordered list of coordinate names.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoordinatePatch {
    names: Vec<String>,
}

impl CoordinatePatch {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self, PatchError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(PatchError::Empty);
        }
        for (i, n) in names.iter().enumerate() {
            if !is_identifier(n) {
                return Err(PatchError::InvalidName(n.clone()));
            }
            if names[..i].contains(n) {
                return Err(PatchError::DuplicateName(n.clone()));
            }
        }
        Ok(CoordinatePatch { names })
    }

    /// `x1, ..., xn`.
    pub fn standard(n: usize) -> Self {
        CoordinatePatch::new((1..=n).map(|i| format!("x{i}"))).expect("n > 0")
    }

    pub fn dimension(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Whether `self`'s coordinates are a prefix of `other`'s.
    pub fn is_prefix_of(&self, other: &CoordinatePatch) -> bool {
        other.names.len() >= self.names.len() && other.names[..self.names.len()] == self.names[..]
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A rational function `numerator / denominator` in canonical form.
///
/// Invariants: numerator and denominator are coprime, the denominator is
/// nonzero with leading coefficient one under graded-lex order, and zero is
/// always `0 / 1`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ScalarExpr {
    num: Poly,
    den: Poly,
}

impl Default for ScalarExpr {
    fn default() -> Self {
        ScalarExpr::zero()
    }
}

impl ScalarExpr {
    pub fn zero() -> Self {
        ScalarExpr {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        ScalarExpr::from_poly(Poly::one())
    }

    pub fn integer(n: i64) -> Self {
        ScalarExpr::from_poly(Poly::integer(n))
    }

    pub fn rational(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        ScalarExpr::constant(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn constant(c: BigRational) -> Self {
        ScalarExpr::from_poly(Poly::constant(c))
    }

    /// The `i`-th coordinate function (zero-based).
    pub fn var(i: usize) -> Self {
        ScalarExpr::from_poly(Poly::var(i))
    }

    pub fn from_poly(p: Poly) -> Self {
        ScalarExpr {
            num: p,
            den: Poly::one(),
        }
    }

    /// Build `num / den` in canonical form; `None` if `den` is zero.
    pub fn from_fraction(num: Poly, den: Poly) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        Some(Self::canonical(num, den))
    }

    fn canonical(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return ScalarExpr::zero();
        }
        if let Some(c) = den.constant_value() {
            return ScalarExpr {
                num: num.scale(&c.recip()),
                den: Poly::one(),
            };
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        Self::normalized(num, den)
    }

    /// Scale a coprime pair so the denominator is monic.
    fn normalized(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return ScalarExpr::zero();
        }
        let lc = den.leading().map(|(_, c)| c.clone()).expect("nonzero");
        if lc.is_one() {
            ScalarExpr { num, den }
        } else {
            let inv = lc.recip();
            ScalarExpr {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    /// `(a/b)(c/d)` for coprime pairs, cancelling across.
    fn product(a: &Poly, b: &Poly, c: &Poly, d: &Poly) -> Self {
        let g1 = gcd(a, d);
        let g2 = gcd(c, b);
        let q = |p: &Poly, g: &Poly| p.div_exact(g).expect("gcd divides");
        Self::normalized(q(a, &g1).mul(&q(c, &g2)), q(b, &g2).mul(&q(d, &g1)))
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.den.is_one() && self.num.is_constant()
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    /// Number of coordinate slots this expression touches.
    pub fn width(&self) -> usize {
        self.num.width().max(self.den.width())
    }

    /// Exact derivative with respect to the `i`-th coordinate (zero-based).
    pub fn partial(&self, i: usize) -> ScalarExpr {
        if self.den.is_one() {
            return ScalarExpr::from_poly(self.num.derivative(i));
        }
        let dn = self.num.derivative(i);
        let dd = self.den.derivative(i);
        let g = gcd(&self.den, &dd);
        let q = |p: &Poly| p.div_exact(&g).expect("gcd divides");
        let num = dn.mul(&q(&self.den)).sub(&self.num.mul(&q(&dd)));
        Self::canonical(num, self.den.mul(&q(&self.den)))
    }

    /// `self / other`, `None` when `other` is zero.
    pub fn checked_div(&self, other: &ScalarExpr) -> Option<ScalarExpr> {
        if other.is_zero() {
            return None;
        }
        Some(Self::product(&self.num, &self.den, &other.den, &other.num))
    }

    pub fn pow(&self, e: u32) -> ScalarExpr {
        ScalarExpr {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    pub fn scale(&self, c: &BigRational) -> ScalarExpr {
        if c.is_zero() {
            return ScalarExpr::zero();
        }
        ScalarExpr {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Evaluate at a rational point; `None` on a pole.
    pub fn eval(&self, point: &[BigRational]) -> Option<BigRational> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(point) / d)
    }

    /// Render using the patch's coordinate names. The output re-parses to
    /// the same expression.
    pub fn render(&self, patch: &CoordinatePatch) -> String {
        self.render_names(patch.names())
    }

    pub fn render_names(&self, names: &[String]) -> String {
        let n = self.num.render(names);
        if self.den.is_one() {
            return n;
        }
        let d = self.den.render(names);
        let n = if self.num.num_terms() > 1 { format!("({n})") } else { n };
        let d = if self.den.num_terms() > 1 || d.contains('*') {
            format!("({d})")
        } else {
            d
        };
        format!("{n}/{d}")
    }

    /// True when the rendering of this expression is a single signed
    /// product, i.e. it needs no parentheses when used as a factor.
    pub(crate) fn is_monomial_like(&self) -> bool {
        self.den.is_one() && self.num.num_terms() <= 1
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_names(&[]))
    }
}

impl Add<&ScalarExpr> for &ScalarExpr {
    type Output = ScalarExpr;
    fn add(self, rhs: &ScalarExpr) -> ScalarExpr {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        if self.den == rhs.den {
            let num = self.num.add(&rhs.num);
            if self.den.is_one() {
                return ScalarExpr::from_poly(num);
            }
            return ScalarExpr::canonical(num, self.den.clone());
        }
        let g = gcd(&self.den, &rhs.den);
        if g.is_one() {
            let num = self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den));
            return ScalarExpr::normalized(num, self.den.mul(&rhs.den));
        }
        let q = |p: &Poly, g: &Poly| p.div_exact(g).expect("gcd divides");
        let (d1, d2) = (q(&self.den, &g), q(&rhs.den, &g));
        let t = self.num.mul(&d2).add(&rhs.num.mul(&d1));
        let g2 = gcd(&t, &g);
        ScalarExpr::normalized(q(&t, &g2), d1.mul(&q(&rhs.den, &g2)))
    }
}

impl Sub<&ScalarExpr> for &ScalarExpr {
    type Output = ScalarExpr;
    fn sub(self, rhs: &ScalarExpr) -> ScalarExpr {
        self + &(-rhs)
    }
}

impl Mul<&ScalarExpr> for &ScalarExpr {
    type Output = ScalarExpr;
    fn mul(self, rhs: &ScalarExpr) -> ScalarExpr {
        if self.is_zero() || rhs.is_zero() {
            return ScalarExpr::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return ScalarExpr::from_poly(self.num.mul(&rhs.num));
        }
        ScalarExpr::product(&self.num, &self.den, &rhs.num, &rhs.den)
    }
}

impl Neg for &ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        ScalarExpr {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<ScalarExpr> for ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, rhs: ScalarExpr) -> ScalarExpr { (&self).$m(&rhs) }
        }
        impl $tr<&ScalarExpr> for ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, rhs: &ScalarExpr) -> ScalarExpr { (&self).$m(rhs) }
        }
        impl $tr<ScalarExpr> for &ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, rhs: ScalarExpr) -> ScalarExpr { self.$m(&rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        -&self
    }
}

impl std::iter::Sum for ScalarExpr {
    fn sum<I: Iterator<Item = ScalarExpr>>(iter: I) -> Self {
        iter.fold(ScalarExpr::zero(), |a, b| a + b)
    }
}

impl From<i64> for ScalarExpr {
    fn from(n: i64) -> Self {
        ScalarExpr::integer(n)
    }
}

/// The zero test behind every identity check.
pub fn is_zero(e: &ScalarExpr) -> bool {
    e.is_zero()
}

/// `∂e/∂x_i` with a range check; `i` is zero-based.
pub fn partial(e: &ScalarExpr, i: usize, patch: &CoordinatePatch) -> Result<ScalarExpr, IndexError> {
    if i >= patch.dimension() {
        return Err(IndexError {
            index: i,
            dimension: patch.dimension(),
        });
    }
    Ok(e.partial(i))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("coordinate index {index} out of range for a {dimension}-dimensional patch")]
pub struct IndexError {
    pub index: usize,
    pub dimension: usize,
}
