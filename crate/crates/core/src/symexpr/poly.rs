//! Sparse multivariate polynomials over ℚ with graded-lex ordering.
//!
//! Variables are addressed by index. Exponent vectors are stored with
//! trailing zeros trimmed, so a polynomial over `x1, x2` is also a valid
//! polynomial over `x1, x2, x3` without any conversion.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exponent vector, trailing zeros trimmed.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn new(mut exps: Vec<u32>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        Monomial(exps)
    }

    pub fn var(i: usize) -> Self {
        let mut e = vec![0; i + 1];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let n = self.0.len().max(other.0.len());
        let e = (0..n).map(|i| self.exponent(i) + other.exponent(i)).collect();
        Monomial::new(e)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if other.0.len() > self.0.len() {
            return None;
        }
        let mut e = self.0.clone();
        for (i, &o) in other.0.iter().enumerate() {
            if e[i] < o {
                return None;
            }
            e[i] -= o;
        }
        Some(Monomial::new(e))
    }

    fn with_exponent(&self, i: usize, value: u32) -> Monomial {
        let mut e = self.0.clone();
        if e.len() <= i {
            e.resize(i + 1, 0);
        }
        e[i] = value;
        Monomial::new(e)
    }
}

/// Graded lexicographic: total degree first, then lex with `x1 > x2 > ...`.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn integer(n: i64) -> Self {
        Poly::constant(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn var(i: usize) -> Self {
        Poly::term(Monomial::var(i), BigRational::one())
    }

    pub fn term(m: Monomial, c: BigRational) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.iter().next().is_some_and(|(m, c)| m.is_one() && c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        if self.is_zero() {
            Some(BigRational::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in descending monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter().rev()
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Number of variable slots any term uses.
    pub fn width(&self) -> usize {
        self.terms.keys().map(|m| m.0.len()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    fn min_var(&self) -> Option<usize> {
        self.terms.keys().filter_map(|m| m.0.iter().position(|&e| e > 0)).min()
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, s: &BigRational) -> Poly {
        if s.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    fn mul_term(&self, m: &Monomial, c: &BigRational) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(mm, cc)| (mm.mul(m), cc * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn derivative(&self, v: usize) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e > 0 {
                let nm = m.with_exponent(v, e - 1);
                out.add_term(nm, c * BigRational::from_integer(BigInt::from(e)));
            }
        }
        out
    }

    /// Scale so the leading coefficient is one.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some((_, lc)) => {
                let inv = lc.recip();
                self.scale(&inv)
            }
        }
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (ld_m, ld_c) = d.leading()?;
        if let Some(c) = d.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((lm, lc)) = rem.leading() {
            let m = lm.div(ld_m)?;
            let c = lc / ld_c;
            rem = rem.sub(&d.mul_term(&m, &c));
            quot.add_term(m, c);
        }
        Some(quot)
    }

    /// Coefficients of `self` viewed as a univariate polynomial in `v`,
    /// indexed by power of `v`.
    fn coefficients_in(&self, v: usize) -> Vec<Poly> {
        let deg = self.degree_in(v) as usize;
        let mut out = vec![Poly::zero(); deg + 1];
        for (m, c) in &self.terms {
            let e = m.exponent(v) as usize;
            out[e].add_term(m.with_exponent(v, 0), c.clone());
        }
        out
    }

    fn leading_coefficient_in(&self, v: usize) -> Poly {
        self.coefficients_in(v).pop().unwrap_or_default()
    }

    fn content_in(&self, v: usize) -> Poly {
        let mut g = Poly::zero();
        for c in self.coefficients_in(v) {
            if c.is_zero() {
                continue;
            }
            g = gcd(&g, &c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    fn primitive_part_in(&self, v: usize) -> Poly {
        let c = self.content_in(v);
        if c.is_zero() {
            return Poly::zero();
        }
        self.div_exact(&c).expect("content divides its polynomial")
    }

    /// Pseudo-remainder `prem(self, g) = lc(g)^(δ+1) self mod g` in variable
    /// `v`, where `δ = deg self − deg g`.
    fn pseudo_rem(&self, g: &Poly, v: usize) -> Poly {
        let dg = g.degree_in(v);
        let df = self.degree_in(v);
        if df < dg {
            return self.clone();
        }
        let lc = g.leading_coefficient_in(v);
        let mut r = self.clone();
        let mut steps = 0;
        while !r.is_zero() && r.degree_in(v) >= dg {
            let dr = r.degree_in(v);
            let lr = r.leading_coefficient_in(v);
            let shift = Poly::term(Monomial::var(v), BigRational::one()).pow(dr - dg);
            r = lc.mul(&r).sub(&lr.mul(&shift).mul(g));
            steps += 1;
        }
        r.mul(&lc.pow(df - dg + 1 - steps))
    }

    /// Substitute `point[i]` for every variable except `keep`.
    fn specialize(&self, keep: usize, point: &[BigRational]) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if i != keep && e > 0 {
                    t *= num_traits::pow(point[i].clone(), e as usize);
                }
            }
            let mut exps = vec![0; keep + 1];
            exps[keep] = m.exponent(keep);
            out.add_term(Monomial::new(exps), t);
        }
        out
    }

    /// Evaluate at rational values; variables beyond `point` read as zero.
    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    let x = point.get(i).cloned().unwrap_or_else(BigRational::zero);
                    t *= num_traits::pow(x, e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Render with the given variable names.
    pub fn render(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || m.is_one() {
                factors.push(abs.to_string());
            }
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let name = names.get(i).cloned().unwrap_or_else(|| format!("x{}", i + 1));
                if e == 1 {
                    factors.push(name);
                } else {
                    factors.push(format!("{name}^{e}"));
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&[]))
    }
}

/// Greatest common divisor, normalized to leading coefficient one.
/// `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a == b {
        return a.monic();
    }
    let v = match (a.min_var(), b.min_var()) {
        (Some(x), Some(y)) => x.min(y),
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => return Poly::one(),
    };
    let ca = a.content_in(v);
    let cb = b.content_in(v);
    let c = gcd(&ca, &cb);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let g = if pa.degree_in(v) == 0 || pb.degree_in(v) == 0 || image_coprime(&pa, &pb, v) {
        Poly::one()
    } else {
        subresultant_prs(pa, pb, v)
    };
    c.mul(&g).monic()
}

/// True when some specialization of the other variables keeps both leading
/// coefficients in `v` and has a constant gcd. The degree in `v` of the true
/// gcd is bounded by that of any such image, so primitive inputs are then
/// coprime. A `false` answer proves nothing.
fn image_coprime(a: &Poly, b: &Poly, v: usize) -> bool {
    let width = a.width().max(b.width());
    if (0..width).all(|i| i == v || (a.degree_in(i) == 0 && b.degree_in(i) == 0)) {
        return false;
    }
    let (la, lb) = (a.leading_coefficient_in(v), b.leading_coefficient_in(v));
    for attempt in 0..4i64 {
        let point: Vec<BigRational> = (0..width as i64)
            .map(|i| BigRational::from_integer(BigInt::from(2 + i * 3 + attempt * 7)))
            .collect();
        if la.eval(&point).is_zero() || lb.eval(&point).is_zero() {
            continue;
        }
        return gcd(&a.specialize(v, &point), &b.specialize(v, &point)).degree_in(v) == 0;
    }
    false
}

/// Gcd of two polynomials primitive in `v`, by the subresultant remainder
/// sequence.
fn subresultant_prs(a: Poly, b: Poly, v: usize) -> Poly {
    let (mut f, mut g) = if a.degree_in(v) >= b.degree_in(v) {
        (a, b)
    } else {
        (b, a)
    };
    let mut lc = Poly::one();
    let mut h = Poly::one();
    loop {
        let delta = f.degree_in(v) - g.degree_in(v);
        let r = f.pseudo_rem(&g, v);
        if r.is_zero() {
            return g.primitive_part_in(v).monic();
        }
        if r.degree_in(v) == 0 {
            return Poly::one();
        }
        let divisor = lc.mul(&h.pow(delta));
        f = g;
        g = r.div_exact(&divisor).expect("subresultant divisor is exact");
        lc = f.leading_coefficient_in(v);
        h = if delta == 0 {
            h
        } else {
            lc.pow(delta)
                .div_exact(&h.pow(delta - 1))
                .expect("subresultant scale is exact")
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Poly {
        Poly::var(i)
    }

    #[test]
    fn grlex_order() {
        // x1^2 > x1*x2 > x2^2 > x1 > x2 > 1
        let ms = [
            Monomial::new(vec![2]),
            Monomial::new(vec![1, 1]),
            Monomial::new(vec![0, 2]),
            Monomial::new(vec![1]),
            Monomial::new(vec![0, 1]),
            Monomial::one(),
        ];
        for w in ms.windows(2) {
            assert!(w[0] > w[1], "{:?} > {:?}", w[0], w[1]);
        }
    }

    #[test]
    fn exact_division() {
        let a = x(0).mul(&x(0)).sub(&Poly::one());
        let b = x(0).sub(&Poly::one());
        assert_eq!(a.div_exact(&b), Some(x(0).add(&Poly::one())));
        assert_eq!(x(0).div_exact(&x(1)), None);
    }

    #[test]
    fn gcd_univariate_and_multivariate() {
        let a = x(0).mul(&x(0)).sub(&Poly::one());
        let b = x(0).sub(&Poly::one());
        assert_eq!(gcd(&a, &b), b);

        // (x1 + x2)(x1 - x3) and (x1 + x2)(x2 + 2)
        let common = x(0).add(&x(1));
        let p = common.mul(&x(0).sub(&x(2)));
        let q = common.mul(&x(1).add(&Poly::integer(2)));
        assert_eq!(gcd(&p, &q), common);

        // coprime
        assert!(gcd(&x(0), &x(1)).is_one());
        assert_eq!(
            gcd(&Poly::zero(), &x(1).scale(&BigRational::from_integer(3.into()))),
            x(1)
        );
    }

    #[test]
    fn gcd_with_content() {
        // x2*(x1 + 1) and x2^2*(x1 - 1)
        let p = x(1).mul(&x(0).add(&Poly::one()));
        let q = x(1).mul(&x(1)).mul(&x(0).sub(&Poly::one()));
        assert_eq!(gcd(&p, &q), x(1));
    }

    #[test]
    fn gcd_of_products_in_three_variables() {
        let common = x(0).add(&x(1).mul(&x(2)));
        let p = common.mul(&x(0).pow(2).sub(&x(2))).mul(&x(2));
        let q = common.mul(&x(0).mul(&x(1)).add(&Poly::one())).mul(&x(2).pow(2));
        assert_eq!(gcd(&p, &q), common.mul(&x(2)).monic());
        let r = x(0)
            .mul(&x(1))
            .add(&Poly::integer(15))
            .mul(&x(2).pow(2).sub(&Poly::one()));
        assert!(gcd(&r, &x(0).pow(2).sub(&x(1).pow(2)).add(&Poly::integer(3))).is_one());
    }

    #[test]
    fn pseudo_remainder_scales_by_full_power() {
        // prem(x^3, 2x) = 2^3 x^3 mod 2x = 0; prem(x^3 + 1, 2x) = 8
        let g = x(0).scale(&BigRational::from_integer(2.into()));
        assert!(x(0).pow(3).pseudo_rem(&g, 0).is_zero());
        assert_eq!(x(0).pow(3).add(&Poly::one()).pseudo_rem(&g, 0), Poly::integer(8));
    }

    #[test]
    fn render_terms() {
        let names: Vec<String> = vec!["x1".into(), "x2".into()];
        let p = x(0)
            .mul(&x(1))
            .scale(&BigRational::from_integer(2.into()))
            .sub(&x(1).pow(2))
            .add(&Poly::constant(BigRational::new(1.into(), 2.into())));
        assert_eq!(p.render(&names), "2*x1*x2 - x2^2 + 1/2");
    }
}
