//! Seeded generators of random polynomial data for the law suites.
//!
//! Degrees are capped by the `AGD_MAX_DEGREE` environment variable
//! (default 2). Every generator is a pure function of its seed, so a
//! failing case reproduces from the seed alone.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebroid::{LieAlgebroid, StructureTable};
use crate::geometry::{Section, VectorBundle, VectorField};
use crate::symexpr::{Monomial, Poly, ScalarExpr};

pub const DEFAULT_MAX_DEGREE: u32 = 2;

/// `AGD_MAX_DEGREE`, or the default when unset or unparsable.
pub fn max_degree() -> u32 {
    std::env::var("AGD_MAX_DEGREE")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_DEGREE)
}

pub struct Gen {
    rng: ChaCha8Rng,
    vars: usize,
    degree: u32,
}

impl Gen {
    /// Polynomials in `vars` variables up to [`max_degree`].
    pub fn new(seed: u64, vars: usize) -> Self {
        Gen::with_degree(seed, vars, max_degree())
    }

    pub fn with_degree(seed: u64, vars: usize, degree: u32) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            vars,
            degree,
        }
    }

    fn coefficient(&mut self) -> BigRational {
        let num = self.rng.gen_range(-5i64..=5);
        let den = self.rng.gen_range(1i64..=3);
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn monomial(&mut self) -> Monomial {
        let total = self.rng.gen_range(0..=self.degree);
        let mut exps = vec![0u32; self.vars];
        for _ in 0..total {
            if self.vars > 0 {
                exps[self.rng.gen_range(0..self.vars)] += 1;
            }
        }
        Monomial::new(exps)
    }

    /// Up to four terms; may be zero.
    pub fn poly(&mut self) -> Poly {
        let terms = self.rng.gen_range(0..=4);
        (0..terms).fold(Poly::zero(), |acc, _| {
            let (m, c) = (self.monomial(), self.coefficient());
            acc.add(&Poly::term(m, c))
        })
    }

    pub fn expr(&mut self) -> ScalarExpr {
        ScalarExpr::from_poly(self.poly())
    }

    /// A quotient with a nonzero denominator.
    pub fn fraction(&mut self) -> ScalarExpr {
        let num = self.poly();
        loop {
            let den = self.poly();
            if let Some(q) = ScalarExpr::from_fraction(num.clone(), den) {
                return q;
            }
        }
    }

    pub fn section(&mut self, rank: usize) -> Section {
        Section::new((0..rank).map(|_| self.expr()).collect())
    }

    pub fn field(&mut self) -> VectorField {
        VectorField::from_components((0..self.vars).map(|_| self.expr()).collect())
    }

    /// An algebroid on `bundle` with random anchor and structure functions;
    /// in general not a Lie algebroid.
    pub fn algebroid(&mut self, bundle: VectorBundle) -> LieAlgebroid {
        let r = bundle.rank();
        let anchor = (0..r).map(|_| (0..self.vars).map(|_| self.expr()).collect()).collect();
        let mut table: StructureTable = vec![vec![Section::zero(r); r]; r];
        for a in 0..r {
            for b in (a + 1)..r {
                let s = self.section(r);
                table[b][a] = -&s;
                table[a][b] = s;
            }
        }
        LieAlgebroid::new(bundle, anchor, table).expect("shapes match")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_reproduce() {
        let (mut a, mut b) = (Gen::with_degree(7, 3, 2), Gen::with_degree(7, 3, 2));
        for _ in 0..10 {
            assert_eq!(a.fraction(), b.fraction());
        }
    }

    #[test]
    fn degree_cap_holds() {
        let mut g = Gen::with_degree(1, 3, 2);
        for _ in 0..50 {
            assert!(g.poly().total_degree() <= 2);
        }
    }
}
