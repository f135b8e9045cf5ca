//! Noncommutative polynomials in the generators `X`, `Y`, `Z`, `V`, and
//! cyclic words with their cyclic derivatives.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::qcore::{format_scalar, ExactScalar};

pub use crate::operators::Operator as Gen;

pub type Word = Vec<Gen>;

/// Element of the free algebra (`cyclic == false`) or of its quotient by
/// commutators (`cyclic == true`), where words are identified up to
/// rotation and stored as their least rotation.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct NCPoly {
    terms: BTreeMap<Word, ExactScalar>,
    cyclic: bool,
}

/// Lexicographically least rotation of `w`.
pub fn canonical_rotation(w: &[Gen]) -> Word {
    (0..w.len().max(1))
        .map(|s| {
            let mut r = w[s.min(w.len())..].to_vec();
            r.extend_from_slice(&w[..s.min(w.len())]);
            r
        })
        .min()
        .unwrap_or_default()
}

impl NCPoly {
    pub fn zero() -> Self {
        NCPoly::default()
    }

    pub fn zero_cyclic() -> Self {
        NCPoly { terms: BTreeMap::new(), cyclic: true }
    }

    /// Single term `c * w`.
    pub fn monomial(w: &[Gen], c: ExactScalar) -> Self {
        let mut p = NCPoly::zero();
        p.add_term(w, c);
        p
    }

    /// Constant `c` (empty word).
    pub fn constant(c: ExactScalar) -> Self {
        NCPoly::monomial(&[], c)
    }

    pub fn generator(g: Gen) -> Self {
        NCPoly::monomial(&[g], ExactScalar::from_integer(1.into()))
    }

    pub fn is_cyclic(&self) -> bool {
        self.cyclic
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &ExactScalar)> {
        self.terms.iter()
    }

    /// Coefficient of `w` (rotated to canonical form for cyclic elements).
    pub fn coeff(&self, w: &[Gen]) -> ExactScalar {
        let key = if self.cyclic { canonical_rotation(w) } else { w.to_vec() };
        self.terms.get(&key).cloned().unwrap_or_else(ExactScalar::zero)
    }

    pub fn add_term(&mut self, w: &[Gen], c: ExactScalar) {
        if c.is_zero() {
            return;
        }
        let key = if self.cyclic { canonical_rotation(w) } else { w.to_vec() };
        let slot = self.terms.entry(key.clone()).or_insert_with(ExactScalar::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    /// Image in the cyclic quotient.
    pub fn to_cyclic(&self) -> NCPoly {
        let mut out = NCPoly::zero_cyclic();
        for (w, c) in &self.terms {
            out.add_term(w, c.clone());
        }
        out
    }

    fn check_same_kind(&self, o: &NCPoly) -> Result<()> {
        if self.cyclic != o.cyclic {
            return Err(Error::InvalidParams("mixing cyclic and ordinary polynomials".into()));
        }
        Ok(())
    }

    pub fn add(&self, o: &NCPoly) -> Result<NCPoly> {
        self.check_same_kind(o)?;
        let mut out = self.clone();
        for (w, c) in &o.terms {
            out.add_term(w, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, o: &NCPoly) -> Result<NCPoly> {
        self.add(&o.scale(&-ExactScalar::from_integer(1.into())))
    }

    pub fn scale(&self, s: &ExactScalar) -> NCPoly {
        let mut out = NCPoly { terms: BTreeMap::new(), cyclic: self.cyclic };
        if !s.is_zero() {
            for (w, c) in &self.terms {
                out.terms.insert(w.clone(), c * s);
            }
        }
        out
    }

    /// Product by word concatenation; only defined in the free algebra.
    pub fn mul(&self, o: &NCPoly) -> Result<NCPoly> {
        if self.cyclic || o.cyclic {
            return Err(Error::InvalidParams("cyclic words have no product".into()));
        }
        let mut out = NCPoly::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &o.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                out.add_term(&w, c1 * c2);
            }
        }
        Ok(out)
    }

    /// Cyclic derivative: each occurrence of `g` in a cyclic word
    /// `[x_1 ... x_r]` at position `s` contributes the word
    /// `x_{s+1} ... x_r x_1 ... x_{s-1}`.
    pub fn cyclic_derivative(&self, g: Gen) -> Result<NCPoly> {
        if !self.cyclic {
            return Err(Error::InvalidParams("cyclic derivative needs a cyclic element".into()));
        }
        let mut out = NCPoly::zero();
        for (w, c) in &self.terms {
            for (s, x) in w.iter().enumerate() {
                if *x == g {
                    let mut d = w[s + 1..].to_vec();
                    d.extend_from_slice(&w[..s]);
                    out.add_term(&d, c.clone());
                }
            }
        }
        Ok(out)
    }

    /// Evaluates at square matrices; the empty word is the identity.
    pub fn evaluate(&self, dim: usize, gen: impl Fn(Gen) -> Matrix) -> Matrix {
        let mut cache: BTreeMap<Gen, Matrix> = BTreeMap::new();
        let mut out = Matrix::zeros(dim, dim);
        for (w, c) in &self.terms {
            let mut m = Matrix::identity(dim);
            for g in w {
                let gm = cache.entry(*g).or_insert_with(|| gen(*g));
                m = m.mul(gm);
            }
            out = out.axpy(c, &m);
        }
        out
    }
}

impl fmt::Display for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})", format_scalar(c))?;
            if self.cyclic {
                write!(f, "[")?;
            }
            for g in w {
                write!(f, "{}", g.name())?;
            }
            if self.cyclic {
                write!(f, "]")?;
            }
        }
        Ok(())
    }
}

/// Shorthand for building polynomials from `(coefficient, word)` pairs.
pub fn poly(terms: &[(ExactScalar, &[Gen])]) -> NCPoly {
    let mut p = NCPoly::zero();
    for (c, w) in terms {
        p.add_term(w, c.clone());
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{int, ratio};
    use Gen::{V, X, Y, Z};

    #[test]
    fn rotation_canonical() {
        assert_eq!(canonical_rotation(&[Z, X, Y]), alloc::vec![X, Y, Z]);
        assert_eq!(canonical_rotation(&[]), Word::new());
        let mut p = NCPoly::zero_cyclic();
        p.add_term(&[Y, Z, X], int(2));
        assert_eq!(p.coeff(&[X, Y, Z]), int(2));
        assert_eq!(p.coeff(&[Z, X, Y]), int(2));
    }

    #[test]
    fn derivative_examples() {
        let xy = NCPoly::monomial(&[X, Y], int(1)).to_cyclic();
        assert_eq!(xy.cyclic_derivative(X).unwrap(), NCPoly::generator(Y));
        let x3 = NCPoly::monomial(&[X, X, X], int(1)).to_cyclic();
        assert_eq!(x3.cyclic_derivative(X).unwrap(), NCPoly::monomial(&[X, X], int(3)));
        let xyz = NCPoly::monomial(&[X, Y, Z], int(1)).to_cyclic();
        assert_eq!(xyz.cyclic_derivative(Y).unwrap(), NCPoly::monomial(&[Z, X], int(1)));
        assert!(xyz.cyclic_derivative(V).unwrap().is_zero());
    }

    #[test]
    fn zero_terms_dropped() {
        let mut p = NCPoly::monomial(&[X], int(1));
        p.add_term(&[X], int(-1));
        assert!(p.is_zero());
        assert!(NCPoly::monomial(&[Y], ratio(0, 1)).is_zero());
    }

    #[test]
    fn mixing_kinds_is_an_error() {
        let a = NCPoly::generator(X);
        assert!(a.add(&a.to_cyclic()).is_err());
        assert!(a.to_cyclic().mul(&a).is_err());
        assert!(a.cyclic_derivative(X).is_err());
    }

    #[test]
    fn evaluate_matches_products() {
        let x = Matrix::from_rows(alloc::vec![alloc::vec![int(1), int(2)], alloc::vec![int(0), int(3)]]);
        let z = Matrix::from_rows(alloc::vec![alloc::vec![int(0), int(1)], alloc::vec![int(1), int(0)]]);
        let p = poly(&[(int(1), &[X, Z]), (int(-2), &[Z, X]), (int(5), &[])]);
        let m = p.evaluate(2, |g| if g == X { x.clone() } else { z.clone() });
        let expect = x.mul(&z).sub(&z.mul(&x).scale(&int(2))).add(&Matrix::identity(2).scale(&int(5)));
        assert_eq!(m, expect);
    }
}
