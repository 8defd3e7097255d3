use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;

/// Sparse polynomial in m complex variables: a list of (coefficient,
/// exponent) terms.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    terms: Vec<(Complex64, MultiIndex)>,
    m: usize,
}

impl Poly {
    pub fn new(terms: Vec<(Complex64, MultiIndex)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidArgument(
                "polynomial needs at least one term".into(),
            ));
        }
        let m = terms[0].1.len();
        if terms.iter().any(|(_, a)| a.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: terms.iter().find(|(_, a)| a.len() != m).unwrap().1.len(),
            });
        }
        Ok(Poly { terms, m })
    }

    pub fn constant(m: usize, c: Complex64) -> Self {
        Poly {
            terms: vec![(c, MultiIndex::zero(m))],
            m,
        }
    }

    /// The monomial z^alpha.
    pub fn monomial(alpha: MultiIndex) -> Self {
        let m = alpha.len();
        Poly {
            terms: vec![(Complex64::new(1.0, 0.0), alpha)],
            m,
        }
    }

    pub fn variables(&self) -> usize {
        self.m
    }

    pub fn terms(&self) -> &[(Complex64, MultiIndex)] {
        &self.terms
    }

    pub fn eval(&self, w: &[Complex64]) -> Result<Complex64> {
        if w.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                got: w.len(),
            });
        }
        Ok(self.terms.iter().map(|(c, a)| c * a.eval(w)).sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn evaluates_terms() {
        // 1 + z1 - 2 z1 z2^2
        let p = Poly::new(vec![
            (c(1.0), MultiIndex::new(vec![0, 0])),
            (c(1.0), MultiIndex::new(vec![1, 0])),
            (c(-2.0), MultiIndex::new(vec![1, 2])),
        ])
        .unwrap();
        let v = p.eval(&[c(0.5), c(2.0)]).unwrap();
        assert!((v - c(1.0 + 0.5 - 2.0 * 0.5 * 4.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_mixed_arity() {
        assert!(Poly::new(vec![
            (c(1.0), MultiIndex::new(vec![0, 0])),
            (c(1.0), MultiIndex::new(vec![1])),
        ])
        .is_err());
    }
}
