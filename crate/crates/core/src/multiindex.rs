use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;

/// Exponent vector of a monomial in `m` variables.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn new(exponents: Vec<usize>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(m: usize) -> Self {
        MultiIndex(vec![0; m])
    }

    /// Unit index e_j (0-based variable).
    pub fn unit(m: usize, j: usize) -> Self {
        let mut e = vec![0; m];
        e[j] = 1;
        MultiIndex(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().sum()
    }

    /// Componentwise divisibility: self | other.
    pub fn divides(&self, other: &MultiIndex) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn plus_unit(&self, j: usize) -> MultiIndex {
        let mut e = self.0.clone();
        e[j] += 1;
        MultiIndex(e)
    }

    /// Componentwise difference; None when `other` does not divide `self`.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        if other.divides(self) {
            Some(MultiIndex(
                self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
            ))
        } else {
            None
        }
    }

    /// w^alpha for a point w in C^m.
    pub fn eval(&self, w: &[Complex64]) -> Complex64 {
        self.0
            .iter()
            .zip(w)
            .map(|(&k, &z)| z.powu(k as u32))
            .product()
    }

    /// Graded-lexicographic comparison: total degree first, then lex with
    /// z_1 heaviest, so within a degree z_1^d comes first and z_m^d last.
    pub fn graded_lex_cmp(&self, other: &MultiIndex) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_lex_ordering() {
        let mut v = vec![
            MultiIndex::new(vec![0, 2]),
            MultiIndex::new(vec![1, 0]),
            MultiIndex::new(vec![0, 0]),
            MultiIndex::new(vec![2, 0]),
            MultiIndex::new(vec![0, 1]),
            MultiIndex::new(vec![1, 1]),
        ];
        v.sort_by(|a, b| a.graded_lex_cmp(b));
        let expect: Vec<Vec<usize>> = vec![
            vec![0, 0],
            vec![1, 0],
            vec![0, 1],
            vec![2, 0],
            vec![1, 1],
            vec![0, 2],
        ];
        assert_eq!(v.into_iter().map(|x| x.0).collect::<Vec<_>>(), expect);
    }

    #[test]
    fn divisibility() {
        let a = MultiIndex::new(vec![1, 0]);
        let b = MultiIndex::new(vec![2, 3]);
        assert!(a.divides(&b));
        assert!(!b.divides(&a));
        assert_eq!(b.checked_sub(&a).unwrap().0, vec![1, 3]);
        assert!(a.checked_sub(&b).is_none());
    }
}
