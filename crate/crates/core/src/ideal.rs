use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;

/// A monomial ideal given by its minimal generators (an antichain under
/// componentwise divisibility). Membership of an exponent is upward closed.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialIdeal {
    generators: Vec<MultiIndex>,
    m: usize,
}

impl MonomialIdeal {
    /// Builds the ideal, minimizing the generator set and sorting it in
    /// graded-lex order.
    pub fn new(generators: Vec<MultiIndex>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidArgument(
                "monomial ideal needs at least one generator".into(),
            ));
        }
        let m = generators[0].len();
        if generators.iter().any(|g| g.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: generators.iter().find(|g| g.len() != m).unwrap().len(),
            });
        }
        let mut gens = minimize(generators);
        gens.sort_by(|a, b| a.graded_lex_cmp(b));
        Ok(MonomialIdeal { generators: gens, m })
    }

    /// The maximal ideal at the origin: <z_1, ..., z_m>.
    pub fn maximal(m: usize) -> Self {
        MonomialIdeal {
            generators: (0..m).map(|j| MultiIndex::unit(m, j)).collect(),
            m,
        }
    }

    pub fn variables(&self) -> usize {
        self.m
    }

    /// Minimal generators, sorted graded-lex.
    pub fn generators(&self) -> &[MultiIndex] {
        &self.generators
    }

    pub fn max_generator_degree(&self) -> usize {
        self.generators.iter().map(|g| g.degree()).max().unwrap_or(0)
    }

    /// alpha lies in the exponent set iff some generator divides it.
    pub fn contains(&self, alpha: &MultiIndex) -> bool {
        self.generators.iter().any(|g| g.divides(alpha))
    }

    /// First generator (in generator order) dividing alpha.
    pub fn assigned_generator(&self, alpha: &MultiIndex) -> Option<usize> {
        self.generators.iter().position(|g| g.divides(alpha))
    }

    /// Whether the point lies on the common zero set of the generators.
    pub fn on_variety(&self, w: &[num_complex::Complex64]) -> bool {
        self.generators.iter().all(|g| g.eval(w).norm() <= 1e-14)
    }
}

fn minimize(gens: Vec<MultiIndex>) -> Vec<MultiIndex> {
    let mut out: Vec<MultiIndex> = Vec::new();
    for g in &gens {
        if gens.iter().any(|h| h != g && h.divides(g)) {
            continue;
        }
        if !out.contains(g) {
            out.push(g.clone());
        }
    }
    out
}

/// Membership rule defining which monomials span a submodule.
#[derive(Debug, Clone, PartialEq)]
pub enum IdealSpec {
    /// No constraint: the whole kernel space.
    Full,
    /// Functions vanishing at the origin: the maximal ideal <z_1,...,z_m>.
    VanishAtOrigin,
    /// Closure of a monomial ideal.
    Monomial(MonomialIdeal),
}

impl IdealSpec {
    pub fn admits(&self, alpha: &MultiIndex) -> bool {
        match self {
            IdealSpec::Full => true,
            IdealSpec::VanishAtOrigin => alpha.degree() >= 1,
            IdealSpec::Monomial(ideal) => ideal.contains(alpha),
        }
    }

    /// Every ideal spec here is monomial; this returns the generator view.
    pub fn as_monomial(&self, m: usize) -> MonomialIdeal {
        match self {
            IdealSpec::Full => MonomialIdeal {
                generators: vec![MultiIndex::zero(m)],
                m,
            },
            IdealSpec::VanishAtOrigin => MonomialIdeal::maximal(m),
            IdealSpec::Monomial(ideal) => ideal.clone(),
        }
    }

    pub fn max_generator_degree(&self, m: usize) -> usize {
        self.as_monomial(m).max_generator_degree()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[usize]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    #[test]
    fn minimization_removes_multiples() {
        let ideal = MonomialIdeal::new(vec![mi(&[2, 0]), mi(&[1, 0]), mi(&[1, 3]), mi(&[0, 2])])
            .unwrap();
        assert_eq!(ideal.generators(), &[mi(&[1, 0]), mi(&[0, 2])]);
    }

    #[test]
    fn membership_is_upward_closed() {
        let ideal = MonomialIdeal::new(vec![mi(&[2, 0]), mi(&[1, 1]), mi(&[0, 2])]).unwrap();
        assert!(ideal.contains(&mi(&[2, 5])));
        assert!(ideal.contains(&mi(&[1, 1])));
        assert!(!ideal.contains(&mi(&[1, 0])));
        assert!(!ideal.contains(&mi(&[0, 0])));
    }

    #[test]
    fn assignment_uses_generator_order() {
        let ideal = MonomialIdeal::new(vec![mi(&[2, 0]), mi(&[1, 1]), mi(&[0, 2])]).unwrap();
        // (2,1) is divisible by both (2,0) and (1,1); (2,0) comes first.
        assert_eq!(ideal.assigned_generator(&mi(&[2, 1])), Some(0));
        assert_eq!(ideal.assigned_generator(&mi(&[1, 2])), Some(1));
        assert_eq!(ideal.assigned_generator(&mi(&[1, 0])), None);
    }
}
