use std::collections::HashMap;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ideal::IdealSpec;
use crate::kernel::DiagonalKernelSpec;
use crate::multiindex::MultiIndex;

/// Finite-dimensional model of a diagonal-kernel submodule: the monomials of
/// total degree <= N admitted by the ideal, with their squared norms.
///
/// The basis is sorted graded-lex, so all monomials of degree <= N-1 come
/// before the top-degree slice.
#[derive(Debug, Clone)]
pub struct TruncatedModule {
    spec: DiagonalKernelSpec,
    ideal: IdealSpec,
    trunc_degree: usize,
    basis: Vec<MultiIndex>,
    index: HashMap<MultiIndex, usize>,
    weights: Vec<f64>,
    norms_sq: Vec<f64>,
    /// Number of basis elements with degree <= N-1.
    low_dim: usize,
}

/// Truncated kernel vector K(., w) expanded in raw monomial coefficients:
/// coefficient at alpha is weight(alpha) * conj(w)^alpha.
#[derive(Debug, Clone)]
pub struct KernelVector {
    pub point: Vec<Complex64>,
    /// Coefficient of z^alpha, indexed like the module basis.
    pub coeffs: Vec<Complex64>,
}

pub fn build_truncated_module(
    spec: DiagonalKernelSpec,
    ideal: IdealSpec,
    trunc_degree: usize,
) -> Result<TruncatedModule> {
    let m = spec.variables();
    let need = ideal.max_generator_degree(m);
    if trunc_degree < need {
        return Err(Error::TruncationTooSmall {
            n: trunc_degree,
            need,
        });
    }
    let mut basis = Vec::new();
    let mut current = vec![0usize; m];
    let mut all = Vec::new();
    enumerate(m, trunc_degree, &mut current, 0, &mut all);
    for alpha in all {
        if ideal.admits(&alpha) {
            basis.push(alpha);
        }
    }
    basis.sort_by(|a, b| a.graded_lex_cmp(b));
    let mut index = HashMap::new();
    let mut weights = Vec::with_capacity(basis.len());
    let mut norms_sq = Vec::with_capacity(basis.len());
    for (i, alpha) in basis.iter().enumerate() {
        index.insert(alpha.clone(), i);
        let w = spec.weight(alpha)?;
        weights.push(w);
        norms_sq.push(1.0 / w);
    }
    let low_dim = basis
        .iter()
        .position(|a| a.degree() == trunc_degree)
        .unwrap_or(basis.len());
    Ok(TruncatedModule {
        spec,
        ideal,
        trunc_degree,
        basis,
        index,
        weights,
        norms_sq,
        low_dim,
    })
}

fn enumerate(m: usize, budget: usize, current: &mut Vec<usize>, pos: usize, out: &mut Vec<MultiIndex>) {
    if pos == m {
        out.push(MultiIndex::new(current.clone()));
        return;
    }
    let used: usize = current[..pos].iter().sum();
    for k in 0..=(budget - used) {
        current[pos] = k;
        enumerate(m, budget, current, pos + 1, out);
    }
    current[pos] = 0;
}

impl TruncatedModule {
    pub fn spec(&self) -> &DiagonalKernelSpec {
        &self.spec
    }

    pub fn ideal(&self) -> &IdealSpec {
        &self.ideal
    }

    pub fn variables(&self) -> usize {
        self.spec.variables()
    }

    pub fn trunc_degree(&self) -> usize {
        self.trunc_degree
    }

    pub fn basis(&self) -> &[MultiIndex] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Dimension of the degree <= N-1 slice (rows kept by the stacked operator).
    pub fn low_dim(&self) -> usize {
        self.low_dim
    }

    pub fn index_of(&self, alpha: &MultiIndex) -> Option<usize> {
        self.index.get(alpha).copied()
    }

    pub fn weight_at(&self, i: usize) -> f64 {
        self.weights[i]
    }

    /// ||z^alpha||^2 = 1/weight(alpha).
    pub fn monomial_norm_sq(&self, alpha: &MultiIndex) -> Result<f64> {
        let i = self
            .index_of(alpha)
            .ok_or_else(|| Error::NotInModule(alpha.0.clone()))?;
        Ok(self.norms_sq[i])
    }

    /// Inner product of two raw monomial-coefficient vectors,
    /// linear in `a`, conjugate-linear in `b`.
    pub fn inner_raw(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        a.iter()
            .zip(b)
            .zip(&self.norms_sq)
            .map(|((&x, &y), &n)| x * y.conj() * n)
            .sum()
    }

    /// Converts raw monomial coefficients to coordinates with respect to the
    /// unit-normalized monomial basis e_alpha = z^alpha/||z^alpha||.
    pub fn to_orthonormal(&self, raw: &[Complex64]) -> DVector<Complex64> {
        DVector::from_iterator(
            raw.len(),
            raw.iter()
                .zip(&self.norms_sq)
                .map(|(&c, &n)| c * n.sqrt()),
        )
    }

    /// Inverse of [`to_orthonormal`].
    pub fn from_orthonormal(&self, coords: &DVector<Complex64>) -> Vec<Complex64> {
        coords
            .iter()
            .zip(&self.norms_sq)
            .map(|(&c, &n)| c / n.sqrt())
            .collect()
    }

    /// Evaluates a raw monomial-coefficient vector at a point.
    pub fn eval_raw(&self, raw: &[Complex64], w: &[Complex64]) -> Complex64 {
        raw.iter()
            .zip(&self.basis)
            .map(|(&c, alpha)| c * alpha.eval(w))
            .sum()
    }

    fn check_point(&self, w: &[Complex64]) -> Result<()> {
        if w.len() != self.variables() {
            return Err(Error::DimensionMismatch {
                expected: self.variables(),
                got: w.len(),
            });
        }
        if w.iter().any(|z| z.norm() >= 1.0) {
            return Err(Error::OutsideDomain);
        }
        Ok(())
    }

    /// Truncated kernel vector K(., w).
    pub fn kernel_vector(&self, w: &[Complex64]) -> Result<KernelVector> {
        self.check_point(w)?;
        let wbar: Vec<Complex64> = w.iter().map(|z| z.conj()).collect();
        let coeffs = self
            .basis
            .iter()
            .zip(&self.weights)
            .map(|(alpha, &wt)| alpha.eval(&wbar) * wt)
            .collect();
        Ok(KernelVector {
            point: w.to_vec(),
            coeffs,
        })
    }

    /// Decomposition K_w = sum_i conj(g_i(w)) K_w^{(i)} over the minimal
    /// monomial generators g_i = z^{gamma_i}, with each basis monomial
    /// assigned to the first generator dividing it.
    pub fn kernel_decompose(&self, w: &[Complex64]) -> Result<Vec<KernelComponent>> {
        self.check_point(w)?;
        let ideal = self.ideal.as_monomial(self.variables());
        let wbar: Vec<Complex64> = w.iter().map(|z| z.conj()).collect();
        let mut parts: Vec<KernelComponent> = ideal
            .generators()
            .iter()
            .map(|g| KernelComponent {
                generator: g.clone(),
                scalar: g.eval(&wbar),
                vector: KernelVector {
                    point: w.to_vec(),
                    coeffs: vec![Complex64::new(0.0, 0.0); self.dim()],
                },
            })
            .collect();
        for (idx, alpha) in self.basis.iter().enumerate() {
            let gi = ideal
                .assigned_generator(alpha)
                .expect("basis monomial lies in the ideal");
            let rem = alpha
                .checked_sub(&ideal.generators()[gi])
                .expect("assigned generator divides alpha");
            parts[gi].vector.coeffs[idx] = rem.eval(&wbar) * self.weights[idx];
        }
        Ok(parts)
    }
}

/// One summand of the kernel decomposition: K_w^{(i)} together with the
/// scalar factor conj(z^{gamma_i}(w)).
#[derive(Debug, Clone)]
pub struct KernelComponent {
    pub generator: MultiIndex,
    /// conj(w^{gamma_i}); the decomposition is K_w = sum_i scalar_i * K_w^{(i)}.
    pub scalar: Complex64,
    pub vector: KernelVector,
}

impl KernelVector {
    pub fn norm(&self, module: &TruncatedModule) -> f64 {
        module.inner_raw(&self.coeffs, &self.coeffs).re.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn mi(v: &[usize]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    #[test]
    fn vanish_at_origin_basis() {
        let module = build_truncated_module(
            DiagonalKernelSpec::hardy(2),
            IdealSpec::VanishAtOrigin,
            2,
        )
        .unwrap();
        let expect = vec![mi(&[1, 0]), mi(&[0, 1]), mi(&[2, 0]), mi(&[1, 1]), mi(&[0, 2])];
        assert_eq!(module.basis(), expect.as_slice());
        assert_eq!(module.low_dim(), 2);
    }

    #[test]
    fn square_ideal_basis_is_generators() {
        let ideal = crate::ideal::MonomialIdeal::new(vec![
            mi(&[2, 0]),
            mi(&[1, 1]),
            mi(&[0, 2]),
        ])
        .unwrap();
        let module =
            build_truncated_module(DiagonalKernelSpec::hardy(2), IdealSpec::Monomial(ideal), 2)
                .unwrap();
        assert_eq!(module.dim(), 3);
    }

    #[test]
    fn full_degree_one_basis() {
        let module =
            build_truncated_module(DiagonalKernelSpec::hardy(2), IdealSpec::Full, 1).unwrap();
        assert_eq!(
            module.basis(),
            &[mi(&[0, 0]), mi(&[1, 0]), mi(&[0, 1])]
        );
    }

    #[test]
    fn truncation_too_small() {
        let ideal = crate::ideal::MonomialIdeal::new(vec![mi(&[3, 0]), mi(&[0, 2])]).unwrap();
        assert!(matches!(
            build_truncated_module(DiagonalKernelSpec::hardy(2), IdealSpec::Monomial(ideal), 2),
            Err(Error::TruncationTooSmall { n: 2, need: 3 })
        ));
    }

    #[test]
    fn monomial_norms() {
        let spec = DiagonalKernelSpec::power(vec![2.0, 3.0]).unwrap();
        let module = build_truncated_module(spec, IdealSpec::Full, 3).unwrap();
        // ||z1||^2 = 1/lambda
        assert_abs_diff_eq!(
            module.monomial_norm_sq(&mi(&[1, 0])).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        // 1/(c_1(2) c_1(3)) = 1/6
        assert_abs_diff_eq!(
            module.monomial_norm_sq(&mi(&[1, 1])).unwrap(),
            1.0 / 6.0,
            epsilon = 1e-15
        );
        assert!(matches!(
            module.monomial_norm_sq(&mi(&[9, 0])),
            Err(Error::NotInModule(_))
        ));
    }

    #[test]
    fn kernel_vector_at_origin() {
        let module =
            build_truncated_module(DiagonalKernelSpec::hardy(2), IdealSpec::Full, 3).unwrap();
        let k = module.kernel_vector(&[c(0.0), c(0.0)]).unwrap();
        assert_eq!(k.coeffs[0], c(1.0));
        assert!(k.coeffs[1..].iter().all(|&x| x == c(0.0)));

        let h0 = build_truncated_module(
            DiagonalKernelSpec::hardy(2),
            IdealSpec::VanishAtOrigin,
            3,
        )
        .unwrap();
        let k0 = h0.kernel_vector(&[c(0.0), c(0.0)]).unwrap();
        assert!(k0.coeffs.iter().all(|&x| x == c(0.0)));
    }

    #[test]
    fn reproducing_property_exact_for_polynomials() {
        let module =
            build_truncated_module(DiagonalKernelSpec::bergman(2), IdealSpec::Full, 5).unwrap();
        let w = [Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.0)];
        let k = module.kernel_vector(&w).unwrap();
        // f = z1
        let mut f = vec![c(0.0); module.dim()];
        f[module.index_of(&mi(&[1, 0])).unwrap()] = c(1.0);
        let ip = module.inner_raw(&f, &k.coeffs);
        assert_abs_diff_eq!(ip.re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(ip.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn domain_error() {
        let module =
            build_truncated_module(DiagonalKernelSpec::hardy(2), IdealSpec::Full, 2).unwrap();
        assert!(matches!(
            module.kernel_vector(&[c(1.0), c(0.0)]),
            Err(Error::OutsideDomain)
        ));
    }

    #[test]
    fn decomposition_matches_kernel() {
        let module = build_truncated_module(
            DiagonalKernelSpec::hardy(2),
            IdealSpec::VanishAtOrigin,
            5,
        )
        .unwrap();
        let w = [Complex64::new(0.1, 0.02), Complex64::new(0.2, -0.05)];
        let parts = module.kernel_decompose(&w).unwrap();
        let k = module.kernel_vector(&w).unwrap();
        for i in 0..module.dim() {
            let sum: Complex64 = parts
                .iter()
                .map(|p| p.scalar * p.vector.coeffs[i])
                .sum();
            assert_abs_diff_eq!((sum - k.coeffs[i]).norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn decomposition_at_origin_gives_scaled_generators() {
        let module = build_truncated_module(
            DiagonalKernelSpec::power(vec![2.0, 3.0]).unwrap(),
            IdealSpec::VanishAtOrigin,
            4,
        )
        .unwrap();
        let parts = module.kernel_decompose(&[c(0.0), c(0.0)]).unwrap();
        assert_eq!(parts.len(), 2);
        // K_0^{(i)} = z^{gamma_i}/||z^{gamma_i}||^2
        for p in &parts {
            let idx = module.index_of(&p.generator).unwrap();
            let expect = 1.0 / module.monomial_norm_sq(&p.generator).unwrap();
            assert_abs_diff_eq!(p.vector.coeffs[idx].re, expect, epsilon = 1e-14);
            let others: f64 = p
                .vector
                .coeffs
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != idx)
                .map(|(_, c)| c.norm())
                .sum();
            assert_abs_diff_eq!(others, 0.0, epsilon = 1e-15);
        }
    }
}
