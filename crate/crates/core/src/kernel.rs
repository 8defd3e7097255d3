use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;

/// Kernel family on the polydisc. All families here are diagonal: the
/// monomials form an orthogonal basis and K(z,w) = sum_a weight(a) z^a wbar^a.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelFamily {
    /// K(z,w) = prod_j (1 - z_j wbar_j)^{-lambda_j}, lambda_j > 0.
    Power(Vec<f64>),
}

/// Weight rule a_alpha for a diagonal reproducing kernel on D^m.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalKernelSpec {
    exponents: Vec<f64>,
}

/// k-th coefficient of (1-t)^{-lambda}: lambda(lambda+1)...(lambda+k-1)/k!.
fn rising_over_factorial(lambda: f64, k: usize) -> f64 {
    let mut c = 1.0;
    for i in 0..k {
        c *= (lambda + i as f64) / (i as f64 + 1.0);
    }
    c
}

impl DiagonalKernelSpec {
    pub fn power(exponents: Vec<f64>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::InvalidArgument(
                "kernel needs at least one variable".into(),
            ));
        }
        if exponents.iter().any(|&l| !l.is_finite() || l <= 0.0) {
            return Err(Error::InvalidArgument(
                "kernel exponents must be positive and finite".into(),
            ));
        }
        Ok(DiagonalKernelSpec { exponents })
    }

    /// Hardy space H^2(D^m): power(1,...,1).
    pub fn hardy(m: usize) -> Self {
        Self::power(vec![1.0; m]).expect("m >= 1")
    }

    /// Bergman space L^2_a(D^m): power(2,...,2).
    pub fn bergman(m: usize) -> Self {
        Self::power(vec![2.0; m]).expect("m >= 1")
    }

    pub fn variables(&self) -> usize {
        self.exponents.len()
    }

    pub fn exponents(&self) -> &[f64] {
        &self.exponents
    }

    pub fn is_hardy(&self) -> bool {
        self.exponents.iter().all(|&l| l == 1.0)
    }

    /// Kernel coefficient weight(alpha) = prod_j c_{alpha_j}(lambda_j).
    pub fn weight(&self, alpha: &MultiIndex) -> Result<f64> {
        if alpha.len() != self.exponents.len() {
            return Err(Error::DimensionMismatch {
                expected: self.exponents.len(),
                got: alpha.len(),
            });
        }
        Ok(self
            .exponents
            .iter()
            .zip(&alpha.0)
            .map(|(&l, &k)| rising_over_factorial(l, k))
            .product())
    }
}

/// Kernel coefficient of the diagonal expansion at exponent alpha.
pub fn kernel_weight(spec: &DiagonalKernelSpec, alpha: &MultiIndex) -> Result<f64> {
    spec.weight(alpha)
}
