use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ideal::{IdealSpec, MonomialIdeal};
use crate::kernel::DiagonalKernelSpec;
use crate::linop::joint_kernel;
use crate::module::build_truncated_module;
use crate::multiindex::MultiIndex;
use crate::poly::Poly;

/// Minimal modulus a unit witness must have at the base point.
pub const UNIT_WITNESS_FLOOR: f64 = 1e-8;

/// An ideal generator: a monomial, optionally multiplied by a unit factor
/// that the caller certifies nonvanishing at the point of interest.
#[derive(Debug, Clone)]
pub struct GeneratorInput {
    pub monomial: MultiIndex,
    pub unit: Option<Poly>,
}

impl GeneratorInput {
    pub fn monomial(alpha: MultiIndex) -> Self {
        GeneratorInput {
            monomial: alpha,
            unit: None,
        }
    }

    pub fn factored(alpha: MultiIndex, unit: Poly) -> Self {
        GeneratorInput {
            monomial: alpha,
            unit: Some(unit),
        }
    }
}

/// Minimal generating set of the stalk at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct StalkGenerators {
    pub point: Vec<Complex64>,
    /// Monomial descriptors; the zero exponent denotes the unit 1.
    pub generators: Vec<MultiIndex>,
}

impl StalkGenerators {
    pub fn count(&self) -> usize {
        self.generators.len()
    }
}

fn is_origin(w: &[Complex64]) -> bool {
    w.iter().all(|z| z.norm() <= 1e-14)
}

/// Strips validated unit factors and minimizes the monomial antichain at the
/// origin; at points off the variety the stalk is the full local ring, with
/// the single generator 1.
pub fn minimal_generators(inputs: &[GeneratorInput], w0: &[Complex64]) -> Result<StalkGenerators> {
    if inputs.is_empty() {
        return Err(Error::InvalidArgument(
            "need at least one generator".into(),
        ));
    }
    let m = inputs[0].monomial.len();
    for g in inputs {
        if g.monomial.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: g.monomial.len(),
            });
        }
        if let Some(unit) = &g.unit {
            let value = unit.eval(w0)?;
            if value.norm() <= UNIT_WITNESS_FLOOR {
                return Err(Error::InvalidWitness {
                    value: value.norm(),
                });
            }
        }
    }
    let monomials: Vec<MultiIndex> = inputs.iter().map(|g| g.monomial.clone()).collect();
    let ideal = MonomialIdeal::new(monomials)?;
    if is_origin(w0) {
        return Ok(StalkGenerators {
            point: w0.to_vec(),
            generators: ideal.generators().to_vec(),
        });
    }
    if !ideal.on_variety(w0) {
        return Ok(StalkGenerators {
            point: w0.to_vec(),
            generators: vec![MultiIndex::zero(m)],
        });
    }
    // on the variety but away from the origin the monomial combinatorics
    // does not describe the stalk
    Err(Error::UnsupportedPoint)
}

/// Monomial basis of the space of polynomials q with q(D)f = 0 at the point
/// for all module elements f, up to total degree `cap`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicSpace {
    pub point: Vec<Complex64>,
    pub cap: usize,
    pub basis: Vec<MultiIndex>,
}

fn monomials_up_to(m: usize, cap: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut current = vec![0usize; m];
    loop {
        let idx = MultiIndex::new(current.clone());
        if idx.degree() <= cap {
            out.push(idx);
        }
        // odometer over the box [0, cap]^m
        let mut pos = 0;
        loop {
            if pos == m {
                out.sort_by(|a, b| a.graded_lex_cmp(b));
                return out;
            }
            current[pos] += 1;
            if current[pos] > cap {
                current[pos] = 0;
                pos += 1;
            } else {
                break;
            }
        }
    }
}

/// For a monomial ideal the derivative duality makes this the complement of
/// the exponent set: z^beta annihilates every ideal monomial at 0 exactly
/// when beta is not in the exponent set.
pub fn characteristic_space(
    ideal: &MonomialIdeal,
    w0: &[Complex64],
    cap: usize,
) -> Result<CharacteristicSpace> {
    if !is_origin(w0) {
        return Err(Error::UnsupportedPoint);
    }
    let basis = monomials_up_to(ideal.variables(), cap)
        .into_iter()
        .filter(|beta| !ideal.contains(beta))
        .collect();
    Ok(CharacteristicSpace {
        point: w0.to_vec(),
        cap,
        basis,
    })
}

/// Monomials all of whose first partials lie in V (the zero polynomial is a
/// member of every characteristic space, so vanishing partials qualify).
pub fn tilde_space(v: &CharacteristicSpace, cap: usize) -> CharacteristicSpace {
    let m = v.point.len();
    let basis = monomials_up_to(m, cap)
        .into_iter()
        .filter(|beta| {
            (0..m).all(|i| {
                beta.0[i] == 0
                    || beta
                        .checked_sub(&MultiIndex::unit(m, i))
                        .is_some_and(|lowered| v.basis.contains(&lowered))
            })
        })
        .collect();
    CharacteristicSpace {
        point: v.point.clone(),
        cap,
        basis,
    }
}

/// Local-rank comparison: minimal stalk generator count against the
/// joint-kernel dimension of the ideal's closure in the chosen kernel space.
#[derive(Debug, Clone)]
pub struct GleasonReport {
    pub point: Vec<Complex64>,
    pub d_stalk: usize,
    pub d_kernel: usize,
    pub equal: bool,
    /// Separation between the largest null singular value and the smallest
    /// retained one, as numerical evidence for the dimension call.
    pub sigma_gap: f64,
}

pub fn gleason_report(
    kernel: &DiagonalKernelSpec,
    inputs: &[GeneratorInput],
    w0: &[Complex64],
    trunc: usize,
    eps: f64,
) -> Result<GleasonReport> {
    let stalk = minimal_generators(inputs, w0)?;
    let monomials: Vec<MultiIndex> = inputs.iter().map(|g| g.monomial.clone()).collect();
    let ideal = MonomialIdeal::new(monomials)?;
    let module = build_truncated_module(kernel.clone(), IdealSpec::Monomial(ideal), trunc)?;
    let kernel_data = joint_kernel(&module, w0, eps)?;
    let threshold = kernel_data.eps * kernel_data.sigma_max;
    let below = kernel_data
        .singular_values
        .iter()
        .filter(|&&s| s <= threshold)
        .fold(0.0f64, |acc, &s| acc.max(s));
    let above = kernel_data
        .singular_values
        .iter()
        .filter(|&&s| s > threshold)
        .fold(f64::INFINITY, |acc, &s| acc.min(s));
    Ok(GleasonReport {
        point: w0.to_vec(),
        d_stalk: stalk.count(),
        d_kernel: kernel_data.dim,
        equal: stalk.count() == kernel_data.dim,
        sigma_gap: if above.is_finite() { above - below } else { f64::INFINITY },
    })
}
