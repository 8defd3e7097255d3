use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::frame::{frame_series, metric_jet, normalize_jet, polar_parts};
use crate::ideal::{IdealSpec, MonomialIdeal};
use crate::kernel::DiagonalKernelSpec;
use crate::linop::joint_kernel;
use crate::module::{build_truncated_module, TruncatedModule};
use crate::multiindex::MultiIndex;

/// Sign convention for reported curvature coefficients.
///
/// `Jet` reports the raw w_p wbar_q coefficients of the normalized metric;
/// `LineBundleSign` flips the sign to match -dd̄ log of the metric, which
/// agrees with the jet coefficients up to sign at a normalized base point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurvatureConvention {
    Jet,
    LineBundleSign,
}

/// Curvature coefficient matrices at a base point: blocks[p][q] is the d x d
/// coefficient of w_p wbar_q in the normalized metric expansion.
#[derive(Debug, Clone)]
pub struct CurvatureTensor {
    pub base_point: Vec<Complex64>,
    pub blocks: Vec<Vec<DMatrix<Complex64>>>,
    pub convention: CurvatureConvention,
    /// Set when the joint-kernel dimension disagrees with the minimal stalk
    /// generator count, in which case the jet is not canonical.
    pub warning: Option<String>,
}

impl CurvatureTensor {
    pub fn variables(&self) -> usize {
        self.blocks.len()
    }

    pub fn rank(&self) -> usize {
        self.blocks[0][0].nrows()
    }

    /// Wraps a scalar curvature value as a 1-variable rank-1 tensor.
    pub fn scalar(value: f64, convention: CurvatureConvention) -> Self {
        CurvatureTensor {
            base_point: vec![Complex64::new(0.0, 0.0)],
            blocks: vec![vec![DMatrix::from_element(1, 1, Complex64::new(value, 0.0))]],
            convention,
            warning: None,
        }
    }

    pub fn hermitian_defect(&self) -> f64 {
        let m = self.variables();
        let mut worst: f64 = 0.0;
        for p in 0..m {
            for q in 0..m {
                worst = worst.max((self.blocks[p][q].adjoint() - &self.blocks[q][p]).norm());
            }
        }
        worst
    }
}

/// The canonical frame at the origin: unit-normalized minimal generator
/// monomials of the ideal, ordered graded-lex.
fn generator_frame(module: &TruncatedModule) -> Result<Vec<DVector<Complex64>>> {
    let ideal = module.ideal().as_monomial(module.variables());
    let mut frame = Vec::new();
    for g in ideal.generators() {
        let idx = module.index_of(g).ok_or(Error::TruncationTooSmall {
            n: module.trunc_degree(),
            need: g.degree(),
        })?;
        let mut v = DVector::zeros(module.dim());
        v[idx] = Complex64::new(1.0, 0.0);
        frame.push(v);
    }
    Ok(frame)
}

/// Order-2 normalized jet coefficients at w0. At the origin the frame is the
/// canonical generator frame; elsewhere it is the phase-fixed joint-kernel
/// basis (determined up to a constant unitary, so compare with
/// `compare_curvature`).
pub fn curvature_at(
    module: &TruncatedModule,
    w0: &[Complex64],
    eps: f64,
    convention: CurvatureConvention,
) -> Result<CurvatureTensor> {
    let kernel = joint_kernel(module, w0, eps)?;
    let at_origin = w0.iter().all(|z| z.norm() <= 1e-14);
    let (frame, warning) = if at_origin {
        let frame = generator_frame(module)?;
        let warning = if frame.len() != kernel.dim {
            Some(format!(
                "joint-kernel dimension {} differs from minimal generator count {}; jet is not canonical",
                kernel.dim,
                frame.len()
            ))
        } else {
            None
        };
        (frame, warning)
    } else {
        let frame: Vec<DVector<Complex64>> = (0..kernel.dim)
            .map(|j| kernel.columns.column(j).into_owned())
            .collect();
        (frame, None)
    };
    let polar = polar_parts(module, w0, eps)?;
    let series = frame_series(module, &polar, &frame, 2)?;
    let jet = normalize_jet(&metric_jet(&series)?)?;
    let sign = match convention {
        CurvatureConvention::Jet => Complex64::new(1.0, 0.0),
        CurvatureConvention::LineBundleSign => Complex64::new(-1.0, 0.0),
    };
    let blocks = jet
        .blocks
        .iter()
        .map(|row| row.iter().map(|b| b * sign).collect())
        .collect();
    Ok(CurvatureTensor {
        base_point: w0.to_vec(),
        blocks,
        convention,
        warning,
    })
}

/// The rank-jump section family s(theta) = z1^n + theta^{n-k} z1^k z2^{n-k}
/// for the ideal <z1^n, z1^k z2^{n-k}> in the Hardy space.
#[derive(Debug, Clone)]
pub struct NKSection {
    pub n: usize,
    pub k: usize,
    pub theta: Complex64,
}

impl NKSection {
    pub fn new(n: usize, k: usize, theta: Complex64) -> Result<Self> {
        if k == 0 || k >= n {
            return Err(Error::InvalidArgument(format!(
                "need 0 < k < n, got k={k}, n={n}"
            )));
        }
        Ok(NKSection { n, k, theta })
    }

    pub fn ideal(&self) -> MonomialIdeal {
        MonomialIdeal::new(vec![
            MultiIndex::new(vec![self.n, 0]),
            MultiIndex::new(vec![self.k, self.n - self.k]),
        ])
        .expect("two generators")
    }

    /// Raw coefficient vector on the module basis.
    pub fn vector(&self, module: &TruncatedModule) -> Result<Vec<Complex64>> {
        let mut raw = vec![Complex64::new(0.0, 0.0); module.dim()];
        let i1 = module
            .index_of(&MultiIndex::new(vec![self.n, 0]))
            .ok_or(Error::TruncationTooSmall {
                n: module.trunc_degree(),
                need: self.n,
            })?;
        let i2 = module
            .index_of(&MultiIndex::new(vec![self.k, self.n - self.k]))
            .ok_or(Error::TruncationTooSmall {
                n: module.trunc_degree(),
                need: self.n,
            })?;
        raw[i1] = Complex64::new(1.0, 0.0);
        raw[i2] = self.theta.powu((self.n - self.k) as u32);
        Ok(raw)
    }

    pub fn norm_sq_closed(&self) -> f64 {
        1.0 + self.theta.norm().powi(2 * (self.n - self.k) as i32)
    }

    /// Norm squared from the Hardy Gram of the coefficient vector.
    pub fn norm_sq_gram(&self, module: &TruncatedModule) -> Result<f64> {
        let raw = self.vector(module)?;
        Ok(module.inner_raw(&raw, &raw).re)
    }
}

/// Hardy module for the ideal <z1^n, z1^k z2^{n-k}>, truncated at n + 2
/// (the degree at which kernel-vector limits along rays become exact under
/// second-order extrapolation).
pub fn nk_module(n: usize, k: usize) -> Result<TruncatedModule> {
    let section = NKSection::new(n, k, Complex64::new(0.0, 0.0))?;
    build_truncated_module(
        DiagonalKernelSpec::hardy(2),
        IdealSpec::Monomial(section.ideal()),
        n + 2,
    )
}

/// Closed-form curvature of the section family at theta.
pub fn nk_curvature_closed(n: usize, k: usize, theta: Complex64) -> Result<f64> {
    if k == 0 || k >= n {
        return Err(Error::InvalidArgument(format!(
            "need 0 < k < n, got k={k}, n={n}"
        )));
    }
    let d = (n - k) as f64;
    let t = theta.norm();
    let denom = 1.0 + t.powi(2 * (n - k) as i32);
    Ok(-(d * d) * t.powi(2 * (n - k) as i32 - 2) / (denom * denom))
}

/// -d_theta d_thetabar log ||s(theta)||^2 by central second differences in
/// the real and imaginary parts of theta; O(h^2) accurate.
pub fn nk_curvature_numeric(n: usize, k: usize, theta: Complex64, h: f64) -> Result<f64> {
    if !(h > 0.0 && h <= 0.1) {
        return Err(Error::InvalidArgument(format!(
            "step must lie in (0, 0.1], got {h}"
        )));
    }
    let module = nk_module(n, k)?;
    let log_norm = |t: Complex64| -> Result<f64> {
        Ok(NKSection::new(n, k, t)?.norm_sq_gram(&module)?.ln())
    };
    let f0 = log_norm(theta)?;
    let dx = log_norm(theta + Complex64::new(h, 0.0))?
        + log_norm(theta - Complex64::new(h, 0.0))?
        - 2.0 * f0;
    let dy = log_norm(theta + Complex64::new(0.0, h))?
        + log_norm(theta - Complex64::new(0.0, h))?
        - 2.0 * f0;
    // d_theta d_thetabar = (1/4)(d_xx + d_yy)
    Ok(-0.25 * (dx + dy) / (h * h))
}

/// Limit of kernel_vector(w_t)/wbar_{t,1}^n along w_t = t (1, conj(theta)),
/// extrapolated to second order; exact when the truncation degree is n + 2.
pub fn section_limit(
    module: &TruncatedModule,
    n: usize,
    k: usize,
    theta: Complex64,
    ts: &[f64],
) -> Result<Vec<Complex64>> {
    NKSection::new(n, k, theta)?;
    if ts.len() != 3 {
        return Err(Error::InvalidArgument(
            "need exactly three scales t, t/2, t/4".into(),
        ));
    }
    if !ts[0].is_finite()
        || ts[0] <= 0.0
        || (ts[1] - ts[0] / 2.0).abs() > 1e-14
        || (ts[2] - ts[0] / 4.0).abs() > 1e-14
    {
        return Err(Error::InvalidArgument(
            "scales must be positive and halve each step".into(),
        ));
    }
    let mut samples = Vec::with_capacity(3);
    for &t in ts {
        let w = [
            Complex64::new(t, 0.0),
            theta.conj() * Complex64::new(t, 0.0),
        ];
        let kv = module.kernel_vector(&w)?;
        let scale = w[0].conj().powu(n as u32);
        let coeffs: Vec<Complex64> = kv.coeffs.iter().map(|c| c / scale).collect();
        samples.push(coeffs);
    }
    // two Richardson passes remove the t and t^2 contributions
    let dim = module.dim();
    let level1: Vec<Vec<Complex64>> = (0..2)
        .map(|i| {
            (0..dim)
                .map(|j| 2.0 * samples[i + 1][j] - samples[i][j])
                .collect()
        })
        .collect();
    Ok((0..dim)
        .map(|j| (4.0 * level1[1][j] - level1[0][j]) / 3.0)
        .collect())
}

/// Outcome of the inequivalence screen.
#[derive(Debug, Clone, PartialEq)]
pub enum ComparisonVerdict {
    Distinguished { invariant: String, deviation: f64 },
    NotDistinguished,
}

fn hermitian_eigenvalues(mat: &DMatrix<Complex64>) -> Vec<f64> {
    let mut ev: Vec<f64> = mat.clone().symmetric_eigen().eigenvalues.iter().cloned().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Conjugation-invariant screen: compares eigenvalue multisets of the
/// Hermitian combinations B_pq + B_qp and i(B_pq - B_qp), and traces of all
/// words of length <= 3 in the blocks. A differing invariant proves the
/// tensors are not simultaneously unitarily equivalent; agreement proves
/// nothing.
pub fn compare_curvature(a: &CurvatureTensor, b: &CurvatureTensor) -> Result<ComparisonVerdict> {
    let m = a.variables();
    let d = a.rank();
    if b.variables() != m || b.rank() != d {
        return Err(Error::DimensionMismatch {
            expected: m * 100 + d,
            got: b.variables() * 100 + b.rank(),
        });
    }
    const TOL: f64 = 1e-8;
    for p in 0..m {
        for q in 0..m {
            let ha = &a.blocks[p][q] + a.blocks[p][q].adjoint();
            let hb = &b.blocks[p][q] + b.blocks[p][q].adjoint();
            let (ea, eb) = (hermitian_eigenvalues(&ha), hermitian_eigenvalues(&hb));
            let dev = ea
                .iter()
                .zip(&eb)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0f64, f64::max);
            if dev > TOL {
                return Ok(ComparisonVerdict::Distinguished {
                    invariant: format!("eig(B_{p}{q} + B_{q}{p})"),
                    deviation: dev,
                });
            }
            let i = Complex64::new(0.0, 1.0);
            let sa = (&a.blocks[p][q] - a.blocks[p][q].adjoint()) * i;
            let sb = (&b.blocks[p][q] - b.blocks[p][q].adjoint()) * i;
            let (ea, eb) = (hermitian_eigenvalues(&sa), hermitian_eigenvalues(&sb));
            let dev = ea
                .iter()
                .zip(&eb)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0f64, f64::max);
            if dev > TOL {
                return Ok(ComparisonVerdict::Distinguished {
                    invariant: format!("eig(i(B_{p}{q} - B_{q}{p}))"),
                    deviation: dev,
                });
            }
        }
    }
    // trace invariants of words up to length 3
    fn flat(t: &CurvatureTensor) -> Vec<&DMatrix<Complex64>> {
        t.blocks.iter().flat_map(|row| row.iter()).collect()
    }
    let (fa, fb) = (flat(a), flat(b));
    let letters = fa.len();
    let mut words: Vec<Vec<usize>> = Vec::new();
    for i in 0..letters {
        words.push(vec![i]);
        for j in 0..letters {
            words.push(vec![i, j]);
            for k in 0..letters {
                words.push(vec![i, j, k]);
            }
        }
    }
    for word in &words {
        let eval = |mats: &[&DMatrix<Complex64>]| -> Complex64 {
            let mut prod = mats[word[0]].clone();
            for &l in &word[1..] {
                prod *= mats[l];
            }
            prod.trace()
        };
        let (ta, tb) = (eval(&fa), eval(&fb));
        if (ta - tb).norm() > TOL {
            return Ok(ComparisonVerdict::Distinguished {
                invariant: format!("tr(word {word:?})"),
                deviation: (ta - tb).norm(),
            });
        }
    }
    Ok(ComparisonVerdict::NotDistinguished)
}
