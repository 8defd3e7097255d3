use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linop::{adjoint_at, joint_kernel, JointKernel};
use crate::module::TruncatedModule;
use crate::multiindex::MultiIndex;

/// Polar-decomposition data of the stacked operator D = V |D| at a base
/// point: the partial isometry V, the pseudo-inverse Q of |D|, and
/// R = Q V^*, which satisfy R D = I - P_ker and D R = P_ran.
#[derive(Debug, Clone)]
pub struct PolarParts {
    pub base_point: Vec<Complex64>,
    /// Partial isometry (rows x cols of D).
    pub v_iso: DMatrix<Complex64>,
    /// Positive operator, zero on ker D, |D|^{-1} on its orthocomplement.
    pub q: DMatrix<Complex64>,
    /// R = Q V^*.
    pub r: DMatrix<Complex64>,
    /// Projection onto ker D.
    pub p_ker: DMatrix<Complex64>,
    /// Projection onto ran D.
    pub p_ran: DMatrix<Complex64>,
    pub r_norm: f64,
    pub kernel: JointKernel,
}

/// Neumann series P(wbar, wbar_0) applied to a frame of joint-kernel
/// vectors, stored as polynomial coefficients in (wbar - wbar_0).
#[derive(Debug, Clone)]
pub struct FrameSeries {
    pub base_point: Vec<Complex64>,
    pub order: usize,
    pub radius: f64,
    /// Frame vectors in orthonormal coordinates (order-0 coefficients).
    pub frame: Vec<DVector<Complex64>>,
    /// coeffs[j][J] is the coefficient vector of (wbar - wbar_0)^J for v_j.
    pub coeffs: Vec<HashMap<MultiIndex, DVector<Complex64>>>,
}

/// Taylor data of the frame Gram matrix h(w,w) around the base point:
/// the order-0 Gram and the m x m array of coefficient matrices of
/// w_p wbar_q.
#[derive(Debug, Clone)]
pub struct MetricJet {
    pub base_point: Vec<Complex64>,
    pub order0: DMatrix<Complex64>,
    /// blocks[p][q] is the d x d coefficient matrix of w_p wbar_q.
    pub blocks: Vec<Vec<DMatrix<Complex64>>>,
    /// Largest norm among the pure first-order coefficient matrices; zero
    /// for diagonal kernels by degree orthogonality.
    pub first_order_norm: f64,
    pub normalized: bool,
}

/// SVD-based polar decomposition of D_{(M-w0)*}.
pub fn polar_parts(module: &TruncatedModule, w0: &[Complex64], eps: f64) -> Result<PolarParts> {
    let kernel = joint_kernel(module, w0, eps)?;
    let d = adjoint_at(module, w0)?.matrix();
    let n = d.ncols();
    let rows = d.nrows();
    let sigma_max = kernel.sigma_max;
    let threshold = eps * sigma_max;

    let (sv, u_mat, v_mat) = crate::linop::gram_svd(&d, threshold);

    // cluster separation around the tolerance
    let mut small: f64 = 0.0;
    let mut big = f64::INFINITY;
    for &s in &sv {
        if s <= threshold {
            small = small.max(s);
        } else {
            big = big.min(s);
        }
    }
    if big.is_finite() && big - small < 10.0 * threshold {
        return Err(Error::IllSeparatedKernel {
            gap: big - small,
            threshold,
        });
    }

    let mut v_iso = DMatrix::zeros(rows, n);
    let mut q = DMatrix::zeros(n, n);
    let mut r = DMatrix::zeros(n, rows);
    let mut p_ran = DMatrix::zeros(rows, rows);
    let mut r_norm: f64 = 0.0;
    for (i, &s) in sv.iter().enumerate() {
        if s > threshold {
            let ui = u_mat.column(i);
            let vi = v_mat.column(i);
            // V += u_i v_i^H ; Q += (1/s) v_i v_i^H ; R += (1/s) v_i u_i^H
            for a in 0..rows {
                for b in 0..n {
                    v_iso[(a, b)] += ui[a] * vi[b].conj();
                    r[(b, a)] += vi[b] * ui[a].conj() / s;
                }
            }
            for a in 0..n {
                for b in 0..n {
                    q[(a, b)] += vi[a] * vi[b].conj() / s;
                }
            }
            for a in 0..rows {
                for b in 0..rows {
                    p_ran[(a, b)] += ui[a] * ui[b].conj();
                }
            }
            r_norm = r_norm.max(1.0 / s);
        }
    }
    let p_ker = &kernel.columns * kernel.columns.adjoint();
    Ok(PolarParts {
        base_point: w0.to_vec(),
        v_iso,
        q,
        r,
        p_ker,
        p_ran,
        r_norm,
        kernel,
    })
}

impl PolarParts {
    /// T_i f = R (0, ..., f|_{<=N-1}, ..., 0) with f in slot i; the building
    /// block of the series recursion R D_{wbar - wbar_0}.
    pub fn shift_block(&self, module: &TruncatedModule, i: usize) -> DMatrix<Complex64> {
        let rows = module.low_dim();
        let n = module.dim();
        let r_block = self.r.columns(i * rows, rows);
        // columns beyond the low slice are truncated away by D_wbar
        let mut t = DMatrix::zeros(n, n);
        t.columns_mut(0, rows).copy_from(&r_block);
        t
    }
}

fn check_radius(w: &[Complex64], w0: &[Complex64], r_norm: f64) -> Result<f64> {
    let dist = w
        .iter()
        .zip(w0)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let radius = if r_norm > 0.0 { 1.0 / r_norm } else { f64::INFINITY };
    if dist >= radius {
        return Err(Error::OutOfRadius { dist, radius });
    }
    Ok(dist)
}

/// Expands (R D_{wbar-wbar_0})^k v multilinearly up to total order `order`
/// for each frame vector v.
pub fn frame_series(
    module: &TruncatedModule,
    polar: &PolarParts,
    frame: &[DVector<Complex64>],
    order: usize,
) -> Result<FrameSeries> {
    if order < 1 {
        return Err(Error::InvalidArgument("series order must be >= 1".into()));
    }
    let m = module.variables();
    let max_frame_degree = frame
        .iter()
        .map(|v| support_degree(module, v))
        .max()
        .unwrap_or(0);
    if module.trunc_degree() < order + max_frame_degree + 1 {
        return Err(Error::TruncationTooSmall {
            n: module.trunc_degree(),
            need: order + max_frame_degree + 1,
        });
    }
    let shifts: Vec<DMatrix<Complex64>> =
        (0..m).map(|i| polar.shift_block(module, i)).collect();
    let mut coeffs = Vec::with_capacity(frame.len());
    for v in frame {
        let mut per_vec: HashMap<MultiIndex, DVector<Complex64>> = HashMap::new();
        let mut level: HashMap<MultiIndex, DVector<Complex64>> = HashMap::new();
        level.insert(MultiIndex::zero(m), v.clone());
        per_vec.insert(MultiIndex::zero(m), v.clone());
        for _ in 1..=order {
            let mut next: HashMap<MultiIndex, DVector<Complex64>> = HashMap::new();
            for (idx, vec) in &level {
                for (i, t) in shifts.iter().enumerate() {
                    let contrib = t * vec;
                    let key = idx.plus_unit(i);
                    next.entry(key)
                        .and_modify(|acc| *acc += &contrib)
                        .or_insert(contrib);
                }
            }
            for (k, v) in &next {
                check_starvation(module, v)?;
                per_vec.insert(k.clone(), v.clone());
            }
            level = next;
        }
        coeffs.push(per_vec);
    }
    Ok(FrameSeries {
        base_point: polar.base_point.clone(),
        order,
        radius: if polar.r_norm > 0.0 {
            1.0 / polar.r_norm
        } else {
            f64::INFINITY
        },
        frame: frame.to_vec(),
        coeffs,
    })
}

fn support_degree(module: &TruncatedModule, v: &DVector<Complex64>) -> usize {
    module
        .basis()
        .iter()
        .zip(v.iter())
        .filter(|(_, c)| c.norm() > 1e-13)
        .map(|(a, _)| a.degree())
        .max()
        .unwrap_or(0)
}

fn check_starvation(module: &TruncatedModule, v: &DVector<Complex64>) -> Result<()> {
    let cutoff = module.trunc_degree().saturating_sub(1);
    let mass = module
        .basis()
        .iter()
        .zip(v.iter())
        .filter(|(a, _)| a.degree() >= cutoff)
        .map(|(_, c)| c.norm_sqr())
        .sum::<f64>()
        .sqrt();
    if mass > 1e-10 {
        return Err(Error::TruncationStarvation { mass });
    }
    Ok(())
}

impl FrameSeries {
    pub fn frame_len(&self) -> usize {
        self.frame.len()
    }

    /// Coefficient c_{j,J}; zero vector when |J| exceeds the order.
    pub fn coefficient(&self, j: usize, idx: &MultiIndex) -> DVector<Complex64> {
        self.coeffs[j]
            .get(idx)
            .cloned()
            .unwrap_or_else(|| DVector::zeros(self.frame[j].len()))
    }

    /// Evaluates the truncated series P(wbar, wbar_0) v_j at the point w.
    pub fn evaluate(&self, j: usize, w: &[Complex64]) -> Result<DVector<Complex64>> {
        let s: Vec<Complex64> = w
            .iter()
            .zip(&self.base_point)
            .map(|(a, b)| a.conj() - b.conj())
            .collect();
        let mut out = DVector::zeros(self.frame[j].len());
        for (idx, vec) in &self.coeffs[j] {
            out += vec * idx.eval(&s);
        }
        let _ = out.len();
        Ok(out)
    }
}

fn inner(a: &DVector<Complex64>, b: &DVector<Complex64>) -> Complex64 {
    // <a, b> linear in a, conjugate-linear in b
    b.dotc(a)
}

/// Order-2 Taylor data of the frame Gram matrix.
pub fn metric_jet(series: &FrameSeries) -> Result<MetricJet> {
    if series.order < 2 {
        return Err(Error::InvalidArgument(
            "metric jet requires a series of order >= 2".into(),
        ));
    }
    let d = series.frame_len();
    let m = series.base_point.len();
    let mut order0 = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            order0[(i, j)] = inner(&series.frame[i], &series.frame[j]);
        }
    }
    let mut first: f64 = 0.0;
    for q in 0..m {
        let e = MultiIndex::unit(m, q);
        let mut f_mat = DMatrix::<Complex64>::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                // coefficient of wbar_q alone and of w_q alone (adjoint)
                f_mat[(i, j)] = inner(&series.coefficient(i, &e), &series.frame[j]);
            }
        }
        first = first.max(f_mat.norm());
    }
    let mut blocks = Vec::with_capacity(m);
    for p in 0..m {
        let ep = MultiIndex::unit(m, p);
        let mut row = Vec::with_capacity(m);
        for q in 0..m {
            let eq = MultiIndex::unit(m, q);
            let mut b = DMatrix::zeros(d, d);
            for i in 0..d {
                for j in 0..d {
                    // h_ij = sum_{J,K} wbar^J w^K <c_{i,J}, c_{j,K}>;
                    // coefficient of w_p wbar_q takes J = e_q, K = e_p.
                    b[(i, j)] = inner(&series.coefficient(i, &eq), &series.coefficient(j, &ep));
                }
            }
            row.push(b);
        }
        blocks.push(row);
    }
    Ok(MetricJet {
        base_point: series.base_point.clone(),
        order0,
        blocks,
        first_order_norm: first,
        normalized: false,
    })
}

/// Conjugates the jet by G^{-1/2} so the order-0 part becomes the identity.
pub fn normalize_jet(jet: &MetricJet) -> Result<MetricJet> {
    let d = jet.order0.nrows();
    if jet.normalized {
        return Ok(jet.clone());
    }
    let eig = jet.order0.clone().symmetric_eigen();
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    if !min.is_finite() || min <= 1e-12 * max || max == 0.0 {
        return Err(Error::DegenerateFrame);
    }
    let mut g_inv_sqrt = DMatrix::<Complex64>::zeros(d, d);
    for k in 0..d {
        let scale = Complex64::new(1.0 / eig.eigenvalues[k].sqrt(), 0.0);
        let u = eig.eigenvectors.column(k);
        for a in 0..d {
            for b in 0..d {
                g_inv_sqrt[(a, b)] += u[a] * scale * u[b].conj();
            }
        }
    }
    let blocks = jet
        .blocks
        .iter()
        .map(|row| {
            row.iter()
                .map(|b| &g_inv_sqrt * b * &g_inv_sqrt)
                .collect()
        })
        .collect();
    Ok(MetricJet {
        base_point: jet.base_point.clone(),
        order0: DMatrix::identity(d, d),
        blocks,
        first_order_norm: jet.first_order_norm,
        normalized: true,
    })
}

/// Residual of the exact annihilation identity P_0 D_{(M-w)*} P(wbar,wbar_0) = 0,
/// evaluated with the order-r series; decays like ||w-w0||^{r+1}.
pub fn frame_annihilation_residual(
    module: &TruncatedModule,
    polar: &PolarParts,
    series: &FrameSeries,
    w: &[Complex64],
) -> Result<f64> {
    check_radius(w, &polar.base_point, polar.r_norm)?;
    let d_w = adjoint_at(module, w)?.matrix();
    let mut worst: f64 = 0.0;
    for j in 0..series.frame_len() {
        let pv = series.evaluate(j, w)?;
        let res = &polar.p_ran * (&d_w * pv);
        worst = worst.max(res.norm());
    }
    Ok(worst)
}
