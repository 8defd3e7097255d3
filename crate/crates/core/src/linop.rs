use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::module::TruncatedModule;

/// Default relative rank tolerance for null-space detection.
pub const DEFAULT_RANK_EPS: f64 = 1e-9;

/// Mass allowed in the two top basis degrees of a null vector before the
/// truncation is declared starved.
pub const STARVATION_MASS: f64 = 1e-10;

/// Truncated multiplication operator M_j in the unit-normalized monomial
/// basis. Columns whose image exceeds the truncation degree are dropped and
/// recorded.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub matrix: DMatrix<Complex64>,
    pub variable: usize,
    /// Basis indices whose image was truncated away.
    pub truncated_columns: Vec<usize>,
}

/// The column operator D_{(M-w)*}: f -> ((M_j - w_j)^* f)_j, with each block
/// compressed to the degree <= N-1 slice of the basis. Restricting the rows
/// keeps truncated kernel vectors in the exact null space at interior points.
#[derive(Debug, Clone)]
pub struct StackedOperator {
    pub blocks: Vec<DMatrix<Complex64>>,
    pub point: Vec<Complex64>,
    pub row_dim: usize,
    pub col_dim: usize,
}

/// Orthonormal basis of the numerical joint kernel of D_{(M-w)*}.
#[derive(Debug, Clone)]
pub struct JointKernel {
    /// Columns are the phase-fixed null vectors (orthonormal coordinates).
    pub columns: DMatrix<Complex64>,
    pub dim: usize,
    pub singular_values: Vec<f64>,
    pub sigma_max: f64,
    pub eps: f64,
}

/// Multiplication by z_j as a square matrix on the truncated basis.
pub fn mult_operator(module: &TruncatedModule, j: usize) -> Result<OperatorMatrix> {
    let m = module.variables();
    if j >= m {
        return Err(Error::InvalidArgument(format!(
            "variable index {j} out of range for {m} variables"
        )));
    }
    let n = module.dim();
    let mut mat = DMatrix::zeros(n, n);
    let mut truncated = Vec::new();
    for (col, alpha) in module.basis().iter().enumerate() {
        let target = alpha.plus_unit(j);
        match module.index_of(&target) {
            Some(row) => {
                // entry ||z^{alpha+e_j}|| / ||z^alpha|| in the normalized basis
                let ratio = (module.weight_at(col) / module.weight_at(row)).sqrt();
                mat[(row, col)] = Complex64::new(ratio, 0.0);
            }
            None => truncated.push(col),
        }
    }
    Ok(OperatorMatrix {
        matrix: mat,
        variable: j,
        truncated_columns: truncated,
    })
}

/// Adjoint of M_j (conjugate transpose on the full truncated basis).
pub fn mult_adjoint(module: &TruncatedModule, j: usize) -> Result<DMatrix<Complex64>> {
    Ok(mult_operator(module, j)?.matrix.adjoint())
}

/// Builds D_{(M-w)*} at the point w.
pub fn adjoint_at(module: &TruncatedModule, w: &[Complex64]) -> Result<StackedOperator> {
    let m = module.variables();
    if w.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: w.len(),
        });
    }
    let n = module.dim();
    let rows = module.low_dim();
    let mut blocks = Vec::with_capacity(m);
    for (j, wj) in w.iter().enumerate() {
        let adj = mult_adjoint(module, j)?;
        let mut block = adj.rows(0, rows).into_owned();
        let wj = wj.conj();
        for i in 0..rows {
            block[(i, i)] -= wj;
        }
        blocks.push(block);
    }
    Ok(StackedOperator {
        blocks,
        point: w.to_vec(),
        row_dim: rows,
        col_dim: n,
    })
}

impl StackedOperator {
    pub fn variables(&self) -> usize {
        self.blocks.len()
    }

    /// Dense (m * low_dim) x dim matrix with the blocks stacked vertically.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        let m = self.blocks.len();
        let mut out = DMatrix::zeros(m * self.row_dim, self.col_dim);
        for (j, b) in self.blocks.iter().enumerate() {
            out.rows_mut(j * self.row_dim, self.row_dim).copy_from(b);
        }
        out
    }
}

/// Rotates a vector so its largest-modulus coordinate is real positive.
/// Ties are broken by basis order.
pub fn fix_phase(v: &mut DVector<Complex64>) {
    let mut best = 0;
    let mut best_norm = 0.0;
    for (i, c) in v.iter().enumerate() {
        let n = c.norm();
        if n > best_norm + 1e-14 {
            best = i;
            best_norm = n;
        }
    }
    if best_norm > 0.0 {
        let phase = v[best] / best_norm;
        let rot = phase.conj();
        for c in v.iter_mut() {
            *c *= rot;
        }
    }
}

/// Singular triples of `d` from the eigendecomposition of d^H d, sorted by
/// descending singular value. The Hermitian route keeps the exact sparsity
/// of graded operators and is noticeably more accurate here than the
/// bidiagonalization SVD; left vectors are only formed for s > u_cutoff.
pub(crate) fn gram_svd(
    d: &DMatrix<Complex64>,
    u_cutoff: f64,
) -> (Vec<f64>, DMatrix<Complex64>, DMatrix<Complex64>) {
    let n = d.ncols();
    let h = d.adjoint() * d;
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap()
    });
    let mut s = Vec::with_capacity(n);
    let mut v = DMatrix::zeros(n, n);
    let mut u = DMatrix::zeros(d.nrows(), n);
    for (k, &i) in order.iter().enumerate() {
        let si = eig.eigenvalues[i].max(0.0).sqrt();
        s.push(si);
        let vi = eig.eigenvectors.column(i).into_owned();
        if si > u_cutoff {
            let ui = (d * &vi) / Complex64::new(si, 0.0);
            u.set_column(k, &ui);
        }
        v.set_column(k, &vi);
    }
    (s, u, v)
}

fn top_degree_mass(module: &TruncatedModule, v: &DVector<Complex64>) -> f64 {
    let cutoff = module.trunc_degree().saturating_sub(1);
    module
        .basis()
        .iter()
        .zip(v.iter())
        .filter(|(a, _)| a.degree() >= cutoff)
        .map(|(_, c)| c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Numerical joint kernel of D_{(M-w)*} with relative tolerance eps.
pub fn joint_kernel(module: &TruncatedModule, w: &[Complex64], eps: f64) -> Result<JointKernel> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "rank tolerance must lie in (0,1), got {eps}"
        )));
    }
    if w.iter().any(|z| z.norm() >= 1.0) {
        return Err(Error::OutsideDomain);
    }
    let d = adjoint_at(module, w)?.matrix();
    let svd = d.clone().svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let mut pairs: Vec<(f64, usize)> = svd
        .singular_values
        .iter()
        .enumerate()
        .map(|(i, &s)| (s, i))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let sigma_max = pairs.last().map(|p| p.0).unwrap_or(0.0);
    if sigma_max <= f64::MIN_POSITIVE {
        return Err(Error::DegenerateModule);
    }
    let threshold = eps * sigma_max;
    let mut cols: Vec<DVector<Complex64>> = Vec::new();
    let mut sv_used = Vec::new();
    for &(s, i) in &pairs {
        if s <= threshold {
            let mut v: DVector<Complex64> =
                v_t.row(i).transpose().map(|c| c.conj());
            fix_phase(&mut v);
            let mass = top_degree_mass(module, &v);
            // Kernel vectors at a point w carry an unavoidable geometric
            // tail ~ max|w_j|^N; only mass beyond that budget signals a
            // starved truncation.
            let rho = w.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
            let budget = STARVATION_MASS
                + 100.0 * rho.powi(module.trunc_degree().saturating_sub(2) as i32);
            if mass > budget {
                return Err(Error::TruncationStarvation { mass });
            }
            sv_used.push(s);
            cols.push(v);
        }
    }
    // deterministic column order: by dominant coordinate, then singular value
    let mut order: Vec<usize> = (0..cols.len()).collect();
    order.sort_by(|&a, &b| {
        let da = dominant_coordinate(&cols[a]);
        let db = dominant_coordinate(&cols[b]);
        da.cmp(&db)
            .then(sv_used[a].partial_cmp(&sv_used[b]).unwrap())
    });
    let dim = cols.len();
    let mut columns = DMatrix::zeros(module.dim(), dim);
    for (k, &i) in order.iter().enumerate() {
        columns.set_column(k, &cols[i]);
    }
    let singular_values: Vec<f64> = pairs.iter().rev().map(|p| p.0).collect();
    Ok(JointKernel {
        columns,
        dim,
        singular_values,
        sigma_max,
        eps,
    })
}

fn dominant_coordinate(v: &DVector<Complex64>) -> usize {
    let mut best = 0;
    let mut best_norm = 0.0;
    for (i, c) in v.iter().enumerate() {
        let n = c.norm();
        if n > best_norm + 1e-14 {
            best = i;
            best_norm = n;
        }
    }
    best
}

/// Residual of the truncated kernel vector as a joint eigenvector:
/// max_j ||(M_j^* - conj(w_j)) K_w|| / ||K_w||, using the full square
/// adjoint so the top-degree defect is visible.
pub fn eigenvector_residual(module: &TruncatedModule, w: &[Complex64]) -> Result<f64> {
    let k = module.kernel_vector(w)?;
    let knorm = k.norm(module);
    if knorm <= 1e-14 {
        return Err(Error::OnVariety);
    }
    let kc = module.to_orthonormal(&k.coeffs);
    let mut worst: f64 = 0.0;
    for (j, wj) in w.iter().enumerate() {
        let adj = mult_adjoint(module, j)?;
        let mut r = adj * &kc;
        r.axpy(-wj.conj(), &kc, Complex64::new(1.0, 0.0));
        worst = worst.max(r.norm() / knorm);
    }
    Ok(worst)
}

/// Rank-revealing null space via column-pivoted modified Gram-Schmidt.
/// Independent of the SVD path; returns an orthonormal null basis.
pub fn null_space_qr(d: &DMatrix<Complex64>, eps: f64) -> (usize, DMatrix<Complex64>) {
    let n = d.ncols();
    let mut cols: Vec<DVector<Complex64>> = (0..n).map(|j| d.column(j).into_owned()).collect();
    let scale = cols.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    if scale == 0.0 {
        return (n, DMatrix::identity(n, n));
    }
    let tol = eps * scale;
    let mut perm: Vec<usize> = (0..n).collect();
    let mut q: Vec<DVector<Complex64>> = Vec::new();
    let mut r = DMatrix::<Complex64>::zeros(n, n);
    let mut rank = 0;
    for k in 0..n {
        // pivot: remaining column of largest norm
        let (pivot, pnorm) = (k..n)
            .map(|j| (j, cols[j].norm()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        if pnorm <= tol {
            break;
        }
        cols.swap(k, pivot);
        perm.swap(k, pivot);
        r.swap_columns(k, pivot);
        let qk = &cols[k] / Complex64::new(pnorm, 0.0);
        r[(k, k)] = Complex64::new(pnorm, 0.0);
        for j in (k + 1)..n {
            let proj = qk.dotc(&cols[j]);
            r[(k, j)] = proj;
            let qk_scaled = &qk * proj;
            cols[j] -= qk_scaled;
        }
        q.push(qk);
        rank += 1;
    }
    let null_dim = n - rank;
    let mut basis = DMatrix::zeros(n, null_dim);
    for (out_col, free) in (rank..n).enumerate() {
        // solve R[..rank,..rank] x = -R[..rank, free] by back substitution
        let mut x = vec![Complex64::new(0.0, 0.0); rank];
        for i in (0..rank).rev() {
            let mut s = -r[(i, free)];
            for l in (i + 1)..rank {
                s -= r[(i, l)] * x[l];
            }
            x[i] = s / r[(i, i)];
        }
        let mut v = DVector::zeros(n);
        for i in 0..rank {
            v[perm[i]] = x[i];
        }
        v[perm[free]] = Complex64::new(1.0, 0.0);
        basis.set_column(out_col, &v);
    }
    // orthonormalize the null basis
    for j in 0..null_dim {
        for i in 0..j {
            let proj = basis.column(i).dotc(&basis.column(j));
            let col_i = basis.column(i).into_owned();
            let mut col_j = basis.column(j).into_owned();
            col_j -= col_i * proj;
            basis.set_column(j, &col_j);
        }
        let nrm = basis.column(j).norm();
        if nrm > 0.0 {
            let col = basis.column(j) / Complex64::new(nrm, 0.0);
            basis.set_column(j, &col);
        }
    }
    (null_dim, basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideal::{IdealSpec, MonomialIdeal};
    use crate::kernel::DiagonalKernelSpec;
    use crate::module::build_truncated_module;
    use crate::multiindex::MultiIndex;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn mi(v: &[usize]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    fn h0(n: usize) -> crate::module::TruncatedModule {
        build_truncated_module(DiagonalKernelSpec::hardy(2), IdealSpec::VanishAtOrigin, n)
            .unwrap()
    }

    #[test]
    fn hardy_shift_entries_are_one() {
        let module =
            build_truncated_module(DiagonalKernelSpec::hardy(2), IdealSpec::Full, 4).unwrap();
        let op = mult_operator(&module, 0).unwrap();
        for v in op.matrix.iter() {
            assert!(v.norm() == 0.0 || (v.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn adjoint_formula_matches_closed_form() {
        // power(lambda, mu), vanish-at-origin: M_1^* z_1^{m+1} = ((m+1)/(lambda+m)) z_1^m
        let lambda = 1.7;
        let module = build_truncated_module(
            DiagonalKernelSpec::power(vec![lambda, 2.4]).unwrap(),
            IdealSpec::VanishAtOrigin,
            5,
        )
        .unwrap();
        let adj = mult_adjoint(&module, 0).unwrap();
        for mm in 1..4usize {
            let from = module.index_of(&mi(&[mm + 1, 0])).unwrap();
            let to = module.index_of(&mi(&[mm, 0])).unwrap();
            // raw-monomial action recovered from the orthonormalized entry
            let entry = adj[(to, from)].re;
            let scale = (module.monomial_norm_sq(&mi(&[mm, 0])).unwrap()
                / module.monomial_norm_sq(&mi(&[mm + 1, 0])).unwrap())
            .sqrt();
            let raw = entry / scale;
            assert_abs_diff_eq!(
                raw,
                (mm as f64 + 1.0) / (lambda + mm as f64),
                epsilon = 1e-12
            );
        }
        // M_1^* z_1 = 0: column of z_1 is zero
        let z1 = module.index_of(&mi(&[1, 0])).unwrap();
        assert_abs_diff_eq!(adj.column(z1).norm(), 0.0, epsilon = 1e-15);
        // M_2^* z_1^{m+1} = 0
        let adj2 = mult_adjoint(&module, 1).unwrap();
        let z12 = module.index_of(&mi(&[2, 0])).unwrap();
        assert_abs_diff_eq!(adj2.column(z12).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn stacked_is_shifted_by_identity() {
        let module = h0(4);
        let w = [Complex64::new(0.2, 0.1), Complex64::new(-0.3, 0.0)];
        let at_w = adjoint_at(&module, &w).unwrap().matrix();
        let at_0 = adjoint_at(&module, &[c(0.0), c(0.0)]).unwrap().matrix();
        let rows = module.low_dim();
        let mut shift = DMatrix::<Complex64>::zeros(2 * rows, module.dim());
        for j in 0..2 {
            for i in 0..rows {
                shift[(j * rows + i, i)] = w[j].conj();
            }
        }
        assert_abs_diff_eq!((at_w - (at_0 - shift)).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn dimension_jump_at_origin() {
        let module = h0(6);
        let k0 = joint_kernel(&module, &[c(0.0), c(0.0)], 1e-9).unwrap();
        assert_eq!(k0.dim, 2);
        let k1 = joint_kernel(&module, &[c(0.3), c(0.0)], 1e-9).unwrap();
        assert_eq!(k1.dim, 1);
    }

    #[test]
    fn square_ideal_kernel_dimension() {
        let ideal =
            MonomialIdeal::new(vec![mi(&[2, 0]), mi(&[1, 1]), mi(&[0, 2])]).unwrap();
        let module =
            build_truncated_module(DiagonalKernelSpec::hardy(2), IdealSpec::Monomial(ideal), 5)
                .unwrap();
        let k = joint_kernel(&module, &[c(0.0), c(0.0)], 1e-9).unwrap();
        assert_eq!(k.dim, 3);
    }

    #[test]
    fn kernel_columns_are_orthonormal_and_null() {
        let module = h0(6);
        let w = [Complex64::new(0.1, 0.2), Complex64::new(0.0, 0.0)];
        let k = joint_kernel(&module, &w, 1e-9).unwrap();
        let d = adjoint_at(&module, &w).unwrap().matrix();
        for i in 0..k.dim {
            assert_abs_diff_eq!(k.columns.column(i).norm(), 1.0, epsilon = 1e-12);
            let r = (&d * k.columns.column(i)).norm();
            assert!(r <= k.eps * k.sigma_max * 10.0, "residual {r}");
            for j in 0..i {
                let ip = k.columns.column(j).dotc(&k.columns.column(i)).norm();
                assert!(ip < 1e-12);
            }
        }
    }

    #[test]
    fn qr_null_space_agrees_with_svd() {
        let module = h0(6);
        for w in [
            [c(0.0), c(0.0)],
            [c(0.3), c(0.0)],
            [Complex64::new(0.1, -0.2), Complex64::new(0.25, 0.1)],
        ] {
            let k = joint_kernel(&module, &w, 1e-9).unwrap();
            let d = adjoint_at(&module, &w).unwrap().matrix();
            let (dim, basis) = null_space_qr(&d, 1e-9);
            assert_eq!(dim, k.dim);
            for i in 0..dim {
                let r = (&d * basis.column(i)).norm();
                assert!(r <= 10.0 * 1e-9 * k.sigma_max, "residual {r}");
            }
        }
    }

    #[test]
    fn eigenvector_residual_decays_with_truncation() {
        let m10 = h0(10);
        let m14 = h0(14);
        let w = [c(0.5), c(0.5)];
        let r10 = eigenvector_residual(&m10, &w).unwrap();
        let r14 = eigenvector_residual(&m14, &w).unwrap();
        assert!(r14 < r10, "r14={r14}, r10={r10}");

        let full = build_truncated_module(DiagonalKernelSpec::hardy(2), IdealSpec::Full, 12)
            .unwrap();
        assert!(eigenvector_residual(&full, &w).unwrap() <= 1e-3);
        assert_abs_diff_eq!(
            eigenvector_residual(&full, &[c(0.0), c(0.0)]).unwrap(),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn residual_on_variety_errors() {
        let module = h0(5);
        assert!(matches!(
            eigenvector_residual(&module, &[c(0.0), c(0.0)]),
            Err(Error::OnVariety)
        ));
    }

    #[test]
    fn upper_semicontinuity_grid() {
        let module = h0(6);
        for i in 0..5 {
            for j in 0..5 {
                let w = [
                    c(-0.4 + 0.2 * i as f64),
                    c(-0.4 + 0.2 * j as f64),
                ];
                let k = joint_kernel(&module, &w, 1e-9).unwrap();
                let expect = if i == 2 && j == 2 { 2 } else { 1 };
                assert_eq!(k.dim, expect, "at {w:?}");
            }
        }
    }
}
