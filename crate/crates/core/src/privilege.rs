use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::Poly;

/// Matrix of polynomials in m variables.
#[derive(Debug, Clone)]
pub struct PolyMatrix {
    rows: Vec<Vec<Poly>>,
    m: usize,
}

impl PolyMatrix {
    pub fn new(rows: Vec<Vec<Poly>>) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::InvalidArgument("empty polynomial matrix".into()));
        }
        let q = rows[0].len();
        let m = rows[0][0].variables();
        for row in &rows {
            if row.len() != q {
                return Err(Error::DimensionMismatch {
                    expected: q,
                    got: row.len(),
                });
            }
            for p in row {
                if p.variables() != m {
                    return Err(Error::DimensionMismatch {
                        expected: m,
                        got: p.variables(),
                    });
                }
            }
        }
        Ok(PolyMatrix { rows, m })
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.rows[0].len()
    }

    pub fn variables(&self) -> usize {
        self.m
    }

    pub fn eval(&self, w: &[Complex64]) -> Result<DMatrix<Complex64>> {
        let mut out = DMatrix::zeros(self.nrows(), self.ncols());
        for (i, row) in self.rows.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                out[(i, j)] = p.eval(w)?;
            }
        }
        Ok(out)
    }
}

/// Boundary domain for the rank sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Polydisc(usize),
    Ball(usize),
}

/// Fixed interior values used on the non-active coordinates of polydisc
/// boundary strata; the first entry is an exact zero so axis strata are hit.
const INNER_VALUES: [(f64, f64); 9] = [
    (0.0, 0.0),
    (0.5, 0.0),
    (-0.5, 0.0),
    (0.0, 0.5),
    (0.0, -0.5),
    (1.0, 0.0),
    (-1.0, 0.0),
    (0.0, 1.0),
    (0.0, -1.0),
];

/// Deterministic boundary sampling. Angle grids use density-th roots of
/// unity, so sample sets are nested whenever one density divides another.
pub fn boundary_samples(domain: Domain, density: usize) -> Result<Vec<Vec<Complex64>>> {
    if density < 8 {
        return Err(Error::InvalidArgument(format!(
            "density must be at least 8, got {density}"
        )));
    }
    let angle = |t: usize| -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t as f64 / density as f64)
    };
    match domain {
        Domain::Polydisc(m) => {
            if m == 0 {
                return Err(Error::InvalidArgument("need at least one variable".into()));
            }
            let inner: Vec<Complex64> = INNER_VALUES
                .iter()
                .map(|&(re, im)| Complex64::new(re, im))
                .collect();
            let mut out = Vec::new();
            // stratum j: |z_j| = 1, remaining coordinates in the closed disc
            for j in 0..m {
                for t in 0..density {
                    let zj = angle(t);
                    let mut slots = vec![0usize; m - 1];
                    loop {
                        let mut point = Vec::with_capacity(m);
                        let mut s = slots.iter();
                        for i in 0..m {
                            if i == j {
                                point.push(zj);
                            } else {
                                point.push(inner[*s.next().unwrap()]);
                            }
                        }
                        out.push(point);
                        let mut pos = 0;
                        loop {
                            if pos == slots.len() {
                                break;
                            }
                            slots[pos] += 1;
                            if slots[pos] == inner.len() {
                                slots[pos] = 0;
                                pos += 1;
                            } else {
                                break;
                            }
                        }
                        if pos == slots.len() {
                            break;
                        }
                    }
                }
            }
            Ok(out)
        }
        Domain::Ball(m) => {
            if m != 2 {
                return Err(Error::InvalidArgument(
                    "ball sampling is implemented for two variables".into(),
                ));
            }
            // z = (cos(a) e^{i phi}, sin(a) e^{i psi}) covers S^3
            let mut out = Vec::new();
            for s in 0..=density {
                let a = std::f64::consts::FRAC_PI_2 * s as f64 / density as f64;
                let (sin_a, cos_a) = a.sin_cos();
                for t1 in 0..density {
                    for t2 in 0..density {
                        out.push(vec![angle(t1) * cos_a, angle(t2) * sin_a]);
                    }
                }
            }
            Ok(out)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrivilegeVerdict {
    /// No rank jump detected at this sampling density.
    Privileged,
    NotPrivileged,
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct PrivilegeReport {
    pub sample_count: usize,
    /// Observed ranks with multiplicities, ascending by rank.
    pub rank_counts: Vec<(usize, usize)>,
    /// One witness point per observed rank.
    pub witnesses: Vec<(usize, Vec<Complex64>)>,
    pub verdict: PrivilegeVerdict,
    pub eps: f64,
    /// Smallest singular value that was counted as nonzero anywhere.
    pub min_nonzero_sigma: f64,
}

/// Rank sweep over the sampled boundary. Ranks use a global relative
/// tolerance; a singular value inside the guard band around the cutoff at
/// any sample makes the sweep inconclusive.
pub fn privilege_verdict(
    a: &PolyMatrix,
    domain: Domain,
    density: usize,
    eps: f64,
) -> Result<PrivilegeReport> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "rank tolerance must lie in (0,1), got {eps}"
        )));
    }
    let samples = boundary_samples(domain, density)?;
    let mut spectra = Vec::with_capacity(samples.len());
    let mut sigma_max: f64 = 0.0;
    for w in &samples {
        let mat = a.eval(w)?;
        let sv = mat.svd(false, false).singular_values;
        let values: Vec<f64> = sv.iter().cloned().collect();
        sigma_max = values.iter().cloned().fold(sigma_max, f64::max);
        spectra.push(values);
    }
    if sigma_max <= f64::MIN_POSITIVE {
        // identically zero matrix: rank 0 everywhere
        return Ok(PrivilegeReport {
            sample_count: samples.len(),
            rank_counts: vec![(0, samples.len())],
            witnesses: vec![(0, samples[0].clone())],
            verdict: PrivilegeVerdict::Privileged,
            eps,
            min_nonzero_sigma: 0.0,
        });
    }
    let cutoff = eps * sigma_max;
    let guard = 10.0 * cutoff;
    let mut rank_counts: Vec<(usize, usize)> = Vec::new();
    let mut witnesses: Vec<(usize, Vec<Complex64>)> = Vec::new();
    let mut min_nonzero = f64::INFINITY;
    let mut inconclusive = false;
    for (sv, w) in spectra.iter().zip(&samples) {
        let rank = sv.iter().filter(|&&s| s > cutoff).count();
        if sv.iter().any(|&s| s > cutoff && s <= guard) {
            inconclusive = true;
        }
        for &s in sv {
            if s > cutoff && s < min_nonzero {
                min_nonzero = s;
            }
        }
        match rank_counts.iter_mut().find(|(r, _)| *r == rank) {
            Some((_, count)) => *count += 1,
            None => {
                rank_counts.push((rank, 1));
                witnesses.push((rank, w.clone()));
            }
        }
    }
    rank_counts.sort_by_key(|&(r, _)| r);
    witnesses.sort_by_key(|&(r, _)| r);
    let verdict = if inconclusive {
        PrivilegeVerdict::Inconclusive
    } else if rank_counts.len() == 1 {
        PrivilegeVerdict::Privileged
    } else {
        PrivilegeVerdict::NotPrivileged
    };
    Ok(PrivilegeReport {
        sample_count: samples.len(),
        rank_counts,
        witnesses,
        verdict,
        eps,
        min_nonzero_sigma: if min_nonzero.is_finite() {
            min_nonzero
        } else {
            0.0
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiindex::MultiIndex;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn var(j: usize) -> Poly {
        Poly::monomial(MultiIndex::unit(2, j))
    }

    fn shifted(j: usize, offset: f64) -> Poly {
        Poly::new(vec![
            (c(1.0), MultiIndex::unit(2, j)),
            (c(-offset), MultiIndex::zero(2)),
        ])
        .unwrap()
    }

    #[test]
    fn polydisc_samples_hit_axis_strata() {
        let samples = boundary_samples(Domain::Polydisc(2), 8).unwrap();
        assert!(samples
            .iter()
            .any(|w| w[0].norm() == 0.0 && (w[1].norm() - 1.0).abs() < 1e-14));
        // determinism
        let again = boundary_samples(Domain::Polydisc(2), 8).unwrap();
        assert_eq!(samples, again);
    }

    #[test]
    fn ball_samples_on_sphere() {
        let samples = boundary_samples(Domain::Ball(2), 8).unwrap();
        for w in &samples {
            let r: f64 = w.iter().map(|z| z.norm_sqr()).sum();
            assert!((r - 1.0).abs() <= 1e-14);
        }
    }

    #[test]
    fn nested_densities() {
        let coarse = boundary_samples(Domain::Polydisc(2), 8).unwrap();
        let fine = boundary_samples(Domain::Polydisc(2), 16).unwrap();
        for w in &coarse {
            assert!(
                fine.iter().any(|v| v
                    .iter()
                    .zip(w)
                    .all(|(a, b)| (a - b).norm() <= 1e-14)),
                "missing {w:?}"
            );
        }
    }

    #[test]
    fn interior_zero_row_is_privileged() {
        let a = PolyMatrix::new(vec![vec![shifted(0, 0.2), shifted(1, 0.3)]]).unwrap();
        for density in [8usize, 16, 32] {
            let r = privilege_verdict(&a, Domain::Polydisc(2), density, 1e-9).unwrap();
            assert_eq!(r.verdict, PrivilegeVerdict::Privileged, "density {density}");
            assert_eq!(r.rank_counts.len(), 1);
        }
    }

    #[test]
    fn coordinate_row_jumps_on_axis_stratum() {
        let a = PolyMatrix::new(vec![vec![var(0)]]).unwrap();
        for density in [8usize, 16, 32] {
            let r = privilege_verdict(&a, Domain::Polydisc(2), density, 1e-9).unwrap();
            assert_eq!(r.verdict, PrivilegeVerdict::NotPrivileged);
            let (rank0, witness) = witnesses_rank0(&r);
            assert_eq!(rank0, 0);
            assert!(witness[0].norm() <= 1e-14, "witness {witness:?}");
        }
    }

    fn witnesses_rank0(r: &PrivilegeReport) -> (usize, &Vec<Complex64>) {
        let (rank, w) = &r.witnesses[0];
        (*rank, w)
    }

    #[test]
    fn sphere_forbids_joint_zero() {
        let a = PolyMatrix::new(vec![vec![var(0), var(1)]]).unwrap();
        let r = privilege_verdict(&a, Domain::Ball(2), 8, 1e-9).unwrap();
        assert_eq!(r.verdict, PrivilegeVerdict::Privileged);
    }

    #[test]
    fn invariant_under_invertible_scaling() {
        // row scaled by an invertible 1x1 constant; column mix by a fixed
        // invertible 2x2 matrix applied to the pair of entries
        let base = vec![vec![var(0), var(1)]];
        let mixed = vec![vec![
            Poly::new(vec![
                (c(2.0), MultiIndex::unit(2, 0)),
                (c(1.0), MultiIndex::unit(2, 1)),
            ])
            .unwrap(),
            Poly::new(vec![
                (c(1.0), MultiIndex::unit(2, 0)),
                (c(1.0), MultiIndex::unit(2, 1)),
            ])
            .unwrap(),
        ]];
        let a = PolyMatrix::new(base).unwrap();
        let b = PolyMatrix::new(mixed).unwrap();
        for domain in [Domain::Polydisc(2), Domain::Ball(2)] {
            let ra = privilege_verdict(&a, domain, 8, 1e-9).unwrap();
            let rb = privilege_verdict(&b, domain, 8, 1e-9).unwrap();
            assert_eq!(ra.verdict, rb.verdict, "{domain:?}");
        }
    }

    #[test]
    fn density_monotonicity() {
        // once a jump is observed it persists at finer densities
        let a = PolyMatrix::new(vec![vec![var(0)]]).unwrap();
        let mut seen_jump = false;
        for density in [8usize, 16, 32] {
            let r = privilege_verdict(&a, Domain::Polydisc(2), density, 1e-9).unwrap();
            let jumped = r.verdict == PrivilegeVerdict::NotPrivileged;
            assert!(!seen_jump || jumped, "jump vanished at density {density}");
            seen_jump |= jumped;
        }
        assert!(seen_jump);
    }

    #[test]
    fn rejects_low_density_and_empty_matrix() {
        assert!(boundary_samples(Domain::Polydisc(2), 4).is_err());
        assert!(PolyMatrix::new(vec![]).is_err());
    }
}
