//! Local rigidity of solutions.
//!
//! Two independent tests count deformation directions beyond the `N − 1`
//! rephasings of single states:
//!
//! - the restricted defect linearizes unitarity of `U = I − 2G` under
//!   entrywise phase deformations `U_jk e^{itR_jk}`;
//! - the Hessian test looks at the curvature of the projector residual
//!   `h = ‖G² − G‖²` in phase space.
//!
//! `F'` itself is useless for the second test: both `f − d` and `g − d`
//! have zero gradient at a solution, so `F'` is quartic there and its
//! Hessian vanishes identically. `h` is a sum of squares of functions with
//! a nonzero Jacobian, so its Hessian `2JᵀJ` sees every first-order
//! deformation.

use nalgebra::{Complex, DMatrix};

use crate::dim::PhaseLayout;
use crate::error::LandscapeError;
use crate::gram::GramMatrix;
use crate::phases::PhaseVector;
use crate::traces::TraceEvaluator;

#[derive(Clone, Debug, PartialEq)]
pub struct DefectReport {
    /// Matrix size `N`.
    pub n: usize,
    /// Zero entries in the strict upper triangle of `U`.
    pub z: usize,
    /// `(N−1)(N−2)/2 − z`.
    pub tau: i64,
    /// Numerical rank of the linearized system.
    pub rank: usize,
    /// `tau − rank`; negative values are reported as is.
    pub delta: i64,
    /// Singular values, descending.
    pub singular_values: Vec<f64>,
    /// Zeros expected from intra-basis orthogonality, `(d+1)·d(d−1)/2`.
    pub z_expected: usize,
}

/// Restricted defect of `U = I − 2G`.
///
/// Unknowns are `R_jk` for `j < k` with `|U_jk| > zero_tol` (`R` is
/// antisymmetric). For each `j < l` the real and imaginary parts of
/// `Σ_k U_jk conj(U_lk) (R_jk − R_lk) = 0` give two rows. The rank counts
/// singular values above `rank_tol · σ_max`.
pub fn restricted_defect(g: &GramMatrix, zero_tol: f64, rank_tol: f64) -> Result<DefectReport, LandscapeError> {
    let d = g.dim();
    let n = d.states();
    let two = Complex::new(2.0, 0.0);
    let u = DMatrix::identity(n, n) - g.matrix() * two;
    let deviation = (&u * u.adjoint() - DMatrix::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if deviation > 1e-8 {
        return Err(LandscapeError::NotUnitary { deviation });
    }

    // Column of each free parameter, indexed by (j, k) with j < k.
    let mut column = vec![usize::MAX; n * n];
    let mut unknowns = 0;
    let mut z = 0;
    for j in 0..n {
        for k in j + 1..n {
            if u[(j, k)].norm() > zero_tol {
                column[j * n + k] = unknowns;
                unknowns += 1;
            } else {
                z += 1;
            }
        }
    }
    // R_jk as a signed column reference.
    let param = |j: usize, k: usize| -> Option<(usize, f64)> {
        match j.cmp(&k) {
            std::cmp::Ordering::Less => (column[j * n + k] != usize::MAX).then(|| (column[j * n + k], 1.0)),
            std::cmp::Ordering::Greater => (column[k * n + j] != usize::MAX).then(|| (column[k * n + j], -1.0)),
            std::cmp::Ordering::Equal => None,
        }
    };

    let rows = n * (n - 1);
    let mut a = DMatrix::<f64>::zeros(rows, unknowns.max(1));
    let mut row = 0;
    for j in 0..n {
        for l in j + 1..n {
            for k in 0..n {
                let w = u[(j, k)] * u[(l, k)].conj();
                if w.norm() == 0.0 {
                    continue;
                }
                if let Some((c, s)) = param(j, k) {
                    a[(row, c)] += s * w.re;
                    a[(row + 1, c)] += s * w.im;
                }
                if let Some((c, s)) = param(l, k) {
                    a[(row, c)] -= s * w.re;
                    a[(row + 1, c)] -= s * w.im;
                }
            }
            row += 2;
        }
    }
    let mut singular_values: Vec<f64> =
        if unknowns == 0 { Vec::new() } else { a.singular_values().iter().copied().collect() };
    singular_values.sort_by(|x, y| y.total_cmp(x));
    let smax = singular_values.first().copied().unwrap_or(0.0);
    let rank = singular_values.iter().filter(|&&s| s > rank_tol * smax).count();
    let tau = ((n - 1) * (n - 2) / 2) as i64 - z as i64;
    let dd = d.get();
    Ok(DefectReport {
        n,
        z,
        tau,
        rank,
        delta: tau - rank as i64,
        singular_values,
        z_expected: (dd + 1) * dd * (dd - 1) / 2,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct HessianReport {
    /// Eigenvalues of the Hessian of `h`, ascending.
    pub eigenvalues: Vec<f64>,
    /// Eigenvalues with `|λ| < null_tol`.
    pub null_dim: usize,
    /// `N − 1`.
    pub gauge_dim: usize,
    /// `null_dim − gauge_dim`.
    pub nontrivial_null: i64,
    /// Smallest eigenvalue above the null threshold.
    pub smallest_positive: Option<f64>,
}

/// Largest gradient norm of `h` accepted as stationary.
pub const STATIONARY_TOL: f64 = 1e-6;

/// Hessian of the projector residual by central differences of its
/// analytic gradient, symmetrized before diagonalization.
pub fn hessian(phi: &PhaseVector, fd_step: f64) -> DMatrix<f64> {
    let d = phi.dim();
    let p = d.phase_count();
    let mut ev = TraceEvaluator::<f64>::new(d);
    let mut x = phi.as_slice().to_vec();
    let mut gp = vec![0.0; p];
    let mut gm = vec![0.0; p];
    let mut h = DMatrix::<f64>::zeros(p, p);
    for col in 0..p {
        let x0 = x[col];
        x[col] = x0 + fd_step;
        ev.residual_with_gradient(&x, &mut gp);
        x[col] = x0 - fd_step;
        ev.residual_with_gradient(&x, &mut gm);
        x[col] = x0;
        for r in 0..p {
            h[(r, col)] = (gp[r] - gm[r]) / (2.0 * fd_step);
        }
    }
    (&h + h.transpose()) * 0.5
}

/// Largest `F` accepted by [`hessian_analysis`].
pub const SOLUTION_TOL: f64 = 1e-10;

/// Null-space count of the residual Hessian at a solution.
pub fn hessian_analysis(phi: &PhaseVector, fd_step: f64, null_tol: f64) -> Result<HessianReport, LandscapeError> {
    let d = phi.dim();
    let mut ev = TraceEvaluator::<f64>::new(d);
    let f = ev.evaluate(phi.as_slice()).value();
    if f.is_nan() || f >= SOLUTION_TOL {
        return Err(LandscapeError::NotSolution { f });
    }
    let mut grad = vec![0.0; d.phase_count()];
    ev.residual_with_gradient(phi.as_slice(), &mut grad);
    let gradient_norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    if gradient_norm >= STATIONARY_TOL {
        return Err(LandscapeError::NotStationary { gradient_norm });
    }
    let h = hessian(phi, fd_step);
    let mut eigenvalues: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    eigenvalues.sort_by(f64::total_cmp);
    let null_dim = eigenvalues.iter().filter(|l| l.abs() < null_tol).count();
    let gauge_dim = d.states() - 1;
    let smallest_positive = eigenvalues.iter().copied().find(|&l| l >= null_tol);
    Ok(HessianReport {
        eigenvalues,
        null_dim,
        gauge_dim,
        nontrivial_null: null_dim as i64 - gauge_dim as i64,
        smallest_positive,
    })
}

/// Phase-space direction of rephasing state `a`.
pub fn gauge_direction(layout: &PhaseLayout, a: usize) -> Vec<f64> {
    layout
        .pairs()
        .iter()
        .map(|&(p, q)| {
            if p == a {
                -1.0
            } else if q == a {
                1.0
            } else {
                0.0
            }
        })
        .collect()
}

/// `vᵀHv / vᵀv`.
pub fn rayleigh_quotient(h: &DMatrix<f64>, v: &[f64]) -> f64 {
    let v = nalgebra::DVector::from_column_slice(v);
    (v.transpose() * h * &v)[(0, 0)] / v.norm_squared()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dim::Dimension;
    use crate::gram::gram_from_bases;
    use crate::wh::analytic_mubs;

    fn analytic(d: usize) -> (GramMatrix, PhaseVector) {
        gram_from_bases(&analytic_mubs(Dimension::new(d).unwrap()).unwrap()).unwrap()
    }

    #[test]
    fn analytic_solutions_are_isolated() {
        for d in [2usize, 3, 4, 5] {
            let (g, phi) = analytic(d);
            let defect = restricted_defect(&g, 1e-10, 1e-8).unwrap();
            assert_eq!(defect.z, defect.z_expected, "d = {d}");
            assert_eq!(defect.delta, 0, "d = {d}");
            let hess = hessian_analysis(&phi, 1e-5, 1e-7).unwrap();
            assert_eq!(hess.null_dim, d * (d + 1) - 1, "d = {d}: {:?}", &hess.eigenvalues[..hess.null_dim + 2]);
            assert_eq!(hess.nontrivial_null, 0);
        }
    }

    #[test]
    fn gauge_directions_are_flat() {
        let (_, phi) = analytic(3);
        let h = hessian(&phi, 1e-5);
        let layout = PhaseLayout::new(phi.dim());
        for a in 0..12 {
            assert!(rayleigh_quotient(&h, &gauge_direction(&layout, a)).abs() < 1e-12);
        }
    }

    #[test]
    fn non_solution_rejected() {
        let d = Dimension::new(3).unwrap();
        let phi = PhaseVector::zeros(d);
        assert!(matches!(hessian_analysis(&phi, 1e-5, 1e-7), Err(LandscapeError::NotSolution { .. })));
        let g = crate::gram::build_gram(&phi);
        assert!(matches!(restricted_defect(&g, 1e-10, 1e-8), Err(LandscapeError::NotUnitary { .. })));
    }
}
