//! Gram matrices of complete MUB candidates and direct checks of the
//! defining overlap conditions.

use nalgebra::{Complex, ComplexField, DMatrix, DVector, SymmetricEigen};

use crate::dim::{Dimension, PhaseLayout};
use crate::error::{GramError, OverlapViolation};
use crate::phases::PhaseVector;
use crate::scalar::{cis, real, to_f64, Real};

/// Default tolerance on `|⟨ψ_a|ψ_b⟩| − 1/√d` used by [`gram_from_bases`].
pub const DEFAULT_UNBIASED_TOL: f64 = 1e-8;

/// `N × N` Hermitian Gram matrix `G[a][b] = ⟨ψ_a|ψ_b⟩ / (d+1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix<T: Real = f64> {
    d: Dimension,
    entries: DMatrix<Complex<T>>,
}

impl<T: Real> GramMatrix<T> {
    /// Wrap an arbitrary `N × N` matrix. Fails unless it is Hermitian to
    /// `1e-12` (scaled by the largest entry).
    pub fn from_matrix(d: Dimension, entries: DMatrix<Complex<T>>) -> Result<Self, GramError> {
        let n = d.states();
        if entries.nrows() != n || entries.ncols() != n {
            return Err(GramError::Shape { expected: n, dim: n, got: entries.nrows() });
        }
        let g = GramMatrix { d, entries };
        let deviation = g.hermiticity_deviation();
        if deviation > 1e-12 {
            return Err(GramError::NonHermitian { deviation });
        }
        Ok(g)
    }

    #[cfg(test)]
    pub(crate) fn from_raw(d: Dimension, entries: DMatrix<Complex<T>>) -> Self {
        GramMatrix { d, entries }
    }

    pub fn dim(&self) -> Dimension {
        self.d
    }

    pub fn matrix(&self) -> &DMatrix<Complex<T>> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<Complex<T>> {
        self.entries
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> Complex<T> {
        self.entries[(a, b)]
    }

    /// `max |G[a][b] − conj(G[b][a])|` relative to `max |G|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.entries.nrows();
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                let x = self.entries[(a, b)];
                scale = scale.max(to_f64(x.modulus()));
                worst = worst.max(to_f64((x - self.entries[(b, a)].conj()).modulus()));
            }
        }
        if scale > 0.0 {
            worst / scale
        } else {
            0.0
        }
    }

    /// Arguments of the inter-basis entries, canonicalized to `[0, 2π)`.
    pub fn phases(&self) -> PhaseVector<T> {
        let layout = PhaseLayout::new(self.d);
        let phases = layout
            .pairs()
            .iter()
            .map(|&(a, b)| crate::scalar::canonical_angle(self.entries[(a, b)].argument()))
            .collect();
        PhaseVector::new(self.d, phases).expect("layout has the right length")
    }

    /// Real parts of the sorted eigenvalues (ascending).
    pub fn eigenvalues(&self) -> Vec<f64> {
        let eig = SymmetricEigen::new(self.entries.clone());
        let mut ev: Vec<f64> = eig.eigenvalues.iter().map(|&x| to_f64(x)).collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

/// Assemble the Gram matrix from its free phases.
///
/// Diagonal entries are `1/(d+1)`, intra-basis off-diagonal entries are
/// zero, and `G[a][b] = e^{±iφ}/((d+1)√d)` across bases with `+` for
/// `a < b`. The lower triangle is written as the exact conjugate of the
/// upper one.
pub fn build_gram<T: Real>(phi: &PhaseVector<T>) -> GramMatrix<T> {
    let d = phi.dim();
    let layout = PhaseLayout::new(d);
    build_gram_with(&layout, phi.as_slice())
}

pub(crate) fn build_gram_with<T: Real>(layout: &PhaseLayout, phases: &[T]) -> GramMatrix<T> {
    let d = layout.dim();
    let n = d.states();
    let mut g = DMatrix::from_element(n, n, Complex::new(T::zero(), T::zero()));
    fill_gram(layout, phases, &mut g);
    GramMatrix { d, entries: g }
}

/// Overwrite `g` with the Gram matrix of `phases`.
pub(crate) fn fill_gram<T: Real>(layout: &PhaseLayout, phases: &[T], g: &mut DMatrix<Complex<T>>) {
    let d = layout.dim();
    let n = d.states();
    let diag: T = real(d.diagonal_entry());
    let modulus: T = real(d.overlap_modulus());
    g.fill(Complex::new(T::zero(), T::zero()));
    for a in 0..n {
        g[(a, a)] = Complex::new(diag, T::zero());
    }
    for (&(a, b), &p) in layout.pairs().iter().zip(phases) {
        let z = cis(p) * modulus;
        g[(a, b)] = z;
        g[(b, a)] = z.conj();
    }
}

/// `d + 1` orthonormal bases of `C^d`, stored as `N` state vectors in flat
/// (basis-major) order.
#[derive(Clone, Debug, PartialEq)]
pub struct MubSet<T: Real = f64> {
    d: Dimension,
    states: Vec<DVector<Complex<T>>>,
}

impl<T: Real> MubSet<T> {
    pub fn new(d: Dimension, states: Vec<DVector<Complex<T>>>) -> Result<Self, GramError> {
        let n = d.states();
        if states.len() != n {
            return Err(GramError::Shape { expected: n, dim: d.get(), got: states.len() });
        }
        if let Some(bad) = states.iter().find(|s| s.len() != d.get()) {
            return Err(GramError::Shape { expected: n, dim: d.get(), got: bad.len() });
        }
        Ok(MubSet { d, states })
    }

    /// Build from `d + 1` bases of `d` vectors each.
    pub fn from_bases(d: Dimension, bases: Vec<Vec<DVector<Complex<T>>>>) -> Result<Self, GramError> {
        if bases.len() != d.bases() || bases.iter().any(|b| b.len() != d.get()) {
            return Err(GramError::Shape { expected: d.states(), dim: d.get(), got: bases.iter().map(Vec::len).sum() });
        }
        MubSet::new(d, bases.into_iter().flatten().collect())
    }

    pub fn dim(&self) -> Dimension {
        self.d
    }

    pub fn states(&self) -> &[DVector<Complex<T>>] {
        &self.states
    }

    pub fn state(&self, a: usize) -> &DVector<Complex<T>> {
        &self.states[a]
    }

    pub fn basis(&self, mu: usize) -> &[DVector<Complex<T>>] {
        let d = self.d.get();
        &self.states[mu * d..(mu + 1) * d]
    }

    /// `d × N` matrix whose columns are the states.
    pub fn to_matrix(&self) -> DMatrix<Complex<T>> {
        DMatrix::from_columns(&self.states)
    }

    /// Multiply state `a` by `e^{iθ}`.
    pub fn rephase(&mut self, a: usize, theta: T) {
        let c = cis(theta);
        self.states[a] *= c;
    }
}

/// Outcome of [`verify_mub_definition`].
#[derive(Clone, Debug, PartialEq)]
pub struct MubReport {
    /// `max |⟨ψ_i^μ|ψ_j^μ⟩ − δ_ij|`
    pub max_orthonormality_violation: f64,
    /// `max ||⟨ψ_i^μ|ψ_j^ν⟩|² − 1/d|`, `μ ≠ ν`
    pub max_unbiasedness_violation: f64,
    pub tol: f64,
    pub passed: bool,
}

/// Check both conditions of the MUB definition on every pair of states.
pub fn verify_mub_definition<T: Real>(m: &MubSet<T>, tol: f64) -> MubReport {
    let d = m.dim();
    let n = d.states();
    let inv_d = 1.0 / d.get() as f64;
    let mut ortho = 0.0f64;
    let mut unbiased = 0.0f64;
    for a in 0..n {
        for b in a..n {
            let ov = m.states[a].dotc(&m.states[b]);
            if d.same_basis(a, b) {
                let target = if a == b { 1.0 } else { 0.0 };
                let dev = (to_f64(ov.re) - target).hypot(to_f64(ov.im));
                ortho = ortho.max(dev);
            } else {
                unbiased = unbiased.max((to_f64(ov.norm_sqr()) - inv_d).abs());
            }
        }
    }
    MubReport {
        max_orthonormality_violation: ortho,
        max_unbiasedness_violation: unbiased,
        tol,
        passed: ortho < tol && unbiased < tol,
    }
}

/// Gram matrix `VV†` of an explicit MUB set together with the arguments of
/// its inter-basis entries.
pub fn gram_from_bases<T: Real>(m: &MubSet<T>) -> Result<(GramMatrix<T>, PhaseVector<T>), GramError> {
    gram_from_bases_with_tol(m, DEFAULT_UNBIASED_TOL)
}

/// [`gram_from_bases`] with an explicit modulus tolerance.
pub fn gram_from_bases_with_tol<T: Real>(
    m: &MubSet<T>,
    tol: f64,
) -> Result<(GramMatrix<T>, PhaseVector<T>), GramError> {
    let d = m.dim();
    let n = d.states();
    let v = m.to_matrix();
    let scale: T = real(d.diagonal_entry());
    let g = v.ad_mul(&v) * Complex::new(scale, T::zero());

    for mu in 0..d.bases() {
        let mut dev = 0.0f64;
        for i in 0..d.get() {
            for j in 0..d.get() {
                let ov = to_f64(g[(d.flat(mu, i), d.flat(mu, j))].modulus()) / d.diagonal_entry();
                let target = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((ov - target).abs());
            }
        }
        if dev > tol {
            return Err(GramError::NotOrthonormal { basis: mu, deviation: dev });
        }
    }

    let target = 1.0 / (d.get() as f64).sqrt();
    let mut offending = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            if d.same_basis(a, b) {
                continue;
            }
            let modulus = to_f64(g[(a, b)].modulus()) / d.diagonal_entry();
            if (modulus - target).abs() > tol {
                offending.push(OverlapViolation { a, b, modulus });
            }
        }
    }
    if !offending.is_empty() {
        return Err(GramError::NotUnbiased { tol, offending });
    }
    let gram = GramMatrix { d, entries: g };
    let phases = gram.phases();
    Ok((gram, phases))
}

/// Outcome of [`verify_gram_projection`].
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionReport {
    /// `max |(G² − G)[a][b]|`
    pub idempotency_residual: f64,
    /// Largest distance of an eigenvalue to the nearer of `{0, 1}`.
    pub max_eigen_distance: f64,
    pub trace: f64,
    /// Number of eigenvalues with `|λ| > tol`.
    pub rank: usize,
    pub eigenvalues: Vec<f64>,
    pub tol: f64,
    pub passed: bool,
}

/// Check that `G` is a rank-`d` orthogonal projector.
pub fn verify_gram_projection<T: Real>(g: &GramMatrix<T>, tol: f64) -> ProjectionReport {
    let m = g.matrix();
    let sq = m * m;
    let idempotency_residual = (&sq - m).iter().map(|z| to_f64(z.modulus())).fold(0.0, f64::max);
    let eigenvalues = g.eigenvalues();
    let max_eigen_distance = eigenvalues.iter().map(|&l| l.abs().min((l - 1.0).abs())).fold(0.0, f64::max);
    let trace = to_f64(m.trace().re);
    let rank = eigenvalues.iter().filter(|l| l.abs() > tol).count();
    let passed = idempotency_residual < tol && max_eigen_distance < tol && rank == g.dim().get();
    ProjectionReport { idempotency_residual, max_eigen_distance, trace, rank, eigenvalues, tol, passed }
}
