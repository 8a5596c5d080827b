//! Third- and fourth-order trace constraints `f = Tr G³`, `g = Tr G⁴`.
//!
//! Two independent routes are provided. The cosine expansions evaluate the
//! traces directly from the phases, one summation family at a time. The
//! matrix route multiplies dense Gram matrices. The optimizer uses the
//! matrix route through [`TraceEvaluator`]; the expansions exist to check it.
//!
//! Near a solution the matrix route is evaluated through the projector
//! residual `R = G² − G`:
//!
//! ```text
//! Tr G³ − d = s + Tr(GR)
//! Tr G⁴ − d = s + 2 Tr(GR) + ‖R‖²      with s = Tr G² − d = 0 analytically
//! ```
//!
//! which keeps the deviations accurate to a few ulps instead of losing
//! them to cancellation against `d`.

use nalgebra::{Complex, DMatrix};

use crate::dim::{Dimension, PhaseLayout};
use crate::error::TraceError;
use crate::gram::{build_gram_with, fill_gram, GramMatrix};
use crate::phases::PhaseVector;
use crate::scalar::{real, to_f64, Real};

/// Values of both trace constraints and the combined constraint function
/// `F = sqrt((f − d)² + (g − d)²)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstraintValue<T = f64> {
    /// `Tr G³`
    pub f: T,
    /// `Tr G⁴`
    pub g: T,
    /// `f − d`, evaluated without cancellation on the matrix route.
    pub f_dev: T,
    /// `g − d`
    pub g_dev: T,
}

impl<T: Real> ConstraintValue<T> {
    /// `F = sqrt((f − d)² + (g − d)²)`.
    pub fn value(&self) -> T {
        self.f_dev.hypot(self.g_dev)
    }

    /// `F' = (f − d)² + (g − d)²`, the smooth objective.
    pub fn squared(&self) -> T {
        self.f_dev * self.f_dev + self.g_dev * self.g_dev
    }

    fn from_traces(d: Dimension, f: T, g: T) -> Self {
        let dd: T = real(d.get() as f64);
        ConstraintValue { f, g, f_dev: f - dd, g_dev: g - dd }
    }
}

/// Which route [`objective_with`] evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TracePath {
    #[default]
    Matrix,
    Expansion,
}

// ---------------------------------------------------------------------------
// Cosine expansions.

struct PhaseLookup<'a, T: Real> {
    d: usize,
    layout: PhaseLayout,
    phases: &'a [T],
}

impl<'a, T: Real> PhaseLookup<'a, T> {
    fn new(phi: &'a PhaseVector<T>) -> Self {
        PhaseLookup { d: phi.dim().get(), layout: PhaseLayout::new(phi.dim()), phases: phi.as_slice() }
    }

    /// `φ_{χ(μ,i),χ(ν,j)}` for `μ < ν`.
    #[inline]
    fn at(&self, mu: usize, i: usize, nu: usize, j: usize) -> T {
        debug_assert!(mu < nu);
        let slot = self.layout.slot(mu * self.d + i, nu * self.d + j).expect("inter-basis pair");
        self.phases[slot]
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            cur.push(x);
            rec(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Sum over `i,k,l` and bases `μ < ν < ρ` of
/// `cos(φ_{μi,νk} + φ_{νk,ρl} − φ_{μi,ρl})`.
fn triangle_sum<T: Real>(p: &PhaseLookup<'_, T>) -> T {
    let d = p.d;
    let mut s = T::zero();
    for b in combinations(d + 1, 3) {
        let (mu, nu, rho) = (b[0], b[1], b[2]);
        for i in 0..d {
            for k in 0..d {
                let x = p.at(mu, i, nu, k);
                for l in 0..d {
                    s += (x + p.at(nu, k, rho, l) - p.at(mu, i, rho, l)).cos();
                }
            }
        }
    }
    s
}

/// Number of cosine terms in the triangle family, `d³·C(d+1, 3)`.
pub fn triangle_term_count(d: Dimension) -> usize {
    let d = d.get();
    d * d * d * combinations(d + 1, 3).len()
}

/// `Tr G³` from the cosine expansion
/// `(d+3d²)/(d+1)² + 6/(d^{3/2}(d+1)³) · Σ cos(triangle)`.
pub fn f_expansion<T: Real>(phi: &PhaseVector<T>) -> T {
    let lookup = PhaseLookup::new(phi);
    let d = phi.dim().get() as f64;
    let constant: T = real((d + 3.0 * d * d) / ((d + 1.0) * (d + 1.0)));
    let coeff: T = real(6.0 / (d.powf(1.5) * (d + 1.0).powi(3)));
    constant + coeff * triangle_sum(&lookup)
}

/// The seven four-phase cosine families of the `Tr G⁴` expansion, unscaled,
/// in printed order: the three four-basis terms, then the sums over
/// `ν<μ<γ`, `μ<ν<γ` (both with `i<k`), `μ<ρ<ν` (with `j<l`), and `μ<ν`
/// (with `i<k`, `j<l`).
pub fn g_families<T: Real>(phi: &PhaseVector<T>) -> [T; 7] {
    let p = PhaseLookup::new(phi);
    let d = p.d;
    let mut fam = [T::zero(); 7];

    for b in combinations(d + 1, 4) {
        let (mu, nu, rho, ga) = (b[0], b[1], b[2], b[3]);
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let a = p.at(mu, i, nu, j);
                        fam[0] += (a + p.at(nu, j, rho, k) + p.at(rho, k, ga, l) - p.at(mu, i, ga, l)).cos();
                        fam[1] += (a + p.at(nu, j, ga, l) - p.at(rho, k, ga, l) - p.at(mu, i, rho, k)).cos();
                        fam[2] +=
                            (p.at(mu, i, rho, k) - p.at(nu, j, rho, k) + p.at(nu, j, ga, l) - p.at(mu, i, ga, l)).cos();
                    }
                }
            }
        }
    }

    let triples = combinations(d + 1, 3);
    let state_pairs = combinations(d, 2);
    for ik in &state_pairs {
        let (i, k) = (ik[0], ik[1]);
        for j in 0..d {
            for l in 0..d {
                for t in &triples {
                    // ν < μ < γ
                    let (nu, mu, ga) = (t[0], t[1], t[2]);
                    fam[3] +=
                        (-p.at(nu, j, mu, i) + p.at(nu, j, mu, k) + p.at(mu, k, ga, l) - p.at(mu, i, ga, l)).cos();
                    // μ < ν < γ
                    let (mu, nu, ga) = (t[0], t[1], t[2]);
                    fam[4] += (p.at(mu, i, nu, j) - p.at(mu, k, nu, j) + p.at(mu, k, ga, l) - p.at(mu, i, ga, l)).cos();
                }
            }
        }
    }
    for jl in &state_pairs {
        let (j, l) = (jl[0], jl[1]);
        for i in 0..d {
            for k in 0..d {
                for t in &triples {
                    // μ < ρ < ν
                    let (mu, rho, nu) = (t[0], t[1], t[2]);
                    fam[5] +=
                        (p.at(mu, i, nu, j) - p.at(rho, k, nu, j) + p.at(rho, k, nu, l) - p.at(mu, i, nu, l)).cos();
                }
            }
        }
    }
    for ik in &state_pairs {
        let (i, k) = (ik[0], ik[1]);
        for jl in &state_pairs {
            let (j, l) = (jl[0], jl[1]);
            for b in combinations(d + 1, 2) {
                let (mu, nu) = (b[0], b[1]);
                fam[6] += (p.at(mu, i, nu, j) - p.at(mu, k, nu, j) + p.at(mu, k, nu, l) - p.at(mu, i, nu, l)).cos();
            }
        }
    }
    fam
}

/// Number of cosine terms in each of the seven [`g_families`].
pub fn g_family_term_counts(d: Dimension) -> [usize; 7] {
    let d = d.get();
    let c = |n, k| combinations(n, k).len();
    let four = d.pow(4) * c(d + 1, 4);
    let three = d * d * c(d, 2) * c(d + 1, 3);
    [four, four, four, three, three, three, c(d, 2) * c(d, 2) * c(d + 1, 2)]
}

/// Breakdown of the `Tr G⁴` expansion, for diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct GExpansion<T = f64> {
    pub constant: T,
    /// Scaled triangle contribution `24/(d^{3/2}(d+1)⁴) Σ cos(triangle)`.
    pub triangle: T,
    /// Scaled four-phase families, `8/(d²(d+1)⁴)` times [`g_families`].
    pub families: [T; 7],
}

impl<T: Real> GExpansion<T> {
    pub fn total(&self) -> T {
        self.families.iter().fold(self.constant + self.triangle, |acc, &x| acc + x)
    }
}

/// Term-by-term breakdown of [`g_expansion`].
pub fn g_expansion_terms<T: Real>(phi: &PhaseVector<T>) -> GExpansion<T> {
    let d = phi.dim().get() as f64;
    let lookup = PhaseLookup::new(phi);
    let constant: T = real(2.0 * d * d * (d + 3.0) / (d + 1.0).powi(3));
    let tri_coeff: T = real(24.0 / (d.powf(1.5) * (d + 1.0).powi(4)));
    let fam_coeff: T = real(8.0 / (d * d * (d + 1.0).powi(4)));
    let mut families = g_families(phi);
    for x in families.iter_mut() {
        *x *= fam_coeff;
    }
    GExpansion { constant, triangle: tri_coeff * triangle_sum(&lookup), families }
}

/// `Tr G⁴` from the cosine expansion.
///
/// Besides the seven four-phase families this contains the three-basis
/// triangle terms (walks with one diagonal step), whose sum is shared with
/// [`f_expansion`].
pub fn g_expansion<T: Real>(phi: &PhaseVector<T>) -> T {
    g_expansion_terms(phi).total()
}

// ---------------------------------------------------------------------------
// Matrix route.

fn check_hermitian<T: Real>(g: &GramMatrix<T>) -> Result<(), TraceError> {
    let deviation = g.hermiticity_deviation();
    if deviation > 1e-12 {
        return Err(TraceError::NonHermitianInput { deviation });
    }
    Ok(())
}

fn real_trace<T: Real>(z: Complex<T>) -> Result<T, TraceError> {
    let imag = to_f64(z.im);
    let scale = to_f64(z.re).abs().max(1.0);
    if imag.abs() > 1e-12 * scale {
        return Err(TraceError::ComplexTrace { imag });
    }
    Ok(z.re)
}

/// `Re Tr G³` by dense products.
pub fn f_matrix<T: Real>(g: &GramMatrix<T>) -> Result<T, TraceError> {
    check_hermitian(g)?;
    let m = g.matrix();
    let sq = m * m;
    real_trace(sq.component_mul(&m.transpose()).sum())
}

/// `Re Tr G⁴` by dense products.
pub fn g_matrix<T: Real>(g: &GramMatrix<T>) -> Result<T, TraceError> {
    check_hermitian(g)?;
    let m = g.matrix();
    let sq = m * m;
    real_trace(sq.component_mul(&sq.transpose()).sum())
}

/// Both constraints on the default (matrix) route.
pub fn objective<T: Real>(phi: &PhaseVector<T>) -> ConstraintValue<T> {
    objective_with(phi, TracePath::Matrix)
}

pub fn objective_with<T: Real>(phi: &PhaseVector<T>, path: TracePath) -> ConstraintValue<T> {
    match path {
        TracePath::Matrix => TraceEvaluator::new(phi.dim()).evaluate(phi.as_slice()),
        TracePath::Expansion => ConstraintValue::from_traces(phi.dim(), f_expansion(phi), g_expansion(phi)),
    }
}

/// Gradient of `F' = (f − d)² + (g − d)²` with respect to every stored phase.
pub fn gradient<T: Real>(phi: &PhaseVector<T>) -> Vec<T> {
    let mut grad = vec![T::zero(); phi.len()];
    TraceEvaluator::new(phi.dim()).squared_with_gradient(phi.as_slice(), &mut grad);
    grad
}

/// True iff every eigenvalue of `G` is within `1e-8` of 0 or 1 and exactly
/// `d` of them are near 1.
pub fn eigenvalue_sufficiency_check<T: Real>(g: &GramMatrix<T>) -> bool {
    const TOL: f64 = 1e-8;
    let ev = g.eigenvalues();
    let ones = ev.iter().filter(|&&l| (l - 1.0).abs() < TOL).count();
    let zeros = ev.iter().filter(|&&l| l.abs() < TOL).count();
    ones == g.dim().get() && ones + zeros == ev.len()
}

/// Neumaier summation.
fn compensated_sum<T: Real>(terms: impl Iterator<Item = T>) -> T {
    let mut sum = T::zero();
    let mut carry = T::zero();
    for t in terms {
        let next = sum + t;
        if sum.abs() >= t.abs() {
            carry += (sum - next) + t;
        } else {
            carry += (t - next) + sum;
        }
        sum = next;
    }
    sum + carry
}

/// Reusable buffers for repeated evaluation at one dimension.
#[derive(Clone, Debug)]
pub struct TraceEvaluator<T: Real = f64> {
    layout: PhaseLayout,
    g: DMatrix<Complex<T>>,
    r: DMatrix<Complex<T>>,
    gr: DMatrix<Complex<T>>,
}

impl<T: Real> TraceEvaluator<T> {
    pub fn new(d: Dimension) -> Self {
        let n = d.states();
        let zero = Complex::new(T::zero(), T::zero());
        TraceEvaluator {
            layout: PhaseLayout::new(d),
            g: DMatrix::from_element(n, n, zero),
            r: DMatrix::from_element(n, n, zero),
            gr: DMatrix::from_element(n, n, zero),
        }
    }

    pub fn dim(&self) -> Dimension {
        self.layout.dim()
    }

    pub fn layout(&self) -> &PhaseLayout {
        &self.layout
    }

    pub fn gram(&self, phases: &[T]) -> GramMatrix<T> {
        build_gram_with(&self.layout, phases)
    }

    /// Fill `g` and `r = g² − g`; returns `(Tr G² − d, Re Tr(GR), ‖R‖²)`.
    fn load(&mut self, phases: &[T]) -> (T, T, T) {
        fill_gram(&self.layout, phases, &mut self.g);
        self.g.mul_to(&self.g, &mut self.r);
        self.r -= &self.g;
        let dd: T = real(self.dim().get() as f64);
        let s2 = compensated_sum(self.g.iter().map(|z| z.norm_sqr())) - dd;
        // Tr(GR) = Σ G_ab R_ba = Σ G_ab conj(R_ab).
        let tgr = compensated_sum(self.g.iter().zip(self.r.iter()).map(|(x, y)| (*x * y.conj()).re));
        let rr = compensated_sum(self.r.iter().map(|z| z.norm_sqr()));
        (s2, tgr, rr)
    }

    pub fn evaluate(&mut self, phases: &[T]) -> ConstraintValue<T> {
        let (s2, tgr, rr) = self.load(phases);
        let two: T = real(2.0);
        let f_dev = s2 + tgr;
        let g_dev = s2 + two * tgr + rr;
        let dd: T = real(self.dim().get() as f64);
        ConstraintValue { f: dd + f_dev, g: dd + g_dev, f_dev, g_dev }
    }

    /// `F'` and its gradient.
    ///
    /// With `G_ab = c·e^{iφ}` (`a < b`), `∂Tr Gᵏ/∂φ = −2k·Im((Gᵏ⁻¹)_ba G_ab)`;
    /// `G² = G + R` and `G³ = G + R + GR` on the diagonal-free part.
    pub fn squared_with_gradient(&mut self, phases: &[T], grad: &mut [T]) -> ConstraintValue<T> {
        let value = self.evaluate(phases);
        self.g.mul_to(&self.r, &mut self.gr);
        let two: T = real(2.0);
        let six: T = real(6.0);
        let eight: T = real(8.0);
        let wf = two * value.f_dev;
        let wg = two * value.g_dev;
        for (out, &(a, b)) in grad.iter_mut().zip(self.layout.pairs()) {
            let gab = self.g[(a, b)];
            let df = -six * (self.r[(b, a)] * gab).im;
            let dg = -eight * ((self.gr[(b, a)] + self.r[(b, a)]) * gab).im;
            *out = wf * df + wg * dg;
        }
        value
    }

    /// Projector residual `h = ‖G² − G‖²_F` (equal to `g − 2f + d` on the
    /// phase manifold) and its gradient `∂h/∂φ = −4 Im(M_ba G_ab)` with
    /// `M = 2GR − R`.
    pub fn residual_with_gradient(&mut self, phases: &[T], grad: &mut [T]) -> T {
        let (_, _, rr) = self.load(phases);
        self.g.mul_to(&self.r, &mut self.gr);
        let two: T = real(2.0);
        let four: T = real(4.0);
        for (out, &(a, b)) in grad.iter_mut().zip(self.layout.pairs()) {
            let m = self.gr[(b, a)] * two - self.r[(b, a)];
            *out = -four * (m * self.g[(a, b)]).im;
        }
        rr
    }

    /// `F' + ‖G² − G‖²_F` and its gradient, returned with the constraint
    /// values. Both terms vanish exactly on the solution set; the residual
    /// term keeps the objective quadratic near a solution.
    pub fn augmented_with_gradient(&mut self, phases: &[T], grad: &mut [T]) -> (ConstraintValue<T>, T) {
        let (s2, tgr, rr) = self.load(phases);
        let two: T = real(2.0);
        let dd: T = real(self.dim().get() as f64);
        let f_dev = s2 + tgr;
        let g_dev = s2 + two * tgr + rr;
        let value = ConstraintValue { f: dd + f_dev, g: dd + g_dev, f_dev, g_dev };
        self.g.mul_to(&self.r, &mut self.gr);
        let four: T = real(4.0);
        let six: T = real(6.0);
        let eight: T = real(8.0);
        let wf = two * f_dev;
        let wg = two * g_dev;
        for (out, &(a, b)) in grad.iter_mut().zip(self.layout.pairs()) {
            let gab = self.g[(a, b)];
            let r = self.r[(b, a)];
            let gr = self.gr[(b, a)];
            let df = -six * (r * gab).im;
            let dg = -eight * ((gr + r) * gab).im;
            let dh = -four * ((gr * two - r) * gab).im;
            *out = wf * df + wg * dg + dh;
        }
        (value, value.squared() + rr)
    }

    /// `‖G² − G‖²_F` alone.
    pub fn residual(&mut self, phases: &[T]) -> T {
        self.load(phases).2
    }

    /// `G² − G` from the last evaluation.
    pub(crate) fn last_residual(&self) -> &DMatrix<Complex<T>> {
        &self.r
    }

    pub(crate) fn last_gram(&self) -> &DMatrix<Complex<T>> {
        &self.g
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gram::build_gram;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_phases(d: usize, rng: &mut ChaCha8Rng) -> PhaseVector<f64> {
        let dim = Dimension::new(d).unwrap();
        PhaseVector::new(dim, (0..dim.phase_count()).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect())
            .unwrap()
    }

    #[test]
    fn zero_phase_f_value() {
        let d = Dimension::new(3).unwrap();
        let phi = PhaseVector::<f64>::zeros(d);
        let expected = 1.875 + 108.0 * 6.0 / (3f64.powf(1.5) * 64.0);
        assert!((f_expansion(&phi) - expected).abs() < 1e-12);
        assert!((f_matrix(&build_gram(&phi)).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 3.823_557_2).abs() < 1e-6);
    }

    #[test]
    fn zero_phase_d2_f_value() {
        let d = Dimension::new(2).unwrap();
        let phi = PhaseVector::<f64>::zeros(d);
        let expected = 14.0 / 9.0 + 6.0 / (2f64.powf(1.5) * 27.0) * 8.0;
        assert!((f_expansion(&phi) - expected).abs() < 1e-12);
        assert!((f_matrix(&build_gram(&phi)).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn term_counts() {
        let d3 = Dimension::new(3).unwrap();
        assert_eq!(triangle_term_count(d3), 108);
        assert_eq!(triangle_term_count(Dimension::new(2).unwrap()), 8);
        // d=3: 81·1 for the 4-basis families, 9·3·4 = 108, 3·3·6 = 54.
        assert_eq!(g_family_term_counts(d3), [81, 81, 81, 108, 108, 108, 54]);
        // Every family evaluates to its term count at φ = 0.
        let fam = g_families(&PhaseVector::<f64>::zeros(d3));
        for (x, n) in fam.iter().zip(g_family_term_counts(d3)) {
            assert_eq!(*x, n as f64);
        }
    }

    #[test]
    fn expansions_match_matrix_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in 2..=4 {
            for _ in 0..20 {
                let phi = random_phases(d, &mut rng);
                let g = build_gram(&phi);
                assert!((f_expansion(&phi) - f_matrix(&g).unwrap()).abs() < 1e-10);
                assert!((g_expansion(&phi) - g_matrix(&g).unwrap()).abs() < 1e-10);
                let ev = objective(&phi);
                assert!((ev.f - f_matrix(&g).unwrap()).abs() < 1e-12);
                assert!((ev.g - g_matrix(&g).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn projector_gives_d() {
        // diag(1, 1, 1, 0, ..., 0) as a synthetic rank-3 projector.
        let d = Dimension::new(3).unwrap();
        let mut m = DMatrix::from_element(12, 12, Complex::new(0.0f64, 0.0));
        for a in 0..3 {
            m[(a, a)] = Complex::new(1.0, 0.0);
        }
        let g = GramMatrix::from_matrix(d, m).unwrap();
        assert!((f_matrix(&g).unwrap() - 3.0).abs() < 1e-15);
        assert!((g_matrix(&g).unwrap() - 3.0).abs() < 1e-15);
        assert!(eigenvalue_sufficiency_check(&g));
        let neg = GramMatrix::from_matrix(d, -g.matrix().clone()).unwrap();
        assert!(!eigenvalue_sufficiency_check(&neg));
    }

    #[test]
    fn gradients_match_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let phi = random_phases(3, &mut rng);
        let mut ev = TraceEvaluator::new(phi.dim());
        let mut g1 = vec![0.0; phi.len()];
        let mut g2 = vec![0.0; phi.len()];
        ev.squared_with_gradient(phi.as_slice(), &mut g1);
        ev.residual_with_gradient(phi.as_slice(), &mut g2);
        let h = 1e-6;
        let mut x = phi.as_slice().to_vec();
        for k in 0..phi.len() {
            let x0 = x[k];
            x[k] = x0 + h;
            let (fp, rp) = (ev.evaluate(&x).squared(), ev.residual(&x));
            x[k] = x0 - h;
            let (fm, rm) = (ev.evaluate(&x).squared(), ev.residual(&x));
            x[k] = x0;
            assert!((g1[k] - (fp - fm) / (2.0 * h)).abs() < 1e-7);
            assert!((g2[k] - (rp - rm) / (2.0 * h)).abs() < 1e-7);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let d = Dimension::new(2).unwrap();
        let m = DMatrix::from_fn(6, 6, |a, b| Complex::new(0.0, (a as f64) - (b as f64) * 0.5));
        let g = GramMatrix::from_raw(d, m);
        assert!(matches!(f_matrix(&g), Err(TraceError::NonHermitianInput { .. })));
        assert!(matches!(g_matrix(&g), Err(TraceError::NonHermitianInput { .. })));
    }
}
