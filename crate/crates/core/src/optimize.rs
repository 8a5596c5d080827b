//! Multi-start two-stage minimization of the trace constraints.
//!
//! Each start draws i.i.d. uniform phases on `[0, 2π)` and minimizes
//! `F' + ‖G² − G‖²` with `F' = (f − d)² + (g − d)²`, first with
//! Polak–Ribière conjugate gradient and then with dense BFGS, both under a
//! strong Wolfe line search. Acceptance is decided on `F` alone.
//!
//! `f − d` and `g − d` vanish to second order at a solution, so `F'` on its
//! own is quartic there and quasi-Newton iterations stall around `F ≈ 1e-9`.
//! The residual term is quadratic and removes the stall; it also reaches
//! far more starts at d = 3. An optional Gauss–Newton polish on `G² − G`
//! squeezes out the last digits.
//!
//! Random streams: run `r` of a batch with seed `s` uses
//! `ChaCha8Rng::seed_from_u64(s)` with stream `r · max_restarts + k` for its
//! `k`-th restart, so every start is reproducible on any platform and
//! independent of thread scheduling.

use std::time::Instant;

use nalgebra::{Complex, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dim::Dimension;
use crate::error::PolishError;
use crate::phases::PhaseVector;
use crate::scalar::canonical_angle;
use crate::traces::{eigenvalue_sufficiency_check, TraceEvaluator};

/// `F` below which the Gauss–Newton polish is attempted.
pub const POLISH_ENTRY: f64 = 1e-8;
/// Noise floor of `F` in double precision.
pub const POLISH_FLOOR: f64 = 5e-15;

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub d: Dimension,
    pub seed: u64,
    /// Starts per search; the search stops at the first accepted one.
    pub max_restarts: usize,
    pub stage1_iters: usize,
    pub stage2_iters: usize,
    /// Acceptance threshold on `F`.
    pub accept_threshold: f64,
    pub polish: bool,
    /// Keep the stage-2 objective history in the result.
    pub record_trace: bool,
}

impl SearchConfig {
    pub fn new(d: Dimension) -> Self {
        SearchConfig {
            d,
            seed: 0,
            max_restarts: 1,
            stage1_iters: 200,
            stage2_iters: 500,
            accept_threshold: 1e-12,
            polish: true,
            record_trace: false,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Why a local minimization stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    /// Gradient or objective below its tolerance.
    Converged,
    IterationCap,
    /// No step along the search direction decreased the objective.
    LineSearchFailure,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub phi: PhaseVector,
    /// `F` at `phi`.
    pub f_final: f64,
    pub accepted: bool,
    /// Iterations spent in stage 1 (CG) and stage 2 (BFGS).
    pub iterations: (usize, usize),
    pub wall_time: f64,
    /// Restart within the search that produced `phi`.
    pub restart_index: usize,
    pub stage1: Termination,
    pub stage2: Termination,
    pub polished: bool,
    /// Stage-2 objective after every accepted step, when requested.
    pub stage2_trace: Option<Vec<f64>>,
}

/// i.i.d. uniform phases on `[0, 2π)`.
pub fn random_init<R: Rng + ?Sized>(d: Dimension, rng: &mut R) -> PhaseVector {
    let phases = (0..d.phase_count()).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
    PhaseVector::new(d, phases).expect("length matches")
}

/// Random generator for a given start, see the module docs.
pub fn start_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

// ---------------------------------------------------------------------------
// Line search.

struct LineSearch {
    c1: f64,
    c2: f64,
    max_evals: usize,
}

struct Step {
    alpha: f64,
    f: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy_into(out: &mut [f64], x: &[f64], alpha: f64, p: &[f64]) {
    for ((o, &xi), &pi) in out.iter_mut().zip(x).zip(p) {
        *o = xi + alpha * pi;
    }
}

/// Minimizer of the cubic through `(a, fa, da)`, `(b, fb, db)`, clamped into
/// the inner 80% of the bracket.
fn cubic_step(a: f64, fa: f64, da: f64, b: f64, fb: f64, db: f64) -> f64 {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let w = hi - lo;
    let d1 = da + db - 3.0 * (fa - fb) / (a - b);
    let disc = d1 * d1 - da * db;
    let mut t = if disc >= 0.0 {
        let d2 = (b - a).signum() * disc.sqrt();
        b - (b - a) * (db + d2 - d1) / (db - da + 2.0 * d2)
    } else {
        f64::NAN
    };
    if !t.is_finite() {
        t = 0.5 * (lo + hi);
    }
    t.clamp(lo + 0.1 * w, hi - 0.1 * w)
}

impl LineSearch {
    /// Strong Wolfe search along `p`. On success `x_new`, `g_new` hold the
    /// accepted point.
    #[allow(clippy::too_many_arguments)]
    fn search<F>(
        &self,
        fun: &mut F,
        x: &[f64],
        f0: f64,
        g0: &[f64],
        p: &[f64],
        alpha0: f64,
        x_new: &mut [f64],
        g_new: &mut [f64],
    ) -> Option<Step>
    where
        F: FnMut(&[f64], &mut [f64]) -> f64,
    {
        let d0 = dot(g0, p);
        if d0.is_nan() || d0 >= 0.0 {
            return None;
        }
        let mut eval = |alpha: f64, xn: &mut [f64], gn: &mut [f64]| {
            axpy_into(xn, x, alpha, p);
            let f = fun(xn, gn);
            (f, dot(gn, p))
        };
        let armijo = |alpha: f64, f: f64| f <= f0 + self.c1 * alpha * d0;
        let curvature = |d: f64| d.abs() <= -self.c2 * d0;

        // Best point satisfying sufficient decrease, as a fallback.
        let mut best: Option<(f64, f64)> = None;
        let note = |alpha: f64, f: f64, best: &mut Option<(f64, f64)>| {
            if armijo(alpha, f) && best.is_none_or(|(_, fb)| f < fb) {
                *best = Some((alpha, f));
            }
        };

        let (mut a_prev, mut f_prev, mut d_prev) = (0.0, f0, d0);
        let mut alpha = alpha0;
        let mut evals = 0;
        let (mut lo, mut hi);
        loop {
            let (f, d) = eval(alpha, x_new, g_new);
            evals += 1;
            note(alpha, f, &mut best);
            if !f.is_finite() {
                lo = (a_prev, f_prev, d_prev);
                hi = (alpha, f64::INFINITY, 0.0);
                break;
            }
            if !armijo(alpha, f) || (evals > 1 && f >= f_prev) {
                lo = (a_prev, f_prev, d_prev);
                hi = (alpha, f, d);
                break;
            }
            if curvature(d) {
                return Some(Step { alpha, f });
            }
            if d >= 0.0 {
                lo = (alpha, f, d);
                hi = (a_prev, f_prev, d_prev);
                break;
            }
            if evals >= self.max_evals {
                return self.fallback(fun, x, p, best, x_new, g_new);
            }
            a_prev = alpha;
            f_prev = f;
            d_prev = d;
            alpha *= 2.0;
        }

        // Zoom.
        while evals < self.max_evals {
            let a = if hi.1.is_finite() { cubic_step(lo.0, lo.1, lo.2, hi.0, hi.1, hi.2) } else { 0.5 * (lo.0 + hi.0) };
            if (hi.0 - lo.0).abs() < 1e-16 * lo.0.abs().max(1.0) {
                break;
            }
            let (f, d) = eval(a, x_new, g_new);
            evals += 1;
            note(a, f, &mut best);
            if !armijo(a, f) || f >= lo.1 {
                hi = (a, f, d);
            } else {
                if curvature(d) {
                    return Some(Step { alpha: a, f });
                }
                if d * (hi.0 - lo.0) >= 0.0 {
                    hi = lo;
                }
                lo = (a, f, d);
            }
        }
        self.fallback(fun, x, p, best, x_new, g_new)
    }

    fn fallback<F>(
        &self,
        fun: &mut F,
        x: &[f64],
        p: &[f64],
        best: Option<(f64, f64)>,
        x_new: &mut [f64],
        g_new: &mut [f64],
    ) -> Option<Step>
    where
        F: FnMut(&[f64], &mut [f64]) -> f64,
    {
        let (alpha, _) = best?;
        axpy_into(x_new, x, alpha, p);
        let f = fun(x_new, g_new);
        Some(Step { alpha, f })
    }
}

// ---------------------------------------------------------------------------
// Local minimizers.

struct LocalOutcome {
    x: Vec<f64>,
    #[allow(dead_code)]
    f: f64,
    iterations: usize,
    termination: Termination,
}

/// Polak–Ribière (PR+) nonlinear conjugate gradient. Falls back to steepest
/// descent whenever the conjugate direction is not a descent direction or
/// the line search fails along it.
fn conjugate_gradient<F>(fun: &mut F, x0: Vec<f64>, max_iters: usize, gtol: f64, ftol: f64) -> LocalOutcome
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let n = x0.len();
    let ls = LineSearch { c1: 1e-4, c2: 0.1, max_evals: 30 };
    let mut x = x0;
    let mut g = vec![0.0; n];
    let mut f = fun(&x, &mut g);
    let mut p: Vec<f64> = g.iter().map(|v| -v).collect();
    let mut x_new = vec![0.0; n];
    let mut g_new = vec![0.0; n];
    let mut alpha = 1.0 / dot(&g, &g).sqrt().max(1e-300);

    for it in 0..max_iters {
        let gnorm = dot(&g, &g).sqrt();
        if gnorm < gtol || f < ftol {
            return LocalOutcome { x, f, iterations: it, termination: Termination::Converged };
        }
        let mut slope = dot(&g, &p);
        if slope >= 0.0 {
            p.iter_mut().zip(&g).for_each(|(pi, gi)| *pi = -gi);
            slope = -gnorm * gnorm;
        }
        let step = match ls.search(fun, &x, f, &g, &p, alpha, &mut x_new, &mut g_new) {
            Some(s) => Some(s),
            None => {
                // Restart along steepest descent.
                p.iter_mut().zip(&g).for_each(|(pi, gi)| *pi = -gi);
                slope = -gnorm * gnorm;
                ls.search(fun, &x, f, &g, &p, 1.0 / gnorm, &mut x_new, &mut g_new)
            }
        };
        let Some(step) = step else {
            return LocalOutcome { x, f, iterations: it, termination: Termination::LineSearchFailure };
        };
        let gg = dot(&g, &g);
        let beta = (dot(&g_new, &g_new) - dot(&g_new, &g)) / gg;
        let beta = beta.max(0.0);
        std::mem::swap(&mut x, &mut x_new);
        std::mem::swap(&mut g, &mut g_new);
        f = step.f;
        for (pi, gi) in p.iter_mut().zip(&g) {
            *pi = -gi + beta * *pi;
        }
        // Next initial step from the previous one, scaled by the slope ratio.
        let slope_new = dot(&g, &p);
        alpha = if slope_new < 0.0 { (step.alpha * slope / slope_new).min(10.0 * step.alpha) } else { step.alpha };
        if !alpha.is_finite() || alpha <= 0.0 {
            alpha = step.alpha;
        }
    }
    LocalOutcome { x, f, iterations: max_iters, termination: Termination::IterationCap }
}

/// Dense BFGS on the inverse Hessian.
fn bfgs<F, S>(
    fun: &mut F,
    x0: Vec<f64>,
    max_iters: usize,
    gtol: f64,
    mut stop: S,
    mut trace: Option<&mut Vec<f64>>,
) -> LocalOutcome
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
    S: FnMut(f64) -> bool,
{
    let n = x0.len();
    let ls = LineSearch { c1: 1e-4, c2: 0.9, max_evals: 30 };
    let mut x = x0;
    let mut g = vec![0.0; n];
    let mut f = fun(&x, &mut g);
    let mut h = DMatrix::<f64>::identity(n, n);
    let mut scaled = false;
    let mut x_new = vec![0.0; n];
    let mut g_new = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut s = DVector::<f64>::zeros(n);
    let mut y = DVector::<f64>::zeros(n);
    let mut hy = DVector::<f64>::zeros(n);
    let mut flat_steps = 0;

    for it in 0..max_iters {
        if flat_steps >= 5 {
            return LocalOutcome { x, f, iterations: it, termination: Termination::Converged };
        }
        if stop(f) || dot(&g, &g).sqrt() < gtol {
            return LocalOutcome { x, f, iterations: it, termination: Termination::Converged };
        }
        let gv = DVector::from_column_slice(&g);
        let dir = -(&h * &gv);
        p.copy_from_slice(dir.as_slice());
        let mut step = ls.search(fun, &x, f, &g, &p, 1.0, &mut x_new, &mut g_new);
        if step.is_none() {
            // Reset the curvature model and retry along steepest descent.
            h.fill_with_identity();
            scaled = false;
            let gnorm = dot(&g, &g).sqrt();
            p.iter_mut().zip(&g).for_each(|(pi, gi)| *pi = -gi);
            step = ls.search(fun, &x, f, &g, &p, 1.0 / gnorm.max(1e-300), &mut x_new, &mut g_new);
        }
        let Some(step) = step else {
            return LocalOutcome { x, f, iterations: it, termination: Termination::LineSearchFailure };
        };
        for i in 0..n {
            s[i] = x_new[i] - x[i];
            y[i] = g_new[i] - g[i];
        }
        let sy = s.dot(&y);
        if sy > 1e-12 * s.norm() * y.norm() && sy > 0.0 {
            if !scaled {
                h.fill_with_identity();
                h *= sy / y.dot(&y);
                scaled = true;
            }
            // H ← (I − ρsyᵀ) H (I − ρysᵀ) + ρssᵀ
            let rho = 1.0 / sy;
            h.mul_to(&y, &mut hy);
            let yhy = y.dot(&hy);
            h.ger(-rho, &hy, &s, 1.0);
            h.ger(-rho, &s, &hy, 1.0);
            h.ger(rho * rho * yhy + rho, &s, &s, 1.0);
        }
        std::mem::swap(&mut x, &mut x_new);
        std::mem::swap(&mut g, &mut g_new);
        // Rounding floor: progress below 1e-10 relative on five steps running.
        flat_steps = if f - step.f <= 1e-10 * f { flat_steps + 1 } else { 0 };
        f = step.f;
        if let Some(t) = trace.as_deref_mut() {
            t.push(f);
        }
    }
    LocalOutcome { x, f, iterations: max_iters, termination: Termination::IterationCap }
}

// ---------------------------------------------------------------------------
// Polish.

/// Gauss–Newton on the projector residual `G² − G`.
///
/// Requires `F(phi) < POLISH_ENTRY`; a point farther out is reported as
/// [`PolishError::PolishDiverged`] without iterating. `F` is quadratic in the
/// distance to the solution while the residual is linear, so iteration
/// continues past `F ≤ max(target, POLISH_FLOOR)` until the residual stops
/// shrinking; this pins the phases down to rounding level. Fails if `F`
/// grows on three consecutive steps. Output phases lie in `[0, 2π)`.
pub fn polish(phi: &PhaseVector, target: f64) -> Result<PhaseVector, PolishError> {
    let d = phi.dim();
    let mut ev = TraceEvaluator::<f64>::new(d);
    let start = ev.evaluate(phi.as_slice()).value();
    if start.is_nan() || start >= POLISH_ENTRY {
        return Err(PolishError::PolishDiverged { start, end: start, steps: 0 });
    }
    let goal = target.max(POLISH_FLOOR);
    let mut x = phi.as_slice().to_vec();
    let mut best_x = x.clone();
    let mut best_h = ev.residual(&x);
    let mut prev_f = start;
    let mut rises = 0;
    let mut stalls = 0;
    let mut steps = 0;

    while steps < 30 && best_h > 0.0 {
        ev.residual(&x);
        let delta = gauss_newton_step(&ev);
        for (xi, di) in x.iter_mut().zip(delta.iter()) {
            *xi += di;
        }
        steps += 1;
        let f = ev.evaluate(&x).value();
        let h = ev.residual(&x);
        if f > prev_f && f > goal {
            rises += 1;
            if rises >= 3 {
                return Err(PolishError::PolishDiverged { start, end: f, steps });
            }
        } else {
            rises = 0;
        }
        prev_f = f;
        if h < best_h {
            stalls = if h > 0.25 * best_h { stalls + 1 } else { 0 };
            best_h = h;
            best_x.copy_from_slice(&x);
        } else {
            stalls += 1;
        }
        if stalls >= 2 {
            break;
        }
    }
    let phases = best_x.into_iter().map(canonical_angle).collect();
    Ok(PhaseVector::new(d, phases).expect("length preserved"))
}

/// Minimum-norm Gauss–Newton step for the residual held by `ev`.
fn gauss_newton_step(ev: &TraceEvaluator<f64>) -> DVector<f64> {
    let layout = ev.layout();
    let n = layout.dim().states();
    let g = ev.last_gram();
    let r = ev.last_residual();
    let rows = n * n; // n real diagonal rows + n(n−1) off-diagonal re/im rows
    let cols = layout.pairs().len();

    let mut res = DVector::<f64>::zeros(rows);
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            res[k] = r[(i, j)].re;
            k += 1;
            if i < j {
                res[k] = r[(i, j)].im;
                k += 1;
            }
        }
    }

    let zero = Complex::new(0.0, 0.0);
    let iu = Complex::new(0.0, 1.0);
    let mut scratch = DMatrix::from_element(n, n, zero);
    let mut jac = DMatrix::<f64>::zeros(rows, cols);
    // Row offset of entry (i, j), i ≤ j. Rows before row i: Σ_{t<i} (1 + 2(n−1−t)).
    let offset = |i: usize, j: usize| -> usize {
        let before = i * (2 * n - i);
        before + if j == i { 0 } else { 1 + 2 * (j - i - 1) }
    };

    for (col, &(a, b)) in layout.pairs().iter().enumerate() {
        let gab = iu * g[(a, b)];
        let gba = -(iu * g[(b, a)]);
        // dR = dG·G + G·dG − dG with dG = gab·E_ab + gba·E_ba.
        for j in 0..n {
            scratch[(a, j)] += gab * g[(b, j)];
            scratch[(b, j)] += gba * g[(a, j)];
        }
        for i in 0..n {
            scratch[(i, b)] += g[(i, a)] * gab;
            scratch[(i, a)] += g[(i, b)] * gba;
        }
        scratch[(a, b)] -= gab;
        scratch[(b, a)] -= gba;

        let mut emit = |i: usize, j: usize, z: Complex<f64>| {
            let (i, j, z) = if i <= j { (i, j, z) } else { (j, i, z.conj()) };
            let o = offset(i, j);
            jac[(o, col)] = z.re;
            if i < j {
                jac[(o + 1, col)] = z.im;
            }
        };
        // Touched entries are rows a, b and columns a, b; each (i, j) with
        // i ≤ j is emitted from its own position in the upper triangle.
        for &row in &[a, b] {
            for j in 0..n {
                if row <= j {
                    emit(row, j, scratch[(row, j)]);
                }
            }
        }
        for &c in &[a, b] {
            for i in 0..n {
                if i <= c && i != a && i != b {
                    emit(i, c, scratch[(i, c)]);
                }
            }
        }
        for &row in &[a, b] {
            for j in 0..n {
                scratch[(row, j)] = zero;
            }
        }
        for &c in &[a, b] {
            for i in 0..n {
                scratch[(i, c)] = zero;
            }
        }
    }

    let jtj = jac.tr_mul(&jac);
    let jtr = jac.tr_mul(&res);
    let scale = (0..cols).map(|i| jtj[(i, i)]).fold(0.0, f64::max).max(1e-300);
    let mut lambda = 1e-12 * scale;
    loop {
        let mut m = jtj.clone();
        for i in 0..cols {
            m[(i, i)] += lambda;
        }
        if let Some(ch) = m.cholesky() {
            return -ch.solve(&jtr);
        }
        lambda *= 100.0;
    }
}

// ---------------------------------------------------------------------------
// Drivers.

/// One local minimization from `start`, including the optional polish.
pub fn minimize_from(config: &SearchConfig, start: PhaseVector) -> SearchResult {
    let t0 = Instant::now();
    let d = config.d;
    let mut ev = TraceEvaluator::<f64>::new(d);
    let mut fun = |x: &[f64], g: &mut [f64]| ev.augmented_with_gradient(x, g).1;
    // The objective bounds F'; stop well below the acceptance threshold.
    let stop_below = (config.accept_threshold * 1e-1).powi(2);

    let s1 = conjugate_gradient(&mut fun, start.into_vec(), config.stage1_iters, 1e-8, stop_below);
    let mut trace = config.record_trace.then(Vec::new);
    let s2 = bfgs(&mut fun, s1.x, config.stage2_iters, 1e-300, |f| f < stop_below, trace.as_mut());

    let mut phi = PhaseVector::new(d, s2.x.into_iter().map(canonical_angle).collect()).expect("length");
    let mut ev = TraceEvaluator::<f64>::new(d);
    let mut f_final = ev.evaluate(phi.as_slice()).value();
    let mut polished = false;
    if config.polish && f_final < POLISH_ENTRY {
        if let Ok(p) = polish(&phi, config.accept_threshold * 1e-3) {
            phi = p;
            f_final = ev.evaluate(phi.as_slice()).value();
            polished = true;
        }
    }
    let accepted = f_final < config.accept_threshold && eigenvalue_sufficiency_check(&ev.gram(phi.as_slice()));
    SearchResult {
        phi,
        f_final,
        accepted,
        iterations: (s1.iterations, s2.iterations),
        wall_time: t0.elapsed().as_secs_f64(),
        restart_index: 0,
        stage1: s1.termination,
        stage2: s2.termination,
        polished,
        stage2_trace: trace,
    }
}

/// Multi-start search with the streams of run 0.
pub fn minimize(config: &SearchConfig) -> SearchResult {
    minimize_run(config, 0)
}

/// Multi-start search for run `run` of a batch: up to `max_restarts` starts,
/// stopping at the first accepted one; otherwise the start with lowest `F`.
pub fn minimize_run(config: &SearchConfig, run: u64) -> SearchResult {
    let t0 = Instant::now();
    let restarts = config.max_restarts.max(1);
    let mut best: Option<SearchResult> = None;
    for k in 0..restarts {
        let mut rng = start_rng(config.seed, run * restarts as u64 + k as u64);
        let start = random_init(config.d, &mut rng);
        let mut r = minimize_from(config, start);
        r.restart_index = k;
        let done = r.accepted;
        if best.as_ref().is_none_or(|b| r.accepted || r.f_final < b.f_final) {
            best = Some(r);
        }
        if done {
            break;
        }
    }
    let mut best = best.expect("at least one start");
    best.wall_time = t0.elapsed().as_secs_f64();
    best
}

/// Aggregate statistics of a batch.
#[derive(Clone, Debug, PartialEq)]
pub struct BatchSummary {
    pub count: usize,
    pub accepted: usize,
    pub success_rate: f64,
    pub mean_seconds: f64,
    /// Total time divided by accepted count; `None` without acceptances.
    pub seconds_per_accepted: Option<f64>,
    pub min_f: f64,
    pub median_f: f64,
    pub max_f: f64,
}

impl BatchSummary {
    pub fn from_results(results: &[SearchResult]) -> Self {
        let count = results.len();
        let accepted = results.iter().filter(|r| r.accepted).count();
        let total: f64 = results.iter().map(|r| r.wall_time).sum();
        let mut fs: Vec<f64> = results.iter().map(|r| r.f_final).collect();
        fs.sort_by(f64::total_cmp);
        let pick = |q: usize| fs.get(q).copied().unwrap_or(f64::NAN);
        BatchSummary {
            count,
            accepted,
            success_rate: if count > 0 { accepted as f64 / count as f64 } else { 0.0 },
            mean_seconds: if count > 0 { total / count as f64 } else { 0.0 },
            seconds_per_accepted: (accepted > 0).then(|| total / accepted as f64),
            min_f: pick(0),
            median_f: pick(count / 2),
            max_f: pick(count.saturating_sub(1)),
        }
    }
}

/// `count` independent searches (runs `0..count`), in parallel on the
/// current rayon pool. Results are in run order regardless of scheduling.
pub fn batch_search(config: &SearchConfig, count: usize) -> (Vec<SearchResult>, BatchSummary) {
    batch_search_with(config, count, |_, _| {})
}

/// [`batch_search`] calling `on_result(run, result)` as each run finishes,
/// from whichever worker finished it.
pub fn batch_search_with<F>(config: &SearchConfig, count: usize, on_result: F) -> (Vec<SearchResult>, BatchSummary)
where
    F: Fn(u64, &SearchResult) + Sync,
{
    let results: Vec<SearchResult> = (0..count as u64)
        .into_par_iter()
        .map(|run| {
            let r = minimize_run(config, run);
            on_result(run, &r);
            r
        })
        .collect();
    let summary = BatchSummary::from_results(&results);
    (results, summary)
}
