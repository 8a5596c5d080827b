//! Bargmann invariants: the triple-product tensor, general cyclic products,
//! and the generating set of tensor phases.

use std::f64::consts::{PI, TAU};
use std::fmt;

use nalgebra::{Complex, DMatrix};

use crate::dim::Dimension;
use crate::gram::GramMatrix;
use crate::scalar::canonical_angle;
use crate::C64;

/// `T_ijk = G_ij G_jk G_ki`, stored densely with `k` fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct TripleTensor {
    d: Dimension,
    n: usize,
    values: Vec<C64>,
}

impl TripleTensor {
    pub fn dim(&self) -> Dimension {
        self.d
    }

    /// Number of states `N`.
    pub fn states(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> C64 {
        self.values[(i * self.n + j) * self.n + k]
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn slice(&self, a: usize) -> TensorSlice {
        let n = self.n;
        TensorSlice { a, matrix: DMatrix::from_fn(n, n, |j, k| self.get(a, j, k)) }
    }
}

/// `matrix[(j, k)] = T_ajk`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorSlice {
    pub a: usize,
    pub matrix: DMatrix<C64>,
}

/// Triple-product tensor of `g`.
///
/// Each unordered triple is evaluated once, in the orientation of its
/// lexicographically smallest rotation, and copied into all six positions
/// (conjugated for the reversed orientation). Cyclic and conjugation
/// symmetries therefore hold bit for bit.
pub fn triple_tensor(g: &GramMatrix) -> TripleTensor {
    let n = g.dim().states();
    let m = g.matrix();
    let mut values = vec![Complex::new(0.0, 0.0); n * n * n];
    let idx = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
    for i in 0..n {
        for j in i..n {
            for k in i..n {
                // (i, j, k) with i minimal is the canonical rotation whenever
                // i ≤ j and i ≤ k; the tie i = k is covered by its own rotation.
                if k == i && j != i {
                    continue;
                }
                if j == i && k != i {
                    continue;
                }
                let v = m[(i, j)] * m[(j, k)] * m[(k, i)];
                let w = v.conj();
                for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                    values[idx(a, b, c)] = v;
                }
                for (a, b, c) in [(i, k, j), (k, j, i), (j, i, k)] {
                    values[idx(a, b, c)] = w;
                }
            }
        }
        // Triples with a repeated index: (i, i, k) and rotations.
        for k in 0..n {
            if k == i {
                continue;
            }
            let (lo, hi) = (i.min(k), i.max(k));
            // Rotations of (lo, lo, hi) and of (hi, hi, lo) are distinct
            // classes; evaluate each from its own canonical form.
            for (p, q) in [(lo, hi), (hi, lo)] {
                // z·conj(z) first keeps the value exactly real.
                let v = m[(p, p)] * (m[(p, q)] * m[(q, p)]);
                for (a, b, c) in [(p, p, q), (p, q, p), (q, p, p)] {
                    values[idx(a, b, c)] = v;
                }
            }
        }
        values[idx(i, i, i)] = m[(i, i)] * m[(i, i)] * m[(i, i)];
    }
    TripleTensor { d: g.dim(), n, values }
}

/// Cyclic product `G_{j1 j2} G_{j2 j3} ⋯ G_{jm j1}`.
pub fn m_product(g: &GramMatrix, indices: &[usize]) -> C64 {
    let m = g.matrix();
    let len = indices.len();
    (0..len).fold(Complex::new(1.0, 0.0), |acc, t| acc * m[(indices[t], indices[(t + 1) % len])])
}

/// `a·π/b` in lowest terms, `0 ≤ a/b < 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PiMultiple {
    pub num: u64,
    pub den: u64,
}

impl PiMultiple {
    pub fn value(&self) -> f64 {
        self.num as f64 * PI / self.den as f64
    }
}

impl fmt::Display for PiMultiple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.num, self.den) {
            (0, _) => write!(f, "0"),
            (1, 1) => write!(f, "π"),
            (a, 1) => write!(f, "{a}π"),
            (1, b) => write!(f, "π/{b}"),
            (a, b) => write!(f, "{a}π/{b}"),
        }
    }
}

/// Distinct tensor phases with their multiplicities.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratingSet {
    /// Cluster representatives in `[0, 2π)`, ascending.
    pub phases: Vec<f64>,
    pub frequencies: Vec<usize>,
    /// Largest spread inside one cluster.
    pub fluctuation: f64,
    /// Exact forms, one per phase, once [`identify_symbolic`] has run;
    /// `None` entries are unmatched.
    pub symbolic: Option<Vec<Option<PiMultiple>>>,
}

impl GeneratingSet {
    pub fn total(&self) -> usize {
        self.frequencies.iter().sum()
    }
}

/// Phase of every tensor entry, with `arg(0) := 0` for entries below
/// `1e-12·(1/(d+1))³` in modulus.
pub fn tensor_phases(t: &TripleTensor) -> Vec<f64> {
    let d = t.dim().get() as f64;
    let zero = 1e-12 / (d + 1.0).powi(3);
    t.values().iter().map(|z| if z.norm() < zero { 0.0 } else { canonical_angle(z.arg()) }).collect()
}

/// Clusters of sorted circular data: consecutive values closer than `tol`
/// share a cluster, and the last cluster joins the first across `2π`.
/// Returns `(start, len)` runs into `sorted`, the wrapped run possibly
/// extending past the end.
fn circular_clusters(sorted: &[f64], tol: f64) -> Vec<(usize, usize)> {
    let n = sorted.len();
    if n == 0 {
        return Vec::new();
    }
    let mut runs = Vec::new();
    let mut start = 0;
    for i in 1..n {
        if sorted[i] - sorted[i - 1] > tol {
            runs.push((start, i - start));
            start = i;
        }
    }
    runs.push((start, n - start));
    if runs.len() > 1 && sorted[0] + TAU - sorted[n - 1] <= tol {
        let (last_start, last_len) = runs.pop().expect("non-empty");
        runs[0] = (last_start, last_len + runs[0].1);
    }
    runs
}

/// Generating set of `t` by gap clustering at `cluster_tol`.
pub fn generating_set(t: &TripleTensor, cluster_tol: f64) -> GeneratingSet {
    let mut phases = tensor_phases(t);
    phases.sort_by(f64::total_cmp);
    generating_set_from_sorted(&phases, cluster_tol)
}

fn generating_set_from_sorted(sorted: &[f64], tol: f64) -> GeneratingSet {
    let n = sorted.len();
    let mut out: Vec<(f64, usize)> = Vec::new();
    let mut fluctuation: f64 = 0.0;
    for (start, len) in circular_clusters(sorted, tol) {
        let first = sorted[start];
        // Unwrap relative to the first member so a cluster straddling 2π is
        // contiguous.
        let mut sum = 0.0;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for t in 0..len {
            let mut x = sorted[(start + t) % n];
            if x < first {
                x += TAU;
            }
            sum += x;
            lo = lo.min(x);
            hi = hi.max(x);
        }
        fluctuation = fluctuation.max(hi - lo);
        let mut rep = sum / len as f64;
        if rep >= TAU - tol {
            rep -= TAU;
        }
        if rep.abs() <= tol {
            rep = 0.0;
        }
        out.push((canonical_angle(rep), len));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    GeneratingSet {
        phases: out.iter().map(|p| p.0).collect(),
        frequencies: out.iter().map(|p| p.1).collect(),
        fluctuation,
        symbolic: None,
    }
}

/// Closest `a·π/b` with `b ≤ max_denom` among the continued-fraction
/// convergents of `x/π`, if within `tol` of `x`.
pub fn pi_multiple(x: f64, tol: f64, max_denom: u64) -> Option<PiMultiple> {
    let r = x / PI;
    if r.abs() * PI <= tol {
        return Some(PiMultiple { num: 0, den: 1 });
    }
    let (mut h0, mut h1) = (0u64, 1u64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut rem = r;
    let mut best: Option<PiMultiple> = None;
    for _ in 0..64 {
        let a = rem.floor();
        if !(0.0..=1e9).contains(&a) {
            break;
        }
        let a = a as u64;
        let h = a * h1 + h0;
        let k = a * k1 + k0;
        if k > max_denom {
            break;
        }
        (h0, h1, k0, k1) = (h1, h, k1, k);
        let cand = PiMultiple { num: h, den: k };
        if (cand.value() - x).abs() <= tol {
            best = Some(cand);
            break;
        }
        let frac = rem - a as f64;
        if frac.abs() < 1e-15 {
            break;
        }
        rem = 1.0 / frac;
    }
    best
}

/// Attach exact forms to every phase of `gs`.
pub fn identify_symbolic(gs: &GeneratingSet, tol: f64, max_denom: u64) -> GeneratingSet {
    let mut out = gs.clone();
    out.symbolic = Some(gs.phases.iter().map(|&p| pi_multiple(p, tol, max_denom)).collect());
    out
}
