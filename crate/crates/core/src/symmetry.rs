//! Automorphisms of the triple-product tensor, isomorphism between
//! solutions, and reconstruction of bases from a Gram matrix.
//!
//! Tensor entries are compared through integer keys. The real and imaginary
//! parts of all entries are clustered separately by gaps larger than `tol`
//! and an entry's key is its pair of cluster ids. A gap within a factor of
//! ten of `tol` makes the clustering ambiguous and is reported as
//! [`SymmetryError::UnstableRounding`].
//!
//! Both searches run one backtracking engine. Points are visited in a base
//! order chosen greedily so that each next point has as few look-alikes as
//! possible given the points before it; a partial map is extended one point
//! at a time and checked on every triple inside its domain.

use std::collections::HashMap;

use nalgebra::{Complex, DVector};
use num_bigint::BigUint;

use crate::error::{GramError, SymmetryError};
use crate::gram::{GramMatrix, MubSet};
use crate::invariants::TripleTensor;
use crate::perm::{Perm, PermGroup};
use crate::C64;

const UNSET: usize = usize::MAX;

/// Cluster ids of `values` along one coordinate.
fn cluster_axis(values: &[f64], tol: f64) -> Result<Vec<u32>, SymmetryError> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ids = vec![0u32; values.len()];
    let mut id = 0u32;
    for w in 0..order.len() {
        if w > 0 {
            let gap = values[order[w]] - values[order[w - 1]];
            if gap > tol / 10.0 && gap < tol * 10.0 {
                return Err(SymmetryError::UnstableRounding { gap });
            }
            if gap > tol {
                id += 1;
            }
        }
        ids[order[w]] = id;
    }
    Ok(ids)
}

/// Integer keys for the entries of several tensors on a common scale, so
/// equal keys across tensors mean equal values.
fn quantize(tensors: &[&TripleTensor], tol: f64) -> Result<Vec<Vec<u32>>, SymmetryError> {
    let all: Vec<C64> = tensors.iter().flat_map(|t| t.values().iter().copied()).collect();
    let re = cluster_axis(&all.iter().map(|z| z.re).collect::<Vec<_>>(), tol)?;
    let im = cluster_axis(&all.iter().map(|z| z.im).collect::<Vec<_>>(), tol)?;
    let mut dense: HashMap<(u32, u32), u32> = HashMap::new();
    let keys: Vec<u32> = re
        .iter()
        .zip(&im)
        .map(|(&r, &i)| {
            let next = dense.len() as u32;
            *dense.entry((r, i)).or_insert(next)
        })
        .collect();
    let mut out = Vec::with_capacity(tensors.len());
    let mut offset = 0;
    for t in tensors {
        let len = t.values().len();
        out.push(keys[offset..offset + len].to_vec());
        offset += len;
    }
    Ok(out)
}

/// Isomorphism-invariant color of every point: its diagonal key, the sorted
/// keys of `T_{aak}`, and the key histogram of slice `a`.
fn colors(keys_list: &[&[u32]], n: usize) -> Vec<Vec<u32>> {
    let mut signatures: Vec<Vec<Vec<u32>>> = Vec::new();
    for keys in keys_list {
        let mut sigs = Vec::with_capacity(n);
        for a in 0..n {
            let base = a * n * n;
            let mut row: Vec<u32> = (0..n).map(|k| keys[base + a * n + k]).collect();
            row.sort_unstable();
            let mut hist: HashMap<u32, u32> = HashMap::new();
            for &k in &keys[base..base + n * n] {
                *hist.entry(k).or_default() += 1;
            }
            let mut hist: Vec<(u32, u32)> = hist.into_iter().collect();
            hist.sort_unstable();
            let mut sig = vec![keys[base + a * n + a]];
            sig.extend(row);
            sig.extend(hist.into_iter().flat_map(|(k, c)| [k, c]));
            sigs.push(sig);
        }
        signatures.push(sigs);
    }
    let mut distinct: Vec<&Vec<u32>> = signatures.iter().flatten().collect();
    distinct.sort();
    distinct.dedup();
    signatures
        .iter()
        .map(|sigs| sigs.iter().map(|s| distinct.binary_search(&s).expect("present") as u32).collect())
        .collect()
}

struct Engine<'a> {
    n: usize,
    ka: &'a [u32],
    kb: &'a [u32],
    color_a: Vec<u32>,
    color_b: Vec<u32>,
    /// Base order over source points.
    order: Vec<usize>,
}

impl<'a> Engine<'a> {
    fn new(n: usize, ka: &'a [u32], kb: &'a [u32]) -> Self {
        let cols = colors(&[ka, kb], n);
        let mut engine = Engine { n, ka, kb, color_a: cols[0].clone(), color_b: cols[1].clone(), order: Vec::new() };
        engine.order = engine.base_order();
        engine
    }

    #[inline]
    fn a(&self, i: usize, j: usize, k: usize) -> u32 {
        self.ka[(i * self.n + j) * self.n + k]
    }

    #[inline]
    fn b(&self, i: usize, j: usize, k: usize) -> u32 {
        self.kb[(i * self.n + j) * self.n + k]
    }

    /// Greedy order: the next point is the one whose profile against the
    /// points already chosen is shared by the fewest other points.
    fn base_order(&self) -> Vec<usize> {
        let n = self.n;
        let mut chosen: Vec<usize> = Vec::with_capacity(n);
        let mut used = vec![false; n];
        while chosen.len() < n {
            let profile = |x: usize| -> Vec<u32> {
                let mut p = vec![self.color_a[x], self.a(x, x, x)];
                for &u in &chosen {
                    p.push(self.a(x, u, u));
                    p.push(self.a(x, x, u));
                }
                for (t, &u) in chosen.iter().enumerate() {
                    for &v in &chosen[t + 1..] {
                        p.push(self.a(x, u, v));
                    }
                }
                p
            };
            let free: Vec<usize> = (0..n).filter(|&x| !used[x]).collect();
            let profiles: Vec<Vec<u32>> = free.iter().map(|&x| profile(x)).collect();
            let mut counts: HashMap<&Vec<u32>, usize> = HashMap::new();
            for p in &profiles {
                *counts.entry(p).or_default() += 1;
            }
            let (pick, _) = free
                .iter()
                .zip(&profiles)
                .map(|(&x, p)| (x, counts[p]))
                .min_by_key(|&(x, c)| (c, x))
                .expect("free point");
            used[pick] = true;
            chosen.push(pick);
        }
        chosen
    }

    /// `x → y` is consistent with `map` on every triple inside the domain.
    fn consistent(&self, map: &[usize], domain: &[usize], x: usize, y: usize) -> bool {
        if self.color_a[x] != self.color_b[y] || self.a(x, x, x) != self.b(y, y, y) {
            return false;
        }
        for &u in domain {
            let su = map[u];
            if self.a(x, u, u) != self.b(y, su, su) || self.a(x, x, u) != self.b(y, y, su) {
                return false;
            }
        }
        for (t, &u) in domain.iter().enumerate() {
            let su = map[u];
            for &v in &domain[t + 1..] {
                let sv = map[v];
                if self.a(x, u, v) != self.b(y, su, sv) || self.a(x, v, u) != self.b(y, sv, su) {
                    return false;
                }
            }
        }
        true
    }

    /// Depth-first completion of `map` along `order[depth..]`.
    fn extend(&self, map: &mut Vec<usize>, used: &mut Vec<bool>, domain: &mut Vec<usize>, depth: usize) -> bool {
        if depth == self.n {
            return true;
        }
        let x = self.order[depth];
        for y in 0..self.n {
            if used[y] || !self.consistent(map, domain, x, y) {
                continue;
            }
            map[x] = y;
            used[y] = true;
            domain.push(x);
            if self.extend(map, used, domain, depth + 1) {
                return true;
            }
            domain.pop();
            used[y] = false;
            map[x] = UNSET;
        }
        false
    }

    /// A full map sending `order[..prefix.len()]` to `prefix` and
    /// `order[depth]` to `y`.
    fn search(&self, prefix: &[usize], y: usize) -> Option<Perm> {
        let n = self.n;
        let mut map = vec![UNSET; n];
        let mut used = vec![false; n];
        let mut domain = Vec::with_capacity(n);
        for (t, &img) in prefix.iter().enumerate() {
            let x = self.order[t];
            if used[img] || !self.consistent(&map, &domain, x, img) {
                return None;
            }
            map[x] = img;
            used[img] = true;
            domain.push(x);
        }
        let depth = prefix.len();
        let x = self.order[depth];
        if used[y] || !self.consistent(&map, &domain, x, y) {
            return None;
        }
        map[x] = y;
        used[y] = true;
        domain.push(x);
        if self.extend(&mut map, &mut used, &mut domain, depth + 1) {
            Some(Perm::from_images(map).expect("complete bijection"))
        } else {
            None
        }
    }

    fn any(&self) -> Option<Perm> {
        let x = self.order[0];
        (0..self.n).filter(|&y| self.color_a[x] == self.color_b[y]).find_map(|y| self.search(&[], y))
    }
}

fn orbit(point: usize, gens: &[Perm], n: usize) -> Vec<bool> {
    let mut seen = vec![false; n];
    seen[point] = true;
    let mut stack = vec![point];
    while let Some(p) = stack.pop() {
        for g in gens {
            let q = g.apply(p);
            if !seen[q] {
                seen[q] = true;
                stack.push(q);
            }
        }
    }
    seen
}

/// `T_{σi σj σk} = T_ijk` on all entries, within `tol`.
pub fn is_automorphism(t: &TripleTensor, p: &Perm, tol: f64) -> bool {
    maps_onto(t, t, p, tol)
}

/// `B_{σi σj σk} = A_ijk` on all entries, within `tol`.
pub fn maps_onto(a: &TripleTensor, b: &TripleTensor, p: &Perm, tol: f64) -> bool {
    let n = a.states();
    if b.states() != n || p.degree() != n {
        return false;
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if (a.get(i, j, k) - b.get(p.apply(i), p.apply(j), p.apply(k))).norm() > tol {
                    return false;
                }
            }
        }
    }
    true
}

/// The full automorphism group of `t`.
///
/// Levels of the base order are processed from the deepest up: at level
/// `l` every candidate image of the `l`-th base point outside its known
/// orbit is tried with the earlier base points fixed. The group order is
/// the product of orbit lengths; it is cross-checked against a stabilizer
/// chain built from the generators.
pub fn automorphisms(t: &TripleTensor, tol: f64) -> Result<PermGroup, SymmetryError> {
    let n = t.states();
    let keys = quantize(&[t], tol)?;
    let engine = Engine::new(n, &keys[0], &keys[0]);
    let order = engine.order.clone();
    let mut gens: Vec<Perm> = Vec::new();
    let mut product = BigUint::from(1u32);
    for level in (0..n).rev() {
        let x = order[level];
        let prefix = &order[..level];
        let mut fixed = vec![false; n];
        prefix.iter().for_each(|&p| fixed[p] = true);
        let mut seen = orbit(x, &gens, n);
        for y in 0..n {
            if seen[y] || fixed[y] || engine.color_a[x] != engine.color_b[y] {
                continue;
            }
            if let Some(sigma) = engine.search(prefix, y) {
                debug_assert!(prefix.iter().all(|&p| sigma.apply(p) == p));
                gens.push(sigma);
                seen = orbit(x, &gens, n);
            }
        }
        product *= BigUint::from(seen.iter().filter(|&&s| s).count());
    }
    for g in &gens {
        if !is_automorphism(t, g, tol) {
            return Err(SymmetryError::VerificationFailed);
        }
    }
    let group = PermGroup::new(n, gens).expect("same degree");
    if group.order() != product {
        return Err(SymmetryError::VerificationFailed);
    }
    Ok(group)
}

/// A permutation `σ` with `B_{σi σj σk} = A_ijk`, or `None` when the search
/// is exhausted. The result is re-verified on every entry.
pub fn isomorphic(a: &TripleTensor, b: &TripleTensor, tol: f64) -> Result<Option<Perm>, SymmetryError> {
    if a.states() != b.states() {
        return Err(SymmetryError::SizeMismatch(a.states(), b.states()));
    }
    let n = a.states();
    let keys = quantize(&[a, b], tol)?;
    let engine = Engine::new(n, &keys[0], &keys[1]);
    match engine.any() {
        Some(p) if maps_onto(a, b, &p, tol) => Ok(Some(p)),
        Some(_) => Err(SymmetryError::VerificationFailed),
        None => Ok(None),
    }
}

/// Order of the group generated by `gens` on `n` points.
pub fn group_order_via_generators(n: usize, gens: Vec<Perm>) -> BigUint {
    PermGroup::new(n, gens).map(|g| g.order()).unwrap_or_else(|_| BigUint::from(0u32))
}

/// States reproducing `g` as their scaled Gram matrix.
///
/// With `G = VV†` over the `d` unit eigenvectors, state `a` is
/// `√(d+1)·conj(V_a)`, row `a` of `V` conjugated.
pub fn bases_from_gram(g: &GramMatrix) -> Result<MubSet, SymmetryError> {
    let d = g.dim();
    let n = d.states();
    let eig = g.matrix().clone().symmetric_eigen();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let near_one = idx.iter().filter(|&&k| (eig.eigenvalues[k] - 1.0).abs() < 1e-6).count();
    let deviation = idx
        .iter()
        .enumerate()
        .map(|(r, &k)| {
            let target = if r < d.get() { 1.0 } else { 0.0 };
            (eig.eigenvalues[k] - target).abs()
        })
        .fold(0.0, f64::max);
    if near_one != d.get() || deviation > 1e-6 {
        return Err(SymmetryError::RankDeficient { expected: d.get(), near_one, deviation });
    }
    let scale = ((d.get() + 1) as f64).sqrt();
    let states: Vec<DVector<C64>> = (0..n)
        .map(|a| {
            DVector::from_iterator(
                d.get(),
                idx[..d.get()].iter().map(|&k| eig.eigenvectors[(a, k)].conj() * Complex::new(scale, 0.0)),
            )
        })
        .collect();
    MubSet::new(d, states).map_err(|e: GramError| SymmetryError::Gram(e))
}
