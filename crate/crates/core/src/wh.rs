//! Weyl–Heisenberg constructions: shift and clock operators, displacement
//! operators, commuting classes, their common eigenbases, and Clifford
//! generators acting on the resulting states.

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dim::Dimension;
use crate::error::WhError;
use crate::gram::MubSet;
use crate::perm::Perm;
use crate::C64;

pub type CMatrix = DMatrix<C64>;

fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// `ω = e^{2πi/d}`.
pub fn omega(d: usize) -> C64 {
    Complex::from_polar(1.0, 2.0 * PI / d as f64)
}

/// `τ = −e^{iπ/d}`, so that `τ² = ω` and, for odd `d`, `τ^d = 1`.
pub fn tau(d: usize) -> C64 {
    -Complex::from_polar(1.0, PI / d as f64)
}

fn power(z: C64, k: usize) -> C64 {
    z.powu(k as u32)
}

/// Shift `X|k⟩ = |k+1⟩` and clock `Z|k⟩ = ω^k|k⟩`.
pub fn pauli_ops(d: Dimension) -> (CMatrix, CMatrix) {
    let n = d.get();
    let w = omega(n);
    let mut x = CMatrix::zeros(n, n);
    let mut z = CMatrix::zeros(n, n);
    for k in 0..n {
        x[((k + 1) % n, k)] = c(1.0, 0.0);
        z[(k, k)] = power(w, k);
    }
    (x, z)
}

fn matrix_power(m: &CMatrix, k: usize) -> CMatrix {
    let mut out = CMatrix::identity(m.nrows(), m.ncols());
    for _ in 0..k {
        out = &out * m;
    }
    out
}

/// Largest entry of `AB − BA`.
pub fn commutator_norm(a: &CMatrix, b: &CMatrix) -> f64 {
    (a * b - b * a).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entry of `U†U − I`.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    let n = u.nrows();
    (u.adjoint() * u - CMatrix::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Displacement operator `D_p = τ^{p1·p2} X^{p1} Z^{p2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct WhOperator {
    pub d: Dimension,
    pub p: (usize, usize),
    pub matrix: CMatrix,
}

impl WhOperator {
    pub fn new(d: Dimension, p1: usize, p2: usize) -> Self {
        let n = d.get();
        let (p1, p2) = (p1 % n, p2 % n);
        let (x, z) = pauli_ops(d);
        let matrix = matrix_power(&x, p1) * matrix_power(&z, p2) * power(tau(n), p1 * p2);
        WhOperator { d, p: (p1, p2), matrix }
    }

    /// Symplectic form `p1·q2 − p2·q1 mod d`; zero exactly when the
    /// operators commute.
    pub fn symplectic(&self, other: &WhOperator) -> usize {
        let n = self.d.get();
        (self.p.0 * other.p.1 + n * n - self.p.1 * other.p.0) % n
    }
}

pub fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| !n.is_multiple_of(k))
}

/// A set of pairwise commuting unitaries whose common eigenbasis is one
/// basis of a MUB set.
#[derive(Clone, Debug, PartialEq)]
pub struct CommutingClass {
    pub label: String,
    pub members: Vec<CMatrix>,
    /// WH exponents of the members (prime dimensions only).
    pub exponents: Vec<(usize, usize)>,
}

impl CommutingClass {
    pub fn dim(&self) -> usize {
        self.members[0].nrows()
    }

    /// Largest pairwise commutator entry.
    pub fn max_commutator(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.members.iter().enumerate() {
            for b in &self.members[i + 1..] {
                worst = worst.max(commutator_norm(a, b));
            }
        }
        worst
    }
}

/// The `d + 1` classes `{Z^a}`, `{X^a}`, `{(XZ^m)^a}` for `m = 1..d−1`,
/// `a = 1..d−1`, in that order.
pub fn prime_classes(d: Dimension) -> Result<Vec<CommutingClass>, WhError> {
    let n = d.get();
    if !is_prime(n) {
        return Err(WhError::NotPrime(n));
    }
    let mut directions = vec![(0, 1), (1, 0)];
    directions.extend((1..n).map(|m| (1, m)));
    let label = |(p1, p2): (usize, usize)| match (p1, p2) {
        (0, _) => "Z".to_string(),
        (_, 0) => "X".to_string(),
        (_, 1) => "XZ".to_string(),
        (_, m) => format!("XZ^{m}"),
    };
    Ok(directions
        .into_iter()
        .map(|dir| {
            let exponents: Vec<(usize, usize)> = (1..n).map(|a| ((a * dir.0) % n, (a * dir.1) % n)).collect();
            let members = exponents.iter().map(|&(p1, p2)| WhOperator::new(d, p1, p2).matrix).collect();
            CommutingClass { label: label(dir), members, exponents }
        })
        .collect())
}

/// The five commuting classes of two-qubit operators built from the `d = 2`
/// shift and clock.
pub fn d4_classes() -> Vec<CommutingClass> {
    let d2 = Dimension::new(2).expect("2 is valid");
    let (x, z) = pauli_ops(d2);
    let i = CMatrix::identity(2, 2);
    let xz = &x * &z;
    let xz2 = &xz * &z;
    let k = |a: &CMatrix, b: &CMatrix| a.kronecker(b);
    let class = |label: &str, members: Vec<CMatrix>| CommutingClass {
        label: label.to_string(),
        members,
        exponents: Vec::new(),
    };
    vec![
        class("C1", vec![k(&z, &i), k(&i, &z), k(&z, &z)]),
        class("C2", vec![k(&x, &i), k(&i, &x), k(&x, &x)]),
        class("C3", vec![k(&xz, &i), k(&i, &xz), k(&xz, &xz)]),
        class("C4", vec![k(&x, &z), k(&z, &xz), k(&xz, &xz2)]),
        class("C5", vec![k(&xz, &z), k(&z, &x), k(&xz2, &xz)]),
    ]
}

const EIGEN_SEED: u64 = 0x5eed_0b1a_5ed0;
const MAX_RETRIES: usize = 10;

/// Orthonormal basis diagonalizing every member of `class`.
///
/// A random real combination of the Hermitian and anti-Hermitian parts of
/// the members is diagonalized; combinations with an eigenvalue gap below
/// `1e-8` are redrawn. Vectors are ordered by the arguments of their
/// eigenvalues under the members in turn, and each is rephased so that its
/// first non-negligible component is real and positive.
pub fn common_eigenbasis(class: &CommutingClass) -> Result<Vec<DVector<C64>>, WhError> {
    let n = class.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(EIGEN_SEED);
    for _ in 0..MAX_RETRIES {
        let mut h = CMatrix::zeros(n, n);
        for m in &class.members {
            let a: f64 = rng.gen_range(-1.0..1.0);
            let b: f64 = rng.gen_range(-1.0..1.0);
            let herm = (m + m.adjoint()) * c(0.5, 0.0);
            let anti = (m - m.adjoint()) * c(0.0, -0.5);
            h += herm * c(a, 0.0) + anti * c(b, 0.0);
        }
        let eig = h.symmetric_eigen();
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        if vals.windows(2).any(|w| w[1] - w[0] < 1e-8) {
            continue;
        }
        let mut vectors: Vec<DVector<C64>> =
            (0..n).map(|k| normalize_phase(eig.eigenvectors.column(k).into_owned())).collect();
        vectors.sort_by_cached_key(|v| eigen_key(class, v));
        return Ok(vectors);
    }
    Err(WhError::DegenerateCombination { retries: MAX_RETRIES })
}

/// Eigenvalue arguments on a grid of `2π / 2^20`, member by member.
fn eigen_key(class: &CommutingClass, v: &DVector<C64>) -> Vec<u64> {
    const GRID: f64 = (1u64 << 20) as f64;
    class
        .members
        .iter()
        .map(|m| {
            let lambda = v.dotc(&(m * v));
            let t = crate::scalar::canonical_angle(lambda.arg()) / (2.0 * PI);
            ((t * GRID).round() as u64) % (1 << 20)
        })
        .collect()
}

fn normalize_phase(mut v: DVector<C64>) -> DVector<C64> {
    let norm = v.norm();
    v /= c(norm, 0.0);
    if let Some(lead) = v.iter().find(|z| z.norm() > 1e-9).copied() {
        let rot = lead.conj() / lead.norm();
        v *= rot;
    }
    v
}

/// Classes for the supported dimensions: prime `d` and `d = 4`.
pub fn classes_for(d: Dimension) -> Result<Vec<CommutingClass>, WhError> {
    match d.get() {
        4 => Ok(d4_classes()),
        n if is_prime(n) => prime_classes(d),
        n => Err(WhError::UnsupportedDimension(n)),
    }
}

/// Complete MUB set from commuting classes, for `d ∈ {2, 3, 4, 5}`. The
/// first basis is the computational one.
pub fn analytic_mubs(d: Dimension) -> Result<MubSet, WhError> {
    if !(2..=5).contains(&d.get()) {
        return Err(WhError::UnsupportedDimension(d.get()));
    }
    let bases = classes_for(d)?.iter().map(common_eigenbasis).collect::<Result<Vec<_>, _>>()?;
    Ok(MubSet::from_bases(d, bases)?)
}

/// A generator unitary with a name.
#[derive(Clone, Debug, PartialEq)]
pub struct CliffordGenerator {
    pub name: String,
    pub matrix: CMatrix,
}

/// Fourier `F_jk = ω^{jk}/√d`, phase gate `S = diag(τ^{k(k+d)})`, `X`, `Z`.
pub fn clifford_generators(d: Dimension) -> Result<Vec<CliffordGenerator>, WhError> {
    let n = d.get();
    if !is_prime(n) || n == 2 {
        return Err(WhError::UnsupportedDimension(n));
    }
    let w = omega(n);
    let t = tau(n);
    let f = CMatrix::from_fn(n, n, |j, k| power(w, (j * k) % n) / (n as f64).sqrt());
    let s = CMatrix::from_diagonal(&DVector::from_fn(n, |k, _| power(t, (k * (k + n)) % (2 * n))));
    let (x, z) = pauli_ops(d);
    let named = |name: &str, matrix: CMatrix| CliffordGenerator { name: name.to_string(), matrix };
    Ok(vec![named("F", f), named("S", s), named("X", x), named("Z", z)])
}

/// Permutation of the states induced by one generator.
#[derive(Clone, Debug, PartialEq)]
pub struct CliffordPerm {
    pub perm: Perm,
    pub source: String,
}

/// Image of every state of `m` under `u`, matched to a state of `m` with
/// overlap modulus above `1 − 1e-8`.
pub fn induced_perm(m: &MubSet, u: &CMatrix, name: &str) -> Result<Perm, WhError> {
    let states = m.states();
    let mut images = Vec::with_capacity(states.len());
    for (a, v) in states.iter().enumerate() {
        let uv = u * v;
        let (best, overlap) = states
            .iter()
            .enumerate()
            .map(|(b, w)| (b, w.dotc(&uv).norm()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("non-empty state set");
        if overlap <= 1.0 - 1e-8 {
            return Err(WhError::NoMatch { generator: name.to_string(), state: a, best: overlap });
        }
        images.push(best);
    }
    Perm::from_images(images).map_err(|_| WhError::NoMatch { generator: name.to_string(), state: 0, best: 0.0 })
}

/// Permutations induced by [`clifford_generators`] on `m`, for odd prime `d`.
pub fn clifford_generator_perms(d: Dimension, m: &MubSet) -> Result<Vec<CliffordPerm>, WhError> {
    clifford_generators(d)?
        .into_iter()
        .map(|g| Ok(CliffordPerm { perm: induced_perm(m, &g.matrix, &g.name)?, source: g.name }))
        .collect()
}

/// Order `d³(d²−1)` of the Clifford group modulo phases, prime `d`.
pub fn clifford_order(d: usize) -> u64 {
    let d = d as u64;
    d * d * d * (d * d - 1)
}
