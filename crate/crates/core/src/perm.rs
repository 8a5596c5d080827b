//! Permutations of state indices and permutation groups held as a stabilizer
//! chain.
//!
//! Permutations act on the right: `x^p = p[x]`, and `p * q` applies `p`
//! first. The chain is built by the deterministic Schreier–Sims algorithm:
//! every Schreier generator is sifted, so the resulting order is exact.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigUint;

use crate::error::PermError;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm { images: (0..n).collect() }
    }

    /// From 0-based images; fails unless `images` is a bijection on `0..n`.
    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(PermError::NotBijective);
            }
            seen[x] = true;
        }
        Ok(Perm { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (x, &y) in self.images.iter().enumerate() {
            inv[y] = x;
        }
        Perm { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(x, &y)| x == y)
    }

    /// Smallest point moved, if any.
    pub fn first_moved(&self) -> Option<usize> {
        self.images.iter().enumerate().find(|(x, &y)| *x != y).map(|(x, _)| x)
    }

    /// `p^k`.
    pub fn pow(&self, k: usize) -> Self {
        let mut out = Perm::identity(self.degree());
        for _ in 0..k {
            out = &out * self;
        }
        out
    }
}

impl Mul for &Perm {
    type Output = Perm;

    fn mul(self, rhs: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), rhs.degree());
        Perm { images: self.images.iter().map(|&x| rhs.images[x]).collect() }
    }
}

impl fmt::Debug for Perm {
    // Cycle notation, 0-based.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "()");
        }
        let mut seen = vec![false; self.degree()];
        for start in 0..self.degree() {
            if seen[start] || self.images[start] == start {
                continue;
            }
            write!(f, "(")?;
            let mut x = start;
            let mut first = true;
            while !seen[x] {
                seen[x] = true;
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
                first = false;
                x = self.images[x];
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
struct Level {
    point: usize,
    gens: Vec<Perm>,
    orbit: Vec<usize>,
    /// `transversal[β]` maps `point` to `β`.
    transversal: Vec<Option<Perm>>,
}

impl Level {
    fn new(point: usize, n: usize) -> Self {
        let mut level = Level { point, gens: Vec::new(), orbit: Vec::new(), transversal: vec![None; n] };
        level.rebuild();
        level
    }

    fn rebuild(&mut self) {
        let n = self.transversal.len();
        self.transversal.iter_mut().for_each(|t| *t = None);
        self.transversal[self.point] = Some(Perm::identity(n));
        self.orbit.clear();
        self.orbit.push(self.point);
        let mut i = 0;
        while i < self.orbit.len() {
            let beta = self.orbit[i];
            for s in &self.gens {
                let gamma = s.apply(beta);
                if self.transversal[gamma].is_none() {
                    let u = self.transversal[beta].as_ref().expect("orbit point") * s;
                    self.transversal[gamma] = Some(u);
                    self.orbit.push(gamma);
                }
            }
            i += 1;
        }
    }
}

/// A permutation group with its generators and a stabilizer chain.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    chain: Vec<Level>,
}

impl PermGroup {
    pub fn trivial(degree: usize) -> Self {
        PermGroup { degree, generators: Vec::new(), chain: Vec::new() }
    }

    /// Group generated by `generators`, all of degree `degree`.
    pub fn new(degree: usize, generators: Vec<Perm>) -> Result<Self, PermError> {
        if let Some(g) = generators.iter().find(|g| g.degree() != degree) {
            return Err(PermError::DegreeMismatch { expected: degree, found: g.degree() });
        }
        let mut group = PermGroup { degree, generators: Vec::new(), chain: Vec::new() };
        for g in generators {
            group.add_generator(g);
        }
        Ok(group)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    /// Base points of the stabilizer chain.
    pub fn base(&self) -> Vec<usize> {
        self.chain.iter().map(|l| l.point).collect()
    }

    /// Orbit lengths along the chain.
    pub fn basic_orbit_sizes(&self) -> Vec<usize> {
        self.chain.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn order(&self) -> BigUint {
        self.chain.iter().fold(BigUint::from(1u32), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    pub fn contains(&self, p: &Perm) -> bool {
        p.degree() == self.degree && self.strip(p.clone(), 0).0.is_identity()
    }

    /// Every generator of `self` lies in `other`.
    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.generators.iter().all(|g| other.contains(g))
    }

    /// Mutual containment.
    pub fn same_group(&self, other: &PermGroup) -> bool {
        self.is_subgroup_of(other) && other.is_subgroup_of(self)
    }

    /// Add a generator; a no-op for members.
    pub fn add_generator(&mut self, g: Perm) {
        if self.contains(&g) {
            return;
        }
        self.generators.push(g.clone());
        let (h, j) = self.strip(g, 0);
        self.insert(h, 0, j);
        self.complete();
    }

    /// Sift `g` from level `from`: returns the residue and the level where
    /// sifting stopped.
    fn strip(&self, mut g: Perm, from: usize) -> (Perm, usize) {
        for (j, level) in self.chain.iter().enumerate().skip(from) {
            let beta = g.apply(level.point);
            match &level.transversal[beta] {
                Some(u) => g = &g * &u.inverse(),
                None => return (g, j),
            }
        }
        (g, self.chain.len())
    }

    /// Put residue `h` (fixing the first `from` base points) into levels
    /// `from..=to`, extending the base if needed.
    fn insert(&mut self, h: Perm, from: usize, to: usize) {
        if to == self.chain.len() {
            let point = h.first_moved().expect("non-identity residue");
            self.chain.push(Level::new(point, self.degree));
        }
        for level in &mut self.chain[from..=to] {
            level.gens.push(h.clone());
            level.rebuild();
        }
    }

    /// Sift Schreier generators until all of them reduce to the identity.
    fn complete(&mut self) {
        'outer: loop {
            for i in (0..self.chain.len()).rev() {
                let level = &self.chain[i];
                for &beta in &level.orbit {
                    let u_beta = level.transversal[beta].as_ref().expect("orbit point");
                    for s in &level.gens {
                        let gamma = s.apply(beta);
                        let u_gamma = level.transversal[gamma].as_ref().expect("orbit closed");
                        let sg = &(u_beta * s) * &u_gamma.inverse();
                        if sg.is_identity() {
                            continue;
                        }
                        let (h, j) = self.strip(sg, i + 1);
                        if !h.is_identity() {
                            self.insert(h, i + 1, j);
                            continue 'outer;
                        }
                    }
                }
            }
            break;
        }
    }

    /// All elements, for small groups only.
    pub fn elements(&self) -> Vec<Perm> {
        let mut out = vec![Perm::identity(self.degree)];
        for level in self.chain.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * level.orbit.len());
            for &beta in &level.orbit {
                let u = level.transversal[beta].as_ref().expect("orbit point");
                for g in &out {
                    next.push(g * u);
                }
            }
            out = next;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Perm {
        Perm::from_images((0..n).map(|i| (i + 1) % n).collect()).unwrap()
    }

    fn transposition(n: usize, a: usize, b: usize) -> Perm {
        let mut im: Vec<usize> = (0..n).collect();
        im.swap(a, b);
        Perm::from_images(im).unwrap()
    }

    #[test]
    fn symmetric_group_orders() {
        for n in 2..=8 {
            let g = PermGroup::new(n, vec![cycle(n), transposition(n, 0, 1)]).unwrap();
            let fact: u64 = (1..=n as u64).product();
            assert_eq!(g.order(), BigUint::from(fact));
        }
    }

    #[test]
    fn cyclic_and_membership() {
        let g = PermGroup::new(6, vec![cycle(6)]).unwrap();
        assert_eq!(g.order(), BigUint::from(6u32));
        assert!(g.contains(&cycle(6).pow(4)));
        assert!(!g.contains(&transposition(6, 0, 1)));
    }

    #[test]
    fn alternating_group() {
        // 3-cycles (0 1 2), (0 1 2 3 4 ... ) generate A_n for odd n.
        let n = 7;
        let c3 = Perm::from_images({
            let mut im: Vec<usize> = (0..n).collect();
            im[0] = 1;
            im[1] = 2;
            im[2] = 0;
            im
        })
        .unwrap();
        let g = PermGroup::new(n, vec![c3, cycle(n)]).unwrap();
        assert_eq!(g.order(), BigUint::from(2520u32));
        assert_eq!(g.elements().len(), 2520);
    }

    #[test]
    fn rejects_non_bijection() {
        assert!(Perm::from_images(vec![0, 0, 1]).is_err());
        assert!(Perm::from_images(vec![0, 3, 1]).is_err());
    }

    #[test]
    fn product_convention() {
        let p = Perm::from_images(vec![1, 2, 0]).unwrap();
        let q = Perm::from_images(vec![0, 2, 1]).unwrap();
        // 0 → 1 under p, then 1 → 2 under q.
        assert_eq!((&p * &q).apply(0), 2);
        assert!((&p * &p.inverse()).is_identity());
    }
}
