use mubforge_core::dim::Dimension;
use mubforge_core::gram::{build_gram, gram_from_bases, MubSet};
use mubforge_core::invariants::{generating_set, triple_tensor, TripleTensor};
use mubforge_core::optimize::{batch_search, start_rng, SearchConfig};
use mubforge_core::perm::Perm;
use mubforge_core::phases::PhaseVector;
use mubforge_core::symmetry::{automorphisms, is_automorphism, isomorphic, maps_onto};
use mubforge_core::wh::analytic_mubs;
use nalgebra::Complex;
use rand::seq::SliceRandom;
use rand::Rng;

fn solutions(d: usize, seed: u64, want: usize) -> Vec<PhaseVector> {
    let mut c = SearchConfig::new(Dimension::new(d).unwrap()).with_seed(seed);
    c.max_restarts = 20;
    let (results, _) = batch_search(&c, want);
    results.into_iter().filter(|r| r.accepted).map(|r| r.phi).collect()
}

/// Reorder bases and states, and rephase every vector.
fn scramble(m: &MubSet, seed: u64) -> MubSet {
    let d = m.dim();
    let mut rng = start_rng(seed, 0);
    let mut order: Vec<usize> = (0..d.bases()).collect();
    order.shuffle(&mut rng);
    let bases = order
        .iter()
        .map(|&mu| {
            let mut basis: Vec<_> = m.basis(mu).to_vec();
            basis.shuffle(&mut rng);
            basis.into_iter().map(|v| v * Complex::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))).collect()
        })
        .collect();
    MubSet::from_bases(d, bases).unwrap()
}

fn tensor_of(m: &MubSet) -> TripleTensor {
    triple_tensor(&gram_from_bases(m).unwrap().0)
}

#[test]
fn relabelled_set_is_isomorphic_with_same_invariants() {
    for d in [3, 4] {
        let m = analytic_mubs(Dimension::new(d).unwrap()).unwrap();
        let a = tensor_of(&m);
        let b = tensor_of(&scramble(&m, d as u64));
        let p = isomorphic(&a, &b, 1e-9).unwrap().expect("isomorphic");
        assert!(maps_onto(&a, &b, &p, 1e-9));
        assert_eq!(generating_set(&a, 1e-9).frequencies, generating_set(&b, 1e-9).frequencies);
        assert_eq!(automorphisms(&a, 1e-9).unwrap().order(), automorphisms(&b, 1e-9).unwrap().order());
    }
}

#[test]
fn isomorphisms_compose() {
    let sols = solutions(3, 21, 3);
    assert_eq!(sols.len(), 3);
    let t: Vec<_> = sols.iter().map(|phi| triple_tensor(&build_gram(phi))).collect();
    let p = isomorphic(&t[0], &t[1], 1e-9).unwrap().unwrap();
    let q = isomorphic(&t[1], &t[2], 1e-9).unwrap().unwrap();
    assert!(maps_onto(&t[0], &t[2], &(&p * &q), 1e-9));
    assert!(maps_onto(&t[1], &t[0], &p.inverse(), 1e-9));
}

#[test]
fn automorphism_group_is_closed() {
    let sols = solutions(4, 8, 1);
    let t = triple_tensor(&build_gram(&sols[0]));
    let group = automorphisms(&t, 1e-9).unwrap();
    let gens = group.generators();
    let mut rng = start_rng(4, 0);
    for _ in 0..20 {
        let a = &gens[rng.gen_range(0..gens.len())];
        let b = &gens[rng.gen_range(0..gens.len())];
        let prod = a * b;
        assert!(is_automorphism(&t, &prod, 1e-9));
        assert!(is_automorphism(&t, &prod.inverse(), 1e-9));
        assert!(group.contains(&prod));
    }
}

#[test]
fn non_solution_tensors_are_not_isomorphic_to_solutions() {
    let d = Dimension::new(3).unwrap();
    let (_, phi) = gram_from_bases(&analytic_mubs(d).unwrap()).unwrap();
    let a = triple_tensor(&build_gram(&phi));
    let b = triple_tensor(&build_gram(&PhaseVector::zeros(d)));
    assert_eq!(isomorphic(&a, &b, 1e-9).unwrap(), None);
    assert!(!is_automorphism(&a, &Perm::from_images(vec![1, 0, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11]).unwrap(), 1e-9));
}
