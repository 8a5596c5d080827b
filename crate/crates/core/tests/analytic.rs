use mubforge_core::dim::Dimension;
use mubforge_core::gram::{build_gram, gram_from_bases, verify_gram_projection, verify_mub_definition};
use mubforge_core::invariants::triple_tensor;
use mubforge_core::perm::PermGroup;
use mubforge_core::symmetry::{automorphisms, bases_from_gram};
use mubforge_core::traces::{eigenvalue_sufficiency_check, objective};
use mubforge_core::wh::{analytic_mubs, clifford_generator_perms, clifford_order};
use num_bigint::BigUint;

fn dim(d: usize) -> Dimension {
    Dimension::new(d).unwrap()
}

#[test]
fn analytic_sets_are_mubs_with_vanishing_constraint() {
    for d in 2..=5 {
        let m = analytic_mubs(dim(d)).unwrap();
        let report = verify_mub_definition(&m, 1e-10);
        assert!(report.passed, "d={d}: {report:?}");
        let (g, phi) = gram_from_bases(&m).unwrap();
        assert!(objective(&phi).value() < 1e-12, "d={d}");
        assert!(verify_gram_projection(&g, 1e-10).passed);
        assert!(eigenvalue_sufficiency_check(&g));
    }
}

#[test]
fn phases_rebuild_the_gram_matrix() {
    for d in 2..=5 {
        let m = analytic_mubs(dim(d)).unwrap();
        let (g, phi) = gram_from_bases(&m).unwrap();
        let rebuilt = build_gram(&phi);
        let diff = (g.matrix() - rebuilt.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-12, "d={d}: {diff:e}");
    }
}

#[test]
fn bases_reconstructed_from_gram_reproduce_it() {
    for d in 2..=5 {
        let (g, _) = gram_from_bases(&analytic_mubs(dim(d)).unwrap()).unwrap();
        let m = bases_from_gram(&g).unwrap();
        assert!(verify_mub_definition(&m, 1e-10).passed);
        let (g2, _) = gram_from_bases(&m).unwrap();
        let diff = (g.matrix() - g2.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-10, "d={d}: {diff:e}");
    }
}

#[test]
fn clifford_group_equals_automorphism_group() {
    for d in [3, 5] {
        let m = analytic_mubs(dim(d)).unwrap();
        let (g, _) = gram_from_bases(&m).unwrap();
        let aut = automorphisms(&triple_tensor(&g), 1e-9).unwrap();
        let gens = clifford_generator_perms(dim(d), &m).unwrap().into_iter().map(|c| c.perm).collect();
        let cliff = PermGroup::new(d * (d + 1), gens).unwrap();
        assert_eq!(cliff.order(), BigUint::from(clifford_order(d)));
        assert!(cliff.is_subgroup_of(&aut) && aut.is_subgroup_of(&cliff), "d={d}");
    }
}

#[test]
fn analytic_automorphism_orders() {
    for (d, order) in [(2, 24u32), (3, 216), (4, 1920), (5, 3000)] {
        let (g, _) = gram_from_bases(&analytic_mubs(dim(d)).unwrap()).unwrap();
        let aut = automorphisms(&triple_tensor(&g), 1e-9).unwrap();
        assert_eq!(aut.order(), BigUint::from(order), "d={d}");
    }
}

#[test]
fn unsupported_dimension_is_rejected() {
    assert!(analytic_mubs(dim(6)).is_err());
}
