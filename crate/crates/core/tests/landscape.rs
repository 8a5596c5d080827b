use mubforge_core::dim::{Dimension, PhaseLayout};
use mubforge_core::error::LandscapeError;
use mubforge_core::gram::{build_gram, gram_from_bases};
use mubforge_core::landscape::{gauge_direction, hessian, hessian_analysis, rayleigh_quotient, restricted_defect};
use mubforge_core::optimize::{random_init, start_rng};
use mubforge_core::wh::analytic_mubs;

#[test]
fn analytic_solutions_are_isolated() {
    for d in 2..=5 {
        let dim = Dimension::new(d).unwrap();
        let (g, phi) = gram_from_bases(&analytic_mubs(dim).unwrap()).unwrap();
        let defect = restricted_defect(&g, 1e-10, 1e-8).unwrap();
        assert_eq!(defect.delta, 0, "d={d}");
        assert_eq!(defect.z, defect.z_expected);
        let h = hessian_analysis(&phi, 1e-5, 1e-7).unwrap();
        assert_eq!(h.nontrivial_null, 0, "d={d}");
        assert_eq!(h.gauge_dim, dim.states() - 1);
        assert!(h.smallest_positive.unwrap() > 1e-6);
    }
}

#[test]
fn gauge_directions_are_flat() {
    let dim = Dimension::new(3).unwrap();
    let (_, phi) = gram_from_bases(&analytic_mubs(dim).unwrap()).unwrap();
    let h = hessian(&phi, 1e-5);
    let layout = PhaseLayout::new(dim);
    for a in 0..dim.states() {
        let v = gauge_direction(&layout, a);
        assert!(rayleigh_quotient(&h, &v).abs() < 1e-12, "state {a}");
    }
}

#[test]
fn random_points_are_rejected() {
    let dim = Dimension::new(3).unwrap();
    let phi = random_init(dim, &mut start_rng(2, 0));
    assert!(matches!(hessian_analysis(&phi, 1e-5, 1e-7), Err(LandscapeError::NotSolution { .. })));
    assert!(matches!(restricted_defect(&build_gram(&phi), 1e-10, 1e-8), Err(LandscapeError::NotUnitary { .. })));
}
