use std::f64::consts::TAU;

use mubforge_core::dim::Dimension;
use mubforge_core::gram::build_gram;
use mubforge_core::phases::PhaseVector;
use mubforge_core::traces::{f_expansion, f_matrix, g_expansion, g_matrix, gradient, objective};
use proptest::prelude::*;

fn phases(d: usize) -> impl Strategy<Value = PhaseVector> {
    let dim = Dimension::new(d).unwrap();
    prop::collection::vec(0.0..TAU, dim.phase_count()).prop_map(move |v| PhaseVector::new(dim, v).unwrap())
}

fn check_expansions(phi: &PhaseVector) -> Result<(), TestCaseError> {
    let g = build_gram(phi);
    let (fe, fm) = (f_expansion(phi), f_matrix(&g).unwrap());
    let (ge, gm) = (g_expansion(phi), g_matrix(&g).unwrap());
    prop_assert!((fe - fm).abs() < 1e-10, "f: {fe} vs {fm}");
    prop_assert!((ge - gm).abs() < 1e-10, "g: {ge} vs {gm}");
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn expansions_match_matrix_d2(phi in phases(2)) {
        check_expansions(&phi)?;
    }

    #[test]
    fn expansions_match_matrix_d3(phi in phases(3)) {
        check_expansions(&phi)?;
    }

    #[test]
    fn expansions_match_matrix_d4(phi in phases(4)) {
        check_expansions(&phi)?;
    }
}

/// Fourth-order central difference of `F'` along coordinate `k`.
fn fd_component(phi: &PhaseVector, k: usize, h: f64) -> f64 {
    let at = |t: f64| {
        let mut p = phi.clone();
        p.as_mut_slice()[k] += t;
        objective(&p).squared()
    };
    (8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h))) / (12.0 * h)
}

fn check_gradient(phi: &PhaseVector) -> Result<(), TestCaseError> {
    let grad = gradient(phi);
    for (k, &a) in grad.iter().enumerate() {
        let fd = fd_component(phi, k, 1e-3);
        let scale = a.abs().max(fd.abs()).max(1e-8);
        prop_assert!((a - fd).abs() <= 1e-6 * scale, "component {k}: analytic {a:e}, fd {fd:e}");
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn gradient_matches_finite_differences_d3(phi in phases(3)) {
        check_gradient(&phi)?;
    }

    #[test]
    fn gradient_matches_finite_differences_d4(phi in phases(4)) {
        check_gradient(&phi)?;
    }

    #[test]
    fn single_precision_tracks_double(phi in phases(3)) {
        let f64_value = objective(&phi).value();
        let f32_value = objective(&phi.cast::<f32>()).value() as f64;
        prop_assert!((f64_value - f32_value).abs() < 1e-4 * f64_value.max(1.0));
    }
}
