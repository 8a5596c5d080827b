use std::f64::consts::TAU;

use mubforge_core::dim::Dimension;
use mubforge_core::error::RecordError;
use mubforge_core::gram::{build_gram, gram_from_bases, verify_mub_definition};
use mubforge_core::perm::Perm;
use mubforge_core::phases::PhaseVector;
use mubforge_core::record::{gram_csv, parse_perm, perm_text, SolutionRecord};
use mubforge_core::wh::analytic_mubs;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn json_round_trip_is_bit_exact(v in prop::collection::vec(-10.0 * TAU..10.0 * TAU, 54)) {
        let phi = PhaseVector::new(Dimension::new(3).unwrap(), v).unwrap();
        let rec = SolutionRecord::new(&phi);
        let back = SolutionRecord::from_reader(rec.to_json().as_bytes()).unwrap();
        prop_assert_eq!(&back, &rec);
        for (a, b) in back.phases.iter().zip(phi.as_slice()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn perm_text_round_trip(images in Just((0..12usize).collect::<Vec<_>>()).prop_shuffle()) {
        let p = Perm::from_images(images).unwrap();
        prop_assert_eq!(parse_perm(&perm_text(&p)).unwrap(), p);
    }
}

#[test]
fn save_and_load_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sol.json");
    let m = analytic_mubs(Dimension::new(4).unwrap()).unwrap();
    let (_, phi) = gram_from_bases(&m).unwrap();
    let mut rec = SolutionRecord::new(&phi).with_bases(&m);
    rec.f_final = Some(1e-15);
    rec.save(&path).unwrap();
    rec.save(&path).unwrap();
    let back = SolutionRecord::load(&path).unwrap();
    assert_eq!(back, rec);
    assert!(verify_mub_definition(&back.mub_set().unwrap().unwrap(), 1e-12).passed);
    let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names.len(), 1);
}

#[test]
fn malformed_records_are_rejected() {
    let bad_len = r#"{"d": 3, "phases": [0.0, 1.0], "format_version": 1}"#;
    assert!(matches!(SolutionRecord::from_reader(bad_len.as_bytes()), Err(RecordError::Phase(_))));
    let bad_version = r#"{"d": 2, "phases": [], "format_version": 7}"#;
    assert!(matches!(SolutionRecord::from_reader(bad_version.as_bytes()), Err(RecordError::Version(7))));
    assert!(matches!(SolutionRecord::from_reader("{".as_bytes()), Err(RecordError::Json(_))));
    assert!(parse_perm("3\n1 1 2\n").is_err());
}

#[test]
fn gram_csv_has_interleaved_columns() {
    let phi = PhaseVector::zeros(Dimension::new(2).unwrap());
    let csv = gram_csv(&build_gram(&phi));
    let rows: Vec<_> = csv.lines().collect();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.split(',').count() == 12));
}
