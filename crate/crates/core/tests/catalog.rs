use std::collections::BTreeSet;
use std::path::Path;

use bicomm::arith::Rational;
use bicomm::catalog::{parse_algebra, serialize_algebra, Catalog};
use bicomm::harness::{self, instance, Status};

fn catalog_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/catalog"))
}

#[test]
fn directory_matches_embedded_copy() {
    let disk = Catalog::from_dir(catalog_dir()).unwrap();
    let emb = Catalog::embedded().unwrap();
    let names = |c: &Catalog| c.entries.iter().map(|e| e.name.clone()).collect::<Vec<_>>();
    assert_eq!(names(&disk), names(&emb));
    assert_eq!(disk.notes.len(), emb.notes.len());
    for (a, b) in disk.entries.iter().zip(&emb.entries) {
        assert_eq!(a.base.tensor(), b.base.tensor(), "{}", a.name);
        assert_eq!(a.reps.len(), b.reps.len(), "{}", a.name);
    }
}

#[test]
fn missing_directory_is_an_error() {
    assert!(Catalog::from_dir(Path::new("/nonexistent/catalog")).is_err());
}

#[test]
fn shape_of_the_catalog() {
    let cat = Catalog::embedded().unwrap();
    assert_eq!(cat.entries.len(), 41);
    let dims: BTreeSet<usize> = cat.entries.iter().map(|e| e.dim()).collect();
    assert_eq!(dims, BTreeSet::from([3, 4]));
    let counted: Vec<_> = cat.all_reps().filter(|(_, r)| !r.reference).collect();
    assert_eq!(counted.len(), 207);
    let mut names: Vec<&str> = counted.iter().map(|(_, r)| r.name.as_str()).collect();
    names.sort();
    names.dedup();
    assert_eq!(names.len(), 207, "representative names are unique");
}

#[test]
fn every_base_is_nilpotent_and_bicommutative() {
    let cat = Catalog::embedded().unwrap();
    for e in &cat.entries {
        for v in e.sample_bindings() {
            let a = instance::base_at::<Rational>(e, &v).unwrap();
            assert!(a.is_bicommutative(), "{}", e.name);
            let k = a.nilpotency_index().unwrap_or_else(|| panic!("{} is not nilpotent", e.name));
            assert!((3..=4).contains(&k), "{} nilindex {k}", e.name);
        }
    }
}

#[test]
fn bases_round_trip_through_text() {
    let cat = Catalog::embedded().unwrap();
    for e in &cat.entries {
        let text = serialize_algebra(&e.base, &e.name).unwrap();
        let back = parse_algebra(&text).unwrap();
        assert_eq!(back.tensor(), e.base.tensor(), "{}", e.name);
    }
}

#[test]
fn first_representative_is_a_nonsplit_extension() {
    let cat = Catalog::embedded().unwrap();
    let (e, rep) = cat.representative("B01").unwrap();
    let v = instance::rep_samples(e, rep).unwrap().remove(0);
    let (check, ext) = harness::extension_at::<Rational>(e, &rep.cocycles, &v).unwrap();
    assert!(check.failures.is_empty(), "{:?}", check.failures);
    assert_eq!(ext.dim(), 5);
    assert!(!ext.has_annihilator_component());
}

#[test]
fn negative_controls_are_flagged() {
    let cat = Catalog::embedded().unwrap();
    assert_eq!(harness::theta_zero_control(&cat).status, Status::Pass);
    let note = &cat.notes[0];
    let bad = harness::verify_note(&cat, &harness::perturbed_note(&cat, note).unwrap(), 10_000);
    assert!(bad.iter().all(|(_, s, _)| matches!(s, harness::NoteStatus::Failed(_))));
}

#[test]
fn suites_are_deterministic() {
    let cat = Catalog::embedded().unwrap();
    let a = harness::verify_h2_tables(&cat).porcelain();
    let b = harness::verify_h2_tables(&cat).porcelain();
    assert_eq!(a, b);
    let a = harness::count_theorem_a(&cat).porcelain();
    assert_eq!(a, harness::count_theorem_a(&cat).porcelain());
}
