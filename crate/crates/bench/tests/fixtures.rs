use lexichoice_bench::Fixture;
use lexichoice_core::props::classify_tlcr;

#[test]
fn fixtures_are_seeded_and_threshold_linear() {
    let a = Fixture::new(6, 9);
    let b = Fixture::new(6, 9);
    assert_eq!(a.composed().tabulate().unwrap(), b.composed().tabulate().unwrap());
    assert!(classify_tlcr(&a.exclusion).unwrap().is_tlcr);
}
