use dirac_cad::selftest::{criteria, run, Fixtures};

#[test]
fn acceptance() {
    let outcomes = run(&Fixtures::default(), None);
    assert_eq!(outcomes.len(), criteria().len());
    for o in &outcomes {
        println!("{}", o.line());
    }
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.name).collect();
    assert!(failed.is_empty(), "failed: {failed:?}");
}
