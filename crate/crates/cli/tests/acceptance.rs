use iwasawa_cli::suite;

#[test]
fn acceptance() {
    let outcomes = suite::run(&suite::ALL, None);
    for o in &outcomes {
        println!("{}", o.line());
    }
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
