// Kept in its own binary: it mutates the process environment.

use std::fs;

use convexgrowth_cli::run_with;

fn run(args: &[&str]) -> i32 {
    let argv = std::iter::once("convexgrowth").chain(args.iter().copied());
    run_with(argv, &mut Vec::new(), &mut Vec::new())
}

#[test]
fn size_cap_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let text: String = (1..=200).map(|i| format!("{}\n", i * i)).collect();
    let a = dir.path().join("a.txt");
    fs::write(&a, text).unwrap();
    let a = a.to_str().unwrap();
    std::env::set_var(convexgrowth_cli::SIZE_CAP_ENV, "10000");
    let code = run(&["sumset", "--set", a, "--spec", "2,1"]);
    std::env::remove_var(convexgrowth_cli::SIZE_CAP_ENV);
    assert_eq!(code, 3);
    assert_eq!(run(&["sumset", "--set", a, "--spec", "2,1"]), 0);
}
