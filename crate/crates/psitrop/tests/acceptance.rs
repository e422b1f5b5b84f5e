//! The acceptance gate: runs every criterion at the desk level and prints
//! one pass/fail line per criterion.

use psitrop::acceptance::{run_all, Config, Level};
use std::path::PathBuf;

#[test]
fn acceptance_desk() {
    let config = Config {
        level: Level::Desk,
        seed: 17,
        fixtures: PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures"),
    };
    let results = run_all(&config).expect("acceptance suite runs");
    let mut all = true;
    for r in &results {
        println!(
            "criterion {}: {} [{}] ({:.2}s, {} checks)",
            r.id,
            r.name,
            if r.passed() { "PASS" } else { "FAIL" },
            r.seconds,
            r.checks.len()
        );
        for c in &r.checks {
            if !c.pass {
                println!("    FAIL {}: expected {}, got {}", c.name, c.expected, c.actual);
            }
        }
        all &= r.passed();
    }
    assert!(all, "acceptance criteria failed");
}
