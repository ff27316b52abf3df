//! Simulation traces pinned byte for byte. After an intended model change,
//! regenerate with `blockwatt simulate data/scenarios/<name>.scenario --out
//! tests/golden/<name>.csv`.

use std::path::Path;

use blockwatt::cli::render_trace;
use blockwatt::ingest::load_scenario;
use blockwatt::minesim::{run_simulation, SimOutcome};

fn check(name: &str) {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let config = load_scenario(&root.join(format!("data/scenarios/{name}.scenario"))).unwrap();
    let trace = run_simulation(&config).unwrap();
    assert_eq!(trace.outcome, SimOutcome::Completed);
    let expected = std::fs::read_to_string(root.join(format!("tests/golden/{name}.csv"))).unwrap();
    assert_eq!(
        render_trace(&trace, &config.spec),
        expected,
        "{name} trace drifted"
    );
}

#[test]
fn halving_trace() {
    check("halving");
}

#[test]
fn price_shock_trace() {
    check("price_shock");
}

#[test]
fn steady_trace() {
    check("steady");
}
