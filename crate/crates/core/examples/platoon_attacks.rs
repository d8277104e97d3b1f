//! Feedforward and local-feedback attacks on a two-vehicle platoon.
//!
//! Case 1 runs both attacks on the true model. In case 2 the attacker's
//! model is slightly wrong, which only hurts the feedforward attack. In
//! case 3 the operator changes `u2` mid-run, which only hurts the
//! local-feedback attack.
//!
//! ```text
//! cargo run --example platoon_attacks
//! ```

use secidx::attack::{Scenario, DETECTION_THRESHOLD};

fn main() -> secidx::Result<()> {
    for case in ["case1", "case2", "case3"] {
        let path = format!("{}/fixtures/{case}.json", env!("CARGO_MANIFEST_DIR"));
        let outcome = Scenario::load(&path)?.run()?;
        for run in &outcome.runs {
            let verdict = match run.trace.first_detection(DETECTION_THRESHOLD) {
                Some(k) => format!("detected at k = {k}"),
                None => "undetected".to_owned(),
            };
            println!(
                "{case} {:>5}: max |residual| {:.2e}, {verdict}",
                run.name,
                run.trace.max_abs_residual()
            );
        }
    }

    // Write the first trace of case 2 as CSV on stdout.
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/case2.json");
    let outcome = Scenario::load(path)?.run()?;
    let mut buf = Vec::new();
    outcome.runs[0].trace.write_csv(&mut buf)?;
    let text = String::from_utf8_lossy(&buf);
    for line in text.lines().take(5) {
        println!("{line}");
    }
    Ok(())
}
