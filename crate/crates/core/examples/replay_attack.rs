//! Replay attacks, with and without control of the sensor that sees the
//! actuator.
//!
//! ```text
//! cargo run --example replay_attack
//! ```

use nalgebra::DVector;
use secidx::attack::{record_outputs, simulate, steady_state, synth_type3, InputSchedule, Payload};
use secidx::model::load_model;
use secidx::ComponentSet;

fn main() -> secidx::Result<()> {
    let (m, r) = load_model(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/example4_numeric.json"))?;
    let r = r.ok_or(secidx::Error::MissingRealization)?;
    let u = DVector::from_vec(vec![0.4]);
    let x0 = steady_state(&r, &u).expect("A has no eigenvalue at 1");
    let inputs = InputSchedule::constant(vec![0.4]);
    let recorded = record_outputs(&r, &x0, &inputs, 10);

    for set in [ComponentSet::new([0], [0]), ComponentSet::new([0], [])] {
        let policy = synth_type3(&m, &set, 0, Payload::Step(2.0), recorded.clone())?;
        for w in &policy.warnings {
            println!("warning: {w}");
        }
        let trace = simulate(&m, &r, &policy, &x0, &inputs, 40, 0)?;
        println!(
            "replay on {}: max |residual| {:.3e}, final x = {:.3?}",
            set.label(&m),
            trace.max_abs_residual(),
            trace.x.last().unwrap().as_slice()
        );
    }
    Ok(())
}
