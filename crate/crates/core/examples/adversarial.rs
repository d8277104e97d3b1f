//! An attack set that is not a separator is exposed by a suitably chosen
//! realization, within a few steps of the attack starting.
//!
//! ```text
//! cargo run --example adversarial
//! ```

use nalgebra::DVector;
use secidx::attack::{
    adversarial_realization, simulate, synth_type1, unguarded_path, InputSchedule, Payload,
    DETECTION_THRESHOLD,
};
use secidx::model::load_model;
use secidx::robust_index::is_separator;
use secidx::ComponentSet;

fn main() -> secidx::Result<()> {
    let (m, _) = load_model(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/example3.json"))?;
    let set = ComponentSet::new([0], [0]);
    println!("{} separates u1: {}", set.label(&m), is_separator(&m, &set, 0));

    let path = unguarded_path(&m, &set, 0).expect("set is not a separator");
    println!("unguarded path: {path:?}");
    let r = adversarial_realization(&m, &path, 3)?;
    println!("A =\n{:.3}", r.a);

    let policy = synth_type1(&m, &r, &set, 0, Payload::Step(1.0))?;
    for w in &policy.warnings {
        println!("warning: {w}");
    }
    let onset = 5;
    let trace = simulate(&m, &r, &policy, &DVector::zeros(m.n_x()), &InputSchedule::zero(m.n_u()), 20, onset)?;
    match trace.first_detection(DETECTION_THRESHOLD) {
        Some(k) => println!("attack from k = {onset} detected at k = {k}"),
        None => println!("attack went unnoticed"),
    }
    Ok(())
}
